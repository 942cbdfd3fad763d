//! Linear connections, torsion, covariant derivatives and J-invariance.
//!
//! Convention: `∇_{∂_i} ∂_j = Γ^k_{ij} ∂_k`; the first lower index is the
//! direction of differentiation. Coefficients are stored flat in `(k, i, j)`
//! order.
//!
//! Connections derived from other fields (Levi-Civita, conjugates) are
//! evaluated on demand as first-order jets of their coefficients, computed
//! from second-order jets of the metric and complex-structure components.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::expr::ExprNode;
use crate::geometry::{ComplexStructureField, MetricField, MetricRole};
use crate::jets::{Jet1, MatrixJet, ScalarField, MAX_DIM};
use crate::report::{CheckReport, Residual};
use crate::sampling::SampleSet;
use crate::tensor::TensorValue;

/// First-order jets of all `Γ^k_{ij}` at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionJet {
    dim: usize,
    coeffs: Vec<Jet1>,
}

impl ConnectionJet {
    pub fn zeros(dim: usize) -> ConnectionJet {
        ConnectionJet {
            dim,
            coeffs: vec![Jet1::constant(dim, 0.0); dim * dim * dim],
        }
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize, usize) -> Jet1) -> ConnectionJet {
        let mut coeffs = Vec::with_capacity(dim * dim * dim);
        for k in 0..dim {
            for i in 0..dim {
                for j in 0..dim {
                    coeffs.push(f(k, i, j));
                }
            }
        }
        ConnectionJet { dim, coeffs }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, k: usize, i: usize, j: usize) -> &Jet1 {
        &self.coeffs[(k * self.dim + i) * self.dim + j]
    }

    /// `Γ^k_{ij}`.
    #[inline]
    pub fn value(&self, k: usize, i: usize, j: usize) -> f64 {
        self.get(k, i, j).value()
    }

    /// `∂_l Γ^k_{ij}`.
    #[inline]
    pub fn derivative(&self, k: usize, i: usize, j: usize, l: usize) -> f64 {
        self.get(k, i, j).d(l)
    }

    /// Coefficient values in `(k, i, j)` order.
    pub fn values(&self) -> Vec<f64> {
        self.coeffs.iter().map(Jet1::value).collect()
    }

    /// Coefficient derivatives in `(k, i, j, l)` order.
    pub fn derivatives(&self) -> Vec<f64> {
        self.coeffs.iter().flat_map(|c| c.grad().to_vec()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    Explicit,
    LeviCivita(MetricRole),
    MetricConjugate(MetricRole),
    JConjugate,
    CubicPerturbation(MetricRole),
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn metric(role: &MetricRole) -> &'static str {
            match role {
                MetricRole::PrimaryMetric => "g",
                MetricRole::TwinMetric => "G",
                MetricRole::Generic => "rho",
            }
        }
        match self {
            Provenance::Explicit => write!(f, "explicit"),
            Provenance::LeviCivita(r) => write!(f, "levi-civita({})", metric(r)),
            Provenance::MetricConjugate(r) => write!(f, "{}-conjugate", metric(r)),
            Provenance::JConjugate => write!(f, "J-conjugate"),
            Provenance::CubicPerturbation(r) => write!(f, "cubic-perturbation({})", metric(r)),
        }
    }
}

#[derive(Debug, Clone)]
enum Source {
    Explicit(Arc<Vec<ScalarField>>),
    LeviCivita(MetricField),
    MetricConjugate {
        base: Arc<ConnectionField>,
        metric: MetricField,
    },
    JConjugate {
        base: Arc<ConnectionField>,
        j: ComplexStructureField,
    },
    CubicPerturbation {
        base: Arc<ConnectionField>,
        metric: MetricField,
        cubic: Arc<Vec<ScalarField>>,
    },
}

/// A linear connection on a chart, explicit or derived.
#[derive(Debug, Clone)]
pub struct ConnectionField {
    dim: usize,
    source: Source,
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 || dim > MAX_DIM {
        return Err(Error::InvalidInput(format!("unsupported dimension {dim}")));
    }
    Ok(())
}

fn scalar_fields(dim: usize, exprs: Vec<ExprNode>, what: &str) -> Result<Vec<ScalarField>> {
    if exprs.len() != dim * dim * dim {
        return Err(Error::InvalidInput(format!(
            "{what} needs {} components in (k, i, j) order, got {}",
            dim * dim * dim,
            exprs.len()
        )));
    }
    exprs
        .into_iter()
        .map(|e| match e.max_coord() {
            Some(c) if c >= dim => Err(Error::InvalidInput(format!(
                "coordinate index {c} out of range for dimension {dim}"
            ))),
            _ => Ok(ScalarField::new(e, dim)),
        })
        .collect()
}

impl ConnectionField {
    /// Explicit coefficients `Γ^k_{ij}` in `(k, i, j)` order. Torsion is allowed.
    pub fn explicit(dim: usize, coeffs: Vec<ExprNode>) -> Result<ConnectionField> {
        check_dim(dim)?;
        Ok(ConnectionField {
            dim,
            source: Source::Explicit(Arc::new(scalar_fields(dim, coeffs, "connection")?)),
        })
    }

    /// The connection with all coefficients zero.
    pub fn zero(dim: usize) -> Result<ConnectionField> {
        ConnectionField::explicit(dim, vec![ExprNode::Constant(0.0); dim * dim * dim])
    }

    /// Levi-Civita connection of a nondegenerate symmetric field.
    pub fn levi_civita(rho: &MetricField) -> ConnectionField {
        ConnectionField {
            dim: rho.dim(),
            source: Source::LeviCivita(rho.clone()),
        }
    }

    /// `Γ^m_{kj} + ρ^{mi} C_{kij}` for a cubic tensor `C` given in `(k, i, j)` order.
    pub fn with_cubic_perturbation(&self, rho: &MetricField, cubic: Vec<ExprNode>) -> Result<ConnectionField> {
        if rho.dim() != self.dim {
            return Err(Error::InvalidInput("perturbation metric dimension mismatch".into()));
        }
        Ok(ConnectionField {
            dim: self.dim,
            source: Source::CubicPerturbation {
                base: Arc::new(self.clone()),
                metric: rho.clone(),
                cubic: Arc::new(scalar_fields(self.dim, cubic, "cubic tensor")?),
            },
        })
    }

    pub(crate) fn metric_conjugate(&self, rho: &MetricField) -> ConnectionField {
        ConnectionField {
            dim: self.dim,
            source: Source::MetricConjugate {
                base: Arc::new(self.clone()),
                metric: rho.clone(),
            },
        }
    }

    pub(crate) fn j_conjugate(&self, j: &ComplexStructureField) -> ConnectionField {
        ConnectionField {
            dim: self.dim,
            source: Source::JConjugate {
                base: Arc::new(self.clone()),
                j: j.clone(),
            },
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn provenance(&self) -> Provenance {
        match &self.source {
            Source::Explicit(_) => Provenance::Explicit,
            Source::LeviCivita(rho) => Provenance::LeviCivita(rho.role()),
            Source::MetricConjugate { metric, .. } => Provenance::MetricConjugate(metric.role()),
            Source::JConjugate { .. } => Provenance::JConjugate,
            Source::CubicPerturbation { metric, .. } => Provenance::CubicPerturbation(metric.role()),
        }
    }

    /// Explicit coefficient expressions, when this connection has them.
    pub fn explicit_coefficients(&self) -> Option<Vec<ExprNode>> {
        match &self.source {
            Source::Explicit(fields) => Some(fields.iter().map(|f| f.expr().clone()).collect()),
            _ => None,
        }
    }

    /// Coefficient values and first derivatives at `point`.
    pub fn jet_at(&self, point: &[f64]) -> Result<ConnectionJet> {
        match &self.source {
            Source::Explicit(fields) => {
                let mut coeffs = Vec::with_capacity(fields.len());
                for f in fields.iter() {
                    coeffs.push(f.jet1(point)?);
                }
                Ok(ConnectionJet { dim: self.dim, coeffs })
            }
            Source::LeviCivita(rho) => {
                let (m, inv) = rho.jet_and_inverse_at(point)?;
                Ok(levi_civita_jet(&m, &inv))
            }
            Source::MetricConjugate { base, metric } => {
                let gamma = base.jet_at(point)?;
                let (m, inv) = metric.jet_and_inverse_at(point)?;
                Ok(metric_conjugate_jet(&gamma, &m, &inv))
            }
            Source::JConjugate { base, j } => {
                let gamma = base.jet_at(point)?;
                Ok(j_conjugate_jet(&gamma, &j.jet_at(point)?))
            }
            Source::CubicPerturbation { base, metric, cubic } => {
                let gamma = base.jet_at(point)?;
                let (_, inv) = metric.jet_and_inverse_at(point)?;
                let mut c = Vec::with_capacity(cubic.len());
                for f in cubic.iter() {
                    c.push(f.jet1(point)?);
                }
                Ok(cubic_perturbation_jet(&gamma, &inv, &c))
            }
        }
    }
}

/// `Γ^k_{ij} = ½ ρ^{kl}(∂_i ρ_{jl} + ∂_j ρ_{il} − ∂_l ρ_{ij})`.
pub fn levi_civita_jet(rho: &MatrixJet, rho_inv: &MatrixJet) -> ConnectionJet {
    let d = rho.rows();
    let dim = rho.dim();
    // first kind: [ij, l]
    let mut first = vec![Jet1::constant(dim, 0.0); d * d * d];
    for i in 0..d {
        for j in 0..d {
            for l in 0..d {
                first[(i * d + j) * d + l] =
                    (rho.get(j, l).partial(i) + rho.get(i, l).partial(j) - rho.get(i, j).partial(l)).scale(0.5);
            }
        }
    }
    ConnectionJet::from_fn(d, |k, i, j| {
        let mut acc = Jet1::constant(dim, 0.0);
        for l in 0..d {
            acc.add_product(&rho_inv.get(k, l).first_order(), &first[(i * d + j) * d + l]);
        }
        acc
    })
}

/// Conjugate with respect to `ρ`: `Γ*^m_{kj} = ρ^{mi}(∂_k ρ_{ij} − ρ_{lj} Γ^l_{ki})`.
pub fn metric_conjugate_jet(gamma: &ConnectionJet, rho: &MatrixJet, rho_inv: &MatrixJet) -> ConnectionJet {
    let d = gamma.dim();
    let dim = rho.dim();
    // a[(i, k, j)] = ∂_k ρ_ij − ρ_lj Γ^l_ki
    let mut a = vec![Jet1::constant(dim, 0.0); d * d * d];
    for i in 0..d {
        for k in 0..d {
            for j in 0..d {
                let mut acc = rho.get(i, j).partial(k);
                let mut sub = Jet1::constant(dim, 0.0);
                for l in 0..d {
                    sub.add_product(&rho.get(l, j).first_order(), gamma.get(l, k, i));
                }
                acc = acc - sub;
                a[(i * d + k) * d + j] = acc;
            }
        }
    }
    ConnectionJet::from_fn(d, |m, k, j| {
        let mut acc = Jet1::constant(dim, 0.0);
        for i in 0..d {
            acc.add_product(&rho_inv.get(m, i).first_order(), &a[(i * d + k) * d + j]);
        }
        acc
    })
}

/// `∇ᴶ_X Y = J⁻¹ ∇_X (JY)` with `J⁻¹ = −J`:
/// `(Γᴶ)^p_{kj} = −J^p_m (∂_k J^m_j + Γ^m_{kl} J^l_j)`.
pub fn j_conjugate_jet(gamma: &ConnectionJet, j: &MatrixJet) -> ConnectionJet {
    let d = gamma.dim();
    let dim = j.dim();
    let mut inner = vec![Jet1::constant(dim, 0.0); d * d * d];
    for m in 0..d {
        for k in 0..d {
            for jj in 0..d {
                let mut acc = j.get(m, jj).partial(k);
                for l in 0..d {
                    acc.add_product(gamma.get(m, k, l), &j.get(l, jj).first_order());
                }
                inner[(m * d + k) * d + jj] = acc;
            }
        }
    }
    ConnectionJet::from_fn(d, |p, k, jj| {
        let mut acc = Jet1::constant(dim, 0.0);
        for m in 0..d {
            acc.add_product(&j.get(p, m).first_order(), &inner[(m * d + k) * d + jj]);
        }
        -acc
    })
}

/// `Γ^m_{kj} + ρ^{mi} C_{kij}`, with `cubic` in `(k, i, j)` order.
pub fn cubic_perturbation_jet(gamma: &ConnectionJet, rho_inv: &MatrixJet, cubic: &[Jet1]) -> ConnectionJet {
    let d = gamma.dim();
    ConnectionJet::from_fn(d, |m, k, j| {
        let mut acc = *gamma.get(m, k, j);
        for i in 0..d {
            acc.add_product(&rho_inv.get(m, i).first_order(), &cubic[(k * d + i) * d + j]);
        }
        acc
    })
}

/// `T^k_{ij} = Γ^k_{ij} − Γ^k_{ji}`, index order `(k, i, j)`.
pub fn torsion_at(gamma: &ConnectionJet, point: &[f64]) -> TensorValue {
    let d = gamma.dim();
    TensorValue::from_fn(1, 2, d, point, |x| gamma.value(x[0], x[1], x[2]) - gamma.value(x[0], x[2], x[1]))
}

/// `(∇_k ρ)_{ij} = ∂_k ρ_{ij} − Γ^l_{ki} ρ_{lj} − Γ^l_{kj} ρ_{il}`, index order `(k, i, j)`.
pub fn covariant_derivative_02_at(gamma: &ConnectionJet, rho: &MatrixJet, point: &[f64]) -> TensorValue {
    let d = gamma.dim();
    TensorValue::from_fn(0, 3, d, point, |x| {
        let (k, i, j) = (x[0], x[1], x[2]);
        let mut v = rho.get(i, j).d(k);
        for l in 0..d {
            v -= gamma.value(l, k, i) * rho.get(l, j).value() + gamma.value(l, k, j) * rho.get(i, l).value();
        }
        v
    })
}

/// `(∇_k J)^i_j = ∂_k J^i_j + Γ^i_{kl} J^l_j − Γ^l_{kj} J^i_l`, index order `(k, i, j)`.
pub fn covariant_derivative_11_at(gamma: &ConnectionJet, j: &MatrixJet, point: &[f64]) -> TensorValue {
    let d = gamma.dim();
    TensorValue::from_fn(1, 2, d, point, |x| {
        let (k, i, jj) = (x[0], x[1], x[2]);
        let mut v = j.get(i, jj).d(k);
        for l in 0..d {
            v += gamma.value(i, k, l) * j.get(l, jj).value() - gamma.value(l, k, jj) * j.get(i, l).value();
        }
        v
    })
}

pub fn torsion(connection: &ConnectionField, point: &[f64]) -> Result<TensorValue> {
    Ok(torsion_at(&connection.jet_at(point)?, point))
}

pub fn covariant_derivative_02(connection: &ConnectionField, rho: &MetricField, point: &[f64]) -> Result<TensorValue> {
    Ok(covariant_derivative_02_at(&connection.jet_at(point)?, &rho.jet_at(point)?, point))
}

pub fn covariant_derivative_11(
    connection: &ConnectionField,
    j: &ComplexStructureField,
    point: &[f64],
) -> Result<TensorValue> {
    Ok(covariant_derivative_11_at(&connection.jet_at(point)?, &j.jet_at(point)?, point))
}

/// Largest `|T^k_{ij}|` over the samples.
pub fn torsion_residual(connection: &ConnectionField, samples: &SampleSet) -> Result<f64> {
    let mut r = Residual::new();
    for p in samples.iter() {
        r.zero(&torsion(connection, p)?.data);
    }
    Ok(r.value())
}

/// `∇` is J-invariant iff `∇J = 0`; residual `max |(∇_k J)^i_j|`.
pub fn check_j_invariant(
    connection: &ConnectionField,
    j: &ComplexStructureField,
    samples: &SampleSet,
    tol: f64,
) -> Result<CheckReport> {
    let mut r = Residual::new();
    for p in samples.iter() {
        r.zero(&covariant_derivative_11(connection, j, p)?.data);
    }
    Ok(CheckReport::from_residuals("J_invariant", tol, samples, vec![("nabla J".into(), r.value())]))
}

/// Residual of `∇ρ = 0`.
pub fn metric_compatibility_residual(connection: &ConnectionField, rho: &MetricField, samples: &SampleSet) -> Result<f64> {
    let mut r = Residual::new();
    for p in samples.iter() {
        r.zero(&covariant_derivative_02(connection, rho, p)?.data);
    }
    Ok(r.value())
}
