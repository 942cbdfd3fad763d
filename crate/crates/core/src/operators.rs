//! Lie derivative, Tachibana operator, Nijenhuis tensor and cubic forms.

use crate::connections::{covariant_derivative_02_at, covariant_derivative_11_at, torsion_at, ConnectionField, ConnectionJet};
use crate::error::{Error, Result};
use crate::expr::ExprNode;
use crate::geometry::{ComplexStructureField, MetricField, PointContext, Structure};
use crate::jets::{Jet1, MatrixJet, ScalarField, MAX_DIM};
use crate::report::{CheckReport, Residual};
use crate::sampling::SampleSet;
use crate::tensor::TensorValue;

/// Torsion above this (absolute) rejects a connection where torsion-free is required.
pub const TORSION_THRESHOLD: f64 = 1e-9;

/// A vector field given by its components `V^k`.
#[derive(Debug, Clone)]
pub struct VectorField {
    components: Vec<ScalarField>,
}

impl VectorField {
    pub fn new(components: Vec<ExprNode>) -> Result<VectorField> {
        let dim = components.len();
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::InvalidInput(format!("unsupported dimension {dim}")));
        }
        if let Some(c) = components.iter().filter_map(ExprNode::max_coord).max() {
            if c >= dim {
                return Err(Error::InvalidInput(format!("coordinate index {c} out of range for dimension {dim}")));
            }
        }
        Ok(VectorField {
            components: components.into_iter().map(|e| ScalarField::new(e, dim)).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn jet_at(&self, point: &[f64]) -> Result<Vec<Jet1>> {
        self.components.iter().map(|c| Ok(c.jet1(point)?)).collect()
    }
}

/// `(L_V T)_{ij} = V^m ∂_m T_{ij} + T_{mj} ∂_i V^m + T_{im} ∂_j V^m`.
pub fn lie_derivative_02_at(v: &[Jet1], t: &MatrixJet, point: &[f64]) -> TensorValue {
    let d = v.len();
    TensorValue::from_fn(0, 2, d, point, |x| {
        let (i, j) = (x[0], x[1]);
        let mut s = 0.0;
        for (m, vm) in v.iter().enumerate() {
            s += vm.value() * t.get(i, j).d(m) + t.get(m, j).value() * vm.d(i) + t.get(i, m).value() * vm.d(j);
        }
        s
    })
}

pub fn lie_derivative_02(v: &VectorField, t: &MetricField, point: &[f64]) -> Result<TensorValue> {
    if v.dim() != t.dim() {
        return Err(Error::InvalidInput("vector field and tensor dimensions differ".into()));
    }
    Ok(lie_derivative_02_at(&v.jet_at(point)?, &t.jet_at(point)?, point))
}

/// `(Φ_J ρ)_{kij} = (L_{J∂_k} ρ − L_{∂_k}(ρ∘J))_{ij}` with `(ρ∘J)_{ij} = J^m_i ρ_{mj}`.
pub fn tachibana_at(rho: &MatrixJet, j: &MatrixJet, point: &[f64]) -> TensorValue {
    let d = rho.rows();
    let dim = rho.dim();
    // (ρ∘J)_{ij} as first-order jets
    let mut composed = vec![Jet1::constant(dim, 0.0); d * d];
    for i in 0..d {
        for jj in 0..d {
            let mut acc = Jet1::constant(dim, 0.0);
            for m in 0..d {
                acc.add_product(&j.get(m, i).first_order(), &rho.get(m, jj).first_order());
            }
            composed[i * d + jj] = acc;
        }
    }
    let mut out = TensorValue::zeros(0, 3, d, point);
    for k in 0..d {
        let v: Vec<Jet1> = (0..d).map(|m| j.get(m, k).first_order()).collect();
        let lie = lie_derivative_02_at(&v, rho, point);
        for i in 0..d {
            for jj in 0..d {
                out.set(&[k, i, jj], lie.get(&[i, jj]) - composed[i * d + jj].d(k));
            }
        }
    }
    out
}

/// `Φ_J g` at a point.
pub fn tachibana(g: &MetricField, j: &ComplexStructureField, point: &[f64]) -> Result<TensorValue> {
    let jm = j.jet_at(point)?;
    let gm = g.jet_at(point)?;
    let (gv, jv) = (gm.value(), jm.value());
    let purity = (jv.transpose() * &gv - &gv * &jv).abs().max();
    if purity > 1e-9 * gv.abs().max().max(1.0) {
        return Err(Error::InvalidInput(format!("metric is not pure at {point:?} (residual {purity:e})")));
    }
    Ok(tachibana_at(&gm, &jm, point))
}

/// `Φ_J G`: the same operator applied to the twin metric.
pub fn tachibana_twin(structure: &Structure, point: &[f64]) -> Result<TensorValue> {
    Ok(tachibana_at(&structure.twin().jet_at(point)?, &structure.j().jet_at(point)?, point))
}

/// `N^k_{ij} = J^m_i ∂_m J^k_j − J^m_j ∂_m J^k_i − J^k_m ∂_i J^m_j + J^k_m ∂_j J^m_i`,
/// index order `(k, i, j)`.
pub fn nijenhuis_at(j: &MatrixJet, point: &[f64]) -> TensorValue {
    let d = j.rows();
    TensorValue::from_fn(1, 2, d, point, |x| {
        let (k, a, b) = (x[0], x[1], x[2]);
        let mut s = 0.0;
        for m in 0..d {
            s += j.get(m, a).value() * j.get(k, b).d(m) - j.get(m, b).value() * j.get(k, a).d(m)
                - j.get(k, m).value() * j.get(m, b).d(a)
                + j.get(k, m).value() * j.get(m, a).d(b);
        }
        s
    })
}

pub fn nijenhuis_bracket(j: &ComplexStructureField, point: &[f64]) -> Result<TensorValue> {
    Ok(nijenhuis_at(&j.jet_at(point)?, point))
}

/// `N_J(X,Y) = −J{(∇_{JY}J)JX − (∇_{JX}J)JY} + J{(∇_Y J)X − (∇_X J)Y}` on coordinate
/// fields. Agrees with [`nijenhuis_at`] for every torsion-free `∇`.
pub fn nijenhuis_via_connection_at(gamma: &ConnectionJet, j: &MatrixJet, point: &[f64]) -> TensorValue {
    let d = gamma.dim();
    let nj = covariant_derivative_11_at(gamma, j, point);
    let jv = j.value();
    // (∇_{JY}J)JX with X = ∂_a, Y = ∂_b
    let twisted = |a: usize, b: usize, r: usize| -> f64 {
        let mut s = 0.0;
        for p in 0..d {
            for q in 0..d {
                s += jv[(p, b)] * nj.get(&[p, r, q]) * jv[(q, a)];
            }
        }
        s
    };
    TensorValue::from_fn(1, 2, d, point, |x| {
        let (k, a, b) = (x[0], x[1], x[2]);
        let mut s = 0.0;
        for r in 0..d {
            let first = twisted(a, b, r) - twisted(b, a, r);
            let second = nj.get(&[b, r, a]) - nj.get(&[a, r, b]);
            s += jv[(k, r)] * (second - first);
        }
        s
    })
}

/// Connection form of `N_J`; the connection must be torsion-free at `point`.
pub fn nijenhuis_via_connection(connection: &ConnectionField, j: &ComplexStructureField, point: &[f64]) -> Result<TensorValue> {
    let gamma = connection.jet_at(point)?;
    let torsion = torsion_at(&gamma, point).max_abs();
    if torsion > TORSION_THRESHOLD {
        return Err(Error::Torsionful {
            point: point.to_vec(),
            residual: torsion,
        });
    }
    Ok(nijenhuis_via_connection_at(&gamma, &j.jet_at(point)?, point))
}

/// `F_{xyz} = (∇_z ρ)_{xy}`.
pub fn cubic_form_at(gamma: &ConnectionJet, rho: &MatrixJet, point: &[f64]) -> TensorValue {
    let nr = covariant_derivative_02_at(gamma, rho, point);
    TensorValue::from_fn(0, 3, gamma.dim(), point, |x| nr.get(&[x[2], x[0], x[1]]))
}

pub fn cubic_form(connection: &ConnectionField, rho: &MetricField, point: &[f64]) -> Result<TensorValue> {
    Ok(cubic_form_at(&connection.jet_at(point)?, &rho.jet_at(point)?, point))
}

/// Both sides of `(Φ_J G)(X,Y,Z) = (Φ_J g)(X,JY,Z) + g(N_J(X,Y),Z)` in `(k, i, j)` order.
pub fn gc4_sides(ctx: &PointContext) -> (Vec<f64>, Vec<f64>) {
    let p = &ctx.point;
    let d = ctx.dim();
    let phi_g = tachibana_at(&ctx.g, &ctx.j, p);
    let phi_twin = tachibana_at(&ctx.twin, &ctx.j, p);
    let n = nijenhuis_at(&ctx.j, p);
    let (g, j) = (ctx.g_value(), ctx.j_value());
    let rhs = TensorValue::from_fn(0, 3, d, p, |x| {
        let (k, i, jj) = (x[0], x[1], x[2]);
        let mut s = 0.0;
        for m in 0..d {
            s += j[(m, i)] * phi_g.get(&[k, m, jj]) + n.get(&[m, k, i]) * g[(m, jj)];
        }
        s
    });
    (phi_twin.data, rhs.data)
}

pub fn verify_gc4(structure: &Structure, samples: &SampleSet, tol: f64) -> Result<CheckReport> {
    let mut r = Residual::new();
    let mut nmax = Residual::new();
    for p in samples.iter() {
        let ctx = structure.context_at(p)?;
        let (lhs, rhs) = gc4_sides(&ctx);
        r.compare(&lhs, &rhs);
        nmax.zero(&nijenhuis_at(&ctx.j, p).data);
    }
    let mut report = CheckReport::from_residuals(
        "gc4",
        tol,
        samples,
        vec![("(Phi G)(X,Y,Z) - (Phi g)(X,JY,Z) - g(N(X,Y),Z)".into(), r.value())],
    );
    // informational: size of the Nijenhuis correction term
    report.breakdown.push(crate::report::Breakdown {
        name: "max |N_J| (not a residual)".into(),
        residual: nmax.value(),
    });
    Ok(report)
}

/// `F = −F*` and `F(X,Y,Z) = ρ(X, (∇* − ∇)_Z Y)` for `ρ = g` and `ρ = G`.
pub fn verify_cubic_duality(
    structure: &Structure,
    connection: &ConnectionField,
    samples: &SampleSet,
    tol: f64,
) -> Result<CheckReport> {
    let mut res = [Residual::new(); 4];
    for p in samples.iter() {
        let ctx = structure.context_at(p)?;
        let gamma = connection.jet_at(p)?;
        let d = ctx.dim();
        for (n, (rho, rho_inv)) in [(&ctx.g, &ctx.g_inv), (&ctx.twin, &ctx.twin_inv)].into_iter().enumerate() {
            let conj = crate::connections::metric_conjugate_jet(&gamma, rho, rho_inv);
            let f = cubic_form_at(&gamma, rho, p);
            let fs = cubic_form_at(&conj, rho, p);
            let neg: Vec<f64> = fs.data.iter().map(|v| -v).collect();
            res[2 * n].compare(&f.data, &neg);
            let diff = TensorValue::from_fn(0, 3, d, p, |x| {
                let (a, y, z) = (x[0], x[1], x[2]);
                (0..d)
                    .map(|b| rho.get(a, b).value() * (conj.value(b, z, y) - gamma.value(b, z, y)))
                    .sum()
            });
            res[2 * n + 1].compare(&f.data, &diff.data);
        }
    }
    Ok(CheckReport::from_residuals(
        "cubic_duality",
        tol,
        samples,
        vec![
            ("F = -F* (g)".into(), res[0].value()),
            ("F(X,Y,Z) = g(X,(nabla* - nabla)_Z Y)".into(), res[1].value()),
            ("F = -F+ (G)".into(), res[2].value()),
            ("F(X,Y,Z) = G(X,(nabla+ - nabla)_Z Y)".into(), res[3].value()),
        ],
    ))
}
