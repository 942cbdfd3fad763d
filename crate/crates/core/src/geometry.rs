//! Charts, the metric and complex-structure fields, the twin metric and the
//! algebraic almost anti-Hermitian axioms.
//!
//! Index conventions: `J^i_j` is stored at row `i`, column `j`, so that
//! `(JX)^i = J^i_j X^j`. The twin metric is `G_ij = g(J∂_i, ∂_j) = J^m_i g_mj`.

use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{default_coordinate_names, ExprNode};
use crate::jets::{matrix_inverse_jet, scaled_determinant, MatrixJet, ScalarField, MAX_DIM, SINGULAR_THRESHOLD};
use crate::report::{CheckReport, Residual};
use crate::sampling::{SampleSet, SplitMix64};

/// Resampling budget per point.
pub const MAX_SAMPLE_ATTEMPTS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    dim: usize,
    names: Vec<String>,
    bounds: Vec<(f64, f64)>,
}

impl Chart {
    pub fn new(dim: usize, names: Option<Vec<String>>, bounds: Vec<(f64, f64)>) -> Result<Chart> {
        if dim < 2 || !dim.is_multiple_of(2) {
            return Err(Error::InvalidChart(format!("dimension {dim} must be even and at least 2")));
        }
        if dim > MAX_DIM {
            return Err(Error::InvalidChart(format!("dimension {dim} exceeds the supported maximum {MAX_DIM}")));
        }
        let names = names.unwrap_or_else(|| default_coordinate_names(dim));
        if names.len() != dim {
            return Err(Error::InvalidChart(format!("{} coordinate names for dimension {dim}", names.len())));
        }
        if bounds.len() != dim {
            return Err(Error::InvalidChart(format!("{} box intervals for dimension {dim}", bounds.len())));
        }
        if let Some((lo, hi)) = bounds.iter().find(|(lo, hi)| !lo.is_finite() || !hi.is_finite() || lo > hi) {
            return Err(Error::InvalidChart(format!("empty or non-finite interval [{lo}, {hi}]")));
        }
        Ok(Chart { dim, names, bounds })
    }

    /// Chart with default names and the same interval on every axis.
    pub fn cube(dim: usize, lo: f64, hi: f64) -> Result<Chart> {
        Chart::new(dim, None, vec![(lo, hi); dim])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn contains(&self, point: &[f64]) -> bool {
        point.len() == self.dim && point.iter().zip(&self.bounds).all(|(x, (lo, hi))| lo <= x && x <= hi)
    }

    /// Draws `n` points uniformly from the box, resampling any point that
    /// `accept` rejects (at most [`MAX_SAMPLE_ATTEMPTS`] tries per point).
    pub fn sample(&self, n: usize, seed: u64, accept: impl Fn(&[f64]) -> bool) -> Result<SampleSet> {
        let mut rng = SplitMix64::new(seed);
        let mut points = Vec::with_capacity(n);
        for _ in 0..n {
            let mut found = None;
            for _ in 0..MAX_SAMPLE_ATTEMPTS {
                let p: Vec<f64> = self.bounds.iter().map(|&(lo, hi)| rng.uniform(lo, hi)).collect();
                if accept(&p) {
                    found = Some(p);
                    break;
                }
            }
            points.push(found.ok_or(Error::SamplingExhausted {
                attempts: MAX_SAMPLE_ATTEMPTS,
            })?);
        }
        Ok(SampleSet::new(seed, points))
    }
}

/// A `d × d` array of scalar component functions.
#[derive(Debug, Clone)]
pub struct MatrixField {
    dim: usize,
    entries: Arc<Vec<ScalarField>>,
}

impl MatrixField {
    pub fn new(dim: usize, components: Vec<Vec<ExprNode>>) -> Result<MatrixField> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::InvalidInput(format!("unsupported dimension {dim}")));
        }
        if components.len() != dim || components.iter().any(|row| row.len() != dim) {
            return Err(Error::InvalidInput(format!("expected a {dim}x{dim} array of components")));
        }
        let mut entries = Vec::with_capacity(dim * dim);
        for row in components {
            for e in row {
                if let Some(c) = e.max_coord().filter(|&c| c >= dim) {
                    return Err(Error::InvalidInput(format!("coordinate index {c} out of range for dimension {dim}")));
                }
                entries.push(ScalarField::new(e, dim));
            }
        }
        Ok(MatrixField {
            dim,
            entries: Arc::new(entries),
        })
    }

    pub fn constant(m: &DMatrix<f64>) -> Result<MatrixField> {
        let d = m.nrows();
        MatrixField::new(
            d,
            (0..d).map(|i| (0..d).map(|j| ExprNode::Constant(m[(i, j)])).collect()).collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn expr(&self, i: usize, j: usize) -> &ExprNode {
        self.entries[i * self.dim + j].expr()
    }

    pub fn exprs(&self) -> Vec<Vec<ExprNode>> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.expr(i, j).clone()).collect())
            .collect()
    }

    pub fn jet_at(&self, point: &[f64]) -> Result<MatrixJet> {
        let mut out = Vec::with_capacity(self.entries.len());
        for e in self.entries.iter() {
            out.push(e.jet2(point)?);
        }
        Ok(MatrixJet::from_entries(self.dim, self.dim, out))
    }

    pub fn value_at(&self, point: &[f64]) -> Result<DMatrix<f64>> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                m[(i, j)] = self.entries[i * self.dim + j].value(point)?;
            }
        }
        Ok(m)
    }

    /// True when every component is free of coordinates.
    pub fn is_constant(&self) -> bool {
        self.entries.iter().all(|e| e.expr().is_constant())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricRole {
    PrimaryMetric,
    TwinMetric,
    Generic,
}

/// Symmetric `(0,2)` field: `g`, its twin `G`, or a generic `ρ`.
#[derive(Debug, Clone)]
pub struct MetricField {
    role: MetricRole,
    field: MatrixField,
}

impl MetricField {
    pub fn new(components: Vec<Vec<ExprNode>>, role: MetricRole) -> Result<MetricField> {
        let dim = components.len();
        Ok(MetricField {
            role,
            field: MatrixField::new(dim, components)?,
        })
    }

    pub fn from_field(field: MatrixField, role: MetricRole) -> MetricField {
        MetricField { role, field }
    }

    pub fn with_role(&self, role: MetricRole) -> MetricField {
        MetricField {
            role,
            field: self.field.clone(),
        }
    }

    pub fn role(&self) -> MetricRole {
        self.role
    }

    pub fn dim(&self) -> usize {
        self.field.dim()
    }

    pub fn field(&self) -> &MatrixField {
        &self.field
    }

    pub fn expr(&self, i: usize, j: usize) -> &ExprNode {
        self.field.expr(i, j)
    }

    pub fn jet_at(&self, point: &[f64]) -> Result<MatrixJet> {
        self.field.jet_at(point)
    }

    pub fn value_at(&self, point: &[f64]) -> Result<DMatrix<f64>> {
        self.field.value_at(point)
    }

    /// Metric jet together with the jet of its inverse.
    pub fn jet_and_inverse_at(&self, point: &[f64]) -> Result<(MatrixJet, MatrixJet)> {
        let jet = self.jet_at(point)?;
        let inv = matrix_inverse_jet(&jet).map_err(|e| Error::from_jet(e, point))?;
        Ok((jet, inv))
    }

    /// Largest `|ρ_ij − ρ_ji|` over the samples.
    pub fn max_asymmetry(&self, samples: &SampleSet) -> Result<f64> {
        let mut r = Residual::new();
        for p in samples.iter() {
            let m = self.value_at(p)?;
            r.zero((&m - m.transpose()).as_slice());
        }
        Ok(r.value())
    }

    pub fn is_nondegenerate_at(&self, point: &[f64]) -> bool {
        self.value_at(point)
            .map(|m| scaled_determinant(&m).abs() > SINGULAR_THRESHOLD)
            .unwrap_or(false)
    }
}

/// `(1,1)` field `J` with `J² = −id`.
#[derive(Debug, Clone)]
pub struct ComplexStructureField {
    field: MatrixField,
}

impl ComplexStructureField {
    pub fn new(components: Vec<Vec<ExprNode>>) -> Result<ComplexStructureField> {
        let dim = components.len();
        Ok(ComplexStructureField {
            field: MatrixField::new(dim, components)?,
        })
    }

    /// `n` diagonal rotation blocks: `J∂_{2a+1} = ∂_{2a+2}`, `J∂_{2a+2} = −∂_{2a+1}`.
    pub fn standard(n: usize) -> Result<ComplexStructureField> {
        let d = 2 * n;
        let mut m = DMatrix::zeros(d, d);
        for a in 0..n {
            m[(2 * a + 1, 2 * a)] = 1.0;
            m[(2 * a, 2 * a + 1)] = -1.0;
        }
        Ok(ComplexStructureField {
            field: MatrixField::constant(&m)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.field.dim()
    }

    pub fn field(&self) -> &MatrixField {
        &self.field
    }

    pub fn expr(&self, i: usize, j: usize) -> &ExprNode {
        self.field.expr(i, j)
    }

    pub fn jet_at(&self, point: &[f64]) -> Result<MatrixJet> {
        self.field.jet_at(point)
    }

    pub fn value_at(&self, point: &[f64]) -> Result<DMatrix<f64>> {
        self.field.value_at(point)
    }

    pub fn is_constant(&self) -> bool {
        self.field.is_constant()
    }
}

/// Builds `G_ij = J^m_i g_mj` as expressions, without checking purity.
pub fn twin_metric_unchecked(g: &MetricField, j: &ComplexStructureField) -> Result<MetricField> {
    let d = g.dim();
    if j.dim() != d {
        return Err(Error::InvalidInput(format!("metric has dimension {d}, complex structure {}", j.dim())));
    }
    let comps = (0..d)
        .map(|a| {
            (0..d)
                .map(|b| {
                    ExprNode::sum(
                        (0..d)
                            .map(|m| ExprNode::product(vec![j.expr(m, a).clone(), g.expr(m, b).clone()]))
                            .collect(),
                    )
                })
                .collect()
        })
        .collect();
    MetricField::new(comps, MetricRole::TwinMetric)
}

/// The twin metric `G = g∘J`; purity of `g` is checked at `samples` first.
pub fn twin_metric(g: &MetricField, j: &ComplexStructureField, samples: &SampleSet, tol: f64) -> Result<MetricField> {
    let purity = check_purity(g, j, samples, tol)?;
    if !purity.passed() {
        return Err(Error::InvalidInput(format!(
            "metric is not pure with respect to J (residual {:e})",
            purity.max_residual
        )));
    }
    twin_metric_unchecked(g, j)
}

/// Residual of `g(JX, Y) = g(X, JY)`: `|J^m_i g_mj − J^m_j g_im|`.
pub fn check_purity(g: &MetricField, j: &ComplexStructureField, samples: &SampleSet, tol: f64) -> Result<CheckReport> {
    let mut r = Residual::new();
    for p in samples.iter() {
        let gm = g.value_at(p)?;
        let jm = j.value_at(p)?;
        let lhs = jm.transpose() * &gm;
        let rhs = &gm * &jm;
        r.compare(lhs.as_slice(), rhs.as_slice());
    }
    Ok(CheckReport::from_residuals(
        "purity",
        tol,
        samples,
        vec![("g(JX,Y) - g(X,JY)".into(), r.value())],
    ))
}

/// Residual of `J² + id`.
pub fn check_almost_complex(j: &ComplexStructureField, samples: &SampleSet, tol: f64) -> Result<CheckReport> {
    let mut r = Residual::new();
    for p in samples.iter() {
        let jm = j.value_at(p)?;
        let sq = &jm * &jm + DMatrix::identity(j.dim(), j.dim());
        r.zero(sq.as_slice());
    }
    Ok(CheckReport::from_residuals("almost_complex", tol, samples, vec![("J^2 + id".into(), r.value())]))
}

/// `(positive, negative)` eigenvalue counts of a symmetric matrix.
pub fn signature(m: &DMatrix<f64>) -> Result<(usize, usize)> {
    let scale = m.iter().fold(1.0f64, |s, x| s.max(x.abs()));
    if (m - m.transpose()).iter().any(|x| x.abs() > 1e-12 * scale) {
        return Err(Error::InvalidInput("signature of a non-symmetric matrix".into()));
    }
    let eig = SymmetricEigen::new(m.clone());
    let tiny = 1e-12 * scale;
    let pos = eig.eigenvalues.iter().filter(|&&l| l > tiny).count();
    let neg = eig.eigenvalues.iter().filter(|&&l| l < -tiny).count();
    Ok((pos, neg))
}

pub fn signature_at(g: &MetricField, point: &[f64]) -> Result<(usize, usize)> {
    signature(&g.value_at(point)?)
}

/// An almost anti-Hermitian manifold `(M, J, g, G)` on a single chart.
#[derive(Debug, Clone)]
pub struct Structure {
    name: String,
    chart: Chart,
    g: MetricField,
    j: ComplexStructureField,
    twin: MetricField,
}

impl Structure {
    pub fn new(name: &str, chart: Chart, g: MetricField, j: ComplexStructureField) -> Result<Structure> {
        if g.dim() != chart.dim() || j.dim() != chart.dim() {
            return Err(Error::InvalidInput(format!(
                "chart dimension {} but metric {} and complex structure {}",
                chart.dim(),
                g.dim(),
                j.dim()
            )));
        }
        let g = g.with_role(MetricRole::PrimaryMetric);
        let twin = twin_metric_unchecked(&g, &j)?;
        Ok(Structure {
            name: name.to_string(),
            chart,
            g,
            j,
            twin,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn g(&self) -> &MetricField {
        &self.g
    }

    pub fn j(&self) -> &ComplexStructureField {
        &self.j
    }

    pub fn twin(&self) -> &MetricField {
        &self.twin
    }

    /// Samples points where `g` and `G` are nondegenerate and all fields evaluate.
    pub fn sample(&self, n: usize, seed: u64) -> Result<SampleSet> {
        self.chart.sample(n, seed, |p| self.context_at(p).is_ok())
    }

    pub fn context_at(&self, point: &[f64]) -> Result<PointContext> {
        let (g, g_inv) = self.g.jet_and_inverse_at(point)?;
        let (twin, twin_inv) = self.twin.jet_and_inverse_at(point)?;
        let j = self.j.jet_at(point)?;
        Ok(PointContext {
            point: point.to_vec(),
            g,
            g_inv,
            twin,
            twin_inv,
            j,
        })
    }

    /// Purity, `J² = −id`, symmetry of `g`, and neutral signature at the samples.
    pub fn validate(&self, samples: &SampleSet, tol: f64) -> Result<Vec<CheckReport>> {
        let mut out = vec![check_purity(&self.g, &self.j, samples, tol)?, check_almost_complex(&self.j, samples, tol)?];
        let asym = self.g.max_asymmetry(samples)?;
        out.push(CheckReport::from_residuals(
            "metric_symmetry",
            tol,
            samples,
            vec![("g_ij - g_ji".into(), asym)],
        ));
        let n = self.dim() / 2;
        let mut bad = 0usize;
        for p in samples.iter() {
            match signature_at(&self.g, p) {
                Ok(s) if s == (n, n) => {}
                _ => bad += 1,
            }
        }
        out.push(CheckReport::from_residuals(
            "neutral_signature",
            tol,
            samples,
            vec![("points without signature (n,n)".into(), bad as f64)],
        ));
        Ok(out)
    }
}

/// Jets of `g`, `g⁻¹`, `G`, `G⁻¹` and `J` at one point.
#[derive(Debug, Clone)]
pub struct PointContext {
    pub point: Vec<f64>,
    pub g: MatrixJet,
    pub g_inv: MatrixJet,
    pub twin: MatrixJet,
    pub twin_inv: MatrixJet,
    pub j: MatrixJet,
}

impl PointContext {
    pub fn dim(&self) -> usize {
        self.g.rows()
    }

    pub fn g_value(&self) -> DMatrix<f64> {
        self.g.value()
    }

    pub fn twin_value(&self) -> DMatrix<f64> {
        self.twin.value()
    }

    pub fn j_value(&self) -> DMatrix<f64> {
        self.j.value()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;

    fn field(rows: &[&[&str]]) -> Vec<Vec<ExprNode>> {
        let names = default_coordinate_names(rows.len());
        rows.iter()
            .map(|r| r.iter().map(|s| parse_expr(s, &names).unwrap()).collect())
            .collect()
    }

    fn rotation() -> ComplexStructureField {
        ComplexStructureField::standard(1).unwrap()
    }

    #[test]
    fn chart_validation() {
        assert!(Chart::cube(3, -1.0, 1.0).is_err());
        assert!(Chart::cube(0, -1.0, 1.0).is_err());
        assert!(Chart::cube(8, -1.0, 1.0).is_err());
        assert!(Chart::new(2, None, vec![(1.0, 0.0), (0.0, 1.0)]).is_err());
        assert!(Chart::new(2, Some(vec!["u".into()]), vec![(0.0, 1.0); 2]).is_err());
        let c = Chart::cube(4, -0.5, 0.5).unwrap();
        let s = c.sample(30, 9, |_| true).unwrap();
        assert!(s.iter().all(|p| c.contains(p)));
        assert_eq!(s, c.sample(30, 9, |_| true).unwrap());
        assert!(c.sample(1, 9, |_| false).is_err());
    }

    #[test]
    fn rotation_is_almost_complex() {
        let j = rotation();
        assert_eq!(j.value_at(&[0.0, 0.0]).unwrap(), DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]));
        let s = SampleSet::single(vec![0.1, 0.2]);
        let r = check_almost_complex(&j, &s, 1e-10).unwrap();
        assert_eq!(r.max_residual, 0.0);
    }

    #[test]
    fn flat_twin_metric() {
        let g = MetricField::new(field(&[&["1", "0"], &["0", "-1"]]), MetricRole::PrimaryMetric).unwrap();
        let s = SampleSet::single(vec![0.3, -0.1]);
        let twin = twin_metric(&g, &rotation(), &s, 1e-8).unwrap();
        assert_eq!(twin.role(), MetricRole::TwinMetric);
        // Jᵀ g by hand: [[0,1],[-1,0]] · diag(1,-1) = [[0,-1],[-1,0]]
        assert_eq!(twin.value_at(&[0.3, -0.1]).unwrap(), DMatrix::from_row_slice(2, 2, &[0.0, -1.0, -1.0, 0.0]));
        assert_eq!(check_purity(&g, &rotation(), &s, 1e-8).unwrap().max_residual, 0.0);
    }

    #[test]
    fn pure_pair_twin_by_hand() {
        let u = "(x1^2 - x2^2 + 2)";
        let v = "(2*x1*x2)";
        let g = MetricField::new(
            field(&[&[u, v], &[v, &format!("-{u}")]]),
            MetricRole::PrimaryMetric,
        )
        .unwrap();
        let pt = [0.3, 0.2];
        let twin = twin_metric(&g, &rotation(), &SampleSet::single(pt.to_vec()), 1e-8).unwrap();
        let (uv, vv) = (0.09 - 0.04 + 2.0, 2.0 * 0.3 * 0.2);
        let expected = DMatrix::from_row_slice(2, 2, &[vv, -uv, -uv, -vv]);
        assert!((twin.value_at(&pt).unwrap() - expected).abs().max() < 1e-15);
    }

    #[test]
    fn twin_of_twin_is_minus_g() {
        let g = MetricField::new(
            field(&[&["1 + x1^2", "x2"], &["x2", "-1 - x1^2"]]),
            MetricRole::PrimaryMetric,
        )
        .unwrap();
        let j = rotation();
        let twin = twin_metric_unchecked(&g, &j).unwrap();
        let twin2 = twin_metric_unchecked(&twin, &j).unwrap();
        let pt = [0.7, -0.4];
        assert!((twin2.value_at(&pt).unwrap() + g.value_at(&pt).unwrap()).abs().max() < 1e-15);
    }

    #[test]
    fn identity_metric_is_not_pure() {
        let g = MetricField::new(field(&[&["1", "0"], &["0", "1"]]), MetricRole::Generic).unwrap();
        let s = SampleSet::single(vec![0.5, 0.5]);
        let r = check_purity(&g, &rotation(), &s, 1e-8).unwrap();
        assert!(!r.passed());
        assert_eq!(r.max_residual, 2.0);
        assert!(twin_metric(&g, &rotation(), &s, 1e-8).is_err());
    }

    #[test]
    fn symmetrized_metrics_are_pure() {
        // g(X,Y) = g0(X,Y) - g0(JX,JY) is pure for any g0
        let g0 = DMatrix::from_row_slice(4, 4, &[
            1.0, 0.2, -0.3, 0.5, 0.2, 2.0, 0.1, 0.0, -0.3, 0.1, -1.5, 0.4, 0.5, 0.0, 0.4, 0.7,
        ]);
        let j = ComplexStructureField::standard(2).unwrap();
        let jm = j.value_at(&[0.0; 4]).unwrap();
        let g = &g0 - jm.transpose() * &g0 * &jm;
        let gf = MetricField::from_field(MatrixField::constant(&g).unwrap(), MetricRole::Generic);
        let r = check_purity(&gf, &j, &SampleSet::single(vec![0.0; 4]), 1e-12).unwrap();
        assert!(r.max_residual < 1e-15, "{}", r.max_residual);
    }

    #[test]
    fn signatures() {
        assert_eq!(signature(&DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0])).unwrap(), (1, 1));
        assert!(signature(&DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, -1.0])).is_err());
        // [[u,v],[v,-u]] at (0.5,0.5): u = 2, v = 0.5, eigenvalues ±sqrt(u²+v²)
        let g = MetricField::new(
            field(&[&["x1^2 - x2^2 + 2", "2*x1*x2"], &["2*x1*x2", "-(x1^2 - x2^2 + 2)"]]),
            MetricRole::PrimaryMetric,
        )
        .unwrap();
        assert_eq!(signature_at(&g, &[0.5, 0.5]).unwrap(), (1, 1));
    }

    #[test]
    fn field_shape_errors() {
        let one = ExprNode::Constant(1.0);
        let bad = vec![vec![one.clone(), one.clone()], vec![one, ExprNode::Coord(2)]];
        assert!(MetricField::new(bad, MetricRole::Generic).is_err());
        assert!(MatrixField::new(2, vec![vec![ExprNode::Constant(1.0)]]).is_err());
    }
}
