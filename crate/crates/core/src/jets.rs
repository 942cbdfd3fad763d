//! First- and second-order jets: value, gradient and (for [`Jet2`]) Hessian
//! of a scalar quantity at a point.
//!
//! Jets are fixed-capacity `Copy` values sized for charts up to
//! [`MAX_DIM`] coordinates.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use thiserror::Error;

use crate::expr::{EvalError, ExprNode};

/// Largest supported chart dimension.
pub const MAX_DIM: usize = 6;

/// Scaled-determinant threshold below which a matrix counts as singular.
pub const SINGULAR_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    #[error("near-singular matrix: scaled determinant {scaled_det:e}")]
    Singular { scaled_det: f64 },
    #[error("matrix jet is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Value and gradient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet1 {
    dim: usize,
    value: f64,
    grad: [f64; MAX_DIM],
}

impl Jet1 {
    pub fn constant(dim: usize, value: f64) -> Jet1 {
        assert!(dim <= MAX_DIM, "dimension {dim} exceeds MAX_DIM");
        Jet1 {
            dim,
            value,
            grad: [0.0; MAX_DIM],
        }
    }

    pub fn new(value: f64, grad: &[f64]) -> Jet1 {
        let mut j = Jet1::constant(grad.len(), value);
        j.grad[..grad.len()].copy_from_slice(grad);
        j
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn grad(&self) -> &[f64] {
        &self.grad[..self.dim]
    }

    /// Partial derivative along coordinate `k`.
    pub fn d(&self, k: usize) -> f64 {
        self.grad[k]
    }

    pub fn scale(self, s: f64) -> Jet1 {
        let mut out = self;
        out.value *= s;
        for g in &mut out.grad[..self.dim] {
            *g *= s;
        }
        out
    }

    /// `self += a * b`, the inner step of every contraction.
    pub fn add_product(&mut self, a: &Jet1, b: &Jet1) {
        debug_assert_eq!(a.dim, b.dim);
        self.value += a.value * b.value;
        for k in 0..self.dim {
            self.grad[k] += a.value * b.grad[k] + b.value * a.grad[k];
        }
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite() && self.grad().iter().all(|g| g.is_finite())
    }
}

impl Add for Jet1 {
    type Output = Jet1;
    fn add(self, rhs: Jet1) -> Jet1 {
        let mut out = self;
        out.value += rhs.value;
        for k in 0..self.dim {
            out.grad[k] += rhs.grad[k];
        }
        out
    }
}

impl Sub for Jet1 {
    type Output = Jet1;
    fn sub(self, rhs: Jet1) -> Jet1 {
        self + (-rhs)
    }
}

impl Neg for Jet1 {
    type Output = Jet1;
    fn neg(self) -> Jet1 {
        self.scale(-1.0)
    }
}

impl Mul for Jet1 {
    type Output = Jet1;
    fn mul(self, rhs: Jet1) -> Jet1 {
        let mut out = Jet1::constant(self.dim, 0.0);
        out.add_product(&self, &rhs);
        out
    }
}

/// Value, gradient and symmetric Hessian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet2 {
    dim: usize,
    value: f64,
    grad: [f64; MAX_DIM],
    hess: [[f64; MAX_DIM]; MAX_DIM],
}

impl Jet2 {
    pub fn constant(dim: usize, value: f64) -> Jet2 {
        assert!(dim <= MAX_DIM, "dimension {dim} exceeds MAX_DIM");
        Jet2 {
            dim,
            value,
            grad: [0.0; MAX_DIM],
            hess: [[0.0; MAX_DIM]; MAX_DIM],
        }
    }

    /// The coordinate function `x_i` evaluated at `x_i = value`.
    pub fn variable(dim: usize, i: usize, value: f64) -> Jet2 {
        let mut j = Jet2::constant(dim, value);
        j.grad[i] = 1.0;
        j
    }

    /// Builds a jet from a row-major `dim × dim` Hessian, symmetrising it.
    pub fn new(value: f64, grad: &[f64], hess: &[f64]) -> Jet2 {
        let d = grad.len();
        assert_eq!(hess.len(), d * d, "hessian must be dim x dim");
        let mut j = Jet2::constant(d, value);
        j.grad[..d].copy_from_slice(grad);
        for a in 0..d {
            for b in 0..d {
                j.hess[a][b] = 0.5 * (hess[a * d + b] + hess[b * d + a]);
            }
        }
        j
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn grad(&self) -> &[f64] {
        &self.grad[..self.dim]
    }

    pub fn d(&self, k: usize) -> f64 {
        self.grad[k]
    }

    pub fn hess(&self, a: usize, b: usize) -> f64 {
        self.hess[a][b]
    }

    /// The first-order jet of `∂_k` of this quantity.
    pub fn partial(&self, k: usize) -> Jet1 {
        let mut j = Jet1::constant(self.dim, self.grad[k]);
        j.grad[..self.dim].copy_from_slice(&self.hess[k][..self.dim]);
        j
    }

    /// Drops the second-order part.
    pub fn first_order(&self) -> Jet1 {
        Jet1::new(self.value, self.grad())
    }

    pub fn scale(self, s: f64) -> Jet2 {
        let mut out = self;
        out.value *= s;
        for a in 0..self.dim {
            out.grad[a] *= s;
            for b in 0..self.dim {
                out.hess[a][b] *= s;
            }
        }
        out
    }

    /// `self += a * b` with the second-order Leibniz rule.
    pub fn add_product(&mut self, a: &Jet2, b: &Jet2) {
        let d = self.dim;
        self.value += a.value * b.value;
        for p in 0..d {
            self.grad[p] += a.value * b.grad[p] + b.value * a.grad[p];
            for q in 0..d {
                self.hess[p][q] += a.value * b.hess[p][q]
                    + b.value * a.hess[p][q]
                    + a.grad[p] * b.grad[q]
                    + b.grad[p] * a.grad[q];
            }
        }
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut m: f64 = 0.0;
        for a in 0..self.dim {
            for b in 0..self.dim {
                m = m.max((self.hess[a][b] - self.hess[b][a]).abs());
            }
        }
        m
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
            && (0..self.dim).all(|a| self.grad[a].is_finite() && (0..self.dim).all(|b| self.hess[a][b].is_finite()))
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(self, rhs: Jet2) -> Jet2 {
        let mut out = self;
        out.value += rhs.value;
        for a in 0..self.dim {
            out.grad[a] += rhs.grad[a];
            for b in 0..self.dim {
                out.hess[a][b] += rhs.hess[a][b];
            }
        }
        out
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, rhs: Jet2) -> Jet2 {
        self + (-rhs)
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self.scale(-1.0)
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: Jet2) -> Jet2 {
        let mut out = Jet2::constant(self.dim, 0.0);
        out.add_product(&self, &rhs);
        out
    }
}

pub fn jet_add(a: Jet2, b: Jet2) -> Jet2 {
    a + b
}

pub fn jet_mul(a: Jet2, b: Jet2) -> Jet2 {
    a * b
}

pub fn jet_scale(a: Jet2, s: f64) -> Jet2 {
    a.scale(s)
}

/// An expression together with its symbolic first and second derivatives,
/// differentiated once and evaluated many times.
#[derive(Debug, Clone)]
pub struct ScalarField {
    dim: usize,
    expr: ExprNode,
    first: Vec<ExprNode>,
    /// Upper triangle `(a, b)` with `a <= b`, row-major.
    second: Vec<ExprNode>,
}

impl ScalarField {
    pub fn new(expr: ExprNode, dim: usize) -> ScalarField {
        assert!(dim <= MAX_DIM, "dimension {dim} exceeds MAX_DIM");
        let first: Vec<ExprNode> = (0..dim).map(|i| expr.differentiate(i)).collect();
        let mut second = Vec::with_capacity(dim * (dim + 1) / 2);
        for (a, da) in first.iter().enumerate() {
            for b in a..dim {
                second.push(da.differentiate(b));
            }
        }
        ScalarField {
            dim,
            expr,
            first,
            second,
        }
    }

    pub fn expr(&self) -> &ExprNode {
        &self.expr
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn derivative(&self, i: usize) -> &ExprNode {
        &self.first[i]
    }

    pub fn value(&self, point: &[f64]) -> Result<f64, EvalError> {
        self.expr.eval(point)
    }

    pub fn jet1(&self, point: &[f64]) -> Result<Jet1, EvalError> {
        let mut j = Jet1::constant(self.dim, self.expr.eval(point)?);
        for (k, f) in self.first.iter().enumerate() {
            j.grad[k] = f.eval(point)?;
        }
        Ok(j)
    }

    pub fn jet2(&self, point: &[f64]) -> Result<Jet2, EvalError> {
        let mut j = Jet2::constant(self.dim, self.expr.eval(point)?);
        for (k, f) in self.first.iter().enumerate() {
            j.grad[k] = f.eval(point)?;
        }
        let mut idx = 0;
        for a in 0..self.dim {
            for b in a..self.dim {
                let v = self.second[idx].eval(point)?;
                j.hess[a][b] = v;
                j.hess[b][a] = v;
                idx += 1;
            }
        }
        Ok(j)
    }
}

/// Second-order jet of an expression at a point, from exact symbolic derivatives.
pub fn jet_of_expr(e: &ExprNode, point: &[f64]) -> Result<Jet2, EvalError> {
    ScalarField::new(e.clone(), point.len()).jet2(point)
}

/// A rectangular array of [`Jet2`] entries, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixJet {
    rows: usize,
    cols: usize,
    dim: usize,
    entries: Vec<Jet2>,
}

impl MatrixJet {
    pub fn from_entries(rows: usize, cols: usize, entries: Vec<Jet2>) -> MatrixJet {
        assert_eq!(entries.len(), rows * cols, "entry count must be rows * cols");
        let dim = entries.first().map_or(0, Jet2::dim);
        assert!(entries.iter().all(|e| e.dim() == dim), "mixed jet dimensions");
        MatrixJet {
            rows,
            cols,
            dim,
            entries,
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Jet2) -> MatrixJet {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        MatrixJet::from_entries(rows, cols, entries)
    }

    /// Constant matrix with zero derivatives.
    pub fn constant(m: &DMatrix<f64>, dim: usize) -> MatrixJet {
        MatrixJet::from_fn(m.nrows(), m.ncols(), |i, j| Jet2::constant(dim, m[(i, j)]))
    }

    pub fn identity(n: usize, dim: usize) -> MatrixJet {
        MatrixJet::constant(&DMatrix::identity(n, n), dim)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Number of coordinates the entries are differentiated against.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &Jet2 {
        &self.entries[i * self.cols + j]
    }

    pub fn entries(&self) -> &[Jet2] {
        &self.entries
    }

    pub fn value(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).value())
    }

    /// Matrix of `∂_k` of each entry.
    pub fn derivative(&self, k: usize) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).d(k))
    }

    /// Matrix of `∂_a ∂_b` of each entry.
    pub fn second_derivative(&self, a: usize, b: usize) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).hess(a, b))
    }

    /// Jet of the matrix product.
    pub fn matmul(&self, rhs: &MatrixJet) -> MatrixJet {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in matmul");
        MatrixJet::from_fn(self.rows, rhs.cols, |i, j| {
            let mut acc = Jet2::constant(self.dim, 0.0);
            for m in 0..self.cols {
                acc.add_product(self.get(i, m), rhs.get(m, j));
            }
            acc
        })
    }

    pub fn transpose(&self) -> MatrixJet {
        MatrixJet::from_fn(self.cols, self.rows, |i, j| *self.get(j, i))
    }

    fn from_parts(value: &DMatrix<f64>, first: &[DMatrix<f64>], second: &[Vec<DMatrix<f64>>]) -> MatrixJet {
        let dim = first.len();
        MatrixJet::from_fn(value.nrows(), value.ncols(), |i, j| {
            let grad: Vec<f64> = first.iter().map(|m| m[(i, j)]).collect();
            let mut hess = vec![0.0; dim * dim];
            for a in 0..dim {
                for b in 0..dim {
                    hess[a * dim + b] = second[a][b][(i, j)];
                }
            }
            if dim == 0 {
                Jet2::constant(0, value[(i, j)])
            } else {
                Jet2::new(value[(i, j)], &grad, &hess)
            }
        })
    }
}

/// Determinant divided by the product of row max-norms.
pub fn scaled_determinant(m: &DMatrix<f64>) -> f64 {
    let det = m.clone().lu().determinant();
    let mut scale = 1.0;
    for row in m.row_iter() {
        let norm = row.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
        if norm == 0.0 {
            return 0.0;
        }
        scale *= norm;
    }
    det / scale
}

/// Inverse of a square matrix jet.
///
/// The value is inverted numerically (LU with partial pivoting); derivatives
/// follow from differentiating `M M⁻¹ = I`:
/// `∂ₖM⁻¹ = −M⁻¹(∂ₖM)M⁻¹` and
/// `∂ₐ∂ᵦM⁻¹ = M⁻¹(∂ₐM)M⁻¹(∂ᵦM)M⁻¹ + M⁻¹(∂ᵦM)M⁻¹(∂ₐM)M⁻¹ − M⁻¹(∂ₐ∂ᵦM)M⁻¹`.
pub fn matrix_inverse_jet(m: &MatrixJet) -> Result<MatrixJet, JetError> {
    if m.rows != m.cols {
        return Err(JetError::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let value = m.value();
    let scaled_det = scaled_determinant(&value);
    // NaN counts as singular
    if scaled_det.is_nan() || scaled_det.abs() <= SINGULAR_THRESHOLD {
        return Err(JetError::Singular { scaled_det });
    }
    let inv = value.lu().try_inverse().ok_or(JetError::Singular { scaled_det })?;
    let d = m.dim;
    let dm: Vec<DMatrix<f64>> = (0..d).map(|k| m.derivative(k)).collect();
    // P_k = M⁻¹ ∂ₖM
    let p: Vec<DMatrix<f64>> = dm.iter().map(|x| &inv * x).collect();
    let first: Vec<DMatrix<f64>> = p.iter().map(|pk| -(pk * &inv)).collect();
    let mut second = vec![vec![DMatrix::zeros(m.rows, m.cols); d]; d];
    for a in 0..d {
        for b in a..d {
            let s = &p[a] * &p[b] * &inv + &p[b] * &p[a] * &inv - &inv * m.second_derivative(a, b) * &inv;
            second[b][a] = s.clone();
            second[a][b] = s;
        }
    }
    Ok(MatrixJet::from_parts(&inv, &first, &second))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{default_coordinate_names, parse_expr};
    use proptest::prelude::*;

    fn jet(s: &str, pt: &[f64]) -> Jet2 {
        jet_of_expr(&parse_expr(s, &default_coordinate_names(pt.len())).unwrap(), pt).unwrap()
    }

    #[test]
    fn quadratic_jet() {
        let j = jet("x1^2 - x2^2", &[1.0, 2.0]);
        assert_eq!(j.value(), -3.0);
        assert_eq!(j.grad(), &[2.0, -4.0]);
        assert_eq!([j.hess(0, 0), j.hess(0, 1), j.hess(1, 0), j.hess(1, 1)], [2.0, 0.0, 0.0, -2.0]);
    }

    #[test]
    fn constant_and_bilinear_jets() {
        let c = jet("1", &[0.3, 0.4]);
        assert_eq!((c.value(), c.grad()), (1.0, &[0.0, 0.0][..]));
        assert_eq!(c.hess(1, 0), 0.0);
        let b = jet("2*x1*x2", &[1.0, 1.0]);
        assert_eq!(b.value(), 2.0);
        assert_eq!(b.grad(), &[2.0, 2.0]);
        assert_eq!([b.hess(0, 0), b.hess(0, 1), b.hess(1, 1)], [0.0, 2.0, 0.0]);
    }

    #[test]
    fn leibniz_rule() {
        let a = Jet2::constant(2, 3.0);
        let b = Jet2::constant(2, -2.0);
        let ab = jet_mul(a, b);
        assert_eq!(ab, Jet2::constant(2, -6.0));
        let xy = jet_mul(Jet2::variable(2, 0, 1.0), Jet2::variable(2, 1, 1.0));
        assert_eq!(xy.value(), 1.0);
        assert_eq!(xy.grad(), &[1.0, 1.0]);
        assert_eq!([xy.hess(0, 0), xy.hess(0, 1), xy.hess(1, 0), xy.hess(1, 1)], [0.0, 1.0, 1.0, 0.0]);
    }

    #[test]
    fn partial_extracts_hessian_row() {
        let j = jet("x1^2*x2 + x2^3", &[0.5, 2.0]);
        let p = j.partial(1);
        assert_eq!(p.value(), 0.25 + 12.0);
        assert_eq!(p.grad(), &[1.0, 12.0]);
    }

    #[test]
    fn identity_and_involutive_diagonal_inverses() {
        let id = MatrixJet::identity(3, 3);
        assert_eq!(matrix_inverse_jet(&id).unwrap(), id);
        let d = MatrixJet::constant(&DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]), 2);
        assert_eq!(matrix_inverse_jet(&d).unwrap(), d);
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let m = MatrixJet::constant(&DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]), 2);
        assert!(matches!(matrix_inverse_jet(&m), Err(JetError::Singular { .. })));
        // scale invariance: a tiny but well-conditioned matrix is fine
        let m = MatrixJet::constant(&DMatrix::from_row_slice(2, 2, &[1e-9, 0.0, 0.0, 1e-9]), 2);
        assert!(matrix_inverse_jet(&m).is_ok());
    }

    #[test]
    fn inverse_matches_adjugate_oracle() {
        // M = [[u, v], [v, -u]], M⁻¹ = adj(M)/det(M) = [[u, v], [v, -u]] / (u² + v²)
        let names = default_coordinate_names(2);
        let u = "(x1^2 - x2^2 + 2)";
        let v = "(2*x1*x2)";
        let pt = [0.3, 0.2];
        let entries = [u.to_string(), v.to_string(), v.to_string(), format!("-{u}")];
        let m = MatrixJet::from_entries(2, 2, entries.iter().map(|s| jet(s, &pt)).collect());
        let inv = matrix_inverse_jet(&m).unwrap();
        let det = format!("({u}^2 + {v}^2)");
        let oracle = [
            format!("{u}/{det}"),
            format!("{v}/{det}"),
            format!("{v}/{det}"),
            format!("-{u}/{det}"),
        ];
        for (k, s) in oracle.iter().enumerate() {
            let o = jet_of_expr(&parse_expr(s, &names).unwrap(), &pt).unwrap();
            let got = inv.entries()[k];
            assert!((o.value() - got.value()).abs() <= 1e-10);
            for a in 0..2 {
                assert!((o.d(a) - got.d(a)).abs() <= 1e-10);
                for b in 0..2 {
                    assert!((o.hess(a, b) - got.hess(a, b)).abs() <= 1e-10);
                }
            }
        }
    }

    fn arb_jet(dim: usize) -> impl Strategy<Value = Jet2> {
        (
            -2.0..2.0f64,
            prop::collection::vec(-2.0..2.0f64, dim),
            prop::collection::vec(-2.0..2.0f64, dim * dim),
        )
            .prop_map(|(v, g, h)| Jet2::new(v, &g, &h))
    }

    fn close(a: &Jet2, b: &Jet2, tol: f64) -> bool {
        (a.value() - b.value()).abs() <= tol
            && (0..a.dim()).all(|p| {
                (a.d(p) - b.d(p)).abs() <= tol && (0..a.dim()).all(|q| (a.hess(p, q) - b.hess(p, q)).abs() <= tol)
            })
    }

    proptest! {
        #[test]
        fn addition_commutes_and_associates(a in arb_jet(3), b in arb_jet(3), c in arb_jet(3)) {
            prop_assert!(close(&jet_add(a, b), &jet_add(b, a), 1e-12));
            prop_assert!(close(&jet_add(jet_add(a, b), c), &jet_add(a, jet_add(b, c)), 1e-12));
        }

        #[test]
        fn hessians_stay_symmetric(a in arb_jet(4), b in arb_jet(4)) {
            prop_assert!(jet_mul(a, b).max_asymmetry() <= 1e-12);
            prop_assert!(jet_scale(a, 0.3).max_asymmetry() <= 1e-12);
        }

        #[test]
        fn product_with_inverse_is_identity_jet(
            entries in prop::collection::vec(arb_jet(3), 9),
        ) {
            let m = MatrixJet::from_entries(3, 3, entries);
            if let Ok(inv) = matrix_inverse_jet(&m) {
                let prod = m.matmul(&inv);
                let id = MatrixJet::identity(3, 3);
                let cond = m.value().norm() * inv.value().norm();
                prop_assume!(cond < 100.0);
                for (p, q) in prod.entries().iter().zip(id.entries()) {
                    prop_assert!(close(p, q, 1e-9), "{p:?} vs {q:?}");
                }
            }
        }
    }
}
