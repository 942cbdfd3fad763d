//! Curvature of arbitrary linear connections.

use nalgebra::DMatrix;

use crate::conjugation::{star, Conjugates};
use crate::connections::{j_conjugate_jet, ConnectionField, ConnectionJet};
use crate::error::{Error, Result};
use crate::geometry::{PointContext, Structure};
use crate::report::{CheckReport, Residual};
use crate::sampling::SampleSet;
use crate::tensor::TensorValue;

/// `R^l_{ijk} = ∂_iΓ^l_{jk} − ∂_jΓ^l_{ik} + Γ^l_{im}Γ^m_{jk} − Γ^l_{jm}Γ^m_{ik}`,
/// index order `(l, i, j, k)`.
pub fn curvature_at(gamma: &ConnectionJet, point: &[f64]) -> TensorValue {
    let d = gamma.dim();
    TensorValue::from_fn(1, 3, d, point, |x| {
        let (l, i, j, k) = (x[0], x[1], x[2], x[3]);
        let mut v = gamma.derivative(l, j, k, i) - gamma.derivative(l, i, k, j);
        for m in 0..d {
            v += gamma.value(l, i, m) * gamma.value(m, j, k) - gamma.value(l, j, m) * gamma.value(m, i, k);
        }
        v
    })
}

pub fn curvature(connection: &ConnectionField, point: &[f64]) -> Result<TensorValue> {
    Ok(curvature_at(&connection.jet_at(point)?, point))
}

/// `R_{ijkm} = g_{lm} R^l_{ijk}`.
pub fn lower_curvature(g: &DMatrix<f64>, r: &TensorValue) -> Result<TensorValue> {
    if r.contravariant != 1 || r.covariant != 3 || g.nrows() != r.dim || g.ncols() != r.dim {
        return Err(Error::InvalidInput("lowering needs a (1,3) tensor and a matching metric".into()));
    }
    let d = r.dim;
    Ok(TensorValue::from_fn(0, 4, d, &r.point, |x| {
        let (i, j, k, m) = (x[0], x[1], x[2], x[3]);
        (0..d).map(|l| g[(l, m)] * r.get(&[l, i, j, k])).sum()
    }))
}

/// The three sides of `R(X,Y,JZ,W) = −R*(X,Y,W,JZ) = Rᴶ(X,Y,Z,JW)` on
/// coordinate fields, each indexed `(i, j, k, m)` for `X, Y, Z, W = ∂_i, ∂_j, ∂_k, ∂_m`.
pub fn theorem2_sides(gamma: ConnectionJet, ctx: &PointContext) -> Result<[Vec<f64>; 3]> {
    let p = &ctx.point;
    let g = ctx.g_value();
    let jm = ctx.j_value();
    let d = g.nrows();
    let st = star(&gamma, ctx);
    let jc = j_conjugate_jet(&gamma, &ctx.j);
    let r = lower_curvature(&g, &curvature_at(&gamma, p))?;
    let rs = lower_curvature(&g, &curvature_at(&st, p))?;
    let rj = lower_curvature(&g, &curvature_at(&jc, p))?;
    let n = d * d * d * d;
    let (mut a, mut b, mut c) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut idx = 0;
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for m in 0..d {
                    for q in 0..d {
                        a[idx] += jm[(q, k)] * r.get(&[i, j, q, m]);
                        b[idx] -= jm[(q, k)] * rs.get(&[i, j, m, q]);
                        c[idx] += jm[(q, m)] * rj.get(&[i, j, k, q]);
                    }
                    idx += 1;
                }
            }
        }
    }
    Ok([a, b, c])
}

/// Both equalities of the curvature relation between `∇`, `∇*` and `∇ᴶ`,
/// all lowered with `g`.
pub fn verify_theorem2(
    structure: &Structure,
    connection: &ConnectionField,
    samples: &SampleSet,
    tol: f64,
) -> Result<CheckReport> {
    let mut first = Residual::new();
    let mut second = Residual::new();
    for p in samples.iter() {
        let ctx = structure.context_at(p)?;
        let [a, b, c] = theorem2_sides(connection.jet_at(p)?, &ctx)?;
        first.compare(&a, &b);
        second.compare(&a, &c);
    }
    Ok(CheckReport::from_residuals(
        "theorem2",
        tol,
        samples,
        vec![
            ("R(X,Y,JZ,W) = -R*(X,Y,W,JZ)".into(), first.value()),
            ("R(X,Y,JZ,W) = RJ(X,Y,Z,JW)".into(), second.value()),
        ],
    ))
}

/// Curvatures of `∇, ∇*, ∇†, ∇ᴶ` at one point.
pub fn conjugate_curvatures(gamma: ConnectionJet, ctx: &PointContext) -> [TensorValue; 4] {
    let c = Conjugates::at(gamma, ctx);
    let p = &ctx.point;
    [
        curvature_at(&c.base, p),
        curvature_at(&c.star, p),
        curvature_at(&c.dagger, p),
        curvature_at(&c.j, p),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{default_coordinate_names, parse_expr, ExprNode};

    #[test]
    fn zero_connection_is_flat() {
        let r = curvature(&ConnectionField::zero(2).unwrap(), &[0.1, 0.2]).unwrap();
        assert_eq!(r.max_abs(), 0.0);
    }

    #[test]
    fn antisymmetric_in_first_pair() {
        let names = default_coordinate_names(2);
        let exprs = ["x1", "x2^2", "1", "x1*x2", "0", "x2", "x1 - x2", "3"];
        let c = ConnectionField::explicit(2, exprs.iter().map(|e| parse_expr(e, &names).unwrap()).collect()).unwrap();
        let r = curvature(&c, &[0.3, -0.7]).unwrap();
        for l in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    for k in 0..2 {
                        assert!((r.get(&[l, i, j, k]) + r.get(&[l, j, i, k])).abs() <= 1e-12);
                    }
                }
            }
        }
        // one component by hand: R^0_{100} = ∂_1Γ^0_{00} − ∂_0Γ^0_{10} + Γ^0_{1m}Γ^m_{00} − Γ^0_{0m}Γ^m_{10}
        let (x, y) = (0.3f64, -0.7f64);
        let g = |k: usize, i: usize, j: usize| -> f64 {
            [x, y * y, 1.0, x * y, 0.0, y, x - y, 3.0][(k * 2 + i) * 2 + j]
        };
        let expected = 0.0 - 0.0 + (0..2).map(|m| g(0, 1, m) * g(m, 0, 0) - g(0, 0, m) * g(m, 1, 0)).sum::<f64>();
        assert!((r.get(&[0, 1, 0, 0]) - expected).abs() <= 1e-12);
    }

    #[test]
    fn lowering_with_identity_relabels() {
        let c = ConnectionField::explicit(2, (0..8).map(|n| ExprNode::Constant(n as f64 * 0.1)).collect()).unwrap();
        let r = curvature(&c, &[0.0, 0.0]).unwrap();
        let low = lower_curvature(&DMatrix::identity(2, 2), &r).unwrap();
        for l in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    for k in 0..2 {
                        assert_eq!(low.get(&[i, j, k, l]), r.get(&[l, i, j, k]));
                    }
                }
            }
        }
    }
}
