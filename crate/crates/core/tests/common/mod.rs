//! Finite-difference oracles. Nothing here goes through the jet machinery.

#![allow(dead_code)]

use nalgebra::DMatrix;
use norden::curvature::curvature;
use norden::operators::nijenhuis_bracket;
use norden::{ConnectionField, ExprNode, Structure};

pub const H: f64 = 1e-5;

pub const EXPRESSIONS: [&str; 6] = [
    "x1^3*x2 - 2*x2*x3^2 + 5",
    "sin(x1*x2) + cos(x3)^2",
    "exp(x1 - x3)/(2 + x2^2)",
    "log(3 + x1^2 + x2^2)*x3",
    "-(x1 + x2)^4/(1 + x3^2)^2",
    "sin(exp(x1/3))*log(2 + cos(x2*x3))",
];

pub fn shifted(p: &[f64], k: usize, h: f64) -> Vec<f64> {
    let mut q = p.to_vec();
    q[k] += h;
    q
}

/// Central difference of a vector-valued function along coordinate `k`.
pub fn fd(f: &dyn Fn(&[f64]) -> Vec<f64>, p: &[f64], k: usize) -> Vec<f64> {
    let a = f(&shifted(p, k, H));
    let b = f(&shifted(p, k, -H));
    a.iter().zip(&b).map(|(x, y)| (x - y) / (2.0 * H)).collect()
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

/// Column-major entries, `(i, j) -> i + d*j`.
pub fn entries(m: DMatrix<f64>) -> Vec<f64> {
    m.as_slice().to_vec()
}

/// Worst relative error of first and second symbolic derivatives.
pub fn derivative_error(e: &ExprNode, p: &[f64]) -> f64 {
    let d = p.len();
    let mut worst = 0.0f64;
    let central = |f: &ExprNode, k: usize| (f.eval(&shifted(p, k, H)).unwrap() - f.eval(&shifted(p, k, -H)).unwrap()) / (2.0 * H);
    for k in 0..d {
        let dk = e.differentiate(k);
        worst = worst.max(rel_err(dk.eval(p).unwrap(), central(e, k)));
        for l in 0..d {
            worst = worst.max(rel_err(dk.differentiate(l).eval(p).unwrap(), central(&dk, l)));
        }
    }
    worst
}

/// Worst relative error of the curvature against differenced Christoffel symbols.
pub fn curvature_error(conn: &ConnectionField, p: &[f64]) -> f64 {
    let d = conn.dim();
    let values = |q: &[f64]| conn.jet_at(q).unwrap().values();
    let v = values(p);
    let gam = |l: usize, i: usize, j: usize| v[(l * d + i) * d + j];
    let dgamma: Vec<Vec<f64>> = (0..d).map(|k| fd(&values, p, k)).collect();
    let dg = |x: usize, l: usize, i: usize, j: usize| dgamma[x][(l * d + i) * d + j];
    let r = curvature(conn, p).unwrap();
    let mut worst = 0.0f64;
    for l in 0..d {
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let mut oracle = dg(i, l, j, k) - dg(j, l, i, k);
                    for m in 0..d {
                        oracle += gam(l, i, m) * gam(m, j, k) - gam(l, j, m) * gam(m, i, k);
                    }
                    worst = worst.max(rel_err(r.get(&[l, i, j, k]), oracle));
                }
            }
        }
    }
    worst
}

/// `[X, Y]^k = X^m ∂_m Y^k − Y^m ∂_m X^k` with derivatives by differences.
pub fn bracket(x: &dyn Fn(&[f64]) -> Vec<f64>, y: &dyn Fn(&[f64]) -> Vec<f64>, p: &[f64]) -> Vec<f64> {
    let d = p.len();
    let (xp, yp) = (x(p), y(p));
    let mut out = vec![0.0; d];
    for m in 0..d {
        let dy = fd(y, p, m);
        let dx = fd(x, p, m);
        for k in 0..d {
            out[k] += xp[m] * dy[k] - yp[m] * dx[k];
        }
    }
    out
}

/// Worst absolute error of `N_J(∂a, ∂b)` against
/// `[JX,JY] − J[JX,Y] − J[X,JY] − [X,Y]`, and the largest `|N_J|` seen.
pub fn nijenhuis_error(s: &Structure, p: &[f64]) -> (f64, f64) {
    let d = s.dim();
    let jm = |q: &[f64]| s.j().value_at(q).unwrap();
    let jt = jm(p);
    let apply_j = |v: Vec<f64>| (0..d).map(|k| (0..d).map(|m| jt[(k, m)] * v[m]).sum::<f64>()).collect::<Vec<_>>();
    let n = nijenhuis_bracket(s.j(), p).unwrap();
    let (mut worst, mut largest) = (0.0f64, 0.0f64);
    for a in 0..d {
        for b in 0..d {
            let x = move |_: &[f64]| (0..d).map(|k| f64::from(k == a)).collect::<Vec<_>>();
            let y = move |_: &[f64]| (0..d).map(|k| f64::from(k == b)).collect::<Vec<_>>();
            let jx = |q: &[f64]| jm(q).column(a).iter().copied().collect::<Vec<_>>();
            let jy = |q: &[f64]| jm(q).column(b).iter().copied().collect::<Vec<_>>();
            let t1 = bracket(&jx, &jy, p);
            let t2 = apply_j(bracket(&jx, &y, p));
            let t3 = apply_j(bracket(&x, &jy, p));
            let t4 = bracket(&x, &y, p);
            for k in 0..d {
                let got = n.get(&[k, a, b]);
                largest = largest.max(got.abs());
                worst = worst.max((got - (t1[k] - t2[k] - t3[k] - t4[k])).abs());
            }
        }
    }
    (worst, largest)
}

/// Pullback of a (0,2) tensor along the Euler step `p + hV(p)`.
pub fn pullback(t: &dyn Fn(&[f64]) -> DMatrix<f64>, v: &dyn Fn(&[f64]) -> Vec<f64>, p: &[f64], h: f64) -> DMatrix<f64> {
    let d = p.len();
    let vp = v(p);
    let q: Vec<f64> = p.iter().zip(&vp).map(|(x, y)| x + h * y).collect();
    let dv: Vec<Vec<f64>> = (0..d).map(|i| fd(v, p, i)).collect();
    let jac = DMatrix::from_fn(d, d, |a, i| f64::from(a == i) + h * dv[i][a]);
    jac.transpose() * t(&q) * jac
}

/// Lie derivative by differencing pullbacks in the flow parameter.
pub fn lie_by_flow(t: &dyn Fn(&[f64]) -> DMatrix<f64>, v: &dyn Fn(&[f64]) -> Vec<f64>, p: &[f64]) -> DMatrix<f64> {
    let h = 1e-4;
    (pullback(t, v, p, h) - pullback(t, v, p, -h)) / (2.0 * h)
}
