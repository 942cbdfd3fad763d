mod common;

use common::*;
use norden::catalog;
use norden::conjugation::Conjugates;
use norden::connections::ConnectionField;
use norden::expr::default_coordinate_names;
use norden::operators::{lie_derivative_02, tachibana, VectorField};
use norden::{parse_expr, SampleSet, Structure};

fn samples(s: &Structure, n: usize) -> SampleSet {
    s.sample(n, 99).unwrap()
}

#[test]
fn symbolic_derivatives_match_central_differences() {
    let names = default_coordinate_names(3);
    let points = [[0.3, -0.7, 0.2], [-0.9, 0.1, 0.8], [0.5, 0.5, -0.5]];
    for text in EXPRESSIONS {
        let e = parse_expr(text, &names).unwrap();
        for p in &points {
            let err = derivative_error(&e, p);
            assert!(err < 1e-4, "{text} at {p:?}: {err:e}");
        }
    }
}

#[test]
fn christoffel_symbols_match_difference_formula() {
    for name in ["holomorphic", "noncr", "nonintegrableJ"] {
        let s = catalog::by_name(name).unwrap();
        let d = s.dim();
        let lc = ConnectionField::levi_civita(s.g());
        let g = |q: &[f64]| entries(s.g().value_at(q).unwrap());
        for p in samples(&s, 5).iter() {
            let dg: Vec<Vec<f64>> = (0..d).map(|k| fd(&g, p, k)).collect();
            let at = |k: usize, i: usize, j: usize| dg[k][i + d * j];
            let ginv = s.g().value_at(p).unwrap().try_inverse().unwrap();
            let jet = lc.jet_at(p).unwrap();
            for k in 0..d {
                for i in 0..d {
                    for j in 0..d {
                        let oracle: f64 = (0..d)
                            .map(|l| 0.5 * ginv[(k, l)] * (at(i, l, j) + at(j, l, i) - at(l, i, j)))
                            .sum();
                        let got = jet.value(k, i, j);
                        assert!((oracle - got).abs() < 1e-6, "{name} Gamma^{k}_{i}{j}: {got} vs {oracle}");
                    }
                }
            }
        }
    }
}

#[test]
fn curvature_matches_differenced_christoffels() {
    let holo = catalog::by_name("holomorphic").unwrap();
    let nonint = catalog::by_name("nonintegrableJ").unwrap();
    let flat4 = catalog::by_name("flat4").unwrap();
    let cases = [
        (&holo, ConnectionField::levi_civita(holo.g())),
        (&nonint, ConnectionField::levi_civita(nonint.g())),
        (&flat4, catalog::random_connection(4, 5, catalog::RANDOM_DEGREE).unwrap()),
    ];
    for (s, conn) in &cases {
        for p in samples(s, 4).iter() {
            let err = curvature_error(conn, p);
            assert!(err < 1e-4, "{} at {p:?}: {err:e}", s.name());
        }
    }
}

#[test]
fn nijenhuis_matches_bracket_evaluation() {
    for name in ["flat4", "holomorphic", "nonintegrableJ"] {
        let s = catalog::by_name(name).unwrap();
        let mut largest = 0.0f64;
        for p in samples(&s, 4).iter() {
            let (err, n) = nijenhuis_error(&s, p);
            largest = largest.max(n);
            assert!(err < 1e-3, "{name} at {p:?}: {err:e}");
        }
        if name == "nonintegrableJ" {
            assert!(largest > 0.05, "nonintegrableJ must have N_J != 0");
        }
    }
}

#[test]
fn lie_derivative_matches_flow() {
    let s = catalog::by_name("nonintegrableJ").unwrap();
    let names = s.chart().names().to_vec();
    let exprs: Vec<_> = ["x2*x3", "1 + x4^2", "sin(x1)", "x1 - x3"]
        .iter()
        .map(|c| parse_expr(c, &names).unwrap())
        .collect();
    let v = VectorField::new(exprs.clone()).unwrap();
    let vf = |q: &[f64]| exprs.iter().map(|e| e.eval(q).unwrap()).collect::<Vec<_>>();
    let g = |q: &[f64]| s.g().value_at(q).unwrap();
    for p in samples(&s, 4).iter() {
        let oracle = lie_by_flow(&g, &vf, p);
        let got = lie_derivative_02(&v, s.g(), p).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!((got.get(&[i, j]) - oracle[(i, j)]).abs() < 1e-3, "L_V g ({i},{j})");
            }
        }
    }
}

#[test]
fn tachibana_matches_flow_oracle() {
    let s = catalog::by_name("noncr").unwrap();
    let g = |q: &[f64]| s.g().value_at(q).unwrap();
    let gj = |q: &[f64]| s.j().value_at(q).unwrap().transpose() * s.g().value_at(q).unwrap();
    for p in samples(&s, 4).iter() {
        let phi = tachibana(s.g(), s.j(), p).unwrap();
        for k in 0..2 {
            let jk = |q: &[f64]| s.j().value_at(q).unwrap().column(k).iter().copied().collect::<Vec<_>>();
            let lie = lie_by_flow(&g, &jk, p);
            let dgj = (gj(&shifted(p, k, H)) - gj(&shifted(p, k, -H))) / (2.0 * H);
            for i in 0..2 {
                for j in 0..2 {
                    let oracle = lie[(i, j)] - dgj[(i, j)];
                    assert!((phi.get(&[k, i, j]) - oracle).abs() < 1e-3, "Phi_J g ({k},{i},{j})");
                }
            }
        }
    }
}

#[test]
fn conjugate_satisfies_defining_identity_by_differences() {
    let s = catalog::by_name("holomorphic").unwrap();
    let d = s.dim();
    let conn = catalog::random_connection(d, 11, catalog::RANDOM_DEGREE).unwrap();
    let g = |q: &[f64]| entries(s.g().value_at(q).unwrap());
    for p in samples(&s, 4).iter() {
        let ctx = s.context_at(p).unwrap();
        let c = Conjugates::at(conn.jet_at(p).unwrap(), &ctx);
        let gv = s.g().value_at(p).unwrap();
        for k in 0..d {
            let dg = fd(&g, p, k);
            for i in 0..d {
                for j in 0..d {
                    let mut rhs = 0.0;
                    for l in 0..d {
                        rhs += c.base.value(l, k, i) * gv[(l, j)] + gv[(i, l)] * c.star.value(l, k, j);
                    }
                    assert!((dg[i + d * j] - rhs).abs() < 1e-6);
                }
            }
        }
    }
}
