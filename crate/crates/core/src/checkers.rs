//! Codazzi, statistical and anti-Kähler predicates, and one verifier per
//! identity of the theory.
//!
//! Verifiers first evaluate their hypotheses on every sample point; if any
//! hypothesis residual exceeds `Tolerance::hypothesis` the report says
//! `hypothesis-not-met` and lists the hypothesis residuals. Equivalences are
//! checked as agreement of booleans, each decided at `Tolerance::conclusion`.

use nalgebra::DMatrix;

use crate::conjugation::{compare_connections, Conjugates};
use crate::connections::{
    covariant_derivative_02_at, covariant_derivative_11_at, j_conjugate_jet, levi_civita_jet, torsion_at,
    ConnectionField, ConnectionJet,
};
use crate::error::{Error, Result};
use crate::geometry::{ComplexStructureField, MetricField, PointContext, Structure};
use crate::jets::MatrixJet;
use crate::operators::{nijenhuis_at, tachibana_at};
use crate::report::{Breakdown, CheckReport, Residual, Verdict, DEFAULT_TOLERANCE};
use crate::sampling::SampleSet;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub conclusion: f64,
    pub hypothesis: f64,
}

impl Tolerance {
    pub fn uniform(tol: f64) -> Tolerance {
        Tolerance {
            conclusion: tol,
            hypothesis: tol,
        }
    }
}

impl Default for Tolerance {
    fn default() -> Tolerance {
        Tolerance::uniform(DEFAULT_TOLERANCE)
    }
}

impl From<f64> for Tolerance {
    fn from(tol: f64) -> Tolerance {
        Tolerance::uniform(tol)
    }
}

// ---- pointwise residuals -------------------------------------------------

/// `|(∇_k ρ)_{ij} − (∇_i ρ)_{kj}|`, normalized.
pub fn codazzi_metric_at(gamma: &ConnectionJet, rho: &MatrixJet, point: &[f64]) -> f64 {
    let n = covariant_derivative_02_at(gamma, rho, point);
    let swapped = permuted(&n.data, n.dim, |k, i, j| (i, k, j));
    let mut r = Residual::new();
    r.compare(&n.data, &swapped);
    r.value()
}

/// `|(∇_k J)^i_j − (∇_j J)^i_k|`, normalized.
pub fn codazzi_j_at(gamma: &ConnectionJet, j: &MatrixJet, point: &[f64]) -> f64 {
    let n = covariant_derivative_11_at(gamma, j, point);
    let swapped = permuted(&n.data, n.dim, |k, i, jj| (jj, i, k));
    let mut r = Residual::new();
    r.compare(&n.data, &swapped);
    r.value()
}

pub fn torsion_norm_at(gamma: &ConnectionJet, point: &[f64]) -> f64 {
    torsion_at(gamma, point).max_abs()
}

pub fn j_invariance_at(gamma: &ConnectionJet, j: &MatrixJet, point: &[f64]) -> f64 {
    covariant_derivative_11_at(gamma, j, point).max_abs()
}

/// Deviation of a 3-index array from total symmetry.
pub fn total_symmetry_at(data: &[f64], dim: usize) -> f64 {
    let mut r = Residual::new();
    r.compare(data, &permuted(data, dim, |a, b, c| (b, a, c)));
    r.compare(data, &permuted(data, dim, |a, b, c| (a, c, b)));
    r.value()
}

/// `out[a,b,c] = data[f(a,b,c)]` for a flat `dim³` array.
fn permuted(data: &[f64], dim: usize, f: impl Fn(usize, usize, usize) -> (usize, usize, usize)) -> Vec<f64> {
    let mut out = Vec::with_capacity(data.len());
    for a in 0..dim {
        for b in 0..dim {
            for c in 0..dim {
                let (x, y, z) = f(a, b, c);
                out.push(data[(x * dim + y) * dim + z]);
            }
        }
    }
    out
}

fn mat_values(m: &MatrixJet) -> DMatrix<f64> {
    m.value()
}

/// Running maxima of a fixed list of named residuals.
struct Tally {
    names: Vec<String>,
    values: Vec<Residual>,
}

impl Tally {
    fn new(names: &[&str]) -> Tally {
        Tally {
            names: names.iter().map(|s| s.to_string()).collect(),
            values: vec![Residual::new(); names.len()],
        }
    }

    fn record(&mut self, n: usize, r: f64) {
        self.values[n].record(r);
    }

    fn get(&self, n: usize) -> f64 {
        self.values[n].value()
    }

    fn entries(&self) -> Vec<(String, f64)> {
        self.names.iter().cloned().zip(self.values.iter().map(|r| r.value())).collect()
    }

    fn all_within(&self, tol: f64) -> bool {
        self.values.iter().all(|r| r.value() <= tol)
    }
}

/// Evaluates `f` at every sample with the point context and the connection jet.
fn for_each_point(
    structure: &Structure,
    connection: &ConnectionField,
    samples: &SampleSet,
    mut f: impl FnMut(&PointContext, ConnectionJet) -> Result<()>,
) -> Result<()> {
    if connection.dim() != structure.dim() {
        return Err(Error::InvalidInput(format!(
            "connection dimension {} does not match structure dimension {}",
            connection.dim(),
            structure.dim()
        )));
    }
    for p in samples.iter() {
        let ctx = structure.context_at(p)?;
        f(&ctx, connection.jet_at(p)?)?;
    }
    Ok(())
}

fn hypotheses(
    structure: &Structure,
    connection: &ConnectionField,
    samples: &SampleSet,
    names: &[&str],
    eval: impl Fn(&PointContext, &Conjugates) -> Vec<f64>,
) -> Result<Tally> {
    let mut t = Tally::new(names);
    for_each_point(structure, connection, samples, |ctx, gamma| {
        let c = Conjugates::at(gamma, ctx);
        for (n, r) in eval(ctx, &c).into_iter().enumerate() {
            t.record(n, r);
        }
        Ok(())
    })?;
    Ok(t)
}

fn label(name: &str, holds: bool) -> String {
    format!("{name} [{}]", if holds { "holds" } else { "fails" })
}

/// Report for a check whose conclusion is a list of residuals plus some
/// verdict-agreement groups.
fn conclude(
    check: &str,
    tol: f64,
    samples: &SampleSet,
    residuals: Vec<(String, f64)>,
    groups: Vec<Vec<(String, f64)>>,
) -> CheckReport {
    let mut report = CheckReport::from_residuals(check, tol, samples, residuals);
    for group in groups {
        let verdicts: Vec<bool> = group.iter().map(|(_, r)| *r <= tol).collect();
        let agree = verdicts.windows(2).all(|w| w[0] == w[1]);
        if !agree {
            report.max_residual = report.max_residual.max(1.0);
            report.verdict = Verdict::Fail;
        }
        for ((name, r), holds) in group.into_iter().zip(verdicts) {
            report.breakdown.push(Breakdown {
                name: label(&name, holds),
                residual: r,
            });
        }
    }
    report
}

// ---- predicates ------------------------------------------------------------

/// `(∇_Z ρ)(X,Y) = (∇_X ρ)(Z,Y)`.
pub fn check_codazzi_metric(
    connection: &ConnectionField,
    rho: &MetricField,
    samples: &SampleSet,
    tol: f64,
) -> Result<CheckReport> {
    let mut r = Residual::new();
    for p in samples.iter() {
        r.record(codazzi_metric_at(&connection.jet_at(p)?, &rho.jet_at(p)?, p));
    }
    Ok(CheckReport::from_residuals(
        "codazzi_metric",
        tol,
        samples,
        vec![("(nabla_Z rho)(X,Y) - (nabla_X rho)(Z,Y)".into(), r.value())],
    ))
}

/// `(∇_Z J)X = (∇_X J)Z`.
pub fn check_codazzi_j(
    connection: &ConnectionField,
    j: &ComplexStructureField,
    samples: &SampleSet,
    tol: f64,
) -> Result<CheckReport> {
    let mut r = Residual::new();
    for p in samples.iter() {
        r.record(codazzi_j_at(&connection.jet_at(p)?, &j.jet_at(p)?, p));
    }
    Ok(CheckReport::from_residuals(
        "codazzi_J",
        tol,
        samples,
        vec![("(nabla_Z J)X - (nabla_X J)Z".into(), r.value())],
    ))
}

/// Torsion-free and Codazzi with respect to `ρ`.
pub fn check_statistical(
    connection: &ConnectionField,
    rho: &MetricField,
    samples: &SampleSet,
    tol: f64,
) -> Result<CheckReport> {
    let mut torsion = Residual::new();
    let mut codazzi = Residual::new();
    for p in samples.iter() {
        let gamma = connection.jet_at(p)?;
        torsion.record(torsion_norm_at(&gamma, p));
        codazzi.record(codazzi_metric_at(&gamma, &rho.jet_at(p)?, p));
    }
    Ok(CheckReport::from_residuals(
        "statistical_structure",
        tol,
        samples,
        vec![("torsion".into(), torsion.value()), ("codazzi".into(), codazzi.value())],
    ))
}

/// `|∇^{LC(g)} J|` and `|Φ_J g|` at one point.
pub fn anti_kahler_residuals_at(ctx: &PointContext) -> (f64, f64) {
    let lc = levi_civita_jet(&ctx.g, &ctx.g_inv);
    let nabla_j = covariant_derivative_11_at(&lc, &ctx.j, &ctx.point).max_abs();
    let phi = tachibana_at(&ctx.g, &ctx.j, &ctx.point).max_abs();
    (nabla_j, phi)
}

/// Passes iff both `∇^{LC(g)} J` and `Φ_J g` vanish.
pub fn check_anti_kahler(structure: &Structure, samples: &SampleSet, tol: f64) -> Result<CheckReport> {
    let mut a = Residual::new();
    let mut b = Residual::new();
    for p in samples.iter() {
        let (x, y) = anti_kahler_residuals_at(&structure.context_at(p)?);
        a.record(x);
        b.record(y);
    }
    Ok(CheckReport::from_residuals(
        "anti_kahler",
        tol,
        samples,
        vec![("nabla^g J".into(), a.value()), ("Phi_J g".into(), b.value())],
    ))
}

// ---- verifiers -------------------------------------------------------------

/// Under `(∇,G)` Codazzi: (i) `F = ∇G` totally symmetric; (ii)
/// `(∇*_{JZ}G)(X,Y) = (∇*_{JX}G)(Z,Y)`; (iii) `J⁻¹{(∇*_Z J)X − (∇*_X J)Z} + T*(Z,X) = T(Z,X)`
/// together with agreement of `T = T*` and `(∇*,J)` Codazzi; (iv) `T = T^{(∇*)ᴶ}`.
pub fn verify_prop31(
    structure: &Structure,
    connection: &ConnectionField,
    samples: &SampleSet,
    tol: impl Into<Tolerance>,
) -> Result<CheckReport> {
    let tol = tol.into();
    let hyp = hypotheses(structure, connection, samples, &["codazzi (nabla, G)"], |ctx, c| {
        vec![codazzi_metric_at(&c.base, &ctx.twin, &ctx.point)]
    })?;
    if !hyp.all_within(tol.hypothesis) {
        return Ok(CheckReport::hypothesis_not_met("prop31", tol.conclusion, samples, hyp.entries()));
    }
    let mut t = Tally::new(&[
        "i: F totally symmetric",
        "ii: (nabla*_JZ G)(X,Y) = (nabla*_JX G)(Z,Y)",
        "iii: J^-1{(nabla*_Z J)X - (nabla*_X J)Z} + T*(Z,X) = T(Z,X)",
        "iv: T = T^((nabla*)J)",
    ]);
    let mut torsions = Residual::new();
    let mut star_codazzi = Residual::new();
    for_each_point(structure, connection, samples, |ctx, gamma| {
        let p = &ctx.point;
        let d = ctx.dim();
        let c = Conjugates::at(gamma, ctx);
        let jv = mat_values(&ctx.j);
        // (i)
        let f = covariant_derivative_02_at(&c.base, &ctx.twin, p);
        t.record(0, total_symmetry_at(&f.data, d));
        // (ii)
        let h = covariant_derivative_02_at(&c.star, &ctx.twin, p);
        let mut lhs = Vec::with_capacity(d * d * d);
        let mut rhs = Vec::with_capacity(d * d * d);
        for z in 0..d {
            for x in 0..d {
                for y in 0..d {
                    lhs.push((0..d).map(|a| jv[(a, z)] * h.get(&[a, x, y])).sum::<f64>());
                    rhs.push((0..d).map(|a| jv[(a, x)] * h.get(&[a, z, y])).sum::<f64>());
                }
            }
        }
        let mut r = Residual::new();
        r.compare(&lhs, &rhs);
        t.record(1, r.value());
        // (iii), stored as (i, z, x)
        let ds = covariant_derivative_11_at(&c.star, &ctx.j, p);
        let ts = torsion_at(&c.star, p);
        let tb = torsion_at(&c.base, p);
        let mut lhs = Vec::with_capacity(d * d * d);
        for i in 0..d {
            for z in 0..d {
                for x in 0..d {
                    let jinv: f64 = (0..d)
                        .map(|a| -jv[(i, a)] * (ds.get(&[z, a, x]) - ds.get(&[x, a, z])))
                        .sum();
                    lhs.push(jinv + ts.get(&[i, z, x]));
                }
            }
        }
        let mut r = Residual::new();
        r.compare(&lhs, &tb.data);
        t.record(2, r.value());
        let mut r = Residual::new();
        r.compare(&tb.data, &ts.data);
        torsions.record(r.value());
        star_codazzi.record(codazzi_j_at(&c.star, &ctx.j, p));
        // (iv)
        let sj = j_conjugate_jet(&c.star, &ctx.j);
        let mut r = Residual::new();
        r.compare(&tb.data, &torsion_at(&sj, p).data);
        t.record(3, r.value());
        Ok(())
    })?;
    Ok(conclude(
        "prop31",
        tol.conclusion,
        samples,
        t.entries(),
        vec![vec![
            ("iii: T = T*".into(), torsions.value()),
            ("iii: (nabla*, J) codazzi".into(), star_codazzi.value()),
        ]],
    ))
}

/// Agreement of `(∇,G)` Codazzi, `(∇†,G)` Codazzi, `F†` totally symmetric and `T = T†`.
pub fn verify_prop32(
    structure: &Structure,
    connection: &ConnectionField,
    samples: &SampleSet,
    tol: impl Into<Tolerance>,
) -> Result<CheckReport> {
    let tol = tol.into();
    let t = hypotheses(
        structure,
        connection,
        samples,
        &[
            "(nabla, G) codazzi",
            "(nabla+, G) codazzi",
            "F+ totally symmetric",
            "T = T+",
        ],
        |ctx, c| {
            let p = &ctx.point;
            let fd = covariant_derivative_02_at(&c.dagger, &ctx.twin, p);
            let mut r = Residual::new();
            r.compare(&torsion_at(&c.base, p).data, &torsion_at(&c.dagger, p).data);
            vec![
                codazzi_metric_at(&c.base, &ctx.twin, p),
                codazzi_metric_at(&c.dagger, &ctx.twin, p),
                total_symmetry_at(&fd.data, ctx.dim()),
                r.value(),
            ]
        },
    )?;
    Ok(conclude("prop32", tol.conclusion, samples, vec![], vec![t.entries()]))
}

/// Under `(∇,G)` and `(∇*,J)` Codazzi: `T = T* = T†`.
pub fn verify_corollary_torsions(
    structure: &Structure,
    connection: &ConnectionField,
    samples: &SampleSet,
    tol: impl Into<Tolerance>,
) -> Result<CheckReport> {
    let tol = tol.into();
    let hyp = hypotheses(
        structure,
        connection,
        samples,
        &["codazzi (nabla, G)", "codazzi (nabla*, J)"],
        |ctx, c| {
            vec![
                codazzi_metric_at(&c.base, &ctx.twin, &ctx.point),
                codazzi_j_at(&c.star, &ctx.j, &ctx.point),
            ]
        },
    )?;
    if !hyp.all_within(tol.hypothesis) {
        return Ok(CheckReport::hypothesis_not_met(
            "corollary_torsions",
            tol.conclusion,
            samples,
            hyp.entries(),
        ));
    }
    let t = hypotheses(structure, connection, samples, &["T = T*", "T = T+"], |ctx, c| {
        let p = &ctx.point;
        let tb = torsion_at(&c.base, p).data;
        let mut a = Residual::new();
        a.compare(&tb, &torsion_at(&c.star, p).data);
        let mut b = Residual::new();
        b.compare(&tb, &torsion_at(&c.dagger, p).data);
        vec![a.value(), b.value()]
    })?;
    Ok(CheckReport::from_residuals("corollary_torsions", tol.conclusion, samples, t.entries()))
}

/// Under `(∇,G)` Codazzi:
/// `G((∇†_Z J)X − (∇†_X J)Z, Y) = (∇_X g)(Z,Y) − (∇_Z g)(X,Y)`, plus agreement of
/// `(∇†,J)` Codazzi with `(∇,g)` Codazzi.
pub fn verify_prop_dagger_j(
    structure: &Structure,
    connection: &ConnectionField,
    samples: &SampleSet,
    tol: impl Into<Tolerance>,
) -> Result<CheckReport> {
    let tol = tol.into();
    let hyp = hypotheses(structure, connection, samples, &["codazzi (nabla, G)"], |ctx, c| {
        vec![codazzi_metric_at(&c.base, &ctx.twin, &ctx.point)]
    })?;
    if !hyp.all_within(tol.hypothesis) {
        return Ok(CheckReport::hypothesis_not_met("prop_dagger_J", tol.conclusion, samples, hyp.entries()));
    }
    let t = hypotheses(
        structure,
        connection,
        samples,
        &["identity", "(nabla+, J) codazzi", "(nabla, g) codazzi"],
        |ctx, c| {
            let p = &ctx.point;
            let d = ctx.dim();
            let gv = mat_values(&ctx.twin);
            let dd = covariant_derivative_11_at(&c.dagger, &ctx.j, p);
            let ng = covariant_derivative_02_at(&c.base, &ctx.g, p);
            let mut lhs = Vec::with_capacity(d * d * d);
            let mut rhs = Vec::with_capacity(d * d * d);
            for k in 0..d {
                for i in 0..d {
                    for j in 0..d {
                        lhs.push(
                            (0..d)
                                .map(|a| gv[(a, j)] * (dd.get(&[k, a, i]) - dd.get(&[i, a, k])))
                                .sum::<f64>(),
                        );
                        rhs.push(ng.get(&[i, k, j]) - ng.get(&[k, i, j]));
                    }
                }
            }
            let mut r = Residual::new();
            r.compare(&lhs, &rhs);
            vec![
                r.value(),
                codazzi_j_at(&c.dagger, &ctx.j, p),
                codazzi_metric_at(&c.base, &ctx.g, p),
            ]
        },
    )?;
    let e = t.entries();
    Ok(conclude(
        "prop_dagger_J",
        tol.conclusion,
        samples,
        vec![e[0].clone()],
        vec![e[1..].to_vec()],
    ))
}

fn torsion_free_codazzi_j(
    structure: &Structure,
    connection: &ConnectionField,
    samples: &SampleSet,
) -> Result<Tally> {
    hypotheses(structure, connection, samples, &["torsion", "codazzi (nabla, J)"], |ctx, c| {
        vec![torsion_norm_at(&c.base, &ctx.point), codazzi_j_at(&c.base, &ctx.j, &ctx.point)]
    })
}

/// `(∇_{JX}G)(Y,Z)` and `(∇_X g)(JY,JZ)` in `(k, i, j)` order.
fn pr3_right_sides(gamma: &ConnectionJet, ctx: &PointContext) -> (Vec<f64>, Vec<f64>) {
    let p = &ctx.point;
    let d = ctx.dim();
    let jv = mat_values(&ctx.j);
    let ng = covariant_derivative_02_at(gamma, &ctx.g, p);
    let nt = covariant_derivative_02_at(gamma, &ctx.twin, p);
    let mut a = Vec::with_capacity(d * d * d);
    let mut b = Vec::with_capacity(d * d * d);
    for k in 0..d {
        for i in 0..d {
            for j in 0..d {
                a.push((0..d).map(|q| jv[(q, k)] * nt.get(&[q, i, j])).sum::<f64>());
                let mut s = 0.0;
                for m in 0..d {
                    for n in 0..d {
                        s += jv[(m, i)] * jv[(n, j)] * ng.get(&[k, m, n]);
                    }
                }
                b.push(s);
            }
        }
    }
    (a, b)
}

/// Under torsion-free and `(∇,J)` Codazzi:
/// `(Φ_J G)(X,Y,Z) = (Φ_J g)(X,JY,Z) = (∇_{JX}G)(Y,Z) − (∇_X g)(JY,JZ)` and `N_J = 0`.
pub fn verify_prop_pr3(
    structure: &Structure,
    connection: &ConnectionField,
    samples: &SampleSet,
    tol: impl Into<Tolerance>,
) -> Result<CheckReport> {
    let tol = tol.into();
    let hyp = torsion_free_codazzi_j(structure, connection, samples)?;
    if !hyp.all_within(tol.hypothesis) {
        return Ok(CheckReport::hypothesis_not_met("prop_pr3", tol.conclusion, samples, hyp.entries()));
    }
    let t = hypotheses(
        structure,
        connection,
        samples,
        &[
            "(Phi G)(X,Y,Z) = (Phi g)(X,JY,Z)",
            "(Phi g)(X,JY,Z) = (nabla_JX G)(Y,Z) - (nabla_X g)(JY,JZ)",
            "N_J = 0",
        ],
        |ctx, c| {
            let p = &ctx.point;
            let d = ctx.dim();
            let jv = mat_values(&ctx.j);
            let phi_t = tachibana_at(&ctx.twin, &ctx.j, p);
            let phi_g = tachibana_at(&ctx.g, &ctx.j, p);
            let mut mid = Vec::with_capacity(d * d * d);
            for k in 0..d {
                for i in 0..d {
                    for j in 0..d {
                        mid.push((0..d).map(|m| jv[(m, i)] * phi_g.get(&[k, m, j])).sum::<f64>());
                    }
                }
            }
            let (a, b) = pr3_right_sides(&c.base, ctx);
            let right: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
            let mut r1 = Residual::new();
            r1.compare(&phi_t.data, &mid);
            let mut r2 = Residual::new();
            r2.compare(&mid, &right);
            vec![r1.value(), r2.value(), nijenhuis_at(&ctx.j, p).max_abs()]
        },
    )?;
    Ok(CheckReport::from_residuals("prop_pr3", tol.conclusion, samples, t.entries()))
}

/// Under torsion-free and `(∇,J)` Codazzi: anti-Kähler iff
/// `(∇_{JX}G)(Y,Z) = (∇_X g)(JY,JZ)`, tested as verdict agreement.
pub fn verify_antikahler_iff(
    structure: &Structure,
    connection: &ConnectionField,
    samples: &SampleSet,
    tol: impl Into<Tolerance>,
) -> Result<CheckReport> {
    let tol = tol.into();
    let hyp = torsion_free_codazzi_j(structure, connection, samples)?;
    if !hyp.all_within(tol.hypothesis) {
        return Ok(CheckReport::hypothesis_not_met("antikahler_iff", tol.conclusion, samples, hyp.entries()));
    }
    let t = hypotheses(
        structure,
        connection,
        samples,
        &["(nabla_JX G)(Y,Z) = (nabla_X g)(JY,JZ)", "anti-Kahler"],
        |ctx, c| {
            let (a, b) = pr3_right_sides(&c.base, ctx);
            let mut r = Residual::new();
            r.compare(&a, &b);
            let (x, y) = anti_kahler_residuals_at(ctx);
            vec![r.value(), x.max(y)]
        },
    )?;
    Ok(conclude("antikahler_iff", tol.conclusion, samples, vec![], vec![t.entries()]))
}

/// J-invariance of `∇`, `∇*`, `∇†` agree; when `∇` is J-invariant, `∇† = ∇*` and
/// `(∇,G)` Codazzi iff `(∇,g)` Codazzi. A connection that is not J-invariant
/// gets `hypothesis-not-met` once the agreement part has passed.
pub fn verify_prop_pr4_pr5(
    structure: &Structure,
    connection: &ConnectionField,
    samples: &SampleSet,
    tol: impl Into<Tolerance>,
) -> Result<CheckReport> {
    let tol = tol.into();
    let t = hypotheses(
        structure,
        connection,
        samples,
        &[
            "nabla J-invariant",
            "nabla* J-invariant",
            "nabla+ J-invariant",
            "nabla+ = nabla*",
            "(nabla, G) codazzi",
            "(nabla, g) codazzi",
        ],
        |ctx, c| {
            let p = &ctx.point;
            let mut same = Residual::new();
            compare_connections(&mut same, &c.dagger, &c.star);
            vec![
                j_invariance_at(&c.base, &ctx.j, p),
                j_invariance_at(&c.star, &ctx.j, p),
                j_invariance_at(&c.dagger, &ctx.j, p),
                same.value(),
                codazzi_metric_at(&c.base, &ctx.twin, p),
                codazzi_metric_at(&c.base, &ctx.g, p),
            ]
        },
    )?;
    let e = t.entries();
    let pr4 = e[0..3].to_vec();
    if t.get(0) > tol.hypothesis {
        let report = conclude("prop_pr4_pr5", tol.conclusion, samples, vec![], vec![pr4]);
        if report.verdict == Verdict::Fail {
            return Ok(report);
        }
        return Ok(CheckReport {
            verdict: Verdict::HypothesisNotMet,
            max_residual: t.get(0),
            ..report
        });
    }
    Ok(conclude(
        "prop_pr4_pr5",
        tol.conclusion,
        samples,
        vec![e[3].clone()],
        vec![pr4, e[4..6].to_vec()],
    ))
}

/// For J-invariant torsion-free `∇`: statistical verdicts of `(∇,G)`, `(∇†,g)`,
/// `(∇,g)`, `(∇*,g)` agree, and `(∇,G)` is statistical iff `(∇*,G)` is.
pub fn verify_statistical_theorems(
    structure: &Structure,
    connection: &ConnectionField,
    samples: &SampleSet,
    tol: impl Into<Tolerance>,
) -> Result<CheckReport> {
    let tol = tol.into();
    let hyp = hypotheses(structure, connection, samples, &["J-invariance", "torsion"], |ctx, c| {
        vec![j_invariance_at(&c.base, &ctx.j, &ctx.point), torsion_norm_at(&c.base, &ctx.point)]
    })?;
    if !hyp.all_within(tol.hypothesis) {
        return Ok(CheckReport::hypothesis_not_met("statistical", tol.conclusion, samples, hyp.entries()));
    }
    let stat = |gamma: &ConnectionJet, rho: &MatrixJet, p: &[f64]| -> f64 {
        torsion_norm_at(gamma, p).max(codazzi_metric_at(gamma, rho, p))
    };
    let t = hypotheses(
        structure,
        connection,
        samples,
        &[
            "(nabla, G) statistical",
            "(nabla+, g) statistical",
            "(nabla, g) statistical",
            "(nabla*, g) statistical",
            "(nabla*, G) statistical",
        ],
        |ctx, c| {
            let p = &ctx.point;
            vec![
                stat(&c.base, &ctx.twin, p),
                stat(&c.dagger, &ctx.g, p),
                stat(&c.base, &ctx.g, p),
                stat(&c.star, &ctx.g, p),
                stat(&c.star, &ctx.twin, p),
            ]
        },
    )?;
    let e = t.entries();
    let mut iff = vec![e[0].clone(), e[4].clone()];
    iff[0].0 = format!("iff: {}", iff[0].0);
    iff[1].0 = format!("iff: {}", iff[1].0);
    Ok(conclude(
        "statistical",
        tol.conclusion,
        samples,
        vec![],
        vec![e[0..4].to_vec(), iff],
    ))
}
