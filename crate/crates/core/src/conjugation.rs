//! g-, G- and J-conjugation of connections and the Klein-group table.

use crate::connections::{j_conjugate_jet, metric_conjugate_jet, ConnectionField, ConnectionJet};
use crate::error::{Error, Result};
use crate::geometry::{ComplexStructureField, MetricField, PointContext, Structure};
use crate::jets::MatrixJet;
use crate::report::{CheckReport, Residual};
use crate::sampling::SampleSet;

/// `∇*`, defined by `Z g(X,Y) = g(∇_Z X, Y) + g(X, ∇*_Z Y)`.
pub fn g_conjugate(connection: &ConnectionField, g: &MetricField) -> Result<ConnectionField> {
    same_dim(connection, g.dim())?;
    Ok(connection.metric_conjugate(g))
}

/// `∇†`, the conjugate with respect to the twin metric `G`.
pub fn twin_conjugate(connection: &ConnectionField, twin: &MetricField) -> Result<ConnectionField> {
    same_dim(connection, twin.dim())?;
    Ok(connection.metric_conjugate(twin))
}

/// `∇ᴶ_X Y = J⁻¹ ∇_X (JY)`.
pub fn j_conjugate(connection: &ConnectionField, j: &ComplexStructureField) -> Result<ConnectionField> {
    same_dim(connection, j.dim())?;
    Ok(connection.j_conjugate(j))
}

fn same_dim(connection: &ConnectionField, dim: usize) -> Result<()> {
    if connection.dim() != dim {
        return Err(Error::InvalidInput(format!(
            "connection has dimension {} but the field has {dim}",
            connection.dim()
        )));
    }
    Ok(())
}

/// `∂_k ρ_{ij} − Γ^l_{ki} ρ_{lj} − Γ*^l_{kj} ρ_{il}`, which vanishes iff
/// `conj` is the ρ-conjugate of `gamma`.
pub fn defining_identity_residual(gamma: &ConnectionJet, conj: &ConnectionJet, rho: &MatrixJet) -> f64 {
    let d = gamma.dim();
    let mut r = Residual::new();
    for k in 0..d {
        for i in 0..d {
            for j in 0..d {
                let mut v = rho.get(i, j).d(k);
                for l in 0..d {
                    v -= gamma.value(l, k, i) * rho.get(l, j).value() + conj.value(l, k, j) * rho.get(i, l).value();
                }
                r.record(v.abs());
            }
        }
    }
    r.value()
}

/// A connection together with its three conjugates at one point.
#[derive(Debug, Clone)]
pub struct Conjugates {
    pub base: ConnectionJet,
    pub star: ConnectionJet,
    pub dagger: ConnectionJet,
    pub j: ConnectionJet,
}

impl Conjugates {
    pub fn at(gamma: ConnectionJet, ctx: &PointContext) -> Conjugates {
        Conjugates {
            star: star(&gamma, ctx),
            dagger: dagger(&gamma, ctx),
            j: j_conjugate_jet(&gamma, &ctx.j),
            base: gamma,
        }
    }
}

pub fn star(gamma: &ConnectionJet, ctx: &PointContext) -> ConnectionJet {
    metric_conjugate_jet(gamma, &ctx.g, &ctx.g_inv)
}

pub fn dagger(gamma: &ConnectionJet, ctx: &PointContext) -> ConnectionJet {
    metric_conjugate_jet(gamma, &ctx.twin, &ctx.twin_inv)
}

/// Compares values and first derivatives of two connection jets.
pub fn compare_connections(r: &mut Residual, a: &ConnectionJet, b: &ConnectionJet) {
    r.compare(&a.values(), &b.values());
    r.compare(&a.derivatives(), &b.derivatives());
}

/// Names of the identities reported by [`verify_klein_group`], grouped by row.
pub const KLEIN_IDENTITIES: [(&str, &str); 10] = [
    ("i", "(nabla*)* = nabla"),
    ("i", "(nabla+)+ = nabla"),
    ("i", "(nablaJ)J = nabla"),
    ("ii", "(nabla+)J = nabla*"),
    ("ii", "(nablaJ)+ = nabla*"),
    ("iii", "(nabla*)J = nabla+"),
    ("iii", "(nablaJ)* = nabla+"),
    ("iv", "(nabla*)+ = nablaJ"),
    ("iv", "(nabla+)* = nablaJ"),
    ("closure", "((nabla*)+)J = nabla"),
];

/// All ten identity residuals at one point, in [`KLEIN_IDENTITIES`] order.
pub fn klein_residuals_at(gamma: ConnectionJet, ctx: &PointContext) -> [f64; 10] {
    let c = Conjugates::at(gamma, ctx);
    let jconj = |x: &ConnectionJet| j_conjugate_jet(x, &ctx.j);
    let star_dagger = dagger(&c.star, ctx);
    let pairs: [(ConnectionJet, &ConnectionJet); 10] = [
        (star(&c.star, ctx), &c.base),
        (dagger(&c.dagger, ctx), &c.base),
        (jconj(&c.j), &c.base),
        (jconj(&c.dagger), &c.star),
        (dagger(&c.j, ctx), &c.star),
        (jconj(&c.star), &c.dagger),
        (star(&c.j, ctx), &c.dagger),
        (star_dagger.clone(), &c.j),
        (star(&c.dagger, ctx), &c.j),
        (jconj(&star_dagger), &c.base),
    ];
    pairs.map(|(a, b)| {
        let mut r = Residual::new();
        compare_connections(&mut r, &a, b);
        r.value()
    })
}

/// Coefficientwise check of the Klein-group table for `{id, *, †, J}`.
/// The breakdown has one entry per row plus one per identity.
pub fn verify_klein_group(
    structure: &Structure,
    connection: &ConnectionField,
    samples: &SampleSet,
    tol: f64,
) -> Result<CheckReport> {
    same_dim(connection, structure.dim())?;
    let mut per = [Residual::new(); 10];
    for p in samples.iter() {
        let ctx = structure.context_at(p)?;
        let res = klein_residuals_at(connection.jet_at(p)?, &ctx);
        for (acc, r) in per.iter_mut().zip(res) {
            acc.record(r);
        }
    }
    let mut breakdown = Vec::new();
    for row in ["i", "ii", "iii", "iv", "closure"] {
        let mut r = Residual::new();
        for (n, (rname, _)) in KLEIN_IDENTITIES.iter().enumerate() {
            if *rname == row {
                r.record(per[n].value());
            }
        }
        breakdown.push((format!("row {row}"), r.value()));
    }
    for (n, (_, name)) in KLEIN_IDENTITIES.iter().enumerate() {
        breakdown.push((name.to_string(), per[n].value()));
    }
    Ok(CheckReport::from_residuals("klein_group", tol, samples, breakdown))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connections::Provenance;
    use crate::expr::ExprNode;
    use crate::geometry::{Chart, MetricRole};

    fn flat() -> Structure {
        let g = MetricField::new(
            vec![
                vec![ExprNode::Constant(1.0), ExprNode::Constant(0.0)],
                vec![ExprNode::Constant(0.0), ExprNode::Constant(-1.0)],
            ],
            MetricRole::PrimaryMetric,
        )
        .unwrap();
        Structure::new("flat", Chart::cube(2, -1.0, 1.0).unwrap(), g, ComplexStructureField::standard(1).unwrap()).unwrap()
    }

    #[test]
    fn single_entry_conjugate_by_hand() {
        let s = flat();
        let mut c = vec![ExprNode::Constant(0.0); 8];
        c[0] = ExprNode::Constant(1.0);
        let conn = ConnectionField::explicit(2, c).unwrap();
        let star = g_conjugate(&conn, s.g()).unwrap();
        assert_eq!(star.provenance(), Provenance::MetricConjugate(MetricRole::PrimaryMetric));
        let p = [0.2, 0.3];
        let v = star.jet_at(&p).unwrap().values();
        assert_eq!(v[0], -1.0);
        assert!(v[1..].iter().all(|x| *x == 0.0));
        let ctx = s.context_at(&p).unwrap();
        let r = defining_identity_residual(&conn.jet_at(&p).unwrap(), &star.jet_at(&p).unwrap(), &ctx.g);
        assert!(r <= 1e-15);
    }

    #[test]
    fn levi_civita_is_self_conjugate() {
        let s = flat();
        let lc = ConnectionField::levi_civita(s.g());
        let star = g_conjugate(&lc, s.g()).unwrap();
        let p = [0.1, -0.6];
        assert_eq!(lc.jet_at(&p).unwrap(), star.jet_at(&p).unwrap());
    }

    #[test]
    fn zero_connection_table_is_trivial() {
        let s = flat();
        let samples = s.sample(5, 1).unwrap();
        let r = verify_klein_group(&s, &ConnectionField::zero(2).unwrap(), &samples, 1e-12).unwrap();
        assert!(r.passed());
        assert_eq!(r.max_residual, 0.0);
        assert_eq!(r.breakdown.len(), 15);
    }
}
