//! Named checks and the full verification matrix.

use std::fmt;
use std::str::FromStr;

use crate::catalog;
use crate::checkers::{self, Tolerance};
use crate::conjugation::verify_klein_group;
use crate::connections::ConnectionField;
use crate::curvature::verify_theorem2;
use crate::error::{Error, Result};
use crate::geometry::{check_almost_complex, check_purity, Structure};
use crate::operators::{verify_cubic_duality, verify_gc4};
use crate::report::{worst, Breakdown, CheckReport, Verdict};
use crate::sampling::{derive_seed, SampleSet};

/// Stable check identifiers, sorted.
pub const CHECK_IDS: [&str; 15] = [
    "almost_complex",
    "anti_kahler",
    "antikahler_iff",
    "corollary_torsions",
    "cubic_duality",
    "gc4",
    "klein_group",
    "prop31",
    "prop32",
    "prop_dagger_J",
    "prop_pr3",
    "prop_pr4_pr5",
    "purity",
    "statistical",
    "theorem2",
];

pub const DEFAULT_POINTS: usize = 50;
pub const DEFAULT_SEED: u64 = 42;
/// Seeds per (check, structure, generator) cell of the verification matrix.
pub const SEEDS_PER_CELL: u64 = 20;

pub fn is_check_id(id: &str) -> bool {
    CHECK_IDS.contains(&id)
}

/// Whether a check reads the connection at all.
pub fn uses_connection(id: &str) -> bool {
    !matches!(id, "almost_complex" | "anti_kahler" | "gc4" | "purity")
}

/// Runs one named check.
pub fn run_check(
    id: &str,
    structure: &Structure,
    connection: &ConnectionField,
    samples: &SampleSet,
    tol: Tolerance,
) -> Result<CheckReport> {
    let t = tol.conclusion;
    match id {
        "purity" => check_purity(structure.g(), structure.j(), samples, t),
        "almost_complex" => check_almost_complex(structure.j(), samples, t),
        "anti_kahler" => checkers::check_anti_kahler(structure, samples, t),
        "gc4" => verify_gc4(structure, samples, t),
        "klein_group" => verify_klein_group(structure, connection, samples, t),
        "theorem2" => verify_theorem2(structure, connection, samples, t),
        "cubic_duality" => verify_cubic_duality(structure, connection, samples, t),
        "prop31" => checkers::verify_prop31(structure, connection, samples, tol),
        "prop32" => checkers::verify_prop32(structure, connection, samples, tol),
        "corollary_torsions" => checkers::verify_corollary_torsions(structure, connection, samples, tol),
        "prop_dagger_J" => checkers::verify_prop_dagger_j(structure, connection, samples, tol),
        "prop_pr3" => checkers::verify_prop_pr3(structure, connection, samples, tol),
        "antikahler_iff" => checkers::verify_antikahler_iff(structure, connection, samples, tol),
        "prop_pr4_pr5" => checkers::verify_prop_pr4_pr5(structure, connection, samples, tol),
        "statistical" => checkers::verify_statistical_theorems(structure, connection, samples, tol),
        other => Err(Error::UnknownCheck(other.to_string())),
    }
}

/// Runs several checks; reports come back sorted by check name.
pub fn run_checks(
    ids: &[String],
    structure: &Structure,
    connection: &ConnectionField,
    samples: &SampleSet,
    tol: Tolerance,
) -> Result<Vec<CheckReport>> {
    if let Some(bad) = ids.iter().find(|id| !is_check_id(id)) {
        return Err(Error::UnknownCheck(bad.clone()));
    }
    let mut sorted: Vec<&String> = ids.iter().collect();
    sorted.sort();
    sorted.dedup();
    sorted
        .into_iter()
        .map(|id| run_check(id, structure, connection, samples, tol))
        .collect()
}

/// How to obtain the connection for a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    LeviCivita,
    LeviCivitaTwin,
    Zero,
    Random,
    Codazzi,
    JInvariant,
    JInvariantCodazzi,
}

impl Generator {
    pub const ALL: [Generator; 7] = [
        Generator::LeviCivita,
        Generator::LeviCivitaTwin,
        Generator::Zero,
        Generator::Random,
        Generator::Codazzi,
        Generator::JInvariant,
        Generator::JInvariantCodazzi,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Generator::LeviCivita => "levi-civita",
            Generator::LeviCivitaTwin => "levi-civita-twin",
            Generator::Zero => "zero",
            Generator::Random => "random",
            Generator::Codazzi => "codazzi",
            Generator::JInvariant => "j-invariant",
            Generator::JInvariantCodazzi => "j-invariant-codazzi",
        }
    }

    /// Builds the connection; seeded generators use `seed`.
    pub fn build(self, structure: &Structure, seed: u64) -> Result<ConnectionField> {
        match self {
            Generator::LeviCivita => Ok(ConnectionField::levi_civita(structure.g())),
            Generator::LeviCivitaTwin => Ok(ConnectionField::levi_civita(structure.twin())),
            Generator::Zero => ConnectionField::zero(structure.dim()),
            Generator::Random => catalog::random_connection(structure.dim(), seed, catalog::RANDOM_DEGREE),
            Generator::Codazzi => catalog::random_codazzi_connection(structure.twin(), seed),
            Generator::JInvariant => catalog::random_j_invariant_connection(structure, seed),
            Generator::JInvariantCodazzi => catalog::random_j_invariant_codazzi_connection(structure, seed),
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Generator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Generator> {
        Generator::ALL
            .into_iter()
            .find(|g| g.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown connection generator `{s}`")))
    }
}

/// One cell of the verification matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub structure: &'static str,
    pub generator: Generator,
    pub expected: Verdict,
}

const fn cell(structure: &'static str, generator: Generator, expected: Verdict) -> Cell {
    Cell {
        structure,
        generator,
        expected,
    }
}

const ALL_STRUCTURES: [&str; 5] = ["flat2", "flat4", "holomorphic", "noncr", "nonintegrableJ"];

/// Cells run for a check, including negative controls.
pub fn plan(id: &str) -> Vec<Cell> {
    use Generator::*;
    use Verdict::*;
    let every = |g: Generator, v: Verdict| ALL_STRUCTURES.iter().map(|s| cell(s, g, v)).collect::<Vec<_>>();
    let mut cells = match id {
        "purity" | "almost_complex" | "gc4" => every(LeviCivita, Pass),
        "anti_kahler" => vec![
            cell("flat2", LeviCivita, Pass),
            cell("flat4", LeviCivita, Pass),
            cell("holomorphic", LeviCivita, Pass),
            cell("noncr", LeviCivita, Fail),
            cell("nonintegrableJ", LeviCivita, Fail),
        ],
        "klein_group" | "theorem2" | "cubic_duality" => every(Random, Pass),
        "prop31" | "prop_dagger_J" => {
            let mut c = every(Codazzi, Pass);
            c.extend(every(Random, HypothesisNotMet));
            c
        }
        // no hypotheses: the equivalence must also hold (all false) on generic connections
        "prop32" => {
            let mut c = every(Codazzi, Pass);
            c.extend(every(Random, Pass));
            c
        }
        "corollary_torsions" => vec![
            cell("flat2", JInvariantCodazzi, Pass),
            cell("flat4", JInvariantCodazzi, Pass),
            cell("holomorphic", LeviCivitaTwin, Pass),
            cell("flat2", Random, HypothesisNotMet),
            cell("flat4", Random, HypothesisNotMet),
            cell("holomorphic", Random, HypothesisNotMet),
        ],
        "prop_pr3" | "antikahler_iff" => vec![
            cell("flat2", JInvariant, Pass),
            cell("flat4", JInvariant, Pass),
            cell("holomorphic", LeviCivita, Pass),
            cell("noncr", Zero, Pass),
            cell("flat2", Random, HypothesisNotMet),
            cell("flat4", Random, HypothesisNotMet),
            cell("holomorphic", Random, HypothesisNotMet),
            cell("noncr", Random, HypothesisNotMet),
            cell("nonintegrableJ", LeviCivita, HypothesisNotMet),
        ],
        "prop_pr4_pr5" => vec![
            cell("flat2", JInvariant, Pass),
            cell("flat4", JInvariant, Pass),
            cell("flat4", JInvariantCodazzi, Pass),
            cell("holomorphic", LeviCivita, Pass),
            cell("flat2", Random, HypothesisNotMet),
            cell("flat4", Random, HypothesisNotMet),
            cell("holomorphic", Random, HypothesisNotMet),
            cell("noncr", Random, HypothesisNotMet),
            cell("nonintegrableJ", Random, HypothesisNotMet),
        ],
        "statistical" => vec![
            cell("flat2", JInvariantCodazzi, Pass),
            cell("flat4", JInvariantCodazzi, Pass),
            cell("flat2", JInvariant, Pass),
            cell("flat4", JInvariant, Pass),
            cell("holomorphic", LeviCivita, Pass),
            cell("flat2", Random, HypothesisNotMet),
            cell("flat4", Random, HypothesisNotMet),
            cell("holomorphic", Random, HypothesisNotMet),
        ],
        _ => vec![],
    };
    cells.sort_by_key(|c| (c.structure, c.generator.name(), c.expected.as_str()));
    cells.dedup();
    cells
}

/// Outcome of running one cell over all its seeds.
#[derive(Debug, Clone, PartialEq)]
pub struct CellOutcome {
    pub cell: Cell,
    pub runs: usize,
    pub matched: usize,
    pub worst_residual: f64,
}

/// Runs one cell for `SEEDS_PER_CELL` derived seeds.
pub fn run_cell(id: &str, c: Cell, seed: u64, points: usize, tol: Tolerance) -> Result<CellOutcome> {
    let structure = catalog::by_name(c.structure)?;
    // unseeded generators still see fresh sample points per run
    let runs = SEEDS_PER_CELL;
    let mut matched = 0;
    let mut worst_residual = 0.0f64;
    for n in 0..runs {
        let run_seed = derive_seed(seed, n);
        let samples = structure.sample(points, derive_seed(run_seed, 1))?;
        let connection = c.generator.build(&structure, derive_seed(run_seed, 2))?;
        let report = run_check(id, &structure, &connection, &samples, tol)?;
        if report.verdict == c.expected {
            matched += 1;
        }
        // residuals of hypothesis-not-met runs measure the hypotheses, not the identity
        if c.expected == Verdict::Pass {
            worst_residual = worst(worst_residual, report.max_residual);
        }
    }
    Ok(CellOutcome {
        cell: c,
        runs: runs as usize,
        matched,
        worst_residual,
    })
}

/// The full matrix: one summary report per check id, sorted by id.
pub fn verify_paper(seed: u64, points: usize, tol: Tolerance) -> Result<Vec<CheckReport>> {
    CHECK_IDS.iter().map(|id| verify_one(id, seed, points, tol)).collect()
}

/// The verification-matrix summary for a single check.
pub fn verify_one(id: &str, seed: u64, points: usize, tol: Tolerance) -> Result<CheckReport> {
    if !is_check_id(id) {
        return Err(Error::UnknownCheck(id.to_string()));
    }
    let mut all_matched = true;
    let mut max_residual = 0.0f64;
    let mut breakdown = Vec::new();
    for c in plan(id) {
        let out = run_cell(id, c, seed, points, tol)?;
        all_matched &= out.matched == out.runs;
        max_residual = worst(max_residual, out.worst_residual);
        breakdown.push(Breakdown {
            name: format!(
                "{} / {}: expected {} ({}/{})",
                c.structure,
                c.generator,
                c.expected.as_str(),
                out.matched,
                out.runs
            ),
            residual: out.worst_residual,
        });
    }
    let verdict = if all_matched && max_residual <= tol.conclusion {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(CheckReport {
        check: id.to_string(),
        verdict,
        max_residual,
        tolerance: tol.conclusion,
        points,
        seed,
        breakdown,
    })
}
