//! Fixtures shared by the benchmarks under `benches/`.

use norden::catalog::{self, RANDOM_DEGREE};
use norden::{ConnectionField, Result, SampleSet, Structure};

/// (check id, catalog structure) pairs that are benchmarked.
pub const CASES: [(&str, &str); 5] = [
    ("klein_group", "flat4"),
    ("theorem2", "nonintegrableJ"),
    ("gc4", "nonintegrableJ"),
    ("prop31", "holomorphic"),
    ("statistical", "flat4"),
];

/// Structure, a connection meeting the check's hypotheses, and 10 sample points.
pub fn fixture(id: &str, structure: &str) -> Result<(Structure, ConnectionField, SampleSet)> {
    let s = catalog::by_name(structure)?;
    let conn = match id {
        "prop31" => catalog::random_codazzi_connection(s.twin(), 3)?,
        "statistical" => catalog::random_j_invariant_codazzi_connection(&s, 3)?,
        "gc4" => ConnectionField::levi_civita(s.g()),
        _ => catalog::random_connection(s.dim(), 3, RANDOM_DEGREE)?,
    };
    let samples = s.sample(10, 7)?;
    Ok((s, conn, samples))
}
