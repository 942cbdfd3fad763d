//! TOML manifold description files.
//!
//! ```toml
//! name = "example"            # optional
//!
//! [chart]
//! dimension = 2
//! names = ["x", "y"]          # optional, default x1..xd
//! box = [[-1, 1], [-1, 1]]    # optional, default [-1, 1] per axis
//!
//! [metric]                    # full rows, or lower triangle only
//! components = [["1 + x^2"], ["0", "-(1 + x^2)"]]
//!
//! [complex_structure]         # J^i_j in row i, column j
//! components = [["0", "-1"], ["1", "0"]]
//!
//! [connection]                # optional; Γ^k_{ij} in (k, i, j) order
//! coefficients = ["0", "0", "0", "0", "0", "0", "0", "0"]
//! ```
//!
//! Components may be strings (parsed with the chart's coordinate names) or numbers.

use std::path::Path;

use serde::Deserialize;

use crate::connections::ConnectionField;
use crate::error::{Error, Result};
use crate::expr::{parse_expr, ExprNode};
use crate::geometry::{Chart, ComplexStructureField, MetricField, MetricRole, Structure};

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Component {
    Number(f64),
    Text(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    name: Option<String>,
    chart: RawChart,
    metric: RawMatrix,
    complex_structure: RawMatrix,
    connection: Option<RawConnection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChart {
    dimension: usize,
    names: Option<Vec<String>>,
    #[serde(rename = "box")]
    bounds: Option<Vec<(f64, f64)>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMatrix {
    components: Vec<Vec<Component>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConnection {
    coefficients: Vec<Component>,
}

/// A parsed manifold file: the structure and, if given, an explicit connection.
#[derive(Debug, Clone)]
pub struct ManifoldSpec {
    pub structure: Structure,
    pub connection: Option<ConnectionField>,
}

impl ManifoldSpec {
    /// The file's connection, or the Levi-Civita connection of `g`.
    pub fn connection_or_default(&self) -> ConnectionField {
        self.connection
            .clone()
            .unwrap_or_else(|| ConnectionField::levi_civita(self.structure.g()))
    }
}

fn component(c: &Component, names: &[String], at: &str) -> Result<ExprNode> {
    match c {
        Component::Number(v) => Ok(ExprNode::Constant(*v)),
        Component::Text(s) => {
            parse_expr(s, names).map_err(|e| Error::ManifoldFile(format!("{at}: `{s}`: {e}")))
        }
    }
}

fn matrix(raw: &RawMatrix, dim: usize, names: &[String], section: &str, symmetric: bool) -> Result<Vec<Vec<ExprNode>>> {
    let rows = &raw.components;
    if rows.len() != dim {
        return Err(Error::ManifoldFile(format!("[{section}] needs {dim} rows, found {}", rows.len())));
    }
    let lower = symmetric && rows.iter().enumerate().all(|(i, r)| r.len() == i + 1);
    if !lower && rows.iter().any(|r| r.len() != dim) {
        return Err(Error::ManifoldFile(format!(
            "[{section}] rows must all have {dim} entries{}",
            if symmetric { " (or form a lower triangle)" } else { "" }
        )));
    }
    let mut out = vec![vec![ExprNode::Constant(0.0); dim]; dim];
    for (i, row) in rows.iter().enumerate() {
        for (j, c) in row.iter().enumerate() {
            let e = component(c, names, &format!("[{section}] ({}, {})", i + 1, j + 1))?;
            if lower {
                out[j][i] = e.clone();
            }
            out[i][j] = e;
        }
    }
    Ok(out)
}

/// Parses a manifold description from TOML text.
pub fn parse_manifold(text: &str) -> Result<ManifoldSpec> {
    let raw: RawFile = toml::from_str(text).map_err(|e| Error::ManifoldFile(e.to_string()))?;
    let dim = raw.chart.dimension;
    let bounds = raw.chart.bounds.unwrap_or_else(|| vec![(-1.0, 1.0); dim]);
    let chart = Chart::new(dim, raw.chart.names, bounds)?;
    let names = chart.names().to_vec();
    let g = MetricField::new(matrix(&raw.metric, dim, &names, "metric", true)?, MetricRole::PrimaryMetric)?;
    let j = ComplexStructureField::new(matrix(&raw.complex_structure, dim, &names, "complex_structure", false)?)?;
    let connection = match raw.connection {
        None => None,
        Some(c) => {
            if c.coefficients.len() != dim * dim * dim {
                return Err(Error::ManifoldFile(format!(
                    "[connection] needs {} coefficients, found {}",
                    dim * dim * dim,
                    c.coefficients.len()
                )));
            }
            let exprs = c
                .coefficients
                .iter()
                .enumerate()
                .map(|(n, c)| {
                    let (k, i, j) = (n / (dim * dim), (n / dim) % dim, n % dim);
                    component(c, &names, &format!("[connection] Gamma^{}_{}{}", k + 1, i + 1, j + 1))
                })
                .collect::<Result<Vec<_>>>()?;
            Some(ConnectionField::explicit(dim, exprs)?)
        }
    };
    let structure = Structure::new(raw.name.as_deref().unwrap_or("file"), chart, g, j)?;
    Ok(ManifoldSpec { structure, connection })
}

pub fn load_manifold(path: &Path) -> Result<ManifoldSpec> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::ManifoldFile(format!("cannot read {}: {e}", path.display())))?;
    parse_manifold(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    const NONCR: &str = r#"
name = "noncr-file"
[chart]
dimension = 2
names = ["x", "y"]
box = [[-1, 1], [-1, 1]]
[metric]
components = [["1 + x^2"], [0, "-(1 + x^2)"]]
[complex_structure]
components = [["0", "-1"], ["1", "0"]]
"#;

    #[test]
    fn lower_triangle_is_mirrored() {
        let spec = parse_manifold(NONCR).unwrap();
        assert_eq!(spec.structure.name(), "noncr-file");
        let g = spec.structure.g().value_at(&[1.0, 0.0]).unwrap();
        assert_eq!(g[(0, 0)], 2.0);
        assert_eq!(g[(1, 1)], -2.0);
        assert!(spec.connection.is_none());
    }

    #[test]
    fn explicit_connection_order() {
        let text = format!(
            "{NONCR}\n[connection]\ncoefficients = [\"x\", 0, 0, 0, 0, 0, 0, 2]\n"
        );
        let spec = parse_manifold(&text).unwrap();
        let jet = spec.connection.unwrap().jet_at(&[0.5, 0.0]).unwrap();
        assert_eq!(jet.value(0, 0, 0), 0.5);
        assert_eq!(jet.value(1, 1, 1), 2.0);
    }

    #[test]
    fn diagnostics() {
        assert!(matches!(parse_manifold("[chart]\ndimension = 2\n"), Err(Error::ManifoldFile(_))));
        let bad = NONCR.replace("\"1 + x^2\"]", "\"1 + z\"]");
        let err = parse_manifold(&bad).unwrap_err();
        assert!(err.to_string().contains("(1, 1)"), "{err}");
        let odd = NONCR.replace("dimension = 2", "dimension = 3");
        assert!(parse_manifold(&odd).is_err());
    }
}
