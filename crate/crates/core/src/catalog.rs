//! Built-in structures and seeded random connections.
//!
//! Random fields are polynomials of degree at most 2 with coefficients drawn
//! uniformly from `[-1, 1]`. Linear constraints (symmetry, commuting with a
//! constant `J`, purity) are imposed on the coefficient arrays before the
//! expression trees are built, so equal seeds give identical trees.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::connections::ConnectionField;
use crate::error::{Error, Result};
use crate::expr::{default_coordinate_names, parse_expr, ExprNode};
use crate::geometry::{Chart, ComplexStructureField, MetricField, MetricRole, Structure};
use crate::sampling::SplitMix64;

/// Default polynomial degree of random fields.
pub const RANDOM_DEGREE: u32 = 2;

/// Catalog listing entry.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub dim: usize,
    pub description: &'static str,
    pub anti_kahler: bool,
    pub integrable: bool,
}

pub const ENTRIES: [CatalogEntry; 5] = [
    CatalogEntry {
        name: "flat2",
        dim: 2,
        description: "constant g = diag(1,-1), rotation J, box [-1,1]^2",
        anti_kahler: true,
        integrable: true,
    },
    CatalogEntry {
        name: "flat4",
        dim: 4,
        description: "constant g = diag(1,-1,1,-1), block rotation J, box [-1,1]^4",
        anti_kahler: true,
        integrable: true,
    },
    CatalogEntry {
        name: "holomorphic",
        dim: 2,
        description: "g = [[u,-v],[-v,-u]] from w^2 + 2 = u + iv, box [-0.5,0.5]^2",
        anti_kahler: true,
        integrable: true,
    },
    CatalogEntry {
        name: "noncr",
        dim: 2,
        description: "g = [[u,0],[0,-u]] with u = 1 + x1^2, box [-1,1]^2",
        anti_kahler: false,
        integrable: true,
    },
    CatalogEntry {
        name: "nonintegrableJ",
        dim: 4,
        description: "J = A J0 A^-1 with unipotent polynomial A, g = A^-T g0 A^-1, box [-0.5,0.5]^4",
        anti_kahler: false,
        integrable: false,
    },
];

pub fn list() -> &'static [CatalogEntry] {
    &ENTRIES
}

pub fn by_name(name: &str) -> Result<Structure> {
    match name {
        "flat2" => flat_model(1),
        "flat4" => flat_model(2),
        "holomorphic" => holomorphic_metric_example(),
        "noncr" => non_cr_example(),
        "nonintegrableJ" => nonintegrable_j_example(),
        _ => Err(Error::UnknownStructure(name.to_string())),
    }
}

fn constant_matrix(m: &DMatrix<f64>) -> Vec<Vec<ExprNode>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| ExprNode::Constant(m[(i, j)])).collect())
        .collect()
}

fn parsed(rows: &[&[&str]]) -> Vec<Vec<ExprNode>> {
    let names = default_coordinate_names(rows.len());
    rows.iter()
        .map(|r| r.iter().map(|s| parse_expr(s, &names).expect("catalog expression")).collect())
        .collect()
}

fn neutral_diag(n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(2 * n, 2 * n, |i, j| if i != j { 0.0 } else if i % 2 == 0 { 1.0 } else { -1.0 })
}

/// Dimension `2n`, `J` in rotation blocks, `g` block-diagonal `diag(1,−1)`.
pub fn flat_model(n: usize) -> Result<Structure> {
    let d = 2 * n;
    let g = MetricField::new(constant_matrix(&neutral_diag(n)), MetricRole::PrimaryMetric)?;
    Structure::new(&format!("flat{d}"), Chart::cube(d, -1.0, 1.0)?, g, ComplexStructureField::standard(n)?)
}

/// `g = [[u, −v], [−v, −u]]` with `u + iv = w² + 2`. On `[−0.5, 0.5]²`,
/// `u ≥ 1.75`, so `det g = −(u² + v²) < 0`.
pub fn holomorphic_metric_example() -> Result<Structure> {
    let u = "x1^2 - x2^2 + 2";
    let neg_v = "-(2*x1*x2)";
    let neg_u = "-(x1^2 - x2^2 + 2)";
    let g = MetricField::new(parsed(&[&[u, neg_v], &[neg_v, neg_u]]), MetricRole::PrimaryMetric)?;
    Structure::new(
        "holomorphic",
        Chart::cube(2, -0.5, 0.5)?,
        g,
        ComplexStructureField::standard(1)?,
    )
}

/// `g = [[u, 0], [0, −u]]`, `u = 1 + x1²`: pure and neutral but not anti-Kähler.
pub fn non_cr_example() -> Result<Structure> {
    let g = MetricField::new(
        parsed(&[&["1 + x1^2", "0"], &["0", "-(1 + x1^2)"]]),
        MetricRole::PrimaryMetric,
    )?;
    Structure::new("noncr", Chart::cube(2, -1.0, 1.0)?, g, ComplexStructureField::standard(1)?)
}

type ExprMatrix = Vec<Vec<ExprNode>>;

fn expr_matmul(a: &ExprMatrix, b: &ExprMatrix) -> ExprMatrix {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    ExprNode::sum(
                        (0..n)
                            .map(|k| ExprNode::product(vec![a[i][k].clone(), b[k][j].clone()]))
                            .collect(),
                    )
                })
                .collect()
        })
        .collect()
}

fn expr_transpose(a: &ExprMatrix) -> ExprMatrix {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| a[j][i].clone()).collect()).collect()
}

/// Inverse of `I + L` for strictly lower-triangular `L`: `Σ (−L)^k`.
fn unipotent_inverse(l: &ExprMatrix) -> ExprMatrix {
    let n = l.len();
    let neg: ExprMatrix = l.iter().map(|r| r.iter().map(|e| ExprNode::negate(e.clone())).collect()).collect();
    let identity: ExprMatrix = constant_matrix(&DMatrix::identity(n, n));
    let mut acc = identity.clone();
    let mut power = identity;
    for _ in 1..n {
        power = expr_matmul(&power, &neg);
        acc = acc
            .iter()
            .zip(&power)
            .map(|(r, s)| r.iter().zip(s).map(|(a, b)| ExprNode::sum(vec![a.clone(), b.clone()])).collect())
            .collect();
    }
    acc
}

/// Dimension 4: `J = A J₀ A⁻¹` with `A = I + L`, `L` strictly lower triangular
/// (`L[1][0] = x4`, `L[2][0] = x2`, `L[3][1] = x1·x3`), and `g = A⁻ᵀ g₀ A⁻¹`,
/// which is pure for `J` because `g₀` is pure for `J₀`. `N_J ≠ 0` at generic points.
pub fn nonintegrable_j_example() -> Result<Structure> {
    nonintegrable_from_perturbation(&[(1, 0, "x4"), (2, 0, "x2"), (3, 1, "x1*x3")])
}

/// The conjugated structure for an arbitrary strictly lower-triangular `L`
/// given as `(row, col, expression)` entries.
pub fn nonintegrable_from_perturbation(entries: &[(usize, usize, &str)]) -> Result<Structure> {
    let d = 4;
    let names = default_coordinate_names(d);
    let mut l: ExprMatrix = vec![vec![ExprNode::Constant(0.0); d]; d];
    for &(r, c, e) in entries {
        if r <= c {
            return Err(Error::InvalidInput("perturbation must be strictly lower triangular".into()));
        }
        l[r][c] = parse_expr(e, &names)?;
    }
    let identity = constant_matrix(&DMatrix::identity(d, d));
    let a: ExprMatrix = identity
        .iter()
        .zip(&l)
        .map(|(r, s)| r.iter().zip(s).map(|(x, y)| ExprNode::sum(vec![x.clone(), y.clone()])).collect())
        .collect();
    let a_inv = unipotent_inverse(&l);
    let j0 = constant_matrix(&ComplexStructureField::standard(2)?.value_at(&[0.0; 4])?);
    let g0 = constant_matrix(&neutral_diag(2));
    let j = expr_matmul(&expr_matmul(&a, &j0), &a_inv);
    let g = expr_matmul(&expr_matmul(&expr_transpose(&a_inv), &g0), &a_inv);
    Structure::new(
        "nonintegrableJ",
        Chart::cube(d, -0.5, 0.5)?,
        MetricField::new(g, MetricRole::PrimaryMetric)?,
        ComplexStructureField::new(j)?,
    )
}

// ---- random polynomial fields ----------------------------------------------

/// Exponent vectors of all monomials of total degree `≤ degree` in `dim` variables.
pub fn monomials(dim: usize, degree: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![0; dim]];
    for deg in 1..=degree {
        let mut current = vec![0u32; dim];
        push_degree(&mut out, &mut current, 0, deg);
    }
    out
}

fn push_degree(out: &mut Vec<Vec<u32>>, current: &mut Vec<u32>, var: usize, remaining: u32) {
    if var + 1 == current.len() {
        current[var] = remaining;
        out.push(current.clone());
        current[var] = 0;
        return;
    }
    for e in (0..=remaining).rev() {
        current[var] = e;
        push_degree(out, current, var + 1, remaining - e);
    }
    current[var] = 0;
}

/// A polynomial as coefficients over a fixed monomial basis.
#[derive(Debug, Clone, PartialEq)]
struct Poly(Vec<f64>);

impl Poly {
    fn zero(n: usize) -> Poly {
        Poly(vec![0.0; n])
    }

    fn random(rng: &mut SplitMix64, n: usize) -> Poly {
        Poly((0..n).map(|_| rng.uniform(-1.0, 1.0)).collect())
    }

    fn axpy(&mut self, a: f64, x: &Poly) {
        if a != 0.0 {
            for (s, v) in self.0.iter_mut().zip(&x.0) {
                *s += a * v;
            }
        }
    }

    fn to_expr(&self, basis: &[Vec<u32>]) -> ExprNode {
        let terms = self
            .0
            .iter()
            .zip(basis)
            .filter(|(c, _)| **c != 0.0)
            .map(|(c, exps)| {
                let mut factors = vec![ExprNode::Constant(*c)];
                for (var, &e) in exps.iter().enumerate() {
                    if e > 0 {
                        factors.push(ExprNode::power(ExprNode::Coord(var), e as i32));
                    }
                }
                ExprNode::product(factors)
            })
            .collect();
        ExprNode::sum(terms)
    }
}

/// Flat `d³` array of polynomials indexed `(a, b, c)`.
struct PolyTensor {
    dim: usize,
    basis: Vec<Vec<u32>>,
    data: Vec<Poly>,
}

impl PolyTensor {
    fn random(dim: usize, degree: u32, rng: &mut SplitMix64) -> PolyTensor {
        let basis = monomials(dim, degree);
        let n = basis.len();
        let data = (0..dim * dim * dim).map(|_| Poly::random(rng, n)).collect();
        PolyTensor { dim, basis, data }
    }

    fn zeros_like(&self) -> PolyTensor {
        PolyTensor {
            dim: self.dim,
            basis: self.basis.clone(),
            data: vec![Poly::zero(self.basis.len()); self.data.len()],
        }
    }

    fn idx(&self, a: usize, b: usize, c: usize) -> usize {
        (a * self.dim + b) * self.dim + c
    }

    fn get(&self, a: usize, b: usize, c: usize) -> &Poly {
        &self.data[self.idx(a, b, c)]
    }

    /// `out[a,b,c] = Σ_{perm} data[perm(a,b,c)] / 6`.
    fn symmetrized(&self) -> PolyTensor {
        let mut out = self.zeros_like();
        let d = self.dim;
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    let n = out.idx(a, b, c);
                    for (x, y, z) in [(a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)] {
                        out.data[n].axpy(1.0 / 6.0, self.get(x, y, z));
                    }
                }
            }
        }
        out
    }

    /// Inserts `M` into one covariant slot, e.g. `T(·, M·, ·)` for `slot = 1`.
    fn contract_covariant(&self, slot: usize, m: &DMatrix<f64>) -> PolyTensor {
        let mut out = self.zeros_like();
        let d = self.dim;
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    let n = out.idx(a, b, c);
                    for q in 0..d {
                        let (x, y, z, s) = match slot {
                            0 => (q, b, c, a),
                            1 => (a, q, c, b),
                            _ => (a, b, q, c),
                        };
                        out.data[n].axpy(m[(q, s)], self.get(x, y, z));
                    }
                }
            }
        }
        out
    }

    /// Treats slot 0 as contravariant: `out^a_{bc} = Σ_q M[a][q] T^q_{bc}`.
    fn contract_upper(&self, m: &DMatrix<f64>) -> PolyTensor {
        let mut out = self.zeros_like();
        let d = self.dim;
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    let n = out.idx(a, b, c);
                    for q in 0..d {
                        out.data[n].axpy(m[(a, q)], self.get(q, b, c));
                    }
                }
            }
        }
        out
    }

    fn combine(terms: &[(f64, &PolyTensor)]) -> PolyTensor {
        let mut out = terms[0].1.zeros_like();
        for (w, t) in terms {
            for (o, x) in out.data.iter_mut().zip(&t.data) {
                o.axpy(*w, x);
            }
        }
        out
    }

    fn exprs(&self) -> Vec<ExprNode> {
        self.data.iter().map(|p| p.to_expr(&self.basis)).collect()
    }
}

fn require_dim(dim: usize) -> Result<()> {
    if dim == 0 || dim > crate::jets::MAX_DIM {
        return Err(Error::InvalidInput(format!("unsupported dimension {dim}")));
    }
    Ok(())
}

/// Generic connection: every `Γ^k_{ij}` an independent random polynomial (torsion allowed).
pub fn random_connection(dim: usize, seed: u64, degree: u32) -> Result<ConnectionField> {
    require_dim(dim)?;
    let mut rng = SplitMix64::new(seed);
    ConnectionField::explicit(dim, PolyTensor::random(dim, degree, &mut rng).exprs())
}

/// Random totally symmetric cubic tensor `C`, in `(k, i, j)` order.
pub fn random_symmetric_cubic(dim: usize, seed: u64, degree: u32) -> Result<Vec<ExprNode>> {
    require_dim(dim)?;
    let mut rng = SplitMix64::new(seed);
    Ok(PolyTensor::random(dim, degree, &mut rng).symmetrized().exprs())
}

/// `Γ = LC(ρ) + ρ⁻¹C` with `C` totally symmetric: torsion-free and
/// `∇ρ = −2C`, so `(∇, ρ)` is a Codazzi pair.
pub fn random_codazzi_connection(rho: &MetricField, seed: u64) -> Result<ConnectionField> {
    let cubic = random_symmetric_cubic(rho.dim(), seed, RANDOM_DEGREE)?;
    ConnectionField::levi_civita(rho).with_cubic_perturbation(rho, cubic)
}

fn constant_fields(structure: &Structure) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    if !structure.j().is_constant() || !structure.g().field().is_constant() {
        return Err(Error::InvalidInput(format!(
            "`{}` needs constant g and J for J-invariant constructions",
            structure.name()
        )));
    }
    let origin = vec![0.0; structure.dim()];
    Ok((structure.g().value_at(&origin)?, structure.j().value_at(&origin)?))
}

/// Torsion-free connection with `∇J = 0` on a structure with constant `g`, `J`:
/// a random symmetric `Γ` projected by `(1 + L₁)(1 + L₂)/4`, where
/// `L₁Γ(X,Y) = −JΓ(X,JY)` and `L₂Γ(X,Y) = −JΓ(JX,Y)`.
pub fn random_j_invariant_connection(structure: &Structure, seed: u64) -> Result<ConnectionField> {
    let (_, j) = constant_fields(structure)?;
    let d = structure.dim();
    let mut rng = SplitMix64::new(seed);
    let raw = PolyTensor::random(d, RANDOM_DEGREE, &mut rng);
    // symmetric in the lower pair
    let swapped = {
        let mut t = raw.zeros_like();
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    let n = t.idx(a, b, c);
                    t.data[n] = raw.get(a, c, b).clone();
                }
            }
        }
        t
    };
    let sym = PolyTensor::combine(&[(0.5, &raw), (0.5, &swapped)]);
    let l1 = |t: &PolyTensor| t.contract_covariant(2, &j).contract_upper(&j);
    let l2 = |t: &PolyTensor| t.contract_covariant(1, &j).contract_upper(&j);
    let step = {
        let x = l2(&sym);
        PolyTensor::combine(&[(0.5, &sym), (-0.5, &x)])
    };
    let x = l1(&step);
    let projected = PolyTensor::combine(&[(0.5, &step), (-0.5, &x)]);
    ConnectionField::explicit(d, projected.exprs())
}

/// Totally symmetric pure cubic tensor: projection of a symmetric one by
/// `(1 − A₁ − A₂ − A₃)/4` with `A₁S = S(·,J·,J·)`, `A₂S = S(J·,·,J·)`, `A₃S = S(J·,J·,·)`.
fn random_pure_cubic(j: &DMatrix<f64>, dim: usize, seed: u64) -> PolyTensor {
    let mut rng = SplitMix64::new(seed);
    let s = PolyTensor::random(dim, RANDOM_DEGREE, &mut rng).symmetrized();
    let a1 = s.contract_covariant(1, j).contract_covariant(2, j);
    let a2 = s.contract_covariant(0, j).contract_covariant(2, j);
    let a3 = s.contract_covariant(0, j).contract_covariant(1, j);
    PolyTensor::combine(&[(0.25, &s), (-0.25, &a1), (-0.25, &a2), (-0.25, &a3)])
}

/// `Γ = LC(G) + G⁻¹C` with `C` totally symmetric and pure, on a structure with
/// constant `g`, `J`: torsion-free, J-invariant, and `(∇, G)` Codazzi.
pub fn random_j_invariant_codazzi_connection(structure: &Structure, seed: u64) -> Result<ConnectionField> {
    let (_, j) = constant_fields(structure)?;
    let cubic = random_pure_cubic(&j, structure.dim(), seed).exprs();
    ConnectionField::levi_civita(structure.twin()).with_cubic_perturbation(structure.twin(), cubic)
}
