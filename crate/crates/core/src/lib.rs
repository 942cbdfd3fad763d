//! Tensor calculus on almost anti-Hermitian (Norden) manifolds and numerical
//! verification of identities between conjugate connections, curvature,
//! Tachibana and Nijenhuis operators.
//!
//! Fields are given by symbolic expressions in chart coordinates. Everything
//! downstream is evaluated pointwise through forward-mode jets, so derived
//! quantities (Christoffel symbols, conjugate connections, curvature) carry
//! exact derivatives up to rounding.

pub mod error;
pub mod expr;
pub mod jets;
pub mod report;
pub mod sampling;
pub mod tensor;
pub mod geometry;
pub mod connections;
pub mod conjugation;
pub mod curvature;
pub mod operators;
pub mod checkers;
pub mod catalog;
pub mod manifold_file;
pub mod suite;

pub use error::{Error, Result};
pub use expr::{parse_expr, EvalError, ExprNode, Func, ParseError};
pub use geometry::{Chart, ComplexStructureField, MetricField, MetricRole, PointContext, Structure};
pub use connections::{ConnectionField, ConnectionJet, Provenance};
pub use report::{CheckReport, Verdict, DEFAULT_TOLERANCE};
pub use sampling::{SampleSet, SplitMix64};
pub use tensor::TensorValue;
pub use checkers::Tolerance;
pub use manifold_file::{load_manifold, parse_manifold, ManifoldSpec};
