//! Sparse polynomial algebra and the shared moment-variable dictionary.

mod dictionary;
mod monomial;
mod polynomial;
mod pop;

pub use dictionary::{reduce_monomial, MomentDictionary, ReductionRule, VarReduction};
pub use monomial::{binomial, monomial_basis, Monomial};
pub use polynomial::{Polynomial, COEFF_EPS};
pub use pop::{poly_from_json, poly_to_json, Constraint, PopInstance, Relation, Sense, VarDomain};
