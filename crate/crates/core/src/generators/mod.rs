//! Instance generators for the hardness constructions: a one-dimensional
//! choice gadget, a weighted reduction from partitioned subgraph isomorphism
//! and an unweighted reduction from (E3,E5)-SAT. Each comes with builders for
//! the intended solutions, so the gadget properties can be checked directly.

mod choice;
mod psi;
mod sat;

pub use choice::*;
pub use psi::*;
pub use sat::*;

use serde::Serializer;

use crate::geometry::{format_rational, Rational};

pub(crate) fn serialize_rational<S: Serializer>(
    r: &Rational,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(r))
}
