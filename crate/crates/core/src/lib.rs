//! Quasi-normal modes of Kerr–de Sitter black holes.
//!
//! The wave operator separates into a radial part in the tortoise coordinate
//! and a spheroidal-type angular part. Resonances are the frequencies where
//! the two outgoing radial solutions become linearly dependent along an
//! angular eigenvalue branch.

// `!(x > y)` is used deliberately so that NaN fails the test.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod angular;
pub mod coords;
pub mod error;
pub mod greens;
pub mod metric;
pub mod numerics;
pub mod radial;
pub mod resonances;
pub mod series;
pub mod tdwave;
pub mod verify;

pub use error::{Error, Result};
pub use metric::{BlackHoleParams, End, KerrStarProfile};
