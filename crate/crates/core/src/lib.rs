// SPDX-License-Identifier: Apache-2.0

//! 2-isogeny Selmer groups for the twin-prime family
//! `E: y^2 = x(x + εpD)(x + εqD)`.
//!
//! The arithmetic kernel in [`arith`] is generic over any [`arith::IntLike`]
//! integer; everything above it works with the arbitrary-precision aliases
//! [`Int`] and [`Rational`].

pub mod arith;
pub mod error;
pub mod family;
pub mod json;
pub mod localsolve;
pub mod selmer;
pub mod criteria;
pub mod theorems;
pub mod search;
pub mod report;

pub type Int = num_bigint::BigInt;
pub type Rational = num_rational::BigRational;

pub use error::{ArithError, ParamError, SelmerError, SolveError};
pub use family::{DescentKind, Epsilon, FamilyParams, HomogeneousSpace, Place, SquareClass};
