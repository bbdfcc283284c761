// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("{0} is not an odd prime")]
    NotOddPrime(String),
    #[error("valuation of zero is infinite")]
    ZeroValuation,
    #[error("{value} is not a unit at {prime}")]
    NotUnit { value: String, prime: String },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParamError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("({p}, {q}) is not a twin prime pair")]
    NotTwin { p: String, q: String },
    #[error("D needs at least one prime factor")]
    EmptyD,
    #[error("prime factor {0} of D is repeated")]
    RepeatedPrime(String),
    #[error("prime factor {0} of D collides with 2, p or q")]
    ForbiddenPrime(String),
    #[error("{0} primes in D exceed the supported maximum of {max}", max = crate::family::MAX_PRIMES)]
    TooManyPrimes(usize),
    #[error("{0} has a prime factor outside S")]
    OutsideS(String),
    #[error("epsilon must be +1 or -1, got {0}")]
    BadEpsilon(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error("local search at {place} undecided after depth {depth} (cap {cap})")]
    Undecided { place: String, depth: u32, cap: u32 },
    #[error("prime {0} is too large for residue enumeration")]
    PrimeTooLarge(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SelmerError {
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("n = {n} exceeds the configured cap {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("computed {kind} set is not a subgroup of Q(S,2)")]
    NotAGroup { kind: String },
}
