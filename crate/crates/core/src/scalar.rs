//! Scalar trait bundles for the univariate polynomial and series code.
//!
//! All arithmetic in this crate is exact; the concrete scalars are
//! `BigInt` and `BigRational` (aliased at the crate root). The code is
//! written against these bundles so a module never has to care which one
//! it is handed.

use num_traits::{One, Zero};
use std::ops::{Div, Neg, Sub};

/// A commutative ring element: cloneable, comparable, with `0`, `1`,
/// addition (via `Zero`), multiplication (via `One`), subtraction and
/// negation.
pub trait RingScalar:
    Clone + PartialEq + Zero + One + Neg<Output = Self> + Sub<Output = Self>
{
}

impl<T> RingScalar for T where
    T: Clone + PartialEq + Zero + One + Neg<Output = Self> + Sub<Output = Self>
{
}

/// A field element: a ring scalar with exact division.
pub trait FieldScalar: RingScalar + Div<Output = Self> {}

impl<T> FieldScalar for T where T: RingScalar + Div<Output = Self> {}
