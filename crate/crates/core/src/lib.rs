//! Exact norm-Euclidean division in the rings of integers of Q(ζ15), Q(ζ20),
//! Q(ζ24) and Q(√3, √5, √−1).
//!
//! Each ring is an E8 lattice under a trace form, so the quotient of `a` by
//! `b` can be taken to be the lattice point closest to `a/b`. The remainder
//! then satisfies `|N(r)| ≤ (Δ_K/4096)·|N(b)| < |N(b)|`.
//!
//! ```
//! use normeuclid::{euclid, numberfield::{field, FieldId, RingElement}};
//! use normeuclid::exactalg::Vec8Z;
//!
//! let f = field(FieldId::Zeta15);
//! let a = RingElement::new(FieldId::Zeta15, Vec8Z::from_i64([9, -4, 7, 1, 0, 3, -8, 2]));
//! let b = RingElement::new(FieldId::Zeta15, Vec8Z::from_i64([2, 1, 0, -1, 0, 0, 1, 0]));
//! let d = euclid::divide(&a, &b).unwrap();
//! assert_eq!(f.mul_ring(&b, &d.quotient).unwrap().add(&d.remainder).unwrap(), a);
//! assert!(d.norm_ratio() <= f.norm_bound());
//! ```

pub mod analysis;
pub mod cli;
pub mod e8;
pub mod error;
pub mod euclid;
pub mod exactalg;
pub mod numberfield;

pub use error::{Error, Result};
pub use rug::{Integer, Rational};
