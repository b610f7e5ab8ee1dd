//! Exact Euler calculus over finite cell decompositions and Γ-Euler
//! characteristics of orbit-space groupoids.
//!
//! Everything in this crate is pure, allocation-only code (`no_std` + `alloc`).
//! Spaces arrive pre-decomposed into open cells; an Euler characteristic only
//! depends on the multiset of cell dimensions, so no attaching data is stored.
//!
//! The crate computes Γ-Euler characteristics by three independent routes:
//!
//! * stratum-wise integration of `χ(K\Hom(Γ,K))` over a labelled orbit space
//!   ([`groupoid::OrbitGroupoid::chi_gamma`]),
//! * the Euler characteristic of an explicitly built Γ-inertia complex
//!   ([`translation::lambda_chi`]),
//! * the non-iterative sum over conjugacy classes of homomorphisms
//!   ([`translation::chi_gamma_noniter`]) and its recursive `χ^(ℓ)` relative
//!   ([`translation::chi_order_ell`]).
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod catalog;
pub mod error;
pub mod group;
pub mod groupoid;
pub mod presentation;
pub mod snf;
pub mod space;
pub mod translation;

pub use catalog::IsotropyModel;
pub use error::{Error, Result};
pub use group::{FiniteGroup, HomTuple};
pub use groupoid::OrbitGroupoid;
pub use presentation::Presentation;
pub use space::{Cell, CellMap, CellSpace, ConstructibleFunction};
pub use translation::{InertiaComplex, RigidGComplex};
