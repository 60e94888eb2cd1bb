//! Max-algebraic models of discrete-event systems.
//!
//! The crate covers three model classes and the constructive translations
//! between them:
//!
//! * [`mpa::MaxPlusAutomaton`]: weighted finite automata over the max-plus
//!   semiring;
//! * [`smpl::SmplSystem`]: switching max-plus linear systems driven by an
//!   event counter;
//! * [`maha::HybridAutomaton`]: max-algebraic hybrid automata with guards,
//!   invariants and identity resets.
//!
//! All three can be abstracted to a [`fa::FiniteAutomaton`], on which the
//! relations of [`equivalence`] (bounded language equality, simulation,
//! bisimulation) run. Arithmetic lives in [`weight`] and [`matrix`];
//! max-min-plus expressions and their conjunctive and matrix forms live in
//! [`expr`], [`conjunctive`] and [`matrix_form`].
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod conjunctive;
pub mod equivalence;
mod error;
pub mod expr;
pub mod fa;
pub mod fixtures;
pub mod maha;
pub mod matrix;
pub mod matrix_form;
pub mod mpa;
pub mod smpl;
pub mod weight;
pub mod word;

pub use error::{Error, Result};
pub use matrix::TropicalMatrix;
pub use weight::Weight;
pub use word::Word;
