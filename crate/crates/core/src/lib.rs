//! Decoherence functionals, trajectory graphs and structural checks for
//! finite families of quantum histories.

pub mod cli;
pub mod document;
pub mod histories;
pub mod numerics;
pub mod random;
pub mod spin;
pub mod theorems;
pub mod trajectory;
