//! Many-sorted first-order model theory at desk scale: formulas and
//! structures, satisfaction, Ehrenfeucht–Fraïssé style games, a tableau
//! prover built on Hintikka sets, and interpolation.

pub mod structures;
pub mod syntax;
pub mod games;
pub mod interpolation;
pub mod semantics;
pub mod tableau;
