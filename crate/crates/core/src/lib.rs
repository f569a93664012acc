//! Multivariate equicontinuity, sensitivity and rank invariants of
//! substitution and Toeplitz subshifts over ℤ.

pub mod catalog;
pub mod error;
pub mod factor;
pub mod language;
pub mod odometer;
pub mod oracles;
pub mod ranks;
pub mod substitution;
pub mod system;
pub mod toeplitz;
pub mod verify;
pub mod words;

pub use error::{Error, Result};
pub use language::{Corpus, LanguageTable, Subshift};
pub use substitution::Substitution;
pub use system::System;
pub use words::{Alphabet, CenteredWord, DistanceScale, Symbol, Word};
