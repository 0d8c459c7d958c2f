//! Exact and numerical machinery for continued-fraction dynamics, modular
//! symbols, Schottky uniformization and archimedean L-factors.

pub mod contfrac;
pub mod error;
pub mod lfactor;
pub mod linalg;
pub mod mixmaster;
pub mod modsym;
pub mod qsm;
pub mod schottky;
pub mod special;
pub mod transfer;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
