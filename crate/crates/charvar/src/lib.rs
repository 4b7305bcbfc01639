//! Exact computation of virtual classes (E-polynomials) of parabolic
//! SL(2,C)-representation and character varieties over closed orientable
//! surfaces, with an independent finite-field point-counting oracle.

pub mod cli;
pub mod eigen;
pub mod ffcount;
pub mod formulas;
pub mod interpolate;
pub mod kring;
pub mod operators;
pub mod wmodule;
