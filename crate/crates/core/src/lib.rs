//! Dirac bound states in double ring-shaped Kratzer and oscillator
//! potentials under exact spin and pseudospin symmetry.

pub mod aim;
pub mod cli;
pub mod model;
pub mod nonrel;
pub mod oracle;
pub mod specfun;
pub mod spectrum;
pub mod wavefun;
