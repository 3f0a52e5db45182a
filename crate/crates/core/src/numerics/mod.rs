//! Numerical building blocks shared by the physics modules.

pub mod gamma;
pub mod ode;
pub mod poly;
pub mod quad;
