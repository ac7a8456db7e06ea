//! Numerical building blocks: ODE integration, quadrature, special
//! functions and interpolation.

pub mod gamma;
pub mod interp;
pub mod ode;
pub mod quad;
