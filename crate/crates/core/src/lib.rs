//! Dephasing dynamics of adiabatic passage in a tripod four-level system.
//!
//! Three levels of description are provided and cross-checked against each
//! other:
//!
//! * [`liouville`]: the full 4x4 master equation with pure dephasing,
//! * [`effective`]: the reduced dark-state (s, u, v) model,
//! * [`dk`]: closed-form Demkov-Kunike analytics for overlapping Stokes and
//!   control pulses with equal dephasing rates.
//!
//! Units: hbar = 1 and the pulse width `T` sets the time unit.

pub mod analysis;
pub mod dk;
pub mod effective;
pub mod liouville;
pub mod numerics;
pub mod pulses;
pub mod tripod;

pub use num_complex::Complex64 as C64;

/// 4x4 complex matrix in either the bare or the adiabatic basis.
pub type Mat4 = nalgebra::Matrix4<C64>;
/// 4-component complex state vector.
pub type Vec4 = nalgebra::Vector4<C64>;

pub use analysis::{Engine, SweepAxis, SweepResult};
pub use pulses::{DephasingMatrix, MixingAngles, Ordering, PulseConfig};
