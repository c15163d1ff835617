//! Symbolic and numerical toolkit for conservation laws of
//! diffusion-convection equations `u_t = div(A(u)_x)` and their adjoint
//! pairs.

pub mod catalog;
pub mod conslaw;
pub mod expr;
pub mod jet;
pub mod noether;
pub mod numeric;
pub mod par;
pub mod system;
pub mod transform;
