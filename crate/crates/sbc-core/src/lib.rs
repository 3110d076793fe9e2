//! Periodic simultaneous-binary-collision (SBC) orbits in two regularized
//! four-body problems, and their linear stability.
//!
//! Two systems are covered:
//!
//! * the collinear problem with masses `1, m, m, 1`, regularized by a
//!   Levi-Civita style substitution `q_i = Q_i^2` and fictitious time
//!   `dt/ds = Q1^2 Q2^2` ([`collinear`]);
//! * the planar problem of four equal masses on a symmetric configuration,
//!   regularized the same way ([`planar`]).
//!
//! In both, the SBC orbit is time-reversible and its monodromy matrix
//! factors through a short symmetry-reduced product
//! `W = Lambda * B^{-1} * S * B` built from the fundamental matrix `B`
//! over a quarter (collinear) or eighth (planar) of the period. `W` is the
//! product of two involutions, `(1/2)(W + W^{-1})` is block diagonal, and a
//! single entry `kappa = c2' * (S J c4)` of the 2x2 block decides linear
//! stability. The [`stability`] module implements that reduction; [`orbits`]
//! produces the underlying orbits by Newton shooting on the reversal
//! conditions; [`integrate`] supplies the adaptive Runge-Kutta-Fehlberg 4(5)
//! machinery with event location and variational co-integration.

pub mod collinear;
pub mod integrate;
pub mod orbits;
pub mod output;
pub mod planar;
pub mod stability;
pub mod symplectic4;

pub use symplectic4::{Mat2, Mat4, Vec4};

use thiserror::Error;

/// Errors from evaluating the regularized Hamiltonians and their derived
/// quantities at a concrete phase-space point.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    /// `Q1 = Q2 = 0`: the total-collapse configuration, outside the
    /// regularized domain.
    #[error("total collapse: Q1 = Q2 = 0 is outside the regularized domain")]
    TotalCollapse,
    /// Physical momenta `p_i = P_i / (2 Q_i)` are undefined at a collision
    /// (`Q_i = 0`); regularized quantities remain finite there.
    #[error("collision singularity: physical momentum undefined at Q{0} = 0")]
    CollisionSingularity(usize),
    /// Parameter outside its admissible range.
    #[error("domain error: {0}")]
    Domain(String),
}

/// A regularized Hamiltonian system on the 4-dimensional phase space
/// `(Q1, Q2, P1, P2)`.
///
/// These are the unchecked hot-path evaluations used inside integration
/// loops. Exact total collapse (`Q1 = Q2 = 0`) produces non-finite values,
/// which the integrator rejects; the checked module-level functions return
/// [`ModelError`] instead.
pub trait RegularizedSystem {
    /// Right-hand side of the regularized equations of motion.
    fn field(&self, y: &Vec4) -> Vec4;
    /// The matrix `J D^2 Gamma` of the variational equations along `y`.
    fn linearization(&self, y: &Vec4) -> Mat4;
    /// The extended-phase-space Hamiltonian; identically zero on orbits.
    fn gamma(&self, y: &Vec4) -> f64;
}
