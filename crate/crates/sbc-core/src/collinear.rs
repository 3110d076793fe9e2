//! The regularized collinear four-body problem with masses `1, m, m, 1`.
//!
//! Bodies sit at `x1 >= x2 >= 0 >= -x2 >= -x1`, symmetric about the center
//! of mass. In the canonical coordinates `q1 = x1 - x2`, `q2 = 2 x2` the
//! Levi-Civita substitution `Q_i^2 = q_i`, `P_i = 2 Q_i p_i` together with
//! the time change `dt/ds = Q1^2 Q2^2` regularizes both the inner binary
//! collision (`Q2 = 0`) and the simultaneous binary collision (`Q1 = 0`).
//! The flow lives on `Gamma = 0` with the energy fixed at `E = -1`.
//!
//! `gamma`, `field` and `linearization` are the checked evaluations of the
//! Hamiltonian, its equations of motion and their analytic linearization
//! `J D^2 Gamma`; the [`RegularizedSystem`] impl provides the unchecked hot
//! path used by the integrator.

use crate::symplectic4::{Mat4, Vec4};
use crate::{ModelError, RegularizedSystem};

/// The energy level of the collinear family.
pub const FIXED_ENERGY: f64 = -1.0;

/// Mass parameter of the `1, m, m, 1` configuration, with the energy pinned
/// to [`FIXED_ENERGY`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollinearParams {
    m: f64,
    energy: f64,
}

impl CollinearParams {
    pub fn new(m: f64) -> Result<Self, ModelError> {
        if !(m > 0.0 && m.is_finite()) {
            return Err(ModelError::Domain(format!("mass ratio m must be positive, got {m}")));
        }
        Ok(CollinearParams {
            m,
            energy: FIXED_ENERGY,
        })
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }
}

fn check_not_collapsed(y: &Vec4) -> Result<(), ModelError> {
    if y[0] == 0.0 && y[1] == 0.0 {
        Err(ModelError::TotalCollapse)
    } else {
        Ok(())
    }
}

/// Extended-phase-space Hamiltonian; identically zero along the orbits.
pub fn gamma(state: &Vec4, p: &CollinearParams) -> Result<f64, ModelError> {
    check_not_collapsed(state)?;
    Ok(p.gamma(state))
}

/// Right-hand side of the regularized equations of motion.
pub fn field(state: &Vec4, p: &CollinearParams) -> Result<Vec4, ModelError> {
    check_not_collapsed(state)?;
    Ok(p.field(state))
}

/// Analytic `J D^2 Gamma` at `state` (the matrix of the variational
/// equations).
pub fn linearization(state: &Vec4, p: &CollinearParams) -> Result<Mat4, ModelError> {
    check_not_collapsed(state)?;
    Ok(p.linearization(state))
}

/// The momentum `P2(0) = 2 m^{3/2}` that puts the inner-collision initial
/// state `(R, 0, 0, P2)` on the `Gamma = 0` surface for every `R > 0`.
pub fn initial_momentum(m: f64) -> f64 {
    2.0 * m.powf(1.5)
}

/// The inner-binary-collision initial state `(R, 0, 0, 2 m^{3/2})`.
pub fn initial_state(r: f64, m: f64) -> Vec4 {
    Vec4::new(r, 0.0, 0.0, initial_momentum(m))
}

/// Positions of the two right-hand bodies and the physical-time weight
/// `dt/ds` recovered from a regularized state. The left-hand bodies sit at
/// `-x2` and `-x1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalPoint {
    pub x1: f64,
    pub x2: f64,
    /// `dt/ds = Q1^2 Q2^2`, the integrand of physical-time recovery.
    pub t_weight: f64,
}

/// Position/time-weight recovery; always defined.
pub fn to_physical(state: &Vec4) -> PhysicalPoint {
    let q1 = state[0] * state[0];
    let q2 = state[1] * state[1];
    PhysicalPoint {
        x1: q1 + q2 / 2.0,
        x2: q2 / 2.0,
        t_weight: q1 * q2,
    }
}

/// Physical momenta `p_i = P_i / (2 Q_i)`; undefined on collisions.
pub fn physical_momenta(state: &Vec4) -> Result<(f64, f64), ModelError> {
    if state[0] == 0.0 {
        return Err(ModelError::CollisionSingularity(1));
    }
    if state[1] == 0.0 {
        return Err(ModelError::CollisionSingularity(2));
    }
    Ok((state[2] / (2.0 * state[0]), state[3] / (2.0 * state[1])))
}

/// Regularized coordinates from physical positions with `x1 > x2 > 0`.
pub fn regularized_positions(x1: f64, x2: f64) -> Result<(f64, f64), ModelError> {
    if !(x1 > x2 && x2 > 0.0) {
        return Err(ModelError::Domain(format!(
            "need x1 > x2 > 0, got x1 = {x1}, x2 = {x2}"
        )));
    }
    Ok(((x1 - x2).sqrt(), (2.0 * x2).sqrt()))
}

/// Conversion from the left-to-right mass parametrization `m1, m2, m2, m1`
/// with `m1 + m2 = 2` to the mass ratio `m = (2 - m1) / m1` of this module.
pub fn sweatman_mass(m1: f64) -> Result<f64, ModelError> {
    if !(m1 > 0.0 && m1 < 2.0) {
        return Err(ModelError::Domain(format!("need 0 < m1 < 2, got {m1}")));
    }
    Ok((2.0 - m1) / m1)
}

impl RegularizedSystem for CollinearParams {
    fn gamma(&self, y: &Vec4) -> f64 {
        let (q1, q2, p1, p2) = (y[0], y[1], y[2], y[3]);
        let m = self.m;
        let a = 1.0 + 1.0 / m;
        let s1 = q1 * q1 + q2 * q2;
        let s2 = 2.0 * q1 * q1 + q2 * q2;
        a / 16.0 * q2 * q2 * p1 * p1
            + (-q1 * q2 * p1 * p2 + q1 * q1 * p2 * p2) / (4.0 * m)
            - m * m * q1 * q1
            - 2.0 * m * q2 * q2
            - 2.0 * m * q1 * q1 * q2 * q2 / s1
            - q1 * q1 * q2 * q2 / s2
            - self.energy * q1 * q1 * q2 * q2
    }

    fn field(&self, y: &Vec4) -> Vec4 {
        let (q1, q2, p1, p2) = (y[0], y[1], y[2], y[3]);
        let m = self.m;
        let e = self.energy;
        let a = 1.0 + 1.0 / m;
        let s1 = q1 * q1 + q2 * q2;
        let s2 = 2.0 * q1 * q1 + q2 * q2;
        let q2_4 = q2 * q2 * q2 * q2;
        let q1_4 = q1 * q1 * q1 * q1;
        Vec4::new(
            q2 / 4.0 * (0.5 * a * q2 * p1 - q1 * p2 / m),
            q1 / (2.0 * m) * (q1 * p2 - 0.5 * q2 * p1),
            p2 / (4.0 * m) * (q2 * p1 - 2.0 * q1 * p2)
                + 2.0 * m * m * q1
                + 4.0 * m * q1 * q2_4 / (s1 * s1)
                + 2.0 * q1 * q2_4 / (s2 * s2)
                + 2.0 * e * q1 * q2 * q2,
            p1 / 4.0 * (q1 * p2 / m - 0.5 * a * q2 * p1)
                + 4.0 * m * q2
                + 4.0 * m * q1_4 * q2 / (s1 * s1)
                + 4.0 * q1_4 * q2 / (s2 * s2)
                + 2.0 * e * q1 * q1 * q2,
        )
    }

    fn linearization(&self, y: &Vec4) -> Mat4 {
        let h = hessian(y, self);
        // J * H with J = [0 I; -I 0]: rows reorder to (h2, h3, -h0, -h1).
        Mat4::from_rows([
            h.0[2],
            h.0[3],
            h.0[0].map(|v| -v),
            h.0[1].map(|v| -v),
        ])
    }
}

/// Analytic Hessian `D^2 Gamma` (symmetric).
pub(crate) fn hessian(y: &Vec4, p: &CollinearParams) -> Mat4 {
    let (q1, q2, p1, p2) = (y[0], y[1], y[2], y[3]);
    let m = p.m;
    let e = p.energy;
    let a = 1.0 + 1.0 / m;
    let s1 = q1 * q1 + q2 * q2;
    let s2 = 2.0 * q1 * q1 + q2 * q2;
    let (s1_3, s2_3) = (s1 * s1 * s1, s2 * s2 * s2);
    let q1_2 = q1 * q1;
    let q2_2 = q2 * q2;
    let (q1_3, q2_3) = (q1_2 * q1, q2_2 * q2);
    let (q1_4, q2_4) = (q1_2 * q1_2, q2_2 * q2_2);

    // second partials of u = Q1^2 Q2^2 / s1 and w = Q1^2 Q2^2 / s2
    let u11 = 2.0 * q2_4 * (q2_2 - 3.0 * q1_2) / s1_3;
    let u12 = 8.0 * q1_3 * q2_3 / s1_3;
    let u22 = 2.0 * q1_4 * (q1_2 - 3.0 * q2_2) / s1_3;
    let w11 = 2.0 * q2_4 * (q2_2 - 6.0 * q1_2) / s2_3;
    let w12 = 16.0 * q1_3 * q2_3 / s2_3;
    let w22 = 4.0 * q1_4 * (2.0 * q1_2 - 3.0 * q2_2) / s2_3;

    let h00 = p2 * p2 / (2.0 * m) - 2.0 * m * m - 2.0 * m * u11 - w11 - 2.0 * e * q2_2;
    let h01 = -p1 * p2 / (4.0 * m) - 2.0 * m * u12 - w12 - 4.0 * e * q1 * q2;
    let h02 = -q2 * p2 / (4.0 * m);
    let h03 = (-q2 * p1 + 4.0 * q1 * p2) / (4.0 * m);
    let h11 = a * p1 * p1 / 8.0 - 4.0 * m - 2.0 * m * u22 - w22 - 2.0 * e * q1_2;
    let h12 = 0.25 * a * q2 * p1 - q1 * p2 / (4.0 * m);
    let h13 = -q1 * p1 / (4.0 * m);
    let h22 = a * q2_2 / 8.0;
    let h23 = -q1 * q2 / (4.0 * m);
    let h33 = q1_2 / (2.0 * m);

    Mat4::from_rows([
        [h00, h01, h02, h03],
        [h01, h11, h12, h13],
        [h02, h12, h22, h23],
        [h03, h13, h23, h33],
    ])
}
