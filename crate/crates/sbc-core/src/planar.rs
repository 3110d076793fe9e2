//! The regularized planar four-body problem with equal masses on a
//! two-fold symmetric configuration.
//!
//! If body 1 sits at `(x1, x2)` the remaining bodies sit at `(x2, x1)`,
//! `(-x1, -x2)` and `(-x2, -x1)`. In the coordinates `q1 = x1 - x2`,
//! `q2 = x1 + x2` the same Levi-Civita substitution and time change as in
//! the collinear problem regularize the two families of simultaneous binary
//! collisions (`Q1 = 0` pairs bodies 1-2 and 3-4; `Q2 = 0` the other
//! pairing). The energy `E` stays free: scaling `(zeta, s) -> (eps zeta,
//! eps s)` with `E -> eps^{-2} E` maps SBC orbits to SBC orbits, so one
//! solved orbit generates the whole family.

use crate::symplectic4::{Mat4, Vec4};
use crate::{ModelError, RegularizedSystem};

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Free total energy of the planar system (negative for the SBC orbits).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarParams {
    energy: f64,
}

impl PlanarParams {
    pub fn new(energy: f64) -> Result<Self, ModelError> {
        if !energy.is_finite() {
            return Err(ModelError::Domain(format!("energy must be finite, got {energy}")));
        }
        Ok(PlanarParams { energy })
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }
}

/// The symmetric initial condition `Q1(0) = Q2(0) = zeta`,
/// `-P1(0) = P2(0) = 4 v0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarSeed {
    pub zeta: f64,
    pub v0: f64,
}

impl PlanarSeed {
    pub fn new(zeta: f64, v0: f64) -> Result<Self, ModelError> {
        if !(zeta > 0.0 && v0 > 0.0 && zeta.is_finite() && v0.is_finite()) {
            return Err(ModelError::Domain(format!(
                "need zeta > 0 and v0 > 0, got zeta = {zeta}, v0 = {v0}"
            )));
        }
        Ok(PlanarSeed { zeta, v0 })
    }

    pub fn state(&self) -> Vec4 {
        Vec4::new(self.zeta, self.zeta, -4.0 * self.v0, 4.0 * self.v0)
    }
}

/// The energy forced by `Gamma = 0` at the seed:
/// `E = (2 v0^2 - 2 sqrt(2) - 1) / zeta^2`.
pub fn energy_from_seed(seed: &PlanarSeed) -> f64 {
    (2.0 * seed.v0 * seed.v0 - 2.0 * SQRT2 - 1.0) / (seed.zeta * seed.zeta)
}

fn check_not_collapsed(y: &Vec4) -> Result<(), ModelError> {
    if y[0] == 0.0 && y[1] == 0.0 {
        Err(ModelError::TotalCollapse)
    } else {
        Ok(())
    }
}

pub fn gamma(state: &Vec4, p: &PlanarParams) -> Result<f64, ModelError> {
    check_not_collapsed(state)?;
    Ok(p.gamma(state))
}

pub fn field(state: &Vec4, p: &PlanarParams) -> Result<Vec4, ModelError> {
    check_not_collapsed(state)?;
    Ok(p.field(state))
}

pub fn linearization(state: &Vec4, p: &PlanarParams) -> Result<Mat4, ModelError> {
    check_not_collapsed(state)?;
    Ok(p.linearization(state))
}

/// The coordinate/time/energy scaling that maps one SBC orbit to another:
/// `zeta -> eps zeta` (momenta unchanged), `E -> eps^{-2} E`,
/// `period -> eps^{-1} period`.
pub fn scale_orbit(seed: &PlanarSeed, energy: f64, period: f64, eps: f64) -> (PlanarSeed, f64, f64) {
    let scaled = PlanarSeed {
        zeta: eps * seed.zeta,
        v0: seed.v0,
    };
    (scaled, energy / (eps * eps), period / eps)
}

/// Position of body 1 and the physical-time weight. The other bodies sit at
/// `(x2, x1)`, `(-x1, -x2)`, `(-x2, -x1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalPoint {
    pub x1: f64,
    pub x2: f64,
    pub t_weight: f64,
}

pub fn to_physical(state: &Vec4) -> PhysicalPoint {
    let q1 = state[0] * state[0];
    let q2 = state[1] * state[1];
    PhysicalPoint {
        x1: (q1 + q2) / 2.0,
        x2: (q2 - q1) / 2.0,
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

impl RegularizedSystem for PlanarParams {
    fn gamma(&self, y: &Vec4) -> f64 {
        let (q1, q2, p1, p2) = (y[0], y[1], y[2], y[3]);
        let r = q1.powi(4) + q2.powi(4);
        (p1 * p1 * q2 * q2 + p2 * p2 * q1 * q1) / 16.0
            - SQRT2 * (q1 * q1 + q2 * q2)
            - SQRT2 * q1 * q1 * q2 * q2 / r.sqrt()
            - self.energy * q1 * q1 * q2 * q2
    }

    fn field(&self, y: &Vec4) -> Vec4 {
        let (q1, q2, p1, p2) = (y[0], y[1], y[2], y[3]);
        let e = self.energy;
        let r = q1.powi(4) + q2.powi(4);
        let sr = r.sqrt();
        let r32 = r * sr;
        Vec4::new(
            p1 * q2 * q2 / 8.0,
            p2 * q1 * q1 / 8.0,
            -p2 * p2 * q1 / 8.0
                + 2.0 * SQRT2 * q1
                + 2.0 * SQRT2 * q1 * q2 * q2 / sr
                - 2.0 * SQRT2 * q1.powi(5) * q2 * q2 / r32
                + 2.0 * e * q1 * q2 * q2,
            -p1 * p1 * q2 / 8.0
                + 2.0 * SQRT2 * q2
                + 2.0 * SQRT2 * q2 * q1 * q1 / sr
                - 2.0 * SQRT2 * q2.powi(5) * q1 * q1 / r32
                + 2.0 * e * q2 * q1 * q1,
        )
    }

    fn linearization(&self, y: &Vec4) -> Mat4 {
        let h = hessian(y, self);
        Mat4::from_rows([
            h.0[2],
            h.0[3],
            h.0[0].map(|v| -v),
            h.0[1].map(|v| -v),
        ])
    }
}

/// Analytic Hessian `D^2 Gamma` for the planar Hamiltonian. The
/// `(Q1^4 + Q2^4)^{-3/2}` and `^{-5/2}` partials carry the derivation
/// weight; they are pinned by finite-difference and symbolic spot tests.
pub(crate) fn hessian(y: &Vec4, p: &PlanarParams) -> Mat4 {
    let (q1, q2, p1, p2) = (y[0], y[1], y[2], y[3]);
    let e = p.energy;
    let r = q1.powi(4) + q2.powi(4);
    let r12 = r.sqrt();
    let r32 = r * r12;
    let r52 = r * r32;

    // g = Q1^2 Q2^2 (Q1^4 + Q2^4)^{-1/2}
    let g11 = 2.0 * q2 * q2 / r12 - 14.0 * q1.powi(4) * q2 * q2 / r32
        + 12.0 * q1.powi(8) * q2 * q2 / r52;
    let g12 = 4.0 * q1 * q2 / r12
        - 4.0 * q1 * q2.powi(5) / r32
        - 4.0 * q1.powi(5) * q2 / r32
        + 12.0 * q1.powi(5) * q2.powi(5) / r52;
    let g22 = 2.0 * q1 * q1 / r12 - 14.0 * q2.powi(4) * q1 * q1 / r32
        + 12.0 * q2.powi(8) * q1 * q1 / r52;

    let h00 = p2 * p2 / 8.0 - 2.0 * SQRT2 - SQRT2 * g11 - 2.0 * e * q2 * q2;
    let h01 = -SQRT2 * g12 - 4.0 * e * q1 * q2;
    let h03 = p2 * q1 / 4.0;
    let h11 = p1 * p1 / 8.0 - 2.0 * SQRT2 - SQRT2 * g22 - 2.0 * e * q1 * q1;
    let h12 = p1 * q2 / 4.0;
    let h22 = q2 * q2 / 8.0;
    let h33 = q1 * q1 / 8.0;

    Mat4::from_rows([
        [h00, h01, 0.0, h03],
        [h01, h11, h12, 0.0],
        [0.0, h12, h22, 0.0],
        [h03, 0.0, 0.0, h33],
    ])
}
