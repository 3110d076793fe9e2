//! Newton shooting for the periodic SBC orbits.
//!
//! Collinear: the time-reversal about the half period forces
//! `Q1(T/4) = 0` and `P2(T/4) = 0` simultaneously, so the orbit is found by
//! one scalar Newton iteration: pick `R`, integrate the inner-collision
//! seed `(R, 0, 0, 2 m^{3/2})` to the first decreasing zero of `Q1` (an
//! event location), and drive `P2` there to zero. The Newton derivative
//! comes from the co-integrated tangent column, with the event-time
//! sensitivity folded in.
//!
//! Planar: the period is prescribed; with the first SBC pinned at
//! `s = T/8`, Newton runs on the two-dimensional map
//! `F(xi, eta) = (Q1(T/8), P2(T/8))` from the symmetric seed
//! `(xi, xi, -eta, eta)`. The energy is eliminated through `Gamma = 0` at
//! every iterate, so the exact Jacobian carries an extra inhomogeneous
//! variational term from `dE/d(xi, eta)`.

use crate::collinear::{self, CollinearParams};
use crate::integrate::{
    integrate, integrate_to_event, EventDirection, IntegrateError, IntegratorConfig,
};
use crate::planar::{self, PlanarParams, PlanarSeed};
use crate::symplectic4::Vec4;
use crate::{ModelError, RegularizedSystem};
use thiserror::Error;

/// Coarse known value of `R(1)`; the default continuation ladder starts
/// here and Newton supplies the remaining digits.
const R1_COARSE: f64 = 2.29559;
/// Coarse `(xi, eta)` seed for the period-8 planar orbit.
const PLANAR_COARSE: (f64, f64) = (1.6, 2.6);

#[derive(Debug, Clone, Error)]
pub enum SolveError {
    #[error("Newton did not converge after {iters} iterations (last residual {residual:e})")]
    NewtonDiverged { iters: usize, residual: f64 },
    #[error("continuation step below minimum near m = {m}")]
    ContinuationStalled { m: f64 },
    #[error("{failed} of {total} continuation points failed")]
    TooManyFailures { failed: usize, total: usize },
    #[error(transparent)]
    Integration(#[from] IntegrateError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Newton/shooting parameters.
#[derive(Debug, Clone)]
pub struct ShootingConfig {
    pub newton_tol: f64,
    pub max_newton_iters: usize,
    /// Use a finite-difference shooting derivative instead of the
    /// variational one (cross-validation path).
    pub fd_jacobian: bool,
    /// Tolerances for the orbit legs of the shooting integrations.
    pub integrator: IntegratorConfig,
}

impl Default for ShootingConfig {
    fn default() -> Self {
        ShootingConfig {
            newton_tol: 1e-11,
            max_newton_iters: 40,
            fd_jacobian: false,
            integrator: IntegratorConfig::orbit(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemKind {
    Collinear,
    Planar,
}

impl std::fmt::Display for SystemKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SystemKind::Collinear => write!(f, "collinear"),
            SystemKind::Planar => write!(f, "planar"),
        }
    }
}

/// A converged periodic SBC orbit.
#[derive(Debug, Clone)]
pub struct PeriodicOrbit {
    pub system: SystemKind,
    /// Mass ratio (collinear only).
    pub mass: Option<f64>,
    /// Total energy: fixed -1 for collinear, determined by the seed for
    /// planar.
    pub energy: f64,
    pub initial_state: Vec4,
    /// `T/4` for collinear, `T/8` for planar.
    pub period_fraction: f64,
    /// Shooting residual norm per Newton iteration, final entry last.
    pub residuals: Vec<f64>,
    /// `|Gamma|` at the initial state.
    pub gamma_residual: f64,
}

impl PeriodicOrbit {
    pub fn full_period(&self) -> f64 {
        match self.system {
            SystemKind::Collinear => 4.0 * self.period_fraction,
            SystemKind::Planar => 8.0 * self.period_fraction,
        }
    }

    pub fn shooting_residual(&self) -> f64 {
        self.residuals.last().copied().unwrap_or(f64::NAN)
    }

    pub fn collinear_params(&self) -> Option<CollinearParams> {
        match self.system {
            SystemKind::Collinear => CollinearParams::new(self.mass?).ok(),
            SystemKind::Planar => None,
        }
    }

    pub fn planar_params(&self) -> Option<PlanarParams> {
        match self.system {
            SystemKind::Planar => PlanarParams::new(self.energy).ok(),
            SystemKind::Collinear => None,
        }
    }

    pub fn planar_seed(&self) -> Option<PlanarSeed> {
        match self.system {
            SystemKind::Planar => {
                PlanarSeed::new(self.initial_state[0], self.initial_state[3] / 4.0).ok()
            }
            SystemKind::Collinear => None,
        }
    }
}

// ---------------------------------------------------------------------------
// Collinear shooting
// ---------------------------------------------------------------------------

struct CollinearShot {
    s_star: f64,
    /// `P2` at the crossing: the shooting residual.
    p2: f64,
    /// `d P2(s*(R)) / dR` including the event-time sensitivity.
    dp2_dr: f64,
}

/// Integrates seed + tangent column (8 dims) to the first decreasing zero
/// of `Q1` and evaluates the shooting function and its derivative.
fn collinear_shot(
    r: f64,
    p: &CollinearParams,
    cfg: &IntegratorConfig,
) -> Result<CollinearShot, SolveError> {
    let mut z0 = [0.0; 8];
    z0[..4].copy_from_slice(&collinear::initial_state(r, p.m()).0);
    z0[4] = 1.0; // d(seed)/dR = e1
    let rhs = |_s: f64, z: &[f64], dz: &mut [f64]| {
        let y = Vec4([z[0], z[1], z[2], z[3]]);
        dz[..4].copy_from_slice(&p.field(&y).0);
        let a = p.linearization(&y);
        for i in 0..4 {
            let mut acc = 0.0;
            for k in 0..4 {
                acc += a[(i, k)] * z[4 + k];
            }
            dz[4 + i] = acc;
        }
    };
    let crossing = integrate_to_event(
        rhs,
        &z0,
        |_s, z| z[0],
        EventDirection::Decreasing,
        60.0,
        cfg,
    )?;
    let y = Vec4([
        crossing.state[0],
        crossing.state[1],
        crossing.state[2],
        crossing.state[3],
    ]);
    let f = p.field(&y);
    let v = &crossing.state[4..8];
    // s*(R) is defined by Q1(s*, R) = 0, so ds*/dR = -v1/Q1' and
    // d/dR P2(s*(R), R) = v4 + P2' ds*/dR.
    let dp2_dr = v[3] - f[3] * v[0] / f[0];
    Ok(CollinearShot {
        s_star: crossing.s,
        p2: y[3],
        dp2_dr,
    })
}

/// Orbit-only shot: `(s*, P2(s*))`.
fn collinear_residual(
    r: f64,
    p: &CollinearParams,
    cfg: &IntegratorConfig,
) -> Result<(f64, f64), SolveError> {
    let y0 = collinear::initial_state(r, p.m());
    let crossing = integrate_to_event(
        |_s, z: &[f64], dz: &mut [f64]| {
            dz.copy_from_slice(&p.field(&Vec4([z[0], z[1], z[2], z[3]])).0);
        },
        &y0.0,
        |_s, z| z[0],
        EventDirection::Decreasing,
        60.0,
        cfg,
    )?;
    Ok((crossing.s, crossing.state[3]))
}

/// Solves for `R(m)`: from the seed `(R, 0, 0, 2 m^{3/2})` the first
/// decreasing zero of `Q1` at `s*` must also have `P2(s*) = 0`; then
/// `T/4 = s*`. Without a guess, a continuation ladder from `m = 1`
/// supplies one.
pub fn solve_collinear(
    m: f64,
    guess_r: Option<f64>,
    cfg: &ShootingConfig,
) -> Result<PeriodicOrbit, SolveError> {
    let p = CollinearParams::new(m)?;
    let r0 = match guess_r {
        Some(r) => r,
        None => {
            if (m - 1.0).abs() < 0.25 {
                R1_COARSE
            } else {
                let anchor = newton_collinear(R1_COARSE, &CollinearParams::new(1.0)?, cfg)?;
                return continue_to(&anchor, m, cfg);
            }
        }
    };
    newton_collinear(r0, &p, cfg)
}

fn newton_collinear(
    r0: f64,
    p: &CollinearParams,
    cfg: &ShootingConfig,
) -> Result<PeriodicOrbit, SolveError> {
    let m = p.m();
    let momentum_scale = collinear::initial_momentum(m).max(1.0);
    let tol = cfg.newton_tol * momentum_scale;
    let mut r = r0;
    let mut residuals = Vec::new();
    for _ in 0..cfg.max_newton_iters {
        let (f, df, s_star) = if cfg.fd_jacobian {
            let (s, f) = collinear_residual(r, p, &cfg.integrator)?;
            let h = 1e-7 * r.abs().max(1.0);
            let (_, fp) = collinear_residual(r + h, p, &cfg.integrator)?;
            let (_, fm) = collinear_residual(r - h, p, &cfg.integrator)?;
            (f, (fp - fm) / (2.0 * h), s)
        } else {
            let shot = collinear_shot(r, p, &cfg.integrator)?;
            (shot.p2, shot.dp2_dr, shot.s_star)
        };
        residuals.push(f.abs());
        if f.abs() < tol {
            let initial_state = collinear::initial_state(r, m);
            let gamma_residual = p.gamma(&initial_state).abs();
            return Ok(PeriodicOrbit {
                system: SystemKind::Collinear,
                mass: Some(m),
                energy: collinear::FIXED_ENERGY,
                initial_state,
                period_fraction: s_star,
                residuals,
                gamma_residual,
            });
        }
        if df == 0.0 || !df.is_finite() {
            break;
        }
        let mut dr = -f / df;
        // damped update: shrink until the residual decreases
        let mut accepted = false;
        for _ in 0..8 {
            let r_try = r + dr;
            if r_try > 0.0 {
                if let Ok((_, f_try)) = collinear_residual(r_try, p, &cfg.integrator) {
                    if f_try.abs() < f.abs() || f.abs() < 1e3 * tol {
                        r = r_try;
                        accepted = true;
                        break;
                    }
                }
            }
            dr *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Err(SolveError::NewtonDiverged {
        iters: residuals.len(),
        residual: residuals.last().copied().unwrap_or(f64::NAN),
    })
}

/// Adaptive continuation from a converged collinear orbit to the target
/// mass. Steps shrink on failure; each Newton run warm-starts from the
/// previous `R`.
pub fn continue_to(
    from: &PeriodicOrbit,
    target_m: f64,
    cfg: &ShootingConfig,
) -> Result<PeriodicOrbit, SolveError> {
    if target_m <= 0.0 || !target_m.is_finite() {
        return Err(
            ModelError::Domain(format!("mass ratio m must be positive, got {target_m}")).into(),
        );
    }
    let mut cur = from.clone();
    loop {
        let m_cur = cur.mass.expect("collinear orbit");
        let gap = target_m - m_cur;
        if gap == 0.0 {
            return Ok(cur);
        }
        // R(m) is close to linear in m, so generous strides work with
        // warm-started Newton; halve on failure.
        let mut step = gap.signum() * gap.abs().min((0.25 * m_cur).max(0.25));
        let mut attempt = 0;
        loop {
            let m_next = if (gap.abs() - step.abs()) < 1e-12 {
                target_m
            } else {
                m_cur + step
            };
            let p = CollinearParams::new(m_next)?;
            match newton_collinear(cur.initial_state[0], &p, cfg) {
                Ok(orbit) => {
                    cur = orbit;
                    break;
                }
                Err(e) => {
                    attempt += 1;
                    step *= 0.5;
                    if attempt > 12 || step.abs() < 1e-6 {
                        return Err(match e {
                            SolveError::NewtonDiverged { .. } => {
                                SolveError::ContinuationStalled { m: m_next }
                            }
                            other => other,
                        });
                    }
                }
            }
        }
    }
}

/// One orbit per grid point, warm-started from the nearest neighbor. The
/// chain is seeded at the grid point closest to `m = 1` and continued
/// outward in both directions. Per-point failures are recorded; the whole
/// scan fails only if more than 10% of points do.
#[allow(clippy::type_complexity)]
pub fn continue_family(
    m_grid: &[f64],
    cfg: &ShootingConfig,
) -> Result<Vec<(f64, Result<PeriodicOrbit, SolveError>)>, SolveError> {
    if m_grid.is_empty() {
        return Ok(Vec::new());
    }
    if m_grid.windows(2).any(|w| w[0] >= w[1]) || m_grid[0] <= 0.0 {
        return Err(
            ModelError::Domain("m grid must be strictly increasing and positive".into()).into(),
        );
    }
    let seed_idx = m_grid
        .iter()
        .enumerate()
        .min_by(|a, b| {
            (a.1 - 1.0)
                .abs()
                .partial_cmp(&(b.1 - 1.0).abs())
                .unwrap()
        })
        .map(|(i, _)| i)
        .unwrap();
    let anchor = solve_collinear(1.0, Some(R1_COARSE), cfg)?;
    let seed_orbit = continue_to(&anchor, m_grid[seed_idx], cfg)?;

    let mut out: Vec<Option<(f64, Result<PeriodicOrbit, SolveError>)>> = vec![None; m_grid.len()];
    for indices in [
        (seed_idx..m_grid.len()).collect::<Vec<_>>(),
        (0..seed_idx).rev().collect::<Vec<_>>(),
    ] {
        let mut last_good = seed_orbit.clone();
        for i in indices {
            let m = m_grid[i];
            let res = continue_to(&last_good, m, cfg);
            if let Ok(ref orbit) = res {
                last_good = orbit.clone();
            }
            out[i] = Some((m, res));
        }
    }

    let rows: Vec<_> = out.into_iter().map(|o| o.unwrap()).collect();
    let failed = rows.iter().filter(|(_, r)| r.is_err()).count();
    if failed * 10 > rows.len() {
        return Err(SolveError::TooManyFailures {
            failed,
            total: rows.len(),
        });
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// Planar shooting
// ---------------------------------------------------------------------------

/// Evaluates `F(xi, eta) = (Q1(s_end), P2(s_end))` from the symmetric seed
/// and, when requested, its exact Jacobian. The seed map is
/// `y0 = (xi, xi, -eta, eta)` with `E = E(xi, eta)` riding along, so each
/// sensitivity column solves the inhomogeneous variational equation
/// `delta' = A delta + (dfield/dE) dE/du`.
fn planar_shot(
    xi: f64,
    eta: f64,
    s_end: f64,
    cfg: &IntegratorConfig,
    want_jacobian: bool,
) -> Result<([f64; 2], [[f64; 2]; 2]), SolveError> {
    let seed = PlanarSeed::new(xi, eta / 4.0)?;
    let energy = planar::energy_from_seed(&seed);
    let p = PlanarParams::new(energy)?;
    // E = (eta^2/8 - 2 sqrt(2) - 1) / xi^2
    let de = [-2.0 * energy / xi, eta / (4.0 * xi * xi)];
    let n = if want_jacobian { 12 } else { 4 };
    let mut z0 = vec![0.0; n];
    z0[..4].copy_from_slice(&seed.state().0);
    if want_jacobian {
        // d(seed)/dxi = (1, 1, 0, 0), d(seed)/deta = (0, 0, -1, 1)
        z0[4] = 1.0;
        z0[5] = 1.0;
        z0[10] = -1.0;
        z0[11] = 1.0;
    }
    let rhs = |_s: f64, z: &[f64], dz: &mut [f64]| {
        let y = Vec4([z[0], z[1], z[2], z[3]]);
        dz[..4].copy_from_slice(&p.field(&y).0);
        if z.len() > 4 {
            let a = p.linearization(&y);
            // dfield/dE
            let ge = [
                0.0,
                0.0,
                2.0 * y[0] * y[1] * y[1],
                2.0 * y[0] * y[0] * y[1],
            ];
            for col in 0..2 {
                for i in 0..4 {
                    let mut acc = ge[i] * de[col];
                    for k in 0..4 {
                        acc += a[(i, k)] * z[4 + 4 * col + k];
                    }
                    dz[4 + 4 * col + i] = acc;
                }
            }
        }
    };
    let z = integrate(rhs, &z0, s_end, cfg)?;
    let f = [z[0], z[3]];
    let mut jac = [[0.0; 2]; 2];
    if want_jacobian {
        jac = [[z[4], z[8]], [z[7], z[11]]];
    }
    Ok((f, jac))
}

/// Solves the planar orbit of prescribed full period: Newton on
/// `F(xi, eta) = (Q1(period/8), P2(period/8))` with the energy recomputed
/// from the seed at every iterate.
pub fn solve_planar(
    period: f64,
    guess: Option<(f64, f64)>,
    cfg: &ShootingConfig,
) -> Result<PeriodicOrbit, SolveError> {
    if !(period > 0.0 && period.is_finite()) {
        return Err(ModelError::Domain(format!("period must be positive, got {period}")).into());
    }
    let s_end = period / 8.0;
    // The scaling family maps the coarse period-8 seed to any period:
    // zeta scales like 1/period, momenta do not scale.
    let (mut xi, mut eta) = guess.unwrap_or((PLANAR_COARSE.0 * 8.0 / period, PLANAR_COARSE.1));
    let mut residuals = Vec::new();
    let scale = eta.abs().max(1.0);
    for _ in 0..cfg.max_newton_iters {
        let (f, jac) = if cfg.fd_jacobian {
            let (f, _) = planar_shot(xi, eta, s_end, &cfg.integrator, false)?;
            let h = 1e-7;
            let (fx, _) = planar_shot(xi + h, eta, s_end, &cfg.integrator, false)?;
            let (fe, _) = planar_shot(xi, eta + h, s_end, &cfg.integrator, false)?;
            (
                f,
                [
                    [(fx[0] - f[0]) / h, (fe[0] - f[0]) / h],
                    [(fx[1] - f[1]) / h, (fe[1] - f[1]) / h],
                ],
            )
        } else {
            planar_shot(xi, eta, s_end, &cfg.integrator, true)?
        };
        let fnorm = f[0].abs().max(f[1].abs());
        residuals.push(fnorm);
        if fnorm < cfg.newton_tol * scale {
            let seed = PlanarSeed::new(xi, eta / 4.0)?;
            let energy = planar::energy_from_seed(&seed);
            let p = PlanarParams::new(energy)?;
            let initial_state = seed.state();
            return Ok(PeriodicOrbit {
                system: SystemKind::Planar,
                mass: None,
                energy,
                initial_state,
                period_fraction: s_end,
                residuals,
                gamma_residual: p.gamma(&initial_state).abs(),
            });
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let mut dxi = -(jac[1][1] * f[0] - jac[0][1] * f[1]) / det;
        let mut deta = -(-jac[1][0] * f[0] + jac[0][0] * f[1]) / det;
        let mut accepted = false;
        for _ in 0..8 {
            let (xt, et) = (xi + dxi, eta + deta);
            if xt > 0.0 && et > 0.0 {
                if let Ok((ft, _)) = planar_shot(xt, et, s_end, &cfg.integrator, false) {
                    let fnt = ft[0].abs().max(ft[1].abs());
                    if fnt < fnorm || fnorm < 1e3 * cfg.newton_tol * scale {
                        xi = xt;
                        eta = et;
                        accepted = true;
                        break;
                    }
                }
            }
            dxi *= 0.5;
            deta *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Err(SolveError::NewtonDiverged {
        iters: residuals.len(),
        residual: residuals.last().copied().unwrap_or(f64::NAN),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Quarter period of the m = 1 collinear orbit, pinned by two
    /// independent integrations (adaptive embedded pair and fixed-step RK4
    /// with endpoint Newton polish).
    const T4_M1: f64 = 0.817343899861952;
    const R1: f64 = 2.295592258717;

    #[test]
    fn collinear_m1_matches_reference() {
        let cfg = ShootingConfig::default();
        let orbit = solve_collinear(1.0, None, &cfg).unwrap();
        let r = orbit.initial_state[0];
        assert!((r - R1).abs() < 1e-9, "R = {r:.13}");
        assert!(
            (orbit.period_fraction - T4_M1).abs() < 1e-9,
            "T/4 = {:.15}",
            orbit.period_fraction
        );
        assert!(orbit.gamma_residual < 1e-10);
        assert!(orbit.shooting_residual() < cfg.newton_tol * 2.0);
    }

    #[test]
    fn collinear_fd_jacobian_agrees() {
        let cfg = ShootingConfig {
            fd_jacobian: true,
            ..Default::default()
        };
        let orbit = solve_collinear(1.0, None, &cfg).unwrap();
        assert!((orbit.initial_state[0] - R1).abs() < 1e-8);
    }

    #[test]
    fn collinear_half_period_reversal_state() {
        // integrating onward to T/2 must land on (-R, 0, 0, -2 m^{3/2})
        let cfg = ShootingConfig::default();
        let orbit = solve_collinear(1.0, None, &cfg).unwrap();
        let p = orbit.collinear_params().unwrap();
        let y = integrate(
            |_s, z: &[f64], dz: &mut [f64]| {
                dz.copy_from_slice(&p.field(&Vec4([z[0], z[1], z[2], z[3]])).0);
            },
            &orbit.initial_state.0,
            2.0 * orbit.period_fraction,
            &cfg.integrator,
        )
        .unwrap();
        let r = orbit.initial_state[0];
        assert!((y[0] + r).abs() < 1e-8, "Q1(T/2) = {}", y[0]);
        assert!(y[1].abs() < 1e-8);
        assert!(y[2].abs() < 1e-7);
        assert!((y[3] + 2.0).abs() < 1e-8, "P2(T/2) = {}", y[3]);
    }

    #[test]
    fn collinear_full_period_closure() {
        let cfg = ShootingConfig::default();
        for m in [0.7, 1.0, 3.5] {
            let orbit = solve_collinear(m, None, &cfg).unwrap();
            let p = orbit.collinear_params().unwrap();
            let y = integrate(
                |_s, z: &[f64], dz: &mut [f64]| {
                    dz.copy_from_slice(&p.field(&Vec4([z[0], z[1], z[2], z[3]])).0);
                },
                &orbit.initial_state.0,
                orbit.full_period(),
                &cfg.integrator,
            )
            .unwrap();
            for i in 0..4 {
                assert!(
                    (y[i] - orbit.initial_state[i]).abs() < 1e-7,
                    "m={m} component {i}: {} vs {}",
                    y[i],
                    orbit.initial_state[i]
                );
            }
        }
    }

    #[test]
    fn newton_quadratic_tail() {
        let cfg = ShootingConfig::default();
        let orbit = solve_collinear(1.0, Some(2.2), &cfg).unwrap();
        let rs = &orbit.residuals;
        assert!(rs.len() >= 2, "history: {rs:?}");
        for w in rs.windows(2) {
            if w[0] < 1e-4 && w[0] > 0.0 && w[1] > 0.0 {
                assert!(w[1] < w[0].powf(1.5), "tail not quadratic: {rs:?}");
            }
        }
    }

    #[test]
    fn continuation_matches_cold_start() {
        let cfg = ShootingConfig::default();
        let grid = [0.99, 1.0, 1.01];
        let rows = continue_family(&grid, &cfg).unwrap();
        let mut rs = Vec::new();
        for (m, res) in &rows {
            let orbit = res.as_ref().unwrap();
            rs.push(orbit.initial_state[0]);
            let cold = solve_collinear(*m, Some(R1_COARSE), &cfg).unwrap();
            assert!((cold.initial_state[0] - orbit.initial_state[0]).abs() < 1e-9);
        }
        assert!((rs[0] - rs[1]).abs() < 0.02 && (rs[1] - rs[2]).abs() < 0.02);
    }

    #[test]
    fn family_of_one_delegates() {
        let cfg = ShootingConfig::default();
        let rows = continue_family(&[1.0], &cfg).unwrap();
        assert_eq!(rows.len(), 1);
        let orbit = rows[0].1.as_ref().unwrap();
        let direct = solve_collinear(1.0, None, &cfg).unwrap();
        assert!((orbit.initial_state[0] - direct.initial_state[0]).abs() < 1e-10);
    }

    #[test]
    fn planar_period8_matches_reference() {
        let cfg = ShootingConfig::default();
        let orbit = solve_planar(8.0, None, &cfg).unwrap();
        let xi = orbit.initial_state[0];
        let eta = orbit.initial_state[3];
        assert!((xi - 1.62047369909693).abs() < 1e-9, "xi = {xi:.14}");
        assert!((eta - 2.57486992651942).abs() < 1e-9, "eta = {eta:.14}");
        assert!(
            (orbit.energy - (-1.142329388)).abs() < 1e-6,
            "E = {}",
            orbit.energy
        );
        assert!(orbit.shooting_residual() < 1e-10);
        assert!(orbit.gamma_residual < 1e-10);
    }

    #[test]
    fn planar_fd_jacobian_agrees() {
        let cfg = ShootingConfig {
            fd_jacobian: true,
            ..Default::default()
        };
        let orbit = solve_planar(8.0, None, &cfg).unwrap();
        assert!((orbit.initial_state[0] - 1.62047369909693).abs() < 1e-8);
    }

    #[test]
    fn planar_quarter_period_state() {
        // gamma(T/4) = (-zeta, zeta, -4 v0, -4 v0)
        let cfg = ShootingConfig::default();
        let orbit = solve_planar(8.0, None, &cfg).unwrap();
        let p = orbit.planar_params().unwrap();
        let y = integrate(
            |_s, z: &[f64], dz: &mut [f64]| {
                dz.copy_from_slice(&p.field(&Vec4([z[0], z[1], z[2], z[3]])).0);
            },
            &orbit.initial_state.0,
            2.0 * orbit.period_fraction,
            &cfg.integrator,
        )
        .unwrap();
        let (zeta, eta) = (orbit.initial_state[0], orbit.initial_state[3]);
        assert!((y[0] + zeta).abs() < 1e-7);
        assert!((y[1] - zeta).abs() < 1e-7);
        assert!((y[2] + eta).abs() < 1e-7);
        assert!((y[3] + eta).abs() < 1e-7);
    }

    #[test]
    fn planar_full_period_closure() {
        let cfg = ShootingConfig::default();
        let orbit = solve_planar(8.0, None, &cfg).unwrap();
        let p = orbit.planar_params().unwrap();
        let y = integrate(
            |_s, z: &[f64], dz: &mut [f64]| {
                dz.copy_from_slice(&p.field(&Vec4([z[0], z[1], z[2], z[3]])).0);
            },
            &orbit.initial_state.0,
            orbit.full_period(),
            &cfg.integrator,
        )
        .unwrap();
        for i in 0..4 {
            assert!(
                (y[i] - orbit.initial_state[i]).abs() < 1e-7,
                "component {i}"
            );
        }
    }

    #[test]
    fn invalid_inputs() {
        let cfg = ShootingConfig::default();
        assert!(solve_collinear(-1.0, None, &cfg).is_err());
        assert!(solve_planar(0.0, None, &cfg).is_err());
        assert!(continue_family(&[2.0, 1.0], &cfg).is_err());
    }
}
