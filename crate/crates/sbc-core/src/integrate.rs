//! Adaptive embedded Runge-Kutta-Fehlberg 4(5) integration for the 4- and
//! (4+16)-dimensional systems of this crate, with dense event location and
//! variational co-integration.
//!
//! The stepper propagates the 5th-order solution with the classic Fehlberg
//! error estimate and a standard embedded-pair step controller. Dense output
//! is cubic Hermite over each accepted step (endpoint values and
//! derivatives), which is enough for 4th-order event bracketing; the located
//! event is then re-integrated and Newton-polished on the true flow so the
//! returned event state carries integration accuracy, not interpolation
//! accuracy.

use crate::symplectic4::{constant, Constant, Mat4, Vec4};
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum IntegrateError {
    /// The controller demanded a step smaller than `h_min`; the usual cause
    /// is an approach to a flow singularity (total collapse `Q1 = Q2 = 0`).
    #[error("step size underflow at s = {s}: required step below h_min")]
    StepUnderflow { s: f64 },
    #[error("maximum number of steps exceeded")]
    MaxStepsExceeded,
    #[error("no event crossing found before s = {s_max}")]
    NoEventFound { s_max: f64 },
    #[error("event function already zero at the initial state")]
    EventAtStart,
    #[error("non-finite state at s = {s}")]
    NonFiniteState { s: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// Step-control parameters for the embedded pair.
#[derive(Debug, Clone)]
pub struct IntegratorConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Initial step in fictitious-time units.
    pub h_init: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl IntegratorConfig {
    /// Tolerances for orbit refinement (shooting, closure checks).
    pub fn orbit() -> Self {
        IntegratorConfig {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            h_init: 1e-3,
            h_min: 1e-14,
            h_max: 0.5,
            max_steps: 2_000_000,
        }
    }

    /// Tolerances for variational (orbit + fundamental matrix) runs.
    pub fn variational() -> Self {
        IntegratorConfig {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            ..Self::orbit()
        }
    }

    fn validate(&self, y0: &[f64]) -> Result<(), IntegrateError> {
        if !(self.h_min > 0.0 && self.h_min <= self.h_init && self.h_init <= self.h_max) {
            return Err(IntegrateError::InvalidInput(
                "need 0 < h_min <= h_init <= h_max".into(),
            ));
        }
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0 && self.max_steps > 0) {
            return Err(IntegrateError::InvalidInput(
                "tolerances and max_steps must be positive".into(),
            ));
        }
        if y0.iter().any(|v| !v.is_finite()) {
            return Err(IntegrateError::InvalidInput(
                "initial state must be finite".into(),
            ));
        }
        Ok(())
    }
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self::orbit()
    }
}

// Fehlberg 4(5) tableau.
const C: [f64; 6] = [0.0, 0.25, 3.0 / 8.0, 12.0 / 13.0, 1.0, 0.5];
const A: [[f64; 5]; 6] = [
    [0.0, 0.0, 0.0, 0.0, 0.0],
    [0.25, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 32.0, 9.0 / 32.0, 0.0, 0.0, 0.0],
    [1932.0 / 2197.0, -7200.0 / 2197.0, 7296.0 / 2197.0, 0.0, 0.0],
    [439.0 / 216.0, -8.0, 3680.0 / 513.0, -845.0 / 4104.0, 0.0],
    [-8.0 / 27.0, 2.0, -3544.0 / 2565.0, 1859.0 / 4104.0, -11.0 / 40.0],
];
// 5th-order weights (propagated) and the 5th-minus-4th error weights.
const B5: [f64; 6] = [
    16.0 / 135.0,
    0.0,
    6656.0 / 12825.0,
    28561.0 / 56430.0,
    -9.0 / 50.0,
    2.0 / 55.0,
];
const BERR: [f64; 6] = [
    16.0 / 135.0 - 25.0 / 216.0,
    0.0,
    6656.0 / 12825.0 - 1408.0 / 2565.0,
    28561.0 / 56430.0 - 2197.0 / 4104.0,
    -9.0 / 50.0 + 1.0 / 5.0,
    2.0 / 55.0,
];

struct Stepper {
    n: usize,
    k: [Vec<f64>; 6],
    y_tmp: Vec<f64>,
    y_next: Vec<f64>,
}

impl Stepper {
    fn new(n: usize) -> Self {
        Stepper {
            n,
            k: std::array::from_fn(|_| vec![0.0; n]),
            y_tmp: vec![0.0; n],
            y_next: vec![0.0; n],
        }
    }

    /// One trial step from `(s, y)` with the derivative `dy = f(s, y)`
    /// already in `self.k[0]`. Fills `y_next` with the 5th-order result and
    /// returns the scaled error norm (accept iff <= 1, NaN-safe).
    fn trial<F>(&mut self, f: &mut F, s: f64, y: &[f64], h: f64, cfg: &IntegratorConfig) -> f64
    where
        F: FnMut(f64, &[f64], &mut [f64]),
    {
        let n = self.n;
        for stage in 1..6 {
            for i in 0..n {
                let mut acc = 0.0;
                for (j, a) in A[stage][..stage].iter().enumerate() {
                    acc += a * self.k[j][i];
                }
                self.y_tmp[i] = y[i] + h * acc;
            }
            let (head, tail) = self.k.split_at_mut(stage);
            let _ = head;
            f(s + C[stage] * h, &self.y_tmp, &mut tail[0]);
        }
        let mut err: f64 = 0.0;
        for i in 0..n {
            let mut acc5 = 0.0;
            let mut acce = 0.0;
            for stage in 0..6 {
                acc5 += B5[stage] * self.k[stage][i];
                acce += BERR[stage] * self.k[stage][i];
            }
            self.y_next[i] = y[i] + h * acc5;
            let scale = cfg.abs_tol + cfg.rel_tol * self.y_next[i].abs().max(y[i].abs());
            let e = (h * acce).abs() / scale;
            if !e.is_finite() || !self.y_next[i].is_finite() {
                return f64::INFINITY;
            }
            err = err.max(e);
        }
        err
    }
}

/// One accepted step, with endpoint derivatives for Hermite interpolation.
struct AcceptedStep<'a> {
    s0: f64,
    s1: f64,
    y0: &'a [f64],
    y1: &'a [f64],
    dy0: &'a [f64],
    dy1: &'a [f64],
}

/// Cubic Hermite interpolation on one step.
fn hermite(step_s0: f64, step_s1: f64, y0: &[f64], dy0: &[f64], y1: &[f64], dy1: &[f64], s: f64, out: &mut [f64]) {
    let h = step_s1 - step_s0;
    let t = (s - step_s0) / h;
    let t2 = t * t;
    let t3 = t2 * t;
    let h00 = 1.0 - 3.0 * t2 + 2.0 * t3;
    let h10 = t - 2.0 * t2 + t3;
    let h01 = 3.0 * t2 - 2.0 * t3;
    let h11 = t3 - t2;
    for i in 0..out.len() {
        out[i] = h00 * y0[i] + h10 * h * dy0[i] + h01 * y1[i] + h11 * h * dy1[i];
    }
}

/// Core driver: integrates from 0 to `s_end`, invoking `on_accept` after
/// every accepted step. Returning `false` from the callback stops the run
/// early (used by event location).
fn drive<F, C2>(
    f: &mut F,
    y0: &[f64],
    s_end: f64,
    cfg: &IntegratorConfig,
    mut on_accept: C2,
) -> Result<Vec<f64>, IntegrateError>
where
    F: FnMut(f64, &[f64], &mut [f64]),
    C2: FnMut(&AcceptedStep) -> bool,
{
    cfg.validate(y0)?;
    if s_end < 0.0 {
        return Err(IntegrateError::InvalidInput("s_end must be >= 0".into()));
    }
    let n = y0.len();
    let mut st = Stepper::new(n);
    let mut y = y0.to_vec();
    let mut dy = vec![0.0; n];
    let mut s = 0.0;
    let snap = 1e-15 * s_end.abs().max(1.0);
    if s_end <= snap {
        return Ok(y);
    }
    f(0.0, &y, &mut dy);
    if dy.iter().any(|v| !v.is_finite()) {
        return Err(IntegrateError::NonFiniteState { s: 0.0 });
    }
    let mut h = cfg.h_init.min(s_end);
    for _ in 0..cfg.max_steps {
        if s_end - s <= snap {
            return Ok(y);
        }
        let clamped = h >= s_end - s;
        if clamped {
            h = s_end - s;
        }
        st.k[0].copy_from_slice(&dy);
        let err = st.trial(f, s, &y, h, cfg);
        if err <= 1.0 {
            let s1 = if clamped { s_end } else { s + h };
            f(s1, &st.y_next, &mut st.k[0]);
            let keep_going = on_accept(&AcceptedStep {
                s0: s,
                s1,
                y0: &y,
                y1: &st.y_next,
                dy0: &dy,
                dy1: &st.k[0],
            });
            y.copy_from_slice(&st.y_next);
            dy.copy_from_slice(&st.k[0]);
            s = s1;
            if !keep_going {
                return Ok(y);
            }
        }
        // controller update (shared by accept and reject)
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h = (h * factor).min(cfg.h_max);
        if h < cfg.h_min {
            return Err(IntegrateError::StepUnderflow { s });
        }
    }
    Err(IntegrateError::MaxStepsExceeded)
}

/// Integrates `y' = f(s, y)` from `y0` at `s = 0` to exactly `s = s_end`
/// (the last step is clamped).
pub fn integrate<F>(mut f: F, y0: &[f64], s_end: f64, cfg: &IntegratorConfig) -> Result<Vec<f64>, IntegrateError>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    drive(&mut f, y0, s_end, cfg, |_| true)
}

// ---------------------------------------------------------------------------
// Trajectory recording
// ---------------------------------------------------------------------------

/// One recorded sample of a trajectory.
#[derive(Debug, Clone)]
pub struct TrajectoryPoint {
    pub s: f64,
    pub state: Vec<f64>,
    pub derivative: Vec<f64>,
}

/// The accepted-step skeleton of one integration, strictly increasing in
/// `s`, with endpoint derivatives retained for dense interpolation.
#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    samples: Vec<TrajectoryPoint>,
}

impl Trajectory {
    pub fn samples(&self) -> &[TrajectoryPoint] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn s_end(&self) -> f64 {
        self.samples.last().map_or(0.0, |p| p.s)
    }

    pub fn last_state(&self) -> &[f64] {
        &self.samples.last().expect("non-empty trajectory").state
    }

    /// Dense evaluation by cubic Hermite interpolation on the bracketing
    /// accepted step; `s` is clamped to the recorded range.
    pub fn sample_at(&self, s: f64) -> Vec<f64> {
        let pts = &self.samples;
        assert!(!pts.is_empty(), "empty trajectory");
        if s <= pts[0].s {
            return pts[0].state.clone();
        }
        if s >= pts[pts.len() - 1].s {
            return pts[pts.len() - 1].state.clone();
        }
        let hi = pts.partition_point(|p| p.s < s);
        let (a, b) = (&pts[hi - 1], &pts[hi]);
        let mut out = vec![0.0; a.state.len()];
        hermite(a.s, b.s, &a.state, &a.derivative, &b.state, &b.derivative, s, &mut out);
        out
    }
}

/// Like [`integrate`] but records every accepted step.
pub fn integrate_trajectory<F>(
    mut f: F,
    y0: &[f64],
    s_end: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory, IntegrateError>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let mut traj = Trajectory::default();
    let mut dy0 = vec![0.0; y0.len()];
    f(0.0, y0, &mut dy0);
    traj.samples.push(TrajectoryPoint {
        s: 0.0,
        state: y0.to_vec(),
        derivative: dy0,
    });
    drive(&mut f, y0, s_end, cfg, |step| {
        traj.samples.push(TrajectoryPoint {
            s: step.s1,
            state: step.y1.to_vec(),
            derivative: step.dy1.to_vec(),
        });
        true
    })?;
    Ok(traj)
}

/// Integrates through an increasing list of checkpoints, returning the
/// state at each. Endpoint clamping makes every checkpoint exact.
pub fn integrate_checkpoints<F>(
    mut f: F,
    y0: &[f64],
    s_points: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Vec<Vec<f64>>, IntegrateError>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let mut out = Vec::with_capacity(s_points.len());
    let mut y = y0.to_vec();
    let mut s_prev = 0.0;
    for &s in s_points {
        if s < s_prev {
            return Err(IntegrateError::InvalidInput(
                "checkpoints must be non-decreasing and >= 0".into(),
            ));
        }
        y = integrate(&mut f, &y, s - s_prev, cfg)?;
        s_prev = s;
        out.push(y.clone());
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Event location
// ---------------------------------------------------------------------------

/// Which sign changes of the event function trigger a crossing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventDirection {
    /// event goes from positive to non-positive
    Decreasing,
    /// event goes from negative to non-negative
    Increasing,
    Any,
}

/// A located event crossing.
#[derive(Debug, Clone)]
pub struct EventCrossing {
    pub s: f64,
    pub state: Vec<f64>,
    /// Event function value at the returned state.
    pub event_value: f64,
    /// Width of the final bracketing interval in `s`.
    pub bracket_width: f64,
}

struct Bracket {
    s0: f64,
    s1: f64,
    y0: Vec<f64>,
    y1: Vec<f64>,
    dy0: Vec<f64>,
    dy1: Vec<f64>,
    g0: f64,
    g1: f64,
}

/// Integrates until the first crossing of `event` in the requested
/// direction, searching `s` in `(0, s_max]`.
///
/// The crossing is bracketed on the dense output, refined by
/// bisection/Newton on the Hermite interpolant to a bracket below
/// `1e-12` in `s`, then polished on the true flow: the step is re-integrated
/// to the candidate `s*` and Newton-corrected using the exact flow
/// derivative, so `|event(state)|` ends at integration accuracy.
pub fn integrate_to_event<F, E>(
    mut f: F,
    y0: &[f64],
    mut event: E,
    direction: EventDirection,
    s_max: f64,
    cfg: &IntegratorConfig,
) -> Result<EventCrossing, IntegrateError>
where
    F: FnMut(f64, &[f64], &mut [f64]),
    E: FnMut(f64, &[f64]) -> f64,
{
    let g_init = event(0.0, y0);
    if g_init == 0.0 {
        return Err(IntegrateError::EventAtStart);
    }
    let mut bracket: Option<Bracket> = None;
    let mut g_prev = g_init;
    drive(&mut f, y0, s_max, cfg, |step| {
        let g1 = event(step.s1, step.y1);
        let crosses = match direction {
            EventDirection::Decreasing => g_prev > 0.0 && g1 <= 0.0,
            EventDirection::Increasing => g_prev < 0.0 && g1 >= 0.0,
            EventDirection::Any => g_prev * g1 <= 0.0,
        };
        if crosses {
            bracket = Some(Bracket {
                s0: step.s0,
                s1: step.s1,
                y0: step.y0.to_vec(),
                y1: step.y1.to_vec(),
                dy0: step.dy0.to_vec(),
                dy1: step.dy1.to_vec(),
                g0: g_prev,
                g1,
            });
            return false;
        }
        g_prev = g1;
        true
    })?;
    let br = bracket.ok_or(IntegrateError::NoEventFound { s_max })?;

    // Stage 1: bisection on the Hermite interpolant down to ~1e-13 in s.
    let n = y0.len();
    let mut interp = vec![0.0; n];
    let mut eval_interp = |s: f64, buf: &mut Vec<f64>, ev: &mut E| -> f64 {
        hermite(br.s0, br.s1, &br.y0, &br.dy0, &br.y1, &br.dy1, s, buf);
        ev(s, buf)
    };
    let (mut a, mut b) = (br.s0, br.s1);
    let (mut ga, _gb) = (br.g0, br.g1);
    let width_tol = 1e-13 * b.abs().max(1.0);
    while b - a > width_tol {
        let mid = 0.5 * (a + b);
        let gm = eval_interp(mid, &mut interp, &mut event);
        if (gm > 0.0) == (ga > 0.0) {
            a = mid;
            ga = gm;
        } else {
            b = mid;
        }
    }
    let mut s_star = 0.5 * (a + b);

    // Stage 2: polish on the true flow. Re-integrate the partial step and
    // apply Newton corrections with the exact flow derivative of the event.
    let mut state = br.y0.clone();
    let mut dy = vec![0.0; n];
    let mut pert = vec![0.0; n];
    let mut correction = b - a;
    let mut g = 0.0;
    for _ in 0..6 {
        state = integrate(&mut f, &br.y0, s_star - br.s0, cfg)?;
        g = event(s_star, &state);
        let g_scale = cfg.abs_tol * 0.1;
        if g.abs() <= g_scale {
            break;
        }
        f(s_star, &state, &mut dy);
        let state_norm = state.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let dy_norm = dy.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let eps = 1e-8 * (1.0 + state_norm) / (1.0 + dy_norm);
        for i in 0..n {
            pert[i] = state[i] + eps * dy[i];
        }
        let slope = (event(s_star + eps, &pert) - g) / eps;
        if slope == 0.0 || !slope.is_finite() {
            break;
        }
        let ds = -g / slope;
        correction = ds.abs();
        s_star += ds;
        if !(br.s0..=br.s1 + (br.s1 - br.s0)).contains(&s_star) {
            return Err(IntegrateError::NoEventFound { s_max });
        }
    }
    Ok(EventCrossing {
        s: s_star,
        state,
        event_value: g,
        bracket_width: correction.min(b - a),
    })
}

// ---------------------------------------------------------------------------
// Variational co-integration
// ---------------------------------------------------------------------------

/// Fundamental matrix solution at the end of a variational run, with its
/// prescribed initial matrix and the accumulated symplecticity drift
/// `|Y' J Y - Y0' J Y0|_inf`.
#[derive(Debug, Clone)]
pub struct FundamentalMatrix {
    pub matrix: Mat4,
    pub initial: Mat4,
    pub symplectic_drift: f64,
}

/// Packs 4 orbit components and the 16 entries of `Y` (column-major) into
/// one 20-dimensional state and co-integrates them with shared adaptive
/// steps, so `Y` is sampled on exactly the trajectory of `y`.
pub fn integrate_with_variational<F, G>(
    field: F,
    jacobian: G,
    y0: &Vec4,
    basis: &Mat4,
    s_end: f64,
    cfg: &IntegratorConfig,
) -> Result<(Vec4, FundamentalMatrix), IntegrateError>
where
    F: Fn(&Vec4) -> Vec4,
    G: Fn(&Vec4) -> Mat4,
{
    let mut z0 = [0.0; 20];
    z0[..4].copy_from_slice(&y0.0);
    for c in 0..4 {
        for r in 0..4 {
            z0[4 + 4 * c + r] = basis[(r, c)];
        }
    }
    let rhs = move |_s: f64, z: &[f64], dz: &mut [f64]| {
        let y = Vec4([z[0], z[1], z[2], z[3]]);
        let f = field(&y);
        dz[..4].copy_from_slice(&f.0);
        let a = jacobian(&y);
        for c in 0..4 {
            for r in 0..4 {
                let mut acc = 0.0;
                for k in 0..4 {
                    acc += a[(r, k)] * z[4 + 4 * c + k];
                }
                dz[4 + 4 * c + r] = acc;
            }
        }
    };
    let z = integrate(rhs, &z0, s_end, cfg)?;
    let state = Vec4([z[0], z[1], z[2], z[3]]);
    let mut m = [[0.0; 4]; 4];
    for c in 0..4 {
        for (r, row) in m.iter_mut().enumerate() {
            row[c] = z[4 + 4 * c + r];
        }
    }
    let matrix = Mat4::from_rows(m);
    let j = constant(Constant::J);
    let drift = matrix
        .transpose()
        .mul(&j)
        .mul(&matrix)
        .sub(&basis.transpose().mul(&j).mul(basis))
        .max_norm();
    Ok((
        state,
        FundamentalMatrix {
            matrix,
            initial: *basis,
            symplectic_drift: drift,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn harmonic(_s: f64, y: &[f64], dy: &mut [f64]) {
        dy[0] = y[1];
        dy[1] = -y[0];
    }

    #[test]
    fn harmonic_full_circle() {
        let cfg = IntegratorConfig::orbit();
        let y = integrate(harmonic, &[1.0, 0.0], 2.0 * std::f64::consts::PI, &cfg).unwrap();
        assert!((y[0] - 1.0).abs() < 1e-9, "y0 = {}", y[0]);
        assert!(y[1].abs() < 1e-9, "y1 = {}", y[1]);
    }

    #[test]
    fn zero_length_is_identity() {
        let cfg = IntegratorConfig::orbit();
        let y = integrate(harmonic, &[0.3, -0.4], 0.0, &cfg).unwrap();
        assert_eq!(y, vec![0.3, -0.4]);
    }

    #[test]
    fn reversibility_roundtrip() {
        let cfg = IntegratorConfig {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            ..IntegratorConfig::orbit()
        };
        let y0 = [0.7, -0.2];
        let fwd = integrate(harmonic, &y0, 1.0, &cfg).unwrap();
        let back = integrate(
            |s, y: &[f64], dy: &mut [f64]| {
                harmonic(s, y, dy);
                dy[0] = -dy[0];
                dy[1] = -dy[1];
            },
            &fwd,
            1.0,
            &cfg,
        )
        .unwrap();
        let bound = 10.0 * (cfg.abs_tol + cfg.rel_tol * y0.iter().fold(0.0f64, |m, v| m.max(v.abs())));
        assert!((back[0] - y0[0]).abs() < bound && (back[1] - y0[1]).abs() < bound);
    }

    #[test]
    fn order_of_convergence_at_least_four() {
        // Fixed-step runs (huge tolerances force acceptance, h_max pins h):
        // halving h must cut the defect by at least 2^4.
        let defect = |h: f64| {
            let cfg = IntegratorConfig {
                abs_tol: 100.0,
                rel_tol: 100.0,
                h_init: h,
                h_min: h * 0.999,
                h_max: h,
                max_steps: 100_000,
            };
            let y = integrate(harmonic, &[1.0, 0.0], 1.0, &cfg).unwrap();
            ((y[0] - 1.0f64.cos()).powi(2) + (y[1] + 1.0f64.sin()).powi(2)).sqrt()
        };
        let (e1, e2) = (defect(0.05), defect(0.025));
        let ratio = e1 / e2;
        assert!(ratio > 16.0, "order ratio {ratio} (defects {e1:e}, {e2:e})");
    }

    #[test]
    fn tolerance_tightening_reduces_defect() {
        let run = |tol: f64| {
            let cfg = IntegratorConfig {
                abs_tol: tol,
                rel_tol: tol,
                ..IntegratorConfig::orbit()
            };
            let y = integrate(harmonic, &[1.0, 0.0], 10.0, &cfg).unwrap();
            ((y[0] - 10.0f64.cos()).powi(2) + (y[1] + 10.0f64.sin()).powi(2)).sqrt()
        };
        assert!(run(1e-12) < run(1e-6));
    }

    #[test]
    fn event_simple_crossing() {
        // y' = 1 from -1: event y = 0 at s = 1 exactly.
        let cfg = IntegratorConfig::orbit();
        let ev = integrate_to_event(
            |_s, _y: &[f64], dy: &mut [f64]| dy[0] = 1.0,
            &[-1.0],
            |_s, y| y[0],
            EventDirection::Increasing,
            5.0,
            &cfg,
        )
        .unwrap();
        assert!((ev.s - 1.0).abs() < 1e-12, "s = {}", ev.s);
        assert!(ev.event_value.abs() < cfg.abs_tol);
        assert!(ev.bracket_width <= 1e-12);
    }

    #[test]
    fn event_harmonic_quarter_period() {
        let cfg = IntegratorConfig::orbit();
        let ev = integrate_to_event(
            harmonic,
            &[1.0, 0.0],
            |_s, y| y[0],
            EventDirection::Decreasing,
            10.0,
            &cfg,
        )
        .unwrap();
        assert!((ev.s - std::f64::consts::FRAC_PI_2).abs() < 1e-11, "s = {}", ev.s);
        assert!(ev.event_value.abs() < cfg.abs_tol);
    }

    #[test]
    fn event_at_start_is_an_error() {
        let cfg = IntegratorConfig::orbit();
        let r = integrate_to_event(
            harmonic,
            &[0.0, 1.0],
            |_s, y| y[0],
            EventDirection::Any,
            1.0,
            &cfg,
        );
        assert_eq!(r.unwrap_err(), IntegrateError::EventAtStart);
    }

    #[test]
    fn event_direction_filter() {
        // From (1, 0) the first decreasing zero of y0 is at pi/2, the first
        // increasing one at 3pi/2.
        let cfg = IntegratorConfig::orbit();
        let ev = integrate_to_event(
            harmonic,
            &[1.0, 0.0],
            |_s, y| y[0],
            EventDirection::Increasing,
            10.0,
            &cfg,
        )
        .unwrap();
        assert!((ev.s - 3.0 * std::f64::consts::FRAC_PI_2).abs() < 1e-10, "s = {}", ev.s);
    }

    #[test]
    fn no_event_reports_error() {
        let cfg = IntegratorConfig::orbit();
        let r = integrate_to_event(
            |_s, _y: &[f64], dy: &mut [f64]| dy[0] = 1.0,
            &[1.0],
            |_s, y| y[0],
            EventDirection::Decreasing,
            3.0,
            &cfg,
        );
        assert!(matches!(r, Err(IntegrateError::NoEventFound { .. })));
    }

    #[test]
    fn step_underflow_near_singularity() {
        // y' = -1/y^2 reaches y = 0 in finite time; the controller must
        // shrink below h_min and report the underflow.
        let cfg = IntegratorConfig {
            h_min: 1e-10,
            ..IntegratorConfig::orbit()
        };
        let r = integrate(
            |_s, y: &[f64], dy: &mut [f64]| dy[0] = -1.0 / (y[0] * y[0]),
            &[0.5],
            1.0,
            &cfg,
        );
        assert!(matches!(r, Err(IntegrateError::StepUnderflow { .. })), "{r:?}");
    }

    #[test]
    fn max_steps_exceeded() {
        let cfg = IntegratorConfig {
            max_steps: 3,
            ..IntegratorConfig::orbit()
        };
        let r = integrate(harmonic, &[1.0, 0.0], 100.0, &cfg);
        assert!(matches!(r, Err(IntegrateError::MaxStepsExceeded)));
    }

    #[test]
    fn trajectory_is_strictly_increasing_and_dense() {
        let cfg = IntegratorConfig::orbit();
        let traj = integrate_trajectory(harmonic, &[1.0, 0.0], 3.0, &cfg).unwrap();
        assert!(traj.len() > 2);
        for w in traj.samples().windows(2) {
            assert!(w[1].s > w[0].s);
        }
        assert_eq!(traj.s_end(), 3.0);
        // dense output against the closed-form circle
        for &s in &[0.1, 0.77, 1.5, 2.9] {
            let y = traj.sample_at(s);
            assert!((y[0] - s.cos()).abs() < 1e-7, "s={s}: {} vs {}", y[0], s.cos());
        }
    }

    #[test]
    fn checkpoints_hit_exact_times() {
        let cfg = IntegratorConfig::orbit();
        let pts = [0.5, 1.0, 2.5];
        let states = integrate_checkpoints(harmonic, &[1.0, 0.0], &pts, &cfg).unwrap();
        for (s, y) in pts.iter().zip(&states) {
            assert!((y[0] - s.cos()).abs() < 1e-10);
        }
    }

    #[test]
    fn variational_zero_field_is_identity() {
        let cfg = IntegratorConfig::variational();
        let (y, fm) = integrate_with_variational(
            |_y| Vec4::ZERO,
            |_y| Mat4::ZERO,
            &Vec4::new(1.0, 2.0, 3.0, 4.0),
            &Mat4::identity(),
            2.0,
            &cfg,
        )
        .unwrap();
        assert!(y.approx_eq(&Vec4::new(1.0, 2.0, 3.0, 4.0), 1e-14));
        assert!(fm.matrix.approx_eq(&Mat4::identity(), 1e-14));
        assert!(fm.symplectic_drift < 1e-14);
    }

    #[test]
    fn variational_linear_hamiltonian_flow() {
        // Harmonic-oscillator pair in 4 dims: Gamma = (|P|^2 + |Q|^2)/2,
        // A = J and Y(s) = exp(Js) Y0; at s = pi/2, exp(Js) = J.
        let cfg = IntegratorConfig {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            ..IntegratorConfig::variational()
        };
        let j = constant(Constant::J);
        let field = move |y: &Vec4| j.mul_vec(y);
        let jac = move |_y: &Vec4| j;
        let y0 = Vec4::new(1.0, 0.0, 0.0, 0.0);
        let (y, fm) = integrate_with_variational(
            field,
            jac,
            &y0,
            &Mat4::identity(),
            std::f64::consts::FRAC_PI_2,
            &cfg,
        )
        .unwrap();
        assert!(fm.matrix.approx_eq(&j, 1e-10));
        assert!(y.approx_eq(&j.mul_vec(&y0), 1e-10));
        assert!(fm.symplectic_drift < 1e-10);
    }
}
