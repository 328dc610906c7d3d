//! Planar motion in the uniform field plus the static effective trap:
//! `ẍ₁ = ω_c v₂ − ω_P² x₁`, `ẍ₂ = −ω_c v₁ − ω_P² x₂`. The flux line exerts
//! no force outside the solenoid; it only shifts the canonical angular
//! momentum by `α`.
//!
//! Each step is Strang splitting (half electric kick, exact cyclotron flow,
//! half kick) composed into a fourth-order triple jump.

use serde::Serialize;

use super::{NumericError, NumericScenario};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrajectoryState {
    pub x1: f64,
    pub x2: f64,
    pub v1: f64,
    pub v2: f64,
    pub time: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Trajectory {
    pub states: Vec<TrajectoryState>,
    pub energy_drift: f64,
    pub angular_momentum_drift: f64,
}

impl NumericScenario {
    pub fn energy(&self, s: &TrajectoryState) -> f64 {
        0.5 * (s.v1 * s.v1 + s.v2 * s.v2)
            + 0.5 * self.omega_p * self.omega_p * (s.x1 * s.x1 + s.x2 * s.x2)
    }

    /// `x₁v₂ − x₂v₁ + (ω_c/2)ρ² + α`.
    pub fn canonical_angular_momentum(&self, s: &TrajectoryState) -> f64 {
        s.x1 * s.v2 - s.x2 * s.v1 + 0.5 * self.omega_c * (s.x1 * s.x1 + s.x2 * s.x2) + self.alpha
    }
}

fn kick(s: &mut TrajectoryState, w2: f64, tau: f64) {
    s.v1 -= w2 * s.x1 * tau;
    s.v2 -= w2 * s.x2 * tau;
}

/// Exact flow of `ẋ = v`, `v̇ = ω_c (v₂, −v₁)` over `tau`.
fn cyclotron(s: &mut TrajectoryState, wc: f64, tau: f64) {
    if wc == 0.0 {
        s.x1 += s.v1 * tau;
        s.x2 += s.v2 * tau;
        return;
    }
    let (sn, cs) = (wc * tau).sin_cos();
    let (v1, v2) = (s.v1, s.v2);
    // v(t) = R(−ω_c t) v₀; x(t) = x₀ + ∫ v.
    s.x1 += (v1 * sn + v2 * (1.0 - cs)) / wc;
    s.x2 += (v2 * sn - v1 * (1.0 - cs)) / wc;
    s.v1 = v1 * cs + v2 * sn;
    s.v2 = v2 * cs - v1 * sn;
}

fn strang(s: &mut TrajectoryState, sc: &NumericScenario, tau: f64) {
    let w2 = sc.omega_p * sc.omega_p;
    kick(s, w2, 0.5 * tau);
    cyclotron(s, sc.omega_c, tau);
    kick(s, w2, 0.5 * tau);
}

fn step(s: &mut TrajectoryState, sc: &NumericScenario, dt: f64) {
    let cbrt2 = 2f64.cbrt();
    let w1 = 1.0 / (2.0 - cbrt2);
    let w0 = -cbrt2 * w1;
    strang(s, sc, w1 * dt);
    strang(s, sc, w0 * dt);
    strang(s, sc, w1 * dt);
    s.time += dt;
}

/// Integrates `steps` steps, recording every `stride`-th state (and the last).
pub fn integrate_trajectory(
    sc: &NumericScenario,
    initial: TrajectoryState,
    dt: f64,
    steps: usize,
    stride: usize,
) -> Result<Trajectory, NumericError> {
    sc.validate()?;
    let wmax = sc.omega_c.max(sc.omega_p);
    if dt.is_nan() || dt <= 0.0 || dt * wmax >= 0.05 {
        return Err(NumericError::Precondition(format!(
            "dt*max(omega_c, omega_p) = {} must be in (0, 0.05)",
            dt * wmax
        )));
    }
    let stride = stride.max(1);
    let e0 = sc.energy(&initial);
    let j0 = sc.canonical_angular_momentum(&initial);
    let mut s = initial;
    let mut states = vec![initial];
    let mut de: f64 = 0.0;
    let mut dj: f64 = 0.0;
    for k in 1..=steps {
        step(&mut s, sc, dt);
        if ![s.x1, s.x2, s.v1, s.v2].iter().all(|v| v.is_finite()) {
            return Err(NumericError::Instability(f64::INFINITY));
        }
        de = de.max(rel(sc.energy(&s), e0));
        dj = dj.max(rel(sc.canonical_angular_momentum(&s), j0));
        if de > 1e-3 {
            return Err(NumericError::Instability(de));
        }
        if k % stride == 0 || k == steps {
            states.push(s);
        }
    }
    Ok(Trajectory {
        states,
        energy_drift: de,
        angular_momentum_drift: dj,
    })
}

fn rel(x: f64, x0: f64) -> f64 {
    let scale = x0.abs();
    if scale > 0.0 {
        (x - x0).abs() / scale
    } else {
        (x - x0).abs()
    }
}
