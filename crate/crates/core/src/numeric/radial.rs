//! Radial eigenproblem in angular-momentum sector `m` with flux fraction
//! `α`:
//!
//! ```text
//! −½(ψ'' + ψ'/r) + (m+α)²/(2r²) ψ + (ω_c/2)(m+α) ψ + ½(ω_P² + ω_c²/4) r² ψ = E ψ
//! ```
//!
//! Both discretizations are conservative and yield a symmetric tridiagonal
//! matrix; see [`assemble`].

use serde::Serialize;

use super::tridiag::tridiagonal_lowest;
use super::{NumericError, NumericScenario};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RadialGrid {
    pub r_max: f64,
    pub n_points: usize,
    /// Dirichlet wall at `r = a` instead of the idealized flux line.
    pub hard_wall: Option<f64>,
}

impl RadialGrid {
    /// `r_max = 12` oscillator lengths.
    pub fn auto(s: &NumericScenario, n_points: usize) -> Self {
        RadialGrid {
            r_max: 12.0 * s.length(),
            n_points,
            hard_wall: None,
        }
    }

    pub fn validate(&self, s: &NumericScenario) -> Result<(), NumericError> {
        if self.n_points < 200 {
            return Err(NumericError::InvalidGrid(format!(
                "n_points = {} < 200",
                self.n_points
            )));
        }
        let need = 8.0 * s.length();
        if self.r_max.is_nan() || self.r_max < need {
            return Err(NumericError::InvalidGrid(format!(
                "r_max = {} below 8 characteristic lengths ({need:.4})",
                self.r_max
            )));
        }
        if let Some(a) = self.hard_wall {
            if !(a > 0.0 && a < self.r_max) {
                return Err(NumericError::InvalidGrid(format!(
                    "wall radius {a} outside (0, r_max)"
                )));
            }
        }
        Ok(())
    }

    fn with_points(&self, n_points: usize) -> Self {
        RadialGrid { n_points, ..*self }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RadialSpectrum {
    pub m: i64,
    pub alpha: f64,
    /// Richardson-extrapolated eigenvalues, ascending.
    pub levels: Vec<f64>,
    pub coarse: Vec<f64>,
    pub fine: Vec<f64>,
    pub grid: RadialGrid,
    pub warnings: Vec<String>,
}

/// Symmetric tridiagonal matrix `(diag, off)` of the discretized operator.
pub(crate) fn assemble(s: &NumericScenario, m: i64, grid: &RadialGrid) -> (Vec<f64>, Vec<f64>) {
    match grid.hard_wall {
        None => assemble_flux_line(s, m, grid),
        Some(a) => assemble_wall(s, m, grid, a),
    }
}

/// `ψ = r^λ f` with `λ = |m+α|` turns the radial operator into
/// `−(1/2w)(w f')' + (ω_c/2)ν + ½Ω̄²r²` with `w = r^(2λ+1)`, and `f` is smooth
/// at the origin. Finite volumes on cells `[ih, (i+1)h]`: cell masses and
/// potential are integrated exactly, face conductances use the harmonic mean
/// `h / ∫ dr/w`. The face at `r = 0` carries no flux.
fn assemble_flux_line(s: &NumericScenario, m: i64, grid: &RadialGrid) -> (Vec<f64>, Vec<f64>) {
    let nu = m as f64 + s.alpha;
    let lam = nu.abs();
    let k = 2.0 * lam + 1.0;
    let n = grid.n_points;
    let h = grid.r_max / n as f64;
    let w2 = s.omega_p * s.omega_p + 0.25 * s.omega_c * s.omega_c;
    let moment = |p: f64, a: f64, b: f64| (b.powf(p + 1.0) - a.powf(p + 1.0)) / (p + 1.0);
    let resistance = |a: f64, b: f64| {
        if lam == 0.0 {
            (b / a).ln()
        } else {
            (a.powf(-2.0 * lam) - b.powf(-2.0 * lam)) / (2.0 * lam)
        }
    };
    let mass: Vec<f64> = (0..n)
        .map(|i| moment(k, i as f64 * h, (i + 1) as f64 * h))
        .collect();
    let pot: Vec<f64> = (0..n)
        .map(|i| {
            let (a, b) = (i as f64 * h, (i + 1) as f64 * h);
            0.5 * s.omega_c * nu * moment(k, a, b) + 0.5 * w2 * moment(k + 2.0, a, b)
        })
        .collect();
    let center = |i: usize| (i as f64 + 0.5) * h;
    let cond: Vec<f64> = (0..n.saturating_sub(1))
        .map(|i| 1.0 / resistance(center(i), center(i + 1)))
        .collect();
    let mut diag = Vec::with_capacity(n);
    let mut off = Vec::with_capacity(n.saturating_sub(1));
    for i in 0..n {
        let inner = if i > 0 { cond[i - 1] } else { 0.0 };
        // Dirichlet image one cell beyond r_max.
        let outer = if i + 1 < n {
            cond[i]
        } else {
            1.0 / resistance(center(i), center(i + 1))
        };
        diag.push((0.5 * (inner + outer) + pot[i]) / mass[i]);
        if i + 1 < n {
            off.push(-0.5 * cond[i] / (mass[i] * mass[i + 1]).sqrt());
        }
    }
    (diag, off)
}

/// Conservative `−(1/2r)(r ψ')'` on nodes `r_i = a + (i+1)h` with Dirichlet
/// values at `r = a` and one step past `r_max`, symmetrized by `√r_i`.
fn assemble_wall(s: &NumericScenario, m: i64, grid: &RadialGrid, a: f64) -> (Vec<f64>, Vec<f64>) {
    let nu = m as f64 + s.alpha;
    let n = grid.n_points;
    let h = (grid.r_max - a) / (n as f64 + 1.0);
    let r = |i: f64| a + (i + 1.0) * h;
    let w2 = s.omega_p * s.omega_p + 0.25 * s.omega_c * s.omega_c;
    let mut diag = Vec::with_capacity(n);
    let mut off = Vec::with_capacity(n.saturating_sub(1));
    for i in 0..n {
        let ri = r(i as f64);
        let face_in = r(i as f64 - 0.5);
        let face_out = r(i as f64 + 0.5);
        let v = nu * nu / (2.0 * ri * ri) + 0.5 * s.omega_c * nu + 0.5 * w2 * ri * ri;
        diag.push((face_in + face_out) / (2.0 * ri * h * h) + v);
        if i + 1 < n {
            let rj = r(i as f64 + 1.0);
            off.push(-face_out / (2.0 * h * h * (ri * rj).sqrt()));
        }
    }
    (diag, off)
}

fn solve(s: &NumericScenario, m: i64, grid: &RadialGrid, k: usize) -> Vec<f64> {
    let (d, e) = assemble(s, m, grid);
    tridiagonal_lowest(&d, &e, k)
}

/// Lowest `k_levels` eigenvalues on `grid` and on the doubled grid, combined
/// by Richardson extrapolation for the second-order stencil.
pub fn radial_spectrum(
    s: &NumericScenario,
    m: i64,
    grid: &RadialGrid,
    k_levels: usize,
    tolerance: f64,
) -> Result<RadialSpectrum, NumericError> {
    s.validate()?;
    grid.validate(s)?;
    if k_levels == 0 {
        return Err(NumericError::Precondition(
            "k_levels must be at least 1".into(),
        ));
    }
    let coarse = solve(s, m, grid, k_levels);
    let fine = solve(s, m, &grid.with_points(2 * grid.n_points), k_levels);
    let mut warnings = Vec::new();
    let levels: Vec<f64> = coarse
        .iter()
        .zip(&fine)
        .enumerate()
        .map(|(j, (&c, &f))| {
            let x = (4.0 * f - c) / 3.0;
            let disagreement = (x - f).abs() / x.abs().max(f64::MIN_POSITIVE);
            if disagreement > tolerance {
                warnings.push(format!(
                    "grid too coarse: level {j} extrapolation differs from fine grid by {disagreement:.3e} (tolerance {tolerance:.1e})"
                ));
            }
            x
        })
        .collect();
    Ok(RadialSpectrum {
        m,
        alpha: s.alpha,
        levels,
        coarse,
        fine,
        grid: *grid,
        warnings,
    })
}

/// `E = Ω̄(2n + |m+α| + 1) + (ω_c/2)(m+α)` for `n = 0..k`.
pub fn fock_darwin(s: &NumericScenario, m: i64, k: usize) -> Vec<f64> {
    let nu = m as f64 + s.alpha;
    let w = s.omega_bar();
    (0..k)
        .map(|n| w * (2.0 * n as f64 + nu.abs() + 1.0) + 0.5 * s.omega_c * nu)
        .collect()
}
