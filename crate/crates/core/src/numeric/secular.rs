//! Secular frequency of the radial Paul-trap motion
//! `ẍ = (qV/2μd²) cos(Ω̃t) x`.
//!
//! The drive-period map is integrated once with RK4 in deviation form
//! (`M − I` keeps full relative precision when the period map is close to
//! the identity). Stroboscopic samples of `x₁`, decimated to about 16 per
//! secular period, are windowed, and the spectral peak is located by an FFT
//! and refined on the continuous transform.

use std::f64::consts::PI;

use rustfft::{num_complex::Complex, FftPlanner};
use serde::Serialize;

use super::NumericError;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SecularOptions {
    /// RK4 steps per drive period.
    pub steps_per_period: usize,
    /// Target samples per secular period after decimation.
    pub samples_per_secular: usize,
}

impl Default for SecularOptions {
    fn default() -> Self {
        SecularOptions {
            steps_per_period: 20000,
            samples_per_secular: 16,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SecularResult {
    pub frequency: f64,
    /// `Ω²/4Ω̃`.
    pub effective: f64,
    pub omega: f64,
    pub samples: usize,
    pub decimation: u64,
}

type M2 = [[f64; 2]; 2];

fn mat_mul(a: &M2, b: &M2) -> M2 {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

fn add(a: &M2, b: &M2) -> M2 {
    [
        [a[0][0] + b[0][0], a[0][1] + b[0][1]],
        [a[1][0] + b[1][0], a[1][1] + b[1][1]],
    ]
}

fn axpy(a: &M2, s: f64, b: &M2) -> M2 {
    [
        [a[0][0] + s * b[0][0], a[0][1] + s * b[0][1]],
        [a[1][0] + s * b[1][0], a[1][1] + s * b[1][1]],
    ]
}

/// `(I + A)(I + B) − I = A + B + AB`.
fn compose(a: &M2, b: &M2) -> M2 {
    add(&add(a, b), &mat_mul(a, b))
}

/// `M − I` for one drive period, `Ẏ = K(t) Y` with `K = [[0,1],[κ cos Ω̃t, 0]]`.
fn period_deviation(kappa: f64, drive: f64, steps: usize) -> M2 {
    let period = 2.0 * PI / drive;
    let h = period / steps as f64;
    let k = |t: f64| -> M2 { [[0.0, 1.0], [kappa * (drive * t).cos(), 0.0]] };
    // Ḋ = K (I + D).
    let f = |t: f64, d: &M2| -> M2 {
        let kt = k(t);
        add(&kt, &mat_mul(&kt, d))
    };
    let mut d: M2 = [[0.0; 2]; 2];
    for i in 0..steps {
        let t = i as f64 * h;
        let k1 = f(t, &d);
        let k2 = f(t + 0.5 * h, &axpy(&d, 0.5 * h, &k1));
        let k3 = f(t + 0.5 * h, &axpy(&d, 0.5 * h, &k2));
        let k4 = f(t + h, &axpy(&d, h, &k3));
        let incr = add(&add(&k1, &k4), &add(&k2, &k2));
        let incr = add(&incr, &add(&k3, &k3));
        d = axpy(&d, h / 6.0, &incr);
    }
    d
}

fn power_deviation(d: &M2, mut n: u64) -> M2 {
    let mut result: M2 = [[0.0; 2]; 2];
    let mut base = *d;
    while n > 0 {
        if n & 1 == 1 {
            result = compose(&result, &base);
        }
        base = compose(&base, &base);
        n >>= 1;
    }
    result
}

fn window(n: usize) -> Vec<f64> {
    // Squared Hann: sidelobes fall off fast enough that the image peak at
    // negative frequency does not bias the estimate.
    (0..n)
        .map(|i| {
            let w = (PI * (i as f64 + 0.5) / n as f64).sin();
            w * w * w * w
        })
        .collect()
}

fn dtft_power(x: &[f64], w: &[f64], phi: f64) -> f64 {
    let (mut re, mut im) = (0.0, 0.0);
    let (s1, c1) = phi.sin_cos();
    let (mut s, mut c) = (0.0f64, 1.0f64);
    for (k, (&xk, &wk)) in x.iter().zip(w).enumerate() {
        if k % 256 == 0 {
            let (ss, cc) = (phi * k as f64).sin_cos();
            s = ss;
            c = cc;
        }
        re += xk * wk * c;
        im -= xk * wk * s;
        let nc = c * c1 - s * s1;
        s = s * c1 + c * s1;
        c = nc;
    }
    re * re + im * im
}

/// Dominant sub-drive frequency of `x₁(t)` for the radial Paul equation.
/// `duration` is the simulated time span.
pub fn secular_frequency(
    v_amp: f64,
    d: f64,
    drive_freq: f64,
    mu: f64,
    charge: f64,
    duration: f64,
    opts: SecularOptions,
) -> Result<SecularResult, NumericError> {
    if !(v_amp.abs() > 0.0 && d > 0.0 && drive_freq > 0.0 && mu > 0.0 && charge > 0.0) {
        return Err(NumericError::Precondition(
            "parameters must be positive".into(),
        ));
    }
    let omega = (2f64.sqrt() * charge * v_amp.abs() / (mu * d * d)).sqrt();
    let ratio = drive_freq / omega;
    if ratio < 20.0 {
        return Err(NumericError::Precondition(format!(
            "drive ratio {ratio:.3} below 20"
        )));
    }
    let effective = omega * omega / (4.0 * drive_freq);
    let secular_period = 2.0 * PI / effective;
    if duration < 20.0 * secular_period {
        return Err(NumericError::Resolution(format!(
            "duration {duration} shorter than 20 secular periods ({:.4})",
            20.0 * secular_period
        )));
    }
    let kappa = charge * v_amp / (2.0 * mu * d * d);
    let drive_period = 2.0 * PI / drive_freq;
    let dev = period_deviation(kappa, drive_freq, opts.steps_per_period);
    let per_secular = secular_period / drive_period;
    let decimation = ((per_secular / opts.samples_per_secular as f64).floor() as u64).max(1);
    let step = power_deviation(&dev, decimation);
    let dt = decimation as f64 * drive_period;
    let n = (duration / dt).floor() as usize;

    let mut x = [1.0f64, 0.0f64];
    let mut samples = Vec::with_capacity(n);
    for _ in 0..n {
        samples.push(x[0]);
        x = [
            x[0] + step[0][0] * x[0] + step[0][1] * x[1],
            x[1] + step[1][0] * x[0] + step[1][1] * x[1],
        ];
    }
    let w = window(n);
    let mean = samples.iter().sum::<f64>() / n as f64;
    let data: Vec<f64> = samples.iter().map(|v| v - mean).collect();

    // Coarse peak on a zero-padded FFT.
    let nfft = (4 * n).next_power_of_two();
    let mut buf: Vec<Complex<f64>> = (0..nfft)
        .map(|i| Complex::new(if i < n { data[i] * w[i] } else { 0.0 }, 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(nfft).process(&mut buf);
    let peak = (1..nfft / 2)
        .max_by(|&a, &b| buf[a].norm_sqr().total_cmp(&buf[b].norm_sqr()))
        .expect("nonempty spectrum");
    let bin = 2.0 * PI / nfft as f64;

    // Golden-section refinement on the continuous transform.
    let (mut a, mut b) = ((peak as f64 - 1.0) * bin, (peak as f64 + 1.0) * bin);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut e = a + g * (b - a);
    let mut fc = dtft_power(&data, &w, c);
    let mut fe = dtft_power(&data, &w, e);
    for _ in 0..200 {
        if (b - a) < 1e-15 * b.abs() {
            break;
        }
        if fc > fe {
            b = e;
            e = c;
            fe = fc;
            c = b - g * (b - a);
            fc = dtft_power(&data, &w, c);
        } else {
            a = c;
            c = e;
            fc = fe;
            e = a + g * (b - a);
            fe = dtft_power(&data, &w, e);
        }
    }
    let phi = 0.5 * (a + b);
    Ok(SecularResult {
        frequency: phi / dt,
        effective,
        omega,
        samples: n,
        decimation,
    })
}
