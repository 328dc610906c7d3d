//! Canonical quantization of reduced systems: oscillator recognition,
//! ladder spectra, angular momentum in ladder form, Landau levels.

use serde::Serialize;
use thiserror::Error;

use crate::dirac::{DiracError, ReducedCanonicalSystem};
use crate::mechanics::MechanicalMomenta;
use crate::symcore::{Bindings, Expr, SymError, SymbolId};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuantizeError {
    #[error(transparent)]
    Sym(#[from] SymError),
    #[error(transparent)]
    Dirac(#[from] DiracError),
    #[error("not an oscillator: {0}")]
    NotAnOscillator(String),
    #[error("angular momentum is not affine in the oscillator Hamiltonian: {0}")]
    DecompositionFailure(String),
    #[error("mechanical momenta commute; the kinetic spectrum is continuous")]
    CommutingMomenta,
    #[error("bracket of mechanical momenta must be a nonzero parameter expression")]
    NonParametricBracket,
}

type Result<T> = std::result::Result<T, QuantizeError>;

/// `H = (P − P₀)²/2m + ½mω²(X − X₀)² + offset`.
#[derive(Clone, Debug, PartialEq)]
pub struct OscillatorForm {
    pub effective_mass: Expr,
    pub effective_frequency: Expr,
    pub zero_point_offset: Expr,
    pub center: (Expr, Expr),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumKind {
    Oscillator,
    Landau,
    RadialNumeric,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LevelValue {
    Exact(Expr),
    Numeric(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Level {
    pub quantum_numbers: Vec<(String, i64)>,
    pub energy: LevelValue,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub kind: SpectrumKind,
    pub levels: Vec<Level>,
}

impl Spectrum {
    pub fn exact(&self, n: usize) -> Option<&Expr> {
        match &self.levels.get(n)?.energy {
            LevelValue::Exact(e) => Some(e),
            LevelValue::Numeric(_) => None,
        }
    }
}

/// `J = fractional_offset + ladder_coefficient·(N + number_offset)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AngularMomentumResult {
    pub reduced_j: Expr,
    pub fractional_offset: Expr,
    pub ladder_coefficient: Expr,
    pub number_offset: Expr,
    pub zero_point: Expr,
}

fn positive_sqrt(e: &Expr) -> Option<Expr> {
    let r = e.sqrt()?;
    if r.is_manifestly_positive() {
        Some(r)
    } else if (-&r).is_manifestly_positive() {
        Some(-r)
    } else {
        None
    }
}

struct Quadratic {
    pp: Expr,
    xx: Expr,
    xp: Expr,
    x: Expr,
    p: Expr,
    c: Expr,
}

fn quadratic_parts(h: &Expr, x: SymbolId, p: SymbolId) -> Result<Quadratic> {
    let table = h.table();
    match h.polynomial_degree_in(&[x, p]) {
        Some(d) if d <= 2 => {}
        _ => {
            return Err(QuantizeError::NotAnOscillator(format!(
                "not quadratic in the pair: {h}"
            )))
        }
    }
    let zero: Bindings = [(x, Expr::zero(table)), (p, Expr::zero(table))]
        .into_iter()
        .collect();
    let at0 = |e: Expr| e.substitute(&zero);
    let half = Expr::ratio(table, 1, 2);
    Ok(Quadratic {
        pp: &half * &h.diff(p).diff(p),
        xx: &half * &h.diff(x).diff(x),
        xp: h.diff(x).diff(p),
        x: at0(h.diff(x))?,
        p: at0(h.diff(p))?,
        c: at0(h.clone())?,
    })
}

pub fn recognize_oscillator(reduced: &ReducedCanonicalSystem) -> Result<OscillatorForm> {
    let pair = reduced
        .pairs
        .first()
        .ok_or_else(|| QuantizeError::NotAnOscillator("no canonical pair".into()))?;
    if reduced.pairs.len() != 1 {
        return Err(QuantizeError::NotAnOscillator(
            "more than one canonical pair".into(),
        ));
    }
    recognize_oscillator_in(&reduced.reduced_h, pair.x, pair.p)
}

pub fn recognize_oscillator_in(h: &Expr, x: SymbolId, p: SymbolId) -> Result<OscillatorForm> {
    let q = quadratic_parts(h, x, p)?;
    if !q.xp.is_zero() {
        return Err(QuantizeError::NotAnOscillator(format!(
            "cross term x*p with coefficient {}",
            q.xp
        )));
    }
    if !q.pp.is_manifestly_positive() || !q.xx.is_manifestly_positive() {
        return Err(QuantizeError::NotAnOscillator(format!(
            "coefficients of p^2 ({}) and x^2 ({}) must be positive",
            q.pp, q.xx
        )));
    }
    let table = h.table();
    let two = Expr::integer(table, 2);
    let four = Expr::integer(table, 4);
    let mass = (&two * &q.pp).recip()?;
    let frequency = positive_sqrt(&(&four * &q.pp * &q.xx)).ok_or_else(|| {
        QuantizeError::NotAnOscillator("frequency is not a rational function".into())
    })?;
    // Completing the square: x₀ = −b_x/(2β), p₀ = −b_p/(2α).
    let x0 = -(&q.x / &(&two * &q.xx));
    let p0 = -(&q.p / &(&two * &q.pp));
    let offset = &q.c - &(&q.x * &q.x / &(&four * &q.xx)) - &q.p * &q.p / &(&four * &q.pp);
    Ok(OscillatorForm {
        effective_mass: mass,
        effective_frequency: frequency,
        zero_point_offset: offset,
        center: (x0, p0),
    })
}

impl OscillatorForm {
    /// `(P − P₀)²/2m + ½mω²(X − X₀)² + offset` in the given pair.
    pub fn hamiltonian(&self, x: &Expr, p: &Expr) -> Expr {
        let table = x.table();
        let dx = x - &self.center.0;
        let dp = p - &self.center.1;
        let half = Expr::ratio(table, 1, 2);
        &dp * &dp / &(Expr::integer(table, 2) * &self.effective_mass)
            + &half
                * &self.effective_mass
                * &self.effective_frequency
                * &self.effective_frequency
                * &dx
                * &dx
            + &self.zero_point_offset
    }
}

pub fn oscillator_spectrum(osc: &OscillatorForm, n_max: usize, hbar: &Expr) -> Spectrum {
    let table = hbar.table();
    let levels = (0..=n_max)
        .map(|n| {
            let k = Expr::ratio(table, 2 * n as i64 + 1, 2);
            Level {
                quantum_numbers: vec![("n".into(), n as i64)],
                energy: LevelValue::Exact(
                    hbar * &osc.effective_frequency * &k + &osc.zero_point_offset,
                ),
            }
        })
        .collect();
    Spectrum {
        kind: SpectrumKind::Oscillator,
        levels,
    }
}

/// Writes `J` as `c₀ + κ(H − offset)` on the reduced system, so that
/// `J = c₀ + κħω*(N + ½)`.
pub fn angular_momentum_reduce(
    j: &Expr,
    reduced: &ReducedCanonicalSystem,
    osc: &OscillatorForm,
    hbar: &Expr,
) -> Result<AngularMomentumResult> {
    let pair = reduced
        .pairs
        .first()
        .ok_or_else(|| QuantizeError::DecompositionFailure("no canonical pair".into()))?;
    let jr = reduced.express(j)?;
    let table = j.table();
    let xs = Expr::symbol(table, pair.x);
    let ps = Expr::symbol(table, pair.p);
    let h_osc = osc.hamiltonian(&xs, &ps);
    let hq = quadratic_parts(&h_osc, pair.x, pair.p)?;
    let jq = quadratic_parts(&jr, pair.x, pair.p)
        .map_err(|e| QuantizeError::DecompositionFailure(e.to_string()))?;
    let kappa = &jq.pp / &hq.pp;
    let rest = &jr - &(&kappa * &(&h_osc - &osc.zero_point_offset));
    if rest.depends_on(pair.x) || rest.depends_on(pair.p) {
        return Err(QuantizeError::DecompositionFailure(format!(
            "J = {jr} is not affine in the oscillator Hamiltonian"
        )));
    }
    let ladder = &kappa * hbar * &osc.effective_frequency;
    let half = Expr::ratio(table, 1, 2);
    let zero_point = &rest + &(&ladder * &half);
    Ok(AngularMomentumResult {
        reduced_j: jr,
        fractional_offset: rest,
        ladder_coefficient: ladder,
        number_offset: half,
        zero_point,
    })
}

/// Landau levels from `[K₁, K₂] = iħc₀`: `Q = K₁/c₀`, `Π = K₂` is a canonical
/// pair and `T = Π²/2m + c₀²Q²/2m`.
pub fn landau_levels(
    k: &MechanicalMomenta,
    n_max: usize,
    hbar: &Expr,
) -> Result<(OscillatorForm, Spectrum)> {
    let c0 = k.bracket_matrix.get(0, 1);
    if c0.is_zero() {
        return Err(QuantizeError::CommutingMomenta);
    }
    if !c0.is_parameter_only() {
        return Err(QuantizeError::NonParametricBracket);
    }
    let ratio = c0 / &k.mass;
    let frequency = positive_sqrt(&(&ratio * &ratio)).ok_or(QuantizeError::NonParametricBracket)?;
    let table = hbar.table();
    let osc = OscillatorForm {
        effective_mass: k.mass.clone(),
        effective_frequency: frequency,
        zero_point_offset: Expr::zero(table),
        center: (Expr::zero(table), Expr::zero(table)),
    };
    let mut spectrum = oscillator_spectrum(&osc, n_max, hbar);
    spectrum.kind = SpectrumKind::Landau;
    Ok((osc, spectrum))
}
