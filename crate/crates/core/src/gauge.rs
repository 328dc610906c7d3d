//! Gauge transformations with a multivalued gauge function represented by
//! its rational gradient and its winding constant.

use thiserror::Error;

use crate::dirac::{DiracError, ReducedCanonicalSystem};
use crate::mechanics::HamiltonianModel;
use crate::symcore::{Bindings, Expr, PhaseSpace, SymError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GaugeError {
    #[error(transparent)]
    Sym(#[from] SymError),
    #[error(transparent)]
    Dirac(#[from] DiracError),
    #[error("dimension mismatch: {0} potential components, {1} gradient components")]
    Dimension(usize, usize),
    #[error("gradient is not curl-free")]
    NotCurlFree,
}

type Result<T> = std::result::Result<T, GaugeError>;

#[derive(Clone, Debug, PartialEq)]
pub struct GaugeFunction {
    /// `∂χ/∂xᵢ` in the order of the phase-space coordinates.
    pub gradient: Vec<Expr>,
    /// Increment of `χ` along one counterclockwise loop around the origin.
    pub winding_constant: Expr,
}

impl GaugeFunction {
    pub fn new(gradient: Vec<Expr>, winding_constant: Expr, ps: &PhaseSpace) -> Result<Self> {
        if gradient.len() != ps.dim() {
            return Err(GaugeError::Dimension(ps.dim(), gradient.len()));
        }
        let g = GaugeFunction {
            gradient,
            winding_constant,
        };
        if !g.is_curl_free(ps) {
            return Err(GaugeError::NotCurlFree);
        }
        Ok(g)
    }

    pub fn zero(ps: &PhaseSpace, like: &Expr) -> Self {
        GaugeFunction {
            gradient: vec![Expr::zero(like.table()); ps.dim()],
            winding_constant: Expr::zero(like.table()),
        }
    }

    pub fn is_curl_free(&self, ps: &PhaseSpace) -> bool {
        let xs = ps.coordinates();
        (0..xs.len()).all(|i| {
            (i + 1..xs.len()).all(|j| self.gradient[j].diff(xs[i]) == self.gradient[i].diff(xs[j]))
        })
    }
}

pub fn transform_potential(a: &[Expr], g: &GaugeFunction) -> Result<Vec<Expr>> {
    if a.len() != g.gradient.len() {
        return Err(GaugeError::Dimension(a.len(), g.gradient.len()));
    }
    Ok(a.iter().zip(&g.gradient).map(|(a, g)| a + g).collect())
}

/// `pᵢ → pᵢ − (q/c)∂ᵢχ`, the action of conjugation by `exp(iqχ/ħc)`.
/// `p_i → p_i − (q/c) ∂_i χ`, as shifts.
fn momentum_shift(g: &GaugeFunction, charge_over_c: &Expr, ps: &PhaseSpace) -> Bindings {
    ps.momenta()
        .into_iter()
        .zip(&g.gradient)
        .map(|(p, gi)| (p, -(charge_over_c * gi)))
        .collect()
}

pub fn transform_hamiltonian(
    h: &HamiltonianModel,
    g: &GaugeFunction,
    charge_over_c: &Expr,
    ps: &PhaseSpace,
) -> Result<HamiltonianModel> {
    let b = momentum_shift(g, charge_over_c, ps);
    Ok(HamiltonianModel {
        expr: h.expr.translate(&b)?,
        kinetic_part: h
            .kinetic_part
            .as_ref()
            .map(|t| t.translate(&b))
            .transpose()?,
    })
}

pub fn transform_observable(
    j: &Expr,
    g: &GaugeFunction,
    charge_over_c: &Expr,
    ps: &PhaseSpace,
) -> Result<Expr> {
    Ok(j.translate(&momentum_shift(g, charge_over_c, ps))?)
}

/// Gauge-transforms `J` and eliminates the dependent variables with the
/// reduction of the transformed system.
pub fn transform_observable_and_reduce(
    j: &Expr,
    g: &GaugeFunction,
    charge_over_c: &Expr,
    ps: &PhaseSpace,
    reduced: &ReducedCanonicalSystem,
) -> Result<Expr> {
    let jt = transform_observable(j, g, charge_over_c, ps)?;
    Ok(reduced.eliminate(&jt)?)
}
