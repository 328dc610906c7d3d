//! Lagrangians with constant mass matrix, Legendre transform with singular
//! Hessians, mechanical momenta, and the kinetic-energy-limit reduction.

use std::sync::Arc;

use thiserror::Error;

use crate::symcore::{
    poisson_bracket, Bindings, Expr, ExprMatrix, PhaseSpace, SymError, SymbolId, SymbolKind,
    SymbolTable,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MechanicsError {
    #[error(transparent)]
    Sym(#[from] SymError),
    #[error("coordinate `{0}` has no registered velocity")]
    MissingVelocity(String),
    #[error("Lagrangian is not quadratic in the velocities")]
    NonQuadraticVelocity,
    #[error("mass matrix depends on phase-space variables")]
    CoordinateDependentMass,
    #[error("{0} must not contain {1} symbols")]
    ForbiddenSymbols(&'static str, SymbolKind),
    #[error("kinetic part not of the form sum(K_i^2)/(2m): {0}")]
    KineticForm(String),
    #[error("kinetic limit with zero level is excluded: a vanishing kinetic eigenvalue leaves no dynamics")]
    ZeroLevelExcluded,
    #[error("kinetic level must depend on parameters only")]
    LevelNotParametric,
    #[error("Hamiltonian has no designated kinetic part")]
    NoKineticPart,
    #[error("Hamiltonian is not quadratic in the momenta with invertible Hessian")]
    NotInvertibleInMomenta,
}

type Result<T> = std::result::Result<T, MechanicsError>;

/// `L = ½ẋᵀMẋ + Aᵢ(x)ẋᵢ − V(x) + const`.
#[derive(Clone, Debug, PartialEq)]
pub struct LagrangianModel {
    pub velocities: Vec<SymbolId>,
    pub mass_matrix: ExprMatrix,
    pub velocity_coeffs: Vec<Expr>,
    pub potential: Expr,
    pub constant: Expr,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianModel {
    pub expr: Expr,
    pub kinetic_part: Option<Expr>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MechanicalMomenta {
    pub mass: Expr,
    pub components: Vec<Expr>,
    pub bracket_matrix: ExprMatrix,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LegendreResult {
    pub momenta: Vec<Expr>,
    pub hessian_rank: usize,
    pub primaries: Vec<Expr>,
    pub hamiltonian: HamiltonianModel,
}

fn zero_out(e: &Expr, syms: &[SymbolId]) -> Result<Expr> {
    let b: Bindings = syms.iter().map(|&s| (s, Expr::zero(e.table()))).collect();
    Ok(e.substitute(&b)?)
}

fn velocities_of(table: &SymbolTable, ps: &PhaseSpace) -> Result<Vec<SymbolId>> {
    ps.coordinates()
        .into_iter()
        .map(|q| {
            table
                .velocity_of(q)
                .ok_or_else(|| MechanicsError::MissingVelocity(table.name(q).to_string()))
        })
        .collect()
}

/// Splits `R(x) = −V(x) + const`, taking as constant the coordinate-free
/// part when the denominator involves parameters only.
fn split_constant(r: &Expr, ps: &PhaseSpace) -> Result<(Expr, Expr)> {
    let table = r.table();
    let den = Expr::from_parts(
        r.denominator().clone(),
        crate::symcore::Poly::one(table.len()),
        table,
    )?;
    let constant = if den.is_parameter_only() {
        zero_out(r, &ps.coordinates())?
    } else {
        Expr::zero(table)
    };
    Ok((-(r - &constant), constant))
}

pub fn decompose_lagrangian(l: &Expr, ps: &PhaseSpace) -> Result<LagrangianModel> {
    let table = l.table();
    let vel = velocities_of(table, ps)?;
    if l.depends_on_any(&ps.momenta()) {
        return Err(MechanicsError::ForbiddenSymbols(
            "Lagrangian",
            SymbolKind::Momentum,
        ));
    }
    match l.polynomial_degree_in(&vel) {
        Some(d) if d <= 2 => {}
        _ => return Err(MechanicsError::NonQuadraticVelocity),
    }
    let n = vel.len();
    let mass = ExprMatrix::from_fn(n, n, |i, j| l.diff(vel[i]).diff(vel[j]));
    if mass.entries().any(|e| !e.is_parameter_only()) {
        return Err(MechanicsError::CoordinateDependentMass);
    }
    let coeffs = vel
        .iter()
        .map(|&v| zero_out(&l.diff(v), &vel))
        .collect::<Result<Vec<_>>>()?;
    let rest = zero_out(l, &vel)?;
    let (potential, constant) = split_constant(&rest, ps)?;
    let model = LagrangianModel {
        velocities: vel,
        mass_matrix: mass,
        velocity_coeffs: coeffs,
        potential,
        constant,
    };
    debug_assert_eq!(model.to_expr(), *l);
    Ok(model)
}

impl LagrangianModel {
    pub fn table(&self) -> &Arc<SymbolTable> {
        self.potential.table()
    }

    pub fn to_expr(&self) -> Expr {
        let table = self.table();
        let v: Vec<Expr> = self
            .velocities
            .iter()
            .map(|&s| Expr::symbol(table, s))
            .collect();
        let mv = self.mass_matrix.mul_vec(&v).expect("square mass matrix");
        let mut acc = &self.constant - &self.potential;
        for (i, vi) in v.iter().enumerate() {
            acc = acc + Expr::ratio(table, 1, 2) * vi * &mv[i] + &self.velocity_coeffs[i] * vi;
        }
        acc
    }
}

pub fn legendre(model: &LagrangianModel, ps: &PhaseSpace) -> Result<LegendreResult> {
    let table = model.table();
    let v: Vec<Expr> = model
        .velocities
        .iter()
        .map(|&s| Expr::symbol(table, s))
        .collect();
    let mv = model.mass_matrix.mul_vec(&v)?;
    let momenta: Vec<Expr> = mv
        .iter()
        .zip(&model.velocity_coeffs)
        .map(|(a, b)| a + b)
        .collect();
    let rank = model.mass_matrix.rank();
    let shifted: Vec<Expr> = ps
        .momenta()
        .iter()
        .zip(&model.velocity_coeffs)
        .map(|(&p, a)| Expr::symbol(table, p) - a)
        .collect();
    let primaries = model
        .mass_matrix
        .null_space()
        .into_iter()
        .map(|n| {
            n.iter()
                .zip(&shifted)
                .fold(Expr::zero(table), |acc, (c, s)| acc + c * s)
        })
        .collect();
    let base = &model.potential - &model.constant;
    let hamiltonian = if rank == 0 {
        HamiltonianModel {
            expr: base,
            kinetic_part: None,
        }
    } else {
        let g = model.mass_matrix.generalized_inverse()?;
        let gs = g.mul_vec(&shifted)?;
        let t = shifted
            .iter()
            .zip(&gs)
            .fold(Expr::zero(table), |acc, (a, b)| acc + a * b)
            * Expr::ratio(table, 1, 2);
        HamiltonianModel {
            expr: &t + &base,
            kinetic_part: Some(t),
        }
    };
    Ok(LegendreResult {
        momenta,
        hessian_rank: rank,
        primaries,
        hamiltonian,
    })
}

/// Recovers the Lagrangian of a Hamiltonian quadratic in the momenta with
/// constant invertible Hessian `W`: `M = W⁻¹`, `A = p − M ∂H/∂p`.
pub fn inverse_legendre(h: &HamiltonianModel, ps: &PhaseSpace) -> Result<LagrangianModel> {
    let e = &h.expr;
    let table = e.table();
    let vel = velocities_of(table, ps)?;
    let moms = ps.momenta();
    if e.depends_on_any(&vel) {
        return Err(MechanicsError::ForbiddenSymbols(
            "Hamiltonian",
            SymbolKind::Velocity,
        ));
    }
    match e.polynomial_degree_in(&moms) {
        Some(d) if d <= 2 => {}
        _ => return Err(MechanicsError::NotInvertibleInMomenta),
    }
    let n = moms.len();
    let w = ExprMatrix::from_fn(n, n, |i, j| e.diff(moms[i]).diff(moms[j]));
    if w.entries().any(|x| !x.is_parameter_only()) {
        return Err(MechanicsError::NotInvertibleInMomenta);
    }
    let m = w
        .inverse()
        .map_err(|_| MechanicsError::NotInvertibleInMomenta)?;
    let grad: Vec<Expr> = moms.iter().map(|&p| e.diff(p)).collect();
    let mg = m.mul_vec(&grad)?;
    let coeffs: Vec<Expr> = moms
        .iter()
        .zip(&mg)
        .map(|(&p, x)| Expr::symbol(table, p) - x)
        .collect();
    if coeffs.iter().any(|a| a.depends_on_any(&moms)) {
        return Err(MechanicsError::NotInvertibleInMomenta);
    }
    let shifted: Vec<Expr> = moms
        .iter()
        .zip(&coeffs)
        .map(|(&p, a)| Expr::symbol(table, p) - a)
        .collect();
    let ws = w.mul_vec(&shifted)?;
    let t = shifted
        .iter()
        .zip(&ws)
        .fold(Expr::zero(table), |acc, (a, b)| acc + a * b)
        * Expr::ratio(table, 1, 2);
    let rest = -(e - &t);
    if rest.depends_on_any(&moms) {
        return Err(MechanicsError::NotInvertibleInMomenta);
    }
    let (potential, constant) = split_constant(&rest, ps)?;
    Ok(LagrangianModel {
        velocities: vel,
        mass_matrix: m,
        velocity_coeffs: coeffs,
        potential,
        constant,
    })
}

/// Reads `T = Σ Kᵢ²/(2m)` off the designated kinetic part.
pub fn mechanical_momenta(h: &HamiltonianModel, ps: &PhaseSpace) -> Result<MechanicalMomenta> {
    let t = h
        .kinetic_part
        .as_ref()
        .ok_or(MechanicsError::NoKineticPart)?;
    let table = t.table();
    let moms = ps.momenta();
    let n = moms.len();
    let h11 = t.diff(moms[0]).diff(moms[0]);
    if h11.is_zero() || !h11.is_parameter_only() {
        return Err(MechanicsError::KineticForm(
            "Hessian in momenta is not constant".into(),
        ));
    }
    for i in 0..n {
        for j in 0..n {
            let hij = t.diff(moms[i]).diff(moms[j]);
            let want = if i == j {
                h11.clone()
            } else {
                Expr::zero(table)
            };
            if hij != want {
                return Err(MechanicsError::KineticForm(
                    "Hessian in momenta is not a multiple of the identity".into(),
                ));
            }
        }
    }
    let mass = h11.recip()?;
    let components: Vec<Expr> = moms.iter().map(|&p| &mass * &t.diff(p)).collect();
    let rebuilt = components
        .iter()
        .fold(Expr::zero(table), |acc, k| acc + k * k)
        .checked_div(&(Expr::integer(table, 2) * &mass))?;
    if rebuilt != *t {
        return Err(MechanicsError::KineticForm(
            "constant remainder outside the squares".into(),
        ));
    }
    let bracket_matrix = ExprMatrix::from_fn(n, n, |i, j| {
        poisson_bracket(&components[i], &components[j], ps)
    });
    Ok(MechanicalMomenta {
        mass,
        components,
        bracket_matrix,
    })
}

impl MechanicalMomenta {
    /// `[K_i, K_j] = iħ {K_i, K_j}` rendered as text.
    pub fn commutator_text(&self, i: usize, j: usize, hbar: &str) -> String {
        let b = self.bracket_matrix.get(i, j);
        if b.is_zero() {
            "0".into()
        } else {
            format!("i*{hbar}*({b})")
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct KineticLimit {
    pub h0: HamiltonianModel,
    pub l0: LagrangianModel,
}

/// Replaces the kinetic term by the scalar `level`.
pub fn kinetic_limit_reduce(
    h: &HamiltonianModel,
    l: &LagrangianModel,
    level: &Expr,
) -> Result<KineticLimit> {
    if level.is_zero() {
        return Err(MechanicsError::ZeroLevelExcluded);
    }
    if !level.is_parameter_only() {
        return Err(MechanicsError::LevelNotParametric);
    }
    let t = h
        .kinetic_part
        .as_ref()
        .ok_or(MechanicsError::NoKineticPart)?;
    let table = level.table();
    let n = l.velocities.len();
    Ok(KineticLimit {
        h0: HamiltonianModel {
            expr: &h.expr - t + level,
            kinetic_part: None,
        },
        l0: LagrangianModel {
            velocities: l.velocities.clone(),
            mass_matrix: ExprMatrix::zeros(table, n, n),
            velocity_coeffs: l.velocity_coeffs.clone(),
            potential: l.potential.clone(),
            constant: &l.constant - level,
        },
    })
}
