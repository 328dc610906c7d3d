//! Dirac–Bergmann consistency algorithm, constraint classification, Dirac
//! brackets, and elimination of second-class constraints.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::mechanics::HamiltonianModel;
use crate::symcore::{
    poisson_bracket, sequential_substitute, Bindings, Expr, ExprMatrix, PhaseSpace, SymError,
    SymbolId, SymbolTable,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiracError {
    #[error(transparent)]
    Sym(#[from] SymError),
    #[error("constraint chain did not close within {0} generations")]
    ChainOverflow(usize),
    #[error("constraint matrix is not invertible")]
    NotInvertible,
    #[error("quantization blocked: {0:?}")]
    QuantizationBlocked(Vec<BlockReason>),
    #[error("constraint is not affine in the dependent variables: {0}")]
    NonAffine(String),
    #[error("constraints cannot be solved for the chosen dependent variables")]
    BadChoice,
    #[error("independent variables do not form canonical pairs: {0}")]
    NonCanonical(String),
}

type Result<T> = std::result::Result<T, DiracError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintClass {
    SecondClass,
    FirstClass,
    Undetermined,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub expr: Expr,
    pub generation: usize,
    pub class: ConstraintClass,
}

impl Constraint {
    pub fn primary(expr: Expr) -> Self {
        Constraint {
            expr,
            generation: 1,
            class: ConstraintClass::Undetermined,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintMatrix {
    pub entries: ExprMatrix,
    pub determinant: Expr,
    pub invertible: bool,
    pub inverse: Option<ExprMatrix>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Reducible,
    QuantizationBlocked,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockReason {
    /// Second-class constraints remove every phase-space dimension.
    NoDegreesOfFreedom,
    /// The constraint surface meets a singularity of the constraints.
    SingularSurface,
    /// The second-class block is not invertible.
    NonInvertibleMatrix,
    /// First-class constraints remain (gauge fixing is not attempted).
    FirstClassPresent,
}

#[derive(Clone, Debug)]
pub struct ConstraintAnalysis {
    pub phase_space: PhaseSpace,
    pub constraints: Vec<Constraint>,
    /// Brackets among the primaries only.
    pub primary_matrix: ConstraintMatrix,
    /// Brackets among all generations.
    pub full_matrix: ExprMatrix,
    /// Second-class block.
    pub matrix: ConstraintMatrix,
    pub surface: Surface,
    pub outcome: Outcome,
    pub blocked_reasons: Vec<BlockReason>,
    pub dirac_table: Option<BTreeMap<(SymbolId, SymbolId), Expr>>,
}

/// Triangular description of the constraint surface: each constraint solved
/// for one affine variable after the previous bindings were applied.
#[derive(Clone, Debug, Default)]
pub struct Surface {
    pub steps: Vec<(SymbolId, Expr)>,
    pub singular: bool,
}

impl Surface {
    fn build(constraints: &[Expr], ps: &PhaseSpace) -> Surface {
        let mut s = Surface::default();
        let order: Vec<SymbolId> = ps.momenta().into_iter().chain(ps.coordinates()).collect();
        for c in constraints {
            let (reduced, singular) = s.apply_lenient(c);
            s.singular |= singular;
            if reduced.is_zero() {
                continue;
            }
            for &v in &order {
                if s.steps.iter().any(|(b, _)| *b == v) || !reduced.depends_on(v) {
                    continue;
                }
                if reduced.polynomial_degree_in(&[v]) != Some(1) {
                    continue;
                }
                let a = reduced.coefficient(v, 1).expect("polynomial in v");
                let b = reduced.coefficient(v, 0).expect("polynomial in v");
                if a.depends_on(v) {
                    continue;
                }
                if let Ok(val) = (-b).checked_div(&a) {
                    s.steps.push((v, val));
                    break;
                }
            }
        }
        // Resolve every binding fully; a division by zero here means the
        // surface passes through a singular point of the constraints.
        for (_, v) in &s.steps {
            if sequential_substitute(v, &s.steps).is_err() {
                s.singular = true;
            }
        }
        s
    }

    /// Applies the bindings in order, skipping any that would divide by zero.
    pub fn apply_lenient(&self, e: &Expr) -> (Expr, bool) {
        let mut cur = e.clone();
        let mut singular = false;
        for (s, v) in &self.steps {
            match cur.substitute_one(*s, v) {
                Ok(x) => cur = x,
                Err(_) => singular = true,
            }
        }
        (cur, singular)
    }

    pub fn restrict(&self, e: &Expr) -> Expr {
        self.apply_lenient(e).0
    }
}

fn matrix_info(entries: ExprMatrix, table: &Arc<SymbolTable>) -> ConstraintMatrix {
    if entries.rows() == 0 {
        return ConstraintMatrix {
            entries,
            determinant: Expr::one(table),
            invertible: true,
            inverse: None,
        };
    }
    let determinant = entries.determinant().expect("square");
    let invertible = !determinant.is_zero();
    let inverse = if invertible {
        entries.inverse().ok()
    } else {
        None
    };
    ConstraintMatrix {
        entries,
        determinant,
        invertible,
        inverse,
    }
}

pub fn build_constraint_matrix(
    constraints: &[Constraint],
    ps: &PhaseSpace,
    table: &Arc<SymbolTable>,
) -> ConstraintMatrix {
    let exprs: Vec<Expr> = constraints.iter().map(|c| c.expr.clone()).collect();
    let surface = Surface::build(&exprs, ps);
    matrix_info(bracket_matrix(&exprs, &exprs, ps, &surface), table)
}

fn bracket_matrix(rows: &[Expr], cols: &[Expr], ps: &PhaseSpace, surface: &Surface) -> ExprMatrix {
    ExprMatrix::from_fn(rows.len(), cols.len(), |i, j| {
        surface.restrict(&poisson_bracket(&rows[i], &cols[j], ps))
    })
}

/// Secondary (and later) constraints from demanding persistence of the
/// primaries under `H`. Returns all generations, primaries first.
pub fn consistency_chain(
    h: &HamiltonianModel,
    primaries: &[Constraint],
    ps: &PhaseSpace,
    max_gen: usize,
) -> Result<Vec<Constraint>> {
    let mut all: Vec<Constraint> = primaries.to_vec();
    if all.is_empty() {
        return Ok(all);
    }
    let prim: Vec<Expr> = primaries.iter().map(|c| c.expr.clone()).collect();
    let mut generation = 1;
    loop {
        let exprs: Vec<Expr> = all.iter().map(|c| c.expr.clone()).collect();
        let surface = Surface::build(&exprs, ps);
        let m = bracket_matrix(&exprs, &prim, ps, &surface);
        let hv: Vec<Expr> = exprs
            .iter()
            .map(|c| surface.restrict(&poisson_bracket(c, &h.expr, ps)))
            .collect();
        let mut fresh = Vec::new();
        for w in m.left_null_space() {
            let val = w
                .iter()
                .zip(&hv)
                .fold(Expr::zero(h.expr.table()), |acc, (a, b)| acc + a * b);
            let val = surface.restrict(&val);
            if val.is_zero() {
                continue;
            }
            let mut with = exprs.clone();
            with.extend(fresh.iter().cloned());
            let before = Surface::build(&with, ps);
            if before.restrict(&val).is_zero() {
                continue;
            }
            fresh.push(val);
        }
        if fresh.is_empty() {
            return Ok(all);
        }
        generation += 1;
        if generation > max_gen {
            return Err(DiracError::ChainOverflow(max_gen));
        }
        all.extend(fresh.into_iter().map(|expr| Constraint {
            expr,
            generation,
            class: ConstraintClass::Undetermined,
        }));
    }
}

/// Full analysis: chain, classification, matrices, outcome and Dirac table.
pub fn analyze(
    h: &HamiltonianModel,
    primaries: &[Expr],
    ps: &PhaseSpace,
    max_gen: usize,
) -> Result<ConstraintAnalysis> {
    let prim: Vec<Constraint> = primaries.iter().cloned().map(Constraint::primary).collect();
    let mut constraints = consistency_chain(h, &prim, ps, max_gen)?;
    let exprs: Vec<Expr> = constraints.iter().map(|c| c.expr.clone()).collect();
    let surface = Surface::build(&exprs, ps);
    let full = bracket_matrix(&exprs, &exprs, ps, &surface);
    for (i, c) in constraints.iter_mut().enumerate() {
        c.class = if full.row(i).iter().all(Expr::is_zero) {
            ConstraintClass::FirstClass
        } else {
            ConstraintClass::SecondClass
        };
    }
    let table = h.expr.table();
    let primary_matrix = matrix_info(bracket_matrix(primaries, primaries, ps, &surface), table);
    let second: Vec<usize> = (0..constraints.len())
        .filter(|&i| constraints[i].class == ConstraintClass::SecondClass)
        .collect();
    let block = ExprMatrix::from_fn(second.len(), second.len(), |i, j| {
        full.get(second[i], second[j]).clone()
    });
    let matrix = if second.is_empty() {
        primary_matrix.clone()
    } else {
        matrix_info(block, table)
    };

    let mut reasons = Vec::new();
    if second.len() < constraints.len() {
        reasons.push(BlockReason::FirstClassPresent);
    }
    if !second.is_empty() && !matrix.invertible {
        reasons.push(BlockReason::NonInvertibleMatrix);
    }
    if !constraints.is_empty() && second.len() >= 2 * ps.dim() {
        reasons.push(BlockReason::NoDegreesOfFreedom);
    }
    if surface.singular {
        reasons.push(BlockReason::SingularSurface);
    }
    let outcome = if reasons.is_empty() {
        Outcome::Reducible
    } else {
        Outcome::QuantizationBlocked
    };

    let mut analysis = ConstraintAnalysis {
        phase_space: ps.clone(),
        constraints,
        primary_matrix,
        full_matrix: full,
        matrix,
        surface,
        outcome,
        blocked_reasons: reasons,
        dirac_table: None,
    };
    if outcome == Outcome::Reducible {
        let vars = ps.variables();
        let mut table = BTreeMap::new();
        for (i, &a) in vars.iter().enumerate() {
            for &b in &vars[i + 1..] {
                let ea = Expr::symbol(h.expr.table(), a);
                let eb = Expr::symbol(h.expr.table(), b);
                table.insert((a, b), analysis.dirac_bracket(&ea, &eb)?);
            }
        }
        analysis.dirac_table = Some(table);
    }
    Ok(analysis)
}

/// `{f,g}_D = {f,g} − {f,φ_a}(C⁻¹)_ab{φ_b,g}` over the given constraints.
pub fn dirac_bracket(
    f: &Expr,
    g: &Expr,
    cm: &ConstraintMatrix,
    constraints: &[Constraint],
    ps: &PhaseSpace,
) -> Result<Expr> {
    let mut acc = poisson_bracket(f, g, ps);
    if constraints.is_empty() {
        return Ok(acc);
    }
    let inv = cm.inverse.as_ref().ok_or(DiracError::NotInvertible)?;
    let fa: Vec<Expr> = constraints
        .iter()
        .map(|c| poisson_bracket(f, &c.expr, ps))
        .collect();
    let bg: Vec<Expr> = constraints
        .iter()
        .map(|c| poisson_bracket(&c.expr, g, ps))
        .collect();
    for (a, fa) in fa.iter().enumerate() {
        if fa.is_zero() {
            continue;
        }
        for (b, bg) in bg.iter().enumerate() {
            let cab = inv.get(a, b);
            if !cab.is_zero() && !bg.is_zero() {
                acc = acc - fa * cab * bg;
            }
        }
    }
    Ok(acc)
}

impl ConstraintAnalysis {
    pub fn second_class(&self) -> Vec<Constraint> {
        self.constraints
            .iter()
            .filter(|c| c.class == ConstraintClass::SecondClass)
            .cloned()
            .collect()
    }

    pub fn dirac_bracket(&self, f: &Expr, g: &Expr) -> Result<Expr> {
        dirac_bracket(f, g, &self.matrix, &self.second_class(), &self.phase_space)
    }

    pub fn is_reducible(&self) -> bool {
        self.outcome == Outcome::Reducible
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReducedPair {
    pub x: SymbolId,
    pub p: SymbolId,
    pub x_def: Expr,
    pub p_def: Expr,
}

#[derive(Clone, Debug)]
pub struct ReducedCanonicalSystem {
    pub pairs: Vec<ReducedPair>,
    /// Dependent phase-space variables in terms of the independent ones.
    pub elimination: Bindings,
    /// Independent variables in terms of the reduced pairs.
    pub to_reduced: Bindings,
    pub reduced_h: Expr,
}

impl ReducedCanonicalSystem {
    /// Eliminates dependent variables; the result is in the original
    /// independent variables.
    pub fn eliminate(&self, e: &Expr) -> Result<Expr> {
        Ok(e.substitute(&self.elimination)?)
    }

    /// Writes an observable in the reduced canonical pairs.
    pub fn express(&self, e: &Expr) -> Result<Expr> {
        Ok(self.eliminate(e)?.substitute(&self.to_reduced)?)
    }
}

/// Eliminates the dependent variables and pairs the remaining ones.
/// `independent` lists the variables kept (consecutive entries form pairs);
/// `names` gives the symbols of the reduced pairs.
pub fn reduce(
    analysis: &ConstraintAnalysis,
    h: &HamiltonianModel,
    independent: &[SymbolId],
    names: &[(SymbolId, SymbolId)],
) -> Result<ReducedCanonicalSystem> {
    if !analysis.is_reducible() {
        return Err(DiracError::QuantizationBlocked(
            analysis.blocked_reasons.clone(),
        ));
    }
    let table = h.expr.table();
    let ps = &analysis.phase_space;
    let dependent: Vec<SymbolId> = ps
        .variables()
        .into_iter()
        .filter(|v| !independent.contains(v))
        .collect();
    let second = analysis.second_class();
    if dependent.len() != second.len() || independent.len() != 2 * names.len() {
        return Err(DiracError::BadChoice);
    }
    // φ = B d + b with B free of the dependents.
    let n = dependent.len();
    let zero: Bindings = dependent.iter().map(|&d| (d, Expr::zero(table))).collect();
    let mut b_mat = ExprMatrix::zeros(table, n, n);
    let mut rhs = Vec::with_capacity(n);
    for (i, c) in second.iter().enumerate() {
        if c.expr
            .polynomial_degree_in(&dependent)
            .is_none_or(|d| d > 1)
        {
            return Err(DiracError::NonAffine(c.expr.to_string()));
        }
        for (j, &d) in dependent.iter().enumerate() {
            let coeff = c.expr.diff(d);
            if coeff.depends_on_any(&dependent) {
                return Err(DiracError::NonAffine(c.expr.to_string()));
            }
            b_mat.set(i, j, coeff);
        }
        rhs.push(-c.expr.substitute(&zero)?);
    }
    let elimination: Bindings = if n == 0 {
        Bindings::new()
    } else {
        let inv = b_mat.inverse().map_err(|_| DiracError::BadChoice)?;
        let sol = inv.mul_vec(&rhs)?;
        dependent.iter().copied().zip(sol).collect()
    };
    for c in &second {
        if !c.expr.substitute(&elimination)?.is_zero() {
            return Err(DiracError::BadChoice);
        }
    }

    let mut pairs = Vec::new();
    let mut to_reduced = Bindings::new();
    for (k, &(xs, psym)) in names.iter().enumerate() {
        let u = independent[2 * k];
        let v = independent[2 * k + 1];
        let eu = Expr::symbol(table, u);
        let ev = Expr::symbol(table, v);
        let c = analysis.dirac_bracket(&eu, &ev)?;
        if c.is_zero() || !c.is_parameter_only() {
            return Err(DiracError::NonCanonical(format!(
                "{{{}, {}}}_D = {c}",
                table.name(u),
                table.name(v)
            )));
        }
        pairs.push(ReducedPair {
            x: xs,
            p: psym,
            x_def: eu,
            p_def: ev.checked_div(&c)?,
        });
        to_reduced.insert(u, Expr::symbol(table, xs));
        to_reduced.insert(v, &c * &Expr::symbol(table, psym));
    }
    for (i, &a) in independent.iter().enumerate() {
        for &b in &independent[i + 1..] {
            let same_pair = i % 2 == 0 && independent.get(i + 1) == Some(&b);
            if same_pair {
                continue;
            }
            let d = analysis.dirac_bracket(&Expr::symbol(table, a), &Expr::symbol(table, b))?;
            if !d.is_zero() {
                return Err(DiracError::NonCanonical(format!(
                    "{{{}, {}}}_D = {d}",
                    table.name(a),
                    table.name(b)
                )));
            }
        }
    }
    let reduced_h = h.expr.substitute(&elimination)?.substitute(&to_reduced)?;
    Ok(ReducedCanonicalSystem {
        pairs,
        elimination,
        to_reduced,
        reduced_h,
    })
}
