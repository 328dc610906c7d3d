#![allow(dead_code)]

use std::sync::Arc;

use proptest::prelude::*;
use spectator::symcore::{parse, Expr, PhaseSpace, SymbolTable, SymbolTableBuilder};

/// Planar phase space with the trap parameters, the flux aliases and a
/// reduced pair `X, P`.
pub fn trap_table() -> (Arc<SymbolTable>, PhaseSpace) {
    let mut b = SymbolTableBuilder::new();
    b.coordinate("x1").unwrap();
    b.coordinate("x2").unwrap();
    b.momentum("p1").unwrap();
    b.momentum("p2").unwrap();
    b.velocity("v1", "x1").unwrap();
    b.velocity("v2", "x2").unwrap();
    b.coordinate("X").unwrap();
    b.momentum("P").unwrap();
    for p in [
        "mu", "omega_c", "omega_0", "omega_P", "a", "hbar", "q", "c", "pi", "B0", "Phi0", "E_k",
    ] {
        b.parameter(p, true).unwrap();
    }
    b.alias("omega_0", "q*B0/(mu*c)").unwrap();
    b.alias("Phi0", "pi*a^2*B0").unwrap();
    let t = b.build().unwrap();
    let ps = PhaseSpace::new(vec![
        (t.get("x1").unwrap(), t.get("p1").unwrap()),
        (t.get("x2").unwrap(), t.get("p2").unwrap()),
    ])
    .unwrap();
    (t, ps)
}

pub fn ex(t: &Arc<SymbolTable>, s: &str) -> Expr {
    parse(s, t).unwrap_or_else(|e| panic!("parse `{s}`: {e}"))
}

/// Random term: coefficient in [-4, 4], exponents of x1, x2, p1, p2 with total
/// degree at most 3, optionally times a parameter.
fn term() -> impl Strategy<Value = (i64, [u32; 4], u8)> {
    (
        -4i64..=4,
        prop::array::uniform4(0u32..=3).prop_filter("degree <= 3", |e| e.iter().sum::<u32>() <= 3),
        0u8..3,
    )
}

/// Coefficient, exponents of `x1, x2, p1, p2`, parameter index.
pub type Terms = Vec<(i64, [u32; 4], u8)>;

pub fn build_poly(t: &Arc<SymbolTable>, terms: &[(i64, [u32; 4], u8)]) -> Expr {
    let vars = ["x1", "x2", "p1", "p2"];
    let params = ["1", "mu", "omega_c"];
    let mut acc = Expr::zero(t);
    for (c, e, k) in terms {
        let mut m = Expr::integer(t, *c) * ex(t, params[*k as usize]);
        for (v, &p) in vars.iter().zip(e) {
            m = m * ex(t, v).powi(p as i32).unwrap();
        }
        acc = acc + m;
    }
    acc
}

/// Random polynomial observable of degree at most 3.
pub fn poly_terms() -> impl Strategy<Value = Terms> {
    prop::collection::vec(term(), 1..5)
}

/// Random rational observable `f / (1 + g²)`, never singular.
pub fn rational_terms() -> impl Strategy<Value = (Terms, Terms)> {
    (poly_terms(), prop::collection::vec(term(), 0..3))
}

pub fn build_rational(t: &Arc<SymbolTable>, parts: &(Terms, Terms)) -> Expr {
    let f = build_poly(t, &parts.0);
    let g = build_poly(t, &parts.1);
    f / (Expr::one(t) + &g * &g)
}

pub const RHO2: &str = "(x1^2 + x2^2)";

/// Full planar Lagrangian: uniform field, flux line, static trap.
pub const L_FULL: &str = "1/2*mu*(v1^2 + v2^2) - 1/2*mu*omega_c*(v1*x2 - v2*x1) - mu*omega_0*a^2*(v1*x2 - v2*x1)/(2*(x1^2 + x2^2)) - 1/2*mu*omega_P^2*(x1^2 + x2^2)";
pub const H_FULL: &str = "1/(2*mu)*((p1 + 1/2*mu*omega_c*x2 + mu*omega_0*a^2*x2/(2*(x1^2 + x2^2)))^2 + (p2 - 1/2*mu*omega_c*x1 - mu*omega_0*a^2*x1/(2*(x1^2 + x2^2)))^2) + 1/2*mu*omega_P^2*(x1^2 + x2^2)";
/// Same without the uniform field.
pub const L_NO_FIELD: &str = "1/2*mu*(v1^2 + v2^2) - mu*omega_0*a^2*(v1*x2 - v2*x1)/(2*(x1^2 + x2^2)) - 1/2*mu*omega_P^2*(x1^2 + x2^2)";
/// Same without the flux line.
pub const L_NO_FLUX: &str =
    "1/2*mu*(v1^2 + v2^2) - 1/2*mu*omega_c*(v1*x2 - v2*x1) - 1/2*mu*omega_P^2*(x1^2 + x2^2)";

pub const PHI1: &str = "p1 + 1/2*mu*omega_c*x2 + mu*omega_0*a^2*x2/(2*(x1^2 + x2^2))";
pub const PHI2: &str = "p2 - 1/2*mu*omega_c*x1 - mu*omega_0*a^2*x1/(2*(x1^2 + x2^2))";

/// Random observable of degree at most 2 in the phase-space variables.
pub fn quadratic_terms() -> impl Strategy<Value = Terms> {
    let t = (
        -3i64..=3,
        prop::array::uniform4(0u32..=2).prop_filter("degree <= 2", |e| e.iter().sum::<u32>() <= 2),
        0u8..3,
    );
    prop::collection::vec(t, 1..5)
}

/// Hamiltonian and primary constraints of a Lagrangian taken to the kinetic
/// limit at `level`.
pub fn limit_system(
    t: &Arc<SymbolTable>,
    ps: &PhaseSpace,
    lagrangian: &str,
    level: &str,
) -> (spectator::mechanics::HamiltonianModel, Vec<Expr>) {
    use spectator::mechanics::{decompose_lagrangian, kinetic_limit_reduce, legendre};
    let full = decompose_lagrangian(&ex(t, lagrangian), ps).unwrap();
    let h = legendre(&full, ps).unwrap().hamiltonian;
    let lim = kinetic_limit_reduce(&h, &full, &ex(t, level)).unwrap();
    let r = legendre(&lim.l0, ps).unwrap();
    (r.hamiltonian, r.primaries)
}
