//! Exact symbolic algebra: rational functions in named symbols, canonicalized
//! as reduced numerator/denominator polynomial pairs over the rationals.

mod error;
mod expr;
mod matrix;
mod parse;
mod poly;
mod print;
mod symbols;

pub use error::SymError;
pub use expr::{sequential_substitute, Bindings, Expr};
pub use matrix::ExprMatrix;
pub use parse::parse;
pub use poly::{gcd, rational_sqrt, rational_to_f64, Monomial, Poly};
pub use symbols::{PhaseSpace, Symbol, SymbolId, SymbolKind, SymbolTable, SymbolTableBuilder};

/// `{f, g} = Σ (∂f/∂q ∂g/∂p - ∂f/∂p ∂g/∂q)` over the pairs of `space`.
pub fn poisson_bracket(f: &Expr, g: &Expr, space: &PhaseSpace) -> Expr {
    let mut acc = Expr::zero(f.table());
    for &(q, p) in space.pairs() {
        let a = f.diff(q) * g.diff(p);
        let b = f.diff(p) * g.diff(q);
        acc = acc + a - b;
    }
    acc
}
