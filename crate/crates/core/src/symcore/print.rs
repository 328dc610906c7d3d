//! Deterministic printer. Output re-parses to an equal expression.

use num_rational::BigRational;
use num_traits::{One, Signed};

use super::expr::Expr;
use super::poly::{Monomial, Poly};
use super::symbols::SymbolTable;

fn monomial(m: &Monomial, table: &SymbolTable) -> String {
    let mut parts = Vec::new();
    for (i, &e) in m.exponents().iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(table.name(super::SymbolId(i)).to_string()),
            _ => parts.push(format!("{}^{}", table.name(super::SymbolId(i)), e)),
        }
    }
    parts.join("*")
}

fn term(m: &Monomial, c: &BigRational, table: &SymbolTable) -> String {
    // `c` is positive here; signs are emitted by the caller.
    if m.is_one() {
        return c.to_string();
    }
    let mono = monomial(m, table);
    if c.is_one() {
        mono
    } else if c.is_integer() {
        format!("{c}*{mono}")
    } else if c.numer().is_one() {
        format!("{mono}/{}", c.denom())
    } else {
        format!("{}*{mono}/{}", c.numer(), c.denom())
    }
}

pub(crate) fn poly(p: &Poly, table: &SymbolTable) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (k, (m, c)) in p.terms().enumerate() {
        let neg = c.is_negative();
        let t = term(m, &c.abs(), table);
        match (k, neg) {
            (0, false) => out.push_str(&t),
            (0, true) => {
                out.push('-');
                out.push_str(&t);
            }
            (_, false) => {
                out.push_str(" + ");
                out.push_str(&t);
            }
            (_, true) => {
                out.push_str(" - ");
                out.push_str(&t);
            }
        }
    }
    out
}

/// A single power of a single symbol, safe to print unparenthesized after `/`.
fn is_bare_power(p: &Poly) -> bool {
    p.len() == 1
        && p.leading().is_some_and(|(m, c)| {
            c.is_one() && m.exponents().iter().filter(|&&e| e > 0).count() == 1
        })
}

/// `c·m / (d·dm)` after cancelling common powers; `c` positive.
fn term_over(m: &Monomial, c: &BigRational, dm: &Monomial, table: &SymbolTable) -> String {
    let (mut top, mut bottom) = (Vec::new(), Vec::new());
    for (&a, &b) in m.exponents().iter().zip(dm.exponents()) {
        let k = a.min(b);
        top.push(a - k);
        bottom.push(b - k);
    }
    let top = Monomial::from_exponents(top);
    let bottom = Monomial::from_exponents(bottom);
    let numer = BigRational::from_integer(c.numer().clone());
    let denom = BigRational::from_integer(c.denom().clone());
    let t = term(&top, &numer, table);
    if bottom.is_one() && denom.is_one() {
        return t;
    }
    let b = term(&bottom, &denom, table);
    if bottom.is_one()
        || (denom.is_one() && bottom.exponents().iter().filter(|&&e| e > 0).count() == 1)
    {
        format!("{t}/{b}")
    } else {
        format!("{t}/({b})")
    }
}

pub(crate) fn render(e: &Expr) -> String {
    let table = e.table();
    let num = e.numerator();
    let den = e.denominator();
    if den.is_one_poly() {
        return poly(num, table);
    }
    // Monomial denominator: distribute it over the numerator terms.
    if den.len() == 1 {
        let (dm, dc) = den.leading().expect("nonzero denominator");
        let mut out = String::new();
        for (k, (m, c)) in num.terms().enumerate() {
            let c = c / dc;
            let t = term_over(m, &c.abs(), dm, table);
            match (k, c.is_negative()) {
                (0, false) => {}
                (0, true) => out.push('-'),
                (_, false) => out.push_str(" + "),
                (_, true) => out.push_str(" - "),
            }
            out.push_str(&t);
        }
        return out;
    }
    let n = poly(num, table);
    let n = if num.len() > 1 || n.contains('/') {
        format!("({n})")
    } else {
        n
    };
    let d = poly(den, table);
    if is_bare_power(den) {
        format!("{n}/{d}")
    } else {
        format!("{n}/({d})")
    }
}

impl Poly {
    pub(crate) fn is_one_poly(&self) -> bool {
        self.constant_value().is_some_and(|c| c.is_one())
    }
}
