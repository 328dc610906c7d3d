use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::error::SymError;
use super::poly::{gcd, Poly};
use super::symbols::{SymbolId, SymbolKind, SymbolTable};

/// Exact rational function in the symbols of one [`SymbolTable`].
///
/// Always stored in canonical form: numerator and denominator coprime and
/// the denominator's leading coefficient equal to one. Structural equality is
/// therefore mathematical equality.
#[derive(Clone)]
pub struct Expr {
    num: Poly,
    den: Poly,
    table: Arc<SymbolTable>,
}

/// Simultaneous substitution `symbol -> replacement`.
pub type Bindings = BTreeMap<SymbolId, Expr>;

impl Expr {
    /// Builds `num / den` in canonical form.
    pub fn from_parts(num: Poly, den: Poly, table: &Arc<SymbolTable>) -> Result<Expr, SymError> {
        if den.is_zero() {
            return Err(SymError::DivisionByZero);
        }
        let n = table.len();
        if num.is_zero() {
            return Ok(Expr::zero(table));
        }
        let (num, den) = if den.is_constant() {
            (num, den)
        } else {
            let g = gcd(&num, &den);
            if g.is_constant() {
                (num, den)
            } else {
                (
                    num.div_exact(&g).expect("gcd divides numerator"),
                    den.div_exact(&g).expect("gcd divides denominator"),
                )
            }
        };
        let lc = den.leading_coeff();
        let (num, den) = if lc.is_one() {
            (num, den)
        } else {
            let inv = lc.recip();
            (num.scale(&inv), den.scale(&inv))
        };
        debug_assert_eq!(num.nvars(), n);
        Ok(Expr {
            num,
            den,
            table: Arc::clone(table),
        })
    }

    /// Sum or difference of canonical inputs with the denominator gcd taken
    /// first, so the final reduction only involves that gcd.
    fn combine(a: &Expr, b: &Expr, subtract: bool) -> Expr {
        let join = |x: &Poly, y: &Poly| if subtract { x - y } else { x + y };
        if a.den == b.den {
            return Expr::from_parts(join(&a.num, &b.num), a.den.clone(), &a.table)
                .expect("nonzero denominator");
        }
        if a.den.is_constant() || b.den.is_constant() {
            return Expr::normalized(
                join(&(&a.num * &b.den), &(&b.num * &a.den)),
                &a.den * &b.den,
                &a.table,
            );
        }
        let g = gcd(&a.den, &b.den);
        if g.is_constant() {
            return Expr::normalized(
                join(&(&a.num * &b.den), &(&b.num * &a.den)),
                &a.den * &b.den,
                &a.table,
            );
        }
        let ad = exact(&a.den, &g);
        let bd = exact(&b.den, &g);
        let t = join(&(&a.num * &bd), &(&b.num * &ad));
        if t.is_zero() {
            return Expr::zero(&a.table);
        }
        let g2 = gcd(&t, &g);
        Expr::normalized(exact(&t, &g2), &ad * &exact(&b.den, &g2), &a.table)
    }

    /// `num / den` already coprime; only the leading coefficient is fixed.
    fn normalized(num: Poly, den: Poly, table: &Arc<SymbolTable>) -> Expr {
        if num.is_zero() {
            return Expr::zero(table);
        }
        let lc = den.leading_coeff();
        let (num, den) = if lc.is_one() {
            (num, den)
        } else {
            let inv = lc.recip();
            (num.scale(&inv), den.scale(&inv))
        };
        Expr {
            num,
            den,
            table: Arc::clone(table),
        }
    }

    pub(crate) fn from_poly(num: Poly, table: &Arc<SymbolTable>) -> Expr {
        Expr {
            den: Poly::one(table.len()),
            num,
            table: Arc::clone(table),
        }
    }

    pub fn zero(table: &Arc<SymbolTable>) -> Expr {
        Expr::from_poly(Poly::zero(table.len()), table)
    }

    pub fn one(table: &Arc<SymbolTable>) -> Expr {
        Expr::from_poly(Poly::one(table.len()), table)
    }

    pub fn rational(table: &Arc<SymbolTable>, c: BigRational) -> Expr {
        Expr::from_poly(Poly::constant(table.len(), c), table)
    }

    pub fn integer(table: &Arc<SymbolTable>, n: i64) -> Expr {
        Expr::rational(table, BigRational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(table: &Arc<SymbolTable>, n: i64, d: i64) -> Expr {
        Expr::rational(table, BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn symbol(table: &Arc<SymbolTable>, id: SymbolId) -> Expr {
        Expr::from_poly(Poly::var(table.len(), id.index()), table)
    }

    pub fn table(&self) -> &Arc<SymbolTable> {
        &self.table
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_constant() && self.num == self.den
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    /// Value when the expression contains no symbols at all.
    pub fn as_rational(&self) -> Option<BigRational> {
        let n = self.num.constant_value()?;
        let d = self.den.constant_value()?;
        Some(n / d)
    }

    pub fn free_symbols(&self) -> BTreeSet<SymbolId> {
        self.num
            .used_vars()
            .into_iter()
            .chain(self.den.used_vars())
            .map(SymbolId)
            .collect()
    }

    pub fn depends_on(&self, s: SymbolId) -> bool {
        self.num.contains_var(s.index()) || self.den.contains_var(s.index())
    }

    pub fn depends_on_any(&self, symbols: &[SymbolId]) -> bool {
        symbols.iter().any(|&s| self.depends_on(s))
    }

    /// True when every free symbol is a parameter.
    pub fn is_parameter_only(&self) -> bool {
        self.free_symbols()
            .iter()
            .all(|&s| self.table.kind(s) == SymbolKind::Parameter)
    }

    /// True when the symbols of this expression are all of `kind`s listed.
    pub fn only_kinds(&self, kinds: &[SymbolKind]) -> bool {
        self.free_symbols()
            .iter()
            .all(|&s| kinds.contains(&self.table.kind(s)))
    }

    fn check_table(&self, other: &Expr) {
        assert!(
            Arc::ptr_eq(&self.table, &other.table),
            "expressions belong to different symbol tables"
        );
    }

    pub fn checked_div(&self, rhs: &Expr) -> Result<Expr, SymError> {
        if !Arc::ptr_eq(&self.table, &rhs.table) {
            return Err(SymError::TableMismatch);
        }
        if rhs.is_zero() {
            return Err(SymError::DivisionByZero);
        }
        Expr::from_parts(&self.num * &rhs.den, &self.den * &rhs.num, &self.table)
    }

    pub fn recip(&self) -> Result<Expr, SymError> {
        Expr::one(&self.table).checked_div(self)
    }

    pub fn powi(&self, n: i32) -> Result<Expr, SymError> {
        if n >= 0 {
            let e = n as u32;
            Ok(Expr {
                num: self.num.pow(e),
                den: self.den.pow(e),
                table: Arc::clone(&self.table),
            }
            .renormalized())
        } else {
            self.recip()?.powi(-n)
        }
    }

    // Powers of a canonical fraction stay coprime; only the leading
    // coefficient of the denominator may need rescaling.
    fn renormalized(self) -> Expr {
        let lc = self.den.leading_coeff();
        if lc.is_one() {
            self
        } else {
            let inv = lc.recip();
            Expr {
                num: self.num.scale(&inv),
                den: self.den.scale(&inv),
                table: self.table,
            }
        }
    }

    pub fn scale(&self, c: &BigRational) -> Expr {
        Expr {
            num: self.num.scale(c),
            den: self.den.clone(),
            table: Arc::clone(&self.table),
        }
        .zero_fixed()
    }

    fn zero_fixed(self) -> Expr {
        if self.num.is_zero() {
            Expr::zero(&self.table)
        } else {
            self
        }
    }

    /// Exact partial derivative.
    pub fn diff(&self, s: SymbolId) -> Expr {
        let i = s.index();
        let dn = self.num.derivative(i);
        if self.den.is_constant() {
            return Expr::from_parts(dn, self.den.clone(), &self.table)
                .expect("nonzero denominator");
        }
        let dd = self.den.derivative(i);
        if dd.is_zero() {
            return Expr::from_parts(dn, self.den.clone(), &self.table)
                .expect("nonzero denominator");
        }
        // With g = gcd(d, d'), e = d/g: (n'e - n d'/g) / (d e) is already in
        // lowest terms (char 0, numerator coprime to d).
        let g = gcd(&self.den, &dd);
        let e = exact(&self.den, &g);
        let num = &(&dn * &e) - &(&self.num * &exact(&dd, &g));
        Expr::normalized(num, &self.den * &e, &self.table)
    }

    fn eval_poly(p: &Poly, bindings: &Bindings, table: &Arc<SymbolTable>) -> Expr {
        let n = table.len();
        let mut total = Expr::zero(table);
        // Plain terms are summed as a polynomial; only bound variables go
        // through rational arithmetic.
        let mut plain = Poly::zero(n);
        for (m, c) in p.terms() {
            let mut mono_rest = vec![0u32; n];
            let mut factor = Expr::one(table);
            let mut bound = false;
            for (v, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                match bindings.get(&SymbolId(v)) {
                    Some(val) => {
                        bound = true;
                        factor = &factor * &val.powi(e as i32).expect("nonnegative power");
                    }
                    None => mono_rest[v] = e,
                }
            }
            let rest = Poly::term(super::poly::Monomial::from_exponents(mono_rest), c.clone());
            if bound {
                total = &total + &(&factor * &Expr::from_poly(rest, table));
            } else {
                plain = &plain + &rest;
            }
        }
        &total + &Expr::from_poly(plain, table)
    }

    /// Simultaneous substitution. Replacements may not mention any symbol
    /// being replaced.
    pub fn substitute(&self, bindings: &Bindings) -> Result<Expr, SymError> {
        for (s, replacement) in bindings {
            self.check_table(replacement);
            if bindings.keys().any(|k| replacement.depends_on(*k)) {
                return Err(SymError::RecursiveBinding(self.table.name(*s).to_string()));
            }
        }
        if !bindings.keys().any(|&s| self.depends_on(s)) {
            return Ok(self.clone());
        }
        let n = Expr::eval_poly(&self.num, bindings, &self.table);
        let d = Expr::eval_poly(&self.den, bindings, &self.table);
        n.checked_div(&d)
    }

    /// Shifts `s → s + δ_s` simultaneously. The shifts may not mention any
    /// shifted symbol.
    pub fn translate(&self, shifts: &Bindings) -> Result<Expr, SymError> {
        let mut b = Bindings::new();
        for (s, delta) in shifts {
            self.check_table(delta);
            if shifts.keys().any(|k| delta.depends_on(*k)) {
                return Err(SymError::RecursiveBinding(self.table.name(*s).to_string()));
            }
            b.insert(*s, &Expr::symbol(&self.table, *s) + delta);
        }
        if !b.keys().any(|&s| self.depends_on(s)) {
            return Ok(self.clone());
        }
        let n = Expr::eval_poly(&self.num, &b, &self.table);
        let d = Expr::eval_poly(&self.den, &b, &self.table);
        n.checked_div(&d)
    }

    pub fn substitute_one(&self, s: SymbolId, value: &Expr) -> Result<Expr, SymError> {
        let mut b = Bindings::new();
        b.insert(s, value.clone());
        self.substitute(&b)
    }

    /// Repeatedly expands alias definitions until no aliased symbol remains.
    pub fn expand_aliases(&self) -> Expr {
        let aliases = &self.table.aliases;
        if aliases.is_empty() {
            return self.clone();
        }
        let bindings: Bindings = aliases
            .iter()
            .map(|a| {
                (
                    a.symbol,
                    Expr::from_parts(a.num.clone(), a.den.clone(), &self.table)
                        .expect("alias denominators are nonzero"),
                )
            })
            .collect();
        let mut current = self.clone();
        for _ in 0..=aliases.len() {
            let step: Vec<(SymbolId, Expr)> = bindings
                .iter()
                .filter(|(s, _)| current.depends_on(**s))
                .map(|(s, e)| (*s, e.clone()))
                .collect();
            if step.is_empty() {
                return current;
            }
            current = sequential_substitute(&current, &step)
                .expect("alias definitions have nonzero denominators");
        }
        current
    }

    /// Mathematical equality after expanding aliases on both sides.
    pub fn equivalent(&self, other: &Expr) -> bool {
        self == other || self.expand_aliases() == other.expand_aliases()
    }

    /// Square root when both numerator and denominator are perfect squares.
    pub fn sqrt(&self) -> Option<Expr> {
        let n = self.num.sqrt()?;
        let d = self.den.sqrt()?;
        Expr::from_parts(n, d, &self.table).ok()
    }

    /// Sufficient test for strict positivity: every coefficient positive and
    /// every symbol a parameter declared positive.
    pub fn is_manifestly_positive(&self) -> bool {
        let syms_ok = self.free_symbols().iter().all(|&s| {
            let sym = self.table.symbol(s);
            sym.kind == SymbolKind::Parameter && sym.positive
        });
        syms_ok && self.num.coefficients_positive() && self.den.coefficients_positive()
    }

    pub fn eval_f64(&self, values: &HashMap<SymbolId, f64>) -> Option<f64> {
        let mut v = vec![f64::NAN; self.table.len()];
        for s in self.free_symbols() {
            v[s.index()] = *values.get(&s)?;
        }
        Some(self.num.eval_f64(&v) / self.den.eval_f64(&v))
    }

    /// Coefficient of `s^k` when the expression is viewed as a polynomial in
    /// `s` (the denominator must not involve `s`).
    pub fn coefficient(&self, s: SymbolId, k: u32) -> Option<Expr> {
        if self.den.contains_var(s.index()) {
            return None;
        }
        let coeffs = self.num.to_univariate(s.index());
        let c = coeffs
            .get(k as usize)
            .cloned()
            .unwrap_or_else(|| Poly::zero(self.table.len()));
        Some(Expr::from_parts(c, self.den.clone(), &self.table).expect("nonzero denominator"))
    }

    /// Degree in `s` of the numerator, provided the denominator is free of `s`.
    pub fn polynomial_degree_in(&self, symbols: &[SymbolId]) -> Option<u32> {
        if symbols.iter().any(|s| self.den.contains_var(s.index())) {
            return None;
        }
        let idx: Vec<usize> = symbols.iter().map(|s| s.index()).collect();
        Some(self.num.degree_in_set(&idx))
    }
}

/// Applies single-variable bindings one after another, in order.
pub fn sequential_substitute(e: &Expr, steps: &[(SymbolId, Expr)]) -> Result<Expr, SymError> {
    let mut current = e.clone();
    for (s, v) in steps {
        current = current.substitute_one(*s, v)?;
    }
    Ok(current)
}

pub(crate) fn check_aliases_acyclic(table: &Arc<SymbolTable>) -> Result<(), SymError> {
    for alias in &table.aliases {
        let e = Expr::symbol(table, alias.symbol).expand_aliases();
        if table.aliases.iter().any(|a| e.depends_on(a.symbol)) {
            return Err(SymError::InvalidAlias {
                name: table.name(alias.symbol).to_string(),
                reason: "cyclic alias definitions".into(),
            });
        }
    }
    Ok(())
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.table, &other.table) && self.num == other.num && self.den == other.den
    }
}

impl Eq for Expr {}

impl Hash for Expr {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.num.hash(state);
        self.den.hash(state);
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({})", self)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl std::ops::$trait<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                self.check_table(rhs);
                let f: fn(&Expr, &Expr) -> Expr = $body;
                f(self, rhs)
            }
        }
        impl std::ops::$trait<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                std::ops::$trait::$method(&self, &rhs)
            }
        }
        impl std::ops::$trait<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                std::ops::$trait::$method(&self, rhs)
            }
        }
        impl std::ops::$trait<Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                std::ops::$trait::$method(self, &rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| Expr::combine(a, b, false));

binop!(Sub, sub, |a, b| Expr::combine(a, b, true));

binop!(Mul, mul, |a, b| {
    if a.is_zero() || b.is_zero() {
        return Expr::zero(&a.table);
    }
    if a.den.is_constant() && b.den.is_constant() {
        return Expr::from_parts(&a.num * &b.num, &a.den * &b.den, &a.table)
            .expect("nonzero denominator");
    }
    // Cross cancellation keeps the gcds small; the result is coprime
    // because both inputs are.
    let g1 = gcd(&a.num, &b.den);
    let g2 = gcd(&b.num, &a.den);
    let an = exact(&a.num, &g1);
    let bd = exact(&b.den, &g1);
    let bn = exact(&b.num, &g2);
    let ad = exact(&a.den, &g2);
    Expr::normalized(&an * &bn, &ad * &bd, &a.table)
});

binop!(Div, div, |a, b| a
    .checked_div(b)
    .expect("division by the zero expression"));

fn exact(p: &Poly, by: &Poly) -> Poly {
    if by.is_constant() && by.leading_coeff().is_one() {
        return p.clone();
    }
    p.div_exact(by).expect("gcd divides")
}

impl std::ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr {
            num: -&self.num,
            den: self.den.clone(),
            table: Arc::clone(&self.table),
        }
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::print::render(self))
    }
}
