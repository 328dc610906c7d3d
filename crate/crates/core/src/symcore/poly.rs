//! Sparse multivariate polynomials over exact rationals.
//!
//! Terms are kept in a `BTreeMap` keyed by [`Monomial`], whose ordering is
//! graded lexicographic over variable index (index 0 is the most significant
//! variable). The leading term is therefore the last map entry.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exponent vector; its length equals the number of variables of the ring.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, index: usize, power: u32) -> Self {
        let mut e = vec![0; nvars];
        e[index] = power;
        Monomial(e)
    }

    pub fn from_exponents(e: Vec<u32>) -> Self {
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self / other` when `other` divides `self`.
    fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            if a < b {
                return None;
            }
            out.push(a - b);
        }
        Some(Monomial(out))
    }

    fn elementwise_min(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| *a.min(b))
                .collect(),
        )
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Monomial, BigRational>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, BigRational::one())
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(nvars), c);
        }
        p
    }

    pub fn var(nvars: usize, index: usize) -> Self {
        Self::term(Monomial::var(nvars, index, 1), BigRational::one())
    }

    pub fn term(m: Monomial, c: BigRational) -> Self {
        let nvars = m.0.len();
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn constant_value(&self) -> Option<BigRational> {
        if self.is_zero() {
            return Some(BigRational::zero());
        }
        if self.is_constant() {
            return self.terms.values().next().cloned();
        }
        None
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms from the leading one downwards.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter().rev()
    }

    pub fn leading(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> BigRational {
        self.leading()
            .map(|(_, c)| c.clone())
            .unwrap_or_else(BigRational::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.0[var]).max().unwrap_or(0)
    }

    /// Largest total degree counted over a subset of variables.
    pub fn degree_in_set(&self, vars: &[usize]) -> u32 {
        self.terms
            .keys()
            .map(|m| vars.iter().map(|&v| m.0[v]).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn contains_var(&self, var: usize) -> bool {
        self.terms.keys().any(|m| m.0[var] > 0)
    }

    pub fn used_vars(&self) -> Vec<usize> {
        (0..self.nvars).filter(|&v| self.contains_var(v)).collect()
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    fn mul_term(&self, m: &Monomial, c: &BigRational) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (tm, tc) in &self.terms {
            out.terms.insert(tm.mul(m), tc * c);
        }
        out
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut result = Poly::one(self.nvars);
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = &result * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn derivative(&self, var: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e == 0 {
                continue;
            }
            let mut nm = m.clone();
            nm.0[var] -= 1;
            out.add_term(nm, c * BigRational::from_integer(BigInt::from(e)));
        }
        out
    }

    /// Coefficients of `self` viewed as a polynomial in `var`, indexed by power.
    pub fn to_univariate(&self, var: usize) -> Vec<Poly> {
        let deg = self.degree_in(var) as usize;
        let mut coeffs = vec![Poly::zero(self.nvars); deg + 1];
        for (m, c) in &self.terms {
            let k = m.0[var] as usize;
            let mut nm = m.clone();
            nm.0[var] = 0;
            coeffs[k].add_term(nm, c.clone());
        }
        coeffs
    }

    pub fn from_univariate(var: usize, coeffs: &[Poly], nvars: usize) -> Poly {
        let mut out = Poly::zero(nvars);
        for (k, c) in coeffs.iter().enumerate() {
            let shift = Monomial::var(nvars, var, k as u32);
            for (m, v) in &c.terms {
                out.add_term(m.mul(&shift), v.clone());
            }
        }
        out
    }

    /// Exact quotient `self / divisor`, or `None` if the division leaves a remainder.
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        assert!(!divisor.is_zero(), "polynomial division by zero");
        if let Some(c) = divisor.constant_value() {
            return Some(self.scale(&c.recip()));
        }
        let (lm, lc) = divisor.leading().map(|(m, c)| (m.clone(), c.clone()))?;
        let mut rem = self.clone();
        let mut quot = Poly::zero(self.nvars);
        while let Some((rm, rc)) = rem.leading().map(|(m, c)| (m.clone(), c.clone())) {
            let qm = rm.div(&lm)?;
            let qc = rc / &lc;
            rem = &rem - &divisor.mul_term(&qm, &qc);
            quot.add_term(qm, qc);
        }
        Some(quot)
    }

    /// Scales so the leading coefficient is one.
    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => self.clone(),
            Some((_, c)) => self.scale(&c.recip()),
        }
    }

    /// Square root when `self` is the square of a polynomial with rational
    /// coefficients; the root with positive leading coefficient is returned.
    pub fn sqrt(&self) -> Option<Poly> {
        if self.is_zero() {
            return Some(self.clone());
        }
        let (lm, lc) = self.leading()?;
        let half: Option<Vec<u32>> =
            lm.0.iter()
                .map(|&e| if e % 2 == 0 { Some(e / 2) } else { None })
                .collect();
        let root_c = rational_sqrt(lc)?;
        let mut root = Poly::term(Monomial(half?), root_c);
        let mut rem = self - &(&root * &root);
        while let Some((rm, rc)) = rem.leading().map(|(m, c)| (m.clone(), c.clone())) {
            let (top_m, top_c) = root.leading().map(|(m, c)| (m.clone(), c.clone()))?;
            let tm = rm.div(&top_m)?;
            if tm >= top_m {
                return None;
            }
            let tc = rc / (top_c * BigRational::from_integer(BigInt::from(2)));
            root.add_term(tm, tc);
            rem = self - &(&root * &root);
        }
        Some(root)
    }

    pub fn eval_f64(&self, values: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                let mut t = rational_to_f64(c);
                for (v, &e) in values.iter().zip(&m.0) {
                    if e > 0 {
                        t *= v.powi(e as i32);
                    }
                }
                t
            })
            .sum()
    }

    pub fn coefficients_positive(&self) -> bool {
        !self.is_zero() && self.terms.values().all(Signed::is_positive)
    }
}

pub fn rational_to_f64(c: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    c.to_f64().unwrap_or(f64::NAN)
}

fn bigint_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    if &(&r * &r) == n {
        Some(r)
    } else {
        None
    }
}

pub fn rational_sqrt(c: &BigRational) -> Option<BigRational> {
    let n = bigint_sqrt(c.numer())?;
    let d = bigint_sqrt(c.denom())?;
    Some(BigRational::new(n, d))
}

impl std::ops::Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl std::ops::Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl std::ops::Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&-BigRational::one())
    }
}

impl std::ops::Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.terms)
    }
}

// ---------------------------------------------------------------------------
// GCD
// ---------------------------------------------------------------------------

/// Monic greatest common divisor over Q.
///
/// Recursive primitive polynomial remainder sequence: the smallest-index
/// variable present is taken as main variable, coefficients live in the ring
/// of the remaining variables and their gcd (the content) is computed by
/// recursion.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    let n = a.nvars;
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one(n);
    }
    if a.len() == 1 {
        return monomial_gcd(a, b);
    }
    if b.len() == 1 {
        return monomial_gcd(b, a);
    }
    if a == b {
        return a.monic();
    }
    if let Some(g) = gcd_shortcut(a, b) {
        return g;
    }

    // Main variable: shared, with the smallest degree, so the remainder
    // sequence is short.
    let var = (0..n)
        .filter(|&v| a.contains_var(v) && b.contains_var(v))
        .min_by_key(|&v| a.degree_in(v).max(b.degree_in(v)))
        .or_else(|| (0..n).find(|&v| a.contains_var(v) || b.contains_var(v)))
        .expect("non-constant polynomial has a variable");
    let ua = a.to_univariate(var);
    let ub = b.to_univariate(var);
    let ca = content(&ua);
    let cb = content(&ub);
    let c = gcd(&ca, &cb);
    let pa = divide_coeffs(&ua, &ca);
    let pb = divide_coeffs(&ub, &cb);

    if pa.len() == 1 || pb.len() == 1 {
        return c.monic();
    }

    let (big, small) = if pa.len() >= pb.len() {
        (pa, pb)
    } else {
        (pb, pa)
    };
    let g = match subresultant_last(big, small) {
        None => Poly::one(n),
        Some(last) => {
            let cl = content(&last);
            Poly::from_univariate(var, &divide_coeffs(&last, &cl), n)
        }
    };
    (&g * &c).monic()
}

fn pow(p: &Poly, e: usize) -> Poly {
    let mut acc = Poly::one(p.nvars);
    for _ in 0..e {
        acc = &acc * p;
    }
    acc
}

/// Last nonzero remainder of the subresultant sequence, or `None` when the
/// sequence ends in a constant (the primitive parts are coprime).
fn subresultant_last(mut a: Vec<Poly>, mut b: Vec<Poly>) -> Option<Vec<Poly>> {
    let n = a[0].nvars;
    let mut g = Poly::one(n);
    let mut h = Poly::one(n);
    loop {
        let delta = a.len() - b.len();
        let r = pseudo_remainder(&a, &b);
        if r.is_empty() {
            return Some(b);
        }
        if r.len() == 1 {
            return None;
        }
        let div = &g * &pow(&h, delta);
        a = b;
        b = divide_coeffs(&r, &div);
        g = a.last().expect("nonempty").clone();
        h = if delta == 0 {
            h
        } else {
            pow(&g, delta)
                .div_exact(&pow(&h, delta - 1))
                .expect("subresultant division is exact")
        };
    }
}

// Modular degree bounds. Evaluating every variable but one at a point
// modulo a prime gives an upper bound on the degree of the gcd in the
// remaining variable, provided neither leading coefficient vanishes there.

const PRIME: u64 = (1 << 61) - 1;

fn mul_mod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % PRIME as u128) as u64
}

fn pow_mod(mut base: u64, mut e: u64) -> u64 {
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, base);
        }
        base = mul_mod(base, base);
        e >>= 1;
    }
    acc
}

fn bigint_mod(n: &BigInt) -> u64 {
    use num_traits::ToPrimitive;
    let r = n % BigInt::from(PRIME);
    let r = if r.is_negative() {
        r + BigInt::from(PRIME)
    } else {
        r
    };
    r.to_u64().expect("reduced residue fits")
}

fn rational_mod(c: &BigRational) -> Option<u64> {
    let d = bigint_mod(c.denom());
    if d == 0 {
        return None;
    }
    Some(mul_mod(bigint_mod(c.numer()), pow_mod(d, PRIME - 2)))
}

fn eval_points(nvars: usize) -> Vec<u64> {
    let mut state = 0x9e37_79b9_7f4a_7c15u64;
    (0..nvars)
        .map(|_| {
            state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
            (z ^ (z >> 31)) % PRIME
        })
        .collect()
}

/// Image of `p` as a univariate polynomial in `var`, or `None` if a
/// coefficient denominator vanishes modulo the prime.
fn image(p: &Poly, var: usize, points: &[u64]) -> Option<Vec<u64>> {
    let deg = p.degree_in(var) as usize;
    let mut out = vec![0u64; deg + 1];
    for (m, c) in &p.terms {
        let mut t = rational_mod(c)?;
        for (v, &e) in m.0.iter().enumerate() {
            if v != var && e > 0 {
                t = mul_mod(t, pow_mod(points[v], e as u64));
            }
        }
        let k = m.0[var] as usize;
        out[k] = (out[k] + t) % PRIME;
    }
    Some(out)
}

fn univariate_gcd_degree(mut a: Vec<u64>, mut b: Vec<u64>) -> usize {
    let strip = |v: &mut Vec<u64>| {
        while v.last() == Some(&0) {
            v.pop();
        }
    };
    strip(&mut a);
    strip(&mut b);
    while !b.is_empty() {
        // a mod b
        let inv = pow_mod(*b.last().expect("nonempty"), PRIME - 2);
        while a.len() >= b.len() {
            let f = mul_mod(*a.last().expect("nonempty"), inv);
            let shift = a.len() - b.len();
            for (i, &bc) in b.iter().enumerate() {
                let sub = mul_mod(f, bc);
                a[shift + i] = (a[shift + i] + PRIME - sub) % PRIME;
            }
            strip(&mut a);
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}

/// Upper bound on `deg_var gcd(a, b)`, if the evaluation is admissible.
fn degree_bound(a: &Poly, b: &Poly, var: usize, points: &[u64]) -> Option<usize> {
    let ia = image(a, var, points)?;
    let ib = image(b, var, points)?;
    if *ia.last()? == 0 || *ib.last()? == 0 {
        return None;
    }
    Some(univariate_gcd_degree(ia, ib))
}

/// Cheap cases of the gcd: a variable in which the gcd provably has degree
/// zero, and the smaller operand dividing the larger one.
fn gcd_shortcut(a: &Poly, b: &Poly) -> Option<Poly> {
    let n = a.nvars;
    let points = eval_points(n);
    let (small, big) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let mut all_full = true;
    for var in 0..n {
        if !a.contains_var(var) && !b.contains_var(var) {
            continue;
        }
        match degree_bound(a, b, var, &points) {
            Some(0) => {
                let mut coeffs = a.to_univariate(var);
                coeffs.extend(b.to_univariate(var));
                return Some(content(&coeffs).monic());
            }
            Some(d) => all_full &= d == small.degree_in(var) as usize,
            None => all_full = false,
        }
    }
    if all_full && big.div_exact(small).is_some() {
        return Some(small.monic());
    }
    None
}

fn monomial_gcd(mono: &Poly, other: &Poly) -> Poly {
    let (m, _) = mono.leading().expect("nonzero");
    let mut g = m.clone();
    for om in other.terms.keys() {
        g = g.elementwise_min(om);
        if g.is_one() {
            break;
        }
    }
    Poly::term(g, BigRational::one())
}

fn content(coeffs: &[Poly]) -> Poly {
    let n = coeffs[0].nvars;
    let mut g = Poly::zero(n);
    for c in coeffs.iter().filter(|c| !c.is_zero()) {
        g = gcd(&g, c);
        if g.is_constant() {
            return Poly::one(n);
        }
    }
    g
}

fn divide_coeffs(coeffs: &[Poly], by: &Poly) -> Vec<Poly> {
    coeffs
        .iter()
        .map(|c| c.div_exact(by).expect("exact coefficient division"))
        .collect()
}

fn trim(v: &mut Vec<Poly>) {
    while v.last().is_some_and(Poly::is_zero) {
        v.pop();
    }
}

/// Sparse pseudo-remainder of univariate polynomials with polynomial coefficients.
fn pseudo_remainder(a: &[Poly], b: &[Poly]) -> Vec<Poly> {
    let n = b.len() - 1;
    let lcb = &b[n];
    let mut r: Vec<Poly> = a.to_vec();
    trim(&mut r);
    // Standard prem: lc(b)^(deg a - deg b + 1) a mod b.
    let mut pending = r.len().saturating_sub(n);
    while !r.is_empty() && r.len() > n {
        pending -= 1;
        let d = r.len() - 1;
        let lcr = r[d].clone();
        let shift = d - n;
        let mut next: Vec<Poly> = r.iter().map(|c| c * lcb).collect();
        for (k, bc) in b.iter().enumerate() {
            next[k + shift] = &next[k + shift] - &(bc * &lcr);
        }
        trim(&mut next);
        r = next;
    }
    if pending > 0 && !r.is_empty() {
        let f = pow(lcb, pending);
        r = r.iter().map(|c| c * &f).collect();
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn x(i: usize) -> Poly {
        Poly::var(3, i)
    }

    #[test]
    fn grlex_orders_degree_first() {
        let a = Monomial(vec![0, 2, 0]);
        let b = Monomial(vec![1, 0, 0]);
        assert!(a > b);
        let c = Monomial(vec![1, 1, 0]);
        assert!(c > a);
    }

    #[test]
    fn gcd_of_products_recovers_common_factor() {
        let common = &(&x(0) * &x(1)) + &Poly::constant(3, q(2));
        let a = &common * &(&x(0) + &x(2));
        let b = &common * &(&x(1) - &x(2));
        assert_eq!(gcd(&a, &b), common.monic());
    }

    #[test]
    fn gcd_coprime_is_one() {
        let a = &(&x(0) * &x(0)) + &(&x(1) * &x(1));
        let b = &x(0) + &x(1);
        assert_eq!(gcd(&a, &b), Poly::one(3));
    }

    #[test]
    fn gcd_with_monomial() {
        let a = &(&x(0) * &x(0)) * &x(1);
        let b = &(&x(0) * &x(1)) + &(&x(0) * &x(2));
        assert_eq!(gcd(&a, &b), x(0));
    }

    #[test]
    fn exact_division_and_remainder() {
        let a = &(&x(0) + &x(1)) * &(&x(0) - &x(2));
        assert_eq!(a.div_exact(&(&x(0) + &x(1))), Some(&x(0) - &x(2)));
        assert_eq!(a.div_exact(&(&x(0) + &Poly::one(3))), None);
    }

    #[test]
    fn sqrt_of_square() {
        let r = &(&x(0).scale(&q(3)) * &x(1))
            - &Poly::constant(3, BigRational::new(1.into(), 2.into()));
        let sq = &r * &r;
        let got = sq.sqrt().expect("perfect square");
        assert!(got == r || got == -&r);
        assert_eq!(x(0).sqrt(), None);
        assert_eq!((&(&x(0) * &x(0)) + &Poly::one(3)).sqrt(), None);
    }
}
