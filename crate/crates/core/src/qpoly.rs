//! Laurent polynomials in `q` (and `t`), and quasi-polynomials in the
//! truncation parameters with polynomial coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::marker::PhantomData;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub trait Var: Clone + Copy + Default + PartialEq + Eq + fmt::Debug + Send + Sync + 'static {
    const SYMBOL: char;
}

#[derive(Clone, Copy, Default, PartialEq, Eq, Debug, Hash, PartialOrd, Ord)]
pub struct QVar;
#[derive(Clone, Copy, Default, PartialEq, Eq, Debug, Hash, PartialOrd, Ord)]
pub struct TVar;

impl Var for QVar {
    const SYMBOL: char = 'q';
}
impl Var for TVar {
    const SYMBOL: char = 't';
}

/// Sparse Laurent polynomial with integer coefficients; zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Laurent<V: Var> {
    terms: BTreeMap<i32, i64>,
    _v: PhantomData<V>,
}

pub type QPoly = Laurent<QVar>;
pub type TPoly = Laurent<TVar>;

impl<V: Var> Default for Laurent<V> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<V: Var> Laurent<V> {
    pub fn zero() -> Self {
        Laurent { terms: BTreeMap::new(), _v: PhantomData }
    }

    pub fn one() -> Self {
        Self::constant(1)
    }

    pub fn constant(c: i64) -> Self {
        Self::monomial(c, 0)
    }

    pub fn monomial(c: i64, e: i32) -> Self {
        let mut p = Self::zero();
        p.add_term(e, c);
        p
    }

    /// `q^e`
    pub fn var_pow(e: i32) -> Self {
        Self::monomial(1, e)
    }

    /// `Σ_{i=lo}^{hi} q^i`, empty when `lo > hi`.
    pub fn geometric(lo: i32, hi: i32) -> Self {
        let mut p = Self::zero();
        for i in lo..=hi {
            p.add_term(i, 1);
        }
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (i32, i64)>>(it: I) -> Self {
        let mut p = Self::zero();
        for (e, c) in it {
            p.add_term(e, c);
        }
        p
    }

    pub fn add_term(&mut self, e: i32, c: i64) {
        if c == 0 {
            return;
        }
        let entry = self.terms.entry(e).or_insert(0);
        *entry += c;
        if *entry == 0 {
            self.terms.remove(&e);
        }
    }

    pub fn coeff(&self, e: i32) -> i64 {
        self.terms.get(&e).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i32, i64)> + '_ {
        self.terms.iter().map(|(&e, &c)| (e, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<i32> {
        self.terms.keys().next_back().copied()
    }

    pub fn low_degree(&self) -> Option<i32> {
        self.terms.keys().next().copied()
    }

    pub fn leading_coeff(&self) -> i64 {
        self.terms.values().next_back().copied().unwrap_or(0)
    }

    pub fn has_negative_exponents(&self) -> bool {
        self.low_degree().is_some_and(|e| e < 0)
    }

    pub fn scale(&self, c: i64) -> Self {
        Self::from_terms(self.terms().map(|(e, k)| (e, k * c)))
    }

    pub fn shift(&self, by: i32) -> Self {
        Self::from_terms(self.terms().map(|(e, k)| (e + by, k)))
    }

    /// Exact value at `x`; negative exponents must divide out.
    pub fn evaluate(&self, x: i64) -> Result<i128> {
        if x < 2 {
            return Err(Error::InvalidParams(format!("evaluation point {x} must be at least 2")));
        }
        let low = self.low_degree().unwrap_or(0).min(0);
        let x = x as i128;
        let mut acc: i128 = 0;
        for (e, c) in self.terms() {
            acc += c as i128 * x.pow((e - low) as u32);
        }
        if low < 0 {
            let d = x.pow((-low) as u32);
            if acc % d != 0 {
                return Err(Error::NegativeExponent { exp: low, q: x as i64 });
            }
            acc /= d;
        }
        Ok(acc)
    }

    /// Non-negative exponents only; the common requirement on final results.
    pub fn ensure_polynomial(&self) -> Result<()> {
        match self.low_degree() {
            Some(e) if e < 0 => Err(Error::NegativeExponent { exp: e, q: 0 }),
            _ => Ok(()),
        }
    }
}

impl TPoly {
    /// Substitution `t^2 = q`; defined only for even polynomials.
    pub fn to_qpoly(&self) -> Result<QPoly> {
        let mut out = QPoly::zero();
        for (e, c) in self.terms() {
            if e % 2 != 0 {
                return Err(Error::InvalidParams(format!("odd power t^{e} has no image under t^2 = q")));
            }
            out.add_term(e / 2, c);
        }
        Ok(out)
    }

    /// Value at `t = sqrt(q0)` for a perfect square `q0`.
    pub fn evaluate_at_sqrt(&self, q0: i64) -> Result<i128> {
        let r = (q0 as f64).sqrt().round() as i64;
        if r * r != q0 {
            if let Ok(p) = self.to_qpoly() {
                return p.evaluate(q0);
            }
            return Err(Error::InvalidParams(format!("{q0} is not a perfect square")));
        }
        self.evaluate(r)
    }
}

impl QPoly {
    pub fn from_tpoly_even(t: &TPoly) -> Result<QPoly> {
        t.to_qpoly()
    }
}

impl<V: Var> Add for &Laurent<V> {
    type Output = Laurent<V>;
    fn add(self, rhs: Self) -> Laurent<V> {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<V: Var> Add for Laurent<V> {
    type Output = Laurent<V>;
    fn add(mut self, rhs: Self) -> Laurent<V> {
        self += &rhs;
        self
    }
}

impl<V: Var> AddAssign<&Laurent<V>> for Laurent<V> {
    fn add_assign(&mut self, rhs: &Laurent<V>) {
        for (e, c) in rhs.terms() {
            self.add_term(e, c);
        }
    }
}

impl<V: Var> AddAssign for Laurent<V> {
    fn add_assign(&mut self, rhs: Laurent<V>) {
        *self += &rhs;
    }
}

impl<V: Var> SubAssign<&Laurent<V>> for Laurent<V> {
    fn sub_assign(&mut self, rhs: &Laurent<V>) {
        for (e, c) in rhs.terms() {
            self.add_term(e, -c);
        }
    }
}

impl<V: Var> SubAssign for Laurent<V> {
    fn sub_assign(&mut self, rhs: Laurent<V>) {
        *self -= &rhs;
    }
}

impl<V: Var> Sub for &Laurent<V> {
    type Output = Laurent<V>;
    fn sub(self, rhs: Self) -> Laurent<V> {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl<V: Var> Sub for Laurent<V> {
    type Output = Laurent<V>;
    fn sub(mut self, rhs: Self) -> Laurent<V> {
        self -= &rhs;
        self
    }
}

impl<V: Var> Neg for Laurent<V> {
    type Output = Laurent<V>;
    fn neg(self) -> Laurent<V> {
        self.scale(-1)
    }
}

impl<V: Var> Mul for &Laurent<V> {
    type Output = Laurent<V>;
    fn mul(self, rhs: Self) -> Laurent<V> {
        let mut out = Laurent::zero();
        for (e1, c1) in self.terms() {
            for (e2, c2) in rhs.terms() {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }
}

impl<V: Var> Mul for Laurent<V> {
    type Output = Laurent<V>;
    fn mul(self, rhs: Self) -> Laurent<V> {
        &self * &rhs
    }
}

impl<V: Var> std::iter::Sum for Laurent<V> {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |a, b| a + b)
    }
}

impl<V: Var> fmt::Display for Laurent<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let x = V::SYMBOL;
        for (i, (e, c)) in self.terms().rev().enumerate() {
            let mag = c.unsigned_abs();
            if i == 0 {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else if c < 0 {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            match e {
                0 => write!(f, "{mag}")?,
                1 if mag == 1 => write!(f, "{x}")?,
                1 => write!(f, "{mag}*{x}")?,
                _ if mag == 1 => write!(f, "{x}^{e}")?,
                _ => write!(f, "{mag}*{x}^{e}")?,
            }
        }
        Ok(())
    }
}

impl<V: Var> fmt::Debug for Laurent<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<V: Var> FromStr for Laurent<V> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let x = V::SYMBOL;
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let bad = |msg: &str| Error::Parse(format!("{msg} in {s:?}"));
        let chars: Vec<char> = compact.chars().collect();
        let mut out = Self::zero();
        let mut i = 0;
        let mut first = true;
        while i < chars.len() {
            let mut sign = 1i64;
            if chars[i] == '+' || chars[i] == '-' {
                if chars[i] == '-' {
                    sign = -1;
                }
                i += 1;
            } else if !first {
                return Err(bad("expected sign between terms"));
            }
            first = false;
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let coeff: Option<i64> = if i > start {
                let digits: String = chars[start..i].iter().collect();
                Some(digits.parse().map_err(|_| bad("coefficient overflow"))?)
            } else {
                None
            };
            let mut exp = 0i32;
            let has_var = i < chars.len() && (chars[i] == '*' || chars[i] == x);
            if has_var {
                if chars[i] == '*' {
                    if coeff.is_none() {
                        return Err(bad("dangling '*'"));
                    }
                    i += 1;
                }
                if i >= chars.len() || chars[i] != x {
                    return Err(bad("expected variable"));
                }
                i += 1;
                exp = 1;
                if i < chars.len() && chars[i] == '^' {
                    i += 1;
                    let es = i;
                    if i < chars.len() && chars[i] == '-' {
                        i += 1;
                    }
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                    let digits: String = chars[es..i].iter().collect();
                    exp = digits.parse().map_err(|_| bad("bad exponent"))?;
                }
            } else if coeff.is_none() {
                return Err(bad("empty term"));
            }
            out.add_term(exp, sign * coeff.unwrap_or(1));
        }
        Ok(out)
    }
}

impl<V: Var> Serialize for Laurent<V> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de, V: Var> Deserialize<'de> for Laurent<V> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Free function form of [`Laurent::evaluate`].
pub fn evaluate(p: &QPoly, q0: i64) -> Result<i128> {
    p.evaluate(q0)
}

/// Polynomial in the truncation parameters `a_1..a_d` whose coefficients are
/// rational combinations of powers of `q`. Keys are `(a-exponents, q-exponent)`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct APoly {
    pub nvars: usize,
    terms: BTreeMap<(Vec<u32>, i32), Rational64>,
}

impl APoly {
    pub fn zero(nvars: usize) -> Self {
        APoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, p: &QPoly) -> Self {
        let mut out = Self::zero(nvars);
        for (e, c) in p.terms() {
            out.add_term(vec![0; nvars], e, Rational64::from_integer(c));
        }
        out
    }

    pub fn add_term(&mut self, aexp: Vec<u32>, qexp: i32, c: Rational64) {
        assert_eq!(aexp.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        let key = (aexp, qexp);
        let v = self.terms.entry(key.clone()).or_insert_with(Rational64::zero);
        *v += c;
        if v.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, i32, Rational64)> + '_ {
        self.terms.iter().map(|((a, e), c)| (a, *e, *c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree in the `a` variables.
    pub fn a_degree(&self) -> u32 {
        self.terms.keys().map(|(a, _)| a.iter().sum()).max().unwrap_or(0)
    }

    /// The part of degree zero in every `a_i`, as a polynomial in `q`.
    pub fn a_constant_term(&self) -> Result<QPoly> {
        let zero = vec![0u32; self.nvars];
        let mut out = QPoly::zero();
        for ((a, e), c) in &self.terms {
            if *a == zero {
                if !c.is_integer() {
                    return Err(Error::InvalidParams(format!("non-integral constant coefficient {c}")));
                }
                out.add_term(*e, c.to_integer());
            }
        }
        Ok(out)
    }

    /// Exact value at integer `a`; every `q` coefficient must be integral.
    pub fn eval(&self, a: &[i64]) -> Result<QPoly> {
        assert_eq!(a.len(), self.nvars);
        let mut acc: BTreeMap<i32, Rational64> = BTreeMap::new();
        for ((ae, qe), c) in &self.terms {
            let mut m = *c;
            for (x, &k) in a.iter().zip(ae) {
                m *= Rational64::from_integer(x.pow(k));
            }
            *acc.entry(*qe).or_insert_with(Rational64::zero) += m;
        }
        let mut out = QPoly::zero();
        for (e, c) in acc {
            if !c.is_integer() {
                return Err(Error::InvalidParams(format!("non-integral coefficient {c} of q^{e}")));
            }
            out.add_term(e, c.to_integer());
        }
        Ok(out)
    }

    pub fn mul(&self, other: &APoly) -> APoly {
        assert_eq!(self.nvars, other.nvars);
        let mut out = APoly::zero(self.nvars);
        for ((a1, e1), c1) in &self.terms {
            for ((a2, e2), c2) in &other.terms {
                let a: Vec<u32> = a1.iter().zip(a2).map(|(x, y)| x + y).collect();
                out.add_term(a, e1 + e2, c1 * c2);
            }
        }
        out
    }

    pub fn add(&self, other: &APoly) -> APoly {
        let mut out = self.clone();
        for ((a, e), c) in &other.terms {
            out.add_term(a.clone(), *e, *c);
        }
        out
    }

    pub fn scale(&self, c: Rational64) -> APoly {
        let mut out = APoly::zero(self.nvars);
        for ((a, e), k) in &self.terms {
            out.add_term(a.clone(), *e, k * c);
        }
        out
    }

    /// The affine form `c0 + Σ c_i a_i` with rational scalars.
    pub fn affine(nvars: usize, c0: Rational64, c: &[Rational64]) -> APoly {
        let mut out = APoly::zero(nvars);
        out.add_term(vec![0; nvars], 0, c0);
        for (i, ci) in c.iter().enumerate() {
            let mut e = vec![0; nvars];
            e[i] = 1;
            out.add_term(e, 0, *ci);
        }
        out
    }
}

impl fmt::Display for APoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((a, e), c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            for (i, k) in a.iter().enumerate() {
                if *k > 0 {
                    write!(f, "*a{}^{k}", i + 1)?;
                }
            }
            if *e != 0 {
                write!(f, "*q^{e}")?;
            }
        }
        Ok(())
    }
}

/// A linear inequality `Σ coef_i a_i >= bound` on the truncation parameters.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ParamConstraint {
    pub coef: Vec<i64>,
    pub bound: i64,
}

impl ParamConstraint {
    pub fn holds(&self, a: &[i64]) -> bool {
        self.coef.iter().zip(a).map(|(c, x)| c * x).sum::<i64>() >= self.bound
    }
}

/// Quasi-polynomial in `a` with period `modulus` in every variable.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TruncationQuasiPoly {
    pub modulus: i64,
    pub nvars: usize,
    pub branches: BTreeMap<Vec<i64>, APoly>,
    pub validity: Vec<ParamConstraint>,
}

impl TruncationQuasiPoly {
    pub fn residue(&self, a: &[i64]) -> Vec<i64> {
        a.iter().map(|x| x.rem_euclid(self.modulus)).collect()
    }

    pub fn in_region(&self, a: &[i64]) -> bool {
        a.len() == self.nvars && self.validity.iter().all(|c| c.holds(a))
    }

    /// True when all residue branches are the same polynomial.
    pub fn is_polynomial(&self) -> bool {
        let mut it = self.branches.values();
        match it.next() {
            None => true,
            Some(first) => it.all(|b| b == first),
        }
    }

    pub fn branch(&self, a: &[i64]) -> Result<&APoly> {
        let r = self.residue(a);
        self.branches.get(&r).ok_or_else(|| Error::OutOfValidityRegion(format!("no branch for residue {r:?}")))
    }
}

/// Evaluates the branch selected by the residue of `a`.
pub fn qp_evaluate(f: &TruncationQuasiPoly, a: &[i64]) -> Result<QPoly> {
    if !f.in_region(a) {
        return Err(Error::OutOfValidityRegion(format!("a = {a:?}")));
    }
    f.branch(a)?.eval(a)
}

/// Binomial-basis polynomial `C((a - r)/m, k)` in one variable, expanded in powers of `a`.
fn binomial_in_a(nvars: usize, var: usize, r: i64, m: i64, k: u32) -> APoly {
    let mut out = APoly::affine(nvars, Rational64::one(), &vec![Rational64::zero(); nvars]);
    for j in 0..k {
        let mut c = vec![Rational64::zero(); nvars];
        c[var] = Rational64::new(1, m);
        let lin = APoly::affine(nvars, Rational64::new(-r - (j as i64) * m, m), &c);
        out = out.mul(&lin).scale(Rational64::new(1, j as i64 + 1));
    }
    out
}

/// Builds the quasi-polynomial that interpolates `f` on each residue class.
///
/// For residue `r`, samples `a = base + r' + m*b` with `b` in `{0..=degree}^d`
/// and `r' ≡ r (mod m)`, fits the tensor Newton interpolant, then checks it on
/// `extra` further points per branch.
pub fn interpolate_quasi_poly<F>(
    nvars: usize,
    modulus: i64,
    degree: u32,
    base: &[i64],
    validity: Vec<ParamConstraint>,
    extra: u32,
    f: F,
) -> Result<TruncationQuasiPoly>
where
    F: Fn(&[i64]) -> Result<QPoly>,
{
    let residues: Vec<Vec<i64>> =
        cartesian(nvars, modulus as u32).into_iter().map(|v| v.into_iter().map(|x| x as i64).collect()).collect();
    let mut branches = BTreeMap::new();
    for r in residues {
        let offset: Vec<i64> = base.iter().zip(&r).map(|(b, ri)| b + (ri - b).rem_euclid(modulus)).collect();
        let grid = cartesian(nvars, degree + 1);
        let mut values: BTreeMap<Vec<u32>, BTreeMap<i32, Rational64>> = BTreeMap::new();
        for b in &grid {
            let a: Vec<i64> = offset.iter().zip(b).map(|(o, bi)| o + modulus * *bi as i64).collect();
            let v = f(&a)?;
            values.insert(b.clone(), v.terms().map(|(e, c)| (e, Rational64::from_integer(c))).collect());
        }
        // forward differences along each axis turn values into binomial-basis coefficients
        for axis in 0..nvars {
            for level in 0..degree {
                for b in grid.iter().rev() {
                    if b[axis] <= level {
                        continue;
                    }
                    let mut prev = b.clone();
                    prev[axis] -= 1;
                    let pv = values[&prev].clone();
                    let cur = values.get_mut(b).unwrap();
                    for (e, c) in pv {
                        *cur.entry(e).or_insert_with(Rational64::zero) -= c;
                    }
                }
            }
        }
        let mut poly = APoly::zero(nvars);
        for b in &grid {
            let coeffs = &values[b];
            if coeffs.values().all(|c| c.is_zero()) {
                continue;
            }
            let mut basis = APoly::affine(nvars, Rational64::one(), &vec![Rational64::zero(); nvars]);
            for (i, &k) in b.iter().enumerate() {
                basis = basis.mul(&binomial_in_a(nvars, i, offset[i], modulus, k));
            }
            for (e, c) in coeffs {
                let mut term = APoly::zero(nvars);
                term.add_term(vec![0; nvars], *e, *c);
                poly = poly.add(&basis.mul(&term));
            }
        }
        for k in 0..extra {
            let a: Vec<i64> = offset
                .iter()
                .enumerate()
                .map(|(i, o)| o + modulus * (degree as i64 + 1 + k as i64 + i as i64))
                .collect();
            if poly.eval(&a)? != f(&a)? {
                return Err(Error::InconsistentPipelines(format!("interpolant of degree {degree} fails at a = {a:?}")));
            }
        }
        branches.insert(r, poly);
    }
    Ok(TruncationQuasiPoly { modulus, nvars, branches, validity })
}

fn cartesian(nvars: usize, size: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..nvars {
        let mut next = Vec::new();
        for v in &out {
            for x in 0..size {
                let mut w = v.clone();
                w.push(x);
                next.push(w);
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> QPoly {
        s.parse().unwrap()
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(q("1 + q").evaluate(2).unwrap(), 3);
        assert_eq!(q("q^2 + q + 1").evaluate(3).unwrap(), 13);
        assert_eq!(q("3*q^3 - 5*q^2 + q + 1").evaluate(2).unwrap(), 7);
    }

    #[test]
    fn negative_exponents() {
        assert_eq!(q("q^2 + q^-1").evaluate(2), Err(Error::NegativeExponent { exp: -1, q: 2 }));
        assert_eq!(q("2*q^-1").evaluate(2).unwrap(), 1);
        assert!(q("q^-1").ensure_polynomial().is_err());
    }

    #[test]
    fn render_and_parse_round_trip() {
        let p = q("3*q^3 - 5*q^2 + q + 1");
        assert_eq!(p.to_string(), "3*q^3 - 5*q^2 + q + 1");
        for s in ["0", "-q", "-7 + q^-2", "-4*q^10 + 2*q", "1"] {
            assert_eq!(q(s).to_string(), s);
        }
        assert!("3*".parse::<QPoly>().is_err());
        assert!("q q".parse::<QPoly>().is_err());
        assert!("".parse::<QPoly>().is_err());
    }

    #[test]
    fn tpoly_substitution() {
        let t: TPoly = "t^4 + 2*t^2 + 1".parse().unwrap();
        assert_eq!(t.to_qpoly().unwrap(), q("q^2 + 2*q + 1"));
        let odd: TPoly = "t + 1".parse().unwrap();
        assert!(odd.to_qpoly().is_err());
        assert_eq!(odd.evaluate_at_sqrt(4).unwrap(), 3);
    }

    #[test]
    fn gl2_branchless_quasi_poly() {
        // Σ_{i<=1} q^i + 2 a q at n = 1
        let f = |a: &[i64]| Ok(q("1 + q") + QPoly::monomial(2 * a[0], 1));
        let validity = vec![ParamConstraint { coef: vec![1], bound: 1 }];
        let qp = interpolate_quasi_poly(1, 2, 1, &[1], validity, 3, f).unwrap();
        assert!(qp.is_polynomial());
        assert_eq!(qp_evaluate(&qp, &[2]).unwrap(), q("5*q + 1"));
        assert!(matches!(qp_evaluate(&qp, &[0]), Err(Error::OutOfValidityRegion(_))));
    }

    #[test]
    fn parity_branches_follow_floor_terms() {
        // floor(a1/2) * q + a1 * a2 has genuinely different branches
        let f = |a: &[i64]| Ok(QPoly::monomial(a[0].div_euclid(2), 1) + QPoly::constant(a[0] * a[1]));
        let qp = interpolate_quasi_poly(2, 2, 2, &[0, 0], vec![], 2, f).unwrap();
        assert!(!qp.is_polynomial());
        for a1 in 0..9 {
            for a2 in 0..9 {
                assert_eq!(qp_evaluate(&qp, &[a1, a2]).unwrap(), f(&[a1, a2]).unwrap());
            }
        }
    }
}
