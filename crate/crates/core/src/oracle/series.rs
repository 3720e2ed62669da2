//! Laurent polynomials in `ε` over `F_q`, held in a fixed exponent window.
//!
//! Lattice bases, `γ` and everything the oracle multiplies stay polynomial in `ε, ε^{-1}`:
//! the only divisions are by monomial pivots. A result leaving the window is an error
//! rather than a silent truncation.

use super::field::Field;
use crate::error::{Error, Result};

pub const WINDOW: usize = 64;
pub const EMIN: i32 = -24;
pub const EMAX: i32 = EMIN + WINDOW as i32 - 1;

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Laurent {
    c: [u8; WINDOW],
    lo: i32,
    hi: i32,
}

impl std::fmt::Debug for Laurent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self.terms().map(|(e, c)| format!("{c}e^{e}")).collect();
        write!(f, "{}", terms.join(" + "))
    }
}

fn overflow(e: i32) -> Error {
    Error::PrecisionExhausted(format!("exponent {e} outside the window [{EMIN}, {EMAX}]"))
}

impl Laurent {
    pub const ZERO: Laurent = Laurent { c: [0; WINDOW], lo: 1, hi: 0 };

    #[inline]
    fn idx(e: i32) -> usize {
        (e - EMIN) as usize
    }

    pub fn monomial(coef: u8, e: i32) -> Result<Self> {
        let mut s = Self::ZERO;
        s.set(e, coef)?;
        Ok(s)
    }

    pub fn eps_pow(e: i32) -> Result<Self> {
        Self::monomial(1, e)
    }

    pub fn is_zero(&self) -> bool {
        self.lo > self.hi
    }

    pub fn coeff(&self, e: i32) -> u8 {
        if e < EMIN || e > EMAX {
            0
        } else {
            self.c[Self::idx(e)]
        }
    }

    pub fn set(&mut self, e: i32, coef: u8) -> Result<()> {
        if e < EMIN || e > EMAX {
            return if coef == 0 { Ok(()) } else { Err(overflow(e)) };
        }
        self.c[Self::idx(e)] = coef;
        if coef != 0 {
            if self.is_zero() {
                self.lo = e;
                self.hi = e;
            } else {
                self.lo = self.lo.min(e);
                self.hi = self.hi.max(e);
            }
        } else {
            self.tighten();
        }
        Ok(())
    }

    fn tighten(&mut self) {
        while self.lo <= self.hi && self.c[Self::idx(self.lo)] == 0 {
            self.lo += 1;
        }
        while self.hi >= self.lo && self.c[Self::idx(self.hi)] == 0 {
            self.hi -= 1;
        }
        if self.lo > self.hi {
            *self = Self::ZERO;
        }
    }

    /// Nonzero terms `(exponent, coefficient)` in increasing exponent.
    pub fn terms(&self) -> impl Iterator<Item = (i32, u8)> + '_ {
        (self.lo..=self.hi).map(move |e| (e, self.c[Self::idx(e)])).filter(|&(_, c)| c != 0)
    }

    /// `None` for zero.
    pub fn val(&self) -> Option<i32> {
        (!self.is_zero()).then_some(self.lo)
    }

    /// Valuation with zero sent to `+∞` as `i32::MAX`.
    pub fn val_or_max(&self) -> i32 {
        self.val().unwrap_or(i32::MAX)
    }

    pub fn add(&self, o: &Laurent, f: &Field) -> Laurent {
        if self.is_zero() {
            return *o;
        }
        if o.is_zero() {
            return *self;
        }
        let mut r = *self;
        for e in o.lo..=o.hi {
            let i = Self::idx(e);
            r.c[i] = f.add(r.c[i], o.c[i]);
        }
        r.lo = self.lo.min(o.lo);
        r.hi = self.hi.max(o.hi);
        r.tighten();
        r
    }

    pub fn neg(&self, f: &Field) -> Laurent {
        let mut r = *self;
        for e in self.lo..=self.hi {
            let i = Self::idx(e);
            r.c[i] = f.neg(r.c[i]);
        }
        r
    }

    pub fn sub(&self, o: &Laurent, f: &Field) -> Laurent {
        self.add(&o.neg(f), f)
    }

    pub fn scale(&self, a: u8, f: &Field) -> Laurent {
        if a == 0 {
            return Self::ZERO;
        }
        let mut r = *self;
        for e in self.lo..=self.hi {
            let i = Self::idx(e);
            r.c[i] = f.mul(r.c[i], a);
        }
        r
    }

    /// Multiplication by `ε^k`.
    pub fn shift(&self, k: i32) -> Result<Laurent> {
        if self.is_zero() || k == 0 {
            return Ok(*self);
        }
        if self.lo + k < EMIN {
            return Err(overflow(self.lo + k));
        }
        if self.hi + k > EMAX {
            return Err(overflow(self.hi + k));
        }
        let mut r = Self::ZERO;
        for e in self.lo..=self.hi {
            r.c[Self::idx(e + k)] = self.c[Self::idx(e)];
        }
        r.lo = self.lo + k;
        r.hi = self.hi + k;
        Ok(r)
    }

    pub fn mul(&self, o: &Laurent, f: &Field) -> Result<Laurent> {
        if self.is_zero() || o.is_zero() {
            return Ok(Self::ZERO);
        }
        if self.lo + o.lo < EMIN {
            return Err(overflow(self.lo + o.lo));
        }
        if self.hi + o.hi > EMAX {
            return Err(overflow(self.hi + o.hi));
        }
        let mut r = Self::ZERO;
        for (a, x) in self.terms() {
            for (b, y) in o.terms() {
                let i = Self::idx(a + b);
                r.c[i] = f.add(r.c[i], f.mul(x, y));
            }
        }
        r.lo = self.lo + o.lo;
        r.hi = self.hi + o.hi;
        r.tighten();
        Ok(r)
    }

    /// Terms with exponent `< e`.
    pub fn below(&self, e: i32) -> Laurent {
        let mut r = *self;
        if r.is_zero() || r.hi < e {
            return r;
        }
        for k in e.max(r.lo)..=r.hi {
            r.c[Self::idx(k)] = 0;
        }
        r.tighten();
        r
    }

    /// Terms with exponent `>= e`.
    pub fn at_least(&self, e: i32) -> Laurent {
        let mut r = *self;
        if r.is_zero() || r.lo >= e {
            return r;
        }
        for k in r.lo..e.min(r.hi + 1) {
            r.c[Self::idx(k)] = 0;
        }
        r.tighten();
        r
    }

    /// Inverse of a unit of `O` modulo `ε^prec`.
    pub fn unit_inverse(&self, prec: i32, f: &Field) -> Result<Laurent> {
        if self.val() != Some(0) {
            return Err(Error::InvalidParams("not a unit of O".into()));
        }
        let u0 = f.inv(self.coeff(0));
        let mut r = Self::ZERO;
        for k in 0..prec {
            // coefficient k of u·r must vanish for k > 0
            let mut s = if k == 0 { 1 } else { 0 };
            for j in 0..k {
                s = f.sub(s, f.mul(self.coeff(k - j), r.coeff(j)));
            }
            r.set(k, f.mul(s, u0))?;
        }
        Ok(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(f: &Field, t: &[(i32, u8)]) -> Laurent {
        let mut s = Laurent::ZERO;
        for &(e, c) in t {
            s = s.add(&Laurent::monomial(c, e).unwrap(), f);
        }
        s
    }

    #[test]
    fn arithmetic() {
        let f = Field::new(3).unwrap();
        let a = poly(&f, &[(-1, 1), (0, 2)]);
        let b = poly(&f, &[(1, 1), (2, 1)]);
        let p = a.mul(&b, &f).unwrap();
        // (ε^-1 + 2)(ε + ε²) = 1 + ε + 2ε + 2ε² = 1 + 2ε²
        assert_eq!(p, poly(&f, &[(0, 1), (2, 2)]));
        assert_eq!(p.val(), Some(0));
        assert!(a.sub(&a, &f).is_zero());
        assert_eq!(a.shift(3).unwrap(), poly(&f, &[(2, 1), (3, 2)]));
        assert_eq!(p.below(1), poly(&f, &[(0, 1)]));
        assert_eq!(p.at_least(1), poly(&f, &[(2, 2)]));
        assert!(Laurent::eps_pow(EMAX).unwrap().shift(1).is_err());
    }

    #[test]
    fn unit_inverse() {
        for q in [2u8, 3, 4, 5] {
            let f = Field::new(q).unwrap();
            let u = poly(&f, &[(0, 1), (1, q - 1), (3, 1)]);
            let v = u.unit_inverse(10, &f).unwrap();
            assert_eq!(u.mul(&v, &f).unwrap().below(10), Laurent::eps_pow(0).unwrap());
        }
    }
}
