//! Bottom-up enumeration of Hermite forms.
//!
//! Rows are filled from the last to the first. At a row `k` where `γ` preserves the coordinate
//! flag from `k` on, the image of the partial lattice on coordinates `k..n` must already be
//! `γ`-stable, which prunes the search. When in addition column `k` of `γ` is upper triangular,
//! stability is an affine condition over `F_q` on the coefficients of row `k`, and the admissible
//! rows are produced by solving that system instead of by trial.

use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;

use super::field::Field;
use super::gamma::GammaMatrix;
use super::lattice::{OLattice, MAX_N};
use super::series::Laurent;
use crate::error::{Error, Result};

/// Search box: `d_i ∈ [lo_i, hi_i]`, and every coefficient of row `i` has exponent `>= entry_min[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bounds {
    pub d: Vec<(i32, i32)>,
    pub entry_min: Vec<i32>,
}

impl Bounds {
    pub fn widen(&self, by: i32) -> Bounds {
        Bounds {
            d: self.d.iter().map(|&(lo, hi)| (lo - by, hi + by)).collect(),
            entry_min: self.entry_min.iter().map(|&m| m - by).collect(),
        }
    }
}

pub struct Search<'a> {
    pub f: &'a Field,
    pub n: usize,
    pub gamma: Option<&'a GammaMatrix>,
    pub bounds: Bounds,
    pub nu0: i64,
    /// Require `ε^N O^n ⊆ L`.
    pub contains_power: Option<i32>,
    pub cap: u64,
    nodes: AtomicU64,
}

type Sink<'s> = dyn FnMut(&OLattice) -> Result<()> + 's;

impl<'a> Search<'a> {
    pub fn new(f: &'a Field, n: usize, gamma: Option<&'a GammaMatrix>, bounds: Bounds, nu0: i64, cap: u64) -> Self {
        assert!(n >= 1 && n <= MAX_N && bounds.d.len() == n && bounds.entry_min.len() == n);
        Search { f, n, gamma, bounds, nu0, contains_power: None, cap, nodes: AtomicU64::new(0) }
    }

    pub fn nodes(&self) -> u64 {
        self.nodes.load(Ordering::Relaxed)
    }

    fn tick(&self, k: u64) -> Result<()> {
        let v = self.nodes.fetch_add(k, Ordering::Relaxed) + k;
        if v > self.cap {
            return Err(Error::BudgetExceeded { estimate: v as u128, cap: self.cap as u128 });
        }
        Ok(())
    }

    /// Visits every lattice in the box, sequentially.
    pub fn for_each(&self, sink: &mut Sink<'_>) -> Result<()> {
        let mut lat = OLattice::diagonal(&vec![0; self.n])?;
        self.rec(self.n - 1, &mut lat, 0, sink)
    }

    /// Number of lattices in the box satisfying `pred`.
    pub fn count(&self, pred: &(dyn Fn(&OLattice) -> Result<bool> + Sync)) -> Result<u64> {
        let top = self.n - 1;
        if top == 0 {
            let mut c = 0u64;
            self.for_each(&mut |l| {
                c += pred(l)? as u64;
                Ok(())
            })?;
            return Ok(c);
        }
        let (lo, hi) = self.bounds.d[top];
        let parts: Vec<u64> = (lo..=hi)
            .into_par_iter()
            .map(|dk| {
                let mut lat = OLattice::diagonal(&vec![0; self.n])?;
                let mut c = 0u64;
                self.level(top, dk, &mut lat, 0, &mut |l| {
                    c += pred(l)? as u64;
                    Ok(())
                })?;
                Ok(c)
            })
            .collect::<Result<_>>()?;
        Ok(parts.into_iter().sum())
    }

    fn sum_range(&self, upto: usize) -> (i64, i64) {
        self.bounds.d[..upto].iter().fold((0, 0), |(a, b), &(lo, hi)| (a + lo as i64, b + hi as i64))
    }

    fn rec(&self, k: usize, lat: &mut OLattice, sum: i64, sink: &mut Sink<'_>) -> Result<()> {
        let (lo, hi) = self.bounds.d[k];
        if k == 0 {
            let d0 = self.nu0 - sum;
            if d0 < lo as i64 || d0 > hi as i64 {
                return Ok(());
            }
            return self.level(0, d0 as i32, lat, sum, sink);
        }
        for dk in lo..=hi {
            self.level(k, dk, lat, sum, sink)?;
        }
        Ok(())
    }

    fn level(&self, k: usize, dk: i32, lat: &mut OLattice, sum: i64, sink: &mut Sink<'_>) -> Result<()> {
        let sum = sum + dk as i64;
        let (rlo, rhi) = self.sum_range(k);
        if sum + rlo > self.nu0 || sum + rhi < self.nu0 {
            return Ok(());
        }
        lat.d[k] = dk;
        lat.basis[k] = [Laurent::ZERO; MAX_N];
        lat.basis[k][k] = Laurent::eps_pow(dk)?;
        let emin = self.bounds.entry_min[k].min(dk);
        let slots = (dk - emin) as usize;
        let cols: Vec<usize> = (k + 1..self.n).collect();
        let nvars = slots * cols.len();
        let set_row = |lat: &mut OLattice, digits: &[u8]| -> Result<()> {
            for (ci, &j) in cols.iter().enumerate() {
                let mut x = Laurent::ZERO;
                for s in 0..slots {
                    let c = digits[ci * slots + s];
                    if c != 0 {
                        x.set(emin + s as i32, c)?;
                    }
                }
                lat.basis[k][j] = x;
            }
            Ok(())
        };
        let next = |lat: &mut OLattice, sink: &mut Sink<'_>| -> Result<()> {
            if k == 0 {
                if let Some(p) = self.contains_power {
                    if !self.contains_eps_power(lat, p)? {
                        return Ok(());
                    }
                }
                sink(lat)
            } else {
                self.rec(k - 1, lat, sum, sink)
            }
        };
        let checked = self.gamma.is_some_and(|g| k == 0 || g.preserves_tail(k));
        let linear = checked && self.gamma.is_some_and(|g| g.column_upper(k));
        if linear {
            let g = self.gamma.unwrap();
            let Some(solutions) = self.solve_row(k, lat, &cols, slots, g, &set_row)? else {
                return Ok(());
            };
            self.tick(solutions.count())?;
            for digits in solutions.iter(self.f) {
                set_row(lat, &digits)?;
                next(lat, sink)?;
            }
            return Ok(());
        }
        let q = self.f.q as u64;
        let total =
            q.checked_pow(nvars as u32).ok_or(Error::BudgetExceeded { estimate: u128::MAX, cap: self.cap as u128 })?;
        self.tick(total)?;
        let mut digits = vec![0u8; nvars];
        for _ in 0..total {
            set_row(lat, &digits)?;
            if !checked || lat.is_stable_from(k, &self.gamma.unwrap().m, self.f)? {
                next(lat, sink)?;
            }
            for x in digits.iter_mut() {
                *x += 1;
                if (*x as u64) < q {
                    break;
                }
                *x = 0;
            }
        }
        Ok(())
    }

    fn contains_eps_power(&self, lat: &OLattice, p: i32) -> Result<bool> {
        for i in 0..self.n {
            let mut v = [Laurent::ZERO; MAX_N];
            v[i] = Laurent::eps_pow(p)?;
            if !lat.contains(&v, self.f)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Row-`k` residuals of `γ b_j` after clearing rows `> k`; `None` if that already fails.
    fn residuals(&self, k: usize, lat: &OLattice, g: &GammaMatrix) -> Result<Option<Vec<Laurent>>> {
        let f = self.f;
        let mut out = Vec::with_capacity(self.n - k);
        for j in k..self.n {
            let mut w = [Laurent::ZERO; MAX_N];
            for r in k..self.n {
                for c in k..=j {
                    if !g.m[r][c].is_zero() && !lat.basis[c][j].is_zero() {
                        w[r] = w[r].add(&g.m[r][c].mul(&lat.basis[c][j], f)?, f);
                    }
                }
            }
            for i in (k + 1..self.n).rev() {
                if w[i].is_zero() {
                    continue;
                }
                let c = w[i].shift(-lat.d[i])?;
                if c.val_or_max() < 0 {
                    return Ok(None);
                }
                for r in k..=i {
                    w[r] = w[r].sub(&c.mul(&lat.basis[r][i], f)?, f);
                }
            }
            out.push(w[k]);
        }
        Ok(Some(out))
    }

    #[allow(clippy::too_many_arguments)]
    fn solve_row(
        &self,
        k: usize,
        lat: &mut OLattice,
        cols: &[usize],
        slots: usize,
        g: &GammaMatrix,
        set_row: &dyn Fn(&mut OLattice, &[u8]) -> Result<()>,
    ) -> Result<Option<AffineSpace>> {
        let f = self.f;
        let nvars = slots * cols.len();
        let mut digits = vec![0u8; nvars];
        set_row(lat, &digits)?;
        let Some(r0) = self.residuals(k, lat, g)? else {
            return Ok(None);
        };
        let mut lin = Vec::with_capacity(nvars);
        for t in 0..nvars {
            digits[t] = 1;
            set_row(lat, &digits)?;
            let rt = self.residuals(k, lat, g)?.expect("rows below k do not depend on row k");
            lin.push(rt.iter().zip(&r0).map(|(a, b)| a.sub(b, f)).collect::<Vec<_>>());
            digits[t] = 0;
        }
        let dk = lat.d[k];
        let mut rows = Vec::new();
        for (jj, base) in r0.iter().enumerate() {
            let low = lin.iter().map(|v| v[jj].val_or_max()).chain([base.val_or_max()]).min().unwrap();
            if low == i32::MAX {
                continue;
            }
            for e in low..dk {
                let coeffs: Vec<u8> = lin.iter().map(|v| v[jj].coeff(e)).collect();
                rows.push((coeffs, f.neg(base.coeff(e))));
            }
        }
        Ok(AffineSpace::solve(f, nvars, rows))
    }
}

/// Solution set `x0 + span(kernel)` of a linear system over `F_q`.
pub struct AffineSpace {
    q: u64,
    x0: Vec<u8>,
    kernel: Vec<Vec<u8>>,
}

impl AffineSpace {
    pub fn solve(f: &Field, nvars: usize, mut rows: Vec<(Vec<u8>, u8)>) -> Option<Self> {
        let mut pivots: Vec<usize> = Vec::new();
        let mut r = 0;
        for c in 0..nvars {
            let Some(p) = (r..rows.len()).find(|&i| rows[i].0[c] != 0) else {
                continue;
            };
            rows.swap(r, p);
            let inv = f.inv(rows[r].0[c]);
            for x in rows[r].0.iter_mut() {
                *x = f.mul(*x, inv);
            }
            rows[r].1 = f.mul(rows[r].1, inv);
            for i in 0..rows.len() {
                if i != r && rows[i].0[c] != 0 {
                    let m = rows[i].0[c];
                    for cc in 0..nvars {
                        let v = f.mul(m, rows[r].0[cc]);
                        rows[i].0[cc] = f.sub(rows[i].0[cc], v);
                    }
                    rows[i].1 = f.sub(rows[i].1, f.mul(m, rows[r].1));
                }
            }
            pivots.push(c);
            r += 1;
        }
        if rows[r..].iter().any(|(_, b)| *b != 0) {
            return None;
        }
        let mut x0 = vec![0u8; nvars];
        for (i, &c) in pivots.iter().enumerate() {
            x0[c] = rows[i].1;
        }
        let free: Vec<usize> = (0..nvars).filter(|c| !pivots.contains(c)).collect();
        let kernel = free
            .iter()
            .map(|&fc| {
                let mut v = vec![0u8; nvars];
                v[fc] = 1;
                for (i, &c) in pivots.iter().enumerate() {
                    v[c] = f.neg(rows[i].0[fc]);
                }
                v
            })
            .collect();
        Some(AffineSpace { q: f.q as u64, x0, kernel })
    }

    /// `q^{dim}`, saturating.
    pub fn count(&self) -> u64 {
        self.q.checked_pow(self.kernel.len() as u32).unwrap_or(u64::MAX)
    }

    pub fn iter<'f>(&'f self, f: &'f Field) -> impl Iterator<Item = Vec<u8>> + 'f {
        let q = self.q;
        (0..self.count()).map(move |mut idx| {
            let mut x = self.x0.clone();
            for v in &self.kernel {
                let c = (idx % q) as u8;
                idx /= q;
                if c != 0 {
                    for (xi, vi) in x.iter_mut().zip(v) {
                        *xi = f.add(*xi, f.mul(c, *vi));
                    }
                }
            }
            x
        })
    }
}
