//! `O`-lattices in `F^n` (`n <= 3`) in column Hermite form.

use super::field::Field;
use super::series::{Laurent, EMAX};
use crate::error::{Error, Result};
use crate::root_data::{LambdaElement, ParabolicSpec};

pub const MAX_N: usize = 3;
pub type Mat = [[Laurent; MAX_N]; MAX_N];
pub type Vector = [Laurent; MAX_N];

pub fn zero_mat() -> Mat {
    [[Laurent::ZERO; MAX_N]; MAX_N]
}

/// Upper triangular basis: column `j` is the `j`-th generator, `basis[i][i] = ε^{d_i}`
/// and `basis[i][j]` (`i < j`) only has exponents below `d_i`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct OLattice {
    pub n: usize,
    pub d: [i32; MAX_N],
    pub basis: Mat,
}

impl std::fmt::Debug for OLattice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "OLattice(d={:?}", &self.d[..self.n])?;
        for i in 0..self.n {
            for j in i + 1..self.n {
                write!(f, ", b{}{}={:?}", i + 1, j + 1, self.basis[i][j])?;
            }
        }
        write!(f, ")")
    }
}

impl OLattice {
    /// Diagonal lattice `⊕ ε^{d_i} O`.
    pub fn diagonal(d: &[i32]) -> Result<Self> {
        let n = d.len();
        if n == 0 || n > MAX_N {
            return Err(Error::UnsupportedGroup(format!("rank {n}")));
        }
        let mut l = OLattice { n, d: [0; MAX_N], basis: zero_mat() };
        for (i, &di) in d.iter().enumerate() {
            l.d[i] = di;
            l.basis[i][i] = Laurent::eps_pow(di)?;
        }
        Ok(l)
    }

    /// `val det`.
    pub fn nu(&self) -> i64 {
        self.d[..self.n].iter().map(|&x| x as i64).sum()
    }

    /// Membership of `v` in the image of this lattice on coordinates `k..n`.
    pub fn contains_from(&self, k: usize, v: &Vector, f: &Field) -> Result<bool> {
        let mut v = *v;
        for i in (k..self.n).rev() {
            if v[i].is_zero() {
                continue;
            }
            let c = v[i].shift(-self.d[i])?;
            if c.val_or_max() < 0 {
                return Ok(false);
            }
            for r in k..=i {
                v[r] = v[r].sub(&c.mul(&self.basis[r][i], f)?, f);
            }
        }
        Ok(true)
    }

    pub fn contains(&self, v: &Vector, f: &Field) -> Result<bool> {
        self.contains_from(0, v, f)
    }

    /// `g·L̄ ⊆ L̄` for the image `L̄` on coordinates `k..n`, using the block `g[k..][k..]`.
    pub fn is_stable_from(&self, k: usize, g: &Mat, f: &Field) -> Result<bool> {
        for j in k..self.n {
            let mut w = [Laurent::ZERO; MAX_N];
            for r in k..self.n {
                for c in k..=j {
                    if !g[r][c].is_zero() && !self.basis[c][j].is_zero() {
                        w[r] = w[r].add(&g[r][c].mul(&self.basis[c][j], f)?, f);
                    }
                }
            }
            if !self.contains_from(k, &w, f)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn is_stable(&self, g: &Mat, f: &Field) -> Result<bool> {
        self.is_stable_from(0, g, f)
    }

    /// Minimum valuation of the `|S| × |S|` minors on rows `S`.
    pub fn minor_val(&self, rows: &[usize], f: &Field) -> Result<i64> {
        let n = self.n;
        let b = &self.basis;
        match rows.len() {
            0 => Ok(0),
            k if k == n => Ok(self.nu()),
            1 => Ok((0..n).map(|j| b[rows[0]][j].val_or_max()).min().unwrap() as i64),
            2 => {
                let (r1, r2) = (rows[0], rows[1]);
                let mut best = i32::MAX;
                for c1 in 0..n {
                    for c2 in c1 + 1..n {
                        let det = b[r1][c1].mul(&b[r2][c2], f)?.sub(&b[r1][c2].mul(&b[r2][c1], f)?, f);
                        best = best.min(det.val_or_max());
                    }
                }
                Ok(best as i64)
            }
            _ => Err(Error::UnsupportedGroup(format!("minors of size {} in rank {n}", rows.len()))),
        }
    }

    /// `H_P(L) ∈ Λ_M` for a parabolic `P ∈ F(A)` with Levi `M`, values in the order of `M`'s blocks.
    ///
    /// Reading the blocks of `P` from the last: the last block gets `v(B_k)`, each earlier block
    /// the increment `v(B_j ∪ … ∪ B_k) − v(B_{j+1} ∪ … ∪ B_k)`.
    pub fn retraction(&self, p: &ParabolicSpec, f: &Field) -> Result<LambdaElement> {
        let m = p.levi();
        let mut values = vec![0i64; m.num_blocks()];
        let mut tail: Vec<usize> = Vec::new();
        let mut prev = 0i64;
        for b in p.order.iter().rev() {
            tail.extend(b.iter().copied());
            tail.sort_unstable();
            let v = self.minor_val(&tail, f)?;
            values[m.block_of(b[0])] = v - prev;
            prev = v;
        }
        LambdaElement::new(m, values)
    }
}

/// Column Hermite form of the lattice spanned by the columns of `basis`, computed modulo
/// `ε^prec O^n`; valid whenever `ε^prec O^n` lies in the lattice.
pub fn canonicalize(n: usize, basis: &Mat, prec: i32, f: &Field) -> Result<OLattice> {
    let mut b = *basis;
    let trunc = |x: Laurent| x.below(prec);
    for row in b.iter_mut().take(n) {
        for x in row.iter_mut().take(n) {
            *x = trunc(*x);
        }
    }
    let mut d = [0i32; MAX_N];
    for i in (0..n).rev() {
        let piv = (0..=i)
            .filter(|&j| !b[i][j].is_zero())
            .min_by_key(|&j| b[i][j].val_or_max())
            .ok_or_else(|| Error::InvalidParams("basis is singular".into()))?;
        for row in b.iter_mut().take(n) {
            row.swap(piv, i);
        }
        let e = b[i][i].val().unwrap();
        d[i] = e;
        let u = b[i][i].shift(-e)?.unit_inverse(prec - e + 1, f)?;
        for r in 0..n {
            b[r][i] = trunc(b[r][i].mul(&u, f)?);
        }
        for j in 0..i {
            if b[i][j].is_zero() {
                continue;
            }
            let h = b[i][j].shift(-e)?;
            for r in 0..n {
                b[r][j] = trunc(b[r][j].sub(&h.mul(&b[r][i], f)?, f));
            }
        }
    }
    for j in 0..n {
        for i in (0..j).rev() {
            let h = b[i][j].at_least(d[i]).shift(-d[i])?;
            if h.is_zero() {
                continue;
            }
            for r in 0..=i {
                b[r][j] = trunc(b[r][j].sub(&h.mul(&b[r][i], f)?, f));
            }
        }
    }
    for i in 0..n {
        b[i][i] = Laurent::eps_pow(d[i])?;
        for j in 0..i {
            b[i][j] = Laurent::ZERO;
        }
    }
    if d[..n].iter().any(|&x| x >= prec) {
        return Err(Error::PrecisionExhausted("pivot above the working precision".into()));
    }
    Ok(OLattice { n, d, basis: b })
}

/// Largest exponent the default precision can carry.
pub const DEFAULT_PREC: i32 = EMAX / 2;
