//! Exact H-polytopes in at most two free coordinates.

use std::collections::BTreeSet;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::root_data::{rat, CoweightVector, LeviSpec, Rat};

/// A row `a·u <= b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HalfSpace {
    pub a: Vec<Rat>,
    pub b: Rat,
}

/// `{u ∈ Q^d : a_r·u <= b_r for all rows}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HPolytope {
    pub dim: usize,
    pub rows: Vec<HalfSpace>,
}

fn dot(a: &[Rat], u: &[Rat]) -> Rat {
    a.iter().zip(u).map(|(x, y)| x * y).sum()
}

/// Solves a square system exactly; `None` when singular.
pub(crate) fn solve(mut m: Vec<Vec<Rat>>, mut rhs: Vec<Rat>) -> Option<Vec<Rat>> {
    let n = rhs.len();
    for c in 0..n {
        let piv = (c..n).find(|&r| !m[r][c].is_zero())?;
        m.swap(c, piv);
        rhs.swap(c, piv);
        let p = m[c][c];
        for r in 0..n {
            if r != c && !m[r][c].is_zero() {
                let f = m[r][c] / p;
                for k in c..n {
                    let v = m[c][k];
                    m[r][k] -= f * v;
                }
                let v = rhs[c];
                rhs[r] -= f * v;
            }
        }
    }
    Some((0..n).map(|i| rhs[i] / m[i][i]).collect())
}

impl HPolytope {
    pub fn new(dim: usize) -> Self {
        HPolytope { dim, rows: Vec::new() }
    }

    pub fn push(&mut self, a: Vec<Rat>, b: Rat) {
        debug_assert_eq!(a.len(), self.dim);
        self.rows.push(HalfSpace { a, b });
    }

    pub fn contains(&self, u: &[Rat]) -> bool {
        self.rows.iter().all(|h| dot(&h.a, u) <= h.b)
    }

    /// Rows holding with equality at `u`.
    pub fn tight_rows(&self, u: &[Rat]) -> Vec<usize> {
        (0..self.rows.len()).filter(|&k| dot(&self.rows[k].a, u) == self.rows[k].b).collect()
    }

    fn recession_nonzero(&self) -> bool {
        let ok = |d: &[Rat]| self.rows.iter().all(|h| dot(&h.a, d) <= Rat::zero());
        match self.dim {
            0 => false,
            1 => ok(&[rat(1)]) || ok(&[rat(-1)]),
            _ => {
                let nz: Vec<&HalfSpace> = self.rows.iter().filter(|h| h.a.iter().any(|x| !x.is_zero())).collect();
                if nz.is_empty() {
                    return true;
                }
                nz.iter().any(|h| {
                    let d = vec![-h.a[1], h.a[0]];
                    let e = vec![h.a[1], -h.a[0]];
                    ok(&d) || ok(&e)
                })
            }
        }
    }

    /// Vertex set, sorted; empty when infeasible.
    pub fn vertices(&self) -> Result<Vec<Vec<Rat>>> {
        if self.dim > 2 {
            return Err(Error::UnsupportedGroup(format!("polytope of dimension {}", self.dim)));
        }
        let mut out = BTreeSet::new();
        match self.dim {
            0 => {
                if self.contains(&[]) {
                    out.insert(vec![]);
                }
            }
            1 => {
                for h in &self.rows {
                    if !h.a[0].is_zero() {
                        let u = vec![h.b / h.a[0]];
                        if self.contains(&u) {
                            out.insert(u);
                        }
                    }
                }
            }
            _ => {
                for (i, h) in self.rows.iter().enumerate() {
                    for g in &self.rows[i + 1..] {
                        if let Some(u) = solve(vec![h.a.clone(), g.a.clone()], vec![h.b, g.b]) {
                            if self.contains(&u) {
                                out.insert(u);
                            }
                        }
                    }
                }
            }
        }
        if self.recession_nonzero() && (self.dim > 0) && (!out.is_empty() || self.feasible_by_rays()) {
            return Err(Error::Unbounded);
        }
        Ok(out.into_iter().collect())
    }

    fn feasible_by_rays(&self) -> bool {
        // a region with a nonzero recession cone and no vertex is either empty or a strip/half-plane;
        // test the origin and points on each boundary line for feasibility
        if self.contains(&vec![Rat::zero(); self.dim]) {
            return true;
        }
        self.rows.iter().any(|h| {
            let nrm: Rat = h.a.iter().map(|x| x * x).sum();
            if nrm.is_zero() {
                return false;
            }
            let u: Vec<Rat> = h.a.iter().map(|x| x * h.b / nrm).collect();
            self.contains(&u)
        })
    }

    /// Integer box `[lo_i, hi_i]` containing the polytope; `None` when empty.
    pub fn integer_box(&self) -> Result<Option<Vec<(i64, i64)>>> {
        let vs = self.vertices()?;
        if vs.is_empty() {
            return Ok(None);
        }
        Ok(Some(
            (0..self.dim)
                .map(|i| {
                    let lo = vs.iter().map(|v| v[i]).min().unwrap();
                    let hi = vs.iter().map(|v| v[i]).max().unwrap();
                    (lo.ceil().to_integer(), hi.floor().to_integer())
                })
                .collect(),
        ))
    }

    pub fn intersect(&self, other: &HPolytope) -> HPolytope {
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        HPolytope { dim: self.dim, rows }
    }
}

/// Coordinates on `a_M^G`: block values `w` with `Σ w = 0`, free part `w[..k-1]`.
#[derive(Clone, Debug)]
pub struct Chart {
    pub levi: LeviSpec,
}

impl Chart {
    pub fn new(levi: &LeviSpec) -> Self {
        Chart { levi: levi.clone() }
    }

    pub fn dim(&self) -> usize {
        self.levi.num_blocks() - 1
    }

    pub fn to_free(&self, v: &CoweightVector) -> Vec<Rat> {
        let s = self.levi.block_sums(v);
        s[..s.len() - 1].to_vec()
    }

    pub fn block_values(&self, u: &[Rat]) -> Vec<Rat> {
        let mut w = u.to_vec();
        w.push(-u.iter().copied().sum::<Rat>());
        w
    }

    pub fn to_coweight(&self, u: &[Rat]) -> CoweightVector {
        let w = self.block_values(u);
        let mut out = CoweightVector::zero(self.levi.n);
        for (b, x) in self.levi.blocks.iter().zip(&w) {
            for &i in b {
                out.0[i] = x / rat(b.len() as i64);
            }
        }
        out
    }

    /// Coefficients of `y ↦ ⟨c, y⟩` in free coordinates.
    pub fn functional(&self, c: &CoweightVector) -> Vec<Rat> {
        let avg: Vec<Rat> = self.levi.blocks.iter().map(|b| c.sum_over(b) / rat(b.len() as i64)).collect();
        let last = *avg.last().unwrap();
        avg[..avg.len() - 1].iter().map(|a| a - last).collect()
    }

    /// Row `⟨c, y⟩ <= b`.
    pub fn row(&self, c: &CoweightVector, b: Rat) -> HalfSpace {
        HalfSpace { a: self.functional(c), b }
    }
}

pub(crate) fn indicator(n: usize, s: &[usize]) -> CoweightVector {
    let mut v = CoweightVector::zero(n);
    for &i in s {
        v.0[i] = Rat::one();
    }
    v
}
