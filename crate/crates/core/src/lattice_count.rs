//! Counting points of `Λ_M^{ν0}` in polytopes of `a_M^G` (rank at most 2).

use std::collections::BTreeMap;

use crate::element::RegularElementSpec;
use crate::error::{Error, Result};
use crate::geometry::{Chart, HPolytope};
use crate::polytopes::{dilate, pi0, sigma_gamma};
use crate::root_data::{rat, CoweightVector, LeviSpec, Rat};

/// Points `ν ∈ Λ_M` with `ν_G(ν) = ν0`, optionally of a fixed class, inside a polytope.
///
/// Points are written relative to a base point of `Λ_M^{ν0}`: the block vector `w = ν - base`
/// has total 0 and sits at `to_coweight(w)` in `a_M^G`.
#[derive(Clone, Debug)]
pub struct LatticeRegion {
    pub ambient: LeviSpec,
    pub nu0: i64,
    pub base: Vec<i64>,
    pub class: Option<Vec<i64>>,
    pub polytope: HPolytope,
    /// Rows on which no lattice point may lie (perturbed walls).
    pub generic: Vec<bool>,
}

impl LatticeRegion {
    pub fn new(ambient: &LeviSpec, nu0: i64, base: Vec<i64>) -> Result<Self> {
        if base.len() != ambient.num_blocks() || base.iter().sum::<i64>() != nu0 {
            return Err(Error::InvalidParams("base point must lie in Λ_M^{ν0}".into()));
        }
        let chart = Chart::new(ambient);
        Ok(LatticeRegion {
            ambient: ambient.clone(),
            nu0,
            base,
            class: None,
            polytope: HPolytope::new(chart.dim()),
            generic: Vec::new(),
        })
    }

    pub fn chart(&self) -> Chart {
        Chart::new(&self.ambient)
    }

    pub fn with_class(mut self, class: Vec<i64>) -> Self {
        self.class = Some(class);
        self
    }

    /// Adds `⟨c, y⟩ <= b` for `y ∈ a_M^G`.
    pub fn push(&mut self, c: &CoweightVector, b: Rat, generic: bool) {
        let r = self.chart().row(c, b);
        self.polytope.push(r.a, r.b);
        self.generic.push(generic);
    }

    pub fn extend(&mut self, h: &HPolytope, generic: bool) {
        for r in &h.rows {
            self.polytope.push(r.a.clone(), r.b);
            self.generic.push(generic);
        }
    }

    /// Class in `Λ_{M^ad}` of a relative block vector.
    pub fn class_of(&self, w: &[i64]) -> Vec<i64> {
        self.ambient.class_of(w)
    }

    /// Visits every lattice point as its relative block vector.
    pub fn for_each_point(&self, mut f: impl FnMut(&[i64])) -> Result<()> {
        let Some(bx) = self.polytope.integer_box()? else {
            return Ok(());
        };
        let d = bx.len();
        if bx.iter().any(|(lo, hi)| lo > hi) {
            return Ok(());
        }
        let mut u: Vec<i64> = bx.iter().map(|r| r.0).collect();
        loop {
            let ur: Vec<Rat> = u.iter().map(|&x| rat(x)).collect();
            if self.polytope.contains(&ur) {
                for k in self.polytope.tight_rows(&ur) {
                    if self.generic[k] {
                        return Err(Error::GenericityFailure(format!("lattice point {u:?} on a perturbed wall")));
                    }
                }
                let mut w = u.clone();
                w.push(-u.iter().sum::<i64>());
                if self.class.as_ref().map_or(true, |c| *c == self.class_of(&w)) {
                    f(&w);
                }
            }
            let mut k = 0;
            loop {
                if k == d {
                    return Ok(());
                }
                u[k] += 1;
                if u[k] <= bx[k].1 {
                    break;
                }
                u[k] = bx[k].0;
                k += 1;
            }
        }
    }

    pub fn points(&self) -> Result<Vec<Vec<i64>>> {
        let mut out = Vec::new();
        self.for_each_point(|w| out.push(w.to_vec()))?;
        Ok(out)
    }
}

/// Exact number of lattice points.
pub fn count_points(r: &LatticeRegion) -> Result<u64> {
    let mut c = 0;
    r.for_each_point(|_| c += 1)?;
    Ok(c)
}

/// Lattice points grouped by their class in `Λ_{M^ad}`.
pub fn count_points_by_class(r: &LatticeRegion) -> Result<BTreeMap<Vec<i64>, u64>> {
    let mut out = BTreeMap::new();
    r.for_each_point(|w| *out.entry(r.class_of(w)).or_insert(0) += 1)?;
    Ok(out)
}

fn check_gl3_region(n1: i64, n2: i64, a1: i64, a2: i64) -> Result<()> {
    if n1 < 0 || n2 < n1 {
        return Err(Error::InvalidParams(format!("need 0 <= n1 <= n2, got ({n1}, {n2})")));
    }
    let out = || Error::OutOfValidityRegion(format!("a = ({a1}, {a2}) for (n1, n2) = ({n1}, {n2})"));
    if 2 * a1 - a2 <= 0 || 2 * a2 - a1 <= 0 {
        return Err(out());
    }
    let spec = RegularElementSpec::Gl3Split { n1: n1 as u32, n2: n2 as u32 };
    let s = sigma_gamma(&spec);
    let pi = dilate(&s, &[a1, a2]).map_err(|_| out())?;
    pi0(&pi, &s).map_err(|_| out())?;
    Ok(())
}

/// `|Λ_T^0 ∩ Π0|` for split `GL3`: the big triangle minus its three corners.
pub fn gl3_hexagon_count(n1: i64, n2: i64, a1: i64, a2: i64) -> Result<i64> {
    check_gl3_region(n1, n2, a1, a2)?;
    let t0 = (3 * a2 - 2 - 2 * n1 - n2) * (3 * a2 - 1 - 2 * n1 - n2) / 2;
    let t1 = (2 * a2 - a1 - n1 - 1) * (2 * a2 - a1 - n1);
    let t3 = (2 * a2 - a1 - n2 - 1) * (2 * a2 - a1 - n2) / 2;
    Ok(t0 - t1 - t3)
}

/// `|Λ_M ∩ π_M(Π0)|` for the Levis `{1}{23}`, `{12}{3}`, `{13}{2}` of split `GL3`.
pub fn gl3_strip_counts(n1: i64, n2: i64, a1: i64, a2: i64) -> Result<(i64, i64, i64)> {
    check_gl3_region(n1, n2, a1, a2)?;
    let s = a1 + a2;
    Ok((s - 2 * n1 - 1, s - n1 - n2 - 1, s - n1 - n2 - 1))
}
