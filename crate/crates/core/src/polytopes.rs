//! Positive `(L, M0)`-orthogonal families and the truncation polytopes built from them.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::element::{CaseKind, RegularElementSpec};
use crate::error::{Error, Result};
use crate::geometry::{indicator, Chart, HPolytope};
use crate::root_data::{m_alpha, rat, CoweightVector, LeviSpec, ParabolicSpec, Rat, Root, RootDatum};

/// Prime used for the region perturbation `ς`.
pub const VARSIGMA_PRIME: i64 = 1009;
/// Prime used for the default generic point `ξ`.
pub const XI_PRIME: i64 = 1013;

/// All `P ∩ L` for `P ∈ P(M0)`, written as block orders grouped by the blocks of `L`.
pub fn relative_parabolics(m0: &LeviSpec, l: &LeviSpec) -> Vec<ParabolicSpec> {
    let mut acc: Vec<Vec<Vec<usize>>> = vec![vec![]];
    for lb in &l.blocks {
        let inner: Vec<Vec<usize>> = m0.blocks.iter().filter(|b| lb.contains(&b[0])).cloned().collect();
        let perms = crate::root_data::permutations(&inner);
        let mut next = Vec::new();
        for a in &acc {
            for p in &perms {
                let mut o = a.clone();
                o.extend(p.iter().cloned());
                next.push(o);
            }
        }
        acc = next;
    }
    acc.into_iter().map(|order| ParabolicSpec { order }).collect()
}

/// `P ∩ L` in the grouped form used by [`relative_parabolics`].
pub fn restrict(p: &ParabolicSpec, l: &LeviSpec) -> ParabolicSpec {
    let mut order = Vec::new();
    for lb in &l.blocks {
        order.extend(p.order.iter().filter(|b| lb.contains(&b[0])).cloned());
    }
    ParabolicSpec { order }
}

/// A positive `(L, M0)`-orthogonal family; `ambient` is `L`, vertices lie in `a_{M0}^L`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrthogonalFamily {
    pub ambient: LeviSpec,
    pub m0: LeviSpec,
    pub vertices: BTreeMap<ParabolicSpec, CoweightVector>,
}

impl OrthogonalFamily {
    /// Validates the index set and positivity.
    pub fn new(ambient: LeviSpec, m0: LeviSpec, vertices: BTreeMap<ParabolicSpec, CoweightVector>) -> Result<Self> {
        let f = OrthogonalFamily { ambient, m0, vertices };
        let want: BTreeSet<ParabolicSpec> = relative_parabolics(&f.m0, &f.ambient).into_iter().collect();
        let have: BTreeSet<ParabolicSpec> = f.vertices.keys().cloned().collect();
        if want != have {
            return Err(Error::InvalidParams("vertex keys must be exactly P^L(M0)".into()));
        }
        for v in f.vertices.values() {
            if !f.m0.is_central(v) || f.ambient.block_sums(v).iter().any(|s| !s.is_zero()) {
                return Err(Error::InvalidParams(format!("vertex {v} is not in a_M0^L")));
            }
        }
        f.check_positive()?;
        Ok(f)
    }

    pub fn n(&self) -> usize {
        self.m0.n
    }

    pub fn is_global(&self) -> bool {
        self.ambient.is_whole()
    }

    pub fn parabolics(&self) -> impl Iterator<Item = &ParabolicSpec> {
        self.vertices.keys()
    }

    pub fn vertex(&self, p: &ParabolicSpec) -> &CoweightVector {
        self.vertices.get(p).unwrap_or_else(|| panic!("no vertex for {p}"))
    }

    /// Ordered adjacent pairs `(P1, P2, j)`: `P2` swaps blocks `j, j+1` of `P1` inside one block of `L`.
    pub fn adjacent_pairs(&self) -> Vec<(ParabolicSpec, ParabolicSpec, usize)> {
        let mut out = Vec::new();
        for p in self.vertices.keys() {
            for j in 0..p.order.len().saturating_sub(1) {
                if self.ambient.block_of(p.order[j][0]) == self.ambient.block_of(p.order[j + 1][0]) {
                    out.push((p.clone(), p.swap(j), j));
                }
            }
        }
        out
    }

    /// `n` with `λ_{P1} - λ_{P2} = n·β_{P1,P2}`.
    pub fn edge_coefficient(&self, p1: &ParabolicSpec, p2: &ParabolicSpec) -> Result<Rat> {
        let j = p1.adjacency(p2).ok_or_else(|| Error::NotAdjacent(format!("{p1} and {p2}")))?;
        let b = p1.simple_coroot_image(j);
        let d = self.vertex(p1) - self.vertex(p2);
        let k = (0..b.dim()).find(|&i| !b.0[i].is_zero()).unwrap();
        let c = d.0[k] / b.0[k];
        if b.scale(c) != d {
            return Err(Error::PositivityViolated(format!("{p1} - {p2} is not parallel to β")));
        }
        Ok(c)
    }

    pub fn check_positive(&self) -> Result<()> {
        for (p1, p2, _) in self.adjacent_pairs() {
            let c = self.edge_coefficient(&p1, &p2)?;
            if c.is_negative() {
                return Err(Error::PositivityViolated(format!("edge {p1}-{p2} has coefficient {c}")));
            }
        }
        Ok(())
    }

    /// Vertices lie in the image of `Λ_{M0}`.
    pub fn is_integral(&self) -> bool {
        self.vertices.values().all(|v| self.m0.block_sums(v).iter().all(|s| s.is_integer()))
    }

    pub fn translate(&self, t: &CoweightVector) -> OrthogonalFamily {
        OrthogonalFamily {
            ambient: self.ambient.clone(),
            m0: self.m0.clone(),
            vertices: self.vertices.iter().map(|(p, v)| (p.clone(), v + t)).collect(),
        }
    }

    pub fn vertex_set(&self) -> BTreeSet<CoweightVector> {
        self.vertices.values().cloned().collect()
    }

    /// Inequalities `Σ_{i∈S} x_i <= h_S`, one per proper prefix `S` inside each block of `L`.
    pub fn h_rep(&self) -> Vec<(Vec<usize>, Rat)> {
        let mut rows: BTreeMap<Vec<usize>, Rat> = BTreeMap::new();
        for (p, v) in &self.vertices {
            let mut pos = 0;
            for lb in &self.ambient.blocks {
                let inner: Vec<&Vec<usize>> = p.order.iter().filter(|b| lb.contains(&b[0])).collect();
                let mut s: Vec<usize> = Vec::new();
                for b in inner.iter().take(inner.len().saturating_sub(1)) {
                    s.extend(b.iter().copied());
                    let mut key = s.clone();
                    key.sort_unstable();
                    let h = v.sum_over(&key);
                    rows.entry(key).and_modify(|x| *x = (*x).min(h)).or_insert(h);
                }
                pos += inner.len();
            }
            debug_assert_eq!(pos, p.order.len());
        }
        rows.into_iter().collect()
    }

    /// Membership of a point of `a_{M0}^L` in the convex hull.
    pub fn contains(&self, x: &CoweightVector) -> bool {
        self.h_rep().iter().all(|(s, h)| x.sum_over(s) <= *h)
    }

    /// The hull as an [`HPolytope`] in the free chart of `a_{M0}^G`.
    pub fn to_hpolytope(&self) -> Result<HPolytope> {
        if !self.is_global() {
            return Err(Error::InvalidParams("H-polytope chart needs a global family".into()));
        }
        let chart = Chart::new(&self.m0);
        let mut h = HPolytope::new(chart.dim());
        for (s, b) in self.h_rep() {
            let r = chart.row(&indicator(self.n(), &s), b);
            h.push(r.a, r.b);
        }
        Ok(h)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(FamilyJson::from(self)).unwrap()
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let j: FamilyJson = serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        j.into_family()
    }
}

#[derive(Serialize, Deserialize)]
struct FamilyJson {
    m0: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ambient: Option<Vec<Vec<usize>>>,
    vertices: BTreeMap<String, CoweightVector>,
}

fn one_based(blocks: &[Vec<usize>]) -> Vec<Vec<usize>> {
    blocks.iter().map(|b| b.iter().map(|i| i + 1).collect()).collect()
}

fn zero_based(blocks: &[Vec<usize>]) -> Result<Vec<Vec<usize>>> {
    blocks
        .iter()
        .map(|b| b.iter().map(|&i| i.checked_sub(1).ok_or_else(|| Error::Parse("blocks are 1-based".into()))).collect())
        .collect()
}

impl From<&OrthogonalFamily> for FamilyJson {
    fn from(f: &OrthogonalFamily) -> Self {
        FamilyJson {
            m0: one_based(&f.m0.blocks),
            ambient: if f.is_global() { None } else { Some(one_based(&f.ambient.blocks)) },
            vertices: f.vertices.iter().map(|(p, v)| (p.key(), v.clone())).collect(),
        }
    }
}

impl FamilyJson {
    fn into_family(self) -> Result<OrthogonalFamily> {
        let m0 = LeviSpec::new(zero_based(&self.m0)?)?;
        let ambient = match self.ambient {
            Some(a) => LeviSpec::new(zero_based(&a)?)?,
            None => LeviSpec::whole(m0.n),
        };
        let mut vertices = BTreeMap::new();
        for (k, v) in self.vertices {
            let p = ParabolicSpec::from_key(&k)?;
            if v.dim() != m0.n {
                return Err(Error::Parse(format!("vertex {k} has wrong dimension")));
            }
            vertices.insert(p, v);
        }
        OrthogonalFamily::new(ambient, m0, vertices)
    }
}

/// `n(γ, P1, P2) = Σ_{α ∈ Φ(N1) ∩ Φ(N2^-)} val α(γ) · m_α`.
pub fn n_gamma(spec: &RegularElementSpec, p1: &ParabolicSpec, p2: &ParabolicSpec) -> Result<i64> {
    let m0 = spec.m0();
    p1.adjacency(p2).ok_or_else(|| Error::NotAdjacent(format!("{p1} and {p2}")))?;
    let mut s = Rat::zero();
    for r in RootDatum::gl(m0.n).roots() {
        if p1.in_unipotent(r) && p2.in_unipotent(r.negate()) {
            s += spec.root_valuation(r) * rat(m_alpha(&m0, p1, p2, r)?);
        }
    }
    if !s.is_integer() {
        return Err(Error::InvalidParams(format!("n(γ) = {s} is not an integer")));
    }
    Ok(s.to_integer())
}

/// Moment polytope of a regular point, normalised by `λ_{P0}(Σ_γ) = 0`.
pub fn sigma_gamma(spec: &RegularElementSpec) -> OrthogonalFamily {
    let m0 = spec.m0();
    let n = m0.n;
    let p0 = m0.standard_parabolic();
    let mut vertices = BTreeMap::new();
    for p in m0.parabolics() {
        let mut v = CoweightVector::zero(n);
        for r in RootDatum::gl(n).roots() {
            if p0.in_unipotent(r) && p.in_unipotent(r.negate()) {
                let c = m0.project_center(&r.coroot(n)).scale(spec.root_valuation(r));
                v = &v - &c;
            }
        }
        vertices.insert(p, v);
    }
    OrthogonalFamily::new(LeviSpec::whole(n), m0, vertices).expect("Σ_γ is a positive family")
}

/// `λ_P(Π) = λ_P(Σ) + Σ_j a_j · w_P(π_{M0} α_j^∨)`.
pub fn dilate(sigma: &OrthogonalFamily, a: &[i64]) -> Result<OrthogonalFamily> {
    let f = dilate_unchecked(sigma, a)?;
    f.check_positive()?;
    Ok(f)
}

/// [`dilate`] without the positivity check, for diagnosing non-regular parameters.
pub fn dilate_unchecked(sigma: &OrthogonalFamily, a: &[i64]) -> Result<OrthogonalFamily> {
    let d = sigma.m0.num_blocks() - 1;
    if a.len() != d || !sigma.is_global() {
        return Err(Error::InvalidParams(format!("need {d} dilation parameters")));
    }
    let mut vertices = BTreeMap::new();
    for (p, v) in &sigma.vertices {
        let mut w = v.clone();
        for (j, &aj) in a.iter().enumerate() {
            w = &w + &p.simple_coroot_image(j).scale(rat(aj));
        }
        vertices.insert(p.clone(), w);
    }
    Ok(OrthogonalFamily { ambient: sigma.ambient.clone(), m0: sigma.m0.clone(), vertices })
}

/// Recovers `a` from `λ_{P0}(Π) - λ_{P0}(Σ)`.
pub fn dilation_parameters(pi: &OrthogonalFamily, sigma: &OrthogonalFamily) -> Option<Vec<Rat>> {
    let p0 = pi.m0.standard_parabolic();
    let d = pi.m0.num_blocks() - 1;
    let diff = pi.vertex(&p0) - sigma.vertex(&p0);
    if d == 0 {
        return Some(vec![]);
    }
    let chart = Chart::new(&pi.m0);
    let cols: Vec<Vec<Rat>> = (0..d).map(|j| chart.to_free(&p0.simple_coroot_image(j))).collect();
    let m: Vec<Vec<Rat>> = (0..d).map(|i| (0..d).map(|j| cols[j][i]).collect()).collect();
    crate::geometry::solve(m, chart.to_free(&diff))
}

/// The face `Π^Q`, an `(L, M0)`-family in `a_{M0}^L`.
pub fn face(pi: &OrthogonalFamily, q: &ParabolicSpec) -> Result<OrthogonalFamily> {
    if !pi.is_global() {
        return Err(Error::InvalidParams("faces are taken of global families".into()));
    }
    let l = q.levi();
    if !pi.m0.is_contained_in(&l) {
        return Err(Error::InvalidParams(format!("{q} is not in F(M0)")));
    }
    let mut vertices = BTreeMap::new();
    for (p, v) in &pi.vertices {
        if p.is_contained_in(q) {
            let (_, d) = crate::root_data::project(&l, v);
            vertices.insert(restrict(p, &l), d);
        }
    }
    OrthogonalFamily::new(l, pi.m0.clone(), vertices)
}

/// `π_M(Π)`: the `(G, M)`-family `P' ↦ π_M λ_P` for any `P ⊆ P'`.
pub fn project_family(pi: &OrthogonalFamily, m: &LeviSpec) -> Result<OrthogonalFamily> {
    if !pi.m0.is_contained_in(m) || !pi.is_global() {
        return Err(Error::InvalidParams(format!("{m} does not contain M0")));
    }
    let mut vertices = BTreeMap::new();
    for pp in m.parabolics() {
        let p = pi.vertices.keys().find(|p| p.is_contained_in(&pp)).expect("P(M0) refines P(M)");
        vertices.insert(pp, m.project_center(pi.vertex(p)));
    }
    OrthogonalFamily::new(pi.ambient.clone(), m.clone(), vertices)
}

/// `ς_P = Σ_i p^{-i} ϖ_{P,i}^∨`.
pub fn perturbation(p: &ParabolicSpec, prime: i64) -> CoweightVector {
    let mut v = CoweightVector::zero(p.n());
    let mut eps = Rat::from_integer(1);
    for i in 1..p.order.len() {
        eps /= rat(prime);
        v = &v + &p.fundamental_coweight(i).scale(eps);
    }
    v
}

pub fn perturb(f: &OrthogonalFamily, prime: i64) -> Result<OrthogonalFamily> {
    let vertices = f.vertices.iter().map(|(p, v)| (p.clone(), v + &perturbation(p, prime))).collect();
    OrthogonalFamily::new(f.ambient.clone(), f.m0.clone(), vertices)
}

/// Default generic `ξ`, a small point of the positive chamber of `P0`.
pub fn default_xi(m0: &LeviSpec) -> CoweightVector {
    perturbation(&m0.standard_parabolic(), XI_PRIME)
}

/// `ξ` avoids every wall `Σ_{i∈S} x_i ∈ (1/n!) Z` that a lattice-anchored face can lie on.
pub fn check_xi_generic(xi: &CoweightVector, m0: &LeviSpec) -> Result<()> {
    let n = m0.n;
    let fact: i64 = (1..=n as i64).product();
    for p in m0.parabolics() {
        for i in 1..p.order.len() {
            let s = xi.sum_over(&p.prefix(i)) * rat(fact);
            if s.is_integer() {
                return Err(Error::GenericityFailure(format!("ξ = {xi} lies on a lattice wall")));
            }
        }
    }
    if !m0.is_central(xi) || xi.sum() != Rat::zero() {
        return Err(Error::InvalidParams(format!("ξ = {xi} is not in a_M0^G")));
    }
    Ok(())
}

/// Parabolics of `F(M0)` other than `G`.
pub fn proper_parabolics(m0: &LeviSpec) -> Vec<ParabolicSpec> {
    m0.parabolic_overgroups().into_iter().filter(|p| !p.is_whole()).collect()
}

/// `P ∩ Q` inside `F(M0)`, or `None` when no element of `P(M0)` lies in both.
pub fn meet(m0: &LeviSpec, p: &ParabolicSpec, q: &ParabolicSpec) -> Option<ParabolicSpec> {
    let common: BTreeSet<ParabolicSpec> =
        m0.parabolics().into_iter().filter(|b| b.is_contained_in(p) && b.is_contained_in(q)).collect();
    if common.is_empty() {
        return None;
    }
    m0.parabolic_overgroups().into_iter().find(|r| {
        let under: BTreeSet<ParabolicSpec> = m0.parabolics().into_iter().filter(|b| b.is_contained_in(r)).collect();
        under == common
    })
}

/// `E_P(Π)`: hull of the translates `Σ + λ`, `λ` in the image of `Λ_{M0}^0`, whose `P`-face sits in `Π^P`.
pub fn e_p_family(pi: &OrthogonalFamily, sigma: &OrthogonalFamily, p: &ParabolicSpec) -> Result<OrthogonalFamily> {
    let translates = admissible_translates(pi, sigma, p)?;
    if translates.is_empty() {
        return Err(Error::NotSufficientlyRegular(format!("no translate of Σ fits the face {p}")));
    }
    let mut vertices = BTreeMap::new();
    for (pp, v) in &sigma.vertices {
        let w = perturbation(pp, VARSIGMA_PRIME);
        let best = translates.iter().max_by(|a, b| a.dot(&w).cmp(&b.dot(&w))).unwrap();
        vertices.insert(pp.clone(), v + best);
    }
    OrthogonalFamily::new(pi.ambient.clone(), pi.m0.clone(), vertices)
}

fn admissible_translates(
    pi: &OrthogonalFamily,
    sigma: &OrthogonalFamily,
    p: &ParabolicSpec,
) -> Result<Vec<CoweightVector>> {
    let m0 = &pi.m0;
    let chart = Chart::new(m0);
    let d = chart.dim();
    let l = p.levi();
    let anchor = pi.vertices.iter().find(|(b, _)| b.is_contained_in(p)).map(|(_, v)| l.project_center(v)).unwrap();
    let pif: Vec<_> = pi.vertices.values().map(|v| chart.to_free(v)).collect();
    let sif: Vec<_> = sigma.vertices.values().map(|v| chart.to_free(v)).collect();
    let ranges: Vec<(i64, i64)> = (0..d)
        .map(|i| {
            let lo = pif.iter().map(|v| v[i]).min().unwrap() - sif.iter().map(|v| v[i]).max().unwrap();
            let hi = pif.iter().map(|v| v[i]).max().unwrap() - sif.iter().map(|v| v[i]).min().unwrap();
            (lo.floor().to_integer(), hi.ceil().to_integer())
        })
        .collect();
    let under: Vec<&ParabolicSpec> = sigma.vertices.keys().filter(|b| b.is_contained_in(p)).collect();
    let rows = pi.h_rep();
    let mut out = Vec::new();
    let mut idx: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    if ranges.iter().any(|r| r.0 > r.1) {
        return Ok(out);
    }
    loop {
        let t = chart.to_coweight(&idx.iter().map(|&x| rat(x)).collect::<Vec<_>>());
        let ok = under.iter().all(|b| {
            let y = sigma.vertex(b) + &t;
            l.project_center(&y) == anchor && rows.iter().all(|(s, h)| y.sum_over(s) <= *h)
        });
        if ok {
            out.push(t);
        }
        let mut k = 0;
        loop {
            if k == d {
                return Ok(out);
            }
            idx[k] += 1;
            if idx[k] <= ranges[k].1 {
                break;
            }
            idx[k] = ranges[k].0;
            k += 1;
        }
        if d == 0 {
            return Ok(out);
        }
    }
}

/// `(A^{G,L}_{M0,α})^k`: lengthens by `k` every edge of type `α` and re-anchors at `P0`.
pub fn apply_a_operator(sigma: &OrthogonalFamily, l: &LeviSpec, alpha: Root, k: u32) -> Result<OrthogonalFamily> {
    let m0 = &sigma.m0;
    if !sigma.is_global() || !m0.is_contained_in(l) {
        return Err(Error::InvalidParams("A-operator needs a global family and L ⊇ M0".into()));
    }
    let lb = l.block_of(alpha.i);
    if l.block_of(alpha.j) != lb || m0.block_of(alpha.i) == m0.block_of(alpha.j) {
        return Err(Error::InvalidParams(format!("{alpha} is not a root of L outside M0")));
    }
    let p0 = m0.standard_parabolic();
    let inner: Vec<&Vec<usize>> = p0.order.iter().filter(|b| l.block_of(b[0]) == lb).collect();
    let xi = inner.iter().position(|b| b.contains(&alpha.i)).unwrap();
    let yi = inner.iter().position(|b| b.contains(&alpha.j)).unwrap();
    if yi != xi + 1 {
        return Err(Error::InvalidParams(format!("{alpha} is not simple for P0 ∩ L")));
    }
    let r = xi;
    let n = m0.n;
    let u: Vec<usize> = inner[..=r].iter().flat_map(|b| b.iter().copied()).collect();
    let lblock = &l.blocks[lb];
    let shift = &indicator(n, &u) - &indicator(n, lblock).scale(Rat::new(u.len() as i64, lblock.len() as i64));
    let kk = rat(k as i64);
    let is_type = |p: &ParabolicSpec, j: usize| -> bool {
        let (a, b) = (&p.order[j], &p.order[j + 1]);
        if l.block_of(a[0]) != lb || l.block_of(b[0]) != lb {
            return false;
        }
        let before = p.order[..j].iter().filter(|c| l.block_of(c[0]) == lb).count();
        before == r
    };
    let mut new: BTreeMap<ParabolicSpec, CoweightVector> = BTreeMap::new();
    new.insert(p0.clone(), sigma.vertex(&p0) + &shift.scale(kk));
    let mut queue = VecDeque::from([p0.clone()]);
    while let Some(p) = queue.pop_front() {
        for j in 0..p.order.len() - 1 {
            let q = p.swap(j);
            let len = sigma.edge_coefficient(&p, &q)? + if is_type(&p, j) { kk } else { Rat::zero() };
            let v = &new[&p] - &p.simple_coroot_image(j).scale(len);
            match new.get(&q) {
                Some(w) if *w != v => {
                    return Err(Error::PositivityViolated(format!("A-operator does not close at {q}")));
                }
                Some(_) => {}
                None => {
                    new.insert(q.clone(), v);
                    queue.push_back(q);
                }
            }
        }
    }
    OrthogonalFamily::new(sigma.ambient.clone(), m0.clone(), new)
}

/// `λ_P(Π0) = λ_P(Π) - (λ_P(Σ) - λ_{P^-}(Σ)) - w_P Σ_j π_{M0} α_j^∨`.
pub fn pi0(pi: &OrthogonalFamily, sigma: &OrthogonalFamily) -> Result<OrthogonalFamily> {
    let mut vertices = BTreeMap::new();
    for (p, v) in &pi.vertices {
        let mut w = v - &(sigma.vertex(p) - sigma.vertex(&p.opposite()));
        for j in 0..p.order.len() - 1 {
            w = &w - &p.simple_coroot_image(j);
        }
        vertices.insert(p.clone(), w);
    }
    OrthogonalFamily::new(pi.ambient.clone(), pi.m0.clone(), vertices)
        .map_err(|e| Error::NotSufficientlyRegular(format!("Π0 is not positive: {e}")))
}

/// Regions `R_Q = D0^Q + a_Q^+` attached to the perturbed base family `D0 = Σ + ς`.
#[derive(Clone, Debug)]
pub struct RegionPartition {
    pub sigma: OrthogonalFamily,
    pub d0: OrthogonalFamily,
}

impl RegionPartition {
    pub fn new(sigma: &OrthogonalFamily) -> Result<Self> {
        Ok(RegionPartition { sigma: sigma.clone(), d0: perturb(sigma, VARSIGMA_PRIME)? })
    }

    /// Apex `π_M λ_Q(D0)` of the cone part of `R_Q`.
    pub fn apex(&self, q: &ParabolicSpec) -> CoweightVector {
        let l = q.levi();
        let (_, v) = self.d0.vertices.iter().find(|(p, _)| p.is_contained_in(q)).expect("Q ∈ F(M0)");
        l.project_center(v)
    }

    /// `Some(true/false)` for strict membership, `None` when `x` is on the boundary.
    pub fn membership(&self, q: &ParabolicSpec, x: &CoweightVector) -> Result<Option<bool>> {
        let l = q.levi();
        let (c, d) = crate::root_data::project(&l, x);
        let apex = self.apex(q);
        let mut inside = true;
        for r in q.unipotent_roots() {
            let s = r.pair(&c) - r.pair(&apex);
            if s.is_zero() {
                return Ok(None);
            }
            inside &= s.is_positive();
        }
        let f = face(&self.d0, q)?;
        for (s, h) in f.h_rep() {
            let t = d.sum_over(&s);
            if t == h {
                return Ok(None);
            }
            inside &= t < h;
        }
        Ok(Some(inside))
    }

    /// The unique `Q ∈ F(M0)` with `x ∈ R_Q`.
    pub fn region_of(&self, x: &CoweightVector) -> Result<ParabolicSpec> {
        let mut found = Vec::new();
        for q in self.d0.m0.parabolic_overgroups() {
            match self.membership(&q, x)? {
                None => return Err(Error::GenericityFailure(format!("{x} lies on the boundary of R_{q}"))),
                Some(true) => found.push(q),
                Some(false) => {}
            }
        }
        if found.len() == 1 {
            Ok(found.pop().unwrap())
        } else {
            Err(Error::GenericityFailure(format!("{x} is claimed by {} regions", found.len())))
        }
    }

    /// Rows of `π_M(R_Q)` in the chart of `a_M^G`, `M` the Levi of `Q`.
    pub fn cone_rows(&self, q: &ParabolicSpec) -> HPolytope {
        let l = q.levi();
        let chart = Chart::new(&l);
        let apex = self.apex(q);
        let mut h = HPolytope::new(chart.dim());
        for r in q.unipotent_roots() {
            let c = r.coroot(l.n).scale(rat(-1));
            let row = chart.row(&c, -r.pair(&apex));
            h.push(row.a, row.b);
        }
        h
    }
}

/// Outcome of the sufficient-regularity test with the reasons for any failure.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RegularityReport {
    pub sigma_regular: bool,
    pub intersection_law: bool,
    pub pi0_positive: bool,
    pub xi_in_pi0: bool,
    /// `(2a1 - a2, 2a2 - a1)` for split `GL3`.
    pub gl3_inequalities: Option<(String, String)>,
    pub failures: Vec<String>,
}

impl RegularityReport {
    pub fn ok(&self) -> bool {
        self.sigma_regular && self.intersection_law && self.pi0_positive && self.xi_in_pi0
    }
}

fn free_vertex_set(chart: &Chart, f: &OrthogonalFamily) -> BTreeSet<Vec<Rat>> {
    f.vertices.values().map(|v| chart.to_free(v)).collect()
}

/// Checks that `E_P ∩ E_Q = E_{P ∩ Q}` for all proper `P, Q`, the intersection being empty
/// when `P` and `Q` share no minimal parabolic.
pub fn check_intersection_law(pi: &OrthogonalFamily, sigma: &OrthogonalFamily) -> Result<Vec<String>> {
    let m0 = &pi.m0;
    let chart = Chart::new(m0);
    let props = proper_parabolics(m0);
    let mut es = BTreeMap::new();
    for p in &props {
        es.insert(p.clone(), e_p_family(pi, sigma, p)?);
    }
    let mut bad = Vec::new();
    for (i, p) in props.iter().enumerate() {
        for q in &props[i + 1..] {
            let hp = es[p].to_hpolytope()?.intersect(&es[q].to_hpolytope()?);
            let got: BTreeSet<Vec<Rat>> = hp.vertices()?.into_iter().collect();
            let want = match meet(m0, p, q) {
                Some(r) => free_vertex_set(&chart, &es[&r]),
                None => BTreeSet::new(),
            };
            if got != want {
                bad.push(format!("E_{p} ∩ E_{q}"));
            }
        }
    }
    Ok(bad)
}

pub fn is_sufficiently_regular(
    pi: &OrthogonalFamily,
    sigma: &OrthogonalFamily,
    xi: &CoweightVector,
) -> RegularityReport {
    let mut rep = RegularityReport::default();
    let regions = match RegionPartition::new(sigma) {
        Ok(r) => r,
        Err(e) => {
            rep.failures.push(format!("base family: {e}"));
            return rep;
        }
    };
    rep.sigma_regular = pi.vertices.iter().all(|(p, v)| matches!(regions.membership(p, v), Ok(Some(true))));
    if !rep.sigma_regular {
        rep.failures.push("some vertex λ_P(Π) is outside R_P".into());
    }
    if let Some(a) = dilation_parameters(pi, sigma) {
        if pi.m0.is_torus() && pi.n() == 3 {
            let (s1, s2) = (a[0] * rat(2) - a[1], a[1] * rat(2) - a[0]);
            rep.gl3_inequalities = Some((s1.to_string(), s2.to_string()));
            if !(s1.is_positive() && s2.is_positive()) {
                rep.failures.push(format!("2a1 - a2 = {s1}, 2a2 - a1 = {s2}"));
            }
        }
    }
    if rep.sigma_regular {
        match check_intersection_law(pi, sigma) {
            Ok(bad) if bad.is_empty() => rep.intersection_law = true,
            Ok(bad) => rep.failures.push(format!("intersection law fails for {}", bad.join(", "))),
            Err(e) => rep.failures.push(format!("intersection law: {e}")),
        }
    }
    match pi0(pi, sigma) {
        Ok(p0) => {
            rep.pi0_positive = true;
            rep.xi_in_pi0 = p0.contains(xi);
            if !rep.xi_in_pi0 {
                rep.failures.push("ξ is outside Π0".into());
            }
        }
        Err(e) => rep.failures.push(e.to_string()),
    }
    rep
}

/// `Π = dilate(Σ_γ, a)` checked for sufficient regularity.
pub fn regular_truncation(spec: &RegularElementSpec, a: &[i64]) -> Result<OrthogonalFamily> {
    let sigma = sigma_gamma(spec);
    let pi = dilate(&sigma, a).map_err(|e| Error::NotSufficientlyRegular(e.to_string()))?;
    let rep = is_sufficiently_regular(&pi, &sigma, &default_xi(&sigma.m0));
    if !rep.ok() {
        return Err(Error::NotSufficientlyRegular(rep.failures.join("; ")));
    }
    Ok(pi)
}

/// Smallest `a` with all entries equal making `dilate(Σ_γ, a)` sufficiently regular.
pub fn minimal_regular_parameter(spec: &RegularElementSpec) -> i64 {
    let d = spec.m0().num_blocks() - 1;
    (0..200).find(|&t| regular_truncation(spec, &vec![t; d]).is_ok()).unwrap_or(200)
}

/// Case-specific base point of `Σ_γ` for anisotropic elements is the origin.
pub fn is_degenerate(spec: &RegularElementSpec) -> bool {
    spec.kind() == CaseKind::Aniso
}
