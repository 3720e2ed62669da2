//! Counting `γ`-stable lattices by the position of their moment polytope.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;

use super::field::Field;
use super::gamma::GammaMatrix;
use super::lattice::OLattice;
use super::search::{Bounds, Search};
use crate::element::{CaseKind, RegularElementSpec};
use crate::error::{Error, Result};
use crate::polytopes::{check_xi_generic, sigma_gamma, OrthogonalFamily};
use crate::root_data::{CoweightVector, LeviSpec, Rat};

pub const DEFAULT_BUDGET: u64 = 50_000_000;
/// Largest extra margin tried before a box that keeps growing is reported.
const MAX_MARGIN: i32 = 4;

/// Which lattices of `X_γ^{ν0}` are counted.
#[derive(Clone, Debug)]
pub enum Target {
    /// `Ec_{M0}(L) ⊆ Π`.
    Truncated(OrthogonalFamily),
    /// `ξ ∈ Ec_{M0}(L)`.
    XiStable(CoweightVector),
    /// Every lattice; finite only for elliptic `γ`.
    All,
    /// Mixed case: every `H_B(L)`, `B ⊃ A`, in `{x ∈ [-n_γ, 0], y >= 0, z >= 0}`.
    MixedRefined,
}

impl Target {
    pub fn label(&self) -> &'static str {
        match self {
            Target::Truncated(_) => "truncated",
            Target::XiStable(_) => "xi_stable",
            Target::All => "all",
            Target::MixedRefined => "mixed_refined",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleReport {
    pub case: String,
    pub params: serde_json::Value,
    pub q: u8,
    pub nu0: i64,
    pub target: String,
    pub count: u64,
    pub nodes: u64,
    pub wall_time: f64,
}

impl OracleReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).unwrap()
    }
}

pub struct Oracle {
    pub spec: RegularElementSpec,
    pub field: Field,
    pub gamma: GammaMatrix,
    pub nu0: i64,
    pub budget: u64,
    m0: LeviSpec,
    base: Vec<i64>,
}

fn ceil(r: Rat) -> i32 {
    r.ceil().to_integer() as i32
}

fn floor(r: Rat) -> i32 {
    r.floor().to_integer() as i32
}

impl Oracle {
    pub fn new(spec: &RegularElementSpec, q: u8) -> Result<Self> {
        let field = Field::new(q)?;
        let gamma = GammaMatrix::new(spec, &field)?;
        let nu0 = spec.default_nu0();
        let m0 = spec.m0();
        let base = spec.base_lambda(nu0).values;
        Ok(Oracle { spec: *spec, field, gamma, nu0, budget: DEFAULT_BUDGET, m0, base })
    }

    pub fn with_nu0(mut self, nu0: i64) -> Self {
        self.nu0 = nu0;
        self.base = self.spec.base_lambda(nu0).values;
        self
    }

    /// Replaces the unit constants of `γ`.
    pub fn with_units(mut self, b0: u8, c0: Option<u8>) -> Result<Self> {
        self.gamma = GammaMatrix::with_units(&self.spec, &self.field, b0, c0)?;
        Ok(self)
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    /// `H_P(L)` for `P ∈ P(M0)`, placed in `a_{M0}^G` relative to the base point.
    pub fn position(&self, lat: &OLattice, p: &crate::root_data::ParabolicSpec) -> Result<CoweightVector> {
        let h = lat.retraction(p, &self.field)?;
        let rel: Vec<i64> = h.values.iter().zip(&self.base).map(|(a, b)| a - b).collect();
        Ok(self.m0.lambda_to_coweight(&rel))
    }

    /// `Ec_{M0}(L)` as an orthogonal family, checked for positivity.
    pub fn moment_family(&self, lat: &OLattice) -> Result<OrthogonalFamily> {
        let mut vertices = BTreeMap::new();
        for p in self.m0.parabolics() {
            let x = self.position(lat, &p)?;
            vertices.insert(p, x);
        }
        OrthogonalFamily::new(LeviSpec::whole(self.spec.n()), self.m0.clone(), vertices)
    }

    /// Per-block ranges of block sums (relative to the base) that the target allows.
    fn block_ranges(&self, target: &Target) -> Option<Vec<(Rat, Rat)>> {
        let blocks = &self.m0.blocks;
        let range = |vs: &[&CoweightVector], b: &Vec<usize>| {
            let xs: Vec<Rat> = vs.iter().map(|v| v.sum_over(b)).collect();
            (*xs.iter().min().unwrap(), *xs.iter().max().unwrap())
        };
        match target {
            Target::All | Target::MixedRefined => None,
            Target::Truncated(pi) => {
                let vs: Vec<&CoweightVector> = pi.vertices.values().collect();
                Some(blocks.iter().map(|b| range(&vs, b)).collect())
            }
            Target::XiStable(xi) => {
                // Ec(L) has edges no longer than those of Σ_γ, hence no larger spread per block
                let sigma = sigma_gamma(&self.spec);
                let vs: Vec<&CoweightVector> = sigma.vertices.values().collect();
                Some(
                    blocks
                        .iter()
                        .map(|b| {
                            let (lo, hi) = range(&vs, b);
                            let c = xi.sum_over(b);
                            (c - (hi - lo), c + (hi - lo))
                        })
                        .collect(),
                )
            }
        }
    }

    /// Search box; `margin` only widens the coordinates the target does not control.
    fn bounds(&self, target: &Target, margin: i32) -> Result<Bounds> {
        let n = self.spec.n();
        let ranges = self.block_ranges(target);
        match (self.spec.kind(), ranges) {
            (CaseKind::Split, Some(r)) => {
                let d: Vec<(i32, i32)> =
                    (0..n).map(|i| (self.base[i] as i32 + ceil(r[i].0), self.base[i] as i32 + floor(r[i].1))).collect();
                let entry_min = d.iter().map(|x| x.0).collect();
                Ok(Bounds { d, entry_min })
            }
            (CaseKind::Mixed, Some(r)) => {
                let RegularElementSpec::Gl3Mixed { n: nb, .. } = self.spec else { unreachable!() };
                let nb = nb as i64;
                let d0 = (self.base[0] as i32 + ceil(r[0].0), self.base[0] as i32 + floor(r[0].1));
                let (dmin, dmax) = (self.nu0 - d0.1 as i64, self.nu0 - d0.0 as i64);
                let lo = (dmin - nb - 1).div_euclid(2) as i32 - margin;
                let hi = (dmax + nb + 2).div_euclid(2) as i32 + margin;
                Ok(Bounds { d: vec![d0, (lo, hi), (lo, hi)], entry_min: vec![d0.0, lo - margin, lo - margin] })
            }
            (CaseKind::Mixed, None) if matches!(target, Target::MixedRefined) => {
                let ng = self.mixed_n_gamma()? as i32;
                let top = self.nu0 as i32 + ng;
                Ok(Bounds { d: vec![(-ng, 0), (0, top), (0, top)], entry_min: vec![-ng, 0, 0] })
            }
            (CaseKind::Aniso, _) => {
                let top = crate::root_data::RootDatum::gl(n)
                    .positive_roots()
                    .into_iter()
                    .map(|r| self.spec.root_valuation(r))
                    .max()
                    .unwrap();
                let c = self.nu0.div_euclid(n as i64) as i32;
                let r = top.ceil().to_integer() as i32 + 1 + margin;
                Ok(Bounds { d: vec![(c - r, c + r); n], entry_min: vec![c - r; n] })
            }
            (_, None) => Err(Error::Unbounded),
        }
    }

    fn predicate(&self, target: &Target) -> Result<Box<dyn Fn(&OLattice) -> Result<bool> + Sync + '_>> {
        if self.m0.is_whole() {
            return Ok(Box::new(|_| Ok(true)));
        }
        match target {
            Target::All => Err(Error::Unbounded),
            Target::MixedRefined => {
                let ng = self.mixed_n_gamma()?;
                let borels: Vec<_> = crate::root_data::RootDatum::gl(3)
                    .weyl_group()
                    .into_iter()
                    .map(|w| crate::root_data::ParabolicSpec::borel(&w))
                    .collect();
                Ok(Box::new(move |lat| {
                    for b in &borels {
                        let h = lat.retraction(b, &self.field)?.values;
                        if h[0] < -ng || h[0] > 0 || h[1] < 0 || h[2] < 0 {
                            return Ok(false);
                        }
                    }
                    Ok(true)
                }))
            }
            Target::Truncated(pi) => {
                let rows = pi.h_rep();
                let ps = self.m0.parabolics();
                Ok(Box::new(move |lat| {
                    for p in &ps {
                        let x = self.position(lat, p)?;
                        if !rows.iter().all(|(s, h)| x.sum_over(s) <= *h) {
                            return Ok(false);
                        }
                    }
                    Ok(true)
                }))
            }
            Target::XiStable(xi) => {
                check_xi_generic(xi, &self.m0)?;
                let xi = xi.clone();
                Ok(Box::new(move |lat| Ok(self.moment_family(lat)?.contains(&xi))))
            }
        }
    }

    fn search(&self, bounds: Bounds) -> Search<'_> {
        Search::new(&self.field, self.spec.n(), Some(&self.gamma), bounds, self.nu0, self.budget)
    }

    fn mixed_n_gamma(&self) -> Result<i64> {
        match self.spec {
            RegularElementSpec::Gl3Mixed { m, n } if self.nu0 == n as i64 + 1 => {
                Ok((2 * m as i64).min(2 * n as i64 + 1))
            }
            _ => Err(Error::UnsupportedGroup(format!("refined domain of {} at ν0 = {}", self.spec, self.nu0))),
        }
    }

    /// Whether the box derived from the target provably contains every counted lattice.
    fn box_is_exact(&self, target: &Target) -> bool {
        matches!(target, Target::MixedRefined)
            || (self.spec.kind() == CaseKind::Split && !matches!(target, Target::All))
    }

    /// Count with the number of search nodes visited.
    pub fn count_with_nodes(&self, target: &Target) -> Result<(u64, u64)> {
        let pred = self.predicate(target)?;
        if self.box_is_exact(target) {
            let s = self.search(self.bounds(target, 0)?);
            let c = s.count(&*pred)?;
            return Ok((c, s.nodes()));
        }
        // grow the uncontrolled coordinates until the count is stable
        let mut nodes = 0;
        let mut prev: Option<u64> = None;
        for margin in 0..=MAX_MARGIN {
            let s = self.search(self.bounds(target, margin)?);
            let c = s.count(&*pred)?;
            nodes += s.nodes();
            if prev == Some(c) {
                return Ok((c, nodes));
            }
            prev = Some(c);
        }
        Err(Error::PrecisionExhausted(format!("search box did not saturate by margin {MAX_MARGIN}")))
    }

    pub fn count(&self, target: &Target) -> Result<u64> {
        Ok(self.count_with_nodes(target)?.0)
    }

    /// All counted lattices (exact box, or the smallest saturated one).
    pub fn lattices(&self, target: &Target) -> Result<Vec<OLattice>> {
        let pred = self.predicate(target)?;
        let want = self.count(target)?;
        for margin in 0..=MAX_MARGIN {
            let s = self.search(self.bounds(target, margin)?);
            let mut out = Vec::new();
            s.for_each(&mut |l| {
                if pred(l)? {
                    out.push(*l);
                }
                Ok(())
            })?;
            if out.len() as u64 == want {
                return Ok(out);
            }
        }
        Err(Error::PrecisionExhausted("lattice list did not saturate".into()))
    }

    fn report(&self, target: &Target) -> Result<OracleReport> {
        let t = Instant::now();
        let (count, nodes) = self.count_with_nodes(target)?;
        let params = self.spec.params_json();
        Ok(OracleReport {
            case: params["case"].as_str().unwrap_or_default().to_string(),
            params,
            q: self.field.q,
            nu0: self.nu0,
            target: target.label().to_string(),
            count,
            nodes,
            wall_time: t.elapsed().as_secs_f64(),
        })
    }

    /// The mixed fundamental domain cut out by the refined family instead of `Σ_γ`.
    pub fn count_mixed_refined(&self) -> Result<OracleReport> {
        self.mixed_n_gamma()?;
        self.report(&Target::MixedRefined)
    }

    /// `#{L ∈ X_γ^{ν0} : Ec_{M0}(L) ⊆ Π}`.
    pub fn count_truncated(&self, pi: &OrthogonalFamily) -> Result<OracleReport> {
        if pi.m0 != self.m0 || !pi.is_global() {
            return Err(Error::InvalidParams(format!("Π must be a (G, {})-family", self.m0)));
        }
        self.report(&Target::Truncated(pi.clone()))
    }

    /// `#{L ∈ X_γ^{ν0} : ξ ∈ Ec_{M0}(L)}`.
    pub fn count_xi_stable(&self, xi: &CoweightVector) -> Result<OracleReport> {
        self.report(&Target::XiStable(xi.clone()))
    }

    /// The fundamental domain `Ec_{M0}(L) ⊆ Σ_γ`; every lattice for elliptic `γ`.
    pub fn count_fundamental_domain(&self) -> Result<OracleReport> {
        if self.m0.is_whole() {
            self.report(&Target::All)
        } else {
            self.report(&Target::Truncated(sigma_gamma(&self.spec)))
        }
    }
}

/// Every lattice `ε^N O^n ⊆ L ⊆ ε^{-N} O^n` with `val det L = ν0`.
pub fn enumerate_lattices(n: usize, q: u8, big_n: i32, nu0: i64) -> Result<Vec<OLattice>> {
    let f = Field::new(q)?;
    let bounds = Bounds { d: vec![(-big_n, big_n); n], entry_min: vec![-big_n; n] };
    let mut s = Search::new(&f, n, None, bounds, nu0, DEFAULT_BUDGET);
    s.contains_power = Some(big_n);
    let mut out = Vec::new();
    s.for_each(&mut |l| {
        out.push(*l);
        Ok(())
    })?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_forms::{eval_formula, gl3_aniso_j, FormulaId, Params};
    use crate::counting_engine::{ak_count, solve_weighted_integral, CountRequest, FundamentalDomainTable};
    use crate::polytopes::{default_xi, n_gamma};

    fn oracle(spec: RegularElementSpec, q: u8) -> Oracle {
        Oracle::new(&spec, q).unwrap()
    }

    fn xi_count(spec: RegularElementSpec, q: u8) -> u64 {
        let o = oracle(spec, q);
        o.count(&Target::XiStable(default_xi(&spec.m0()))).unwrap()
    }

    fn fd_count(spec: RegularElementSpec, q: u8) -> u64 {
        oracle(spec, q).count_fundamental_domain().unwrap().count
    }

    #[test]
    fn lattices_between_two_scalings() {
        // O-submodules of length 2 in (O/ε²)²: the socle plus the cyclic ones
        for q in [2u8, 3, 4, 5] {
            let want = (q as usize).pow(2) + q as usize + 1;
            assert_eq!(enumerate_lattices(2, q, 1, 0).unwrap().len(), want);
        }
        let all = enumerate_lattices(2, 2, 1, 0).unwrap();
        let set: std::collections::BTreeSet<String> = all.iter().map(|l| format!("{l:?}")).collect();
        assert_eq!(set.len(), all.len());
    }

    #[test]
    fn gl2_split_counts() {
        for q in [2u8, 3] {
            let s = RegularElementSpec::Gl2Split { n: 1 };
            assert_eq!(fd_count(s, q), 1 + q as u64);
            assert_eq!(xi_count(s, q), q as u64 - 1);
        }
        assert_eq!(fd_count(RegularElementSpec::Gl2Split { n: 2 }, 2), 7);
        for n in 0..=3u32 {
            let s = RegularElementSpec::Gl2Split { n };
            let j = solve_weighted_integral(&s).unwrap();
            for q in [2u8, 3] {
                assert_eq!(xi_count(s, q) as i128, j.evaluate(q as i64).unwrap(), "n={n} q={q}");
            }
        }
    }

    #[test]
    fn gl2_split_truncated_matches_counting_engine() {
        let s = RegularElementSpec::Gl2Split { n: 1 };
        let table = FundamentalDomainTable::from_closed_forms(&s).unwrap();
        for a in [1i64, 2, 3] {
            let req = CountRequest::new(s, &[a]).unwrap();
            let pi = req.regular_pi().unwrap();
            let got = oracle(s, 2).count_truncated(&pi).unwrap().count as i128;
            assert_eq!(got, ak_count(&req, &table).unwrap().evaluate(2).unwrap(), "a={a}");
            let closed = eval_formula(FormulaId::Gl2SplitQ, &Params::gl2(1).with_a(&[a])).unwrap();
            assert_eq!(got, closed.evaluate(2).unwrap());
        }
    }

    #[test]
    fn anisotropic_counts() {
        for n in 0..=2u32 {
            let want: u64 = (0..=n).map(|i| 2u64.pow(i)).sum();
            assert_eq!(fd_count(RegularElementSpec::Gl2Aniso { n }, 2), want);
        }
        assert_eq!(fd_count(RegularElementSpec::Gl3Aniso { n1: 0, n2: 0 }, 2), 1);
    }

    #[test]
    fn mixed_counts() {
        let s = RegularElementSpec::Gl3Mixed { m: 1, n: 1 };
        assert_eq!(fd_count(s, 2), 23);
        assert_eq!(xi_count(s, 2), 13);
    }

    #[test]
    fn gl3_split_counts() {
        let s = RegularElementSpec::Gl3Split { n1: 1, n2: 2 };
        let j = solve_weighted_integral(&s).unwrap();
        assert_eq!(xi_count(s, 2) as i128, j.evaluate(2).unwrap());
        let p = crate::closed_forms::gl3_split_poincare(1, 2);
        assert_eq!(fd_count(s, 2) as i128, p.evaluate_at_sqrt(2).unwrap());
        let s = RegularElementSpec::Gl3Split { n1: 1, n2: 1 };
        assert_eq!(xi_count(s, 3), 40);
        assert_eq!(fd_count(s, 3), 67);
    }

    #[test]
    fn gl3_split_truncated_matches_counting_engine() {
        let s = RegularElementSpec::Gl3Split { n1: 1, n2: 2 };
        let table = FundamentalDomainTable::from_closed_forms(&s).unwrap();
        let t = crate::polytopes::minimal_regular_parameter(&s);
        let req = CountRequest::new(s, &[t, t]).unwrap();
        let pi = req.regular_pi().unwrap();
        let got = oracle(s, 2).count_truncated(&pi).unwrap().count as i128;
        assert_eq!(got, ak_count(&req, &table).unwrap().evaluate(2).unwrap());
    }

    #[test]
    fn gl3_aniso_and_mixed_counts() {
        let s = RegularElementSpec::Gl3Aniso { n1: 1, n2: 1 };
        assert_eq!(fd_count(s, 2), 19);
        assert_eq!(gl3_aniso_j(1, 1).unwrap().evaluate(2).unwrap(), 19);
        for (m, n, f, j) in [(1u32, 2u32, 55u64, 29u64), (2, 1, 51, 45)] {
            let s = RegularElementSpec::Gl3Mixed { m, n };
            assert_eq!(fd_count(s, 2), f);
            assert_eq!(xi_count(s, 2), j);
        }
    }

    #[test]
    fn moment_polytopes_are_bounded_by_sigma() {
        for s in [RegularElementSpec::Gl3Split { n1: 1, n2: 2 }, RegularElementSpec::Gl3Mixed { m: 1, n: 1 }] {
            let o = oracle(s, 2);
            let lats = o.lattices(&Target::XiStable(default_xi(&s.m0()))).unwrap();
            assert!(!lats.is_empty());
            for l in &lats {
                let fam = o.moment_family(l).unwrap();
                for (p1, p2, _) in fam.adjacent_pairs() {
                    let c = fam.edge_coefficient(&p1, &p2).unwrap();
                    assert!(c >= Rat::from_integer(0));
                    assert!(c <= Rat::from_integer(n_gamma(&s, &p1, &p2).unwrap()), "{l:?}");
                }
            }
        }
    }

    #[test]
    fn refined_mixed_domain_agrees() {
        for (m, n) in [(1u32, 1u32), (1, 2), (2, 1)] {
            let o = oracle(RegularElementSpec::Gl3Mixed { m, n }, 2);
            assert_eq!(o.count_mixed_refined().unwrap().count, o.count_fundamental_domain().unwrap().count);
        }
    }

    #[test]
    fn counts_do_not_depend_on_units() {
        let s = RegularElementSpec::Gl3Mixed { m: 1, n: 1 };
        let base = fd_count(s, 3);
        let o = oracle(s, 3).with_units(2, None).unwrap();
        assert_eq!(o.count_fundamental_domain().unwrap().count, base);
        let s = RegularElementSpec::Gl2Aniso { n: 1 };
        let o = oracle(s, 3).with_units(2, None).unwrap();
        assert_eq!(o.count_fundamental_domain().unwrap().count, fd_count(s, 3));
        let s = RegularElementSpec::Gl3Split { n1: 1, n2: 2 };
        let xi = Target::XiStable(default_xi(&s.m0()));
        let a = oracle(s, 3).count(&xi).unwrap();
        let b = oracle(s, 3).with_units(2, Some(2)).unwrap().count(&xi).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn budget_is_enforced() {
        let o = oracle(RegularElementSpec::Gl3Aniso { n1: 1, n2: 1 }, 2).with_budget(100);
        assert!(matches!(o.count_fundamental_domain(), Err(Error::BudgetExceeded { .. })));
    }
}
