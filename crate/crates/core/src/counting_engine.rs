//! Arthur–Kottwitz and Harder–Narasimhan counts of truncated affine Springer fibers,
//! and the weighted orbital integral extracted from their comparison.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::Serialize;

use crate::closed_forms::{self, gl3_split_poincare, HessenbergCase};
use crate::element::{CaseKind, Group, RegularElementSpec};
use crate::error::{Error, Result};
use crate::lattice_count::LatticeRegion;
use crate::polytopes::{
    apply_a_operator, default_xi, dilate, e_p_family, minimal_regular_parameter, pi0, project_family,
    proper_parabolics, regular_truncation, sigma_gamma, OrthogonalFamily, RegionPartition,
};
use crate::qpoly::{interpolate_quasi_poly, ParamConstraint, QPoly, TruncationQuasiPoly};
use crate::root_data::{CoweightVector, LeviSpec, ParabolicSpec, Rat, Root};

/// A truncated count: element, component `ν0`, dilation parameters and `ξ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountRequest {
    pub spec: RegularElementSpec,
    pub nu0: i64,
    pub a: Vec<i64>,
    pub xi: CoweightVector,
}

impl CountRequest {
    pub fn new(spec: RegularElementSpec, a: &[i64]) -> Result<Self> {
        spec.validate()?;
        let m0 = spec.m0();
        if a.len() + 1 != m0.num_blocks() {
            return Err(Error::InvalidParams(format!("{spec} needs {} truncation parameters", m0.num_blocks() - 1)));
        }
        Ok(CountRequest { spec, nu0: spec.default_nu0(), a: a.to_vec(), xi: default_xi(&m0) })
    }

    pub fn with_nu0(mut self, nu0: i64) -> Self {
        self.nu0 = nu0;
        self
    }

    pub fn sigma(&self) -> OrthogonalFamily {
        sigma_gamma(&self.spec)
    }

    /// `Π = dilate(Σ_γ, a)`, required to be `Σ_γ`-regular.
    pub fn regular_pi(&self) -> Result<OrthogonalFamily> {
        let sigma = self.sigma();
        let pi = dilate(&sigma, &self.a).map_err(|e| Error::NotRegular(e.to_string()))?;
        let regions = RegionPartition::new(&sigma)?;
        for (p, v) in &pi.vertices {
            if regions.membership(p, v)? != Some(true) {
                return Err(Error::NotRegular(format!("λ_{p}(Π) is not inside R_{p}")));
            }
        }
        Ok(pi)
    }

    /// `Π`, required to be sufficiently regular for `ξ`.
    pub fn sufficiently_regular_pi(&self) -> Result<OrthogonalFamily> {
        if self.xi != default_xi(&self.spec.m0()) {
            let sigma = self.sigma();
            let pi = dilate(&sigma, &self.a).map_err(|e| Error::NotSufficientlyRegular(e.to_string()))?;
            let rep = crate::polytopes::is_sufficiently_regular(&pi, &sigma, &self.xi);
            if !rep.ok() {
                return Err(Error::NotSufficientlyRegular(rep.failures.join("; ")));
            }
            return Ok(pi);
        }
        regular_truncation(&self.spec, &self.a)
    }

    fn check_component(&self) -> Result<()> {
        if self.nu0 != self.spec.default_nu0() {
            return Err(Error::UnsupportedGroup(format!(
                "counts are implemented on the component ν0 = {} of {}",
                self.spec.default_nu0(),
                self.spec
            )));
        }
        Ok(())
    }

    fn base_values(&self, m: &LeviSpec) -> Vec<i64> {
        self.spec.base_lambda(self.nu0).push_forward(m).values
    }
}

/// `q_γ^{M,μ} = |F_γ^{M,μ}(F_q)|` for the Levis `M ⊇ M0` and classes `μ ∈ Λ_{M^ad}`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FundamentalDomainTable {
    pub entries: BTreeMap<(LeviSpec, Vec<i64>), QPoly>,
    pub source: String,
}

fn classes(m: &LeviSpec) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for b in &m.blocks {
        let mut next = Vec::new();
        for c in &out {
            for r in 0..b.len() as i64 {
                let mut d = c.clone();
                d.push(r);
                next.push(d);
            }
        }
        out = next;
    }
    out
}

/// `|F_γ^ν|` for split `GL2` with `val α(γ) = n`, by the parity of `val det`.
fn gl2_split_fundamental_domain(n: i64, parity: i64) -> QPoly {
    let hi = if parity == 0 { n } else { n - 1 };
    (0..=hi).map(|i| QPoly::var_pow(i as i32)).sum()
}

impl FundamentalDomainTable {
    /// Entries computed from the closed forms (GL2 and the anisotropic blocks are counted cell by cell).
    pub fn from_closed_forms(spec: &RegularElementSpec) -> Result<Self> {
        spec.validate()?;
        let m0 = spec.m0();
        let n = spec.n();
        let nu0 = spec.default_nu0();
        let mut t = FundamentalDomainTable { entries: BTreeMap::new(), source: "closed_forms".into() };
        for m in m0.overgroups() {
            for c in classes(&m) {
                let val = if m.is_whole() {
                    if c != m.class_of(&[nu0]) && spec.group() == Group::Gl3 {
                        continue;
                    }
                    match *spec {
                        RegularElementSpec::Gl2Split { n } => gl2_split_fundamental_domain(n as i64, c[0]),
                        RegularElementSpec::Gl2Aniso { n } => {
                            closed_forms::hessenberg_sum(HessenbergCase::Gl2 { n: n as i64 }, c[0])
                        }
                        RegularElementSpec::Gl3Split { n1, n2 } => {
                            QPoly::from_tpoly_even(&gl3_split_poincare(n1 as i64, n2 as i64))?
                        }
                        RegularElementSpec::Gl3Mixed { m, n } => closed_forms::eval_formula(
                            closed_forms::FormulaId::Gl3MixedF,
                            &closed_forms::Params::mixed(m as i64, n as i64),
                        )?,
                        RegularElementSpec::Gl3Aniso { n1, n2 } => closed_forms::gl3_aniso_j(n1 as i64, n2 as i64)?,
                    }
                } else if m == m0 && spec.kind() == CaseKind::Split {
                    QPoly::one()
                } else {
                    match spec.levi_restriction(&m)? {
                        RegularElementSpec::Gl2Split { n } => {
                            let big = m.blocks.iter().position(|b| b.len() == 2).unwrap();
                            gl2_split_fundamental_domain(n as i64, c[big])
                        }
                        RegularElementSpec::Gl2Aniso { n } => {
                            let big = m.blocks.iter().position(|b| b.len() == 2).unwrap();
                            closed_forms::hessenberg_sum(HessenbergCase::Gl2 { n: n as i64 }, c[big])
                        }
                        other => return Err(Error::UnsupportedGroup(format!("Levi restriction {other}"))),
                    }
                };
                t.entries.insert((m.clone(), c), val);
            }
        }
        debug_assert!(n == m0.n);
        Ok(t)
    }

    pub fn insert(&mut self, m: LeviSpec, class: Vec<i64>, v: QPoly) {
        self.entries.insert((m, class), v);
    }

    pub fn get(&self, m: &LeviSpec, class: &[i64]) -> Result<&QPoly> {
        self.entries
            .get(&(m.clone(), class.to_vec()))
            .ok_or_else(|| Error::UnsupportedGroup(format!("no fundamental-domain entry for {m}, class {class:?}")))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<serde_json::Value> = self
            .entries
            .iter()
            .map(|((m, c), v)| serde_json::json!({"levi": m.to_string(), "class": c, "count": v.to_string()}))
            .collect();
        serde_json::json!({"source": self.source, "entries": rows})
    }
}

/// Record of how a value was obtained.
#[derive(Clone, Debug, Default, Serialize, PartialEq, Eq)]
pub struct Provenance {
    pub pipeline: String,
    pub spec: serde_json::Value,
    pub a: Vec<Vec<i64>>,
    pub table: serde_json::Value,
    pub notes: Vec<String>,
}

impl Provenance {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("provenance serialises")
    }
}

/// Visits `ν ∈ Λ_M^{ν0}` in a region given by rows on `a_M^G`, passing the class of `ν - origin`.
fn for_each_lambda(
    req: &CountRequest,
    m: &LeviSpec,
    origin: &[i64],
    rows: &[(&crate::geometry::HPolytope, bool)],
    mut f: impl FnMut(&[i64]),
) -> Result<()> {
    let base = req.base_values(m);
    let mut r = LatticeRegion::new(m, req.nu0, base.clone())?;
    for (h, generic) in rows {
        r.extend(h, *generic);
    }
    r.for_each_point(|w| {
        let nu: Vec<i64> = w.iter().zip(&base).zip(origin).map(|((x, b), o)| x + b - o).collect();
        f(&m.class_of(&nu));
    })
}

/// Block values of `λ_P(Σ)` for a minimal `P ⊆ Q`: the anchor of the face `Σ^Q`.
fn face_anchor(sigma: &OrthogonalFamily, q: &ParabolicSpec) -> Result<Vec<i64>> {
    let m = q.levi();
    let (_, v) = sigma.vertices.iter().find(|(p, _)| p.is_contained_in(q)).expect("Q ∈ F(M0)");
    m.block_sums(v)
        .into_iter()
        .map(|x| {
            if x.is_integer() {
                Ok(x.to_integer())
            } else {
                Err(Error::InvalidParams(format!("vertex {v} of Σ is not a lattice point of {m}")))
            }
        })
        .collect()
}

/// `|X_γ^{ν0}(Π)(F_q)|` through the Arthur–Kottwitz strata.
pub fn ak_count(req: &CountRequest, table: &FundamentalDomainTable) -> Result<QPoly> {
    req.check_component()?;
    let sigma = req.sigma();
    let pi = req.regular_pi()?;
    let regions = RegionPartition::new(&sigma)?;
    let g = LeviSpec::whole(req.spec.n());
    let mut total = table.get(&g, &g.class_of(&[req.nu0]))?.clone();
    for q in proper_parabolics(&sigma.m0) {
        let m = q.levi();
        let cone = regions.cone_rows(&q);
        let pm = project_family(&pi, &m)?.to_hpolytope()?;
        let anchor = face_anchor(&sigma, &q)?;
        let mut by_class: BTreeMap<Vec<i64>, i64> = BTreeMap::new();
        for_each_lambda(req, &m, &anchor, &[(&cone, true), (&pm, false)], |c| {
            *by_class.entry(c.to_vec()).or_insert(0) += 1
        })?;
        let weight = QPoly::var_pow(req.spec.val_det_unipotent(&q)? as i32);
        for (c, k) in by_class {
            total += &(&weight * table.get(&m, &c)?).scale(k);
        }
    }
    Ok(total)
}

/// `|Λ_M^{ν0} ∩ π_M(Π0)|`.
pub fn pi0_lattice_count(req: &CountRequest, m: &LeviSpec) -> Result<i64> {
    let sigma = req.sigma();
    let pi = req.sufficiently_regular_pi()?;
    let p0 = pi0(&pi, &sigma)?;
    let h = project_family(&p0, m)?.to_hpolytope()?;
    let mut c = 0;
    for_each_lambda(req, m, &vec![0; m.num_blocks()], &[(&h, false)], |_| c += 1)?;
    Ok(c)
}

/// `J^{M,ξ^M}` for the Levis `M0 ⊆ M ≠ G`, solved recursively.
pub fn levi_j_table(spec: &RegularElementSpec) -> Result<BTreeMap<LeviSpec, QPoly>> {
    let m0 = spec.m0();
    let table = FundamentalDomainTable::from_closed_forms(spec)?;
    let mut out = BTreeMap::new();
    for m in m0.overgroups() {
        if m.is_whole() {
            continue;
        }
        let j = if m == m0 {
            let base = spec.base_lambda(spec.default_nu0());
            table.get(&m, &base.class())?.clone()
        } else {
            solve_weighted_integral(&spec.levi_restriction(&m)?)?
        };
        out.insert(m, j);
    }
    Ok(out)
}

/// The main body count with its `J^ξ` term left out.
pub fn hn_main_body_without_j(req: &CountRequest, j_table: &BTreeMap<LeviSpec, QPoly>) -> Result<QPoly> {
    req.check_component()?;
    let mut total = QPoly::zero();
    for m in req.spec.m0().overgroups() {
        if m.is_whole() {
            continue;
        }
        let jm = j_table.get(&m).ok_or_else(|| Error::UnsupportedGroup(format!("no J^M entry for {m}")))?;
        let k = pi0_lattice_count(req, &m)?;
        total += &(&QPoly::var_pow(req.spec.half_val_det(&m)? as i32) * jm).scale(k);
    }
    Ok(total)
}

/// Main body count `J^ξ + Σ_{M ≠ G} q^{½ val det(g/m)} J^M |Λ_M ∩ π_M(Π0)|` for a known `J^ξ`.
pub fn hn_main_body_count(req: &CountRequest, j_table: &BTreeMap<LeviSpec, QPoly>, j_xi: &QPoly) -> Result<QPoly> {
    Ok(hn_main_body_without_j(req, j_table)? + j_xi.clone())
}

/// Per-step increment of the tail recursion when the `α`-edges inside `L` grow by one.
fn gl3_step_increment(spec: &RegularElementSpec, l: &LeviSpec) -> Result<QPoly> {
    let RegularElementSpec::Gl3Split { n1, n2 } = *spec else {
        return Err(Error::UnsupportedGroup(format!("tail steps for {spec}")));
    };
    let (n1, n2) = (n1 as i32, n2 as i32);
    let q = QPoly::var_pow;
    let big = l.blocks.iter().find(|b| b.len() == 2).ok_or_else(|| Error::UnsupportedGroup(format!("Levi {l}")))?;
    if *big == vec![1, 2] {
        Ok((q(n1 + n2) * QPoly::geometric(0, n1 - 1)).scale(2) + q(2 * n1 + n2))
    } else {
        Ok(q(2 * n1) * QPoly::geometric(0, n2 - 1) + q(n1 + n2) * QPoly::geometric(0, n1 - 1) + q(2 * n1 + n2))
    }
}

/// `|X_γ^{ν0}(A^k Σ)|`: the fundamental domain plus `k` steps of the `L`-recursion.
pub fn ak_recursion_chain(
    spec: &RegularElementSpec,
    nu0: i64,
    l: &LeviSpec,
    k: u32,
    table: &FundamentalDomainTable,
) -> Result<QPoly> {
    let g = LeviSpec::whole(spec.n());
    let f = table.get(&g, &g.class_of(&[nu0]))?.clone();
    if k == 0 {
        return Ok(f);
    }
    if *l == spec.m0() {
        return Err(Error::InvalidParams("no α-steps inside M0".into()));
    }
    Ok(f + gl3_step_increment(spec, l)?.scale(k as i64))
}

/// Simple root of `P0 ∩ L` outside `M0` for `L` with one non-trivial `M0`-group.
fn simple_root_of(m0: &LeviSpec, l: &LeviSpec) -> Result<Root> {
    let p0 = m0.standard_parabolic();
    for lb in &l.blocks {
        let inner: Vec<&Vec<usize>> = p0.order.iter().filter(|b| lb.contains(&b[0])).collect();
        if inner.len() == 2 {
            return Ok(Root::new(inner[0][0], inner[1][0]));
        }
    }
    Err(Error::UnsupportedGroup(format!("Levi {l} over {m0}")))
}

/// The power `k` with `E_P(Π) = A^k(Σ) + t`.
pub fn a_power_of_e_p(pi: &OrthogonalFamily, sigma: &OrthogonalFamily, p: &ParabolicSpec) -> Result<(LeviSpec, u32)> {
    let e = e_p_family(pi, sigma, p)?;
    let l = p.levi();
    if l == sigma.m0 {
        let p0 = sigma.m0.standard_parabolic();
        let t = e.vertex(&p0) - sigma.vertex(&p0);
        if sigma.translate(&t) == e {
            return Ok((l, 0));
        }
        return Err(Error::InconsistentPipelines(format!("E_{p}(Π) is not a translate of Σ")));
    }
    let alpha = simple_root_of(&sigma.m0, &l)?;
    let bound: Rat = pi.adjacent_pairs().iter().map(|(a, b, _)| pi.edge_coefficient(a, b).unwrap()).max().unwrap();
    let p0 = sigma.m0.standard_parabolic();
    for k in 0..=bound.to_integer().max(0) as u32 {
        let a = apply_a_operator(sigma, &l, alpha, k)?;
        let t = e.vertex(&p0) - a.vertex(&p0);
        if a.translate(&t) == e {
            return Ok((l, k));
        }
    }
    Err(Error::InconsistentPipelines(format!("E_{p}(Π) is not an A-power of Σ")))
}

/// `Σ_{P ≠ G} (-1)^{rk G - rk P - 1} |X_γ^{ν0}(E_P(Π))|`.
pub fn tail_count(req: &CountRequest, table: &FundamentalDomainTable) -> Result<QPoly> {
    req.check_component()?;
    let sigma = req.sigma();
    let pi = req.sufficiently_regular_pi()?;
    let mut total = QPoly::zero();
    for p in proper_parabolics(&sigma.m0) {
        let (l, k) = a_power_of_e_p(&pi, &sigma, &p)?;
        let chain = ak_recursion_chain(&req.spec, req.nu0, &l, k, table)?;
        let rank_gap = (p.order.len() as i64) - 2;
        total += &if rank_gap % 2 == 0 { chain } else { -chain };
    }
    Ok(total)
}

/// Truncation parameters on which extraction is run.
fn sample_parameters(spec: &RegularElementSpec) -> Vec<Vec<i64>> {
    let d = spec.m0().num_blocks() - 1;
    let t = minimal_regular_parameter(spec);
    match d {
        0 => vec![vec![]],
        1 => vec![vec![t], vec![t + 1], vec![t + 2]],
        _ => vec![vec![t, t], vec![t + 1, t], vec![t, t + 1], vec![t + 1, t + 1], vec![t + 2, t + 1]],
    }
}

/// `AK - main' - tail` at one `a`.
fn extraction_at(
    spec: &RegularElementSpec,
    a: &[i64],
    table: &FundamentalDomainTable,
    j_table: &BTreeMap<LeviSpec, QPoly>,
) -> Result<QPoly> {
    let req = CountRequest::new(*spec, a)?;
    let ak = ak_count(&req, table)?;
    let main = hn_main_body_without_j(&req, j_table)?;
    let tail = tail_count(&req, table)?;
    Ok(ak - main - tail)
}

/// `J^ξ` from the two pipelines, with provenance. Fails when the result depends on `a`.
pub fn solve_weighted_integral_with(
    spec: &RegularElementSpec,
    table: &FundamentalDomainTable,
) -> Result<(QPoly, Provenance)> {
    spec.validate()?;
    let j_table = levi_j_table(spec)?;
    let samples = sample_parameters(spec);
    let mut value: Option<QPoly> = None;
    for a in &samples {
        let j = extraction_at(spec, a, table, &j_table)?;
        match &value {
            None => value = Some(j),
            Some(v) if *v != j => {
                return Err(Error::InconsistentPipelines(format!(
                    "J^ξ changes between a = {:?} and a = {a:?}",
                    samples[0]
                )))
            }
            Some(_) => {}
        }
    }
    let j = value.expect("at least one sample");
    let prov = Provenance {
        pipeline: "ak - main_body - tail".into(),
        spec: spec.params_json(),
        a: samples,
        table: table.to_json(),
        notes: j_table.iter().map(|(m, v)| format!("J^{m} = {v}")).collect(),
    };
    Ok((j, prov))
}

/// `J^ξ_{M0}(γ)`, with the fundamental domains taken from the closed forms.
pub fn solve_weighted_integral(spec: &RegularElementSpec) -> Result<QPoly> {
    let table = FundamentalDomainTable::from_closed_forms(spec)?;
    Ok(solve_weighted_integral_with(spec, &table)?.0)
}

fn validity(spec: &RegularElementSpec, t: i64) -> Vec<ParamConstraint> {
    let d = spec.m0().num_blocks() - 1;
    (0..d)
        .map(|i| {
            let mut coef = vec![0; d];
            coef[i] = 1;
            ParamConstraint { coef, bound: t }
        })
        .collect()
}

/// `a ↦ ak_count`, interpolated per parity class on a window of regular parameters.
pub fn ak_quasi_poly(spec: &RegularElementSpec, table: &FundamentalDomainTable) -> Result<TruncationQuasiPoly> {
    let d = spec.m0().num_blocks() - 1;
    let t = minimal_regular_parameter(spec) + 2 * d as i64 + 2;
    let base = vec![t; d];
    interpolate_quasi_poly(d, 2, d as u32, &base, validity(spec, t), 2, |a| {
        ak_count(&CountRequest::new(*spec, a)?, table)
    })
}

/// `a ↦ AK - main' - tail` as a quasi-polynomial; every `a`-monomial must cancel.
pub fn extraction_quasi_poly(spec: &RegularElementSpec, table: &FundamentalDomainTable) -> Result<TruncationQuasiPoly> {
    let d = spec.m0().num_blocks() - 1;
    let t = minimal_regular_parameter(spec) + 2 * d as i64 + 2;
    let j_table = levi_j_table(spec)?;
    let base = vec![t; d];
    interpolate_quasi_poly(d, 2, d as u32, &base, validity(spec, t), 2, |a| extraction_at(spec, a, table, &j_table))
}

/// Checks that an extraction quasi-polynomial is one constant `QPoly`.
pub fn constant_branch(f: &TruncationQuasiPoly) -> Result<QPoly> {
    let mut out: Option<QPoly> = None;
    for (r, b) in &f.branches {
        if b.a_degree() != 0 {
            return Err(Error::InconsistentPipelines(format!("branch {r:?} depends on a: {b}")));
        }
        let c = b.a_constant_term()?;
        match &out {
            Some(v) if *v != c => return Err(Error::InconsistentPipelines("branches differ".into())),
            _ => out = Some(c),
        }
    }
    out.ok_or_else(|| Error::InconsistentPipelines("no branches".into()))
}

/// `I^G_γ = q^{½ val det(g/m0)} I^{M0}_γ`.
pub fn orbital_integral(spec: &RegularElementSpec) -> Result<QPoly> {
    spec.validate()?;
    let m0 = spec.m0();
    let core = match *spec {
        RegularElementSpec::Gl2Split { .. } | RegularElementSpec::Gl3Split { .. } => QPoly::one(),
        RegularElementSpec::Gl2Aniso { n } => closed_forms::hessenberg_sum(HessenbergCase::Gl2 { n: n as i64 }, 0),
        RegularElementSpec::Gl3Mixed { n, .. } => {
            closed_forms::hessenberg_sum(HessenbergCase::Gl2 { n: n as i64 }, spec.default_nu0())
        }
        RegularElementSpec::Gl3Aniso { n1, n2 } => {
            closed_forms::hessenberg_sum(HessenbergCase::for_gl3(n1 as i64, n2 as i64), 0)
        }
    };
    Ok(&QPoly::var_pow(spec.half_val_det(&m0)? as i32) * &core)
}

/// Arthur's weighted orbital integral `J_{M0}(γ) = vol · J^ξ`, the volume kept apart.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ArthurJ {
    /// `J^ξ_{M0}(γ)`.
    pub poly: QPoly,
    /// Square of the covolume of `X_*(A_{M0})` in `a_{M0}` (Euclidean inner product).
    pub volume_sq: String,
}

impl ArthurJ {
    pub fn render(&self) -> String {
        if self.volume_sq == "1" {
            self.poly.to_string()
        } else {
            format!("sqrt({}) * ({})", self.volume_sq, self.poly)
        }
    }
}

pub fn arthur_j(spec: &RegularElementSpec) -> Result<ArthurJ> {
    let poly = solve_weighted_integral(spec)?;
    let v = spec.m0().center_covolume_sq();
    debug_assert!(!v.is_zero());
    Ok(ArthurJ { poly, volume_sq: v.to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_forms::{eval_formula, FormulaId, Params};

    fn qp(s: &str) -> QPoly {
        s.parse().unwrap()
    }

    #[test]
    fn gl2_ak_example() {
        let spec = RegularElementSpec::Gl2Split { n: 1 };
        let table = FundamentalDomainTable::from_closed_forms(&spec).unwrap();
        let req = CountRequest::new(spec, &[2]).unwrap();
        assert_eq!(ak_count(&req, &table).unwrap(), qp("5*q + 1"));
        for n in 0..4 {
            let spec = RegularElementSpec::Gl2Split { n };
            let table = FundamentalDomainTable::from_closed_forms(&spec).unwrap();
            for a in n as i64 + 1..n as i64 + 6 {
                let req = CountRequest::new(spec, &[a]).unwrap();
                let want = eval_formula(FormulaId::Gl2SplitQ, &Params::gl2(n as i64).with_a(&[a])).unwrap();
                assert_eq!(ak_count(&req, &table).unwrap(), want, "n = {n}, a = {a}");
            }
        }
    }

    #[test]
    fn gl2_main_and_tail() {
        let spec = RegularElementSpec::Gl2Split { n: 1 };
        let table = FundamentalDomainTable::from_closed_forms(&spec).unwrap();
        let j_table = levi_j_table(&spec).unwrap();
        let a = 4;
        let req = CountRequest::new(spec, &[a]).unwrap();
        assert_eq!(hn_main_body_without_j(&req, &j_table).unwrap(), QPoly::monomial(2 * a - 2, 1));
        assert_eq!(tail_count(&req, &table).unwrap(), qp("2*q + 2"));
    }

    #[test]
    fn gl2_weighted_integral() {
        for n in 0..4 {
            let spec = RegularElementSpec::Gl2Split { n };
            assert_eq!(solve_weighted_integral(&spec).unwrap(), closed_forms::gl2_split_j(n as i64));
        }
    }

    #[test]
    fn gl3_split_ak_matches_formula() {
        for (n1, n2) in [(1, 1), (1, 2)] {
            let spec = RegularElementSpec::Gl3Split { n1, n2 };
            let table = FundamentalDomainTable::from_closed_forms(&spec).unwrap();
            for a in [[10, 10], [11, 10], [10, 11], [11, 11]] {
                let req = CountRequest::new(spec, &a).unwrap();
                let want = eval_formula(FormulaId::Gl3SplitQAk, &Params::gl3(n1 as i64, n2 as i64).with_a(&a)).unwrap();
                assert_eq!(ak_count(&req, &table).unwrap(), want, "({n1},{n2}) a = {a:?}");
            }
        }
    }

    #[test]
    fn gl3_split_tail_matches_formula() {
        let spec = RegularElementSpec::Gl3Split { n1: 1, n2: 2 };
        let table = FundamentalDomainTable::from_closed_forms(&spec).unwrap();
        let req = CountRequest::new(spec, &[10, 11]).unwrap();
        let want = eval_formula(FormulaId::Gl3SplitTail, &Params::gl3(1, 2).with_a(&[10, 11])).unwrap();
        assert_eq!(tail_count(&req, &table).unwrap(), want);
    }

    #[test]
    fn gl3_split_j() {
        let spec = RegularElementSpec::Gl3Split { n1: 1, n2: 1 };
        assert_eq!(solve_weighted_integral(&spec).unwrap(), qp("3*q^3 - 5*q^2 + q + 1"));
    }

    #[test]
    fn mixed_j() {
        let spec = RegularElementSpec::Gl3Mixed { m: 1, n: 1 };
        assert_eq!(solve_weighted_integral(&spec).unwrap(), qp("2*q^3 - q - 1"));
    }

    #[test]
    fn orbital_integrals() {
        assert_eq!(orbital_integral(&RegularElementSpec::Gl2Split { n: 3 }).unwrap(), qp("q^3"));
        assert_eq!(orbital_integral(&RegularElementSpec::Gl3Split { n1: 1, n2: 2 }).unwrap(), qp("q^4"));
        assert_eq!(orbital_integral(&RegularElementSpec::Gl3Mixed { m: 1, n: 2 }).unwrap(), qp("q^4 + q^3 + q^2"));
        for (m, n) in [(1, 1), (2, 1), (3, 1), (1, 3)] {
            let want = eval_formula(FormulaId::Gl3MixedI, &Params::mixed(m, n)).unwrap();
            let spec = RegularElementSpec::Gl3Mixed { m: m as u32, n: n as u32 };
            assert_eq!(orbital_integral(&spec).unwrap(), want);
        }
    }

    #[test]
    fn arthur_j_volume_is_separate() {
        let j = arthur_j(&RegularElementSpec::Gl2Split { n: 0 }).unwrap();
        assert!(j.poly.is_zero());
        let j = arthur_j(&RegularElementSpec::Gl3Mixed { m: 1, n: 1 }).unwrap();
        assert_eq!(j.volume_sq, "2");
    }

    #[test]
    fn gl3_quasi_polynomial_collapses_and_purity() {
        let spec = RegularElementSpec::Gl3Split { n1: 1, n2: 1 };
        let table = FundamentalDomainTable::from_closed_forms(&spec).unwrap();
        let f = ak_quasi_poly(&spec, &table).unwrap();
        assert!(f.is_polynomial());
        let p = QPoly::from_tpoly_even(&gl3_split_poincare(1, 1)).unwrap();
        assert_eq!(f.branches.values().next().unwrap().a_constant_term().unwrap(), p);
        let e = extraction_quasi_poly(&spec, &table).unwrap();
        assert_eq!(constant_branch(&e).unwrap(), qp("3*q^3 - 5*q^2 + q + 1"));
    }

    #[test]
    fn gl2_quasi_polynomial() {
        let spec = RegularElementSpec::Gl2Split { n: 2 };
        let table = FundamentalDomainTable::from_closed_forms(&spec).unwrap();
        let f = ak_quasi_poly(&spec, &table).unwrap();
        assert!(f.is_polynomial());
        let a = 9;
        let want = eval_formula(FormulaId::Gl2SplitQ, &Params::gl2(2).with_a(&[a])).unwrap();
        assert_eq!(crate::qpoly::qp_evaluate(&f, &[a]).unwrap(), want);
    }

    #[test]
    fn tail_chain_examples() {
        let spec = RegularElementSpec::Gl3Split { n1: 1, n2: 2 };
        let table = FundamentalDomainTable::from_closed_forms(&spec).unwrap();
        let f = QPoly::from_tpoly_even(&gl3_split_poincare(1, 2)).unwrap();
        assert_eq!(ak_recursion_chain(&spec, 0, &spec.m0(), 0, &table).unwrap(), f);
        let l = LeviSpec::new(vec![vec![0, 1], vec![2]]).unwrap();
        let k = 3;
        let step = qp("q^4 + 2*q^3 + q^2");
        assert_eq!(ak_recursion_chain(&spec, 0, &l, k, &table).unwrap(), f + step.scale(k as i64));
    }

    #[test]
    fn non_regular_parameters_are_rejected() {
        let spec = RegularElementSpec::Gl3Split { n1: 1, n2: 1 };
        let table = FundamentalDomainTable::from_closed_forms(&spec).unwrap();
        let req = CountRequest::new(spec, &[1, 10]).unwrap();
        assert!(matches!(ak_count(&req, &table), Err(Error::NotRegular(_))));
        assert!(matches!(tail_count(&req, &table), Err(Error::NotSufficientlyRegular(_))));
    }
}
