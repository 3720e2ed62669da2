//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Criterion 4 asks for a split element with `n1 = n2 = 1` over `F_2`, which does not exist
//! (three pairwise ε-coefficients must be distinct residues). It is reported as FAIL together
//! with the substitute checks, and does not affect the exit status.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use orbint_core::closed_forms::{gl3_split_poincare, hessenberg_sum};
use orbint_core::counting_engine::{ak_quasi_poly, levi_j_table};
use orbint_core::moment_graph::{betti_numbers, min_formal_poincare_bnb, min_formal_poincare_exhaustive, BNB_BUDGET};
use orbint_core::oracle::{Field, Laurent, OLattice};
use orbint_core::polytopes::{
    apply_a_operator, default_xi, dilate, e_p_family, meet, minimal_regular_parameter, n_gamma, proper_parabolics,
    regular_truncation,
};
use orbint_core::root_data::{rat, CoweightVector, LeviSpec, Rat, Root};
use orbint_core::{
    ak_count, eval_formula, hn_main_body_count, sigma_gamma, solve_weighted_integral, tail_count, CountRequest, Error,
    FormulaId, FundamentalDomainTable, HessenbergCase, MomentGraph, Oracle, OrientedOrder, OrthogonalFamily, Params,
    QPoly, RegionPartition, RegularElementSpec, Target,
};

type Check = std::result::Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn ok<T>(r: orbint_core::Result<T>, what: &str) -> std::result::Result<T, String> {
    r.map_err(|e| format!("{what}: {e}"))
}

fn within(t: Instant, limit: Duration) -> std::result::Result<(), String> {
    let el = t.elapsed();
    if el > limit {
        Err(format!("took {el:?}, limit {limit:?}"))
    } else {
        Ok(())
    }
}

fn fd(spec: RegularElementSpec, q: u8) -> std::result::Result<u64, String> {
    let o = ok(Oracle::new(&spec, q), "oracle")?;
    Ok(ok(o.count_fundamental_domain(), "F count")?.count)
}

fn xi_stable(spec: RegularElementSpec, q: u8) -> std::result::Result<u64, String> {
    let o = ok(Oracle::new(&spec, q), "oracle")?;
    Ok(ok(o.count_xi_stable(&default_xi(&spec.m0())), "xi-stable count")?.count)
}

fn at(p: &QPoly, q: u8) -> i128 {
    p.evaluate(q as i64).expect("small evaluation")
}

fn c1_gl2_loop() -> Check {
    let t = Instant::now();
    for n in 0..=3u32 {
        let j = ok(solve_weighted_integral(&RegularElementSpec::Gl2Split { n }), "solve")?;
        // n q^n - Σ_{i<n} q^i, built term by term
        let mut want = QPoly::monomial(n as i64, n as i32);
        for i in 0..n as i32 {
            want.add_term(i, -1);
        }
        ensure!(j == want, "n = {n}: got {j}, want {want}");
    }
    within(t, Duration::from_secs(1))?;
    Ok(format!("n = 0..3 in {:?}", t.elapsed()))
}

fn c2_gl2_oracle() -> Check {
    let mut notes = Vec::new();
    for n in [1u32, 2] {
        let spec = RegularElementSpec::Gl2Split { n };
        let j = ok(solve_weighted_integral(&spec), "solve")?;
        for q in [2u8, 3] {
            let t = Instant::now();
            let f = fd(spec, q)?;
            let want_f: u64 = (0..=n).map(|i| (q as u64).pow(i)).sum();
            ensure!(f == want_f, "n = {n}, q = {q}: F = {f}, want {want_f}");
            let x = xi_stable(spec, q)?;
            ensure!(x as i128 == at(&j, q), "n = {n}, q = {q}: stable = {x}, J(q) = {}", at(&j, q));
            within(t, Duration::from_secs(30))?;
            notes.push(format!("({n},{q}): F={f} J={x}"));
        }
    }
    Ok(notes.join(", "))
}

fn c3_gl3_pipelines() -> Check {
    let t = Instant::now();
    let mut checked = 0;
    for (n1, n2) in [(1u32, 1u32), (1, 2), (2, 2)] {
        let spec = RegularElementSpec::Gl3Split { n1, n2 };
        let params = Params::gl3(n1 as i64, n2 as i64);
        let table = ok(FundamentalDomainTable::from_closed_forms(&spec), "table")?;
        let j_table = ok(levi_j_table(&spec), "Levi J table")?;
        let j = ok(solve_weighted_integral(&spec), "solve")?;
        let j_formula = ok(eval_formula(FormulaId::Gl3SplitJ, &params), "formula J")?;
        ensure!(j == j_formula, "({n1},{n2}): extracted J {j} vs formula {j_formula}");
        let t0 = minimal_regular_parameter(&spec);
        let mut parities = std::collections::BTreeSet::new();
        for a1 in t0..t0 + 6 {
            for a2 in t0..t0 + 6 {
                let a = [a1, a2];
                if regular_truncation(&spec, &a).is_err() {
                    continue;
                }
                let req = ok(CountRequest::new(spec, &a), "request")?;
                let ak = ok(ak_count(&req, &table), "ak")?;
                let main = ok(hn_main_body_count(&req, &j_table, &j), "main body")?;
                let tail = ok(tail_count(&req, &table), "tail")?;
                ensure!(ak == &main + &tail, "({n1},{n2}) a = {a:?}: ak {ak} vs main + tail {}", &main + &tail);
                let p = params.clone().with_a(&a);
                let ak_f = ok(eval_formula(FormulaId::Gl3SplitQAk, &p), "formula ak")?;
                let mt_f = &ok(eval_formula(FormulaId::Gl3SplitMain, &p), "formula main")?
                    + &ok(eval_formula(FormulaId::Gl3SplitTail, &p), "formula tail")?;
                ensure!(ak == ak_f, "({n1},{n2}) a = {a:?}: ak {ak} vs closed form {ak_f}");
                ensure!(ak_f == mt_f, "({n1},{n2}) a = {a:?}: closed forms disagree");
                parities.insert((a1 % 2, a2 % 2));
                checked += 1;
            }
        }
        ensure!(parities.len() == 4, "({n1},{n2}): only parities {parities:?} were regular");
    }
    within(t, Duration::from_secs(10))?;
    Ok(format!("{checked} parameter points in {:?}", t.elapsed()))
}

fn c4_split_oracle() -> Check {
    let spec = RegularElementSpec::Gl3Split { n1: 1, n2: 1 };
    let refusal = match Oracle::new(&spec, 2) {
        Err(Error::InvalidParams(m)) => m,
        Err(e) => return Err(format!("unexpected error at q = 2: {e}")),
        Ok(_) => return Err("an oracle for split (1,1) over F_2 was built; criterion should be runnable".into()),
    };
    let j = ok(solve_weighted_integral(&spec), "solve")?;
    let p = gl3_split_poincare(1, 1);
    let t = Instant::now();
    let (x3, f3) = (xi_stable(spec, 3)?, fd(spec, 3)?);
    ensure!(x3 as i128 == at(&j, 3), "q = 3: stable {x3} vs J(3) = {}", at(&j, 3));
    ensure!(f3 as i128 == p.evaluate_at_sqrt(3).unwrap(), "q = 3: F {f3} vs P(sqrt 3)");
    let s12 = RegularElementSpec::Gl3Split { n1: 1, n2: 2 };
    let j12 = ok(solve_weighted_integral(&s12), "solve")?;
    let (x2, f2) = (xi_stable(s12, 2)?, fd(s12, 2)?);
    ensure!(x2 as i128 == at(&j12, 2), "(1,2) q = 2: stable {x2} vs J(2)");
    ensure!(f2 as i128 == gl3_split_poincare(1, 2).evaluate_at_sqrt(2).unwrap(), "(1,2) q = 2: F {f2}");
    within(t, Duration::from_secs(600))?;
    Err(format!(
        "unattainable at q = 2 ({refusal}); formula values at q = 2 would be J = {}, F = {}. \
         Substitutes pass: (1,1) q = 3 stable = {x3}, F = {f3}; (1,2) q = 2 stable = {x2}, F = {f2}",
        at(&j, 2),
        p.evaluate_at_sqrt(2).unwrap()
    ))
}

fn c5_mixed() -> Check {
    let mut notes = Vec::new();
    let t = Instant::now();
    for (m, n) in [(1u32, 1u32), (1, 2), (2, 1)] {
        let p = Params::mixed(m as i64, n as i64);
        let f = ok(eval_formula(FormulaId::Gl3MixedF, &p), "F")?;
        let j = ok(eval_formula(FormulaId::Gl3MixedJ, &p), "J")?;
        let fm = ok(eval_formula(FormulaId::Gl2Aniso, &Params::gl2(n as i64)), "F^M")?;
        let ng = (2 * m).min(2 * n + 1) as i32;
        let rhs = &(&QPoly::monomial(ng as i64 + 1, ng) * &fm) - &f;
        ensure!(j == rhs, "({m},{n}): J {j} vs (n+1) q^n F^M - F = {rhs}");
        let spec = RegularElementSpec::Gl3Mixed { m, n };
        let of = fd(spec, 2)?;
        let ox = xi_stable(spec, 2)?;
        ensure!(of as i128 == at(&f, 2), "({m},{n}): oracle F {of} vs {}", at(&f, 2));
        ensure!(ox as i128 == at(&j, 2), "({m},{n}): oracle J {ox} vs {}", at(&j, 2));
        notes.push(format!("({m},{n}): F={of} J={ox}"));
    }
    within(t, Duration::from_secs(600))?;
    Ok(notes.join(", "))
}

fn c6_aniso() -> Check {
    let t = Instant::now();
    for (n1, n2) in [(0i64, 0i64), (1, 1), (1, 2), (2, 1)] {
        let id = if n1 <= n2 { FormulaId::Gl3AnisoJCase1 } else { FormulaId::Gl3AnisoJCase2 };
        let want = ok(eval_formula(id, &Params::gl3(n1, n2)), "formula")?;
        let got = hessenberg_sum(HessenbergCase::for_gl3(n1, n2), 0);
        ensure!(got == want, "({n1},{n2}): cells {got} vs formula {want}");
    }
    let mut notes = Vec::new();
    for (n1, n2) in [(0u32, 0u32), (1, 1)] {
        let want = ok(eval_formula(FormulaId::Gl3AnisoJCase1, &Params::gl3(n1 as i64, n2 as i64)), "formula")?;
        let c = fd(RegularElementSpec::Gl3Aniso { n1, n2 }, 2)?;
        ensure!(c as i128 == at(&want, 2), "({n1},{n2}): oracle {c} vs {}", at(&want, 2));
        notes.push(format!("({n1},{n2}): {c}"));
    }
    within(t, Duration::from_secs(600))?;
    Ok(notes.join(", "))
}

fn random_lattice(rng: &mut ChaCha8Rng, f: &Field) -> OLattice {
    let d: Vec<i32> = (0..3).map(|_| rng.gen_range(-3..=3)).collect();
    let mut l = OLattice::diagonal(&d).unwrap();
    for i in 0..3 {
        for j in i + 1..3 {
            let mut x = Laurent::ZERO;
            for s in 0..4 {
                let c = rng.gen_range(0..f.q);
                x = x.add(&Laurent::monomial(c, d[i] - 4 + s).unwrap(), f);
            }
            l.basis[i][j] = x;
        }
    }
    l
}

fn c7_invariants() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut cases = 0;

    // H_{P1} - H_{P2} is a nonnegative multiple of the coroot
    for _ in 0..100 {
        let q = [2u8, 3, 5][rng.gen_range(0..3)];
        let f = Field::new(q).unwrap();
        let l = random_lattice(&mut rng, &f);
        for m0 in [LeviSpec::torus(3), LeviSpec::new(vec![vec![0], vec![1, 2]]).unwrap()] {
            let mut vertices = BTreeMap::new();
            for p in m0.parabolics() {
                let h = ok(l.retraction(&p, &f), "retraction")?;
                vertices.insert(p, m0.lambda_to_coweight(&h.values).to_derived());
            }
            ensure!(
                OrthogonalFamily::new(LeviSpec::whole(3), m0.clone(), vertices).is_ok(),
                "positivity fails for {l:?}"
            );
            cases += 1;
        }
    }

    // moment polytopes of stable lattices sit in Σ_γ-sized boxes
    for (spec, q) in [
        (RegularElementSpec::Gl2Split { n: 2 }, 3u8),
        (RegularElementSpec::Gl3Split { n1: 1, n2: 2 }, 2),
        (RegularElementSpec::Gl3Mixed { m: 1, n: 1 }, 2),
    ] {
        let o = ok(Oracle::new(&spec, q), "oracle")?;
        for l in ok(o.lattices(&Target::XiStable(default_xi(&spec.m0()))), "lattices")? {
            let fam = ok(o.moment_family(&l), "moment family")?;
            for (p1, p2, _) in fam.adjacent_pairs() {
                let c = fam.edge_coefficient(&p1, &p2).unwrap();
                let bound = n_gamma(&spec, &p1, &p2).unwrap();
                ensure!(c >= rat(0) && c <= rat(bound), "{spec}: edge {p1}-{p2} = {c} exceeds {bound}");
            }
            cases += 1;
        }
    }

    // every generic point has exactly one region
    for _ in 0..200 {
        let spec = [
            RegularElementSpec::Gl3Split { n1: 1, n2: 1 },
            RegularElementSpec::Gl3Split { n1: 1, n2: 2 },
            RegularElementSpec::Gl3Mixed { m: 1, n: 1 },
        ][rng.gen_range(0..3)];
        let regions = RegionPartition::new(&sigma_gamma(&spec)).unwrap();
        let raw = CoweightVector((0..3).map(|_| Rat::new(rng.gen_range(-40_000..40_000), 7919)).collect());
        let pt = spec.m0().project_center(&raw.to_derived());
        ensure!(regions.region_of(&pt).is_ok(), "{spec}: no unique region for {pt:?}");
        cases += 1;
    }

    // E_P ∩ E_Q and E_{P∩Q} have the same lattice points
    for _ in 0..12 {
        let n1 = rng.gen_range(0..3u32);
        let spec = RegularElementSpec::Gl3Split { n1, n2: n1 + rng.gen_range(0..2) };
        let t = minimal_regular_parameter(&spec);
        let a = [t + rng.gen_range(0..4), t + rng.gen_range(0..4)];
        if regular_truncation(&spec, &a).is_err() {
            continue;
        }
        let sigma = sigma_gamma(&spec);
        let pi = dilate(&sigma, &a).unwrap();
        let bx = pi.to_hpolytope().unwrap().integer_box().unwrap().unwrap();
        let pts: Vec<Vec<Rat>> =
            (bx[0].0..=bx[0].1).flat_map(|x| (bx[1].0..=bx[1].1).map(move |y| vec![rat(x), rat(y)])).collect();
        let props = proper_parabolics(&sigma.m0);
        let inside: BTreeMap<_, Vec<bool>> = props
            .iter()
            .map(|p| {
                let h = e_p_family(&pi, &sigma, p).unwrap().to_hpolytope().unwrap();
                (p.clone(), pts.iter().map(|u| h.contains(u)).collect())
            })
            .collect();
        for (i, p) in props.iter().enumerate() {
            for q in &props[i + 1..] {
                let want = meet(&sigma.m0, p, q).map(|r| inside[&r].clone()).unwrap_or(vec![false; pts.len()]);
                let got: Vec<bool> = inside[p].iter().zip(&inside[q]).map(|(x, y)| *x && *y).collect();
                ensure!(got == want, "{spec} a = {a:?}: E_{p} ∩ E_{q} differs from the meet");
            }
        }
        cases += 1;
    }

    // A-operators commute
    for _ in 0..30 {
        let n1 = rng.gen_range(0..3u32);
        let spec = RegularElementSpec::Gl3Split { n1, n2: n1 + rng.gen_range(0..3) };
        let sigma = sigma_gamma(&spec);
        let (k, l) = (rng.gen_range(0..4u32), rng.gen_range(0..4u32));
        let g = LeviSpec::whole(3);
        let l01 = LeviSpec::new(vec![vec![0, 1], vec![2]]).unwrap();
        let ops = [(g.clone(), Root::new(0, 1)), (g, Root::new(1, 2)), (l01, Root::new(0, 1))];
        for (i, (la, x)) in ops.iter().enumerate() {
            for (lb, y) in &ops[i + 1..] {
                let ab = apply_a_operator(&apply_a_operator(&sigma, la, *x, k).unwrap(), lb, *y, l).unwrap();
                let ba = apply_a_operator(&apply_a_operator(&sigma, lb, *y, l).unwrap(), la, *x, k).unwrap();
                ensure!(ab == ba, "{spec}: A-operators {x} and {y} do not commute");
            }
        }
        cases += 1;
    }
    Ok(format!("{cases} randomized instances"))
}

fn c8_purity() -> Check {
    let mut done = Vec::new();
    for n2 in 0..=2u32 {
        for n1 in 0..=n2 {
            let spec = RegularElementSpec::Gl3Split { n1, n2 };
            let table = ok(FundamentalDomainTable::from_closed_forms(&spec), "table")?;
            let f = ok(ak_quasi_poly(&spec, &table), "quasi-polynomial")?;
            let p = ok(QPoly::from_tpoly_even(&gl3_split_poincare(n1 as i64, n2 as i64)), "P(t)")?;
            for (r, b) in &f.branches {
                let c = ok(b.a_constant_term(), "constant term")?;
                ensure!(c == p, "({n1},{n2}) parity {r:?}: constant term {c} vs P = {p}");
            }
            done.push(format!("({n1},{n2})"));
        }
    }
    Ok(done.join(" "))
}

fn graphs_on(n: usize) -> impl Iterator<Item = Vec<(usize, usize)>> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    (0u64..1 << pairs.len())
        .map(move |mask| pairs.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, e)| *e).collect())
}

fn c9_moment_graphs() -> Check {
    let mut corpus: Vec<(usize, Vec<(usize, usize)>)> = Vec::new();
    for n in 1..=5 {
        corpus.extend(graphs_on(n).map(|e| (n, e)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for n in [6usize, 7] {
        for _ in 0..150 {
            let p = rng.gen_range(0.1..0.9);
            let e: Vec<(usize, usize)> =
                (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|_| rng.gen_bool(p)).collect();
            corpus.push((n, e));
        }
    }
    for (n, e) in &corpus {
        let g = MomentGraph::unlabelled(*n, e).unwrap();
        let ex = ok(min_formal_poincare_exhaustive(&g, 7), "exhaustive")?;
        let bb = ok(min_formal_poincare_bnb(&g, BNB_BUDGET), "branch and bound")?;
        ensure!(ex.betti == bb.betti && ex.witness == bb.witness, "n = {n}, edges {e:?}: {:?} vs {:?}", ex, bb);
    }
    for _ in 0..1000 {
        let n = rng.gen_range(1..=9);
        let e: Vec<(usize, usize)> =
            (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|_| rng.gen_bool(0.4)).collect();
        let g = MomentGraph::unlabelled(n, &e).unwrap();
        let mut order: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            order.swap(i, rng.gen_range(0..=i));
        }
        let b = betti_numbers(&g, &OrientedOrder(order));
        ensure!(b.iter().sum::<u32>() as usize == n, "Betti numbers do not sum to {n}");
        let weighted: usize = b.iter().enumerate().map(|(i, &x)| i * x as usize).sum();
        ensure!(weighted == e.len(), "weighted Betti sum {weighted} vs {} edges", e.len());
        ensure!(b[0] >= 1, "no source vertex");
    }
    Ok(format!("{} graphs, 1000 handshake cases", corpus.len()))
}

fn main() {
    let criteria: [(u8, &str, fn() -> Check); 9] = [
        (1, "GL2 split closed loop", c1_gl2_loop),
        (2, "GL2 oracle", c2_gl2_oracle),
        (3, "GL3 split pipeline identity", c3_gl3_pipelines),
        (4, "GL3 split (1,1) oracle at q = 2", c4_split_oracle),
        (5, "GL3 mixed", c5_mixed),
        (6, "GL3 anisotropic", c6_aniso),
        (7, "structural invariants", c7_invariants),
        (8, "purity link", c8_purity),
        (9, "moment graphs", c9_moment_graphs),
    ];
    let mut unexpected = 0;
    for (k, name, run) in criteria {
        let t = Instant::now();
        let out = run();
        let el = t.elapsed();
        match out {
            Ok(msg) => println!("PASS criterion {k} ({name}) [{el:.2?}]: {msg}"),
            Err(msg) => {
                println!("FAIL criterion {k} ({name}) [{el:.2?}]: {msg}");
                if k != 4 || !msg.starts_with("unattainable") {
                    unexpected += 1;
                }
            }
        }
    }
    if unexpected > 0 {
        eprintln!("{unexpected} criteria failed");
        std::process::exit(1);
    }
}
