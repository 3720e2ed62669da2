use std::collections::BTreeMap;

use proptest::prelude::*;

use orbint_core::moment_graph::{betti_numbers, MomentGraph, OrientedOrder};
use orbint_core::oracle::lattice::{canonicalize, zero_mat, Mat};
use orbint_core::oracle::{Field, Laurent, OLattice, Oracle, Target};
use orbint_core::polytopes::{
    apply_a_operator, default_xi, dilate, e_p_family, meet, minimal_regular_parameter, n_gamma, proper_parabolics,
    regular_truncation, sigma_gamma,
};
use orbint_core::root_data::{rat, CoweightVector, LeviSpec, ParabolicSpec, Rat, Root, RootDatum};
use orbint_core::{OrthogonalFamily, QPoly, RegionPartition, RegularElementSpec};

fn field_size() -> impl Strategy<Value = u8> {
    prop_oneof![Just(2u8), Just(3u8), Just(5u8)]
}

/// A Hermite form with `d ∈ [-3, 3]^3` and entries of at most four terms below the pivot.
fn lattice(q: u8) -> impl Strategy<Value = OLattice> {
    (prop::array::uniform3(-3i32..=3), prop::collection::vec(0u8..q, 12)).prop_map(move |(d, digits)| {
        let f = Field::new(q).unwrap();
        let mut l = OLattice::diagonal(&d).unwrap();
        let mut k = 0;
        for i in 0..3 {
            for j in i + 1..3 {
                let mut x = Laurent::ZERO;
                for s in 0..4 {
                    x = x.add(&Laurent::monomial(digits[k], d[i] - 4 + s).unwrap(), &f);
                    k += 1;
                    if k == digits.len() {
                        k = 0;
                    }
                }
                l.basis[i][j] = x;
            }
        }
        l
    })
}

fn family_of(l: &OLattice, m0: &LeviSpec, f: &Field) -> orbint_core::Result<OrthogonalFamily> {
    let mut vertices = BTreeMap::new();
    for p in m0.parabolics() {
        let h = l.retraction(&p, f).unwrap();
        vertices.insert(p, m0.lambda_to_coweight(&h.values).to_derived());
    }
    OrthogonalFamily::new(LeviSpec::whole(3), m0.clone(), vertices)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn arthur_positivity((q, l) in field_size().prop_flat_map(|q| (Just(q), lattice(q)))) {
        let f = Field::new(q).unwrap();
        for m0 in [LeviSpec::torus(3), LeviSpec::new(vec![vec![0], vec![1, 2]]).unwrap()] {
            prop_assert!(family_of(&l, &m0, &f).is_ok());
        }
    }

    #[test]
    fn retraction_is_transitive((q, l) in field_size().prop_flat_map(|q| (Just(q), lattice(q)))) {
        let f = Field::new(q).unwrap();
        for w in RootDatum::gl(3).weyl_group() {
            let b = ParabolicSpec::borel(&w);
            let hb = l.retraction(&b, &f).unwrap();
            for p in b.coarsenings() {
                prop_assert_eq!(l.retraction(&p, &f).unwrap(), hb.push_forward(&p.levi()));
            }
        }
    }

    #[test]
    fn canonical_form_is_basis_independent(
        (q, l) in field_size().prop_flat_map(|q| (Just(q), lattice(q))),
        lower in prop::collection::vec((0u8..5, 0i32..3), 3),
        upper in prop::collection::vec((0u8..5, 0i32..3), 3),
        diag in prop::array::uniform3(1u8..5),
    ) {
        let f = Field::new(q).unwrap();
        let c = |x: u8| x % q;
        let unit = |x: u8| 1 + x % (q - 1);
        // U = lower-unitriangular · upper-unitriangular · unit diagonal, entries in O
        let mut lo: Mat = zero_mat();
        let mut up: Mat = zero_mat();
        let mut k = 0;
        for i in 0..3 {
            lo[i][i] = Laurent::eps_pow(0).unwrap();
            up[i][i] = Laurent::monomial(unit(diag[i]), 0).unwrap();
            for j in 0..i {
                lo[i][j] = Laurent::monomial(c(lower[k].0), lower[k].1).unwrap();
                up[j][i] = Laurent::monomial(c(upper[k].0), upper[k].1).unwrap();
                k += 1;
            }
        }
        let mul = |a: &Mat, b: &Mat| {
            let mut r = zero_mat();
            for i in 0..3 {
                for j in 0..3 {
                    for t in 0..3 {
                        r[i][j] = r[i][j].add(&a[i][t].mul(&b[t][j], &f).unwrap(), &f);
                    }
                }
            }
            r
        };
        let changed = mul(&mul(&l.basis, &lo), &up);
        prop_assert_eq!(canonicalize(3, &changed, 16, &f).unwrap(), l);
    }

    #[test]
    fn region_partition_is_a_partition(
        case in 0usize..4,
        x in prop::array::uniform3(-40_000i64..40_000),
    ) {
        let spec = [
            RegularElementSpec::Gl3Split { n1: 1, n2: 1 },
            RegularElementSpec::Gl3Split { n1: 1, n2: 2 },
            RegularElementSpec::Gl3Mixed { m: 1, n: 1 },
            RegularElementSpec::Gl2Split { n: 2 },
        ][case];
        let sigma = sigma_gamma(&spec);
        let regions = RegionPartition::new(&sigma).unwrap();
        let n = spec.n();
        let raw = CoweightVector(x[..n].iter().map(|&v| Rat::new(v, 7919)).collect());
        let point = spec.m0().project_center(&raw.to_derived());
        prop_assert!(regions.region_of(&point).is_ok());
    }

    #[test]
    fn a_operators_commute(k in 0u32..4, l in 0u32..4, n1 in 0u32..3, dn in 0u32..3) {
        let spec = RegularElementSpec::Gl3Split { n1, n2: n1 + dn };
        let sigma = sigma_gamma(&spec);
        let g = LeviSpec::whole(3);
        let l01 = LeviSpec::new(vec![vec![0, 1], vec![2]]).unwrap();
        let ops = [(g.clone(), Root::new(0, 1)), (g, Root::new(1, 2)), (l01, Root::new(0, 1))];
        for (i, (la, a)) in ops.iter().enumerate() {
            for (lb, b) in &ops[i + 1..] {
                let ab = apply_a_operator(&apply_a_operator(&sigma, la, *a, k).unwrap(), lb, *b, l).unwrap();
                let ba = apply_a_operator(&apply_a_operator(&sigma, lb, *b, l).unwrap(), la, *a, k).unwrap();
                prop_assert_eq!(ab, ba);
            }
        }
    }

    #[test]
    fn qpoly_ring_laws(
        a in prop::collection::vec((-3i32..6, -5i64..6), 0..5),
        b in prop::collection::vec((-3i32..6, -5i64..6), 0..5),
        c in prop::collection::vec((-3i32..6, -5i64..6), 0..5),
    ) {
        let (a, b, c) = (QPoly::from_terms(a), QPoly::from_terms(b), QPoly::from_terms(c));
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(a.to_string().parse::<QPoly>().unwrap(), a);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn intersection_law_on_lattice_points(n1 in 0u32..3, dn in 0u32..2, extra in prop::array::uniform2(0i64..4)) {
        let spec = RegularElementSpec::Gl3Split { n1, n2: n1 + dn };
        let t = minimal_regular_parameter(&spec);
        let a = [t + extra[0], t + extra[1]];
        prop_assume!(regular_truncation(&spec, &a).is_ok());
        let sigma = sigma_gamma(&spec);
        let pi = dilate(&sigma, &a).unwrap();
        let m0 = sigma.m0.clone();
        let props = proper_parabolics(&m0);
        let hull = pi.to_hpolytope().unwrap();
        let bx = hull.integer_box().unwrap().unwrap();
        let pts: Vec<Vec<Rat>> = (bx[0].0..=bx[0].1)
            .flat_map(|x| (bx[1].0..=bx[1].1).map(move |y| vec![rat(x), rat(y)]))
            .collect();
        let inside: BTreeMap<ParabolicSpec, Vec<bool>> = props
            .iter()
            .map(|p| {
                let h = e_p_family(&pi, &sigma, p).unwrap().to_hpolytope().unwrap();
                (p.clone(), pts.iter().map(|u| h.contains(u)).collect())
            })
            .collect();
        for (i, p) in props.iter().enumerate() {
            for q in &props[i + 1..] {
                let want: Vec<bool> = match meet(&m0, p, q) {
                    Some(r) => inside[&r].clone(),
                    None => vec![false; pts.len()],
                };
                let got: Vec<bool> = inside[p].iter().zip(&inside[q]).map(|(x, y)| *x && *y).collect();
                prop_assert_eq!(got, want, "{} and {}", p, q);
            }
        }
    }

    #[test]
    fn moment_polytopes_obey_the_gkm_bound(case in 0usize..5, shift in prop::array::uniform3(-2i64..=2)) {
        let (spec, q) = [
            (RegularElementSpec::Gl2Split { n: 2 }, 3u8),
            (RegularElementSpec::Gl2Split { n: 3 }, 2),
            (RegularElementSpec::Gl3Split { n1: 1, n2: 2 }, 2),
            (RegularElementSpec::Gl3Split { n1: 1, n2: 1 }, 3),
            (RegularElementSpec::Gl3Mixed { m: 1, n: 1 }, 2),
        ][case];
        let m0 = spec.m0();
        let n = spec.n();
        let t = m0.project_center(&CoweightVector(shift[..n].iter().map(|&v| rat(v)).collect()).to_derived());
        let xi = &default_xi(&m0) + &t;
        let o = Oracle::new(&spec, q).unwrap();
        for l in o.lattices(&Target::XiStable(xi)).unwrap() {
            let fam = o.moment_family(&l).unwrap();
            for (p1, p2, _) in fam.adjacent_pairs() {
                let c = fam.edge_coefficient(&p1, &p2).unwrap();
                prop_assert!(c >= rat(0) && c <= rat(n_gamma(&spec, &p1, &p2).unwrap()));
            }
        }
    }
}

#[test]
fn handshake_on_random_orders() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for _ in 0..1000 {
        let n = rng.gen_range(1..=9);
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.gen_bool(0.4) {
                    edges.push((i, j));
                }
            }
        }
        let g = MomentGraph::unlabelled(n, &edges).unwrap();
        let mut order: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            order.swap(i, rng.gen_range(0..=i));
        }
        let b = betti_numbers(&g, &OrientedOrder(order));
        assert_eq!(b.iter().sum::<u32>() as usize, n);
        assert_eq!(b.iter().enumerate().map(|(i, &x)| i * x as usize).sum::<usize>(), edges.len());
        assert!(b[0] >= 1);
    }
}
