//! Root datum of split `GL_n`: roots, coweights, Levi subgroups and parabolics
//! as block partitions, and the lattices `Λ_M`.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_rational::Rational64;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rat = Rational64;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(n)
}

/// The root `e_i - e_j` (0-based indices).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Root {
    pub i: usize,
    pub j: usize,
}

impl Root {
    pub fn new(i: usize, j: usize) -> Self {
        assert_ne!(i, j);
        Root { i, j }
    }

    pub fn negate(self) -> Root {
        Root { i: self.j, j: self.i }
    }

    pub fn is_positive(self) -> bool {
        self.i < self.j
    }

    pub fn pair(self, v: &CoweightVector) -> Rat {
        v.0[self.i] - v.0[self.j]
    }

    pub fn coroot(self, n: usize) -> CoweightVector {
        let mut v = CoweightVector::zero(n);
        v.0[self.i] = rat(1);
        v.0[self.j] = rat(-1);
        v
    }
}

impl fmt::Display for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}-e{}", self.i + 1, self.j + 1)
    }
}

/// A rational point of `a_A = Q^n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CoweightVector(pub Vec<Rat>);

impl CoweightVector {
    pub fn zero(n: usize) -> Self {
        CoweightVector(vec![Rat::zero(); n])
    }

    pub fn from_ints(v: &[i64]) -> Self {
        CoweightVector(v.iter().map(|&x| rat(x)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn sum(&self) -> Rat {
        self.0.iter().sum()
    }

    pub fn dot(&self, other: &CoweightVector) -> Rat {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn scale(&self, c: Rat) -> Self {
        CoweightVector(self.0.iter().map(|x| x * c).collect())
    }

    pub fn sum_over(&self, idx: &[usize]) -> Rat {
        idx.iter().map(|&i| self.0[i]).sum()
    }

    pub fn is_integral(&self) -> bool {
        self.0.iter().all(|x| x.is_integer())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|x| x.is_zero())
    }

    /// Removes the central component.
    pub fn to_derived(&self) -> Self {
        let m = self.sum() / rat(self.dim() as i64);
        CoweightVector(self.0.iter().map(|x| x - m).collect())
    }

    /// Permutation action `w·e_i = e_{w(i)}`.
    pub fn permute(&self, w: &[usize]) -> Self {
        let mut out = CoweightVector::zero(self.dim());
        for (i, &wi) in w.iter().enumerate() {
            out.0[wi] = self.0[i];
        }
        out
    }

    pub fn sup_norm(&self) -> Rat {
        self.0.iter().map(|x| x.abs()).max().unwrap_or_else(Rat::zero)
    }
}

impl Add for &CoweightVector {
    type Output = CoweightVector;
    fn add(self, rhs: Self) -> CoweightVector {
        CoweightVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &CoweightVector {
    type Output = CoweightVector;
    fn sub(self, rhs: Self) -> CoweightVector {
        CoweightVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &CoweightVector {
    type Output = CoweightVector;
    fn neg(self) -> CoweightVector {
        self.scale(rat(-1))
    }
}

impl fmt::Display for CoweightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, x) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

impl Serialize for CoweightVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CoweightVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v: Vec<String> = Vec::deserialize(d)?;
        let parsed: std::result::Result<Vec<Rat>, _> = v.iter().map(|s| s.parse::<Rat>()).collect();
        parsed.map(CoweightVector).map_err(serde::de::Error::custom)
    }
}

/// Split `GL_n` with the upper triangular Borel `B_0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootDatum {
    pub n: usize,
}

impl RootDatum {
    pub fn gl(n: usize) -> Self {
        assert!(n >= 1);
        RootDatum { n }
    }

    pub fn roots(&self) -> Vec<Root> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    out.push(Root::new(i, j));
                }
            }
        }
        out
    }

    pub fn positive_roots(&self) -> Vec<Root> {
        self.roots().into_iter().filter(|r| r.is_positive()).collect()
    }

    pub fn simple_roots(&self) -> Vec<Root> {
        (0..self.n.saturating_sub(1)).map(|i| Root::new(i, i + 1)).collect()
    }

    pub fn coroots(&self) -> Vec<CoweightVector> {
        self.roots().into_iter().map(|r| r.coroot(self.n)).collect()
    }

    /// `ϖ_i^∨` in `a_A^G` (index `i` is 0-based: `ϖ_i^∨` pairs to 1 with `α_i = e_i - e_{i+1}`).
    pub fn fundamental_coweight(&self, i: usize) -> CoweightVector {
        let k = i + 1;
        let n = self.n as i64;
        CoweightVector(
            (0..self.n).map(|j| if j < k { Rat::new(n - k as i64, n) } else { Rat::new(-(k as i64), n) }).collect(),
        )
    }

    pub fn fundamental_coweights(&self) -> Vec<CoweightVector> {
        (0..self.n.saturating_sub(1)).map(|i| self.fundamental_coweight(i)).collect()
    }

    pub fn torus(&self) -> LeviSpec {
        LeviSpec::torus(self.n)
    }

    pub fn whole(&self) -> LeviSpec {
        LeviSpec::whole(self.n)
    }

    /// All Levi subgroups containing the diagonal torus.
    pub fn levis(&self) -> Vec<LeviSpec> {
        set_partitions(self.n).into_iter().map(|b| LeviSpec::new(b).unwrap()).collect()
    }

    /// All permutations of `0..n`, lexicographically.
    pub fn weyl_group(&self) -> Vec<Vec<usize>> {
        permutations(&(0..self.n).collect::<Vec<_>>())
    }
}

fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in set_partitions(n - 1) {
        for k in 0..p.len() {
            let mut q = p.clone();
            q[k].push(n - 1);
            out.push(q);
        }
        let mut q = p.clone();
        q.push(vec![n - 1]);
        out.push(q);
    }
    out
}

pub(crate) fn permutations<T: Clone>(items: &[T]) -> Vec<Vec<T>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for k in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(k);
        for mut p in permutations(&rest) {
            p.insert(0, x.clone());
            out.push(p);
        }
    }
    out
}

/// Levi subgroup `M ⊇ A`, a set partition of `{0..n-1}` into blocks.
/// Stored canonically: each block sorted, blocks sorted by first element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LeviSpec {
    pub n: usize,
    pub blocks: Vec<Vec<usize>>,
}

impl LeviSpec {
    pub fn new(mut blocks: Vec<Vec<usize>>) -> Result<Self> {
        for b in blocks.iter_mut() {
            b.sort_unstable();
        }
        blocks.retain(|b| !b.is_empty());
        blocks.sort();
        let n: usize = blocks.iter().map(|b| b.len()).sum();
        let all: BTreeSet<usize> = blocks.iter().flatten().copied().collect();
        if all.len() != n || all.iter().copied().ne(0..n) {
            return Err(Error::InvalidParams(format!("blocks {blocks:?} do not partition 0..{n}")));
        }
        Ok(LeviSpec { n, blocks })
    }

    pub fn torus(n: usize) -> Self {
        LeviSpec { n, blocks: (0..n).map(|i| vec![i]).collect() }
    }

    pub fn whole(n: usize) -> Self {
        LeviSpec { n, blocks: vec![(0..n).collect()] }
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Semisimple rank.
    pub fn ss_rank(&self) -> usize {
        self.n - self.blocks.len()
    }

    /// `dim a_M^G`.
    pub fn center_dim(&self) -> usize {
        self.blocks.len() - 1
    }

    pub fn is_torus(&self) -> bool {
        self.blocks.len() == self.n
    }

    pub fn is_whole(&self) -> bool {
        self.blocks.len() == 1
    }

    pub fn block_of(&self, i: usize) -> usize {
        self.blocks.iter().position(|b| b.contains(&i)).expect("index in range")
    }

    pub fn contains_root(&self, r: Root) -> bool {
        self.block_of(r.i) == self.block_of(r.j)
    }

    /// True when every block of `self` lies inside a block of `other` (`self ⊆ other`).
    pub fn is_contained_in(&self, other: &LeviSpec) -> bool {
        self.blocks.iter().all(|b| {
            let k = other.block_of(b[0]);
            b.iter().all(|&i| other.block_of(i) == k)
        })
    }

    /// Levi subgroups of `GL_n` containing `self`.
    pub fn overgroups(&self) -> Vec<LeviSpec> {
        set_partitions(self.blocks.len())
            .into_iter()
            .map(|p| {
                LeviSpec::new(p.iter().map(|g| g.iter().flat_map(|&k| self.blocks[k].clone()).collect()).collect())
                    .unwrap()
            })
            .collect()
    }

    /// `π_M`: averages within each block.
    pub fn project_center(&self, v: &CoweightVector) -> CoweightVector {
        let mut out = CoweightVector::zero(self.n);
        for b in &self.blocks {
            let avg = v.sum_over(b) / rat(b.len() as i64);
            for &i in b {
                out.0[i] = avg;
            }
        }
        out
    }

    /// Block sums, i.e. the image in `Λ_M ⊗ Q`.
    pub fn block_sums(&self, v: &CoweightVector) -> Vec<Rat> {
        self.blocks.iter().map(|b| v.sum_over(b)).collect()
    }

    /// Whether `v` is constant on blocks.
    pub fn is_central(&self, v: &CoweightVector) -> bool {
        self.blocks.iter().all(|b| b.iter().all(|&i| v.0[i] == v.0[b[0]]))
    }

    /// Parabolics with Levi `self`, i.e. all orderings of the blocks.
    pub fn parabolics(&self) -> Vec<ParabolicSpec> {
        permutations(&self.blocks).into_iter().map(|order| ParabolicSpec { order }).collect()
    }

    /// The parabolic whose blocks are ordered by their least element.
    pub fn standard_parabolic(&self) -> ParabolicSpec {
        ParabolicSpec { order: self.blocks.clone() }
    }

    /// `F(M)`: parabolics containing some element of `P(M)`.
    pub fn parabolic_overgroups(&self) -> Vec<ParabolicSpec> {
        let mut set = BTreeSet::new();
        for p in self.parabolics() {
            for q in p.coarsenings() {
                set.insert(q);
            }
        }
        set.into_iter().collect()
    }

    /// `c_M`: block values reduced modulo block sizes.
    pub fn class_of(&self, values: &[i64]) -> Vec<i64> {
        values.iter().zip(&self.blocks).map(|(v, b)| v.rem_euclid(b.len() as i64)).collect()
    }

    /// Block-value vector realised as a point of `a_M` (value spread evenly over each block).
    pub fn lambda_to_coweight(&self, values: &[i64]) -> CoweightVector {
        let mut out = CoweightVector::zero(self.n);
        for (b, &v) in self.blocks.iter().zip(values) {
            for &i in b {
                out.0[i] = Rat::new(v, b.len() as i64);
            }
        }
        out
    }

    /// `X_*(A_M)` covolume squared in `a_M` for the Euclidean inner product.
    pub fn center_covolume_sq(&self) -> Rat {
        self.blocks.iter().map(|b| rat(b.len() as i64)).product()
    }
}

impl fmt::Display for LeviSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> =
            self.blocks.iter().map(|b| b.iter().map(|i| (i + 1).to_string()).collect::<String>()).collect();
        write!(f, "{{{}}}", parts.join("}{"))
    }
}

/// Parabolic subgroup `P = MN`, given by an ordering of the blocks of `M`.
/// A root `e_a - e_b` lies in `N` when the block of `a` precedes the block of `b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ParabolicSpec {
    pub order: Vec<Vec<usize>>,
}

impl ParabolicSpec {
    pub fn new(mut order: Vec<Vec<usize>>) -> Result<Self> {
        for b in order.iter_mut() {
            b.sort_unstable();
        }
        LeviSpec::new(order.clone())?;
        Ok(ParabolicSpec { order })
    }

    /// Borel subgroup from a permutation word `w(1)..w(n)` (0-based entries).
    pub fn borel(word: &[usize]) -> Self {
        ParabolicSpec { order: word.iter().map(|&i| vec![i]).collect() }
    }

    pub fn n(&self) -> usize {
        self.order.iter().map(|b| b.len()).sum()
    }

    pub fn levi(&self) -> LeviSpec {
        LeviSpec::new(self.order.clone()).unwrap()
    }

    pub fn whole(n: usize) -> Self {
        ParabolicSpec { order: vec![(0..n).collect()] }
    }

    pub fn is_whole(&self) -> bool {
        self.order.len() == 1
    }

    /// Key such as `132` for Borels or `1|23` otherwise (1-based).
    pub fn key(&self) -> String {
        let single = self.order.iter().all(|b| b.len() == 1);
        let parts: Vec<String> =
            self.order.iter().map(|b| b.iter().map(|i| (i + 1).to_string()).collect::<String>()).collect();
        if single {
            parts.concat()
        } else {
            parts.join("|")
        }
    }

    pub fn from_key(key: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad parabolic key {key:?}"));
        let order: Vec<Vec<usize>> = if key.contains('|') {
            key.split('|')
                .map(|part| part.chars().map(|c| c.to_digit(10).map(|d| d as usize - 1).ok_or_else(bad)).collect())
                .collect::<Result<_>>()?
        } else {
            key.chars().map(|c| c.to_digit(10).map(|d| vec![d as usize - 1]).ok_or_else(bad)).collect::<Result<_>>()?
        };
        if order.iter().flatten().any(|&i| i >= 9) {
            return Err(bad());
        }
        ParabolicSpec::new(order)
    }

    pub fn position(&self, i: usize) -> usize {
        self.order.iter().position(|b| b.contains(&i)).expect("index in range")
    }

    pub fn in_unipotent(&self, r: Root) -> bool {
        self.position(r.i) < self.position(r.j)
    }

    /// Roots of the unipotent radical.
    pub fn unipotent_roots(&self) -> Vec<Root> {
        RootDatum::gl(self.n()).roots().into_iter().filter(|&r| self.in_unipotent(r)).collect()
    }

    pub fn opposite(&self) -> Self {
        let mut order = self.order.clone();
        order.reverse();
        ParabolicSpec { order }
    }

    /// `self ⊆ other`: `other`'s blocks are unions of consecutive blocks of `self`.
    pub fn is_contained_in(&self, other: &ParabolicSpec) -> bool {
        let mut k = 0;
        for ob in &other.order {
            let mut acc: BTreeSet<usize> = BTreeSet::new();
            while acc.len() < ob.len() && k < self.order.len() {
                acc.extend(self.order[k].iter().copied());
                k += 1;
            }
            if acc.iter().copied().ne(ob.iter().copied()) {
                return false;
            }
        }
        k == self.order.len()
    }

    /// All parabolics obtained by merging runs of consecutive blocks.
    pub fn coarsenings(&self) -> Vec<ParabolicSpec> {
        let k = self.order.len();
        let mut out = Vec::new();
        for mask in 0u32..(1 << (k.saturating_sub(1))) {
            let mut order: Vec<Vec<usize>> = vec![self.order[0].clone()];
            for j in 1..k {
                if mask & (1 << (j - 1)) != 0 {
                    order.last_mut().unwrap().extend(self.order[j].iter().copied());
                } else {
                    order.push(self.order[j].clone());
                }
            }
            for b in order.iter_mut() {
                b.sort_unstable();
            }
            out.push(ParabolicSpec { order });
        }
        out
    }

    /// Index `j` such that `other` is `self` with blocks `j, j+1` swapped.
    pub fn adjacency(&self, other: &ParabolicSpec) -> Option<usize> {
        if self.order.len() != other.order.len() {
            return None;
        }
        let diff: Vec<usize> = (0..self.order.len()).filter(|&k| self.order[k] != other.order[k]).collect();
        if diff.len() == 2
            && diff[1] == diff[0] + 1
            && self.order[diff[0]] == other.order[diff[1]]
            && self.order[diff[1]] == other.order[diff[0]]
        {
            Some(diff[0])
        } else {
            None
        }
    }

    pub fn swap(&self, j: usize) -> Self {
        let mut order = self.order.clone();
        order.swap(j, j + 1);
        ParabolicSpec { order }
    }

    /// Union of the first `i` blocks.
    pub fn prefix(&self, i: usize) -> Vec<usize> {
        self.order[..i].iter().flatten().copied().collect()
    }

    /// `ϖ_{P,i}^∨`: the projection of `Σ_{j ∈ prefix(i)} e_j` to the derived part.
    pub fn fundamental_coweight(&self, i: usize) -> CoweightVector {
        let n = self.n();
        let s = self.prefix(i);
        let mut v = CoweightVector::zero(n);
        for &j in &s {
            v.0[j] = rat(1);
        }
        v.to_derived()
    }

    /// Projection of the simple coroot between blocks `j` and `j+1` to `a_M`.
    pub fn simple_coroot_image(&self, j: usize) -> CoweightVector {
        let n = self.n();
        let mut v = CoweightVector::zero(n);
        let (x, y) = (&self.order[j], &self.order[j + 1]);
        for &i in x {
            v.0[i] = Rat::new(1, x.len() as i64);
        }
        for &i in y {
            v.0[i] = Rat::new(-1, y.len() as i64);
        }
        v
    }

    /// Semisimple rank of the Levi.
    pub fn ss_rank(&self) -> usize {
        self.n() - self.order.len()
    }
}

impl fmt::Display for ParabolicSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.key())
    }
}

/// An element of `Λ_M`, stored as block sums.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LambdaElement {
    pub levi: LeviSpec,
    pub values: Vec<i64>,
}

impl LambdaElement {
    pub fn new(levi: LeviSpec, values: Vec<i64>) -> Result<Self> {
        if values.len() != levi.num_blocks() {
            return Err(Error::InvalidParams("one value per block required".into()));
        }
        Ok(LambdaElement { levi, values })
    }

    pub fn from_coweight(levi: &LeviSpec, v: &CoweightVector) -> Result<Self> {
        let sums = levi.block_sums(v);
        if sums.iter().any(|s| !s.is_integer()) {
            return Err(Error::InvalidParams(format!("{v} is not in the lattice")));
        }
        Ok(LambdaElement { levi: levi.clone(), values: sums.iter().map(|s| s.to_integer()).collect() })
    }

    /// Image in `Λ_G`.
    pub fn total(&self) -> i64 {
        self.values.iter().sum()
    }

    /// `c_M` to `Λ_{M^ad}`.
    pub fn class(&self) -> Vec<i64> {
        self.levi.class_of(&self.values)
    }

    pub fn to_coweight(&self) -> CoweightVector {
        self.levi.lambda_to_coweight(&self.values)
    }

    /// Image in `Λ_L` for `L ⊇ M`.
    pub fn push_forward(&self, l: &LeviSpec) -> LambdaElement {
        let v = self.to_coweight();
        LambdaElement::from_coweight(l, &v).unwrap()
    }
}

/// `(π_M(v), π^M(v))`.
pub fn project(m: &LeviSpec, v: &CoweightVector) -> (CoweightVector, CoweightVector) {
    let c = m.project_center(v);
    let d = v - &c;
    (c, d)
}

/// `β_{P1,P2}`: image in `a_M` of the coroots positive for `P1` and negative for `P2`.
pub fn beta(p1: &ParabolicSpec, p2: &ParabolicSpec) -> Result<CoweightVector> {
    match p1.adjacency(p2) {
        Some(j) => Ok(p1.simple_coroot_image(j)),
        None => Err(Error::NotAdjacent(format!("{p1} and {p2}"))),
    }
}

/// `m_α` with `image(α^∨) = m_α · β_{P1,P2}` in `Λ_{M0}`.
pub fn m_alpha(m0: &LeviSpec, p1: &ParabolicSpec, p2: &ParabolicSpec, alpha: Root) -> Result<i64> {
    if p1.levi() != *m0 || p2.levi() != *m0 {
        return Err(Error::InvalidParams("parabolics must have Levi M0".into()));
    }
    let b = beta(p1, p2)?;
    if !(p1.in_unipotent(alpha) && !p2.in_unipotent(alpha)) {
        return Err(Error::RootNotInWedge(alpha.to_string()));
    }
    let img = m0.project_center(&alpha.coroot(m0.n));
    let k = (0..m0.n).find(|&i| !b.0[i].is_zero()).unwrap();
    let ratio = img.0[k] / b.0[k];
    if img != b.scale(ratio) || !ratio.is_integer() || !ratio.is_positive() {
        return Err(Error::RootNotInWedge(alpha.to_string()));
    }
    Ok(ratio.to_integer())
}
