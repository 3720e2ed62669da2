//! Formal Betti numbers of moment graphs under total orders, and their minimum over orders.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qpoly::TPoly;

/// Default vertex cap for the exhaustive minimizer.
pub const EXHAUSTIVE_CAP: usize = 10;
/// Default node budget for branch and bound.
pub const BNB_BUDGET: u64 = 200_000_000;

/// A simple graph on vertices `0..n`, with display labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MomentGraph {
    pub labels: Vec<String>,
    pub edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    vertices: Vec<serde_json::Value>,
    edges: Vec<(serde_json::Value, serde_json::Value)>,
}

fn label(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

impl MomentGraph {
    pub fn new(labels: Vec<String>, edges: &[(usize, usize)]) -> Result<Self> {
        let n = labels.len();
        let mut adj = vec![Vec::new(); n];
        let mut es = Vec::new();
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidParams(format!("edge ({u}, {v}) out of range")));
            }
            if u == v {
                return Err(Error::InvalidParams(format!("self-loop at {}", labels[u])));
            }
            if adj[u].contains(&v) {
                return Err(Error::InvalidParams(format!("repeated edge {}-{}", labels[u], labels[v])));
            }
            adj[u].push(v);
            adj[v].push(u);
            es.push((u.min(v), u.max(v)));
        }
        Ok(MomentGraph { labels, edges: es, adj })
    }

    /// Graph on `0..n` labelled by index.
    pub fn unlabelled(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Self::new((0..n).map(|i| i.to_string()).collect(), edges)
    }

    pub fn complete(n: usize) -> Self {
        let e: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        Self::unlabelled(n, &e).unwrap()
    }

    pub fn path(n: usize) -> Self {
        let e: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
        Self::unlabelled(n, &e).unwrap()
    }

    pub fn num_vertices(&self) -> usize {
        self.labels.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    /// Reads `{vertices: [...], edges: [[u, v], ...]}`; edge ends name vertices.
    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let j: GraphJson = serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        let labels: Vec<String> = j.vertices.iter().map(label).collect();
        let find = |x: &serde_json::Value| {
            let l = label(x);
            labels.iter().position(|y| *y == l).ok_or_else(|| Error::Parse(format!("unknown vertex {l}")))
        };
        let edges: Vec<(usize, usize)> =
            j.edges.iter().map(|(a, b)| Ok((find(a)?, find(b)?))).collect::<Result<_>>()?;
        Self::new(labels, &edges)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "vertices": self.labels,
            "edges": self.edges.iter().map(|&(u, v)| [&self.labels[u], &self.labels[v]]).collect::<Vec<_>>(),
        })
    }
}

/// A total order, listed from the smallest vertex to the greatest.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct OrientedOrder(pub Vec<usize>);

impl OrientedOrder {
    pub fn identity(n: usize) -> Self {
        OrientedOrder((0..n).collect())
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let mut seen = vec![false; n];
        for &v in &self.0 {
            if v >= n || std::mem::replace(&mut seen[v], true) {
                return Err(Error::InvalidParams(format!("{:?} is not an order on {n} vertices", self.0)));
            }
        }
        if self.0.len() != n {
            return Err(Error::InvalidParams(format!("{:?} is not an order on {n} vertices", self.0)));
        }
        Ok(())
    }

    fn ranks(&self) -> Vec<usize> {
        let mut r = vec![0; self.0.len()];
        for (i, &v) in self.0.iter().enumerate() {
            r[v] = i;
        }
        r
    }
}

/// `b_{2i}` as a vector indexed by `i`.
pub type Betti = Vec<u32>;

/// Out-degree of each vertex: edges point from the greater end to the smaller.
pub fn out_degrees(g: &MomentGraph, o: &OrientedOrder) -> Vec<usize> {
    let r = o.ranks();
    (0..g.num_vertices()).map(|v| g.neighbors(v).iter().filter(|&&u| r[u] < r[v]).count()).collect()
}

pub fn betti_numbers(g: &MomentGraph, o: &OrientedOrder) -> Betti {
    let mut b = vec![0u32; g.num_vertices().max(1)];
    for d in out_degrees(g, o) {
        b[d] += 1;
    }
    trim(b)
}

fn trim(mut b: Betti) -> Betti {
    while b.len() > 1 && *b.last().unwrap() == 0 {
        b.pop();
    }
    b
}

pub fn betti_to_tpoly(b: &[u32]) -> TPoly {
    TPoly::from_terms(b.iter().enumerate().map(|(i, &c)| (2 * i as i32, c as i64)))
}

pub fn formal_poincare(g: &MomentGraph, o: &OrientedOrder) -> Result<TPoly> {
    o.validate(g.num_vertices())?;
    Ok(betti_to_tpoly(&betti_numbers(g, o)))
}

/// `p1 < p2` when the leading coefficient of `p2 - p1` is positive.
pub fn poly_less(p1: &TPoly, p2: &TPoly) -> bool {
    let d = p2 - p1;
    !d.is_zero() && d.leading_coeff() > 0
}

/// The same order on Betti vectors.
pub fn betti_cmp(a: &[u32], b: &[u32]) -> Ordering {
    let n = a.len().max(b.len());
    for i in (0..n).rev() {
        let (x, y) = (a.get(i).copied().unwrap_or(0), b.get(i).copied().unwrap_or(0));
        if x != y {
            return x.cmp(&y);
        }
    }
    Ordering::Equal
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinResult {
    pub poly: TPoly,
    pub betti: Betti,
    /// Lexicographically least order attaining the minimum.
    pub witness: OrientedOrder,
    pub nodes: u64,
}

fn better(b: &Betti, o: &OrientedOrder, best: &Option<(Betti, OrientedOrder)>) -> bool {
    match best {
        None => true,
        Some((bb, bo)) => match betti_cmp(b, bb) {
            Ordering::Less => true,
            Ordering::Equal => o < bo,
            Ordering::Greater => false,
        },
    }
}

fn finish(best: Option<(Betti, OrientedOrder)>, nodes: u64) -> MinResult {
    let (betti, witness) = best.unwrap_or((vec![0], OrientedOrder(vec![])));
    MinResult { poly: betti_to_tpoly(&betti), betti, witness, nodes }
}

/// Minimum over all `n!` orders, for `n <= cap`.
pub fn min_formal_poincare_exhaustive(g: &MomentGraph, cap: usize) -> Result<MinResult> {
    let n = g.num_vertices();
    if n > cap {
        let est: u128 = (1..=n as u128).product();
        return Err(Error::BudgetExceeded { estimate: est, cap: (1..=cap as u128).product() });
    }
    if n == 0 {
        return Ok(finish(None, 0));
    }
    let parts: Vec<(Option<(Betti, OrientedOrder)>, u64)> = (0..n)
        .into_par_iter()
        .map(|first| {
            let mut rest: Vec<usize> = (0..n).filter(|&v| v != first).collect();
            let mut best = None;
            let mut nodes = 0u64;
            loop {
                let mut order = vec![first];
                order.extend(&rest);
                let o = OrientedOrder(order);
                let b = betti_numbers(g, &o);
                nodes += 1;
                if better(&b, &o, &best) {
                    best = Some((b, o));
                }
                if !next_permutation(&mut rest) {
                    break;
                }
            }
            (best, nodes)
        })
        .collect();
    let mut best = None;
    let mut nodes = 0;
    for (b, k) in parts {
        nodes += k;
        if let Some((bb, o)) = b {
            if better(&bb, &o, &best) {
                best = Some((bb, o));
            }
        }
    }
    Ok(finish(best, nodes))
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let Some(i) = (0..v.len() - 1).rev().find(|&i| v[i] < v[i + 1]) else {
        return false;
    };
    let j = (i + 1..v.len()).rev().find(|&j| v[j] > v[i]).unwrap();
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}

struct Bnb<'g> {
    g: &'g MomentGraph,
    budget: u64,
    nodes: u64,
    best: Option<(Betti, OrientedOrder)>,
}

impl Bnb<'_> {
    /// Places vertices from the greatest down; a placed vertex's out-degree is its number of
    /// unplaced neighbours, so partial Betti vectors only grow.
    fn rec(&mut self, placed_top: &mut Vec<usize>, remaining: &mut Vec<bool>, partial: &mut Betti) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::BudgetExceeded { estimate: self.nodes as u128, cap: self.budget as u128 });
        }
        let n = self.g.num_vertices();
        let left = n - placed_top.len();
        if left == 0 {
            let mut order = placed_top.clone();
            order.reverse();
            let o = OrientedOrder(order);
            let b = trim(partial.clone());
            if better(&b, &o, &self.best) {
                self.best = Some((b, o));
            }
            return Ok(());
        }
        if let Some((bb, _)) = &self.best {
            // completing adds `left` more vertices, each in some degree
            if betti_cmp(partial, bb) != Ordering::Less {
                return Ok(());
            }
        }
        for v in 0..n {
            if !remaining[v] {
                continue;
            }
            let deg = self.g.neighbors(v).iter().filter(|&&u| remaining[u] && u != v).count();
            remaining[v] = false;
            partial[deg] += 1;
            placed_top.push(v);
            self.rec(placed_top, remaining, partial)?;
            placed_top.pop();
            partial[deg] -= 1;
            remaining[v] = true;
        }
        Ok(())
    }
}

/// Branch and bound over orders built from the top; same result as the exhaustive search.
pub fn min_formal_poincare_bnb(g: &MomentGraph, budget: u64) -> Result<MinResult> {
    let n = g.num_vertices();
    if n == 0 {
        return Ok(finish(None, 0));
    }
    // a greedy start: repeatedly put on top the vertex with fewest unplaced neighbours
    let mut remaining = vec![true; n];
    let mut top = Vec::new();
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| remaining[v])
            .min_by_key(|&v| g.neighbors(v).iter().filter(|&&u| remaining[u]).count())
            .unwrap();
        remaining[v] = false;
        top.push(v);
    }
    top.reverse();
    let seed = OrientedOrder(top);
    let seed_b = betti_numbers(g, &seed);
    let parts: Vec<Result<(Option<(Betti, OrientedOrder)>, u64)>> = (0..n)
        .into_par_iter()
        .map(|first| {
            let mut s = Bnb { g, budget, nodes: 0, best: Some((seed_b.clone(), seed.clone())) };
            let mut remaining = vec![true; n];
            let mut partial = vec![0u32; n];
            let deg = g.neighbors(first).len();
            remaining[first] = false;
            partial[deg] += 1;
            let mut placed = vec![first];
            s.rec(&mut placed, &mut remaining, &mut partial)?;
            Ok((s.best, s.nodes))
        })
        .collect();
    let mut best = Some((seed_b, seed));
    let mut nodes = 0;
    for p in parts {
        let (b, k) = p?;
        nodes += k;
        if let Some((bb, o)) = b {
            if better(&bb, &o, &best) {
                best = Some((bb, o));
            }
        }
    }
    // the pruning discards ties; recover the least witness among orders with the optimal vector
    let (bb, _) = best.clone().unwrap();
    let witness = least_witness(g, &bb, budget)?;
    Ok(MinResult { poly: betti_to_tpoly(&bb), betti: bb, witness, nodes })
}

/// Lexicographically least order (smallest vertex first) with the given Betti vector.
fn least_witness(g: &MomentGraph, target: &Betti, budget: u64) -> Result<OrientedOrder> {
    let n = g.num_vertices();
    let mut order = Vec::with_capacity(n);
    let mut used = vec![false; n];
    let mut counts = vec![0u32; n];
    let mut nodes = 0u64;
    // placing from the bottom: a vertex's out-degree is its number of already placed neighbours
    fn go(
        g: &MomentGraph,
        target: &Betti,
        order: &mut Vec<usize>,
        used: &mut Vec<bool>,
        counts: &mut Vec<u32>,
        nodes: &mut u64,
        budget: u64,
    ) -> Result<bool> {
        *nodes += 1;
        if *nodes > budget {
            return Err(Error::BudgetExceeded { estimate: *nodes as u128, cap: budget as u128 });
        }
        let n = g.num_vertices();
        if order.len() == n {
            return Ok(true);
        }
        for v in 0..n {
            if used[v] {
                continue;
            }
            let d = g.neighbors(v).iter().filter(|&&u| used[u]).count();
            if counts[d] + 1 > target.get(d).copied().unwrap_or(0) {
                continue;
            }
            used[v] = true;
            counts[d] += 1;
            order.push(v);
            if go(g, target, order, used, counts, nodes, budget)? {
                return Ok(true);
            }
            order.pop();
            counts[d] -= 1;
            used[v] = false;
        }
        Ok(false)
    }
    if go(g, target, &mut order, &mut used, &mut counts, &mut nodes, budget)? {
        Ok(OrientedOrder(order))
    } else {
        Err(Error::InconsistentPipelines("no order attains the minimal Betti vector".into()))
    }
}

/// Exhaustive up to [`EXHAUSTIVE_CAP`] vertices, branch and bound beyond.
pub fn min_formal_poincare(g: &MomentGraph) -> Result<MinResult> {
    if g.num_vertices() <= EXHAUSTIVE_CAP {
        min_formal_poincare_exhaustive(g, EXHAUSTIVE_CAP)
    } else {
        min_formal_poincare_bnb(g, BNB_BUDGET)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> TPoly {
        s.parse().unwrap()
    }

    #[test]
    fn small_graphs() {
        let one = MomentGraph::unlabelled(1, &[]).unwrap();
        assert_eq!(formal_poincare(&one, &OrientedOrder::identity(1)).unwrap(), t("1"));
        let edge = MomentGraph::path(2);
        for o in [vec![0, 1], vec![1, 0]] {
            assert_eq!(formal_poincare(&edge, &OrientedOrder(o)).unwrap(), t("1 + t^2"));
        }
        let tri = MomentGraph::complete(3);
        let mut p = vec![0, 1, 2];
        loop {
            assert_eq!(formal_poincare(&tri, &OrientedOrder(p.clone())).unwrap(), t("1 + t^2 + t^4"));
            if !next_permutation(&mut p) {
                break;
            }
        }
    }

    #[test]
    fn minima() {
        let p3 = MomentGraph::path(3);
        let m = min_formal_poincare(&p3).unwrap();
        assert_eq!(m.poly, t("1 + 2*t^2"));
        assert_eq!(m.witness, OrientedOrder(vec![0, 1, 2]));
        assert_eq!(betti_numbers(&p3, &OrientedOrder(vec![0, 2, 1])), vec![2, 0, 1]);
        for n in 1..=6 {
            let want = TPoly::from_terms((0..n as i32).map(|i| (2 * i, 1)));
            assert_eq!(min_formal_poincare(&MomentGraph::complete(n)).unwrap().poly, want);
        }
        let empty = MomentGraph::unlabelled(4, &[]).unwrap();
        assert_eq!(min_formal_poincare(&empty).unwrap().poly, t("4"));
    }

    #[test]
    fn ordering_of_polynomials() {
        assert!(poly_less(&t("1 + t^2"), &t("2 + t^4")));
        assert!(!poly_less(&t("1 + t^2"), &t("1 + t^2")));
        assert!(poly_less(&t("3*t^2"), &t("t^2 + t^4")));
        assert!(!poly_less(&t("t^2 + t^4"), &t("3*t^2")));
    }

    #[test]
    fn bnb_matches_exhaustive_on_a_cycle() {
        let e: Vec<(usize, usize)> = (0..6).map(|i| (i, (i + 1) % 6)).collect();
        let g = MomentGraph::unlabelled(6, &e).unwrap();
        let a = min_formal_poincare_exhaustive(&g, 10).unwrap();
        let b = min_formal_poincare_bnb(&g, BNB_BUDGET).unwrap();
        assert_eq!((a.poly, a.witness), (b.poly, b.witness));
    }

    #[test]
    fn json_and_validation() {
        let v = serde_json::json!({"vertices": ["a", "b", "c"], "edges": [["a", "b"], ["b", "c"]]});
        let g = MomentGraph::from_json(&v).unwrap();
        assert_eq!(g, MomentGraph::new(vec!["a".into(), "b".into(), "c".into()], &[(0, 1), (1, 2)]).unwrap());
        assert_eq!(MomentGraph::from_json(&g.to_json()).unwrap(), g);
        assert!(MomentGraph::unlabelled(2, &[(0, 0)]).is_err());
        assert!(MomentGraph::unlabelled(2, &[(0, 1), (1, 0)]).is_err());
        assert!(min_formal_poincare_exhaustive(&MomentGraph::complete(4), 3).is_err());
        assert!(OrientedOrder(vec![0, 0]).validate(2).is_err());
    }
}
