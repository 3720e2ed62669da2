//! Fixed inputs shared by the benchmarks.

use orbint_core::{CountRequest, FundamentalDomainTable, MomentGraph, RegularElementSpec};

pub const SPLIT_CASES: [(u32, u32); 3] = [(1, 1), (1, 2), (2, 2)];

pub fn split(n1: u32, n2: u32) -> RegularElementSpec {
    RegularElementSpec::Gl3Split { n1, n2 }
}

/// A request well inside the regular range, with its fundamental-domain table.
pub fn regular_request(spec: RegularElementSpec, a: &[i64]) -> (CountRequest, FundamentalDomainTable) {
    let req = CountRequest::new(spec, a).expect("valid request");
    let table = FundamentalDomainTable::from_closed_forms(&spec).expect("table");
    (req, table)
}

/// `C_n` with the chords `(i, i + 2)`.
pub fn chorded_cycle(n: usize) -> MomentGraph {
    let mut edges: Vec<(usize, usize)> = (0..n).map(|i| (i.min((i + 1) % n), i.max((i + 1) % n))).collect();
    edges.extend((0..n.saturating_sub(2)).step_by(2).map(|i| (i, i + 2)));
    edges.sort();
    edges.dedup();
    MomentGraph::unlabelled(n, &edges).expect("simple graph")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inputs_are_valid() {
        let (req, table) = regular_request(split(1, 2), &[10, 11]);
        assert!(orbint_core::ak_count(&req, &table).is_ok());
        assert_eq!(chorded_cycle(6).num_vertices(), 6);
    }
}
