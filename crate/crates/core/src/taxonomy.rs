//! Interval taxonomy: per-attribute containment DAGs joined under one
//! artificial `ALL` root.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::binning::Interval;
use crate::dataset::AttrId;

#[derive(Debug, Error, PartialEq)]
pub enum TaxonomyError {
    #[error("attribute {0:?} has more than one sub-taxonomy")]
    DuplicateAttribute(AttrId),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeId(pub u32);

impl NodeId {
    pub const ALL: NodeId = NodeId(0);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum NodePayload {
    All,
    AttributeInterval { attr: AttrId, interval: Interval },
}

#[derive(Clone, Debug, PartialEq)]
pub struct TaxonomyNode {
    pub id: NodeId,
    pub payload: NodePayload,
}

/// Strict containment order: `b ≺ b2` iff `b` contains `b2` and they differ.
pub fn precedes(b: &Interval, b2: &Interval) -> bool {
    (b.lo() != b2.lo() || b.hi() != b2.hi()) && b.lo() <= b2.lo() && b.hi() >= b2.hi()
}

/// Hasse diagram of `≺` over one attribute's intervals.
#[derive(Clone, Debug, PartialEq)]
pub struct AttributeTaxonomy {
    pub attr: AttrId,
    pub intervals: Vec<Interval>,
    /// Parent → child, as indices into `intervals`.
    pub edges: Vec<(usize, usize)>,
    /// `≺`-maximal intervals. A single entry unless the interval set lacks a
    /// spanning interval.
    pub roots: Vec<usize>,
}

/// Builds the sub-DAG for one attribute. Intervals are assumed deduplicated;
/// exact duplicates would simply be incomparable siblings.
pub fn build_attribute_taxonomy(attr: AttrId, intervals: Vec<Interval>) -> AttributeTaxonomy {
    let n = intervals.len();
    let prec: Vec<Vec<bool>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| precedes(&intervals[i], &intervals[j]))
                .collect()
        })
        .collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if prec[i][j] && !(0..n).any(|k| prec[i][k] && prec[k][j]) {
                edges.push((i, j));
            }
        }
    }
    let roots = (0..n).filter(|&j| !(0..n).any(|i| prec[i][j])).collect();
    AttributeTaxonomy {
        attr,
        intervals,
        edges,
        roots,
    }
}

/// The merged taxonomy. Node 0 is `ALL`.
#[derive(Clone, Debug)]
pub struct Taxonomy {
    nodes: Vec<TaxonomyNode>,
    children: Vec<Vec<NodeId>>,
    parents: Vec<Vec<NodeId>>,
    attr_nodes: BTreeMap<AttrId, Vec<NodeId>>,
    attr_roots: BTreeMap<AttrId, Vec<NodeId>>,
}

impl Default for Taxonomy {
    fn default() -> Self {
        Taxonomy {
            nodes: vec![TaxonomyNode {
                id: NodeId::ALL,
                payload: NodePayload::All,
            }],
            children: vec![Vec::new()],
            parents: vec![Vec::new()],
            attr_nodes: BTreeMap::new(),
            attr_roots: BTreeMap::new(),
        }
    }
}

/// Joins per-attribute sub-DAGs under a fresh `ALL` root.
pub fn merge_taxonomies(subs: Vec<AttributeTaxonomy>) -> Result<Taxonomy, TaxonomyError> {
    let mut tax = Taxonomy::default();
    for sub in subs {
        if tax.attr_nodes.contains_key(&sub.attr) {
            return Err(TaxonomyError::DuplicateAttribute(sub.attr));
        }
        let base = tax.nodes.len();
        let ids: Vec<NodeId> = (0..sub.intervals.len())
            .map(|i| NodeId((base + i) as u32))
            .collect();
        for (i, iv) in sub.intervals.iter().enumerate() {
            tax.nodes.push(TaxonomyNode {
                id: ids[i],
                payload: NodePayload::AttributeInterval {
                    attr: sub.attr,
                    interval: *iv,
                },
            });
            tax.children.push(Vec::new());
            tax.parents.push(Vec::new());
        }
        for &(p, c) in &sub.edges {
            tax.link(ids[p], ids[c]);
        }
        let roots: Vec<NodeId> = sub.roots.iter().map(|&r| ids[r]).collect();
        for &r in &roots {
            tax.link(NodeId::ALL, r);
        }
        tax.attr_nodes.insert(sub.attr, ids);
        tax.attr_roots.insert(sub.attr, roots);
    }
    Ok(tax)
}

impl Taxonomy {
    fn link(&mut self, parent: NodeId, child: NodeId) {
        self.children[parent.index()].push(child);
        self.parents[child.index()].push(parent);
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.len() == 1
    }

    pub fn nodes(&self) -> &[TaxonomyNode] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &TaxonomyNode {
        &self.nodes[id.index()]
    }

    /// Attribute and interval of a non-root node.
    pub fn interval(&self, id: NodeId) -> Option<(AttrId, &Interval)> {
        match &self.nodes[id.index()].payload {
            NodePayload::AttributeInterval { attr, interval } => Some((*attr, interval)),
            NodePayload::All => None,
        }
    }

    pub fn children(&self, id: NodeId) -> &[NodeId] {
        &self.children[id.index()]
    }

    pub fn parents(&self, id: NodeId) -> &[NodeId] {
        &self.parents[id.index()]
    }

    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.children
            .iter()
            .enumerate()
            .flat_map(|(p, cs)| cs.iter().map(move |&c| (NodeId(p as u32), c)))
    }

    pub fn attributes(&self) -> impl Iterator<Item = AttrId> + '_ {
        self.attr_nodes.keys().copied()
    }

    /// All interval nodes of one attribute (empty when it has none).
    pub fn attribute_nodes(&self, attr: AttrId) -> &[NodeId] {
        self.attr_nodes.get(&attr).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn attribute_roots(&self, attr: AttrId) -> &[NodeId] {
        self.attr_roots.get(&attr).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Every interval of `attr` containing `value`.
    pub fn ancestors(&self, attr: AttrId, value: f64) -> Vec<NodeId> {
        self.attribute_nodes(attr)
            .iter()
            .copied()
            .filter(|&id| self.interval(id).is_some_and(|(_, iv)| iv.contains(value)))
            .collect()
    }

    /// True when `a` is a strict taxonomy ancestor of `b`.
    pub fn is_ancestor(&self, a: NodeId, b: NodeId) -> bool {
        match (self.interval(a), self.interval(b)) {
            (Some((x, ia)), Some((y, ib))) => x == y && precedes(ia, ib),
            (None, Some(_)) => true,
            _ => false,
        }
    }

    /// Graphviz rendering; `name` labels attributes.
    pub fn to_dot(&self, name: impl Fn(AttrId) -> String) -> String {
        let mut out =
            String::from("digraph taxonomy {\n  node [shape=box];\n  n0 [label=\"ALL\"];\n");
        for node in &self.nodes[1..] {
            if let NodePayload::AttributeInterval { attr, interval } = &node.payload {
                let _ = writeln!(
                    out,
                    "  n{} [label=\"{} {}\"];",
                    node.id.0,
                    name(*attr).replace('"', "\\\""),
                    interval
                );
            }
        }
        for (p, c) in self.edges() {
            let _ = writeln!(out, "  n{} -> n{};", p.0, c.0);
        }
        out.push_str("}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binning::BinMethod;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi, BinMethod::EqualWidth).unwrap()
    }

    fn edge_ranges(t: &AttributeTaxonomy) -> Vec<((f64, f64), (f64, f64))> {
        let r = |i: usize| (t.intervals[i].lo(), t.intervals[i].hi());
        let mut e: Vec<_> = t.edges.iter().map(|&(p, c)| (r(p), r(c))).collect();
        e.sort_by(|a, b| a.partial_cmp(b).unwrap());
        e
    }

    #[test]
    fn precedes_examples() {
        assert!(precedes(&iv(0.0, 10.0), &iv(2.0, 5.0)));
        assert!(!precedes(&iv(0.0, 10.0), &iv(0.0, 10.0)));
        assert!(precedes(&iv(16.0, 53.0), &iv(16.0, 35.0)));
        assert!(!precedes(&iv(16.0, 35.0), &iv(16.0, 53.0)));
    }

    #[test]
    fn simple_hasse() {
        let t =
            build_attribute_taxonomy(AttrId(0), vec![iv(0.0, 10.0), iv(0.0, 5.0), iv(5.0, 10.0)]);
        assert_eq!(
            edge_ranges(&t),
            vec![((0.0, 10.0), (0.0, 5.0)), ((0.0, 10.0), (5.0, 10.0))]
        );
        assert_eq!(t.roots, vec![0]);
    }

    #[test]
    fn transitive_edge_absent() {
        let t = build_attribute_taxonomy(
            AttrId(0),
            vec![iv(0.0, 10.0), iv(0.0, 6.0), iv(0.0, 5.0), iv(5.0, 10.0)],
        );
        assert_eq!(
            edge_ranges(&t),
            vec![
                ((0.0, 6.0), (0.0, 5.0)),
                ((0.0, 10.0), (0.0, 6.0)),
                ((0.0, 10.0), (5.0, 10.0)),
            ]
        );
    }

    #[test]
    fn single_interval() {
        let t = build_attribute_taxonomy(AttrId(0), vec![iv(16.0, 90.0)]);
        assert!(t.edges.is_empty());
        assert_eq!(t.roots, vec![0]);
    }

    #[test]
    fn merge_two_attributes() {
        let age = build_attribute_taxonomy(AttrId(0), vec![iv(16.0, 90.0), iv(16.0, 35.0)]);
        let edu = build_attribute_taxonomy(AttrId(1), vec![iv(1.0, 16.0), iv(4.0, 13.0)]);
        let tax = merge_taxonomies(vec![age, edu]).unwrap();
        assert_eq!(tax.children(NodeId::ALL).len(), 2);
        for &r in tax.children(NodeId::ALL) {
            assert_eq!(tax.children(r).len(), 1);
        }
        assert_eq!(tax.len(), 5);
        assert_eq!(tax.attribute_roots(AttrId(1)).len(), 1);
    }

    #[test]
    fn merge_edge_cases() {
        let tax = merge_taxonomies(vec![]).unwrap();
        assert!(tax.is_empty());
        assert_eq!(tax.len(), 1);

        let one = build_attribute_taxonomy(AttrId(3), vec![iv(0.0, 10.0), iv(0.0, 5.0)]);
        let tax = merge_taxonomies(vec![one.clone()]).unwrap();
        assert_eq!(tax.children(NodeId::ALL).len(), 1);
        assert_eq!(
            merge_taxonomies(vec![one.clone(), one]).unwrap_err(),
            TaxonomyError::DuplicateAttribute(AttrId(3))
        );
    }

    #[test]
    fn missing_span_gives_several_roots() {
        let t = build_attribute_taxonomy(AttrId(0), vec![iv(0.0, 5.0), iv(4.0, 10.0)]);
        assert_eq!(t.roots, vec![0, 1]);
        let tax = merge_taxonomies(vec![t]).unwrap();
        assert_eq!(tax.children(NodeId::ALL).len(), 2);
    }

    #[test]
    fn ancestors_by_containment() {
        let t =
            build_attribute_taxonomy(AttrId(0), vec![iv(0.0, 10.0), iv(0.0, 5.0), iv(5.0, 10.0)]);
        let tax = merge_taxonomies(vec![t]).unwrap();
        let ranges = |ids: Vec<NodeId>| -> Vec<(f64, f64)> {
            ids.iter()
                .map(|&id| {
                    let (_, iv) = tax.interval(id).unwrap();
                    (iv.lo(), iv.hi())
                })
                .collect()
        };
        assert_eq!(
            ranges(tax.ancestors(AttrId(0), 3.0)),
            vec![(0.0, 10.0), (0.0, 5.0)]
        );
        assert_eq!(
            ranges(tax.ancestors(AttrId(0), 5.0)),
            vec![(0.0, 10.0), (0.0, 5.0), (5.0, 10.0)]
        );
        assert!(tax.ancestors(AttrId(0), 11.0).is_empty());
        assert!(tax.ancestors(AttrId(9), 1.0).is_empty());
    }

    #[test]
    fn age_fixture_ancestors() {
        let intervals = vec![
            iv(16.0, 90.0),
            iv(16.0, 53.0),
            iv(16.0, 48.0),
            iv(16.0, 35.0),
            iv(36.0, 90.0),
        ];
        let tax =
            merge_taxonomies(vec![build_attribute_taxonomy(AttrId(0), intervals.clone())]).unwrap();
        let got: Vec<usize> = tax
            .ancestors(AttrId(0), 25.0)
            .iter()
            .map(|id| id.index() - 1)
            .collect();
        let want: Vec<usize> = (0..intervals.len())
            .filter(|&i| intervals[i].contains(25.0))
            .collect();
        assert_eq!(got, want);
        assert!(got.contains(&2) && got.contains(&3));
    }

    #[test]
    fn dot_export_mentions_every_edge() {
        let t = build_attribute_taxonomy(AttrId(0), vec![iv(0.0, 10.0), iv(0.0, 5.0)]);
        let tax = merge_taxonomies(vec![t]).unwrap();
        let dot = tax.to_dot(|_| "age".into());
        assert!(dot.contains("n0 -> n1;") && dot.contains("n1 -> n2;"));
        assert!(dot.contains("age [0, 5]"));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn interval() -> impl Strategy<Value = Interval> {
            (0u8..12, 1u8..12).prop_map(|(lo, w)| iv(f64::from(lo), f64::from(lo) + f64::from(w)))
        }

        proptest! {
            #[test]
            fn strict_partial_order(a in interval(), b in interval(), c in interval()) {
                prop_assert!(!precedes(&a, &a));
                prop_assert!(!(precedes(&a, &b) && precedes(&b, &a)));
                if precedes(&a, &b) && precedes(&b, &c) {
                    prop_assert!(precedes(&a, &c));
                }
            }

            #[test]
            fn edges_are_transitive_reduction(ivs in proptest::collection::vec(interval(), 1..20)) {
                let mut ivs = ivs;
                ivs.sort_by(Interval::cmp_range);
                ivs.dedup_by(|a, b| a.same_range(b));
                let n = ivs.len();
                let t = build_attribute_taxonomy(AttrId(0), ivs.clone());

                // closure of the Hasse edges must reproduce ≺, and no edge may be implied
                let mut reach = vec![vec![false; n]; n];
                for &(p, c) in &t.edges {
                    reach[p][c] = true;
                }
                for k in 0..n {
                    for i in 0..n {
                        for j in 0..n {
                            if reach[i][k] && reach[k][j] {
                                reach[i][j] = true;
                            }
                        }
                    }
                }
                for i in 0..n {
                    for j in 0..n {
                        prop_assert_eq!(reach[i][j], precedes(&ivs[i], &ivs[j]));
                    }
                }
                for &(p, c) in &t.edges {
                    let implied = (0..n).any(|k| k != p && k != c && reach[p][k] && reach[k][c]);
                    prop_assert!(!implied);
                }
            }

            #[test]
            fn ancestors_upward_closed(ivs in proptest::collection::vec(interval(), 1..15), v in 0u8..24) {
                let mut ivs = ivs;
                ivs.sort_by(Interval::cmp_range);
                ivs.dedup_by(|a, b| a.same_range(b));
                let tax = merge_taxonomies(vec![build_attribute_taxonomy(AttrId(0), ivs)]).unwrap();
                let anc = tax.ancestors(AttrId(0), f64::from(v));
                for &b in &anc {
                    for &other in tax.attribute_nodes(AttrId(0)) {
                        if tax.is_ancestor(other, b) {
                            prop_assert!(anc.contains(&other));
                        }
                    }
                }
            }
        }
    }
}
