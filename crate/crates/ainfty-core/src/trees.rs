//! Rooted planar trees, grafting, enumeration, and cyclic (root-forgotten)
//! classes with their symmetry factors.
//!
//! A `k`-tree has `k` leaves and every internal vertex has at least two
//! children (at least three incident edges). Trees are ordered canonically
//! (recursively by child count, then children), so enumeration order and
//! all derived sums are reproducible.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::scalar::Scalar;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PlanarTree {
    Leaf,
    Vertex(Vec<PlanarTree>),
}

impl Ord for PlanarTree {
    fn cmp(&self, other: &Self) -> Ordering {
        use PlanarTree::*;
        match (self, other) {
            (Leaf, Leaf) => Ordering::Equal,
            (Leaf, Vertex(_)) => Ordering::Less,
            (Vertex(_), Leaf) => Ordering::Greater,
            (Vertex(a), Vertex(b)) => a
                .len()
                .cmp(&b.len())
                .then_with(|| a.cmp(b)),
        }
    }
}

impl PartialOrd for PlanarTree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PlanarTree {
    pub fn corolla(k: usize) -> PlanarTree {
        assert!(k >= 2);
        PlanarTree::Vertex(alloc::vec![PlanarTree::Leaf; k])
    }

    pub fn leaves(&self) -> usize {
        match self {
            PlanarTree::Leaf => 1,
            PlanarTree::Vertex(children) => children.iter().map(|c| c.leaves()).sum(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        match self {
            PlanarTree::Leaf => 0,
            PlanarTree::Vertex(children) => {
                1 + children.iter().map(|c| c.vertex_count()).sum::<usize>()
            }
        }
    }

    pub fn internal_edges(&self) -> usize {
        match self {
            PlanarTree::Leaf => 0,
            PlanarTree::Vertex(children) => children
                .iter()
                .map(|c| match c {
                    PlanarTree::Leaf => 0,
                    PlanarTree::Vertex(_) => 1 + c.internal_edges(),
                })
                .sum(),
        }
    }

    /// Incident edge counts per vertex (children plus the upward edge).
    pub fn vertex_edge_counts(&self) -> Vec<usize> {
        let mut out = Vec::new();
        fn walk(t: &PlanarTree, out: &mut Vec<usize>) {
            if let PlanarTree::Vertex(children) = t {
                out.push(children.len() + 1);
                for c in children {
                    walk(c, out);
                }
            }
        }
        walk(self, &mut out);
        out
    }

    /// `(..((..)..))`-style notation: a leaf prints as a bullet, a vertex
    /// as its children in parentheses.
    pub fn to_bracket(&self) -> String {
        match self {
            PlanarTree::Leaf => String::from("\u{2022}"),
            PlanarTree::Vertex(children) => {
                let mut s = String::from("(");
                for c in children {
                    s.push_str(&c.to_bracket());
                }
                s.push(')');
                s
            }
        }
    }
}

/// All `k`-trees, complete and duplicate-free, in canonical order.
pub fn enumerate_trees(k: usize) -> Vec<PlanarTree> {
    let mut table: BTreeMap<usize, Vec<PlanarTree>> = BTreeMap::new();
    enumerate_into(k, &mut table);
    table.remove(&k).unwrap_or_default()
}

fn enumerate_into(k: usize, table: &mut BTreeMap<usize, Vec<PlanarTree>>) {
    if table.contains_key(&k) {
        return;
    }
    if k == 0 {
        table.insert(0, Vec::new());
        return;
    }
    if k == 1 {
        table.insert(1, alloc::vec![PlanarTree::Leaf]);
        return;
    }
    // A tree with k >= 2 leaves has a root vertex with r >= 2 children whose
    // leaf counts compose k; the decomposition is unique, so no duplicates.
    let mut trees = Vec::new();
    for comp in crate::algebra::compositions(k) {
        if comp.len() < 2 {
            continue;
        }
        for &part in &comp {
            enumerate_into(part, table);
        }
        let mut choices: Vec<Vec<PlanarTree>> = alloc::vec![Vec::new()];
        for &part in &comp {
            let mut next = Vec::new();
            for prefix in &choices {
                for sub in table.get(&part).unwrap() {
                    let mut p = prefix.clone();
                    p.push(sub.clone());
                    next.push(p);
                }
            }
            choices = next;
        }
        for children in choices {
            trees.push(PlanarTree::Vertex(children));
        }
    }
    trees.sort();
    table.insert(k, trees);
}

/// Grafting: identifies the root edge of `inner` with leaf `i` (1-based) of
/// `outer`. Grafting a bare edge is the identity.
pub fn graft(outer: &PlanarTree, i: usize, inner: &PlanarTree) -> Result<PlanarTree> {
    let k = outer.leaves();
    if i < 1 || i > k {
        return Err(Error::Input(alloc::format!(
            "graft: leaf index {i} out of range 1..={k}"
        )));
    }
    if matches!(inner, PlanarTree::Leaf) {
        return Ok(outer.clone());
    }
    fn go(t: &PlanarTree, i: usize, inner: &PlanarTree) -> PlanarTree {
        match t {
            PlanarTree::Leaf => {
                debug_assert_eq!(i, 1);
                inner.clone()
            }
            PlanarTree::Vertex(children) => {
                let mut remaining = i;
                let mut out = Vec::with_capacity(children.len());
                let mut replaced = false;
                for c in children {
                    let cl = c.leaves();
                    if !replaced && remaining <= cl {
                        out.push(go(c, remaining, inner));
                        replaced = true;
                    } else {
                        out.push(c.clone());
                        if !replaced {
                            remaining -= cl;
                        }
                    }
                }
                debug_assert!(replaced);
                PlanarTree::Vertex(out)
            }
        }
    }
    Ok(go(outer, i, inner))
}

/// Re-roots `tree` at its `r`-th leaf (1-based); the old root edge becomes a
/// leaf. The legs keep their planar cyclic order.
pub fn reroot(tree: &PlanarTree, r: usize) -> PlanarTree {
    fn go(t: &PlanarTree, r: usize, parent: PlanarTree) -> PlanarTree {
        let PlanarTree::Vertex(children) = t else {
            // Re-rooting a bare edge swaps its two ends; same tree.
            return parent;
        };
        let mut remaining = r;
        for (j, c) in children.iter().enumerate() {
            let c_leaves = c.leaves();
            if remaining > c_leaves {
                remaining -= c_leaves;
                continue;
            }
            // The target leaf lies in child j. The vertex, seen from that
            // side, has children: the later siblings, the old parent side,
            // then the earlier siblings.
            let mut rotated = Vec::with_capacity(children.len());
            rotated.extend_from_slice(&children[j + 1..]);
            rotated.push(parent);
            rotated.extend_from_slice(&children[..j]);
            let here = PlanarTree::Vertex(rotated);
            return match c {
                PlanarTree::Leaf => here,
                PlanarTree::Vertex(_) => go(c, remaining, here),
            };
        }
        unreachable!("leaf index out of range")
    }
    assert!(r >= 1 && r <= tree.leaves());
    go(tree, r, PlanarTree::Leaf)
}

/// The `n` rooted trees obtained by choosing each leg of the underlying
/// root-forgotten tree as the root: the tree itself, then the re-rootings
/// at leaves `1..n-1` in order.
pub fn rootings(tree: &PlanarTree) -> Vec<PlanarTree> {
    let mut out = alloc::vec![tree.clone()];
    for r in 1..=tree.leaves() {
        out.push(reroot(tree, r));
    }
    out
}

/// A cyclic (root-forgotten) class of `(n-1)`-trees: the canonical
/// representative, the distinct fiber over it, and the symmetry factor.
#[derive(Clone, Debug)]
pub struct CyclicClass {
    /// Lexicographically least rooted tree in the rotation class.
    pub representative: PlanarTree,
    /// Distinct rooted trees in `G_{n-1}` forgetting to this class.
    pub fiber: Vec<PlanarTree>,
    /// `1 / #Aut`, where `#Aut = n / #fiber` counts the leg rotations fixing
    /// the class. Weighting the `n`-rooting sum of a class by this factor
    /// reproduces the plain sum over `G_{n-1}`.
    pub factor: Scalar,
}

/// Partition of `G_{n-1}` into cyclic classes (`n >= 3`).
pub fn cyclic_classes(n: usize) -> Result<Vec<CyclicClass>> {
    if n < 3 {
        return Err(Error::Input("cyclic_classes needs n >= 3".into()));
    }
    let trees = enumerate_trees(n - 1);
    let mut by_rep: BTreeMap<PlanarTree, Vec<PlanarTree>> = BTreeMap::new();
    for t in &trees {
        let all = rootings(t);
        let rep = all.iter().min().unwrap().clone();
        by_rep.entry(rep).or_default().push(t.clone());
    }
    let mut out = Vec::new();
    for (rep, fiber) in by_rep {
        let aut = n / fiber.len();
        debug_assert_eq!(aut * fiber.len(), n, "orbit size must divide leg count");
        out.push(CyclicClass {
            representative: rep,
            fiber,
            factor: Scalar::ratio(1, aut as i64),
        });
    }
    Ok(out)
}

/// The number of codimension-one boundary faces of the `n`-th associahedron:
/// the sum of `k` over `k + l = n + 1` with `k, l >= 2`.
pub fn boundary_face_count(n: usize) -> Result<u64> {
    if n < 3 {
        return Err(Error::Input("boundary_face_count needs n >= 3".into()));
    }
    let mut total = 0u64;
    for k in 2..=(n - 1) {
        let l = n + 1 - k;
        if l >= 2 {
            total += k as u64;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn tree_counts() {
        // Little Schroeder numbers.
        let expect = [1usize, 1, 3, 11, 45, 197, 903];
        for (k, &n) in expect.iter().enumerate() {
            assert_eq!(enumerate_trees(k + 1).len(), n, "G_{}", k + 1);
        }
    }

    #[test]
    fn counts_match_independent_recurrence() {
        // s(n) = (3(2n-3) s(n-1) - (n-3) s(n-2)) / n, s(1) = s(2) = 1.
        let mut s = alloc::vec![0i64, 1, 1];
        for n in 3..=7i64 {
            let v = (3 * (2 * n - 3) * s[(n - 1) as usize] - (n - 3) * s[(n - 2) as usize]) / n;
            s.push(v);
        }
        for k in 1..=7 {
            assert_eq!(enumerate_trees(k).len() as i64, s[k]);
        }
    }

    #[test]
    fn leaf_and_edge_bookkeeping() {
        // legs + 2 * internal edges = sum of incident-edge counts, where
        // the root edge counts as a leg of the underlying graph.
        for k in 2..=6 {
            for t in enumerate_trees(k) {
                assert_eq!(t.leaves(), k);
                let lhs = (t.leaves() + 1) + 2 * t.internal_edges();
                let rhs: usize = t.vertex_edge_counts().iter().sum();
                assert_eq!(lhs, rhs, "tree {}", t.to_bracket());
                for e in t.vertex_edge_counts() {
                    assert!(e >= 3);
                }
            }
        }
    }

    #[test]
    fn graft_unit_and_comb() {
        let c2 = PlanarTree::corolla(2);
        let any = enumerate_trees(4)[5].clone();
        assert_eq!(graft(&any, 2, &PlanarTree::Leaf).unwrap(), any);
        let left = graft(&c2, 1, &c2).unwrap();
        assert_eq!(
            left,
            PlanarTree::Vertex(alloc::vec![PlanarTree::corolla(2), PlanarTree::Leaf])
        );
        assert!(graft(&c2, 3, &c2).is_err());
    }

    #[test]
    fn grafting_generates_all_trees() {
        // Closure of corollas under grafting equals enumeration, k <= 6.
        let mut generated: BTreeSet<PlanarTree> = BTreeSet::new();
        generated.insert(PlanarTree::Leaf);
        let mut frontier = alloc::vec![PlanarTree::Leaf];
        while let Some(t) = frontier.pop() {
            let l = t.leaves();
            for k in 2..=(6 - l + 1) {
                let c = PlanarTree::corolla(k);
                for i in 1..=k {
                    let g = graft(&c, i, &t).unwrap();
                    if g.leaves() <= 6 && generated.insert(g.clone()) {
                        frontier.push(g);
                    }
                    // also graft t onto existing trees
                }
            }
            // graft corollas onto t's leaves
            for i in 1..=l {
                for k in 2..=(6 - l + 1) {
                    let g = graft(&t, i, &PlanarTree::corolla(k)).unwrap();
                    if g.leaves() <= 6 && generated.insert(g.clone()) {
                        frontier.push(g);
                    }
                }
            }
        }
        for k in 1..=6 {
            let enumerated: BTreeSet<PlanarTree> = enumerate_trees(k).into_iter().collect();
            let from_grafts: BTreeSet<PlanarTree> =
                generated.iter().filter(|t| t.leaves() == k).cloned().collect();
            assert_eq!(enumerated, from_grafts, "k = {k}");
        }
    }

    #[test]
    fn reroot_round_trips() {
        // Re-rooting is a bijection on the leg set: the rotation class is
        // stable and the section picks it back out.
        for t in enumerate_trees(4) {
            let all = rootings(&t);
            assert_eq!(all.len(), 5);
            let rep = all.iter().min().unwrap().clone();
            for r in &all {
                let back = rootings(r);
                assert_eq!(back.iter().min().unwrap().clone(), rep);
                assert_eq!(r.leaves(), 4);
            }
        }
    }

    #[test]
    fn cyclic_classes_partition() {
        for n in 3..=6 {
            let classes = cyclic_classes(n).unwrap();
            let total: usize = classes.iter().map(|c| c.fiber.len()).sum();
            assert_eq!(total, enumerate_trees(n - 1).len());
            for c in &classes {
                // factor = fiber/n as 1/aut
                let aut = n / c.fiber.len();
                assert_eq!(c.factor, Scalar::ratio(1, aut as i64));
            }
        }
        // n = 3: a single class whose fiber is all of G_2.
        let c3 = cyclic_classes(3).unwrap();
        assert_eq!(c3.len(), 1);
        assert_eq!(c3[0].fiber, enumerate_trees(2));
    }

    #[test]
    fn boundary_counts() {
        assert_eq!(boundary_face_count(3).unwrap(), 2);
        assert_eq!(boundary_face_count(4).unwrap(), 5);
        // Cross-check by direct (k, l, i) enumeration.
        for n in 3..=8 {
            let mut count = 0u64;
            for k in 2..=n {
                for l in 2..=n {
                    if k + l == n + 1 {
                        count += k as u64; // i ranges over 1..=k
                    }
                }
            }
            assert_eq!(boundary_face_count(n).unwrap(), count, "n = {n}");
        }
    }
}
