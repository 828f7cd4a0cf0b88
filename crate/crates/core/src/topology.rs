//! Common-neighbour counts, diameter, node connectivity and clique number.

use serde::{Serialize, Serializer};

use crate::error::{invalid, Result};
use crate::graph::{Adjacency, Graph};
use crate::report::serialize_f64;

#[inline]
fn ones(set: &[u64]) -> impl Iterator<Item = usize> + '_ {
    set.iter().enumerate().flat_map(|(w, &word)| {
        let mut x = word;
        std::iter::from_fn(move || {
            (x != 0).then(|| {
                let b = x.trailing_zeros() as usize;
                x &= x - 1;
                w * 64 + b
            })
        })
    })
}

#[inline]
fn popcount(set: &[u64]) -> usize {
    set.iter().map(|w| w.count_ones() as usize).sum()
}

#[inline]
fn has(set: &[u64], v: usize) -> bool {
    (set[v / 64] >> (v % 64)) & 1 == 1
}

#[inline]
fn insert(set: &mut [u64], v: usize) {
    set[v / 64] |= 1 << (v % 64);
}

#[inline]
fn remove(set: &mut [u64], v: usize) {
    set[v / 64] &= !(1 << (v % 64));
}

/// Common neighbours of `i` and `j`, i.e. the number of length-2 paths.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TwoPathProfile {
    pub i: usize,
    pub j: usize,
    pub count: usize,
    /// Bits `(i,k),(j,k)` for every `k != i, j` in increasing `k`.
    pub e_ij: String,
}

pub fn two_path_count(g: &Graph, i: usize, j: usize) -> Result<TwoPathProfile> {
    let n = g.n();
    if i == j || i == 0 || j == 0 || i > n || j > n {
        return Err(invalid(format!(
            "need distinct nodes in 1..={n}, got ({i},{j})"
        )));
    }
    let mut e_ij = String::with_capacity(2 * (n - 2));
    let mut count = 0;
    for k in (1..=n).filter(|&k| k != i && k != j) {
        let (a, b) = (g.has_edge(i, k), g.has_edge(j, k));
        e_ij.push(if a { '1' } else { '0' });
        e_ij.push(if b { '1' } else { '0' });
        count += (a && b) as usize;
    }
    Ok(TwoPathProfile { i, j, count, e_ij })
}

/// Common-neighbour count for every pair `i < j`, in edge-index order.
pub fn two_path_counts(g: &Graph) -> Vec<usize> {
    let adj = g.adjacency();
    let n = g.n();
    let mut out = Vec::with_capacity(g.bit_len());
    for a in 0..n {
        for b in a + 1..n {
            out.push(
                adj.row(a)
                    .iter()
                    .zip(adj.row(b))
                    .map(|(x, y)| (x & y).count_ones() as usize)
                    .sum(),
            );
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoPathSummary {
    pub pairs: usize,
    pub min: usize,
    pub max: usize,
    #[serde(serialize_with = "serialize_f64")]
    pub mean: f64,
    /// `(n - 2) / 4`
    #[serde(serialize_with = "serialize_f64")]
    pub expected: f64,
}

pub fn two_path_summary(g: &Graph) -> TwoPathSummary {
    let counts = two_path_counts(g);
    let pairs = counts.len();
    TwoPathSummary {
        pairs,
        min: counts.iter().copied().min().unwrap_or(0),
        max: counts.iter().copied().max().unwrap_or(0),
        mean: if pairs == 0 {
            0.0
        } else {
            counts.iter().sum::<usize>() as f64 / pairs as f64
        },
        expected: (g.n() as f64 - 2.0) / 4.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Diameter {
    Finite(usize),
    Disconnected,
}

impl Serialize for Diameter {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Diameter::Finite(d) => s.serialize_u64(*d as u64),
            Diameter::Disconnected => s.serialize_str("disconnected"),
        }
    }
}

pub fn diameter(g: &Graph) -> Diameter {
    let adj = g.adjacency();
    let n = g.n();
    let words = adj.words();
    let mut best = 0;
    for src in 0..n {
        let mut reached = vec![0u64; words];
        insert(&mut reached, src);
        let mut frontier = reached.clone();
        let mut seen = 1;
        let mut dist = 0;
        while seen < n {
            let mut next = vec![0u64; words];
            for v in ones(&frontier) {
                for (x, r) in next.iter_mut().zip(adj.row(v)) {
                    *x |= r;
                }
            }
            for (x, r) in next.iter_mut().zip(&reached) {
                *x &= !r;
            }
            let added = popcount(&next);
            if added == 0 {
                return Diameter::Disconnected;
            }
            for (r, x) in reached.iter_mut().zip(&next) {
                *r |= x;
            }
            seen += added;
            dist += 1;
            frontier = next;
        }
        best = best.max(dist);
    }
    Diameter::Finite(best)
}

const NONE: usize = usize::MAX;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    In,
    Out,
}

/// Max number of internally node-disjoint `s`–`t` paths for non-adjacent
/// `s`, `t`, stopping early once `cap` is reached. Unit-capacity max-flow on
/// the split graph `v_in -> v_out`, walked with bitset rows.
fn local_connectivity(adj: &Adjacency, s: usize, t: usize, cap: usize) -> usize {
    let n = adj.n();
    let words = adj.words();
    let mut out_flow = vec![0u64; n * words];
    let mut pred = vec![NONE; n];
    let mut flow = 0;

    // any feasible flow is a valid start: route the length-2 paths first
    let common: Vec<usize> = {
        let both: Vec<u64> = adj
            .row(s)
            .iter()
            .zip(adj.row(t))
            .map(|(a, b)| a & b)
            .collect();
        ones(&both).collect()
    };
    for c in common {
        if flow >= cap {
            return cap;
        }
        insert(&mut out_flow[s * words..(s + 1) * words], c);
        insert(&mut out_flow[c * words..(c + 1) * words], t);
        pred[c] = s;
        flow += 1;
    }

    let mut parent_in = vec![(NONE, Side::In); n];
    let mut parent_out = vec![(NONE, Side::In); n];
    let mut queue = Vec::with_capacity(2 * n);
    while flow < cap {
        let mut vis_in = vec![0u64; words];
        let mut vis_out = vec![0u64; words];
        insert(&mut vis_out, s);
        queue.clear();
        queue.push((s, Side::Out));
        let mut head = 0;
        let mut found = false;
        'bfs: while head < queue.len() {
            let (v, side) = queue[head];
            head += 1;
            match side {
                Side::Out => {
                    let row = adj.row(v);
                    let used = &out_flow[v * words..(v + 1) * words];
                    for w in 0..words {
                        let mut cand = row[w] & !used[w] & !vis_in[w];
                        if s / 64 == w {
                            cand &= !(1 << (s % 64));
                        }
                        while cand != 0 {
                            let x = w * 64 + cand.trailing_zeros() as usize;
                            cand &= cand - 1;
                            parent_in[x] = (v, Side::Out);
                            if x == t {
                                found = true;
                                break 'bfs;
                            }
                            insert(&mut vis_in, x);
                            queue.push((x, Side::In));
                        }
                    }
                    if v != s && pred[v] != NONE && !has(&vis_in, v) {
                        insert(&mut vis_in, v);
                        parent_in[v] = (v, Side::Out);
                        queue.push((v, Side::In));
                    }
                }
                Side::In => {
                    let u = if pred[v] == NONE { v } else { pred[v] };
                    if u != s && !has(&vis_out, u) {
                        insert(&mut vis_out, u);
                        parent_out[u] = (v, Side::In);
                        queue.push((u, Side::Out));
                    }
                }
            }
        }
        if !found {
            break;
        }
        let (mut v, mut side) = (t, Side::In);
        while !(v == s && side == Side::Out) {
            match side {
                Side::In => {
                    let (u, _) = parent_in[v];
                    if u != v {
                        insert(&mut out_flow[u * words..(u + 1) * words], v);
                    }
                    (v, side) = (u, Side::Out);
                }
                Side::Out => {
                    let (u, _) = parent_out[v];
                    if u != v {
                        remove(&mut out_flow[v * words..(v + 1) * words], u);
                    }
                    (v, side) = (u, Side::In);
                }
            }
        }
        pred.fill(NONE);
        for u in 0..n {
            for w in ones(&out_flow[u * words..(u + 1) * words]) {
                if w != t {
                    pred[w] = u;
                }
            }
        }
        flow += 1;
    }
    flow.min(cap)
}

/// Largest `k` such that the graph is `k`-connected (`n - 1` for `K_n`).
///
/// Only `O(n + δ²)` local flows are needed: with `v` of minimum degree, a
/// minimum separator either misses `v` (then it separates `v` from some
/// non-neighbour) or contains it (then it separates two neighbours of `v`).
pub fn node_connectivity(g: &Graph) -> Result<usize> {
    let n = g.n();
    if n < 2 {
        return Err(invalid("connectivity needs at least 2 nodes"));
    }
    let adj = g.adjacency();
    let v = (0..n).min_by_key(|&v| adj.degree(v)).expect("n >= 2");
    let mut best = adj.degree(v);
    if best == n - 1 {
        return Ok(n - 1);
    }
    for u in 0..n {
        if best == 0 {
            return Ok(0);
        }
        if u != v && !adj.has(v, u) {
            best = best.min(local_connectivity(&adj, v, u, best));
        }
    }
    let nbrs: Vec<usize> = ones(adj.row(v)).collect();
    for (a, &x) in nbrs.iter().enumerate() {
        for &y in &nbrs[a + 1..] {
            if !adj.has(x, y) {
                best = best.min(local_connectivity(&adj, x, y, best));
            }
        }
    }
    Ok(best)
}

/// Exact clique number by branch and bound with greedy-colouring bounds.
pub fn max_clique(g: &Graph) -> usize {
    let adj = g.adjacency();
    let n = g.n();
    let mut cand = vec![0u64; adj.words()];
    for v in 0..n {
        insert(&mut cand, v);
    }
    let mut best = 1;
    expand(&adj, cand, 0, &mut best);
    best
}

fn colour_sort(adj: &Adjacency, cand: &[u64]) -> (Vec<usize>, Vec<usize>) {
    let mut uncoloured = cand.to_vec();
    let mut order = Vec::with_capacity(popcount(cand));
    let mut colours = Vec::with_capacity(order.capacity());
    let mut colour = 0;
    while uncoloured.iter().any(|&w| w != 0) {
        colour += 1;
        let mut q = uncoloured.clone();
        loop {
            let Some(v) = ones(&q).next() else { break };
            remove(&mut q, v);
            remove(&mut uncoloured, v);
            for (x, r) in q.iter_mut().zip(adj.row(v)) {
                *x &= !r;
            }
            order.push(v);
            colours.push(colour);
        }
    }
    (order, colours)
}

fn expand(adj: &Adjacency, mut cand: Vec<u64>, size: usize, best: &mut usize) {
    let (order, colours) = colour_sort(adj, &cand);
    for idx in (0..order.len()).rev() {
        if size + colours[idx] <= *best {
            return;
        }
        let v = order[idx];
        let next: Vec<u64> = cand.iter().zip(adj.row(v)).map(|(c, r)| c & r).collect();
        if next.iter().all(|&w| w == 0) {
            *best = (*best).max(size + 1);
        } else {
            expand(adj, next, size + 1, best);
        }
        remove(&mut cand, v);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_diameter(g: &Graph) -> Diameter {
        let n = g.n();
        let inf = usize::MAX / 4;
        let mut d = vec![vec![inf; n]; n];
        for (i, row) in d.iter_mut().enumerate() {
            row[i] = 0;
        }
        for (i, j) in g.edges() {
            d[i - 1][j - 1] = 1;
            d[j - 1][i - 1] = 1;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    d[i][j] = d[i][j].min(d[i][k] + d[k][j]);
                }
            }
        }
        let m = d.iter().flatten().copied().max().unwrap();
        if m >= inf {
            Diameter::Disconnected
        } else {
            Diameter::Finite(m)
        }
    }

    fn connected_without(g: &Graph, removed: u32) -> bool {
        let n = g.n();
        let alive: Vec<usize> = (0..n).filter(|v| removed >> v & 1 == 0).collect();
        if alive.len() <= 1 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![alive[0]];
        seen[alive[0]] = true;
        while let Some(v) = stack.pop() {
            for &w in &alive {
                if !seen[w] && g.has_edge(v + 1, w + 1) {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        alive.iter().all(|&v| seen[v])
    }

    /// Smallest node set whose removal disconnects, by subset enumeration.
    fn brute_connectivity(g: &Graph) -> usize {
        let n = g.n();
        if g.edge_count() == n * (n - 1) / 2 {
            return n - 1;
        }
        (0u32..1 << n)
            .filter(|&s| (s.count_ones() as usize) <= n - 2 && !connected_without(g, s))
            .map(|s| s.count_ones() as usize)
            .min()
            .unwrap()
    }

    fn brute_clique(g: &Graph) -> usize {
        let n = g.n();
        (1u32..1 << n)
            .filter(|&s| {
                let vs: Vec<usize> = (0..n).filter(|v| s >> v & 1 == 1).collect();
                vs.iter()
                    .enumerate()
                    .all(|(a, &x)| vs[a + 1..].iter().all(|&y| g.has_edge(x + 1, y + 1)))
            })
            .map(|s| s.count_ones() as usize)
            .max()
            .unwrap()
    }

    #[test]
    fn two_path_examples() {
        let k6 = Graph::complete(6).unwrap();
        assert_eq!(two_path_count(&k6, 2, 5).unwrap().count, 4);
        let e = Graph::empty(6).unwrap();
        assert_eq!(two_path_count(&e, 2, 5).unwrap().count, 0);
        let c5 = Graph::cycle(5).unwrap();
        let p = two_path_count(&c5, 1, 3).unwrap();
        assert_eq!(p.count, 1);
        // k = 2, 4, 5: (1,2)=1,(3,2)=1 | (1,4)=0,(3,4)=1 | (1,5)=1,(3,5)=0
        assert_eq!(p.e_ij, "110110");
        assert!(two_path_count(&c5, 2, 2).is_err());
        assert!(two_path_count(&c5, 0, 2).is_err());
    }

    #[test]
    fn diameter_examples() {
        assert_eq!(diameter(&Graph::complete(6).unwrap()), Diameter::Finite(1));
        assert_eq!(diameter(&Graph::cycle(5).unwrap()), Diameter::Finite(2));
        assert_eq!(diameter(&Graph::empty(2).unwrap()), Diameter::Disconnected);
        assert_eq!(diameter(&Graph::empty(1).unwrap()), Diameter::Finite(0));
        assert_eq!(diameter(&Graph::path(7).unwrap()), Diameter::Finite(6));
        assert_eq!(
            serde_json::to_string(&Diameter::Disconnected).unwrap(),
            "\"disconnected\""
        );
    }

    #[test]
    fn connectivity_examples() {
        assert_eq!(node_connectivity(&Graph::complete(6).unwrap()).unwrap(), 5);
        assert_eq!(node_connectivity(&Graph::path(3).unwrap()).unwrap(), 1);
        assert_eq!(node_connectivity(&Graph::cycle(5).unwrap()).unwrap(), 2);
        assert_eq!(node_connectivity(&Graph::empty(4).unwrap()).unwrap(), 0);
        assert!(node_connectivity(&Graph::empty(1).unwrap()).is_err());
        // two K4s glued on two nodes: 2-connected
        let mut edges = Vec::new();
        for grp in [[1, 2, 3, 4], [3, 4, 5, 6]] {
            for a in 0..4 {
                for b in a + 1..4 {
                    edges.push((grp[a], grp[b]));
                }
            }
        }
        assert_eq!(
            node_connectivity(&Graph::from_edges(6, &edges).unwrap()).unwrap(),
            2
        );
    }

    #[test]
    fn clique_examples() {
        assert_eq!(max_clique(&Graph::complete(7).unwrap()), 7);
        assert_eq!(max_clique(&Graph::empty(7).unwrap()), 1);
        assert_eq!(max_clique(&Graph::cycle(5).unwrap()), 2);
        assert_eq!(max_clique(&Graph::empty(1).unwrap()), 1);
    }

    #[test]
    fn multiword_rows() {
        // a 130-node graph exercises three-word bitsets
        let g = Graph::random(130, 4).unwrap();
        let k = node_connectivity(&g).unwrap();
        let min_deg = *g.degree_sequence().iter().min().unwrap();
        assert!(k <= min_deg);
        assert!(k > 30);
        assert_eq!(diameter(&g), Diameter::Finite(2));
        let counts = two_path_counts(&g);
        assert_eq!(counts[0], two_path_count(&g, 1, 2).unwrap().count);
        assert_eq!(
            *counts.last().unwrap(),
            two_path_count(&g, 129, 130).unwrap().count
        );
        let c = max_clique(&g);
        assert!((8..=14).contains(&c));
    }

    #[test]
    fn two_path_envelope_n100() {
        // Binomial(98, 1/4): mean 24.5, variance 18.375
        let pairs_per_graph = 4950usize;
        let mut total = 0usize;
        let mut seen = 0usize;
        for s in 0..3 {
            let g = Graph::random_stream(100, 8, s).unwrap();
            let counts = two_path_counts(&g);
            assert_eq!(counts.len(), pairs_per_graph);
            total += counts.iter().sum::<usize>();
            seen += counts.len();
        }
        let mean = total as f64 / seen as f64;
        // pairs within one graph are correlated; use the per-graph count
        // (3 graphs, each with sample variance <= n times the pair variance)
        let sigma = (18.375 * 100.0 / seen as f64).sqrt();
        assert!((mean - 24.5).abs() <= 3.0 * sigma, "{mean}");
    }

    fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
        (2..=max_n, any::<u64>()).prop_map(|(n, s)| Graph::random(n, s).unwrap())
    }

    fn arb_sparse(max_n: usize) -> impl Strategy<Value = Graph> {
        // drop edges with probability 3/4 to get disconnected and cut cases
        (2..=max_n, any::<u64>(), any::<u64>()).prop_map(|(n, a, b)| {
            let x = Graph::random(n, a).unwrap();
            let y = Graph::random(n, b).unwrap();
            Graph::from_bits(n, x.bits().zip(y.bits()).map(|(p, q)| p && q)).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn diameter_matches_floyd(g in arb_graph(12)) {
            prop_assert_eq!(diameter(&g), brute_diameter(&g));
        }

        #[test]
        fn sparse_diameter_matches_floyd(g in arb_sparse(12)) {
            prop_assert_eq!(diameter(&g), brute_diameter(&g));
        }

        #[test]
        fn connectivity_matches_cut_enumeration(g in arb_graph(10)) {
            prop_assert_eq!(node_connectivity(&g).unwrap(), brute_connectivity(&g));
        }

        #[test]
        fn sparse_connectivity_matches_cut_enumeration(g in arb_sparse(10)) {
            prop_assert_eq!(node_connectivity(&g).unwrap(), brute_connectivity(&g));
        }

        #[test]
        fn connectivity_below_min_degree(g in arb_graph(30)) {
            let k = node_connectivity(&g).unwrap();
            prop_assert!(k <= *g.degree_sequence().iter().min().unwrap());
        }

        #[test]
        fn clique_matches_subset_enumeration(g in arb_graph(12)) {
            prop_assert_eq!(max_clique(&g), brute_clique(&g));
        }

        #[test]
        fn dense_clique_matches_subset_enumeration(g in arb_sparse(12)) {
            let c = g.complement();
            prop_assert_eq!(max_clique(&c), brute_clique(&c));
        }

        #[test]
        fn two_path_count_is_aligned_11_blocks(g in arb_graph(15), a in 0usize..15, b in 0usize..15) {
            let n = g.n();
            let (i, j) = (a % n + 1, b % n + 1);
            prop_assume!(i != j);
            let p = two_path_count(&g, i, j).unwrap();
            let aligned = p.e_ij.as_bytes().chunks(2).filter(|c| c == b"11").count();
            prop_assert_eq!(p.count, aligned);
            prop_assert!(p.count <= n - 2);
        }

        #[test]
        fn complete_is_the_only_diameter_one(g in arb_graph(9)) {
            let complete = g.edge_count() == g.bit_len();
            if let Diameter::Finite(d) = diameter(&g) {
                prop_assert_eq!(d == 1, complete);
                if !complete { prop_assert!(d >= 2); }
            }
        }
    }
}
