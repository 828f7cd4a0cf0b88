//! Labeled simple graphs on nodes `1..=n`, stored as the `n(n-1)/2`-bit edge
//! string in row-major lexicographic pair order `(1,2),(1,3),…,(n-1,n)`.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};

/// Identity of the generator behind [`Graph::random`]; recorded in reports.
pub const RNG_ID: &str = "ChaCha8Rng(rand_chacha 0.3; seed_from_u64(seed); set_stream(stream))";

/// Number of unordered node pairs, `n choose 2`.
pub const fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// 0-based position of edge `(a, b)`, `a < b`, 0-based nodes.
#[inline]
pub(crate) fn edge_index0(a: usize, b: usize, n: usize) -> usize {
    debug_assert!(a < b && b < n);
    a * (2 * n - a - 1) / 2 + (b - a - 1)
}

/// 0-based bit position of edge `(i, j)` for 1-based labels `1 <= i < j <= n`.
pub fn edge_index(i: usize, j: usize, n: usize) -> Result<usize> {
    if i == 0 || j > n || i >= j {
        return Err(invalid(format!(
            "edge ({i},{j}) needs 1 <= i < j <= n = {n}"
        )));
    }
    Ok(edge_index0(i - 1, j - 1, n))
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    // bit e lives at bits[e / 64] >> (e % 64); unused tail bits are zero
    bits: Vec<u64>,
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Graph({}:{})", self.n, self.encode())
    }
}

fn words_for(bits: usize) -> usize {
    bits.div_ceil(64)
}

impl Graph {
    pub fn empty(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("graphs need at least one node"));
        }
        Ok(Self {
            n,
            bits: vec![0; words_for(pair_count(n))],
        })
    }

    pub fn complete(n: usize) -> Result<Self> {
        let mut g = Self::empty(n)?;
        for e in 0..g.bit_len() {
            g.set_bit(e, true);
        }
        Ok(g)
    }

    /// Builds a graph from 1-based edge pairs given in either orientation.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(n)?;
        for &(u, v) in edges {
            let (i, j) = if u < v { (u, v) } else { (v, u) };
            g.set_bit(edge_index(i, j, n)?, true);
        }
        Ok(g)
    }

    /// Path `1–2–…–n`.
    pub fn path(n: usize) -> Result<Self> {
        let edges: Vec<_> = (1..n).map(|i| (i, i + 1)).collect();
        Self::from_edges(n, &edges)
    }

    /// Cycle `1–2–…–n–1`; needs `n >= 3`.
    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(invalid("a cycle needs at least 3 nodes"));
        }
        let mut edges: Vec<_> = (1..n).map(|i| (i, i + 1)).collect();
        edges.push((1, n));
        Self::from_edges(n, &edges)
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(n: usize, bits: I) -> Result<Self> {
        let mut g = Self::empty(n)?;
        let expected = g.bit_len();
        let mut got = 0;
        for b in bits {
            if got < expected && b {
                g.set_bit(got, true);
            }
            got += 1;
        }
        if got != expected {
            return Err(Error::LengthMismatch { expected, got });
        }
        Ok(g)
    }

    /// Inverse of [`Graph::encode`]: a string of `'0'`/`'1'` of length `n choose 2`.
    pub fn decode(n: usize, bits: &str) -> Result<Self> {
        let parsed = bits
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!("`{other}` is not a bit"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_bits(n, parsed)
    }

    /// Graph whose edge string, read as a binary number with edge 0 as the
    /// most significant bit, equals `code`. Needs `n choose 2 <= 128`.
    pub fn from_code(n: usize, code: u128) -> Result<Self> {
        let len = pair_count(n);
        if len > 128 {
            return Err(Error::LimitExceeded {
                what: "integer edge code",
                requested: len as u128,
                limit: 128,
            });
        }
        if len < 128 && code >> len != 0 {
            return Err(invalid(format!("code {code} has more than {len} bits")));
        }
        Self::from_bits(n, (0..len).map(|e| (code >> (len - 1 - e)) & 1 == 1))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bit_len(&self) -> usize {
        pair_count(self.n)
    }

    #[inline]
    pub fn bit(&self, e: usize) -> bool {
        (self.bits[e / 64] >> (e % 64)) & 1 == 1
    }

    #[inline]
    pub(crate) fn set_bit(&mut self, e: usize, value: bool) {
        let mask = 1u64 << (e % 64);
        if value {
            self.bits[e / 64] |= mask;
        } else {
            self.bits[e / 64] &= !mask;
        }
    }

    /// Edge test on 1-based labels; `false` for `i == j`.
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => self.bit(edge_index0(i - 1, j - 1, self.n)),
            std::cmp::Ordering::Greater => self.bit(edge_index0(j - 1, i - 1, self.n)),
            std::cmp::Ordering::Equal => false,
        }
    }

    pub fn edge_count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.bit_len()).map(|e| self.bit(e))
    }

    /// 1-based edge list in bit order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        let mut e = 0;
        for i in 1..=self.n {
            for j in i + 1..=self.n {
                if self.bit(e) {
                    out.push((i, j));
                }
                e += 1;
            }
        }
        out
    }

    pub fn encode(&self) -> String {
        self.bits().map(|b| if b { '1' } else { '0' }).collect()
    }

    /// Edge string packed most-significant-bit first, zero padded.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.bit_len().div_ceil(8)];
        for e in 0..self.bit_len() {
            if self.bit(e) {
                out[e / 8] |= 0x80 >> (e % 8);
            }
        }
        out
    }

    /// See [`Graph::from_code`]. `None` when the edge string exceeds 128 bits.
    pub fn code(&self) -> Option<u128> {
        let len = self.bit_len();
        (len <= 128).then(|| (0..len).fold(0u128, |acc, e| (acc << 1) | self.bit(e) as u128))
    }

    pub fn complement(&self) -> Self {
        let mut g = self.clone();
        let len = self.bit_len();
        for (w, word) in g.bits.iter_mut().enumerate() {
            *word = !*word;
            let used = len.saturating_sub(w * 64).min(64);
            if used < 64 {
                *word &= (1u64 << used) - 1;
            }
        }
        g
    }

    pub fn adjacency(&self) -> Adjacency {
        let mut adj = Adjacency::new(self.n);
        let mut e = 0;
        for a in 0..self.n {
            for b in a + 1..self.n {
                if self.bit(e) {
                    adj.add_edge(a, b);
                }
                e += 1;
            }
        }
        adj
    }

    pub fn from_adjacency(adj: &Adjacency) -> Result<Self> {
        let mut g = Self::empty(adj.n())?;
        let n = adj.n();
        for a in 0..n {
            for b in a + 1..n {
                if adj.has(a, b) {
                    g.set_bit(edge_index0(a, b, n), true);
                }
            }
        }
        Ok(g)
    }

    fn check_node(&self, v: usize) -> Result<()> {
        if v == 0 || v > self.n {
            return Err(invalid(format!("node {v} outside 1..={}", self.n)));
        }
        Ok(())
    }

    pub fn degree(&self, v: usize) -> Result<usize> {
        self.check_node(v)?;
        Ok((1..=self.n).filter(|&u| self.has_edge(u, v)).count())
    }

    pub fn degree_sequence(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for (i, j) in self.edges() {
            deg[i - 1] += 1;
            deg[j - 1] += 1;
        }
        deg
    }

    /// `G'` with edge `(π(i), π(j))` iff `G` has edge `(i, j)`.
    pub fn apply_permutation(&self, pi: &Permutation) -> Result<Self> {
        if pi.n() != self.n {
            return Err(Error::SizeMismatch {
                left: self.n,
                right: pi.n(),
            });
        }
        let mut g = Self::empty(self.n)?;
        let mut e = 0;
        for a in 0..self.n {
            for b in a + 1..self.n {
                if self.bit(e) {
                    let (x, y) = (pi.map[a], pi.map[b]);
                    let (x, y) = if x < y { (x, y) } else { (y, x) };
                    g.set_bit(edge_index0(x, y, self.n), true);
                }
                e += 1;
            }
        }
        Ok(g)
    }

    /// Subgraph induced on the strictly increasing 1-based node list
    /// `subset`, relabeled `1..=k` in that order.
    pub fn induced_pattern(&self, subset: &[usize]) -> Result<PatternGraph> {
        if subset.is_empty() {
            return Err(invalid("subset must be nonempty"));
        }
        for w in subset.windows(2) {
            if w[0] >= w[1] {
                return Err(invalid("subset must be strictly increasing"));
            }
        }
        self.check_node(subset[0])?;
        self.check_node(subset[subset.len() - 1])?;
        let k = subset.len();
        let mut h = Self::empty(k)?;
        let mut e = 0;
        for a in 0..k {
            for b in a + 1..k {
                if self.has_edge(subset[a], subset[b]) {
                    h.set_bit(e, true);
                }
                e += 1;
            }
        }
        Ok(PatternGraph(h))
    }

    /// Every pair flips an independent fair coin; identical `(n, seed)`
    /// always gives the identical graph. Same as stream 0 of
    /// [`Graph::random_stream`].
    pub fn random(n: usize, seed: u64) -> Result<Self> {
        Self::random_stream(n, seed, 0)
    }

    /// Independent substreams of one seed, used for parallel sampling:
    /// sample `i` of a run is `random_stream(n, seed, i)`.
    pub fn random_stream(n: usize, seed: u64, stream: u64) -> Result<Self> {
        let mut g = Self::empty(n)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let len = g.bit_len();
        for (w, word) in g.bits.iter_mut().enumerate() {
            let mut x = rng.next_u64();
            let used = len - w * 64;
            if used < 64 {
                x &= (1u64 << used) - 1;
            }
            *word = x;
        }
        Ok(g)
    }
}

pub fn random_graph(n: usize, seed: u64) -> Result<Graph> {
    Graph::random(n, seed)
}

/// Bit-packed adjacency rows, 0-based nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Adjacency {
    n: usize,
    words: usize,
    data: Vec<u64>,
}

impl Adjacency {
    pub fn new(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        Self {
            n,
            words,
            data: vec![0; words * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Words per row.
    pub fn words(&self) -> usize {
        self.words
    }

    #[inline]
    pub fn row(&self, v: usize) -> &[u64] {
        &self.data[v * self.words..(v + 1) * self.words]
    }

    #[inline]
    pub fn has(&self, u: usize, v: usize) -> bool {
        (self.data[u * self.words + v / 64] >> (v % 64)) & 1 == 1
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        self.data[u * self.words + v / 64] |= 1 << (v % 64);
        self.data[v * self.words + u / 64] |= 1 << (u % 64);
    }

    pub fn degree(&self, v: usize) -> usize {
        self.row(v).iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Single-word rows; only valid for `n <= 64`.
    pub(crate) fn masks(&self) -> Vec<u64> {
        debug_assert!(self.n <= 64);
        (0..self.n).map(|v| self.row(v)[0]).collect()
    }
}

/// A bijection of `{1..n}`; `apply(i)` is `π(i)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Permutation {
    // 0-based images
    map: Vec<usize>,
}

impl Permutation {
    /// `mapping[i-1] = π(i)`, 1-based images.
    pub fn new(mapping: Vec<usize>) -> Result<Self> {
        let n = mapping.len();
        let mut seen = vec![false; n];
        let mut map = Vec::with_capacity(n);
        for &x in &mapping {
            if x == 0 || x > n || seen[x - 1] {
                return Err(invalid(format!(
                    "{mapping:?} is not a permutation of 1..={n}"
                )));
            }
            seen[x - 1] = true;
            map.push(x - 1);
        }
        Ok(Self { map })
    }

    #[cfg(test)]
    pub(crate) fn from_zero_based(map: Vec<usize>) -> Self {
        Self { map }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            map: (0..n).collect(),
        }
    }

    /// Transposition of two 1-based labels.
    pub fn swap(n: usize, i: usize, j: usize) -> Result<Self> {
        if i == 0 || j == 0 || i > n || j > n {
            return Err(invalid("swap labels out of range"));
        }
        let mut p = Self::identity(n);
        p.map.swap(i - 1, j - 1);
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.map.len()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.map[i - 1] + 1
    }

    pub fn images(&self) -> Vec<usize> {
        self.map.iter().map(|x| x + 1).collect()
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Result<Self> {
        if self.n() != other.n() {
            return Err(Error::SizeMismatch {
                left: self.n(),
                right: other.n(),
            });
        }
        Ok(Self {
            map: other.map.iter().map(|&x| self.map[x]).collect(),
        })
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.n()];
        for (i, &x) in self.map.iter().enumerate() {
            inv[x] = i;
        }
        Self { map: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.moved_points() == 0
    }

    pub fn moved_points(&self) -> usize {
        self.map
            .iter()
            .enumerate()
            .filter(|(i, &x)| *i != x)
            .count()
    }
}

/// A labeled graph on `k` nodes used as an ordered occurrence pattern.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct PatternGraph(Graph);

impl PatternGraph {
    pub fn new(graph: Graph) -> Self {
        Self(graph)
    }

    pub fn decode(k: usize, bits: &str) -> Result<Self> {
        Graph::decode(k, bits).map(Self)
    }

    pub fn from_code(k: usize, code: u128) -> Result<Self> {
        Graph::from_code(k, code).map(Self)
    }

    pub fn empty(k: usize) -> Result<Self> {
        Graph::empty(k).map(Self)
    }

    pub fn complete(k: usize) -> Result<Self> {
        Graph::complete(k).map(Self)
    }

    /// All `2^(k choose 2)` patterns in ascending code order.
    pub fn all(k: usize) -> Result<Vec<Self>> {
        let len = pair_count(k);
        if len > 24 {
            return Err(Error::LimitExceeded {
                what: "pattern enumeration bits",
                requested: len as u128,
                limit: 24,
            });
        }
        (0..1u128 << len).map(|c| Self::from_code(k, c)).collect()
    }

    pub fn k(&self) -> usize {
        self.0.n()
    }

    pub fn graph(&self) -> &Graph {
        &self.0
    }

    pub fn encode(&self) -> String {
        self.0.encode()
    }

    pub fn code(&self) -> u128 {
        self.0.code().expect("pattern edge strings fit in 128 bits")
    }

    pub fn complement(&self) -> Self {
        Self(self.0.complement())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn edge_index_examples() {
        assert_eq!(edge_index(1, 2, 4).unwrap(), 0);
        assert_eq!(edge_index(3, 4, 4).unwrap(), 5);
        assert_eq!(edge_index(1, 4, 4).unwrap(), 2);
        assert!(edge_index(2, 2, 4).is_err());
        assert!(edge_index(3, 2, 4).is_err());
        assert!(edge_index(0, 2, 4).is_err());
        assert!(edge_index(1, 5, 4).is_err());
    }

    #[test]
    fn edge_index_matches_enumeration() {
        for n in 2..12 {
            let mut pos = 0;
            for i in 1..=n {
                for j in i + 1..=n {
                    assert_eq!(edge_index(i, j, n).unwrap(), pos);
                    pos += 1;
                }
            }
            assert_eq!(pos, pair_count(n));
        }
    }

    #[test]
    fn codec_examples() {
        assert_eq!(Graph::complete(3).unwrap().encode(), "111");
        assert_eq!(Graph::empty(3).unwrap().encode(), "000");
        assert_eq!(Graph::path(3).unwrap().encode(), "101");
        assert_eq!(
            Graph::decode(3, "11"),
            Err(Error::LengthMismatch {
                expected: 3,
                got: 2
            })
        );
        assert!(Graph::decode(3, "1x1").is_err());
    }

    #[test]
    fn permutation_examples() {
        let path = Graph::path(3).unwrap();
        let id = Permutation::identity(3);
        assert_eq!(path.apply_permutation(&id).unwrap().encode(), "101");
        let swap = Permutation::swap(3, 1, 2).unwrap();
        assert_eq!(path.apply_permutation(&swap).unwrap().encode(), "110");
        let k5 = Graph::complete(5).unwrap();
        let pi = Permutation::new(vec![3, 5, 1, 2, 4]).unwrap();
        assert_eq!(k5.apply_permutation(&pi).unwrap(), k5);
        assert!(path.apply_permutation(&Permutation::identity(4)).is_err());
        assert!(Permutation::new(vec![1, 1, 2]).is_err());
    }

    #[test]
    fn induced_pattern_examples() {
        let k5 = Graph::complete(5).unwrap();
        assert_eq!(k5.induced_pattern(&[1, 3, 5]).unwrap().encode(), "111");
        let e = Graph::empty(6).unwrap();
        assert_eq!(e.induced_pattern(&[2, 4, 5, 6]).unwrap().encode(), "000000");
        let c5 = Graph::cycle(5).unwrap();
        assert_eq!(c5.induced_pattern(&[1, 2, 3]).unwrap().encode(), "101");
        assert!(c5.induced_pattern(&[2, 1]).is_err());
        assert!(c5.induced_pattern(&[1, 1]).is_err());
        assert!(c5.induced_pattern(&[1, 6]).is_err());
        assert!(c5.induced_pattern(&[]).is_err());
    }

    #[test]
    fn degrees() {
        let path = Graph::path(3).unwrap();
        assert_eq!(path.degree_sequence(), vec![1, 2, 1]);
        assert_eq!(path.degree(2).unwrap(), 2);
        assert!(path.degree(4).is_err());
        assert_eq!(Graph::complete(7).unwrap().degree(4).unwrap(), 6);
        assert_eq!(Graph::empty(7).unwrap().degree_sequence(), vec![0; 7]);
    }

    #[test]
    fn random_is_deterministic() {
        assert_eq!(Graph::random(5, 9).unwrap(), Graph::random(5, 9).unwrap());
        assert_ne!(
            Graph::random_stream(40, 9, 0).unwrap(),
            Graph::random_stream(40, 9, 1).unwrap()
        );
        let single = Graph::random(1, 3).unwrap();
        assert_eq!(single.encode(), "");
        assert!(Graph::random(0, 3).is_err());
    }

    #[test]
    fn random_edge_count_is_binomial() {
        // Binomial(45, 1/2): mean 22.5, variance 11.25
        let samples = 100_000u64;
        let total: usize = (0..samples)
            .map(|s| Graph::random_stream(10, 77, s).unwrap().edge_count())
            .sum();
        let mean = total as f64 / samples as f64;
        let sigma_of_mean = (11.25f64 / samples as f64).sqrt();
        assert!((mean - 22.5).abs() <= 3.0 * sigma_of_mean, "mean {mean}");
    }

    #[test]
    fn code_round_trip_and_order() {
        let g = Graph::decode(4, "100101").unwrap();
        assert_eq!(g.code(), Some(0b100101));
        assert_eq!(Graph::from_code(4, 0b100101).unwrap(), g);
        assert!(Graph::from_code(3, 8).is_err());
    }

    #[test]
    fn bytes_are_msb_first() {
        let g = Graph::decode(4, "100101").unwrap();
        assert_eq!(g.to_bytes(), vec![0b1001_0100]);
    }

    #[test]
    fn complement_masks_tail() {
        let g = Graph::empty(12).unwrap();
        let c = g.complement();
        assert_eq!(c, Graph::complete(12).unwrap());
        assert_eq!(c.complement(), g);
    }

    #[test]
    fn exhaustive_round_trip_small_n() {
        for n in 1..=6 {
            let len = pair_count(n);
            for code in 0..1u128 << len {
                let s: String = (0..len)
                    .map(|e| {
                        if (code >> (len - 1 - e)) & 1 == 1 {
                            '1'
                        } else {
                            '0'
                        }
                    })
                    .collect();
                assert_eq!(Graph::decode(n, &s).unwrap().encode(), s);
            }
        }
    }

    fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
        (1..=max_n).prop_flat_map(|n| {
            proptest::collection::vec(any::<bool>(), pair_count(n))
                .prop_map(move |bits| Graph::from_bits(n, bits).unwrap())
        })
    }

    fn arb_graph_and_perms(
        max_n: usize,
    ) -> impl Strategy<Value = (Graph, Permutation, Permutation)> {
        arb_graph(max_n).prop_flat_map(|g| {
            let n = g.n();
            let perm = Just((0..n).collect::<Vec<_>>())
                .prop_shuffle()
                .prop_map(Permutation::from_zero_based);
            (Just(g), perm.clone(), perm)
        })
    }

    proptest! {
        #[test]
        fn decode_encode_identity(g in arb_graph(12)) {
            prop_assert_eq!(Graph::decode(g.n(), &g.encode()).unwrap(), g);
        }

        #[test]
        fn degree_sum_is_twice_edges(g in arb_graph(20)) {
            prop_assert_eq!(g.degree_sequence().iter().sum::<usize>(), 2 * g.edge_count());
        }

        #[test]
        fn permutation_action_is_a_bit_permutation((g, p, q) in arb_graph_and_perms(9)) {
            let n = g.n();
            let h = g.apply_permutation(&p).unwrap();
            // bit (i,j) of g lands on bit (p(i),p(j)) of h
            for i in 1..=n {
                for j in i + 1..=n {
                    let (a, b) = (p.apply(i), p.apply(j));
                    let (a, b) = if a < b { (a, b) } else { (b, a) };
                    prop_assert_eq!(
                        g.bit(edge_index(i, j, n).unwrap()),
                        h.bit(edge_index(a, b, n).unwrap())
                    );
                }
            }
            prop_assert_eq!(h.edge_count(), g.edge_count());
            // action respects composition
            let pq = p.compose(&q).unwrap();
            prop_assert_eq!(
                g.apply_permutation(&pq).unwrap(),
                g.apply_permutation(&q).unwrap().apply_permutation(&p).unwrap()
            );
            prop_assert_eq!(
                h.apply_permutation(&p.inverse()).unwrap(),
                g
            );
        }
    }
}
