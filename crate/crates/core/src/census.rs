//! Ordered labeled subgraph counts, Baranyai cover partitions and the
//! frequency deviation bound.

use std::collections::BTreeMap;
use std::f64::consts::LOG2_E;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::flow::FlowNetwork;
use crate::graph::{edge_index0, pair_count, Adjacency, Graph, PatternGraph};
use crate::incompress::k_surrogate;
use crate::report::serialize_f64;

/// Default cap on `n choose k` for cover construction.
pub const DEFAULT_SUBSET_LIMIT: u128 = 1 << 21;
/// Default cap on `k choose 2` for full pattern enumeration.
pub const DEFAULT_PATTERN_BITS_LIMIT: usize = 21;

pub fn binomial(n: usize, k: usize) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

fn binomial_f64(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Partition of all `k`-subsets of `{1..n}` into `h = C(n,k)/(n/k)` covers,
/// each cover a set of `n/k` disjoint `k`-subsets whose union is `{1..n}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverFamily {
    pub n: usize,
    pub k: usize,
    /// Each subset sorted ascending, 1-based.
    pub covers: Vec<Vec<Vec<usize>>>,
}

impl CoverFamily {
    pub fn h(&self) -> usize {
        self.covers.len()
    }

    /// Subsets per cover, `n / k`.
    pub fn parts(&self) -> usize {
        self.n / self.k
    }

    /// Checks all three family invariants.
    pub fn validate(&self) -> Result<()> {
        let (n, k) = (self.n, self.k);
        if k == 0 || n % k != 0 {
            return Err(Error::NotDivisible { n, k });
        }
        let total = binomial(n, k).ok_or_else(|| invalid("n choose k overflows"))?;
        if (self.h() * self.parts()) as u128 != total {
            return Err(invalid(format!(
                "{} covers of {} parts do not cover {total} subsets",
                self.h(),
                self.parts()
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for (i, cover) in self.covers.iter().enumerate() {
            let mut hit = vec![false; n + 1];
            if cover.len() != self.parts() {
                return Err(invalid(format!("cover {i} has {} parts", cover.len())));
            }
            for s in cover {
                if s.len() != k || s.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(invalid(format!("cover {i} holds malformed subset {s:?}")));
                }
                for &x in s {
                    if x == 0 || x > n || hit[x] {
                        return Err(invalid(format!("cover {i} is not a partition at {x}")));
                    }
                    hit[x] = true;
                }
                if !seen.insert(s.clone()) {
                    return Err(invalid(format!("subset {s:?} appears twice")));
                }
            }
        }
        Ok(())
    }
}

pub fn baranyai_covers(n: usize, k: usize) -> Result<CoverFamily> {
    baranyai_covers_with_limit(n, k, DEFAULT_SUBSET_LIMIT)
}

/// Builds the cover family by adding nodes `1..=n` one at a time. Before
/// node `m` is placed, every set `S ⊆ {1..m-1}` fills exactly
/// `C(n-m+1, k-|S|)` cells of the `h × (n/k)` array; a flow network sends
/// one unit per cover row to the cell that receives `m`, with each content
/// class `S` absorbing `C(n-m, k-|S|-1)` units. A fractional solution
/// exists, so an integral one does too.
pub fn baranyai_covers_with_limit(n: usize, k: usize, limit: u128) -> Result<CoverFamily> {
    if k == 0 || n == 0 {
        return Err(invalid("need n >= 1 and k >= 1"));
    }
    if !n.is_multiple_of(k) {
        return Err(Error::NotDivisible { n, k });
    }
    let total = binomial(n, k)
        .filter(|&t| t <= limit)
        .ok_or(Error::LimitExceeded {
            what: "cover family subsets",
            requested: binomial(n, k).unwrap_or(u128::MAX),
            limit,
        })?;
    let parts = n / k;
    let h = total as usize / parts;
    let mut cells: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new(); parts]; h];

    for m in 1..=n {
        let remaining = n - m;
        let mut groups: BTreeMap<&[usize], usize> = BTreeMap::new();
        for row in &cells {
            for cell in row {
                let next = groups.len();
                groups.entry(cell.as_slice()).or_insert(next);
            }
        }
        // renumber in sorted content order for determinism
        let order: Vec<&[usize]> = groups.keys().copied().collect();
        let index: BTreeMap<&[usize], usize> =
            order.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        let demand = |s: &[usize]| -> i64 {
            if s.len() >= k {
                0
            } else {
                binomial(remaining, k - s.len() - 1).expect("bounded by total") as i64
            }
        };

        let source = 0;
        let row_node = |r: usize| 1 + r;
        let cell_node = |r: usize, j: usize| 1 + h + r * parts + j;
        let group_node = |g: usize| 1 + h + h * parts + g;
        let sink = 1 + h + h * parts + order.len();
        let mut net = FlowNetwork::new(sink + 1);
        for r in 0..h {
            net.add_arc(source, row_node(r), 1);
        }
        let mut placement = Vec::new();
        for (r, row) in cells.iter().enumerate() {
            for (j, cell) in row.iter().enumerate() {
                if demand(cell) > 0 {
                    let arc = net.add_arc(row_node(r), cell_node(r, j), 1);
                    net.add_arc(cell_node(r, j), group_node(index[cell.as_slice()]), 1);
                    placement.push((arc, r, j));
                }
            }
        }
        for (g, s) in order.iter().enumerate() {
            let d = demand(s);
            if d > 0 {
                net.add_arc(group_node(g), sink, d);
            }
        }
        let flow = net.max_flow(source, sink);
        assert_eq!(
            flow, h as i64,
            "integral cover flow must saturate every row"
        );
        for (arc, r, j) in placement {
            if net.flow(arc) == 1 {
                cells[r][j].push(m);
            }
        }
    }
    for row in &mut cells {
        row.sort();
    }
    Ok(CoverFamily {
        n,
        k,
        covers: cells,
    })
}

/// Code of the pattern induced on 0-based sorted `subset`, same bit
/// convention as [`Graph::code`].
fn induced_code(adj: &Adjacency, subset: &[usize]) -> u128 {
    let k = subset.len();
    let len = pair_count(k);
    let mut code = 0u128;
    for a in 0..k {
        for b in a + 1..k {
            if adj.has(subset[a], subset[b]) {
                code |= 1 << (len - 1 - edge_index0(a, b, k));
            }
        }
    }
    code
}

/// Calls `f` on every `k`-subset of `0..n` in lexicographic order.
fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut t = k;
        loop {
            if t == 0 {
                return;
            }
            t -= 1;
            if idx[t] < n - k + t {
                break;
            }
            if t == 0 {
                return;
            }
        }
        idx[t] += 1;
        for u in t + 1..k {
            idx[u] = idx[u - 1] + 1;
        }
    }
}

fn check_pattern_size(g: &Graph, k: usize) -> Result<()> {
    if k > g.n() {
        return Err(invalid(format!(
            "pattern on {k} nodes exceeds graph on {}",
            g.n()
        )));
    }
    Ok(())
}

/// `#H(G)`: number of `k`-subsets whose induced, order-relabeled subgraph is `H`.
pub fn count_occurrences(g: &Graph, h: &PatternGraph) -> Result<u64> {
    check_pattern_size(g, h.k())?;
    let adj = g.adjacency();
    let target = h.code();
    let mut count = 0;
    for_each_subset(g.n(), h.k(), |s| {
        if induced_code(&adj, s) == target {
            count += 1;
        }
    });
    Ok(count)
}

/// Histogram over all `2^(k choose 2)` pattern codes.
pub fn census_counts(g: &Graph, k: usize) -> Result<Vec<u64>> {
    census_counts_with_limit(g, k, DEFAULT_PATTERN_BITS_LIMIT)
}

pub fn census_counts_with_limit(g: &Graph, k: usize, bits_limit: usize) -> Result<Vec<u64>> {
    if k == 0 {
        return Err(invalid("patterns need at least one node"));
    }
    check_pattern_size(g, k)?;
    let bits = pair_count(k);
    if bits > bits_limit {
        return Err(Error::LimitExceeded {
            what: "pattern enumeration bits",
            requested: bits as u128,
            limit: bits_limit as u128,
        });
    }
    let adj = g.adjacency();
    let mut hist = vec![0u64; 1 << bits];
    for_each_subset(g.n(), k, |s| hist[induced_code(&adj, s) as usize] += 1);
    Ok(hist)
}

fn check_family(g: &Graph, h: &PatternGraph, family: &CoverFamily) -> Result<()> {
    if family.n != g.n() || family.k != h.k() {
        return Err(invalid(format!(
            "cover family for (n={}, k={}) used with graph n={} and pattern k={}",
            family.n,
            family.k,
            g.n(),
            h.k()
        )));
    }
    Ok(())
}

/// `#H(G, i)`: occurrences among the disjoint subsets of cover `i`.
pub fn count_occurrences_in_cover(
    g: &Graph,
    h: &PatternGraph,
    family: &CoverFamily,
    i: usize,
) -> Result<usize> {
    check_family(g, h, family)?;
    let cover = family
        .covers
        .get(i)
        .ok_or_else(|| invalid(format!("cover index {i} outside 0..{}", family.h())))?;
    let adj = g.adjacency();
    let target = h.code();
    Ok(cover
        .iter()
        .filter(|s| {
            let zero_based: Vec<usize> = s.iter().map(|x| x - 1).collect();
            induced_code(&adj, &zero_based) == target
        })
        .count())
}

/// `#H(G, i)` for every cover.
pub fn per_cover_counts(g: &Graph, h: &PatternGraph, family: &CoverFamily) -> Result<Vec<usize>> {
    check_family(g, h, family)?;
    let adj = g.adjacency();
    let target = h.code();
    Ok(family
        .covers
        .iter()
        .map(|cover| {
            cover
                .iter()
                .filter(|s| {
                    let zero_based: Vec<usize> = s.iter().map(|x| x - 1).collect();
                    induced_code(&adj, &zero_based) == target
                })
                .count()
        })
        .collect())
}

/// Which constant multiplies the bracket in `alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlphaVariant {
    /// `alpha = (K_H + delta + log2 h + c) 3 / log2 e`
    #[default]
    Unit,
    /// `alpha = (K_H + delta + log2 h + c) 3 l / log2 e` with `l = k choose 2`,
    /// scaled by the block length of the pattern encoding.
    BlockScaled,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrequencyBound {
    pub n: usize,
    pub k: usize,
    #[serde(serialize_with = "serialize_f64")]
    pub k_h: f64,
    #[serde(serialize_with = "serialize_f64")]
    pub delta: f64,
    #[serde(serialize_with = "serialize_f64")]
    pub c: f64,
    pub variant: AlphaVariant,
    /// Number of covers, `C(n,k) / (n/k)`.
    #[serde(serialize_with = "serialize_f64")]
    pub h: f64,
    #[serde(serialize_with = "serialize_f64")]
    pub p: f64,
    #[serde(serialize_with = "serialize_f64")]
    pub alpha: f64,
    #[serde(serialize_with = "serialize_f64")]
    pub bound: f64,
}

/// `C(n,k) sqrt(alpha (k/n) p)`, `p = 2^-(k choose 2)`.
pub fn frequency_bound(
    n: usize,
    k: usize,
    k_h: f64,
    delta: f64,
    c: f64,
    variant: AlphaVariant,
) -> Result<FrequencyBound> {
    if k == 0 || n == 0 || k > n {
        return Err(invalid(format!("need 1 <= k <= n, got n={n}, k={k}")));
    }
    if !n.is_multiple_of(k) {
        return Err(Error::NotDivisible { n, k });
    }
    for (name, v) in [("K_H", k_h), ("delta", delta), ("c", c)] {
        if !v.is_finite() || v < 0.0 {
            return Err(invalid(format!(
                "{name} must be finite and nonnegative, got {v}"
            )));
        }
    }
    let subsets = binomial_f64(n, k);
    let h = subsets / (n / k) as f64;
    let l = pair_count(k) as f64;
    let p = (-l).exp2();
    let factor = match variant {
        AlphaVariant::Unit => 3.0,
        AlphaVariant::BlockScaled => 3.0 * l,
    };
    let alpha = (k_h + delta + h.log2() + c) * factor / LOG2_E;
    let bound = subsets * (alpha * (k as f64 / n as f64) * p).sqrt();
    Ok(FrequencyBound {
        n,
        k,
        k_h,
        delta,
        c,
        variant,
        h,
        p,
        alpha,
        bound,
    })
}

/// Default surrogate for `K(H|n)`: `C(k,2) + 2 log2 C(k,2) + c_k`.
pub fn pattern_k_surrogate(k: usize, c_k: f64) -> f64 {
    k_surrogate(pair_count(k), c_k)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CensusParams {
    /// `None` selects [`pattern_k_surrogate`].
    pub k_h: Option<f64>,
    pub c_k: f64,
    pub delta: f64,
    pub c: f64,
    pub variant: AlphaVariant,
}

impl Default for CensusParams {
    fn default() -> Self {
        Self {
            k_h: None,
            c_k: 0.0,
            delta: 0.0,
            c: 0.0,
            variant: AlphaVariant::Unit,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CensusResult {
    /// Edge string of `H`.
    pub pattern: String,
    pub k: usize,
    pub total: u64,
    /// `#H(G,i)` per cover; empty when no cover family was supplied.
    pub per_cover: Vec<usize>,
    #[serde(serialize_with = "serialize_f64")]
    pub p: f64,
    #[serde(serialize_with = "serialize_f64")]
    pub expected: f64,
    /// `None` when `k` does not divide `n`.
    pub bound: Option<FrequencyBound>,
    pub within: Option<bool>,
}

/// One pattern's census against the frequency bound. `total_hint` lets a
/// caller that already holds the histogram skip the rescan.
pub fn census(
    g: &Graph,
    h: &PatternGraph,
    family: Option<&CoverFamily>,
    params: &CensusParams,
    total_hint: Option<u64>,
) -> Result<CensusResult> {
    let (n, k) = (g.n(), h.k());
    let total = match total_hint {
        Some(t) => t,
        None => count_occurrences(g, h)?,
    };
    let per_cover = match family {
        Some(f) => per_cover_counts(g, h, f)?,
        None => Vec::new(),
    };
    let p = (-(pair_count(k) as f64)).exp2();
    let expected = binomial_f64(n, k) * p;
    let bound = if n % k == 0 {
        let k_h = params
            .k_h
            .unwrap_or_else(|| pattern_k_surrogate(k, params.c_k));
        Some(frequency_bound(
            n,
            k,
            k_h,
            params.delta,
            params.c,
            params.variant,
        )?)
    } else {
        None
    };
    let within = bound.map(|b| (total as f64 - expected).abs() <= b.bound);
    Ok(CensusResult {
        pattern: h.encode(),
        k,
        total,
        per_cover,
        p,
        expected,
        bound,
        within,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PatternPresence {
    pub k: usize,
    pub all_present: bool,
    /// Edge strings of the patterns that never occur.
    pub missing: Vec<String>,
}

pub fn all_patterns_present(g: &Graph, k: usize) -> Result<PatternPresence> {
    all_patterns_present_with_limit(g, k, DEFAULT_PATTERN_BITS_LIMIT)
}

pub fn all_patterns_present_with_limit(
    g: &Graph,
    k: usize,
    bits_limit: usize,
) -> Result<PatternPresence> {
    let hist = census_counts_with_limit(g, k, bits_limit)?;
    let missing: Vec<String> = hist
        .iter()
        .enumerate()
        .filter(|(_, &c)| c == 0)
        .map(|(code, _)| {
            PatternGraph::from_code(k, code as u128)
                .expect("code below 2^(k choose 2)")
                .encode()
        })
        .collect();
    Ok(PatternPresence {
        k,
        all_present: missing.is_empty(),
        missing,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KThreshold {
    pub n: usize,
    /// `floor(sqrt(2 log2 n))`
    pub k: usize,
    /// `C(k,2) + 2 log2 C(k,2) + c_k`
    #[serde(serialize_with = "serialize_f64")]
    pub k_surrogate: f64,
}

/// `floor(sqrt(2 log2 n))`, computed exactly as the largest `k` with
/// `2^(k^2) <= n^2`.
pub fn k_threshold(n: usize, c_k: f64) -> Result<KThreshold> {
    if n < 2 {
        return Err(invalid("k_threshold needs n >= 2"));
    }
    let n2 = (n as u128) * (n as u128);
    let mut k = 0usize;
    while ((k + 1) * (k + 1)) < 128 && (1u128 << ((k + 1) * (k + 1))) <= n2 {
        k += 1;
    }
    Ok(KThreshold {
        n,
        k,
        k_surrogate: pattern_k_surrogate(k, c_k),
    })
}
