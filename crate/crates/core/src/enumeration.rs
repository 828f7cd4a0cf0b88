//! Automorphism groups, canonical forms and unlabeled graph counts.
//!
//! The canonical form of a graph is the lexicographically smallest edge
//! string over all relabelings. Enumerating unlabeled graphs means keeping
//! exactly the labeled graphs that are their own canonical form, which is
//! the same set as "first labeled graph of its isomorphism class in
//! ascending edge-string order".

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{invalid, Error, Result};
use crate::exec::Exec;
use crate::graph::{edge_index0, pair_count, Graph};
use crate::report::{serialize_display, serialize_f64, Real};

pub const DEFAULT_AUT_LIMIT: usize = 10;
pub const DEFAULT_CANON_LIMIT: usize = 10;
pub const DEFAULT_ENUM_LIMIT: usize = 7;
pub const BURNSIDE_LIMIT: usize = 32;
// aut_size and orbit sizes are u64; 20! < 2^64
const AUT_HARD_LIMIT: usize = 20;
// codes are u128
const CANON_HARD_LIMIT: usize = 16;
// the orbit-closure oracle keeps a bit per labeled graph
const CLOSURE_HARD_LIMIT: usize = 8;

fn limit_check(what: &'static str, n: usize, limit: usize) -> Result<()> {
    if n > limit {
        return Err(Error::LimitExceeded {
            what,
            requested: n as u128,
            limit: limit as u128,
        });
    }
    Ok(())
}

fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * i)
}

/// Single-word adjacency rows straight from an edge code.
fn masks_from_code(n: usize, code: u128) -> Vec<u64> {
    let len = pair_count(n);
    let mut masks = vec![0u64; n];
    let mut e = 0;
    for a in 0..n {
        for b in a + 1..n {
            if (code >> (len - 1 - e)) & 1 == 1 {
                masks[a] |= 1 << b;
                masks[b] |= 1 << a;
            }
            e += 1;
        }
    }
    masks
}

fn masks_of(g: &Graph) -> Vec<u64> {
    g.adjacency().masks()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AutReport {
    pub n: usize,
    /// `|Aut(G)|`
    pub aut_size: u64,
    /// Largest number of nodes moved by a single automorphism.
    pub moved: usize,
    pub rigid: bool,
    /// `n! / |Aut(G)|`, the number of distinct labelings.
    pub orbit_size: u64,
}

/// Isomorphism-invariant vertex classes: degree, then the sorted degrees of
/// the neighbours.
fn vertex_classes(masks: &[u64]) -> Vec<usize> {
    let deg: Vec<u32> = masks.iter().map(|m| m.count_ones()).collect();
    let keys: Vec<(u32, Vec<u32>)> = masks
        .iter()
        .enumerate()
        .map(|(v, &m)| {
            let mut nd: Vec<u32> = (0..masks.len())
                .filter(|u| m >> u & 1 == 1)
                .map(|u| deg[u])
                .collect();
            nd.sort_unstable();
            (deg[v], nd)
        })
        .collect();
    let mut ids = BTreeMap::new();
    for k in &keys {
        let next = ids.len();
        ids.entry(k.clone()).or_insert(next);
    }
    keys.iter().map(|k| ids[k]).collect()
}

struct AutSearch<'a> {
    masks: &'a [u64],
    class: Vec<usize>,
    order: Vec<usize>,
    image: Vec<usize>,
    count: u64,
    max_moved: usize,
}

impl AutSearch<'_> {
    fn run(&mut self, depth: usize, used: u64, moved: usize) {
        let n = self.masks.len();
        if depth == n {
            self.count += 1;
            self.max_moved = self.max_moved.max(moved);
            return;
        }
        let v = self.order[depth];
        // where v's adjacency to the already-mapped nodes must land
        let mut want = 0u64;
        for &u in &self.order[..depth] {
            if self.masks[v] >> u & 1 == 1 {
                want |= 1 << self.image[u];
            }
        }
        for w in 0..n {
            if used >> w & 1 == 1 || self.class[w] != self.class[v] {
                continue;
            }
            if self.masks[w] & used != want {
                continue;
            }
            self.image[v] = w;
            self.run(depth + 1, used | 1 << w, moved + (v != w) as usize);
        }
    }
}

pub fn automorphisms(g: &Graph) -> Result<AutReport> {
    automorphisms_with_limit(g, DEFAULT_AUT_LIMIT)
}

/// Enumerates every automorphism by backtracking over partial maps that
/// respect vertex classes and adjacency to everything mapped so far.
pub fn automorphisms_with_limit(g: &Graph, limit: usize) -> Result<AutReport> {
    let n = g.n();
    limit_check("automorphism search nodes", n, limit.min(AUT_HARD_LIMIT))?;
    let masks = masks_of(g);
    Ok(aut_report_from_masks(&masks))
}

fn aut_report_from_masks(masks: &[u64]) -> AutReport {
    let n = masks.len();
    let class = vertex_classes(masks);
    let mut size = vec![0usize; n];
    for &c in &class {
        size[c] += 1;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (size[class[v]], v));
    let mut search = AutSearch {
        masks,
        class,
        order,
        image: vec![0; n],
        count: 0,
        max_moved: 0,
    };
    search.run(0, 0, 0);
    let nf: u64 = (1..=n as u64).product();
    AutReport {
        n,
        aut_size: search.count,
        moved: search.max_moved,
        rigid: search.count == 1,
        orbit_size: nf / search.count,
    }
}

/// `m`: most nodes moved by any automorphism; 0 exactly for rigid graphs.
pub fn moved_class(g: &Graph) -> Result<usize> {
    automorphisms(g).map(|r| r.moved)
}

/// `n^m`, the bound on `|Aut(G)|` for graphs whose automorphisms move `m` nodes.
pub fn aut_bound(n: usize, m: usize) -> BigUint {
    BigUint::from(n).pow(m as u32)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbClassBound {
    pub n: usize,
    pub m: usize,
    /// `-m (n/2 - 3m/8 - log2 n)`
    #[serde(serialize_with = "serialize_f64")]
    pub log2: f64,
    #[serde(serialize_with = "serialize_f64")]
    pub value: f64,
    /// True unless `value < 1`.
    pub vacuous: bool,
}

/// `2^(-m (n/2 - 3m/8 - log2 n))`, returned as-is even when it exceeds 1.
pub fn prob_class_bound(n: usize, m: usize) -> Result<ProbClassBound> {
    if m > n || n == 0 {
        return Err(invalid(format!(
            "need 0 <= m <= n, n >= 1; got n={n}, m={m}"
        )));
    }
    let (nf, mf) = (n as f64, m as f64);
    let log2 = -mf * (nf / 2.0 - 3.0 * mf / 8.0 - nf.log2());
    let value = log2.exp2();
    Ok(ProbClassBound {
        n,
        m,
        log2,
        value,
        vacuous: value >= 1.0 || value.is_nan(),
    })
}

struct Canon<'a> {
    masks: &'a [u64],
    len: usize,
    best: u128,
    have_best: bool,
    // stop as soon as any labeling beats `best`
    early_exit: bool,
    beaten: bool,
}

impl Canon<'_> {
    fn search(&mut self, t: usize, cells: &[u64], prefix: u128, filled: usize) {
        if self.beaten {
            return;
        }
        let n = self.masks.len();
        if t == n {
            if !self.have_best || prefix < self.best {
                if self.early_exit {
                    self.beaten = true;
                }
                self.best = prefix;
                self.have_best = true;
            }
            return;
        }
        let first = cells[0];
        let row_len = n - 1 - t;
        let row_of = |v: usize| -> u128 {
            let mut row = 0u128;
            let adj = self.masks[v];
            for (ci, &cell) in cells.iter().enumerate() {
                let cell = if ci == 0 { cell & !(1 << v) } else { cell };
                let size = cell.count_ones();
                let ones = (cell & adj).count_ones();
                row = (row << size) | ((1u128 << ones) - 1);
            }
            row
        };
        let mut min_row = u128::MAX;
        let mut cands = Vec::new();
        let mut rest = first;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let r = row_of(v);
            if r < min_row {
                min_row = r;
                cands.clear();
            }
            if r == min_row {
                cands.push(v);
            }
        }
        let shift = self.len - filled - row_len;
        let next_prefix = prefix | (min_row << shift);
        let next_filled = filled + row_len;
        if self.have_best {
            let top = |x: u128| {
                if next_filled == 0 {
                    0
                } else {
                    x >> (self.len - next_filled)
                }
            };
            let (mine, theirs) = (top(next_prefix), top(self.best));
            if mine > theirs {
                return;
            }
            if mine < theirs && self.early_exit {
                self.beaten = true;
                return;
            }
        }
        let mut explored: Vec<usize> = Vec::new();
        for &v in &cands {
            let twin = explored
                .iter()
                .any(|&u| (self.masks[u] & !(1 << v)) == (self.masks[v] & !(1 << u)));
            if twin {
                continue;
            }
            explored.push(v);
            let adj = self.masks[v];
            let mut next = Vec::with_capacity(cells.len() + 1);
            for (ci, &cell) in cells.iter().enumerate() {
                let cell = if ci == 0 { cell & !(1 << v) } else { cell };
                for part in [cell & !adj, cell & adj] {
                    if part != 0 {
                        next.push(part);
                    }
                }
            }
            self.search(t + 1, &next, next_prefix, next_filled);
            if self.beaten {
                return;
            }
        }
    }
}

fn all_nodes(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn canonical_code_of(masks: &[u64]) -> u128 {
    let n = masks.len();
    let mut c = Canon {
        masks,
        len: pair_count(n),
        best: 0,
        have_best: false,
        early_exit: false,
        beaten: false,
    };
    c.search(0, &[all_nodes(n)], 0, 0);
    c.best
}

fn is_canonical_code(n: usize, code: u128) -> bool {
    let masks = masks_from_code(n, code);
    let mut c = Canon {
        masks: &masks,
        len: pair_count(n),
        best: code,
        have_best: true,
        early_exit: true,
        beaten: false,
    };
    c.search(0, &[all_nodes(n)], 0, 0);
    !c.beaten
}

pub fn canonical_form(g: &Graph) -> Result<Graph> {
    canonical_form_with_limit(g, DEFAULT_CANON_LIMIT)
}

/// Lexicographically smallest edge string over all relabelings. The search
/// assigns labels `1, 2, …` in turn; the row of label `t` only depends on
/// which node gets `t` and the ordered partition induced by earlier rows,
/// so only nodes achieving the smallest row are branched on.
pub fn canonical_form_with_limit(g: &Graph, limit: usize) -> Result<Graph> {
    let n = g.n();
    limit_check("canonical form nodes", n, limit.min(CANON_HARD_LIMIT))?;
    Graph::from_code(n, canonical_code_of(&masks_of(g)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CanonicalIndex {
    pub n: usize,
    /// Rank of the canonical form among all canonical forms on `n` nodes.
    pub index: usize,
    pub g_n: usize,
    /// `ceil(log2 g_n)`
    pub bit_length: u32,
    /// `n choose 2`
    pub encoded_len: usize,
    /// `n log2 n`
    #[serde(serialize_with = "serialize_f64")]
    pub n_log2_n: f64,
}

fn ceil_log2(x: usize) -> u32 {
    if x <= 1 {
        0
    } else {
        usize::BITS - (x - 1).leading_zeros()
    }
}

pub fn canonical_index(g: &Graph, exec: Exec) -> Result<CanonicalIndex> {
    let reps = enumerate_unlabeled(g.n(), exec)?;
    canonical_index_in(&reps, g)
}

/// Index lookup against an existing enumeration for `g.n()`.
pub fn canonical_index_in(reps: &Unlabeled, g: &Graph) -> Result<CanonicalIndex> {
    let n = g.n();
    if reps.counts.n != n {
        return Err(Error::SizeMismatch {
            left: reps.counts.n,
            right: n,
        });
    }
    let code = canonical_code_of(&masks_of(g));
    let index = reps
        .codes
        .binary_search(&code)
        .map_err(|_| invalid("canonical form missing from enumeration"))?;
    let g_n = reps.codes.len();
    Ok(CanonicalIndex {
        n,
        index,
        g_n,
        bit_length: ceil_log2(g_n),
        encoded_len: pair_count(n),
        n_log2_n: n as f64 * (n as f64).log2(),
    })
}

/// Exact unlabeled count plus the asymptotic sandwich around it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnlabeledCounts {
    pub n: usize,
    pub g_n: BigUint,
    /// `g_n n! / 2^(n choose 2)`, the mean automorphism group size.
    pub e_n: BigRational,
    /// `2^(n choose 2) / n!`
    pub lower: BigRational,
    /// `lower (1 + 4 n^4 / 2^n)`
    pub upper: BigRational,
}

/// Nearest `f64`, or NaN when out of range.
pub fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

impl UnlabeledCounts {
    pub fn from_g(n: usize, g_n: BigUint) -> Self {
        let labeled = BigInt::one() << pair_count(n);
        let nf = BigInt::from(factorial(n));
        let g = BigInt::from(g_n.clone());
        let e_n = BigRational::new(g * &nf, labeled.clone());
        let lower = BigRational::new(labeled, nf);
        let n4 = BigInt::from(n).pow(4);
        let slack = BigRational::new(BigInt::from(4) * n4, BigInt::one() << n);
        let upper = &lower * (BigRational::one() + slack);
        Self {
            n,
            g_n,
            e_n,
            lower,
            upper,
        }
    }

    /// `lower <= g_n <= upper`, exactly.
    pub fn within_bounds(&self) -> bool {
        let g = BigRational::from_integer(BigInt::from(self.g_n.clone()));
        self.lower <= g && g <= self.upper
    }
}

impl Serialize for UnlabeledCounts {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("UnlabeledCounts", 9)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("g_n", &self.g_n.to_string())?;
        st.serialize_field("E_n", &self.e_n.to_string())?;
        st.serialize_field("E_n_decimal", &Real(ratio_to_f64(&self.e_n)))?;
        st.serialize_field("lower", &self.lower.to_string())?;
        st.serialize_field("lower_decimal", &Real(ratio_to_f64(&self.lower)))?;
        st.serialize_field("upper", &self.upper.to_string())?;
        st.serialize_field("upper_decimal", &Real(ratio_to_f64(&self.upper)))?;
        st.serialize_field("within_bounds", &self.within_bounds())?;
        st.end()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Unlabeled {
    /// Canonical codes in ascending order.
    pub codes: Vec<u128>,
    pub counts: UnlabeledCounts,
}

impl Unlabeled {
    pub fn graphs(&self) -> Vec<Graph> {
        self.codes
            .iter()
            .map(|&c| Graph::from_code(self.counts.n, c).expect("codes fit n"))
            .collect()
    }
}

pub fn enumerate_unlabeled(n: usize, exec: Exec) -> Result<Unlabeled> {
    enumerate_unlabeled_with_limit(n, DEFAULT_ENUM_LIMIT, exec)
}

const CHUNK_BITS: usize = 12;

/// Splits the `2^(n choose 2)` edge strings into contiguous ranges, keeps the
/// strings that are their own canonical form, and concatenates in range
/// order.
pub fn enumerate_unlabeled_with_limit(n: usize, limit: usize, exec: Exec) -> Result<Unlabeled> {
    if n == 0 {
        return Err(invalid("graphs need at least one node"));
    }
    limit_check(
        "exhaustive enumeration nodes",
        n,
        limit.min(CANON_HARD_LIMIT),
    )?;
    let len = pair_count(n);
    if len > 40 {
        return Err(Error::LimitExceeded {
            what: "exhaustive enumeration bits",
            requested: len as u128,
            limit: 40,
        });
    }
    let total = 1u64 << len;
    let chunk_bits = CHUNK_BITS.min(len);
    let chunks = total >> chunk_bits;
    let found = exec.map_range(0..chunks, |c| {
        let start = c << chunk_bits;
        (start..start + (1 << chunk_bits))
            .filter(|&code| is_canonical_code(n, code as u128))
            .map(|code| code as u128)
            .collect::<Vec<_>>()
    });
    let codes: Vec<u128> = found.into_iter().flatten().collect();
    let g_n = BigUint::from(codes.len());
    Ok(Unlabeled {
        codes,
        counts: UnlabeledCounts::from_g(n, g_n),
    })
}

/// Permutations of `0..n` in lexicographic order.
fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut p: Vec<usize> = (0..n).collect();
    let mut out = vec![p.clone()];
    loop {
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else {
            return out;
        };
        let j = (i..n)
            .rev()
            .find(|&j| p[j] > p[i - 1])
            .expect("pivot exists");
        p.swap(i - 1, j);
        p[i..].reverse();
        out.push(p.clone());
    }
}

/// Walks every edge string in ascending order and keeps each one that is not
/// a relabeling of an earlier kept string; all relabelings of a kept string
/// are marked as seen.
pub fn enumerate_by_orbit_closure(n: usize) -> Result<Vec<u128>> {
    if n == 0 {
        return Err(invalid("graphs need at least one node"));
    }
    limit_check("orbit closure nodes", n, CLOSURE_HARD_LIMIT)?;
    let len = pair_count(n);
    // shift[p][e]: bit shift (from the least significant end) that edge e
    // lands on under permutation p
    let tables: Vec<Vec<usize>> = permutations(n)
        .iter()
        .map(|p| {
            let mut t = Vec::with_capacity(len);
            for a in 0..n {
                for b in a + 1..n {
                    let (x, y) = if p[a] < p[b] {
                        (p[a], p[b])
                    } else {
                        (p[b], p[a])
                    };
                    t.push(len - 1 - edge_index0(x, y, n));
                }
            }
            t
        })
        .collect();
    let total = 1usize << len;
    let mut seen = vec![0u64; total.div_ceil(64)];
    let mut reps = Vec::new();
    for code in 0..total {
        if seen[code / 64] >> (code % 64) & 1 == 1 {
            continue;
        }
        reps.push(code as u128);
        for t in &tables {
            let mut img = 0usize;
            for (e, &sh) in t.iter().enumerate() {
                if code >> (len - 1 - e) & 1 == 1 {
                    img |= 1 << sh;
                }
            }
            seen[img / 64] |= 1 << (img % 64);
        }
    }
    Ok(reps)
}

fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(left: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for part in (1..=max.min(left)).rev() {
            cur.push(part);
            rec(left - part, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// Number of unlabeled graphs by orbit counting: averaging `2^(pair cycles)`
/// over `S_n`, grouped by cycle type. A permutation of cycle type `λ` splits
/// the node pairs into `Σ floor(λ_i/2) + Σ_{i<j} gcd(λ_i, λ_j)` cycles.
pub fn burnside_g(n: usize) -> Result<BigUint> {
    if n == 0 {
        return Err(invalid("graphs need at least one node"));
    }
    limit_check("Burnside partition enumeration", n, BURNSIDE_LIMIT)?;
    let nf = factorial(n);
    let mut sum = BigUint::zero();
    for lambda in partitions(n) {
        let mut cycles = 0usize;
        for (i, &a) in lambda.iter().enumerate() {
            cycles += a / 2;
            for &b in &lambda[i + 1..] {
                cycles += a.gcd(&b);
            }
        }
        // class size n! / (Π λ_i · Π mult_j!)
        let mut centralizer = BigUint::one();
        for &a in &lambda {
            centralizer *= a;
        }
        let mut mult: BTreeMap<usize, usize> = BTreeMap::new();
        for &a in &lambda {
            *mult.entry(a).or_default() += 1;
        }
        for &m in mult.values() {
            centralizer *= factorial(m);
        }
        sum += (&nf / centralizer) << cycles;
    }
    let (g, rem) = sum.div_rem(&nf);
    assert!(rem.is_zero(), "orbit count must be an integer");
    Ok(g)
}

/// Labeled-graph counts per moved class `m`, aggregated from the unlabeled
/// representatives (each contributes its orbit size).
pub fn moved_histogram(reps: &Unlabeled, exec: Exec) -> BTreeMap<usize, u64> {
    let n = reps.counts.n;
    let reports = exec.map_slice(&reps.codes, |&c| {
        aut_report_from_masks(&masks_from_code(n, c))
    });
    let mut hist = BTreeMap::new();
    for r in reports {
        *hist.entry(r.moved).or_default() += r.orbit_size;
    }
    hist
}

/// Unlabeled census document: counts, bounds, per-class histogram and the
/// Burnside cross-check.
#[derive(Debug, Clone, Serialize)]
pub struct UnlabeledCensus {
    #[serde(flatten)]
    pub counts: UnlabeledCounts,
    #[serde(serialize_with = "serialize_display")]
    pub burnside_g_n: BigUint,
    pub oracle_agrees: bool,
    /// Labeled graphs per moved class `m`.
    pub per_m_histogram: BTreeMap<usize, u64>,
    /// Fraction of labeled graphs that are rigid.
    #[serde(serialize_with = "serialize_f64")]
    pub rigid_fraction: f64,
}

pub fn unlabeled_census(reps: &Unlabeled, exec: Exec) -> Result<UnlabeledCensus> {
    let n = reps.counts.n;
    let burnside = burnside_g(n)?;
    let per_m_histogram = moved_histogram(reps, exec);
    let rigid = per_m_histogram.get(&0).copied().unwrap_or(0);
    Ok(UnlabeledCensus {
        oracle_agrees: burnside == reps.counts.g_n,
        counts: reps.counts.clone(),
        burnside_g_n: burnside,
        rigid_fraction: rigid as f64 / (pair_count(n) as f64).exp2(),
        per_m_histogram,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RigidityReport {
    pub n: usize,
    pub aut_size: u64,
    pub rigid: bool,
    #[serde(serialize_with = "serialize_f64")]
    pub delta_hat: f64,
    /// `n + log2 n + 2`
    #[serde(serialize_with = "serialize_f64")]
    pub threshold: f64,
    /// `delta_hat <= threshold`
    pub threshold_satisfied: bool,
    /// Threshold met yet not rigid. The deficiency is only a compressor
    /// estimate, so this is a diagnostic rather than a contradiction.
    pub falsification_candidate: bool,
}

pub fn rigidity_deficiency_check(g: &Graph, delta_hat: f64) -> Result<RigidityReport> {
    Ok(rigidity_report(&automorphisms(g)?, delta_hat))
}

/// Same check from an automorphism report computed elsewhere.
pub fn rigidity_report(aut: &AutReport, delta_hat: f64) -> RigidityReport {
    let n = aut.n as f64;
    let threshold = n + n.log2() + 2.0;
    let threshold_satisfied = delta_hat <= threshold;
    RigidityReport {
        n: aut.n,
        aut_size: aut.aut_size,
        rigid: aut.rigid,
        delta_hat,
        threshold,
        threshold_satisfied,
        falsification_candidate: threshold_satisfied && !aut.rigid,
    }
}
