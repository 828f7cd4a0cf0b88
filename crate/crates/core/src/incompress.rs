//! Computable stand-ins for randomness deficiency, plus block-frequency
//! counting and the deviation bound it obeys for high complexity strings.
//!
//! All logarithms are base 2; `LOG2_E` is `log2(e)`.

use std::f64::consts::LOG2_E;
use std::io::Write;

use flate2::write::{DeflateEncoder, ZlibEncoder};
use flate2::Compression;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::graph::Graph;
use crate::report::serialize_f64;

/// Parses a `'0'`/`'1'` string.
pub fn parse_bits(s: &str) -> Result<Vec<bool>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(Error::Parse(format!("`{other}` is not a bit"))),
        })
        .collect()
}

/// Number of start positions where `y` occurs in `x`, overlaps allowed.
/// With `wrap` every position of `x` is a start and matches may run off the
/// end and continue at the front.
pub fn count_block(x: &[bool], y: &[bool], wrap: bool) -> Result<usize> {
    if y.is_empty() {
        return Err(invalid("block must be nonempty"));
    }
    if y.len() > x.len() {
        return Err(invalid(format!(
            "block length {} exceeds string length {}",
            y.len(),
            x.len()
        )));
    }
    let n = x.len();
    let starts = if wrap { n } else { n - y.len() + 1 };
    Ok((0..starts)
        .filter(|&s| y.iter().enumerate().all(|(t, &b)| x[(s + t) % n] == b))
        .count())
}

/// Default prefix-complexity surrogate for a string of `len` bits:
/// `len + 2 log2 max(1, len) + c_k`.
pub fn k_surrogate(len: usize, c_k: f64) -> f64 {
    let l = len as f64;
    l + 2.0 * l.max(1.0).log2() + c_k
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlockStatParams {
    /// String length in bits.
    pub n: usize,
    /// Block length in bits.
    pub l: usize,
    #[serde(serialize_with = "serialize_f64")]
    pub k_y: f64,
    #[serde(serialize_with = "serialize_f64")]
    pub delta: f64,
    #[serde(serialize_with = "serialize_f64")]
    pub c: f64,
}

impl BlockStatParams {
    pub fn p(&self) -> f64 {
        (-(self.l as f64)).exp2()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlockBound {
    pub params: BlockStatParams,
    #[serde(serialize_with = "serialize_f64")]
    pub p: f64,
    #[serde(serialize_with = "serialize_f64")]
    pub alpha: f64,
    #[serde(serialize_with = "serialize_f64")]
    pub bound: f64,
    /// `l <= log2 n`; the bound is only claimed under this condition.
    pub precondition_ok: bool,
}

/// `sqrt(alpha p n)` with `alpha = (K_y + log2 l + delta + c) 3l / log2 e`.
pub fn block_deviation_bound(params: BlockStatParams) -> Result<BlockBound> {
    if params.l == 0 {
        return Err(invalid("block length must be at least 1"));
    }
    for (name, v) in [
        ("K_y", params.k_y),
        ("delta", params.delta),
        ("c", params.c),
    ] {
        if !v.is_finite() || v < 0.0 {
            return Err(invalid(format!(
                "{name} must be finite and nonnegative, got {v}"
            )));
        }
    }
    let l = params.l as f64;
    let p = params.p();
    let alpha = (params.k_y + l.log2() + params.delta + params.c) * 3.0 * l / LOG2_E;
    let bound = (alpha * p * params.n as f64).sqrt();
    let precondition_ok = params.n > 0 && l <= (params.n as f64).log2();
    Ok(BlockBound {
        params,
        p,
        alpha,
        bound,
        precondition_ok,
    })
}

/// Lower bound `1 - 2^-delta` on the fraction of `delta`-random graphs.
pub fn random_fraction_bound(delta: f64) -> f64 {
    1.0 - (-delta).exp2()
}

pub trait Compressor: Send + Sync {
    /// Name and version, recorded in every estimate.
    fn id(&self) -> &'static str;
    fn compressed_bits(&self, data: &[u8]) -> usize;
}

pub struct Deflate;
pub struct Zlib;

impl Compressor for Deflate {
    fn id(&self) -> &'static str {
        "deflate(level=9; flate2 1.x, miniz_oxide)"
    }

    fn compressed_bits(&self, data: &[u8]) -> usize {
        let mut enc = DeflateEncoder::new(Vec::new(), Compression::best());
        enc.write_all(data).expect("in-memory write");
        8 * enc.finish().expect("in-memory write").len()
    }
}

impl Compressor for Zlib {
    fn id(&self) -> &'static str {
        "zlib(level=9; flate2 1.x, miniz_oxide)"
    }

    fn compressed_bits(&self, data: &[u8]) -> usize {
        let mut enc = ZlibEncoder::new(Vec::new(), Compression::best());
        enc.write_all(data).expect("in-memory write");
        8 * enc.finish().expect("in-memory write").len()
    }
}

pub const COMPRESSOR_IDS: &[&str] = &["deflate", "zlib"];

pub fn compressor(id: &str) -> Result<Box<dyn Compressor>> {
    match id {
        "deflate" => Ok(Box::new(Deflate)),
        "zlib" => Ok(Box::new(Zlib)),
        other => Err(Error::UnknownCompressor(other.to_string())),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeficiencyEstimate {
    pub n: usize,
    pub encoded_len: usize,
    pub compressed_len: usize,
    /// `max(0, encoded_len - (compressed_len - calibration_offset))`.
    pub delta_hat: usize,
    pub compressor_id: String,
    /// Overhead in bits subtracted from `compressed_len`; 0 when uncalibrated.
    pub calibration_offset: usize,
}

pub fn estimate_deficiency(g: &Graph, compressor_id: &str) -> Result<DeficiencyEstimate> {
    estimate_deficiency_calibrated(g, compressor_id, 0)
}

pub fn estimate_deficiency_calibrated(
    g: &Graph,
    compressor_id: &str,
    calibration_offset: usize,
) -> Result<DeficiencyEstimate> {
    let comp = compressor(compressor_id)?;
    let encoded_len = g.bit_len();
    let compressed_len = comp.compressed_bits(&g.to_bytes());
    let effective = compressed_len.saturating_sub(calibration_offset);
    Ok(DeficiencyEstimate {
        n: g.n(),
        encoded_len,
        compressed_len,
        delta_hat: encoded_len.saturating_sub(effective),
        compressor_id: comp.id().to_string(),
        calibration_offset,
    })
}

/// Median of `compressed - len` over `samples` uniform strings of `len_bits`
/// bits (packed like graph encodings), clamped at 0.
pub fn calibration_offset(
    compressor_id: &str,
    len_bits: usize,
    samples: usize,
    seed: u64,
) -> Result<usize> {
    let comp = compressor(compressor_id)?;
    if samples == 0 {
        return Err(invalid("calibration needs at least one sample"));
    }
    let bytes = len_bits.div_ceil(8);
    let mut overheads: Vec<usize> = (0..samples as u64)
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(s);
            let mut buf = vec![0u8; bytes];
            rng.fill_bytes(&mut buf);
            if !len_bits.is_multiple_of(8) {
                let last = buf.len() - 1;
                buf[last] &= 0xffu8 << (8 - len_bits % 8);
            }
            comp.compressed_bits(&buf).saturating_sub(len_bits)
        })
        .collect();
    overheads.sort_unstable();
    Ok(overheads[overheads.len() / 2])
}
