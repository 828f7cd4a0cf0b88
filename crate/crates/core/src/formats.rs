//! Text formats: the native `<n>:<hex>` form and graph6.
//!
//! graph6 walks the upper triangle column by column, `(0,1),(0,2),(1,2),
//! (0,3),…`, while the native edge string is row-major, so conversion goes
//! through node pairs rather than bit positions.

use crate::error::{Error, Result};
use crate::graph::{edge_index0, pair_count, Graph};

/// `"<n>:<hex>"`, `ceil(bits/4)` hex digits, edge 0 is the most significant
/// bit of the first digit, trailing pad bits zero.
pub fn to_native(g: &Graph) -> String {
    let len = g.bit_len();
    let mut out = format!("{}:", g.n());
    for d in 0..len.div_ceil(4) {
        let mut nibble = 0u32;
        for b in 0..4 {
            let e = d * 4 + b;
            nibble <<= 1;
            if e < len && g.bit(e) {
                nibble |= 1;
            }
        }
        out.push(char::from_digit(nibble, 16).expect("nibble < 16"));
    }
    out
}

pub fn from_native(text: &str) -> Result<Graph> {
    let text = text.trim();
    let (n_part, hex) = text
        .split_once(':')
        .ok_or_else(|| Error::Parse("native format needs `<n>:<hex>`".into()))?;
    let n: usize = n_part
        .parse()
        .map_err(|_| Error::Parse(format!("bad node count `{n_part}`")))?;
    let len = pair_count(n);
    if hex.len() != len.div_ceil(4) {
        return Err(Error::Parse(format!(
            "expected {} hex digits for n = {n}, got {}",
            len.div_ceil(4),
            hex.len()
        )));
    }
    let mut bits = Vec::with_capacity(hex.len() * 4);
    for c in hex.chars() {
        let d = c
            .to_digit(16)
            .ok_or_else(|| Error::Parse(format!("`{c}` is not a hex digit")))?;
        for b in (0..4).rev() {
            bits.push((d >> b) & 1 == 1);
        }
    }
    if bits[len..].iter().any(|&b| b) {
        return Err(Error::Parse("nonzero padding bits".into()));
    }
    bits.truncate(len);
    Graph::from_bits(n, bits)
}

pub fn to_graph6(g: &Graph) -> String {
    let n = g.n();
    let mut out = Vec::new();
    if n <= 62 {
        out.push(n as u8 + 63);
    } else if n <= 258_047 {
        out.push(126);
        for shift in [12, 6, 0] {
            out.push(((n >> shift) & 63) as u8 + 63);
        }
    } else {
        out.extend([126, 126]);
        for shift in [30, 24, 18, 12, 6, 0] {
            out.push(((n >> shift) & 63) as u8 + 63);
        }
    }
    let mut acc = 0u8;
    let mut filled = 0;
    for j in 1..n {
        for i in 0..j {
            acc = (acc << 1) | g.bit(edge_index0(i, j, n)) as u8;
            filled += 1;
            if filled == 6 {
                out.push(acc + 63);
                acc = 0;
                filled = 0;
            }
        }
    }
    if filled > 0 {
        out.push((acc << (6 - filled)) + 63);
    }
    String::from_utf8(out).expect("graph6 bytes are printable ASCII")
}

pub fn from_graph6(text: &str) -> Result<Graph> {
    let text = text.trim();
    let text = text.strip_prefix(">>graph6<<").unwrap_or(text);
    let bytes = text.as_bytes();
    if let Some(&b) = bytes.iter().find(|&&b| !(63..=126).contains(&b)) {
        return Err(Error::Parse(format!("byte {b} outside graph6 range")));
    }
    let short = || Error::Parse("truncated graph6 header".into());
    let (n, body) = match bytes {
        [126, 126, rest @ ..] => {
            let head = rest.get(..6).ok_or_else(short)?;
            let n = head
                .iter()
                .fold(0usize, |a, &b| (a << 6) | (b - 63) as usize);
            (n, &rest[6..])
        }
        [126, rest @ ..] => {
            let head = rest.get(..3).ok_or_else(short)?;
            let n = head
                .iter()
                .fold(0usize, |a, &b| (a << 6) | (b - 63) as usize);
            (n, &rest[3..])
        }
        [first, rest @ ..] => ((*first - 63) as usize, rest),
        [] => return Err(Error::Parse("empty graph6 string".into())),
    };
    if n == 0 {
        return Err(Error::Parse("graphs need at least one node".into()));
    }
    let len = pair_count(n);
    if body.len() != len.div_ceil(6) {
        return Err(Error::Parse(format!(
            "expected {} graph6 data bytes for n = {n}, got {}",
            len.div_ceil(6),
            body.len()
        )));
    }
    let bit = |k: usize| ((body[k / 6] - 63) >> (5 - k % 6)) & 1 == 1;
    if (len..body.len() * 6).any(bit) {
        return Err(Error::Parse("nonzero graph6 padding bits".into()));
    }
    let mut g = Graph::empty(n)?;
    let mut k = 0;
    for j in 1..n {
        for i in 0..j {
            if bit(k) {
                g.set_bit(edge_index0(i, j, n), true);
            }
            k += 1;
        }
    }
    Ok(g)
}

/// Accepts either format: native text contains a `:`, graph6 never does.
pub fn parse_any(text: &str) -> Result<Graph> {
    if text.contains(':') && !text.trim_start().starts_with(">>") {
        from_native(text)
    } else {
        from_graph6(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn native_examples() {
        let path = Graph::path(3).unwrap();
        assert_eq!(to_native(&path), "3:a");
        assert_eq!(to_native(&Graph::complete(4).unwrap()), "4:fc");
        assert_eq!(to_native(&Graph::empty(1).unwrap()), "1:");
        assert_eq!(from_native("3:a").unwrap(), path);
        assert!(from_native("3:b").is_err());
        assert!(from_native("3:aa").is_err());
        assert!(from_native("x:a").is_err());
        assert!(from_native("3").is_err());
    }

    #[test]
    fn graph6_known_strings() {
        // path 0-1-2 (upper triangle column order: 01, 02, 12 -> 1,0,1)
        assert_eq!(to_graph6(&Graph::path(3).unwrap()), "Bg");
        // petgraph: A-C, A-E, B-D, D-E on five nodes is "DQc"
        let g = Graph::from_edges(5, &[(1, 3), (1, 5), (2, 4), (4, 5)]).unwrap();
        assert_eq!(to_graph6(&g), "DQc");
        assert_eq!(from_graph6("DQc").unwrap(), g);
        assert_eq!(from_graph6(">>graph6<<DQc").unwrap(), g);
        assert_eq!(to_graph6(&Graph::complete(4).unwrap()), "C~");
        assert_eq!(to_graph6(&Graph::empty(1).unwrap()), "@");
    }

    #[test]
    fn graph6_long_header() {
        let g = Graph::path(70).unwrap();
        let s = to_graph6(&g);
        assert_eq!(&s.as_bytes()[..4], &[126, 63, 64, 69]);
        assert_eq!(from_graph6(&s).unwrap(), g);
    }

    #[test]
    fn graph6_rejects_garbage() {
        assert!(from_graph6("").is_err());
        assert!(from_graph6("D").is_err());
        assert!(from_graph6("Bh").is_err()); // padding bit set
        assert!(from_graph6("B\x01").is_err());
        assert!(from_graph6("~").is_err());
    }

    proptest! {
        #[test]
        fn formats_round_trip(n in 1usize..40, seed in any::<u64>()) {
            let g = Graph::random(n, seed).unwrap();
            prop_assert_eq!(from_graph6(&to_graph6(&g)).unwrap(), g.clone());
            prop_assert_eq!(from_native(&to_native(&g)).unwrap(), g.clone());
            prop_assert_eq!(parse_any(&to_native(&g)).unwrap(), g.clone());
            prop_assert_eq!(parse_any(&to_graph6(&g)).unwrap(), g);
        }
    }
}
