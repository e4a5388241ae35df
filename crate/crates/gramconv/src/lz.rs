//! LZ-like parses: phrase types, decoding, and the shared phrase driver
//! used by the parsers that test "occurs earlier" predicates.

use crate::slp::Pos;
use thiserror::Error;

/// One phrase of a parse. `src` is the 1-based start of an earlier
/// occurrence; copies may self-overlap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phrase {
    Literal(u8),
    Copy { src: Pos, len: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LzParse {
    pub n: u64,
    pub phrases: Vec<Phrase>,
}

impl LzParse {
    pub fn num_phrases(&self) -> usize {
        self.phrases.len()
    }

    /// Phrase lengths in order; boundary comparisons use these.
    pub fn lengths(&self) -> Vec<u64> {
        self.phrases
            .iter()
            .map(|p| match p {
                Phrase::Literal(_) => 1,
                Phrase::Copy { len, .. } => *len,
            })
            .collect()
    }

    /// Reconstructs the text, resolving self-overlapping copies left to right.
    pub fn decode(&self) -> Result<Vec<u8>, LzDecodeError> {
        let mut out: Vec<u8> = Vec::with_capacity(self.n as usize);
        for (i, ph) in self.phrases.iter().enumerate() {
            match *ph {
                Phrase::Literal(b) => out.push(b),
                Phrase::Copy { src, len } => {
                    let start = out.len() as u64 + 1;
                    if src == 0 || src >= start {
                        return Err(LzDecodeError::BadSource { phrase: i, src });
                    }
                    if len == 0 {
                        return Err(LzDecodeError::EmptyCopy { phrase: i });
                    }
                    let mut from = (src - 1) as usize;
                    for _ in 0..len {
                        let b = out[from];
                        out.push(b);
                        from += 1;
                    }
                }
            }
        }
        if out.len() as u64 != self.n {
            return Err(LzDecodeError::LengthMismatch {
                declared: self.n,
                decoded: out.len() as u64,
            });
        }
        Ok(out)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LzDecodeError {
    #[error("phrase {phrase}: copy source {src} is not strictly earlier")]
    BadSource { phrase: usize, src: Pos },
    #[error("phrase {phrase}: copy of length zero")]
    EmptyCopy { phrase: usize },
    #[error("declared length {declared} but decoded {decoded} bytes")]
    LengthMismatch { declared: u64, decoded: u64 },
}

/// Per-phrase instrumentation of the predicate-driven parsers.
#[derive(Debug, Default, Clone)]
pub struct ParseStats {
    /// Number of occurrence queries issued for each phrase.
    pub calls_per_phrase: Vec<u32>,
}

/// Parses the text by exponential search over phrase length.
///
/// `char_leftmost(b)` is the 1-based leftmost occurrence of byte b, if any.
/// `byte_at(i)` reads T[i]. `leftmost_occ(i, j)` returns the position of the
/// leftmost occurrence of T[i..j] in T (inclusive range, always <= i since
/// the pattern occurs at i) or None on fingerprint-verification failure.
///
/// Each phrase is the longest T[i..k] that occurs starting strictly before
/// i, found by doubling the candidate length while the occurrence test
/// holds and binary searching the final interval; a byte with no earlier
/// occurrence becomes a literal.
pub fn parse_by_doubling(
    n: u64,
    mut char_leftmost: impl FnMut(u8) -> Option<Pos>,
    mut byte_at: impl FnMut(Pos) -> u8,
    mut leftmost_occ: impl FnMut(Pos, Pos) -> Option<Pos>,
) -> Result<(LzParse, ParseStats), ParseInvariantError> {
    let mut phrases = Vec::new();
    let mut stats = ParseStats::default();
    let mut i = 1u64;
    while i <= n {
        let b = byte_at(i);
        let first = char_leftmost(b);
        if first == Some(i) {
            phrases.push(Phrase::Literal(b));
            stats.calls_per_phrase.push(0);
            i += 1;
            continue;
        }
        if first.is_none() || first > Some(i) {
            return Err(ParseInvariantError::new(format!(
                "leftmost occurrence of byte {b} inconsistent at position {i}"
            )));
        }
        let mut calls = 0u32;
        let max_len = n - i + 1;
        // occurs(len) = "T[i..i+len-1] starts strictly before i somewhere"
        let mut occurs = |len: u64, calls: &mut u32| -> bool {
            *calls += 1;
            match leftmost_occ(i, i + len - 1) {
                Some(p) => p < i,
                None => false,
            }
        };
        // length 1 holds: the byte occurred before
        let mut lo = 1u64;
        let mut hi_cap = max_len;
        while lo * 2 <= max_len {
            if occurs(lo * 2, &mut calls) {
                lo *= 2;
            } else {
                hi_cap = lo * 2 - 1;
                break;
            }
        }
        let mut hi = hi_cap.min(max_len);
        // invariant: occurs(lo), and the answer is in [lo, hi]
        while lo < hi {
            let mid = lo + (hi - lo + 1) / 2;
            if occurs(mid, &mut calls) {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        calls += 1;
        let src = leftmost_occ(i, i + lo - 1)
            .filter(|&p| p < i)
            .ok_or_else(|| {
                ParseInvariantError::new(format!(
                    "occurrence of T[{i}..{}] vanished on re-query",
                    i + lo - 1
                ))
            })?;
        phrases.push(Phrase::Copy { src, len: lo });
        stats.calls_per_phrase.push(calls);
        i += lo;
    }
    Ok((LzParse { n, phrases }, stats))
}

/// Raised when a whp invariant fails mid-parse, which signals a fingerprint
/// collision; callers retry with a fresh seed.
#[derive(Debug, Error, PartialEq, Eq)]
#[error("parse invariant violated: {detail}")]
pub struct ParseInvariantError {
    pub detail: String,
}

impl ParseInvariantError {
    pub fn new(detail: String) -> Self {
        ParseInvariantError { detail }
    }
}

/// Why a conversion driver gave up.
#[derive(Debug, Error)]
pub enum ConvertError {
    #[error(transparent)]
    Grammar(#[from] crate::slp::SlpError),
    #[error("gave up after {attempts} re-seeded attempts, last failure: {last}")]
    RetriesExhausted {
        attempts: u32,
        last: ParseInvariantError,
    },
}

/// How many re-seeded attempts the conversion drivers make before giving up.
pub const PARSE_RETRY_ATTEMPTS: u32 = 3;

/// Derives the seed for retry attempt `attempt` (0 = first try).
pub fn attempt_seed(base: u64, attempt: u32) -> u64 {
    base.wrapping_add((attempt as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decode_handles_overlap() {
        let parse = LzParse {
            n: 4,
            phrases: vec![Phrase::Literal(b'a'), Phrase::Copy { src: 1, len: 3 }],
        };
        assert_eq!(parse.decode().unwrap(), b"aaaa");
    }

    #[test]
    fn decode_rejects_bad_parses() {
        let parse = LzParse {
            n: 2,
            phrases: vec![Phrase::Literal(b'a'), Phrase::Copy { src: 2, len: 1 }],
        };
        assert!(matches!(
            parse.decode(),
            Err(LzDecodeError::BadSource { .. })
        ));
        let parse = LzParse {
            n: 3,
            phrases: vec![Phrase::Literal(b'a')],
        };
        assert!(matches!(
            parse.decode(),
            Err(LzDecodeError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn doubling_driver_matches_definition_on_plain_text() {
        // drive the parser with brute-force callbacks over a fixed text
        let t = b"abababbbaba".to_vec();
        let n = t.len() as u64;
        let leftmost = |i: Pos, j: Pos| -> Option<Pos> {
            let pat = &t[(i - 1) as usize..j as usize];
            (0..t.len() - pat.len() + 1)
                .find(|&q| &t[q..q + pat.len()] == pat)
                .map(|q| q as u64 + 1)
        };
        let (parse, stats) = parse_by_doubling(
            n,
            |b| t.iter().position(|&c| c == b).map(|q| q as u64 + 1),
            |i| t[(i - 1) as usize],
            leftmost,
        )
        .unwrap();
        assert_eq!(parse.decode().unwrap(), t);
        // phrase call counts stay within the doubling budget
        for (ph, &c) in parse.phrases.iter().zip(&stats.calls_per_phrase) {
            let len = match ph {
                Phrase::Literal(_) => 1,
                Phrase::Copy { len, .. } => *len,
            };
            assert!(c as u64 <= 2 * (len + 1).next_power_of_two().trailing_zeros() as u64 + 4);
        }
    }
}
