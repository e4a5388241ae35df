//! LZ parsing straight off a grammar: per phrase, pointers (i, j, k) slide
//! right while leftmost-occurrence queries on the rule grid decide whether
//! the current prefix still occurs earlier in the text.

use crate::balance::BalancedSlp;
use crate::fingerprint::FingerprintContext;
use crate::index::{PrimaryIndex, SortMode};
use crate::lz::{
    attempt_seed, ConvertError, LzParse, ParseInvariantError, Phrase, PARSE_RETRY_ATTEMPTS,
};
use crate::prefix_range::Tier;
use crate::slp::{validate, Slp};
use crate::text::TextIndex;

/// Tuning for [`slp_to_lz`]: fingerprint seed plus index flavor selectors.
#[derive(Debug, Clone, Default)]
pub struct StreamOptions {
    pub seed: u64,
    pub sort: SortMode,
    pub tier: Tier,
}

/// One parse pass over a prepared index.
///
/// Within a phrase starting at i, k grows while T[i..k] keeps an occurrence
/// starting before i anchored at the current split j, and j advances to the
/// next split that lets k grow further; the phrase closes when no split
/// j <= k extends it. Both pointers only move right, so the total number of
/// queries is linear in the text length. A position whose byte was never
/// seen before becomes a literal.
pub fn lz_parse_slp(b: &BalancedSlp, idx: &PrimaryIndex) -> Result<LzParse, ParseInvariantError> {
    let n = b.text_len();
    let nf = n + 1;
    let mut phrases = Vec::new();
    let mut i = 1u64;
    while i <= n {
        let mut j = i;
        let mut k = i - 1;
        let t = loop {
            k += 1;
            while k < n && idx.leftmost(b, i, j, k + 1).unwrap_or(nf) < i {
                k += 1;
            }
            let t = idx.leftmost(b, i, j, k).unwrap_or(nf);
            if k < n {
                while j <= k && idx.leftmost(b, i, j, k + 1).unwrap_or(nf) >= i {
                    j += 1;
                }
            } else {
                j = n + 1;
            }
            if j > k {
                break t;
            }
        };
        let phrase = if t == i && k == i {
            Phrase::Literal(b.byte_at(i))
        } else if t < i {
            Phrase::Copy { src: t, len: k - i + 1 }
        } else {
            return Err(ParseInvariantError::new(format!(
                "no occurrence of T[{i}..{k}] starts before {i} (got {t})"
            )));
        };
        phrases.push(phrase);
        i = k + 1;
    }
    Ok(LzParse { n, phrases })
}

/// Balances and fingerprints the grammar, builds the occurrence index, and
/// parses; a failed parse signals a fingerprint collision, so the whole
/// pipeline is rebuilt under a re-derived seed before giving up.
pub fn slp_to_lz(slp: &Slp, opts: &StreamOptions) -> Result<LzParse, ConvertError> {
    let meta = validate(slp)?;
    let mut last = ParseInvariantError::new("parse never ran".into());
    for attempt in 0..PARSE_RETRY_ATTEMPTS {
        let ctx = FingerprintContext::new(attempt_seed(opts.seed, attempt));
        let b = BalancedSlp::build(slp, &meta, ctx);
        let idx = match PrimaryIndex::build(&b, opts.sort, opts.tier) {
            Ok(idx) => idx,
            Err(e) => {
                last = ParseInvariantError::new(e.to_string());
                continue;
            }
        };
        match lz_parse_slp(&b, &idx) {
            Ok(parse) => return Ok(parse),
            Err(e) => last = e,
        }
    }
    Err(ConvertError::RetriesExhausted {
        attempts: PARSE_RETRY_ATTEMPTS,
        last,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{fibonacci_slp, random_slp};
    use crate::oracles::naive_lz;
    use crate::slp::expand;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn hand_grammars_parse_as_expected() {
        let abab = Slp {
            terminal_bytes: vec![b'a', b'b'],
            rules: vec![(0, 1), (2, 2)],
            root: 3,
        };
        let parse = slp_to_lz(&abab, &StreamOptions::default()).unwrap();
        assert_eq!(
            parse.phrases,
            vec![
                Phrase::Literal(b'a'),
                Phrase::Literal(b'b'),
                Phrase::Copy { src: 1, len: 2 },
            ]
        );

        let aaaa = Slp {
            terminal_bytes: vec![b'a'],
            rules: vec![(0, 0), (1, 1)],
            root: 2,
        };
        let parse = slp_to_lz(&aaaa, &StreamOptions::default()).unwrap();
        assert_eq!(
            parse.phrases,
            vec![Phrase::Literal(b'a'), Phrase::Copy { src: 1, len: 3 }]
        );

        let abc3 = Slp {
            terminal_bytes: vec![b'a', b'b', b'c'],
            rules: vec![(0, 1), (3, 2), (4, 4), (5, 4)],
            root: 6,
        };
        let parse = slp_to_lz(&abc3, &StreamOptions::default()).unwrap();
        assert_eq!(
            parse.phrases,
            vec![
                Phrase::Literal(b'a'),
                Phrase::Literal(b'b'),
                Phrase::Literal(b'c'),
                Phrase::Copy { src: 1, len: 6 },
            ]
        );
    }

    fn check_against_naive(slp: &Slp, opts: &StreamOptions) {
        let text = expand(slp);
        let parse = slp_to_lz(slp, opts).unwrap();
        let naive = naive_lz(&text);
        assert_eq!(parse.lengths(), naive.lengths(), "boundaries differ");
        assert_eq!(parse.decode().unwrap(), text);
        let mut start = 1u64;
        for ph in &parse.phrases {
            match *ph {
                Phrase::Literal(b) => {
                    let first = text.iter().position(|&c| c == b).unwrap() as u64 + 1;
                    assert_eq!(first, start, "literal not at first occurrence");
                    start += 1;
                }
                Phrase::Copy { src, len } => {
                    assert!(src < start);
                    let s = (src - 1) as usize;
                    let p = (start - 1) as usize;
                    assert_eq!(
                        text[s..s + len as usize],
                        text[p..p + len as usize],
                        "copy content differs"
                    );
                    start += len;
                }
            }
        }
    }

    #[test]
    fn matches_naive_parse_on_random_grammars() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for round in 0..150u64 {
            let slp = random_slp(&mut rng, 3, 30, 400);
            let opts = StreamOptions {
                seed: round,
                sort: if round % 2 == 0 {
                    SortMode::Fingerprint
                } else {
                    SortMode::Expansion
                },
                tier: if round % 3 == 0 {
                    Tier::Baseline
                } else {
                    Tier::ZFast
                },
            };
            check_against_naive(&slp, &opts);
        }
    }

    #[test]
    fn fibonacci_phrase_counts_grow_logarithmically() {
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let mut prev = 0;
        for order in 3..=24 {
            let slp = fibonacci_slp(order);
            check_against_naive(&slp, &StreamOptions::default());
            let parse = slp_to_lz(&slp, &StreamOptions::default()).unwrap();
            let z = parse.num_phrases();
            let n = parse.n as f64;
            assert!(z >= prev, "phrase count shrank at order {order}");
            assert!(
                z as f64 <= 2.0 * n.ln() / phi.ln() + 4.0,
                "order {order}: z = {z} exceeds the log bound"
            );
            prev = z;
        }
    }

    #[test]
    fn single_character_and_unary_texts() {
        let one = Slp {
            terminal_bytes: vec![b'x'],
            rules: vec![],
            root: 0,
        };
        let parse = slp_to_lz(&one, &StreamOptions::default()).unwrap();
        assert_eq!(parse.phrases, vec![Phrase::Literal(b'x')]);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..30 {
            let slp = random_slp(&mut rng, 1, 12, 300);
            check_against_naive(&slp, &StreamOptions::default());
        }
    }

    #[test]
    fn invalid_grammar_is_reported() {
        let bad = Slp {
            terminal_bytes: vec![b'a'],
            rules: vec![(2, 0)],
            root: 1,
        };
        assert!(matches!(
            slp_to_lz(&bad, &StreamOptions::default()),
            Err(ConvertError::Grammar(_))
        ));
    }
}
