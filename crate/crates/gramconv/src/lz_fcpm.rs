//! LZ parsing via fully-compressed pattern matching: each candidate phrase
//! is cut out of the grammar as a small substring grammar and handed to a
//! pluggable occurrence engine, with the phrase length found by doubling
//! plus binary search.

use std::collections::HashMap;

use crate::balance::BalancedSlp;
use crate::fingerprint::FingerprintContext;
use crate::index::{PrimaryIndex, SortMode};
use crate::lz::{
    attempt_seed, parse_by_doubling, ConvertError, LzParse, ParseInvariantError, ParseStats,
    PARSE_RETRY_ATTEMPTS,
};
use crate::prefix_range::Tier;
use crate::slp::{expand_iter, validate, Pos, Slp, Sym};
use crate::text::TextIndex;

/// A grammar for one substring of the parent text: parent symbols whose
/// expansions tile the substring, chained left to right by fresh pairing
/// rules. The parent grammar is never modified; fresh ids start at its
/// symbol count.
#[derive(Debug, Clone)]
pub struct SubstringSlp {
    /// parent symbols tiling the substring, in text order
    pub pieces: Vec<Sym>,
    /// fresh chain rules; operands mix parent ids and earlier fresh ids
    pub rules: Vec<(Sym, Sym)>,
    /// id of the first fresh rule (= parent symbol count)
    pub first_fresh: Sym,
    pub root: Sym,
    /// where the substring was cut from, when it came from the text
    pub src: Option<Pos>,
    pub len: u64,
}

fn collect_pieces(b: &BalancedSlp, sym: Sym, lo: Pos, i: Pos, j: Pos, out: &mut Vec<Sym>) {
    let hi = lo + b.meta.exp_len[sym as usize] - 1;
    if i <= lo && hi <= j {
        out.push(sym);
        return;
    }
    let (y, z) = b.slp.rule(sym);
    let mid = lo + b.meta.exp_len[y as usize] - 1;
    if j <= mid {
        collect_pieces(b, y, lo, i, j, out);
    } else if i > mid {
        collect_pieces(b, z, mid + 1, i, j, out);
    } else {
        collect_pieces(b, y, lo, i, j, out);
        collect_pieces(b, z, mid + 1, i, j, out);
    }
}

/// Cuts T[i..j] out of the grammar: the canonical decomposition touches at
/// most two root-to-leaf paths, so the piece count and the fresh-rule count
/// are both bounded by twice the grammar height.
pub fn extract_substring_slp(b: &BalancedSlp, i: Pos, j: Pos) -> SubstringSlp {
    let n = b.text_len();
    assert!(1 <= i && i <= j && j <= n, "substring [{i}, {j}] out of range");
    let mut pieces = Vec::new();
    collect_pieces(b, b.slp.root, 1, i, j, &mut pieces);
    let first_fresh = b.slp.num_symbols() as Sym;
    let mut rules = Vec::new();
    let mut root = pieces[0];
    for &piece in &pieces[1..] {
        rules.push((root, piece));
        root = first_fresh + rules.len() as Sym - 1;
    }
    SubstringSlp {
        pieces,
        rules,
        first_fresh,
        root,
        src: Some(i),
        len: j - i + 1,
    }
}

/// Finds where a pattern given as a grammar occurs in the text grammar.
/// Implementations must be pure: same inputs, same answer, no state carried
/// between calls.
pub trait OccurrenceEngine {
    /// 1-based start of the leftmost occurrence, or None if absent.
    fn leftmost_occurrence(&self, text: &BalancedSlp, pat: &SubstringSlp) -> Option<Pos>;
}

/// Slides the pattern fingerprint across the text with two expansion
/// cursors one window apart; each shift is O(1) fingerprint arithmetic.
/// Finds the true leftmost occurrence up to fingerprint collisions.
pub struct ScanEngine;

fn pattern_fp(text: &BalancedSlp, pat: &SubstringSlp) -> u64 {
    let ctx = &text.ctx;
    let mut fp = ctx.empty();
    let mut len = 0u64;
    for &p in &pat.pieces {
        fp = ctx.append(fp, len, text.fps[p as usize]);
        len += text.meta.exp_len[p as usize];
    }
    debug_assert_eq!(len, pat.len);
    fp
}

impl OccurrenceEngine for ScanEngine {
    fn leftmost_occurrence(&self, text: &BalancedSlp, pat: &SubstringSlp) -> Option<Pos> {
        let n = text.text_len();
        let m = pat.len;
        if m > n {
            return None;
        }
        let ctx = &text.ctx;
        let target = pattern_fp(text, pat);
        let pow_m1 = ctx.pow(m - 1);
        let mut lead = expand_iter(&text.slp, text.slp.root);
        let mut trail = expand_iter(&text.slp, text.slp.root);
        let mut wfp = ctx.empty();
        for held in 0..m {
            let b = lead.next().expect("expansion ended before declared length");
            wfp = ctx.append(wfp, held, ctx.byte(b));
        }
        let mut q = 1u64;
        loop {
            if wfp == target {
                return Some(q);
            }
            if q + m > n {
                return None;
            }
            let head = trail.next().expect("window cursors out of sync");
            let tail = lead.next().expect("window cursors out of sync");
            let shifted = ctx.cut_prefix(wfp, ctx.byte(head), 1);
            wfp = ctx.append_with_pow(shifted, pow_m1, ctx.byte(tail));
            q += 1;
        }
    }
}

/// For short patterns cut from the text, takes the minimum of rule-grid
/// leftmost queries over every split of the pattern, which is the true
/// leftmost occurrence; longer or source-less patterns fall back to the
/// scan engine.
pub struct IndexEngine {
    idx: PrimaryIndex,
    max_indexed_len: u64,
}

impl IndexEngine {
    pub fn new(
        text: &BalancedSlp,
        sort: SortMode,
        tier: Tier,
    ) -> Result<IndexEngine, crate::prefix_range::PrefixRangeError> {
        Ok(IndexEngine {
            idx: PrimaryIndex::build(text, sort, tier)?,
            max_indexed_len: 64,
        })
    }
}

impl OccurrenceEngine for IndexEngine {
    fn leftmost_occurrence(&self, text: &BalancedSlp, pat: &SubstringSlp) -> Option<Pos> {
        let Some(i) = pat.src.filter(|_| pat.len <= self.max_indexed_len) else {
            return ScanEngine.leftmost_occurrence(text, pat);
        };
        let k = i + pat.len - 1;
        if i == k {
            return self.idx.char_leftmost(text.byte_at(i));
        }
        (i..k).filter_map(|j| self.idx.leftmost(text, i, j, k)).min()
    }
}

/// Parses the text into LZ phrases, testing "occurs strictly earlier" with
/// the given engine on substring grammars of doubling candidate lengths.
pub fn lz_parse_fcpm<E: OccurrenceEngine>(
    b: &BalancedSlp,
    engine: &E,
) -> Result<(LzParse, ParseStats), ParseInvariantError> {
    let n = b.text_len();
    let mut first_seen: HashMap<u8, Pos> = HashMap::new();
    for (off, byte) in expand_iter(&b.slp, b.slp.root).enumerate() {
        first_seen.entry(byte).or_insert(off as u64 + 1);
    }
    parse_by_doubling(
        n,
        |byte| first_seen.get(&byte).copied(),
        |i| b.byte_at(i),
        |i, j| engine.leftmost_occurrence(b, &extract_substring_slp(b, i, j)),
    )
}

/// Which occurrence engine the conversion should use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EngineKind {
    #[default]
    Scan,
    Index,
}

#[derive(Debug, Clone, Default)]
pub struct FcpmOptions {
    pub seed: u64,
    pub engine: EngineKind,
    pub sort: SortMode,
    pub tier: Tier,
}

/// Full conversion driver with the shared collision-retry protocol.
pub fn slp_to_lz_fcpm(
    slp: &Slp,
    opts: &FcpmOptions,
) -> Result<(LzParse, ParseStats), ConvertError> {
    let meta = validate(slp)?;
    let mut last = ParseInvariantError::new("parse never ran".into());
    for attempt in 0..PARSE_RETRY_ATTEMPTS {
        let ctx = FingerprintContext::new(attempt_seed(opts.seed, attempt));
        let b = BalancedSlp::build(slp, &meta, ctx);
        let outcome = match opts.engine {
            EngineKind::Scan => lz_parse_fcpm(&b, &ScanEngine),
            EngineKind::Index => match IndexEngine::new(&b, opts.sort, opts.tier) {
                Ok(engine) => lz_parse_fcpm(&b, &engine),
                Err(e) => Err(ParseInvariantError::new(e.to_string())),
            },
        };
        match outcome {
            Ok(r) => return Ok(r),
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
    use crate::corpus::random_slp;
    use crate::lz_stream::{slp_to_lz, StreamOptions};
    use crate::oracles::naive_lz;
    use crate::slp::{expand, expand_symbol};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn balanced(slp: &Slp, seed: u64) -> BalancedSlp {
        let meta = validate(slp).unwrap();
        BalancedSlp::build(slp, &meta, FingerprintContext::new(seed))
    }

    fn expand_pieces(b: &BalancedSlp, pat: &SubstringSlp) -> Vec<u8> {
        let mut out = Vec::new();
        for &p in &pat.pieces {
            out.extend(expand_symbol(&b.slp, p));
        }
        out
    }

    #[test]
    fn extraction_tiles_every_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for round in 0..40u64 {
            let slp = random_slp(&mut rng, 3, 20, 120);
            let b = balanced(&slp, round);
            let text = expand(&b.slp);
            let n = text.len() as u64;
            let height = b.meta.height[b.slp.root as usize] as usize;
            for i in 1..=n {
                for j in i..=n {
                    let pat = extract_substring_slp(&b, i, j);
                    assert_eq!(
                        expand_pieces(&b, &pat),
                        &text[(i - 1) as usize..j as usize],
                        "range [{i}, {j}]"
                    );
                    assert_eq!(pat.rules.len() + 1, pat.pieces.len());
                    assert!(
                        pat.rules.len() <= 2 * height,
                        "range [{i}, {j}]: {} fresh rules for height {height}",
                        pat.rules.len()
                    );
                    assert_eq!(pat.len, j - i + 1);
                }
            }
            let whole = extract_substring_slp(&b, 1, n);
            assert_eq!(whole.pieces, vec![b.slp.root]);
            assert!(whole.rules.is_empty());
        }
    }

    #[test]
    fn engines_find_the_leftmost_occurrence() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for round in 0..60u64 {
            let slp = random_slp(&mut rng, 3, 25, 250);
            let b = balanced(&slp, round);
            let index = IndexEngine::new(&b, SortMode::Fingerprint, Tier::ZFast).unwrap();
            let text = expand(&b.slp);
            let n = text.len() as u64;
            for _ in 0..120 {
                let i = rng.gen_range(1..=n);
                let j = rng.gen_range(i..=n.min(i + 90));
                let pat = extract_substring_slp(&b, i, j);
                let slice = &text[(i - 1) as usize..j as usize];
                let naive = (0..text.len() - slice.len() + 1)
                    .position(|q| &text[q..q + slice.len()] == slice)
                    .map(|q| q as u64 + 1);
                assert_eq!(ScanEngine.leftmost_occurrence(&b, &pat), naive);
                assert_eq!(index.leftmost_occurrence(&b, &pat), naive);
            }
        }
    }

    #[test]
    fn absent_pattern_reports_not_found() {
        let slp = Slp {
            terminal_bytes: vec![b'a', b'b'],
            rules: vec![(0, 1), (2, 2)],
            root: 3,
        };
        let b = balanced(&slp, 5);
        // hand-built pattern "bb" over the parent's terminals; it appears
        // nowhere in "abab"
        let bb = SubstringSlp {
            pieces: vec![1, 1],
            rules: vec![(1, 1)],
            first_fresh: b.slp.num_symbols() as Sym,
            root: b.slp.num_symbols() as Sym,
            src: None,
            len: 2,
        };
        let engine = IndexEngine::new(&b, SortMode::Fingerprint, Tier::ZFast).unwrap();
        assert_eq!(ScanEngine.leftmost_occurrence(&b, &bb), None);
        assert_eq!(engine.leftmost_occurrence(&b, &bb), None);
        // the whole text occurs at position 1
        let whole = extract_substring_slp(&b, 1, 4);
        assert_eq!(ScanEngine.leftmost_occurrence(&b, &whole), Some(1));
        assert_eq!(engine.leftmost_occurrence(&b, &whole), Some(1));
    }

    fn check_parse(slp: &Slp, opts: &FcpmOptions) {
        let text = expand(slp);
        let (parse, stats) = slp_to_lz_fcpm(slp, opts).unwrap();
        let naive = naive_lz(&text);
        assert_eq!(parse.lengths(), naive.lengths(), "boundaries differ");
        assert_eq!(parse.decode().unwrap(), text);
        for (ph, &calls) in parse.phrases.iter().zip(&stats.calls_per_phrase) {
            let len = match ph {
                crate::lz::Phrase::Literal(_) => 1u64,
                crate::lz::Phrase::Copy { len, .. } => *len,
            };
            let bound = 2 * (len + 1).next_power_of_two().trailing_zeros() + 4;
            assert!(calls <= bound, "{calls} calls for a length-{len} phrase");
        }
    }

    #[test]
    fn both_engines_match_the_naive_parse() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for round in 0..100u64 {
            let slp = random_slp(&mut rng, 3, 30, 400);
            let engine = if round % 2 == 0 {
                EngineKind::Scan
            } else {
                EngineKind::Index
            };
            check_parse(
                &slp,
                &FcpmOptions {
                    seed: round,
                    engine,
                    ..FcpmOptions::default()
                },
            );
        }
    }

    #[test]
    fn agrees_with_the_pointer_parser() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for round in 0..60u64 {
            let slp = random_slp(&mut rng, 4, 30, 350);
            let stream = slp_to_lz(&slp, &StreamOptions::default()).unwrap();
            for engine in [EngineKind::Scan, EngineKind::Index] {
                let (parse, _) = slp_to_lz_fcpm(
                    &slp,
                    &FcpmOptions {
                        seed: round,
                        engine,
                        ..FcpmOptions::default()
                    },
                )
                .unwrap();
                assert_eq!(parse.lengths(), stream.lengths(), "round {round}");
            }
        }
    }
}
