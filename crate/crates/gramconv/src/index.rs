//! Occurrence index over a balanced grammar. Each rule X -> YZ contributes
//! the spot in the text where its two halves meet at X's leftmost
//! occurrence; a pattern split into a left part and a right part matches X
//! exactly when exp(Y) ends with the left part and exp(Z) starts with the
//! right part. Collecting the rules on one axis ordered by reversed exp(Y)
//! and on the other by exp(Z) turns that test into a pair of prefix-range
//! lookups plus a 2D range-minimum for the leftmost matching spot.

use crate::balance::BalancedSlp;
use crate::grid::RangeMinGrid;
use crate::prefix_range::{PrefixRangeError, PrefixRangeIndex, Tier};
use crate::slp::{build_grammar_tree, Pos};
use crate::text::{span_byte, Dir, Span, TextIndex};
use std::cmp::Ordering;

/// How the axis members get ordered during construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SortMode {
    /// Fingerprint-driven comparisons, O(log^2) each; correct whp.
    #[default]
    Fingerprint,
    /// Byte-by-byte comparisons, linear in the compared length but exact.
    Expansion,
}

/// Exact span comparison by scanning oriented bytes.
fn expansion_compare<T: TextIndex + ?Sized>(t: &T, a: Span, b: Span, dir: Dir) -> Ordering {
    let max = a.len.min(b.len);
    for k in 1..=max {
        let (ba, bb) = (span_byte(t, a, dir, k), span_byte(t, b, dir, k));
        if ba != bb {
            return ba.cmp(&bb);
        }
    }
    a.len.cmp(&b.len)
}

pub struct PrimaryIndex {
    /// Reversed left-half expansions, sorted; ranks are x coordinates.
    y_axis: PrefixRangeIndex,
    /// Right-half expansions, sorted; ranks are y coordinates.
    z_axis: PrefixRangeIndex,
    grid: RangeMinGrid,
    /// Leftmost occurrence of each byte value, computed exactly.
    char_first: Vec<Option<Pos>>,
}

impl PrimaryIndex {
    pub fn build(
        t: &BalancedSlp,
        sort: SortMode,
        tier: Tier,
    ) -> Result<PrimaryIndex, PrefixRangeError> {
        let slp = &t.slp;
        let sigma = slp.sigma();
        let tree = build_grammar_tree(slp, &t.meta);
        let g = slp.rules.len();

        let mut y_members = Vec::with_capacity(g);
        let mut z_members = Vec::with_capacity(g);
        let mut splits = Vec::with_capacity(g);
        for r in 0..g {
            let (y, z) = slp.rules[r];
            let s = tree.internal_start(r);
            let ly = t.meta.exp_len[y as usize];
            let lz = t.meta.exp_len[z as usize];
            y_members.push(Span::new(s, ly));
            z_members.push(Span::new(s + ly, lz));
            splits.push(s + ly - 1);
        }

        let order = |members: &[Span], dir: Dir| -> Vec<u32> {
            let mut idx: Vec<u32> = (0..g as u32).collect();
            match sort {
                SortMode::Fingerprint => idx.sort_by(|&a, &b| {
                    crate::text::oriented_compare(t, members[a as usize], members[b as usize], dir)
                        .then(a.cmp(&b))
                }),
                SortMode::Expansion => idx.sort_by(|&a, &b| {
                    expansion_compare(t, members[a as usize], members[b as usize], dir)
                        .then(a.cmp(&b))
                }),
            }
            idx
        };

        let x_order = order(&y_members, Dir::Rev);
        let z_order = order(&z_members, Dir::Fwd);

        let y_axis = PrefixRangeIndex::new(
            t,
            x_order.iter().map(|&r| y_members[r as usize]).collect(),
            Dir::Rev,
            tier,
        )?;
        let z_axis = PrefixRangeIndex::new(
            t,
            z_order.iter().map(|&r| z_members[r as usize]).collect(),
            Dir::Fwd,
            tier,
        )?;

        // y coordinate of each rule = its rank on the z axis
        let mut y_of_rule = vec![0u32; g];
        for (rank0, &r) in z_order.iter().enumerate() {
            y_of_rule[r as usize] = rank0 as u32 + 1;
        }
        let points: Vec<(u32, u64)> = x_order
            .iter()
            .map(|&r| (y_of_rule[r as usize], splits[r as usize]))
            .collect();
        let grid = RangeMinGrid::new(points);

        // exact leftmost position of every alphabet byte: one bottom-up
        // first-offset pass per distinct byte
        let mut char_first: Vec<Option<Pos>> = vec![None; 256];
        let mut distinct = slp.terminal_bytes.clone();
        distinct.sort_unstable();
        distinct.dedup();
        let total = slp.num_symbols();
        let mut off = vec![u64::MAX; total];
        for &b in &distinct {
            for (i, &tb) in slp.terminal_bytes.iter().enumerate() {
                off[i] = if tb == b { 1 } else { u64::MAX };
            }
            for (r, &(y, z)) in slp.rules.iter().enumerate() {
                let (oy, oz) = (off[y as usize], off[z as usize]);
                off[sigma + r] = if oy < u64::MAX {
                    oy
                } else if oz < u64::MAX {
                    t.meta.exp_len[y as usize] + oz
                } else {
                    u64::MAX
                };
            }
            let o = off[slp.root as usize];
            char_first[b as usize] = (o < u64::MAX).then_some(o);
        }

        Ok(PrimaryIndex {
            y_axis,
            z_axis,
            grid,
            char_first,
        })
    }

    /// Exact leftmost occurrence of a byte value, if it occurs at all.
    pub fn char_leftmost(&self, b: u8) -> Option<Pos> {
        self.char_first[b as usize]
    }

    /// Leftmost occurrence of T[i..=k] among occurrences aligned so that
    /// their copy of T[j] is the last byte some rule's left half produces
    /// at that rule's leftmost occurrence. Requires i <= j <= k; j = k = i
    /// degenerates to the exact single-byte answer. The result is verified
    /// with one fingerprint comparison, so a returned position is a true
    /// occurrence whp; None means no aligned occurrence was found.
    pub fn leftmost<T: TextIndex + ?Sized>(&self, t: &T, i: Pos, j: Pos, k: Pos) -> Option<Pos> {
        debug_assert!(1 <= i && i <= j && j <= k && k <= t.text_len());
        if i == k {
            return self.char_first[t.byte_at(i) as usize];
        }
        let (x1, x2) = self.y_axis.range(t, Span::range(i, j));
        if x1 > x2 {
            return None;
        }
        let (y1, y2) = self.z_axis.range(t, Span::range(j + 1, k));
        if y1 > y2 {
            return None;
        }
        let (split, _) = self
            .grid
            .query(x1 as u32, x2 as u32, y1 as u32, y2 as u32)?;
        let start = split.checked_sub(j - i).filter(|&s| s >= 1)?;
        let end = split + (k - j);
        if end > t.text_len() {
            return None;
        }
        if t.range_fp(start, end) != t.range_fp(i, k) {
            return None;
        }
        Some(start)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::balance::BalancedSlp;
    use crate::fingerprint::FingerprintContext;
    use crate::slp::{expand, validate, Slp, Sym};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn build_index(slp: &Slp, seed: u64, sort: SortMode, tier: Tier) -> (BalancedSlp, PrimaryIndex) {
        let meta = validate(slp).unwrap();
        let b = BalancedSlp::build(slp, &meta, FingerprintContext::new(seed));
        let idx = PrimaryIndex::build(&b, sort, tier).unwrap();
        (b, idx)
    }

    /// All starts of aligned occurrences of T[i..=k] with the alignment byte
    /// at offset j - i, by checking every rule boundary directly.
    fn brute_leftmost(b: &BalancedSlp, text: &[u8], i: u64, j: u64, k: u64) -> Option<u64> {
        let tree = crate::slp::build_grammar_tree(&b.slp, &b.meta);
        let pat = &text[(i - 1) as usize..k as usize];
        let mut best: Option<u64> = None;
        for r in 0..b.slp.rules.len() {
            let (y, z) = b.slp.rules[r];
            let s = tree.internal_start(r);
            let (ly, lz) = (b.meta.exp_len[y as usize], b.meta.exp_len[z as usize]);
            // the left part must fit inside exp(Y), the right inside exp(Z)
            if j - i + 1 > ly || k - j > lz {
                continue;
            }
            let split = s + ly - 1;
            let Some(start) = (split + i).checked_sub(j) else {
                continue;
            };
            if start < 1 || start + (k - i) > text.len() as u64 {
                continue;
            }
            let cand = &text[(start - 1) as usize..(start + k - i) as usize];
            if cand == pat && best.map_or(true, |b| start < b) {
                best = Some(start);
            }
        }
        if i == k {
            // the byte path answers single-character queries instead
            return text
                .iter()
                .position(|&c| c == text[(i - 1) as usize])
                .map(|p| p as u64 + 1);
        }
        best
    }

    #[test]
    fn hand_grammar_queries() {
        let slp = Slp {
            terminal_bytes: vec![b'a', b'b'],
            rules: vec![(0, 1), (2, 2)],
            root: 3,
        };
        let (b, idx) = build_index(&slp, 11, SortMode::Fingerprint, Tier::ZFast);
        // text: abab; rule ab splits at 1, root splits at 2
        assert_eq!(idx.leftmost(&b, 1, 1, 2), Some(1));
        assert_eq!(idx.leftmost(&b, 3, 3, 4), Some(1));
        assert_eq!(idx.leftmost(&b, 2, 2, 3), Some(2));
        // "bab" split after position 3 matches no rule boundary
        assert_eq!(idx.leftmost(&b, 2, 3, 4), None);
        assert_eq!(idx.leftmost(&b, 1, 1, 1), Some(1));
        assert_eq!(idx.leftmost(&b, 2, 2, 2), Some(2));
        assert_eq!(idx.leftmost(&b, 4, 4, 4), Some(2));
        // "ab" split after its 'b' aligns with the root boundary at 2
        assert_eq!(idx.leftmost(&b, 1, 2, 2), Some(1));
        // but "aba" with that alignment has no earlier aligned copy
        assert_eq!(idx.leftmost(&b, 1, 2, 3), Some(1));
        assert_eq!(idx.char_leftmost(b'a'), Some(1));
        assert_eq!(idx.char_leftmost(b'b'), Some(2));
        assert_eq!(idx.char_leftmost(b'c'), None);
    }

    #[test]
    fn exhaustive_against_brute_force_on_random_grammars() {
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        for round in 0..200 {
            let slp = crate::corpus::random_slp(&mut rng, 2, 24, 200);
            let sort = if round % 2 == 0 {
                SortMode::Fingerprint
            } else {
                SortMode::Expansion
            };
            let tier = if round % 3 == 0 {
                Tier::Baseline
            } else {
                Tier::ZFast
            };
            let (b, idx) = build_index(&slp, round as u64, sort, tier);
            let text = expand(&b.slp);
            let n = text.len() as u64;
            for i in 1..=n {
                for j in i..=n.min(i + 8) {
                    for k in j..=n.min(j + 8) {
                        assert_eq!(
                            idx.leftmost(&b, i, j, k),
                            brute_leftmost(&b, &text, i, j, k),
                            "round {round} sort {sort:?} tier {tier:?} i={i} j={j} k={k}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn anchoring_covers_the_true_leftmost_occurrence() {
        // minimum over all splits j of leftmost(i, j, k) must be the true
        // leftmost occurrence whenever the pattern occurs at all
        let mut rng = ChaCha8Rng::seed_from_u64(52);
        for round in 0..30 {
            let n = rng.gen_range(20..150u64);
            let text: Vec<u8> = (0..n).map(|_| b'a' + rng.gen_range(0..2u8)).collect();
            let mut bytes = text.clone();
            bytes.sort_unstable();
            bytes.dedup();
            let id = |b: u8| bytes.iter().position(|&x| x == b).unwrap() as Sym;
            let sigma = bytes.len() as Sym;
            let mut rules = Vec::new();
            let mut acc = id(text[0]);
            for &c in &text[1..] {
                rules.push((acc, id(c)));
                acc = sigma + rules.len() as Sym - 1;
            }
            let slp = Slp {
                terminal_bytes: bytes,
                rules,
                root: acc,
            };
            let (b, idx) = build_index(&slp, round, SortMode::Fingerprint, Tier::ZFast);
            for _ in 0..200 {
                let i = rng.gen_range(1..=n);
                let k = rng.gen_range(i..=n.min(i + 10));
                let pat = &text[(i - 1) as usize..k as usize];
                let true_leftmost = (0..text.len() - pat.len() + 1)
                    .position(|o| &text[o..o + pat.len()] == pat)
                    .map(|o| o as u64 + 1)
                    .unwrap();
                let got = (i..=k)
                    .filter_map(|j| idx.leftmost(&b, i, j, k))
                    .min()
                    .unwrap();
                assert_eq!(got, true_leftmost, "round {round} i={i} k={k}");
            }
        }
    }
}
