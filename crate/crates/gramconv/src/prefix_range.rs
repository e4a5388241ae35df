//! Rank-range lookup over a sorted multiset of text spans: which members
//! have a given pattern as an oriented prefix? Two interchangeable tiers
//! answer it, a plain binary search over the members and a fingerprint
//! trie that replaces the per-step comparisons with hash probes.

use crate::text::{oriented_lce, prefix_compare, span_byte, Dir, Span, TextIndex};
use crate::zfast::ZFastTrie;
use std::cmp::Ordering;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tier {
    /// Fingerprint trie; O(log |P|) hash probes per query.
    ZFast,
    /// Binary search; O(log m) span comparisons per query.
    Baseline,
}

impl Default for Tier {
    fn default() -> Self {
        Tier::ZFast
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PrefixRangeError {
    #[error("member at rank {rank} breaks the required sorted order")]
    Unsorted { rank: usize },
}

/// Sorted member spans plus the chosen query tier.
///
/// Baseline answers are always exact. Trie answers are exact whp when the
/// pattern prefixes at least one member and arbitrary otherwise, so
/// callers verify whatever they derive from a trie range.
pub struct PrefixRangeIndex {
    members: Vec<Span>,
    dir: Dir,
    trie: Option<ZFastTrie>,
}

impl PrefixRangeIndex {
    /// Checks the members are sorted (their adjacent common-prefix lengths
    /// fall out of the check) and builds the requested tier.
    pub fn new<T: TextIndex + ?Sized>(
        t: &T,
        members: Vec<Span>,
        dir: Dir,
        tier: Tier,
    ) -> Result<PrefixRangeIndex, PrefixRangeError> {
        let mut lcps = Vec::with_capacity(members.len().saturating_sub(1));
        for (i, w) in members.windows(2).enumerate() {
            let (a, b) = (w[0], w[1]);
            let l = oriented_lce(t, a, b, dir);
            if l < a.len.min(b.len) {
                let (ba, bb) = (span_byte(t, a, dir, l + 1), span_byte(t, b, dir, l + 1));
                if ba >= bb {
                    return Err(PrefixRangeError::Unsorted { rank: i + 2 });
                }
            } else if l == b.len && l < a.len {
                // b is a proper prefix of a, so b should have come first
                return Err(PrefixRangeError::Unsorted { rank: i + 2 });
            }
            lcps.push(l);
        }
        let trie = match tier {
            Tier::ZFast => Some(ZFastTrie::build(t, &members, dir, &lcps)),
            Tier::Baseline => None,
        };
        Ok(PrefixRangeIndex { members, dir, trie })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Member at a 1-based rank.
    pub fn member(&self, rank: usize) -> Span {
        self.members[rank - 1]
    }

    /// 1-based inclusive rank range of members with `pat` as oriented
    /// prefix; lo > hi means empty.
    pub fn range<T: TextIndex + ?Sized>(&self, t: &T, pat: Span) -> (usize, usize) {
        match &self.trie {
            Some(trie) => trie.locus(t, pat, self.dir),
            None => {
                let lo = self
                    .members
                    .partition_point(|&m| prefix_compare(t, m, pat, self.dir) == Ordering::Less);
                let hi = self
                    .members
                    .partition_point(|&m| prefix_compare(t, m, pat, self.dir) != Ordering::Greater);
                (lo + 1, hi)
            }
        }
    }
}
