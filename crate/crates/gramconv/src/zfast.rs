//! Compacted trie over a sorted span sequence, navigated by fingerprint
//! lookups on handle lengths instead of edge walks. A prefix query makes
//! O(log |P|) hash probes plus one child step, never touching member bytes
//! beyond the probed prefixes, so it stays fast when members are long.
//!
//! Results are only trustworthy when the pattern really is a prefix of some
//! member; otherwise the returned range may be arbitrary. Callers are
//! expected to verify the final answer with one fingerprint comparison.

use crate::text::{span_byte, span_prefix_fp, Dir, Span, TextIndex};
use std::collections::HashMap;

/// The element of (a, b] with the most trailing zeros; requires a < b.
pub fn two_fattest(a: u64, b: u64) -> u64 {
    debug_assert!(a < b);
    b & !((1u64 << (a ^ b).ilog2()) - 1)
}

const NO_NODE: u32 = u32::MAX;

pub struct ZFastTrie {
    /// String depth of each node's extent.
    depth: Vec<u64>,
    parent: Vec<u32>,
    /// Member rank range below each node, 1-based inclusive.
    lo: Vec<u32>,
    hi: Vec<u32>,
    /// (parent, branching byte) -> child.
    children: HashMap<(u32, u8), u32>,
    /// (handle length, fingerprint of that long a prefix) -> node.
    zmap: HashMap<(u64, u64), u32>,
}

impl ZFastTrie {
    /// Builds from members in oriented sorted order and their adjacent
    /// longest-common-prefix lengths (`lcps[i]` pairs members i and i+1).
    pub fn build<T: TextIndex + ?Sized>(
        t: &T,
        members: &[Span],
        dir: Dir,
        lcps: &[u64],
    ) -> ZFastTrie {
        let k = members.len();
        assert!(k < (u32::MAX / 2) as usize, "too many members");
        assert_eq!(lcps.len(), k.saturating_sub(1));
        let mut trie = ZFastTrie {
            depth: vec![0],
            parent: vec![NO_NODE],
            lo: vec![1],
            hi: vec![k as u32],
            children: HashMap::new(),
            zmap: HashMap::new(),
        };
        if k == 0 {
            return trie;
        }

        let push = |trie: &mut ZFastTrie, depth: u64, lo: u32| -> u32 {
            let id = trie.depth.len() as u32;
            trie.depth.push(depth);
            trie.parent.push(NO_NODE);
            trie.lo.push(lo);
            trie.hi.push(0);
            id
        };

        // stack of open nodes on the rightmost path, depths strictly increasing
        let mut stack: Vec<u32> = vec![0];
        assert!(members[0].len > 0, "members must be nonempty strings");
        let first = push(&mut trie, members[0].len, 1);
        stack.push(first);

        for i in 1..k {
            let h = lcps[i - 1];
            assert!(members[i].len > 0, "members must be nonempty strings");
            if h == members[i].len {
                // equal to its predecessor: the open leaf absorbs this rank
                continue;
            }
            let mut last = NO_NODE;
            while trie.depth[*stack.last().unwrap() as usize] > h {
                let n = stack.pop().unwrap();
                trie.hi[n as usize] = i as u32;
                trie.parent[n as usize] = *stack.last().unwrap();
                last = n;
            }
            let top = *stack.last().unwrap();
            if trie.depth[top as usize] < h {
                // split the edge to the just-popped child at depth h
                let lo = trie.lo[last as usize];
                let v = push(&mut trie, h, lo);
                trie.parent[last as usize] = v;
                stack.push(v);
            }
            let leaf = push(&mut trie, members[i].len, (i + 1) as u32);
            stack.push(leaf);
        }
        while let Some(n) = stack.pop() {
            trie.hi[n as usize] = k as u32;
            if let Some(&below) = stack.last() {
                trie.parent[n as usize] = below;
            }
        }

        for n in 1..trie.depth.len() as u32 {
            let p = trie.parent[n as usize];
            let sample = members[trie.lo[n as usize] as usize - 1];
            let (pd, nd) = (trie.depth[p as usize], trie.depth[n as usize]);
            let byte = span_byte(t, sample, dir, pd + 1);
            trie.children.insert((p, byte), n);
            let f = two_fattest(pd, nd);
            let fp = span_prefix_fp(t, sample, dir, f);
            trie.zmap.insert((f, fp), n);
        }
        trie
    }

    /// Rank range (1-based, inclusive) of members with `pat` as an oriented
    /// prefix; exact whp when such members exist, arbitrary otherwise.
    pub fn locus<T: TextIndex + ?Sized>(&self, t: &T, pat: Span, dir: Dir) -> (usize, usize) {
        let p = pat.len;
        if p == 0 {
            return (1, self.hi[0] as usize);
        }
        let (mut a, mut b) = (0u64, p);
        let mut v = 0u32;
        while a < b {
            let f = two_fattest(a, b);
            match self.zmap.get(&(f, span_prefix_fp(t, pat, dir, f))) {
                Some(&u) => {
                    v = u;
                    a = self.depth[u as usize].min(b);
                }
                None => b = f - 1,
            }
        }
        if self.depth[v as usize] < p {
            let byte = span_byte(t, pat, dir, self.depth[v as usize] + 1);
            match self.children.get(&(v, byte)) {
                Some(&c) => v = c,
                None => return (1, 0),
            }
        }
        if self.depth[v as usize] < p {
            return (1, 0);
        }
        (self.lo[v as usize] as usize, self.hi[v as usize] as usize)
    }
}
