//! Text queries over a run-length grammar without expanding it: random
//! access, substring fingerprints, and parse-tree walks that gather the
//! candidate split positions a pattern occurrence could straddle.

use std::collections::BTreeSet;

use crate::fingerprint::FingerprintContext;
use crate::lcg::{validate_lcg, LcgError, LcgMeta, LcgRule, Rlcfg};
use crate::slp::{Pos, Sym};
use crate::text::TextIndex;

/// Cumulative child lengths and fingerprints of one block rule. Run rules
/// store neither: their copies are pure arithmetic.
struct BlockPrefix {
    lens: Vec<u64>,
    fps: Vec<u64>,
}

/// Query handle over a run-length grammar: per-symbol expansion lengths
/// and fingerprints plus per-block prefix arrays, answering byte and
/// fingerprint lookups by one root-to-leaf descent each.
pub struct LcgNavigator {
    g: Rlcfg,
    meta: LcgMeta,
    ctx: FingerprintContext,
    fps: Vec<u64>,
    prefix: Vec<BlockPrefix>,
}

/// One node of a root-to-leaf descent: the symbol and the 1-based text
/// interval its expansion covers. Each copy of a run counts as its own
/// node, so consecutive entries are always parent and child.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PathNode {
    pub sym: Sym,
    pub start: Pos,
    pub end: Pos,
}

/// Sorted split positions for a pattern range `T[i..=j]`: every position
/// `q` where some occurrence of the pattern may cross a block boundary
/// between its characters aligned to `q` and `q+1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitCandidates {
    pub positions: Vec<Pos>,
}

impl LcgNavigator {
    /// Validates the grammar and precomputes every per-symbol table.
    pub fn new(g: Rlcfg, ctx: FingerprintContext) -> Result<LcgNavigator, LcgError> {
        let meta = validate_lcg(&g)?;
        let mut fps = vec![0u64; g.num_symbols()];
        for (s, &b) in g.terminal_bytes.iter().enumerate() {
            fps[s] = ctx.byte(b);
        }
        let mut prefix = Vec::with_capacity(g.rules.len());
        for (r, rule) in g.rules.iter().enumerate() {
            let sym = g.sigma() + r;
            match rule {
                LcgRule::Run(y, t) => {
                    fps[sym] = ctx.repeat(fps[*y as usize], meta.exp_len[*y as usize], *t);
                    prefix.push(BlockPrefix {
                        lens: Vec::new(),
                        fps: Vec::new(),
                    });
                }
                LcgRule::Block(children) => {
                    let mut lens = Vec::with_capacity(children.len() + 1);
                    let mut pfps = Vec::with_capacity(children.len() + 1);
                    let mut acc = ctx.empty();
                    let mut acc_len = 0u64;
                    lens.push(0);
                    pfps.push(acc);
                    for &c in children {
                        acc = ctx.append(acc, acc_len, fps[c as usize]);
                        acc_len += meta.exp_len[c as usize];
                        lens.push(acc_len);
                        pfps.push(acc);
                    }
                    fps[sym] = acc;
                    prefix.push(BlockPrefix { lens, fps: pfps });
                }
            }
        }
        Ok(LcgNavigator {
            g,
            meta,
            ctx,
            fps,
            prefix,
        })
    }

    pub fn grammar(&self) -> &Rlcfg {
        &self.g
    }

    pub fn meta(&self) -> &LcgMeta {
        &self.meta
    }

    pub fn root(&self) -> Sym {
        self.g.root
    }

    pub fn len_of(&self, s: Sym) -> u64 {
        self.meta.exp_len[s as usize]
    }

    /// Fingerprint of the full expansion of a symbol.
    pub fn symbol_fp(&self, s: Sym) -> u64 {
        self.fps[s as usize]
    }

    /// Cumulative child expansion lengths of a block rule (arity+1 entries
    /// starting at 0).
    pub(crate) fn child_prefix_lens(&self, sym: Sym) -> &[u64] {
        &self.prefix[sym as usize - self.g.sigma()].lens
    }

    fn block_prefix(&self, sym: Sym) -> &BlockPrefix {
        &self.prefix[sym as usize - self.g.sigma()]
    }

    /// Fingerprint of T[1..=k].
    fn prefix_fp(&self, mut k: u64) -> u64 {
        let mut sym = self.g.root;
        let mut acc = self.ctx.empty();
        let mut acc_len = 0u64;
        loop {
            if k == 0 {
                return acc;
            }
            if k == self.len_of(sym) {
                return self.ctx.append(acc, acc_len, self.fps[sym as usize]);
            }
            match self.g.rule(sym) {
                LcgRule::Run(y, _) => {
                    let ly = self.len_of(*y);
                    let full = (k - 1) / ly;
                    if full > 0 {
                        let fp = self.ctx.repeat(self.fps[*y as usize], ly, full);
                        acc = self.ctx.append(acc, acc_len, fp);
                        acc_len += full * ly;
                        k -= full * ly;
                    }
                    sym = *y;
                }
                LcgRule::Block(children) => {
                    let pre = self.block_prefix(sym);
                    let q = pre.lens.partition_point(|&l| l < k) - 1;
                    acc = self.ctx.append(acc, acc_len, pre.fps[q]);
                    acc_len += pre.lens[q];
                    k -= pre.lens[q];
                    sym = children[q];
                }
            }
        }
    }

    /// Root-to-leaf path to the node whose expansion is T[pos].
    pub fn path_to(&self, pos: Pos) -> Vec<PathNode> {
        assert!(
            1 <= pos && pos <= self.text_len(),
            "position {pos} out of range"
        );
        let mut path = Vec::new();
        let mut sym = self.g.root;
        let mut start = 1u64;
        loop {
            let end = start + self.len_of(sym) - 1;
            path.push(PathNode { sym, start, end });
            if self.g.is_terminal(sym) {
                return path;
            }
            match self.g.rule(sym) {
                LcgRule::Run(y, _) => {
                    let ly = self.len_of(*y);
                    start += (pos - start) / ly * ly;
                    sym = *y;
                }
                LcgRule::Block(children) => {
                    let pre = self.block_prefix(sym);
                    let off = pos - start + 1;
                    let q = pre.lens.partition_point(|&l| l < off) - 1;
                    start += pre.lens[q];
                    sym = children[q];
                }
            }
        }
    }

    /// Highest parse level at which the path node at `d` is still a block
    /// of the level's sequence: one below its parent's creation level. A
    /// symbol passes through every level between its own creation and its
    /// parent's, and run copies inherit the repeated symbol's level.
    fn top_level(&self, path: &[PathNode], d: usize) -> u32 {
        if d == 0 {
            u32::MAX
        } else {
            self.g.level[path[d - 1].sym as usize] - 1
        }
    }

    /// Split candidates for the pattern T[i..=j], with 1 <= i < j <= n.
    ///
    /// Both walks visit the parse levels bottom-up. The left walk tracks
    /// the last boundary found and records, per level, the end of that
    /// level's block holding the following position; the right walk
    /// mirrors this with block starts. A level whose block merely extends
    /// the previous boundary contributes nothing new, so the walk descends
    /// again past it. Both stop once the boundary leaves [i, j-1].
    pub fn split_candidates(&self, i: Pos, j: Pos) -> SplitCandidates {
        let n = self.text_len();
        assert!(
            1 <= i && i < j && j <= n,
            "bad pattern range {i}..{j} for text length {n}"
        );
        let mut m = BTreeSet::new();
        m.insert(i);
        m.insert(j - 1);

        let mut cur = i;
        let mut v = 1u32;
        'left: loop {
            let path = self.path_to(cur + 1);
            let mut d = path.len() - 1;
            while self.top_level(&path, d) < v {
                d -= 1;
            }
            loop {
                if path[d].end == cur {
                    continue 'left; // block ends flush: the level-v block holding cur+1 starts right of this path
                }
                if path[d].end > j - 1 {
                    break 'left;
                }
                m.insert(path[d].end);
                cur = path[d].end;
                v += 1;
                if self.top_level(&path, d) < v {
                    d -= 1;
                } else {
                    continue 'left; // same block spans level v too, so it is flush now
                }
            }
        }

        let mut cur = j;
        let mut v = 1u32;
        'right: loop {
            let path = self.path_to(cur - 1);
            let mut d = path.len() - 1;
            while self.top_level(&path, d) < v {
                d -= 1;
            }
            loop {
                if path[d].start == cur {
                    continue 'right;
                }
                if path[d].start - 1 < i {
                    break 'right;
                }
                m.insert(path[d].start - 1);
                cur = path[d].start;
                v += 1;
                if self.top_level(&path, d) < v {
                    d -= 1;
                } else {
                    continue 'right;
                }
            }
        }

        SplitCandidates {
            positions: m.into_iter().collect(),
        }
    }
}

impl TextIndex for LcgNavigator {
    fn text_len(&self) -> u64 {
        self.meta.text_len(&self.g)
    }

    fn byte_at(&self, i: u64) -> u8 {
        assert!(1 <= i && i <= self.text_len(), "position {i} out of range");
        let mut sym = self.g.root;
        let mut off = i;
        loop {
            if self.g.is_terminal(sym) {
                return self.g.terminal_bytes[sym as usize];
            }
            match self.g.rule(sym) {
                LcgRule::Run(y, _) => {
                    let ly = self.len_of(*y);
                    off = (off - 1) % ly + 1;
                    sym = *y;
                }
                LcgRule::Block(children) => {
                    let pre = self.block_prefix(sym);
                    let q = pre.lens.partition_point(|&l| l < off) - 1;
                    off -= pre.lens[q];
                    sym = children[q];
                }
            }
        }
    }

    fn range_fp(&self, i: u64, j: u64) -> u64 {
        if i > j {
            return self.ctx.empty();
        }
        assert!(1 <= i && j <= self.text_len(), "range {i}..{j} out of range");
        let whole = self.prefix_fp(j);
        let head = self.prefix_fp(i - 1);
        self.ctx.cut_prefix(whole, head, i - 1)
    }

    fn fp_ctx(&self) -> &FingerprintContext {
        &self.ctx
    }
}
