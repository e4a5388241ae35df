//! Straight-line programs: binary grammars generating exactly one string.
//!
//! Symbols are dense ids. Ids `0..sigma` are terminals carrying one byte
//! each; id `sigma + i` is defined by `rules[i]` and must reference only
//! smaller ids. Text positions are 1-based throughout.

use crate::fingerprint::FingerprintContext;
use thiserror::Error;

/// Symbol identifier inside a grammar.
pub type Sym = u32;
/// 1-based text position or length.
pub type Pos = u64;

/// Largest text length any grammar may expand to.
pub const MAX_TEXT_LEN: u64 = 1 << 62;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SlpError {
    #[error("rule {rule} references symbol {operand} not defined before it")]
    ForwardReference { rule: usize, operand: Sym },
    #[error("root {root} out of range for {symbols} symbols")]
    RootOutOfRange { root: Sym, symbols: usize },
    #[error("rule {rule} expands beyond the maximum text length")]
    LengthOverflow { rule: usize },
    #[error("rule {rule} is not reachable from the root")]
    UnreachableRule { rule: usize },
    #[error("grammar has no terminals")]
    EmptyAlphabet,
    #[error("input text is empty")]
    EmptyText,
}

/// A straight-line program in Chomsky normal form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Slp {
    /// Byte value of each terminal; terminal ids are `0..terminal_bytes.len()`.
    pub terminal_bytes: Vec<u8>,
    /// `rules[i]` defines symbol `sigma + i` as the concatenation of two symbols.
    pub rules: Vec<(Sym, Sym)>,
    /// Start symbol.
    pub root: Sym,
}

impl Slp {
    #[inline]
    pub fn sigma(&self) -> usize {
        self.terminal_bytes.len()
    }

    #[inline]
    pub fn num_symbols(&self) -> usize {
        self.terminal_bytes.len() + self.rules.len()
    }

    #[inline]
    pub fn is_terminal(&self, s: Sym) -> bool {
        (s as usize) < self.terminal_bytes.len()
    }

    #[inline]
    pub fn rule(&self, s: Sym) -> (Sym, Sym) {
        self.rules[s as usize - self.terminal_bytes.len()]
    }
}

/// Per-symbol data computed by validation: expansion length and parse-tree
/// height (terminals have height 0).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolMeta {
    pub exp_len: Vec<u64>,
    pub height: Vec<u32>,
}

impl SymbolMeta {
    #[inline]
    pub fn len(&self, s: Sym) -> u64 {
        self.exp_len[s as usize]
    }

    pub fn text_len(&self, slp: &Slp) -> u64 {
        self.exp_len[slp.root as usize]
    }
}

/// Checks structural well-formedness: topological rule order, root in range,
/// no expansion-length overflow, every rule reachable from the root, and a
/// nonempty alphabet. Returns expansion lengths and heights on success.
pub fn validate(slp: &Slp) -> Result<SymbolMeta, SlpError> {
    let sigma = slp.sigma();
    if sigma == 0 {
        return Err(SlpError::EmptyAlphabet);
    }
    let total = slp.num_symbols();
    if (slp.root as usize) >= total {
        return Err(SlpError::RootOutOfRange {
            root: slp.root,
            symbols: total,
        });
    }
    let mut exp_len = vec![0u64; total];
    let mut height = vec![0u32; total];
    for (i, len) in exp_len.iter_mut().enumerate().take(sigma) {
        *len = 1;
        height[i] = 0;
    }
    for (i, &(l, r)) in slp.rules.iter().enumerate() {
        let id = sigma + i;
        if l as usize >= id {
            return Err(SlpError::ForwardReference { rule: i, operand: l });
        }
        if r as usize >= id {
            return Err(SlpError::ForwardReference { rule: i, operand: r });
        }
        let len = exp_len[l as usize]
            .checked_add(exp_len[r as usize])
            .filter(|&v| v <= MAX_TEXT_LEN)
            .ok_or(SlpError::LengthOverflow { rule: i })?;
        exp_len[id] = len;
        height[id] = height[l as usize].max(height[r as usize]) + 1;
    }
    // Reachability: every rule must occur in the root's derivation.
    let mut reached = vec![false; total];
    let mut stack = vec![slp.root];
    while let Some(s) = stack.pop() {
        if reached[s as usize] {
            continue;
        }
        reached[s as usize] = true;
        if !slp.is_terminal(s) {
            let (l, r) = slp.rule(s);
            stack.push(l);
            stack.push(r);
        }
    }
    for i in 0..slp.rules.len() {
        if !reached[sigma + i] {
            return Err(SlpError::UnreachableRule { rule: i });
        }
    }
    Ok(SymbolMeta { exp_len, height })
}

/// Streaming expansion of one symbol, front to back. Uses an explicit stack
/// so arbitrarily deep grammars cannot overflow the call stack.
pub struct ExpandIter<'a> {
    slp: &'a Slp,
    stack: Vec<Sym>,
}

impl<'a> Iterator for ExpandIter<'a> {
    type Item = u8;

    fn next(&mut self) -> Option<u8> {
        loop {
            let top = self.stack.pop()?;
            if self.slp.is_terminal(top) {
                return Some(self.slp.terminal_bytes[top as usize]);
            }
            let (l, r) = self.slp.rule(top);
            self.stack.push(r);
            self.stack.push(l);
        }
    }
}

/// Iterator over the expansion of `sym`.
pub fn expand_iter(slp: &Slp, sym: Sym) -> ExpandIter<'_> {
    ExpandIter {
        slp,
        stack: vec![sym],
    }
}

/// Materializes the expansion of `sym`.
pub fn expand_symbol(slp: &Slp, sym: Sym) -> Vec<u8> {
    expand_iter(slp, sym).collect()
}

/// Materializes the whole text.
pub fn expand(slp: &Slp) -> Vec<u8> {
    expand_symbol(slp, slp.root)
}

/// Node of the grammar tree (see `build_grammar_tree`).
#[derive(Debug, Clone)]
pub struct TreeNode {
    pub symbol: Sym,
    /// 1-based start of this node's expansion in the text.
    pub start: Pos,
    /// `None` for leaves.
    pub children: Option<[u32; 2]>,
}

/// The parse tree pruned so each nonterminal is internal only at its
/// leftmost occurrence; every other occurrence becomes a leaf. With g rules
/// the tree has exactly g internal nodes and at most g + 1 leaves.
#[derive(Debug, Clone)]
pub struct GrammarTree {
    pub nodes: Vec<TreeNode>,
    pub root: u32,
    /// For each rule index, the node where that nonterminal is internal.
    pub internal_node: Vec<u32>,
    /// Leaf node indices in text order.
    pub leaves: Vec<u32>,
}

impl GrammarTree {
    /// 1-based text position where rule `i`'s internal occurrence starts.
    pub fn internal_start(&self, rule: usize) -> Pos {
        self.nodes[self.internal_node[rule] as usize].start
    }
}

/// Builds the grammar tree by a preorder walk that expands each nonterminal
/// the first time it is met and prunes later occurrences into leaves. The
/// first visit in preorder is the leftmost occurrence, so the result matches
/// the leftmost-occurrence pruning rule.
pub fn build_grammar_tree(slp: &Slp, meta: &SymbolMeta) -> GrammarTree {
    let sigma = slp.sigma();
    let mut nodes: Vec<TreeNode> = Vec::with_capacity(2 * slp.rules.len() + 1);
    let mut internal_node = vec![u32::MAX; slp.rules.len()];
    let mut leaves = Vec::new();
    let mut expanded = vec![false; slp.num_symbols()];

    // stack of (symbol, start, parent slot); parent slot says where to record
    // the created node's index
    enum Slot {
        Root,
        Child { node: u32, side: usize },
    }
    let mut stack = vec![(slp.root, 1u64, Slot::Root)];
    let mut root_idx = 0u32;
    while let Some((sym, start, slot)) = stack.pop() {
        let idx = nodes.len() as u32;
        let internal = !slp.is_terminal(sym) && !expanded[sym as usize];
        nodes.push(TreeNode {
            symbol: sym,
            start,
            children: None,
        });
        match slot {
            Slot::Root => root_idx = idx,
            Slot::Child { node, side } => {
                let slots = nodes[node as usize].children.get_or_insert([0, 0]);
                slots[side] = idx;
            }
        }
        if internal {
            expanded[sym as usize] = true;
            internal_node[sym as usize - sigma] = idx;
            nodes[idx as usize].children = Some([0, 0]);
            let (l, r) = slp.rule(sym);
            // push right first so the left child is visited first (preorder)
            stack.push((
                r,
                start + meta.len(l),
                Slot::Child { node: idx, side: 1 },
            ));
            stack.push((l, start, Slot::Child { node: idx, side: 0 }));
        } else {
            leaves.push(idx);
        }
    }
    // leaves were produced in preorder = text order for leaves
    GrammarTree {
        nodes,
        root: root_idx,
        internal_node,
        leaves,
    }
}

/// Per-symbol fingerprints of expansions, composed bottom-up so a symbol's
/// value is independent of where it occurs.
pub fn symbol_fingerprints(slp: &Slp, meta: &SymbolMeta, ctx: &FingerprintContext) -> Vec<u64> {
    let total = slp.num_symbols();
    let mut fps = vec![0u64; total];
    for (i, &b) in slp.terminal_bytes.iter().enumerate() {
        fps[i] = ctx.byte(b);
    }
    let sigma = slp.sigma();
    for (i, &(l, r)) in slp.rules.iter().enumerate() {
        let id = sigma + i;
        let (l, r) = (l as usize, r as usize);
        fps[id] = ctx.append(fps[l], meta.exp_len[l], fps[r]);
    }
    fps
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abab() -> Slp {
        // 0='a', 1='b', 2 -> (0,1), 3 -> (2,2); expands to "abab"
        Slp {
            terminal_bytes: vec![b'a', b'b'],
            rules: vec![(0, 1), (2, 2)],
            root: 3,
        }
    }

    #[test]
    fn validate_computes_lengths_and_heights() {
        let g = abab();
        let meta = validate(&g).unwrap();
        assert_eq!(meta.exp_len, vec![1, 1, 2, 4]);
        assert_eq!(meta.height, vec![0, 0, 1, 2]);
        assert_eq!(expand(&g), b"abab");
    }

    #[test]
    fn validate_rejects_forward_reference() {
        let g = Slp {
            terminal_bytes: vec![b'a'],
            rules: vec![(0, 2)],
            root: 1,
        };
        assert_eq!(
            validate(&g),
            Err(SlpError::ForwardReference { rule: 0, operand: 2 })
        );
    }

    #[test]
    fn validate_rejects_bad_root_and_unreachable() {
        let g = Slp {
            terminal_bytes: vec![b'a'],
            rules: vec![],
            root: 5,
        };
        assert!(matches!(validate(&g), Err(SlpError::RootOutOfRange { .. })));
        let g = Slp {
            terminal_bytes: vec![b'a', b'b'],
            rules: vec![(0, 0), (1, 1)],
            root: 2,
        };
        assert_eq!(validate(&g), Err(SlpError::UnreachableRule { rule: 1 }));
    }

    #[test]
    fn single_terminal_grammar() {
        let g = Slp {
            terminal_bytes: vec![b'a'],
            rules: vec![],
            root: 0,
        };
        let meta = validate(&g).unwrap();
        assert_eq!(meta.text_len(&g), 1);
        assert_eq!(expand(&g), b"a");
    }

    #[test]
    fn grammar_tree_prunes_second_occurrence() {
        let g = abab();
        let meta = validate(&g).unwrap();
        let tree = build_grammar_tree(&g, &meta);
        // root (symbol 3) internal, left child internal node for 2 at pos 1,
        // right child a leaf labeled 2 at pos 3
        let root = &tree.nodes[tree.root as usize];
        assert_eq!(root.symbol, 3);
        let [l, r] = root.children.unwrap();
        assert_eq!(tree.nodes[l as usize].symbol, 2);
        assert!(tree.nodes[l as usize].children.is_some());
        assert_eq!(tree.nodes[r as usize].symbol, 2);
        assert!(tree.nodes[r as usize].children.is_none());
        assert_eq!(tree.nodes[r as usize].start, 3);
        assert_eq!(tree.internal_start(0), 1);
        assert_eq!(tree.internal_start(1), 1);
        // internal node count = rule count; leaf expansions tile the text
        let internal = tree.nodes.iter().filter(|n| n.children.is_some()).count();
        assert_eq!(internal, g.rules.len());
        let mut pos = 1u64;
        for &leaf in &tree.leaves {
            let n = &tree.nodes[leaf as usize];
            assert_eq!(n.start, pos);
            pos += meta.len(n.symbol);
        }
        assert_eq!(pos, meta.text_len(&g) + 1);
    }

    #[test]
    fn root_pair_of_same_symbol_prunes_right_copy() {
        // root -> (X, X) with X a terminal pair: second X must be a leaf
        let g = Slp {
            terminal_bytes: vec![b'a', b'b'],
            rules: vec![(0, 1), (2, 2)],
            root: 3,
        };
        let meta = validate(&g).unwrap();
        let tree = build_grammar_tree(&g, &meta);
        let [_, r] = tree.nodes[tree.root as usize].children.unwrap();
        assert!(tree.nodes[r as usize].children.is_none());
    }

    #[test]
    fn fingerprints_compose_per_symbol() {
        let g = abab();
        let meta = validate(&g).unwrap();
        let ctx = FingerprintContext::new(11);
        let fps = symbol_fingerprints(&g, &meta, &ctx);
        assert_eq!(fps[3], ctx.bytes(b"abab"));
        assert_eq!(fps[2], ctx.bytes(b"ab"));
        assert_eq!(fps[0], ctx.byte(b'a'));
    }
}
