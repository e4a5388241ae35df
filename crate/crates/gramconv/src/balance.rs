//! Height reduction of a grammar plus the logarithmic-time text queries it
//! enables: random access, substring fingerprints, LCE and ordering.
//!
//! The rebuild re-expresses each nonterminal as an AVL-balanced derivation
//! over its children's rebuilt derivations, joined spine-wise with
//! rotations, so equal trees are shared through hash-consing. The result
//! can be a constant factor larger than the input (observed well under the
//! O(g log n) worst case) but its height is at most
//! `BALANCE_ALPHA * log2(n) + BALANCE_BETA`.

use crate::fingerprint::FingerprintContext;
use crate::slp::{symbol_fingerprints, validate, Slp, Sym, SymbolMeta};
use crate::text::TextIndex;
use std::collections::HashMap;

/// Documented height-bound constants: height(root) <= ALPHA*log2(n) + BETA.
pub const BALANCE_ALPHA: f64 = 1.5;
pub const BALANCE_BETA: f64 = 8.0;

/// Strategy for producing an equivalent low-height grammar.
pub trait Balancer {
    fn balance(&self, slp: &Slp, meta: &SymbolMeta) -> Slp;
}

/// AVL-join rebuild: children are concatenated by descending the taller
/// derivation's spine and joining at matching height, restoring balance
/// with sequence-preserving rotations.
pub struct AvlBalancer;

struct JoinArena {
    sigma: usize,
    rules: Vec<(Sym, Sym)>,
    height: Vec<u32>,
    len: Vec<u64>,
    cons: HashMap<(Sym, Sym), Sym>,
}

impl JoinArena {
    fn new(sigma: usize) -> Self {
        JoinArena {
            sigma,
            rules: Vec::new(),
            height: Vec::new(),
            len: Vec::new(),
            cons: HashMap::new(),
        }
    }

    fn h(&self, s: Sym) -> u32 {
        let s = s as usize;
        if s < self.sigma {
            0
        } else {
            self.height[s - self.sigma]
        }
    }

    fn children(&self, s: Sym) -> (Sym, Sym) {
        self.rules[s as usize - self.sigma]
    }

    fn mk(&mut self, l: Sym, r: Sym) -> Sym {
        if let Some(&s) = self.cons.get(&(l, r)) {
            return s;
        }
        let id = (self.sigma + self.rules.len()) as Sym;
        self.rules.push((l, r));
        self.height.push(1 + self.h(l).max(self.h(r)));
        let len = (if (l as usize) < self.sigma { 1 } else { self.len[l as usize - self.sigma] })
            + (if (r as usize) < self.sigma { 1 } else { self.len[r as usize - self.sigma] });
        self.len.push(len);
        self.cons.insert((l, r), id);
        id
    }

    fn rotate_left(&mut self, a: Sym, b: Sym) -> Sym {
        let (b1, b2) = self.children(b);
        let l = self.mk(a, b1);
        self.mk(l, b2)
    }

    fn rotate_right_then_left(&mut self, l: Sym, c: Sym, r: Sym) -> Sym {
        // l . c . r with h(c) = h(l)+1 = h(r)+1: split c and share it out
        let (c1, c2) = self.children(c);
        let left = self.mk(l, c1);
        let right = self.mk(c2, r);
        self.mk(left, right)
    }

    fn rotate_right(&mut self, a: Sym, b: Sym) -> Sym {
        let (a1, a2) = self.children(a);
        let r = self.mk(a2, b);
        self.mk(a1, r)
    }

    fn rotate_left_then_right(&mut self, l: Sym, c: Sym, r: Sym) -> Sym {
        let (c1, c2) = self.children(c);
        let left = self.mk(l, c1);
        let right = self.mk(c2, r);
        self.mk(left, right)
    }

    fn join(&mut self, l: Sym, r: Sym) -> Sym {
        let (hl, hr) = (self.h(l), self.h(r));
        if hl > hr + 1 {
            self.join_right(l, r)
        } else if hr > hl + 1 {
            self.join_left(l, r)
        } else {
            self.mk(l, r)
        }
    }

    // pre: h(l) > h(r) + 1, so l is a rule
    fn join_right(&mut self, l: Sym, r: Sym) -> Sym {
        let (a, c) = self.children(l);
        if self.h(c) <= self.h(r) + 1 {
            let t = self.mk(c, r);
            if self.h(t) <= self.h(a) + 1 {
                self.mk(a, t)
            } else {
                // h(c) = h(r)+1 = h(a)+1: double rotation splits c
                self.rotate_right_then_left(a, c, r)
            }
        } else {
            let t = self.join_right(c, r);
            if self.h(t) <= self.h(a) + 1 {
                self.mk(a, t)
            } else {
                let joined = self.mk(a, t);
                let (x, y) = self.children(joined);
                self.rotate_left(x, y)
            }
        }
    }

    // pre: h(r) > h(l) + 1, so r is a rule
    fn join_left(&mut self, l: Sym, r: Sym) -> Sym {
        let (c, a) = self.children(r);
        if self.h(c) <= self.h(l) + 1 {
            let t = self.mk(l, c);
            if self.h(t) <= self.h(a) + 1 {
                self.mk(t, a)
            } else {
                self.rotate_left_then_right(l, c, a)
            }
        } else {
            let t = self.join_left(l, c);
            if self.h(t) <= self.h(a) + 1 {
                self.mk(t, a)
            } else {
                let joined = self.mk(t, a);
                let (x, y) = self.children(joined);
                self.rotate_right(x, y)
            }
        }
    }
}

impl Balancer for AvlBalancer {
    fn balance(&self, slp: &Slp, _meta: &SymbolMeta) -> Slp {
        let sigma = slp.sigma();
        let mut arena = JoinArena::new(sigma);
        let mut mapped: Vec<Sym> = (0..sigma as Sym).collect();
        for i in 0..slp.rules.len() {
            let (y, z) = slp.rules[i];
            let (by, bz) = (mapped[y as usize], mapped[z as usize]);
            mapped.push(arena.join(by, bz));
        }
        let root = mapped[slp.root as usize];

        // keep only rules reachable from the new root
        let mut live = vec![false; arena.rules.len()];
        let mut stack = Vec::new();
        if root as usize >= sigma {
            stack.push(root);
        }
        while let Some(s) = stack.pop() {
            let idx = s as usize - sigma;
            if live[idx] {
                continue;
            }
            live[idx] = true;
            let (l, r) = arena.rules[idx];
            for c in [l, r] {
                if c as usize >= sigma {
                    stack.push(c);
                }
            }
        }
        let mut remap = vec![0 as Sym; arena.rules.len()];
        let mut rules = Vec::new();
        for (i, &(l, r)) in arena.rules.iter().enumerate() {
            if live[i] {
                let map = |s: Sym, remap: &[Sym]| {
                    if (s as usize) < sigma {
                        s
                    } else {
                        remap[s as usize - sigma]
                    }
                };
                remap[i] = (sigma + rules.len()) as Sym;
                rules.push((map(l, &remap), map(r, &remap)));
            }
        }
        let new_root = if (root as usize) < sigma {
            root
        } else {
            remap[root as usize - sigma]
        };
        Slp {
            terminal_bytes: slp.terminal_bytes.clone(),
            rules,
            root: new_root,
        }
    }
}

/// A validated low-height grammar with per-symbol metadata and
/// fingerprints: the workhorse for all logarithmic-time text queries.
pub struct BalancedSlp {
    pub slp: Slp,
    pub meta: SymbolMeta,
    pub fps: Vec<u64>,
    pub ctx: FingerprintContext,
}

impl BalancedSlp {
    /// Rebalance a validated grammar and precompute query metadata.
    pub fn build(slp: &Slp, meta: &SymbolMeta, ctx: FingerprintContext) -> BalancedSlp {
        let balanced = AvlBalancer.balance(slp, meta);
        Self::from_low_height(balanced, ctx)
    }

    /// Wrap a grammar that is already low-height (skips the rebuild).
    pub fn from_low_height(slp: Slp, ctx: FingerprintContext) -> BalancedSlp {
        let meta = validate(&slp).expect("balanced grammar must stay valid");
        let fps = symbol_fingerprints(&slp, &meta, &ctx);
        BalancedSlp { slp, meta, fps, ctx }
    }

    pub fn root(&self) -> Sym {
        self.slp.root
    }

    fn len_of(&self, s: Sym) -> u64 {
        self.meta.exp_len[s as usize]
    }

    /// Fingerprint of exp(sym)[1..=k].
    fn prefix_fp_of(&self, mut sym: Sym, mut k: u64) -> u64 {
        let mut acc = self.ctx.empty();
        let mut acc_len = 0u64;
        loop {
            if k == 0 {
                return acc;
            }
            if k == self.len_of(sym) {
                return self.ctx.append(acc, acc_len, self.fps[sym as usize]);
            }
            let (y, z) = self.slp.rule(sym);
            let ylen = self.len_of(y);
            if k <= ylen {
                sym = y;
            } else {
                acc = self.ctx.append(acc, acc_len, self.fps[y as usize]);
                acc_len += ylen;
                k -= ylen;
                sym = z;
            }
        }
    }
}

impl TextIndex for BalancedSlp {
    fn text_len(&self) -> u64 {
        self.meta.text_len(&self.slp)
    }

    fn byte_at(&self, i: u64) -> u8 {
        assert!(1 <= i && i <= self.text_len(), "position {i} out of range");
        let mut sym = self.slp.root;
        let mut off = i;
        while !self.slp.is_terminal(sym) {
            let (y, z) = self.slp.rule(sym);
            let ylen = self.len_of(y);
            if off <= ylen {
                sym = y;
            } else {
                off -= ylen;
                sym = z;
            }
        }
        self.slp.terminal_bytes[sym as usize]
    }

    fn range_fp(&self, i: u64, j: u64) -> u64 {
        if i > j {
            return self.ctx.empty();
        }
        assert!(1 <= i && j <= self.text_len(), "range {i}..{j} out of range");
        let whole = self.prefix_fp_of(self.slp.root, j);
        let head = self.prefix_fp_of(self.slp.root, i - 1);
        self.ctx.cut_prefix(whole, head, i - 1)
    }

    fn fp_ctx(&self) -> &FingerprintContext {
        &self.ctx
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::slp::expand;
    use crate::text::{oriented_compare, oriented_lce, Dir, Span};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn abab() -> Slp {
        Slp {
            terminal_bytes: vec![b'a', b'b'],
            rules: vec![(0, 1), (2, 2)],
            root: 3,
        }
    }

    /// Left-leaning chain appending one terminal at a time.
    fn chain(text: &[u8]) -> Slp {
        let mut bytes: Vec<u8> = text.to_vec();
        bytes.sort_unstable();
        bytes.dedup();
        let id = |b: u8| bytes.iter().position(|&x| x == b).unwrap() as Sym;
        let sigma = bytes.len() as Sym;
        let mut rules = Vec::new();
        let mut acc = id(text[0]);
        for &b in &text[1..] {
            rules.push((acc, id(b)));
            acc = sigma + rules.len() as Sym - 1;
        }
        Slp {
            terminal_bytes: bytes,
            rules,
            root: acc,
        }
    }

    fn check_avl(slp: &Slp) {
        let meta = validate(slp).unwrap();
        let h = |s: Sym| meta.height[s as usize];
        for (i, &(l, r)) in slp.rules.iter().enumerate() {
            let _ = i;
            assert!(h(l).abs_diff(h(r)) <= 1, "unbalanced rule ({l},{r})");
        }
    }

    #[test]
    fn chain_of_256_as_flattens() {
        let g = chain(&[b'a'; 256]);
        let meta = validate(&g).unwrap();
        assert_eq!(meta.height[g.root as usize], 255);
        let b = AvlBalancer.balance(&g, &meta);
        let bmeta = validate(&b).unwrap();
        assert_eq!(expand(&b), vec![b'a'; 256]);
        let h = bmeta.height[b.root as usize] as f64;
        assert!(h <= BALANCE_ALPHA * 8.0 + BALANCE_BETA, "height {h}");
        check_avl(&b);
    }

    #[test]
    fn already_balanced_grammar_keeps_shape() {
        let g = abab();
        let meta = validate(&g).unwrap();
        let b = AvlBalancer.balance(&g, &meta);
        assert_eq!(expand(&b), b"abab");
        assert_eq!(b.rules.len(), 2);
        let bmeta = validate(&b).unwrap();
        assert_eq!(bmeta.height[b.root as usize], 2);
    }

    #[test]
    fn random_grammars_expand_identically() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for round in 0..300 {
            let sigma = rng.gen_range(1..4usize);
            let bytes: Vec<u8> = (0..sigma as u8).map(|i| b'a' + i).collect();
            let g_rules = rng.gen_range(1..40usize);
            let mut rules = Vec::new();
            for i in 0..g_rules {
                let max = sigma + i;
                rules.push((
                    rng.gen_range(0..max) as Sym,
                    rng.gen_range(0..max) as Sym,
                ));
            }
            // make every rule reachable by chaining the root down
            let root = (sigma + g_rules - 1) as Sym;
            let g = Slp {
                terminal_bytes: bytes,
                rules,
                root,
            };
            let meta = match validate(&g) {
                Ok(m) => m,
                Err(_) => continue, // unreachable rules; skip this draw
            };
            if meta.text_len(&g) > 1 << 16 {
                continue;
            }
            let b = AvlBalancer.balance(&g, &meta);
            assert_eq!(expand(&b), expand(&g), "round {round}");
            check_avl(&b);
            let bmeta = validate(&b).unwrap();
            let n = bmeta.text_len(&b) as f64;
            let h = bmeta.height[b.root as usize] as f64;
            assert!(h <= BALANCE_ALPHA * n.log2() + BALANCE_BETA);
        }
    }

    #[test]
    fn access_and_fp_match_plain_text() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let text: Vec<u8> = (0..500).map(|_| b'a' + rng.gen_range(0..3u8)).collect();
        let g = chain(&text);
        let meta = validate(&g).unwrap();
        let ctx = FingerprintContext::new(7);
        let b = BalancedSlp::build(&g, &meta, ctx);
        assert_eq!(b.text_len(), 500);
        let ctx2 = FingerprintContext::new(7);
        for _ in 0..500 {
            let i = rng.gen_range(1..=500u64);
            assert_eq!(b.byte_at(i), text[i as usize - 1]);
            let j = rng.gen_range(i..=500u64);
            assert_eq!(
                b.range_fp(i, j),
                ctx2.bytes(&text[(i - 1) as usize..j as usize])
            );
        }
    }

    #[test]
    fn fp_composition_law_holds_on_ranges() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let text: Vec<u8> = (0..300).map(|_| b'a' + rng.gen_range(0..2u8)).collect();
        let g = chain(&text);
        let meta = validate(&g).unwrap();
        let b = BalancedSlp::build(&g, &meta, FingerprintContext::new(8));
        for _ in 0..300 {
            let i = rng.gen_range(1..=300u64);
            let k = rng.gen_range(i..=300u64);
            let j = rng.gen_range(i..=k);
            let left = b.range_fp(i, j);
            let right = b.range_fp(j + 1, k);
            assert_eq!(b.range_fp(i, k), b.ctx.append(left, j - i + 1, right));
        }
    }

    #[test]
    fn documented_small_base_example() {
        // with base 10 and byte codes 1,2 the two-byte fingerprint is 210,
        // which reduces to 8 under a 101 modulus
        let ctx = FingerprintContext::with_base(0, 10);
        let g = Slp {
            terminal_bytes: vec![1u8, 2u8],
            rules: vec![(0, 1), (2, 2)],
            root: 3,
        };
        let meta = validate(&g).unwrap();
        let b = BalancedSlp::build(&g, &meta, ctx);
        assert_eq!(b.range_fp(1, 2), 210);
        assert_eq!(210 % 101, 8);
        assert_eq!(b.range_fp(1, 2), b.range_fp(3, 4));
    }

    #[test]
    fn lce_and_compare_over_grammar() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let mut text: Vec<u8> = (0..200).map(|_| b'a' + rng.gen_range(0..2u8)).collect();
        let copy: Vec<u8> = text[40..120].to_vec();
        text.extend_from_slice(&copy); // guarantee long shared substrings
        let n = text.len() as u64;
        let g = chain(&text);
        let meta = validate(&g).unwrap();
        let b = BalancedSlp::build(&g, &meta, FingerprintContext::new(9));
        for _ in 0..2000 {
            let i = rng.gen_range(1..=n);
            let i2 = rng.gen_range(1..=n);
            let a = Span::suffix(i, n);
            let c = Span::suffix(i2, n);
            let naive = text[(i - 1) as usize..]
                .iter()
                .zip(&text[(i2 - 1) as usize..])
                .take_while(|(x, y)| x == y)
                .count() as u64;
            assert_eq!(oriented_lce(&b, a, c, Dir::Fwd), naive);
            assert_eq!(
                oriented_compare(&b, a, c, Dir::Fwd),
                text[(i - 1) as usize..].cmp(&text[(i2 - 1) as usize..])
            );
        }
    }
}
