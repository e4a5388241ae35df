//! Brute-force reference implementations used by tests and the stats
//! command. These deliberately avoid the fingerprint and grammar machinery
//! they are used to check.

use crate::lz::{LzParse, Phrase};
use crate::slp::{build_grammar_tree, validate, Pos, Slp};
use num_rational::Ratio;

/// Z-array of `s`: z[i] = length of the longest common prefix of s and
/// s[i..] (z[0] = |s|).
pub fn z_array(s: &[u8]) -> Vec<usize> {
    let n = s.len();
    let mut z = vec![0usize; n];
    if n == 0 {
        return z;
    }
    z[0] = n;
    let (mut l, mut r) = (0usize, 0usize);
    for i in 1..n {
        if i < r {
            z[i] = (r - i).min(z[i - l]);
        }
        while i + z[i] < n && s[z[i]] == s[i + z[i]] {
            z[i] += 1;
        }
        if i + z[i] > r {
            l = i;
            r = i + z[i];
        }
    }
    z
}

/// Greedy left-to-right parse straight from the definition: each phrase is
/// the longest prefix of the remainder that occurs starting strictly
/// earlier (self-overlap allowed), or a fresh-byte literal. The source is
/// the leftmost occurrence achieving the maximal length.
pub fn naive_lz(text: &[u8]) -> LzParse {
    let n = text.len();
    let mut phrases = Vec::new();
    let mut i = 0usize; // 0-based here
    while i < n {
        // match length at q = lcp(text[q..], text[i..]), read off one
        // Z-array over pattern + placeholder + text; the placeholder byte
        // may collide with text bytes, so entries are capped at pat_len
        let z = {
            let mut s = text[i..].to_vec();
            s.push(0);
            s.extend_from_slice(text);
            z_array(&s)
        };
        let pat_len = n - i;
        let mut best_len = 0usize;
        let mut best_src = 0usize;
        for q in 0..i {
            // z-entry for text[q..] against the pattern, capped at the
            // pattern length so the placeholder byte cannot extend a match
            let m = z[pat_len + 1 + q].min(pat_len);
            if m > best_len {
                best_len = m;
                best_src = q;
            }
        }
        if best_len == 0 {
            phrases.push(Phrase::Literal(text[i]));
            i += 1;
        } else {
            phrases.push(Phrase::Copy {
                src: best_src as u64 + 1,
                len: best_len as u64,
            });
            i += best_len;
        }
    }
    LzParse {
        n: n as u64,
        phrases,
    }
}

/// Quadratic cross-check of `naive_lz`, for small inputs only.
pub fn naive_lz_quadratic(text: &[u8]) -> LzParse {
    let n = text.len();
    let mut phrases = Vec::new();
    let mut i = 0usize;
    while i < n {
        let mut best_len = 0usize;
        let mut best_src = 0usize;
        for q in 0..i {
            let mut m = 0usize;
            while i + m < n && text[q + m] == text[i + m] {
                m += 1;
            }
            if m > best_len {
                best_len = m;
                best_src = q;
            }
        }
        if best_len == 0 {
            phrases.push(Phrase::Literal(text[i]));
            i += 1;
        } else {
            phrases.push(Phrase::Copy {
                src: best_src as u64 + 1,
                len: best_len as u64,
            });
            i += best_len;
        }
    }
    LzParse {
        n: n as u64,
        phrases,
    }
}

/// Suffix array by prefix doubling; fine for the n <= 5000 oracle budget.
fn suffix_array(s: &[u8]) -> Vec<u32> {
    let n = s.len();
    let mut sa: Vec<u32> = (0..n as u32).collect();
    let mut rank: Vec<u32> = s.iter().map(|&b| b as u32).collect();
    let mut tmp = vec![0u32; n];
    let mut k = 1usize;
    while k < n {
        let key = |i: u32| -> (u32, u32) {
            let i = i as usize;
            let second = if i + k < n { rank[i + k] + 1 } else { 0 };
            (rank[i], second)
        };
        sa.sort_unstable_by_key(|&i| key(i));
        tmp[sa[0] as usize] = 0;
        for t in 1..n {
            let prev = sa[t - 1];
            let cur = sa[t];
            tmp[cur as usize] =
                tmp[prev as usize] + if key(prev) == key(cur) { 0 } else { 1 };
        }
        rank.copy_from_slice(&tmp);
        if rank[sa[n - 1] as usize] as usize == n - 1 {
            break;
        }
        k *= 2;
    }
    sa
}

/// LCP array (Kasai): lcp[t] = lcp of suffixes sa[t-1] and sa[t].
fn lcp_array(s: &[u8], sa: &[u32]) -> Vec<u32> {
    let n = s.len();
    let mut rank = vec![0u32; n];
    for (t, &i) in sa.iter().enumerate() {
        rank[i as usize] = t as u32;
    }
    let mut lcp = vec![0u32; n];
    let mut h = 0usize;
    for i in 0..n {
        let r = rank[i] as usize;
        if r > 0 {
            let j = sa[r - 1] as usize;
            while i + h < n && j + h < n && s[i + h] == s[j + h] {
                h += 1;
            }
            lcp[r] = h as u32;
            if h > 0 {
                h -= 1;
            }
        } else {
            h = 0;
        }
    }
    lcp
}

/// Substring-complexity measure: max over k of (distinct k-length
/// substrings) / k, as an exact rational. Guarded to n <= 5000.
pub fn naive_delta(text: &[u8]) -> Ratio<u64> {
    let n = text.len();
    assert!(n > 0, "delta of empty text");
    assert!(n <= 5000, "delta oracle is limited to n <= 5000");
    let sa = suffix_array(text);
    let lcp = lcp_array(text, &sa);
    // count[k] = number of SA-adjacent pairs with lcp >= k
    let mut ge = vec![0u64; n + 2];
    for &v in lcp.iter().skip(1) {
        ge[(v as usize).min(n)] += 1;
    }
    for k in (1..=n).rev() {
        ge[k - 1] += ge[k];
    }
    let mut best = Ratio::new(1u64, 1u64);
    for k in 1..=n {
        let with_len = (n - k + 1) as u64;
        let distinct = with_len - ge[k];
        let r = Ratio::new(distinct, k as u64);
        if r > best {
            best = r;
        }
    }
    best
}

/// A primary occurrence of a pattern inside a grammar's text: where it
/// starts and the 1-based offset of the pattern position aligned to the
/// child boundary of the lowest grammar-tree node covering it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct PrimaryOcc {
    pub start: Pos,
    /// Splitting offset s in [1, len-1]: the occurrence's bytes 1..=s fall
    /// in the covering rule's left part.
    pub split: u64,
}

/// Enumerates, by direct inspection of the materialized text and grammar
/// tree, every primary occurrence of text[i..=j] (1-based, inclusive).
/// Guarded to n <= 300.
pub fn naive_primary_occurrences(slp: &Slp, i: Pos, j: Pos) -> Vec<PrimaryOcc> {
    let meta = validate(slp).expect("grammar must be valid");
    let n = meta.text_len(slp);
    assert!(n <= 300, "primary-occurrence oracle is limited to n <= 300");
    assert!(1 <= i && i <= j && j <= n);
    let text = crate::slp::expand(slp);
    let tree = build_grammar_tree(slp, &meta);
    let pat = &text[(i - 1) as usize..j as usize];
    let len = pat.len() as u64;
    let mut out = Vec::new();
    for o in 1..=(n - len + 1) {
        if &text[(o - 1) as usize..(o - 1 + len) as usize] != pat {
            continue;
        }
        // descend to the lowest node covering [o, o+len-1]
        let mut node = tree.root;
        let split;
        loop {
            let nd = &tree.nodes[node as usize];
            match nd.children {
                None => {
                    split = None;
                    break;
                }
                Some([l, r]) => {
                    let mid = tree.nodes[r as usize].start; // first position of right part
                    if o + len - 1 < mid {
                        node = l;
                    } else if o >= mid {
                        node = r;
                    } else {
                        split = Some(mid - 1); // last position of left part
                        break;
                    }
                }
            }
        }
        if let Some(sp) = split {
            out.push(PrimaryOcc {
                start: o,
                split: sp - o + 1,
            });
        }
    }
    out
}
