//! Generic text queries over any representation that can serve bytes and
//! substring fingerprints: longest common extensions and (co)lexicographic
//! comparisons, answered with fingerprint doubling searches plus a single
//! byte probe at the mismatch.

use crate::fingerprint::FingerprintContext;
use std::cmp::Ordering;

/// Byte and fingerprint access to a text, 1-based.
pub trait TextIndex {
    fn text_len(&self) -> u64;
    /// Byte T[i], 1 <= i <= n.
    fn byte_at(&self, i: u64) -> u8;
    /// Fingerprint of T[i..=j]; i > j yields the empty fingerprint.
    fn range_fp(&self, i: u64, j: u64) -> u64;
    fn fp_ctx(&self) -> &FingerprintContext;
}

/// Reading direction for a span. `Rev` addresses the span's bytes from its
/// right end, so lexicographic machinery over `Rev` spans realizes
/// co-lexicographic behavior. Fingerprints of `Rev` prefixes are forward
/// fingerprints of the mirrored suffix, a consistent signature because two
/// reversed prefixes are equal exactly when the suffixes are.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dir {
    Fwd,
    Rev,
}

/// A substring of the text: 1-based start and length (len 0 allowed).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub start: u64,
    pub len: u64,
}

impl Span {
    pub fn new(start: u64, len: u64) -> Self {
        Span { start, len }
    }

    /// Span covering T[i..=j]; i > j gives an empty span.
    pub fn range(i: u64, j: u64) -> Self {
        Span {
            start: i,
            len: (j + 1).saturating_sub(i),
        }
    }

    /// Suffix starting at i of a text of length n.
    pub fn suffix(i: u64, n: u64) -> Self {
        Span {
            start: i,
            len: n - i + 1,
        }
    }
}

/// Fingerprint of the first k oriented bytes of the span.
pub fn span_prefix_fp<T: TextIndex + ?Sized>(t: &T, s: Span, dir: Dir, k: u64) -> u64 {
    debug_assert!(k <= s.len);
    match dir {
        Dir::Fwd => t.range_fp(s.start, s.start + k - 1),
        Dir::Rev => t.range_fp(s.start + s.len - k, s.start + s.len - 1),
    }
}

/// k-th oriented byte of the span, 1-based.
pub fn span_byte<T: TextIndex + ?Sized>(t: &T, s: Span, dir: Dir, k: u64) -> u8 {
    debug_assert!(1 <= k && k <= s.len);
    match dir {
        Dir::Fwd => t.byte_at(s.start + k - 1),
        Dir::Rev => t.byte_at(s.start + s.len - k),
    }
}

/// Longest common prefix of two oriented spans, by exponential then binary
/// search on prefix-fingerprint equality. Correct whp.
pub fn oriented_lce<T: TextIndex + ?Sized>(t: &T, a: Span, b: Span, dir: Dir) -> u64 {
    let max = a.len.min(b.len);
    if max == 0 {
        return 0;
    }
    let eq = |k: u64| span_prefix_fp(t, a, dir, k) == span_prefix_fp(t, b, dir, k);
    if eq(max) {
        return max;
    }
    // invariant: prefixes of length lo match, of length hi do not
    let mut lo = 0u64;
    let mut hi = max;
    let mut step = 1u64;
    while lo + step < hi && eq(lo + step) {
        lo += step;
        step <<= 1;
    }
    if lo + step < hi {
        hi = lo + step;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if eq(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Order of two oriented spans (lexicographic over the oriented bytes, so
/// `Rev` compares co-lexicographically). Equal-content spans compare Equal
/// regardless of position. Correct whp.
pub fn oriented_compare<T: TextIndex + ?Sized>(t: &T, a: Span, b: Span, dir: Dir) -> Ordering {
    let m = oriented_lce(t, a, b, dir);
    if m == a.len && m == b.len {
        Ordering::Equal
    } else if m == a.len {
        Ordering::Less
    } else if m == b.len {
        Ordering::Greater
    } else {
        span_byte(t, a, dir, m + 1).cmp(&span_byte(t, b, dir, m + 1))
    }
}

/// Like `oriented_compare(member, pat)`, but Equal means the pattern is an
/// oriented prefix of the member.
pub fn prefix_compare<T: TextIndex + ?Sized>(
    t: &T,
    member: Span,
    pat: Span,
    dir: Dir,
) -> Ordering {
    let m = oriented_lce(t, member, pat, dir);
    if m == pat.len {
        Ordering::Equal
    } else if m == member.len {
        Ordering::Less
    } else {
        span_byte(t, member, dir, m + 1).cmp(&span_byte(t, pat, dir, m + 1))
    }
}

/// Plain in-memory text with O(1) substring fingerprints; the reference
/// `TextIndex` used by tests and small tools.
pub struct PlainText {
    bytes: Vec<u8>,
    prefix_fps: Vec<u64>,
    ctx: FingerprintContext,
}

impl PlainText {
    pub fn new(bytes: Vec<u8>, ctx: FingerprintContext) -> Self {
        let mut prefix_fps = Vec::with_capacity(bytes.len() + 1);
        prefix_fps.push(ctx.empty());
        let mut acc = ctx.empty();
        for (i, &b) in bytes.iter().enumerate() {
            acc = ctx.append(acc, i as u64, ctx.byte(b));
            prefix_fps.push(acc);
        }
        PlainText {
            bytes,
            prefix_fps,
            ctx,
        }
    }

    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }
}

impl TextIndex for PlainText {
    fn text_len(&self) -> u64 {
        self.bytes.len() as u64
    }

    fn byte_at(&self, i: u64) -> u8 {
        self.bytes[i as usize - 1]
    }

    fn range_fp(&self, i: u64, j: u64) -> u64 {
        if i > j {
            return self.ctx.empty();
        }
        self.ctx
            .cut_prefix(self.prefix_fps[j as usize], self.prefix_fps[i as usize - 1], i - 1)
    }

    fn fp_ctx(&self) -> &FingerprintContext {
        &self.ctx
    }
}
