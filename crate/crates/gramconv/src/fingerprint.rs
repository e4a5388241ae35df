//! Karp-Rabin fingerprints over the Mersenne prime 2^61 - 1.
//!
//! A string S[1..n] of byte codes hashes to sum(S[i] * x^i) mod p with the
//! power starting at 1, so the hash of a string is independent of where it
//! occurs. Two equal-length strings collide with probability at most n/p
//! over the random choice of x.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Modulus for all fingerprint arithmetic.
pub const FINGERPRINT_MODULUS: u64 = (1 << 61) - 1;

const P: u64 = FINGERPRINT_MODULUS;

#[inline]
fn mod_add(a: u64, b: u64) -> u64 {
    let s = a + b;
    if s >= P {
        s - P
    } else {
        s
    }
}

#[inline]
fn mod_sub(a: u64, b: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + P - b
    }
}

#[inline]
fn mod_mul(a: u64, b: u64) -> u64 {
    let prod = a as u128 * b as u128;
    let mut s = (prod & P as u128) as u64 + (prod >> 61) as u64;
    while s >= P {
        s -= P;
    }
    s
}

fn mod_pow(mut base: u64, mut exp: u64) -> u64 {
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mod_mul(acc, base);
        }
        base = mod_mul(base, base);
        exp >>= 1;
    }
    acc
}

/// Shared fingerprinting state: the random base x, its inverse, and
/// precomputed square tables so x^e and x^-e cost O(popcount(e)).
///
/// The tables are filled once in `new`; afterwards the context is read-only,
/// so shared references can be used freely across threads.
#[derive(Debug, Clone)]
pub struct FingerprintContext {
    seed: u64,
    x: u64,
    squares: [u64; 63],
    inv_squares: [u64; 63],
}

impl FingerprintContext {
    /// Draws x uniformly from [1, p-1] using a ChaCha stream seeded by `seed`.
    pub fn new(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xf1b0_ba11);
        let x = rng.gen_range(1..P);
        Self::with_base(seed, x)
    }

    /// Fixed-base constructor used by tests that trace hashes by hand.
    pub fn with_base(seed: u64, x: u64) -> Self {
        assert!(x >= 1 && x < P, "base out of range");
        let mut squares = [0u64; 63];
        let mut inv_squares = [0u64; 63];
        let inv_x = mod_pow(x, P - 2);
        squares[0] = x;
        inv_squares[0] = inv_x;
        for i in 1..63 {
            squares[i] = mod_mul(squares[i - 1], squares[i - 1]);
            inv_squares[i] = mod_mul(inv_squares[i - 1], inv_squares[i - 1]);
        }
        FingerprintContext {
            seed,
            x,
            squares,
            inv_squares,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn base(&self) -> u64 {
        self.x
    }

    /// x^e mod p. Exponents are text lengths, so e < 2^62.
    pub fn pow(&self, e: u64) -> u64 {
        debug_assert!(e < (1 << 62));
        let mut acc = 1u64;
        let mut e = e;
        let mut i = 0;
        while e > 0 {
            if e & 1 == 1 {
                acc = mod_mul(acc, self.squares[i]);
            }
            e >>= 1;
            i += 1;
        }
        acc
    }

    /// x^-e mod p.
    pub fn inv_pow(&self, e: u64) -> u64 {
        debug_assert!(e < (1 << 62));
        let mut acc = 1u64;
        let mut e = e;
        let mut i = 0;
        while e > 0 {
            if e & 1 == 1 {
                acc = mod_mul(acc, self.inv_squares[i]);
            }
            e >>= 1;
            i += 1;
        }
        acc
    }

    /// Fingerprint of the empty string.
    #[inline]
    pub fn empty(&self) -> u64 {
        0
    }

    /// Fingerprint of a single byte: code * x.
    #[inline]
    pub fn byte(&self, b: u8) -> u64 {
        mod_mul(b as u64, self.x)
    }

    /// Fingerprint of the concatenation AB given fp(A), |A| and fp(B).
    #[inline]
    pub fn append(&self, fp_a: u64, len_a: u64, fp_b: u64) -> u64 {
        mod_add(fp_a, mod_mul(self.pow(len_a), fp_b))
    }

    /// Same as `append` when x^|A| is already at hand.
    #[inline]
    pub fn append_with_pow(&self, fp_a: u64, pow_len_a: u64, fp_b: u64) -> u64 {
        mod_add(fp_a, mod_mul(pow_len_a, fp_b))
    }

    /// Recovers fp(B) from fp(AB), fp(A) and |A|.
    #[inline]
    pub fn cut_prefix(&self, fp_ab: u64, fp_a: u64, len_a: u64) -> u64 {
        mod_mul(mod_sub(fp_ab, fp_a), self.inv_pow(len_a))
    }

    /// Fingerprint of a plain byte slice; handy for oracles and tests.
    pub fn bytes(&self, s: &[u8]) -> u64 {
        let mut acc = 0u64;
        let mut xp = 1u64;
        for &b in s {
            xp = mod_mul(xp, self.x);
            acc = mod_add(acc, mod_mul(b as u64, xp));
        }
        acc
    }

    /// fp(Y^t) from fp(Y) and |Y|, via the geometric sum 1 + x^L + ... over
    /// t terms, computed in O(log t).
    pub fn repeat(&self, fp_y: u64, len_y: u64, t: u64) -> u64 {
        let q = self.pow(len_y);
        mod_mul(fp_y, geometric(q, t))
    }
}

/// 1 + q + q^2 + ... + q^(t-1) mod p.
fn geometric(q: u64, t: u64) -> u64 {
    if t == 0 {
        return 0;
    }
    if t & 1 == 1 {
        // q^0 + q * (sum over t-1 terms)
        mod_add(1, mod_mul(q, geometric(q, t - 1)))
    } else {
        let half = geometric(q, t / 2);
        let qh = mod_pow(q, t / 2);
        mod_add(half, mod_mul(qh, half))
    }
}
