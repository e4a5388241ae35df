//! Generators for test inputs: structured words, synthetic texts with planted
//! structure, and random grammars.

use rand::Rng;

use crate::slp::{validate, Slp, Sym};

/// Grammar for the Fibonacci word of the given order: order 1 expands to
/// "b", order 2 to "a", and every later order to the concatenation of the
/// two previous words. Lengths follow the Fibonacci numbers.
pub fn fibonacci_slp(order: u32) -> Slp {
    assert!(order >= 1);
    let terminal_bytes = vec![b'a', b'b'];
    if order == 1 {
        return Slp { terminal_bytes, rules: vec![], root: 1 };
    }
    if order == 2 {
        return Slp { terminal_bytes, rules: vec![], root: 0 };
    }
    let sym_of = |m: u32| -> Sym {
        match m {
            1 => 1,
            2 => 0,
            m => m as Sym - 1,
        }
    };
    let mut rules: Vec<(Sym, Sym)> = vec![(0, 1)];
    for m in 4..=order {
        rules.push((sym_of(m - 1), sym_of(m - 2)));
    }
    let root = rules.len() as Sym + 1;
    Slp { terminal_bytes, rules, root }
}

/// First `n` characters of the Thue-Morse word over {a, b}.
pub fn thue_morse(n: usize) -> Vec<u8> {
    (0..n).map(|i| b'a' + (i.count_ones() & 1) as u8).collect()
}

/// Uniform random text over the first `sigma` lowercase letters.
pub fn random_text(rng: &mut impl Rng, sigma: u8, n: usize) -> Vec<u8> {
    assert!((1..=26).contains(&sigma));
    (0..n).map(|_| b'a' + rng.gen_range(0..sigma)).collect()
}

/// Text grown by repeatedly copying an existing chunk to the end, flipping
/// each copied byte to a random base with probability 1/`mutation_inv`.
/// Mimics the repetitive structure of resequenced genomes.
pub fn copy_mutate_text(rng: &mut impl Rng, n: usize, mutation_inv: u32) -> Vec<u8> {
    const BASES: [u8; 4] = *b"ACGT";
    assert!(n >= 1 && mutation_inv >= 1);
    let seed_len = n.min(1000);
    let mut t: Vec<u8> = (0..seed_len).map(|_| BASES[rng.gen_range(0..4)]).collect();
    while t.len() < n {
        let chunk = rng.gen_range(50..=5000).min(t.len()).min(n - t.len());
        let start = rng.gen_range(0..=t.len() - chunk);
        for off in 0..chunk {
            let mut b = t[start + off];
            if rng.gen_ratio(1, mutation_inv) {
                b = BASES[rng.gen_range(0..4)];
            }
            t.push(b);
        }
    }
    t
}

/// Random text with two identical planted copies of one segment.
/// Offsets are 0-based; the copies never overlap.
pub struct PlantedRepeat {
    pub text: Vec<u8>,
    pub first: usize,
    pub second: usize,
    pub len: usize,
}

pub fn planted_repeat_text(
    rng: &mut impl Rng,
    sigma: u8,
    n: usize,
    repeat_len: usize,
) -> PlantedRepeat {
    assert!(repeat_len >= 1 && n >= 2 * repeat_len + 2);
    let mut text = random_text(rng, sigma, n);
    let repeat = random_text(rng, sigma, repeat_len);
    let first = rng.gen_range(0..=n - 2 * repeat_len - 1);
    let second = rng.gen_range(first + repeat_len + 1..=n - repeat_len);
    text[first..first + repeat_len].copy_from_slice(&repeat);
    text[second..second + repeat_len].copy_from_slice(&repeat);
    PlantedRepeat { text, first, second, len: repeat_len }
}

/// Random valid grammar whose expansion is at most `max_len` characters.
/// Draws rules over random earlier symbols, drops the ones the root never
/// reaches, and rerolls until the length cap holds.
pub fn random_slp(rng: &mut impl Rng, max_sigma: u8, max_rules: usize, max_len: u64) -> Slp {
    assert!(max_sigma >= 1 && max_rules >= 1);
    loop {
        let sigma = rng.gen_range(1..=max_sigma as usize);
        let bytes: Vec<u8> = (0..sigma as u8).map(|i| b'a' + i).collect();
        let g_rules = rng.gen_range(1..=max_rules);
        let mut rules = Vec::new();
        for i in 0..g_rules {
            let max = sigma + i;
            rules.push((rng.gen_range(0..max) as Sym, rng.gen_range(0..max) as Sym));
        }
        let root = sigma + g_rules - 1;
        let mut reach = vec![false; sigma + g_rules];
        let mut stack = vec![root];
        while let Some(s) = stack.pop() {
            if s >= sigma && !reach[s] {
                reach[s] = true;
                let (l, r) = rules[s - sigma];
                stack.push(l as usize);
                stack.push(r as usize);
            }
        }
        let mut remap = vec![0 as Sym; sigma + g_rules];
        for s in 0..sigma {
            remap[s] = s as Sym;
        }
        let mut kept = Vec::new();
        for i in 0..g_rules {
            if reach[sigma + i] {
                remap[sigma + i] = (sigma + kept.len()) as Sym;
                let (l, r) = rules[i];
                kept.push((remap[l as usize], remap[r as usize]));
            }
        }
        let slp = Slp {
            terminal_bytes: bytes,
            root: (sigma + kept.len() - 1) as Sym,
            rules: kept,
        };
        let Ok(meta) = validate(&slp) else { continue };
        if meta.text_len(&slp) <= max_len {
            return slp;
        }
    }
}
