//! Run-length grammar built by locally consistent parsing: odd levels
//! collapse runs of equal light symbols, even levels cut the sequence into
//! blocks after random-permutation local minima and around heavy symbols,
//! cascading until one symbol spans the whole text.

use std::collections::{HashMap, VecDeque};

use num_bigint::BigUint;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::lz::attempt_seed;
use crate::slp::{Pos, Sym, MAX_TEXT_LEN};

/// One grammar rule: a repeated symbol or a block of at least two symbols.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum LcgRule {
    Run(Sym, u64),
    Block(Vec<Sym>),
}

/// Run-length grammar with per-symbol construction levels. Terminals get
/// ids 0..sigma-1 at level 0; rules follow in creation order, so every rule
/// references only earlier ids. Run rules live on odd levels, block rules
/// on even ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rlcfg {
    pub terminal_bytes: Vec<u8>,
    pub rules: Vec<LcgRule>,
    pub level: Vec<u32>,
    pub root: Sym,
}

impl Rlcfg {
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
    pub fn rule(&self, s: Sym) -> &LcgRule {
        &self.rules[s as usize - self.terminal_bytes.len()]
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LcgError {
    #[error("grammar has no terminals")]
    EmptyAlphabet,
    #[error("terminal byte {byte:#04x} appears twice in the alphabet")]
    DuplicateTerminal { byte: u8 },
    #[error("input text is empty")]
    EmptyText,
    #[error("byte {byte:#04x} at position {pos} is not in the alphabet")]
    UnknownByte { pos: u64, byte: u8 },
    #[error("rule {rule} references symbol {operand} that is not defined yet")]
    ForwardReference { rule: usize, operand: Sym },
    #[error("rule {rule} repeats its symbol fewer than 2 times")]
    ShortRun { rule: usize },
    #[error("rule {rule} is a block of fewer than 2 symbols")]
    ShortBlock { rule: usize },
    #[error("symbol {symbol} has a level inconsistent with its rule kind or children")]
    InconsistentLevel { symbol: Sym },
    #[error("level list has {got} entries for {want} symbols")]
    BadLevelCount { got: usize, want: usize },
    #[error("root {root} out of range for {symbols} symbols")]
    RootOutOfRange { root: Sym, symbols: usize },
    #[error("rule {rule} is not reachable from the root")]
    UnreachableRule { rule: usize },
    #[error("rule {rule} expands beyond the maximum text length")]
    LengthOverflow { rule: usize },
    #[error("construction used {levels} levels, over the cap {cap} for length {n}")]
    LevelCapExceeded { levels: u32, cap: u32, n: u64 },
    #[error("rule count passed the abort threshold at {rules} rules")]
    BudgetHit { rules: u64 },
    #[error("grammar kept exceeding {budget} rules after {restarts} restarts (last try: {last})")]
    BudgetExhausted { budget: u64, restarts: u32, last: u64 },
}

/// Expansion lengths and the highest level, computed by [`validate_lcg`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LcgMeta {
    pub exp_len: Vec<u64>,
    pub max_level: u32,
}

impl LcgMeta {
    pub fn text_len(&self, g: &Rlcfg) -> u64 {
        self.exp_len[g.root as usize]
    }
}

/// Checks structure (topological ids, run/block arity, level parities,
/// reachability, length caps) and computes expansion lengths.
pub fn validate_lcg(g: &Rlcfg) -> Result<LcgMeta, LcgError> {
    let sigma = g.sigma();
    if sigma == 0 {
        return Err(LcgError::EmptyAlphabet);
    }
    let symbols = g.num_symbols();
    if g.level.len() != symbols {
        return Err(LcgError::BadLevelCount {
            got: g.level.len(),
            want: symbols,
        });
    }
    if (g.root as usize) >= symbols {
        return Err(LcgError::RootOutOfRange {
            root: g.root,
            symbols,
        });
    }
    let mut seen = [false; 256];
    for &b in &g.terminal_bytes {
        if seen[b as usize] {
            return Err(LcgError::DuplicateTerminal { byte: b });
        }
        seen[b as usize] = true;
    }
    for s in 0..sigma {
        if g.level[s] != 0 {
            return Err(LcgError::InconsistentLevel { symbol: s as Sym });
        }
    }
    let mut exp_len = vec![0u64; symbols];
    exp_len[..sigma].fill(1);
    for (r, rule) in g.rules.iter().enumerate() {
        let id = sigma + r;
        let lvl = g.level[id];
        let child_check = |op: Sym| -> Result<(), LcgError> {
            if op as usize >= id {
                return Err(LcgError::ForwardReference { rule: r, operand: op });
            }
            if g.level[op as usize] >= lvl {
                return Err(LcgError::InconsistentLevel { symbol: id as Sym });
            }
            Ok(())
        };
        let len = match rule {
            LcgRule::Run(y, t) => {
                if *t < 2 {
                    return Err(LcgError::ShortRun { rule: r });
                }
                if lvl % 2 == 0 {
                    return Err(LcgError::InconsistentLevel { symbol: id as Sym });
                }
                child_check(*y)?;
                exp_len[*y as usize].checked_mul(*t)
            }
            LcgRule::Block(seq) => {
                if seq.len() < 2 {
                    return Err(LcgError::ShortBlock { rule: r });
                }
                if lvl % 2 == 1 || lvl == 0 {
                    return Err(LcgError::InconsistentLevel { symbol: id as Sym });
                }
                let mut acc: Option<u64> = Some(0);
                for &op in seq {
                    child_check(op)?;
                    acc = acc.and_then(|a| a.checked_add(exp_len[op as usize]));
                }
                acc
            }
        };
        match len {
            Some(l) if l <= MAX_TEXT_LEN => exp_len[id] = l,
            _ => return Err(LcgError::LengthOverflow { rule: r }),
        }
    }
    let mut reached = vec![false; symbols];
    let mut stack = vec![g.root];
    while let Some(s) = stack.pop() {
        if reached[s as usize] || g.is_terminal(s) {
            continue;
        }
        reached[s as usize] = true;
        match g.rule(s) {
            LcgRule::Run(y, _) => stack.push(*y),
            LcgRule::Block(seq) => stack.extend(seq.iter().copied()),
        }
    }
    for r in 0..g.rules.len() {
        if !reached[sigma + r] {
            return Err(LcgError::UnreachableRule { rule: r });
        }
    }
    Ok(LcgMeta {
        exp_len,
        max_level: g.level.iter().copied().max().unwrap_or(0),
    })
}

/// Materializes the expansion of one symbol.
pub fn expand_lcg_symbol(g: &Rlcfg, sym: Sym) -> Vec<u8> {
    let mut out = Vec::new();
    let mut stack: Vec<(Sym, u64)> = vec![(sym, 1)];
    while let Some((s, times)) = stack.pop() {
        if times > 1 {
            stack.push((s, times - 1));
        }
        if g.is_terminal(s) {
            out.push(g.terminal_bytes[s as usize]);
            continue;
        }
        match g.rule(s) {
            LcgRule::Run(y, t) => stack.push((*y, *t)),
            LcgRule::Block(seq) => stack.extend(seq.iter().rev().map(|&c| (c, 1))),
        }
    }
    out
}

/// Materializes the whole text.
pub fn expand_lcg(g: &Rlcfg) -> Vec<u8> {
    expand_lcg_symbol(g, g.root)
}

/// Level k keeps a symbol out of runs and blocks when its expansion exceeds
/// (4/3)^(ceil(k/2)-1); this returns that threshold exactly.
pub fn level_threshold(k: u32) -> Ratio<BigUint> {
    assert!(k >= 1);
    let a = (k + 1) / 2 - 1;
    Ratio::new(BigUint::from(4u8).pow(a), BigUint::from(3u8).pow(a))
}

/// Largest integer length that still counts as light at level k; lengths
/// compare exactly against the rational threshold because floor((4/3)^a)
/// bounds the same integers.
fn light_cap(k: u32) -> u64 {
    let a = (k + 1) / 2 - 1;
    let q = BigUint::from(4u8).pow(a) / BigUint::from(3u8).pow(a);
    let digits = q.to_u64_digits();
    match digits.len() {
        1 => digits[0],
        0 => 0,
        _ => u64::MAX,
    }
}

/// Hard ceiling on levels for a given text length; exceeding it means a bug,
/// not bad luck.
pub fn level_cap(n: u64) -> u32 {
    (8.0 * (n.max(2) as f64).log2()).ceil() as u32 + 16
}

const ABSOLUTE_LEVEL_CAP: u32 = 512;

/// How many fresh-seed restarts the budgeted builder tries.
pub const LCG_RESTART_CAP: u32 = 16;

/// Per-construction instrumentation: sequence sizes per level, optionally
/// the sequences themselves, and the even-level counters used by the
/// consistency tests.
#[derive(Debug, Clone)]
pub struct BuildTrace {
    pub input_len: u64,
    /// emitted[k] = |S_k|; index 0 holds the input length
    pub emitted_per_level: Vec<u64>,
    /// sequences[k] = S_k when capture was requested (S_0 = terminal ids)
    pub sequences: Option<Vec<Vec<Sym>>>,
    /// per even level: light symbols that passed through as 1-symbol blocks
    pub lone_light_survivors: Vec<u64>,
    /// per even level: heavy occurrences in that level's input
    pub heavy_occurrences: Vec<u64>,
}

impl BuildTrace {
    fn new(capture: bool) -> Self {
        BuildTrace {
            input_len: 0,
            emitted_per_level: vec![0],
            sequences: if capture { Some(vec![Vec::new()]) } else { None },
            lone_light_survivors: Vec::new(),
            heavy_occurrences: Vec::new(),
        }
    }

    fn record(&mut self, level: u32, sym: Sym) {
        let k = level as usize;
        if self.emitted_per_level.len() <= k {
            self.emitted_per_level.resize(k + 1, 0);
        }
        self.emitted_per_level[k] += 1;
        if let Some(seqs) = &mut self.sequences {
            if seqs.len() <= k {
                seqs.resize(k + 1, Vec::new());
            }
            seqs[k].push(sym);
        }
    }

    fn bump(counter: &mut Vec<u64>, level: u32) {
        let k = level as usize;
        if counter.len() <= k {
            counter.resize(k + 1, 0);
        }
        counter[k] += 1;
    }
}

struct RuleStore {
    sigma: usize,
    rules: Vec<LcgRule>,
    level_of: Vec<u32>,
    exp_len: Vec<u64>,
    dedup: HashMap<(u32, LcgRule), Sym>,
    caps: Vec<u64>,
    max_rules: Option<u64>,
}

impl RuleStore {
    fn new(alphabet: &[u8], max_rules: Option<u64>) -> RuleStore {
        let sigma = alphabet.len();
        RuleStore {
            sigma,
            rules: Vec::new(),
            level_of: vec![0; sigma],
            exp_len: vec![1; sigma],
            dedup: HashMap::new(),
            caps: vec![0],
            max_rules,
        }
    }

    fn cap(&mut self, k: u32) -> u64 {
        while self.caps.len() <= k as usize {
            self.caps.push(light_cap(self.caps.len() as u32));
        }
        self.caps[k as usize]
    }

    fn is_light(&mut self, k: u32, sym: Sym) -> bool {
        self.exp_len[sym as usize] <= self.cap(k)
    }

    fn intern(&mut self, level: u32, rule: LcgRule) -> Result<Sym, LcgError> {
        if let Some(&s) = self.dedup.get(&(level, rule.clone())) {
            return Ok(s);
        }
        let len = match &rule {
            LcgRule::Run(y, t) => self.exp_len[*y as usize] * t,
            LcgRule::Block(seq) => seq.iter().map(|&c| self.exp_len[c as usize]).sum(),
        };
        let id = (self.sigma + self.rules.len()) as Sym;
        self.rules.push(rule.clone());
        self.level_of.push(level);
        self.exp_len.push(len);
        self.dedup.insert((level, rule), id);
        if let Some(max) = self.max_rules {
            if self.rules.len() as u64 > max {
                return Err(LcgError::BudgetHit {
                    rules: self.rules.len() as u64,
                });
            }
        }
        Ok(id)
    }
}

const NIL: u32 = u32::MAX;

struct TreapNode {
    left: u32,
    right: u32,
    parent: u32,
    size: u32,
    prio: u64,
}

/// Order-statistic tree: nodes are addressed by stable handles, positions
/// shift as later insertions land at random ranks.
#[derive(Default)]
struct RankTreap {
    nodes: Vec<TreapNode>,
}

impl RankTreap {
    fn size(&self, v: u32) -> u32 {
        if v == NIL {
            0
        } else {
            self.nodes[v as usize].size
        }
    }

    fn relink(&mut self, v: u32) {
        let (l, r) = (self.nodes[v as usize].left, self.nodes[v as usize].right);
        if l != NIL {
            self.nodes[l as usize].parent = v;
        }
        if r != NIL {
            self.nodes[r as usize].parent = v;
        }
        self.nodes[v as usize].size = 1 + self.size(l) + self.size(r);
    }

    fn merge(&mut self, a: u32, b: u32) -> u32 {
        if a == NIL {
            return b;
        }
        if b == NIL {
            return a;
        }
        if self.nodes[a as usize].prio >= self.nodes[b as usize].prio {
            let m = self.merge(self.nodes[a as usize].right, b);
            self.nodes[a as usize].right = m;
            self.relink(a);
            a
        } else {
            let m = self.merge(a, self.nodes[b as usize].left);
            self.nodes[b as usize].left = m;
            self.relink(b);
            b
        }
    }

    fn split(&mut self, t: u32, count: u32) -> (u32, u32) {
        if t == NIL {
            return (NIL, NIL);
        }
        let left_size = self.size(self.nodes[t as usize].left);
        if count <= left_size {
            let (a, b) = self.split(self.nodes[t as usize].left, count);
            self.nodes[t as usize].left = b;
            self.relink(t);
            if a != NIL {
                self.nodes[a as usize].parent = NIL;
            }
            (a, t)
        } else {
            let (a, b) = self.split(self.nodes[t as usize].right, count - left_size - 1);
            self.nodes[t as usize].right = a;
            self.relink(t);
            if b != NIL {
                self.nodes[b as usize].parent = NIL;
            }
            (t, b)
        }
    }

    fn insert_at(&mut self, root: u32, rank: u32, prio: u64) -> (u32, u32) {
        let v = self.nodes.len() as u32;
        self.nodes.push(TreapNode {
            left: NIL,
            right: NIL,
            parent: NIL,
            size: 1,
            prio,
        });
        let (a, b) = self.split(root, rank - 1);
        let left = self.merge(a, v);
        let new_root = self.merge(left, b);
        self.nodes[new_root as usize].parent = NIL;
        (new_root, v)
    }

    fn rank_of(&self, v: u32) -> u64 {
        let mut rank = self.size(self.nodes[v as usize].left) as u64 + 1;
        let mut cur = v;
        loop {
            let p = self.nodes[cur as usize].parent;
            if p == NIL {
                return rank;
            }
            if self.nodes[p as usize].right == cur {
                rank += self.size(self.nodes[p as usize].left) as u64 + 1;
            }
            cur = p;
        }
    }
}

/// Evolving random permutation over the symbols one even level has seen:
/// a hash map finds a symbol's node, the treap turns nodes into current
/// inorder positions. New symbols enter at a uniformly random rank.
struct PermutationOracle {
    t_id: HashMap<Sym, u32>,
    t_pos: RankTreap,
    root: u32,
    rng: ChaCha8Rng,
}

impl PermutationOracle {
    fn new(seed: u64, level: u32) -> PermutationOracle {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(level as u64);
        PermutationOracle {
            t_id: HashMap::new(),
            t_pos: RankTreap::default(),
            root: NIL,
            rng,
        }
    }

    fn observe(&mut self, sym: Sym) {
        if self.t_id.contains_key(&sym) {
            return;
        }
        let size = self.t_pos.nodes.len() as u32;
        let rank = self.rng.gen_range(1..=size + 1);
        let prio = self.rng.gen();
        let (root, handle) = self.t_pos.insert_at(self.root, rank, prio);
        self.root = root;
        self.t_id.insert(sym, handle);
    }

    fn rank(&self, sym: Sym) -> u64 {
        self.t_pos.rank_of(self.t_id[&sym])
    }
}

enum ProcKind {
    Run {
        pending: Option<(Sym, u64)>,
    },
    Block {
        before: Option<Sym>,
        cur: Option<Sym>,
        block: Vec<Sym>,
        oracle: PermutationOracle,
    },
}

/// One level of the cascade. Holds its first emission back so a level whose
/// whole output is a single symbol can crown it root instead of spawning
/// the next level.
struct Proc {
    level: u32,
    emitted: u64,
    held: Option<Sym>,
    kind: ProcKind,
}

impl Proc {
    fn new(level: u32, seed: u64) -> Proc {
        let kind = if level % 2 == 1 {
            ProcKind::Run { pending: None }
        } else {
            ProcKind::Block {
                before: None,
                cur: None,
                block: Vec::new(),
                oracle: PermutationOracle::new(seed, level),
            }
        };
        Proc {
            level,
            emitted: 0,
            held: None,
            kind,
        }
    }
}

fn close_run(store: &mut RuleStore, level: u32, y: Sym, count: u64) -> Result<Sym, LcgError> {
    if count == 1 {
        Ok(y)
    } else {
        store.intern(level, LcgRule::Run(y, count))
    }
}

fn close_block(
    store: &mut RuleStore,
    trace: &mut BuildTrace,
    level: u32,
    block: &mut Vec<Sym>,
) -> Result<Sym, LcgError> {
    debug_assert!(!block.is_empty());
    if block.len() == 1 {
        let s = block[0];
        block.clear();
        if store.is_light(level, s) {
            BuildTrace::bump(&mut trace.lone_light_survivors, level);
        }
        return Ok(s);
    }
    store.intern(level, LcgRule::Block(std::mem::take(block)))
}

fn step(
    proc: &mut Proc,
    store: &mut RuleStore,
    trace: &mut BuildTrace,
    s: Sym,
) -> Result<Vec<Sym>, LcgError> {
    let k = proc.level;
    let mut out = Vec::new();
    match &mut proc.kind {
        ProcKind::Run { pending } => {
            let light = store.is_light(k, s);
            match pending.take() {
                Some((y, c)) if y == s => *pending = Some((y, c + 1)),
                prev => {
                    if let Some((y, c)) = prev {
                        out.push(close_run(store, k, y, c)?);
                    }
                    if light {
                        *pending = Some((s, 1));
                    } else {
                        out.push(s);
                    }
                }
            }
        }
        ProcKind::Block {
            before,
            cur,
            block,
            oracle,
        } => {
            let s_light = store.is_light(k, s);
            if s_light {
                oracle.observe(s);
            } else {
                BuildTrace::bump(&mut trace.heavy_occurrences, k);
            }
            if let Some(y) = *cur {
                let y_light = store.is_light(k, y);
                let minimum = y_light
                    && s_light
                    && matches!(*before, Some(x) if store.is_light(k, x)
                        && oracle.rank(x) > oracle.rank(y)
                        && oracle.rank(y) < oracle.rank(s));
                block.push(y);
                if !y_light || !s_light || minimum {
                    out.push(close_block(store, trace, k, block)?);
                }
                *before = Some(y);
            }
            *cur = Some(s);
        }
    }
    Ok(out)
}

fn flush(proc: &mut Proc, store: &mut RuleStore, trace: &mut BuildTrace) -> Result<Vec<Sym>, LcgError> {
    let k = proc.level;
    let mut out = Vec::new();
    match &mut proc.kind {
        ProcKind::Run { pending } => {
            if let Some((y, c)) = pending.take() {
                out.push(close_run(store, k, y, c)?);
            }
        }
        ProcKind::Block { cur, block, .. } => {
            if let Some(y) = cur.take() {
                block.push(y);
            }
            if !block.is_empty() {
                out.push(close_block(store, trace, k, block)?);
            }
        }
    }
    Ok(out)
}

fn forward(
    proc: &mut Proc,
    trace: &mut BuildTrace,
    queue: &mut VecDeque<(usize, Sym)>,
    idx: usize,
    out: Vec<Sym>,
) {
    for e in out {
        trace.record(proc.level, e);
        proc.emitted += 1;
        match proc.emitted {
            1 => proc.held = Some(e),
            2 => {
                let h = proc.held.take().expect("held emission missing");
                queue.push_back((idx + 1, h));
                queue.push_back((idx + 1, e));
            }
            _ => queue.push_back((idx + 1, e)),
        }
    }
}

fn drain(
    queue: &mut VecDeque<(usize, Sym)>,
    procs: &mut Vec<Proc>,
    store: &mut RuleStore,
    trace: &mut BuildTrace,
    seed: u64,
) -> Result<(), LcgError> {
    while let Some((idx, s)) = queue.pop_front() {
        if idx == procs.len() {
            let level = idx as u32 + 1;
            if level > ABSOLUTE_LEVEL_CAP {
                return Err(LcgError::LevelCapExceeded {
                    levels: level,
                    cap: ABSOLUTE_LEVEL_CAP,
                    n: trace.input_len,
                });
            }
            procs.push(Proc::new(level, seed));
        }
        let out = step(&mut procs[idx], store, trace, s)?;
        forward(&mut procs[idx], trace, queue, idx, out);
    }
    Ok(())
}

fn build_inner(
    bytes: impl IntoIterator<Item = u8>,
    alphabet: &[u8],
    seed: u64,
    max_rules: Option<u64>,
    capture: bool,
) -> Result<(Rlcfg, BuildTrace), LcgError> {
    if alphabet.is_empty() {
        return Err(LcgError::EmptyAlphabet);
    }
    let mut byte_id = [NIL; 256];
    for (i, &b) in alphabet.iter().enumerate() {
        if byte_id[b as usize] != NIL {
            return Err(LcgError::DuplicateTerminal { byte: b });
        }
        byte_id[b as usize] = i as u32;
    }
    let mut store = RuleStore::new(alphabet, max_rules);
    let mut procs: Vec<Proc> = Vec::new();
    let mut trace = BuildTrace::new(capture);
    let mut queue = VecDeque::new();
    let mut n: u64 = 0;
    for b in bytes {
        n += 1;
        let id = byte_id[b as usize];
        if id == NIL {
            return Err(LcgError::UnknownByte { pos: n, byte: b });
        }
        trace.input_len = n;
        trace.emitted_per_level[0] = n;
        if let Some(seqs) = &mut trace.sequences {
            seqs[0].push(id);
        }
        queue.push_back((0, id));
        drain(&mut queue, &mut procs, &mut store, &mut trace, seed)?;
    }
    if n == 0 {
        return Err(LcgError::EmptyText);
    }
    let root = flush_cascade(&mut procs, &mut store, &mut trace, &mut queue, seed)?;
    let levels = procs.len() as u32;
    let cap = level_cap(n);
    if levels > cap {
        return Err(LcgError::LevelCapExceeded { levels, cap, n });
    }
    Ok((
        Rlcfg {
            terminal_bytes: alphabet.to_vec(),
            rules: store.rules,
            level: store.level_of,
            root,
        },
        trace,
    ))
}

fn flush_cascade(
    procs: &mut Vec<Proc>,
    store: &mut RuleStore,
    trace: &mut BuildTrace,
    queue: &mut VecDeque<(usize, Sym)>,
    seed: u64,
) -> Result<Sym, LcgError> {
    let mut idx = 0;
    loop {
        assert!(idx < procs.len(), "cascade ended without a root");
        let out = flush(&mut procs[idx], store, trace)?;
        forward(&mut procs[idx], trace, queue, idx, out);
        drain(queue, procs, store, trace, seed)?;
        if procs[idx].emitted == 1 {
            return Ok(procs[idx].held.take().expect("single emission not held"));
        }
        idx += 1;
    }
}

/// Builds the grammar for the byte stream over the given alphabet. One seed
/// determines every random choice, so equal inputs give equal grammars.
pub fn build_lcg(
    bytes: impl IntoIterator<Item = u8>,
    alphabet: &[u8],
    seed: u64,
) -> Result<Rlcfg, LcgError> {
    build_inner(bytes, alphabet, seed, None, false).map(|(g, _)| g)
}

/// Same as [`build_lcg`] but also returns instrumentation; `capture` keeps
/// the full per-level sequences, which costs memory proportional to the
/// text.
pub fn build_lcg_traced(
    bytes: impl IntoIterator<Item = u8>,
    alphabet: &[u8],
    seed: u64,
    capture: bool,
) -> Result<(Rlcfg, BuildTrace), LcgError> {
    build_inner(bytes, alphabet, seed, None, capture)
}

/// Restarting builder: abandons any attempt whose rule count passes
/// budget_c * delta * log2(max(n/delta, 2)) and retries with a fresh seed.
/// Returns the grammar and how many restarts it took.
pub fn build_lcg_with_budget<I>(
    mut source: impl FnMut() -> I,
    alphabet: &[u8],
    n: u64,
    delta: Ratio<u64>,
    budget_c: u64,
    seed: u64,
) -> Result<(Rlcfg, u32), LcgError>
where
    I: IntoIterator<Item = u8>,
{
    assert!(*delta.numer() > 0, "delta must be positive");
    let d = *delta.numer() as f64 / *delta.denom() as f64;
    let budget = (budget_c as f64 * d * (n as f64 / d).max(2.0).log2()).floor() as u64;
    let mut last = 0;
    for restart in 0..=LCG_RESTART_CAP {
        match build_inner(source(), alphabet, attempt_seed(seed, restart), Some(budget), false) {
            Ok((g, _)) => return Ok((g, restart)),
            Err(LcgError::BudgetHit { rules }) => last = rules,
            Err(e) => return Err(e),
        }
    }
    Err(LcgError::BudgetExhausted {
        budget,
        restarts: LCG_RESTART_CAP,
        last,
    })
}

/// Rewrites the grammar with two-symbol rules only: runs become doubling
/// chains (at most 2*log2(t) rules each), blocks become left-leaning
/// chains. Expansion and terminal ids are preserved.
pub fn binarize_lcg(g: &Rlcfg) -> crate::slp::Slp {
    let sigma = g.sigma();
    let mut rules: Vec<(Sym, Sym)> = Vec::new();
    let mut map: Vec<Sym> = (0..sigma as Sym).collect();
    let fresh = |rules: &mut Vec<(Sym, Sym)>, l: Sym, r: Sym| -> Sym {
        rules.push((l, r));
        (sigma + rules.len() - 1) as Sym
    };
    for rule in &g.rules {
        let id = match rule {
            LcgRule::Run(y, t) => {
                let y = map[*y as usize];
                let mut power = y;
                let mut acc: Option<Sym> = None;
                let mut left = *t;
                while left > 0 {
                    if left & 1 == 1 {
                        acc = Some(match acc {
                            None => power,
                            Some(a) => fresh(&mut rules, a, power),
                        });
                    }
                    left >>= 1;
                    if left > 0 {
                        power = fresh(&mut rules, power, power);
                    }
                }
                acc.expect("run repeats at least twice")
            }
            LcgRule::Block(seq) => {
                let mut acc = map[seq[0] as usize];
                for &c in &seq[1..] {
                    acc = fresh(&mut rules, acc, map[c as usize]);
                }
                acc
            }
        };
        map.push(id);
    }
    crate::slp::Slp {
        terminal_bytes: g.terminal_bytes.clone(),
        rules,
        root: map[g.root as usize],
    }
}

/// Builds a two-symbol-rule grammar for a raw text by locally consistent
/// parsing followed by [`binarize_lcg`]. The alphabet is the set of bytes
/// that occur, in increasing order.
pub fn build_slp_from_text(text: &[u8], seed: u64) -> Result<crate::slp::Slp, LcgError> {
    let mut seen = [false; 256];
    for &b in text {
        seen[b as usize] = true;
    }
    let alphabet: Vec<u8> = (0u16..256)
        .filter(|&b| seen[b as usize])
        .map(|b| b as u8)
        .collect();
    let g = build_lcg(text.iter().copied(), &alphabet, seed)?;
    Ok(binarize_lcg(&g))
}

/// Positions here are text offsets; re-exported for symmetry with the
/// pairwise grammar types.
pub type LcgPos = Pos;
