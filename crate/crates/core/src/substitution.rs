//! Level-0 uniform substitutions S(v,0) and their action on minterms.
//!
//! A substitution is stored as `v` truth tables over the level-0 minterms.
//! Equivalently it is the map `g` on valuations with
//! `g(i) = (table_0(i), .., table_{v-1}(i))`; then `m_i∘σ` is the fiber
//! `g⁻¹(i)` and composition is `g_{ab} = g_a ∘ g_b`.

use std::collections::BTreeMap;

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::bits::Bits;
use crate::context::Context;
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::minmatrix::Minmatrix;
use crate::orbit;

/// Largest `v` with tables that fit a `u64`.
pub const MAX_V: u32 = 6;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Substitution {
    v: u32,
    tables: Vec<u64>,
}

impl Substitution {
    pub fn identity(v: u32) -> Self {
        let g: Vec<usize> = (0..1usize << v).collect();
        Self::from_map(v, &g).expect("identity map is valid")
    }

    pub fn from_tables(v: u32, tables: Vec<u64>) -> Result<Self> {
        if v > MAX_V {
            return Err(Error::Cap { what: format!("substitution over {v} variables"), cap: MAX_V as u64 });
        }
        if tables.len() != v as usize {
            return Err(Error::Arity(v, tables.len() as u32));
        }
        let n = 1u32 << v;
        if n < 64 && tables.iter().any(|t| t >> n != 0) {
            return Err(Error::Range(format!("truth table wider than {n} bits")));
        }
        Ok(Substitution { v, tables })
    }

    /// Builds the substitution whose valuation map is `g`.
    pub fn from_map(v: u32, g: &[usize]) -> Result<Self> {
        let n = 1usize << v;
        if g.len() != n || g.iter().any(|&x| x >= n) {
            return Err(Error::Range(format!("valuation map must send [0,{n}) into itself")));
        }
        let tables = (0..v)
            .map(|k| (0..n).filter(|&i| g[i] >> (v - 1 - k) & 1 == 1).fold(0u64, |t, i| t | 1 << i))
            .collect();
        Self::from_tables(v, tables)
    }

    pub fn v(&self) -> u32 {
        self.v
    }

    pub fn tables(&self) -> &[u64] {
        &self.tables
    }

    /// The valuation map `g`.
    pub fn map(&self) -> Vec<usize> {
        let v = self.v;
        (0..1usize << v)
            .map(|i| (0..v).fold(0, |acc, k| acc | ((self.tables[k as usize] >> i & 1) as usize) << (v - 1 - k)))
            .collect()
    }

    /// Members of `m_i∘σ` for every `i`, as bit masks.
    pub fn fibers(&self) -> Vec<u64> {
        let mut out = vec![0u64; 1 << self.v];
        for (j, &i) in self.map().iter().enumerate() {
            out[i] |= 1 << j;
        }
        out
    }

    /// `(ab)_k = a_k` with each `p_j` replaced by `b_j`.
    pub fn compose(&self, other: &Substitution) -> Result<Substitution> {
        if self.v != other.v {
            return Err(Error::Arity(self.v, other.v));
        }
        let ga = self.map();
        let g: Vec<usize> = other.map().iter().map(|&j| ga[j]).collect();
        Self::from_map(self.v, &g)
    }

    pub fn is_prime(&self) -> bool {
        self.map().iter().sorted().copied().eq(0..1usize << self.v)
    }

    /// For a prime, the permutation `π` with `m_i∘σ = m_{π(i)}`.
    pub fn permutation(&self) -> Option<Vec<usize>> {
        let fibers = self.fibers();
        fibers
            .iter()
            .map(|f| (f.count_ones() == 1).then(|| f.trailing_zeros() as usize))
            .collect()
    }

    /// The formula substituted for `p_k`: a literal or constant when the
    /// table is one, otherwise its DNF.
    pub fn component(&self, k: u32) -> Formula {
        let n = 1usize << self.v;
        let t = self.tables[k as usize];
        let full = if n == 64 { !0 } else { (1u64 << n) - 1 };
        let ctx = Context::new(self.v, 0).expect("v within cap");
        if t == 0 {
            return Formula::Const0;
        }
        if t == full {
            return Formula::Const1;
        }
        for j in 0..self.v {
            let var = (0..n).filter(|&i| ctx.var_in(j, i)).fold(0u64, |m, i| m | 1 << i);
            if t == var {
                return Formula::Var(j);
            }
            if t == full & !var {
                return Formula::not(Formula::Var(j));
            }
        }
        Formula::or_all((0..n).rev().filter(|i| t >> i & 1 == 1).map(|i| ctx.minterm_formula(i)))
    }

    pub fn components(&self) -> Vec<Formula> {
        (0..self.v).map(|k| self.component(k)).collect()
    }

    pub fn to_json(&self) -> SubstitutionJson {
        SubstitutionJson {
            v: self.v,
            tables: self.tables.clone(),
            components: self.components().iter().map(crate::formula::render).collect(),
        }
    }
}

#[derive(Serialize)]
pub struct SubstitutionJson {
    pub v: u32,
    pub tables: Vec<u64>,
    pub components: Vec<String>,
}

/// Syntactic substitution: every `p_k` becomes `σ_k`.
pub fn apply_formula(f: &Formula, s: &Substitution) -> Result<Formula> {
    if f.variables() > s.v {
        return Err(Error::VariableOverflow { used: f.variables(), available: s.v });
    }
    let comps = s.components();
    Ok(f.map_vars(&|k| comps[k as usize].clone()))
}

/// A substitution prepared for repeated application in one context.
///
/// At level 1, the image of `M` is `{(s', e') : (g(s'), sig(e')) ∈ M}` where
/// bit `i` of `sig(e')` records whether `e'` meets the fiber of `m_i`.
#[derive(Clone, Debug)]
pub struct Kernel {
    ctx: Context,
    g: Vec<usize>,
    fibers: Vec<u64>,
    sig: Vec<u64>,
}

impl Kernel {
    pub fn new(s: &Substitution, ctx: Context) -> Result<Self> {
        if ctx.d() > 1 {
            return Err(Error::WrongDegree { expected: "0 or 1", found: ctx.d() });
        }
        if ctx.v() != s.v {
            return Err(Error::Arity(ctx.v(), s.v));
        }
        let fibers = s.fibers();
        let sig = if ctx.d() == 1 {
            (0..1u64 << ctx.n())
                .map(|e| fibers.iter().enumerate().fold(0u64, |acc, (i, f)| acc | ((e & f != 0) as u64) << i))
                .collect()
        } else {
            Vec::new()
        };
        Ok(Kernel { ctx, g: s.map(), fibers, sig })
    }

    pub fn context(&self) -> Context {
        self.ctx
    }

    /// The minterm whose image contains `idx` (images of distinct minterms
    /// are disjoint and cover the universe).
    #[inline]
    pub fn source_of(&self, idx: usize) -> usize {
        if self.ctx.d() == 0 {
            return self.g[idx];
        }
        let n = self.ctx.n();
        let (s, e) = (idx >> n, idx & ((1 << n) - 1));
        self.g[s] << n | self.sig[e] as usize
    }

    pub fn apply_bits(&self, m: &Bits) -> Bits {
        Bits::from_fn(m.len(), |idx| m.get(self.source_of(idx)))
    }

    pub fn apply_minmatrix(&self, m: &Minmatrix) -> Result<Minmatrix> {
        if m.context() != self.ctx {
            let (a, b) = (m.context(), self.ctx);
            return Err(Error::ContextMismatch(a.v(), a.d(), b.v(), b.d()));
        }
        Ok(Minmatrix::from_bits(self.ctx, self.apply_bits(m.bits())))
    }

    /// Image of one minterm, built from its factors without a full sweep.
    pub fn apply_minterm(&self, idx: usize) -> Result<Minmatrix> {
        minterm_image(self.ctx, &self.fibers, idx)
    }

    /// `counts[i][j] = |(ω_i∘σ) ∩ ω_j|` over the prime orbits (level 1).
    pub fn orbit_transfer_counts(&self) -> Vec<Vec<u32>> {
        let n = self.ctx.n();
        let no = 2 * n;
        let mut counts = vec![vec![0u32; no]; no];
        let sig_chi: Vec<u32> = self.sig.iter().map(|s| s.count_ones()).collect();
        for sp in 0..n {
            let src = self.g[sp];
            for e in 0..1usize << n {
                let sg = self.sig[e];
                let i = 2 * sig_chi[e] as usize - (sg >> src & 1) as usize;
                let j = 2 * e.count_ones() as usize - (e >> sp & 1);
                counts[i][j] += 1;
            }
        }
        counts
    }
}

/// Image of minterm `idx` under the substitution with the given fibers
/// (`fibers[i]` = members of `m_i∘σ`).
pub(crate) fn minterm_image(ctx: Context, fibers: &[u64], idx: usize) -> Result<Minmatrix> {
    if idx >= ctx.universe_size() {
        return Err(Error::Range(format!("minterm {idx}")));
    }
    let n = ctx.n();
    if ctx.d() == 0 {
        return Minmatrix::from_indices(ctx, (0..n).filter(|&j| fibers[idx] >> j & 1 == 1));
    }
    let (s, e) = ctx.split(idx);
    // ε' must meet fiber i exactly when ε_i = 1; fibers partition [0,n)
    let mut choices = vec![0u64];
    for i in (0..n).filter(|i| e >> i & 1 == 1) {
        let part = fibers[i];
        if part == 0 {
            return Ok(Minmatrix::empty(ctx));
        }
        let mut next = Vec::with_capacity(choices.len());
        for &c in &choices {
            let mut sub = part;
            while sub != 0 {
                next.push(c | sub);
                sub = (sub - 1) & part;
            }
        }
        choices = next;
    }
    let prefixes = (0..n).filter(|&j| fibers[s] >> j & 1 == 1).collect_vec();
    Minmatrix::from_indices(ctx, prefixes.iter().flat_map(|&sp| choices.iter().map(move |&c| sp << n | c as usize)))
}

pub fn apply_minterm(ctx: Context, idx: usize, s: &Substitution) -> Result<Minmatrix> {
    Kernel::new(s, ctx)?.apply_minterm(idx)
}

pub fn apply_minmatrix(m: &Minmatrix, s: &Substitution) -> Result<Minmatrix> {
    Kernel::new(s, m.context())?.apply_minmatrix(m)
}

/// All `(2^v)!` primes, one per permutation `π` of the level-0 minterms, in
/// lexicographic order of `π`.
pub fn enumerate_primes(v: u32) -> Result<Vec<Substitution>> {
    if v > 3 {
        return Err(Error::Cap { what: format!("prime enumeration for v = {v}"), cap: 3 });
    }
    let n = 1usize << v;
    Ok((0..n)
        .permutations(n)
        .map(|pi| {
            // σ_k = Σ_{i: p_k ∈ m_i} m_{π(i)}, so g = π⁻¹
            let mut g = vec![0; n];
            for (i, &pi_i) in pi.iter().enumerate() {
                g[pi_i] = i;
            }
            Substitution::from_map(v, &g).expect("permutation")
        })
        .collect())
}

/// A transposition and an n-cycle; they generate every prime.
pub fn prime_generators(v: u32) -> Vec<Substitution> {
    let n = 1usize << v;
    if n == 1 {
        return Vec::new();
    }
    let mut swap: Vec<usize> = (0..n).collect();
    swap.swap(0, 1);
    let cycle: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
    let mut gens = vec![Substitution::from_map(v, &swap).expect("perm")];
    if n > 2 {
        gens.push(Substitution::from_map(v, &cycle).expect("perm"));
    }
    gens
}

/// The substitution that empties `m_{n-1}` into `m_{n-2}` and fixes every
/// other minterm: `m_{n-1}∘σ = 0`, `m_{n-2}∘σ = m_{n-1} + m_{n-2}`.
///
/// `m_{n-1}` and `m_{n-2}` differ in the least significant variable
/// `p_{v-1}`, which becomes `p_{v-1}·!m_{n-1}·!m_{n-2}`. For `v = 1` this is
/// `p ↦ 0`.
pub fn critical_substitution(v: u32) -> Result<Substitution> {
    if v == 0 {
        return Err(Error::Range("the critical substitution needs v ≥ 1".into()));
    }
    if v > MAX_V {
        return Err(Error::Cap { what: format!("substitution over {v} variables"), cap: MAX_V as u64 });
    }
    let n = 1usize << v;
    let mut g: Vec<usize> = (0..n).collect();
    g[n - 1] = n - 2;
    Substitution::from_map(v, &g)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Coverage {
    None,
    Partial,
    Full,
}

/// Row-major `2n × 2n` coverage matrix over the prime orbits, indexed by
/// [`orbit::OrbitLabel::index`].
pub fn coverage_matrix(ctx: Context, s: &Substitution) -> Result<Vec<Coverage>> {
    if ctx.d() != 1 {
        return Err(Error::WrongDegree { expected: "1", found: ctx.d() });
    }
    let k = Kernel::new(s, ctx)?;
    Ok(coverage_from_counts(ctx, &k.orbit_transfer_counts()))
}

fn coverage_from_counts(ctx: Context, counts: &[Vec<u32>]) -> Vec<Coverage> {
    let sizes: Vec<u32> = (0..2 * ctx.n()).map(|j| orbit::orbit_size(ctx, j) as u32).collect();
    counts
        .iter()
        .flat_map(|row| {
            row.iter().zip(&sizes).map(|(&c, &size)| match c {
                0 => Coverage::None,
                c if c == size => Coverage::Full,
                _ => Coverage::Partial,
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassifyMode {
    /// Computes the key of every substitution.
    Exhaustive,
    /// Computes one key per double coset `ς₁σς₂` (keys are constant there)
    /// and counts coset sizes by enumeration.
    Reduced,
}

#[derive(Clone, Debug)]
pub struct ClassifyOptions {
    pub mode: ClassifyMode,
    /// Largest number of substitutions the exhaustive mode will visit.
    pub exhaustive_cap: u64,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions { mode: ClassifyMode::Reduced, exhaustive_cap: 1 << 16, threads: None }
    }
}

#[derive(Clone, Debug)]
pub struct DependencyClass {
    pub key: Vec<Coverage>,
    pub size: u64,
    /// Member with the smallest enumeration index.
    pub representative: Substitution,
}

impl DependencyClass {
    pub fn key_digest(&self) -> String {
        key_digest(&self.key)
    }
}

pub fn key_digest(key: &[Coverage]) -> String {
    let bytes: Vec<u8> = key.iter().map(|c| *c as u8).collect();
    format!("{:x}", Sha256::digest(&bytes))
}

/// Enumeration index `t` encodes `g(i)` in base-`n` digit `i`.
fn map_of_index(v: u32, t: u64) -> Vec<usize> {
    let n = 1usize << v;
    (0..n).map(|i| (t >> (v as usize * i)) as usize & (n - 1)).collect()
}

fn key_of(ctx: Context, g: &[usize]) -> Vec<Coverage> {
    let s = Substitution::from_map(ctx.v(), g).expect("valid map");
    coverage_matrix(ctx, &s).expect("level-1 context")
}

pub(crate) fn in_pool<T: Send>(threads: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(job()),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t.max(1))
                .build()
                .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
            Ok(pool.install(job))
        }
    }
}

/// Partitions S(v,0) by the coverage matrix each substitution induces on
/// the prime orbits of K[v,1]. Classes are sorted by size, then digest.
pub fn classify(v: u32, opts: &ClassifyOptions) -> Result<Vec<DependencyClass>> {
    let ctx = Context::new(v, 1)?;
    let n = ctx.n();
    let bits = v as u64 * n as u64;
    if bits >= 64 {
        return Err(Error::Cap { what: format!("substitution space for v = {v}"), cap: 63 });
    }
    let total = 1u64 << bits;
    const CHUNK: u64 = 1 << 12;
    let chunks = total.div_ceil(CHUNK);

    let merged: BTreeMap<Vec<Coverage>, (u64, u64)> = match opts.mode {
        ClassifyMode::Exhaustive => {
            if total > opts.exhaustive_cap {
                return Err(Error::Cap { what: format!("exhaustive classification of {total} substitutions"), cap: opts.exhaustive_cap });
            }
            in_pool(opts.threads, || {
                (0..chunks)
                    .into_par_iter()
                    .map(|c| {
                        let mut local: BTreeMap<Vec<Coverage>, (u64, u64)> = BTreeMap::new();
                        for t in c * CHUNK..((c + 1) * CHUNK).min(total) {
                            let e = local.entry(key_of(ctx, &map_of_index(v, t))).or_insert((0, t));
                            e.0 += 1;
                        }
                        local
                    })
                    .reduce(BTreeMap::new, merge_classes)
            })?
        }
        ClassifyMode::Reduced => {
            if v > 3 {
                return Err(Error::Cap { what: format!("reduced classification for v = {v}"), cap: 3 });
            }
            // double cosets of a map under ς₁σς₂ are its sorted fiber sizes
            let shapes: BTreeMap<Vec<u8>, (u64, u64, u64)> = in_pool(opts.threads, || {
                (0..chunks)
                    .into_par_iter()
                    .map(|c| {
                        let mut local: BTreeMap<Vec<u8>, (u64, u64, u64)> = BTreeMap::new();
                        let mut fiber = vec![0u8; n];
                        for t in c * CHUNK..((c + 1) * CHUNK).min(total) {
                            fiber.iter_mut().for_each(|f| *f = 0);
                            for i in 0..n {
                                fiber[(t >> (v as usize * i)) as usize & (n - 1)] += 1;
                            }
                            let mut shape = fiber.clone();
                            shape.sort_unstable_by(|a, b| b.cmp(a));
                            let e = local.entry(shape).or_insert((0, t, t));
                            e.0 += 1;
                            e.1 = e.1.min(t);
                            e.2 = e.2.max(t);
                        }
                        local
                    })
                    .reduce(BTreeMap::new, |mut a, b| {
                        for (k, (c, lo, hi)) in b {
                            let e = a.entry(k).or_insert((0, lo, hi));
                            e.0 += c;
                            e.1 = e.1.min(lo);
                            e.2 = e.2.max(hi);
                        }
                        a
                    })
            })?;
            let mut merged = BTreeMap::new();
            for (shape, (count, lo, hi)) in shapes {
                let key = key_of(ctx, &map_of_index(v, lo));
                if key_of(ctx, &map_of_index(v, hi)) != key {
                    return Err(Error::Internal(format!("coverage key differs inside double coset {shape:?}")));
                }
                let e = merged.entry(key).or_insert((0, lo));
                e.0 += count;
                e.1 = e.1.min(lo);
            }
            merged
        }
    };

    let mut classes: Vec<DependencyClass> = merged
        .into_iter()
        .map(|(key, (size, rep))| DependencyClass {
            key,
            size,
            representative: Substitution::from_map(v, &map_of_index(v, rep)).expect("valid map"),
        })
        .collect();
    classes.sort_by_cached_key(|c| (c.size, c.key_digest()));
    Ok(classes)
}

fn merge_classes(
    mut a: BTreeMap<Vec<Coverage>, (u64, u64)>,
    b: BTreeMap<Vec<Coverage>, (u64, u64)>,
) -> BTreeMap<Vec<Coverage>, (u64, u64)> {
    for (k, (c, rep)) in b {
        let e = a.entry(k).or_insert((0, rep));
        e.0 += c;
        e.1 = e.1.min(rep);
    }
    a
}

/// Every substitution for `v`, in enumeration order.
pub fn all_substitutions(v: u32) -> Result<impl Iterator<Item = Substitution>> {
    let bits = v as u64 * (1u64 << v);
    if bits > 24 {
        return Err(Error::Cap { what: format!("substitution enumeration for v = {v}"), cap: 3 });
    }
    Ok((0..1u64 << bits).map(move |t| Substitution::from_map(v, &map_of_index(v, t)).expect("valid")))
}
