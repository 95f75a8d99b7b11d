//! Modal contexts K[v,d] and the encoding of their minterms.
//!
//! Level 0: minterm `m_i` assigns variable `p_k` the bit `v-1-k` of `i`, so
//! `p_0` is the most significant bit and `m_{n-1}` is the all-true valuation.
//!
//! Level d ≥ 1: index `s * 2^P + e`, where `P` is the size of the level-(d-1)
//! universe, `s` is the Boolean prefix and bit `i` of `e` is the state of the
//! modal factor `◇μ_i` built from the `i`-th level-(d-1) minterm.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::formula::{var_name, Formula};
use crate::minmatrix::Minmatrix;

pub const DEFAULT_UNIVERSE_CAP: u64 = 1 << 21;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Context {
    v: u32,
    d: u32,
}

/// Number of DNF factors of K[v,d], if it fits in a `u32` below 64.
fn factor_count(v: u32, d: u32) -> Option<u32> {
    let mut f = v;
    for _ in 0..d {
        if f >= 63 {
            return None;
        }
        f = v.checked_add(u32::try_from(1u64 << f).ok()?)?;
    }
    (f < 63).then_some(f)
}

impl Context {
    pub fn new(v: u32, d: u32) -> Result<Self> {
        Self::with_cap(v, d, DEFAULT_UNIVERSE_CAP)
    }

    pub fn with_cap(v: u32, d: u32, cap: u64) -> Result<Self> {
        match factor_count(v, d) {
            Some(f) if (1u64 << f) <= cap => Ok(Context { v, d }),
            _ => Err(Error::UniverseCap { v, d, cap }),
        }
    }

    #[inline]
    pub fn v(&self) -> u32 {
        self.v
    }

    #[inline]
    pub fn d(&self) -> u32 {
        self.d
    }

    /// Number of level-0 minterms, `2^v`.
    #[inline]
    pub fn n(&self) -> usize {
        1 << self.v
    }

    /// Number of DNF factors: `v` Boolean ones plus one `◇` factor per
    /// predecessor minterm.
    pub fn factors(&self) -> u32 {
        factor_count(self.v, self.d).expect("checked at construction")
    }

    #[inline]
    pub fn universe_size(&self) -> usize {
        1 << self.factors()
    }

    /// Width of the modal part `e` of an index, i.e. the predecessor
    /// universe size. Zero at level 0.
    pub fn modal_width(&self) -> usize {
        match self.predecessor() {
            Some(p) => p.universe_size(),
            None => 0,
        }
    }

    /// K[v,d-1], or `None` at level 0.
    pub fn predecessor(&self) -> Option<Context> {
        (self.d > 0).then(|| Context { v: self.v, d: self.d - 1 })
    }

    pub fn level0(&self) -> Context {
        Context { v: self.v, d: 0 }
    }

    fn check_index(&self, idx: usize) -> Result<()> {
        if idx >= self.universe_size() {
            return Err(Error::Range(format!("minterm {idx} outside K[{},{}]", self.v, self.d)));
        }
        Ok(())
    }

    fn need_level1(&self) -> Result<()> {
        if self.d != 1 {
            return Err(Error::WrongDegree { expected: "1", found: self.d });
        }
        Ok(())
    }

    /// Splits a level-d index (d ≥ 1) into its prefix and modal part without
    /// range checks.
    #[inline]
    pub(crate) fn split(&self, idx: usize) -> (usize, u64) {
        let w = self.modal_width();
        (idx >> w, (idx & ((1usize << w) - 1)) as u64)
    }

    /// `(section, ε)` of a K[v,1] minterm; bit `i` of `ε` is `ε_i`.
    pub fn decode(&self, idx: usize) -> Result<(usize, u64)> {
        self.need_level1()?;
        self.check_index(idx)?;
        Ok(self.split(idx))
    }

    pub fn encode(&self, section: usize, eps: u64) -> Result<usize> {
        self.need_level1()?;
        if section >= self.n() || eps >> self.n() != 0 {
            return Err(Error::Range(format!("section {section}, epsilon {eps:#b}")));
        }
        Ok(section << self.n() | eps as usize)
    }

    /// Number of modal factors in positive state.
    pub fn chi(&self, idx: usize) -> Result<u32> {
        Ok(self.decode(idx)?.1.count_ones())
    }

    /// Whether variable `k` is true in level-0 minterm `i`.
    #[inline]
    pub fn var_in(&self, k: u32, i: usize) -> bool {
        i >> (self.v - 1 - k) & 1 == 1
    }

    /// The product formula of minterm `idx`, factors in display order:
    /// `p_0 .. p_{v-1}`, then `◇μ_i` for descending `i`.
    pub fn minterm_formula(&self, idx: usize) -> Formula {
        if self.d == 0 {
            return Formula::and_all((0..self.v).map(|k| literal(Formula::Var(k), self.var_in(k, idx))));
        }
        let pred = self.predecessor().expect("d > 0");
        let (s, e) = self.split(idx);
        let prefix = self.level0().minterm_formula(s);
        let prefix = (self.v > 0).then_some(prefix);
        let modal = (0..pred.universe_size())
            .rev()
            .map(|i| literal(Formula::diamond(pred.minterm_formula(i)), e >> i & 1 == 1));
        Formula::and_all(prefix.into_iter().chain(modal))
    }

    /// Row labels for matrix displays.
    pub fn factor_labels(&self) -> Vec<String> {
        let mut out: Vec<String> = (0..self.v).map(var_name).collect();
        if let Some(pred) = self.predecessor() {
            for i in (0..pred.universe_size()).rev() {
                out.push(crate::formula::render(&Formula::diamond(pred.minterm_formula(i))));
            }
        }
        out
    }
}

fn literal(f: Formula, positive: bool) -> Formula {
    if positive {
        f
    } else {
        Formula::not(f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    All,
    Positive,
    Negative,
}

/// `E_v(k)`: the level-0 minmatrices with exactly `k` minterms. `Positive`
/// keeps those containing `m_{n-1}`, `Negative` those lacking it. Listed by
/// descending member mask.
pub fn enumerate_e(v: u32, k: usize, sign: Sign) -> Result<Vec<Minmatrix>> {
    if v > 4 {
        return Err(Error::Cap { what: format!("E_v(k) enumeration for v = {v}"), cap: 4 });
    }
    let ctx = Context::new(v, 0)?;
    let n = ctx.n();
    if k > n {
        return Err(Error::Range(format!("k = {k} exceeds n = {n}")));
    }
    let top = 1u64 << (n - 1);
    let out = (0..1u64 << n)
        .rev()
        .filter(|m| m.count_ones() as usize == k)
        .filter(|m| match sign {
            Sign::All => true,
            Sign::Positive => m & top != 0,
            Sign::Negative => m & top == 0,
        })
        .map(|m| Minmatrix::from_indices(ctx, (0..n).filter(|i| m >> i & 1 == 1)).expect("in range"))
        .collect();
    Ok(out)
}
