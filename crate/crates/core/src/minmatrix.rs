//! Minmatrices: sets of minterms of a context, i.e. formulas in modal DNF.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::bits::Bits;
use crate::context::Context;
use crate::error::{Error, Result};
use crate::formula::Formula;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Minmatrix {
    ctx: Context,
    bits: Bits,
}

/// Serialized form: `{"v","d","minterms","hex"}`.
#[derive(Serialize)]
pub struct MinmatrixJson {
    pub v: u32,
    pub d: u32,
    pub minterms: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hex: Option<String>,
}

impl Minmatrix {
    pub fn empty(ctx: Context) -> Self {
        Minmatrix { ctx, bits: Bits::zeros(ctx.universe_size()) }
    }

    pub fn full(ctx: Context) -> Self {
        Minmatrix { ctx, bits: Bits::ones(ctx.universe_size()) }
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(ctx: Context, it: I) -> Result<Self> {
        let mut m = Self::empty(ctx);
        for i in it {
            if i >= ctx.universe_size() {
                return Err(Error::Range(format!("minterm {i} outside K[{},{}]", ctx.v(), ctx.d())));
            }
            m.bits.set(i);
        }
        Ok(m)
    }

    pub(crate) fn from_bits(ctx: Context, bits: Bits) -> Self {
        debug_assert_eq!(bits.len(), ctx.universe_size());
        Minmatrix { ctx, bits }
    }

    pub fn context(&self) -> Context {
        self.ctx
    }

    pub fn bits(&self) -> &Bits {
        &self.bits
    }

    pub fn contains(&self, idx: usize) -> bool {
        idx < self.bits.len() && self.bits.get(idx)
    }

    pub fn len(&self) -> usize {
        self.bits.count()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.bits.is_full()
    }

    /// Member indices in ascending order.
    pub fn members(&self) -> impl DoubleEndedIterator<Item = usize> + '_ {
        self.bits.ones_iter()
    }

    fn same_ctx(&self, other: &Minmatrix) -> Result<()> {
        if self.ctx != other.ctx {
            return Err(Error::ContextMismatch(self.ctx.v(), self.ctx.d(), other.ctx.v(), other.ctx.d()));
        }
        Ok(())
    }

    pub fn union(&self, other: &Minmatrix) -> Result<Minmatrix> {
        self.same_ctx(other)?;
        Ok(Minmatrix { ctx: self.ctx, bits: self.bits.or(&other.bits) })
    }

    pub fn intersection(&self, other: &Minmatrix) -> Result<Minmatrix> {
        self.same_ctx(other)?;
        Ok(Minmatrix { ctx: self.ctx, bits: self.bits.and(&other.bits) })
    }

    pub fn difference(&self, other: &Minmatrix) -> Result<Minmatrix> {
        self.same_ctx(other)?;
        let mut bits = self.bits.clone();
        bits.and_not_with(&other.bits);
        Ok(Minmatrix { ctx: self.ctx, bits })
    }

    pub fn complement(&self) -> Minmatrix {
        Minmatrix { ctx: self.ctx, bits: self.bits.not() }
    }

    pub fn is_subset(&self, other: &Minmatrix) -> Result<bool> {
        self.same_ctx(other)?;
        Ok(self.bits.is_subset(&other.bits))
    }

    /// Theoremhood in K: the minmatrix is `[1]`.
    pub fn is_theorem_k(&self) -> bool {
        self.is_full()
    }

    /// Sum of member minterm products in descending index order.
    pub fn to_formula(&self) -> Formula {
        Formula::or_all(self.members().rev().map(|i| self.ctx.minterm_formula(i)))
    }

    /// The same formula read in K[v+1,d].
    pub fn promote_v(&self) -> Result<Minmatrix> {
        let src = self.ctx;
        let dst = Context::new(src.v() + 1, src.d())?;
        match src.d() {
            0 => Ok(Minmatrix::from_bits(dst, Bits::from_fn(dst.universe_size(), |i| self.bits.get(i >> 1)))),
            1 => {
                // new variable is the least significant one, so m_i splits into m_{2i}, m_{2i+1}
                let n = src.n();
                let fold = |e: u64| (0..n).fold(0usize, |acc, i| acc | (((e >> (2 * i)) & 3 != 0) as usize) << i);
                let folded: Vec<usize> = (0..1u64 << dst.n()).map(fold).collect();
                let bits = Bits::from_fn(dst.universe_size(), |idx| {
                    let (s, e) = dst.split(idx);
                    self.bits.get((s >> 1) << n | folded[e as usize])
                });
                Ok(Minmatrix::from_bits(dst, bits))
            }
            _ => normalize(&self.to_formula(), dst),
        }
    }

    /// 0/1 table: one row per factor, one column per member (descending
    /// index), sections separated by `:`.
    pub fn render_matrix(&self) -> Result<String> {
        if self.ctx.d() > 1 {
            return Err(Error::WrongDegree { expected: "0 or 1", found: self.ctx.d() });
        }
        if self.is_empty() {
            return Ok("[ ]".into());
        }
        let ctx = self.ctx;
        let labels = ctx.factor_labels();
        let width = labels.iter().map(|l| l.chars().count()).max().unwrap_or(0);
        let cols: Vec<usize> = self.members().rev().collect();
        let v = ctx.v() as usize;
        let mut out = String::new();
        for (row, label) in labels.iter().enumerate() {
            if row == v && v > 0 {
                let _ = writeln!(out, "{}-+-{}", "-".repeat(width), "-".repeat(table_width(ctx, &cols)));
            }
            let _ = write!(out, "{label:>width$} |");
            let mut prev_section = None;
            for &c in &cols {
                let section = if ctx.d() == 1 { ctx.split(c).0 } else { 0 };
                if prev_section.is_some_and(|s| s != section) {
                    out.push_str(" :");
                }
                prev_section = Some(section);
                let bit = if row < v {
                    let s = if ctx.d() == 1 { ctx.split(c).0 } else { c };
                    ctx.var_in(row as u32, s)
                } else {
                    let i = ctx.n() - 1 - (row - v);
                    ctx.split(c).1 >> i & 1 == 1
                };
                out.push_str(if bit { " 1" } else { " 0" });
            }
            out.push('\n');
        }
        Ok(out)
    }

    pub fn to_json(&self, with_hex: bool) -> MinmatrixJson {
        MinmatrixJson {
            v: self.ctx.v(),
            d: self.ctx.d(),
            minterms: self.members().collect(),
            hex: with_hex.then(|| self.bits.to_le_bytes().iter().map(|b| format!("{b:02x}")).collect()),
        }
    }
}

fn table_width(ctx: Context, cols: &[usize]) -> usize {
    let mut w = 2 * cols.len();
    if ctx.d() == 1 {
        let mut sections: Vec<usize> = cols.iter().map(|&c| ctx.split(c).0).collect();
        sections.dedup();
        w += 2 * (sections.len() - 1);
    }
    w.saturating_sub(1)
}

/// Evaluates `f` at every minterm of `ctx`.
pub fn normalize(f: &Formula, ctx: Context) -> Result<Minmatrix> {
    let degree = f.modal_degree();
    if degree > ctx.d() {
        return Err(Error::DegreeOverflow { degree, max: ctx.d() });
    }
    let used = f.variables();
    if used > ctx.v() {
        return Err(Error::VariableOverflow { used, available: ctx.v() });
    }
    let mut ev = Evaluator { memo: HashMap::new() };
    Ok(Minmatrix::from_bits(ctx, ev.eval(f, ctx)))
}

struct Evaluator {
    /// Minmatrices of `◇` operands, keyed by (operand, its level).
    memo: HashMap<(Formula, u32), Bits>,
}

impl Evaluator {
    fn eval(&mut self, f: &Formula, ctx: Context) -> Bits {
        let size = ctx.universe_size();
        match f {
            Formula::Const0 => Bits::zeros(size),
            Formula::Const1 => Bits::ones(size),
            Formula::Var(k) => {
                let w = ctx.modal_width();
                Bits::from_fn(size, |idx| ctx.var_in(*k, idx >> w))
            }
            Formula::Not(a) => self.eval(a, ctx).not(),
            Formula::And(a, b) => self.eval(a, ctx).and(&self.eval(b, ctx)),
            Formula::Or(a, b) => self.eval(a, ctx).or(&self.eval(b, ctx)),
            Formula::Implies(a, b) => self.eval(a, ctx).not().or(&self.eval(b, ctx)),
            Formula::Iff(a, b) => {
                let x = self.eval(a, ctx);
                let y = self.eval(b, ctx);
                let mut both = x.and(&y);
                both.or_with(&x.not().and(&y.not()));
                both
            }
            Formula::Diamond(a) => self.diamond(a, ctx),
            Formula::Box(a) => self.diamond(&Formula::not((**a).clone()), ctx).not(),
        }
    }

    /// `◇a` holds at `(s, e)` iff `e` meets the minmatrix of `a` one level down.
    fn diamond(&mut self, a: &Formula, ctx: Context) -> Bits {
        let pred = ctx.predecessor().expect("degree checked");
        let key = (a.clone(), pred.d());
        let inner = match self.memo.get(&key) {
            Some(b) => b.clone(),
            None => {
                let b = self.eval(a, pred);
                self.memo.insert(key, b.clone());
                b
            }
        };
        // the predecessor universe is at most the cap's exponent, so one word
        let mask = inner.words().first().copied().unwrap_or(0);
        let w = ctx.modal_width();
        let low = (1usize << w) - 1;
        Bits::from_fn(ctx.universe_size(), |idx| (idx & low) as u64 & mask != 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    fn norm(s: &str, v: u32, d: u32) -> Minmatrix {
        normalize(&parse(s).unwrap(), Context::new(v, d).unwrap()).unwrap()
    }

    fn set(m: &Minmatrix) -> Vec<usize> {
        m.members().rev().collect()
    }

    #[test]
    fn boolean_example() {
        assert_eq!(set(&norm("p+q+r->(p->q)r", 3, 0)), vec![7, 3, 1, 0]);
    }

    #[test]
    fn axiom_t_in_k11() {
        let t = norm("[]p->p", 1, 1);
        assert_eq!(set(&t), vec![7, 6, 5, 4, 3, 1]);
        let d = norm("<>1", 1, 1);
        assert_eq!(set(&d), vec![7, 6, 5, 3, 2, 1]);
        assert_eq!(set(&t.intersection(&d).unwrap()), vec![7, 6, 5, 3, 1]);
        assert!(!t.is_theorem_k());
    }

    #[test]
    fn theorems() {
        assert!(norm("p->p", 1, 0).is_theorem_k());
        assert!(norm("[](p->q)->([]p->[]q)", 2, 1).is_theorem_k());
        assert!(normalize(&Formula::Const1, Context::new(2, 1).unwrap()).unwrap().is_full());
    }

    #[test]
    fn errors() {
        let k10 = Context::new(1, 0).unwrap();
        assert!(matches!(normalize(&parse("<>p").unwrap(), k10), Err(Error::DegreeOverflow { .. })));
        assert!(matches!(normalize(&parse("q").unwrap(), k10), Err(Error::VariableOverflow { .. })));
        let a = Minmatrix::full(k10);
        let b = Minmatrix::full(Context::new(1, 1).unwrap());
        assert!(matches!(a.union(&b), Err(Error::ContextMismatch(..))));
    }

    #[test]
    fn complement_and_identity() {
        let ctx = Context::new(1, 1).unwrap();
        assert!(Minmatrix::empty(ctx).complement().is_full());
        let t = norm("[]p->p", 1, 1);
        assert_eq!(Minmatrix::full(ctx).intersection(&t).unwrap(), t);
    }

    #[test]
    fn to_formula_round_trip() {
        let ctx = Context::new(1, 1).unwrap();
        assert_eq!(Minmatrix::empty(ctx).to_formula(), Formula::Const0);
        let single = Minmatrix::from_indices(ctx, [7]).unwrap();
        assert_eq!(single.to_formula().to_string(), "p<>p<>!p");
        let tt = Minmatrix::from_indices(ctx, [7, 6, 3, 1]).unwrap();
        assert_eq!(normalize(&tt.to_formula(), ctx).unwrap(), tt);
    }

    #[test]
    fn promotion() {
        let p = norm("p", 1, 0);
        assert_eq!(set(&p.promote_v().unwrap()), vec![3, 2]);
        let one = Minmatrix::full(Context::new(1, 1).unwrap());
        assert!(one.promote_v().unwrap().is_full());
        for src in ["[]p->p", "<>p->[]p", "<>!p", "p<>p!<>!p"] {
            let m = norm(src, 1, 1);
            let via_formula = normalize(&m.to_formula(), Context::new(2, 1).unwrap()).unwrap();
            assert_eq!(m.promote_v().unwrap(), via_formula, "{src}");
        }
    }

    #[test]
    fn degree_two() {
        let m = norm("[]<>p->p", 1, 2);
        assert_eq!(m.context().universe_size(), 512);
        assert!(norm("[]([]p->p)->([][]p->[]p)", 1, 2).is_theorem_k());
    }

    #[test]
    fn matrix_display() {
        let tt = Minmatrix::from_indices(Context::new(1, 1).unwrap(), [7, 6, 3, 1]).unwrap();
        let text = tt.render_matrix().unwrap();
        let rows: Vec<&str> = text.lines().collect();
        assert_eq!(rows[0], "   p | 1 1 : 0 0");
        assert_eq!(rows[2], " <>p | 1 1 : 1 0");
        assert_eq!(rows[3], "<>!p | 1 0 : 1 1");
        assert_eq!(Minmatrix::empty(Context::new(1, 1).unwrap()).render_matrix().unwrap(), "[ ]");
    }

    #[test]
    fn json_shape() {
        let tt = Minmatrix::from_indices(Context::new(1, 1).unwrap(), [7, 6, 3, 1]).unwrap();
        let j = tt.to_json(true);
        assert_eq!(j.minterms, vec![1, 3, 6, 7]);
        assert_eq!(j.hex.as_deref(), Some("ca"));
    }
}
