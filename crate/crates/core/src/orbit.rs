//! Prime orbits of minterms.
//!
//! In K[v,1] a minterm in section `s` with modal part `ε` belongs to the
//! orbit fixed by the pair `(ε_s, χ(ε))`. Orbits are indexed
//! `Vv_0 = 0, Dd_0 = 1, Dc_k = 2k, Dw_k = 2k+1`, which is `2χ - ε_s`.

use std::fmt;

use serde::Serialize;

use crate::bits::Bits;
use crate::context::Context;
use crate::error::{Error, Result};
use crate::minmatrix::Minmatrix;
use crate::substitution::{enumerate_primes, minterm_image};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OrbitLabel {
    /// The single orbit of a level-0 context.
    Atoms,
    Vv,
    Dd,
    Dc(usize),
    Dw(usize),
}

impl OrbitLabel {
    /// Position in the canonical order `Vv, Dd, Dc_1, Dw_1, ..`.
    pub fn index(self) -> usize {
        match self {
            OrbitLabel::Atoms | OrbitLabel::Vv => 0,
            OrbitLabel::Dd => 1,
            OrbitLabel::Dc(k) => 2 * k,
            OrbitLabel::Dw(k) => 2 * k + 1,
        }
    }

    pub fn from_index(i: usize) -> Self {
        match i {
            0 => OrbitLabel::Vv,
            1 => OrbitLabel::Dd,
            _ if i % 2 == 0 => OrbitLabel::Dc(i / 2),
            _ => OrbitLabel::Dw(i / 2),
        }
    }

    /// Name with the doubled-letter convention of tables for `v` variables,
    /// e.g. `Vvv`, `Dcc2` for `v = 2`; the index is dropped when `n = 2`.
    pub fn display_name(self, v: u32) -> String {
        let rep = |c: char| c.to_string().repeat(v.max(1) as usize);
        let indexed = v >= 2;
        match self {
            OrbitLabel::Atoms => "M".into(),
            OrbitLabel::Vv => format!("V{}", rep('v')),
            OrbitLabel::Dd => format!("D{}", rep('d')),
            OrbitLabel::Dc(k) if indexed => format!("D{}{k}", rep('c')),
            OrbitLabel::Dw(k) if indexed => format!("D{}{k}", rep('w')),
            OrbitLabel::Dc(_) => format!("D{}", rep('c')),
            OrbitLabel::Dw(_) => format!("D{}", rep('w')),
        }
    }
}

impl fmt::Display for OrbitLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrbitLabel::Atoms => write!(f, "M"),
            OrbitLabel::Vv => write!(f, "Vv_0"),
            OrbitLabel::Dd => write!(f, "Dd_0"),
            OrbitLabel::Dc(k) => write!(f, "Dc_{k}"),
            OrbitLabel::Dw(k) => write!(f, "Dw_{k}"),
        }
    }
}

impl Serialize for OrbitLabel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeOrbit {
    pub label: OrbitLabel,
    pub members: Minmatrix,
}

#[inline]
pub(crate) fn orbit_index_of(n: usize, idx: usize) -> usize {
    let s = idx >> n;
    let e = idx & ((1 << n) - 1);
    2 * e.count_ones() as usize - (e >> s & 1)
}

/// Label of a K[v,1] minterm from its signature `(ε_s, χ)`.
pub fn orbit_of(ctx: Context, idx: usize) -> Result<OrbitLabel> {
    let (s, e) = ctx.decode(idx)?;
    let own = e >> s & 1 == 1;
    let chi = e.count_ones() as usize;
    match (own, chi) {
        (false, 0) => Ok(OrbitLabel::Vv),
        (true, 1) => Ok(OrbitLabel::Dd),
        (false, k) => Ok(OrbitLabel::Dc(k)),
        (true, k) if k >= 2 => Ok(OrbitLabel::Dw(k - 1)),
        _ => Err(Error::Internal(format!("minterm {idx} has an impossible signature"))),
    }
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// `|ω|` for the orbit with canonical index `j` in K[v,1].
pub fn orbit_size(ctx: Context, j: usize) -> usize {
    let n = ctx.n();
    match OrbitLabel::from_index(j) {
        OrbitLabel::Vv | OrbitLabel::Dd | OrbitLabel::Atoms => n,
        OrbitLabel::Dc(k) | OrbitLabel::Dw(k) => n * binomial(n - 1, k),
    }
}

/// Orbits built straight from the signature rule, in canonical order.
pub fn orbit_closed_form(ctx: Context) -> Result<Vec<PrimeOrbit>> {
    if ctx.d() != 1 {
        return Err(Error::WrongDegree { expected: "1", found: ctx.d() });
    }
    let n = ctx.n();
    Ok((0..2 * n)
        .map(|j| PrimeOrbit {
            label: OrbitLabel::from_index(j),
            members: Minmatrix::from_bits(ctx, Bits::from_fn(ctx.universe_size(), |idx| orbit_index_of(n, idx) == j)),
        })
        .collect())
}

/// Worklist construction: take the lowest unassigned minterm, collect its
/// images under every prime, label the result, repeat. Orbits come back in
/// canonical order.
pub fn compute_orbits(ctx: Context) -> Result<Vec<PrimeOrbit>> {
    if ctx.d() > 1 {
        return Err(Error::WrongDegree { expected: "0 or 1", found: ctx.d() });
    }
    let fibers: Vec<Vec<u64>> = enumerate_primes(ctx.v())?.iter().map(|p| p.fibers()).collect();
    let mut assigned = Bits::zeros(ctx.universe_size());
    let mut out = Vec::new();
    while let Some(seed) = assigned.not().ones_iter().next() {
        let mut members = Minmatrix::empty(ctx);
        for f in &fibers {
            members = members.union(&minterm_image(ctx, f, seed)?)?;
        }
        assigned.or_with(members.bits());
        let label = if ctx.d() == 0 { OrbitLabel::Atoms } else { orbit_of(ctx, seed)? };
        for idx in members.members() {
            if ctx.d() == 1 && orbit_of(ctx, idx)? != label {
                return Err(Error::Internal(format!("orbit of {seed} mixes signatures")));
            }
        }
        out.push(PrimeOrbit { label, members });
    }
    out.sort_by_key(|o| o.label.index());
    Ok(out)
}
