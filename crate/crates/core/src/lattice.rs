//! Characteristic minmatrices (CMMs) of K[v,1] systems and their lattice.
//!
//! A CMM is a union of prime orbits. Its coordinate `(plane, x, y)` records
//! whether `Vv_0` is present (plane K) or not (plane D), the number `x` of
//! `Dc` orbits and the number `y` of `Dw` orbits, with `y = -1` meaning that
//! `Dd_0` is absent too.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::bits::Bits;
use crate::context::Context;
use crate::error::{Error, Result};
use crate::minmatrix::Minmatrix;
use crate::orbit::{orbit_index_of, OrbitLabel};
use crate::substitution::{
    all_substitutions, apply_minmatrix, critical_substitution, enumerate_primes, prime_generators, Coverage, Kernel,
    Substitution,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Plane {
    K,
    D,
}

impl fmt::Display for Plane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Plane::K => "K",
            Plane::D => "D",
        })
    }
}

impl FromStr for Plane {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "K" | "k" => Ok(Plane::K),
            "D" | "d" => Ok(Plane::D),
            _ => Err(Error::InvalidCoordinate(format!("plane must be K or D, got {s:?}"))),
        }
    }
}

/// A coordinate value: a number, or `*` (above every finite bound).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    Num(i32),
    Star,
}

impl Axis {
    /// Value inside a context with `n` level-0 minterms (`*` reads as `n-1`).
    pub fn resolve(self, n: usize) -> i32 {
        match self {
            Axis::Num(x) => x,
            Axis::Star => n as i32 - 1,
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axis::Num(x) => write!(f, "{x}"),
            Axis::Star => f.write_str("*"),
        }
    }
}

impl FromStr for Axis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s == "*" || s.eq_ignore_ascii_case("star") {
            return Ok(Axis::Star);
        }
        s.parse().map(Axis::Num).map_err(|_| Error::InvalidCoordinate(format!("bad axis value {s:?}")))
    }
}

impl Serialize for Axis {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Axis::Num(x) => s.serialize_i32(*x),
            Axis::Star => s.serialize_str("*"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SystemCoord {
    pub plane: Plane,
    pub x: Axis,
    pub y: Axis,
}

impl SystemCoord {
    pub fn new(plane: Plane, x: Axis, y: Axis) -> Self {
        SystemCoord { plane, x, y }
    }

    pub fn num(plane: Plane, x: i32, y: i32) -> Self {
        SystemCoord { plane, x: Axis::Num(x), y: Axis::Num(y) }
    }

    /// Checks the coordinate against a context with `n` level-0 minterms and
    /// returns the resolved `(x, y)`.
    pub fn resolve(&self, n: usize) -> Result<(i32, i32)> {
        let (x, y) = (self.x.resolve(n), self.y.resolve(n));
        let top = n as i32 - 1;
        let bad = |why: &str| Err(Error::InvalidCoordinate(format!("{self} for n = {n}: {why}")));
        if !(0..=top).contains(&x) {
            return bad("x outside 0..=n-1");
        }
        if !(-1..=top).contains(&y) {
            return bad("y outside -1..=n-1");
        }
        if x > y + 1 {
            return bad("x > y+1");
        }
        Ok((x, y))
    }
}

impl fmt::Display for SystemCoord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.plane, self.x, self.y)
    }
}

/// A set of prime orbits, bit `j` for canonical orbit index `j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct OrbitSet(pub u64);

impl OrbitSet {
    pub fn contains(self, l: OrbitLabel) -> bool {
        self.0 >> l.index() & 1 == 1
    }

    pub fn insert(&mut self, l: OrbitLabel) {
        self.0 |= 1 << l.index();
    }

    pub fn labels(self) -> impl Iterator<Item = OrbitLabel> {
        (0..64).filter(move |j| self.0 >> j & 1 == 1).map(OrbitLabel::from_index)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: OrbitSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: OrbitSet) -> OrbitSet {
        OrbitSet(self.0 | other.0)
    }

    pub fn intersection(self, other: OrbitSet) -> OrbitSet {
        OrbitSet(self.0 & other.0)
    }

    /// `Vv+Dd+Dw` style listing with the table names for `v` variables.
    pub fn display(self, v: u32) -> String {
        if self.is_empty() {
            return "[ ]".into();
        }
        let names: Vec<String> = self.labels().map(|l| l.display_name(v)).collect();
        names.join("+")
    }

    /// The minterms of these orbits in K[v,1].
    pub fn matrix(self, ctx: Context) -> Minmatrix {
        let n = ctx.n();
        Minmatrix::from_bits(ctx, Bits::from_fn(ctx.universe_size(), |idx| self.0 >> orbit_index_of(n, idx) & 1 == 1))
    }
}

impl Serialize for OrbitSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.labels())
    }
}

/// The orbits making up `m`, or `None` if some orbit is only partly present.
pub fn orbits_of_matrix(m: &Minmatrix) -> Result<Option<OrbitSet>> {
    let ctx = m.context();
    if ctx.d() != 1 {
        return Err(Error::WrongDegree { expected: "1", found: ctx.d() });
    }
    let n = ctx.n();
    let mut hit = vec![0usize; 2 * n];
    for idx in m.members() {
        hit[orbit_index_of(n, idx)] += 1;
    }
    let mut set = OrbitSet::default();
    for (j, &h) in hit.iter().enumerate() {
        if h == crate::orbit::orbit_size(ctx, j) {
            set.0 |= 1 << j;
        } else if h != 0 {
            return Ok(None);
        }
    }
    Ok(Some(set))
}

/// DR1: a non-empty set holds `Vv_0` or `Dd_0`. DR2: `Dw_k` needs `Dd_0`
/// and `Dw_1..Dw_{k-1}`. DR3: `Dc_k` needs `Dd_0`, `Dw_1..Dw_{k-1}` and
/// `Dc_1..Dc_{k-1}`.
pub fn satisfies_dependency_rules(set: OrbitSet, n: usize) -> bool {
    if set.0 >> (2 * n) != 0 {
        return false;
    }
    let has = |l| set.contains(l);
    if !set.is_empty() && !has(OrbitLabel::Vv) && !has(OrbitLabel::Dd) {
        return false;
    }
    for k in 1..n {
        if has(OrbitLabel::Dw(k)) && (!has(OrbitLabel::Dd) || (1..k).any(|i| !has(OrbitLabel::Dw(i)))) {
            return false;
        }
        if has(OrbitLabel::Dc(k))
            && (!has(OrbitLabel::Dd) || (1..k).any(|i| !has(OrbitLabel::Dw(i)) || !has(OrbitLabel::Dc(i))))
        {
            return false;
        }
    }
    true
}

/// Orbit set of a coordinate; `*` reads as `n-1`.
pub fn orbits_of_coord(c: SystemCoord, n: usize) -> Result<OrbitSet> {
    let (x, y) = c.resolve(n)?;
    let mut set = OrbitSet::default();
    if c.plane == Plane::K {
        set.insert(OrbitLabel::Vv);
    }
    if y >= 0 {
        set.insert(OrbitLabel::Dd);
        for k in 1..=y as usize {
            set.insert(OrbitLabel::Dw(k));
        }
    }
    for k in 1..=x as usize {
        set.insert(OrbitLabel::Dc(k));
    }
    Ok(set)
}

/// Inverse of [`orbits_of_coord`] with plain numbers, if the set has the
/// prefix shape of a coordinate.
pub fn coord_of_orbits(set: OrbitSet, n: usize) -> Option<SystemCoord> {
    let plane = if set.contains(OrbitLabel::Vv) { Plane::K } else { Plane::D };
    let y = if set.contains(OrbitLabel::Dd) {
        (1..n).take_while(|&k| set.contains(OrbitLabel::Dw(k))).count() as i32
    } else {
        -1
    };
    let x = (1..n).take_while(|&k| set.contains(OrbitLabel::Dc(k))).count() as i32;
    let c = SystemCoord::num(plane, x, y);
    (c.resolve(n).is_ok() && orbits_of_coord(c, n).ok() == Some(set)).then_some(c)
}

/// The assembled-lattice position: `(x, n-1) ↦ (x, *)` for `x ≤ n-2` and
/// `(n-1, n-1) ↦ (*, *)`; everything else is unchanged.
pub fn map_to_star(c: SystemCoord, v: u32) -> Result<SystemCoord> {
    let n = 1usize << v;
    let (x, y) = c.resolve(n)?;
    let top = n as i32 - 1;
    Ok(match (x, y) {
        (x, y) if y == top && x == top => SystemCoord::new(c.plane, Axis::Star, Axis::Star),
        (x, y) if y == top => SystemCoord::new(c.plane, Axis::Num(x), Axis::Star),
        _ => SystemCoord::num(c.plane, x, y),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cmm {
    /// Coordinate inside the context, with plain numbers.
    pub coord: SystemCoord,
    pub orbits: OrbitSet,
    pub matrix: Minmatrix,
}

impl Cmm {
    pub fn star_coord(&self) -> SystemCoord {
        map_to_star(self.coord, self.matrix.context().v()).expect("enumerated coordinates are valid")
    }
}

pub fn cmm_from_coords(c: SystemCoord, v: u32) -> Result<Cmm> {
    let ctx = Context::new(v, 1)?;
    let n = ctx.n();
    let orbits = orbits_of_coord(c, n)?;
    let (x, y) = c.resolve(n)?;
    Ok(Cmm { coord: SystemCoord::num(c.plane, x, y), orbits, matrix: orbits.matrix(ctx) })
}

/// Every coordinate of K[v,1]: plane K first, then by `y`, then by `x`.
pub fn enumerate_coords(v: u32) -> Vec<SystemCoord> {
    let n = 1i32 << v;
    let mut out = Vec::new();
    for plane in [Plane::K, Plane::D] {
        for y in -1..n {
            for x in 0..=(y + 1).min(n - 1) {
                out.push(SystemCoord::num(plane, x, y));
            }
        }
    }
    out
}

pub fn enumerate_cmms(v: u32) -> Result<Vec<Cmm>> {
    if v > 3 {
        return Err(Error::Cap { what: format!("CMM enumeration for v = {v}"), cap: 3 });
    }
    enumerate_coords(v).into_iter().map(|c| cmm_from_coords(c, v)).collect()
}

/// Substitutions prepared for collapsing minmatrices of one context.
pub struct CollapseSet {
    ctx: Context,
    kernels: Vec<Kernel>,
}

impl CollapseSet {
    pub fn new(ctx: Context, subs: &[Substitution]) -> Result<Self> {
        let kernels = subs.iter().map(|s| Kernel::new(s, ctx)).collect::<Result<_>>()?;
        Ok(CollapseSet { ctx, kernels })
    }

    /// Primes plus the critical substitution. The primes enter through a
    /// generating pair: a bijection `ς` with `ξ ⊆ ξ∘ς` has `ξ = ξ∘ς`, so
    /// immunity to the generators is immunity to the whole group and the
    /// fixpoint is the same.
    pub fn standard(ctx: Context) -> Result<Self> {
        let mut subs = prime_generators(ctx.v());
        if ctx.v() > 0 {
            subs.push(critical_substitution(ctx.v())?);
        }
        Self::new(ctx, &subs)
    }

    /// Every prime listed explicitly, plus the critical substitution.
    pub fn all_primes(ctx: Context) -> Result<Self> {
        let mut subs = enumerate_primes(ctx.v())?;
        if ctx.v() > 0 {
            subs.push(critical_substitution(ctx.v())?);
        }
        Self::new(ctx, &subs)
    }

    /// All of S(v,0); available for `v ≤ 2`.
    pub fn exhaustive(ctx: Context) -> Result<Self> {
        if ctx.v() > 2 {
            return Err(Error::Cap { what: format!("exhaustive collapse for v = {}", ctx.v()), cap: 2 });
        }
        let subs: Vec<Substitution> = all_substitutions(ctx.v())?.collect();
        Self::new(ctx, &subs)
    }

    pub fn len(&self) -> usize {
        self.kernels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kernels.is_empty()
    }

    pub fn context(&self) -> Context {
        self.ctx
    }
}

/// Greatest fixpoint of `ξ ← ξ ∩ ξ∘σ` over the set, starting from `m`.
pub fn collapse(m: &Minmatrix, subs: &CollapseSet) -> Result<Minmatrix> {
    if m.context() != subs.ctx {
        let (a, b) = (m.context(), subs.ctx);
        return Err(Error::ContextMismatch(a.v(), a.d(), b.v(), b.d()));
    }
    let mut cur = m.bits().clone();
    loop {
        let before = cur.count();
        for k in &subs.kernels {
            let img = k.apply_bits(&cur);
            cur.and_with(&img);
        }
        if cur.count() == before {
            break;
        }
    }
    Ok(Minmatrix::from_bits(m.context(), cur))
}

/// Collapse under [`CollapseSet::standard`].
pub fn collapse_standard(m: &Minmatrix) -> Result<Minmatrix> {
    collapse(m, &CollapseSet::standard(m.context())?)
}

/// How orbit `i` covers orbit `j` under `s`, straight from the definition.
pub fn coverage(ctx: Context, i: OrbitLabel, j: OrbitLabel, s: &Substitution) -> Result<Coverage> {
    if ctx.d() != 1 {
        return Err(Error::WrongDegree { expected: "1", found: ctx.d() });
    }
    let single = |l: OrbitLabel| {
        let mut o = OrbitSet::default();
        o.insert(l);
        o.matrix(ctx)
    };
    let image = apply_minmatrix(&single(i), s)?;
    let target = single(j);
    let meet = image.intersection(&target)?;
    Ok(if meet.is_empty() {
        Coverage::None
    } else if meet == target {
        Coverage::Full
    } else {
        Coverage::Partial
    })
}

#[derive(Clone, Debug)]
pub struct HasseEdge {
    /// Index of the smaller CMM.
    pub lower: usize,
    pub upper: usize,
    pub orbit: OrbitLabel,
}

#[derive(Clone, Debug)]
pub struct Hasse {
    pub v: u32,
    pub nodes: Vec<Cmm>,
    pub edges: Vec<HasseEdge>,
}

pub fn build_hasse(v: u32) -> Result<Hasse> {
    let nodes = enumerate_cmms(v)?;
    let mut edges = Vec::new();
    for (a, lo) in nodes.iter().enumerate() {
        for (b, hi) in nodes.iter().enumerate() {
            let diff = hi.orbits.0 & !lo.orbits.0;
            if lo.orbits.is_subset(hi.orbits) && diff.count_ones() == 1 {
                edges.push(HasseEdge { lower: a, upper: b, orbit: OrbitLabel::from_index(diff.trailing_zeros() as usize) });
            }
        }
    }
    Ok(Hasse { v, nodes, edges })
}

impl Hasse {
    pub fn position(&self, orbits: OrbitSet) -> Option<usize> {
        self.nodes.iter().position(|c| c.orbits == orbits)
    }

    /// Least upper bound: the union.
    pub fn join(&self, a: usize, b: usize) -> Result<usize> {
        let u = self.nodes[a].orbits.union(self.nodes[b].orbits);
        self.position(u).ok_or_else(|| Error::Internal(format!("union {} is not a CMM", u.display(self.v))))
    }

    /// Greatest lower bound: the collapse of the intersection.
    pub fn meet(&self, a: usize, b: usize) -> Result<usize> {
        let m = self.nodes[a].matrix.intersection(&self.nodes[b].matrix)?;
        let c = collapse_standard(&m)?;
        let set = orbits_of_matrix(&c)?.ok_or_else(|| Error::Internal("collapse left a partial orbit".into()))?;
        self.position(set).ok_or_else(|| Error::Internal(format!("meet {} is not a CMM", set.display(self.v))))
    }

    pub fn bottom(&self) -> usize {
        self.position(OrbitSet::default()).expect("F is always present")
    }

    pub fn top(&self) -> usize {
        self.nodes.iter().enumerate().max_by_key(|(_, c)| c.orbits.len()).map(|(i, _)| i).expect("non-empty")
    }

    /// Graphviz rendering with one cluster per plane. `name` supplies an
    /// optional system name per node.
    pub fn to_dot(&self, name: impl Fn(&Cmm) -> Option<String>) -> String {
        let mut out = String::from("digraph cmm_lattice {\n  rankdir=BT;\n  node [shape=box, fontsize=10];\n");
        for plane in [Plane::K, Plane::D] {
            out.push_str(&format!("  subgraph cluster_{plane} {{\n    label=\"{plane}-plane\";\n"));
            for (i, c) in self.nodes.iter().enumerate().filter(|(_, c)| c.coord.plane == plane) {
                let mut label = c.star_coord().to_string();
                if let Some(n) = name(c) {
                    label = format!("{n}\\n{label}");
                }
                label.push_str(&format!("\\n{}", c.orbits.display(self.v)));
                out.push_str(&format!("    n{i} [label=\"{label}\"];\n"));
            }
            out.push_str("  }\n");
        }
        for e in &self.edges {
            out.push_str(&format!(
                "  n{} -> n{} [label=\"{}\", fontsize=8];\n",
                e.lower,
                e.upper,
                e.orbit.display_name(self.v)
            ));
        }
        out.push_str("}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;
    use crate::minmatrix::normalize;

    fn k11() -> Context {
        Context::new(1, 1).unwrap()
    }

    #[test]
    fn collapse_examples() {
        let t = normalize(&parse("[]p->p").unwrap(), k11()).unwrap();
        let c = collapse_standard(&t).unwrap();
        assert_eq!(c.members().rev().collect::<Vec<_>>(), vec![7, 6, 3, 1]);
        assert!(collapse_standard(&Minmatrix::full(k11())).unwrap().is_full());
        let dc_dw = Minmatrix::from_indices(k11(), [5, 2, 7, 3]).unwrap();
        let shrunk = collapse(&dc_dw, &CollapseSet::exhaustive(k11()).unwrap()).unwrap();
        assert!(shrunk.is_subset(&dc_dw).unwrap() && shrunk != dc_dw);
        assert!(shrunk.is_empty());
    }

    #[test]
    fn coordinates() {
        let kt = cmm_from_coords(SystemCoord::new(Plane::K, Axis::Num(0), Axis::Star), 1).unwrap();
        assert_eq!(kt.orbits.display(1), "Vv+Dd+Dw");
        assert_eq!(cmm_from_coords(SystemCoord::num(Plane::D, 0, 0), 1).unwrap().orbits.display(1), "Dd");
        let kw9 = cmm_from_coords(SystemCoord::new(Plane::K, Axis::Num(2), Axis::Star), 2).unwrap();
        assert_eq!(kw9.orbits.display(2), "Vvv+Ddd+Dcc1+Dww1+Dcc2+Dww2+Dww3");
        assert!(cmm_from_coords(SystemCoord::num(Plane::K, 2, 0), 2).is_err());
        assert!(cmm_from_coords(SystemCoord::num(Plane::K, 1, -1), 2).is_err());
        assert!(cmm_from_coords(SystemCoord::num(Plane::K, 0, 4), 2).is_err());
    }

    #[test]
    fn counts() {
        assert_eq!(enumerate_cmms(0).unwrap().len(), 4);
        assert_eq!(enumerate_cmms(1).unwrap().len(), 10);
        assert_eq!(enumerate_cmms(2).unwrap().len(), 28);
        assert_eq!(enumerate_cmms(3).unwrap().len(), 88);
    }

    #[test]
    fn star_mapping() {
        let star = |p, x, y, v| map_to_star(SystemCoord::num(p, x, y), v).unwrap().to_string();
        assert_eq!(star(Plane::K, 1, 1, 1), "(K,*,*)");
        assert_eq!(star(Plane::K, 0, 1, 1), "(K,0,*)");
        assert_eq!(star(Plane::K, 1, 2, 2), "(K,1,2)");
        assert_eq!(star(Plane::K, 3, 2, 2), "(K,3,2)");
        assert!(map_to_star(SystemCoord::num(Plane::K, 2, 0), 1).is_err());
    }

    #[test]
    fn coverage_under_identity_and_critical() {
        let ctx = Context::new(2, 1).unwrap();
        let id = Substitution::identity(2);
        let crit = critical_substitution(2).unwrap();
        for i in 0..8 {
            for j in 0..8 {
                let (a, b) = (OrbitLabel::from_index(i), OrbitLabel::from_index(j));
                let want = if i == j { Coverage::Full } else { Coverage::None };
                assert_eq!(coverage(ctx, a, b, &id).unwrap(), want);
            }
            let c = coverage(ctx, OrbitLabel::Vv, OrbitLabel::from_index(i), &crit).unwrap();
            assert_eq!(c, if i == 0 { Coverage::Full } else { Coverage::None });
        }
        assert_eq!(coverage(ctx, OrbitLabel::Dd, OrbitLabel::Dw(1), &crit).unwrap(), Coverage::Partial);
        assert_eq!(coverage(ctx, OrbitLabel::Dd, OrbitLabel::Dc(1), &crit).unwrap(), Coverage::Partial);
    }

    #[test]
    fn hasse_v1() {
        let h = build_hasse(1).unwrap();
        assert_eq!(h.nodes.len(), 10);
        assert!(h.nodes[h.bottom()].matrix.is_empty());
        assert!(h.nodes[h.top()].matrix.is_full());
        let find = |p, x, y| h.nodes.iter().position(|c| c.coord == SystemCoord::num(p, x, y)).unwrap();
        let (ver, f, triv, ktriv) = (find(Plane::K, 0, -1), find(Plane::D, 0, -1), find(Plane::D, 0, 0), find(Plane::K, 0, 0));
        assert!(h.edges.iter().any(|e| e.lower == f && e.upper == ver && e.orbit == OrbitLabel::Vv));
        assert_eq!(h.join(ver, triv).unwrap(), ktriv);
        assert_eq!(h.meet(ver, triv).unwrap(), f);
        assert!(h.to_dot(|_| None).contains("cluster_D"));
    }

    #[test]
    fn dependency_rules_match_coordinates() {
        for v in 0..=3u32 {
            let n = 1usize << v;
            let good: Vec<OrbitSet> = (0..1u64 << (2 * n)).map(OrbitSet).filter(|s| satisfies_dependency_rules(*s, n)).collect();
            let coords: Vec<OrbitSet> = enumerate_cmms(v).unwrap().iter().map(|c| c.orbits).collect();
            assert_eq!(good.len(), coords.len());
            assert!(good.iter().all(|s| coords.contains(s)));
            assert!(good.iter().all(|s| coord_of_orbits(*s, n).is_some()));
        }
    }
}
