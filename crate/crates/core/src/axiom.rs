//! Defining axioms of lattice coordinates, system identification and the
//! registry of named systems.

use serde::Serialize;

use crate::context::{enumerate_e, Context, Sign, DEFAULT_UNIVERSE_CAP};
use crate::error::{Error, Result};
use crate::formula::{parse_registry, Formula};
use crate::lattice::{
    collapse_standard, coord_of_orbits, enumerate_coords, map_to_star, orbits_of_coord, orbits_of_matrix, Axis,
    OrbitSet, Plane, SystemCoord,
};
use crate::minmatrix::normalize;

/// Section `n-1` minterm indices kept by `α_{S_K(x,y)}`.
fn alpha_section(ctx: Context, x: i32, y: i32) -> impl Iterator<Item = usize> {
    let n = ctx.n();
    let top = n - 1;
    (0..1u64 << n).filter_map(move |e| {
        let chi = e.count_ones() as i32;
        let own = e >> top & 1 == 1;
        let keep = if own { y >= 0 && chi <= y + 1 } else { chi <= x };
        keep.then_some(top << n | e as usize)
    })
}

fn positive_prefix(v: u32) -> Formula {
    Context::new(v, 0).expect("level 0 always fits").minterm_formula((1 << v) - 1)
}

fn resolved(x: Axis, y: Axis, v: u32) -> Result<(Context, i32, i32)> {
    let ctx = Context::new(v, 1)?;
    let (x, y) = SystemCoord::new(Plane::K, x, y).resolve(ctx.n())?;
    Ok((ctx, x, y))
}

/// `α_{S_K(x,y)} = m_{n-1} → Σ μ_j` over the positive-section minterms with
/// `ε_{n-1} = 0, χ ≤ x` or `ε_{n-1} = 1, χ ≤ y+1`.
pub fn alpha_k(x: Axis, y: Axis, v: u32) -> Result<Formula> {
    let (ctx, x, y) = resolved(x, y, v)?;
    let body = Formula::or_all(alpha_section(ctx, x, y).collect::<Vec<_>>().into_iter().rev().map(|i| ctx.minterm_formula(i)));
    Ok(Formula::implies(positive_prefix(v), body))
}

/// `α_{S_D(x,y)} = ◇1 · α_{S_K(x,y)}`.
pub fn alpha_d(x: Axis, y: Axis, v: u32) -> Result<Formula> {
    Ok(Formula::and(Formula::diamond(Formula::Const1), alpha_k(x, y, v)?))
}

fn box_sum(v: u32, k: usize) -> Result<Formula> {
    if k == 0 {
        return Ok(Formula::Const0);
    }
    Ok(Formula::or_all(enumerate_e(v, k, Sign::Positive)?.iter().map(|e| Formula::boxed(e.to_formula()))))
}

/// `α′ = m_{n-1} → !◇m_{n-1} Σ_{E⁺(x+1)} □e + ◇m_{n-1} Σ_{E⁺(y+1)} □e`.
pub fn alpha_prime_k(x: Axis, y: Axis, v: u32) -> Result<Formula> {
    let (_, x, y) = resolved(x, y, v)?;
    let top = positive_prefix(v);
    let dia = Formula::diamond(top.clone());
    let blind = Formula::and(Formula::not(dia.clone()), box_sum(v, (x + 1) as usize)?);
    let sees = Formula::and(dia, box_sum(v, (y + 1) as usize)?);
    Ok(Formula::implies(top, Formula::or(blind, sees)))
}

/// `α` for either plane.
pub fn alpha(c: SystemCoord, v: u32) -> Result<Formula> {
    match c.plane {
        Plane::K => alpha_k(c.x, c.y, v),
        Plane::D => alpha_d(c.x, c.y, v),
    }
}

/// `α′` for either plane; the D form prefixes `◇1`.
pub fn alpha_prime(c: SystemCoord, v: u32) -> Result<Formula> {
    let a = alpha_prime_k(c.x, c.y, v)?;
    Ok(match c.plane {
        Plane::K => a,
        Plane::D => Formula::and(Formula::diamond(Formula::Const1), a),
    })
}

/// Orbit set reached by collapsing `f` in K[v,1].
pub fn collapsed_orbits(f: &Formula, ctx: Context) -> Result<OrbitSet> {
    let cmm = collapse_standard(&normalize(f, ctx)?)?;
    orbits_of_matrix(&cmm)?.ok_or_else(|| Error::Internal(format!("collapse of {f} is not a union of prime orbits")))
}

/// Result of [`system_of`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SystemReport {
    /// Variables of the context the formula was normalized in.
    pub context_v: u32,
    /// Coordinate inside that context, plain numbers.
    pub local: SystemCoord,
    /// Position in the assembled lattice.
    pub coord: SystemCoord,
    /// Smallest `v` whose lattice already holds `coord`.
    pub origin_v: u32,
    pub orbits: OrbitSet,
    pub name: Option<&'static str>,
}

/// The K[v,1]-system of a degree ≤ 1 formula, `v` being its variable count
/// (at least 1).
pub fn system_of(f: &Formula) -> Result<SystemReport> {
    system_of_with_cap(f, DEFAULT_UNIVERSE_CAP)
}

pub fn system_of_with_cap(f: &Formula, cap: u64) -> Result<SystemReport> {
    let degree = f.modal_degree();
    if degree > 1 {
        return Err(Error::DegreeOverflow { degree, max: 1 });
    }
    let v = f.variables().max(1);
    let ctx = Context::with_cap(v, 1, cap)?;
    let orbits = collapsed_orbits(f, ctx)?;
    let local = coord_of_orbits(orbits, ctx.n())
        .ok_or_else(|| Error::Internal(format!("fixpoint {} is not a coordinate CMM", orbits.display(v))))?;
    let coord = map_to_star(local, v)?;
    let origin_v = (1..=v).find(|&w| star_coords(w).contains(&coord)).unwrap_or(v);
    let name = lookup(coord).map(|s| s.name);
    Ok(SystemReport { context_v: v, local, coord, origin_v, orbits, name })
}

fn star_coords(v: u32) -> Vec<SystemCoord> {
    enumerate_coords(v).into_iter().map(|c| map_to_star(c, v).expect("enumerated")).collect()
}

/// The axiom a registry variant is added to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Base {
    K,
    D,
    T,
}

impl Base {
    pub fn formula(self) -> Formula {
        match self {
            Base::K => Formula::Const1,
            Base::D => Formula::diamond(Formula::Const1),
            Base::T => Formula::implies(Formula::boxed(Formula::var(0)), Formula::var(0)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Variant {
    /// Variables of the context the variant is listed for.
    pub context_v: u32,
    pub base: Base,
    pub text: &'static str,
}

impl Variant {
    /// Base and extra axiom as one formula.
    pub fn formula(&self) -> Result<Formula> {
        let extra = parse_registry(self.text)?;
        Ok(match self.base {
            Base::K => extra,
            b => Formula::and(b.formula(), extra),
        })
    }

    pub fn collapsed_orbits(&self) -> Result<OrbitSet> {
        collapsed_orbits(&self.formula()?, Context::new(self.context_v, 1)?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NamedSystem {
    pub name: &'static str,
    pub coord: SystemCoord,
    pub origin_v: u32,
    /// Alternative label used in the reference tables, where it differs.
    pub tabulated_label: Option<&'static str>,
    pub variants: Vec<Variant>,
}

impl NamedSystem {
    /// Orbit set of the system inside K[v,1], `v ≥ origin_v`.
    pub fn orbits(&self, v: u32) -> Result<OrbitSet> {
        orbits_of_coord(self.coord, 1 << v)
    }
}

struct Entry {
    name: &'static str,
    plane: Plane,
    x: Axis,
    y: Axis,
    origin: u32,
    label: Option<&'static str>,
    variants: &'static [(u32, Base, &'static str)],
}

const S: Axis = Axis::Star;

const fn n(x: i32) -> Axis {
    Axis::Num(x)
}

const fn e(
    name: &'static str,
    plane: Plane,
    x: Axis,
    y: Axis,
    origin: u32,
    variants: &'static [(u32, Base, &'static str)],
) -> Entry {
    Entry { name, plane, x, y, origin, label: None, variants }
}

use Base::{D as BD, K as BK, T as BT};
use Plane::{D as PD, K as PK};

#[rustfmt::skip]
static LOW: &[Entry] = &[
    e("K", PK, S, S, 1, &[(1, BK, "1"), (2, BK, "1")]),
    e("D", PD, S, S, 1, &[(1, BK, "<>1"), (1, BK, "[]p-><>p"), (2, BK, "[](pq)-><>(pq)")]),
    e("K_t", PK, n(0), S, 1, &[(1, BK, "p-><>p+[]p"), (2, BK, "pq-><>(pq)+[](pq)")]),
    e("T", PD, n(0), S, 1, &[(1, BK, "p-><>p"), (1, BK, "[]p->p"), (2, BK, "[](pq)->pq")]),
    Entry { label: Some("S_K(0,1)"), ..e("K_u", PK, n(1), n(0), 1, &[(1, BK, "<>p->[]p"), (2, BK, "<>p->[]p")]) },
    Entry { label: Some("S_D(0,1)"), ..e("U", PD, n(1), n(0), 1, &[(1, BK, "<>p<->[]p"), (2, BD, "<>p<->[]p")]) },
    e("K_triv", PK, n(0), n(0), 1, &[(1, BK, "<>p->p"), (1, BK, "p->[]p"), (2, BK, "p->[]p")]),
    e("Triv", PD, n(0), n(0), 1, &[(1, BK, "<>p<->p"), (1, BK, "p<->[]p"), (2, BD, "p<->[]p")]),
    e("Ver", PK, n(0), n(-1), 1, &[(1, BK, "!<>1"), (2, BK, "!<>1")]),
    e("F", PD, n(0), n(-1), 1, &[(1, BK, "0"), (2, BK, "0")]),

    e("KW9", PK, n(2), S, 2, &[
        (2, BK, "pq<>p<>q-><>(pq)+[](p+q)"),
        (2, BK, "pq-><>(pq)+[](p->q)+[](q->p)+[](p+q)"),
    ]),
    e("DW9", PD, n(2), S, 2, &[(2, BD, "pq<>p<>q-><>(pq)+[](p+q)")]),
    e("KW8", PK, n(1), S, 2, &[
        (2, BK, "pq<>p<>q-><>(pq)"),
        (2, BK, "p<>q-><>p+[]q"),
        (2, BK, "pq<>p<>(p->q)-><>q"),
        (2, BK, "pq<>q-><>(pq)+[](p+q)"),
        (2, BK, "pq<>(p->q)<>(q->p)-><>(p<->q)"),
        (2, BK, "pq-><>(pq)+[](p->q)+[](q->p)"),
    ]),
    e("DW8", PD, n(1), S, 2, &[
        (2, BD, "pq<>p<>q-><>(pq)"),
        (2, BK, "pq-><>(pq)+(<>p<->[]p)"),
        (2, BK, "pq([]p<->[]q)-><>(p<->q)"),
        (2, BK, "pq[](p<->q)->(<>p<-><>q)"),
    ]),
    e("KW7", PK, n(3), n(2), 2, &[(2, BK, "<>(pq)->[](p->q)+[](q->p)+[](p+q)")]),
    e("DW7", PD, n(3), n(2), 2, &[(2, BD, "<>(pq)->[](p->q)+[](q->p)+[](p+q)")]),
    e("KW6", PK, n(2), n(2), 2, &[(2, BK, "pq->[](p->q)+[](q->p)+[](p+q)")]),
    e("DW6", PD, n(2), n(2), 2, &[(2, BD, "pq->[](p->q)+[](q->p)+[](p+q)")]),
    e("KW5", PK, n(2), n(1), 2, &[
        (2, BK, "<>p<>q-><>(pq)+[](p+q)"),
        (2, BK, "<>(pq)->[](p->q)+[](q->p)"),
        (2, BK, "<>(pq)([]p->[]q)->[](p->q)"),
        (2, BK, "<>(pq)[](p+q)-><>p[]q+<>q[]p"),
        (2, BK, "[](p->q)+[](q->p)+[](p+q)"),
    ]),
    e("DW5", PD, n(2), n(1), 2, &[(2, BD, "<>p<>q-><>(pq)+[](p+q)")]),
    e("KW4", PK, n(1), n(2), 2, &[
        (2, BK, "pq->[](p->q)+[](q->p)+<>(pq)[](p+q)"),
        (2, BK, "pq<>p-><>q([](q->p)+[](p->q))+[](p+q)"),
    ]),
    e("DW4", PD, n(1), n(2), 2, &[(2, BD, "pq->[](p->q)+[](q->p)+<>(pq)[](p+q)")]),
    e("KW3", PK, n(1), n(1), 2, &[
        (2, BK, "pq->[](p->q)+[](q->p)"),
        (2, BK, "pq->[](p<->q)+[](p+q)"),
        (2, BK, "pq[](p+q)->[]p+[]q"),
        (2, BK, "pq([]p->[]q)->[](p->q)"),
        (2, BK, "p<>q-><>(pq)+[](p+q)"),
        (2, BK, "p+q+[](p->q)+[](q->p)"),
    ]),
    e("DW3", PD, n(1), n(1), 2, &[
        (2, BD, "pq->[](p->q)+[](q->p)"),
        (2, BK, "pq[](p+q)-><>p[]p+<>q[]q"),
        (2, BK, "pq-><>(p->q)[](p->q)+<>(q->p)[](q->p)"),
    ]),
    e("KW2", PK, n(0), n(2), 2, &[
        (2, BK, "pq-><>(pq)([](p->q)+[](q->p))+[](p+q)"),
        (2, BK, "pq-><>p[](p->q)+<>q[](q->p)+[](p+q)"),
    ]),
    e("DW2", PD, n(0), n(2), 2, &[
        (2, BD, "pq-><>(pq)([](p->q)+[](q->p))+[](p+q)"),
        (2, BT, "pq->[](p->q)+[](q->p)+[](p+q)"),
        (2, BK, "pq-><>(pq)([](p->q)+[](q->p)+[](p+q))"),
    ]),
    e("KW1", PK, n(0), n(1), 2, &[
        (2, BK, "pq-><>(pq)[](p<->q)+[](p+q)"),
        (2, BK, "pq->[](p<->q)+<>p<>q[](p+q)"),
    ]),
    e("DW1", PD, n(0), n(1), 2, &[
        (2, BD, "pq-><>(pq)[](p<->q)+[](p+q)"),
        (2, BT, "pq->[](p->q)+[](q->p)"),
        (2, BK, "pq-><>p[](p->q)+<>q[](q->p)"),
    ]),
];

/// K-plane systems new in K[3,1]. Each has a D-plane twin obtained by adding
/// the axiom `◇1`.
#[rustfmt::skip]
static HIGH: &[(&str, &str, Axis, Axis, &[&str])] = &[
    ("KWZ9", "DWZ9", n(6), S, &["pqr-><>(pqr)+Σ°([](p->q+r)+[](qr->p))+[](p+q+r)"]),
    ("KWZ8", "DWZ8", n(5), S, &[
        "pqr-><>(pqr)+Σ°([](p->q+r)+[](qr->p))",
        "pqr-><>(pqr)+Σ°([](p+(q<->r))+[](qr->p))+[](p+q+r)",
    ]),
    ("KWZ7", "DWZ7", n(4), S, &["pqr-><>(pqr)+Σ°([](p+(q<->r))+[](qr->p))"]),
    ("KWZ6", "DWZ6", n(3), S, &["pqr-><>(pqr)+Σ°[](p->q)+[](p+q+r)"]),
    ("KWZ5", "DWZ5", n(7), n(6), &["<>(pqr)->Σ°([](p->q+r)+[](qr->p))+[](p+q+r)"]),
    ("KWZ4", "DWZ4", n(6), n(6), &["pqr->Σ°([](p->q+r)+[](qr->p))+[](p+q+r)"]),
    ("KWZ3", "DWZ3", n(6), n(5), &[
        "<>(pqr)->Σ°([](p->q+r)+[](qr->p))",
        "Σ°([](p->q+r)+[](qr->p))+[](p+q+r)",
    ]),
    ("KWZ2", "DWZ2", n(5), n(6), &["pqr-><>(pqr)[](p+q+r)+Σ°([](p->q+r)+[](qr->p))"]),
    ("KWZ1", "DWZ1", n(5), n(5), &[
        "pqr->Σ°([](p->q+r)+[](qr->p))",
        "pqr->Σ°([](p+(q<->r))+[](qr->p))+[](p+q+r)",
    ]),
    ("KWZ0", "DWZ0", n(4), n(6), &["pqr-><>(pqr)(Σ°[](qr->p)+[](p+q+r))+Σ°([](p+(q<->r))+[](qr->p))"]),
    ("KWY9", "DWY9", n(4), n(5), &["pqr-><>(pqr)[](p+q+r)+Σ°([](p+(q<->r))+[](qr->p))"]),
    ("KWY8", "DWY8", n(3), n(6), &[
        "pqr-><>(pqr)Σ°[](p->q+r)+Σ°[](qr->p)+[](p+q+r)",
        "pqr-><>(pqr)Σ°[](qr->p)+Σ°[](p->q+r)+[](p+q+r)",
    ]),
    ("KWY7", "DWY7", n(3), n(5), &["pqr-><>(pqr)Σ°[](p->q+r)+Σ°([](qr->p)+[](q+r))"]),
    ("KWY6", "DWY6", n(2), n(6), &[
        "∏°p<>p-><>(pqr)Σ°[](qr->p)+Σ°[](p->q+r)+[](p+q+r)",
        "pqr-><>(pqr)Σ°([](p->q+r)+[](qr->p))+Σ°[](p<->q)+[](p+q+r)",
    ]),
    ("KWY5", "DWY5", n(2), n(5), &[
        "pqr-><>(pqr)Σ°[](p->q+r)+Σ°[](qr->p)",
        "pqr-><>(pqr)Σ°[](qr->p)+Σ°[](p->q+r)",
    ]),
    ("KWY4", "DWY4", n(1), n(6), &[
        "∏°p<>p-><>(pqr)(Σ°([](p->q+r)+[](qr->p))+[](p+q+r))",
        "pqr-><>(pqr)(Σ°([](p->q+r)+[](qr->p))+[](p+q+r))+Σ°[](p<->q)",
    ]),
    ("KWY3", "DWY3", n(1), n(5), &[
        "∏°p<>p-><>(pqr)Σ°([](p->q+r)+[](qr->p))",
        "pqr-><>(pqr)Σ°([](p->q+r)+[](qr->p))+Σ°[](p<->q)",
    ]),
    ("KWY2", "DWY2", n(0), n(6), &[
        "pqr-><>(pqr)Σ°([](p->q+r)+[](qr->p))+[](p+q+r)",
        "pqr->Σ°<>p([](p->q+r)+[](qr->p))+[](p+q+r)",
    ]),
    ("KWY1", "DWY1", n(0), n(5), &[
        "pqr-><>(pqr)Σ°([](p->q+r)+[](qr->p))+[](pqr)",
        "pqr->Σ°<>p([](p->q+r)+[](qr->p))+[](pqr)",
        "<>(pqr)->Σ°<>p([](p->q+r)+[](qr->p))",
    ]),
    ("KWY0", "DWY0", n(5), n(4), &[
        "Σ°([](p->q+r)+[](qr->p))",
        "Σ°([](p+(q<->r))+[](qr->p))+[](p+q+r)",
        "<>(pqr)->Σ°([](p->q+r)+[](p+(q<->r)))",
    ]),
    ("KWX9", "DWX9", n(4), n(4), &[
        "pqr->Σ°([](p->q+r)+[](p+(q<->r)))",
        "pqr->Σ°([](p+(q<->r))+[](p->(q<->r)))+[](p+q+r)",
    ]),
    ("KWX8", "DWX8", n(4), n(3), &[
        "<>(pqr)->Σ°[](p->q)+[](p+q+r)",
        "<>(pqr)->Σ°[](p->q+r)+[](p+q+r)",
        "<>(pqr)->Σ°[](qr->p)+[](p+q+r)",
        "<>(pqr)->Σ°([](qr->p)+[](q+r))",
        "<>(pqr)->Σ°([](p->q+r)+[](q+r->p))+[](p+q+r)",
        "Σ°([](p->q+r)+[](p->(q<->r)))",
    ]),
    ("KWX7", "DWX7", n(3), n(4), &[
        "pqr-><>(pqr)Σ°[](p->q+r)+Σ°([](pq<->pr)+[](p+(q<->r)))",
        "pqr->(<>(pqr)+[](p+q+r))Σ°[](p->q+r)+Σ°([](pq<->pr)+[](p->q))",
    ]),
    ("KWX6", "DWX6", n(3), n(3), &[
        "Σ°[](p->q)+[](p+q+r)",
        "Σ°[](p->q+r)+[](p+q+r)",
        "Σ°[](qr->p)+[](p+q+r)",
    ]),
    ("KWX5", "DWX5", n(2), n(4), &["pqr-><>(pqr)Σ°[](p->q+r)+Σ°([](pq<->pr)+[]p)"]),
    ("KWX4", "DWX4", n(2), n(3), &[
        "pqr-><>(pqr)[](p+q+r)+Σ°[](p->q)",
        "pqr-><>(pqr)Σ°[](p->q)+Σ°[](p<->q)+[](p+q+r)",
        "∏°p<>p-><>(pqr)Σ°[](p->q)+[](p+q+r)",
    ]),
    ("KWX3", "DWX3", n(1), n(4), &[
        "pqr-><>(pqr)Σ°[](qr->p)+Σ°[](p+(q<->r))",
        "pqr-><>(pqr)Σ°[](p->q+r)+Σ°[](pq<->pr)",
    ]),
    ("KWX2", "DWX2", n(1), n(3), &[
        "pqr-><>(pqr)(Σ°[](p->q)+[](p+q+r))+Σ°[](p<->q)",
        "∏°p<>p-><>(pqr)(Σ°[](p->q)+[](p+q+r))",
    ]),
    ("KWX1", "DWX1", n(0), n(4), &[
        "pqr-><>(pqr)Σ°([](qr->p)+[](p+(q<->r)))+[](pqr)",
        "pqr-><>(pqr)Σ°([](p->q+r)+[](p->(q<->r)))+[](pqr)",
        "Σ°(<>p[]p->p)([](p->q+r)+[](qr->p))",
    ]),
    ("KWX0", "DWX0", n(0), n(3), &[
        "pqr-><>(pqr)Σ°[](q->r)+[](p+q+r)",
        "pqr->Σ°<>p[](q->r)+[](p+q+r)",
        "pqr->Σ°<>p[](qr->p)+[](p+q+r)",
        "pqr->Σ°<>p[](p->q+r)+[](p+q+r)",
    ]),
];

fn build_registry() -> Vec<NamedSystem> {
    let mut out: Vec<NamedSystem> = LOW
        .iter()
        .map(|en| NamedSystem {
            name: en.name,
            coord: SystemCoord::new(en.plane, en.x, en.y),
            origin_v: en.origin,
            tabulated_label: en.label,
            variants: en.variants.iter().map(|&(context_v, base, text)| Variant { context_v, base, text }).collect(),
        })
        .collect();
    for (plane, base) in [(Plane::K, Base::K), (Plane::D, Base::D)] {
        for &(kname, dname, x, y, texts) in HIGH {
            out.push(NamedSystem {
                name: if plane == Plane::K { kname } else { dname },
                coord: SystemCoord::new(plane, x, y),
                origin_v: 3,
                tabulated_label: None,
                variants: texts.iter().map(|&text| Variant { context_v: 3, base, text }).collect(),
            });
        }
    }
    out
}

fn registry() -> &'static [NamedSystem] {
    static REG: std::sync::OnceLock<Vec<NamedSystem>> = std::sync::OnceLock::new();
    REG.get_or_init(build_registry)
}

/// Named systems of K[v,1] (`v ≤ 3`) with the variants listed for contexts up
/// to `v`.
pub fn named_systems(v: u32) -> Vec<NamedSystem> {
    registry()
        .iter()
        .filter(|s| s.origin_v <= v)
        .map(|s| NamedSystem { variants: s.variants.iter().copied().filter(|x| x.context_v <= v).collect(), ..s.clone() })
        .collect()
}

/// The registry entry at an assembled-lattice coordinate.
pub fn lookup(coord: SystemCoord) -> Option<&'static NamedSystem> {
    registry().iter().find(|s| s.coord == coord)
}
