//! Finite Kripke frames and models, frame conditions for the lattice
//! coordinates, and exhaustive correspondence checks.
//!
//! Worlds are numbered `0..|W|`; row `w` of a frame is the bit set of worlds
//! that `w` sees. A valuation assigns each world a level-0 minterm index.

use rayon::prelude::*;
use serde::Serialize;

use crate::axiom::alpha;
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::lattice::{map_to_star, Axis, Plane, SystemCoord};
use crate::substitution::in_pool;

/// Largest frame accepted by validity checks.
pub const MAX_VALID_WORLDS: usize = 6;
/// Largest world count for exhaustive frame enumeration.
pub const MAX_ENUM_WORLDS: usize = 5;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Frame {
    rows: Vec<u64>,
}

impl Frame {
    pub fn new(rows: Vec<u64>) -> Result<Self> {
        let w = rows.len();
        if w == 0 || w > 64 {
            return Err(Error::Range(format!("frame needs 1..=64 worlds, got {w}")));
        }
        if w < 64 && rows.iter().any(|r| r >> w != 0) {
            return Err(Error::Range("relation row names a missing world".into()));
        }
        Ok(Frame { rows })
    }

    /// Frame number `idx` among the `2^(w²)` labeled digraphs on `w` worlds:
    /// bit `a*w + b` of `idx` is `aRb`.
    pub fn from_index(worlds: usize, idx: u64) -> Self {
        let mask = (1u64 << worlds) - 1;
        Frame { rows: (0..worlds).map(|a| idx >> (a * worlds) & mask).collect() }
    }

    pub fn worlds(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    pub fn sees(&self, a: usize, b: usize) -> bool {
        self.rows[a] >> b & 1 == 1
    }

    pub fn is_reflexive(&self, w: usize) -> bool {
        self.sees(w, w)
    }

    /// Number of worlds other than `w` that `w` sees.
    pub fn others(&self, w: usize) -> u32 {
        (self.rows[w] & !(1u64 << w)).count_ones()
    }

    pub fn is_blind(&self, w: usize) -> bool {
        self.rows[w] == 0
    }

    pub fn is_serial(&self) -> bool {
        self.rows.iter().all(|&r| r != 0)
    }

    /// Worlds seeing some member of `set`.
    fn diamond(&self, set: u64) -> u64 {
        self.rows.iter().enumerate().fold(0, |acc, (w, &r)| acc | ((r & set != 0) as u64) << w)
    }
}

/// Number of labeled frames on `worlds` worlds.
pub fn frame_count(worlds: usize) -> Result<u64> {
    if worlds == 0 || worlds > MAX_ENUM_WORLDS {
        return Err(Error::Cap { what: format!("frame enumeration over {worlds} worlds"), cap: MAX_ENUM_WORLDS as u64 });
    }
    Ok(1u64 << (worlds * worlds))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Model {
    pub frame: Frame,
    /// Number of propositional variables.
    pub v: u32,
    /// Level-0 minterm holding at each world.
    pub valuation: Vec<usize>,
}

impl Model {
    pub fn new(frame: Frame, v: u32, valuation: Vec<usize>) -> Result<Self> {
        if valuation.len() != frame.worlds() {
            return Err(Error::Range(format!("{} valuations for {} worlds", valuation.len(), frame.worlds())));
        }
        if v > 6 || valuation.iter().any(|&m| m >> v != 0) {
            return Err(Error::Range("valuation outside the level-0 minterms".into()));
        }
        Ok(Model { frame, v, valuation })
    }

    /// Worlds where `p_k` holds.
    fn var_mask(&self, k: u32) -> u64 {
        self.valuation
            .iter()
            .enumerate()
            .fold(0, |acc, (w, &m)| acc | ((m >> (self.v - 1 - k) & 1) as u64) << w)
    }
}

/// A formula flattened to postfix for repeated evaluation.
#[derive(Clone, Debug)]
struct Program {
    ops: Vec<Op>,
}

#[derive(Clone, Copy, Debug)]
enum Op {
    Const(bool),
    Var(u32),
    Not,
    And,
    Or,
    Implies,
    Iff,
    Box,
    Diamond,
}

impl Program {
    fn compile(f: &Formula) -> Self {
        fn go(f: &Formula, out: &mut Vec<Op>) {
            let (op, kids): (Op, Vec<&Formula>) = match f {
                Formula::Const0 => (Op::Const(false), vec![]),
                Formula::Const1 => (Op::Const(true), vec![]),
                Formula::Var(k) => (Op::Var(*k), vec![]),
                Formula::Not(a) => (Op::Not, vec![a]),
                Formula::And(a, b) => (Op::And, vec![a, b]),
                Formula::Or(a, b) => (Op::Or, vec![a, b]),
                Formula::Implies(a, b) => (Op::Implies, vec![a, b]),
                Formula::Iff(a, b) => (Op::Iff, vec![a, b]),
                Formula::Box(a) => (Op::Box, vec![a]),
                Formula::Diamond(a) => (Op::Diamond, vec![a]),
            };
            for k in kids {
                go(k, out);
            }
            out.push(op);
        }
        let mut ops = Vec::with_capacity(f.size());
        go(f, &mut ops);
        Program { ops }
    }

    /// Set of worlds satisfying the program; `vars[k]` is the extension of
    /// `p_k`.
    fn run(&self, frame: &Frame, vars: &[u64], stack: &mut Vec<u64>) -> u64 {
        let all = if frame.worlds() == 64 { u64::MAX } else { (1u64 << frame.worlds()) - 1 };
        stack.clear();
        for op in &self.ops {
            let x = match *op {
                Op::Const(b) => {
                    if b {
                        all
                    } else {
                        0
                    }
                }
                Op::Var(k) => vars[k as usize],
                Op::Not => !stack.pop().expect("arity") & all,
                Op::Box => !frame.diamond(!stack.pop().expect("arity") & all) & all,
                Op::Diamond => frame.diamond(stack.pop().expect("arity")),
                _ => {
                    let b = stack.pop().expect("arity");
                    let a = stack.pop().expect("arity");
                    match *op {
                        Op::And => a & b,
                        Op::Or => a | b,
                        Op::Implies => (!a | b) & all,
                        _ => !(a ^ b) & all,
                    }
                }
            };
            stack.push(x);
        }
        stack.pop().expect("non-empty program")
    }
}

fn check_vars(f: &Formula, v: u32) -> Result<()> {
    let used = f.variables();
    if used > v {
        return Err(Error::VariableOverflow { used, available: v });
    }
    Ok(())
}

/// Truth of `f` at world `w` of `m`.
pub fn eval_model(m: &Model, w: usize, f: &Formula) -> Result<bool> {
    check_vars(f, m.v)?;
    if w >= m.frame.worlds() {
        return Err(Error::Range(format!("world {w} of {}", m.frame.worlds())));
    }
    let vars: Vec<u64> = (0..m.v).map(|k| m.var_mask(k)).collect();
    Ok(Program::compile(f).run(&m.frame, &vars, &mut Vec::new()) >> w & 1 == 1)
}

/// Iterates the `n^|W|` valuations as per-variable world masks, calling
/// `visit` until it returns `false`. Valuations come in lexicographic order
/// of `(V(w_0), V(w_1), ..)`.
fn for_each_valuation(worlds: usize, v: u32, mut visit: impl FnMut(&[usize], &[u64]) -> bool) {
    let n = 1usize << v;
    let mut val = vec![0usize; worlds];
    let mut vars = vec![0u64; v as usize];
    loop {
        for (k, mask) in vars.iter_mut().enumerate() {
            *mask = val
                .iter()
                .enumerate()
                .fold(0, |acc, (w, &m)| acc | ((m >> (v as usize - 1 - k) & 1) as u64) << w);
        }
        if !visit(&val, &vars) {
            return;
        }
        let mut pos = worlds;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            val[pos] += 1;
            if val[pos] < n {
                break;
            }
            val[pos] = 0;
        }
    }
}

fn frame_valid(fr: &Frame, prog: &Program, v: u32) -> bool {
    let all = (1u64 << fr.worlds()) - 1;
    let mut stack = Vec::new();
    let mut ok = true;
    for_each_valuation(fr.worlds(), v, |_, vars| {
        ok = prog.run(fr, vars, &mut stack) == all;
        ok
    });
    ok
}

/// Whether `f` holds at every world under every valuation of `v` variables.
pub fn valid_on_frame(fr: &Frame, f: &Formula, v: u32) -> Result<bool> {
    check_vars(f, v)?;
    if fr.worlds() > MAX_VALID_WORLDS {
        return Err(Error::Cap { what: format!("validity check over {} worlds", fr.worlds()), cap: MAX_VALID_WORLDS as u64 });
    }
    if v > 4 {
        return Err(Error::Cap { what: format!("validity check with {v} variables"), cap: 4 });
    }
    Ok(frame_valid(fr, &Program::compile(f), v))
}

/// `F_K(x,y)` or `F_D(x,y)`, required at every world.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FrameCondition {
    pub plane: Plane,
    pub x: Axis,
    pub y: Axis,
}

fn within(count: u32, bound: Axis) -> bool {
    match bound {
        Axis::Star => true,
        Axis::Num(b) => (count as i64) <= b as i64,
    }
}

impl FrameCondition {
    pub fn new(c: SystemCoord) -> Self {
        FrameCondition { plane: c.plane, x: c.x, y: c.y }
    }

    /// `C(x) ∨ W(y)` at world `w`.
    pub fn holds_at(&self, fr: &Frame, w: usize) -> bool {
        let own = fr.is_reflexive(w);
        let others = fr.others(w);
        let c = !own
            && within(others, self.x)
            && match self.plane {
                Plane::K => true,
                Plane::D => others >= 1,
            };
        let wy = own && self.y != Axis::Num(-1) && within(others, self.y);
        c || wy
    }
}

pub fn frame_condition_holds(fr: &Frame, c: &FrameCondition) -> bool {
    (0..fr.worlds()).all(|w| c.holds_at(fr, w))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub rows: Vec<u64>,
    pub axiom_valid: bool,
    pub condition_holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CorrespondenceReport {
    pub v: u32,
    /// Coordinate the axiom is built from, inside K[v,1].
    pub coord: SystemCoord,
    /// Star-mapped coordinate the frame condition is read from.
    pub condition: SystemCoord,
    pub max_worlds: usize,
    pub frames_checked: u64,
    pub violations: Vec<Violation>,
}

struct Prepared {
    v: u32,
    local: SystemCoord,
    star: SystemCoord,
    cond: FrameCondition,
    prog: Program,
}

impl Prepared {
    fn new(v: u32, coord: SystemCoord) -> Result<Self> {
        if v > 3 {
            return Err(Error::Cap { what: format!("correspondence check with {v} variables"), cap: 3 });
        }
        let (x, y) = coord.resolve(1 << v)?;
        let local = SystemCoord::num(coord.plane, x, y);
        let star = map_to_star(local, v)?;
        Ok(Prepared { v, local, star, cond: FrameCondition::new(star), prog: Program::compile(&alpha(local, v)?) })
    }

    fn verdict(&self, fr: &Frame) -> Option<Violation> {
        let a = frame_valid(fr, &self.prog, self.v);
        let c = frame_condition_holds(fr, &self.cond);
        (a != c).then(|| Violation { rows: fr.rows.clone(), axiom_valid: a, condition_holds: c })
    }

    fn report(&self, max_worlds: usize, frames_checked: u64, mut violations: Vec<Violation>) -> CorrespondenceReport {
        violations.sort_by(|a, b| (a.rows.len(), &a.rows).cmp(&(b.rows.len(), &b.rows)));
        violations.dedup();
        CorrespondenceReport {
            v: self.v,
            coord: self.local,
            condition: self.star,
            max_worlds,
            frames_checked,
            violations,
        }
    }
}

/// For every labeled frame with at most `max_worlds` worlds, compares the
/// validity of `α_coord` with the frame condition of the star-mapped
/// coordinate.
pub fn correspondence_check(
    v: u32,
    coord: SystemCoord,
    max_worlds: usize,
    threads: Option<usize>,
) -> Result<CorrespondenceReport> {
    let prep = Prepared::new(v, coord)?;
    let mut frames_checked = 0;
    let mut violations = Vec::new();
    for worlds in 1..=max_worlds {
        let total = frame_count(worlds)?;
        let found: Vec<Violation> = in_pool(threads, || {
            (0..total).into_par_iter().filter_map(|idx| prep.verdict(&Frame::from_index(worlds, idx))).collect()
        })?;
        violations.extend(found);
        frames_checked += total;
    }
    Ok(prep.report(max_worlds, frames_checked, violations))
}

/// The same comparison over an explicit list of frames (e.g. a random
/// sample of larger frames).
pub fn correspondence_on(
    v: u32,
    coord: SystemCoord,
    frames: &[Frame],
    threads: Option<usize>,
) -> Result<CorrespondenceReport> {
    let prep = Prepared::new(v, coord)?;
    if let Some(big) = frames.iter().find(|f| f.worlds() > MAX_VALID_WORLDS) {
        return Err(Error::Cap { what: format!("validity check over {} worlds", big.worlds()), cap: MAX_VALID_WORLDS as u64 });
    }
    let violations = in_pool(threads, || frames.par_iter().filter_map(|f| prep.verdict(f)).collect())?;
    let max_worlds = frames.iter().map(Frame::worlds).max().unwrap_or(0);
    Ok(prep.report(max_worlds, frames.len() as u64, violations))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Countermodel {
    pub model: Model,
    pub world: usize,
}

/// Smallest model falsifying `f`: fewest worlds first, then frames by index
/// (starting from the empty relation), then valuations in lexicographic
/// order; the reported world is the first one where `f` fails.
pub fn find_countermodel(f: &Formula, max_worlds: usize) -> Result<Option<Countermodel>> {
    let v = f.variables();
    if v > 4 {
        return Err(Error::Cap { what: format!("countermodel search with {v} variables"), cap: 4 });
    }
    let prog = Program::compile(f);
    let mut stack = Vec::new();
    for worlds in 1..=max_worlds {
        let all = (1u64 << worlds) - 1;
        for idx in 0..frame_count(worlds)? {
            let fr = Frame::from_index(worlds, idx);
            let mut hit = None;
            for_each_valuation(worlds, v, |val, vars| {
                let sat = prog.run(&fr, vars, &mut stack);
                if sat != all {
                    hit = Some((val.to_vec(), (!sat & all).trailing_zeros() as usize));
                }
                hit.is_none()
            });
            if let Some((valuation, world)) = hit {
                return Ok(Some(Countermodel { model: Model { frame: fr, v, valuation }, world }));
            }
        }
    }
    Ok(None)
}
