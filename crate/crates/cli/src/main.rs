//! `mmw`: command-line front end for the minmatrix workbench.

use std::fmt::Write as _;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use mmw_core::axiom::{alpha, alpha_prime, collapsed_orbits, lookup, system_of_with_cap};
use mmw_core::context::DEFAULT_UNIVERSE_CAP;
use mmw_core::kripke::{correspondence_check, correspondence_on, find_countermodel, Frame};
use mmw_core::lattice::{
    build_hasse, collapse, coord_of_orbits, map_to_star, orbits_of_matrix, CollapseSet, OrbitSet,
};
use mmw_core::orbit::compute_orbits;
use mmw_core::substitution::{classify, ClassifyMode, ClassifyOptions};
use mmw_core::{Axis, Context, Error, Formula, Plane, SystemCoord};

#[derive(Parser)]
#[command(name = "mmw", version, about = "Minmatrices, prime orbits and system lattices of K[v,d]")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Clone, Copy, ValueEnum)]
enum SetChoice {
    Standard,
    AllPrimes,
    Exhaustive,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Reduced,
    Exhaustive,
}

#[derive(Clone, Copy, ValueEnum)]
enum AxiomVariant {
    Alpha,
    AlphaPrime,
}

#[derive(Subcommand)]
enum Cmd {
    /// Minmatrix of a formula in K[v,d].
    Normalize {
        #[arg(long)]
        v: u32,
        #[arg(long, default_value_t = 1)]
        d: u32,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        formula: String,
    },
    /// CMM reached from a formula in K[v,1].
    Collapse {
        #[arg(long)]
        v: u32,
        #[arg(long, value_enum, default_value = "standard")]
        set: SetChoice,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        formula: String,
    },
    /// Prime orbits of K[v,1].
    Orbits {
        #[arg(long)]
        v: u32,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// All CMMs of K[v,1] and their Hasse diagram.
    Lattice {
        #[arg(long)]
        v: u32,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Defining axiom of a lattice coordinate.
    Axiom {
        #[arg(long, default_value = "K")]
        plane: Plane,
        #[arg(long, allow_hyphen_values = true)]
        x: Axis,
        #[arg(long, allow_hyphen_values = true)]
        y: Axis,
        #[arg(long)]
        v: u32,
        #[arg(long, value_enum, default_value = "alpha")]
        variant: AxiomVariant,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// System of a degree ≤ 1 formula.
    SystemOf {
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        formula: String,
    },
    /// Dependency classes of level-0 substitutions.
    Classify {
        #[arg(long)]
        v: u32,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long, value_enum, default_value = "reduced")]
        mode: Mode,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Frame correspondence of lattice axioms.
    Frames {
        /// Compare axiom validity with the frame condition.
        #[arg(long, required = true)]
        correspondence: bool,
        #[arg(long)]
        v: u32,
        /// Omit the coordinate to check every coordinate of K[v,1].
        #[arg(long)]
        plane: Option<Plane>,
        #[arg(long, allow_hyphen_values = true)]
        x: Option<Axis>,
        #[arg(long, allow_hyphen_values = true)]
        y: Option<Axis>,
        #[arg(long, default_value_t = 3)]
        max_worlds: usize,
        /// Also test this many random frames with `max_worlds + 1` worlds.
        #[arg(long, default_value_t = 0)]
        sample: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Smallest Kripke model falsifying a formula.
    Countermodel {
        #[arg(long, default_value_t = 3)]
        max_worlds: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        formula: String,
    },
}

fn universe_cap() -> Result<u64, Error> {
    match std::env::var("MMW_UNIVERSE_CAP") {
        Ok(s) => s.trim().parse().map_err(|_| Error::Range(format!("MMW_UNIVERSE_CAP must be an integer, got {s:?}"))),
        Err(_) => Ok(DEFAULT_UNIVERSE_CAP),
    }
}

fn context(v: u32, d: u32) -> Result<Context, Error> {
    Context::with_cap(v, d, universe_cap()?)
}

fn json<T: Serialize>(x: &T) -> String {
    let mut s = serde_json::to_string_pretty(x).expect("serializable");
    s.push('\n');
    s
}

fn no_dot(f: Format) -> Result<Format, Error> {
    if f == Format::Dot {
        return Err(Error::Range("dot output is only available for `lattice`".into()));
    }
    Ok(f)
}

fn name_of(c: SystemCoord) -> Option<&'static str> {
    lookup(c).map(|s| s.name)
}

#[derive(Serialize)]
struct CollapseOut {
    v: u32,
    orbits: OrbitSet,
    orbit_names: String,
    minterms: usize,
    local: Option<SystemCoord>,
    coord: Option<SystemCoord>,
    name: Option<&'static str>,
}

#[derive(Serialize)]
struct OrbitOut {
    label: String,
    name: String,
    size: usize,
    minterms: Vec<usize>,
}

#[derive(Serialize)]
struct LatticeOut {
    local: SystemCoord,
    coord: SystemCoord,
    orbits: OrbitSet,
    orbit_names: String,
    rank: usize,
    minterms: usize,
    name: Option<&'static str>,
}

#[derive(Serialize)]
struct AxiomOut {
    coord: SystemCoord,
    v: u32,
    formula: String,
    orbits: OrbitSet,
    orbit_names: String,
    matrix: String,
}

#[derive(Serialize)]
struct ClassOut {
    size: u64,
    representative: mmw_core::substitution::SubstitutionJson,
    key_digest: String,
}

fn run(cmd: Cmd) -> Result<String, Error> {
    let mut out = String::new();
    match cmd {
        Cmd::Normalize { v, d, format, formula } => {
            let f: Formula = formula.parse()?;
            let ctx = context(v, d)?;
            let m = mmw_core::normalize(&f, ctx)?;
            match no_dot(format)? {
                Format::Json => out = json(&m.to_json(true)),
                _ => {
                    let _ = writeln!(out, "K[{v},{d}]: {} of {} minterms", m.len(), ctx.universe_size());
                    if d <= 1 {
                        out.push_str(&m.render_matrix()?);
                        if !out.ends_with('\n') {
                            out.push('\n');
                        }
                    } else {
                        let _ = writeln!(out, "{:?}", m.members().rev().collect::<Vec<_>>());
                    }
                }
            }
        }
        Cmd::Collapse { v, set, format, formula } => {
            let f: Formula = formula.parse()?;
            let ctx = context(v, 1)?;
            let subs = match set {
                SetChoice::Standard => CollapseSet::standard(ctx)?,
                SetChoice::AllPrimes => CollapseSet::all_primes(ctx)?,
                SetChoice::Exhaustive => CollapseSet::exhaustive(ctx)?,
            };
            let cmm = collapse(&mmw_core::normalize(&f, ctx)?, &subs)?;
            let orbits = orbits_of_matrix(&cmm)?
                .ok_or_else(|| Error::Internal("collapse left a partial orbit".into()))?;
            let local = coord_of_orbits(orbits, ctx.n());
            let coord = local.map(|c| map_to_star(c, v)).transpose()?;
            let r = CollapseOut {
                v,
                orbits,
                orbit_names: orbits.display(v),
                minterms: cmm.len(),
                local,
                coord,
                name: coord.and_then(name_of),
            };
            match no_dot(format)? {
                Format::Json => out = json(&r),
                _ => {
                    let _ = writeln!(out, "CMM: {} ({} minterms)", r.orbit_names, r.minterms);
                    match (r.local, r.coord) {
                        (Some(l), Some(c)) => {
                            let _ = writeln!(out, "coordinate: {c} (in K[{v},1]: {l})");
                        }
                        _ => {
                            return Err(Error::Internal(format!("fixpoint {} is not a coordinate CMM", r.orbit_names)))
                        }
                    }
                    if let Some(n) = r.name {
                        let _ = writeln!(out, "system: {n}");
                    }
                }
            }
        }
        Cmd::Orbits { v, format } => {
            let ctx = context(v, 1)?;
            let orbits = compute_orbits(ctx)?;
            let rows: Vec<OrbitOut> = orbits
                .iter()
                .map(|o| OrbitOut {
                    label: o.label.to_string(),
                    name: o.label.display_name(v),
                    size: o.members.len(),
                    minterms: o.members.members().rev().collect(),
                })
                .collect();
            match no_dot(format)? {
                Format::Json => out = json(&rows),
                _ => {
                    for r in &rows {
                        let _ = writeln!(out, "{:<8} {:>5}  {:?}", r.name, r.size, r.minterms);
                    }
                }
            }
        }
        Cmd::Lattice { v, format } => {
            let hasse = build_hasse(v)?;
            match format {
                Format::Dot => out = hasse.to_dot(|c| name_of(c.star_coord()).map(String::from)),
                f => {
                    let rows: Vec<LatticeOut> = hasse
                        .nodes
                        .iter()
                        .map(|c| LatticeOut {
                            local: c.coord,
                            coord: c.star_coord(),
                            orbits: c.orbits,
                            orbit_names: c.orbits.display(v),
                            rank: c.orbits.len(),
                            minterms: c.matrix.len(),
                            name: name_of(c.star_coord()),
                        })
                        .collect();
                    if f == Format::Json {
                        out = json(&rows);
                    } else {
                        for r in &rows {
                            let _ = writeln!(
                                out,
                                "{:<10} {:<10} {:>2} {:>5}  {:<8} {}",
                                r.coord.to_string(),
                                r.local.to_string(),
                                r.rank,
                                r.minterms,
                                r.name.unwrap_or("-"),
                                r.orbit_names
                            );
                        }
                        let _ = writeln!(out, "{} systems, {} covering edges", rows.len(), hasse.edges.len());
                    }
                }
            }
        }
        Cmd::Axiom { plane, x, y, v, variant, format } => {
            let coord = SystemCoord::new(plane, x, y);
            let ctx = context(v, 1)?;
            let f = match variant {
                AxiomVariant::Alpha => alpha(coord, v)?,
                AxiomVariant::AlphaPrime => alpha_prime(coord, v)?,
            };
            let orbits = collapsed_orbits(&f, ctx)?;
            let r = AxiomOut {
                coord,
                v,
                formula: f.to_string(),
                orbits,
                orbit_names: orbits.display(v),
                matrix: orbits.matrix(ctx).render_matrix()?,
            };
            match no_dot(format)? {
                Format::Json => out = json(&r),
                _ => {
                    let _ = writeln!(out, "{}", r.formula);
                    let _ = writeln!(out, "CMM: {}", r.orbit_names);
                    out.push_str(&r.matrix);
                    if !out.ends_with('\n') {
                        out.push('\n');
                    }
                }
            }
        }
        Cmd::SystemOf { format, formula } => {
            let f: Formula = formula.parse()?;
            let r = system_of_with_cap(&f, universe_cap()?)?;
            match no_dot(format)? {
                Format::Json => out = json(&r),
                _ => {
                    let _ = writeln!(out, "coordinate: {}", r.coord);
                    let _ = writeln!(out, "context: K[{},1], local coordinate {}", r.context_v, r.local);
                    let _ = writeln!(out, "origin: K[{},1]", r.origin_v);
                    let _ = writeln!(out, "orbits: {}", r.orbits.display(r.context_v));
                    if let Some(sys) = lookup(r.coord) {
                        let _ = write!(out, "system: {}", sys.name);
                        if let Some(l) = sys.tabulated_label {
                            let _ = write!(out, " (tabulated as {l})");
                        }
                        out.push('\n');
                    }
                }
            }
        }
        Cmd::Classify { v, threads, mode, format } => {
            let opts = ClassifyOptions {
                mode: match mode {
                    Mode::Reduced => ClassifyMode::Reduced,
                    Mode::Exhaustive => ClassifyMode::Exhaustive,
                },
                threads,
                ..ClassifyOptions::default()
            };
            let classes = classify(v, &opts)?;
            let rows: Vec<ClassOut> = classes
                .iter()
                .map(|c| ClassOut { size: c.size, representative: c.representative.to_json(), key_digest: c.key_digest() })
                .collect();
            match no_dot(format)? {
                Format::Json => out = json(&rows),
                _ => {
                    for r in &rows {
                        let _ = writeln!(
                            out,
                            "{:>10}  {}  {}",
                            r.size,
                            &r.key_digest[..16],
                            r.representative.components.join(", ")
                        );
                    }
                    let total: u64 = rows.iter().map(|r| r.size).sum();
                    let _ = writeln!(out, "{} classes, {} substitutions", rows.len(), total);
                }
            }
        }
        Cmd::Frames { correspondence: _, v, plane, x, y, max_worlds, sample, seed, threads, format } => {
            let coords = match (plane, x, y) {
                (Some(p), Some(x), Some(y)) => vec![SystemCoord::new(p, x, y)],
                (None, None, None) => mmw_core::lattice::enumerate_coords(v),
                _ => return Err(Error::InvalidCoordinate("give all of --plane, --x, --y or none".into())),
            };
            let mut reports = Vec::new();
            for c in coords {
                reports.push(correspondence_check(v, c, max_worlds, threads)?);
                if sample > 0 {
                    let worlds = max_worlds + 1;
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    let bits = worlds * worlds;
                    let frames: Vec<Frame> = (0..sample)
                        .map(|_| Frame::from_index(worlds, rng.gen::<u64>() & ((1u64 << bits) - 1)))
                        .collect();
                    reports.push(correspondence_on(v, c, &frames, threads)?);
                }
            }
            match no_dot(format)? {
                Format::Json => out = json(&reports),
                _ => {
                    for r in &reports {
                        let _ = writeln!(
                            out,
                            "{} -> F{}: {} frames (|W| <= {}), {} violations",
                            r.coord,
                            r.condition,
                            r.frames_checked,
                            r.max_worlds,
                            r.violations.len()
                        );
                        for viol in r.violations.iter().take(5) {
                            let _ = writeln!(
                                out,
                                "  rows {:?}: axiom valid {}, condition {}",
                                viol.rows, viol.axiom_valid, viol.condition_holds
                            );
                        }
                    }
                }
            }
        }
        Cmd::Countermodel { max_worlds, format, formula } => {
            let f: Formula = formula.parse()?;
            let found = find_countermodel(&f, max_worlds)?;
            match no_dot(format)? {
                Format::Json => out = json(&found),
                _ => match found {
                    None => {
                        let _ = writeln!(out, "no countermodel with at most {max_worlds} worlds");
                    }
                    Some(c) => {
                        let m = &c.model;
                        let _ = writeln!(out, "worlds: {}", m.frame.worlds());
                        for w in 0..m.frame.worlds() {
                            let seen: Vec<usize> = (0..m.frame.worlds()).filter(|&u| m.frame.sees(w, u)).collect();
                            let lits: Vec<String> = (0..m.v)
                                .map(|k| {
                                    let name = mmw_core::formula::var_name(k);
                                    if m.valuation[w] >> (m.v - 1 - k) & 1 == 1 {
                                        name
                                    } else {
                                        format!("!{name}")
                                    }
                                })
                                .collect();
                            let _ = writeln!(out, "  w{w}: sees {seen:?}, valuation {{{}}}", lits.join(", "));
                        }
                        let _ = writeln!(out, "fails at w{}", c.world);
                    }
                },
            }
        }
    }
    Ok(out)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.cmd) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("mmw: {e}");
            ExitCode::from(if e.is_internal() { 2 } else { 1 })
        }
    }
}
