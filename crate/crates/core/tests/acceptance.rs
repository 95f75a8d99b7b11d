//! Acceptance suite: one PASS/FAIL line per criterion.

mod common;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{display_members, sub_of, ORBITS_V1, ORBITS_V2, PRIMES_V2};
use mmw_core::axiom::{alpha, alpha_prime, named_systems};
use mmw_core::kripke::{correspondence_check, frame_condition_holds, valid_on_frame, Frame, FrameCondition};
use mmw_core::lattice::{
    collapse, collapse_standard, coord_of_orbits, coverage, enumerate_cmms, enumerate_coords, orbits_of_matrix,
    satisfies_dependency_rules, CollapseSet, OrbitSet,
};
use mmw_core::orbit::{compute_orbits, orbit_closed_form, OrbitLabel};
use mmw_core::substitution::{
    apply_minmatrix, classify, critical_substitution, enumerate_primes, ClassifyOptions, Coverage, Kernel,
};
use mmw_core::{normalize, parse, Axis, Context, Formula, Minmatrix, Plane, Substitution, SystemCoord};

type Outcome = Result<String, String>;

fn ctx(v: u32, d: u32) -> Context {
    Context::new(v, d).unwrap()
}

fn members(m: &Minmatrix) -> Vec<usize> {
    m.members().rev().collect()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn matrix_rows(text: &str) -> Vec<String> {
    text.lines()
        .filter_map(|l| l.split_once('|'))
        .map(|(_, cells)| cells.chars().filter(|c| *c == '0' || *c == '1').collect())
        .collect()
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn normalization() -> Outcome {
    let phi = normalize(&parse("p+q+r->(p->q)r").unwrap(), ctx(3, 0)).unwrap();
    ensure(members(&phi) == [7, 3, 1, 0], || format!("φ(p,q,r) gave {:?}", members(&phi)))?;
    let want = normalize(&parse("pqr+!pqr+!p!qr+!p!q!r").unwrap(), ctx(3, 0)).unwrap();
    ensure(phi == want, || "φ(p,q,r) differs from pqr+!pqr+!p!qr+!p!q!r".into())?;

    let t = normalize(&parse("[]p->p").unwrap(), ctx(1, 1)).unwrap();
    let rows = matrix_rows(&t.render_matrix().unwrap());
    ensure(rows == ["111100", "110010", "101011"], || format!("[T] rendered as {rows:?}"))?;
    let tt = collapse_standard(&t).unwrap();
    let rows = matrix_rows(&tt.render_matrix().unwrap());
    ensure(rows == ["1100", "1110", "1011"], || format!("⟦T⟧ rendered as {rows:?}"))?;
    Ok(format!("φ = {:?}, [T] = {:?}, ⟦T⟧ = {:?}", members(&phi), members(&t), members(&tt)))
}

fn primes() -> Outcome {
    let counts: Vec<usize> = (1..=3).map(|v| enumerate_primes(v).unwrap().len()).collect();
    ensure(counts == [2, 24, 40320], || format!("counts {counts:?}"))?;
    let listed: BTreeSet<Substitution> = PRIMES_V2.iter().map(|(a, b)| sub_of(2, &[a, b])).collect();
    let enumerated: BTreeSet<Substitution> = enumerate_primes(2).unwrap().into_iter().collect();
    ensure(listed == enumerated, || "v = 2 primes differ from the reference table".into())?;
    Ok(format!("counts {counts:?}, v = 2 set equals the 24-entry table"))
}

fn orbits() -> Outcome {
    let check = |v: u32, table: &[(OrbitLabel, &[&str])]| -> Result<(), String> {
        let c = ctx(v, 1);
        let orbits = compute_orbits(c).unwrap();
        for (label, rows) in table {
            let o = orbits.iter().find(|o| o.label == *label).ok_or(format!("{label:?} missing"))?;
            ensure(members(&o.members) == display_members(c, rows), || {
                format!("K[{v},1] {} differs from its display", label.display_name(v))
            })?;
        }
        Ok(())
    };
    check(1, &ORBITS_V1.iter().map(|(l, r)| (*l, &r[..])).collect::<Vec<_>>())?;
    check(2, &ORBITS_V2.iter().map(|(l, r)| (*l, &r[..])).collect::<Vec<_>>())?;

    let sizes: Vec<usize> = compute_orbits(ctx(2, 1)).unwrap().iter().map(|o| o.members.len()).collect();
    ensure(sizes == [4, 4, 12, 12, 12, 12, 4, 4], || format!("K[2,1] sizes {sizes:?}"))?;

    let k3 = compute_orbits(ctx(3, 1)).unwrap();
    ensure(k3.len() == 16, || format!("K[3,1] has {} orbits", k3.len()))?;
    for o in &k3 {
        if let OrbitLabel::Dc(i) | OrbitLabel::Dw(i) = o.label {
            ensure(o.members.len() == 8 * binomial(7, i), || format!("{:?} has {} members", o.label, o.members.len()))?;
        }
    }
    for v in 1..=3 {
        ensure(compute_orbits(ctx(v, 1)).unwrap() == orbit_closed_form(ctx(v, 1)).unwrap(), || {
            format!("worklist and closed form differ at v = {v}")
        })?;
    }
    Ok("K[1,1] and K[2,1] displays, K[3,1] sizes 8·C(7,i), worklist = closed form for v ≤ 3".into())
}

fn census() -> Outcome {
    let mut notes = Vec::new();
    for v in 1..=3u32 {
        let n = 1usize << v;
        let count = enumerate_cmms(v).unwrap().len();
        ensure(count == n * (n + 3), || format!("v = {v}: {count} CMMs"))?;
        notes.push(count.to_string());
    }
    for v in 1..=2u32 {
        let c = ctx(v, 1);
        let n = c.n();
        let all = CollapseSet::exhaustive(c).unwrap();
        let cmms: Vec<u64> = enumerate_cmms(v).unwrap().iter().map(|m| m.orbits.0).collect();
        let mut survivors = 0;
        for bits in 0..1u64 << (2 * n) {
            let m = OrbitSet(bits).matrix(c);
            let fixed = collapse(&m, &all).unwrap() == m;
            ensure(fixed == cmms.contains(&bits), || format!("v = {v}: orbit sum {bits:b} misclassified"))?;
            survivors += fixed as usize;
        }
        notes.push(format!("{}→{survivors}", 1u64 << (2 * n)));
    }
    Ok(format!("CMMs {} / {} / {}; exhaustive survivors {}, {}", notes[0], notes[1], notes[2], notes[3], notes[4]))
}

fn dependency_rules() -> Outcome {
    for v in 1..=3u32 {
        let n = 1usize << v;
        let cmms: Vec<u64> = enumerate_cmms(v).unwrap().iter().map(|m| m.orbits.0).collect();
        for bits in 0..1u64 << (2 * n) {
            ensure(satisfies_dependency_rules(OrbitSet(bits), n) == cmms.contains(&bits), || {
                format!("v = {v}: DR verdict wrong for {}", OrbitSet(bits).display(v))
            })?;
        }
    }
    let mut at_n2 = Coverage::None;
    for v in 1..=3u32 {
        let c = ctx(v, 1);
        let crit = critical_substitution(v).unwrap();
        for j in 0..2 * c.n() {
            let to = OrbitLabel::from_index(j);
            let got = coverage(c, OrbitLabel::Vv, to, &crit).unwrap();
            let want = if to == OrbitLabel::Vv { Coverage::Full } else { Coverage::None };
            ensure(got == want, || format!("v = {v}: Vv covers {to:?} as {got:?}"))?;
        }
        let dd = coverage(c, OrbitLabel::Dd, OrbitLabel::Dd, &crit).unwrap();
        ensure(dd == Coverage::Full, || format!("v = {v}: Dd covers itself as {dd:?}"))?;
        for to in [OrbitLabel::Dw(1), OrbitLabel::Dc(1)] {
            let got = coverage(c, OrbitLabel::Dd, to, &crit).unwrap();
            if v == 1 {
                // with n = 2 section n-2 is section 0, whose image is all of ◇1
                ensure(got == Coverage::Full, || format!("v = 1: Dd covers {to:?} as {got:?}"))?;
                at_n2 = got;
            } else {
                ensure(got == Coverage::Partial, || format!("v = {v}: Dd covers {to:?} as {got:?}"))?;
            }
        }
    }
    Ok(format!(
        "DR1-DR3 select exactly the CMMs for v ≤ 3; Vv self-covers only; Dd covers Dw1, Dc1 partially for v = 2, 3 ({at_n2:?} at n = 2)"
    ))
}

fn classification() -> Outcome {
    let t = Instant::now();
    let classes = classify(2, &ClassifyOptions::default()).unwrap();
    let v2 = t.elapsed();
    let mut sizes: Vec<u64> = classes.iter().map(|c| c.size).collect();
    sizes.sort();
    ensure(sizes == [4, 24, 36, 48, 144], || format!("v = 2 sizes {sizes:?}"))?;
    ensure(v2 < Duration::from_secs(5), || format!("v = 2 took {v2:.2?}"))?;
    let mut note = format!("v = 2 sizes {sizes:?} in {v2:.2?}");
    let mut want: Vec<u64> = vec![
        40_320, 8, 448, 1_568, 3_136, 1_960, 9_408, 56_448, 94_080, 94_080, 70_560, 705_600, 94_080, 470_400,
        1_411_200, 176_400, 470_400, 3_763_200, 2_822_400, 1_128_960, 4_233_600, 1_128_960,
    ];
    want.sort();
    let mut got: Vec<u64> = classify(3, &ClassifyOptions::default()).unwrap().iter().map(|c| c.size).collect();
    got.sort();
    ensure(got == want, || format!("v = 3 sizes {got:?}"))?;
    note.push_str("; v = 3: 22 classes matching the census");
    Ok(note)
}

fn registry() -> Outcome {
    let mut checked = 0;
    let mut off = Vec::new();
    for s in named_systems(3) {
        for var in &s.variants {
            let n = 1usize << var.context_v;
            let want = s.orbits(var.context_v).unwrap();
            let got = var.collapsed_orbits().map_err(|e| format!("{} {:?}: {e}", s.name, var.text))?;
            checked += 1;
            if got != want {
                let at = coord_of_orbits(got, n).map_or("no coordinate".to_string(), |c| c.to_string());
                off.push(format!("{} {:?} collapses to {at}", s.name, var.text));
            }
        }
    }
    let kw8 = named_systems(2).into_iter().find(|s| s.name == "KW8").ok_or("KW8 missing")?;
    let kw8_sets: BTreeSet<u64> = kw8.variants.iter().map(|v| v.collapsed_orbits().unwrap().0).collect();
    ensure(kw8.variants.len() == 6 && kw8_sets.len() == 1, || "KW8 variants disagree".into())?;
    for v in 1..=2 {
        let c = ctx(v, 1);
        for coord in enumerate_coords(v) {
            let a = collapse_standard(&normalize(&alpha(coord, v).unwrap(), c).unwrap()).unwrap();
            let b = collapse_standard(&normalize(&alpha_prime(coord, v).unwrap(), c).unwrap()).unwrap();
            ensure(a == b, || format!("α and α′ differ at {coord}, v = {v}"))?;
        }
    }
    let summary = format!(
        "{checked} variants checked, KW8's 6 agree, α = α′ for all v ≤ 2 coordinates; {} variant(s) off their listed coordinate",
        off.len()
    );
    if off.is_empty() {
        Ok(summary)
    } else {
        Err(format!("{summary}: {}", off.join("; ")))
    }
}

fn correspondence() -> Outcome {
    let mut frames = 0;
    let mut coords = 0;
    for v in 1..=2 {
        for coord in enumerate_coords(v) {
            let r = correspondence_check(v, coord, 3, None).unwrap();
            ensure(r.violations.is_empty(), || {
                format!("v = {v}, {coord}: {} violation(s), first {:?}", r.violations.len(), r.violations[0])
            })?;
            frames += r.frames_checked;
            coords += 1;
        }
    }
    let special = [
        ("T", SystemCoord::new(Plane::D, Axis::Num(0), Axis::Star), "[]p->p"),
        ("D", SystemCoord::new(Plane::D, Axis::Star, Axis::Star), "<>1"),
        ("Ver", SystemCoord::num(Plane::K, 0, -1), "!<>1"),
    ];
    for (name, coord, text) in special {
        let cond = FrameCondition::new(coord);
        let f = parse(text).unwrap();
        for w in 1..=3 {
            for idx in 0..1u64 << (w * w) {
                let fr = Frame::from_index(w, idx);
                let shape = match name {
                    "T" => (0..w).all(|x| fr.is_reflexive(x)),
                    "D" => fr.is_serial(),
                    _ => (0..w).all(|x| fr.is_blind(x)),
                };
                let valid = valid_on_frame(&fr, &f, 1).unwrap();
                ensure(valid == shape && frame_condition_holds(&fr, &cond) == shape, || {
                    format!("{name} on frame {:?}", fr.rows())
                })?;
            }
        }
    }
    Ok(format!("{coords} coordinates, {frames} frame checks, 0 violations; T/D/Ver special cases hold"))
}

// randomized property checks

fn random_formula(rng: &mut ChaCha8Rng, vars: u32, degree: u32, depth: u32) -> Formula {
    if depth == 0 || rng.gen_ratio(1, 4) {
        return match rng.gen_range(0..10) {
            0 => Formula::Const0,
            1 => Formula::Const1,
            2 | 3 if degree > 0 => Formula::boxed(random_formula(rng, vars, degree - 1, depth.saturating_sub(1))),
            4 | 5 if degree > 0 => Formula::diamond(random_formula(rng, vars, degree - 1, depth.saturating_sub(1))),
            _ => Formula::var(rng.gen_range(0..vars)),
        };
    }
    let a = random_formula(rng, vars, degree, depth - 1);
    match rng.gen_range(0..5) {
        0 => Formula::not(a),
        k => {
            let b = random_formula(rng, vars, degree, depth - 1);
            match k {
                1 => Formula::and(a, b),
                2 => Formula::or(a, b),
                3 => Formula::implies(a, b),
                _ => Formula::iff(a, b),
            }
        }
    }
}

fn random_matrix(c: Context, rng: &mut ChaCha8Rng) -> Minmatrix {
    let density = rng.gen_range(0.0..1.0);
    Minmatrix::from_indices(c, (0..c.universe_size()).filter(|_| rng.gen_bool(density))).unwrap()
}

fn random_sub(v: u32, rng: &mut ChaCha8Rng) -> Substitution {
    let mask = (1u64 << (1u32 << v)) - 1;
    Substitution::from_tables(v, (0..v).map(|_| rng.gen::<u64>() & mask).collect()).unwrap()
}

const CASES: usize = 1000;

fn properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6d6d77);
    let c2 = ctx(2, 1);
    for _ in 0..CASES {
        let f = random_formula(&mut rng, 2, 1, 5);
        let m = normalize(&f, c2).unwrap();
        ensure(normalize(&m.to_formula(), c2).unwrap() == m, || format!("idempotence fails on {f}"))?;
    }
    for _ in 0..CASES {
        let (a, b) = (random_formula(&mut rng, 2, 1, 4), random_formula(&mut rng, 2, 1, 4));
        let thm = normalize(&Formula::implies(a.clone(), b.clone()), c2).unwrap().is_theorem_k();
        let sub = normalize(&a, c2).unwrap().is_subset(&normalize(&b, c2).unwrap()).unwrap();
        ensure(thm == sub, || format!("implication/subset disagree on {a} and {b}"))?;
    }
    for _ in 0..CASES {
        let v = rng.gen_range(1..=2);
        let c = ctx(v, 1);
        let m = random_matrix(c, &mut rng);
        let (a, b) = (random_sub(v, &mut rng), random_sub(v, &mut rng));
        let lhs = apply_minmatrix(&m, &a.compose(&b).unwrap()).unwrap();
        let rhs = apply_minmatrix(&apply_minmatrix(&m, &a).unwrap(), &b).unwrap();
        ensure(lhs == rhs, || "action compatibility fails".into())?;
    }
    for _ in 0..CASES {
        let v = rng.gen_range(1..=3);
        let c = ctx(v, 1);
        let (m, split) = (random_matrix(c, &mut rng), random_matrix(c, &mut rng));
        let k = Kernel::new(&random_sub(v, &mut rng), c).unwrap();
        let a = k.apply_minmatrix(&m.intersection(&split).unwrap()).unwrap();
        let b = k.apply_minmatrix(&m.difference(&split).unwrap()).unwrap();
        ensure(a.intersection(&b).unwrap().is_empty(), || "disjoint inputs share an image minterm".into())?;
    }
    for _ in 0..CASES {
        let v = rng.gen_range(1..=2);
        let c = ctx(v, 1);
        let big = random_matrix(c, &mut rng);
        let small = big.intersection(&random_matrix(c, &mut rng)).unwrap();
        let (cb, cs) = (collapse_standard(&big).unwrap(), collapse_standard(&small).unwrap());
        ensure(cs.is_subset(&cb).unwrap(), || "collapse is not monotone".into())?;
        ensure(collapse_standard(&cb).unwrap() == cb, || "collapse is not idempotent".into())?;
        ensure(cb.is_subset(&big).unwrap(), || "collapse grew its input".into())?;
    }
    let cmms = enumerate_cmms(3).unwrap();
    for _ in 0..CASES {
        let (x, y) = (&cmms[rng.gen_range(0..cmms.len())], &cmms[rng.gen_range(0..cmms.len())]);
        let u = x.orbits.union(y.orbits);
        ensure(cmms.iter().any(|c| c.orbits == u), || format!("union {} is not a CMM", u.display(3)))?;
        let meet = x.matrix.intersection(&y.matrix).unwrap();
        let cm = collapse_standard(&meet).unwrap();
        ensure(cm == meet && orbits_of_matrix(&cm).unwrap().is_some(), || "meet is not a CMM".into())?;
    }
    Ok(format!(
        "{CASES} cases each: idempotence, implication/subset, action compatibility, disjoint images, collapse monotone/idempotent, union closure, meet equality (proptest suites in tests/properties.rs)"
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, Duration, fn() -> Outcome); 9] = [
        ("normalization goldens", Duration::from_secs(1), normalization),
        ("prime substitution counts", Duration::from_secs(10), primes),
        ("prime orbits", Duration::from_secs(30), orbits),
        ("lattice census", Duration::from_secs(120), census),
        ("dependency rules", Duration::from_secs(60), dependency_rules),
        ("substitution classification", Duration::from_secs(3605), classification),
        ("axiom registry", Duration::from_secs(300), registry),
        ("frame correspondence", Duration::from_secs(600), correspondence),
        ("property suites", Duration::from_secs(600), properties),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(note) if took > *budget => Err(format!("{note}; took {took:.2?}, budget {budget:?}")),
            o => o,
        };
        match outcome {
            Ok(note) => println!("PASS {} {name}: {note} [{took:.2?}]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why} [{took:.2?}]", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
