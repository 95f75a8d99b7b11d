//! Reference tables of primes and orbit displays, shared by several test
//! targets.

#![allow(dead_code)]

use mmw_core::orbit::OrbitLabel;
use mmw_core::{normalize, parse, Context, Minmatrix, Substitution};

/// The 24 primes of K[2,1] as `(σ_p, σ_q)`.
pub const PRIMES_V2: [(&str, &str); 24] = [
    ("p", "q"),
    ("!p", "q"),
    ("p", "p<->q"),
    ("!p", "p<->q"),
    ("p<->q", "p"),
    ("p<->!q", "p"),
    ("p", "!q"),
    ("!p", "!q"),
    ("p", "p<->!q"),
    ("!p", "p<->!q"),
    ("p<->q", "!p"),
    ("p<->!q", "!p"),
    ("q", "p"),
    ("!q", "p"),
    ("q", "p<->q"),
    ("!q", "p<->q"),
    ("p<->q", "q"),
    ("p<->!q", "q"),
    ("q", "!p"),
    ("!q", "!p"),
    ("q", "p<->!q"),
    ("!q", "p<->!q"),
    ("p<->q", "!q"),
    ("p<->!q", "!q"),
];

/// K[1,1] orbit displays: rows `p`, `◇p`, `◇!p`, one character per column.
pub const ORBITS_V1: [(OrbitLabel, [&str; 3]); 4] = [
    (OrbitLabel::Vv, ["10", "00", "00"]),
    (OrbitLabel::Dd, ["10", "10", "01"]),
    (OrbitLabel::Dc(1), ["10", "01", "10"]),
    (OrbitLabel::Dw(1), ["10", "11", "11"]),
];

/// K[2,1] orbit displays: rows `p`, `q`, `◇(pq)`, `◇(p!q)`, `◇(!pq)`,
/// `◇(!p!q)`.
pub const ORBITS_V2: [(OrbitLabel, [&str; 6]); 8] = [
    (OrbitLabel::Vv, ["1100", "1010", "0000", "0000", "0000", "0000"]),
    (OrbitLabel::Dd, ["1100", "1010", "1000", "0100", "0010", "0001"]),
    (
        OrbitLabel::Dc(1),
        ["111111000000", "111000111000", "000100100100", "100000010010", "010010000001", "001001001000"],
    ),
    (
        OrbitLabel::Dw(1),
        ["111111000000", "111000111000", "111100100100", "100111010010", "010010111001", "001001001111"],
    ),
    (
        OrbitLabel::Dc(2),
        ["111111000000", "111000111000", "000110110110", "110000101101", "101101000011", "011011011000"],
    ),
    (
        OrbitLabel::Dw(2),
        ["111111000000", "111000111000", "111110110110", "110111101101", "101101111011", "011011011111"],
    ),
    (OrbitLabel::Dc(3), ["1100", "1010", "0111", "1011", "1101", "1110"]),
    (OrbitLabel::Dw(3), ["1100", "1010", "1111", "1111", "1111", "1111"]),
];

/// Minterm indices of a displayed K[v,1] matrix. The first `v` rows hold the
/// prefix, the remaining `n` rows the states of `◇m_{n-1}` down to `◇m_0`.
pub fn display_members(ctx: Context, rows: &[&str]) -> Vec<usize> {
    let v = ctx.v() as usize;
    let n = ctx.n();
    let bit = |r: usize, col: usize| rows[r].as_bytes()[col] == b'1';
    let mut out: Vec<usize> = (0..rows[0].len())
        .map(|col| {
            let s = (0..v).fold(0, |acc, r| acc << 1 | bit(r, col) as usize);
            let e = (0..n).fold(0u64, |acc, j| acc | (bit(v + j, col) as u64) << (n - 1 - j));
            ctx.encode(s, e).unwrap()
        })
        .collect();
    out.sort_unstable_by(|a, b| b.cmp(a));
    out
}

/// Substitution whose components are the given level-0 formulas.
pub fn sub_of(v: u32, comps: &[&str]) -> Substitution {
    let c = Context::new(v, 0).unwrap();
    let tables = comps
        .iter()
        .map(|s| table(&normalize(&parse(s).unwrap(), c).unwrap()))
        .collect();
    Substitution::from_tables(v, tables).unwrap()
}

fn table(m: &Minmatrix) -> u64 {
    m.members().fold(0u64, |t, i| t | 1 << i)
}
