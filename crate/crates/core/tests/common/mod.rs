//! Published decode tables as test goldens. Types are 1-based here, as in
//! the published tables; outcome strings use `E`/`0` for empty, `a`/`b` for
//! a lone α/β and `C` for a collision.

#![allow(dead_code)]

use std::collections::BTreeSet;

use m2m_cogmac::estimators::{Ambiguity, BlockDecoder, Multiplicity, Verdict};
use m2m_cogmac::estimators::{symbol_matrix, Protocol};
use m2m_cogmac::slot::parse_outcomes;

/// Method I, `T = 3`: block outcome and `B(1,i), B(2,i), B(3,i)`; `None`
/// marks an ambiguous bit.
pub const TABLE_BIT_PATTERNS: [(&str, [Option<u8>; 3]); 12] = [
    ("EE", [Some(0), Some(0), Some(0)]),
    ("EC", [Some(0), Some(0), Some(1)]),
    ("Eb", [Some(0), Some(0), Some(1)]),
    ("CE", [Some(0), Some(1), Some(0)]),
    ("CC", [None, None, None]),
    ("Ca", [Some(1), Some(1), Some(0)]),
    ("Cb", [Some(0), Some(1), Some(1)]),
    ("aC", [Some(1), Some(0), Some(1)]),
    ("aa", [Some(1), Some(0), Some(0)]),
    ("bE", [Some(0), Some(1), Some(0)]),
    ("bC", [Some(0), Some(1), Some(1)]),
    ("bb", [Some(0), Some(1), Some(1)]),
];

/// Ambiguity entry of an inference row.
#[derive(Debug, Clone, Copy)]
pub enum NotSure {
    Single(usize),
    OneOf(&'static [usize]),
}

/// Outcome, active types, inactive types, not-sure entries.
pub type InferenceRow = (&'static str, &'static [usize], &'static [usize], &'static [NotSure]);

use NotSure::{OneOf, Single};

/// Method II, `T = 4`, outcomes with exactly one collision.
pub const TABLE_T4_ONE_COLLISION: [InferenceRow; 6] = [
    ("C0", &[1], &[2, 3, 4], &[]),
    ("Ca", &[1, 2], &[3, 4], &[]),
    ("Cb", &[1], &[2], &[OneOf(&[3, 4])]),
    ("0C", &[3], &[1, 2, 4], &[]),
    ("aC", &[3], &[4], &[OneOf(&[1, 2])]),
    ("bC", &[3, 4], &[1, 2], &[]),
];

/// Method II, `T = 4`: multiplicity patterns that produce `CC`. Entries are
/// `*` (any), `0`, `1`, `>=1` or `>=2`.
pub const TABLE_T4_CC_COMBINATIONS: [[&str; 4]; 6] = [
    ["*", ">=2", "*", "*"],
    ["*", "*", "*", ">=2"],
    ["*", "1", "*", "1"],
    [">=1", "1", ">=1", "0"],
    [">=1", "0", ">=1", "1"],
    [">=2", "0", ">=2", "0"],
];

/// Method II, `T = 5`, outcomes with exactly one collision.
pub const TABLE_T5_ONE_COLLISION: [InferenceRow; 6] = [
    ("C0", &[1], &[2, 3, 4, 5], &[]),
    ("Ca", &[1], &[3, 4], &[OneOf(&[2, 5])]),
    ("Cb", &[1], &[2, 5], &[OneOf(&[3, 4])]),
    ("0C", &[3], &[1, 2, 4, 5], &[]),
    ("aC", &[3], &[4, 5], &[OneOf(&[1, 2])]),
    ("bC", &[3], &[1, 2], &[OneOf(&[4, 5])]),
];

/// Method II, `T = 6`: the outcomes with one or two collisions that leave
/// some type ambiguous. Every other such outcome is fully resolved.
pub const TABLE_T6_AMBIGUOUS: [InferenceRow; 10] = [
    ("Cbb", &[1], &[2, 3, 4], &[OneOf(&[5, 6])]),
    ("aaC", &[4], &[1, 5, 6], &[OneOf(&[2, 3])]),
    ("CC0", &[2], &[3, 4, 5, 6], &[Single(1)]),
    ("CCa", &[2, 3], &[4, 5, 6], &[Single(1)]),
    ("CCb", &[2], &[3], &[Single(1), OneOf(&[4, 5, 6])]),
    ("0CC", &[5], &[1, 2, 3, 6], &[Single(4)]),
    ("aCC", &[5], &[6], &[Single(4), OneOf(&[1, 2, 3])]),
    ("bCC", &[5, 6], &[1, 2, 3], &[Single(4)]),
    ("CaC", &[1, 4], &[5, 6], &[OneOf(&[2, 3])]),
    ("CbC", &[1, 4], &[2, 3], &[OneOf(&[5, 6])]),
];

pub fn decoder(protocol: Protocol, types: usize) -> BlockDecoder {
    BlockDecoder::new(symbol_matrix(protocol, types).unwrap()).unwrap()
}

fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|b| b + 1).collect()
}

/// Mismatches between the decoder and the bit-pattern table, plus any
/// reachable outcome the table leaves out.
pub fn bit_pattern_mismatches() -> Vec<String> {
    let d = decoder(Protocol::Method1, 3);
    let mut out = Vec::new();
    for (o, bits) in TABLE_BIT_PATTERNS {
        let block = match d.decode(&parse_outcomes(o).unwrap()) {
            Ok(b) => b,
            Err(e) => {
                out.push(format!("{o}: {e}"));
                continue;
            }
        };
        let got: Vec<Option<u8>> = block
            .verdicts
            .iter()
            .map(|v| match v {
                Verdict::Active => Some(1),
                Verdict::Inactive => Some(0),
                Verdict::Ambiguous => None,
            })
            .collect();
        if got != bits {
            out.push(format!("{o}: {got:?} vs {bits:?}"));
        }
    }
    let listed: BTreeSet<_> = TABLE_BIT_PATTERNS.iter().map(|r| parse_outcomes(r.0).unwrap()).collect();
    let reachable: BTreeSet<_> = d.reachable_outcomes().into_iter().collect();
    if listed != reachable {
        out.push(format!("reachable outcomes differ: {} listed, {} reachable", listed.len(), reachable.len()));
    }
    out
}

/// Mismatches between the decoder and inference rows for `types`.
pub fn inference_mismatches(types: usize, rows: &[InferenceRow]) -> Vec<String> {
    let d = decoder(Protocol::Method2, types);
    let mut out = Vec::new();
    for &(o, active, inactive, not_sure) in rows {
        let block = match d.decode(&parse_outcomes(o).unwrap()) {
            Ok(b) => b,
            Err(e) => {
                out.push(format!("T={types} {o}: {e}"));
                continue;
            }
        };
        if one_based(&block.types_with(Verdict::Active)) != active {
            out.push(format!("T={types} {o}: active {:?}", one_based(&block.types_with(Verdict::Active))));
        }
        if one_based(&block.types_with(Verdict::Inactive)) != inactive {
            out.push(format!("T={types} {o}: inactive {:?}", one_based(&block.types_with(Verdict::Inactive))));
        }
        let mut want: Vec<Ambiguity> = not_sure
            .iter()
            .map(|n| match *n {
                Single(b) => Ambiguity::Independent(b - 1),
                OneOf(g) => Ambiguity::ExactlyOneOf(g.iter().map(|b| b - 1).collect()),
            })
            .collect();
        want.sort();
        let mut got = block.ambiguity.clone();
        got.sort();
        if got != want {
            out.push(format!("T={types} {o}: not sure {got:?}"));
        }
    }
    out
}

/// Outcomes of `types` with one or two collisions that are ambiguous but
/// missing from `rows`.
pub fn unlisted_ambiguous(types: usize, rows: &[InferenceRow]) -> Vec<String> {
    let d = decoder(Protocol::Method2, types);
    let listed: BTreeSet<_> = rows.iter().map(|r| parse_outcomes(r.0).unwrap()).collect();
    d.reachable_outcomes()
        .into_iter()
        .filter(|o| (1..=2).contains(&o.iter().filter(|x| x.is_collision()).count()))
        .filter(|o| !listed.contains(o) && !d.decode(o).unwrap().is_resolved())
        .map(|o| o.iter().map(|x| x.code()).collect())
        .collect()
}

fn admits(entry: &str, m: Multiplicity) -> bool {
    match entry {
        "*" => true,
        "0" => m == Multiplicity::Zero,
        "1" => m == Multiplicity::One,
        ">=1" => m != Multiplicity::Zero,
        ">=2" => m == Multiplicity::TwoPlus,
        _ => panic!("unknown entry {entry}"),
    }
}

/// Whether the `CC` profiles of the `T = 4` decoder are exactly those the
/// combination table admits.
pub fn cc_combinations_match() -> bool {
    let d = decoder(Protocol::Method2, 4);
    let block = d.decode(&parse_outcomes("CC").unwrap()).unwrap();
    let got: BTreeSet<Vec<Multiplicity>> = block.profiles.iter().cloned().collect();
    let mut want = BTreeSet::new();
    for code in 0..81usize {
        let mut c = code;
        let p: Vec<Multiplicity> = (0..4)
            .map(|_| {
                let m = Multiplicity::ALL[c % 3];
                c /= 3;
                m
            })
            .collect();
        if TABLE_T4_CC_COMBINATIONS
            .iter()
            .any(|row| row.iter().zip(&p).all(|(e, &m)| admits(e, m)))
        {
            want.insert(p);
        }
    }
    got == want
}

/// All published tables, as `(name, mismatches)`.
pub fn all_table_mismatches() -> Vec<(&'static str, Vec<String>)> {
    let mut t6 = inference_mismatches(6, &TABLE_T6_AMBIGUOUS);
    t6.extend(unlisted_ambiguous(6, &TABLE_T6_AMBIGUOUS).into_iter().map(|o| format!("unlisted {o}")));
    vec![
        ("bit patterns, T = 3", bit_pattern_mismatches()),
        ("one collision, T = 4", inference_mismatches(4, &TABLE_T4_ONE_COLLISION)),
        (
            "CC combinations, T = 4",
            if cc_combinations_match() { vec![] } else { vec!["profile sets differ".into()] },
        ),
        ("one collision, T = 5", inference_mismatches(5, &TABLE_T5_ONE_COLLISION)),
        ("ambiguous outcomes, T = 6", t6),
    ]
}
