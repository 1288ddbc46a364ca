//! Exhaustive block decoder.
//!
//! For a symbol matrix with `T` rows, every hypothesis assigns each type a
//! multiplicity class (zero, one, two or more active nodes in the block).
//! The forward model maps a hypothesis to per-slot outcomes; the decoder
//! inverts it by enumeration and summarizes what the base station can infer.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::ids::ceil_log2;
use crate::slot::{SlotOutcome, SlotTally};

use super::matrix::SymbolMatrix;

/// Largest type count the enumeration accepts (`3^13` hypotheses).
pub const MAX_DECODER_TYPES: usize = 13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Multiplicity {
    Zero,
    One,
    TwoPlus,
}

impl Multiplicity {
    pub const ALL: [Multiplicity; 3] = [Multiplicity::Zero, Multiplicity::One, Multiplicity::TwoPlus];

    pub fn from_count(n: u64) -> Self {
        match n {
            0 => Multiplicity::Zero,
            1 => Multiplicity::One,
            _ => Multiplicity::TwoPlus,
        }
    }

    /// Smallest node count in the class.
    pub fn representative(self) -> u64 {
        match self {
            Multiplicity::Zero => 0,
            Multiplicity::One => 1,
            Multiplicity::TwoPlus => 2,
        }
    }

    pub fn is_active(self) -> bool {
        self != Multiplicity::Zero
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Active,
    Inactive,
    Ambiguous,
}

/// One factor of the remaining uncertainty. Type indices are 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ambiguity {
    /// The type's activity is unknown and unconstrained by the others.
    Independent(usize),
    /// Exactly one type of the set is active.
    ExactlyOneOf(Vec<usize>),
    /// Any other coupling that does not split further.
    Joint(Vec<usize>),
}

impl Ambiguity {
    pub fn types(&self) -> Vec<usize> {
        match self {
            Ambiguity::Independent(b) => vec![*b],
            Ambiguity::ExactlyOneOf(g) | Ambiguity::Joint(g) => g.clone(),
        }
    }
}

impl fmt::Display for Ambiguity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |g: &[usize]| {
            g.iter()
                .map(|b| (b + 1).to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        match self {
            Ambiguity::Independent(b) => write!(f, "independent({})", b + 1),
            Ambiguity::ExactlyOneOf(g) => write!(f, "one-of{{{}}}", list(g)),
            Ambiguity::Joint(g) => write!(f, "joint{{{}}}", list(g)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodedBlock {
    pub verdicts: Vec<Verdict>,
    /// Partition of the ambiguous types, ordered by smallest member.
    pub ambiguity: Vec<Ambiguity>,
    /// Every multiplicity hypothesis consistent with the outcome.
    pub profiles: Vec<Vec<Multiplicity>>,
}

impl DecodedBlock {
    pub fn types_with(&self, v: Verdict) -> Vec<usize> {
        (0..self.verdicts.len())
            .filter(|&b| self.verdicts[b] == v)
            .collect()
    }

    pub fn ambiguous_set(&self) -> BTreeSet<usize> {
        self.types_with(Verdict::Ambiguous).into_iter().collect()
    }

    pub fn is_resolved(&self) -> bool {
        self.ambiguity.is_empty()
    }
}

/// Slot outcomes produced by a multiplicity profile.
pub fn forward_outcome(matrix: &SymbolMatrix, profile: &[Multiplicity]) -> Vec<SlotOutcome> {
    let counts: Vec<u64> = profile.iter().map(|m| m.representative()).collect();
    forward_counts(matrix, &counts)
}

/// Slot outcomes when type `b` has `counts[b]` active nodes in the block.
pub fn forward_counts(matrix: &SymbolMatrix, counts: &[u64]) -> Vec<SlotOutcome> {
    (0..matrix.slots())
        .map(|s| {
            let mut tally = SlotTally::default();
            for (b, &n) in counts.iter().enumerate() {
                tally.add(matrix.symbol(b, s), n);
            }
            tally.outcome()
        })
        .collect()
}

fn all_profiles(types: usize) -> impl Iterator<Item = Vec<Multiplicity>> {
    let total = 3usize.pow(types as u32);
    (0..total).map(move |mut code| {
        let mut p = Vec::with_capacity(types);
        for _ in 0..types {
            p.push(Multiplicity::ALL[code % 3]);
            code /= 3;
        }
        p
    })
}

/// Outcome-indexed decode table for one symbol matrix.
#[derive(Debug, Clone)]
pub struct BlockDecoder {
    matrix: SymbolMatrix,
    table: HashMap<Vec<SlotOutcome>, DecodedBlock>,
}

impl BlockDecoder {
    pub fn new(matrix: SymbolMatrix) -> Result<Self> {
        let types = matrix.types();
        if types > MAX_DECODER_TYPES {
            return Err(Error::invalid(format!(
                "decoder supports at most {MAX_DECODER_TYPES} types, got {types}"
            )));
        }
        let mut groups: HashMap<Vec<SlotOutcome>, Vec<Vec<Multiplicity>>> = HashMap::new();
        for p in all_profiles(types) {
            groups.entry(forward_outcome(&matrix, &p)).or_default().push(p);
        }
        let table = groups
            .into_iter()
            .map(|(o, profiles)| {
                let d = summarize(types, profiles);
                (o, d)
            })
            .collect();
        Ok(Self { matrix, table })
    }

    pub fn matrix(&self) -> &SymbolMatrix {
        &self.matrix
    }

    pub fn decode(&self, outcome: &[SlotOutcome]) -> Result<&DecodedBlock> {
        self.table.get(outcome).ok_or_else(|| Error::ProtocolViolation {
            outcome: outcome.to_vec(),
            types: self.matrix.types(),
        })
    }

    /// Every reachable outcome vector, in lexicographic order.
    pub fn reachable_outcomes(&self) -> Vec<Vec<SlotOutcome>> {
        let mut v: Vec<_> = self.table.keys().cloned().collect();
        v.sort();
        v
    }

    /// The family of ambiguous-type sets over all reachable outcomes,
    /// including the empty set.
    pub fn not_sure_sets(&self) -> BTreeSet<BTreeSet<usize>> {
        self.table.values().map(DecodedBlock::ambiguous_set).collect()
    }

    /// Bits needed to name one member of [`Self::not_sure_sets`].
    pub fn bits_per_block(&self) -> u32 {
        ceil_log2(self.not_sure_sets().len() as u64)
    }
}

pub fn decode_block(matrix: &SymbolMatrix, outcome: &[SlotOutcome]) -> Result<DecodedBlock> {
    if outcome.len() != matrix.slots() {
        return Err(Error::invalid(format!(
            "outcome has {} slots, matrix has {}",
            outcome.len(),
            matrix.slots()
        )));
    }
    BlockDecoder::new(matrix.clone())?.decode(outcome).cloned()
}

/// Verdicts and ambiguity structure of a set of consistent hypotheses.
pub fn summarize(types: usize, profiles: Vec<Vec<Multiplicity>>) -> DecodedBlock {
    let verdicts: Vec<Verdict> = (0..types)
        .map(|b| {
            let any_on = profiles.iter().any(|p| p[b].is_active());
            let any_off = profiles.iter().any(|p| !p[b].is_active());
            match (any_on, any_off) {
                (true, false) => Verdict::Active,
                (false, true) => Verdict::Inactive,
                _ => Verdict::Ambiguous,
            }
        })
        .collect();
    let ambiguous: Vec<usize> = (0..types)
        .filter(|&b| verdicts[b] == Verdict::Ambiguous)
        .collect();
    let activity: BTreeSet<Vec<bool>> = profiles
        .iter()
        .map(|p| ambiguous.iter().map(|&b| p[b].is_active()).collect())
        .collect();
    let ambiguity = factorize(&ambiguous, &activity);
    DecodedBlock {
        verdicts,
        ambiguity,
        profiles,
    }
}

/// Positions are indices into `ambiguous`; rows of `activity` follow that order.
fn project(activity: &BTreeSet<Vec<bool>>, positions: &[usize]) -> BTreeSet<Vec<bool>> {
    activity
        .iter()
        .map(|row| positions.iter().map(|&i| row[i]).collect())
        .collect()
}

/// Finest split of the activity set into a Cartesian product over groups.
fn factorize(ambiguous: &[usize], activity: &BTreeSet<Vec<bool>>) -> Vec<Ambiguity> {
    let mut rest: Vec<usize> = (0..ambiguous.len()).collect();
    let mut out = Vec::new();
    while let Some(&first) = rest.first() {
        let others = &rest[1..];
        let whole = project(activity, &rest);
        let mut group = rest.clone();
        'search: for size in 0..=others.len() {
            for combo in combinations(others, size) {
                let mut g = vec![first];
                g.extend(combo);
                let r: Vec<usize> = rest.iter().copied().filter(|x| !g.contains(x)).collect();
                let pg = project(activity, &g);
                let pr = project(activity, &r);
                if pg.len() * pr.len() == whole.len() {
                    group = g;
                    break 'search;
                }
            }
        }
        group.sort_unstable();
        let proj = project(activity, &group);
        let types: Vec<usize> = group.iter().map(|&i| ambiguous[i]).collect();
        let one_hot = proj.len() == group.len()
            && proj.iter().all(|row| row.iter().filter(|&&x| x).count() == 1);
        out.push(if types.len() == 1 {
            Ambiguity::Independent(types[0])
        } else if one_hot {
            Ambiguity::ExactlyOneOf(types)
        } else {
            Ambiguity::Joint(types)
        });
        rest.retain(|x| !group.contains(x));
    }
    out
}

fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if items.len() < k {
        return vec![];
    }
    let mut out = Vec::new();
    for (i, &x) in items.iter().enumerate() {
        for mut tail in combinations(&items[i + 1..], k - 1) {
            tail.insert(0, x);
            out.push(tail);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::matrix::{symbol_matrix, Protocol};
    use crate::slot::parse_outcomes;

    fn dec(p: Protocol, t: usize) -> BlockDecoder {
        BlockDecoder::new(symbol_matrix(p, t).unwrap()).unwrap()
    }

    #[test]
    fn all_empty_is_all_inactive() {
        for t in 2..=7 {
            let d = dec(Protocol::Method2, t);
            let eta = d.matrix().slots();
            let b = d.decode(&vec![SlotOutcome::Empty; eta]).unwrap();
            assert!(b.verdicts.iter().all(|&v| v == Verdict::Inactive));
            assert_eq!(b.profiles.len(), 1);
        }
    }

    #[test]
    fn unreachable_outcome_is_violation() {
        let d = dec(Protocol::Method1, 3);
        for s in ["Ea", "aE", "ab", "ba"] {
            let o = parse_outcomes(s).unwrap();
            assert!(matches!(
                d.decode(&o),
                Err(Error::ProtocolViolation { types: 3, .. })
            ));
        }
    }

    #[test]
    fn not_sure_set_sizes() {
        assert_eq!(dec(Protocol::Method2, 4).not_sure_sets().len(), 4);
        assert_eq!(dec(Protocol::Method2, 5).not_sure_sets().len(), 6);
        assert_eq!(dec(Protocol::Method2, 6).not_sure_sets().len(), 8);
        assert_eq!(dec(Protocol::Method2, 4).bits_per_block(), 2);
        assert_eq!(dec(Protocol::Method2, 5).bits_per_block(), 3);
        assert_eq!(dec(Protocol::Method2, 6).bits_per_block(), 3);
    }

    #[test]
    fn method1_resolves_everything_but_all_collision() {
        for t in 2..=6 {
            let d = dec(Protocol::Method1, t);
            for o in d.reachable_outcomes() {
                let b = d.decode(&o).unwrap();
                let all_c = o.iter().all(|x| x.is_collision());
                assert_eq!(!b.is_resolved(), all_c, "T={t} {o:?}");
            }
        }
    }

    #[test]
    fn combinations_count() {
        assert_eq!(combinations(&[1, 2, 3, 4], 2).len(), 6);
        assert_eq!(combinations(&[1, 2], 0), vec![Vec::<usize>::new()]);
        assert!(combinations(&[1], 2).is_empty());
    }
}
