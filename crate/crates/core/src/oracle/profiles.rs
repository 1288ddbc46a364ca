use std::collections::BTreeSet;

use crate::error::Result;
use crate::estimators::{Multiplicity, SymbolMatrix, Verdict};
use crate::slot::{SlotOutcome, Symbol};

use super::OracleBudget;

fn count(m: Multiplicity) -> u64 {
    match m {
        Multiplicity::Zero => 0,
        Multiplicity::One => 1,
        Multiplicity::TwoPlus => 2,
    }
}

fn observe(matrix: &SymbolMatrix, profile: &[Multiplicity], slot: usize) -> SlotOutcome {
    let mut alphas = 0;
    let mut betas = 0;
    for (b, &m) in profile.iter().enumerate() {
        match matrix.symbol(b, slot) {
            Symbol::Alpha => alphas += count(m),
            Symbol::Beta => betas += count(m),
            Symbol::None => {}
        }
    }
    match (alphas, betas) {
        (0, 0) => SlotOutcome::Empty,
        (1, 0) => SlotOutcome::Alpha,
        (0, 1) => SlotOutcome::Beta,
        _ => SlotOutcome::Collision,
    }
}

/// Every multiplicity profile whose slot outcomes equal `outcome`.
pub fn enumerate_consistent_profiles(
    matrix: &SymbolMatrix,
    outcome: &[SlotOutcome],
    budget: &OracleBudget,
) -> Result<BTreeSet<Vec<Multiplicity>>> {
    let types = matrix.types();
    budget.check("profiles", 3u64.saturating_pow(types as u32), budget.max_hypotheses)?;
    let mut found = BTreeSet::new();
    if outcome.len() != matrix.slots() {
        return Ok(found);
    }
    let mut digits = vec![0usize; types];
    loop {
        let profile: Vec<Multiplicity> = digits
            .iter()
            .map(|&d| [Multiplicity::Zero, Multiplicity::One, Multiplicity::TwoPlus][d])
            .collect();
        if (0..matrix.slots()).all(|s| observe(matrix, &profile, s) == outcome[s]) {
            found.insert(profile);
        }
        let mut k = 0;
        loop {
            if k == types {
                return Ok(found);
            }
            digits[k] += 1;
            if digits[k] < 3 {
                break;
            }
            digits[k] = 0;
            k += 1;
        }
    }
}

/// Active when every profile has the type active, inactive when none does.
pub fn verdicts_from_profiles(types: usize, profiles: &BTreeSet<Vec<Multiplicity>>) -> Vec<Verdict> {
    (0..types)
        .map(|b| {
            let on = profiles.iter().filter(|p| p[b] != Multiplicity::Zero).count();
            if on == profiles.len() {
                Verdict::Active
            } else if on == 0 {
                Verdict::Inactive
            } else {
                Verdict::Ambiguous
            }
        })
        .collect()
}
