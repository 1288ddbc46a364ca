//! Transmitted symbols and the four slot outcomes of an ideal collision channel.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    /// Does not transmit.
    None,
    Alpha,
    Beta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SlotOutcome {
    Empty,
    Alpha,
    Beta,
    Collision,
}

impl SlotOutcome {
    pub fn is_empty(self) -> bool {
        self == SlotOutcome::Empty
    }

    pub fn is_collision(self) -> bool {
        self == SlotOutcome::Collision
    }

    /// Short code used in tables and traces: `E`, `a`, `b`, `C`.
    pub fn code(self) -> char {
        match self {
            SlotOutcome::Empty => 'E',
            SlotOutcome::Alpha => 'a',
            SlotOutcome::Beta => 'b',
            SlotOutcome::Collision => 'C',
        }
    }

    pub fn from_code(c: char) -> Option<Self> {
        match c {
            'E' | '0' => Some(SlotOutcome::Empty),
            'a' | 'α' => Some(SlotOutcome::Alpha),
            'b' | 'β' => Some(SlotOutcome::Beta),
            'C' => Some(SlotOutcome::Collision),
            _ => None,
        }
    }

    pub const ALL: [SlotOutcome; 4] = [
        SlotOutcome::Empty,
        SlotOutcome::Alpha,
        SlotOutcome::Beta,
        SlotOutcome::Collision,
    ];
}

impl fmt::Display for SlotOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SlotOutcome::Empty => "empty",
            SlotOutcome::Alpha => "alpha",
            SlotOutcome::Beta => "beta",
            SlotOutcome::Collision => "collision",
        };
        f.write_str(s)
    }
}

/// Parse a compact outcome string like `"CCb"` into per-slot outcomes.
pub fn parse_outcomes(s: &str) -> Option<Vec<SlotOutcome>> {
    s.chars().map(SlotOutcome::from_code).collect()
}

/// Running tally of one slot: how many transmitted and what the last symbol was.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SlotTally {
    transmitters: u64,
    last: Option<Symbol>,
}

impl SlotTally {
    pub fn add(&mut self, symbol: Symbol, count: u64) {
        if symbol != Symbol::None && count > 0 {
            self.transmitters += count;
            self.last = Some(symbol);
        }
    }

    pub fn transmitters(&self) -> u64 {
        self.transmitters
    }

    pub fn outcome(&self) -> SlotOutcome {
        match (self.transmitters, self.last) {
            (0, _) => SlotOutcome::Empty,
            (1, Some(Symbol::Alpha)) => SlotOutcome::Alpha,
            (1, Some(Symbol::Beta)) => SlotOutcome::Beta,
            _ => SlotOutcome::Collision,
        }
    }
}

/// Outcome of a slot given the symbols of everyone who transmitted in it.
pub fn outcome_of_slot(transmissions: &[Symbol]) -> SlotOutcome {
    let mut tally = SlotTally::default();
    for &s in transmissions {
        tally.add(s, 1);
    }
    tally.outcome()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use Symbol::*;

    #[test]
    fn outcome_examples() {
        assert_eq!(outcome_of_slot(&[]), SlotOutcome::Empty);
        assert_eq!(outcome_of_slot(&[Alpha]), SlotOutcome::Alpha);
        assert_eq!(outcome_of_slot(&[Beta]), SlotOutcome::Beta);
        assert_eq!(outcome_of_slot(&[Alpha, Beta]), SlotOutcome::Collision);
        assert_eq!(outcome_of_slot(&[Beta, Beta]), SlotOutcome::Collision);
        assert_eq!(outcome_of_slot(&[None, Beta, None]), SlotOutcome::Beta);
    }

    #[test]
    fn codes_roundtrip() {
        for o in SlotOutcome::ALL {
            assert_eq!(SlotOutcome::from_code(o.code()), Some(o));
        }
        assert_eq!(
            parse_outcomes("CCb").unwrap(),
            vec![
                SlotOutcome::Collision,
                SlotOutcome::Collision,
                SlotOutcome::Beta
            ]
        );
    }

    fn symbol() -> impl Strategy<Value = Symbol> {
        prop_oneof![Just(Alpha), Just(Beta)]
    }

    proptest! {
        #[test]
        fn permutation_invariant(mut v in prop::collection::vec(symbol(), 0..8), seed in any::<u64>()) {
            let before = outcome_of_slot(&v);
            // deterministic shuffle driven by the seed
            let mut s = seed;
            for i in (1..v.len()).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                v.swap(i, (s >> 33) as usize % (i + 1));
            }
            prop_assert_eq!(before, outcome_of_slot(&v));
        }
    }
}
