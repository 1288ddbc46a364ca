//! Per-type symbol patterns transmitted inside one phase-1 block.

use std::fmt;

use crate::error::{Error, Result};
use crate::slot::Symbol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Protocol {
    Method1,
    Method2,
}

/// `T` rows (types) by block-length columns (slots).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SymbolMatrix {
    rows: Vec<Vec<Symbol>>,
}

impl SymbolMatrix {
    pub fn from_rows(rows: Vec<Vec<Symbol>>) -> Result<Self> {
        let cols = rows.first().map(Vec::len).unwrap_or(0);
        if rows.is_empty() || cols == 0 || rows.iter().any(|r| r.len() != cols) {
            return Err(Error::invalid("symbol matrix must be a non-empty rectangle"));
        }
        Ok(Self { rows })
    }

    pub fn types(&self) -> usize {
        self.rows.len()
    }

    pub fn slots(&self) -> usize {
        self.rows[0].len()
    }

    pub fn row(&self, type_index: usize) -> &[Symbol] {
        &self.rows[type_index]
    }

    pub fn symbol(&self, type_index: usize, slot: usize) -> Symbol {
        self.rows[type_index][slot]
    }

    pub fn rows(&self) -> &[Vec<Symbol>] {
        &self.rows
    }
}

impl fmt::Display for SymbolMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (b, row) in self.rows.iter().enumerate() {
            write!(f, "{:>3} ", b + 1)?;
            for s in row {
                let c = match s {
                    Symbol::None => '0',
                    Symbol::Alpha => 'a',
                    Symbol::Beta => 'b',
                };
                write!(f, "{c}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Block length used by Method II for `t_types` types.
pub fn method2_block_len(type_count: usize) -> usize {
    type_count / 2
}

/// Method I pattern: type 1 sends α in all `T-1` slots, type `b ≥ 2` sends
/// β only in slot `b-1`.
fn method1_rows(type_count: usize) -> Vec<Vec<Symbol>> {
    let slots = type_count - 1;
    let mut rows = vec![vec![Symbol::Alpha; slots]];
    for b in 1..type_count {
        let mut row = vec![Symbol::None; slots];
        row[b - 1] = Symbol::Beta;
        rows.push(row);
    }
    rows
}

fn method2_rows(type_count: usize) -> Vec<Vec<Symbol>> {
    let eta = method2_block_len(type_count);
    let mut rows = Vec::with_capacity(type_count);
    // type k <= eta: α in slots 1..=k
    for k in 1..=eta {
        rows.push((0..eta).map(|s| if s < k { Symbol::Alpha } else { Symbol::None }).collect());
    }
    // type eta+j: β in slots eta-j+1..=eta
    for j in 1..=eta {
        rows.push(
            (0..eta)
                .map(|s| if s >= eta - j { Symbol::Beta } else { Symbol::None })
                .collect(),
        );
    }
    if type_count % 2 == 1 {
        let mut row = vec![Symbol::None; eta];
        row[0] = Symbol::Beta;
        row[eta - 1] = Symbol::Alpha;
        rows.push(row);
    }
    rows
}

/// Method II with two or three types falls back to the Method I pattern.
pub fn symbol_matrix(protocol: Protocol, type_count: usize) -> Result<SymbolMatrix> {
    if type_count < 2 {
        return Err(Error::invalid(format!(
            "symbol matrix needs at least 2 types, got {type_count}"
        )));
    }
    let rows = match protocol {
        Protocol::Method1 => method1_rows(type_count),
        Protocol::Method2 if type_count <= 3 => method1_rows(type_count),
        Protocol::Method2 => method2_rows(type_count),
    };
    SymbolMatrix::from_rows(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn render(m: &SymbolMatrix) -> Vec<String> {
        m.rows()
            .iter()
            .map(|r| {
                r.iter()
                    .map(|s| match s {
                        Symbol::None => '0',
                        Symbol::Alpha => 'a',
                        Symbol::Beta => 'b',
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn method2_tables() {
        let m = symbol_matrix(Protocol::Method2, 4).unwrap();
        assert_eq!(render(&m), ["a0", "aa", "0b", "bb"]);
        let m = symbol_matrix(Protocol::Method2, 5).unwrap();
        assert_eq!(render(&m), ["a0", "aa", "0b", "bb", "ba"]);
        let m = symbol_matrix(Protocol::Method2, 6).unwrap();
        assert_eq!(render(&m), ["a00", "aa0", "aaa", "00b", "0bb", "bbb"]);
    }

    #[test]
    fn method1_pattern() {
        let m = symbol_matrix(Protocol::Method1, 3).unwrap();
        assert_eq!(render(&m), ["aa", "b0", "0b"]);
        let m = symbol_matrix(Protocol::Method1, 2).unwrap();
        assert_eq!(render(&m), ["a", "b"]);
        assert_eq!(symbol_matrix(Protocol::Method2, 3).unwrap(), m_for(3));
    }

    fn m_for(t: usize) -> SymbolMatrix {
        symbol_matrix(Protocol::Method1, t).unwrap()
    }

    #[test]
    fn rows_pairwise_distinct() {
        for t in 2..=12 {
            for p in [Protocol::Method1, Protocol::Method2] {
                let m = symbol_matrix(p, t).unwrap();
                assert_eq!(m.types(), t);
                let mut rows = m.rows().to_vec();
                rows.sort();
                rows.dedup();
                assert_eq!(rows.len(), t, "{p:?} T={t}");
            }
        }
    }

    #[test]
    fn rejects_single_type() {
        assert!(symbol_matrix(Protocol::Method1, 1).is_err());
        assert!(symbol_matrix(Protocol::Method2, 0).is_err());
    }
}
