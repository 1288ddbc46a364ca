use num_rational::Ratio;

use crate::error::{Error, Result};

use super::OracleBudget;

/// Exact `(E[K], E[R])` for Method I by enumerating every hash assignment.
/// A block counts toward `K` when each of its `T-1` phase-1 slots holds at
/// least two transmitters, and toward `R` when it holds two or more Type 1
/// nodes.
pub fn exact_collision_counts(
    n: &[u64],
    t: u32,
    budget: &OracleBudget,
) -> Result<(Ratio<i128>, Ratio<i128>)> {
    if n.len() < 2 || t < 1 {
        return Err(Error::InvalidParameter("need T ≥ 2 and t ≥ 1".into()));
    }
    let nodes: u64 = n.iter().sum();
    budget.check("hash assignments", (t as u64).saturating_pow(nodes as u32), budget.max_hypotheses)?;
    if t + nodes as u32 * t >= 120 {
        return Err(Error::BudgetExceeded("denominator overflows i128".into()));
    }
    let owner: Vec<usize> = n
        .iter()
        .enumerate()
        .flat_map(|(b, &c)| std::iter::repeat_n(b, c as usize))
        .collect();
    let weight = |bin: usize| -> Ratio<i128> {
        let e = if bin + 2 <= t as usize { bin + 1 } else { t as usize - 1 };
        Ratio::new(1, 1i128 << e)
    };
    let mut bins = vec![0usize; owner.len()];
    let mut k_sum = Ratio::from_integer(0);
    let mut r_sum = Ratio::from_integer(0);
    loop {
        let mut w = Ratio::from_integer(1);
        let mut per_block = vec![vec![0u64; n.len()]; t as usize];
        for (node, &bin) in bins.iter().enumerate() {
            w *= weight(bin);
            per_block[bin][owner[node]] += 1;
        }
        let mut k = 0i128;
        let mut r = 0i128;
        for c in &per_block {
            if c[1..].iter().all(|&cb| c[0] + cb >= 2) {
                k += 1;
            }
            if c[0] >= 2 {
                r += 1;
            }
        }
        k_sum += w * k;
        r_sum += w * r;
        let mut i = 0;
        loop {
            if i == bins.len() {
                return Ok((k_sum, r_sum));
            }
            bins[i] += 1;
            if bins[i] < t as usize {
                break;
            }
            bins[i] = 0;
            i += 1;
        }
    }
}

pub fn exact_expected_k_bruteforce(n: &[u64], t: u32, budget: &OracleBudget) -> Result<Ratio<i128>> {
    Ok(exact_collision_counts(n, t, budget)?.0)
}

pub fn exact_expected_r_bruteforce(n: &[u64], t: u32, budget: &OracleBudget) -> Result<Ratio<i128>> {
    Ok(exact_collision_counts(n, t, budget)?.1)
}
