//! What the base station infers from each phase-1 block outcome.

use m2m_cogmac::estimators::{symbol_matrix, BlockDecoder, Protocol, Verdict};

fn main() -> m2m_cogmac::Result<()> {
    for (protocol, types) in [(Protocol::Method1, 3), (Protocol::Method2, 4), (Protocol::Method2, 5)] {
        let dec = BlockDecoder::new(symbol_matrix(protocol, types)?)?;
        println!("{protocol:?}, T = {types}, broadcast bits per block: {}", dec.bits_per_block());
        for outcome in dec.reachable_outcomes() {
            let block = dec.decode(&outcome)?;
            let list = |v| {
                block
                    .types_with(v)
                    .iter()
                    .map(|b| (b + 1).to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            };
            let amb: Vec<String> = block.ambiguity.iter().map(|a| a.to_string()).collect();
            println!(
                "  {:<4} active [{}] inactive [{}] {}",
                outcome.iter().map(|o| o.code()).collect::<String>(),
                list(Verdict::Active),
                list(Verdict::Inactive),
                amb.join(" ")
            );
        }
    }
    Ok(())
}
