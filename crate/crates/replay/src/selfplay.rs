//! Logs of games the computer plays against itself.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use skat_core::gen::random_deal;
use skat_core::policy::PolicyConfig;
use skat_core::table::{Table, TableError};
use skat_core::Seat;

use crate::record::GameRecord;

/// `n` finished games from seeded deals; passed-in deals are skipped and
/// the dealer rotates per deal.
pub fn selfplay(n: usize, seed: u64, policy: &PolicyConfig) -> Result<Vec<GameRecord>, TableError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    let mut deal = 0u32;
    while out.len() < n {
        let (hands, skat) = random_deal(&mut rng);
        let mut t = Table::deal(Seat((deal % 3) as u8), hands, skat);
        t.play_out(policy)?;
        if let Some(r) = GameRecord::from_game(&t.state, Some(format!("{seed}-{deal}"))) {
            out.push(r);
        }
        deal += 1;
    }
    Ok(out)
}
