//! Synthetic logs of deals that are narrow open-card wins for the declarer.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use skat_core::game::{Action, GameState};
use skat_core::gen::{random_deal, random_trump_game};
use skat_core::policy::{best_discard, PolicyConfig};
use skat_core::table::{Table, TableError};
use skat_core::{dd_value, Seat};

use crate::record::GameRecord;

/// `n` games in which the declarer, holding a random trump contract after
/// the discard the heuristic prefers, wins with open cards by at most
/// `margin` points. Card play comes from `policy` in every seat.
pub fn planted_wins(n: usize, seed: u64, margin: u32, policy: &PolicyConfig) -> Result<Vec<GameRecord>, TableError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    let mut deal = 0u32;
    while out.len() < n {
        deal += 1;
        let (hands, skat) = random_deal(&mut rng);
        let dealer = Seat(rng.gen_range(0..3));
        let declarer = Seat(rng.gen_range(0..3));
        let game = random_trump_game(&mut rng);
        let mut g = GameState::new(dealer, hands, skat);
        while let Some(s) = g.to_act().filter(|_| g.declarer.is_none()) {
            let a = if s == declarer { Action::Bid { value: 18 } } else { Action::Pass };
            g.apply(s, a)?;
        }
        g.apply(declarer, Action::PickUp)?;
        let discard = best_discard(g.hands[declarer.index()], game);
        g.apply(
            declarer,
            Action::Declare {
                game,
                discard: Some(discard),
                level: Default::default(),
                ouvert: false,
            },
        )?;
        let value = dd_value(&g.position().expect("trick phase"));
        if value <= 60 || value > 60 + margin {
            continue;
        }
        let mut t = Table::new(g);
        t.play_out(policy)?;
        out.push(GameRecord::from_game(&t.state, Some(format!("planted-{seed}-{deal}"))).expect("finished"));
    }
    Ok(out)
}
