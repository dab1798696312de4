#![allow(dead_code)]

use skat_core::{CardSet, KnowledgeView, SearchPosition, World};

/// Final declarer points by plain minimax over every legal move.
pub fn minimax(pos: &SearchPosition) -> u32 {
    if pos.is_over() {
        return pos.aspts + pos.skat.points();
    }
    let values = pos.legal().iter().map(|c| minimax(&pos.play(c).unwrap()));
    if pos.to_move() == pos.declarer {
        values.max().unwrap()
    } else {
        values.min().unwrap()
    }
}

/// Final opponent points with the opponents maximizing.
pub fn minimax_opponents(pos: &SearchPosition) -> u32 {
    if pos.is_over() {
        return pos.gspts;
    }
    let values = pos.legal().iter().map(|c| minimax_opponents(&pos.play(c).unwrap()));
    if pos.to_move() == pos.declarer {
        values.min().unwrap()
    } else {
        values.max().unwrap()
    }
}

/// Whether a Null declarer can avoid every trick.
pub fn minimax_null(pos: &SearchPosition) -> bool {
    if pos.declarer_tricks > 0 {
        return false;
    }
    if pos.is_over() {
        return true;
    }
    let mut results = pos.legal().iter().map(|c| minimax_null(&pos.play(c).unwrap()));
    if pos.to_move() == pos.declarer {
        results.any(|r| r)
    } else {
        results.all(|r| r)
    }
}

/// All completions of a view, by brute force over every split of the unseen
/// cards (no pruning), filtered for consistency with the view's candidate sets.
pub fn brute_worlds(view: &KnowledgeView) -> Vec<World> {
    let b = view.sound_belief();
    let unseen: Vec<_> = b.unplaced().iter().collect();
    let mut out = Vec::new();
    let locs: Vec<usize> = (0..4).filter(|l| b.free & (1 << l) != 0).collect();
    let n = unseen.len();
    let total = locs.len().pow(n as u32);
    for code in 0..total {
        let mut x = code;
        let mut placed = [CardSet::EMPTY; 4];
        let mut ok = true;
        for &c in &unseen {
            let l = locs[x % locs.len()];
            x /= locs.len();
            if !b.maybe[l].contains(c) {
                ok = false;
                break;
            }
            placed[l].insert(c);
        }
        if !ok || locs.iter().any(|&l| placed[l].len() != b.cap[l] as u32) {
            continue;
        }
        let mut hands = [placed[0], placed[1], placed[2]];
        hands[view.seat.index()] = view.own();
        out.push(World {
            hands,
            skat: placed[3],
        });
    }
    out
}

use rand::seq::SliceRandom;
use rand::Rng;
use skat_core::gen::random_deal;
use skat_core::{init_view, GameType, Heuristics, Seat};

/// A random deal played forward with every seat's view kept up to date.
pub struct Played {
    pub pos: SearchPosition,
    pub views: [KnowledgeView; 3],
}

pub fn play_random<R: Rng>(rng: &mut R, game: GameType, plies: usize) -> Played {
    let (hands, skat) = random_deal(rng);
    let declarer = Seat(rng.gen_range(0..3));
    let forehand = Seat(rng.gen_range(0..3));
    let mut pos = SearchPosition::deal(game, declarer, hands, skat, forehand);
    let mut views = Seat::ALL.map(|s| {
        let known = (s == declarer).then_some(skat);
        init_view(s, hands[s.index()], game, declarer, known, forehand)
            .unwrap()
            .with_heuristics(Heuristics::SOUND)
    });
    for _ in 0..plies {
        let legal = pos.legal().to_vec();
        let c = *legal.choose(rng).unwrap();
        let actor = pos.to_move();
        for v in views.iter_mut() {
            *v = v.observe_play(actor, c).unwrap();
        }
        pos = pos.play(c).unwrap();
    }
    Played { pos, views }
}

/// The true world as seen from `view`.
pub fn true_world(pos: &SearchPosition) -> World {
    World {
        hands: pos.hands,
        skat: pos.skat,
    }
}
