use std::sync::OnceLock;

use skat_core::cards::{cards, Card, CardSet, Suit};
use skat_core::game::GameError;
use skat_core::policy::PolicyConfig;
use skat_core::rules::Level;
use skat_core::{dd_value, Contract, GameType, Seat};
use skat_replay::record::RecordResult;
use skat_replay::selfplay::selfplay;
use skat_replay::{emit_log, glassbox, parse_log, parse_record, DealError, GameRecord, RecordError};

fn quick() -> PolicyConfig {
    PolicyConfig {
        decision_budget_ms: 200,
        world_cap: 200,
        ..PolicyConfig::default()
    }
}

fn games() -> &'static Vec<GameRecord> {
    static G: OnceLock<Vec<GameRecord>> = OnceLock::new();
    G.get_or_init(|| selfplay(8, 5, &quick()).unwrap())
}

#[test]
fn emit_parse_round_trip() {
    let text = emit_log(games());
    let back = parse_log(&text).unwrap();
    assert_eq!(&back, games());
    assert_eq!(emit_log(&back), text);
}

#[test]
fn logged_moves_reproduce_points() {
    for r in games() {
        let s = r.settlement().unwrap();
        assert_eq!(s.declarer_points, r.result.declarer_points);
        assert_eq!(s.outcome.won, r.result.won);
    }
}

/// Follow-suit oracle written from the rules: trumps are the jacks and the
/// trump suit; a led class must be followed when held.
fn class(game: GameType, c: Card) -> u8 {
    let jack = c.rank() == skat_core::Rank::Jack;
    match game {
        GameType::Grand if jack => 4,
        GameType::Suit(t) if jack || c.suit() == t => 4,
        _ => c.suit() as u8,
    }
}

#[test]
fn breaking_follow_suit_names_the_ply() {
    let mut found = 0;
    for r in games() {
        let state = r.replay().unwrap();
        let mut hands = r.setup().unwrap().hands;
        let mut seats = Vec::new();
        for e in &state.events {
            if let skat_core::game::Event::Played { seat, .. } = e {
                seats.push(*seat);
            }
        }
        for (ply, &card) in r.moves.iter().enumerate() {
            let seat = seats[ply];
            let lead_ply = ply - ply % 3;
            if ply % 3 != 0 {
                let led = class(r.contract.game, r.moves[lead_ply]);
                let bad = hands[seat.index()].iter().find(|&c| class(r.contract.game, c) != led);
                let follows = hands[seat.index()].iter().any(|c| class(r.contract.game, c) == led);
                if let (Some(bad), true) = (bad, follows) {
                    let mut broken = r.clone();
                    broken.moves[ply] = bad;
                    match broken.validate() {
                        Err(RecordError::IllegalMove { ply: p, card, error }) => {
                            assert_eq!((p, card), (ply, bad));
                            assert!(matches!(error, GameError::MustFollow { .. }));
                        }
                        other => panic!("expected illegal move at {ply}, got {other:?}"),
                    }
                    found += 1;
                    break;
                }
            }
            hands[seat.index()].remove(card);
        }
    }
    assert!(found > 0);
}

#[test]
fn duplicate_card_is_named() {
    let line = games()[0].to_json();
    let mut v: serde_json::Value = serde_json::from_str(&line).unwrap();
    let dup = v["hands"][1][0].clone();
    v["hands"][0].as_array_mut().unwrap().push(dup.clone());
    let text = format!("\n{}\n", v);
    let err = parse_log(&text).unwrap_err();
    assert_eq!(err.line, 2);
    let card: Card = dup.as_str().unwrap().parse().unwrap();
    assert_eq!(err.error, RecordError::Deal(DealError::Duplicate(card)));
    assert!(err.to_string().contains(&card.to_string()));
}

#[test]
fn schema_errors_are_named() {
    assert!(matches!(parse_record("{}"), Err(RecordError::Schema(_))));
    let line = games()[0].to_json().replace("\"bid\"", "\"bad\"");
    assert!(matches!(parse_record(&line), Err(RecordError::Schema(_))));
}

#[test]
fn wrong_result_is_rejected() {
    let mut r = games()[0].clone();
    r.result = RecordResult {
        declarer_points: r.result.declarer_points + 1,
        won: r.result.won,
    };
    assert!(matches!(parse_record(&r.to_json()), Err(RecordError::Result { .. })));
}

#[test]
fn truncated_moves_are_incomplete() {
    let mut r = games()[0].clone();
    r.moves.truncate(3);
    assert!(matches!(parse_record(&r.to_json()), Err(RecordError::Incomplete(3))));
}

fn record(hands: [&str; 3], skat: &str, contract: Contract, discard: &str) -> GameRecord {
    GameRecord {
        id: None,
        dealer: Seat(2),
        hands: hands.map(cards),
        skat: cards(skat),
        declarer: Seat(0),
        bid: 18,
        contract,
        discard: cards(discard),
        moves: Vec::new(),
        result: RecordResult {
            declarer_points: 0,
            won: false,
        },
    }
}

#[test]
fn glassbox_on_a_lock() {
    let r = record(
        [
            "CJ SJ HJ DJ CA SA HA DA CT ST",
            "C7 C8 C9 CQ S7 S8 S9 SQ H7 H8",
            "H9 HQ HK D7 D8 D9 DQ DK CK SK",
        ],
        "HT DT",
        Contract::new(GameType::Grand),
        "HT DT",
    );
    assert!(glassbox(&r).unwrap());
}

#[test]
fn glassbox_matches_strict_value() {
    for r in games() {
        let Some(limit) = r.contract.limit() else { continue };
        let pos = r.setup().unwrap().position().unwrap();
        assert_eq!(glassbox(r).unwrap(), dd_value(&pos) > limit as u32);
    }
}

#[test]
fn glassbox_null() {
    let safe = record(
        [
            "C7 C8 S7 S8 H7 H8 D7 D8 C9 S9",
            "CA CK CQ SA SK SQ HA HK HQ DA",
            "CJ SJ HJ DJ CT ST HT DT DK DQ",
        ],
        "H9 D9",
        Contract::new(GameType::Null),
        "H9 D9",
    );
    assert!(glassbox(&safe).unwrap());
    let doomed = record(
        [
            "CA CK CQ SA SK SQ HA HK HQ DA",
            "C7 C8 S7 S8 H7 H8 D7 D8 C9 S9",
            "CJ SJ HJ DJ CT ST HT DT DK DQ",
        ],
        "H9 D9",
        Contract::new(GameType::Null),
        "H9 D9",
    );
    assert!(!glassbox(&doomed).unwrap());
}

#[test]
fn announced_levels_need_hand_games() {
    let mut r = record(
        [
            "CJ SJ HJ DJ CA SA HA DA CT ST",
            "C7 C8 C9 CQ S7 S8 S9 SQ H7 H8",
            "H9 HQ HK D7 D8 D9 DQ DK CK SK",
        ],
        "HT DT",
        Contract::new(GameType::Suit(Suit::Clubs)).with_level(Level::Schneider),
        "HT DT",
    );
    assert!(matches!(r.setup(), Err(RecordError::Contract(GameError::BadAnnouncement))));
    r.contract.hand = true;
    r.discard = CardSet::EMPTY;
    assert!(r.setup().is_ok());
}
