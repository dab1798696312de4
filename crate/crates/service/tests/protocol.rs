use serde_json::{json, Value};
use skat_core::game::{Action, GameError, Phase};
use skat_core::policy::{pick_game, PolicyConfig, Source};
use skat_core::{Card, CardSet, Seat};
use skat_replay::parse_record;
use skat_service::{Envelope, Service, ServiceConfig, Snapshot};

fn quick() -> PolicyConfig {
    PolicyConfig {
        decision_budget_ms: 200,
        world_cap: 200,
        ..PolicyConfig::default()
    }
}

fn service() -> Service {
    Service::new(ServiceConfig {
        policy: quick(),
        ..ServiceConfig::default()
    })
}

fn send(svc: &Service, kind: &str, session: Option<&str>, payload: Value) -> Envelope {
    svc.handle(Envelope {
        kind: kind.into(),
        session: session.map(String::from),
        seq: 1,
        payload,
    })
}

fn create(svc: &Service, payload: Value) -> String {
    let r = send(svc, "create_session", None, payload);
    assert_eq!(r.kind, "session_created", "{r:?}");
    r.session.unwrap()
}

fn error_code(e: &Envelope) -> &str {
    assert_eq!(e.kind, "error", "{e:?}");
    e.payload["code"].as_str().unwrap()
}

fn snapshot(svc: &Service, id: &str, seat: u8) -> Snapshot {
    let r = send(svc, "state_snapshot", Some(id), json!({"seat": seat}));
    assert_eq!(r.kind, "snapshot");
    serde_json::from_value(r.payload).unwrap()
}

fn legal(svc: &Service, id: &str, seat: Seat) -> Vec<Action> {
    let r = send(svc, "legal_actions", Some(id), json!({"seat": seat}));
    serde_json::from_value(r.payload["actions"].clone()).unwrap()
}

fn submit(svc: &Service, id: &str, seat: Seat, action: Action) -> Envelope {
    send(svc, "submit_action", Some(id), json!({"seat": seat, "action": action}))
}

fn to_act(svc: &Service, id: &str) -> Option<Seat> {
    snapshot(svc, id, 0).to_act
}

/// Every string in the JSON that names a card.
fn cards_in(v: &Value, out: &mut CardSet) {
    match v {
        Value::String(s) => {
            if let Ok(c) = s.parse::<Card>() {
                out.insert(c);
            }
        }
        Value::Array(a) => a.iter().for_each(|x| cards_in(x, out)),
        Value::Object(o) => o.values().for_each(|x| cards_in(x, out)),
        _ => {}
    }
}

/// What `seat` may know right now, computed from the server's true state.
fn knowable(svc: &Service, id: &str, seat: Seat) -> CardSet {
    let handle = svc.session(id).unwrap();
    let s = handle.lock().unwrap();
    let st = &s.table.state;
    if st.phase == Phase::Finished {
        return CardSet::DECK;
    }
    let mut k = st.deal[seat.index()];
    for &c in &st.moves {
        k.insert(c);
    }
    if st.declarer == Some(seat) && st.picked_up {
        k |= st.dealt_skat;
    }
    if let (Some(d), Some(c)) = (st.declarer, st.contract) {
        if c.ouvert {
            k |= st.hands[d.index()];
        }
    }
    k
}

/// Checks each seat's snapshot against the server's true state and the
/// information it may hold.
fn check_views(svc: &Service, id: &str) {
    for seat in Seat::ALL {
        let r = send(svc, "state_snapshot", Some(id), json!({"seat": seat}));
        let mut seen = CardSet::EMPTY;
        cards_in(&r.payload, &mut seen);
        let k = knowable(svc, id, seat);
        assert!(seen.is_subset(k), "seat {seat} sees {} beyond {}", seen, k);
        let snap: Snapshot = serde_json::from_value(r.payload).unwrap();
        let handle = svc.session(id).unwrap();
        let s = handle.lock().unwrap();
        let st = &s.table.state;
        assert_eq!(snap, Snapshot::from_events(seat, &s.events_for(seat)));
        assert_eq!(snap.hand, st.hands[seat.index()]);
        assert_eq!(snap.phase, st.phase);
        assert_eq!(snap.to_act, st.to_act());
        assert_eq!(snap.declarer, st.declarer);
        assert_eq!(snap.bid, st.bid);
        assert_eq!(snap.declarer_tricks, st.declarer_tricks);
        assert_eq!(snap.opponent_tricks, st.opponent_tricks);
        if st.phase == Phase::Trick {
            assert_eq!(snap.declarer_trick_points, st.declarer_points);
        }
        assert_eq!(snap.settlement, st.settlement);
    }
}

/// Plays a whole deal through the protocol with every seat a client.
fn scripted_game(svc: &Service, seed: u64) -> String {
    let id = create(svc, json!({"human_seats": [0, 1, 2], "dealer": 2, "seed": seed}));
    while let Some(seat) = to_act(svc, &id) {
        check_views(svc, &id);
        let snap = snapshot(svc, &id, seat.0);
        let actions = legal(svc, &id, seat);
        let action = match snap.phase {
            Phase::Bidding if snap.bid == 0 => actions[0],
            Phase::Bidding => Action::Pass,
            Phase::Declaring => {
                let choice = pick_game(snap.hand, snap.bid);
                Action::Declare {
                    game: choice.game,
                    discard: Some(choice.discard),
                    level: Default::default(),
                    ouvert: false,
                }
            }
            _ => *actions.last().unwrap(),
        };
        let r = submit(svc, &id, seat, action);
        assert_eq!(r.kind, "action_applied", "{r:?}");
    }
    check_views(svc, &id);
    id
}

#[test]
fn scripted_games_match_recomputation() {
    let svc = service();
    let mut played = 0;
    for seed in 0..4 {
        let id = scripted_game(&svc, seed);
        let snap = snapshot(&svc, &id, 1);
        let Some(settlement) = snap.settlement else { continue };
        played += 1;
        let r = send(&svc, "export_game", Some(&id), Value::Null);
        assert_eq!(r.kind, "game_record");
        let record = parse_record(r.payload["record"].as_str().unwrap()).unwrap();
        assert_eq!(record.settlement().unwrap(), settlement);
        let handle = svc.session(&id).unwrap();
        let dealt = handle.lock().unwrap().table.state.dealt_skat;
        for seat in Seat::ALL {
            assert_eq!(snapshot(&svc, &id, seat.0).skat, dealt);
        }
    }
    assert!(played > 0);
}

#[test]
fn deviations_from_follow_suit_list_the_legal_cards() {
    let svc = service();
    let id = create(&svc, json!({"human_seats": [0, 1, 2], "dealer": 2, "seed": 3}));
    let mut rejected = false;
    while let Some(seat) = to_act(&svc, &id) {
        let snap = snapshot(&svc, &id, seat.0);
        let actions = legal(&svc, &id, seat);
        if snap.phase == Phase::Trick && !rejected {
            let ok: CardSet = actions
                .iter()
                .filter_map(|a| match a {
                    Action::Play { card } => Some(*card),
                    _ => None,
                })
                .collect();
            if let Some(bad) = (snap.hand & !ok).first() {
                let r = submit(&svc, &id, seat, Action::Play { card: bad });
                assert_eq!(error_code(&r), "illegal_action");
                let reason: GameError = serde_json::from_value(r.payload["reason"].clone()).unwrap();
                assert_eq!(reason, GameError::MustFollow { card: bad, legal: ok });
                assert_eq!(r.payload["reason"]["code"], "must_follow");
                rejected = true;
            }
        }
        let action = match snap.phase {
            Phase::Bidding if snap.bid == 0 => actions[0],
            Phase::Bidding => Action::Pass,
            Phase::Declaring => {
                let c = pick_game(snap.hand, snap.bid);
                Action::Declare {
                    game: c.game,
                    discard: Some(c.discard),
                    level: Default::default(),
                    ouvert: false,
                }
            }
            _ => actions[0],
        };
        assert_eq!(submit(&svc, &id, seat, action).kind, "action_applied");
    }
    assert!(rejected);
}

#[test]
fn error_codes_are_distinct() {
    let svc = service();
    let r = send(&svc, "state_snapshot", Some("nope"), json!({"seat": 0}));
    assert_eq!(error_code(&r), "unknown_session");
    assert_eq!(error_code(&send(&svc, "shuffle", None, Value::Null)), "bad_request");
    assert!(svc.handle_text("not json").contains("bad_request"));

    let id = create(&svc, json!({"human_seats": [0], "dealer": 2, "seed": 1}));
    // forehand is seat 0
    assert_eq!(error_code(&send(&svc, "ai_step", Some(&id), Value::Null)), "not_ai_turn");
    assert_eq!(error_code(&submit(&svc, &id, Seat(1), Action::Pass)), "not_human_seat");
    assert_eq!(error_code(&send(&svc, "export_game", Some(&id), Value::Null)), "not_finished");
    let r = submit(&svc, &id, Seat(0), Action::PickUp);
    assert_eq!(error_code(&r), "wrong_phase");

    let id = create(&svc, json!({"human_seats": [0, 1], "dealer": 2, "seed": 1}));
    assert_eq!(error_code(&submit(&svc, &id, Seat(1), Action::Pass)), "out_of_turn");

    let id = create(&svc, json!({"human_seats": [], "dealer": 0, "seed": 9, "policy": quick()}));
    while to_act(&svc, &id).is_some() {
        assert_eq!(send(&svc, "ai_step", Some(&id), Value::Null).kind, "ai_action");
    }
    assert_eq!(error_code(&send(&svc, "ai_step", Some(&id), Value::Null)), "game_over");
}

#[test]
fn bad_sessions_are_refused() {
    let svc = service();
    let r = send(&svc, "create_session", None, json!({"human_seats": [5]}));
    assert_eq!(error_code(&r), "bad_request");
    let r = send(
        &svc,
        "create_session",
        None,
        json!({"deal": {"hands": [["CJ"], ["SJ"], ["HJ"]], "skat": ["DJ", "CA"]}}),
    );
    assert_eq!(error_code(&r), "bad_request");
    let r = send(&svc, "create_session", None, json!({"policy": {"world_cap": 0}}));
    assert_eq!(error_code(&r), "bad_request");
}

fn killer_deal() -> Value {
    json!({
        "hands": [
            "CJ SJ HJ DJ CA SA HA DA CT ST".split(' ').collect::<Vec<_>>(),
            "C7 C8 C9 CQ S7 S8 S9 SQ H7 H8".split(' ').collect::<Vec<_>>(),
            "H9 HQ HK D7 D8 D9 DQ DK CK SK".split(' ').collect::<Vec<_>>(),
        ],
        "skat": ["HT", "DT"],
    })
}

#[test]
fn ai_moves_carry_proofs() {
    let svc = service();
    let policy = PolicyConfig {
        akbps_start_card: 4,
        kbps_start_card: 4,
        decision_budget_ms: 5_000,
        ..quick()
    };
    let id = create(
        &svc,
        json!({"human_seats": [1, 2], "dealer": 2, "deal": killer_deal(), "analysis": true, "policy": policy}),
    );
    let mut killer = None;
    while let Some(seat) = to_act(&svc, &id) {
        if seat != Seat(0) {
            let a = legal(&svc, &id, seat);
            let action = if a.contains(&Action::Pass) { Action::Pass } else { a[0] };
            assert_eq!(submit(&svc, &id, seat, action).kind, "action_applied");
            continue;
        }
        let r = send(&svc, "ai_step", Some(&id), Value::Null);
        assert_eq!(r.kind, "ai_action", "{r:?}");
        if r.payload["action"]["action"] != "play" {
            continue;
        }
        let rec = &r.payload["analysis"];
        if killer.is_some() {
            assert!(rec.is_null());
        } else if rec["source"] == serde_json::to_value(Source::Killer).unwrap() {
            assert!(rec["proof"].is_string(), "{rec}");
            killer = Some(rec["card"].clone());
            let off = send(&svc, "analysis_toggle", Some(&id), json!({"enabled": false}));
            assert_eq!(off.kind, "analysis");
        } else {
            assert!(rec.is_object());
        }
    }
    assert!(killer.is_some());
    let snap = snapshot(&svc, &id, 0);
    assert_eq!(snap.declarer, Some(Seat(0)));
    assert!(snap.settlement.unwrap().outcome.won);
}

#[test]
fn finished_games_are_exported() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("games.jsonl");
    let svc = Service::new(ServiceConfig {
        policy: quick(),
        export: Some(path.clone()),
        analysis: false,
    });
    let mut finished = 0;
    for seed in 0..3 {
        let id = create(&svc, json!({"dealer": seed % 3, "seed": seed}));
        while to_act(&svc, &id).is_some() {
            send(&svc, "ai_step", Some(&id), Value::Null);
        }
        finished += snapshot(&svc, &id, 0).settlement.is_some() as usize;
    }
    let text = std::fs::read_to_string(&path).unwrap_or_default();
    let records = skat_replay::parse_log(&text).unwrap();
    assert_eq!(records.len(), finished);
}
