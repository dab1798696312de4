//! Knowledge-based paranoia search.
//!
//! The querying seat searches for a strategy that wins against every
//! consistent world and every reply. Hidden cards are never dealt out up
//! front: the search carries the querier's location masks, and an
//! adversary move is any card the mover may still hold. Playing a card pins
//! it down; failing to follow removes the led class from the mover's mask.
//! Every child is checked for an exact placement of the remaining hidden
//! cards, so the branches explored are exactly the consistent ones.
//!
//! Internally a node answers "does the declarer reach the point target?".
//! For a declarer query the declarer's moves are OR nodes and the
//! opponents' moves are AND nodes. For an opponent query the roles flip and
//! the partner plays for the same side as the querier, but only with cards
//! it holds in every remaining world (its choice must not depend on the
//! placement the adversary picks). A partner without such a card is
//! searched like an adversary.
//!
//! The approximate variant restricts the worlds by an assignment constraint:
//! cards forced to a location and a cap on how many unlocated cards of one
//! class may end up in a single hand.

use std::time::{Duration, Instant};

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::cards::{Card, CardSet};
use crate::error::{Aborted, KnowledgeError, SearchError};
use crate::knowledge::{Heuristics, KnowledgeView};
use crate::placement::{Belief, FlowNet, LOCATIONS, SKAT};
use crate::rules::{GameType, Level, Seat, TrickState};
use crate::solver::{SearchPosition, Solver, Tables};

/// Stop conditions for a search.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Budget {
    pub deadline: Option<Instant>,
    pub max_nodes: Option<u64>,
}

impl Budget {
    pub fn unlimited() -> Budget {
        Budget::default()
    }

    pub fn until(deadline: Instant) -> Budget {
        Budget {
            deadline: Some(deadline),
            max_nodes: None,
        }
    }

    pub fn within(d: Duration) -> Budget {
        Budget::until(Instant::now() + d)
    }

    pub fn nodes(n: u64) -> Budget {
        Budget {
            deadline: None,
            max_nodes: Some(n),
        }
    }

    pub fn expired(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }
}

/// World restriction for the approximate search.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssignmentConstraint {
    /// Cards pinned to a location (seats 0..3, then the skat).
    #[serde(default)]
    pub forced: [CardSet; LOCATIONS],
    /// Most unlocated cards of one class a single hand may receive.
    #[serde(default)]
    pub imbalance_cap: Option<u8>,
}

pub const DEFAULT_IMBALANCE_CAP: u8 = 5;

impl AssignmentConstraint {
    pub fn imbalance(cap: u8) -> AssignmentConstraint {
        AssignmentConstraint {
            forced: [CardSet::EMPTY; LOCATIONS],
            imbalance_cap: Some(cap),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.imbalance_cap.is_none() && self.forced.iter().all(|f| f.is_empty())
    }

    /// The view's belief with forced cards pinned, or `None` if a forced card
    /// cannot lie at its location.
    fn apply(&self, b: &Belief) -> Option<Belief> {
        let mut out = *b;
        for (l, f) in self.forced.iter().enumerate() {
            for c in *f {
                if !b.maybe[l].contains(c) {
                    return None;
                }
                for k in 0..LOCATIONS {
                    if k != l {
                        out.maybe[k].remove(c);
                    }
                }
            }
        }
        Some(out)
    }

    /// Whether a complete world satisfies the constraint relative to `view`.
    pub fn admits(&self, view: &KnowledgeView, world: &crate::knowledge::World) -> bool {
        let Some(b) = self.apply(&view.belief()) else {
            return false;
        };
        let at = |l: usize| if l == SKAT { world.skat } else { world.hands[l] };
        for (l, f) in self.forced.iter().enumerate() {
            if !f.is_subset(at(l)) {
                return false;
            }
        }
        let Some(cap) = self.imbalance_cap else {
            return true;
        };
        let tables = Tables::new(view.game);
        let u = unlocated(&b);
        for s in Seat::ALL {
            if s == view.seat {
                continue;
            }
            for k in class_sets(&tables) {
                if (u & k & world.hands[s.index()]).len() > cap as u32 {
                    return false;
                }
            }
        }
        true
    }
}

/// Cards that may still lie in more than one hand.
fn unlocated(b: &Belief) -> CardSet {
    let mut seen = CardSet::EMPTY;
    let mut twice = CardSet::EMPTY;
    for l in 0..3 {
        if b.free & (1 << l) != 0 {
            twice |= seen & b.maybe[l];
            seen |= b.maybe[l];
        }
    }
    twice
}

fn class_sets(t: &Tables) -> [CardSet; 5] {
    let trump = t.rules.trump;
    [
        crate::cards::Suit::Diamonds.mask() - trump,
        crate::cards::Suit::Hearts.mask() - trump,
        crate::cards::Suit::Spades.mask() - trump,
        crate::cards::Suit::Clubs.mask() - trump,
        trump,
    ]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    /// Forced win for the querying side.
    Win,
    /// No proof found; this claims nothing about the outcome.
    NoProof,
    /// The constraint admits no world.
    Vacuous,
}

impl Verdict {
    pub fn is_win(self) -> bool {
        self == Verdict::Win
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Approximate { constraint: AssignmentConstraint },
}

/// A paranoia question: can the view's seat force a result at `limit`?
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParanoiaQuery {
    pub view: KnowledgeView,
    pub limit: u32,
    pub mode: Mode,
}

impl ParanoiaQuery {
    pub fn exact(view: KnowledgeView, limit: u32) -> ParanoiaQuery {
        ParanoiaQuery {
            view,
            limit,
            mode: Mode::Exact,
        }
    }

    pub fn run(&self, budget: Budget) -> Result<Verdict, SearchError> {
        let constraint = match &self.mode {
            Mode::Exact => None,
            Mode::Approximate { constraint } => Some(constraint),
        };
        let mut p = Prover::new(&self.view, constraint, budget)?;
        Ok(p.prove(self.limit)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct Node {
    maybe: [CardSet; LOCATIONS],
    cap: [u8; LOCATIONS],
    trick: TrickState,
    /// Declarer wins iff their future points exceed this.
    need: i32,
    /// Unlocated cards received per (seat, class), four bits each.
    counts: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
struct Key {
    maybe: [u32; LOCATIONS],
    leader: u8,
    counts: u64,
}

struct Imbalance {
    unlocated: CardSet,
    classes: [CardSet; 5],
    cap: u8,
}

const TT_LIMIT: usize = 1 << 21;

/// Paranoia search for one view; reusable across limits and first moves.
pub struct Prover {
    t: Tables,
    querier: Seat,
    declarer: Seat,
    declarer_query: bool,
    /// Skat points already counted for the declarer.
    credited: bool,
    free: u8,
    imbalance: Option<Imbalance>,
    root: Option<Node>,
    tt: FxHashMap<Key, (u8, u8)>,
    nodes: u64,
    budget: Budget,
    started: Instant,
}

impl Prover {
    pub fn new(
        view: &KnowledgeView,
        constraint: Option<&AssignmentConstraint>,
        budget: Budget,
    ) -> Result<Prover, SearchError> {
        if view.game == GameType::Null {
            return Err(SearchError::NotTrumpGame);
        }
        let mut b = view.belief();
        if !b.feasible() {
            return Err(KnowledgeError::CapacityDeficit.into());
        }
        let t = Tables::new(view.game);
        let mut imbalance = None;
        let mut root_ok = true;
        if let Some(c) = constraint {
            match c.apply(&b) {
                Some(nb) => b = nb,
                None => root_ok = false,
            }
            if let Some(cap) = c.imbalance_cap {
                imbalance = Some(Imbalance {
                    unlocated: unlocated(&b),
                    classes: class_sets(&t),
                    cap,
                });
            }
        }
        let seat = view.seat;
        let mut maybe = b.maybe;
        maybe[seat.index()] = view.own();
        let mut cap = b.cap;
        cap[seat.index()] = view.own().len() as u8;
        let root = Node {
            maybe,
            cap,
            trick: view.trick,
            need: 0,
            counts: 0,
        };
        let mut p = Prover {
            t,
            querier: seat,
            declarer: view.declarer,
            declarer_query: view.is_declarer(),
            credited: view.skat_known(),
            free: b.free,
            imbalance,
            root: None,
            tt: FxHashMap::default(),
            nodes: 0,
            budget,
            started: Instant::now(),
        };
        let mut root = root;
        if root_ok && p.feasible(&root) {
            p.normalize(&mut root);
            p.root = Some(Node {
                need: -(view.aspts as i32),
                ..root
            });
        }
        Ok(p)
    }

    pub fn nodes(&self) -> u64 {
        self.nodes
    }

    pub fn elapsed(&self) -> Duration {
        self.started.elapsed()
    }

    pub fn set_budget(&mut self, budget: Budget) {
        self.budget = budget;
    }

    /// Whether the querying side forces a result at `limit`: declarer points
    /// above it for a declarer, at most it for an opponent.
    pub fn prove(&mut self, limit: u32) -> Result<Verdict, Aborted> {
        let Some(mut root) = self.root else {
            return Ok(Verdict::Vacuous);
        };
        root.need += limit as i32;
        let dw = self.search(&root)?;
        Ok(self.verdict(dw))
    }

    /// As [`Prover::prove`], after the querier plays `card`.
    pub fn prove_after(&mut self, card: Card, limit: u32) -> Result<Verdict, SearchError> {
        let Some(mut root) = self.root else {
            return Ok(Verdict::Vacuous);
        };
        if root.trick.to_move() != self.querier {
            return Err(SearchError::NotToMove(self.querier));
        }
        if !self.legal_for_querier(&root).contains(card) {
            return Err(SearchError::NotPlayable(card));
        }
        root.need += limit as i32;
        let child = self.child(&root, self.querier, card).expect("own card always fits");
        let dw = self.search(&child)?;
        Ok(self.verdict(dw))
    }

    /// The querier's legal cards at the root.
    pub fn legal(&self) -> CardSet {
        self.root.map(|r| self.legal_for_querier(&r)).unwrap_or_default()
    }

    fn legal_for_querier(&self, n: &Node) -> CardSet {
        self.t.rules.playable(n.maybe[self.querier.index()], n.trick.lead())
    }

    fn verdict(&self, declarer_wins: bool) -> Verdict {
        if declarer_wins == self.declarer_query {
            Verdict::Win
        } else {
            Verdict::NoProof
        }
    }

    /// Cards `m` holds and may play in every remaining world.
    fn sure_moves(&self, n: &Node, m: Seat) -> CardSet {
        let mi = m.index();
        let mut others = CardSet::EMPTY;
        for l in 0..LOCATIONS {
            if l != mi {
                others |= n.maybe[l];
            }
        }
        let held = n.maybe[mi] - others;
        match n.trick.lead() {
            None => held,
            Some(l) => {
                let k = self.t.rules.class_of(l);
                if held.intersects(k) {
                    held & k
                } else if n.maybe[mi].intersects(k) {
                    CardSet::EMPTY
                } else {
                    held
                }
            }
        }
    }

    /// Pins cards forced by capacities: a location with exactly as many
    /// candidates as free slots holds all of them.
    fn normalize(&self, n: &mut Node) {
        loop {
            let mut changed = false;
            for l in 0..LOCATIONS {
                if self.free & (1 << l) == 0 || n.maybe[l].len() != n.cap[l] as u32 {
                    continue;
                }
                for k in 0..LOCATIONS {
                    if k != l && n.maybe[k].intersects(n.maybe[l]) {
                        n.maybe[k] -= n.maybe[l];
                        changed = true;
                    }
                }
            }
            if !changed {
                return;
            }
        }
    }

    fn feasible(&self, n: &Node) -> bool {
        let b = Belief {
            maybe: n.maybe,
            cap: n.cap,
            free: self.free,
        };
        if !b.feasible() {
            return false;
        }
        match &self.imbalance {
            Some(im) => self.imbalance_feasible(im, &b, n.counts),
            None => true,
        }
    }

    fn imbalance_feasible(&self, im: &Imbalance, b: &Belief, counts: u64) -> bool {
        let seats: Vec<usize> = (0..3).filter(|&l| self.free & (1 << l) != 0).collect();
        let left = |s: usize, k: usize| im.cap as i32 - ((counts >> (4 * (s * 5 + k))) & 0xf) as i32;
        let mut binding = false;
        for &s in &seats {
            for (k, ks) in im.classes.iter().enumerate() {
                let avail = (b.maybe[s] & im.unlocated & *ks).len() as i32;
                if avail > left(s, k) {
                    binding = true;
                }
            }
        }
        if !binding {
            return true;
        }
        // groups of cards with equal mask and class
        let mut groups: Vec<(u8, usize, i32)> = Vec::new();
        let all = b.unplaced();
        for c in all {
            let m = b.mask_of(c) & self.free;
            let k = if im.unlocated.contains(c) {
                im.classes.iter().position(|ks| ks.contains(c)).unwrap()
            } else {
                5
            };
            match groups.iter_mut().find(|g| g.0 == m && g.1 == k) {
                Some(g) => g.2 += 1,
                None => groups.push((m, k, 1)),
            }
        }
        // nodes: source, groups, (seat, class), locations, sink
        let ng = groups.len();
        let sc = |s: usize, k: usize| 1 + ng + s * 5 + k;
        let loc = |l: usize| 1 + ng + 15 + l;
        let sink = 1 + ng + 15 + LOCATIONS;
        let mut f = FlowNet::new(sink + 1);
        for (i, &(m, k, cnt)) in groups.iter().enumerate() {
            f.add(0, 1 + i, cnt);
            for l in 0..LOCATIONS {
                if m & (1 << l) == 0 {
                    continue;
                }
                if k < 5 && l < 3 {
                    f.add(1 + i, sc(l, k), cnt);
                } else {
                    f.add(1 + i, loc(l), cnt);
                }
            }
        }
        for &s in &seats {
            for k in 0..5 {
                f.add(sc(s, k), loc(s), left(s, k).max(0));
            }
        }
        for l in 0..LOCATIONS {
            if self.free & (1 << l) != 0 {
                f.add(loc(l), sink, b.cap[l] as i32);
            }
        }
        f.max_flow(0, sink) == all.len() as i32
    }

    /// Applies `m` playing `c`; `None` if no consistent world remains.
    fn child(&self, n: &Node, m: Seat, c: Card) -> Option<Node> {
        let mut x = *n;
        let mi = m.index();
        if m != self.querier {
            if let Some(l) = n.trick.lead() {
                let k = self.t.rules.class_of(l);
                if !k.contains(c) {
                    x.maybe[mi] -= k;
                }
            }
            for l in 0..LOCATIONS {
                x.maybe[l].remove(c);
            }
            x.cap[mi] -= 1;
            self.normalize(&mut x);
            if let Some(im) = &self.imbalance {
                if im.unlocated.contains(c) {
                    let k = im.classes.iter().position(|ks| ks.contains(c)).unwrap();
                    let shift = 4 * (mi * 5 + k);
                    x.counts += 1 << shift;
                    if ((x.counts >> shift) & 0xf) as u8 > im.cap {
                        return None;
                    }
                }
            }
            if !self.feasible(&x) {
                return None;
            }
        } else {
            x.maybe[mi].remove(c);
            x.cap[mi] -= 1;
        }
        x.trick.push(c);
        if x.trick.is_complete() {
            let cs = x.trick.cards();
            let w = self.t.rules.winning_index([cs[0], cs[1], cs[2]]);
            let winner = Seat((x.trick.leader.0 + w as u8) % 3);
            if winner == self.declarer {
                x.need -= x.trick.points() as i32;
            }
            x.trick = TrickState::new(winner);
        }
        Some(x)
    }

    fn live(n: &Node) -> CardSet {
        n.maybe[0] | n.maybe[1] | n.maybe[2] | n.maybe[3] | n.trick.card_set()
    }

    /// Adversary candidates. Cards the mover surely holds collapse like
    /// open-card moves; a card that might lie elsewhere is never merged,
    /// since its twin could then sit in another hand.
    fn adversary_moves(&self, n: &Node, m: Seat, live: CardSet) -> CardSet {
        let cand = n.maybe[m.index()];
        let mut others = CardSet::EMPTY;
        for l in 0..LOCATIONS {
            if l != m.index() {
                others |= n.maybe[l];
            }
        }
        let held = cand - others;
        (cand - held) | self.t.representatives(held, live)
    }

    fn key(&self, n: &Node) -> Key {
        Key {
            maybe: [n.maybe[0].0, n.maybe[1].0, n.maybe[2].0, n.maybe[3].0],
            leader: n.trick.leader.0,
            counts: n.counts,
        }
    }

    fn search(&mut self, n: &Node) -> Result<bool, Aborted> {
        let mut unplayed = n.maybe[0] | n.maybe[1] | n.maybe[2];
        if !self.credited {
            unplayed |= n.maybe[SKAT];
        }
        let sure = if self.credited {
            0
        } else {
            let b = Belief {
                maybe: n.maybe,
                cap: n.cap,
                free: self.free,
            };
            b.located_at(SKAT).points() as i32
        };
        if n.need - sure < 0 {
            return Ok(true);
        }
        let left = (unplayed.points() + n.trick.points()) as i32;
        if left <= n.need {
            return Ok(false);
        }
        self.nodes += 1;
        if self.nodes & 0xfff == 0
            && (self.budget.expired() || self.budget.max_nodes.is_some_and(|m| self.nodes > m))
        {
            return Err(Aborted);
        }
        let key = if n.trick.is_empty() {
            let k = self.key(n);
            if let Some(&(lo, hi)) = self.tt.get(&k) {
                if lo as i32 > n.need {
                    return Ok(true);
                }
                if hi as i32 <= n.need {
                    return Ok(false);
                }
            }
            Some(k)
        } else {
            None
        };
        let m = n.trick.to_move();
        let live = Self::live(n);
        let (moves, or_node) = if m == self.querier {
            (self.t.representatives(self.legal_for_querier(n), live), self.declarer_query)
        } else if m != self.declarer && !self.declarer_query {
            let sure = self.sure_moves(n, m);
            if sure.is_empty() {
                (self.adversary_moves(n, m, live), true)
            } else {
                (self.t.representatives(sure, live), false)
            }
        } else {
            (self.adversary_moves(n, m, live), !self.declarer_query)
        };
        let order = self.t.order(moves, &n.trick, m == self.declarer, self.declarer);
        let mut result = !or_node;
        for &c in order.as_slice() {
            let Some(child) = self.child(n, m, c) else {
                continue;
            };
            if self.search(&child)? == or_node {
                result = or_node;
                break;
            }
        }
        if let Some(k) = key {
            if self.tt.len() >= TT_LIMIT {
                self.tt.clear();
            }
            let e = self.tt.entry(k).or_insert((0, left as u8));
            if result {
                e.0 = e.0.max((n.need + 1) as u8);
            } else {
                e.1 = e.1.min(n.need as u8);
            }
        }
        Ok(result)
    }
}

fn require_role(view: &KnowledgeView, declarer: bool) -> Result<(), SearchError> {
    if view.is_declarer() != declarer {
        return Err(SearchError::WrongRole {
            expected: if declarer { "declarer" } else { "opponent" },
        });
    }
    Ok(())
}

/// Forced declarer win above `limit` against all worlds of `view`.
pub fn kbps_declarer(view: &KnowledgeView, limit: u32) -> Result<bool, SearchError> {
    require_role(view, true)?;
    Ok(ParanoiaQuery::exact(view.clone(), limit).run(Budget::unlimited())?.is_win())
}

/// Forced opponent result (declarer at most `limit`) against all worlds.
pub fn kbps_opponent(view: &KnowledgeView, limit: u32) -> Result<bool, SearchError> {
    require_role(view, false)?;
    Ok(ParanoiaQuery::exact(view.clone(), limit).run(Budget::unlimited())?.is_win())
}

pub fn akbps(view: &KnowledgeView, limit: u32, constraint: &AssignmentConstraint) -> Result<Verdict, SearchError> {
    ParanoiaQuery {
        view: view.clone(),
        limit,
        mode: Mode::Approximate {
            constraint: constraint.clone(),
        },
    }
    .run(Budget::unlimited())
}

const LEVELS: [Level; 3] = [Level::Normal, Level::Schneider, Level::Schwarz];

/// Highest declarer level proven from the root.
pub fn escalate(prover: &mut Prover) -> Result<Option<Level>, Aborted> {
    let mut best = None;
    for level in LEVELS {
        if prover.prove(level.limit() as u32)?.is_win() {
            best = Some(level);
        } else {
            break;
        }
    }
    Ok(best)
}

/// Order in which candidate cards are tried: trumps from the top, then
/// clubs, spades, hearts, diamonds, each from the top.
pub fn scan_order(game: GameType, cards: CardSet) -> Vec<Card> {
    let t = Tables::new(game);
    let trump = t.rules.trump;
    let mut out: Vec<Card> = (cards & trump).iter().collect();
    out.sort_by_key(|&c| std::cmp::Reverse(t.rules.power(c)));
    for s in crate::cards::Suit::ALL.iter().rev() {
        let mut suit: Vec<Card> = (cards & (s.mask() - trump)).iter().collect();
        suit.sort_by_key(|&c| std::cmp::Reverse(t.rules.power(c)));
        out.extend(suit);
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Killer {
    pub card: Card,
    /// Highest proven declarer level, or the broken contract for opponents.
    pub level: Level,
}

/// First card in scan order with a forced win at `limit` after it.
pub fn killer_card(prover: &mut Prover, limit: u32) -> Result<Option<Killer>, SearchError> {
    for c in scan_order(prover.t.rules.game, prover.legal()) {
        if prover.prove_after(c, limit)?.is_win() {
            let mut level = Level::from_limit(limit as u8).unwrap_or_default();
            if prover.declarer_query {
                for l in LEVELS {
                    if l > level && prover.prove_after(c, l.limit() as u32)?.is_win() {
                        level = l;
                    }
                }
            }
            return Ok(Some(Killer { card: c, level }));
        }
    }
    Ok(None)
}

/// For a defence that cannot beat the contract: a card that keeps the
/// declarer at 89 or less, else one that keeps them below 120. The level is
/// the one the declarer is kept from.
pub fn avoid_schneider(view: &KnowledgeView, budget: Budget) -> Result<Option<Killer>, SearchError> {
    require_role(view, false)?;
    let sound = view.clone().with_heuristics(Heuristics {
        conventions: false,
        ..view.heuristics
    });
    let mut p = Prover::new(&sound, None, budget)?;
    for level in [Level::Schneider, Level::Schwarz] {
        let limit = level.limit() as u32;
        if view.gspts >= 120 - limit {
            return Ok(scan_order(view.game, p.legal()).first().map(|&card| Killer { card, level }));
        }
        if let Some(k) = killer_card(&mut p, limit)? {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

/// Whether the querying side wins world `pos` at `limit` with open cards.
fn querier_wins(solver: &mut Solver, pos: &SearchPosition, limit: u32, querier_is_declarer: bool) -> bool {
    solver.decide(pos, limit) == querier_is_declarer
}

/// The only card not losing in every world, if exactly one card survives.
///
/// A card loses in a world when the open-card solution after it goes to the
/// adversary. Returns `None` when the world count exceeds `world_cap`.
pub fn hope_card(view: &KnowledgeView, limit: u32, world_cap: usize, budget: Budget) -> Result<Option<Card>, SearchError> {
    if view.trick.to_move() != view.seat {
        return Err(SearchError::NotToMove(view.seat));
    }
    let legal = crate::rules::Rules::new(view.game).playable(view.own(), view.trick.lead());
    if legal.len() < 2 {
        return Ok(None);
    }
    if view.count_worlds() > world_cap as u128 {
        return Ok(None);
    }
    let worlds = view.enumerate_worlds(world_cap);
    if worlds.is_empty() {
        return Err(KnowledgeError::NoWorlds.into());
    }
    let mut solver = Solver::new(view.game, view.declarer);
    let mut survivors = Vec::new();
    for c in legal {
        let mut lost_everywhere = true;
        for w in &worlds {
            if budget.expired() {
                return Err(Aborted.into());
            }
            let pos = SearchPosition::from_world(view, w).play(c).expect("legal card");
            let win = if view.game == GameType::Null {
                solver.null_safe(&pos) == view.is_declarer()
            } else {
                querier_wins(&mut solver, &pos, limit, view.is_declarer())
            };
            if win {
                lost_everywhere = false;
                break;
            }
        }
        if !lost_everywhere {
            survivors.push(c);
            if survivors.len() > 1 {
                return Ok(None);
            }
        }
    }
    Ok(survivors.first().copied())
}
