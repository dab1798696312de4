//! Card placement over the four card locations (three hands and the skat).
//!
//! A belief is stored as one "maybe" set per location: a card may lie at
//! location `l` iff it is in `maybe[l]`. A card in exactly one maybe set is
//! located. Capacities are the number of cards each location still holds.
//! Feasibility of a belief is decided exactly with Hall's condition over the
//! free locations; counting and enumeration build on the same masks.

use rustc_hash::FxHashMap;

use crate::cards::{Card, CardSet};

pub const SKAT: usize = 3;
pub const LOCATIONS: usize = 4;

/// Location masks: bit `l` set means location `l`.
pub type LocMask = u8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Belief {
    pub maybe: [CardSet; LOCATIONS],
    pub cap: [u8; LOCATIONS],
    /// Locations whose content is uncertain; the querying seat is excluded.
    pub free: LocMask,
}

impl Belief {
    /// All cards still to be placed in the free locations.
    #[inline]
    pub fn unplaced(&self) -> CardSet {
        let mut u = CardSet::EMPTY;
        for l in 0..LOCATIONS {
            if self.free & (1 << l) != 0 {
                u |= self.maybe[l];
            }
        }
        u
    }

    /// Locations `card` may occupy.
    #[inline]
    pub fn mask_of(&self, card: Card) -> LocMask {
        let mut m = 0;
        for l in 0..LOCATIONS {
            if self.maybe[l].contains(card) {
                m |= 1 << l;
            }
        }
        m
    }

    /// Cards whose only possible location is `l`.
    pub fn located_at(&self, l: usize) -> CardSet {
        let mut others = CardSet::EMPTY;
        for k in 0..LOCATIONS {
            if k != l {
                others |= self.maybe[k];
            }
        }
        self.maybe[l] - others
    }

    /// Hall's condition: every subset S of free locations can absorb the
    /// cards confined to S, and the free cards exactly fill the free slots.
    #[inline]
    pub fn feasible(&self) -> bool {
        let free = self.free;
        let mut total_cap = 0u32;
        let mut union = 0u32;
        for l in 0..LOCATIONS {
            if free & (1 << l) != 0 {
                total_cap += self.cap[l] as u32;
                union |= self.maybe[l].0;
            }
        }
        if union.count_ones() != total_cap {
            return false;
        }
        // proper non-empty subsets of `free`
        let mut s = (free.wrapping_sub(1)) & free;
        while s != 0 {
            let mut inside = 0u32;
            let mut outside = 0u32;
            let mut cap = 0u32;
            for l in 0..LOCATIONS {
                let bit = 1 << l;
                if free & bit == 0 {
                    continue;
                }
                if s & bit != 0 {
                    inside |= self.maybe[l].0;
                    cap += self.cap[l] as u32;
                } else {
                    outside |= self.maybe[l].0;
                }
            }
            if (inside & !outside).count_ones() > cap {
                return false;
            }
            s = (s.wrapping_sub(1)) & free;
        }
        true
    }

    /// Cards grouped by their location mask, restricted to free locations.
    fn groups(&self) -> Vec<(LocMask, CardSet)> {
        let mut by_mask: FxHashMap<LocMask, CardSet> = FxHashMap::default();
        for c in self.unplaced() {
            let m = self.mask_of(c) & self.free;
            *by_mask.entry(m).or_default() |= CardSet::from(c);
        }
        let mut g: Vec<_> = by_mask.into_iter().collect();
        g.sort_by_key(|&(m, s)| (m, s.0));
        g
    }

    /// Exact number of complete placements.
    pub fn count_worlds(&self) -> u128 {
        let groups: Vec<(LocMask, u32)> = self.groups().into_iter().map(|(m, s)| (m, s.len())).collect();
        let mut memo = FxHashMap::default();
        count_rec(&groups, self.cap, self.free, &mut memo)
    }

    /// Number of placements with `card` at location `l`.
    pub fn count_with(&self, card: Card, l: usize) -> u128 {
        if !self.maybe[l].contains(card) || self.cap[l] == 0 {
            return 0;
        }
        let mut b = *self;
        for k in 0..LOCATIONS {
            b.maybe[k].remove(card);
        }
        b.cap[l] -= 1;
        b.count_worlds()
    }

    /// Complete placements in lexicographic order: cards ascending by bit
    /// index, each tried at its candidate locations in ascending order.
    /// Stops after `limit` placements.
    pub fn enumerate(&self, limit: usize, mut visit: impl FnMut(&[CardSet; LOCATIONS]) -> bool) -> usize {
        let mut placed = [CardSet::EMPTY; LOCATIONS];
        let mut count = 0usize;
        if limit == 0 || !self.feasible() {
            return 0;
        }
        enumerate_rec(*self, &mut placed, limit, &mut count, &mut visit);
        count
    }
}

impl Belief {
    /// One placement drawn uniformly: each card in ascending order goes to a
    /// location with probability proportional to the completions left.
    pub fn sample<R: rand::Rng>(&self, rng: &mut R) -> Option<[CardSet; LOCATIONS]> {
        let mut b = *self;
        let mut placed = [CardSet::EMPTY; LOCATIONS];
        if !b.feasible() {
            return None;
        }
        while let Some(card) = b.unplaced().first() {
            let mut weights = [0u128; LOCATIONS];
            for (l, w) in weights.iter_mut().enumerate() {
                if b.free & (1 << l) != 0 {
                    *w = b.count_with(card, l);
                }
            }
            let total: u128 = weights.iter().sum();
            let mut x = rng.gen_range(0..total);
            let l = (0..LOCATIONS)
                .find(|&l| {
                    if x < weights[l] {
                        true
                    } else {
                        x -= weights[l];
                        false
                    }
                })
                .expect("weights sum to total");
            for k in 0..LOCATIONS {
                b.maybe[k].remove(card);
            }
            b.cap[l] -= 1;
            placed[l].insert(card);
        }
        Some(placed)
    }
}

fn factorial(n: u32) -> u128 {
    (1..=n as u128).product()
}

fn count_rec(
    groups: &[(LocMask, u32)],
    cap: [u8; LOCATIONS],
    free: LocMask,
    memo: &mut FxHashMap<(usize, [u8; LOCATIONS]), u128>,
) -> u128 {
    let Some(&(mask, n)) = groups.first() else {
        return (0..LOCATIONS).all(|l| free & (1 << l) == 0 || cap[l] == 0) as u128;
    };
    let key = (groups.len(), cap);
    if let Some(&v) = memo.get(&key) {
        return v;
    }
    let locs: Vec<usize> = (0..LOCATIONS).filter(|&l| mask & (1 << l) != 0).collect();
    let mut total = 0u128;
    let mut split = vec![0u32; locs.len()];
    // enumerate compositions of n over locs with split[i] <= cap
    fn rec(
        i: usize,
        left: u32,
        locs: &[usize],
        split: &mut [u32],
        cap: [u8; LOCATIONS],
        f: &mut dyn FnMut(&[u32]),
    ) {
        if i + 1 == locs.len() {
            if left <= cap[locs[i]] as u32 {
                split[i] = left;
                f(split);
            }
            return;
        }
        for k in 0..=left.min(cap[locs[i]] as u32) {
            split[i] = k;
            rec(i + 1, left - k, locs, split, cap, f);
        }
    }
    if locs.is_empty() {
        memo.insert(key, 0);
        return 0;
    }
    let nf = factorial(n);
    let mut parts: Vec<(u128, [u8; LOCATIONS])> = Vec::new();
    rec(0, n, &locs, &mut split, cap, &mut |s: &[u32]| {
        let mut ways = nf;
        let mut c = cap;
        for (i, &k) in s.iter().enumerate() {
            ways /= factorial(k);
            c[locs[i]] -= k as u8;
        }
        parts.push((ways, c));
    });
    for (ways, c) in parts {
        let rest = count_rec(&groups[1..], c, free, memo);
        total += ways * rest;
    }
    memo.insert(key, total);
    total
}

fn enumerate_rec(
    b: Belief,
    placed: &mut [CardSet; LOCATIONS],
    limit: usize,
    count: &mut usize,
    visit: &mut impl FnMut(&[CardSet; LOCATIONS]) -> bool,
) -> bool {
    let Some(card) = b.unplaced().first() else {
        *count += 1;
        return visit(placed) && *count < limit;
    };
    for l in 0..LOCATIONS {
        if b.free & (1 << l) == 0 || !b.maybe[l].contains(card) || b.cap[l] == 0 {
            continue;
        }
        let mut next = b;
        for k in 0..LOCATIONS {
            next.maybe[k].remove(card);
        }
        next.cap[l] -= 1;
        if !next.feasible() {
            continue;
        }
        placed[l].insert(card);
        let go_on = enumerate_rec(next, placed, limit, count, visit);
        placed[l].remove(card);
        if !go_on {
            return false;
        }
    }
    true
}

/// Small max-flow on an adjacency matrix; used for placement with per-class caps.
pub struct FlowNet {
    n: usize,
    cap: Vec<i32>,
}

impl FlowNet {
    pub fn new(n: usize) -> FlowNet {
        FlowNet { n, cap: vec![0; n * n] }
    }

    pub fn add(&mut self, from: usize, to: usize, c: i32) {
        self.cap[from * self.n + to] += c;
    }

    pub fn max_flow(&mut self, s: usize, t: usize) -> i32 {
        let n = self.n;
        let mut flow = 0;
        let mut prev = vec![usize::MAX; n];
        let mut queue = Vec::with_capacity(n);
        loop {
            prev.iter_mut().for_each(|p| *p = usize::MAX);
            prev[s] = s;
            queue.clear();
            queue.push(s);
            let mut head = 0;
            while head < queue.len() && prev[t] == usize::MAX {
                let u = queue[head];
                head += 1;
                for v in 0..n {
                    if prev[v] == usize::MAX && self.cap[u * n + v] > 0 {
                        prev[v] = u;
                        queue.push(v);
                    }
                }
            }
            if prev[t] == usize::MAX {
                return flow;
            }
            let mut aug = i32::MAX;
            let mut v = t;
            while v != s {
                let u = prev[v];
                aug = aug.min(self.cap[u * n + v]);
                v = u;
            }
            let mut v = t;
            while v != s {
                let u = prev[v];
                self.cap[u * n + v] -= aug;
                self.cap[v * n + u] += aug;
                v = u;
            }
            flow += aug;
        }
    }
}
