use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

use ordered_float::OrderedFloat;

use super::{Event, EventKind, GrowthGeometry, HeightLine, NucleationEventSet, SimConfig};
use crate::error::{Error, Result};

type Key = (OrderedFloat<f64>, usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dir {
    /// Up-step, moving left.
    Up,
    /// Down-step, moving right.
    Down,
}

#[derive(Debug, Clone)]
struct Step {
    dir: Dir,
    /// Position at `t0`, in box coordinates `y = x − left`.
    y0: f64,
    t0: f64,
    prev: usize,
    next: usize,
    alive: bool,
}

/// Chronological PNG on the line or on a periodic box.
///
/// Steps form a cyclic doubly linked list in spatial order. Two ordered
/// sets keyed by the conserved characteristic (`y + t` for up-steps,
/// `y − t` for down-steps) give the spatial predecessor of a new event in
/// `O(log n)`. Collisions of adjacent (down, up) pairs sit in a heap and are
/// validated lazily when popped.
#[derive(Debug, Clone)]
pub struct DirectEngine {
    left: f64,
    /// Box length for periodic runs.
    period: Option<f64>,
    domain: (f64, f64),
    steps: Vec<Step>,
    ups: BTreeSet<Key>,
    downs: BTreeSet<Key>,
    /// Leftmost step in non-periodic mode.
    head: Option<usize>,
    heap: BinaryHeap<Reverse<(OrderedFloat<f64>, OrderedFloat<f64>, usize, usize)>>,
    events: Vec<Event>,
    cursor: usize,
    now: f64,
    /// Left-boundary level contributed by steps that are already dead, plus
    /// entries through the left boundary.
    left_level: i64,
    annihilations: Vec<(f64, f64)>,
}

impl DirectEngine {
    pub fn new(events: &NucleationEventSet) -> Self {
        let (period, domain, left) = match events.geometry {
            GrowthGeometry::Flat {
                box_half_width: l,
                periodic,
            } => (periodic.then_some(2.0 * l), (-l, l), -l),
            // large enough that no step ever reaches it
            _ => (None, (-events.tau, events.tau), -3.0 * events.tau - 1.0),
        };
        DirectEngine {
            left,
            period,
            domain,
            steps: Vec::new(),
            ups: BTreeSet::new(),
            downs: BTreeSet::new(),
            head: None,
            heap: BinaryHeap::new(),
            events: events.events.clone(),
            cursor: 0,
            now: 0.0,
            left_level: 0,
            annihilations: Vec::new(),
        }
    }

    pub fn time(&self) -> f64 {
        self.now
    }

    /// Annihilation points `(x, t)` so far, in processing order.
    pub fn annihilations(&self) -> &[(f64, f64)] {
        &self.annihilations
    }

    fn wrap(&self, y: f64) -> f64 {
        match self.period {
            Some(p) => y.rem_euclid(p),
            None => y,
        }
    }

    fn position(&self, i: usize, t: f64) -> f64 {
        let s = &self.steps[i];
        let y = match s.dir {
            Dir::Up => s.y0 - (t - s.t0),
            Dir::Down => s.y0 + (t - s.t0),
        };
        self.wrap(y)
    }

    fn key(&self, i: usize) -> Key {
        let s = &self.steps[i];
        let k = match s.dir {
            Dir::Up => s.y0 + s.t0,
            Dir::Down => s.y0 - s.t0,
        };
        (OrderedFloat(self.wrap(k)), i)
    }

    /// Number of times step `i` crossed the box boundary up to time `t`.
    /// Every crossing raises the level at the left boundary by one.
    fn crossings(&self, i: usize, t: f64) -> i64 {
        let Some(p) = self.period else { return 0 };
        let s = &self.steps[i];
        let moved = match s.dir {
            Dir::Up => s.y0 - (t - s.t0),
            Dir::Down => s.y0 + (t - s.t0),
        };
        match s.dir {
            Dir::Up => -(moved / p).floor() as i64,
            Dir::Down => (moved / p).floor() as i64,
        }
    }

    /// Distance from `from` rightwards to `to`.
    fn gap(&self, from: f64, to: f64) -> f64 {
        match self.period {
            Some(p) => (to - from).rem_euclid(p),
            None => to - from,
        }
    }

    fn predecessor_in(&self, set: &BTreeSet<Key>, query: f64) -> Option<usize> {
        let q = (OrderedFloat(query), usize::MAX);
        match set.range(..=q).next_back() {
            Some(k) => Some(k.1),
            None if self.period.is_some() => set.iter().next_back().map(|k| k.1),
            None => None,
        }
    }

    /// Step immediately left of `y` at time `t` (cyclically when periodic).
    fn predecessor(&self, y: f64, t: f64) -> Option<usize> {
        let up = self.predecessor_in(&self.ups, self.wrap(y + t));
        let down = self.predecessor_in(&self.downs, self.wrap(y - t));
        let dist = |i: usize| match self.period {
            Some(p) => (y - self.position(i, t)).rem_euclid(p),
            None => y - self.position(i, t),
        };
        match (up, down) {
            (Some(a), Some(b)) => Some(if dist(a) <= dist(b) { a } else { b }),
            (a, b) => a.or(b),
        }
    }

    fn schedule(&mut self, a: usize, b: usize) {
        if a == b || self.steps[a].dir != Dir::Down || self.steps[b].dir != Dir::Up {
            return;
        }
        if self.period.is_none() && Some(b) == self.head {
            return;
        }
        let pa = self.position(a, self.now);
        let pb = self.position(b, self.now);
        let mut gap = self.gap(pa, pb);
        if gap <= 0.0 {
            // a lone pair on the ring: the down-step reaches its partner
            // only after going all the way round
            gap = self.period.unwrap_or(0.0);
        }
        let half = 0.5 * gap;
        let at = self.wrap(pa + half);
        self.heap
            .push(Reverse((OrderedFloat(self.now + half), OrderedFloat(at), a, b)));
    }

    fn insert(&mut self, y: f64, t: f64, dirs: &[Dir]) {
        let pred = self.predecessor(y, t);
        let mut ids = Vec::with_capacity(dirs.len());
        for &dir in dirs {
            let id = self.steps.len();
            self.steps.push(Step {
                dir,
                y0: y,
                t0: t,
                prev: id,
                next: id,
                alive: true,
            });
            let key = self.key(id);
            match dir {
                Dir::Up => self.ups.insert(key),
                Dir::Down => self.downs.insert(key),
            };
            ids.push(id);
        }
        for w in ids.windows(2) {
            self.steps[w[0]].next = w[1];
            self.steps[w[1]].prev = w[0];
        }
        let (first, last) = (ids[0], *ids.last().unwrap());
        // splice after the predecessor; with none, the new steps go in
        // front of the leftmost one
        let after = pred.or_else(|| self.head.map(|h| self.steps[h].prev));
        match after {
            Some(p) => {
                let n = self.steps[p].next;
                self.steps[p].next = first;
                self.steps[first].prev = p;
                self.steps[last].next = n;
                self.steps[n].prev = last;
            }
            None => {
                self.steps[first].prev = last;
                self.steps[last].next = first;
            }
        }
        if self.period.is_none() && pred.is_none() {
            self.head = Some(first);
        }
        let (p, n) = (self.steps[first].prev, self.steps[last].next);
        self.schedule(p, first);
        self.schedule(last, n);
    }

    fn remove(&mut self, i: usize, t: f64) {
        self.left_level += self.crossings(i, t);
        let key = self.key(i);
        match self.steps[i].dir {
            Dir::Up => self.ups.remove(&key),
            Dir::Down => self.downs.remove(&key),
        };
        self.steps[i].alive = false;
    }

    fn annihilate(&mut self, a: usize, b: usize, t: f64, y: f64) {
        let (p, n) = (self.steps[a].prev, self.steps[b].next);
        self.remove(a, t);
        self.remove(b, t);
        self.annihilations.push((y + self.left, t));
        if p == b {
            // the pair was the whole list
            self.head = None;
            return;
        }
        self.steps[p].next = n;
        self.steps[n].prev = p;
        if self.head == Some(a) {
            self.head = Some(n);
        }
        self.now = t;
        self.schedule(p, n);
    }

    fn apply(&mut self, e: Event) {
        let y = e.x - self.left;
        match e.kind {
            EventKind::Nucleation => self.insert(y, e.t, &[Dir::Up, Dir::Down]),
            EventKind::UpSource => self.insert(y, e.t, &[Dir::Up]),
            EventKind::DownSource => {
                self.left_level += 1;
                self.insert(y, e.t, &[Dir::Down]);
            }
        }
    }

    /// Process all collisions and events up to time `t`.
    pub fn advance_to(&mut self, t: f64) {
        loop {
            let next_event = self.events.get(self.cursor).map(|e| e.t).unwrap_or(f64::INFINITY);
            let horizon = next_event.min(t);
            let mut fired = false;
            while let Some(&Reverse((tc, at, a, b))) = self.heap.peek() {
                if tc.0 > horizon {
                    break;
                }
                self.heap.pop();
                let (sa, sb) = (&self.steps[a], &self.steps[b]);
                if sa.alive && sb.alive && sa.next == b {
                    self.annihilate(a, b, tc.0, at.0);
                    fired = true;
                }
            }
            if fired {
                continue;
            }
            if next_event <= t {
                let e = self.events[self.cursor];
                self.cursor += 1;
                self.now = e.t;
                self.apply(e);
            } else {
                break;
            }
        }
        self.now = self.now.max(t);
    }

    /// Height line at the current time.
    pub fn snapshot(&self) -> HeightLine {
        let t = self.now;
        let mut left_offset = self.left_level;
        let mut up_steps = Vec::with_capacity(self.ups.len());
        let mut down_steps = Vec::with_capacity(self.downs.len());
        for (i, s) in self.steps.iter().enumerate().filter(|(_, s)| s.alive) {
            left_offset += self.crossings(i, t);
            let x = self.position(i, t) + self.left;
            match s.dir {
                Dir::Up => up_steps.push(x),
                Dir::Down => down_steps.push(x),
            }
        }
        up_steps.sort_by(f64::total_cmp);
        down_steps.sort_by(f64::total_cmp);
        HeightLine {
            base_level: 0,
            left_offset,
            up_steps,
            down_steps,
            domain: self.domain,
        }
    }
}

/// `h_0(·, τ)` by chronological simulation of `events`.
pub fn direct_png(events: &NucleationEventSet, config: &SimConfig) -> Result<HeightLine> {
    config.validate()?;
    if events.geometry != config.geometry || events.tau < config.tau {
        return Err(Error::Config("event set was drawn for a different configuration".into()));
    }
    let mut engine = DirectEngine::new(events);
    engine.advance_to(config.tau);
    Ok(engine.snapshot())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::png::sample_nucleations;

    fn droplet(events: Vec<Event>, tau: f64) -> HeightLine {
        let set = NucleationEventSet::new(events, GrowthGeometry::Droplet, tau).unwrap();
        direct_png(&set, &SimConfig::droplet(tau)).unwrap()
    }

    #[test]
    fn no_events_is_flat() {
        let line = droplet(vec![], 2.0);
        assert!(line.is_trivial());
        assert_eq!(line.height(0.3), 0);
    }

    #[test]
    fn single_event_spreads_at_unit_speed() {
        let line = droplet(vec![Event::nucleation(0.0, 0.5)], 2.0);
        assert_eq!(line.up_steps, vec![-1.5]);
        assert_eq!(line.down_steps, vec![1.5]);
        for (x, h) in [(-1.6, 0), (-1.4, 1), (0.0, 1), (1.4, 1), (1.6, 0)] {
            assert_eq!(line.height(x), h, "x = {x}");
        }
    }

    #[test]
    fn two_overlapping_plateaus_merge_without_stacking() {
        // plateaus [-0.1, 0.1] and [0, 0.1] at tau = 0.2; the inner down and
        // up steps met at (0.025, 0.125)
        let line = droplet(vec![Event::nucleation(0.0, 0.1), Event::nucleation(0.05, 0.15)], 0.2);
        assert_eq!(line.up_steps.len(), 1);
        assert!((line.up_steps[0] + 0.1).abs() < 1e-15);
        assert!((line.down_steps[0] - 0.1).abs() < 1e-15);
        let max = (0..=100).map(|k| line.height(-0.2 + 0.004 * k as f64)).max().unwrap();
        assert_eq!(max, 1);
    }

    #[test]
    fn stacking_after_nested_nucleation() {
        // the second event lands on the first plateau and raises it
        let line = droplet(vec![Event::nucleation(0.0, 0.1), Event::nucleation(0.0, 0.5)], 1.0);
        assert_eq!(line.height(0.0), 2);
        assert_eq!(line.height(0.7), 1);
    }

    #[test]
    fn annihilation_point_is_exact() {
        let set = NucleationEventSet::new(
            vec![Event::nucleation(-0.2, 0.3), Event::nucleation(0.2, 0.4)],
            GrowthGeometry::Droplet,
            1.0,
        )
        .unwrap();
        let mut engine = DirectEngine::new(&set);
        engine.advance_to(1.0);
        let &[(x, t)] = engine.annihilations() else { panic!() };
        // down from -0.2 at 0.3 meets up from 0.2 at 0.4
        assert!((x - 0.05).abs() < 1e-12 && (t - 0.55).abs() < 1e-12);
        assert_eq!(engine.snapshot().height(0.0), 1);
    }

    #[test]
    fn parity_and_boundary_in_droplet() {
        for r in 0..50 {
            let cfg = SimConfig::droplet(6.0).with_seed(11);
            let set = sample_nucleations(&cfg, r).unwrap();
            let line = direct_png(&set, &cfg).unwrap();
            assert_eq!(line.up_steps.len(), line.down_steps.len());
            assert_eq!(line.height(-6.0 - 1e-9), 0);
            assert_eq!(line.height(6.0 + 1e-9), 0);
            assert!(line.up_steps.iter().all(|x| x.abs() <= 6.0 + 1e-12));
        }
    }

    #[test]
    fn periodic_single_plateau_wraps_and_self_annihilates() {
        let g = GrowthGeometry::Flat {
            box_half_width: 1.0,
            periodic: true,
        };
        let set = NucleationEventSet::new(vec![Event::nucleation(0.5, 0.0)], g, 3.0).unwrap();
        let mut engine = DirectEngine::new(&set);
        engine.advance_to(0.7);
        // plateau [-0.2, 1.2) wraps to cover [-1, -0.8) as well
        let line = engine.snapshot();
        assert_eq!(line.height(-0.9), 1);
        assert_eq!(line.height(-0.5), 0);
        assert_eq!(line.height(0.5), 1);
        // the two ends meet at the antipode after one half period
        engine.advance_to(1.5);
        let line = engine.snapshot();
        assert!(line.up_steps.is_empty() && line.down_steps.is_empty());
        assert_eq!(line.height(0.0), 1);
        assert_eq!(engine.annihilations().len(), 1);
        assert!((engine.annihilations()[0].0 + 0.5).abs() < 1e-12);
    }

    #[test]
    fn periodic_heights_are_consistent_under_wrap() {
        let g = GrowthGeometry::Flat {
            box_half_width: 2.0,
            periodic: true,
        };
        let cfg = SimConfig::new(5.0, g).with_seed(3);
        for r in 0..40 {
            let set = sample_nucleations(&cfg, r).unwrap();
            let line = direct_png(&set, &cfg).unwrap();
            assert_eq!(line.up_steps.len(), line.down_steps.len());
            assert_eq!(line.height(-2.0 - 1e-12), line.right_level());
            // every nucleation raises the box integral by the plateau it
            // spawns; the height never drops below the flat start
            assert!((0..200).all(|k| line.height(-2.0 + 0.02 * k as f64) >= 0));
        }
    }
}
