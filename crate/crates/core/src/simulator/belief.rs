//! The observer's belief state and its per-cycle update from the visual sensor.

use super::flags::{localize_self, FlagSighting, FLAGS};
use super::geometry::{wrap, Position, Velocity, BALL_MAX_SPEED, PLAYER_MAX_SPEED, SENTINEL};
use super::sensor::{
    in_view, observe_direction, observe_distance, NeckPolicy, ViewConfig, FLAG_QSTEP, OBJECT_QSTEP,
};
use super::world::{PlayerState, WorldSnapshot, OBSERVER_INDEX, TEAM_SIZE};

/// Cycles without a sighting after which an object is forgotten.
pub const MAX_POS_COUNT: u8 = 30;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectBelief {
    pub position: Position,
    pub velocity: Velocity,
    /// Degrees; always 0 for the ball.
    pub body: f64,
    pub pos_count: u8,
    pub known: bool,
}

impl ObjectBelief {
    pub const UNKNOWN: ObjectBelief = ObjectBelief {
        position: SENTINEL,
        velocity: Velocity::ZERO,
        body: 0.0,
        pos_count: MAX_POS_COUNT,
        known: false,
    };

    /// One more cycle without a sighting.
    fn age(&mut self) {
        self.pos_count = (self.pos_count + 1).min(MAX_POS_COUNT);
        if self.pos_count >= MAX_POS_COUNT {
            *self = ObjectBelief::UNKNOWN;
        }
    }

    /// Records a sighting at `position`. Velocity is the one-cycle position
    /// difference when the object was also seen last cycle.
    fn sighted(&mut self, position: Position, body: f64, max_speed: f64) {
        if self.known && self.pos_count == 0 {
            self.velocity = Velocity::between(self.position, position).capped(max_speed);
        } else if !self.known {
            self.velocity = Velocity::ZERO;
        }
        self.position = position;
        self.body = body;
        self.pos_count = 0;
        self.known = true;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeliefState {
    pub cycle: u32,
    pub self_estimate: Position,
    /// Estimated global neck direction used this cycle.
    pub neck: f64,
    pub ball: ObjectBelief,
    pub left: [ObjectBelief; TEAM_SIZE],
    pub right: [ObjectBelief; TEAM_SIZE],
    /// Whether self-localization succeeded this cycle.
    pub localized: bool,
}

impl BeliefState {
    /// Belief before the first observation: the observer knows where it
    /// starts and nothing else.
    pub fn initial(truth: &WorldSnapshot) -> Self {
        let me = truth.observer();
        let mut right = [ObjectBelief::UNKNOWN; TEAM_SIZE];
        right[OBSERVER_INDEX] = ObjectBelief {
            position: me.position,
            velocity: me.velocity,
            body: me.body,
            pos_count: 0,
            known: true,
        };
        Self {
            cycle: truth.cycle,
            self_estimate: me.position,
            neck: me.body,
            ball: ObjectBelief::UNKNOWN,
            left: [ObjectBelief::UNKNOWN; TEAM_SIZE],
            right,
            localized: true,
        }
    }

    pub fn objects(&self) -> impl Iterator<Item = &ObjectBelief> {
        std::iter::once(&self.ball).chain(&self.left).chain(&self.right)
    }
}

/// Neck direction the observer picks for `cycle`, from what it believed
/// at the end of the previous cycle.
pub fn choose_neck(belief: &BeliefState, cycle: u32, view: &ViewConfig) -> f64 {
    let width = view.width.degrees();
    let scan = wrap(width * f64::from(cycle));
    match view.neck_policy {
        NeckPolicy::RotatingScan => scan,
        NeckPolicy::BallFocused => {
            if !belief.ball.known {
                return scan;
            }
            let base = if belief.ball.position.distance(belief.self_estimate) < 1e-6 {
                belief.neck
            } else {
                belief.self_estimate.bearing_to(belief.ball.position)
            };
            // keep the ball inside the cone while looking to either side of it
            let sweep = [0.0, width / 3.0, 0.0, -width / 3.0][(cycle % 4) as usize];
            wrap(base + sweep)
        }
    }
}

/// Folds one cycle of visual input into `belief`.
///
/// On localization failure no object is updated and every pos count ages,
/// including the observer's own.
pub fn update_belief(belief: &BeliefState, truth: &WorldSnapshot, view: &ViewConfig) -> BeliefState {
    debug_assert_eq!(belief.cycle + 1, truth.cycle, "belief must trail truth by one cycle");
    let mut next = belief.clone();
    next.cycle = truth.cycle;

    let me = *truth.observer();
    let neck = choose_neck(belief, truth.cycle, view);
    let est_neck = f64::from(observe_direction(neck).expect("neck is finite"));
    next.neck = est_neck;

    let relative = |p: Position| wrap(me.position.bearing_to(p) - neck);
    let sightings: Vec<FlagSighting> = FLAGS
        .iter()
        .filter(|f| in_view(me.position, neck, f.position, view) && me.position.distance(f.position) > 0.0)
        .map(|f| FlagSighting {
            flag: *f,
            distance: observe_distance(me.position.distance(f.position), FLAG_QSTEP).expect("positive distance"),
            global_direction: f64::from(observe_direction(relative(f.position)).expect("finite")) + est_neck,
        })
        .collect();

    let Ok(self_estimate) = localize_self(&sightings) else {
        next.localized = false;
        next.ball.age();
        next.left.iter_mut().chain(next.right.iter_mut()).for_each(ObjectBelief::age);
        return next;
    };
    let self_estimate = self_estimate.clamp_to_field();
    next.localized = true;
    next.self_estimate = self_estimate;

    let observe = |p: Position| -> Option<Position> {
        if !in_view(me.position, neck, p, view) {
            return None;
        }
        let d = me.position.distance(p);
        if d < 1e-9 {
            return Some(self_estimate);
        }
        let dist = observe_distance(d, OBJECT_QSTEP).expect("positive distance");
        let dir = f64::from(observe_direction(relative(p)).expect("finite")) + est_neck;
        Some(self_estimate.offset(dist, dir).clamp_to_field())
    };
    let observe_body = |body: f64| wrap(f64::from(observe_direction(wrap(body - neck)).expect("finite")) + est_neck);

    match observe(truth.ball.position) {
        Some(p) => next.ball.sighted(p, 0.0, BALL_MAX_SPEED),
        None => next.ball.age(),
    }
    let update_team = |beliefs: &mut [ObjectBelief; TEAM_SIZE], team: &[PlayerState; TEAM_SIZE], own: bool| {
        for (i, (b, p)) in beliefs.iter_mut().zip(team).enumerate() {
            if own && i == OBSERVER_INDEX {
                b.sighted(self_estimate, observe_body(me.body), PLAYER_MAX_SPEED);
                continue;
            }
            match observe(p.position) {
                Some(pos) => b.sighted(pos, observe_body(p.body), PLAYER_MAX_SPEED),
                None => b.age(),
            }
        }
    };
    update_team(&mut next.left, &truth.left, false);
    update_team(&mut next.right, &truth.right, true);
    next
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulator::sensor::ViewWidth;
    use crate::simulator::world::MatchEngine;

    fn narrow_scan() -> ViewConfig {
        ViewConfig {
            width: ViewWidth::Narrow,
            max_visible_distance: 60.0,
            neck_policy: NeckPolicy::RotatingScan,
        }
    }

    #[test]
    fn sighting_resets_and_absence_ages() {
        let mut b = ObjectBelief::UNKNOWN;
        b.sighted(Position::new(10.0, -3.0), 5.0, PLAYER_MAX_SPEED);
        assert_eq!(b.pos_count, 0);
        assert!(b.known);
        b.age();
        assert_eq!(b.pos_count, 1);
        assert_eq!(b.position, Position::new(10.0, -3.0));
        for _ in 0..28 {
            b.age();
        }
        assert_eq!(b.pos_count, 29);
        assert!(b.known);
        b.age();
        assert!(!b.known);
        assert_eq!(b.position, SENTINEL);
        assert_eq!(b.pos_count, MAX_POS_COUNT);
        b.age();
        assert_eq!(b, ObjectBelief::UNKNOWN);
    }

    #[test]
    fn consecutive_sightings_give_velocity() {
        let mut b = ObjectBelief::UNKNOWN;
        b.sighted(Position::new(0.0, 0.0), 0.0, PLAYER_MAX_SPEED);
        assert_eq!(b.velocity, Velocity::ZERO);
        b.sighted(Position::new(0.5, 0.2), 0.0, PLAYER_MAX_SPEED);
        assert!((b.velocity.vx - 0.5).abs() < 1e-12 && (b.velocity.vy - 0.2).abs() < 1e-12);
        b.age();
        b.sighted(Position::new(5.0, 0.2), 0.0, PLAYER_MAX_SPEED);
        // not consecutive: previous estimate kept
        assert!((b.velocity.vx - 0.5).abs() < 1e-12);
    }

    #[test]
    fn pos_counts_match_an_independent_sighting_log() {
        let view = ViewConfig::default();
        let mut engine = MatchEngine::new(5);
        let mut truth = WorldSnapshot::kickoff();
        let mut belief = BeliefState::initial(&truth);
        // cycles since the last sighting, tracked from the raw sensor geometry
        let mut since: Vec<Option<u32>> = vec![None; 23];
        for _ in 0..1500 {
            truth = engine.step(&truth);
            let neck = choose_neck(&belief, truth.cycle, &view);
            belief = update_belief(&belief, &truth, &view);
            let me = truth.observer().position;
            let objects: Vec<Position> = std::iter::once(truth.ball.position)
                .chain(truth.left.iter().map(|p| p.position))
                .chain(truth.right.iter().map(|p| p.position))
                .collect();
            for (k, p) in objects.iter().enumerate() {
                let seen = belief.localized && (k == 12 + OBSERVER_INDEX || in_view(me, neck, *p, &view));
                since[k] = if seen { Some(0) } else { since[k].map(|c| c + 1) };
            }
            for (k, b) in belief.objects().enumerate() {
                let expected = since[k].map_or(MAX_POS_COUNT, |c| c.min(u32::from(MAX_POS_COUNT)) as u8);
                assert_eq!(b.pos_count, expected, "object {k} at cycle {}", truth.cycle);
                assert_eq!(b.known, expected < MAX_POS_COUNT);
            }
        }
    }

    #[test]
    fn noise_free_reconstruction_is_exact() {
        // the reconstruction path without quantization recovers positions exactly
        let me = Position::new(-12.0, 7.5);
        let neck = 33.0;
        for target in [Position::new(20.0, -30.0), Position::new(-50.0, 30.0), Position::new(-11.0, 7.0)] {
            let rel = wrap(me.bearing_to(target) - neck);
            let back = me.offset(me.distance(target), rel + neck);
            assert!(back.distance(target) < 1e-9);
        }
    }

    #[test]
    fn localization_failure_ages_everything() {
        let mut truth = WorldSnapshot::kickoff();
        // observer in a corner looking straight out of the field
        truth.right[OBSERVER_INDEX].position = Position::new(52.0, 33.5);
        let mut belief = BeliefState::initial(&truth);
        belief.ball.sighted(Position::new(0.0, 0.0), 0.0, BALL_MAX_SPEED);
        truth.cycle = 1;
        let view = ViewConfig {
            neck_policy: NeckPolicy::RotatingScan,
            ..narrow_scan()
        };
        // cycle 1 with a 60 degree scan looks along +60 degrees: out of the field
        let next = update_belief(&belief, &truth, &view);
        assert!(!next.localized);
        assert_eq!(next.ball.pos_count, 1);
        assert_eq!(next.right[OBSERVER_INDEX].pos_count, 1);
        assert_eq!(next.self_estimate, belief.self_estimate);
    }
}
