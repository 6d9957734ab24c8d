//! Ground-truth match synthesis.
//!
//! Players drift between formation slots that shift with the ball, each with
//! a slowly re-sampled personal offset; the player of each team closest to
//! the ball chases it. Whoever reaches the ball passes to a teammate or
//! shoots. Stoppages (ball out, goals, random breaks) switch the mode away
//! from play-on for 5 to 20 cycles.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::geometry::{
    wrap, Position, Velocity, BALL_DECAY, BALL_MAX_SPEED, FIELD_HALF_LENGTH, GOAL_HALF_WIDTH,
    PLAYER_MAX_SPEED,
};

pub const TEAM_SIZE: usize = 11;
/// The observer is right-team player 9.
pub const OBSERVER_INDEX: usize = 8;

const KICKABLE_DISTANCE: f64 = 1.2;
const KICK_COOLDOWN: u32 = 4;
const MAX_TURN: f64 = 45.0;
const MAX_ACCEL: f64 = 0.2;
const MAX_DECEL: f64 = 0.3;
const STOPPAGE_RATE: f64 = 1.0 / 200.0;
const WANDER_RANGE: f64 = 6.0;

/// Home slots for a team attacking toward +x (4-3-3).
const FORMATION: [(f64, f64); TEAM_SIZE] = [
    (-49.0, 0.0),
    (-36.0, -22.0),
    (-38.0, -8.0),
    (-38.0, 8.0),
    (-36.0, 22.0),
    (-22.0, -14.0),
    (-24.0, 0.0),
    (-22.0, 14.0),
    (-8.0, -20.0),
    (-6.0, 0.0),
    (-8.0, 20.0),
];

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PlayerState {
    pub position: Position,
    pub velocity: Velocity,
    /// Degrees in [-180, 180).
    pub body: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BallState {
    pub position: Position,
    pub velocity: Velocity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GameMode {
    PlayOn,
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    /// +1 for the team attacking toward +x.
    fn attack_sign(self) -> f64 {
        match self {
            Side::Left => 1.0,
            Side::Right => -1.0,
        }
    }
}

/// Exact state of the field at one cycle.
#[derive(Debug, Clone, PartialEq)]
pub struct WorldSnapshot {
    pub cycle: u32,
    pub ball: BallState,
    pub left: [PlayerState; TEAM_SIZE],
    pub right: [PlayerState; TEAM_SIZE],
    pub mode: GameMode,
}

impl WorldSnapshot {
    /// Both teams on their formation slots, ball at the centre spot.
    pub fn kickoff() -> Self {
        let team = |side: Side| {
            let s = side.attack_sign();
            std::array::from_fn(|i| PlayerState {
                position: Position::new(s * FORMATION[i].0, FORMATION[i].1),
                velocity: Velocity::ZERO,
                body: if s > 0.0 { 0.0 } else { -180.0 },
            })
        };
        Self {
            cycle: 0,
            ball: BallState::default(),
            left: team(Side::Left),
            right: team(Side::Right),
            mode: GameMode::PlayOn,
        }
    }

    pub fn team(&self, side: Side) -> &[PlayerState; TEAM_SIZE] {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    pub fn observer(&self) -> &PlayerState {
        &self.right[OBSERVER_INDEX]
    }
}

#[derive(Debug, Clone, Copy)]
struct Wander {
    offset: (f64, f64),
    goal: (f64, f64),
    timer: u32,
}

/// Hidden state of the motion model plus its random stream.
#[derive(Debug, Clone)]
pub struct MatchEngine {
    rng: ChaCha8Rng,
    wander: [[Wander; TEAM_SIZE]; 2],
    break_left: u32,
    kick_cooldown: u32,
}

impl MatchEngine {
    pub fn new(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut wander = [[Wander {
            offset: (0.0, 0.0),
            goal: (0.0, 0.0),
            timer: 0,
        }; TEAM_SIZE]; 2];
        for w in wander.iter_mut().flatten() {
            w.goal = (rng.gen_range(-WANDER_RANGE..WANDER_RANGE), rng.gen_range(-WANDER_RANGE..WANDER_RANGE));
            w.offset = w.goal;
            w.timer = rng.gen_range(30..80);
        }
        Self {
            rng,
            wander,
            break_left: 0,
            kick_cooldown: 0,
        }
    }

    /// Advances the world by one cycle.
    pub fn step(&mut self, snap: &WorldSnapshot) -> WorldSnapshot {
        let mut next = snap.clone();
        next.cycle = snap.cycle + 1;
        self.kick_cooldown = self.kick_cooldown.saturating_sub(1);

        let ball = self.step_ball(snap, &mut next);
        next.ball = ball;

        for (t, side) in [Side::Left, Side::Right].into_iter().enumerate() {
            let chaser = nearest_player(snap.team(side), snap.ball.position, true);
            for i in 0..TEAM_SIZE {
                let w = &mut self.wander[t][i];
                w.timer = w.timer.saturating_sub(1);
                if w.timer == 0 {
                    w.goal = (
                        self.rng.gen_range(-WANDER_RANGE..WANDER_RANGE),
                        self.rng.gen_range(-WANDER_RANGE..WANDER_RANGE),
                    );
                    w.timer = self.rng.gen_range(30..80);
                }
                w.offset.0 += 0.05 * (w.goal.0 - w.offset.0);
                w.offset.1 += 0.05 * (w.goal.1 - w.offset.1);

                let player = snap.team(side)[i];
                let (target, speed) = if Some(i) == chaser {
                    let aim = snap.ball.position.moved(snap.ball.velocity.scaled(2.0)).clamp_to_field();
                    (aim, 1.0)
                } else {
                    let target = formation_target(side, i, snap.ball.position, w.offset);
                    let d = player.position.distance(target);
                    (target, (0.12 * d).min(0.9))
                };
                let moved = steer(&player, target, speed);
                match side {
                    Side::Left => next.left[i] = moved,
                    Side::Right => next.right[i] = moved,
                }
            }
        }
        next
    }

    fn step_ball(&mut self, snap: &WorldSnapshot, next: &mut WorldSnapshot) -> BallState {
        let mut ball = snap.ball;
        if snap.mode == GameMode::Other {
            self.break_left = self.break_left.saturating_sub(1);
            if self.break_left == 0 {
                next.mode = GameMode::PlayOn;
            }
            ball.velocity = Velocity::ZERO;
            return ball;
        }

        if self.kick_cooldown == 0 {
            if let Some((side, i)) = self.kicker(snap) {
                ball.velocity = self.kick(snap, side, i);
                self.kick_cooldown = KICK_COOLDOWN;
            }
        }
        let moved = ball.position.moved(ball.velocity);
        ball.velocity = ball.velocity.scaled(BALL_DECAY);

        if !moved.is_on_field() {
            let goal = moved.x.abs() > FIELD_HALF_LENGTH && moved.y.abs() <= GOAL_HALF_WIDTH;
            ball.position = if goal {
                Position::default()
            } else {
                moved.clamp_with_margin(-1.0)
            };
            ball.velocity = Velocity::ZERO;
            self.start_break(next);
        } else {
            ball.position = moved;
            if self.rng.gen_bool(STOPPAGE_RATE) {
                ball.velocity = Velocity::ZERO;
                self.start_break(next);
            }
        }
        ball
    }

    fn start_break(&mut self, next: &mut WorldSnapshot) {
        next.mode = GameMode::Other;
        self.break_left = self.rng.gen_range(5..=20);
    }

    fn kicker(&self, snap: &WorldSnapshot) -> Option<(Side, usize)> {
        let mut best: Option<(Side, usize, f64)> = None;
        for side in [Side::Left, Side::Right] {
            for (i, p) in snap.team(side).iter().enumerate() {
                let d = p.position.distance(snap.ball.position);
                if d <= KICKABLE_DISTANCE && best.is_none_or(|b| d < b.2) {
                    best = Some((side, i, d));
                }
            }
        }
        best.map(|(s, i, _)| (s, i))
    }

    fn kick(&mut self, snap: &WorldSnapshot, side: Side, kicker: usize) -> Velocity {
        let s = side.attack_sign();
        let from = snap.ball.position;
        let goal = Position::new(s * FIELD_HALF_LENGTH, 0.0);
        let target = if from.distance(goal) < 28.0 && self.rng.gen_bool(0.5) {
            Position::new(goal.x, self.rng.gen_range(-6.0..6.0))
        } else {
            let team = snap.team(side);
            let options: Vec<Position> = team
                .iter()
                .enumerate()
                .filter(|&(j, p)| {
                    j != kicker && p.position.distance(from) < 35.0 && s * (p.position.x - from.x) > -5.0
                })
                .map(|(_, p)| p.position)
                .collect();
            if options.is_empty() {
                Position::new(from.x + s * 8.0, from.y + self.rng.gen_range(-4.0..4.0)).clamp_to_field()
            } else {
                options[self.rng.gen_range(0..options.len())]
            }
        };
        let d = from.distance(target);
        let speed = (0.06 * d + 0.3).clamp(0.8, BALL_MAX_SPEED);
        let dir = from.bearing_to(target) + self.rng.gen_range(-4.0..4.0);
        Velocity::polar(speed, dir)
    }
}

/// Index of the player closest to `at`; the goalkeeper is skipped when
/// `outfield_only`.
fn nearest_player(team: &[PlayerState; TEAM_SIZE], at: Position, outfield_only: bool) -> Option<usize> {
    let start = usize::from(outfield_only);
    (start..TEAM_SIZE).min_by(|&a, &b| {
        team[a]
            .position
            .distance(at)
            .total_cmp(&team[b].position.distance(at))
    })
}

/// Formation slot of player `i`, shifted toward the ball, plus its offset.
fn formation_target(side: Side, i: usize, ball: Position, offset: (f64, f64)) -> Position {
    let s = side.attack_sign();
    let (hx, hy) = FORMATION[i];
    let ball_x = s * ball.x;
    let (tx, ty) = if i == 0 {
        (-49.0 + 0.04 * (ball_x + FIELD_HALF_LENGTH), (0.2 * ball.y).clamp(-6.0, 6.0))
    } else {
        (0.75 * hx + 0.4 * ball_x + offset.0, 0.85 * hy + 0.3 * ball.y + offset.1)
    };
    Position::new(s * tx, ty).clamp_to_field()
}

/// Turn-rate and acceleration limited move toward `target` at up to `speed`.
pub(crate) fn steer(player: &PlayerState, target: Position, speed: f64) -> PlayerState {
    let to_target = player.position.distance(target);
    let desired_speed = if to_target < 1e-9 { 0.0 } else { speed.min(to_target) };
    let desired_heading = if to_target < 1e-9 {
        player.body
    } else {
        player.position.bearing_to(target)
    };
    let turn = wrap(desired_heading - player.body).clamp(-MAX_TURN, MAX_TURN);
    let body = wrap(player.body + turn);
    let current = player.velocity.speed();
    let new_speed = (current + (desired_speed - current).clamp(-MAX_DECEL, MAX_ACCEL)).clamp(0.0, PLAYER_MAX_SPEED);
    let velocity = Velocity::polar(new_speed, body);
    let position = player.position.moved(velocity).clamp_to_field();
    PlayerState {
        position,
        velocity: Velocity::between(player.position, position).capped(PLAYER_MAX_SPEED),
        body,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn player_with_waypoint_at_own_position_stays_put() {
        let p = PlayerState {
            position: Position::new(3.0, -4.0),
            velocity: Velocity::ZERO,
            body: 30.0,
        };
        let next = steer(&p, p.position, 0.9);
        assert_eq!(next.position, p.position);
        assert_eq!(next.velocity.speed(), 0.0);
    }

    #[test]
    fn free_ball_decays() {
        let mut snap = WorldSnapshot::kickoff();
        // far from every player, so nobody can kick it
        snap.ball = BallState {
            position: Position::new(0.0, 33.0),
            velocity: Velocity::new(3.0, 0.0),
        };
        let mut engine = MatchEngine::new(1);
        engine.kick_cooldown = 10;
        let next = engine.step(&snap);
        if next.mode == GameMode::PlayOn {
            assert!((next.ball.velocity.vx - 2.82).abs() < 1e-12);
            assert_eq!(next.ball.velocity.vy, 0.0);
            assert!((next.ball.position.x - 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn speed_limits_hold_over_a_long_run() {
        let mut engine = MatchEngine::new(7);
        let mut snap = WorldSnapshot::kickoff();
        let mut other = 0;
        for _ in 0..3000 {
            let next = engine.step(&snap);
            assert_eq!(next.cycle, snap.cycle + 1);
            assert!(next.ball.velocity.speed() <= BALL_MAX_SPEED + 1e-12);
            assert!(next.ball.position.is_on_field());
            for p in next.left.iter().chain(&next.right) {
                assert!(p.velocity.speed() <= PLAYER_MAX_SPEED + 1e-12);
                assert!(p.position.is_on_field());
                assert!((-180.0..180.0).contains(&p.body));
            }
            if next.mode == GameMode::Other {
                other += 1;
            }
            snap = next;
        }
        assert!(other > 0 && other < 3000);
    }

    #[test]
    fn same_seed_same_match() {
        let run = |seed| {
            let mut e = MatchEngine::new(seed);
            let mut s = WorldSnapshot::kickoff();
            for _ in 0..500 {
                s = e.step(&s);
            }
            s
        };
        assert_eq!(run(3), run(3));
        assert_ne!(run(3), run(4));
    }
}
