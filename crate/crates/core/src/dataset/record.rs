//! Per-cycle record layout: `cycle`, a noisy block, an accurate block.
//!
//! A block is the ball (x, y, vx, vy, pos_count) followed by left players
//! 1..=11 and right players 1..=11, each (x, y, vx, vy, body, pos_count).
//! Values are in physical units; forgotten objects sit at the sentinel.

use crate::simulator::{BeliefState, ObjectBelief, PlayerState, Position, WorldSnapshot, OBSERVER_INDEX, TEAM_SIZE};

pub const BALL_FEATURES: usize = 5;
pub const PLAYER_FEATURES: usize = 6;
pub const BLOCK_WIDTH: usize = BALL_FEATURES + 2 * TEAM_SIZE * PLAYER_FEATURES;
pub const RECORD_WIDTH: usize = 1 + 2 * BLOCK_WIDTH;

/// Offset of a left-team player's features inside a block.
pub const fn left_offset(i: usize) -> usize {
    BALL_FEATURES + i * PLAYER_FEATURES
}

/// Offset of a right-team player's features inside a block.
pub const fn right_offset(i: usize) -> usize {
    BALL_FEATURES + (TEAM_SIZE + i) * PLAYER_FEATURES
}

/// Position of each feature kind within a player fragment.
pub mod field {
    pub const X: usize = 0;
    pub const Y: usize = 1;
    pub const VX: usize = 2;
    pub const VY: usize = 3;
    pub const BODY: usize = 4;
    pub const POS_COUNT: usize = 5;
    /// The ball has no body angle.
    pub const BALL_POS_COUNT: usize = 4;
}

#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub cycle: u32,
    pub noisy: [f64; BLOCK_WIDTH],
    pub accurate: [f64; BLOCK_WIDTH],
}

fn write_ball(block: &mut [f64], pos: Position, vx: f64, vy: f64, pos_count: f64) {
    block[..BALL_FEATURES].copy_from_slice(&[pos.x, pos.y, vx, vy, pos_count]);
}

fn write_player(block: &mut [f64], at: usize, values: [f64; PLAYER_FEATURES]) {
    block[at..at + PLAYER_FEATURES].copy_from_slice(&values);
}

fn belief_fragment(b: &ObjectBelief) -> [f64; PLAYER_FEATURES] {
    [
        b.position.x,
        b.position.y,
        b.velocity.vx,
        b.velocity.vy,
        b.body,
        f64::from(b.pos_count),
    ]
}

fn truth_fragment(p: &PlayerState) -> [f64; PLAYER_FEATURES] {
    [p.position.x, p.position.y, p.velocity.vx, p.velocity.vy, p.body, 0.0]
}

impl Record {
    pub fn from_frame(truth: &WorldSnapshot, belief: &BeliefState) -> Self {
        let mut noisy = [0.0; BLOCK_WIDTH];
        let mut accurate = [0.0; BLOCK_WIDTH];
        let b = &belief.ball;
        write_ball(&mut noisy, b.position, b.velocity.vx, b.velocity.vy, f64::from(b.pos_count));
        let t = &truth.ball;
        write_ball(&mut accurate, t.position, t.velocity.vx, t.velocity.vy, 0.0);
        for i in 0..TEAM_SIZE {
            write_player(&mut noisy, left_offset(i), belief_fragment(&belief.left[i]));
            write_player(&mut noisy, right_offset(i), belief_fragment(&belief.right[i]));
            write_player(&mut accurate, left_offset(i), truth_fragment(&truth.left[i]));
            write_player(&mut accurate, right_offset(i), truth_fragment(&truth.right[i]));
        }
        Self {
            cycle: truth.cycle,
            noisy,
            accurate,
        }
    }

    /// `cycle`, noisy block, accurate block.
    pub fn to_row(&self) -> Vec<f64> {
        let mut row = Vec::with_capacity(RECORD_WIDTH);
        row.push(f64::from(self.cycle));
        row.extend_from_slice(&self.noisy);
        row.extend_from_slice(&self.accurate);
        row
    }

    pub fn opponent_believed(&self, i: usize) -> Position {
        let o = left_offset(i);
        Position::new(self.noisy[o + field::X], self.noisy[o + field::Y])
    }

    pub fn opponent_pos_count(&self, i: usize) -> u8 {
        self.noisy[left_offset(i) + field::POS_COUNT] as u8
    }

    pub fn opponent_true(&self, i: usize) -> Position {
        let o = left_offset(i);
        Position::new(self.accurate[o + field::X], self.accurate[o + field::Y])
    }

    pub fn observer_true(&self) -> Position {
        let o = right_offset(OBSERVER_INDEX);
        Position::new(self.accurate[o + field::X], self.accurate[o + field::Y])
    }

    /// True observer-to-opponent distances.
    pub fn opponent_distances(&self) -> [f64; TEAM_SIZE] {
        let me = self.observer_true();
        std::array::from_fn(|i| me.distance(self.opponent_true(i)))
    }
}

/// Column names of one block, e.g. `n_ball_x`, `a_l5_pc`.
pub fn block_column_names(prefix: &str) -> Vec<String> {
    let mut names = Vec::with_capacity(BLOCK_WIDTH);
    for f in ["x", "y", "vx", "vy", "pc"] {
        names.push(format!("{prefix}_ball_{f}"));
    }
    for team in ["l", "r"] {
        for i in 1..=TEAM_SIZE {
            for f in ["x", "y", "vx", "vy", "body", "pc"] {
                names.push(format!("{prefix}_{team}{i}_{f}"));
            }
        }
    }
    names
}

/// All 275 record columns in order.
pub fn record_column_names() -> Vec<String> {
    let mut names = vec!["cycle".to_string()];
    names.extend(block_column_names("n"));
    names.extend(block_column_names("a"));
    names
}
