//! Field geometry. x points toward the right goal, y upward, angles are
//! degrees counter-clockwise from +x.

use crate::error::{Error, Result};

pub const FIELD_HALF_LENGTH: f64 = 52.5;
pub const FIELD_HALF_WIDTH: f64 = 34.0;
pub const GOAL_HALF_WIDTH: f64 = 7.01;

pub const BALL_MAX_SPEED: f64 = 3.0;
pub const PLAYER_MAX_SPEED: f64 = 1.05;
pub const BALL_DECAY: f64 = 0.94;

/// Where objects the observer has forgotten are placed.
pub const SENTINEL: Position = Position { x: -105.0, y: -68.0 };

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Velocity {
    pub vx: f64,
    pub vy: f64,
}

impl Position {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Position) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    /// Direction from `self` toward `other`, in [-180, 180).
    pub fn bearing_to(self, other: Position) -> f64 {
        wrap((other.y - self.y).atan2(other.x - self.x).to_degrees())
    }

    pub fn offset(self, distance: f64, direction_deg: f64) -> Position {
        let r = direction_deg.to_radians();
        Position::new(self.x + distance * r.cos(), self.y + distance * r.sin())
    }

    pub fn moved(self, v: Velocity) -> Position {
        Position::new(self.x + v.vx, self.y + v.vy)
    }

    pub fn is_on_field(self) -> bool {
        self.x.abs() <= FIELD_HALF_LENGTH && self.y.abs() <= FIELD_HALF_WIDTH
    }

    pub fn clamp_to_field(self) -> Position {
        self.clamp_with_margin(0.0)
    }

    pub fn clamp_with_margin(self, margin: f64) -> Position {
        Position::new(
            self.x.clamp(-FIELD_HALF_LENGTH - margin, FIELD_HALF_LENGTH + margin),
            self.y.clamp(-FIELD_HALF_WIDTH - margin, FIELD_HALF_WIDTH + margin),
        )
    }
}

impl Velocity {
    pub const ZERO: Velocity = Velocity { vx: 0.0, vy: 0.0 };

    pub const fn new(vx: f64, vy: f64) -> Self {
        Self { vx, vy }
    }

    pub fn polar(speed: f64, direction_deg: f64) -> Self {
        let r = direction_deg.to_radians();
        Self::new(speed * r.cos(), speed * r.sin())
    }

    pub fn between(from: Position, to: Position) -> Self {
        Self::new(to.x - from.x, to.y - from.y)
    }

    pub fn speed(self) -> f64 {
        self.vx.hypot(self.vy)
    }

    pub fn scaled(self, k: f64) -> Self {
        Self::new(self.vx * k, self.vy * k)
    }

    /// Rescales the vector so its magnitude does not exceed `max`.
    pub fn capped(self, max: f64) -> Self {
        let s = self.speed();
        if s > max {
            self.scaled(max / s)
        } else {
            self
        }
    }
}

/// Wraps a finite angle into [-180, 180).
pub fn wrap_angle(angle: f64) -> Result<f64> {
    if !angle.is_finite() {
        return Err(Error::Domain(format!("cannot wrap non-finite angle {angle}")));
    }
    Ok(wrap(angle))
}

pub(crate) fn wrap(angle: f64) -> f64 {
    if (-180.0..180.0).contains(&angle) {
        return angle;
    }
    let r = (angle + 180.0).rem_euclid(360.0) - 180.0;
    // rem_euclid can round up to exactly 360 for tiny negative inputs
    if r >= 180.0 {
        r - 360.0
    } else {
        r
    }
}
