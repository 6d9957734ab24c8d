//! Affine feature scaling and imputation of forgotten objects.

use crate::simulator::{ObjectBelief, TEAM_SIZE};

use super::record::{field, left_offset, BALL_FEATURES, BLOCK_WIDTH, PLAYER_FEATURES};

/// An affine map from `[lo, hi]` onto `[scaled_lo, scaled_hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureDomain {
    pub name: &'static str,
    pub lo: f64,
    pub hi: f64,
    pub scaled_lo: f64,
    pub scaled_hi: f64,
}

impl FeatureDomain {
    pub const fn new(name: &'static str, lo: f64, hi: f64, scaled_lo: f64, scaled_hi: f64) -> Self {
        Self {
            name,
            lo,
            hi,
            scaled_lo,
            scaled_hi,
        }
    }

    /// Values outside `[lo, hi]` go through the same map.
    pub fn scale(&self, value: f64) -> f64 {
        self.scaled_lo + (value - self.lo) * (self.scaled_hi - self.scaled_lo) / (self.hi - self.lo)
    }

    pub fn unscale(&self, scaled: f64) -> f64 {
        self.lo + (scaled - self.scaled_lo) * (self.hi - self.lo) / (self.scaled_hi - self.scaled_lo)
    }
}

pub const POSITION_X: FeatureDomain = FeatureDomain::new("position x", -52.5, 52.5, -1.0, 1.0);
pub const POSITION_Y: FeatureDomain = FeatureDomain::new("position y", -34.0, 34.0, -1.0, 1.0);
pub const VELOCITY: FeatureDomain = FeatureDomain::new("velocity", -3.0, 3.0, -1.0, 1.0);
pub const BODY: FeatureDomain = FeatureDomain::new("body angle", -180.0, 180.0, -1.0, 1.0);
pub const POS_COUNT: FeatureDomain = FeatureDomain::new("pos count", 0.0, 30.0, 0.0, 1.0);

pub const DOMAINS: [FeatureDomain; 5] = [POSITION_X, POSITION_Y, VELOCITY, BODY, POS_COUNT];

pub fn scale(value: f64, domain: &FeatureDomain) -> f64 {
    domain.scale(value)
}

pub fn unscale(value: f64, domain: &FeatureDomain) -> f64 {
    domain.unscale(value)
}

const BALL_DOMAINS: [FeatureDomain; BALL_FEATURES] = [POSITION_X, POSITION_Y, VELOCITY, VELOCITY, POS_COUNT];
const PLAYER_DOMAINS: [FeatureDomain; PLAYER_FEATURES] = [POSITION_X, POSITION_Y, VELOCITY, VELOCITY, BODY, POS_COUNT];

/// Domain of every column of a block.
pub fn block_domain(column: usize) -> &'static FeatureDomain {
    if column < BALL_FEATURES {
        &BALL_DOMAINS[column]
    } else {
        &PLAYER_DOMAINS[(column - BALL_FEATURES) % PLAYER_FEATURES]
    }
}

/// Scales a raw block column by column. Forgotten objects already carry
/// the sentinel, zero velocity and body, and pos count 30, so they come out
/// imputed.
pub fn scale_block(raw: &[f64; BLOCK_WIDTH]) -> [f64; BLOCK_WIDTH] {
    std::array::from_fn(|c| block_domain(c).scale(raw[c]))
}

/// Scaled feature fragment for one belief entry (5 values for the ball,
/// 6 for a player).
pub fn impute(belief: &ObjectBelief, is_ball: bool) -> Vec<f64> {
    let (x, y, vx, vy, body, pc) = if belief.known {
        (
            belief.position.x,
            belief.position.y,
            belief.velocity.vx,
            belief.velocity.vy,
            belief.body,
            f64::from(belief.pos_count),
        )
    } else {
        (-105.0, -68.0, 0.0, 0.0, 0.0, 30.0)
    };
    let mut out = vec![POSITION_X.scale(x), POSITION_Y.scale(y), VELOCITY.scale(vx), VELOCITY.scale(vy)];
    if !is_ball {
        out.push(BODY.scale(body));
    }
    out.push(POS_COUNT.scale(pc));
    out
}

/// Scaled accurate (x, y) of the 11 opponents.
pub fn scaled_targets(accurate: &[f64; BLOCK_WIDTH]) -> [f64; 2 * TEAM_SIZE] {
    std::array::from_fn(|k| {
        let o = left_offset(k / 2);
        if k % 2 == 0 {
            POSITION_X.scale(accurate[o + field::X])
        } else {
            POSITION_Y.scale(accurate[o + field::Y])
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulator::{Position, Velocity};

    #[test]
    fn table_endpoints() {
        assert_eq!(POSITION_X.scale(52.5), 1.0);
        assert_eq!(POSITION_X.scale(-52.5), -1.0);
        assert_eq!(POSITION_X.scale(0.0), 0.0);
        assert_eq!(POSITION_Y.scale(34.0), 1.0);
        assert_eq!(POS_COUNT.scale(30.0), 1.0);
        assert_eq!(POS_COUNT.scale(0.0), 0.0);
        assert_eq!(VELOCITY.scale(3.0), 1.0);
        assert_eq!(BODY.scale(-180.0), -1.0);
    }

    #[test]
    fn sentinel_maps_to_minus_two() {
        assert_eq!(POSITION_X.scale(-105.0), -2.0);
        assert_eq!(POSITION_Y.scale(-68.0), -2.0);
    }

    #[test]
    fn unknown_and_known_fragments() {
        let f = impute(&ObjectBelief::UNKNOWN, false);
        assert_eq!(f, vec![-2.0, -2.0, 0.0, 0.0, 0.0, 1.0]);
        assert_eq!(impute(&ObjectBelief::UNKNOWN, true), vec![-2.0, -2.0, 0.0, 0.0, 1.0]);
        let known = ObjectBelief {
            position: Position::new(0.0, 0.0),
            velocity: Velocity::ZERO,
            body: 0.0,
            pos_count: 0,
            known: true,
        };
        assert_eq!(impute(&known, false), vec![0.0; 6]);
    }

    #[test]
    fn block_domains_follow_layout() {
        assert_eq!(block_domain(0).name, "position x");
        assert_eq!(block_domain(4).name, "pos count");
        assert_eq!(block_domain(5).name, "position x");
        assert_eq!(block_domain(9).name, "body angle");
        assert_eq!(block_domain(BLOCK_WIDTH - 1).name, "pos count");
    }
}
