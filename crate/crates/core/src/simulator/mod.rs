//! Ground-truth match synthesis and the observer's noisy view of it.

pub mod belief;
pub mod flags;
pub mod geometry;
pub mod matchrun;
pub mod sensor;
pub mod trace;
pub mod world;

pub use belief::{choose_neck, update_belief, BeliefState, ObjectBelief, MAX_POS_COUNT};
pub use flags::{localize_self, Flag, FlagSighting, FLAGS};
pub use geometry::{
    wrap_angle, Position, Velocity, BALL_DECAY, BALL_MAX_SPEED, FIELD_HALF_LENGTH, FIELD_HALF_WIDTH,
    PLAYER_MAX_SPEED, SENTINEL,
};
pub use matchrun::{run_match, Frame, MatchConfig, MatchRun};
pub use sensor::{
    in_view, observe_direction, observe_distance, quantize, NeckPolicy, ViewConfig, ViewWidth, FLAG_QSTEP,
    OBJECT_QSTEP,
};
pub use trace::{parse_trace, read_trace, write_trace, Trace, TraceHeader, TraceRow};
pub use world::{BallState, GameMode, MatchEngine, PlayerState, Side, WorldSnapshot, OBSERVER_INDEX, TEAM_SIZE};
