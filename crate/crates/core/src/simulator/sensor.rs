//! Visual sensor model: view cone, log-quantized distances, integer directions.

use crate::error::{Error, Result};

use super::geometry::{wrap, Position};

/// Log-quantization step for player and ball distances.
pub const OBJECT_QSTEP: f64 = 0.1;
/// Log-quantization step for flag distances.
pub const FLAG_QSTEP: f64 = 0.01;
/// Final rounding applied to every reported distance.
pub const DISTANCE_RESOLUTION: f64 = 0.1;

/// Rounds to the nearest integer, ties away from zero. Values within 1e-9
/// of a half are treated as ties so that decimal inputs such as 23.5 that
/// land a hair off the half in binary still round the documented way.
pub(crate) fn round_half_away(q: f64) -> f64 {
    let whole = q.trunc();
    let frac = (q - whole).abs();
    if (frac - 0.5).abs() < 1e-9 {
        whole + q.signum()
    } else {
        q.round()
    }
}

/// Nearest multiple of `step`, ties away from zero.
pub fn quantize(value: f64, step: f64) -> Result<f64> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::Domain(format!("quantization step must be positive, got {step}")));
    }
    if !value.is_finite() {
        return Err(Error::Domain(format!("cannot quantize {value}")));
    }
    Ok(round_half_away(value / step) * step)
}

/// Reported distance: the log of the true distance is quantized with
/// `qstep`, exponentiated, and rounded to 0.1 m.
pub fn observe_distance(true_distance: f64, qstep: f64) -> Result<f64> {
    if !(true_distance > 0.0) || !true_distance.is_finite() {
        return Err(Error::Domain(format!("distance must be positive, got {true_distance}")));
    }
    let log_q = quantize(true_distance.ln(), qstep)?;
    quantize(log_q.exp(), DISTANCE_RESOLUTION)
}

/// Reported relative direction: nearest integer degree, re-wrapped.
pub fn observe_direction(relative_direction: f64) -> Result<i32> {
    if !relative_direction.is_finite() {
        return Err(Error::Domain(format!("cannot observe direction {relative_direction}")));
    }
    Ok(wrap(round_half_away(relative_direction)) as i32)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ViewWidth {
    Narrow,
    Normal,
    Wide,
}

impl ViewWidth {
    pub fn degrees(self) -> f64 {
        match self {
            ViewWidth::Narrow => 60.0,
            ViewWidth::Normal => 120.0,
            ViewWidth::Wide => 180.0,
        }
    }

    pub fn from_degrees(deg: u32) -> Result<Self> {
        match deg {
            60 => Ok(ViewWidth::Narrow),
            120 => Ok(ViewWidth::Normal),
            180 => Ok(ViewWidth::Wide),
            other => Err(Error::Config(format!("view width must be 60, 120 or 180, got {other}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NeckPolicy {
    /// Turn the neck by one view width every cycle.
    RotatingScan,
    /// Keep the believed ball in view while sweeping to either side of it.
    BallFocused,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ViewConfig {
    pub width: ViewWidth,
    pub max_visible_distance: f64,
    pub neck_policy: NeckPolicy,
}

impl Default for ViewConfig {
    fn default() -> Self {
        Self {
            width: ViewWidth::Normal,
            max_visible_distance: 60.0,
            neck_policy: NeckPolicy::BallFocused,
        }
    }
}

/// Whether `target` lies inside the observer's view cone (edges inclusive).
pub fn in_view(observer: Position, neck: f64, target: Position, view: &ViewConfig) -> bool {
    let d = observer.distance(target);
    if d > view.max_visible_distance {
        return false;
    }
    if d == 0.0 {
        return true;
    }
    wrap(observer.bearing_to(target) - neck).abs() <= view.width.degrees() / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn quantize_examples() {
        assert!(close(quantize(2.34, 0.1).unwrap(), 2.3));
        assert_eq!(quantize(0.0, 0.1).unwrap(), 0.0);
        assert!(close(quantize(2.35, 0.1).unwrap(), 2.4));
        assert!(close(quantize(-2.35, 0.1).unwrap(), -2.4));
        assert!(quantize(1.0, 0.0).is_err());
        assert!(quantize(1.0, -0.1).is_err());
    }

    #[test]
    fn observe_distance_examples() {
        // ln 10 = 2.302585 -> 2.3 -> 9.97418 -> 10.0
        assert!(close(observe_distance(10.0, 0.1).unwrap(), 10.0));
        // ln 35 = 3.55535 -> 3.6 -> 36.5982 -> 36.6
        assert!(close(observe_distance(35.0, 0.1).unwrap(), 36.6));
        // ln 0.5 = -0.693147 -> -0.7 -> 0.496585 -> 0.5
        assert!(close(observe_distance(0.5, 0.1).unwrap(), 0.5));
        assert!(observe_distance(0.0, 0.1).is_err());
        assert!(observe_distance(-1.0, 0.1).is_err());
    }

    #[test]
    fn observe_direction_examples() {
        assert_eq!(observe_direction(23.4).unwrap(), 23);
        assert_eq!(observe_direction(-0.5).unwrap(), -1);
        assert_eq!(observe_direction(179.7).unwrap(), -180);
        assert!(observe_direction(f64::NAN).is_err());
    }

    #[test]
    fn view_cone_edges() {
        let view = ViewConfig {
            width: ViewWidth::Narrow,
            max_visible_distance: 60.0,
            neck_policy: NeckPolicy::RotatingScan,
        };
        let o = Position::new(0.0, 0.0);
        assert!(in_view(o, 0.0, Position::new(10.0, 0.0), &view));
        assert!(!in_view(o, 0.0, o.offset(10.0, 31.0), &view));
        assert!(in_view(o, 0.0, o.offset(10.0, 30.0), &view));
        assert!(in_view(o, 0.0, o.offset(10.0, -30.0), &view));
        assert!(!in_view(o, 0.0, Position::new(61.0, 0.0), &view));
        // wrap-around
        assert!(in_view(o, 179.0, o.offset(5.0, -178.0), &view));
    }

    #[test]
    fn view_width_parsing() {
        assert_eq!(ViewWidth::from_degrees(120).unwrap(), ViewWidth::Normal);
        assert!(ViewWidth::from_degrees(90).is_err());
    }
}
