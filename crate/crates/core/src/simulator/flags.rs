//! Fixed landmarks and flag-based self-localization.

use crate::error::{Error, Result};

use super::geometry::{Position, FIELD_HALF_LENGTH as L, FIELD_HALF_WIDTH as W, GOAL_HALF_WIDTH as G};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Flag {
    pub id: u8,
    pub position: Position,
}

const fn flag(id: u8, x: f64, y: f64) -> Flag {
    Flag {
        id,
        position: Position::new(x, y),
    }
}

/// 28 perimeter flags (4 corners, 9 on each touch line, 3 on each goal
/// line) followed by the 4 goal posts.
pub const FLAGS: [Flag; 32] = [
    flag(0, -L, -W),
    flag(1, -L, W),
    flag(2, L, -W),
    flag(3, L, W),
    flag(4, -40.0, W),
    flag(5, -30.0, W),
    flag(6, -20.0, W),
    flag(7, -10.0, W),
    flag(8, 0.0, W),
    flag(9, 10.0, W),
    flag(10, 20.0, W),
    flag(11, 30.0, W),
    flag(12, 40.0, W),
    flag(13, -40.0, -W),
    flag(14, -30.0, -W),
    flag(15, -20.0, -W),
    flag(16, -10.0, -W),
    flag(17, 0.0, -W),
    flag(18, 10.0, -W),
    flag(19, 20.0, -W),
    flag(20, 30.0, -W),
    flag(21, 40.0, -W),
    flag(22, -L, -20.0),
    flag(23, -L, 0.0),
    flag(24, -L, 20.0),
    flag(25, L, -20.0),
    flag(26, L, 0.0),
    flag(27, L, 20.0),
    flag(28, -L, -G),
    flag(29, -L, G),
    flag(30, L, -G),
    flag(31, L, G),
];

/// One flag as reported by the sensor, with the direction already turned
/// into a global angle using the estimated neck direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlagSighting {
    pub flag: Flag,
    pub distance: f64,
    pub global_direction: f64,
}

/// Averages the positions implied by the three closest sightings.
pub fn localize_self(sightings: &[FlagSighting]) -> Result<Position> {
    if sightings.len() < 3 {
        return Err(Error::Localization(sightings.len()));
    }
    let mut nearest: Vec<&FlagSighting> = sightings.iter().collect();
    nearest.sort_by(|a, b| a.distance.total_cmp(&b.distance).then(a.flag.id.cmp(&b.flag.id)));
    let (sx, sy) = nearest[..3].iter().fold((0.0, 0.0), |(sx, sy), s| {
        let c = s.flag.position.offset(-s.distance, s.global_direction);
        (sx + c.x, sy + c.y)
    });
    Ok(Position::new(sx / 3.0, sy / 3.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulator::sensor::{in_view, observe_distance, NeckPolicy, ViewConfig, ViewWidth, OBJECT_QSTEP};

    fn exact(agent: Position, f: Flag) -> FlagSighting {
        FlagSighting {
            flag: f,
            distance: agent.distance(f.position),
            global_direction: agent.bearing_to(f.position),
        }
    }

    #[test]
    fn flag_ids_are_indices() {
        for (i, f) in FLAGS.iter().enumerate() {
            assert_eq!(f.id as usize, i);
            assert!(f.position.is_on_field());
        }
    }

    #[test]
    fn exact_sightings_recover_position() {
        let agent = Position::new(10.0, 5.0);
        let s: Vec<_> = [FLAGS[9], FLAGS[26], FLAGS[18]].iter().map(|&f| exact(agent, f)).collect();
        let p = localize_self(&s).unwrap();
        assert!(p.distance(agent) < 1e-9);
    }

    #[test]
    fn farthest_corrupted_flag_is_ignored() {
        let agent = Position::new(10.0, 5.0);
        let mut s: Vec<_> = [FLAGS[9], FLAGS[26], FLAGS[18], FLAGS[0]].iter().map(|&f| exact(agent, f)).collect();
        s[3].global_direction += 40.0;
        s[3].distance *= 1.01;
        let p = localize_self(&s).unwrap();
        assert!(p.distance(agent) < 1e-9);
    }

    #[test]
    fn too_few_sightings_fail() {
        let agent = Position::new(0.0, 0.0);
        let s: Vec<_> = FLAGS[..2].iter().map(|&f| exact(agent, f)).collect();
        assert!(matches!(localize_self(&s), Err(Error::Localization(2))));
    }

    #[test]
    fn quantized_distances_stay_within_bound() {
        // worst case of observe_distance below 20 m, found by sweeping
        let mut worst = 0.0f64;
        let mut d = 0.01;
        while d <= 20.0 {
            worst = worst.max((observe_distance(d, OBJECT_QSTEP).unwrap() - d).abs());
            d += 0.01;
        }
        assert!(worst < 1.2, "{worst}");
        let agents = [Position::new(40.0, 25.0), Position::new(-45.0, -20.0), Position::new(35.0, -28.0)];
        for agent in agents {
            let mut near: Vec<Flag> = FLAGS.iter().copied().filter(|f| agent.distance(f.position) <= 20.0).collect();
            near.truncate(3);
            assert_eq!(near.len(), 3);
            let s: Vec<_> = near
                .iter()
                .map(|&f| {
                    let mut e = exact(agent, f);
                    e.distance = observe_distance(e.distance, OBJECT_QSTEP).unwrap();
                    e
                })
                .collect();
            let p = localize_self(&s).unwrap();
            assert!(p.distance(agent) <= worst + 1e-9, "{agent:?} -> {p:?}");
            assert!(p.distance(agent) < 1.2);
        }
    }

    #[test]
    fn wide_view_sees_three_flags_everywhere() {
        let view = ViewConfig {
            width: ViewWidth::Wide,
            max_visible_distance: 60.0,
            neck_policy: NeckPolicy::RotatingScan,
        };
        let centre = Position::new(0.0, 0.0);
        for xi in -105..=105 {
            for yi in -68..=68 {
                let p = Position::new(xi as f64 * 0.5, yi as f64 * 0.5);
                let inner = p.x.abs() <= 45.0 && p.y.abs() <= 25.0;
                // near the perimeter only necks facing into the field are guaranteed
                let necks: Vec<f64> = if inner {
                    (0..24).map(|k| -180.0 + 15.0 * k as f64).collect()
                } else if p == centre {
                    vec![0.0]
                } else {
                    vec![p.bearing_to(centre)]
                };
                for neck in necks {
                    let n = FLAGS.iter().filter(|f| in_view(p, neck, f.position, &view)).count();
                    assert!(n >= 3, "{p:?} neck {neck}: {n} flags");
                }
            }
        }
    }
}
