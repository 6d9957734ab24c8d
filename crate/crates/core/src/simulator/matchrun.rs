//! Running a whole match: truth and belief side by side, cycle by cycle.

use super::belief::{update_belief, BeliefState};
use super::sensor::ViewConfig;
use super::world::{GameMode, MatchEngine, WorldSnapshot};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchConfig {
    pub cycles: u32,
    pub view: ViewConfig,
}

impl Default for MatchConfig {
    fn default() -> Self {
        Self {
            cycles: 6000,
            view: ViewConfig::default(),
        }
    }
}

/// Truth and the observer's belief after the same cycle.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub truth: WorldSnapshot,
    pub belief: BeliefState,
}

impl Frame {
    /// Only play-on frames become dataset records.
    pub fn is_play_on(&self) -> bool {
        self.truth.mode == GameMode::PlayOn
    }
}

/// Lazily produces the frames of one match, cycles 1 through `cycles`.
#[derive(Debug, Clone)]
pub struct MatchRun {
    engine: MatchEngine,
    truth: WorldSnapshot,
    belief: BeliefState,
    config: MatchConfig,
}

impl MatchRun {
    pub fn new(config: MatchConfig, seed: u64) -> Self {
        let truth = WorldSnapshot::kickoff();
        let belief = BeliefState::initial(&truth);
        Self {
            engine: MatchEngine::new(seed),
            truth,
            belief,
            config,
        }
    }
}

impl Iterator for MatchRun {
    type Item = Frame;

    fn next(&mut self) -> Option<Frame> {
        if self.truth.cycle >= self.config.cycles {
            return None;
        }
        self.truth = self.engine.step(&self.truth);
        self.belief = update_belief(&self.belief, &self.truth, &self.config.view);
        Some(Frame {
            truth: self.truth.clone(),
            belief: self.belief.clone(),
        })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = self.config.cycles.saturating_sub(self.truth.cycle) as usize;
        (left, Some(left))
    }
}

pub fn run_match(config: &MatchConfig, seed: u64) -> Vec<Frame> {
    MatchRun::new(*config, seed).collect()
}
