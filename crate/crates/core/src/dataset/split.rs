//! Assigning whole matches to train, validation and test.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MatchSplit {
    pub train: BTreeSet<u32>,
    pub validation: BTreeSet<u32>,
    pub test: BTreeSet<u32>,
}

impl MatchSplit {
    pub fn parts(&self) -> [&BTreeSet<u32>; 3] {
        [&self.train, &self.validation, &self.test]
    }
}

/// Match counts per split by largest remainder, then topped up so that
/// train and test, and validation when there are matches to spare, get at
/// least one match each when their fraction is positive.
fn counts(n: usize, fractions: [f64; 3]) -> [usize; 3] {
    let exact: Vec<f64> = fractions.iter().map(|f| f * n as f64).collect();
    let mut c: [usize; 3] = std::array::from_fn(|i| (exact[i] + 1e-9).floor() as usize);
    let mut order: Vec<usize> = (0..3).collect();
    order.sort_by(|&a, &b| (exact[b] - c[b] as f64).total_cmp(&(exact[a] - c[a] as f64)).then(a.cmp(&b)));
    let mut left = n - c.iter().sum::<usize>();
    for &i in order.iter().cycle().take(3 * n) {
        if left == 0 {
            break;
        }
        c[i] += 1;
        left -= 1;
    }
    for i in [0, 2, 1] {
        if fractions[i] > 0.0 && c[i] == 0 {
            if let Some(donor) = (0..3).filter(|&j| c[j] > 1).max_by_key(|&j| (c[j], std::cmp::Reverse(j))) {
                c[donor] -= 1;
                c[i] += 1;
            }
        }
    }
    c
}

/// Shuffles the distinct match ids with `seed` and deals them out by
/// `fractions` (train, validation, test).
pub fn split_by_match(match_ids: &[u32], fractions: [f64; 3], seed: u64) -> Result<MatchSplit> {
    if fractions.iter().any(|f| !(0.0..=1.0).contains(f)) || (fractions.iter().sum::<f64>() - 1.0).abs() > 1e-6 {
        return Err(Error::Config(format!("split fractions {fractions:?} must be in [0, 1] and sum to 1")));
    }
    let mut ids: Vec<u32> = match_ids.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let needed = [fractions[0], fractions[2]].iter().filter(|&&f| f > 0.0).count();
    if ids.len() < needed {
        return Err(Error::Config(format!(
            "{} matches cannot fill both the train and the test split",
            ids.len()
        )));
    }
    ids.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let [a, b, _] = counts(ids.len(), fractions);
    Ok(MatchSplit {
        train: ids[..a].iter().copied().collect(),
        validation: ids[a..a + b].iter().copied().collect(),
        test: ids[a + b..].iter().copied().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn proportional_counts() {
        assert_eq!(counts(10, [0.8, 0.1, 0.1]), [8, 1, 1]);
        assert_eq!(counts(50, [0.8, 0.1, 0.1]), [40, 5, 5]);
        assert_eq!(counts(3, [0.8, 0.1, 0.1]), [1, 1, 1]);
        assert_eq!(counts(7, [1.0, 0.0, 0.0]), [7, 0, 0]);
        assert_eq!(counts(4, [0.5, 0.25, 0.25]), [2, 1, 1]);
        assert_eq!(counts(2, [0.8, 0.1, 0.1]), [1, 0, 1]);
    }

    #[test]
    fn too_few_matches() {
        assert!(split_by_match(&[1], [0.8, 0.1, 0.1], 0).is_err());
        assert!(split_by_match(&[1, 2, 3], [0.8, 0.1, 0.2], 0).is_err());
    }
}
