//! From match traces to scaled, windowed training samples.

pub mod io;
pub mod record;
pub mod scaling;
pub mod split;
pub mod window;

pub use io::{dataset_columns, read_dataset, read_dataset_from, write_dataset, write_dataset_to, DATASET_VERSION};
pub use record::{record_column_names, Record, BLOCK_WIDTH, RECORD_WIDTH};
pub use scaling::{impute, scale, scale_block, unscale, FeatureDomain, BODY, POSITION_X, POSITION_Y, POS_COUNT, VELOCITY};
pub use split::{split_by_match, MatchSplit};
pub use window::{build_windows, split_sequences, PlayOnSequence, WindowRef, WindowSample, WindowSet, TARGET_WIDTH};

use crate::simulator::{Frame, GameMode, Trace};

/// One record per play-on cycle, in cycle order.
pub fn extract_records(trace: &Trace) -> Vec<Record> {
    trace
        .rows
        .iter()
        .filter(|r| r.mode == GameMode::PlayOn)
        .map(|r| r.record.clone())
        .collect()
}

/// Same as [`extract_records`] but straight from simulated frames.
pub fn records_from_frames<'a>(frames: impl IntoIterator<Item = &'a Frame>) -> Vec<Record> {
    frames
        .into_iter()
        .filter(|f| f.is_play_on())
        .map(|f| Record::from_frame(&f.truth, &f.belief))
        .collect()
}
