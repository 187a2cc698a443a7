//! Image association on a 20x20 memristor array.
//!
//! Training writes a prototype into the array as low-resistance cells; the
//! second-order step compares new images with that state and drives a
//! label device toward ON (match) or OFF (no match).

mod classify;
mod grid;
mod io;
pub mod synthetic;
mod train;

pub use classify::{calibrate_threshold, classify, similarity, Classification, InferConfig, LABEL_THRESHOLD_OHM};
pub use grid::{array_state, binarize, ArrayState, ImageGrid, GRID_SIDE};
pub use io::{crop_and_resize, load_image, load_state_grid, parse_grid_csv, parse_pgm, to_pgm, RawImage};
pub use train::{count_voltage, match_counts, train_pair, training_voltages, MatchPredicate, MatchScope, TrainConfig};

use crate::error::Result;

/// Train on every pair in order.
pub fn train_all<'a>(
    mut array: ArrayState,
    pairs: impl IntoIterator<Item = (&'a ImageGrid, &'a ImageGrid)>,
    cfg: &TrainConfig,
) -> Result<ArrayState> {
    for (input, teacher) in pairs {
        array = train_pair(&array, input, teacher, cfg)?;
    }
    Ok(array)
}
