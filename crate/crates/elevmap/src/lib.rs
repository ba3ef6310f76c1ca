//! Robot-centric elevation-map processing.
//!
//! The pipeline order is crop → (perturb) → fill → median → (encode | sobel),
//! with drift correction applied against the stance foot before encoding.
//! Every operation is a pure function; randomized ones take an explicit RNG.

mod error;
mod grid;
mod io;
mod noise;
mod pipeline;

pub use error::ElevMapError;
pub use grid::{EncodedObservationMap, LocalGrid, GRID_CENTER, GRID_SIZE};
pub use io::{
    load_encoded_map_from, load_local_grid_from, save_encoded_map_to, save_local_grid_to,
};
pub use noise::{perturb, EpisodeMapNoise, MapNoiseConfig};
pub use pipeline::{
    crop, drift_correct, encode, fill_unknown, median_filter, sobel_edges, DriftCorrection,
    EdgeMap,
};
