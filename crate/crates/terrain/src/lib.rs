//! Procedural training terrains and world-frame elevation queries.
//!
//! Terrain is a piecewise-constant elevation grid: every cell holds the
//! feature height evaluated at its center, and height queries return the
//! containing cell's value, consistent with the discontinuous stair and
//! block geometry. Generation is a pure function of the spec (seeded).

mod error;
mod generate;
mod heightmap;
mod io;

pub use error::TerrainError;
pub use generate::{generate, ranges, MapGeometry, TerrainCategory, TerrainSpec};
pub use heightmap::HeightMap;
pub use io::{load_heightmap, load_heightmap_from, save_heightmap, save_heightmap_to};
