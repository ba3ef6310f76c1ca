use serde::{Deserialize, Serialize};

use crate::error::TerrainError;
use crate::generate::TerrainCategory;

/// World-frame elevation grid. `origin` is the lower-left corner of cell
/// (0,0); cell centers sit at origin + (index + 0.5)·resolution. Data is
/// row-major over (iy, ix).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeightMap {
    pub origin: (f64, f64),
    pub resolution: f64,
    /// Cell count along x.
    pub width: usize,
    /// Cell count along y.
    pub height: usize,
    pub data: Vec<f64>,
    /// Surface friction coefficient. Metadata only: the reduced model has
    /// no slip dynamics.
    pub friction: f64,
    pub category: TerrainCategory,
}

impl HeightMap {
    pub fn filled(
        origin: (f64, f64),
        resolution: f64,
        width: usize,
        height: usize,
        value: f64,
        friction: f64,
        category: TerrainCategory,
    ) -> Self {
        Self {
            origin,
            resolution,
            width,
            height,
            data: vec![value; width * height],
            friction,
            category,
        }
    }

    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.data[iy * self.width + ix]
    }

    pub fn set(&mut self, ix: usize, iy: usize, value: f64) {
        self.data[iy * self.width + ix] = value;
    }

    pub fn cell_center(&self, ix: usize, iy: usize) -> (f64, f64) {
        (
            self.origin.0 + (ix as f64 + 0.5) * self.resolution,
            self.origin.1 + (iy as f64 + 0.5) * self.resolution,
        )
    }

    /// Index of the cell containing the point, or None outside the map.
    pub fn cell_index(&self, x: f64, y: f64) -> Option<(usize, usize)> {
        let fx = (x - self.origin.0) / self.resolution;
        let fy = (y - self.origin.1) / self.resolution;
        if fx < 0.0 || fy < 0.0 {
            return None;
        }
        let ix = fx.floor() as usize;
        let iy = fy.floor() as usize;
        if ix < self.width && iy < self.height {
            Some((ix, iy))
        } else {
            None
        }
    }

    /// Signed cell index without the bounds check (for crop windows that
    /// may extend past the map).
    pub fn cell_index_unbounded(&self, x: f64, y: f64) -> (i64, i64) {
        (
            ((x - self.origin.0) / self.resolution).floor() as i64,
            ((y - self.origin.1) / self.resolution).floor() as i64,
        )
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        self.cell_index(x, y).is_some()
    }

    /// Elevation of the cell containing (x, y).
    pub fn height_at(&self, x: f64, y: f64) -> Result<f64, TerrainError> {
        let (ix, iy) = self
            .cell_index(x, y)
            .ok_or(TerrainError::OutOfBounds { x, y })?;
        Ok(self.at(ix, iy))
    }

    pub fn max_abs_elevation(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Map mirrored about the y = 0 axis. Exact when the y lattice is
    /// symmetric about zero (origin.1 = −height·resolution/2).
    pub fn mirrored_y(&self) -> Self {
        let mut out = self.clone();
        for iy in 0..self.height {
            for ix in 0..self.width {
                out.set(ix, self.height - 1 - iy, self.at(ix, iy));
            }
        }
        out
    }
}
