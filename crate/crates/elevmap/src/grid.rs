use serde::{Deserialize, Serialize};

/// Local crops are fixed at 64×64 cells.
pub const GRID_SIZE: usize = 64;
/// Index of the cell whose offset channels are exactly zero.
pub const GRID_CENTER: usize = 32;

/// Robot-centric elevation crop, aligned to the world cell lattice.
/// `center` is the world position of cell (32, 32)'s center. Data is
/// row-major over (iy, ix): index = iy·64 + ix, with ix along +x and iy
/// along +y.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalGrid {
    pub center: (f64, f64),
    pub resolution: f64,
    pub data: Vec<f64>,
    pub valid: Vec<bool>,
}

impl LocalGrid {
    pub fn filled(center: (f64, f64), resolution: f64, value: f64) -> Self {
        Self {
            center,
            resolution,
            data: vec![value; GRID_SIZE * GRID_SIZE],
            valid: vec![true; GRID_SIZE * GRID_SIZE],
        }
    }

    #[inline]
    pub fn idx(ix: usize, iy: usize) -> usize {
        iy * GRID_SIZE + ix
    }

    #[inline]
    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.data[Self::idx(ix, iy)]
    }

    #[inline]
    pub fn set(&mut self, ix: usize, iy: usize, v: f64) {
        self.data[Self::idx(ix, iy)] = v;
    }

    #[inline]
    pub fn is_valid(&self, ix: usize, iy: usize) -> bool {
        self.valid[Self::idx(ix, iy)]
    }

    pub fn all_valid(&self) -> bool {
        self.valid.iter().all(|&v| v)
    }

    pub fn count_valid(&self) -> usize {
        self.valid.iter().filter(|&&v| v).count()
    }

    /// World position of a cell center.
    pub fn cell_world(&self, ix: usize, iy: usize) -> (f64, f64) {
        (
            self.center.0 + (ix as f64 - GRID_CENTER as f64) * self.resolution,
            self.center.1 + (iy as f64 - GRID_CENTER as f64) * self.resolution,
        )
    }

    /// Cell containing a world position, or None outside the crop.
    pub fn cell_of_world(&self, x: f64, y: f64) -> Option<(usize, usize)> {
        let fx = ((x - self.center.0) / self.resolution + GRID_CENTER as f64 + 0.5).floor();
        let fy = ((y - self.center.1) / self.resolution + GRID_CENTER as f64 + 0.5).floor();
        if fx < 0.0 || fy < 0.0 || fx >= GRID_SIZE as f64 || fy >= GRID_SIZE as f64 {
            None
        } else {
            Some((fx as usize, fy as usize))
        }
    }

    /// Elevation at a world position (nearest cell), None outside.
    pub fn height_at_world(&self, x: f64, y: f64) -> Option<f64> {
        self.cell_of_world(x, y).map(|(ix, iy)| self.at(ix, iy))
    }

    /// Flip the grid left-right (iy axis), the lateral mirror of the crop.
    pub fn mirrored_y(&self) -> Self {
        let mut out = self.clone();
        for iy in 0..GRID_SIZE {
            for ix in 0..GRID_SIZE {
                let src = Self::idx(ix, iy);
                let dst = Self::idx(ix, GRID_SIZE - 1 - iy);
                out.data[dst] = self.data[src];
                out.valid[dst] = self.valid[src];
            }
        }
        out.center = (self.center.0, -self.center.1);
        out
    }
}

/// Three-channel policy input: filtered elevation re-centered on the
/// desired footstep, plus the X and Y offset ramps (meters from the grid
/// center, which sits at the desired footstep).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodedObservationMap {
    /// World position the center cell corresponds to (the desired footstep
    /// cell).
    pub center: (f64, f64),
    pub resolution: f64,
    pub elevation: Vec<f64>,
    pub grid_x: Vec<f64>,
    pub grid_y: Vec<f64>,
    /// Set when the requested recentering exceeded the window and was
    /// clamped.
    pub saturated: bool,
}

impl EncodedObservationMap {
    /// The offset ramps are fixed by the geometry: (index − 32)·resolution.
    pub fn ramps(resolution: f64) -> (Vec<f64>, Vec<f64>) {
        let n = GRID_SIZE * GRID_SIZE;
        let mut gx = vec![0.0; n];
        let mut gy = vec![0.0; n];
        for iy in 0..GRID_SIZE {
            for ix in 0..GRID_SIZE {
                gx[LocalGrid::idx(ix, iy)] = (ix as f64 - GRID_CENTER as f64) * resolution;
                gy[LocalGrid::idx(ix, iy)] = (iy as f64 - GRID_CENTER as f64) * resolution;
            }
        }
        (gx, gy)
    }

    /// Lateral mirror: flip all channels along iy. The Y ramp of a flipped
    /// even-sized grid is offset by one cell from the negated ramp; the
    /// involution property is exact regardless.
    pub fn mirrored_y(&self) -> Self {
        let flip = |v: &Vec<f64>| {
            let mut out = v.clone();
            for iy in 0..GRID_SIZE {
                for ix in 0..GRID_SIZE {
                    out[LocalGrid::idx(ix, GRID_SIZE - 1 - iy)] = v[LocalGrid::idx(ix, iy)];
                }
            }
            out
        };
        Self {
            center: (self.center.0, -self.center.1),
            resolution: self.resolution,
            elevation: flip(&self.elevation),
            grid_x: flip(&self.grid_x),
            grid_y: flip(&self.grid_y),
            saturated: self.saturated,
        }
    }
}
