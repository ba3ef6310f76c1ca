use strider_terrain::HeightMap;

use crate::error::ElevMapError;
use crate::grid::{EncodedObservationMap, LocalGrid, GRID_CENTER, GRID_SIZE};

/// Crop a 64×64 window out of the world map, centered on the world cell
/// containing `center`. Cells outside the world map are marked invalid.
pub fn crop(map: &HeightMap, center: (f64, f64)) -> Result<LocalGrid, ElevMapError> {
    let (cx, cy) = map.cell_index_unbounded(center.0, center.1);
    let lo_x = cx - GRID_CENTER as i64;
    let lo_y = cy - GRID_CENTER as i64;
    if lo_x + GRID_SIZE as i64 <= 0
        || lo_y + GRID_SIZE as i64 <= 0
        || lo_x >= map.width as i64
        || lo_y >= map.height as i64
    {
        return Err(ElevMapError::Query(format!(
            "crop at ({:.3}, {:.3}) does not intersect the map",
            center.0, center.1
        )));
    }
    let snapped_center = (
        map.origin.0 + (cx as f64 + 0.5) * map.resolution,
        map.origin.1 + (cy as f64 + 0.5) * map.resolution,
    );
    let mut grid = LocalGrid::filled(snapped_center, map.resolution, 0.0);
    for iy in 0..GRID_SIZE {
        for ix in 0..GRID_SIZE {
            let wx = lo_x + ix as i64;
            let wy = lo_y + iy as i64;
            let idx = LocalGrid::idx(ix, iy);
            if wx >= 0 && wy >= 0 && (wx as usize) < map.width && (wy as usize) < map.height {
                grid.data[idx] = map.at(wx as usize, wy as usize);
                grid.valid[idx] = true;
            } else {
                grid.data[idx] = 0.0;
                grid.valid[idx] = false;
            }
        }
    }
    Ok(grid)
}

/// Fill every invalid cell with the value of its nearest valid cell
/// (Euclidean cell distance, ties broken by row-major order).
pub fn fill_unknown(grid: &LocalGrid) -> Result<LocalGrid, ElevMapError> {
    if grid.all_valid() {
        return Ok(grid.clone());
    }
    if grid.count_valid() == 0 {
        return Err(ElevMapError::Data("no valid cells to fill from".into()));
    }
    let mut out = grid.clone();
    let n = GRID_SIZE as i64;
    for iy in 0..n {
        for ix in 0..n {
            if grid.valid[LocalGrid::idx(ix as usize, iy as usize)] {
                continue;
            }
            // Expanding Chebyshev rings; every cell with smaller Euclidean
            // distance lives inside a ring already visited once
            // ring_radius² ≥ best distance².
            let mut best: Option<(i64, usize)> = None; // (dist², row-major idx)
            let mut r = 1i64;
            loop {
                let mut candidates: Vec<(i64, usize)> = Vec::new();
                for dy in -r..=r {
                    for dx in -r..=r {
                        if dx.abs() != r && dy.abs() != r {
                            continue; // ring shell only
                        }
                        let jx = ix + dx;
                        let jy = iy + dy;
                        if jx < 0 || jy < 0 || jx >= n || jy >= n {
                            continue;
                        }
                        let idx = LocalGrid::idx(jx as usize, jy as usize);
                        if grid.valid[idx] {
                            candidates.push((dx * dx + dy * dy, idx));
                        }
                    }
                }
                for c in candidates {
                    match best {
                        None => best = Some(c),
                        Some(b) if c < b => best = Some(c),
                        _ => {}
                    }
                }
                if let Some((d2, _)) = best {
                    if r * r >= d2 {
                        break;
                    }
                }
                r += 1;
                if r > 2 * n {
                    break;
                }
            }
            let (_, src) = best.expect("at least one valid cell exists");
            out.data[LocalGrid::idx(ix as usize, iy as usize)] = grid.data[src];
            out.valid[LocalGrid::idx(ix as usize, iy as usize)] = true;
        }
    }
    Ok(out)
}

/// Median filter with truncated windows at the borders.
pub fn median_filter(grid: &LocalGrid, window: usize) -> Result<LocalGrid, ElevMapError> {
    if window % 2 == 0 || window == 0 {
        return Err(ElevMapError::Parameter(format!(
            "median window must be odd, got {window}"
        )));
    }
    let half = (window / 2) as i64;
    let n = GRID_SIZE as i64;
    let mut out = grid.clone();
    let mut buf: Vec<f64> = Vec::with_capacity(window * window);
    for iy in 0..n {
        for ix in 0..n {
            buf.clear();
            for dy in -half..=half {
                for dx in -half..=half {
                    let jx = ix + dx;
                    let jy = iy + dy;
                    if jx >= 0 && jy >= 0 && jx < n && jy < n {
                        buf.push(grid.at(jx as usize, jy as usize));
                    }
                }
            }
            buf.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let m = buf.len();
            let median = if m % 2 == 1 {
                buf[m / 2]
            } else {
                0.5 * (buf[m / 2 - 1] + buf[m / 2])
            };
            out.set(ix as usize, iy as usize, median);
        }
    }
    Ok(out)
}

/// Sobel gradient magnitudes and the thresholded edge mask.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeMap {
    pub magnitude: Vec<f64>,
    pub mask: Vec<bool>,
    pub threshold: f64,
}

impl EdgeMap {
    pub fn is_edge(&self, ix: usize, iy: usize) -> bool {
        self.mask[LocalGrid::idx(ix, iy)]
    }
}

/// Standard 3×3 Sobel kernels with replicate padding at the borders;
/// magnitude = sqrt(Gx² + Gy²), mask = magnitude > threshold.
pub fn sobel_edges(grid: &LocalGrid, threshold: f64) -> EdgeMap {
    let n = GRID_SIZE as i64;
    let clamp = |v: i64| v.clamp(0, n - 1) as usize;
    let g = |ix: i64, iy: i64| grid.at(clamp(ix), clamp(iy));
    let mut magnitude = vec![0.0; GRID_SIZE * GRID_SIZE];
    let mut mask = vec![false; GRID_SIZE * GRID_SIZE];
    for iy in 0..n {
        for ix in 0..n {
            let mut gx = 0.0;
            let mut gy = 0.0;
            for (dy, wy) in [(-1i64, 1.0), (0, 2.0), (1, 1.0)] {
                gx += wy * (g(ix + 1, iy + dy) - g(ix - 1, iy + dy));
            }
            for (dx, wx) in [(-1i64, 1.0), (0, 2.0), (1, 1.0)] {
                gy += wx * (g(ix + dx, iy + 1) - g(ix + dx, iy - 1));
            }
            let m = (gx * gx + gy * gy).sqrt();
            let idx = LocalGrid::idx(ix as usize, iy as usize);
            magnitude[idx] = m;
            mask[idx] = m > threshold;
        }
    }
    EdgeMap {
        magnitude,
        mask,
        threshold,
    }
}

/// Re-center the filtered grid on the desired footstep and attach the XY
/// offset ramps. `u_rel` is the footstep position relative to the grid
/// center, in meters. Cells shifted in from outside are refilled from the
/// nearest valid cell.
pub fn encode(grid: &LocalGrid, u_rel: (f64, f64)) -> Result<EncodedObservationMap, ElevMapError> {
    if !(u_rel.0.is_finite() && u_rel.1.is_finite()) {
        return Err(ElevMapError::Parameter("non-finite recenter offset".into()));
    }
    let limit = (GRID_SIZE - 1) as i64;
    let du_x = (u_rel.0 / grid.resolution).round() as i64;
    let du_y = (u_rel.1 / grid.resolution).round() as i64;
    let saturated = du_x.abs() > limit || du_y.abs() > limit;
    let du_x = du_x.clamp(-limit, limit);
    let du_y = du_y.clamp(-limit, limit);

    let n = GRID_SIZE as i64;
    let mut shifted = LocalGrid::filled(
        (
            grid.center.0 + du_x as f64 * grid.resolution,
            grid.center.1 + du_y as f64 * grid.resolution,
        ),
        grid.resolution,
        0.0,
    );
    for iy in 0..n {
        for ix in 0..n {
            let sx = ix + du_x;
            let sy = iy + du_y;
            let idx = LocalGrid::idx(ix as usize, iy as usize);
            if sx >= 0 && sy >= 0 && sx < n && sy < n {
                shifted.data[idx] = grid.at(sx as usize, sy as usize);
                shifted.valid[idx] = grid.is_valid(sx as usize, sy as usize);
            } else {
                shifted.valid[idx] = false;
            }
        }
    }
    let filled = fill_unknown(&shifted)?;
    let (grid_x, grid_y) = EncodedObservationMap::ramps(grid.resolution);
    Ok(EncodedObservationMap {
        center: filled.center,
        resolution: grid.resolution,
        elevation: filled.data,
        grid_x,
        grid_y,
        saturated,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftCorrection {
    /// Vertical offset added to every cell.
    pub offset: f64,
    /// Set when the stance cell was invalid and the nearest valid cell was
    /// used instead.
    pub used_fallback: bool,
}

/// Shift the whole grid vertically so its value at the stance-foot cell
/// matches the stance-foot height.
pub fn drift_correct(
    grid: &LocalGrid,
    stance: (f64, f64, f64),
) -> Result<(LocalGrid, DriftCorrection), ElevMapError> {
    let (ix, iy) = grid.cell_of_world(stance.0, stance.1).ok_or_else(|| {
        ElevMapError::Query(format!(
            "stance foot ({:.3}, {:.3}) outside the local map",
            stance.0, stance.1
        ))
    })?;
    let (cell, used_fallback) = if grid.is_valid(ix, iy) {
        (LocalGrid::idx(ix, iy), false)
    } else {
        // Nearest valid cell, same metric as fill_unknown.
        let mut best: Option<(i64, usize)> = None;
        for jy in 0..GRID_SIZE {
            for jx in 0..GRID_SIZE {
                if !grid.is_valid(jx, jy) {
                    continue;
                }
                let dx = jx as i64 - ix as i64;
                let dy = jy as i64 - iy as i64;
                let cand = (dx * dx + dy * dy, LocalGrid::idx(jx, jy));
                if best.is_none() || cand < best.unwrap() {
                    best = Some(cand);
                }
            }
        }
        let (_, idx) =
            best.ok_or_else(|| ElevMapError::Data("no valid cells for drift anchor".into()))?;
        (idx, true)
    };
    let offset = stance.2 - grid.data[cell];
    let mut out = grid.clone();
    for v in &mut out.data {
        *v += offset;
    }
    Ok((out, DriftCorrection {
        offset,
        used_fallback,
    }))
}
