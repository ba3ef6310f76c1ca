use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::TerrainError;
use crate::heightmap::HeightMap;

/// The six training terrain categories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerrainCategory {
    Flat,
    FlatObstacle,
    Block,
    Stair,
    StairSlope,
    Slope,
}

impl TerrainCategory {
    pub const ALL: [TerrainCategory; 6] = [
        TerrainCategory::Flat,
        TerrainCategory::FlatObstacle,
        TerrainCategory::Block,
        TerrainCategory::Stair,
        TerrainCategory::StairSlope,
        TerrainCategory::Slope,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            TerrainCategory::Flat => "flat",
            TerrainCategory::FlatObstacle => "flat_obstacle",
            TerrainCategory::Block => "block",
            TerrainCategory::Stair => "stair",
            TerrainCategory::StairSlope => "stair_slope",
            TerrainCategory::Slope => "slope",
        }
    }

    pub fn from_str_tag(s: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|c| c.as_str() == s)
    }

    pub(crate) fn tag(&self) -> u8 {
        Self::ALL.iter().position(|c| c == self).unwrap() as u8
    }

    pub(crate) fn from_tag(t: u8) -> Option<Self> {
        Self::ALL.get(t as usize).copied()
    }
}

/// Published per-category parameter ranges.
pub mod ranges {
    pub const OBSTACLE_DIM: (f64, f64) = (0.2, 0.5);
    pub const OBSTACLE_COUNT: (u32, u32) = (30, 40);
    pub const BLOCK_XY: (f64, f64) = (0.5, 1.0);
    pub const BLOCK_Z: (f64, f64) = (0.05, 0.15);
    pub const BLOCK_COUNT: (u32, u32) = (10, 20);
    pub const STAIR_HEIGHT: (f64, f64) = (0.075, 0.17);
    pub const STAIR_WIDTH: (f64, f64) = (0.5, 1.5);
    pub const STAIR_SLOPE_HEIGHT: (f64, f64) = (0.07, 0.14);
    pub const STAIR_SLOPE_WIDTH: (f64, f64) = (0.8, 1.6);
    pub const STAIR_SLOPE_ANGLE: (f64, f64) = (0.03, 0.07);
    pub const SLOPE_ANGLE: (f64, f64) = (0.1, 0.34);
    pub const FRICTION: (f64, f64) = (0.3, 1.1);
}

/// World-map extents. Features start after a flat spawn strip of
/// `spawn_reserve` meters so episodes begin on level ground.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MapGeometry {
    pub length: f64,
    pub width: f64,
    pub resolution: f64,
    pub spawn_reserve: f64,
}

impl Default for MapGeometry {
    fn default() -> Self {
        // Sized for the command envelope: ±0.8 m/s sagittal and ±0.4 m/s
        // lateral over a 10 s episode, plus the local-crop margin.
        Self {
            length: 24.0,
            width: 12.0,
            resolution: 0.025,
            spawn_reserve: 2.0,
        }
    }
}

/// Generation request: a category, a seed, and optional range overrides
/// that must stay inside the published table ranges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TerrainSpec {
    pub category: TerrainCategory,
    pub seed: u64,
    #[serde(default)]
    pub geometry: MapGeometry,
    /// Narrowed stair-height sampling range (curriculum caps heights).
    #[serde(default)]
    pub stair_height: Option<(f64, f64)>,
    #[serde(default)]
    pub stair_width: Option<(f64, f64)>,
    /// Narrowed slope-angle sampling range (evaluation pins the incline).
    #[serde(default)]
    pub slope_angle: Option<(f64, f64)>,
    /// Fixed friction coefficient; sampled from the published range when
    /// absent.
    #[serde(default)]
    pub friction: Option<f64>,
}

impl TerrainSpec {
    pub fn new(category: TerrainCategory, seed: u64) -> Self {
        Self {
            category,
            seed,
            geometry: MapGeometry::default(),
            stair_height: None,
            stair_width: None,
            slope_angle: None,
            friction: None,
        }
    }

    pub fn validate(&self) -> Result<(), TerrainError> {
        let g = &self.geometry;
        if !(g.resolution > 0.0 && g.length > 0.0 && g.width > 0.0) {
            return Err(TerrainError::InvalidSpec(
                "geometry extents and resolution must be positive".into(),
            ));
        }
        let cells_x = (g.length / g.resolution).round() as usize;
        let cells_y = (g.width / g.resolution).round() as usize;
        if cells_x < 64 || cells_y < 64 {
            return Err(TerrainError::InvalidSpec(format!(
                "map must be at least 64x64 cells, got {cells_x}x{cells_y}"
            )));
        }
        let check = |ovr: &Option<(f64, f64)>, table: (f64, f64), name: &str| {
            if let Some((lo, hi)) = ovr {
                if !(lo <= hi && *lo >= table.0 && *hi <= table.1) {
                    return Err(TerrainError::InvalidSpec(format!(
                        "{name} override [{lo}, {hi}] outside table range [{}, {}]",
                        table.0, table.1
                    )));
                }
            }
            Ok(())
        };
        let height_table = match self.category {
            TerrainCategory::StairSlope => ranges::STAIR_SLOPE_HEIGHT,
            _ => ranges::STAIR_HEIGHT,
        };
        let width_table = match self.category {
            TerrainCategory::StairSlope => ranges::STAIR_SLOPE_WIDTH,
            _ => ranges::STAIR_WIDTH,
        };
        let angle_table = match self.category {
            TerrainCategory::StairSlope => ranges::STAIR_SLOPE_ANGLE,
            _ => ranges::SLOPE_ANGLE,
        };
        check(&self.stair_height, height_table, "stair height")?;
        check(&self.stair_width, width_table, "stair width")?;
        check(&self.slope_angle, angle_table, "slope angle")?;
        if let Some(f) = self.friction {
            if !(f > 0.0 && f.is_finite()) {
                return Err(TerrainError::InvalidSpec(format!("friction {f} invalid")));
            }
        }
        Ok(())
    }
}

fn sample(rng: &mut ChaCha8Rng, range: (f64, f64)) -> f64 {
    if range.0 == range.1 {
        range.0
    } else {
        rng.gen_range(range.0..=range.1)
    }
}

/// Generate the heightmap for a spec. Deterministic in the seed.
pub fn generate(spec: &TerrainSpec) -> Result<HeightMap, TerrainError> {
    spec.validate()?;
    let g = &spec.geometry;
    let width = (g.length / g.resolution).round() as usize;
    let height = (g.width / g.resolution).round() as usize;
    // Center the lateral axis on y = 0 so the lattice mirrors exactly.
    let origin = (0.0, -0.5 * g.width);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let friction = spec
        .friction
        .unwrap_or_else(|| sample(&mut rng, ranges::FRICTION));
    let mut map = HeightMap::filled(
        origin,
        g.resolution,
        width,
        height,
        0.0,
        friction,
        spec.category,
    );

    match spec.category {
        TerrainCategory::Flat => {}
        TerrainCategory::FlatObstacle => {
            let n = rng.gen_range(ranges::OBSTACLE_COUNT.0..=ranges::OBSTACLE_COUNT.1);
            stamp_boxes(
                &mut map,
                &mut rng,
                n,
                ranges::OBSTACLE_DIM,
                ranges::OBSTACLE_DIM,
                g,
            );
        }
        TerrainCategory::Block => {
            let n = rng.gen_range(ranges::BLOCK_COUNT.0..=ranges::BLOCK_COUNT.1);
            stamp_boxes(&mut map, &mut rng, n, ranges::BLOCK_XY, ranges::BLOCK_Z, g);
        }
        TerrainCategory::Stair => {
            let h = sample(&mut rng, spec.stair_height.unwrap_or(ranges::STAIR_HEIGHT));
            let w = sample(&mut rng, spec.stair_width.unwrap_or(ranges::STAIR_WIDTH));
            fill_profile(&mut map, |x| stair_profile(x, g.spawn_reserve, h, w));
        }
        TerrainCategory::StairSlope => {
            let h = sample(
                &mut rng,
                spec.stair_height.unwrap_or(ranges::STAIR_SLOPE_HEIGHT),
            );
            let w = sample(
                &mut rng,
                spec.stair_width.unwrap_or(ranges::STAIR_SLOPE_WIDTH),
            );
            let angle = sample(
                &mut rng,
                spec.slope_angle.unwrap_or(ranges::STAIR_SLOPE_ANGLE),
            );
            let grade = angle.tan();
            fill_profile(&mut map, |x| {
                stair_profile(x, g.spawn_reserve, h, w) + grade * (x - g.spawn_reserve).max(0.0)
            });
        }
        TerrainCategory::Slope => {
            let angle = sample(&mut rng, spec.slope_angle.unwrap_or(ranges::SLOPE_ANGLE));
            let grade = angle.tan();
            fill_profile(&mut map, |x| grade * (x - g.spawn_reserve).max(0.0));
        }
    }
    Ok(map)
}

/// Uniform flights ascending along +x after the spawn strip.
fn stair_profile(x: f64, start: f64, flight_height: f64, flight_width: f64) -> f64 {
    if x < start {
        0.0
    } else {
        (((x - start) / flight_width).floor() + 1.0) * flight_height
    }
}

fn fill_profile<F: Fn(f64) -> f64>(map: &mut HeightMap, profile: F) {
    for iy in 0..map.height {
        for ix in 0..map.width {
            let (cx, _) = map.cell_center(ix, iy);
            map.set(ix, iy, profile(cx));
        }
    }
}

/// Stamp axis-aligned boxes as raised plateaus. Overlap is allowed; the
/// elevation takes the max of overlapping boxes.
fn stamp_boxes(
    map: &mut HeightMap,
    rng: &mut ChaCha8Rng,
    count: u32,
    xy_dim: (f64, f64),
    z_dim: (f64, f64),
    g: &MapGeometry,
) {
    for _ in 0..count {
        let dx = sample(rng, xy_dim);
        let dy = sample(rng, xy_dim);
        let dz = sample(rng, z_dim);
        let cx = rng.gen_range(g.spawn_reserve + 0.5 * dx..g.length - 0.5 * dx);
        let cy = rng.gen_range(map.origin.1 + 0.5 * dy..map.origin.1 + g.width - 0.5 * dy);
        let x_lo = ((cx - 0.5 * dx - map.origin.0) / map.resolution).floor().max(0.0) as usize;
        let x_hi =
            (((cx + 0.5 * dx - map.origin.0) / map.resolution).ceil() as usize).min(map.width);
        let y_lo = ((cy - 0.5 * dy - map.origin.1) / map.resolution).floor().max(0.0) as usize;
        let y_hi =
            (((cy + 0.5 * dy - map.origin.1) / map.resolution).ceil() as usize).min(map.height);
        for iy in y_lo..y_hi {
            for ix in x_lo..x_hi {
                let (px, py) = map.cell_center(ix, iy);
                if (px - cx).abs() <= 0.5 * dx && (py - cy).abs() <= 0.5 * dy {
                    let v = map.at(ix, iy).max(dz);
                    map.set(ix, iy, v);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_spec_is_all_zero() {
        let map = generate(&TerrainSpec::new(TerrainCategory::Flat, 3)).unwrap();
        assert_eq!(map.max_abs_elevation(), 0.0);
    }

    #[test]
    fn same_seed_is_bit_identical() {
        for cat in TerrainCategory::ALL {
            let a = generate(&TerrainSpec::new(cat, 42)).unwrap();
            let b = generate(&TerrainSpec::new(cat, 42)).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn stair_flights_are_uniform_and_in_range() {
        let map = generate(&TerrainSpec::new(TerrainCategory::Stair, 9)).unwrap();
        // Distinct elevations along the centerline.
        let iy = map.height / 2;
        let mut levels: Vec<f64> = (0..map.width).map(|ix| map.at(ix, iy)).collect();
        levels.dedup();
        assert!(levels.len() > 3);
        let diffs: Vec<f64> = levels.windows(2).map(|w| w[1] - w[0]).collect();
        let h = diffs[0];
        assert!(
            (ranges::STAIR_HEIGHT.0..=ranges::STAIR_HEIGHT.1).contains(&h),
            "flight height {h}"
        );
        for d in diffs {
            assert!((d - h).abs() < 1e-12, "non-uniform flight: {d} vs {h}");
        }
    }

    #[test]
    fn stair_height_override_caps_sampling() {
        for seed in 0..50 {
            let spec = TerrainSpec {
                stair_height: Some((0.075, 0.10)),
                ..TerrainSpec::new(TerrainCategory::Stair, seed)
            };
            let map = generate(&spec).unwrap();
            let iy = map.height / 2;
            let mut levels: Vec<f64> = (0..map.width).map(|ix| map.at(ix, iy)).collect();
            levels.dedup();
            let h = levels[1] - levels[0];
            assert!(h <= 0.10 + 1e-12 && h >= 0.075 - 1e-12);
        }
    }

    #[test]
    fn out_of_range_override_is_rejected() {
        let spec = TerrainSpec {
            stair_height: Some((0.05, 0.10)),
            ..TerrainSpec::new(TerrainCategory::Stair, 1)
        };
        assert!(matches!(generate(&spec), Err(TerrainError::InvalidSpec(_))));
    }

    #[test]
    fn slope_is_affine_at_cell_centers() {
        let spec = TerrainSpec {
            slope_angle: Some((0.2, 0.2)),
            ..TerrainSpec::new(TerrainCategory::Slope, 5)
        };
        let map = generate(&spec).unwrap();
        let grade = 0.2_f64.tan();
        // Past the spawn strip the surface is affine in x and constant in y.
        let ix0 = (2.0 / map.resolution) as usize + 2;
        for iy in [0, map.height / 2, map.height - 1] {
            for ix in ix0..map.width - 1 {
                let dz = map.at(ix + 1, iy) - map.at(ix, iy);
                assert!((dz - grade * map.resolution).abs() < 1e-6 * map.resolution + 1e-12);
            }
        }
        for ix in ix0..map.width {
            let v = map.at(ix, 0);
            for iy in 1..map.height {
                assert_eq!(map.at(ix, iy), v);
            }
        }
    }

    #[test]
    fn spawn_strip_is_flat_for_every_category() {
        for cat in TerrainCategory::ALL {
            let map = generate(&TerrainSpec::new(cat, 11)).unwrap();
            if matches!(cat, TerrainCategory::FlatObstacle | TerrainCategory::Block) {
                // Boxes never intrude into the spawn strip.
            }
            let strip_cells = (2.0 / map.resolution) as usize;
            for iy in 0..map.height {
                for ix in 0..strip_cells.saturating_sub(1) {
                    assert_eq!(map.at(ix, iy), 0.0, "{cat:?} cell ({ix},{iy})");
                }
            }
        }
    }

    #[test]
    fn riser_on_cell_boundary_splits_adjacent_queries() {
        // Flight width 1.0 m is an exact multiple of the resolution, so the
        // first riser lands exactly on the spawn-strip boundary at x = 2.0.
        let spec = TerrainSpec {
            stair_height: Some((0.1, 0.1)),
            stair_width: Some((1.0, 1.0)),
            ..TerrainSpec::new(TerrainCategory::Stair, 2)
        };
        let map = generate(&spec).unwrap();
        let below = map.height_at(1.999, 0.0).unwrap();
        let above = map.height_at(2.001, 0.0).unwrap();
        assert_eq!(below, 0.0);
        assert!((above - below - 0.1).abs() < 1e-12);
    }
}
