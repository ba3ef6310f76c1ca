use rand::Rng;
use serde::{Deserialize, Serialize};

use strider_terrain::{TerrainCategory, TerrainSpec};

use crate::config::{EpisodeConfig, MAX_TICKS_TRAINING};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurriculumPhase {
    /// Flat, stairs capped at 0.10 m, and slopes; no domain randomization.
    One,
    /// All six categories with P(flat) = 0.10; domain randomization on.
    Two,
}

/// Sample one training episode configuration for the given phase.
pub fn curriculum<R: Rng>(phase: CurriculumPhase, rng: &mut R) -> EpisodeConfig {
    let (category, stair_cap) = match phase {
        CurriculumPhase::One => {
            let cat = match rng.gen_range(0..3u32) {
                0 => TerrainCategory::Flat,
                1 => TerrainCategory::Stair,
                _ => TerrainCategory::Slope,
            };
            (cat, Some((0.075, 0.10)))
        }
        CurriculumPhase::Two => {
            let u: f64 = rng.gen();
            let cat = if u < 0.10 {
                TerrainCategory::Flat
            } else {
                // Remaining five categories uniform.
                let rest = [
                    TerrainCategory::FlatObstacle,
                    TerrainCategory::Block,
                    TerrainCategory::Stair,
                    TerrainCategory::StairSlope,
                    TerrainCategory::Slope,
                ];
                rest[(((u - 0.10) / 0.90) * 5.0).min(4.9999) as usize]
            };
            (cat, None)
        }
    };
    let mut terrain = TerrainSpec::new(category, rng.gen());
    if category == TerrainCategory::Stair {
        terrain.stair_height = stair_cap;
    }
    EpisodeConfig {
        terrain,
        seed: rng.gen(),
        max_ticks: MAX_TICKS_TRAINING,
        dr_enabled: matches!(phase, CurriculumPhase::Two),
        terminate_on_hard_collision: false,
        lateral_limit: None,
        lean_observation: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashMap;

    #[test]
    fn phase_one_caps_stairs_and_disables_dr() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10_000 {
            let ep = curriculum(CurriculumPhase::One, &mut rng);
            assert!(!ep.dr_enabled);
            assert!(matches!(
                ep.terrain.category,
                TerrainCategory::Flat | TerrainCategory::Stair | TerrainCategory::Slope
            ));
            if ep.terrain.category == TerrainCategory::Stair {
                let (lo, hi) = ep.terrain.stair_height.unwrap();
                assert!(lo >= 0.075 && hi <= 0.10);
            }
        }
    }

    #[test]
    fn phase_two_flat_fraction_is_ten_percent() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = 10_000;
        let mut counts: HashMap<&'static str, usize> = HashMap::new();
        for _ in 0..n {
            let ep = curriculum(CurriculumPhase::Two, &mut rng);
            assert!(ep.dr_enabled);
            *counts.entry(ep.terrain.category.as_str()).or_default() += 1;
        }
        let flat_frac = counts["flat"] as f64 / n as f64;
        assert!(
            (flat_frac - 0.10).abs() <= 0.01,
            "flat fraction {flat_frac}"
        );
        // The other five categories split the rest roughly evenly.
        for cat in ["flat_obstacle", "block", "stair", "stair_slope", "slope"] {
            let frac = counts[cat] as f64 / n as f64;
            assert!((frac - 0.18).abs() < 0.02, "{cat} fraction {frac}");
        }
    }
}
