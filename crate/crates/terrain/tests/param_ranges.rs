//! Property tests: sampled terrain parameters always land inside the
//! published table ranges, across a large seed sweep.

use proptest::prelude::*;

use strider_terrain::{generate, ranges, TerrainCategory, TerrainSpec};

/// Distinct elevation levels along the map centerline.
fn center_levels(map: &strider_terrain::HeightMap) -> Vec<f64> {
    let iy = map.height / 2;
    let mut levels: Vec<f64> = (0..map.width).map(|ix| map.at(ix, iy)).collect();
    levels.dedup();
    levels
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(250))]

    #[test]
    fn stair_heights_within_table(seed in 0u64..1_000_000) {
        let map = generate(&TerrainSpec::new(TerrainCategory::Stair, seed)).unwrap();
        let levels = center_levels(&map);
        prop_assert!(levels.len() >= 2);
        let h = levels[1] - levels[0];
        prop_assert!(h >= ranges::STAIR_HEIGHT.0 - 1e-12 && h <= ranges::STAIR_HEIGHT.1 + 1e-12);
        // Flight width from the first tread length.
        let iy = map.height / 2;
        let first_raised = (0..map.width).position(|ix| map.at(ix, iy) > 0.0).unwrap();
        let next_level = (first_raised..map.width)
            .position(|ix| map.at(ix, iy) > levels[1] + 1e-12)
            .unwrap();
        let w = next_level as f64 * map.resolution;
        prop_assert!(w >= ranges::STAIR_WIDTH.0 - 2.0 * map.resolution);
        prop_assert!(w <= ranges::STAIR_WIDTH.1 + 2.0 * map.resolution);
    }

    #[test]
    fn slope_grade_within_table(seed in 0u64..1_000_000) {
        let map = generate(&TerrainSpec::new(TerrainCategory::Slope, seed)).unwrap();
        let iy = map.height / 2;
        let ix = map.width - 10;
        let grade = (map.at(ix + 1, iy) - map.at(ix, iy)) / map.resolution;
        let angle = grade.atan();
        prop_assert!(angle >= ranges::SLOPE_ANGLE.0 - 1e-9 && angle <= ranges::SLOPE_ANGLE.1 + 1e-9);
    }

    #[test]
    fn obstacle_heights_within_table(seed in 0u64..1_000_000) {
        let map = generate(&TerrainSpec::new(TerrainCategory::FlatObstacle, seed)).unwrap();
        let max = map.data.iter().cloned().fold(0.0, f64::max);
        prop_assert!(max <= ranges::OBSTACLE_DIM.1 + 1e-12);
        prop_assert!(max >= ranges::OBSTACLE_DIM.0 - 1e-12, "at least one obstacle");
        prop_assert!(map.data.iter().all(|&v| v == 0.0 || (ranges::OBSTACLE_DIM.0..=ranges::OBSTACLE_DIM.1).contains(&v)));
    }

    #[test]
    fn block_heights_within_table(seed in 0u64..1_000_000) {
        let map = generate(&TerrainSpec::new(TerrainCategory::Block, seed)).unwrap();
        prop_assert!(map.data.iter().all(|&v| v == 0.0 || (ranges::BLOCK_Z.0..=ranges::BLOCK_Z.1).contains(&v)));
    }

    #[test]
    fn friction_metadata_within_table(seed in 0u64..1_000_000) {
        let map = generate(&TerrainSpec::new(TerrainCategory::Flat, seed)).unwrap();
        prop_assert!((ranges::FRICTION.0..=ranges::FRICTION.1).contains(&map.friction));
    }

    #[test]
    fn generation_is_deterministic(seed in 0u64..1_000_000, cat_idx in 0usize..6) {
        let cat = TerrainCategory::ALL[cat_idx];
        let a = generate(&TerrainSpec::new(cat, seed)).unwrap();
        let b = generate(&TerrainSpec::new(cat, seed)).unwrap();
        prop_assert_eq!(a, b);
    }
}
