//! Serialization of local grids and encoded observation maps.
//!
//! LocalGrid reuses the heightmap container (converted to a 64×64 map);
//! EncodedObservationMap has its own three-channel format `SOM1`:
//! magic, version u32, center f64×2, resolution f64, saturated u8, then
//! 3 × 4096 f64 channels (elevation, grid_x, grid_y), all little-endian.

use std::io::{Read, Write};

use strider_terrain::{
    load_heightmap_from, save_heightmap_to, HeightMap, TerrainCategory,
};

use crate::error::ElevMapError;
use crate::grid::{EncodedObservationMap, LocalGrid, GRID_CENTER, GRID_SIZE};

const ENC_MAGIC: &[u8; 4] = b"SOM1";
const ENC_VERSION: u32 = 1;

pub fn save_local_grid_to<W: Write>(grid: &LocalGrid, w: W) -> Result<(), ElevMapError> {
    let origin = (
        grid.center.0 - (GRID_CENTER as f64 + 0.5) * grid.resolution,
        grid.center.1 - (GRID_CENTER as f64 + 0.5) * grid.resolution,
    );
    let map = HeightMap {
        origin,
        resolution: grid.resolution,
        width: GRID_SIZE,
        height: GRID_SIZE,
        data: grid.data.clone(),
        friction: 0.0,
        category: TerrainCategory::Flat,
    };
    save_heightmap_to(&map, w).map_err(|e| ElevMapError::Format(e.to_string()))
}

pub fn load_local_grid_from<R: Read>(r: R) -> Result<LocalGrid, ElevMapError> {
    let map = load_heightmap_from(r).map_err(|e| ElevMapError::Format(e.to_string()))?;
    if map.width != GRID_SIZE || map.height != GRID_SIZE {
        return Err(ElevMapError::Format(format!(
            "local grid must be {GRID_SIZE}x{GRID_SIZE}, got {}x{}",
            map.width, map.height
        )));
    }
    let center = (
        map.origin.0 + (GRID_CENTER as f64 + 0.5) * map.resolution,
        map.origin.1 + (GRID_CENTER as f64 + 0.5) * map.resolution,
    );
    Ok(LocalGrid {
        center,
        resolution: map.resolution,
        data: map.data,
        valid: vec![true; GRID_SIZE * GRID_SIZE],
    })
}

pub fn save_encoded_map_to<W: Write>(
    map: &EncodedObservationMap,
    mut w: W,
) -> Result<(), ElevMapError> {
    w.write_all(ENC_MAGIC)?;
    w.write_all(&ENC_VERSION.to_le_bytes())?;
    w.write_all(&map.center.0.to_le_bytes())?;
    w.write_all(&map.center.1.to_le_bytes())?;
    w.write_all(&map.resolution.to_le_bytes())?;
    w.write_all(&[map.saturated as u8])?;
    for channel in [&map.elevation, &map.grid_x, &map.grid_y] {
        for v in channel {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn load_encoded_map_from<R: Read>(mut r: R) -> Result<EncodedObservationMap, ElevMapError> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != ENC_MAGIC {
        return Err(ElevMapError::Format(format!("bad magic {magic:?}")));
    }
    let mut b4 = [0u8; 4];
    r.read_exact(&mut b4)?;
    let version = u32::from_le_bytes(b4);
    if version != ENC_VERSION {
        return Err(ElevMapError::Format(format!("unsupported version {version}")));
    }
    let mut f = [0u8; 8];
    let mut read_f64 = |r: &mut R| -> Result<f64, ElevMapError> {
        r.read_exact(&mut f)?;
        Ok(f64::from_le_bytes(f))
    };
    let center = (read_f64(&mut r)?, read_f64(&mut r)?);
    let resolution = read_f64(&mut r)?;
    let mut flag = [0u8; 1];
    r.read_exact(&mut flag)?;
    let mut channels = Vec::with_capacity(3);
    for _ in 0..3 {
        let mut c = Vec::with_capacity(GRID_SIZE * GRID_SIZE);
        for _ in 0..GRID_SIZE * GRID_SIZE {
            let mut b = [0u8; 8];
            r.read_exact(&mut b)?;
            c.push(f64::from_le_bytes(b));
        }
        channels.push(c);
    }
    let grid_y = channels.pop().unwrap();
    let grid_x = channels.pop().unwrap();
    let elevation = channels.pop().unwrap();
    Ok(EncodedObservationMap {
        center,
        resolution,
        elevation,
        grid_x,
        grid_y,
        saturated: flag[0] != 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::encode;

    #[test]
    fn local_grid_round_trips_through_heightmap_format() {
        let mut grid = LocalGrid::filled((3.0, 0.5), 0.025, 0.0);
        grid.set(5, 9, 0.22);
        let mut buf = Vec::new();
        save_local_grid_to(&grid, &mut buf).unwrap();
        let loaded = load_local_grid_from(buf.as_slice()).unwrap();
        assert_eq!(loaded.data, grid.data);
        assert!((loaded.center.0 - grid.center.0).abs() < 1e-12);
        assert!((loaded.center.1 - grid.center.1).abs() < 1e-12);
    }

    #[test]
    fn encoded_map_round_trips_bit_exact() {
        let mut grid = LocalGrid::filled((3.0, 0.5), 0.025, 0.0);
        grid.set(40, 22, -0.13);
        let enc = encode(&grid, (0.1, -0.05)).unwrap();
        let mut buf = Vec::new();
        save_encoded_map_to(&enc, &mut buf).unwrap();
        let loaded = load_encoded_map_from(buf.as_slice()).unwrap();
        assert_eq!(loaded, enc);
        let mut buf2 = Vec::new();
        save_encoded_map_to(&loaded, &mut buf2).unwrap();
        assert_eq!(buf, buf2);
    }
}
