//! Binary heightmap file format.
//!
//! Layout (little-endian): magic `SHM1`, version u32, origin_x f64,
//! origin_y f64, resolution f64, width u32, height u32, friction f64,
//! category u8, then width·height f64 elevations row-major over (iy, ix).
//! Round-trips are bit-exact.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::TerrainError;
use crate::generate::TerrainCategory;
use crate::heightmap::HeightMap;

const MAGIC: &[u8; 4] = b"SHM1";
const VERSION: u32 = 1;

pub fn save_heightmap_to<W: Write>(map: &HeightMap, mut w: W) -> Result<(), TerrainError> {
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&map.origin.0.to_le_bytes())?;
    w.write_all(&map.origin.1.to_le_bytes())?;
    w.write_all(&map.resolution.to_le_bytes())?;
    w.write_all(&(map.width as u32).to_le_bytes())?;
    w.write_all(&(map.height as u32).to_le_bytes())?;
    w.write_all(&map.friction.to_le_bytes())?;
    w.write_all(&[map.category.tag()])?;
    for v in &map.data {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn load_heightmap_from<R: Read>(mut r: R) -> Result<HeightMap, TerrainError> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(TerrainError::Format(format!(
            "bad magic {:?}, expected {:?}",
            magic, MAGIC
        )));
    }
    let version = read_u32(&mut r)?;
    if version != VERSION {
        return Err(TerrainError::Format(format!(
            "unsupported version {version}, expected {VERSION}"
        )));
    }
    let origin = (read_f64(&mut r)?, read_f64(&mut r)?);
    let resolution = read_f64(&mut r)?;
    let width = read_u32(&mut r)? as usize;
    let height = read_u32(&mut r)? as usize;
    let friction = read_f64(&mut r)?;
    let mut tag = [0u8; 1];
    r.read_exact(&mut tag)?;
    let category = TerrainCategory::from_tag(tag[0])
        .ok_or_else(|| TerrainError::Format(format!("unknown category tag {}", tag[0])))?;
    if resolution <= 0.0 || width == 0 || height == 0 {
        return Err(TerrainError::Format("degenerate header".into()));
    }
    let mut data = Vec::with_capacity(width * height);
    for _ in 0..width * height {
        data.push(read_f64(&mut r)?);
    }
    if data.iter().any(|v| !v.is_finite()) {
        return Err(TerrainError::Format("non-finite elevation".into()));
    }
    Ok(HeightMap {
        origin,
        resolution,
        width,
        height,
        data,
        friction,
        category,
    })
}

pub fn save_heightmap(map: &HeightMap, path: &Path) -> Result<(), TerrainError> {
    let file = std::fs::File::create(path)?;
    save_heightmap_to(map, std::io::BufWriter::new(file))
}

pub fn load_heightmap(path: &Path) -> Result<HeightMap, TerrainError> {
    let file = std::fs::File::open(path)?;
    load_heightmap_from(std::io::BufReader::new(file))
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32, TerrainError> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64, TerrainError> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}
