//! Versioned binary checkpoints: magic `SCKP`, version, a JSON metadata
//! blob (network hyperparameters), then named little-endian f64 parameter
//! arrays.

use std::io::{Read, Write};
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::LearnError;
use crate::nn::FlatParams;
use crate::policy::{PolicyNet, PolicyNetConfig, ValueNet};

pub const CHECKPOINT_VERSION: u32 = 1;
const MAGIC: &[u8; 4] = b"SCKP";

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Meta {
    policy: PolicyNetConfig,
    has_value: bool,
}

/// A loaded checkpoint.
pub struct Checkpoint {
    pub policy: PolicyNet,
    pub value: Option<ValueNet>,
}

pub fn save_checkpoint_to<W: Write>(
    mut w: W,
    policy: &PolicyNet,
    value: Option<&ValueNet>,
) -> Result<(), LearnError> {
    w.write_all(MAGIC)?;
    w.write_all(&CHECKPOINT_VERSION.to_le_bytes())?;
    let meta = serde_json::to_vec(&Meta {
        policy: policy.cfg,
        has_value: value.is_some(),
    })
    .map_err(|e| LearnError::Checkpoint(e.to_string()))?;
    w.write_all(&(meta.len() as u32).to_le_bytes())?;
    w.write_all(&meta)?;
    write_section(&mut w, "policy", &policy.params_flat())?;
    if let Some(v) = value {
        write_section(&mut w, "value", &v.params_flat())?;
    }
    Ok(())
}

pub fn load_checkpoint_from<R: Read>(mut r: R) -> Result<Checkpoint, LearnError> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(LearnError::Checkpoint(format!("bad magic {magic:?}")));
    }
    let mut b4 = [0u8; 4];
    r.read_exact(&mut b4)?;
    let version = u32::from_le_bytes(b4);
    if version != CHECKPOINT_VERSION {
        return Err(LearnError::CheckpointVersion {
            found: version,
            expected: CHECKPOINT_VERSION,
        });
    }
    r.read_exact(&mut b4)?;
    let meta_len = u32::from_le_bytes(b4) as usize;
    let mut meta_buf = vec![0u8; meta_len];
    r.read_exact(&mut meta_buf)?;
    let meta: Meta =
        serde_json::from_slice(&meta_buf).map_err(|e| LearnError::Checkpoint(e.to_string()))?;

    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut policy = PolicyNet::new(meta.policy, &mut rng);
    let (name, data) = read_section(&mut r)?;
    if name != "policy" {
        return Err(LearnError::Checkpoint(format!("expected policy section, got {name}")));
    }
    if data.len() != policy.param_count() {
        return Err(LearnError::Checkpoint(format!(
            "policy parameter count {} != expected {}",
            data.len(),
            policy.param_count()
        )));
    }
    policy.set_params(&data);

    let value = if meta.has_value {
        let mut value = ValueNet::new(meta.policy, &mut rng);
        let (name, data) = read_section(&mut r)?;
        if name != "value" {
            return Err(LearnError::Checkpoint(format!("expected value section, got {name}")));
        }
        if data.len() != value.param_count() {
            return Err(LearnError::Checkpoint("value parameter count mismatch".into()));
        }
        value.set_params(&data);
        Some(value)
    } else {
        None
    };
    Ok(Checkpoint { policy, value })
}

pub fn save_checkpoint(
    path: &Path,
    policy: &PolicyNet,
    value: Option<&ValueNet>,
) -> Result<(), LearnError> {
    let f = std::fs::File::create(path)?;
    save_checkpoint_to(std::io::BufWriter::new(f), policy, value)
}

pub fn load_checkpoint(path: &Path) -> Result<Checkpoint, LearnError> {
    let f = std::fs::File::open(path)?;
    load_checkpoint_from(std::io::BufReader::new(f))
}

fn write_section<W: Write>(w: &mut W, name: &str, data: &[f64]) -> Result<(), LearnError> {
    w.write_all(&(name.len() as u32).to_le_bytes())?;
    w.write_all(name.as_bytes())?;
    w.write_all(&(data.len() as u64).to_le_bytes())?;
    for v in data {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

fn read_section<R: Read>(r: &mut R) -> Result<(String, Vec<f64>), LearnError> {
    let mut b4 = [0u8; 4];
    r.read_exact(&mut b4)?;
    let name_len = u32::from_le_bytes(b4) as usize;
    let mut name = vec![0u8; name_len];
    r.read_exact(&mut name)?;
    let name = String::from_utf8(name).map_err(|e| LearnError::Checkpoint(e.to_string()))?;
    let mut b8 = [0u8; 8];
    r.read_exact(&mut b8)?;
    let len = u64::from_le_bytes(b8) as usize;
    let mut data = Vec::with_capacity(len);
    for _ in 0..len {
        r.read_exact(&mut b8)?;
        data.push(f64::from_le_bytes(b8));
    }
    Ok((name, data))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checkpoint_round_trips_bit_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let policy = PolicyNet::new(PolicyNetConfig::default(), &mut rng);
        let value = ValueNet::new(PolicyNetConfig::default(), &mut rng);
        let mut buf = Vec::new();
        save_checkpoint_to(&mut buf, &policy, Some(&value)).unwrap();
        let loaded = load_checkpoint_from(buf.as_slice()).unwrap();
        assert_eq!(loaded.policy.params_flat(), policy.params_flat());
        assert_eq!(loaded.value.unwrap().params_flat(), value.params_flat());
        let mut buf2 = Vec::new();
        save_checkpoint_to(&mut buf2, &loaded.policy, None).unwrap();
        // Same policy bytes regardless of the value section.
        assert_eq!(&buf[..buf2.len().min(buf.len())][..20], &buf2[..20]);
    }

    #[test]
    fn version_mismatch_is_a_load_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let policy = PolicyNet::new(PolicyNetConfig::default(), &mut rng);
        let mut buf = Vec::new();
        save_checkpoint_to(&mut buf, &policy, None).unwrap();
        buf[4] = 99;
        assert!(matches!(
            load_checkpoint_from(buf.as_slice()),
            Err(LearnError::CheckpointVersion { found: 99, .. })
        ));
    }
}
