//! Episode logging: JSONL (one tick per line, schema-versioned header
//! line) and a per-episode summary.

use std::io::Write;

use serde::{Deserialize, Serialize};

use strider_alip::{AlipState, FootstepAction};

use crate::episode::{StepInfo, StepOutcome};
use crate::reward::RewardBreakdown;
use crate::termination::TerminationCause;

pub const LOG_SCHEMA_VERSION: u32 = 1;

/// One tick of an episode log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRow {
    pub tick: usize,
    pub phase: f64,
    pub swing_side: String,
    pub alip: AlipState,
    pub com: (f64, f64, f64),
    pub action_raw: FootstepAction,
    pub velocity: (f64, f64),
    pub v_des: (f64, f64),
    pub reward: RewardBreakdown,
    pub tracking_err: f64,
    pub commands_sq: f64,
    pub touchdown: bool,
    pub touchdown_dz: Option<f64>,
    pub on_edge: bool,
    pub hard_collision: bool,
    pub termination: Option<TerminationCause>,
}

impl LogRow {
    pub fn from_outcome(raw_action: &FootstepAction, out: &StepOutcome) -> Self {
        let info: &StepInfo = &out.info;
        Self {
            tick: info.tick,
            phase: out.obs.phase,
            swing_side: format!("{:?}", out.obs.swing_side).to_lowercase(),
            alip: out.obs.alip,
            com: info.com_world,
            action_raw: *raw_action,
            velocity: info.velocity,
            v_des: out.obs.v_des,
            reward: out.reward,
            tracking_err: info.tracking_err,
            commands_sq: info.commands_sq,
            touchdown: info.touchdown.is_some(),
            touchdown_dz: info.touchdown.map(|t| t.dz),
            on_edge: info.touchdown.map(|t| t.on_edge).unwrap_or(false),
            hard_collision: info.hard_collision,
            termination: info.termination,
        }
    }
}

/// Whole-episode aggregate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeSummary {
    pub episode: usize,
    pub seed: u64,
    pub terrain: String,
    pub v_des: (f64, f64),
    pub ticks: usize,
    pub total_reward: f64,
    pub mse_vx: f64,
    pub mse_vy: f64,
    pub hard_collisions: usize,
    pub collisions_failing: usize,
    pub footsteps: usize,
    pub risers_climbed: usize,
    pub success: bool,
    pub termination: Option<TerminationCause>,
}

/// In-memory episode log with JSONL serialization.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EpisodeLog {
    pub rows: Vec<LogRow>,
}

#[derive(Serialize, Deserialize)]
struct Header {
    schema: &'static str,
    version: u32,
}

impl EpisodeLog {
    pub fn push(&mut self, raw_action: &FootstepAction, out: &StepOutcome) {
        self.rows.push(LogRow::from_outcome(raw_action, out));
    }

    /// Serialize: header line, then one row per line.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let header = Header {
            schema: "episode-log",
            version: LOG_SCHEMA_VERSION,
        };
        serde_json::to_writer(&mut w, &header)?;
        w.write_all(b"\n")?;
        for row in &self.rows {
            serde_json::to_writer(&mut w, row)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn to_jsonl_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("in-memory write");
        buf
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jsonl_round_trips() {
        let row = LogRow {
            tick: 3,
            phase: 0.25,
            swing_side: "left".into(),
            alip: AlipState::new(0.1, -0.05, 0.2, 0.3),
            com: (1.0, 0.0, 0.85),
            action_raw: FootstepAction::new(0.2, 0.2, 0.0, 0.25),
            velocity: (0.4, -0.02),
            v_des: (0.4, 0.0),
            reward: RewardBreakdown::default(),
            tracking_err: 0.01,
            commands_sq: 12.0,
            touchdown: false,
            touchdown_dz: None,
            on_edge: false,
            hard_collision: false,
            termination: None,
        };
        let log = EpisodeLog { rows: vec![row] };
        let bytes = log.to_jsonl_bytes();
        let text = String::from_utf8(bytes.clone()).unwrap();
        let mut lines = text.lines();
        let header: serde_json::Value = serde_json::from_str(lines.next().unwrap()).unwrap();
        assert_eq!(header["schema"], "episode-log");
        let parsed: LogRow = serde_json::from_str(lines.next().unwrap()).unwrap();
        assert_eq!(parsed, log.rows[0]);
        // Deterministic serialization.
        assert_eq!(bytes, log.to_jsonl_bytes());
    }
}
