use serde::{Deserialize, Serialize};

use strider_alip::{AlipState, FootstepAction, SwingSide};
use strider_elevmap::EncodedObservationMap;

/// Policy input for one tick.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub v_des: (f64, f64),
    /// ALIP state; carries observation noise in training mode.
    pub alip: AlipState,
    pub map: EncodedObservationMap,
    /// Fraction of the current step elapsed, in [0, 1).
    pub phase: f64,
    pub swing_side: SwingSide,
    /// Previously applied footstep action (p_x, p_y, p_z).
    pub prev_action: [f64; 3],
}

/// Critic-only extension: noise-free terrain crop (stance-relative
/// heights) and the true plant state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrivilegedObservation {
    pub obs: Observation,
    /// 64×64 ground-truth local elevations.
    pub true_map: Vec<f64>,
    /// [foot pos xyz, foot vel xyz, com z, com ż], stance-relative.
    pub plant_state: [f64; 8],
}

/// Lateral reflection of an observation: y-components negate, the map and
/// its Y-offset channel flip left-right, the swing side swaps.
pub fn mirror_obs(o: &Observation) -> Observation {
    Observation {
        v_des: (o.v_des.0, -o.v_des.1),
        alip: o.alip.mirrored(),
        map: o.map.mirrored_y(),
        phase: o.phase,
        swing_side: o.swing_side.opposite(),
        prev_action: [o.prev_action[0], -o.prev_action[1], o.prev_action[2]],
    }
}

/// Lateral reflection of an action (p_y negates).
pub fn mirror_act(a: &FootstepAction) -> FootstepAction {
    a.mirrored()
}
