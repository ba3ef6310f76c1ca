use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use strider_alip::{
    desired_footstep, flow_forced, lqr_gain, lqr_plan, nominal_step_offset,
    orbit_state_start_of_step, reset_map, AlipState, FootstepAction, LqrGain, PelvisForce,
    SwingSide,
};
use strider_elevmap::{
    crop, drift_correct, encode, fill_unknown, median_filter, perturb, sobel_edges,
    EncodedObservationMap, EpisodeMapNoise, LocalGrid,
};
use strider_swing::{
    plan_spline, replan_on_new_target, BoundaryState, PlantDisturbance, SwingSpline,
    TrackingPlant,
};
use strider_terrain::{generate, HeightMap};

use crate::config::{EnvConfig, EpisodeConfig, EpisodeInit, TICK_DT};
use crate::error::EnvError;
use crate::observation::{Observation, PrivilegedObservation};
use crate::reward::{reward, RewardBreakdown, RewardContext};
use crate::termination::TerminationCause;

/// Everything a touchdown produced this tick.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TouchdownInfo {
    pub position: (f64, f64, f64),
    /// Stance-plane height change.
    pub dz: f64,
    pub on_edge: bool,
    /// Touchdown forced early by terrain penetration.
    pub premature: bool,
    /// Sagittal advance of this step (for the yaw proxy and gait stats).
    pub step_dx: f64,
    /// Whether this touchdown climbed onto a new, higher level.
    pub new_riser: bool,
}

/// Per-tick diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepInfo {
    pub tick: usize,
    pub latency_ticks: usize,
    pub action_clamped: bool,
    pub replan_held: bool,
    pub touchdown: Option<TouchdownInfo>,
    pub hard_collision: bool,
    pub tracking_err: f64,
    pub commands_sq: f64,
    pub com_world: (f64, f64, f64),
    pub velocity: (f64, f64),
    pub termination: Option<TerminationCause>,
}

/// Output of one environment tick.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub obs: Observation,
    pub privileged: PrivilegedObservation,
    pub reward: RewardBreakdown,
    pub done: Option<TerminationCause>,
    pub info: StepInfo,
}

struct EpisodeState {
    cfg: EpisodeConfig,
    terrain: HeightMap,
    v_des: (f64, f64),
    tick: usize,
    step_tick: usize,
    swing: SwingSide,
    stance: (f64, f64, f64),
    alip: AlipState,
    spline: SwingSpline,
    plant: TrackingPlant,
    swing_start: [f64; 3],
    prev_action: [f64; 3],
    pending: FootstepAction,
    delay_ticks: usize,
    map_noise: EpisodeMapNoise,
    plant_disturbance: PlantDisturbance,
    rng_tick: ChaCha8Rng,
    done: Option<TerminationCause>,
    max_stance_z: f64,
    risers_climbed: usize,
    /// Sagittal advances of the last two completed steps.
    step_dx_history: [Option<f64>; 2],
    crossing_flag: bool,
    /// Last estimated (policy-pipeline) local grid, for planners.
    last_policy_grid: Option<LocalGrid>,
}

/// The reduced walking environment. One instance per worker; all mutation
/// is confined to the active episode.
pub struct Env {
    cfg: EnvConfig,
    gain: LqrGain,
    ticks_per_step: usize,
    ep: Option<EpisodeState>,
}

impl Env {
    pub fn new(cfg: EnvConfig) -> Result<Self, EnvError> {
        cfg.validate()?;
        let gain = lqr_gain(&cfg.alip, &cfg.lqr.q(), &cfg.lqr.r())?;
        let ticks_per_step = cfg.ticks_per_step();
        Ok(Self {
            cfg,
            gain,
            ticks_per_step,
            ep: None,
        })
    }

    pub fn config(&self) -> &EnvConfig {
        &self.cfg
    }

    pub fn lqr_gain_ref(&self) -> &LqrGain {
        &self.gain
    }

    pub fn v_des(&self) -> Option<(f64, f64)> {
        self.ep.as_ref().map(|e| e.v_des)
    }

    pub fn swing_side(&self) -> Option<SwingSide> {
        self.ep.as_ref().map(|e| e.swing)
    }

    pub fn alip_state(&self) -> Option<AlipState> {
        self.ep.as_ref().map(|e| e.alip)
    }

    pub fn stance(&self) -> Option<(f64, f64, f64)> {
        self.ep.as_ref().map(|e| e.stance)
    }

    pub fn time_to_touchdown(&self) -> Option<f64> {
        self.ep
            .as_ref()
            .map(|e| (self.ticks_per_step - e.step_tick) as f64 * TICK_DT)
    }

    pub fn tick(&self) -> usize {
        self.ep.as_ref().map(|e| e.tick).unwrap_or(0)
    }

    pub fn risers_climbed(&self) -> usize {
        self.ep.as_ref().map(|e| e.risers_climbed).unwrap_or(0)
    }

    pub fn terrain(&self) -> Option<&HeightMap> {
        self.ep.as_ref().map(|e| &e.terrain)
    }

    /// Latest estimated local grid (absolute heights, drift-corrected),
    /// for map-consuming planners.
    pub fn estimated_local_grid(&self) -> Option<&LocalGrid> {
        self.ep.as_ref().and_then(|e| e.last_policy_grid.as_ref())
    }

    /// Inject a constant plant disturbance for the rest of the episode
    /// (testing hook for tracking-failure paths).
    pub fn set_plant_disturbance(&mut self, d: PlantDisturbance) {
        if let Some(ep) = self.ep.as_mut() {
            ep.plant_disturbance = d;
        }
    }

    /// Sample initial conditions and start an episode.
    pub fn reset(
        &mut self,
        cfg: EpisodeConfig,
    ) -> Result<(Observation, PrivilegedObservation), EnvError> {
        let mut root = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut rng_init = ChaCha8Rng::seed_from_u64(root.gen());
        let is_flat = matches!(cfg.terrain.category, strider_terrain::TerrainCategory::Flat);
        let vx_range = if is_flat {
            self.cfg.vx_range_flat
        } else {
            self.cfg.vx_range_rough
        };
        let v_des = (
            rng_init.gen_range(vx_range.0..=vx_range.1),
            rng_init.gen_range(self.cfg.vy_range.0..=self.cfg.vy_range.1),
        );
        let phase_ticks = rng_init.gen_range(0..self.ticks_per_step);
        let swing_side = if rng_init.gen_bool(0.5) {
            SwingSide::Left
        } else {
            SwingSide::Right
        };
        let p = self.cfg.init_offset_pos;
        let m = self.cfg.init_offset_mom;
        let state_offset = [
            rng_init.gen_range(-p..=p),
            rng_init.gen_range(-p..=p),
            rng_init.gen_range(-m..=m),
            rng_init.gen_range(-m..=m),
        ];
        self.reset_with_init(
            cfg,
            EpisodeInit {
                v_des,
                phase_ticks,
                swing_side,
                state_offset,
            },
        )
    }

    /// Start an episode from pinned initial conditions.
    pub fn reset_with_init(
        &mut self,
        cfg: EpisodeConfig,
        init: EpisodeInit,
    ) -> Result<(Observation, PrivilegedObservation), EnvError> {
        let terrain = generate(&cfg.terrain)?;
        self.reset_with_terrain(cfg, init, terrain)
    }

    /// Start an episode on a supplied map (file-loaded or constructed)
    /// instead of generating one from the spec.
    pub fn reset_with_terrain(
        &mut self,
        cfg: EpisodeConfig,
        init: EpisodeInit,
        terrain: HeightMap,
    ) -> Result<(Observation, PrivilegedObservation), EnvError> {
        let mut root = ChaCha8Rng::seed_from_u64(cfg.seed);
        let _rng_init_seed: u64 = root.gen(); // consumed by reset() sampling
        let mut rng_dr = ChaCha8Rng::seed_from_u64(root.gen());
        let rng_tick = ChaCha8Rng::seed_from_u64(root.gen());

        let (map_noise, delay_ticks) = if cfg.dr_enabled {
            let noise = self.cfg.domain_rand.map.sample_episode(&mut rng_dr);
            let delay = rng_dr.gen_range(0.0..=self.cfg.domain_rand.delay_max);
            (noise, (delay / TICK_DT).round() as usize)
        } else {
            (EpisodeMapNoise::default(), 0)
        };

        let params = &self.cfg.alip;
        let stance_side = init.swing_side.opposite();
        // Place the stance foot so the CoM starts near y = 0. Flat maps
        // have no feature direction, so spawn mid-map to leave room for
        // backward commands.
        let spawn_x = if matches!(cfg.terrain.category, strider_terrain::TerrainCategory::Flat) {
            terrain.origin.0 + 0.5 * terrain.width as f64 * terrain.resolution
        } else {
            self.cfg.spawn_x
        };
        let orbit0 = orbit_state_start_of_step(init.v_des, stance_side, params);
        let stance_xy = (spawn_x, -orbit0.y_com);
        let stance_z = terrain.height_at(stance_xy.0, stance_xy.1)?;
        let stance = (stance_xy.0, stance_xy.1, stance_z);

        let phase0 = init.phase_ticks as f64 / self.ticks_per_step as f64;
        let alip0 = strider_alip::flow(&orbit0, phase0 * params.step_duration, params)?;
        let alip = AlipState::new(
            alip0.x_com + init.state_offset[0],
            alip0.y_com + init.state_offset[1],
            alip0.l_x + init.state_offset[2],
            alip0.l_y + init.state_offset[3],
        );

        // Previous foothold: where the now-swinging foot last stood.
        let prev_offset = nominal_step_offset(init.v_des, stance_side, params);
        let swing_xy = (stance.0 - prev_offset.0, stance.1 - prev_offset.1);
        let swing_z = clamped_height(&terrain, swing_xy.0, swing_xy.1);
        let swing_start = [swing_xy.0, swing_xy.1, swing_z];

        // Nominal landing target for the initial spline.
        let nominal = nominal_step_offset(init.v_des, init.swing_side, params);
        let target_xy = (stance.0 + nominal.0, stance.1 + nominal.1);
        let target = [
            target_xy.0,
            target_xy.1,
            clamped_height(&terrain, target_xy.0, target_xy.1),
        ];
        let bc = BoundaryState {
            pos: swing_start,
            ..Default::default()
        };
        let mid = self.cfg.spline.default_mid_target(swing_start, target);
        let spline = plan_spline(&bc, target, mid, &self.cfg.spline, 0.0, params.step_duration)?;

        let mut plant = TrackingPlant::new(self.cfg.plant)?;
        plant.reset_on_trajectory(&spline, phase0 * params.step_duration, stance_z + params.com_height);

        let nominal_action = FootstepAction::new(nominal.0, nominal.1, target[2] - stance_z, phase0);

        self.ep = Some(EpisodeState {
            cfg,
            terrain,
            v_des: init.v_des,
            tick: 0,
            step_tick: init.phase_ticks,
            swing: init.swing_side,
            stance,
            alip,
            spline,
            plant,
            swing_start,
            prev_action: [nominal_action.p_x, nominal_action.p_y, nominal_action.p_z],
            pending: nominal_action,
            delay_ticks,
            map_noise,
            plant_disturbance: PlantDisturbance::default(),
            rng_tick,
            done: None,
            max_stance_z: stance_z,
            risers_climbed: 0,
            step_dx_history: [None, None],
            crossing_flag: false,
            last_policy_grid: None,
        });
        self.assemble_observation()
    }

    /// Advance one 25 ms tick.
    pub fn step(&mut self, action: FootstepAction) -> Result<StepOutcome, EnvError> {
        let ticks_per_step = self.ticks_per_step;
        let params = self.cfg.alip;
        let reach = self.cfg.reach;
        let term = self.cfg.termination;
        let dr = self.cfg.domain_rand;
        let spline_weights = self.cfg.spline;
        let gain = self.gain.clone();
        {
            let ep = self.ep.as_ref().ok_or(EnvError::NoEpisode)?;
            if ep.done.is_some() {
                return Err(EnvError::EpisodeOver);
            }
        }
        let ep = self.ep.as_mut().unwrap();

        // Self-collision proxy fires on the raw command, before clamping.
        if action.p_y * ep.swing.lateral_sign() < 0.0 {
            ep.crossing_flag = true;
        }

        // Communication delay (0 or 1 tick).
        let (applied_raw, latency) = if ep.delay_ticks >= 1 {
            (std::mem::replace(&mut ep.pending, action), 1)
        } else {
            (action, 0)
        };
        let (applied, clamped) = reach.clamp(&applied_raw, ep.swing);

        // Blind-LQR reference action for the regulation reward.
        let t_now = ep.step_tick as f64 * TICK_DT;
        let t_go = params.step_duration - t_now;
        let (lqr_ref, _) = lqr_plan(&ep.alip, ep.v_des, ep.swing, t_go, &params, &gain, &reach)?;

        // Stance-relative height targets, evaluated against the stance at
        // command time.
        let a_z = applied.p_z;
        let a_z_gt = clamped_height(
            &ep.terrain,
            ep.stance.0 + applied.p_x,
            ep.stance.1 + applied.p_y,
        ) - ep.stance.2;

        // Replan the swing spline toward the commanded target.
        let target_world = [
            ep.stance.0 + applied.p_x,
            ep.stance.1 + applied.p_y,
            ep.stance.2 + applied.p_z,
        ];
        let mid = spline_weights.default_mid_target(ep.swing_start, target_world);
        let mut replan_held = false;
        match replan_on_new_target(&ep.spline, t_now, target_world, mid, &spline_weights) {
            Ok(s) => ep.spline = s,
            Err(_) => replan_held = true,
        }

        // Per-tick pelvis force.
        let force = if ep.cfg.dr_enabled {
            PelvisForce {
                f_x: ep.rng_tick.gen_range(-dr.force_xy..=dr.force_xy),
                f_y: ep.rng_tick.gen_range(-dr.force_xy..=dr.force_xy),
                f_z: ep.rng_tick.gen_range(-dr.force_z..=dr.force_z),
            }
        } else {
            PelvisForce::default()
        };

        // Inner loop: 2 kHz surrogate plant along the spline.
        let inner_dt = ep.plant.gains.dt;
        let n_inner = (TICK_DT / inner_dt).round() as usize;
        let com_ref = ep.stance.2 + params.com_height;
        let mut commands_sq_acc = [0.0f64; 4];
        let mut max_track_err = 0.0f64;
        let mut premature: Option<f64> = None; // fraction of tick elapsed
        let mut inner_steps_done = 0usize;
        for k in 0..n_inner {
            let t = t_now + k as f64 * inner_dt;
            let out = ep.plant.step(&ep.spline, t, com_ref, &ep.plant_disturbance);
            for (acc, cmd) in commands_sq_acc.iter_mut().zip(out.commands) {
                let scaled = self.cfg.reward.torque_scale * cmd;
                *acc += scaled * scaled;
            }
            let denom = ep
                .spline
                .commanded_displacement()
                .max(self.cfg.reward.track_margin);
            let err = dist3(out.foot_pos, out.foot_des_pos) / denom;
            max_track_err = max_track_err.max(err);
            inner_steps_done = k + 1;
            // Terrain penetration: the swing foot struck the ground early.
            let ground = clamped_height(&ep.terrain, out.foot_pos[0], out.foot_pos[1]);
            if out.foot_pos[2] < ground - term.collision_penetration {
                premature = Some((k + 1) as f64 / n_inner as f64);
                break;
            }
        }
        let commands_sq: f64 = commands_sq_acc
            .iter()
            .map(|acc| acc / inner_steps_done as f64)
            .sum();

        // Advance the ALIP flow and process touchdown.
        let scheduled = ep.step_tick + 1 == ticks_per_step;
        let mut touchdown_info: Option<TouchdownInfo> = None;
        let hard_collision = premature.is_some();
        if let Some(frac) = premature {
            let s_td = flow_forced(&ep.alip, frac * TICK_DT, &params, force)?;
            ep.alip = s_td;
            let foot = [
                ep.plant.foot[0].pos,
                ep.plant.foot[1].pos,
                ep.plant.foot[2].pos,
            ];
            touchdown_info = Some(Self::do_touchdown(
                ep, &self.cfg, &params, foot, true,
            ));
            ep.alip = flow_forced(&ep.alip, (1.0 - frac) * TICK_DT, &params, force)?;
            ep.step_tick = 0;
        } else {
            ep.alip = flow_forced(&ep.alip, TICK_DT, &params, force)?;
            if scheduled {
                let foot = [
                    ep.plant.foot[0].pos,
                    ep.plant.foot[1].pos,
                    ep.plant.foot[2].pos,
                ];
                touchdown_info = Some(Self::do_touchdown(
                    ep, &self.cfg, &params, foot, false,
                ));
                ep.step_tick = 0;
            } else {
                ep.step_tick += 1;
            }
        }
        ep.tick += 1;

        // Yaw-rate proxy from consecutive sagittal step asymmetry.
        let omega_z = if self.cfg.yaw_proxy_enabled {
            match ep.step_dx_history {
                [Some(a), Some(b)] => {
                    self.cfg.yaw_proxy_scale * (a - b)
                        / (params.stance_width * 2.0 * params.step_duration)
                }
                _ => 0.0,
            }
        } else {
            0.0
        };

        let v = ep.alip.com_velocity(&params);
        let ctx = RewardContext {
            v,
            v_des: ep.v_des,
            a_z_gt,
            a_z,
            omega_z,
            action: [applied.p_x, applied.p_y, applied.p_z],
            prev_action: ep.prev_action,
            lqr_action_xy: (lqr_ref.p_x, lqr_ref.p_y),
            tracking_err: max_track_err,
            commands_sq,
            stepped_on_edge: touchdown_info.map(|t| t.on_edge).unwrap_or(false),
            collision: hard_collision,
        };
        let breakdown = reward(&ctx, &self.cfg.reward);
        ep.prev_action = [applied.p_x, applied.p_y, applied.p_z];

        // Termination.
        let com = (
            ep.stance.0 + ep.alip.x_com,
            ep.stance.1 + ep.alip.y_com,
            ep.plant.com_z.pos,
        );
        let mut cause = None;
        if ep.crossing_flag {
            cause = Some(TerminationCause::Crossing);
        } else if !ep.alip.is_valid(&self.cfg.envelope)
            || (ep.alip.x_com.powi(2) + ep.alip.y_com.powi(2)).sqrt() > term.capture_radius
            || (com.2 - (ep.stance.2 + params.com_height)).abs() > term.com_height_error
        {
            cause = Some(TerminationCause::Fall);
        } else if max_track_err > term.tracking_error {
            cause = Some(TerminationCause::Tracking);
        } else if hard_collision && ep.cfg.terminate_on_hard_collision {
            cause = Some(TerminationCause::HardCollision);
        } else if ep.cfg.lateral_limit.map(|l| com.1.abs() > l).unwrap_or(false) {
            cause = Some(TerminationCause::LateralDrift);
        } else if ep.tick >= ep.cfg.max_ticks {
            cause = Some(TerminationCause::Horizon);
        }
        ep.done = cause;

        let info = StepInfo {
            tick: ep.tick,
            latency_ticks: latency,
            action_clamped: clamped,
            replan_held,
            touchdown: touchdown_info,
            hard_collision,
            tracking_err: max_track_err,
            commands_sq,
            com_world: com,
            velocity: v,
            termination: cause,
        };

        let (obs, privileged) = self.assemble_observation()?;
        Ok(StepOutcome {
            obs,
            privileged,
            reward: breakdown,
            done: cause,
            info,
        })
    }

    fn do_touchdown(
        ep: &mut EpisodeState,
        cfg: &EnvConfig,
        params: &strider_alip::AlipParams,
        foot: [f64; 3],
        premature: bool,
    ) -> TouchdownInfo {
        let new_z = clamped_height(&ep.terrain, foot[0], foot[1]);
        let dz = new_z - ep.stance.2;
        let step_dx = foot[0] - ep.stance.0;

        // Edge check on the ground-truth filtered crop centered at the
        // landing point.
        let on_edge = gt_edge_at(&ep.terrain, cfg, foot[0], foot[1]);

        let p_rel = (
            foot[0] - ep.stance.0,
            foot[1] - ep.stance.1,
            new_z - ep.stance.2,
        );
        ep.alip = reset_map(&ep.alip, p_rel.0, p_rel.1, p_rel.2, params);

        let new_riser = new_z > ep.max_stance_z + cfg.termination.riser_count_threshold;
        if new_riser {
            ep.risers_climbed += 1;
            ep.max_stance_z = new_z;
        }
        ep.step_dx_history = [Some(step_dx), ep.step_dx_history[0]];

        let old_stance = ep.stance;
        ep.stance = (foot[0], foot[1], new_z);
        ep.swing = ep.swing.opposite();
        ep.swing_start = [old_stance.0, old_stance.1, old_stance.2];
        ep.spline = SwingSpline::stationary(ep.swing_start, 0.0, params.step_duration);
        for (axis, st) in ep.plant.foot.iter_mut().enumerate() {
            st.pos = ep.swing_start[axis];
            st.vel = 0.0;
        }

        TouchdownInfo {
            position: ep.stance,
            dz,
            on_edge,
            premature,
            step_dx,
            new_riser,
        }
    }

    fn assemble_observation(
        &mut self,
    ) -> Result<(Observation, PrivilegedObservation), EnvError> {
        let cfg = &self.cfg;
        let ticks_per_step = self.ticks_per_step;
        let gain = &self.gain;
        let ep = self.ep.as_mut().ok_or(EnvError::NoEpisode)?;
        let params = &cfg.alip;
        let phase = ep.step_tick as f64 / ticks_per_step as f64;
        let com_xy = (ep.stance.0 + ep.alip.x_com, ep.stance.1 + ep.alip.y_com);

        let alip_obs = if ep.cfg.dr_enabled && cfg.domain_rand.alip_noise > 0.0 {
            let a = cfg.domain_rand.alip_noise;
            AlipState::new(
                ep.alip.x_com + ep.rng_tick.gen_range(-a..=a),
                ep.alip.y_com + ep.rng_tick.gen_range(-a..=a),
                ep.alip.l_x + ep.rng_tick.gen_range(-a..=a),
                ep.alip.l_y + ep.rng_tick.gen_range(-a..=a),
            )
        } else {
            ep.alip
        };

        let (map, true_map) = if ep.cfg.lean_observation {
            let (gx, gy) = EncodedObservationMap::ramps(ep.terrain.resolution);
            (
                EncodedObservationMap {
                    center: com_xy,
                    resolution: ep.terrain.resolution,
                    elevation: vec![0.0; strider_elevmap::GRID_SIZE * strider_elevmap::GRID_SIZE],
                    grid_x: gx,
                    grid_y: gy,
                    saturated: false,
                },
                vec![0.0; strider_elevmap::GRID_SIZE * strider_elevmap::GRID_SIZE],
            )
        } else {
            let center = clamp_into_map(&ep.terrain, com_xy);
            let raw = crop(&ep.terrain, center)?;

            // Ground-truth branch: fill + median.
            let gt = median_filter(&fill_unknown(&raw)?, cfg.median_window)?;
            let mut true_map = gt.data.clone();
            if cfg.relative_heights {
                for v in &mut true_map {
                    *v -= ep.stance.2;
                }
            }

            // Estimated branch: perturb (DR) → fill → median → drift.
            let estimated = if ep.cfg.dr_enabled {
                perturb(&raw, &cfg.domain_rand.map, &ep.map_noise, &mut ep.rng_tick)
            } else {
                raw
            };
            let filtered = median_filter(&fill_unknown(&estimated)?, cfg.median_window)?;
            let (corrected, _) =
                drift_correct(&filtered, (ep.stance.0, ep.stance.1, ep.stance.2))?;

            // Recenter on the desired footstep from the commanded orbit.
            let t_go = (ticks_per_step - ep.step_tick) as f64 * TICK_DT;
            let u = desired_footstep(ep.v_des, ep.swing, &ep.alip, t_go, params, &cfg.reach)?;
            let u_world = (ep.stance.0 + u.u_x, ep.stance.1 + u.u_y);
            let rel = (u_world.0 - corrected.center.0, u_world.1 - corrected.center.1);
            let mut enc = encode(&corrected, rel)?;
            if cfg.relative_heights {
                for v in &mut enc.elevation {
                    *v -= ep.stance.2;
                }
            }
            ep.last_policy_grid = Some(corrected);
            (enc, true_map)
        };

        let _ = gain;
        let obs = Observation {
            v_des: ep.v_des,
            alip: alip_obs,
            map,
            phase,
            swing_side: ep.swing,
            prev_action: ep.prev_action,
        };
        let plant_state = [
            ep.plant.foot[0].pos - ep.stance.0,
            ep.plant.foot[1].pos - ep.stance.1,
            ep.plant.foot[2].pos - ep.stance.2,
            ep.plant.foot[0].vel,
            ep.plant.foot[1].vel,
            ep.plant.foot[2].vel,
            ep.plant.com_z.pos - ep.stance.2,
            ep.plant.com_z.vel,
        ];
        let privileged = PrivilegedObservation {
            obs: obs.clone(),
            true_map,
            plant_state,
        };
        Ok((obs, privileged))
    }
}

fn dist3(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// Terrain height with the query clamped into the map rectangle (the map
/// continues flat past its borders).
fn clamped_height(map: &HeightMap, x: f64, y: f64) -> f64 {
    let eps = 0.5 * map.resolution;
    let x = x.clamp(
        map.origin.0 + eps,
        map.origin.0 + map.width as f64 * map.resolution - eps,
    );
    let y = y.clamp(
        map.origin.1 + eps,
        map.origin.1 + map.height as f64 * map.resolution - eps,
    );
    map.height_at(x, y).unwrap_or(0.0)
}

fn clamp_into_map(map: &HeightMap, p: (f64, f64)) -> (f64, f64) {
    let eps = 0.5 * map.resolution;
    (
        p.0.clamp(
            map.origin.0 + eps,
            map.origin.0 + map.width as f64 * map.resolution - eps,
        ),
        p.1.clamp(
            map.origin.1 + eps,
            map.origin.1 + map.height as f64 * map.resolution - eps,
        ),
    )
}

/// Edge test at a world position: Sobel mask of the ground-truth filtered
/// crop centered there, queried at its center cell.
fn gt_edge_at(map: &HeightMap, cfg: &EnvConfig, x: f64, y: f64) -> bool {
    let center = clamp_into_map(map, (x, y));
    let Ok(raw) = crop(map, center) else {
        return false;
    };
    let Ok(filled) = fill_unknown(&raw) else {
        return false;
    };
    let Ok(filtered) = median_filter(&filled, cfg.median_window) else {
        return false;
    };
    let edges = sobel_edges(&filtered, cfg.edge_threshold);
    edges.is_edge(strider_elevmap::GRID_CENTER, strider_elevmap::GRID_CENTER)
}
