/// Generalized advantage estimation: reverse recursion
/// Â_t = δ_t + γλ(1 − done_t)·Â_{t+1}, δ_t = r_t + γ(1 − done_t)·V_{t+1} − V_t.
///
/// `values` carries one extra entry: the bootstrap value V_T (zero when the
/// final state was terminal).
pub fn gae(rewards: &[f64], values: &[f64], dones: &[bool], gamma: f64, lambda: f64) -> Vec<f64> {
    assert_eq!(values.len(), rewards.len() + 1, "values must include the bootstrap");
    assert_eq!(dones.len(), rewards.len());
    let mut advantages = vec![0.0; rewards.len()];
    let mut acc = 0.0;
    for t in (0..rewards.len()).rev() {
        let not_done = if dones[t] { 0.0 } else { 1.0 };
        let delta = rewards[t] + gamma * values[t + 1] * not_done - values[t];
        acc = delta + gamma * lambda * not_done * acc;
        advantages[t] = acc;
    }
    advantages
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_zero_is_the_td_residual() {
        let rewards = [1.0, 0.5, -0.2];
        let values = [0.3, 0.8, 0.1, 0.4];
        let dones = [false, false, false];
        let adv = gae(&rewards, &values, &dones, 0.9, 0.0);
        for t in 0..3 {
            let expect = rewards[t] + 0.9 * values[t + 1] - values[t];
            assert!((adv[t] - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn lambda_one_zero_values_is_the_discounted_return() {
        let rewards = [1.0, 1.0, 1.0, 1.0];
        let values = [0.0; 5];
        let dones = [false, false, false, true];
        let adv = gae(&rewards, &values, &dones, 0.5, 1.0);
        // Discounted returns: r_t + γ r_{t+1} + ...
        assert!((adv[3] - 1.0).abs() < 1e-12);
        assert!((adv[2] - 1.5).abs() < 1e-12);
        assert!((adv[1] - 1.75).abs() < 1e-12);
        assert!((adv[0] - 1.875).abs() < 1e-12);
    }

    #[test]
    fn four_step_hand_recursion() {
        let rewards = [0.5, -1.0, 2.0, 0.0];
        let values = [0.2, 0.4, -0.1, 0.3, 0.6];
        let dones = [false, true, false, false];
        let gamma = 0.99;
        let lambda = 0.95;
        // Hand recursion from the back.
        let d3 = 0.0 + gamma * 0.6 - 0.3;
        let a3 = d3;
        let d2 = 2.0 + gamma * 0.3 - (-0.1);
        let a2 = d2 + gamma * lambda * a3;
        let d1 = -1.0 + 0.0 - 0.4; // done: no bootstrap, chain cut
        let a1 = d1;
        let d0 = 0.5 + gamma * 0.4 - 0.2;
        let a0 = d0 + gamma * lambda * a1;
        let adv = gae(&rewards, &values, &dones, gamma, lambda);
        for (got, want) in adv.iter().zip([a0, a1, a2, a3]) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn episode_boundaries_reset_the_chain() {
        let rewards = [1.0, 1.0];
        let values = [0.0, 5.0, 0.0];
        let dones = [true, false];
        let adv = gae(&rewards, &values, &dones, 0.99, 0.95);
        // First transition terminal: no bootstrap through V_1.
        assert!((adv[0] - 1.0).abs() < 1e-12);
    }
}
