// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

//! Large-graph asymptotic amplitudes and predicted step counts at `φ = π`.

use std::f64::consts::{FRAC_PI_2, SQRT_2};

use crate::error::{Result, WalkError};

/// Rotation angle per step of the complete-graph search,
/// `tan θ = √(v(2N − v − 2)) / (N − v − 1)`.
pub fn theta_complete(n: usize, v: usize) -> f64 {
    let (nf, vf) = (n as f64, v as f64);
    (vf * (2.0 * nf - vf - 2.0)).sqrt().atan2(nf - vf - 1.0)
}

/// `round(π / (2θ))`: steps after which the amplitude left on edges between
/// normal vertices first vanishes.
pub fn predicted_steps_complete(n: usize, v: usize) -> usize {
    (FRAC_PI_2 / theta_complete(n, v)).round() as usize
}

/// Approximate `(w1, w2, w3, w4)` amplitudes after `steps` steps from the
/// uniform state, valid for `N ≫ v`. The neglected terms are of order
/// `1/√N` in each component.
pub fn closed_form_complete(n: usize, v: usize, steps: usize) -> [f64; 4] {
    let (nf, vf, k) = (n as f64, v as f64, steps as f64);
    let theta = theta_complete(n, v);
    let norm = 2.0 * (nf * vf).sqrt();
    let edge = (2.0 * vf * (nf - 1.0)).sqrt();
    [
        edge * ((2.0 * k + 1.0) * theta / 2.0).sin() / norm,
        -edge * ((2.0 * k - 1.0) * theta / 2.0).sin() / norm,
        2.0 * (vf * (nf - vf - 1.0)).sqrt() * (k * theta).cos() / norm,
        0.0,
    ]
}

/// `x_j = 2 v_j / N_j`.
pub fn bipartite_x(n1: usize, n2: usize, v1: usize, v2: usize) -> (f64, f64) {
    (2.0 * v1 as f64 / n1 as f64, 2.0 * v2 as f64 / n2 as f64)
}

/// Rotation angle per application of the two-step matrix,
/// `√(2(x1 + x2))`. With one special vertex per set this is
/// `2(1/N1 + 1/N2)^{1/2}`, see [`bipartite_theta_single_specials`].
pub fn bipartite_theta(n1: usize, n2: usize, v1: usize, v2: usize) -> f64 {
    let (x1, x2) = bipartite_x(n1, n2, v1, v2);
    (2.0 * (x1 + x2)).sqrt()
}

pub fn bipartite_theta_single_specials(n1: usize, n2: usize) -> f64 {
    2.0 * (1.0 / n1 as f64 + 1.0 / n2 as f64).sqrt()
}

/// Number of two-step applications, `round(π / (2√(2(x1 + x2))))`, that
/// rotates the walk onto the special edges.
pub fn bipartite_two_step_count(n1: usize, n2: usize, v1: usize, v2: usize) -> Result<usize> {
    if v1 + v2 == 0 {
        return Err(WalkError::InvalidParameter("bipartite search needs at least one special vertex".into()));
    }
    Ok((FRAC_PI_2 / bipartite_theta(n1, n2, v1, v2)).round() as usize)
}

/// Walk steps for the bipartite search: twice the two-step count.
pub fn bipartite_step_count(n1: usize, n2: usize, v1: usize, v2: usize) -> Result<usize> {
    Ok(2 * bipartite_two_step_count(n1, n2, v1, v2)?)
}

/// Approximate `(w21, w22, w23)` amplitudes after `applications` uses of
/// the two-step matrix, starting from the uniform state on edges entering
/// set 2, for `v_j / N_j ≪ 1`.
pub fn closed_form_bipartite(n1: usize, n2: usize, v1: usize, v2: usize, applications: usize) -> Result<[f64; 3]> {
    let (x1, x2) = bipartite_x(n1, n2, v1, v2);
    if x1 + x2 == 0.0 {
        return Err(WalkError::InvalidParameter("bipartite search needs at least one special vertex".into()));
    }
    let angle = applications as f64 * bipartite_theta(n1, n2, v1, v2);
    let (s, c) = angle.sin_cos();
    Ok([-(x1 / (x1 + x2)).sqrt() * s, (x2 / (x1 + x2)).sqrt() * s, c])
}

/// Predicted share of the success probability on edges at the special
/// vertices of set 1 and set 2.
pub fn bipartite_split(n1: usize, n2: usize, v1: usize, v2: usize) -> Result<(f64, f64)> {
    let (x1, x2) = bipartite_x(n1, n2, v1, v2);
    if x1 + x2 == 0.0 {
        return Err(WalkError::InvalidParameter("bipartite search needs at least one special vertex".into()));
    }
    Ok((x1 / (x1 + x2), x2 / (x1 + x2)))
}

/// Rotation angle per step of the M-partite search, `arccos(1 − 1/(MN))`.
pub fn mpartite_angle(m: usize, n: usize) -> f64 {
    (1.0 - 1.0 / (m * n) as f64).acos()
}

pub fn predicted_steps_mpartite(m: usize, n: usize) -> usize {
    (FRAC_PI_2 / mpartite_angle(m, n)).round() as usize
}

/// Approximate `(w1, …, w5)` amplitudes for large `M` and `N`.
pub fn closed_form_mpartite(m: usize, n: usize, steps: usize) -> [f64; 5] {
    let (s, c) = (steps as f64 * mpartite_angle(m, n)).sin_cos();
    [s / SQRT_2, -s / SQRT_2, 0.0, 0.0, c]
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    #[test]
    fn complete_angle_and_steps() {
        let theta = theta_complete(256, 1);
        assert!((theta.tan() - 509f64.sqrt() / 254.0).abs() < 1e-15);
        assert!((theta - 0.0886).abs() < 5e-5);
        assert_eq!(predicted_steps_complete(256, 1), 18);
        assert!((theta_complete(8, 1).tan() - 13f64.sqrt() / 6.0).abs() < 1e-15);
    }

    #[test]
    fn complete_closed_form_vanishes_off_special_edges() {
        let (n, v) = (4096, 3);
        let theta = theta_complete(n, v);
        let steps = FRAC_PI_2 / theta;
        // Evaluate exactly at θn = π/2 by continuing the formula.
        let w3 = 2.0 * ((v * (n - v - 1)) as f64).sqrt() * (steps * theta).cos() / (2.0 * ((n * v) as f64).sqrt());
        assert!(w3.abs() < 1e-12);
        let amps = closed_form_complete(n, v, predicted_steps_complete(n, v));
        assert!(amps[2].abs() < theta);
    }

    #[test]
    fn complete_step_scaling() {
        for n in [64, 128, 256, 512, 1024] {
            let ratio = predicted_steps_complete(4 * n, 1) as f64 / predicted_steps_complete(n, 1) as f64;
            assert!((1.9..=2.1).contains(&ratio), "N={n}: ratio {ratio}");
        }
    }

    #[test]
    fn bipartite_angle_forms_agree() {
        for (n1, n2) in [(8, 8), (16, 256), (64, 64), (100, 7)] {
            assert!((bipartite_theta(n1, n2, 1, 1) - bipartite_theta_single_specials(n1, n2)).abs() < 1e-15);
        }
    }

    #[test]
    fn bipartite_split_values() {
        assert_eq!(bipartite_split(64, 64, 1, 1).unwrap(), (0.5, 0.5));
        let (a, b) = bipartite_split(16, 256, 1, 1).unwrap();
        assert!((a - 256.0 / 272.0).abs() < 1e-15 && (b - 16.0 / 272.0).abs() < 1e-15);
        assert!(bipartite_split(4, 4, 0, 0).is_err());
        assert!(closed_form_bipartite(4, 4, 0, 0, 1).is_err());
    }

    #[test]
    fn bipartite_one_set_count_ignores_other_set() {
        let a = bipartite_two_step_count(64, 64, 1, 0).unwrap();
        let b = bipartite_two_step_count(64, 512, 1, 0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn bipartite_closed_form_reaches_special_edges() {
        let (n1, n2) = (1 << 16, 1 << 16);
        let theta = bipartite_theta(n1, n2, 1, 1);
        let k = (FRAC_PI_2 / theta).round() as usize;
        let amps = closed_form_bipartite(n1, n2, 1, 1, k).unwrap();
        assert!(amps[2].abs() < theta);
        assert!((amps[0].powi(2) + amps[1].powi(2) + amps[2].powi(2) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn mpartite_prediction() {
        assert_eq!(predicted_steps_mpartite(8, 16), 13);
        let angle = mpartite_angle(8, 16);
        let k = FRAC_PI_2 / angle;
        let (s, c) = (k * angle).sin_cos();
        assert!((s - 1.0).abs() < 1e-15 && c.abs() < 1e-15);
        let amps = closed_form_mpartite(8, 16, 0);
        assert_eq!(amps, [0.0, 0.0, 0.0, 0.0, 1.0]);
        let r = predicted_steps_mpartite(64, 64) as f64 / predicted_steps_mpartite(16, 16) as f64;
        assert!((r - 4.0).abs() < 0.2);
        assert!((mpartite_angle(1000, 1000) - (2e-6f64).sqrt()).abs() < 1e-9);
        let _ = PI;
    }
}
