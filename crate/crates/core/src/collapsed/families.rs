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

//! Collapsed matrices of the three graph families.
//!
//! Each matrix is written out entry by entry from the single-step actions
//! `U|w_j⟩ = Σ_i c_ij |w_i⟩` (column `j` holds the image of `|w_j⟩`). The
//! first construction of each kind in a process re-derives the matrix from
//! the full-space engine on a small instance and refuses to continue on a
//! mismatch.

use std::f64::consts::PI;
use std::sync::OnceLock;

use nalgebra::DMatrix;

use super::{CollapsedBasisVector, CollapsedModel, ModelParams, Role};
use crate::error::{Result, WalkError};
use crate::graph::Family;
use crate::C64;

const SPECIAL: Role = Role::new(true, 0);
const NORMAL: Role = Role::new(false, 0);
const S1: Role = Role::new(true, 1);
const N1: Role = Role::new(false, 1);
const S2: Role = Role::new(true, 2);
const N2: Role = Role::new(false, 2);
const OUTER: Role = Role::new(false, 1);

/// Phase used for the build-time check; generic enough that no entry
/// vanishes by accident.
const CHECK_PHASE: f64 = 0.7;

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn ensure_checked(cell: &'static OnceLock<std::result::Result<f64, String>>, build: impl FnOnce() -> Result<f64>) -> Result<()> {
    cell.get_or_init(|| build().map_err(|e| e.to_string()))
        .as_ref()
        .map(|_| ())
        .map_err(|msg| WalkError::TranscriptionMismatch(msg.clone()))
}

/// Complete graph `K_N` with `v` special vertices; basis `(w1, w2, w3, w4)`
/// = (normal→special, special→normal, normal→normal, special→special).
/// `w4` is absent for `v = 1` and `w3` for `v = N − 1`.
pub fn complete_model(n: usize, v: usize, phase: f64) -> Result<CollapsedModel> {
    if n < 2 || v < 1 || v > n {
        return Err(WalkError::InvalidParameter(format!("complete model needs N ≥ 2 and 1 ≤ v ≤ N, got N={n}, v={v}")));
    }
    static CHECKED: OnceLock<std::result::Result<f64, String>> = OnceLock::new();
    ensure_checked(&CHECKED, || {
        let model = build_complete(7, 2, CHECK_PHASE);
        model.check_against_full(&model.graph()?)
    })?;
    Ok(build_complete(n, v, phase))
}

/// The full 4×4 matrix before empty classes are removed.
pub(crate) fn complete_matrix(n: usize, v: usize, phase: f64) -> (DMatrix<C64>, ModelParams) {
    let t = 2.0 / (n - 1) as f64;
    let r = 1.0 - t;
    let q = -r + t * (v as f64 - 1.0);
    // Equals t·√(v(N−v−1)); the product form avoids cancellation near |q| = 1.
    let s = ((1.0 - q) * (1.0 + q)).max(0.0).sqrt();
    let e = C64::from_polar(1.0, phase);
    let z = real(0.0);
    #[rustfmt::skip]
    let matrix = DMatrix::from_row_slice(4, 4, &[
        z, real(q), real(s),  z,
        e, z,       z,        z,
        z, real(s), real(-q), z,
        z, z,       z,        e,
    ]);
    (matrix, ModelParams::Complete { t, r, q, s })
}

fn build_complete(n: usize, v: usize, phase: f64) -> CollapsedModel {
    let (matrix, params) = complete_matrix(n, v, phase);
    let p = n - v;
    let basis = vec![
        CollapsedBasisVector::new("w1", NORMAL, SPECIAL, p * v),
        CollapsedBasisVector::new("w2", SPECIAL, NORMAL, v * p),
        CollapsedBasisVector::new("w3", NORMAL, NORMAL, p * p.saturating_sub(1)),
        CollapsedBasisVector::new("w4", SPECIAL, SPECIAL, v * (v - 1)),
    ];
    CollapsedModel::assemble(Family::Complete { n, v }, phase, basis, matrix, params, 1)
}

fn bipartite_params(n1: usize, n2: usize, v1: usize, v2: usize) -> ModelParams {
    let (p1, p2) = ((n1 - v1) as f64, (n2 - v2) as f64);
    let (v1f, v2f) = (v1 as f64, v2 as f64);
    // Normal vertices of set 1 have degree N2 and vice versa.
    let t1 = 2.0 / n2 as f64;
    let t2 = 2.0 / n1 as f64;
    let (r1, r2) = (1.0 - t1, 1.0 - t2);
    ModelParams::Bipartite {
        t1,
        r1,
        t2,
        r2,
        q1: -r1 + t1 * (v2f - 1.0),
        s1: t1 * (v2f * p2).sqrt(),
        q2: -r2 + t2 * (v1f - 1.0),
        s2: t2 * (v1f * p1).sqrt(),
        x1: 2.0 * v1f / n1 as f64,
        x2: 2.0 * v2f / n2 as f64,
    }
}

fn check_bipartite_counts(n1: usize, n2: usize, v1: usize, v2: usize) -> Result<()> {
    if n1 == 0 || n2 == 0 || v1 > n1 || v2 > n2 || v1 + v2 == 0 {
        return Err(WalkError::InvalidParameter(format!("invalid bipartite counts ({n1},{n2},{v1},{v2})")));
    }
    Ok(())
}

/// One-step model of the complete bipartite graph on
/// `(w01, w02, w11, w12, w13, w21, w22, w23)`. The `w0*` pair joins special
/// vertices of the two sets and decouples; `w1*` enter set 1, `w2*` enter
/// set 2. Empty classes are dropped.
pub fn bipartite_model(n1: usize, n2: usize, v1: usize, v2: usize, phase: f64) -> Result<CollapsedModel> {
    check_bipartite_counts(n1, n2, v1, v2)?;
    static CHECKED: OnceLock<std::result::Result<f64, String>> = OnceLock::new();
    ensure_checked(&CHECKED, || {
        let model = build_bipartite(5, 6, 2, 1, CHECK_PHASE);
        model.check_against_full(&model.graph()?)
    })?;
    Ok(build_bipartite(n1, n2, v1, v2, phase))
}

fn build_bipartite(n1: usize, n2: usize, v1: usize, v2: usize, phase: f64) -> CollapsedModel {
    let params = bipartite_params(n1, n2, v1, v2);
    let ModelParams::Bipartite { t1, r1, t2, r2, q1, s1, q2, s2, .. } = params else { unreachable!() };
    let (p1, p2) = (n1 - v1, n2 - v2);
    let e = C64::from_polar(1.0, phase);
    let mut m = DMatrix::zeros(8, 8);
    let (w01, w02, w11, w12, w13, w21, w22, w23) = (0, 1, 2, 3, 4, 5, 6, 7);
    m[(w02, w01)] = e;
    m[(w01, w02)] = e;
    m[(w21, w11)] = e;
    m[(w22, w12)] = real(q1);
    m[(w23, w12)] = real(s1);
    m[(w23, w13)] = real(t1 * (p2 as f64 - 1.0) - r1);
    m[(w22, w13)] = real(s1);
    m[(w11, w21)] = real(q2);
    m[(w13, w21)] = real(s2);
    m[(w12, w22)] = e;
    // Incoming edges of a normal set-2 vertex from normal set-1 vertices
    // number p1, so the reflection-plus-transmission weight uses p1 − 1.
    m[(w13, w23)] = real(t2 * (p1 as f64 - 1.0) - r2);
    m[(w11, w23)] = real(s2);
    let basis = vec![
        CollapsedBasisVector::new("w01", S2, S1, v1 * v2),
        CollapsedBasisVector::new("w02", S1, S2, v1 * v2),
        CollapsedBasisVector::new("w11", N2, S1, v1 * p2),
        CollapsedBasisVector::new("w12", S2, N1, v2 * p1),
        CollapsedBasisVector::new("w13", N2, N1, p1 * p2),
        CollapsedBasisVector::new("w21", S1, N2, v1 * p2),
        CollapsedBasisVector::new("w22", N1, S2, v2 * p1),
        CollapsedBasisVector::new("w23", N1, N2, p1 * p2),
    ];
    CollapsedModel::assemble(Family::Bipartite { n1, n2, v1, v2 }, phase, basis, m, params, 1)
}

/// Two-step model: `U²` restricted to the span of `(w21, w22, w23)` at
/// `φ = π`. One application of the matrix advances the walk by two steps.
pub fn bipartite_two_step_model(n1: usize, n2: usize, v1: usize, v2: usize, phase: f64) -> Result<CollapsedModel> {
    check_bipartite_counts(n1, n2, v1, v2)?;
    if (phase - PI).abs() > 1e-12 {
        return Err(WalkError::InvalidParameter(format!("two-step bipartite model requires φ = π, got {phase}")));
    }
    static CHECKED: OnceLock<std::result::Result<f64, String>> = OnceLock::new();
    ensure_checked(&CHECKED, || {
        let model = build_bipartite_two_step(5, 6, 2, 1);
        model.check_against_full(&model.graph()?)
    })?;
    Ok(build_bipartite_two_step(n1, n2, v1, v2))
}

fn build_bipartite_two_step(n1: usize, n2: usize, v1: usize, v2: usize) -> CollapsedModel {
    let params = bipartite_params(n1, n2, v1, v2);
    let ModelParams::Bipartite { q1, s1, q2, s2, .. } = params else { unreachable!() };
    #[rustfmt::skip]
    let matrix = DMatrix::from_row_slice(3, 3, &[
        real(-q2),      real(0.0), real(-s2),
        real(s1 * s2),  real(-q1), real(-q2 * s1),
        real(-q1 * s2), real(-s1), real(q1 * q2),
    ]);
    let (p1, p2) = (n1 - v1, n2 - v2);
    let basis = vec![
        CollapsedBasisVector::new("w21", S1, N2, v1 * p2),
        CollapsedBasisVector::new("w22", N1, S2, v2 * p1),
        CollapsedBasisVector::new("w23", N1, N2, p1 * p2),
    ];
    CollapsedModel::assemble(Family::Bipartite { n1, n2, v1, v2 }, PI, basis, matrix, params, 2)
}

/// Complete M-partite graph with one special vertex, basis
/// `(w1, …, w5)` = (into the special vertex, out of it, normal set-0
/// vertices → other sets, other sets → normal set-0 vertices, between
/// other sets). `w3`, `w4` vanish for `N = 1`.
pub fn mpartite_model(m: usize, n: usize, phase: f64) -> Result<CollapsedModel> {
    if m < 2 || n < 1 {
        return Err(WalkError::InvalidParameter(format!("M-partite model needs M ≥ 2 and N ≥ 1, got M={m}, N={n}")));
    }
    static CHECKED: OnceLock<std::result::Result<f64, String>> = OnceLock::new();
    ensure_checked(&CHECKED, || {
        let model = build_mpartite(4, 3, CHECK_PHASE);
        model.check_against_full(&model.graph()?)
    })?;
    Ok(build_mpartite(m, n, phase))
}

fn build_mpartite(m: usize, n: usize, phase: f64) -> CollapsedModel {
    let (mf, nf) = (m as f64, n as f64);
    let t = 2.0 / (nf * (mf - 1.0));
    let r = 1.0 - t;
    let e = C64::from_polar(1.0, phase);
    let mut u = DMatrix::zeros(5, 5);
    let (w1, w2, w3, w4, w5) = (0, 1, 2, 3, 4);
    u[(w2, w1)] = e;
    u[(w1, w2)] = real(-r);
    u[(w4, w2)] = real(t * (nf - 1.0).sqrt());
    u[(w5, w2)] = real(t * (nf * (mf - 2.0)).sqrt());
    u[(w1, w3)] = real(t * (nf - 1.0).sqrt());
    u[(w4, w3)] = real(-(nf * (mf - 3.0) + 2.0) / (nf * (mf - 1.0)));
    u[(w5, w3)] = real(t * (nf * (nf - 1.0) * (mf - 2.0)).sqrt());
    u[(w3, w4)] = real(1.0);
    u[(w1, w5)] = real(t * (nf * (mf - 2.0)).sqrt());
    u[(w4, w5)] = real(t * (nf * (nf - 1.0) * (mf - 2.0)).sqrt());
    u[(w5, w5)] = real((mf - 3.0) / (mf - 1.0));
    let outer = n * (m - 1);
    let basis = vec![
        CollapsedBasisVector::new("w1", OUTER, SPECIAL, outer),
        CollapsedBasisVector::new("w2", SPECIAL, OUTER, outer),
        CollapsedBasisVector::new("w3", NORMAL, OUTER, (n - 1) * outer),
        CollapsedBasisVector::new("w4", OUTER, NORMAL, (n - 1) * outer),
        // n² edges for each ordered pair of distinct outer sets.
        CollapsedBasisVector::new("w5", OUTER, OUTER, n * n * (m - 1) * (m - 2)),
    ];
    CollapsedModel::assemble(Family::MPartite { m, n, v: 1 }, phase, basis, u, ModelParams::MPartite { t, r }, 1)
}
