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

//! Numerical tolerances shared by the engines and their checks.

/// Allowed deviation of `Σ|a|²` from one for a walk state.
pub const NORM: f64 = 1e-10;

/// Entrywise bound on `U†U − 1` for a materialized step operator.
pub const UNITARITY: f64 = 1e-12;

/// Agreement between full-space and collapsed evolution.
pub const COLLAPSE: f64 = 1e-10;

/// Agreement between the oracle circuit and the walk engine.
pub const CIRCUIT: f64 = 1e-12;

/// Largest off-diagonal Schur entry still treated as a diagonalizable
/// (normal) matrix.
pub const SCHUR_OFF_DIAGONAL: f64 = 1e-9;

/// Default cap on `2|E|` for dense materialization.
pub const DENSE_DIM_CAP: usize = 20_000;

/// Residual below which a state counts as lying in a collapsed span.
pub const SPAN_RESIDUAL: f64 = 1e-8;

/// Leakage tolerated by the two-step bipartite model (the decoupled
/// special-to-special pair).
pub const TWO_STEP_LEAKAGE: f64 = 0.1;
