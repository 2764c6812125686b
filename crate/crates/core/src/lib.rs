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

//! Scattering quantum walks on highly symmetric graphs.
//!
//! The walker lives on directed edge states `|m,l⟩` and scatters at every
//! vertex: normal vertices act like a Grover diffusion over their incident
//! edges, special vertices reflect with a phase `e^{iφ}`. The crate computes
//! the same walk three ways and checks them against each other:
//!
//! * [`walk`]: the full edge-space engine (implicit sparse step operator).
//! * [`collapsed`]: the walk restricted to the small subspace spanned by
//!   symmetric edge-class vectors, evolved by eigendecomposition, plus the
//!   large-graph asymptotic amplitudes.
//! * [`circuit`]: an oracle circuit on edge ⊗ vertex ⊗ ancilla registers
//!   that performs one walk step per pass.
//!
//! [`classical`] holds the blind and memory search baselines and [`search`]
//! drives the experiments (probability traces, optimal measurement step,
//! phase sweeps).

pub mod circuit;
pub mod classical;
pub mod collapsed;
pub mod error;
pub mod graph;
pub mod search;
pub mod tolerance;
pub mod walk;

pub use error::{Result, WalkError};
pub use graph::{DirectedEdge, EdgeIndex, Family, Graph};
pub use walk::{Criterion, ScatterCoeffs, StepOperator, WalkState};

/// Complex amplitude type used throughout the crate.
pub type C64 = num_complex::Complex64;

/// Largest modulus among complex entries.
pub fn max_modulus<'a>(entries: impl IntoIterator<Item = &'a C64>) -> f64 {
    entries.into_iter().map(|z| z.norm()).fold(0.0, f64::max)
}
