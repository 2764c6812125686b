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

#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use scatterwalk::collapsed::{bipartite_model, complete_model, mpartite_model, verify_collapse, CollapsedModel};
use scatterwalk::graph::{bipartite_graph, complete_graph, mpartite_graph};
use scatterwalk::{Graph, Result};

pub const GRID_PHASES: [f64; 5] = [0.0, FRAC_PI_4, FRAC_PI_2, PI, 3.0 * FRAC_PI_2];

#[derive(Debug, Clone, Copy)]
pub enum Case {
    Complete(usize, usize),
    Bipartite(usize, usize, usize, usize),
    MPartite(usize, usize),
}

impl Case {
    pub fn graph(self) -> Result<Graph> {
        match self {
            Case::Complete(n, v) => complete_graph(n, v),
            Case::Bipartite(n1, n2, v1, v2) => bipartite_graph(n1, n2, v1, v2),
            Case::MPartite(m, n) => mpartite_graph(m, n, 1),
        }
    }

    pub fn model(self, phase: f64) -> Result<CollapsedModel> {
        match self {
            Case::Complete(n, v) => complete_model(n, v, phase),
            Case::Bipartite(n1, n2, v1, v2) => bipartite_model(n1, n2, v1, v2, phase),
            Case::MPartite(m, n) => mpartite_model(m, n, phase),
        }
    }
}

/// Complete `N ≤ 12, v ≤ 3`; bipartite `N1, N2 ≤ 8, v1, v2 ≤ 2`;
/// M-partite `M ≤ 5, N ≤ 4`.
pub fn small_grid() -> Vec<Case> {
    let mut cases = Vec::new();
    for n in 2..=12 {
        for v in 1..=3.min(n) {
            cases.push(Case::Complete(n, v));
        }
    }
    for n1 in 1..=8 {
        for n2 in 1..=8 {
            for v1 in 0..=2.min(n1) {
                for v2 in 0..=2.min(n2) {
                    if v1 + v2 > 0 {
                        cases.push(Case::Bipartite(n1, n2, v1, v2));
                    }
                }
            }
        }
    }
    for m in 2..=5 {
        for n in 1..=4 {
            cases.push(Case::MPartite(m, n));
        }
    }
    cases
}

/// Largest deviation between projected full evolution and collapsed
/// evolution over `steps` steps, and the largest residual outside the span.
pub fn collapse_deviation(case: Case, phase: f64, steps: usize) -> Result<(f64, f64)> {
    let report = verify_collapse(&case.model(phase)?, &case.graph()?, steps)?;
    Ok((report.max_abs_dev.max(report.transcription_dev), report.max_residual))
}
