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

mod common;

use std::f64::consts::{FRAC_PI_2, PI};

use common::{collapse_deviation, small_grid, Case};
use scatterwalk::collapsed::{bipartite_two_step_model, closed_form_complete, complete_model};
use scatterwalk::graph::bipartite_graph;
use scatterwalk::walk::bipartite_entering_state;
use scatterwalk::StepOperator;

#[test]
fn collapsed_evolution_matches_full_space_on_small_grid() {
    let mut worst = (0.0f64, 0.0f64);
    for case in small_grid() {
        for phase in [PI, FRAC_PI_2] {
            let (dev, residual) = collapse_deviation(case, phase, 50).unwrap();
            assert!(dev <= 1e-10 && residual <= 1e-10, "{case:?} φ={phase}: dev {dev:e}, residual {residual:e}");
            worst = (worst.0.max(dev), worst.1.max(residual));
        }
    }
    eprintln!("worst deviation {:e}, worst residual {:e}", worst.0, worst.1);
}

#[test]
fn transcribed_matrices_equal_projected_operator() {
    for case in [Case::Complete(9, 2), Case::Bipartite(4, 7, 2, 1), Case::MPartite(5, 3), Case::MPartite(2, 4)] {
        let model = case.model(0.9).unwrap();
        let deviation = model.check_against_full(&case.graph().unwrap()).unwrap();
        assert!(deviation < 1e-12, "{case:?}: {deviation:e}");
    }
}

#[test]
fn two_step_model_tracks_entering_state() {
    let (n1, n2) = (6, 8);
    let g = bipartite_graph(n1, n2, 1, 1).unwrap();
    let model = bipartite_two_step_model(n1, n2, 1, 1, PI).unwrap();
    let psi = bipartite_entering_state(&g, 2).unwrap();
    let start = model.project(&psi, &g).unwrap();
    // only the edge between the two special vertices is outside the span
    assert!((start.residual - (1.0 / (n1 * n2) as f64).sqrt()).abs() < 1e-12);
    let op = StepOperator::new(&g, PI);
    for applications in 0..10 {
        let full = model.project(&op.evolve(&psi, 2 * applications).unwrap(), &g).unwrap();
        let (collapsed, _) = model.evolve(&start.components, applications).unwrap();
        let dev = (full.components - collapsed).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(dev <= 2.0 * start.residual, "application {applications}: {dev:e}");
    }
}

#[test]
fn closed_form_tracks_collapsed_evolution() {
    let (n, v) = (256, 1);
    let model = complete_model(n, v, PI).unwrap();
    let c0 = model.uniform_components();
    let w1 = model.label_position("w1").unwrap();
    let w2 = model.label_position("w2").unwrap();
    let w3 = model.label_position("w3").unwrap();
    let bound = 1.0 / (n as f64).sqrt();
    for steps in 0..=36 {
        let (c, _) = model.evolve(&c0, steps).unwrap();
        let approx = closed_form_complete(n, v, steps);
        for (pos, a) in [(w1, approx[0]), (w2, approx[1]), (w3, approx[2])] {
            assert!((c[pos].re - a).abs() <= bound && c[pos].im.abs() < 1e-12, "step {steps}");
        }
        assert!((c[w3].re - approx[2]).abs() <= 0.02, "step {steps}");
        let p_exact = c[w1].norm_sqr() + c[w2].norm_sqr();
        let p_approx = approx[0].powi(2) + approx[1].powi(2);
        assert!((p_exact - p_approx).abs() <= 0.02, "step {steps}: {p_exact} vs {p_approx}");
    }
}
