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

//! Search experiments: probability traces, the optimal number of steps
//! before measuring, phase sweeps over the complete graph and the collapsed
//! fast path.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classical::{blind_average, memory_average, ClassicalSearchSpec, Variant};
use crate::collapsed::{complete_model, theta_complete, CollapsedModel};
use crate::error::{Result, WalkError};
use crate::graph::{complete_graph, Family, Graph};
use crate::walk::{bipartite_entering_state, success_probability, uniform_initial_state, Criterion, StepOperator, WalkState};
use crate::{tolerance, C64};

/// Starting state of a search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    #[default]
    Uniform,
    /// Bipartite only: uniform over edges whose head is in the given set.
    Entering(u8),
}

impl InitialState {
    pub fn prepare(self, g: &Graph) -> Result<WalkState> {
        match self {
            InitialState::Uniform => uniform_initial_state(g),
            InitialState::Entering(set) => bipartite_entering_state(g, set),
        }
    }
}

/// What one repetition of "walk m steps, then measure" costs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CostModel {
    /// `m` steps; `m = 0` is excluded.
    #[default]
    WalkOnly,
    /// `m + 1`: the measurement counts as a step.
    WalkPlusMeasure,
}

impl CostModel {
    fn cost(self, steps: usize) -> f64 {
        match self {
            CostModel::WalkOnly => steps as f64,
            CostModel::WalkPlusMeasure => steps as f64 + 1.0,
        }
    }

    fn first_step(self) -> usize {
        match self {
            CostModel::WalkOnly => 1,
            CostModel::WalkPlusMeasure => 0,
        }
    }
}

impl FromStr for CostModel {
    type Err = WalkError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "walk-only" | "walkonly" => Ok(CostModel::WalkOnly),
            "walk-plus-measure" | "walkplusmeasure" => Ok(CostModel::WalkPlusMeasure),
            other => Err(WalkError::InvalidArgument(format!("unknown cost model '{other}'"))),
        }
    }
}

impl fmt::Display for CostModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CostModel::WalkOnly => "walk-only",
            CostModel::WalkPlusMeasure => "walk-plus-measure",
        })
    }
}

/// Success probabilities under all three criteria. Entry `i` belongs to walk
/// step `i · stride`; the stride is 2 for traces from a two-step model.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ProbabilityTrace {
    pub incident: Vec<f64>,
    pub entering: Vec<f64>,
    pub leaving: Vec<f64>,
    pub stride: usize,
}

impl ProbabilityTrace {
    fn with_capacity(len: usize, stride: usize) -> Self {
        ProbabilityTrace {
            incident: Vec::with_capacity(len),
            entering: Vec::with_capacity(len),
            leaving: Vec::with_capacity(len),
            stride,
        }
    }

    fn push(&mut self, p: impl Fn(Criterion) -> f64) {
        self.incident.push(p(Criterion::Incident));
        self.entering.push(p(Criterion::Entering));
        self.leaving.push(p(Criterion::Leaving));
    }

    pub fn get(&self, criterion: Criterion) -> &[f64] {
        match criterion {
            Criterion::Incident => &self.incident,
            Criterion::Entering => &self.entering,
            Criterion::Leaving => &self.leaving,
        }
    }

    pub fn len(&self) -> usize {
        self.incident.len()
    }

    pub fn is_empty(&self) -> bool {
        self.incident.is_empty()
    }

    /// Walk step of entry `i`.
    pub fn step(&self, i: usize) -> usize {
        i * self.stride
    }

    /// Largest entry-wise difference over all criteria.
    pub fn max_abs_diff(&self, other: &ProbabilityTrace) -> f64 {
        Criterion::ALL
            .iter()
            .flat_map(|&c| self.get(c).iter().zip(other.get(c)).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max)
    }

    /// Columns `step,p_incident,p_entering,p_leaving`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["step", "p_incident", "p_entering", "p_leaving"])?;
        for i in 0..self.len() {
            w.write_record(&[
                self.step(i).to_string(),
                self.incident[i].to_string(),
                self.entering[i].to_string(),
                self.leaving[i].to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `P(m)` for `m = 0..=m_max` from full edge-space evolution.
pub fn probability_trace(g: &Graph, phase: f64, m_max: usize, init: InitialState) -> Result<ProbabilityTrace> {
    let psi = init.prepare(g)?;
    trace_from(g, phase, &psi, m_max)
}

pub fn trace_from(g: &Graph, phase: f64, psi: &WalkState, m_max: usize) -> Result<ProbabilityTrace> {
    let mut trace = ProbabilityTrace::with_capacity(m_max + 1, 1);
    StepOperator::new(g, phase).for_each_step(psi, m_max, |_, state| trace.push(|c| success_probability(state, g, c)))?;
    Ok(trace)
}

/// `(1 − P)^{k−1} P`; zero for `k = 0`.
pub fn repetition_pmf(p: f64, k: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(WalkError::InvalidParameter(format!("probability {p} outside [0, 1]")));
    }
    Ok(if k == 0 { 0.0 } else { (1.0 - p).powi(k as i32 - 1) * p })
}

/// Mean of the geometric law, `1/P`; infinite when `P = 0`.
pub fn expected_repetitions(p: f64) -> f64 {
    if p > 0.0 {
        1.0 / p
    } else {
        f64::INFINITY
    }
}

/// Minimizes `cost(m) / P(m)` over the trace; ties go to the smaller `m`.
/// Returns `(m_opt, n_bar)`.
pub fn optimal_steps(trace: &[f64], cost: CostModel) -> Result<(usize, f64)> {
    optimal_strided(trace, cost, 1)
}

fn optimal_strided(trace: &[f64], cost: CostModel, stride: usize) -> Result<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &p) in trace.iter().enumerate() {
        let m = i * stride;
        if m < cost.first_step() || p <= 0.0 {
            continue;
        }
        let n_bar = cost.cost(m) / p;
        if best.is_none_or(|(_, b)| n_bar < b) {
            best = Some((m, n_bar));
        }
    }
    best.ok_or_else(|| WalkError::NoSolution(format!("no step with nonzero success probability under {cost}")))
}

/// Step and value of the first major maximum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Peak {
    pub step: usize,
    pub probability: f64,
}

/// Maximum of the first stretch where the trace stays at or above half its
/// global maximum. Later revivals are ignored. `None` for an all-zero trace.
pub fn first_peak(trace: &[f64]) -> Option<Peak> {
    let top = trace.iter().copied().fold(0.0, f64::max);
    if top <= 0.0 {
        return None;
    }
    let start = trace.iter().position(|&p| p >= top / 2.0)?;
    let end = trace[start..].iter().position(|&p| p < top / 2.0).map_or(trace.len(), |k| start + k);
    let (step, probability) = (start..end).map(|i| (i, trace[i])).fold((start, trace[start]), |b, x| if x.1 > b.1 { x } else { b });
    Some(Peak { step, probability })
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchOutcome {
    pub criterion: Criterion,
    pub cost_model: CostModel,
    pub trace: ProbabilityTrace,
    pub m_opt: usize,
    pub n_bar: f64,
    /// `1/P(0)`: cost of measuring without walking.
    pub measure_only: f64,
    pub peak: Peak,
}

impl SearchOutcome {
    pub fn new(trace: ProbabilityTrace, criterion: Criterion, cost_model: CostModel) -> Result<Self> {
        let p = trace.get(criterion);
        let (m_opt, n_bar) = optimal_strided(p, cost_model, trace.stride)?;
        let peak = first_peak(p).expect("nonzero trace has a peak");
        let peak = Peak { step: trace.step(peak.step), probability: peak.probability };
        let measure_only = p.first().map_or(f64::INFINITY, |&p0| expected_repetitions(p0));
        Ok(SearchOutcome { criterion, cost_model, trace, m_opt, n_bar, measure_only, peak })
    }
}

/// `Mⁿ c0` probabilities for `n = 0..=m_max` inside a collapsed model.
pub fn collapsed_trace(model: &CollapsedModel, c0: &DVector<C64>, m_max: usize) -> Result<ProbabilityTrace> {
    let norm = c0.norm_squared();
    if (norm - 1.0).abs() > tolerance::NORM {
        return Err(WalkError::NotNormalized(norm));
    }
    trace_in_model(model, c0, m_max)
}

fn trace_in_model(model: &CollapsedModel, c0: &DVector<C64>, m_max: usize) -> Result<ProbabilityTrace> {
    let mut trace = ProbabilityTrace::with_capacity(m_max + 1, model.step_multiplicity());
    for n in 0..=m_max {
        let (c, _) = model.evolve(c0, n)?;
        trace.push(|crit| model.probability(&c, crit));
    }
    Ok(trace)
}

/// Collapsed trace together with the part of the initial state the span
/// misses.
#[derive(Debug, Clone, Serialize)]
pub struct FastTrace {
    pub trace: ProbabilityTrace,
    pub residual: f64,
}

impl FastTrace {
    /// Bound on the deviation from the full-space trace: `2·residual²`,
    /// zero for an exact span.
    pub fn error_bound(&self) -> f64 {
        2.0 * self.residual * self.residual
    }
}

/// Projects `psi` onto the model and evolves the components. Refuses when
/// the residual exceeds `1e-8`, or the leakage allowance for two-step
/// models.
pub fn collapsed_fast_trace(model: &CollapsedModel, psi: &WalkState, g: &Graph, m_max: usize) -> Result<FastTrace> {
    let projection = model.project(psi, g)?;
    let limit = if model.step_multiplicity() > 1 { tolerance::TWO_STEP_LEAKAGE } else { tolerance::SPAN_RESIDUAL };
    if projection.residual > limit {
        return Err(WalkError::ResidualTooLarge { residual: projection.residual, limit });
    }
    Ok(FastTrace { trace: trace_in_model(model, &projection.components, m_max)?, residual: projection.residual })
}

/// Probability of finding the walker on an edge at a special vertex of set
/// 1 and of set 2. An edge joining two specials counts for both.
pub fn bipartite_set_probabilities(psi: &WalkState, g: &Graph) -> Result<(f64, f64)> {
    let Some(Family::Bipartite { n1, .. }) = g.family() else {
        return Err(WalkError::InvalidFamily { expected: "bipartite" });
    };
    let (mut p1, mut p2) = (0.0, 0.0);
    for (e, a) in g.index().edges().iter().zip(psi.amplitudes()) {
        let specials = [e.from, e.to].into_iter().filter(|&x| g.is_special(x));
        let (mut in1, mut in2) = (false, false);
        for x in specials {
            if x < n1 {
                in1 = true;
            } else {
                in2 = true;
            }
        }
        if in1 {
            p1 += a.norm_sqr();
        }
        if in2 {
            p2 += a.norm_sqr();
        }
    }
    Ok((p1, p2))
}

/// `(p1, p2) / (p1 + p2)`.
pub fn bipartite_split_of(psi: &WalkState, g: &Graph) -> Result<(f64, f64)> {
    let (p1, p2) = bipartite_set_probabilities(psi, g)?;
    if p1 + p2 <= 0.0 {
        return Err(WalkError::NoSolution("no weight at any special vertex".into()));
    }
    Ok((p1 / (p1 + p2), p2 / (p1 + p2)))
}

/// `k · 2π / points` for `k = 0..points`.
pub fn phase_grid(points: usize) -> Vec<f64> {
    (0..points).map(|k| k as f64 * TAU / points as f64).collect()
}

pub const DEFAULT_PHASE_POINTS: usize = 128;

/// `4 · ⌈π / (2θ)⌉` for the complete graph.
pub fn default_m_max(n: usize, v: usize) -> usize {
    4 * (PI / (2.0 * theta_complete(n, v))).ceil() as usize
}

/// Default cap on full-space work, in edge-state updates.
pub const DEFAULT_WORK_CAP: f64 = 2e9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMethod {
    Full,
    #[default]
    Collapsed,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepConfig {
    pub n: usize,
    pub v: usize,
    pub phis: Vec<f64>,
    pub m_max: usize,
    pub method: SweepMethod,
    pub work_cap: f64,
}

impl SweepConfig {
    pub fn new(n: usize, v: usize) -> Self {
        SweepConfig {
            n,
            v,
            phis: phase_grid(DEFAULT_PHASE_POINTS),
            m_max: default_m_max(n, v),
            method: SweepMethod::default(),
            work_cap: DEFAULT_WORK_CAP,
        }
    }
}

/// `P(φ, m)` on the complete graph from the uniform initial state.
#[derive(Debug, Clone, Serialize)]
pub struct SweepGrid {
    pub n: usize,
    pub v: usize,
    pub phis: Vec<f64>,
    pub m_max: usize,
    pub traces: Vec<ProbabilityTrace>,
}

/// Optimal step count at one phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RidgePoint {
    pub phi: f64,
    pub m_opt: usize,
    pub n_bar: f64,
    pub p_opt: f64,
    pub measure_only: f64,
}

pub fn phase_sweep(config: &SweepConfig) -> Result<SweepGrid> {
    let SweepConfig { n, v, m_max, .. } = *config;
    if v == 0 || v >= n {
        return Err(WalkError::InvalidParameter(format!("phase sweep needs 1 ≤ v < N, got N={n}, v={v}")));
    }
    let traces = match config.method {
        SweepMethod::Full => {
            let g = complete_graph(n, v)?;
            let work = config.phis.len() as f64 * (m_max + 1) as f64 * g.dim() as f64;
            if work > config.work_cap {
                return Err(WalkError::ResourceCap { work, cap: config.work_cap });
            }
            let psi = uniform_initial_state(&g)?;
            config.phis.par_iter().map(|&phi| trace_from(&g, phi, &psi, m_max)).collect::<Result<Vec<_>>>()?
        }
        SweepMethod::Collapsed => config
            .phis
            .par_iter()
            .map(|&phi| {
                let model = complete_model(n, v, phi)?;
                collapsed_trace(&model, &model.uniform_components(), m_max)
            })
            .collect::<Result<Vec<_>>>()?,
    };
    Ok(SweepGrid { n, v, phis: config.phis.clone(), m_max, traces })
}

impl SweepGrid {
    pub fn p(&self, phi_index: usize, m: usize, criterion: Criterion) -> f64 {
        self.traces[phi_index].get(criterion)[m]
    }

    /// Optimal step count per phase.
    pub fn ridge(&self, criterion: Criterion, cost: CostModel) -> Result<Vec<RidgePoint>> {
        self.phis
            .iter()
            .zip(&self.traces)
            .map(|(&phi, trace)| {
                let p = trace.get(criterion);
                let (m_opt, n_bar) = optimal_steps(p, cost)?;
                Ok(RidgePoint { phi, m_opt, n_bar, p_opt: p[m_opt], measure_only: expected_repetitions(p[0]) })
            })
            .collect()
    }

    /// `(φ index, m, P)` of the largest entry; the first one on ties.
    pub fn global_max(&self, criterion: Criterion) -> (usize, usize, f64) {
        let mut best = (0, 0, f64::NEG_INFINITY);
        for (i, trace) in self.traces.iter().enumerate() {
            for (m, &p) in trace.get(criterion).iter().enumerate() {
                if p > best.2 {
                    best = (i, m, p);
                }
            }
        }
        best
    }

    /// Index of the grid phase equal to `2π − φ_i` modulo `2π`.
    pub fn mirror_index(&self, i: usize) -> Option<usize> {
        let target = (TAU - self.phis[i]).rem_euclid(TAU);
        self.phis.iter().position(|&phi| {
            let d = (phi - target).rem_euclid(TAU);
            d.min(TAU - d) < 1e-9
        })
    }

    /// Largest `|P(φ, m) − P(2π − φ, m)|` over mirrored pairs in the grid.
    pub fn symmetry_defect(&self, criterion: Criterion) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.phis.len() {
            if let Some(j) = self.mirror_index(i) {
                for (a, b) in self.traces[i].get(criterion).iter().zip(self.traces[j].get(criterion)) {
                    worst = worst.max((a - b).abs());
                }
            }
        }
        worst
    }

    /// Columns `phi,m,p_incident,p_entering,p_leaving`, ordered by phase
    /// then step.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["phi", "m", "p_incident", "p_entering", "p_leaving"])?;
        for (phi, trace) in self.phis.iter().zip(&self.traces) {
            for m in 0..trace.len() {
                w.write_record(&[
                    phi.to_string(),
                    m.to_string(),
                    trace.incident[m].to_string(),
                    trace.entering[m].to_string(),
                    trace.leaving[m].to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Average steps to success against phase, with classical references.
#[derive(Debug, Clone, Serialize)]
pub struct PhaseCurve {
    pub criterion: Criterion,
    pub cost_model: CostModel,
    pub points: Vec<RidgePoint>,
    pub blind_average: f64,
    pub memory_average: f64,
}

pub fn average_vs_phase(grid: &SweepGrid, criterion: Criterion, cost: CostModel) -> Result<PhaseCurve> {
    let points = grid.ridge(criterion, cost)?;
    let blind = ClassicalSearchSpec::new(grid.n, grid.v, Variant::Blind)?;
    let memory = ClassicalSearchSpec::new(grid.n, grid.v, Variant::Memory)?;
    Ok(PhaseCurve {
        criterion,
        cost_model: cost,
        points,
        blind_average: blind_average(&blind),
        memory_average: memory_average(&memory),
    })
}

impl PhaseCurve {
    /// The point with the smallest `n̄`; the first one on ties.
    pub fn minimum(&self) -> Option<&RidgePoint> {
        self.points.iter().fold(None, |best: Option<&RidgePoint>, p| match best {
            Some(b) if b.n_bar <= p.n_bar => Some(b),
            _ => Some(p),
        })
    }

    /// Columns `phi,m_opt,n_bar,p_opt,measure_only,blind_avg,memory_avg`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["phi", "m_opt", "n_bar", "p_opt", "measure_only", "blind_avg", "memory_avg"])?;
        for p in &self.points {
            w.write_record(&[
                p.phi.to_string(),
                p.m_opt.to_string(),
                p.n_bar.to_string(),
                p.p_opt.to_string(),
                p.measure_only.to_string(),
                self.blind_average.to_string(),
                self.memory_average.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}
