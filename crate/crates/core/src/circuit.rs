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

//! Oracle circuit realizing one walk step on
//! `edges ⊗ vertex register ⊗ ancilla`.
//!
//! The vertex register has `N + 1` slots; slot `N` is the reference state.
//! One step is `CW1 · O · CU_f · O · CW2`:
//!
//! * `CW2` copies the head of the edge into the vertex register,
//! * the oracle `O` XORs `f(vertex)` into the ancilla,
//! * `CU_f` scatters at the registered vertex with normal (`c = 0`) or
//!   special (`c = 1`) coefficients,
//! * the second oracle call uncomputes the ancilla,
//! * `CW1` returns the vertex register, now holding the tail of the edge,
//!   to the reference slot.

use serde::Serialize;

use crate::error::{Result, WalkError};
use crate::graph::{Family, Graph};
use crate::walk::{ScatterCoeffs, StepOperator, WalkState};
use crate::{tolerance, C64};

/// Marking function `f: vertex → {0, 1}`. The reference slot maps to 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleFunction {
    marks: Vec<bool>,
}

impl OracleFunction {
    /// `f(l) = 1` exactly on the special vertices of `g`.
    pub fn for_graph(g: &Graph) -> Self {
        OracleFunction { marks: (0..g.n_vertices()).map(|l| g.is_special(l)).collect() }
    }

    pub fn from_fn(n_vertices: usize, f: impl Fn(usize) -> bool) -> Self {
        OracleFunction { marks: (0..n_vertices).map(f).collect() }
    }

    /// `f(slot)`; slots at or beyond the vertex count, the reference slot
    /// included, give 0.
    pub fn eval(&self, slot: usize) -> u8 {
        u8::from(self.marks.get(slot).copied().unwrap_or(false))
    }

    pub fn marks_specials_of(&self, g: &Graph) -> bool {
        self.marks.len() == g.n_vertices() && (0..g.n_vertices()).all(|l| self.marks[l] == g.is_special(l))
    }
}

/// Amplitudes over `(edge, vertex slot, ancilla)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitState {
    amplitudes: Vec<C64>,
    edges: usize,
    slots: usize,
}

impl CircuitState {
    pub fn zeros(g: &Graph) -> Self {
        let slots = g.n_vertices() + 1;
        CircuitState { amplitudes: vec![C64::new(0.0, 0.0); g.dim() * slots * 2], edges: g.dim(), slots }
    }

    /// `ψ ⊗ |ref⟩ ⊗ |0⟩`.
    pub fn from_walk(psi: &WalkState, g: &Graph) -> Result<Self> {
        if psi.dim() != g.dim() {
            return Err(WalkError::DimensionMismatch { expected: g.dim(), actual: psi.dim() });
        }
        let mut state = Self::zeros(g);
        let reference = state.reference();
        for (e, a) in psi.amplitudes().iter().enumerate() {
            let i = state.offset(e, reference, 0);
            state.amplitudes[i] = *a;
        }
        Ok(state)
    }

    pub fn reference(&self) -> usize {
        self.slots - 1
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, edge: usize, slot: usize, ancilla: u8) -> C64 {
        self.amplitudes[self.offset(edge, slot, ancilla)]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Squared norm outside `|ref⟩ ⊗ |0⟩` on the ancilla registers.
    pub fn ancilla_residue(&self) -> f64 {
        let reference = self.reference();
        self.nonzero()
            .filter(|&(_, slot, anc, _)| slot != reference || anc != 0)
            .map(|(.., a)| a.norm_sqr())
            .fold(0.0, |acc, x| acc + x)
    }

    /// Edge register of a state whose ancillas are exactly `|ref⟩|0⟩`.
    pub fn to_walk(&self) -> Result<WalkState> {
        let residue = self.ancilla_residue();
        if residue != 0.0 {
            return Err(WalkError::DomainViolation(format!("ancillas not reset, residual weight {residue:e}")));
        }
        let reference = self.reference();
        WalkState::new((0..self.edges).map(|e| self.amplitude(e, reference, 0)).collect())
    }

    fn offset(&self, edge: usize, slot: usize, ancilla: u8) -> usize {
        (edge * self.slots + slot) * 2 + ancilla as usize
    }

    /// `(edge, slot, ancilla, amplitude)` for every nonzero entry.
    fn nonzero(&self) -> impl Iterator<Item = (usize, usize, u8, C64)> + '_ {
        let slots = self.slots;
        self.amplitudes.iter().enumerate().filter(|(_, a)| **a != C64::new(0.0, 0.0)).map(move |(i, a)| {
            let anc = (i % 2) as u8;
            let slot = (i / 2) % slots;
            (i / 2 / slots, slot, anc, *a)
        })
    }

    fn check_graph(&self, g: &Graph) -> Result<()> {
        if self.edges != g.dim() || self.slots != g.n_vertices() + 1 {
            return Err(WalkError::DimensionMismatch { expected: g.dim() * (g.n_vertices() + 1) * 2, actual: self.amplitudes.len() });
        }
        Ok(())
    }
}

/// Ancilla `^= f(vertex register)`. Involutive.
pub fn oracle_apply(s: &CircuitState, f: &OracleFunction) -> CircuitState {
    let mut out = s.clone();
    for e in 0..s.edges {
        for slot in 0..s.slots {
            if f.eval(slot) == 1 {
                let base = s.offset(e, slot, 0);
                out.amplitudes.swap(base, base + 1);
            }
        }
    }
    out
}

/// Swaps the reference slot with `target(edge)`, controlled on the edge.
fn controlled_swap(s: &CircuitState, target: impl Fn(usize) -> usize) -> CircuitState {
    let mut out = s.clone();
    let reference = s.reference();
    for e in 0..s.edges {
        let vertex = target(e);
        for anc in 0..2 {
            out.amplitudes.swap(s.offset(e, reference, anc), s.offset(e, vertex, anc));
        }
    }
    out
}

/// `|m,l⟩|ref⟩ → |m,l⟩|l⟩`.
pub fn cw2_apply(s: &CircuitState, g: &Graph) -> Result<CircuitState> {
    s.check_graph(g)?;
    let index = g.index();
    Ok(controlled_swap(s, |e| index.edge(e).to))
}

/// `|l,m⟩|l⟩ → |l,m⟩|ref⟩`.
pub fn cw1_apply(s: &CircuitState, g: &Graph) -> Result<CircuitState> {
    s.check_graph(g)?;
    let index = g.index();
    Ok(controlled_swap(s, |e| index.edge(e).from))
}

/// Scattering at the vertex held in the vertex register, with coefficients
/// picked by the ancilla. Defined only where the vertex register equals the
/// head of the edge.
pub fn cuf_apply(s: &CircuitState, g: &Graph, phase: f64) -> Result<CircuitState> {
    s.check_graph(g)?;
    let index = g.index();
    for (e, slot, anc, _) in s.nonzero() {
        let edge = index.edge(e);
        if slot != edge.to {
            return Err(WalkError::DomainViolation(format!(
                "CU_f needs the vertex register at the edge head; edge ({}, {}) has slot {slot}, ancilla {anc}",
                edge.from, edge.to
            )));
        }
    }
    let mut out = CircuitState::zeros(g);
    for l in 0..g.n_vertices() {
        let degree = g.degree(l);
        if degree == 0 {
            continue;
        }
        for anc in 0..2u8 {
            let ScatterCoeffs { r, t } = if anc == 0 { ScatterCoeffs::normal(degree) } else { ScatterCoeffs::special(phase) };
            let outgoing = index.outgoing(l);
            let incoming = |pos: usize| s.amplitude(index.reverse_of(pos), l, anc);
            let total: C64 = outgoing.clone().map(incoming).sum();
            for pos in outgoing {
                let i = out.offset(pos, l, anc);
                out.amplitudes[i] = total * t - (r + t) * incoming(pos);
            }
        }
    }
    Ok(out)
}

/// Circuit for one graph and phase, counting oracle queries.
#[derive(Debug, Clone)]
pub struct Circuit<'g> {
    graph: &'g Graph,
    phase: f64,
    oracle: OracleFunction,
    oracle_calls: usize,
}

impl<'g> Circuit<'g> {
    pub fn new(graph: &'g Graph, phase: f64) -> Self {
        Circuit { graph, phase, oracle: OracleFunction::for_graph(graph), oracle_calls: 0 }
    }

    pub fn with_oracle(graph: &'g Graph, phase: f64, oracle: OracleFunction) -> Result<Self> {
        if !oracle.marks_specials_of(graph) {
            return Err(WalkError::InvalidArgument("oracle must mark exactly the special vertices".into()));
        }
        Ok(Circuit { graph, phase, oracle, oracle_calls: 0 })
    }

    pub fn oracle_calls(&self) -> usize {
        self.oracle_calls
    }

    pub fn query(&mut self, s: &CircuitState) -> CircuitState {
        self.oracle_calls += 1;
        oracle_apply(s, &self.oracle)
    }

    pub fn step(&mut self, s: &CircuitState) -> Result<CircuitState> {
        let s = cw2_apply(s, self.graph)?;
        let s = self.query(&s);
        let s = cuf_apply(&s, self.graph, self.phase)?;
        let s = self.query(&s);
        cw1_apply(&s, self.graph)
    }

    pub fn run(&mut self, s: &CircuitState, steps: usize) -> Result<CircuitState> {
        let mut current = s.clone();
        for _ in 0..steps {
            current = self.step(&current)?;
        }
        Ok(current)
    }
}

/// Outcome of comparing circuit and walk evolution.
#[derive(Debug, Clone, Serialize)]
pub struct CircuitReport {
    pub family: String,
    pub params: Option<Family>,
    pub phi: f64,
    pub steps: usize,
    pub max_abs_dev: f64,
    pub oracle_calls: usize,
    pub ancilla_residue: f64,
    pub max_norm_drift: f64,
    pub passed: bool,
}

/// Deterministic state with unequal moduli and phases on every edge.
pub fn probe_state(g: &Graph) -> Result<WalkState> {
    WalkState::normalized(
        (0..g.dim()).map(|j| C64::from_polar(1.0 + (j % 7) as f64, 0.37 * j as f64 + 0.11 * (j % 3) as f64)).collect(),
    )
}

/// Runs `steps` circuit passes and `steps` walk steps from `psi`, comparing
/// after every step.
pub fn verify_circuit(g: &Graph, phase: f64, psi: &WalkState, steps: usize) -> Result<CircuitReport> {
    let op = StepOperator::new(g, phase);
    let mut circuit = Circuit::new(g, phase);
    let mut state = CircuitState::from_walk(psi, g)?;
    let mut walk = psi.clone();
    let (mut max_abs_dev, mut ancilla_residue, mut max_norm_drift) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..steps {
        state = circuit.step(&state)?;
        walk = op.apply_step(&walk)?;
        max_norm_drift = max_norm_drift.max((state.norm_sqr() - 1.0).abs());
        ancilla_residue = ancilla_residue.max(state.ancilla_residue());
        let reference = state.reference();
        let dev = (0..g.dim()).map(|e| (state.amplitude(e, reference, 0) - walk.amplitudes()[e]).norm()).fold(0.0, f64::max);
        max_abs_dev = max_abs_dev.max(dev);
    }
    let oracle_calls = circuit.oracle_calls();
    let passed = max_abs_dev <= tolerance::CIRCUIT
        && ancilla_residue == 0.0
        && max_norm_drift <= tolerance::CIRCUIT
        && oracle_calls == 2 * steps;
    Ok(CircuitReport {
        family: g.family().map_or("custom", |f| f.name()).to_string(),
        params: g.family(),
        phi: phase,
        steps,
        max_abs_dev,
        oracle_calls,
        ancilla_residue,
        max_norm_drift,
        passed,
    })
}
