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

//! Full edge-space scattering walk.
//!
//! A vertex `l` maps every incoming edge state `|k,l⟩` to
//! `−r|l,k⟩ + t Σ_{m ∈ Γ(l;k)} |l,m⟩`. Normal vertices use `t = 2/deg`,
//! `r = 1 − t`; special vertices use `r = −e^{iφ}`, `t = 0`.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WalkError};
use crate::graph::{Family, Graph};
use crate::{tolerance, C64};

/// Which edges count as "found the special vertex" on measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    /// Either endpoint is special.
    #[default]
    Incident,
    /// The head (`to`) is special.
    Entering,
    /// The tail (`from`) is special.
    Leaving,
}

impl Criterion {
    pub const ALL: [Criterion; 3] = [Criterion::Incident, Criterion::Entering, Criterion::Leaving];

    /// Whether an edge with the given endpoint flags is a hit.
    pub fn accepts(self, tail_special: bool, head_special: bool) -> bool {
        match self {
            Criterion::Incident => tail_special || head_special,
            Criterion::Entering => head_special,
            Criterion::Leaving => tail_special,
        }
    }
}

impl FromStr for Criterion {
    type Err = WalkError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "incident" => Ok(Criterion::Incident),
            "entering" => Ok(Criterion::Entering),
            "leaving" => Ok(Criterion::Leaving),
            other => Err(WalkError::InvalidArgument(format!("unknown criterion '{other}'"))),
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Criterion::Incident => "incident",
            Criterion::Entering => "entering",
            Criterion::Leaving => "leaving",
        })
    }
}

/// Local reflection and transmission amplitudes of one vertex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterCoeffs {
    pub r: C64,
    pub t: f64,
}

impl ScatterCoeffs {
    /// Grover-like scattering at a normal vertex of the given degree.
    pub fn normal(degree: usize) -> Self {
        let t = 2.0 / degree as f64;
        ScatterCoeffs { r: C64::new(1.0 - t, 0.0), t }
    }

    /// Full reflection with phase `e^{iφ}`.
    pub fn special(phase: f64) -> Self {
        ScatterCoeffs { r: -C64::from_polar(1.0, phase), t: 0.0 }
    }
}

/// Coefficients of vertex `l` for phase `phase`.
pub fn scatter_coeffs(g: &Graph, l: usize, phase: f64) -> Result<ScatterCoeffs> {
    let degree = g.neighbors(l)?.len();
    if degree == 0 {
        return Err(WalkError::InvalidGraph(format!("vertex {l} is isolated")));
    }
    Ok(if g.is_special(l) { ScatterCoeffs::special(phase) } else { ScatterCoeffs::normal(degree) })
}

/// Normalized amplitude vector over the canonical edge basis.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkState {
    amplitudes: Vec<C64>,
}

impl WalkState {
    /// Wraps amplitudes, rejecting vectors whose norm is off by more than
    /// [`tolerance::NORM`].
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let norm = norm_sqr(&amplitudes);
        if (norm - 1.0).abs() > tolerance::NORM {
            return Err(WalkError::NotNormalized(norm));
        }
        Ok(WalkState { amplitudes })
    }

    /// Normalizes a nonzero vector.
    pub fn normalized(mut amplitudes: Vec<C64>) -> Result<Self> {
        let norm = norm_sqr(&amplitudes).sqrt();
        if norm == 0.0 {
            return Err(WalkError::InvalidArgument("cannot normalize the zero vector".into()));
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Ok(WalkState { amplitudes })
    }

    /// Canonical basis vector `|e_position⟩`.
    pub fn basis(dim: usize, position: usize) -> Self {
        let mut amplitudes = vec![C64::new(0.0, 0.0); dim];
        amplitudes[position] = C64::new(1.0, 0.0);
        WalkState { amplitudes }
    }

    pub(crate) fn from_raw(amplitudes: Vec<C64>) -> Self {
        WalkState { amplitudes }
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amplitudes)
    }

    /// Largest `|a_i − b_i|`.
    pub fn max_abs_diff(&self, other: &WalkState) -> f64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn conj(&self) -> WalkState {
        WalkState { amplitudes: self.amplitudes.iter().map(C64::conj).collect() }
    }

    /// Writes `from,to,re,im` rows in canonical order.
    pub fn write_csv<W: Write>(&self, g: &Graph, out: W) -> Result<()> {
        if self.dim() != g.dim() {
            return Err(WalkError::DimensionMismatch { expected: g.dim(), actual: self.dim() });
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["from", "to", "re", "im"])?;
        for (e, a) in g.index().edges().iter().zip(&self.amplitudes) {
            w.write_record([e.from.to_string(), e.to.to_string(), a.re.to_string(), a.im.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(C64::norm_sqr).sum()
}

/// Equal superposition of every edge state.
pub fn uniform_initial_state(g: &Graph) -> Result<WalkState> {
    if g.dim() == 0 {
        return Err(WalkError::InvalidGraph("graph has no edges".into()));
    }
    let a = C64::new(1.0 / (g.dim() as f64).sqrt(), 0.0);
    Ok(WalkState { amplitudes: vec![a; g.dim()] })
}

/// Equal superposition of the edge states whose head lies in set 1 or 2 of
/// a bipartite graph.
pub fn bipartite_entering_state(g: &Graph, target_set: u8) -> Result<WalkState> {
    let Some(Family::Bipartite { n1, .. }) = g.family() else {
        return Err(WalkError::InvalidFamily { expected: "bipartite" });
    };
    let in_target = |head: usize| match target_set {
        1 => Ok(head < n1),
        2 => Ok(head >= n1),
        _ => Err(WalkError::InvalidArgument(format!("bipartite set must be 1 or 2, got {target_set}"))),
    };
    let mut amplitudes = Vec::with_capacity(g.dim());
    for e in g.index().edges() {
        amplitudes.push(if in_target(e.to)? { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });
    }
    WalkState::normalized(amplitudes)
}

/// Probability that a position measurement lands on an accepted edge.
pub fn success_probability(psi: &WalkState, g: &Graph, criterion: Criterion) -> f64 {
    g.index()
        .edges()
        .iter()
        .zip(psi.amplitudes())
        .filter(|(e, _)| criterion.accepts(g.is_special(e.from), g.is_special(e.to)))
        .map(|(_, a)| a.norm_sqr())
        .sum()
}

/// One step of the walk, applied without materializing the matrix.
#[derive(Debug, Clone)]
pub struct StepOperator<'g> {
    graph: &'g Graph,
    phase: f64,
    coeffs: Vec<Option<ScatterCoeffs>>,
}

impl<'g> StepOperator<'g> {
    /// Isolated vertices carry no edge states and get no coefficients.
    pub fn new(graph: &'g Graph, phase: f64) -> Self {
        let coeffs = (0..graph.n_vertices()).map(|l| scatter_coeffs(graph, l, phase).ok()).collect();
        StepOperator { graph, phase, coeffs }
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn coeffs(&self, vertex: usize) -> Option<ScatterCoeffs> {
        self.coeffs[vertex]
    }

    pub fn dim(&self) -> usize {
        self.graph.dim()
    }

    /// `out = U·input`. Per vertex `l` with incoming sum `S(l)`, the edge
    /// `|l,m⟩` receives `t·S(l) − (t + r)·in(m,l)`, which equals the
    /// reflected term plus the transmitted sum over `Γ(l;m)`.
    pub fn apply_into(&self, input: &[C64], out: &mut [C64]) -> Result<()> {
        let dim = self.dim();
        if input.len() != dim || out.len() != dim {
            return Err(WalkError::DimensionMismatch { expected: dim, actual: input.len().min(out.len()) });
        }
        let index = self.graph.index();
        for (l, coeff) in self.coeffs.iter().enumerate() {
            let Some(ScatterCoeffs { r, t }) = *coeff else { continue };
            let range = index.outgoing(l);
            if t == 0.0 {
                for pos in range {
                    out[pos] = -r * input[index.reverse_of(pos)];
                }
                continue;
            }
            let total: C64 = range.clone().map(|pos| input[index.reverse_of(pos)]).sum();
            let direct = r + t;
            for pos in range {
                out[pos] = total * t - direct * input[index.reverse_of(pos)];
            }
        }
        Ok(())
    }

    pub fn apply_step(&self, psi: &WalkState) -> Result<WalkState> {
        let mut out = vec![C64::new(0.0, 0.0); self.dim()];
        self.apply_into(psi.amplitudes(), &mut out)?;
        Ok(WalkState::from_raw(out))
    }

    /// `Uⁿψ`.
    pub fn evolve(&self, psi: &WalkState, steps: usize) -> Result<WalkState> {
        let mut current = psi.amplitudes().to_vec();
        let mut next = vec![C64::new(0.0, 0.0); current.len()];
        if current.len() != self.dim() {
            return Err(WalkError::DimensionMismatch { expected: self.dim(), actual: current.len() });
        }
        for _ in 0..steps {
            self.apply_into(&current, &mut next)?;
            std::mem::swap(&mut current, &mut next);
        }
        Ok(WalkState::from_raw(current))
    }

    /// Calls `visit(step, state)` for `step = 0..=steps`.
    pub fn for_each_step(&self, psi: &WalkState, steps: usize, mut visit: impl FnMut(usize, &WalkState)) -> Result<()> {
        let mut current = psi.clone();
        let mut scratch = vec![C64::new(0.0, 0.0); self.dim()];
        visit(0, &current);
        for step in 1..=steps {
            self.apply_into(current.amplitudes(), &mut scratch)?;
            std::mem::swap(&mut current.amplitudes, &mut scratch);
            visit(step, &current);
        }
        Ok(())
    }

    /// Dense matrix whose column `j` is `U|e_j⟩`; refuses dimensions above
    /// `cap`.
    pub fn materialize(&self, cap: usize) -> Result<DMatrix<C64>> {
        let dim = self.dim();
        if dim > cap {
            return Err(WalkError::TooLarge { dim, cap });
        }
        let mut matrix = DMatrix::zeros(dim, dim);
        let mut column = vec![C64::new(0.0, 0.0); dim];
        let mut basis = vec![C64::new(0.0, 0.0); dim];
        for j in 0..dim {
            basis[j] = C64::new(1.0, 0.0);
            self.apply_into(&basis, &mut column)?;
            basis[j] = C64::new(0.0, 0.0);
            matrix.set_column(j, &nalgebra::DVector::from_column_slice(&column));
        }
        Ok(matrix)
    }

    pub fn materialize_unitary(&self) -> Result<DMatrix<C64>> {
        self.materialize(tolerance::DENSE_DIM_CAP)
    }
}

/// `max |(U†U − 1)_ij|`.
pub fn unitarity_defect(matrix: &DMatrix<C64>) -> f64 {
    let product = matrix.adjoint() * matrix;
    product
        .iter()
        .enumerate()
        .map(|(k, z)| {
            let (i, j) = (k % product.nrows(), k / product.nrows());
            let target = if i == j { 1.0 } else { 0.0 };
            (z - target).norm()
        })
        .fold(0.0, f64::max)
}
