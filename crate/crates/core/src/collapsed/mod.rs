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

//! Walks restricted to invariant edge-class subspaces.
//!
//! Automorphisms that fix the special vertices permute edge states within
//! classes determined by the roles of the two endpoints (special or normal,
//! and which part of the graph). The normalized sum over each class is a
//! basis vector `|w_j⟩`; the step operator maps the span of these vectors
//! into itself, so a walk that starts in the span can be evolved with a
//! matrix of size 3 to 8 instead of `2|E|`.

mod asymptotic;
mod eigen;
mod families;

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

pub use asymptotic::*;
pub use eigen::EigenSystem;
pub use families::{bipartite_model, bipartite_two_step_model, complete_model, mpartite_model};

use crate::error::{Result, WalkError};
use crate::graph::{bipartite_graph, complete_graph, mpartite_graph, DirectedEdge, Family, Graph};
use crate::walk::{Criterion, StepOperator, WalkState};
use crate::{tolerance, C64};

/// Role of a vertex under the symmetry group fixing the specials.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Role {
    pub special: bool,
    /// Part label: always 0 for the complete graph, the set number (1 or 2)
    /// for the bipartite graph, 0 for the special vertex's set and 1 for
    /// every other set of the M-partite graph.
    pub group: u8,
}

impl Role {
    pub const fn new(special: bool, group: u8) -> Self {
        Role { special, group }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", if self.special { 'S' } else { 'N' }, self.group)
    }
}

/// Role of `vertex` in the canonical labelling of `family`.
pub fn vertex_role(family: Family, vertex: usize) -> Role {
    match family {
        Family::Complete { v, .. } => Role::new(vertex < v, 0),
        Family::Bipartite { n1, v1, v2, .. } => {
            if vertex < n1 {
                Role::new(vertex < v1, 1)
            } else {
                Role::new(vertex - n1 < v2, 2)
            }
        }
        Family::MPartite { n, .. } => Role::new(vertex == 0, u8::from(vertex >= n)),
    }
}

/// Uniform superposition of all edges going from a `tail`-role vertex to a
/// `head`-role vertex.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CollapsedBasisVector {
    pub label: &'static str,
    pub tail: Role,
    pub head: Role,
    /// Number of member edges `d_j`.
    pub dim: usize,
}

impl CollapsedBasisVector {
    pub(crate) fn new(label: &'static str, tail: Role, head: Role, dim: usize) -> Self {
        CollapsedBasisVector { label, tail, head, dim }
    }

    /// Amplitude `1/√d_j` carried by every member edge.
    pub fn weight(&self) -> f64 {
        1.0 / (self.dim as f64).sqrt()
    }

    pub fn contains(&self, family: Family, edge: DirectedEdge) -> bool {
        vertex_role(family, edge.from) == self.tail && vertex_role(family, edge.to) == self.head
    }

    /// Member edges in canonical order.
    pub fn members(&self, family: Family, g: &Graph) -> Vec<DirectedEdge> {
        g.index().edges().iter().copied().filter(|&e| self.contains(family, e)).collect()
    }
}

/// Derived scalars of each family model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelParams {
    Complete { t: f64, r: f64, q: f64, s: f64 },
    Bipartite { t1: f64, r1: f64, t2: f64, r2: f64, q1: f64, s1: f64, q2: f64, s2: f64, x1: f64, x2: f64 },
    #[serde(rename = "mpartite")]
    MPartite { t: f64, r: f64 },
}

/// How [`CollapsedModel::evolve`] produced its result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EvolutionMethod {
    Spectral,
    /// The Schur form was not diagonal; plain matrix powers were used.
    RepeatedMultiplication,
}

/// Components `⟨w_j|ψ⟩` and the norm of what the span misses.
#[derive(Debug, Clone)]
pub struct Projection {
    pub components: DVector<C64>,
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct CollapsedModel {
    family: Family,
    phase: f64,
    basis: Vec<CollapsedBasisVector>,
    matrix: DMatrix<C64>,
    params: ModelParams,
    step_multiplicity: usize,
    dropped: Vec<&'static str>,
    eigen: Option<EigenSystem>,
}

impl CollapsedModel {
    /// Drops empty basis vectors (with their rows and columns) and
    /// precomputes the eigensystem.
    pub(crate) fn assemble(
        family: Family,
        phase: f64,
        basis: Vec<CollapsedBasisVector>,
        matrix: DMatrix<C64>,
        params: ModelParams,
        step_multiplicity: usize,
    ) -> Self {
        let keep: Vec<usize> = (0..basis.len()).filter(|&j| basis[j].dim > 0).collect();
        let dropped = basis.iter().filter(|b| b.dim == 0).map(|b| b.label).collect();
        let matrix = DMatrix::from_fn(keep.len(), keep.len(), |i, j| matrix[(keep[i], keep[j])]);
        let basis: Vec<_> = keep.iter().map(|&j| basis[j].clone()).collect();
        let eigen = EigenSystem::of_normal(&matrix);
        if eigen.is_none() {
            log::warn!("{} model is not diagonalizable within tolerance; using matrix powers", family.name());
        }
        CollapsedModel { family, phase, basis, matrix, params, step_multiplicity, dropped, eigen }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn basis(&self) -> &[CollapsedBasisVector] {
        &self.basis
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn params(&self) -> ModelParams {
        self.params
    }

    /// Walk steps per application of [`matrix`](Self::matrix).
    pub fn step_multiplicity(&self) -> usize {
        self.step_multiplicity
    }

    /// Labels of basis vectors removed because their edge class is empty.
    pub fn dropped(&self) -> &[&'static str] {
        &self.dropped
    }

    pub fn eigen(&self) -> Option<&EigenSystem> {
        self.eigen.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn label_position(&self, label: &str) -> Option<usize> {
        self.basis.iter().position(|b| b.label == label)
    }

    /// The graph this model describes, in canonical labelling.
    pub fn graph(&self) -> Result<Graph> {
        match self.family {
            Family::Complete { n, v } => complete_graph(n, v),
            Family::Bipartite { n1, n2, v1, v2 } => bipartite_graph(n1, n2, v1, v2),
            Family::MPartite { m, n, v } => mpartite_graph(m, n, v),
        }
    }

    fn check_graph(&self, g: &Graph) -> Result<()> {
        if g.family() != Some(self.family) {
            return Err(WalkError::InvalidArgument(format!(
                "model built for {:?} applied to graph of family {:?}",
                self.family,
                g.family()
            )));
        }
        Ok(())
    }

    fn basis_position(&self, e: DirectedEdge) -> Option<usize> {
        let (tail, head) = (vertex_role(self.family, e.from), vertex_role(self.family, e.to));
        self.basis.iter().position(|b| b.tail == tail && b.head == head)
    }

    /// `⟨w_j|ψ⟩` for each basis vector, plus `‖ψ − Σ_j ⟨w_j|ψ⟩ |w_j⟩‖`.
    pub fn project(&self, psi: &WalkState, g: &Graph) -> Result<Projection> {
        self.check_graph(g)?;
        if psi.dim() != g.dim() {
            return Err(WalkError::DimensionMismatch { expected: g.dim(), actual: psi.dim() });
        }
        let classes: Vec<Option<usize>> = g.index().edges().iter().map(|&e| self.basis_position(e)).collect();
        let mut sums = vec![C64::new(0.0, 0.0); self.dim()];
        for (class, a) in classes.iter().zip(psi.amplitudes()) {
            if let Some(j) = class {
                sums[*j] += a;
            }
        }
        let components = DVector::from_iterator(
            self.dim(),
            sums.iter().zip(&self.basis).map(|(s, b)| s * b.weight()),
        );
        let residual_sqr: f64 = classes
            .iter()
            .zip(psi.amplitudes())
            .map(|(class, a)| match class {
                Some(j) => (a - components[*j] * self.basis[*j].weight()).norm_sqr(),
                None => a.norm_sqr(),
            })
            .sum();
        Ok(Projection { components, residual: residual_sqr.sqrt() })
    }

    /// `Σ_j c_j |w_j⟩` as a full edge-space state.
    pub fn lift(&self, components: &DVector<C64>, g: &Graph) -> Result<WalkState> {
        self.check_graph(g)?;
        if components.len() != self.dim() {
            return Err(WalkError::DimensionMismatch { expected: self.dim(), actual: components.len() });
        }
        let amplitudes = g
            .index()
            .edges()
            .iter()
            .map(|&e| match self.basis_position(e) {
                Some(j) => components[j] * self.basis[j].weight(),
                None => C64::new(0.0, 0.0),
            })
            .collect();
        Ok(WalkState::from_raw(amplitudes))
    }

    /// Components of the uniform superposition over all edges, computed
    /// from the class sizes without building the graph.
    pub fn uniform_components(&self) -> DVector<C64> {
        let total = match self.family {
            Family::Complete { n, .. } => n * (n - 1),
            Family::Bipartite { n1, n2, .. } => 2 * n1 * n2,
            Family::MPartite { m, n, .. } => n * n * m * (m - 1),
        } as f64;
        DVector::from_iterator(self.dim(), self.basis.iter().map(|b| C64::new((b.dim as f64 / total).sqrt(), 0.0)))
    }

    /// `matrixⁿ c0` by the spectral formula, falling back to repeated
    /// multiplication when the matrix is not diagonalizable.
    pub fn evolve(&self, c0: &DVector<C64>, steps: usize) -> Result<(DVector<C64>, EvolutionMethod)> {
        if c0.len() != self.dim() {
            return Err(WalkError::DimensionMismatch { expected: self.dim(), actual: c0.len() });
        }
        Ok(match &self.eigen {
            Some(sys) => (sys.evolve(c0, steps), EvolutionMethod::Spectral),
            None => (self.evolve_repeated(c0, steps), EvolutionMethod::RepeatedMultiplication),
        })
    }

    pub fn evolve_repeated(&self, c0: &DVector<C64>, steps: usize) -> DVector<C64> {
        let mut c = c0.clone();
        for _ in 0..steps {
            c = &self.matrix * c;
        }
        c
    }

    /// Measurement probability for collapsed components. Every member edge
    /// of a basis vector has the same endpoint roles, so the probability is
    /// a sum over whole classes.
    pub fn probability(&self, components: &DVector<C64>, criterion: Criterion) -> f64 {
        self.basis
            .iter()
            .zip(components.iter())
            .filter(|(b, _)| criterion.accepts(b.tail.special, b.head.special))
            .map(|(_, c)| c.norm_sqr())
            .sum()
    }

    /// `⟨w_i|U^k|w_j⟩` computed with the full-space engine, `k` being the
    /// step multiplicity, together with the largest norm that `U^k|w_j⟩`
    /// leaves outside the span.
    pub fn projected_matrix(&self, g: &Graph) -> Result<(DMatrix<C64>, f64)> {
        self.check_graph(g)?;
        let op = StepOperator::new(g, self.phase);
        let mut matrix = DMatrix::zeros(self.dim(), self.dim());
        let mut leak = 0.0f64;
        for j in 0..self.dim() {
            let mut unit = DVector::zeros(self.dim());
            unit[j] = C64::new(1.0, 0.0);
            let image = op.evolve(&self.lift(&unit, g)?, self.step_multiplicity)?;
            let proj = self.project(&image, g)?;
            matrix.set_column(j, &proj.components);
            leak = leak.max(proj.residual);
        }
        Ok((matrix, leak))
    }

    /// Compares the transcribed matrix with [`projected_matrix`]
    /// (Self::projected_matrix); returns the largest entry deviation.
    pub fn check_against_full(&self, g: &Graph) -> Result<f64> {
        let (projected, leak) = self.projected_matrix(g)?;
        let deviation = crate::max_modulus(&(&projected - &self.matrix));
        if deviation > tolerance::COLLAPSE || leak > tolerance::COLLAPSE {
            let mut diff = String::new();
            for i in 0..self.dim() {
                for j in 0..self.dim() {
                    let (a, b) = (self.matrix[(i, j)], projected[(i, j)]);
                    if (a - b).norm() > tolerance::COLLAPSE {
                        diff.push_str(&format!(
                            " <{}|U|{}>: transcribed {a}, full space {b};",
                            self.basis[i].label, self.basis[j].label
                        ));
                    }
                }
            }
            log::error!("{} model transcription mismatch (leak {leak:.2e}):{diff}", self.family.name());
            return Err(WalkError::TranscriptionMismatch(format!("leak {leak:.2e};{diff}")));
        }
        Ok(deviation)
    }

    pub fn dump(&self) -> ModelDump {
        ModelDump {
            family: self.family,
            phase: self.phase,
            step_multiplicity: self.step_multiplicity,
            basis: self
                .basis
                .iter()
                .map(|b| BasisDump { label: b.label, tail: b.tail.to_string(), head: b.head.to_string(), members: b.dim })
                .collect(),
            dropped: self.dropped.clone(),
            matrix: (0..self.dim())
                .map(|i| (0..self.dim()).map(|j| [self.matrix[(i, j)].re, self.matrix[(i, j)].im]).collect())
                .collect(),
            params: self.params,
        }
    }
}

/// Serializable view of a model: labels, class sizes, matrix entries as
/// `[re, im]` pairs (row-major) and derived parameters.
#[derive(Debug, Clone, Serialize)]
pub struct ModelDump {
    pub family: Family,
    pub phase: f64,
    pub step_multiplicity: usize,
    pub basis: Vec<BasisDump>,
    pub dropped: Vec<&'static str>,
    pub matrix: Vec<Vec<[f64; 2]>>,
    pub params: ModelParams,
}

#[derive(Debug, Clone, Serialize)]
pub struct BasisDump {
    pub label: &'static str,
    pub tail: String,
    pub head: String,
    pub members: usize,
}

/// Result of evolving states of the span in both spaces.
#[derive(Debug, Clone, Serialize)]
pub struct CollapseReport {
    pub family: Family,
    pub phi: f64,
    pub steps: usize,
    pub dim: usize,
    pub dropped: Vec<&'static str>,
    /// Largest `|⟨w_j|Uⁿψ⟩ − (Mⁿc)_j|`.
    pub max_abs_dev: f64,
    /// Largest norm of `Uⁿψ` outside the span.
    pub max_residual: f64,
    /// Largest entry deviation of the matrix from the projected operator.
    pub transcription_dev: f64,
    pub passed: bool,
}

/// Normalized components with distinct moduli and phases.
pub fn generic_components(dim: usize) -> DVector<C64> {
    let c = DVector::from_iterator(dim, (0..dim).map(|j| C64::from_polar(1.0 + 0.3 * j as f64, 0.9 * j as f64 + 0.2)));
    let norm = c.norm();
    c.unscale(norm)
}

/// Evolves the uniform state's projection and a generic state of the span
/// for `steps` model steps in the full space and in the model, comparing
/// components after every step.
pub fn verify_collapse(model: &CollapsedModel, g: &Graph, steps: usize) -> Result<CollapseReport> {
    let op = StepOperator::new(g, model.phase);
    let uniform = model.project(&crate::walk::uniform_initial_state(g)?, g)?.components;
    let uniform = uniform.unscale(uniform.norm());
    let (mut dev, mut residual) = (0.0f64, 0.0f64);
    for c0 in [uniform, generic_components(model.dim())] {
        let mut psi = model.lift(&c0, g)?;
        for k in 0..=steps {
            if k > 0 {
                psi = op.evolve(&psi, model.step_multiplicity)?;
            }
            let projection = model.project(&psi, g)?;
            let (collapsed, _) = model.evolve(&c0, k)?;
            dev = dev.max(crate::max_modulus(&(projection.components - collapsed)));
            residual = residual.max(projection.residual);
        }
    }
    let (projected, _) = model.projected_matrix(g)?;
    let transcription_dev = crate::max_modulus(&(&projected - &model.matrix));
    Ok(CollapseReport {
        family: model.family,
        phi: model.phase,
        steps,
        dim: model.dim(),
        dropped: model.dropped.clone(),
        max_abs_dev: dev,
        max_residual: residual,
        transcription_dev,
        passed: dev <= tolerance::COLLAPSE && residual <= tolerance::COLLAPSE && transcription_dev <= tolerance::COLLAPSE,
    })
}
