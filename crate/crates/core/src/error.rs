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

use thiserror::Error;

pub type Result<T> = std::result::Result<T, WalkError>;

#[derive(Debug, Error)]
pub enum WalkError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("operation requires a {expected} graph")]
    InvalidFamily { expected: &'static str },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("dimension {dim} exceeds the cap of {cap}")]
    TooLarge { dim: usize, cap: usize },
    #[error("state is not normalized (norm² = {0})")]
    NotNormalized(f64),
    #[error("domain violation: {0}")]
    DomainViolation(String),
    #[error("no solution: {0}")]
    NoSolution(String),
    #[error("initial state leaves the collapsed span (residual {residual:.3e} > {limit:.3e})")]
    ResidualTooLarge { residual: f64, limit: f64 },
    #[error("collapsed matrix disagrees with the full-space projection: {0}")]
    TranscriptionMismatch(String),
    #[error("work estimate {work:.3e} exceeds the cap {cap:.3e}; use the collapsed fast path")]
    ResourceCap { work: f64, cap: f64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl WalkError {
    /// Kind of the underlying I/O failure, if there is one.
    pub fn io_kind(&self) -> Option<std::io::ErrorKind> {
        match self {
            WalkError::Io(e) => Some(e.kind()),
            WalkError::Json(e) => e.io_error_kind(),
            WalkError::Csv(e) => match e.kind() {
                csv::ErrorKind::Io(io) => Some(io.kind()),
                _ => None,
            },
            _ => None,
        }
    }
}
