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

//! Classical unstructured-search baselines: draw elements uniformly at
//! random until a marked one turns up, either forgetting earlier draws
//! (blind) or never drawing the same element twice (memory).
//!
//! `N` is an abstract element count. Measured against the walk it can be
//! read as the number of vertices or as the number of edge states; the
//! formulas do not care.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WalkError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Blind,
    Memory,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Blind => "blind",
            Variant::Memory => "memory",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassicalSearchSpec {
    pub n: usize,
    pub v: usize,
    pub variant: Variant,
}

impl ClassicalSearchSpec {
    pub fn new(n: usize, v: usize, variant: Variant) -> Result<Self> {
        if v < 1 || v > n {
            return Err(WalkError::InvalidParameter(format!("classical search needs 1 ≤ v ≤ N, got N={n}, v={v}")));
        }
        Ok(ClassicalSearchSpec { n, v, variant })
    }

    /// Probability that the first marked element appears on draw `k`.
    pub fn pmf(&self, k: usize) -> f64 {
        match self.variant {
            Variant::Blind => blind_pmf(self, k),
            Variant::Memory => memory_pmf(self, k),
        }
    }

    /// Expected number of draws.
    pub fn average(&self) -> f64 {
        match self.variant {
            Variant::Blind => blind_average(self),
            Variant::Memory => memory_average(self),
        }
    }
}

/// `(1 − P)^{k−1} P` with `P = v/N`.
pub fn blind_pmf(spec: &ClassicalSearchSpec, k: usize) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let p = spec.v as f64 / spec.n as f64;
    (1.0 - p).powi(k as i32 - 1) * p
}

pub fn blind_average(spec: &ClassicalSearchSpec) -> f64 {
    spec.n as f64 / spec.v as f64
}

/// `[(N−v)! v / N!] · [(N−k)! / (N−v−k+1)!]`, evaluated as the running
/// product of miss probabilities times the final hit probability. Zero
/// outside `1 ≤ k ≤ N − v + 1`.
pub fn memory_pmf(spec: &ClassicalSearchSpec, k: usize) -> f64 {
    let (n, v) = (spec.n, spec.v);
    if k == 0 || k > n - v + 1 {
        return 0.0;
    }
    let miss: f64 = (0..k - 1).map(|i| (n - v - i) as f64 / (n - i) as f64).product();
    miss * v as f64 / (n - k + 1) as f64
}

/// All nonzero memory-search probabilities `P_1 … P_{N−v+1}` in O(N).
pub fn memory_pmf_series(spec: &ClassicalSearchSpec) -> Vec<f64> {
    let (n, v) = (spec.n, spec.v);
    let mut out = Vec::with_capacity(n - v + 1);
    let mut miss = 1.0;
    for k in 1..=n - v + 1 {
        out.push(miss * v as f64 / (n - k + 1) as f64);
        if k <= n - v {
            miss *= (n - v - (k - 1)) as f64 / (n - (k - 1)) as f64;
        }
    }
    out
}

pub fn memory_average(spec: &ClassicalSearchSpec) -> f64 {
    (spec.n + 1) as f64 / (spec.v + 1) as f64
}

/// Empirical mean number of draws and its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub trials: usize,
    pub seed: u64,
}

/// Number of independent RNG streams; fixed so that results do not depend
/// on the thread count.
const STREAMS: u64 = 16;

/// Simulates `trials` searches. Trials are split over a fixed set of
/// ChaCha streams derived from `seed`, so the estimate is deterministic.
pub fn monte_carlo_average(spec: &ClassicalSearchSpec, trials: usize, seed: u64) -> Result<MonteCarloEstimate> {
    if trials == 0 {
        return Err(WalkError::InvalidParameter("Monte Carlo needs at least one trial".into()));
    }
    let per_stream = |s: u64| trials / STREAMS as usize + usize::from((s as usize) < trials % STREAMS as usize);
    let sums: Vec<(f64, f64)> = (0..STREAMS)
        .into_par_iter()
        .map(|stream| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(stream);
            let mut pool: Vec<u32> = (0..spec.n as u32).collect();
            let (mut sum, mut sum_sq) = (0.0, 0.0);
            for _ in 0..per_stream(stream) {
                let draws = match spec.variant {
                    Variant::Blind => blind_trial(spec, &mut rng),
                    Variant::Memory => memory_trial(spec, &mut pool, &mut rng),
                } as f64;
                sum += draws;
                sum_sq += draws * draws;
            }
            (sum, sum_sq)
        })
        .collect();
    let (sum, sum_sq) = sums.iter().fold((0.0, 0.0), |acc, s| (acc.0 + s.0, acc.1 + s.1));
    let count = trials as f64;
    let mean = sum / count;
    let variance = if trials > 1 { ((sum_sq - count * mean * mean) / (count - 1.0)).max(0.0) } else { 0.0 };
    Ok(MonteCarloEstimate { mean, stderr: (variance / count).sqrt(), trials, seed })
}

/// Marked elements are `0..v`.
fn blind_trial(spec: &ClassicalSearchSpec, rng: &mut ChaCha8Rng) -> usize {
    let mut draws = 1;
    while rng.gen_range(0..spec.n) >= spec.v {
        draws += 1;
    }
    draws
}

/// Partial Fisher–Yates shuffle; stops at the first marked element.
fn memory_trial(spec: &ClassicalSearchSpec, pool: &mut [u32], rng: &mut ChaCha8Rng) -> usize {
    for draw in 0..spec.n {
        let pick = rng.gen_range(draw..spec.n);
        pool.swap(draw, pick);
        if (pool[draw] as usize) < spec.v {
            return draw + 1;
        }
    }
    unreachable!("at least one element is marked")
}

/// One row of the classical comparison CSV.
#[derive(Debug, Clone, Serialize)]
pub struct ComparisonRow {
    pub variant: &'static str,
    #[serde(rename = "N")]
    pub n: usize,
    pub v: usize,
    pub closed_form_avg: f64,
    pub mc_avg: f64,
    pub mc_stderr: f64,
    pub seed: u64,
}

pub fn comparison_row(spec: &ClassicalSearchSpec, trials: usize, seed: u64) -> Result<ComparisonRow> {
    let mc = monte_carlo_average(spec, trials, seed)?;
    Ok(ComparisonRow {
        variant: spec.variant.name(),
        n: spec.n,
        v: spec.v,
        closed_form_avg: spec.average(),
        mc_avg: mc.mean,
        mc_stderr: mc.stderr,
        seed,
    })
}

pub fn write_comparison_csv<W: std::io::Write>(rows: &[ComparisonRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn spec(n: usize, v: usize, variant: Variant) -> ClassicalSearchSpec {
        ClassicalSearchSpec::new(n, v, variant).unwrap()
    }

    /// `Σ k·P_k` by direct summation, truncated once the tail bound
    /// `(1−P)^K (K + 1/P)` drops below `1e−15`.
    fn blind_mean_by_summation(s: &ClassicalSearchSpec) -> (f64, f64) {
        let (mut total, mut mean, mut k) = (0.0, 0.0, 1usize);
        let p = s.v as f64 / s.n as f64;
        loop {
            let pk = blind_pmf(s, k);
            total += pk;
            mean += k as f64 * pk;
            let tail = (1.0 - p).powi(k as i32) * (k as f64 + 1.0 / p);
            if tail < 1e-15 || p == 1.0 {
                return (total, mean);
            }
            k += 1;
        }
    }

    #[test]
    fn blind_closed_forms() {
        let all = spec(5, 5, Variant::Blind);
        assert_eq!(blind_pmf(&all, 1), 1.0);
        assert_eq!(blind_pmf(&all, 2), 0.0);
        assert_eq!(blind_average(&all), 1.0);
        assert_eq!(blind_average(&spec(256, 1, Variant::Blind)), 256.0);
        let (total, _) = blind_mean_by_summation(&spec(37, 2, Variant::Blind));
        assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn memory_closed_forms() {
        assert_eq!(memory_average(&spec(256, 1, Variant::Memory)), 128.5);
        assert_eq!(memory_average(&spec(9, 9, Variant::Memory)), 1.0);
        let s = spec(50, 3, Variant::Memory);
        let series = memory_pmf_series(&s);
        assert_eq!(series.len(), 48);
        assert!((series.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        for (k, p) in series.iter().enumerate() {
            assert!((p - memory_pmf(&s, k + 1)).abs() < 1e-15);
        }
        assert_eq!(memory_pmf(&s, 49), 0.0);
        assert_eq!(memory_pmf(&s, 0), 0.0);
    }

    #[test]
    fn memory_pmf_matches_factorial_form() {
        // Exact factorial ratio for small N.
        fn fact(n: usize) -> f64 {
            (1..=n).map(|i| i as f64).product()
        }
        let (n, v) = (12, 3);
        let s = spec(n, v, Variant::Memory);
        for k in 1..=n - v + 1 {
            let exact = fact(n - v) * v as f64 / fact(n) * fact(n - k) / fact(n + 1 - v - k);
            assert!((memory_pmf(&s, k) - exact).abs() < 1e-14);
        }
    }

    #[test]
    fn averages_match_direct_summation() {
        for n in [1, 2, 10, 100, 1000, 10_000] {
            for v in [1, 2, 7, n] {
                if v > n {
                    continue;
                }
                let m = spec(n, v, Variant::Memory);
                let mean: f64 = memory_pmf_series(&m).iter().enumerate().map(|(k, p)| (k + 1) as f64 * p).sum();
                assert!((mean - memory_average(&m)).abs() < 1e-8, "memory N={n} v={v}");
                let b = spec(n, v, Variant::Blind);
                let (_, mean) = blind_mean_by_summation(&b);
                assert!((mean - blind_average(&b)).abs() < 1e-8 * blind_average(&b).max(1.0), "blind N={n} v={v}");
            }
        }
    }

    #[test]
    fn memory_never_slower_than_blind() {
        for n in 1..=1000 {
            for v in [1, 2, 3, n / 2, n] {
                if v == 0 || v > n {
                    continue;
                }
                assert!(memory_average(&spec(n, v, Variant::Memory)) <= blind_average(&spec(n, v, Variant::Blind)));
            }
        }
    }

    #[test]
    fn averages_scale_linearly() {
        for n in [100, 400, 2000] {
            for v in [1, 3] {
                for variant in [Variant::Blind, Variant::Memory] {
                    let ratio = spec(2 * n, v, variant).average() / spec(n, v, variant).average();
                    assert!((1.99..=2.01).contains(&ratio), "{variant:?} N={n}: {ratio}");
                }
            }
        }
    }

    #[test]
    fn monte_carlo_agrees_with_closed_form() {
        for variant in [Variant::Blind, Variant::Memory] {
            let s = spec(100, 1, variant);
            let est = monte_carlo_average(&s, 100_000, 7).unwrap();
            assert!((est.mean - s.average()).abs() <= 3.0 * est.stderr, "{variant:?}: {est:?}");
        }
    }

    #[test]
    fn monte_carlo_all_marked() {
        for variant in [Variant::Blind, Variant::Memory] {
            let est = monte_carlo_average(&spec(6, 6, variant), 1000, 1).unwrap();
            assert_eq!(est.mean, 1.0);
            assert_eq!(est.stderr, 0.0);
        }
    }

    #[test]
    fn monte_carlo_is_deterministic() {
        let s = spec(50, 2, Variant::Memory);
        assert_eq!(monte_carlo_average(&s, 5000, 99).unwrap(), monte_carlo_average(&s, 5000, 99).unwrap());
        assert_ne!(monte_carlo_average(&s, 5000, 99).unwrap().mean, monte_carlo_average(&s, 5000, 100).unwrap().mean);
        assert!(monte_carlo_average(&s, 0, 1).is_err());
    }

    #[test]
    fn invalid_spec() {
        assert!(ClassicalSearchSpec::new(3, 0, Variant::Blind).is_err());
        assert!(ClassicalSearchSpec::new(3, 4, Variant::Memory).is_err());
    }

    #[test]
    fn comparison_csv_columns() {
        let rows = vec![comparison_row(&spec(10, 1, Variant::Blind), 100, 5).unwrap()];
        let mut buf = Vec::new();
        write_comparison_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("variant,N,v,closed_form_avg,mc_avg,mc_stderr,seed\nblind,10,1,10.0,"));
    }

    proptest! {
        #[test]
        fn memory_pmf_is_a_distribution(n in 1usize..300, v_frac in 0.0f64..1.0) {
            let v = 1 + ((n - 1) as f64 * v_frac) as usize;
            let s = spec(n, v, Variant::Memory);
            let series = memory_pmf_series(&s);
            prop_assert!(series.iter().all(|p| (0.0..=1.0).contains(p)));
            prop_assert!((series.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        }
    }
}
