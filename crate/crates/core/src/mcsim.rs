//! Monte Carlo oracle for W(t) - t^2 and for driftless Brownian passage.
//!
//! Each path owns two ChaCha8 streams derived from the seed and the path
//! index (increments on stream 2i, bridge uniforms on stream 2i + 1), so
//! results are bit-identical whatever the number of worker threads, and
//! switching the bridge correction on or off never changes the increments.

use crate::chernoff::StartState;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use statrs::function::erf::erfc;
use thiserror::Error;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum McError {
    #[error("invalid Monte Carlo configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McConfig {
    pub n_paths: usize,
    pub dt: f64,
    pub t_max: f64,
    pub seed: u64,
    pub bridge_correction: bool,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig { n_paths: 100_000, dt: 1e-3, t_max: 4.0, seed: 1, bridge_correction: true }
    }
}

impl McConfig {
    pub fn validate(&self) -> Result<(), McError> {
        if self.n_paths == 0 {
            return Err(McError::InvalidConfig("n_paths must be positive".into()));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(McError::InvalidConfig(format!("dt = {} must be positive", self.dt)));
        }
        if !(self.t_max >= self.dt && self.t_max.is_finite()) {
            return Err(McError::InvalidConfig(format!("t_max = {} must be at least dt", self.t_max)));
        }
        Ok(())
    }

    fn steps(&self) -> usize {
        (self.t_max / self.dt).round().max(1.0) as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PathFunctionals {
    pub max: f64,
    pub argmax: f64,
    pub hit_time: Option<f64>,
}

fn streams(seed: u64, path: usize) -> (ChaCha8Rng, ChaCha8Rng) {
    let mut a = ChaCha8Rng::seed_from_u64(seed);
    a.set_stream(2 * path as u64);
    let mut b = ChaCha8Rng::seed_from_u64(seed);
    b.set_stream(2 * path as u64 + 1);
    (a, b)
}

#[cfg(feature = "parallel")]
fn map_paths<T: Send, F: Fn(usize) -> T + Sync + Send>(n: usize, f: F) -> Vec<T> {
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_paths<T, F: Fn(usize) -> T>(n: usize, f: F) -> Vec<T> {
    (0..n).map(f).collect()
}

/// Maximum of a Brownian bridge from `a` to `b` over time `dt`, given u in (0, 1].
fn bridge_max(a: f64, b: f64, dt: f64, u: f64) -> f64 {
    0.5 * (a + b + ((b - a) * (b - a) - 2.0 * dt * u.ln()).sqrt())
}

/// Probability that a Brownian bridge between levels below `barrier` touches
/// it; 0 once it is under 1e-17, where a 53-bit uniform can fall below it only
/// by being exactly 0.
fn crossing_prob(a: f64, b: f64, barrier: f64, dt: f64) -> f64 {
    let e = 2.0 * (barrier - a) * (barrier - b) / dt;
    if e > 39.2 {
        0.0
    } else {
        (-e).exp()
    }
}

// Uniform in (0, 1] so that ln is finite.
fn open_uniform(rng: &mut ChaCha8Rng) -> f64 {
    1.0 - rng.gen::<f64>()
}

struct Side {
    max: f64,
    argmax_step: usize,
    // steps (k-1, k) whose larger end is near the running max
    candidates: Vec<(f64, f64)>,
}

// One side of the two-sided process: Y(k dt) = W(k dt) - (k dt)^2, k = 0..n.
// `earliest_last` chooses the later grid index on ties (the left side, where
// larger k means earlier time).
fn run_side(rng: &mut ChaCha8Rng, n: usize, dt: f64, earliest_last: bool, window: f64) -> Side {
    let sd = dt.sqrt();
    let (mut w, mut prev) = (0.0f64, 0.0f64);
    let mut side = Side { max: 0.0, argmax_step: 0, candidates: Vec::new() };
    for k in 1..=n {
        let z: f64 = rng.sample(StandardNormal);
        w += sd * z;
        let t = k as f64 * dt;
        let y = w - t * t;
        if y > side.max || (earliest_last && y == side.max) {
            side.max = y;
            side.argmax_step = k;
        }
        if window > 0.0 && prev.max(y) >= side.max - window {
            side.candidates.push((prev, y));
        }
        prev = y;
    }
    side
}

/// Simulate two-sided W(t) - t^2 on [-t_max, t_max]. The argmax is the grid
/// argmax (earliest on ties). With the bridge correction the maximum is
/// refined by sampling the bridge maximum on steps within 5 sqrt(dt) of the
/// grid maximum, which removes the O(sqrt(dt)) grid bias.
pub fn simulate_two_sided(cfg: &McConfig) -> Result<Vec<PathFunctionals>, McError> {
    cfg.validate()?;
    let n = cfg.steps();
    let dt = cfg.dt;
    let window = if cfg.bridge_correction { 5.0 * dt.sqrt() } else { 0.0 };
    Ok(map_paths(cfg.n_paths, |i| {
        let (mut rng, mut urng) = streams(cfg.seed, i);
        let right = run_side(&mut rng, n, dt, false, window);
        let left = run_side(&mut rng, n, dt, true, window);
        let (grid_max, argmax) = if left.max >= right.max && left.argmax_step > 0 {
            (left.max, -(left.argmax_step as f64) * dt)
        } else if right.max > 0.0 {
            (right.max, right.argmax_step as f64 * dt)
        } else {
            (0.0, 0.0)
        };
        let mut max = grid_max;
        if cfg.bridge_correction {
            let floor = grid_max - window;
            for &(a, b) in right.candidates.iter().chain(&left.candidates) {
                if a.max(b) >= floor {
                    max = max.max(bridge_max(a, b, dt, open_uniform(&mut urng)));
                }
            }
        }
        PathFunctionals { max, argmax, hit_time: None }
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HitEstimate {
    pub probability: f64,
    pub std_error: f64,
    /// Upper bound on the probability of a first hit after the horizon.
    pub horizon_bound: f64,
}

/// First hit of 0 by x + W(u) - W(s) - (u^2 - s^2), u >= s, within the horizon.
/// Returns the hit time (absolute) or None.
fn first_hit(state: StartState, cfg: &McConfig, path: usize) -> Option<f64> {
    let (mut rng, mut urng) = streams(cfg.seed, path);
    let n = cfg.steps();
    let dt = cfg.dt;
    let sd = dt.sqrt();
    let (s, mut y) = (state.s, state.x);
    if y >= 0.0 {
        return Some(s);
    }
    let mut w = 0.0;
    for k in 1..=n {
        let z: f64 = rng.sample(StandardNormal);
        w += sd * z;
        let t = s + k as f64 * dt;
        let next = state.x + w - (t * t - s * s);
        if next >= 0.0 {
            return Some(t - 0.5 * dt);
        }
        if cfg.bridge_correction {
            let p = crossing_prob(y, next, 0.0, dt);
            if p > 0.0 && urng.gen::<f64>() < p {
                return Some(t - 0.5 * dt);
            }
        }
        y = next;
    }
    None
}

/// Q^{(s,x)}(tau_0 <= s + t_max) with a binomial standard error.
pub fn estimate_hitting_prob(state: StartState, cfg: &McConfig) -> Result<HitEstimate, McError> {
    cfg.validate()?;
    if state.x >= 0.0 {
        return Err(McError::InvalidConfig(format!("start level x = {} must be negative", state.x)));
    }
    let hits: u64 = map_paths(cfg.n_paths, |i| first_hit(state, cfg, i).is_some() as u64).iter().sum();
    let n = cfg.n_paths as f64;
    let p = hits as f64 / n;
    let (s, x, t) = (state.s, state.x, cfg.t_max);
    // The density of tau_0 is exp(-(2/3)((s+u)^3 - s^3) + 2sx) h_x(u), and h_x
    // integrates to at most 1.
    let horizon_bound = (-(2.0 / 3.0) * ((s + t).powi(3) - s.powi(3)) + 2.0 * s * x).exp().min(1.0);
    Ok(HitEstimate { probability: p, std_error: (p * (1.0 - p) / n).sqrt(), horizon_bound })
}

/// Equal-width histogram on (0, width * n_bins] with an overflow count
/// (samples beyond the last edge, or no sample at all).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Histogram {
    pub width: f64,
    pub counts: Vec<u64>,
    pub overflow: u64,
    pub n: u64,
}

impl Histogram {
    pub fn new(width: f64, n_bins: usize) -> Self {
        Histogram { width, counts: vec![0; n_bins], overflow: 0, n: 0 }
    }

    pub fn add(&mut self, v: Option<f64>) {
        self.n += 1;
        match v {
            Some(v) if v > 0.0 => {
                let j = (v / self.width).ceil() as usize;
                if j >= 1 && j <= self.counts.len() {
                    self.counts[j - 1] += 1;
                } else {
                    self.overflow += 1;
                }
            }
            _ => self.overflow += 1,
        }
    }

    /// Density estimate per bin.
    pub fn densities(&self) -> Vec<f64> {
        let n = self.n as f64;
        self.counts.iter().map(|&c| c as f64 / (n * self.width)).collect()
    }

    /// Binomial standard error of each bin's density estimate.
    pub fn std_errors(&self) -> Vec<f64> {
        let n = self.n as f64;
        self.counts
            .iter()
            .map(|&c| {
                let p = c as f64 / n;
                (p * (1.0 - p) / n).sqrt() / self.width
            })
            .collect()
    }

    /// CSV with columns `value,count`: bin upper edges, then `inf` for overflow.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("value,count\n");
        for (j, c) in self.counts.iter().enumerate() {
            out.push_str(&format!("{:.16e},{c}\n", (j + 1) as f64 * self.width));
        }
        out.push_str(&format!("inf,{}\n", self.overflow));
        out
    }
}

/// Histogram of the first passage of z + W(t) to 0 on bins of `width`
/// covering (0, width * n_bins]. The horizon is cfg.t_max.
pub fn simulate_pure_bm_passage(z: f64, cfg: &McConfig, width: f64, n_bins: usize) -> Result<Histogram, McError> {
    cfg.validate()?;
    if !(z > 0.0 && z.is_finite()) {
        return Err(McError::InvalidConfig(format!("start z = {z} must be positive")));
    }
    let n = cfg.steps();
    let dt = cfg.dt;
    let sd = dt.sqrt();
    let times = map_paths(cfg.n_paths, |i| {
        let (mut rng, mut urng) = streams(cfg.seed, i);
        let mut y = z;
        for k in 1..=n {
            let g: f64 = rng.sample(StandardNormal);
            let next = y + sd * g;
            let t = k as f64 * dt;
            if next <= 0.0 {
                return Some(t - 0.5 * dt);
            }
            if cfg.bridge_correction {
                let p = crossing_prob(-y, -next, 0.0, dt);
                if p > 0.0 && urng.gen::<f64>() < p {
                    return Some(t - 0.5 * dt);
                }
            }
            y = next;
        }
        None
    });
    let mut h = Histogram::new(width, n_bins);
    for t in times {
        h.add(t);
    }
    Ok(h)
}

/// P(tau <= u) for driftless Brownian motion started at z > 0.
pub fn bm_passage_cdf(z: f64, u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else {
        erfc(z / (2.0 * u).sqrt())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
}

/// Pearson chi-square of a histogram (bins plus overflow) against a CDF.
pub fn chi_square<F: Fn(f64) -> f64>(h: &Histogram, cdf: F) -> ChiSquare {
    let n = h.n as f64;
    let mut stat = 0.0;
    let mut prev = cdf(0.0);
    for (j, &c) in h.counts.iter().enumerate() {
        let next = cdf((j + 1) as f64 * h.width);
        let e = n * (next - prev);
        stat += (c as f64 - e).powi(2) / e;
        prev = next;
    }
    let e = n * (1.0 - prev);
    stat += (h.overflow as f64 - e).powi(2) / e;
    let df = h.counts.len();
    let p_value = ChiSquared::new(df as f64).map(|d| d.sf(stat)).unwrap_or(f64::NAN);
    ChiSquare { statistic: stat, df, p_value }
}

/// Kolmogorov-Smirnov distance between a sample (sorted in place) and a CDF.
pub fn ks_statistic<F: Fn(f64) -> f64>(sample: &mut [f64], cdf: F) -> f64 {
    sample.sort_by(|a, b| a.total_cmp(b));
    let n = sample.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sample.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    d
}

/// Mean and standard error, with compensated summation.
pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let (mut s, mut c) = (0.0f64, 0.0f64);
    for &x in xs {
        let y = x - c;
        let t = s + y;
        c = (t - s) - y;
        s = t;
    }
    let m = s / n;
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (m, (var / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n: usize, seed: u64) -> McConfig {
        McConfig { n_paths: n, dt: 1e-3, t_max: 3.0, seed, bridge_correction: true }
    }

    #[test]
    fn config_validation() {
        assert!(McConfig { n_paths: 0, ..McConfig::default() }.validate().is_err());
        assert!(McConfig { dt: -1.0, ..McConfig::default() }.validate().is_err());
        assert!(McConfig { t_max: 1e-5, ..McConfig::default() }.validate().is_err());
    }

    #[test]
    fn two_sided_is_deterministic_and_centred() {
        let c = cfg(4000, 11);
        let a = simulate_two_sided(&c).unwrap();
        let b = simulate_two_sided(&c).unwrap();
        assert_eq!(a, b);
        for p in &a {
            assert!(p.max >= 0.0 && p.argmax.abs() <= c.t_max);
        }
        let argmax: Vec<f64> = a.iter().map(|p| p.argmax).collect();
        let (m, se) = mean_and_se(&argmax);
        assert!(m.abs() < 4.0 * se, "mean {m} se {se}");
    }

    #[test]
    fn bridge_refined_max_dominates_grid_max() {
        let on = simulate_two_sided(&cfg(500, 3)).unwrap();
        let off = simulate_two_sided(&McConfig { bridge_correction: false, ..cfg(500, 3) }).unwrap();
        for (a, b) in on.iter().zip(&off) {
            assert_eq!(a.argmax, b.argmax);
            assert!(a.max >= b.max);
        }
    }

    #[test]
    fn moment_relation_in_sample() {
        let paths = simulate_two_sided(&cfg(20_000, 5)).unwrap();
        let t2: Vec<f64> = paths.iter().map(|p| p.argmax * p.argmax).collect();
        let m3: Vec<f64> = paths.iter().map(|p| p.max / 3.0).collect();
        let diff: Vec<f64> = t2.iter().zip(&m3).map(|(a, b)| a - b).collect();
        let (d, se) = mean_and_se(&diff);
        assert!(d.abs() < 4.0 * se, "E tau^2 - EM/3 = {d}, se {se}");
    }

    #[test]
    fn correction_only_adds_crossings() {
        let st = StartState::new(0.0, -0.5).unwrap();
        let on = estimate_hitting_prob(st, &cfg(3000, 9)).unwrap();
        let off = estimate_hitting_prob(st, &McConfig { bridge_correction: false, ..cfg(3000, 9) }).unwrap();
        assert!(off.probability <= on.probability);
        for i in 0..200 {
            let a = first_hit(st, &McConfig { bridge_correction: false, ..cfg(1, 9) }, i);
            let b = first_hit(st, &cfg(1, 9), i);
            assert!(a.is_none() || b.is_some());
        }
    }

    #[test]
    fn near_barrier_start_almost_surely_hits() {
        let st = StartState::new(0.0, -0.01).unwrap();
        let e = estimate_hitting_prob(st, &cfg(2000, 2)).unwrap();
        assert!(e.probability > 0.97);
        assert!(e.horizon_bound < 1e-7);
    }

    #[test]
    fn passage_histogram_deterministic_and_sqrt_n() {
        let c = McConfig { t_max: 2.0, ..cfg(20_000, 4) };
        let a = simulate_pure_bm_passage(1.0, &c, 0.1, 20).unwrap();
        assert_eq!(a, simulate_pure_bm_passage(1.0, &c, 0.1, 20).unwrap());
        let b = simulate_pure_bm_passage(1.0, &McConfig { n_paths: 40_000, ..c }, 0.1, 20).unwrap();
        let mean = |v: Vec<f64>| v.iter().skip(3).sum::<f64>() / (v.len() - 3) as f64;
        let ratio = mean(a.std_errors()) / mean(b.std_errors());
        assert!((1.3..=1.7).contains(&ratio), "ratio {ratio}");
        let chi = chi_square(&a, |u| bm_passage_cdf(1.0, u));
        assert!(chi.p_value > 1e-3, "{chi:?}");
        assert!(a.to_csv().ends_with(&format!("inf,{}\n", a.overflow)));
    }

    #[test]
    fn histogram_binning() {
        let mut h = Histogram::new(0.1, 3);
        for v in [Some(0.05), Some(0.1), Some(0.1000001), Some(0.3), Some(0.31), None, Some(-1.0)] {
            h.add(v);
        }
        assert_eq!(h.counts, vec![2, 1, 1]);
        assert_eq!(h.overflow, 3);
        assert_eq!(h.n, 7);
    }

    #[test]
    fn ks_of_uniform_sample() {
        let mut v: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        let d = ks_statistic(&mut v, |x| x.clamp(0.0, 1.0));
        assert!((d - 0.0005).abs() < 1e-12);
    }

    #[test]
    fn bridge_max_is_at_least_endpoints() {
        for u in [1e-12, 0.3, 1.0] {
            let m = bridge_max(-0.2, 0.1, 1e-3, u);
            assert!(m >= 0.1);
        }
        assert!((bridge_max(-0.2, 0.1, 1e-3, 1.0) - 0.1).abs() < 1e-15);
    }
}
