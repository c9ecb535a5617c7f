//! One-dimensional quadrature: adaptive Gauss-Kronrod panels on finite
//! intervals, decay-driven truncation for the real line and the half line,
//! and a nested trapezoid rule for entire integrands decaying on the real
//! line.

use crate::airy;
use num_complex::Complex64;
use serde::Serialize;
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;
use std::sync::OnceLock;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Truncation {
    /// Solve decay(U) = abs_tol/2 for U in [5, 200].
    Auto,
    HalfWidth(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Adaptive bisection with the 7/15-point Gauss-Kronrod pair.
    GaussKronrod,
    /// Trapezoid rule on the truncated line, step halved until two levels
    /// agree. Only for integrands analytic in a strip around the real axis.
    Trapezoid { initial_step: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    pub truncation: Truncation,
    /// Oscillation frequency carried by the integrand; initial panels are no
    /// wider than pi/(4 max(1, |frequency|)).
    pub frequency: f64,
    pub scheme: Scheme,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            max_subdivisions: 1 << 14,
            truncation: Truncation::Auto,
            frequency: 0.0,
            scheme: Scheme::GaussKronrod,
        }
    }
}

impl QuadratureSpec {
    pub fn with_tol(abs_tol: f64, rel_tol: f64) -> Self {
        QuadratureSpec { abs_tol, rel_tol, ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), QuadratureError> {
        if !(self.abs_tol >= 1e-14 && self.rel_tol >= 1e-14) {
            return Err(QuadratureError::InvalidSpec("abs_tol and rel_tol must be >= 1e-14".into()));
        }
        if self.max_subdivisions == 0 || self.max_subdivisions > 1 << 20 {
            return Err(QuadratureError::InvalidSpec("max_subdivisions must lie in 1..=2^20".into()));
        }
        if let Truncation::HalfWidth(u) = self.truncation {
            if !(u > 0.0 && u.is_finite()) {
                return Err(QuadratureError::InvalidSpec("truncation half-width must be positive".into()));
            }
        }
        if let Scheme::Trapezoid { initial_step } = self.scheme {
            if !(initial_step > 0.0 && initial_step.is_finite()) {
                return Err(QuadratureError::InvalidSpec("trapezoid step must be positive".into()));
            }
        }
        Ok(())
    }

    fn target(&self, value: Complex64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.norm())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub value: Complex64,
    pub err_estimate: f64,
    pub evaluations: usize,
    pub truncation_used: f64,
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum QuadratureError {
    #[error("subdivision budget exhausted (best value {:?}, error estimate {:e})", best.value, best.err_estimate)]
    BudgetExceeded { best: QuadratureResult },
    #[error("integrand is not finite at {at}")]
    NonFinite { at: f64 },
    #[error("invalid quadrature spec: {0}")]
    InvalidSpec(String),
}

impl QuadratureError {
    /// The best available result, if the failure still produced one.
    pub fn best(&self) -> Option<QuadratureResult> {
        match self {
            QuadratureError::BudgetExceeded { best } => Some(*best),
            _ => None,
        }
    }
}

/// Upper bound on the integral of |f| beyond a cut-off.
pub trait TailBound {
    fn tail(&self, cut: f64) -> f64;
}

impl<F: Fn(f64) -> f64> TailBound for F {
    fn tail(&self, cut: f64) -> f64 {
        self(cut)
    }
}

/// No tail: the integrand vanishes beyond every cut-off considered.
pub struct NoTail;

impl TailBound for NoTail {
    fn tail(&self, _cut: f64) -> f64 {
        0.0
    }
}

// ---------------------------------------------------------------------------
// Gauss-Kronrod 7/15

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Clone, Copy, Debug)]
struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    err: f64,
    abs: f64,
}

fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Result<Panel, QuadratureError> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    if !(fc.re.is_finite() && fc.im.is_finite()) {
        return Err(QuadratureError::NonFinite { at: c });
    }
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    let mut abs = fc.norm() * WGK[7];
    for j in 0..7 {
        let x1 = c - h * XGK[j];
        let x2 = c + h * XGK[j];
        let f1 = f(x1);
        let f2 = f(x2);
        if !(f1.re.is_finite() && f1.im.is_finite()) {
            return Err(QuadratureError::NonFinite { at: x1 });
        }
        if !(f2.re.is_finite() && f2.im.is_finite()) {
            return Err(QuadratureError::NonFinite { at: x2 });
        }
        let s = f1 + f2;
        k += s * WGK[j];
        abs += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            g += s * WG[j / 2];
        }
    }
    Ok(Panel { a, b, value: k * h, err: ((k - g) * h).norm(), abs: abs * h.abs() })
}

#[derive(PartialEq)]
struct HeapItem {
    err: f64,
    id: usize,
}

impl Eq for HeapItem {}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapItem {
    // Largest error first; among equal errors the lowest id.
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err).then_with(|| other.id.cmp(&self.id))
    }
}

/// Pairwise sum in index order.
pub(crate) fn pairwise_sum(v: &[Complex64]) -> Complex64 {
    match v.len() {
        0 => Complex64::new(0.0, 0.0),
        1 => v[0],
        n => {
            let m = n / 2;
            pairwise_sum(&v[..m]) + pairwise_sum(&v[m..])
        }
    }
}

fn collect(panels: &[Panel], live: &[bool]) -> (Complex64, f64, f64) {
    let mut ordered: Vec<&Panel> = panels.iter().zip(live).filter(|(_, &l)| l).map(|(p, _)| p).collect();
    ordered.sort_by(|p, q| p.a.total_cmp(&q.a));
    let vals: Vec<Complex64> = ordered.iter().map(|p| p.value).collect();
    let err: f64 = ordered.iter().map(|p| p.err).sum();
    let abs: f64 = ordered.iter().map(|p| p.abs).sum();
    (pairwise_sum(&vals), err, abs)
}

/// Adaptive Gauss-Kronrod on [a, b]; `extra_err` is added to the error
/// budget (e.g. a truncated tail) before the tolerance test.
fn adaptive<F: Fn(f64) -> Complex64>(
    f: &F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
    extra_err: f64,
    truncation_used: f64,
) -> Result<QuadratureResult, QuadratureError> {
    spec.validate()?;
    if a == b {
        return Ok(QuadratureResult { value: Complex64::new(0.0, 0.0), err_estimate: extra_err, evaluations: 0, truncation_used });
    }
    let len = (b - a).abs();
    let cap = PI / (4.0 * spec.frequency.abs().max(1.0));
    let n0 = ((len / cap).ceil() as usize).clamp(1, spec.max_subdivisions);
    let mut panels = Vec::with_capacity(2 * n0);
    let mut live = Vec::with_capacity(2 * n0);
    let mut heap = BinaryHeap::new();
    let mut evals = 0;
    let step = (b - a) / n0 as f64;
    for i in 0..n0 {
        let lo = a + step * i as f64;
        let hi = if i + 1 == n0 { b } else { a + step * (i + 1) as f64 };
        let p = gk15(f, lo, hi)?;
        evals += 15;
        heap.push(HeapItem { err: p.err, id: panels.len() });
        panels.push(p);
        live.push(true);
    }
    let mut n_live = n0;
    let finish = |panels: &[Panel], live: &[bool], evals: usize| {
        let (value, err, abs) = collect(panels, live);
        let round = 10.0 * f64::EPSILON * abs;
        QuadratureResult { value, err_estimate: err + round + extra_err, evaluations: evals, truncation_used }
    };
    // Running totals decide when to attempt the exact, ordered reduction.
    let mut run_val: Complex64 = panels.iter().map(|p| p.value).sum();
    let mut run_err: f64 = panels.iter().map(|p| p.err).sum();
    let mut run_abs: f64 = panels.iter().map(|p| p.abs).sum();
    loop {
        let approx = run_err + 10.0 * f64::EPSILON * run_abs + extra_err;
        let stuck = n_live >= spec.max_subdivisions || heap.is_empty();
        if approx <= 1.01 * spec.target(run_val) || stuck {
            let r = finish(&panels, &live, evals);
            if r.err_estimate <= spec.target(r.value) {
                return Ok(r);
            }
            if stuck {
                return Err(QuadratureError::BudgetExceeded { best: r });
            }
        }
        let worst = heap.pop().expect("heap checked non-empty");
        let p = panels[worst.id];
        let mid = 0.5 * (p.a + p.b);
        if !(mid > p.a.min(p.b) && mid < p.a.max(p.b)) {
            // Panel cannot be split further in binary64.
            return Err(QuadratureError::BudgetExceeded { best: finish(&panels, &live, evals) });
        }
        let left = gk15(f, p.a, mid)?;
        let right = gk15(f, mid, p.b)?;
        evals += 30;
        live[worst.id] = false;
        run_val += left.value + right.value - p.value;
        run_err += left.err + right.err - p.err;
        run_abs += left.abs + right.abs - p.abs;
        for q in [left, right] {
            heap.push(HeapItem { err: q.err, id: panels.len() });
            panels.push(q);
            live.push(true);
        }
        n_live += 1;
    }
}

/// Adaptive quadrature on a finite interval.
pub fn integrate_interval<F: Fn(f64) -> Complex64>(
    f: &F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult, QuadratureError> {
    adaptive(f, a, b, spec, 0.0, (b - a).abs())
}

/// Adaptive quadrature over [a, b] split first at the given breakpoints.
pub fn integrate_with_breaks<F: Fn(f64) -> Complex64>(
    f: &F,
    breaks: &[f64],
    spec: &QuadratureSpec,
) -> Result<QuadratureResult, QuadratureError> {
    spec.validate()?;
    let mut vals = Vec::with_capacity(breaks.len());
    let mut err = 0.0;
    let mut evals = 0;
    let mut failed = false;
    let n = (breaks.len().max(2) - 1) as f64;
    for w in breaks.windows(2) {
        // Each piece gets an equal share of the absolute tolerance.
        let sub = QuadratureSpec { abs_tol: (spec.abs_tol / n).max(1e-14), ..*spec };
        let r = match adaptive(f, w[0], w[1], &sub, 0.0, 0.0) {
            Ok(r) => r,
            Err(QuadratureError::BudgetExceeded { best }) => {
                failed = true;
                best
            }
            Err(e) => return Err(e),
        };
        vals.push(r.value);
        err += r.err_estimate;
        evals += r.evaluations;
    }
    let span = breaks.last().copied().unwrap_or(0.0) - breaks.first().copied().unwrap_or(0.0);
    let r = QuadratureResult { value: pairwise_sum(&vals), err_estimate: err, evaluations: evals, truncation_used: span };
    if failed && r.err_estimate > spec.target(r.value) {
        Err(QuadratureError::BudgetExceeded { best: r })
    } else {
        Ok(r)
    }
}

fn choose_cut<T: TailBound + ?Sized>(decay: &T, spec: &QuadratureSpec) -> f64 {
    match spec.truncation {
        Truncation::HalfWidth(u) => u,
        Truncation::Auto => {
            let goal = 0.5 * spec.abs_tol;
            let (mut lo, mut hi) = (5.0, 200.0);
            if decay.tail(lo) <= goal {
                return lo;
            }
            if decay.tail(hi) > goal {
                return hi;
            }
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if decay.tail(mid) <= goal {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            hi
        }
    }
}

fn trapezoid_line<F: Fn(f64) -> Complex64>(
    f: &F,
    cut: f64,
    h0: f64,
    spec: &QuadratureSpec,
    tail: f64,
) -> Result<QuadratureResult, QuadratureError> {
    // Level 0 uses nodes k*h0; each halving adds the odd multiples.
    let mut h = h0;
    let nodes = |h: f64, odd: bool| -> Result<(Complex64, f64, usize), QuadratureError> {
        let kmax = (cut / h).floor() as i64;
        let mut vals = Vec::with_capacity(2 * kmax as usize + 1);
        let mut abs = 0.0;
        for k in -kmax..=kmax {
            if odd && k % 2 == 0 {
                continue;
            }
            let x = k as f64 * h;
            let v = f(x);
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(QuadratureError::NonFinite { at: x });
            }
            abs += v.norm();
            vals.push(v);
        }
        Ok((pairwise_sum(&vals), abs, vals.len()))
    };
    let (mut sum, mut abs, mut evals) = nodes(h, false)?;
    let mut prev = sum * h;
    let mut level = 0;
    loop {
        h *= 0.5;
        let (s_odd, a_odd, n) = nodes(h, true)?;
        sum += s_odd;
        abs += a_odd;
        evals += n;
        level += 1;
        let value = sum * h;
        let disc = (value - prev).norm();
        let err = disc + tail + 20.0 * f64::EPSILON * abs * h;
        let r = QuadratureResult { value, err_estimate: err, evaluations: evals, truncation_used: cut };
        if err <= spec.target(value) {
            return Ok(r);
        }
        if evals >= spec.max_subdivisions * 15 || level >= 12 {
            return Err(QuadratureError::BudgetExceeded { best: r });
        }
        prev = value;
    }
}

/// Integral of `f` over the real line.
///
/// `decay(U)` must bound the integral of |f| over |u| > U.
pub fn integrate_real_line<F, T>(f: &F, decay: &T, spec: &QuadratureSpec) -> Result<QuadratureResult, QuadratureError>
where
    F: Fn(f64) -> Complex64,
    T: TailBound + ?Sized,
{
    spec.validate()?;
    let cut = choose_cut(decay, spec);
    let tail = decay.tail(cut);
    match spec.scheme {
        Scheme::GaussKronrod => adaptive(f, -cut, cut, spec, tail, cut),
        Scheme::Trapezoid { initial_step } => trapezoid_line(f, cut, initial_step, spec, tail),
    }
}

/// Integral of `f` over [0, inf); `decay(Y)` bounds the integral of |f| over y > Y.
pub fn integrate_semi_infinite<F, T>(f: &F, decay: &T, spec: &QuadratureSpec) -> Result<QuadratureResult, QuadratureError>
where
    F: Fn(f64) -> Complex64,
    T: TailBound + ?Sized,
{
    spec.validate()?;
    let cut = choose_cut(decay, spec);
    adaptive(f, 0.0, cut, spec, decay.tail(cut), cut)
}

/// Integral of `f(sigma + i u)` over u in R, i.e. (1/i) times the contour
/// integral along the vertical line Re w = sigma.
pub fn integrate_vertical_line<F, T>(
    f: &F,
    sigma: f64,
    decay: &T,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult, QuadratureError>
where
    F: Fn(Complex64) -> Complex64,
    T: TailBound + ?Sized,
{
    let g = |u: f64| f(Complex64::new(sigma, u));
    integrate_real_line(&g, decay, spec)
}

// ---------------------------------------------------------------------------
// Gauss-Legendre nodes for fixed rules

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
                p1 = z;
            }
            dp = nf * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// The 32-point rule, cached.
pub(crate) fn gl32() -> &'static (Vec<f64>, Vec<f64>) {
    static R: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    R.get_or_init(|| gauss_legendre(32))
}

/// Fixed composite rule: panels of length at most `max_len`, 32 nodes each.
/// Returns (nodes, weights) on [a, b].
pub fn composite_gl32(a: f64, b: f64, max_len: f64) -> (Vec<f64>, Vec<f64>) {
    let (gx, gw) = gl32();
    let n = (((b - a).abs() / max_len).ceil() as usize).max(1);
    let h = (b - a) / n as f64;
    let mut xs = Vec::with_capacity(32 * n);
    let mut ws = Vec::with_capacity(32 * n);
    for p in 0..n {
        let lo = a + h * p as f64;
        for (x, w) in gx.iter().zip(gw) {
            xs.push(lo + 0.5 * h * (x + 1.0));
            ws.push(0.5 * h * w);
        }
    }
    (xs, ws)
}

// ---------------------------------------------------------------------------
// Tail bounds for the Airy-ratio integrands

const SAFETY: f64 = 2.0;

/// Tail bounds for the library's imaginary-axis Airy integrands.
///
/// * `shift == 0`: the 1/Ai(iu)^2 family. |1/Ai(iu)^2| behaves like
///   4 pi u^{1/2} e^{-(2 sqrt2/3) u^{3/2}}, whose tail integral is closed form.
/// * `shift > 0`: |Ai(iu + a)/Ai(iu)^2| with 0 <= a <= shift, dominated by
///   |1/Ai(iu)| since |Ai(iu + a)/Ai(iu)| <= 1 for large |u|.
///
/// Both sides of the real line are counted; a safety factor of 2 covers the
/// neglected asymptotic corrections for U >= 5.
pub fn airy_ratio_tail_bound(shift: f64) -> AiryTailBound {
    AiryTailBound { shift: shift.max(0.0) }
}

#[derive(Clone, Copy, Debug)]
pub struct AiryTailBound {
    pub shift: f64,
}

impl AiryTailBound {
    fn rate(&self) -> f64 {
        if self.shift == 0.0 {
            2.0 * 2f64.sqrt() / 3.0
        } else {
            2f64.sqrt() / 3.0
        }
    }

    /// Envelope of the integrand at |u| = U (the negative derivative of the
    /// one-sided tail).
    pub fn density(&self, u: f64) -> f64 {
        let c = self.rate();
        if self.shift == 0.0 {
            SAFETY * 4.0 * PI * u.sqrt() * (-c * u.powf(1.5)).exp()
        } else {
            SAFETY * 2.0 * PI.sqrt() * u.powf(0.25) * (-c * u.powf(1.5)).exp()
        }
    }
}

impl TailBound for AiryTailBound {
    fn tail(&self, u: f64) -> f64 {
        let c = self.rate();
        let one_side = if self.shift == 0.0 {
            // int_U^inf u^{1/2} e^{-c u^{3/2}} = e^{-c U^{3/2}}/(1.5 c)
            SAFETY * 4.0 * PI * (-c * u.powf(1.5)).exp() / (1.5 * c)
        } else {
            // u^{1/4} <= U^{-1/4} u^{1/2} for u >= U
            SAFETY * 2.0 * PI.sqrt() * u.powf(-0.25) * (-c * u.powf(1.5)).exp() / (1.5 * c)
        };
        2.0 * one_side
    }
}

/// Tail bound for `exp(-b*w)/Ai(w)` on the vertical line w = sigma + iu,
/// sigma >= 0 (the integrand of phi on a shifted line), with b real.
///
/// Uses |1/Ai(w)| ~ 2 sqrt(pi) |w|^{1/4} e^{Re zeta(w)} and the monotone
/// decrease of Re zeta along the line: d/du Re zeta = -Im sqrt(w).
#[derive(Clone, Copy, Debug)]
pub struct VerticalLineTail {
    pub sigma: f64,
    pub b: f64,
}

impl TailBound for VerticalLineTail {
    fn tail(&self, u: f64) -> f64 {
        let w = Complex64::new(self.sigma, u);
        if w.norm() < airy::SWITCH_RADIUS {
            return f64::INFINITY;
        }
        let zeta = w * w.sqrt() * (2.0 / 3.0);
        let slope = w.sqrt().im - 0.25 / w.norm();
        if slope <= 0.0 {
            return f64::INFINITY;
        }
        let env = 2.0 * PI.sqrt() * w.norm().powf(0.25) * (zeta.re - self.b * self.sigma).exp();
        2.0 * SAFETY * env / slope
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real<F: Fn(f64) -> f64>(f: F) -> impl Fn(f64) -> Complex64 {
        move |x| Complex64::new(f(x), 0.0)
    }

    #[test]
    fn gaussian_over_real_line() {
        let f = real(|u| (-u * u).exp());
        let decay = |u: f64| (-u * u).exp();
        let r = integrate_real_line(&f, &decay, &QuadratureSpec::default()).unwrap();
        assert!((r.value.re - PI.sqrt()).abs() < 1e-12);
        assert!(r.err_estimate >= (r.value.re - PI.sqrt()).abs());
    }

    #[test]
    fn odd_integrand_vanishes() {
        let f = real(|u| u * (-u * u).exp());
        let decay = |u: f64| (-u * u).exp();
        let spec = QuadratureSpec::with_tol(1e-10, 1e-10);
        let r = integrate_real_line(&f, &decay, &spec).unwrap();
        assert!(r.value.norm() < 1e-10);
    }

    #[test]
    fn half_line_references() {
        let spec = QuadratureSpec::default();
        let r = integrate_semi_infinite(&real(|t| (-t).exp()), &|y: f64| (-y).exp(), &spec).unwrap();
        assert!((r.value.re - 1.0).abs() < 1e-12);
        let r = integrate_semi_infinite(&real(|t| (-t * t * t / 3.0).exp()), &|y: f64| (-y * y * y / 3.0).exp() / (y * y), &spec).unwrap();
        let want = 3f64.powf(-2.0 / 3.0) * airy::gamma(1.0 / 3.0);
        assert!((r.value.re - want).abs() < 1e-12, "{}", r.value.re - want);
    }

    #[test]
    fn airy_integral_over_half_line_is_one_third() {
        let f = |y: f64| airy::ln_ai(Complex64::new(y, 0.0)).unwrap().exp();
        // Ai(y) <= e^{-(2/3) y^{3/2}}/(2 sqrt(pi) y^{1/4}); tail of that by the same trick.
        let decay = |y: f64| (-(2.0 / 3.0) * y.powf(1.5)).exp() / y.sqrt();
        let r = integrate_semi_infinite(&f, &decay, &QuadratureSpec::default()).unwrap();
        assert!((r.value.re - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn appendix_style_identity_both_schemes() {
        let f = |u: f64| (-2.0 * airy::ln_ai(Complex64::new(0.0, u)).unwrap()).exp() / (2.0 * PI);
        let decay = airy_ratio_tail_bound(0.0);
        let gk = integrate_real_line(&f, &decay, &QuadratureSpec::default()).unwrap();
        assert!((gk.value - 1.0).norm() < 1e-12, "{}", gk.value);
        let spec = QuadratureSpec { scheme: Scheme::Trapezoid { initial_step: 0.5 }, ..QuadratureSpec::default() };
        let tr = integrate_real_line(&f, &decay, &spec).unwrap();
        assert!((tr.value - 1.0).norm() < 1e-12, "{}", tr.value);
        assert!(tr.evaluations < gk.evaluations);
    }

    #[test]
    fn budget_exceeded_reports_best_value() {
        let f = real(|x| (1.0 / (x + 1e-9)).sin());
        let spec = QuadratureSpec { max_subdivisions: 8, ..QuadratureSpec::with_tol(1e-14, 1e-14) };
        match integrate_interval(&f, 0.0, 1.0, &spec) {
            Err(QuadratureError::BudgetExceeded { best }) => {
                assert!(best.err_estimate > 0.0 && best.value.re.is_finite());
            }
            other => panic!("expected budget failure, got {other:?}"),
        }
    }

    #[test]
    fn invalid_specs_rejected() {
        let f = real(|x| x);
        let s = QuadratureSpec::with_tol(1e-16, 1e-10);
        assert!(matches!(integrate_interval(&f, 0.0, 1.0, &s), Err(QuadratureError::InvalidSpec(_))));
        let s = QuadratureSpec { max_subdivisions: (1 << 20) + 1, ..QuadratureSpec::default() };
        assert!(matches!(integrate_interval(&f, 0.0, 1.0, &s), Err(QuadratureError::InvalidSpec(_))));
    }

    #[test]
    fn nonfinite_integrand_is_an_error() {
        let f = real(|x| 1.0 / x);
        let r = integrate_interval(&f, -1.0, 1.0, &QuadratureSpec::default());
        assert!(matches!(r, Err(QuadratureError::NonFinite { .. })));
    }

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for n in [1, 2, 5, 16, 32] {
            let (x, w) = gauss_legendre(n);
            let deg = 2 * n - 1;
            let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32 - 1)).sum();
            let exact = if (deg - 1) % 2 == 0 { 2.0 / deg as f64 } else { 0.0 };
            assert!((s - exact).abs() < 1e-14, "n={n}");
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn tail_bound_dominates_integrand() {
        for u in [10.0, 20.0, 30.0] {
            let b0 = airy_ratio_tail_bound(0.0);
            let inv_sq = (-2.0 * airy::ln_ai(Complex64::new(0.0, u)).unwrap()).exp().norm();
            assert!(inv_sq <= b0.density(u));
            let b1 = airy_ratio_tail_bound(3.0);
            for a in [0.0, 1.5, 3.0] {
                let l = airy::ln_ai(Complex64::new(a, u)).unwrap() - 2.0 * airy::ln_ai(Complex64::new(0.0, u)).unwrap();
                assert!(l.exp().norm() <= b1.density(u), "u={u} a={a}");
            }
        }
    }

    #[test]
    fn tail_bound_is_monotone_and_shaped() {
        let b = airy_ratio_tail_bound(0.0);
        let mut prev = f64::INFINITY;
        for k in 0..50 {
            let u = 5.0 + k as f64;
            let t = b.tail(u);
            assert!(t < prev);
            prev = t;
        }
        // the density is proportional to U^{1/2} e^{-(2 sqrt2/3) U^{3/2}}
        let c = 2.0 * 2f64.sqrt() / 3.0;
        let r1 = b.density(10.0) / (10f64.sqrt() * (-c * 10f64.powf(1.5)).exp());
        let r2 = b.density(20.0) / (20f64.sqrt() * (-c * 20f64.powf(1.5)).exp());
        assert!((r1 / r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn deterministic_results() {
        let f = |u: f64| Complex64::new((u * 3.0).cos(), u.sin()) * (-u * u).exp();
        let decay = |u: f64| (-u * u).exp();
        let spec = QuadratureSpec { frequency: 3.0, ..QuadratureSpec::default() };
        let a = integrate_real_line(&f, &decay, &spec).unwrap();
        let b = integrate_real_line(&f, &decay, &spec).unwrap();
        assert_eq!(a, b);
    }
}
