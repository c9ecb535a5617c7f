//! First passage of W(t) - t^2 through zero, the location and size of its
//! maximum, and Chernoff's density.
//!
//! Notation: `c = 2^{-1/3}`, `kappa = 4^{1/3}`, `beta = 2^{1/3}`.
//!
//! * `h_x(t)` has Laplace transform `Ai(c lambda - kappa x)/Ai(c lambda)`;
//!   it is inverted on a parabolic Bromwich contour.
//! * `f(s,x) = int_0^inf exp(-(2/3)(s+tau)^3) h_x(tau) dtau`, and the hitting
//!   probability is `exp(2sx + (2/3)s^3) f(s,x)`.
//! * `g(s,x)` is the imaginary-axis integral of `Ai(iu + y)/Ai(iu)^2`; the
//!   survival probability is `exp(2sx + (2/3)s^3) g(s,x)` and
//!   `f + g = exp(-2sx - (2/3)s^3)`.
//! * `phi(t) = (1/(beta pi)) int exp(-i beta t u)/Ai(iu) du`, evaluated on the
//!   line `Re w = 2^{2/3} t^2` for `t > 0`, and `f_Z(t) = phi(t) phi(-t)/2`.

use crate::airy::{self, AiryError};
use crate::quadrature::{
    self, airy_ratio_tail_bound, QuadratureError, QuadratureSpec, Scheme, TailBound, Truncation, VerticalLineTail,
};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;
use thiserror::Error;

/// 2^{-1/3}
pub const C: f64 = 0.793_700_525_984_099_7;
/// 4^{1/3}
pub const KAPPA: f64 = 1.587_401_051_968_199_4;
/// 2^{1/3}
pub const BETA: f64 = 1.259_921_049_894_873_2;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum ChernoffError {
    #[error("argument outside the domain: {0}")]
    Domain(String),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Airy(#[from] AiryError),
    #[error("finite-difference step {step} crosses the barrier from x - a = {y}")]
    StepDegenerate { y: f64, step: f64 },
}

pub type Result<T> = std::result::Result<T, ChernoffError>;

/// Start time `s` and level `x <= 0`; the barrier sits at 0.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StartState {
    pub s: f64,
    pub x: f64,
}

impl StartState {
    pub fn new(s: f64, x: f64) -> Result<Self> {
        if !(s.is_finite() && x.is_finite()) {
            return Err(ChernoffError::Domain(format!("non-finite start ({s}, {x})")));
        }
        if x > 0.0 {
            return Err(ChernoffError::Domain(format!("start level x = {x} must be <= 0")));
        }
        Ok(StartState { s, x })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub err_estimate: f64,
}

/// A probability with its unclamped value kept alongside.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Probability {
    pub value: f64,
    pub raw: f64,
    pub err_estimate: f64,
    pub clamped: bool,
}

impl Probability {
    fn from_raw(raw: f64, err: f64) -> Self {
        let value = raw.clamp(0.0, 1.0);
        Probability { value, raw, err_estimate: err, clamped: value != raw }
    }
}

/// Tolerances and truncations shared by every operation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NumericsSpec {
    /// Half the number of nodes on the parabolic Bromwich contour.
    pub bromwich_nodes: usize,
    /// Absolute tolerance of the outer time integrals (f, Laplace checks).
    pub time_abs_tol: f64,
    /// Relative tolerance of the imaginary-axis integrals (g, phi).
    pub axis_rel_tol: f64,
    /// Initial trapezoid step for the imaginary-axis integrals.
    pub axis_step: f64,
    /// Upper limit of the x-integral defining psi.
    pub psi_x_max: f64,
    /// Finite-difference step for the one-sided maximum density.
    pub fd_step: f64,
    /// Largest t used when psi(0) is obtained as a limit.
    pub psi_zero_delta: f64,
    /// Absolute tolerance of the x-integral defining psi.
    pub psi_abs_tol: f64,
}

impl Default for NumericsSpec {
    fn default() -> Self {
        NumericsSpec {
            bromwich_nodes: 20,
            time_abs_tol: 1e-14,
            axis_rel_tol: 1e-12,
            axis_step: 0.5,
            psi_x_max: 8.0,
            fd_step: 1e-4,
            psi_zero_delta: 0.04,
            psi_abs_tol: 1e-10,
        }
    }
}

// ---------------------------------------------------------------------------
// h_x(t) by Bromwich inversion

/// Nodes of the parabolic contour lambda(w) = mu (1 + i w)^2, w = jk,
/// k = 3/N, mu = pi N/(12 t), for one t. Only j >= 0 is stored: the
/// transform is real on the real axis, so the j < 0 half is the conjugate.
#[derive(Clone, Debug)]
pub struct BromwichContour {
    pub t: f64,
    z: Vec<Complex64>,
    weight: Vec<Complex64>,
}

impl BromwichContour {
    pub fn new(t: f64, n: usize) -> Self {
        let n = n.max(4);
        let k = 3.0 / n as f64;
        let mu = PI * n as f64 / (12.0 * t);
        let mut z = Vec::with_capacity(n + 1);
        let mut weight = Vec::with_capacity(n + 1);
        for j in 0..=n {
            let w = j as f64 * k;
            let one_iw = Complex64::new(1.0, w);
            let lam = mu * one_iw * one_iw;
            let dlam = Complex64::new(0.0, 2.0 * mu) * one_iw;
            // k/(2 pi i) * e^{lambda t} lambda'(w); doubled for j > 0.
            let mult = if j == 0 { 1.0 } else { 2.0 };
            let wt = (lam * t).exp() * dlam * (mult * k) / Complex64::new(0.0, 2.0 * PI);
            z.push(C * lam);
            weight.push(wt);
        }
        BromwichContour { t, z, weight }
    }

    /// h_x(t); only the real part of the half-sum carries the value.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let a = -KAPPA * x;
        let mut s = 0.0;
        for (z, w) in self.z.iter().zip(&self.weight) {
            let r = airy::ln_ai_shift_ratio(*z, a)?.exp();
            s += (w * r).re;
        }
        Ok(s)
    }

    fn eval_with_abs(&self, x: f64) -> Result<(f64, f64)> {
        let a = -KAPPA * x;
        let (mut s, mut abs) = (0.0, 0.0);
        for (z, w) in self.z.iter().zip(&self.weight) {
            let term = w * airy::ln_ai_shift_ratio(*z, a)?.exp();
            s += term.re;
            abs += term.norm();
        }
        Ok((s, abs))
    }
}

/// Laplace transform of h_x at lambda: Ai(c lambda - kappa x)/Ai(c lambda).
pub fn h_laplace(lambda: f64, x: f64) -> Result<f64> {
    let l = airy::ln_ai_shift_ratio(Complex64::new(C * lambda, 0.0), -KAPPA * x)?;
    Ok(l.re.exp())
}

// Bracket for tau where h_x(tau) matters: below x^2/90 the first-passage mass
// is under erfc(sqrt(45)).
fn time_breaks(x: f64, upper: f64) -> Vec<f64> {
    let lo = (x * x / 90.0).max(1e-12);
    let mut b = vec![0.0, lo];
    let mut t = lo;
    while t * 4.0 < upper.min(1.0) {
        t *= 4.0;
        b.push(t);
    }
    let mut t = b.last().copied().unwrap_or(lo).max(1.0);
    if t < upper {
        b.push(t);
    }
    while t + 1.0 < upper {
        t += 1.0;
        b.push(t);
    }
    b.push(upper);
    b.dedup();
    b
}

// Smallest T >= 0 with (2/3)((s+T)^3 - s^3) - 2 s x >= budget (s may be negative).
fn time_horizon(s: f64, x: f64, budget: f64) -> f64 {
    let expo = |t: f64| (2.0 / 3.0) * ((s + t).powi(3) - s.powi(3)) - 2.0 * s * x;
    let mut hi = 1.0;
    while expo(hi) < budget {
        hi *= 1.5;
    }
    let mut lo = 0.0;
    for _ in 0..80 {
        let m = 0.5 * (lo + hi);
        if expo(m) >= budget {
            hi = m;
        } else {
            lo = m;
        }
    }
    hi
}

/// Evaluation engine carrying a [`NumericsSpec`].
#[derive(Clone, Copy, Debug, Default)]
pub struct Solver {
    pub spec: NumericsSpec,
}

impl Solver {
    pub fn new(spec: NumericsSpec) -> Self {
        Solver { spec }
    }

    /// h_x(t) with an error estimate (difference against a finer contour
    /// plus accumulated rounding).
    pub fn h_density(&self, x: f64, t: f64) -> Result<Estimate> {
        if !(x < 0.0 && t > 0.0 && x.is_finite() && t.is_finite()) {
            return Err(ChernoffError::Domain(format!("h_density needs x < 0, t > 0 (got {x}, {t})")));
        }
        let n = self.spec.bromwich_nodes;
        let (v, abs) = BromwichContour::new(t, n).eval_with_abs(x)?;
        let (v2, abs2) = BromwichContour::new(t, n + 4).eval_with_abs(x)?;
        let err = (v - v2).abs() + 8.0 * f64::EPSILON * abs.max(abs2);
        Ok(Estimate { value: v, err_estimate: err })
    }

    /// Imaginary part of the full (both-halves) contour sum; zero up to
    /// rounding since the transform is real on the real axis.
    pub fn h_density_imag(&self, x: f64, t: f64) -> Result<f64> {
        let n = self.spec.bromwich_nodes.max(4);
        let k = 3.0 / n as f64;
        let mu = PI * n as f64 / (12.0 * t);
        let mut s = Complex64::new(0.0, 0.0);
        for j in -(n as i64)..=(n as i64) {
            let one_iw = Complex64::new(1.0, j as f64 * k);
            let lam = mu * one_iw * one_iw;
            let dlam = Complex64::new(0.0, 2.0 * mu) * one_iw;
            let r = airy::ln_ai_shift_ratio(C * lam, -KAPPA * x)?.exp();
            s += (lam * t).exp() * dlam * r * k;
        }
        Ok((s / Complex64::new(0.0, 2.0 * PI)).im)
    }

    /// int_0^inf weight(tau) h_x(tau) dtau over the support of h_x, with the
    /// integral cut at `upper`.
    fn time_integral<W: Fn(f64) -> f64>(&self, x: f64, upper: f64, weight: W) -> Result<Estimate> {
        let n = self.spec.bromwich_nodes;
        let f = |tau: f64| -> Complex64 {
            let w = weight(tau);
            if w == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            match BromwichContour::new(tau, n).eval(x) {
                Ok(h) => Complex64::new(w * h, 0.0),
                Err(_) => Complex64::new(f64::NAN, 0.0),
            }
        };
        let breaks = time_breaks(x, upper);
        let spec = QuadratureSpec::with_tol(self.spec.time_abs_tol, 1e-14);
        let r = quadrature::integrate_with_breaks(&f, &breaks, &spec)?;
        Ok(Estimate { value: r.value.re, err_estimate: r.err_estimate })
    }

    /// int_0^inf e^{-lambda u} h_x(u) du by quadrature in u.
    pub fn h_laplace_quadrature(&self, lambda: f64, x: f64) -> Result<Estimate> {
        if !(x < 0.0 && lambda >= 0.0) {
            return Err(ChernoffError::Domain(format!("need x < 0, lambda >= 0 (got {x}, {lambda})")));
        }
        // h_x decays like exp(a_1 u / c), a_1 c^{-1} ~ -2.95, after its peak near x^2.
        let upper = 42.0 / (lambda + 2.9) + 4.0 * x * x + 2.0;
        self.time_integral(x, upper, |u| (-lambda * u).exp())
    }

    /// f(s,x) = int_0^inf exp(-(2/3)(s+tau)^3) h_x(tau) dtau.
    pub fn f_fun(&self, state: StartState) -> Result<Estimate> {
        let StartState { s, x } = state;
        if x == 0.0 {
            return Ok(Estimate { value: (-(2.0 / 3.0) * s.powi(3)).exp(), err_estimate: 0.0 });
        }
        let upper = time_horizon(s, 0.0, 45.0 + 2.0 * (s.powi(3)).abs() / 3.0);
        let r = self.time_integral(x, upper, |tau| (-(2.0 / 3.0) * (s + tau).powi(3)).exp())?;
        let tail = (-(2.0 / 3.0) * (s + upper).powi(3)).exp();
        Ok(Estimate { value: r.value, err_estimate: r.err_estimate + tail })
    }

    /// Q^{(s,x)}(tau_0 < inf) as the time integral of the first-passage density.
    pub fn hitting_prob(&self, state: StartState) -> Result<Probability> {
        let StartState { s, x } = state;
        if x == 0.0 {
            return Ok(Probability::from_raw(1.0, 0.0));
        }
        let upper = time_horizon(s, x, 42.0);
        let r = self.time_integral(x, upper, |tau| {
            (-(2.0 / 3.0) * ((s + tau).powi(3) - s.powi(3)) + 2.0 * s * x).exp()
        })?;
        Ok(Probability::from_raw(r.value, r.err_estimate + (-42f64).exp()))
    }

    /// Density of tau_0 under Q^{(s,x)} at absolute time t > s.
    pub fn first_passage_density(&self, state: StartState, t: f64) -> Result<Estimate> {
        let StartState { s, x } = state;
        if t <= s {
            return Ok(Estimate { value: 0.0, err_estimate: 0.0 });
        }
        let tilt = (-(2.0 / 3.0) * (t.powi(3) - s.powi(3)) + 2.0 * s * x).exp();
        if x == 0.0 || tilt == 0.0 {
            return Ok(Estimate { value: 0.0, err_estimate: 0.0 });
        }
        let h = self.h_density(x, t - s)?;
        Ok(Estimate { value: tilt * h.value, err_estimate: tilt * h.err_estimate })
    }

    // -----------------------------------------------------------------------
    // g and the survival probability

    fn axis_spec(&self, abs_tol: f64) -> QuadratureSpec {
        QuadratureSpec {
            abs_tol: abs_tol.max(1e-14),
            rel_tol: self.spec.axis_rel_tol,
            scheme: Scheme::Trapezoid { initial_step: self.spec.axis_step },
            ..QuadratureSpec::default()
        }
    }

    /// g(s,x) by the imaginary-axis representation with a 32-point
    /// Gauss-Legendre rule per unit length for the inner y-integral.
    pub fn g_fun(&self, state: StartState) -> Result<Estimate> {
        let StartState { s, x } = state;
        if x == 0.0 {
            return Ok(Estimate { value: 0.0, err_estimate: 0.0 });
        }
        let len = -KAPPA * x;
        let (ys, ws) = quadrature::composite_gl32(0.0, len, 1.0);
        let pre = (-2.0 * s * x).exp() / (2.0 * PI);
        let f = |u: f64| -> Complex64 {
            let base = match airy::ln_ai(Complex64::new(0.0, u)) {
                Ok(l) => 2.0 * l,
                Err(_) => return Complex64::new(f64::NAN, 0.0),
            };
            let mut acc = Complex64::new(0.0, 0.0);
            for (y, w) in ys.iter().zip(&ws) {
                let zz = Complex64::new(*y, u);
                match airy::ln_ai(zz) {
                    Ok(l) => acc += w * (l - BETA * s * zz - base).exp(),
                    Err(_) => return Complex64::new(f64::NAN, 0.0),
                }
            }
            acc * pre
        };
        let scale = pre * len * (-BETA * s * len).exp().max(1.0);
        let bound = airy_ratio_tail_bound(len);
        let decay = move |cut: f64| scale * bound.tail(cut);
        let r = integrate_hermitian(&f, &decay, &self.axis_spec(1e-14))?;
        Ok(Estimate { value: r.value.re, err_estimate: r.err_estimate })
    }

    pub fn survival_prob(&self, state: StartState) -> Result<Probability> {
        let StartState { s, x } = state;
        let g = self.g_fun(state)?;
        let tilt = (2.0 * s * x + (2.0 / 3.0) * s.powi(3)).exp();
        Ok(Probability::from_raw(tilt * g.value, tilt * g.err_estimate))
    }

    /// p(s) = (1/2pi) int [int_0^inf e^{-beta s (iu+y)} Ai(iu+y) dy]/Ai(iu)^2 du,
    /// the x -> -inf limit of e^{2sx} g(s,x).
    pub fn p_fun(&self, s: f64) -> Result<Estimate> {
        let inner_spec = QuadratureSpec::with_tol(1e-15f64.max(1e-14), 1e-13);
        let f = |u: f64| -> Complex64 {
            let base = match airy::ln_ai(Complex64::new(0.0, u)) {
                Ok(l) => 2.0 * l,
                Err(_) => return Complex64::new(f64::NAN, 0.0),
            };
            let inner = |y: f64| -> Complex64 {
                let zz = Complex64::new(y, u);
                match airy::ln_ai(zz) {
                    Ok(l) => (l - BETA * s * zz - base).exp(),
                    Err(_) => Complex64::new(f64::NAN, 0.0),
                }
            };
            // |e^{-beta s w} Ai(w)| <= |w|^{-1/4} e^{-Re zeta - beta s y}/(2 sqrt pi), and
            // the exponent falls at rate at least Re sqrt(w) + beta s beyond Y.
            let decay = |yy: f64| -> f64 {
                let w = Complex64::new(yy, u);
                let rate = w.sqrt().re + BETA * s;
                if w.norm() < airy::SWITCH_RADIUS || rate <= 0.0 {
                    return f64::INFINITY;
                }
                let zeta = w * w.sqrt() * (2.0 / 3.0);
                let env = (-zeta.re - BETA * s * yy - base.re).exp() * w.norm().powf(-0.25) / (2.0 * PI.sqrt());
                4.0 * env / rate
            };
            match quadrature::integrate_semi_infinite(&inner, &decay, &inner_spec) {
                Ok(r) => r.value / (2.0 * PI),
                Err(e) => match e.best() {
                    Some(b) => b.value / (2.0 * PI),
                    None => Complex64::new(f64::NAN, 0.0),
                },
            }
        };
        let bound = airy_ratio_tail_bound(1.0);
        let scale = (-BETA * s * 20.0).exp().max(1.0) * 20.0 / (2.0 * PI);
        let decay = move |cut: f64| scale * bound.tail(cut);
        let r = integrate_hermitian(&f, &decay, &self.axis_spec(1e-14))?;
        Ok(Estimate { value: r.value.re, err_estimate: r.err_estimate })
    }

    // -----------------------------------------------------------------------
    // phi and Chernoff's density

    /// phi(t) = (1/(beta pi)) int exp(-beta t w)/Ai(w) du, w = sigma + iu,
    /// sigma = 2^{2/3} t^2 for t > 0 and 0 otherwise.
    pub fn phi(&self, t: f64) -> Result<Estimate> {
        if !t.is_finite() {
            return Err(ChernoffError::Domain(format!("phi needs finite t (got {t})")));
        }
        let sigma = if t > 0.0 { BETA * BETA * t * t } else { 0.0 };
        self.phi_on_line(t, sigma)
    }

    /// phi(t) along the vertical line Re w = sigma (any sigma >= 0 gives the same value).
    pub fn phi_on_line(&self, t: f64, sigma: f64) -> Result<Estimate> {
        let b = BETA * t;
        let f = |u: f64| -> Complex64 {
            let w = Complex64::new(sigma, u);
            match airy::ln_ai(w) {
                Ok(l) => (-b * w - l).exp(),
                Err(_) => Complex64::new(f64::NAN, 0.0),
            }
        };
        let tail = VerticalLineTail { sigma, b };
        // Peak size of the integrand, to set an absolute floor.
        let peak = f(0.0).norm();
        let spec = QuadratureSpec { frequency: b.abs(), ..self.axis_spec(1e-13 * peak.max(1e-300)) };
        let r = integrate_hermitian(&f, &tail, &spec)?;
        let scale = 1.0 / (BETA * PI);
        Ok(Estimate { value: scale * r.value.re, err_estimate: scale * r.err_estimate })
    }

    /// k(s, 0) = exp((2/3)s^3) phi(s): the boundary derivative of the hitting probability.
    pub fn k_boundary(&self, s: f64) -> Result<Estimate> {
        let p = self.phi(s)?;
        let e = ((2.0 / 3.0) * s.powi(3)).exp();
        Ok(Estimate { value: e * p.value, err_estimate: e * p.err_estimate })
    }

    /// f_Z(t) = phi(t) phi(-t)/2, symmetric by construction.
    pub fn chernoff_density(&self, t: f64) -> Result<Estimate> {
        let a = self.phi(t.abs())?;
        let b = self.phi(-t.abs())?;
        Ok(Estimate {
            value: 0.5 * a.value * b.value,
            err_estimate: 0.5 * (a.err_estimate * b.value.abs() + b.err_estimate * a.value.abs()),
        })
    }

    // -----------------------------------------------------------------------
    // psi

    /// psi(t) = int_0^inf h_{-x}(t) g(0,-x) dx, truncated at `psi_x_max`;
    /// psi(0) is the limit t -> 0+, by polynomial extrapolation.
    pub fn psi(&self, t: f64) -> Result<Estimate> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(ChernoffError::Domain(format!("psi needs t >= 0 (got {t})")));
        }
        let profile = SurvivalProfile::new(self, 0.0, self.spec.psi_x_max)?;
        if t > 0.0 {
            return self.psi_with(&profile, t);
        }
        let d = self.spec.psi_zero_delta;
        let ts = [d, d / 2.0, d / 4.0, d / 8.0];
        let mut vals = [0.0; 4];
        let mut err = 0.0;
        for (v, &ti) in vals.iter_mut().zip(&ts) {
            let e = self.psi_with(&profile, ti)?;
            *v = e.value;
            err += e.err_estimate * 8.0;
        }
        let value = lagrange_at_zero(&ts, &vals);
        // Difference against the 3-point extrapolant from the finest nodes.
        let coarse = lagrange_at_zero(&ts[1..], &vals[1..]);
        Ok(Estimate { value, err_estimate: err + (value - coarse).abs() })
    }

    fn psi_with(&self, profile: &SurvivalProfile, t: f64) -> Result<Estimate> {
        let contour = BromwichContour::new(t, self.spec.bromwich_nodes);
        let f = |x: f64| -> Complex64 {
            if x == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let h = match contour.eval(-x) {
                Ok(h) => h,
                Err(_) => return Complex64::new(f64::NAN, 0.0),
            };
            if h.abs() < 1e-18 {
                return Complex64::new(0.0, 0.0);
            }
            match profile.g(-x) {
                Ok(g) => Complex64::new(h * g, 0.0),
                Err(_) => Complex64::new(f64::NAN, 0.0),
            }
        };
        let xmax = self.spec.psi_x_max;
        let rt = t.sqrt();
        let mut breaks = vec![0.0];
        for m in [0.25, 0.5, 1.0, 2.0, 4.0, 8.0] {
            if m * rt < xmax {
                breaks.push(m * rt);
            }
        }
        let mut b = *breaks.last().unwrap_or(&0.0);
        while b + 1.0 < xmax {
            b += 1.0;
            breaks.push(b);
        }
        breaks.push(xmax);
        let r = quadrature::integrate_with_breaks(&f, &breaks, &QuadratureSpec::with_tol(self.spec.psi_abs_tol, 1e-10))?;
        Ok(Estimate { value: r.value.re, err_estimate: r.err_estimate })
    }

    // -----------------------------------------------------------------------
    // Maximum and its location

    /// Joint density of (tau_M, M) for the process started at `state`:
    /// exp((2/3)s^3 + 2s(x-a)) h_{x-a}(t-s) phi(t).
    pub fn joint_density_one_sided(&self, t: f64, a: f64, state: StartState) -> Result<Estimate> {
        let StartState { s, x } = state;
        if !(t > s && a > x) {
            return Err(ChernoffError::Domain(format!("joint density needs t > s and a > x (got t={t}, a={a})")));
        }
        let h = self.h_density(x - a, t - s)?;
        let p = self.phi(t)?;
        let e = ((2.0 / 3.0) * s.powi(3) + 2.0 * s * (x - a)).exp();
        Ok(Estimate {
            value: e * h.value * p.value,
            err_estimate: e * (h.err_estimate * p.value.abs() + p.err_estimate * h.value.abs()),
        })
    }

    /// Density of the maximum at `a`: d/dy Q^{(s,y)}(tau_0 < inf) at y = x - a,
    /// by central differences with one Richardson step.
    pub fn max_density_one_sided(&self, a: f64, state: StartState) -> Result<Estimate> {
        let StartState { s, x } = state;
        let y = x - a;
        let h = self.spec.fd_step;
        if !(a > x) {
            return Err(ChernoffError::Domain(format!("max density needs a > x (got a={a}, x={x})")));
        }
        if y + h > 0.0 {
            return Err(ChernoffError::StepDegenerate { y, step: h });
        }
        let p = |yy: f64| -> Result<(f64, f64)> {
            let r = self.hitting_prob(StartState { s, x: yy })?;
            Ok((r.raw, r.err_estimate))
        };
        let (p1, e1) = p(y + h)?;
        let (m1, f1) = p(y - h)?;
        let (p2, e2) = p(y + 0.5 * h)?;
        let (m2, f2) = p(y - 0.5 * h)?;
        let d1 = (p1 - m1) / (2.0 * h);
        let d2 = (p2 - m2) / h;
        let value = (4.0 * d2 - d1) / 3.0;
        let noise = (e1 + f1) / (2.0 * h) / 3.0 + 4.0 * (e2 + f2) / h / 3.0;
        Ok(Estimate { value, err_estimate: noise + (d2 - d1).abs() / 3.0 })
    }

    /// Joint density of (argmax, max) for two-sided W(t) - t^2:
    /// h_{-a}(|t|) g(0,-a) phi(|t|).
    pub fn joint_density_two_sided(&self, t: f64, a: f64) -> Result<Estimate> {
        if !(a > 0.0) {
            return Err(ChernoffError::Domain(format!("two-sided joint density needs a > 0 (got {a})")));
        }
        if t == 0.0 {
            return Ok(Estimate { value: 0.0, err_estimate: 0.0 });
        }
        let at = t.abs();
        let h = self.h_density(-a, at)?;
        let g = self.g_fun(StartState { s: 0.0, x: -a })?;
        let p = self.phi(at)?;
        let v = h.value * g.value * p.value;
        let err = h.err_estimate * (g.value * p.value).abs()
            + g.err_estimate * (h.value * p.value).abs()
            + p.err_estimate * (h.value * g.value).abs();
        Ok(Estimate { value: v, err_estimate: err })
    }

    /// Density of the two-sided maximum: 2 g(0,-a) int_0^inf h_{-a}(t) phi(t) dt.
    pub fn max_density_two_sided(&self, a: f64) -> Result<Estimate> {
        let profile = SurvivalProfile::new(self, 0.0, a.max(1e-12))?;
        self.max_density_two_sided_with(&profile, a)
    }

    pub fn max_density_two_sided_with(&self, profile: &SurvivalProfile, a: f64) -> Result<Estimate> {
        if !(a > 0.0) {
            return Err(ChernoffError::Domain(format!("two-sided max density needs a > 0 (got {a})")));
        }
        let g = profile.g(-a)?;
        let upper = 4.5;
        let n = self.spec.bromwich_nodes;
        let f = |t: f64| -> Complex64 {
            match (BromwichContour::new(t, n).eval(-a), self.phi(t)) {
                (Ok(h), Ok(p)) => Complex64::new(h * p.value, 0.0),
                _ => Complex64::new(f64::NAN, 0.0),
            }
        };
        let breaks = time_breaks(-a, upper);
        let r = quadrature::integrate_with_breaks(&f, &breaks, &QuadratureSpec::with_tol(1e-12, 1e-10))?;
        Ok(Estimate { value: 2.0 * g * r.value.re, err_estimate: 2.0 * g * r.err_estimate })
    }
}

/// Value at 0 of the interpolating polynomial through (ts, vs).
fn lagrange_at_zero(ts: &[f64], vs: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..ts.len() {
        let mut w = 1.0;
        for j in 0..ts.len() {
            if i != j {
                w *= ts[j] / (ts[j] - ts[i]);
            }
        }
        s += w * vs[i];
    }
    s
}

/// Integral over the real line of an integrand with f(-u) = conj f(u): twice
/// the real part of the integral over [0, inf).
pub fn integrate_hermitian<F, T>(
    f: &F,
    decay: &T,
    spec: &QuadratureSpec,
) -> std::result::Result<quadrature::QuadratureResult, QuadratureError>
where
    F: Fn(f64) -> Complex64,
    T: TailBound + ?Sized,
{
    let half = |u: f64| -> Complex64 {
        if u < 0.0 {
            f(-u).conj()
        } else {
            f(u)
        }
    };
    match spec.scheme {
        Scheme::Trapezoid { .. } => hermitian_trapezoid(&half, decay, spec),
        Scheme::GaussKronrod => quadrature::integrate_real_line(&half, decay, spec),
    }
}

fn hermitian_trapezoid<F, T>(
    f: &F,
    decay: &T,
    spec: &QuadratureSpec,
) -> std::result::Result<quadrature::QuadratureResult, QuadratureError>
where
    F: Fn(f64) -> Complex64,
    T: TailBound + ?Sized,
{
    spec.validate()?;
    let cut = match spec.truncation {
        Truncation::HalfWidth(u) => u,
        Truncation::Auto => {
            let goal = 0.5 * spec.abs_tol;
            let (mut lo, mut hi) = (5.0f64, 200.0f64);
            if decay.tail(lo) <= goal {
                hi = lo;
            } else if decay.tail(hi) <= goal {
                for _ in 0..60 {
                    let m = 0.5 * (lo + hi);
                    if decay.tail(m) <= goal {
                        hi = m;
                    } else {
                        lo = m;
                    }
                }
            }
            hi
        }
    };
    let tail = decay.tail(cut);
    let h0 = match spec.scheme {
        Scheme::Trapezoid { initial_step } => initial_step,
        Scheme::GaussKronrod => 0.5,
    };
    // Level sums over k >= 1 (real parts doubled) plus the u = 0 node.
    let level = |h: f64, odd: bool| -> std::result::Result<(f64, f64, usize), QuadratureError> {
        let kmax = (cut / h).floor() as usize;
        let mut vals = Vec::with_capacity(kmax);
        let mut abs = 0.0;
        for k in 1..=kmax {
            if odd && k % 2 == 0 {
                continue;
            }
            let u = k as f64 * h;
            let v = f(u);
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(QuadratureError::NonFinite { at: u });
            }
            abs += 2.0 * v.norm();
            vals.push(Complex64::new(2.0 * v.re, 0.0));
        }
        Ok((quadrature::pairwise_sum(&vals).re, abs, vals.len()))
    };
    let f0 = f(0.0);
    if !(f0.re.is_finite()) {
        return Err(QuadratureError::NonFinite { at: 0.0 });
    }
    let mut h = h0;
    let (mut sum, mut abs, mut evals) = level(h, false)?;
    sum += f0.re;
    abs += f0.norm();
    evals += 1;
    let mut prev = sum * h;
    for depth in 1..=12 {
        h *= 0.5;
        let (s, a, n) = level(h, true)?;
        sum += s;
        abs += a;
        evals += n;
        let value = sum * h;
        let err = (value - prev).abs() + tail + 20.0 * f64::EPSILON * abs * h;
        let r = quadrature::QuadratureResult {
            value: Complex64::new(value, 0.0),
            err_estimate: err,
            evaluations: evals,
            truncation_used: cut,
        };
        if err <= spec.abs_tol.max(spec.rel_tol * value.abs()) {
            return Ok(r);
        }
        if depth == 12 || evals >= spec.max_subdivisions * 15 {
            return Err(QuadratureError::BudgetExceeded { best: r });
        }
        prev = value;
    }
    unreachable!()
}

/// g(s, x) for many x at one s: per-node data of the u-rule are computed
/// once, and the inner y-integral is accumulated over unit panels.
pub struct SurvivalProfile {
    s: f64,
    us: Vec<f64>,
    // u-rule weights (trapezoid, with the u = 0 node halved) times 1/(2 pi)
    uw: Vec<f64>,
    ln_base: Vec<Complex64>,
    // cum[i][j] = int_0^j e^{-beta s w} Ai(w)/Ai(iu_i)^2 dy, w = y + iu_i
    cum: Vec<Vec<Complex64>>,
    pub err_estimate: f64,
}

impl SurvivalProfile {
    pub fn new(solver: &Solver, s: f64, x_max_abs: f64) -> Result<Self> {
        let len_max = KAPPA * x_max_abs.abs();
        let panels = len_max.ceil() as usize;
        // Fix the u-step by converging g at the deepest level.
        let probe = solver.g_fun(StartState { s, x: -x_max_abs.abs().max(1e-12) })?;
        let bound = airy_ratio_tail_bound(len_max);
        let scale = len_max * (-BETA * s * len_max).exp().max(1.0) * ((2.0 * s * x_max_abs).abs()).exp();
        let mut cut = 5.0;
        while scale * bound.tail(cut) > 1e-16 && cut < 200.0 {
            cut += 0.5;
        }
        let h = solver.spec.axis_step / 2.0;
        let n = (cut / h).ceil() as usize;
        let (gx, gw) = quadrature::gl32();
        let mut us = Vec::with_capacity(n + 1);
        let mut uw = Vec::with_capacity(n + 1);
        let mut ln_base = Vec::with_capacity(n + 1);
        let mut cum = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let u = k as f64 * h;
            let lb = 2.0 * airy::ln_ai(Complex64::new(0.0, u))?;
            let mut c = vec![Complex64::new(0.0, 0.0)];
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..panels {
                for (x, w) in gx.iter().zip(gw) {
                    let y = j as f64 + 0.5 * (x + 1.0);
                    let zz = Complex64::new(y, u);
                    acc += 0.5 * w * (airy::ln_ai(zz)? - BETA * s * zz - lb).exp();
                }
                c.push(acc);
            }
            us.push(u);
            uw.push(if k == 0 { h } else { 2.0 * h } / (2.0 * PI));
            ln_base.push(lb);
            cum.push(c);
        }
        Ok(SurvivalProfile { s, us, uw, ln_base, cum, err_estimate: probe.err_estimate })
    }

    /// g(s, x) for -x no larger than the profile depth.
    pub fn g(&self, x: f64) -> Result<f64> {
        if x >= 0.0 {
            return Ok(0.0);
        }
        let len = -KAPPA * x;
        let full = len.floor() as usize;
        let full = full.min(self.cum[0].len() - 1);
        let rest = len - full as f64;
        let (gx, gw) = quadrature::gl32();
        let s = self.s;
        let mut total = 0.0;
        for (i, &u) in self.us.iter().enumerate() {
            let mut acc = self.cum[i][full];
            if rest > 0.0 {
                for (xx, w) in gx.iter().zip(gw) {
                    let y = full as f64 + 0.5 * rest * (xx + 1.0);
                    let zz = Complex64::new(y, u);
                    acc += 0.5 * rest * w * (airy::ln_ai(zz)? - BETA * s * zz - self.ln_base[i]).exp();
                }
            }
            total += self.uw[i] * acc.re;
        }
        Ok((-2.0 * s * x).exp() * total)
    }
}

// ---------------------------------------------------------------------------
// Tables

/// Which density a [`DensityTable`] holds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TableKind {
    /// f_Z(t), the density of the two-sided argmax.
    Argmax,
    /// One-sided maximum density in a, started at `state`.
    Max { state: StartState },
    /// Two-sided maximum density in a (marginal of the joint density).
    JointMarginal,
    /// First-passage density at absolute time t, started at `state`.
    FirstPassage { state: StartState },
    /// phi(t).
    Phi,
    /// h_x(t).
    HKernel { x: f64 },
}

impl TableKind {
    /// CSV column name of the abscissa.
    pub fn abscissa(&self) -> &'static str {
        match self {
            TableKind::Max { .. } | TableKind::JointMarginal => "a",
            _ => "t",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableMeta {
    pub numerics: NumericsSpec,
    /// Analytic value of the full integral, when one exists.
    pub mass_target: Option<f64>,
    /// Tolerance the trapezoid mass should meet on a fine, wide grid.
    pub mass_tolerance: f64,
    /// Points whose small negative value (within its error) was set to 0.
    pub clamped: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityTable {
    pub kind: TableKind,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
    /// Indices whose evaluation failed; their value is NaN.
    pub failed: Vec<usize>,
    pub meta: TableMeta,
}

impl DensityTable {
    /// Trapezoid rule over the grid.
    pub fn trapezoid_mass(&self) -> f64 {
        self.grid
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(g, v)| 0.5 * (g[1] - g[0]) * (v[0] + v[1]))
            .sum()
    }

    /// CSV with a header line and 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = format!("{},f\n", self.kind.abscissa());
        for (g, v) in self.grid.iter().zip(&self.values) {
            out.push_str(&format!("{g:.16e},{v:.16e}\n"));
        }
        out
    }
}

/// Grid `from, from + step, ...` up to `to` (inclusive within step/1e6).
pub fn uniform_grid(from: f64, to: f64, step: f64) -> Result<Vec<f64>> {
    if !(from.is_finite() && to.is_finite() && step > 0.0 && to >= from) {
        return Err(ChernoffError::Domain(format!("bad grid from={from} to={to} step={step}")));
    }
    let n = ((to - from) / step + 1e-6).floor() as usize;
    Ok((0..=n).map(|i| from + i as f64 * step).collect())
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() || grid.iter().any(|g| !g.is_finite()) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(ChernoffError::Domain("grid must be finite and strictly increasing".into()));
    }
    Ok(())
}

#[cfg(feature = "parallel")]
fn map_points<F: Fn(f64) -> Result<Estimate> + Sync>(grid: &[f64], f: F) -> Vec<Result<Estimate>> {
    use rayon::prelude::*;
    grid.par_iter().map(|&g| f(g)).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_points<F: Fn(f64) -> Result<Estimate>>(grid: &[f64], f: F) -> Vec<Result<Estimate>> {
    grid.iter().map(|&g| f(g)).collect()
}

impl Solver {
    /// Evaluate `kind` on `grid`. Every point is an independent computation,
    /// so the result does not depend on evaluation order or thread count.
    pub fn tabulate(&self, kind: TableKind, grid: &[f64]) -> Result<DensityTable> {
        check_grid(grid)?;
        let zero = Estimate { value: 0.0, err_estimate: 0.0 };
        let (raw, mass_target, mass_tolerance) = match kind {
            TableKind::Argmax => (map_points(grid, |t| self.chernoff_density(t)), Some(1.0), 1e-5),
            TableKind::Phi => (map_points(grid, |t| self.phi(t)), None, 0.0),
            TableKind::HKernel { x } => {
                let target = h_laplace(0.0, x)?;
                (
                    map_points(grid, |t| if t <= 0.0 { Ok(zero) } else { self.h_density(x, t) }),
                    Some(target),
                    1e-5,
                )
            }
            TableKind::FirstPassage { state } => {
                let target = self.hitting_prob(state)?.value;
                (map_points(grid, |t| self.first_passage_density(state, t)), Some(target), 1e-5)
            }
            TableKind::Max { state } => (
                map_points(grid, |a| if a <= state.x { Ok(zero) } else { self.max_density_one_sided(a, state) }),
                Some(1.0),
                1e-4,
            ),
            TableKind::JointMarginal => {
                let depth = grid.iter().fold(0.0f64, |m, &a| m.max(a));
                let profile = SurvivalProfile::new(self, 0.0, depth.max(1e-3))?;
                (
                    map_points(grid, |a| if a <= 0.0 { Ok(zero) } else { self.max_density_two_sided_with(&profile, a) }),
                    Some(1.0),
                    1e-4,
                )
            }
        };
        let mut values = Vec::with_capacity(grid.len());
        let mut errors = Vec::with_capacity(grid.len());
        let mut failed = Vec::new();
        let mut clamped = Vec::new();
        for (i, r) in raw.into_iter().enumerate() {
            match r {
                Ok(e) => {
                    let v = if e.value < 0.0 && e.value >= -e.err_estimate {
                        clamped.push(i);
                        0.0
                    } else {
                        e.value
                    };
                    values.push(v);
                    errors.push(e.err_estimate);
                }
                Err(_) => {
                    failed.push(i);
                    values.push(f64::NAN);
                    errors.push(f64::NAN);
                }
            }
        }
        Ok(DensityTable {
            kind,
            grid: grid.to_vec(),
            values,
            errors,
            failed,
            meta: TableMeta { numerics: self.spec, mass_target, mass_tolerance, clamped },
        })
    }

    /// Two-sided joint density of (argmax, max) on a product grid, rows
    /// `(t, a, f)` with t varying slowest.
    pub fn tabulate_joint(&self, ts: &[f64], as_: &[f64]) -> Result<Vec<(f64, f64, f64)>> {
        check_grid(ts)?;
        check_grid(as_)?;
        let depth = as_.iter().fold(0.0f64, |m, &a| m.max(a));
        let profile = SurvivalProfile::new(self, 0.0, depth.max(1e-3))?;
        let gs: Vec<f64> = as_.iter().map(|&a| profile.g(-a.max(0.0))).collect::<Result<_>>()?;
        let mut rows = Vec::with_capacity(ts.len() * as_.len());
        for &t in ts {
            let at = t.abs();
            let p = if at > 0.0 { self.phi(at)?.value } else { 0.0 };
            for (&a, &g) in as_.iter().zip(&gs) {
                let f = if a > 0.0 && at > 0.0 { self.h_density(-a, at)?.value * g * p } else { 0.0 };
                rows.push((t, a, f.max(0.0)));
            }
        }
        Ok(rows)
    }
}

/// CDF of Chernoff's distribution from a fine table of f_Z: cumulative
/// Simpson sums outward from F(0) = 1/2, linear in between nodes.
#[derive(Clone, Debug)]
pub struct ArgmaxCdf {
    step: f64,
    // cum[k] = int_0^{2k step} f_Z
    cum: Vec<f64>,
}

impl ArgmaxCdf {
    pub fn new(solver: &Solver, half_width: f64, step: f64) -> Result<Self> {
        let n = (half_width / step).ceil() as usize;
        let n = n + n % 2;
        let grid: Vec<f64> = (0..=n).map(|k| k as f64 * step).collect();
        let table = solver.tabulate(TableKind::Argmax, &grid)?;
        if !table.failed.is_empty() {
            return Err(ChernoffError::Domain(format!("f_Z failed at {} grid points", table.failed.len())));
        }
        let v = &table.values;
        let mut cum = vec![0.0];
        for k in (0..n).step_by(2) {
            let last = *cum.last().unwrap_or(&0.0);
            cum.push(last + step / 3.0 * (v[k] + 4.0 * v[k + 1] + v[k + 2]));
        }
        Ok(ArgmaxCdf { step: 2.0 * step, cum })
    }

    /// Mass of f_Z on the tabulated range; 1 minus the truncated tails.
    pub fn mass(&self) -> f64 {
        2.0 * self.cum.last().copied().unwrap_or(0.0)
    }

    pub fn eval(&self, t: f64) -> f64 {
        let a = t.abs() / self.step;
        let k = a.floor() as usize;
        let half = if k + 1 >= self.cum.len() {
            *self.cum.last().unwrap_or(&0.0)
        } else {
            let w = a - k as f64;
            (1.0 - w) * self.cum[k] + w * self.cum[k + 1]
        };
        if t >= 0.0 {
            0.5 + half
        } else {
            0.5 - half
        }
    }
}

// ---------------------------------------------------------------------------
// Closed forms

/// First-passage density of driftless Brownian motion from z > 0 to 0.
pub fn bm_first_passage_density(z: f64, u: f64) -> f64 {
    z * (-z * z / (2.0 * u)).exp() / (2.0 * PI * u * u * u).sqrt()
}

// ---------------------------------------------------------------------------
// Free-function forms with default numerics

pub fn h_density(x: f64, t: f64) -> Result<Estimate> {
    Solver::default().h_density(x, t)
}

pub fn hitting_prob(state: StartState) -> Result<Probability> {
    Solver::default().hitting_prob(state)
}

pub fn g_fun(state: StartState) -> Result<Estimate> {
    Solver::default().g_fun(state)
}

pub fn survival_prob(state: StartState) -> Result<Probability> {
    Solver::default().survival_prob(state)
}

pub fn phi(t: f64) -> Result<Estimate> {
    Solver::default().phi(t)
}

pub fn chernoff_density(t: f64) -> Result<Estimate> {
    Solver::default().chernoff_density(t)
}

pub fn psi(t: f64) -> Result<Estimate> {
    Solver::default().psi(t)
}

pub fn joint_density_one_sided(t: f64, a: f64, state: StartState) -> Result<Estimate> {
    Solver::default().joint_density_one_sided(t, a, state)
}

pub fn max_density_one_sided(a: f64, state: StartState) -> Result<Estimate> {
    Solver::default().max_density_one_sided(a, state)
}

pub fn joint_density_two_sided(t: f64, a: f64) -> Result<Estimate> {
    Solver::default().joint_density_two_sided(t, a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(s: f64, x: f64) -> StartState {
        StartState::new(s, x).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    // Reference values below come from an independent mpmath computation
    // (inversion along the imaginary axis, 30-digit Airy functions).
    #[test]
    fn h_matches_reference() {
        let sv = Solver::default();
        for (t, want, tol) in [(0.5, 0.2107097591599, 1e-12), (2.0, 0.00257611442922, 1e-11), (5.0, 3.7318097e-07, 1e-7)] {
            let h = sv.h_density(-1.0, t).unwrap();
            assert!(rel(h.value, want) < tol, "t={t}: {} vs {want}", h.value);
            assert!(h.err_estimate < 1e-12);
        }
        assert!(sv.h_density_imag(-1.0, 0.5).unwrap().abs() < 1e-14);
    }

    #[test]
    fn h_rejects_bad_domain() {
        assert!(matches!(h_density(0.0, 1.0), Err(ChernoffError::Domain(_))));
        assert!(matches!(h_density(-1.0, 0.0), Err(ChernoffError::Domain(_))));
        assert!(StartState::new(0.0, 0.5).is_err());
    }

    #[test]
    fn h_laplace_transform_roundtrip() {
        let sv = Solver::default();
        let (lambda, x) = (1.0, -1.0);
        let r = sv.time_integral(x, 40.0, |u| (-lambda * u).exp()).unwrap();
        assert!((r.value - h_laplace(lambda, x).unwrap()).abs() < 1e-10);
        assert!((h_laplace(1.0, -1.0).unwrap() - 0.1119108630657138).abs() < 1e-14);
    }

    #[test]
    fn f_and_g_reference_and_master_relation() {
        let sv = Solver::default();
        let f = sv.f_fun(st(0.0, -1.0)).unwrap();
        let g = sv.g_fun(st(0.0, -1.0)).unwrap();
        assert!((f.value - 0.15244399359279526).abs() < 1e-12);
        assert!((g.value - 0.8475560064072082).abs() < 1e-12);
        assert!((g_fun(st(0.0, -0.1)).unwrap().value - 0.1224310740192891).abs() < 1e-12);
        let (s, x) = (1.5, -1.0);
        let f = sv.f_fun(st(s, x)).unwrap().value;
        let g = sv.g_fun(st(s, x)).unwrap().value;
        assert!((f - 0.002650980471283107).abs() < 1e-13);
        let want = (-2.0 * s * x - (2.0 / 3.0) * s.powi(3)).exp();
        assert!(rel(f + g, want) < 1e-11);
    }

    #[test]
    fn probabilities_are_complementary() {
        let state = st(-0.5, -0.7);
        let hit = hitting_prob(state).unwrap();
        let surv = survival_prob(state).unwrap();
        assert!(!hit.clamped && !surv.clamped);
        assert!((hit.value + surv.value - 1.0).abs() < 1e-11);
        assert_eq!(hitting_prob(st(2.0, 0.0)).unwrap().value, 1.0);
    }

    #[test]
    fn phi_reference_and_contour_independence() {
        let sv = Solver::default();
        for (t, want) in [
            (-3.0, 3.282895510077559e-4),
            (-1.0, 0.10899715679643505),
            (0.0, 1.231539327876874),
            (0.5, 2.404964203071404),
            (1.0, 2.218042475476956),
        ] {
            let p = sv.phi(t).unwrap();
            assert!(rel(p.value, want) < 1e-10, "phi({t}) = {} vs {want}", p.value);
        }
        let a = sv.phi_on_line(1.0, 0.0).unwrap().value;
        let b = sv.phi_on_line(1.0, 3.0).unwrap().value;
        assert!(rel(a, b) < 1e-11);
    }

    #[test]
    fn chernoff_density_symmetric_and_peak() {
        let a = chernoff_density(0.7).unwrap().value;
        let b = chernoff_density(-0.7).unwrap().value;
        assert_eq!(a, b);
        assert!((chernoff_density(0.0).unwrap().value - 0.7583445580537114).abs() < 1e-11);
    }

    #[test]
    fn p_fun_equals_cubic_exponential() {
        let sv = Solver::default();
        for s in [0.0, 1.0] {
            let p = sv.p_fun(s).unwrap().value;
            assert!(rel(p, (-(2.0 / 3.0) * s.powi(3)).exp()) < 1e-10);
        }
    }

    #[test]
    fn psi_matches_half_phi_reflected() {
        let sv = Solver::default();
        let p = sv.psi(1.0).unwrap().value;
        assert!((p - 0.5 * sv.phi(-1.0).unwrap().value).abs() < 1e-8);
    }

    #[test]
    fn two_sided_max_density_factorises() {
        let sv = Solver::default();
        let fm = sv.max_density_two_sided(1.0).unwrap().value;
        let k = sv.max_density_one_sided(1.0, st(0.0, 0.0)).unwrap().value;
        let g = sv.g_fun(st(0.0, -1.0)).unwrap().value;
        assert!(rel(fm, 2.0 * g * k) < 1e-7, "{fm} vs {}", 2.0 * g * k);
    }

    #[test]
    fn one_sided_max_step_degenerate() {
        let e = max_density_one_sided(-0.99995, st(0.0, -1.0));
        assert!(matches!(e, Err(ChernoffError::StepDegenerate { .. })));
    }

    #[test]
    fn joint_one_sided_integrates_to_max_density() {
        // int_s^inf f(t, a) dt is the max density at a.
        let sv = Solver::default();
        let state = st(0.0, -1.0);
        let a = -0.5;
        let f = |t: f64| Complex64::new(sv.joint_density_one_sided(t, a, state).unwrap().value, 0.0);
        let r = quadrature::integrate_with_breaks(&f, &[0.0, 0.01, 0.1, 0.5, 1.0, 2.0, 4.0], &QuadratureSpec::with_tol(1e-12, 1e-10))
            .unwrap();
        let m = sv.max_density_one_sided(a, state).unwrap().value;
        assert!(rel(r.value.re, m) < 1e-6, "{} vs {m}", r.value.re);
    }

    #[test]
    fn bm_passage_closed_form() {
        let want = (-0.5f64).exp() / (2.0 * PI).sqrt();
        assert!((bm_first_passage_density(1.0, 1.0) - want).abs() < 1e-16);
        let f = |u: f64| Complex64::new(bm_first_passage_density(1.0, u), 0.0);
        let r = quadrature::integrate_with_breaks(&f, &[0.0, 0.1, 1.0, 10.0, 100.0, 1e4, 1e6, 1e8, 1e10], &QuadratureSpec::with_tol(1e-10, 1e-10))
            .unwrap();
        // mass beyond 1e10 is erf(1/sqrt(2e10)) ~ 5.6e-6
        assert!((r.value.re - 1.0).abs() < 1e-5);
    }

    #[test]
    fn tables() {
        let sv = Solver::default();
        let grid = uniform_grid(-1.0, 1.0, 0.25).unwrap();
        assert_eq!(grid.len(), 9);
        let t = sv.tabulate(TableKind::Argmax, &grid).unwrap();
        assert!(t.failed.is_empty());
        for i in 0..grid.len() {
            assert!((t.values[i] - t.values[grid.len() - 1 - i]).abs() < 1e-12);
        }
        let csv = t.to_csv();
        assert!(csv.starts_with("t,f\n") && csv.ends_with('\n'));
        assert_eq!(csv.lines().count(), 10);
        assert!(sv.tabulate(TableKind::Phi, &[0.0, 0.0]).is_err());
        let j = sv.tabulate_joint(&[-0.5, 0.5], &[0.5, 1.0]).unwrap();
        assert_eq!(j.len(), 4);
        assert_eq!(j[0].2, j[2].2);
    }
}
