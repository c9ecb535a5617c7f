//! Complex Airy functions Ai, Ai', Bi, Bi', Scorer's Hi and the incomplete
//! Scorer integral.
//!
//! Three evaluation regimes, selected from `z` alone:
//! * `|z| < SWITCH_RADIUS`: Maclaurin series summed in double-double.
//! * `|z| >= SWITCH_RADIUS`, `|ph z| <= 2pi/3`: asymptotic series in `1/zeta`.
//! * `|z| >= SWITCH_RADIUS`, `|ph z| > 2pi/3`: the connection formula
//!   `Ai(z) = -w Ai(w z) - w' Ai(w' z)` with `w = e^{2 pi i/3}`, which moves
//!   both evaluations back into the asymptotic sector.
//!
//! Integrands built from ratios of Airy functions should go through the
//! logarithmic entry points ([`ln_ai`], [`ln_ai_shift_ratio`]); plain values
//! overflow long before the ratios do.

use crate::dd::{Dd, DdComplex};
use crate::quadrature::{self, QuadratureSpec};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::{FRAC_PI_3, PI};
use std::sync::OnceLock;
use thiserror::Error;

pub type ComplexValue = Complex64;

/// Radius separating the Maclaurin regime from the asymptotic ones.
pub const SWITCH_RADIUS: f64 = 8.5;

const LN_2_SQRT_PI: f64 = 1.265_512_123_484_645_4;
const SQRT3: f64 = 1.732_050_807_568_877_2;
// Largest |Re zeta| for which exp(+-zeta) stays inside binary64.
const MAX_EXPONENT: f64 = 700.0;
const MAX_SERIES_TERMS: usize = 48;
const MAX_ASYMPTOTIC_TERMS: usize = 64;

// Ai(0), -Ai'(0), sqrt(3) Ai(0), -sqrt(3) Ai'(0) to double-double precision.
const C1: Dd = Dd::new(0.355_028_053_887_817_2, 2.052_336_324_362_12e-17);
const C2: Dd = Dd::new(0.258_819_403_792_806_8, -2.522_243_111_610_832e-17);
const S3C1: Dd = Dd::new(0.614_926_627_446_000_7, 5.089_920_779_489_141_6e-17);
const S3C2: Dd = Dd::new(0.448_288_357_353_826_4, -2.536_323_777_441_730_5e-17);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RegimeTag {
    MaclaurinSeries,
    AsymptoticExpansion,
    RotatedConnection,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EvalRegime {
    pub tag: RegimeTag,
    pub switch_radius: f64,
}

/// Ai, Ai', Bi, Bi' at one point with an absolute error estimate covering
/// all four values.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AiryBundle {
    pub ai: ComplexValue,
    pub aip: ComplexValue,
    pub bi: ComplexValue,
    pub bip: ComplexValue,
    pub abs_err_estimate: f64,
    pub regime: EvalRegime,
}

impl AiryBundle {
    pub fn wronskian(&self) -> ComplexValue {
        self.ai * self.bip - self.aip * self.bi
    }
}

#[derive(Clone, Copy, Debug, Error, PartialEq)]
pub enum AiryError {
    #[error("argument is not finite")]
    NonFinite,
    #[error("|Re zeta| = {0:.1} overflows binary64; use the log-scaled entry points")]
    Overflow(f64),
}

/// `Ai(z) = exp(log_modulus + i*phase)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogAiry {
    pub log_modulus: f64,
    pub phase: f64,
}

impl LogAiry {
    pub fn to_complex_log(self) -> ComplexValue {
        Complex64::new(self.log_modulus, self.phase)
    }
}

pub fn regime(z: ComplexValue) -> EvalRegime {
    let tag = if z.norm() < SWITCH_RADIUS {
        RegimeTag::MaclaurinSeries
    } else if z.arg().abs() <= 2.0 * FRAC_PI_3 {
        RegimeTag::AsymptoticExpansion
    } else {
        RegimeTag::RotatedConnection
    };
    EvalRegime { tag, switch_radius: SWITCH_RADIUS }
}

fn omega() -> Complex64 {
    Complex64::new(-0.5, 0.5 * SQRT3)
}

// ---------------------------------------------------------------------------
// Maclaurin regime

struct SeriesTables {
    ra: Vec<Dd>,
    rb: Vec<Dd>,
    rap: Vec<Dd>,
    rbp: Vec<Dd>,
}

fn series_tables() -> &'static SeriesTables {
    static T: OnceLock<SeriesTables> = OnceLock::new();
    T.get_or_init(|| {
        let one = Dd::from_f64(1.0);
        let mut t = SeriesTables { ra: vec![], rb: vec![], rap: vec![], rbp: vec![] };
        for k in 0..=MAX_SERIES_TERMS {
            let kf = k as f64;
            if k == 0 {
                t.ra.push(Dd::ZERO);
                t.rb.push(Dd::ZERO);
                t.rap.push(Dd::ZERO);
                t.rbp.push(Dd::ZERO);
                continue;
            }
            t.ra.push(one.div_f64((3.0 * kf - 1.0) * (3.0 * kf)));
            t.rb.push(one.div_f64((3.0 * kf) * (3.0 * kf + 1.0)));
            t.rap.push(if k == 1 { Dd::ZERO } else { one.div_f64((3.0 * kf - 3.0) * (3.0 * kf - 1.0)) });
            t.rbp.push(one.div_f64((3.0 * kf) * (3.0 * kf - 2.0)));
        }
        t
    })
}

struct Maclaurin {
    ai: Complex64,
    aip: Complex64,
    bi: Complex64,
    bip: Complex64,
    err: f64,
}

// Ai = c1 f - c2 g, Bi = sqrt3 (c1 f + c2 g), with
// f = sum 3^k (1/3)_k z^{3k}/(3k)!, g = sum 3^k (2/3)_k z^{3k+1}/(3k+1)!.
fn maclaurin_dd(z: Complex64) -> Maclaurin {
    let tab = series_tables();
    let zd = DdComplex::from_c64(z);
    let z3 = zd * zd * zd;
    let mut a = DdComplex::from_c64(Complex64::new(1.0, 0.0));
    let mut b = zd;
    let mut ap = (zd * zd).scale(Dd::from_f64(0.5));
    let mut bp = a;
    let (mut f, mut g, mut fp, mut gp) = (a, b, ap, bp);
    let mut omitted = 0.0;
    for k in 1..=MAX_SERIES_TERMS {
        a = (a * z3).scale(tab.ra[k]);
        b = (b * z3).scale(tab.rb[k]);
        if k >= 2 {
            ap = (ap * z3).scale(tab.rap[k]);
        }
        bp = (bp * z3).scale(tab.rbp[k]);
        f = f + a;
        g = g + b;
        if k >= 2 {
            fp = fp + ap;
        }
        gp = gp + bp;
        let big = f.norm_f64().max(g.norm_f64()).max(fp.norm_f64()).max(gp.norm_f64()).max(1.0);
        let last = a.norm_f64().max(b.norm_f64()).max(ap.norm_f64()).max(bp.norm_f64());
        if k >= 2 && last <= 1e-34 * big {
            // First omitted term is smaller than the last one by |z|^3/(9k^2).
            omitted = last * (z3.norm_f64() / (9.0 * (k as f64).powi(2))).min(1.0);
            break;
        }
        omitted = last;
    }
    let ai = (f.scale(C1) - g.scale(C2)).to_c64();
    let aip = (fp.scale(C1) - gp.scale(C2)).to_c64();
    let bi = (f.scale(S3C1) + g.scale(S3C2)).to_c64();
    let bip = (fp.scale(S3C1) + gp.scale(S3C2)).to_c64();
    let big = ai.norm().max(aip.norm()).max(bi.norm()).max(bip.norm());
    Maclaurin { ai, aip, bi, bip, err: omitted + 2.0 * f64::EPSILON * big }
}

// Ai alone, summed in binary64 first and redone in double-double when the
// cancellation is too severe.
fn maclaurin_ai(z: Complex64) -> Complex64 {
    let z3 = z * z * z;
    let tab = series_tables();
    let mut a = Complex64::new(1.0, 0.0);
    let mut b = z;
    let (mut f, mut g) = (a, b);
    let (mut sa, mut sb) = (1.0, z.norm());
    for k in 1..=MAX_SERIES_TERMS {
        a = a * z3 * tab.ra[k].hi;
        b = b * z3 * tab.rb[k].hi;
        f += a;
        g += b;
        let (na, nb) = (a.norm(), b.norm());
        sa += na;
        sb += nb;
        if na.max(nb) <= 1e-17 * f.norm().max(g.norm()) {
            break;
        }
    }
    let ai = f * C1.hi - g * C2.hi;
    let scale = C1.hi * sa + C2.hi * sb;
    if scale * 8.0 * f64::EPSILON <= 5e-14 * ai.norm() {
        ai
    } else {
        maclaurin_dd(z).ai
    }
}

// ---------------------------------------------------------------------------
// Asymptotic regime

struct AsymCoeffs {
    u: Vec<f64>,
    v: Vec<f64>,
}

fn asym_coeffs() -> &'static AsymCoeffs {
    static C: OnceLock<AsymCoeffs> = OnceLock::new();
    C.get_or_init(|| {
        let mut u = vec![1.0];
        let mut v = vec![1.0];
        for k in 1..MAX_ASYMPTOTIC_TERMS {
            let kf = k as f64;
            let uk = u[k - 1] * (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0)
                / ((2.0 * kf - 1.0) * 216.0 * kf);
            u.push(uk);
            v.push(-(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * uk);
        }
        AsymCoeffs { u, v }
    })
}

#[derive(Clone, Copy)]
struct Series {
    sum: Complex64,
    last: f64,
}

// sum_k (-1)^k c_k zeta^{-k}, stopped at convergence or when terms start growing.
fn asym_series(inv_zeta: Complex64, c: &[f64]) -> Series {
    let mut sum = Complex64::new(1.0, 0.0);
    let mut p = Complex64::new(1.0, 0.0);
    let mut last = 1.0;
    for &ck in &c[1..] {
        p *= -inv_zeta;
        let term = p * ck;
        let m = term.norm();
        if m > last {
            break;
        }
        sum += term;
        last = m;
        if m <= 0.25 * f64::EPSILON * sum.norm() {
            break;
        }
    }
    Series { sum, last }
}

/// Leading-exponential branch e^{-zeta}/(2 sqrt(pi) w^{1/4}) * S(zeta),
/// valid for |ph w| < pi and large |w|.
#[derive(Clone, Copy)]
struct Branch {
    sqrt_w: Complex64,
    zeta: Complex64,
    ln_w: Complex64,
    su: Series,
}

impl Branch {
    fn new(w: Complex64) -> Self {
        let sqrt_w = w.sqrt();
        let zeta = w * sqrt_w * (2.0 / 3.0);
        let su = asym_series(zeta.inv(), &asym_coeffs().u);
        Branch { sqrt_w, zeta, ln_w: w.ln(), su }
    }

    fn ln_ai(&self) -> Complex64 {
        -self.zeta - LN_2_SQRT_PI - 0.25 * self.ln_w + self.su.sum.ln()
    }

    /// ln(-Ai'(w)) and the relative size of the last series term.
    fn ln_neg_aip_with_err(&self) -> (Complex64, f64) {
        let sv = asym_series(self.zeta.inv(), &asym_coeffs().v);
        (
            -self.zeta - LN_2_SQRT_PI + 0.25 * self.ln_w + sv.sum.ln(),
            sv.last / sv.sum.norm(),
        )
    }

    fn rel_err(&self) -> f64 {
        self.su.last / self.su.sum.norm() + 4.0 * f64::EPSILON * (1.0 + self.zeta.norm())
    }

    /// ln B(w + b) - ln B(w) without forming the large exponents separately.
    fn ln_ratio(&self, shifted: &Branch, b: Complex64) -> Complex64 {
        let p = shifted.sqrt_w;
        let q = self.sqrt_w;
        let dzeta = (2.0 / 3.0) * b * (p * p + p * q + q * q) / (p + q);
        let w = q * q;
        let dln = (Complex64::new(1.0, 0.0) + b / w).ln();
        -dzeta - 0.25 * dln + shifted.su.sum.ln() - self.su.sum.ln()
    }
}

fn check_exponent(zeta: Complex64) -> Result<(), AiryError> {
    if zeta.re.abs() > MAX_EXPONENT {
        Err(AiryError::Overflow(zeta.re.abs()))
    } else {
        Ok(())
    }
}

// log(e^a + e^b) for complex logs.
fn log_add(a: Complex64, b: Complex64) -> Complex64 {
    let (hi, lo) = if a.re >= b.re { (a, b) } else { (b, a) };
    hi + (Complex64::new(1.0, 0.0) + (lo - hi).exp()).ln()
}

fn ln_neg_omega() -> Complex64 {
    Complex64::new(0.0, -FRAC_PI_3)
}

fn ln_neg_omega_bar() -> Complex64 {
    Complex64::new(0.0, FRAC_PI_3)
}

/// ln Ai(z) (principal imaginary part not guaranteed; only exp(.) matters).
pub fn ln_ai(z: ComplexValue) -> Result<ComplexValue, AiryError> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(AiryError::NonFinite);
    }
    match regime(z).tag {
        RegimeTag::MaclaurinSeries => Ok(maclaurin_ai(z).ln()),
        RegimeTag::AsymptoticExpansion => Ok(Branch::new(z).ln_ai()),
        RegimeTag::RotatedConnection => {
            let w = omega();
            let b1 = Branch::new(w * z);
            let b2 = Branch::new(w.conj() * z);
            Ok(log_add(ln_neg_omega() + b1.ln_ai(), ln_neg_omega_bar() + b2.ln_ai()))
        }
    }
}

/// ln(Ai(z + a)/Ai(z)) for a real shift `a`.
///
/// When |a| is small against |z| the exponents zeta(z + a) and zeta(z) are
/// huge and nearly equal; their difference is then formed algebraically.
pub fn ln_ai_shift_ratio(z: ComplexValue, a: f64) -> Result<ComplexValue, AiryError> {
    if !(z.re.is_finite() && z.im.is_finite() && a.is_finite()) {
        return Err(AiryError::NonFinite);
    }
    let zs = z + a;
    let r = z.norm();
    if r < SWITCH_RADIUS || zs.norm() < SWITCH_RADIUS || a.abs() > 0.25 * r {
        return Ok(ln_ai(zs)? - ln_ai(z)?);
    }
    let b = Complex64::new(a, 0.0);
    if z.arg().abs() <= 2.0 * FRAC_PI_3 && zs.arg().abs() <= 2.0 * FRAC_PI_3 {
        let bz = Branch::new(z);
        let bs = Branch::new(zs);
        return Ok(bz.ln_ratio(&bs, b));
    }
    let w = omega();
    let wb = w.conj();
    let (p_z, q_z) = (Branch::new(w * z), Branch::new(wb * z));
    let (p_s, q_s) = (Branch::new(w * zs), Branch::new(wb * zs));
    let lp_z = ln_neg_omega() + p_z.ln_ai();
    let lq_z = ln_neg_omega_bar() + q_z.ln_ai();
    let lp_s = ln_neg_omega() + p_s.ln_ai();
    let lq_s = ln_neg_omega_bar() + q_s.ln_ai();
    let one = Complex64::new(1.0, 0.0);
    if lp_z.re >= lq_z.re {
        let core = p_z.ln_ratio(&p_s, w * b);
        Ok(core + (one + (lq_s - lp_s).exp()).ln() - (one + (lq_z - lp_z).exp()).ln())
    } else {
        let core = q_z.ln_ratio(&q_s, wb * b);
        Ok(core + (one + (lp_s - lq_s).exp()).ln() - (one + (lp_z - lq_z).exp()).ln())
    }
}

/// Log-scaled Ai: `exp(log_modulus + i*phase) = Ai(z)`, usable far beyond the
/// overflow limit of [`airy_all`].
pub fn airy_ai_log_scaled(z: ComplexValue) -> Result<LogAiry, AiryError> {
    let l = ln_ai(z)?;
    let phase = Complex64::from_polar(1.0, l.im).arg();
    Ok(LogAiry { log_modulus: l.re, phase })
}

// ---------------------------------------------------------------------------
// Full bundle

struct AiPair {
    ai: Complex64,
    aip: Complex64,
    err: f64,
}

fn asym_pair(z: Complex64) -> Result<AiPair, AiryError> {
    let br = Branch::new(z);
    check_exponent(br.zeta)?;
    let (lv, ev) = br.ln_neg_aip_with_err();
    let ai = br.ln_ai().exp();
    let aip = -lv.exp();
    let eps = 4.0 * f64::EPSILON * (1.0 + br.zeta.norm());
    let err = ai.norm() * br.rel_err() + aip.norm() * (ev + eps);
    Ok(AiPair { ai, aip, err })
}

// Ai and Ai' for |z| >= SWITCH_RADIUS in any direction.
fn large_pair(z: Complex64) -> Result<AiPair, AiryError> {
    if z.arg().abs() <= 2.0 * FRAC_PI_3 {
        return asym_pair(z);
    }
    let w = omega();
    let wb = w.conj();
    let p = asym_pair(w * z)?;
    let q = asym_pair(wb * z)?;
    // Ai(z) = -w Ai(wz) - w' Ai(w'z); Ai'(z) = -w' Ai'(wz) - w Ai'(w'z).
    let ai = -w * p.ai - wb * q.ai;
    let aip = -wb * p.aip - w * q.aip;
    let round = 2.0 * f64::EPSILON * (p.ai.norm() + q.ai.norm() + p.aip.norm() + q.aip.norm());
    Ok(AiPair { ai, aip, err: p.err + q.err + round })
}

/// Ai, Ai', Bi, Bi' at `z`.
pub fn airy_all(z: ComplexValue) -> Result<AiryBundle, AiryError> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(AiryError::NonFinite);
    }
    let reg = regime(z);
    let mut out = if reg.tag == RegimeTag::MaclaurinSeries {
        let m = maclaurin_dd(z);
        AiryBundle { ai: m.ai, aip: m.aip, bi: m.bi, bip: m.bip, abs_err_estimate: m.err, regime: reg }
    } else {
        let main = large_pair(z)?;
        // Bi(z) = +-i Ai(z) + 2 e^{-+ i pi/6} Ai(z e^{-+ 2 pi i/3}), upper signs for Im z >= 0.
        let upper = z.im >= 0.0;
        let rot = if upper { omega().conj() } else { omega() };
        let sgn = if upper { 1.0 } else { -1.0 };
        let other = large_pair(rot * z)?;
        let i = Complex64::new(0.0, 1.0);
        let c_bi = Complex64::from_polar(2.0, -sgn * PI / 6.0);
        let c_bip = Complex64::from_polar(2.0, -sgn * 5.0 * PI / 6.0);
        let bi = sgn * i * main.ai + c_bi * other.ai;
        let bip = sgn * i * main.aip + c_bip * other.aip;
        let round = 2.0 * f64::EPSILON * (main.ai.norm() + main.aip.norm() + 2.0 * other.ai.norm() + 2.0 * other.aip.norm());
        AiryBundle {
            ai: main.ai,
            aip: main.aip,
            bi,
            bip,
            abs_err_estimate: main.err + 2.0 * other.err + round,
            regime: reg,
        }
    };
    if z.im == 0.0 {
        out.ai.im = 0.0;
        out.aip.im = 0.0;
        out.bi.im = 0.0;
        out.bip.im = 0.0;
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Gamma (Lanczos, g = 7, n = 9)

const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function for real arguments.
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + 7.5;
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * acc
}

// ---------------------------------------------------------------------------
// Scorer functions

/// Incomplete Scorer function (1/pi) * integral_s^inf exp(t z - t^3/3) dt.
pub fn incomplete_hi(z: ComplexValue, s: f64) -> ComplexValue {
    hi_quadrature(z, s).0
}

fn hi_quadrature(z: Complex64, s: f64) -> (Complex64, f64) {
    // Peak of Re(tz - t^3/3) over t >= s, used to scale the cut-off.
    let tp = if z.re > 0.0 { z.re.sqrt().max(s) } else { s };
    let expo = |t: f64| t * z.re - t * t * t / 3.0;
    let peak = expo(tp);
    let mut upper = tp.max(0.0) + 1.0;
    while expo(upper) > peak - 45.0 {
        upper += 0.5;
    }
    if upper <= s {
        return (Complex64::new(0.0, 0.0), 0.0);
    }
    let spec = QuadratureSpec {
        abs_tol: 1e-14,
        rel_tol: 1e-13,
        frequency: z.im,
        ..QuadratureSpec::default()
    };
    let f = |t: f64| (z * t - t * t * t / 3.0).exp();
    let r = match quadrature::integrate_interval(&f, s, upper, &spec) {
        Ok(r) => r,
        Err(quadrature::QuadratureError::BudgetExceeded { best }) => best,
        Err(_) => return (Complex64::new(f64::NAN, f64::NAN), f64::INFINITY),
    };
    let tail = (peak - 45.0).exp();
    (r.value / PI, (r.err_estimate + tail) / PI)
}

/// Scorer's Hi(z) = (1/pi) * integral_0^inf exp(t z - t^3/3) dt.
///
/// Far out along the negative axis the asymptotic series
/// `-(1/(pi z)) sum (3k)!/(k! (3 z^3)^k)` is used instead of quadrature.
pub fn scorer_hi(z: ComplexValue) -> ComplexValue {
    let w = -z;
    if z.norm() >= 15.0 && w.arg().abs() <= PI / 2.0 {
        let x = 3.0 * z * z * z;
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = term;
        for k in 1..40 {
            let kf = k as f64;
            // (3k)!/k! over (3(k-1))!/(k-1)!  =  (3k)(3k-1)(3k-2)/k
            let next = term * ((3.0 * kf) * (3.0 * kf - 1.0) * (3.0 * kf - 2.0) / kf) / x;
            if next.norm() > term.norm() {
                break;
            }
            term = next;
            sum += term;
            if term.norm() < f64::EPSILON * sum.norm() {
                break;
            }
        }
        return -sum / (PI * z);
    }
    incomplete_hi(z, 0.0)
}

/// u_lambda(x) = Ai(2^{-1/3} lambda - 4^{1/3} x)/Ai(2^{-1/3} lambda): the
/// bounded solution of u''/2 = (lambda - 2x) u on x <= 0 with u(0) = 1.
pub fn u_lambda(lambda: f64, x: f64) -> f64 {
    let c = 2f64.powf(-1.0 / 3.0);
    let k = 4f64.powf(1.0 / 3.0);
    let z = Complex64::new(c * lambda, 0.0);
    match ln_ai_shift_ratio(z, -k * x) {
        Ok(l) => l.re.exp(),
        Err(_) => f64::NAN,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm().max(1e-300)
    }

    // Reference values from a 40-digit evaluation (mpmath airyai/airybi).
    #[rustfmt::skip]
    const REF: &[((f64, f64), [(f64, f64); 4])] = &[
        ((0.5, 0.0), [(2.3169360648083348977e-1, 0.0), (-2.2491053266468389314e-1, 0.0), (8.542770431031554933e-1, 0.0), (5.4457256414059230183e-1, 0.0)]),
        ((-1.0, 0.0), [(5.355608832923521188e-1, 0.0), (-1.0160567116645209395e-2, 0.0), (1.0399738949694461189e-1, 0.0), (5.9237562642279235082e-1, 0.0)]),
        ((2.0, 1.0), [(1.6977668572654568228e-3, -4.0718017053223981234e-2), (-1.511027928322695793e-2, 6.2458954713600138155e-2), (7.7823038375704170885e-1, 2.5050963000641023231), (-1.1024725075605856099e-1, 3.6905551002552527049)]),
        ((-3.0, 2.0), [(-4.4196895542641672556, 5.4546225177826673859), (1.1878523564741866763e+1, 5.2093518478839736658), (-5.4656670776237691433, -4.4151556707835897377), (-5.2244204544055435911, 1.1860758877193861084e+1)]),
        ((8.9, 0.0), [(3.3420610425186999076e-9, 0.0), (-1.0062109921836912133e-8, 0.0), (1.5966418120232323238e+7, 0.0), (4.7172696726445931439e+7, 0.0)]),
        ((9.1, 0.0), [(1.8242282535640280405e-9, 0.0), (-5.5520373443859194353e-9, 0.0), (2.8927488903264942417e+7, 0.0), (8.6449372333449194449e+7, 0.0)]),
        ((-9.1, 0.0), [(7.495988727355446389e-2, 0.0), (-9.5149681545191793984e-1, 0.0), (3.1603471239329899785e-1, 0.0), (2.3484378658496811046e-1, 0.0)]),
        ((-15.0, 0.0), [(2.7821749087082892953e-1, 0.0), (2.7237420430864202083e-1, 0.0), (-6.9126594531010061186e-2, 0.0), (1.0764297530843747867, 0.0)]),
        ((12.0, 5.0), [(2.1001897847642027252e-13, 7.8727254711601254371e-13), (-1.9520274289588969712e-13, -2.9442885933880372246e-12), (3.4235519529596192824e+9, -5.4067696242636288677e+10), (5.0686401806062510595e+10, -1.8774386627053036894e+11)]),
        ((-12.0, 5.0), [(5.5584096433548451124e+6, 5.9101439361555615964e+5), (-1.7452629933384331644e+6, -2.0018958353909004254e+7), (-5.9101439361555543889e+5, 5.5584096433548372486e+6), (2.0018958353909032638e+7, -1.7452629933384363092e+6)]),
        ((0.0, 18.0), [(1.5388211384677204821e+14, 5.7062837417065075548e+14), (1.2422548318635735604e+15, -2.1714290175323730254e+15), (-5.7062837417065075548e+14, 1.5388211384677204821e+14), (2.1714290175323730254e+15, 1.2422548318635735604e+15)]),
        ((-5.0, -7.0), [(-8.5576903405021222741e+5, -2.6641325730488077777e+6), (8.0169304381167172153e+6, 1.3179747874548623596e+6), (-2.6641325730488269133e+6, 8.5576903405021540183e+5), (1.3179747874548447161e+6, -8.0169304381166625561e+6)]),
        ((20.0, 0.0), [(1.6916728686705403136e-27, 0.0), (-7.5863916257483549605e-27, 0.0), (2.1037650496511038145e+25, 0.0), (9.3818393361339643491e+25, 0.0)]),
        ((-20.0, 0.0), [(-1.7640612707798468959e-1, 0.0), (8.928628567364712384e-1, 0.0), (-2.0013930932265134928e-1, 0.0), (-7.9142903383953647936e-1, 0.0)]),
        ((3.0, -15.0), [(-1.0853406574778437382e+7, -1.6539159798992842141e+7), (7.3609455774987745141e+7, 2.3343068967024457938e+7), (-1.6539159798992844104e+7, 1.0853406574778437996e+7), (2.3343068967024453541e+7, -7.3609455774987738385e+7)]),
        ((-19.0, 0.001), [(-1.4166262266476759036e-1, -1.0049642837747561911e-3), (-1.0049706013198564073, 2.6915731190109449522e-3), (2.3012327624835441393e-1, -6.1447573814513756577e-4), (-6.1447970652725311981e-1, -4.3723143526040760313e-3)]),
        ((6.5, 6.5), [(1.0571384327680014578e-5, 1.3167628873468817734e-4), (1.2050287112635151909e-4, -3.83466180069527783e-4), (-1.2223852264356537789e+2, -3.7804990619656095185e+2), (1.0603269742662643301e+2, -1.1960355881512113983e+3)]),
    ];

    #[test]
    fn matches_high_precision_reference() {
        for &((x, y), vals) in REF {
            let b = airy_all(c(x, y)).unwrap();
            let got = [b.ai, b.aip, b.bi, b.bip];
            for (g, &(re, im)) in got.iter().zip(vals.iter()) {
                let want = c(re, im);
                assert!(rel(*g, want) < 2e-13, "z=({x},{y}) got {g} want {want} rel {}", rel(*g, want));
            }
            let scale = b.ai.norm().max(b.bi.norm()).max(1.0);
            assert!(b.abs_err_estimate <= 1e-12 * scale, "err estimate {} at ({x},{y})", b.abs_err_estimate);
        }
    }

    #[test]
    fn origin_closed_forms() {
        let b = airy_all(c(0.0, 0.0)).unwrap();
        let ai0 = 3f64.powf(-2.0 / 3.0) / gamma(2.0 / 3.0);
        let aip0 = -(3f64.powf(-1.0 / 3.0)) / gamma(1.0 / 3.0);
        assert!((b.ai.re - ai0).abs() < 1e-15);
        assert!((b.aip.re - aip0).abs() < 1e-15);
    }

    #[test]
    fn lanczos_gamma_reflection() {
        let lhs = gamma(1.0 / 3.0) * gamma(2.0 / 3.0);
        assert!((lhs - 2.0 * PI / SQRT3).abs() < 1e-13);
        assert!((gamma(5.0) - 24.0).abs() < 1e-12);
        assert!((gamma(0.5) - PI.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn wronskian_at_one_plus_i() {
        let b = airy_all(c(1.0, 1.0)).unwrap();
        assert!((b.wronskian() - c(1.0 / PI, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn regime_is_a_function_of_z() {
        assert_eq!(regime(c(1.0, 1.0)).tag, RegimeTag::MaclaurinSeries);
        assert_eq!(regime(c(10.0, 1.0)).tag, RegimeTag::AsymptoticExpansion);
        assert_eq!(regime(c(-10.0, 1.0)).tag, RegimeTag::RotatedConnection);
        assert_eq!(regime(c(-10.0, 1.0)), regime(c(-10.0, 1.0)));
    }

    #[test]
    fn oscillatory_integral_oracle_at_minus_five() {
        // Ai(x) = (1/pi) int_0^inf cos(t^3/3 + x t) dt: composite Simpson on
        // [0, T] plus the tail from two integrations by parts.
        let x = -5.0;
        let t_max = 30.0;
        let n = 12_000_000;
        let h = t_max / n as f64;
        let g = |t: f64| (t * t * t / 3.0 + x * t).cos();
        // composite Simpson
        let mut s = g(0.0) + g(t_max);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * g(i as f64 * h);
        }
        s *= h / 3.0;
        let phase = t_max * t_max * t_max / 3.0 + x * t_max;
        let d = t_max * t_max + x;
        // int_T^inf cos p = -sin p/p' + cos p * p''/p'^3 + O(p'^-4) at t = T
        let tail = -phase.sin() / d + 2.0 * t_max * phase.cos() / d.powi(3);
        let brute = (s + tail) / PI;
        let b = airy_all(c(x, 0.0)).unwrap();
        assert!((b.ai.re - brute).abs() < 1e-10, "{} vs {}", b.ai.re, brute);
    }

    #[test]
    fn log_scaled_on_positive_axis() {
        let l = airy_ai_log_scaled(c(100.0, 0.0)).unwrap();
        let zeta = (2.0 / 3.0) * 1000.0;
        let c = &asym_coeffs().u;
        let corr = (1.0 - c[1] / zeta + c[2] / (zeta * zeta)).ln();
        let want = -zeta - 0.25 * 100f64.ln() - LN_2_SQRT_PI + corr;
        assert!(((l.log_modulus - want) / want).abs() < 1e-8);
        assert!(l.phase.abs() < 1e-15);
    }

    #[test]
    fn log_scaled_consistent_with_plain_values() {
        for &(x, y) in &[(9.0, 0.0), (12.0, -3.0), (-15.0, 4.0), (0.0, 30.0), (-25.0, 0.5), (3.0, 2.0)] {
            let z = c(x, y);
            let l = airy_ai_log_scaled(z).unwrap();
            let v = Complex64::from_polar(l.log_modulus.exp(), l.phase);
            let a = airy_all(z).unwrap().ai;
            assert!(rel(v, a) < 1e-12, "z=({x},{y})");
        }
    }

    #[test]
    fn log_scaled_growth_on_imaginary_axis() {
        let u: f64 = 50.0;
        let l = airy_ai_log_scaled(c(0.0, u)).unwrap();
        let lead = (2f64.sqrt() / 3.0) * u.powf(1.5);
        // -Re zeta = (sqrt2/3) u^{3/2}; the remaining terms are -ln(2 sqrt pi) - ln(u)/4.
        let expect = lead - LN_2_SQRT_PI - 0.25 * u.ln();
        assert!((l.log_modulus - expect).abs() < 1e-3);
    }

    #[test]
    fn overflow_is_reported() {
        assert!(matches!(airy_all(c(0.0, 150.0)), Err(AiryError::Overflow(_))));
        assert!(airy_ai_log_scaled(c(0.0, 150.0)).is_ok());
        assert_eq!(airy_all(c(f64::NAN, 0.0)), Err(AiryError::NonFinite));
    }

    #[test]
    fn shift_ratio_matches_direct_logs() {
        for &(x, y, a) in &[
            (20.0, 30.0, 1.5),
            (-30.0, 40.0, 2.0),
            (-200.0, 150.0, 1.0),
            (50.0, -70.0, 0.3),
            (9.0, 0.1, 0.5),
            (-3.0, 2.0, 4.0),
        ] {
            let z = c(x, y);
            let careful = ln_ai_shift_ratio(z, a).unwrap();
            let direct = ln_ai(z + a).unwrap() - ln_ai(z).unwrap();
            let d = (careful.exp() - direct.exp()).norm() / direct.exp().norm();
            assert!(d < 1e-11, "({x},{y},{a}) -> {d}");
        }
    }

    #[test]
    fn shift_ratio_small_shift_far_out() {
        // For |z| huge, ln Ai(z + a) - ln Ai(z) = -a sqrt(z) - a^2/(4 sqrt z) - a/(4z) + ...
        let z = c(3.0e7, 2.0e7);
        let a = 1e-3;
        let got = ln_ai_shift_ratio(z, a).unwrap();
        let expect = -a * z.sqrt() - a * a / (4.0 * z.sqrt()) - a / (4.0 * z);
        assert!((got - expect).norm() < 1e-12 * expect.norm().max(1e-3));
    }

    #[test]
    fn scorer_at_origin_and_far_left() {
        let h0 = scorer_hi(c(0.0, 0.0));
        let want = 3f64.powf(-2.0 / 3.0) * gamma(1.0 / 3.0) / PI;
        assert!((h0.re - want).abs() < 1e-13 && h0.im.abs() < 1e-15);
        let z = c(-20.0, 0.0);
        let h = scorer_hi(z);
        let lead = -1.0 / (PI * z.re);
        // next term is 2/z^3 relative
        assert!((h.re - lead).abs() <= lead * 3.0 / 8000.0);
        let q = incomplete_hi(z, 0.0);
        assert!((h - q).norm() < 1e-12);
    }

    #[test]
    fn incomplete_scorer_tail_and_reduction() {
        for &(x, y) in &[(0.0, 0.0), (2.0, 1.0), (-3.0, -4.0), (8.0, 5.0)] {
            let z = c(x, y);
            assert_eq!(scorer_hi(z), incomplete_hi(z, 0.0));
        }
        let mut prev = f64::INFINITY;
        for s in [0.0, 0.5, 1.0, 2.0, 3.0, 5.0, 8.0] {
            let v = incomplete_hi(c(-2.0, 0.0), s).norm();
            assert!(v < prev);
            prev = v;
        }
        assert!(prev < 1e-60);
    }

    #[test]
    fn u_lambda_boundary_and_example() {
        assert!((u_lambda(1.7, 0.0) - 1.0).abs() < 1e-15);
        let cc = 2f64.powf(-1.0 / 3.0);
        let k = 4f64.powf(1.0 / 3.0);
        let want = airy_all(c(cc + k, 0.0)).unwrap().ai.re / airy_all(c(cc, 0.0)).unwrap().ai.re;
        assert!((u_lambda(1.0, -1.0) - want).abs() < 1e-14);
        assert!(u_lambda(1.0, -30.0) < 1e-40);
    }

    #[test]
    fn u_lambda_solves_its_ode() {
        let (lam, x) = (1.0, -1.0);
        for h in [1e-2, 5e-3] {
            let d2 = (u_lambda(lam, x + h) - 2.0 * u_lambda(lam, x) + u_lambda(lam, x - h)) / (h * h);
            let res = 0.5 * d2 - (lam - 2.0 * x) * u_lambda(lam, x);
            assert!(res.abs() < 2e-5, "h={h}: {res}");
        }
    }
}
