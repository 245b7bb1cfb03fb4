//! Logarithmic capacity of the union of the two image disks, by the theta
//! formula and by orthogonal-polynomial norm ratios; the critical curve
//! `gamma_{A,B} = 1`.

use rug::Float;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::genfunc::{image_circle, periodic_mean, Orientation, QuadratureConfig};
use crate::gram::{arc_length_gram, bergman_gram_two_disks_about, cholesky, op_norms_from, GramMode};
use crate::real::{golden, pi, ulp, CertifiedReal, ComplexHP, Prec};

/// Nome `q` of the theta series, `0 < q < 1`.
#[derive(Clone, Debug)]
pub struct ThetaParams {
    nome: Float,
}

impl ThetaParams {
    pub fn new(nome: Float) -> Result<Self> {
        if !(nome > 0 && nome < 1) {
            return Err(Error::NomeOutOfRange(format!("{:.6e}", nome.to_f64())));
        }
        Ok(Self { nome })
    }

    pub fn nome(&self) -> &Float {
        &self.nome
    }
}

/// A complex value with an absolute error bound on its modulus.
#[derive(Clone, Debug)]
pub struct ThetaValue {
    pub value: ComplexHP,
    pub error: Float,
}

/// `q^((n+1/2)^2)`.
fn nome_power(ln_q: &Float, n: u64) -> Float {
    let h = Float::with_val(ln_q.prec(), n) + 0.5f64;
    Float::with_val(ln_q.prec(), h.square_ref()) * ln_q
}

fn series_tol(prec: Prec) -> Float {
    Float::with_val(64, 1) >> (prec as i32 + 8)
}

/// `theta_1(z, q) = 2 sum_{n>=0} (-1)^n q^((n+1/2)^2) sin((2n+1) z)`.
/// Summation stops once the term bound `q^((n+1/2)^2) e^((2n+1)|Im z|)`
/// is below tolerance and decays at least geometrically by 1/2.
pub fn theta1(z: &ComplexHP, params: &ThetaParams) -> ThetaValue {
    let prec = z.prec().max(params.nome.prec());
    let ln_q = Float::with_val(prec, params.nome.ln_ref());
    let y = Float::with_val(prec, z.im.as_abs().clone());
    let tol = series_tol(prec);
    let mut re = Float::new(prec);
    let mut im = Float::new(prec);
    let mut n = 0u64;
    loop {
        let k = 2 * n + 1;
        let kx = Float::with_val(prec, &z.re * k);
        let ky = Float::with_val(prec, &z.im * k);
        let c = Float::with_val(prec, nome_power(&ln_q, n).exp_ref());
        // sin(x + iy) = sin x cosh y + i cos x sinh y
        let (s, co) = kx.sin_cos(Float::new(prec));
        let (sh, ch) = ky.sinh_cosh(Float::new(prec));
        let sign = if n % 2 == 0 { 1 } else { -1 };
        re += Float::with_val(prec, &s * &ch) * &c * sign;
        im += Float::with_val(prec, &co * &sh) * &c * sign;
        n += 1;
        // bound on the next term and its decay ratio q^(2n) e^(2|y|)
        let log_next = Float::with_val(prec, nome_power(&ln_q, n) + Float::with_val(prec, &y * (2 * n + 1)));
        let log_ratio = Float::with_val(prec, &ln_q * (2 * n)) + Float::with_val(prec, &y * 2u32);
        if log_ratio < -std::f64::consts::LN_2 {
            let next = Float::with_val(64, log_next.exp_ref());
            let scale = Float::with_val(64, re.hypot_ref(&im)).max(&Float::with_val(64, 1e-300));
            if next <= Float::with_val(64, &tol * &scale) || next == 0 {
                // tail <= 2 next (geometric), times the leading 2
                let round = Float::with_val(64, &scale * &ulp(prec)) * (8 * n + 8);
                let error = next * 4u32 + round;
                return ThetaValue { value: ComplexHP::new(re * 2u32, im * 2u32), error };
            }
        }
    }
}

/// `theta_1'(0, q) = 2 sum (-1)^n (2n+1) q^((n+1/2)^2)`.
pub fn theta1_prime0(params: &ThetaParams) -> CertifiedReal {
    let prec = params.nome.prec();
    let ln_q = Float::with_val(prec, params.nome.ln_ref());
    let mut s = Float::new(prec);
    let mut n = 0u64;
    loop {
        let t = Float::with_val(prec, nome_power(&ln_q, n).exp_ref()) * (2 * n + 1);
        if n % 2 == 0 {
            s += &t;
        } else {
            s -= &t;
        }
        n += 1;
        let next = Float::with_val(prec, nome_power(&ln_q, n).exp_ref()) * (2 * n + 1);
        let ratio_ok = Float::with_val(prec, &ln_q * (2 * n)) < -1;
        if ratio_ok && next <= Float::with_val(prec, &s * series_tol(prec)).abs() {
            let err = Float::with_val(64, &next * 4u32) + Float::with_val(64, &s * ulp(prec)).abs() * (4 * n + 4);
            return CertifiedReal::new(s * 2u32, &err);
        }
    }
}

/// `2 q^(1/4) prod_{n>=1} (1 - q^(2n))^3`, the product form of
/// `theta_1'(0, q)`.
pub fn theta1_prime0_product(params: &ThetaParams) -> CertifiedReal {
    let prec = params.nome.prec();
    let q = &params.nome;
    let q2 = Float::with_val(prec, q.square_ref());
    let mut p = Float::with_val(prec, 1);
    let mut qn = q2.clone();
    let tol = series_tol(prec);
    let mut n = 0u32;
    let tail = loop {
        let f = Float::with_val(prec, 1) - &qn;
        p *= Float::with_val(prec, f.square_ref()) * &f;
        qn *= &q2;
        n += 1;
        if qn < tol {
            // remaining factors lie in [1 - 3 sum q^(2n), 1]
            break Float::with_val(64, &qn * 3u32) / (Float::with_val(64, 1) - Float::with_val(64, &q2));
        }
    };
    let lead = Float::with_val(prec, q.sqrt_ref()).sqrt() * 2u32;
    let v = Float::with_val(prec, &p * &lead);
    let err = Float::with_val(64, &*v.as_abs() * &tail) + Float::with_val(64, &*v.as_abs() * &ulp(prec)) * (4 * n + 8);
    CertifiedReal::new(v, &err)
}

/// Capacity estimate; `certified` is false for empirical error bars.
#[derive(Clone, Debug, Serialize)]
pub struct CapacityValue {
    pub gamma: CertifiedReal,
    pub certified: bool,
}

impl CapacityValue {
    pub fn value(&self) -> &Float {
        self.gamma.value()
    }

    pub fn error(&self) -> &Float {
        self.gamma.error()
    }

    pub fn to_f64(&self) -> f64 {
        self.gamma.to_f64()
    }
}

fn check_base(x: &Float) -> Result<()> {
    if !(*x > 1) || x.is_infinite() {
        return Err(Error::InvalidBase(format!("{}", x.to_f64())));
    }
    Ok(())
}

fn theta_modulus(l: &Float, params: &ThetaParams) -> CertifiedReal {
    let z = ComplexHP::new(Float::new(l.prec()), l.clone());
    let t = theta1(&z, params);
    CertifiedReal::new(t.value.abs(), &t.error)
}

/// `gamma_{A,B} = (1/2) exp((log^2 A + log^2 B) / (2 log AB))
///   theta_1'(0,q) / sqrt(|theta_1(i log A, q) theta_1(i log B, q)|)`,
/// `q = 1/(AB)`.
pub fn capacity_two_disks(a: &Float, b: &Float) -> Result<CapacityValue> {
    check_base(a)?;
    check_base(b)?;
    let prec = a.prec().max(b.prec());
    let la = CertifiedReal::rounded(Float::with_val(prec, a.ln_ref()));
    let lb = CertifiedReal::rounded(Float::with_val(prec, b.ln_ref()));
    let q = Float::with_val(prec, Float::with_val(prec, a * b).recip_ref());
    let params = ThetaParams::new(q)?;
    let num = la.mul(&la).add(&lb.mul(&lb));
    let den = la.add(&lb).scale(&Float::with_val(prec, 2));
    let expo = num.div(&den)?.exp();
    let t0 = theta1_prime0(&params);
    let ta = theta_modulus(la.value(), &params);
    let tb = theta_modulus(lb.value(), &params);
    // la, lb are rounded arguments; theta_1(iL) has relative derivative
    // below coth-like growth ~ (2n+1) at the dominant term, so widen by a
    // generous multiple of their rounding error
    let widen = |t: CertifiedReal, l: &CertifiedReal| {
        let extra = Float::with_val(64, t.value() * l.error()) * 64u32;
        t.widen(&extra)
    };
    let ta = widen(ta, &la);
    let tb = widen(tb, &lb);
    let root = ta.mul(&tb).sqrt()?;
    let g = expo.mul(&t0).div(&root)?.scale(&Float::with_val(prec, 0.5f64));
    Ok(CapacityValue { gamma: g, certified: true })
}

/// Monic Szego norms `beta_k`, `k = 0..=kmax`, for arc length weighted by
/// `A/(2pi)` on `T_1` and `1/(2pi B)` on `T_2` (omitted when `b` is None),
/// in the monomial basis about the midpoint of the centers.
pub fn szego_norms(a: &Float, b: Option<&Float>, kmax: usize) -> Result<Vec<CertifiedReal>> {
    check_base(a)?;
    if let Some(b) = b {
        check_base(b)?;
    }
    let prec = working_prec(a, kmax);
    let a = Float::with_val(prec, a);
    let two_pi = Float::with_val(prec, pi(prec) * 2u32);
    let mut circles = vec![(image_circle(Orientation::PositiveSide, &a)?, Float::with_val(prec, &a / &two_pi))];
    if let Some(b) = b {
        let b = Float::with_val(prec, b);
        let w = Float::with_val(prec, Float::with_val(prec, &b * &two_pi).recip_ref());
        circles.push((image_circle(Orientation::NegativeSide, &b)?, w));
    }
    let shift = midpoint(circles.iter().map(|c| &c.0.center.re));
    let g = arc_length_gram(&circles, kmax, &shift)?;
    Ok(op_norms_from(&cholesky(&g)?, GramMode::ArcLength).norms)
}

/// Monic Bergman norms `gamma_k` of the union of the closed disks bounded
/// by `T_1` and `T_2`.
pub fn bergman_norms(a: &Float, b: &Float, kmax: usize) -> Result<Vec<CertifiedReal>> {
    check_base(a)?;
    check_base(b)?;
    let prec = working_prec(a, kmax);
    let d1 = image_circle(Orientation::PositiveSide, &Float::with_val(prec, a))?;
    let d2 = image_circle(Orientation::NegativeSide, &Float::with_val(prec, b))?;
    let shift = midpoint([&d1.center.re, &d2.center.re].into_iter());
    let g = bergman_gram_two_disks_about(&d1, &d2, kmax, &shift)?;
    Ok(op_norms_from(&cholesky(&g)?, GramMode::BergmanTwoDisks).norms)
}

fn working_prec(a: &Float, kmax: usize) -> Prec {
    a.prec().max(192 + 10 * kmax as Prec)
}

fn midpoint<'a>(centers: impl Iterator<Item = &'a Float>) -> Float {
    let cs: Vec<&Float> = centers.collect();
    let prec = cs[0].prec();
    let mut s = Float::new(prec);
    for c in &cs {
        s += *c;
    }
    s / cs.len() as u32
}

/// Smoothly weighted mean of `log(beta_{k+1}/beta_k)` over `k` in
/// `[lo, hi)`, with the bump `exp(-1/(t(1-t)))`.
fn weighted_log_ratio(norms: &[CertifiedReal], lo: usize, hi: usize) -> Float {
    let prec = norms[0].prec();
    let mut num = Float::new(prec);
    let mut den = Float::new(prec);
    for k in lo..hi {
        let t = (k - lo) as f64 + 0.5;
        let t = Float::with_val(prec, t) / (hi - lo) as u32;
        let one_minus = Float::with_val(prec, 1) - &t;
        let w = (Float::with_val(prec, &t * &one_minus).recip() * -1i32).exp();
        let lr = Float::with_val(prec, norms[k + 1].value() / norms[k].value()).ln();
        num += Float::with_val(prec, &w * &lr);
        den += w;
    }
    num / den
}

/// Capacity estimate from Szego norm ratios up to `kmax`: the weighted
/// mean of `log(beta_{k+1}/beta_k)` over `[kmax/2, kmax)`, exponentiated.
/// The error bar is the change against the window ending at `3 kmax/4`.
pub fn capacity_via_op_norms(a: &Float, b: Option<&Float>, kmax: usize) -> Result<CapacityValue> {
    if kmax < 20 {
        return Err(Error::InvalidSpec(format!("kmax must be at least 20, got {kmax}")));
    }
    let norms = szego_norms(a, b, kmax)?;
    let est = |hi: usize| weighted_log_ratio(&norms, hi / 2, hi).exp();
    let v = est(kmax);
    let coarse = est(3 * kmax / 4);
    let spread = Float::with_val(64, Float::with_val(v.prec(), &v - &coarse).abs());
    let v = Float::with_val(a.prec().max(64), v);
    Ok(CapacityValue { gamma: CertifiedReal::new(v, &spread), certified: false })
}

/// Ratios `beta_{k+1}/beta_k` for `k = 0..kmax`.
pub fn szego_ratios(a: &Float, b: Option<&Float>, kmax: usize) -> Result<Vec<f64>> {
    let norms = szego_norms(a, b, kmax)?;
    Ok(norms.windows(2).map(|w| (w[1].value().clone() / w[0].value()).to_f64()).collect())
}

/// `gamma_k sqrt(k+1) / cap^k` for `k = 0..=kmax`.
pub fn bergman_rate(a: &Float, b: &Float, kmax: usize) -> Result<Vec<f64>> {
    let cap = capacity_two_disks(a, b)?;
    let norms = bergman_norms(a, b, kmax)?;
    let lc = Float::with_val(norms[0].prec(), cap.value().ln_ref());
    Ok(norms
        .iter()
        .enumerate()
        .map(|(k, g)| {
            let l = Float::with_val(g.prec(), g.value().ln_ref()) + Float::with_val(64, (k as f64 + 1.0).ln() / 2.0)
                - Float::with_val(g.prec(), &lc * k as u32);
            l.exp().to_f64()
        })
        .collect())
}

/// Upper end of the bracket searched by [`critical_b`].
pub const CRITICAL_B_CAP: f64 = 64.0;

/// `B` on the level set `gamma_{a,B} = 1`, by bisection on `[phi, 64]` to
/// width `tol`.
pub fn critical_b(a: &Float, tol: f64) -> Result<Float> {
    check_base(a)?;
    let prec = a.prec();
    let gamma = |b: &Float| -> Result<Float> { Ok(capacity_two_disks(a, b)?.value().clone()) };
    let mut lo = golden(prec);
    let mut hi = Float::with_val(prec, CRITICAL_B_CAP);
    if gamma(&hi)? > 1 || gamma(&lo)? < 1 {
        return Err(Error::NoBracket { low: format!("{:.6}", lo.to_f64()), high: format!("{CRITICAL_B_CAP}") });
    }
    while Float::with_val(prec, &hi - &lo) > tol {
        let mid = Float::with_val(prec, &lo + &hi) / 2u32;
        if gamma(&mid)? > 1 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Float::with_val(prec, &lo + &hi) / 2u32)
}

/// `(1/2pi) int log|e^{i theta} + a| d theta` by the trapezoidal rule; the
/// mean value theorem gives `log max(a, 1)`.
pub fn log_mean_modulus(a: &Float) -> Result<CertifiedReal> {
    if *a < 0 || *a == 1 {
        return Err(Error::InvalidSpec(format!("log_mean_modulus needs a >= 0, a != 1, got {}", a.to_f64())));
    }
    let prec = a.prec();
    let a2p1 = Float::with_val(prec, a.square_ref()) + 1u32;
    let two_a = Float::with_val(prec, a * 2u32);
    let f = |theta: &Float| -> Result<Float> {
        let m = Float::with_val(prec, &a2p1 + Float::with_val(prec, &two_a * Float::with_val(prec, theta.cos_ref())));
        Ok(m.ln() / 2u32)
    };
    let tol = Float::with_val(prec, 1) >> (prec as i32 / 2);
    let mut cfg = QuadratureConfig::new(tol);
    cfg.max_levels = 20;
    periodic_mean(prec, f, &cfg)
}
