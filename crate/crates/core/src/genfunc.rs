//! Generating functions `g_P(z) = sum_n P(n) z^n`, continued to `C \ {1}`
//! through `g_P(z) = (1/(1-z)) sum_k c_k (z/(1-z))^k`, and the quadrature
//! checks of their mean-square identities on circles and disks.

use rayon::prelude::*;
use rug::Float;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ivp::{growth_functional_tol, GrowthSpec, IvpCoeffs, NormMode, Side};
use crate::real::{decimal_digits, pi, to_decimal, ulp, CertifiedReal, ComplexHP, Prec};

/// Points closer than `2^(-prec/2)` to a pole are rejected.
pub fn pole_guard(prec: Prec) -> Float {
    Float::with_val(prec, 1) >> (prec as i32 / 2)
}

fn check_pole(dist: &Float, what: &str) -> Result<()> {
    let guard = pole_guard(dist.prec());
    if *dist < guard {
        return Err(Error::PoleProximity(format!("{what} (distance {:.3e})", dist.to_f64())));
    }
    Ok(())
}

/// `g_P(z)` on `C \ {1}`.
pub fn gen_func_eval(p: &IvpCoeffs, z: &ComplexHP) -> Result<ComplexHP> {
    let one_minus = ComplexHP::one(z.prec()).sub(z);
    check_pole(&one_minus.abs(), "z = 1")?;
    let inv = one_minus.recip();
    let w = z.mul(&inv);
    let mut acc = ComplexHP::real(Float::new(z.prec()));
    for c in p.coeffs().iter().rev() {
        acc = acc.mul(&w).add(&ComplexHP::real(Float::with_val(z.prec(), c)));
    }
    Ok(acc.mul(&inv))
}

/// `psi(z) = z / (1 - z)`
pub fn mobius_psi(z: &ComplexHP) -> Result<ComplexHP> {
    let den = ComplexHP::one(z.prec()).sub(z);
    check_pole(&den.abs(), "z = 1")?;
    Ok(z.div(&den))
}

/// `phi(w) = w / (1 + w)`, the inverse of [`mobius_psi`].
pub fn mobius_phi(w: &ComplexHP) -> Result<ComplexHP> {
    let den = ComplexHP::one(w.prec()).add(w);
    check_pole(&den.abs(), "w = -1")?;
    Ok(w.div(&den))
}

/// `phi'(w) = 1 / (1 + w)^2`
pub fn mobius_phi_derivative(w: &ComplexHP) -> Result<ComplexHP> {
    let den = ComplexHP::one(w.prec()).add(w);
    check_pole(&den.abs(), "w = -1")?;
    Ok(den.mul(&den).recip())
}

/// Circle (or disk) with a complex center.
#[derive(Clone, Debug, PartialEq)]
pub struct CircleSpec {
    pub center: ComplexHP,
    pub radius: Float,
}

impl CircleSpec {
    pub fn new(center: ComplexHP, radius: Float) -> Result<Self> {
        if !(radius > 0) {
            return Err(Error::InvalidSpec(format!("radius {} must be positive", radius.to_f64())));
        }
        Ok(Self { center, radius })
    }

    pub fn real_center(center: Float, radius: Float) -> Result<Self> {
        Self::new(ComplexHP::real(center), radius)
    }

    pub fn prec(&self) -> Prec {
        self.radius.prec()
    }

    pub fn point_at(&self, theta: &Float) -> ComplexHP {
        self.center.add(&ComplexHP::polar(&self.radius, theta))
    }

    /// `| |z - center| - radius |`
    pub fn distance_to(&self, z: &ComplexHP) -> Float {
        let d = z.sub(&self.center).abs() - &self.radius;
        d.abs()
    }

    /// Mirror image through the vertical line `Re w = x`.
    pub fn reflect(&self, x: &Float) -> Self {
        let re = Float::with_val(self.prec(), x * 2u32) - &self.center.re;
        Self { center: ComplexHP::new(re, self.center.im.clone()), radius: self.radius.clone() }
    }
}

impl Serialize for CircleSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("CircleSpec", 2)?;
        st.serialize_field("center", &self.center)?;
        st.serialize_field("radius", &to_decimal(&self.radius, decimal_digits(self.prec())))?;
        st.end()
    }
}

/// Which constraint circle is mapped: `A^-1 T` or `B T`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    PositiveSide,
    NegativeSide,
}

/// `psi(A^-1 T) = T(1/(A^2-1), A/(A^2-1))` and
/// `psi(B T) = T(B^2/(1-B^2), B/(B^2-1))`.
pub fn image_circle(orientation: Orientation, base: &Float) -> Result<CircleSpec> {
    if !(*base > 1) {
        return Err(Error::InvalidBase(format!("{}", base.to_f64())));
    }
    let prec = base.prec();
    let sq = Float::with_val(prec, base.square_ref());
    let den = Float::with_val(prec, &sq - 1u32);
    let radius = Float::with_val(prec, base / &den);
    let center = match orientation {
        Orientation::PositiveSide => Float::with_val(prec, den.recip_ref()),
        Orientation::NegativeSide => -Float::with_val(prec, &sq / &den),
    };
    CircleSpec::real_center(center, radius)
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, refined by Newton
/// iteration at the requested precision.
pub fn gauss_legendre(n: usize, prec: Prec) -> Vec<(Float, Float)> {
    assert!(n > 0);
    let work = prec + 32;
    let tol = Float::with_val(work, 1) >> (prec as i32 + 8);
    let mut nodes: Vec<(Float, Float)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let guess = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut x = Float::with_val(work, guess);
            loop {
                let (p1, deriv) = legendre_with_derivative(n, &x);
                let step = Float::with_val(work, &p1 / &deriv);
                x -= &step;
                if step.abs() < tol {
                    break;
                }
            }
            let (_, deriv) = legendre_with_derivative(n, &x);
            let one_minus = Float::with_val(work, 1) - Float::with_val(work, x.square_ref());
            let w = Float::with_val(work, 2) / (one_minus * Float::with_val(work, deriv.square_ref()));
            (Float::with_val(prec, x), Float::with_val(prec, w))
        })
        .collect();
    nodes.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite nodes"));
    nodes
}

/// `P_n(x)` and `P_n'(x)` by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: &Float) -> (Float, Float) {
    let work = x.prec();
    let mut p0 = Float::with_val(work, 1);
    let mut p1 = x.clone();
    for k in 2..=n {
        let p2 = (Float::with_val(work, x * &p1) * (2 * k - 1) as u32 - Float::with_val(work, &p0 * (k - 1) as u32)) / k as u32;
        p0 = p1;
        p1 = p2;
    }
    let x2m1 = Float::with_val(work, x.square_ref()) - 1u32;
    let deriv = Float::with_val(work, Float::with_val(work, x * &p1) - &p0) * n as u32 / &x2m1;
    (p1, deriv)
}

/// Convergence controls for the doubling quadratures.
#[derive(Clone, Debug)]
pub struct QuadratureConfig {
    pub tol: Float,
    pub min_nodes: usize,
    pub max_levels: u32,
}

impl QuadratureConfig {
    pub fn new(tol: Float) -> Self {
        Self { tol, min_nodes: 16, max_levels: 14 }
    }
}

/// `(1/2pi) int_0^{2pi} f(theta) dtheta` by the trapezoidal rule, doubling
/// the node count until two levels differ by less than `cfg.tol`. The
/// returned error is that last difference plus rounding.
pub fn periodic_mean<F>(prec: Prec, f: F, cfg: &QuadratureConfig) -> Result<CertifiedReal>
where
    F: Fn(&Float) -> Result<Float> + Sync,
{
    let two_pi = Float::with_val(prec, pi(prec) * 2u32);
    let sum_at = |n: usize, idx: &mut dyn Iterator<Item = usize>| -> Result<Float> {
        let pts: Vec<usize> = idx.collect();
        let vals: Vec<Float> = pts
            .par_iter()
            .map(|&i| {
                let theta = Float::with_val(prec, &two_pi * i as u32) / n as u32;
                f(&theta)
            })
            .collect::<Result<Vec<_>>>()?;
        // sequential reduction keeps the result independent of thread count
        Ok(vals.into_iter().fold(Float::new(prec), |acc, v| acc + v))
    };
    let mut n = cfg.min_nodes.max(2);
    let mut total = sum_at(n, &mut (0..n))?;
    let mut mean = Float::with_val(prec, &total / n as u32);
    let mut last_change = Float::with_val(prec, f64::INFINITY);
    for _ in 0..cfg.max_levels {
        let odd = sum_at(2 * n, &mut (0..n).map(|i| 2 * i + 1))?;
        total += odd;
        n *= 2;
        let next = Float::with_val(prec, &total / n as u32);
        last_change = Float::with_val(prec, &next - &mean).abs();
        mean = next;
        if last_change < cfg.tol {
            let round = Float::with_val(64, &*mean.as_abs() * &ulp(prec)) * (n as u32 + 4);
            return Ok(CertifiedReal::new(mean, &(Float::with_val(64, &last_change) + round)));
        }
    }
    Err(Error::QuadratureNotConverged { levels: cfg.max_levels, last_change: format!("{:.3e}", last_change.to_f64()) })
}

/// `(2 / R^2) int_0^R rho h(rho) drho`, the normalized disk average of a
/// radial profile `h` (itself a circle mean), by Gauss-Legendre in `rho`
/// with doubling node counts.
fn disk_average<H>(prec: Prec, radius: &Float, h: H, cfg: &QuadratureConfig) -> Result<CertifiedReal>
where
    H: Fn(&Float) -> Result<CertifiedReal> + Sync,
{
    let mut n = 8usize;
    let mut prev: Option<CertifiedReal> = None;
    for _ in 0..cfg.max_levels {
        let rule = gauss_legendre(n, prec);
        let terms: Vec<(Float, Float)> = rule
            .par_iter()
            .map(|(x, w)| {
                // rho = R (x + 1) / 2, drho = R/2 dx
                let rho = Float::with_val(prec, Float::with_val(prec, x + 1u32) * radius) / 2u32;
                let inner = h(&rho)?;
                let weight = Float::with_val(prec, w * &rho);
                let err = Float::with_val(64, inner.error() * &weight);
                Ok((weight * inner.value(), err))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut sum = Float::new(prec);
        let mut inner_err = Float::new(64);
        for (v, e) in terms {
            sum += v;
            inner_err += e;
        }
        // (2/R^2) (R/2) sum = sum / R
        let value = Float::with_val(prec, &sum / radius);
        let inner_err = Float::with_val(64, &inner_err / radius);
        if let Some(p) = &prev {
            let change = Float::with_val(prec, &value - p.value()).abs();
            if change < cfg.tol {
                let err = Float::with_val(64, &change) + &inner_err;
                return Ok(CertifiedReal::new(value, &err));
            }
        }
        prev = Some(CertifiedReal::new(value, &inner_err));
        n *= 2;
    }
    let last = prev.map(|p| p.error_f64()).unwrap_or(f64::INFINITY);
    Err(Error::QuadratureNotConverged { levels: cfg.max_levels, last_change: format!("{last:.3e}") })
}

/// The measure in a mean-square identity of `g_P`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Measure {
    /// `(1/2 pi r) int_{rT} |g_P|^2 |dw|`; positive side for `r < 1`,
    /// negative side for `r > 1`.
    Arc,
    /// `(1/pi r^2) int_{rD} |g_P|^2 dA`, `r < 1`.
    Area,
    /// `(r^2/pi) int_{|w| > r} |g_P|^2 dA / |w|^4`, `r > 1`.
    ExteriorArea,
}

fn mean_sq_on_circle(p: &IvpCoeffs, rho: &Float, invert: bool, cfg: &QuadratureConfig) -> Result<CertifiedReal> {
    let prec = rho.prec();
    if rho.is_zero() {
        // g_P(0) = c_0, and g_P(1/u) -> 0 as u -> 0
        let v = if invert { Float::new(prec) } else { Float::with_val(prec, &p.coeffs()[0]) };
        return Ok(CertifiedReal::exact(Float::with_val(prec, v.square_ref())));
    }
    periodic_mean(
        prec,
        |theta| {
            let mut z = ComplexHP::polar(rho, theta);
            if invert {
                z = z.recip();
            }
            Ok(gen_func_eval(p, &z)?.norm_sqr())
        },
        cfg,
    )
}

/// Both sides of a mean-square identity: `lhs` by quadrature of `|g_P|^2`,
/// `rhs` by the coefficient series.
pub fn quadrature_identity_check(
    p: &IvpCoeffs,
    r: &Float,
    measure: Measure,
    cfg: &QuadratureConfig,
) -> Result<(CertifiedReal, CertifiedReal)> {
    let prec = r.prec();
    let one = Float::with_val(prec, 1);
    let margin = Float::with_val(prec, r - &one).abs();
    if margin < pole_guard(prec) || !(*r > 0) {
        return Err(Error::InvalidSpec("r must be positive and away from 1".into()));
    }
    let inside = *r < 1;
    let (side, base, mode) = match (measure, inside) {
        (Measure::Arc, true) => (Side::Positive, Float::with_val(prec, r.recip_ref()), NormMode::L2),
        (Measure::Arc, false) => (Side::Negative, r.clone(), NormMode::L2),
        (Measure::Area, true) => (Side::Positive, Float::with_val(prec, r.recip_ref()), NormMode::L2Weighted),
        (Measure::ExteriorArea, false) => (Side::Negative, r.clone(), NormMode::L2Weighted),
        _ => return Err(Error::InvalidSpec(format!("{measure:?} needs r on the other side of 1"))),
    };
    let spec = match side {
        Side::Positive => GrowthSpec::one_sided(base, mode, one.clone())?,
        Side::Negative => GrowthSpec::two_sided(one.clone() * 2u32, base, mode, one.clone())?,
    };
    let rhs = growth_functional_tol(p, &spec, side, &Float::with_val(prec, &cfg.tol / 64u32))?;
    let lhs = match measure {
        Measure::Arc => mean_sq_on_circle(p, r, false, cfg)?,
        Measure::Area => disk_average(prec, r, |rho| mean_sq_on_circle(p, rho, false, cfg), cfg)?,
        Measure::ExteriorArea => {
            // u = 1/w turns dA(w)/|w|^4 into dA(u) on |u| < 1/r
            let s = Float::with_val(prec, r.recip_ref());
            disk_average(prec, &s, |rho| mean_sq_on_circle(p, rho, true, cfg), cfg)?
        }
    };
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::{float, golden};
    use proptest::prelude::*;
    use rug::Integer;

    const PREC: Prec = 256;

    fn c(re: f64, im: f64) -> ComplexHP {
        ComplexHP::from_f64(PREC, re, im)
    }

    fn close(a: &ComplexHP, b: &ComplexHP, tol: f64) -> bool {
        a.sub(b).abs() < tol
    }

    #[test]
    fn eval_examples() {
        let g = gen_func_eval(&IvpCoeffs::from_i64(&[1]), &c(0.0, 0.0)).unwrap();
        assert!(close(&g, &c(1.0, 0.0), 1e-70));
        let g = gen_func_eval(&IvpCoeffs::from_i64(&[0, 1]), &c(0.5, 0.0)).unwrap();
        assert!(close(&g, &c(2.0, 0.0), 1e-70));
        // direct partial sum of n 2^-n
        let mut s = Float::new(PREC);
        for n in 1..400u32 {
            s += Float::with_val(PREC, n) >> n as i32;
        }
        assert!(close(&g, &ComplexHP::real(s), 1e-70));
    }

    #[test]
    fn pole_is_rejected() {
        let p = IvpCoeffs::from_i64(&[1]);
        assert!(matches!(gen_func_eval(&p, &c(1.0, 0.0)), Err(Error::PoleProximity(_))));
        let near = ComplexHP::real(Float::with_val(PREC, 1) + (Float::with_val(PREC, 1) >> 200));
        assert!(gen_func_eval(&p, &near).is_err());
        assert!(mobius_phi(&c(-1.0, 0.0)).is_err());
        assert!(mobius_psi(&c(1.0, 0.0)).is_err());
    }

    #[test]
    fn mobius_examples() {
        assert!(close(&mobius_psi(&c(0.0, 0.0)).unwrap(), &c(0.0, 0.0), 1e-70));
        assert!(close(&mobius_phi(&c(0.0, 0.0)).unwrap(), &c(0.0, 0.0), 1e-70));
        assert!(close(&mobius_psi(&c(0.5, 0.0)).unwrap(), &c(1.0, 0.0), 1e-70));
        let w = c(0.3, -0.7);
        let d = mobius_phi_derivative(&w).unwrap();
        let h = Float::with_val(PREC, 1e-30);
        let fd = mobius_phi(&w.add(&ComplexHP::real(h.clone()))).unwrap().sub(&mobius_phi(&w).unwrap());
        let fd = fd.scale(&Float::with_val(PREC, h.recip_ref()));
        assert!(close(&fd, &d, 1e-25));
    }

    #[test]
    fn image_circle_examples() {
        let phi = golden(PREC);
        let t1 = image_circle(Orientation::PositiveSide, &phi).unwrap();
        let inv_phi = Float::with_val(PREC, phi.recip_ref());
        assert!(Float::with_val(PREC, &t1.center.re - &inv_phi).abs() < 1e-70);
        assert!(Float::with_val(PREC, &t1.radius - 1u32).abs() < 1e-70);
        let t2 = image_circle(Orientation::NegativeSide, &float(PREC, 2.0)).unwrap();
        assert!(Float::with_val(PREC, Float::with_val(PREC, &t2.center.re * 3u32) + 4u32).abs() < 1e-70);
        assert!(Float::with_val(PREC, Float::with_val(PREC, &t2.radius * 3u32) - 2u32).abs() < 1e-70);
        assert!(matches!(image_circle(Orientation::PositiveSide, &float(PREC, 1.0)), Err(Error::InvalidBase(_))));
    }

    #[test]
    fn image_circles_contain_mapped_samples() {
        for &(base, orient) in &[
            (2.0, Orientation::PositiveSide),
            (3.5, Orientation::NegativeSide),
            (1.3, Orientation::PositiveSide),
            (1.7, Orientation::NegativeSide),
        ] {
            let b = float(PREC, base);
            let circ = image_circle(orient, &b).unwrap();
            let src_r = match orient {
                Orientation::PositiveSide => Float::with_val(PREC, b.recip_ref()),
                Orientation::NegativeSide => b.clone(),
            };
            for i in 0..20 {
                let theta = Float::with_val(PREC, pi(PREC) * 2u32) * i as u32 / 20u32;
                let z = ComplexHP::polar(&src_r, &theta);
                let w = mobius_psi(&z).unwrap();
                assert!(circ.distance_to(&w) < 1e-20);
            }
        }
    }

    #[test]
    fn equal_bases_give_mirror_circles() {
        let a = float(PREC, 2.5);
        let t1 = image_circle(Orientation::PositiveSide, &a).unwrap();
        let t2 = image_circle(Orientation::NegativeSide, &a).unwrap();
        let mid = Float::with_val(PREC, &t1.center.re + &t2.center.re) / 2u32;
        let r = t1.reflect(&mid);
        assert!(Float::with_val(PREC, &r.center.re - &t2.center.re).abs() < 1e-70);
        assert!(Float::with_val(PREC, &r.radius - &t2.radius).abs() < 1e-70);
        // the midpoint is -1/2 for any A = B
        assert!(Float::with_val(PREC, &mid + 0.5f64).abs() < 1e-70);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let rule = gauss_legendre(10, PREC);
        assert_eq!(rule.len(), 10);
        for k in 0..20u32 {
            let s: Float = rule.iter().fold(Float::new(PREC), |acc, (x, w)| acc + crate::real::powi(x, k as i64) * w);
            let expect = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            assert!((s.to_f64() - expect).abs() < 1e-15, "k={k}");
        }
        let odd = gauss_legendre(7, PREC);
        assert_eq!(odd.len(), 7);
        assert!(odd[3].0.is_zero() || odd[3].0.clone().abs() < 1e-70);
    }

    #[test]
    fn quadrature_constant_at_half() {
        let cfg = QuadratureConfig::new(float(PREC, 1e-40));
        let (lhs, rhs) = quadrature_identity_check(&IvpCoeffs::from_i64(&[1]), &float(PREC, 0.5), Measure::Arc, &cfg).unwrap();
        let four_thirds = Float::with_val(PREC, 4) / 3u32;
        assert!(lhs.contains(&four_thirds) || Float::with_val(PREC, lhs.value() - &four_thirds).abs() < 1e-39);
        assert!(rhs.contains(&four_thirds));
    }

    #[test]
    fn quadrature_zero_polynomial() {
        let cfg = QuadratureConfig::new(float(PREC, 1e-30));
        for (r, m) in [(0.5, Measure::Arc), (0.5, Measure::Area), (2.0, Measure::Arc), (2.0, Measure::ExteriorArea)] {
            let (lhs, rhs) = quadrature_identity_check(&IvpCoeffs::zero(), &float(PREC, r), m, &cfg).unwrap();
            assert!(lhs.value().is_zero() && rhs.value().is_zero());
        }
    }

    #[test]
    fn quadrature_wrong_side_rejected() {
        let cfg = QuadratureConfig::new(float(PREC, 1e-20));
        let p = IvpCoeffs::from_i64(&[1]);
        assert!(quadrature_identity_check(&p, &float(PREC, 2.0), Measure::Area, &cfg).is_err());
        assert!(quadrature_identity_check(&p, &float(PREC, 0.5), Measure::ExteriorArea, &cfg).is_err());
    }

    #[test]
    fn quadrature_budget_exhaustion_is_reported() {
        let cfg = QuadratureConfig { tol: float(PREC, 1e-60), min_nodes: 4, max_levels: 2 };
        let r = quadrature_identity_check(&IvpCoeffs::from_i64(&[1, 3, 1]), &float(PREC, 0.9), Measure::Arc, &cfg);
        assert!(matches!(r, Err(Error::QuadratureNotConverged { .. })));
    }

    fn tail_bound(p: &IvpCoeffs, x: f64, n0: usize) -> f64 {
        // |P(n)| <= ||c||_1 binom(n, d) and geometric comparison beyond n0 >= 2d
        let d = p.degree();
        let l1 = p.l1_norm().to_f64();
        let b = crate::ivp::binomial_i64(n0 as i64 + 1, d as u32).to_f64();
        let ratio = ((n0 + 2) as f64 / (n0 + 2 - d) as f64) * x;
        assert!(ratio < 1.0);
        l1 * b * x.powi(n0 as i32 + 1) / (1.0 - ratio)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn matches_power_series_inside(v in prop::collection::vec(-5i64..=5, 1..=5), re in -0.6f64..0.6, im in -0.6f64..0.6) {
            prop_assume!(re * re + im * im < 0.36);
            let p = IvpCoeffs::from_i64(&v);
            let z = c(re, im);
            let g = gen_func_eval(&p, &z).unwrap();
            let n_max = 200usize;
            let mut s = ComplexHP::real(Float::new(PREC));
            let mut zn = ComplexHP::one(PREC);
            for val in p.values_forward().take(n_max + 1) {
                s = s.add(&zn.scale(&Float::with_val(PREC, &val)));
                zn = zn.mul(&z);
            }
            let bound = tail_bound(&p, (re * re + im * im).sqrt(), n_max) + 1e-60;
            prop_assert!(g.sub(&s).abs() <= bound);
        }

        #[test]
        fn matches_laurent_series_outside(v in prop::collection::vec(-5i64..=5, 1..=5), re in -4.0f64..4.0, im in -4.0f64..4.0) {
            prop_assume!(re * re + im * im > 9.0);
            let p = IvpCoeffs::from_i64(&v);
            let z = c(re, im);
            let g = gen_func_eval(&p, &z).unwrap();
            let zi = z.recip();
            let mut s = ComplexHP::real(Float::new(PREC));
            let mut zn = zi.clone();
            for val in p.values_backward().take(150) {
                s = s.sub(&zn.scale(&Float::with_val(PREC, &val)));
                zn = zn.mul(&zi);
            }
            // |P(-n)| <= ||c||_1 binom(n+d-1, d) <= ||c||_1 (n+4)^5 here; |z|^-1 < 1/3
            let bound = p.l1_norm().to_f64() * 155f64.powi(5) * (1.0f64 / 3.0).powi(150) * 2.0 + 1e-60;
            prop_assert!(g.sub(&s).abs() <= bound);
        }

        #[test]
        fn mobius_maps_are_inverse(re in -5.0f64..5.0, im in -5.0f64..5.0) {
            let z = c(re, im);
            prop_assume!(z.sub(&c(1.0, 0.0)).abs() > 1e-3 && z.add(&c(1.0, 0.0)).abs() > 1e-3);
            let tol = 10f64.powf(-(PREC as f64 * std::f64::consts::LOG10_2) / 4.0);
            let back = mobius_phi(&mobius_psi(&z).unwrap()).unwrap();
            prop_assert!(close(&back, &z, tol));
            let fwd = mobius_psi(&mobius_phi(&z).unwrap()).unwrap();
            prop_assert!(close(&fwd, &z, tol));
        }
    }

    #[test]
    fn area_identity_random_polynomial() {
        let cfg = QuadratureConfig::new(float(PREC, 1e-25));
        let p = IvpCoeffs::new(vec![Integer::from(3), Integer::from(-2), Integer::from(5), Integer::from(1)]);
        let phi = golden(PREC);
        let r = Float::with_val(PREC, phi.recip_ref());
        let (lhs, rhs) = quadrature_identity_check(&p, &r, Measure::Area, &cfg).unwrap();
        assert!(Float::with_val(PREC, lhs.value() - rhs.value()).abs() < 1e-20, "{lhs} vs {rhs}");
    }

    #[test]
    fn exterior_identities() {
        let cfg = QuadratureConfig::new(float(PREC, 1e-25));
        let p = IvpCoeffs::from_i64(&[1, 4, -2]);
        for m in [Measure::Arc, Measure::ExteriorArea] {
            let (lhs, rhs) = quadrature_identity_check(&p, &float(PREC, 1.5), m, &cfg).unwrap();
            assert!(Float::with_val(PREC, lhs.value() - rhs.value()).abs() < 1e-20, "{m:?}: {lhs} vs {rhs}");
        }
    }
}
