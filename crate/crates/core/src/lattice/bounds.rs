//! Volume and counting bounds: Vaaler's cube-section bound with Ball's
//! upper bound, and counts of integer points against ellipsoid volume.

use rug::{Float, Integer};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::gram::{log_det, GramMatrix, GramMode};
use crate::real::{to_decimal, CertifiedReal, Prec};

use super::ellipsoid::{ellipsoid_log_volume, enumerate_ellipsoid, Ellipsoid, EnumConfig};

/// Bounds derived from `det(Sigma^T Sigma)` for a matrix in the
/// [`crate::gram::GramMode::SigmaInfinity`] normalization.
#[derive(Clone, Debug)]
pub struct VaalerBall {
    pub log_det: CertifiedReal,
    /// `R = floor(det^-1/2)`, rounded down when the enclosure straddles an
    /// integer.
    pub r: Integer,
    /// `2R` nonzero integer points in the doubled body.
    pub vaaler_lower: Integer,
    /// `-(1/2) log det`: lower bound on the log-volume of `{||Sigma x|| <= 1/2}`.
    pub vaaler_logvol: CertifiedReal,
    /// `((N - k)/2) log 2 - (1/2) log det` when the row count `N` is finite.
    pub ball_logvol: Option<CertifiedReal>,
}

impl Serialize for VaalerBall {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("VaalerBall", 5)?;
        st.serialize_field("log_det", &self.log_det)?;
        st.serialize_field("r", &self.r.to_string())?;
        st.serialize_field("vaaler_lower", &self.vaaler_lower.to_string())?;
        st.serialize_field("vaaler_logvol", &self.vaaler_logvol)?;
        st.serialize_field("ball_logvol", &self.ball_logvol)?;
        st.end()
    }
}

/// Vaaler and Ball bounds for `g = Sigma^T Sigma`; `rows` is the number of
/// rows `N` of `Sigma` when finite.
pub fn vaaler_ball_bounds(g: &GramMatrix, rows: Option<u64>) -> Result<VaalerBall> {
    let prec = g.prec();
    let k = g.dim() as u64;
    let ld = log_det(g)?;
    let half = Float::with_val(prec, -0.5f64);
    let vaaler_logvol = ld.scale(&half);
    let x = vaaler_logvol.exp();
    let r = x.lower().floor().to_integer().unwrap_or_default().max(Integer::new());
    let ball_logvol = match rows {
        Some(n) if n >= k => {
            let l2 = CertifiedReal::rounded(Float::with_val(prec, 2u32).ln()).scale(&(Float::with_val(prec, n - k) / 2u32));
            Some(l2.add(&vaaler_logvol))
        }
        _ => None,
    };
    Ok(VaalerBall { log_det: ld, vaaler_lower: Integer::from(&r * 2u32), r, vaaler_logvol, ball_logvol })
}

/// Counts of `Psi(E)` against `vol(E)` for the diagonal ellipsoid
/// `E = {x : sum_k gamma^(2k) x_k^2 <= t^2}`.
#[derive(Clone, Debug)]
pub struct CountVolume {
    pub dim: usize,
    /// Closed-body count, ambiguous points included.
    pub count: u64,
    pub count_ambiguous: u64,
    pub log_volume: CertifiedReal,
    pub log_ratio: f64,
    /// `-(d+1) log 2`.
    pub lower: f64,
    /// `(d+1) log min(d+1, 1/(1-gamma))`; the constant in front is not
    /// explicit, so `log_ratio / upper_scale` is reported.
    pub upper_scale: f64,
    pub empirical_c2: f64,
}

impl Serialize for CountVolume {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let f = |x: f64| format!("{x:.12e}");
        let mut st = s.serialize_struct("CountVolume", 8)?;
        st.serialize_field("dim", &self.dim.to_string())?;
        st.serialize_field("count", &self.count.to_string())?;
        st.serialize_field("count_ambiguous", &self.count_ambiguous.to_string())?;
        st.serialize_field("log_volume", &self.log_volume)?;
        st.serialize_field("log_ratio", &f(self.log_ratio))?;
        st.serialize_field("lower", &f(self.lower))?;
        st.serialize_field("upper_scale", &f(self.upper_scale))?;
        st.serialize_field("empirical_c2", &f(self.empirical_c2))?;
        st.end()
    }
}

/// Inverse of a unit lower-triangular matrix.
fn unit_lower_inverse(psi: &[Float], n: usize) -> Result<Vec<Float>> {
    let prec = psi[0].prec();
    for i in 0..n {
        if psi[i * n + i] != 1 || (i + 1..n).any(|j| !psi[i * n + j].is_zero()) {
            return Err(Error::InvalidSpec("psi must be unit lower-triangular".into()));
        }
    }
    let mut inv = vec![Float::new(prec); n * n];
    for col in 0..n {
        inv[col * n + col] = Float::with_val(prec, 1);
        for i in col + 1..n {
            let mut s = Float::new(prec);
            for k in col..i {
                s -= Float::with_val(prec, &psi[i * n + k] * &inv[k * n + col]);
            }
            inv[i * n + col] = s;
        }
    }
    Ok(inv)
}

/// `Q' = Psi^-T D Psi^-1`, so that `y in Psi(E)` iff `y^T Q' y <= t^2`.
pub fn pulled_back_form(gamma: &Float, psi: &[Float], n: usize) -> Result<Vec<Float>> {
    pulled_back_with_error(gamma, psi, n).map(|(q, _)| q)
}

/// As [`pulled_back_form`], with a bound on the entry rounding error. The
/// inverse of a dyadic `Psi` is exact at working precision; the powers of
/// `gamma^2` carry relative error `O(n ulp)`, counted with `gamma` itself
/// taken as rounded.
fn pulled_back_with_error(gamma: &Float, psi: &[Float], n: usize) -> Result<(Vec<Float>, Float)> {
    let prec = gamma.prec().max(psi[0].prec());
    let inv = unit_lower_inverse(psi, n)?;
    let g2 = Float::with_val(prec, gamma.square_ref());
    let diag: Vec<Float> = (0..n).map(|k| crate::real::powi(&g2, k as i64)).collect();
    let mut q = vec![Float::new(prec); n * n];
    let mut worst = Float::new(prec);
    for i in 0..n {
        for j in 0..n {
            let mut s = Float::new(prec);
            let mut abs = Float::new(prec);
            for k in 0..n {
                let term = Float::with_val(prec, &inv[k * n + i] * &inv[k * n + j]) * &diag[k];
                abs += Float::with_val(prec, term.abs_ref());
                s += term;
            }
            q[i * n + j] = s;
            worst = worst.max(&abs);
        }
    }
    let err = worst * crate::real::ulp(prec) * (5 * n as u64 + 8);
    // symmetrize exactly
    for i in 0..n {
        for j in 0..i {
            q[i * n + j] = q[j * n + i].clone();
        }
    }
    Ok((q, err))
}

/// `Psi(E)` for `E = {x : sum_k gamma^(2k) x_k^2 <= t^2}` as an ellipsoid
/// with certified entry errors.
pub fn pulled_back_ellipsoid(gamma: &Float, t: &Float, psi: &[Float], n: usize) -> Result<Ellipsoid> {
    if !(*gamma > 0 && *gamma <= 1) || *t < 1 {
        return Err(Error::InvalidSpec("need 0 < gamma <= 1 <= t".into()));
    }
    if psi.len() != n * n || n == 0 {
        return Err(Error::InvalidSpec(format!("psi must have {} entries", n * n)));
    }
    let prec: Prec = gamma.prec().max(psi[0].prec());
    let (q, err) = pulled_back_with_error(gamma, psi, n)?;
    let t2 = Float::with_val(prec, t.square_ref());
    let form = GramMatrix::from_entries(GramMode::ArcLength, n, q, Float::new(prec), err)?;
    Ellipsoid::new(form, t2)
}

/// Enumerates `Psi(E) cap Z^n` and compares with `vol(E)`.
pub fn count_vs_volume_check(gamma: &Float, t: &Float, psi: &[Float], n: usize, cfg: &EnumConfig) -> Result<CountVolume> {
    let e = pulled_back_ellipsoid(gamma, t, psi, n)?;
    let found = enumerate_ellipsoid(&e, cfg)?;
    // Psi is volume preserving
    let log_volume = ellipsoid_log_volume(&e)?;
    let count = found.count_inclusive();
    let log_ratio = (count as f64).ln() - log_volume.to_f64();
    let nf = n as f64;
    let g = gamma.to_f64();
    let m = if g >= 1.0 { nf } else { nf.min(1.0 / (1.0 - g)) };
    let upper_scale = nf * m.ln();
    Ok(CountVolume {
        dim: n,
        count,
        count_ambiguous: found.count_ambiguous(),
        log_volume,
        log_ratio,
        lower: -nf * std::f64::consts::LN_2,
        upper_scale,
        empirical_c2: if upper_scale > 0.0 { log_ratio / upper_scale } else { f64::NAN },
    })
}

impl std::fmt::Display for VaalerBall {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "log det {}, R {}, 2R {}", to_decimal(self.log_det.value(), 12), self.r, self.vaaler_lower)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gram::gram_matrix;
    use crate::ivp::{GrowthSpec, NormMode};
    use crate::real::{float, golden};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const PREC: Prec = 256;

    #[test]
    fn vaaler_scalar_example() {
        // d = 0, A = 2, t = 1: det = 1/3, R = floor(sqrt 3) = 1
        let spec = GrowthSpec::one_sided(float(PREC, 2.0), NormMode::LInf, float(PREC, 1.0)).unwrap();
        let g = gram_matrix(&spec, 0, &float(PREC, 1e-50)).unwrap();
        let vb = vaaler_ball_bounds(&g, None).unwrap();
        assert!((vb.log_det.to_f64() + 3f64.ln()).abs() < 1e-40);
        assert_eq!(vb.r, 1);
        assert_eq!(vb.vaaler_lower, 2);
        assert!(vb.ball_logvol.is_none());
    }

    #[test]
    fn golden_sigma_radius() {
        // det(Xi_1) = phi^(d+1) at A = phi, so the Sigma matrix at t has
        // det (phi / (4 t^2))^(d+1)
        let phi = golden(PREC);
        for (t, d) in [(1.0, 3usize), (0.8, 5), (0.5, 2)] {
            let spec = GrowthSpec::one_sided(phi.clone(), NormMode::LInf, float(PREC, t)).unwrap();
            let g = gram_matrix(&spec, d, &float(PREC, 1e-50)).unwrap();
            let vb = vaaler_ball_bounds(&g, Some(40)).unwrap();
            let ld = (d + 1) as f64 * (phi.to_f64() / (4.0 * t * t)).ln();
            assert!((vb.log_det.to_f64() - ld).abs() < 1e-12);
            let r = (-0.5 * ld).exp().floor();
            assert_eq!(vb.r, r as i64);
        }
    }

    #[test]
    fn count_vs_volume_identity_cube() {
        let n = 2;
        let psi = vec![float(PREC, 1.0), Float::new(PREC), Float::new(PREC), float(PREC, 1.0)];
        let prev = count_vs_volume_check(&float(PREC, 1.0), &float(PREC, 10.0), &psi, n, &EnumConfig::default()).unwrap();
        let big = count_vs_volume_check(&float(PREC, 1.0), &float(PREC, 40.0), &psi, n, &EnumConfig::default()).unwrap();
        assert!(big.log_ratio.abs() < prev.log_ratio.abs() + 1e-12);
        assert!(big.log_ratio.abs() < 0.01);
    }

    fn random_psi(rng: &mut ChaCha8Rng, n: usize) -> Vec<Float> {
        let mut p = vec![Float::new(PREC); n * n];
        for i in 0..n {
            p[i * n + i] = float(PREC, 1.0);
            for j in 0..i {
                p[i * n + j] = float(PREC, rng.gen_range(-4i32..=4) as f64 / 4.0);
            }
        }
        p
    }

    #[test]
    fn lower_bound_holds_for_random_psi() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..6 {
            let n = rng.gen_range(1..=5);
            let psi = random_psi(&mut rng, n);
            let cv = count_vs_volume_check(&float(PREC, 0.8), &float(PREC, 3.0), &psi, n, &EnumConfig::default()).unwrap();
            assert!(cv.log_ratio >= cv.lower, "{cv:?}");
        }
    }

    #[test]
    fn unimodular_change_preserves_count() {
        // U Psi (E) cap Z^n = U (Psi(E) cap Z^n) for integer unimodular U
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let n = 3;
        let u: Vec<i64> = vec![1, 0, 0, 2, 1, 0, -1, 3, 1];
        for _ in 0..4 {
            let psi = random_psi(&mut rng, n);
            let mut upsi = vec![Float::new(PREC); n * n];
            for i in 0..n {
                for j in 0..n {
                    let mut s = Float::new(PREC);
                    for k in 0..n {
                        s += Float::with_val(PREC, &psi[k * n + j] * u[i * n + k]);
                    }
                    upsi[i * n + j] = s;
                }
            }
            let a = count_vs_volume_check(&float(PREC, 0.8), &float(PREC, 3.0), &psi, n, &EnumConfig::default()).unwrap();
            let b = count_vs_volume_check(&float(PREC, 0.8), &float(PREC, 3.0), &upsi, n, &EnumConfig::default()).unwrap();
            assert_eq!(a.count, b.count);
            assert!((a.log_volume.to_f64() - b.log_volume.to_f64()).abs() < 1e-12);
        }
    }
}
