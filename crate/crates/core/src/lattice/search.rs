//! Exhaustive search for integer-valued polynomials under a growth
//! constraint of a fixed degree.

use rayon::prelude::*;
use rug::{Float, Integer};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::gram::{gram_matrix, gram_matrix_truncated, GramMatrix, GramMode};
use crate::ivp::{binomial_i64, check_constraint, sup_check_range, GrowthSpec, IvpCoeffs, NormMode, Verdict};
use crate::real::{to_decimal, ulp, CertifiedReal, Prec};

use super::bounds::{vaaler_ball_bounds, VaalerBall};
use super::ellipsoid::{build_ellipsoid, ellipsoid_log_volume, enumerate_ellipsoid, Ellipsoid, EnumConfig};

/// Limits for [`search_ivps`].
#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub enumeration: EnumConfig,
    pub witness_cap: usize,
    /// Entry tolerance for series Gram matrices; `None` uses `2^-(prec/2)`.
    pub eps: Option<Float>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self { enumeration: EnumConfig::default(), witness_cap: 1000, eps: None }
    }
}

/// The sup-norm body `{c : |P_c(n)| A^-n <= t, |P_c(-m)| B^-m <= t}` over
/// the finite index ranges on which the suprema are attained.
#[derive(Clone, Debug)]
pub struct PolytopeLInf {
    dim: usize,
    /// Row `r` holds the functional `c -> P_c(n_r) base^-n_r`.
    rows: Vec<Vec<Float>>,
    rows_f64: Vec<Vec<f64>>,
    t: Float,
    check_range: u64,
}

impl PolytopeLInf {
    pub fn new(spec: &GrowthSpec, d: usize) -> Result<Self> {
        let prec = spec.prec();
        let dim = d + 1;
        let mut rows: Vec<Vec<Float>> = Vec::new();
        let na = sup_check_range(spec.a(), d);
        let inv = Float::with_val(prec, spec.a().recip_ref());
        let mut w = Float::with_val(prec, 1);
        for n in 0..=na {
            rows.push((0..dim).map(|k| Float::with_val(prec, &binomial_i64(n as i64, k as u32)) * &w).collect());
            w *= &inv;
        }
        let mut check_range = na;
        if let Some(b) = spec.b() {
            let nb = sup_check_range(b, d);
            let inv = Float::with_val(prec, b.recip_ref());
            let mut w = inv.clone();
            for m in 1..=nb + 1 {
                rows.push((0..dim).map(|k| Float::with_val(prec, &binomial_i64(-(m as i64), k as u32)) * &w).collect());
                w *= &inv;
            }
            check_range = check_range.max(nb + 1);
        }
        let rows_f64 = rows.iter().map(|r| r.iter().map(|x| x.to_f64()).collect()).collect();
        Ok(Self { dim, rows, rows_f64, t: spec.t().clone(), check_range })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[Vec<Float>] {
        &self.rows
    }

    pub fn check_range(&self) -> u64 {
        self.check_range
    }

    pub fn threshold(&self) -> &Float {
        &self.t
    }

    /// False only when `c` certainly violates some row: an `f64` evaluation
    /// whose rounding is bounded by `4 k u sum |a_ri c_i|`.
    pub fn may_contain(&self, c: &[i64]) -> bool {
        let t = self.t.to_f64() * (1.0 + 1e-12);
        let k = c.len() as f64;
        self.rows_f64.iter().all(|r| {
            let mut s = 0.0;
            let mut abs = 0.0;
            for (x, &ci) in r.iter().zip(c) {
                let v = x * ci as f64;
                s += v;
                abs += v.abs();
            }
            s.abs() - 4.0 * (k + 2.0) * f64::EPSILON * abs - 1e-300 <= t
        })
    }

    /// `max_r |row_r . c|` at working precision.
    pub fn sup(&self, c: &[i64]) -> Float {
        let prec = self.t.prec();
        self.rows
            .iter()
            .map(|r| {
                let mut s = Float::new(prec);
                for (x, ci) in r.iter().zip(c) {
                    s += Float::with_val(prec, x * *ci);
                }
                s.abs()
            })
            .fold(Float::new(prec), |m, x| m.max(&x))
    }
}

/// Weights `w` on the rows maximizing `det sum_r w_r a_r a_r^T` subject
/// to `sum w = 1`, by the multiplicative D-optimal design iteration. Any
/// weights give a valid enclosure; these make it nearly minimal.
fn d_optimal_weights(rows: &[Vec<f64>], k: usize, iterations: usize) -> Vec<f64> {
    let m = rows.len();
    let mut w = vec![1.0 / m as f64; m];
    for _ in 0..iterations {
        let mut mat = vec![0.0; k * k];
        for (wr, r) in w.iter().zip(rows) {
            for i in 0..k {
                for j in 0..k {
                    mat[i * k + j] += wr * r[i] * r[j];
                }
            }
        }
        let Some(l) = cholesky_f64(&mat, k) else { break };
        let lev: Vec<f64> = rows.iter().map(|r| solve_norm_sq(&l, r, k)).collect();
        for (wr, v) in w.iter_mut().zip(&lev) {
            *wr *= v / k as f64;
        }
        let s: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= s);
    }
    // drop negligible rows without breaking validity
    let max = w.iter().cloned().fold(0.0, f64::max);
    w.iter().map(|&x| if x < 1e-12 * max { 0.0 } else { x }).collect()
}

fn cholesky_f64(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= l[j * n + k] * l[j * n + k];
        }
        if !(d > 0.0) {
            return None;
        }
        let dj = d.sqrt();
        l[j * n + j] = dj;
        for i in j + 1..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = s / dj;
        }
    }
    Some(l)
}

/// `a^T M^-1 a` with `M = L L^T`.
fn solve_norm_sq(l: &[f64], a: &[f64], n: usize) -> f64 {
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut s = a[i];
        for k in 0..i {
            s -= l[i * n + k] * y[k];
        }
        y[i] = s / l[i * n + i];
    }
    y.iter().map(|v| v * v).sum()
}

/// Ellipsoid `{c : sum_r w_r (a_r . c)^2 <= t^2 sum_r w_r}` containing the
/// polytope, since every `|a_r . c| <= t` there.
pub fn enclosing_ellipsoid(poly: &PolytopeLInf) -> Result<Ellipsoid> {
    let k = poly.dim;
    let prec = poly.t.prec();
    let w = d_optimal_weights(&poly.rows_f64, k, 400);
    let mut q = vec![Float::new(prec); k * k];
    let mut total = Float::new(prec);
    let mut abs_sum = Float::new(64);
    for (wr, r) in w.iter().zip(&poly.rows) {
        if *wr == 0.0 {
            continue;
        }
        total += *wr;
        for i in 0..k {
            for j in i..k {
                let t = Float::with_val(prec, &r[i] * &r[j]) * *wr;
                abs_sum = abs_sum.max(&Float::with_val(64, &*t.as_abs()));
                q[i * k + j] += t;
            }
        }
    }
    for i in 0..k {
        for j in 0..i {
            q[i * k + j] = q[j * k + i].clone();
        }
    }
    let round = Float::with_val(64, abs_sum * ulp(prec)) * (4 * poly.rows.len() as u64 + 8);
    let g = GramMatrix::from_entries(GramMode::ArcLength, k, q, Float::new(64), round)?;
    let t2 = Float::with_val(prec, poly.t.square_ref()) * &total;
    // the threshold carries the rounding of the weight sum
    let t2 = Float::with_val(prec, &t2 * (Float::with_val(prec, 1) + ulp(prec) * (4 * poly.rows.len() as u64)));
    Ellipsoid::new(g, t2)
}

/// Outcome of [`search_ivps`].
#[derive(Clone, Debug)]
pub struct SearchReport {
    pub params: GrowthSpec,
    pub d: usize,
    /// Nonzero polynomials certified to satisfy the constraint.
    pub count: u64,
    /// Nonzero candidates whose verdict straddles the threshold.
    pub count_ambiguous: u64,
    /// Candidates produced by the enumerated body before exact filtering.
    pub candidates: u64,
    pub vaaler: Option<VaalerBall>,
    pub logvol: Option<CertifiedReal>,
    pub witnesses: Vec<IvpCoeffs>,
    pub ambiguous: Vec<IvpCoeffs>,
}

impl SearchReport {
    pub fn vaaler_lower(&self) -> Option<&Integer> {
        self.vaaler.as_ref().map(|v| &v.vaaler_lower)
    }
}

impl Serialize for SearchReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("SearchReport", 10)?;
        st.serialize_field("params", &self.params)?;
        st.serialize_field("d", &self.d.to_string())?;
        st.serialize_field("count", &self.count.to_string())?;
        st.serialize_field("count_ambiguous", &self.count_ambiguous.to_string())?;
        st.serialize_field("candidates", &self.candidates.to_string())?;
        st.serialize_field("vaaler_lower", &self.vaaler_lower().map(|v| v.to_string()))?;
        st.serialize_field("ball_upper_logvol", &self.vaaler.as_ref().and_then(|v| v.ball_logvol.clone()))?;
        st.serialize_field("logvol", &self.logvol)?;
        st.serialize_field("witnesses", &self.witnesses)?;
        st.serialize_field("ambiguous", &self.ambiguous)?;
        st.end()
    }
}

fn default_eps(prec: Prec) -> Float {
    Float::with_val(prec, 1) >> (prec as i32 / 2)
}

/// Re-verifies candidates at doubled precision, in order.
fn verify(spec: &GrowthSpec, candidates: Vec<Vec<i64>>) -> Result<Vec<(IvpCoeffs, Verdict)>> {
    let fine = spec.with_prec(2 * spec.prec());
    candidates
        .into_par_iter()
        .filter(|c| c.iter().any(|&x| x != 0))
        .map(|c| {
            let p = IvpCoeffs::from_i64(&c);
            let v = check_constraint(&p, &fine)?;
            Ok((p, v))
        })
        .collect()
}

/// Vaaler and Ball bounds for the sup-norm body `{c : ||P_c|| <= t}` of
/// degree `d`, from `Sigma` at threshold `t/2`, with the log-volume lower
/// bound (exact for `d = 0`). Ball's bound uses the finite check range.
pub fn sup_norm_bounds(spec: &GrowthSpec, d: usize, eps: &Float) -> Result<(VaalerBall, CertifiedReal)> {
    if spec.mode() != NormMode::LInf {
        return Err(Error::InvalidSpec("sup-norm bounds need the linf mode".into()));
    }
    let poly = PolytopeLInf::new(spec, d)?;
    sup_norm_bounds_in(spec, d, poly.check_range(), eps)
}

fn sup_norm_bounds_in(spec: &GrowthSpec, d: usize, m: u64, eps: &Float) -> Result<(VaalerBall, CertifiedReal)> {
    let prec = spec.prec();
    let dim = d + 1;
    let half = spec.with_t(Float::with_val(prec, spec.t() / 2u32))?;
    let sigma = gram_matrix(&half, d, eps)?;
    let mut vb = vaaler_ball_bounds(&sigma, None)?;
    let finite = gram_matrix_truncated(&half, d, m)?.as_finite_sum();
    let rows = if spec.is_two_sided() { 2 * m + 1 } else { m + 1 };
    vb.ball_logvol = vaaler_ball_bounds(&finite, Some(rows))?.ball_logvol;
    let ln2 = Float::with_val(prec, 2u32).ln() * dim as u32;
    // the <= 1/2 body of Sigma at t/2 doubled is the sup-norm body at t
    let logvol = if d == 0 {
        CertifiedReal::rounded(Float::with_val(prec, spec.t() * 2u32).ln())
    } else {
        vb.vaaler_logvol.add(&CertifiedReal::rounded(ln2.clone()))
    };
    if let Some(b) = vb.ball_logvol.take() {
        vb.ball_logvol = Some(b.add(&CertifiedReal::rounded(ln2)));
    }
    Ok((vb, logvol))
}

/// All nonzero `c in Z^(d+1)` with `P_c` satisfying `spec`.
///
/// - `L2` / `L2Weighted`: enumerate the Gram ellipsoid (threshold `2 t^2`
///   for two-sided specs, which contains both one-sided constraints).
/// - `LInf`: enumerate the D-optimal ellipsoid enclosing the sup-norm
///   polytope, reporting Vaaler's bound from `Sigma` at threshold `t/2`.
///
/// Every candidate is re-checked with certified arithmetic at doubled
/// precision; only those get counted.
pub fn search_ivps(spec: &GrowthSpec, d: usize, cfg: &SearchConfig) -> Result<SearchReport> {
    let dim = d + 1;
    if dim > cfg.enumeration.dim_cap {
        return Err(Error::DimensionCap { dim, cap: cfg.enumeration.dim_cap });
    }
    let prec = spec.prec();
    let eps = cfg.eps.clone().unwrap_or_else(|| default_eps(prec));
    let mut prefilter: Option<PolytopeLInf> = None;
    let (body, logvol, vaaler) = match spec.mode() {
        NormMode::L2 | NormMode::L2Weighted => {
            let e = build_ellipsoid(spec, d, &eps)?;
            let logvol = ellipsoid_log_volume(&e).ok();
            let body = if spec.is_two_sided() {
                let t2 = Float::with_val(prec, e.t_squared() * 2u32);
                e.with_threshold(t2)
            } else {
                e
            };
            (body, logvol, None)
        }
        NormMode::LInf => {
            let poly = PolytopeLInf::new(spec, d)?;
            let e = enclosing_ellipsoid(&poly)?;
            prefilter = Some(poly.clone());
            let (vb, logvol) = sup_norm_bounds_in(spec, d, poly.check_range(), &eps)?;
            (e, Some(logvol), Some(vb))
        }
    };
    let found = enumerate_ellipsoid(&body, &cfg.enumeration)?;
    let candidates = found.count_inclusive();
    let coords = found.points.into_iter().map(|p| p.coords);
    let coords: Vec<Vec<i64>> = match &prefilter {
        Some(poly) => coords.filter(|c| poly.may_contain(c)).collect(),
        None => coords.collect(),
    };
    let checked = verify(spec, coords)?;
    let mut report = SearchReport {
        params: spec.clone(),
        d,
        count: 0,
        count_ambiguous: 0,
        candidates,
        vaaler,
        logvol,
        witnesses: Vec::new(),
        ambiguous: Vec::new(),
    };
    for (p, v) in checked {
        match v {
            Verdict::Inside => {
                report.count += 1;
                if report.witnesses.len() < cfg.witness_cap {
                    report.witnesses.push(p);
                }
            }
            Verdict::Boundary => {
                report.count_ambiguous += 1;
                if report.ambiguous.len() < cfg.witness_cap {
                    report.ambiguous.push(p);
                }
            }
            Verdict::Outside => {}
        }
    }
    Ok(report)
}

/// Witness rows for CSV export: `degree,c_0,...,c_d`, padded to the
/// searched degree.
pub fn witness_rows(report: &SearchReport) -> Vec<Vec<String>> {
    report
        .witnesses
        .iter()
        .map(|p| {
            let mut row = vec![p.degree().to_string()];
            row.extend(p.coeffs().iter().map(|c| c.to_string()));
            row.resize(report.d + 2, "0".to_string());
            row
        })
        .collect()
}

impl std::fmt::Display for SearchReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "d={} count={} ambiguous={}", self.d, self.count, self.count_ambiguous)?;
        if let Some(v) = self.vaaler_lower() {
            write!(f, " vaaler_lower={v}")?;
        }
        if let Some(l) = &self.logvol {
            write!(f, " logvol={}", to_decimal(l.value(), 10))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::{float, golden, pi};

    const PREC: Prec = 256;

    #[test]
    fn golden_below_phi_has_no_polynomials() {
        let phi = golden(PREC);
        let t2 = Float::with_val(PREC, &phi * (1.0 - 1e-6));
        let spec = GrowthSpec::one_sided(phi.clone(), NormMode::L2, t2.sqrt()).unwrap();
        for d in 0..=4 {
            let r = search_ivps(&spec, d, &SearchConfig::default()).unwrap();
            assert_eq!((r.count, r.count_ambiguous), (0, 0), "d={d}");
        }
    }

    #[test]
    fn golden_just_above_phi_finds_constants() {
        let phi = golden(PREC);
        let t2 = Float::with_val(PREC, &phi * (1.0 + 1e-6));
        let spec = GrowthSpec::one_sided(phi, NormMode::L2, t2.sqrt()).unwrap();
        let r = search_ivps(&spec, 2, &SearchConfig::default()).unwrap();
        assert!(r.count >= 2);
        assert!(r.witnesses.contains(&IvpCoeffs::from_i64(&[1])));
    }

    #[test]
    fn weighted_search_below_two_over_pi() {
        let two_over_pi: Float = Float::with_val(PREC, pi(PREC).recip_ref()) * 2u32 + 1e-3;
        let spec = GrowthSpec::one_sided(golden(PREC), NormMode::L2Weighted, two_over_pi.sqrt()).unwrap();
        let r = search_ivps(&spec, 2, &SearchConfig::default()).unwrap();
        assert!(r.count >= 1);
        assert!(r.witnesses.contains(&IvpCoeffs::from_i64(&[0, -1, 1])));
        assert!(!r.witnesses.contains(&IvpCoeffs::from_i64(&[0, 2, 1])));
    }

    #[test]
    fn sup_norm_enclosure_contains_polytope() {
        // every point of the polytope found by a box scan lies in the ellipsoid
        let spec = GrowthSpec::one_sided(float(PREC, 2.0), NormMode::LInf, float(PREC, 3.0)).unwrap();
        let poly = PolytopeLInf::new(&spec, 2).unwrap();
        let e = enclosing_ellipsoid(&poly).unwrap();
        for a in -8i64..=8 {
            for b in -8i64..=8 {
                for c in -8i64..=8 {
                    let x = [a, b, c];
                    if poly.sup(&x) <= *poly.threshold() {
                        assert!(e.value(&x) <= *e.t_squared());
                    }
                }
            }
        }
    }

    #[test]
    fn sup_norm_search_matches_box_scan() {
        let spec = GrowthSpec::two_sided(float(PREC, 2.0), float(PREC, 2.5), NormMode::LInf, float(PREC, 4.0)).unwrap();
        let r = search_ivps(&spec, 2, &SearchConfig::default()).unwrap();
        let poly = PolytopeLInf::new(&spec, 2).unwrap();
        let mut want = 0;
        for a in -10i64..=10 {
            for b in -10i64..=10 {
                for c in -10i64..=10 {
                    if (a, b, c) != (0, 0, 0) && poly.sup(&[a, b, c]) <= *poly.threshold() {
                        want += 1;
                    }
                }
            }
        }
        assert_eq!(r.count + r.count_ambiguous, want);
    }

    #[test]
    fn sup_norm_degree_zero_volume() {
        let spec = GrowthSpec::one_sided(golden(PREC), NormMode::LInf, float(PREC, 1.85)).unwrap();
        let r = search_ivps(&spec, 0, &SearchConfig::default()).unwrap();
        assert!((r.logvol.unwrap().to_f64() - 3.7f64.ln()).abs() < 1e-14);
        assert_eq!(r.count, 2);
    }

    #[test]
    fn count_monotone_in_degree() {
        let spec = GrowthSpec::one_sided(golden(PREC), NormMode::LInf, float(PREC, 1.85)).unwrap();
        let mut prev = 0;
        for d in 0..=4 {
            let r = search_ivps(&spec, d, &SearchConfig::default()).unwrap();
            assert!(r.count >= prev);
            prev = r.count;
        }
    }

    #[test]
    fn json_fields_are_strings() {
        let spec = GrowthSpec::one_sided(golden(PREC), NormMode::LInf, float(PREC, 1.85)).unwrap();
        let r = search_ivps(&spec, 2, &SearchConfig::default()).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        assert!(v["count"].is_string());
        assert!(v["vaaler_lower"].is_string());
        assert!(v["witnesses"].is_array());
    }
}
