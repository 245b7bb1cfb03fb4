//! Ellipsoids `{c : c^T Q c <= t^2}` and their integer points.

use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use rug::Float;

use crate::error::{Error, Result};
use crate::gram::{cholesky, gram_matrix, log_det, Cholesky, GramMatrix, GramMode};
use crate::ivp::{GrowthSpec, NormMode};
use crate::real::{pi, ulp, CertifiedReal, Prec};

/// Default bound on the enumeration dimension.
pub const DIM_CAP: usize = 12;

/// `{c in R^dim : c^T Q c <= t^2}`; `Q` carries its own entry error bounds.
#[derive(Clone, Debug)]
pub struct Ellipsoid {
    q: GramMatrix,
    t_squared: Float,
}

impl Ellipsoid {
    pub fn new(q: GramMatrix, t_squared: Float) -> Result<Self> {
        if !(t_squared >= 0) {
            return Err(Error::InvalidSpec("ellipsoid threshold must be non-negative".into()));
        }
        Ok(Self { q, t_squared })
    }

    /// Exact symmetric form from row-major entries.
    pub fn from_rows(dim: usize, entries: Vec<Float>, t_squared: Float) -> Result<Self> {
        let q = GramMatrix::from_entries(GramMode::ArcLength, dim, entries, Float::new(64), Float::new(64))?;
        Self::new(q, t_squared)
    }

    pub fn dim(&self) -> usize {
        self.q.dim()
    }

    pub fn form(&self) -> &GramMatrix {
        &self.q
    }

    pub fn t_squared(&self) -> &Float {
        &self.t_squared
    }

    pub fn prec(&self) -> Prec {
        self.q.prec()
    }

    /// Same form, threshold multiplied by `s`.
    pub fn with_threshold(&self, t_squared: Float) -> Self {
        Self { q: self.q.clone(), t_squared }
    }

    /// `c^T Q c` at working precision.
    pub fn value(&self, c: &[i64]) -> Float {
        let n = self.dim();
        let prec = self.prec();
        let mut s = Float::new(prec);
        for i in 0..n {
            if c[i] == 0 {
                continue;
            }
            let mut row = Float::new(prec);
            for j in 0..n {
                if c[j] != 0 {
                    row += Float::with_val(prec, self.q.entry(i, j) * c[j]);
                }
            }
            s += row * c[i];
        }
        s
    }

    /// Bound on `|c^T Q c - c^T Q~ c|` for the true form `Q~` plus the
    /// rounding of [`Ellipsoid::value`].
    pub fn value_slack(&self, c: &[i64], value: &Float) -> Float {
        let l1: f64 = c.iter().map(|x| x.unsigned_abs() as f64).sum();
        let n = self.dim() as u32;
        let abs_q = self.q.entries().iter().fold(Float::new(64), |m, e| m.max(&Float::with_val(64, &*e.as_abs())));
        let round = Float::with_val(64, &abs_q * &ulp(self.prec())) * (l1 * l1) * (2 * n + 4)
            + Float::with_val(64, &*value.as_abs() * &ulp(self.prec())) * 4u32;
        Float::with_val(64, self.q.entry_error() * (l1 * l1) * 1.0001f64) + round
    }

    /// Semi-axis bound `t sqrt((Q^-1)_ii)` for each coordinate, from the
    /// Cholesky factor.
    pub fn coordinate_bounds(&self) -> Result<Vec<f64>> {
        let ch = cholesky(&self.q)?;
        let inv = ch.inverse();
        let n = self.dim();
        let t = self.t_squared.to_f64().sqrt();
        // (Q^-1)_ii = sum_k (L^-1)_{k i}^2
        Ok((0..n)
            .map(|i| {
                let s: f64 = (i..n).map(|k| inv[k * n + i].to_f64().powi(2)).sum();
                t * s.sqrt()
            })
            .collect())
    }
}

/// Ellipsoid of an `L2` or `L2Weighted` spec: `Q` is the series Gram matrix
/// and the threshold `t^2`. For two-sided specs the combined form is used;
/// the exact body (each side `<= t^2`) lies between thresholds `t^2` and
/// `2 t^2` of that form.
pub fn build_ellipsoid(spec: &GrowthSpec, d: usize, eps: &Float) -> Result<Ellipsoid> {
    if spec.mode() == NormMode::LInf {
        return Err(Error::InvalidSpec("the sup-norm body is a polytope, not an ellipsoid".into()));
    }
    let g = gram_matrix(spec, d, eps)?;
    let t2 = Float::with_val(spec.prec(), spec.t().square_ref());
    Ellipsoid::new(g, t2)
}

/// One enumerated integer point.
#[derive(Clone, Debug)]
pub struct LatticePoint {
    pub coords: Vec<i64>,
    pub value: Float,
    /// `|c^T Q c - t^2|` is within the certified slack.
    pub ambiguous: bool,
}

impl LatticePoint {
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&x| x == 0)
    }
}

/// Integer points of a closed ellipsoid in lexicographic order.
#[derive(Clone, Debug, Default)]
pub struct Enumeration {
    pub points: Vec<LatticePoint>,
}

impl Enumeration {
    /// Points certainly inside.
    pub fn count_inside(&self) -> u64 {
        self.points.iter().filter(|p| !p.ambiguous).count() as u64
    }

    pub fn count_ambiguous(&self) -> u64 {
        self.points.iter().filter(|p| p.ambiguous).count() as u64
    }

    /// Inside or ambiguous.
    pub fn count_inclusive(&self) -> u64 {
        self.points.len() as u64
    }
}

/// Limits for [`enumerate_ellipsoid`].
#[derive(Clone, Debug)]
pub struct EnumConfig {
    pub dim_cap: usize,
    /// Abort with `EnclosureTooLoose` past this many candidate points.
    pub budget: u64,
}

impl Default for EnumConfig {
    fn default() -> Self {
        Self { dim_cap: DIM_CAP, budget: 20_000_000 }
    }
}

/// Enumeration radius: `t^2` plus room for entry errors and rounding over
/// the whole ellipsoid, where `||c||_1^2 <= dim t^2 ||L^-1||_F^2`.
fn enumeration_budget(e: &Ellipsoid, ch: &Cholesky) -> Float {
    let prec = e.prec();
    let n = e.dim();
    let frob: Float = ch.inverse().iter().fold(Float::new(64), |s, x| s + Float::with_val(64, x.square_ref()));
    let l1_sq = Float::with_val(64, &e.t_squared * &frob) * (2 * n as u32) + 1u32;
    let abs_q = e.q.entries().iter().fold(Float::new(64), |m, x| m.max(&Float::with_val(64, &*x.as_abs())));
    let slack = Float::with_val(64, e.q.entry_error() + Float::with_val(64, &abs_q * &ulp(prec)) * (4 * n as u32 + 8)) * &l1_sq;
    let rel = Float::with_val(64, 1) >> (prec as i32 / 2);
    let t2 = Float::with_val(prec, &e.t_squared);
    t2.clone() + slack * 2u32 + Float::with_val(64, &*t2.as_abs() * &rel) + rel
}

/// Fincke-Pohst: coordinates fixed from the last to the first, each range
/// read off `||L^T c||^2 = sum_j (sum_{i>=j} L_ij c_i)^2`.
fn fincke_pohst(ch: &Cholesky, budget: &Float, top: i64, limit: u64, counter: &AtomicU64) -> Result<Vec<Vec<i64>>> {
    let n = ch.dim();
    let prec = budget.prec();
    let mut out = Vec::new();
    let mut c = vec![0i64; n];
    c[n - 1] = top;
    // residual budgets per level
    let lnn = ch.get(n - 1, n - 1);
    let first = Float::with_val(prec, lnn * top);
    let rem_top = Float::with_val(prec, budget - Float::with_val(prec, first.square_ref()));
    if rem_top < 0 {
        return Ok(out);
    }
    let mut stack: Vec<(usize, Float)> = Vec::new();
    fn range(ch: &Cholesky, c: &[i64], j: usize, rem: &Float) -> (i64, i64) {
        let prec = rem.prec();
        let n = ch.dim();
        let mut y = Float::new(prec);
        for i in j + 1..n {
            if c[i] != 0 {
                y += Float::with_val(prec, ch.get(i, j) * c[i]);
            }
        }
        let r = Float::with_val(prec, rem.sqrt_ref());
        let l = ch.get(j, j);
        let lo = Float::with_val(prec, -Float::with_val(prec, &y + &r)) / l;
        let hi = Float::with_val(prec, &r - &y) / l;
        let eps = 1e-9;
        ((lo.to_f64() - eps).ceil() as i64, (hi.to_f64() + eps).floor() as i64)
    }
    if n == 1 {
        counter.fetch_add(1, Ordering::Relaxed);
        out.push(c.clone());
        return Ok(out);
    }
    // iterative depth-first search over levels n-2 .. 0
    let mut bounds: Vec<(i64, i64)> = vec![(0, 0); n];
    let mut level = n - 2;
    stack.push((level, rem_top.clone()));
    bounds[level] = range(ch, &c, level, &rem_top);
    c[level] = bounds[level].0;
    loop {
        let (lv, rem) = stack.last().cloned().expect("non-empty");
        level = lv;
        if c[level] > bounds[level].1 {
            stack.pop();
            if stack.is_empty() {
                break;
            }
            let up = stack.last().expect("non-empty").0;
            c[level] = 0;
            c[up] += 1;
            continue;
        }
        // contribution of this level
        let mut y = Float::new(prec);
        for i in level..n {
            if c[i] != 0 {
                y += Float::with_val(prec, ch.get(i, level) * c[i]);
            }
        }
        let next = Float::with_val(prec, &rem - Float::with_val(prec, y.square_ref()));
        if next < 0 {
            // rounding at the range edge
            c[level] += 1;
            continue;
        }
        if level == 0 {
            if counter.fetch_add(1, Ordering::Relaxed) >= limit {
                return Err(Error::EnclosureTooLoose { budget: limit });
            }
            out.push(c.clone());
            c[0] += 1;
            continue;
        }
        let below = level - 1;
        bounds[below] = range(ch, &c, below, &next);
        c[below] = bounds[below].0;
        stack.push((below, next));
    }
    Ok(out)
}

/// All integer points of the closed ellipsoid, up to certified slack;
/// points within slack of the boundary are flagged `ambiguous`. Output is
/// in lexicographic order of `(c_0, ..., c_d)`.
pub fn enumerate_ellipsoid(e: &Ellipsoid, cfg: &EnumConfig) -> Result<Enumeration> {
    let n = e.dim();
    if n > cfg.dim_cap {
        return Err(Error::DimensionCap { dim: n, cap: cfg.dim_cap });
    }
    let ch = cholesky(&e.q)?;
    let budget = enumeration_budget(e, &ch);
    let prec = e.prec();
    let lnn = ch.get(n - 1, n - 1);
    let r = Float::with_val(prec, budget.sqrt_ref()) / lnn;
    let top = r.to_f64().floor() as i64 + 1;
    let counter = AtomicU64::new(0);
    let raw: Vec<Vec<Vec<i64>>> =
        (-top..=top).into_par_iter().map(|v| fincke_pohst(&ch, &budget, v, cfg.budget, &counter)).collect::<Result<Vec<_>>>()?;
    let mut candidates: Vec<Vec<i64>> = raw.into_iter().flatten().collect();
    candidates.sort();
    let t2 = &e.t_squared;
    let points: Vec<LatticePoint> = candidates
        .into_par_iter()
        .filter_map(|c| {
            let value = e.value(&c);
            let slack = e.value_slack(&c, &value);
            let diff = Float::with_val(prec, &value - t2);
            if diff > slack {
                return None;
            }
            let ambiguous = Float::with_val(64, diff.as_abs().clone()) <= slack;
            Some(LatticePoint { coords: c, value, ambiguous })
        })
        .collect();
    Ok(Enumeration { points })
}

/// Minimum of `c^T Q c` over nonzero integer `c`, with a minimizer.
pub fn min_nonzero(q: &GramMatrix, cfg: &EnumConfig) -> Result<(CertifiedReal, Vec<i64>)> {
    let n = q.dim();
    let prec = q.prec();
    // a unit vector bounds the minimum
    let diag_min = (0..n).map(|i| q.entry(i, i).clone()).fold(Float::with_val(prec, f64::INFINITY), |m, x| m.min(&x));
    let e = Ellipsoid::new(q.clone(), diag_min)?;
    let found = enumerate_ellipsoid(&e, cfg)?;
    let best = found
        .points
        .iter()
        .filter(|p| !p.is_zero())
        .min_by(|a, b| a.value.partial_cmp(&b.value).expect("finite"))
        .ok_or_else(|| Error::Numeric("no nonzero point at the smallest diagonal entry".into()))?;
    let slack = e.value_slack(&best.coords, &best.value);
    Ok((CertifiedReal::new(best.value.clone(), &slack), best.coords.clone()))
}

/// `log vol(B_2^n) = (n/2) log pi - log Gamma(n/2 + 1)`.
pub fn log_ball_volume(n: usize, prec: Prec) -> Float {
    let half = Float::with_val(prec, n) / 2u32;
    let g = Float::with_val(prec, Float::with_val(prec, &half + 1u32).ln_gamma_ref());
    Float::with_val(prec, pi(prec).ln() * &half) - g
}

pub fn ball_volume(n: usize) -> f64 {
    log_ball_volume(n, 128).exp().to_f64()
}

/// `log vol = log vol(B^n) + (n/2) log t^2 - (1/2) log det Q`.
pub fn ellipsoid_log_volume(e: &Ellipsoid) -> Result<CertifiedReal> {
    let prec = e.prec();
    let n = e.dim();
    let ld = log_det(&e.q)?;
    let lt = CertifiedReal::rounded(Float::with_val(prec, e.t_squared.ln_ref())).scale(&(Float::with_val(prec, n) / 2u32));
    let lb = CertifiedReal::rounded(log_ball_volume(n, prec)).widen(&(ulp(prec) * 16u32));
    Ok(lb.add(&lt).sub(&ld.scale(&Float::with_val(prec, 0.5f64))))
}

pub fn ellipsoid_volume(e: &Ellipsoid) -> Result<CertifiedReal> {
    Ok(ellipsoid_log_volume(e)?.exp())
}
