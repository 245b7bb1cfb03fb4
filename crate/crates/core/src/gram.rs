//! Moment (Gram) matrices of the binomial basis, their Cholesky factors,
//! determinants and monic orthogonal-polynomial norms.
//!
//! Series modes sum `sum_n binom(n,j) binom(n,k) A^-2n` (and the negative
//! side `sum_{n>=1} binom(-n,j) binom(-n,k) B^-2n`) in the original
//! coordinates with a certified tail. The same matrices are monomial moment
//! matrices of weighted arc length on the image circles `T_1`, `T_2`, which
//! the closed-form routines here build independently.

use std::fmt;

use rayon::prelude::*;
use rug::{Float, Integer};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::genfunc::{image_circle, CircleSpec, Orientation};
use crate::ivp::{binomial_i64, GrowthSpec, NormMode};
use crate::lattice::c_a;
use crate::real::{decimal_digits, pi, to_decimal, ulp, CertifiedReal, Prec};

/// Which moment matrix a [`GramMatrix`] holds, with its normalization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GramMode {
    /// `sum_{n>=0} binom(n,j) binom(n,k) A^-2n`, equal to
    /// `(A/2pi) int_{T_1} w^j conj(w)^k |dw|`.
    L2Circle,
    /// `L2Circle` plus `sum_{n>=1} binom(-n,j) binom(-n,k) B^-2n`, the
    /// negative side being `(1/(2pi B)) int_{T_2} w^j conj(w)^k |dw|`.
    L2TwoCircles,
    /// Both series weighted by `1/(n+1)`.
    WeightedL2,
    /// `(1/(4 t^2))` times the one- or two-sided `L2` series: the Gram
    /// matrix of the rows `binom(n,k) A^-n / (2t)`.
    SigmaInfinity,
    /// `int_D z^j conj(z)^k dA` over one disk.
    BergmanDisk,
    /// `int_{D_1 cup D_2} z^j conj(z)^k dA`.
    BergmanTwoDisks,
    /// `sum_i w_i int_{T_i} z^j conj(z)^k |dz|` over weighted circles.
    ArcLength,
}

impl GramMode {
    pub fn prefactor(&self) -> &'static str {
        match self {
            GramMode::L2Circle => "A/(2pi) arc length on T1",
            GramMode::L2TwoCircles => "A/(2pi) arc length on T1 + 1/(2pi B) arc length on T2",
            GramMode::WeightedL2 => "series weights A^-2n/(n+1), B^-2n/(n+1)",
            GramMode::SigmaInfinity => "1/(4t^2) times the L2 series",
            GramMode::BergmanDisk | GramMode::BergmanTwoDisks => "area measure",
            GramMode::ArcLength => "explicit circle weights times arc length",
        }
    }
}

/// Symmetric moment matrix with certified per-entry error bounds.
#[derive(Clone, Debug)]
pub struct GramMatrix {
    mode: GramMode,
    dim: usize,
    entries: Vec<Float>,
    entry_tail_bound: Float,
    entry_round_bound: Float,
    truncation: Option<u64>,
    params: Option<GrowthSpec>,
    shift: Option<Float>,
}

impl GramMatrix {
    /// Matrix from explicit row-major entries, which must be symmetric.
    pub fn from_entries(mode: GramMode, dim: usize, entries: Vec<Float>, tail: Float, round: Float) -> Result<Self> {
        if entries.len() != dim * dim || dim == 0 {
            return Err(Error::InvalidSpec(format!("expected {} entries, got {}", dim * dim, entries.len())));
        }
        for i in 0..dim {
            for j in 0..i {
                if entries[i * dim + j] != entries[j * dim + i] {
                    return Err(Error::InvalidSpec(format!("entries ({i},{j}) and ({j},{i}) differ")));
                }
            }
        }
        Ok(Self {
            mode,
            dim,
            entries,
            entry_tail_bound: Float::with_val(64, tail),
            entry_round_bound: Float::with_val(64, round),
            truncation: None,
            params: None,
            shift: None,
        })
    }

    pub fn identity(dim: usize, prec: Prec) -> Self {
        let mut entries = vec![Float::new(prec); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = Float::with_val(prec, 1);
        }
        Self::from_entries(GramMode::ArcLength, dim, entries, Float::new(64), Float::new(64)).expect("square")
    }

    pub fn mode(&self) -> GramMode {
        self.mode
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn prec(&self) -> Prec {
        self.entries[0].prec()
    }

    pub fn entry(&self, i: usize, j: usize) -> &Float {
        &self.entries[i * self.dim + j]
    }

    pub fn entries(&self) -> &[Float] {
        &self.entries
    }

    /// Uniform bound on the series truncation error of each entry.
    pub fn entry_tail_bound(&self) -> &Float {
        &self.entry_tail_bound
    }

    pub fn entry_round_bound(&self) -> &Float {
        &self.entry_round_bound
    }

    /// Truncation plus rounding bound per entry.
    pub fn entry_error(&self) -> Float {
        Float::with_val(64, &self.entry_tail_bound + &self.entry_round_bound)
    }

    pub fn truncation(&self) -> Option<u64> {
        self.truncation
    }

    pub fn params(&self) -> Option<&GrowthSpec> {
        self.params.as_ref()
    }

    /// Origin of the monomial basis for closed-form moment matrices.
    pub fn shift(&self) -> Option<&Float> {
        self.shift.as_ref()
    }

    /// The truncated sum taken as the object itself (a finite-row
    /// `Sigma^T Sigma`), so the series tail no longer counts as error.
    pub fn as_finite_sum(mut self) -> Self {
        self.entry_tail_bound = Float::new(64);
        self
    }

    /// Leading `k x k` block.
    pub fn leading(&self, k: usize) -> Self {
        assert!(k >= 1 && k <= self.dim);
        let mut entries = Vec::with_capacity(k * k);
        for i in 0..k {
            entries.extend(self.entries[i * self.dim..i * self.dim + k].iter().cloned());
        }
        Self { dim: k, entries, ..self.clone() }
    }

    /// Entries multiplied by `s > 0`, error bounds scaled with them.
    pub fn scaled(&self, s: &Float) -> Self {
        let prec = self.prec();
        let entries = self.entries.iter().map(|e| Float::with_val(prec, e * s)).collect();
        let sa = Float::with_val(64, s);
        let u = ulp(prec);
        let max = self.max_abs_entry();
        let extra = Float::with_val(64, &max * &sa) * &u * 2u32;
        Self {
            entries,
            entry_tail_bound: Float::with_val(64, &self.entry_tail_bound * &sa) * 1.000001f64,
            entry_round_bound: Float::with_val(64, &self.entry_round_bound * &sa) * 1.000001f64 + extra,
            ..self.clone()
        }
    }

    /// `self + other` entrywise (same dimension).
    pub fn sum(&self, other: &GramMatrix, mode: GramMode) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::InvalidSpec("dimension mismatch".into()));
        }
        let prec = self.prec().max(other.prec());
        let entries: Vec<Float> = self.entries.iter().zip(&other.entries).map(|(a, b)| Float::with_val(prec, a + b)).collect();
        let max = entries.iter().fold(Float::new(64), |m, e| m.max(&Float::with_val(64, e.as_abs().clone())));
        let round = Float::with_val(64, &self.entry_round_bound + &other.entry_round_bound) + max * ulp(prec);
        let mut out = Self::from_entries(
            mode,
            self.dim,
            entries,
            Float::with_val(64, &self.entry_tail_bound + &other.entry_tail_bound),
            round,
        )?;
        out.shift = self.shift.clone();
        Ok(out)
    }

    fn max_abs_entry(&self) -> Float {
        self.entries.iter().fold(Float::new(64), |m, e| m.max(&Float::with_val(64, &*e.as_abs())))
    }

    fn max_diag(&self) -> Float {
        (0..self.dim).fold(Float::new(64), |m, i| m.max(&Float::with_val(64, &*self.entry(i, i).as_abs())))
    }
}

impl Serialize for GramMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let digits = decimal_digits(self.prec());
        let rows: Vec<Vec<String>> =
            (0..self.dim).map(|i| (0..self.dim).map(|j| to_decimal(self.entry(i, j), digits)).collect()).collect();
        let mut st = s.serialize_struct("GramMatrix", 8)?;
        st.serialize_field("mode", &self.mode)?;
        st.serialize_field("prefactor", self.mode.prefactor())?;
        st.serialize_field("dim", &self.dim.to_string())?;
        st.serialize_field("truncation", &self.truncation.map(|m| m.to_string()))?;
        st.serialize_field("params", &self.params)?;
        st.serialize_field("entry_tail_bound", &to_decimal(&self.entry_tail_bound, 6))?;
        st.serialize_field("entry_round_bound", &to_decimal(&self.entry_round_bound, 6))?;
        st.serialize_field("entries", &rows)?;
        st.end()
    }
}

/// Smallest `M >= max(ceil(C_A d), ceil(e d))` with
/// `(A/(A-1)) exp(2d - M log A) <= eps`; with a negative side,
/// `2 max(A/(A-1), B/(B-1)) exp(4d - M log min(A, B)) <= eps`.
pub fn truncation_index(spec: &GrowthSpec, d: usize, eps: &Float) -> u64 {
    let a = spec.a().to_f64();
    let df = d as f64;
    let le = eps.to_f64().max(f64::MIN_POSITIVE).ln();
    let (base, konst, growth, ca) = match spec.b() {
        None => (a, a / (a - 1.0), 2.0 * df, c_a(spec.a())),
        Some(b) => {
            let bf = b.to_f64();
            let k = 2.0 * (a / (a - 1.0)).max(bf / (bf - 1.0));
            (a.min(bf), k, 4.0 * df, c_a(spec.a()).max(c_a(b)))
        }
    };
    let floor = (ca * df).ceil().max((std::f64::consts::E * df).ceil()).max(1.0);
    let need = ((growth + konst.ln() - le) / base.ln()).ceil();
    floor.max(need) as u64
}

/// Rigorous bound on `sum_{n > m} max_{j,k<=d} |binom(n,j) binom(n,k)| x^n`
/// with `x = base^-2`; `None` while the geometric comparison is not yet valid.
fn positive_tail(base: &Float, d: usize, m: u64) -> Option<Float> {
    let prec = base.prec();
    let n = m + 1;
    if n < 2 * d as u64 || n <= d as u64 {
        return None;
    }
    let x = Float::with_val(prec, base.square_ref()).recip();
    // binom(n,j) <= binom(n,d) for j <= d <= n/2
    let q = Float::with_val(prec, n + 1) / (n + 1 - d as u64);
    let ratio = Float::with_val(prec, q.square_ref()) * &x;
    if ratio >= 1 {
        return None;
    }
    let top = Float::with_val(prec, &binomial_i64(n as i64, d as u32));
    let term = Float::with_val(prec, top.square_ref()) * crate::real::powi(&x, n as i64);
    Some(Float::with_val(64, term / (Float::with_val(prec, 1) - ratio)) * 1.0001f64)
}

/// As [`positive_tail`] for `sum_{n > m} binom(n+d-1, d)^2 y^n`, which
/// dominates `|binom(-n,j) binom(-n,k)|` for `j, k <= d`.
fn negative_tail(base: &Float, d: usize, m: u64) -> Option<Float> {
    let prec = base.prec();
    let n = m + 1;
    let y = Float::with_val(prec, base.square_ref()).recip();
    let q = Float::with_val(prec, n + d as u64) / n;
    let ratio = Float::with_val(prec, q.square_ref()) * &y;
    if ratio >= 1 {
        return None;
    }
    let top = Float::with_val(prec, &binomial_i64((n + d as u64) as i64 - 1, d as u32));
    let term = Float::with_val(prec, top.square_ref()) * crate::real::powi(&y, n as i64);
    Some(Float::with_val(64, term / (Float::with_val(prec, 1) - ratio)) * 1.0001f64)
}

fn series_tail(spec: &GrowthSpec, d: usize, m: u64) -> Option<Float> {
    let mut t = positive_tail(spec.a(), d, m)?;
    if let Some(b) = spec.b() {
        t += negative_tail(b, d, m)?;
    }
    Some(t)
}

/// Truncated series matrix with explicit truncation index `m`: positive side
/// `n = 0..=m`, negative side `n = 1..=m`.
pub fn gram_matrix_truncated(spec: &GrowthSpec, d: usize, m: u64) -> Result<GramMatrix> {
    let prec = spec.prec();
    let dim = d + 1;
    let weighted = spec.mode() == NormMode::L2Weighted;
    // rows: (weight, binomials) per index n
    let mut rows: Vec<(Float, Vec<Float>)> = Vec::new();
    let x = Float::with_val(prec, spec.a().square_ref()).recip();
    let mut w = Float::with_val(prec, 1);
    let mut pascal: Vec<Integer> = vec![Integer::new(); dim];
    pascal[0] = Integer::from(1);
    for n in 0..=m {
        if n > 0 {
            for j in (1..dim).rev() {
                let prev = pascal[j - 1].clone();
                pascal[j] += prev;
            }
        }
        let mut wn = w.clone();
        if weighted {
            wn /= n + 1;
        }
        rows.push((wn, pascal.iter().map(|b| Float::with_val(prec, b)).collect()));
        w *= &x;
    }
    if let Some(b) = spec.b() {
        let y = Float::with_val(prec, b.square_ref()).recip();
        let mut w = y.clone();
        for n in 1..=m {
            let mut wn = w.clone();
            if weighted {
                wn /= n + 1;
            }
            let bins = (0..dim).map(|j| Float::with_val(prec, &binomial_i64(-(n as i64), j as u32))).collect();
            rows.push((wn, bins));
            w *= &y;
        }
    }
    let pairs: Vec<(usize, usize)> = (0..dim).flat_map(|j| (j..dim).map(move |k| (j, k))).collect();
    let vals: Vec<Float> = pairs
        .par_iter()
        .map(|&(j, k)| {
            let mut s = Float::new(prec);
            for (wn, b) in &rows {
                s += Float::with_val(prec, &b[j] * &b[k]) * wn;
            }
            s
        })
        .collect();
    let mut entries = vec![Float::new(prec); dim * dim];
    for ((j, k), v) in pairs.into_iter().zip(vals) {
        entries[j * dim + k] = v.clone();
        entries[k * dim + j] = v;
    }
    let tail = series_tail(spec, d, m).unwrap_or_else(|| Float::with_val(64, f64::INFINITY));
    let mut g = GramMatrix::from_entries(GramMode::L2Circle, dim, entries, tail, Float::new(64))?;
    // |sum of terms| <= sqrt(G_jj G_kk) <= max diag; (terms + 3) roundings each
    g.entry_round_bound = Float::with_val(64, g.max_diag() * ulp(prec)) * (2 * rows.len() as u64 + 8);
    g.mode = match (spec.mode(), spec.is_two_sided()) {
        (NormMode::L2Weighted, _) => GramMode::WeightedL2,
        (NormMode::L2, false) => GramMode::L2Circle,
        (NormMode::L2, true) => GramMode::L2TwoCircles,
        (NormMode::LInf, _) => GramMode::L2TwoCircles,
    };
    g.truncation = Some(m);
    g.params = Some(spec.clone());
    if spec.mode() == NormMode::LInf {
        let t = spec.t();
        let s = Float::with_val(prec, Float::with_val(prec, t.square_ref()) * 4u32).recip();
        g = g.scaled(&s);
        g.mode = GramMode::SigmaInfinity;
    }
    Ok(g)
}

/// Series Gram matrix for `spec` with every entry within `eps` of the full
/// series. `LInf` specs give the [`GramMode::SigmaInfinity`] normalization
/// with `t = spec.t()`.
pub fn gram_matrix(spec: &GrowthSpec, d: usize, eps: &Float) -> Result<GramMatrix> {
    let mut m = truncation_index(spec, d, eps);
    // the returned index is a heuristic start; certify with the exact tail
    loop {
        if let Some(t) = series_tail(spec, d, m) {
            let scale = match spec.mode() {
                NormMode::LInf => {
                    let t2 = Float::with_val(64, spec.t().square_ref()) * 4u32;
                    Float::with_val(64, &t / &t2)
                }
                _ => t,
            };
            if scale <= *eps {
                break;
            }
        }
        m *= 2;
        if m > 1 << 22 {
            return Err(Error::Numeric("series truncation does not converge".into()));
        }
    }
    gram_matrix_truncated(spec, d, m)
}

/// `int_{T(a, rho)} (z - s)^j conj(z - s)^k |dz|` for real `a`, shifted origin `s`:
/// `2 pi rho sum_m binom(j,m) binom(k,m) (a-s)^(j+k-2m) rho^(2m)`.
fn circle_moments(center: &Float, radius: &Float, shift: &Float, d: usize, prec: Prec) -> (Vec<Float>, Vec<Float>) {
    let a = Float::with_val(prec, center - shift);
    moments_generic(&a, radius, d, prec, |m, rho2m| {
        let two_pi_rho = Float::with_val(prec, pi(prec) * radius) * 2u32;
        let _ = m;
        Float::with_val(prec, rho2m * &two_pi_rho)
    })
}

/// `int_{D(a, rho)} (z - s)^j conj(z - s)^k dA`:
/// `sum_m binom(j,m) binom(k,m) (a-s)^(j+k-2m) pi rho^(2m+2) / (m+1)`.
fn disk_moments(center: &Float, radius: &Float, shift: &Float, d: usize, prec: Prec) -> (Vec<Float>, Vec<Float>) {
    let a = Float::with_val(prec, center - shift);
    let pr2 = Float::with_val(prec, pi(prec) * Float::with_val(prec, radius.square_ref()));
    moments_generic(&a, radius, d, prec, |m, rho2m| Float::with_val(prec, rho2m * &pr2) / (m as u32 + 1))
}

/// Shared binomial expansion; `radial(m, rho^2m)` supplies the radial
/// moment. Returns entries and the sums of absolute values of the terms.
fn moments_generic<F>(a: &Float, radius: &Float, d: usize, prec: Prec, radial: F) -> (Vec<Float>, Vec<Float>)
where
    F: Fn(usize, &Float) -> Float + Sync,
{
    let dim = d + 1;
    let a_pow: Vec<Float> = (0..=2 * d).map(|e| crate::real::powi(a, e as i64)).collect();
    let r2 = Float::with_val(prec, radius.square_ref());
    let rad: Vec<Float> = (0..=d).map(|m| radial(m, &crate::real::powi(&r2, m as i64))).collect();
    let bin: Vec<Vec<Float>> =
        (0..=d).map(|j| (0..=j).map(|m| Float::with_val(prec, &binomial_i64(j as i64, m as u32))).collect()).collect();
    let pairs: Vec<(usize, usize)> = (0..dim).flat_map(|j| (j..dim).map(move |k| (j, k))).collect();
    let vals: Vec<(Float, Float)> = pairs
        .par_iter()
        .map(|&(j, k)| {
            let mut s = Float::new(prec);
            let mut abs = Float::new(prec);
            for m in 0..=j.min(k) {
                let t = Float::with_val(prec, &bin[j][m] * &bin[k][m]) * &a_pow[j + k - 2 * m] * &rad[m];
                abs += Float::with_val(prec, &*t.as_abs());
                s += t;
            }
            (s, abs)
        })
        .collect();
    let mut entries = vec![Float::new(prec); dim * dim];
    let mut abs = vec![Float::new(prec); dim * dim];
    for ((j, k), (v, a)) in pairs.into_iter().zip(vals) {
        entries[j * dim + k] = v.clone();
        entries[k * dim + j] = v;
        abs[j * dim + k] = a.clone();
        abs[k * dim + j] = a;
    }
    (entries, abs)
}

fn assemble(
    mode: GramMode,
    parts: Vec<(Vec<Float>, Vec<Float>, Float)>,
    d: usize,
    prec: Prec,
    shift: &Float,
) -> Result<GramMatrix> {
    let dim = d + 1;
    let mut entries = vec![Float::new(prec); dim * dim];
    let mut abs = Float::new(64);
    for (e, a, w) in parts {
        for i in 0..dim * dim {
            entries[i] += Float::with_val(prec, &e[i] * &w);
            abs = abs.max(&Float::with_val(64, &a[i] * &w));
        }
    }
    // each term carries at most ~8 roundings, d + 2 terms per entry
    let round = abs * ulp(prec) * (8 * (d as u64 + 4));
    let mut g = GramMatrix::from_entries(mode, dim, entries, Float::new(64), round)?;
    g.shift = Some(shift.clone());
    Ok(g)
}

/// `sum_i w_i int_{C_i} (z-s)^j conj(z-s)^k |dz|` over circles with real
/// centers, in the monomial basis about `s`.
pub fn arc_length_gram(circles: &[(CircleSpec, Float)], d: usize, shift: &Float) -> Result<GramMatrix> {
    let prec = shift.prec();
    let mut parts = Vec::new();
    for (c, w) in circles {
        if !c.center.im.is_zero() {
            return Err(Error::InvalidSpec("closed-form moments need real centers".into()));
        }
        let (e, a) = circle_moments(&c.center.re, &c.radius, shift, d, prec);
        parts.push((e, a, w.clone()));
    }
    assemble(GramMode::ArcLength, parts, d, prec, shift)
}

/// The `L2Circle` / `L2TwoCircles` matrix of `spec` rebuilt from the image
/// circles: weights `A/(2 pi)` on `T_1`, `1/(2 pi B)` on `T_2`.
pub fn xi_closed_form(spec: &GrowthSpec, d: usize) -> Result<GramMatrix> {
    let prec = spec.prec();
    let two_pi = Float::with_val(prec, pi(prec) * 2u32);
    let mut circles = vec![(image_circle(Orientation::PositiveSide, spec.a())?, Float::with_val(prec, spec.a() / &two_pi))];
    if let Some(b) = spec.b() {
        let w = Float::with_val(prec, Float::with_val(prec, b * &two_pi).recip_ref());
        circles.push((image_circle(Orientation::NegativeSide, b)?, w));
    }
    let mut g = arc_length_gram(&circles, d, &Float::new(prec))?;
    g.mode = if spec.is_two_sided() { GramMode::L2TwoCircles } else { GramMode::L2Circle };
    g.params = Some(spec.clone());
    Ok(g)
}

/// Area moments of a single disk about `shift`.
pub fn bergman_gram_disk(disk: &CircleSpec, d: usize, shift: &Float) -> Result<GramMatrix> {
    if !disk.center.im.is_zero() {
        return Err(Error::InvalidSpec("closed-form moments need real centers".into()));
    }
    let prec = shift.prec();
    let (e, a) = disk_moments(&disk.center.re, &disk.radius, shift, d, prec);
    assemble(GramMode::BergmanDisk, vec![(e, a, Float::with_val(prec, 1))], d, prec, shift)
}

/// Area moments of two disjoint disks with real centers, about `shift`.
pub fn bergman_gram_two_disks_about(d1: &CircleSpec, d2: &CircleSpec, d: usize, shift: &Float) -> Result<GramMatrix> {
    let prec = shift.prec();
    let dist = Float::with_val(prec, &d1.center.re - &d2.center.re).abs();
    let radii = Float::with_val(prec, &d1.radius + &d2.radius);
    if dist <= radii || !d1.center.im.is_zero() || !d2.center.im.is_zero() {
        return Err(Error::DisksOverlap { distance: format!("{:.6e}", dist.to_f64()), radii: format!("{:.6e}", radii.to_f64()) });
    }
    let (e1, a1) = disk_moments(&d1.center.re, &d1.radius, shift, d, prec);
    let (e2, a2) = disk_moments(&d2.center.re, &d2.radius, shift, d, prec);
    let one = Float::with_val(prec, 1);
    assemble(GramMode::BergmanTwoDisks, vec![(e1, a1, one.clone()), (e2, a2, one)], d, prec, shift)
}

/// Area moments `int_{D_1 cup D_2} z^j conj(z)^k dA` about the origin.
pub fn bergman_gram_two_disks(d1: &CircleSpec, d2: &CircleSpec, d: usize) -> Result<GramMatrix> {
    bergman_gram_two_disks_about(d1, d2, d, &Float::new(d1.prec()))
}

/// Lower-triangular `L` with `L L^T = G`.
#[derive(Clone, Debug)]
pub struct Cholesky {
    dim: usize,
    l: Vec<Float>,
    /// Entrywise perturbation covered by the error bounds derived from
    /// this factor: input errors plus the factorization's backward error.
    delta: Float,
}

impl Cholesky {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &Float {
        &self.l[i * self.dim + j]
    }

    pub fn diag(&self) -> Vec<Float> {
        (0..self.dim).map(|i| self.get(i, i).clone()).collect()
    }

    pub fn delta(&self) -> &Float {
        &self.delta
    }

    /// `L^{-1}` by forward substitution.
    pub fn inverse(&self) -> Vec<Float> {
        let n = self.dim;
        let prec = self.l[0].prec();
        let mut inv = vec![Float::new(prec); n * n];
        for col in 0..n {
            for i in col..n {
                let mut s = Float::with_val(prec, if i == col { 1 } else { 0 });
                for k in col..i {
                    s -= Float::with_val(prec, self.get(i, k) * &inv[k * n + col]);
                }
                inv[i * n + col] = s / self.get(i, i);
            }
        }
        inv
    }

    /// Bounds on `|log det G_k - log det G~_k|` for every leading block,
    /// `G~` being any matrix within `delta` entrywise of `G`:
    /// `(k+1) x / (1 - x)` with `x = (k+1) delta ||L_k^{-1}||_F^2`.
    pub fn log_det_errors(&self) -> Vec<Float> {
        let inv = self.inverse();
        let n = self.dim;
        let mut frob = Float::new(64);
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            for j in 0..=k {
                frob += Float::with_val(64, inv[k * n + j].square_ref());
            }
            let size = (k + 1) as u32;
            let x = Float::with_val(64, &frob * &self.delta) * size * 1.001f64;
            let err = if x < 0.5 {
                Float::with_val(64, &x * size) / (Float::with_val(64, 1) - &x)
            } else {
                Float::with_val(64, f64::INFINITY)
            };
            out.push(err);
        }
        out
    }
}

fn cholesky_raw(
    entries: &[Float],
    dim: usize,
    shift: Option<&Float>,
    guard: &Float,
) -> std::result::Result<Vec<Float>, (usize, Float)> {
    let prec = entries[0].prec();
    let mut l = vec![Float::new(prec); dim * dim];
    for j in 0..dim {
        let mut p = entries[j * dim + j].clone();
        if let Some(s) = shift {
            p -= s;
        }
        for k in 0..j {
            p -= Float::with_val(prec, l[j * dim + k].square_ref());
        }
        if p <= *guard || p.is_nan() {
            return Err((j, p));
        }
        let ljj = p.sqrt();
        for i in j + 1..dim {
            let mut s = entries[i * dim + j].clone();
            for k in 0..j {
                s -= Float::with_val(prec, &l[i * dim + k] * &l[j * dim + k]);
            }
            l[i * dim + j] = s / &ljj;
        }
        l[j * dim + j] = ljj;
    }
    Ok(l)
}

/// Cholesky factorization refusing any pivot `<= 8 x` the per-entry error
/// bound, where truncation or rounding could have produced it.
pub fn cholesky(g: &GramMatrix) -> Result<Cholesky> {
    let guard = Float::with_val(64, g.entry_error() * 8u32);
    let guard_hp = Float::with_val(g.prec(), &guard);
    let l = cholesky_raw(&g.entries, g.dim, None, &guard_hp).map_err(|(index, pivot)| Error::NotPositiveDefinite {
        index,
        pivot: format!("{:.6e}", pivot.to_f64()),
        guard: format!("{:.6e}", guard.to_f64()),
    })?;
    // backward error of the factorization: |dG_ij| <= (n+2) u sqrt(G_ii G_jj)
    let backward = Float::with_val(64, g.max_diag() * ulp(g.prec())) * (2 * g.dim as u64 + 4);
    let delta = Float::with_val(64, g.entry_error() + backward);
    Ok(Cholesky { dim: g.dim, l, delta })
}

/// `log det G = 2 sum log L_kk` with a first-order perturbation bound.
pub fn log_det(g: &GramMatrix) -> Result<CertifiedReal> {
    let ch = cholesky(g)?;
    log_det_from(&ch)
}

pub fn log_det_from(ch: &Cholesky) -> Result<CertifiedReal> {
    let prec = ch.l[0].prec();
    let mut s = Float::new(prec);
    for i in 0..ch.dim {
        s += Float::with_val(prec, ch.get(i, i).ln_ref());
    }
    s *= 2u32;
    let err = ch.log_det_errors().pop().expect("non-empty");
    let round = Float::with_val(64, &*s.as_abs() * &ulp(prec)) * (4 * ch.dim as u64 + 4) + ulp(prec) * (4 * ch.dim as u64);
    Ok(CertifiedReal::new(s, &(err + round)))
}

/// Orthogonality measure behind a set of OP norms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OpKind {
    Szego,
    Bergman,
}

/// Norms `||q_k||` of the monic orthogonal polynomials, `k = 0..=d`.
#[derive(Clone, Debug, Serialize)]
pub struct OpNorms {
    pub kind: OpKind,
    pub norms: Vec<CertifiedReal>,
}

impl OpNorms {
    pub fn values_f64(&self) -> Vec<f64> {
        self.norms.iter().map(|n| n.to_f64()).collect()
    }
}

/// The `k`-th norm is the `k`-th diagonal entry of the Cholesky factor,
/// since `||q_k||^2 = D_k / D_{k-1}` with `D_k` the leading minors.
pub fn op_norms(g: &GramMatrix) -> Result<OpNorms> {
    let ch = cholesky(g)?;
    Ok(op_norms_from(&ch, g.mode()))
}

pub fn op_norms_from(ch: &Cholesky, mode: GramMode) -> OpNorms {
    let errs = ch.log_det_errors();
    let kind = match mode {
        GramMode::BergmanDisk | GramMode::BergmanTwoDisks | GramMode::WeightedL2 => OpKind::Bergman,
        _ => OpKind::Szego,
    };
    let norms = (0..ch.dim)
        .map(|k| {
            let v = ch.get(k, k).clone();
            // |d log beta_k| <= (err_k + err_{k-1}) / 2, and |dx| <= x (e^h - 1)
            let mut h = errs[k].clone();
            if k > 0 {
                h += &errs[k - 1];
            }
            h /= 2u32;
            let rel = Float::with_val(64, h.exp_m1_ref()) + ulp(v.prec()) * (4 * ch.dim as u32);
            let e = Float::with_val(64, &v * &rel);
            CertifiedReal::new(v, &e)
        })
        .collect();
    OpNorms { kind, norms }
}

/// Smallest eigenvalue by bisection on the success of shifted Cholesky
/// factorizations, to relative accuracy `rel_tol`. The enclosure adds the
/// spectral-norm effect `n * delta` of the entry errors.
pub fn min_eigenvalue(g: &GramMatrix, rel_tol: f64) -> Result<CertifiedReal> {
    let prec = g.prec();
    let zero = Float::new(prec);
    let n = g.dim;
    let succeeds = |lam: &Float| cholesky_raw(&g.entries, n, Some(lam), &zero).is_ok();
    if !succeeds(&zero) {
        return Err(Error::NotPositiveDefinite { index: 0, pivot: "n/a".into(), guard: "0".into() });
    }
    // Gershgorin-free start: the smallest diagonal entry bounds lambda_min above
    let mut hi = (0..n).map(|i| g.entry(i, i).clone()).fold(Float::with_val(prec, f64::INFINITY), |m, x| m.min(&x));
    hi *= 1.000001f64;
    let mut lo = Float::with_val(prec, &hi / 2u32);
    let mut halvings = 0;
    while !succeeds(&lo) {
        hi = lo.clone();
        lo /= 2u32;
        halvings += 1;
        if halvings > 4 * prec {
            return Err(Error::Numeric("eigenvalue below working precision".into()));
        }
    }
    // geometric bisection
    while Float::with_val(prec, &hi / &lo) > 1.0 + rel_tol {
        let mid = Float::with_val(prec, &lo * &hi).sqrt();
        if succeeds(&mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let value = Float::with_val(prec, &lo + &hi) / 2u32;
    let half = Float::with_val(64, Float::with_val(prec, &hi - &lo) / 2u32);
    let backward = Float::with_val(64, g.max_diag() * ulp(prec)) * (2 * n as u64 + 4);
    let err = half + Float::with_val(64, g.entry_error() + backward) * n as u32;
    Ok(CertifiedReal::new(value, &err))
}

impl fmt::Display for GramMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim).map(|j| format!("{:.6e}", self.entry(i, j).to_f64())).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}
