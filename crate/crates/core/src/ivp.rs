//! Integer-valued polynomials in the binomial basis.
//!
//! A polynomial `P_c(x) = sum_k c_k binom(x, k)` is integer-valued exactly
//! when every `c_k` is an integer, and `c_k` is the k-th forward difference
//! of `P` at 0. That identity drives evaluation on consecutive integers: the
//! difference table is advanced with additions only.

use std::fmt;

use rug::{Float, Integer, Rational};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::lattice::c_a;
use crate::real::{decimal_digits, to_decimal, ulp, CertifiedReal, Prec};

/// Binomial coefficient with an arbitrary integer upper argument,
/// `n (n-1) ... (n-k+1) / k!`.
pub fn binomial(n: &Integer, k: u32) -> Integer {
    // mpz_bin_ui handles negative n via binom(-n, k) = (-1)^k binom(n+k-1, k).
    Integer::from(n.binomial_ref(k))
}

pub fn binomial_i64(n: i64, k: u32) -> Integer {
    binomial(&Integer::from(n), k)
}

/// Coefficient vector `(c_0, ..., c_d)` of `P_c` in the binomial basis, kept
/// canonical: no trailing zeros except for the zero polynomial `(0)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IvpCoeffs {
    coeffs: Vec<Integer>,
}

impl IvpCoeffs {
    pub fn new(mut coeffs: Vec<Integer>) -> Self {
        while coeffs.len() > 1 && coeffs.last().map_or(false, |c| *c == 0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Integer::new());
        }
        Self { coeffs }
    }

    pub fn from_i64(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| Integer::from(x)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![Integer::new()] }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Integer] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == 0
    }

    /// `sum_k |c_k|`
    pub fn l1_norm(&self) -> Integer {
        self.coeffs.iter().map(|c| Integer::from(c.abs_ref())).sum()
    }

    pub fn eval(&self, n: i64) -> Integer {
        self.eval_big(&Integer::from(n))
    }

    /// `sum_k c_k binom(n, k)` with the binomials built incrementally.
    pub fn eval_big(&self, n: &Integer) -> Integer {
        let mut acc = Integer::new();
        let mut b = Integer::from(1);
        for (k, c) in self.coeffs.iter().enumerate() {
            if k > 0 {
                b *= Integer::from(n - (k as i64 - 1));
                b /= k as u32;
            }
            acc += c * &b;
        }
        acc
    }

    /// Values `P(0), P(1), P(2), ...`
    pub fn values_forward(&self) -> ValueIter {
        ValueIter { diffs: self.coeffs.clone(), backward: false, started: false }
    }

    /// Values `P(-1), P(-2), P(-3), ...`
    pub fn values_backward(&self) -> ValueIter {
        ValueIter { diffs: self.coeffs.clone(), backward: true, started: false }
    }

    /// Monomial coefficients `q_0, ..., q_d` with `sum q_j x^j == P_c(x)`.
    pub fn to_monomial(&self) -> Vec<Rational> {
        let d = self.degree();
        let mut out = vec![Rational::new(); d + 1];
        // falling[j] holds the monomial coefficients of x (x-1) ... (x-k+1)
        let mut falling: Vec<Integer> = vec![Integer::from(1)];
        let mut fact = Integer::from(1);
        for (k, c) in self.coeffs.iter().enumerate() {
            if k > 0 {
                let mut next = vec![Integer::new(); k + 1];
                for (j, f) in falling.iter().enumerate() {
                    next[j + 1] += f;
                    next[j] -= Integer::from(f * (k as i64 - 1));
                }
                falling = next;
                fact *= k as u32;
            }
            if *c != 0 {
                for (j, f) in falling.iter().enumerate() {
                    out[j] += Rational::from((Integer::from(c * f), fact.clone()));
                }
            }
        }
        out
    }

    /// Inverse of [`to_monomial`](Self::to_monomial). Fails when the
    /// polynomial does not map the integers to the integers.
    pub fn from_monomial(q: &[Rational]) -> Result<Self> {
        if q.is_empty() {
            return Ok(Self::zero());
        }
        let d = q.len() - 1;
        let eval = |x: i64| -> Rational {
            let mut acc = Rational::new();
            for c in q.iter().rev() {
                acc *= x;
                acc += c;
            }
            acc
        };
        let mut table: Vec<Rational> = (0..=d as i64).map(eval).collect();
        let mut coeffs = Vec::with_capacity(d + 1);
        for k in 0..=d {
            let c = table[0].clone();
            if *c.denom() != 1 {
                return Err(Error::NotIntegerValued(format!("coefficient {k} is {c}")));
            }
            coeffs.push(c.numer().clone());
            for i in 0..table.len() - 1 {
                table[i] = Rational::from(&table[i + 1] - &table[i]);
            }
            table.pop();
        }
        Ok(Self::new(coeffs))
    }
}

impl fmt::Display for IvpCoeffs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

#[derive(Serialize, Deserialize)]
struct IvpWire {
    degree: String,
    coeffs: Vec<String>,
}

impl Serialize for IvpCoeffs {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        IvpWire { degree: self.degree().to_string(), coeffs: self.coeffs.iter().map(|c| c.to_string()).collect() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IvpCoeffs {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = IvpWire::deserialize(d)?;
        let degree: usize = w.degree.parse().map_err(|e| D::Error::custom(format!("degree {:?}: {e}", w.degree)))?;
        if w.coeffs.len() != degree + 1 {
            return Err(D::Error::custom("coeffs length must equal degree + 1"));
        }
        let coeffs = w
            .coeffs
            .iter()
            .map(|s| s.parse::<Integer>().map_err(|e| D::Error::custom(format!("{s:?}: {e}"))))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let p = IvpCoeffs::new(coeffs);
        if p.degree() != degree && !p.is_zero() {
            return Err(D::Error::custom("leading coefficient must be non-zero"));
        }
        Ok(p)
    }
}

/// Successive values of a polynomial on consecutive integers, advanced
/// through its forward-difference table.
pub struct ValueIter {
    diffs: Vec<Integer>,
    backward: bool,
    started: bool,
}

impl Iterator for ValueIter {
    type Item = Integer;

    fn next(&mut self) -> Option<Integer> {
        let d = self.diffs.len();
        if self.backward {
            // D_k(n-1) = D_k(n) - D_{k+1}(n-1), top-down.
            for k in (0..d.saturating_sub(1)).rev() {
                let (lo, hi) = self.diffs.split_at_mut(k + 1);
                lo[k] -= &hi[0];
            }
            return Some(self.diffs[0].clone());
        }
        if self.started {
            for k in 0..d.saturating_sub(1) {
                let (lo, hi) = self.diffs.split_at_mut(k + 1);
                lo[k] += &hi[0];
            }
        }
        self.started = true;
        Some(self.diffs[0].clone())
    }
}

/// Which norm a growth constraint uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormMode {
    /// `sup_n |P(n)| A^-n`
    LInf,
    /// `sum_n |P(n)|^2 A^-2n`
    L2,
    /// `sum_n |P(n)|^2 A^-2n / (n + 1)`
    L2Weighted,
}

/// Positive side: `n = 0, 1, ...` with base A. Negative side:
/// `P(-n)` for `n = 1, 2, ...` with base B.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Positive,
    Negative,
}

/// Growth constraint: bases, norm and threshold.
#[derive(Clone, Debug)]
pub struct GrowthSpec {
    a: Float,
    b: Option<Float>,
    mode: NormMode,
    t: Float,
}

impl GrowthSpec {
    pub fn new(a: Float, b: Option<Float>, mode: NormMode, t: Float) -> Result<Self> {
        if !(a > 1) {
            return Err(Error::InvalidSpec(format!("A = {} must exceed 1", a.to_f64())));
        }
        if let Some(b) = &b {
            if !(*b > 1) {
                return Err(Error::InvalidSpec(format!("B = {} must exceed 1", b.to_f64())));
            }
        }
        if !(t > 0) {
            return Err(Error::InvalidSpec(format!("t = {} must be positive", t.to_f64())));
        }
        Ok(Self { a, b, mode, t })
    }

    pub fn one_sided(a: Float, mode: NormMode, t: Float) -> Result<Self> {
        Self::new(a, None, mode, t)
    }

    pub fn two_sided(a: Float, b: Float, mode: NormMode, t: Float) -> Result<Self> {
        Self::new(a, Some(b), mode, t)
    }

    pub fn a(&self) -> &Float {
        &self.a
    }

    pub fn b(&self) -> Option<&Float> {
        self.b.as_ref()
    }

    pub fn mode(&self) -> NormMode {
        self.mode
    }

    pub fn t(&self) -> &Float {
        &self.t
    }

    pub fn prec(&self) -> Prec {
        self.a.prec()
    }

    pub fn is_two_sided(&self) -> bool {
        self.b.is_some()
    }

    pub fn with_mode(&self, mode: NormMode) -> Self {
        Self { mode, ..self.clone() }
    }

    pub fn with_t(&self, t: Float) -> Result<Self> {
        Self::new(self.a.clone(), self.b.clone(), self.mode, t)
    }

    /// Same constraint with every parameter re-rounded to `prec` bits.
    pub fn with_prec(&self, prec: Prec) -> Self {
        Self {
            a: Float::with_val(prec, &self.a),
            b: self.b.as_ref().map(|b| Float::with_val(prec, b)),
            mode: self.mode,
            t: Float::with_val(prec, &self.t),
        }
    }

    /// The base used on `side`.
    pub fn base(&self, side: Side) -> Result<&Float> {
        match side {
            Side::Positive => Ok(&self.a),
            Side::Negative => self.b.as_ref().ok_or_else(|| Error::InvalidSpec("negative side requires base B".into())),
        }
    }
}

impl Serialize for GrowthSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let digits = decimal_digits(self.prec());
        let mut st = s.serialize_struct("GrowthSpec", 4)?;
        st.serialize_field("a", &to_decimal(&self.a, digits))?;
        st.serialize_field("b", &self.b.as_ref().map(|b| to_decimal(b, digits)))?;
        st.serialize_field("mode", &self.mode)?;
        st.serialize_field("t", &to_decimal(&self.t, digits))?;
        st.end()
    }
}

/// Index range `0..=N` on which the supremum of `|Q(n)| base^-n` is attained
/// for every polynomial `Q` of degree `d`.
///
/// Lagrange interpolation through `0..=d` gives, for `n > d`,
/// `|Q(n)| base^-n <= s F(n)` with `s = max_{j<=d} |Q(j)| base^-j` and
/// `F(n) = base^-n (d+1) binom(n, d+1) sum_j binom(d, j) base^j / (n - j)`.
/// `F` decreases once `n + 1 < base (n - d)`, so the first `N` past that
/// point with `F(n) < 1` for all larger `n` works. The result is never
/// below `ceil(C_A d)`.
pub fn sup_check_range(base: &Float, d: usize) -> u64 {
    let a = base.to_f64();
    let la = a.ln();
    let linear = (c_a(base) * d as f64).ceil() as u64;
    if d == 0 {
        return linear;
    }
    let df = d as f64;
    let ln_binom = |n: u64, k: u64| -> f64 { (0..k).map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln()).sum() };
    let log_f = |n: u64| -> f64 {
        let s: f64 = (0..=d as u64).map(|j| (ln_binom(d as u64, j) + j as f64 * la - ((n - j) as f64).ln()).exp()).sum();
        -(n as f64) * la + (df + 1.0).ln() + ln_binom(n, d as u64 + 1) + s.ln()
    };
    let decreasing_from = ((a * df + 1.0) / (a - 1.0)).floor() as u64 + 1;
    let mut last_bad = d as u64;
    let mut n = d as u64 + 1;
    // margin absorbs f64 rounding in log_f
    loop {
        let bad = log_f(n) > -1e-9;
        if bad {
            last_bad = n;
        } else if n >= decreasing_from {
            break;
        }
        n += 1;
    }
    last_bad.max(linear).max(d as u64)
}

/// Relative error bookkeeping for a sum of `terms` non-negative products,
/// each carrying at most `ops` roundings.
fn sum_round_error(sum: &Float, terms: u64, ops: u64) -> Float {
    let u = ulp(sum.prec());
    let k = Float::with_val(64, (terms + 2) * (ops + 2));
    Float::with_val(64, &*sum.as_abs() * &u) * k
}

/// Certified value of the growth functional of `p` on one side.
///
/// - `LInf`: `sup_n |P(+-n)| base^-n`, exact maximum over
///   [`sup_check_range`].
/// - `L2` / `L2Weighted`: the infinite series, truncated once a geometric
///   tail bound drops below `tol`.
pub fn growth_functional_tol(p: &IvpCoeffs, spec: &GrowthSpec, side: Side, tol: &Float) -> Result<CertifiedReal> {
    let base = spec.base(side)?;
    let prec = spec.prec();
    if p.is_zero() {
        return Ok(CertifiedReal::zero(prec));
    }
    match spec.mode() {
        NormMode::LInf => Ok(linf_sup(p, base, side, prec)),
        NormMode::L2 => l2_series(p, base, side, false, tol, prec),
        NormMode::L2Weighted => l2_series(p, base, side, true, tol, prec),
    }
}

/// [`growth_functional_tol`] with tolerance `2^-(prec - 16)`.
pub fn growth_functional(p: &IvpCoeffs, spec: &GrowthSpec, side: Side) -> Result<CertifiedReal> {
    let prec = spec.prec();
    let tol = Float::with_val(prec, 1) >> (prec as i32 - 16);
    growth_functional_tol(p, spec, side, &tol)
}

fn linf_sup(p: &IvpCoeffs, base: &Float, side: Side, prec: Prec) -> CertifiedReal {
    let d = p.degree();
    let range = sup_check_range(base, d);
    let inv = Float::with_val(prec, base.recip_ref());
    let mut best = Float::new(prec);
    let mut w = Float::with_val(prec, 1);
    let (values, count): (ValueIter, u64) = match side {
        Side::Positive => (p.values_forward(), range + 1),
        // P(-m) with m = n + 1 where Q(n) = P(-n-1)
        Side::Negative => {
            w = inv.clone();
            (p.values_backward(), range + 1)
        }
    };
    for v in values.take(count as usize) {
        let x = Float::with_val(prec, &Integer::from(v.abs_ref())) * &w;
        if x > best {
            best = x;
        }
        w *= &inv;
    }
    let err = sum_round_error(&best, count, 2);
    CertifiedReal::new(best, &err)
}

/// Upper bound for the tail `sum_{n > last} |P(+-n)|^2 base^-2n` via
/// `|P(n)| <= ||c||_1 binom(n, d)` (n >= 2d) on the positive side and
/// `|P(-n)| <= ||c||_1 binom(n+d-1, d)` on the negative side.
fn l2_tail_bound(l1: &Float, d: usize, base: &Float, side: Side, last: u64) -> Option<Float> {
    let prec = base.prec();
    let n = last + 1;
    let (num, den) = match side {
        Side::Positive => {
            if n < 2 * d as u64 || n <= d as u64 {
                return None;
            }
            (n + 1, n + 1 - d as u64)
        }
        Side::Negative => (n + d as u64, n),
    };
    // ratio of consecutive upper-bound terms at n, decreasing in n
    let q = Float::with_val(prec, num) / den;
    let ratio = Float::with_val(prec, q.square_ref()) / Float::with_val(prec, base.square_ref());
    if ratio >= 1 {
        return None;
    }
    let top = match side {
        Side::Positive => binomial_i64(n as i64, d as u32),
        Side::Negative => binomial_i64((n + d as u64) as i64 - 1, d as u32),
    };
    let top = Float::with_val(prec, &top) * l1;
    let term = Float::with_val(prec, top.square_ref()) / Float::with_val(prec, crate::real::powi(base, 2 * n as i64));
    let one_minus = Float::with_val(prec, 1) - ratio;
    Some(term / one_minus * 1.0001)
}

fn l2_series(p: &IvpCoeffs, base: &Float, side: Side, weighted: bool, tol: &Float, prec: Prec) -> Result<CertifiedReal> {
    let d = p.degree();
    let l1 = Float::with_val(prec, &p.l1_norm());
    let mut last: u64 = (2 * d as u64 + 1).max(16);
    let tail = loop {
        if let Some(t) = l2_tail_bound(&l1, d, base, side, last) {
            if t <= *tol {
                break t;
            }
        }
        last *= 2;
        if last > 1 << 26 {
            return Err(Error::Numeric("series tail bound does not converge".into()));
        }
    };
    let inv2 = Float::with_val(prec, base.square_ref()).recip();
    let mut sum = Float::new(prec);
    let (values, offset) = match side {
        Side::Positive => (p.values_forward(), 0u64),
        Side::Negative => (p.values_backward(), 1u64),
    };
    let mut w = Float::with_val(prec, 1);
    if offset == 1 {
        w *= &inv2;
    }
    let count = last + 1 - offset;
    for (i, v) in values.take(count as usize).enumerate() {
        let n = i as u64 + offset;
        let x = Float::with_val(prec, &Integer::from(v.square_ref()));
        let mut term = x * &w;
        if weighted {
            term /= n + 1;
        }
        sum += term;
        w *= &inv2;
    }
    let err = Float::with_val(64, &tail) + sum_round_error(&sum, count, count.min(64) + 4);
    Ok(CertifiedReal::new(sum, &err))
}

/// Outcome of checking a polynomial against a growth constraint with
/// certified arithmetic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Inside,
    /// The certified enclosure straddles the threshold.
    Boundary,
    Outside,
}

/// Checks both sides (when two-sided) of `spec` for `p`: `LInf` against
/// `t`, `L2`/`L2Weighted` against `t^2`.
pub fn check_constraint(p: &IvpCoeffs, spec: &GrowthSpec) -> Result<Verdict> {
    let prec = spec.prec();
    let t = spec.t();
    let threshold = match spec.mode() {
        NormMode::LInf => t.clone(),
        _ => Float::with_val(prec, t.square_ref()),
    };
    let mut sides = vec![Side::Positive];
    if spec.is_two_sided() {
        sides.push(Side::Negative);
    }
    let mut verdict = Verdict::Inside;
    for side in sides {
        let g = growth_functional(p, spec, side)?;
        if g.lower() > threshold {
            return Ok(Verdict::Outside);
        }
        if g.upper() > threshold {
            verdict = Verdict::Boundary;
        }
    }
    Ok(verdict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::{float, golden};
    use proptest::prelude::*;

    fn falling_factorial_binomial(n: i64, k: u32) -> Integer {
        let mut num = Integer::from(1);
        let mut den = Integer::from(1);
        for i in 0..k as i64 {
            num *= n - i;
            den *= i + 1;
        }
        num / den
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(binomial_i64(4, 2), 6);
        for k in 0..=5u32 {
            let expect = if k % 2 == 0 { 1 } else { -1 };
            assert_eq!(binomial_i64(-1, k), expect);
        }
        assert_eq!(binomial_i64(-3, 2), 6);
        assert!(binomial_i64(-3, 2).abs() <= binomial_i64(6, 2));
        assert_eq!(binomial_i64(6, 2), 15);
    }

    #[test]
    fn binomial_matches_falling_factorial() {
        for n in -12..=12 {
            for k in 0..=9 {
                assert_eq!(binomial_i64(n, k), falling_factorial_binomial(n, k), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn negative_binomial_bounded_by_double() {
        // |binom(-n, k)| <= binom(2n, k) for k < n
        for n in 1..20i64 {
            for k in 0..n as u32 {
                assert!(binomial_i64(-n, k).abs() <= binomial_i64(2 * n, k));
            }
        }
    }

    #[test]
    fn eval_examples() {
        assert_eq!(IvpCoeffs::from_i64(&[1]).eval(100), 1);
        let p = IvpCoeffs::from_i64(&[0, 2, 1]);
        let expected = [0, 2, 5, 9, 14, 20, 27, 35, 44, 54, 65];
        for (n, e) in expected.iter().enumerate() {
            assert_eq!(p.eval(n as i64), *e);
            assert_eq!(p.eval(n as i64) * 2, (n * (n + 3)) as i64);
        }
        assert_eq!(IvpCoeffs::from_i64(&[0, 0, 1]).eval(-2), 3);
    }

    #[test]
    fn canonical_form() {
        let p = IvpCoeffs::from_i64(&[3, 0, 0]);
        assert_eq!(p.degree(), 0);
        let z = IvpCoeffs::from_i64(&[0, 0]);
        assert!(z.is_zero());
        assert_eq!(z, IvpCoeffs::zero());
    }

    #[test]
    fn value_iterators_match_eval() {
        let p = IvpCoeffs::from_i64(&[5, -3, 7, 0, -2]);
        for (n, v) in p.values_forward().take(30).enumerate() {
            assert_eq!(v, p.eval(n as i64));
        }
        for (n, v) in p.values_backward().take(30).enumerate() {
            assert_eq!(v, p.eval(-(n as i64) - 1));
        }
    }

    #[test]
    fn monomial_examples() {
        let q = IvpCoeffs::from_i64(&[0, 0, 1]).to_monomial();
        assert_eq!(q, vec![Rational::new(), Rational::from((-1, 2)), Rational::from((1, 2))]);
        assert_eq!(IvpCoeffs::from_i64(&[1]).to_monomial(), vec![Rational::from(1)]);
    }

    #[test]
    fn from_monomial_rejects_non_integer_valued() {
        // x / 2
        let q = vec![Rational::new(), Rational::from((1, 2))];
        assert!(matches!(IvpCoeffs::from_monomial(&q), Err(Error::NotIntegerValued(_))));
    }

    #[test]
    fn json_wire_format() {
        let p = IvpCoeffs::new(vec![Integer::from(-4), "123456789012345678901234567890".parse().unwrap()]);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"degree":"1","coeffs":["-4","123456789012345678901234567890"]}"#);
        let back: IvpCoeffs = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        assert!(serde_json::from_str::<IvpCoeffs>(r#"{"degree":"2","coeffs":["1"]}"#).is_err());
        assert!(serde_json::from_str::<IvpCoeffs>(r#"{"degree":"1","coeffs":["1","0"]}"#).is_err());
    }

    #[test]
    fn l2_constant_at_golden_ratio() {
        let prec = 256;
        let phi = golden(prec);
        let spec = GrowthSpec::one_sided(phi.clone(), NormMode::L2, float(prec, 1.0)).unwrap();
        let g = growth_functional(&IvpCoeffs::from_i64(&[1]), &spec, Side::Positive).unwrap();
        let diff = Float::with_val(prec, g.value() - &phi);
        assert!(diff.abs() < 1e-30);
        assert!(g.contains(&phi));
    }

    fn weighted_closed_form(prec: Prec) -> Float {
        // 4 phi^2 log phi - 15 / (2 phi)
        let phi = golden(prec);
        Float::with_val(prec, phi.square_ref()) * 4u32 * Float::with_val(prec, phi.ln_ref())
            - Float::with_val(prec, 15) / (Float::with_val(prec, &phi) * 2u32)
    }

    #[test]
    fn weighted_value_for_half_n_n_minus_3() {
        // c = (0, -1, 1) is P(n) = n (n - 3) / 2
        let prec = 256;
        let spec = GrowthSpec::one_sided(golden(prec), NormMode::L2Weighted, float(prec, 1.0)).unwrap();
        let g = growth_functional(&IvpCoeffs::from_i64(&[0, -1, 1]), &spec, Side::Positive).unwrap();
        let expect = weighted_closed_form(prec);
        assert!((expect.to_f64() - 0.40406).abs() < 1e-5);
        assert!(g.contains(&expect), "{g} vs {}", expect.to_f64());
        assert!(g.error_f64() < 1e-60);
    }

    #[test]
    fn weighted_value_for_half_n_n_plus_3() {
        // c = (0, 2, 1) is P(n) = n (n + 3) / 2; reference summed with mpmath at 40 digits
        let prec = 256;
        let spec = GrowthSpec::one_sided(golden(prec), NormMode::L2Weighted, float(prec, 1.0)).unwrap();
        let g = growth_functional(&IvpCoeffs::from_i64(&[0, 2, 1]), &spec, Side::Positive).unwrap();
        let reference = Float::with_val(prec, Float::parse("5.186879896919252492165310162873266593064").unwrap());
        let diff = Float::with_val(prec, g.value() - &reference);
        assert!(diff.abs() < 1e-35);
        assert!(!g.contains(&weighted_closed_form(prec)));
    }

    #[test]
    fn zero_polynomial_functional_is_zero() {
        let prec = 128;
        for mode in [NormMode::LInf, NormMode::L2, NormMode::L2Weighted] {
            let spec = GrowthSpec::two_sided(float(prec, 2.0), float(prec, 3.0), mode, float(prec, 1.0)).unwrap();
            for side in [Side::Positive, Side::Negative] {
                let g = growth_functional(&IvpCoeffs::zero(), &spec, side).unwrap();
                assert!(g.value().is_zero());
            }
        }
    }

    #[test]
    fn negative_side_requires_b() {
        let spec = GrowthSpec::one_sided(float(64, 2.0), NormMode::L2, float(64, 1.0)).unwrap();
        let r = growth_functional(&IvpCoeffs::from_i64(&[1]), &spec, Side::Negative);
        assert!(matches!(r, Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(GrowthSpec::one_sided(float(64, 1.0), NormMode::L2, float(64, 1.0)).is_err());
        assert!(GrowthSpec::two_sided(float(64, 2.0), float(64, 0.5), NormMode::L2, float(64, 1.0)).is_err());
        assert!(GrowthSpec::one_sided(float(64, 2.0), NormMode::L2, float(64, 0.0)).is_err());
    }

    #[test]
    fn negative_side_l2_matches_direct_sum() {
        let prec = 192;
        let p = IvpCoeffs::from_i64(&[1, -1, 2]);
        let spec = GrowthSpec::two_sided(float(prec, 2.0), float(prec, 3.0), NormMode::L2, float(prec, 1.0)).unwrap();
        let g = growth_functional(&p, &spec, Side::Negative).unwrap();
        let mut direct = Float::new(prec);
        for n in 1..400i64 {
            let v = Float::with_val(prec, p.eval(-n));
            direct += Float::with_val(prec, v.square_ref()) / crate::real::powi(&Float::with_val(prec, 9), n);
        }
        assert!(g.contains(&direct));
    }

    #[test]
    fn linf_examples() {
        let prec = 128;
        let phi = golden(prec);
        let spec = GrowthSpec::one_sided(phi.clone(), NormMode::LInf, float(prec, 1.0)).unwrap();
        // P = 1: sup is 1 at n = 0
        let g = growth_functional(&IvpCoeffs::from_i64(&[1]), &spec, Side::Positive).unwrap();
        assert!((g.to_f64() - 1.0).abs() < 1e-30);
        // P(n) = n: sup_n n phi^-n at n = 2: 2 / phi^2
        let g = growth_functional(&IvpCoeffs::from_i64(&[0, 1]), &spec, Side::Positive).unwrap();
        let expect = 2.0 / (1.618033988749895f64 * 1.618033988749895);
        assert!((g.to_f64() - expect).abs() < 1e-14);
    }

    fn coeffs_strategy(max_deg: usize, bound: i64) -> impl Strategy<Value = IvpCoeffs> {
        prop::collection::vec(-bound..=bound, 1..=max_deg + 1).prop_map(|v| IvpCoeffs::from_i64(&v))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn monomial_round_trip(p in coeffs_strategy(8, 50)) {
            let q = p.to_monomial();
            prop_assert_eq!(IvpCoeffs::from_monomial(&q).unwrap(), p);
        }

        #[test]
        fn eval_agrees_with_monomial_form(p in coeffs_strategy(10, 30)) {
            let q = p.to_monomial();
            for n in -50i64..=50 {
                let mut acc = Rational::new();
                for c in q.iter().rev() {
                    acc *= n;
                    acc += c;
                }
                prop_assert_eq!(Rational::from(p.eval(n)), acc);
            }
        }

        #[test]
        fn linf_range_is_sufficient(p in coeffs_strategy(10, 20), a in 1.2f64..4.0) {
            let prec = 128;
            let base = float(prec, a);
            let d = p.degree();
            let range = sup_check_range(&base, d);
            let ext = 4 * ((c_a(&base) * d as f64).ceil() as u64).max(range);
            let inv = Float::with_val(prec, base.recip_ref());
            let mut w = Float::with_val(prec, 1);
            let mut best_in = Float::new(prec);
            let mut best_all = Float::new(prec);
            for (n, v) in p.values_forward().take(ext as usize + 1).enumerate() {
                let x = Float::with_val(prec, &Integer::from(v.abs_ref())) * &w;
                if n as u64 <= range && x > best_in { best_in = x.clone(); }
                if x > best_all { best_all = x; }
                w *= &inv;
            }
            prop_assert!(best_all <= best_in);
        }

        #[test]
        fn l2_series_monotone_and_tail_dominates(p in coeffs_strategy(6, 10), a in 1.3f64..3.0) {
            let prec = 160;
            let spec = GrowthSpec::one_sided(float(prec, a), NormMode::L2, float(prec, 1.0)).unwrap();
            let loose = growth_functional_tol(&p, &spec, Side::Positive, &float(prec, 1e-8)).unwrap();
            let tight = growth_functional_tol(&p, &spec, Side::Positive, &float(prec, 1e-30)).unwrap();
            prop_assert!(tight.value() >= loose.value());
            let observed = Float::with_val(prec, tight.value() - loose.value());
            prop_assert!(observed <= loose.error().clone() * 1.0001 + 1e-30);
        }
    }
}
