//! Continued fractions, best rational approximations and `||h alpha||`.
//!
//! Rationals and convergents use exact 128-bit integer arithmetic; overflow
//! is reported, never wrapped. Irrationals are held as a 128-bit fixed-point
//! fractional part ([`Turn`]) together with a certified error bound
//! `2^-precision_bits`.

use crate::error::{Error, Result};
use crate::turn::Turn;
use serde::Serialize;
use std::fmt;
use std::str::FromStr;

fn gcd128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a as i128
}

/// A reduced fraction `p/q` with `q >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Rational {
    p: i128,
    q: i128,
}

impl Rational {
    pub fn new(p: i128, q: i128) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidInput("zero denominator".into()));
        }
        let g = gcd128(p, q).max(1);
        let (mut p, mut q) = (p / g, q / g);
        if q < 0 {
            p = p.checked_neg().ok_or_else(|| Error::Overflow("negating numerator".into()))?;
            q = q.checked_neg().ok_or_else(|| Error::Overflow("negating denominator".into()))?;
        }
        Ok(Rational { p, q })
    }

    pub fn p(&self) -> i128 {
        self.p
    }

    pub fn q(&self) -> i128 {
        self.q
    }

    pub fn to_f64(&self) -> f64 {
        self.p as f64 / self.q as f64
    }

    /// `{h p / q}` as an exact residue `h p mod q`.
    pub fn residue(&self, h: i128) -> i128 {
        ((h % self.q) * (self.p % self.q)).rem_euclid(self.q)
    }

    /// `||h p / q||` via integer arithmetic.
    pub fn norm_multiple(&self, h: i128) -> f64 {
        let r = self.residue(h);
        r.min(self.q - r) as f64 / self.q as f64
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("cannot parse fraction {s:?}"));
        let (p, q) = match s.split_once('/') {
            Some((p, q)) => (p.trim(), q.trim()),
            None => (s.trim(), "1"),
        };
        let p: i128 = p.parse().map_err(|_| bad())?;
        let q: i128 = q.parse().map_err(|_| bad())?;
        Rational::new(p, q)
    }
}

/// `[a_0; a_1, ..., a_M]` with its convergents `p_m / q_m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContinuedFraction {
    quotients: Vec<i128>,
    convergents: Vec<Rational>,
}

impl ContinuedFraction {
    /// Builds convergents from partial quotients; `a_i >= 1` for `i >= 1`.
    pub fn from_quotients(quotients: Vec<i128>) -> Result<Self> {
        if quotients.is_empty() {
            return Err(Error::InvalidInput("empty continued fraction".into()));
        }
        if let Some(bad) = quotients.iter().skip(1).find(|&&a| a < 1) {
            return Err(Error::InvalidInput(format!("partial quotient {bad} < 1")));
        }
        let overflow = || Error::Overflow("convergent exceeds 128-bit range".into());
        let mut convergents = Vec::with_capacity(quotients.len());
        let (mut p_prev, mut q_prev) = (1i128, 0i128);
        let (mut p, mut q) = (quotients[0], 1i128);
        convergents.push(Rational { p, q });
        for &a in &quotients[1..] {
            let p_next = a.checked_mul(p).and_then(|x| x.checked_add(p_prev)).ok_or_else(overflow)?;
            let q_next = a.checked_mul(q).and_then(|x| x.checked_add(q_prev)).ok_or_else(overflow)?;
            (p_prev, q_prev, p, q) = (p, q, p_next, q_next);
            convergents.push(Rational { p, q });
        }
        Ok(ContinuedFraction {
            quotients,
            convergents,
        })
    }

    pub fn quotients(&self) -> &[i128] {
        &self.quotients
    }

    pub fn convergents(&self) -> &[Rational] {
        &self.convergents
    }

    pub fn last(&self) -> Rational {
        *self.convergents.last().expect("nonempty")
    }

    pub fn max_partial_quotient(&self) -> i128 {
        self.quotients.iter().skip(1).copied().max().unwrap_or(0)
    }
}

/// Euclidean expansion of `r`; the last quotient is at least 2 unless the
/// expansion is a single integer.
pub fn cf_expand(r: Rational) -> ContinuedFraction {
    let mut quotients = Vec::new();
    let (mut num, mut den) = (r.p, r.q);
    loop {
        let a = num.div_euclid(den);
        let rem = num.rem_euclid(den);
        quotients.push(a);
        if rem == 0 {
            break;
        }
        (num, den) = (den, rem);
    }
    ContinuedFraction::from_quotients(quotients).expect("convergents of a 128-bit fraction fit")
}

/// Convergents `F_{m+2} / F_{m+1}` of the golden ratio for `m = 0..=m_max`.
pub fn golden_ratio_convergents(m_max: usize) -> Result<ContinuedFraction> {
    if m_max < 1 {
        return Err(Error::InvalidInput("m_max must be at least 1".into()));
    }
    ContinuedFraction::from_quotients(vec![1; m_max + 1])
}

/// `||x||`, the distance from `x` to the nearest integer.
pub fn dist_nearest_int(x: f64) -> f64 {
    (x - x.round()).abs()
}

/// How an irrational number was specified.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum IrrationalKind {
    Quadratic {
        preperiod: Vec<i128>,
        period: Vec<i128>,
    },
    Fixed {
        bits: String,
    },
}

/// Minimum certified precision for any irrational.
pub const MIN_PRECISION_BITS: u32 = 96;

/// Target for `log2(q_m q_{m+1})` when picking the convergent that seeds
/// the fixed-point value of a quadratic irrational.
const QUADRATIC_TARGET_BITS: u32 = 124;

/// Convergents with denominators beyond this are not retained.
const STORED_CONVERGENT_LIMIT: i128 = 1 << 40;

/// Largest acceptable `|h| 2^-precision_bits`.
pub const CERTIFICATE_LIMIT: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IrrationalNumber {
    kind: IrrationalKind,
    integer_part: i128,
    #[serde(skip)]
    frac: Turn,
    precision_bits: u32,
    #[serde(skip)]
    cf: Option<ContinuedFraction>,
}

impl IrrationalNumber {
    /// `(1 + sqrt 5) / 2 = [1; 1, 1, ...]`.
    pub fn golden() -> Self {
        Self::quadratic(vec![], vec![1]).expect("golden ratio")
    }

    /// `sqrt 2 = [1; 2, 2, ...]`.
    pub fn sqrt2() -> Self {
        Self::quadratic(vec![1], vec![2]).expect("sqrt 2")
    }

    /// Eventually periodic continued fraction `[preperiod; period, period, ...]`.
    /// With an empty preperiod, `a_0` is the first period entry.
    pub fn quadratic(preperiod: Vec<i128>, period: Vec<i128>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::InvalidInput("empty period".into()));
        }
        if period.iter().any(|&a| a < 1) || preperiod.iter().skip(1).any(|&a| a < 1) {
            return Err(Error::InvalidInput("partial quotients after a_0 must be >= 1".into()));
        }
        let target = 1i128 << QUADRATIC_TARGET_BITS;
        let mut seq = preperiod.iter().chain(period.iter().cycle()).copied();
        let a0 = seq.next().expect("period is nonempty");
        let mut quotients = vec![a0];
        let mut convergents = vec![Rational { p: a0, q: 1 }];
        let (mut p_prev, mut q_prev) = (1i128, 0i128);
        let (mut p, mut q) = (a0, 1i128);
        let mut chosen: Option<(Rational, i128)> = None;
        for a in seq {
            let next = a
                .checked_mul(p)
                .and_then(|x| x.checked_add(p_prev))
                .zip(a.checked_mul(q).and_then(|x| x.checked_add(q_prev)));
            let Some((p_next, q_next)) = next else { break };
            let Some(prod) = q.checked_mul(q_next) else { break };
            chosen = Some((Rational { p, q }, prod));
            if prod >= target {
                break;
            }
            (p_prev, q_prev, p, q) = (p, q, p_next, q_next);
            quotients.push(a);
            convergents.push(Rational { p, q });
        }
        let (seed, prod) = chosen.ok_or_else(|| Error::Overflow("no usable convergent".into()))?;
        // |alpha - p/q| < 1/(q q'), plus < 2^-128 from the long division
        let log2_prod = 127 - prod.leading_zeros();
        let precision_bits = (log2_prod - 1).min(126);
        if precision_bits < MIN_PRECISION_BITS {
            return Err(Error::PrecisionExhausted(format!(
                "only {precision_bits} certified bits available"
            )));
        }
        let keep = convergents
            .iter()
            .take_while(|r| r.q <= STORED_CONVERGENT_LIMIT)
            .count();
        quotients.truncate(keep);
        let cf = ContinuedFraction::from_quotients(quotients)?;
        Ok(IrrationalNumber {
            kind: IrrationalKind::Quadratic { preperiod, period },
            integer_part: seed.p.div_euclid(seed.q),
            frac: Turn::from_ratio(seed.p, seed.q),
            precision_bits,
            cf: Some(cf),
        })
    }

    /// A literal in `[0, 1)` given by 24 to 32 hexadecimal digits of its
    /// binary expansion.
    pub fn fixed_hex(bits: &str) -> Result<Self> {
        let digits = bits.trim().trim_start_matches("0x");
        if !(24..=32).contains(&digits.len()) {
            return Err(Error::InvalidInput(format!(
                "fixed literal needs 24..=32 hex digits, got {}",
                digits.len()
            )));
        }
        let raw = u128::from_str_radix(digits, 16)
            .map_err(|e| Error::InvalidInput(format!("bad hex literal: {e}")))?;
        let width = 4 * digits.len() as u32;
        Ok(IrrationalNumber {
            kind: IrrationalKind::Fixed {
                bits: digits.to_string(),
            },
            integer_part: 0,
            frac: Turn(raw << (128 - width)),
            precision_bits: width,
            cf: None,
        })
    }

    pub fn kind(&self) -> &IrrationalKind {
        &self.kind
    }

    pub fn frac(&self) -> Turn {
        self.frac
    }

    pub fn integer_part(&self) -> i128 {
        self.integer_part
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    pub fn to_f64(&self) -> f64 {
        self.integer_part as f64 + self.frac.to_f64()
    }

    /// Convergents with denominators up to 2^40, when known.
    pub fn continued_fraction(&self) -> Option<&ContinuedFraction> {
        self.cf.as_ref()
    }

    /// Absolute error bound on `{n alpha}`.
    pub fn error_bound(&self, n: i128) -> f64 {
        n.unsigned_abs() as f64 * (-(self.precision_bits as f64)).exp2()
    }

    /// `{n alpha}`, provided the precision certificate holds for `n`.
    pub fn frac_multiple(&self, n: i128) -> Result<Turn> {
        let err = self.error_bound(n);
        if err >= CERTIFICATE_LIMIT {
            return Err(Error::PrecisionExhausted(format!(
                "|{n}| * 2^-{} = {err:e} exceeds {CERTIFICATE_LIMIT:e}",
                self.precision_bits
            )));
        }
        Ok(self.frac.mul_int(n))
    }
}

/// `||h alpha||` in fixed point; absolute error at most `|h| 2^-precision_bits`.
pub fn norm_h_alpha(alpha: &IrrationalNumber, h: i128) -> Result<f64> {
    if h == 0 {
        return Err(Error::InvalidInput("h must be nonzero".into()));
    }
    let value = alpha.frac_multiple(h)?.dist_nearest_int();
    let err = alpha.error_bound(h);
    if value <= err {
        return Err(Error::PrecisionExhausted(format!(
            "||{h} alpha|| = {value:e} is within the error bound {err:e} of an integer"
        )));
    }
    Ok(value)
}

/// `min_{0 < h <= q/2} h ||h p / q||`, exact up to the final division.
pub fn bad_approx_constant_rational(r: Rational) -> Result<f64> {
    if r.q() < 2 {
        return Err(Error::InvalidInput("q must be at least 2".into()));
    }
    let q = r.q();
    let best = (1..=q / 2)
        .map(|h| {
            let res = r.residue(h);
            h * res.min(q - res)
        })
        .min()
        .expect("q >= 2");
    Ok(best as f64 / q as f64)
}

/// `sum_{h=1}^{H} 1 / (h ||h alpha||)^power`, `power` in `{1, 2}`.
pub fn dioph_sum(alpha: &IrrationalNumber, h_max: u64, power: u32) -> Result<f64> {
    if h_max < 2 {
        return Err(Error::InvalidInput("H must be at least 2".into()));
    }
    if !(power == 1 || power == 2) {
        return Err(Error::InvalidInput(format!("power {power} not in {{1, 2}}")));
    }
    let mut sum = 0.0;
    for h in 1..=h_max {
        let term = h as f64 * norm_h_alpha(alpha, h as i128)?;
        sum += term.powi(-(power as i32));
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn r(p: i128, q: i128) -> Rational {
        Rational::new(p, q).unwrap()
    }

    #[test]
    fn rational_reduces_and_parses() {
        assert_eq!(r(6, -4), r(-3, 2));
        assert_eq!("144/233".parse::<Rational>().unwrap(), r(144, 233));
        assert_eq!("7".parse::<Rational>().unwrap(), r(7, 1));
        assert!("1/0".parse::<Rational>().is_err());
        assert!("x/3".parse::<Rational>().is_err());
    }

    #[test]
    fn expansions() {
        let cf = cf_expand(r(5, 3));
        assert_eq!(cf.quotients(), &[1, 1, 2]);
        assert_eq!(cf.convergents(), &[r(1, 1), r(2, 1), r(5, 3)]);

        let cf = cf_expand(r(1, 1));
        assert_eq!(cf.quotients(), &[1]);
        assert_eq!(cf.convergents(), &[r(1, 1)]);

        let cf = cf_expand(r(13, 8));
        assert_eq!(cf.quotients(), &[1, 1, 1, 1, 2]);
        let n = cf.convergents().len();
        assert_eq!(&cf.convergents()[n - 2..], &[r(5, 3), r(13, 8)]);

        let cf = cf_expand(r(-7, 3));
        assert_eq!(cf.quotients(), &[-3, 1, 2]);
        assert_eq!(cf.last(), r(-7, 3));
    }

    #[test]
    fn golden_convergents() {
        assert_eq!(golden_ratio_convergents(4).unwrap().last(), r(8, 5));
        assert_eq!(golden_ratio_convergents(10).unwrap().last(), r(144, 89));
        assert_eq!(golden_ratio_convergents(12).unwrap().last(), r(377, 233));
        assert!(golden_ratio_convergents(0).is_err());
        assert!(matches!(golden_ratio_convergents(300), Err(Error::Overflow(_))));
    }

    #[test]
    fn nearest_integer_distance() {
        assert_abs_diff_eq!(dist_nearest_int(0.3), 0.3, epsilon = 1e-16);
        assert_eq!(dist_nearest_int(7.5), 0.5);
        assert_eq!(dist_nearest_int(-2.25), 0.25);
    }

    #[test]
    fn golden_fixed_point() {
        let g = IrrationalNumber::golden();
        assert!(g.precision_bits() >= MIN_PRECISION_BITS);
        assert_eq!(g.integer_part(), 1);
        assert_abs_diff_eq!(g.to_f64(), 1.618_033_988_749_895, epsilon = 1e-15);
        assert_abs_diff_eq!(norm_h_alpha(&g, 1).unwrap(), 0.381_966_011_250_105_1, epsilon = 1e-15);
    }

    #[test]
    fn fibonacci_multiples_sit_between_convergent_bounds() {
        let g = IrrationalNumber::golden();
        let conv = g.continued_fraction().unwrap().convergents().to_vec();
        for m in 1..conv.len() - 1 {
            let (qm, qn) = (conv[m].q(), conv[m + 1].q());
            let v = norm_h_alpha(&g, qm).unwrap();
            assert!(v > 1.0 / (qn + qm) as f64 && v <= 1.0 / qn as f64, "m = {m}");
        }
    }

    #[test]
    fn precision_certificate() {
        let g = IrrationalNumber::golden();
        assert!(matches!(
            norm_h_alpha(&g, 1i128 << 100),
            Err(Error::PrecisionExhausted(_))
        ));
        // alpha = 1/2 exactly: 2 alpha is an integer
        let half = IrrationalNumber::fixed_hex("800000000000000000000000").unwrap();
        assert_eq!(half.precision_bits(), 96);
        assert!(matches!(norm_h_alpha(&half, 2), Err(Error::PrecisionExhausted(_))));
        assert_eq!(norm_h_alpha(&half, 1).unwrap(), 0.5);
        assert!(IrrationalNumber::fixed_hex("8000").is_err());
    }

    #[test]
    fn bad_approximability_of_fractions() {
        assert_eq!(bad_approx_constant_rational(r(1, 2)).unwrap(), 0.5);
        assert_abs_diff_eq!(bad_approx_constant_rational(r(2, 5)).unwrap(), 0.4, epsilon = 1e-15);
        let a = bad_approx_constant_rational(r(144, 233)).unwrap();
        assert!(a >= 0.2, "A = {a}");
        // brute force over all h
        let q = 233i128;
        let brute = (1..=q / 2)
            .map(|h| h as f64 * dist_nearest_int(h as f64 * 144.0 / 233.0))
            .fold(f64::INFINITY, f64::min);
        assert_abs_diff_eq!(a, brute, epsilon = 1e-12);
    }

    #[test]
    fn quadratic_convergents_bracket_value() {
        for alpha in [IrrationalNumber::golden(), IrrationalNumber::sqrt2()] {
            let cf = alpha.continued_fraction().unwrap();
            for c in cf.convergents().iter().filter(|c| c.q() < 1 << 20) {
                let diff = (alpha.to_f64() - c.to_f64()).abs();
                assert!(diff <= 1.0 / (c.q() as f64).powi(2));
            }
            for c in cf.convergents().iter().filter(|c| c.q() >= 1 << 20) {
                // circle distance in fixed point
                let diff = Turn(alpha.frac().0.wrapping_sub(Turn::from_ratio(c.p(), c.q()).0));
                assert!(diff.dist_nearest_int() <= 1.0 / (c.q() as f64).powi(2));
            }
        }
        assert_eq!(IrrationalNumber::sqrt2().continued_fraction().unwrap().quotients()[..4], [1, 2, 2, 2]);
    }

    #[test]
    fn diophantine_sum_small_h() {
        let g = IrrationalNumber::golden();
        let direct: f64 = (1..=10)
            .map(|h| {
                let x = h as f64 * 1.618_033_988_749_895_f64;
                1.0 / (h as f64 * dist_nearest_int(x))
            })
            .sum();
        assert_abs_diff_eq!(dioph_sum(&g, 10, 1).unwrap(), direct, epsilon = 1e-10);
        assert!(dioph_sum(&g, 1, 1).is_err());
        assert!(dioph_sum(&g, 10, 3).is_err());
    }
}
