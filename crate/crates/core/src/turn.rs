//! Points of the circle group R/Z in 128-bit binary fixed point.
//!
//! A [`Turn`] stores the fractional part of a real number as `x / 2^128`.
//! Multiplication by an integer is exact modular arithmetic on the stored
//! bits, so `{n x}` never loses precision beyond the representation error of
//! `x` itself (scaled by `|n|`).

use num_complex::Complex64;
use std::f64::consts::TAU;

const TWO_POW_128: f64 = 340_282_366_920_938_463_463_374_607_431_768_211_456.0;

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Turn(pub u128);

impl Turn {
    pub const ZERO: Turn = Turn(0);
    pub const HALF: Turn = Turn(1 << 127);

    /// `{x}` rounded toward zero to the nearest representable turn.
    pub fn from_f64(x: f64) -> Self {
        let mut r = x.rem_euclid(1.0);
        if r >= 1.0 {
            r = 0.0;
        }
        Turn((r * TWO_POW_128) as u128)
    }

    /// `floor(2^128 * {num / den})`, computed by exact long division.
    ///
    /// Panics if `den <= 0`.
    pub fn from_ratio(num: i128, den: i128) -> Self {
        assert!(den > 0, "denominator must be positive");
        let d = den as u128;
        let mut rem = num.rem_euclid(den) as u128;
        let mut out = 0u128;
        for _ in 0..128 {
            rem <<= 1;
            out <<= 1;
            if rem >= d {
                rem -= d;
                out |= 1;
            }
        }
        Turn(out)
    }

    /// `{n x}`, exact modulo 2^-128.
    #[inline]
    pub fn mul_int(self, n: i128) -> Self {
        Turn((n as u128).wrapping_mul(self.0))
    }

    /// Value in `[0, 1)`, truncated to 53 bits so it never rounds up to 1.
    #[inline]
    pub fn to_f64(self) -> f64 {
        (self.0 >> 75) as f64 / 9_007_199_254_740_992.0
    }

    /// Representative in `[-1/2, 1/2]`, correctly rounded, so small angles
    /// keep full relative precision.
    #[inline]
    pub fn to_signed_f64(self) -> f64 {
        (self.0 as i128) as f64 / TWO_POW_128
    }

    /// Distance to the nearest integer, in `[0, 1/2]`.
    #[inline]
    pub fn dist_nearest_int(self) -> f64 {
        let v = self.0.min(self.0.wrapping_neg());
        v as f64 / TWO_POW_128
    }

    /// `e(x) = exp(2 pi i x)`.
    ///
    /// The angle is first reduced to the nearest quarter turn, so multiples of
    /// 1/4 map to exactly `1, i, -1, -i`.
    pub fn unit(self) -> Complex64 {
        let quadrant = (self.0.wrapping_add(1 << 125) >> 126) as u32;
        let residual = self.0.wrapping_sub((quadrant as u128) << 126) as i128;
        let (s, c) = (TAU * (residual as f64 / TWO_POW_128)).sin_cos();
        match quadrant {
            0 => Complex64::new(c, s),
            1 => Complex64::new(-s, c),
            2 => Complex64::new(-c, -s),
            _ => Complex64::new(s, -c),
        }
    }
}

/// `e(m / q)` with `m` reduced modulo `q` in integer arithmetic.
impl std::ops::Add for Turn {
    type Output = Turn;

    #[inline]
    fn add(self, other: Turn) -> Turn {
        Turn(self.0.wrapping_add(other.0))
    }
}

impl std::ops::AddAssign for Turn {
    #[inline]
    fn add_assign(&mut self, other: Turn) {
        self.0 = self.0.wrapping_add(other.0);
    }
}

impl std::ops::Neg for Turn {
    type Output = Turn;

    #[inline]
    fn neg(self) -> Turn {
        Turn(self.0.wrapping_neg())
    }
}

pub fn root_of_unity(m: i128, q: i128) -> Complex64 {
    Turn::from_ratio(m, q).unit()
}
