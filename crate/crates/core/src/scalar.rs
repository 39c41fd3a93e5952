//! Scalar fields for form coefficients.
//!
//! Everything above this module is written against [`Scalar`]. The exact
//! instantiation is [`GaussianRational`] (`Q(i)` with arbitrary precision);
//! [`Complex64`] exists for quick numerical evaluation and is never used by
//! the verification paths.

use std::cmp::Ordering;
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact complex rationals `a + b i` with `a, b` in `Q`.
pub type GaussianRational = Complex<BigRational>;

/// Double precision complex numbers.
pub type Complex64 = Complex<f64>;

/// A field containing the imaginary unit.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn imag_unit() -> Self;

    fn conj(&self) -> Self;

    fn from_ratio(num: i64, den: i64) -> Self;

    fn from_int(n: i64) -> Self {
        Self::from_ratio(n, 1)
    }

    /// Real part, as an element of the same field.
    fn re(&self) -> Self;

    /// Imaginary part, as an element of the same field.
    fn im(&self) -> Self;

    fn is_real(&self) -> bool {
        self.im().is_zero()
    }

    /// Sign of a real scalar, `None` if the scalar has an imaginary part.
    fn real_sign(&self) -> Option<Ordering>;

    /// Whether equality in this field is exact.
    fn is_exact() -> bool;

    fn add_ref(&self, other: &Self) -> Self {
        self.clone() + other.clone()
    }

    fn sub_ref(&self, other: &Self) -> Self {
        self.clone() - other.clone()
    }

    fn mul_ref(&self, other: &Self) -> Self {
        self.clone() * other.clone()
    }

    /// Compact human-readable rendering, e.g. `-1/2`, `3i`, `(1+2i)`.
    fn render(&self) -> String;
}

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn render_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl Scalar for GaussianRational {
    fn imag_unit() -> Self {
        Complex::new(BigRational::zero(), BigRational::one())
    }

    fn conj(&self) -> Self {
        Complex::new(self.re.clone(), -self.im.clone())
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Complex::new(ratio(num, den), BigRational::zero())
    }

    fn re(&self) -> Self {
        Complex::new(self.re.clone(), BigRational::zero())
    }

    fn im(&self) -> Self {
        Complex::new(self.im.clone(), BigRational::zero())
    }

    fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    fn real_sign(&self) -> Option<Ordering> {
        if !self.im.is_zero() {
            return None;
        }
        Some(if self.re.is_positive() {
            Ordering::Greater
        } else if self.re.is_negative() {
            Ordering::Less
        } else {
            Ordering::Equal
        })
    }

    fn is_exact() -> bool {
        true
    }

    fn add_ref(&self, other: &Self) -> Self {
        Complex::new(&self.re + &other.re, &self.im + &other.im)
    }

    fn sub_ref(&self, other: &Self) -> Self {
        Complex::new(&self.re - &other.re, &self.im - &other.im)
    }

    fn mul_ref(&self, other: &Self) -> Self {
        if self.im.is_zero() && other.im.is_zero() {
            return Complex::new(&self.re * &other.re, BigRational::zero());
        }
        Complex::new(
            &self.re * &other.re - &self.im * &other.im,
            &self.re * &other.im + &self.im * &other.re,
        )
    }

    fn render(&self) -> String {
        let re = &self.re;
        let im = &self.im;
        if im.is_zero() {
            return render_rational(re);
        }
        let im_part = if im.is_one() {
            "i".to_string()
        } else if (-im.clone()).is_one() {
            "-i".to_string()
        } else {
            format!("{}i", render_rational(im))
        };
        if re.is_zero() {
            return im_part;
        }
        let joined = if im.is_negative() {
            format!("{}{}", render_rational(re), im_part)
        } else {
            format!("{}+{}", render_rational(re), im_part)
        };
        format!("({joined})")
    }
}

impl Scalar for Complex64 {
    fn imag_unit() -> Self {
        Complex::new(0.0, 1.0)
    }

    fn conj(&self) -> Self {
        Complex::new(self.re, -self.im)
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Complex::new(num as f64 / den as f64, 0.0)
    }

    fn re(&self) -> Self {
        Complex::new(self.re, 0.0)
    }

    fn im(&self) -> Self {
        Complex::new(self.im, 0.0)
    }

    fn real_sign(&self) -> Option<Ordering> {
        if self.im != 0.0 {
            return None;
        }
        self.re.partial_cmp(&0.0)
    }

    fn is_exact() -> bool {
        false
    }

    fn render(&self) -> String {
        if self.im == 0.0 {
            format!("{}", self.re)
        } else {
            format!("({}{:+}i)", self.re, self.im)
        }
    }
}

/// Convenience constructor for exact scalars.
pub fn q(num: i64, den: i64) -> GaussianRational {
    GaussianRational::from_ratio(num, den)
}

/// Exact `re + im i` from integer parts.
pub fn qi(re: i64, im: i64) -> GaussianRational {
    Complex::new(ratio(re, 1), ratio(im, 1))
}

/// Integer power of a scalar (negative exponents invert).
pub fn powi<S: Scalar>(base: &S, exp: i32) -> S {
    let mut acc = S::one();
    for _ in 0..exp.unsigned_abs() {
        acc = acc.mul_ref(base);
    }
    if exp < 0 {
        S::one() / acc
    } else {
        acc
    }
}

/// `(-1)^k` as a scalar.
pub fn sign_scalar<S: Scalar>(k: i64) -> S {
    if k.rem_euclid(2) == 0 {
        S::one()
    } else {
        -S::one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_squares_to_minus_one() {
        let i = GaussianRational::imag_unit();
        assert_eq!(i.mul_ref(&i), q(-1, 1));
        let i64_ = Complex64::imag_unit();
        assert_eq!(i64_ * i64_, Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn rationals_normalize() {
        assert_eq!(q(2, 4), q(1, 2));
        assert_eq!(q(3, -6), q(-1, 2));
        assert_eq!(q(-1, 2).render(), "-1/2");
    }

    #[test]
    fn rendering() {
        assert_eq!(qi(0, 1).render(), "i");
        assert_eq!(qi(0, -1).render(), "-i");
        assert_eq!(qi(1, 2).render(), "(1+2i)");
        assert_eq!(qi(1, -2).render(), "(1-2i)");
        assert_eq!(q(0, 1).render(), "0");
    }

    #[test]
    fn powers_and_signs() {
        let two = q(2, 1);
        assert_eq!(powi(&two, 10), q(1024, 1));
        assert_eq!(powi(&two, -2), q(1, 4));
        let i = GaussianRational::imag_unit();
        assert_eq!(powi(&i, 3), qi(0, -1));
        assert_eq!(sign_scalar::<GaussianRational>(3), q(-1, 1));
        assert_eq!(sign_scalar::<GaussianRational>(-2), q(1, 1));
    }

    #[test]
    fn real_sign_detects_complex() {
        assert_eq!(q(-3, 2).real_sign(), Some(Ordering::Less));
        assert_eq!(qi(1, 1).real_sign(), None);
        assert!(qi(5, 0).is_real());
    }
}
