//! Exact scalars: rationals with an optional Gaussian (imaginary) part.
//!
//! The ground field of the algebras in this crate is the complex numbers in
//! the theory, but every construction only ever needs rationals or Gaussian
//! rationals, so exactness is free. A [`Scalar`] is stored as a pair of
//! `BigRational`s (real and imaginary part); plain rational computations keep
//! the imaginary part at zero and never allocate differently for it.
//!
//! `BigRational` keeps values in lowest terms with a positive denominator,
//! which is the canonical form every serializer in this workspace relies on.

use alloc::string::{String, ToString};
use core::fmt;
use core::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Which scalar field a data set is declared over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Field {
    Rational,
    GaussianRational,
}

/// An exact scalar `re + im*i` with `re, im` rationals in lowest terms.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Scalar {
    re: BigRational,
    im: BigRational,
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar { re: BigRational::zero(), im: BigRational::zero() }
    }

    pub fn one() -> Self {
        Scalar { re: BigRational::one(), im: BigRational::zero() }
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Scalar { re: BigRational::zero(), im: BigRational::one() }
    }

    pub fn from_int(n: i64) -> Self {
        Scalar { re: BigRational::from_integer(BigInt::from(n)), im: BigRational::zero() }
    }

    /// `p/q` as a rational scalar. Panics if `q == 0`.
    pub fn ratio(p: i64, q: i64) -> Self {
        assert!(q != 0, "zero denominator");
        Scalar {
            re: BigRational::new(BigInt::from(p), BigInt::from(q)),
            im: BigRational::zero(),
        }
    }

    pub fn from_parts(re: BigRational, im: BigRational) -> Self {
        Scalar { re, im }
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.im.is_zero()
    }

    /// `(-1)^n` for a possibly negative exponent.
    pub fn neg_one_pow(n: i64) -> Self {
        if n.rem_euclid(2) == 0 {
            Scalar::one()
        } else {
            -Scalar::one()
        }
    }

    pub fn inv(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        // 1/(a+bi) = (a-bi)/(a^2+b^2)
        let norm = &self.re * &self.re + &self.im * &self.im;
        Some(Scalar { re: &self.re / &norm, im: -(&self.im / &norm) })
    }

    /// Canonical text form: `p/q` (denominator omitted when 1), with a
    /// `+r/s i` tail only when the imaginary part is nonzero.
    pub fn to_text(&self) -> String {
        fn rat(r: &BigRational) -> String {
            if r.denom().is_one() {
                r.numer().to_string()
            } else {
                let mut s = r.numer().to_string();
                s.push('/');
                s.push_str(&r.denom().to_string());
                s
            }
        }
        if self.im.is_zero() {
            rat(&self.re)
        } else if self.re.is_zero() {
            let mut s = rat(&self.im);
            s.push_str("i");
            s
        } else {
            let mut s = rat(&self.re);
            if !self.im.is_negative() {
                s.push('+');
            }
            s.push_str(&rat(&self.im));
            s.push('i');
            s
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        Scalar { re: self.re + rhs.re, im: self.im + rhs.im }
    }
}

impl<'a> Add<&'a Scalar> for Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        Scalar { re: self.re + &rhs.re, im: self.im + &rhs.im }
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        Scalar { re: self.re - rhs.re, im: self.im - rhs.im }
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        (&self).mul(&rhs)
    }
}

impl<'a, 'b> Mul<&'b Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        Scalar {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = (&*self).mul(rhs);
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { re: -self.re, im: -self.im }
    }
}

impl<'a> Neg for &'a Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { re: -self.re.clone(), im: -self.im.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form_is_idempotent() {
        // BigRational reduces on construction; re-normalizing a canonical
        // value must be the identity.
        let a = Scalar::ratio(6, -4);
        let b = Scalar::ratio(-3, 2);
        assert_eq!(a, b);
        assert_eq!(a.to_text(), "-3/2");
        let again = Scalar::from_parts(a.re().clone(), a.im().clone());
        assert_eq!(again, a);
    }

    #[test]
    fn gaussian_arithmetic() {
        let i = Scalar::i();
        assert_eq!((&i).mul(&i), Scalar::from_int(-1));
        let z = Scalar::ratio(1, 2) + &Scalar::i();
        let w = z.inv().unwrap();
        assert!(((&z).mul(&w)).is_one());
    }

    #[test]
    fn neg_one_pow_handles_negatives() {
        assert_eq!(Scalar::neg_one_pow(0), Scalar::one());
        assert_eq!(Scalar::neg_one_pow(-1), -Scalar::one());
        assert_eq!(Scalar::neg_one_pow(-2), Scalar::one());
        assert_eq!(Scalar::neg_one_pow(3), -Scalar::one());
    }

    #[test]
    fn display_forms() {
        assert_eq!(Scalar::from_int(5).to_text(), "5");
        assert_eq!(Scalar::ratio(1, 3).to_text(), "1/3");
        assert_eq!((Scalar::ratio(1, 2) + &Scalar::i()).to_text(), "1/2+1i");
        assert_eq!(Scalar::i().to_text(), "1i");
    }
}
