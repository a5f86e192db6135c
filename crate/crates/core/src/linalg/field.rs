use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Coefficient field for boundary reductions.
pub trait Field: Clone + fmt::Debug + Send + Sync + 'static {
    type Elem: Clone + PartialEq + fmt::Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn from_i64(&self, v: i64) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// Multiplicative inverse; `a` must be nonzero.
    fn inv(&self, a: &Self::Elem) -> Self::Elem;

    fn one(&self) -> Self::Elem {
        self.from_i64(1)
    }

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.mul(a, &self.inv(b))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Gf2;

impl Field for Gf2 {
    type Elem = u8;

    fn zero(&self) -> u8 {
        0
    }
    fn from_i64(&self, v: i64) -> u8 {
        (v.rem_euclid(2)) as u8
    }
    fn is_zero(&self, a: &u8) -> bool {
        *a == 0
    }
    fn add(&self, a: &u8, b: &u8) -> u8 {
        a ^ b
    }
    fn neg(&self, a: &u8) -> u8 {
        *a
    }
    fn mul(&self, a: &u8, b: &u8) -> u8 {
        a & b
    }
    fn inv(&self, a: &u8) -> u8 {
        assert_eq!(*a, 1, "inverse of zero in GF(2)");
        1
    }
}

/// Prime field GF(p) for a prime `p < 2^31`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GfP {
    p: u64,
}

impl GfP {
    pub fn new(p: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidParameter(format!("{p} is not prime")));
        }
        if p >= 1 << 31 {
            return Err(Error::InvalidParameter(format!("{p} too large")));
        }
        Ok(Self { p: p as u64 })
    }

    pub fn modulus(&self) -> u32 {
        self.p as u32
    }
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut i = 2u32;
    while (i as u64) * (i as u64) <= p as u64 {
        if p.is_multiple_of(i) {
            return false;
        }
        i += 1;
    }
    true
}

impl Field for GfP {
    type Elem = u32;

    fn zero(&self) -> u32 {
        0
    }
    fn from_i64(&self, v: i64) -> u32 {
        v.rem_euclid(self.p as i64) as u32
    }
    fn is_zero(&self, a: &u32) -> bool {
        *a == 0
    }
    fn add(&self, a: &u32, b: &u32) -> u32 {
        ((*a as u64 + *b as u64) % self.p) as u32
    }
    fn neg(&self, a: &u32) -> u32 {
        if *a == 0 {
            0
        } else {
            (self.p - *a as u64) as u32
        }
    }
    fn mul(&self, a: &u32, b: &u32) -> u32 {
        ((*a as u64 * *b as u64) % self.p) as u32
    }
    fn inv(&self, a: &u32) -> u32 {
        assert!(*a != 0, "inverse of zero in GF({})", self.p);
        // Fermat: a^(p-2)
        let (mut base, mut exp, mut acc) = (*a as u64, self.p - 2, 1u64);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % self.p;
            }
            base = base * base % self.p;
            exp >>= 1;
        }
        acc as u32
    }
}

/// Exact rationals.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn from_i64(&self, v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn inv(&self, a: &BigRational) -> BigRational {
        assert!(!a.is_zero(), "inverse of zero rational");
        BigRational::one() / a
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_axioms<F: Field>(f: &F, samples: &[i64]) {
        for &x in samples {
            let a = f.from_i64(x);
            assert_eq!(f.add(&a, &f.zero()), a);
            assert_eq!(f.mul(&a, &f.one()), a);
            assert!(f.is_zero(&f.add(&a, &f.neg(&a))));
            if !f.is_zero(&a) {
                assert_eq!(f.mul(&a, &f.inv(&a)), f.one());
            }
            for &y in samples {
                let b = f.from_i64(y);
                assert_eq!(f.add(&a, &b), f.add(&b, &a));
                assert_eq!(f.mul(&a, &b), f.mul(&b, &a));
                assert_eq!(f.mul(&a, &f.add(&b, &b)), f.add(&f.mul(&a, &b), &f.mul(&a, &b)));
            }
        }
    }

    #[test]
    fn axioms() {
        let s = [-7, -1, 0, 1, 2, 3, 5, 1008, 1010];
        check_axioms(&Gf2, &s);
        check_axioms(&GfP::new(1009).unwrap(), &s);
        check_axioms(&GfP::new(2).unwrap(), &s);
        check_axioms(&Rationals, &s);
    }

    #[test]
    fn rejects_composites() {
        assert!(GfP::new(1).is_err());
        assert!(GfP::new(1001).is_err());
        assert!(GfP::new(1009).is_ok());
    }

    #[test]
    fn gf2_sign_is_discarded() {
        assert_eq!(Gf2.from_i64(-1), 1);
        assert_eq!(GfP::new(3).unwrap().from_i64(-1), 2);
    }
}
