//! Arithmetic in the prime field F_p.
//!
//! Ontic coordinates and observable coefficients live in F_p. The modulus is
//! validated once at [`Prime`] construction; element operations then assume
//! matching moduli and panic loudly on a mismatch, which is always a caller
//! bug rather than a data condition.

use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

/// Errors from modulus validation and field operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldError {
    /// The requested modulus is not a prime number.
    NotPrime(u32),
    /// Zero has no multiplicative inverse.
    ZeroInverse,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldError::NotPrime(n) => write!(f, "modulus {n} is not prime"),
            FieldError::ZeroInverse => write!(f, "zero has no multiplicative inverse"),
        }
    }
}

impl core::error::Error for FieldError {}

/// A validated prime modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prime(u32);

impl Prime {
    /// Validates `p` by trial division.
    pub fn new(p: u32) -> Result<Prime, FieldError> {
        if p < 2 {
            return Err(FieldError::NotPrime(p));
        }
        let mut d = 2u32;
        while d.saturating_mul(d) <= p {
            if p % d == 0 {
                return Err(FieldError::NotPrime(p));
            }
            d += 1;
        }
        Ok(Prime(p))
    }

    /// The modulus value.
    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    /// Number of ontic states for a single system, p^2.
    #[inline]
    pub fn ontic_count(self) -> usize {
        (self.0 as usize) * (self.0 as usize)
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An element of F_p, stored reduced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fp {
    value: u32,
    prime: Prime,
}

impl Fp {
    /// Builds an element, reducing `value` mod p.
    #[inline]
    pub fn new(value: u32, prime: Prime) -> Fp {
        Fp { value: value % prime.get(), prime }
    }

    #[inline]
    pub fn value(self) -> u32 {
        self.value
    }

    #[inline]
    pub fn prime(self) -> Prime {
        self.prime
    }

    #[inline]
    pub fn zero(prime: Prime) -> Fp {
        Fp { value: 0, prime }
    }

    #[inline]
    pub fn one(prime: Prime) -> Fp {
        Fp::new(1, prime)
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    /// Multiplicative inverse via Fermat exponentiation, x^(p-2).
    pub fn inv(self) -> Result<Fp, FieldError> {
        if self.value == 0 {
            return Err(FieldError::ZeroInverse);
        }
        let p = self.prime.get() as u64;
        let mut base = self.value as u64;
        let mut exp = p - 2;
        let mut acc = 1u64;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            exp >>= 1;
        }
        Ok(Fp { value: acc as u32, prime: self.prime })
    }

    #[inline]
    fn check_same(self, other: Fp) {
        assert_eq!(
            self.prime, other.prime,
            "field operation on mismatched moduli {} and {}",
            self.prime, other.prime
        );
    }
}

impl Add for Fp {
    type Output = Fp;
    #[inline]
    fn add(self, rhs: Fp) -> Fp {
        self.check_same(rhs);
        let p = self.prime.get();
        let mut v = self.value + rhs.value;
        if v >= p {
            v -= p;
        }
        Fp { value: v, prime: self.prime }
    }
}

impl Sub for Fp {
    type Output = Fp;
    #[inline]
    fn sub(self, rhs: Fp) -> Fp {
        self.check_same(rhs);
        let p = self.prime.get();
        let v = if self.value >= rhs.value {
            self.value - rhs.value
        } else {
            self.value + p - rhs.value
        };
        Fp { value: v, prime: self.prime }
    }
}

impl Mul for Fp {
    type Output = Fp;
    #[inline]
    fn mul(self, rhs: Fp) -> Fp {
        self.check_same(rhs);
        let p = self.prime.get() as u64;
        let v = (self.value as u64) * (rhs.value as u64) % p;
        Fp { value: v as u32, prime: self.prime }
    }
}

impl Neg for Fp {
    type Output = Fp;
    #[inline]
    fn neg(self) -> Fp {
        Fp::zero(self.prime) - self
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}
