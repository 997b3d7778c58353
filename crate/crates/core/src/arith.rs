//! Powers of a fixed prime, the value type of `q_w`, `q_{v,w}` and `μ`.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Pow};
use serde::{Deserialize, Serialize};

/// `p^exp` for a fixed prime `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PPow {
    pub p: u64,
    pub exp: u64,
}

impl PPow {
    pub fn one(p: u64) -> PPow {
        PPow { p, exp: 0 }
    }

    pub fn is_one(&self) -> bool {
        self.exp == 0
    }

    pub fn value(&self) -> BigUint {
        BigUint::from(self.p).pow(self.exp)
    }

    pub fn divides(&self, other: &PPow) -> bool {
        debug_assert_eq!(self.p, other.p);
        self.exp <= other.exp
    }

    pub fn mul(&self, other: &PPow) -> PPow {
        debug_assert_eq!(self.p, other.p);
        PPow { p: self.p, exp: self.exp + other.exp }
    }

    /// `self / other` as a signed power.
    pub fn ratio(&self, other: &PPow) -> PRat {
        PRat { p: self.p, exp: self.exp as i64 - other.exp as i64 }
    }
}

impl fmt::Display for PPow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

/// `p^exp` with a signed exponent, an exact positive rational.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PRat {
    pub p: u64,
    pub exp: i64,
}

impl PRat {
    pub fn is_one(&self) -> bool {
        self.exp == 0
    }

    pub fn mul(&self, other: &PRat) -> PRat {
        debug_assert_eq!(self.p, other.p);
        PRat { p: self.p, exp: self.exp + other.exp }
    }

    pub fn to_rational(&self) -> BigRational {
        let pw = BigInt::from(self.p).pow(self.exp.unsigned_abs());
        if self.exp >= 0 {
            BigRational::from_integer(pw)
        } else {
            BigRational::new(BigInt::one(), pw)
        }
    }
}

impl fmt::Display for PRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_rational())
    }
}

/// Renders `p^exp` as a power of `q = p^e` when possible, e.g. `q^3`.
pub fn as_q_power(exp: i64, e: u32) -> String {
    if exp == 0 {
        return "1".to_string();
    }
    if exp % e as i64 == 0 {
        let k = exp / e as i64;
        if k == 1 {
            "q".to_string()
        } else {
            format!("q^{k}")
        }
    } else {
        format!("p^{exp}")
    }
}
