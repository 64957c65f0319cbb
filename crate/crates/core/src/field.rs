use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// The prime field `GF(p)`. Residues are stored as `u32` in `0..p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct PrimeField {
    p: u32,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// If `r = p^m` with `m ≥ 0`, returns `m`.
pub fn prime_power_exponent(r: u64, p: u64) -> Option<u32> {
    if r == 0 || p < 2 {
        return None;
    }
    let (mut r, mut m) = (r, 0);
    while r % p == 0 {
        r /= p;
        m += 1;
    }
    (r == 1).then_some(m)
}

/// Splits `r` into `(a, m)` with `r = a^m`, `a` prime, if possible.
pub fn as_prime_power(r: u64) -> Option<(u64, u32)> {
    (2..=r)
        .find(|d| r.is_multiple_of(*d))
        .and_then(|a| prime_power_exponent(r, a).map(|m| (a, m)))
}

impl PrimeField {
    pub fn new(p: u32) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(invalid(format!("{p} is not prime")));
        }
        if p >= 1 << 31 {
            return Err(invalid(format!("prime {p} too large (must be < 2^31)")));
        }
        Ok(PrimeField { p })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    /// Multiplicative inverse; `a` must be non-zero.
    pub fn inv(&self, a: u32) -> u32 {
        debug_assert!(a != 0, "inverse of zero");
        self.pow(a, self.p - 2)
    }

    pub fn pow(&self, mut base: u32, mut exp: u32) -> u32 {
        let mut acc = 1 % self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    pub fn from_i64(&self, v: i64) -> u32 {
        v.rem_euclid(self.p as i64) as u32
    }

    /// Residue of a sign `±1`.
    #[inline]
    pub fn sign(&self, s: i8) -> u32 {
        if s >= 0 {
            1 % self.p
        } else {
            self.p - 1
        }
    }
}

impl TryFrom<u32> for PrimeField {
    type Error = crate::Error;
    fn try_from(p: u32) -> Result<Self> {
        PrimeField::new(p)
    }
}

impl From<PrimeField> for u32 {
    fn from(f: PrimeField) -> u32 {
        f.p
    }
}
