//! Modular-integer arithmetic over `Z_m` and prime-power factorization.
//!
//! The alphabet modulus `m` in this domain is small (a machine word is
//! plenty), so factorization is plain trial division, cross-checked by a
//! deterministic Miller-Rabin primality test.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModulusError {
    #[error("modulus must be at least 2, got {0}")]
    TooSmall(u64),
}

/// One `p^k` factor of a modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PrimePower {
    pub prime: u64,
    pub exponent: u32,
}

impl PrimePower {
    pub fn value(&self) -> u64 {
        self.prime.pow(self.exponent)
    }
}

/// A modulus `m >= 2` together with its complete prime factorization,
/// primes strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Modulus {
    m: u64,
    factors: Vec<PrimePower>,
}

impl Modulus {
    pub fn value(&self) -> u64 {
        self.m
    }

    pub fn factors(&self) -> &[PrimePower] {
        &self.factors
    }

    pub fn is_prime_power(&self) -> bool {
        self.factors.len() == 1
    }
}

/// Factorizes `m >= 2` by trial division.
pub fn factorize(m: u64) -> Result<Modulus, ModulusError> {
    if m < 2 {
        return Err(ModulusError::TooSmall(m));
    }
    let mut rest = m;
    let mut factors = Vec::new();
    let mut d = 2u64;
    while d * d <= rest {
        if rest.is_multiple_of(d) {
            let mut exponent = 0u32;
            while rest.is_multiple_of(d) {
                rest /= d;
                exponent += 1;
            }
            factors.push(PrimePower { prime: d, exponent });
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        factors.push(PrimePower {
            prime: rest,
            exponent: 1,
        });
    }
    debug_assert!(factors.iter().all(|f| is_prime(f.prime)));
    debug_assert_eq!(factors.iter().map(PrimePower::value).product::<u64>(), m);
    Ok(Modulus { m, factors })
}

/// Canonical non-negative residue of `x` modulo `m`.
pub fn mod_reduce(x: i128, m: u64) -> u64 {
    debug_assert!(m >= 2);
    x.rem_euclid(m as i128) as u64
}

pub fn gcd(a: u64, b: u64) -> u64 {
    num_integer::gcd(a, b)
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for `u64` (the witness set below is exact for
/// all 64-bit inputs).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}
