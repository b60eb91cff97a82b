//! Sparse exact Laurent polynomials over `Z_m` and the degree calculus used
//! by the sensitivity decision: `deg+`/`deg-` relative to a prime, the
//! sensitive-polynomial predicate, and the hat/bar coefficient split.
//!
//! Canonical form: no stored coefficient is `0 mod m`, so equality is
//! structural. Exponents may be negative and can be huge (the worked
//! examples in this domain contain terms like `14X^123`), hence the sparse
//! map representation.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::Serialize;
use thiserror::Error;

use crate::modring::{self, is_prime};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LaurentError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("prime {prime} does not divide modulus {modulus}")]
    PrimeNotDividing { prime: u64, modulus: u64 },
    #[error("{q} does not divide modulus {modulus}")]
    NotADivisor { q: u64, modulus: u64 },
}

/// Which side of the degree calculus a statement refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DegreeSide {
    #[serde(rename = "deg+")]
    Plus,
    #[serde(rename = "deg-")]
    Minus,
}

/// `deg+` and `deg-` of a polynomial relative to a prime: the extremal
/// exponents among monomials whose coefficient is not a multiple of the
/// prime, with 0 standing in when no such monomial exists on that side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeReport {
    pub deg_plus: i64,
    pub deg_minus: i64,
    /// `(exponent, coefficient)` of the `deg+` monomial, present iff `deg_plus > 0`.
    pub witness_plus: Option<(i64, u64)>,
    /// `(exponent, coefficient)` of the `deg-` monomial, present iff `deg_minus < 0`.
    pub witness_minus: Option<(i64, u64)>,
}

/// A sparse Laurent polynomial over `Z_m`, in canonical form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    modulus: u64,
    terms: BTreeMap<i64, u64>,
}

impl LaurentPoly {
    pub fn zero(modulus: u64) -> Self {
        assert!(modulus >= 2, "modulus must be at least 2");
        LaurentPoly {
            modulus,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(modulus: u64) -> Self {
        Self::monomial(modulus, 0, 1)
    }

    pub fn constant(modulus: u64, c: i128) -> Self {
        Self::monomial(modulus, 0, modring::mod_reduce(c, modulus) as i128)
    }

    pub fn monomial(modulus: u64, exponent: i64, coefficient: i128) -> Self {
        let mut p = Self::zero(modulus);
        p.add_term(exponent, modring::mod_reduce(coefficient, modulus));
        p
    }

    pub fn from_pairs(modulus: u64, pairs: &[(i64, i128)]) -> Self {
        let mut p = Self::zero(modulus);
        for &(e, c) in pairs {
            p.add_term(e, modring::mod_reduce(c, modulus));
        }
        p
    }

    fn add_term(&mut self, exponent: i64, coefficient: u64) {
        debug_assert!(coefficient < self.modulus);
        if coefficient == 0 {
            return;
        }
        let entry = self.terms.entry(exponent).or_insert(0);
        *entry = (*entry + coefficient) % self.modulus;
        if *entry == 0 {
            self.terms.remove(&exponent);
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Coefficient of `X^exponent`, 0 if absent.
    pub fn coefficient(&self, exponent: i64) -> u64 {
        self.terms.get(&exponent).copied().unwrap_or(0)
    }

    /// Terms in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, u64)> + '_ {
        self.terms.iter().map(|(&e, &c)| (e, c))
    }

    /// `(min exponent, max exponent)` of the support, `None` for zero.
    pub fn support(&self) -> Option<(i64, i64)> {
        let min = self.terms.keys().next()?;
        let max = self.terms.keys().next_back()?;
        Some((*min, *max))
    }

    /// Canonical external form: `[exponent, coefficient]` pairs sorted by
    /// exponent.
    pub fn to_pairs(&self) -> Vec<(i64, u64)> {
        self.terms().collect()
    }

    pub fn scale(&self, c: u64) -> LaurentPoly {
        let c = c % self.modulus;
        let mut out = LaurentPoly::zero(self.modulus);
        for (e, a) in self.terms() {
            out.add_term(e, ((a as u128 * c as u128) % self.modulus as u128) as u64);
        }
        out
    }

    /// Multiplies by the monomial `X^shift`.
    pub fn shift(&self, shift: i64) -> LaurentPoly {
        let mut out = LaurentPoly::zero(self.modulus);
        for (e, a) in self.terms() {
            out.add_term(e.checked_add(shift).expect("exponent overflow"), a);
        }
        out
    }

    pub fn pow(&self, mut t: u32) -> LaurentPoly {
        let mut acc = LaurentPoly::one(self.modulus);
        let mut base = self.clone();
        while t > 0 {
            if t & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            t >>= 1;
        }
        acc
    }

    /// Reduces every coefficient modulo a divisor `q` of the modulus and
    /// re-canonicalizes over `Z_q`.
    pub fn reduce_mod(&self, q: u64) -> Result<LaurentPoly, LaurentError> {
        if q < 2 || !self.modulus.is_multiple_of(q) {
            return Err(LaurentError::NotADivisor {
                q,
                modulus: self.modulus,
            });
        }
        let mut out = LaurentPoly::zero(q);
        for (e, c) in self.terms() {
            out.add_term(e, c % q);
        }
        Ok(out)
    }

    fn check_prime(&self, prime: u64) -> Result<(), LaurentError> {
        if !is_prime(prime) {
            return Err(LaurentError::NotPrime(prime));
        }
        if !self.modulus.is_multiple_of(prime) {
            return Err(LaurentError::PrimeNotDividing {
                prime,
                modulus: self.modulus,
            });
        }
        Ok(())
    }

    /// `deg+`/`deg-` relative to `prime`: extremal exponents over monomials
    /// with positive (resp. negative) degree whose coefficient is not a
    /// multiple of `prime`; 0 when no monomial qualifies.
    pub fn degrees(&self, prime: u64) -> Result<DegreeReport, LaurentError> {
        self.check_prime(prime)?;
        let mut report = DegreeReport {
            deg_plus: 0,
            deg_minus: 0,
            witness_plus: None,
            witness_minus: None,
        };
        for (e, c) in self.terms() {
            if c.is_multiple_of(prime) {
                continue;
            }
            if e > report.deg_plus {
                report.deg_plus = e;
                report.witness_plus = Some((e, c));
            }
            if e < report.deg_minus {
                report.deg_minus = e;
                report.witness_minus = Some((e, c));
            }
        }
        Ok(report)
    }

    /// A polynomial is sensitive when `deg+ > 0` or `deg- < 0`.
    pub fn is_sensitive(&self, prime: u64) -> Result<bool, LaurentError> {
        let d = self.degrees(prime)?;
        Ok(d.deg_plus > 0 || d.deg_minus < 0)
    }

    /// Splits into `(hat, bar)`: hat keeps the monomials whose coefficient
    /// is not a multiple of `prime`, bar is the removed remainder.
    pub fn hat_bar(&self, prime: u64) -> Result<(LaurentPoly, LaurentPoly), LaurentError> {
        self.check_prime(prime)?;
        let mut hat = LaurentPoly::zero(self.modulus);
        let mut bar = LaurentPoly::zero(self.modulus);
        for (e, c) in self.terms() {
            if c.is_multiple_of(prime) {
                bar.add_term(e, c);
            } else {
                hat.add_term(e, c);
            }
        }
        Ok((hat, bar))
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;

    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        assert_eq!(self.modulus, rhs.modulus, "modulus mismatch");
        let mut out = self.clone();
        for (e, c) in rhs.terms() {
            out.add_term(e, c);
        }
        out
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;

    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self + &-rhs
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;

    fn neg(self) -> LaurentPoly {
        let mut out = LaurentPoly::zero(self.modulus);
        for (e, c) in self.terms() {
            out.add_term(e, self.modulus - c);
        }
        out
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;

    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        assert_eq!(self.modulus, rhs.modulus, "modulus mismatch");
        let m = self.modulus as u128;
        let mut out = LaurentPoly::zero(self.modulus);
        for (ea, ca) in self.terms() {
            for (eb, cb) in rhs.terms() {
                let e = ea.checked_add(eb).expect("exponent overflow");
                out.add_term(e, ((ca as u128 * cb as u128) % m) as u64);
            }
        }
        out
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms() {
            if !first {
                write!(f, "+")?;
            }
            first = false;
            match e {
                0 => write!(f, "{c}")?,
                1 if c == 1 => write!(f, "X")?,
                1 => write!(f, "{c}X")?,
                _ if c == 1 => write!(f, "X^{e}")?,
                _ => write!(f, "{c}X^{e}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} mod {}]", self, self.modulus)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p8() -> LaurentPoly {
        // The running Z_8 example: 4X^-4 + 3X^-3 + 3 + 7X^2 + 6X^5.
        LaurentPoly::from_pairs(8, &[(-4, 4), (-3, 3), (0, 3), (2, 7), (5, 6)])
    }

    #[test]
    fn add_cancels_in_characteristic_two() {
        let p = LaurentPoly::from_pairs(2, &[(1, 1), (0, 1)]);
        assert!((&p + &p).is_zero());
    }

    #[test]
    fn add_cancels_mod_eight() {
        let a = LaurentPoly::monomial(8, -3, 3);
        let b = LaurentPoly::monomial(8, -3, 5);
        assert!((&a + &b).is_zero());
    }

    #[test]
    fn add_disjoint_supports() {
        let a = LaurentPoly::monomial(4, 2, 1);
        let b = LaurentPoly::monomial(4, -1, 1);
        let sum = &a + &b;
        assert_eq!(sum.to_pairs(), vec![(-1, 1), (2, 1)]);
    }

    #[test]
    fn mul_reduces_coefficients() {
        let a = LaurentPoly::monomial(49, 3, 8);
        assert_eq!(&a * &a, LaurentPoly::monomial(49, 6, 15));
    }

    #[test]
    fn mul_identity() {
        let p = p8();
        assert_eq!(&LaurentPoly::one(8) * &p, p);
    }

    #[test]
    fn mul_nilpotent_coefficient() {
        let a = LaurentPoly::monomial(4, 1, 2);
        assert!((&a * &a).is_zero());
    }

    #[should_panic(expected = "modulus mismatch")]
    #[test]
    fn mixed_moduli_are_rejected() {
        let _ = &LaurentPoly::one(4) + &LaurentPoly::one(8);
    }

    #[test]
    fn degrees_of_z8_example() {
        let d = p8().degrees(2).unwrap();
        assert_eq!(d.deg_plus, 2);
        assert_eq!(d.deg_minus, -3);
        assert_eq!(d.witness_plus, Some((2, 7)));
        assert_eq!(d.witness_minus, Some((-3, 3)));
    }

    #[test]
    fn degrees_of_z49_example() {
        let p = LaurentPoly::from_pairs(49, &[(-2, 1), (0, 1), (1, 1), (8, 2), (123, 14)]);
        let d = p.degrees(7).unwrap();
        assert_eq!(d.deg_plus, 8);
        assert_eq!(d.deg_minus, -2);
    }

    #[test]
    fn degrees_of_constant() {
        let d = LaurentPoly::constant(8, 5).degrees(2).unwrap();
        assert_eq!((d.deg_plus, d.deg_minus), (0, 0));
        assert!(d.witness_plus.is_none() && d.witness_minus.is_none());
    }

    #[test]
    fn degrees_rejects_bad_primes() {
        let p = p8();
        assert_eq!(
            p.degrees(3),
            Err(LaurentError::PrimeNotDividing {
                prime: 3,
                modulus: 8
            })
        );
        assert_eq!(p.degrees(4), Err(LaurentError::NotPrime(4)));
    }

    #[test]
    fn sensitivity_examples() {
        assert!(p8().is_sensitive(2).unwrap());
        assert!(!LaurentPoly::monomial(49, -35, 7).is_sensitive(7).unwrap());
        assert!(!LaurentPoly::constant(8, 3).is_sensitive(2).unwrap());
    }

    #[test]
    fn hat_bar_of_z8_example() {
        let (hat, bar) = p8().hat_bar(2).unwrap();
        assert_eq!(hat.to_pairs(), vec![(-3, 3), (0, 3), (2, 7)]);
        assert_eq!(bar.to_pairs(), vec![(-4, 4), (5, 6)]);
    }

    #[test]
    fn hat_bar_of_zero() {
        let (hat, bar) = LaurentPoly::zero(8).hat_bar(2).unwrap();
        assert!(hat.is_zero() && bar.is_zero());
    }

    #[test]
    fn hat_bar_all_multiples() {
        let p = LaurentPoly::monomial(49, 123, 14);
        let (hat, bar) = p.hat_bar(7).unwrap();
        assert!(hat.is_zero());
        assert_eq!(bar, p);
    }

    #[test]
    fn reduce_mod_examples() {
        let p = LaurentPoly::monomial(12, 3, 8);
        assert!(p.reduce_mod(4).unwrap().is_zero());
        assert_eq!(p.reduce_mod(3).unwrap(), LaurentPoly::monomial(3, 3, 2));
        assert_eq!(p.reduce_mod(12).unwrap(), p);
        assert_eq!(
            p.reduce_mod(5),
            Err(LaurentError::NotADivisor { q: 5, modulus: 12 })
        );
    }

    #[test]
    fn display_form() {
        assert_eq!(p8().to_string(), "4X^-4+3X^-3+3+7X^2+6X^5");
        assert_eq!(LaurentPoly::zero(2).to_string(), "0");
    }

    fn arb_poly(m: u64) -> impl Strategy<Value = LaurentPoly> {
        proptest::collection::vec((-30i64..30, 0i128..m as i128), 0..8)
            .prop_map(move |pairs| LaurentPoly::from_pairs(m, &pairs))
    }

    proptest! {
        #[test]
        fn ring_laws(a in arb_poly(12), b in arb_poly(12), c in arb_poly(12)) {
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a + &LaurentPoly::zero(12), a.clone());
            prop_assert_eq!(&a * &LaurentPoly::one(12), a.clone());
            prop_assert_eq!(&a + &-&a, LaurentPoly::zero(12));
        }

        #[test]
        fn degrees_ignore_prime_multiples(a in arb_poly(8), e in -30i64..30, scale in 1u64..4) {
            let before = a.degrees(2).unwrap();
            let bumped = &a + &LaurentPoly::monomial(8, e, (2 * scale) as i128);
            let after = bumped.degrees(2).unwrap();
            prop_assert_eq!(before.deg_plus, after.deg_plus);
            prop_assert_eq!(before.deg_minus, after.deg_minus);
        }

        #[test]
        fn hat_bar_splits_exactly(a in arb_poly(8)) {
            let (hat, bar) = a.hat_bar(2).unwrap();
            prop_assert!(hat.terms().all(|(_, c)| c % 2 != 0));
            prop_assert!(bar.terms().all(|(_, c)| c % 2 == 0));
            prop_assert_eq!(&hat + &bar, a.clone());
            prop_assert_eq!(a.is_sensitive(2).unwrap(), hat.is_sensitive(2).unwrap());
        }

        #[test]
        fn reduce_mod_commutes(a in arb_poly(12), b in arb_poly(12)) {
            for q in [2u64, 3, 4, 6] {
                prop_assert_eq!(
                    (&a + &b).reduce_mod(q).unwrap(),
                    &a.reduce_mod(q).unwrap() + &b.reduce_mod(q).unwrap()
                );
                prop_assert_eq!(
                    (&a * &b).reduce_mod(q).unwrap(),
                    &a.reduce_mod(q).unwrap() * &b.reduce_mod(q).unwrap()
                );
            }
        }
    }
}
