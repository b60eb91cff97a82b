//! The decision procedures: sensitivity/equicontinuity for Frobenius LCA
//! (equivalently, linear HOCA) over any `Z_m`, the classical `n = 1`
//! criterion, and injectivity/surjectivity via the determinant.
//!
//! Sensitivity over composite `m` is decided factor by factor: the LCA is
//! conjugated to the product of its reductions modulo each prime power of
//! `m`, and it is sensitive iff some reduction is. Over a single `Z_{p^k}`
//! a Frobenius LCA is sensitive iff some bottom-row entry is a sensitive
//! polynomial.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::laurent::{DegreeSide, LaurentError, LaurentPoly};
use crate::lmatrix::{FrobeniusSpec, LaurentMatrix};
use crate::models::{lca_to_fps, LcaRule};
use crate::modring::{factorize, gcd, ModulusError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DecideError {
    #[error(transparent)]
    Modulus(#[from] ModulusError),
    #[error(transparent)]
    Laurent(#[from] LaurentError),
    #[error("modulus {m} is not {p}^{k}")]
    NotThePrimePower { m: u64, p: u64, k: u32 },
    #[error("a 1D rule needs an odd coefficient count, got {0}")]
    EvenCoefficientCount(usize),
}

/// The monomial certifying a sensitive factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Witness {
    /// Bottom-row index of the sensitive entry.
    pub row: usize,
    pub exponent: i64,
    pub coefficient: u64,
    pub side: DegreeSide,
}

impl Serialize for Witness {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Witness", 3)?;
        s.serialize_field("i", &self.row)?;
        s.serialize_field("monomial", &(self.exponent, self.coefficient))?;
        s.serialize_field("side", &self.side)?;
        s.end()
    }
}

/// Verdict for one prime-power factor of the modulus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FactorVerdict {
    pub p: u64,
    pub k: u32,
    pub sensitive: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

/// Sensitivity is the exact complement of equicontinuity for LCA, so one
/// verdict carries both, with per-factor evidence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SensitivityVerdict {
    pub sensitive: bool,
    pub equicontinuous: bool,
    pub factors: Vec<FactorVerdict>,
}

impl SensitivityVerdict {
    fn from_factors(factors: Vec<FactorVerdict>) -> Self {
        let sensitive = factors.iter().any(|f| f.sensitive);
        SensitivityVerdict {
            sensitive,
            equicontinuous: !sensitive,
            factors,
        }
    }
}

/// Sensitivity of a Frobenius LCA over `Z_{p^k}`: sensitive iff some
/// bottom-row entry has `deg+ > 0` or `deg- < 0` relative to `p`. The
/// witness is the lowest sensitive row index, preferring the `deg+` side.
pub fn decide_sensitivity_pk(
    spec: &FrobeniusSpec,
    p: u64,
    k: u32,
) -> Result<FactorVerdict, DecideError> {
    if p.checked_pow(k) != Some(spec.modulus()) {
        return Err(DecideError::NotThePrimePower {
            m: spec.modulus(),
            p,
            k,
        });
    }
    let mut witness = None;
    for (row, poly) in spec.row().iter().enumerate() {
        let report = poly.degrees(p)?;
        if let Some((exponent, coefficient)) = report.witness_plus {
            witness = Some(Witness {
                row,
                exponent,
                coefficient,
                side: DegreeSide::Plus,
            });
            break;
        }
        if let Some((exponent, coefficient)) = report.witness_minus {
            witness = Some(Witness {
                row,
                exponent,
                coefficient,
                side: DegreeSide::Minus,
            });
            break;
        }
    }
    Ok(FactorVerdict {
        p,
        k,
        sensitive: witness.is_some(),
        witness,
    })
}

/// Full sensitivity/equicontinuity verdict over arbitrary `m >= 2`: the
/// row is reduced modulo every prime power of `m` and the factor verdicts
/// are joined. Factor order is always by increasing prime, regardless of
/// how the factors were evaluated.
pub fn decide_sensitivity(spec: &FrobeniusSpec) -> SensitivityVerdict {
    let modulus = factorize(spec.modulus()).expect("spec modulus is >= 2");
    let factors = factor_verdicts(spec, modulus.factors());
    SensitivityVerdict::from_factors(factors)
}

#[cfg(feature = "parallel")]
fn factor_verdicts(
    spec: &FrobeniusSpec,
    factors: &[crate::modring::PrimePower],
) -> Vec<FactorVerdict> {
    use rayon::prelude::*;
    factors
        .par_iter()
        .map(|pp| factor_verdict(spec, pp.prime, pp.exponent))
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn factor_verdicts(
    spec: &FrobeniusSpec,
    factors: &[crate::modring::PrimePower],
) -> Vec<FactorVerdict> {
    factors
        .iter()
        .map(|pp| factor_verdict(spec, pp.prime, pp.exponent))
        .collect()
}

fn factor_verdict(spec: &FrobeniusSpec, p: u64, k: u32) -> FactorVerdict {
    let reduced = spec.reduce_mod(p.pow(k)).expect("prime power divides m");
    decide_sensitivity_pk(&reduced, p, k).expect("modulus is p^k by construction")
}

/// The classical one-dimensional criterion: a 1D LCA with coefficients
/// `m_-r ... m_r` is sensitive iff some prime of `m` does not divide the
/// gcd of the non-central coefficients. Computed independently of the
/// Frobenius route so the two can corroborate each other.
pub fn decide_1d(coeffs: &[u64], m: u64) -> Result<SensitivityVerdict, DecideError> {
    if coeffs.len().is_multiple_of(2) {
        return Err(DecideError::EvenCoefficientCount(coeffs.len()));
    }
    let modulus = factorize(m)?;
    let r = coeffs.len() / 2;
    // gcd of the empty set is 0, which every prime divides: a rule that
    // only reads its own cell is equicontinuous.
    let mut g = 0u64;
    for (idx, &c) in coeffs.iter().enumerate() {
        if idx != r {
            g = gcd(g, c % m);
        }
    }
    let factors = modulus
        .factors()
        .iter()
        .map(|pp| {
            let sensitive = !g.is_multiple_of(pp.prime);
            let witness = if sensitive {
                coeffs.iter().enumerate().find_map(|(idx, &c)| {
                    let pk = pp.value();
                    if idx != r && !c.is_multiple_of(pp.prime) {
                        Some(Witness {
                            row: 0,
                            exponent: r as i64 - idx as i64, // offset i carries X^(-i)
                            coefficient: c % pk,
                            side: if (idx as i64) < r as i64 {
                                DegreeSide::Plus
                            } else {
                                DegreeSide::Minus
                            },
                        })
                    } else {
                        None
                    }
                })
            } else {
                None
            };
            FactorVerdict {
                p: pp.prime,
                k: pp.exponent,
                sensitive,
                witness,
            }
        })
        .collect();
    Ok(SensitivityVerdict::from_factors(factors))
}

/// Per-prime evidence for the determinant test: how many determinant
/// coefficients are not divisible by the prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PrimeEvidence {
    pub p: u64,
    pub unit_coefficients: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InjSurjVerdict {
    pub injective: bool,
    pub surjective: bool,
    pub det: LaurentPoly,
    pub primes: Vec<PrimeEvidence>,
}

impl Serialize for InjSurjVerdict {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("InjSurjVerdict", 4)?;
        s.serialize_field("injective", &self.injective)?;
        s.serialize_field("surjective", &self.surjective)?;
        s.serialize_field("det", &self.det.to_pairs())?;
        s.serialize_field("primes", &self.primes)?;
        s.end()
    }
}

/// Injectivity and surjectivity of an LCA via the determinant of its
/// series, which is itself the series of a 1D LCA over `Z_m`. The 1D
/// criteria: surjective iff `gcd(m, coefficients) = 1`; injective iff for
/// every prime of `m` exactly one coefficient is not divisible by it.
pub fn decide_inj_surj(rule: &LcaRule) -> InjSurjVerdict {
    decide_inj_surj_matrix(&lca_to_fps(rule))
}

pub fn decide_inj_surj_matrix(matrix: &LaurentMatrix) -> InjSurjVerdict {
    let det = matrix.determinant();
    let m = matrix.modulus();
    let modulus = factorize(m).expect("matrix modulus is >= 2");
    let mut g = m;
    for (_, c) in det.terms() {
        g = gcd(g, c);
    }
    let surjective = g == 1;
    let primes: Vec<PrimeEvidence> = modulus
        .factors()
        .iter()
        .map(|pp| PrimeEvidence {
            p: pp.prime,
            unit_coefficients: det
                .terms()
                .filter(|&(_, c)| !c.is_multiple_of(pp.prime))
                .count(),
        })
        .collect();
    let injective = primes.iter().all(|e| e.unit_coefficients == 1);
    // For CA global rules injectivity implies surjectivity.
    debug_assert!(!injective || surjective);
    InjSurjVerdict {
        injective,
        surjective,
        det,
        primes,
    }
}
