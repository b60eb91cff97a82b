//! Independent brute-force verification for the decision procedures: a
//! census of matrix powers (cycle vs degree growth), the non-vanishing
//! recurrence behind the sensitivity proof, monomial-degree checks on
//! corner sequences, and finite-period linear maps for the determinant
//! criteria.
//!
//! The oracle never decides: a run that exhausts its budget reports
//! `Inconclusive` rather than guessing.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::One;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::laurent::{DegreeSide, LaurentError};
use crate::lmatrix::{FrobeniusSpec, LaurentMatrix};
use crate::models::LcaRule;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error(transparent)]
    Laurent(#[from] LaurentError),
    #[error("alpha {0} must lie in [1, p^k) and be coprime to p")]
    BadAlpha(u64),
    #[error("lags must be strictly increasing positive integers")]
    BadLags,
    #[error("alphas and lags must have equal nonzero length")]
    LengthMismatch,
    #[error("spec is not hat-pure for prime {0}")]
    NotHatPure(u64),
}

/// Outcome of a power census.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "lowercase")]
pub enum CensusOutcome {
    /// `M^q = M^(q+period)` exactly; the power set is finite.
    Cycle { q: usize, period: usize },
    /// Degree extent exceeded the threshold; `samples` records `(t, extent)`
    /// at each new maximum.
    Growth { samples: Vec<(usize, u64)> },
    /// Budget exhausted without either signal.
    Inconclusive {
        max_steps: usize,
        growth_threshold: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PowerCensus {
    #[serde(flatten)]
    pub outcome: CensusOutcome,
    pub powers_examined: usize,
}

/// Exponent range of a power, unioned with 0 so that drifting monomials
/// (pure shifts) register growth too.
fn degree_extent(matrix: &LaurentMatrix) -> u64 {
    let (lo, hi) = matrix.degree_span();
    (hi.max(0) - lo.min(0)) as u64
}

/// Walks `M^0, M^1, ...` storing each power in a membership structure
/// (full equality on the canonical form, no hashing shortcuts). Returns
/// `Cycle` on the first repeated power, `Growth` once the degree extent
/// exceeds `growth_threshold`, and `Inconclusive` when `max_steps` powers
/// were examined without either.
pub fn power_census(
    matrix: &LaurentMatrix,
    max_steps: usize,
    growth_threshold: u64,
) -> PowerCensus {
    let mut seen: HashMap<LaurentMatrix, usize> = HashMap::new();
    let mut samples: Vec<(usize, u64)> = Vec::new();
    let mut best = 0u64;
    let mut powers = matrix.powers();
    let identity = powers.next().expect("powers start at M^0");
    seen.insert(identity, 0);
    for (t, power) in powers.enumerate().take(max_steps) {
        let t = t + 1;
        if let Some(&q) = seen.get(&power) {
            return PowerCensus {
                outcome: CensusOutcome::Cycle { q, period: t - q },
                powers_examined: t,
            };
        }
        let extent = degree_extent(&power);
        if extent > best {
            best = extent;
            samples.push((t, extent));
        }
        if extent > growth_threshold {
            return PowerCensus {
                outcome: CensusOutcome::Growth { samples },
                powers_examined: t,
            };
        }
        seen.insert(power, t);
    }
    PowerCensus {
        outcome: CensusOutcome::Inconclusive {
            max_steps,
            growth_threshold,
        },
        powers_examined: max_steps,
    }
}

/// Sequential census over a batch of matrices.
pub fn census_batch_seq(
    matrices: &[LaurentMatrix],
    max_steps: usize,
    growth_threshold: u64,
) -> Vec<PowerCensus> {
    matrices
        .iter()
        .map(|m| power_census(m, max_steps, growth_threshold))
        .collect()
}

/// Data-parallel census over a batch of matrices; outcome order matches
/// the input order, so results are identical to the sequential run.
#[cfg(feature = "parallel")]
pub fn census_batch_par(
    matrices: &[LaurentMatrix],
    max_steps: usize,
    growth_threshold: u64,
) -> Vec<PowerCensus> {
    use rayon::prelude::*;
    matrices
        .par_iter()
        .map(|m| power_census(m, max_steps, growth_threshold))
        .collect()
}

/// Batch census using the parallel path when the `parallel` feature is
/// enabled, the sequential fallback otherwise.
pub fn census_batch(
    matrices: &[LaurentMatrix],
    max_steps: usize,
    growth_threshold: u64,
) -> Vec<PowerCensus> {
    #[cfg(feature = "parallel")]
    {
        census_batch_par(matrices, max_steps, growth_threshold)
    }
    #[cfg(not(feature = "parallel"))]
    {
        census_batch_seq(matrices, max_steps, growth_threshold)
    }
}

/// Positions `l <= horizon` where the lagged recurrence
/// `b_l = a_1 b_(l-l_1) + ... + a_h b_(l-l_h)` over `Z_{p^k}` (with
/// `b_0 = 1`, `b_(<0) = 0`) is nonzero modulo `p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DensityReport {
    pub horizon: usize,
    pub nonzero_positions: Vec<usize>,
}

pub fn recurrence_nonvanishing(
    alphas: &[u64],
    lags: &[usize],
    p: u64,
    k: u32,
    horizon: usize,
) -> Result<DensityReport, OracleError> {
    if alphas.is_empty() || alphas.len() != lags.len() {
        return Err(OracleError::LengthMismatch);
    }
    if lags[0] == 0 || lags.windows(2).any(|w| w[0] >= w[1]) {
        return Err(OracleError::BadLags);
    }
    let pk = p.pow(k);
    for &a in alphas {
        if a == 0 || a >= pk || a.is_multiple_of(p) {
            return Err(OracleError::BadAlpha(a));
        }
    }
    let mut b = vec![0u64; horizon + 1];
    b[0] = 1;
    for l in 1..=horizon {
        let mut acc: u128 = 0;
        for (&a, &lag) in alphas.iter().zip(lags) {
            if l >= lag {
                acc += a as u128 * b[l - lag] as u128;
            }
        }
        b[l] = (acc % pk as u128) as u64;
    }
    Ok(DensityReport {
        horizon,
        nonzero_positions: (0..=horizon).filter(|&l| !b[l].is_multiple_of(p)).collect(),
    })
}

/// Checks the monomial law on a corner sequence: for a hat-pure spec
/// (expected to be a U or L extraction), every `u^(t)` up to `horizon`
/// must be null or a single monomial of degree exactly `t * d` (exact
/// rational arithmetic; a fractional `t * d` forces null), and when the
/// speed is nonzero some `t` in `[horizon/2, horizon]` must carry a
/// coefficient coprime to `prime`.
pub fn monomial_check(
    spec: &FrobeniusSpec,
    prime: u64,
    side: DegreeSide,
    horizon: usize,
) -> Result<bool, OracleError> {
    if !spec.is_hat_pure(prime)? {
        return Err(OracleError::NotHatPure(prime));
    }
    let table = spec.speed_table(prime)?;
    let speed = match side {
        DegreeSide::Plus => table.d_plus,
        DegreeSide::Minus => table.d_minus,
    };
    let seq = spec.corner_sequence(horizon);
    for (t, value) in seq.iter().enumerate() {
        if value.is_zero() {
            continue;
        }
        if value.term_count() != 1 {
            return Ok(false);
        }
        let (exponent, _) = value.terms().next().expect("nonzero");
        if Ratio::from_integer(exponent) != Ratio::from_integer(t as i64) * speed {
            return Ok(false);
        }
    }
    let moving = match side {
        DegreeSide::Plus => speed > Ratio::from_integer(0),
        DegreeSide::Minus => speed < Ratio::from_integer(0),
    };
    if moving {
        let witnessed = (horizon / 2..=horizon).any(|t| {
            seq[t]
                .terms()
                .next()
                .is_some_and(|(_, c)| !c.is_multiple_of(prime))
        });
        if !witnessed {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The finite linear endomorphism induced by wrapping the rule's
/// neighbourhood modulo a spatial period `L`, with its kernel and image
/// sizes over `Z_m` computed from the Smith normal form of the integer
/// lift.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodicMapReport {
    pub period: usize,
    pub injective: bool,
    pub surjective: bool,
    pub kernel_size: BigUint,
    pub image_size: BigUint,
}

impl Serialize for PeriodicMapReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("PeriodicMapReport", 5)?;
        s.serialize_field("period", &self.period)?;
        s.serialize_field("injective", &self.injective)?;
        s.serialize_field("surjective", &self.surjective)?;
        s.serialize_field("kernel_size", &self.kernel_size.to_string())?;
        s.serialize_field("image_size", &self.image_size.to_string())?;
        s.end()
    }
}

pub fn periodic_map(rule: &LcaRule, period: usize) -> PeriodicMapReport {
    assert!(period >= 1);
    let n = rule.n;
    let size = n * period;
    let r = rule.radius as i64;
    // Block-circulant integer lift: output block i reads input block
    // (i + u) mod L through M_u.
    let mut lift = vec![vec![0i64; size]; size];
    for block in 0..period {
        for u in -r..=r {
            let target = (block as i64 + u).rem_euclid(period as i64) as usize;
            for row in 0..n {
                for col in 0..n {
                    lift[block * n + row][target * n + col] +=
                        rule.matrix_entry(u, row, col) as i64;
                }
            }
        }
    }
    let diagonal = smith_diagonal(lift);
    let m = BigUint::from(rule.m);
    let mut kernel_size = BigUint::one();
    for d in &diagonal {
        kernel_size *= gcd_big(d, &m);
    }
    let total = m.pow(size as u32);
    let image_size = &total / &kernel_size;
    PeriodicMapReport {
        period,
        injective: kernel_size.is_one(),
        surjective: image_size == total,
        kernel_size,
        image_size,
    }
}

fn gcd_big(d: &num_bigint::BigInt, m: &BigUint) -> BigUint {
    use num_traits::Zero;
    if d.is_zero() {
        return m.clone();
    }
    let mut a = d.magnitude().clone();
    let mut b = m.clone();
    while !b.is_zero() {
        let r = &a % &b;
        a = b;
        b = r;
    }
    a
}

/// Diagonalizes an integer matrix by unimodular row/column operations and
/// returns the full main diagonal (zeros included). Exact arithmetic; the
/// matrices here are small, so coefficient growth is handled with big
/// integers rather than bounds.
fn smith_diagonal(lift: Vec<Vec<i64>>) -> Vec<num_bigint::BigInt> {
    use num_bigint::BigInt;
    use num_traits::{Signed, Zero};

    let rows = lift.len();
    let cols = if rows == 0 { 0 } else { lift[0].len() };
    let mut a: Vec<Vec<BigInt>> = lift
        .into_iter()
        .map(|row| row.into_iter().map(BigInt::from).collect())
        .collect();
    let steps = rows.min(cols);
    for t in 0..steps {
        loop {
            // Smallest nonzero entry in the remaining block becomes the pivot.
            let mut pivot: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if !a[i][j].is_zero()
                        && pivot
                            .map(|(pi, pj)| a[i][j].abs() < a[pi][pj].abs())
                            .unwrap_or(true)
                    {
                        pivot = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = pivot else {
                return (0..steps).map(|i| a[i][i].clone()).collect();
            };
            a.swap(t, pi);
            for row in &mut a {
                row.swap(t, pj);
            }
            let mut clean = true;
            for i in t + 1..rows {
                if !a[i][t].is_zero() {
                    let q = &a[i][t] / &a[t][t];
                    for j in t..cols {
                        let v = &a[i][j] - &q * &a[t][j];
                        a[i][j] = v;
                    }
                    if !a[i][t].is_zero() {
                        clean = false;
                    }
                }
            }
            for j in t + 1..cols {
                if !a[t][j].is_zero() {
                    let q = &a[t][j] / &a[t][t];
                    for i in t..rows {
                        let v = &a[i][j] - &q * &a[i][t];
                        a[i][j] = v;
                    }
                    if !a[t][j].is_zero() {
                        clean = false;
                    }
                }
            }
            if clean {
                break;
            }
        }
    }
    (0..steps).map(|i| a[i][i].clone()).collect()
}

/// For `1 <= a < p^k` coprime to `p` and any `b >= 0`,
/// `(a + p*b) mod p^k != 0`: adding a multiple of `p` to a unit-residue
/// never cancels it. The sensitivity argument leans on this.
pub fn unit_plus_multiple_nonzero(p: u64, k: u32, a: u64, b: u64) -> bool {
    debug_assert!(a >= 1 && a < p.pow(k) && !a.is_multiple_of(p));
    !(a as u128 + p as u128 * b as u128).is_multiple_of(p.pow(k) as u128)
}
