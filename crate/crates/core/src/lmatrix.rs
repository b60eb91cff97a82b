//! Matrices over `Z_m[X, X^-1]`: companion (Frobenius) form, the speed
//! table `d_i = deg/(n-i)`, U/L extraction, the hat/bar split on the bottom
//! row, powers, determinant, and the corner-entry recurrence.

use std::collections::HashMap;
use std::fmt;
use std::ops::Mul;

use num_rational::Ratio;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::laurent::{DegreeReport, LaurentError, LaurentPoly};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatrixError {
    #[error(transparent)]
    Laurent(#[from] LaurentError),
    #[error("row has {got} entries, expected {expected}")]
    RowLength { got: usize, expected: usize },
    #[error("entry modulus {got} does not match {expected}")]
    MixedModuli { got: u64, expected: u64 },
    #[error("dimension must be at least 1")]
    EmptyDimension,
}

/// An `n x n` matrix over `Z_m[X, X^-1]`, row-major, all entries sharing
/// the modulus.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LaurentMatrix {
    n: usize,
    modulus: u64,
    entries: Vec<LaurentPoly>,
}

impl LaurentMatrix {
    pub fn zero(n: usize, modulus: u64) -> Self {
        assert!(n >= 1, "dimension must be at least 1");
        LaurentMatrix {
            n,
            modulus,
            entries: vec![LaurentPoly::zero(modulus); n * n],
        }
    }

    pub fn identity(n: usize, modulus: u64) -> Self {
        let mut m = Self::zero(n, modulus);
        for i in 0..n {
            m.set(i, i, LaurentPoly::one(modulus));
        }
        m
    }

    pub fn from_rows(modulus: u64, rows: Vec<Vec<LaurentPoly>>) -> Result<Self, MatrixError> {
        let n = rows.len();
        if n == 0 {
            return Err(MatrixError::EmptyDimension);
        }
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(MatrixError::RowLength {
                    got: row.len(),
                    expected: n,
                });
            }
            for p in row {
                if p.modulus() != modulus {
                    return Err(MatrixError::MixedModuli {
                        got: p.modulus(),
                        expected: modulus,
                    });
                }
                entries.push(p);
            }
        }
        Ok(LaurentMatrix {
            n,
            modulus,
            entries,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Entry at `row`, `col` (0-based).
    pub fn entry(&self, row: usize, col: usize) -> &LaurentPoly {
        &self.entries[row * self.n + col]
    }

    pub fn set(&mut self, row: usize, col: usize, p: LaurentPoly) {
        assert_eq!(p.modulus(), self.modulus, "modulus mismatch");
        self.entries[row * self.n + col] = p;
    }

    pub fn entries(&self) -> impl Iterator<Item = &LaurentPoly> {
        self.entries.iter()
    }

    pub fn transpose(&self) -> LaurentMatrix {
        let mut out = Self::zero(self.n, self.modulus);
        for i in 0..self.n {
            for j in 0..self.n {
                out.set(j, i, self.entry(i, j).clone());
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(LaurentPoly::is_zero)
    }

    /// Binary powering; `t = 0` yields the identity.
    pub fn pow(&self, mut t: u64) -> LaurentMatrix {
        let mut acc = Self::identity(self.n, self.modulus);
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

    /// Iterator over the full power trajectory `M^0, M^1, M^2, ...` by
    /// iterated multiplication, with a cheap companion step when the matrix
    /// is in Frobenius form.
    pub fn powers(&self) -> Powers<'_> {
        Powers {
            base: self,
            row: self.frobenius_row(),
            current: Some(Self::identity(self.n, self.modulus)),
        }
    }

    /// Extremal exponents over all stored terms, `(0, 0)` for a matrix with
    /// no terms at all.
    pub fn degree_span(&self) -> (i64, i64) {
        let mut span: Option<(i64, i64)> = None;
        for p in &self.entries {
            if let Some((lo, hi)) = p.support() {
                span = Some(match span {
                    None => (lo, hi),
                    Some((a, b)) => (a.min(lo), b.max(hi)),
                });
            }
        }
        span.unwrap_or((0, 0))
    }

    /// Whether the matrix has the companion shape: superdiagonal ones, an
    /// arbitrary bottom row, zeros elsewhere. Any 1x1 matrix qualifies.
    pub fn is_frobenius(&self) -> bool {
        self.frobenius_row().is_some()
    }

    /// The bottom row when the matrix is in Frobenius form.
    pub fn frobenius_row(&self) -> Option<FrobeniusSpec> {
        let n = self.n;
        for i in 0..n.saturating_sub(1) {
            for j in 0..n {
                let e = self.entry(i, j);
                if j == i + 1 {
                    if *e != LaurentPoly::one(self.modulus) {
                        return None;
                    }
                } else if !e.is_zero() {
                    return None;
                }
            }
        }
        let row = (0..n).map(|j| self.entry(n - 1, j).clone()).collect();
        Some(FrobeniusSpec {
            n,
            modulus: self.modulus,
            row,
        })
    }

    /// Exact determinant by Laplace expansion, memoized on column subsets.
    /// Avoids division, which `Z_m` lacks; fine for the small `n` of this
    /// domain.
    pub fn determinant(&self) -> LaurentPoly {
        assert!(self.n <= 24, "determinant limited to small dimensions");
        let full: u32 = if self.n == 32 {
            u32::MAX
        } else {
            (1 << self.n) - 1
        };
        let mut memo: HashMap<u32, LaurentPoly> = HashMap::new();
        memo.insert(full, LaurentPoly::one(self.modulus));
        self.det_rec(0, &mut memo)
    }

    fn det_rec(&self, used: u32, memo: &mut HashMap<u32, LaurentPoly>) -> LaurentPoly {
        if let Some(hit) = memo.get(&used) {
            return hit.clone();
        }
        let row = used.count_ones() as usize;
        let mut acc = LaurentPoly::zero(self.modulus);
        let mut parity = 0u32;
        for col in 0..self.n {
            if used & (1 << col) != 0 {
                continue;
            }
            let a = self.entry(row, col);
            if !a.is_zero() {
                let sub = self.det_rec(used | (1 << col), memo);
                let term = a * &sub;
                acc = if parity.is_multiple_of(2) {
                    &acc + &term
                } else {
                    &acc - &term
                };
            }
            parity += 1;
        }
        memo.insert(used, acc.clone());
        acc
    }
}

impl Mul for &LaurentMatrix {
    type Output = LaurentMatrix;

    fn mul(self, rhs: &LaurentMatrix) -> LaurentMatrix {
        assert_eq!(self.n, rhs.n, "shape mismatch");
        assert_eq!(self.modulus, rhs.modulus, "modulus mismatch");
        let mut out = LaurentMatrix::zero(self.n, self.modulus);
        for i in 0..self.n {
            for j in 0..self.n {
                let mut acc = LaurentPoly::zero(self.modulus);
                for k in 0..self.n {
                    let a = self.entry(i, k);
                    if a.is_zero() {
                        continue;
                    }
                    acc = &acc + &(a * rhs.entry(k, j));
                }
                out.set(i, j, acc);
            }
        }
        out
    }
}

impl fmt::Debug for LaurentMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "LaurentMatrix(n={}, m={})", self.n, self.modulus)?;
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| self.entry(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

pub struct Powers<'a> {
    base: &'a LaurentMatrix,
    row: Option<FrobeniusSpec>,
    current: Option<LaurentMatrix>,
}

impl Iterator for Powers<'_> {
    type Item = LaurentMatrix;

    fn next(&mut self) -> Option<LaurentMatrix> {
        let current = self.current.take()?;
        self.current = Some(match &self.row {
            Some(spec) => spec.companion_mul(&current),
            None => self.base * &current,
        });
        Some(current)
    }
}

/// The bottom row `(m_0(X), ..., m_{n-1}(X))` of a matrix in Frobenius
/// normal form; the rest of the shape (superdiagonal ones) is implied.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FrobeniusSpec {
    n: usize,
    modulus: u64,
    row: Vec<LaurentPoly>,
}

impl FrobeniusSpec {
    pub fn new(modulus: u64, row: Vec<LaurentPoly>) -> Result<Self, MatrixError> {
        if row.is_empty() {
            return Err(MatrixError::EmptyDimension);
        }
        for p in &row {
            if p.modulus() != modulus {
                return Err(MatrixError::MixedModuli {
                    got: p.modulus(),
                    expected: modulus,
                });
            }
        }
        Ok(FrobeniusSpec {
            n: row.len(),
            modulus,
            row,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn row(&self) -> &[LaurentPoly] {
        &self.row
    }

    /// Synthesizes the companion matrix: superdiagonal ones, bottom row
    /// `row`, zeros elsewhere.
    pub fn to_matrix(&self) -> LaurentMatrix {
        let mut m = LaurentMatrix::zero(self.n, self.modulus);
        for i in 0..self.n - 1 {
            m.set(i, i + 1, LaurentPoly::one(self.modulus));
        }
        for (j, p) in self.row.iter().enumerate() {
            m.set(self.n - 1, j, p.clone());
        }
        m
    }

    /// `M * a` where `M` is this companion matrix: rows shift up, the last
    /// row is the row-combination. One step of the power trajectory at
    /// `O(n)` polynomial products instead of `O(n^3)`.
    fn companion_mul(&self, a: &LaurentMatrix) -> LaurentMatrix {
        assert_eq!(a.n(), self.n);
        let mut out = LaurentMatrix::zero(self.n, self.modulus);
        for i in 0..self.n - 1 {
            for j in 0..self.n {
                out.set(i, j, a.entry(i + 1, j).clone());
            }
        }
        for j in 0..self.n {
            let mut acc = LaurentPoly::zero(self.modulus);
            for (k, p) in self.row.iter().enumerate() {
                if !p.is_zero() {
                    acc = &acc + &(p * a.entry(k, j));
                }
            }
            out.set(self.n - 1, j, acc);
        }
        out
    }

    pub fn reduce_mod(&self, q: u64) -> Result<FrobeniusSpec, LaurentError> {
        let row = self
            .row
            .iter()
            .map(|p| p.reduce_mod(q))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(FrobeniusSpec {
            n: self.n,
            modulus: q,
            row,
        })
    }

    /// Per-row speeds `d_i = deg[m_i] / (n - i)` and their extrema, as
    /// exact reduced fractions.
    pub fn speed_table(&self, prime: u64) -> Result<SpeedTable, LaurentError> {
        let mut rows = Vec::with_capacity(self.n);
        for (i, p) in self.row.iter().enumerate() {
            let report = p.degrees(prime)?;
            let denom = (self.n - i) as i64;
            rows.push(RowSpeed {
                d_plus: Ratio::new(report.deg_plus, denom),
                d_minus: Ratio::new(report.deg_minus, denom),
                report,
            });
        }
        let d_plus = rows.iter().map(|r| r.d_plus).max().unwrap();
        let d_minus = rows.iter().map(|r| r.d_minus).min().unwrap();
        Ok(SpeedTable {
            rows,
            d_plus,
            d_minus,
        })
    }

    /// The U and L rows: per entry, the `deg+` (resp. `deg-`) witness
    /// monomial when that entry attains the extremal speed, zero otherwise.
    pub fn extract_ul(&self, prime: u64) -> Result<(FrobeniusSpec, FrobeniusSpec), LaurentError> {
        let table = self.speed_table(prime)?;
        let mut u_row = Vec::with_capacity(self.n);
        let mut l_row = Vec::with_capacity(self.n);
        for (i, p) in self.row.iter().enumerate() {
            let speeds = &table.rows[i];
            u_row.push(self.side_monomial(
                p,
                prime,
                speeds.d_plus == table.d_plus,
                speeds.report.witness_plus,
            ));
            l_row.push(self.side_monomial(
                p,
                prime,
                speeds.d_minus == table.d_minus,
                speeds.report.witness_minus,
            ));
        }
        Ok((
            FrobeniusSpec {
                n: self.n,
                modulus: self.modulus,
                row: u_row,
            },
            FrobeniusSpec {
                n: self.n,
                modulus: self.modulus,
                row: l_row,
            },
        ))
    }

    fn side_monomial(
        &self,
        p: &LaurentPoly,
        prime: u64,
        at_extremum: bool,
        witness: Option<(i64, u64)>,
    ) -> LaurentPoly {
        if !at_extremum {
            return LaurentPoly::zero(self.modulus);
        }
        match witness {
            Some((e, c)) => LaurentPoly::monomial(self.modulus, e, c as i128),
            // Degree 0 side: keep the constant term only when it is not a
            // multiple of the prime, so U/L rows stay hat-pure.
            None => {
                let c = p.coefficient(0);
                if c != 0 && !c.is_multiple_of(prime) {
                    LaurentPoly::monomial(self.modulus, 0, c as i128)
                } else {
                    LaurentPoly::zero(self.modulus)
                }
            }
        }
    }

    /// Hat/bar split of the bottom row: the first spec keeps the monomials
    /// whose coefficient is not a multiple of `prime`, the second carries
    /// the removed remainder (a row container, not a companion matrix).
    pub fn hat_bar(&self, prime: u64) -> Result<(FrobeniusSpec, FrobeniusSpec), LaurentError> {
        let mut hat = Vec::with_capacity(self.n);
        let mut bar = Vec::with_capacity(self.n);
        for p in &self.row {
            let (h, b) = p.hat_bar(prime)?;
            hat.push(h);
            bar.push(b);
        }
        Ok((
            FrobeniusSpec {
                n: self.n,
                modulus: self.modulus,
                row: hat,
            },
            FrobeniusSpec {
                n: self.n,
                modulus: self.modulus,
                row: bar,
            },
        ))
    }

    pub fn is_hat_pure(&self, prime: u64) -> Result<bool, LaurentError> {
        let (hat, _) = self.hat_bar(prime)?;
        Ok(hat == *self)
    }

    /// The corner sequence `u^(0), ..., u^(T)`: `u^(t)` equals the `(n, n)`
    /// entry of the `t`-th power of the companion matrix, computed by the
    /// Cayley-Hamilton recurrence
    /// `u^(t) = sum_i m_i(X) * u^(t-n+i)` with `u^(0) = 1`, `u^(<0) = 0`.
    pub fn corner_sequence(&self, horizon: usize) -> Vec<LaurentPoly> {
        let mut seq = Vec::with_capacity(horizon + 1);
        seq.push(LaurentPoly::one(self.modulus));
        for t in 1..=horizon {
            let mut acc = LaurentPoly::zero(self.modulus);
            for (i, p) in self.row.iter().enumerate() {
                if p.is_zero() {
                    continue;
                }
                let back = t as i64 - self.n as i64 + i as i64;
                if back < 0 {
                    continue;
                }
                acc = &acc + &(p * &seq[back as usize]);
            }
            seq.push(acc);
        }
        seq
    }
}

impl fmt::Debug for FrobeniusSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let row: Vec<String> = self.row.iter().map(|p| p.to_string()).collect();
        write!(
            f,
            "FrobeniusSpec(m={}, row=[{}])",
            self.modulus,
            row.join(", ")
        )
    }
}

/// Per-row and extremal propagation speeds, exact rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpeedTable {
    pub rows: Vec<RowSpeed>,
    pub d_plus: Ratio<i64>,
    pub d_minus: Ratio<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowSpeed {
    pub d_plus: Ratio<i64>,
    pub d_minus: Ratio<i64>,
    pub report: DegreeReport,
}

#[derive(Serialize, Deserialize)]
struct FrobeniusJson {
    m: u64,
    n: usize,
    row: Vec<Vec<(i64, u64)>>,
}

impl Serialize for FrobeniusSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        FrobeniusJson {
            m: self.modulus,
            n: self.n,
            row: self.row.iter().map(LaurentPoly::to_pairs).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FrobeniusSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = FrobeniusJson::deserialize(deserializer)?;
        if raw.m < 2 {
            return Err(D::Error::custom("modulus must be at least 2"));
        }
        if raw.n == 0 || raw.row.len() != raw.n {
            return Err(D::Error::custom(format!(
                "row has {} entries, declared n = {}",
                raw.row.len(),
                raw.n
            )));
        }
        let row = raw
            .row
            .iter()
            .map(|pairs| {
                for &(_, c) in pairs {
                    if c >= raw.m {
                        return Err(D::Error::custom(format!(
                            "coefficient {c} out of range for modulus {}",
                            raw.m
                        )));
                    }
                }
                Ok(LaurentPoly::from_pairs(
                    raw.m,
                    &pairs
                        .iter()
                        .map(|&(e, c)| (e, c as i128))
                        .collect::<Vec<_>>(),
                ))
            })
            .collect::<Result<Vec<_>, _>>()?;
        FrobeniusSpec::new(raw.m, row).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample;
    use rand::Rng;

    /// A 4x4 row over Z_49 with speed d+ = 3/2: its U-matrix corner powers
    /// land on small hand-checkable monomials (8X^3, 31X^6, 33X^9, 25X^12).
    pub(crate) fn corner_table_spec() -> FrobeniusSpec {
        FrobeniusSpec::new(
            49,
            vec![
                LaurentPoly::from_pairs(49, &[(-2, 1), (0, 1), (1, 1), (6, 16)]),
                LaurentPoly::from_pairs(49, &[(-3, 13), (0, 3), (2, 1)]),
                LaurentPoly::from_pairs(49, &[(-1, 34), (3, 8)]),
                LaurentPoly::from_pairs(49, &[(-1, 1), (0, 31)]),
            ],
        )
        .unwrap()
    }

    /// A 4x4 row over Z_49 with huge-degree p-multiple tails; exercises the
    /// full speed table (d+ = 2 attained twice, d- = -1 attained twice).
    pub(crate) fn speed_example_spec() -> FrobeniusSpec {
        FrobeniusSpec::new(
            49,
            vec![
                LaurentPoly::from_pairs(49, &[(-2, 1), (0, 1), (1, 1), (8, 2), (123, 14)]),
                LaurentPoly::from_pairs(49, &[(-3, 3), (0, 3), (2, 1)]),
                LaurentPoly::from_pairs(49, &[(-70, 21), (-1, 4), (4, 3)]),
                LaurentPoly::from_pairs(49, &[(-35, 7), (-1, 1), (0, 3)]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn frobenius_matrix_shape() {
        let spec = speed_example_spec();
        let m = spec.to_matrix();
        for i in 0..3 {
            for j in 0..4 {
                if j == i + 1 {
                    assert_eq!(*m.entry(i, j), LaurentPoly::one(49));
                } else {
                    assert!(m.entry(i, j).is_zero());
                }
            }
        }
        for j in 0..4 {
            assert_eq!(m.entry(3, j), &spec.row()[j]);
        }
        assert!(m.is_frobenius());
        assert_eq!(m.frobenius_row().unwrap(), spec);
    }

    #[test]
    fn one_by_one_companion() {
        let spec = FrobeniusSpec::new(8, vec![LaurentPoly::monomial(8, 1, 3)]).unwrap();
        let m = spec.to_matrix();
        assert_eq!(m.n(), 1);
        assert_eq!(*m.entry(0, 0), LaurentPoly::monomial(8, 1, 3));
    }

    #[test]
    fn two_by_two_zero_row() {
        let spec = FrobeniusSpec::new(4, vec![LaurentPoly::zero(4), LaurentPoly::zero(4)]).unwrap();
        let m = spec.to_matrix();
        assert_eq!(*m.entry(0, 1), LaurentPoly::one(4));
        assert!(m.entry(0, 0).is_zero());
        assert!(m.entry(1, 0).is_zero());
        assert!(m.entry(1, 1).is_zero());
    }

    #[test]
    fn corner_of_squared_matrix_is_m3_sq_plus_m2() {
        // (M^2)^4_4 = m_3^2 + m_2 and (M^3)^4_4 = m_1 + 2 m_2 m_3 + m_3^3
        // as symbolic identities, instantiated on a random row.
        let mut rng = sample::rng(11);
        for _ in 0..20 {
            let spec = sample::random_frobenius(&mut rng, 27, 4, 4, 4);
            let m = spec.to_matrix();
            let (m1, m2, m3) = (&spec.row()[1], &spec.row()[2], &spec.row()[3]);
            let two = LaurentPoly::constant(27, 2);
            assert_eq!(*(&m * &m).entry(3, 3), &(m3 * m3) + m2);
            let cubic = m.pow(3).entry(3, 3).clone();
            let expected = &(m1 + &(&(&two * m2) * m3)) + &m3.pow(3);
            assert_eq!(cubic, expected);
        }
    }

    #[test]
    fn identity_powers() {
        let id = LaurentMatrix::identity(3, 8);
        assert_eq!(id.pow(17), id);
    }

    #[test]
    fn pow_matches_iterated_mul() {
        let mut rng = sample::rng(12);
        let spec = sample::random_frobenius(&mut rng, 12, 3, 3, 3);
        let m = spec.to_matrix();
        let mut powers = m.powers();
        for t in 0..10u64 {
            assert_eq!(powers.next().unwrap(), m.pow(t), "t = {t}");
        }
    }

    #[test]
    fn pow_is_additive_in_the_exponent() {
        let mut rng = sample::rng(13);
        for _ in 0..10 {
            let spec = sample::random_frobenius(&mut rng, 8, 3, 3, 3);
            let m = spec.to_matrix();
            let (s, t) = (rng.gen_range(0..6), rng.gen_range(0..6));
            assert_eq!(m.pow(s + t), &m.pow(s) * &m.pow(t));
        }
    }

    #[test]
    fn speed_table_of_four_by_four_example() {
        let spec = speed_example_spec();
        let t = spec.speed_table(7).unwrap();
        let speeds: Vec<Ratio<i64>> = t.rows.iter().map(|r| r.d_plus).collect();
        assert_eq!(
            speeds,
            vec![
                Ratio::new(2, 1),
                Ratio::new(2, 3),
                Ratio::new(2, 1),
                Ratio::new(0, 1)
            ]
        );
        let downs: Vec<Ratio<i64>> = t.rows.iter().map(|r| r.d_minus).collect();
        assert_eq!(
            downs,
            vec![
                Ratio::new(-1, 2),
                Ratio::new(-1, 1),
                Ratio::new(-1, 2),
                Ratio::new(-1, 1)
            ]
        );
        assert_eq!(t.d_plus, Ratio::new(2, 1));
        assert_eq!(t.d_minus, Ratio::new(-1, 1));
    }

    #[test]
    fn fractional_top_speed() {
        let t = corner_table_spec().speed_table(7).unwrap();
        assert_eq!(t.d_plus, Ratio::new(3, 2));
    }

    #[test]
    fn constant_rows_have_zero_speed() {
        let spec = FrobeniusSpec::new(
            8,
            vec![LaurentPoly::constant(8, 3), LaurentPoly::constant(8, 5)],
        )
        .unwrap();
        let t = spec.speed_table(2).unwrap();
        assert_eq!(t.d_plus, Ratio::new(0, 1));
        assert_eq!(t.d_minus, Ratio::new(0, 1));
    }

    #[test]
    fn ul_rows_of_speed_example() {
        let (u, l) = speed_example_spec().extract_ul(7).unwrap();
        assert_eq!(
            u.row(),
            &[
                LaurentPoly::monomial(49, 8, 2),
                LaurentPoly::zero(49),
                LaurentPoly::monomial(49, 4, 3),
                LaurentPoly::zero(49),
            ]
        );
        assert_eq!(
            l.row(),
            &[
                LaurentPoly::zero(49),
                LaurentPoly::monomial(49, -3, 3),
                LaurentPoly::zero(49),
                LaurentPoly::monomial(49, -1, 1),
            ]
        );
    }

    #[test]
    fn u_row_of_corner_table_example() {
        let (u, _) = corner_table_spec().extract_ul(7).unwrap();
        assert_eq!(
            u.row(),
            &[
                LaurentPoly::monomial(49, 6, 16),
                LaurentPoly::zero(49),
                LaurentPoly::monomial(49, 3, 8),
                LaurentPoly::zero(49),
            ]
        );
    }

    #[test]
    fn zero_row_extracts_zero() {
        let spec = FrobeniusSpec::new(4, vec![LaurentPoly::zero(4), LaurentPoly::zero(4)]).unwrap();
        let (u, l) = spec.extract_ul(2).unwrap();
        assert!(u.row().iter().all(LaurentPoly::is_zero));
        assert!(l.row().iter().all(LaurentPoly::is_zero));
    }

    #[test]
    fn ul_rows_are_hat_pure() {
        let mut rng = sample::rng(14);
        for _ in 0..50 {
            let spec = sample::random_frobenius(&mut rng, 49, 4, 4, 6);
            let (u, l) = spec.extract_ul(7).unwrap();
            assert!(u.is_hat_pure(7).unwrap());
            assert!(l.is_hat_pure(7).unwrap());
        }
    }

    #[test]
    fn hat_bar_drops_multiples() {
        let (hat, bar) = speed_example_spec().hat_bar(7).unwrap();
        assert_eq!(
            hat.row()[0].to_pairs(),
            vec![(-2, 1), (0, 1), (1, 1), (8, 2)]
        );
        assert_eq!(bar.row()[0].to_pairs(), vec![(123, 14)]);
        assert_eq!(bar.row()[2].to_pairs(), vec![(-70, 21)]);
        assert_eq!(bar.row()[3].to_pairs(), vec![(-35, 7)]);
        for i in 0..4 {
            assert_eq!(&hat.row()[i] + &bar.row()[i], speed_example_spec().row()[i]);
        }
    }

    #[test]
    fn hat_bar_unit_constants() {
        let spec = FrobeniusSpec::new(
            8,
            vec![LaurentPoly::constant(8, 1), LaurentPoly::constant(8, 3)],
        )
        .unwrap();
        let (hat, bar) = spec.hat_bar(2).unwrap();
        assert_eq!(hat, spec);
        assert!(bar.row().iter().all(LaurentPoly::is_zero));
    }

    #[test]
    fn hat_bar_all_multiples() {
        let spec = FrobeniusSpec::new(
            4,
            vec![LaurentPoly::monomial(4, 1, 2), LaurentPoly::constant(4, 2)],
        )
        .unwrap();
        let (hat, _) = spec.hat_bar(2).unwrap();
        assert!(hat.row().iter().all(LaurentPoly::is_zero));
    }

    #[test]
    fn determinant_of_frobenius_is_signed_m0() {
        let mut rng = sample::rng(15);
        for n in 1..=5usize {
            let spec = sample::random_frobenius(&mut rng, 12, n, 3, 3);
            let det = spec.to_matrix().determinant();
            let m0 = &spec.row()[0];
            let expected = if n % 2 == 1 { m0.clone() } else { -m0 };
            assert_eq!(det, expected, "n = {n}");
        }
    }

    #[test]
    fn determinant_one_by_one() {
        let m =
            LaurentMatrix::from_rows(8, vec![vec![LaurentPoly::from_pairs(8, &[(0, 3), (2, 1)])]])
                .unwrap();
        assert_eq!(
            m.determinant(),
            LaurentPoly::from_pairs(8, &[(0, 3), (2, 1)])
        );
    }

    #[test]
    fn determinant_antidiagonal() {
        let m = LaurentMatrix::from_rows(
            2,
            vec![
                vec![LaurentPoly::zero(2), LaurentPoly::one(2)],
                vec![LaurentPoly::monomial(2, 1, 1), LaurentPoly::zero(2)],
            ],
        )
        .unwrap();
        assert_eq!(m.determinant(), LaurentPoly::monomial(2, 1, 1));
    }

    #[test]
    fn corner_sequence_matches_hand_table() {
        let (u, _) = corner_table_spec().extract_ul(7).unwrap();
        let seq = u.corner_sequence(8);
        assert_eq!(seq[0], LaurentPoly::one(49));
        for t in [1, 3, 5, 7] {
            assert!(seq[t].is_zero(), "odd t = {t}");
        }
        assert_eq!(seq[2], LaurentPoly::monomial(49, 3, 8));
        assert_eq!(seq[4], LaurentPoly::monomial(49, 6, 31));
        assert_eq!(seq[6], LaurentPoly::monomial(49, 9, 33));
        assert_eq!(seq[8], LaurentPoly::monomial(49, 12, 25));
    }

    #[test]
    fn scalar_corner_sequence_is_geometric() {
        let c = LaurentPoly::from_pairs(8, &[(0, 3), (1, 2)]);
        let spec = FrobeniusSpec::new(8, vec![c.clone()]).unwrap();
        let seq = spec.corner_sequence(6);
        for (t, val) in seq.iter().enumerate() {
            assert_eq!(*val, c.pow(t as u32));
        }
    }

    #[test]
    fn corner_sequence_matches_matrix_powers() {
        let mut rng = sample::rng(16);
        for _ in 0..10 {
            let spec = sample::random_frobenius(&mut rng, 12, 3, 3, 3);
            let seq = spec.corner_sequence(12);
            let matrix = spec.to_matrix();
            let mut powers = matrix.powers();
            for t in 0..=12usize {
                let p = powers.next().unwrap();
                assert_eq!(seq[t], *p.entry(spec.n() - 1, spec.n() - 1), "t = {t}");
            }
        }
    }

    #[test]
    fn degree_span_examples() {
        assert_eq!(speed_example_spec().to_matrix().degree_span(), (-70, 123));
        assert_eq!(LaurentMatrix::identity(3, 4).degree_span(), (0, 0));
        assert_eq!(LaurentMatrix::zero(3, 4).degree_span(), (0, 0));
    }

    #[test]
    fn spec_json_round_trip() {
        let spec = corner_table_spec();
        let json = serde_json::to_string(&spec).unwrap();
        assert!(json.starts_with("{\"m\":49,\"n\":4,"));
        let back: FrobeniusSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
    }

    #[test]
    fn spec_json_rejects_bad_payloads() {
        assert!(
            serde_json::from_str::<FrobeniusSpec>(r#"{"m":49,"n":2,"row":[[[0,1]]]}"#).is_err()
        );
        assert!(serde_json::from_str::<FrobeniusSpec>(r#"{"m":4,"n":1,"row":[[[0,9]]]}"#).is_err());
    }
}
