//! The rule representations — higher-order CA over `Z_m`, LCA over `Z_m^n`,
//! Frobenius row specs, and periodic non-uniform CA — with the lossless
//! conversions between them.
//!
//! Sign convention: a rule coefficient at neighbourhood offset `i`
//! contributes `X^(-i)` to the formal power series, so a shift towards
//! larger cell indices multiplies configuration series by `X^(+1)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::laurent::LaurentPoly;
use crate::lmatrix::{FrobeniusSpec, LaurentMatrix};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("modulus must be at least 2, got {0}")]
    BadModulus(u64),
    #[error("{what} must be at least 1")]
    ZeroDimension { what: &'static str },
    #[error("{what}: expected {expected} entries, got {got}")]
    BadShape {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("coefficient {value} is not a canonical residue mod {modulus}")]
    BadResidue { value: u64, modulus: u64 },
}

fn check_residues(values: &[u64], modulus: u64) -> Result<(), ModelError> {
    match values.iter().find(|&&v| v >= modulus) {
        Some(&value) => Err(ModelError::BadResidue { value, modulus }),
        None => Ok(()),
    }
}

/// A linear HOCA over `Z_m` with memory `k` and radius `r`: coefficient
/// `coeffs[j][i + r]` weights memory slot `j + 1` at offset `i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HocaRule {
    pub m: u64,
    pub memory: usize,
    pub radius: usize,
    pub coeffs: Vec<Vec<u64>>,
}

impl HocaRule {
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.m < 2 {
            return Err(ModelError::BadModulus(self.m));
        }
        if self.memory == 0 {
            return Err(ModelError::ZeroDimension { what: "memory" });
        }
        if self.coeffs.len() != self.memory {
            return Err(ModelError::BadShape {
                what: "coefficient rows",
                expected: self.memory,
                got: self.coeffs.len(),
            });
        }
        let width = 2 * self.radius + 1;
        for row in &self.coeffs {
            if row.len() != width {
                return Err(ModelError::BadShape {
                    what: "coefficient columns",
                    expected: width,
                    got: row.len(),
                });
            }
            check_residues(row, self.m)?;
        }
        Ok(())
    }

    /// Coefficient for memory slot `j` (0-based) at offset `i`.
    pub fn coeff(&self, j: usize, i: i64) -> u64 {
        self.coeffs[j][(i + self.radius as i64) as usize]
    }

    /// Shrinks the radius while both outermost columns are all zero.
    pub fn canonicalize(&self) -> HocaRule {
        let mut r = self.radius;
        let width = |r: usize| 2 * r + 1;
        while r > 0 {
            let all_zero = self
                .coeffs
                .iter()
                .all(|row| row[self.radius - r] == 0 && row[self.radius + r] == 0);
            if !all_zero {
                break;
            }
            r -= 1;
        }
        let lo = self.radius - r;
        HocaRule {
            m: self.m,
            memory: self.memory,
            radius: r,
            coeffs: self
                .coeffs
                .iter()
                .map(|row| row[lo..lo + width(r)].to_vec())
                .collect(),
        }
    }
}

/// An LCA over `Z_m^n` of radius `r`, given by the `2r + 1` matrices
/// `matrices[i + r]` (index order `i = -r ... r`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LcaRule {
    pub m: u64,
    pub n: usize,
    pub radius: usize,
    pub matrices: Vec<Vec<Vec<u64>>>,
}

impl LcaRule {
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.m < 2 {
            return Err(ModelError::BadModulus(self.m));
        }
        if self.n == 0 {
            return Err(ModelError::ZeroDimension { what: "n" });
        }
        let width = 2 * self.radius + 1;
        if self.matrices.len() != width {
            return Err(ModelError::BadShape {
                what: "matrices",
                expected: width,
                got: self.matrices.len(),
            });
        }
        for grid in &self.matrices {
            if grid.len() != self.n {
                return Err(ModelError::BadShape {
                    what: "matrix rows",
                    expected: self.n,
                    got: grid.len(),
                });
            }
            for row in grid {
                if row.len() != self.n {
                    return Err(ModelError::BadShape {
                        what: "matrix columns",
                        expected: self.n,
                        got: row.len(),
                    });
                }
                check_residues(row, self.m)?;
            }
        }
        Ok(())
    }

    /// Entry `(h, k)` of the matrix at offset `i`.
    pub fn matrix_entry(&self, i: i64, h: usize, k: usize) -> u64 {
        self.matrices[(i + self.radius as i64) as usize][h][k]
    }

    /// Shrinks the radius while both outermost matrices are all zero.
    pub fn canonicalize(&self) -> LcaRule {
        let zero = |grid: &Vec<Vec<u64>>| grid.iter().all(|row| row.iter().all(|&v| v == 0));
        let mut r = self.radius;
        while r > 0
            && zero(&self.matrices[self.radius - r])
            && zero(&self.matrices[self.radius + r])
        {
            r -= 1;
        }
        let lo = self.radius - r;
        LcaRule {
            m: self.m,
            n: self.n,
            radius: r,
            matrices: self.matrices[lo..lo + 2 * r + 1].to_vec(),
        }
    }
}

/// A linear periodic non-uniform CA over `Z_m`: position `j` of each period
/// applies the local rule with coefficients `rules[j]`, offsets `-r ... r`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PnuCaRule {
    pub m: u64,
    pub period: usize,
    pub radius: usize,
    pub rules: Vec<Vec<u64>>,
}

impl PnuCaRule {
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.m < 2 {
            return Err(ModelError::BadModulus(self.m));
        }
        if self.period == 0 {
            return Err(ModelError::ZeroDimension { what: "period" });
        }
        if self.rules.len() != self.period {
            return Err(ModelError::BadShape {
                what: "rules",
                expected: self.period,
                got: self.rules.len(),
            });
        }
        let width = 2 * self.radius + 1;
        for row in &self.rules {
            if row.len() != width {
                return Err(ModelError::BadShape {
                    what: "rule coefficients",
                    expected: width,
                    got: row.len(),
                });
            }
            check_residues(row, self.m)?;
        }
        Ok(())
    }

    /// Coefficient of the rule at in-period position `j`, offset `i`; zero
    /// outside `[-r, r]`.
    pub fn coeff(&self, j: usize, i: i64) -> u64 {
        let r = self.radius as i64;
        if i < -r || i > r {
            0
        } else {
            self.rules[j][(i + r) as usize]
        }
    }
}

/// Frobenius row of the LCA that presents a linear HOCA: row entry `j` is
/// the series `sum_i a_i^(j+1) X^(-i)`.
pub fn hoca_to_frobenius(rule: &HocaRule) -> FrobeniusSpec {
    let r = rule.radius as i64;
    let row = (0..rule.memory)
        .map(|j| {
            let pairs: Vec<(i64, i128)> =
                (-r..=r).map(|i| (-i, rule.coeff(j, i) as i128)).collect();
            LaurentPoly::from_pairs(rule.m, &pairs)
        })
        .collect();
    FrobeniusSpec::new(rule.m, row).expect("memory >= 1")
}

/// Exact inverse of [`hoca_to_frobenius`]; the recovered radius is the
/// smallest one covering the row support.
pub fn frobenius_to_hoca(spec: &FrobeniusSpec) -> HocaRule {
    let r = spec
        .row()
        .iter()
        .filter_map(LaurentPoly::support)
        .map(|(lo, hi)| lo.unsigned_abs().max(hi.unsigned_abs()))
        .max()
        .unwrap_or(0) as usize;
    let coeffs = spec
        .row()
        .iter()
        .map(|p| {
            (-(r as i64)..=r as i64)
                .map(|i| p.coefficient(-i))
                .collect()
        })
        .collect();
    HocaRule {
        m: spec.modulus(),
        memory: spec.n(),
        radius: r,
        coeffs,
    }
}

/// The finite formal power series of an LCA: entrywise
/// `M(X)_hk = sum_i (M_i)_hk X^(-i)` mod `m`.
pub fn lca_to_fps(rule: &LcaRule) -> LaurentMatrix {
    let mut out = LaurentMatrix::zero(rule.n, rule.m);
    let r = rule.radius as i64;
    for h in 0..rule.n {
        for k in 0..rule.n {
            let pairs: Vec<(i64, i128)> = (-r..=r)
                .map(|i| (-i, rule.matrix_entry(i, h, k) as i128))
                .collect();
            out.set(h, k, LaurentPoly::from_pairs(rule.m, &pairs));
        }
    }
    out
}

/// Inverse of [`lca_to_fps`] with minimal radius.
pub fn fps_to_lca(matrix: &LaurentMatrix) -> LcaRule {
    let (lo, hi) = matrix.degree_span();
    let r = lo.unsigned_abs().max(hi.unsigned_abs()) as usize;
    let n = matrix.n();
    let mut matrices = vec![vec![vec![0u64; n]; n]; 2 * r + 1];
    for h in 0..n {
        for k in 0..n {
            for (e, c) in matrix.entry(h, k).terms() {
                let i = -e; // offset i contributes X^(-i)
                matrices[(i + r as i64) as usize][h][k] = c;
            }
        }
    }
    LcaRule {
        m: matrix.modulus(),
        n,
        radius: r,
        matrices,
    }
}

/// The matrix presentation of a HOCA: `M_0` carries the superdiagonal ones
/// and the offset-0 coefficients in its bottom row, every other `M_i` is
/// zero except for its bottom row.
pub fn hoca_matrix_presentation(rule: &HocaRule) -> LcaRule {
    let k = rule.memory;
    let r = rule.radius;
    let mut matrices = vec![vec![vec![0u64; k]; k]; 2 * r + 1];
    for (idx, grid) in matrices.iter_mut().enumerate() {
        let i = idx as i64 - r as i64;
        if i == 0 {
            for d in 0..k - 1 {
                grid[d][d + 1] = 1;
            }
        }
        for j in 0..k {
            grid[k - 1][j] = rule.coeff(j, i);
        }
    }
    LcaRule {
        m: rule.m,
        n: k,
        radius: r,
        matrices,
    }
}

/// Metadata of the block homeomorphism that conjugates a periodic
/// non-uniform CA with its LCA presentation: cell `i` of the LCA packs the
/// scalar cells `i*block ... i*block + block - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BlockConjugacy {
    pub block: usize,
}

/// LCA presentation of a linear periodic non-uniform CA: radius
/// `s = ceil(r / period)` and `(M_l)_{j,c} = a_{j, l*period + c - j}`.
pub fn pnuca_to_lca(rule: &PnuCaRule) -> (LcaRule, BlockConjugacy) {
    let n = rule.period;
    let s = rule.radius.div_ceil(n);
    let mut matrices = vec![vec![vec![0u64; n]; n]; 2 * s + 1];
    for (idx, grid) in matrices.iter_mut().enumerate() {
        let l = idx as i64 - s as i64;
        for (j, row) in grid.iter_mut().enumerate() {
            for (c, slot) in row.iter_mut().enumerate() {
                *slot = rule.coeff(j, l * n as i64 + c as i64 - j as i64);
            }
        }
    }
    (
        LcaRule {
            m: rule.m,
            n,
            radius: s,
            matrices,
        },
        BlockConjugacy { block: n },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lmatrix::LaurentMatrix;
    use crate::sample;

    #[test]
    fn memory_one_is_plain_lca_series() {
        let rule = HocaRule {
            m: 2,
            memory: 1,
            radius: 1,
            coeffs: vec![vec![1, 0, 1]],
        };
        rule.validate().unwrap();
        let spec = hoca_to_frobenius(&rule);
        assert_eq!(spec.n(), 1);
        assert_eq!(
            spec.row()[0],
            LaurentPoly::from_pairs(2, &[(-1, 1), (1, 1)])
        );
    }

    #[test]
    fn recall_automaton_has_period_two() {
        let rule = HocaRule {
            m: 2,
            memory: 2,
            radius: 0,
            coeffs: vec![vec![1], vec![0]],
        };
        let spec = hoca_to_frobenius(&rule);
        assert_eq!(spec.row(), &[LaurentPoly::one(2), LaurentPoly::zero(2)]);
        let m = spec.to_matrix();
        assert_eq!(m.pow(2), LaurentMatrix::identity(2, 2));
    }

    #[test]
    fn all_ones_memory_two() {
        let rule = HocaRule {
            m: 2,
            memory: 2,
            radius: 1,
            coeffs: vec![vec![1, 1, 1], vec![1, 1, 1]],
        };
        let spec = hoca_to_frobenius(&rule);
        let expected = LaurentPoly::from_pairs(2, &[(-1, 1), (0, 1), (1, 1)]);
        assert_eq!(spec.row(), &[expected.clone(), expected]);
    }

    #[test]
    fn hoca_round_trip() {
        let mut rng = sample::rng(21);
        for _ in 0..40 {
            let rule = sample::random_hoca(&mut rng, 4, 2, 8).canonicalize();
            assert_eq!(frobenius_to_hoca(&hoca_to_frobenius(&rule)), rule);
        }
    }

    #[test]
    fn rule_90_series() {
        let rule = LcaRule {
            m: 2,
            n: 1,
            radius: 1,
            matrices: vec![vec![vec![1]], vec![vec![0]], vec![vec![1]]],
        };
        rule.validate().unwrap();
        let fps = lca_to_fps(&rule);
        assert_eq!(
            *fps.entry(0, 0),
            LaurentPoly::from_pairs(2, &[(-1, 1), (1, 1)])
        );
        assert!(fps.is_frobenius());
    }

    #[test]
    fn radius_zero_is_constant_matrix() {
        let rule = LcaRule {
            m: 4,
            n: 2,
            radius: 0,
            matrices: vec![vec![vec![1, 2], vec![3, 0]]],
        };
        let fps = lca_to_fps(&rule);
        assert_eq!(*fps.entry(0, 1), LaurentPoly::constant(4, 2));
        assert_eq!(*fps.entry(1, 0), LaurentPoly::constant(4, 3));
    }

    #[test]
    fn matrix_presentation_commutes_with_frobenius_synthesis() {
        let mut rng = sample::rng(22);
        for _ in 0..40 {
            let rule = sample::random_hoca(&mut rng, 4, 2, 9);
            let via_matrices = lca_to_fps(&hoca_matrix_presentation(&rule));
            let via_row = hoca_to_frobenius(&rule).to_matrix();
            assert_eq!(via_matrices, via_row);
        }
    }

    #[test]
    fn fps_round_trip_is_canonical() {
        let mut rng = sample::rng(23);
        for _ in 0..40 {
            let rule = sample::random_lca(&mut rng, 3, 2, 9).canonicalize();
            assert_eq!(fps_to_lca(&lca_to_fps(&rule)), rule);
        }
    }

    #[test]
    fn series_is_linear_in_the_rule() {
        let mut rng = sample::rng(24);
        for _ in 0..20 {
            let a = sample::random_lca(&mut rng, 3, 2, 8);
            let mut b = sample::random_lca(&mut rng, 3, 2, 8);
            b.m = a.m;
            b.n = a.n;
            b.radius = a.radius;
            b.matrices = a
                .matrices
                .iter()
                .map(|grid| {
                    grid.iter()
                        .map(|row| {
                            row.iter()
                                .map(|_| rand::Rng::gen_range(&mut rng, 0..a.m))
                                .collect()
                        })
                        .collect()
                })
                .collect();
            let summed = LcaRule {
                m: a.m,
                n: a.n,
                radius: a.radius,
                matrices: a
                    .matrices
                    .iter()
                    .zip(&b.matrices)
                    .map(|(ga, gb)| {
                        ga.iter()
                            .zip(gb)
                            .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| (x + y) % a.m).collect())
                            .collect()
                    })
                    .collect(),
            };
            let lhs = lca_to_fps(&summed);
            let mut rhs = LaurentMatrix::zero(a.n, a.m);
            let (fa, fb) = (lca_to_fps(&a), lca_to_fps(&b));
            for h in 0..a.n {
                for k in 0..a.n {
                    rhs.set(h, k, fa.entry(h, k) + fb.entry(h, k));
                }
            }
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn period_one_pnuca_is_uniform() {
        let rule = PnuCaRule {
            m: 2,
            period: 1,
            radius: 1,
            rules: vec![vec![1, 0, 1]],
        };
        let (lca, phi) = pnuca_to_lca(&rule);
        assert_eq!(phi.block, 1);
        assert_eq!(lca.n, 1);
        assert_eq!(lca.radius, 1);
        assert_eq!(
            lca.matrices,
            vec![vec![vec![1]], vec![vec![0]], vec![vec![1]]]
        );
    }

    #[test]
    fn period_two_radius_one() {
        let rule = PnuCaRule {
            m: 2,
            period: 2,
            radius: 1,
            rules: vec![vec![1, 0, 0], vec![0, 0, 1]],
        };
        rule.validate().unwrap();
        let (lca, _) = pnuca_to_lca(&rule);
        assert_eq!(lca.radius, 1);
        assert_eq!(
            lca.matrices,
            vec![
                vec![vec![0, 1], vec![0, 0]], // l = -1
                vec![vec![0, 0], vec![0, 0]], // l = 0
                vec![vec![0, 0], vec![1, 0]], // l = 1
            ]
        );
    }

    #[test]
    fn period_two_radius_zero_is_block_diagonal() {
        let rule = PnuCaRule {
            m: 4,
            period: 2,
            radius: 0,
            rules: vec![vec![3], vec![2]],
        };
        let (lca, _) = pnuca_to_lca(&rule);
        assert_eq!(lca.radius, 0);
        assert_eq!(lca.matrices, vec![vec![vec![3, 0], vec![0, 2]]]);
    }

    #[test]
    fn validation_rejects_bad_shapes() {
        let rule = HocaRule {
            m: 2,
            memory: 2,
            radius: 1,
            coeffs: vec![vec![1, 0, 1]],
        };
        assert!(matches!(rule.validate(), Err(ModelError::BadShape { .. })));
        let rule = LcaRule {
            m: 4,
            n: 1,
            radius: 0,
            matrices: vec![vec![vec![7]]],
        };
        assert_eq!(
            rule.validate(),
            Err(ModelError::BadResidue {
                value: 7,
                modulus: 4
            })
        );
    }
}
