//! Finite-support configurations over `Z_m^n`, their polynomial encoding,
//! global-rule application, HOCA and periodic non-uniform stepping, the
//! Cantor metric, and space-time trace export.

use std::collections::BTreeMap;
use std::io::{self, Write};
use std::ops::Add;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::laurent::LaurentPoly;
use crate::lmatrix::LaurentMatrix;
use crate::models::{HocaRule, PnuCaRule};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DynamicsError {
    #[error("configuration is over Z_{got_m}^{got_n}, rule expects Z_{want_m}^{want_n}")]
    Incompatible {
        got_m: u64,
        got_n: usize,
        want_m: u64,
        want_n: usize,
    },
    #[error("expected a stack of {expected} scalar configurations, got {got}")]
    BadStack { expected: usize, got: usize },
}

/// A configuration with finite support: a sparse assignment of `Z_m^n`
/// state vectors to integer cells, zero-vector background. Cells holding
/// the zero vector are never stored.
#[derive(Clone, PartialEq, Eq)]
pub struct Configuration {
    m: u64,
    n: usize,
    cells: BTreeMap<i64, Vec<u64>>,
}

impl Configuration {
    pub fn empty(m: u64, n: usize) -> Self {
        assert!(m >= 2 && n >= 1);
        Configuration {
            m,
            n,
            cells: BTreeMap::new(),
        }
    }

    /// Scalar (`n = 1`) configuration from `(cell, value)` pairs.
    pub fn scalar(m: u64, cells: &[(i64, u64)]) -> Self {
        let mut c = Self::empty(m, 1);
        for &(i, v) in cells {
            c.set_cell(i, vec![v]);
        }
        c
    }

    pub fn modulus(&self) -> u64 {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn set_cell(&mut self, index: i64, vector: Vec<u64>) {
        assert_eq!(vector.len(), self.n, "state vector length");
        let vector: Vec<u64> = vector.into_iter().map(|v| v % self.m).collect();
        if vector.iter().all(|&v| v == 0) {
            self.cells.remove(&index);
        } else {
            self.cells.insert(index, vector);
        }
    }

    /// Component `j` of the state vector at `index` (zero background).
    pub fn component(&self, index: i64, j: usize) -> u64 {
        self.cells.get(&index).map_or(0, |v| v[j])
    }

    pub fn cells(&self) -> impl Iterator<Item = (i64, &[u64])> {
        self.cells.iter().map(|(&i, v)| (i, v.as_slice()))
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// `(min, max)` indices of the support, `None` when empty.
    pub fn support(&self) -> Option<(i64, i64)> {
        Some((*self.cells.keys().next()?, *self.cells.keys().next_back()?))
    }

    /// Component polynomials `P_c(X)`: component `j` maps to
    /// `sum_i c_i^j X^i`.
    pub fn to_fps(&self) -> Vec<LaurentPoly> {
        let mut out = vec![LaurentPoly::zero(self.m); self.n];
        for (i, vector) in self.cells() {
            for (j, &v) in vector.iter().enumerate() {
                if v != 0 {
                    out[j] = &out[j] + &LaurentPoly::monomial(self.m, i, v as i128);
                }
            }
        }
        out
    }

    /// Inverse of [`Configuration::to_fps`].
    pub fn from_fps(components: &[LaurentPoly]) -> Self {
        assert!(!components.is_empty());
        let m = components[0].modulus();
        let mut c = Self::empty(m, components.len());
        for (j, p) in components.iter().enumerate() {
            assert_eq!(p.modulus(), m, "modulus mismatch");
            for (e, v) in p.terms() {
                let mut vector = c.cells.get(&e).cloned().unwrap_or_else(|| vec![0; c.n]);
                vector[j] = v;
                c.set_cell(e, vector);
            }
        }
        c
    }
}

impl Add for &Configuration {
    type Output = Configuration;

    fn add(self, rhs: &Configuration) -> Configuration {
        assert_eq!((self.m, self.n), (rhs.m, rhs.n), "shape mismatch");
        let mut out = self.clone();
        for (i, vector) in rhs.cells() {
            let mut sum = out.cells.get(&i).cloned().unwrap_or_else(|| vec![0; out.n]);
            for (s, &v) in sum.iter_mut().zip(vector) {
                *s = (*s + v) % out.m;
            }
            out.set_cell(i, sum);
        }
        out
    }
}

impl std::fmt::Debug for Configuration {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "Configuration(m={}, n={}, cells={:?})",
            self.m, self.n, self.cells
        )
    }
}

impl Serialize for Configuration {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Raw<'a> {
            m: u64,
            n: usize,
            cells: BTreeMap<String, &'a Vec<u64>>,
        }
        Raw {
            m: self.m,
            n: self.n,
            cells: self.cells.iter().map(|(i, v)| (i.to_string(), v)).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Configuration {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            m: u64,
            n: usize,
            cells: BTreeMap<String, Vec<u64>>,
        }
        let raw = Raw::deserialize(deserializer)?;
        if raw.m < 2 {
            return Err(D::Error::custom("modulus must be at least 2"));
        }
        if raw.n == 0 {
            return Err(D::Error::custom("n must be at least 1"));
        }
        let mut c = Configuration::empty(raw.m, raw.n);
        for (key, vector) in raw.cells {
            let index: i64 = key
                .parse()
                .map_err(|_| D::Error::custom(format!("bad cell index {key:?}")))?;
            if vector.len() != raw.n {
                return Err(D::Error::custom(format!(
                    "cell {key}: vector length {} != n = {}",
                    vector.len(),
                    raw.n
                )));
            }
            if let Some(&v) = vector.iter().find(|&&v| v >= raw.m) {
                return Err(D::Error::custom(format!(
                    "cell {key}: {v} is not a canonical residue mod {}",
                    raw.m
                )));
            }
            c.set_cell(index, vector);
        }
        Ok(c)
    }
}

fn check_compat(matrix: &LaurentMatrix, c: &Configuration) -> Result<(), DynamicsError> {
    if matrix.modulus() != c.modulus() || matrix.n() != c.n() {
        return Err(DynamicsError::Incompatible {
            got_m: c.modulus(),
            got_n: c.n(),
            want_m: matrix.modulus(),
            want_n: matrix.n(),
        });
    }
    Ok(())
}

/// One step of the LCA: the configuration series is multiplied by the rule
/// matrix, `P_{F(c)} = [M(X) P_c(X)]_m`.
pub fn step(matrix: &LaurentMatrix, c: &Configuration) -> Result<Configuration, DynamicsError> {
    check_compat(matrix, c)?;
    let v = c.to_fps();
    let n = matrix.n();
    let mut out = Vec::with_capacity(n);
    for h in 0..n {
        let mut acc = LaurentPoly::zero(matrix.modulus());
        for (k, poly) in v.iter().enumerate() {
            if !poly.is_zero() {
                acc = &acc + &(matrix.entry(h, k) * poly);
            }
        }
        out.push(acc);
    }
    Ok(Configuration::from_fps(&out))
}

/// `t`-fold [`step`].
pub fn iterate(
    matrix: &LaurentMatrix,
    c: &Configuration,
    t: u64,
) -> Result<Configuration, DynamicsError> {
    check_compat(matrix, c)?;
    let mut current = c.clone();
    for _ in 0..t {
        current = step(matrix, &current)?;
    }
    Ok(current)
}

/// Same trajectory point by a single multiplication with `M(X)^t`.
pub fn iterate_via_power(
    matrix: &LaurentMatrix,
    c: &Configuration,
    t: u64,
) -> Result<Configuration, DynamicsError> {
    check_compat(matrix, c)?;
    step(&matrix.pow(t), c)
}

/// Direct evaluation of the HOCA global rule on a stack of `k` scalar
/// configurations: every slot shifts down by one, the last slot is the
/// linear combination of windows.
pub fn hoca_step(
    rule: &HocaRule,
    stack: &[Configuration],
) -> Result<Vec<Configuration>, DynamicsError> {
    if stack.len() != rule.memory {
        return Err(DynamicsError::BadStack {
            expected: rule.memory,
            got: stack.len(),
        });
    }
    for c in stack {
        if c.modulus() != rule.m || c.n() != 1 {
            return Err(DynamicsError::Incompatible {
                got_m: c.modulus(),
                got_n: c.n(),
                want_m: rule.m,
                want_n: 1,
            });
        }
    }
    let mut out: Vec<Configuration> = stack[1..].to_vec();
    let mut last = Configuration::empty(rule.m, 1);
    let r = rule.radius as i64;
    let mut sums: BTreeMap<i64, u64> = BTreeMap::new();
    for (j, slot) in stack.iter().enumerate() {
        for offset in -r..=r {
            let a = rule.coeff(j, offset);
            if a == 0 {
                continue;
            }
            for (idx, vector) in slot.cells() {
                // Output cell i reads slot j at i + offset.
                let target = idx - offset;
                let entry = sums.entry(target).or_insert(0);
                *entry = (*entry + a * vector[0]) % rule.m;
            }
        }
    }
    for (idx, v) in sums {
        last.set_cell(idx, vec![v]);
    }
    out.push(last);
    Ok(out)
}

/// One step of a linear periodic non-uniform CA on a scalar configuration.
pub fn pnuca_step(rule: &PnuCaRule, c: &Configuration) -> Result<Configuration, DynamicsError> {
    if c.modulus() != rule.m || c.n() != 1 {
        return Err(DynamicsError::Incompatible {
            got_m: c.modulus(),
            got_n: c.n(),
            want_m: rule.m,
            want_n: 1,
        });
    }
    let mut out = Configuration::empty(rule.m, 1);
    let Some((lo, hi)) = c.support() else {
        return Ok(out);
    };
    let r = rule.radius as i64;
    let period = rule.period as i64;
    for i in lo - r..=hi + r {
        let j = i.rem_euclid(period) as usize;
        let mut acc = 0u64;
        for offset in -r..=r {
            let a = rule.coeff(j, offset);
            if a != 0 {
                acc = (acc + a * c.component(i + offset, 0)) % rule.m;
            }
        }
        if acc != 0 {
            out.set_cell(i, vec![acc]);
        }
    }
    Ok(out)
}

/// Stacks `k` scalar configurations into one over `Z_m^k`: component `j`
/// of cell `i` is slot `j` at cell `i`. This is the homeomorphism under
/// which a linear HOCA and its Frobenius LCA are conjugated.
pub fn stack_to_config(stack: &[Configuration]) -> Configuration {
    assert!(!stack.is_empty());
    let m = stack[0].modulus();
    let k = stack.len();
    let mut out = Configuration::empty(m, k);
    for (j, slot) in stack.iter().enumerate() {
        assert_eq!(slot.n(), 1, "stack slots must be scalar");
        assert_eq!(slot.modulus(), m, "modulus mismatch");
        for (i, vector) in slot.cells() {
            let mut v = out.cells.get(&i).cloned().unwrap_or_else(|| vec![0; k]);
            v[j] = vector[0];
            out.set_cell(i, v);
        }
    }
    out
}

/// Inverse of [`stack_to_config`].
pub fn config_to_stack(c: &Configuration) -> Vec<Configuration> {
    let mut out = vec![Configuration::empty(c.modulus(), 1); c.n()];
    for (i, vector) in c.cells() {
        for (j, &v) in vector.iter().enumerate() {
            if v != 0 {
                out[j].set_cell(i, vec![v]);
            }
        }
    }
    out
}

/// Packs a scalar configuration into blocks of `block` consecutive cells:
/// component `j` of packed cell `i` is scalar cell `i*block + j`. This is
/// the homeomorphism conjugating a periodic non-uniform CA of structural
/// period `block` with its LCA presentation.
pub fn block_pack(c: &Configuration, block: usize) -> Configuration {
    assert_eq!(c.n(), 1, "block packing applies to scalar configurations");
    let mut out = Configuration::empty(c.modulus(), block);
    let b = block as i64;
    for (i, vector) in c.cells() {
        let outer = i.div_euclid(b);
        let j = i.rem_euclid(b) as usize;
        let mut v = out
            .cells
            .get(&outer)
            .cloned()
            .unwrap_or_else(|| vec![0; block]);
        v[j] = vector[0];
        out.set_cell(outer, v);
    }
    out
}

/// Inverse of [`block_pack`].
pub fn block_unpack(c: &Configuration) -> Configuration {
    let mut out = Configuration::empty(c.modulus(), 1);
    let b = c.n() as i64;
    for (i, vector) in c.cells() {
        for (j, &v) in vector.iter().enumerate() {
            if v != 0 {
                out.set_cell(i * b + j as i64, vec![v]);
            }
        }
    }
    out
}

/// An exact dyadic distance: either zero or `1 / 2^exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CantorDistance {
    Zero,
    Dyadic { exponent: u64 },
}

impl CantorDistance {
    pub fn as_f64(&self) -> f64 {
        match self {
            CantorDistance::Zero => 0.0,
            CantorDistance::Dyadic { exponent } => 0.5f64.powi(*exponent as i32),
        }
    }
}

/// `d(c, c') = 1/2^n` where `n` is the first radius at which the
/// configurations disagree; zero when equal.
pub fn cantor_distance(a: &Configuration, b: &Configuration) -> CantorDistance {
    assert_eq!((a.m, a.n), (b.m, b.n), "shape mismatch");
    let radius_of = |c: &Configuration| {
        c.support()
            .map_or(0, |(lo, hi)| lo.unsigned_abs().max(hi.unsigned_abs()))
    };
    let max_radius = radius_of(a).max(radius_of(b));
    for i in 0..=max_radius {
        let idx = i as i64;
        if a.cells.get(&idx) != b.cells.get(&idx) || a.cells.get(&(-idx)) != b.cells.get(&(-idx)) {
            return CantorDistance::Dyadic { exponent: i };
        }
    }
    CantorDistance::Zero
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceFormat {
    Pgm,
    Csv,
}

impl TraceFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            TraceFormat::Pgm => "pgm",
            TraceFormat::Csv => "csv",
        }
    }
}

/// Support bounds per step, the CLI summary for a simulation.
#[derive(Debug, Clone, Serialize)]
pub struct TraceSummary {
    pub steps: u64,
    pub window: (i64, i64),
    pub support: Vec<Option<(i64, i64)>>,
}

#[derive(Debug, Error)]
pub enum TraceError {
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error("{path}: {source}")]
    Io {
        path: std::path::PathBuf,
        source: io::Error,
    },
}

/// Writes the space-time grid of one component as binary PGM (P5), one
/// gray level per state value scaled onto 0..=255.
pub fn write_pgm(rows: &[Vec<u64>], modulus: u64, out: &mut impl Write) -> io::Result<()> {
    let height = rows.len();
    let width = rows.first().map_or(0, Vec::len);
    write!(out, "P5\n{width} {height}\n255\n")?;
    let scale = |v: u64| -> u8 {
        if modulus <= 1 {
            0
        } else {
            ((v as u128 * 255u128) / (modulus as u128 - 1)) as u8
        }
    };
    for row in rows {
        let bytes: Vec<u8> = row.iter().map(|&v| scale(v)).collect();
        out.write_all(&bytes)?;
    }
    Ok(())
}

/// Writes the grid as CSV with a header row of cell indices.
pub fn write_csv(rows: &[Vec<u64>], window: (i64, i64), out: &mut impl Write) -> io::Result<()> {
    let header: Vec<String> = (window.0..=window.1).map(|i| i.to_string()).collect();
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}

/// Space-time grids, one `(steps + 1) x window` table of residues per
/// component.
pub type Grids = Vec<Vec<Vec<u64>>>;

/// Writes one trace file per component grid: `base` itself for a single
/// component, `base` with a `.cJ` infix otherwise. Returns the written
/// paths.
pub fn write_trace_files(
    grids: &[Vec<Vec<u64>>],
    modulus: u64,
    window: (i64, i64),
    format: TraceFormat,
    base: &std::path::Path,
) -> Result<Vec<std::path::PathBuf>, TraceError> {
    let mut files = Vec::with_capacity(grids.len());
    for (j, grid) in grids.iter().enumerate() {
        let path = if grids.len() == 1 {
            base.to_path_buf()
        } else {
            let ext = base
                .extension()
                .and_then(|e| e.to_str())
                .unwrap_or(format.extension());
            base.with_extension(format!("c{j}.{ext}"))
        };
        let mut buf = Vec::new();
        match format {
            TraceFormat::Pgm => write_pgm(grid, modulus, &mut buf),
            TraceFormat::Csv => write_csv(grid, window, &mut buf),
        }
        .map_err(|source| TraceError::Io {
            path: path.clone(),
            source,
        })?;
        std::fs::write(&path, buf).map_err(|source| TraceError::Io {
            path: path.clone(),
            source,
        })?;
        files.push(path);
    }
    Ok(files)
}

/// Evolves `seed` under the rule matrix and writes the space-time trace
/// (one file per component) next to the returned summary.
pub fn export_trace(
    matrix: &LaurentMatrix,
    seed: &Configuration,
    steps: u64,
    window: (i64, i64),
    format: TraceFormat,
    base: &std::path::Path,
) -> Result<(Vec<std::path::PathBuf>, TraceSummary), TraceError> {
    let (grids, summary) = trace_grids(matrix, seed, steps, window)?;
    let files = write_trace_files(&grids, matrix.modulus(), window, format, base)?;
    Ok((files, summary))
}

/// Collects the `(steps + 1) x window` space-time grid per component, plus
/// the support bounds of every step.
pub fn trace_grids(
    matrix: &LaurentMatrix,
    seed: &Configuration,
    steps: u64,
    window: (i64, i64),
) -> Result<(Grids, TraceSummary), DynamicsError> {
    assert!(window.0 <= window.1, "window must be ordered");
    check_compat(matrix, seed)?;
    let n = seed.n();
    let mut grids = vec![Vec::with_capacity(steps as usize + 1); n];
    let mut support = Vec::with_capacity(steps as usize + 1);
    let mut current = seed.clone();
    for t in 0..=steps {
        for (j, grid) in grids.iter_mut().enumerate() {
            grid.push(
                (window.0..=window.1)
                    .map(|i| current.component(i, j))
                    .collect(),
            );
        }
        support.push(current.support());
        if t < steps {
            current = step(matrix, &current)?;
        }
    }
    Ok((
        grids,
        TraceSummary {
            steps,
            window,
            support,
        },
    ))
}
