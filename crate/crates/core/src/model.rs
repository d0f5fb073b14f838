//! Box shapes, height configurations and the brute-force partition function.

use crate::error::{Error, Result};
use crate::special::NeumaierSum;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Height of the box: a finite number of layers or unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Height {
    Finite(u32),
    Infinite,
}

impl fmt::Display for Height {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Height::Finite(k) => write!(f, "{k}"),
            Height::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BoxShape {
    pub m: u32,
    pub n: u32,
    pub k: Height,
}

impl BoxShape {
    pub fn new(m: u32, n: u32, k: u32) -> Result<Self> {
        if m == 0 || n == 0 || k == 0 {
            return Err(Error::InvalidArgument(format!(
                "box sides must be positive, got ({m}, {n}, {k})"
            )));
        }
        Ok(Self { m, n, k: Height::Finite(k) })
    }

    pub fn infinite(m: u32, n: u32) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::InvalidArgument(format!(
                "box sides must be positive, got ({m}, {n})"
            )));
        }
        Ok(Self { m, n, k: Height::Infinite })
    }

    pub fn finite_k(&self) -> Option<u32> {
        match self.k {
            Height::Finite(k) => Some(k),
            Height::Infinite => None,
        }
    }

    /// Normalising volume: twice the dimer count for a finite box, the base
    /// area when the height is unbounded.
    pub fn volume(&self) -> f64 {
        let (m, n) = (f64::from(self.m), f64::from(self.n));
        match self.k {
            Height::Finite(k) => {
                let k = f64::from(k);
                2.0 * (m * n + n * k + m * k)
            }
            Height::Infinite => m * n,
        }
    }
}

impl fmt::Display for BoxShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}x{}", self.m, self.n, self.k)
    }
}

/// Continuum parametrisation: sides a, b, c (None = unbounded) and mesh eps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledShape {
    pub a: f64,
    pub b: f64,
    pub c: Option<f64>,
    pub eps: f64,
}

const INTEGRALITY_TOL: f64 = 1e-9;

fn lattice_side(x: f64, eps: f64, name: &str) -> Result<u32> {
    let t = x / eps;
    let r = t.round();
    if (t - r).abs() > INTEGRALITY_TOL || r < 1.0 || r > f64::from(u32::MAX) {
        return Err(Error::InvalidArgument(format!(
            "{name}/eps = {t} is not a positive integer"
        )));
    }
    Ok(r as u32)
}

impl ScaledShape {
    pub fn finite(a: f64, b: f64, c: f64, eps: f64) -> Result<Self> {
        let s = Self { a, b, c: Some(c), eps };
        s.validate()?;
        Ok(s)
    }

    pub fn infinite(a: f64, b: f64, eps: f64) -> Result<Self> {
        let s = Self { a, b, c: None, eps };
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<()> {
        let sides_ok = self.a > 0.0 && self.b > 0.0 && self.c.is_none_or(|c| c > 0.0);
        if !sides_ok || !(self.eps > 0.0) || !self.a.is_finite() || !self.b.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "scaled shape needs positive sides and eps, got {self:?}"
            )));
        }
        Ok(())
    }

    pub fn from_box(shape: BoxShape, eps: f64) -> Result<Self> {
        let c = shape.finite_k().map(|k| f64::from(k) * eps);
        let s = Self {
            a: f64::from(shape.m) * eps,
            b: f64::from(shape.n) * eps,
            c,
            eps,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn to_box(&self) -> Result<BoxShape> {
        let m = lattice_side(self.a, self.eps, "a")?;
        let n = lattice_side(self.b, self.eps, "b")?;
        match self.c {
            Some(c) => BoxShape::new(m, n, lattice_side(c, self.eps, "c")?),
            None => BoxShape::infinite(m, n),
        }
    }
}

/// Column heights h[i][j] of a pile of cubes, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HeightConfig {
    pub m: usize,
    pub n: usize,
    pub h: Vec<u32>,
}

impl HeightConfig {
    pub fn zeros(m: usize, n: usize) -> Self {
        Self { m, n, h: vec![0; m * n] }
    }

    pub fn from_rows(rows: &[Vec<u32>]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if m == 0 || n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidArgument("ragged or empty height array".into()));
        }
        Ok(Self { m, n, h: rows.concat() })
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.h[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.h[i * self.n + j] = v;
    }

    /// Largest height allowed at (i, j) given its upper and left neighbours.
    fn cap(&self, i: usize, j: usize, k: u32) -> u32 {
        let mut c = k;
        if i > 0 {
            c = c.min(self.get(i - 1, j));
        }
        if j > 0 {
            c = c.min(self.get(i, j - 1));
        }
        c
    }

    /// Heights bounded by `k` and non-increasing along rows and columns.
    pub fn is_valid(&self, k: Height) -> bool {
        let k = match k {
            Height::Finite(k) => k,
            Height::Infinite => u32::MAX,
        };
        (0..self.m).all(|i| (0..self.n).all(|j| self.get(i, j) <= self.cap(i, j, k)))
    }

    /// Number of cubes.
    pub fn energy(&self) -> u64 {
        self.h.iter().map(|&v| u64::from(v)).sum()
    }
}

pub fn config_energy(c: &HeightConfig) -> u64 {
    c.energy()
}

/// Size guard for the enumeration oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleLimits {
    pub max_cells: u32,
    pub max_height: u32,
}

impl Default for OracleLimits {
    fn default() -> Self {
        Self { max_cells: 16, max_height: 8 }
    }
}

impl OracleLimits {
    fn check(&self, shape: BoxShape) -> Result<u32> {
        let k = shape.finite_k().ok_or(Error::InfiniteHeight("the enumeration oracle"))?;
        let cells = u64::from(shape.m) * u64::from(shape.n);
        if cells > u64::from(self.max_cells) || k > self.max_height {
            return Err(Error::OracleTooLarge(format!(
                "{shape} exceeds m*n <= {}, k <= {}",
                self.max_cells, self.max_height
            )));
        }
        Ok(k)
    }
}

/// Odometer over height arrays in lexicographic row-major order.
///
/// A cell's bound depends only on cells before it, and zero is always
/// admissible, so advancing the last incrementable cell and zeroing the
/// suffix visits every valid array exactly once.
#[derive(Debug, Clone)]
pub struct ConfigIter {
    cur: Option<HeightConfig>,
    k: u32,
}

impl Iterator for ConfigIter {
    type Item = HeightConfig;

    fn next(&mut self) -> Option<HeightConfig> {
        let out = self.cur.clone()?;
        let c = self.cur.as_mut()?;
        let mut advanced = false;
        for idx in (0..c.h.len()).rev() {
            let (i, j) = (idx / c.n, idx % c.n);
            if c.h[idx] < c.cap(i, j, self.k) {
                c.h[idx] += 1;
                c.h[idx + 1..].fill(0);
                advanced = true;
                break;
            }
        }
        if !advanced {
            self.cur = None;
        }
        Some(out)
    }
}

pub fn enumerate_configs(shape: BoxShape) -> Result<ConfigIter> {
    enumerate_configs_with(shape, OracleLimits::default())
}

pub fn enumerate_configs_with(shape: BoxShape, limits: OracleLimits) -> Result<ConfigIter> {
    let k = limits.check(shape)?;
    Ok(ConfigIter {
        cur: Some(HeightConfig::zeros(shape.m as usize, shape.n as usize)),
        k,
    })
}

/// Number of configurations with each volume: Z as a polynomial in q.
pub fn energy_polynomial(shape: BoxShape, limits: OracleLimits) -> Result<Vec<u64>> {
    let mut counts = Vec::new();
    for c in enumerate_configs_with(shape, limits)? {
        let e = c.energy() as usize;
        if counts.len() <= e {
            counts.resize(e + 1, 0);
        }
        counts[e] += 1;
    }
    Ok(counts)
}

fn check_q(q: f64) -> Result<()> {
    if !(q > 0.0 && q <= 1.0) {
        return Err(Error::InvalidArgument(format!("q = {q} outside (0, 1]")));
    }
    Ok(())
}

/// Sum of q^volume over every configuration in the box.
pub fn oracle_partition(shape: BoxShape, q: f64) -> Result<f64> {
    oracle_partition_with(shape, q, OracleLimits::default())
}

pub fn oracle_partition_with(shape: BoxShape, q: f64, limits: OracleLimits) -> Result<f64> {
    check_q(q)?;
    let acc: NeumaierSum = enumerate_configs_with(shape, limits)?
        .map(|c| q.powf(c.energy() as f64))
        .collect();
    Ok(acc.value())
}
