//! Kasteleyn determinant for lozenge tilings of an M x N x K hexagon.
//!
//! Geometry: the triangular lattice has points (u, v). The white triangle
//! A(u,v) has corners (u,v), (u+1,v), (u+1,v+1); the black triangle B(u,v) has
//! corners (u,v), (u,v+1), (u+1,v+1). A dimer (lozenge) joins A(u,v) to one of
//!
//! * B(u,v)   - horizontal edge, the top face of a cube column,
//! * B(u+1,v) - a face normal to y,
//! * B(u,v-1) - a face normal to x.
//!
//! A column (x, y), 1-based, of height h has its top face on A/B(x-1-h, y-1-h).
//! The brick-wall embedding places A(u,v) at (u-v) - i(u+v) and B(u,v) at
//! (u-v-1) - i(u+v), so horizontal edges join vertices with equal imaginary part
//! and A(u,v) satisfies (Re + Im)/2 = -v.
//!
//! Horizontal edges carry q^((Re w + Im w)/2) = q^-v: lowering a top face by one
//! level (adding a cube) multiplies the weight by q. The half exponent makes the
//! determinant a function of q rather than q^2. The remaining constant is the
//! weight of the empty pile, divided out explicitly.

use crate::error::{Error, Result};
use crate::model::{BoxShape, HeightConfig};
use nalgebra::DMatrix;
use serde::Serialize;
use std::collections::HashMap;

const MAX_DIM: usize = 2000;
const PIVOT_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Tri {
    pub u: i64,
    pub v: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Direction {
    Horizontal,
    Up,
    Down,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub white: usize,
    pub black: usize,
    pub dir: Direction,
}

#[derive(Debug, Clone, Serialize)]
pub struct HexEmbedding {
    pub shape: BoxShape,
    pub white: Vec<Tri>,
    pub black: Vec<Tri>,
    pub edges: Vec<Edge>,
    white_index: HashMap<Tri, usize>,
    black_index: HashMap<Tri, usize>,
}

/// Brick-wall position (Re, Im) of a white vertex.
pub fn white_position(t: Tri) -> (i64, i64) {
    (t.u - t.v, -(t.u + t.v))
}

/// Brick-wall position (Re, Im) of a black vertex.
pub fn black_position(t: Tri) -> (i64, i64) {
    (t.u - t.v - 1, -(t.u + t.v))
}

/// Lozenges of a configuration, as (white, black) triangle pairs.
fn lozenges(m: i64, n: i64, k: i64, height: impl Fn(i64, i64) -> i64) -> Vec<(Tri, Tri)> {
    // Heights with the boundary conventions: full along x = 0 and y = 0,
    // empty beyond x = M and y = N.
    let h = |x: i64, y: i64| -> i64 {
        if x > m || y > n {
            0
        } else if x == 0 || y == 0 {
            k
        } else {
            height(x, y)
        }
    };
    let mut out = Vec::with_capacity((m * n + n * k + m * k) as usize);
    for x in 1..=m {
        for y in 1..=n {
            let t = Tri { u: x - 1 - h(x, y), v: y - 1 - h(x, y) };
            out.push((t, t));
        }
    }
    for y in 1..=n {
        for xx in 0..=m {
            for z in h(xx + 1, y) + 1..=h(xx, y) {
                out.push((Tri { u: xx - z, v: y - z }, Tri { u: xx - z, v: y - z - 1 }));
            }
        }
    }
    for x in 1..=m {
        for yy in 0..=n {
            for z in h(x, yy + 1) + 1..=h(x, yy) {
                out.push((Tri { u: x - 1 - z, v: yy - z }, Tri { u: x - z, v: yy - z }));
            }
        }
    }
    out
}

fn sides(shape: BoxShape) -> Result<(i64, i64, i64)> {
    let k = shape.finite_k().ok_or(Error::InfiniteHeight("the Kasteleyn matrix"))?;
    Ok((i64::from(shape.m), i64::from(shape.n), i64::from(k)))
}

pub fn build_embedding(shape: BoxShape) -> Result<HexEmbedding> {
    let (m, n, k) = sides(shape)?;
    let mut white: Vec<Tri> = Vec::new();
    let mut black: Vec<Tri> = Vec::new();
    for (w, b) in lozenges(m, n, k, |_, _| 0) {
        white.push(w);
        black.push(b);
    }
    white.sort();
    black.sort();
    let white_index: HashMap<Tri, usize> = white.iter().enumerate().map(|(i, &t)| (t, i)).collect();
    let black_index: HashMap<Tri, usize> = black.iter().enumerate().map(|(i, &t)| (t, i)).collect();

    let mut edges = Vec::new();
    for (wi, w) in white.iter().enumerate() {
        let nbrs = [
            (Tri { u: w.u, v: w.v }, Direction::Horizontal),
            (Tri { u: w.u + 1, v: w.v }, Direction::Down),
            (Tri { u: w.u, v: w.v - 1 }, Direction::Up),
        ];
        for (b, dir) in nbrs {
            if let Some(&bi) = black_index.get(&b) {
                edges.push(Edge { white: wi, black: bi, dir });
            }
        }
    }
    let emb = HexEmbedding { shape, white, black, edges, white_index, black_index };
    emb.check_faces()?;
    Ok(emb)
}

impl HexEmbedding {
    pub fn vertex_count(&self) -> usize {
        self.white.len() + self.black.len()
    }

    /// Lattice points whose six surrounding triangles all lie in the region.
    pub fn interior_faces(&self) -> Vec<(i64, i64)> {
        let mut pts: Vec<(i64, i64)> = self.white.iter().map(|t| (t.u, t.v)).collect();
        pts.sort();
        pts.dedup();
        pts.into_iter()
            .filter(|&(u, v)| {
                let (ws, bs) = face_triangles(u, v);
                ws.iter().all(|t| self.white_index.contains_key(t))
                    && bs.iter().all(|t| self.black_index.contains_key(t))
            })
            .collect()
    }

    /// Edges bounding the face around lattice point (u, v).
    pub fn face_edge_count(&self, u: i64, v: i64) -> usize {
        let (ws, bs) = face_triangles(u, v);
        self.edges
            .iter()
            .filter(|e| ws.contains(&self.white[e.white]) && bs.contains(&self.black[e.black]))
            .count()
    }

    /// With every weight positive, each face must have 6 = 2 mod 4 edges.
    fn check_faces(&self) -> Result<()> {
        for (u, v) in self.interior_faces() {
            let c = self.face_edge_count(u, v);
            if c != 6 {
                return Err(Error::InvalidArgument(format!(
                    "face at ({u}, {v}) has {c} edges; positive weights need 6"
                )));
            }
        }
        Ok(())
    }

    /// Exponent of q on an edge: (Re w + Im w)/2 when horizontal, else 0.
    pub fn exponent(&self, e: &Edge) -> i64 {
        match e.dir {
            Direction::Horizontal => {
                let (re, im) = white_position(self.white[e.white]);
                (re + im) / 2
            }
            Direction::Up | Direction::Down => 0,
        }
    }

    /// Edge list of the perfect matching for a height configuration.
    pub fn matching_of(&self, c: &HeightConfig) -> Result<Vec<Edge>> {
        let (m, n, k) = sides(self.shape)?;
        if c.m != m as usize || c.n != n as usize {
            return Err(Error::InvalidArgument("configuration does not fit the box".into()));
        }
        lozenges(m, n, k, |x, y| i64::from(c.get(x as usize - 1, y as usize - 1)))
            .into_iter()
            .map(|(w, b)| {
                let white = self.white_index.get(&w);
                let black = self.black_index.get(&b);
                let found = white.zip(black).and_then(|(&wi, &bi)| {
                    self.edges.iter().find(|e| e.white == wi && e.black == bi).copied()
                });
                found.ok_or_else(|| {
                    Error::InvalidArgument(format!("lozenge {w:?}-{b:?} is not a region edge"))
                })
            })
            .collect()
    }

    /// Weighted adjacency matrix with entries q^((Re w + Im w)/2) on horizontal edges.
    pub fn matrix(&self, q: f64) -> DMatrix<f64> {
        let d = self.white.len();
        let mut k = DMatrix::zeros(d, d);
        for e in &self.edges {
            k[(e.white, e.black)] = q.powf(self.exponent(e) as f64);
        }
        k
    }

    /// Integer potentials (alpha, beta) with e + alpha[w] - beta[b] >= 0 on
    /// every edge and = 0 on `reference`, which must be a minimum-exponent
    /// matching. Bellman-Ford on the residual graph: blacks start at 0, a
    /// matched white sits at its partner's distance minus the edge exponent.
    fn potentials(&self, reference: &[Edge]) -> Result<(Vec<i64>, Vec<i64>)> {
        let d = self.white.len();
        let mut alpha = vec![i64::MAX; d];
        let mut beta = vec![0i64; d];
        let mut partner = vec![usize::MAX; d];
        let mut reference_exp = vec![0i64; d];
        for e in reference {
            partner[e.white] = e.black;
            reference_exp[e.white] = self.exponent(e);
        }
        for round in 0..=2 * d {
            for w in 0..d {
                alpha[w] = beta[partner[w]] - reference_exp[w];
            }
            let mut changed = false;
            for e in &self.edges {
                if partner[e.white] == e.black {
                    continue;
                }
                let through = alpha[e.white] + self.exponent(e);
                if through < beta[e.black] {
                    beta[e.black] = through;
                    changed = true;
                }
            }
            if !changed {
                return Ok((alpha, beta));
            }
            if round == 2 * d {
                break;
            }
        }
        Err(Error::InvalidArgument("reference matching is not of minimum exponent".into()))
    }
}

fn face_triangles(u: i64, v: i64) -> ([Tri; 3], [Tri; 3]) {
    (
        [Tri { u, v }, Tri { u: u - 1, v }, Tri { u: u - 1, v: v - 1 }],
        [Tri { u, v }, Tri { u, v: v - 1 }, Tri { u: u - 1, v: v - 1 }],
    )
}

fn empty_reference(emb: &HexEmbedding) -> Result<Vec<Edge>> {
    emb.matching_of(&HeightConfig::zeros(emb.shape.m as usize, emb.shape.n as usize))
}

/// ln |det K| by LU with full pivoting on a gauge-transformed matrix.
///
/// Plain scaling is not enough at small q: the condition number grows like a
/// power of 1/q with the box size. Scaling row w by q^alpha[w] and column b by
/// q^-beta[b] (see `potentials`) turns K into the identity pattern of the
/// empty pile plus entries q^r with r >= 0, while changing det K by exactly
/// the empty pile's weight.
pub fn log_abs_det(emb: &HexEmbedding, q: f64) -> Result<f64> {
    let d = emb.white.len();
    if d > MAX_DIM {
        return Err(Error::OracleTooLarge(format!("matrix dimension {d} exceeds {MAX_DIM}")));
    }
    if !(q > 0.0 && q <= 1.0) {
        return Err(Error::InvalidArgument(format!("q = {q} outside (0, 1]")));
    }
    let reference = empty_reference(emb)?;
    let (alpha, beta) = emb.potentials(&reference)?;
    let ln_q = q.ln();
    let mut k = DMatrix::zeros(d, d);
    for e in &emb.edges {
        let reduced = emb.exponent(e) + alpha[e.white] - beta[e.black];
        k[(e.white, e.black)] = (ln_q * reduced as f64).exp();
    }
    let lu = k.full_piv_lu();
    let u = lu.u();
    let mut log_det = 0.0;
    for i in 0..d {
        let p = u[(i, i)].abs();
        if !(p >= PIVOT_FLOOR) {
            return Err(Error::SingularMatrix { pivot: p, column: i });
        }
        log_det += p.ln();
    }
    let shift: i64 = beta.iter().sum::<i64>() - alpha.iter().sum::<i64>();
    Ok(log_det + ln_q * shift as f64)
}

/// ln of the partition function: ln |det K| minus the empty pile's weight.
pub fn kasteleyn_log_partition(shape: BoxShape, q: f64) -> Result<f64> {
    if !(q > 0.0 && q <= 1.0) {
        return Err(Error::InvalidArgument(format!("q = {q} outside (0, 1]")));
    }
    let emb = build_embedding(shape)?;
    let ln_q = q.ln();
    let reference: f64 = empty_reference(&emb)?
        .iter()
        .map(|e| ln_q * emb.exponent(e) as f64)
        .sum();
    Ok(log_abs_det(&emb, q)? - reference)
}

pub fn kasteleyn_partition(shape: BoxShape, q: f64) -> Result<f64> {
    kasteleyn_log_partition(shape, q).map(f64::exp)
}
