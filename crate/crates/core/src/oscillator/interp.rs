//! Scattered-to-grid interpolation of the sampled characteristic function.
//!
//! Samples are thinned to one per small cell, triangulated (Delaunay), given
//! vertex gradients from a weighted local quadratic fit, and interpolated with
//! the Clough–Tocher C1 cubic split of each triangle at its centroid.

use delaunator::{triangulate, Point};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use std::collections::HashSet;

use super::{ChiSample, OscError};
use crate::linalg::c;

/// Odd-sized square grid over `[-radius, radius]²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub radius: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn new(radius: f64, points: usize) -> Result<Self, OscError> {
        if !(radius.is_finite() && radius > 0.0) || points < 3 || points.is_multiple_of(2) {
            return Err(OscError::Interpolation(format!(
                "grid needs radius > 0 and an odd point count >= 3, got {radius}, {points}"
            )));
        }
        Ok(Self { radius, points })
    }

    pub fn step(&self) -> f64 {
        2.0 * self.radius / (self.points - 1) as f64
    }

    pub fn coord(&self, i: usize) -> f64 {
        -self.radius + i as f64 * self.step()
    }

    /// `ξ` at row `iy`, column `ix`.
    pub fn xi(&self, ix: usize, iy: usize) -> Complex64 {
        c(self.coord(ix), self.coord(iy))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterpOptions {
    /// Side of the thinning cell.
    pub thin_cell: f64,
    /// Grid points farther than this from every sample are set to zero.
    pub cutoff: f64,
}

impl Default for InterpOptions {
    fn default() -> Self {
        Self {
            thin_cell: 0.04,
            cutoff: 0.5,
        }
    }
}

/// Gridded field, row-major with `y` as the row index.
#[derive(Debug, Clone, PartialEq)]
pub struct ChiGrid {
    pub spec: GridSpec,
    pub values: Vec<Complex64>,
    /// Points outside the sample hull or beyond the cutoff, set to zero.
    pub flagged: Vec<bool>,
    /// Vertices kept after thinning.
    pub vertices: usize,
    /// Largest `|χ|` on the convex hull of the samples. Values far from zero
    /// mean the samples stop before `χ` has decayed.
    pub hull_chi_max: f64,
}

impl ChiGrid {
    pub fn at(&self, ix: usize, iy: usize) -> Complex64 {
        self.values[iy * self.spec.points + ix]
    }

    pub fn flagged_count(&self) -> usize {
        self.flagged.iter().filter(|&&f| f).count()
    }

    /// Fraction of grid points inside the disc `|ξ| ≤ radius` that are
    /// flagged.
    pub fn gap_fraction(&self) -> f64 {
        let p = self.spec.points;
        let (mut inside, mut gaps) = (0usize, 0usize);
        for iy in 0..p {
            for ix in 0..p {
                if self.spec.xi(ix, iy).norm() <= self.spec.radius {
                    inside += 1;
                    gaps += self.flagged[iy * p + ix] as usize;
                }
            }
        }
        gaps as f64 / inside.max(1) as f64
    }

    /// Builds a grid directly from a function, e.g. an exact `χ`.
    pub fn from_fn(spec: GridSpec, f: impl Fn(Complex64) -> Complex64) -> Self {
        let p = spec.points;
        let mut values = Vec::with_capacity(p * p);
        for iy in 0..p {
            for ix in 0..p {
                values.push(f(spec.xi(ix, iy)));
            }
        }
        Self {
            spec,
            values,
            flagged: vec![false; p * p],
            vertices: 0,
            hull_chi_max: 0.0,
        }
    }

    /// `F(ξ) ← (F(ξ) + F(-ξ)*)/2` and `F(0) = 1`.
    pub fn symmetrize(&mut self) {
        let p = self.spec.points;
        let n = p * p;
        for k in 0..n / 2 {
            let m = n - 1 - k;
            let avg = (self.values[k] + self.values[m].conj()) * 0.5;
            self.values[k] = avg;
            self.values[m] = avg.conj();
        }
        self.values[n / 2] = c(1.0, 0.0);
    }
}

/// Deterministic thinning: one point per cell, first one wins. The origin
/// with `χ = 1` is inserted ahead of every sample.
fn thin(samples: &[ChiSample], cell: f64) -> (Vec<Point>, Vec<Complex64>) {
    let mut seen = HashSet::new();
    let mut pts = Vec::new();
    let mut vals = Vec::new();
    let origin = std::iter::once((c(0.0, 0.0), c(1.0, 0.0)));
    for (xi, chi) in origin.chain(samples.iter().map(|s| (s.xi, s.chi))) {
        let key = ((xi.re / cell).floor() as i64, (xi.im / cell).floor() as i64);
        if seen.insert(key) {
            pts.push(Point { x: xi.re, y: xi.im });
            vals.push(chi);
        }
    }
    (pts, vals)
}

/// Uniform bucket index over a bounding box.
struct Buckets {
    x0: f64,
    y0: f64,
    size: f64,
    nx: usize,
    ny: usize,
    cells: Vec<Vec<usize>>,
}

impl Buckets {
    fn new(x0: f64, y0: f64, x1: f64, y1: f64, size: f64) -> Self {
        let nx = (((x1 - x0) / size).ceil() as usize).max(1);
        let ny = (((y1 - y0) / size).ceil() as usize).max(1);
        Self {
            x0,
            y0,
            size,
            nx,
            ny,
            cells: vec![Vec::new(); nx * ny],
        }
    }

    fn cell_of(&self, x: f64, y: f64) -> (isize, isize) {
        (
            ((x - self.x0) / self.size).floor() as isize,
            ((y - self.y0) / self.size).floor() as isize,
        )
    }

    fn clamp(&self, i: isize, j: isize) -> (usize, usize) {
        (
            i.clamp(0, self.nx as isize - 1) as usize,
            j.clamp(0, self.ny as isize - 1) as usize,
        )
    }

    fn insert_box(&mut self, id: usize, xa: f64, ya: f64, xb: f64, yb: f64) {
        let (i0, j0) = self.cell_of(xa, ya);
        let (i1, j1) = self.cell_of(xb, yb);
        let (i0, j0) = self.clamp(i0, j0);
        let (i1, j1) = self.clamp(i1, j1);
        for j in j0..=j1 {
            for i in i0..=i1 {
                self.cells[j * self.nx + i].push(id);
            }
        }
    }

    fn get(&self, i: isize, j: isize) -> &[usize] {
        if i < 0 || j < 0 || i >= self.nx as isize || j >= self.ny as isize {
            return &[];
        }
        &self.cells[j as usize * self.nx + i as usize]
    }
}

/// Weighted quadratic least-squares gradient at vertex `v` from its
/// neighbours; falls back to a linear fit with fewer than five neighbours.
fn vertex_gradient(v: usize, nb: &[usize], pts: &[Point], vals: &[Complex64]) -> [Complex64; 2] {
    let p = &pts[v];
    let cols = if nb.len() >= 5 { 5 } else { 2 };
    if nb.len() < 2 {
        return [c(0.0, 0.0); 2];
    }
    let mut a = DMatrix::<f64>::zeros(nb.len(), cols);
    let mut b_re = DVector::<f64>::zeros(nb.len());
    let mut b_im = DVector::<f64>::zeros(nb.len());
    for (r, &j) in nb.iter().enumerate() {
        let dx = pts[j].x - p.x;
        let dy = pts[j].y - p.y;
        let w = 1.0 / dx.hypot(dy).max(1e-12);
        let row = [dx, dy, dx * dx, dx * dy, dy * dy];
        for k in 0..cols {
            a[(r, k)] = w * row[k];
        }
        let df = vals[j] - vals[v];
        b_re[r] = w * df.re;
        b_im[r] = w * df.im;
    }
    let svd = a.svd(true, true);
    let sol = |b: &DVector<f64>| svd.solve(b, 1e-12).unwrap_or_else(|_| DVector::zeros(cols));
    let (gr, gi) = (sol(&b_re), sol(&b_im));
    [c(gr[0], gi[0]), c(gr[1], gi[1])]
}

/// Clough–Tocher interpolant over a Delaunay triangulation.
pub struct CloughTocher {
    pts: Vec<Point>,
    vals: Vec<Complex64>,
    grads: Vec<[Complex64; 2]>,
    triangles: Vec<[usize; 3]>,
    tri_index: Buckets,
    vertex_index: Buckets,
    hull: Vec<usize>,
}

fn grad_dot(g: &[Complex64; 2], dx: f64, dy: f64) -> Complex64 {
    g[0] * dx + g[1] * dy
}

impl CloughTocher {
    pub fn new(pts: Vec<Point>, vals: Vec<Complex64>) -> Result<Self, OscError> {
        if pts.len() < 3 {
            return Err(OscError::Interpolation("fewer than 3 distinct samples".into()));
        }
        let tri = triangulate(&pts);
        if tri.is_empty() {
            return Err(OscError::Interpolation("samples are collinear".into()));
        }
        let triangles: Vec<[usize; 3]> = tri
            .triangles
            .chunks_exact(3)
            .map(|t| [t[0], t[1], t[2]])
            .collect();

        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); pts.len()];
        for t in &triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        for l in adj.iter_mut() {
            l.sort_unstable();
            l.dedup();
        }
        let grads: Vec<[Complex64; 2]> = (0..pts.len())
            .into_par_iter()
            .map(|v| {
                let mut ring: Vec<usize> = adj[v].clone();
                for &u in &adj[v] {
                    ring.extend(adj[u].iter().copied());
                }
                ring.sort_unstable();
                ring.dedup();
                ring.retain(|&u| u != v);
                vertex_gradient(v, &ring, &pts, &vals)
            })
            .collect();

        let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
        for p in &pts {
            x0 = x0.min(p.x);
            y0 = y0.min(p.y);
            x1 = x1.max(p.x);
            y1 = y1.max(p.y);
        }
        let span = (x1 - x0).max(y1 - y0).max(1e-9);
        let size = (span / 200.0).max(1e-6);
        let mut tri_index = Buckets::new(x0, y0, x1, y1, size);
        for (id, t) in triangles.iter().enumerate() {
            let xs = t.map(|i| pts[i].x);
            let ys = t.map(|i| pts[i].y);
            tri_index.insert_box(
                id,
                xs.iter().cloned().fold(f64::MAX, f64::min),
                ys.iter().cloned().fold(f64::MAX, f64::min),
                xs.iter().cloned().fold(f64::MIN, f64::max),
                ys.iter().cloned().fold(f64::MIN, f64::max),
            );
        }
        let mut vertex_index = Buckets::new(x0, y0, x1, y1, size);
        for (id, p) in pts.iter().enumerate() {
            vertex_index.insert_box(id, p.x, p.y, p.x, p.y);
        }
        Ok(Self {
            pts,
            vals,
            grads,
            triangles,
            tri_index,
            vertex_index,
            hull: tri.hull,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.pts.len()
    }

    pub fn hull_values(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.hull.iter().map(|&i| self.vals[i])
    }

    fn barycentric(&self, t: &[usize; 3], x: f64, y: f64) -> [f64; 3] {
        let (a, b, cc) = (&self.pts[t[0]], &self.pts[t[1]], &self.pts[t[2]]);
        let det = (b.y - cc.y) * (a.x - cc.x) + (cc.x - b.x) * (a.y - cc.y);
        let l0 = ((b.y - cc.y) * (x - cc.x) + (cc.x - b.x) * (y - cc.y)) / det;
        let l1 = ((cc.y - a.y) * (x - cc.x) + (a.x - cc.x) * (y - cc.y)) / det;
        [l0, l1, 1.0 - l0 - l1]
    }

    fn locate(&self, x: f64, y: f64) -> Option<(usize, [f64; 3])> {
        let (i, j) = self.tri_index.cell_of(x, y);
        let mut best: Option<(usize, [f64; 3], f64)> = None;
        for &id in self.tri_index.get(i, j) {
            let l = self.barycentric(&self.triangles[id], x, y);
            let worst = l[0].min(l[1]).min(l[2]);
            if worst >= -1e-12 {
                return Some((id, l));
            }
            if worst >= -1e-9 && best.is_none_or(|b| worst > b.2) {
                best = Some((id, l, worst));
            }
        }
        best.map(|(id, l, _)| (id, l))
    }

    /// Distance to the nearest vertex, if one lies within `radius`.
    pub fn nearest_within(&self, x: f64, y: f64, radius: f64) -> Option<f64> {
        let (i, j) = self.vertex_index.cell_of(x, y);
        let reach = (radius / self.vertex_index.size).ceil() as isize;
        let mut best = f64::INFINITY;
        for dj in -reach..=reach {
            for di in -reach..=reach {
                for &v in self.vertex_index.get(i + di, j + dj) {
                    let d = (self.pts[v].x - x).hypot(self.pts[v].y - y);
                    best = best.min(d);
                }
            }
        }
        (best <= radius).then_some(best)
    }

    /// Control point next to the edge `a → b` of the micro triangle
    /// `(a, b, g)`, from a normal derivative linear along the edge.
    fn edge_middle(&self, a: usize, b: usize, g: (f64, f64), b210: Complex64, b120: Complex64) -> Complex64 {
        let (pa, pb) = (&self.pts[a], &self.pts[b]);
        let (ex, ey) = (pb.x - pa.x, pb.y - pa.y);
        let len = ex.hypot(ey);
        let (tx, ty) = (ex / len, ey / len);
        let (nx, ny) = (-ty, tx);
        let (wx, wy) = (g.0 - 0.5 * (pa.x + pb.x), g.1 - 0.5 * (pa.y + pb.y));
        let w_n = wx * nx + wy * ny;
        let w_t = wx * tx + wy * ty;
        let n0 = grad_dot(&self.grads[a], nx, ny);
        let n1 = grad_dot(&self.grads[b], nx, ny);
        let mid = (n0 + n1) * (0.5 * w_n) + (b120 - b210) * (3.0 * w_t / len);
        mid / 3.0 + (b210 + b120) * 0.5
    }

    fn eval_in(&self, t: &[usize; 3], l: [f64; 3]) -> Complex64 {
        let p = t.map(|i| (self.pts[i].x, self.pts[i].y));
        let g = (
            (p[0].0 + p[1].0 + p[2].0) / 3.0,
            (p[0].1 + p[1].1 + p[2].1) / 3.0,
        );
        let f = t.map(|i| self.vals[i]);
        // Control points toward the centroid and along each edge.
        let r: [Complex64; 3] = std::array::from_fn(|k| {
            f[k] + grad_dot(&self.grads[t[k]], (g.0 - p[k].0) / 3.0, (g.1 - p[k].1) / 3.0)
        });
        let along = |k: usize, m: usize| {
            f[k] + grad_dot(&self.grads[t[k]], (p[m].0 - p[k].0) / 3.0, (p[m].1 - p[k].1) / 3.0)
        };
        // Edge k runs from vertex k to vertex k+1.
        let e: [(Complex64, Complex64); 3] = std::array::from_fn(|k| {
            let m = (k + 1) % 3;
            (along(k, m), along(m, k))
        });
        let s: [Complex64; 3] = std::array::from_fn(|k| {
            let m = (k + 1) % 3;
            self.edge_middle(t[k], t[m], g, e[k].0, e[k].1)
        });
        // q_k sits on the interior edge k → centroid.
        let q: [Complex64; 3] = std::array::from_fn(|k| {
            let prev = (k + 2) % 3;
            (r[k] + s[k] + s[prev]) / 3.0
        });
        let center = (q[0] + q[1] + q[2]) / 3.0;

        // Micro triangle opposite the smallest barycentric coordinate.
        let kmin = (0..3)
            .min_by(|&a, &b| l[a].partial_cmp(&l[b]).unwrap())
            .unwrap();
        let i = (kmin + 1) % 3;
        let j = (kmin + 2) % 3;
        let mu_g = 3.0 * l[kmin];
        let mu_i = l[i] - l[kmin];
        let mu_j = l[j] - l[kmin];
        // Edge i → j is edge index i.
        let (b_ij, b_ji) = e[i];
        let s_ij = s[i];
        mu_i.powi(3) * f[i]
            + mu_j.powi(3) * f[j]
            + mu_g.powi(3) * center
            + 3.0 * mu_i * mu_i * mu_j * b_ij
            + 3.0 * mu_i * mu_j * mu_j * b_ji
            + 3.0 * mu_i * mu_i * mu_g * r[i]
            + 3.0 * mu_j * mu_j * mu_g * r[j]
            + 3.0 * mu_i * mu_g * mu_g * q[i]
            + 3.0 * mu_j * mu_g * mu_g * q[j]
            + 6.0 * mu_i * mu_j * mu_g * s_ij
    }

    /// Interpolated value, or `None` outside the triangulation.
    pub fn eval(&self, x: f64, y: f64) -> Option<Complex64> {
        self.locate(x, y).map(|(id, l)| self.eval_in(&self.triangles[id], l))
    }
}

/// Interpolates samples onto `spec`, then enforces `χ(0) = 1` and Hermitian
/// symmetry.
pub fn interpolate_chi(
    samples: &[ChiSample],
    spec: GridSpec,
    opts: InterpOptions,
) -> Result<ChiGrid, OscError> {
    if samples.is_empty() {
        return Err(OscError::Interpolation("no samples".into()));
    }
    let (pts, vals) = thin(samples, opts.thin_cell);
    let ct = CloughTocher::new(pts, vals)?;
    let p = spec.points;
    let rows: Vec<Vec<(Complex64, bool)>> = (0..p)
        .into_par_iter()
        .map(|iy| {
            (0..p)
                .map(|ix| {
                    let xi = spec.xi(ix, iy);
                    if ct.nearest_within(xi.re, xi.im, opts.cutoff).is_none() {
                        return (c(0.0, 0.0), true);
                    }
                    match ct.eval(xi.re, xi.im) {
                        Some(v) => (v, false),
                        None => (c(0.0, 0.0), true),
                    }
                })
                .collect()
        })
        .collect();
    let mut values = Vec::with_capacity(p * p);
    let mut flagged = Vec::with_capacity(p * p);
    for row in rows {
        for (v, f) in row {
            values.push(v);
            flagged.push(f);
        }
    }
    let hull_chi_max = ct.hull_values().map(|z| z.norm()).fold(0.0, f64::max);
    let mut grid = ChiGrid {
        spec,
        values,
        flagged,
        vertices: ct.vertex_count(),
        hull_chi_max,
    };
    grid.symmetrize();
    Ok(grid)
}

/// Largest `|ξ|` among samples.
pub fn max_radius(samples: &[ChiSample]) -> f64 {
    samples.iter().map(|s| s.xi.norm()).fold(0.0, f64::max)
}
