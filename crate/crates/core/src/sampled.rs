//! Curves given only as sampled points. Derivatives come from finite
//! differences, so results here are less accurate than the symbolic path.

use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};
use crate::frenet::Jet;
use crate::kernel::GVector;
use crate::numeric::{fd_weights, UniformGrid};
use crate::scalar::Real;

/// Minimum sample count: the end stencils use nine nodes.
pub const MIN_SAMPLES: usize = 9;

/// Points `(s, x, y, z)` with `x = s` on a uniform grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledCurve<T> {
    pub grid: UniformGrid<T>,
    pub points: Vec<GVector<T>>,
}

impl<T: Real> SampledCurve<T> {
    /// Validates arc-length parametrization (`x = s`) and uniform spacing.
    pub fn new(rows: &[[T; 4]]) -> Result<Self> {
        if rows.len() < MIN_SAMPLES {
            return Err(GeometryError::Invalid(format!(
                "need at least {MIN_SAMPLES} samples, got {}",
                rows.len()
            )));
        }
        let n = rows.len();
        let grid = UniformGrid::new(rows[0][0], rows[n - 1][0], n);
        let h = grid.h();
        if !(h > T::zero()) {
            return Err(GeometryError::Invalid("sample parameters must increase".into()));
        }
        let tol = T::lit(1e-9);
        for (i, r) in rows.iter().enumerate() {
            let s = r[0];
            if r.iter().any(|v| !v.is_finite()) {
                return Err(GeometryError::NonFinite { s: s.to_f64_lossy() });
            }
            if (r[1] - s).abs() > tol * (T::one() + s.abs()) {
                return Err(GeometryError::Invalid(format!(
                    "sample {i}: x = {} differs from s = {}; input must be parametrized by s = x",
                    r[1], s
                )));
            }
            if (s - grid.node(i)).abs() > tol * (T::one() + s.abs()) + T::lit(1e-6) * h {
                return Err(GeometryError::Invalid(format!("sample {i}: spacing is not uniform")));
            }
        }
        let points = rows.iter().map(|r| GVector::new(r[1], r[2], r[3])).collect();
        Ok(Self { grid, points })
    }

    /// Jets at every sample. Interior nodes combine five-point stencils at
    /// spacings h and 2h by Richardson extrapolation; nodes within four of an
    /// end use Fornberg weights on the nearest nine samples.
    pub fn jets(&self) -> Vec<Jet<T>> {
        let n = self.points.len();
        let h = self.grid.h();
        let ys: Vec<T> = self.points.iter().map(|p| p.y).collect();
        let zs: Vec<T> = self.points.iter().map(|p| p.z).collect();
        let offsets: Vec<T> = (0..MIN_SAMPLES).map(|j| T::lit(j as f64)).collect();
        let mut edge_cache: Vec<Option<Vec<Vec<T>>>> = vec![None; MIN_SAMPLES];
        (0..n)
            .map(|i| {
                let (dy, dz) = if i >= 4 && i + 4 < n {
                    (richardson(&ys, i, h), richardson(&zs, i, h))
                } else {
                    let start = i.saturating_sub(4).min(n - MIN_SAMPLES);
                    let local = i - start;
                    let w = edge_cache[local]
                        .get_or_insert_with(|| fd_weights(T::lit(local as f64), &offsets, 4));
                    (edge(&ys, start, w, h), edge(&zs, start, w, h))
                };
                let v = |k: usize| GVector::isotropic(dy[k], dz[k]);
                Jet {
                    s: self.grid.node(i),
                    pos: self.points[i],
                    d1: GVector::new(T::one(), dy[0], dz[0]),
                    d2: v(1),
                    d3: v(2),
                    d4: v(3),
                }
            })
            .collect()
    }
}

fn edge<T: Real>(f: &[T], start: usize, w: &[Vec<T>], h: T) -> [T; 4] {
    let mut out = [T::zero(); 4];
    for (k, o) in out.iter_mut().enumerate() {
        let mut acc = T::zero();
        for (j, wj) in w[k + 1].iter().enumerate() {
            acc = acc + *wj * f[start + j];
        }
        *o = acc / h.powi(k as i32 + 1);
    }
    out
}

/// Centered five-point derivatives of orders 1..=4 at spacing `m·h`.
fn five_point<T: Real>(f: &[T], i: usize, m: usize, h: T) -> [T; 4] {
    let l = |c: f64| T::lit(c);
    let (p2, p1, z0, m1, m2) = (f[i + 2 * m], f[i + m], f[i], f[i - m], f[i - 2 * m]);
    let hh = h * T::lit(m as f64);
    [
        (-p2 + l(8.0) * p1 - l(8.0) * m1 + m2) / (l(12.0) * hh),
        (-p2 + l(16.0) * p1 - l(30.0) * z0 + l(16.0) * m1 - m2) / (l(12.0) * hh * hh),
        (p2 - l(2.0) * p1 + l(2.0) * m1 - m2) / (l(2.0) * hh * hh * hh),
        (p2 - l(4.0) * p1 + l(6.0) * z0 - l(4.0) * m1 + m2) / (hh * hh * hh * hh),
    ]
}

fn richardson<T: Real>(f: &[T], i: usize, h: T) -> [T; 4] {
    let a = five_point(f, i, 1, h);
    let b = five_point(f, i, 2, h);
    let l = |c: f64| T::lit(c);
    [
        (l(16.0) * a[0] - b[0]) / l(15.0),
        (l(16.0) * a[1] - b[1]) / l(15.0),
        (l(4.0) * a[2] - b[2]) / l(3.0),
        (l(4.0) * a[3] - b[3]) / l(3.0),
    ]
}

/// Jets from a tabulated tangent field `T = (1, y′, z′)` on a uniform grid:
/// α″ and α‴ by second-order central differences over `stride` nodes on each
/// side. Only nodes with a full stencil are returned; `d4` is left zero.
///
/// Differentiating the tangent (instead of positions) keeps rounding far
/// below truncation at the grid sizes used for round-trip checks.
pub fn tangent_jets<T: Real>(
    grid: &UniformGrid<T>,
    positions: &[GVector<T>],
    tangents: &[GVector<T>],
    stride: usize,
) -> Vec<Jet<T>> {
    let n = tangents.len();
    let hs = grid.h() * T::lit(stride as f64);
    let two = T::lit(2.0);
    (stride..n.saturating_sub(stride))
        .map(|i| {
            let (p, c, m) = (tangents[i + stride], tangents[i], tangents[i - stride]);
            Jet {
                s: grid.node(i),
                pos: positions[i],
                d1: c,
                d2: GVector::isotropic((p.y - m.y) / (two * hs), (p.z - m.z) / (two * hs)),
                d3: GVector::isotropic(
                    (p.y - two * c.y + m.y) / (hs * hs),
                    (p.z - two * c.z + m.z) / (hs * hs),
                ),
                d4: GVector::zero(),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frenet::frame_from_jet;

    fn cr_rows(n: usize) -> Vec<[f64; 4]> {
        let g = UniformGrid::new(0.5f64, 5.0, n);
        g.nodes()
            .into_iter()
            .map(|s| [s, s, (s.powi(3) - 3.0 / s) / 12.0, (s.powi(3) + 3.0 / s) / 12.0])
            .collect()
    }

    #[test]
    fn sampled_constant_ratio_curvatures() {
        let c = SampledCurve::new(&cr_rows(1001)).unwrap();
        let jets = c.jets();
        let n = jets.len();
        for (i, j) in jets.iter().enumerate() {
            let f = frame_from_jet(j, 1e-9).unwrap();
            let s = j.s;
            // third differences of positions sit near the rounding floor; the
            // one-sided end stencils lose another digit
            let tol = if i < 4 || i + 4 >= n { 1e-3 } else { 1e-4 };
            assert!((f.kappa - 1.0 / s).abs() < tol * (1.0 + 1.0 / s), "kappa at {s}: {}", f.kappa);
            assert!((f.tau + 2.0 / s).abs() < tol * (1.0 + 2.0 / s), "tau at {s}: {}", f.tau);
        }
    }

    #[test]
    fn rejects_bad_input() {
        let mut rows = cr_rows(20);
        assert!(SampledCurve::new(&rows[..8]).is_err());
        rows[3][1] += 0.01;
        assert!(SampledCurve::new(&rows).is_err());
        let mut rows = cr_rows(20);
        rows[5][0] += 0.01;
        rows[5][1] += 0.01;
        assert!(SampledCurve::new(&rows).is_err());
    }

    #[test]
    fn tangent_jets_recover_a_cubic() {
        let g = UniformGrid::new(0.0f64, 1.0, 41);
        let pos: Vec<_> = g.nodes().iter().map(|&s| GVector::new(s, s * s * s, s * s)).collect();
        let tan: Vec<_> = g.nodes().iter().map(|&s| GVector::new(1.0, 3.0 * s * s, 2.0 * s)).collect();
        let jets = tangent_jets(&g, &pos, &tan, 2);
        assert_eq!(jets.len(), 37);
        for j in jets {
            assert!((j.d2.y - 6.0 * j.s).abs() < 1e-12);
            assert!((j.d2.z - 2.0).abs() < 1e-12);
            assert!((j.d3.y - 6.0).abs() < 1e-9);
        }
    }
}
