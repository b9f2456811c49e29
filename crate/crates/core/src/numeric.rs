//! Uniform grids with the quadrature, ODE and differencing routines the
//! geometry needs.

use serde::{Deserialize, Serialize};

use crate::scalar::Real;

/// `n` equally spaced nodes on `[a, b]`, endpoints included.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniformGrid<T> {
    pub a: T,
    pub b: T,
    pub n: usize,
}

impl<T: Real> UniformGrid<T> {
    pub fn new(a: T, b: T, n: usize) -> Self {
        assert!(n >= 2, "grid needs at least two nodes");
        Self { a, b, n }
    }

    pub fn h(&self) -> T {
        (self.b - self.a) / T::lit((self.n - 1) as f64)
    }

    /// Node `i`; the last node is exactly `b`.
    pub fn node(&self, i: usize) -> T {
        if i + 1 == self.n {
            self.b
        } else {
            self.a + self.h() * T::lit(i as f64)
        }
    }

    pub fn nodes(&self) -> Vec<T> {
        (0..self.n).map(|i| self.node(i)).collect()
    }

    /// Grid with `factor` sub-intervals per interval of `self`.
    pub fn refine(&self, factor: usize) -> Self {
        Self::new(self.a, self.b, factor * (self.n - 1) + 1)
    }
}

/// Composite Simpson over an odd number of equally spaced samples.
pub fn simpson<T: Real>(values: &[T], h: T) -> T {
    assert!(values.len() % 2 == 1 && values.len() >= 3, "Simpson needs an odd sample count >= 3");
    let mut acc = values[0] + values[values.len() - 1];
    for (i, v) in values.iter().enumerate().take(values.len() - 1).skip(1) {
        acc = acc + *v * if i % 2 == 1 { T::lit(4.0) } else { T::lit(2.0) };
    }
    acc * h / T::lit(3.0)
}

/// Cumulative composite Simpson reported at panel boundaries only:
/// entry `k` is the integral from sample 0 to sample `2k`.
pub fn cumulative_simpson_panels<T: Real>(values: &[T], h: T) -> Vec<T> {
    assert!(values.len() % 2 == 1, "panel quadrature needs an odd sample count");
    let mut out = Vec::with_capacity(values.len() / 2 + 1);
    let mut acc = T::zero();
    out.push(acc);
    for w in values.windows(3).step_by(2) {
        acc = acc + (w[0] + T::lit(4.0) * w[1] + w[2]) * h / T::lit(6.0) * T::lit(2.0);
        out.push(acc);
    }
    out
}

/// Cumulative integral of tabulated samples at every node. Even nodes use
/// composite Simpson; odd nodes add the quadratic-interpolant integral over
/// the last single interval.
pub fn cumulative_simpson<T: Real>(values: &[T], h: T) -> Vec<T> {
    let n = values.len();
    assert!(n >= 3, "need at least three samples");
    let mut out = vec![T::zero(); n];
    let twelfth = h / T::lit(12.0);
    for i in 1..n {
        if i % 2 == 0 {
            let (f0, f1, f2) = (values[i - 2], values[i - 1], values[i]);
            out[i] = out[i - 2] + (f0 + T::lit(4.0) * f1 + f2) * h / T::lit(3.0);
        } else if i + 1 < n {
            let (f0, f1, f2) = (values[i - 1], values[i], values[i + 1]);
            out[i] = out[i - 1] + (T::lit(5.0) * f0 + T::lit(8.0) * f1 - f2) * twelfth;
        } else {
            let (f0, f1, f2) = (values[i - 2], values[i - 1], values[i]);
            out[i] = out[i - 1] + (-f0 + T::lit(8.0) * f1 + T::lit(5.0) * f2) * twelfth;
        }
    }
    out
}

/// `∫_a^{s_i} f` at every node of `grid`, one Simpson panel per grid interval
/// with `f` evaluated at the interval midpoints. Every node is a panel
/// boundary, so the error is a smooth O(h⁴) function of `s`.
pub fn cumulative_integral<T: Real, E>(
    grid: &UniformGrid<T>,
    mut f: impl FnMut(T) -> Result<T, E>,
) -> Result<Vec<T>, E> {
    let fine = grid.refine(2);
    let samples = (0..fine.n).map(|i| f(fine.node(i))).collect::<Result<Vec<_>, _>>()?;
    Ok(cumulative_simpson_panels(&samples, fine.h()))
}

/// Classical fixed-step RK4 on `grid`; returns the state at every node.
pub fn rk4<T: Real, E, const N: usize>(
    grid: &UniformGrid<T>,
    y0: [T; N],
    mut f: impl FnMut(T, &[T; N]) -> Result<[T; N], E>,
) -> Result<Vec<[T; N]>, E> {
    let h = grid.h();
    let half = h / T::lit(2.0);
    let mut out = Vec::with_capacity(grid.n);
    let mut y = y0;
    out.push(y);
    let axpy = |y: &[T; N], k: &[T; N], c: T| -> [T; N] {
        let mut r = *y;
        for i in 0..N {
            r[i] = r[i] + k[i] * c;
        }
        r
    };
    for i in 0..grid.n - 1 {
        let s = grid.node(i);
        let k1 = f(s, &y)?;
        let k2 = f(s + half, &axpy(&y, &k1, half))?;
        let k3 = f(s + half, &axpy(&y, &k2, half))?;
        let k4 = f(s + h, &axpy(&y, &k3, h))?;
        for j in 0..N {
            y[j] = y[j] + h / T::lit(6.0) * (k1[j] + T::lit(2.0) * k2[j] + T::lit(2.0) * k3[j] + k4[j]);
        }
        out.push(y);
    }
    Ok(out)
}

/// Fornberg's recursion: weights `w[k][j]` such that
/// `f^(k)(x0) ≈ Σ_j w[k][j] f(xs[j])` for `k = 0..=order`.
pub fn fd_weights<T: Real>(x0: T, xs: &[T], order: usize) -> Vec<Vec<T>> {
    let n = xs.len();
    let mut c = vec![vec![T::zero(); n]; order + 1];
    c[0][0] = T::one();
    let mut c1 = T::one();
    let mut c4 = xs[0] - x0;
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = T::one();
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 = c2 * c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (T::lit(k as f64) * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - T::lit(k as f64) * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Derivative of order `order` of a uniformly sampled series using the
/// `width` nearest nodes (centered where possible, shifted at the ends).
pub fn differentiate_series<T: Real>(values: &[T], h: T, order: usize, width: usize) -> Vec<T> {
    let n = values.len();
    assert!(width <= n && width > order, "stencil wider than series or too narrow");
    let offsets: Vec<T> = (0..width).map(|j| T::lit(j as f64)).collect();
    let mut cache: Vec<Option<Vec<T>>> = vec![None; width];
    let scale = h.powi(order as i32);
    (0..n)
        .map(|i| {
            let start = i.saturating_sub(width / 2).min(n - width);
            let local = i - start;
            let w = cache[local].get_or_insert_with(|| {
                fd_weights(T::lit(local as f64), &offsets, order).swap_remove(order)
            });
            let mut acc = T::zero();
            for (j, wj) in w.iter().enumerate() {
                acc = acc + *wj * values[start + j];
            }
            acc / scale
        })
        .collect()
}

pub fn mean<T: Real>(xs: &[T]) -> T {
    if xs.is_empty() {
        return T::nan();
    }
    xs.iter().fold(T::zero(), |a, &b| a + b) / T::lit(xs.len() as f64)
}

/// Population standard deviation.
pub fn std_dev<T: Real>(xs: &[T]) -> T {
    let m = mean(xs);
    let var = xs.iter().fold(T::zero(), |a, &x| a + (x - m) * (x - m)) / T::lit(xs.len() as f64);
    var.sqrt()
}

/// `std / |mean|`; infinite when the mean is zero and the spread is not.
pub fn rel_std<T: Real>(xs: &[T]) -> T {
    let m = mean(xs).abs();
    let sd = std_dev(xs);
    if m == T::zero() {
        if sd == T::zero() {
            T::zero()
        } else {
            T::infinity()
        }
    } else {
        sd / m
    }
}

pub fn sup_abs<T: Real>(xs: &[T]) -> T {
    xs.iter().fold(T::zero(), |a, &x| if x.is_nan() { T::nan() } else { a.max(x.abs()) })
}

/// Least-squares `y ≈ slope·x + intercept`.
pub fn linear_fit<T: Real>(xs: &[T], ys: &[T]) -> (T, T) {
    let mx = mean(xs);
    let my = mean(ys);
    let mut sxy = T::zero();
    let mut sxx = T::zero();
    for (&x, &y) in xs.iter().zip(ys) {
        sxy = sxy + (x - mx) * (y - my);
        sxx = sxx + (x - mx) * (x - mx);
    }
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Least-squares quadratic `y ≈ c0 + c1·x + c2·x²`, returned as `[c0, c1, c2]`.
/// The abscissae are centered and scaled before solving.
pub fn quadratic_fit<T: Real>(xs: &[T], ys: &[T]) -> [T; 3] {
    let mx = mean(xs);
    let sx = xs.iter().fold(T::zero(), |a, &x| a.max((x - mx).abs())).max(T::min_positive_value());
    let mut ata = [[T::zero(); 3]; 3];
    let mut aty = [T::zero(); 3];
    for (&x, &y) in xs.iter().zip(ys) {
        let t = (x - mx) / sx;
        let row = [T::one(), t, t * t];
        for i in 0..3 {
            aty[i] = aty[i] + row[i] * y;
            for j in 0..3 {
                ata[i][j] = ata[i][j] + row[i] * row[j];
            }
        }
    }
    let [d0, d1, d2] = solve3(ata, aty);
    // expand d0 + d1 t + d2 t² with t = (x − mx)/sx
    let c2 = d2 / (sx * sx);
    let c1 = d1 / sx - T::lit(2.0) * d2 * mx / (sx * sx);
    let c0 = d0 - d1 * mx / sx + d2 * mx * mx / (sx * sx);
    [c0, c1, c2]
}

pub(crate) fn solve3<T: Real>(mut a: [[T; 3]; 3], mut b: [T; 3]) -> [T; 3] {
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap()).unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] = a[row][k] - f * a[col][k];
            }
            b[row] = b[row] - f * b[col];
        }
    }
    let mut x = [T::zero(); 3];
    for row in (0..3).rev() {
        let mut acc = b[row];
        for k in row + 1..3 {
            acc = acc - a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_is_exact_for_cubics() {
        let g = UniformGrid::new(0.0, 2.0, 9);
        let v: Vec<f64> = g.nodes().iter().map(|x| x * x * x - x).collect();
        assert!((simpson(&v, g.h()) - 2.0).abs() < 1e-14);
        let c = cumulative_simpson_panels(&v, g.h());
        assert_eq!(c.len(), 5);
        assert!((c[2] - (0.25 - 0.5)).abs() < 1e-14);
    }

    #[test]
    fn cumulative_simpson_all_nodes() {
        let g = UniformGrid::new(0.0, 1.0, 11);
        let v: Vec<f64> = g.nodes().iter().map(|x| x * x).collect();
        let c = cumulative_simpson(&v, g.h());
        for (i, x) in g.nodes().iter().enumerate() {
            assert!((c[i] - x * x * x / 3.0).abs() < 1e-15, "node {i}");
        }
    }

    #[test]
    fn cumulative_integral_converges_at_fourth_order() {
        let err = |n: usize| {
            let g = UniformGrid::new(0.0, 2.0, n);
            let c = cumulative_integral(&g, |x: f64| Ok::<_, ()>(x.exp().sin())).unwrap();
            // reference from a much finer grid
            let fine = UniformGrid::new(0.0, 2.0, 16 * (n - 1) + 1);
            let r = cumulative_integral(&fine, |x: f64| Ok::<_, ()>(x.exp().sin())).unwrap();
            (0..n).map(|i| (c[i] - r[16 * i]).abs()).fold(0.0, f64::max)
        };
        let (e1, e2) = (err(21), err(41));
        assert!(e1 / e2 > 14.0, "ratio {}", e1 / e2);
    }

    #[test]
    fn rk4_exponential() {
        let g = UniformGrid::new(0.0, 1.0, 101);
        let ys = rk4(&g, [1.0f64, 0.0], |_, y| Ok::<_, ()>([y[1], -y[0]])).unwrap();
        let last = ys.last().unwrap();
        assert!((last[0] - 1f64.cos()).abs() < 1e-9);
        assert!((last[1] + 1f64.sin()).abs() < 1e-9);
    }

    #[test]
    fn fornberg_reproduces_classic_stencils() {
        let xs = [-2.0, -1.0, 0.0, 1.0, 2.0];
        let w = fd_weights(0.0f64, &xs, 3);
        let expect1 = [1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0];
        let expect2 = [-1.0 / 12.0, 4.0 / 3.0, -5.0 / 2.0, 4.0 / 3.0, -1.0 / 12.0];
        let expect3 = [-0.5, 1.0, 0.0, -1.0, 0.5];
        for j in 0..5 {
            assert!((w[1][j] - expect1[j]).abs() < 1e-14);
            assert!((w[2][j] - expect2[j]).abs() < 1e-14);
            assert!((w[3][j] - expect3[j]).abs() < 1e-14);
        }
    }

    #[test]
    fn series_derivative_exact_for_polynomials() {
        let g = UniformGrid::new(-1.0f64, 2.0, 31);
        let v: Vec<f64> = g.nodes().iter().map(|x| x.powi(4) - 2.0 * x).collect();
        let d = differentiate_series(&v, g.h(), 1, 5);
        for (i, x) in g.nodes().iter().enumerate() {
            assert!((d[i] - (4.0 * x.powi(3) - 2.0)).abs() < 1e-10, "node {i}");
        }
    }

    #[test]
    fn statistics() {
        assert_eq!(mean(&[1.0f64, 2.0, 3.0]), 2.0);
        assert!((std_dev(&[1.0f64, 3.0]) - 1.0).abs() < 1e-15);
        assert_eq!(rel_std(&[4.0, 4.0, 4.0]), 0.0);
        assert!(rel_std(&[-1.0f64, 1.0]).is_infinite());
        let (m, b) = linear_fit(&[0.0f64, 1.0, 2.0], &[1.0, 3.0, 5.0]);
        assert!((m - 2.0).abs() < 1e-14 && (b - 1.0).abs() < 1e-14);
        let xs: Vec<f64> = (0..20).map(|i| 0.5 + i as f64 * 0.25).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x * x / 3.0 - 0.1 * x + 2.0).collect();
        let c = quadratic_fit(&xs, &ys);
        assert!((c[2] - 1.0 / 3.0).abs() < 1e-12);
        assert!((c[1] + 0.1).abs() < 1e-11);
        assert!((c[0] - 2.0).abs() < 1e-11);
    }
}
