//! Position-vector decomposition α − origin = m₀T + m₁N + m₂B and the
//! classification tests built on it.

use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{GeometryError, Result};
use crate::expr::Expr;
use crate::frenet::{Curvatures, FrenetSample};
use crate::kernel::{GVector, Sign};
use crate::numeric::{self, cumulative_integral, UniformGrid};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    True,
    False,
    /// The statistic sits between the threshold and `band` times it.
    Indeterminate,
}

impl Verdict {
    /// Pass at or below `tol`, indeterminate up to `band·tol`, fail above.
    pub fn from_stat<T: Real>(stat: T, tol: f64, band: f64) -> Verdict {
        let s = stat.to_f64_lossy();
        if s <= tol {
            Verdict::True
        } else if s <= band * tol {
            Verdict::Indeterminate
        } else {
            Verdict::False
        }
    }

    pub fn is_true(self) -> bool {
        self == Verdict::True
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Decomposition<T> {
    pub s: Vec<T>,
    pub m0: Vec<T>,
    pub m1: Vec<T>,
    pub m2: Vec<T>,
    /// m₀².
    pub tangential_norm2: Vec<T>,
    /// |m₂² − m₁²|.
    pub normal_norm2: Vec<T>,
    /// Signed m₂² − m₁².
    pub q: Vec<T>,
    /// Sup over the grid of |α − origin − (m₀T + m₁N + m₂B)|, per component.
    pub reconstruction_error: T,
}

/// Projects α − origin onto the frame. N and B must satisfy g(N,N) = −1 and
/// g(B,B) = +1, so m₁ = −g(r, N) and m₂ = g(r, B) for the isotropic part r.
pub fn decompose<T: Real>(
    positions: &[GVector<T>],
    frames: &[FrenetSample<T>],
    origin: GVector<T>,
    frame_tol: f64,
) -> Result<Decomposition<T>> {
    let n = frames.len();
    let mut d = Decomposition {
        s: Vec::with_capacity(n),
        m0: Vec::with_capacity(n),
        m1: Vec::with_capacity(n),
        m2: Vec::with_capacity(n),
        tangential_norm2: Vec::with_capacity(n),
        normal_norm2: Vec::with_capacity(n),
        q: Vec::with_capacity(n),
        reconstruction_error: T::zero(),
    };
    for (p, f) in positions.iter().zip(frames) {
        let gnn = f.n.dot(&f.n);
        if (gnn + T::one()).abs().to_f64_lossy() > frame_tol {
            return Err(GeometryError::FrameDegenerate {
                s: f.s.to_f64_lossy(),
                value: (gnn + T::one()).abs().to_f64_lossy(),
            });
        }
        let w = *p - origin;
        let m0 = w.x / f.t.x;
        let r = w - f.t * m0;
        let r = GVector::isotropic(r.y, r.z);
        let m1 = -r.dot(&f.n);
        let m2 = r.dot(&f.b);
        let back = f.t * m0 + f.n * m1 + f.b * m2;
        d.reconstruction_error = d.reconstruction_error.max((w - back).max_abs());
        // (m₂ − m₁)(m₂ + m₁) keeps digits when m₁ ≈ ±m₂
        let q = (m2 - m1) * (m2 + m1);
        d.s.push(f.s);
        d.m0.push(m0);
        d.m1.push(m1);
        d.m2.push(m2);
        d.tangential_norm2.push(m0 * m0);
        d.normal_norm2.push(q.abs());
        d.q.push(q);
    }
    Ok(d)
}

impl<T: Real> Decomposition<T> {
    /// The constant c₀ in m₀ = s + c₀.
    pub fn c0(&self) -> T {
        let diffs: Vec<T> = self.m0.iter().zip(&self.s).map(|(m, s)| *m - *s).collect();
        numeric::mean(&diffs)
    }

    /// m₀²/(m₂² − m₁²) per grid point.
    pub fn ratio(&self) -> Vec<T> {
        self.m0.iter().zip(&self.q).map(|(m, q)| *m * *m / *q).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantRatio<T> {
    pub verdict: Verdict,
    /// Mean of m₀²/(m₂² − m₁²).
    pub c3: T,
    pub rel_dev: T,
}

pub fn detect_constant_ratio<T: Real>(d: &Decomposition<T>, ratio_tol: f64, tol: &Tolerances) -> Result<ConstantRatio<T>> {
    for (s, q) in d.s.iter().zip(&d.q) {
        if q.abs().to_f64_lossy() < tol.degenerate_normal {
            return Err(GeometryError::DegenerateNormal { s: s.to_f64_lossy(), value: q.abs().to_f64_lossy() });
        }
    }
    let rho = d.ratio();
    let rel_dev = numeric::rel_std(&rho);
    Ok(ConstantRatio { verdict: Verdict::from_stat(rel_dev, ratio_tol, tol.band), c3: numeric::mean(&rho), rel_dev })
}

/// ((κ′ − κ³c₃(s + c₀))/(c₃κ²τ))′ + τ/(c₃κ) at each sample; the quotient is
/// differentiated analytically from κ, κ′, κ″, τ, τ′.
pub fn constant_ratio_ode_residual<T: Real>(
    s: &[T],
    curvatures: &[Curvatures<T>],
    c3: T,
    c0: T,
    tau_eps: f64,
) -> Result<Vec<T>> {
    let three = T::lit(3.0);
    let two = T::lit(2.0);
    s.iter()
        .zip(curvatures)
        .map(|(&s, c)| {
            if c.tau.abs().to_f64_lossy() < tau_eps {
                return Err(GeometryError::ZeroTorsion { s: s.to_f64_lossy(), tau: c.tau.to_f64_lossy() });
            }
            let (k, dk, ddk) = (c.kappa, c.dkappa, c.ddkappa);
            let m0 = s + c0;
            let a = dk - k * k * k * c3 * m0;
            let da = ddk - three * k * k * dk * c3 * m0 - k * k * k * c3;
            let b = c3 * k * k * c.tau;
            let db = c3 * (two * k * dk * c.tau + k * k * c.dtau);
            Ok((da * b - a * db) / (b * b) + c.tau / (c3 * k))
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    First,
    Second,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TConstant<T> {
    pub verdict: Verdict,
    pub kind: Option<Kind>,
    pub slope: T,
    pub intercept: T,
    pub note: String,
}

/// Fits m₀ to an affine function of s. Graph-form input always has slope 1.
pub fn detect_t_constant<T: Real>(d: &Decomposition<T>, tol: &Tolerances) -> TConstant<T> {
    let (slope, intercept) = numeric::linear_fit(&d.s, &d.m0);
    let verdict = Verdict::from_stat(slope.abs(), tol.slope_tol, tol.band);
    let kind = verdict.is_true().then(|| {
        if numeric::sup_abs(&d.m0).to_f64_lossy() <= tol.slope_tol {
            Kind::First
        } else {
            Kind::Second
        }
    });
    let note = if (slope - T::one()).abs().to_f64_lossy() <= 1e-9 {
        "m0 = s + c0 has slope 1; no spacelike admissible curve is T-constant".to_string()
    } else {
        format!("m0 slope {slope} differs from 1; input is not parametrized by arc length")
    };
    TConstant { verdict, kind, slope, intercept, note }
}

/// Quadratic least-squares fit `q ≈ c0 + c1 s + c2 s²` with its sup residual
/// relative to sup|q|.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadraticFit<T> {
    pub coeffs: [T; 3],
    pub rel_residual: T,
}

pub fn fit_quadratic<T: Real>(s: &[T], q: &[T]) -> QuadraticFit<T> {
    let coeffs = numeric::quadratic_fit(s, q);
    let resid: Vec<T> = s
        .iter()
        .zip(q)
        .map(|(&x, &y)| y - (coeffs[0] + coeffs[1] * x + coeffs[2] * x * x))
        .collect();
    let scale = numeric::sup_abs(q).max(T::min_positive_value());
    QuadraticFit { coeffs, rel_residual: numeric::sup_abs(&resid) / scale }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NConstant<T> {
    pub verdict: Verdict,
    pub kind: Option<Kind>,
    /// Signed mean of m₂² − m₁². The generator family satisfies
    /// m₂² − m₁² = −c₄, so this is −c₄ in that parametrization.
    pub c4: T,
    pub rel_dev: T,
    pub sup_abs: T,
    /// sup |m₂m₂′ − m₁m₁′|.
    pub derivative_residual: T,
    /// sup |m₂′ − τm₁|.
    pub second_kind_residual: T,
    pub q_fit: QuadraticFit<T>,
}

pub fn detect_n_constant<T: Real>(
    d: &Decomposition<T>,
    frames: &[FrenetSample<T>],
    h: T,
    n_tol: f64,
    tol: &Tolerances,
) -> NConstant<T> {
    let scale = d
        .m1
        .iter()
        .zip(&d.m2)
        .fold(T::one(), |a, (m1, m2)| a.max(*m1 * *m1 + *m2 * *m2))
        .to_f64_lossy();
    let sup_abs = numeric::sup_abs(&d.q);
    let mean = numeric::mean(&d.q);
    let rel_dev = numeric::rel_std(&d.q);
    let first = sup_abs.to_f64_lossy() <= n_tol * scale;
    let (verdict, kind) = if first {
        (Verdict::True, Some(Kind::First))
    } else if mean.abs().to_f64_lossy() > n_tol * scale {
        let v = Verdict::from_stat(rel_dev, n_tol, tol.band);
        (v, v.is_true().then_some(Kind::Second))
    } else {
        (Verdict::False, None)
    };
    let dm1 = numeric::differentiate_series(&d.m1, h, 1, 5);
    let dm2 = numeric::differentiate_series(&d.m2, h, 1, 5);
    let mut deriv = T::zero();
    let mut second = T::zero();
    for i in 0..d.s.len() {
        deriv = deriv.max((d.m2[i] * dm2[i] - d.m1[i] * dm1[i]).abs());
        second = second.max((dm2[i] - frames[i].tau * d.m1[i]).abs());
    }
    NConstant {
        verdict,
        kind,
        c4: mean,
        rel_dev,
        sup_abs,
        derivative_residual: deriv,
        second_kind_residual: second,
        q_fit: fit_quadratic(&d.s, &d.q),
    }
}

/// m₁, m₂ of the second-kind N-constant family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Generated<T> {
    pub s: Vec<T>,
    pub u: Vec<T>,
    pub m1: Vec<T>,
    pub m2: Vec<T>,
}

/// u = ∫τ + c₅ from the grid start, m₂ = ¼e⁻ᵘ(−4c₄ + e²ᵘ), m₁ = m₂ − ½eᵘ.
pub fn n_constant_generator<T: Real>(tau: &Expr, c4: T, c5: T, grid: &UniformGrid<T>) -> Result<Generated<T>> {
    let t = cumulative_integral(grid, |s| tau.eval(s).map_err(|e| GeometryError::eval(s, e)))?;
    let quarter = T::lit(0.25);
    let mut out = Generated { s: grid.nodes(), u: Vec::new(), m1: Vec::new(), m2: Vec::new() };
    for (i, ti) in t.iter().enumerate() {
        let u = *ti + c5;
        if u.abs() > T::lit(300.0) || !u.is_finite() {
            return Err(GeometryError::Overflow { s: out.s[i].to_f64_lossy(), u: u.to_f64_lossy() });
        }
        let (e, ei) = (u.exp(), (-u).exp());
        let m2 = quarter * ei * (-T::lit(4.0) * c4 + e * e);
        out.m1.push(m2 - T::lit(0.5) * e);
        out.m2.push(m2);
        out.u.push(u);
    }
    Ok(out)
}

/// Center-fit sphere test plus the curvature-equality diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphereFit<T> {
    pub verdict: Verdict,
    /// Mean of c(s) = α − (1/κ)N − κ′/(κ²τ)B.
    pub center: GVector<T>,
    /// Largest componentwise deviation of c(s) from its mean.
    pub center_spread: T,
    /// Same, for the (y, z) part only. The x part of c(s) always equals s.
    pub isotropic_spread: T,
    pub r2: T,
    pub sign: Sign,
    pub r2_rel_dev: T,
    /// Constants fitted to 1/κ = m₁(u), κ′/(κ²τ) = m₂(u) of the generator
    /// family; absent when 2(κ′/(κ²τ) − 1/κ) is not positive everywhere.
    pub fitted_c4: Option<T>,
    pub fitted_c5: Option<T>,
    pub second_equality_residual: Option<T>,
    pub third_equality_residual: Option<T>,
}

pub fn sphere_fit<T: Real>(
    positions: &[GVector<T>],
    frames: &[FrenetSample<T>],
    curvatures: &[Curvatures<T>],
    grid: &UniformGrid<T>,
    tol: &Tolerances,
) -> Result<SphereFit<T>> {
    let mut centers = Vec::with_capacity(frames.len());
    let mut f1 = Vec::with_capacity(frames.len());
    let mut f2 = Vec::with_capacity(frames.len());
    for ((p, f), c) in positions.iter().zip(frames).zip(curvatures) {
        if c.tau.abs().to_f64_lossy() < tol.tau_eps {
            return Err(GeometryError::ZeroTorsion { s: f.s.to_f64_lossy(), tau: c.tau.to_f64_lossy() });
        }
        if c.kappa.abs().to_f64_lossy() < tol.adm_eps {
            return Err(GeometryError::ZeroCurvature { s: f.s.to_f64_lossy() });
        }
        let a = c.kappa.recip();
        let b = c.dkappa / (c.kappa * c.kappa * c.tau);
        centers.push(*p - f.n * a - f.b * b);
        f1.push(a);
        f2.push(b);
    }
    let comp = |sel: fn(&GVector<T>) -> T| {
        let v: Vec<T> = centers.iter().map(sel).collect();
        let m = numeric::mean(&v);
        (m, v.iter().fold(T::zero(), |a, x| a.max((*x - m).abs())))
    };
    let (cx, sx) = comp(|v| v.x);
    let (cy, sy) = comp(|v| v.y);
    let (cz, sz) = comp(|v| v.z);
    let center = GVector::new(cx, cy, cz);
    let radii: Vec<T> = positions.iter().map(|p| (*p - center).dot(&(*p - center))).collect();
    let g_mean = numeric::mean(&radii);
    let r2_rel_dev = numeric::rel_std(&radii);
    let scale = positions.iter().fold(T::one(), |a, p| a.max(p.max_abs()));
    let center_spread = sx.max(sy).max(sz);
    let verdict = {
        let v1 = Verdict::from_stat(center_spread / scale, tol.sphere_tol, tol.band);
        let v2 = Verdict::from_stat(r2_rel_dev, tol.sphere_tol, tol.band);
        match (v1, v2) {
            (Verdict::True, Verdict::True) => Verdict::True,
            (Verdict::False, _) | (_, Verdict::False) => Verdict::False,
            _ => Verdict::Indeterminate,
        }
    };

    // E = eᵘ and c₄ from m₂ − m₁ = E/2, m₁ + m₂ = −2c₄/E
    let mut fitted = None;
    if f1.iter().zip(&f2).all(|(a, b)| *b - *a > T::zero()) {
        let t = cumulative_integral(grid, |s| Ok::<_, GeometryError>(tau_at(curvatures, grid, s)))?;
        let e: Vec<T> = f1.iter().zip(&f2).map(|(a, b)| T::lit(2.0) * (*b - *a)).collect();
        let c4s: Vec<T> = e.iter().zip(f1.iter().zip(&f2)).map(|(e, (a, b))| -*e * (*a + *b) / T::lit(2.0)).collect();
        let c5s: Vec<T> = e.iter().zip(&t).map(|(e, t)| e.ln() - *t).collect();
        let c4 = numeric::mean(&c4s);
        let c5 = numeric::mean(&c5s);
        let mut r2 = T::zero();
        let mut r3 = T::zero();
        for i in 0..f1.len() {
            let eu = (t[i] + c5).exp();
            let m2 = eu / T::lit(4.0) - c4 / eu;
            let m1 = m2 - eu / T::lit(2.0);
            r2 = r2.max((m1 - f1[i]).abs());
            r3 = r3.max((m2 - f2[i]).abs());
        }
        fitted = Some((c4, c5, r2, r3));
    }
    Ok(SphereFit {
        verdict,
        center,
        center_spread,
        isotropic_spread: sy.max(sz),
        r2: g_mean.abs(),
        sign: Sign::of(&g_mean),
        r2_rel_dev,
        fitted_c4: fitted.map(|f| f.0),
        fitted_c5: fitted.map(|f| f.1),
        second_equality_residual: fitted.map(|f| f.2),
        third_equality_residual: fitted.map(|f| f.3),
    })
}

/// τ at an arbitrary point of the grid's span by linear interpolation of
/// the sampled curvatures; only used to integrate τ for the diagnostics.
fn tau_at<T: Real>(curvatures: &[Curvatures<T>], grid: &UniformGrid<T>, s: T) -> T {
    let x = ((s - grid.a) / grid.h()).max(T::zero());
    let i = x.floor().to_usize().unwrap_or(0).min(grid.n - 2);
    let w = x - T::lit(i as f64);
    let (a, b) = (&curvatures[i], &curvatures[i + 1]);
    // cubic Hermite with the stored τ′ keeps the quadrature fourth order
    let h = grid.h();
    let (w2, w3) = (w * w, w * w * w);
    let h00 = T::lit(2.0) * w3 - T::lit(3.0) * w2 + T::one();
    let h10 = w3 - T::lit(2.0) * w2 + w;
    let h01 = -T::lit(2.0) * w3 + T::lit(3.0) * w2;
    let h11 = w3 - w2;
    h00 * a.tau + h10 * h * a.dtau + h01 * b.tau + h11 * h * b.dtau
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QStats<T> {
    pub mean: T,
    pub min: T,
    pub max: T,
    pub rel_dev: T,
    pub constant: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircleCheck<T> {
    pub verdict: Verdict,
    pub kappa_rel_dev: T,
    pub tau_sup: T,
    /// m₂² − m₁² along the curve, reported without any claim about it.
    pub q: QStats<T>,
    /// Set when the curve is a circle but q is not constant.
    pub flagged: bool,
}

pub fn circle_check<T: Real>(frames: &[FrenetSample<T>], d: &Decomposition<T>, n_tol: f64, tol: &Tolerances) -> CircleCheck<T> {
    let kappas: Vec<T> = frames.iter().map(|f| f.kappa).collect();
    let taus: Vec<T> = frames.iter().map(|f| f.tau).collect();
    let kappa_rel_dev = numeric::rel_std(&kappas);
    let tau_sup = numeric::sup_abs(&taus);
    let circle = kappa_rel_dev.to_f64_lossy() <= tol.circle_kappa_tol && tau_sup.to_f64_lossy() <= tol.circle_tau_tol;
    let rel_dev = numeric::rel_std(&d.q);
    let q = QStats {
        mean: numeric::mean(&d.q),
        min: d.q.iter().fold(T::infinity(), |a, &b| a.min(b)),
        max: d.q.iter().fold(T::neg_infinity(), |a, &b| a.max(b)),
        rel_dev,
        constant: rel_dev.to_f64_lossy() <= n_tol,
    };
    CircleCheck {
        verdict: if circle { Verdict::True } else { Verdict::False },
        kappa_rel_dev,
        tau_sup,
        flagged: circle && !q.constant,
        q,
    }
}

/// Sup-norms of m₁′ + κm₀ + τm₂ and m₂′ + τm₁ for the decomposed
/// coefficients; derivatives by five-point differences.
pub fn m_system_residuals<T: Real>(d: &Decomposition<T>, frames: &[FrenetSample<T>], h: T) -> (T, T) {
    let dm1 = numeric::differentiate_series(&d.m1, h, 1, 5);
    let dm2 = numeric::differentiate_series(&d.m2, h, 1, 5);
    let mut r = (T::zero(), T::zero());
    for (i, f) in frames.iter().enumerate() {
        r.0 = r.0.max((dm1[i] + f.kappa * d.m0[i] + f.tau * d.m2[i]).abs());
        r.1 = r.1.max((dm2[i] + f.tau * d.m1[i]).abs());
    }
    r
}

/// sup |m₂m₂′ − m₁m₁′ − (s + c₀)/c₃| for a constant-ratio curve.
pub fn ratio_relation_residual<T: Real>(d: &Decomposition<T>, c3: T, h: T) -> T {
    let dm1 = numeric::differentiate_series(&d.m1, h, 1, 5);
    let dm2 = numeric::differentiate_series(&d.m2, h, 1, 5);
    (0..d.s.len()).fold(T::zero(), |a, i| {
        a.max((d.m2[i] * dm2[i] - d.m1[i] * dm1[i] - d.m0[i] / c3).abs())
    })
}

/// Origin minimizing the variance of q(s): a coarse 3-D grid over the
/// curve's bounding box, then Levenberg-Marquardt from the best grid points.
/// m₁ and m₂ are affine in the origin, so the Jacobian is exact.
pub fn search_origin<T: Real>(positions: &[GVector<T>], frames: &[FrenetSample<T>]) -> GVector<T> {
    let stride = (frames.len() / 200).max(1);
    let pos: Vec<GVector<T>> = positions.iter().step_by(stride).copied().collect();
    let fr: Vec<FrenetSample<T>> = frames.iter().step_by(stride).copied().collect();
    let coeffs = |o: GVector<T>| -> Vec<(T, T)> {
        pos.iter()
            .zip(&fr)
            .map(|(p, f)| {
                let w = *p - o;
                let r = w - f.t * (w.x / f.t.x);
                let r = GVector::isotropic(r.y, r.z);
                (-r.dot(&f.n), r.dot(&f.b))
            })
            .collect()
    };
    let qs = |m: &[(T, T)]| -> Vec<T> { m.iter().map(|(m1, m2)| (*m2 - *m1) * (*m2 + *m1)).collect() };
    let cost = |o: GVector<T>| numeric::std_dev(&qs(&coeffs(o)));

    let lo = pos.iter().fold(pos[0], |a, p| GVector::new(a.x.min(p.x), a.y.min(p.y), a.z.min(p.z)));
    let hi = pos.iter().fold(pos[0], |a, p| GVector::new(a.x.max(p.x), a.y.max(p.y), a.z.max(p.z)));
    let half = (hi - lo) * T::lit(0.75) + GVector::new(T::one(), T::one(), T::one());
    let mid = (lo + hi) * T::lit(0.5);
    let k = 6i32;
    let mut coarse = Vec::new();
    for i in -k..=k {
        for j in -k..=k {
            for l in -k..=k {
                let at = |c: T, hw: T, m: i32| c + hw * T::lit(m as f64 / k as f64);
                let o = GVector::new(at(mid.x, half.x, i), at(mid.y, half.y, j), at(mid.z, half.z, l));
                coarse.push((cost(o), o));
            }
        }
    }
    coarse.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Greater));

    // slopes of (m₁, m₂) along each origin axis, the same at every origin
    let base = coeffs(GVector::zero());
    let slopes: Vec<[(T, T); 3]> = {
        let e = [
            GVector::new(T::one(), T::zero(), T::zero()),
            GVector::new(T::zero(), T::one(), T::zero()),
            GVector::new(T::zero(), T::zero(), T::one()),
        ];
        let shifted: Vec<Vec<(T, T)>> = e.iter().map(|v| coeffs(*v)).collect();
        (0..base.len())
            .map(|i| std::array::from_fn(|a| (shifted[a][i].0 - base[i].0, shifted[a][i].1 - base[i].1)))
            .collect()
    };
    let n = T::lit(base.len() as f64);
    let mut best = coarse[0];
    for &(c0, o0) in coarse.iter().take(10) {
        let (mut c, mut o, mut lambda) = (c0, o0, T::lit(1e-3));
        for _ in 0..200 {
            let m = coeffs(o);
            let q = qs(&m);
            let qm = numeric::mean(&q);
            let grads: Vec<[T; 3]> = m
                .iter()
                .zip(&slopes)
                .map(|((m1, m2), sl)| std::array::from_fn(|a| T::lit(2.0) * (*m2 * sl[a].1 - *m1 * sl[a].0)))
                .collect();
            let gm: [T; 3] = std::array::from_fn(|a| grads.iter().fold(T::zero(), |acc, g| acc + g[a]) / n);
            let mut jtj = [[T::zero(); 3]; 3];
            let mut jtr = [T::zero(); 3];
            for (g, qi) in grads.iter().zip(&q) {
                let row: [T; 3] = std::array::from_fn(|a| g[a] - gm[a]);
                let r = *qi - qm;
                for a in 0..3 {
                    jtr[a] = jtr[a] - row[a] * r;
                    for b in 0..3 {
                        jtj[a][b] = jtj[a][b] + row[a] * row[b];
                    }
                }
            }
            let mut improved = false;
            while lambda < T::lit(1e12) {
                let mut damped = jtj;
                for (a, row) in damped.iter_mut().enumerate() {
                    row[a] = row[a] * (T::one() + lambda) + T::min_positive_value().sqrt();
                }
                let d = numeric::solve3(damped, jtr);
                let trial = o + GVector::new(d[0], d[1], d[2]);
                let ct = cost(trial);
                if ct < c {
                    (c, o, improved) = (ct, trial, true);
                    lambda = (lambda * T::lit(0.3)).max(T::lit(1e-12));
                    break;
                }
                lambda = lambda * T::lit(10.0);
            }
            if !improved || c == T::zero() {
                break;
            }
        }
        if c < best.0 {
            best = (c, o);
        }
    }
    best.1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport<T> {
    pub origin: GVector<T>,
    pub c0: T,
    /// Absent when m₂² − m₁² vanishes somewhere; the reason is in `warnings`.
    pub constant_ratio: Option<ConstantRatio<T>>,
    pub t_constant: TConstant<T>,
    pub n_constant: NConstant<T>,
    /// Absent when τ vanishes; the reason is in `warnings`.
    pub spherical: Option<SphereFit<T>>,
    pub circle: CircleCheck<T>,
    pub m_system: [T; 2],
    pub reconstruction_error: T,
    pub warnings: Vec<String>,
}

/// Runs every test on one decomposed curve.
#[allow(clippy::too_many_arguments)]
pub fn classify<T: Real>(
    positions: &[GVector<T>],
    frames: &[FrenetSample<T>],
    curvatures: &[Curvatures<T>],
    grid: &UniformGrid<T>,
    d: &Decomposition<T>,
    origin: GVector<T>,
    quadrature_backed: bool,
    tol: &Tolerances,
) -> ClassificationReport<T> {
    let n_tol = tol.ratio_tol(quadrature_backed);
    let mut warnings = Vec::new();
    let constant_ratio = match detect_constant_ratio(d, n_tol, tol) {
        Ok(c) => Some(c),
        Err(e) => {
            warnings.push(format!("constant-ratio test skipped: {e}"));
            None
        }
    };
    let t_constant = detect_t_constant(d, tol);
    let n_constant = detect_n_constant(d, frames, grid.h(), n_tol, tol);
    let spherical = match sphere_fit(positions, frames, curvatures, grid, tol) {
        Ok(s) => {
            warnings.push(
                "sphere test: the first curvature equality s + c0 = 0 cannot hold on an interval; \
                 the verdict uses the center fit, and c(s) has x-component s, so the full center never stays fixed"
                    .into(),
            );
            Some(s)
        }
        Err(e) => {
            warnings.push(format!("sphere test skipped: {e}"));
            None
        }
    };
    let circle = circle_check(frames, d, n_tol, tol);
    if circle.flagged {
        warnings.push(format!(
            "circle (constant curvature, zero torsion) whose m2^2 - m1^2 is not constant \
             (relative deviation {:e}); the claim that circles are N-constant of the second kind is not confirmed",
            circle.q.rel_dev.to_f64_lossy()
        ));
    }
    if n_constant.verdict.is_true() {
        warnings.push(
            "N-constant constant c4 is reported as the signed mean of m2^2 - m1^2; \
             the generator family has m2^2 - m1^2 = -c4"
                .into(),
        );
    }
    for (name, v) in [
        ("constant-ratio", constant_ratio.map(|c| c.verdict)),
        ("N-constant", Some(n_constant.verdict)),
        ("T-constant", Some(t_constant.verdict)),
        ("spherical", spherical.as_ref().map(|s| s.verdict)),
    ] {
        if v == Some(Verdict::Indeterminate) {
            warnings.push(format!("{name} verdict is indeterminate: statistic within {}x of its threshold", tol.band));
        }
    }
    let (r1, r2) = m_system_residuals(d, frames, grid.h());
    ClassificationReport {
        origin,
        c0: d.c0(),
        constant_ratio,
        t_constant,
        n_constant,
        spherical,
        circle,
        m_system: [r1, r2],
        reconstruction_error: d.reconstruction_error,
        warnings,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::frenet::GraphCurve;

    fn graph(y: &str, z: &str, a: f64, b: f64) -> GraphCurve<f64> {
        GraphCurve::new(parse(y, "x").unwrap(), parse(z, "x").unwrap(), (a, b))
    }

    fn decomposed(c: &GraphCurve<f64>, n: usize, origin: GVector<f64>) -> (Vec<FrenetSample<f64>>, Decomposition<f64>, UniformGrid<f64>) {
        let g = UniformGrid::new(c.domain.0, c.domain.1, n);
        let frames = c.frames(&g, 1e-9).unwrap();
        let pos: Vec<_> = c.jets(&g).unwrap().iter().map(|j| j.pos).collect();
        let d = decompose(&pos, &frames, origin, 1e-6).unwrap();
        (frames, d, g)
    }

    #[test]
    fn constant_ratio_coefficients() {
        let c = graph("(x^3 - 3/x)/12", "(x^3 + 3/x)/12", 1.0, 5.0);
        let (_, d, _) = decomposed(&c, 401, GVector::zero());
        assert!((d.m0[0] - 1.0).abs() < 1e-15);
        assert!((d.m1[0] - 1.0 / 3.0).abs() < 1e-14);
        assert!((d.m2[0] - 2.0 / 3.0).abs() < 1e-14);
        assert!(d.reconstruction_error < 1e-12);
        let cr = detect_constant_ratio(&d, 1e-6, &Tolerances::default()).unwrap();
        assert_eq!(cr.verdict, Verdict::True);
        assert!((cr.c3 - 3.0).abs() < 1e-9);
    }

    #[test]
    fn circle_coefficients_and_report() {
        let c = graph("0", "x^2/2", 0.5, 2.5);
        let (frames, d, g) = decomposed(&c, 401, GVector::zero());
        let i = d.s.iter().position(|&s| (s - 2.0).abs() < 1e-12).unwrap();
        assert_eq!((d.m0[i], d.m1[i], d.m2[i]), (2.0, -2.0, 0.0));
        for (s, q) in d.s.iter().zip(&d.q) {
            assert!((q + s.powi(4) / 4.0).abs() < 1e-12);
        }
        let tol = Tolerances::default();
        let cc = circle_check(&frames, &d, 1e-6, &tol);
        assert_eq!(cc.verdict, Verdict::True);
        assert!(cc.flagged && !cc.q.constant);
        let cr = detect_constant_ratio(&d, 1e-6, &tol).unwrap();
        assert_eq!(cr.verdict, Verdict::False);
        let nc = detect_n_constant(&d, &frames, g.h(), 1e-6, &tol);
        assert_eq!(nc.verdict, Verdict::False);
    }

    #[test]
    fn point_at_origin_decomposes_to_zero() {
        let c = graph("x^2", "x^3", -1.0, 1.0);
        let j = c.jet(0.4).unwrap();
        let f = c.frame_at(0.4, 1e-9).unwrap();
        let d = decompose(&[j.pos], &[f], j.pos, 1e-6).unwrap();
        assert_eq!((d.m0[0], d.m1[0], d.m2[0]), (0.0, 0.0, 0.0));
    }

    #[test]
    fn timelike_frames_are_refused() {
        let c = graph("x^2/2", "0", 0.0, 1.0);
        let f = c.frame_at(0.5, 1e-9).unwrap();
        assert!(matches!(
            decompose(&[c.jet(0.5).unwrap().pos], &[f], GVector::zero(), 1e-6),
            Err(GeometryError::FrameDegenerate { .. })
        ));
    }

    #[test]
    fn ratio_ode_residual_examples() {
        let c = graph("(x^3 - 3/x)/12", "(x^3 + 3/x)/12", 0.5, 5.0);
        let s: Vec<f64> = UniformGrid::new(0.5, 5.0, 101).nodes();
        let curv: Vec<_> = s.iter().map(|&x| c.curvatures(x).unwrap()).collect();
        let r = constant_ratio_ode_residual(&s, &curv, 3.0, 0.0, 1e-9).unwrap();
        assert!(numeric::sup_abs(&r) < 1e-9);

        // κ, τ constant: any c₃ leaves −τ/(c₃κ)... nonzero
        let flat = vec![Curvatures { kappa: 2.0f64, dkappa: 0.0, ddkappa: 0.0, tau: 0.5, dtau: 0.0 }; 3];
        let s3 = [0.0, 1.0, 2.0];
        let c3 = 1.0 / (8.0 * 1.0); // numerator κ′ − κ³c₃s vanishes at s = 1
        let r = constant_ratio_ode_residual(&s3, &flat, c3, 0.0, 1e-9).unwrap();
        assert!(r.iter().all(|v| v.abs() > 1e-3));
    }

    #[test]
    fn generator_identity() {
        let tau = parse("1", "s").unwrap();
        let g = UniformGrid::new(0.0f64, 1.0, 11);
        let out = n_constant_generator(&tau, 1.0, 0.0, &g).unwrap();
        assert!((out.m1[0] + 1.25).abs() < 1e-15 && (out.m2[0] + 0.75).abs() < 1e-15);
        for i in 0..g.n {
            let q = out.m2[i] * out.m2[i] - out.m1[i] * out.m1[i];
            assert!((q + 1.0).abs() < 1e-12);
        }
        let zero = n_constant_generator(&tau, 0.0, 0.3, &g).unwrap();
        for i in 0..g.n {
            let e = zero.u[i].exp();
            assert!((zero.m2[i] - e / 4.0).abs() < 1e-14 && (zero.m1[i] + e / 4.0).abs() < 1e-14);
        }
        let big = parse("400", "s").unwrap();
        assert!(matches!(n_constant_generator(&big, 1.0, 0.0, &g), Err(GeometryError::Overflow { .. })));
    }

    #[test]
    fn origin_search_recovers_a_shifted_center() {
        // κ = 1, τ = s anchored at 0 with α(0) = (0, 1, 0) gives α = sT − B,
        // so q = 1 about the true origin; shift the curve and search
        let mut sp = crate::reconstruct::IntrinsicSpec::new(parse("1", "s").unwrap(), parse("s", "s").unwrap(), (0.5, 2.5));
        sp.anchor = Some(0.0);
        sp.start_point = [1.0, 0.0];
        let rc = crate::reconstruct::reconstruct(&sp, 401).unwrap();
        let shift = GVector::new(0.4, 0.7, -0.3);
        let pos: Vec<_> = rc.alpha.iter().map(|p| *p + shift).collect();
        let o = search_origin(&pos, &rc.frames);
        let d = decompose(&pos, &rc.frames, o, 1e-6).unwrap();
        assert!(numeric::rel_std(&d.q) < 1e-6, "rel dev {} at {o:?}", numeric::rel_std(&d.q));
        assert!((o - shift).max_abs() < 1e-4, "origin {o:?}");
    }

    #[test]
    fn sphere_diagnostics_recover_generator_constants() {
        // 1/κ = m₁ of the generator family with τ = 1, c₄ = −10, c₅ = 0
        let sp = crate::reconstruct::IntrinsicSpec::new(
            parse("1/(10*exp(-s) - exp(s)/4)", "s").unwrap(),
            parse("1", "s").unwrap(),
            (0.0f64, 1.0),
        );
        let rc = crate::reconstruct::reconstruct(&sp, 401).unwrap();
        let tol = Tolerances::default();
        let fit = sphere_fit(&rc.alpha, &rc.frames, &rc.curvatures, &rc.grid, &tol).unwrap();
        assert_eq!(fit.verdict, Verdict::False);
        assert!((fit.fitted_c4.unwrap() + 10.0).abs() < 1e-9);
        assert!(fit.fitted_c5.unwrap().abs() < 1e-9);
        assert!(fit.second_equality_residual.unwrap() < 1e-9);
        assert!(fit.third_equality_residual.unwrap() < 1e-9);
    }

    #[test]
    fn circle_report_skips_sphere_and_flags() {
        let c = graph("0", "x^2/2", 0.5, 2.5);
        let (frames, d, g) = decomposed(&c, 201, GVector::zero());
        let pos: Vec<_> = c.jets(&g).unwrap().iter().map(|j| j.pos).collect();
        let curv: Vec<_> = g.nodes().iter().map(|&s| c.curvatures(s).unwrap()).collect();
        let r = classify(&pos, &frames, &curv, &g, &d, GVector::zero(), false, &Tolerances::default());
        assert!(r.spherical.is_none());
        assert!(r.circle.flagged);
        assert!(r.warnings.iter().any(|w| w.starts_with("sphere test skipped")));
        assert!(r.m_system[0] < 1e-9 && r.m_system[1] < 1e-9);
        assert_eq!(r.t_constant.verdict, Verdict::False);
    }
}
