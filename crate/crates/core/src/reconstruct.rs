//! Curves and position coefficients from intrinsic data κ(s), τ(s).

use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};
use crate::expr::Expr;
use crate::frenet::{frames_from_jets, Curvatures, FrenetSample, Jet};
use crate::kernel::{GVector, Sign};
use crate::numeric::{self, cumulative_integral, cumulative_simpson_panels, UniformGrid};
use crate::sampled::tangent_jets;
use crate::scalar::Real;

/// κ(s), τ(s) on `domain` plus the free integration constants.
///
/// `anchor` is where the indefinite integrals start (default: the domain
/// start); `start_point` and `start_tangent` give (y, z) of α and T there.
#[derive(Clone, Debug)]
pub struct IntrinsicSpec<T> {
    pub kappa: Expr,
    pub tau: Expr,
    pub domain: (T, T),
    pub c0: T,
    pub c1: T,
    pub c2: T,
    pub u0: T,
    pub anchor: Option<T>,
    pub start_point: [T; 2],
    pub start_tangent: [T; 2],
    dkappa: Expr,
    ddkappa: Expr,
    dtau: Expr,
}

#[derive(Clone, Copy, Debug)]
struct State<T> {
    theta: T,
    t: [T; 2],
    p: [T; 2],
}

struct Segment<T> {
    theta: Vec<T>,
    tangents: Vec<[T; 2]>,
    points: Vec<[T; 2]>,
}

impl<T: Real> IntrinsicSpec<T> {
    pub fn new(kappa: Expr, tau: Expr, domain: (T, T)) -> Self {
        let dkappa = kappa.derivative();
        let ddkappa = dkappa.derivative();
        let dtau = tau.derivative();
        Self {
            kappa,
            tau,
            domain,
            c0: T::zero(),
            c1: T::zero(),
            c2: T::zero(),
            u0: T::zero(),
            anchor: None,
            start_point: [T::zero(); 2],
            start_tangent: [T::zero(); 2],
            dkappa,
            ddkappa,
            dtau,
        }
    }

    pub fn kappa_at(&self, s: T) -> Result<T> {
        self.kappa.eval(s).map_err(|e| GeometryError::eval(s, e))
    }

    pub fn tau_at(&self, s: T) -> Result<T> {
        self.tau.eval(s).map_err(|e| GeometryError::eval(s, e))
    }

    pub fn curvatures(&self, s: T) -> Result<Curvatures<T>> {
        let ev = |e: &Expr| e.eval(s).map_err(|err| GeometryError::eval(s, err));
        Ok(Curvatures {
            kappa: ev(&self.kappa)?,
            dkappa: ev(&self.dkappa)?,
            ddkappa: ev(&self.ddkappa)?,
            tau: ev(&self.tau)?,
            dtau: ev(&self.dtau)?,
        })
    }

    /// Nested quadrature from `lo` to `hi` on `n` nodes. θ lives on an h/4
    /// grid, T on h/2, α on h, so every output node closes a Simpson panel.
    fn segment(&self, lo: T, hi: T, n: usize, init: State<T>) -> Result<Segment<T>> {
        let grid = UniformGrid::new(lo, hi, n);
        let fine = grid.refine(4);
        let theta = cumulative_integral(&fine, |s| self.tau_at(s))?;
        let mut gy = Vec::with_capacity(fine.n);
        let mut gz = Vec::with_capacity(fine.n);
        for (i, th) in theta.iter().enumerate() {
            let k = self.kappa_at(fine.node(i))?;
            let th = init.theta + *th;
            gy.push(-k * th.sinh());
            gz.push(k * th.cosh());
        }
        let ty = cumulative_simpson_panels(&gy, fine.h());
        let tz = cumulative_simpson_panels(&gz, fine.h());
        let ty: Vec<T> = ty.into_iter().map(|v| v + init.t[0]).collect();
        let tz: Vec<T> = tz.into_iter().map(|v| v + init.t[1]).collect();
        let half = grid.h() / T::lit(2.0);
        let py = cumulative_simpson_panels(&ty, half);
        let pz = cumulative_simpson_panels(&tz, half);
        Ok(Segment {
            theta: (0..n).map(|i| init.theta + theta[4 * i]).collect(),
            tangents: (0..n).map(|i| [ty[2 * i], tz[2 * i]]).collect(),
            points: (0..n).map(|i| [init.p[0] + py[i], init.p[1] + pz[i]]).collect(),
        })
    }
}

/// Output of [`reconstruct`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReconstructedCurve<T> {
    pub grid: UniformGrid<T>,
    pub theta: Vec<T>,
    pub alpha: Vec<GVector<T>>,
    pub tangents: Vec<GVector<T>>,
    pub frames: Vec<FrenetSample<T>>,
    /// Jets whose higher derivatives come from differentiating under the
    /// integral: α″ = κN, α‴ = κ′N + κτB, α⁗ = (κ″ + κτ²)N + (2κ′τ + κτ′)B.
    pub jets: Vec<Jet<T>>,
    pub curvatures: Vec<Curvatures<T>>,
}

/// θ = u0 + ∫τ and T = (1, −∫κ sinh θ, ∫κ cosh θ). α = ∫T; N and B are read
/// off θ directly. All integrals are composite Simpson.
pub fn reconstruct<T: Real>(spec: &IntrinsicSpec<T>, n: usize) -> Result<ReconstructedCurve<T>> {
    if n < 9 {
        return Err(GeometryError::Invalid(format!("need at least 9 grid points, got {n}")));
    }
    let (a, b) = spec.domain;
    if !(a < b) {
        return Err(GeometryError::Invalid("domain must satisfy a < b".into()));
    }
    let grid = UniformGrid::new(a, b, n);
    let mut init = State { theta: spec.u0, t: spec.start_tangent, p: spec.start_point };
    let anchor = spec.anchor.unwrap_or(a);
    if anchor != a {
        let steps = ((a - anchor).abs() / grid.h()).ceil().to_usize().unwrap_or(0);
        let m = (steps + 1).max(9);
        let pre = spec.segment(anchor, a, m, init)?;
        init = State { theta: pre.theta[m - 1], t: pre.tangents[m - 1], p: pre.points[m - 1] };
    }
    let seg = spec.segment(a, b, n, init)?;
    let mut out = ReconstructedCurve {
        grid,
        theta: seg.theta,
        alpha: Vec::with_capacity(n),
        tangents: Vec::with_capacity(n),
        frames: Vec::with_capacity(n),
        jets: Vec::with_capacity(n),
        curvatures: Vec::with_capacity(n),
    };
    for i in 0..n {
        let s = grid.node(i);
        let th = out.theta[i];
        let c = spec.curvatures(s)?;
        let nv = GVector::isotropic(-th.sinh(), th.cosh());
        let bv = GVector::isotropic(-th.cosh(), th.sinh());
        let t = GVector::new(T::one(), seg.tangents[i][0], seg.tangents[i][1]);
        let pos = GVector::new(s, seg.points[i][0], seg.points[i][1]);
        if !pos.is_finite() || !t.is_finite() {
            return Err(GeometryError::NonFinite { s: s.to_f64_lossy() });
        }
        out.frames.push(FrenetSample { s, t, n: nv, b: bv, eps: Sign::Minus, kappa: c.kappa, tau: c.tau });
        out.jets.push(Jet {
            s,
            pos,
            d1: t,
            d2: nv * c.kappa,
            d3: nv * c.dkappa + bv * (c.kappa * c.tau),
            d4: nv * (c.ddkappa + c.kappa * c.tau * c.tau)
                + bv * (T::lit(2.0) * c.dkappa * c.tau + c.kappa * c.dtau),
        });
        out.alpha.push(pos);
        out.tangents.push(t);
        out.curvatures.push(c);
    }
    Ok(out)
}

/// Sup-norm errors of κ, τ re-derived from a reconstruction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundTrip<T> {
    pub n: usize,
    pub kappa_err: T,
    pub tau_err: T,
}

impl<T: Real> RoundTrip<T> {
    pub fn max(&self) -> T {
        self.kappa_err.max(self.tau_err)
    }
}

/// Reconstructs on `n` nodes, then re-derives κ and τ at every interior node
/// from the tabulated tangents alone (central differences two nodes wide).
pub fn round_trip<T: Real>(spec: &IntrinsicSpec<T>, n: usize, adm_eps: T) -> Result<RoundTrip<T>> {
    let rc = reconstruct(spec, n)?;
    let jets = tangent_jets(&rc.grid, &rc.alpha, &rc.tangents, 2);
    let frames = frames_from_jets(&jets, adm_eps)?;
    let mut out = RoundTrip { n, kappa_err: T::zero(), tau_err: T::zero() };
    for f in &frames {
        out.kappa_err = out.kappa_err.max((f.kappa - spec.kappa_at(f.s)?).abs());
        out.tau_err = out.tau_err.max((f.tau - spec.tau_at(f.s)?).abs());
    }
    Ok(out)
}

/// Right-hand side of the coefficient system
/// m₀′ = 1, m₁′ + κm₀ + τm₂ = 0, m₂′ + τm₁ = 0, with m₀ = s + c₀.
pub fn m_system_rhs<T: Real>(m1: T, m2: T, s: T, kappa: T, tau: T, c0: T) -> (T, T) {
    (-kappa * (s + c0) - tau * m2, -tau * m1)
}

/// m₀, m₁, m₂ on a grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MSeries<T> {
    pub s: Vec<T>,
    pub m0: Vec<T>,
    pub m1: Vec<T>,
    pub m2: Vec<T>,
}

/// RK4 integration of the coefficient system from `(m1, m2)` at the grid start.
pub fn integrate_m_system<T: Real>(spec: &IntrinsicSpec<T>, grid: &UniformGrid<T>, start: (T, T)) -> Result<MSeries<T>> {
    let states = numeric::rk4(grid, [start.0, start.1], |s, y| {
        let (d1, d2) = m_system_rhs(y[0], y[1], s, spec.kappa_at(s)?, spec.tau_at(s)?, spec.c0);
        Ok::<_, GeometryError>([d1, d2])
    })?;
    let s = grid.nodes();
    Ok(MSeries {
        m0: s.iter().map(|&v| v + spec.c0).collect(),
        m1: states.iter().map(|y| y[0]).collect(),
        m2: states.iter().map(|y| y[1]).collect(),
        s,
    })
}

/// Which spelling of the closed form to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClosedForm {
    /// Variation of parameters in t with dt = τ ds, so the 1/τ Jacobian cancels:
    /// m₂ = c₁eᵗ − c₂e⁻ᵗ + ½eᵗP − ½e⁻ᵗQ, m₁ = −dm₂/dt,
    /// P = ∫κ(s + c₀)e⁻ᵗ ds, Q = ∫κ(s + c₀)eᵗ ds.
    JacobianAbsorbed,
    /// As above with an extra 1/τ inside both integrands.
    ExplicitInverseTau,
    /// A sign variant that circulates for this solution: +½e⁻ᵗQ in m₂ and
    /// m₁ = c₁eᵗ + c₂e⁻ᵗ + ½eᵗP − ½e⁻ᵗQ. It solves m″ − m = f′, not the system.
    FlippedQSign,
}

impl ClosedForm {
    pub const ALL: [ClosedForm; 3] = [ClosedForm::JacobianAbsorbed, ClosedForm::ExplicitInverseTau, ClosedForm::FlippedQSign];
}

/// Refuses τ that vanishes or changes sign anywhere on the grid.
pub fn check_torsion_sign<T: Real>(spec: &IntrinsicSpec<T>, grid: &UniformGrid<T>, tau_eps: T) -> Result<Sign> {
    let mut sign = None;
    for s in grid.refine(2).nodes() {
        let tau = spec.tau_at(s)?;
        if tau.abs() < tau_eps {
            return Err(GeometryError::ZeroTorsion { s: s.to_f64_lossy(), tau: tau.to_f64_lossy() });
        }
        let here = Sign::of(&tau);
        match sign {
            None => sign = Some(here),
            Some(prev) if prev != here => return Err(GeometryError::TorsionSignChange),
            _ => {}
        }
    }
    Ok(sign.unwrap_or(Sign::Plus))
}

/// Closed-form m₁ and m₂. Every integral is cumulative Simpson from the grid start.
pub fn closed_form<T: Real>(
    spec: &IntrinsicSpec<T>,
    grid: &UniformGrid<T>,
    variant: ClosedForm,
    tau_eps: T,
) -> Result<MSeries<T>> {
    check_torsion_sign(spec, grid, tau_eps)?;
    let fine = grid.refine(2);
    let t_fine = cumulative_integral(&fine, |s| spec.tau_at(s))?;
    let mut fp = Vec::with_capacity(fine.n);
    let mut fq = Vec::with_capacity(fine.n);
    for (i, t) in t_fine.iter().enumerate() {
        let s = fine.node(i);
        let mut f = spec.kappa_at(s)? * (s + spec.c0);
        if variant == ClosedForm::ExplicitInverseTau {
            f = f / spec.tau_at(s)?;
        }
        fp.push(f * (-*t).exp());
        fq.push(f * t.exp());
    }
    let p = cumulative_simpson_panels(&fp, fine.h());
    let q = cumulative_simpson_panels(&fq, fine.h());
    let half = T::lit(0.5);
    let (c1, c2) = (spec.c1, spec.c2);
    let mut out = MSeries { s: grid.nodes(), m0: Vec::new(), m1: Vec::new(), m2: Vec::new() };
    for i in 0..grid.n {
        let t = t_fine[2 * i];
        let (ep, em) = (t.exp(), (-t).exp());
        let (m1, m2) = match variant {
            ClosedForm::JacobianAbsorbed | ClosedForm::ExplicitInverseTau => (
                -c1 * ep - c2 * em - half * ep * p[i] - half * em * q[i],
                c1 * ep - c2 * em + half * ep * p[i] - half * em * q[i],
            ),
            ClosedForm::FlippedQSign => (
                c1 * ep + c2 * em + half * ep * p[i] - half * em * q[i],
                c1 * ep - c2 * em + half * ep * p[i] + half * em * q[i],
            ),
        };
        if !m1.is_finite() || !m2.is_finite() {
            return Err(GeometryError::NonFinite { s: out.s[i].to_f64_lossy() });
        }
        out.m0.push(out.s[i] + spec.c0);
        out.m1.push(m1);
        out.m2.push(m2);
    }
    Ok(out)
}

/// Sup-norms of m₁′ + κm₀ + τm₂ and m₂′ + τm₁ for a coefficient series,
/// derivatives by five-point differences.
pub fn m_system_residual<T: Real>(m: &MSeries<T>, kappa: &[T], tau: &[T], h: T) -> (T, T) {
    let d1 = numeric::differentiate_series(&m.m1, h, 1, 5);
    let d2 = numeric::differentiate_series(&m.m2, h, 1, 5);
    let mut r = (T::zero(), T::zero());
    for i in 0..m.s.len() {
        r.0 = r.0.max((d1[i] + kappa[i] * m.m0[i] + tau[i] * m.m2[i]).abs());
        r.1 = r.1.max((d2[i] + tau[i] * m.m1[i]).abs());
    }
    r
}

/// Residual of each closed-form spelling against the coefficient system.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariantCheck<T> {
    pub variant: ClosedForm,
    pub middle: T,
    pub last: T,
}

pub fn compare_closed_forms<T: Real>(spec: &IntrinsicSpec<T>, grid: &UniformGrid<T>, tau_eps: T) -> Result<Vec<VariantCheck<T>>> {
    let nodes = grid.nodes();
    let kappa = nodes.iter().map(|&s| spec.kappa_at(s)).collect::<Result<Vec<_>>>()?;
    let tau = nodes.iter().map(|&s| spec.tau_at(s)).collect::<Result<Vec<_>>>()?;
    ClosedForm::ALL
        .iter()
        .map(|&variant| {
            let m = closed_form(spec, grid, variant, tau_eps)?;
            let (middle, last) = m_system_residual(&m, &kappa, &tau, grid.h());
            Ok(VariantCheck { variant, middle, last })
        })
        .collect()
}

/// Componentwise sup-norms of the third-order vector equation satisfied by T:
/// σρT‴ + (2σρ′ + σ′ρ)T″ + (σρ″ − τρ + σ′ρ′)T′ = 0 with ρ = 1/κ, σ = 1/τ.
/// `flipped_*` evaluate the same expression with the σ′ terms negated.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThirdOrderResidual<T> {
    pub y: T,
    pub z: T,
    pub flipped_y: T,
    pub flipped_z: T,
}

impl<T: Real> ThirdOrderResidual<T> {
    pub fn max(&self) -> T {
        self.y.max(self.z)
    }
}

pub fn third_order_residual<T: Real>(
    jets: &[Jet<T>],
    curvatures: &[Curvatures<T>],
    kappa_eps: T,
    tau_eps: T,
) -> Result<ThirdOrderResidual<T>> {
    let two = T::lit(2.0);
    let mut out = ThirdOrderResidual { y: T::zero(), z: T::zero(), flipped_y: T::zero(), flipped_z: T::zero() };
    for (j, c) in jets.iter().zip(curvatures) {
        if c.kappa.abs() < kappa_eps {
            return Err(GeometryError::ZeroCurvature { s: j.s.to_f64_lossy() });
        }
        if c.tau.abs() < tau_eps {
            return Err(GeometryError::ZeroTorsion { s: j.s.to_f64_lossy(), tau: c.tau.to_f64_lossy() });
        }
        let k = c.kappa;
        let rho = k.recip();
        let drho = -c.dkappa / (k * k);
        let ddrho = (two * c.dkappa * c.dkappa - k * c.ddkappa) / (k * k * k);
        let sigma = c.tau.recip();
        let dsigma = -c.dtau / (c.tau * c.tau);
        let eval = |sgn: T| {
            let a = sigma * rho;
            let b = two * sigma * drho + sgn * dsigma * rho;
            let cc = sigma * ddrho - c.tau * rho + sgn * dsigma * drho;
            j.d4 * a + j.d3 * b + j.d2 * cc
        };
        let good = eval(T::one());
        let flipped = eval(-T::one());
        out.y = out.y.max(good.y.abs());
        out.z = out.z.max(good.z.abs());
        out.flipped_y = out.flipped_y.max(flipped.y.abs());
        out.flipped_z = out.flipped_z.max(flipped.z.abs());
    }
    Ok(out)
}
