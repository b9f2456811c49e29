//! Frenet trihedron with curvature and torsion of admissible curves.
//!
//! Every curve source (graph expressions, intrinsic reconstruction, sampled
//! points) is reduced to a series of [`Jet`]s; the frame is a pure function
//! of the jet.

use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};
use crate::expr::diff::{call, div, mul, sub};
use crate::expr::{Expr, Func};
use crate::kernel::{det3, GVector, Motion, Sign};
use crate::numeric::{self, UniformGrid};
use crate::scalar::Real;

/// Position of α and its first four arc-length derivatives at `s`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Jet<T> {
    pub s: T,
    pub pos: GVector<T>,
    pub d1: GVector<T>,
    pub d2: GVector<T>,
    pub d3: GVector<T>,
    pub d4: GVector<T>,
}

impl<T: Real> Jet<T> {
    /// The jet of the moved curve: points move, derivatives see the linear part.
    pub fn transformed(&self, m: &Motion<T>) -> Self {
        Self {
            s: self.s,
            pos: m.apply(&self.pos),
            d1: m.apply_vector(&self.d1),
            d2: m.apply_vector(&self.d2),
            d3: m.apply_vector(&self.d3),
            d4: m.apply_vector(&self.d4),
        }
    }

    /// y″² − z″², whose vanishing makes the curve inadmissible.
    pub fn admissibility(&self) -> T {
        self.d2.lorentz_square()
    }
}

/// Curvatures with the derivatives the residual checks need.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Curvatures<T> {
    pub kappa: T,
    pub dkappa: T,
    pub ddkappa: T,
    pub tau: T,
    pub dtau: T,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrenetSample<T> {
    pub s: T,
    pub t: GVector<T>,
    pub n: GVector<T>,
    pub b: GVector<T>,
    pub eps: Sign,
    pub kappa: T,
    pub tau: T,
}

impl<T: Real> FrenetSample<T> {
    pub fn det(&self) -> T {
        det3(&self.t, &self.n, &self.b)
    }
}

/// Frame of a jet. ε is the sign of y″² − z″², which is what makes
/// det(T, N, B) = +1 with B = ε(0, z″, y″)/κ.
pub fn frame_from_jet<T: Real>(jet: &Jet<T>, adm_eps: T) -> Result<FrenetSample<T>> {
    let w = jet.admissibility();
    if !w.is_finite() || !jet.d3.is_finite() || !jet.d1.is_finite() {
        return Err(GeometryError::NonFinite { s: jet.s.to_f64_lossy() });
    }
    let kappa = w.abs().sqrt();
    if kappa < adm_eps || w == T::zero() {
        return Err(GeometryError::Inadmissible { s: jet.s.to_f64_lossy(), value: w.to_f64_lossy() });
    }
    let eps = if w > T::zero() { Sign::Plus } else { Sign::Minus };
    let (y2, z2) = (jet.d2.y, jet.d2.z);
    let n = GVector::isotropic(y2 / kappa, z2 / kappa);
    let b = GVector::isotropic(eps.apply(z2) / kappa, eps.apply(y2) / kappa);
    let tau = (y2 * jet.d3.z - jet.d3.y * z2) / (kappa * kappa);
    Ok(FrenetSample { s: jet.s, t: jet.d1, n, b, eps, kappa, tau })
}

/// τ as det(α′, α″, α‴)/κ².
pub fn torsion_det_from_jet<T: Real>(jet: &Jet<T>, adm_eps: T) -> Result<T> {
    let w = jet.admissibility();
    if w.abs().sqrt() < adm_eps || w == T::zero() {
        return Err(GeometryError::Inadmissible { s: jet.s.to_f64_lossy(), value: w.to_f64_lossy() });
    }
    Ok(det3(&jet.d1, &jet.d2, &jet.d3) / w.abs())
}

/// Frames along a jet series; an ε flip between neighbours is an error.
pub fn frames_from_jets<T: Real>(jets: &[Jet<T>], adm_eps: T) -> Result<Vec<FrenetSample<T>>> {
    let mut out: Vec<FrenetSample<T>> = Vec::with_capacity(jets.len());
    for j in jets {
        let f = frame_from_jet(j, adm_eps)?;
        if let Some(prev) = out.last() {
            if prev.eps != f.eps {
                return Err(GeometryError::EpsFlip { from: prev.s.to_f64_lossy(), to: f.s.to_f64_lossy() });
            }
        }
        out.push(f);
    }
    Ok(out)
}

/// A grid point failing |y″² − z″²| > adm_eps.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation<T> {
    pub s: T,
    pub value: T,
}

pub fn admissibility_violations<T: Real>(jets: &[Jet<T>], adm_eps: T) -> Vec<Violation<T>> {
    jets.iter()
        .filter(|j| !(j.admissibility().abs() > adm_eps))
        .map(|j| Violation { s: j.s, value: j.admissibility() })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Causality<T> {
    Spacelike,
    Timelike,
    /// Not uniformly causal; each pair brackets a sign change of y″² − z″².
    Mixed { crossings: Vec<(T, T)> },
}

/// Spacelike iff y″² − z″² < 0 on the whole grid.
pub fn causality<T: Real>(jets: &[Jet<T>]) -> Causality<T> {
    let class = |j: &Jet<T>| {
        let w = j.admissibility();
        if w < T::zero() {
            -1
        } else if w > T::zero() {
            1
        } else {
            0
        }
    };
    let mut crossings = Vec::new();
    for pair in jets.windows(2) {
        let (a, b) = (class(&pair[0]), class(&pair[1]));
        if a != b || a == 0 {
            crossings.push((pair[0].s, pair[1].s));
        }
    }
    if crossings.is_empty() {
        match jets.first().map(class) {
            Some(1) => Causality::Timelike,
            _ => Causality::Spacelike,
        }
    } else {
        Causality::Mixed { crossings }
    }
}

/// Sup-norm residual of each Frenet equation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrenetOdeResidual<T> {
    pub t: T,
    pub n: T,
    pub b: T,
}

impl<T: Real> FrenetOdeResidual<T> {
    pub fn max(&self) -> T {
        self.t.max(self.n).max(self.b)
    }
}

fn accumulate<T: Real>(acc: &mut FrenetOdeResidual<T>, f: &FrenetSample<T>, dt: GVector<T>, dn: GVector<T>, db: GVector<T>) {
    acc.t = acc.t.max((dt - f.n * f.kappa).max_abs());
    acc.n = acc.n.max((dn - f.b * f.tau).max_abs());
    acc.b = acc.b.max((db - f.n * f.tau).max_abs());
}

/// Frenet residual from frames on a uniform grid, frame derivatives by
/// five-point differences (shifted at the ends).
pub fn frenet_ode_residual_series<T: Real>(frames: &[FrenetSample<T>], h: T) -> FrenetOdeResidual<T> {
    let d = |pick: &dyn Fn(&FrenetSample<T>) -> T| {
        let v: Vec<T> = frames.iter().map(pick).collect();
        numeric::differentiate_series(&v, h, 1, 5)
    };
    let series = [
        d(&|f| f.t.y),
        d(&|f| f.t.z),
        d(&|f| f.n.y),
        d(&|f| f.n.z),
        d(&|f| f.b.y),
        d(&|f| f.b.z),
    ];
    let mut acc = FrenetOdeResidual { t: T::zero(), n: T::zero(), b: T::zero() };
    for (i, f) in frames.iter().enumerate() {
        let v = |k: usize| GVector::isotropic(series[k][i], series[k + 1][i]);
        accumulate(&mut acc, f, v(0), v(2), v(4));
    }
    acc
}

/// α(x) = (x, y(x), z(x)) with s = x.
#[derive(Clone, Debug)]
pub struct GraphCurve<T> {
    pub y: Expr,
    pub z: Expr,
    pub domain: (T, T),
    pub origin: GVector<T>,
    dy: [Expr; 4],
    dz: [Expr; 4],
    kappa: Expr,
    tau: Expr,
    dkappa: Expr,
    ddkappa: Expr,
    dtau: Expr,
}

impl<T: Real> GraphCurve<T> {
    pub fn new(y: Expr, z: Expr, domain: (T, T)) -> Self {
        let dy = [y.derivative(), y.nth_derivative(2), y.nth_derivative(3), y.nth_derivative(4)];
        let dz = [z.derivative(), z.nth_derivative(2), z.nth_derivative(3), z.nth_derivative(4)];
        let (y2, y3) = (dy[1].root().clone(), dy[2].root().clone());
        let (z2, z3) = (dz[1].root().clone(), dz[2].root().clone());
        let w = call(Func::Abs, sub(mul(y2.clone(), y2.clone()), mul(z2.clone(), z2.clone())));
        let var = y.var_name().to_string();
        let kappa = Expr::from_node(&var, call(Func::Sqrt, w.clone()));
        let tau = Expr::from_node(&var, div(sub(mul(y2, z3.clone()), mul(y3, z2)), w));
        let dkappa = kappa.derivative();
        let ddkappa = dkappa.derivative();
        let dtau = tau.derivative();
        Self { y, z, domain, origin: GVector::zero(), dy, dz, kappa, tau, dkappa, ddkappa, dtau }
    }

    pub fn with_origin(mut self, origin: GVector<T>) -> Self {
        self.origin = origin;
        self
    }

    /// κ(s) = sqrt|y″² − z″²| as an expression.
    pub fn kappa_expr(&self) -> &Expr {
        &self.kappa
    }

    /// τ(s) = (y″z‴ − y‴z″)/|y″² − z″²| as an expression.
    pub fn tau_expr(&self) -> &Expr {
        &self.tau
    }

    pub fn jet(&self, s: T) -> Result<Jet<T>> {
        let ev = |e: &Expr| e.eval(s).map_err(|err| GeometryError::eval(s, err));
        let pair = |k: usize| -> Result<GVector<T>> {
            Ok(GVector::new(if k == 0 { T::one() } else { T::zero() }, ev(&self.dy[k])?, ev(&self.dz[k])?))
        };
        Ok(Jet {
            s,
            pos: GVector::new(s, ev(&self.y)?, ev(&self.z)?),
            d1: pair(0)?,
            d2: pair(1)?,
            d3: pair(2)?,
            d4: pair(3)?,
        })
    }

    pub fn jets(&self, grid: &UniformGrid<T>) -> Result<Vec<Jet<T>>> {
        grid.nodes().into_iter().map(|s| self.jet(s)).collect()
    }

    pub fn frame_at(&self, s: T, adm_eps: T) -> Result<FrenetSample<T>> {
        frame_from_jet(&self.jet(s)?, adm_eps)
    }

    pub fn torsion_det(&self, s: T, adm_eps: T) -> Result<T> {
        torsion_det_from_jet(&self.jet(s)?, adm_eps)
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

    /// Grid points where |y″² − z″²| ≤ adm_eps; empty means admissible.
    pub fn check_admissible(&self, grid: &UniformGrid<T>, adm_eps: T) -> Result<Vec<Violation<T>>> {
        Ok(admissibility_violations(&self.jets(grid)?, adm_eps))
    }

    pub fn spacelike_check(&self, grid: &UniformGrid<T>) -> Result<Causality<T>> {
        Ok(causality(&self.jets(grid)?))
    }

    pub fn frames(&self, grid: &UniformGrid<T>, adm_eps: T) -> Result<Vec<FrenetSample<T>>> {
        frames_from_jets(&self.jets(grid)?, adm_eps)
    }

    /// Frenet residual at the grid nodes. The frame is exact at any `s`, so
    /// derivatives use a five-point stencil of width `probe` around each node,
    /// shifted inward near the ends of the domain.
    pub fn frenet_ode_residual(&self, grid: &UniformGrid<T>, probe: T, adm_eps: T) -> Result<FrenetOdeResidual<T>> {
        let (a, b) = self.domain;
        let two = T::lit(2.0);
        let mut acc = FrenetOdeResidual { t: T::zero(), n: T::zero(), b: T::zero() };
        for s in grid.nodes() {
            let shift = if s - two * probe < a {
                (a - (s - two * probe)) / probe
            } else if s + two * probe > b {
                (b - (s + two * probe)) / probe
            } else {
                T::zero()
            };
            let offsets: Vec<T> = (-2..=2).map(|k| T::lit(k as f64) + shift).collect();
            let w = numeric::fd_weights(T::zero(), &offsets, 1).swap_remove(1);
            let mut dt = GVector::zero();
            let mut dn = GVector::zero();
            let mut db = GVector::zero();
            for (o, wk) in offsets.iter().zip(&w) {
                let f = self.frame_at(s + *o * probe, adm_eps)?;
                dt = dt + f.t * (*wk / probe);
                dn = dn + f.n * (*wk / probe);
                db = db + f.b * (*wk / probe);
            }
            accumulate(&mut acc, &self.frame_at(s, adm_eps)?, dt, dn, db);
        }
        Ok(acc)
    }
}
