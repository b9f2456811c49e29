use serde::{Deserialize, Serialize};

/// Every threshold used by the analysis, in one record. The CLI overlays a
/// JSON file on top of [`Tolerances::default`]; missing fields keep defaults.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Admissibility floor on |y″² − z″²|.
    pub adm_eps: f64,
    /// Torsion below this counts as zero.
    pub tau_eps: f64,
    /// Taxonomy tolerance for computed isotropic vectors.
    pub iso_eps: f64,
    /// |g(N,N) + 1| above this makes the decomposition refuse the frame.
    pub frame_tol: f64,
    /// Reconstruction identity α = m₀T + m₁N + m₂B.
    pub recon_tol: f64,
    /// Relative-deviation threshold for constancy tests on symbolic input.
    pub ratio_tol_symbolic: f64,
    /// Same, for quadrature-backed or sampled input.
    pub ratio_tol_quadrature: f64,
    /// T-constant verdict: |slope of m₀| at or below this.
    pub slope_tol: f64,
    pub circle_kappa_tol: f64,
    pub circle_tau_tol: f64,
    /// Spread allowed in the fitted sphere center.
    pub sphere_tol: f64,
    /// |q| below this is treated as a vanishing normal part.
    pub degenerate_normal: f64,
    pub frenet_ode: f64,
    pub frame_identity: f64,
    pub m_system: f64,
    pub third_order_symbolic: f64,
    pub third_order_quadrature: f64,
    pub ratio_relation: f64,
    /// Residuals between threshold and `band × threshold` are indeterminate.
    pub band: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            adm_eps: 1e-9,
            tau_eps: 1e-9,
            iso_eps: 1e-12,
            frame_tol: 1e-6,
            recon_tol: 1e-9,
            ratio_tol_symbolic: 1e-6,
            ratio_tol_quadrature: 1e-3,
            slope_tol: 1e-9,
            circle_kappa_tol: 1e-6,
            circle_tau_tol: 1e-9,
            sphere_tol: 1e-6,
            degenerate_normal: 1e-12,
            frenet_ode: 1e-6,
            frame_identity: 1e-9,
            m_system: 1e-5,
            third_order_symbolic: 1e-6,
            third_order_quadrature: 1e-5,
            ratio_relation: 1e-5,
            band: 10.0,
        }
    }
}

impl Tolerances {
    pub fn ratio_tol(&self, quadrature_backed: bool) -> f64 {
        if quadrature_backed {
            self.ratio_tol_quadrature
        } else {
            self.ratio_tol_symbolic
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_json_keeps_defaults() {
        let t: Tolerances = serde_json::from_str(r#"{"adm_eps": 1e-6}"#).unwrap();
        assert_eq!(t.adm_eps, 1e-6);
        assert_eq!(t.iso_eps, 1e-12);
        assert!(serde_json::from_str::<Tolerances>(r#"{"bogus": 1}"#).is_err());
    }
}
