//! Sharp constants and structured verification of the Hardy inequality and
//! the Sobolev-Lorentz embedding, with quadrature-noise-aware pass bands.

use crate::lorentz::{
    lorentz_quasinorm_cfg, lp_norm_radial, radial_power_integral, weak_norm, LorentzParams, QIndex,
};
use crate::profile::{RadialFunction, RadialProfile};
use crate::quad::{QuadConfig, QuadResult};
use crate::rearrange::{decreasing_rearrangement, gamma_half};
use crate::{Error, Result};
use serde::Serialize;

/// Relative slack of the `holds` band on top of quadrature noise.
const HOLDS_REL_BAND: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum InequalityId {
    #[serde(rename = "H_p")]
    HardyP,
    #[serde(rename = "A_pq")]
    EmbeddingPq,
    #[serde(rename = "A_pinf")]
    EmbeddingPInf,
}

impl std::fmt::Display for InequalityId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InequalityId::HardyP => write!(f, "H_p"),
            InequalityId::EmbeddingPq => write!(f, "A_pq"),
            InequalityId::EmbeddingPInf => write!(f, "A_pinf"),
        }
    }
}

/// Structured result of one inequality check. `ratio` is normalized so
/// that `ratio <= sharp_constant` means the inequality holds; `holds`
/// allows the band `sharp·(1 + 1e-7) + 10·quad_error` to separate analytic
/// failure from quadrature noise.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub inequality_id: InequalityId,
    pub params: LorentzParams,
    pub lhs: f64,
    pub rhs: f64,
    pub sharp_constant: f64,
    pub ratio: f64,
    pub margin: f64,
    pub quad_error: f64,
    pub holds: bool,
}

impl VerificationReport {
    pub fn csv_header() -> &'static str {
        "inequality_id,n,p,q,lhs,rhs,ratio,sharp,margin,quad_error,holds"
    }

    pub fn csv_row(&self) -> String {
        use crate::cli::fmt17;
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.inequality_id,
            self.params.n,
            self.params.p,
            self.params.q,
            fmt17(self.lhs),
            fmt17(self.rhs),
            fmt17(self.ratio),
            fmt17(self.sharp_constant),
            fmt17(self.margin),
            fmt17(self.quad_error),
            self.holds
        )
    }

    fn assemble(
        inequality_id: InequalityId,
        params: LorentzParams,
        lhs: f64,
        rhs: f64,
        sharp: f64,
        ratio: f64,
        quad_error: f64,
    ) -> Self {
        let holds = ratio <= sharp * (1.0 + HOLDS_REL_BAND) + 10.0 * quad_error;
        VerificationReport {
            inequality_id,
            params,
            lhs,
            rhs,
            sharp_constant: sharp,
            ratio,
            margin: sharp - ratio,
            quad_error,
            holds,
        }
    }
}

/// The q-independent sharp embedding constant (p/(n-p))·ω_n^(-1/n).
pub fn sharp_constant(params: &LorentzParams) -> f64 {
    let n = params.n as f64;
    params.p / (n - params.p) * params.omega_n().powf(-1.0 / n)
}

/// The same constant through the Γ display: (p/(n-p))·Γ(1+n/2)^(1/n)/√π.
pub fn sharp_constant_gamma_form(n: u32, p: f64) -> Result<f64> {
    if !(p >= 1.0) || p >= n as f64 {
        return Err(Error::Domain(format!("need 1 <= p < n, got p = {p}, n = {n}")));
    }
    let nf = n as f64;
    Ok(p / (nf - p) * gamma_half(n + 2).powf(1.0 / nf) / std::f64::consts::PI.sqrt())
}

/// ∫_ℝⁿ u^p/|x|^p dx = n·ω_n·∫₀^∞ u(r)^p r^(n-p-1) dr.
pub fn hardy_lhs(u: &RadialProfile, params: &LorentzParams) -> Result<QuadResult> {
    hardy_lhs_cfg(u, params, &QuadConfig::default())
}

pub fn hardy_lhs_cfg(
    u: &RadialProfile,
    params: &LorentzParams,
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    let n = params.n as f64;
    let raw = radial_power_integral(
        &RadialFunction::Profile(u.clone()),
        params.p,
        n - params.p - 1.0,
        cfg,
    )?;
    if raw.diverged {
        return Ok(raw);
    }
    Ok(QuadResult {
        value: params.ctx().sphere_area() * raw.value,
        abs_error_estimate: params.ctx().sphere_area() * raw.abs_error_estimate,
        diverged: false,
    })
}

/// ‖∇u‖_p^p = n·ω_n·∫₀^∞ |u'(r)|^p r^(n-1) dr (closed-form panels; the
/// gradient of a profile is piecewise pure-power).
pub fn gradient_lp_pow(u: &RadialProfile, params: &LorentzParams, cfg: &QuadConfig) -> Result<QuadResult> {
    let n = params.n as f64;
    let raw = radial_power_integral(
        &RadialFunction::Profile(u.gradient_magnitude()),
        params.p,
        n - 1.0,
        cfg,
    )?;
    if raw.diverged {
        return Ok(raw);
    }
    Ok(QuadResult {
        value: params.ctx().sphere_area() * raw.value,
        abs_error_estimate: params.ctx().sphere_area() * raw.abs_error_estimate,
        diverged: false,
    })
}

/// Hardy report: ratio = ((n-p)/p)^p · ∫u^p/|x|^p / ‖∇u‖_p^p, with the
/// sharp constant normalized to 1.
pub fn verify_hardy(u: &RadialProfile, params: &LorentzParams) -> Result<VerificationReport> {
    verify_hardy_cfg(u, params, &QuadConfig::default())
}

pub fn verify_hardy_cfg(
    u: &RadialProfile,
    params: &LorentzParams,
    cfg: &QuadConfig,
) -> Result<VerificationReport> {
    let n = params.n as f64;
    let p = params.p;
    let lhs = hardy_lhs_cfg(u, params, cfg)?;
    if lhs.diverged {
        return Err(Error::Divergent("Hardy integral ∫ u^p/|x|^p dx is infinite".into()));
    }
    let rhs = gradient_lp_pow(u, params, cfg)?;
    if rhs.diverged {
        return Err(Error::Divergent("gradient side ‖∇u‖_p^p is infinite".into()));
    }
    if rhs.value <= 0.0 {
        return Err(Error::Domain("gradient side vanishes; ratio undefined".into()));
    }
    let prefactor = ((n - p) / p).powf(p);
    let ratio = prefactor * lhs.value / rhs.value;
    let quad_error = ratio
        * (lhs.abs_error_estimate / lhs.value.max(f64::MIN_POSITIVE)
            + rhs.abs_error_estimate / rhs.value);
    Ok(VerificationReport::assemble(
        InequalityId::HardyP,
        *params,
        lhs.value,
        rhs.value,
        1.0,
        ratio,
        quad_error,
    ))
}

/// ‖u‖_{p*,q} (weak norm at q = ∞).
pub fn target_norm(u: &RadialProfile, params: &LorentzParams) -> Result<QuadResult> {
    target_norm_cfg(u, params, &QuadConfig::default())
}

pub fn target_norm_cfg(
    u: &RadialProfile,
    params: &LorentzParams,
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    let star = decreasing_rearrangement(&RadialFunction::Profile(u.clone()), &params.ctx())?;
    match params.q {
        QIndex::Finite(q) => lorentz_quasinorm_cfg(&star, params.p_star(), QIndex::Finite(q), cfg),
        QIndex::Infinity => Ok(QuadResult::exact(weak_norm(&star, params.p_star())?)),
    }
}

/// ‖∇u‖_{p,q}: the gradient magnitude is rearranged first — it need not
/// be monotone even when u is.
pub fn gradient_norm(u: &RadialProfile, params: &LorentzParams) -> Result<QuadResult> {
    gradient_norm_cfg(u, params, &QuadConfig::default())
}

pub fn gradient_norm_cfg(
    u: &RadialProfile,
    params: &LorentzParams,
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    let grad = u.gradient_magnitude();
    let star = decreasing_rearrangement(&RadialFunction::Profile(grad), &params.ctx())?;
    match params.q {
        QIndex::Finite(q) => lorentz_quasinorm_cfg(&star, params.p, QIndex::Finite(q), cfg),
        QIndex::Infinity => Ok(QuadResult::exact(weak_norm(&star, params.p)?)),
    }
}

/// Embedding report: ratio = ‖u‖_{p*,q}/‖∇u‖_{p,q} against the sharp
/// constant. Divergent sides surface as errors naming the side.
pub fn verify_embedding(u: &RadialProfile, params: &LorentzParams) -> Result<VerificationReport> {
    verify_embedding_cfg(u, params, &QuadConfig::default())
}

pub fn verify_embedding_cfg(
    u: &RadialProfile,
    params: &LorentzParams,
    cfg: &QuadConfig,
) -> Result<VerificationReport> {
    let target = target_norm_cfg(u, params, cfg)?;
    if target.diverged {
        return Err(Error::Divergent(format!(
            "target side ‖u‖_{{p*,{}}} is infinite",
            params.q
        )));
    }
    let grad = gradient_norm_cfg(u, params, cfg)?;
    if grad.diverged {
        return Err(Error::Divergent(format!(
            "gradient side ‖∇u‖_{{p,{}}} is infinite",
            params.q
        )));
    }
    if grad.value <= 0.0 {
        return Err(Error::Domain("gradient norm vanishes; ratio undefined".into()));
    }
    let ratio = target.value / grad.value;
    let quad_error = ratio
        * (target.abs_error_estimate / target.value.max(f64::MIN_POSITIVE)
            + grad.abs_error_estimate / grad.value);
    let id = if params.q.is_infinite() {
        InequalityId::EmbeddingPInf
    } else {
        InequalityId::EmbeddingPq
    };
    Ok(VerificationReport::assemble(
        id,
        *params,
        target.value,
        grad.value,
        sharp_constant(params),
        ratio,
        quad_error,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::PowerAffineSegment as Seg;
    use crate::transforms::dilate;

    fn params(n: u32, p: f64, q: QIndex) -> LorentzParams {
        LorentzParams::new(n, p, q).unwrap()
    }

    fn unit_cap() -> RadialProfile {
        RadialProfile::new(vec![
            Seg::new(-1.0, 1.0, 1.0, 0.0, 1.0),
            Seg::constant(0.0, 1.0, f64::INFINITY),
        ])
        .unwrap()
    }

    #[test]
    fn sharp_constant_values() {
        let s32 = sharp_constant(&params(3, 2.0, QIndex::Infinity));
        assert!((s32 - 1.2407009817988000).abs() < 1e-14, "got {s32}");
        let s21 = sharp_constant(&params(2, 1.0, QIndex::Infinity));
        assert!((s21 - 0.5641895835477563).abs() < 1e-15, "got {s21}");
    }

    #[test]
    fn gamma_and_omega_forms_agree() {
        for n in 2..=10u32 {
            for p in [1.0, 2.0, 3.0f64.min(n as f64 - 1.0)] {
                if p >= n as f64 || p < 1.0 {
                    continue;
                }
                let a = sharp_constant(&params(n, p, QIndex::Infinity));
                let b = sharp_constant_gamma_form(n, p).unwrap();
                assert!((a - b).abs() <= 1e-14 * a, "n={n} p={p}: {a} vs {b}");
            }
        }
        assert!(sharp_constant_gamma_form(3, 3.0).is_err());
    }

    #[test]
    fn hardy_lhs_examples() {
        let pr = params(3, 2.0, QIndex::Infinity);
        // u = (1-r)+: 3 omega int_0^1 (1-r)^2 dr = omega = 4 pi / 3
        let r = hardy_lhs(&unit_cap(), &pr).unwrap();
        let want = 4.0 * std::f64::consts::PI / 3.0;
        assert!((r.value - want).abs() < 1e-10, "got {} want {want}", r.value);
        // zero function
        let zero = RadialProfile::new(vec![Seg::constant(0.0, 0.0, f64::INFINITY)]).unwrap();
        assert_eq!(hardy_lhs(&zero, &pr).unwrap().value, 0.0);
        // psi truncated to the unit ball: integrand dr/r diverges
        let trunc = RadialProfile::new(vec![
            Seg::new(1.0, -0.5, 0.0, 0.0, 1.0),
            Seg::constant(0.0, 1.0, f64::INFINITY),
        ])
        .unwrap();
        assert!(hardy_lhs(&trunc, &pr).unwrap().diverged);
    }

    #[test]
    fn hardy_worked_example_ratio_quarter() {
        let pr = params(3, 2.0, QIndex::Infinity);
        let report = verify_hardy(&unit_cap(), &pr).unwrap();
        assert!((report.ratio - 0.25).abs() < 1e-10, "ratio {}", report.ratio);
        assert!(report.holds);
        assert_eq!(report.sharp_constant, 1.0);
    }

    #[test]
    fn hardy_ratio_dilation_invariant() {
        let pr = params(3, 2.0, QIndex::Infinity);
        let base = verify_hardy(&unit_cap(), &pr).unwrap().ratio;
        for lam in [0.5, 2.0] {
            let r = verify_hardy(&dilate(&unit_cap(), lam).unwrap(), &pr).unwrap().ratio;
            assert!((r - base).abs() <= 1e-9 * base, "lambda {lam}: {r} vs {base}");
        }
    }

    #[test]
    fn hardy_near_extremal_family() {
        // v_{0.01} sits within 0.15 of the sharp value 1
        let pr = params(3, 2.0, QIndex::Infinity);
        let v = crate::extremals::make_v_eps(0.01, &pr).unwrap();
        let report = verify_hardy(&v, &pr).unwrap();
        assert!(report.holds);
        assert!(report.ratio < 1.0 && report.ratio > 0.85, "ratio {}", report.ratio);
    }

    #[test]
    fn embedding_equality_at_psi() {
        for (n, p) in [(3u32, 2.0f64), (4, 2.0), (5, 3.0), (2, 1.0)] {
            let pr = params(n, p, QIndex::Infinity);
            let psi = crate::extremals::make_psi(&pr);
            let report = verify_embedding(&psi, &pr).unwrap();
            assert!(
                report.margin.abs() <= 1e-8,
                "(n,p)=({n},{p}): margin {}",
                report.margin
            );
            assert!(report.holds);
            assert_eq!(report.inequality_id, InequalityId::EmbeddingPInf);
        }
    }

    #[test]
    fn embedding_psi_diverges_at_finite_q() {
        let pr = params(3, 2.0, QIndex::Finite(4.0));
        let psi = crate::extremals::make_psi(&pr);
        match verify_embedding(&psi, &pr) {
            Err(Error::Divergent(msg)) => assert!(msg.contains("target")),
            other => panic!("expected target-side divergence, got {other:?}"),
        }
    }

    #[test]
    fn embedding_strict_at_v_eps_finite_q() {
        let pr = params(3, 2.0, QIndex::Finite(4.0));
        let v = crate::extremals::make_v_eps(0.1, &pr).unwrap();
        let report = verify_embedding(&v, &pr).unwrap();
        assert!(report.holds);
        assert!(
            report.margin > 10.0 * report.quad_error,
            "margin {} too small",
            report.margin
        );
    }

    #[test]
    fn embedding_alvino_range_q_equals_p() {
        let pr = params(3, 2.0, QIndex::Finite(2.0));
        let report = verify_embedding(&unit_cap(), &pr).unwrap();
        assert!(report.holds);
        assert!(report.ratio <= report.sharp_constant);
    }

    #[test]
    fn report_serialization_shapes() {
        let pr = params(3, 2.0, QIndex::Infinity);
        let report = verify_embedding(&crate::extremals::make_psi(&pr), &pr).unwrap();
        let json = serde_json::to_value(&report).unwrap();
        for key in [
            "inequality_id",
            "params",
            "lhs",
            "rhs",
            "sharp_constant",
            "ratio",
            "margin",
            "quad_error",
            "holds",
        ] {
            assert!(json.get(key).is_some(), "missing key {key}");
        }
        assert_eq!(json["inequality_id"], "A_pinf");
        assert_eq!(json["params"]["q"], "inf");
        let row = report.csv_row();
        assert!(row.starts_with("A_pinf,3,2,inf,"));
        assert_eq!(
            VerificationReport::csv_header().split(',').count(),
            row.split(',').count()
        );
    }
}
