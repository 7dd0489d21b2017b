//! Extremal objects: the two-branch near-maximizing family v_ε whose norm
//! ratio approaches the sharp constant as ε → 0, the attaining function
//! ψ = |x|^(-(n-p)/p) at q = ∞, and sweep/evidence tables for the
//! attained/non-attained dichotomy.

use crate::inequalities::{sharp_constant, verify_embedding_cfg};
use crate::lorentz::{lorentz_quasinorm_cfg, LorentzParams, QIndex};
use crate::profile::{PowerAffineSegment, RadialProfile};
use crate::quad::QuadConfig;
use crate::rearrange::decreasing_rearrangement;
use crate::{Error, Result};

/// ψ = |x|^(-(n-p)/p): a single pure-power segment on (0, ∞).
pub fn make_psi(params: &LorentzParams) -> RadialProfile {
    let beta = (params.n as f64 - params.p) / params.p;
    RadialProfile::new(vec![PowerAffineSegment::new(1.0, -beta, 0.0, 0.0, f64::INFINITY)])
        .expect("psi is a valid profile")
}

/// Closed-form weak norms of ψ: (‖ψ‖_{p*,∞}, ‖∇ψ‖_{p,∞}) =
/// (ω_n^(1/p*), ω_n^(1/p)·(n-p)/p). Their ratio is the sharp constant.
pub fn psi_weak_norms(params: &LorentzParams) -> (f64, f64) {
    let om = params.omega_n();
    let n = params.n as f64;
    let p = params.p;
    (om.powf(1.0 / params.p_star()), om.powf(1.0 / p) * (n - p) / p)
}

/// The two-segment profile: |x|^(-(n-p)/p+ε) inside the unit ball, the
/// affine cap 1 - ((n-p)/p - ε)(|x|-1) out to its zero, then zero.
pub fn make_v_eps(epsilon: f64, params: &LorentzParams) -> Result<RadialProfile> {
    let beta = (params.n as f64 - params.p) / params.p;
    if !(epsilon > 0.0) || epsilon >= beta {
        return Err(Error::Domain(format!(
            "need 0 < epsilon < (n-p)/p = {beta}, got {epsilon}"
        )));
    }
    let kappa = beta - epsilon;
    let support = 1.0 + 1.0 / kappa;
    RadialProfile::new(vec![
        PowerAffineSegment::new(1.0, -beta + epsilon, 0.0, 0.0, 1.0),
        PowerAffineSegment::new(-kappa, 1.0, 1.0 + kappa, 1.0, support),
        PowerAffineSegment::constant(0.0, support, f64::INFINITY),
    ])
}

/// Closed form for ‖∇v_ε‖_{p,q}^q:
///
///   n ω_n^(q/p) κ^q [ 1/(εq) + (p/(nq))·((1/κ + 1)^(nq/p) - 1) ],
///   κ = (n-p)/p - ε.
///
/// The bracket is assembled before the vanishing prefactor κ^q touches it,
/// keeping the ε → (n-p)/p and ε → 0 ends cancellation-safe.
pub fn grad_norm_closed_form(epsilon: f64, params: &LorentzParams) -> Result<f64> {
    let q = params
        .q
        .finite()
        .ok_or_else(|| Error::Domain("closed form requires q < inf".into()))?;
    let n = params.n as f64;
    let p = params.p;
    let beta = (n - p) / p;
    if !(epsilon > 0.0) || epsilon >= beta {
        return Err(Error::Domain(format!(
            "need 0 < epsilon < (n-p)/p = {beta}, got {epsilon}"
        )));
    }
    let kappa = beta - epsilon;
    let reach = 1.0 / kappa + 1.0;
    let bracket = 1.0 / (epsilon * q) + p / (n * q) * (reach.powf(n * q / p) - 1.0);
    Ok(n * params.omega_n().powf(q / p) * kappa.powf(q) * bracket)
}

/// One member of the ε-family with both norms and their ratio.
#[derive(Debug, Clone)]
pub struct EpsilonFamilyPoint {
    pub epsilon: f64,
    pub params: LorentzParams,
    pub profile: RadialProfile,
    pub grad_norm_q: f64,
    pub target_norm_q: f64,
    pub ratio: f64,
}

pub fn epsilon_family_point(
    epsilon: f64,
    params: &LorentzParams,
    cfg: &QuadConfig,
) -> Result<EpsilonFamilyPoint> {
    let q = params
        .q
        .finite()
        .ok_or_else(|| Error::Domain("the sweep requires q < inf".into()))?;
    let profile = make_v_eps(epsilon, params)?;
    let grad_norm_q = grad_norm_closed_form(epsilon, params)?;
    let star = decreasing_rearrangement(&profile.clone().into(), &params.ctx())?;
    let target = lorentz_quasinorm_cfg(&star, params.p_star(), params.q, cfg)?;
    if target.diverged {
        return Err(Error::Divergent("‖v_ε‖_{p*,q} diverged".into()));
    }
    let ratio = grad_norm_q.powf(1.0 / q) / target.value;
    Ok(EpsilonFamilyPoint {
        epsilon,
        params: *params,
        profile,
        grad_norm_q,
        target_norm_q: target.value.powf(q),
        ratio,
    })
}

/// One sweep row: the ratio ‖∇v_ε‖_{p,q}/‖v_ε‖_{p*,q} against the limit
/// ω_n^(1/n)·(n-p)/p = 1/S_{n,p}.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SweepRow {
    pub epsilon: f64,
    pub ratio: f64,
    pub limit: f64,
    pub rel_err: f64,
}

use serde::Serialize;

impl SweepRow {
    pub fn csv_header() -> &'static str {
        "epsilon,ratio,limit,rel_err"
    }

    pub fn csv_row(&self) -> String {
        use crate::cli::fmt17;
        format!(
            "{},{},{},{}",
            fmt17(self.epsilon),
            fmt17(self.ratio),
            fmt17(self.limit),
            fmt17(self.rel_err)
        )
    }
}

/// Default ε ladder for sharpness sweeps.
pub fn default_epsilons() -> Vec<f64> {
    vec![1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6]
}

/// Numerator by closed form, denominator by quadrature; the reported
/// values are raw (no extrapolation).
pub fn epsilon_sweep(params: &LorentzParams, epsilons: &[f64]) -> Result<Vec<SweepRow>> {
    epsilon_sweep_cfg(params, epsilons, &QuadConfig::default())
}

pub fn epsilon_sweep_cfg(
    params: &LorentzParams,
    epsilons: &[f64],
    cfg: &QuadConfig,
) -> Result<Vec<SweepRow>> {
    let n = params.n as f64;
    let limit = params.omega_n().powf(1.0 / n) * (n - params.p) / params.p;
    epsilons
        .iter()
        .map(|&eps| {
            let point = epsilon_family_point(eps, params, cfg)?;
            Ok(SweepRow {
                epsilon: eps,
                ratio: point.ratio,
                limit,
                rel_err: (point.ratio - limit).abs() / limit,
            })
        })
        .collect()
}

/// Evidence row for non-attainment at q < ∞: every margin must be
/// strictly positive.
#[derive(Debug, Clone, Serialize)]
pub struct EvidenceRow {
    pub profile_id: String,
    pub ratio: f64,
    pub margin: f64,
}

impl EvidenceRow {
    pub fn csv_header() -> &'static str {
        "profile_id,ratio,margin"
    }

    pub fn csv_row(&self) -> String {
        use crate::cli::fmt17;
        format!("{},{},{}", self.profile_id, fmt17(self.ratio), fmt17(self.margin))
    }
}

/// Margins of a family against the sharp constant; a non-positive margin
/// beyond quadrature tolerance is a suite failure, since it would
/// contradict the embedding theorem.
pub fn non_attainment_evidence(
    params: &LorentzParams,
    family: &[(String, RadialProfile)],
) -> Result<Vec<EvidenceRow>> {
    non_attainment_evidence_cfg(params, family, &QuadConfig::default())
}

pub fn non_attainment_evidence_cfg(
    params: &LorentzParams,
    family: &[(String, RadialProfile)],
    cfg: &QuadConfig,
) -> Result<Vec<EvidenceRow>> {
    if params.q.is_infinite() {
        return Err(Error::Domain(
            "non-attainment evidence applies to q < inf (q = inf is attained)".into(),
        ));
    }
    let mut rows = Vec::with_capacity(family.len());
    for (id, profile) in family {
        let report = verify_embedding_cfg(profile, params, cfg)?;
        if report.margin <= 10.0 * report.quad_error {
            return Err(Error::Violation(format!(
                "profile {id} at q = {} has margin {} within noise {} of equality, \
                 contradicting non-attainment",
                params.q, report.margin, report.quad_error
            )));
        }
        rows.push(EvidenceRow { profile_id: id.clone(), ratio: report.ratio, margin: report.margin });
    }
    Ok(rows)
}

/// ψ truncated at `radius` with an affine cap falling to zero at twice the
/// radius; truncation destroys the equality case at q = ∞.
pub fn psi_truncation(params: &LorentzParams, radius: f64) -> Result<RadialProfile> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::Domain(format!("truncation radius must be positive, got {radius}")));
    }
    let beta = (params.n as f64 - params.p) / params.p;
    let edge = radius.powf(-beta);
    let slope = edge / radius;
    RadialProfile::new(vec![
        PowerAffineSegment::new(1.0, -beta, 0.0, 0.0, radius),
        PowerAffineSegment::new(-slope, 1.0, 2.0 * edge, radius, 2.0 * radius),
        PowerAffineSegment::constant(0.0, 2.0 * radius, f64::INFINITY),
    ])
}

/// ψ flattened to the plateau value `c ∈ (0,1)` on the annulus
/// [1, c^(-p/(n-p))], rejoining the power law continuously: a second
/// maximizer of the q = ∞ embedding, since only the local asymptotics of
/// ψ matter.
pub fn make_psi_plateau(params: &LorentzParams, plateau: f64) -> Result<RadialProfile> {
    if !(plateau > 0.0 && plateau < 1.0) {
        return Err(Error::Domain(format!("plateau value must be in (0,1), got {plateau}")));
    }
    let beta = (params.n as f64 - params.p) / params.p;
    let rejoin = plateau.powf(-1.0 / beta);
    RadialProfile::new(vec![
        PowerAffineSegment::new(1.0, -beta, 0.0, 0.0, 1.0),
        PowerAffineSegment::constant(plateau, 1.0, rejoin),
        PowerAffineSegment::new(1.0, -beta, 0.0, rejoin, f64::INFINITY),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transforms::dilate;

    fn params(n: u32, p: f64, q: QIndex) -> LorentzParams {
        LorentzParams::new(n, p, q).unwrap()
    }

    #[test]
    fn v_eps_shape() {
        let pr = params(3, 2.0, QIndex::Finite(4.0));
        let v = make_v_eps(0.1, &pr).unwrap();
        assert_eq!(v.eval(1.0).unwrap(), 1.0);
        assert_eq!(v.support_end(), Some(3.5));
        assert!(v.is_decreasing());
        let grad = v.gradient_magnitude();
        assert!((grad.eval(2.0).unwrap() - 0.4).abs() < 1e-15);
        assert!(make_v_eps(0.5, &pr).is_err());
        assert!(make_v_eps(0.0, &pr).is_err());
    }

    #[test]
    fn grad_norm_spot_value() {
        // recomputed from the gradient's Lorentz integral (the printed
        // form of this display elsewhere mis-scales the cap term)
        let pr = params(3, 2.0, QIndex::Finite(4.0));
        let got = grad_norm_closed_form(0.1, &pr).unwrap();
        assert!((got - 415.99724576964907).abs() < 1e-9, "got {got}");
    }

    #[test]
    fn grad_norm_dual_path_oracle() {
        // closed form vs quadrature of the Lorentz integral of |grad v_eps|*
        let cfg = QuadConfig::default();
        for (n, p, q, eps) in [(3u32, 2.0f64, 4.0f64, 0.1f64), (4, 2.0, 3.0, 0.2)] {
            let pr = params(n, p, QIndex::Finite(q));
            let closed = grad_norm_closed_form(eps, &pr).unwrap();
            let v = make_v_eps(eps, &pr).unwrap();
            let star =
                decreasing_rearrangement(&v.gradient_magnitude().into(), &pr.ctx()).unwrap();
            let quad = lorentz_quasinorm_cfg(&star, p, pr.q, &cfg).unwrap();
            let rel = (closed - quad.value.powf(q)).abs() / closed;
            assert!(rel < 1e-7, "(n,p,q,eps)=({n},{p},{q},{eps}): rel {rel}");
        }
    }

    #[test]
    fn grad_norm_vanishes_at_the_right_edge() {
        let pr = params(3, 2.0, QIndex::Finite(4.0));
        let near = grad_norm_closed_form(0.4999, &pr).unwrap();
        assert!(near < 1e-10, "prefactor kappa^q must vanish, got {near}");
    }

    #[test]
    fn psi_norms_and_equality() {
        let pr = params(3, 2.0, QIndex::Infinity);
        let (target, grad) = psi_weak_norms(&pr);
        assert!((target - 1.2696424512501422).abs() < 1e-14);
        assert!((grad - 1.0233267079464885).abs() < 1e-14);
        let ratio = target / grad;
        let sharp = sharp_constant(&pr);
        assert!((ratio - sharp).abs() <= 1e-12 * sharp, "closed-form equality case");
    }

    #[test]
    fn sweep_limits_and_convergence() {
        let pr = params(3, 2.0, QIndex::Finite(4.0));
        let rows = epsilon_sweep(&pr, &[1e-2, 1e-3, 1e-4, 1e-5, 1e-6]).unwrap();
        let limit = rows[0].limit;
        assert!((limit - 0.8059959770082348).abs() < 1e-13, "limit {limit}");
        assert!((limit - 1.0 / sharp_constant(&pr)).abs() <= 1e-12 * limit);
        for w in rows.windows(2) {
            assert!(w[1].rel_err < w[0].rel_err, "rel_err must shrink along the ladder");
        }
        assert!(rows.last().unwrap().rel_err <= 2e-3);
    }

    #[test]
    fn non_attainment_family_margins() {
        let pr = params(3, 2.0, QIndex::Finite(4.0));
        let family: Vec<(String, RadialProfile)> = [0.4, 0.2, 0.1, 0.05]
            .iter()
            .map(|&e| (format!("v_eps:{e}"), make_v_eps(e, &pr).unwrap()))
            .collect();
        let rows = non_attainment_evidence(&pr, &family).unwrap();
        for w in rows.windows(2) {
            assert!(
                w[1].margin < w[0].margin,
                "margins must shrink with epsilon: {} then {}",
                w[0].margin,
                w[1].margin
            );
        }
        for row in &rows {
            assert!(row.margin > 0.0);
        }
    }

    #[test]
    fn non_attainment_margin_dilation_invariant() {
        let pr = params(3, 2.0, QIndex::Finite(4.0));
        let base = make_v_eps(0.2, &pr).unwrap();
        let family: Vec<(String, RadialProfile)> = [0.5, 1.0, 2.0]
            .iter()
            .map(|&lam| (format!("dilate:{lam}"), dilate(&base, lam).unwrap()))
            .collect();
        let rows = non_attainment_evidence(&pr, &family).unwrap();
        for row in &rows[1..] {
            assert!(
                (row.margin - rows[0].margin).abs() <= 1e-9 * rows[0].margin.abs().max(1.0),
                "margins differ across dilations: {} vs {}",
                row.margin,
                rows[0].margin
            );
        }
    }

    #[test]
    fn psi_truncations_never_attain() {
        let pr = params(3, 2.0, QIndex::Finite(4.0));
        let family: Vec<(String, RadialProfile)> = [1.0, 2.0, 5.0]
            .iter()
            .map(|&r| (format!("psi_trunc:{r}"), psi_truncation(&pr, r).unwrap()))
            .collect();
        let rows = non_attainment_evidence(&pr, &family).unwrap();
        for row in &rows {
            assert!(row.margin > 0.0, "{}: margin {}", row.profile_id, row.margin);
        }
    }

    #[test]
    fn psi_plateau_variant_attains_at_q_inf() {
        let pr = params(3, 2.0, QIndex::Infinity);
        let u = make_psi_plateau(&pr, 0.6).unwrap();
        assert!(u.is_decreasing());
        let report = crate::inequalities::verify_embedding(&u, &pr).unwrap();
        assert!(
            report.margin.abs() <= 1e-8,
            "plateau variant should attain: margin {}",
            report.margin
        );
    }
}
