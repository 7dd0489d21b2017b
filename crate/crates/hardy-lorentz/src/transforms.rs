//! Constructive transforms: dilation, the power-composition map
//! `v(r) = [u(r^(p/q))]^(q/p)` with its exact norm identities, the
//! γ-weighted approximation of the weak norm, and the auxiliary radial
//! function behind the pointwise Hardy bound. Each transform's identity is
//! a testable contract, not a proof device.

use crate::lorentz::{radial_power_integral, LorentzParams};
use crate::profile::{EndBehavior, GeneralRadial, PowerAffineSegment, RadialFunction, RadialProfile};
use crate::quad::{self, QuadConfig, QuadResult, EXP_SNAP};
use crate::{Error, Result};
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformKind {
    Dilation,
    PowerComposition,
    GammaWeighted,
    HardyAuxiliary,
}

/// A source function together with its transform image; the image is
/// radially non-increasing whenever the source is.
#[derive(Debug, Clone)]
pub struct TransformedPair {
    pub source: RadialFunction,
    pub image: RadialFunction,
    pub params: LorentzParams,
    pub kind: TransformKind,
}

/// u_λ(r) = u(λ·r), exactly in the power-affine class.
pub fn dilate(u: &RadialProfile, lambda: f64) -> Result<RadialProfile> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::Domain(format!("dilation scale must be positive, got {lambda}")));
    }
    if lambda == 1.0 {
        return Ok(u.clone());
    }
    let segments = u
        .segments()
        .iter()
        .map(|s| PowerAffineSegment {
            c: if s.is_constant() { s.c } else { s.c * lambda.powf(s.alpha) },
            alpha: s.alpha,
            d: s.d,
            lo: s.lo / lambda,
            hi: s.hi / lambda,
        })
        .collect();
    RadialProfile::new(segments)
}

/// v(r) = [u(r^(p/q))]^(q/p) for q finite, q > p, u non-increasing.
/// Pure-power and constant segments map exactly; mixed segments leave the
/// power-affine class and yield a general radial function with exponent
/// hints propagated for downstream quadrature.
pub fn power_transform(u: &RadialProfile, params: &LorentzParams) -> Result<TransformedPair> {
    let q = params.q.finite().ok_or_else(|| {
        Error::Domain("power_transform requires q < inf".into())
    })?;
    let p = params.p;
    if q <= p {
        return Err(Error::Domain(format!(
            "power_transform requires q > p (got q = {q}, p = {p})"
        )));
    }
    if !u.is_decreasing() {
        return Err(Error::Domain("power_transform requires a non-increasing profile".into()));
    }
    let stretch = q / p; // breakpoints map to their q/p powers
    let map = |r: f64| if r == 0.0 { 0.0 } else { r.powf(stretch) };

    let exact = u.segments().iter().all(|s| s.is_pure_power() || s.is_constant());
    let image = if exact {
        let segments = u
            .segments()
            .iter()
            .map(|s| {
                if s.is_constant() {
                    PowerAffineSegment::constant(
                        s.constant_value().powf(stretch),
                        map(s.lo),
                        map(s.hi),
                    )
                } else {
                    PowerAffineSegment {
                        c: s.c.powf(stretch),
                        alpha: s.alpha,
                        d: 0.0,
                        lo: map(s.lo),
                        hi: map(s.hi),
                    }
                }
            })
            .collect();
        RadialFunction::Profile(RadialProfile::new(segments)?)
    } else {
        let inner = u.clone();
        let shrink = p / q;
        let f = Arc::new(move |r: f64| {
            let w = if r == 0.0 { 0.0 } else { r.powf(shrink) };
            let v = inner.eval(w).unwrap_or(0.0);
            if v <= 0.0 {
                0.0
            } else {
                v.powf(stretch)
            }
        });
        let head = match u.head_behavior() {
            EndBehavior::Power { coeff, exponent } => EndBehavior::Power {
                coeff: coeff.powf(stretch),
                exponent, // the head exponent survives the transform
            },
            EndBehavior::Limit { value } => EndBehavior::Limit { value: value.powf(stretch) },
            other => other,
        };
        let tail = match u.tail_behavior() {
            EndBehavior::ZeroBeyond { radius } => EndBehavior::ZeroBeyond { radius: map(radius) },
            EndBehavior::Power { coeff, exponent } => EndBehavior::Power {
                coeff: coeff.powf(stretch),
                exponent,
            },
            EndBehavior::Limit { value } => EndBehavior::Limit { value: value.powf(stretch) },
        };
        let breakpoints = u.breakpoints().iter().map(|&r| map(r)).collect();
        RadialFunction::General(GeneralRadial::new(f, breakpoints, head, tail, true))
    };
    Ok(TransformedPair {
        source: RadialFunction::Profile(u.clone()),
        image,
        params: *params,
        kind: TransformKind::PowerComposition,
    })
}

/// |∇v| of the power-composition image, evaluated from the source segment
/// data by the chain rule: |u(w)|^((q-p)/p) · |u'(w)| · r^((p-q)/q) with
/// w = r^(p/q).
pub fn power_transform_gradient(
    u: &RadialProfile,
    params: &LorentzParams,
) -> Result<RadialFunction> {
    let q = params.q.finite().ok_or_else(|| {
        Error::Domain("power_transform requires q < inf".into())
    })?;
    let p = params.p;
    if q <= p {
        return Err(Error::Domain(format!(
            "power_transform requires q > p (got q = {q}, p = {p})"
        )));
    }
    let stretch = q / p;
    let shrink = p / q;
    let map = |r: f64| if r == 0.0 { 0.0 } else { r.powf(stretch) };
    let inner = u.clone();
    let f = Arc::new(move |r: f64| {
        if r <= 0.0 {
            return 0.0;
        }
        let w = r.powf(shrink);
        let val = inner.eval(w).unwrap_or(0.0);
        if val <= 0.0 {
            return 0.0;
        }
        let deriv = inner.derivative_magnitude_rc(w);
        val.powf((q - p) / p) * deriv * r.powf((p - q) / q)
    });
    let s0 = u.segments()[0];
    let head = if s0.is_constant() {
        EndBehavior::Limit { value: 0.0 }
    } else if s0.alpha < 0.0 {
        EndBehavior::Power {
            coeff: s0.alpha.abs() * s0.c.powf(stretch),
            exponent: s0.alpha - 1.0,
        }
    } else {
        // bounded head value u0 > 0 with |u'(w)| ~ |c·alpha| w^(alpha-1)
        let u0 = s0.d;
        EndBehavior::Power {
            coeff: u0.powf((q - p) / p) * (s0.c * s0.alpha).abs(),
            exponent: (s0.alpha * p - q) / q,
        }
    };
    let tail = match u.tail_behavior() {
        EndBehavior::ZeroBeyond { radius } => EndBehavior::ZeroBeyond { radius: map(radius) },
        EndBehavior::Power { coeff, exponent } => EndBehavior::Power {
            coeff: exponent.abs() * coeff.powf(stretch),
            exponent: exponent - 1.0,
        },
        EndBehavior::Limit { .. } => EndBehavior::Limit { value: 0.0 },
    };
    let breakpoints = u.breakpoints().iter().map(|&r| map(r)).collect();
    Ok(RadialFunction::General(GeneralRadial::new(f, breakpoints, head, tail, false)))
}

/// ( ∫₀^∞ [u(r) · r^((n-p)/p + 1/γ)]^γ dr/r )^(1/γ): the L^γ norm of
/// r^(n/p*)·u(r), which converges to ω_n^(-1/p*)·‖u‖_{p*,∞} as γ → ∞.
pub fn gamma_weighted_norm(
    u: &RadialProfile,
    params: &LorentzParams,
    gamma: f64,
) -> Result<QuadResult> {
    gamma_weighted_norm_cfg(u, params, gamma, &QuadConfig::default())
}

pub fn gamma_weighted_norm_cfg(
    u: &RadialProfile,
    params: &LorentzParams,
    gamma: f64,
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    if !(gamma >= 1.0) || !gamma.is_finite() {
        return Err(Error::Domain(format!("gamma must satisfy 1 <= gamma < inf, got {gamma}")));
    }
    if !u.is_decreasing() {
        return Err(Error::Domain("gamma_weighted_norm requires a non-increasing profile".into()));
    }
    let n = params.n as f64;
    let p = params.p;
    let weight = (n - p) / p + 1.0 / gamma;
    let raw = radial_power_integral(
        &RadialFunction::Profile(u.clone()),
        gamma,
        gamma * weight - 1.0,
        cfg,
    )?;
    if raw.diverged {
        return Ok(raw);
    }
    if raw.value <= 0.0 {
        return Ok(QuadResult::exact(0.0));
    }
    let value = raw.value.powf(1.0 / gamma);
    Ok(QuadResult {
        value,
        abs_error_estimate: raw.abs_error_estimate * value / (gamma * raw.value),
        diverged: false,
    })
}

// ---------------------------------------------------------------------------
// Hardy auxiliary function
// ---------------------------------------------------------------------------

fn check_hardy_admissible(u: &RadialProfile, params: &LorentzParams) -> Result<()> {
    if params.p <= 1.0 {
        return Err(Error::Domain(
            "the auxiliary construction requires 1 < p < n (p = 1 rejected)".into(),
        ));
    }
    if !u.is_decreasing() {
        return Err(Error::Domain("requires a non-increasing profile".into()));
    }
    let support = u.support_end().ok_or_else(|| {
        Error::Domain("requires compact support inside the unit ball".into())
    })?;
    if support > 1.0 + 1e-12 {
        return Err(Error::Domain(format!(
            "support radius {support} exceeds the unit ball"
        )));
    }
    // Lipschitz: bounded derivative near 0 and continuity at junctions
    let s0 = &u.segments()[0];
    if !s0.is_constant() && s0.alpha < 1.0 {
        return Err(Error::Domain(
            "not Lipschitz: derivative unbounded near the origin".into(),
        ));
    }
    let segs = u.segments();
    for i in 0..segs.len() - 1 {
        let left = segs[i].value_limit_hi();
        let right = segs[i + 1].value(segs[i + 1].lo.max(f64::MIN_POSITIVE));
        if (left - right).abs() > 1e-9 * (1.0 + left.abs()) {
            return Err(Error::Domain("not Lipschitz: jump discontinuity".into()));
        }
    }
    // u(1) = 0 follows from support ⊆ B_1 plus continuity; check the edge
    let last_nonzero = segs
        .iter()
        .rev()
        .find(|s| !(s.is_constant() && s.constant_value() == 0.0));
    if let Some(s) = last_nonzero {
        if s.hi.is_finite() && (s.hi - support).abs() < 1e-12 {
            let edge = s.value_limit_hi();
            if edge.abs() > 1e-9 * (1.0 + u.sup_value()) {
                return Err(Error::Domain(format!(
                    "u must vanish at its support edge (u({support}) = {edge})"
                )));
            }
        }
    }
    Ok(())
}

/// Suffix integrals ∫_ρ^1 |u'(t)|^p t^m dt, closed-form per segment
/// (|u'| is piecewise pure-power).
struct GradSuffix {
    // (lo, hi, coeff, exponent) of the integrand coeff·t^exponent
    panels: Vec<(f64, f64, f64, f64)>,
    suffix: Vec<f64>, // integral from hi_i to 1
}

impl GradSuffix {
    fn new(u: &RadialProfile, p: f64, m: f64) -> Self {
        let mut panels = Vec::new();
        for s in u.segments() {
            let lo = s.lo;
            let hi = s.hi.min(1.0);
            if !(hi > lo) {
                continue;
            }
            let coeff_g = (s.c * s.alpha).abs();
            if coeff_g == 0.0 {
                panels.push((lo, hi, 0.0, 0.0));
            } else {
                panels.push((lo, hi, coeff_g.powf(p), (s.alpha - 1.0) * p + m));
            }
        }
        let mut suffix = vec![0.0; panels.len()];
        let mut acc = 0.0;
        for i in (0..panels.len()).rev() {
            suffix[i] = acc;
            let (lo, hi, coeff, e) = panels[i];
            acc += Self::panel_integral(coeff, e, lo, hi);
        }
        Self { panels, suffix }
    }

    fn panel_integral(coeff: f64, e: f64, a: f64, b: f64) -> f64 {
        if coeff == 0.0 || b <= a {
            return 0.0;
        }
        if (e + 1.0).abs() <= EXP_SNAP {
            return coeff * (b / a).ln();
        }
        let ee = e + 1.0;
        let at_a = if a == 0.0 {
            if ee > 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            a.powf(ee)
        };
        coeff * (b.powf(ee) - at_a) / ee
    }

    /// ∫_ρ^1 |u'|^p t^m dt.
    fn value(&self, rho: f64) -> f64 {
        let mut total = 0.0;
        for (i, &(lo, hi, coeff, e)) in self.panels.iter().enumerate() {
            if rho >= hi {
                continue;
            }
            let a = rho.max(lo);
            total = Self::panel_integral(coeff, e, a, hi) + self.suffix[i];
            break;
        }
        total
    }

    fn total(&self) -> f64 {
        self.value(0.0)
    }
}

/// ∫_ρ^1 |u'(t)|^p t^(n-1) dt — the inner integral of the auxiliary
/// function, exact per segment. Also equals |v'(ρ)|·ρ^(n/p).
pub fn hardy_inner_integral(u: &RadialProfile, params: &LorentzParams, rho: f64) -> Result<f64> {
    check_hardy_admissible(u, params)?;
    if !(rho >= 0.0) || rho >= 1.0 {
        return Err(Error::Domain(format!("need 0 <= rho < 1, got {rho}")));
    }
    Ok(GradSuffix::new(u, params.p, params.n as f64 - 1.0).value(rho))
}

/// v(r) = ∫_r^1 ρ^(-n/p) ∫_ρ^1 |u'(t)|^p t^(n-1) dt dρ: the inner integral
/// is closed-form per segment, the outer integral adaptive. Guarantees
/// v(1) = 0, v non-increasing, and v(r) → ∞ as r → 0⁺ for nonzero u.
pub fn hardy_auxiliary(u: &RadialProfile, params: &LorentzParams) -> Result<RadialFunction> {
    hardy_auxiliary_cfg(u, params, &QuadConfig::default())
}

pub fn hardy_auxiliary_cfg(
    u: &RadialProfile,
    params: &LorentzParams,
    cfg: &QuadConfig,
) -> Result<RadialFunction> {
    check_hardy_admissible(u, params)?;
    let n = params.n as f64;
    let p = params.p;
    let inner = Arc::new(GradSuffix::new(u, p, n - 1.0));
    let inner_total = inner.total();
    let breaks: Vec<f64> = u.breakpoints().into_iter().filter(|&r| r < 1.0).collect();
    let cfg = *cfg;
    let inner2 = inner.clone();
    let f = Arc::new(move |r: f64| -> f64 {
        if r >= 1.0 || r <= 0.0 {
            return 0.0;
        }
        let g = |rho: f64| rho.powf(-n / p) * inner2.value(rho);
        let mut edges: Vec<f64> = breaks.iter().copied().filter(|&b| b > r).collect();
        edges.insert(0, r);
        edges.push(1.0);
        let mut acc = 0.0;
        for w in edges.windows(2) {
            let (v, _) = quad::adaptive(&g, w[0], w[1], &cfg);
            acc += v;
        }
        acc
    });
    let head = EndBehavior::Power {
        coeff: inner_total * p / (n - p),
        exponent: -(n - p) / p,
    };
    Ok(RadialFunction::General(GeneralRadial::new(
        f,
        u.breakpoints().into_iter().filter(|&r| r < 1.0).collect(),
        head,
        EndBehavior::ZeroBeyond { radius: 1.0 },
        true,
    )))
}

/// The pointwise bound driving the §-chain: returns
/// (lhs, rhs) = ( u(ρ)^p ,
///   (p/(n-p))^(p-1) · ρ^(-(n-p)(p-1)/p) · ∫_ρ^1 |u'|^p t^((p-1)n/p) dt );
/// the contract is lhs ≤ rhs.
pub fn pointwise_hardy_bound(
    u: &RadialProfile,
    params: &LorentzParams,
    rho: f64,
) -> Result<(f64, f64)> {
    check_hardy_admissible(u, params)?;
    if !(rho > 0.0) || rho >= 1.0 {
        return Err(Error::Domain(format!("need 0 < rho < 1, got {rho}")));
    }
    let n = params.n as f64;
    let p = params.p;
    let lhs = u.eval(rho).unwrap_or(0.0).powf(p);
    let weight_exp = (p - 1.0) / p * n;
    let integral = GradSuffix::new(u, p, weight_exp).value(rho);
    let rhs = (p / (n - p)).powf(p - 1.0) * rho.powf(-(n - p) * (p - 1.0) / p) * integral;
    Ok((lhs, rhs))
}
