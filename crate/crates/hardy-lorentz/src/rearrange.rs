//! Distribution functions, decreasing rearrangements u*, and symmetric
//! rearrangements u^♯ on ℝⁿ, plus the discrete rearrangement on sampled
//! data.
//!
//! Decreasing radial profiles rearrange exactly: `u*(t) = u((t/ω_n)^{1/n})`
//! stays piecewise power-affine in the measure variable. Everything else is
//! materialized lazily — evaluating `u*(t)` runs a bisection over levels of
//! the analytic distribution function, so no grid is ever committed to.

use crate::profile::{EndBehavior, GeneralRadial, PowerAffineSegment, RadialFunction, RadialProfile};
use crate::{Error, Result};
use std::sync::Arc;

/// Iteration budget for the level search behind lazy rearrangements.
const LEVEL_SEARCH_ITERS: u32 = 80;

/// Relative slack when validating monotonicity of segment junctions.
const VALUE_SLACK: f64 = 1e-12;

/// Γ(k/2) for integer k ≥ 1, by the exact half-integer recursion.
pub fn gamma_half(k: u32) -> f64 {
    assert!(k >= 1, "gamma_half needs k >= 1");
    match k {
        1 => std::f64::consts::PI.sqrt(),
        2 => 1.0,
        _ => (0.5 * (k - 2) as f64) * gamma_half(k - 2),
    }
}

/// Volume of the unit ball in ℝⁿ: π^(n/2) / Γ(1 + n/2).
pub fn unit_ball_volume(n: u32) -> f64 {
    let pi = std::f64::consts::PI;
    let pi_pow = pi.powi((n / 2) as i32) * if n % 2 == 1 { pi.sqrt() } else { 1.0 };
    pi_pow / gamma_half(n + 2)
}

/// Ambient dimension with its derived unit-ball volume ω_n.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionContext {
    pub n: u32,
    pub omega_n: f64,
}

impl DimensionContext {
    pub fn new(n: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!("dimension must be >= 2, got {n}")));
        }
        Ok(Self { n, omega_n: unit_ball_volume(n) })
    }

    /// Surface area of the unit sphere, n·ω_n.
    pub fn sphere_area(&self) -> f64 {
        self.n as f64 * self.omega_n
    }

    /// Measure of the ball of radius `r`.
    pub fn ball_measure(&self, r: f64) -> f64 {
        self.omega_n * r.powi(self.n as i32)
    }

    /// Radius of the ball with the given measure.
    pub fn radius_of_measure(&self, t: f64) -> f64 {
        (t / self.omega_n).powf(1.0 / self.n as f64)
    }
}

// ---------------------------------------------------------------------------
// OneDimFunction
// ---------------------------------------------------------------------------

/// Non-increasing, right-continuous, nonnegative function of the measure
/// variable t ∈ (0,∞); the home of rearrangements u*.
#[derive(Clone)]
pub struct OneDimFunction {
    pub(crate) repr: OneDimRepr,
}

#[derive(Clone)]
pub(crate) enum OneDimRepr {
    /// Exact piecewise power-affine data on the t axis (implicitly zero
    /// beyond the last segment).
    Piecewise(Vec<PowerAffineSegment>),
    General(GeneralOneDim),
}

#[derive(Clone)]
pub(crate) struct GeneralOneDim {
    pub f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub breakpoints: Vec<f64>,
    pub head: EndBehavior,
    pub tail: EndBehavior,
    /// Present on lazily rearranged functions: the analytic distribution
    /// function and its critical levels, which let the weak norm run on
    /// levels instead of on t.
    pub level_form: Option<Arc<LevelForm>>,
}

pub(crate) struct LevelForm {
    pub mu: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub critical_levels: Vec<f64>,
    pub sup_value: f64,
}

impl std::fmt::Debug for OneDimFunction {
    fn fmt(&self, fmt: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.repr {
            OneDimRepr::Piecewise(segs) => fmt.debug_tuple("Piecewise").field(segs).finish(),
            OneDimRepr::General(g) => fmt
                .debug_struct("General")
                .field("breakpoints", &g.breakpoints)
                .field("head", &g.head)
                .field("tail", &g.tail)
                .finish(),
        }
    }
}

impl OneDimFunction {
    /// Exact representation from validated segments: contiguous from 0,
    /// nonnegative, non-increasing within segments and across junctions.
    pub fn from_segments(segments: Vec<PowerAffineSegment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidProfile("rearrangement has no segments".into()));
        }
        if segments[0].lo != 0.0 {
            return Err(Error::InvalidSegment {
                index: 0,
                reason: "first segment must start at 0".into(),
            });
        }
        for (i, s) in segments.iter().enumerate() {
            if !(s.lo < s.hi) {
                return Err(Error::InvalidSegment { index: i, reason: "need lo < hi".into() });
            }
            if !s.is_nonincreasing() {
                return Err(Error::InvalidSegment {
                    index: i,
                    reason: "segment is not non-increasing".into(),
                });
            }
            let min = s.value_limit_lo().min(s.value_limit_hi());
            if min < -VALUE_SLACK {
                return Err(Error::InvalidSegment { index: i, reason: "negative values".into() });
            }
            if i + 1 < segments.len() {
                let next = &segments[i + 1];
                if s.hi != next.lo {
                    return Err(Error::InvalidSegment {
                        index: i + 1,
                        reason: "segments must be contiguous".into(),
                    });
                }
                let left = s.value_limit_hi();
                let right = next.value(next.lo.max(f64::MIN_POSITIVE));
                if right > left + VALUE_SLACK * (1.0 + left.abs()) {
                    return Err(Error::InvalidSegment {
                        index: i + 1,
                        reason: "junction jumps upward; not non-increasing".into(),
                    });
                }
            }
        }
        Ok(Self { repr: OneDimRepr::Piecewise(segments) })
    }

    pub(crate) fn general(g: GeneralOneDim) -> Self {
        Self { repr: OneDimRepr::General(g) }
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::Domain(format!("eval requires t > 0, got {t}")));
        }
        Ok(self.eval_unchecked(t))
    }

    /// Evaluation with the zero-beyond-domain convention.
    pub(crate) fn eval_unchecked(&self, t: f64) -> f64 {
        match &self.repr {
            OneDimRepr::Piecewise(segs) => {
                let idx = segs.partition_point(|s| s.hi <= t);
                if idx < segs.len() {
                    segs[idx].value(t).max(0.0)
                } else {
                    0.0
                }
            }
            OneDimRepr::General(g) => (g.f)(t),
        }
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.repr {
            OneDimRepr::Piecewise(segs) => segs.iter().skip(1).map(|s| s.lo).collect(),
            OneDimRepr::General(g) => g.breakpoints.clone(),
        }
    }

    pub fn head_behavior(&self) -> EndBehavior {
        match &self.repr {
            OneDimRepr::Piecewise(segs) => {
                let s = &segs[0];
                if s.is_constant() {
                    EndBehavior::Limit { value: s.constant_value() }
                } else if s.alpha < 0.0 {
                    EndBehavior::Power { coeff: s.c, exponent: s.alpha }
                } else {
                    EndBehavior::Limit { value: s.d }
                }
            }
            OneDimRepr::General(g) => g.head,
        }
    }

    pub fn tail_behavior(&self) -> EndBehavior {
        match &self.repr {
            OneDimRepr::Piecewise(segs) => {
                let mut end = segs.last().unwrap().hi;
                for s in segs.iter().rev() {
                    if s.is_constant() && s.constant_value() == 0.0 {
                        end = s.lo;
                    } else {
                        break;
                    }
                }
                if end.is_finite() {
                    return EndBehavior::ZeroBeyond { radius: end };
                }
                let s = segs.last().unwrap();
                if s.is_constant() {
                    EndBehavior::Limit { value: s.constant_value() }
                } else {
                    EndBehavior::Power { coeff: s.c, exponent: s.alpha }
                }
            }
            OneDimRepr::General(g) => g.tail,
        }
    }

    /// Measure beyond which the function is identically zero, if finite.
    pub fn support_end(&self) -> Option<f64> {
        match self.tail_behavior() {
            EndBehavior::ZeroBeyond { radius } => Some(radius),
            _ => None,
        }
    }

    pub(crate) fn level_form(&self) -> Option<Arc<LevelForm>> {
        match &self.repr {
            OneDimRepr::General(g) => g.level_form.clone(),
            OneDimRepr::Piecewise(_) => None,
        }
    }
}

// ---------------------------------------------------------------------------
// Distribution function
// ---------------------------------------------------------------------------

/// |{x ∈ ℝⁿ : u(|x|) > level}|, by analytic inversion of each monotone
/// power-affine segment, or bracketed bisection on general segments.
pub fn distribution_function(
    u: &RadialFunction,
    ctx: &DimensionContext,
    level: f64,
) -> Result<f64> {
    if !(level >= 0.0) || !level.is_finite() {
        return Err(Error::Domain(format!("level must be a finite nonnegative real, got {level}")));
    }
    match u.tail_behavior() {
        EndBehavior::Limit { value } if value > level => {
            return Err(Error::Divergent(format!(
                "superlevel set at level {level} has infinite measure (tail limit {value})"
            )));
        }
        EndBehavior::Power { coeff, exponent } if coeff > 0.0 && exponent < 0.0 && level == 0.0 => {
            return Err(Error::Divergent(
                "support has infinite measure (power tail never vanishes)".into(),
            ));
        }
        _ => {}
    }
    match u {
        RadialFunction::Profile(p) => profile_distribution(p, ctx, level),
        RadialFunction::General(g) => general_distribution(g, ctx, level),
    }
}

fn superlevel_radii(seg: &PowerAffineSegment, level: f64) -> Option<(f64, f64)> {
    if seg.is_constant() {
        return (seg.constant_value() > level).then_some((seg.lo, seg.hi));
    }
    let vlo = seg.value_limit_lo();
    let vhi = seg.value_limit_hi();
    let crossing = || {
        seg.invert(level)
            .unwrap_or_else(|| bisect_segment_crossing(seg, level))
    };
    if seg.monotone_direction() < 0 {
        // decreasing: superlevel is an initial piece [lo, x)
        if vhi > level {
            Some((seg.lo, seg.hi))
        } else if vlo <= level {
            None
        } else {
            Some((seg.lo, crossing()))
        }
    } else {
        // increasing: superlevel is a final piece (x, hi)
        if vlo > level {
            Some((seg.lo, seg.hi))
        } else if vhi <= level {
            None
        } else {
            Some((crossing(), seg.hi))
        }
    }
}

fn bisect_segment_crossing(seg: &PowerAffineSegment, level: f64) -> f64 {
    // fallback for roundoff at segment edges; the root is bracketed by
    // construction (the caller checked a strict sign change)
    let mut lo = seg.lo.max(f64::MIN_POSITIVE);
    let mut hi = if seg.hi.is_finite() { seg.hi } else { bracket_tail_radius(seg, level) };
    let tol = 1e-13 * (hi - lo);
    let rising = seg.monotone_direction() > 0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let above = seg.value(mid) > level;
        if above == rising {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= tol {
            break;
        }
    }
    0.5 * (lo + hi)
}

fn bracket_tail_radius(seg: &PowerAffineSegment, level: f64) -> f64 {
    let mut hi = seg.lo.max(1.0);
    for _ in 0..4000 {
        hi *= 2.0;
        if seg.value(hi) <= level {
            return hi;
        }
    }
    hi
}

fn profile_distribution(p: &RadialProfile, ctx: &DimensionContext, level: f64) -> Result<f64> {
    let mut total = 0.0;
    for seg in p.segments() {
        if let Some((a, b)) = superlevel_radii(seg, level) {
            if !b.is_finite() {
                return Err(Error::Divergent(format!(
                    "superlevel set at level {level} has infinite measure"
                )));
            }
            total += ctx.ball_measure(b) - ctx.ball_measure(a);
        }
    }
    Ok(total)
}

fn general_distribution(g: &GeneralRadial, ctx: &DimensionContext, level: f64) -> Result<f64> {
    // piecewise monotone between breakpoints is assumed for every carrier
    // produced by this crate; each cell contributes at most one crossing
    let mut edges = vec![0.0];
    edges.extend(g.breakpoints.iter().copied());
    let outer = match g.tail {
        EndBehavior::ZeroBeyond { radius } => radius,
        EndBehavior::Power { coeff, exponent } => {
            if level == 0.0 {
                return Err(Error::Divergent("support has infinite measure".into()));
            }
            // radius where the tail asymptote crosses the level, padded
            let r = (level / coeff).powf(1.0 / exponent);
            let mut r = 2.0 * r.max(*edges.last().unwrap());
            while (g.f)(r) > level {
                r *= 2.0;
            }
            r
        }
        EndBehavior::Limit { .. } => {
            // tail limit <= level (checked by the caller): find a radius
            // beyond the last breakpoint where the value has settled below
            let mut r = 2.0 * edges.last().unwrap().max(1.0);
            let mut guard = 0;
            while (g.f)(r) > level && guard < 200 {
                r *= 2.0;
                guard += 1;
            }
            r
        }
    };
    edges.push(outer);
    edges.dedup();
    let mut total = 0.0;
    for w in edges.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let pad = 1e-9 * (b - a);
        let va = (g.f)(a + pad);
        let vb = (g.f)(b - pad);
        let above_a = va > level;
        let above_b = vb > level;
        if above_a && above_b {
            total += ctx.ball_measure(b) - ctx.ball_measure(a);
        } else if above_a != above_b {
            let mut lo = a + pad;
            let mut hi = b - pad;
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if ((g.f)(mid) > level) == above_a {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo <= 1e-13 * (b - a) {
                    break;
                }
            }
            let x = 0.5 * (lo + hi);
            if above_a {
                total += ctx.ball_measure(x) - ctx.ball_measure(a);
            } else {
                total += ctx.ball_measure(b) - ctx.ball_measure(x);
            }
        }
    }
    Ok(total)
}

// ---------------------------------------------------------------------------
// Rearrangements
// ---------------------------------------------------------------------------

/// u*(t) = sup{ s : μ_u(s) > t }. Decreasing profiles take the exact fast
/// path `u*(t) = u((t/ω_n)^{1/n})`; anything else is a lazy level search.
pub fn decreasing_rearrangement(
    u: &RadialFunction,
    ctx: &DimensionContext,
) -> Result<OneDimFunction> {
    if let EndBehavior::Limit { value } = u.tail_behavior() {
        if value > 0.0 {
            return Err(Error::Divergent(format!(
                "rearrangement undefined: superlevel sets below {value} have infinite measure"
            )));
        }
    }
    match u {
        RadialFunction::Profile(p) if p.is_decreasing() => {
            let n = ctx.n as f64;
            let om = ctx.omega_n;
            let segments = p
                .segments()
                .iter()
                .map(|s| {
                    if s.is_constant() {
                        PowerAffineSegment::constant(
                            s.constant_value(),
                            ctx.ball_measure(s.lo),
                            ctx.ball_measure(s.hi),
                        )
                    } else {
                        PowerAffineSegment {
                            c: s.c * om.powf(-s.alpha / n),
                            alpha: s.alpha / n,
                            d: s.d,
                            lo: ctx.ball_measure(s.lo),
                            hi: ctx.ball_measure(s.hi),
                        }
                    }
                })
                .collect();
            OneDimFunction::from_segments(segments)
        }
        RadialFunction::General(g) if g.decreasing => {
            let n = ctx.n as f64;
            let om = ctx.omega_n;
            let inner = g.clone();
            let ctx2 = *ctx;
            let f = Arc::new(move |t: f64| (inner.f)(ctx2.radius_of_measure(t)));
            Ok(OneDimFunction::general(GeneralOneDim {
                f,
                breakpoints: g.breakpoints.iter().map(|&r| ctx.ball_measure(r)).collect(),
                head: map_behavior_to_measure(g.head, n, om),
                tail: map_behavior_to_measure(g.tail, n, om),
                level_form: None,
            }))
        }
        _ => lazy_rearrangement(u, ctx),
    }
}

fn map_behavior_to_measure(b: EndBehavior, n: f64, om: f64) -> EndBehavior {
    match b {
        EndBehavior::Power { coeff, exponent } => EndBehavior::Power {
            coeff: coeff * om.powf(-exponent / n),
            exponent: exponent / n,
        },
        EndBehavior::Limit { value } => EndBehavior::Limit { value },
        EndBehavior::ZeroBeyond { radius } => {
            EndBehavior::ZeroBeyond { radius: om * radius.powf(n) }
        }
    }
}

fn lazy_rearrangement(u: &RadialFunction, ctx: &DimensionContext) -> Result<OneDimFunction> {
    let n = ctx.n as f64;
    let om = ctx.omega_n;
    let (sup_value, critical_levels) = match u {
        RadialFunction::Profile(p) => {
            let mut levels: Vec<f64> = p
                .segments()
                .iter()
                .flat_map(|s| [s.value_limit_lo(), s.value_limit_hi()])
                .filter(|v| v.is_finite() && *v > 0.0)
                .collect();
            levels.sort_by(|a, b| a.partial_cmp(b).unwrap());
            levels.dedup();
            (p.sup_value(), levels)
        }
        RadialFunction::General(g) => {
            let mut levels: Vec<f64> = g
                .breakpoints
                .iter()
                .map(|&r| (g.f)(r))
                .filter(|v| v.is_finite() && *v > 0.0)
                .collect();
            levels.sort_by(|a, b| a.partial_cmp(b).unwrap());
            levels.dedup();
            let sup = match g.head {
                EndBehavior::Power { coeff, exponent } if coeff > 0.0 && exponent < 0.0 => {
                    f64::INFINITY
                }
                _ => levels.last().copied().unwrap_or(0.0).max(match g.head {
                    EndBehavior::Limit { value } => value,
                    _ => 0.0,
                }),
            };
            (sup, levels)
        }
    };

    let u_mu = u.clone();
    let ctx_mu = *ctx;
    let mu: Arc<dyn Fn(f64) -> f64 + Send + Sync> = Arc::new(move |s: f64| {
        distribution_function(&u_mu, &ctx_mu, s).unwrap_or(f64::INFINITY)
    });

    let total_measure = match u.support_end() {
        Some(r) => Some(mu(0.0).min(ctx.ball_measure(r))),
        None => None,
    };

    let mu_eval = mu.clone();
    let sup_for_eval = sup_value;
    let f = Arc::new(move |t: f64| -> f64 {
        if let Some(total) = total_measure {
            if t >= total {
                return 0.0;
            }
        }
        // bracket [s_lo, s_hi] with mu(s_lo) > t >= mu(s_hi)
        let mut s_hi = if sup_for_eval.is_finite() {
            sup_for_eval
        } else {
            let mut s = 1.0;
            let mut guard = 0;
            while mu_eval(s) > t && guard < 2100 {
                s *= 2.0;
                guard += 1;
            }
            s
        };
        let mut s_lo = 0.0;
        if mu_eval(s_hi) > t {
            return s_hi; // sup itself still has superlevel measure > t
        }
        for _ in 0..LEVEL_SEARCH_ITERS {
            let mid = 0.5 * (s_lo + s_hi);
            if mu_eval(mid) > t {
                s_lo = mid;
            } else {
                s_hi = mid;
            }
            if s_hi - s_lo <= 1e-16 * s_hi.max(1.0) {
                break;
            }
        }
        s_lo
    });

    let breakpoints = {
        let mut ts: Vec<f64> = critical_levels
            .iter()
            .map(|&s| mu(s))
            .filter(|t| t.is_finite() && *t > 0.0)
            .collect();
        ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ts.dedup();
        ts
    };

    let head = if sup_value.is_finite() {
        EndBehavior::Limit { value: sup_value }
    } else {
        map_behavior_to_measure(u.head_behavior(), n, om)
    };
    let tail = match u.tail_behavior() {
        EndBehavior::ZeroBeyond { radius } => {
            EndBehavior::ZeroBeyond { radius: ctx.ball_measure(radius) }
        }
        other => map_behavior_to_measure(other, n, om),
    };

    Ok(OneDimFunction::general(GeneralOneDim {
        f,
        breakpoints,
        head,
        tail,
        level_form: Some(Arc::new(LevelForm { mu, critical_levels, sup_value })),
    }))
}

/// u^♯(x) = u*(ω_n |x|^n), as a radial function.
pub fn symmetric_rearrangement(
    u: &RadialFunction,
    ctx: &DimensionContext,
) -> Result<RadialFunction> {
    let star = decreasing_rearrangement(u, ctx)?;
    let n = ctx.n as f64;
    let om = ctx.omega_n;
    match &star.repr {
        OneDimRepr::Piecewise(segs) => {
            let mut out: Vec<PowerAffineSegment> = segs
                .iter()
                .map(|s| {
                    if s.is_constant() {
                        PowerAffineSegment::constant(
                            s.constant_value(),
                            ctx.radius_of_measure(s.lo),
                            ctx.radius_of_measure(s.hi),
                        )
                    } else {
                        PowerAffineSegment {
                            c: s.c * om.powf(s.alpha),
                            alpha: s.alpha * n,
                            d: s.d,
                            lo: ctx.radius_of_measure(s.lo),
                            hi: ctx.radius_of_measure(s.hi),
                        }
                    }
                })
                .collect();
            let end = out.last().unwrap().hi;
            if end.is_finite() {
                out.push(PowerAffineSegment::constant(0.0, end, f64::INFINITY));
            }
            Ok(RadialFunction::Profile(RadialProfile::new(out)?))
        }
        OneDimRepr::General(_) => {
            let star2 = star.clone();
            let ctx2 = *ctx;
            let f = Arc::new(move |r: f64| star2.eval_unchecked(ctx2.ball_measure(r)));
            let breakpoints = star
                .breakpoints()
                .iter()
                .map(|&t| ctx.radius_of_measure(t))
                .collect();
            let head = match star.head_behavior() {
                EndBehavior::Power { coeff, exponent } => EndBehavior::Power {
                    coeff: coeff * om.powf(exponent),
                    exponent: exponent * n,
                },
                other => other,
            };
            let tail = match star.tail_behavior() {
                EndBehavior::ZeroBeyond { radius } => {
                    EndBehavior::ZeroBeyond { radius: ctx.radius_of_measure(radius) }
                }
                EndBehavior::Power { coeff, exponent } => EndBehavior::Power {
                    coeff: coeff * om.powf(exponent),
                    exponent: exponent * n,
                },
                other => other,
            };
            Ok(RadialFunction::General(GeneralRadial::new(f, breakpoints, head, tail, true)))
        }
    }
}

// ---------------------------------------------------------------------------
// Sampled data
// ---------------------------------------------------------------------------

/// Finite list of nonnegative cell values with a uniform cell measure.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    values: Vec<f64>,
    cell_measure: f64,
}

impl SampledFunction {
    pub fn new(values: Vec<f64>, cell_measure: f64) -> Result<Self> {
        if !(cell_measure > 0.0) || !cell_measure.is_finite() {
            return Err(Error::Domain(format!(
                "cell_measure must be a positive finite real, got {cell_measure}"
            )));
        }
        for (i, v) in values.iter().enumerate() {
            if !v.is_finite() || *v < 0.0 {
                return Err(Error::Domain(format!(
                    "value {i} must be a finite nonnegative real, got {v}"
                )));
            }
        }
        Ok(Self { values, cell_measure })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn cell_measure(&self) -> f64 {
        self.cell_measure
    }

    pub fn total_measure(&self) -> f64 {
        self.values.len() as f64 * self.cell_measure
    }

    /// One-column CSV with a `value` header and a cell-measure metadata line.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# cell_measure={}\n", crate::cli::fmt17(self.cell_measure)));
        out.push_str("value\n");
        for v in &self.values {
            out.push_str(&crate::cli::fmt17(*v));
            out.push('\n');
        }
        out
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, meta) = lines
            .next()
            .ok_or_else(|| Error::Parse { line: 1, reason: "empty input".into() })?;
        let meta = meta.trim();
        let rest = meta
            .strip_prefix('#')
            .ok_or_else(|| Error::Parse {
                line: 1,
                reason: "expected `# cell_measure=<value>` metadata line".into(),
            })?
            .trim();
        let value_text = rest
            .strip_prefix("cell_measure")
            .and_then(|r| r.trim_start().strip_prefix('='))
            .ok_or_else(|| Error::Parse {
                line: 1,
                reason: "expected `# cell_measure=<value>` metadata line".into(),
            })?
            .trim();
        let cell_measure: f64 = value_text.parse().map_err(|_| Error::Parse {
            line: 1,
            reason: format!("cannot parse cell_measure {value_text:?}"),
        })?;
        match lines.next() {
            Some((_, h)) if h.trim() == "value" => {}
            Some((i, h)) => {
                return Err(Error::Parse {
                    line: i + 1,
                    reason: format!("expected header `value`, got {:?}", h.trim()),
                })
            }
            None => return Err(Error::Parse { line: 2, reason: "missing `value` header".into() }),
        }
        let mut values = Vec::new();
        for (i, line) in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let v: f64 = line.parse().map_err(|_| Error::Parse {
                line: i + 1,
                reason: format!("cannot parse value {line:?}"),
            })?;
            values.push(v);
        }
        SampledFunction::new(values, cell_measure)
            .map_err(|e| Error::Parse { line: 1, reason: e.to_string() })
    }
}

/// Values sorted in non-increasing order; same cell measure.
pub fn rearrange_sampled(f: &SampledFunction) -> SampledFunction {
    let mut values = f.values.clone();
    values.sort_by(|a, b| b.partial_cmp(a).unwrap());
    SampledFunction { values, cell_measure: f.cell_measure }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::{PowerAffineSegment as Seg, RadialProfile};

    fn ctx3() -> DimensionContext {
        DimensionContext::new(3).unwrap()
    }

    fn ball_indicator() -> RadialFunction {
        RadialProfile::new(vec![
            Seg::constant(1.0, 0.0, 1.0),
            Seg::constant(0.0, 1.0, f64::INFINITY),
        ])
        .unwrap()
        .into()
    }

    fn psi() -> RadialFunction {
        RadialProfile::new(vec![Seg::new(1.0, -0.5, 0.0, 0.0, f64::INFINITY)])
            .unwrap()
            .into()
    }

    #[test]
    fn omega_values() {
        assert!((unit_ball_volume(2) - std::f64::consts::PI).abs() < 1e-15);
        assert!((unit_ball_volume(3) - 4.188790204786391).abs() < 1e-14);
        assert!((unit_ball_volume(4) - 4.934802200544679).abs() < 1e-14);
        // surface area of the unit sphere is n * omega_n
        let ctx = ctx3();
        assert!((ctx.sphere_area() - 3.0 * ctx.omega_n).abs() == 0.0);
    }

    #[test]
    fn gamma_half_recursion() {
        let sp = std::f64::consts::PI.sqrt();
        assert_eq!(gamma_half(2), 1.0);
        assert_eq!(gamma_half(4), 1.0);
        assert_eq!(gamma_half(6), 2.0);
        assert!((gamma_half(3) - 0.5 * sp).abs() < 1e-16);
        assert!((gamma_half(5) - 0.75 * sp).abs() < 1e-15);
    }

    #[test]
    fn distribution_ball_indicator() {
        let m = distribution_function(&ball_indicator(), &ctx3(), 0.5).unwrap();
        assert!((m - 4.188790204786391).abs() < 1e-13);
    }

    #[test]
    fn distribution_psi_is_omega_t_minus_6() {
        // r^{-1/2} > t  <=>  r < t^{-2}, so mu(t) = omega * t^{-6}
        let om = ctx3().omega_n;
        for level in [0.5, 1.0, 2.0] {
            let m = distribution_function(&psi(), &ctx3(), level).unwrap();
            assert!((m - om * level.powi(-6)).abs() <= 1e-12 * m, "level {level}");
        }
    }

    #[test]
    fn distribution_above_max_is_zero() {
        let m = distribution_function(&ball_indicator(), &ctx3(), 2.0).unwrap();
        assert_eq!(m, 0.0);
    }

    #[test]
    fn distribution_divergences() {
        assert!(matches!(
            distribution_function(&psi(), &ctx3(), 0.0),
            Err(Error::Divergent(_))
        ));
        let plateau: RadialFunction = RadialProfile::new(vec![Seg::constant(
            1.0,
            0.0,
            f64::INFINITY,
        )])
        .unwrap()
        .into();
        assert!(matches!(
            distribution_function(&plateau, &ctx3(), 0.5),
            Err(Error::Divergent(_))
        ));
        assert!(distribution_function(&ball_indicator(), &ctx3(), -1.0).is_err());
    }

    #[test]
    fn rearrangement_of_indicator() {
        let star = decreasing_rearrangement(&ball_indicator(), &ctx3()).unwrap();
        let om = ctx3().omega_n;
        assert_eq!(star.eval(0.5 * om).unwrap(), 1.0);
        assert_eq!(star.eval(om * 1.5).unwrap(), 0.0);
    }

    #[test]
    fn rearrangement_of_power_law() {
        // u = r^{-beta}: u*(t) = (t/omega)^{-beta/n}
        let beta = 0.5;
        let star = decreasing_rearrangement(&psi(), &ctx3()).unwrap();
        let om = ctx3().omega_n;
        for t in [0.1, 1.0, 7.3] {
            let expect = (t / om).powf(-beta / 3.0);
            assert!((star.eval(t).unwrap() - expect).abs() <= 1e-14 * expect);
        }
        // psi: u*(t) = omega^{1/6} t^{-1/6}
        let got = star.eval(1.0).unwrap();
        assert!((got - om.powf(1.0 / 6.0)).abs() < 1e-14);
    }

    #[test]
    fn lazy_rearrangement_matches_fast_path_on_decreasing_profile() {
        // run the level-search path on a decreasing profile by routing it
        // through the generic branch, and compare against the exact path
        let profile = RadialProfile::new(vec![
            Seg::new(1.0, -0.25, 0.0, 0.0, 1.0),
            Seg::new(-0.5, 1.0, 1.5, 1.0, 3.0),
            Seg::constant(0.0, 3.0, f64::INFINITY),
        ])
        .unwrap();
        let u: RadialFunction = profile.clone().into();
        let exact = decreasing_rearrangement(&u, &ctx3()).unwrap();
        let lazy = lazy_rearrangement(&u, &ctx3()).unwrap();
        for t in [0.01, 0.5, 2.0, 10.0, 50.0, 100.0] {
            let a = exact.eval(t).unwrap();
            let b = lazy.eval(t).unwrap();
            assert!((a - b).abs() <= 1e-9 * (1.0 + a), "t={t} exact={a} lazy={b}");
        }
    }

    #[test]
    fn symmetric_rearrangement_fixed_point() {
        let v: RadialFunction = RadialProfile::new(vec![
            Seg::new(1.0, -0.4, 0.0, 0.0, 1.0),
            Seg::new(-0.4, 1.0, 1.4, 1.0, 3.5),
            Seg::constant(0.0, 3.5, f64::INFINITY),
        ])
        .unwrap()
        .into();
        let sharp = symmetric_rearrangement(&v, &ctx3()).unwrap();
        for i in 1..=64 {
            let r = 0.07 * i as f64;
            let a = v.eval(r).unwrap();
            let b = sharp.eval(r).unwrap();
            assert!((a - b).abs() <= 1e-11 * (1.0 + a), "r={r} {a} vs {b}");
        }
    }

    #[test]
    fn symmetric_rearrangement_of_annulus_bump() {
        // increasing bump on an annulus -> decreasing profile with the
        // same distribution function at 20 levels
        let bump: RadialFunction = RadialProfile::new(vec![
            Seg::constant(0.0, 0.0, 1.0),
            Seg::new(1.0, 1.0, -1.0, 1.0, 2.0), // r - 1 on [1,2)
            Seg::constant(0.0, 2.0, f64::INFINITY),
        ])
        .unwrap()
        .into();
        let ctx = ctx3();
        let sharp = symmetric_rearrangement(&bump, &ctx).unwrap();
        assert!(sharp.is_decreasing());
        for i in 1..=20 {
            let level = 0.999 * i as f64 / 21.0;
            let a = distribution_function(&bump, &ctx, level).unwrap();
            let b = distribution_function(&sharp, &ctx, level).unwrap();
            assert!((a - b).abs() <= 1e-6 * (1.0 + a), "level {level}: {a} vs {b}");
        }
    }

    #[test]
    fn symmetric_rearrangement_of_zero() {
        let zero: RadialFunction =
            RadialProfile::new(vec![Seg::constant(0.0, 0.0, f64::INFINITY)])
                .unwrap()
                .into();
        let sharp = symmetric_rearrangement(&zero, &ctx3()).unwrap();
        for r in [0.1, 1.0, 10.0] {
            assert_eq!(sharp.eval(r).unwrap(), 0.0);
        }
    }

    #[test]
    fn sampled_sort_and_idempotence() {
        let f = SampledFunction::new(vec![0.0, 3.0, 1.0, 2.0], 1.0).unwrap();
        let sorted = rearrange_sampled(&f);
        assert_eq!(sorted.values(), &[3.0, 2.0, 1.0, 0.0]);
        assert_eq!(rearrange_sampled(&sorted), sorted);
        let sum: f64 = f.values().iter().sum();
        let sum2: f64 = sorted.values().iter().sum();
        assert_eq!(sum, sum2);
    }

    #[test]
    fn sampled_csv_round_trip() {
        let f = SampledFunction::new(vec![1.5, 0.0, 2.25], 0.125).unwrap();
        let text = f.to_csv_string();
        let back = SampledFunction::from_csv_str(&text).unwrap();
        assert_eq!(f, back);
        assert!(SampledFunction::from_csv_str("value\n1.0\n").is_err());
        assert!(SampledFunction::from_csv_str("# cell_measure=1.0\nwrong\n1.0\n").is_err());
        assert!(SampledFunction::from_csv_str("# cell_measure=1.0\nvalue\nx\n").is_err());
    }
}
