//! Lorentz quasi-norms ‖·‖_{p,q}, the weak (Marcinkiewicz) norm ‖·‖_{p,∞},
//! the maximal function f**, the equivalent norm |||·|||_{p,q}, and the
//! Hardy–Littlewood–Pólya relation ≺.
//!
//! Quadrature contract: integrals are assembled per breakpoint panel;
//! pure-power panels use closed-form antiderivatives, panels touching a
//! singular endpoint run on a geometric ladder (uniform in `log t`) with
//! the remainder certified from the endpoint exponent, and everything else
//! is adaptive Gauss–Kronrod. Divergence is decided by exponent analysis
//! *before* any quadrature runs — never discovered by overflow.

use crate::profile::{EndBehavior, PowerAffineSegment, RadialFunction};
use crate::quad::{self, QuadConfig, QuadResult, EXP_SNAP};
use crate::rearrange::{DimensionContext, OneDimFunction, OneDimRepr};
use crate::{Error, Result};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use std::str::FromStr;
use std::sync::Arc;

/// Second Lorentz index: a finite real ≥ 1 or ∞.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QIndex {
    Finite(f64),
    Infinity,
}

impl QIndex {
    pub fn is_infinite(&self) -> bool {
        matches!(self, QIndex::Infinity)
    }

    pub fn finite(&self) -> Option<f64> {
        match self {
            QIndex::Finite(q) => Some(*q),
            QIndex::Infinity => None,
        }
    }
}

impl std::fmt::Display for QIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            QIndex::Finite(q) => write!(f, "{q}"),
            QIndex::Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for QIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "inf" {
            return Ok(QIndex::Infinity);
        }
        let q: f64 = s
            .parse()
            .map_err(|_| Error::Domain(format!("cannot parse q index {s:?}")))?;
        Ok(QIndex::Finite(q))
    }
}

impl Serialize for QIndex {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            QIndex::Finite(q) => ser.serialize_f64(*q),
            QIndex::Infinity => ser.serialize_str("inf"),
        }
    }
}

/// The (n, p, q) triple with the derived Sobolev conjugate p* = np/(n-p)
/// and unit-ball volume ω_n.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzParams {
    pub n: u32,
    pub p: f64,
    pub q: QIndex,
}

impl LorentzParams {
    pub fn new(n: u32, p: f64, q: QIndex) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!("need n >= 2, got {n}")));
        }
        if !p.is_finite() || p < 1.0 || p >= n as f64 {
            return Err(Error::Domain(format!("need 1 <= p < n = {n}, got p = {p}")));
        }
        if let QIndex::Finite(q) = q {
            if !q.is_finite() || q < 1.0 {
                return Err(Error::Domain(format!("need q >= 1 or q = inf, got {q}")));
            }
        }
        Ok(Self { n, p, q })
    }

    pub fn p_star(&self) -> f64 {
        self.n as f64 * self.p / (self.n as f64 - self.p)
    }

    pub fn omega_n(&self) -> f64 {
        crate::rearrange::unit_ball_volume(self.n)
    }

    pub fn ctx(&self) -> DimensionContext {
        DimensionContext { n: self.n, omega_n: self.omega_n() }
    }
}

impl Serialize for LorentzParams {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = ser.serialize_struct("LorentzParams", 3)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("p", &self.p)?;
        st.serialize_field("q", &self.q)?;
        st.end()
    }
}

// ---------------------------------------------------------------------------
// Quasi-norm integral
// ---------------------------------------------------------------------------

struct HeadAnalysis {
    /// Local exponent k of the integrand `~ C t^(k-1)` at the endpoint.
    k: f64,
    vanishes: bool,
}

fn head_of(f: &OneDimFunction, p: f64, q: f64) -> HeadAnalysis {
    match f.head_behavior() {
        EndBehavior::Power { coeff, exponent } if coeff != 0.0 => HeadAnalysis {
            k: q * (exponent.min(0.0) + 1.0 / p),
            vanishes: false,
        },
        EndBehavior::Limit { value } => {
            HeadAnalysis { k: q / p, vanishes: value == 0.0 }
        }
        _ => HeadAnalysis { k: q / p, vanishes: true },
    }
}

/// ∫ [f(t) t^(1/p)]^q dt/t over (0, upper∧∞), with per-panel closed forms
/// and certified endpoint handling. Returns the raw q-th power integral.
pub(crate) fn lorentz_integral(
    f: &OneDimFunction,
    p: f64,
    q: f64,
    upper: Option<f64>,
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::Domain(format!("first index must be positive and finite, got {p}")));
    }
    if !(q >= 1.0) || !q.is_finite() {
        return Err(Error::Domain(format!("second index must satisfy 1 <= q < inf, got {q}")));
    }
    let head = head_of(f, p, q);
    if !head.vanishes && head.k <= EXP_SNAP {
        return Ok(QuadResult::diverged());
    }
    // end of integration and tail analysis
    let mut to_infinity = false;
    let mut end = match upper {
        Some(m) => m,
        None => match f.tail_behavior() {
            EndBehavior::ZeroBeyond { radius } => radius,
            EndBehavior::Power { coeff, exponent } => {
                if coeff != 0.0 && q * (exponent + 1.0 / p) >= -EXP_SNAP {
                    return Ok(QuadResult::diverged());
                }
                to_infinity = true;
                f64::INFINITY
            }
            EndBehavior::Limit { value } => {
                if value > 0.0 {
                    return Ok(QuadResult::diverged());
                }
                return Err(Error::Domain(
                    "cannot integrate a tail with unknown decay rate".into(),
                ));
            }
        },
    };
    if let (Some(m), Some(t)) = (upper, f.support_end()) {
        end = m.min(t);
    }
    if !(end > 0.0) {
        return Ok(QuadResult::exact(0.0));
    }

    let mut total = 0.0;
    let mut err = 0.0;
    match &f.repr {
        OneDimRepr::Piecewise(segs) => {
            for seg in segs {
                let a = seg.lo;
                let b = seg.hi.min(end);
                if !(b > a) {
                    continue;
                }
                let r = piecewise_panel(seg, a, b, p, q, head.k, cfg);
                if r.diverged {
                    return Ok(QuadResult::diverged());
                }
                total += r.value;
                err += r.abs_error_estimate;
            }
        }
        OneDimRepr::General(_) => {
            let g = |t: f64| {
                let v = f.eval_unchecked(t);
                if v <= 0.0 {
                    0.0
                } else {
                    v.powf(q) * t.powf(q / p - 1.0)
                }
            };
            let mut edges: Vec<f64> = f
                .breakpoints()
                .into_iter()
                .filter(|&t| t > 0.0 && t < end)
                .collect();
            edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
            edges.dedup();
            let first = edges.first().copied().unwrap_or(if end.is_finite() {
                end
            } else {
                1.0
            });
            // head panel (0, first]
            let (v, e) = quad::down_to_zero(&g, first, head.k, cfg);
            total += v;
            err += e;
            // interior panels
            for w in edges.windows(2) {
                let (v, e) = quad::adaptive(&g, w[0], w[1], cfg);
                total += v;
                err += e;
            }
            let last = edges.last().copied().unwrap_or(first);
            if to_infinity {
                let k_inf = match f.tail_behavior() {
                    EndBehavior::Power { exponent, .. } => q * (exponent + 1.0 / p),
                    _ => unreachable!("to_infinity implies a power tail"),
                };
                let (v, e) = quad::out_to_inf(&g, last, k_inf, cfg);
                total += v;
                err += e;
            } else if end > last {
                let (v, e) = quad::adaptive(&g, last, end, cfg);
                total += v;
                err += e;
            }
        }
    }
    Ok(QuadResult { value: total, abs_error_estimate: err, diverged: false })
}

fn piecewise_panel(
    seg: &PowerAffineSegment,
    a: f64,
    b: f64,
    p: f64,
    q: f64,
    head_k: f64,
    cfg: &QuadConfig,
) -> QuadResult {
    if seg.is_constant() {
        let v = seg.constant_value();
        if v == 0.0 {
            return QuadResult::exact(0.0);
        }
        return quad::power_integral(v.powf(q), q / p, a, b);
    }
    if seg.is_pure_power() {
        return quad::power_integral(seg.c.powf(q), q * (seg.alpha + 1.0 / p), a, b);
    }
    // mixed power-affine panel; validated finite unless constant
    let g = |t: f64| {
        let v = seg.value(t);
        if v <= 0.0 {
            0.0
        } else {
            v.powf(q) * t.powf(q / p - 1.0)
        }
    };
    if a == 0.0 {
        let k = if seg.alpha < 0.0 {
            q * (seg.alpha + 1.0 / p)
        } else {
            q / p
        };
        debug_assert!(k > EXP_SNAP, "divergence must be pre-checked (k = {k}, head {head_k})");
        let (v, e) = quad::down_to_zero(&g, b, k, cfg);
        QuadResult { value: v, abs_error_estimate: e, diverged: false }
    } else {
        let (v, e) = quad::adaptive(&g, a, b, cfg);
        QuadResult { value: v, abs_error_estimate: e, diverged: false }
    }
}

fn root_with_error(raw: QuadResult, q: f64) -> QuadResult {
    if raw.diverged {
        return raw;
    }
    if raw.value <= 0.0 {
        return QuadResult { value: 0.0, abs_error_estimate: raw.abs_error_estimate, diverged: false };
    }
    let value = raw.value.powf(1.0 / q);
    QuadResult {
        value,
        abs_error_estimate: raw.abs_error_estimate * value / (q * raw.value),
        diverged: false,
    }
}

/// ( ∫₀^∞ [u*(t) t^(1/p)]^q dt/t )^(1/q) for finite q; the first index is
/// passed explicitly so callers can norm with p or with p*. q = ∞ is
/// rejected — that endpoint is [`weak_norm`]'s.
pub fn lorentz_quasinorm(ustar: &OneDimFunction, first_index: f64, q: QIndex) -> Result<QuadResult> {
    lorentz_quasinorm_cfg(ustar, first_index, q, &QuadConfig::default())
}

pub fn lorentz_quasinorm_cfg(
    ustar: &OneDimFunction,
    first_index: f64,
    q: QIndex,
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    let q = q
        .finite()
        .ok_or_else(|| Error::Domain("q = inf is routed to weak_norm, not the quasi-norm".into()))?;
    Ok(root_with_error(lorentz_integral(ustar, first_index, q, None, cfg)?, q))
}

// ---------------------------------------------------------------------------
// Weak norm
// ---------------------------------------------------------------------------

fn golden_max(h: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    const INV_PHI: f64 = 0.6180339887498949;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = h(x1);
    let mut f2 = h(x2);
    for _ in 0..200 {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = h(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = h(x1);
        }
        if (b - a).abs() <= 1e-12 * (a.abs() + b.abs()).max(1e-300) {
            break;
        }
    }
    f1.max(f2)
}

/// Best value of `h` over [a, b]: endpoints, a dense scan, and a
/// golden-section refinement around the best bracket.
fn scan_max(h: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    const N: usize = 32;
    let mut best = h(a).max(h(b));
    let mut best_x = a;
    for i in 0..=N {
        let x = a + (b - a) * i as f64 / N as f64;
        let v = h(x);
        if v > best {
            best = v;
            best_x = x;
        }
    }
    let lo = (best_x - (b - a) / N as f64).max(a);
    let hi = (best_x + (b - a) / N as f64).min(b);
    best.max(golden_max(h, lo, hi))
}

/// sup_{t>0} t^(1/p) u*(t). Pure power-affine panels locate the supremum
/// analytically; general panels use golden-section search; the limits at 0
/// and ∞ come from the endpoint exponents, so the supremum over an
/// unbounded domain is certified rather than grid-searched.
pub fn weak_norm(ustar: &OneDimFunction, first_index: f64) -> Result<f64> {
    let p = first_index;
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::Domain(format!("first index must be positive and finite, got {p}")));
    }
    let mut best: f64 = 0.0;
    // endpoint limits
    match ustar.head_behavior() {
        EndBehavior::Power { coeff, exponent } if coeff > 0.0 => {
            let e0 = exponent + 1.0 / p;
            if e0 < -EXP_SNAP {
                return Err(Error::Divergent(
                    "t^{1/p} u*(t) is unbounded as t -> 0".into(),
                ));
            }
            if e0.abs() <= EXP_SNAP {
                best = best.max(coeff);
            }
        }
        _ => {}
    }
    match ustar.tail_behavior() {
        EndBehavior::Power { coeff, exponent } if coeff > 0.0 => {
            let e = exponent + 1.0 / p;
            if e > EXP_SNAP {
                return Err(Error::Divergent(
                    "t^{1/p} u*(t) is unbounded as t -> inf".into(),
                ));
            }
            if e.abs() <= EXP_SNAP {
                best = best.max(coeff);
            }
        }
        EndBehavior::Limit { value } if value > 0.0 => {
            return Err(Error::Divergent("t^{1/p} u*(t) is unbounded as t -> inf".into()));
        }
        _ => {}
    }

    match &ustar.repr {
        OneDimRepr::Piecewise(segs) => {
            for seg in segs {
                best = best.max(segment_weak_sup(seg, p));
            }
        }
        OneDimRepr::General(g) => {
            if let Some(level) = ustar.level_form() {
                // sup_t t^{1/p} u*(t) = sup_s s·mu(s)^{1/p}
                let mu = level.mu.clone();
                let h = move |s: f64| {
                    let m = mu(s);
                    if m.is_finite() && m > 0.0 {
                        s * m.powf(1.0 / p)
                    } else {
                        0.0
                    }
                };
                let mut levels = level.critical_levels.clone();
                if level.sup_value.is_finite() && level.sup_value > 0.0 {
                    levels.push(level.sup_value);
                }
                levels.sort_by(|a, b| a.partial_cmp(b).unwrap());
                levels.dedup();
                if let Some(&first) = levels.first() {
                    let mut s = first;
                    for _ in 0..60 {
                        s *= 0.5;
                        best = best.max(h(s));
                    }
                }
                for w in levels.windows(2) {
                    best = best.max(scan_max(&h, w[0], w[1]));
                }
                if !level.sup_value.is_finite() {
                    if let Some(&last) = levels.last() {
                        let mut s = last;
                        for _ in 0..60 {
                            s *= 2.0;
                            best = best.max(h(s));
                        }
                    }
                }
            } else {
                let f = g.f.clone();
                let h = move |t: f64| {
                    let v = f(t);
                    if v > 0.0 {
                        v * t.powf(1.0 / p)
                    } else {
                        0.0
                    }
                };
                let mut edges: Vec<f64> =
                    g.breakpoints.iter().copied().filter(|&t| t > 0.0).collect();
                edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
                edges.dedup();
                if let Some(t) = ustar.support_end() {
                    edges.push(t);
                }
                if edges.is_empty() {
                    edges.push(1.0);
                }
                let mut t = edges[0];
                for _ in 0..60 {
                    t *= 0.5;
                    best = best.max(h(t));
                }
                for w in edges.windows(2) {
                    best = best.max(scan_max(&h, w[0], w[1]));
                }
                if ustar.support_end().is_none() {
                    let mut t = *edges.last().unwrap();
                    for _ in 0..60 {
                        t *= 2.0;
                        best = best.max(h(t));
                    }
                }
            }
        }
    }
    Ok(best)
}

/// Analytic supremum of t^(1/p)·(c t^β + d) over one panel.
fn segment_weak_sup(seg: &PowerAffineSegment, p: f64) -> f64 {
    let h = |t: f64| {
        let v = seg.value(t);
        if v > 0.0 {
            v * t.powf(1.0 / p)
        } else {
            0.0
        }
    };
    let mut best: f64 = 0.0;
    // left endpoint (t -> lo⁺)
    if seg.lo > 0.0 {
        best = best.max(h(seg.lo));
    } else if seg.is_constant() || seg.alpha > 0.0 || seg.c == 0.0 {
        // bounded at 0: product vanishes
    } else {
        let e0 = seg.alpha + 1.0 / p;
        if e0.abs() <= EXP_SNAP {
            best = best.max(seg.c);
        }
        // e0 < 0 is a divergence and is caught by the head analysis
    }
    // right endpoint (t -> hi⁻), in-segment limit
    if seg.hi.is_finite() {
        best = best.max(h(seg.hi));
    } else if seg.is_constant() {
        // constant tail: caught by tail analysis unless zero
    } else {
        let e = seg.alpha + 1.0 / p;
        if e.abs() <= EXP_SNAP {
            best = best.max(seg.c);
        }
    }
    // interior critical point of c t^{β+1/p} + d t^{1/p}
    if seg.c != 0.0 && seg.d != 0.0 && seg.alpha != 0.0 {
        let rhs = -seg.d / (p * seg.c * (seg.alpha + 1.0 / p));
        if rhs > 0.0 {
            let t_star = rhs.powf(1.0 / seg.alpha);
            if t_star > seg.lo && t_star < seg.hi && t_star.is_finite() {
                best = best.max(h(t_star));
            }
        }
    }
    best
}

// ---------------------------------------------------------------------------
// Maximal function and prefix integrals
// ---------------------------------------------------------------------------

/// Running integral F(t) = ∫₀^t f(s) ds of a OneDimFunction, closed-form
/// per power-affine panel.
pub(crate) struct PrefixIntegral {
    eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub total: f64,
}

impl PrefixIntegral {
    pub fn value(&self, t: f64) -> f64 {
        (self.eval)(t)
    }
}

pub(crate) fn prefix_integral(f: &OneDimFunction, cfg: &QuadConfig) -> Result<PrefixIntegral> {
    if let EndBehavior::Power { coeff, exponent } = f.head_behavior() {
        if coeff > 0.0 && exponent <= -1.0 + EXP_SNAP {
            return Err(Error::Divergent(
                "non-integrable singularity at 0; the running integral is infinite".into(),
            ));
        }
    }
    match &f.repr {
        OneDimRepr::Piecewise(segs) => {
            let segs = segs.clone();
            let mut cum = Vec::with_capacity(segs.len());
            let mut acc = 0.0;
            for s in &segs {
                cum.push(acc);
                if s.hi.is_finite() {
                    acc += s.integral(s.lo, s.hi);
                } else {
                    acc = f64::INFINITY;
                }
            }
            let total = acc;
            let eval = Arc::new(move |t: f64| -> f64 {
                if t <= 0.0 {
                    return 0.0;
                }
                let idx = segs.partition_point(|s| s.hi <= t);
                if idx < segs.len() {
                    cum[idx] + segs[idx].integral(segs[idx].lo, t)
                } else {
                    total
                }
            });
            Ok(PrefixIntegral { eval, total })
        }
        OneDimRepr::General(_) => {
            let head_k = match f.head_behavior() {
                EndBehavior::Power { coeff, exponent } if coeff != 0.0 => exponent.min(0.0) + 1.0,
                _ => 1.0,
            };
            let f2 = f.clone();
            let cfg = *cfg;
            let breaks: Vec<f64> = f.breakpoints().into_iter().filter(|&t| t > 0.0).collect();
            let eval = Arc::new(move |t: f64| -> f64 {
                if t <= 0.0 {
                    return 0.0;
                }
                let g = |s: f64| f2.eval_unchecked(s);
                let mut edges: Vec<f64> = breaks.iter().copied().filter(|&b| b < t).collect();
                edges.push(t);
                let mut acc = 0.0;
                let (v, _) = quad::down_to_zero(&g, edges[0], head_k, &cfg);
                acc += v;
                for w in edges.windows(2) {
                    let (v, _) = quad::adaptive(&g, w[0], w[1], &cfg);
                    acc += v;
                }
                acc
            });
            let total = match f.support_end() {
                Some(t) => (eval)(t),
                None => f64::INFINITY,
            };
            Ok(PrefixIntegral { eval, total })
        }
    }
}

/// f**(t) = (1/t) ∫₀^t f*(s) ds; non-increasing and ≥ f* pointwise.
pub fn maximal_function(fstar: &OneDimFunction) -> Result<OneDimFunction> {
    maximal_function_cfg(fstar, &QuadConfig::default())
}

pub fn maximal_function_cfg(fstar: &OneDimFunction, cfg: &QuadConfig) -> Result<OneDimFunction> {
    let prefix = prefix_integral(fstar, cfg)?;
    let total = prefix.total;
    let head = match fstar.head_behavior() {
        EndBehavior::Power { coeff, exponent } if coeff != 0.0 => {
            // F(t) ~ c t^(β+1)/(β+1), so f** ~ c t^β/(β+1)
            EndBehavior::Power { coeff: coeff / (exponent + 1.0), exponent }
        }
        EndBehavior::Limit { value } => EndBehavior::Limit { value },
        other => other,
    };
    let tail = match fstar.tail_behavior() {
        EndBehavior::ZeroBeyond { .. } => EndBehavior::Power { coeff: total, exponent: -1.0 },
        EndBehavior::Power { coeff, exponent } => {
            if exponent > -1.0 {
                EndBehavior::Power { coeff: coeff / (exponent + 1.0), exponent }
            } else {
                // integrable (or log-slow) tail: the average decays like 1/t
                EndBehavior::Power {
                    coeff: if total.is_finite() { total } else { coeff },
                    exponent: -1.0,
                }
            }
        }
        EndBehavior::Limit { value } => EndBehavior::Limit { value },
    };
    let eval = Arc::new(move |t: f64| -> f64 {
        if t <= 0.0 {
            0.0
        } else {
            prefix.value(t) / t
        }
    });
    Ok(OneDimFunction::general(crate::rearrange::GeneralOneDim {
        f: eval,
        breakpoints: fstar.breakpoints(),
        head,
        tail,
        level_form: None,
    }))
}

/// ||| f |||_{p,q} over (0, domain_measure): the L^q norm of
/// t^(1/p - 1/q) f**(t), an equivalent Lorentz norm for p > 1.
pub fn equivalent_norm(
    fstar: &OneDimFunction,
    first_index: f64,
    q: QIndex,
    domain_measure: f64,
) -> Result<QuadResult> {
    equivalent_norm_cfg(fstar, first_index, q, domain_measure, &QuadConfig::default())
}

pub fn equivalent_norm_cfg(
    fstar: &OneDimFunction,
    first_index: f64,
    q: QIndex,
    domain_measure: f64,
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    if first_index <= 1.0 {
        return Err(Error::Domain(format!(
            "the maximal-function norm is equivalent only for p > 1, got p = {first_index}"
        )));
    }
    let q = q
        .finite()
        .ok_or_else(|| Error::Domain("equivalent_norm requires q < inf".into()))?;
    if !(domain_measure > 0.0) {
        return Err(Error::Domain("domain_measure must be positive".into()));
    }
    let fss = maximal_function_cfg(fstar, cfg)?;
    Ok(root_with_error(
        lorentz_integral(&fss, first_index, q, Some(domain_measure), cfg)?,
        q,
    ))
}

/// Hardy–Littlewood–Pólya relation f ≺ g on (0, domain_measure):
/// ∫₀^t f* ≤ ∫₀^t g* on a 512-point grid and equal full integrals.
pub fn hlp_majorization(
    fstar: &OneDimFunction,
    gstar: &OneDimFunction,
    domain_measure: f64,
) -> Result<bool> {
    let cfg = QuadConfig::default();
    let pf = prefix_integral(fstar, &cfg)?;
    let pg = prefix_integral(gstar, &cfg)?;
    let ftot = pf.value(domain_measure);
    let gtot = pg.value(domain_measure);
    let scale = ftot.abs().max(gtot.abs());
    if (ftot - gtot).abs() > 1e-10 * (1.0 + scale) {
        return Ok(false);
    }
    for i in 1..=512 {
        let t = domain_measure * i as f64 / 512.0;
        if pf.value(t) > pg.value(t) + 1e-10 * (1.0 + scale) {
            return Ok(false);
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// Radial power integrals (shared by the transform and inequality modules)
// ---------------------------------------------------------------------------

/// ∫₀^∞ u(r)^k r^m dr with the same panel/divergence contract as the
/// Lorentz integrals. The value is the raw integral (no root taken).
pub fn radial_power_integral(
    u: &RadialFunction,
    k: f64,
    m: f64,
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    // endpoint analysis: integrand ~ C r^(k·a + m) near singular ends
    let head_exp = match u.head_behavior() {
        EndBehavior::Power { coeff, exponent } if coeff != 0.0 => exponent.min(0.0),
        EndBehavior::Limit { value } if value == 0.0 => 0.0,
        _ => 0.0,
    };
    let head_vanishes = u.head_behavior().vanishes() && head_exp == 0.0;
    let k0 = k * head_exp + m + 1.0;
    if !head_vanishes && k0 <= EXP_SNAP {
        return Ok(QuadResult::diverged());
    }
    let mut to_infinity = false;
    let end = match u.support_end() {
        Some(r) => r,
        None => match u.tail_behavior() {
            EndBehavior::Power { coeff, exponent } => {
                if coeff != 0.0 && k * exponent + m + 1.0 >= -EXP_SNAP {
                    return Ok(QuadResult::diverged());
                }
                to_infinity = true;
                f64::INFINITY
            }
            EndBehavior::Limit { value } => {
                if value > 0.0 && m + 1.0 >= -EXP_SNAP {
                    return Ok(QuadResult::diverged());
                }
                if value > 0.0 {
                    to_infinity = true;
                    f64::INFINITY
                } else {
                    return Err(Error::Domain(
                        "cannot integrate a tail with unknown decay rate".into(),
                    ));
                }
            }
            EndBehavior::ZeroBeyond { radius } => radius,
        },
    };
    if !(end > 0.0) {
        return Ok(QuadResult::exact(0.0));
    }

    let mut total = 0.0;
    let mut err = 0.0;
    match u {
        RadialFunction::Profile(profile) => {
            for seg in profile.segments() {
                let a = seg.lo;
                let b = seg.hi.min(end);
                if !(b > a) {
                    continue;
                }
                let r = if seg.is_constant() {
                    let v = seg.constant_value();
                    if v == 0.0 {
                        QuadResult::exact(0.0)
                    } else {
                        quad::power_integral(v.powf(k), m + 1.0, a, b)
                    }
                } else if seg.is_pure_power() {
                    quad::power_integral(seg.c.powf(k), k * seg.alpha + m + 1.0, a, b)
                } else {
                    let g = |r: f64| {
                        let v = seg.value(r);
                        if v <= 0.0 {
                            0.0
                        } else {
                            v.powf(k) * r.powf(m)
                        }
                    };
                    if a == 0.0 {
                        let kk = if seg.alpha < 0.0 { k * seg.alpha + m + 1.0 } else { m + 1.0 };
                        let (v, e) = quad::down_to_zero(&g, b, kk, cfg);
                        QuadResult { value: v, abs_error_estimate: e, diverged: false }
                    } else {
                        let (v, e) = quad::adaptive(&g, a, b, cfg);
                        QuadResult { value: v, abs_error_estimate: e, diverged: false }
                    }
                };
                if r.diverged {
                    return Ok(QuadResult::diverged());
                }
                total += r.value;
                err += r.abs_error_estimate;
            }
        }
        RadialFunction::General(gr) => {
            let g = {
                let f = gr.f.clone();
                move |r: f64| {
                    let v = f(r);
                    if v <= 0.0 {
                        0.0
                    } else {
                        v.powf(k) * r.powf(m)
                    }
                }
            };
            let mut edges: Vec<f64> =
                gr.breakpoints.iter().copied().filter(|&r| r > 0.0 && r < end).collect();
            edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
            edges.dedup();
            let first = edges.first().copied().unwrap_or(if end.is_finite() { end } else { 1.0 });
            let (v, e) = quad::down_to_zero(&g, first, k0, cfg);
            total += v;
            err += e;
            for w in edges.windows(2) {
                let (v, e) = quad::adaptive(&g, w[0], w[1], cfg);
                total += v;
                err += e;
            }
            let last = edges.last().copied().unwrap_or(first);
            if to_infinity {
                let k_inf = match u.tail_behavior() {
                    EndBehavior::Power { exponent, .. } => k * exponent + m + 1.0,
                    _ => m + 1.0,
                };
                let (v, e) = quad::out_to_inf(&g, last, k_inf, cfg);
                total += v;
                err += e;
            } else if end > last {
                let (v, e) = quad::adaptive(&g, last, end, cfg);
                total += v;
                err += e;
            }
        }
    }
    Ok(QuadResult { value: total, abs_error_estimate: err, diverged: false })
}

/// Direct L^p norm on ℝⁿ by the radial change of variables:
/// ( n ω_n ∫₀^∞ f(r)^p r^(n-1) dr )^(1/p).
pub fn lp_norm_radial(
    f: &RadialFunction,
    p: f64,
    ctx: &DimensionContext,
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    let raw = radial_power_integral(f, p, ctx.n as f64 - 1.0, cfg)?;
    if raw.diverged {
        return Ok(raw);
    }
    let scaled = QuadResult {
        value: ctx.sphere_area() * raw.value,
        abs_error_estimate: ctx.sphere_area() * raw.abs_error_estimate,
        diverged: false,
    };
    Ok(root_with_error(scaled, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::{PowerAffineSegment as Seg, RadialProfile};
    use crate::rearrange::{decreasing_rearrangement, DimensionContext};

    fn indicator_01() -> OneDimFunction {
        OneDimFunction::from_segments(vec![Seg::constant(1.0, 0.0, 1.0)]).unwrap()
    }

    fn triangle() -> OneDimFunction {
        OneDimFunction::from_segments(vec![Seg::new(-1.0, 1.0, 1.0, 0.0, 1.0)]).unwrap()
    }

    #[test]
    fn quasinorm_indicator_closed_form() {
        // int_0^1 t^{q/p - 1} dt = p/q; norm = (p/q)^{1/q} = (1/2)^{1/4}
        let r = lorentz_quasinorm(&indicator_01(), 2.0, QIndex::Finite(4.0)).unwrap();
        assert!(!r.diverged);
        assert!((r.value - 0.8408964152537145).abs() < 1e-14, "got {}", r.value);
    }

    #[test]
    fn quasinorm_triangle_matches_lp() {
        // ustar(t) = max(1-t,0), p = q: norm = (1/(p+1))^{1/p}
        let r = lorentz_quasinorm(&triangle(), 2.0, QIndex::Finite(2.0)).unwrap();
        let expect = (1.0f64 / 3.0).sqrt();
        assert!((r.value - expect).abs() <= 1e-11, "got {} want {expect}", r.value);
    }

    #[test]
    fn quasinorm_psi_diverges_for_finite_q() {
        let ctx = DimensionContext::new(3).unwrap();
        let psi: RadialFunction =
            RadialProfile::new(vec![Seg::new(1.0, -0.5, 0.0, 0.0, f64::INFINITY)])
                .unwrap()
                .into();
        let star = decreasing_rearrangement(&psi, &ctx).unwrap();
        for q in [2.0, 4.0, 6.0] {
            let r = lorentz_quasinorm(&star, 6.0, QIndex::Finite(q)).unwrap();
            assert!(r.diverged, "q = {q} must diverge (scale-invariant integrand)");
        }
    }

    #[test]
    fn quasinorm_rejects_infinite_q() {
        assert!(lorentz_quasinorm(&indicator_01(), 2.0, QIndex::Infinity).is_err());
    }

    #[test]
    fn weak_norm_cases() {
        // ustar = t^{-1/2}, p = 2: exponents cancel, sup = 1
        let pure = OneDimFunction::from_segments(vec![Seg::new(
            1.0,
            -0.5,
            0.0,
            0.0,
            f64::INFINITY,
        )])
        .unwrap();
        assert!((weak_norm(&pure, 2.0).unwrap() - 1.0).abs() < 1e-13);
        // indicator, p = 2: sup approached at t -> 1-
        assert!((weak_norm(&indicator_01(), 2.0).unwrap() - 1.0).abs() < 1e-13);
        // psi (n=3,p=2): weak p*-norm = omega^{1/6}
        let ctx = DimensionContext::new(3).unwrap();
        let psi: RadialFunction =
            RadialProfile::new(vec![Seg::new(1.0, -0.5, 0.0, 0.0, f64::INFINITY)])
                .unwrap()
                .into();
        let star = decreasing_rearrangement(&psi, &ctx).unwrap();
        let want = ctx.omega_n.powf(1.0 / 6.0);
        assert!((weak_norm(&star, 6.0).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn weak_norm_divergences() {
        let pure = OneDimFunction::from_segments(vec![Seg::new(
            1.0,
            -0.75,
            0.0,
            0.0,
            f64::INFINITY,
        )])
        .unwrap();
        // p = 2: exponent sum -0.75 + 0.5 < 0 at t -> 0
        assert!(matches!(weak_norm(&pure, 2.0), Err(Error::Divergent(_))));
        // constant tail: unbounded as t -> inf
        let plateau =
            OneDimFunction::from_segments(vec![Seg::constant(1.0, 0.0, f64::INFINITY)]).unwrap();
        assert!(matches!(weak_norm(&plateau, 2.0), Err(Error::Divergent(_))));
    }

    #[test]
    fn maximal_function_examples() {
        // indicator: f** = 1 on (0,1], 1/t beyond
        let m = maximal_function(&indicator_01()).unwrap();
        assert!((m.eval(0.5).unwrap() - 1.0).abs() < 1e-14);
        assert!((m.eval(2.0).unwrap() - 0.5).abs() < 1e-14);
        // pure power: f** = f*/(beta+1) = 2 f* for beta = -1/2
        let pure = OneDimFunction::from_segments(vec![Seg::new(
            1.0,
            -0.5,
            0.0,
            0.0,
            f64::INFINITY,
        )])
        .unwrap();
        let m = maximal_function(&pure).unwrap();
        for t in [0.25, 1.0, 9.0] {
            let want = 2.0 * t.powf(-0.5);
            assert!((m.eval(t).unwrap() - want).abs() <= 1e-13 * want);
        }
    }

    #[test]
    fn maximal_dominates() {
        let f = OneDimFunction::from_segments(vec![
            Seg::new(1.0, -0.25, 0.0, 0.0, 1.0),
            Seg::new(-0.25, 1.0, 1.25, 1.0, 5.0),
        ])
        .unwrap();
        let m = maximal_function(&f).unwrap();
        for i in 1..=64 {
            let t = 0.12 * i as f64;
            assert!(m.eval(t).unwrap() >= f.eval(t).unwrap() - 1e-12);
        }
    }

    #[test]
    fn maximal_rejects_nonintegrable_head() {
        let bad = OneDimFunction::from_segments(vec![Seg::new(
            1.0,
            -1.5,
            0.0,
            0.0,
            1.0,
        )])
        .unwrap();
        assert!(matches!(maximal_function(&bad), Err(Error::Divergent(_))));
    }

    #[test]
    fn equivalent_norm_examples() {
        // indicator, p = q = 2, M = 1: f** = 1 on (0,1), norm = 1
        let r = equivalent_norm(&indicator_01(), 2.0, QIndex::Finite(2.0), 1.0).unwrap();
        assert!((r.value - 1.0).abs() <= 1e-10, "got {}", r.value);
        // f* = t^{-1/4}: f** = (4/3) t^{-1/4}; norm = (4/3) sqrt(2)
        let pure = OneDimFunction::from_segments(vec![Seg::new(
            1.0,
            -0.25,
            0.0,
            0.0,
            f64::INFINITY,
        )])
        .unwrap();
        let r = equivalent_norm(&pure, 2.0, QIndex::Finite(2.0), 1.0).unwrap();
        let want = 4.0 / 3.0 * 2.0f64.sqrt();
        assert!((r.value - want).abs() <= 1e-9, "got {} want {want}", r.value);
        // p = 1 rejected
        assert!(equivalent_norm(&indicator_01(), 1.0, QIndex::Finite(2.0), 1.0).is_err());
    }

    #[test]
    fn equivalent_norm_dominates_restricted_quasinorm() {
        let f = OneDimFunction::from_segments(vec![
            Seg::new(1.0, -0.3, 0.0, 0.0, 1.0),
            Seg::new(-0.2, 1.0, 1.2, 1.0, 6.0),
        ])
        .unwrap();
        let cfg = QuadConfig::default();
        let en = equivalent_norm(&f, 2.0, QIndex::Finite(3.0), 4.0).unwrap();
        let qn = root_with_error(
            lorentz_integral(&f, 2.0, 3.0, Some(4.0), &cfg).unwrap(),
            3.0,
        );
        assert!(en.value >= qn.value - 1e-9, "{} vs {}", en.value, qn.value);
    }

    #[test]
    fn hlp_examples() {
        let f = indicator_01();
        let g = OneDimFunction::from_segments(vec![Seg::constant(2.0, 0.0, 0.5)]).unwrap();
        assert!(hlp_majorization(&f, &g, 1.0).unwrap());
        assert!(hlp_majorization(&f, &f, 1.0).unwrap());
        let f2 = OneDimFunction::from_segments(vec![Seg::constant(2.0, 0.0, 1.0)]).unwrap();
        assert!(!hlp_majorization(&f2, &f, 1.0).unwrap());
    }

    #[test]
    fn hlp_implies_maximal_domination() {
        let f = indicator_01();
        let g = OneDimFunction::from_segments(vec![Seg::constant(2.0, 0.0, 0.5)]).unwrap();
        assert!(hlp_majorization(&f, &g, 1.0).unwrap());
        let mf = maximal_function(&f).unwrap();
        let mg = maximal_function(&g).unwrap();
        for i in 1..=512 {
            let t = i as f64 / 512.0;
            assert!(mf.eval(t).unwrap() <= mg.eval(t).unwrap() + 1e-10);
        }
    }

    #[test]
    fn lp_agreement_with_quasinorm_at_p_equals_q() {
        // for p = q the quasi-norm is the L^p norm (Cavalieri)
        let ctx = DimensionContext::new(3).unwrap();
        let u: RadialFunction = RadialProfile::new(vec![
            Seg::new(1.0, -0.3, 0.0, 0.0, 1.0),
            Seg::new(-0.5, 1.0, 1.5, 1.0, 3.0),
            Seg::constant(0.0, 3.0, f64::INFINITY),
        ])
        .unwrap()
        .into();
        let star = decreasing_rearrangement(&u, &ctx).unwrap();
        let a = lorentz_quasinorm(&star, 2.0, QIndex::Finite(2.0)).unwrap();
        let b = lp_norm_radial(&u, 2.0, &ctx, &QuadConfig::default()).unwrap();
        assert!((a.value - b.value).abs() <= 1e-8 * b.value, "{} vs {}", a.value, b.value);
    }

    #[test]
    fn lorentz_scale_inclusion_on_power_cutoff_family() {
        // finite ||.||_{p,q1} at q1 < q2 implies finite ||.||_{p,q2}
        let p = 2.0;
        for beta in [-0.7, -0.55, -0.5, -0.45, -0.2] {
            let f = OneDimFunction::from_segments(vec![Seg::new(1.0, beta, 0.0, 0.0, 1.0)])
                .unwrap();
            let mut prev_finite = None;
            for q in [1.5, 2.0, 4.0, 8.0] {
                let finite = !lorentz_quasinorm(&f, p, QIndex::Finite(q)).unwrap().diverged;
                if let Some(pf) = prev_finite {
                    if pf {
                        assert!(finite, "inclusion violated at beta={beta} q={q}");
                    }
                }
                prev_finite = Some(finite);
            }
        }
    }

    #[test]
    fn params_validation() {
        assert!(LorentzParams::new(3, 2.0, QIndex::Finite(4.0)).is_ok());
        assert!(LorentzParams::new(3, 3.0, QIndex::Finite(4.0)).is_err());
        assert!(LorentzParams::new(3, 0.5, QIndex::Finite(4.0)).is_err());
        assert!(LorentzParams::new(3, 2.0, QIndex::Finite(0.5)).is_err());
        assert!(LorentzParams::new(1, 1.0, QIndex::Infinity).is_err());
        let params = LorentzParams::new(3, 2.0, QIndex::Infinity).unwrap();
        assert!((params.p_star() - 6.0).abs() < 1e-15);
    }
}
