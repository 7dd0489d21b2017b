//! Exact piecewise power-affine radial functions.
//!
//! A [`RadialProfile`] is a contiguous list of segments, each of the form
//! `c·r^alpha + d` on `[lo, hi)`, starting at `lo = 0` and evaluated
//! right-continuously at breakpoints. Profiles are closed under the exact
//! operations used throughout the crate (power composition, dilation,
//! gradient magnitude), so no numeric resampling ever happens on this
//! representation. Anything that leaves the class is carried by
//! [`RadialFunction::General`] with breakpoints and endpoint behavior
//! attached for downstream quadrature.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Relative slack for sign/monotonicity checks on computed segment values.
const VALUE_SLACK: f64 = 1e-12;

/// One piece `c·r^alpha + d` on `[lo, hi)`; `hi` may be `f64::INFINITY`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerAffineSegment {
    pub c: f64,
    pub alpha: f64,
    pub d: f64,
    pub lo: f64,
    pub hi: f64,
}

impl PowerAffineSegment {
    pub fn new(c: f64, alpha: f64, d: f64, lo: f64, hi: f64) -> Self {
        Self { c, alpha, d, lo, hi }
    }

    /// Constant segment of the given value.
    pub fn constant(value: f64, lo: f64, hi: f64) -> Self {
        Self { c: 0.0, alpha: 0.0, d: value, lo, hi }
    }

    pub fn value(&self, r: f64) -> f64 {
        if self.c == 0.0 {
            self.d
        } else if self.alpha == 0.0 {
            self.c + self.d
        } else {
            self.c * r.powf(self.alpha) + self.d
        }
    }

    /// Signed derivative `c·alpha·r^(alpha-1)`.
    pub fn derivative(&self, r: f64) -> f64 {
        if self.c == 0.0 || self.alpha == 0.0 {
            0.0
        } else {
            self.c * self.alpha * r.powf(self.alpha - 1.0)
        }
    }

    /// True iff the segment is a pure power (or constant zero) term.
    pub fn is_pure_power(&self) -> bool {
        self.d == 0.0
    }

    pub fn is_constant(&self) -> bool {
        self.c == 0.0 || self.alpha == 0.0
    }

    pub fn constant_value(&self) -> f64 {
        if self.alpha == 0.0 {
            self.c + self.d
        } else {
            self.d
        }
    }

    /// Value limit as `r -> lo⁺`. May be `±INFINITY` when `lo = 0, alpha < 0`.
    pub fn value_limit_lo(&self) -> f64 {
        if self.lo > 0.0 || self.is_constant() {
            self.value(self.lo.max(f64::MIN_POSITIVE))
        } else if self.alpha < 0.0 {
            if self.c > 0.0 {
                f64::INFINITY
            } else {
                f64::NEG_INFINITY
            }
        } else {
            // alpha > 0 at lo = 0
            self.d
        }
    }

    /// Value limit as `r -> hi⁻`. For `hi = ∞` this is the tail limit.
    pub fn value_limit_hi(&self) -> f64 {
        if self.hi.is_finite() {
            self.value(self.hi)
        } else if self.is_constant() {
            self.constant_value()
        } else if self.alpha < 0.0 {
            self.d
        } else if self.c > 0.0 {
            f64::INFINITY
        } else {
            f64::NEG_INFINITY
        }
    }

    /// Segments are monotone: -1 decreasing, 0 constant, +1 increasing.
    pub fn monotone_direction(&self) -> i8 {
        if self.is_constant() {
            0
        } else {
            let s = self.c * self.alpha;
            if s > 0.0 {
                1
            } else if s < 0.0 {
                -1
            } else {
                0
            }
        }
    }

    pub fn is_nonincreasing(&self) -> bool {
        self.monotone_direction() <= 0
    }

    /// Solve `c·r^alpha + d = v` inside the segment range; `None` if the
    /// segment is constant or the solution falls outside `[lo, hi)`.
    pub fn invert(&self, v: f64) -> Option<f64> {
        if self.is_constant() {
            return None;
        }
        let x = (v - self.d) / self.c;
        if x <= 0.0 {
            return None;
        }
        let r = x.powf(1.0 / self.alpha);
        if r >= self.lo && r < self.hi && r.is_finite() {
            Some(r)
        } else {
            None
        }
    }

    /// Antiderivative-based integral of the raw value over `[a, b] ⊆ [lo, hi]`.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        let power_part = if self.c == 0.0 {
            0.0
        } else if self.alpha == 0.0 {
            self.c * (b - a)
        } else if (self.alpha + 1.0).abs() <= 1e-14 {
            self.c * (b / a).ln()
        } else {
            let e = self.alpha + 1.0;
            self.c * (b.powf(e) - a.powf(e)) / e
        };
        power_part + self.d * (b - a)
    }
}

/// How a radial function behaves at an endpoint of its domain, used for
/// divergence analysis and endpoint limits before any quadrature runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EndBehavior {
    /// Asymptotically `coeff·r^exponent` (the dominant term).
    Power { coeff: f64, exponent: f64 },
    /// Approaches the given finite value.
    Limit { value: f64 },
    /// Identically zero beyond the given radius (tail side only).
    ZeroBeyond { radius: f64 },
}

impl EndBehavior {
    /// Effective local growth exponent: 0 for bounded ends.
    pub fn exponent(&self) -> f64 {
        match self {
            EndBehavior::Power { coeff, exponent } if *coeff != 0.0 => *exponent,
            _ => 0.0,
        }
    }

    /// Whether the function tends to 0 at this end.
    pub fn vanishes(&self) -> bool {
        match self {
            EndBehavior::Power { coeff, exponent } => *coeff == 0.0 || *exponent != 0.0,
            EndBehavior::Limit { value } => *value == 0.0,
            EndBehavior::ZeroBeyond { .. } => true,
        }
    }
}

/// Exact piecewise power-affine radial profile on `(0, sup hi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    segments: Vec<PowerAffineSegment>,
}

impl RadialProfile {
    /// Validates contiguity from 0, `lo < hi`, nonnegativity, and tail decay.
    pub fn new(segments: Vec<PowerAffineSegment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidProfile("profile has no segments".into()));
        }
        if segments[0].lo != 0.0 {
            return Err(Error::InvalidSegment {
                index: 0,
                reason: format!("first segment must start at 0, got {}", segments[0].lo),
            });
        }
        for (i, s) in segments.iter().enumerate() {
            for (name, v) in [("c", s.c), ("alpha", s.alpha), ("d", s.d), ("lo", s.lo)] {
                if !v.is_finite() {
                    return Err(Error::InvalidSegment {
                        index: i,
                        reason: format!("{name} must be finite, got {v}"),
                    });
                }
            }
            if s.hi.is_nan() {
                return Err(Error::InvalidSegment { index: i, reason: "hi is NaN".into() });
            }
            if !(s.lo < s.hi) {
                return Err(Error::InvalidSegment {
                    index: i,
                    reason: format!("need lo < hi, got [{}, {})", s.lo, s.hi),
                });
            }
            if s.lo < 0.0 {
                return Err(Error::InvalidSegment { index: i, reason: "lo < 0".into() });
            }
            if i + 1 < segments.len() {
                if s.hi != segments[i + 1].lo {
                    return Err(Error::InvalidSegment {
                        index: i + 1,
                        reason: format!(
                            "segments must be contiguous: previous hi = {}, lo = {}",
                            s.hi,
                            segments[i + 1].lo
                        ),
                    });
                }
            }
            if s.hi.is_infinite() && !(s.c == 0.0 || (s.alpha < 0.0 && s.d == 0.0)) {
                return Err(Error::InvalidSegment {
                    index: i,
                    reason: "unbounded segment must decay (alpha<0, d=0) or be constant".into(),
                });
            }
            // Segments are monotone, so the minimum sits at an endpoint limit.
            let (vlo, vhi) = (s.value_limit_lo(), s.value_limit_hi());
            let min = vlo.min(vhi);
            let scale = 1.0 + vlo.abs().min(vhi.abs().min(f64::MAX));
            if min < -VALUE_SLACK * scale {
                return Err(Error::InvalidSegment {
                    index: i,
                    reason: format!("segment takes negative values (min {min})"),
                });
            }
        }
        Ok(Self { segments })
    }

    pub fn segments(&self) -> &[PowerAffineSegment] {
        &self.segments
    }

    /// Upper end of the defined domain (`+∞` for full-line profiles).
    pub fn domain_end(&self) -> f64 {
        self.segments.last().unwrap().hi
    }

    /// Radius beyond which the profile is identically zero, if that radius
    /// is finite. Trailing all-zero segments are folded into the support.
    pub fn support_end(&self) -> Option<f64> {
        let mut end = self.domain_end();
        if end.is_finite() {
            // undefined beyond the domain; treated as zero by measure-level code
        }
        for s in self.segments.iter().rev() {
            if s.c == 0.0 && s.d == 0.0 {
                end = s.lo;
            } else if s.is_constant() && s.constant_value() == 0.0 {
                end = s.lo;
            } else {
                break;
            }
        }
        if end.is_finite() {
            Some(end)
        } else {
            None
        }
    }

    /// Supremum of the profile over its domain (may be `+∞`).
    pub fn sup_value(&self) -> f64 {
        self.segments
            .iter()
            .map(|s| s.value_limit_lo().max(s.value_limit_hi()))
            .fold(0.0, f64::max)
    }

    fn segment_index_at(&self, r: f64) -> Option<usize> {
        if r < 0.0 || r >= self.domain_end() {
            return None;
        }
        // right-continuity: the segment with lo <= r < hi
        let idx = self.segments.partition_point(|s| s.hi <= r);
        (idx < self.segments.len()).then_some(idx)
    }

    /// Evaluate at `r > 0`; errors outside `(0, sup hi)`.
    pub fn eval(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::Domain(format!("eval requires r > 0, got {r}")));
        }
        match self.segment_index_at(r) {
            Some(i) => Ok(self.segments[i].value(r)),
            None => Err(Error::Domain(format!(
                "radius {r} outside the defined domain (0, {})",
                self.domain_end()
            ))),
        }
    }

    /// `|c·alpha|·r^(alpha-1)` for the segment strictly containing `r`.
    pub fn derivative_magnitude(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::Domain(format!("derivative requires r > 0, got {r}")));
        }
        let i = self.segment_index_at(r).ok_or_else(|| {
            Error::Domain(format!("radius {r} outside the defined domain"))
        })?;
        if r == self.segments[i].lo && i > 0 {
            return Err(Error::Breakpoint(r));
        }
        Ok(self.segments[i].derivative(r).abs())
    }

    /// Right-continuous derivative magnitude; breakpoints take the right
    /// segment's value. Internal helper for measure-level code where a
    /// single point does not matter.
    pub(crate) fn derivative_magnitude_rc(&self, r: f64) -> f64 {
        match self.segment_index_at(r) {
            Some(i) => self.segments[i].derivative(r).abs(),
            None => 0.0,
        }
    }

    /// `r ↦ f(r^s)` for `s > 0`, exact on the segment representation:
    /// exponents scale by `s`, breakpoints map to their `1/s` powers.
    pub fn compose_power(&self, s: f64) -> Result<RadialProfile> {
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::Domain(format!("compose_power requires s > 0, got {s}")));
        }
        if s == 1.0 {
            return Ok(self.clone());
        }
        let inv = 1.0 / s;
        let map = |r: f64| if r == 0.0 { 0.0 } else { r.powf(inv) };
        let segments = self
            .segments
            .iter()
            .map(|seg| PowerAffineSegment {
                c: seg.c,
                alpha: seg.alpha * s,
                d: seg.d,
                lo: map(seg.lo),
                hi: map(seg.hi),
            })
            .collect();
        RadialProfile::new(segments)
    }

    /// True iff every segment is non-increasing and no junction jumps up.
    pub fn is_decreasing(&self) -> bool {
        for (i, s) in self.segments.iter().enumerate() {
            if !s.is_nonincreasing() {
                return false;
            }
            if i + 1 < self.segments.len() {
                let left = s.value_limit_hi();
                let right = self.segments[i + 1].value(self.segments[i + 1].lo.max(f64::MIN_POSITIVE));
                let scale = 1.0 + left.abs().max(right.abs());
                if right > left + VALUE_SLACK * scale {
                    return false;
                }
            }
        }
        true
    }

    /// `|∇u|` as a profile: piecewise `|c·alpha|·r^(alpha-1)`, in general
    /// neither monotone nor continuous.
    pub fn gradient_magnitude(&self) -> RadialProfile {
        let segments = self
            .segments
            .iter()
            .map(|s| {
                if s.is_constant() {
                    PowerAffineSegment::constant(0.0, s.lo, s.hi)
                } else {
                    PowerAffineSegment {
                        c: (s.c * s.alpha).abs(),
                        alpha: s.alpha - 1.0,
                        d: 0.0,
                        lo: s.lo,
                        hi: s.hi,
                    }
                }
            })
            .collect();
        RadialProfile { segments }
    }

    /// Interior breakpoints (segment junctions), strictly inside the domain.
    pub fn breakpoints(&self) -> Vec<f64> {
        self.segments.iter().skip(1).map(|s| s.lo).collect()
    }

    pub fn head_behavior(&self) -> EndBehavior {
        let s = &self.segments[0];
        if s.is_constant() {
            EndBehavior::Limit { value: s.constant_value() }
        } else if s.alpha < 0.0 {
            EndBehavior::Power { coeff: s.c, exponent: s.alpha }
        } else {
            EndBehavior::Limit { value: s.d }
        }
    }

    pub fn tail_behavior(&self) -> EndBehavior {
        if let Some(r) = self.support_end() {
            return EndBehavior::ZeroBeyond { radius: r };
        }
        let s = self.segments.last().unwrap();
        if s.is_constant() {
            EndBehavior::Limit { value: s.constant_value() }
        } else {
            // validated: alpha < 0, d = 0 on unbounded non-constant tails
            EndBehavior::Power { coeff: s.c, exponent: s.alpha }
        }
    }
}

/// Any evaluable radial map `r ↦ value ≥ 0` with breakpoints and endpoint
/// behavior. Profiles are the exact case; transform outputs that leave the
/// power-affine class are wrapped as `General`.
#[derive(Clone)]
pub enum RadialFunction {
    Profile(RadialProfile),
    General(GeneralRadial),
}

/// Closure-backed radial function with the metadata quadrature needs.
#[derive(Clone)]
pub struct GeneralRadial {
    pub(crate) f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub breakpoints: Vec<f64>,
    pub head: EndBehavior,
    pub tail: EndBehavior,
    pub decreasing: bool,
}

impl GeneralRadial {
    pub fn new(
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        breakpoints: Vec<f64>,
        head: EndBehavior,
        tail: EndBehavior,
        decreasing: bool,
    ) -> Self {
        Self { f, breakpoints, head, tail, decreasing }
    }
}

impl std::fmt::Debug for RadialFunction {
    fn fmt(&self, fmt: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RadialFunction::Profile(p) => fmt.debug_tuple("Profile").field(p).finish(),
            RadialFunction::General(g) => fmt
                .debug_struct("General")
                .field("breakpoints", &g.breakpoints)
                .field("head", &g.head)
                .field("tail", &g.tail)
                .field("decreasing", &g.decreasing)
                .finish(),
        }
    }
}

impl From<RadialProfile> for RadialFunction {
    fn from(p: RadialProfile) -> Self {
        RadialFunction::Profile(p)
    }
}

impl RadialFunction {
    pub fn eval(&self, r: f64) -> Result<f64> {
        match self {
            RadialFunction::Profile(p) => p.eval(r),
            RadialFunction::General(g) => {
                if !(r > 0.0) {
                    return Err(Error::Domain(format!("eval requires r > 0, got {r}")));
                }
                Ok((g.f)(r))
            }
        }
    }

    /// Evaluation for measure-level code: zero outside the defined domain.
    pub(crate) fn eval_or_zero(&self, r: f64) -> f64 {
        match self {
            RadialFunction::Profile(p) => p.eval(r).unwrap_or(0.0),
            RadialFunction::General(g) => (g.f)(r),
        }
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            RadialFunction::Profile(p) => p.breakpoints(),
            RadialFunction::General(g) => g.breakpoints.clone(),
        }
    }

    pub fn head_behavior(&self) -> EndBehavior {
        match self {
            RadialFunction::Profile(p) => p.head_behavior(),
            RadialFunction::General(g) => g.head,
        }
    }

    pub fn tail_behavior(&self) -> EndBehavior {
        match self {
            RadialFunction::Profile(p) => p.tail_behavior(),
            RadialFunction::General(g) => g.tail,
        }
    }

    pub fn is_decreasing(&self) -> bool {
        match self {
            RadialFunction::Profile(p) => p.is_decreasing(),
            RadialFunction::General(g) => g.decreasing,
        }
    }

    pub fn support_end(&self) -> Option<f64> {
        match self {
            RadialFunction::Profile(p) => p.support_end(),
            RadialFunction::General(g) => match g.tail {
                EndBehavior::ZeroBeyond { radius } => Some(radius),
                _ => None,
            },
        }
    }

    pub fn as_profile(&self) -> Option<&RadialProfile> {
        match self {
            RadialFunction::Profile(p) => Some(p),
            RadialFunction::General(_) => None,
        }
    }
}

// ---------------------------------------------------------------------------
// JSON schema: {"segments":[{"c":1.0,"alpha":-0.5,"d":0.0,"lo":0.0,"hi":1.0}]}
// with "hi":"inf" encoding +infinity.
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct ProfileDoc {
    segments: Vec<SegmentDoc>,
}

#[derive(Serialize, Deserialize)]
struct SegmentDoc {
    c: f64,
    alpha: f64,
    d: f64,
    lo: f64,
    hi: HiDoc,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum HiDoc {
    Num(f64),
    Word(String),
}

impl RadialProfile {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let doc: ProfileDoc = serde_json::from_str(text)?;
        let mut segments = Vec::with_capacity(doc.segments.len());
        for (i, s) in doc.segments.into_iter().enumerate() {
            let hi = match s.hi {
                HiDoc::Num(v) => v,
                HiDoc::Word(w) if w == "inf" => f64::INFINITY,
                HiDoc::Word(w) => {
                    return Err(Error::InvalidSegment {
                        index: i,
                        reason: format!("hi must be a number or \"inf\", got {w:?}"),
                    })
                }
            };
            segments.push(PowerAffineSegment::new(s.c, s.alpha, s.d, s.lo, hi));
        }
        RadialProfile::new(segments)
    }

    pub fn to_json_string(&self) -> String {
        let doc = ProfileDoc {
            segments: self
                .segments
                .iter()
                .map(|s| SegmentDoc {
                    c: s.c,
                    alpha: s.alpha,
                    d: s.d,
                    lo: s.lo,
                    hi: if s.hi.is_finite() {
                        HiDoc::Num(s.hi)
                    } else {
                        HiDoc::Word("inf".into())
                    },
                })
                .collect(),
        };
        serde_json::to_string(&doc).expect("profile serialization cannot fail")
    }
}
