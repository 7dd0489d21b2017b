//! Adaptive quadrature tuned for power-law endpoint singularities.
//!
//! Integrals are always assembled per breakpoint panel by the callers;
//! this module supplies the panel primitives:
//!
//! * [`adaptive`] — Gauss–Kronrod 7/15 with bisection refinement on a
//!   finite panel (smooth integrands between breakpoints),
//! * [`down_to_zero`] / [`out_to_inf`] — geometric panel ladders toward a
//!   singular endpoint, equivalent to uniform panels on the `t = e^s`
//!   axis, with the remainder certified from the known local power
//!   exponent rather than discovered numerically,
//! * [`power_integral`] — the closed form for `coeff·t^(e-1)` panels.
//!
//! Divergence is never detected by overflow: callers run exponent
//! analysis first and only integrate convergent panels.

/// Below this magnitude a local power exponent is treated as exactly zero
/// (scale-invariant integrand / critical power). Exponents are assembled
/// from user-facing parameters with a few ulps of rounding, so exact-zero
/// comparisons would misclassify critical cases.
pub const EXP_SNAP: f64 = 1e-12;

#[derive(Debug, Clone, Copy)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_depth: u32,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self { rel_tol: 1e-11, abs_tol: 1e-11, max_depth: 20 }
    }
}

impl QuadConfig {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self { rel_tol, abs_tol: rel_tol, ..Self::default() }
    }
}

/// Value plus an a-posteriori error estimate; `diverged` results carry no
/// meaningful value and must not be consumed.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub diverged: bool,
}

impl QuadResult {
    pub fn exact(value: f64) -> Self {
        Self { value, abs_error_estimate: 0.0, diverged: false }
    }

    pub fn diverged() -> Self {
        Self { value: f64::INFINITY, abs_error_estimate: f64::INFINITY, diverged: true }
    }
}

// Gauss-Kronrod 7-15 nodes and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

/// One GK15 application on [a, b]: returns (kronrod value, error estimate).
fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut resabs = fc.abs() * WGK[7];
    let mut fv = [0.0f64; 15];
    fv[7] = fc;
    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv[j] = f1;
        fv[14 - j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = kronrod * 0.5;
    let mut resasc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv[j] - mean).abs() + (fv[14 - j] - mean).abs());
    }
    let mut err = ((kronrod - gauss) * half).abs();
    resasc *= half.abs();
    resabs *= half.abs();
    if resasc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / resasc).powf(1.5);
        err = if scale < 1.0 { resasc * scale } else { resasc };
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    (kronrod * half, err)
}

/// Adaptive GK15 on a finite panel. Returns (value, error estimate).
pub fn adaptive(f: &dyn Fn(f64) -> f64, a: f64, b: f64, cfg: &QuadConfig) -> (f64, f64) {
    if !(b > a) {
        return (0.0, 0.0);
    }
    let (whole, err) = gk15(f, a, b);
    let tol = cfg.abs_tol.max(cfg.rel_tol * whole.abs());
    recurse(f, a, b, whole, err, tol, cfg.max_depth)
}

fn recurse(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    whole: f64,
    err: f64,
    tol: f64,
    depth: u32,
) -> (f64, f64) {
    if err <= tol || depth == 0 {
        return (whole, err);
    }
    let mid = 0.5 * (a + b);
    if mid <= a || mid >= b {
        return (whole, err);
    }
    let (lv, le) = gk15(f, a, mid);
    let (rv, re) = gk15(f, mid, b);
    let (lv, le) = recurse(f, a, mid, lv, le, 0.5 * tol, depth - 1);
    let (rv, re) = recurse(f, mid, b, rv, re, 0.5 * tol, depth - 1);
    (lv + rv, le + re)
}

/// Closed form for `∫ coeff · t^(e-1) dt` over `[a, b]` with the local
/// exponent convention used throughout: the antiderivative is
/// `coeff · t^e / e`, the log case appearing when `|e| <= EXP_SNAP`.
/// `a = 0` and `b = ∞` are allowed when the exponent sign makes the
/// integral finite; the caller is responsible for having checked that.
pub fn power_integral(coeff: f64, e: f64, a: f64, b: f64) -> QuadResult {
    if coeff == 0.0 || a == b {
        return QuadResult::exact(0.0);
    }
    if e.abs() <= EXP_SNAP {
        if a <= 0.0 || !b.is_finite() {
            return QuadResult::diverged();
        }
        return QuadResult::exact(coeff * (b / a).ln());
    }
    let at_b = if b.is_finite() {
        if b == 0.0 { 0.0 } else { b.powf(e) }
    } else if e < 0.0 {
        0.0
    } else {
        return QuadResult::diverged();
    };
    let at_a = if a > 0.0 {
        a.powf(e)
    } else if e > 0.0 {
        0.0
    } else {
        return QuadResult::diverged();
    };
    let value = coeff * (at_b - at_a) / e;
    QuadResult { value, abs_error_estimate: 4.0 * f64::EPSILON * value.abs(), diverged: false }
}

/// Integrate `f` over `(0, b]` when `f(t) ~ C·t^(k-1)` near 0 with known
/// `k > 0`: geometric panels `[b/2^(j+1), b/2^j]` (uniform on the log
/// axis), each integrated adaptively, stopping once the certified
/// remainder `last · r/(1-r)`, `r = 2^(-k)`, is negligible. The remainder
/// bound is added to the error estimate.
pub fn down_to_zero(f: &dyn Fn(f64) -> f64, b: f64, k: f64, cfg: &QuadConfig) -> (f64, f64) {
    geometric_ladder(f, b, k, cfg, true)
}

/// Integrate `f` over `[a, ∞)` when `f(t) ~ C·t^(k-1)` near ∞ with known
/// `k < 0`; mirror of [`down_to_zero`].
pub fn out_to_inf(f: &dyn Fn(f64) -> f64, a: f64, k: f64, cfg: &QuadConfig) -> (f64, f64) {
    geometric_ladder(f, a, -k, cfg, false)
}

fn geometric_ladder(
    f: &dyn Fn(f64) -> f64,
    edge: f64,
    k: f64,
    cfg: &QuadConfig,
    toward_zero: bool,
) -> (f64, f64) {
    debug_assert!(k > 0.0, "caller must pre-check convergence (k = {k})");
    let ratio = 0.5f64.powf(k.max(EXP_SNAP));
    let mut total = 0.0;
    let mut err = 0.0;
    let mut hi = edge;
    let mut last = f64::INFINITY;
    // ~60 panels per decade of required decay at k = 0.01; generous cap
    let max_panels = 40_000usize;
    for _ in 0..max_panels {
        let (a, b) = if toward_zero { (hi * 0.5, hi) } else { (hi, hi * 2.0) };
        let (v, e) = adaptive(f, a, b, cfg);
        total += v;
        err += e;
        last = v.abs();
        hi = if toward_zero { hi * 0.5 } else { hi * 2.0 };
        let tol = cfg.abs_tol.max(cfg.rel_tol * total.abs());
        let remainder = last * ratio / (1.0 - ratio);
        if remainder <= 0.25 * tol {
            return (total, err + remainder);
        }
        if !hi.is_finite() || hi == 0.0 {
            break;
        }
    }
    let remainder = last * ratio / (1.0 - ratio);
    (total, err + remainder.max(cfg.abs_tol))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gk15_is_exact_on_low_degree_polynomials() {
        let (v, _) = adaptive(&|x| x * x * (1.0 - x), 0.0, 1.0, &QuadConfig::default());
        assert!((v - (1.0 / 3.0 - 0.25)).abs() < 1e-15);
    }

    #[test]
    fn adaptive_handles_mild_kinks() {
        let cfg = QuadConfig::default();
        let (v, e) = adaptive(&|x: f64| (x - 0.3).abs(), 0.0, 1.0, &cfg);
        let exact = 0.3f64.powi(2) / 2.0 + 0.7f64.powi(2) / 2.0;
        assert!((v - exact).abs() <= 10.0 * e.max(1e-13), "v={v} exact={exact} e={e}");
    }

    #[test]
    fn power_integral_closed_forms() {
        // int_0^1 t^{-1/2} dt = 2 via e = 1/2 on coeff t^{e-1}
        let r = power_integral(1.0, 0.5, 0.0, 1.0);
        assert!((r.value - 2.0).abs() < 1e-15);
        // int_1^inf t^{-2} dt = 1 via e = -1
        let r = power_integral(1.0, -1.0, 1.0, f64::INFINITY);
        assert!((r.value - 1.0).abs() < 1e-15);
        // log case
        let r = power_integral(3.0, 0.0, 1.0, std::f64::consts::E);
        assert!((r.value - 3.0).abs() < 1e-14);
        // scale-invariant integrand over (0, b) diverges
        assert!(power_integral(1.0, 0.0, 0.0, 1.0).diverged);
        assert!(power_integral(1.0, -0.25, 0.0, 1.0).diverged);
        assert!(power_integral(1.0, 0.25, 1.0, f64::INFINITY).diverged);
    }

    #[test]
    fn geometric_ladder_matches_closed_form_near_zero() {
        let cfg = QuadConfig::default();
        // f(t) = t^{-0.4}: k = 0.6, integral over (0,1] = 1/0.6
        let (v, e) = down_to_zero(&|t: f64| t.powf(-0.4), 1.0, 0.6, &cfg);
        assert!((v - 1.0 / 0.6).abs() <= 10.0 * e.max(1e-12), "v={v} e={e}");
    }

    #[test]
    fn geometric_ladder_matches_closed_form_near_inf() {
        let cfg = QuadConfig::default();
        // f(t) = t^{-2.5}: k = -1.5, integral over [1, inf) = 1/1.5
        let (v, e) = out_to_inf(&|t: f64| t.powf(-2.5), 1.0, -1.5, &cfg);
        assert!((v - 1.0 / 1.5).abs() <= 10.0 * e.max(1e-12), "v={v} e={e}");
    }

    #[test]
    fn halving_tolerance_agrees_within_reported_error() {
        let f = |t: f64| (1.0 - 0.4 * (t - 1.0)).powi(4) * t.powf(0.37);
        let c1 = QuadConfig::default();
        let c2 = QuadConfig { rel_tol: 5e-12, abs_tol: 5e-12, ..c1 };
        let (v1, e1) = adaptive(&f, 1.0, 3.5, &c1);
        let (v2, _) = adaptive(&f, 1.0, 3.5, &c2);
        assert!((v1 - v2).abs() <= 10.0 * e1.max(1e-14));
    }
}
