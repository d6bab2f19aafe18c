//! Small numerical helpers shared across modules.

/// Absolute tolerance on the bracket width for [`bisect`].
pub const BISECTION_TOL: f64 = 1e-12;
/// Iteration cap for [`bisect`].
pub const BISECTION_MAX_ITER: usize = 200;

/// Finds a root of `f` on `[lo, hi]` by bisection.
///
/// Returns `None` when `f(lo)` and `f(hi)` have the same strict sign. The
/// function is assumed continuous on the bracket; monotone inputs give the
/// unique root.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> Option<f64> {
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Some(lo);
    }
    if f_hi == 0.0 {
        return Some(hi);
    }
    if f_lo.signum() == f_hi.signum() || f_lo.is_nan() || f_hi.is_nan() {
        return None;
    }
    for _ in 0..BISECTION_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= BISECTION_TOL {
            return Some(mid);
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Some(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Composite three-point Gauss-Legendre rule on `n` equal panels.
///
/// The integrand is never evaluated at panel endpoints, so a jump at `a` or
/// `b` does not bias the result.
pub fn gauss_legendre(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    const NODE: f64 = 0.774_596_669_241_483_4;
    let n = n.max(1);
    let h = (b - a) / n as f64;
    let mut acc = 0.0;
    for i in 0..n {
        let mid = a + (i as f64 + 0.5) * h;
        let r = 0.5 * h * NODE;
        acc += 5.0 * f(mid - r) + 8.0 * f(mid) + 5.0 * f(mid + r);
    }
    acc * h / 18.0
}

/// Odds ratio `p / (1 - p)`.
#[inline]
pub fn odds(p: f64) -> f64 {
    p / (1.0 - p)
}

/// Formats a float with `digits` significant digits.
///
/// Plain decimal notation is used for moderate magnitudes and scientific
/// notation otherwise. Non-finite values print as `inf`, `-inf` or `nan`.
pub fn fmt_sig(v: f64, digits: usize) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let exp = v.abs().log10().floor() as i32;
    if (-5..15).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        let s = format!("{:.*}", decimals, v);
        trim_zeros(&s)
    } else {
        let s = format!("{:.*e}", digits - 1, v);
        match s.split_once('e') {
            Some((mantissa, e)) => format!("{}e{}", trim_zeros(mantissa), e),
            None => s,
        }
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        let t = s.trim_end_matches('0').trim_end_matches('.');
        if t == "-0" {
            "0".into()
        } else {
            t.into()
        }
    } else {
        s.into()
    }
}
