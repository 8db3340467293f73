//! One-dimensional adaptive Simpson quadrature.

#[derive(Debug, thiserror::Error)]
pub enum QuadError {
    #[error("quadrature did not converge: achieved error estimate {achieved:e} > tolerance {tol:e}")]
    NonConvergent { achieved: f64, tol: f64 },
}

fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
    h / 6.0 * (fa + 4.0 * fm + fb)
}

fn adapt<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    err_acc: &mut f64,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let err = (left + right - whole) / 15.0;
    if err.abs() <= tol || depth == 0 {
        if depth == 0 {
            *err_acc += err.abs();
        }
        return left + right + err;
    }
    adapt(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, err_acc)
        + adapt(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, err_acc)
}

/// Adaptive Simpson on [a, b] with absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64, QuadError> {
    if a == b {
        return Ok(0.0);
    }
    let m = 0.5 * (a + b);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson(fa, fm, fb, b - a);
    let mut err_acc = 0.0;
    // seed with a few panels so narrow features are not missed
    let n0 = 8;
    let mut total = 0.0;
    let h = (b - a) / n0 as f64;
    for i in 0..n0 {
        let x0 = a + i as f64 * h;
        let x1 = x0 + h;
        let xm = 0.5 * (x0 + x1);
        let f0 = if i == 0 { fa } else { f(x0) };
        let f1 = if i == n0 - 1 { fb } else { f(x1) };
        let fmid = f(xm);
        let w = simpson(f0, fmid, f1, h);
        total += adapt(&f, x0, x1, f0, fmid, f1, w, tol / n0 as f64, 40, &mut err_acc);
    }
    let _ = (whole, fm);
    if err_acc > tol {
        return Err(QuadError::NonConvergent { achieved: err_acc, tol });
    }
    Ok(total)
}

/// Integrate on (−∞, b], truncating the lower limit where `|f|` stays
/// below `cutoff` (scanning outward in unit steps up to `max_range`).
pub fn integrate_left_tail<F: Fn(f64) -> f64>(
    f: F,
    b: f64,
    tol: f64,
    cutoff: f64,
    max_range: f64,
) -> Result<f64, QuadError> {
    let mut a = b - 1.0;
    while b - a < max_range {
        // require a run of small samples before truncating
        let quiet = (0..8).all(|k| f(a - k as f64 * 0.25).abs() < cutoff);
        if quiet {
            break;
        }
        a -= 1.0;
    }
    integrate(f, a - 2.0, b, tol)
}
