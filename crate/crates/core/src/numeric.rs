//! Small scalar numerics shared by the solvers: bounded golden-section
//! minimization and bisection on monotone feasibility functions.

/// Inverse golden ratio, `(sqrt(5) - 1) / 2`.
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Minimize `f` over `[a, b]` by golden-section search until the bracket is
/// narrower than `tol`. Returns `(x, f(x))` for the best point seen,
/// including both endpoints, so boundary minima are exact.
pub fn golden_section_min<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    assert!(a <= b, "invalid bracket [{a}, {b}]");
    let mut lo = a;
    let mut hi = b;
    let mut best = (a, f(a));
    let fb = f(b);
    if fb < best.1 {
        best = (b, fb);
    }
    if hi - lo <= tol {
        return best;
    }

    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    // Bracket shrinks by a constant factor; cap iterations defensively.
    for _ in 0..400 {
        if hi - lo <= tol {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    for (x, fx) in [(x1, f1), (x2, f2), (lo, f(lo)), (hi, f(hi))] {
        if fx < best.1 {
            best = (x, fx);
        }
    }
    best
}

/// Given `g` nondecreasing on `[lo, hi]` with `g(hi) >= 0`, find the
/// smallest `x` with `g(x) >= 0` to absolute precision `tol`. Returns `lo`
/// when `g(lo) >= 0` and `None` when even `g(hi) < 0`.
pub fn lowest_feasible<F: FnMut(f64) -> f64>(mut g: F, lo: f64, hi: f64, tol: f64) -> Option<f64> {
    if g(hi) < 0.0 {
        return None;
    }
    if g(lo) >= 0.0 {
        return Some(lo);
    }
    let mut bad = lo; // g(bad) < 0
    let mut good = hi; // g(good) >= 0
    while good - bad > tol {
        let mid = 0.5 * (bad + good);
        if g(mid) >= 0.0 {
            good = mid;
        } else {
            bad = mid;
        }
    }
    Some(good)
}
