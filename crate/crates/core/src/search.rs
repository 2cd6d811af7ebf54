//! Bounded one-dimensional maximization: uniform grid scan followed by
//! golden-section refinement on the bracket around the best grid point.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for a maximum of `f` on `[lo, hi]`.
///
/// Stops when the bracket is narrower than `xtol`. Returns the best point
/// evaluated, including the endpoints.
pub fn golden_section_max<F>(f: &mut F, mut lo: f64, mut hi: f64, xtol: f64) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    let (flo, fhi) = (f(lo), f(hi));
    let mut best = if flo >= fhi { (lo, flo) } else { (hi, fhi) };

    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > xtol {
        if f1 >= f2 {
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
        // Bracket collapse below float resolution.
        if !(x1 < x2) {
            break;
        }
    }
    for (x, fx) in [(x1, f1), (x2, f2)] {
        if fx > best.1 {
            best = (x, fx);
        }
    }
    best
}

/// Scans `points` evenly spaced values on `[lo, hi]`, then refines the
/// bracket around the best one. The grid winner is kept if refinement
/// does not beat it, so a non-unimodal objective still returns the grid
/// global maximum.
pub fn grid_golden_max<F>(mut f: F, lo: f64, hi: f64, points: usize, xtol: f64) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    assert!(points >= 3 && hi > lo);
    let step = (hi - lo) / (points - 1) as f64;
    let at = |i: usize| if i + 1 == points { hi } else { lo + step * i as f64 };

    let mut best_i = 0;
    let mut best_f = f64::NEG_INFINITY;
    for i in 0..points {
        let v = f(at(i));
        if v > best_f {
            best_f = v;
            best_i = i;
        }
    }
    let a = at(best_i.saturating_sub(1));
    let b = at((best_i + 1).min(points - 1));
    let refined = golden_section_max(&mut f, a, b, xtol);
    if refined.1 >= best_f {
        refined
    } else {
        (at(best_i), best_f)
    }
}
