/// `(3 - sqrt(5)) / 2`, the golden-section interior fraction.
const INV_PHI2: f64 = 0.381_966_011_250_105_1;

/// Maximises a unimodal `f` on `[lo, hi]`.
///
/// Golden-section search down to `tol * (hi - lo)`, then the endpoints are
/// compared against the interior estimate so boundary maximisers are
/// returned exactly. If the four initial probes are all equal the objective
/// is treated as flat and a coarse grid picks the bracket first.
pub fn golden_max<F>(f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    if hi <= lo {
        return (lo, f(lo));
    }
    let f_lo = f(lo);
    let f_hi = f(hi);
    let width = hi - lo;
    let stop = (tol * width).max(f64::EPSILON * hi.abs().max(lo.abs()));

    let mut a = lo;
    let mut b = hi;
    let mut c = b - (1.0 - INV_PHI2) * (b - a);
    let mut d = a + (1.0 - INV_PHI2) * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);

    if fc == fd && fc == f_lo && fc == f_hi {
        // flat to machine precision on the probes: bracket the best of a grid
        const GRID: usize = 64;
        let step = width / GRID as f64;
        let mut best = (lo, f_lo);
        for i in 1..=GRID {
            let x = if i == GRID { hi } else { lo + step * i as f64 };
            let fx = f(x);
            if fx > best.1 {
                best = (x, fx);
            }
        }
        a = (best.0 - step).max(lo);
        b = (best.0 + step).min(hi);
        c = b - (1.0 - INV_PHI2) * (b - a);
        d = a + (1.0 - INV_PHI2) * (b - a);
        fc = f(c);
        fd = f(d);
    }

    while b - a > stop {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - (1.0 - INV_PHI2) * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + (1.0 - INV_PHI2) * (b - a);
            fd = f(d);
        }
    }

    let mut best = if fc >= fd { (c, fc) } else { (d, fd) };
    if f_lo > best.1 {
        best = (lo, f_lo);
    }
    if f_hi > best.1 {
        best = (hi, f_hi);
    }
    best
}

/// Bisects between a point where `feasible` holds and one where it does not,
/// returning a point on the feasible side within `tol` of the boundary.
pub fn bisect_boundary<F>(feasible: F, mut inside: f64, mut outside: f64, tol: f64) -> f64
where
    F: Fn(f64) -> bool,
{
    for _ in 0..200 {
        if (outside - inside).abs() <= tol {
            break;
        }
        let mid = 0.5 * (inside + outside);
        if mid == inside || mid == outside {
            break;
        }
        if feasible(mid) {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    inside
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interior_maximum() {
        let (x, fx) = golden_max(|x| -(x - 1.3) * (x - 1.3), 0.0, 5.0, 1e-10);
        assert!((x - 1.3).abs() < 1e-8);
        assert!(fx.abs() < 1e-15);
    }

    #[test]
    fn boundary_maxima_are_exact() {
        assert_eq!(golden_max(|x| x, 0.5, 2.0, 1e-8).0, 2.0);
        assert_eq!(golden_max(|x| -x, 0.5, 2.0, 1e-8).0, 0.5);
    }

    #[test]
    fn degenerate_interval() {
        assert_eq!(golden_max(|x| 3.0 * x, 0.7, 0.7, 1e-8), (0.7, 3.0 * 0.7));
    }

    #[test]
    fn flat_then_bump() {
        // zero on most of the interval, so the first probes all tie
        let f = |x: f64| if (4.0..4.2).contains(&x) { 1.0 - (x - 4.1).abs() } else { 0.0 };
        let (x, _) = golden_max(f, 0.0, 10.0, 1e-10);
        assert!((x - 4.1).abs() < 1e-6, "{x}");
    }

    #[test]
    fn bisection_stays_feasible() {
        let x = bisect_boundary(|x| x * x <= 2.0, 0.0, 2.0, 1e-12);
        assert!(x * x <= 2.0);
        assert!((x - std::f64::consts::SQRT_2).abs() < 1e-11);
        let x = bisect_boundary(|x| x >= 0.25, 1.0, 0.0, 1e-12);
        assert!(x >= 0.25 && x - 0.25 < 1e-11);
    }
}
