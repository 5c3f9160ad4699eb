use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-10;
const MAX_DOUBLINGS: usize = 60;

/// Locate where a nonincreasing `g` crosses `target`.
///
/// The bracket `[lo, hi]` is widened by halving `lo` / doubling `hi` (60 times
/// at most) until `g(lo) >= target >= g(hi)`. Bisection then shrinks it to
/// width `tol` and the upper endpoint is returned, so `g(result) <= target`
/// always holds.
pub fn bisect_monotone<G>(g: G, target: f64, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    G: Fn(f64) -> f64,
{
    if !(lo > 0.0 && hi > lo && tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "bisection needs 0 < lo < hi and tol > 0, got lo={lo} hi={hi} tol={tol}"
        )));
    }
    let unbracketed = |lo, hi| Error::Unbracketed { target, lo, hi };
    let mut lo = lo;
    let mut hi = hi;

    let mut doublings = 0;
    while g(hi) > target {
        if doublings == MAX_DOUBLINGS {
            return Err(unbracketed(lo, hi));
        }
        lo = hi;
        hi *= 2.0;
        doublings += 1;
    }
    let mut halvings = 0;
    while g(lo) < target {
        if halvings == MAX_DOUBLINGS {
            return Err(unbracketed(lo, hi));
        }
        hi = lo;
        lo *= 0.5;
        halvings += 1;
    }

    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}
