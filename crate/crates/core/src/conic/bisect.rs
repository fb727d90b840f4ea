use super::ConicError;

/// Smallest `λ ∈ [lo, hi]` (to within `tol`) at which a monotone predicate
/// becomes true. The predicate must hold at `hi`; the returned value is always
/// a point where it was observed to hold.
pub fn bisect_feasibility<F>(mut pred: F, lo: f64, hi: f64, tol: f64) -> Result<f64, ConicError>
where
    F: FnMut(f64) -> Result<bool, ConicError>,
{
    if !(lo <= hi) || !(tol > 0.0) {
        return Err(ConicError::Bisection(format!("bad bracket [{lo}, {hi}] / tol {tol}")));
    }
    if !pred(hi)? {
        return Err(ConicError::Bisection(format!("predicate is false at the upper end {hi}")));
    }
    if pred(lo)? {
        return Ok(lo);
    }
    let (mut lo, mut hi) = (lo, hi);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if pred(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_threshold() {
        let t = bisect_feasibility(|x| Ok(x >= 2.5), 1.0, 4.0, 1e-7).unwrap();
        assert!((t - 2.5).abs() <= 1e-7);
        assert!(t >= 2.5);
    }

    #[test]
    fn infeasible_upper_end_is_an_error() {
        assert!(bisect_feasibility(|_| Ok(false), 0.0, 1.0, 1e-3).is_err());
    }
}
