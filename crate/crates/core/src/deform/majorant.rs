/// A majorant `‖a_k‖_s/k! ≤ (b/16c) c^k / k²` fitted to a trace.
#[derive(Clone, Debug, PartialEq)]
pub struct MajorantReport {
    pub b: f64,
    pub c: f64,
    /// `1/c`, a lower bound on the radius of convergence of the majorant.
    pub radius_lower_bound: f64,
    /// Whether the bound holds at every computed order.
    pub fits: bool,
}

/// Fits `c` by the root test anchored at the first nonzero term `x_j`:
/// the smallest `c` with `x_k ≤ x_j c^(k−j)` for every computed `k`. Then
/// takes the smallest `b` that makes the majorant hold at every order. A
/// trace with at most one nonzero term gives `c = 0`.
pub fn majorant_diagnostic(x: &[f64]) -> MajorantReport {
    let n = x.len();
    let w = |k: usize| x[k - 1] * (k * k) as f64;
    let c = match x.iter().position(|&v| v != 0.0) {
        Some(j) => (j + 1..n)
            .filter(|&k| x[k] != 0.0)
            .map(|k| (x[k].abs() / x[j].abs()).powf(1.0 / (k - j) as f64))
            .fold(0.0, f64::max),
        None => 0.0,
    };
    if c == 0.0 {
        let b = x.iter().map(|v| 16.0 * v).fold(0.0, f64::max);
        let fits = x.iter().filter(|&&v| v != 0.0).count() <= 1;
        return MajorantReport { b, c, radius_lower_bound: f64::INFINITY, fits };
    }
    if !c.is_finite() {
        return MajorantReport { b: f64::INFINITY, c, radius_lower_bound: 0.0, fits: false };
    }
    let b = (1..=n).map(|k| 16.0 * w(k) / c.powi(k as i32 - 1)).fold(0.0, f64::max);
    let fits = (1..=n).all(|k| x[k - 1] <= (b / (16.0 * c)) * c.powi(k as i32) / (k * k) as f64 * (1.0 + 1e-12));
    MajorantReport { b, c, radius_lower_bound: 1.0 / c, fits }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_trace_recovers_ratio() {
        let r: f64 = 3.7;
        let x: Vec<f64> = (1..=8).map(|k| r.powi(k)).collect();
        let m = majorant_diagnostic(&x);
        assert!((m.c / r - 1.0).abs() < 0.1, "{m:?}");
        assert!(m.fits);
    }

    #[test]
    fn zero_trace_fits_anything() {
        let m = majorant_diagnostic(&[0.5, 0.0, 0.0, 0.0]);
        assert_eq!(m.c, 0.0);
        assert!(m.fits);
        assert!(m.radius_lower_bound.is_infinite());
    }

    #[test]
    fn longer_trace_never_lowers_c() {
        let x = [2.0, 0.5, 0.9, 0.4, 0.1, 0.05, 0.01, 0.004];
        let short = majorant_diagnostic(&x[..5]);
        let long = majorant_diagnostic(&x);
        assert!(long.c >= short.c);
        assert!(short.fits && long.fits);
    }

    #[test]
    fn vanishing_first_terms_are_skipped() {
        let m = majorant_diagnostic(&[0.0, 1.0, 2.0, 4.0]);
        assert!((m.c - 2.0).abs() < 1e-12);
        assert!(m.fits);
    }
}
