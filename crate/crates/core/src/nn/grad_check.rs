use super::Mlp;

/// Central finite differences of `objective` with respect to every parameter of `net`.
pub fn numeric_gradient(net: &Mlp, objective: impl Fn(&Mlp) -> f64, h: f64) -> Vec<f64> {
    let mut probe = net.clone();
    (0..net.param_count())
        .map(|i| {
            let original = *probe.param_mut(i);
            *probe.param_mut(i) = original + h;
            let up = objective(&probe);
            *probe.param_mut(i) = original - h;
            let down = objective(&probe);
            *probe.param_mut(i) = original;
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// Magnitude below which central differences at `h ~ 1e-4` on O(1) objectives
/// cannot resolve a gradient entry to `1e-4` relative accuracy.
pub const RELATIVE_ERROR_FLOOR: f64 = 1e-7;

/// `|a - n| / max(|a|, |n|, RELATIVE_ERROR_FLOOR)`.
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    let scale = analytic.abs().max(numeric.abs()).max(RELATIVE_ERROR_FLOOR);
    (analytic - numeric).abs() / scale
}

pub fn max_relative_error(analytic: &[f64], numeric: &[f64]) -> f64 {
    assert_eq!(analytic.len(), numeric.len());
    analytic
        .iter()
        .zip(numeric)
        .map(|(&a, &n)| relative_error(a, n))
        .fold(0.0, f64::max)
}
