//! Local extrema of sampled profiles.

/// Local minima of `values` sampled at evenly spaced `coords`, refined by the
/// vertex of the parabola through each minimum and its two neighbours.
///
/// A node counts when it lies strictly below its left neighbour and not above
/// its right one, so a minimum straddling two equal nodes is reported once.
pub fn locate_minima(coords: &[f64], values: &[f64]) -> Vec<f64> {
    assert_eq!(coords.len(), values.len(), "coordinate and value lengths differ");
    if values.len() < 3 {
        return Vec::new();
    }
    let h = coords[1] - coords[0];
    let mut out = Vec::new();
    for i in 1..values.len() - 1 {
        let (a, b, c) = (values[i - 1], values[i], values[i + 1]);
        if b < a && b <= c {
            let curvature = a - 2.0 * b + c;
            let shift = if curvature > 0.0 { 0.5 * (a - c) / curvature } else { 0.0 };
            out.push(coords[i] + shift * h);
        }
    }
    out
}

pub fn locate_maxima(coords: &[f64], values: &[f64]) -> Vec<f64> {
    let negated: Vec<f64> = values.iter().map(|v| -v).collect();
    locate_minima(coords, &negated)
}

/// Minima and maxima merged in increasing order.
pub fn locate_extrema(coords: &[f64], values: &[f64]) -> Vec<f64> {
    let mut all = locate_minima(coords, values);
    all.extend(locate_maxima(coords, values));
    all.sort_by(f64::total_cmp);
    all
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::linspace;

    #[test]
    fn gaussian_has_no_interior_minimum() {
        let x = linspace(-5.0, 5.0, 101);
        let y: Vec<f64> = x.iter().map(|x| (-x * x).exp()).collect();
        assert!(locate_minima(&x, &y).is_empty());
        let m = locate_maxima(&x, &y);
        assert_eq!(m.len(), 1);
        assert!(m[0].abs() < 1e-12);
    }

    #[test]
    fn fringe_zeros_within_squared_spacing() {
        let x = linspace(-10.0, 10.0, 1000);
        let h = x[1] - x[0];
        let k = 1.3;
        let y: Vec<f64> = x.iter().map(|x| (k * x).cos().powi(2)).collect();
        let minima = locate_minima(&x, &y);
        for m in &minima {
            let n = (m * k / std::f64::consts::PI - 0.5).round();
            let exact = (n + 0.5) * std::f64::consts::PI / k;
            assert!((m - exact).abs() < h * h, "{m} vs {exact}");
        }
        assert_eq!(minima.len(), 8);
    }

    #[test]
    fn tie_between_nodes_reported_once() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [1.0, 0.0, 0.0, 1.0];
        let m = locate_minima(&x, &y);
        assert_eq!(m.len(), 1);
    }

    #[test]
    fn short_profiles_have_no_minima() {
        assert!(locate_minima(&[0.0, 1.0], &[1.0, 0.0]).is_empty());
    }
}
