//! Small least-squares helpers for exponent extraction.

/// Ordinary least squares on (x, y) points: (slope, intercept, rms residual).
pub fn ols_fit(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = points.len() as f64;
    assert!(points.len() >= 2, "ols needs at least two points");
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(x, y) in points {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let denom = n * sxx - sx * sx;
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let mut ss = 0.0;
    for &(x, y) in points {
        let e = y - slope * x - intercept;
        ss += e * e;
    }
    (slope, intercept, (ss / n).sqrt())
}

pub fn ols_slope(points: &[(f64, f64)]) -> f64 {
    ols_fit(points).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn recovers_power_law() {
        let pts: Vec<(f64, f64)> = (1..20)
            .map(|i| {
                let x = i as f64;
                (x.ln(), (3.7 * x.powf(0.5)).ln())
            })
            .collect();
        let (slope, intercept, rms) = ols_fit(&pts);
        assert_relative_eq!(slope, 0.5, max_relative = 1e-12);
        assert_relative_eq!(intercept, 3.7f64.ln(), max_relative = 1e-12);
        assert!(rms < 1e-12);
    }
}
