/// Least-squares line `y ≈ a + b·x`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineFit {
    pub intercept: f64,
    pub slope: f64,
    pub r2: f64,
}

pub fn fit_line(x: &[f64], y: &[f64]) -> LineFit {
    let m = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / m, y.iter().sum::<f64>() / m);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let syy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let r2 = if sxx > 0.0 && syy > 0.0 { sxy * sxy / (sxx * syy) } else { 0.0 };
    LineFit { intercept: my - slope * mx, slope, r2 }
}

/// Observed order `log(e_coarse/e_fine)/log(h_coarse/h_fine)`.
pub fn order(e_coarse: f64, e_fine: f64, refinement: f64) -> f64 {
    (e_coarse / e_fine).ln() / refinement.ln()
}

/// Largest relative deviation `|b/a − 1|` over consecutive pairs.
pub fn max_drift(values: &[f64]) -> f64 {
    values.windows(2).map(|w| (w[1] / w[0] - 1.0).abs()).fold(0.0, f64::max)
}

/// Increments `v[i+1] − v[i]` shrink geometrically by at least `factor`.
pub fn increments_shrink(values: &[f64], factor: f64) -> bool {
    let inc: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    inc.windows(2).all(|w| w[1].abs() <= factor * w[0].abs())
}

/// Every step grows by at least `factor`.
pub fn grows_by(values: &[f64], factor: f64) -> bool {
    values.windows(2).all(|w| w[1] >= factor * w[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let f = fit_line(&[0.0, 1.0, 2.0, 3.0], &[1.0, 3.0, 5.0, 7.0]);
        assert!((f.slope - 2.0).abs() < 1e-14 && (f.intercept - 1.0).abs() < 1e-14 && (f.r2 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn second_order() {
        assert!((order(4.0, 1.0, 2.0) - 2.0).abs() < 1e-14);
        assert!(increments_shrink(&[1.0, 1.5, 1.75, 1.875], 0.5));
        assert!(!increments_shrink(&[1.0, 1.5, 2.0], 0.9));
        assert!(grows_by(&[1.0, 1.3, 1.69], 1.3 - 1e-12));
        assert!((max_drift(&[1.0, 1.1, 0.99]) - 0.1).abs() < 1e-12);
    }
}
