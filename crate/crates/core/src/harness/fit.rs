use serde::{Deserialize, Serialize};

/// Least-squares slope of `log mse` against `log h`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderFit {
    pub slope: f64,
    pub slope_se: f64,
    pub intercept: f64,
    pub admitted: Vec<f64>,
    /// Pre-asymptotic step sizes left out of the fit.
    pub excluded: Vec<f64>,
}

/// Fits over the step sizes not above the largest `h` whose error is below
/// `cutoff`; `None` with fewer than two admitted points.
pub fn fit_points(points: &[(f64, f64)], cutoff: f64) -> Option<OrderFit> {
    let h_star = points.iter().filter(|p| p.1 < cutoff && p.1 > 0.0).map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let (admitted, excluded): (Vec<(f64, f64)>, Vec<(f64, f64)>) =
        points.iter().partition(|p| p.0 <= h_star && p.1 > 0.0 && p.1.is_finite());
    if admitted.len() < 2 {
        return None;
    }
    let xs: Vec<f64> = admitted.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = admitted.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let slope_se = if xs.len() > 2 {
        let rss: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
        (rss / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Some(OrderFit {
        slope,
        slope_se,
        intercept,
        admitted: admitted.iter().map(|p| p.0).collect(),
        excluded: excluded.iter().map(|p| p.0).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synthetic_slopes() {
        let hs = [0.5, 0.25, 0.125, 0.0625];
        let lin: Vec<_> = hs.iter().map(|&h| (h, 0.3 * h)).collect();
        let f = fit_points(&lin, 10.0).unwrap();
        assert!((f.slope - 1.0).abs() < 1e-12);
        assert!(f.slope_se < 1e-12);
        let half: Vec<_> = hs.iter().map(|&h| (h, 2.0 * h.sqrt())).collect();
        assert!((fit_points(&half, 10.0).unwrap().slope - 0.5).abs() < 1e-12);
    }

    #[test]
    fn pre_asymptotic_points_are_excluded() {
        let pts = [(1.0, 5.0), (0.5, 0.4), (0.25, 0.2), (0.125, 0.1)];
        let f = fit_points(&pts, 0.5).unwrap();
        assert_eq!(f.excluded, vec![1.0]);
        assert!((f.slope - 1.0).abs() < 1e-12);
        assert!(fit_points(&pts, 0.15).is_none());
    }
}
