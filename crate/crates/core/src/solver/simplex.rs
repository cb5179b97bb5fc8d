/// Euclidean nearest point of the probability simplex to `v`.
///
/// Sorts the coordinates and finds the largest shift θ such that
/// max(v − θ, 0) sums to one.
pub fn simplex_project(v: &[f64]) -> Vec<f64> {
    if v.is_empty() {
        return Vec::new();
    }
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        cumsum += uj;
        let t = (cumsum - 1.0) / (j + 1) as f64;
        if uj - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

/// The retraction r onto ∏_i Δ(A_i): `simplex_project` on each factor of
/// the given sizes.
pub fn retract(x: &[f64], sizes: &[usize]) -> Vec<f64> {
    let mut out = Vec::with_capacity(x.len());
    let mut at = 0;
    for &k in sizes {
        out.extend(simplex_project(&x[at..at + k]));
        at += k;
    }
    out
}

/// ‖r(σ + v) − σ‖₂, zero exactly at profiles where every supported label
/// attains its factor's maximum.
pub fn nash_residual(sigma: &[f64], v: &[f64], sizes: &[usize]) -> f64 {
    let shifted: Vec<f64> = sigma.iter().zip(v).map(|(s, x)| s + x).collect();
    retract(&shifted, sizes)
        .iter()
        .zip(sigma)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_examples() {
        assert_eq!(simplex_project(&[0.5, 0.5]), vec![0.5, 0.5]);
        assert_eq!(simplex_project(&[2.0, 0.0]), vec![1.0, 0.0]);
        let p = simplex_project(&[0.6, 0.6]);
        assert!((p[0] - 0.5).abs() < 1e-15 && (p[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn retraction_detects_deviation() {
        let r = retract(&[1.0, 1.0], &[2]);
        assert_eq!(r, vec![0.5, 0.5]);
        assert!(nash_residual(&[1.0, 0.0], &[0.0, 1.0], &[2]) > 0.5);
        assert_eq!(nash_residual(&[0.5, 0.5], &[3.0, 3.0], &[2]), 0.0);
    }
}
