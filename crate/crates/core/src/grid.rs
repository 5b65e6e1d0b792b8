//! Wavenumber grids.

/// `n` logarithmically spaced points in `[a, b]`, `0 < a < b`.
pub fn log_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => {
            let (la, lb) = (a.ln(), b.ln());
            (0..n)
                .map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp())
                .collect()
        }
    }
}

/// `n` equispaced points in `[a, b]`.
pub fn linear_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => (0..n)
            .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// Sign-mirrored logarithmic grid on `xi_min <= |xi| <= xi_max`, sorted.
///
/// An odd `n` adds `xi = 0`; the remaining points are split evenly between
/// the two signs.
pub fn symmetric_log_grid(xi_min: f64, xi_max: f64, n: usize) -> Vec<f64> {
    let half = log_grid(xi_min, xi_max, n / 2);
    let mut out: Vec<f64> = half.iter().rev().map(|x| -x).collect();
    if n % 2 == 1 {
        out.push(0.0);
    }
    out.extend(half);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_grid_counts() {
        let g = symmetric_log_grid(1e-3, 1e3, 2001);
        assert_eq!(g.len(), 2001);
        assert_eq!(g[1000], 0.0);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert!((g[2000] - 1e3).abs() < 1e-9);
        assert!((g[1001] - 1e-3).abs() < 1e-15);
        assert_eq!(symmetric_log_grid(1e-3, 1e3, 200).len(), 200);
    }

    #[test]
    fn linear_grid_endpoints() {
        let g = linear_grid(-100.0, 100.0, 21);
        assert_eq!(g[0], -100.0);
        assert_eq!(g[20], 100.0);
        assert_eq!(g[10], 0.0);
    }
}
