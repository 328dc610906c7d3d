//! Symmetric tridiagonal eigenvalues by Sturm-sequence bisection.

/// Number of eigenvalues strictly below `x` of the matrix with diagonal `d`
/// and off-diagonal `e` (`e.len() == d.len() - 1`).
pub fn sturm_count(d: &[f64], e: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..d.len() {
        let off = if i == 0 { 0.0 } else { e[i - 1] * e[i - 1] };
        q = d[i] - x - if i == 0 { 0.0 } else { off / q };
        if q == 0.0 {
            q = f64::EPSILON * (d[i].abs() + e.get(i).map_or(0.0, |v| v.abs()) + 1.0);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// The `k` smallest eigenvalues, ascending.
pub fn tridiagonal_lowest(d: &[f64], e: &[f64], k: usize) -> Vec<f64> {
    assert_eq!(e.len() + 1, d.len());
    let k = k.min(d.len());
    // Gershgorin bounds.
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..d.len() {
        let r = if i > 0 { e[i - 1].abs() } else { 0.0 } + e.get(i).map_or(0.0, |v| v.abs());
        lo = lo.min(d[i] - r);
        hi = hi.max(d[i] + r);
    }
    (0..k)
        .map(|j| {
            let (mut a, mut b) = (lo, hi);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                if sturm_count(d, e, mid) > j {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            0.5 * (a + b)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn second_difference_eigenvalues() {
        let n = 50;
        let d = vec![2.0; n];
        let e = vec![-1.0; n - 1];
        let ev = tridiagonal_lowest(&d, &e, 3);
        for (j, v) in ev.iter().enumerate() {
            let theta = (j + 1) as f64 * std::f64::consts::PI / (n + 1) as f64;
            assert!((v - (2.0 - 2.0 * theta.cos())).abs() < 1e-13);
        }
    }
}
