use super::Mat;

const MAX_SWEEPS: usize = 60;

/// Singular values in descending order (one-sided Jacobi on the columns).
///
/// One-sided Jacobi keeps small singular values accurate relative to the
/// column scaling, which the `AᵀA` eigenvalue route does not.
pub fn singular_values(a: &Mat) -> Vec<f64> {
    let w = if a.rows() >= a.cols() { a.transpose() } else { a.clone() };
    // rows of `w` are the columns being orthogonalized
    let (n, m) = w.shape();
    let mut cols: Vec<Vec<f64>> = (0..n).map(|i| w.row(i).to_vec()).collect();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
                for (x, y) in cols[p].iter().zip(&cols[q]) {
                    alpha += x * x;
                    beta += y * y;
                    gamma += x * y;
                }
                if gamma == 0.0 || gamma.abs() <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (left, right) = cols.split_at_mut(q);
                let (cp, cq) = (&mut left[p], &mut right[0]);
                for k in 0..m {
                    let x = cp[k];
                    let y = cq[k];
                    cp[k] = c * x - s * y;
                    cq[k] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = cols.iter().map(|c| c.iter().map(|x| x * x).sum::<f64>().sqrt()).collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    sv
}

pub fn min_singular_value(a: &Mat) -> f64 {
    singular_values(a).last().copied().unwrap_or(0.0)
}

/// 2-norm condition number; `inf` for a numerically singular matrix.
pub fn cond(a: &Mat) -> f64 {
    let sv = singular_values(a);
    match (sv.first(), sv.last()) {
        (Some(&max), Some(&min)) if min > 0.0 => max / min,
        (Some(_), Some(_)) => f64::INFINITY,
        _ => 1.0,
    }
}
