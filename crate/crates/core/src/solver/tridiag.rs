//! Thomas algorithm and its periodic (cyclic) variant.

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum TridiagError {
    #[error("zero pivot at row {row}")]
    ZeroPivot { row: usize },
    #[error("length mismatch: expected {expected}, got {got}")]
    Length { expected: usize, got: usize },
    #[error("cyclic systems need at least 3 unknowns, got {0}")]
    TooSmall(usize),
}

fn check_len(n: usize, v: &[f64]) -> Result<(), TridiagError> {
    if v.len() != n {
        return Err(TridiagError::Length { expected: n, got: v.len() });
    }
    Ok(())
}

/// Solves `sub[i] x[i-1] + diag[i] x[i] + sup[i] x[i+1] = rhs[i]`.
///
/// `sub[0]` and `sup[n-1]` are ignored.
pub fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Result<Vec<f64>, TridiagError> {
    let n = diag.len();
    for v in [sub, sup, rhs] {
        check_len(n, v)?;
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut beta = diag[0];
    if beta == 0.0 {
        return Err(TridiagError::ZeroPivot { row: 0 });
    }
    c[0] = sup[0] / beta;
    d[0] = rhs[0] / beta;
    for i in 1..n {
        beta = diag[i] - sub[i] * c[i - 1];
        if beta == 0.0 || !beta.is_finite() {
            return Err(TridiagError::ZeroPivot { row: i });
        }
        c[i] = if i + 1 < n { sup[i] / beta } else { 0.0 };
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Ok(d)
}

/// Cyclic system: as [`solve_tridiagonal`] plus `corners.0 * x[n-1]` in
/// row 0 and `corners.1 * x[0]` in row `n-1`.
///
/// Solved with a Sherman-Morrison rank-one correction of two plain solves.
pub fn solve_tridiagonal_cyclic(
    sub: &[f64],
    diag: &[f64],
    sup: &[f64],
    corners: (f64, f64),
    rhs: &[f64],
) -> Result<Vec<f64>, TridiagError> {
    let n = diag.len();
    for v in [sub, sup, rhs] {
        check_len(n, v)?;
    }
    if n < 3 {
        return Err(TridiagError::TooSmall(n));
    }
    let (top_right, bottom_left) = corners;
    let gamma = -diag[0];
    let mut b = diag.to_vec();
    b[0] -= gamma;
    b[n - 1] -= bottom_left * top_right / gamma;
    let x = solve_tridiagonal(sub, &b, sup, rhs)?;
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = bottom_left;
    let z = solve_tridiagonal(sub, &b, sup, &u)?;
    let v_dot = |w: &[f64]| w[0] + top_right * w[n - 1] / gamma;
    let denom = 1.0 + v_dot(&z);
    if denom == 0.0 {
        return Err(TridiagError::ZeroPivot { row: n - 1 });
    }
    let fact = v_dot(&x) / denom;
    Ok(x.iter().zip(&z).map(|(xi, zi)| xi - fact * zi).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Gaussian elimination with partial pivoting on a dense copy.
    #[allow(clippy::needless_range_loop)]
    fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
        let n = b.len();
        for col in 0..n {
            let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
            a.swap(col, piv);
            b.swap(col, piv);
            for r in col + 1..n {
                let f = a[r][col] / a[col][col];
                for c in col..n {
                    a[r][c] -= f * a[col][c];
                }
                b[r] -= f * b[col];
            }
        }
        let mut x = vec![0.0; n];
        for r in (0..n).rev() {
            let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
            x[r] = (b[r] - s) / a[r][r];
        }
        x
    }

    #[test]
    fn identity_returns_rhs() {
        let n = 5;
        let rhs: Vec<f64> = (0..n).map(|i| i as f64 - 1.5).collect();
        let z = vec![0.0; n];
        assert_eq!(solve_tridiagonal(&z, &vec![1.0; n], &z, &rhs).unwrap(), rhs);
        assert_eq!(solve_tridiagonal_cyclic(&z, &vec![1.0; n], &z, (0.0, 0.0), &rhs).unwrap(), rhs);
    }

    #[test]
    fn three_by_three() {
        let x = solve_tridiagonal(&[0.0, -1.0, -1.0], &[2.0; 3], &[-1.0, -1.0, 0.0], &[1.0, 0.0, 1.0]).unwrap();
        for v in x {
            assert!((v - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn random_cyclic_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 64;
        let sub: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let sup: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let diag: Vec<f64> = (0..n).map(|_| 3.0 + rng.gen_range(0.0..1.0)).collect();
        let rhs: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let corners = (sub[0], sup[n - 1]);
        let x = solve_tridiagonal_cyclic(&sub, &diag, &sup, corners, &rhs).unwrap();

        let mut a = vec![vec![0.0; n]; n];
        for i in 0..n {
            a[i][i] = diag[i];
            a[i][(i + n - 1) % n] = sub[i];
            a[i][(i + 1) % n] = sup[i];
        }
        let oracle = dense_solve(a, rhs);
        let norm = oracle.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (a, b) in x.iter().zip(&oracle) {
            assert!((a - b).abs() <= 1e-12 * norm);
        }
    }

    #[test]
    fn singular_is_reported() {
        let z = vec![0.0; 3];
        assert_eq!(
            solve_tridiagonal(&z, &[1.0, 0.0, 1.0], &z, &[1.0; 3]),
            Err(TridiagError::ZeroPivot { row: 1 })
        );
    }
}
