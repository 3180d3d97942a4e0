//! Tiny dense linear algebra for systems of size at most 3x3.

/// Solves `a x = b` in place by Gaussian elimination with partial pivoting.
///
/// Returns `None` when a pivot falls below `pivot_tol` times the largest
/// absolute entry of the original matrix.
pub(crate) fn solve<const N: usize>(
    mut a: [[f64; N]; N],
    mut b: [f64; N],
    n: usize,
    pivot_tol: f64,
) -> Option<[f64; N]> {
    let scale = a
        .iter()
        .take(n)
        .flat_map(|row| row.iter().take(n))
        .fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return if n == 0 { Some(b) } else { None };
    }
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if a[pivot_row][col].abs() <= pivot_tol * scale {
            return None;
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; N];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

/// Determinant of the leading `n x n` block.
pub(crate) fn det<const N: usize>(mut a: [[f64; N]; N], n: usize) -> f64 {
    let mut det = 1.0;
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if a[pivot_row][col] == 0.0 {
            return 0.0;
        }
        if pivot_row != col {
            a.swap(col, pivot_row);
            det = -det;
        }
        det *= a[col][col];
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
        }
    }
    det
}
