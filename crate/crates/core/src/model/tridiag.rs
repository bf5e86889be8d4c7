use std::ops::{Div, Mul, Sub};

/// Solve a symmetric tridiagonal system `(diag, off)` by the Thomas algorithm.
/// `off[j]` couples unknowns `j` and `j + 1`. No pivoting: callers pass
/// diagonally dominant or definite systems.
pub fn solve_symmetric<T>(diag: &[T], off: &[T], rhs: &[T]) -> Vec<T>
where
    T: Copy + Sub<Output = T> + Mul<Output = T> + Div<Output = T>,
{
    let n = diag.len();
    assert!(off.len() + 1 == n && rhs.len() == n, "tridiagonal shape mismatch");
    let mut c = Vec::with_capacity(n);
    let mut d = Vec::with_capacity(n);
    let mut denom = diag[0];
    if n > 1 {
        c.push(off[0] / denom);
    }
    d.push(rhs[0] / denom);
    for j in 1..n {
        denom = diag[j] - off[j - 1] * c[j - 1];
        if j + 1 < n {
            c.push(off[j] / denom);
        }
        d.push((rhs[j] - off[j - 1] * d[j - 1]) / denom);
    }
    let mut x = d;
    for j in (0..n - 1).rev() {
        let next = x[j + 1];
        x[j] = x[j] - c[j] * next;
    }
    x
}
