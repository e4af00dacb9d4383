//! Forward differences on a row-major image.
//!
//! `(D₁x)[i,j] = x[i+1,j] − x[i,j]` and `(D₂x)[i,j] = x[i,j+1] − x[i,j]`,
//! with the last row of `D₁x` and the last column of `D₂x` set to zero.
//! The stacked output is `[D₁x ; D₂x]`, each block row-major.

/// `out = [D₁x; D₂x]`, `out.len() == 2·rows·cols`.
pub fn forward_difference(x: &[f64], rows: usize, cols: usize, out: &mut [f64]) {
    let n = rows * cols;
    let (d1, d2) = out.split_at_mut(n);
    for i in 0..rows {
        for j in 0..cols {
            let p = i * cols + j;
            d1[p] = if i + 1 < rows { x[p + cols] - x[p] } else { 0.0 };
            d2[p] = if j + 1 < cols { x[p + 1] - x[p] } else { 0.0 };
        }
    }
}

/// `out = D₁ᵀu₁ + D₂ᵀu₂` (a negative discrete divergence).
pub fn forward_difference_adjoint(u: &[f64], rows: usize, cols: usize, out: &mut [f64]) {
    let n = rows * cols;
    let (u1, u2) = u.split_at(n);
    for i in 0..rows {
        for j in 0..cols {
            let p = i * cols + j;
            let mut v = 0.0;
            if i + 1 < rows {
                v -= u1[p];
            }
            if i > 0 {
                v += u1[p - cols];
            }
            if j + 1 < cols {
                v -= u2[p];
            }
            if j > 0 {
                v += u2[p - 1];
            }
            out[p] = v;
        }
    }
}
