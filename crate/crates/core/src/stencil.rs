//! Finite-difference weights and the one-sided boundary stencils.

/// Fornberg's algorithm: weights w such that Σ w_k f(xs[k]) ≈ f^{(m)}(z).
pub fn fd_weights(z: f64, xs: &[f64], m: usize) -> Vec<f64> {
    let n = xs.len();
    assert!(n > m, "need more than {m} points for derivative order {m}");
    // c[i][k]: weight of point i for derivative k
    let mut c = vec![vec![0.0; m + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = xs[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - z;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] *= c4 / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[m]).collect()
}

/// Index-space weights for f^{(m)} at integer offset `at` using points 0..n.
pub fn index_weights(at: f64, n: usize, m: usize) -> Vec<f64> {
    let xs: Vec<f64> = (0..n).map(|k| k as f64).collect();
    fd_weights(at, &xs, m)
}

/// (-3 f0 + 4 f1 - f2) / 2: second-order one-sided first difference (unit spacing).
pub const ONE_SIDED_D1: [f64; 3] = [-1.5, 2.0, -0.5];
/// (2 f0 - 5 f1 + 4 f2 - f3): second-order one-sided second difference (unit spacing).
pub const ONE_SIDED_D2: [f64; 4] = [2.0, -5.0, 4.0, -1.0];

/// Physical ∂_x of nodal samples: centered in the interior, second-order
/// one-sided at both ends. `sign` converts index order to x order.
pub fn derivative<T>(values: &[T], h: f64, sign: f64) -> Vec<T>
where
    T: Copy + std::ops::Add<Output = T> + std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T>,
{
    let n = values.len();
    let s = sign / h;
    let mut out = Vec::with_capacity(n);
    out.push((values[0] * ONE_SIDED_D1[0] + values[1] * ONE_SIDED_D1[1] + values[2] * ONE_SIDED_D1[2]) * s);
    for j in 1..n - 1 {
        out.push((values[j + 1] - values[j - 1]) * (0.5 * s));
    }
    out.push(
        (values[n - 1] * ONE_SIDED_D1[0] + values[n - 2] * ONE_SIDED_D1[1] + values[n - 3] * ONE_SIDED_D1[2]) * (-s),
    );
    out
}
