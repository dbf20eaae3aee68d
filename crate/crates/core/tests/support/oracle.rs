//! Reference eigensolver used only by tests. Eigenvalues come from bisection on
//! the Sturm sequence of the characteristic polynomial of a Householder
//! tridiagonal form; eigenvectors from inverse iteration on the original matrix.
//! It shares no code with the Jacobi solver it checks.

#![allow(dead_code)]

/// Householder reduction to tridiagonal form: returns (diagonal, off-diagonal).
pub fn tridiagonalize(a: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    for k in 0..n.saturating_sub(2) {
        let alpha_norm: f64 = (k + 1..n).map(|i| m[i][k] * m[i][k]).sum::<f64>().sqrt();
        if alpha_norm == 0.0 {
            continue;
        }
        let alpha = if m[k + 1][k] > 0.0 { -alpha_norm } else { alpha_norm };
        let mut v = vec![0.0; n];
        v[k + 1] = m[k + 1][k] - alpha;
        for i in k + 2..n {
            v[i] = m[i][k];
        }
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        // M <- H M H with H = I - 2 v v' / (v'v)
        let mut mv = vec![0.0; n];
        for i in 0..n {
            mv[i] = (0..n).map(|j| m[i][j] * v[j]).sum();
        }
        let vmv: f64 = (0..n).map(|i| v[i] * mv[i]).sum();
        let beta = 2.0 / vnorm2;
        for i in 0..n {
            for j in 0..n {
                m[i][j] += -beta * v[i] * mv[j] - beta * mv[i] * v[j] + beta * beta * vmv * v[i] * v[j];
            }
        }
    }
    let d = (0..n).map(|i| m[i][i]).collect();
    let e = (0..n.saturating_sub(1)).map(|i| m[i + 1][i]).collect();
    (d, e)
}

/// Number of eigenvalues of the tridiagonal matrix strictly below `x`.
fn sturm_count(d: &[f64], e: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut p = 1.0;
    for i in 0..d.len() {
        let off = if i == 0 { 0.0 } else { e[i - 1] * e[i - 1] };
        p = d[i] - x - if i == 0 { 0.0 } else { off / p };
        if p == 0.0 {
            p = -f64::EPSILON * (d[i].abs() + x.abs() + 1.0);
        }
        if p < 0.0 {
            count += 1;
        }
    }
    count
}

/// Eigenvalues in descending order.
pub fn eigenvalues(a: &[Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    let (d, e) = tridiagonalize(a);
    let bound = (0..n)
        .map(|i| {
            d[i].abs()
                + if i > 0 { e[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { e[i].abs() } else { 0.0 }
        })
        .fold(0.0, f64::max)
        + 1.0;
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        // k-th smallest: smallest x with count(x) > k
        let (mut lo, mut hi) = (-bound, bound);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid == lo || mid == hi {
                break;
            }
            if sturm_count(&d, &e, mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        out.push(0.5 * (lo + hi));
    }
    out.reverse();
    out
}

fn solve(mut m: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        m.swap(col, piv);
        b.swap(col, piv);
        if m[col][col] == 0.0 {
            m[col][col] = 1e-300;
        }
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            for c in col..n {
                m[r][c] -= f * m[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| m[i][j] * x[j]).sum();
        x[i] = (b[i] - s) / m[i][i];
    }
    x
}

/// Unit eigenvector for an (isolated) eigenvalue by inverse iteration.
pub fn eigenvector(a: &[Vec<f64>], lambda: f64) -> Vec<f64> {
    let n = a.len();
    let scale = a.iter().flatten().map(|x| x.abs()).fold(0.0, f64::max).max(1.0);
    let shift = lambda + 1e-10 * scale;
    let shifted: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| a[i][j] - if i == j { shift } else { 0.0 }).collect())
        .collect();
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * i as f64).collect();
    for _ in 0..6 {
        x = solve(shifted.clone(), x);
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        x.iter_mut().for_each(|v| *v /= norm);
    }
    x
}
