//! Truncated power series in one variable, stored as coefficient vectors
//! `[c0, c1, c2, …]` for `Σ c_k x^k`.

pub fn mul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| {
            (0..=k)
                .filter(|&j| j < a.len() && k - j < b.len())
                .map(|j| a[j] * b[k - j])
                .sum()
        })
        .collect()
}

/// `a / b`, requires `b[0] != 0`.
pub fn div(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut q = vec![0.0; n];
    for k in 0..n {
        let mut acc = a.get(k).copied().unwrap_or(0.0);
        for j in 1..=k.min(b.len().saturating_sub(1)) {
            acc -= b[j] * q[k - j];
        }
        q[k] = acc / b[0];
    }
    q
}

/// `u^p` for real `p`, requires `u[0] > 0`.
pub fn powf(u: &[f64], p: f64, n: usize) -> Vec<f64> {
    let mut w = vec![0.0; n];
    if n == 0 {
        return w;
    }
    w[0] = u[0].powf(p);
    for k in 1..n {
        let mut acc = 0.0;
        for j in 1..=k.min(u.len().saturating_sub(1)) {
            acc += (p * j as f64 - (k - j) as f64) * u[j] * w[k - j];
        }
        w[k] = acc / (k as f64 * u[0]);
    }
    w
}

pub fn derivative(a: &[f64]) -> Vec<f64> {
    a.iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| k as f64 * c)
        .collect()
}

/// Value, first and second derivative of the series at `x`.
pub fn eval3(a: &[f64], x: f64) -> (f64, f64, f64) {
    let (mut v, mut d1, mut d2) = (0.0, 0.0, 0.0);
    for (k, &c) in a.iter().enumerate().rev() {
        let kf = k as f64;
        v = v * x + c;
        if k >= 1 {
            d1 = d1 * x + kf * c;
        }
        if k >= 2 {
            d2 = d2 * x + kf * (kf - 1.0) * c;
        }
    }
    (v, d1, d2)
}
