//! Small numerical building blocks shared by the geometry modules.

pub mod dd;
pub mod quad;
pub mod series;

use serde::{Deserialize, Serialize};

pub use dd::Dd;
pub use quad::{integrate, Quadrature};

/// A closed interval `[lo, hi]` of reals.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub const fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// Containment with an absolute slack scaled to the interval magnitude.
    pub fn contains_approx(&self, x: f64) -> bool {
        let slack = 1e-12 * (1.0 + self.lo.abs().max(self.hi.abs()));
        self.lo - slack <= x && x <= self.hi + slack
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.contains_approx(other.lo) && self.contains_approx(other.hi)
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn scale(&self, c: f64) -> Interval {
        if c >= 0.0 {
            Interval::new(self.lo * c, self.hi * c)
        } else {
            Interval::new(self.hi * c, self.lo * c)
        }
    }

    pub fn shift(&self, x: f64) -> Interval {
        Interval::new(self.lo + x, self.hi + x)
    }
}

/// `n` equally spaced points from `a` to `b`, both ends included exactly.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => {
            let step = (b - a) / (n - 1) as f64;
            let mut out: Vec<f64> = (0..n).map(|i| a + step * i as f64).collect();
            out[n - 1] = b;
            out
        }
    }
}

/// Finite-difference weights for derivatives `0..=m` at `z` from samples at
/// the nodes `x` (Fornberg's recursion). `w[k][j]` multiplies the sample at
/// `x[j]` in the estimate of the `k`-th derivative.
pub fn fd_weights(z: f64, x: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut c = vec![vec![0.0; n]; m + 1];
    if n == 0 {
        return c;
    }
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Volume of the unit round sphere `S^d ⊂ R^{d+1}`.
pub fn unit_sphere_volume(d: usize) -> f64 {
    use std::f64::consts::PI;
    // ω_0 = 2, ω_1 = 2π, ω_d = 2π/(d-1) · ω_{d-2}
    let (mut even, mut odd) = (2.0, 2.0 * PI);
    if d == 0 {
        return even;
    }
    if d == 1 {
        return odd;
    }
    for k in 2..=d {
        if k % 2 == 0 {
            even *= 2.0 * PI / (k as f64 - 1.0);
        } else {
            odd *= 2.0 * PI / (k as f64 - 1.0);
        }
    }
    if d.is_multiple_of(2) {
        even
    } else {
        odd
    }
}
