//! Adaptive Gauss–Kronrod (7/15) quadrature.

use crate::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_DEPTH: u32 = 48;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub evals: usize,
}

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let pair = f(c - dx) + f(c + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Integrate `f` over `[a, b]` to `max(abs_tol, rel_tol·|I|)`.
///
/// Subintervals are bisected recursively; each half inherits half the
/// absolute budget. Fails if the recursion depth limit is hit without
/// meeting the tolerance.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<Quadrature> {
    if a == b {
        return Ok(Quadrature {
            value: 0.0,
            error: 0.0,
            evals: 0,
        });
    }
    let (whole, err) = gk15(&mut f, a, b);
    let mut evals = 15;
    let budget = abs_tol.max(rel_tol * whole.abs());
    if err <= budget || !err.is_finite() && !whole.is_finite() {
        return finish(whole, err, evals);
    }
    let (value, error) = refine(&mut f, a, b, whole, budget, 0, &mut evals)?;
    finish(value, error, evals)
}

fn finish(value: f64, error: f64, evals: usize) -> Result<Quadrature> {
    if value.is_finite() {
        Ok(Quadrature {
            value,
            error,
            evals,
        })
    } else {
        Err(Error::Construction(format!(
            "quadrature produced a non-finite value ({value})"
        )))
    }
}

fn refine<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    _estimate: f64,
    budget: f64,
    depth: u32,
    evals: &mut usize,
) -> Result<(f64, f64)> {
    let m = 0.5 * (a + b);
    let (left, el) = gk15(f, a, m);
    let (right, er) = gk15(f, m, b);
    *evals += 30;
    let total = left + right;
    let err = el + er;
    if err <= budget {
        return Ok((total, err));
    }
    if depth >= MAX_DEPTH {
        return Err(Error::Construction(format!(
            "quadrature did not converge on [{a}, {b}] (error {err:e}, budget {budget:e})"
        )));
    }
    let (l, el) = refine(f, a, m, left, 0.5 * budget, depth + 1, evals)?;
    let (r, er) = refine(f, m, b, right, 0.5 * budget, depth + 1, evals)?;
    Ok((l + r, el + er))
}
