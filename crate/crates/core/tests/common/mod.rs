//! Slow-path oracles shared by the integration suites.
//!
//! Everything here is written deliberately without the library's own linear
//! algebra shortcuts so that agreement between the two paths is evidence, not
//! tautology: the objective is a bare triple loop, the simplex solvers are
//! exhaustive grid searches, the consensus is a per-entry ternary line search,
//! and the generalization bounds are re-evaluated in 1024-bit arithmetic.

#![allow(dead_code)]

use astro_float::{BigFloat, Consts, RoundingMode};
use ndarray::Array2;

/// Grid resolution used by the simplex searches.
pub const GRID_STEP: f64 = 1e-3;

const BITS: usize = 1024;
const RM: RoundingMode = RoundingMode::ToEven;

/// Objective evaluation by bare summation: weighted reconstruction plus
/// consensus disagreement plus manifold smoothness, no matrix products.
#[allow(clippy::too_many_arguments)]
pub fn naive_objective(
    views: &[Array2<f64>],
    basis: &[Array2<f64>],
    coefficients: &[Array2<f64>],
    consensus: &Array2<f64>,
    alpha: &[f64],
    weights: &Array2<f64>,
    laplacians: Option<&[Array2<f64>]>,
    beta: f64,
    p: f64,
) -> f64 {
    let n_v = views.len();
    let mut total = 0.0;
    for s in 0..n_v {
        let x = &views[s];
        let u = &basis[s];
        let v = &coefficients[s];
        let (m, n) = x.dim();
        let k = u.ncols();

        for i in 0..n {
            let w = weights[[i, s]];
            for j in 0..m {
                let mut pred = 0.0;
                for r in 0..k {
                    pred += u[[j, r]] * v[[i, r]];
                }
                let d = w * (x[[j, i]] - pred);
                total += d * d;
            }
        }

        let ap = alpha[s].powf(p);
        for r in 0..k {
            let mut q = 0.0;
            for j in 0..m {
                q += u[[j, r]];
            }
            for i in 0..n {
                let e = v[[i, r]] * q - consensus[[i, r]];
                total += ap * e * e;
            }
        }

        if let Some(laps) = laplacians {
            let l = &laps[s];
            let mut trace = 0.0;
            for r in 0..k {
                for i in 0..n {
                    for j in 0..n {
                        trace += v[[i, r]] * l[[i, j]] * v[[j, r]];
                    }
                }
            }
            total += beta * trace;
        }
    }
    total
}

/// Exhaustive minimization of `Σ_s α_s^p d_s` over the probability simplex
/// with the given grid step. Supports one to three coordinates, which covers
/// both the view-weight subproblem (exponent `p`) and the observation-weight
/// subproblem (exponent 2, distances = squared column residuals).
pub fn grid_search_simplex(d: &[f64], p: f64, step: f64) -> Vec<f64> {
    let eval = |alpha: &[f64]| -> f64 {
        alpha.iter().zip(d).map(|(&a, &di)| a.powf(p) * di).sum()
    };
    let steps = (1.0 / step).round() as usize;
    match d.len() {
        1 => vec![1.0],
        2 => {
            let mut best = (f64::INFINITY, vec![0.0, 1.0]);
            for a in 0..=steps {
                let a0 = a as f64 * step;
                let candidate = [a0, 1.0 - a0];
                let value = eval(&candidate);
                if value < best.0 {
                    best = (value, candidate.to_vec());
                }
            }
            best.1
        }
        3 => {
            let mut best = (f64::INFINITY, vec![0.0, 0.0, 1.0]);
            for a in 0..=steps {
                let a0 = a as f64 * step;
                for b in 0..=(steps - a) {
                    let a1 = b as f64 * step;
                    let candidate = [a0, a1, (1.0 - a0 - a1).max(0.0)];
                    let value = eval(&candidate);
                    if value < best.0 {
                        best = (value, candidate.to_vec());
                    }
                }
            }
            best.1
        }
        n => panic!("grid oracle supports up to 3 coordinates, got {n}"),
    }
}

/// Minimizes the strictly convex `f(t) = Σ_s c_s (m_s − t)²` by ternary
/// search on the bracket spanned by the targets.
pub fn line_search_weighted_mean(targets: &[f64], coeffs: &[f64]) -> f64 {
    let eval = |t: f64| -> f64 {
        targets
            .iter()
            .zip(coeffs)
            .map(|(&m, &c)| c * (m - t) * (m - t))
            .sum()
    };
    let mut lo = targets.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut hi = targets.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    for _ in 0..400 {
        if hi - lo < 1e-15 {
            break;
        }
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if eval(m1) <= eval(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    0.5 * (lo + hi)
}

/// Gradient-free consensus solve: each entry of `V*` minimizes its own
/// weighted quadratic over the targets `V⁽ˢ⁾ Q⁽ˢ⁾` with coefficients `α_s^p`.
pub fn consensus_oracle(
    basis: &[Array2<f64>],
    coefficients: &[Array2<f64>],
    alpha: &[f64],
    p: f64,
) -> Array2<f64> {
    let n_v = basis.len();
    let (n, k) = coefficients[0].dim();
    let coeffs: Vec<f64> = alpha.iter().map(|&a| a.powf(p)).collect();

    let mut q_diags = Vec::with_capacity(n_v);
    for u in basis {
        let mut q = vec![0.0; k];
        for r in 0..k {
            for j in 0..u.nrows() {
                q[r] += u[[j, r]];
            }
        }
        q_diags.push(q);
    }

    Array2::from_shape_fn((n, k), |(i, r)| {
        let targets: Vec<f64> = (0..n_v)
            .map(|s| coefficients[s][[i, r]] * q_diags[s][r])
            .collect();
        line_search_weighted_mean(&targets, &coeffs)
    })
}

/// Inputs for the big-float bound oracle, mirroring the library's coverage:
/// `loss_range` plays the role of the Hoeffding prefactor (default `w*²`).
pub struct BigBoundInputs {
    pub n_obs: usize,
    pub n_features: usize,
    pub k: usize,
    pub w_star: f64,
    pub delta: f64,
    pub loss_range: f64,
}

fn bf(x: f64) -> BigFloat {
    BigFloat::from_f64(x, BITS)
}

fn bf_to_f64(x: &BigFloat) -> f64 {
    format!("{x}").parse::<f64>().expect("big-float renders a parseable decimal")
}

/// 1024-bit evaluation of the dimensionality-dependent bound:
/// `2/N + b · sqrt((MK·ln(4(1+K)√M·K·N·w*²) − ln(δ/2)) / (2N))`.
pub fn big_dim_dependent(inputs: &BigBoundInputs) -> f64 {
    let mut cc = Consts::new().expect("constants cache");
    let n = bf(inputs.n_obs as f64);
    let m = bf(inputs.n_features as f64);
    let k = bf(inputs.k as f64);
    let w_sq = bf(inputs.w_star).mul(&bf(inputs.w_star), BITS, RM);

    let arg = bf(4.0)
        .mul(&bf(1.0 + inputs.k as f64), BITS, RM)
        .mul(&m.sqrt(BITS, RM), BITS, RM)
        .mul(&k, BITS, RM)
        .mul(&n, BITS, RM)
        .mul(&w_sq, BITS, RM);
    let mk = m.mul(&k, BITS, RM);
    let numerator = mk.mul(&arg.ln(BITS, RM, &mut cc), BITS, RM).sub(
        &bf(inputs.delta).div(&bf(2.0), BITS, RM).ln(BITS, RM, &mut cc),
        BITS,
        RM,
    );
    let radicand = numerator.div(&bf(2.0).mul(&n, BITS, RM), BITS, RM);
    let concentration = bf(inputs.loss_range).mul(&radicand.sqrt(BITS, RM), BITS, RM);
    let covering = bf(2.0).div(&n, BITS, RM);
    bf_to_f64(&covering.add(&concentration, BITS, RM))
}

/// 1024-bit evaluation of the dimensionality-independent bound:
/// `w*·(4K + 2K²)·sqrt(π/N) + b · sqrt(ln(1/δ) / (2N))`.
pub fn big_dim_independent(inputs: &BigBoundInputs) -> f64 {
    let mut cc = Consts::new().expect("constants cache");
    let n = bf(inputs.n_obs as f64);
    let kf = inputs.k as f64;

    let rademacher = bf(inputs.w_star)
        .mul(&bf(4.0 * kf + 2.0 * kf * kf), BITS, RM)
        .mul(&cc.pi(BITS, RM).div(&n, BITS, RM).sqrt(BITS, RM), BITS, RM);
    let confidence = bf(inputs.loss_range).mul(
        &bf(1.0)
            .div(&bf(inputs.delta), BITS, RM)
            .ln(BITS, RM, &mut cc)
            .div(&bf(2.0).mul(&n, BITS, RM), BITS, RM)
            .sqrt(BITS, RM),
        BITS,
        RM,
    );
    bf_to_f64(&rademacher.add(&confidence, BITS, RM))
}
