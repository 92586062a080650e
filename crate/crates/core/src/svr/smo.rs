//! SMO solver for the epsilon-SVR dual.
//!
//! The dual is expressed over 2n box variables `u = (alpha, alpha*)` with
//! signs `s = (+1..., -1...)`:
//!
//! ```text
//! minimize   1/2 * sum_kl s_k s_l u_k u_l K(x_k, x_l) + sum_k (eps - s_k y_k) u_k
//! subject to sum_k s_k u_k = 0,   0 <= u_k <= C
//! ```
//!
//! Each iteration picks the maximal-violating pair (largest KKT gap between
//! the up- and down-feasible sets), solves the two-variable subproblem along
//! the equality constraint analytically, and clips to the box. Terminates
//! when the gap drops below `tol`.

use super::Kernel;

pub(super) struct Solution {
    /// `beta_i = alpha_i - alpha_i*` per training point.
    pub beta: Vec<f64>,
    pub bias: f64,
    #[allow(dead_code)]
    pub iterations: usize,
}

const MAX_ITER: usize = 500_000;

pub(super) fn solve(
    points: &[[f64; super::SVR_FEATURES]],
    targets: &[f64],
    kernel: &Kernel,
    c: f64,
    eps: f64,
    tol: f64,
) -> Solution {
    let n = points.len();
    let mut km = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let k = kernel.apply(&points[i], &points[j]);
            km[i * n + j] = k;
            km[j * n + i] = k;
        }
    }
    let kij = |a: usize, b: usize| km[a * n + b];

    let m = 2 * n;
    let sign = |k: usize| if k < n { 1.0 } else { -1.0 };
    let pt = |k: usize| k % n;

    let mut u = vec![0.0f64; m];
    // gradient of the objective; starts at the linear term
    let mut grad: Vec<f64> = (0..m).map(|k| eps - sign(k) * targets[pt(k)]).collect();

    let in_up = |k: usize, u: &[f64]| {
        if sign(k) > 0.0 {
            u[k] < c
        } else {
            u[k] > 0.0
        }
    };
    let in_low = |k: usize, u: &[f64]| {
        if sign(k) > 0.0 {
            u[k] > 0.0
        } else {
            u[k] < c
        }
    };

    let mut iterations = 0;
    loop {
        // maximal violating pair
        let mut up_val = f64::NEG_INFINITY;
        let mut low_val = f64::INFINITY;
        let mut i = usize::MAX;
        let mut j = usize::MAX;
        for k in 0..m {
            let v = -sign(k) * grad[k];
            if in_up(k, &u) && v > up_val {
                up_val = v;
                i = k;
            }
            if in_low(k, &u) && v < low_val {
                low_val = v;
                j = k;
            }
        }
        if i == usize::MAX || j == usize::MAX || up_val - low_val <= tol {
            break;
        }
        if iterations >= MAX_ITER {
            log::warn!("svr smo hit the iteration cap with gap {}", up_val - low_val);
            break;
        }
        iterations += 1;

        let (pi, pj) = (pt(i), pt(j));
        let sij = sign(i) * sign(j);
        let quad = (kij(pi, pi) + kij(pj, pj) - 2.0 * kij(pi, pj)).max(1e-12);
        let mut d = -(grad[i] - sij * grad[j]) / quad;

        // box constraints for u_i + d and u_j - sij * d
        let mut lo = -u[i];
        let mut hi = c - u[i];
        if sij > 0.0 {
            lo = lo.max(u[j] - c);
            hi = hi.min(u[j]);
        } else {
            lo = lo.max(-u[j]);
            hi = hi.min(c - u[j]);
        }
        d = d.clamp(lo, hi);
        if d.abs() < 1e-16 {
            break;
        }
        u[i] += d;
        u[j] -= sij * d;

        let si_d = sign(i) * d;
        for k in 0..m {
            grad[k] += sign(k) * si_d * (kij(pt(k), pi) - kij(pt(k), pj));
        }
    }

    // bias from the free variables, midpoint of the KKT bounds otherwise
    let mut free_sum = 0.0;
    let mut free_count = 0usize;
    let band = 1e-8 * c;
    for k in 0..m {
        if u[k] > band && u[k] < c - band {
            free_sum += -sign(k) * grad[k];
            free_count += 1;
        }
    }
    let bias = if free_count > 0 {
        free_sum / free_count as f64
    } else {
        let mut up_val = f64::NEG_INFINITY;
        let mut low_val = f64::INFINITY;
        for k in 0..m {
            let v = -sign(k) * grad[k];
            if in_up(k, &u) {
                up_val = up_val.max(v);
            }
            if in_low(k, &u) {
                low_val = low_val.min(v);
            }
        }
        (up_val + low_val) / 2.0
    };

    let beta = (0..n).map(|i| u[i] - u[n + i]).collect();
    Solution {
        beta,
        bias,
        iterations,
    }
}
