//! Restarted GMRES with modified Gram-Schmidt orthogonalization.

use crate::kernels::vector::{axpy, dotc, norm2, sub, zeros};
use crate::C64;

/// Loss of orthogonality that triggers a second Gram-Schmidt pass.
pub const REORTHOGONALIZATION_THRESHOLD: f64 = 1e-8;

/// Relative residual reduction below which a restart cycle counts as stagnated.
pub const STAGNATION_THRESHOLD: f64 = 1e-14;

const BREAKDOWN: f64 = 1e-16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmresConfig {
    pub restart: usize,
    /// Relative residual `|b - A x| / |b|`.
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for GmresConfig {
    fn default() -> Self {
        Self {
            restart: 20,
            tol: 1e-8,
            max_iters: 1000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GmresStatus {
    Converged,
    MaxIterations,
    Stagnated,
}

#[derive(Debug, Clone)]
pub struct GmresOutcome {
    pub x: Vec<C64>,
    pub iterations: usize,
    /// Relative residual estimates, starting with the initial residual.
    pub residual_history: Vec<f64>,
    /// Iteration indices at which a restart cycle began.
    pub cycle_starts: Vec<usize>,
    pub status: GmresStatus,
}

/// Callback receiving the iteration number and the current iterate.
pub type Observer<'a> = &'a mut dyn FnMut(usize, &[C64]);

/// Givens rotation zeroing `b` in `(a, b)`.
fn givens(a: C64, b: C64) -> (f64, C64, C64) {
    if a.norm() == 0.0 {
        return (0.0, C64::new(1.0, 0.0), b);
    }
    let t = a.norm().hypot(b.norm());
    let phase = a / a.norm();
    (a.norm() / t, phase * b.conj() / t, phase * t)
}

fn apply_givens(c: f64, s: C64, x: C64, y: C64) -> (C64, C64) {
    (x * c + s * y, -s.conj() * x + y * c)
}

/// Back substitution on the rotated Hessenberg factor.
fn solve_upper(h: &[Vec<C64>], g: &[C64], k: usize) -> Vec<C64> {
    let mut y = vec![C64::new(0.0, 0.0); k];
    for i in (0..k).rev() {
        let mut s = g[i];
        for j in i + 1..k {
            s -= h[j][i] * y[j];
        }
        y[i] = s / h[i][i];
    }
    y
}

/// Solves `A x = b` from `x0` (zero if `None`).
///
/// `observer`, when given, receives the iteration number and the current
/// iterate after every inner iteration.
pub fn gmres_solve<A>(
    apply: A,
    b: &[C64],
    x0: Option<&[C64]>,
    config: GmresConfig,
    mut observer: Option<Observer<'_>>,
) -> GmresOutcome
where
    A: Fn(&[C64]) -> Vec<C64>,
{
    let n = b.len();
    let restart = config.restart.max(1);
    let mut x = x0.map(|v| v.to_vec()).unwrap_or_else(|| zeros(n));
    let b_norm = norm2(b);
    if b_norm == 0.0 {
        return GmresOutcome {
            x: zeros(n),
            iterations: 0,
            residual_history: vec![0.0],
            cycle_starts: vec![0],
            status: GmresStatus::Converged,
        };
    }
    let mut history = Vec::new();
    let mut cycle_starts = Vec::new();
    let mut total = 0usize;

    loop {
        let r = sub(b, &apply(&x));
        let beta = norm2(&r);
        let rel = beta / b_norm;
        if history.is_empty() {
            history.push(rel);
        }
        if rel <= config.tol {
            return finish(x, total, history, cycle_starts, GmresStatus::Converged);
        }
        if total >= config.max_iters {
            return finish(x, total, history, cycle_starts, GmresStatus::MaxIterations);
        }
        cycle_starts.push(total);

        let mut basis: Vec<Vec<C64>> = Vec::with_capacity(restart + 1);
        basis.push(r.iter().map(|v| v / beta).collect());
        // column j of the Hessenberg matrix is h[j][0..=j+1]
        let mut h: Vec<Vec<C64>> = Vec::with_capacity(restart);
        let mut rotations: Vec<(f64, C64)> = Vec::with_capacity(restart);
        let mut g = vec![C64::new(0.0, 0.0); restart + 1];
        g[0] = C64::new(beta, 0.0);
        let mut kdim = 0;
        let mut estimate = rel;

        for k in 0..restart {
            let mut w = apply(&basis[k]);
            total += 1;
            let mut col = vec![C64::new(0.0, 0.0); k + 2];
            for (i, v) in basis.iter().enumerate() {
                let hij = dotc(v, &w);
                axpy(-hij, v, &mut w);
                col[i] += hij;
            }
            let mut w_norm = norm2(&w);
            if w_norm > 0.0 {
                let loss = basis
                    .iter()
                    .map(|v| dotc(v, &w).norm())
                    .fold(0.0, f64::max)
                    / w_norm;
                if loss > REORTHOGONALIZATION_THRESHOLD {
                    for (i, v) in basis.iter().enumerate() {
                        let hij = dotc(v, &w);
                        axpy(-hij, v, &mut w);
                        col[i] += hij;
                    }
                    w_norm = norm2(&w);
                }
            }
            col[k + 1] = C64::new(w_norm, 0.0);
            for (i, &(c, s)) in rotations.iter().enumerate() {
                let (a, bb) = apply_givens(c, s, col[i], col[i + 1]);
                col[i] = a;
                col[i + 1] = bb;
            }
            let (c, s, rr) = givens(col[k], col[k + 1]);
            col[k] = rr;
            col[k + 1] = C64::new(0.0, 0.0);
            rotations.push((c, s));
            let (gk, gk1) = apply_givens(c, s, g[k], g[k + 1]);
            g[k] = gk;
            g[k + 1] = gk1;
            h.push(col);
            kdim = k + 1;
            estimate = g[k + 1].norm() / b_norm;
            history.push(estimate);

            if let Some(obs) = observer.as_deref_mut() {
                let y = solve_upper(&h, &g, kdim);
                let mut xk = x.clone();
                for (yj, v) in y.iter().zip(&basis) {
                    axpy(*yj, v, &mut xk);
                }
                obs(total, &xk);
            }

            let breakdown = w_norm <= BREAKDOWN * b_norm;
            if breakdown || estimate <= config.tol || total >= config.max_iters {
                break;
            }
            basis.push(w.iter().map(|v| v / w_norm).collect());
        }

        let y = solve_upper(&h, &g, kdim);
        for (yj, v) in y.iter().zip(&basis) {
            axpy(*yj, v, &mut x);
        }
        if estimate > config.tol && kdim == restart && rel - estimate <= STAGNATION_THRESHOLD * rel {
            return finish(x, total, history, cycle_starts, GmresStatus::Stagnated);
        }
    }
}

fn finish(
    x: Vec<C64>,
    iterations: usize,
    residual_history: Vec<f64>,
    cycle_starts: Vec<usize>,
    status: GmresStatus,
) -> GmresOutcome {
    GmresOutcome {
        x,
        iterations,
        residual_history,
        cycle_starts,
        status,
    }
}
