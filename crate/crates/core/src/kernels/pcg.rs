//! Preconditioned conjugate gradient for Hermitian positive definite operators.

use crate::kernels::vector::{axpy, dotc, zeros};
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PcgConfig {
    /// Relative preconditioned residual `sqrt(r^H M r) / sqrt(b^H M b)`.
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for PcgConfig {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iters: 500,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PcgOutcome {
    pub x: Vec<C64>,
    pub iterations: usize,
    pub residual: f64,
}

/// Solves `A x = b` with preconditioner `M`, starting from zero.
///
/// A zero right-hand side returns `x = 0` after zero iterations.
pub fn pcg_solve<A, M>(apply_a: A, apply_m: M, b: &[C64], config: PcgConfig) -> Result<PcgOutcome>
where
    A: Fn(&[C64]) -> Vec<C64>,
    M: Fn(&[C64]) -> Vec<C64>,
{
    let n = b.len();
    let mut x = zeros(n);
    let mut r = b.to_vec();
    let mut z = apply_m(&r);
    let mut rz = dotc(&r, &z).re;
    if rz < 0.0 {
        return Err(Error::Indefinite(format!("preconditioner: r^H M r = {rz:e} at iteration 0")));
    }
    let b_norm = rz.sqrt();
    if b_norm == 0.0 {
        return Ok(PcgOutcome {
            x,
            iterations: 0,
            residual: 0.0,
        });
    }
    let mut p = z.clone();
    let mut residual = 1.0;
    for it in 1..=config.max_iters {
        let ap = apply_a(&p);
        let pap = dotc(&p, &ap).re;
        if pap <= 0.0 {
            return Err(Error::Indefinite(format!("operator: p^H A p = {pap:e} at iteration {it}")));
        }
        let alpha = C64::new(rz / pap, 0.0);
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &ap, &mut r);
        z = apply_m(&r);
        let rz_new = dotc(&r, &z).re;
        if rz_new < 0.0 {
            return Err(Error::Indefinite(format!(
                "preconditioner: r^H M r = {rz_new:e} at iteration {it}"
            )));
        }
        residual = rz_new.sqrt() / b_norm;
        if residual <= config.tol {
            return Ok(PcgOutcome {
                x,
                iterations: it,
                residual,
            });
        }
        let beta = C64::new(rz_new / rz, 0.0);
        for (pi, zi) in p.iter_mut().zip(&z) {
            *pi = zi + beta * *pi;
        }
        rz = rz_new;
    }
    Err(Error::PcgNotConverged {
        iterations: config.max_iters,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_spd(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<C64> {
        let g = DMatrix::from_fn(n, n, |_, _| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        g.adjoint() * &g + DMatrix::identity(n, n) * C64::new(0.5, 0.0)
    }

    fn matvec(a: &DMatrix<C64>, x: &[C64]) -> Vec<C64> {
        (a * nalgebra::DVector::from_column_slice(x)).as_slice().to_vec()
    }

    #[test]
    fn identity_converges_in_one_iteration() {
        let b: Vec<C64> = (0..7).map(|i| C64::new(i as f64, -1.0)).collect();
        let out = pcg_solve(|x| x.to_vec(), |x| x.to_vec(), &b, PcgConfig::default()).unwrap();
        assert_eq!(out.iterations, 1);
        assert!(crate::kernels::vector::max_diff(&out.x, &b) < 1e-14);
    }

    #[test]
    fn exact_preconditioner_one_iteration() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_spd(12, &mut rng);
        let inv = a.clone().try_inverse().unwrap();
        let b: Vec<C64> = (0..12).map(|_| C64::new(rng.random(), rng.random())).collect();
        let out = pcg_solve(|x| matvec(&a, x), |x| matvec(&inv, x), &b, PcgConfig::default()).unwrap();
        assert_eq!(out.iterations, 1);
    }

    #[test]
    fn random_spd_matches_dense_solve() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 100;
        let a = random_spd(n, &mut rng);
        let b: Vec<C64> = (0..n).map(|_| C64::new(rng.random(), rng.random())).collect();
        let cfg = PcgConfig { tol: 1e-12, max_iters: 2 * n };
        let out = pcg_solve(|x| matvec(&a, x), |x| x.to_vec(), &b, cfg).unwrap();
        let exact = a.lu().solve(&nalgebra::DVector::from_column_slice(&b)).unwrap();
        let err = crate::kernels::vector::max_diff(&out.x, exact.as_slice());
        let scale = exact.iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!(err / scale < 1e-9, "err {err}");
        assert!(out.iterations <= 2 * n);
    }

    #[test]
    fn zero_rhs_returns_zero() {
        let out = pcg_solve(|x| x.to_vec(), |x| x.to_vec(), &zeros(4), PcgConfig::default()).unwrap();
        assert_eq!(out.iterations, 0);
        assert!(out.x.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn negative_curvature_is_reported() {
        let b = vec![C64::new(1.0, 0.0); 3];
        let err = pcg_solve(|x| x.iter().map(|v| -v).collect(), |x| x.to_vec(), &b, PcgConfig::default())
            .unwrap_err();
        assert!(matches!(err, Error::Indefinite(msg) if msg.contains("p^H A p")));
    }

    #[test]
    fn iteration_cap_is_reported() {
        let b: Vec<C64> = (0..10).map(|i| C64::new(1.0 + i as f64, 0.0)).collect();
        let diag: Vec<f64> = (0..10).map(|i| 1.0 + 10.0 * i as f64).collect();
        let cfg = PcgConfig { tol: 1e-14, max_iters: 2 };
        let err = pcg_solve(
            |x| x.iter().zip(&diag).map(|(v, d)| v * d).collect(),
            |x| x.to_vec(),
            &b,
            cfg,
        )
        .unwrap_err();
        assert!(matches!(err, Error::PcgNotConverged { iterations: 2, .. }));
    }
}
