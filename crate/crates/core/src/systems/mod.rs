//! Conservation-law systems, their entropy pairs, and relative-entropy calculus.

mod admissible;
mod laws;

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use admissible::{AdmissibleSet, RiemannInvariantBox};
pub use laws::{Advection, Burgers, Friedrichs, ShallowWater1d};

use crate::error::{Error, Result};

/// Inflation factor applied to sampled constants before they enter inequalities.
pub const SAMPLING_INFLATION: f64 = 1.01;

const DEFAULT_CONSTANT_SAMPLES: usize = 4000;
const DEFAULT_CONSTANT_SEED: u64 = 0x5eed;

/// A hyperbolic system `d_t u + sum_alpha d_alpha f_alpha(u) = 0` together with a
/// uniformly convex entropy `eta` and its flux `xi`.
pub trait ConservationLaw: Send + Sync + std::fmt::Debug {
    fn name(&self) -> &'static str;
    fn n_vars(&self) -> usize;
    fn dim(&self) -> usize;
    fn flux(&self, u: &[f64], alpha: usize, out: &mut [f64]);
    fn flux_jacobian(&self, u: &[f64], alpha: usize) -> DMatrix<f64>;
    fn entropy(&self, u: &[f64]) -> f64;
    fn entropy_gradient(&self, u: &[f64], out: &mut [f64]);
    fn entropy_hessian(&self, u: &[f64]) -> DMatrix<f64>;
    fn entropy_flux(&self, u: &[f64], alpha: usize) -> f64;

    /// Spectral radius of `sum_alpha n_alpha Df_alpha(u)`.
    ///
    /// The default symmetrizes the directional Jacobian with the entropy
    /// Hessian, which makes it self-adjoint.
    fn max_wave_speed(&self, u: &[f64], n: &[f64]) -> f64 {
        let m = self.n_vars();
        let mut jac = DMatrix::zeros(m, m);
        for (alpha, nx) in n.iter().enumerate() {
            jac += self.flux_jacobian(u, alpha) * *nx;
        }
        let chol = match self.entropy_hessian(u).cholesky() {
            Some(c) => c,
            None => return f64::NAN,
        };
        let l = chol.l();
        let lt_inv = l.transpose().try_inverse().unwrap_or_else(|| DMatrix::zeros(m, m));
        let sym = l.transpose() * jac * lt_inv;
        let sym = (&sym + sym.transpose()) * 0.5;
        sym.symmetric_eigenvalues().amax()
    }

    /// Roots of `w -> (f(w) . n)'` for scalar laws, when known in closed form.
    fn scalar_critical_points(&self, _n: &[f64]) -> Vec<f64> {
        Vec::new()
    }
}

/// A conservation law bound to its admissible set and the constants the
/// scheme needs: entropy Hessian bounds `beta0 <= beta1`, the propagation
/// speed `lf`, and the quadratic-remainder constant `c_z`.
#[derive(Debug, Clone)]
pub struct SystemModel {
    law: Arc<dyn ConservationLaw>,
    pub omega: AdmissibleSet,
    pub beta0: f64,
    pub beta1: f64,
    pub lf: f64,
    pub c_z: f64,
}

impl SystemModel {
    /// Binds `law` to `omega` and estimates `beta0`, `beta1`, `lf` and `c_z`
    /// by seeded sampling of `omega` plus its extreme points.
    pub fn new(law: Arc<dyn ConservationLaw>, omega: AdmissibleSet) -> Result<SystemModel> {
        if omega.n_vars() != law.n_vars() {
            return Err(Error::System(format!(
                "admissible set has {} variables, law {} has {}",
                omega.n_vars(),
                law.name(),
                law.n_vars()
            )));
        }
        let mut sys = SystemModel {
            law,
            omega,
            beta0: 0.0,
            beta1: 0.0,
            lf: 0.0,
            c_z: 0.0,
        };
        let states = sys.sample_states(DEFAULT_CONSTANT_SAMPLES, DEFAULT_CONSTANT_SEED);
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for u in &states {
            let ev = sys.law.entropy_hessian(u).symmetric_eigenvalues();
            lo = lo.min(ev.min());
            hi = hi.max(ev.max());
        }
        if !(lo > 0.0) || !hi.is_finite() {
            return Err(Error::System(format!(
                "entropy Hessian of {} is not positive definite on the admissible set (min eigenvalue {lo})",
                sys.name()
            )));
        }
        // a constant Hessian leaves nothing for sampling to miss
        if hi - lo <= 1e-12 * hi {
            sys.beta0 = lo;
            sys.beta1 = hi;
        } else {
            sys.beta0 = lo / SAMPLING_INFLATION;
            sys.beta1 = hi * SAMPLING_INFLATION;
        }
        sys.compute_lf(DEFAULT_CONSTANT_SAMPLES, DEFAULT_CONSTANT_SEED);
        sys.c_z = 0.5 * sys.beta1 * sys.flux_curvature_bound(&states) * SAMPLING_INFLATION;
        Ok(sys)
    }

    pub fn law(&self) -> &dyn ConservationLaw {
        self.law.as_ref()
    }

    pub fn name(&self) -> &'static str {
        self.law.name()
    }

    pub fn m(&self) -> usize {
        self.law.n_vars()
    }

    pub fn d(&self) -> usize {
        self.law.dim()
    }

    pub fn flux(&self, u: &[f64], alpha: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.m()];
        self.law.flux(u, alpha, &mut out);
        out
    }

    /// `f(u) . n` written into `out`.
    pub fn normal_flux_into(&self, u: &[f64], n: &[f64], out: &mut [f64]) {
        let m = self.m();
        out.iter_mut().for_each(|x| *x = 0.0);
        let mut tmp = [0.0f64; 8];
        let mut heap;
        let buf: &mut [f64] = if m <= tmp.len() {
            &mut tmp[..m]
        } else {
            heap = vec![0.0; m];
            &mut heap
        };
        for (alpha, &na) in n.iter().enumerate() {
            if na == 0.0 {
                continue;
            }
            self.law.flux(u, alpha, buf);
            for (o, f) in out.iter_mut().zip(buf.iter()) {
                *o += f * na;
            }
        }
    }

    pub fn normal_flux(&self, u: &[f64], n: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.m()];
        self.normal_flux_into(u, n, &mut out);
        out
    }

    pub fn entropy(&self, u: &[f64]) -> f64 {
        self.law.entropy(u)
    }

    pub fn entropy_gradient(&self, u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.m()];
        self.law.entropy_gradient(u, &mut out);
        out
    }

    pub fn entropy_hessian(&self, u: &[f64]) -> DMatrix<f64> {
        self.law.entropy_hessian(u)
    }

    pub fn entropy_flux(&self, u: &[f64], alpha: usize) -> f64 {
        self.law.entropy_flux(u, alpha)
    }

    /// `xi(u) . n`.
    pub fn normal_entropy_flux(&self, u: &[f64], n: &[f64]) -> f64 {
        n.iter()
            .enumerate()
            .filter(|(_, &na)| na != 0.0)
            .map(|(alpha, &na)| self.law.entropy_flux(u, alpha) * na)
            .sum()
    }

    pub fn flux_jacobian(&self, u: &[f64], alpha: usize) -> DMatrix<f64> {
        self.law.flux_jacobian(u, alpha)
    }

    pub fn max_wave_speed(&self, u: &[f64], n: &[f64]) -> f64 {
        self.law.max_wave_speed(u, n)
    }

    pub fn omega_contains(&self, u: &[f64]) -> bool {
        self.omega.contains(u)
    }

    fn check(&self, u: &[f64], what: &str) -> Result<()> {
        if self.omega_contains(u) {
            Ok(())
        } else {
            Err(Error::admissibility(u, format!("{what} for {}", self.name())))
        }
    }

    /// `H(v, u) = eta(v) - eta(u) - D eta(u) (v - u)`.
    pub fn relative_entropy(&self, v: &[f64], u: &[f64]) -> Result<f64> {
        self.check(v, "relative entropy argument v")?;
        self.check(u, "relative entropy argument u")?;
        Ok(self.relative_entropy_unchecked(v, u))
    }

    pub(crate) fn relative_entropy_unchecked(&self, v: &[f64], u: &[f64]) -> f64 {
        let grad = self.entropy_gradient(u);
        let lin: f64 = grad.iter().zip(v.iter().zip(u)).map(|(g, (a, b))| g * (a - b)).sum();
        self.entropy(v) - self.entropy(u) - lin
    }

    /// `Q_alpha(v, u) = xi_alpha(v) - xi_alpha(u) - D eta(u) (f_alpha(v) - f_alpha(u))`.
    pub fn relative_entropy_flux(&self, v: &[f64], u: &[f64], alpha: usize) -> Result<f64> {
        self.check(v, "relative entropy flux argument v")?;
        self.check(u, "relative entropy flux argument u")?;
        let grad = self.entropy_gradient(u);
        let fv = self.flux(v, alpha);
        let fu = self.flux(u, alpha);
        let lin: f64 = grad.iter().zip(fv.iter().zip(&fu)).map(|(g, (a, b))| g * (a - b)).sum();
        Ok(self.entropy_flux(v, alpha) - self.entropy_flux(u, alpha) - lin)
    }

    /// `Z_alpha(v, u) = D^2 eta(u) (f_alpha(v) - f_alpha(u) - Df_alpha(u)(v - u))`.
    pub fn relative_z(&self, v: &[f64], u: &[f64], alpha: usize) -> Result<Vec<f64>> {
        self.check(v, "relative flux remainder argument v")?;
        self.check(u, "relative flux remainder argument u")?;
        let m = self.m();
        let fv = self.flux(v, alpha);
        let fu = self.flux(u, alpha);
        let jac = self.flux_jacobian(u, alpha);
        let hess = self.entropy_hessian(u);
        let rem: Vec<f64> = (0..m)
            .map(|i| fv[i] - fu[i] - (0..m).map(|j| jac[(i, j)] * (v[j] - u[j])).sum::<f64>())
            .collect();
        Ok((0..m).map(|i| (0..m).map(|j| hess[(i, j)] * rem[j]).sum()).collect())
    }

    /// Sampled sup of the entropy-weighted Rayleigh quotient
    /// `|w^T D^2 eta(v) Df_alpha(u) w| / (w^T D^2 eta(v) w)`; stored as `self.lf`.
    pub fn compute_lf(&mut self, samples: usize, seed: u64) -> f64 {
        let corners = self.omega.extreme_points();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x1f);
        let mut best: f64 = 0.0;
        let d = self.d();
        let mut eval = |u: &[f64], v: &[f64]| {
            for alpha in 0..d {
                best = best.max(self.rayleigh_sup(u, v, alpha));
            }
        };
        for u in &corners {
            for v in &corners {
                eval(u, v);
            }
        }
        for _ in 0..samples {
            let u = self.omega.sample(&mut rng);
            let v = self.omega.sample(&mut rng);
            eval(&u, &v);
            eval(&u, &u);
        }
        self.lf = best;
        best
    }

    fn rayleigh_sup(&self, u: &[f64], v: &[f64], alpha: usize) -> f64 {
        let hess = self.entropy_hessian(v);
        let prod = &hess * self.flux_jacobian(u, alpha);
        if self.m() == 1 {
            return (prod[(0, 0)] / hess[(0, 0)]).abs();
        }
        let sym = (&prod + prod.transpose()) * 0.5;
        let Some(chol) = hess.cholesky() else {
            return f64::INFINITY;
        };
        let l_inv = chol.l().try_inverse().expect("Cholesky factor is invertible");
        let c = &l_inv * sym * l_inv.transpose();
        let c = (&c + c.transpose()) * 0.5;
        c.symmetric_eigenvalues().amax()
    }

    /// Sampled sup over states and directions of the Frobenius norm of the
    /// flux Hessian tensor, from central differences of the Jacobian.
    fn flux_curvature_bound(&self, states: &[Vec<f64>]) -> f64 {
        let m = self.m();
        let mut best: f64 = 0.0;
        for u in states {
            let scale = u.iter().fold(1.0f64, |s, x| s.max(x.abs()));
            let eps = 1e-5 * scale;
            for alpha in 0..self.d() {
                let mut fro = 0.0;
                for k in 0..m {
                    let mut up = u.clone();
                    let mut dn = u.clone();
                    up[k] += eps;
                    dn[k] -= eps;
                    let diff = (self.flux_jacobian(&up, alpha) - self.flux_jacobian(&dn, alpha)) / (2.0 * eps);
                    fro += diff.norm_squared();
                }
                best = best.max(fro.sqrt());
            }
        }
        best
    }

    /// Extreme points of the admissible set followed by `n` seeded samples.
    pub fn sample_states(&self, n: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = self.omega.extreme_points();
        out.extend((0..n).map(|_| self.omega.sample(&mut rng)));
        out
    }
}

pub fn make_advection(velocity: Vec<f64>, omega: AdmissibleSet) -> Result<SystemModel> {
    if velocity.is_empty() || velocity.len() > 2 {
        return Err(Error::System(format!("advection needs 1 or 2 velocity components, got {}", velocity.len())));
    }
    SystemModel::new(Arc::new(Advection { velocity }), omega)
}

pub fn make_burgers(omega: AdmissibleSet) -> Result<SystemModel> {
    SystemModel::new(Arc::new(Burgers), omega)
}

/// Friedrichs system from one symmetric matrix per direction. The admissible
/// set, when not given, is a box in characteristic coordinates of `A_1`
/// (bounds `[-bound, bound]`), which the Rusanov update preserves in 1D.
pub fn make_friedrichs(matrices: Vec<DMatrix<f64>>, omega: AdmissibleSet) -> Result<SystemModel> {
    if matrices.is_empty() {
        return Err(Error::System("Friedrichs system needs at least one matrix".into()));
    }
    let m = matrices[0].nrows();
    for (alpha, a) in matrices.iter().enumerate() {
        if a.nrows() != m || a.ncols() != m {
            return Err(Error::System(format!("matrix {alpha} is not {m}x{m}")));
        }
        let asym = (a - a.transpose()).amax();
        if asym > 1e-14 * a.amax().max(1.0) {
            return Err(Error::System(format!("matrix {alpha} is not symmetric (asymmetry {asym:e})")));
        }
    }
    SystemModel::new(Arc::new(Friedrichs { matrices }), omega)
}

/// Characteristic box adapted to a symmetric 1D Friedrichs matrix: bounds
/// `[lo_i, hi_i]` on the coordinates along each eigenvector.
pub fn friedrichs_characteristic_box(a: &DMatrix<f64>, lower: Vec<f64>, upper: Vec<f64>) -> AdmissibleSet {
    let (_, r) = sorted_symmetric_eigen(a);
    let basis = (0..a.nrows()).map(|j| r.column(j).iter().copied().collect()).collect();
    AdmissibleSet::CharacteristicBox { basis, lower, upper }
}

/// Eigen-decomposition `A = R diag(lambda) R^T` with eigenvalues ascending and
/// a deterministic sign convention (largest component of each column positive).
pub fn sorted_symmetric_eigen(a: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = a.clone().symmetric_eigen();
    let m = a.nrows();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let mut r = DMatrix::zeros(m, m);
    let mut lambda = Vec::with_capacity(m);
    for (c, &k) in order.iter().enumerate() {
        let col = eig.eigenvectors.column(k);
        let pivot = col.iter().copied().fold(0.0f64, |p, x| if x.abs() > p.abs() { x } else { p });
        let sign = if pivot < 0.0 { -1.0 } else { 1.0 };
        for i in 0..m {
            r[(i, c)] = sign * col[i];
        }
        lambda.push(eig.eigenvalues[k]);
    }
    (lambda, r)
}

pub fn make_shallow_water_1d(gravity: f64, h_min: f64, h_max: f64, q_max: f64) -> Result<SystemModel> {
    if !(gravity > 0.0) || !(h_min > 0.0) || !(h_max > h_min) || !(q_max >= 0.0) {
        return Err(Error::System(format!(
            "invalid shallow-water parameters g={gravity}, h in [{h_min}, {h_max}], |q| <= {q_max}"
        )));
    }
    let omega = AdmissibleSet::Positivity { h_min, h_max, q_max };
    // eta = q^2/(2h) + g h^2/2 is already nonnegative for h > 0, so no shift
    // is needed for the normalization eta >= 0 on the closure of the set.
    let probe = ShallowWater1d { gravity, entropy_shift: 0.0 };
    let shift = omega
        .extreme_points()
        .iter()
        .map(|u| probe.entropy(u))
        .fold(f64::INFINITY, f64::min)
        .min(0.0);
    SystemModel::new(Arc::new(ShallowWater1d { gravity, entropy_shift: shift }), omega)
}
