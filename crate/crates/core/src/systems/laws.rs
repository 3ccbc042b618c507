//! Built-in conservation laws with analytic derivatives.

use nalgebra::DMatrix;

use super::ConservationLaw;

/// Linear transport `f_alpha(u) = c_alpha u`, entropy `u^2 / 2`.
#[derive(Debug, Clone)]
pub struct Advection {
    pub velocity: Vec<f64>,
}

impl ConservationLaw for Advection {
    fn name(&self) -> &'static str {
        "advection"
    }
    fn n_vars(&self) -> usize {
        1
    }
    fn dim(&self) -> usize {
        self.velocity.len()
    }
    fn flux(&self, u: &[f64], alpha: usize, out: &mut [f64]) {
        out[0] = self.velocity[alpha] * u[0];
    }
    fn flux_jacobian(&self, _u: &[f64], alpha: usize) -> DMatrix<f64> {
        DMatrix::from_element(1, 1, self.velocity[alpha])
    }
    fn entropy(&self, u: &[f64]) -> f64 {
        0.5 * u[0] * u[0]
    }
    fn entropy_gradient(&self, u: &[f64], out: &mut [f64]) {
        out[0] = u[0];
    }
    fn entropy_hessian(&self, _u: &[f64]) -> DMatrix<f64> {
        DMatrix::from_element(1, 1, 1.0)
    }
    fn entropy_flux(&self, u: &[f64], alpha: usize) -> f64 {
        0.5 * self.velocity[alpha] * u[0] * u[0]
    }
    fn max_wave_speed(&self, _u: &[f64], n: &[f64]) -> f64 {
        self.velocity.iter().zip(n).map(|(c, n)| c * n).sum::<f64>().abs()
    }
}

/// Inviscid Burgers `f(u) = u^2 / 2` with entropy pair `(u^2/2, u^3/3)`.
#[derive(Debug, Clone)]
pub struct Burgers;

impl ConservationLaw for Burgers {
    fn name(&self) -> &'static str {
        "burgers"
    }
    fn n_vars(&self) -> usize {
        1
    }
    fn dim(&self) -> usize {
        1
    }
    fn flux(&self, u: &[f64], _alpha: usize, out: &mut [f64]) {
        out[0] = 0.5 * u[0] * u[0];
    }
    fn flux_jacobian(&self, u: &[f64], _alpha: usize) -> DMatrix<f64> {
        DMatrix::from_element(1, 1, u[0])
    }
    fn entropy(&self, u: &[f64]) -> f64 {
        0.5 * u[0] * u[0]
    }
    fn entropy_gradient(&self, u: &[f64], out: &mut [f64]) {
        out[0] = u[0];
    }
    fn entropy_hessian(&self, _u: &[f64]) -> DMatrix<f64> {
        DMatrix::from_element(1, 1, 1.0)
    }
    fn entropy_flux(&self, u: &[f64], _alpha: usize) -> f64 {
        u[0] * u[0] * u[0] / 3.0
    }
    fn max_wave_speed(&self, u: &[f64], n: &[f64]) -> f64 {
        (u[0] * n[0]).abs()
    }
    fn scalar_critical_points(&self, _n: &[f64]) -> Vec<f64> {
        vec![0.0]
    }
}

/// Symmetric linear system `f_alpha(u) = A_alpha u`, entropy `|u|^2`,
/// entropy flux `u^T A_alpha u`.
#[derive(Debug, Clone)]
pub struct Friedrichs {
    pub matrices: Vec<DMatrix<f64>>,
}

impl ConservationLaw for Friedrichs {
    fn name(&self) -> &'static str {
        "friedrichs"
    }
    fn n_vars(&self) -> usize {
        self.matrices[0].nrows()
    }
    fn dim(&self) -> usize {
        self.matrices.len()
    }
    fn flux(&self, u: &[f64], alpha: usize, out: &mut [f64]) {
        let a = &self.matrices[alpha];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..u.len()).map(|j| a[(i, j)] * u[j]).sum();
        }
    }
    fn flux_jacobian(&self, _u: &[f64], alpha: usize) -> DMatrix<f64> {
        self.matrices[alpha].clone()
    }
    fn entropy(&self, u: &[f64]) -> f64 {
        u.iter().map(|x| x * x).sum()
    }
    fn entropy_gradient(&self, u: &[f64], out: &mut [f64]) {
        for (o, x) in out.iter_mut().zip(u) {
            *o = 2.0 * x;
        }
    }
    fn entropy_hessian(&self, u: &[f64]) -> DMatrix<f64> {
        DMatrix::identity(u.len(), u.len()) * 2.0
    }
    fn entropy_flux(&self, u: &[f64], alpha: usize) -> f64 {
        let a = &self.matrices[alpha];
        let m = u.len();
        let mut s = 0.0;
        for i in 0..m {
            for j in 0..m {
                s += u[i] * a[(i, j)] * u[j];
            }
        }
        s
    }
    fn max_wave_speed(&self, _u: &[f64], n: &[f64]) -> f64 {
        let m = self.n_vars();
        let mut an = DMatrix::zeros(m, m);
        for (a, nx) in self.matrices.iter().zip(n) {
            an += a * *nx;
        }
        an.symmetric_eigenvalues().amax()
    }
}

/// One-dimensional shallow water in `(h, q)` with entropy
/// `q^2/(2h) + g h^2/2 - shift` and entropy flux `(q^2/(2h) + g h^2) q/h`.
#[derive(Debug, Clone)]
pub struct ShallowWater1d {
    pub gravity: f64,
    pub entropy_shift: f64,
}

impl ConservationLaw for ShallowWater1d {
    fn name(&self) -> &'static str {
        "shallow_water_1d"
    }
    fn n_vars(&self) -> usize {
        2
    }
    fn dim(&self) -> usize {
        1
    }
    fn flux(&self, u: &[f64], _alpha: usize, out: &mut [f64]) {
        let (h, q) = (u[0], u[1]);
        out[0] = q;
        out[1] = q * q / h + 0.5 * self.gravity * h * h;
    }
    fn flux_jacobian(&self, u: &[f64], _alpha: usize) -> DMatrix<f64> {
        let (h, q) = (u[0], u[1]);
        let v = q / h;
        DMatrix::from_row_slice(2, 2, &[0.0, 1.0, self.gravity * h - v * v, 2.0 * v])
    }
    fn entropy(&self, u: &[f64]) -> f64 {
        let (h, q) = (u[0], u[1]);
        q * q / (2.0 * h) + 0.5 * self.gravity * h * h - self.entropy_shift
    }
    fn entropy_gradient(&self, u: &[f64], out: &mut [f64]) {
        let (h, q) = (u[0], u[1]);
        let v = q / h;
        out[0] = -0.5 * v * v + self.gravity * h;
        out[1] = v;
    }
    fn entropy_hessian(&self, u: &[f64]) -> DMatrix<f64> {
        let (h, q) = (u[0], u[1]);
        DMatrix::from_row_slice(
            2,
            2,
            &[q * q / (h * h * h) + self.gravity, -q / (h * h), -q / (h * h), 1.0 / h],
        )
    }
    fn entropy_flux(&self, u: &[f64], _alpha: usize) -> f64 {
        let (h, q) = (u[0], u[1]);
        (q * q / (2.0 * h) + self.gravity * h * h) * (q / h)
    }
    fn max_wave_speed(&self, u: &[f64], n: &[f64]) -> f64 {
        ((u[1] / u[0]).abs() + (self.gravity * u[0]).sqrt()) * n[0].abs()
    }
}
