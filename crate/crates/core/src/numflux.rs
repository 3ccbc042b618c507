//! Entropy-satisfying numerical fluxes and the interface entropy bookkeeping
//! built on them.
//!
//! Every flux here is a pair `(G_KL, xi_KL)` of an interface flux and a
//! numerical entropy flux, evaluated for the left state `u`, right state `v`
//! and unit normal `n` pointing from left to right. The auxiliary flux
//!
//! ```text
//! X_KL(u, v) = xi(u) . n + D eta(u) (G_KL(u, v) - f(u) . n)
//! ```
//!
//! bounds `xi_KL` from above, and the gap `X_KL - xi_KL` controls the squared
//! flux defect `|G_KL - f(u) . n|^2`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::systems::SystemModel;

/// Inflation applied to sampled wave speeds for `auto` flux parameters.
pub const WAVE_SPEED_INFLATION: f64 = 1.05;
const WAVE_SPEED_SAMPLES: usize = 4000;
const WAVE_SPEED_SEED: u64 = 0xc0ffee;

/// Absolute tolerance used in interface inequality checks.
pub const INTERFACE_TOL: f64 = 1e-10;

/// `lambda* = 2c` for Rusanov. With `lambda* = c` the interface entropy
/// inequality already fails for linear transport `f(u) = -c u`, which needs
/// `lambda >= (c - a)^2 / (2c)` for a speed `a`.
pub const RUSANOV_LAMBDA_FACTOR: f64 = 2.0;

const GOLDEN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WaveSpeed {
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FluxKind {
    Rusanov { c: f64 },
    GodunovScalar,
}

#[derive(Debug, Clone)]
pub struct FluxScheme {
    pub kind: FluxKind,
    pub system: SystemModel,
    pub lambda_star: f64,
}

/// Sampled sup over the admissible set and unit directions of the directional
/// wave speed (not inflated).
pub fn sampled_wave_speed(sys: &SystemModel, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dirs: Vec<Vec<f64>> = if sys.d() == 1 {
        vec![vec![1.0], vec![-1.0]]
    } else {
        (0..256)
            .map(|k| {
                let t = std::f64::consts::TAU * k as f64 / 256.0;
                vec![t.cos(), t.sin()]
            })
            .collect()
    };
    let mut best: f64 = 0.0;
    let mut visit = |u: &[f64], rng: &mut ChaCha8Rng| {
        for n in &dirs {
            best = best.max(sys.max_wave_speed(u, n));
        }
        if sys.d() == 2 {
            let t = std::f64::consts::TAU * rng.gen::<f64>();
            best = best.max(sys.max_wave_speed(u, &[t.cos(), t.sin()]));
        }
    };
    for u in sys.omega.extreme_points() {
        visit(&u, &mut rng);
    }
    for _ in 0..samples {
        let u = sys.omega.sample(&mut rng);
        visit(&u, &mut rng);
    }
    best
}

pub fn make_rusanov(sys: &SystemModel, speed: WaveSpeed) -> Result<FluxScheme> {
    let sup = sampled_wave_speed(sys, WAVE_SPEED_SAMPLES, WAVE_SPEED_SEED);
    let c = match speed {
        WaveSpeed::Auto => (sup * WAVE_SPEED_INFLATION).max(f64::MIN_POSITIVE),
        WaveSpeed::Fixed(c) => {
            if !(c > 0.0 && c.is_finite()) {
                return Err(Error::Flux(format!("Rusanov speed must be positive, got {c}")));
            }
            if c < sup {
                return Err(Error::Flux(format!(
                    "Rusanov speed {c} is below the sampled wave-speed bound {sup}"
                )));
            }
            c
        }
    };
    Ok(FluxScheme {
        kind: FluxKind::Rusanov { c },
        system: sys.clone(),
        lambda_star: RUSANOV_LAMBDA_FACTOR * c,
    })
}

pub fn make_godunov_scalar(sys: &SystemModel) -> Result<FluxScheme> {
    if sys.m() != 1 {
        return Err(Error::Flux(format!(
            "the Godunov flux is only available for scalar laws ({} has m = {})",
            sys.name(),
            sys.m()
        )));
    }
    let sup = sampled_wave_speed(sys, WAVE_SPEED_SAMPLES, WAVE_SPEED_SEED);
    Ok(FluxScheme {
        kind: FluxKind::GodunovScalar,
        system: sys.clone(),
        lambda_star: (sup * WAVE_SPEED_INFLATION).max(f64::MIN_POSITIVE),
    })
}

impl FluxScheme {
    pub fn name(&self) -> &'static str {
        match self.kind {
            FluxKind::Rusanov { .. } => "rusanov",
            FluxKind::GodunovScalar => "godunov",
        }
    }

    /// `G_KL(u, v)` written into `out`.
    pub fn flux_into(&self, u: &[f64], v: &[f64], n: &[f64], out: &mut [f64]) {
        match self.kind {
            FluxKind::Rusanov { c } => {
                let m = u.len();
                let mut fv = [0.0f64; 8];
                let mut heap;
                let fv: &mut [f64] = if m <= fv.len() {
                    &mut fv[..m]
                } else {
                    heap = vec![0.0; m];
                    &mut heap
                };
                self.system.normal_flux_into(u, n, out);
                self.system.normal_flux_into(v, n, fv);
                for i in 0..m {
                    out[i] = 0.5 * (out[i] + fv[i]) - 0.5 * c * (v[i] - u[i]);
                }
            }
            FluxKind::GodunovScalar => {
                let (_, value) = self.godunov_state(u[0], v[0], n);
                out[0] = value;
            }
        }
    }

    pub fn flux(&self, u: &[f64], v: &[f64], n: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; u.len()];
        self.flux_into(u, v, n, &mut out);
        out
    }

    /// Numerical entropy flux `xi_KL(u, v)`.
    pub fn entropy_flux(&self, u: &[f64], v: &[f64], n: &[f64]) -> f64 {
        match self.kind {
            FluxKind::Rusanov { .. } => {
                let neg: Vec<f64> = n.iter().map(|x| -x).collect();
                0.5 * (self.x_flux_unchecked(u, v, n) - self.x_flux_unchecked(v, u, &neg))
            }
            FluxKind::GodunovScalar => {
                let (w, _) = self.godunov_state(u[0], v[0], n);
                self.system.normal_entropy_flux(&[w], n)
            }
        }
    }

    /// `X_KL(u, v)` without admissibility checks.
    pub fn x_flux_unchecked(&self, u: &[f64], v: &[f64], n: &[f64]) -> f64 {
        let g = self.flux(u, v, n);
        let fu = self.system.normal_flux(u, n);
        let grad = self.system.entropy_gradient(u);
        let lin: f64 = grad.iter().zip(g.iter().zip(&fu)).map(|(d, (a, b))| d * (a - b)).sum();
        self.system.normal_entropy_flux(u, n) + lin
    }

    /// Interface Riemann state and flux for the scalar Godunov scheme:
    /// the minimizer of `f . n` on `[u, v]` when `u <= v`, the maximizer on
    /// `[v, u]` otherwise.
    fn godunov_state(&self, u: f64, v: f64, n: &[f64]) -> (f64, f64) {
        let sys = &self.system;
        let fnorm = |w: f64| {
            let mut out = [0.0];
            sys.normal_flux_into(&[w], n, &mut out);
            out[0]
        };
        if u == v {
            return (u, fnorm(u));
        }
        let sign = if u < v { 1.0 } else { -1.0 };
        let (lo, hi) = if u < v { (u, v) } else { (v, u) };
        let objective = |w: f64| sign * fnorm(w);
        let mut candidates = vec![lo, hi];
        candidates.extend(
            sys.law()
                .scalar_critical_points(n)
                .into_iter()
                .filter(|&w| w > lo && w < hi),
        );
        candidates.push(golden_section_min(&objective, lo, hi));
        let mut best = candidates[0];
        let mut best_val = objective(best);
        for &w in &candidates[1..] {
            let val = objective(w);
            if val < best_val {
                best = w;
                best_val = val;
            }
        }
        (best, sign * best_val)
    }

    fn check(&self, u: &[f64], v: &[f64]) -> Result<()> {
        for s in [u, v] {
            if !self.system.omega_contains(s) {
                return Err(Error::admissibility(s, format!("{} interface state", self.name())));
            }
        }
        Ok(())
    }
}

fn golden_section_min(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let tol = GOLDEN_TOL * (1.0 + lo.abs().max(hi.abs()));
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// `X_KL(u, v) = xi(u) . n + D eta(u) (G(u, v) - f(u) . n)`.
pub fn x_flux(scheme: &FluxScheme, u: &[f64], v: &[f64], n: &[f64]) -> Result<f64> {
    scheme.check(u, v)?;
    Ok(scheme.x_flux_unchecked(u, v, n))
}

fn flux_defect(scheme: &FluxScheme, u: &[f64], v: &[f64], n: &[f64]) -> Vec<f64> {
    let g = scheme.flux(u, v, n);
    let fu = scheme.system.normal_flux(u, n);
    g.iter().zip(&fu).map(|(a, b)| a - b).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DissipationGap {
    pub gap: f64,
    pub lower_bound: f64,
    pub pass: bool,
}

impl DissipationGap {
    pub fn evaluate(gap: f64, beta0: f64, lambda_star: f64, defect_sq: f64) -> DissipationGap {
        let lower_bound = beta0 / (2.0 * lambda_star) * defect_sq;
        DissipationGap {
            gap,
            lower_bound,
            pass: gap >= lower_bound - INTERFACE_TOL * gap.abs().max(1.0),
        }
    }
}

/// `X_KL - xi_KL` against `beta0 / (2 lambda*) |G - f(u) . n|^2`.
pub fn dissipation_gap_check(scheme: &FluxScheme, u: &[f64], v: &[f64], n: &[f64]) -> DissipationGap {
    let gap = scheme.x_flux_unchecked(u, v, n) - scheme.entropy_flux(u, v, n);
    let defect_sq: f64 = flux_defect(scheme, u, v, n).iter().map(|x| x * x).sum();
    DissipationGap::evaluate(gap, scheme.system.beta0, scheme.lambda_star, defect_sq)
}

/// Whether `u - (G(u, v) - f(u) . n) / lambda` lies in the admissible set.
pub fn omega_stability_check(scheme: &FluxScheme, u: &[f64], v: &[f64], n: &[f64], lambda: f64) -> bool {
    let shifted = shifted_state(scheme, u, v, n, lambda);
    scheme.system.omega_contains(&shifted)
}

pub fn shifted_state(scheme: &FluxScheme, u: &[f64], v: &[f64], n: &[f64], lambda: f64) -> Vec<f64> {
    let defect = flux_defect(scheme, u, v, n);
    u.iter().zip(&defect).map(|(a, d)| a - d / lambda).collect()
}

/// Interfacial entropy inequality at `lambda`, with margin `left - right`
/// (nonpositive when it holds exactly).
pub fn bouchut_margin(scheme: &FluxScheme, u: &[f64], v: &[f64], n: &[f64], lambda: f64) -> f64 {
    let sys = &scheme.system;
    let lhs = scheme.entropy_flux(u, v, n) - sys.normal_entropy_flux(u, n);
    let shifted = shifted_state(scheme, u, v, n, lambda);
    let rhs = -lambda * (sys.entropy(&shifted) - sys.entropy(u));
    lhs - rhs
}

pub fn bouchut_check(scheme: &FluxScheme, u: &[f64], v: &[f64], n: &[f64], lambda: f64) -> bool {
    bouchut_margin(scheme, u, v, n, lambda) <= INTERFACE_TOL
}

/// Everything the diagnostics need about one interface at one time level,
/// from the point of view of its `left` cell `K` (right cell `L`).
#[derive(Debug, Clone, PartialEq)]
pub struct InterfaceFluxRecord {
    pub interface: usize,
    pub g_value: Vec<f64>,
    pub xi_value: f64,
    /// `X_KL(u_K, u_L)`.
    pub x_kl: f64,
    /// `X_LK(u_L, u_K)` with normal `-n_KL`.
    pub x_lk: f64,
    /// `f(u_K) . n_KL`.
    pub flux_left: Vec<f64>,
    /// `f(u_L) . n_KL`.
    pub flux_right: Vec<f64>,
    /// `xi(u_K) . n_KL`.
    pub entropy_flux_left: f64,
    /// `xi(u_L) . n_KL`.
    pub entropy_flux_right: f64,
}

impl InterfaceFluxRecord {
    pub fn new(scheme: &FluxScheme, interface: usize, uk: &[f64], ul: &[f64], n: &[f64]) -> Self {
        let sys = &scheme.system;
        let neg: Vec<f64> = n.iter().map(|x| -x).collect();
        InterfaceFluxRecord {
            interface,
            g_value: scheme.flux(uk, ul, n),
            xi_value: scheme.entropy_flux(uk, ul, n),
            x_kl: scheme.x_flux_unchecked(uk, ul, n),
            x_lk: scheme.x_flux_unchecked(ul, uk, &neg),
            flux_left: sys.normal_flux(uk, n),
            flux_right: sys.normal_flux(ul, n),
            entropy_flux_left: sys.normal_entropy_flux(uk, n),
            entropy_flux_right: sys.normal_entropy_flux(ul, n),
        }
    }

    /// `X_KL - xi_KL`.
    pub fn dissipation_gap(&self) -> f64 {
        self.x_kl - self.xi_value
    }

    /// `X_LK - xi_LK = X_LK + xi_KL`.
    pub fn reverse_dissipation_gap(&self) -> f64 {
        self.x_lk + self.xi_value
    }

    /// `|G_KL(u_K, u_L) - f(u_K) . n_KL|`.
    pub fn defect(&self) -> f64 {
        norm_diff(&self.g_value, &self.flux_left)
    }

    /// `|G_LK(u_L, u_K) - f(u_L) . n_LK| = |G_KL - f(u_L) . n_KL|`.
    pub fn reverse_defect(&self) -> f64 {
        norm_diff(&self.g_value, &self.flux_right)
    }

    /// Both orientations of the per-interface dissipation inequality.
    pub fn gap_checks(&self, beta0: f64, lambda_star: f64) -> [DissipationGap; 2] {
        [
            DissipationGap::evaluate(self.dissipation_gap(), beta0, lambda_star, self.defect().powi(2)),
            DissipationGap::evaluate(
                self.reverse_dissipation_gap(),
                beta0,
                lambda_star,
                self.reverse_defect().powi(2),
            ),
        ]
    }
}

fn norm_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Seeded unit normal in dimension `d`.
pub fn random_normal<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<f64> {
    if d == 1 {
        vec![if rng.gen::<bool>() { 1.0 } else { -1.0 }]
    } else {
        let t = std::f64::consts::TAU * rng.gen::<f64>();
        vec![t.cos(), t.sin()]
    }
}
