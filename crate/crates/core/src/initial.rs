//! Catalog of smooth periodic initial data.

use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InitialCondition {
    Constant {
        value: Vec<f64>,
    },
    /// `u_i(x) = mean_i + amplitude_i sin(2 pi k . x + phase_i)`.
    Sine {
        mean: Vec<f64>,
        amplitude: Vec<f64>,
        wavenumber: Vec<f64>,
        phase: Vec<f64>,
    },
    /// `u_i(x) = base_i + amplitude_i exp(-|x - center|^2 / (2 width^2))`,
    /// distance taken as the periodic minimum image.
    GaussianBump {
        base: Vec<f64>,
        amplitude: Vec<f64>,
        center: Vec<f64>,
        width: f64,
        domain: Vec<f64>,
    },
    /// Water column `h = depth + amplitude sin(2 pi k x)` moving with a
    /// uniform velocity.
    ShallowWaterSmoothWave {
        depth: f64,
        amplitude: f64,
        velocity: f64,
        wavenumber: f64,
    },
}

impl InitialCondition {
    pub fn name(&self) -> &'static str {
        match self {
            InitialCondition::Constant { .. } => "constant",
            InitialCondition::Sine { .. } => "sine",
            InitialCondition::GaussianBump { .. } => "gaussian-bump",
            InitialCondition::ShallowWaterSmoothWave { .. } => "shallow-water-smooth-wave",
        }
    }

    pub fn n_vars(&self) -> usize {
        match self {
            InitialCondition::Constant { value } => value.len(),
            InitialCondition::Sine { mean, .. } => mean.len(),
            InitialCondition::GaussianBump { base, .. } => base.len(),
            InitialCondition::ShallowWaterSmoothWave { .. } => 2,
        }
    }

    /// Checks parameter shapes against `m` unknowns in dimension `d` and
    /// periodicity on `domain`.
    pub fn validate(&self, m: usize, domain: &[f64]) -> Result<()> {
        let d = domain.len();
        let bad = |msg: String| Err(Error::Config(format!("initial data {}: {msg}", self.name())));
        if self.n_vars() != m {
            return bad(format!("has {} components, the system needs {m}", self.n_vars()));
        }
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        match self {
            InitialCondition::Constant { value } => {
                if !finite(value) {
                    return bad("non-finite value".into());
                }
            }
            InitialCondition::Sine {
                mean,
                amplitude,
                wavenumber,
                phase,
            } => {
                if amplitude.len() != m || phase.len() != m || wavenumber.len() != d {
                    return bad(format!(
                        "expected {m} amplitudes and phases and {d} wavenumbers"
                    ));
                }
                if !(finite(mean) && finite(amplitude) && finite(wavenumber) && finite(phase)) {
                    return bad("non-finite parameter".into());
                }
                for (k, l) in wavenumber.iter().zip(domain) {
                    let periods = k * l;
                    if (periods - periods.round()).abs() > 1e-9 {
                        return bad(format!("wavenumber {k} is not periodic on length {l}"));
                    }
                }
            }
            InitialCondition::GaussianBump {
                base,
                amplitude,
                center,
                width,
                domain: own,
            } => {
                if amplitude.len() != m || center.len() != d || own.len() != d {
                    return bad(format!("expected {m} amplitudes and a {d}-dimensional center"));
                }
                if !(*width > 0.0) || !(finite(base) && finite(amplitude) && finite(center)) {
                    return bad("width must be positive and parameters finite".into());
                }
                if own != domain {
                    return bad("bump domain differs from the mesh domain".into());
                }
            }
            InitialCondition::ShallowWaterSmoothWave {
                depth,
                amplitude,
                wavenumber,
                velocity,
            } => {
                if d != 1 {
                    return bad("defined in one dimension only".into());
                }
                if !(depth - amplitude.abs() > 0.0) || !velocity.is_finite() {
                    return bad("depth must exceed the amplitude".into());
                }
                let periods = wavenumber * domain[0];
                if (periods - periods.round()).abs() > 1e-9 {
                    return bad(format!("wavenumber {wavenumber} is not periodic"));
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        match self {
            InitialCondition::Constant { value } => value.clone(),
            InitialCondition::Sine {
                mean,
                amplitude,
                wavenumber,
                phase,
            } => {
                let arg = TAU * dot(wavenumber, x);
                mean.iter()
                    .zip(amplitude)
                    .zip(phase)
                    .map(|((m, a), p)| m + a * (arg + p).sin())
                    .collect()
            }
            InitialCondition::GaussianBump {
                base,
                amplitude,
                center,
                width,
                domain,
            } => {
                let g = (-min_image_sq(x, center, domain) / (2.0 * width * width)).exp();
                base.iter().zip(amplitude).map(|(b, a)| b + a * g).collect()
            }
            InitialCondition::ShallowWaterSmoothWave {
                depth,
                amplitude,
                velocity,
                wavenumber,
            } => {
                let h = depth + amplitude * (TAU * wavenumber * x[0]).sin();
                vec![h, h * velocity]
            }
        }
    }

    /// Spatial Jacobian `du_i/dx_alpha`, row-major `m x d`.
    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let d = x.len();
        match self {
            InitialCondition::Constant { value } => vec![0.0; value.len() * d],
            InitialCondition::Sine {
                amplitude,
                wavenumber,
                phase,
                ..
            } => {
                let arg = TAU * dot(wavenumber, x);
                let mut out = Vec::with_capacity(amplitude.len() * d);
                for (a, p) in amplitude.iter().zip(phase) {
                    let c = a * (arg + p).cos() * TAU;
                    out.extend(wavenumber.iter().map(|k| c * k));
                }
                out
            }
            InitialCondition::GaussianBump {
                amplitude,
                center,
                width,
                domain,
                ..
            } => {
                let r: Vec<f64> = x
                    .iter()
                    .zip(center)
                    .zip(domain)
                    .map(|((xi, ci), l)| wrap(xi - ci, *l))
                    .collect();
                let g = (-r.iter().map(|v| v * v).sum::<f64>() / (2.0 * width * width)).exp();
                let mut out = Vec::with_capacity(amplitude.len() * d);
                for a in amplitude {
                    out.extend(r.iter().map(|ri| -a * g * ri / (width * width)));
                }
                out
            }
            InitialCondition::ShallowWaterSmoothWave {
                amplitude,
                velocity,
                wavenumber,
                ..
            } => {
                let dh = amplitude * TAU * wavenumber * (TAU * wavenumber * x[0]).cos();
                vec![dh, dh * velocity]
            }
        }
    }

    /// Bound on `sup |grad u_i|` over components and space.
    pub fn lipschitz_bound(&self) -> f64 {
        match self {
            InitialCondition::Constant { .. } => 0.0,
            InitialCondition::Sine {
                amplitude,
                wavenumber,
                ..
            } => max_abs(amplitude) * TAU * norm(wavenumber),
            InitialCondition::GaussianBump { amplitude, width, .. } => {
                // sup of r exp(-r^2 / 2w^2) / w^2 is exp(-1/2) / w
                max_abs(amplitude) * (-0.5f64).exp() / width
            }
            InitialCondition::ShallowWaterSmoothWave {
                amplitude,
                velocity,
                wavenumber,
                ..
            } => amplitude.abs() * TAU * wavenumber.abs() * velocity.abs().max(1.0),
        }
    }

    /// Componentwise range of the data.
    pub fn range(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            InitialCondition::Constant { value } => (value.clone(), value.clone()),
            InitialCondition::Sine { mean, amplitude, .. } => (
                mean.iter().zip(amplitude).map(|(m, a)| m - a.abs()).collect(),
                mean.iter().zip(amplitude).map(|(m, a)| m + a.abs()).collect(),
            ),
            InitialCondition::GaussianBump { base, amplitude, .. } => (
                base.iter().zip(amplitude).map(|(b, a)| b + a.min(0.0)).collect(),
                base.iter().zip(amplitude).map(|(b, a)| b + a.max(0.0)).collect(),
            ),
            InitialCondition::ShallowWaterSmoothWave {
                depth,
                amplitude,
                velocity,
                ..
            } => {
                let (hl, hh) = (depth - amplitude.abs(), depth + amplitude.abs());
                let (q1, q2) = (hl * velocity, hh * velocity);
                (vec![hl, q1.min(q2)], vec![hh, q1.max(q2)])
            }
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn wrap(dx: f64, l: f64) -> f64 {
    dx - l * (dx / l).round()
}

fn min_image_sq(x: &[f64], c: &[f64], domain: &[f64]) -> f64 {
    x.iter()
        .zip(c)
        .zip(domain)
        .map(|((xi, ci), l)| wrap(xi - ci, *l).powi(2))
        .sum()
}
