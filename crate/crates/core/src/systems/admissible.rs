use rand::Rng;
use serde::{Deserialize, Serialize};

/// Convex bounded set of admissible states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AdmissibleSet {
    /// `lower[i] <= u[i] <= upper[i]`.
    Box { lower: Vec<f64>, upper: Vec<f64> },
    /// Box in characteristic coordinates `w = R^T u`, with `R` orthogonal and
    /// stored column by column.
    CharacteristicBox {
        basis: Vec<Vec<f64>>,
        lower: Vec<f64>,
        upper: Vec<f64>,
    },
    /// Water column `(h, q)`: `h_min <= h <= h_max`, `|q| <= q_max`.
    Positivity { h_min: f64, h_max: f64, q_max: f64 },
}

const MEMBERSHIP_TOL: f64 = 1e-12;

impl AdmissibleSet {
    /// Box spanning `[min, max]` per variable, widened on each side by 5% of
    /// the range (or of `max(|value|, 1)` for a degenerate range).
    pub fn from_data_range(min: &[f64], max: &[f64]) -> AdmissibleSet {
        let (lower, upper) = min
            .iter()
            .zip(max)
            .map(|(&lo, &hi)| {
                let width = hi - lo;
                let pad = if width > 0.0 {
                    0.05 * width
                } else {
                    0.05 * lo.abs().max(hi.abs()).max(1.0)
                };
                (lo - pad, hi + pad)
            })
            .unzip();
        AdmissibleSet::Box { lower, upper }
    }

    pub fn n_vars(&self) -> usize {
        match self {
            AdmissibleSet::Box { lower, .. } | AdmissibleSet::CharacteristicBox { lower, .. } => {
                lower.len()
            }
            AdmissibleSet::Positivity { .. } => 2,
        }
    }

    fn coords(&self, u: &[f64]) -> Vec<f64> {
        match self {
            AdmissibleSet::CharacteristicBox { basis, .. } => basis
                .iter()
                .map(|r| r.iter().zip(u).map(|(a, b)| a * b).sum())
                .collect(),
            _ => u.to_vec(),
        }
    }

    pub fn contains(&self, u: &[f64]) -> bool {
        if u.len() != self.n_vars() || u.iter().any(|x| !x.is_finite()) {
            return false;
        }
        let within = |x: f64, lo: f64, hi: f64| {
            let tol = MEMBERSHIP_TOL * lo.abs().max(hi.abs()).max(1.0);
            x >= lo - tol && x <= hi + tol
        };
        match self {
            AdmissibleSet::Box { lower, upper } | AdmissibleSet::CharacteristicBox { lower, upper, .. } => {
                self.coords(u)
                    .iter()
                    .zip(lower.iter().zip(upper))
                    .all(|(&w, (&lo, &hi))| within(w, lo, hi))
            }
            AdmissibleSet::Positivity { h_min, h_max, q_max } => {
                within(u[0], *h_min, *h_max) && within(u[1], -q_max, *q_max)
            }
        }
    }

    fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            AdmissibleSet::Box { lower, upper } | AdmissibleSet::CharacteristicBox { lower, upper, .. } => {
                (lower.clone(), upper.clone())
            }
            AdmissibleSet::Positivity { h_min, h_max, q_max } => {
                (vec![*h_min, -q_max], vec![*h_max, *q_max])
            }
        }
    }

    fn to_state(&self, w: Vec<f64>) -> Vec<f64> {
        match self {
            AdmissibleSet::CharacteristicBox { basis, .. } => {
                let m = w.len();
                (0..m)
                    .map(|i| basis.iter().zip(&w).map(|(col, wj)| col[i] * wj).sum())
                    .collect()
            }
            _ => w,
        }
    }

    /// Uniform sample of the set.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let (lo, hi) = self.bounds();
        let w = lo
            .iter()
            .zip(&hi)
            .map(|(&a, &b)| a + (b - a) * rng.gen::<f64>())
            .collect();
        self.to_state(w)
    }

    /// Vertices of the set (all `2^m` box corners).
    pub fn extreme_points(&self) -> Vec<Vec<f64>> {
        let (lo, hi) = self.bounds();
        let m = lo.len();
        (0..1usize << m)
            .map(|mask| {
                let w = (0..m)
                    .map(|i| if mask >> i & 1 == 1 { hi[i] } else { lo[i] })
                    .collect();
                self.to_state(w)
            })
            .collect()
    }
}

/// Shallow-water states whose Riemann invariants `w1 = q/h - 2 sqrt(g h)` and
/// `w2 = q/h + 2 sqrt(g h)` lie in `[-b, -a] x [a, b]`.
///
/// Every state of a Riemann problem between two members satisfies
/// `w1 >= -b`, `w2 <= b` and `w2(left) - w1(right) >= 2a`, so the Riemann
/// fan stays in `h >= (a/2)^2/g`, `h <= (b/2)^2/g`, `|q/h| <= b - a`.
/// Rusanov averages of member pairs then stay in any positivity set built
/// by [`RiemannInvariantBox::inscribed`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiemannInvariantBox {
    pub gravity: f64,
    pub a: f64,
    pub b: f64,
}

impl RiemannInvariantBox {
    /// Largest box (in `b`) whose Riemann fans fit in
    /// `{h_min <= h <= h_max, |q| <= q_max}`.
    pub fn inscribed(gravity: f64, h_min: f64, h_max: f64, q_max: f64) -> Option<RiemannInvariantBox> {
        if !(gravity > 0.0 && h_min > 0.0 && h_max > h_min && q_max > 0.0) {
            return None;
        }
        let a = 2.0 * (gravity * h_min).sqrt();
        let fits = |b: f64| Self::discharge_bound(gravity, a, b) <= q_max;
        let (mut lo, mut hi) = (a, 2.0 * (gravity * h_max).sqrt());
        if !fits(lo * (1.0 + 1e-9)) {
            return None;
        }
        if !fits(hi) {
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if fits(mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            hi = lo;
        }
        Some(RiemannInvariantBox { gravity, a, b: hi })
    }

    /// Sup of `|q| = h |v|` over `h in [(a/2)^2/g, (b/2)^2/g]`,
    /// `|v| <= b - 2 sqrt(g h)`.
    fn discharge_bound(g: f64, a: f64, b: f64) -> f64 {
        let s = (b / 3.0).clamp(a / 2.0, b / 2.0);
        s * s / g * (b - 2.0 * s)
    }

    pub fn contains(&self, u: &[f64]) -> bool {
        let (h, q) = (u[0], u[1]);
        if !(h > 0.0) || !q.is_finite() {
            return false;
        }
        let c = 2.0 * (self.gravity * h).sqrt();
        let (w1, w2) = (q / h - c, q / h + c);
        let tol = 1e-12 * self.b;
        w1 >= -self.b - tol && w1 <= -self.a + tol && w2 >= self.a - tol && w2 <= self.b + tol
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let w1 = -self.b + (self.b - self.a) * rng.gen::<f64>();
        let w2 = self.a + (self.b - self.a) * rng.gen::<f64>();
        let s = (w2 - w1) / 4.0;
        let h = s * s / self.gravity;
        vec![h, h * 0.5 * (w1 + w2)]
    }
}
