//! Built-in vector fields and samplers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{PipelineError, Result};
use mvfield::VectorSample;

const DIVERGENCE_BOUND: f64 = 1e6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum System {
    /// Attracting fixed point at the origin inside a repelling unit circle.
    RepOrbit,
    VanDerPol,
    Lorenz,
}

impl System {
    pub fn dim(self) -> usize {
        match self {
            System::Lorenz => 3,
            _ => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            System::RepOrbit => "reporbit",
            System::VanDerPol => "vanderpol",
            System::Lorenz => "lorenz",
        }
    }

    pub fn eval(self, p: &[f64]) -> Vec<f64> {
        match self {
            System::RepOrbit => {
                let (x, y) = (p[0], p[1]);
                let r = x * x + y * y - 1.0;
                vec![y + x * r, -x + y * r]
            }
            System::VanDerPol => {
                let (x, y) = (p[0], p[1]);
                vec![y, y * (1.0 - x * x) - x]
            }
            System::Lorenz => {
                let (x, y, z) = (p[0], p[1], p[2]);
                vec![10.0 * (y - x), 28.0 * x - x * z - y, x * y - 8.0 / 3.0 * z]
            }
        }
    }
}

pub fn builtin_system(name: &str) -> Result<System> {
    match name.to_ascii_lowercase().as_str() {
        "reporbit" => Ok(System::RepOrbit),
        "vanderpol" => Ok(System::VanDerPol),
        "lorenz" => Ok(System::Lorenz),
        other => Err(PipelineError::Config(format!("unknown system {other:?} (reporbit, vanderpol, lorenz)"))),
    }
}

/// `n` uniform positions in the axis-aligned `bounds`, with velocities from
/// the system.
pub fn sample_random(system: System, n: usize, bounds: &[[f64; 2]], seed: u64) -> Result<Vec<VectorSample>> {
    if bounds.len() != system.dim() {
        return Err(PipelineError::Config(format!(
            "{} needs a {}-dimensional box, got {}",
            system.name(),
            system.dim(),
            bounds.len()
        )));
    }
    if bounds.iter().any(|[lo, hi]| !lo.is_finite() || !hi.is_finite() || lo >= hi) {
        return Err(PipelineError::Config("sample box must satisfy min < max on every axis".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n)
        .map(|_| {
            let x: Vec<f64> = bounds.iter().map(|&[lo, hi]| rng.gen_range(lo..hi)).collect();
            let v = system.eval(&x);
            VectorSample { position: x, velocity: v }
        })
        .collect())
}

/// Explicit Euler orbit `x_{i+1} = x_i + dt f(x_i)`; returns the `steps + 1`
/// visited states with their velocities. Fails once a coordinate leaves
/// `[-1e6, 1e6]` or stops being finite.
pub fn euler_trajectory(system: System, x0: &[f64], dt: f64, steps: usize) -> Result<Vec<VectorSample>> {
    if !dt.is_finite() || dt <= 0.0 {
        return Err(PipelineError::Config(format!("time step must be positive, got {dt}")));
    }
    if steps == 0 {
        return Err(PipelineError::Config("at least one Euler step is required".into()));
    }
    if x0.len() != system.dim() {
        return Err(PipelineError::Config(format!("initial state must have {} coordinates", system.dim())));
    }
    let mut out = Vec::with_capacity(steps + 1);
    let mut x = x0.to_vec();
    for step in 0..=steps {
        if x.iter().any(|c| !c.is_finite() || c.abs() > DIVERGENCE_BOUND) {
            return Err(PipelineError::Divergence { step, state: x });
        }
        let v = system.eval(&x);
        let next: Vec<f64> = x.iter().zip(&v).map(|(a, b)| a + dt * b).collect();
        out.push(VectorSample { position: std::mem::replace(&mut x, next), velocity: v });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_points_and_lorenz_value() {
        assert_eq!(System::RepOrbit.eval(&[0.0, 0.0]), vec![0.0, 0.0]);
        assert_eq!(System::VanDerPol.eval(&[0.0, 0.0]), vec![0.0, 0.0]);
        let v = System::Lorenz.eval(&[0.0, 1.0, 1.05]);
        assert_eq!(v[0], 10.0);
        assert_eq!(v[1], -1.0);
        assert!((v[2] + 2.8).abs() < 1e-12);
        assert!(builtin_system("duffing").is_err());
        assert_eq!(builtin_system("Lorenz").unwrap(), System::Lorenz);
    }

    #[test]
    fn one_euler_step() {
        let t = euler_trajectory(System::Lorenz, &[0.0, 1.0, 1.05], 0.01, 1).unwrap();
        assert_eq!(t.len(), 2);
        let p = &t[1].position;
        assert!((p[0] - 0.1).abs() < 1e-12);
        assert!((p[1] - 0.99).abs() < 1e-12);
        assert!((p[2] - 1.022).abs() < 1e-12);
        assert!(euler_trajectory(System::Lorenz, &[0.0, 1.0, 1.05], 0.0, 1).is_err());
        assert_eq!(t, euler_trajectory(System::Lorenz, &[0.0, 1.0, 1.05], 0.01, 1).unwrap());
    }

    #[test]
    fn large_step_diverges() {
        let err = euler_trajectory(System::Lorenz, &[0.0, 1.0, 1.05], 0.2, 2000).unwrap_err();
        assert_eq!(err.exit_code(), 4);
    }

    #[test]
    fn random_samples() {
        assert!(sample_random(System::RepOrbit, 0, &[[-3.0, 3.0]; 2], 1).unwrap().is_empty());
        let s = sample_random(System::RepOrbit, 1000, &[[-3.0, 3.0]; 2], 1).unwrap();
        assert!(s.iter().all(|p| p.position.iter().all(|c| (-3.0..3.0).contains(c))));
        assert_eq!(s, sample_random(System::RepOrbit, 1000, &[[-3.0, 3.0]; 2], 1).unwrap());
        assert!(sample_random(System::RepOrbit, 5, &[[1.0, 1.0]; 2], 1).is_err());
    }
}
