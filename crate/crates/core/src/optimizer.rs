//! Parameter updates driven by forward-difference probes of a (possibly stochastic) cost.
//!
//! Three update rules share the same probing machinery:
//!
//! * plain gradient descent on the circuit angles,
//! * descent in hyperspherical coordinates of the lifted point `(β₁, …, βₙ, cost)`,
//! * descent after rotating one `(βᵢ, cost)` plane, which tilts the local slope of the
//!   cost surface and lets the walk leave shallow minima.
//!
//! Every probe is one cost evaluation and is charged to a [`MeasurementCounter`].

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{config_err, Result, VqaaError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Gd,
    Hyperspherical,
    PlaneRotation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerConfig {
    pub method: Method,
    #[serde(default = "default_learning_rate")]
    pub learning_rate: f64,
    #[serde(default = "default_fd_step")]
    pub fd_step: f64,
    #[serde(default = "default_rotation_angle")]
    pub rotation_angle: f64,
    #[serde(default = "default_max_iterations")]
    pub max_iterations: u64,
    /// Redraw the parameters after this many iterations without success. The search
    /// time of a single walk is heavy-tailed, so periodic restarts cut the tail.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restart_every: Option<u64>,
}

pub const DEFAULT_LEARNING_RATE: f64 = 0.1;
pub const DEFAULT_FD_STEP: f64 = 1.5;
pub const DEFAULT_ROTATION_ANGLE: f64 = -0.3;

fn default_learning_rate() -> f64 {
    DEFAULT_LEARNING_RATE
}
fn default_fd_step() -> f64 {
    DEFAULT_FD_STEP
}
fn default_rotation_angle() -> f64 {
    DEFAULT_ROTATION_ANGLE
}
fn default_max_iterations() -> u64 {
    1000
}

impl OptimizerConfig {
    pub fn new(method: Method) -> Self {
        Self {
            method,
            learning_rate: DEFAULT_LEARNING_RATE,
            fd_step: DEFAULT_FD_STEP,
            rotation_angle: DEFAULT_ROTATION_ANGLE,
            max_iterations: default_max_iterations(),
            restart_every: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return config_err(format!("learning rate {} must be positive", self.learning_rate));
        }
        if !(self.fd_step > 0.0 && self.fd_step.is_finite()) {
            return config_err(format!("finite-difference step {} must be positive", self.fd_step));
        }
        if !self.rotation_angle.is_finite() {
            return config_err("rotation angle must be finite");
        }
        if self.restart_every == Some(0) {
            return config_err("restart_every must be at least 1");
        }
        if self.max_iterations == 0 {
            return config_err("max_iterations must be at least 1");
        }
        Ok(())
    }

    /// Cost evaluations one step spends on probes for `n` parameters.
    pub fn probes_per_step(&self, n: usize) -> usize {
        match self.method {
            Method::Gd | Method::PlaneRotation => n,
            Method::Hyperspherical => n + 1,
        }
    }
}

/// Probe measurements and completed iterations.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementCounter {
    pub total_measurements: u64,
    pub iterations: u64,
}

impl MeasurementCounter {
    pub fn probe(&mut self) {
        self.total_measurements += 1;
    }

    pub fn complete_iteration(&mut self) {
        self.iterations += 1;
    }
}

/// Maps an angle into `(-π, π]`.
pub fn wrap_angle(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

/// Forward differences `(cost(β + h eᵢ) - base_cost) / h`, one probe per component.
pub fn estimate_gradient<F>(
    cost_at: &mut F,
    params: &[f64],
    base_cost: f64,
    fd_step: f64,
    counter: &mut MeasurementCounter,
) -> Result<Vec<f64>>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let mut probe = params.to_vec();
    let mut grad = Vec::with_capacity(params.len());
    for i in 0..params.len() {
        probe[i] = params[i] + fd_step;
        let c = cost_at(&probe)?;
        counter.probe();
        grad.push((c - base_cost) / fd_step);
        probe[i] = params[i];
    }
    Ok(grad)
}

/// `β - η ∇`, wrapped into `(-π, π]`.
pub fn gd_step(params: &[f64], gradient: &[f64], learning_rate: f64) -> Vec<f64> {
    params.iter().zip(gradient).map(|(p, g)| wrap_angle(p - learning_rate * g)).collect()
}

/// Cartesian point of dimension `n + 1` to `(r, θ₁..θₙ)` with
/// `x₁ = r cos θ₁`, `x_k = r cos θ_k Π_{j<k} sin θ_j`, `x_{n+1} = r Π_{j≤n} sin θ_j`.
/// `θ₁..θ_{n-1}` lie in `[0, π]` and `θₙ` in `(-π, π]`.
pub fn to_hyperspherical(point: &[f64]) -> Result<(f64, Vec<f64>)> {
    let m = point.len();
    if m < 2 {
        return config_err("hyperspherical coordinates need at least two dimensions");
    }
    // tail[k] = ‖(x_k, …, x_m)‖
    let mut tail = vec![0.0_f64; m + 1];
    for k in (0..m).rev() {
        tail[k] = tail[k + 1].hypot(point[k]);
    }
    let r = tail[0];
    if r == 0.0 {
        return Err(VqaaError::UndefinedAngle);
    }
    let mut angles = Vec::with_capacity(m - 1);
    for k in 0..m - 2 {
        angles.push(tail[k + 1].atan2(point[k]));
    }
    let last = point[m - 1].atan2(point[m - 2]);
    angles.push(if last == -PI { PI } else { last });
    Ok((r, angles))
}

pub fn from_hyperspherical(r: f64, angles: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(angles.len() + 1);
    let mut sin_prod = r;
    for &a in angles {
        let (s, c) = a.sin_cos();
        out.push(sin_prod * c);
        sin_prod *= s;
    }
    out.push(sin_prod);
    out
}

/// One descent step on the lifted point `P = (β, cost)` expressed as `(r, θ)`.
///
/// Each angle and the radius are probed once; the new `β` is the first `n` coordinates of
/// the updated point, and the cost coordinate is dropped. A zero cost returns `β` as is.
pub fn hyperspherical_step<F>(
    params: &[f64],
    sampled_cost: f64,
    cost_at: &mut F,
    config: &OptimizerConfig,
    counter: &mut MeasurementCounter,
) -> Result<Vec<f64>>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    if sampled_cost == 0.0 {
        return Ok(params.to_vec());
    }
    let n = params.len();
    let mut lifted = params.to_vec();
    lifted.push(sampled_cost);
    let (r, angles) = match to_hyperspherical(&lifted) {
        Ok(v) if v.0 > 1e-12 => v,
        _ => {
            let g = estimate_gradient(cost_at, params, sampled_cost, config.fd_step, counter)?;
            return Ok(gd_step(params, &g, config.learning_rate));
        }
    };
    let h = config.fd_step;

    let mut grad_angles = Vec::with_capacity(n);
    let mut probe = angles.clone();
    for i in 0..n {
        probe[i] = angles[i] + h;
        let point = from_hyperspherical(r, &probe);
        let c = cost_at(&point[..n])?;
        counter.probe();
        grad_angles.push((c - sampled_cost) / h);
        probe[i] = angles[i];
    }
    let point = from_hyperspherical(r + h, &angles);
    let c = cost_at(&point[..n])?;
    counter.probe();
    let grad_r = (c - sampled_cost) / h;

    let new_angles: Vec<f64> = angles.iter().zip(&grad_angles).map(|(a, g)| a - config.learning_rate * g).collect();
    let new_r = (r - config.learning_rate * grad_r).abs();
    let point = from_hyperspherical(new_r, &new_angles);
    Ok(point[..n].iter().map(|&x| wrap_angle(x)).collect())
}

/// Givens rotation of the `(i, j)` plane by `angle` in `dim` dimensions, acting on
/// coordinates: `y = R x` expresses `x` in axes rotated by `angle`.
pub fn givens_rotation(dim: usize, i: usize, j: usize, angle: f64) -> Vec<Vec<f64>> {
    let mut m = vec![vec![0.0; dim]; dim];
    for (k, row) in m.iter_mut().enumerate() {
        row[k] = 1.0;
    }
    let (s, c) = angle.sin_cos();
    m[i][i] = c;
    m[i][j] = s;
    m[j][i] = -s;
    m[j][j] = c;
    m
}

fn mat_vec(m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

fn mat_t_vec(m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    (0..m.len()).map(|c| m.iter().zip(v).map(|(row, x)| row[c] * x).sum()).collect()
}

/// One descent step with the `(βᵢ, cost)` plane rotated by `rotation_angle`, `i` drawn
/// uniformly from `rng`.
///
/// The forward-difference tangent `(eᵢ, sᵢ)` of the cost surface is carried into the rotated
/// frame, a gradient step is taken there along the rotated `βᵢ` axis, and the displacement
/// is rotated back. The other coordinates take a plain gradient step. With a zero angle this
/// is exactly [`gd_step`].
pub fn plane_rotation_step<F, R>(
    params: &[f64],
    sampled_cost: f64,
    cost_at: &mut F,
    config: &OptimizerConfig,
    counter: &mut MeasurementCounter,
    rng: &mut R,
) -> Result<Vec<f64>>
where
    F: FnMut(&[f64]) -> Result<f64>,
    R: Rng + ?Sized,
{
    let n = params.len();
    let i = rng.gen_range(0..n);
    let grad = estimate_gradient(cost_at, params, sampled_cost, config.fd_step, counter)?;
    let mut out = gd_step(params, &grad, config.learning_rate);
    if config.rotation_angle == 0.0 {
        return Ok(out);
    }

    let rot = givens_rotation(n + 1, i, n, config.rotation_angle);
    let mut tangent = vec![0.0; n + 1];
    tangent[i] = 1.0;
    tangent[n] = grad[i];
    let t = mat_vec(&rot, &tangent);
    // slope of the cost surface seen from the rotated axes, kept off the vertical
    let tilt = t[n].atan2(t[i]).clamp(-FRAC_PI_2 + 1e-6, FRAC_PI_2 - 1e-6);
    let mut step = vec![0.0; n + 1];
    step[i] = -config.learning_rate * tilt.tan();
    let back = mat_t_vec(&rot, &step);
    out[i] = wrap_angle(params[i] + back[i]);
    Ok(out)
}

/// Dispatches one optimizer step for `config.method`.
pub fn step<F, R>(
    params: &[f64],
    sampled_cost: f64,
    cost_at: &mut F,
    config: &OptimizerConfig,
    counter: &mut MeasurementCounter,
    rng: &mut R,
) -> Result<Vec<f64>>
where
    F: FnMut(&[f64]) -> Result<f64>,
    R: Rng + ?Sized,
{
    match config.method {
        Method::Gd => {
            let g = estimate_gradient(cost_at, params, sampled_cost, config.fd_step, counter)?;
            Ok(gd_step(params, &g, config.learning_rate))
        }
        Method::Hyperspherical => hyperspherical_step(params, sampled_cost, cost_at, config, counter),
        Method::PlaneRotation => plane_rotation_step(params, sampled_cost, cost_at, config, counter, rng),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::trial_rng;

    fn bowl(x: &[f64]) -> Result<f64> {
        Ok(x.iter().map(|v| v * v).sum())
    }

    #[test]
    fn gradient_basics() {
        let mut counter = MeasurementCounter::default();
        let g = estimate_gradient(&mut |_: &[f64]| Ok(3.0), &[0.1, 0.2, 0.3], 3.0, 0.3, &mut counter).unwrap();
        assert_eq!(g, vec![0.0; 3]);
        assert_eq!(counter.total_measurements, 3);

        let g = estimate_gradient(&mut bowl, &[0.0; 4], 0.0, 1e-6, &mut counter).unwrap();
        assert!(g.iter().all(|v| v.abs() < 1e-5));
    }

    #[test]
    fn gd_step_examples() {
        assert_eq!(gd_step(&[0.5, -0.5], &[0.0, 0.0], 0.1), vec![0.5, -0.5]);
        let p = gd_step(&[0.5], &[1.0], 0.1);
        assert!((p[0] - 0.4).abs() < 1e-15);
        let p = gd_step(&[PI - 0.05], &[-1.0], 0.1);
        assert!((p[0] - (-PI + 0.05)).abs() < 1e-12);
    }

    #[test]
    fn wrap_range() {
        assert_eq!(wrap_angle(PI), PI);
        assert!((wrap_angle(-PI) - PI).abs() < 1e-15);
        assert!((wrap_angle(3.0 * PI + 0.1) - (-PI + 0.1)).abs() < 1e-12);
        assert!((wrap_angle(0.25) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn hyperspherical_examples() {
        let (r, a) = to_hyperspherical(&[1.0, 0.0, 0.0]).unwrap();
        assert_eq!((r, a), (1.0, vec![0.0, 0.0]));
        let (r, a) = to_hyperspherical(&[0.0, 1.0]).unwrap();
        assert!((r - 1.0).abs() < 1e-15 && (a[0] - FRAC_PI_2).abs() < 1e-15);
        assert!(matches!(to_hyperspherical(&[0.0, 0.0, 0.0]), Err(VqaaError::UndefinedAngle)));
        assert!(to_hyperspherical(&[1.0]).is_err());
        let (_, a) = to_hyperspherical(&[-1.0, -1.0, 0.0, -2.0]).unwrap();
        assert!(a[..2].iter().all(|t| (0.0..=PI).contains(t)));
        assert!(a[2] > -PI && a[2] <= PI);
    }

    #[test]
    fn zero_cost_is_a_fixed_point() {
        let mut counter = MeasurementCounter::default();
        let cfg = OptimizerConfig::new(Method::Hyperspherical);
        let p = hyperspherical_step(&[0.3, -0.2], 0.0, &mut bowl, &cfg, &mut counter).unwrap();
        assert_eq!(p, vec![0.3, -0.2]);
        assert_eq!(counter.total_measurements, 0);
    }

    #[test]
    fn hyperspherical_probe_count() {
        let cfg = OptimizerConfig::new(Method::Hyperspherical);
        for n in 1..6 {
            let mut counter = MeasurementCounter::default();
            let p = vec![0.4; n];
            let c = bowl(&p).unwrap();
            hyperspherical_step(&p, c, &mut bowl, &cfg, &mut counter).unwrap();
            assert_eq!(counter.total_measurements, n as u64 + 1);
            assert_eq!(cfg.probes_per_step(n), n + 1);
        }
    }

    #[test]
    fn hyperspherical_bowl_descent() {
        let mut cfg = OptimizerConfig::new(Method::Hyperspherical);
        cfg.learning_rate = 0.1;
        cfg.fd_step = 1e-4;
        let mut counter = MeasurementCounter::default();
        let mut p = vec![1.0, 1.0];
        for _ in 0..200 {
            let c = bowl(&p).unwrap();
            p = hyperspherical_step(&p, c, &mut bowl, &cfg, &mut counter).unwrap();
        }
        assert!(bowl(&p).unwrap() < 1e-2, "{p:?}");
    }

    #[test]
    fn rotation_is_orthogonal() {
        let r = givens_rotation(5, 1, 4, 0.7);
        for a in 0..5 {
            for b in 0..5 {
                let dot: f64 = (0..5).map(|k| r[k][a] * r[k][b]).sum();
                let expected = if a == b { 1.0 } else { 0.0 };
                assert!((dot - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_rotation_matches_gd() {
        let mut cfg = OptimizerConfig::new(Method::PlaneRotation);
        cfg.rotation_angle = 0.0;
        let p = vec![0.3, -1.2, 2.0];
        let c = bowl(&p).unwrap();
        let mut counter = MeasurementCounter::default();
        let out = plane_rotation_step(&p, c, &mut bowl, &cfg, &mut counter, &mut trial_rng(1, 0)).unwrap();
        let g = estimate_gradient(&mut bowl, &p, c, cfg.fd_step, &mut MeasurementCounter::default()).unwrap();
        assert_eq!(out, gd_step(&p, &g, cfg.learning_rate));
        assert_eq!(counter.total_measurements, 3);
    }

    #[test]
    fn every_method_descends_a_quadratic() {
        for method in [Method::Gd, Method::Hyperspherical, Method::PlaneRotation] {
            let mut cfg = OptimizerConfig::new(method);
            cfg.learning_rate = 0.01;
            cfg.fd_step = 1e-6;
            cfg.rotation_angle = 0.05;
            let mut rng = trial_rng(3, 0);
            let mut counter = MeasurementCounter::default();
            let mut p = vec![0.8, -0.5, 0.3];
            for _ in 0..50 {
                let c = bowl(&p).unwrap();
                let next = step(&p, c, &mut bowl, &cfg, &mut counter, &mut rng).unwrap();
                assert!(bowl(&next).unwrap() < c, "{method:?}");
                p = next;
            }
        }
    }

    #[test]
    fn config_validation() {
        let mut c = OptimizerConfig::new(Method::Gd);
        assert!(c.validate().is_ok());
        c.learning_rate = 0.0;
        assert!(c.validate().is_err());
        let json = r#"{"method":"hyperspherical"}"#;
        let c: OptimizerConfig = serde_json::from_str(json).unwrap();
        assert_eq!(c.fd_step, DEFAULT_FD_STEP);
    }
}
