//! Network and delay dynamics.
//!
//! - [`stm_step`]: one synchronous update `S_j ← f(Σ_i w_ij S_i + θ_j)`.
//! - [`hebbian_trajectory`]: RK4 integration of `dw_ij/dt = α·S_i(t)x_j(t) − λ·w_ij`.
//!   Decay is the linear term `−λw` with `λ ≥ 0`; nothing constrains the
//!   sign of `dw/dt` itself.
//! - [`decay_recursive`] / [`decay_ode`]: `y_t = c·y_{t−1}` and `dy/dt = −b·y`.
//! - [`dde_simulate`]: scalar stochastic delay equation with a constant
//!   delay and a pluggable drift, integrated by Euler–Maruyama.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::numcore::{Matrix, RandomSeed, SeededRng};
use crate::{Error, Result};

/// States larger than this in magnitude count as diverged.
const BLOW_UP: f64 = 1e150;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Activation {
    Identity,
    Logistic,
    Tanh,
}

impl Activation {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Identity => x,
            Activation::Logistic => 1.0 / (1.0 + (-x).exp()),
            Activation::Tanh => x.tanh(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkState {
    pub activations: Vec<f64>,
    /// `weights[(i, j)]` connects node `i` to node `j`.
    pub weights: Matrix,
    pub thresholds: Vec<f64>,
    pub activation: Activation,
}

impl NetworkState {
    pub fn new(activations: Vec<f64>, weights: Matrix, thresholds: Vec<f64>, activation: Activation) -> Result<Self> {
        let n = activations.len();
        if weights.rows() != n || weights.cols() != n {
            return Err(Error::LengthMismatch { expected: n, actual: weights.rows().max(weights.cols()) });
        }
        if thresholds.len() != n {
            return Err(Error::LengthMismatch { expected: n, actual: thresholds.len() });
        }
        Ok(NetworkState { activations, weights, thresholds, activation })
    }
}

/// Next activations of every node.
pub fn stm_step(state: &NetworkState) -> Result<Vec<f64>> {
    let n = state.activations.len();
    if state.weights.rows() != n || state.weights.cols() != n || state.thresholds.len() != n {
        return Err(Error::LengthMismatch { expected: n, actual: state.weights.rows() });
    }
    Ok((0..n)
        .map(|j| {
            let total: f64 = (0..n).map(|i| state.weights[(i, j)] * state.activations[i]).sum();
            state.activation.apply(total + state.thresholds[j])
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub dt: f64,
    pub notes: Vec<String>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<&[f64]> {
        self.states.last().map(|s| s.as_slice())
    }

    /// Component `k` of every snapshot.
    pub fn component(&self, k: usize) -> Vec<f64> {
        self.states.iter().map(|s| s[k]).collect()
    }

    /// `time,<names...>` CSV, one row per snapshot.
    pub fn to_csv(&self, names: &[String]) -> String {
        let mut out = String::from("time");
        for name in names {
            out.push(',');
            out.push_str(name);
        }
        out.push('\n');
        for (t, s) in self.times.iter().zip(&self.states) {
            out.push_str(&t.to_string());
            for v in s {
                out.push(',');
                out.push_str(&v.to_string());
            }
            out.push('\n');
        }
        out
    }
}

fn step_count(dt: f64, t_end: f64) -> Result<usize> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
    }
    if !(t_end >= 0.0) || !t_end.is_finite() {
        return Err(Error::InvalidParameter(format!("t_end must be non-negative, got {t_end}")));
    }
    Ok((t_end / dt - 1e-9).ceil().max(0.0) as usize)
}

fn check_finite(t: f64, y: &[f64]) -> Result<()> {
    if y.iter().any(|v| !v.is_finite() || v.abs() > BLOW_UP) {
        return Err(Error::Diverged { time: t, message: "state left the finite range".into() });
    }
    Ok(())
}

/// Classical fixed-step RK4 for `y' = f(t, y)` from `t = 0`.
pub fn rk4_integrate<F>(f: F, y0: &[f64], dt: f64, t_end: f64) -> Result<Trajectory>
where
    F: Fn(f64, &[f64]) -> Vec<f64>,
{
    let steps = step_count(dt, t_end)?;
    let axpy = |y: &[f64], k: &[f64], h: f64| -> Vec<f64> { y.iter().zip(k).map(|(a, b)| a + h * b).collect() };
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut y = y0.to_vec();
    check_finite(0.0, &y)?;
    times.push(0.0);
    states.push(y.clone());
    for s in 0..steps {
        let t = s as f64 * dt;
        let k1 = f(t, &y);
        let k2 = f(t + dt / 2.0, &axpy(&y, &k1, dt / 2.0));
        let k3 = f(t + dt / 2.0, &axpy(&y, &k2, dt / 2.0));
        let k4 = f(t + dt, &axpy(&y, &k3, dt));
        for i in 0..y.len() {
            y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        let t_next = (s + 1) as f64 * dt;
        check_finite(t_next, &y)?;
        times.push(t_next);
        states.push(y.clone());
    }
    Ok(Trajectory { times, states, dt, notes: Vec::new() })
}

/// Hebbian weight evolution. `driver(t, i, j)` returns the activity product
/// `S_i(t)·x_j(t)`; snapshots hold the weights flattened row-major.
pub fn hebbian_trajectory<D>(w0: &Matrix, alpha: f64, decay: f64, driver: D, dt: f64, t_end: f64) -> Result<Trajectory>
where
    D: Fn(f64, usize, usize) -> f64,
{
    if !(decay >= 0.0) {
        return Err(Error::InvalidParameter(format!("decay rate must be >= 0, got {decay}")));
    }
    let (r, c) = (w0.rows(), w0.cols());
    rk4_integrate(
        |t, w| (0..r * c).map(|idx| alpha * driver(t, idx / c, idx % c) - decay * w[idx]).collect(),
        w0.as_slice(),
        dt,
        t_end,
    )
}

/// `y0, c·y0, c²·y0, …` with `steps + 1` entries.
pub fn decay_recursive(y0: f64, c: f64, steps: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(steps + 1);
    let mut y = y0;
    out.push(y);
    for _ in 0..steps {
        y *= c;
        out.push(y);
    }
    out
}

/// RK4 solution of `dy/dt = −b·y`.
pub fn decay_ode(y0: f64, b: f64, dt: f64, t_end: f64) -> Result<Trajectory> {
    rk4_integrate(|_, y| vec![-b * y[0]], &[y0], dt, t_end)
}

/// Observed convergence order from the errors at step `h` and `h/2`.
pub fn convergence_order(error_h: f64, error_half: f64) -> f64 {
    (error_h / error_half).log2()
}

/// Drift `f(t, u(t), u(t − τ), β(t))` of the delay equation.
pub type DriftFn = Arc<dyn Fn(f64, f64, f64, f64) -> f64 + Send + Sync>;
/// Parameter path `β(t)` or pre-history `u(t)`, `t ≤ 0`.
pub type PathFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum Drift {
    /// `−rate·u(t)`
    Decay { rate: f64 },
    /// `−gain·u(t − τ)`
    DelayedFeedback { gain: f64 },
    /// `rate·u(t)·(1 − u(t − τ)/capacity)`
    Logistic { rate: f64, capacity: f64 },
    /// Caller-supplied drift with its parameter path.
    Custom { name: String, f: DriftFn, beta: PathFn },
}

impl Drift {
    pub fn eval(&self, t: f64, u: f64, delayed: f64) -> f64 {
        match self {
            Drift::Decay { rate } => -rate * u,
            Drift::DelayedFeedback { gain } => -gain * delayed,
            Drift::Logistic { rate, capacity } => rate * u * (1.0 - delayed / capacity),
            Drift::Custom { f, beta, .. } => f(t, u, delayed, beta(t)),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Drift::Decay { rate } => format!("decay(rate={rate})"),
            Drift::DelayedFeedback { gain } => format!("delayed-feedback(gain={gain})"),
            Drift::Logistic { rate, capacity } => format!("logistic(rate={rate}, capacity={capacity})"),
            Drift::Custom { name, .. } => name.clone(),
        }
    }
}

impl fmt::Debug for Drift {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

#[derive(Clone)]
pub enum History {
    Constant(f64),
    Function(PathFn),
}

impl History {
    pub fn at(&self, t: f64) -> f64 {
        match self {
            History::Constant(v) => *v,
            History::Function(f) => f(t),
        }
    }
}

impl fmt::Debug for History {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            History::Constant(v) => write!(f, "constant({v})"),
            History::Function(_) => f.write_str("function"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct DdeSpec {
    pub drift: Drift,
    pub delay: f64,
    pub sigma: f64,
    pub history: History,
    pub horizon: f64,
    pub dt: f64,
    pub seed: RandomSeed,
}

impl DdeSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.delay >= 0.0) || !self.delay.is_finite() {
            return Err(Error::InvalidParameter(format!("delay must be >= 0, got {}", self.delay)));
        }
        if !(self.sigma >= 0.0) || !self.sigma.is_finite() {
            return Err(Error::InvalidParameter(format!("sigma must be >= 0, got {}", self.sigma)));
        }
        if !(self.horizon >= 0.0) || !self.horizon.is_finite() {
            return Err(Error::InvalidParameter(format!("horizon must be >= 0, got {}", self.horizon)));
        }
        Ok(())
    }

    /// Delay rounded to a whole number of steps.
    pub fn delay_steps(&self) -> usize {
        (self.delay / self.dt).round() as usize
    }
}

/// Method-of-steps Euler–Maruyama integration of
/// `du = f(t, u(t), u(t − τ), β(t)) dt + σ dW`.
///
/// The delay is rounded to a multiple of `dt` (a note records any change).
/// Delayed values inside the simulated range are read off the grid; before
/// `t = 0` they come from the history, linearly interpolated when given as
/// samples through [`History::Function`].
pub fn dde_simulate(spec: &DdeSpec) -> Result<Trajectory> {
    spec.validate()?;
    let dt = spec.dt;
    let m = spec.delay_steps();
    let mut notes = Vec::new();
    let tau = m as f64 * dt;
    if (tau - spec.delay).abs() > 1e-12 * spec.delay.max(1.0) {
        let msg = format!("delay {} rounded to {} ({} steps of {})", spec.delay, tau, m, dt);
        log::warn!("{msg}");
        notes.push(msg);
    }
    let steps = step_count(dt, spec.horizon)?;
    let mut rng = SeededRng::new(spec.seed);
    let sd = spec.sigma * dt.sqrt();
    let mut u = Vec::with_capacity(steps + 1);
    u.push(spec.history.at(0.0));
    check_finite(0.0, &u)?;
    for k in 0..steps {
        let t = k as f64 * dt;
        let delayed = if k >= m { u[k - m] } else { spec.history.at(t - tau) };
        let mut next = u[k] + spec.drift.eval(t, u[k], delayed) * dt;
        if spec.sigma > 0.0 {
            next += sd * rng.standard_normal();
        }
        let t_next = (k + 1) as f64 * dt;
        check_finite(t_next, &[next])?;
        u.push(next);
    }
    Ok(Trajectory {
        times: (0..=steps).map(|k| k as f64 * dt).collect(),
        states: u.into_iter().map(|v| vec![v]).collect(),
        dt,
        notes,
    })
}

/// Piecewise-linear history through `(time, value)` samples, held constant
/// outside their range.
pub fn interpolated_history(samples: Vec<(f64, f64)>) -> Result<History> {
    if samples.is_empty() {
        return Err(Error::EmptySample("history needs at least one sample".into()));
    }
    if samples.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(Error::InvalidParameter("history times must be strictly increasing".into()));
    }
    Ok(History::Function(Arc::new(move |t| {
        let i = samples.partition_point(|s| s.0 <= t);
        if i == 0 {
            return samples[0].1;
        }
        if i == samples.len() {
            return samples[i - 1].1;
        }
        let (a, b) = (samples[i - 1], samples[i]);
        a.1 + (b.1 - a.1) * (t - a.0) / (b.0 - a.0)
    })))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn stm_examples() {
        let z = NetworkState::new(vec![0.3, -2.0, 5.0], Matrix::zeros(3, 3), vec![0.0; 3], Activation::Logistic).unwrap();
        assert_eq!(stm_step(&z).unwrap(), vec![0.5; 3]);

        let w = Matrix::from_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        let s = NetworkState::new(vec![1.0, 0.0], w, vec![0.0, 0.0], Activation::Identity).unwrap();
        assert_eq!(stm_step(&s).unwrap(), vec![0.0, 1.0]);

        let w = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let s = NetworkState::new(vec![1.0, -1.0], w, vec![0.0, 0.0], Activation::Identity).unwrap();
        // wᵀS
        assert_eq!(stm_step(&s).unwrap(), vec![-2.0, -2.0]);

        assert!(NetworkState::new(vec![1.0], Matrix::zeros(2, 2), vec![0.0], Activation::Tanh).is_err());
    }

    #[test]
    fn tanh_and_logistic_ranges() {
        let w = Matrix::from_rows(&[vec![50.0, -50.0], vec![-50.0, 50.0]]).unwrap();
        for act in [Activation::Logistic, Activation::Tanh] {
            let s = NetworkState::new(vec![0.3, 0.1], w.clone(), vec![0.2, -0.2], act).unwrap();
            for v in stm_step(&s).unwrap() {
                let (lo, hi) = if act == Activation::Logistic { (0.0, 1.0) } else { (-1.0, 1.0) };
                assert!(v >= lo && v <= hi);
            }
        }
    }

    #[test]
    fn hebbian_pure_decay_matches_closed_form() {
        let w0 = Matrix::from_rows(&[vec![1.0, -0.5], vec![2.0, 0.25]]).unwrap();
        let lambda = 0.7;
        let tr = hebbian_trajectory(&w0, 0.0, lambda, |_, _, _| 1.0, 0.01, 10.0).unwrap();
        assert_eq!(tr.len(), 1001);
        let mut worst: f64 = 0.0;
        for (t, s) in tr.times.iter().zip(&tr.states) {
            for (v, w) in s.iter().zip(w0.as_slice()) {
                worst = worst.max((v - w * (-lambda * t).exp()).abs());
            }
        }
        assert!(worst <= 1e-8, "max error {worst}");
    }

    #[test]
    fn hebbian_linear_growth_and_fixed_point() {
        let w0 = Matrix::from_rows(&[vec![0.5]]).unwrap();
        let tr = hebbian_trajectory(&w0, 0.3, 0.0, |_, _, _| 2.0, 0.1, 5.0).unwrap();
        for (t, s) in tr.times.iter().zip(&tr.states) {
            assert_abs_diff_eq!(s[0], 0.5 + 0.6 * t, epsilon = 1e-12);
        }
        let w0 = Matrix::from_rows(&[vec![0.4, -1.2]]).unwrap();
        let (alpha, lambda) = (0.5, 2.0);
        let target = w0.clone();
        let tr = hebbian_trajectory(&w0, alpha, lambda, move |_, i, j| lambda * target[(i, j)] / alpha, 0.05, 20.0).unwrap();
        for s in &tr.states {
            assert_abs_diff_eq!(s[0], 0.4, epsilon = 1e-10);
            assert_abs_diff_eq!(s[1], -1.2, epsilon = 1e-10);
        }
    }

    #[test]
    fn hebbian_divergence_is_reported() {
        let w0 = Matrix::from_rows(&[vec![1.0]]).unwrap();
        let err = hebbian_trajectory(&w0, 1.0, 0.0, |t, _, _| (t * 50.0).exp().powi(10), 0.1, 100.0).unwrap_err();
        assert!(matches!(err, Error::Diverged { .. }));
        assert!(err.to_string().starts_with("diverged at t ="));
        assert!(hebbian_trajectory(&w0, 1.0, -1.0, |_, _, _| 0.0, 0.1, 1.0).is_err());
    }

    #[test]
    fn decay_recursion() {
        assert_eq!(decay_recursive(1.0, 0.5, 3), vec![1.0, 0.5, 0.25, 0.125]);
        assert_eq!(decay_recursive(2.0, 1.0, 4), vec![2.0; 5]);
        let b: f64 = 0.3;
        let rec = decay_recursive(1.5, (-b).exp(), 10);
        let ode = decay_ode(1.5, b, 0.001, 10.0).unwrap();
        for (t, r) in rec.iter().enumerate() {
            assert_abs_diff_eq!(ode.states[t * 1000][0], *r, epsilon = 1e-10);
        }
    }

    #[test]
    fn decay_ode_accuracy_and_order() {
        let ode = decay_ode(2.0, 1.3, 0.001, 5.0).unwrap();
        assert_abs_diff_eq!(ode.last().unwrap()[0], 2.0 * (-6.5f64).exp(), epsilon = 1e-10);
        let flat = decay_ode(3.0, 0.0, 0.1, 2.0).unwrap();
        assert!(flat.states.iter().all(|s| s[0] == 3.0));

        let err = |dt: f64| (decay_ode(1.0, 2.0, dt, 2.0).unwrap().last().unwrap()[0] - (-4.0f64).exp()).abs();
        let order = convergence_order(err(0.1), err(0.05));
        assert!(order >= 3.8, "order {order}");
    }

    fn spec(drift: Drift, delay: f64, sigma: f64, horizon: f64, dt: f64, seed: u64) -> DdeSpec {
        DdeSpec { drift, delay, sigma, history: History::Constant(1.0), horizon, dt, seed: RandomSeed(seed) }
    }

    #[test]
    fn dde_reduces_to_decay() {
        let b = 0.8;
        let tr = dde_simulate(&spec(Drift::Decay { rate: b }, 0.0, 0.0, 5.0, 1e-3, 0)).unwrap();
        let ode = decay_ode(1.0, b, 1e-3, 5.0).unwrap();
        assert_eq!(tr.len(), ode.len());
        for (a, c) in tr.states.iter().zip(&ode.states) {
            assert!((a[0] - c[0]).abs() < 1e-3);
        }
    }

    #[test]
    fn dde_oscillates_past_stability_boundary() {
        let tr = dde_simulate(&spec(Drift::DelayedFeedback { gain: 1.0 }, FRAC_PI_2 + 0.2, 0.0, 60.0, 0.01, 0)).unwrap();
        assert!(!tr.notes.is_empty());
        let late: Vec<f64> = tr.times.iter().zip(&tr.states).filter(|(t, _)| **t > 50.0).map(|(_, s)| s[0]).collect();
        let changes = late.windows(2).filter(|w| w[0].signum() != w[1].signum()).count();
        assert!(changes >= 2, "{changes} sign changes after t = 50");
        let stable = dde_simulate(&spec(Drift::DelayedFeedback { gain: 1.0 }, 1.0, 0.0, 200.0, 0.01, 0)).unwrap();
        assert!(stable.last().unwrap()[0].abs() < 1e-3);
    }

    #[test]
    fn dde_is_deterministic_per_seed() {
        let s = spec(Drift::Decay { rate: 1.0 }, 0.5, 0.3, 10.0, 0.01, 42);
        assert_eq!(dde_simulate(&s).unwrap(), dde_simulate(&s).unwrap());
        let other = spec(Drift::Decay { rate: 1.0 }, 0.5, 0.3, 10.0, 0.01, 43);
        assert_ne!(dde_simulate(&s).unwrap(), dde_simulate(&other).unwrap());
    }

    #[test]
    fn dde_ensemble_mean_tracks_deterministic_path() {
        let (sigma, dt, horizon) = (0.5, 0.01, 1.0);
        let det = dde_simulate(&spec(Drift::Decay { rate: 1.0 }, 0.0, 0.0, horizon, dt, 0)).unwrap().last().unwrap()[0];
        let paths = 10_000;
        let finals: Vec<f64> = (0..paths)
            .map(|s| dde_simulate(&spec(Drift::Decay { rate: 1.0 }, 0.0, sigma, horizon, dt, 10_000 + s)).unwrap().last().unwrap()[0])
            .collect();
        let m = finals.iter().sum::<f64>() / paths as f64;
        let var = finals.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (paths - 1) as f64;
        let se = (var / paths as f64).sqrt();
        assert!((m - det).abs() < 4.0 * se, "mean {m} vs {det}, se {se}");
    }

    #[test]
    fn dde_custom_drift_and_history() {
        let f: DriftFn = Arc::new(|_, u, _, beta| -beta * u);
        let beta: PathFn = Arc::new(|_| 0.8);
        let custom = Drift::Custom { name: "scaled".into(), f, beta };
        let a = dde_simulate(&spec(custom, 0.0, 0.0, 3.0, 0.01, 0)).unwrap();
        let b = dde_simulate(&spec(Drift::Decay { rate: 0.8 }, 0.0, 0.0, 3.0, 0.01, 0)).unwrap();
        assert_eq!(a.states, b.states);

        let h = interpolated_history(vec![(-1.0, 0.0), (0.0, 2.0)]).unwrap();
        assert_abs_diff_eq!(h.at(-0.25), 1.5, epsilon = 1e-15);
        assert_eq!(h.at(-3.0), 0.0);
        let mut s = spec(Drift::DelayedFeedback { gain: 1.0 }, 0.5, 0.0, 0.5, 0.25, 0);
        s.history = h;
        let tr = dde_simulate(&s).unwrap();
        // u1 = 2 − 0.25·h(−0.5), u2 = u1 − 0.25·h(−0.25)
        assert_abs_diff_eq!(tr.states[1][0], 2.0 - 0.25 * 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(tr.states[2][0], 1.75 - 0.25 * 1.5, epsilon = 1e-15);
    }

    #[test]
    fn dde_divergence_and_validation() {
        let grow = Drift::Logistic { rate: 1.0, capacity: -1e-3 };
        let err = dde_simulate(&spec(grow, 0.0, 0.0, 100.0, 0.1, 0)).unwrap_err();
        assert!(matches!(err, Error::Diverged { .. }));
        assert!(dde_simulate(&spec(Drift::Decay { rate: 1.0 }, -1.0, 0.0, 1.0, 0.1, 0)).is_err());
        assert!(dde_simulate(&spec(Drift::Decay { rate: 1.0 }, 0.0, -0.1, 1.0, 0.1, 0)).is_err());
        assert!(dde_simulate(&spec(Drift::Decay { rate: 1.0 }, 0.0, 0.0, 1.0, 0.0, 0)).is_err());
    }

    #[test]
    fn trajectory_csv_layout() {
        let tr = decay_ode(1.0, 0.0, 0.5, 1.0).unwrap();
        assert_eq!(tr.to_csv(&["y".into()]), "time,y\n0,1\n0.5,1\n1,1\n");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn hebbian_stays_bounded(
                w in prop::collection::vec(-3.0f64..3.0, 4),
                alpha in 0.0f64..2.0,
                lambda in 0.05f64..3.0,
                amp in 0.0f64..2.0,
                freq in 0.1f64..5.0,
            ) {
                let w0 = Matrix::from_vec(2, 2, w).unwrap();
                let driver = move |t: f64, i: usize, j: usize| amp * (freq * t + (i + 2 * j) as f64).sin();
                let tr = hebbian_trajectory(&w0, alpha, lambda, driver, 0.02, 10.0).unwrap();
                let bound = w0.max_abs() + alpha * amp / lambda + 1e-9;
                for s in &tr.states {
                    for v in s {
                        prop_assert!(v.abs() <= bound);
                    }
                }
            }
        }
    }
}
