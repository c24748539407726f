//! `simulate decay|corr|hebb|dde`.

use driftlab::drift::simulate_corr_path;
use driftlab::dynamics::{
    dde_simulate, decay_ode, decay_recursive, hebbian_trajectory, stm_step, Activation, DdeSpec, Drift, History, NetworkState,
};
use driftlab::numcore::{pearson, Matrix, RandomSeed, SeededRng};

use crate::report::Report;
use crate::{CliError, CliResult, Ctx, DriftKind, SimCmd};

pub(crate) fn simulate(ctx: &mut Ctx, cmd: SimCmd) -> CliResult<Report> {
    match cmd {
        SimCmd::Decay { y0, rate, dt, t_end } => decay(ctx, y0, rate, dt, t_end),
        SimCmd::Corr { n_before, rho_before, n_after, rho_after } => corr(ctx, n_before, rho_before, n_after, rho_after),
        SimCmd::Hebb { nodes, learning_rate, decay, amplitude, dt, t_end } => {
            hebb(ctx, nodes, learning_rate, decay, amplitude, dt, t_end)
        }
        SimCmd::Dde { drift, rate, capacity, delay, sigma, history, dt, horizon } => {
            let drift = match drift {
                DriftKind::Decay => Drift::Decay { rate },
                DriftKind::Feedback => Drift::DelayedFeedback { gain: rate },
                DriftKind::Logistic => Drift::Logistic { rate, capacity },
            };
            let spec = DdeSpec {
                drift,
                delay,
                sigma,
                history: History::Constant(history),
                horizon,
                dt,
                seed: RandomSeed(ctx.global.seed),
            };
            dde(ctx, &spec)
        }
    }
}

fn decay(ctx: &mut Ctx, y0: f64, rate: f64, dt: f64, t_end: f64) -> CliResult<Report> {
    let tr = decay_ode(y0, rate, dt, t_end)?;
    let exact: Vec<f64> = tr.times.iter().map(|t| y0 * (-rate * t).exp()).collect();
    let max_err = tr.states.iter().zip(&exact).map(|(s, e)| (s[0] - e).abs()).fold(0.0, f64::max);
    let steps = t_end.floor() as usize;
    let recursive = decay_recursive(y0, (-rate).exp(), steps);
    let mut r = ctx.report("simulate decay");
    r.n("steps", tr.len() - 1);
    r.result("method", &"rk4");
    r.result("final", &tr.last().map(|s| s[0]));
    r.result("closed_form_final", &exact.last());
    r.result("max_abs_error", &max_err);
    r.result("recursive", &recursive);
    let mut csv = String::from("time,rk4,closed_form\n");
    for ((t, s), e) in tr.times.iter().zip(&tr.states).zip(&exact) {
        csv.push_str(&format!("{t},{},{e}\n", s[0]));
    }
    r.table("trajectory.csv", csv);
    r.line(format!("y({t_end}) = {:.10e}, max |rk4 - exact| = {max_err:.3e}", tr.last().map_or(f64::NAN, |s| s[0])));
    Ok(r)
}

fn corr(ctx: &mut Ctx, n_before: usize, rho_before: f64, n_after: usize, rho_after: f64) -> CliResult<Report> {
    let mut rhos = vec![rho_before; n_before];
    rhos.extend(std::iter::repeat_n(rho_after, n_after));
    let xy = simulate_corr_path(&rhos, RandomSeed(ctx.global.seed))?;
    let part = |lo: usize, hi: usize| -> Option<f64> {
        let idx: Vec<usize> = (lo..hi).collect();
        let m = xy.select_rows(&idx);
        pearson(&m.column(0), &m.column(1)).ok()
    };
    let mut r = ctx.report("simulate corr");
    r.n("rows", xy.rows());
    r.result("sample_r_before", &part(0, n_before));
    r.result("sample_r_after", &part(n_before, n_before + n_after));
    let mut csv = String::from("row,rho,x,y\n");
    for (i, rho) in rhos.iter().enumerate() {
        csv.push_str(&format!("{},{rho},{},{}\n", i + 1, xy[(i, 0)], xy[(i, 1)]));
    }
    r.table("series.csv", csv);
    r.line(format!("{} rows at rho {rho_before}, then {} at rho {rho_after}", n_before, n_after));
    Ok(r)
}

fn hebb(ctx: &mut Ctx, nodes: usize, lr: f64, decay: f64, amplitude: f64, dt: f64, t_end: f64) -> CliResult<Report> {
    if nodes == 0 {
        return Err(CliError("invalid-parameter: nodes must be >= 1".into()));
    }
    let mut rng = SeededRng::new(RandomSeed(ctx.global.seed));
    let w0 = Matrix::from_vec(nodes, nodes, (0..nodes * nodes).map(|_| 2.0 * rng.uniform() - 1.0).collect())?;
    // S_i(t) = sin(t + i), x_j(t) = cos(t + j)
    let driver = move |t: f64, i: usize, j: usize| amplitude * (t + i as f64).sin() * (t + j as f64).cos();
    let tr = hebbian_trajectory(&w0, lr, decay, driver, dt, t_end)?;
    let last = tr.last().unwrap().to_vec();
    let w = Matrix::from_vec(nodes, nodes, last.clone())?;
    let sup = tr.states.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    let activations: Vec<f64> = (0..nodes).map(|i| (t_end + i as f64).sin()).collect();
    let state = NetworkState::new(activations, w.clone(), vec![0.0; nodes], Activation::Tanh)?;
    let next = stm_step(&state)?;

    let mut r = ctx.report("simulate hebb");
    r.n("steps", tr.len() - 1);
    r.result("initial_weights", &w0.to_rows());
    r.result("final_weights", &w.to_rows());
    r.result("sup_abs_weight", &sup);
    if decay > 0.0 {
        r.result("bound", &(w0.max_abs() + lr * amplitude / decay));
    }
    r.result("stm_next_activations", &next);
    let names: Vec<String> = (0..nodes).flat_map(|i| (0..nodes).map(move |j| format!("w{i}{j}"))).collect();
    r.table("trajectory.csv", tr.to_csv(&names));
    r.line(format!("{nodes}x{nodes} weights to t = {t_end}; sup |w| = {sup:.6}"));
    Ok(r)
}

fn dde(ctx: &mut Ctx, spec: &DdeSpec) -> CliResult<Report> {
    let tr = dde_simulate(spec)?;
    let u = tr.component(0);
    let sign_changes = u.windows(2).filter(|w| w[0].signum() != w[1].signum()).count();
    let mut r = ctx.report("simulate dde");
    for n in &tr.notes {
        r.warn(n.clone());
    }
    r.n("steps", tr.len() - 1);
    r.result("method", &"euler-maruyama, method of steps");
    r.result("drift", &spec.drift.name());
    r.result("delay_steps", &spec.delay_steps());
    r.result("final", &u.last());
    r.result("min", &u.iter().cloned().fold(f64::INFINITY, f64::min));
    r.result("max", &u.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
    r.result("sign_changes", &sign_changes);
    r.table("trajectory.csv", tr.to_csv(&["u".to_string()]));
    r.line(format!("{} to t = {}: u = {:.6}, {sign_changes} sign changes", spec.drift.name(), spec.horizon, u.last().unwrap()));
    Ok(r)
}
