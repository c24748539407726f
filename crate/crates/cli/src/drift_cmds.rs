//! `drift h1|h2|poss`: synthetic by default, dataset columns with `--data`.

use driftlab::drift::{
    expanding_windows_by_time, h1a_cov_stability, h1b_mean_trend, h2a_corr_shift, h2b_mi_shift, hotelling_t2, mi_windows,
    possibilistic_drift, simulate_corr_path, simulate_decay_panel, BinningMode, WindowStats, H2B_BINS,
};
use driftlab::eda::sturges_bins;
use driftlab::ingest::Frame;
use driftlab::numcore::{Matrix, RandomSeed};

use crate::data_cmds::load;
use crate::report::Report;
use crate::{CliError, CliResult, Ctx, H1Args, H2Args, PossArgs};

/// Complete rows of `columns` ordered by date (stable), with their dates.
fn dated_columns(frame: &Frame, columns: &[String]) -> CliResult<(Vec<f64>, Vec<Vec<f64>>, usize)> {
    let date = frame.numeric("date")?;
    let cols: Vec<Vec<Option<f64>>> = columns.iter().map(|c| frame.numeric(c)).collect::<Result<_, _>>()?;
    let mut rows: Vec<usize> = (0..frame.n_rows()).filter(|&i| date[i].is_some() && cols.iter().all(|c| c[i].is_some())).collect();
    if rows.is_empty() {
        return Err(CliError("empty-sample: no complete rows for the requested columns".into()));
    }
    let dropped = frame.n_rows() - rows.len();
    rows.sort_by(|&a, &b| date[a].unwrap().total_cmp(&date[b].unwrap()));
    let times = rows.iter().map(|&i| date[i].unwrap()).collect();
    let data = cols.iter().map(|c| rows.iter().map(|&i| c[i].unwrap()).collect()).collect();
    Ok((times, data, dropped))
}

fn windows_csv(names: &[String], windows: &[WindowStats]) -> String {
    let mut s = String::from("window,n,time_mean");
    for n in names {
        s.push_str(&format!(",mean_{n}"));
    }
    s.push('\n');
    for w in windows {
        s.push_str(&format!("{},{},{}", w.index, w.n, w.time_mean));
        for m in &w.mean_vector {
            s.push_str(&format!(",{m}"));
        }
        s.push('\n');
    }
    s
}

pub(crate) fn h1(ctx: &mut Ctx, a: &H1Args) -> CliResult<Report> {
    let alpha = ctx.global.alpha;
    let (data, times, names, splits, mut r) = match &a.data {
        Some(path) => {
            let (frame, warnings) = load(ctx, Some(path))?;
            let (times, cols, dropped) = dated_columns(&frame, &a.columns)?;
            let mut r = ctx.report("drift h1");
            for w in warnings {
                r.warn(w);
            }
            if dropped > 0 {
                r.warn(format!("{dropped} rows with missing values dropped"));
            }
            r.result("source", &"dataset, rows ordered by date");
            (Matrix::from_columns(&cols)?, times, a.columns.clone(), a.splits, r)
        }
        None => {
            let panel = simulate_decay_panel(a.times, a.obs, RandomSeed(ctx.global.seed))?;
            let mut r = ctx.report("drift h1");
            r.result("source", &format!("synthetic decay panel, {} times x {} observations", a.times, a.obs));
            (panel.data, panel.time, vec!["x".to_string()], a.times, r)
        }
    };
    let windows = expanding_windows_by_time(&data, &times, 1)?;
    let trend = h1b_mean_trend(&windows)?.with_alpha(alpha);
    let cov = h1a_cov_stability(&data, splits)?.with_alpha(alpha);
    let first = &windows[0];
    let last_time = *times.last().unwrap();
    let last_rows: Vec<usize> = (0..times.len()).filter(|&i| times[i] == last_time).collect();
    let shift = hotelling_t2(&data.select_rows(&last_rows), &first.mean_vector)
        .map(|t| t.with_alpha(alpha).with_note("final time block against the first window mean"));

    r.n("rows", data.rows());
    r.n("windows", windows.len());
    r.result("variables", &names);
    r.result("mean_trend", &trend);
    r.result("covariance_stability", &cov);
    match shift {
        Ok(t) => {
            r.n("final_block", t.n);
            r.line(format!("hotelling final block   p = {:.3e}  reject = {}", t.p_value, t.reject));
            r.result("final_block_shift", &t);
        }
        Err(e) => r.warn(format!("final block test skipped: {e}")),
    }
    r.line(format!("mean trend (pillai)     p = {:.3e}  reject = {}", trend.p_value, trend.reject));
    r.line(format!("covariance (box-m)      p = {:.3e}  reject = {}", cov.p_value, cov.reject));
    r.table("windows.csv", windows_csv(&names, &windows));
    Ok(r)
}

pub(crate) fn h2(ctx: &mut Ctx, a: &H2Args) -> CliResult<Report> {
    let alpha = ctx.global.alpha;
    let (xy, mut r) = match &a.data {
        Some(path) => {
            let (frame, warnings) = load(ctx, Some(path))?;
            let names = vec![a.x.clone(), a.y.clone()];
            let (_, cols, dropped) = dated_columns(&frame, &names)?;
            let mut r = ctx.report("drift h2");
            for w in warnings {
                r.warn(w);
            }
            if dropped > 0 {
                r.warn(format!("{dropped} rows with missing values dropped"));
            }
            r.result("source", &format!("dataset columns {} and {}, rows ordered by date", a.x, a.y));
            (Matrix::from_columns(&cols)?, r)
        }
        None => {
            let mut rhos = vec![a.rho_before; a.n_before];
            rhos.extend(std::iter::repeat_n(a.rho_after, a.n_after));
            let xy = simulate_corr_path(&rhos, RandomSeed(ctx.global.seed))?;
            let mut r = ctx.report("drift h2");
            r.result(
                "source",
                &format!("synthetic path, {} rows at rho {} then {} rows at rho {}", a.n_before, a.rho_before, a.n_after, a.rho_after),
            );
            (xy, r)
        }
    };
    let corr = h2a_corr_shift(&xy, a.min_rows)?.with_alpha(alpha);
    let mi = h2b_mi_shift(&xy, a.min_rows)?.with_alpha(alpha);
    let windows = mi_windows(&xy, a.min_rows, Some(H2B_BINS), BinningMode::EqualFrequency)?;
    r.n("rows", xy.rows());
    r.n("windows", windows.len());
    r.result("correlation_shift", &corr);
    r.result("mi_shift", &mi);
    r.result("mi_bins", &H2B_BINS);
    // MI is estimated in nats and reported in bits
    let mut csv = String::from("window,n,r,mi_bits\n");
    for w in &windows {
        let show = |v: Option<f64>| v.map_or("NA".to_string(), |x| x.to_string());
        csv.push_str(&format!("{},{},{},{}\n", w.index, w.n, show(w.correlation), show(w.mi.map(|v| v / std::f64::consts::LN_2))));
    }
    r.table("windows.csv", csv);
    r.line(format!("correlation shift (fisher z)  p = {:.3e}  reject = {}", corr.p_value, corr.reject));
    r.line(format!("MI shift (signed rank)        p = {:.3e}  reject = {}", mi.p_value, mi.reject));
    Ok(r)
}

pub(crate) fn poss(ctx: &mut Ctx, a: &PossArgs) -> CliResult<Report> {
    let (xs, mut r) = match &a.data {
        Some(path) => {
            let (frame, warnings) = load(ctx, Some(path))?;
            let (_, cols, dropped) = dated_columns(&frame, std::slice::from_ref(&a.column))?;
            let mut r = ctx.report("drift poss");
            for w in warnings {
                r.warn(w);
            }
            if dropped > 0 {
                r.warn(format!("{dropped} rows with missing values dropped"));
            }
            r.result("source", &format!("dataset column {}, rows ordered by date", a.column));
            (cols.into_iter().next().unwrap(), r)
        }
        None => {
            let panel = simulate_decay_panel(a.times, a.obs, RandomSeed(ctx.global.seed))?;
            let mut r = ctx.report("drift poss");
            r.result("source", &format!("synthetic decay panel, {} times x {} observations", a.times, a.obs));
            (panel.data.column(0), r)
        }
    };
    let bins = a.bins.unwrap_or_else(|| sturges_bins(xs.len()));
    let u = possibilistic_drift(&xs, a.windows, bins)?;
    r.n("rows", xs.len());
    r.result("bins", &bins);
    r.result("max_nonspecificity", &(bins as f64).log2());
    r.result("nonspecificity", &u);
    let mut csv = String::from("window,rows,nonspecificity\n");
    for (w, v) in u.iter().enumerate() {
        let rows = ((w + 1) * xs.len()).div_ceil(a.windows);
        csv.push_str(&format!("{},{rows},{v}\n", w + 1));
    }
    r.table("nonspecificity.csv", csv);
    let first = u.first().copied().unwrap_or(0.0);
    let last = u.last().copied().unwrap_or(0.0);
    r.line(format!("nonspecificity {first:.4} -> {last:.4} bits over {} windows ({bins} bins)", a.windows));
    Ok(r)
}
