//! Subcommands that read the garment dataset.

use std::path::Path;

use serde::Serialize;

use driftlab::eda::{correlation_matrix, correlation_matrix_complete, distribution_summary, edges_to_csv, web_edges, CorrelationMatrix};
use driftlab::factor::{efa_fit, kaiser_count, variance_table};
use driftlab::ingest::{load_path, validation_report, Frame, FACTOR_COLUMNS};
use driftlab::regress::{durbin_watson, ols_fit, residual_mean_test, significance_stars};

use crate::report::Report;
use crate::{resolve_data, CliError, CliResult, Ctx, DataArg, EfaArgs, RegressArgs};

/// Loads the dataset and records its digest and load warnings.
pub(crate) fn load(ctx: &mut Ctx, data: Option<&Path>) -> CliResult<(Frame, Vec<String>)> {
    let path = resolve_data(data)?;
    ctx.input(&path)?;
    let frame = load_path(&path)?;
    let mut warnings = Vec::new();
    if !frame.cell_errors().is_empty() {
        warnings.push(format!("{} cells could not be parsed and are treated as missing", frame.cell_errors().len()));
    }
    for w in frame.range_warnings() {
        warnings.push(format!(
            "row {} {} = {} lies outside [{}, {}]; kept",
            w.row + 1,
            w.column,
            w.value,
            w.range.0,
            w.range.1
        ));
    }
    Ok((frame, warnings))
}

fn columns_or_default(columns: &[String]) -> Vec<String> {
    if columns.is_empty() {
        FACTOR_COLUMNS.iter().map(|s| s.to_string()).collect()
    } else {
        columns.to_vec()
    }
}

fn with_warnings(mut r: Report, warnings: Vec<String>) -> Report {
    for w in warnings {
        r.warn(w);
    }
    r
}

#[derive(Serialize)]
struct Validation {
    rows: usize,
    columns: Vec<String>,
    missing: Vec<(String, usize)>,
    rejected_cells: usize,
    range_warnings: usize,
}

pub(crate) fn validate(ctx: &mut Ctx, d: &DataArg) -> CliResult<Report> {
    let (frame, warnings) = load(ctx, d.data.as_deref())?;
    let mut r = with_warnings(ctx.report("ingest validate"), warnings);
    let names: Vec<String> = frame.column_names().iter().map(|s| s.to_string()).collect();
    let missing = names.iter().map(|n| (n.clone(), frame.missing_count(n).unwrap_or(0))).collect();
    r.result(
        "validation",
        &Validation {
            rows: frame.n_rows(),
            columns: names,
            missing,
            rejected_cells: frame.cell_errors().len(),
            range_warnings: frame.range_warnings().len(),
        },
    );
    r.result("cell_errors", &frame.cell_errors());
    r.n("rows", frame.n_rows());
    r.line(validation_report(&frame));
    Ok(r)
}

fn corr_table(c: &CorrelationMatrix) -> Vec<Vec<f64>> {
    (0..c.order()).map(|i| (0..c.order()).map(|j| c.get(i, j)).collect()).collect()
}

pub(crate) fn corr(ctx: &mut Ctx, d: &DataArg, columns: &[String]) -> CliResult<Report> {
    let (frame, warnings) = load(ctx, d.data.as_deref())?;
    let cols = columns_or_default(columns);
    let c = correlation_matrix(&frame, &cols)?;
    let mut r = with_warnings(ctx.report("eda corr"), warnings);
    let (lo, hi) = c.n_range();
    r.n("pairwise_min", lo);
    r.n("pairwise_max", hi);
    r.result("method", &"pearson, pairwise complete");
    r.result("labels", &c.labels());
    r.result("correlation", &corr_table(&c));
    r.table("correlation.csv", c.to_csv());
    r.line(format!("correlation matrix of {} columns, pairwise n in [{lo}, {hi}]", cols.len()));
    Ok(r)
}

pub(crate) fn dist(ctx: &mut Ctx, d: &DataArg, column: &str) -> CliResult<Report> {
    let (frame, warnings) = load(ctx, d.data.as_deref())?;
    let s = distribution_summary(&frame, column)?;
    let mut r = with_warnings(ctx.report("eda dist"), warnings);
    r.n(column, s.n);
    let mut csv = String::from("lower,upper,count\n");
    for (k, c) in s.histogram.counts.iter().enumerate() {
        csv.push_str(&format!("{},{},{}\n", s.histogram.edges[k], s.histogram.edges[k + 1], c));
    }
    r.table("histogram.csv", csv);
    r.line(format!(
        "{column}: n = {}, mean = {:.6}, median = {:.6}, sd = {:.6}, outliers = {}",
        s.n,
        s.mean,
        s.median,
        s.sd,
        s.outliers.len()
    ));
    r.result("summary", &s);
    Ok(r)
}

pub(crate) fn web(ctx: &mut Ctx, d: &DataArg, columns: &[String], threshold: f64) -> CliResult<Report> {
    let (frame, warnings) = load(ctx, d.data.as_deref())?;
    let cols = columns_or_default(columns);
    let c = correlation_matrix(&frame, &cols)?;
    let edges = web_edges(&c, threshold)?;
    let mut r = with_warnings(ctx.report("eda web"), warnings);
    let (lo, hi) = c.n_range();
    r.n("pairwise_min", lo);
    r.n("pairwise_max", hi);
    r.result("threshold", &threshold);
    r.result("edges", &edges);
    r.table("edges.csv", edges_to_csv(&edges));
    r.line(format!("{} edges with |r| >= {threshold}", edges.len()));
    Ok(r)
}

pub(crate) fn efa(ctx: &mut Ctx, a: &EfaArgs) -> CliResult<Report> {
    let (frame, warnings) = load(ctx, a.data.data.as_deref())?;
    let cols = columns_or_default(&a.columns);
    let c = correlation_matrix_complete(&frame, &cols)?;
    let kaiser = kaiser_count(&c)?;
    let k = a.factors.unwrap_or(kaiser);
    let m = efa_fit(&c, k)?;
    let mut r = with_warnings(ctx.report("efa"), warnings);
    r.n("complete_cases", c.n_range().0);
    if !m.converged {
        r.warn(format!("optimizer stopped after {} iterations without meeting the gradient tolerance", m.iterations));
    }
    r.result("method", &"maximum likelihood, complete-case correlations");
    r.result("kaiser_count", &kaiser);
    r.result("factors", &k);
    r.result("variables", &m.variables);
    r.result("uniquenesses", &m.uniquenesses);
    r.result("communalities", &m.communalities());
    r.result("at_floor", &m.at_floor());
    r.result("loadings", &m.loadings.to_rows());
    r.result("variance", &variance_table(&m));
    r.result("objective", &m.objective);
    r.result("dof", &m.dof);
    r.result("converged", &m.converged);
    r.result("iterations", &m.iterations);
    let mut csv = String::from("variable");
    for f in 1..=k {
        csv.push_str(&format!(",factor{f}"));
    }
    csv.push_str(",uniqueness\n");
    for (i, v) in m.variables.iter().enumerate() {
        csv.push_str(v);
        for f in 0..k {
            csv.push_str(&format!(",{}", m.loadings[(i, f)]));
        }
        csv.push_str(&format!(",{}\n", m.uniquenesses[i]));
    }
    r.table("loadings.csv", csv);
    let cum = variance_table(&m).last().map_or(0.0, |v| v.cumulative);
    r.line(format!("kaiser count {kaiser}; {k}-factor fit, cumulative variance {cum:.4}"));
    for (v, u) in m.variables.iter().zip(&m.uniquenesses) {
        r.line(format!("  uniqueness {v:<22} {u:.4}"));
    }
    Ok(r)
}

pub(crate) fn regress(ctx: &mut Ctx, a: &RegressArgs) -> CliResult<Report> {
    let (frame, warnings) = load(ctx, a.data.data.as_deref())?;
    let n = frame.n_rows();
    let has = |name: &str| frame.column_names().contains(&name);
    let fetch = |name: &str| -> CliResult<Vec<Option<f64>>> {
        if name == "t" && !has("t") {
            Ok((1..=n).map(|i| Some(i as f64)).collect())
        } else {
            Ok(frame.numeric(name)?)
        }
    };
    let y = fetch(&a.y)?;
    let xs: Vec<Vec<Option<f64>>> = a.x.iter().map(|c| fetch(c)).collect::<CliResult<_>>()?;
    let keep: Vec<usize> = (0..n).filter(|&i| y[i].is_some() && xs.iter().all(|x| x[i].is_some())).collect();
    if keep.is_empty() {
        return Err(CliError("empty-sample: no complete rows for the requested columns".into()));
    }
    let yv: Vec<f64> = keep.iter().map(|&i| y[i].unwrap()).collect();
    let terms: Vec<(String, Vec<f64>)> =
        a.x.iter().zip(&xs).map(|(name, x)| (name.clone(), keep.iter().map(|&i| x[i].unwrap()).collect())).collect();
    let s = ols_fit(&a.y, &yv, &terms, !a.no_intercept)?;
    let resid_test = residual_mean_test(&s.residuals, ctx.global.alpha)?;
    let dw = durbin_watson(&s.residuals)?;

    let mut r = with_warnings(ctx.report("regress"), warnings);
    if keep.len() < n {
        r.warn(format!("{} rows with missing values dropped", n - keep.len()));
    }
    r.n("regression", s.n);
    r.result("method", &"ordinary least squares");
    r.result("summary", &s);
    let stars: Vec<(&str, &str)> = s.coefficients.iter().map(|c| (c.name.as_str(), significance_stars(c.p_value))).collect();
    r.result("significance", &stars);
    r.result("residual_mean_test", &resid_test);
    r.result("durbin_watson", &dw);
    let mut csv = String::from("row,fitted,residual\n");
    for ((i, f), e) in keep.iter().zip(&s.fitted).zip(&s.residuals) {
        csv.push_str(&format!("{},{f},{e}\n", i + 1));
    }
    r.table("residuals.csv", csv);
    let text = s.to_text();
    r.table("summary.txt", text.clone());
    r.line(text);
    r.line(format!("Durbin-Watson: {dw:.4}"));
    Ok(r)
}
