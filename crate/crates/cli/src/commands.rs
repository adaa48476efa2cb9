use std::fs;

use nalgebra::Matrix4;
use serde_json::{json, Value};
use umbilic_core::cubic_forms::{index_form, is_transversal, umbilic_index, DEFAULT_TRANSVERSALITY_TOL};
use umbilic_core::invariant_metrics::{
    average, average_numeric, check_admissible, leading_minors, q_pattern,
};
use umbilic_core::principal_field::winding_index;
use umbilic_core::volume_geometry::{
    chunk_size, cone_volumes, gaussian_census, mc_ball_volume, mc_ratio_with_mode,
    ratio_closed_form, SamplingMode, DISCARD_TOL, UNIT_BALL_VOLUME,
};
use umbilic_core::{CubicForm, Error as CoreError, InvariantMetric, McEstimate, MongeSurface};

use crate::error::{exit, CliError};
use crate::report::{float_cell, to_json_string, Report, RunConfig};
use crate::{
    svg, AverageArgs, CensusArgs, Cli, CubicArgs, FoliationArgs, Format, IndexArgs, McArgs,
    McMode, MetricArgs, Outcome, Sampling,
};

fn resolve_format(cli: &Cli, allowed: &[Format]) -> Result<Format, CliError> {
    match cli.format {
        None => Ok(allowed[0]),
        Some(f) if allowed.contains(&f) => Ok(f),
        Some(f) => Err(CliError::Input(format!(
            "format '{}' is not supported by this command",
            f.name()
        ))),
    }
}

fn config(cli: &Cli, command: &str, format: Format) -> RunConfig {
    RunConfig::new(command, cli.seed, format.name())
}

fn matrix_rows(m: &Matrix4<f64>) -> Vec<[f64; 4]> {
    (0..4).map(|i| [m[(i, 0)], m[(i, 1)], m[(i, 2)], m[(i, 3)]]).collect()
}

fn json_report(config: RunConfig, result: Value) -> String {
    to_json_string(&Report { config, result })
}

fn read_metric_params(path: &std::path::Path) -> Result<(f64, f64), CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })?;
    let doc: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("{}: not valid JSON: {e}", path.display())))?;
    let field = |name: &str| {
        doc.pointer(&format!("/result/{name}"))
            .and_then(Value::as_f64)
            .ok_or_else(|| CliError::Input(format!("{}: missing result.{name}", path.display())))
    };
    Ok((field("alpha")?, field("beta")?))
}

pub fn metric_result(q: &InvariantMetric) -> Result<Value, CliError> {
    let ev = q.relative_eigenvalues()?;
    let (closed_plus, closed_minus) = q.relative_eigenvalues_closed_form();
    let cones = cone_volumes(q);
    let frame: Vec<[f64; 4]> = q.frame().vectors().iter().map(|v| v.to_array()).collect();
    Ok(json!({
        "alpha": q.alpha(),
        "beta": q.beta(),
        "admissible": true,
        "q_matrix": matrix_rows(q.q_matrix()),
        "leading_minors": leading_minors(q.q_matrix()),
        "m1": q.m1(),
        "m2": q.m2(),
        "sigma": q.asymmetry(),
        "ratio": ratio_closed_form(q),
        "relative_eigenvalues": {
            "plus": ev.plus,
            "minus": ev.minus,
            "all": ev.all,
            "closed_form_plus": closed_plus,
            "closed_form_minus": closed_minus,
        },
        "beta0": cones.beta0,
        "v_plus": cones.v_plus,
        "v_minus": cones.v_minus,
        "v_total": cones.v_total,
        "frame": frame,
    }))
}

pub fn cmd_metric(cli: &Cli, args: &MetricArgs) -> Result<Outcome, CliError> {
    let format = resolve_format(cli, &[Format::Json])?;
    let (alpha, beta) = match (&args.from_json, args.alpha, args.beta) {
        (Some(path), _, _) => read_metric_params(path)?,
        (None, Some(a), Some(b)) => (a, b),
        _ => return Err(CliError::Input("both --alpha and --beta are required".into())),
    };
    let mut cfg = config(cli, "metric", format)
        .param("alpha", alpha)
        .param("beta", beta);
    if let Some(path) = &args.from_json {
        cfg = cfg.param("from_json", path.display().to_string());
    }
    match InvariantMetric::new(alpha, beta) {
        Ok(q) => Ok(Outcome::ok(json_report(cfg, metric_result(&q)?))),
        Err(err @ CoreError::NotAdmissible { .. }) => {
            let q = q_pattern(alpha, beta);
            let result = json!({
                "alpha": alpha,
                "beta": beta,
                "admissible": false,
                "q_matrix": matrix_rows(&q),
                "leading_minors": leading_minors(&q),
                "diagnostic": err.to_string(),
            });
            Ok(Outcome {
                body: json_report(cfg, result),
                code: exit::INVALID_INPUT,
            })
        }
        Err(e) => Err(e.into()),
    }
}

pub fn cmd_average(cli: &Cli, args: &AverageArgs) -> Result<Outcome, CliError> {
    let format = resolve_format(cli, &[Format::Json])?;
    let e = &args.entries;
    if e.len() != 10 || e.iter().any(|x| !x.is_finite()) {
        return Err(CliError::Input("expected 10 finite upper-triangular entries".into()));
    }
    #[rustfmt::skip]
    let m = Matrix4::new(
        e[0], e[1], e[2], e[3],
        e[1], e[4], e[5], e[6],
        e[2], e[5], e[7], e[8],
        e[3], e[6], e[8], e[9],
    );
    let closed = average(&m)?;
    let numeric = average_numeric(&m, args.nodes)?;
    let residual = (numeric - closed.matrix).amax();
    let cfg = config(cli, "average", format)
        .param("entries", e)
        .param("nodes", args.nodes);
    let result = json!({
        "alpha": closed.alpha,
        "beta": closed.beta,
        "averaged_matrix": matrix_rows(&closed.matrix),
        "numeric_matrix": matrix_rows(&numeric),
        "residual": residual,
        "admissible": check_admissible(closed.alpha, closed.beta).is_ok(),
    });
    Ok(Outcome::ok(json_report(cfg, result)))
}

fn estimate_json(est: &McEstimate, target: f64) -> Value {
    let z = est.z_score(target);
    json!({
        "estimate": est.estimate,
        "std_error": est.std_error,
        "n_samples": est.n_samples,
        "n_discarded": est.n_discarded,
        "seed": est.seed,
        "target": target,
        "z_score": z,
        "within_3_sigma": z.abs() <= 3.0,
    })
}

pub fn cmd_mc(cli: &Cli, args: &McArgs) -> Result<Outcome, CliError> {
    let format = resolve_format(cli, &[Format::Json])?;
    let q = InvariantMetric::new(args.alpha, args.beta)?;
    let sampling = match args.sampling {
        Sampling::Sphere => SamplingMode::Sphere,
        Sampling::Ball => SamplingMode::Ball,
    };
    let (mode, est, target) = match args.mode {
        McMode::Ratio => (
            "ratio",
            mc_ratio_with_mode(&q, args.n, cli.seed, sampling)?,
            ratio_closed_form(&q),
        ),
        McMode::Volume => ("volume", mc_ball_volume(&q, args.n, cli.seed)?, UNIT_BALL_VOLUME),
        McMode::Census => ("census", gaussian_census(&q, args.n, cli.seed)?, ratio_closed_form(&q)),
    };
    let sampling_name = match sampling {
        SamplingMode::Sphere => "sphere",
        SamplingMode::Ball => "ball",
    };
    let cfg = config(cli, "mc", format)
        .param("alpha", args.alpha)
        .param("beta", args.beta)
        .param("n", args.n)
        .param("mode", mode)
        .param("sampling", sampling_name);
    let mut result = estimate_json(&est, target);
    let obj = result.as_object_mut().expect("object");
    obj.insert("mode".into(), json!(mode));
    obj.insert("sampling".into(), json!(sampling_name));
    obj.insert("alpha".into(), json!(args.alpha));
    obj.insert("beta".into(), json!(args.beta));
    obj.insert("chunk_size".into(), json!(chunk_size()));
    obj.insert("discard_tol".into(), json!(DISCARD_TOL));
    Ok(Outcome::ok(json_report(cfg, result)))
}

pub fn cmd_census(cli: &Cli, args: &CensusArgs) -> Result<Outcome, CliError> {
    let format = resolve_format(cli, &[Format::Json, Format::Csv])?;
    if args.alpha.len() != args.beta.len() {
        return Err(CliError::Input(format!(
            "{} --alpha values but {} --beta values",
            args.alpha.len(),
            args.beta.len()
        )));
    }
    let mut rows = Vec::with_capacity(args.alpha.len());
    for (&alpha, &beta) in args.alpha.iter().zip(&args.beta) {
        let q = InvariantMetric::new(alpha, beta)?;
        let est = gaussian_census(&q, args.n, cli.seed)?;
        rows.push((alpha, beta, est, ratio_closed_form(&q)));
    }
    let body = match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let csv_err = |e: csv::Error| CliError::Consistency(format!("CSV encoding failed: {e}"));
            w.write_record([
                "command", "version", "seed", "alpha", "beta", "n_samples", "n_discarded",
                "estimate", "std_error", "target", "z_score",
            ])
            .map_err(csv_err)?;
            for (alpha, beta, est, target) in &rows {
                w.write_record([
                    "census".to_owned(),
                    crate::report::VERSION.to_owned(),
                    cli.seed.to_string(),
                    float_cell(*alpha),
                    float_cell(*beta),
                    est.n_samples.to_string(),
                    est.n_discarded.to_string(),
                    float_cell(est.estimate),
                    float_cell(est.std_error),
                    float_cell(*target),
                    float_cell(est.z_score(*target)),
                ])
                .map_err(csv_err)?;
            }
            let bytes = w
                .into_inner()
                .map_err(|e| CliError::Consistency(format!("CSV encoding failed: {e}")))?;
            String::from_utf8(bytes).expect("CSV is UTF-8")
        }
        _ => {
            let cfg = config(cli, "census", format)
                .param("alpha", &args.alpha)
                .param("beta", &args.beta)
                .param("n", args.n);
            let rows: Vec<Value> = rows
                .iter()
                .map(|(alpha, beta, est, target)| {
                    let mut row = estimate_json(est, *target);
                    let obj = row.as_object_mut().expect("object");
                    obj.insert("alpha".into(), json!(alpha));
                    obj.insert("beta".into(), json!(beta));
                    row
                })
                .collect();
            json_report(cfg, json!({ "rows": rows }))
        }
    };
    Ok(Outcome::ok(body))
}

fn cubic_of(args: &CubicArgs) -> Result<CubicForm, CliError> {
    let u = CubicForm::new(args.a, args.b, args.b_prime, args.a_prime);
    if !u.is_finite() || !args.k.is_finite() {
        return Err(CliError::Input("coefficients must be finite".into()));
    }
    Ok(u)
}

pub fn cmd_index(cli: &Cli, args: &IndexArgs) -> Result<Outcome, CliError> {
    let format = resolve_format(cli, &[Format::Json])?;
    let u = cubic_of(&args.cubic)?;
    let t = index_form(&u);
    let cfg = config(cli, "index", format)
        .param("cubic", u.to_array())
        .param("k", args.cubic.k)
        .param("radius", args.radius)
        .param("steps", args.steps);
    if !is_transversal(&u, DEFAULT_TRANSVERSALITY_TOL) {
        let result = json!({
            "t": t,
            "transversal": false,
            "index": null,
            "winding": null,
            "agree": null,
            "diagnostic": CoreError::NonTransversal { t }.to_string(),
        });
        return Ok(Outcome {
            body: json_report(cfg, result),
            code: exit::INVALID_INPUT,
        });
    }
    let index = umbilic_index(&u, DEFAULT_TRANSVERSALITY_TOL)?;
    let winding = winding_index(&MongeSurface::new(args.cubic.k, u), args.radius, args.steps)?;
    let agree = winding == index;
    let result = json!({
        "t": t,
        "transversal": true,
        "index": index,
        "index_label": index.to_string(),
        "winding": winding,
        "agree": agree,
    });
    Ok(Outcome {
        body: json_report(cfg, result),
        code: if agree { exit::OK } else { exit::CONSISTENCY },
    })
}

pub fn cmd_foliation(cli: &Cli, args: &FoliationArgs) -> Result<Outcome, CliError> {
    let format = resolve_format(cli, &[Format::Svg])?;
    let u = cubic_of(&args.cubic)?;
    if !(args.window > 0.0 && args.window.is_finite()) {
        return Err(CliError::Input("--window must be positive".into()));
    }
    if args.density == 0 {
        return Err(CliError::Input("--density must be at least 1".into()));
    }
    let cfg = config(cli, "foliation", format)
        .param("cubic", u.to_array())
        .param("k", args.cubic.k)
        .param("window", args.window)
        .param("density", args.density);
    let surface = MongeSurface::new(args.cubic.k, u);
    let doc = svg::render_foliation(&surface, args.window, args.density, &cfg)?;
    Ok(Outcome::ok(doc))
}
