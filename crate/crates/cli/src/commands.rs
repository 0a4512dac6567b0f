use std::fs;
use std::path::{Path, PathBuf};

use loewner_range::{
    assemble_boundary, audit_polygon, extremal_sharpness, parametric_curve, pontryagin_spot_check,
    unrestricted_boundary, unrestricted_polygon, unrestricted_residual, BoundaryCurve64,
    DriverSampler, Horizon, Propagation, Sampling,
};

use crate::config::{Cli, Command, OutputArgs, Preset, RunConfig};
use crate::error::CliError;
use crate::{svg, table};

/// Largest implicit-equation residual accepted by `--thm1-check`.
pub const PARAMETRIC_TOLERANCE: f64 = 1e-8;
pub const SHARPNESS_TOLERANCE: f64 = 1e-6;
pub const SPOT_CHECK_TOLERANCE: f64 = 1e-6;

/// Lines for standard output and standard error.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct Output {
    pub stdout: Vec<String>,
    pub stderr: Vec<String>,
}

impl Output {
    fn kv(&mut self, key: &str, value: impl std::fmt::Display) {
        self.stdout.push(format!("{key}={value}"));
    }
}

pub fn run(cli: &Cli, out: &mut Output) -> Result<(), CliError> {
    match &cli.command {
        Command::Boundary(args) => {
            let cfg = RunConfig::from_args(args);
            let stem = format!("boundary_T{}_c{}", cfg.t, cfg.c.unwrap_or(f64::NAN));
            cmd_boundary(&cfg, &stem, out)
        }
        Command::Unrestricted {
            run,
            parametric_check,
        } => {
            let cfg = RunConfig::from_args(run);
            cmd_unrestricted(
                &cfg,
                *parametric_check,
                &format!("unrestricted_T{}", cfg.t),
                out,
            )
        }
        Command::Verify(args) => cmd_verify(&RunConfig::from_args(args), out),
        Command::Figure { preset, output } => cmd_figure(*preset, output, out),
    }
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| CliError::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io(dir))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(io(&path))?;
    Ok(path)
}

fn emit_curves(
    cfg: &RunConfig,
    stem: &str,
    curves: &[BoundaryCurve64],
    legend: &[String],
    out: &mut Output,
) -> Result<(), CliError> {
    if cfg.output_format.csv() {
        let text = table::render(&table::rows_from_curves(curves));
        let path = write_file(&cfg.output_path, &format!("{stem}.csv"), &text)?;
        out.kv("csv", path.display());
    }
    if cfg.output_format.svg() {
        let path = write_file(
            &cfg.output_path,
            &format!("{stem}.svg"),
            &svg::render(curves, legend),
        )?;
        out.kv("svg", path.display());
    }
    Ok(())
}

/// Boundary curves of the bounded-driver value range in stitch order.
pub fn cmd_boundary(cfg: &RunConfig, stem: &str, out: &mut Output) -> Result<(), CliError> {
    let c = cfg.bounded()?;
    let b = assemble_boundary(cfg.t, c, &Sampling::with_points(cfg.n_points))?;
    out.kv("T", cfg.t);
    out.kv("c", c);
    out.kv("case", b.case_tag.number());
    out.kv("y0", b.y0);
    out.kv("p0", b.p0());
    if let Some(p1) = b.roots.p1 {
        out.kv("p1", p1);
    }
    if let Some(p2) = b.roots.p2 {
        out.kv("p2", p2);
    }
    let curves: Vec<String> = b
        .curves
        .iter()
        .map(|cv| cv.id.label().to_string())
        .collect();
    out.kv("curves", curves.join(","));
    out.kv("vertices", b.polygon.len());
    out.kv("max_stitch_gap", b.max_stitch_gap);
    for note in &b.notes {
        out.kv("note", note);
    }
    let legend = [
        format!("case {}", b.case_tag.number()),
        format!("T={} c={}", cfg.t, c),
    ];
    emit_curves(cfg, stem, &b.curves, &legend, out)
}

/// Boundary of the unrestricted value range, both halves.
pub fn cmd_unrestricted(
    cfg: &RunConfig,
    parametric_check: bool,
    stem: &str,
    out: &mut Output,
) -> Result<(), CliError> {
    cfg.validate()?;
    let right = unrestricted_boundary(cfg.t, &Sampling::with_points(cfg.n_points))?;
    let curves = [right.clone(), right.mirrored()];
    out.kv("T", cfg.t);
    out.kv("y_bottom", right.first().y);
    out.kv("y_top", right.last().y);
    out.kv("vertices", 2 * right.points.len() - 2);
    emit_curves(cfg, stem, &curves, &[format!("T={}", cfg.t)], out)?;
    if parametric_check {
        let pts = parametric_curve(cfg.t, 100)?;
        let worst = pts
            .points
            .iter()
            .map(|p| unrestricted_residual(cfg.t, p.x, p.y).abs())
            .fold(0.0, f64::max);
        out.kv("parametric_points", pts.points.len());
        out.kv("parametric_max_residual", worst);
        if !(worst < PARAMETRIC_TOLERANCE) {
            return Err(CliError::Audit(format!(
                "parametric residual {worst:e} exceeds {PARAMETRIC_TOLERANCE:e}"
            )));
        }
    }
    Ok(())
}

/// Containment audit, extremal round trip and maximum-principle spot check.
pub fn cmd_verify(cfg: &RunConfig, out: &mut Output) -> Result<(), CliError> {
    let c = cfg.bounded()?;
    let sampling = Sampling::with_points(cfg.n_points);
    let b = assemble_boundary(cfg.t, c, &sampling)?;
    let outer = unrestricted_polygon(cfg.t, &sampling)?;
    let sampler = DriverSampler::new(c, Horizon::new(cfg.t)?)?;
    if cfg.n_samples == 0 {
        out.stderr
            .push("warning: zero samples requested; containment holds vacuously".into());
    }
    let prop = Propagation::ClosedForm;
    let report = audit_polygon(
        &b.polygon,
        &sampler,
        cfg.n_samples,
        cfg.seed,
        cfg.band,
        prop,
    )?;
    let report_d = audit_polygon(&outer, &sampler, cfg.n_samples, cfg.seed, 0.0, prop)?;
    let sharp = extremal_sharpness(cfg.t, c, cfg.n_points, cfg.tol)?;
    let p0 = b.p0();
    let mut defect = f64::INFINITY;
    for k in 1..=3 {
        let p = c + (p0 - c) * k as f64 / 4.0;
        defect = defect.min(pontryagin_spot_check(cfg.t, c, p, cfg.tol)?);
    }

    let mut lines = Output::default();
    lines.kv("T", cfg.t);
    lines.kv("c", c);
    lines.kv("case", b.case_tag.number());
    lines.kv("seed", report.seed);
    lines.kv("band", cfg.band);
    lines.kv("n_samples", report.n_samples);
    lines.kv("n_inside", report.n_inside);
    lines.kv("n_on_boundary", report.n_on_boundary);
    lines.kv("n_outside", report.n_outside);
    lines.kv("max_violation", report.max_violation);
    lines.kv("n_outside_unrestricted", report_d.n_outside);
    lines.kv("sharpness", sharp.max);
    lines.kv("spot_check_defect", defect);
    let mut failures = Vec::new();
    if report.n_outside > 0 {
        failures.push(format!(
            "{} endpoints outside the boundary",
            report.n_outside
        ));
    }
    if report_d.n_outside > 0 {
        failures.push(format!(
            "{} endpoints outside the unrestricted range",
            report_d.n_outside
        ));
    }
    if !(sharp.max < SHARPNESS_TOLERANCE) {
        failures.push(format!("sharpness {:e}", sharp.max));
    }
    if !(defect >= -SPOT_CHECK_TOLERANCE) {
        failures.push(format!("spot-check defect {defect:e}"));
    }
    lines.kv("pass", failures.is_empty());
    let mut text = lines.stdout.join("\n");
    text.push('\n');
    let path = write_file(
        &cfg.output_path,
        &format!("verify_T{}_c{}.txt", cfg.t, c),
        &text,
    )?;
    out.stdout.extend(lines.stdout);
    out.kv("report", path.display());
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Audit(failures.join("; ")))
    }
}

/// Named figure scenarios.
pub fn cmd_figure(preset: Preset, output: &OutputArgs, out: &mut Output) -> Result<(), CliError> {
    let (t, c) = preset.parameters();
    out.kv("preset", preset.name());
    let cfg = RunConfig::new(t, c, output);
    match preset {
        Preset::Fig1bReject => {
            out.kv("T", t);
            out.kv("status", "out_of_scope");
            out.kv(
                "note",
                "for T >= 1/4 the value range reaches the real axis; only 0 < T < 1/4 is computed, no file written",
            );
            Ok(())
        }
        Preset::Fig1a => cmd_unrestricted(&cfg, false, preset.name(), out),
        Preset::Fig2a | Preset::Fig2b | Preset::Fig3 => cmd_boundary(&cfg, preset.name(), out),
    }
}
