use std::fs;
use std::io::Write;

use super::config::{OrdinationChoice, RunConfig};
use super::io_error;
use super::output::{
    write_coefficients, write_json, write_reflections, write_scores, BiplotSummary, ReportInputs, RunReport,
};
use super::pipeline::{default_axes, load, read_input, run_ca, run_cca, Inputs};
use crate::biplot::{
    assemble_biplot, group_centroids, intraclass_correlations, parse_lall_csv, render_svg, scale_type1,
    write_points_csv, write_rays_csv, BiplotOptions, PointKind, ProductLayer,
};
use crate::ca::method_of_reflections;
use crate::error::{Error, Result};
use crate::ordination::{EquivalenceReport, Ordination};
use crate::synth::{generate, SynthParams};

/// Exit code of `validate` when a check fails.
pub const VALIDATION_FAILED: i32 = 11;

/// Iterative and direct solvers must agree this closely under `validate`.
const EQUIVALENCE_TOL: f64 = 1e-6;

fn prepare_out(cfg: &RunConfig) -> Result<()> {
    fs::create_dir_all(&cfg.out).map_err(|e| io_error(&cfg.out, e))
}

fn print_summary(out: &mut dyn Write, report: &RunReport) -> Result<()> {
    writeln!(
        out,
        "{} on {} products x {} countries ({} dropped products, {} dropped countries)",
        report.ordination.axis_prefix(),
        report.products,
        report.countries,
        report.pruned.dropped_products.len(),
        report.pruned.dropped_countries.len()
    )?;
    for (j, (l, s)) in report.eigenvalues.iter().zip(&report.inertia_shares).enumerate() {
        writeln!(out, "  axis {}: eigenvalue {:.6}, inertia {:.2}%", j + 1, l, 100.0 * s)?;
    }
    if let Some(eq) = &report.equivalence {
        writeln!(
            out,
            "  {} vs {}: min |correlation| {:.12}, max eigenvalue gap {:.3e}",
            eq.left,
            eq.right,
            eq.min_abs_correlation(),
            eq.max_eigenvalue_gap()
        )?;
    }
    Ok(())
}

pub fn cmd_ca(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let Inputs { sm, digests, .. } = load(cfg, false)?;
    let k = default_axes(cfg, sm.n_countries() - 1);
    let solved = run_ca(cfg, &sm, k)?;
    prepare_out(cfg)?;
    let ca = &solved.result;
    write_scores(&cfg.out.join("eci.csv"), "country", "axis", sm.country_labels(), &ca.country_axes)?;
    write_scores(&cfg.out.join("pci.csv"), "product", "axis", sm.product_labels(), &ca.product_axes)?;
    if let Some(steps) = cfg.reflections {
        write_reflections(&cfg.out.join("reflections.csv"), &sm, &method_of_reflections(&sm, steps))?;
    }
    let inputs = ReportInputs {
        command: "ca",
        method: cfg.method,
        config: cfg.echo(k),
        digests: &digests,
        sm: &sm,
        operator: None,
        equivalence: solved.equivalence.clone(),
        spectrum: ca.spectrum.clone(),
    };
    let report = RunReport::new(inputs, solved.all());
    write_json(&cfg.out.join("report.json"), &report)?;
    print_summary(out, &report)?;
    Ok(0)
}

pub fn cmd_cca(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let Inputs { sm, env, digests } = load(cfg, true)?;
    let env = env.expect("variables are required");
    let k = default_axes(cfg, env.z());
    let (solved, op) = run_cca(cfg, &sm, &env, k)?;
    prepare_out(cfg)?;
    let r = &solved.result;
    write_scores(&cfg.out.join("e_std.csv"), "country", "cca", sm.country_labels(), &r.e_std)?;
    write_scores(&cfg.out.join("v.csv"), "country", "cca", sm.country_labels(), &r.v)?;
    write_scores(&cfg.out.join("u.csv"), "product", "cca", sm.product_labels(), &r.u)?;
    write_coefficients(&cfg.out.join("b.csv"), env.names(), &r.b)?;
    let inputs = ReportInputs {
        command: "cca",
        method: cfg.method,
        config: cfg.echo(k),
        digests: &digests,
        sm: &sm,
        operator: Some(&op),
        equivalence: solved.equivalence.clone(),
        spectrum: None,
    };
    let report = RunReport::new(inputs, solved.all());
    write_json(&cfg.out.join("report.json"), &report)?;
    print_summary(out, &report)?;
    Ok(0)
}

fn choose_ordination(cfg: &RunConfig) -> OrdinationChoice {
    cfg.ordination.unwrap_or(if cfg.vars.is_some() { OrdinationChoice::Cca } else { OrdinationChoice::Ca })
}

/// Run the chosen ordination and build its report; `Box<dyn Ordination>`
/// lets the biplot and validate paths treat CA and CCA alike.
fn ordinate(
    cfg: &RunConfig,
    command: &'static str,
    axes: Option<usize>,
) -> Result<(Inputs, Box<dyn Ordination>, RunReport)> {
    let choice = choose_ordination(cfg);
    let inputs = load(cfg, choice == OrdinationChoice::Cca)?;
    let sm = &inputs.sm;
    let (result, report): (Box<dyn Ordination>, RunReport) = match choice {
        OrdinationChoice::Ca => {
            let k = axes.unwrap_or_else(|| default_axes(cfg, sm.n_countries() - 1));
            let solved = run_ca(cfg, sm, k)?;
            let report_inputs = ReportInputs {
                command,
                method: cfg.method,
                config: cfg.echo(k),
                digests: &inputs.digests,
                sm,
                operator: None,
                equivalence: solved.equivalence.clone(),
                spectrum: solved.result.spectrum.clone(),
            };
            let report = RunReport::new(report_inputs, solved.all());
            (Box::new(solved.result), report)
        }
        OrdinationChoice::Cca => {
            let env = inputs.env.as_ref().expect("variables are required");
            let k = axes.unwrap_or_else(|| default_axes(cfg, env.z()));
            let (solved, op) = run_cca(cfg, sm, env, k)?;
            let report_inputs = ReportInputs {
                command,
                method: cfg.method,
                config: cfg.echo(k),
                digests: &inputs.digests,
                sm,
                operator: Some(&op),
                equivalence: solved.equivalence.clone(),
                spectrum: None,
            };
            let report = RunReport::new(report_inputs, solved.all());
            (Box::new(solved.result), report)
        }
    };
    Ok((inputs, result, report))
}

pub fn cmd_biplot(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let (a, b) = cfg.axis_pair;
    let needed = a.max(b);
    let axes = Some(cfg.axes.map_or(needed, |k| k.max(needed)));
    // read the mapping before solving so a bad file fails fast
    let mut digests_extra = std::collections::BTreeMap::new();
    let mapping = match &cfg.lall {
        Some(path) => Some(parse_lall_csv(&read_input(path, "lall", &mut digests_extra)?[..])?),
        None => None,
    };
    let (inputs, result, mut report) = ordinate(cfg, "biplot", axes)?;
    report.input_digests.extend(digests_extra);
    let sm = &inputs.sm;
    let scores = scale_type1(result.as_ref())?;
    let rays = inputs.env.as_ref().map(|env| intraclass_correlations(env, result.country_scores(), sm)).transpose()?;

    let table = mapping.as_ref().map(|m| group_centroids(&scores.u_hat, sm, m)).transpose()?;
    let layer = match &table {
        Some(t) => ProductLayer::Centroids(t),
        None => ProductLayer::Raw(None),
    };
    let options = BiplotOptions { caps: cfg.caps.clone(), back_extension: cfg.back_extension };
    let model = assemble_biplot(&scores, sm, rays.as_ref(), layer, cfg.axis_pair, &options)?;

    prepare_out(cfg)?;
    let svg_path = cfg.out.join("biplot.svg");
    fs::write(&svg_path, render_svg(&model)).map_err(|e| io_error(&svg_path, e))?;
    let points_path = cfg.out.join("biplot_points.csv");
    write_points_csv(&model, fs::File::create(&points_path).map_err(|e| io_error(&points_path, e))?)?;
    let rays_path = cfg.out.join("biplot_rays.csv");
    write_rays_csv(&model, fs::File::create(&rays_path).map_err(|e| io_error(&rays_path, e))?)?;

    if let Some(t) = &table {
        report.warnings.extend(t.warnings.iter().cloned());
        if !t.unmapped.is_empty() {
            report.warnings.push(format!("{} products have no category and form the unmapped group", t.unmapped.len()));
        }
    }
    if !model.clipped.is_empty() {
        report.warnings.push(format!("{} points lie beyond an axis cap and are drawn at the cap", model.clipped.len()));
    }
    report.biplot = Some(BiplotSummary {
        axis_pair: cfg.axis_pair,
        axis_labels: [model.x_axis.label.clone(), model.y_axis.label.clone()],
        countries: model.count(PointKind::Country),
        products: model.count(PointKind::Product),
        centroids: model.count(PointKind::Centroid),
        rays: model.rays.len(),
        clipped: model.clipped.clone(),
        unmapped_products: table.as_ref().map(|t| t.unmapped.clone()).unwrap_or_default(),
    });
    write_json(&cfg.out.join("report.json"), &report)?;
    print_summary(out, &report)?;
    writeln!(out, "  biplot {} vs {}", model.x_axis.label, model.y_axis.label)?;
    for w in &report.warnings {
        writeln!(out, "  warning: {w}")?;
    }
    Ok(0)
}

fn equivalence_ok(eq: &EquivalenceReport) -> bool {
    eq.min_abs_correlation() >= 1.0 - EQUIVALENCE_TOL && eq.max_eigenvalue_gap() <= EQUIVALENCE_TOL
}

pub fn cmd_validate(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let (_, _, report) = ordinate(cfg, "validate", cfg.axes)?;
    prepare_out(cfg)?;
    write_json(&cfg.out.join("report.json"), &report)?;
    print_summary(out, &report)?;
    let res = &report.residuals;
    for a in &res.axes {
        writeln!(
            out,
            "  axis {}: |d'V| {:.3e}, |s'U| {:.3e}, |d'E| {:.3e}, |E'WE-1| {:.3e}{} {}",
            a.axis,
            a.diversity_v,
            a.ubiquity_u,
            a.diversity_e,
            a.unit_variance,
            a.span.map(|s| format!(", span {s:.3e}")).unwrap_or_default(),
            if a.passed { "ok" } else { "FAILED" }
        )?;
    }
    let equivalent = report.equivalence.as_ref().is_none_or(equivalence_ok);
    if !equivalent {
        writeln!(out, "  solvers disagree beyond {EQUIVALENCE_TOL:e}")?;
    }
    Ok(if res.passed && equivalent { 0 } else { VALIDATION_FAILED })
}

pub fn cmd_synth(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let seed = cfg.seed.ok_or_else(|| Error::Argument("synth needs --seed".into()))?;
    let params = SynthParams {
        products: cfg.products,
        countries: cfg.countries,
        epsilon: cfg.epsilon,
        variables: cfg.variables,
        noise: cfg.noise,
        seed,
        ..Default::default()
    };
    let inst = generate(&params)?;
    inst.write_files(&cfg.out)?;
    writeln!(
        out,
        "synthetic {} products x {} countries, {} planted links, {} not reproduced by RCA (attempt {})",
        inst.planted.n_products(),
        inst.planted.n_countries(),
        inst.planted.x_plus(),
        inst.mismatches,
        inst.attempts
    )?;
    Ok(0)
}
