mod config;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::Parser;
use primepow::analytic::{
    gqk_by_quadrature, j_integrals, mainterm_constant_probe, EvalPoint, PowerSeries,
};
use primepow::characters::UnitGroup;
use primepow::reps::{build_rep_table, g1k_growth_probe, ratio_scan_with_mode};
use primepow::sigma::{verify_sigma, ModulusFilter};
use primepow::table::{self, Manifest, Table};
use primepow::Error;

use config::{Cli, Format, RunConfig, Task};

const EXIT_OK: u8 = 0;
const EXIT_ORACLE: u8 = 1;
const EXIT_CHECK: u8 = 2;
const EXIT_IO: u8 = 3;
const EXIT_USAGE: u8 = 4;

/// Identity error allowed by `decompose`, relative to `1 + |F|`.
const DECOMPOSE_TOL: f64 = 1e-9;
/// Relative gap allowed between quadrature and the direct count.
const QUADRATURE_TOL: f64 = 1e-6;
/// Bound on |residual_normalized| when `Σ_k(q) = 0`.
const RESIDUAL_BOUND: f64 = 10.0;
/// Relative distance from Γ(1+1/k) allowed at the last probe point.
const PROBE_TOL: f64 = 0.05;
/// Bound on both normalised J-integrals.
const J_BOUND: f64 = 1.0;

/// Golden-ratio sequence of sample phases.
const GOLDEN: f64 = 0.618_033_988_749_894_9;

struct Report {
    table: Table,
    manifest: Manifest,
    plot: Vec<(f64, f64)>,
    status: u8,
    notes: Vec<String>,
}

impl Report {
    fn new(table: Table, manifest: Manifest) -> Self {
        Self { table, manifest, plot: Vec::new(), status: EXIT_OK, notes: Vec::new() }
    }
}

fn grid_text(grid: &[u64]) -> String {
    grid.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

fn run(cfg: &RunConfig) -> primepow::Result<Report> {
    let mut m = Manifest::new(cfg.task.name());
    match &cfg.task {
        Task::Sigma { q_max, k_max, odd_only } => {
            m.push("q_max", q_max).push("k_max", k_max).push("odd_only", odd_only).push("mode", cfg.mode);
            let filter = if *odd_only { ModulusFilter::OddOnly } else { ModulusFilter::All };
            let rows = verify_sigma(*q_max, *k_max, cfg.mode, filter)?;
            let mut r = Report::new(table::sigma_table(&rows), m);
            let oracle: Vec<_> = rows.iter().filter(|r| r.oracle_mismatch()).collect();
            let closed: Vec<_> = rows.iter().filter(|r| r.closed_form_mismatch()).collect();
            for row in &oracle {
                r.notes.push(format!(
                    "oracle mismatch: q={} k={} char_sum={} bruteforce={}",
                    row.q, row.k, row.via_char_sum, row.via_bruteforce
                ));
            }
            for row in &closed {
                r.notes.push(format!(
                    "discrepancy: q={} k={} char_sum={} closed_form={} bruteforce={} [{}]",
                    row.q,
                    row.k,
                    row.via_char_sum,
                    row.via_closed_form,
                    row.via_bruteforce,
                    row.case_trace.join("; ")
                ));
            }
            r.status = if !oracle.is_empty() {
                EXIT_ORACLE
            } else if !closed.is_empty() {
                EXIT_CHECK
            } else {
                EXIT_OK
            };
            Ok(r)
        }
        Task::Ratio { q, k, grid } => {
            m.push("q", q).push("k", k).push("grid", grid_text(grid)).push("mode", cfg.mode);
            let rows = ratio_scan_with_mode(grid, *q, *k, cfg.mode)?;
            let mut r = Report::new(table::ratio_table(&rows), m);
            let sigma = rows[0].sigma;
            if sigma != 0 {
                let errs: Vec<f64> = rows.iter().filter_map(|r| r.ratio_error()).collect();
                r.plot = rows.iter().filter_map(|r| r.ratio.map(|v| (r.n as f64, v))).collect();
                if errs.windows(2).any(|w| w[1] > w[0]) {
                    r.status = EXIT_CHECK;
                    r.notes.push("|ratio - 1| increases along the grid".into());
                }
            } else {
                r.plot = rows.iter().map(|r| (r.n as f64, r.residual_normalized)).collect();
                if let Some(bad) = rows.iter().find(|r| !(r.residual_normalized.abs() <= RESIDUAL_BOUND)) {
                    r.status = EXIT_CHECK;
                    r.notes.push(format!(
                        "sigma = 0 and |residual_normalized| = {} exceeds {RESIDUAL_BOUND} at N = {}",
                        bad.residual_normalized.abs(),
                        bad.n
                    ));
                }
            }
            Ok(r)
        }
        Task::Count { k, n, q } => {
            m.push("k", k).push("N", n).push("q", q);
            let reps = build_rep_table(*n, *k)?;
            let g = reps.g_qk(*q);
            m.push("G_qk", g);
            let mut r = Report::new(table::representation_table(&reps, *q), m);
            r.plot = reps.iter().filter(|(n, _)| n % q == 0).map(|(n, v)| (n as f64, v)).collect();
            r.notes.push(format!("G_{{{q},{k}}}({n}) = {g}"));
            Ok(r)
        }
        Task::Growth { k, grid } => {
            m.push("k", k).push("grid", grid_text(grid));
            let rows = g1k_growth_probe(grid, *k)?;
            let mut r = Report::new(table::growth_table(&rows), m);
            r.plot = rows.iter().map(|g| (g.n as f64, g.area_normalized)).collect();
            Ok(r)
        }
        Task::Decompose { q, k, n, samples } => {
            m.push("q", q).push("k", k).push("N", n).push("samples", samples).push("epsilon", format!("{:e}", cfg.policy.epsilon()));
            let series = PowerSeries::new(*n, *k, &cfg.policy)?;
            let mut t = Table::new([
                "sample", "alpha", "F_re", "F_im", "S1_re", "S1_im", "S2_re", "S2_im", "rel_error",
            ]);
            let mut worst = 0.0f64;
            let mut plot = Vec::new();
            for j in 0..*samples {
                let alpha = ((j + 1) as f64 * GOLDEN).fract();
                let point = EvalPoint::new(*n, alpha)?;
                let f = series.f_direct(&point, *q)?;
                let (s1, s2) = series.f_decomposed(&point, *q)?;
                let err = (f - s1 - s2).norm() / (1.0 + f.norm());
                if !(err <= worst) {
                    worst = err;
                }
                plot.push((alpha, err));
                t.push(vec![
                    j.into(),
                    alpha.into(),
                    f.re.into(),
                    f.im.into(),
                    s1.re.into(),
                    s1.im.into(),
                    s2.re.into(),
                    s2.im.into(),
                    err.into(),
                ]);
            }
            let mut r = Report::new(t, m);
            r.plot = plot;
            r.notes.push(format!("max relative identity error {worst:e}"));
            if !(worst < DECOMPOSE_TOL) {
                r.status = EXIT_CHECK;
            }
            Ok(r)
        }
        Task::Quadrature { q, k, n, points } => {
            m.push("q", q).push("k", k).push("N", n).push("epsilon", format!("{:e}", cfg.policy.epsilon()));
            if let Some(p) = points {
                m.push("points", p);
            }
            let quad = gqk_by_quadrature(*n, *q, *k, *points, &cfg.policy)?;
            let direct = build_rep_table(*n, *k)?.g_qk(*q);
            let diff = (quad.value - direct).abs();
            let rel = if direct == 0.0 { diff } else { diff / direct.abs() };
            let mut t = Table::new([
                "N", "q", "k", "points", "max_exponent", "G_quadrature", "G_quadrature_im", "G_direct", "rel_error",
            ]);
            t.push(vec![
                (*n).into(),
                (*q).into(),
                (*k).into(),
                quad.points.into(),
                quad.max_exponent.into(),
                quad.value.into(),
                quad.imaginary.into(),
                direct.into(),
                rel.into(),
            ]);
            let mut r = Report::new(t, m);
            r.plot = vec![(*n as f64, quad.value)];
            r.notes.push(format!("quadrature {} vs direct {direct}, relative difference {rel:e}", quad.value));
            if !(rel < QUADRATURE_TOL) {
                r.status = EXIT_CHECK;
            }
            Ok(r)
        }
        Task::Probe { k, grid } => {
            m.push("k", k).push("grid", grid_text(grid)).push("epsilon", format!("{:e}", cfg.policy.epsilon()));
            let rows = mainterm_constant_probe(grid, *k, &cfg.policy)?;
            let mut r = Report::new(table::probe_table(&rows), m);
            r.plot = rows.iter().map(|p| (p.n as f64, p.normalized)).collect();
            let last = rows.last().expect("non-empty grid");
            r.notes.push(format!(
                "normalized {} at N = {}; Γ(1+1/k) = {}, k^-1 Γ(1+1/k)^(1/k) = {}",
                last.normalized, last.n, last.gamma_candidate, last.stated_candidate
            ));
            if !((last.normalized - last.gamma_candidate).abs() / last.gamma_candidate < PROBE_TOL) {
                r.status = EXIT_CHECK;
            }
            Ok(r)
        }
        Task::Jintegrals { q, k, chi, grid, h_frac } => {
            let group = UnitGroup::new(*q)?;
            let character = match chi {
                Some(e) => group.character(e)?,
                None => group
                    .characters()
                    .find(|c| !c.pow(*k as u64).is_principal())
                    .ok_or_else(|| Error::InvalidArgument(format!("no character mod {q} has χ^{k} ≠ χ0")))?,
            };
            m.push("q", q).push("k", k).push("chi", &character).push("grid", grid_text(grid)).push("h_frac", h_frac);
            let rows = grid
                .iter()
                .map(|&x| {
                    let x = x as f64;
                    j_integrals(x, (h_frac * x).floor(), &character, *k)
                })
                .collect::<primepow::Result<Vec<_>>>()?;
            let mut r = Report::new(table::j_table(*q, *k, &rows), m);
            for row in &rows {
                let (j1n, j2n) = table::j_normalized(*q, row);
                r.plot.push((row.x, j1n));
                if !(j1n <= J_BOUND && j2n <= J_BOUND) {
                    r.status = EXIT_CHECK;
                    r.notes.push(format!("normalized J exceeds {J_BOUND} at X = {}: J1 {j1n}, J2 {j2n}", row.x));
                }
            }
            Ok(r)
        }
    }
}

fn write_outputs(cfg: &RunConfig, report: &Report) -> primepow::Result<()> {
    let sink: Box<dyn Write> = match &cfg.out {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(io::stdout().lock()),
    };
    let mut sink = BufWriter::new(sink);
    match cfg.format {
        Format::Csv => report.table.write_csv(&report.manifest, &mut sink)?,
        Format::Json => report.table.write_json(&report.manifest, &mut sink)?,
    }
    sink.flush()?;
    if let Some(p) = &cfg.plot_data {
        let mut f = BufWriter::new(File::create(p)?);
        table::write_plot_data(&report.plot, &mut f)?;
        f.flush()?;
    }
    Ok(())
}

fn error_code(e: &Error) -> u8 {
    match e {
        Error::InvalidArgument(_) => EXIT_USAGE,
        Error::Aliasing { .. } => EXIT_CHECK,
        _ => EXIT_IO,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK });
        }
    };
    let cfg = match RunConfig::from_cli(cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cfg.workers).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return ExitCode::from(EXIT_IO);
        }
    };
    let report = match pool.install(|| run(&cfg)) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(error_code(&e));
        }
    };
    if let Err(e) = write_outputs(&cfg, &report) {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_IO);
    }
    for note in &report.notes {
        eprintln!("{note}");
    }
    ExitCode::from(report.status)
}
