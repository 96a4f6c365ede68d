//! Command-line front end: `qobs <subcommand> --config scenario.json`.

pub mod scenario;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use crate::certify::{
    certify_pure, certify_toeplitz, constant_c_tl, constant_d, delta_min, sweep_table, write_sweep_csv,
    CertificationReport, Geometry, Verdict, SCHEMA_VERSION,
};
use crate::classical::{check_gc, VerletStepper};
use crate::error::{Error, Result};
use crate::phasespace::husimi;
use crate::quantum::{write_snapshot, Propagator};
pub use scenario::{parse, Resolved, Scenario};

/// Environment variable that overrides the default output directory.
pub const OUT_DIR_ENV: &str = "QOBS_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "qobs", version, about = "Certified observability bounds for semiclassical Schrödinger dynamics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (default: $QOBS_OUT_DIR or ./out).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Recorded in the run manifest; all computations are deterministic.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Full certificates for every (ħ, δ) cell; one JSON report per cell.
    Certify,
    /// Geometric-condition check and C[T, K, Ω].
    Gcc,
    /// Classical trajectories from the corners and centres of K.
    Flow,
    /// Quantum propagation: density slices (CSV) and a final binary snapshot.
    Propagate,
    /// Husimi function of the initial state on the phase grid.
    Husimi,
    /// D, C(T, L) and the δ thresholds.
    Constants,
    /// Certificates summarised as one CSV row per (ħ, δ).
    Sweep,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Certify => "certify",
            Command::Gcc => "gcc",
            Command::Flow => "flow",
            Command::Propagate => "propagate",
            Command::Husimi => "husimi",
            Command::Constants => "constants",
            Command::Sweep => "sweep",
        }
    }
}

/// Files produced by a run, held in memory until everything succeeded.
#[derive(Debug, Default)]
pub struct Artifacts {
    pub files: Vec<(PathBuf, Vec<u8>)>,
    pub summary: Vec<String>,
    pub violated: bool,
    /// Per-cell numerical failures.
    pub failures: Vec<String>,
}

impl Artifacts {
    fn json<S: Serialize>(&mut self, name: impl Into<PathBuf>, v: &S) -> Result<()> {
        let mut s = serde_json::to_vec_pretty(v)?;
        s.push(b'\n');
        self.files.push((name.into(), s));
        Ok(())
    }

    fn write_all(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        for (name, bytes) in &self.files {
            let path = dir.join(name);
            if let Some(p) = path.parent() {
                fs::create_dir_all(p)?;
            }
            fs::write(path, bytes)?;
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    schema_version: u32,
    command: &'a str,
    scenario_id: &'a str,
    seed: u64,
    files: Vec<String>,
    failures: &'a [String],
}

/// Runs the CLI and returns the process exit code:
/// 0 success, 1 a violated verdict, 2 configuration or numerical errors.
pub fn main_with_args<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(a) => {
            for f in &a.failures {
                eprintln!("error: {f}");
            }
            if a.violated {
                1
            } else if !a.failures.is_empty() {
                2
            } else {
                0
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

pub fn out_dir(cli: &Cli) -> PathBuf {
    cli.out
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

pub fn run(cli: &Cli) -> Result<Artifacts> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Error::Config("--config <path> is required".into()))?;
    let text = fs::read_to_string(path)?;
    let scenario = parse(&text)?;
    let body = || match scenario.dim {
        1 => execute::<1>(cli.command, &Resolved::new(&scenario)?),
        2 => execute::<2>(cli.command, &Resolved::new(&scenario)?),
        d => Err(Error::Config(format!("dim must be 1 or 2, got {d}"))),
    };
    let mut art = match cli.jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(body)?,
        None => body()?,
    };
    let manifest = Manifest {
        schema_version: SCHEMA_VERSION,
        command: cli.command.name(),
        scenario_id: &scenario.id,
        seed: cli.seed,
        files: art.files.iter().map(|(p, _)| p.display().to_string()).collect(),
        failures: &art.failures,
    };
    let m = serde_json::to_vec_pretty(&manifest)?;
    art.files.push(("manifest.json".into(), m));
    art.write_all(&out_dir(cli))?;
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    for line in &art.summary {
        writeln!(lock, "{line}")?;
    }
    Ok(art)
}

fn tag(x: f64) -> String {
    format!("{x}").replace('.', "p").replace('-', "m")
}

pub fn execute<const D: usize>(cmd: Command, r: &Resolved<D>) -> Result<Artifacts> {
    match cmd {
        Command::Certify | Command::Sweep => certify_cells(cmd, r),
        Command::Gcc => gcc(r),
        Command::Flow => flow_csv(r),
        Command::Propagate => propagate_cells(r),
        Command::Husimi => husimi_cells(r),
        Command::Constants => constants(r),
    }
}

/// Certificates for all ħ; within one ħ the δ values share a propagation.
pub fn certify_reports<const D: usize>(r: &Resolved<D>) -> Result<Vec<(f64, Result<Vec<CertificationReport>>)>> {
    let geo = Geometry::compute(&r.potential, &r.k, &r.omega, r.horizon, &r.deltas, &r.numerics)?;
    Ok(r.hbars
        .par_iter()
        .map(|&hbar| {
            let reps = if r.scenario.state.is_pure() {
                r.pure_state(hbar).and_then(|psi| {
                    certify_pure(&r.id, &r.potential, &r.k, &r.omega, r.horizon, &geo, &psi, &r.numerics)
                })
            } else {
                r.toeplitz(hbar).and_then(|st| {
                    certify_toeplitz(
                        &r.id,
                        &r.potential,
                        &r.k,
                        &r.omega,
                        r.horizon,
                        &geo,
                        &st,
                        r.grid(hbar)?,
                        &r.numerics,
                    )
                })
            };
            (hbar, reps)
        })
        .collect())
}

fn certify_cells<const D: usize>(cmd: Command, r: &Resolved<D>) -> Result<Artifacts> {
    let mut art = Artifacts::default();
    let mut all = Vec::new();
    for (i, (hbar, res)) in certify_reports(r)?.into_iter().enumerate() {
        match res {
            Ok(reps) => {
                for (j, rep) in reps.into_iter().enumerate() {
                    if cmd == Command::Certify {
                        art.json(format!("reports/{}_h{i}_d{j}.json", r.id), &rep)?;
                    }
                    art.summary.push(rep.summary_line());
                    art.violated |= rep.verdict == Verdict::Violated;
                    all.push(rep);
                }
            }
            Err(e) => art.failures.push(format!("{} hbar={hbar}: {e}", r.id)),
        }
    }
    if cmd == Command::Sweep && !all.is_empty() {
        let mut buf = Vec::new();
        write_sweep_csv(&sweep_table(&all), &mut buf)?;
        art.files.push((format!("{}_sweep.csv", r.id).into(), buf));
    }
    Ok(art)
}

#[derive(Serialize)]
struct GccOut {
    schema_version: u32,
    scenario_id: String,
    horizon: f64,
    satisfied: bool,
    c_geo: f64,
    c_geo_argmin: Vec<f64>,
    samples: usize,
    never_hit: Vec<Vec<f64>>,
    left_working_box: bool,
}

fn gcc<const D: usize>(r: &Resolved<D>) -> Result<Artifacts> {
    let dt = r.numerics.dt_classical;
    let g = check_gc(&r.potential, &r.k, &r.omega, r.horizon, dt)?;
    let (best, c_geo) = g
        .witnesses
        .iter()
        .map(|w| (w.point, w.occupation))
        .fold((r.k.sample_grid()[0], f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
    let flat = |p: &crate::classical::PhasePoint<f64, D>| p.x.iter().chain(&p.xi).copied().collect::<Vec<_>>();
    let out = GccOut {
        schema_version: SCHEMA_VERSION,
        scenario_id: r.id.clone(),
        horizon: r.horizon,
        satisfied: g.satisfied,
        c_geo,
        c_geo_argmin: flat(&best),
        samples: g.witnesses.len(),
        never_hit: g
            .witnesses
            .iter()
            .filter(|w| !matches!(w.first_hit, Some(t) if t < r.horizon))
            .map(|w| flat(&w.point))
            .collect(),
        left_working_box: g.left_working_box,
    };
    let mut art = Artifacts::default();
    art.summary.push(format!(
        "{}: GC {} with C[T,K,Ω] = {:.6} over {} samples",
        r.id,
        if out.satisfied { "holds" } else { "fails" },
        out.c_geo,
        out.samples
    ));
    art.json(format!("{}_gcc.json", r.id), &out)?;
    Ok(art)
}

fn flow_csv<const D: usize>(r: &Resolved<D>) -> Result<Artifacts> {
    // start points: centre and corners of every box of K
    let mut starts = Vec::new();
    for b in r.k.boxes() {
        starts.push(b.center());
        for mask in 0..1usize << (2 * D) {
            let c: [f64; 6] = std::array::from_fn(|k| {
                if k >= 2 * D {
                    0.0
                } else if mask >> k & 1 == 1 {
                    b.hi(k)
                } else {
                    b.lo(k)
                }
            });
            starts.push(crate::classical::PhasePoint::new(
                std::array::from_fn(|i| c[i]),
                std::array::from_fn(|i| c[D + i]),
            ));
        }
    }
    let (n, h) = crate::classical::flow::uniform_steps(r.horizon, r.numerics.dt_classical)?;
    let every = n.div_ceil(200).max(1);
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut head = vec!["trajectory".to_string(), "t".to_string()];
    head.extend((0..D).map(|i| format!("x{i}")));
    head.extend((0..D).map(|i| format!("xi{i}")));
    head.push("energy".into());
    w.write_record(&head)?;
    for (id, p0) in starts.iter().enumerate() {
        let mut st = VerletStepper::new(&r.potential, *p0, h);
        for k in 0..=n {
            if k % every == 0 || k == n {
                let p = st.state();
                let mut rec = vec![id.to_string(), format!("{:e}", k as f64 * h)];
                rec.extend(p.x.iter().chain(&p.xi).map(|v| format!("{v:e}")));
                rec.push(format!("{:e}", r.potential.energy(&p.x, &p.xi)));
                w.write_record(&rec)?;
            }
            if k < n {
                st.step();
            }
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::Config(format!("csv: {e}")))?;
    let mut art = Artifacts::default();
    art.summary
        .push(format!("{}: {} trajectories over [0, {}]", r.id, starts.len(), r.horizon));
    art.files.push((format!("{}_flow.csv", r.id).into(), bytes));
    Ok(art)
}

#[derive(Serialize)]
struct PropagationSummary {
    schema_version: u32,
    scenario_id: String,
    hbar: f64,
    points_per_axis: usize,
    box_length: f64,
    steps: usize,
    final_norm: f64,
    spread_initial: f64,
    spread_final: f64,
    boundary_amplitude: f64,
}

fn propagate_cells<const D: usize>(r: &Resolved<D>) -> Result<Artifacts> {
    if !r.scenario.state.is_pure() {
        return Err(Error::Config("propagate needs a pure state".into()));
    }
    let cells: Vec<(usize, f64, Result<Vec<(PathBuf, Vec<u8>)>>)> = r
        .hbars
        .par_iter()
        .enumerate()
        .map(|(i, &hbar)| (i, hbar, propagate_one(r, i, hbar)))
        .collect();
    let mut art = Artifacts::default();
    for (i, hbar, res) in cells {
        match res {
            Ok(files) => {
                art.summary.push(format!("{}: hbar={hbar} propagated (cell {i})", r.id));
                art.files.extend(files);
            }
            Err(e) => art.failures.push(format!("{} hbar={hbar}: {e}", r.id)),
        }
    }
    Ok(art)
}

fn propagate_one<const D: usize>(r: &Resolved<D>, i: usize, hbar: f64) -> Result<Vec<(PathBuf, Vec<u8>)>> {
    let psi0 = r.pure_state(hbar)?;
    let grid = *psi0.grid();
    let (n, h) = crate::classical::flow::uniform_steps(r.horizon, r.numerics.dt)?;
    let prop = Propagator::new(&r.potential, grid, hbar, h)?.with_tolerances(r.numerics.tolerances);
    let slices = r.scenario.numerics.snapshots;
    let marks: Vec<usize> = (0..slices).map(|s| s * n / (slices - 1)).collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut head = vec!["t".to_string()];
    head.extend((0..D).map(|a| format!("x{a}")));
    head.push("density".into());
    w.write_record(&head)?;
    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut emit = |t: f64, psi: &crate::quantum::WaveFunction<f64, D>| {
        for (f, rho) in psi.density().into_iter().enumerate() {
            let x = grid.position(f);
            let mut rec = vec![format!("{t:e}")];
            rec.extend(x.iter().map(|v| format!("{v:e}")));
            rec.push(format!("{rho:e}"));
            rows.push(rec);
        }
    };
    emit(0.0, &psi0);
    let last = prop.evolve(&psi0, n, |k, t, psi| {
        if k > 0 && marks.contains(&k) {
            emit(t, psi);
        }
        Ok(())
    })?;
    for rec in &rows {
        w.write_record(rec)?;
    }
    let csv_bytes = w.into_inner().map_err(|e| Error::Config(format!("csv: {e}")))?;
    let mut snap = Vec::new();
    write_snapshot(&mut snap, &last, r.horizon)?;
    let summary = PropagationSummary {
        schema_version: SCHEMA_VERSION,
        scenario_id: r.id.clone(),
        hbar,
        points_per_axis: grid.points_per_axis(),
        box_length: grid.length(),
        steps: n,
        final_norm: last.norm(),
        spread_initial: psi0.spread(),
        spread_final: last.spread(),
        boundary_amplitude: last.boundary_amplitude(),
    };
    let stem = format!("{}_h{i}_{}", r.id, tag(hbar));
    Ok(vec![
        (format!("{stem}_density.csv").into(), csv_bytes),
        (format!("{stem}_final.bin").into(), snap),
        (format!("{stem}_propagation.json").into(), serde_json::to_vec_pretty(&summary)?),
    ])
}

fn husimi_cells<const D: usize>(r: &Resolved<D>) -> Result<Artifacts> {
    if !r.scenario.state.is_pure() {
        return Err(Error::Config("husimi needs a pure state".into()));
    }
    let mut art = Artifacts::default();
    for (i, &hbar) in r.hbars.iter().enumerate() {
        let psi = r.pure_state(hbar)?;
        let pg = r.phase_grid(hbar)?;
        let field = husimi(&psi, &pg);
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut head: Vec<String> = (0..D).map(|a| format!("x{a}")).collect();
        head.extend((0..D).map(|a| format!("xi{a}")));
        head.push("value".into());
        w.write_record(&head)?;
        for (f, v) in field.values.iter().enumerate() {
            let (x, xi) = pg.node(f);
            let mut rec: Vec<String> = x.iter().chain(&xi).map(|c| format!("{c:e}")).collect();
            rec.push(format!("{v:e}"));
            w.write_record(&rec)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Config(format!("csv: {e}")))?;
        art.summary.push(format!(
            "{}: hbar={hbar} Husimi integral on grid {:.6}",
            r.id,
            field.integral()
        ));
        art.files
            .push((format!("{}_h{i}_{}_husimi.csv", r.id, tag(hbar)).into(), bytes));
    }
    Ok(art)
}

#[derive(Serialize)]
struct ThresholdRow {
    hbar: f64,
    delta_min_displayed: Option<f64>,
    delta_min_consistent: Option<f64>,
    error: Option<String>,
}

#[derive(Serialize)]
struct ConstantsOut {
    schema_version: u32,
    scenario_id: String,
    horizon: f64,
    lip_grad: f64,
    d_const: f64,
    c_tl: f64,
    c_tl_argmin: f64,
    c_tl_at_lambda_l: Option<f64>,
    l0_root: Option<f64>,
    c_tl_at_2r_over_t: Option<f64>,
    c_geo: f64,
    diameter_k: f64,
    c_obs: Option<f64>,
    thresholds: Vec<ThresholdRow>,
}

fn constants<const D: usize>(r: &Resolved<D>) -> Result<Artifacts> {
    let lip = r.potential.lip_grad;
    let ctl = constant_c_tl(r.horizon, lip)?;
    let geo = crate::classical::geometric_constant(
        &r.potential,
        &r.k,
        &crate::classical::Cutoff::Indicator(r.omega.clone()),
        r.horizon,
        r.numerics.dt_classical,
    )?;
    let dk = r.k.diameter();
    let thresholds = match r.scenario.c_obs {
        Some(c_obs) => r
            .hbars
            .iter()
            .map(|&hbar| match delta_min(D, r.horizon, dk, geo.value, c_obs, hbar, lip) {
                Ok(dm) => ThresholdRow {
                    hbar,
                    delta_min_displayed: Some(dm.displayed),
                    delta_min_consistent: dm.consistent,
                    error: None,
                },
                Err(e) => ThresholdRow {
                    hbar,
                    delta_min_displayed: None,
                    delta_min_consistent: None,
                    error: Some(e.to_string()),
                },
            })
            .collect(),
        None => Vec::new(),
    };
    let out = ConstantsOut {
        schema_version: SCHEMA_VERSION,
        scenario_id: r.id.clone(),
        horizon: r.horizon,
        lip_grad: lip,
        d_const: constant_d(r.horizon, lip),
        c_tl: ctl.value,
        c_tl_argmin: ctl.argmin,
        c_tl_at_lambda_l: ctl.at_lambda_l,
        l0_root: ctl.l0_root,
        c_tl_at_2r_over_t: ctl.at_lambda_2r_over_t,
        c_geo: geo.value,
        diameter_k: dk,
        c_obs: r.scenario.c_obs,
        thresholds,
    };
    let mut art = Artifacts::default();
    art.summary.push(format!(
        "{}: T={} L={:.6} D={:.6} C(T,L)={:.6} (λ*={:.4}) C_geo={:.6}",
        r.id, out.horizon, lip, out.d_const, out.c_tl, out.c_tl_argmin, out.c_geo
    ));
    for t in &out.thresholds {
        art.summary.push(match (t.delta_min_displayed, &t.error) {
            (Some(d), _) => format!("  hbar={} delta_min={d:.6}", t.hbar),
            (None, Some(e)) => format!("  hbar={} {e}", t.hbar),
            _ => String::new(),
        });
    }
    art.json(format!("{}_constants.json", r.id), &out)?;
    Ok(art)
}
