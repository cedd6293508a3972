//! The `jpa` command-line front end.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::calibration::{
    critical_power_planes, fit_added_noise, synth_noise_data, transport_loss_with_uncertainty,
    CriticalPowerPlanes, FitResult, FitSettings, LineBudget, NoiseModel,
};
use crate::config::{
    AmpConfig, AmpKindConfig, ConfigError, ExperimentConfig, Format, ScanMode, SqueezerKind,
    CONFIG_ENV,
};
use crate::distortion::{
    deamp_ratio, half_photon_probe, optimal_point, phasor_sweep, scan_deamp_along_contour,
};
use crate::gain::{
    gain_map, iso_gain_contour, lmg, power_cut_through_lmg, theta_grid, ContourPoint, GainMapSpec,
    OperatingPoint, SearchSettings, Side,
};
use crate::io::{noise_table, num, opt, read_noise_csv, IoError, OutputSet, RunManifest, Table};
use crate::model::{critical_params, DeviceParams};
use crate::squeezing::{
    default_quanta_scale, readout_histograms, squeezing_vs_theta, squeezing_with, AmpModel,
    LossChannel, MonteCarlo, Squeezer,
};
use crate::units::watts_to_dbm;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Model(#[from] crate::Error),
    #[error("{0}")]
    Io(String),
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        match e {
            IoError::File { .. } => CliError::Io(e.to_string()),
            IoError::Row { .. } | IoError::Data { .. } => CliError::Input(e.to_string()),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(ConfigError::Read { .. }) | CliError::Io(_) => EXIT_IO,
            CliError::Config(_) | CliError::Input(_) => EXIT_CONFIG,
            CliError::Model(crate::Error::Domain(_)) => EXIT_CONFIG,
            CliError::Model(_) => EXIT_NUMERICAL,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
    Both,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
            FormatArg::Both => Format::Both,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "jpa", version, about = "Kerr parametric amplifier simulator")]
struct Args {
    #[command(subcommand)]
    command: Command,
    /// Experiment config (TOML or JSON). Built-in defaults when absent.
    #[arg(long, global = true, env = CONFIG_ENV)]
    config: Option<PathBuf>,
    /// Output directory (overrides output.dir).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// RNG seed (overrides the config seed).
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    /// Worker threads; 0 or absent uses all cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
enum Command {
    /// Direct gain over the (pump frequency, pump power) plane.
    GainMap,
    /// Line of maximum gain.
    Lmg,
    /// Iso-gain contour.
    Contour,
    /// Phasor sweeps and distortion metrics at a few gains.
    Distort,
    /// Deamplification ratio along an iso-gain contour.
    DeampScan,
    /// Operating point minimizing the deamplification ratio.
    OptimalPoint,
    /// Squeezing versus SQ–AMP phase at one operating point.
    Squeeze,
    /// Minimum squeezing along a power cut or contour.
    SqueezeScan,
    /// Fit of chain gain, λ and N_add to noise data.
    NoiseFit,
    /// Line gains, transport loss and critical-power reference planes.
    LineBudget,
    /// Synthetic noise-calibration dataset.
    SynthNoise,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::GainMap => "gain-map",
            Command::Lmg => "lmg",
            Command::Contour => "contour",
            Command::Distort => "distort",
            Command::DeampScan => "deamp-scan",
            Command::OptimalPoint => "optimal-point",
            Command::Squeeze => "squeeze",
            Command::SqueezeScan => "squeeze-scan",
            Command::NoiseFit => "noise-fit",
            Command::LineBudget => "line-budget",
            Command::SynthNoise => "synth-noise",
        }
    }
}

/// Runs the CLI on `args` (including the program name) and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match execute(&args) {
        Ok(m) => {
            for o in &m.outputs {
                log::info!("wrote {} ({} bytes)", o.file, o.bytes);
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(args: &Args) -> CliResult<RunManifest> {
    let mut cfg = match &args.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(o) = &args.out {
        cfg.output.dir = o.clone();
    }
    if let Some(f) = args.format {
        cfg.output.format = f.into();
    }
    let threads = args.threads.unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Input(format!("thread pool: {e}")))?;
    let start = Instant::now();
    let (set, seeds) = pool.install(|| dispatch(args.command, &cfg))?;
    Ok(set.finish(
        args.command.name(),
        seeds,
        pool.current_num_threads(),
        start.elapsed().as_secs_f64(),
    )?)
}

struct Ctx<'a> {
    cfg: &'a ExperimentConfig,
    device: DeviceParams,
    search: SearchSettings,
    set: OutputSet,
}

impl Ctx<'_> {
    fn csv(&mut self, name: &str, t: &Table) {
        if self.cfg.output.format.csv() {
            self.set.csv(name, t);
        }
    }

    fn json<T: Serialize>(&mut self, name: &str, v: &T) {
        if self.cfg.output.format.json() {
            self.set.json(name, v);
        }
    }

    fn probe(&self, amp: Option<f64>) -> f64 {
        amp.unwrap_or_else(|| half_photon_probe(&self.device, None))
    }
}

fn dispatch(cmd: Command, cfg: &ExperimentConfig) -> CliResult<(OutputSet, Vec<u64>)> {
    let device = cfg.device.build()?;
    let mut ctx = Ctx {
        cfg,
        device,
        search: cfg.search.settings(&device),
        set: OutputSet::new(&cfg.output.dir, &cfg.hash()),
    };
    let seeds = match cmd {
        Command::GainMap => cmd_gain_map(&mut ctx)?,
        Command::Lmg => cmd_lmg(&mut ctx)?,
        Command::Contour => cmd_contour(&mut ctx)?,
        Command::Distort => cmd_distort(&mut ctx)?,
        Command::DeampScan => cmd_deamp_scan(&mut ctx)?,
        Command::OptimalPoint => cmd_optimal_point(&mut ctx)?,
        Command::Squeeze => cmd_squeeze(&mut ctx)?,
        Command::SqueezeScan => cmd_squeeze_scan(&mut ctx)?,
        Command::NoiseFit => cmd_noise_fit(&mut ctx)?,
        Command::LineBudget => cmd_line_budget(&mut ctx)?,
        Command::SynthNoise => cmd_synth_noise(&mut ctx)?,
    };
    Ok((ctx.set, seeds))
}

#[derive(Serialize)]
struct DeviceSummary {
    omega0: f64,
    gamma: f64,
    kerr: f64,
    f_c_hz: f64,
    b_c: f64,
    p_c_dbm: f64,
}

fn summary(device: &DeviceParams) -> DeviceSummary {
    let c = critical_params(device);
    DeviceSummary {
        omega0: device.omega0(),
        gamma: device.gamma(),
        kerr: device.kerr(),
        f_c_hz: c.f_c,
        b_c: c.b_c,
        p_c_dbm: watts_to_dbm(c.p_c),
    }
}

fn op_cells(op: &OperatingPoint) -> Vec<String> {
    vec![
        num(op.normalized.f_ratio),
        num(op.f_p),
        num(op.normalized.p_db),
        num(watts_to_dbm(op.pump_power())),
    ]
}

const OP_COLS: [&str; 4] = ["f_ratio", "f_p_hz", "p_db", "p_p_dbm"];

fn header(pre: &[&str], post: &[&str]) -> Vec<String> {
    pre.iter().chain(OP_COLS.iter()).chain(post).map(|s| s.to_string()).collect()
}

fn table(pre: &[&str], post: &[&str]) -> Table {
    Table {
        header: header(pre, post),
        rows: Vec::new(),
    }
}

fn row(pre: Vec<String>, op: &OperatingPoint, post: Vec<String>) -> Vec<String> {
    pre.into_iter().chain(op_cells(op)).chain(post).collect()
}

fn cmd_gain_map(ctx: &mut Ctx) -> CliResult<Vec<u64>> {
    let g = &ctx.cfg.gain_map;
    let spec = GainMapSpec {
        f_ratio: (g.f_ratio[0], g.f_ratio[1]),
        p_db: (g.p_db[0], g.p_db[1]),
        n_f: g.n_f,
        n_p: g.n_p,
        probe_amp: g.probe_rel * critical_params(&ctx.device).b_c,
        n_theta: g.n_theta,
    };
    let map = gain_map(&ctx.device, &spec)?;
    let mut t = Table::new(&["f_ratio", "f_p_hz", "p_db", "p_p_dbm", "gain_db", "bistable"]);
    for i_f in 0..map.n_f() {
        for i_p in 0..map.n_p() {
            t.push(vec![
                num(map.f_ratio[i_f]),
                num(map.f_p[i_f]),
                num(map.p_db[i_p]),
                num(watts_to_dbm(map.p_p[i_p])),
                opt(map.gain(i_f, i_p)),
                map.is_bistable(i_f, i_p).to_string(),
            ]);
        }
    }
    ctx.csv("gainmap.csv", &t);
    #[derive(Serialize)]
    struct Doc<'a> {
        device: DeviceSummary,
        max_gain_db: Option<f64>,
        map: &'a crate::gain::GainMap,
    }
    ctx.json(
        "gainmap.json",
        &Doc {
            device: summary(&ctx.device),
            max_gain_db: map.max_gain().map(|m| m.2),
            map: &map,
        },
    );
    Ok(vec![])
}

fn cmd_lmg(ctx: &mut Ctx) -> CliResult<Vec<u64>> {
    let pts = lmg(&ctx.device, &ctx.cfg.lmg.grid.points(), &ctx.search)?;
    let mut t = table(&[], &["pump_amp", "gain_db", "interior"]);
    for p in &pts {
        t.push(row(vec![], &p.op, vec![num(p.op.pump_amp), num(p.gain_db), p.interior.to_string()]));
    }
    ctx.csv("lmg.csv", &t);
    ctx.json("lmg.json", &pts);
    Ok(vec![])
}

fn contour_table(points: &[ContourPoint]) -> Table {
    let mut t = table(&["index", "side"], &["gain_db"]);
    for (i, p) in points.iter().enumerate() {
        t.push(row(vec![i.to_string(), p.side.label().into()], &p.op, vec![num(p.gain_db)]));
    }
    t
}

fn cmd_contour(ctx: &mut Ctx) -> CliResult<Vec<u64>> {
    let c = &ctx.cfg.contour;
    let contour = iso_gain_contour(&ctx.device, c.target_gain_db, &c.grid.points(), &ctx.search)?;
    ctx.csv("contour.csv", &contour_table(&contour.points));
    ctx.json("contour.json", &contour);
    Ok(vec![])
}

/// Crossing of the `target` contour at `f_ratio` on `side`.
fn contour_point(ctx: &Ctx, f_ratio: f64, target: f64, side: Side) -> CliResult<ContourPoint> {
    let c = iso_gain_contour(&ctx.device, target, &[f_ratio], &ctx.search)?;
    let found = c
        .branch(side)
        .next()
        .or_else(|| c.branch(Side::OnLmg).next())
        .copied();
    found.ok_or_else(|| {
        crate::Error::Infeasible(format!("{target} dB is not reached at f_p/f_c = {f_ratio}")).into()
    })
}

fn cmd_distort(ctx: &mut Ctx) -> CliResult<Vec<u64>> {
    let d = ctx.cfg.distort.clone();
    let probe = ctx.probe(d.probe_amp);
    let mut sweeps = table(&["target_gain_db"], &["theta", "in_i", "in_q", "out_i", "out_q", "x_deamp", "y_amp"]);
    let mut summ = table(
        &["target_gain_db", "side"],
        &["pump_amp", "gain_db", "deamp_ratio_db", "third_harmonic_ratio"],
    );
    #[derive(Serialize)]
    struct Entry {
        target_gain_db: f64,
        point: ContourPoint,
        deamp: Option<crate::distortion::DeampResult>,
        third_harmonic_ratio: Option<f64>,
    }
    let mut doc = Vec::new();
    for &g in &d.gains_db {
        let cp = contour_point(ctx, d.f_ratio, g, d.side.side())?;
        let sweep = phasor_sweep(&cp.op, &ctx.device, probe, d.n_theta)?;
        let deamp = if probe > 0.0 {
            Some(deamp_ratio(&cp.op, &ctx.device, probe, d.n_theta)?)
        } else {
            None
        };
        let thd = deamp.as_ref().map(|r| sweep.third_harmonic_ratio(r.frame.major_axis()));
        for k in 0..sweep.thetas.len() {
            let (i, o) = (sweep.inputs[k], sweep.outputs[k]);
            let proj = |axis: crate::model::Phasor| num(o.re * axis.re + o.im * axis.im);
            let (x, y) = match &deamp {
                Some(r) => (proj(r.frame.minor_axis()), proj(r.frame.major_axis())),
                None => (String::new(), String::new()),
            };
            sweeps.push(row(
                vec![num(g)],
                &cp.op,
                vec![num(sweep.thetas[k]), num(i.re), num(i.im), num(o.re), num(o.im), x, y],
            ));
        }
        summ.push(row(
            vec![num(g), cp.side.label().into()],
            &cp.op,
            vec![
                num(cp.op.pump_amp),
                num(deamp.as_ref().map_or(cp.gain_db, |r| r.gain_db)),
                opt(deamp.as_ref().map(|r| r.ratio_db)),
                opt(thd),
            ],
        ));
        doc.push(Entry {
            target_gain_db: g,
            point: cp,
            deamp,
            third_harmonic_ratio: thd,
        });
    }
    ctx.csv("distort_sweeps.csv", &sweeps);
    ctx.csv("distort_summary.csv", &summ);
    ctx.json("distort.json", &doc);
    Ok(vec![])
}

fn cmd_deamp_scan(ctx: &mut Ctx) -> CliResult<Vec<u64>> {
    let c = ctx.cfg.deamp_scan.clone();
    let probe = ctx.probe(c.probe_amp);
    let contour = iso_gain_contour(&ctx.device, c.target_gain_db, &c.grid.points(), &ctx.search)?;
    let scan = scan_deamp_along_contour(&contour, &ctx.device, probe, c.n_theta)?;
    let mut t = table(&["index", "side"], &["gain_db", "deamp_ratio_db", "sigma2_out", "sigma2_in"]);
    for s in &scan {
        let r = &s.result;
        t.push(row(
            vec![s.index.to_string(), s.side.label().into()],
            &r.op,
            vec![num(r.gain_db), num(r.ratio_db), num(r.sigma2_out), num(r.sigma2_in)],
        ));
    }
    ctx.csv("deamp_scan.csv", &t);
    ctx.json("deamp_scan.json", &scan);
    Ok(vec![])
}

fn cmd_optimal_point(ctx: &mut Ctx) -> CliResult<Vec<u64>> {
    let c = ctx.cfg.optimal_point.clone();
    let probe = ctx.probe(c.probe_amp);
    let best = optimal_point(
        &ctx.device,
        &c.gain_targets_db,
        &c.grid.points(),
        probe,
        c.n_theta,
        &ctx.search,
    )?;
    let mut t = table(&["target_gain_db", "index", "side"], &["gain_db", "deamp_ratio_db"]);
    for (contour, scan) in &best.scans {
        for s in scan {
            t.push(row(
                vec![num(contour.target_gain_db), s.index.to_string(), s.side.label().into()],
                &s.result.op,
                vec![num(s.result.gain_db), num(s.result.ratio_db)],
            ));
        }
    }
    ctx.csv("optimal_scan.csv", &t);
    #[derive(Serialize)]
    struct Doc<'a> {
        probe_amp: f64,
        target_gain_db: f64,
        side: Side,
        result: &'a crate::distortion::DeampResult,
    }
    ctx.json(
        "optimal_point.json",
        &Doc {
            probe_amp: probe,
            target_gain_db: best.target_gain_db,
            side: best.side,
            result: &best.result,
        },
    );
    Ok(vec![])
}

fn amp_model(ctx: &Ctx, a: &AmpConfig) -> CliResult<AmpModel> {
    let base = match a.kind {
        AmpKindConfig::Ideal => AmpModel::ideal(a.gain_db),
        AmpKindConfig::FullJpa => AmpModel::full_jpa(
            OperatingPoint::from_normalized(&ctx.device, a.f_ratio, a.p_db),
            ctx.device,
        ),
    };
    let m = base.with_offset(a.phase_offset).with_hemt_noise(a.hemt_noise_quanta);
    m.validate()?;
    Ok(m)
}

fn squeeze_table() -> Table {
    Table::new(&["theta", "s_db", "stderr_db"])
}

fn cmd_squeeze(ctx: &mut Ctx) -> CliResult<Vec<u64>> {
    let q = ctx.cfg.squeeze.clone();
    let op = match q.p_db {
        Some(p) => OperatingPoint::from_normalized(&ctx.device, q.f_ratio, p),
        None => contour_point(ctx, q.f_ratio, q.gain_db, q.side.side())?.op,
    };
    let squeezer = match q.squeezer {
        SqueezerKind::Jpa => Squeezer::Jpa { op, device: ctx.device },
        SqueezerKind::Linearized => Squeezer::Linearized { op, device: ctx.device },
        SqueezerKind::Ideal => Squeezer::Ideal {
            gain_db: q.ideal_gain_db,
            angle: 0.0,
        },
        SqueezerKind::Off => Squeezer::Off,
    };
    let loss = LossChannel::new(q.loss_db)?;
    let amp = amp_model(ctx, &q.amp)?;
    let mc = MonteCarlo {
        n_samples: q.n_samples,
        n_theta: q.n_theta,
        seed: ctx.cfg.seed,
    };
    let scale = default_quanta_scale(&ctx.device);
    let r = squeezing_with(&squeezer, scale, &loss, &amp, &mc)?;
    let mut t = squeeze_table();
    for k in 0..r.thetas.len() {
        t.push(vec![num(r.thetas[k]), num(r.s_db[k]), num(r.stderr_db[k])]);
    }
    ctx.csv("squeeze_theta.csv", &t);
    if let Some(h) = &q.histogram {
        let hists = readout_histograms(&squeezer, scale, &loss, &amp, &mc, &theta_grid(h.n_theta), h.bins, h.span)?;
        let mut ht = Table::new(&["theta", "bin_lo", "bin_hi", "count_on", "count_off"]);
        for hist in &hists {
            for b in 0..hist.counts_on.len() {
                ht.push(vec![
                    num(hist.theta),
                    num(hist.edges[b]),
                    num(hist.edges[b + 1]),
                    hist.counts_on[b].to_string(),
                    hist.counts_off[b].to_string(),
                ]);
            }
        }
        ctx.csv("squeeze_hist.csv", &ht);
    }
    #[derive(Serialize)]
    struct Doc<'a> {
        squeezer: &'a Squeezer,
        operating_point: OperatingPoint,
        loss_db: f64,
        amp: &'a AmpModel,
        result: &'a crate::squeezing::SqueezeResult,
    }
    ctx.json(
        "squeeze.json",
        &Doc {
            squeezer: &squeezer,
            operating_point: op,
            loss_db: q.loss_db,
            amp: &amp,
            result: &r,
        },
    );
    Ok(vec![ctx.cfg.seed])
}

fn cmd_squeeze_scan(ctx: &mut Ctx) -> CliResult<Vec<u64>> {
    let q = ctx.cfg.squeeze_scan.clone();
    let points: Vec<ContourPoint> = match q.mode {
        ScanMode::PowerCut => power_cut_through_lmg(&ctx.device, q.f_ratio, &q.gains_db, &ctx.search)?.points(),
        ScanMode::Contour => {
            iso_gain_contour(&ctx.device, q.target_gain_db, &q.contour.points(), &ctx.search)?.points
        }
    };
    let loss = LossChannel::new(q.loss_db)?;
    let amp = amp_model(ctx, &q.amp)?;
    let mc = MonteCarlo {
        n_samples: q.n_samples,
        n_theta: q.n_theta,
        seed: ctx.cfg.seed,
    };
    let mut t = table(&["order", "side"], &["gain_db", "min_s_db", "stderr_db", "min_theta"]);
    let mut doc = Vec::new();
    for (i, p) in points.iter().enumerate() {
        let r = squeezing_vs_theta(&p.op, &ctx.device, &loss, &amp, &mc)?;
        t.push(row(
            vec![i.to_string(), p.side.label().into()],
            &p.op,
            vec![num(p.gain_db), num(r.min_s_db), num(r.min_stderr_db), num(r.min_theta)],
        ));
        doc.push((p.side, p.gain_db, r));
    }
    ctx.csv("squeeze_scan.csv", &t);
    ctx.json("squeeze_scan.json", &doc);
    Ok(vec![ctx.cfg.seed])
}

fn omega_or_critical(ctx: &Ctx, freq_hz: Option<f64>) -> f64 {
    2.0 * PI * freq_hz.unwrap_or_else(|| critical_params(&ctx.device).f_c)
}

fn cmd_noise_fit(ctx: &mut Ctx) -> CliResult<Vec<u64>> {
    let c = ctx.cfg.noise_fit.clone();
    let path = c
        .data
        .as_ref()
        .map(|p| ctx.cfg.resolve(p))
        .ok_or_else(|| CliError::Config(ConfigError::Invalid("noise_fit.data is required".into())))?;
    let data = read_noise_csv(&path)?;
    let omega = omega_or_critical(ctx, c.freq_hz);
    let settings = FitSettings {
        max_iter: c.max_iter.unwrap_or(FitSettings::default().max_iter),
        ..FitSettings::default()
    };
    let fit = fit_added_noise(&data, omega, None, &settings)?;
    let model = fit.model();
    let mut t = Table::new(&["T_vts_K", "T_fridge_K", "psd_out_quanta", "model_quanta", "rel_residual"]);
    for s in &data {
        let m = model.eval(s.t_vts, s.t_fridge, omega)?;
        t.push(vec![num(s.t_vts), num(s.t_fridge), num(s.psd_out), num(m), num(m / s.psd_out - 1.0)]);
    }
    ctx.csv("noise_fit_residuals.csv", &t);
    #[derive(Serialize)]
    struct Doc<'a> {
        omega: f64,
        n_samples: usize,
        fit: &'a FitResult,
    }
    ctx.json(
        "noise_fit.json",
        &Doc {
            omega,
            n_samples: data.len(),
            fit: &fit,
        },
    );
    if !ctx.cfg.output.format.json() {
        let mut s = Table::new(&["n_add", "sigma_n_add", "lambda", "sigma_lambda", "chain_gain_db", "sigma_chain_gain_db", "residual_rms", "ill_conditioned", "at_bound"]);
        s.push(vec![
            num(fit.n_add),
            num(fit.sigma_n_add),
            num(fit.lambda),
            num(fit.sigma_lambda),
            num(fit.chain_gain_db),
            num(fit.sigma_chain_gain_db),
            num(fit.residual_rms),
            fit.ill_conditioned.to_string(),
            fit.at_bound.to_string(),
        ]);
        ctx.csv("noise_fit.csv", &s);
    }
    Ok(vec![])
}

fn cmd_line_budget(ctx: &mut Ctx) -> CliResult<Vec<u64>> {
    let c = ctx.cfg.line_budget.clone();
    let budget = LineBudget::new(c.g_a_out_db, c.g_s_out_db, c.a_in_db);
    let (_, eta_sigma) =
        transport_loss_with_uncertainty((c.g_a_out_db, c.g_a_out_sigma_db), (c.g_s_out_db, c.g_s_out_sigma_db));
    let planes = critical_power_planes(&ctx.device, c.a_in_db);
    let mut t = Table::new(&[
        "g_a_out_db",
        "g_s_out_db",
        "eta_db",
        "eta_sigma_db",
        "a_in_db",
        "p_c_device_dbm",
        "p_c_generator_dbm",
        "p_c_generator_sigma_db",
    ]);
    t.push(vec![
        num(budget.g_a_out),
        num(budget.g_s_out),
        num(budget.eta_db),
        num(eta_sigma),
        num(budget.a_in),
        num(planes.device_dbm),
        num(planes.generator_dbm),
        num(c.a_in_sigma_db),
    ]);
    ctx.csv("line_budget.csv", &t);
    #[derive(Serialize)]
    struct Doc {
        budget: LineBudget,
        eta_sigma_db: f64,
        transmissivity: f64,
        critical_power: CriticalPowerPlanes,
    }
    ctx.json(
        "line_budget.json",
        &Doc {
            budget,
            eta_sigma_db: eta_sigma,
            transmissivity: budget.transmissivity(),
            critical_power: planes,
        },
    );
    Ok(vec![])
}

fn cmd_synth_noise(ctx: &mut Ctx) -> CliResult<Vec<u64>> {
    let c = ctx.cfg.synth_noise.clone();
    let model = NoiseModel {
        chain_gain_db: c.chain_gain_db,
        lambda: c.lambda,
        n_add: c.n_add,
    };
    let grid = crate::gain::linspace(c.t_vts_k[0], c.t_vts_k[1], c.n_vts);
    let omega = omega_or_critical(ctx, c.freq_hz);
    let data = synth_noise_data(&model, &grid, &c.t_fridge_k, omega, ctx.cfg.seed, c.noise_frac)?;
    ctx.csv("noise_data.csv", &noise_table(&data));
    #[derive(Serialize)]
    struct Doc<'a> {
        model: NoiseModel,
        omega: f64,
        noise_frac: f64,
        samples: &'a [crate::calibration::NoiseSample],
    }
    ctx.json(
        "noise_data.json",
        &Doc {
            model,
            omega,
            noise_frac: c.noise_frac,
            samples: &data,
        },
    );
    Ok(vec![ctx.cfg.seed])
}
