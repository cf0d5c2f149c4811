//! Command-line front end for the `polc` binary.
//!
//! Arguments are folded into a fully resolved [`RunConfig`]: values from a
//! `--config` file first, then explicit flags on top. The resolved config is
//! plain JSON and can be fed back through `--config` to repeat a run.
//!
//! Exit codes: 0 success, 1 configuration error, 2 numerical failure.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::bands::{
    band_scan, polariton_masses, rabi_splitting, resonant_lower_mass, write_band_csv,
};
use crate::degeneracy::{
    degeneracy_parameter, degeneracy_temperature, thermal_wavelength, GasState,
};
use crate::error::{Error, Result};
use crate::io::fmt_f64;
use crate::oracle::compare_to_analytic;
use crate::packet::{
    broadening_time, evolve, gaussian_packet, plateau_velocities, recentered_overlap,
    DetuningSchedule, EvolveOptions, Grid, Mode, ProtocolShape,
};
use crate::params::{presets, CrystalParams, ParamsFile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

#[derive(Debug, Parser)]
#[command(name = "polc", version, about = "1D polaritonic crystal simulator")]
pub struct Cli {
    /// Parameter file (JSON), or a bundled preset name: fig2.json, reduced.json
    #[arg(long, global = true)]
    pub params: Option<String>,
    /// Output file (bands, masses, oracle, degeneracy) or directory (packet)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Do not echo the resolved configuration to stderr
    #[arg(long, global = true)]
    pub quiet: bool,
    /// Resolved run configuration (JSON) to start from; flags override it
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Number of cells
    #[arg(long = "M", global = true)]
    pub cells: Option<usize>,
    /// Lattice constant in μm
    #[arg(long, global = true)]
    pub l_um: Option<f64>,
    /// Coupling g/2π in GHz
    #[arg(long, global = true)]
    pub g_ghz: Option<f64>,
    /// Atomic transition frequency in THz (ω/2π)
    #[arg(long, global = true)]
    pub omega_ab_thz: Option<f64>,
    /// Cavity frequency in THz (ω/2π)
    #[arg(long, global = true)]
    pub omega_ph_thz: Option<f64>,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Brillouin-zone scan of both polariton branches (CSV)
    Bands {
        #[arg(long)]
        n_points: Option<usize>,
    },
    /// Polariton masses, effective detuning and Rabi gap (JSON)
    Masses,
    /// Tight-binding diagonalisation checked against the analytic bands
    Oracle,
    /// Degeneracy temperature and thermal wavelength of the lower-polariton gas
    Degeneracy {
        /// Linear density, 1/m
        #[arg(long)]
        n1: Option<f64>,
        /// Temperature, K
        #[arg(long = "T")]
        temperature: Option<f64>,
        /// Lower-polariton mass, kg (default: resonant mass of the crystal)
        #[arg(long)]
        m2: Option<f64>,
    },
    /// Write/store/read wave-packet simulation
    Packet(PacketArgs),
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct PacketArgs {
    /// `default` or a path to a schedule JSON ({"segments": [...]})
    #[arg(long)]
    pub protocol: Option<String>,
    /// full-band or parabolic
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long)]
    pub grid_n: Option<usize>,
    /// Domain length in units of f
    #[arg(long)]
    pub length: Option<f64>,
    /// k_x·f
    #[arg(long)]
    pub carrier: Option<f64>,
    /// Initial density width in units of f
    #[arg(long)]
    pub width: Option<f64>,
    /// Physical packet width f, m
    #[arg(long)]
    pub f_m: Option<f64>,
    #[arg(long)]
    pub d_write: Option<f64>,
    #[arg(long)]
    pub d_store: Option<f64>,
    #[arg(long)]
    pub ramp_width: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub trace_every: Option<usize>,
    /// Comma-separated τ values for envelope snapshots
    #[arg(long, value_delimiter = ',')]
    pub snapshots: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProtocolSpec {
    Default(ProtocolShape),
    Custom(DetuningSchedule),
}

impl ProtocolSpec {
    pub fn schedule(&self) -> Result<DetuningSchedule> {
        match self {
            ProtocolSpec::Default(shape) => shape.schedule(),
            ProtocolSpec::Custom(s) => Ok(s.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PacketConfig {
    pub grid_n: usize,
    pub length: f64,
    pub carrier: f64,
    pub width: f64,
    pub f_m: f64,
    pub mode: Mode,
    pub protocol: ProtocolSpec,
    pub steps_per_segment: usize,
    pub trace_every: usize,
    pub snapshots: Vec<f64>,
}

impl Default for PacketConfig {
    fn default() -> Self {
        Self {
            grid_n: 2048,
            length: 64.0,
            carrier: 10.0,
            width: 1.0,
            f_m: 1e-4,
            mode: Mode::Parabolic,
            protocol: ProtocolSpec::Default(ProtocolShape::default()),
            steps_per_segment: 2000,
            trace_every: 10,
            snapshots: vec![0.0, 0.25, 0.5, 0.75, 1.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum CommandConfig {
    Bands {
        n_points: usize,
    },
    Masses,
    Oracle,
    Degeneracy {
        n1_per_m: f64,
        temperature_k: f64,
        m2_kg: f64,
    },
    Packet(PacketConfig),
}

impl CommandConfig {
    pub fn name(&self) -> &'static str {
        match self {
            CommandConfig::Bands { .. } => "bands",
            CommandConfig::Masses => "masses",
            CommandConfig::Oracle => "oracle",
            CommandConfig::Degeneracy { .. } => "degeneracy",
            CommandConfig::Packet(_) => "packet",
        }
    }
}

/// Everything one invocation needs, with defaults and presets expanded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: CommandConfig,
    pub params: ParamsFile,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub quiet: bool,
}

impl RunConfig {
    pub fn crystal(&self) -> Result<CrystalParams> {
        self.params.resolve()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }
}

fn load_params(source: &str) -> Result<ParamsFile> {
    let path = Path::new(source);
    let text = if path.exists() {
        fs::read_to_string(path)?
    } else if let Some(bundled) =
        presets::lookup(path.file_name().and_then(|n| n.to_str()).unwrap_or(source))
    {
        bundled.to_owned()
    } else {
        return Err(Error::Config(format!(
            "parameter file '{source}' not found"
        )));
    };
    ParamsFile::from_json(&text)
}

fn apply_param_overrides(cli: &Cli, file: &mut ParamsFile) {
    if let Some(m) = cli.cells {
        file.m = m;
    }
    if let Some(l) = cli.l_um {
        file.l_m = l * 1e-6;
    }
    if let Some(g) = cli.g_ghz {
        file.g_rad_s = TWO_PI * g * 1e9;
    }
    if let Some(w) = cli.omega_ab_thz {
        file.omega_ab_rad_s = TWO_PI * w * 1e12;
    }
    if let Some(w) = cli.omega_ph_thz {
        file.omega_ph_rad_s = TWO_PI * w * 1e12;
    }
}

fn require_finite(name: &str, x: f64) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::Config(format!(
            "{name} = {x} is not a finite number"
        )))
    }
}

fn resolve_packet(args: &PacketArgs, base: Option<PacketConfig>) -> Result<PacketConfig> {
    let mut cfg = base.unwrap_or_default();
    if let Some(mode) = &args.mode {
        cfg.mode = mode.parse()?;
    }
    macro_rules! set {
        ($field:ident, $arg:ident) => {
            if let Some(v) = args.$arg {
                cfg.$field = v;
            }
        };
    }
    set!(grid_n, grid_n);
    set!(length, length);
    set!(carrier, carrier);
    set!(width, width);
    set!(f_m, f_m);
    set!(steps_per_segment, steps);
    set!(trace_every, trace_every);
    if let Some(s) = &args.snapshots {
        cfg.snapshots = s.clone();
    }
    match args.protocol.as_deref() {
        None => {}
        Some("default") => {
            if !matches!(cfg.protocol, ProtocolSpec::Default(_)) {
                cfg.protocol = ProtocolSpec::Default(ProtocolShape::default());
            }
        }
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("schedule file '{path}': {e}")))?;
            let schedule: DetuningSchedule = serde_json::from_str(&text)
                .map_err(|e| Error::Config(format!("schedule file '{path}': {e}")))?;
            cfg.protocol = ProtocolSpec::Custom(schedule);
        }
    }
    let shape_flags = args.d_write.is_some() || args.d_store.is_some() || args.ramp_width.is_some();
    match &mut cfg.protocol {
        ProtocolSpec::Default(shape) => {
            if let Some(d) = args.d_write {
                shape.d_write = d;
            }
            if let Some(d) = args.d_store {
                shape.d_store = d;
            }
            if let Some(w) = args.ramp_width {
                shape.ramp_width = w;
            }
            shape.schedule()?;
        }
        ProtocolSpec::Custom(_) if shape_flags => {
            return Err(Error::Config(
                "--d-write/--d-store/--ramp-width only apply to the default protocol".into(),
            ));
        }
        ProtocolSpec::Custom(_) => {}
    }
    for (name, x) in [
        ("length", cfg.length),
        ("carrier", cfg.carrier),
        ("width", cfg.width),
        ("f_m", cfg.f_m),
    ] {
        require_finite(name, x)?;
    }
    Ok(cfg)
}

/// Folds parsed arguments into a [`RunConfig`].
pub fn resolve(cli: &Cli) -> Result<RunConfig> {
    let base: Option<RunConfig> = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("config file '{}': {e}", path.display())))?;
            Some(
                serde_json::from_str(&text)
                    .map_err(|e| Error::Config(format!("config file '{}': {e}", path.display())))?,
            )
        }
        None => None,
    };

    let mut params = match (&cli.params, &base) {
        (Some(source), _) => load_params(source)?,
        (None, Some(b)) => b.params.clone(),
        (None, None) => ParamsFile::from_json(presets::FIG2_JSON)?,
    };
    apply_param_overrides(cli, &mut params);
    let crystal = params.resolve().map_err(|e| match e {
        Error::InvalidParams(m) => Error::Config(format!("invalid parameters: {m}")),
        other => other,
    })?;

    let base_command = base.as_ref().map(|b| b.command.clone());
    let command = match (&cli.command, base_command) {
        (None, Some(c)) => c,
        (None, None) => {
            return Err(Error::Config(
                "no subcommand given (bands, masses, oracle, degeneracy, packet)".into(),
            ))
        }
        (Some(cmd), base_cmd) => {
            if let Some(b) = &base_cmd {
                let wanted = match cmd {
                    Command::Bands { .. } => "bands",
                    Command::Masses => "masses",
                    Command::Oracle => "oracle",
                    Command::Degeneracy { .. } => "degeneracy",
                    Command::Packet(_) => "packet",
                };
                if b.name() != wanted {
                    return Err(Error::Config(format!(
                        "config file is for '{}' but '{wanted}' was requested",
                        b.name()
                    )));
                }
            }
            match cmd {
                Command::Bands { n_points } => {
                    let base_n = match base_cmd {
                        Some(CommandConfig::Bands { n_points }) => n_points,
                        _ => 1001,
                    };
                    CommandConfig::Bands {
                        n_points: n_points.unwrap_or(base_n),
                    }
                }
                Command::Masses => CommandConfig::Masses,
                Command::Oracle => CommandConfig::Oracle,
                Command::Degeneracy {
                    n1,
                    temperature,
                    m2,
                } => {
                    let (b_n1, b_t, b_m2) = match base_cmd {
                        Some(CommandConfig::Degeneracy {
                            n1_per_m,
                            temperature_k,
                            m2_kg,
                        }) => (n1_per_m, temperature_k, Some(m2_kg)),
                        _ => (1e6, 300.0, None),
                    };
                    CommandConfig::Degeneracy {
                        n1_per_m: n1.unwrap_or(b_n1),
                        temperature_k: temperature.unwrap_or(b_t),
                        m2_kg: m2
                            .or(b_m2)
                            .unwrap_or_else(|| resonant_lower_mass(crystal.m_ph(), crystal.m_at())),
                    }
                }
                Command::Packet(args) => {
                    let b = match base_cmd {
                        Some(CommandConfig::Packet(p)) => Some(p),
                        _ => None,
                    };
                    CommandConfig::Packet(resolve_packet(args, b)?)
                }
            }
        }
    };

    Ok(RunConfig {
        command,
        params: ParamsFile::from(&crystal),
        out: cli
            .out
            .clone()
            .or_else(|| base.as_ref().and_then(|b| b.out.clone())),
        quiet: cli.quiet || base.as_ref().is_some_and(|b| b.quiet),
    })
}

/// Parses an argument vector (program name first) into a [`RunConfig`].
pub fn parse_config<I, T>(argv: I) -> Result<RunConfig>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| Error::Config(e.to_string()))?;
    resolve(&cli)
}

fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(text.as_bytes())?;
            lock.flush()?;
        }
    }
    Ok(())
}

fn json_text(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("json serialises");
    s.push('\n');
    s
}

pub fn masses_report(p: &CrystalParams) -> serde_json::Value {
    let (m1, m2) = polariton_masses(p);
    json!({
        "m_1_kg": m1,
        "m_2_kg": m2,
        "m_2_resonant_kg": resonant_lower_mass(p.m_ph(), p.m_at()),
        "m_ph_kg": p.m_ph(),
        "m_at_kg": p.m_at(),
        "delta_rad_s": p.detuning(),
        "delta_tilde_rad_s": p.effective_detuning(),
        "rabi_gap_2g_rad_s": 2.0 * p.g,
        "min_splitting_rad_s": rabi_splitting(p, std::f64::consts::FRAC_PI_2 / p.l),
        "params": ParamsFile::from(p),
    })
}

pub fn degeneracy_table(n1: f64, t: f64, m2: f64) -> Result<String> {
    let gas = GasState::new(n1, t, m2)?;
    let td = degeneracy_temperature(n1, m2)?;
    let lam = thermal_wavelength(m2, t)?;
    let chi = degeneracy_parameter(&gas)?;
    Ok(format!(
        "quantity            value                    unit\n\
         n1                  {:<24} 1/m\n\
         T                   {:<24} K\n\
         m2                  {:<24} kg\n\
         T_d                 {:<24} K\n\
         Lambda_T            {:<24} m\n\
         n1*Lambda_T         {:<24} 1\n",
        fmt_f64(n1),
        fmt_f64(t),
        fmt_f64(m2),
        fmt_f64(td),
        fmt_f64(lam),
        fmt_f64(chi),
    ))
}

fn run_packet(cfg: &PacketConfig, p: &CrystalParams, out_dir: &Path) -> Result<serde_json::Value> {
    let grid = Grid::new(cfg.grid_n, cfg.length)?;
    let packet = gaussian_packet(&grid, cfg.carrier, cfg.width, cfg.f_m)?;
    let schedule = cfg.protocol.schedule()?;
    let opts = EvolveOptions {
        mode: cfg.mode,
        steps_per_segment: cfg.steps_per_segment,
        trace_every: cfg.trace_every,
        snapshot_times: cfg.snapshots.clone(),
    };
    let trace = evolve(&packet, &schedule, p, &opts)?;

    fs::create_dir_all(out_dir)?;
    let mut csv = String::from("tau,center_X,sigma_X,norm\n");
    for i in 0..trace.len() {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            fmt_f64(trace.times[i]),
            fmt_f64(trace.centers[i]),
            fmt_f64(trace.widths[i]),
            fmt_f64(trace.norms[i])
        ));
    }
    fs::write(out_dir.join("trace.csv"), csv)?;

    let xs = grid.positions();
    let mut envelope_files = Vec::new();
    for snap in &trace.snapshots {
        let name = format!("envelope_tau_{:.4}.csv", snap.tau);
        let mut text = String::from("X,S\n");
        for (x, s) in xs.iter().zip(&snap.envelope) {
            text.push_str(&format!("{},{}\n", fmt_f64(*x), fmt_f64(*s)));
        }
        fs::write(out_dir.join(&name), text)?;
        envelope_files.push(name);
    }

    let velocities = plateau_velocities(&trace, &schedule, p, cfg.carrier);
    let overlap = recentered_overlap(&packet, &trace.final_state);
    let summary = json!({
        "mode": cfg.mode,
        "tau_b_s": trace.storage.tau_b_s,
        "tau_b_atomic_s": broadening_time(p.m_at(), cfg.f_m)?,
        "t_stor_s": trace.storage.t_stor_s,
        "t_stor_over_tau_b": trace.storage.ratio,
        "storage_warning": trace.storage.warning,
        "plateau_velocities": velocities,
        "round_trip_overlap": overlap,
        "max_norm_error": trace.max_norm_error(),
        "final_center_X": trace.centers.last(),
        "final_sigma_X": trace.widths.last(),
        "envelope_files": envelope_files,
        "params": ParamsFile::from(p),
        "packet": cfg,
    });
    fs::write(out_dir.join("summary.json"), json_text(&summary))?;
    if let Some(w) = &trace.storage.warning {
        eprintln!("warning: {w}");
    }
    Ok(summary)
}

/// Executes a resolved configuration. Data goes to `--out` or stdout;
/// diagnostics go to stderr.
pub fn run(config: &RunConfig) -> Result<()> {
    let p = config.crystal()?;
    let out = config.out.as_deref();
    match &config.command {
        CommandConfig::Bands { n_points } => {
            let samples = band_scan(&p, *n_points)?;
            let mut buf = Vec::new();
            write_band_csv(&mut buf, &samples)?;
            write_output(out, std::str::from_utf8(&buf).expect("csv is utf-8"))?;
        }
        CommandConfig::Masses => {
            write_output(out, &json_text(&masses_report(&p)))?;
        }
        CommandConfig::Oracle => {
            let cmp = compare_to_analytic(&p)?;
            let mut buf = Vec::new();
            cmp.write_csv(&mut buf)?;
            write_output(out, std::str::from_utf8(&buf).expect("csv is utf-8"))?;
            if out.is_some() {
                println!("{}", cmp.summary_line());
            } else {
                eprintln!("{}", cmp.summary_line());
            }
            if !cmp.passes() {
                return Err(Error::OracleMismatch(cmp.max_rel_dev));
            }
        }
        CommandConfig::Degeneracy {
            n1_per_m,
            temperature_k,
            m2_kg,
        } => {
            let table = degeneracy_table(*n1_per_m, *temperature_k, *m2_kg)?;
            write_output(out, &table)?;
        }
        CommandConfig::Packet(cfg) => {
            let dir = out.map_or_else(|| PathBuf::from("packet_out"), Path::to_path_buf);
            let summary = run_packet(cfg, &p, &dir)?;
            if !config.quiet {
                eprintln!(
                    "packet: overlap {} t_stor/tau_b {} -> {}",
                    summary["round_trip_overlap"],
                    summary["t_stor_over_tau_b"],
                    dir.display()
                );
            }
        }
    }
    Ok(())
}

pub fn exit_code(err: &Error) -> i32 {
    if err.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_CONFIG
    }
}

/// Full `main` body: parse, echo, run, map errors to exit codes.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let config = match resolve(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    if !config.quiet {
        eprintln!("{}", config.to_json());
    }
    match run(&config) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
