//! Command-line flags, `key=value` config files and their resolution into [`RunConfig`].
//!
//! Precedence is flags, then the config file, then the per-command defaults.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{Map, Value};

use crate::error::{usage, CliResult};
use crate::format::num;

#[derive(Debug, Parser)]
#[command(
    name = "airybasis",
    version,
    about = "Airy eigenbasis of V = λ|x|: spectra, packets, GRIN fields and checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Energy levels E_n of p²/2 + λ|x|.
    Eigs(CommonArgs),
    /// Samples of the normalized eigenfunctions, one column per state.
    Eigenfunctions(CommonArgs),
    /// Mean position ⟨x⟩(t) of a Gaussian packet in the λ|x| well.
    Bounce(BounceArgs),
    /// Intensity |E(x, z)|² of an Airy wavelet in a linear GRIN medium.
    Grin(GrinArgs),
    /// Run the invariant suite and report each check.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    fn as_str(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("format must be csv or json, got '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
#[command(allow_negative_numbers = true)]
pub struct CommonArgs {
    /// Slope λ of the potential.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Left end of the position grid.
    #[arg(long)]
    pub xmin: Option<f64>,
    /// Right end of the position grid.
    #[arg(long)]
    pub xmax: Option<f64>,
    /// Number of grid points.
    #[arg(long)]
    pub points: Option<usize>,
    /// Number of eigenstates.
    #[arg(long, visible_alias = "n")]
    pub nstates: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// File of key=value lines supplying defaults for any flag.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
#[command(allow_negative_numbers = true)]
pub struct BounceArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Packet centre.
    #[arg(long)]
    pub x0: Option<f64>,
    /// Packet width σ.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Final time, in multiples of --t-unit.
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Time step, in multiples of --t-unit.
    #[arg(long)]
    pub dt: Option<f64>,
    /// Time unit (default 1/∛2).
    #[arg(long)]
    pub t_unit: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
#[command(allow_negative_numbers = true)]
pub struct GrinArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Wavelet shift q.
    #[arg(long)]
    pub q: Option<f64>,
    /// κ = k̃ n₀.
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Largest propagation distance.
    #[arg(long)]
    pub z_max: Option<f64>,
    /// Number of z samples on [0, z_max].
    #[arg(long)]
    pub n_z: Option<usize>,
    /// Half-width of the written x window.
    #[arg(long)]
    pub window: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
#[command(allow_negative_numbers = true)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Scale every basis energy by (1 + ε) to check that the suite notices.
    #[arg(long)]
    pub fuzz_energy: Option<f64>,
}

const KNOWN_KEYS: &[&str] = &[
    "lambda",
    "xmin",
    "xmax",
    "points",
    "nstates",
    "format",
    "out",
    "x0",
    "sigma",
    "t_max",
    "dt",
    "t_unit",
    "q",
    "kappa",
    "z_max",
    "n_z",
    "window",
    "fuzz_energy",
];

/// Parses `key=value` lines; blank lines and `#` comments are skipped.
pub fn read_config_file(path: &Path) -> CliResult<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> CliResult<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| usage(format!("config line {}: expected key=value", i + 1)))?;
        let key = k.trim().replace('-', "_");
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(usage(format!("config line {}: unknown key '{key}'", i + 1)));
        }
        map.insert(key, v.trim().to_string());
    }
    Ok(map)
}

struct Layers {
    file: BTreeMap<String, String>,
}

impl Layers {
    fn load(path: Option<&Path>) -> CliResult<Self> {
        Ok(Self {
            file: match path {
                Some(p) => read_config_file(p)?,
                None => BTreeMap::new(),
            },
        })
    }

    fn pick<T>(&self, flag: Option<T>, key: &str, default: T) -> CliResult<T>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.file.get(key) {
            Some(s) => s
                .parse()
                .map_err(|e| usage(format!("config key '{key}': {e}"))),
            None => Ok(default),
        }
    }
}

/// Grid, basis and output settings shared by every subcommand.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: &'static str,
    pub lambda: f64,
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
    pub n_states: usize,
    pub format: Format,
    pub out: Option<PathBuf>,
    /// Subcommand-specific numeric parameters, in a fixed order.
    pub extra: Vec<(&'static str, f64)>,
}

impl RunConfig {
    pub fn extra(&self, key: &str) -> f64 {
        self.extra
            .iter()
            .find(|(k, _)| *k == key)
            .map(|(_, v)| *v)
            .unwrap_or_else(|| panic!("no parameter '{key}' for {}", self.command))
    }

    /// Config echo written into JSON output.
    pub fn meta(&self) -> Map<String, Value> {
        let mut m = Map::new();
        m.insert("command".into(), Value::from(self.command));
        m.insert("lambda".into(), num(self.lambda));
        m.insert("xmin".into(), num(self.x_min));
        m.insert("xmax".into(), num(self.x_max));
        m.insert("points".into(), Value::from(self.n_points));
        m.insert("nstates".into(), Value::from(self.n_states));
        m.insert("format".into(), Value::from(self.format.as_str()));
        m.insert(
            "out".into(),
            self.out
                .as_ref()
                .map(|p| Value::from(p.display().to_string()))
                .unwrap_or(Value::Null),
        );
        for (k, v) in &self.extra {
            m.insert((*k).into(), num(*v));
        }
        m
    }

    fn validate(&self) -> CliResult<()> {
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(usage(format!(
                "--lambda must be positive, got {}",
                self.lambda
            )));
        }
        if !(self.x_min.is_finite() && self.x_max.is_finite() && self.x_min < self.x_max) {
            return Err(usage(format!(
                "need --xmin < --xmax, got {} and {}",
                self.x_min, self.x_max
            )));
        }
        if self.n_points < 3 {
            return Err(usage("--points must be at least 3"));
        }
        if self.n_states == 0 {
            return Err(usage("--nstates must be at least 1"));
        }
        Ok(())
    }
}

struct Defaults {
    lambda: f64,
    x_min: f64,
    x_max: f64,
    n_points: usize,
    n_states: usize,
}

fn resolve_common(
    command: &'static str,
    a: &CommonArgs,
    layers: &Layers,
    d: Defaults,
) -> CliResult<RunConfig> {
    let out = match (&a.out, layers.file.get("out")) {
        (Some(p), _) => Some(p.clone()),
        (None, Some(s)) => Some(PathBuf::from(s)),
        (None, None) => None,
    };
    Ok(RunConfig {
        command,
        lambda: layers.pick(a.lambda, "lambda", d.lambda)?,
        x_min: layers.pick(a.xmin, "xmin", d.x_min)?,
        x_max: layers.pick(a.xmax, "xmax", d.x_max)?,
        n_points: layers.pick(a.points, "points", d.n_points)?,
        n_states: layers.pick(a.nstates, "nstates", d.n_states)?,
        format: layers.pick(a.format, "format", Format::Csv)?,
        out,
        extra: Vec::new(),
    })
}

/// Time unit 1/∛2 used for the bouncing-packet plots.
pub fn default_time_unit() -> f64 {
    1.0 / 2f64.cbrt()
}

/// Shift 2^{-2/3} a_1 used by the default GRIN run.
pub const REFERENCE_Q: f64 = -1.472910;

pub fn resolve(command: &Command) -> CliResult<RunConfig> {
    let cfg = match command {
        Command::Eigs(a) => {
            let layers = Layers::load(a.config.as_deref())?;
            resolve_common(
                "eigs",
                a,
                &layers,
                Defaults {
                    lambda: 1.0,
                    x_min: -40.0,
                    x_max: 40.0,
                    n_points: 8001,
                    n_states: 6,
                },
            )?
        }
        Command::Eigenfunctions(a) => {
            let layers = Layers::load(a.config.as_deref())?;
            resolve_common(
                "eigenfunctions",
                a,
                &layers,
                Defaults {
                    lambda: 1.0,
                    x_min: -15.0,
                    x_max: 15.0,
                    n_points: 3001,
                    n_states: 6,
                },
            )?
        }
        Command::Bounce(b) => {
            let layers = Layers::load(b.common.config.as_deref())?;
            let mut cfg = resolve_common(
                "bounce",
                &b.common,
                &layers,
                Defaults {
                    lambda: 1.0,
                    x_min: -45.0,
                    x_max: 45.0,
                    n_points: 9001,
                    n_states: 120,
                },
            )?;
            cfg.extra = vec![
                ("x0", layers.pick(b.x0, "x0", 10.0)?),
                ("sigma", layers.pick(b.sigma, "sigma", 2.0)?),
                ("t_max", layers.pick(b.t_max, "t_max", 8000.0)?),
                ("dt", layers.pick(b.dt, "dt", 0.05)?),
                (
                    "t_unit",
                    layers.pick(b.t_unit, "t_unit", default_time_unit())?,
                ),
            ];
            let (t_max, dt, unit) = (cfg.extra("t_max"), cfg.extra("dt"), cfg.extra("t_unit"));
            if !(dt > 0.0 && dt.is_finite() && unit > 0.0 && unit.is_finite()) {
                return Err(usage("--dt and --t-unit must be positive"));
            }
            if !(t_max >= 0.0 && t_max.is_finite()) {
                return Err(usage("--t-max must be non-negative"));
            }
            cfg
        }
        Command::Grin(g) => {
            let layers = Layers::load(g.common.config.as_deref())?;
            let mut cfg = resolve_common(
                "grin",
                &g.common,
                &layers,
                Defaults {
                    lambda: 0.1,
                    x_min: -300.0,
                    x_max: 300.0,
                    n_points: 30001,
                    n_states: 900,
                },
            )?;
            let n_z: usize = layers.pick(g.n_z, "n_z", 400)?;
            cfg.extra = vec![
                ("q", layers.pick(g.q, "q", REFERENCE_Q)?),
                ("kappa", layers.pick(g.kappa, "kappa", 1.0)?),
                ("z_max", layers.pick(g.z_max, "z_max", 200.0)?),
                ("n_z", n_z as f64),
                ("window", layers.pick(g.window, "window", 30.0)?),
            ];
            if n_z == 0 {
                return Err(usage("--n-z must be at least 1"));
            }
            let window = cfg.extra("window");
            if window.is_nan() || window <= 0.0 {
                return Err(usage("--window must be positive"));
            }
            cfg
        }
        Command::Verify(v) => {
            let layers = Layers::load(v.common.config.as_deref())?;
            let mut cfg = resolve_common(
                "verify",
                &v.common,
                &layers,
                Defaults {
                    lambda: 1.0,
                    x_min: -40.0,
                    x_max: 40.0,
                    n_points: 8001,
                    n_states: 20,
                },
            )?;
            cfg.extra = vec![(
                "fuzz_energy",
                layers.pick(v.fuzz_energy, "fuzz_energy", 0.0)?,
            )];
            cfg
        }
    };
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> RunConfig {
        let cli = Cli::try_parse_from(args).unwrap();
        resolve(&cli.command).unwrap()
    }

    #[test]
    fn defaults_per_command() {
        let e = parse(&["airybasis", "eigs"]);
        assert_eq!((e.lambda, e.n_states, e.format), (1.0, 6, Format::Csv));
        let g = parse(&["airybasis", "grin"]);
        assert_eq!(g.lambda, 0.1);
        assert_eq!(g.extra("q"), REFERENCE_Q);
        assert_eq!(g.extra("kappa"), 1.0);
        let b = parse(&["airybasis", "bounce"]);
        assert_eq!((b.extra("x0"), b.extra("sigma")), (10.0, 2.0));
    }

    #[test]
    fn negative_values_and_alias() {
        let e = parse(&[
            "airybasis",
            "eigenfunctions",
            "--xmin",
            "-12",
            "--xmax",
            "12",
            "--n",
            "3",
        ]);
        assert_eq!((e.x_min, e.x_max, e.n_states), (-12.0, 12.0, 3));
    }

    #[test]
    fn flags_beat_file_beat_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        std::fs::write(&path, "# comment\nlambda = 8\nnstates=3\nformat=json\n").unwrap();
        let p = path.to_str().unwrap();
        let from_file = parse(&["airybasis", "eigs", "--config", p]);
        assert_eq!(
            (from_file.lambda, from_file.n_states, from_file.format),
            (8.0, 3, Format::Json)
        );
        let flagged = parse(&["airybasis", "eigs", "--config", p, "--lambda", "2"]);
        assert_eq!((flagged.lambda, flagged.n_states), (2.0, 3));
    }

    #[test]
    fn bad_config_is_a_usage_error() {
        assert!(parse_config("colour=blue").is_err());
        assert!(parse_config("lambda").is_err());
        let map = parse_config("lambda=abc").unwrap();
        let layers = Layers { file: map };
        assert!(layers.pick::<f64>(None, "lambda", 1.0).is_err());
    }

    #[test]
    fn invalid_values_rejected() {
        for args in [
            vec!["airybasis", "eigs", "--n", "0"],
            vec!["airybasis", "eigs", "--lambda", "-1"],
            vec!["airybasis", "eigenfunctions", "--xmin", "5", "--xmax", "1"],
            vec!["airybasis", "bounce", "--dt", "0"],
        ] {
            let cli = Cli::try_parse_from(&args).unwrap();
            assert_eq!(
                resolve(&cli.command).unwrap_err().exit_code(),
                1,
                "{args:?}"
            );
        }
    }
}
