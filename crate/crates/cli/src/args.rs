use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::parser::ValueSource;
use clap::{ArgMatches, Args, CommandFactory, FromArgMatches, Parser, Subcommand};
use zapshift_core::{ClientOrdering, Dwell, OrderingKind, ScenarioConfig, ShiftKind};

use crate::UsageError;

#[derive(Debug, Parser)]
#[command(name = "zapshift", version, about = "IPTV channel-change latency with time-shifted key frames")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub params: Params,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Run one scenario and its no-reordering baseline.
    Simulate {
        /// Also dump press-by-press traces of the first COUNT episodes.
        #[arg(long, value_name = "COUNT")]
        trace: Option<u64>,
    },
    /// Exact expected switch counts per ordering and channel count.
    Analyze,
    /// Run every separation × wait combination.
    Sweep,
    /// Regenerate the data behind one exhibit.
    Reproduce {
        /// One of: table1, fig4, fig5, fig6, fig7, fig8, fig9, fig10, table2.
        id: String,
    },
}

/// Shared parameters. Anything not given on the command line falls back to
/// the config file, then to the defaults shown here.
#[derive(Debug, Clone, Args)]
pub struct Params {
    /// Number of channels; a list for `analyze`.
    #[arg(long, global = true, value_delimiter = ',', default_value = "100")]
    pub channels: Vec<usize>,

    /// Zipf shape parameter.
    #[arg(long, global = true, default_value_t = 1.0)]
    pub shape: f64,

    /// GOP duration in milliseconds.
    #[arg(long = "gop-ms", global = true, default_value_t = 1000.0)]
    pub gop_ms: f64,

    /// Channels per full GOP of phases (S); a list for `sweep`.
    #[arg(long, global = true, value_delimiter = ',', default_value = "4")]
    pub sep: Vec<u32>,

    /// Maximum wait window in requests (ΔW >= 1); a list for `sweep`.
    #[arg(long, global = true, value_delimiter = ',', default_value = "4",
          value_parser = clap::value_parser!(u32).range(1..))]
    pub wait: Vec<u32>,

    /// Network ordering: identity, one-step or two-step; a list for `analyze`.
    #[arg(long, global = true, value_delimiter = ',', default_value = "one-step")]
    pub ordering: Vec<OrderingKind>,

    /// Client channel order: same or randomized.
    #[arg(long = "client-ordering", global = true, default_value = "same")]
    pub client_ordering: ClientOrdering,

    /// Key-frame shifts: laddered or randomized.
    #[arg(long, global = true, default_value = "laddered")]
    pub shifts: ShiftKind,

    /// Viewer dwell between presses: zero, fixed:<ms> or uniform-gop.
    #[arg(long, global = true, default_value = "uniform-gop")]
    pub dwell: Dwell,

    /// Switch-event budget per run.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    pub events: u64,

    /// Master seed.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,

    /// Output directory.
    #[arg(long, global = true, env = "ZAPSHIFT_OUT", default_value = ".")]
    pub out: PathBuf,

    /// Flat key=value file using the long flag names as keys.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Histogram and CDF bin width in milliseconds.
    #[arg(long = "bins-ms", global = true, default_value_t = 10.0)]
    pub bins_ms: f64,

    /// Worker threads; 0 uses every core. Results do not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
}

/// Keys accepted in a config file, paired with their clap argument ids.
const CONFIG_KEYS: [(&str, &str); 14] = [
    ("channels", "channels"),
    ("shape", "shape"),
    ("gop-ms", "gop_ms"),
    ("sep", "sep"),
    ("wait", "wait"),
    ("ordering", "ordering"),
    ("client-ordering", "client_ordering"),
    ("shifts", "shifts"),
    ("dwell", "dwell"),
    ("events", "events"),
    ("seed", "seed"),
    ("out", "out"),
    ("bins-ms", "bins_ms"),
    ("threads", "threads"),
];

/// Parses `argv`, folding in the config file for any flag not given
/// explicitly.
pub fn parse<I, T>(argv: I) -> Result<Cli, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let matches = Cli::command().try_get_matches_from(&argv)?;
    let Some(path) = matches.get_one::<PathBuf>("config").cloned() else {
        return Cli::from_arg_matches(&matches);
    };
    let entries = read_config_file(&path).map_err(|e| usage(e.to_string()))?;
    let mut full = argv;
    for (key, value) in entries {
        let id = CONFIG_KEYS
            .iter()
            .find(|(k, _)| *k == key)
            .map(|(_, id)| *id)
            .ok_or_else(|| usage(format!("unknown config key `{key}` in {}", path.display())))?;
        if explicit(&matches, id) {
            continue;
        }
        full.push(format!("--{key}={value}").into());
    }
    let matches = Cli::command().try_get_matches_from(&full)?;
    Cli::from_arg_matches(&matches)
}

fn explicit(matches: &ArgMatches, id: &str) -> bool {
    // Global args land on the subcommand's matches when given after it.
    let mut m = Some(matches);
    while let Some(cur) = m {
        if matches!(
            cur.value_source(id),
            Some(ValueSource::CommandLine) | Some(ValueSource::EnvVariable)
        ) {
            return true;
        }
        m = cur.subcommand().map(|(_, sub)| sub);
    }
    false
}

fn usage(msg: String) -> clap::Error {
    Cli::command().error(clap::error::ErrorKind::ValueValidation, msg)
}

/// Reads `key = value` lines; `#` starts a comment.
pub fn read_config_file(path: &Path) -> Result<Vec<(String, String)>, UsageError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
    parse_config_text(&text)
}

pub fn parse_config_text(text: &str) -> Result<Vec<(String, String)>, UsageError> {
    let mut out: Vec<(String, String)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| UsageError(format!("config line {}: expected key=value", lineno + 1)))?;
        let (k, v) = (k.trim().to_string(), v.trim().to_string());
        if out.iter().any(|(seen, _)| *seen == k) {
            return Err(UsageError(format!("config line {}: duplicate key `{k}`", lineno + 1)));
        }
        out.push((k, v));
    }
    Ok(out)
}

impl Params {
    /// Single-scenario config; rejects list-valued flags.
    pub fn scenario(&self) -> Result<ScenarioConfig, UsageError> {
        Ok(ScenarioConfig {
            session_count: single("channels", &self.channels)?,
            separation: single("sep", &self.sep)?,
            max_wait: single("wait", &self.wait)? as usize,
            ordering: single("ordering", &self.ordering)?,
            ..self.base_config()?
        })
    }

    /// Config with the scalar flags applied; list flags take their first
    /// value and are expected to be overridden by the caller.
    pub fn base_config(&self) -> Result<ScenarioConfig, UsageError> {
        let cfg = ScenarioConfig {
            session_count: self.channels[0],
            shape: self.shape,
            gop_ms: self.gop_ms,
            separation: self.sep[0],
            max_wait: self.wait[0] as usize,
            ordering: self.ordering[0],
            client_ordering: self.client_ordering,
            shifts: self.shifts,
            dwell: self.dwell,
            event_budget: self.events,
            master_seed: self.seed,
            bin_ms: self.bins_ms,
            ..ScenarioConfig::default()
        };
        cfg.validate().map_err(|e| UsageError(e.to_string()))?;
        Ok(cfg)
    }
}

fn single<T: Copy>(name: &str, values: &[T]) -> Result<T, UsageError> {
    match values {
        [v] => Ok(*v),
        _ => Err(UsageError(format!("--{name} takes a single value for this subcommand"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn simulate_flags_override_defaults() {
        let cli = parse(["zapshift", "simulate", "--channels", "100", "--sep", "4", "--wait", "4", "--seed", "7"]).unwrap();
        let cfg = cli.params.scenario().unwrap();
        assert_eq!(cfg.session_count, 100);
        assert_eq!(cfg.separation, 4);
        assert_eq!(cfg.max_wait, 4);
        assert_eq!(cfg.master_seed, 7);
        assert_eq!(cfg.event_budget, 1_000_000);
        assert_eq!(cfg.ordering, OrderingKind::OneStep);
        assert_eq!(cfg.dwell, Dwell::UniformGop);
        assert_eq!(cfg.gop_ms, 1000.0);
        assert_eq!(cfg.shape, 1.0);
    }

    #[test]
    fn zero_wait_is_usage_error() {
        let err = parse(["zapshift", "simulate", "--wait", "0"]).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn analyze_lists() {
        let cli = parse([
            "zapshift", "analyze", "--channels", "100,200,300,400,500", "--ordering", "one-step,two-step",
        ])
        .unwrap();
        assert_eq!(cli.params.channels, vec![100, 200, 300, 400, 500]);
        assert_eq!(cli.params.ordering, vec![OrderingKind::OneStep, OrderingKind::TwoStep]);
        assert!(cli.params.scenario().is_err());
    }

    #[test]
    fn bad_enum_values_rejected() {
        assert!(parse(["zapshift", "simulate", "--dwell", "often"]).is_err());
        assert!(parse(["zapshift", "simulate", "--ordering", "spiral"]).is_err());
        assert!(parse(["zapshift", "simulate", "--shifts", "wobbly"]).is_err());
    }

    #[test]
    fn invalid_combination_rejected() {
        let cli = parse(["zapshift", "simulate", "--sep", "1"]).unwrap();
        assert!(cli.params.scenario().is_err());
        let cli = parse(["zapshift", "simulate", "--events", "0"]).unwrap();
        assert!(cli.params.scenario().is_err());
    }

    #[test]
    fn config_file_layers_under_flags() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "# sweep defaults\nchannels = 200\nwait = 6\ndwell = fixed:40").unwrap();
        let path = f.path().to_str().unwrap().to_string();
        let cli = parse(["zapshift", "simulate", "--config", &path, "--wait", "3"]).unwrap();
        let cfg = cli.params.scenario().unwrap();
        assert_eq!(cfg.session_count, 200);
        assert_eq!(cfg.max_wait, 3);
        assert_eq!(cfg.dwell, Dwell::Fixed(40.0));
    }

    #[test]
    fn config_file_rejects_unknown_keys() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "chanels = 200").unwrap();
        let path = f.path().to_str().unwrap().to_string();
        let err = parse(["zapshift", "simulate", "--config", &path]).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn config_text_errors() {
        assert!(parse_config_text("channels 100").is_err());
        assert!(parse_config_text("a=1\na=2").is_err());
        assert_eq!(parse_config_text("\n# only\n").unwrap(), vec![]);
    }

    #[test]
    fn help_lists_every_flag_with_default() {
        let help = Cli::command().render_long_help().to_string();
        for (flag, default) in [
            ("--channels", "100"),
            ("--shape", "1"),
            ("--gop-ms", "1000"),
            ("--sep", "4"),
            ("--wait", "4"),
            ("--ordering", "one-step"),
            ("--client-ordering", "same"),
            ("--shifts", "laddered"),
            ("--dwell", "uniform-gop"),
            ("--events", "1000000"),
            ("--seed", "1"),
            ("--bins-ms", "10"),
            ("--threads", "0"),
        ] {
            assert!(help.contains(flag), "missing {flag}");
            assert!(help.contains(&format!("[default: {default}]")), "missing default for {flag}");
        }
        assert!(help.contains("--out") && help.contains("--config"));
    }
}
