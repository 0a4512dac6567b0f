use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use loewner_range::{regime_threshold, Horizon};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Svg,
    Both,
}

impl OutputFormat {
    pub fn csv(self) -> bool {
        matches!(self, OutputFormat::Csv | OutputFormat::Both)
    }

    pub fn svg(self) -> bool {
        matches!(self, OutputFormat::Svg | OutputFormat::Both)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum Preset {
    Fig1a,
    Fig1bReject,
    Fig2a,
    Fig2b,
    Fig3,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig1a => "fig1a",
            Preset::Fig1bReject => "fig1b_reject",
            Preset::Fig2a => "fig2a",
            Preset::Fig2b => "fig2b",
            Preset::Fig3 => "fig3",
        }
    }

    /// `(T, c)`; `c` is absent for the unrestricted range.
    pub fn parameters(self) -> (f64, Option<f64>) {
        match self {
            Preset::Fig1a => (0.245, None),
            Preset::Fig1bReject => (0.3, None),
            Preset::Fig2a => (0.245, Some(1.0)),
            Preset::Fig2b => (0.245, Some(0.1)),
            Preset::Fig3 => (0.247, Some(0.05)),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "loewner",
    version,
    about = "Value ranges of the chordal Loewner equation with a bounded driver"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Boundary of the value range under |λ| <= c.
    Boundary(RunArgs),
    /// Boundary of the unrestricted value range.
    Unrestricted {
        #[command(flatten)]
        run: RunArgs,
        /// Also report the largest implicit-equation residual of the
        /// parametric description.
        #[arg(long = "thm1-check")]
        parametric_check: bool,
    },
    /// Sampling audit, extremal round trip and maximum-principle check.
    Verify(RunArgs),
    /// Reproduce a named figure scenario.
    Figure {
        preset: Preset,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Parameter samples per curve before refinement.
    #[arg(long, default_value_t = 256)]
    pub points: usize,
    /// Output directory.
    #[arg(long, env = "LOEWNER_OUT_DIR", default_value = ".")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = OutputFormat::Both)]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Args)]
#[command(allow_negative_numbers = true)]
pub struct RunArgs {
    /// Loewner time horizon, 0 < T < 1/4.
    #[arg(long = "T")]
    pub t: f64,
    /// Bound on the driving function.
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Integrator tolerance.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Half-width of the on-boundary band.
    #[arg(long, default_value_t = 1e-3)]
    pub band: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Validated settings shared by all commands.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub t: f64,
    pub c: Option<f64>,
    pub n_points: usize,
    pub n_samples: usize,
    pub seed: u64,
    pub tol: f64,
    pub band: f64,
    pub output_format: OutputFormat,
    pub output_path: PathBuf,
}

impl RunConfig {
    pub fn new(t: f64, c: Option<f64>, output: &OutputArgs) -> Self {
        Self {
            t,
            c,
            n_points: output.points,
            n_samples: 10_000,
            seed: 42,
            tol: 1e-10,
            band: 1e-3,
            output_format: output.format,
            output_path: output.out.clone(),
        }
    }

    pub fn from_args(args: &RunArgs) -> Self {
        Self {
            n_samples: args.samples,
            seed: args.seed,
            tol: args.tol,
            band: args.band,
            ..Self::new(args.t, args.c, &args.output)
        }
    }

    /// Checks everything except the presence of `c`.
    pub fn validate(&self) -> Result<(), CliError> {
        Horizon::new(self.t)
            .map_err(|_| CliError::Config(format!("T = {} must satisfy 0 < T < 1/4", self.t)))?;
        if let Some(c) = self.c {
            if !(c > 0.0) || !c.is_finite() {
                return Err(CliError::Config(format!(
                    "c = {c} must be positive and finite"
                )));
            }
        }
        if self.n_points < 2 {
            return Err(CliError::Config(format!(
                "--points {} must be at least 2",
                self.n_points
            )));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(CliError::Config(format!(
                "--tol {} must lie in (0, 1)",
                self.tol
            )));
        }
        if !(self.band >= 0.0) || !self.band.is_finite() {
            return Err(CliError::Config(format!(
                "--band {} must be finite and non-negative",
                self.band
            )));
        }
        Ok(())
    }

    /// Validates and returns `c`, which must be present and meet the
    /// main-regime condition `c² >= T - (1 - e⁻⁴)/4`.
    pub fn bounded(&self) -> Result<f64, CliError> {
        self.validate()?;
        let c = self
            .c
            .ok_or_else(|| CliError::Config("--c is required for this command".into()))?;
        let threshold = regime_threshold(self.t);
        if c * c < threshold {
            return Err(CliError::Config(format!(
                "c^2 = {} is below T - (1 - e^-4)/4 = {threshold}; boundary is only available above this threshold",
                c * c
            )));
        }
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(t: f64, c: Option<f64>) -> RunConfig {
        RunConfig::new(
            t,
            c,
            &OutputArgs {
                points: 256,
                out: ".".into(),
                format: OutputFormat::Both,
            },
        )
    }

    #[test]
    fn horizon_limits() {
        assert!(cfg(0.245, None).validate().is_ok());
        assert!(cfg(0.25, None).validate().is_err());
        assert!(cfg(0.3, Some(1.0)).validate().is_err());
        assert!(cfg(0.0, None).validate().is_err());
    }

    #[test]
    fn bound_checks() {
        assert!(cfg(0.245, None).bounded().is_err());
        assert!(cfg(0.245, Some(-1.0)).bounded().is_err());
        assert_eq!(cfg(0.245, Some(1.0)).bounded().unwrap(), 1.0);
        // threshold at T = 0.249 is about 3.58e-3
        assert!(cfg(0.249, Some(0.03)).bounded().is_err());
        assert!(cfg(0.249, Some(0.06)).bounded().is_ok());
    }

    #[test]
    fn format_flags() {
        assert!(OutputFormat::Both.csv() && OutputFormat::Both.svg());
        assert!(!OutputFormat::Csv.svg() && !OutputFormat::Svg.csv());
    }

    #[test]
    fn cli_parses_uppercase_horizon() {
        let cli = Cli::try_parse_from(["loewner", "boundary", "--T", "0.245", "--c", "1"]).unwrap();
        let Command::Boundary(args) = cli.command else {
            panic!()
        };
        assert_eq!(args.t, 0.245);
        assert_eq!(args.c, Some(1.0));
        assert_eq!(args.seed, 42);
        let cli = Cli::try_parse_from(["loewner", "figure", "fig1b_reject"]).unwrap();
        assert!(matches!(
            cli.command,
            Command::Figure {
                preset: Preset::Fig1bReject,
                ..
            }
        ));
        assert!(Cli::try_parse_from(["loewner", "figure", "fig9"]).is_err());
    }
}
