use std::ffi::OsString;
use std::io::Write;
use std::str::FromStr;

use clap::error::ErrorKind;
use clap::Parser;
use num_bigint::BigUint;
use perron_core::rational::{serde_digits, serde_ratio, serde_ratio_opt};
use perron_core::*;
use serde::Serialize;
use thiserror::Error;

use crate::args::{Cli, Command, Format, OutputArgs, ProgramArgs, SamplingArgs, StatsCommand};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;
pub const EXIT_PRECISION: i32 = 4;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_IO: i32 = 74;

pub const MAX_DEPTH_VAR: &str = "PERRON_MAX_DEPTH";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] perron_core::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(_) => EXIT_IO,
            CliError::Core(e) => match e.class() {
                ErrorClass::Validation => EXIT_VALIDATION,
                ErrorClass::Domain => EXIT_DOMAIN,
                ErrorClass::Precision => EXIT_PRECISION,
            },
        }
    }

    fn label(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Io(_) => "io",
            CliError::Core(e) => match e.class() {
                ErrorClass::Validation => "validation",
                ErrorClass::Domain => "domain",
                ErrorClass::Precision => "precision",
            },
        }
    }
}

type Outcome = Result<String, CliError>;

/// Parses `argv`, runs the command and writes its output. Returns the exit
/// code.
pub fn run(argv: Vec<OsString>, max_depth: Option<&str>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    match try_run(argv, max_depth, stdout) {
        Ok(()) => EXIT_OK,
        Err(Failure::Clap(e)) => {
            let shown = e.render().to_string();
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{shown}");
                EXIT_OK
            } else {
                let _ = write!(stderr, "{shown}");
                EXIT_USAGE
            }
        }
        Err(Failure::Cli(e)) => {
            let _ = writeln!(stderr, "error[{}]: {e}", e.label());
            e.exit_code()
        }
    }
}

enum Failure {
    Clap(clap::Error),
    Cli(CliError),
}

impl From<CliError> for Failure {
    fn from(e: CliError) -> Self {
        Failure::Cli(e)
    }
}

fn try_run(argv: Vec<OsString>, max_depth: Option<&str>, stdout: &mut dyn Write) -> Result<(), Failure> {
    let argv = crate::config::expand_config(argv)?;
    let cli = Cli::try_parse_from(argv).map_err(Failure::Clap)?;
    let cap = match max_depth {
        None => None,
        Some(v) => Some(
            v.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Usage(format!("{MAX_DEPTH_VAR} must be a non-negative integer, got {v:?}")))?,
        ),
    };
    let ctx = Ctx { cap };
    let (text, output) = ctx.dispatch(cli.command)?;
    match &output.out {
        Some(path) => std::fs::write(path, text).map_err(CliError::Io)?,
        None => stdout.write_all(text.as_bytes()).map_err(CliError::Io)?,
    }
    Ok(())
}

struct Ctx {
    cap: Option<usize>,
}

fn json<T: Serialize>(value: &T) -> Outcome {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    Ok(text)
}

fn no_csv(command: &str, output: &OutputArgs) -> Result<(), CliError> {
    if output.format == Format::Csv {
        Err(CliError::Usage(format!("--format csv is not available for {command}")))
    } else {
        Ok(())
    }
}

fn program(args: &ProgramArgs) -> Result<PhiProgram, CliError> {
    match (&args.family, &args.phi) {
        (Some(name), None) => {
            if args.phi0.is_some() {
                return Err(CliError::Usage("--phi0 only applies to --phi".into()));
            }
            Ok(builtin_family(name).map_err(perron_core::Error::from)?)
        }
        (None, Some(text)) => {
            let phi0 = parse_uint(args.phi0.as_deref().unwrap_or("1"), "--phi0")?;
            Ok(parse_phi_spec(text, phi0).map_err(perron_core::Error::from)?)
        }
        _ => Err(CliError::Usage("give exactly one of --family or --phi".into())),
    }
}

fn parse_uint(text: &str, what: &str) -> Result<BigUint, CliError> {
    BigUint::from_str(text.trim())
        .map_err(|_| perron_core::Error::InvalidParameter(format!("{what}: {text:?} is not a non-negative integer")).into())
}

fn parse_digits(text: &str, what: &str) -> Result<Vec<BigUint>, CliError> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',').map(|d| parse_uint(d, what)).collect()
}

fn parse_positions(text: &str) -> Result<Vec<usize>, CliError> {
    let bad = || CliError::from(perron_core::Error::InvalidParameter(format!("--positions: cannot read {text:?}")));
    let mut out = Vec::new();
    for part in text.split(',') {
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b): (usize, usize) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
                if a > b {
                    return Err(bad());
                }
                out.extend(a..=b);
            }
            None => out.push(part.trim().parse().map_err(|_| bad())?),
        }
    }
    Ok(out)
}

fn sample_config(args: &SamplingArgs) -> SampleConfig {
    let mut cfg = SampleConfig::new(args.samples, args.bits, args.seed);
    cfg.mode = args.mode.into();
    cfg.max_bits = args.max_bits;
    cfg.threads = args.threads;
    cfg
}

#[derive(Serialize)]
struct ExpandOut {
    program: ProgramInfo,
    side: Side,
    #[serde(with = "serde_ratio")]
    x: ExactRational,
    depth: usize,
    #[serde(with = "serde_digits")]
    digits: Vec<BigUint>,
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<BoundaryWitness>,
    #[serde(with = "serde_ratio_opt", skip_serializing_if = "Option::is_none")]
    endpoint: Option<ExactRational>,
    enclosure: Option<CylinderBox>,
}

#[derive(Serialize)]
struct ReconstructOut {
    program: ProgramInfo,
    side: Side,
    #[serde(with = "serde_digits")]
    base: Vec<BigUint>,
    #[serde(with = "serde_ratio")]
    partial_sum: ExactRational,
    enclosure: Interval,
    #[serde(with = "serde_ratio")]
    length: ExactRational,
}

#[derive(Serialize)]
struct CylinderOut {
    program: ProgramInfo,
    #[serde(flatten)]
    cylinder: CylinderBox,
}

#[derive(Serialize)]
struct CompareOut {
    program: ProgramInfo,
    side: Side,
    #[serde(with = "serde_digits")]
    a: Vec<BigUint>,
    #[serde(with = "serde_digits")]
    b: Vec<BigUint>,
    order: DigitOrder,
}

#[derive(Serialize)]
struct TransportPointOut {
    program: ProgramInfo,
    #[serde(flatten)]
    result: TransportResult,
}

#[derive(Serialize)]
struct TransportCylinderOut {
    program: ProgramInfo,
    #[serde(with = "serde_digits")]
    base: Vec<BigUint>,
    positive: CylinderBox,
    alternating: CylinderBox,
    equal_length: bool,
}

#[derive(Serialize)]
struct GrowthOut {
    program: ProgramInfo,
    side: Side,
    #[serde(with = "serde_digits")]
    digits: Vec<BigUint>,
    growth: Vec<f64>,
}

#[derive(Serialize)]
struct FamilyOut {
    #[serde(flatten)]
    info: ProgramInfo,
    /// Other built-ins with the same P.
    same_p: Vec<&'static str>,
}

#[derive(Serialize)]
struct FamiliesOut {
    families: Vec<FamilyOut>,
}

#[derive(Serialize)]
struct ParsePhiOut {
    #[serde(flatten)]
    info: ProgramInfo,
    #[serde(skip_serializing_if = "Option::is_none")]
    equivalent_family: Option<BuiltinFamily>,
    /// Value of φₙ when it does not depend on n or the digits.
    #[serde(skip_serializing_if = "Option::is_none")]
    constant: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    validation: Option<ValidationReport>,
}

impl Ctx {
    fn check_depth(&self, requested: usize) -> Result<(), CliError> {
        match self.cap {
            Some(cap) if requested > cap => Err(perron_core::Error::DepthLimit { requested, cap }.into()),
            _ => Ok(()),
        }
    }

    fn limits(&self, max_digit_bits: u64) -> Limits {
        let mut limits = Limits::default().with_digit_bits(max_digit_bits);
        if let Some(cap) = self.cap {
            limits.max_depth = cap;
        }
        limits
    }

    fn dispatch(&self, command: Command) -> Result<(String, OutputArgs), CliError> {
        Ok(match command {
            Command::Expand { program: p, side, x, depth, max_digit_bits, output } => {
                (self.expand(&program(&p)?, side.into(), &x, depth, max_digit_bits, &output)?, output)
            }
            Command::Reconstruct { program: p, side, base, output } => {
                no_csv("reconstruct", &output)?;
                let program = program(&p)?;
                let side: Side = side.into();
                let base = parse_digits(&base, "--base")?;
                self.check_depth(base.len())?;
                let partial_sum = match side {
                    Side::Positive => partial_sum_p(&program, &base)?,
                    Side::Alternating => partial_sum_pminus(&program, &base)?,
                };
                let enclosure = reconstruct_enclosure(&program, side, &base)?;
                let length = enclosure.width();
                (json(&ReconstructOut { program: program.info(), side, base, partial_sum, enclosure, length })?, output)
            }
            Command::Cylinder { program: p, side, base, output } => {
                no_csv("cylinder", &output)?;
                let program = program(&p)?;
                let base = parse_digits(&base, "--base")?;
                self.check_depth(base.len())?;
                let cylinder = cyl_bounds(&program, side.into(), &base)?;
                (json(&CylinderOut { program: program.info(), cylinder })?, output)
            }
            Command::Compare { program: p, side, a, b, output } => {
                no_csv("compare", &output)?;
                let program = std::sync::Arc::new(program(&p)?);
                let side: Side = side.into();
                let (a, b) = (parse_digits(&a, "--a")?, parse_digits(&b, "--b")?);
                self.check_depth(a.len().max(b.len()))?;
                let sa = DigitSeq::new(program.clone(), side, a.clone())?;
                let sb = DigitSeq::new(program.clone(), side, b.clone())?;
                let order = compare_digitwise(&sa, &sb)?;
                (json(&CompareOut { program: program.info(), side, a, b, order })?, output)
            }
            Command::Transport { program: p, x, depth, base, max_digit_bits, output } => {
                no_csv("transport", &output)?;
                let program = program(&p)?;
                let text = match (x, base) {
                    (Some(x), _) => {
                        let x = parse_rational(&x)?;
                        let depth = depth.expect("clap requires --depth with --x");
                        let result = transport_point_with(&program, &x, depth, &self.limits(max_digit_bits))?;
                        json(&TransportPointOut { program: program.info(), result })?
                    }
                    (None, Some(base)) => {
                        let base = parse_digits(&base, "--base")?;
                        self.check_depth(base.len())?;
                        let (positive, alternating) = transport_cylinder(&program, &base)?;
                        let equal_length = positive.length == alternating.length;
                        json(&TransportCylinderOut { program: program.info(), base, positive, alternating, equal_length })?
                    }
                    (None, None) => unreachable!("clap requires --x or --base"),
                };
                (text, output)
            }
            Command::MeasureCover { program: p, side, v, depth, output } => {
                no_csv("measure-cover", &output)?;
                let program = program(&p)?;
                self.check_depth(depth)?;
                let v = parse_digits(&v, "--v")?.into_iter().collect();
                (json(&cover_measure_restricted(&program, side.into(), &v, depth)?)?, output)
            }
            Command::DigitLaw { program: p, side, position, max_digit, sampling, output } => {
                let program = program(&p)?;
                self.check_depth(position)?;
                let cfg = DigitLawConfig { sampling: sample_config(&sampling), max_digit, ..DigitLawConfig::new(1, 64, 0) };
                let report = mc_digit_law(&program, side.into(), position, &cfg)?;
                let text = match output.format {
                    Format::Json => json(&report)?,
                    Format::Csv => report.to_csv(),
                };
                (text, output)
            }
            Command::Stats { kind } => self.stats(kind)?,
            Command::Families { output } => {
                no_csv("families", &output)?;
                let families = BuiltinFamily::ALL
                    .into_iter()
                    .map(|f| {
                        let program = PhiProgram::builtin(f);
                        let same_p = BuiltinFamily::ALL
                            .into_iter()
                            .filter(|g| *g != f && program.same_p(&PhiProgram::builtin(*g)))
                            .map(BuiltinFamily::name)
                            .collect();
                        FamilyOut { info: program.info(), same_p }
                    })
                    .collect();
                (json(&FamiliesOut { families })?, output)
            }
            Command::ParsePhi { phi, phi0, digits, output } => {
                no_csv("parse-phi", &output)?;
                let program = parse_phi_spec(&phi, parse_uint(&phi0, "--phi0")?).map_err(perron_core::Error::from)?;
                let validation = match digits {
                    Some(d) => {
                        let d = parse_digits(&d, "--digits")?;
                        self.check_depth(d.len())?;
                        Some(validate_digits(&program, &d))
                    }
                    None => None,
                };
                let out = ParsePhiOut {
                    info: program.info(),
                    equivalent_family: program.equivalent_family(),
                    constant: program.constant_rule().map(|c| c.to_string()),
                    validation,
                };
                (json(&out)?, output)
            }
        })
    }

    fn expand(
        &self,
        program: &PhiProgram,
        side: Side,
        x: &str,
        depth: usize,
        max_digit_bits: u64,
        output: &OutputArgs,
    ) -> Outcome {
        let x = parse_rational(x)?;
        let limits = self.limits(max_digit_bits);
        let (digits, witness) = match side {
            Side::Positive => (extract_p_with(&x, program, depth, &limits)?.digits().to_vec(), None),
            Side::Alternating => {
                let out = extract_pminus_with(&x, program, depth, &limits)?;
                let witness = out.boundary().cloned();
                (out.seq.digits().to_vec(), witness)
            }
        };
        if output.format == Format::Csv {
            let mut text = String::from("position,digit\n");
            for (i, d) in digits.iter().enumerate() {
                text.push_str(&format!("{},{}\n", i + 1, d));
            }
            return Ok(text);
        }
        let endpoint = witness.as_ref().map(|w| witness_endpoint(program, w)).transpose()?;
        let enclosure = if digits.is_empty() { None } else { Some(cyl_bounds(program, side, &digits)?) };
        json(&ExpandOut {
            program: program.info(),
            side,
            x,
            depth,
            digits,
            status: if witness.is_some() { "boundary" } else { "ongoing" },
            witness,
            endpoint,
            enclosure,
        })
    }

    fn stats(&self, kind: StatsCommand) -> Result<(String, OutputArgs), CliError> {
        Ok(match kind {
            StatsCommand::Renyi { program: p, side, n, sampling, output } => {
                let program = program(&p)?;
                self.check_depth(n)?;
                if n < 2 {
                    return Err(perron_core::Error::InvalidParameter("--n must be at least 2".into()).into());
                }
                let stats = digit_stats(&program, side.into(), n, &sample_config(&sampling))?;
                let text = match output.format {
                    Format::Json => json(&stats.summary())?,
                    Format::Csv => stats.to_csv(),
                };
                (text, output)
            }
            StatsCommand::Frequency { program: p, side, positions, max_digit, sampling, output } => {
                let program = program(&p)?;
                let positions = parse_positions(&positions)?;
                self.check_depth(positions.iter().copied().max().unwrap_or(0))?;
                let report = digit_frequency(&program, side.into(), &positions, max_digit, &sample_config(&sampling))?;
                let text = match output.format {
                    Format::Json => json(&report)?,
                    Format::Csv => report.to_csv(),
                };
                (text, output)
            }
            StatsCommand::Growth { program: p, side, digits, output } => {
                let program = std::sync::Arc::new(program(&p)?);
                let side: Side = side.into();
                let digits = parse_digits(&digits, "--digits")?;
                self.check_depth(digits.len())?;
                if digits.is_empty() {
                    return Err(perron_core::Error::EmptyBase.into());
                }
                let seq = DigitSeq::new(program.clone(), side, digits.clone())?;
                let growth = growth_exponent(&seq);
                let text = match output.format {
                    Format::Json => json(&GrowthOut { program: program.info(), side, digits, growth })?,
                    Format::Csv => {
                        let mut text = String::from("n,growth\n");
                        for (i, g) in growth.iter().enumerate() {
                            text.push_str(&format!("{},{}\n", i + 1, g));
                        }
                        text
                    }
                };
                (text, output)
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positions_accept_lists_and_ranges() {
        assert_eq!(parse_positions("1-3,7").unwrap(), vec![1, 2, 3, 7]);
        assert!(parse_positions("3-1").is_err());
        assert!(parse_positions("x").is_err());
    }

    #[test]
    fn digit_lists() {
        assert_eq!(parse_digits("2, 3,5", "--base").unwrap(), vec![2u32.into(), 3u32.into(), 5u32.into()]);
        assert!(parse_digits("", "--base").unwrap().is_empty());
        assert!(parse_digits("2,-1", "--base").is_err());
    }

    #[test]
    fn exactly_one_program_source() {
        let none = ProgramArgs { family: None, phi: None, phi0: None };
        assert!(matches!(program(&none), Err(CliError::Usage(_))));
        let both = ProgramArgs { family: Some("luroth".into()), phi: Some("1".into()), phi0: None };
        assert!(matches!(program(&both), Err(CliError::Usage(_))));
        let custom = ProgramArgs { family: None, phi: Some("x(n)".into()), phi0: Some("2".into()) };
        assert_eq!(program(&custom).unwrap().phi0(), &BigUint::from(2u32));
    }
}
