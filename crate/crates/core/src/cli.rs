//! Command-line front end.
//!
//! Exit codes: 0 ok, 1 unsatisfied, 2 invalid input, 3 not constructible,
//! 4 decentralized-constraint violation, 5 search cap exceeded.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Read, Write};
use std::ops::RangeInclusive;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::decoder::DecodeMode;
use crate::document::ScheduleDocument;
use crate::error::{HasStatus, Status};
use crate::instance::{ProblemInstance, UncodedThreshold, WindowConvention};
use crate::oracle::{brute_force_min, uncoded_min, OracleConfig};
use crate::schemes::construct;
use crate::shuffle::{efficiency_report, simulate_shuffle, ShuffleConfig};
use crate::table::render_table;

#[derive(Debug, Parser)]
#[command(
    name = "cdpic",
    version,
    about = "Build, verify and certify consecutive decentralized pliable index coding schedules"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Dimensions {
    /// Number of messages (data classes)
    #[arg(long)]
    m: usize,
    /// Number of clients; defaults to M
    #[arg(long)]
    c: Option<usize>,
    /// Side-information window size
    #[arg(long)]
    k: usize,
    /// Window layout: `after` (client i holds X_{i+1}..X_{i+K}) or
    /// `definition2` (client i holds X_i..X_{i+K-1})
    #[arg(long, default_value = "after")]
    convention: WindowConvention,
}

impl Dimensions {
    fn instance(&self, s: usize) -> Result<ProblemInstance, Failure> {
        ProblemInstance::with_convention(
            self.m,
            self.c.unwrap_or(self.m),
            self.k,
            s,
            self.convention,
        )
        .map_err(Failure::from_err)
    }
}

#[derive(Debug, Args)]
struct ShuffleFlags {
    /// Samples per data class
    #[arg(long)]
    samples: Option<u64>,
    /// Bytes per sample before compression
    #[arg(long)]
    sample_bytes: Option<u64>,
    /// Fraction of bytes kept after compression
    #[arg(long)]
    compression: Option<f64>,
    /// Link rate in bits per second
    #[arg(long)]
    rate: Option<f64>,
}

impl ShuffleFlags {
    fn any(&self) -> bool {
        self.samples.is_some()
            || self.sample_bytes.is_some()
            || self.compression.is_some()
            || self.rate.is_some()
    }

    fn config(&self) -> ShuffleConfig {
        let d = ShuffleConfig::default();
        ShuffleConfig {
            samples_per_class: self.samples.unwrap_or(d.samples_per_class),
            sample_bytes: self.sample_bytes.unwrap_or(d.sample_bytes),
            compression_ratio: self.compression.unwrap_or(d.compression_ratio),
            link_rate_bps: self.rate.unwrap_or(d.link_rate_bps),
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Construct a schedule and write it as JSON
    Construct {
        #[command(flatten)]
        dims: Dimensions,
        /// Demand: new messages per client
        #[arg(long)]
        s: usize,
        /// Write the document here instead of stdout
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Decode a schedule document at every client
    Verify {
        /// Schedule document, or `-` for stdin
        schedule: PathBuf,
        #[arg(long, default_value = "static")]
        mode: DecodeMode,
        /// Print the per-client decoding table
        #[arg(long)]
        table: bool,
    },
    /// Exhaustive search for the shortest satisfying schedule
    Oracle {
        #[command(flatten)]
        dims: Dimensions,
        #[arg(long)]
        s: usize,
        #[arg(long, default_value = "static")]
        mode: DecodeMode,
        /// Restrict the search to uncoded transmissions
        #[arg(long)]
        uncoded_only: bool,
        /// Upper bound on C * (2^K - 1) candidate transmissions
        #[arg(long, default_value_t = 100_000)]
        candidate_cap: u64,
        /// Longest schedule searched (default: the larger of S+4 and the search floor)
        #[arg(long)]
        depth_cap: Option<usize>,
    },
    /// Transmission efficiency of the coded schedule over the uncoded baseline
    Efficiency {
        #[command(flatten)]
        dims: Dimensions,
        /// Single demand value
        #[arg(long, conflicts_with = "s_range")]
        s: Option<usize>,
        /// Inclusive demand range, e.g. `1..4`
        #[arg(long, value_parser = parse_range)]
        s_range: Option<RangeInclusive<usize>>,
        #[command(flatten)]
        shuffle: ShuffleFlags,
    },
    /// Class coverage and payload accounting for one shuffle
    Shuffle {
        #[command(flatten)]
        dims: Dimensions,
        #[arg(long)]
        s: usize,
        #[arg(long, default_value = "static")]
        mode: DecodeMode,
        #[command(flatten)]
        shuffle: ShuffleFlags,
    },
}

fn parse_range(text: &str) -> Result<RangeInclusive<usize>, String> {
    let (lo, hi) = text
        .split_once("..=")
        .or_else(|| text.split_once(".."))
        .ok_or_else(|| format!("expected `lo..hi`, got `{text}`"))?;
    let lo: usize = lo
        .trim()
        .parse()
        .map_err(|e| format!("bad lower bound: {e}"))?;
    let hi: usize = hi
        .trim()
        .parse()
        .map_err(|e| format!("bad upper bound: {e}"))?;
    if lo > hi {
        return Err(format!("empty range {lo}..{hi}"));
    }
    Ok(lo..=hi)
}

/// A diagnostic and the status to exit with.
struct Failure {
    status: Status,
    message: String,
    /// Reader went away; nothing left to report.
    quiet: bool,
}

impl Failure {
    fn from_err<E: HasStatus + std::fmt::Display>(e: E) -> Self {
        Failure {
            status: e.status(),
            message: e.to_string(),
            quiet: false,
        }
    }

    fn input(message: impl Into<String>) -> Self {
        Failure {
            status: Status::InvalidInput,
            message: message.into(),
            quiet: false,
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        let mut f = Failure::input(e.to_string());
        if e.kind() == io::ErrorKind::BrokenPipe {
            f.status = Status::Ok;
            f.quiet = true;
        }
        f
    }
}

type Outcome = Result<Status, Failure>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                let _ = write!(err, "{e}");
                Status::InvalidInput.code()
            } else {
                let _ = write!(out, "{e}");
                Status::Ok.code()
            };
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Construct { dims, s, output } => cmd_construct(&dims, s, output, out),
        Command::Verify {
            schedule,
            mode,
            table,
        } => cmd_verify(&schedule, mode, table, out),
        Command::Oracle {
            dims,
            s,
            mode,
            uncoded_only,
            candidate_cap,
            depth_cap,
        } => {
            let config = OracleConfig {
                candidate_cap,
                depth_cap,
                ..OracleConfig::default()
            };
            cmd_oracle(&dims, s, mode, uncoded_only, &config, out)
        }
        Command::Efficiency {
            dims,
            s,
            s_range,
            shuffle,
        } => {
            let range = match (s, s_range) {
                (Some(s), _) => s..=s,
                (None, Some(r)) => r,
                (None, None) => 1..=1,
            };
            cmd_efficiency(&dims, range, &shuffle, out)
        }
        Command::Shuffle {
            dims,
            s,
            mode,
            shuffle,
        } => cmd_shuffle(&dims, s, mode, &shuffle, out),
    };
    match outcome {
        Ok(status) => status.code(),
        Err(failure) => {
            if !failure.quiet {
                let _ = writeln!(err, "error: {}", failure.message);
            }
            failure.status.code()
        }
    }
}

fn cmd_construct(
    dims: &Dimensions,
    s: usize,
    output: Option<PathBuf>,
    out: &mut dyn Write,
) -> Outcome {
    let instance = dims.instance(s)?;
    let schedule = construct(&instance).map_err(|e| {
        let mut f = Failure::from_err(&e);
        f.message = format!("{instance} (regime {}): {e}", instance.regime());
        f
    })?;
    let text = ScheduleDocument::from_schedule(&schedule).render();
    match output {
        Some(path) => fs::write(path, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(Status::Ok)
}

impl<E: HasStatus> HasStatus for &E {
    fn status(&self) -> Status {
        (*self).status()
    }
}

fn read_document(path: &PathBuf) -> Result<ScheduleDocument, Failure> {
    let text = if path.as_os_str() == "-" {
        let mut buf = String::new();
        io::stdin().read_to_string(&mut buf)?;
        buf
    } else {
        fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?
    };
    ScheduleDocument::parse(&text).map_err(Failure::from_err)
}

fn join<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items
        .into_iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn cmd_verify(path: &PathBuf, mode: DecodeMode, table: bool, out: &mut dyn Write) -> Outcome {
    let doc = read_document(path)?;
    let schedule = doc.to_schedule().map_err(Failure::from_err)?;
    let report = schedule.decode(mode).map_err(|e| {
        let mut f = Failure::from_err(&e);
        f.message = format!("decentralized constraint: {e}");
        f
    })?;
    let inst = &schedule.instance;

    writeln!(out, "instance: {inst}")?;
    writeln!(out, "regime: {}", schedule.regime_label())?;
    writeln!(out, "mode: {mode}")?;
    writeln!(out, "transmissions: {}", report.n_used)?;
    writeln!(
        out,
        "served per transmission: {} (sum {}, C*S {}, decode events {})",
        join(&report.served_counts),
        report.served_total(),
        inst.c() * inst.s(),
        report.decode_event_total()
    )?;
    writeln!(
        out,
        "decoded per client: {}",
        join(report.per_client_decoded.iter().map(|d| d.len()))
    )?;
    if table {
        writeln!(out)?;
        out.write_all(render_table(&schedule).as_bytes())?;
        writeln!(out)?;
    }
    if report.satisfied {
        writeln!(out, "satisfied: yes")?;
        Ok(Status::Ok)
    } else {
        let short = report.unsatisfied_clients();
        writeln!(
            out,
            "satisfied: no ({} client(s) short: {})",
            short.len(),
            join(&short)
        )?;
        Ok(Status::Unsatisfied)
    }
}

fn cmd_oracle(
    dims: &Dimensions,
    s: usize,
    mode: DecodeMode,
    uncoded_only: bool,
    config: &OracleConfig,
    out: &mut dyn Write,
) -> Outcome {
    let instance = dims.instance(s)?;
    let result = if uncoded_only {
        uncoded_min(&instance, mode, config)
    } else {
        brute_force_min(&instance, mode, config)
    }
    .map_err(Failure::from_err)?;

    writeln!(out, "instance: {instance}")?;
    writeln!(
        out,
        "search: {} ({mode} decoding)",
        if uncoded_only { "uncoded" } else { "full" }
    )?;
    writeln!(
        out,
        "candidates: {} distinct ({} raw)",
        result.search_space, result.raw_candidates
    )?;
    writeln!(out, "floor: {}", result.floor)?;
    let threshold = UncodedThreshold::of(&instance);
    if threshold.disagree() {
        writeln!(
            out,
            "note: K <= (C+2)/3 is {} but K <= floor((M+2)/3) is {}",
            threshold.by_clients, threshold.by_messages
        )?;
    }
    writeln!(out, "n_min: {}", result.n_min)?;
    match construct(&instance) {
        Ok(schedule) => {
            let verdict = if schedule.len() == result.n_min {
                "pass"
            } else {
                "fail"
            };
            writeln!(
                out,
                "constructed: {} ({}) {verdict}",
                schedule.len(),
                schedule.regime_label()
            )?;
        }
        Err(e) => writeln!(out, "constructed: none ({e})")?,
    }
    writeln!(out, "witness:")?;
    out.write_all(
        ScheduleDocument::from_schedule(&result.witness)
            .render()
            .as_bytes(),
    )?;
    Ok(Status::Ok)
}

fn cmd_efficiency(
    dims: &Dimensions,
    range: RangeInclusive<usize>,
    shuffle: &ShuffleFlags,
    out: &mut dyn Write,
) -> Outcome {
    let with_bits = shuffle.any();
    let config = shuffle.config();
    let mut rows = vec![{
        let mut h = vec!["S", "N_W", "N", "efficiency%"];
        if with_bits {
            h.extend(["bits saved/N_W", "ms saved/N_W", "bits saved", "ms saved"]);
        }
        h.into_iter().map(String::from).collect::<Vec<_>>()
    }];
    for s in range {
        let instance = dims.instance(s)?;
        let row = efficiency_report(&instance).map_err(Failure::from_err)?;
        let mut cells = vec![
            row.s.to_string(),
            row.n_baseline.to_string(),
            row.n_achieved.to_string(),
            format!("{:.2}", row.efficiency_pct),
        ];
        if with_bits {
            let schedule = construct(&instance).map_err(Failure::from_err)?;
            let report = simulate_shuffle(&schedule, &config, DecodeMode::Static)
                .map_err(Failure::from_err)?;
            cells.extend([
                format!("{:.0}", report.bits_saved_per_baseline),
                format!("{:.1}", report.time_saved_per_baseline_ms),
                format!("{:.0}", report.bits_saved_total),
                format!("{:.1}", report.time_saved_total_ms),
            ]);
        }
        rows.push(cells);
    }
    let widths: Vec<usize> = (0..rows[0].len())
        .map(|j| rows.iter().map(|r| r[j].len()).max().unwrap_or(0))
        .collect();
    for row in &rows {
        let cells: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(c, &w)| format!("{c:>w$}"))
            .collect();
        writeln!(out, "{}", cells.join("  "))?;
    }
    Ok(Status::Ok)
}

fn cmd_shuffle(
    dims: &Dimensions,
    s: usize,
    mode: DecodeMode,
    shuffle: &ShuffleFlags,
    out: &mut dyn Write,
) -> Outcome {
    let instance = dims.instance(s)?;
    let config = shuffle.config();
    let schedule = construct(&instance).map_err(Failure::from_err)?;
    let report = simulate_shuffle(&schedule, &config, mode).map_err(Failure::from_err)?;

    writeln!(out, "instance: {instance}")?;
    writeln!(out, "regime: {}", schedule.regime_label())?;
    writeln!(out, "uncoded baseline N_W: {}", report.n_baseline)?;
    writeln!(out, "coded N: {}", report.n_achieved)?;
    writeln!(out, "efficiency: {:.2}%", report.efficiency_pct)?;
    writeln!(
        out,
        "bits per transmission: {:.0}",
        report.bits_per_transmission
    )?;
    writeln!(
        out,
        "bits saved per baseline transmission: {:.0}",
        report.bits_saved_per_baseline
    )?;
    writeln!(
        out,
        "time saved per baseline transmission: {:.1} ms",
        report.time_saved_per_baseline_ms
    )?;
    writeln!(out, "bits saved in total: {:.0}", report.bits_saved_total)?;
    writeln!(
        out,
        "time saved in total: {:.1} ms",
        report.time_saved_total_ms
    )?;
    writeln!(out, "coverage before: {}", join(&report.coverage_before))?;
    writeln!(out, "coverage after: {}", join(&report.coverage_after))?;
    Ok(Status::Ok)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (u8, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("cdpic").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn range_parsing() {
        assert_eq!(parse_range("1..4").unwrap(), 1..=4);
        assert_eq!(parse_range("2..=3").unwrap(), 2..=3);
        assert!(parse_range("4..1").is_err());
        assert!(parse_range("x").is_err());
    }

    #[test]
    fn construct_exit_codes() {
        let (code, out, _) = run_args(&[
            "construct",
            "--m",
            "12",
            "--c",
            "12",
            "--k",
            "3",
            "--s",
            "3",
        ]);
        assert_eq!(code, 0);
        assert!(out.contains("\"regime\": \"A\""));

        let (code, _, err) = run_args(&[
            "construct",
            "--m",
            "12",
            "--c",
            "12",
            "--k",
            "8",
            "--s",
            "1",
        ]);
        assert_eq!(code, 3);
        assert!(err.contains("payload escape"), "{err}");

        let (code, _, _) = run_args(&[
            "construct",
            "--m",
            "12",
            "--c",
            "12",
            "--k",
            "12",
            "--s",
            "1",
        ]);
        assert_eq!(code, 2);

        let (code, out, _) = run_args(&[
            "construct",
            "--m",
            "10",
            "--c",
            "10",
            "--k",
            "6",
            "--s",
            "0",
        ]);
        assert_eq!(code, 0);
        assert!(out.contains("\"transmissions\": []"));
    }

    #[test]
    fn unknown_flags_are_invalid_input() {
        let (code, _, _) = run_args(&["construct", "--m", "12", "--bogus"]);
        assert_eq!(code, 2);
        let (code, out, _) = run_args(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("construct"));
    }

    #[test]
    fn definition2_convention_flag() {
        let (code, out, _) = run_args(&[
            "construct",
            "--m",
            "12",
            "--k",
            "3",
            "--s",
            "3",
            "--convention",
            "definition2",
        ]);
        assert_eq!(code, 0);
        assert!(out.contains("\"convention\": \"aligned\""));
    }

    #[test]
    fn efficiency_rows() {
        let (code, out, _) = run_args(&[
            "efficiency",
            "--m",
            "10",
            "--c",
            "10",
            "--k",
            "7",
            "--s-range",
            "1..3",
        ]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[3].ends_with("60.00"));
    }
}
