use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::process::ExitCode;

use anyhow::{Context, Result};
use subpack_core::gf2::{verify_schedule, verify_sweep, Knowledge};
use subpack_core::instance::{validate, InstanceFile, Violation};
use subpack_core::rates::{self, Condition};
use subpack_core::sim::{render_decode_table, run_padded};
use subpack_core::worked::example;
use subpack_core::{
    codec::encode_symbolic, run, Error, MessageStore, ProblemInstance, Rational,
    TransmissionSchedule,
};

use crate::args::{Cli, Command, DemoArgs, Format, InstanceArgs, RatesArgs, RunArgs, VerifyArgs};
use crate::{EXIT_DECODE, EXIT_IO, EXIT_ORACLE, EXIT_VALIDATION};

/// An error that carries its own exit code.
#[derive(Debug)]
struct Coded(u8, String);

impl fmt::Display for Coded {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.1)
    }
}

impl std::error::Error for Coded {}

fn invalid(msg: impl Into<String>) -> anyhow::Error {
    Coded(EXIT_VALIDATION, msg.into()).into()
}

pub fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(Coded(code, _)) = cause.downcast_ref() {
            return *code;
        }
        if cause.downcast_ref::<io::Error>().is_some() {
            return EXIT_IO;
        }
        if let Some(e) = cause.downcast_ref::<serde_json::Error>() {
            return if e.is_io() { EXIT_IO } else { EXIT_VALIDATION };
        }
        if let Some(e) = cause.downcast_ref::<Error>() {
            return match e {
                Error::DecodeFailure { .. }
                | Error::SideInfoGap { .. }
                | Error::MissingSymbol { .. } => EXIT_DECODE,
                _ => EXIT_VALIDATION,
            };
        }
    }
    EXIT_VALIDATION
}

pub fn dispatch(cli: &Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Instance(a) => instance(cli, a),
        Command::Run(a) => run_cmd(cli, a),
        Command::Verify(a) => verify(cli, a),
        Command::Rates(a) => rates_cmd(cli, a),
        Command::Demo(a) => demo(cli, a),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn violations_error(violations: &[Violation]) -> anyhow::Error {
    let lines: Vec<String> = violations.iter().map(|v| format!("  {v}")).collect();
    invalid(format!("invalid instance:\n{}", lines.join("\n")))
}

fn load_instance(path: &Path) -> Result<ProblemInstance> {
    let file: InstanceFile = read_json(path)?;
    let violations = validate(&file);
    if !violations.is_empty() {
        return Err(violations_error(&violations));
    }
    Ok(file.try_into()?)
}

fn instance(cli: &Cli, args: &InstanceArgs) -> Result<ExitCode> {
    let demands: Option<BTreeMap<usize, Vec<usize>>> = match args.demands.as_deref() {
        None => None,
        Some(spec) => {
            let text = match spec.strip_prefix('@') {
                Some(path) => {
                    fs::read_to_string(path).with_context(|| format!("reading {path}"))?
                }
                None => spec.to_string(),
            };
            Some(serde_json::from_str(&text).context("parsing demands")?)
        }
    };
    let mut d_bits = args.d_bits;
    if args.align && (2..args.n).contains(&args.s) {
        d_bits = ProblemInstance::aligned_d_bits(args.n, args.s, d_bits)?;
    }
    let file = InstanceFile {
        n: args.n,
        s: args.s,
        a: args.a,
        d_bits,
        demands,
    };
    let violations = validate(&file);
    if !violations.is_empty() {
        if cli.format == Some(Format::Json) {
            print!("{}", to_json(&violations)?);
        }
        return Err(violations_error(&violations));
    }
    let inst = ProblemInstance::try_from(file)?;
    emit(cli.output.as_deref(), &to_json(&inst)?)?;
    Ok(ExitCode::SUCCESS)
}

fn run_cmd(cli: &Cli, args: &RunArgs) -> Result<ExitCode> {
    let mut file: InstanceFile = read_json(&args.instance)?;
    let mut violations = validate(&file);
    let original_d = file.d_bits;
    if args.pad {
        violations.retain(|v| !matches!(v, Violation::BlockAlignment { .. }));
    }
    if !violations.is_empty() {
        return Err(violations_error(&violations));
    }
    if !original_d.is_multiple_of(8) {
        return Err(invalid(format!(
            "d_bits={original_d} is not a whole number of bytes"
        )));
    }
    file.d_bits = ProblemInstance::aligned_d_bits(file.n, file.s, original_d)?;
    let padding = file.d_bits - original_d;
    let inst = ProblemInstance::try_from(file)?;

    let record = original_d / 8;
    let store = match &args.messages {
        Some(path) => {
            let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
            let expected = inst.n() * record;
            if bytes.len() != expected {
                return Err(io::Error::new(
                    io::ErrorKind::InvalidData,
                    format!(
                        "{}: expected {expected} bytes, found {}",
                        path.display(),
                        bytes.len()
                    ),
                )
                .into());
            }
            MessageStore::from_bytes(inst.n(), record, &bytes)?
        }
        None => MessageStore::random_with_len(inst.n(), record, cli.seed),
    };
    let store = store.padded(inst.d_bits() / 8);

    let transcript = match run_padded(&inst, &store, padding) {
        Ok(t) => t,
        Err(e) => {
            println!("recovery: FAIL");
            return Err(e.into());
        }
    };
    let json = to_json(&transcript)?;
    if let Some(path) = &cli.output {
        emit(Some(path), &json)?;
    } else if cli.format == Some(Format::Json) {
        print!("{json}");
        return Ok(ExitCode::SUCCESS);
    }

    let info = &transcript.instance;
    let mut out = format!(
        "N={} s={} a={} case {} z={} d={} bits\n",
        info.n, info.s, info.a, info.case, info.z, info.d_bits
    );
    if padding > 0 {
        writeln!(out, "padding: {padding} bits per message")?;
    }
    writeln!(out, "symbols: {}", transcript.events.len())?;
    writeln!(out, "total bits: {}", transcript.totals_bits)?;
    writeln!(out, "rate: {}", transcript.measured_rate)?;
    writeln!(
        out,
        "recovery: {}",
        if transcript.recovered { "PASS" } else { "FAIL" }
    )?;
    print!("{out}");
    Ok(ExitCode::SUCCESS)
}

fn verify(cli: &Cli, args: &VerifyArgs) -> Result<ExitCode> {
    if args.all {
        return verify_all(cli, args);
    }
    let path = args
        .instance
        .as_deref()
        .expect("clap enforces instance or --all");
    let inst = load_instance(path)?;
    let schedule: TransmissionSchedule = match &args.schedule {
        Some(p) => read_json(p)?,
        None => encode_symbolic(&inst),
    };
    if let Some(path) = &args.emit_schedule {
        emit(Some(path), &to_json(&schedule)?)?;
    }
    let mode = if args.strict {
        Knowledge::Strict
    } else {
        Knowledge::IncludeOwn
    };
    let report = verify_schedule(&inst, &schedule, mode)?;

    let text = if cli.format == Some(Format::Json) {
        to_json(&report)?
    } else {
        let mut out = format!(
            "N={} s={} a={}: {} (rank {} of {}, {} undecodable blocks)\n",
            inst.n(),
            inst.s(),
            inst.a(),
            if report.pass { "PASS" } else { "FAIL" },
            report.matrix_rank,
            report.dimension,
            report.failures.len()
        );
        for f in &report.failures {
            writeln!(
                out,
                "  S_{} cannot recover x_{}^{}",
                f.user, f.message, f.block
            )?;
        }
        out
    };
    emit(cli.output.as_deref(), &text)?;
    Ok(if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_ORACLE)
    })
}

fn verify_all(cli: &Cli, args: &VerifyArgs) -> Result<ExitCode> {
    let n_max = args.n_max.expect("clap enforces --N-max");
    if args.n_min < 3 || args.n_min > n_max {
        return Err(invalid(format!(
            "bad range: N-min={} N-max={n_max}",
            args.n_min
        )));
    }
    let entries = verify_sweep(args.n_min, n_max);
    let ok = |e: &subpack_core::gf2::SweepEntry| if args.strict { e.strict_pass } else { e.pass };
    let text = match cli.format.unwrap_or(Format::Table) {
        Format::Json => to_json(&entries)?,
        Format::Csv => {
            let mut out = String::from("N,s,a,pass,strict_pass,failures\n");
            for e in &entries {
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    e.n, e.s, e.a, e.pass, e.strict_pass, e.failures
                )?;
            }
            out
        }
        Format::Table => {
            let mut out = format!(
                "{:>4} {:>4} {:>4} {:>6} {:>8}\n",
                "N", "s", "a", "pass", "failures"
            );
            for e in &entries {
                writeln!(
                    out,
                    "{:>4} {:>4} {:>4} {:>6} {:>8}",
                    e.n,
                    e.s,
                    e.a,
                    ok(e),
                    e.failures
                )?;
            }
            out
        }
    };
    emit(cli.output.as_deref(), &text)?;
    let failed = entries.iter().filter(|e| !ok(e)).count();
    eprintln!("verified {} instances, {failed} failed", entries.len());
    Ok(if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_ORACLE)
    })
}

fn rates_cmd(cli: &Cli, args: &RatesArgs) -> Result<ExitCode> {
    if args.n_min < 3 || args.n_min > args.n_max {
        return Err(invalid(format!(
            "bad range: N-min={} N-max={}",
            args.n_min, args.n_max
        )));
    }
    let rows = rates::sweep(args.n_min, args.n_max)?;
    let mut buf = Vec::new();
    match cli.format.unwrap_or(Format::Csv) {
        Format::Csv => rates::write_csv(&rows, &mut buf)?,
        Format::Table => rates::write_table(&rows, &mut buf)?,
        Format::Json => buf = to_json(&rows)?.into_bytes(),
    }
    emit(cli.output.as_deref(), &String::from_utf8(buf)?)?;

    if args.check {
        let covered: Vec<_> = rows
            .iter()
            .filter(|r| r.condition != Condition::None)
            .collect();
        let bad: Vec<_> = covered.iter().filter(|r| !r.strictly_better).collect();
        eprintln!(
            "check: {} covered pairs, {} not strictly better",
            covered.len(),
            bad.len()
        );
        for r in &bad {
            eprintln!("  N={} s={}: {} vs {}", r.n, r.s, r.ours, r.baseline);
        }
        if !bad.is_empty() {
            return Ok(ExitCode::from(EXIT_ORACLE));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn demo(cli: &Cli, args: &DemoArgs) -> Result<ExitCode> {
    let inst = example(args.example).map_err(|_| {
        invalid(format!(
            "unknown example {}; expected 1, 2, or 3",
            args.example
        ))
    })?;
    let store = MessageStore::random(&inst, cli.seed);
    let transcript = run(&inst, &store)?;
    if let Some(path) = &args.transcript {
        emit(Some(path), &to_json(&transcript)?)?;
    }
    let table = render_decode_table(&transcript);
    let text = if cli.format == Some(Format::Json) {
        to_json(&table)?
    } else {
        let d = inst.d_bits() as u64;
        let mut out = format!(
            "Example {}: N={}, s={}, d={d} bits, case {}, z={}\n",
            args.example,
            inst.n(),
            inst.s(),
            transcript.instance.case,
            transcript.instance.z
        );
        if transcript.instance.case == subpack_core::Case::B {
            out.push_str("Y_i^k: iteration i, chain position k; canonical ids in brackets\n");
        }
        out.push('\n');
        write!(out, "{table}")?;
        let total = Rational::new(transcript.totals_bits, d);
        let multiple = match *total.denom() {
            1 => format!("{}d", total.numer()),
            den => format!("{}d/{den}", total.numer()),
        };
        writeln!(
            out,
            "\ntotal: {} bits = {multiple}, rate {}",
            transcript.totals_bits, transcript.measured_rate
        )?;
        out
    };
    emit(cli.output.as_deref(), &text)?;
    Ok(ExitCode::SUCCESS)
}
