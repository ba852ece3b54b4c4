mod args;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use serde_json::json;

use mfxwl::manifest::{run_analysis, InputSpec, RunManifest};
use mfxwl::pipeline::{AnalysisConfig, AnalysisReport};
use mfxwl::report::{format_number, ReportOptions};
use mfxwl::signal_io::CsvOptions;
use mfxwl::synth::{bfbm, bfgn, binomial_measure, BfbmSpec, CascadeSpec};
use mfxwl::validate::{run_validation, ValidationOptions};
use mfxwl::{Error, Result};

use args::{load_config, AnalyzeArgs, Cli, Command, SynthCommand, ValidateArgs};

const EXIT_VALIDATION: u8 = 5;

fn init_threads() -> Result<()> {
    let Ok(v) = std::env::var("MFXWL_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::Config(format!("MFXWL_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))
}

fn print_summary(report: &AnalysisReport, out: &Path) {
    println!("length        {}", report.length);
    println!("fit range     {}", report.fit_range);
    println!(
        "valid cells   {} of {}",
        report.zeta.zeta.valid_count(),
        report.zeta.grid.len()
    );
    if let Some(p) = report.plane {
        println!(
            "plane fit     zeta = {:.4} p + {:.4} q + {:.4}  (r2 {:.4})",
            p.a, p.b, p.c, p.r2
        );
    }
    println!(
        "mean D        legendre {:.4}  direct {:.4}",
        report.legendre.d.mean(),
        report.direct.d.mean()
    );
    println!("output        {}", out.display());
}

fn analyze(a: &AnalyzeArgs) -> Result<()> {
    let opts = ReportOptions {
        dump_pyramids: a.dump_pyramids,
    };
    let (report, _) = if let Some(path) = &a.manifest {
        let m = RunManifest::load(path)?;
        let cfg = a.apply(m.config.clone());
        RunManifest {
            config: cfg,
            dump_pyramids: m.dump_pyramids || a.dump_pyramids,
            ..m
        }
        .rerun(&a.out)?
    } else {
        let base = match &a.config {
            Some(p) => load_config(p)?,
            None => AnalysisConfig::default(),
        };
        let cfg = a.apply(base);
        let column = a.column.clone().unwrap_or_default();
        let x = InputSpec::new(a.x.clone().expect("required"), a.x_column.clone().unwrap_or(column.clone()));
        let y = InputSpec::new(a.y.clone().expect("required"), a.y_column.clone().unwrap_or(column));
        if !a.delimiter.is_ascii() {
            return Err(Error::Config(format!("delimiter {:?} is not ASCII", a.delimiter)));
        }
        let csv = CsvOptions {
            delimiter: a.delimiter as u8,
            header: a.header,
        };
        run_analysis(&x, &y, &csv, &cfg, &a.out, opts)?
    };
    print_summary(&report, &a.out);
    Ok(())
}

fn write_columns(path: &Path, columns: &[&[f64]]) -> Result<()> {
    let io = |e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io)?;
    }
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    for i in 0..columns[0].len() {
        let row: Vec<String> = columns.iter().map(|c| format_number(c[i])).collect();
        writeln!(w, "{}", row.join(",")).map_err(io)?;
    }
    w.flush().map_err(io)
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn write_sidecar(out: &Path, value: serde_json::Value) -> Result<()> {
    let path = sidecar_path(out);
    let mut text = serde_json::to_string_pretty(&value).expect("json");
    text.push('\n');
    std::fs::write(&path, text).map_err(|e| Error::Io { path, source: e })
}

fn synth(cmd: &SynthCommand) -> Result<()> {
    match cmd {
        SynthCommand::Cascade {
            p_x,
            p_y,
            iterations,
            out,
        } => {
            let sx = CascadeSpec::new(*p_x, *iterations)?;
            let x = binomial_measure(&sx);
            let sy = p_y.map(|p| CascadeSpec::new(p, *iterations)).transpose()?;
            let y = sy.as_ref().map(binomial_measure);
            let mut cols = vec![x.values()];
            if let Some(y) = &y {
                cols.push(y.values());
            }
            write_columns(out, &cols)?;
            write_sidecar(
                out,
                json!({
                    "kind": "cascade",
                    "length": x.len(),
                    "x": sx,
                    "y": sy,
                    "columns": if y.is_some() { vec!["x", "y"] } else { vec!["x"] },
                }),
            )?;
            println!("wrote {} cells to {}", x.len(), out.display());
        }
        SynthCommand::Bfbm {
            hurst_x,
            hurst_y,
            rho,
            n,
            seed,
            increments,
            out,
        } => {
            let spec = BfbmSpec::new(*hurst_x, *hurst_y, *rho, *n, *seed)?;
            let noise = bfgn(&spec)?;
            if *increments {
                write_columns(out, &[&noise.x, &noise.y])?;
            } else {
                let pair = bfbm(&spec)?;
                write_columns(out, &[pair.x().values(), pair.y().values()])?;
            }
            write_sidecar(
                out,
                json!({
                    "kind": "bfbm",
                    "spec": spec,
                    "seed": spec.seed,
                    "coherence": spec.coherence(),
                    "method": noise.method,
                    "series": if *increments { "increments" } else { "paths" },
                    "columns": ["x", "y"],
                }),
            )?;
            println!("wrote {} samples to {}", n, out.display());
        }
    }
    Ok(())
}

fn validate(a: &ValidateArgs) -> Result<bool> {
    let opts = ValidationOptions {
        bfbm_realizations: a.realizations,
        seed: a.seed,
        normalization: a.normalization.unwrap_or_default(),
        ..Default::default()
    };
    if opts.bfbm_realizations == 0 {
        return Err(Error::Config("at least one realization is needed".into()));
    }
    let report = run_validation(&opts)?;
    println!("{report}");
    if let Some(path) = &a.json {
        let mut text = serde_json::to_string_pretty(&report).expect("json");
        text.push('\n');
        std::fs::write(path, text).map_err(|e| Error::Io {
            path: path.clone(),
            source: e,
        })?;
    }
    Ok(report.passed())
}

fn run(cli: &Cli) -> Result<ExitCode> {
    init_threads()?;
    match &cli.command {
        Command::Analyze(a) => analyze(a)?,
        Command::Synth(s) => synth(s)?,
        Command::Validate(v) => {
            if !validate(v)? {
                return Ok(ExitCode::from(EXIT_VALIDATION));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.kind());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
