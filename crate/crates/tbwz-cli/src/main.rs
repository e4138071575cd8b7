//! Command-line interface: compress, decompress, stats and bench.

use clap::{Parser, Subcommand};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;
use tbwz::pipeline::{compress_bytes, decompress_bytes, CompressOptions, StatsReport};

#[derive(Parser)]
#[command(name = "tbwz", version, about = "BWT compressor with run-block tunneling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compress a file into a container
    Compress {
        /// Disable tunneling; write the plain BWT pipeline output
        #[arg(long)]
        no_tunnel: bool,
        input: PathBuf,
        output: PathBuf,
    },
    /// Restore the original file from a container
    Decompress { input: PathBuf, output: PathBuf },
    /// Print compression statistics for a file without writing output
    Stats {
        /// Emit a CSV header and row instead of the human-readable report
        #[arg(long)]
        csv: bool,
        input: PathBuf,
    },
    /// Compress every file in a directory and report a CSV row per file
    Bench {
        dir: PathBuf,
        /// Write the CSV here instead of stdout
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

enum CliError {
    Io(String),
    Data(tbwz::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 3,
            CliError::Data(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Io(m) => write!(f, "{m}"),
            CliError::Data(e) => write!(f, "{e}"),
        }
    }
}

impl From<tbwz::Error> for CliError {
    fn from(e: tbwz::Error) -> Self {
        CliError::Data(e)
    }
}

fn read_file(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))
}

/// Write the full output only after it was produced; remove the file again
/// if the write itself fails halfway.
fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Err(e) = fs::write(path, bytes) {
        let _ = fs::remove_file(path);
        return Err(CliError::Io(format!(
            "cannot write {}: {e}",
            path.display()
        )));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders its own message; usage problems exit with 1
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tbwz: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Compress {
            no_tunnel,
            input,
            output,
        } => {
            let data = read_file(&input)?;
            let opts = CompressOptions { tunnel: !no_tunnel };
            let out = compress_bytes(&data, &opts)?;
            write_file(&output, &out.container)
        }
        Command::Decompress { input, output } => {
            let data = read_file(&input)?;
            let restored = decompress_bytes(&data)?;
            write_file(&output, &restored)
        }
        Command::Stats { csv, input } => {
            let data = read_file(&input)?;
            let out = compress_bytes(&data, &CompressOptions::default())?;
            let name = input
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_else(|| input.display().to_string());
            if csv {
                print!("{}", stats_csv(&name, &out.report));
            } else {
                print!("{}", stats_human(&name, &out.report));
            }
            Ok(())
        }
        Command::Bench { dir, csv } => {
            let table = bench_dir(&dir)?;
            match csv {
                Some(path) => write_file(&path, table.as_bytes()),
                None => {
                    print!("{table}");
                    std::io::stdout().flush().ok();
                    Ok(())
                }
            }
        }
    }
}

fn fmt_opt(v: Option<u64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn fmt_fit(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

fn or_na(s: String) -> String {
    if s.is_empty() {
        "n/a".into()
    } else {
        s
    }
}

fn stats_human(name: &str, r: &StatsReport) -> String {
    let mut s = String::new();
    use std::fmt::Write as _;
    let _ = writeln!(s, "file:                 {name}");
    let _ = writeln!(s, "text length (n~):     {}", r.orig_len);
    let _ = writeln!(s, "bwt length after:     {}", r.bwt_len);
    let _ = writeln!(s, "runs:                 {}", r.runs);
    let _ = writeln!(s, "runs with height > 1: {}", r.runs_gt1);
    let _ = writeln!(s, "width-maximal blocks: {}", r.block_count);
    let _ = writeln!(s, "tunnels chosen:       {}", r.t_best);
    let _ = writeln!(s, "rle length:           {}", r.estimator.n_rle);
    let _ = writeln!(s, "rle digit symbols:    {}", r.estimator.rc);
    let _ = writeln!(s, "digits removed (tc):  {:.3}", r.estimator.tc);
    let _ = writeln!(s, "predicted gross:      {:.3} bits", r.gross_pred_bits);
    let _ = writeln!(s, "predicted tax:        {:.3} bits", r.tax_pred_bits);
    let _ = writeln!(s, "plain container:      {} bytes", r.plain_bytes);
    let _ = writeln!(s, "tunneled container:   {}", or_na(fmt_opt(r.tunneled_bytes)));
    let _ = writeln!(
        s,
        "enc(L) plain/tunn.:   {} / {}",
        r.enc_l_plain_bytes,
        or_na(fmt_opt(r.enc_l_tunneled_bytes))
    );
    let _ = writeln!(s, "aux payload:          {}", or_na(fmt_opt(r.enc_aux_bytes)));
    let _ = writeln!(s, "model fit:            {}", or_na(fmt_fit(r.fit)));
    let _ = writeln!(
        s,
        "wrote:                {}",
        if r.wrote_tunneled { "tunneled" } else { "plain" }
    );
    s
}

const STATS_CSV_HEADER: &str = "file,orig_len,bwt_len,r,r_gt1,blocks,t_best,n_rle,rc,tc,\
gross_pred_bits,tax_pred_bits,plain_bytes,tunneled_bytes,enc_l_plain,enc_l_tunneled,aux_bytes,\
fit,wrote_tunneled\n";

fn stats_csv(name: &str, r: &StatsReport) -> String {
    let mut s = String::from(STATS_CSV_HEADER);
    use std::fmt::Write as _;
    let _ = writeln!(
        s,
        "{name},{},{},{},{},{},{},{},{},{:.3},{:.6},{:.6},{},{},{},{},{},{},{}",
        r.orig_len,
        r.bwt_len,
        r.runs,
        r.runs_gt1,
        r.block_count,
        r.t_best,
        r.estimator.n_rle,
        r.estimator.rc,
        r.estimator.tc,
        r.gross_pred_bits,
        r.tax_pred_bits,
        r.plain_bytes,
        fmt_opt(r.tunneled_bytes),
        r.enc_l_plain_bytes,
        fmt_opt(r.enc_l_tunneled_bytes),
        fmt_opt(r.enc_aux_bytes),
        fmt_fit(r.fit),
        r.wrote_tunneled,
    );
    s
}

const BENCH_CSV_HEADER: &str = "file,orig_bytes,plain_bytes,tunneled_bytes,bps_plain,\
bps_tunneled,r,r_gt1,blocks,t_best,gross_pred_bits,tax_pred_bits,aux_bytes,fit,t_block_ms,\
t_choice_ms,t_tunnel_ms,t_encode_ms,t_decode_ms\n";

fn bench_dir(dir: &Path) -> Result<String, CliError> {
    let mut names: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", dir.display())))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    names.sort();

    let mut table = String::from(BENCH_CSV_HEADER);
    for path in names {
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        match bench_file(&path) {
            Ok(row) => table.push_str(&format!("{name},{row}\n")),
            Err(e) => {
                eprintln!("tbwz: {name}: {e}");
                table.push_str(&format!("{name},{}\n", ",".repeat(17)));
            }
        }
    }
    Ok(table)
}

fn bench_file(path: &Path) -> Result<String, CliError> {
    let data = read_file(path)?;
    let tunneled = compress_bytes(&data, &CompressOptions::default())?;
    let plain = compress_bytes(&data, &CompressOptions { tunnel: false })?;

    let decode_started = Instant::now();
    let restored = decompress_bytes(&tunneled.container)?;
    let t_decode_ms = decode_started.elapsed().as_secs_f64() * 1e3;
    if restored != data {
        return Err(CliError::Data(tbwz::Error::Corrupt {
            offset: None,
            reason: "roundtrip mismatch".into(),
        }));
    }

    let r = &tunneled.report;
    let n = r.orig_len as f64;
    let bps = |bytes: usize| bytes as f64 * 8.0 / n;
    Ok(format!(
        "{},{},{},{:.4},{:.4},{},{},{},{},{:.6},{:.6},{},{},{:.3},{:.3},{:.3},{:.3},{:.3}",
        data.len(),
        plain.container.len(),
        tunneled.container.len(),
        bps(plain.container.len()),
        bps(tunneled.container.len()),
        r.runs,
        r.runs_gt1,
        r.block_count,
        r.t_best,
        r.gross_pred_bits,
        r.tax_pred_bits,
        r.enc_aux_bytes.unwrap_or(0),
        fmt_fit(r.fit),
        r.timings.block_ms,
        r.timings.choice_ms,
        r.timings.tunnel_ms,
        r.timings.encode_ms,
        t_decode_ms,
    ))
}
