use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use lextent::constructor::{poset_for_target, ConstructError, ConstructOptions};
use lextent::count::{
    count_extensions, count_extensions_auto, count_extensions_bruteforce, count_extensions_width2, CountError,
};
use lextent::euclid::{
    best_quotient_sum, euclidean_sequence, growth_report, quotient_histogram, quotient_sequence, standard_cutoffs,
    tail_report, totient, EuclidError,
};
use lextent::family::{build_family_poset, stern_brocot_entry, tree_ext, verify_family_layer, DyadicPath};
use lextent::spectrum::{
    cached_spectrum, smallest_missing, top_interval_count, SpectrumError, SpectrumOptions, DEFAULT_MAX_N,
};
use lextent::suite::full_suite;
use lextent::Poset;

#[derive(Parser, Debug)]
#[command(
    name = "lextent",
    version,
    about = "Exact linear-extension counts, width-2 families and small spectra"
)]
struct Cli {
    /// Worker threads for parallel sections.
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    workers: Option<u16>,
    #[command(subcommand)]
    command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Engine {
    /// General engine, falling back to the width-2 engine for large width-2 posets.
    Auto,
    /// Order-ideal dynamic programming.
    General,
    /// Two-chain grid recursion; fails on width above 2.
    Width2,
    /// Permutation enumeration, at most 10 elements.
    Brute,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Suite {
    Paper,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Count linear extensions of a poset file.
    Count {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        engine: Engine,
    },
    /// Inspect one family poset, or verify every path through a stage.
    Family {
        /// Bits after "0.", e.g. 011.
        #[arg(long, conflicts_with = "verify_depth", required_unless_present = "verify_depth")]
        path: Option<DyadicPath>,
        #[arg(long)]
        verify_depth: Option<usize>,
        /// Write the poset of --path here.
        #[arg(long, requires = "path")]
        out: Option<PathBuf>,
    },
    /// Euclidean quotient statistics.
    ///
    /// Growth report CSV columns: n, d (minimizing, smallest on ties),
    /// s_min, phi, normalizer = (n/phi) ln n ln ln n, ratio = s_min /
    /// normalizer, running_max_ratio, s_over_log_n.
    ///
    /// Tail report CSV columns: n, m, tail = sum over k >= m of r(n, k),
    /// ratio = tail m / (n ln n).
    Euclid {
        #[arg(long)]
        n: Option<u64>,
        #[arg(long, requires = "max_n")]
        report_theorem12: bool,
        #[arg(long)]
        max_n: Option<u64>,
        #[arg(long, requires = "n")]
        report_lemma51: bool,
        /// Tail cutoffs; defaults to 1, 10, 100 and floor((ln n)^2).
        #[arg(long = "M", value_delimiter = ',')]
        cutoffs: Vec<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a verified poset with a given number of linear extensions.
    Construct {
        #[arg(long)]
        target: u64,
        #[arg(long)]
        exact_size: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exhaustive spectrum LE(n).
    Spectrum {
        #[arg(long)]
        n: usize,
        #[arg(long, env = "LEXTENT_CACHE_DIR")]
        cache_dir: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
        /// Permit n = 8 (about 2.8 million posets, minutes of work).
        #[arg(long)]
        allow_large: bool,
        /// Restrict to width at most 2.
        #[arg(long)]
        width2: bool,
    },
    /// Run the combined check suite and print a pass/fail table.
    Verify {
        #[arg(long, value_enum, default_value = "paper")]
        suite: Suite,
        #[arg(long, default_value_t = 6)]
        max_n: usize,
        #[arg(long, env = "LEXTENT_CACHE_DIR")]
        cache_dir: Option<PathBuf>,
    },
}

#[derive(Debug)]
enum Failure {
    /// Standard output was closed by the reader.
    Closed,
    Usage(String),
    TooLarge(String),
    Infeasible(String),
    Verification(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Closed => 0,
            Failure::Usage(_) => 1,
            Failure::TooLarge(_) => 2,
            Failure::Infeasible(_) => 3,
            Failure::Verification(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Closed => "output closed",
            Failure::Usage(m) | Failure::TooLarge(m) | Failure::Infeasible(m) | Failure::Verification(m) => m,
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        match e.kind() {
            io::ErrorKind::BrokenPipe => Failure::Closed,
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<CountError> for Failure {
    fn from(e: CountError) -> Self {
        match e {
            CountError::TooLarge(_) => Failure::TooLarge(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<SpectrumError> for Failure {
    fn from(e: SpectrumError) -> Self {
        match e {
            SpectrumError::TooLarge { .. } => Failure::TooLarge(e.to_string()),
            SpectrumError::Count(c) => c.into(),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<EuclidError> for Failure {
    fn from(e: EuclidError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<ConstructError> for Failure {
    fn from(e: ConstructError) -> Self {
        match e {
            ConstructError::Infeasible { .. } => Failure::Infeasible(e.to_string()),
            ConstructError::Verification { .. } | ConstructError::InternalSearchFailure { .. } => {
                Failure::Verification(e.to_string())
            }
            _ => Failure::Usage(e.to_string()),
        }
    }
}

fn io(path: &std::path::Path, e: io::Error) -> Failure {
    Failure::Usage(format!("{}: {e}", path.display()))
}

fn write_or_print(w: &mut dyn Write, out: Option<&PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| io(path, e)),
        None => {
            write!(w, "{text}")?;
            Ok(())
        }
    }
}

fn count(w: &mut dyn Write, file: &PathBuf, engine: Engine) -> Result<(), Failure> {
    let text = fs::read_to_string(file).map_err(|e| io(file, e))?;
    let p = Poset::parse_text(&text).map_err(|e| Failure::Usage(format!("{}: {e}", file.display())))?;
    let value = match engine {
        Engine::Auto => count_extensions_auto(&p)?,
        Engine::General => count_extensions(&p)?,
        Engine::Brute => count_extensions_bruteforce(&p)?,
        Engine::Width2 => {
            let cover = p.chain_cover();
            let empty = Vec::new();
            match cover.as_slice() {
                [] => count_extensions_width2(&p, (&empty, &empty))?,
                [a] => count_extensions_width2(&p, (a, &empty))?,
                [a, b] => count_extensions_width2(&p, (a, b))?,
                _ => return Err(Failure::Usage(format!("width {} exceeds 2", cover.len()))),
            }
        }
    };
    writeln!(w, "{value}")?;
    Ok(())
}

fn family(
    w: &mut dyn Write,
    path: Option<DyadicPath>,
    depth: Option<usize>,
    out: Option<&PathBuf>,
) -> Result<(), Failure> {
    if let Some(depth) = depth {
        let report = verify_family_layer(depth);
        writeln!(w, "stages 1..={depth}: {} posets checked", report.posets_checked)?;
        for f in &report.failures {
            writeln!(w, "FAIL {}: {:?}", f.path, f.kind)?;
        }
        if !report.passed() {
            return Err(Failure::Verification(format!(
                "{} family failures",
                report.failures.len()
            )));
        }
        writeln!(w, "PASS")?;
        return Ok(());
    }
    let path = path.expect("clap requires --path without --verify-depth");
    let fp = build_family_poset(&path);
    let counted = count_extensions_auto(&fp.poset)?;
    let tree = tree_ext(&path);
    writeln!(w, "path {path}")?;
    writeln!(w, "elements {}", fp.poset.len())?;
    writeln!(w, "entry {}", stern_brocot_entry(&path))?;
    writeln!(w, "tree ext {tree}")?;
    writeln!(w, "counted ext {counted}")?;
    if let Some(out) = out {
        fs::write(out, fp.poset.to_text()).map_err(|e| io(out, e))?;
    }
    if counted != tree {
        return Err(Failure::Verification(format!(
            "counted {counted} differs from tree {tree}"
        )));
    }
    Ok(())
}

fn euclid_detail(w: &mut dyn Write, n: u64) -> Result<(), Failure> {
    let (d, s) = best_quotient_sum(n)?;
    let seq = euclidean_sequence(n, d)?;
    let q = quotient_sequence(n, d)?;
    writeln!(w, "n {n}")?;
    writeln!(w, "phi {}", totient(n))?;
    writeln!(w, "best d {d}")?;
    writeln!(w, "s_min {s}")?;
    writeln!(w, "euclidean sequence {:?}", seq.terms)?;
    writeln!(w, "quotients {:?}", q.quotients)?;
    let hist = quotient_histogram(n);
    let nonzero: Vec<String> = hist
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(m, c)| format!("{m}:{c}"))
        .collect();
    writeln!(w, "r(n, m) {}", nonzero.join(" "))?;
    Ok(())
}

fn euclid(
    w: &mut dyn Write,
    n: Option<u64>,
    report_theorem12: bool,
    max_n: Option<u64>,
    report_lemma51: bool,
    cutoffs: Vec<u64>,
    out: Option<&PathBuf>,
) -> Result<(), Failure> {
    if report_theorem12 {
        let report = growth_report(max_n.expect("clap requires --max-n"))?;
        write_or_print(w, out, &report.to_csv())?;
        eprintln!("max ratio {:.9} at n = {}", report.max_ratio, report.argmax);
        return Ok(());
    }
    let n = n.ok_or_else(|| Failure::Usage("need --n, --report-theorem12 or --report-lemma51".into()))?;
    if report_lemma51 {
        let cutoffs = if cutoffs.is_empty() {
            standard_cutoffs(n)
        } else {
            cutoffs
        };
        let report = tail_report(n, &cutoffs)?;
        let mut csv = String::from("n,m,tail,ratio\n");
        for r in &report.rows {
            csv.push_str(&format!("{},{},{},{:.9}\n", n, r.m, r.tail, r.ratio));
        }
        return write_or_print(w, out, &csv);
    }
    euclid_detail(w, n)
}

fn construct(w: &mut dyn Write, target: u64, exact_size: Option<usize>, out: Option<&PathBuf>) -> Result<(), Failure> {
    let r = poset_for_target(
        target,
        ConstructOptions {
            exact_size,
            allow_empty: false,
        },
    )?;
    // Independent recount of the emitted poset.
    let counted = count_extensions_auto(&r.poset)?;
    if counted != r.target {
        return Err(Failure::Verification(format!("counted {counted}, expected {target}")));
    }
    let recipe = serde_json::to_string(&r.recipe).expect("recipe serializes");
    match out {
        Some(path) => fs::write(path, r.poset.to_text()).map_err(|e| io(path, e))?,
        None => write!(w, "{}", r.poset.to_text())?,
    }
    writeln!(w, "size = {}", r.size)?;
    writeln!(w, "padding = {}", r.padding)?;
    writeln!(w, "recipe = {recipe}")?;
    writeln!(w, "verified ext = {counted}")?;
    Ok(())
}

fn spectrum(
    w: &mut dyn Write,
    n: usize,
    cache_dir: Option<&PathBuf>,
    json: Option<&PathBuf>,
    allow_large: bool,
    width2: bool,
) -> Result<(), Failure> {
    if n > DEFAULT_MAX_N && allow_large {
        eprintln!("warning: n = {n} enumerates millions of posets and may take several minutes");
    }
    let opts = SpectrumOptions {
        allow_large,
        width2_only: width2,
    };
    let s = cached_spectrum(n, cache_dir.map(PathBuf::as_path), &opts)?;
    if let Some(path) = json {
        fs::write(path, s.to_json()).map_err(|e| io(path, e))?;
    }
    writeln!(w, "n {n}")?;
    writeln!(w, "generator {}", s.generator_version)?;
    writeln!(w, "posets {}", s.poset_count)?;
    writeln!(w, "distinct values {}", s.values.len())?;
    writeln!(w, "smallest missing {}", smallest_missing(&s))?;
    if n >= 1 {
        writeln!(w, "values in ((n-1)!, n!] {}", top_interval_count(&s))?;
    }
    let values: Vec<String> = s.values.iter().map(ToString::to_string).collect();
    writeln!(w, "values {}", values.join(" "))?;
    Ok(())
}

fn verify(w: &mut dyn Write, max_n: usize, cache_dir: Option<&PathBuf>) -> Result<(), Failure> {
    let rows = full_suite(max_n, cache_dir.map(PathBuf::as_path))?;
    let width = rows.iter().map(|r| r.name.len()).max().unwrap_or(0);
    for r in &rows {
        writeln!(
            w,
            "{}  {:width$}  {}",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.detail
        )?;
    }
    let failed = rows.iter().filter(|r| !r.passed).count();
    if failed > 0 {
        return Err(Failure::Verification(format!("{failed} checks failed")));
    }
    Ok(())
}

fn run(w: &mut dyn Write, cli: Cli) -> Result<(), Failure> {
    if let Some(workers) = cli.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers as usize)
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    match cli.command {
        Command::Count { file, engine } => count(w, &file, engine),
        Command::Family {
            path,
            verify_depth,
            out,
        } => family(w, path, verify_depth, out.as_ref()),
        Command::Euclid {
            n,
            report_theorem12,
            max_n,
            report_lemma51,
            cutoffs,
            out,
        } => euclid(w, n, report_theorem12, max_n, report_lemma51, cutoffs, out.as_ref()),
        Command::Construct {
            target,
            exact_size,
            out,
        } => construct(w, target, exact_size, out.as_ref()),
        Command::Spectrum {
            n,
            cache_dir,
            json,
            allow_large,
            width2,
        } => spectrum(w, n, cache_dir.as_ref(), json.as_ref(), allow_large, width2),
        Command::Verify {
            suite: Suite::Paper,
            max_n,
            cache_dir,
        } => verify(w, max_n, cache_dir.as_ref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let mut stdout = io::stdout().lock();
    let result = run(&mut stdout, cli).and_then(|()| stdout.flush().map_err(Failure::from));
    match result {
        Ok(()) | Err(Failure::Closed) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
