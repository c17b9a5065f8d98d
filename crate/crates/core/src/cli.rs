//! Command-line front end.
//!
//! Settings resolve as flags, then the `--config` file (flat `key = value`
//! lines, `#` comments), then defaults. Exit codes: 0 success, 1 usage or
//! configuration error, 2 precision failure, 3 window failure.

use std::collections::HashMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::chart::ChartView;
use crate::cobar::{self, CobarError, ExteriorHopf};
use crate::grpcoh::{self, CohomologyError};
use crate::mahler::{self, MahlerError, MahlerFunction};
use crate::padic::{PadicError, Zpn, DEFAULT_PRECISION};
use crate::ssq::{self, ChartClass, SsError};
use crate::towers::{self, Stage, Support, Tail, TowerError, TowerSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_PRECISION: i32 = 2;
pub const EXIT_WINDOW: i32 = 3;

const MIN_PRECISION: u32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Precision(String),
    #[error("{0}")]
    Window(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => EXIT_USAGE,
            CliError::Precision(_) => EXIT_PRECISION,
            CliError::Window(_) => EXIT_WINDOW,
        }
    }
}

impl From<PadicError> for CliError {
    fn from(e: PadicError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<CohomologyError> for CliError {
    fn from(e: CohomologyError) -> Self {
        match e {
            CohomologyError::Precision { .. } | CohomologyError::Unstable { .. } => {
                CliError::Precision(e.to_string())
            }
            CohomologyError::Window(..) => CliError::Window(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<SsError> for CliError {
    fn from(e: SsError) -> Self {
        match e {
            SsError::Precision { .. } => CliError::Precision(e.to_string()),
            SsError::Window(_) => CliError::Window(e.to_string()),
            SsError::Cohomology(c) => c.into(),
            SsError::Mismatch { .. } => CliError::Usage(e.to_string()),
        }
    }
}

impl From<MahlerError> for CliError {
    fn from(e: MahlerError) -> Self {
        match e {
            MahlerError::Precision { .. } => CliError::Precision(e.to_string()),
            MahlerError::Cohomology(c) => c.into(),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<TowerError> for CliError {
    fn from(e: TowerError) -> Self {
        match e {
            TowerError::Spectral(s) => s.into(),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<CobarError> for CliError {
    fn from(e: CobarError) -> Self {
        CliError::Usage(e.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    AsciiChart,
    SvgChart,
}

#[derive(Parser, Debug)]
#[command(name = "chromatic", version, about = "Height-one chromatic computations at an odd prime")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
struct Common {
    /// Odd prime.
    #[arg(short = 'p', long = "prime")]
    prime: Option<u64>,
    /// p-adic precision N (arithmetic modulo p^N).
    #[arg(short = 'N', long = "precision")]
    precision: Option<u32>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write output here instead of standard output.
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
    /// Flat key=value settings file.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default)]
struct StemWindow {
    #[arg(long, allow_hyphen_values = true)]
    stem_min: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    stem_max: Option<i64>,
    /// Largest Adams filtration shown.
    #[arg(long)]
    fmax: Option<u32>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// E_2 page computed from the associated graded.
    E2 {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        window: StemWindow,
    },
    /// All pages, differentials and E_infinity.
    Run {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        window: StemWindow,
    },
    /// Adams chart of the E_2 page with differentials.
    Chart {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        window: StemWindow,
    },
    /// H^{s,t} of Z_p^x with coefficients in Z_p[u^{+-1}].
    Abutment {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        t_min: Option<i64>,
        #[arg(long, allow_hyphen_values = true)]
        t_max: Option<i64>,
        /// Also compare with E_infinity of the spectral sequence.
        #[arg(long)]
        check: bool,
    },
    /// Cohomology of the characters Z_p(k).
    Cohomology {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        k_min: Option<i64>,
        #[arg(long, allow_hyphen_values = true)]
        k_max: Option<i64>,
    },
    /// Invariants of the psi-action on a Mahler window.
    Mahler {
        #[command(flatten)]
        common: Common,
        /// Window length L.
        #[arg(short = 'L', long)]
        length: Option<usize>,
        /// Print the Mahler coefficients of psi acting on b_i as CSV.
        #[arg(long)]
        csv: Option<usize>,
    },
    /// lim and lim^1 of towers.
    Limits {
        #[command(flatten)]
        common: Common,
        /// The page tower of the Moore-type sum of spheres.
        #[arg(long)]
        moore: bool,
        /// Eventually constant support function g(0),g(1),... of a nested tower.
        #[arg(long)]
        support: Option<String>,
    },
    /// Ext of an exterior Hopf algebra from the cobar complex.
    Cobar {
        #[command(flatten)]
        common: Common,
        /// Number of generators.
        #[arg(short = 'n', long)]
        generators: Option<usize>,
        #[arg(long)]
        smax: Option<usize>,
        /// Field order.
        #[arg(short = 'q', long)]
        field: Option<u64>,
    },
}

/// Parsed `--config` file.
#[derive(Debug, Default)]
struct ConfigFile {
    values: HashMap<String, String>,
}

const CONFIG_KEYS: &[&str] = &[
    "prime", "precision", "format", "output", "stem_min", "stem_max", "fmax", "t_min", "t_max",
    "k_min", "k_max", "length", "generators", "smax", "field",
];

impl ConfigFile {
    fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn parse(text: &str) -> Result<Self, CliError> {
        let mut values = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value", i + 1)))?;
            let key = k.trim().replace('-', "_");
            let key = match key.as_str() {
                "p" => "prime".to_string(),
                "N" => "precision".to_string(),
                "n" => "generators".to_string(),
                "q" => "field".to_string(),
                "L" => "length".to_string(),
                _ => key,
            };
            if !CONFIG_KEYS.contains(&key.as_str()) {
                return Err(CliError::Usage(format!("config line {}: unknown key {key}", i + 1)));
            }
            values.insert(key, v.trim().to_string());
        }
        Ok(ConfigFile { values })
    }

    fn pick<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, CliError> {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.values.get(key) {
            Some(raw) => raw
                .parse()
                .map_err(|_| CliError::Usage(format!("config: invalid value {raw:?} for {key}"))),
            None => Ok(default),
        }
    }

    fn format(&self, flag: Option<Format>, default: Format) -> Result<Format, CliError> {
        if let Some(f) = flag {
            return Ok(f);
        }
        match self.values.get("format") {
            Some(raw) => Format::from_str(raw, true)
                .map_err(|_| CliError::Usage(format!("config: invalid format {raw:?}"))),
            None => Ok(default),
        }
    }
}

/// Settings shared by every subcommand, after resolution.
struct Resolved {
    config: ConfigFile,
    prime: u64,
    precision: u32,
    format: Format,
    output: Option<PathBuf>,
}

impl Resolved {
    fn new(common: &Common) -> Result<Self, CliError> {
        let config = ConfigFile::load(common.config.as_deref())?;
        let prime = config.pick(common.prime, "prime", 3)?;
        let precision = config.pick(common.precision, "precision", DEFAULT_PRECISION)?;
        if precision < MIN_PRECISION {
            return Err(CliError::Usage(format!(
                "precision must be at least {MIN_PRECISION}, got {precision}"
            )));
        }
        let format = config.format(common.format, Format::Table)?;
        let output = match &common.output {
            Some(p) => Some(p.clone()),
            None => config.values.get("output").map(PathBuf::from),
        };
        Ok(Resolved {
            config,
            prime,
            precision,
            format,
            output,
        })
    }

    fn ring(&self) -> Result<Zpn, CliError> {
        Ok(Zpn::new(self.prime, self.precision)?)
    }

    fn window(&self, w: &StemWindow) -> Result<(i64, i64, u32), CliError> {
        let lo = self.config.pick(w.stem_min, "stem_min", -1)?;
        let hi = self.config.pick(w.stem_max, "stem_max", 4 * (self.prime as i64 - 1))?;
        let fmax = self.config.pick(w.fmax, "fmax", 8)?;
        if lo > hi {
            return Err(CliError::Window(format!("empty stem window [{lo}, {hi}]")));
        }
        Ok((lo, hi, fmax))
    }

    fn only_tables(&self, allowed: &[Format]) -> Result<(), CliError> {
        if allowed.contains(&self.format) {
            Ok(())
        } else {
            Err(CliError::Usage(format!(
                "format {:?} is not available for this subcommand",
                self.format
            )))
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serialisable");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct ClassRow<'a> {
    name: &'a str,
    t: i64,
    f: u32,
    c: u8,
}

fn class_rows(classes: &[ChartClass]) -> Vec<ClassRow<'_>> {
    classes
        .iter()
        .map(|k| ClassRow {
            name: &k.name,
            t: k.t,
            f: k.f,
            c: k.c,
        })
        .collect()
}

fn class_table(classes: &[ChartClass]) -> String {
    let mut out = String::from("stem  s  t  c  class\n");
    for k in classes {
        writeln!(out, "{} {} {} {} {}", k.stem(), k.f, k.t, k.c, k.name).expect("write");
    }
    out
}

fn in_stems(k: &ChartClass, lo: i64, hi: i64) -> bool {
    (lo..=hi).contains(&k.stem())
}

fn cmd_e2(common: &Common, w: &StemWindow) -> Result<(Resolved, String), CliError> {
    let rs = Resolved::new(common)?;
    rs.only_tables(&[Format::Table, Format::Json])?;
    let (lo, hi, fmax) = rs.window(w)?;
    let mut classes = ssq::e2_page(rs.ring()?, lo, hi + 1, fmax)?;
    classes.retain(|k| in_stems(k, lo, hi));
    let text = match rs.format {
        Format::Json => to_json(&class_rows(&classes)),
        _ => class_table(&classes),
    };
    Ok((rs, text))
}

fn run_window(rs: &Resolved, w: &StemWindow) -> Result<(ssq::SsRun, i64, i64, u32), CliError> {
    let (lo, hi, fmax) = rs.window(w)?;
    let run = ssq::run(rs.ring()?, lo, hi + 1)?;
    Ok((run, lo, hi, fmax))
}

fn cmd_run(common: &Common, w: &StemWindow) -> Result<(Resolved, String), CliError> {
    let rs = Resolved::new(common)?;
    rs.only_tables(&[Format::Table, Format::Json])?;
    let (run, _, _, _) = run_window(&rs, w)?;
    let text = match rs.format {
        Format::Json => to_json(&run.dump()),
        _ => {
            let mut out = String::new();
            writeln!(
                out,
                "p = {}, N = {}, internal degrees [{}, {}]",
                run.prime, run.precision, run.t_min, run.t_max
            )
            .expect("write");
            for page in &run.pages {
                writeln!(out, "E_{}: {} classes", page.page, page.classes.len()).expect("write");
            }
            writeln!(out, "differentials:").expect("write");
            for d in &run.differentials {
                writeln!(out, "  d_{}({}) = {}", d.r, d.source.name, d.target.name).expect("write");
            }
            writeln!(out, "E_infinity:").expect("write");
            for k in &run.e_infinity {
                writeln!(out, "  t = {}, s = {}: {}", k.t, k.f, k.name).expect("write");
            }
            writeln!(out, "precision horizon: {} classes", run.horizon.len()).expect("write");
            out
        }
    };
    Ok((rs, text))
}

fn cmd_chart(common: &Common, w: &StemWindow) -> Result<(Resolved, String), CliError> {
    let mut rs = Resolved::new(common)?;
    if rs.format == Format::Table {
        rs.format = Format::AsciiChart;
    }
    rs.only_tables(&[Format::AsciiChart, Format::SvgChart])?;
    let (run, lo, hi, fmax) = run_window(&rs, w)?;
    let e2 = &run.pages.first().expect("at least one page").classes;
    let view = ChartView::new(lo, hi, fmax, e2, &run.differentials);
    let text = match rs.format {
        Format::SvgChart => view.to_svg(),
        _ => view.to_ascii(),
    };
    Ok((rs, text))
}

#[derive(Serialize)]
struct GroupRow {
    s: u8,
    t: i64,
    group: String,
}

fn cmd_abutment(
    common: &Common,
    t_min: Option<i64>,
    t_max: Option<i64>,
    check: bool,
) -> Result<(Resolved, String), CliError> {
    let rs = Resolved::new(common)?;
    rs.only_tables(&[Format::Table, Format::Json])?;
    let hi = rs.config.pick(t_max, "t_max", 4 * (rs.prime as i64 - 1))?;
    let lo = rs.config.pick(t_min, "t_min", -hi)?;
    if lo > hi {
        return Err(CliError::Window(format!("empty window [{lo}, {hi}]")));
    }
    let ring = rs.ring()?;
    let report = grpcoh::abutment(ring, lo, hi)?;
    let rows: Vec<GroupRow> = report
        .nonzero()
        .map(|(&(s, t), g)| GroupRow {
            s,
            t,
            group: g.render(rs.prime, rs.precision),
        })
        .collect();
    let verdict = if check {
        let run = ssq::run(ring, lo, hi)?;
        run.abutment_check(&report)?;
        Some("E_infinity agrees with H^{s,t} in every degree")
    } else {
        None
    };
    let text = match rs.format {
        Format::Json => to_json(&rows),
        _ => {
            let mut out = String::from("s  t  H^{s,t}\n");
            for r in &rows {
                writeln!(out, "{} {} {}", r.s, r.t, r.group).expect("write");
            }
            if let Some(v) = verdict {
                writeln!(out, "{v}").expect("write");
            }
            out
        }
    };
    Ok((rs, text))
}

#[derive(Serialize)]
struct CharacterRow {
    k: i64,
    h0_rational: u8,
    h1_rational: u8,
    torsion_exponent: u32,
}

fn cmd_cohomology(
    common: &Common,
    k_min: Option<i64>,
    k_max: Option<i64>,
) -> Result<(Resolved, String), CliError> {
    let rs = Resolved::new(common)?;
    rs.only_tables(&[Format::Table, Format::Json])?;
    let lo = rs.config.pick(k_min, "k_min", -20)?;
    let hi = rs.config.pick(k_max, "k_max", 20)?;
    if lo > hi {
        return Err(CliError::Window(format!("empty character range [{lo}, {hi}]")));
    }
    let profile = mahler::h1_rational_profile(lo, hi, rs.ring()?)?;
    let rows: Vec<CharacterRow> = profile
        .characters
        .iter()
        .map(|(k, c)| CharacterRow {
            k: *k,
            h0_rational: c.h0_rank,
            h1_rational: c.h1_rank,
            torsion_exponent: c.torsion_valuation,
        })
        .collect();
    let text = match rs.format {
        Format::Json => to_json(&rows),
        _ => {
            let mut out = String::from("k  dim_Q H^0  dim_Q H^1  v_p(1 - psi^k)\n");
            for r in &rows {
                writeln!(
                    out,
                    "{} {} {} {}",
                    r.k, r.h0_rational, r.h1_rational, r.torsion_exponent
                )
                .expect("write");
            }
            let (h0, h1) = profile.rational_ranks();
            writeln!(out, "rational H^0 rank {h0}, rational H^1 rank {h1}").expect("write");
            out
        }
    };
    Ok((rs, text))
}

#[derive(Serialize)]
struct MahlerReport {
    prime: u64,
    precision: u32,
    length: usize,
    invariant_rank: usize,
    generator: Vec<u64>,
    smith_valuations: Vec<u32>,
}

fn cmd_mahler(common: &Common, length: Option<usize>, csv: Option<usize>) -> Result<(Resolved, String), CliError> {
    let rs = Resolved::new(common)?;
    rs.only_tables(&[Format::Table, Format::Json])?;
    let len = rs.config.pick(length, "length", 16)?;
    let ring = rs.ring()?;
    if let Some(i) = csv {
        if i >= len {
            return Err(CliError::Usage(format!("basis index {i} outside window of length {len}")));
        }
        let f = mahler::act_psi(&MahlerFunction::basis(ring, len, i));
        return Ok((rs, f.to_csv()));
    }
    let inv = mahler::invariants(len, ring)?;
    let report = MahlerReport {
        prime: rs.prime,
        precision: rs.precision,
        length: len,
        invariant_rank: inv.rank,
        generator: inv
            .basis
            .first()
            .map(|g| g.coeffs().iter().map(|c| c.residue()).collect())
            .unwrap_or_default(),
        smith_valuations: inv.torsion.iter().copied().filter(|&v| v > 0).collect(),
    };
    let text = match rs.format {
        Format::Json => to_json(&report),
        _ => {
            let mut out = String::new();
            writeln!(out, "L = {len}, p = {}, N = {}", rs.prime, rs.precision).expect("write");
            writeln!(out, "rank of ker(id - psi): {}", report.invariant_rank).expect("write");
            let constant = report
                .generator
                .iter()
                .enumerate()
                .all(|(i, &c)| (i == 0) == (c != 0));
            writeln!(
                out,
                "generator: {}",
                if constant { "constant function 1" } else { "non-constant" }
            )
            .expect("write");
            writeln!(out, "nonunit Smith valuations: {:?}", report.smith_valuations).expect("write");
            out
        }
    };
    Ok((rs, text))
}

fn cmd_limits(common: &Common, moore: bool, support: Option<&str>) -> Result<(Resolved, String), CliError> {
    let rs = Resolved::new(common)?;
    rs.only_tables(&[Format::Table])?;
    let tower = if moore {
        towers::moore_example(rs.prime)
    } else if let Some(spec) = support {
        let values = spec
            .split(',')
            .map(|x| x.trim().parse::<u32>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| CliError::Usage(format!("invalid support list {spec:?}")))?;
        if values.is_empty() {
            return Err(CliError::Usage("empty support list".into()));
        }
        TowerSpec {
            prime: rs.prime,
            first_index: 0,
            stages: values.iter().map(|&from| Stage::SubSum { from }).collect(),
            tail: Some(Tail::NestedSubSums(Support::Stabilizing { values })),
        }
    } else {
        return Err(TowerError::UndeclaredTail.into());
    };
    let res = towers::lim_lim1(&tower)?;
    let mut out = format!(
        "lim = {}, lim¹ {}\n",
        res.lim,
        if res.lim1_nonzero { "≠ 0" } else { "= 0" }
    );
    if let Some(w) = res.witness {
        writeln!(out, "witness: {w} in the product, not in the image of the sum").expect("write");
    }
    Ok((rs, out))
}

#[derive(Serialize)]
struct CobarRow {
    s: usize,
    t: i64,
    dim: usize,
    oracle: usize,
}

fn cmd_cobar(
    common: &Common,
    generators: Option<usize>,
    smax: Option<usize>,
    field: Option<u64>,
) -> Result<(Resolved, String), CliError> {
    let rs = Resolved::new(common)?;
    rs.only_tables(&[Format::Table, Format::Json])?;
    let n = rs.config.pick(generators, "generators", 2)?;
    let s_max = rs.config.pick(smax, "smax", 4)?;
    let q = rs.config.pick(field, "field", rs.prime)?;
    let h = ExteriorHopf::new(n, q)?;
    let ext = cobar::cobar_ext(&h, s_max)?;
    let oracle = cobar::symmetric_oracle(n, s_max);
    let mut keys: Vec<(usize, i64)> = ext.dims.keys().chain(oracle.dims.keys()).copied().collect();
    keys.sort_unstable();
    keys.dedup();
    let rows: Vec<CobarRow> = keys
        .into_iter()
        .map(|(s, t)| CobarRow {
            s,
            t,
            dim: ext.get(s, t),
            oracle: oracle.get(s, t),
        })
        .collect();
    let text = match rs.format {
        Format::Json => to_json(&rows),
        _ => {
            let mut out = format!("n = {n}, q = {q}\ns  t  dim  oracle\n");
            for r in &rows {
                writeln!(out, "{} {} {} {}", r.s, r.t, r.dim, r.oracle).expect("write");
            }
            out
        }
    };
    Ok((rs, text))
}

fn dispatch(cli: &Cli) -> Result<(Resolved, String), CliError> {
    match &cli.command {
        Command::E2 { common, window } => cmd_e2(common, window),
        Command::Run { common, window } => cmd_run(common, window),
        Command::Chart { common, window } => cmd_chart(common, window),
        Command::Abutment {
            common,
            t_min,
            t_max,
            check,
        } => cmd_abutment(common, *t_min, *t_max, *check),
        Command::Cohomology { common, k_min, k_max } => cmd_cohomology(common, *k_min, *k_max),
        Command::Mahler { common, length, csv } => cmd_mahler(common, *length, *csv),
        Command::Limits {
            common,
            moore,
            support,
        } => cmd_limits(common, *moore, support.as_deref()),
        Command::Cobar {
            common,
            generators,
            smax,
            field,
        } => cmd_cobar(common, *generators, *smax, *field),
    }
}

/// Runs the command line `args` (program name first), writing regular
/// output to `out` and diagnostics to `err`; returns the exit code.
pub fn execute<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let shown = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(shown.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = err.write_all(shown.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };
    let result = dispatch(&cli).and_then(|(rs, text)| match rs.output {
        Some(path) => std::fs::write(&path, text).map_err(CliError::from),
        None => out.write_all(text.as_bytes()).map_err(CliError::from),
    });
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["chromatic"];
        full.extend_from_slice(args);
        let code = execute(full, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn config_parsing() {
        let c = ConfigFile::parse("p = 5\n# comment\nstem-min=-2 # trailing\n").unwrap();
        assert_eq!(c.pick(None, "prime", 3u64).unwrap(), 5);
        assert_eq!(c.pick(Some(7u64), "prime", 3).unwrap(), 7);
        assert_eq!(c.pick(None, "stem_min", 0i64).unwrap(), -2);
        assert_eq!(c.pick(None, "fmax", 8u32).unwrap(), 8);
        assert!(ConfigFile::parse("bogus = 1").is_err());
        assert!(ConfigFile::parse("no equals sign").is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(call(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(call(&["run", "-p", "3", "-N", "4", "--stem-min", "36", "--stem-max", "36"]).0, EXIT_PRECISION);
        assert_eq!(call(&["run", "--stem-min", "5", "--stem-max", "2"]).0, EXIT_WINDOW);
        assert_eq!(call(&["run", "-N", "2"]).0, EXIT_USAGE);
        assert_eq!(call(&["limits"]).0, EXIT_USAGE);
        assert_eq!(call(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn limits_moore() {
        let (code, out, _) = call(&["limits", "--moore", "-p", "3"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("lim = 0, lim¹ ≠ 0"));
    }
}
