//! The `msa-lab` command line.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::complex::{Weight, WeightedComplex};
use crate::error::Error;
use crate::experiment::{
    default_intervals, run_bulk, run_corollary, run_extremes, run_perturbation, run_rescale, Experiment,
};
use crate::limit::LimitLaw;
use crate::linalg::FieldChoice;
use crate::manifest::{ManifestBuilder, RunManifest};
use crate::msa::{kruskal_msa, persistence_deaths, shadow, ShadowMode, StrictThreshold};
use crate::oracle::brute_force_msa;
use crate::sampler::{augmented_complex, perturb, weighted_y, Amplitude, NoiseMode, NoiseSpec, Seed, WeightLaw};
use crate::streaming::{run_stream, C1Scaling, RevealOrder};

#[derive(Parser, Debug)]
#[command(name = "msa-lab", version, about = "Minimal spanning acycles of random weighted complexes")]
struct Cli {
    /// Directory for CSV/JSON artifacts and the run manifest.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample a weighted complex and print it as JSON.
    Sample(ModelArgs),
    /// Minimal spanning acycle by Kruskal.
    Msa(ModelArgs),
    /// (d-1)-persistence death times.
    Deaths(ModelArgs),
    /// Shadow density at a strict threshold.
    Shadow {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        threshold: Weight,
        /// `exact` or `sample:K`.
        #[arg(long, default_value = "exact")]
        mode: String,
    },
    /// Evaluate the limiting bulk measure.
    Limit {
        #[arg(long, default_value_t = 1)]
        d: u32,
        /// `density`, `tail`, `cdf`, `shadow`, or `moment:A`.
        #[arg(long, default_value = "density")]
        what: String,
        /// Evaluation grid `A:B:STEP`.
        #[arg(long)]
        grid: Option<String>,
        /// Single evaluation point.
        #[arg(long)]
        at: Option<f64>,
    },
    /// Replicated Monte Carlo experiments.
    Experiment(ExperimentArgs),
    /// Streaming MSA under one-at-a-time weight revelation.
    Stream {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 1)]
        d: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = OrderArg::Random)]
        order: OrderArg,
        #[arg(long, value_enum, default_value_t = C1Arg::Acycle)]
        c1: C1Arg,
        /// Record every K-th reveal.
        #[arg(long, default_value_t = 1)]
        every: u64,
    },
    /// Compare Kruskal with exhaustive enumeration on a tiny complex.
    Oracle {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 1)]
        d: u32,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args, Debug, Clone)]
struct ModelArgs {
    #[arg(long)]
    n: Option<u32>,
    #[arg(long, default_value_t = 1)]
    d: u32,
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// `uniform01` or `exp:LAMBDA`.
    #[arg(long, default_value = "uniform01")]
    law: WeightLaw,
    /// Noise amplitude `C`, `n^E` or `C*n^E`.
    #[arg(long)]
    noise_amp: Option<Amplitude>,
    #[arg(long, value_enum, default_value_t = NoiseArg::Iid)]
    noise_mode: NoiseArg,
    /// Weighted Y(n, p): skeleton at -inf, absent faces never appear.
    #[arg(long)]
    generic: bool,
    /// Read the complex from a JSON file instead of sampling.
    #[arg(long, conflicts_with = "n")]
    input: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct ExperimentArgs {
    #[arg(value_enum)]
    kind: ExperimentKind,
    #[arg(long)]
    n: u32,
    #[arg(long, default_value_t = 1)]
    d: u32,
    /// One value, or a comma list for `rescale`.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    p: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 20)]
    reps: u64,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long, default_value = "uniform01")]
    law: WeightLaw,
    #[arg(long, default_value = "n^-2")]
    noise_amp: Amplitude,
    #[arg(long, value_enum, default_value_t = NoiseArg::Iid)]
    noise_mode: NoiseArg,
    /// Exponent for `corollary`.
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Truncation level for `corollary`.
    #[arg(long, default_value_t = 1.0)]
    b: f64,
    #[arg(long, default_value_t = 2000)]
    steps: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ExperimentKind {
    Bulk,
    Extremes,
    Rescale,
    Corollary,
    Perturb,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum NoiseArg {
    Iid,
    Shift,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum OrderArg {
    Random,
    Rank,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum C1Arg {
    /// n / C(n-1, d)
    Acycle,
    /// n / C(n, d-1)
    Lower,
}

impl From<NoiseArg> for NoiseMode {
    fn from(a: NoiseArg) -> Self {
        match a {
            NoiseArg::Iid => NoiseMode::Iid,
            NoiseArg::Shift => NoiseMode::CommonShift,
        }
    }
}

enum Failure {
    Usage(String),
    Runtime(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Runtime(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(Error::Io(e))
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(Failure::Usage(msg.into()))
}

fn check_model(n: u32, d: u32, p: f64) -> CliResult<()> {
    if d < 1 {
        return usage(format!("--d must be >= 1, got {d}"));
    }
    if n <= d {
        return usage(format!("--n must exceed --d (n = {n}, d = {d})"));
    }
    if !(0.0..=1.0).contains(&p) {
        return usage(format!("--p must lie in [0, 1], got {p}"));
    }
    Ok(())
}

/// Runs the command line `argv` (program name first) and returns the exit
/// code: 0 on success, 2 on usage errors, 1 on runtime errors.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let argv: Vec<std::ffi::OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let command: Vec<String> = argv.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    match run(cli, command) {
        Ok(()) => 0,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            2
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            1
        }
    }
}

struct Output {
    dir: Option<PathBuf>,
}

impl Output {
    fn new(dir: Option<PathBuf>) -> CliResult<Self> {
        if let Some(d) = &dir {
            fs::create_dir_all(d)?;
        }
        Ok(Self { dir })
    }

    fn path(&self, name: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(name))
    }

    fn text(&self, name: &str, body: &str) -> CliResult<()> {
        match self.path(name) {
            Some(p) => fs::write(p, body)?,
            None => {
                let mut out = io::stdout().lock();
                out.write_all(body.as_bytes())?;
                if !body.ends_with('\n') {
                    out.write_all(b"\n")?;
                }
            }
        }
        Ok(())
    }

    /// Result JSON; in directory mode the file embeds the manifest.
    fn json(&self, name: &str, value: Value, manifest: &RunManifest) -> CliResult<()> {
        if self.dir.is_some() {
            let mut v = value;
            if let Value::Object(m) = &mut v {
                m.insert("manifest".into(), to_value(manifest)?);
            }
            self.text(name, &pretty(&v)?)?;
            self.manifest(manifest)
        } else {
            self.text(name, &pretty(&value)?)
        }
    }

    fn manifest(&self, manifest: &RunManifest) -> CliResult<()> {
        if let Some(p) = self.path("manifest.json") {
            fs::write(p, pretty(&to_value(manifest)?)? + "\n")?;
        }
        Ok(())
    }

    /// CSV series; summary JSON goes to a file in directory mode, else stderr.
    fn series(&self, name: &str, csv: String, summary: Value, manifest: &RunManifest) -> CliResult<()> {
        self.text(&format!("{name}.csv"), &csv)?;
        if self.dir.is_some() {
            self.json(&format!("{name}.json"), summary, manifest)
        } else {
            eprintln!("{}", pretty(&summary)?);
            Ok(())
        }
    }
}

fn to_value(v: &impl Serialize) -> CliResult<Value> {
    serde_json::to_value(v).map_err(|e| Failure::Runtime(e.into()))
}

fn pretty(v: &Value) -> CliResult<String> {
    serde_json::to_string_pretty(v).map_err(|e| Failure::Runtime(e.into()))
}

fn csv_string(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io_err = |e: csv::Error| Failure::Runtime(Error::Format(e.to_string()));
    w.write_record(header).map_err(io_err)?;
    for r in rows {
        w.write_record(&r).map_err(io_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Runtime(Error::Format(e.to_string())))?;
    Ok(String::from_utf8_lossy(&bytes).into_owned())
}

fn field() -> CliResult<FieldChoice> {
    FieldChoice::from_env().map_err(|e| Failure::Usage(e.to_string()))
}

fn load_complex(m: &ModelArgs) -> CliResult<WeightedComplex> {
    let base = if let Some(path) = &m.input {
        let text = fs::read_to_string(path)?;
        WeightedComplex::from_json(&text)?
    } else {
        let Some(n) = m.n else {
            return usage("one of --n or --input is required");
        };
        check_model(n, m.d, m.p)?;
        let seed = Seed::new(m.seed);
        if m.generic {
            weighted_y(n, m.d, m.p, seed, &m.law)?
        } else {
            augmented_complex(n, m.d, m.p, seed, &m.law)?
        }
    };
    Ok(match m.noise_amp {
        Some(amplitude) => {
            let noise = NoiseSpec {
                amplitude,
                mode: m.noise_mode.into(),
            };
            perturb(&base, &noise, Seed::new(m.seed)).complex
        }
        None => base,
    })
}

fn parse_grid(s: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<f64> = s
        .split(':')
        .map(|x| x.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .or_else(|_| usage(format!("bad grid {s:?}, expected A:B:STEP")))?;
    let [a, b, step] = parts[..] else {
        return usage(format!("bad grid {s:?}, expected A:B:STEP"));
    };
    if !(step > 0.0) || b < a || !a.is_finite() || !b.is_finite() {
        return usage(format!("bad grid {s:?}, need A <= B and STEP > 0"));
    }
    let count = ((b - a) / step + 1e-9).floor() as usize;
    Ok((0..=count).map(|i| a + i as f64 * step).collect())
}

fn parse_shadow_mode(s: &str) -> CliResult<ShadowMode> {
    if s == "exact" {
        return Ok(ShadowMode::Exact);
    }
    match s.strip_prefix("sample:").map(str::parse::<usize>) {
        Some(Ok(k)) if k > 0 => Ok(ShadowMode::Sampled(k)),
        _ => usage(format!("bad shadow mode {s:?}, expected exact or sample:K with K >= 1")),
    }
}

fn run(cli: Cli, command: Vec<String>) -> CliResult<()> {
    let out = Output::new(cli.out)?;
    let field = field()?;
    match cli.cmd {
        Command::Sample(m) => {
            let c = load_complex(&m)?;
            let manifest = ManifestBuilder::start(command, m.seed, field).finish(1);
            let v: Value = serde_json::from_str(&c.to_json()?).map_err(Error::from)?;
            out.json("complex.json", v, &manifest)
        }
        Command::Msa(m) => {
            let c = load_complex(&m)?;
            let msa = kruskal_msa(&c, field);
            let manifest = ManifestBuilder::start(command, m.seed, field).finish(1);
            let v = json!({
                "n": c.n(),
                "d": c.d(),
                "exists": msa.exists,
                "total_weight": msa.total_weight(),
                "faces": msa.faces.iter().map(|&(r, w)| json!([r, w.to_string()])).collect::<Vec<_>>(),
            });
            out.json("msa.json", v, &manifest)
        }
        Command::Deaths(m) => {
            let c = load_complex(&m)?;
            let deaths = persistence_deaths(&c, field);
            let manifest = ManifestBuilder::start(command, m.seed, field).finish(1);
            let v = json!({
                "n": c.n(),
                "d": c.d(),
                "deaths": deaths.deaths.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
                "ceiling_deaths": deaths.ceiling_deaths,
                "unkilled": deaths.unkilled,
            });
            out.json("deaths.json", v, &manifest)
        }
        Command::Shadow { model, threshold, mode } => {
            let mode = parse_shadow_mode(&mode)?;
            let c = load_complex(&model)?;
            let b = ManifestBuilder::start(command, model.seed, field);
            let report = shadow(&c, StrictThreshold::below(threshold), mode, field, Seed::new(model.seed))?;
            let v = json!({
                "n": c.n(),
                "d": c.d(),
                "threshold": threshold.to_string(),
                "mode": match mode { ShadowMode::Exact => "exact".to_string(), ShadowMode::Sampled(k) => format!("sample:{k}") },
                "count": report.count,
                "density": report.density,
                "std_error": report.std_error,
                "candidates": report.candidates,
            });
            out.json("shadow.json", v, &b.finish(1))
        }
        Command::Limit { d, what, grid, at } => {
            if d < 1 {
                return usage("--d must be >= 1");
            }
            let b = ManifestBuilder::start(command, 0, field);
            let law = LimitLaw::new(d)?;
            if let Some(a) = what.strip_prefix("moment:") {
                let alpha: f64 = a.parse().or_else(|_| usage(format!("bad moment order {a:?}")))?;
                if !(alpha > 0.0) {
                    return usage("moment order must be positive");
                }
                let value = law.mu_moment(alpha)?;
                out.manifest(&b.finish(0))?;
                return out.text("limit.txt", &format!("{value}\n"));
            }
            let eval: Box<dyn Fn(f64) -> f64> = match what.as_str() {
                "density" => Box::new(|x| law.mu_density(x)),
                "tail" => Box::new(|x| law.mu_tail(x)),
                "cdf" => Box::new(|x| law.mu_cdf(x)),
                "shadow" => Box::new(|x| law.s_of_x(x)),
                other => return usage(format!("unknown --what {other:?}")),
            };
            let xs = match (at, grid) {
                (Some(x), None) => vec![x],
                (None, g) => parse_grid(g.as_deref().unwrap_or("0:10:0.5"))?,
                (Some(_), Some(_)) => return usage("--at and --grid are exclusive"),
            };
            let csv = csv_string(&["x", &what], xs.iter().map(|&x| vec![x.to_string(), eval(x).to_string()]))?;
            let summary = json!({"d": d, "what": what, "t_star": law.t_star(), "c_star": law.c_star()});
            out.series("limit", csv, summary, &b.finish(0))
        }
        Command::Experiment(a) => run_experiment(&out, a, command, field),
        Command::Stream { n, d, seed, order, c1, every } => {
            check_model(n, d, 1.0)?;
            let b = ManifestBuilder::start(command, seed, field);
            let order = match order {
                OrderArg::Random => RevealOrder::Random,
                OrderArg::Rank => RevealOrder::Rank,
            };
            let scaling = match c1 {
                C1Arg::Acycle => C1Scaling::AcycleSize,
                C1Arg::Lower => C1Scaling::LowerFaces,
            };
            let (points, state) = run_stream(n, d, Seed::new(seed), order, scaling, field, every)?;
            let csv = csv_string(
                &["k", "total_weight", "c1_scaled", "conjecture"],
                points.iter().map(|p| {
                    vec![p.k.to_string(), p.total_weight.to_string(), p.c1_scaled.to_string(), p.conjecture.to_string()]
                }),
            )?;
            let summary = json!({
                "n": n, "d": d, "order": order, "c1": scaling,
                "c1_value": scaling.value(n, d),
                "final_total_weight": state.total_weight(),
                "reveals": state.k(),
            });
            out.series("stream", csv, summary, &b.finish(1))
        }
        Command::Oracle { n, d, p, seed } => {
            check_model(n, d, p)?;
            let b = ManifestBuilder::start(command, seed, field);
            let c = augmented_complex(n, d, p, Seed::new(seed), &WeightLaw::Uniform01)?;
            let brute = brute_force_msa(&c)?;
            let msa = kruskal_msa(&c, field);
            let mut kruskal_faces: Vec<u64> = msa.faces.iter().map(|f| f.0).collect();
            kruskal_faces.sort_unstable();
            let (agree, brute_total) = match &brute {
                Some(bf) => (
                    msa.exists && bf.faces == kruskal_faces && (bf.total_weight - msa.total_weight()).abs() <= 1e-12,
                    Some(bf.total_weight),
                ),
                None => (!msa.exists, None),
            };
            let v = json!({
                "n": n, "d": d, "p": p, "seed": seed,
                "brute_force_total": brute_total,
                "kruskal_total": msa.exists.then(|| msa.total_weight()),
                "acycles_visited": brute.as_ref().map(|b| b.acycles_visited),
                "agree": agree,
            });
            out.json("oracle.json", v, &b.finish(1))?;
            if agree {
                Ok(())
            } else {
                Err(Failure::Runtime(Error::InvalidParameter("brute force and Kruskal disagree".into())))
            }
        }
    }
}

fn without_rows(v: &impl Serialize) -> CliResult<Value> {
    let mut v = to_value(v)?;
    if let Value::Object(m) = &mut v {
        m.remove("rows");
    }
    Ok(v)
}

fn run_experiment(out: &Output, a: ExperimentArgs, command: Vec<String>, field: FieldChoice) -> CliResult<()> {
    let Some(&p0) = a.p.first() else {
        return usage("--p needs a value");
    };
    for &p in &a.p {
        check_model(a.n, a.d, p)?;
    }
    if a.reps == 0 {
        return usage("--reps must be >= 1");
    }
    if a.jobs == Some(0) {
        return usage("--jobs must be >= 1");
    }
    let b = ManifestBuilder::start(command, a.seed, field);
    let exp = Experiment {
        n: a.n,
        d: a.d,
        p: p0,
        law: a.law.clone(),
        reps: a.reps,
        seed: a.seed,
        field,
        jobs: a.jobs,
    };
    let seed_col = |rep: u64| exp.seed_of(rep).to_string();
    match a.kind {
        ExperimentKind::Bulk => {
            let r = run_bulk(&exp)?;
            let csv = csv_string(
                &["rep", "seed", "kolmogorov", "exists", "total_weight", "msa_size"],
                r.rows.iter().map(|row| {
                    vec![
                        row.rep.to_string(),
                        seed_col(row.rep),
                        row.kolmogorov.to_string(),
                        row.exists.to_string(),
                        row.total_weight.to_string(),
                        row.msa_size.to_string(),
                    ]
                }),
            )?;
            out.series("bulk", csv, without_rows(&r)?, &b.finish(a.reps))
        }
        ExperimentKind::Rescale => {
            let r = run_rescale(&exp, &a.p)?;
            let csv = csv_string(
                &["rep", "seed", "p", "kolmogorov"],
                r.rows.iter().map(|&(rep, p, k)| vec![rep.to_string(), seed_col(rep), p.to_string(), k.to_string()]),
            )?;
            out.series("rescale", csv, without_rows(&r)?, &b.finish(a.reps))
        }
        ExperimentKind::Extremes => {
            if a.reps < 2 {
                return usage("extremes needs --reps >= 2");
            }
            let ivs = default_intervals();
            let r = run_extremes(&exp, &ivs)?;
            let label = |iv: &crate::stats::Interval| format!("({},{}]", iv.lo, iv.hi);
            let mut header = vec!["rep".to_string(), "seed".to_string()];
            header.extend(ivs.iter().map(|iv| format!("msa{}", label(iv))));
            header.extend(ivs.iter().map(|iv| format!("nearest{}", label(iv))));
            let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
            let csv = csv_string(
                &header_refs,
                r.rows.iter().map(|row| {
                    let mut v = vec![row.rep.to_string(), seed_col(row.rep)];
                    v.extend(row.msa_counts.iter().map(u64::to_string));
                    v.extend(row.nearest_counts.iter().map(u64::to_string));
                    v
                }),
            )?;
            out.series("extremes", csv, without_rows(&r)?, &b.finish(a.reps))
        }
        ExperimentKind::Corollary => {
            let rows = run_corollary(&exp, a.alpha, a.b, a.steps)?;
            let csv = csv_string(
                &["rep", "seed", "direct", "via_betti"],
                rows.iter().map(|r| {
                    vec![r.rep.to_string(), seed_col(r.rep), r.direct.to_string(), r.via_betti.to_string()]
                }),
            )?;
            let max_gap = rows.iter().map(|r| (r.direct - r.via_betti).abs()).fold(0.0, f64::max);
            let summary = json!({"n": a.n, "d": a.d, "p": p0, "alpha": a.alpha, "b": a.b, "steps": a.steps, "max_gap": max_gap});
            out.series("corollary", csv, summary, &b.finish(a.reps))
        }
        ExperimentKind::Perturb => {
            let noise = NoiseSpec {
                amplitude: a.noise_amp,
                mode: a.noise_mode.into(),
            };
            let r = run_perturbation(&exp, &noise)?;
            let csv = csv_string(
                &["rep", "seed", "sup_norm", "matching_shift", "kolmogorov"],
                r.rows.iter().map(|row| {
                    vec![
                        row.rep.to_string(),
                        seed_col(row.rep),
                        row.sup_norm.to_string(),
                        row.matching_shift.to_string(),
                        row.kolmogorov.to_string(),
                    ]
                }),
            )?;
            out.series("perturb", csv, without_rows(&r)?, &b.finish(a.reps))
        }
    }
}

/// Convenience for tests: run with an output directory.
pub fn dispatch_into(dir: &Path, args: &[&str]) -> i32 {
    let mut argv = vec!["msa-lab".to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    argv.push("--out".into());
    argv.push(dir.display().to_string());
    dispatch(argv)
}
