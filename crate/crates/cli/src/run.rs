use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use greedylab_core::bases::BasisRep;
use greedylab_core::dkk::{partition_from_concave, ConcaveSpec, DkkSpace};
use greedylab_core::params::{self, ConditionalityKind, EmbeddingKind, ParamReport};
use greedylab_core::spaces::SpaceSpec;
use greedylab_core::suites::{self, SuiteOptions, SuiteOutput};
use greedylab_core::tga::greedy_residual_curve;

use crate::config::{ExperimentConfig, Measure};

/// Command-line arguments after parsing.
#[derive(Debug, Clone)]
pub struct Invocation {
    pub subcommand: &'static str,
    pub positional: Option<String>,
    pub config: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub budget: Option<String>,
}

#[derive(Debug)]
pub struct Completed {
    pub stdout: String,
    pub failed: bool,
}

#[derive(Serialize)]
struct OutputFile {
    name: String,
    sha256: String,
}

#[derive(Serialize)]
struct RunManifest<'a> {
    tool: &'a str,
    version: &'a str,
    op: &'a str,
    config_hash: String,
    seed: Option<u64>,
    jobs: usize,
    wall_time_seconds: f64,
    outputs: Vec<OutputFile>,
}

struct Produced {
    stdout: String,
    files: Vec<(String, String)>,
    failed: bool,
}

/// Map an error to the exit-code contract: 3 for a budget guard, 4 for a
/// witness that fails re-evaluation, 2 otherwise.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        match cause.downcast_ref::<greedylab_core::Error>() {
            Some(greedylab_core::Error::BudgetExceeded { .. }) => return 3,
            Some(greedylab_core::Error::WitnessMismatch { .. }) => return 4,
            _ => {}
        }
    }
    2
}

fn allowed_ops(subcommand: &str) -> &'static [&'static str] {
    match subcommand {
        "norm" => &["norm"],
        "construct" => &["construct", "partition_from_concave"],
        "tga" => &["tga"],
        "params" => &["params"],
        "verify" => &["verify"],
        "reproduce" => &["reproduce"],
        _ => &[
            "norm",
            "partition_from_concave",
            "construct",
            "tga",
            "params",
            "verify",
            "reproduce",
        ],
    }
}

fn load_config(inv: &Invocation) -> Result<ExperimentConfig> {
    let mut value: Value = match &inv.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?
        }
        None => match inv.subcommand {
            "reproduce" | "verify" | "construct" => Value::Object(Default::default()),
            other => bail!("`{other}` needs --config"),
        },
    };
    let obj = value
        .as_object_mut()
        .ok_or_else(|| anyhow!("config must be a JSON object"))?;
    let allowed = allowed_ops(inv.subcommand);
    match obj.get("op") {
        Some(Value::String(op)) => {
            if !allowed.contains(&op.as_str()) {
                bail!("config op {op:?} does not fit subcommand `{}`", inv.subcommand);
            }
        }
        Some(_) => bail!("config field `op` must be a string"),
        None => {
            if inv.subcommand == "run" {
                bail!("`run` needs a config with an `op` field");
            }
            obj.insert("op".into(), Value::String(allowed[0].into()));
        }
    }
    if let Some(name) = &inv.positional {
        match inv.subcommand {
            "params" => {
                let measure = obj
                    .entry("measure")
                    .or_insert_with(|| Value::Object(Default::default()))
                    .as_object_mut()
                    .ok_or_else(|| anyhow!("`measure` must be an object"))?;
                match measure.get("name") {
                    Some(Value::String(n)) if n != name => {
                        bail!("params {name:?} does not match measure name {n:?} in the config")
                    }
                    _ => {
                        measure.insert("name".into(), Value::String(name.clone()));
                    }
                }
            }
            "reproduce" => match obj.get("suite") {
                Some(Value::String(s)) if s != name => {
                    bail!("reproduce {name:?} does not match suite {s:?} in the config")
                }
                _ => {
                    obj.insert("suite".into(), Value::String(name.clone()));
                }
            },
            _ => {}
        }
    }
    let mut config: ExperimentConfig = serde_json::from_value(value).context("invalid config")?;
    if let Some(seed) = inv.seed {
        config.set_seed(seed);
    }
    if let Some(budget) = &inv.budget {
        let b: u64 = budget
            .trim()
            .parse()
            .with_context(|| format!("GREEDYLAB_BUDGET={budget:?} is not an integer"))?;
        config.set_budget(b);
    }
    Ok(config)
}

fn pick_basis(space: &Option<SpaceSpec>, basis: &Option<BasisRep>) -> Result<BasisRep> {
    match (space, basis) {
        (Some(s), None) => Ok(BasisRep::unit_vectors(s.clone())),
        (None, Some(b)) => Ok(b.clone()),
        _ => bail!("give exactly one of `space` and `basis`"),
    }
}

fn pretty<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn report_files(prefix: &str, report: &ParamReport) -> Result<Vec<(String, String)>> {
    Ok(vec![
        (format!("{prefix}.json"), pretty(report)?),
        (format!("{prefix}.csv"), report.to_csv()),
        (format!("{prefix}_plot.csv"), report.plot_csv()),
    ])
}

fn run_measure(basis: &BasisRep, measure: &Measure) -> Result<Produced> {
    let single = |report: ParamReport| -> Result<Produced> {
        report.verify(basis)?;
        Ok(Produced {
            stdout: report.to_csv(),
            files: report_files("report", &report)?,
            failed: false,
        })
    };
    match measure {
        Measure::Democracy { m_max, mode } => {
            let d = params::democracy_functions(basis, *m_max, mode)?;
            d.upper.verify(basis)?;
            d.lower.verify(basis)?;
            let mut files = vec![("democracy.json".to_string(), pretty(&d)?)];
            files.extend(report_files("upper", &d.upper)?);
            files.extend(report_files("lower", &d.lower)?);
            let mut stdout = String::from("m,upper,lower\n");
            for (u, l) in d.upper.entries.iter().zip(&d.lower.entries) {
                let _ = writeln!(stdout, "{},{:.16e},{:.16e}", u.m, u.value, l.value);
            }
            Ok(Produced {
                stdout,
                files,
                failed: false,
            })
        }
        Measure::KTilde { m_max, mode } => single(params::conditionality(basis, *m_max, ConditionalityKind::KTilde, mode)?),
        Measure::K { m_max, mode } => single(params::conditionality(basis, *m_max, ConditionalityKind::K, mode)?),
        Measure::Beta { r, q, mode } => single(params::embedding_constants(basis, *r, *q, EmbeddingKind::Beta, mode)?),
        Measure::Eta { r, q, mode } => single(params::embedding_constants(basis, *r, *q, EmbeddingKind::Eta, mode)?),
        Measure::QuasiGreedy { trials, seed } => single(params::quasi_greedy_constant(basis, *trials, *seed)?),
        Measure::Suppression { mode, b, d } => single(params::suppression_asymptotic(basis, *b, *d, mode)?),
        Measure::DemTqg { trials, seed } => single(params::dem_tqg_check(basis, *trials, *seed)?),
        Measure::Lebesgue { m, budget } => single(params::lebesgue_lower(basis, *m, budget)?),
        Measure::Concavity { trials, seed } => single(params::concavity_modulus(basis, *trials, *seed)?),
        Measure::BasisConstant { trials, seed } => single(params::basis_constant(basis, *trials, *seed)?),
    }
}

fn suite_lines(out: &SuiteOutput) -> String {
    let mut s = String::new();
    for o in &out.outcomes {
        let label = if o.id == 0 {
            format!("invariant {}", o.suite)
        } else {
            format!("criterion {} {}", o.id, o.suite)
        };
        let _ = writeln!(s, "{label}: {} ({})", if o.passed { "PASS" } else { "FAIL" }, o.detail);
    }
    s
}

fn suite_files(out: &SuiteOutput) -> Vec<(String, String)> {
    let mut files = vec![("summary.json".to_string(), out.summary_json())];
    files.extend(out.artifacts.iter().map(|a| (a.name.clone(), a.contents.clone())));
    files
}

fn produce(config: &ExperimentConfig) -> Result<Produced> {
    match config {
        ExperimentConfig::Norm(c) => {
            let basis = pick_basis(&c.space, &c.basis)?;
            let value = basis.norm(&c.f)?;
            Ok(Produced {
                stdout: format!("{value}\n"),
                files: vec![("norm.json".into(), pretty(&serde_json::json!({ "norm": value }))?)],
                failed: false,
            })
        }
        ExperimentConfig::PartitionFromConcave(c) => {
            let spec = ConcaveSpec::new(c.phi, c.b)?;
            let part = partition_from_concave(&spec, c.r_max)?;
            let body = serde_json::json!({
                "M": part.cumulative_sums(),
                "sizes": part.sizes(),
                "growth_constant": spec.growth_constant(),
            });
            Ok(Produced {
                stdout: serde_json::to_string(&body)? + "\n",
                files: vec![("partition.json".into(), pretty(&body)?)],
                failed: false,
            })
        }
        ExperimentConfig::Construct(c) => {
            let space = match (&c.dkk, c.blocks) {
                (Some(d), None) => d.clone(),
                (None, blocks) => DkkSpace::default_instance(blocks.unwrap_or(5))?,
                (Some(_), Some(_)) => bail!("give at most one of `dkk` and `blocks`"),
            };
            let dump = space.dump();
            Ok(Produced {
                stdout: dump.clone(),
                files: vec![
                    ("dkk.json".into(), pretty(&space)?),
                    ("blocks.json".into(), pretty(&space.block_table())?),
                    ("dkk_table.txt".into(), dump),
                ],
                failed: false,
            })
        }
        ExperimentConfig::Tga(c) => {
            let basis = pick_basis(&c.space, &c.basis)?;
            let m_max = c.m_max.unwrap_or(c.f.len());
            let run = greedy_residual_curve(&basis, &c.f, m_max, c.tie)?;
            Ok(Produced {
                stdout: run.to_csv(),
                files: vec![("tga.json".into(), pretty(&run)?), ("tga.csv".into(), run.to_csv())],
                failed: false,
            })
        }
        ExperimentConfig::Params(c) => {
            let basis = pick_basis(&c.space, &c.basis)?;
            run_measure(&basis, &c.measure)
        }
        ExperimentConfig::Verify(c) => {
            if let Some(path) = &c.report {
                let basis = pick_basis(&c.space, &c.basis)?;
                let text = fs::read_to_string(path).with_context(|| format!("reading report {path}"))?;
                let report: ParamReport = serde_json::from_str(&text).with_context(|| format!("parsing report {path}"))?;
                let (failed, line) = match report.verify(&basis) {
                    Ok(()) => (false, format!("{} witnesses verified\n", report.entries.len())),
                    Err(e) => (true, format!("witness check failed: {e}\n")),
                };
                return Ok(Produced {
                    stdout: line.clone(),
                    files: vec![("verify.txt".into(), line)],
                    failed,
                });
            }
            if c.basis.is_some() || c.space.is_some() {
                bail!("`basis`/`space` are only used together with `report`");
            }
            let opts = suite_options(c.seed, c.budget);
            let out = suites::invariants(&opts)?;
            Ok(Produced {
                stdout: suite_lines(&out),
                files: suite_files(&out),
                failed: !out.passed(),
            })
        }
        ExperimentConfig::Reproduce(c) => {
            let opts = suite_options(c.seed, c.budget);
            let out = suites::run_suite(&c.suite, &opts)?;
            Ok(Produced {
                stdout: suite_lines(&out),
                files: suite_files(&out),
                failed: !out.passed(),
            })
        }
    }
}

fn suite_options(seed: Option<u64>, budget: Option<u64>) -> SuiteOptions {
    SuiteOptions {
        seed: seed.unwrap_or(suites::DEFAULT_SEED),
        budget,
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn prepare_out_dir(dir: &Path) -> Result<()> {
    if dir.is_dir() {
        return Ok(());
    }
    let parent = dir.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    if !parent.is_dir() {
        bail!("output directory {} cannot be created: {} does not exist", dir.display(), parent.display());
    }
    fs::create_dir(dir).with_context(|| format!("creating {}", dir.display()))
}

/// Parse, run and write outputs plus `manifest.json`.
pub fn execute(inv: &Invocation) -> Result<Completed> {
    let start = Instant::now();
    let config = load_config(inv)?;
    if let Some(dir) = &inv.out {
        prepare_out_dir(dir)?;
    }
    let jobs = inv
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if jobs == 0 {
        bail!("--jobs must be at least 1");
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .context("building the worker pool")?;
    let produced = pool.install(|| produce(&config))?;

    let config_text = pretty(&config)?;
    if let Some(dir) = &inv.out {
        let mut files = produced.files;
        files.push(("config.json".into(), config_text.clone()));
        let mut outputs = Vec::with_capacity(files.len());
        for (name, contents) in &files {
            fs::write(dir.join(name), contents).with_context(|| format!("writing {name}"))?;
            outputs.push(OutputFile {
                name: name.clone(),
                sha256: sha256_hex(contents.as_bytes()),
            });
        }
        outputs.sort_by(|a, b| a.name.cmp(&b.name));
        let manifest = RunManifest {
            tool: "greedylab",
            version: env!("CARGO_PKG_VERSION"),
            op: config.op(),
            config_hash: sha256_hex(config_text.as_bytes()),
            seed: config.seed(),
            jobs,
            wall_time_seconds: start.elapsed().as_secs_f64(),
            outputs,
        };
        fs::write(dir.join("manifest.json"), pretty(&manifest)?).context("writing manifest.json")?;
    }
    Ok(Completed {
        stdout: produced.stdout,
        failed: produced.failed,
    })
}
