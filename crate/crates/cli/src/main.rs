use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use glpres::harness::{self, CampaignConfig};
use glpres::report;
use glpres::{Budget, DivisionAlgebraSpec, Error, FieldSpec, MatEndo, Matrix, MatrixSubspace, Preset, Result};

#[derive(Parser, Debug)]
#[command(name = "glpres", version, about = "Linear maps on square matrices that preserve invertibility")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Scalar field: `q` or `gf:p`.
    #[arg(long, global = true)]
    field: Option<FieldSpec>,
    /// Matrix size for campaigns.
    #[arg(long, global = true, default_value_t = 2)]
    n: usize,
    /// Largest exhaustive scan allowed.
    #[arg(long, global = true, env = "GLPRES_BUDGET")]
    budget: Option<u64>,
    /// Random samples for non-exhaustive checks.
    #[arg(long, global = true)]
    samples: Option<u64>,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, env = "GLPRES_JOBS", default_value_t = 0)]
    jobs: usize,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Report failures as JSON on stdout.
    #[arg(long, global = true)]
    json_errors: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a map from its parameters.
    #[command(subcommand)]
    Build(BuildCmd),
    /// Classify a map as Frobenius, pinch, or non-preserver.
    Classify {
        #[arg(long)]
        endo: String,
    },
    /// Test whether a map sends invertible matrices to invertible matrices.
    Preserves {
        #[arg(long)]
        endo: String,
    },
    /// Build and test subspaces of matrices.
    #[command(subcommand)]
    Subspace(SubspaceCmd),
    /// Division algebras and their matrix subspaces.
    #[command(subcommand)]
    Algebra(AlgebraCmd),
    /// Scan every linear map over a small prime field.
    Enumerate {
        /// Permit map spaces above the default cap.
        #[arg(long)]
        allow_large: bool,
        /// Partition log used to resume an interrupted scan.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// Run the structural audits.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Summarize saved reports.
    #[command(subcommand)]
    Report(ReportCmd),
}

#[derive(Subcommand, Debug)]
enum BuildCmd {
    /// `M ↦ PMQ`.
    U {
        #[arg(long)]
        p: String,
        #[arg(long)]
        q: String,
    },
    /// `M ↦ PMᵗQ`.
    V {
        #[arg(long)]
        p: String,
        #[arg(long)]
        q: String,
    },
    /// `M ↦ α(MX)` or `α(MᵗX)` through a subspace.
    Pinch {
        /// Subspace document.
        #[arg(long, conflicts_with = "preset")]
        subspace: Option<String>,
        /// Take the subspace of a preset algebra instead.
        #[arg(long)]
        preset: Option<String>,
        #[arg(long)]
        poly: Option<String>,
        /// Coordinate change of the isomorphism; identity when omitted.
        #[arg(long)]
        a: Option<String>,
        #[arg(long)]
        x: String,
        #[arg(long)]
        twisted: bool,
    },
}

#[derive(Subcommand, Debug)]
enum SubspaceCmd {
    /// Matrices killing `x`.
    MakeLd {
        #[arg(long)]
        x: String,
    },
    /// Matrices with image in the hyperplane `yᵗv = 0`.
    MakeLh {
        #[arg(long)]
        y: String,
    },
    /// Kernel-type or image-type for a maximal singular subspace.
    Classify {
        #[arg(long = "in")]
        input: String,
    },
    IsSingular {
        #[arg(long = "in")]
        input: String,
    },
    /// Whether every nonzero member is invertible.
    IsNonsingular {
        #[arg(long = "in")]
        input: String,
    },
}

#[derive(Subcommand, Debug)]
enum AlgebraCmd {
    Preset {
        #[arg(long)]
        name: String,
        #[arg(long)]
        poly: Option<String>,
    },
    FromSubspace {
        #[arg(long = "in")]
        input: String,
    },
    ToSubspace {
        #[arg(long = "in")]
        input: String,
    },
    IsDivision {
        #[arg(long = "in")]
        input: String,
    },
}

#[derive(Subcommand, Debug)]
enum VerifyCmd {
    /// `f(GL) = GL`, `f⁻¹(GL) = GL` and bijective preservers coincide.
    Theorem1,
    /// Dimension bound and types of singular subspaces.
    Dieudonne,
    /// Invertible matrices span all matrices.
    Span {
        /// Comma-separated `field/n` pairs.
        #[arg(long, default_value = "gf:2/2,gf:2/3,gf:3/2,gf:3/3")]
        cases: String,
    },
    /// `M ↦ f(M)X` is onto for every preserver and nonzero `X`.
    Onto,
}

#[derive(Subcommand, Debug)]
enum ReportCmd {
    /// Print a text summary of a JSON report.
    Render {
        #[arg(long = "in")]
        input: String,
    },
}

/// What a command produced.
enum Output {
    Json(Value),
    Text(String),
}

struct Ctx {
    global: Global,
}

impl Ctx {
    fn field(&self) -> FieldSpec {
        self.global.field.unwrap_or_else(|| FieldSpec::prime(2).expect("2 is prime"))
    }

    fn budget(&self) -> Budget {
        let mut b = Budget::default().with_seed(self.global.seed);
        if let Some(limit) = self.global.budget {
            b = b.with_limit(limit);
        }
        if let Some(s) = self.global.samples {
            b = b.with_samples(s);
        }
        b
    }

    fn campaign(&self) -> CampaignConfig {
        let mut cfg = CampaignConfig::new(self.field(), self.global.n);
        cfg.budget = self.budget();
        cfg.jobs = self.global.jobs;
        cfg
    }

    /// Rejects a document whose field disagrees with an explicit `--field`.
    fn check_field(&self, doc: FieldSpec) -> Result<()> {
        match self.global.field {
            Some(f) => f.check(&doc),
            None => Ok(()),
        }
    }
}

fn read_text(arg: &str) -> Result<String> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('[') || trimmed.starts_with('{') {
        return Ok(arg.to_string());
    }
    std::fs::read_to_string(Path::new(arg)).map_err(|e| Error::Io(format!("{arg}: {e}")))
}

fn parse_json(arg: &str) -> Result<Value> {
    serde_json::from_str(&read_text(arg)?).map_err(|e| Error::Parse { what: "json", input: e.to_string() })
}

fn load<T: serde::de::DeserializeOwned>(arg: &str, what: &'static str) -> Result<T> {
    serde_json::from_value(parse_json(arg)?).map_err(|e| Error::Parse { what, input: e.to_string() })
}

/// A matrix given as rows, a flat column vector, or a tagged document.
fn matrix_arg(field: FieldSpec, arg: &str) -> Result<Matrix> {
    let v = parse_json(arg)?;
    let doc = match &v {
        Value::Object(_) => v,
        Value::Array(items) if items.iter().all(Value::is_array) => json!({"field": field, "rows": v}),
        Value::Array(items) => json!({"field": field, "rows": items.iter().map(|x| json!([x])).collect::<Vec<_>>()}),
        _ => return Err(Error::Parse { what: "matrix", input: arg.to_string() }),
    };
    serde_json::from_value(doc).map_err(|e| Error::Parse { what: "matrix", input: e.to_string() })
}

fn to_json<T: serde::Serialize>(t: &T) -> Value {
    serde_json::to_value(t).unwrap_or(Value::Null)
}

fn run(ctx: &Ctx, command: Command) -> Result<Output> {
    let budget = ctx.budget();
    Ok(Output::Json(match command {
        Command::Build(b) => to_json(&build(ctx, b)?),
        Command::Classify { endo } => {
            let f: MatEndo = load(&endo, "endomorphism")?;
            ctx.check_field(f.field())?;
            report::classification_report(&f.classify_report(&budget)?)
        }
        Command::Preserves { endo } => {
            let f: MatEndo = load(&endo, "endomorphism")?;
            ctx.check_field(f.field())?;
            report::preservation(&f.preserves_gl(&budget)?)
        }
        Command::Subspace(s) => subspace(ctx, s, &budget)?,
        Command::Algebra(a) => algebra(ctx, a, &budget)?,
        Command::Enumerate { allow_large, checkpoint } => {
            let mut cfg = ctx.campaign();
            cfg.allow_large = allow_large;
            cfg.checkpoint = checkpoint;
            to_json(&harness::enumerate_preservers(&cfg)?.report)
        }
        Command::Verify(v) => {
            let cfg = ctx.campaign();
            match v {
                VerifyCmd::Theorem1 => to_json(&harness::verify_theorem1(&cfg)?),
                VerifyCmd::Dieudonne => to_json(&harness::run_dieudonne(&cfg)?),
                VerifyCmd::Span { cases } => to_json(&harness::run_span(&parse_cases(&cases)?, &budget)?),
                VerifyCmd::Onto => {
                    let e = harness::enumerate_preservers(&cfg)?;
                    let mut r = harness::run_onto(&cfg, &e)?;
                    r.anomalies.extend(e.report.anomalies);
                    to_json(&r)
                }
            }
        }
        Command::Report(ReportCmd::Render { input }) => return Ok(Output::Text(report::render(&parse_json(&input)?)?)),
    }))
}

fn parse_cases(text: &str) -> Result<Vec<(FieldSpec, usize)>> {
    text.split(',')
        .map(|c| {
            let bad = || Error::Parse { what: "case", input: c.to_string() };
            let (f, n) = c.trim().rsplit_once('/').ok_or_else(bad)?;
            Ok((f.parse()?, n.parse().map_err(|_| bad())?))
        })
        .collect()
}

fn build(ctx: &Ctx, b: BuildCmd) -> Result<MatEndo> {
    let field = ctx.field();
    match b {
        BuildCmd::U { p, q } => MatEndo::build_u(&matrix_arg(field, &p)?, &matrix_arg(field, &q)?),
        BuildCmd::V { p, q } => MatEndo::build_v(&matrix_arg(field, &p)?, &matrix_arg(field, &q)?),
        BuildCmd::Pinch { subspace, preset, poly, a, x, twisted } => {
            let v = match (subspace, preset) {
                (Some(s), None) => {
                    let v: MatrixSubspace = load(&s, "subspace")?;
                    ctx.check_field(v.field())?;
                    v
                }
                (None, Some(name)) => {
                    let preset = Preset::parse(&name, field, poly.as_deref())?;
                    DivisionAlgebraSpec::preset(&preset, field, &ctx.budget())?.to_subspace()?
                }
                _ => return Err(Error::Precondition("pinch needs --subspace or --preset".into())),
            };
            let a = match a {
                Some(a) => matrix_arg(v.field(), &a)?,
                None => Matrix::identity(v.field(), v.n()),
            };
            MatEndo::build_pinch(&v, &a, &matrix_arg(v.field(), &x)?, twisted)
        }
    }
}

fn subspace(ctx: &Ctx, s: SubspaceCmd, budget: &Budget) -> Result<Value> {
    let load_checked = |arg: &str| -> Result<MatrixSubspace> {
        let v: MatrixSubspace = load(arg, "subspace")?;
        ctx.check_field(v.field())?;
        Ok(v)
    };
    Ok(match s {
        SubspaceCmd::MakeLd { x } => to_json(&MatrixSubspace::make_ld(&matrix_arg(ctx.field(), &x)?)?),
        SubspaceCmd::MakeLh { y } => to_json(&MatrixSubspace::make_lh(&matrix_arg(ctx.field(), &y)?)?),
        SubspaceCmd::Classify { input } => report::maximal_singular(&load_checked(&input)?.classify_maximal_singular()?),
        SubspaceCmd::IsSingular { input } => report::singularity(&load_checked(&input)?.is_singular(budget)?),
        SubspaceCmd::IsNonsingular { input } => report::full_nonsingular(&load_checked(&input)?.is_full_nonsingular(budget)?),
    })
}

fn algebra(ctx: &Ctx, a: AlgebraCmd, budget: &Budget) -> Result<Value> {
    let load_alg = |arg: &str| -> Result<DivisionAlgebraSpec> {
        let alg: DivisionAlgebraSpec = load(arg, "algebra")?;
        ctx.check_field(alg.field())?;
        Ok(alg)
    };
    Ok(match a {
        AlgebraCmd::Preset { name, poly } => {
            let field = ctx.field();
            to_json(&DivisionAlgebraSpec::preset(&Preset::parse(&name, field, poly.as_deref())?, field, budget)?)
        }
        AlgebraCmd::FromSubspace { input } => {
            let v: MatrixSubspace = load(&input, "subspace")?;
            ctx.check_field(v.field())?;
            to_json(&DivisionAlgebraSpec::from_subspace(&v)?)
        }
        AlgebraCmd::ToSubspace { input } => to_json(&load_alg(&input)?.to_subspace()?),
        AlgebraCmd::IsDivision { input } => report::division(&load_alg(&input)?.is_division(budget)?),
    })
}

fn has_anomalies(v: &Value) -> bool {
    v.get("anomalies").and_then(Value::as_array).is_some_and(|a| !a.is_empty())
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn fail(json_errors: bool, kind: &str, message: &str) -> ExitCode {
    if json_errors {
        println!("{}", json!({"error": {"kind": kind, "message": message}}));
    } else {
        eprintln!("error: {message}");
    }
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let json_errors = std::env::args().any(|a| a == "--json-errors");
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) if json_errors => return fail(true, "Usage", e.to_string().trim()),
        Err(e) => e.exit(),
    };
    let ctx = Ctx { global: cli.global };
    let result = run(&ctx, cli.command).and_then(|output| {
        let (text, anomalous) = match output {
            Output::Json(v) => (format!("{}\n", serde_json::to_string_pretty(&v).unwrap_or_default()), has_anomalies(&v)),
            Output::Text(t) => (t, false),
        };
        emit(&ctx.global.out, &text)?;
        Ok(anomalous)
    });
    match result {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(1),
        Err(e) => {
            if ctx.global.json_errors {
                println!("{}", report::error(&e));
                ExitCode::from(2)
            } else {
                fail(false, e.kind(), &e.to_string())
            }
        }
    }
}
