use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context as _, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use parahecke::arith::as_q_power;
use parahecke::padic::{parse_diag, PadicError};
use parahecke::verify::{ParamSpec, VerifyError};
use parahecke::{
    CheckId, CoeffRing, GroupConfig, HeckeError, HmgAlgebra, HmgError, LeviError, LeviSubset, OracleConfig,
    RootDatumSpec, Setting, SuiteConfig, TestElement, UnipotentRep, WeylElt,
};
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(
    name = "parahecke",
    version,
    about = "Iwahori-Weyl groups, parabolic Hecke algebras and a p-adic index oracle"
)]
struct Cli {
    /// Emit machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for sampled checks; overrides the seeds in the suite file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; affects wall time only.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct GroupArgs {
    /// Group type such as gl3, sl3, pgl2 or sp4.
    #[arg(long = "type")]
    group: Option<String>,
    /// TOML file with `[root_datum]` and `[params]` tables.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Residue characteristic.
    #[arg(long)]
    p: Option<u64>,
    /// Parameters are q = p^e.
    #[arg(long)]
    e: Option<u32>,
}

impl GroupArgs {
    fn resolve(&self) -> Result<GroupConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                GroupConfig::from_toml(&text)?
            }
            None => GroupConfig { root_datum: RootDatumSpec::Gl { n: 3 }, params: ParamSpec::default() },
        };
        if let Some(g) = &self.group {
            cfg.root_datum = RootDatumSpec::from_short(g)?;
        }
        if let Some(p) = self.p {
            cfg.params.p = p;
        }
        if let Some(e) = self.e {
            cfg.params.e = e;
        }
        Ok(cfg)
    }

    fn setting(&self) -> Result<Arc<Setting>> {
        Ok(self.resolve()?.setting()?)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Roots, coroots, Cartan matrix and the finite Weyl group order.
    Describe {
        #[command(flatten)]
        group: GroupArgs,
    },
    /// Length, reduced word and separating hyperplanes of an element.
    Elt {
        #[command(flatten)]
        group: GroupArgs,
        /// Levi whose affine Weyl group measures the length.
        #[arg(long, default_value = "full")]
        levi: String,
        /// Element as `(lambda=[..], sigma=s1s2)`.
        elt: String,
    },
    /// Product of two elements of the Iwahori-Hecke algebra of a Levi.
    HeckeMul {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long, default_value = "full")]
        levi: String,
        /// Work modulo this integer instead of over Z[1/p].
        #[arg(long)]
        modulus: Option<u64>,
        a: String,
        b: String,
    },
    /// The index function of the unipotent radical at an element.
    Mu {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        levi: String,
        #[arg(long, default_value = "full")]
        outer: String,
        /// Translation part as comma-separated integers.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "elt")]
        lambda: Option<String>,
        #[arg(long)]
        elt: Option<String>,
    },
    /// Computations in the algebras H(M,G).
    Hmg {
        #[command(subcommand)]
        op: HmgOp,
    },
    /// p-adic enumeration of indices in GL(n).
    Oracle(OracleArgs),
    /// The verification suite.
    Check {
        #[command(subcommand)]
        op: CheckOp,
    },
}

#[derive(Args, Debug, Clone)]
struct HmgArgs {
    #[command(flatten)]
    group: GroupArgs,
    #[arg(long)]
    m: String,
    #[arg(long, default_value = "full")]
    g: String,
}

#[derive(Subcommand, Debug)]
enum HmgOp {
    /// Product of two elements given in the τ basis.
    TauMul {
        #[command(flatten)]
        alg: HmgArgs,
        a: String,
        b: String,
    },
    /// Image in H(M,L) for M ⊆ L ⊆ G.
    Theta {
        #[command(flatten)]
        alg: HmgArgs,
        #[arg(long)]
        l: String,
        x: String,
    },
    /// Image in H(L,G) for M ⊆ L ⊆ G.
    Xi {
        #[command(flatten)]
        alg: HmgArgs,
        #[arg(long)]
        l: String,
        /// Multiple of the central direction used.
        #[arg(long, default_value_t = 1)]
        scale: i64,
        /// Extra shift beyond the minimal one.
        #[arg(long, default_value_t = 0)]
        extra: u64,
        x: String,
    },
    /// Filtration level and the image modulo q.
    Filtration {
        #[command(flatten)]
        alg: HmgArgs,
        x: String,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum OracleKind {
    /// Index of Γ_(g) in Γ_U.
    Mu,
    /// Index ν of the projected stabilizer.
    Nu,
    /// The double-coset product identity.
    Dc,
    /// Enumeration against the product formula at a diagonal element.
    Cross,
}

#[derive(Args, Debug)]
struct OracleArgs {
    kind: OracleKind,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    p: u64,
    /// Diagonal part, e.g. `diag(p^1,p^-1,1)` or `1,-1,0` for `cross`.
    #[arg(long, allow_hyphen_values = true)]
    diag: String,
    /// Unipotent entries, e.g. `u12=1/p,u13=3/p^2`.
    #[arg(long, default_value = "")]
    unipotent: String,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    r: Option<u32>,
    /// Block sizes of the Levi, e.g. `2,1`; Borel when absent.
    #[arg(long)]
    blocks: Option<String>,
}

#[derive(Subcommand, Debug)]
enum CheckOp {
    /// Runs a suite file and prints one record per check.
    Run {
        #[arg(long)]
        suite: PathBuf,
        /// Restrict to these check ids.
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
        /// Keep wall-clock timings in JSON records.
        #[arg(long)]
        timing: bool,
    },
    /// Lists the registry.
    List,
}

fn levi(setting: &Setting, s: &str) -> Result<LeviSubset> {
    Ok(LeviSubset::parse(setting.rd(), s)?)
}

fn elt(setting: &Setting, s: &str) -> Result<WeylElt> {
    Ok(setting.rd().parse_elt(s)?)
}

fn ints(s: &str) -> Result<Vec<i64>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse::<i64>().map_err(|_| anyhow!(UsageError(format!("not an integer: '{t}'")))))
        .collect()
}

#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Debug)]
struct CheckFailure(usize);

impl std::fmt::Display for CheckFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} check(s) failed", self.0)
    }
}

impl std::error::Error for CheckFailure {}

fn describe(group: &GroupArgs) -> Result<Value> {
    let cfg = group.resolve()?;
    let setting = cfg.setting()?;
    let rd = setting.rd();
    let geom = setting.geometry(setting.full());
    let positive: Vec<Value> = (0..rd.roots().len())
        .filter(|&i| rd.is_positive(i))
        .map(|i| json!({ "root": rd.root(i), "coroot": rd.coroot(i), "height": rd.height(i) }))
        .collect();
    Ok(json!({
        "group": cfg.root_datum.short_name(),
        "rank": rd.rank(),
        "semisimple_rank": rd.semisimple_rank(),
        "simple_roots": rd.simple_roots(),
        "simple_coroots": rd.simple_coroots(),
        "cartan": rd.cartan(),
        "positive_roots": positive,
        "w0_order": rd.w0().order(),
        "walls": geom.walls().iter().map(|w| w.label.clone()).collect::<Vec<_>>(),
        "q": format!("{}^{}", cfg.params.p, cfg.params.e),
    }))
}

fn describe_elt(group: &GroupArgs, levi_s: &str, s: &str) -> Result<Value> {
    let setting = group.setting()?;
    let rd = setting.rd();
    let params = setting.params();
    let j = levi(&setting, levi_s)?;
    let geom = setting.geometry(j);
    let w = elt(&setting, s)?;
    geom.check_contains(&w)?;
    let (word, omega) = geom.reduced_word(&w);
    let hyperplanes: Vec<String> = geom.separating_hyperplanes(&w).iter().map(|h| rd.format_affine_root(h)).collect();
    Ok(json!({
        "elt": rd.format_elt(&w),
        "levi": j.label(),
        "length": geom.length(&w),
        "q_w": as_q_power(geom.q_w(params, &w).exp as i64, params.e),
        "reduced_word": geom.format_word(&word, &omega),
        "omega": rd.format_elt(&omega),
        "inverse": rd.format_elt(&rd.inv(&w)),
        "separating_hyperplanes": hyperplanes,
    }))
}

fn hecke_mul(group: &GroupArgs, levi_s: &str, modulus: Option<u64>, a: &str, b: &str) -> Result<Value> {
    let setting = group.setting()?;
    let j = levi(&setting, levi_s)?;
    let ring = match modulus {
        Some(n) => CoeffRing::Modular { n },
        None => CoeffRing::QLocal { p: setting.params().p },
    };
    let h = setting.hecke(j, ring);
    let (x, y) = (h.parse_elt(a)?, h.parse_elt(b)?);
    let prod = x.mul(&y)?;
    Ok(json!({ "levi": j.label(), "a": x.to_string(), "b": y.to_string(), "product": prod.to_string() }))
}

fn mu(group: &GroupArgs, levi_s: &str, outer: &str, lambda: Option<&str>, elt_s: Option<&str>) -> Result<Value> {
    let setting = group.setting()?;
    let rd = setting.rd();
    let params = setting.params();
    let (m, g) = (levi(&setting, levi_s)?, levi(&setting, outer)?);
    let w = match (lambda, elt_s) {
        (Some(l), None) => rd.translation(&ints(l)?)?,
        (None, Some(s)) => elt(&setting, s)?,
        _ => bail!(UsageError("give exactly one of --lambda and --elt".into())),
    };
    let ld = setting.levi_datum(m, g)?;
    let e = params.e;
    let mu = ld.mu(params, &w)?;
    let mu_op = ld.mu_op(params, &w)?;
    let delta = ld.delta(params, &w)?;
    Ok(json!({
        "elt": rd.format_elt(&w),
        "levi": m.label(),
        "outer": g.label(),
        "mu": as_q_power(mu.exp as i64, e),
        "mu_value": mu.to_string(),
        "mu_op": as_q_power(mu_op.exp as i64, e),
        "delta": as_q_power(delta.exp, e),
        "positive": ld.is_positive(params, &w)?,
        "negative": ld.is_negative(params, &w)?,
    }))
}

fn hmg_alg(args: &HmgArgs) -> Result<Arc<HmgAlgebra>> {
    let setting = args.group.setting()?;
    let (m, g) = (levi(&setting, &args.m)?, levi(&setting, &args.g)?);
    let ring = CoeffRing::QLocal { p: setting.params().p };
    Ok(HmgAlgebra::new(setting, m, g, ring)?)
}

fn hmg(op: &HmgOp) -> Result<Value> {
    match op {
        HmgOp::TauMul { alg, a, b } => {
            let alg = hmg_alg(alg)?;
            let (x, y) = (alg.parse_elt(a)?, alg.parse_elt(b)?);
            Ok(
                json!({ "algebra": alg.label(), "a": x.to_string(), "b": y.to_string(), "product": x.mul(&y)?.to_string() }),
            )
        }
        HmgOp::Theta { alg, l, x } => {
            let alg = hmg_alg(alg)?;
            let l = levi(alg.setting(), l)?;
            let x = alg.parse_elt(x)?;
            Ok(json!({ "algebra": alg.label(), "l": l.label(), "x": x.to_string(), "theta": x.theta(l)?.to_string() }))
        }
        HmgOp::Xi { alg, l, scale, extra, x } => {
            let alg = hmg_alg(alg)?;
            let l = levi(alg.setting(), l)?;
            let x = alg.parse_elt(x)?;
            let img = x.xi_with(l, *scale, *extra)?;
            Ok(json!({ "algebra": alg.label(), "l": l.label(), "x": x.to_string(), "xi": img.to_string() }))
        }
        HmgOp::Filtration { alg, x } => {
            let alg = hmg_alg(alg)?;
            let params = alg.setting().params().clone();
            let x = alg.parse_elt(x)?;
            let level = x.filtration_level()?;
            let q: u64 =
                params.q().value().try_into().map_err(|_| anyhow!(UsageError("q does not fit in 64 bits".into())))?;
            let modq = alg.with_ring(CoeffRing::Modular { n: q })?;
            let mut terms = Vec::new();
            for (w, c) in x.terms() {
                let (num, den) = c.parts();
                if den != 0 {
                    bail!(UsageError(format!("coefficient of {} is not integral", alg.setting().rd().format_elt(w))));
                }
                terms.push((*w, modq.ring().from_int(&num)));
            }
            let reduced = modq.from_terms(terms)?;
            Ok(json!({
                "algebra": alg.label(),
                "x": x.to_string(),
                "level": level,
                "image_mod_q": reduced.to_hm()?.to_string(),
            }))
        }
    }
}

fn oracle(args: &OracleArgs) -> Result<Value> {
    let blocks = match &args.blocks {
        Some(b) => ints(b)?.into_iter().map(|x| x as usize).collect(),
        None => vec![1; args.n],
    };
    let cfg = OracleConfig { n: args.n, p: args.p, k: args.k, r: args.r, blocks };
    cfg.validate()?;
    if args.kind == OracleKind::Cross {
        let c = parahecke::padic::cross_check_mu(&cfg, &ints(&args.diag)?)?;
        return Ok(serde_json::to_value(c)?);
    }
    let diag = parse_diag(&args.diag)?;
    let unipotent = UnipotentRep::parse(args.n, &args.unipotent)?;
    let elt = TestElement { diag, unipotent };
    Ok(match args.kind {
        OracleKind::Mu => serde_json::to_value(parahecke::padic::mu_oracle(&cfg, &elt)?)?,
        OracleKind::Nu => json!({ "nu": parahecke::padic::nu_oracle(&cfg, &elt)? }),
        OracleKind::Dc => serde_json::to_value(parahecke::padic::double_coset_oracle(&cfg, &elt)?)?,
        OracleKind::Cross => unreachable!(),
    })
}

fn check_run(cli: &Cli, suite: &PathBuf, only: &[String], timing: bool) -> Result<()> {
    let text = std::fs::read_to_string(suite).with_context(|| format!("reading {}", suite.display()))?;
    let mut cfg = SuiteConfig::from_toml(&text)?;
    if !only.is_empty() {
        let ids: Vec<CheckId> = only.iter().map(|s| CheckId::parse(s)).collect::<Result<_, _>>()?;
        cfg.check.retain(|c| ids.contains(&c.id));
    }
    if let Some(seed) = cli.seed {
        cfg.reseed(seed);
    }
    let reports = parahecke::run_suite(&cfg)?;
    for r in &reports {
        if cli.json {
            println!("{}", r.to_json(timing));
        } else {
            println!("{}", r.summary());
        }
    }
    let failed = reports.iter().filter(|r| !r.pass).count();
    if !cli.json {
        println!("{} of {} checks passed", reports.len() - failed, reports.len());
    }
    if failed > 0 {
        return Err(CheckFailure(failed).into());
    }
    Ok(())
}

fn render(v: &Value, indent: usize, out: &mut String) {
    let pad = " ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                match x {
                    Value::Object(_) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render(x, indent + 2, out);
                    }
                    Value::Array(items) if items.iter().any(|i| i.is_object()) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        for i in items {
                            out.push_str(&format!("{pad}  - {}\n", scalar(i)));
                        }
                    }
                    _ => out.push_str(&format!("{pad}{k}: {}\n", scalar(x))),
                }
            }
        }
        _ => out.push_str(&format!("{pad}{}\n", scalar(v))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(items) => format!("[{}]", items.iter().map(scalar).collect::<Vec<_>>().join(", ")),
        Value::Object(map) => map.iter().map(|(k, x)| format!("{k}={}", scalar(x))).collect::<Vec<_>>().join(" "),
        other => other.to_string(),
    }
}

fn emit(json: bool, v: &Value) {
    if json {
        println!("{v}");
    } else {
        let mut s = String::new();
        render(v, 0, &mut s);
        print!("{s}");
    }
}

fn run(cli: &Cli) -> Result<()> {
    let out = match &cli.command {
        Command::Describe { group } => describe(group)?,
        Command::Elt { group, levi, elt } => describe_elt(group, levi, elt)?,
        Command::HeckeMul { group, levi, modulus, a, b } => hecke_mul(group, levi, *modulus, a, b)?,
        Command::Mu { group, levi, outer, lambda, elt } => mu(group, levi, outer, lambda.as_deref(), elt.as_deref())?,
        Command::Hmg { op } => hmg(op)?,
        Command::Oracle(args) => oracle(args)?,
        Command::Check { op: CheckOp::Run { suite, only, timing } } => return check_run(cli, suite, only, *timing),
        Command::Check { op: CheckOp::List } => {
            json!({ "checks": CheckId::ALL.iter().map(|c| c.name()).collect::<Vec<_>>() })
        }
    };
    emit(cli.json, &out);
    Ok(())
}

/// Exit status for an error: 1 for failed checks or undecidable
/// computations, 3 for violated internal invariants, 2 otherwise.
fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<CheckFailure>() {
            return 1;
        }
        if let Some(e) = cause.downcast_ref::<HeckeError>() {
            return match e {
                HeckeError::Invariant(_) | HeckeError::NotIntegral(_) => 3,
                _ => 2,
            };
        }
        if let Some(e) = cause.downcast_ref::<HmgError>() {
            return match e {
                HmgError::NotIntegral(_) | HmgError::ChoiceDependent(_) | HmgError::Scalar(_) => 3,
                HmgError::Hecke(HeckeError::Invariant(_)) | HmgError::Levi(LeviError::Validation(_)) => 3,
                _ => 2,
            };
        }
        if let Some(e) = cause.downcast_ref::<LeviError>() {
            return if matches!(e, LeviError::Validation(_)) { 3 } else { 2 };
        }
        if let Some(e) = cause.downcast_ref::<PadicError>() {
            return match e {
                PadicError::Identity(_) => 3,
                PadicError::Undecidable(_) | PadicError::NotInvertible(_) => 1,
                _ => 2,
            };
        }
        if cause.is::<VerifyError>() || cause.is::<UsageError>() {
            return 2;
        }
    }
    2
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = exit_code(&e);
            eprintln!("error: {e:#}");
            if code == 3 {
                let argv: Vec<String> = std::env::args().collect();
                eprintln!("{}", json!({ "replay": argv, "seed": cli.seed }));
            }
            ExitCode::from(code)
        }
    }
}
