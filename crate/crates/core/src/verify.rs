//! Named, seeded identity checks with JSON-lines reports.
//!
//! Each check enumerates a finite domain exhaustively where one is configured
//! and then draws seeded samples. Sample indices are drawn sequentially from
//! one generator and evaluated in parallel; outcomes are folded in input order,
//! so reports do not depend on the thread count.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;
use std::time::Instant;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hecke::{CoeffRing, HeckeAlgebra, HeckeElt};
use crate::hmg::{alcove_scalar_holds, cor_xi_holds, localization_holds, HmgAlgebra, HmgError, TauElt};
use crate::levi::LeviDatum;
use crate::padic::{
    cross_check_mu, double_coset_oracle, mu_oracle, nu_oracle, OracleConfig, PadicError, TestElement, UnipotentRep,
};
use crate::rootdata::{LeviSubset, RootDatum, RootDatumSpec, MAX_RANK};
use crate::setting::Setting;
use crate::weyl::{ParamMap, WeylElt};

/// Version of the report record layout.
pub const SCHEMA: u32 = 1;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("invalid check specification: {0}")]
    Spec(String),
    #[error("cannot parse configuration: {0}")]
    Parse(String),
}

fn spec_err(e: impl fmt::Display) -> VerifyError {
    VerifyError::Spec(e.to_string())
}

/// The fixed check registry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CheckId {
    MuPropA,
    MuMonotone,
    MuOpposite,
    MuChain,
    CorMu,
    DeltaAff,
    Abe1,
    Abe2,
    FundLemma,
    BraidTau,
    ThetaHom,
    ThetaTrans,
    XiTriangular,
    XiUnique,
    XiSquare,
    XiComp,
    Localization,
    AlcoveScalar,
    Filtration,
    CorXi,
    OracleMu,
    OracleNu,
    OracleDc,
    OracleIneq,
    Assoc,
}

impl CheckId {
    pub const ALL: [CheckId; 25] = [
        CheckId::MuPropA,
        CheckId::MuMonotone,
        CheckId::MuOpposite,
        CheckId::MuChain,
        CheckId::CorMu,
        CheckId::DeltaAff,
        CheckId::Abe1,
        CheckId::Abe2,
        CheckId::FundLemma,
        CheckId::BraidTau,
        CheckId::ThetaHom,
        CheckId::ThetaTrans,
        CheckId::XiTriangular,
        CheckId::XiUnique,
        CheckId::XiSquare,
        CheckId::XiComp,
        CheckId::Localization,
        CheckId::AlcoveScalar,
        CheckId::Filtration,
        CheckId::CorXi,
        CheckId::OracleMu,
        CheckId::OracleNu,
        CheckId::OracleDc,
        CheckId::OracleIneq,
        CheckId::Assoc,
    ];

    pub fn name(&self) -> String {
        serde_json::to_value(self).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
    }

    pub fn parse(s: &str) -> Result<CheckId, VerifyError> {
        serde_json::from_value(serde_json::Value::String(s.trim().to_ascii_uppercase()))
            .map_err(|_| VerifyError::Spec(format!("unknown check id '{s}'")))
    }
}

impl fmt::Display for CheckId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

/// A parameter override `q(α, k) = q` on the orbit of `(α, k)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OverrideSpec {
    pub alpha: Vec<i64>,
    pub k: i64,
    pub q: u64,
}

/// `q = p^e`, optionally with per-orbit overrides.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamSpec {
    #[serde(default = "default_p")]
    pub p: u64,
    #[serde(default = "default_e")]
    pub e: u32,
    #[serde(default)]
    pub overrides: Vec<OverrideSpec>,
}

fn default_p() -> u64 {
    3
}

fn default_e() -> u32 {
    1
}

impl Default for ParamSpec {
    fn default() -> Self {
        ParamSpec { p: default_p(), e: default_e(), overrides: Vec::new() }
    }
}

impl ParamSpec {
    pub fn build(&self, rd: &RootDatum) -> Result<ParamMap, VerifyError> {
        let mut pm = ParamMap::equal(self.p, self.e).map_err(spec_err)?;
        for o in &self.overrides {
            pm = pm.with_override(rd, &o.alpha, o.k, o.q).map_err(spec_err)?;
        }
        if !self.overrides.is_empty() {
            pm.validate(rd, 200, 0).map_err(spec_err)?;
        }
        Ok(pm)
    }
}

/// Parameters of the enumeration oracle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSpec {
    #[serde(default = "default_primes")]
    pub primes: Vec<u64>,
    pub k: Option<u32>,
    pub r: Option<u32>,
    pub blocks: Option<Vec<usize>>,
    /// Range of diagonal exponents (and of `m, n` in the `GL_3` sweep).
    #[serde(default = "default_range")]
    pub range: [i64; 2],
    /// Largest denominator exponent in random unipotent entries.
    #[serde(default = "default_den")]
    pub max_den: u32,
}

fn default_primes() -> Vec<u64> {
    vec![2]
}

fn default_range() -> [i64; 2] {
    [-2, 2]
}

fn default_den() -> u32 {
    1
}

impl Default for OracleSpec {
    fn default() -> Self {
        OracleSpec {
            primes: default_primes(),
            k: None,
            r: None,
            blocks: None,
            range: default_range(),
            max_den: default_den(),
        }
    }
}

/// One configured check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckSpec {
    pub id: CheckId,
    #[serde(default)]
    pub case: String,
    #[serde(default = "default_datum")]
    pub root_datum: RootDatumSpec,
    #[serde(default)]
    pub params: ParamSpec,
    /// Levis from smallest to largest, e.g. `["t", "a1", "full"]`.
    #[serde(default = "default_chain")]
    pub levi_chain: Vec<String>,
    /// Bound on `ℓ` for the exhaustive domain.
    #[serde(default = "default_len")]
    pub length_bound: usize,
    /// Optional bound on `ℓ_M` for the exhaustive domain.
    pub m_length_bound: Option<usize>,
    /// Bound on `ℓ` for sampled elements; defaults to `length_bound`.
    pub sample_length: Option<usize>,
    /// Powers `[lo, hi]` of the `Ω` generator forming the window.
    #[serde(default = "default_omega")]
    pub omega: [i64; 2],
    #[serde(default)]
    pub exhaustive: bool,
    #[serde(default)]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
    pub oracle: Option<OracleSpec>,
}

fn default_datum() -> RootDatumSpec {
    RootDatumSpec::Gl { n: 3 }
}

fn default_chain() -> Vec<String> {
    vec!["t".into(), "full".into()]
}

fn default_len() -> usize {
    4
}

fn default_omega() -> [i64; 2] {
    [-1, 1]
}

impl CheckSpec {
    pub fn new(id: CheckId) -> CheckSpec {
        CheckSpec {
            id,
            case: String::new(),
            root_datum: default_datum(),
            params: ParamSpec::default(),
            levi_chain: default_chain(),
            length_bound: default_len(),
            m_length_bound: None,
            sample_length: None,
            omega: default_omega(),
            exhaustive: false,
            samples: 0,
            seed: 0,
            oracle: None,
        }
    }
}

/// A suite file: a list of `[[check]]` tables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    #[serde(default = "default_schema")]
    pub schema: u32,
    #[serde(default)]
    pub check: Vec<CheckSpec>,
}

fn default_schema() -> u32 {
    SCHEMA
}

impl SuiteConfig {
    pub fn from_toml(text: &str) -> Result<SuiteConfig, VerifyError> {
        let cfg: SuiteConfig = toml::from_str(text).map_err(|e| VerifyError::Parse(e.to_string()))?;
        if cfg.schema != SCHEMA {
            return Err(VerifyError::Parse(format!("unsupported schema {}", cfg.schema)));
        }
        for c in &cfg.check {
            Context::new(c)?;
        }
        Ok(cfg)
    }

    /// Replaces every seed by `seed` mixed with the check's position.
    pub fn reseed(&mut self, seed: u64) {
        for (i, c) in self.check.iter_mut().enumerate() {
            c.seed = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(i as u64);
        }
    }
}

/// Root datum and parameters for single-shot commands.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupConfig {
    #[serde(default = "default_datum")]
    pub root_datum: RootDatumSpec,
    #[serde(default)]
    pub params: ParamSpec,
}

impl GroupConfig {
    pub fn from_toml(text: &str) -> Result<GroupConfig, VerifyError> {
        toml::from_str(text).map_err(|e| VerifyError::Parse(e.to_string()))
    }

    /// The root datum with its parameters, validated.
    pub fn setting(&self) -> Result<Arc<Setting>, VerifyError> {
        let rd = Arc::new(RootDatum::build(&self.root_datum).map_err(spec_err)?);
        let params = self.params.build(&rd)?;
        Ok(Setting::new(rd, params))
    }
}

/// Inputs that broke an identity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub item: u64,
    pub detail: String,
}

/// Result of one check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub schema: u32,
    pub check_id: CheckId,
    pub case: String,
    pub pass: bool,
    pub mode: String,
    pub exhaustive: u64,
    pub sampled: u64,
    /// Items whose hypothesis held; the rest were vacuous.
    pub premise: u64,
    pub failures: u64,
    pub counterexample: Option<Counterexample>,
    pub seed: u64,
    pub stats: BTreeMap<String, String>,
    pub wall_ms: u64,
}

impl CheckReport {
    /// JSON record; the timing field is zeroed unless requested.
    pub fn to_json(&self, timing: bool) -> String {
        let mut r = self.clone();
        if !timing {
            r.wall_ms = 0;
        }
        serde_json::to_string(&r).expect("reports serialize")
    }

    pub fn summary(&self) -> String {
        let mut s = format!(
            "{} {} [{}] {}: {} exhaustive, {} sampled, {} with premise, {} failures",
            if self.pass { "PASS" } else { "FAIL" },
            self.check_id,
            self.case,
            self.mode,
            self.exhaustive,
            self.sampled,
            self.premise,
            self.failures
        );
        for (k, v) in &self.stats {
            s.push_str(&format!(", {k}={v}"));
        }
        if let Some(c) = &self.counterexample {
            s.push_str(&format!("; first counterexample (item {}): {}", c.item, c.detail));
        }
        s
    }
}

/// Outcome of one item of a check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    /// The hypothesis did not hold; nothing to test.
    Vacuous,
    Fail(String),
}

impl Outcome {
    fn check(ok: bool, detail: impl FnOnce() -> String) -> Outcome {
        if ok {
            Outcome::Pass
        } else {
            Outcome::Fail(detail())
        }
    }

    fn from_result(r: Result<bool, HmgError>, detail: impl FnOnce() -> String) -> Outcome {
        match r {
            Ok(true) => Outcome::Pass,
            Ok(false) => Outcome::Fail(detail()),
            Err(e) => Outcome::Fail(format!("{}: {e}", detail())),
        }
    }
}

#[derive(Debug, Default)]
struct Tally {
    exhaustive: u64,
    sampled: u64,
    premise: u64,
    failures: u64,
    first: Option<Counterexample>,
    stats: BTreeMap<String, String>,
}

impl Tally {
    fn absorb(&mut self, outcomes: Vec<Outcome>, sampled: bool) {
        let offset = self.exhaustive + self.sampled;
        for (i, o) in outcomes.into_iter().enumerate() {
            if sampled {
                self.sampled += 1;
            } else {
                self.exhaustive += 1;
            }
            match o {
                Outcome::Pass => self.premise += 1,
                Outcome::Vacuous => {}
                Outcome::Fail(d) => {
                    self.premise += 1;
                    self.failures += 1;
                    if self.first.is_none() {
                        self.first = Some(Counterexample { item: offset + i as u64, detail: d });
                    }
                }
            }
        }
    }

    fn run<T: Sync>(&mut self, items: &[T], sampled: bool, f: impl Fn(&T) -> Outcome + Sync + Send) {
        let outcomes: Vec<Outcome> = items.par_iter().map(f).collect();
        self.absorb(outcomes, sampled);
    }

    fn stat(&mut self, k: &str, v: impl fmt::Display) {
        self.stats.insert(k.to_string(), v.to_string());
    }
}

/// Everything a Weyl-level check needs, built once per check.
pub struct Context {
    pub spec: CheckSpec,
    pub setting: Arc<Setting>,
    pub chain: Vec<LeviSubset>,
    window: Vec<WeylElt>,
}

impl Context {
    pub fn new(spec: &CheckSpec) -> Result<Context, VerifyError> {
        let rd = Arc::new(RootDatum::build(&spec.root_datum).map_err(spec_err)?);
        let params = spec.params.build(&rd)?;
        let mut chain = Vec::new();
        for label in &spec.levi_chain {
            chain.push(LeviSubset::parse(&rd, label).map_err(spec_err)?);
        }
        if chain.is_empty() {
            return Err(VerifyError::Spec("empty Levi chain".into()));
        }
        for pair in chain.windows(2) {
            if !pair[0].is_subset(&pair[1]) || pair[0] == pair[1] {
                return Err(VerifyError::Spec(format!("Levi chain {:?} is not strictly increasing", spec.levi_chain)));
            }
        }
        if spec.omega[0] > spec.omega[1] {
            return Err(VerifyError::Spec("empty Ω window".into()));
        }
        if let Some(o) = &spec.oracle {
            if o.range[0] > o.range[1] || o.primes.is_empty() {
                return Err(VerifyError::Spec("empty oracle range".into()));
            }
        }
        let setting = Setting::new(rd.clone(), params);
        let full = setting.geometry(rd.full_levi());
        let mut e1 = [0i64; MAX_RANK];
        e1[0] = 1;
        let window = full.omega_window(&e1, spec.omega[0]..=spec.omega[1]);
        Ok(Context { spec: spec.clone(), setting, chain, window })
    }

    pub fn rd(&self) -> &Arc<RootDatum> {
        self.setting.rd()
    }

    pub fn params(&self) -> &ParamMap {
        self.setting.params()
    }

    pub fn top(&self) -> LeviSubset {
        *self.chain.last().expect("chain is nonempty")
    }

    pub fn bottom(&self) -> LeviSubset {
        self.chain[0]
    }

    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.spec.seed ^ salt.wrapping_mul(0xA24B_AED4_963E_E407))
    }

    /// `w ∈ W_M` with `ℓ(w) ≤ bound` (length in the top group) and `Ω` part
    /// in the window, optionally with `ℓ_M(w) ≤ m_bound`.
    pub fn ball(&self, m: LeviSubset, bound: usize, m_bound: Option<usize>) -> Result<Vec<WeylElt>, VerifyError> {
        let top = self.setting.geometry(self.top());
        let gm = self.setting.geometry(m);
        let all = top.enumerate_ball(bound, &self.window).map_err(spec_err)?;
        Ok(all.into_iter().filter(|w| gm.contains(w) && m_bound.is_none_or(|b| gm.length(w) <= b)).collect())
    }

    fn exhaustive_domain(&self, m: LeviSubset) -> Result<Vec<WeylElt>, VerifyError> {
        if self.spec.exhaustive {
            self.ball(m, self.spec.length_bound, self.spec.m_length_bound)
        } else {
            Ok(Vec::new())
        }
    }

    fn sample_pool(&self, m: LeviSubset) -> Result<Vec<WeylElt>, VerifyError> {
        let pool = self.ball(m, self.spec.sample_length.unwrap_or(self.spec.length_bound), None)?;
        if pool.is_empty() {
            return Err(VerifyError::Spec(format!("no elements of W_{} to sample", m.label())));
        }
        Ok(pool)
    }

    fn sample<const N: usize>(&self, m: LeviSubset, salt: u64) -> Result<Vec<[WeylElt; N]>, VerifyError> {
        let pool = self.sample_pool(m)?;
        let mut rng = self.rng(salt);
        Ok((0..self.spec.samples).map(|_| std::array::from_fn(|_| pool[rng.random_range(0..pool.len())])).collect())
    }

    fn fmt(&self, w: &WeylElt) -> String {
        self.rd().format_elt(w)
    }

    fn levi_datum(&self, m: LeviSubset, g: LeviSubset) -> Result<LeviDatum, VerifyError> {
        self.setting.levi_datum(m, g).map_err(spec_err)
    }

    fn hmg(&self, m: LeviSubset, g: LeviSubset) -> Result<Arc<HmgAlgebra>, VerifyError> {
        HmgAlgebra::new(self.setting.clone(), m, g, CoeffRing::QLocal { p: self.params().p }).map_err(spec_err)
    }

    /// Proper sub-chains `M ⊊ … ` of length `k` drawn from the chain, in order.
    fn subchains(&self, k: usize) -> Vec<Vec<LeviSubset>> {
        fn go(c: &[LeviSubset], k: usize, start: usize, acc: &mut Vec<LeviSubset>, out: &mut Vec<Vec<LeviSubset>>) {
            if acc.len() == k {
                out.push(acc.clone());
                return;
            }
            for i in start..c.len() {
                acc.push(c[i]);
                go(c, k, i, acc, out);
                acc.pop();
            }
        }
        let mut out = Vec::new();
        go(&self.chain, k, 0, &mut Vec::new(), &mut out);
        out
    }
}

fn mode(spec: &CheckSpec, exhaustive: bool) -> String {
    match (exhaustive && spec.exhaustive, spec.samples > 0) {
        (true, true) => "exhaustive+sampled",
        (true, false) => "exhaustive",
        (false, _) => "sampled",
    }
    .to_string()
}

/// Runs one check. Only an invalid specification is an error; failed
/// identities are recorded in the report.
pub fn run_check(spec: &CheckSpec) -> Result<CheckReport, VerifyError> {
    let start = Instant::now();
    let mut t = Tally::default();
    let mut exhaustive = true;
    match spec.id {
        CheckId::OracleMu => oracle_mu(spec, &mut t)?,
        CheckId::OracleNu => oracle_nu(spec, &mut t)?,
        CheckId::OracleDc => oracle_dc(spec, &mut t)?,
        CheckId::OracleIneq => oracle_ineq(spec, &mut t)?,
        id => {
            let ctx = Context::new(spec)?;
            exhaustive = run_weyl_check(id, &ctx, &mut t)?;
        }
    }
    let is_oracle = matches!(spec.id, CheckId::OracleMu | CheckId::OracleNu | CheckId::OracleDc | CheckId::OracleIneq);
    let pass = t.failures == 0 && t.premise > 0;
    if t.premise == 0 {
        t.stat("note", "no item met the hypothesis");
    }
    Ok(CheckReport {
        schema: SCHEMA,
        check_id: spec.id,
        case: spec.case.clone(),
        pass,
        mode: if is_oracle { "enumeration".into() } else { mode(spec, exhaustive) },
        exhaustive: t.exhaustive,
        sampled: t.sampled,
        premise: t.premise,
        failures: t.failures,
        counterexample: t.first,
        seed: spec.seed,
        stats: t.stats,
        wall_ms: start.elapsed().as_millis() as u64,
    })
}

/// Runs every check of a suite, in parallel, keeping the configured order.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Vec<CheckReport>, VerifyError> {
    cfg.check.par_iter().map(run_check).collect()
}

/// Returns whether an exhaustive pass was part of the check.
fn run_weyl_check(id: CheckId, ctx: &Context, t: &mut Tally) -> Result<bool, VerifyError> {
    match id {
        CheckId::MuPropA => mu_prop_a(ctx, t),
        CheckId::MuMonotone => mu_monotone(ctx, t),
        CheckId::MuOpposite => mu_opposite(ctx, t),
        CheckId::MuChain => mu_chain(ctx, t),
        CheckId::CorMu => cor_mu(ctx, t),
        CheckId::DeltaAff => delta_aff(ctx, t),
        CheckId::Abe1 => abe1(ctx, t),
        CheckId::Abe2 => abe2(ctx, t),
        CheckId::FundLemma => fund_lemma(ctx, t),
        CheckId::BraidTau => braid_tau(ctx, t),
        CheckId::ThetaHom => theta_hom(ctx, t),
        CheckId::ThetaTrans => theta_trans(ctx, t),
        CheckId::XiTriangular => xi_triangular(ctx, t),
        CheckId::XiUnique => xi_unique(ctx, t),
        CheckId::XiSquare => xi_square(ctx, t),
        CheckId::XiComp => xi_comp(ctx, t),
        CheckId::Localization => localization(ctx, t),
        CheckId::AlcoveScalar => alcove_scalar(ctx, t),
        CheckId::Filtration => filtration(ctx, t),
        CheckId::CorXi => cor_xi(ctx, t),
        CheckId::Assoc => assoc(ctx, t),
        _ => unreachable!("oracle checks are dispatched separately"),
    }?;
    Ok(!matches!(
        id,
        CheckId::FundLemma
            | CheckId::BraidTau
            | CheckId::ThetaHom
            | CheckId::ThetaTrans
            | CheckId::XiTriangular
            | CheckId::XiUnique
            | CheckId::XiSquare
            | CheckId::XiComp
            | CheckId::Localization
            | CheckId::AlcoveScalar
            | CheckId::Filtration
            | CheckId::CorXi
            | CheckId::Assoc
    ) || ctx.spec.exhaustive)
}

/// Runs a single-element identity over the exhaustive domain and the samples
/// for every `M` of the chain below the top.
fn per_levi_single(
    ctx: &Context,
    t: &mut Tally,
    f: impl Fn(LeviSubset, &LeviDatum, &WeylElt) -> Outcome + Sync + Send,
) -> Result<(), VerifyError> {
    let top = ctx.top();
    for (i, &m) in ctx.chain[..ctx.chain.len() - 1].iter().enumerate() {
        let ld = ctx.levi_datum(m, top)?;
        let dom = ctx.exhaustive_domain(m)?;
        t.run(&dom, false, |w| f(m, &ld, w));
        let samples: Vec<[WeylElt; 1]> = ctx.sample(m, 1 + i as u64)?;
        t.run(&samples, true, |[w]| f(m, &ld, w));
    }
    Ok(())
}

/// Pairs: all ordered pairs of the exhaustive domain, then samples.
fn per_levi_pair(
    ctx: &Context,
    t: &mut Tally,
    f: impl Fn(LeviSubset, &LeviDatum, &WeylElt, &WeylElt) -> Outcome + Sync + Send,
) -> Result<(), VerifyError> {
    let top = ctx.top();
    for (i, &m) in ctx.chain[..ctx.chain.len() - 1].iter().enumerate() {
        let ld = ctx.levi_datum(m, top)?;
        let dom = ctx.exhaustive_domain(m)?;
        let pairs: Vec<(WeylElt, WeylElt)> = dom.iter().flat_map(|v| dom.iter().map(move |w| (*v, *w))).collect();
        t.run(&pairs, false, |(v, w)| f(m, &ld, v, w));
        let samples: Vec<[WeylElt; 2]> = ctx.sample(m, 100 + i as u64)?;
        t.run(&samples, true, |[v, w]| f(m, &ld, v, w));
    }
    Ok(())
}

fn mu_prop_a(ctx: &Context, t: &mut Tally) -> Result<(), VerifyError> {
    let params = ctx.params();
    let geom_g = ctx.setting.geometry(ctx.top());
    per_levi_single(ctx, t, |_, ld, w| {
        let wi = ctx.rd().inv(w);
        let lhs = geom_g.q_w(params, w).exp;
        let rhs = ld.mu(params, w).map(|a| a.exp).unwrap_or(u64::MAX)
            + ld.mu(params, &wi).map(|a| a.exp).unwrap_or(u64::MAX)
            + ld.q_m_w(params, w).exp;
        Outcome::check(lhs == rhs, || format!("w = {}: q_w = p^{lhs}, μμ'q_M = p^{rhs}", ctx.fmt(w)))
    })
}

fn mu_monotone(ctx: &Context, t: &mut Tally) -> Result<(), VerifyError> {
    let params = ctx.params();
    per_levi_pair(ctx, t, |m, ld, v, w| {
        let gm = ctx.setting.geometry(m);
        if v == w || !gm.bruhat_leq(v, w) {
            return Outcome::Vacuous;
        }
        let (a, b) = (ld.mu(params, v).unwrap().exp, ld.mu(params, w).unwrap().exp);
        Outcome::check(a <= b, || format!("v = {} ≤_M w = {} but μ(v) = p^{a}, μ(w) = p^{b}", ctx.fmt(v), ctx.fmt(w)))
    })
}

fn mu_opposite(ctx: &Context, t: &mut Tally) -> Result<(), VerifyError> {
    let params = ctx.params();
    per_levi_single(ctx, t, |_, ld, w| {
        let a = ld.mu_op(params, w).unwrap().exp;
        let b = ld.mu(params, &ctx.rd().inv(w)).unwrap().exp;
        Outcome::check(a == b, || format!("w = {}: μ_op(w) = p^{a}, μ(w^-1) = p^{b}", ctx.fmt(w)))
    })
}

fn mu_chain(ctx: &Context, t: &mut Tally) -> Result<(), VerifyError> {
    let params = ctx.params();
    let top = ctx.top();
    let mut triples = 0;
    for chain in ctx.subchains(3) {
        let (m, l) = (chain[0], chain[1]);
        if m == l || l == top || chain[2] != top {
            continue;
        }
        triples += 1;
        let mg = ctx.levi_datum(m, top)?;
        let ml = ctx.levi_datum(m, l)?;
        let lg = ctx.levi_datum(l, top)?;
        let f = |w: &WeylElt| {
            let a = mg.mu(params, w).unwrap().exp;
            let b = ml.mu(params, w).unwrap().exp;
            let c = lg.mu(params, w).unwrap().exp;
            Outcome::check(a == b + c, || {
                format!("{} ⊂ {}: w = {}: p^{a} vs p^{b}·p^{c}", m.label(), l.label(), ctx.fmt(w))
            })
        };
        let dom = ctx.exhaustive_domain(m)?;
        t.run(&dom, false, f);
        let samples: Vec<[WeylElt; 1]> = ctx.sample(m, 200)?;
        t.run(&samples, true, |[w]| f(w));
    }
    if triples == 0 {
        return Err(VerifyError::Spec("MU_CHAIN needs a chain M ⊊ L ⊊ G".into()));
    }
    Ok(())
}

fn cor_mu(ctx: &Context, t: &mut Tally) -> Result<(), VerifyError> {
    let params = ctx.params();
    let geom_g = ctx.setting.geometry(ctx.top());
    per_levi_pair(ctx, t, |_, ld, v, w| {
        let vw = ctx.rd().mul(v, w);
        let (a, b, c) = (ld.mu(params, v).unwrap().exp, ld.mu(params, w).unwrap().exp, ld.mu(params, &vw).unwrap().exp);
        let q = geom_g.q_vw(params, v, w).exp;
        let qm = ld.q_m_vw(params, v, w).exp;
        Outcome::check(c <= a + b && q + c == a + b + qm, || {
            format!("v = {}, w = {}: μ = (p^{a}, p^{b}, p^{c}), q_vw = p^{q}, q_M = p^{qm}", ctx.fmt(v), ctx.fmt(w))
        })
    })
}

fn delta_aff(ctx: &Context, t: &mut Tally) -> Result<(), VerifyError> {
    let params = ctx.params();
    let top = ctx.top();
    for (i, &m) in ctx.chain[..ctx.chain.len() - 1].iter().enumerate() {
        let ld = ctx.levi_datum(m, top)?;
        let gm = ctx.setting.geometry(m);
        let bound = ctx.spec.m_length_bound.unwrap_or(ctx.spec.length_bound);
        let aff = if ctx.spec.exhaustive {
            gm.enumerate_ball(bound, &[WeylElt::identity()]).map_err(spec_err)?
        } else {
            Vec::new()
        };
        let trivial = |w: &WeylElt| {
            let d = ld.delta(params, w).unwrap();
            Outcome::check(d.is_one(), || format!("δ_M({}) = p^{} on the affine Weyl group of M", ctx.fmt(w), d.exp))
        };
        t.run(&aff, false, trivial);
        let mut rng = ctx.rng(300 + i as u64);
        let walls = gm.walls().len();
        let words: Vec<WeylElt> = (0..ctx.spec.samples)
            .map(|_| {
                let len = rng.random_range(0..=ctx.spec.sample_length.unwrap_or(ctx.spec.length_bound));
                (0..len).fold(WeylElt::identity(), |acc, _| {
                    if walls == 0 {
                        acc
                    } else {
                        ctx.rd().mul(&acc, &gm.walls()[rng.random_range(0..walls)].elt)
                    }
                })
            })
            .collect();
        t.run(&words, true, trivial);
        let pairs: Vec<[WeylElt; 2]> = ctx.sample(m, 400 + i as u64)?;
        t.run(&pairs, true, |[v, w]| {
            let (a, b, c) = (
                ld.delta(params, v).unwrap(),
                ld.delta(params, w).unwrap(),
                ld.delta(params, &ctx.rd().mul(v, w)).unwrap(),
            );
            Outcome::check(c == a.mul(&b), || format!("δ not multiplicative at v = {}, w = {}", ctx.fmt(v), ctx.fmt(w)))
        });
    }
    Ok(())
}

fn abe1(ctx: &Context, t: &mut Tally) -> Result<(), VerifyError> {
    let params = ctx.params();
    let geom_g = ctx.setting.geometry(ctx.top());
    per_levi_pair(ctx, t, |_, ld, v, w| {
        let both_pos = ld.is_positive(params, v).unwrap() && ld.is_positive(params, w).unwrap();
        let both_neg = ld.is_negative(params, v).unwrap() && ld.is_negative(params, w).unwrap();
        if !both_pos && !both_neg {
            return Outcome::Vacuous;
        }
        let vw = ctx.rd().mul(v, w);
        let q = geom_g.q_vw(params, v, w);
        let qm = ld.q_m_vw(params, v, w);
        let gl = |x: &WeylElt| geom_g.length(x) as i64;
        let ml = |x: &WeylElt| ld.ell_m(x) as i64;
        let ok = q == qm && ml(v) + ml(w) - ml(&vw) == gl(v) + gl(w) - gl(&vw);
        Outcome::check(ok, || format!("v = {}, w = {}: q_vw = {q}, q_M,vw = {qm}", ctx.fmt(v), ctx.fmt(w)))
    })
}

fn abe2(ctx: &Context, t: &mut Tally) -> Result<(), VerifyError> {
    let params = ctx.params();
    per_levi_pair(ctx, t, |m, ld, v, w| {
        let gm = ctx.setting.geometry(m);
        if !ld.is_positive(params, w).unwrap() || !gm.bruhat_leq(v, w) {
            return Outcome::Vacuous;
        }
        Outcome::check(ld.is_positive(params, v).unwrap(), || {
            format!("w = {} positive, v = {} ≤_M w not positive", ctx.fmt(w), ctx.fmt(v))
        })
    })
}

fn fund_lemma(ctx: &Context, t: &mut Tally) -> Result<(), VerifyError> {
    let top = ctx.top();
    let h = ctx.setting.hecke_local(top);
    let geom = ctx.setting.geometry(top);
    let params = ctx.params();
    let check = |v: &WeylElt, w: &WeylElt| -> Outcome {
        let detail = || format!("v = {}, w = {}", ctx.fmt(v), ctx.fmt(w));
        let f = match h.fundamental_element(v, w) {
            Ok(f) => f,
            Err(e) => return Outcome::Fail(format!("{}: {e}", detail())),
        };
        let vw = ctx.rd().mul(v, w);
        let dual = h
            .t_inv(v)
            .and_then(|x| x.mul(&h.basis(&vw)?))
            .map(|x| x.scale(&h.ring().p_power(params.p, geom.q_vw(params, v, w).exp as i64)));
        match dual {
            Ok(d) if d == f => Outcome::Pass,
            Ok(_) => Outcome::Fail(format!("{}: left division and T_v^-1·T_vw disagree", detail())),
            Err(e) => Outcome::Fail(format!("{}: {e}", detail())),
        }
    };
    let samples: Vec<[WeylElt; 2]> = ctx.sample(top, 500)?;
    t.run(&samples, true, |[v, w]| check(v, w));
    Ok(())
}

/// Sampled pairs in `W_M` for `M` below the top of the chain.
fn hmg_pairs(ctx: &Context, salt: u64) -> Result<Vec<[WeylElt; 2]>, VerifyError> {
    ctx.sample(ctx.bottom(), salt)
}

fn braid_tau(ctx: &Context, t: &mut Tally) -> Result<(), VerifyError> {
    let alg = ctx.hmg(ctx.bottom(), ctx.top())?;
    let geom_g = ctx.setting.geometry(ctx.top());
    let params = ctx.params();
    let mut items: Vec<[WeylElt; 2]> = hmg_pairs(ctx, 600)?;
    // Length-additive pairs built from reduced words so the hypothesis is met.
    let mut rng = ctx.rng(601);
    let pool = ctx.sample_pool(ctx.bottom())?;
    let gm = ctx.setting.geometry(ctx.bottom());
    for _ in 0..ctx.spec.samples {
        let w = pool[rng.random_range(0..pool.len())];
        let (word, u) = gm.reduced_word(&w);
        let cut = rng.random_range(0..=word.len());
        let head = word[..cut].iter().fold(WeylElt::identity(), |a, &s| ctx.rd().mul(&a, &gm.walls()[s].elt));
        let tail = word[cut..].iter().fold(WeylElt::identity(), |a, &s| ctx.rd().mul(&a, &gm.walls()[s].elt));
        items.push([head, ctx.rd().mul(&tail, &u)]);
    }
    t.run(&items, true, |[v, w]| {
        if !geom_g.q_vw(params, v, w).is_one() {
            return Outcome::Vacuous;
        }
        let r = alg.basis(v).and_then(|a| a.mul(&alg.basis(w)?)).and_then(|p| Ok(p == alg.basis(&ctx.rd().mul(v, w))?));
        Outcome::from_result(r, || format!("q_vw = 1 but τ_v·τ_w ≠ τ_vw at v = {}, w = {}", ctx.fmt(v), ctx.fmt(w)))
    });
    Ok(())
}

fn theta_hom(ctx: &Context, t: &mut Tally) -> Result<(), VerifyError> {
    let m = ctx.bottom();
    let alg = ctx.hmg(m, ctx.top())?;
    let pairs = hmg_pairs(ctx, 700)?;
    for &l in &ctx.chain {
        let target = ctx.hmg(m, l)?;
        t.run(&pairs, true, |[v, w]| {
            let r = (|| -> Result<bool, HmgError> {
                let (a, b) = (alg.basis(v)?, alg.basis(w)?);
                let lhs = a.mul(&b)?.theta_into(&target)?;
                let rhs = a.theta_into(&target)?.mul(&b.theta_into(&target)?)?;
                Ok(lhs == rhs)
            })();
            Outcome::from_result(r, || format!("θ to {} at v = {}, w = {}", l.label(), ctx.fmt(v), ctx.fmt(w)))
        });
    }
    Ok(())
}

fn theta_trans(ctx: &Context, t: &mut Tally) -> Result<(), VerifyError> {
    let m = ctx.bottom();
    let top = ctx.top();
    let alg = ctx.hmg(m, top)?;
    let samples: Vec<[WeylElt; 1]> = ctx.sample(m, 800)?;
    for chain in ctx.subchains(2) {
        let (l, l2) = (chain[0], chain[1]);
        let mid = ctx.hmg(m, l2)?;
        let end = ctx.hmg(m, l)?;
        t.run(&samples, true, |[w]| {
            let r = (|| -> Result<bool, HmgError> {
                let x = alg.basis(w)?;
                Ok(x.theta_into(&end)? == x.theta_into(&mid)?.theta_into(&end)?)
            })();
            Outcome::from_result(r, || format!("θ^({},{}) at w = {}", l.label(), l2.label(), ctx.fmt(w)))
        });
    }
    Ok(())
}

fn xi_triangular(ctx: &Context, t: &mut Tally) -> Result<(), VerifyError> {
    let top = ctx.top();
    for chain in ctx.subchains(2) {
        let (m, l) = (chain[0], chain[1]);
        if m == l || m == top {
            continue;
        }
        let alg = ctx.hmg(m, top)?;
        let target = ctx.hmg(l, top)?;
        let singles: Vec<[WeylElt; 1]> = ctx.sample(m, 900)?;
        t.run(&singles, true, |[w]| {
            let r = alg.xi_basis(l, w, 1, 0).and_then(|e| alg.check_xi_triangular(l, w, &e).map(|_| true));
            Outcome::from_result(r, || format!("ξ to {} at w = {}", l.label(), ctx.fmt(w)))
        });
        let pairs: Vec<[WeylElt; 2]> = ctx.sample(m, 901)?;
        t.run(&pairs, true, |[v, w]| {
            let r = (|| -> Result<bool, HmgError> {
                let (a, b) = (alg.basis(v)?, alg.basis(w)?);
                let lhs = a.mul(&b)?.xi_into(&target, 1, 0)?;
                let rhs = a.xi_into(&target, 1, 0)?.mul(&b.xi_into(&target, 1, 0)?)?;
                Ok(lhs == rhs)
            })();
            Outcome::from_result(r, || {
                format!("ξ to {} not multiplicative at v = {}, w = {}", l.label(), ctx.fmt(v), ctx.fmt(w))
            })
        });
    }
    Ok(())
}

fn xi_unique(ctx: &Context, t: &mut Tally) -> Result<(), VerifyError> {
    let top = ctx.top();
    for chain in ctx.subchains(2) {
        let (m, l) = (chain[0], chain[1]);
        if m == l || m == top {
            continue;
        }
        let alg = ctx.hmg(m, top)?;
        let samples: Vec<[WeylElt; 1]> = ctx.sample(m, 1000)?;
        t.run(&samples, true, |[w]| {
            let r = (|| -> Result<bool, HmgError> {
                let a = alg.xi_basis(l, w, 1, 0)?;
                let b = alg.xi_basis(l, w, 2, 0)?;
                let c = alg.xi_basis(l, w, 1, 1)?;
                let sorted = |x: &[(WeylElt, BigInt)]| {
                    let mut v = x.to_vec();
                    v.sort();
                    v
                };
                Ok(sorted(&a) == sorted(&b) && sorted(&a) == sorted(&c))
            })();
            Outcome::from_result(r, || format!("ξ to {} depends on the direction at w = {}", l.label(), ctx.fmt(w)))
        });
    }
    Ok(())
}

fn xi_square(ctx: &Context, t: &mut Tally) -> Result<(), VerifyError> {
    let samples: Vec<[WeylElt; 1]> = ctx.sample(ctx.bottom(), 1100)?;
    for chain in ctx.subchains(4) {
        let (m, l, l2, g) = (chain[0], chain[1], chain[2], chain[3]);
        let src = ctx.hmg(m, g)?;
        let lg = ctx.hmg(l, g)?;
        let ll2 = ctx.hmg(l, l2)?;
        let ml2 = ctx.hmg(m, l2)?;
        let gm = ctx.setting.geometry(m);
        let label = format!("{} ⊆ {} ⊆ {} ⊆ {}", m.label(), l.label(), l2.label(), g.label());
        let items: Vec<&[WeylElt; 1]> = samples.iter().filter(|[w]| gm.contains(w)).collect();
        t.run(&items, true, |[w]| {
            let r = (|| -> Result<bool, HmgError> {
                let x = src.basis(w)?;
                let lhs = x.xi_into(&lg, 1, 0)?.theta_into(&ll2)?;
                let rhs = x.theta_into(&ml2)?.xi_into(&ll2, 1, 0)?;
                Ok(lhs == rhs)
            })();
            Outcome::from_result(r, || format!("{label} at w = {}", ctx.fmt(w)))
        });
    }
    Ok(())
}

fn xi_comp(ctx: &Context, t: &mut Tally) -> Result<(), VerifyError> {
    let top = ctx.top();
    let samples: Vec<[WeylElt; 1]> = ctx.sample(ctx.bottom(), 1200)?;
    for chain in ctx.subchains(3) {
        let (m, l, l2) = (chain[0], chain[1], chain[2]);
        let src = ctx.hmg(m, top)?;
        let mid = ctx.hmg(l, top)?;
        let end = ctx.hmg(l2, top)?;
        let label = format!("{} ⊆ {} ⊆ {}", m.label(), l.label(), l2.label());
        t.run(&samples, true, |[w]| {
            let r = (|| -> Result<bool, HmgError> {
                let x = src.basis(w)?;
                Ok(x.xi_into(&end, 1, 0)? == x.xi_into(&mid, 1, 0)?.xi_into(&end, 1, 0)?)
            })();
            Outcome::from_result(r, || format!("{label} at w = {}", ctx.fmt(w)))
        });
    }
    Ok(())
}

fn localization(ctx: &Context, t: &mut Tally) -> Result<(), VerifyError> {
    let m = ctx.bottom();
    let top = ctx.top();
    let alg = ctx.hmg(m, top)?;
    let samples: Vec<[WeylElt; 1]> = ctx.sample(m, 1300)?;
    let mut extra: Vec<[WeylElt; 1]> = vec![[WeylElt::identity()]];
    for &l in &ctx.chain {
        if l == top {
            continue;
        }
        // Central elements of L are fixed by the identity on both sides.
        if let Ok(z) = crate::levi::strictly_positive_cochar(ctx.rd(), &l, &top) {
            extra.push([WeylElt::translation(z)]);
        }
        let items: Vec<[WeylElt; 1]> = extra.iter().chain(samples.iter()).copied().collect();
        t.run(&items, true, |[w]| {
            Outcome::from_result(localization_holds(&alg, l, w), || {
                format!("localization at {} for w = {}", l.label(), ctx.fmt(w))
            })
        });
    }
    Ok(())
}

fn alcove_scalar(ctx: &Context, t: &mut Tally) -> Result<(), VerifyError> {
    let top = ctx.top();
    for &m in &ctx.chain {
        let alg = ctx.hmg(m, top)?;
        let pairs: Vec<[WeylElt; 2]> = ctx.sample(m, 1400)?;
        t.run(&pairs, true, |[v, w]| {
            Outcome::from_result(alcove_scalar_holds(&alg, v, w), || {
                format!("M = {}: v = {}, w = {}", m.label(), ctx.fmt(v), ctx.fmt(w))
            })
        });
    }
    Ok(())
}

fn filtration(ctx: &Context, t: &mut Tally) -> Result<(), VerifyError> {
    let params = ctx.params();
    if !params.is_equal() {
        return Err(VerifyError::Spec("FILTRATION needs equal parameters".into()));
    }
    let m = ctx.bottom();
    let alg = ctx.hmg(m, ctx.top())?;
    let q = params.q().value();
    let q_u64: u64 = q.try_into().map_err(|_| VerifyError::Spec("q too large for residues".into()))?;
    let modq = alg.with_ring(CoeffRing::Modular { n: q_u64 }).map_err(spec_err)?;
    let ld = alg.levi_datum().clone();
    let pairs: Vec<[WeylElt; 2]> = ctx.sample(m, 1500)?;
    t.run(&pairs, true, |[v, w]| {
        let r = (|| -> Result<bool, HmgError> {
            let (a, b) = (alg.basis(v)?, alg.basis(w)?);
            let prod = a.mul(&b)?;
            let sub = prod.filtration_level()? <= a.filtration_level()? + b.filtration_level()?;
            let f0 = a.filtration_level()? > 0 || b.filtration_level()? > 0 || prod.filtration_level()? == 0;
            Ok(sub && f0)
        })();
        Outcome::from_result(r, || format!("levels at v = {}, w = {}", ctx.fmt(v), ctx.fmt(w)))
    });
    let singles: Vec<[WeylElt; 1]> = ctx.sample(m, 1501)?;
    let hm = ctx.setting.hecke(m, CoeffRing::Modular { n: q_u64 });
    t.run(&singles, true, |[w]| {
        let r = (|| -> Result<bool, HmgError> {
            let img = modq.basis(w)?.to_hm()?;
            let positive = ld.is_positive(params, w)?;
            let level0 = modq.basis(w)?.filtration_level()? == 0;
            Ok(if positive { level0 && img == hm.basis(w)? } else { !level0 && img.is_zero() })
        })();
        Outcome::from_result(r, || format!("image mod q at w = {}", ctx.fmt(w)))
    });
    Ok(())
}

fn cor_xi(ctx: &Context, t: &mut Tally) -> Result<(), VerifyError> {
    let top = ctx.top();
    for &m in &ctx.chain {
        if m == top {
            continue;
        }
        let alg = ctx.hmg(m, top)?;
        let samples: Vec<[WeylElt; 1]> = ctx.sample(m, 1600)?;
        t.run(&samples, true, |[w]| {
            Outcome::from_result(cor_xi_holds(&alg, w), || format!("M = {}: w = {}", m.label(), ctx.fmt(w)))
        });
    }
    Ok(())
}

fn random_hecke(h: &Arc<HeckeAlgebra>, pool: &[WeylElt], rng: &mut ChaCha8Rng) -> HeckeElt {
    let n = rng.random_range(1..=2);
    let terms: Vec<(WeylElt, crate::hecke::Coefficient)> = (0..n)
        .map(|_| {
            let c = [-3i64, -2, -1, 1, 2, 3][rng.random_range(0..6)];
            (pool[rng.random_range(0..pool.len())], h.ring().from_i64(c))
        })
        .collect();
    h.from_terms(terms).expect("pool lies in the algebra")
}

fn random_tau(a: &Arc<HmgAlgebra>, pool: &[WeylElt], rng: &mut ChaCha8Rng) -> TauElt {
    let n = rng.random_range(1..=2);
    let terms: Vec<(WeylElt, crate::hecke::Coefficient)> = (0..n)
        .map(|_| {
            let c = [-3i64, -2, -1, 1, 2, 3][rng.random_range(0..6)];
            (pool[rng.random_range(0..pool.len())], a.ring().from_i64(c))
        })
        .collect();
    a.from_terms(terms).expect("pool lies in W_M")
}

fn assoc(ctx: &Context, t: &mut Tally) -> Result<(), VerifyError> {
    let top = ctx.top();
    let m = ctx.bottom();
    let samples = ctx.spec.samples;
    for (salt, j) in [(1700, top), (1701, m)] {
        let h = ctx.setting.hecke_local(j);
        let pool = ctx.sample_pool(j)?;
        let mut rng = ctx.rng(salt);
        let triples: Vec<[HeckeElt; 3]> =
            (0..samples).map(|_| std::array::from_fn(|_| random_hecke(&h, &pool, &mut rng))).collect();
        t.run(&triples, true, |[a, b, c]| {
            let r = a.mul(b).and_then(|ab| ab.mul(c)).and_then(|l| Ok(l == a.mul(&b.mul(c)?)?));
            match r {
                Ok(true) => Outcome::Pass,
                Ok(false) => Outcome::Fail(format!("H({}): ({a})·({b})·({c})", j.label())),
                Err(e) => Outcome::Fail(format!("H({}): {e}", j.label())),
            }
        });
    }
    let alg = ctx.hmg(m, top)?;
    let pool = ctx.sample_pool(m)?;
    let mut rng = ctx.rng(1702);
    let triples: Vec<[TauElt; 3]> =
        (0..samples).map(|_| std::array::from_fn(|_| random_tau(&alg, &pool, &mut rng))).collect();
    t.run(&triples, true, |[a, b, c]| {
        let r = a.mul(b).and_then(|ab| ab.mul(c)).and_then(|l| Ok(l == a.mul(&b.mul(c)?)?));
        Outcome::from_result(r, || format!("{}: ({a})·({b})·({c})", alg.label()))
    });
    Ok(())
}

fn oracle_spec(spec: &CheckSpec) -> Result<(usize, OracleSpec), VerifyError> {
    let n = match spec.root_datum {
        RootDatumSpec::Gl { n } => n,
        _ => return Err(VerifyError::Spec("oracle checks need a GL(n) root datum".into())),
    };
    Ok((n, spec.oracle.clone().unwrap_or_default()))
}

fn oracle_cfg(n: usize, p: u64, o: &OracleSpec) -> OracleConfig {
    OracleConfig { n, p, k: o.k, r: o.r, blocks: o.blocks.clone().unwrap_or_else(|| vec![1; n]) }
}

fn padic_outcome(r: Result<Outcome, PadicError>, detail: impl FnOnce() -> String) -> Outcome {
    r.unwrap_or_else(|e| Outcome::Fail(format!("{}: {e}", detail())))
}

fn oracle_mu(spec: &CheckSpec, t: &mut Tally) -> Result<(), VerifyError> {
    let (n, o) = oracle_spec(spec)?;
    for &p in &o.primes {
        let cfg = oracle_cfg(n, p, &o);
        let range: Vec<i64> = (o.range[0]..=o.range[1]).collect();
        let lambdas: Vec<Vec<i64>> = if n == 3 {
            range.iter().flat_map(|&a| range.iter().map(move |&b| vec![a + b, b, 0])).collect()
        } else {
            let mut out = vec![vec![0; n]];
            for i in 0..n - 1 {
                out = out
                    .into_iter()
                    .flat_map(|v| {
                        range.iter().map(move |&x| {
                            let mut v = v.clone();
                            v[i] = x;
                            v
                        })
                    })
                    .collect();
            }
            out
        };
        t.run(&lambdas, false, |lam| {
            padic_outcome(
                cross_check_mu(&cfg, lam).map(|c| {
                    let closed = if n == 3 && cfg.blocks == [1, 1, 1] {
                        let (m, k) = (lam[0] - lam[1], lam[1]);
                        let e = 0.max(-m) + 0.max(-k) + 0.max(-m - k);
                        p.pow(e as u32) == c.oracle
                    } else {
                        true
                    };
                    Outcome::check(c.agree && closed, || {
                        format!("p = {p}, λ = {lam:?}: oracle {} vs formula {}", c.oracle, c.formula)
                    })
                }),
                || format!("p = {p}, λ = {lam:?}"),
            )
        });
    }
    t.stat("primes", format!("{:?}", o.primes));
    Ok(())
}

fn oracle_nu(spec: &CheckSpec, t: &mut Tally) -> Result<(), VerifyError> {
    let (n, o) = oracle_spec(spec)?;
    if n != 2 {
        return Err(VerifyError::Spec("ORACLE_NU reproduces the GL(2) example".into()));
    }
    let mut items = Vec::new();
    for &p in &o.primes {
        for k in 0..=o.range[1].max(0) as u32 {
            items.push((p, k));
        }
    }
    let mut values = Vec::new();
    let outcomes: Vec<Outcome> = items
        .par_iter()
        .map(|&(p, k)| {
            let cfg = oracle_cfg(2, p, &o);
            let elt =
                TestElement { diag: vec![0, 0], unipotent: UnipotentRep { n: 2, entries: vec![((0, 1), 1, k + 1)] } };
            padic_outcome(
                nu_oracle(&cfg, &elt).map(|nu| {
                    Outcome::check(nu == p.pow(k), || format!("p = {p}, n = {k}: ν = {nu}, expected {}", p.pow(k)))
                }),
                || format!("p = {p}, n = {k}"),
            )
        })
        .collect();
    for &(p, k) in &items {
        values.push(format!("p={p},n={k}:{}", p.pow(k)));
    }
    t.absorb(outcomes, false);
    t.stat("expected", values.join(" "));
    Ok(())
}

fn random_element(n: usize, p: u64, o: &OracleSpec, blocks: &[usize], rng: &mut ChaCha8Rng) -> TestElement {
    let diag: Vec<i64> = (0..n).map(|_| rng.random_range(o.range[0]..=o.range[1])).collect();
    let block_of: Vec<usize> = blocks.iter().enumerate().flat_map(|(b, &s)| std::iter::repeat_n(b, s)).collect();
    let mut entries = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if block_of[i] == block_of[j] || rng.random_bool(0.3) {
                continue;
            }
            let den = rng.random_range(0..=o.max_den);
            let num = rng.random_range(1..(p * p) as i128);
            entries.push(((i, j), num, den));
        }
    }
    TestElement { diag, unipotent: UnipotentRep { n, entries } }
}

fn oracle_dc(spec: &CheckSpec, t: &mut Tally) -> Result<(), VerifyError> {
    let (n, o) = oracle_spec(spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut items = Vec::new();
    for i in 0..spec.samples {
        let p = o.primes[i % o.primes.len()];
        let blocks = o.blocks.clone().unwrap_or_else(|| vec![1; n]);
        items.push((p, random_element(n, p, &o, &blocks, &mut rng)));
    }
    t.run(&items, true, |(p, elt)| {
        let cfg = oracle_cfg(n, *p, &o);
        padic_outcome(
            double_coset_oracle(&cfg, elt).map(|r| {
                let ok = r.mu_total == r.mu_m * r.nu_m * r.mu_u && r.disjoint && r.cosets == r.mu_total;
                Outcome::check(ok, || format!("p = {p}, g = {elt:?}: {r:?}"))
            }),
            || format!("p = {p}, g = {elt:?}"),
        )
    });
    Ok(())
}

fn oracle_ineq(spec: &CheckSpec, t: &mut Tally) -> Result<(), VerifyError> {
    let (n, o) = oracle_spec(spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let blocks = o.blocks.clone().unwrap_or_else(|| vec![1; n]);
    let mut items = Vec::new();
    for i in 0..spec.samples {
        let p = o.primes[i % o.primes.len()];
        items.push((p, random_element(n, p, &o, &blocks, &mut rng)));
    }
    t.run(&items, true, |(p, elt)| {
        let cfg = oracle_cfg(n, *p, &o);
        let r = mu_oracle(&cfg, elt).and_then(|full| {
            let gm = TestElement::diagonal(elt.diag.clone());
            let part = mu_oracle(&cfg, &gm)?;
            Ok(Outcome::check(full.index % part.index == 0, || {
                format!("p = {p}, g = {elt:?}: μ(g) = {}, μ(g_M) = {}", full.index, part.index)
            }))
        });
        padic_outcome(r, || format!("p = {p}, g = {elt:?}"))
    });
    Ok(())
}
