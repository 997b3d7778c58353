//! Runs the shipped default suite and prints one verdict line per acceptance
//! criterion. Uses its own harness so the verdicts are always shown.

use std::path::PathBuf;

use parahecke::{run_suite, CheckId, CheckReport, RootDatumSpec, SuiteConfig};

fn load() -> SuiteConfig {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs/default.toml");
    SuiteConfig::from_toml(&std::fs::read_to_string(path).expect("default suite present"))
        .expect("default suite parses")
}

fn in_pool(threads: usize, cfg: &SuiteConfig) -> Vec<CheckReport> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool")
        .install(|| run_suite(cfg))
        .expect("suite runs")
}

struct Verdict {
    criterion: u32,
    ok: bool,
    detail: String,
}

struct Criteria<'a> {
    cfg: &'a SuiteConfig,
    reports: &'a [CheckReport],
    out: Vec<Verdict>,
}

impl<'a> Criteria<'a> {
    fn of(&self, id: CheckId) -> Vec<(usize, &'a CheckReport)> {
        self.reports.iter().enumerate().filter(|(_, r)| r.check_id == id).collect()
    }

    fn datum(&self, i: usize) -> &'a RootDatumSpec {
        &self.cfg.check[i].root_datum
    }

    fn chain(&self, i: usize) -> Vec<String> {
        self.cfg.check[i].levi_chain.clone()
    }

    fn push(&mut self, criterion: u32, problems: Vec<String>, reports: &[&CheckReport], limit_ms: Option<u64>) {
        let mut problems = problems;
        for r in reports {
            if !r.pass {
                problems.push(r.summary());
            }
        }
        let wall: u64 = reports.iter().map(|r| r.wall_ms).sum();
        if let Some(limit) = limit_ms {
            if wall > limit {
                problems.push(format!("took {wall} ms, limit {limit} ms"));
            }
        }
        if reports.is_empty() {
            problems.push("no configured checks".into());
        }
        let items: u64 = reports.iter().map(|r| r.exhaustive + r.sampled).sum();
        let detail = if problems.is_empty() {
            format!("{} checks, {items} items, {wall} ms", reports.len())
        } else {
            problems.join("; ")
        };
        self.out.push(Verdict { criterion, ok: problems.is_empty(), detail });
    }

    /// Checks with the given ids, each needing at least `min_sampled` samples,
    /// a nonempty exhaustive pass when `exhaustive`, and the GL(3) chain
    /// `T ⊂ GL_2×GL_1 ⊂ G` when `gl3_chain`.
    fn group(
        &mut self,
        criterion: u32,
        ids: &[CheckId],
        min_sampled: u64,
        exhaustive: bool,
        gl3_chain: bool,
        limit_ms: Option<u64>,
    ) {
        let mut problems = Vec::new();
        let mut reports = Vec::new();
        for &id in ids {
            let found = self.of(id);
            if found.is_empty() {
                problems.push(format!("{id} not configured"));
            }
            for (i, r) in found {
                if r.sampled < min_sampled {
                    problems.push(format!("{id} [{}] has {} samples, needs {min_sampled}", r.case, r.sampled));
                }
                if exhaustive && r.exhaustive == 0 {
                    problems.push(format!("{id} [{}] has no exhaustive pass", r.case));
                }
                let on_chain = self.datum(i) == &RootDatumSpec::Gl { n: 3 } && self.chain(i) == ["t", "a1", "full"];
                if gl3_chain && !on_chain {
                    problems.push(format!("{id} [{}] is not on the GL(3) chain", r.case));
                }
                reports.push(r);
            }
        }
        self.push(criterion, problems, &reports, limit_ms);
    }
}

fn evaluate(cfg: &SuiteConfig, reports: &[CheckReport]) -> Vec<Verdict> {
    let mut c = Criteria { cfg, reports, out: Vec::new() };

    // 1: exhaustive on ℓ ≤ 5 with Ω window {-1,0,1} for every listed Levi.
    let wanted = [
        (RootDatumSpec::Gl { n: 2 }, "t"),
        (RootDatumSpec::Gl { n: 3 }, "t"),
        (RootDatumSpec::Gl { n: 3 }, "a1"),
        (RootDatumSpec::Sp4, "a1"),
        (RootDatumSpec::Sp4, "a2"),
    ];
    let found = c.of(CheckId::MuPropA);
    let mut problems = Vec::new();
    for (datum, m) in &wanted {
        let hit = found.iter().any(|&(i, r)| {
            let spec = &cfg.check[i];
            c.datum(i) == datum
                && spec.levi_chain.first().map(String::as_str) == Some(*m)
                && spec.exhaustive
                && spec.length_bound >= 5
                && spec.omega == [-1, 1]
                && spec.params.p == 3
                && spec.params.e == 1
                && r.exhaustive > 0
        });
        if !hit {
            problems.push(format!("no exhaustive run for {} with M = {m}", datum.short_name()));
        }
    }
    let reports1: Vec<&CheckReport> = found.iter().map(|&(_, r)| r).collect();
    c.push(1, problems, &reports1, Some(60_000));

    // 2: 500 pairs each in GL(2) and SL(3), ℓ ≤ 6.
    let found = c.of(CheckId::FundLemma);
    let mut problems = Vec::new();
    for datum in [RootDatumSpec::Gl { n: 2 }, RootDatumSpec::Sl { n: 3 }] {
        if !found.iter().any(|&(i, r)| c.datum(i) == &datum && r.sampled >= 500 && cfg.check[i].length_bound >= 6) {
            problems.push(format!("no 500-sample run for {}", datum.short_name()));
        }
    }
    let reports2: Vec<&CheckReport> = found.iter().map(|&(_, r)| r).collect();
    c.push(2, problems, &reports2, Some(120_000));

    // 3: the 25-point sweep at p = 2, k = 8, r = 4.
    let found = c.of(CheckId::OracleMu);
    let mut problems = Vec::new();
    if !found.iter().any(|&(i, r)| {
        let o = cfg.check[i].oracle.clone().unwrap_or_default();
        o.primes == [2] && o.k == Some(8) && o.r == Some(4) && o.range == [-2, 2] && r.exhaustive == 25
    }) {
        problems.push("no GL(3) sweep over m, n in -2..=2 at k = 8, r = 4".into());
    }
    let reports3: Vec<&CheckReport> = found.iter().map(|&(_, r)| r).collect();
    c.push(3, problems, &reports3, Some(120_000));

    // 4: n in {0,1,2}, p in {2,3}.
    let found = c.of(CheckId::OracleNu);
    let mut problems = Vec::new();
    if !found.iter().any(|&(_, r)| r.exhaustive == 6) {
        problems.push("expected six (p, n) cases".into());
    }
    let reports4: Vec<&CheckReport> = found.iter().map(|&(_, r)| r).collect();
    c.push(4, problems, &reports4, None);

    c.group(5, &[CheckId::OracleDc], 50, false, false, None);

    // 6: at least 200 elements in each of GL(2) and GL(3).
    let found = c.of(CheckId::OracleIneq);
    let mut problems = Vec::new();
    for n in [2, 3] {
        if !found.iter().any(|&(i, r)| c.datum(i) == &RootDatumSpec::Gl { n } && r.sampled >= 200) {
            problems.push(format!("fewer than 200 elements in GL({n})"));
        }
    }
    let reports6: Vec<&CheckReport> = found.iter().map(|&(_, r)| r).collect();
    c.push(6, problems, &reports6, None);

    c.group(
        7,
        &[
            CheckId::MuMonotone,
            CheckId::MuOpposite,
            CheckId::MuChain,
            CheckId::CorMu,
            CheckId::DeltaAff,
            CheckId::Abe1,
            CheckId::Abe2,
        ],
        300,
        true,
        true,
        None,
    );
    c.group(
        8,
        &[
            CheckId::ThetaHom,
            CheckId::ThetaTrans,
            CheckId::XiTriangular,
            CheckId::XiUnique,
            CheckId::XiSquare,
            CheckId::XiComp,
            CheckId::Localization,
            CheckId::CorXi,
        ],
        100,
        false,
        true,
        Some(180_000),
    );
    c.group(9, &[CheckId::BraidTau, CheckId::AlcoveScalar, CheckId::Filtration], 300, false, false, None);
    // Three algebras with 300 triples each.
    c.group(10, &[CheckId::Assoc], 900, false, false, None);
    c.out
}

fn main() {
    let cfg = load();
    let threads = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(4).max(4);
    let many = in_pool(threads, &cfg);
    let mut verdicts = evaluate(&cfg, &many);

    let one = in_pool(1, &cfg);
    let a: Vec<String> = one.iter().map(|r| r.to_json(false)).collect();
    let b: Vec<String> = many.iter().map(|r| r.to_json(false)).collect();
    let differing: Vec<String> =
        a.iter().zip(&b).filter(|(x, y)| x != y).map(|(x, _)| x.chars().take(80).collect()).collect();
    let ok = a.len() == b.len() && differing.is_empty();
    verdicts.push(Verdict {
        criterion: 11,
        ok,
        detail: if ok {
            format!("{} records identical on 1 and {threads} threads", a.len())
        } else {
            format!("records differ: {differing:?}")
        },
    });

    for v in &verdicts {
        println!("criterion {:>2}: {} ({})", v.criterion, if v.ok { "PASS" } else { "FAIL" }, v.detail);
    }
    let failed: Vec<u32> = verdicts.iter().filter(|v| !v.ok).map(|v| v.criterion).collect();
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
