//! Reproduction suites: seeded batches of protocol runs flattened into pass/fail rows.
//!
//! Reports carry no timings or other run-dependent data, so a fixed
//! configuration always serialises to the same bytes.

use serde::Serialize;

use crate::conic::SolverSettings;
use crate::measures;
use crate::protocols::{self, Claim, FreeClass, ProtocolConfig, ProtocolReport};
use crate::qobj::{self, QuantumChannel};
use crate::random;
use crate::supermap;

/// Reproduction suites; [`Suite::name`] is the command-line and report name.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    CostMisc,
    CostDisc,
    DistillMisc,
    DistillDisc,
    Catalytic,
    GoldenUnit,
    GoldenValues,
    Replacement,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::CostMisc,
        Suite::CostDisc,
        Suite::DistillMisc,
        Suite::DistillDisc,
        Suite::Catalytic,
        Suite::GoldenUnit,
        Suite::GoldenValues,
        Suite::Replacement,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::CostMisc => "thm1",
            Suite::CostDisc => "thm2",
            Suite::DistillMisc => "thm3",
            Suite::DistillDisc => "thm4",
            Suite::Catalytic => "thm5",
            Suite::GoldenUnit => "appendix-a",
            Suite::GoldenValues => "appendix-b",
            Suite::Replacement => "appendix-c",
        }
    }

    /// `all` expands to every suite.
    pub fn parse_list(s: &str) -> Result<Vec<Suite>, String> {
        if s == "all" {
            return Ok(Suite::ALL.to_vec());
        }
        Suite::ALL
            .iter()
            .find(|x| x.name() == s)
            .map(|x| vec![*x])
            .ok_or_else(|| format!("unknown suite '{s}' (expected thm1..thm5, appendix-a..c or all)"))
    }
}

impl Serialize for Suite {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(self.name())
    }
}

/// Largest dimension accepted by the suites.
pub const DIM_CAP: usize = 4;

#[derive(Clone, Debug, Serialize)]
pub struct ReproduceConfig {
    /// Dimensions; `None` selects each suite's default.
    pub dims: Option<Vec<usize>>,
    /// Smoothing parameters; `None` selects each suite's default.
    pub eps: Option<Vec<f64>>,
    pub delta: f64,
    pub trials: usize,
    pub seed: u64,
    pub random_inputs: usize,
    #[serde(skip)]
    pub solver: SolverSettings,
}

impl Default for ReproduceConfig {
    fn default() -> Self {
        Self { dims: None, eps: None, delta: 0.5, trials: 2, seed: 0, random_inputs: 16, solver: SolverSettings::default() }
    }
}

impl ReproduceConfig {
    fn protocol(&self) -> ProtocolConfig {
        ProtocolConfig { solver: self.solver.clone(), random_inputs: self.random_inputs, seed: self.seed }
    }

    fn dims_or(&self, default: &[usize]) -> Vec<usize> {
        self.dims.clone().unwrap_or_else(|| default.to_vec())
    }

    fn eps_or(&self, default: &[f64]) -> Vec<f64> {
        self.eps.clone().unwrap_or_else(|| default.to_vec())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub case: String,
    pub claim: String,
    pub lhs: f64,
    pub relation: &'static str,
    pub rhs: f64,
    pub tol: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Row {
    fn from_claim(case: &str, c: &Claim) -> Self {
        Row {
            case: case.into(),
            claim: c.name.clone(),
            lhs: c.lhs,
            relation: c.relation,
            rhs: c.rhs,
            tol: c.tol,
            pass: c.pass,
            error: None,
        }
    }

    fn failed(case: &str, claim: &str, err: impl std::fmt::Display) -> Self {
        Row {
            case: case.into(),
            claim: claim.into(),
            lhs: f64::NAN,
            relation: "ok",
            rhs: f64::NAN,
            tol: 0.0,
            pass: false,
            error: Some(err.to_string()),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub rows: Vec<Row>,
    pub passed: usize,
    pub total: usize,
    pub pass: bool,
}

/// Tolerances and criteria embedded in every report.
#[derive(Clone, Debug, Serialize)]
pub struct Tolerances {
    pub solver_tol: f64,
    pub admissibility_criterion: &'static str,
    pub admissibility_tol: f64,
    pub disc_tol: f64,
    pub delta_misc_slack: f64,
    pub d0_slack: f64,
    pub cost_output_tol: f64,
    pub ball_tol: f64,
    pub value_tol: f64,
}

impl Tolerances {
    pub fn current(solver: &SolverSettings) -> Self {
        Self {
            solver_tol: solver.tol,
            admissibility_criterion: supermap::ADMISSIBILITY_CRITERION,
            admissibility_tol: supermap::ADMISSIBILITY_TOL,
            disc_tol: supermap::DISC_TOL,
            delta_misc_slack: supermap::DELTA_MISC_SLACK,
            d0_slack: protocols::D0_SLACK,
            cost_output_tol: protocols::COST_OUTPUT_TOL,
            ball_tol: protocols::BALL_TOL,
            value_tol: protocols::VALUE_TOL,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ReproduceReport {
    pub config: ReproduceConfig,
    pub tolerances: Tolerances,
    pub suites: Vec<SuiteReport>,
    pub pass: bool,
}

/// Runs the suites, concurrently when there are several; output order follows `suites`.
pub fn run(suites: &[Suite], cfg: &ReproduceConfig) -> Result<ReproduceReport, String> {
    if let Some(d) = cfg.dims.as_ref().and_then(|ds| ds.iter().find(|&&d| !(2..=DIM_CAP).contains(&d))) {
        return Err(format!("dimension {d} outside 2..={DIM_CAP}"));
    }
    if let Some(e) = cfg.eps.as_ref().and_then(|es| es.iter().find(|e| !(0.0..1.0).contains(*e))) {
        return Err(format!("eps = {e} outside [0, 1)"));
    }
    let reports: Vec<SuiteReport> = std::thread::scope(|scope| {
        let handles: Vec<_> = suites.iter().map(|&s| scope.spawn(move || run_suite(s, cfg))).collect();
        handles.into_iter().map(|h| h.join().expect("suite thread panicked")).collect()
    });
    let pass = reports.iter().all(|r| r.pass);
    Ok(ReproduceReport { config: cfg.clone(), tolerances: Tolerances::current(&cfg.solver), suites: reports, pass })
}

pub fn run_suite(suite: Suite, cfg: &ReproduceConfig) -> SuiteReport {
    let rows = match suite {
        Suite::CostMisc => cost_suite(FreeClass::Misc, cfg),
        Suite::CostDisc => cost_suite(FreeClass::Disc, cfg),
        Suite::DistillMisc => distill_suite(FreeClass::Misc, cfg),
        Suite::DistillDisc => distill_suite(FreeClass::Disc, cfg),
        Suite::Catalytic => catalytic_suite(cfg),
        Suite::GoldenUnit => golden_unit_suite(cfg),
        Suite::GoldenValues => golden_values_suite(cfg),
        Suite::Replacement => replacement_suite(cfg),
    };
    let passed = rows.iter().filter(|r| r.pass).count();
    SuiteReport { suite, total: rows.len(), passed, pass: passed == rows.len(), rows }
}

fn push_report(rows: &mut Vec<Row>, case: &str, rep: Result<ProtocolReport, protocols::ProtocolError>) {
    match rep {
        Ok(rep) => {
            for c in &rep.certificates {
                let name = match c.property {
                    supermap::SuperProperty::Admissible => "admissible".to_string(),
                    supermap::SuperProperty::Misc => "MISC membership".to_string(),
                    supermap::SuperProperty::Disc => "DISC membership".to_string(),
                    supermap::SuperProperty::DeltaMisc { delta } => format!("delta-MISC membership (delta = {delta})"),
                };
                rows.push(Row {
                    case: case.into(),
                    claim: name,
                    lhs: c.residual,
                    relation: "<=",
                    rhs: c.tolerance,
                    tol: 0.0,
                    pass: c.pass,
                    error: None,
                });
            }
            rows.extend(rep.claims.iter().map(|c| Row::from_claim(case, c)));
        }
        Err(e) => rows.push(Row::failed(case, "protocol run", e)),
    }
}

fn random_channels(d: usize, count: usize, seed: u64) -> Vec<QuantumChannel> {
    let mut rng = random::seeded(seed);
    (0..count).map(|_| random::random_channel(&mut rng, d, d, d)).collect()
}

fn cost_suite(class: FreeClass, cfg: &ReproduceConfig) -> Vec<Row> {
    let pc = cfg.protocol();
    let mut rows = Vec::new();
    for d in cfg.dims_or(&[2]) {
        for (t, n) in random_channels(d, cfg.trials, cfg.seed).iter().enumerate() {
            for eps in cfg.eps_or(&[0.0, 0.05, 0.1]) {
                let case = format!("d={d} trial={t} eps={eps}");
                push_report(&mut rows, &case, protocols::one_shot_cost(n, eps, class, &pc));
            }
        }
    }
    rows
}

fn distill_suite(class: FreeClass, cfg: &ReproduceConfig) -> Vec<Row> {
    let pc = cfg.protocol();
    let mut rows = Vec::new();
    let dims = cfg.dims_or(&[2, 3]);
    for &d in &dims {
        let f = protocols::qft_any(d);
        let case = format!("F_{d} eps=0");
        match protocols::one_shot_distill_bound(&f, 0.0, class, &pc) {
            Ok(rep) => {
                rows.extend(rep.claims.iter().map(|c| Row::from_claim(&case, c)));
                let want = 2.0 * (d as f64).log2();
                let got = rep.upper.unwrap_or(f64::NAN);
                rows.push(Row::from_claim(&case, &Claim::le("bound = log d^2", (got - want).abs(), 1e-5, 0.0)));
            }
            Err(e) => rows.push(Row::failed(&case, "protocol run", e)),
        }
    }
    let q = QuantumChannel::deterministic(2, 2, &[0, 0]).expect("table");
    match protocols::one_shot_distill_bound(&q, 0.0, class, &pc) {
        Ok(rep) => rows.push(Row::from_claim("classical eps=0", &Claim::le("bound = 0", rep.upper.unwrap_or(f64::NAN).abs(), 1e-6, 0.0))),
        Err(e) => rows.push(Row::failed("classical eps=0", "protocol run", e)),
    }
    let eps_list = cfg.eps_or(&[0.0, 0.05, 0.1]);
    let d = dims[0];
    for (t, n) in random_channels(d, cfg.trials, cfg.seed).iter().enumerate() {
        let mut prev: Option<f64> = None;
        for &eps in &eps_list {
            let case = format!("d={d} trial={t} eps={eps}");
            match protocols::one_shot_distill_bound(n, eps, class, &pc) {
                Ok(rep) => {
                    let b = rep.upper.unwrap_or(f64::NAN);
                    rows.push(Row::from_claim(&case, &Claim::ge("bound >= 0", b, 0.0, 1e-9)));
                    if let Some(p) = prev {
                        rows.push(Row::from_claim(&case, &Claim::ge("bound non-decreasing in eps", b, p, protocols::VALUE_TOL)));
                    }
                    prev = Some(b);
                }
                Err(e) => rows.push(Row::failed(&case, "protocol run", e)),
            }
        }
    }
    rows
}

fn catalytic_suite(cfg: &ReproduceConfig) -> Vec<Row> {
    let pc = cfg.protocol();
    let mut rows = vec![Row::from_claim("delta=1/3", &Claim::le("l = 2", protocols::catalyst_dim(1.0 / 3.0) as f64, 2.0, 0.0))];
    for d in cfg.dims_or(&[2]) {
        for (t, n) in random_channels(d, cfg.trials, cfg.seed).iter().enumerate() {
            for eps in cfg.eps_or(&[0.1]) {
                let case = format!("d={d} trial={t} eps={eps} delta={}", cfg.delta);
                push_report(&mut rows, &case, protocols::catalytic_cost(n, eps, cfg.delta, &pc));
            }
        }
    }
    rows
}

fn golden_unit_suite(cfg: &ReproduceConfig) -> Vec<Row> {
    let pc = cfg.protocol();
    let mut rows = Vec::new();
    for d in cfg.dims_or(&[2, 3]) {
        let mut targets = vec![("F_d".to_string(), protocols::qft_any(d)), ("dephasing".to_string(), QuantumChannel::dephasing(d))];
        targets.extend(random_channels(d, cfg.trials, cfg.seed).into_iter().enumerate().map(|(t, n)| (format!("trial={t}"), n)));
        for (label, n) in targets {
            push_report(&mut rows, &format!("d={d} {label}"), protocols::golden_unit_report(&n, &pc));
        }
    }
    rows
}

fn golden_values_suite(cfg: &ReproduceConfig) -> Vec<Row> {
    let s = &cfg.solver;
    let mut rows = Vec::new();
    let dims = cfg.dims_or(&[2, 3, 4]);
    for &d in &dims {
        let logd = (d as f64).log2();
        let f = protocols::qft_any(d);
        let r = QuantumChannel::replacement(d);
        let case = format!("d={d}");
        let cases: [(&str, &QuantumChannel, f64, bool); 4] = [
            ("LR(F_d) = 2 log d", &f, 2.0 * logd, false),
            ("LR_dephasing(F_d) = 2 log d", &f, 2.0 * logd, true),
            ("LR(R_d) = log d", &r, logd, false),
            ("LR_dephasing(R_d) = log d", &r, logd, true),
        ];
        for (claim, n, want, dephasing) in cases {
            let got = if dephasing { measures::lr_dephasing(n) } else { measures::lr_channel(n, s) };
            match got {
                Ok(v) => rows.push(Row::from_claim(&case, &Claim::le(claim, (v.value - want).abs(), 1e-5, 0.0))),
                Err(e) => rows.push(Row::failed(&case, claim, e)),
            }
        }
        if d <= 3 {
            let worst = qobj::deterministic_tables(d, d)
                .map(|t| {
                    let q = QuantumChannel::deterministic(d, d, &t).expect("table");
                    (f.choi().re_trace_product(q.choi()) - 1.0 / (d * d) as f64).abs()
                })
                .fold(0.0, f64::max);
            rows.push(Row::from_claim(&case, &Claim::le("Tr(J^F J^Q) = 1/d^2 for all deterministic Q", worst, 1e-12, 0.0)));
        }
        if d <= 3 {
            match measures::cr_channel(&f, s) {
                Ok(v) => {
                    rows.push(Row::from_claim(&case, &Claim::le("CR(F_d) = d^2 - 1", (v.value - (d * d) as f64 + 1.0).abs(), 1e-4, 0.0)))
                }
                Err(e) => rows.push(Row::failed(&case, "CR(F_d) = d^2 - 1", e)),
            }
        }
    }
    match protocols::regularization_sanity(&protocols::qft_any(2), 0.0, 2, &cfg.protocol()) {
        Ok(table) => {
            for r in table {
                let case = format!("F_2 k={}", r.k);
                rows.push(Row::from_claim(&case, &Claim::le("per-copy LR = 2", (r.per_copy - 2.0).abs(), 1e-5, 0.0)));
                rows.push(Row::from_claim(&case, &Claim::le("width = 2/k", (r.width - 2.0 / r.k as f64).abs(), 0.0, 0.0)));
            }
        }
        Err(e) => rows.push(Row::failed("F_2", "regularization", e)),
    }
    rows
}

fn replacement_suite(cfg: &ReproduceConfig) -> Vec<Row> {
    let pc = cfg.protocol();
    let mut rows = Vec::new();
    for d in cfg.dims_or(&[2, 3]) {
        push_report(&mut rows, &format!("d={d}"), protocols::replacement_report(d, &pc));
    }
    rows
}
