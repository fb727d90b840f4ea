use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use dyncoh::conic::{ConicError, SolveReport, SolverSettings};
use dyncoh::measures::{self, MeasureError, MeasureResult, Witness};
use dyncoh::protocols::{self, FreeClass, ProtocolConfig, ProtocolError, ProtocolReport};
use dyncoh::qobj::{self, QobjError, QuantumChannel, QuantumState};
use dyncoh::reproduce::{self, ReproduceConfig, Suite, Tolerances};
use dyncoh::spec::{self, ChannelSpec, MatrixSpec, SpecError, SuperchannelSpec};
use dyncoh::supermap::{self, SupermapError};

use crate::{ChannelAction, ChannelInput, ClassArg, Cli, Command, MeasureKind, PropertyArg};

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Solver(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Solver(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "{m}"),
            CliError::Solver(m) => write!(f, "solver failure: {m}"),
        }
    }
}

fn from_measure(e: MeasureError) -> CliError {
    match e {
        MeasureError::Solver(ConicError::Malformed(m)) => CliError::Input(m),
        MeasureError::Solver(c) => CliError::Solver(c.to_string()),
        MeasureError::Linalg(l) => CliError::Solver(l.to_string()),
        other => CliError::Input(other.to_string()),
    }
}

fn from_supermap(e: SupermapError) -> CliError {
    match e {
        SupermapError::Measure(m) => from_measure(m),
        SupermapError::Linalg(l) => CliError::Solver(l.to_string()),
        other => CliError::Input(other.to_string()),
    }
}

impl From<MeasureError> for CliError {
    fn from(e: MeasureError) -> Self {
        from_measure(e)
    }
}

impl From<SupermapError> for CliError {
    fn from(e: SupermapError) -> Self {
        from_supermap(e)
    }
}

impl From<ProtocolError> for CliError {
    fn from(e: ProtocolError) -> Self {
        match e {
            ProtocolError::Measure(m) => from_measure(m),
            ProtocolError::Supermap(s) => from_supermap(s),
            ProtocolError::Conic(c) => CliError::Solver(c.to_string()),
            ProtocolError::Linalg(l) => CliError::Solver(l.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<SpecError> for CliError {
    fn from(e: SpecError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<QobjError> for CliError {
    fn from(e: QobjError) -> Self {
        CliError::Input(e.to_string())
    }
}

/// Result of a command, ready for any output format.
pub struct Outcome {
    pub value: Value,
    pub text: String,
    pub pass: bool,
    /// Tabular form for CSV, when the report is naturally a table.
    pub table: Option<(Vec<String>, Vec<Vec<String>>)>,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report serialises")
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// A JSON file if the path exists, otherwise a builder shorthand.
fn load_channel(arg: &str) -> Result<QuantumChannel, CliError> {
    let path = Path::new(arg);
    let spec = if path.is_file() {
        spec::parse_channel_json(&read_file(path)?).map_err(|e| CliError::Input(format!("{arg}: {e}")))?
    } else {
        ChannelSpec::parse_shorthand(arg)?
    };
    spec.build().map_err(|e| CliError::Input(format!("{arg}: {e}")))
}

fn channel_of(input: &ChannelInput) -> Result<QuantumChannel, CliError> {
    match (&input.builder, &input.spec) {
        (Some(b), None) => Ok(ChannelSpec::parse_shorthand(b)?.build()?),
        (None, Some(s)) => load_channel(s),
        (Some(_), Some(_)) => Err(CliError::Input("give either --builder or a spec, not both".into())),
        (None, None) => Err(CliError::Input("missing channel: pass --builder NAME:ARGS or a spec file".into())),
    }
}

fn pair(a: &Option<String>, b: &Option<String>) -> Result<(QuantumChannel, QuantumChannel), CliError> {
    match (a, b) {
        (Some(a), Some(b)) => Ok((load_channel(a)?, load_channel(b)?)),
        _ => Err(CliError::Input("this measure needs --a and --b".into())),
    }
}

fn check_eps(eps: f64) -> Result<(), CliError> {
    if (0.0..1.0).contains(&eps) {
        Ok(())
    } else {
        Err(CliError::Input(format!("eps = {eps} outside [0, 1)")))
    }
}

fn class_of(c: ClassArg) -> FreeClass {
    match c {
        ClassArg::Misc => FreeClass::Misc,
        ClassArg::Disc => FreeClass::Disc,
    }
}

fn witness_value(w: &Witness) -> Value {
    let ch = |c: &QuantumChannel| to_value(&ChannelSpec::from_channel(c));
    match w {
        Witness::Channel(c) => json!({ "kind": "channel", "channel": ch(c) }),
        Witness::SmoothedPair { smoothed, classical } => {
            json!({ "kind": "smoothed_pair", "smoothed": ch(smoothed), "classical": ch(classical) })
        }
        Witness::State(m) => json!({ "kind": "state", "matrix": to_value(&MatrixSpec::from_matrix(m)) }),
        Witness::Operator(m) => json!({ "kind": "operator", "matrix": to_value(&MatrixSpec::from_matrix(m)) }),
    }
}

#[derive(Serialize)]
struct MeasureReport<'a> {
    measure: &'a str,
    eps: f64,
    value: f64,
    bound: Option<f64>,
    solver: &'a [SolveReport],
    tolerances: Tolerances,
    witness: Option<Value>,
}

fn measure_outcome(name: &str, eps: f64, r: &MeasureResult, s: &SolverSettings) -> Outcome {
    let rep = MeasureReport {
        measure: name,
        eps,
        value: r.value,
        bound: r.bound,
        solver: &r.solver,
        tolerances: Tolerances::current(s),
        witness: r.witness.as_ref().map(witness_value),
    };
    let mut text = format!("{name} = {:.10}", r.value);
    if let Some(b) = r.bound {
        let _ = write!(text, "  (other-side bound {b:.10})");
    }
    let iters: usize = r.solver.iter().map(|x| x.iterations).sum();
    let _ = write!(text, "\nsolver: {} solve(s), {iters} iterations", r.solver.len());
    Outcome { value: to_value(&rep), text, pass: true, table: None }
}

fn protocol_outcome(rep: &ProtocolReport, s: &SolverSettings, emit: Option<&Path>) -> Result<Outcome, CliError> {
    if let (Some(path), Some(theta)) = (emit, &rep.superchannel) {
        let body = serde_json::to_string_pretty(&SuperchannelSpec::from_superchannel(theta)).expect("spec serialises");
        crate::output::write_atomic(path, format!("{body}\n").as_bytes())?;
    }
    let mut value = to_value(rep);
    value["tolerances"] = to_value(&Tolerances::current(s));
    let mut text = format!("{}: {}\n", rep.protocol, if rep.pass { "PASS" } else { "FAIL" });
    if let Some(r) = rep.achieved_rate {
        let _ = writeln!(text, "achieved rate log d^2 = {r:.6} bits");
    }
    if let Some(l) = rep.lower {
        let _ = writeln!(text, "lower = {l:.6}");
    }
    if let Some(u) = rep.upper {
        let _ = writeln!(text, "upper = {u:.6}");
    }
    for (k, v) in &rep.parameters {
        let _ = writeln!(text, "  {k} = {v}");
    }
    for c in &rep.certificates {
        let _ = writeln!(
            text,
            "[{}] certificate {:?}: residual {:.3e} <= {:.3e}",
            if c.pass { "pass" } else { "FAIL" },
            c.property,
            c.residual,
            c.tolerance
        );
    }
    for c in &rep.claims {
        let _ = writeln!(text, "[{}] {}: {:.6e} {} {:.6e}", if c.pass { "pass" } else { "FAIL" }, c.name, c.lhs, c.relation, c.rhs);
    }
    for n in &rep.notes {
        let _ = writeln!(text, "note: {n}");
    }
    Ok(Outcome { value, text: text.trim_end().to_string(), pass: rep.pass, table: None })
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let s = cli.global.solver()?;
    let pc = |inputs: usize| ProtocolConfig { solver: s.clone(), random_inputs: inputs, seed: cli.global.seed };
    match &cli.command {
        Command::Measure { kind, channel, a, b, eps, class, inputs } => {
            check_eps(*eps)?;
            let (name, r) = match kind {
                MeasureKind::Lr => {
                    let n = channel_of(channel)?;
                    if *eps > 0.0 {
                        ("lr_smoothed", measures::lr_smoothed(&n, *eps, &s)?)
                    } else {
                        ("lr", measures::lr_channel(&n, &s)?)
                    }
                }
                MeasureKind::Lrdelta => {
                    let n = channel_of(channel)?;
                    if *eps > 0.0 {
                        ("lr_dephasing_smoothed", measures::lr_dephasing_smoothed(&n, *eps, &s)?)
                    } else {
                        ("lr_dephasing", measures::lr_dephasing(&n)?)
                    }
                }
                MeasureKind::Cr => ("cr", measures::cr_channel(&channel_of(channel)?, &s)?),
                MeasureKind::Dmax => {
                    let (x, y) = pair(a, b)?;
                    let v = measures::dmax_channel(&x, &y)?;
                    ("dmax", MeasureResult { value: v, bound: None, witness: None, solver: vec![] })
                }
                MeasureKind::Diamond => {
                    let (x, y) = pair(a, b)?;
                    ("diamond", measures::diamond_distance(&x, &y, &s)?)
                }
                MeasureKind::Htest => {
                    let (x, y) = pair(a, b)?;
                    let rho = QuantumState::new(x.choi().clone())?;
                    ("htest", measures::htest_state(&rho, y.choi(), *eps, &s)?)
                }
                MeasureKind::Ch => {
                    let n = channel_of(channel)?;
                    let ins = measures::default_inputs(n.din(), *inputs, cli.global.seed);
                    match class {
                        ClassArg::Misc => ("ch_coherence_lb", measures::ch_coherence_lb(&n, *eps, &ins, &s)?),
                        ClassArg::Disc => ("ch_dephasing_lb", measures::ch_dephasing_lb(&n, *eps, &ins, &s)?),
                    }
                }
            };
            Ok(measure_outcome(name, *eps, &r, &s))
        }
        Command::Cost { channel, class, eps, emit_superchannel } => {
            check_eps(*eps)?;
            let n = channel_of(channel)?;
            let rep = protocols::one_shot_cost(&n, *eps, class_of(*class), &pc(0))?;
            protocol_outcome(&rep, &s, emit_superchannel.as_deref())
        }
        Command::DistillBound { channel, class, eps, inputs } => {
            check_eps(*eps)?;
            let n = channel_of(channel)?;
            let rep = protocols::one_shot_distill_bound(&n, *eps, class_of(*class), &pc(*inputs))?;
            protocol_outcome(&rep, &s, None)
        }
        Command::Catalytic { channel, eps, delta, emit_superchannel } => {
            check_eps(*eps)?;
            let n = channel_of(channel)?;
            let rep = protocols::catalytic_cost(&n, *eps, *delta, &pc(0))?;
            protocol_outcome(&rep, &s, emit_superchannel.as_deref())
        }
        Command::Verify { property, delta, superchannel } => {
            let text = read_file(superchannel)?;
            let theta = spec::parse_superchannel_json(&text)
                .and_then(|sp| sp.build())
                .map_err(|e| CliError::Input(format!("{}: {e}", superchannel.display())))?;
            let v = match property {
                PropertyArg::Admissible => supermap::admissibility_check(&theta)?,
                PropertyArg::Misc => supermap::misc_check(&theta)?,
                PropertyArg::Disc => supermap::disc_check(&theta)?,
                PropertyArg::DeltaMisc => supermap::delta_misc_check(&theta, *delta, &s)?,
            };
            let d = theta.dims();
            let value = json!({
                "verdict": to_value(&v),
                "dims": to_value(&d),
                "tolerances": to_value(&Tolerances::current(&s)),
            });
            let text = format!(
                "{:?}: {} (residual {:.3e}, tolerance {:.3e})",
                v.property,
                if v.pass { "PASS" } else { "FAIL" },
                v.residual,
                v.tolerance
            );
            Ok(Outcome { value, text, pass: v.pass, table: None })
        }
        Command::Reproduce { suite, d, eps, delta, trials, inputs } => {
            let suites = Suite::parse_list(suite).map_err(CliError::Input)?;
            let cfg = ReproduceConfig {
                dims: d.clone(),
                eps: eps.clone(),
                delta: *delta,
                trials: *trials,
                seed: cli.global.seed,
                random_inputs: *inputs,
                solver: s.clone(),
            };
            let rep = reproduce::run(&suites, &cfg).map_err(CliError::Input)?;
            let header = ["suite", "case", "claim", "lhs", "relation", "rhs", "tol", "pass", "error"].map(String::from).to_vec();
            let mut rows = Vec::new();
            let mut text = String::new();
            for sr in &rep.suites {
                let _ = writeln!(text, "== {} : {}/{} pass", sr.suite.name(), sr.passed, sr.total);
                for r in &sr.rows {
                    let _ = writeln!(
                        text,
                        "[{}] {:<28} {}: {:.6e} {} {:.6e}{}",
                        if r.pass { "pass" } else { "FAIL" },
                        r.case,
                        r.claim,
                        r.lhs,
                        r.relation,
                        r.rhs,
                        r.error.as_deref().map(|e| format!("  ({e})")).unwrap_or_default()
                    );
                    rows.push(vec![
                        sr.suite.name().to_string(),
                        r.case.clone(),
                        r.claim.clone(),
                        r.lhs.to_string(),
                        r.relation.to_string(),
                        r.rhs.to_string(),
                        r.tol.to_string(),
                        r.pass.to_string(),
                        r.error.clone().unwrap_or_default(),
                    ]);
                }
            }
            Ok(Outcome { value: to_value(&rep), text: text.trim_end().to_string(), pass: rep.pass, table: Some((header, rows)) })
        }
        Command::Channel { action: ChannelAction::Info { channel } } => {
            let n = channel_of(channel)?;
            let classes: Vec<_> = [qobj::ChannelClass::Classical, qobj::ChannelClass::Mio, qobj::ChannelClass::Dio, qobj::ChannelClass::Di]
                .into_iter()
                .map(|c| qobj::class_check(&n, c))
                .collect();
            let lrd = measures::lr_dephasing(&n)?;
            let value = json!({
                "din": n.din(),
                "dout": n.dout(),
                "classes": to_value(&classes),
                "lr_dephasing": lrd.value,
                "choi": to_value(&MatrixSpec::from_matrix(n.choi())),
            });
            let mut text = format!("channel {} -> {}\n", n.din(), n.dout());
            for c in &classes {
                let _ = writeln!(text, "  {:?}: {} (residual {:.3e})", c.class, if c.pass { "yes" } else { "no" }, c.residual);
            }
            let _ = write!(text, "  LR_dephasing = {:.10}", lrd.value);
            Ok(Outcome { value, text, pass: true, table: None })
        }
    }
}
