use std::collections::BTreeMap;
use std::io::Read;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use orbint_core::closed_forms::gl3_aniso_j;
use orbint_core::moment_graph::{
    min_formal_poincare_bnb, min_formal_poincare_exhaustive, MinResult, BNB_BUDGET, EXHAUSTIVE_CAP,
};
use orbint_core::polytopes::{default_xi, XI_PRIME};
use orbint_core::{
    ak_count, arthur_j, eval_formula, min_formal_poincare, orbital_integral, CountRequest, Error, FormulaId,
    FundamentalDomainTable, LeviSpec, MomentGraph, Oracle, Params, QPoly, RegularElementSpec, TPoly,
};

#[derive(Parser)]
#[command(name = "orbint", version, about = "Point counts of truncated affine Springer fibers for GL2 and GL3")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Polynomial in q from the counting engine.
    Compute {
        #[command(flatten)]
        case: CaseArgs,
        #[arg(long, value_enum, ignore_case = true, default_value = "J")]
        what: What,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Lattice enumeration over F_q.
    Oracle {
        #[command(flatten)]
        case: CaseArgs,
        #[arg(long, value_enum, ignore_case = true, default_value = "F")]
        what: What,
        #[arg(long, default_value_t = orbint_core::oracle::DEFAULT_BUDGET)]
        budget: u64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Closed form, engine and oracle side by side for each q.
    Compare {
        #[command(flatten)]
        case: CaseArgs,
        #[arg(long, value_enum, ignore_case = true, default_value = "J")]
        what: What,
        #[arg(long, default_value_t = orbint_core::oracle::DEFAULT_BUDGET)]
        budget: u64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Poincaré polynomial P(t) of the fundamental domain, with P(sqrt q) at each q.
    Poincare {
        #[command(flatten)]
        case: CaseArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Minimal formal Poincaré polynomial over the orders of a moment graph.
    GraphMin {
        /// JSON file `{"vertices": [...], "edges": [[u, v], ...]}`, or `-` for stdin.
        #[arg(long)]
        graph: String,
        #[arg(long, value_enum, default_value = "auto")]
        method: Method,
        #[arg(long, default_value_t = BNB_BUDGET)]
        budget: u64,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GroupArg {
    Gl2,
    Gl3,
}

#[derive(Clone, Copy, ValueEnum)]
enum CaseArg {
    Split,
    Mixed,
    Aniso,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum What {
    /// Weighted orbital integral J^ξ.
    #[value(name = "J")]
    J,
    /// Orbital integral.
    #[value(name = "I")]
    I,
    /// Fundamental domain count.
    #[value(name = "F")]
    F,
    /// Truncated count at (a1, a2).
    #[value(name = "Q")]
    Q,
}

impl What {
    fn name(self) -> &'static str {
        match self {
            What::J => "J",
            What::I => "I",
            What::F => "F",
            What::Q => "Q",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Auto,
    Exhaustive,
    Bnb,
}

#[derive(Args)]
struct CaseArgs {
    #[arg(long, value_enum)]
    group: GroupArg,
    #[arg(long = "case", value_enum)]
    kind: CaseArg,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    n1: Option<u32>,
    #[arg(long)]
    n2: Option<u32>,
    #[arg(long)]
    m: Option<u32>,
    #[arg(long)]
    a1: Option<i64>,
    #[arg(long)]
    a2: Option<i64>,
    /// Component `val det`; defaults to the element's base component.
    #[arg(long)]
    nu0: Option<i64>,
}

#[derive(Args)]
struct OutArgs {
    /// Residue field sizes, e.g. `--q 2,3`.
    #[arg(long, value_delimiter = ',')]
    q: Vec<u8>,
    #[arg(long)]
    json: bool,
}

enum Failure {
    Core(Error),
    Usage(String),
    Mismatch(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Mismatch(_) => 1,
            Failure::Core(e) => match e {
                Error::BudgetExceeded { .. } => 3,
                Error::InvalidParams(_)
                | Error::BranchMismatch(_)
                | Error::UnsupportedGroup(_)
                | Error::NotRegular(_)
                | Error::NotSufficientlyRegular(_)
                | Error::OutOfValidityRegion(_)
                | Error::PositivityViolated(_)
                | Error::Parse(_) => 2,
                _ => 1,
            },
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Core(e) => e.to_string(),
            Failure::Usage(m) | Failure::Mismatch(m) => m.clone(),
        }
    }
}

type Outcome<T> = Result<T, Failure>;

impl CaseArgs {
    fn spec(&self) -> Outcome<RegularElementSpec> {
        let need =
            |v: Option<u32>, name: &str| v.ok_or_else(|| Failure::Usage(format!("--{name} is required for this case")));
        let forbid = |names: &[(&str, Option<u32>)]| -> Outcome<()> {
            match names.iter().find(|(_, v)| v.is_some()) {
                Some((k, _)) => Err(Failure::Usage(format!("--{k} does not apply to this case"))),
                None => Ok(()),
            }
        };
        let spec = match (self.group, self.kind) {
            (GroupArg::Gl2, CaseArg::Split) | (GroupArg::Gl2, CaseArg::Aniso) => {
                forbid(&[("n1", self.n1), ("n2", self.n2), ("m", self.m)])?;
                let n = need(self.n, "n")?;
                if matches!(self.kind, CaseArg::Split) {
                    RegularElementSpec::Gl2Split { n }
                } else {
                    RegularElementSpec::Gl2Aniso { n }
                }
            }
            (GroupArg::Gl2, CaseArg::Mixed) => return Err(Failure::Usage("gl2 has no mixed case".into())),
            (GroupArg::Gl3, CaseArg::Mixed) => {
                forbid(&[("n1", self.n1), ("n2", self.n2)])?;
                RegularElementSpec::Gl3Mixed { m: need(self.m, "m")?, n: need(self.n, "n")? }
            }
            (GroupArg::Gl3, kind) => {
                forbid(&[("n", self.n), ("m", self.m)])?;
                let (n1, n2) = (need(self.n1, "n1")?, need(self.n2, "n2")?);
                if matches!(kind, CaseArg::Split) {
                    RegularElementSpec::Gl3Split { n1, n2 }
                } else {
                    RegularElementSpec::Gl3Aniso { n1, n2 }
                }
            }
        };
        spec.validate()?;
        Ok(spec)
    }

    fn nu0(&self, spec: &RegularElementSpec) -> i64 {
        self.nu0.unwrap_or_else(|| spec.default_nu0())
    }

    fn a(&self, spec: &RegularElementSpec) -> Outcome<Vec<i64>> {
        let d = spec.m0().num_blocks() - 1;
        let given: Vec<i64> = [self.a1, self.a2].into_iter().flatten().collect();
        if given.len() != d || (d == 1 && self.a1.is_none()) {
            let names = ["--a1", "--a1 and --a2"];
            return Err(Failure::Usage(match d {
                0 => "this case takes no truncation parameters".into(),
                _ => format!("Q for {spec} needs {}", names[d - 1]),
            }));
        }
        Ok(given)
    }

    fn params_json(&self, spec: &RegularElementSpec, what: Option<What>) -> Outcome<Value> {
        let mut p = spec.params_json();
        p["nu0"] = json!(self.nu0(spec));
        if let Some(w) = what {
            p["what"] = json!(w.name());
            if w == What::Q {
                p["a"] = json!(self.a(spec)?);
            }
        }
        Ok(p)
    }
}

fn int_json(x: i128) -> Value {
    match i64::try_from(x) {
        Ok(v) => json!(v),
        Err(_) => json!(x.to_string()),
    }
}

fn evaluations(p: &QPoly, qs: &[u8]) -> Outcome<BTreeMap<String, Value>> {
    qs.iter().map(|&q| Ok((q.to_string(), int_json(p.evaluate(q as i64)?)))).collect()
}

fn fundamental_domain(spec: &RegularElementSpec, nu0: i64) -> Outcome<QPoly> {
    let table = FundamentalDomainTable::from_closed_forms(spec)?;
    let g = LeviSpec::whole(spec.n());
    Ok(table.get(&g, &g.class_of(&[nu0]))?.clone())
}

/// Engine value and how it was obtained.
fn engine(case: &CaseArgs, spec: &RegularElementSpec, what: What) -> Outcome<(QPoly, Value)> {
    let nu0 = case.nu0(spec);
    let xi = default_xi(&spec.m0()).to_string();
    Ok(match what {
        What::J => {
            if nu0 != spec.default_nu0() {
                return Err(Failure::Usage("J is computed on the base component only; drop --nu0".into()));
            }
            let j = arthur_j(spec)?;
            let prov = json!({
                "pipeline": "ak_count - hn_main_body - tail",
                "xi": xi,
                "xi_prime": XI_PRIME,
                "volume_sq": j.volume_sq,
                "arthur_j": j.render(),
            });
            (j.poly, prov)
        }
        What::I => (orbital_integral(spec)?, json!({"pipeline": "orbital_integral"})),
        What::F => {
            (fundamental_domain(spec, nu0)?, json!({"pipeline": "fundamental_domain_table", "source": "closed_forms"}))
        }
        What::Q => {
            let a = case.a(spec)?;
            let req = CountRequest::new(*spec, &a)?.with_nu0(nu0);
            let table = FundamentalDomainTable::from_closed_forms(spec)?;
            (ak_count(&req, &table)?, json!({"pipeline": "ak_count", "xi": xi, "xi_prime": XI_PRIME}))
        }
    })
}

/// The displayed closed form, where one exists for the case.
fn closed_form(case: &CaseArgs, spec: &RegularElementSpec, what: What) -> Outcome<Option<QPoly>> {
    use FormulaId as F;
    use RegularElementSpec::*;
    let p = match *spec {
        Gl2Split { n } | Gl2Aniso { n } => Params::gl2(n as i64),
        Gl3Split { n1, n2 } | Gl3Aniso { n1, n2 } => Params::gl3(n1 as i64, n2 as i64),
        Gl3Mixed { m, n } => Params::mixed(m as i64, n as i64),
    };
    let id = match (spec, what) {
        (Gl3Aniso { n1, n2 }, What::J | What::F) => return Ok(Some(gl3_aniso_j(*n1 as i64, *n2 as i64)?)),
        (Gl2Split { .. }, What::J) => F::Gl2SplitJ,
        (Gl2Split { .. }, What::F) => F::Gl2SplitF,
        (Gl2Split { .. }, What::I) => F::Gl2SplitI,
        (Gl2Split { .. }, What::Q) => F::Gl2SplitQ,
        (Gl2Aniso { .. }, What::J | What::F) => F::Gl2Aniso,
        (Gl3Split { .. }, What::J) => F::Gl3SplitJ,
        (Gl3Split { .. }, What::F) => F::Gl3SplitPoincare,
        (Gl3Split { .. }, What::I) => F::Gl3SplitI,
        (Gl3Split { .. }, What::Q) => F::Gl3SplitQAk,
        (Gl3Mixed { .. }, What::J) => F::Gl3MixedJ,
        (Gl3Mixed { .. }, What::F) => F::Gl3MixedF,
        (Gl3Mixed { .. }, What::I) => F::Gl3MixedI,
        _ => return Ok(None),
    };
    if case.nu0(spec) != spec.default_nu0() {
        return Ok(None);
    }
    let p = if what == What::Q { p.with_a(&case.a(spec)?) } else { p };
    Ok(Some(eval_formula(id, &p)?))
}

struct OracleRun {
    count: u64,
    nodes: u64,
    target: String,
}

fn run_oracle(case: &CaseArgs, spec: &RegularElementSpec, what: What, q: u8, budget: u64) -> Outcome<OracleRun> {
    let o = Oracle::new(spec, q)?.with_nu0(case.nu0(spec)).with_budget(budget);
    let elliptic = spec.m0().is_whole();
    let report = match what {
        What::F => o.count_fundamental_domain()?,
        What::J if elliptic => o.count_fundamental_domain()?,
        What::J => o.count_xi_stable(&default_xi(&spec.m0()))?,
        What::Q => {
            let req = CountRequest::new(*spec, &case.a(spec)?)?.with_nu0(case.nu0(spec));
            o.count_truncated(&req.regular_pi()?)?
        }
        What::I => return Err(Failure::Usage("the oracle counts J, F or Q; I has no lattice count".into())),
    };
    Ok(OracleRun { count: report.count, nodes: report.nodes, target: report.target })
}

fn record(command: &str, params: Value, result: Option<String>, values: BTreeMap<String, Value>, prov: Value) -> Value {
    json!({
        "command": command,
        "params": params,
        "result_poly": result,
        "values": values,
        "provenance": prov,
    })
}

fn emit(json_out: bool, rec: &Value, text: &[String]) {
    if json_out {
        println!("{}", serde_json::to_string_pretty(rec).expect("json"));
    } else {
        for line in text {
            println!("{line}");
        }
    }
}

fn cmd_compute(case: &CaseArgs, what: What, out: &OutArgs) -> Outcome<()> {
    let spec = case.spec()?;
    let (poly, prov) = engine(case, &spec, what)?;
    let values = evaluations(&poly, &out.q)?;
    let mut text = vec![poly.to_string()];
    text.extend(values.iter().map(|(q, v)| format!("q={q}: {v}")));
    let rec = record("compute", case.params_json(&spec, Some(what))?, Some(poly.to_string()), values, prov);
    emit(out.json, &rec, &text);
    Ok(())
}

fn cmd_oracle(case: &CaseArgs, what: What, budget: u64, out: &OutArgs) -> Outcome<()> {
    let spec = case.spec()?;
    let qs = if out.q.is_empty() { vec![2] } else { out.q.clone() };
    let mut values = BTreeMap::new();
    let mut runs = BTreeMap::new();
    let mut text = Vec::new();
    for q in qs {
        let r = run_oracle(case, &spec, what, q, budget)?;
        text.push(format!("q={q} {}: {}", what.name(), r.count));
        values.insert(q.to_string(), json!(r.count));
        runs.insert(q.to_string(), json!({"target": r.target, "nodes": r.nodes}));
    }
    let prov = json!({"source": "oracle", "budget": budget, "runs": runs, "xi": default_xi(&spec.m0()).to_string()});
    let rec = record("oracle", case.params_json(&spec, Some(what))?, None, values, prov);
    emit(out.json, &rec, &text);
    Ok(())
}

fn cmd_compare(case: &CaseArgs, what: What, budget: u64, out: &OutArgs) -> Outcome<()> {
    let spec = case.spec()?;
    if what == What::I {
        return Err(Failure::Usage("compare needs an oracle count; use J, F or Q".into()));
    }
    let qs = if out.q.is_empty() { vec![2, 3] } else { out.q.clone() };
    let formula = closed_form(case, &spec, what)?;
    let (poly, prov) = engine(case, &spec, what)?;
    let mut rows = Vec::new();
    let mut text = vec![format!("{:>3}  {:>12}  {:>12}  {:>12}  status", "q", "formula", "engine", "oracle")];
    let mut values = BTreeMap::new();
    let mut worst: Option<Failure> = None;
    for q in qs {
        let f = formula.as_ref().map(|p| p.evaluate(q as i64)).transpose()?;
        let e = poly.evaluate(q as i64)?;
        let (o, status, note) = match run_oracle(case, &spec, what, q, budget) {
            Ok(r) => {
                let agree = r.count as i128 == e && f.map_or(true, |f| f == e);
                (Some(r.count), if agree { "PASS" } else { "FAIL" }, None)
            }
            Err(Failure::Core(err @ Error::BudgetExceeded { .. })) => {
                let m = err.to_string();
                worst = Some(Failure::Core(err));
                (None, "BUDGET", Some(m))
            }
            Err(Failure::Core(err @ Error::InvalidParams(_))) => {
                let m = err.to_string();
                if !matches!(worst, Some(Failure::Core(Error::BudgetExceeded { .. }))) {
                    worst = Some(Failure::Core(err));
                }
                (None, "NO-ORACLE", Some(m))
            }
            Err(other) => return Err(other),
        };
        if status == "FAIL" && worst.is_none() {
            worst = Some(Failure::Mismatch(format!("values disagree at q = {q}")));
        }
        let show = |x: Option<i128>| x.map_or("-".to_string(), |v| v.to_string());
        text.push(format!("{q:>3}  {:>12}  {e:>12}  {:>12}  {status}", show(f), show(o.map(|c| c as i128))));
        if let Some(m) = &note {
            text.push(format!("     {m}"));
        }
        values.insert(q.to_string(), int_json(e));
        rows.push(json!({
            "q": q,
            "formula": f.map(int_json),
            "engine": int_json(e),
            "oracle": o,
            "status": status,
            "note": note,
        }));
    }
    let prov = json!({"engine": prov, "formula": formula.as_ref().map(|p| p.to_string()), "rows": rows});
    let rec = record("compare", case.params_json(&spec, Some(what))?, Some(poly.to_string()), values, prov);
    emit(out.json, &rec, &text);
    match worst {
        Some(f) => Err(f),
        None => Ok(()),
    }
}

fn cmd_poincare(case: &CaseArgs, out: &OutArgs) -> Outcome<()> {
    let spec = case.spec()?;
    let nu0 = case.nu0(&spec);
    let (t, source) = match spec {
        RegularElementSpec::Gl3Split { n1, n2 } if nu0 == spec.default_nu0() => {
            (orbint_core::closed_forms::gl3_split_poincare(n1 as i64, n2 as i64), "gl3_split_poincare")
        }
        _ => {
            let f = fundamental_domain(&spec, nu0)?;
            (TPoly::from_terms(f.terms().map(|(e, c)| (2 * e, c))), "fundamental_domain_table at q = t^2")
        }
    };
    let mut values = BTreeMap::new();
    for &q in &out.q {
        values.insert(q.to_string(), int_json(t.evaluate_at_sqrt(q as i64)?));
    }
    let mut text = vec![t.to_string()];
    text.extend(values.iter().map(|(q, v)| format!("t^2={q}: {v}")));
    let rec =
        record("poincare", case.params_json(&spec, None)?, Some(t.to_string()), values, json!({"source": source}));
    emit(out.json, &rec, &text);
    Ok(())
}

fn read_graph(path: &str) -> Outcome<MomentGraph> {
    let raw = if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| Failure::Usage(format!("stdin: {e}")))?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{path}: {e}")))?
    };
    let v: Value = serde_json::from_str(&raw).map_err(|e| Failure::Usage(format!("{path}: {e}")))?;
    Ok(MomentGraph::from_json(&v)?)
}

fn cmd_graph_min(path: &str, method: Method, budget: u64, json_out: bool) -> Outcome<()> {
    let g = read_graph(path)?;
    let r: MinResult = match method {
        Method::Auto => min_formal_poincare(&g)?,
        Method::Exhaustive => min_formal_poincare_exhaustive(&g, EXHAUSTIVE_CAP)?,
        Method::Bnb => min_formal_poincare_bnb(&g, budget)?,
    };
    let witness: Vec<&str> = r.witness.0.iter().map(|&v| g.labels[v].as_str()).collect();
    let method_name = match method {
        Method::Auto => "auto",
        Method::Exhaustive => "exhaustive",
        Method::Bnb => "bnb",
    };
    let params = json!({"graph": g.to_json(), "method": method_name});
    let prov = json!({"betti": r.betti, "witness": witness, "nodes": r.nodes});
    let text = vec![r.poly.to_string(), format!("betti: {:?}", r.betti), format!("order: {}", witness.join(" < "))];
    let rec = record("graph-min", params, Some(r.poly.to_string()), BTreeMap::new(), prov);
    emit(json_out, &rec, &text);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.command {
        Command::Compute { case, what, out } => cmd_compute(case, *what, out),
        Command::Oracle { case, what, budget, out } => cmd_oracle(case, *what, *budget, out),
        Command::Compare { case, what, budget, out } => cmd_compare(case, *what, *budget, out),
        Command::Poincare { case, out } => cmd_poincare(case, out),
        Command::GraphMin { graph, method, budget, json } => cmd_graph_min(graph, *method, *budget, *json),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
