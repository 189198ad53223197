use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use isochron::catalog::{load_catalog, verify_entry, CatalogEntry, EntryReport, Verdict, VerifyConfig};
use isochron::groebner::{buchberger_with_budget, GbError, Ideal, DEFAULT_PAIR_BUDGET};
use isochron::isochrony::{c_algorithm, urabe_series, verify_urabe, DEFAULT_K, DEFAULT_N};
use isochron::lienard::{LienardPair, PlanarSystem};
use isochron::linearize::{harmonic_identity_check, linearizing_chart, potential_series};
use isochron::parse::{eval_series, format_system, parse_expr, parse_ideal_text, parse_system_text, FieldDecl, SystemFile};
use isochron::poly::template_weights;
use isochron::verify::{isochronicity_probe_with, reversible_any_axis, reversible_x_axis, NumericSystem, PROBE_AMPLITUDES};
use isochron::{MonomialOrder, ParamPoly, QuadNum, Rat, Scalar, Vars, XSeries};

#[derive(Parser)]
#[command(name = "isochron", version, about = "Isochronicity toolkit for planar polynomial centers")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct SysArgs {
    /// System file (`params`, `field`, `xdot = ...`, `ydot = ...`).
    file: PathBuf,
    /// Fix a parameter before running, e.g. `--param b20=1/2`.
    #[arg(long = "param", value_name = "NAME=VALUE")]
    params: Vec<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Reducibility conditions and the Liénard pair (f, g).
    Reduce(SysArgs),
    /// First K isochronicity conditions from the C-algorithm.
    Conditions {
        #[command(flatten)]
        sys: SysArgs,
        #[arg(long, default_value_t = DEFAULT_K)]
        k: usize,
        /// Series order; defaults to max(44, 2K + 4).
        #[arg(long)]
        n: Option<usize>,
    },
    /// Reduced Gröbner basis of a polynomial list or of a system's condition ideal.
    Groebner {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = OrderArg::Grevlex)]
        order: OrderArg,
        /// `auto` grades aIJ/bIJ symbols by i+j-1.
        #[arg(long, value_enum)]
        weights: Option<WeightsArg>,
        /// Number of C-algorithm conditions added to the reducibility conditions (system files only).
        #[arg(long, default_value_t = 0)]
        k: usize,
        #[arg(long, default_value_t = DEFAULT_PAIR_BUDGET)]
        budget: usize,
    },
    /// Urabe series h, or a check of a closed form given with --h.
    Urabe {
        #[command(flatten)]
        sys: SysArgs,
        #[arg(long, default_value_t = 20)]
        n: usize,
        /// Candidate h as an expression in `xi`.
        #[arg(long)]
        h: Option<String>,
    },
    /// The identity g' + f*g = 1.
    ZeroUrabe(SysArgs),
    /// Linearizing chart q(x), potential U(q) and the harmonic identity.
    Linearize {
        #[command(flatten)]
        sys: SysArgs,
        #[arg(long, default_value_t = 30)]
        n: usize,
    },
    /// Periods of orbits through (x0, 0).
    Period {
        #[command(flatten)]
        sys: SysArgs,
        #[arg(long, value_delimiter = ',', default_values_t = PROBE_AMPLITUDES)]
        x0: Vec<f64>,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        /// Allowed max |T - 2pi|.
        #[arg(long, default_value_t = 1e-6)]
        threshold: f64,
    },
    /// Time-reversibility about some line through the origin.
    Reversible(SysArgs),
    /// Bundled catalog of isochronous systems.
    Catalog {
        #[command(subcommand)]
        cmd: CatalogCmd,
    },
}

#[derive(Subcommand)]
enum CatalogCmd {
    /// Ids, status and plans.
    List,
    /// Print one entry as a system file.
    Show { id: String },
    /// Run each entry's verification plan.
    Verify {
        /// Restrict to these ids (repeatable).
        #[arg(long)]
        id: Vec<String>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Machine-readable report.
        #[arg(long)]
        json: bool,
        #[arg(long, default_value_t = DEFAULT_N)]
        n: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderArg {
    Lex,
    Grevlex,
}

#[derive(Clone, Copy, ValueEnum)]
enum WeightsArg {
    Auto,
}

enum Failure {
    Usage(String),
    Math(String),
}

type Outcome = Result<bool, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn math(msg: impl ToString) -> Failure {
    Failure::Math(msg.to_string())
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {}", path.display(), e)))
}

fn parse_value(s: &str) -> Result<Rat, Failure> {
    let e = parse_expr(s).map_err(|e| usage(format!("bad value '{}': {}", s, e.msg)))?;
    isochron::parse::eval_rat(&e).map_err(|e| usage(format!("bad value '{}': {}", s, e.msg)))
}

struct Loaded {
    path: PathBuf,
    file: SystemFile,
    fixed: Vec<(String, Rat)>,
}

impl Loaded {
    fn new(args: &SysArgs) -> Result<Self, Failure> {
        let text = read(&args.file)?;
        let file = parse_system_text(&text).map_err(|e| usage(format!("{}:{}", args.file.display(), e)))?;
        let mut fixed = Vec::new();
        for item in &args.params {
            let (name, value) = item.split_once('=').ok_or_else(|| usage(format!("expected NAME=VALUE, found '{}'", item)))?;
            let name = name.trim();
            if !file.params.iter().any(|p| p == name) {
                return Err(usage(format!("'{}' is not a parameter of {}", name, args.file.display())));
            }
            fixed.push((name.to_string(), parse_value(value.trim())?));
        }
        Ok(Loaded { path: args.file.clone(), file, fixed })
    }

    fn tol(&self) -> f64 {
        match self.file.field {
            FieldDecl::Float => VerifyConfig::default().float_tol,
            _ => 0.0,
        }
    }

    /// Evaluated system with fixed parameters substituted and dropped from the registry.
    fn system<K: Scalar>(&self) -> Result<PlanarSystem<K>, Failure> {
        let sys = self.file.system::<K>().map_err(|e| usage(format!("{}:{}", self.path.display(), e)))?;
        sys.to_cherkas().map_err(|e| usage(format!("{}: {}", self.path.display(), e)))?;
        if self.fixed.is_empty() {
            return Ok(sys);
        }
        let values: Vec<(&str, K)> = self.fixed.iter().map(|(n, v)| (n.as_str(), K::from_rat(v))).collect();
        let rest: Vec<&String> = self.file.params.iter().filter(|p| !self.fixed.iter().any(|(n, _)| n == *p)).collect();
        let target: Arc<Vars> = Vars::new(&rest);
        Ok(sys.instantiate(&values).map_params(|p| p.to_registry(&target).expect("substituted parameters are gone")))
    }
}

macro_rules! on_field {
    ($loaded:expr, $run:ident ( $($arg:expr),* )) => {{
        let l = &$loaded;
        match l.file.field {
            FieldDecl::Float => $run::<f64>(&l.system::<f64>()?, l.tol() $(, $arg)*),
            _ => $run::<QuadNum>(&l.system::<QuadNum>()?, l.tol() $(, $arg)*),
        }
    }};
}

fn lienard<K: Scalar>(sys: &PlanarSystem<K>, tol: f64) -> Result<LienardPair<K>, Failure> {
    let ch = sys.to_cherkas().map_err(math)?;
    ch.to_lienard(tol).map_err(math)
}

fn status(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

/// Truncated series as a sum of powers of `var`, followed by a comment giving the order.
fn series_expr<K: Scalar>(s: &XSeries<ParamPoly<K>>, var: &str) -> String {
    let mut out = String::new();
    for k in 0..=s.order() {
        let c = s.coeff(k);
        if c.is_zero() {
            continue;
        }
        let mono = match k {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{}^{}", var, k),
        };
        let (neg, body) = match c.as_constant() {
            Some(v) => {
                let neg = v.signum_i() < 0 && !v.to_expr().starts_with('(');
                let mag = if neg { -v } else { v };
                let b = match (mono.is_empty(), mag.is_one()) {
                    (true, _) => mag.to_expr(),
                    (false, true) => mono.clone(),
                    (false, false) => format!("{}*{}", mag.to_expr(), mono),
                };
                (neg, b)
            }
            None if mono.is_empty() => (false, format!("({})", c)),
            None => (false, format!("({})*{}", c, mono)),
        };
        match (out.is_empty(), neg) {
            (true, true) => out.push_str(&format!("-{}", body)),
            (true, false) => out.push_str(&body),
            (false, true) => out.push_str(&format!(" - {}", body)),
            (false, false) => out.push_str(&format!(" + {}", body)),
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    format!("{}  # through {}^{}", out, var, s.order())
}

fn reduce<K: Scalar>(sys: &PlanarSystem<K>, tol: f64) -> Outcome {
    let ch = sys.to_cherkas().map_err(math)?;
    let conds = ch.reducibility_conditions();
    for (i, c) in conds.iter().enumerate() {
        println!("r{} = {}", i + 1, c);
    }
    let ok = conds.iter().all(|c| c.negligible(tol));
    if ok {
        let lp = ch.to_lienard(tol).map_err(math)?;
        println!("f = {}", lp.f);
        println!("g = {}", lp.g);
    }
    match (ok, conds.len()) {
        (true, 0) => println!("PASS: reducibility residual is identically zero"),
        (true, m) => println!("PASS: {} reducibility conditions vanish", m),
        (false, m) => println!("FAIL: {} of {} reducibility conditions are nonzero", conds.iter().filter(|c| !c.negligible(tol)).count(), m),
    }
    Ok(ok)
}

fn conditions<K: Scalar>(sys: &PlanarSystem<K>, tol: f64, k: usize, n: Option<usize>) -> Outcome {
    let lp = lienard(sys, tol)?;
    let n = n.unwrap_or(DEFAULT_N.max(2 * k + 4));
    let cs = c_algorithm(&lp, k, n, tol).map_err(math)?;
    for (i, c) in cs.conditions.iter().enumerate() {
        println!("c{} = {}", i + 1, c);
    }
    let first = cs.first_nonzero(tol);
    match first {
        None => println!("PASS: c1..c{} vanish (N = {})", k, n),
        Some(i) => println!("FAIL: c{} is the first nonzero condition (N = {})", i, n),
    }
    Ok(first.is_none())
}

fn urabe<K: Scalar>(sys: &PlanarSystem<K>, tol: f64, n: usize, h: Option<&str>) -> Outcome {
    let lp = lienard(sys, tol)?;
    match h {
        Some(src) => {
            let e = parse_expr(src).map_err(|e| usage(format!("--h: {}", e)))?;
            let hs = eval_series::<K>(&e, "xi", &lp.params, n).map_err(|e| usage(format!("--h: {}", e)))?;
            let r = verify_urabe(&lp, &hs, n, tol).map_err(math)?;
            println!("{}", r);
            Ok(r.passed)
        }
        None => {
            let us = urabe_series(&lp, n, tol).map_err(math)?;
            println!("h = {}", series_expr(&us.h, "xi"));
            let even = us.even_part();
            let odd = (0..=even.order()).all(|k| even.coeff(k).negligible(tol));
            println!("{}: h is {}odd through xi^{}", status(odd), if odd { "" } else { "not " }, us.h.order());
            Ok(odd)
        }
    }
}

fn zero_urabe<K: Scalar>(sys: &PlanarSystem<K>, tol: f64) -> Outcome {
    let lp = lienard(sys, tol)?;
    let ok = lp.zero_urabe_check(tol);
    if ok {
        println!("PASS: g' + f*g = 1");
    } else {
        println!("numerator = {}", lp.zero_urabe_numerator());
        println!("FAIL: g' + f*g - 1 is not zero");
    }
    Ok(ok)
}

fn linearize<K: Scalar>(sys: &PlanarSystem<K>, tol: f64, n: usize) -> Outcome {
    let lp = lienard(sys, tol)?;
    let chart = linearizing_chart(&lp, n).map_err(math)?;
    let pot = potential_series(&lp, n).map_err(math)?;
    println!("q = {}", series_expr(&chart.q_of_x, "x"));
    println!("exp(F) = {}", series_expr(&chart.exp_f, "x"));
    println!("U = {}", series_expr(&pot.u, "q"));
    let r = harmonic_identity_check(&lp, n, tol).map_err(math)?;
    let ok = r.passed && r.consistent();
    println!("{}: {}", status(ok), r);
    Ok(ok)
}

fn period<K: Scalar>(sys: &PlanarSystem<K>, _tol: f64, x0: &[f64], ode_tol: f64, threshold: f64) -> Outcome {
    if !sys.params.is_empty() {
        return Err(usage(format!("fix parameters {} with --param", sys.params.names().join(", "))));
    }
    let ns = NumericSystem::from_planar(sys, &[]).map_err(math)?;
    let r = isochronicity_probe_with(&ns, x0, ode_tol, threshold).map_err(math)?;
    println!("{}", r);
    Ok(r.passed)
}

fn reversible<K: Scalar>(sys: &PlanarSystem<K>, tol: f64) -> Outcome {
    if !sys.params.is_empty() {
        return Err(usage(format!("fix parameters {} with --param", sys.params.names().join(", "))));
    }
    let any = reversible_any_axis(sys, tol).map_err(math)?;
    println!("x-axis parity: {}", if reversible_x_axis(sys) { "yes" } else { "no" });
    println!("{}: {}", status(any), if any { "reversible about a line through the origin" } else { "not reversible about any line" });
    Ok(any)
}

fn order_for(order: OrderArg, weights: Option<WeightsArg>, vars: &Vars) -> MonomialOrder {
    match (order, weights) {
        (OrderArg::Lex, None) => MonomialOrder::Lex,
        (OrderArg::Grevlex, None) => MonomialOrder::Grevlex,
        (OrderArg::Lex, Some(WeightsArg::Auto)) => MonomialOrder::WeightedLex(template_weights(vars)),
        (OrderArg::Grevlex, Some(WeightsArg::Auto)) => MonomialOrder::WeightedGrevlex(template_weights(vars)),
    }
}

fn print_basis<K: Scalar>(gens: Vec<ParamPoly<K>>, vars: &Arc<Vars>, order: MonomialOrder, weighted: bool, budget: usize) -> Outcome {
    let ideal = Ideal::new(gens, order.clone());
    if weighted {
        let verdict = match ideal.check_homogeneous() {
            Ok(()) => "yes".to_string(),
            Err(e) => format!("no, {}", e),
        };
        println!("# weights {:?}: generators weighted-homogeneous: {}", template_weights(vars), verdict);
    }
    match buchberger_with_budget(&ideal, budget) {
        Ok(gb) => {
            if gb.elements.is_empty() {
                println!("# zero ideal");
            }
            for g in &gb.elements {
                println!("{}", g.to_expr_in(&order));
            }
            Ok(true)
        }
        Err(e @ GbError::BudgetExceeded { .. }) => Err(math(e)),
        Err(e) => Err(usage(e.to_string())),
    }
}

fn groebner_system<K: Scalar>(sys: &PlanarSystem<K>, tol: f64, k: usize, order: OrderArg, weights: Option<WeightsArg>, budget: usize) -> Outcome {
    let ch = sys.to_cherkas().map_err(math)?;
    let mut gens: Vec<ParamPoly<K>> = ch.reducibility_conditions();
    if k > 0 {
        let lp = ch.to_lienard_unchecked();
        let cs = c_algorithm(&lp, k, DEFAULT_N.max(2 * k + 4), tol).map_err(math)?;
        gens.extend(cs.conditions);
    }
    gens.retain(|g| !g.negligible(tol));
    let vars = sys.params.clone();
    let ord = order_for(order, weights, &vars);
    print_basis(gens, &vars, ord, weights.is_some(), budget)
}

fn groebner(file: &Path, order: OrderArg, weights: Option<WeightsArg>, k: usize, budget: usize) -> Outcome {
    let text = read(file)?;
    if text.lines().any(|l| l.trim_start().starts_with("xdot")) {
        let loaded = Loaded { path: file.to_path_buf(), file: parse_system_text(&text).map_err(|e| usage(format!("{}:{}", file.display(), e)))?, fixed: Vec::new() };
        return on_field!(loaded, groebner_system(k, order, weights, budget));
    }
    let ideal = parse_ideal_text(&text).map_err(|e| usage(format!("{}:{}", file.display(), e)))?;
    let vars = Vars::new(&ideal.vars);
    let ord = order_for(order, weights, &vars);
    let bad = |e: isochron::parse::ParseError| usage(format!("{}:{}", file.display(), e));
    match ideal.field {
        FieldDecl::Float => print_basis(ideal.generators::<f64>().map_err(bad)?, &vars, ord, weights.is_some(), budget),
        _ => print_basis(ideal.generators::<QuadNum>().map_err(bad)?, &vars, ord, weights.is_some(), budget),
    }
}

fn select<'a>(entries: &'a [CatalogEntry], ids: &[String]) -> Result<Vec<&'a CatalogEntry>, Failure> {
    if ids.is_empty() {
        return Ok(entries.iter().collect());
    }
    ids.iter()
        .map(|id| entries.iter().find(|e| &e.id == id).ok_or_else(|| usage(format!("no catalog entry '{}'", id))))
        .collect()
}

fn catalog(cmd: &CatalogCmd) -> Outcome {
    let entries = load_catalog().map_err(|e| usage(e.to_string()))?;
    match cmd {
        CatalogCmd::List => {
            for e in &entries {
                let plan: Vec<String> = e.plan.iter().map(|c| c.to_string()).collect();
                println!("{:<20} {:<11} {:<9} {}", e.id, format!("{:?}", e.status).to_lowercase(), e.field, plan.join(", "));
            }
            Ok(true)
        }
        CatalogCmd::Show { id } => {
            let e = select(&entries, std::slice::from_ref(id))?[0];
            println!("# {} ({})", e.id, e.label);
            for n in &e.notes {
                println!("# {}", n);
            }
            match &e.system {
                isochron::catalog::EntrySystem::Exact(s) => print!("{}", format_system(s, e.field)),
                isochron::catalog::EntrySystem::Float(s) => print!("{}", format_system(s, e.field)),
            }
            Ok(true)
        }
        CatalogCmd::Verify { id, jobs, json, n } => {
            let mut chosen = select(&entries, id)?;
            chosen.sort_by(|a, b| a.id.cmp(&b.id));
            let cfg = VerifyConfig { n: *n, ..VerifyConfig::default() };
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads((*jobs).max(1))
                .build()
                .map_err(|e| usage(e.to_string()))?;
            let reports: Vec<EntryReport> = pool.install(|| chosen.par_iter().map(|e| verify_entry(e, &cfg)).collect());
            if *json {
                println!("{}", serde_json::to_string_pretty(&reports).map_err(|e| usage(e.to_string()))?);
            } else {
                for r in &reports {
                    println!("{}", r);
                }
                let count = |v: Verdict| reports.iter().filter(|r| r.status == v).count();
                println!(
                    "{} entries: {} PASS, {} FAIL, {} ERROR",
                    reports.len(),
                    count(Verdict::Pass),
                    count(Verdict::Fail),
                    count(Verdict::Error)
                );
            }
            Ok(reports.iter().all(|r| r.status == Verdict::Pass))
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    match &cli.cmd {
        Cmd::Reduce(a) => on_field!(Loaded::new(a)?, reduce()),
        Cmd::Conditions { sys, k, n } => on_field!(Loaded::new(sys)?, conditions(*k, *n)),
        Cmd::Groebner { file, order, weights, k, budget } => groebner(file, *order, *weights, *k, *budget),
        Cmd::Urabe { sys, n, h } => on_field!(Loaded::new(sys)?, urabe(*n, h.as_deref())),
        Cmd::ZeroUrabe(a) => on_field!(Loaded::new(a)?, zero_urabe()),
        Cmd::Linearize { sys, n } => on_field!(Loaded::new(sys)?, linearize(*n)),
        Cmd::Period { sys, x0, tol, threshold } => {
            if x0.iter().any(|a| !(*a > 0.0)) || !(*tol > 0.0) {
                return Err(usage("--x0 values and --tol must be positive"));
            }
            on_field!(Loaded::new(sys)?, period(x0, *tol, *threshold))
        }
        Cmd::Reversible(a) => on_field!(Loaded::new(a)?, reversible()),
        Cmd::Catalog { cmd } => catalog(cmd),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Math(msg)) => {
            println!("FAIL: {}", msg);
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {}", msg);
            ExitCode::from(2)
        }
    }
}
