//! Published isochronous families with their verification plans.
//!
//! Fixture grammar, one file per theorem:
//!
//! ```text
//! [ID]
//! label = ST13
//! field = rational | sqrt(d) | float
//! params = a31, b22
//! xdot = <polynomial>
//! ydot = <polynomial>
//! urabe = zero | conjectural | <expression in xi>
//! plan = reducibility, conditions(15), urabe(20), zero-urabe, linearize(30), period(1e-12), reversibility(no)
//! instance = a31: 1/27
//! amplitudes = 0.05, 0.1
//! threshold = 1e-4
//! status = proven | conjectural
//! note = free text
//! ```
//!
//! Indented lines continue the previous value; `#` starts a comment.

use std::fmt::{self, Display};
use std::sync::Arc;

use serde::Serialize;

use crate::isochrony::{c_algorithm, verify_urabe};
use crate::lienard::{LienardPair, PlanarSystem};
use crate::linearize::harmonic_identity_check;
use crate::parse::{eval_rat, eval_series, parse_expr, parse_expr_at, Expr, FieldDecl, ParseError, SystemFile};
use crate::poly::{ParamPoly, Vars};
use crate::scalar::{rat_to_f64, QuadNum, Scalar};
use crate::series::XSeries;
use crate::verify::{isochronicity_probe_with, reversible_any_axis, NumericSystem, PROBE_AMPLITUDES};

pub const STANDARD: &str = include_str!("../fixtures/standard.txt");
pub const CUBIC: &str = include_str!("../fixtures/cubic.txt");
pub const ZERO_URABE: &str = include_str!("../fixtures/zero_urabe.txt");

/// Bundled fixture files as (name, text).
pub const FIXTURES: [(&str, &str); 3] =
    [("standard.txt", STANDARD), ("cubic.txt", CUBIC), ("zero_urabe.txt", ZERO_URABE)];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalogError {
    pub file: String,
    pub line: usize,
    pub label: Option<String>,
    pub msg: String,
}

impl Display for CatalogError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.label {
            Some(l) => write!(f, "{}:{}: [{}] {}", self.file, self.line, l, self.msg),
            None => write!(f, "{}:{}: {}", self.file, self.line, self.msg),
        }
    }
}

impl std::error::Error for CatalogError {}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EntryStatus {
    Proven,
    Conjectural,
}

#[derive(Clone, Debug, PartialEq)]
pub enum UrabeClaim {
    Zero,
    Conjectural,
    /// Closed form in ξ, kept as source text and parsed tree.
    Closed { source: String, expr: Expr },
}

#[derive(Clone, Debug, PartialEq)]
pub enum Check {
    Reducibility,
    Conditions(usize),
    Urabe(usize),
    ZeroUrabe,
    Linearize(usize),
    Period(f64),
    /// Expected verdict, or None to only record it.
    Reversibility(Option<bool>),
}

impl Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Check::Reducibility => write!(f, "reducibility"),
            Check::Conditions(k) => write!(f, "conditions({})", k),
            Check::Urabe(n) => write!(f, "urabe({})", n),
            Check::ZeroUrabe => write!(f, "zero-urabe"),
            Check::Linearize(n) => write!(f, "linearize({})", n),
            Check::Period(t) => write!(f, "period({:e})", t),
            Check::Reversibility(None) => write!(f, "reversibility"),
            Check::Reversibility(Some(true)) => write!(f, "reversibility(yes)"),
            Check::Reversibility(Some(false)) => write!(f, "reversibility(no)"),
        }
    }
}

/// Coefficients in one field: exact entries use ℚ(√d) (d = 0 for ℚ), Monsters and nested radicals use floats.
#[derive(Clone, Debug, PartialEq)]
pub enum EntrySystem {
    Exact(PlanarSystem<QuadNum>),
    Float(PlanarSystem<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct CatalogEntry {
    pub id: String,
    /// Equation label the entry instantiates; sign variants and special values share it.
    pub label: String,
    pub file: String,
    pub line: usize,
    pub field: FieldDecl,
    pub params: Vec<String>,
    pub system: EntrySystem,
    pub urabe: UrabeClaim,
    pub plan: Vec<Check>,
    /// Parameter values for the numeric checks, in `params` order.
    pub instance: Vec<f64>,
    pub amplitudes: Vec<f64>,
    pub threshold: Option<f64>,
    pub status: EntryStatus,
    pub notes: Vec<String>,
}

impl CatalogEntry {
    pub fn is_exact(&self) -> bool {
        matches!(self.system, EntrySystem::Exact(_))
    }

    pub fn is_zero_urabe(&self) -> bool {
        self.urabe == UrabeClaim::Zero
    }

    pub fn exact_system(&self) -> Option<&PlanarSystem<QuadNum>> {
        match &self.system {
            EntrySystem::Exact(s) => Some(s),
            EntrySystem::Float(_) => None,
        }
    }

    /// Template coefficient `aIJ` (of xⁱyʲ in ẋ) or `bIJ` (in ẏ) in the expression grammar.
    pub fn coefficient(&self, name: &str) -> Option<String> {
        let b = name.as_bytes();
        if b.len() != 3 || !(b[0] == b'a' || b[0] == b'b') || !b[1].is_ascii_digit() || !b[2].is_ascii_digit() {
            return None;
        }
        let (i, j) = ((b[1] - b'0') as u16, (b[2] - b'0') as u16);
        Some(match &self.system {
            EntrySystem::Exact(s) => {
                let p = if b[0] == b'a' { &s.xdot } else { &s.ydot };
                p.coeff(i, j).to_expr()
            }
            EntrySystem::Float(s) => {
                let p = if b[0] == b'a' { &s.xdot } else { &s.ydot };
                p.coeff(i, j).to_expr()
            }
        })
    }

    pub fn numeric_system(&self) -> Result<NumericSystem, String> {
        let r = match &self.system {
            EntrySystem::Exact(s) => NumericSystem::from_planar(s, &self.instance),
            EntrySystem::Float(s) => NumericSystem::from_planar(s, &self.instance),
        };
        r.map_err(|e| e.to_string())
    }

    pub fn period_threshold(&self, cfg: &VerifyConfig) -> f64 {
        self.threshold.unwrap_or(cfg.period_threshold)
    }
}

/// Parses one fixture document.
pub fn parse_catalog(src: &str, file: &str) -> Result<Vec<CatalogEntry>, CatalogError> {
    let mut sections: Vec<Section> = Vec::new();
    let mut last_key: Option<usize> = None;
    for (n, raw) in src.lines().enumerate() {
        let line = n + 1;
        let text = raw.split('#').next().unwrap_or("");
        if text.trim().is_empty() {
            continue;
        }
        let err = |label: Option<&Section>, msg: String| CatalogError {
            file: file.to_string(),
            line,
            label: label.map(|s| s.id.clone()),
            msg,
        };
        if text.starts_with([' ', '\t']) {
            let sec = sections.last_mut().ok_or_else(|| err(None, "continuation outside a section".into()))?;
            let k = last_key.ok_or_else(|| err(Some(sec), "continuation without a key".into()))?;
            sec.keys[k].value.push(' ');
            sec.keys[k].value.push_str(text.trim());
            continue;
        }
        let t = text.trim();
        if let Some(rest) = t.strip_prefix('[') {
            let id = rest.strip_suffix(']').ok_or_else(|| err(None, "unterminated section header".into()))?.trim();
            if id.is_empty() {
                return Err(err(None, "empty section id".into()));
            }
            if sections.iter().any(|s| s.id == id) {
                return Err(err(None, format!("duplicate id '{}'", id)));
            }
            sections.push(Section { id: id.to_string(), line, keys: Vec::new() });
            last_key = None;
            continue;
        }
        let sec = sections.last_mut().ok_or_else(|| err(None, "key outside a section".into()))?;
        let (k, v) = t.split_once('=').ok_or_else(|| err(Some(sec), format!("expected 'key = value', found '{}'", t)))?;
        let key = k.trim().to_string();
        if sec.keys.iter().any(|e| e.key == key) && key != "note" {
            return Err(err(Some(sec), format!("key '{}' given twice", key)));
        }
        let col = raw.find('=').map(|i| i + 2).unwrap_or(1);
        sec.keys.push(KeyValue { key, value: v.trim().to_string(), line, col });
        last_key = Some(sec.keys.len() - 1);
    }
    sections.into_iter().map(|s| s.build(file)).collect()
}

/// All bundled entries in file order.
pub fn load_catalog() -> Result<Vec<CatalogEntry>, CatalogError> {
    let mut out = Vec::new();
    for (name, text) in FIXTURES {
        out.extend(parse_catalog(text, name)?);
    }
    Ok(out)
}

pub fn lookup<'a>(entries: &'a [CatalogEntry], id: &str) -> Option<&'a CatalogEntry> {
    entries.iter().find(|e| e.id == id)
}

struct KeyValue {
    key: String,
    value: String,
    line: usize,
    col: usize,
}

struct Section {
    id: String,
    line: usize,
    keys: Vec<KeyValue>,
}

impl Section {
    fn get(&self, key: &str) -> Option<&KeyValue> {
        self.keys.iter().find(|k| k.key == key)
    }

    fn build(self, file: &str) -> Result<CatalogEntry, CatalogError> {
        let err = |line: usize, msg: String| CatalogError { file: file.to_string(), line, label: Some(self.id.clone()), msg };
        let perr = |e: ParseError| err(e.line, format!("col {}: {}", e.col, e.msg));
        for kv in &self.keys {
            const KNOWN: [&str; 12] =
                ["label", "field", "params", "xdot", "ydot", "urabe", "plan", "instance", "amplitudes", "threshold", "status", "note"];
            if !KNOWN.contains(&kv.key.as_str()) {
                return Err(err(kv.line, format!("unknown key '{}'", kv.key)));
            }
        }
        let required = |k: &str| self.get(k).ok_or_else(|| err(self.line, format!("missing '{}'", k)));
        let label = self.get("label").map(|k| k.value.clone()).unwrap_or_else(|| self.id.clone());
        let field = match self.get("field") {
            None => FieldDecl::Rational,
            Some(kv) => match kv.value.as_str() {
                "rational" => FieldDecl::Rational,
                "float" => FieldDecl::Float,
                v => {
                    let d = v
                        .strip_prefix("sqrt(")
                        .and_then(|r| r.strip_suffix(')'))
                        .and_then(|r| r.trim().parse::<u64>().ok())
                        .ok_or_else(|| err(kv.line, format!("unknown field '{}'", v)))?;
                    let (_, core) = crate::scalar::squarefree_split(d);
                    if core == 1 {
                        FieldDecl::Rational
                    } else {
                        FieldDecl::Quadratic(core)
                    }
                }
            },
        };
        let params: Vec<String> = match self.get("params") {
            None => Vec::new(),
            Some(kv) => kv.value.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect(),
        };
        let expr_of = |k: &str| -> Result<Expr, CatalogError> {
            let kv = required(k)?;
            parse_expr_at(&kv.value, kv.line, kv.col).map_err(perr)
        };
        let sf = SystemFile { params: params.clone(), field, xdot: expr_of("xdot")?, ydot: expr_of("ydot")? };
        let sys_line = required("xdot")?.line;
        let system = match field {
            FieldDecl::Float => {
                let s = sf.system::<f64>().map_err(perr)?;
                s.to_cherkas().map_err(|e| err(sys_line, e.to_string()))?;
                EntrySystem::Float(s)
            }
            _ => {
                let s = sf.system::<QuadNum>().map_err(perr)?;
                s.to_cherkas().map_err(|e| err(sys_line, e.to_string()))?;
                if let FieldDecl::Quadratic(d) = field {
                    let all = s.xdot.terms().values().chain(s.ydot.terms().values());
                    if all.flat_map(|c| c.terms().values()).any(|k| k.field() != 0 && k.field() != d) {
                        return Err(err(sys_line, format!("coefficient outside sqrt({})", d)));
                    }
                }
                EntrySystem::Exact(s)
            }
        };
        let urabe = match self.get("urabe") {
            None => UrabeClaim::Conjectural,
            Some(kv) => match kv.value.as_str() {
                "zero" => UrabeClaim::Zero,
                "conjectural" => UrabeClaim::Conjectural,
                v => UrabeClaim::Closed { source: v.to_string(), expr: parse_expr_at(v, kv.line, kv.col).map_err(perr)? },
            },
        };
        let plan = match self.get("plan") {
            None => Vec::new(),
            Some(kv) => parse_plan(&kv.value).map_err(|m| err(kv.line, m))?,
        };
        let instance = match self.get("instance") {
            None => Vec::new(),
            Some(kv) => {
                let mut vals = vec![None; params.len()];
                for item in kv.value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    let (n, v) = item.split_once(':').ok_or_else(|| err(kv.line, format!("expected 'name: value', found '{}'", item)))?;
                    let i = params
                        .iter()
                        .position(|p| p == n.trim())
                        .ok_or_else(|| err(kv.line, format!("'{}' is not a parameter", n.trim())))?;
                    vals[i] = Some(number(v.trim()).map_err(|m| err(kv.line, m))?);
                }
                vals.into_iter()
                    .zip(&params)
                    .map(|(v, p)| v.ok_or_else(|| err(kv.line, format!("no value for '{}'", p))))
                    .collect::<Result<_, _>>()?
            }
        };
        let amplitudes = match self.get("amplitudes") {
            None => PROBE_AMPLITUDES.to_vec(),
            Some(kv) => kv.value.split(',').map(|s| number(s.trim())).collect::<Result<_, _>>().map_err(|m| err(kv.line, m))?,
        };
        let threshold = match self.get("threshold") {
            None => None,
            Some(kv) => Some(number(&kv.value).map_err(|m| err(kv.line, m))?),
        };
        let status = match self.get("status").map(|k| (k.value.as_str(), k.line)) {
            None | Some(("proven", _)) => EntryStatus::Proven,
            Some(("conjectural", _)) => EntryStatus::Conjectural,
            Some((v, l)) => return Err(err(l, format!("unknown status '{}'", v))),
        };
        let needs_instance = plan.iter().any(|c| matches!(c, Check::Period(_)));
        if needs_instance && !params.is_empty() && instance.is_empty() {
            return Err(err(self.line, "period check on a parametric entry needs 'instance'".into()));
        }
        let notes = self.keys.iter().filter(|k| k.key == "note").map(|k| k.value.clone()).collect();
        Ok(CatalogEntry {
            id: self.id.clone(),
            label,
            file: file.to_string(),
            line: self.line,
            field,
            params,
            system,
            urabe,
            plan,
            instance,
            amplitudes,
            threshold,
            status,
            notes,
        })
    }
}

fn number(s: &str) -> Result<f64, String> {
    let e = parse_expr(s).map_err(|e| format!("bad number '{}': {}", s, e.msg))?;
    eval_rat(&e).map(|r| rat_to_f64(&r)).map_err(|e| format!("bad number '{}': {}", s, e.msg))
}

fn parse_plan(src: &str) -> Result<Vec<Check>, String> {
    let mut out = Vec::new();
    for item in src.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (name, arg) = match item.split_once('(') {
            Some((n, rest)) => {
                let a = rest.strip_suffix(')').ok_or_else(|| format!("unbalanced plan item '{}'", item))?;
                (n.trim(), Some(a.trim()))
            }
            None => (item, None),
        };
        let count = |a: Option<&str>| -> Result<usize, String> {
            a.ok_or_else(|| format!("'{}' needs an order", name))?.parse::<usize>().map_err(|_| format!("bad order in '{}'", item))
        };
        out.push(match name {
            "reducibility" => Check::Reducibility,
            "conditions" => Check::Conditions(count(arg)?),
            "urabe" => Check::Urabe(count(arg)?),
            "zero-urabe" => Check::ZeroUrabe,
            "linearize" => Check::Linearize(count(arg)?),
            "period" => Check::Period(number(arg.ok_or("'period' needs a tolerance")?)?),
            "reversibility" => Check::Reversibility(match arg {
                None => None,
                Some("yes") => Some(true),
                Some("no") => Some(false),
                Some(a) => return Err(format!("reversibility expects yes or no, found '{}'", a)),
            }),
            _ => return Err(format!("unknown plan item '{}'", name)),
        });
    }
    Ok(out)
}

/// Orders and tolerances shared by every entry.
#[derive(Clone, Debug, PartialEq)]
pub struct VerifyConfig {
    /// Series order used by the C-algorithm; raised to 2K + 4 when a plan asks for more conditions.
    pub n: usize,
    /// Coefficient tolerance for float entries.
    pub float_tol: f64,
    pub period_threshold: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { n: crate::isochrony::DEFAULT_N, float_tol: 1e-8, period_threshold: 1e-6 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
    Error,
}

impl Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Error => "ERROR",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub status: Verdict,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntryReport {
    pub id: String,
    pub status: Verdict,
    pub checks: Vec<CheckReport>,
    pub max_period_dev: Option<f64>,
}

impl EntryReport {
    /// Check names that did not pass.
    pub fn failures(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| c.status != Verdict::Pass).map(|c| c.check.as_str()).collect()
    }
}

impl Display for EntryReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.id, self.status)?;
        for c in &self.checks {
            write!(f, "\n  {:<18} {:<5} {}", c.check, c.status, c.detail)?;
        }
        Ok(())
    }
}

/// Runs the entry's plan; the verdict is ERROR if any check errored, else FAIL if any failed.
pub fn verify_entry(entry: &CatalogEntry, cfg: &VerifyConfig) -> EntryReport {
    let mut max_period_dev = None;
    let checks: Vec<CheckReport> = entry
        .plan
        .iter()
        .map(|c| {
            let (status, detail) = match &entry.system {
                EntrySystem::Exact(s) => run_check(entry, s, c, cfg, 0.0, &mut max_period_dev),
                EntrySystem::Float(s) => run_check(entry, s, c, cfg, cfg.float_tol, &mut max_period_dev),
            };
            CheckReport { check: c.to_string(), status, detail }
        })
        .collect();
    let status = if checks.iter().any(|c| c.status == Verdict::Error) {
        Verdict::Error
    } else if checks.iter().any(|c| c.status == Verdict::Fail) {
        Verdict::Fail
    } else {
        Verdict::Pass
    };
    EntryReport { id: entry.id.clone(), status, checks, max_period_dev }
}

/// Sequential verification in catalog order.
pub fn verify_all(entries: &[CatalogEntry], cfg: &VerifyConfig) -> Vec<EntryReport> {
    entries.iter().map(|e| verify_entry(e, cfg)).collect()
}

fn verdict(ok: bool) -> Verdict {
    if ok {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

fn lienard<K: Scalar>(sys: &PlanarSystem<K>, tol: f64) -> Result<LienardPair<K>, String> {
    let ch = sys.to_cherkas().map_err(|e| e.to_string())?;
    ch.to_lienard(tol).map_err(|e| e.to_string())
}

fn run_check<K: Scalar>(
    entry: &CatalogEntry,
    sys: &PlanarSystem<K>,
    check: &Check,
    cfg: &VerifyConfig,
    tol: f64,
    max_dev: &mut Option<f64>,
) -> (Verdict, String) {
    match check_inner(entry, sys, check, cfg, tol, max_dev) {
        Ok(r) => r,
        Err(msg) => (Verdict::Error, msg),
    }
}

fn check_inner<K: Scalar>(
    entry: &CatalogEntry,
    sys: &PlanarSystem<K>,
    check: &Check,
    cfg: &VerifyConfig,
    tol: f64,
    max_dev: &mut Option<f64>,
) -> Result<(Verdict, String), String> {
    Ok(match check {
        Check::Reducibility => {
            let ch = sys.to_cherkas().map_err(|e| e.to_string())?;
            let conds = ch.reducibility_conditions();
            match conds.iter().position(|c| !c.negligible(tol)) {
                None => (Verdict::Pass, format!("{} reducibility conditions vanish", conds.len())),
                Some(i) => (Verdict::Fail, format!("condition {} = {}", i + 1, conds[i])),
            }
        }
        Check::Conditions(k) => {
            let lp = lienard(sys, tol)?;
            let n = cfg.n.max(2 * k + 4);
            let cs = c_algorithm(&lp, *k, n, tol).map_err(|e| e.to_string())?;
            match cs.first_nonzero(tol) {
                None => (Verdict::Pass, format!("c1..c{} vanish (N = {})", k, n)),
                Some(i) => (Verdict::Fail, format!("c{} = {}", i, cs.conditions[i - 1])),
            }
        }
        Check::Urabe(n) => {
            let lp = lienard(sys, tol)?;
            let h = match &entry.urabe {
                UrabeClaim::Zero => XSeries::zero(&ParamPoly::<K>::zero(&lp.params), *n),
                UrabeClaim::Closed { expr, .. } => {
                    let vars: Arc<Vars> = lp.params.clone();
                    eval_series::<K>(expr, "xi", &vars, *n).map_err(|e| format!("urabe expression: {}", e))?
                }
                UrabeClaim::Conjectural => return Err("no closed-form Urabe function".into()),
            };
            let r = verify_urabe(&lp, &h, *n, tol).map_err(|e| e.to_string())?;
            (verdict(r.passed), r.to_string())
        }
        Check::ZeroUrabe => {
            let lp = lienard(sys, tol)?;
            let ok = lp.zero_urabe_check(tol);
            (verdict(ok), if ok { "g' + f*g = 1".into() } else { format!("g' + f*g - 1 has numerator {}", lp.zero_urabe_numerator()) })
        }
        Check::Linearize(n) => {
            let lp = lienard(sys, tol)?;
            let r = harmonic_identity_check(&lp, *n, tol).map_err(|e| e.to_string())?;
            (verdict(r.passed && r.consistent()), r.to_string())
        }
        Check::Period(ode_tol) => {
            let ns = entry.numeric_system()?;
            let threshold = entry.period_threshold(cfg);
            let r = isochronicity_probe_with(&ns, &entry.amplitudes, *ode_tol, threshold).map_err(|e| e.to_string())?;
            *max_dev = Some(max_dev.map_or(r.max_deviation, |m: f64| m.max(r.max_deviation)));
            (verdict(r.passed), format!("max |T-2pi| = {:.3e} over {} amplitudes (threshold {:.0e})", r.max_deviation, r.amplitudes.len(), threshold))
        }
        Check::Reversibility(expect) => {
            let got = reversible_any_axis(sys, tol).map_err(|e| e.to_string())?;
            let text = if got { "reversible about a line through the origin" } else { "not reversible about any line" };
            match expect {
                None => (Verdict::Pass, format!("{} (recorded)", text)),
                Some(e) => (verdict(*e == got), text.to_string()),
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_catalog_loads() {
        let cat = load_catalog().unwrap();
        assert_eq!(cat.len(), 49);
        let st13 = lookup(&cat, "ST13").unwrap();
        assert_eq!(st13.coefficient("a31").as_deref(), Some("1"));
        assert_eq!(st13.coefficient("b22").as_deref(), Some("1/2"));
        assert_eq!(st13.coefficient("b40").as_deref(), Some("-1/2"));
        assert_eq!(st13.coefficient("a11").as_deref(), Some("0"));
        assert_eq!(lookup(&cat, "CUB2").unwrap().params, vec!["b20".to_string()]);
        assert!(lookup(&cat, "ST99").is_none());
    }

    #[test]
    fn malformed_fixture_reports_line_and_label() {
        let e = parse_catalog("[A]\nxdot = -y\nydot = x + \n", "t.txt").unwrap_err();
        assert_eq!(e.label.as_deref(), Some("A"));
        let e = parse_catalog("[A]\nxdot = -y\nydot = x\nplan = wobble\n", "t.txt").unwrap_err();
        assert_eq!((e.line, e.label.as_deref()), (4, Some("A")));
        let e = parse_catalog("xdot = -y\n", "t.txt").unwrap_err();
        assert_eq!((e.line, e.label), (1, None));
        let e = parse_catalog("[A]\nxdot = -y + y^2\nydot = x\n", "t.txt").unwrap_err();
        assert_eq!(e.line, 2);
        let e = parse_catalog("[A]\nparams = b\nxdot = -y\nydot = x + b*x^2\nplan = period(1e-12)\n", "t.txt").unwrap_err();
        assert!(e.msg.contains("instance"));
    }

    #[test]
    fn continuation_lines_join() {
        let c = parse_catalog("[A]\nxdot = -y\nydot = x\n    + x^2\n", "t.txt").unwrap();
        assert_eq!(c[0].coefficient("b20").as_deref(), Some("1"));
    }
}
