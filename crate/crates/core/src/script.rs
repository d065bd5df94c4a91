//! Proof scripts: JSON files holding named derivation trees over a base.
//!
//! ```json
//! {
//!   "version": 1,
//!   "base": "example.base.json",
//!   "mode": "i0",
//!   "description": "...",
//!   "derivations": [ { "name": "d1", "description": "...", "tree": NODE } ]
//! }
//! ```
//!
//! A `NODE` is one of
//! - `{"assume": FORMULA, "label": "1"}` (label optional),
//! - `{"term": SYMBOL}` for a term-assumption leaf,
//! - `{"rule": RULE, "conclusion": FORMULA, "premises": [NODE...], ...}`.
//!
//! Rule instantiation fields: `index` (asE, negAsE), `pairs`
//! (posQIdentI, negQIdentI: `[{"pred", "position", "companions", "labels"}]`),
//! `side` (posQIdentE, negQIdentE: 1 or 2), `label` (impI, existsE), `labels`
//! (orE: two entries, `null` for none), `variant` and `eigen` (forallI:
//! `i`/`ii` with an eigen-term, or `iii`; existsE: `i`/`ii`), `term` (forallE,
//! existsI), `sign` (iotaI, iotaE1-3: `pos` or `neg`). The conclusion of asE and
//! negAsE is the symbol whose term assumptions are concluded.

use std::fs;
use std::path::{Path as FsPath, PathBuf};

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::base::{BaseFile, BaseLoadError, Signature, SubatomicBase};
use crate::derivation::{Derivation, ForallVariant, PairSpec, Rule, Side, Unit};
use crate::kernel::Mode;
use crate::parse::{parse_formula, parse_term};
use crate::syntax::{Sign, Term};

pub const CORPUS_ENV: &str = "QDEF_CORPUS_DIR";

/// Directory of the shipped corpus, overridable through `QDEF_CORPUS_DIR`.
pub fn corpus_dir() -> PathBuf {
    std::env::var_os(CORPUS_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus"))
}

/// Resolve a path that may start with `corpus:`; other relative paths are
/// taken relative to `relative_to`.
pub fn resolve(path: &str, relative_to: Option<&FsPath>) -> PathBuf {
    if let Some(rest) = path.strip_prefix("corpus:") {
        return corpus_dir().join(rest);
    }
    let p = PathBuf::from(path);
    match relative_to {
        Some(dir) if p.is_relative() => dir.join(p),
        _ => p,
    }
}

/// A problem located by a JSON pointer into the file.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{pointer}: {message}")]
pub struct Diagnostic {
    pub pointer: String,
    pub message: String,
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: malformed JSON: {source}")]
    Json { path: String, source: serde_json::Error },
    #[error("{path}: {source}")]
    Base { path: String, source: BaseLoadError },
    #[error("{path}: {}", .diagnostics.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n"))]
    Script { path: String, diagnostics: Vec<Diagnostic> },
}

#[derive(Clone, Debug)]
pub struct NamedDerivation {
    pub name: String,
    pub description: Option<String>,
    pub expect_error: Option<String>,
    pub derivation: Derivation,
}

#[derive(Clone, Debug)]
pub struct Script {
    pub base_ref: String,
    pub mode: Mode,
    pub description: Option<String>,
    pub derivations: Vec<NamedDerivation>,
}

pub fn read_json(path: &FsPath) -> Result<Value, LoadError> {
    let text = fs::read_to_string(path).map_err(|source| LoadError::Io { path: path.display().to_string(), source })?;
    serde_json::from_str(&text).map_err(|source| LoadError::Json { path: path.display().to_string(), source })
}

pub fn load_base(path: &FsPath) -> Result<SubatomicBase, LoadError> {
    let value = read_json(path)?;
    let file: BaseFile =
        serde_json::from_value(value).map_err(|source| LoadError::Json { path: path.display().to_string(), source })?;
    SubatomicBase::from_file(&file).map_err(|source| LoadError::Base { path: path.display().to_string(), source })
}

/// Load a script file together with the base it refers to (or `base_override`).
pub fn load_script(path: &FsPath, base_override: Option<&FsPath>) -> Result<(SubatomicBase, Script), LoadError> {
    let value = read_json(path)?;
    let shown = path.display().to_string();
    let base_ref = value.get("base").and_then(Value::as_str).map(str::to_string);
    let base_path = match (base_override, &base_ref) {
        (Some(b), _) => b.to_path_buf(),
        (None, Some(r)) => resolve(r, path.parent()),
        (None, None) => {
            return Err(LoadError::Script {
                path: shown,
                diagnostics: vec![Diagnostic { pointer: "/base".into(), message: "missing base reference".into() }],
            })
        }
    };
    let base = load_base(&base_path)?;
    let script = script_from_value(&value, base.signature())
        .map_err(|diagnostics| LoadError::Script { path: shown, diagnostics })?;
    Ok((base, script))
}

struct Reader<'a> {
    sig: &'a Signature,
    diags: Vec<Diagnostic>,
}

impl Reader<'_> {
    fn diag(&mut self, pointer: &str, message: impl Into<String>) {
        self.diags.push(Diagnostic { pointer: pointer.to_string(), message: message.into() });
    }
}

pub fn script_from_value(value: &Value, sig: &Signature) -> Result<Script, Vec<Diagnostic>> {
    let mut r = Reader { sig, diags: Vec::new() };
    let Some(obj) = value.as_object() else {
        return Err(vec![Diagnostic { pointer: String::new(), message: "script must be an object".into() }]);
    };
    for key in obj.keys() {
        if !["version", "base", "mode", "description", "derivations"].contains(&key.as_str()) {
            r.diag(&format!("/{key}"), "unknown field");
        }
    }
    match obj.get("version").and_then(Value::as_u64) {
        Some(1) => {}
        Some(v) => r.diag("/version", format!("unsupported version {v}")),
        None => r.diag("/version", "missing version"),
    }
    let base_ref = obj.get("base").and_then(Value::as_str).unwrap_or_default().to_string();
    let mode = match obj.get("mode").map(|m| m.as_str()) {
        None | Some(Some("i0")) => Mode::I0,
        Some(Some("m0")) => Mode::M0,
        _ => {
            r.diag("/mode", "mode must be \"i0\" or \"m0\"");
            Mode::I0
        }
    };
    let description = obj.get("description").and_then(Value::as_str).map(str::to_string);
    let mut derivations = Vec::new();
    match obj.get("derivations").and_then(Value::as_array) {
        None => r.diag("/derivations", "missing derivation list"),
        Some(list) => {
            for (i, entry) in list.iter().enumerate() {
                let ptr = format!("/derivations/{i}");
                let Some(e) = entry.as_object() else {
                    r.diag(&ptr, "derivation entry must be an object");
                    continue;
                };
                for key in e.keys() {
                    if !["name", "description", "expect_error", "tree"].contains(&key.as_str()) {
                        r.diag(&format!("{ptr}/{key}"), "unknown field");
                    }
                }
                let name = match e.get("name").and_then(Value::as_str) {
                    Some(n) => n.to_string(),
                    None => {
                        r.diag(&format!("{ptr}/name"), "missing name");
                        continue;
                    }
                };
                let Some(tree) = e.get("tree") else {
                    r.diag(&format!("{ptr}/tree"), "missing tree");
                    continue;
                };
                if let Some(d) = node(&mut r, tree, &format!("{ptr}/tree")) {
                    derivations.push(NamedDerivation {
                        name,
                        description: e.get("description").and_then(Value::as_str).map(str::to_string),
                        expect_error: e.get("expect_error").and_then(Value::as_str).map(str::to_string),
                        derivation: d,
                    });
                }
            }
        }
    }
    if r.diags.is_empty() {
        Ok(Script { base_ref, mode, description, derivations })
    } else {
        Err(r.diags)
    }
}

const RULE_FIELDS: &[&str] = &[
    "rule", "conclusion", "premises", "index", "pairs", "side", "label", "labels", "variant", "eigen", "term", "sign",
];

fn node(r: &mut Reader, v: &Value, ptr: &str) -> Option<Derivation> {
    let Some(obj) = v.as_object() else {
        r.diag(ptr, "node must be an object");
        return None;
    };
    if let Some(f) = obj.get("assume") {
        check_keys(r, obj, ptr, &["assume", "label"]);
        let formula = formula_at(r, f, &format!("{ptr}/assume"))?;
        let label = opt_string(r, obj, ptr, "label")?;
        return Some(Derivation::Assume { formula, label });
    }
    if let Some(t) = obj.get("term") {
        if !obj.contains_key("rule") {
            check_keys(r, obj, ptr, &["term"]);
            let Some(s) = t.as_str() else {
                r.diag(&format!("{ptr}/term"), "symbol must be a string");
                return None;
            };
            if r.sig.symbol(s).is_none() {
                r.diag(&format!("{ptr}/term"), format!("unknown symbol `{s}`"));
                return None;
            }
            return Some(Derivation::term(s));
        }
    }
    let Some(name) = obj.get("rule").and_then(Value::as_str) else {
        r.diag(ptr, "node needs one of `assume`, `term`, `rule`");
        return None;
    };
    check_keys(r, obj, ptr, RULE_FIELDS);
    let premises_v = match obj.get("premises") {
        None => Vec::new(),
        Some(Value::Array(a)) => a.clone(),
        Some(_) => {
            r.diag(&format!("{ptr}/premises"), "premises must be a list");
            return None;
        }
    };
    let mut premises = Vec::with_capacity(premises_v.len());
    let mut ok = true;
    for (i, p) in premises_v.iter().enumerate() {
        match node(r, p, &format!("{ptr}/premises/{i}")) {
            Some(d) => premises.push(d),
            None => ok = false,
        }
    }
    let rule = rule_at(r, name, obj, ptr);
    let concl_v = obj.get("conclusion");
    let conclusion = match (&rule, concl_v) {
        (_, None) => {
            r.diag(&format!("{ptr}/conclusion"), "missing conclusion");
            None
        }
        (Some(Rule::AsE(_) | Rule::NegAsE(_)), Some(c)) => match c.as_str() {
            Some(s) if r.sig.symbol(s).is_some() => Some(Unit::Term(s.to_string())),
            _ => {
                r.diag(&format!("{ptr}/conclusion"), "conclusion of an as-elimination must be a declared symbol");
                None
            }
        },
        (_, Some(c)) => formula_at(r, c, &format!("{ptr}/conclusion")).map(Unit::Formula),
    };
    if !ok {
        return None;
    }
    Some(Derivation::Node { rule: rule?, conclusion: conclusion?, premises })
}

fn check_keys(r: &mut Reader, obj: &Map<String, Value>, ptr: &str, allowed: &[&str]) {
    for key in obj.keys() {
        if !allowed.contains(&key.as_str()) {
            r.diag(&format!("{ptr}/{key}"), "unknown field");
        }
    }
}

fn formula_at(r: &mut Reader, v: &Value, ptr: &str) -> Option<crate::syntax::Formula> {
    let Some(s) = v.as_str() else {
        r.diag(ptr, "formula must be a string");
        return None;
    };
    match parse_formula(s, r.sig) {
        Ok(f) => Some(f),
        Err(e) => {
            r.diag(ptr, e.to_string());
            None
        }
    }
}

fn term_at(r: &mut Reader, obj: &Map<String, Value>, ptr: &str, key: &str) -> Option<Term> {
    let p = format!("{ptr}/{key}");
    let Some(s) = obj.get(key).and_then(Value::as_str) else {
        r.diag(&p, format!("missing `{key}`"));
        return None;
    };
    match parse_term(s, r.sig) {
        Ok(t) => Some(t),
        Err(e) => {
            r.diag(&p, e.to_string());
            None
        }
    }
}

fn opt_string(r: &mut Reader, obj: &Map<String, Value>, ptr: &str, key: &str) -> Option<Option<String>> {
    match obj.get(key) {
        None | Some(Value::Null) => Some(None),
        Some(Value::String(s)) => Some(Some(s.clone())),
        Some(_) => {
            r.diag(&format!("{ptr}/{key}"), "must be a string");
            None
        }
    }
}

fn index_at(r: &mut Reader, obj: &Map<String, Value>, ptr: &str) -> Option<usize> {
    match obj.get("index").and_then(Value::as_u64) {
        Some(i) => Some(i as usize),
        None => {
            r.diag(&format!("{ptr}/index"), "missing or non-numeric `index`");
            None
        }
    }
}

fn sign_at(r: &mut Reader, obj: &Map<String, Value>, ptr: &str) -> Option<Sign> {
    match obj.get("sign").and_then(Value::as_str) {
        Some("pos") => Some(Sign::Pos),
        Some("neg") => Some(Sign::Neg),
        _ => {
            r.diag(&format!("{ptr}/sign"), "sign must be \"pos\" or \"neg\"");
            None
        }
    }
}

fn eigen_variant(r: &mut Reader, obj: &Map<String, Value>, ptr: &str) -> Option<Term> {
    let variant = obj.get("variant").and_then(Value::as_str);
    let eigen = term_at(r, obj, ptr, "eigen")?;
    match (variant, &eigen) {
        (Some("i"), Term::Var(_)) | (Some("ii"), Term::Const(_)) => Some(eigen),
        (Some("i"), Term::Const(_)) => {
            r.diag(&format!("{ptr}/eigen"), "variant i needs a variable");
            None
        }
        (Some("ii"), Term::Var(_)) => {
            r.diag(&format!("{ptr}/eigen"), "variant ii needs a constant");
            None
        }
        _ => {
            r.diag(&format!("{ptr}/variant"), "variant must be \"i\" or \"ii\"");
            None
        }
    }
}

fn pairs_at(r: &mut Reader, obj: &Map<String, Value>, ptr: &str) -> Option<Vec<PairSpec>> {
    let Some(list) = obj.get("pairs").and_then(Value::as_array) else {
        r.diag(&format!("{ptr}/pairs"), "missing pair list");
        return None;
    };
    let mut out = Vec::new();
    for (i, p) in list.iter().enumerate() {
        let pp = format!("{ptr}/pairs/{i}");
        let Some(o) = p.as_object() else {
            r.diag(&pp, "pair must be an object");
            return None;
        };
        check_keys(r, o, &pp, &["pred", "position", "companions", "labels"]);
        let pred = o.get("pred").and_then(Value::as_str).map(str::to_string);
        let position = o.get("position").map_or(Some(1), |v| v.as_u64().map(|n| n as usize));
        let labels: Option<Vec<String>> = o
            .get("labels")
            .and_then(Value::as_array)
            .map(|a| a.iter().filter_map(|l| l.as_str().map(str::to_string)).collect());
        let mut companions = Vec::new();
        if let Some(cs) = o.get("companions") {
            let Some(cs) = cs.as_array() else {
                r.diag(&format!("{pp}/companions"), "companions must be a list");
                return None;
            };
            for (k, c) in cs.iter().enumerate() {
                match c.as_str().map(|s| parse_term(s, r.sig)) {
                    Some(Ok(t)) => companions.push(t),
                    _ => {
                        r.diag(&format!("{pp}/companions/{k}"), "companion must be a term");
                        return None;
                    }
                }
            }
        }
        match (pred, position, labels) {
            (Some(pred), Some(position), Some(l)) if l.len() == 2 => {
                out.push(PairSpec { pred, position, companions, labels: [l[0].clone(), l[1].clone()] })
            }
            _ => {
                r.diag(&pp, "pair needs `pred`, numeric `position` and two string `labels`");
                return None;
            }
        }
    }
    Some(out)
}

fn rule_at(r: &mut Reader, name: &str, obj: &Map<String, Value>, ptr: &str) -> Option<Rule> {
    Some(match name {
        "asI" => Rule::AsI,
        "negAsI" => Rule::NegAsI,
        "asE" => Rule::AsE(index_at(r, obj, ptr)?),
        "negAsE" => Rule::NegAsE(index_at(r, obj, ptr)?),
        "posQIdentI" | "negQIdentI" => Rule::QIdentI {
            sign: if name == "posQIdentI" { Sign::Pos } else { Sign::Neg },
            pairs: pairs_at(r, obj, ptr)?,
        },
        "posQIdentE" | "negQIdentE" => {
            let side = match obj.get("side").and_then(Value::as_u64) {
                Some(1) => Side::First,
                Some(2) => Side::Second,
                _ => {
                    r.diag(&format!("{ptr}/side"), "side must be 1 or 2");
                    return None;
                }
            };
            Rule::QIdentE { sign: if name == "posQIdentE" { Sign::Pos } else { Sign::Neg }, side }
        }
        "andI" => Rule::AndI,
        "andE1" => Rule::AndE1,
        "andE2" => Rule::AndE2,
        "orI1" => Rule::OrI1,
        "orI2" => Rule::OrI2,
        "orE" => {
            let labels = match obj.get("labels") {
                None => vec![None, None],
                Some(Value::Array(a)) if a.len() == 2 => {
                    a.iter().map(|l| l.as_str().map(str::to_string)).collect()
                }
                Some(_) => {
                    r.diag(&format!("{ptr}/labels"), "orE needs two labels (null for none)");
                    return None;
                }
            };
            Rule::OrE { left: labels[0].clone(), right: labels[1].clone() }
        }
        "impI" => Rule::ImpI { label: opt_string(r, obj, ptr, "label")? },
        "impE" => Rule::ImpE,
        "forallI" => match obj.get("variant").and_then(Value::as_str) {
            Some("iii") => Rule::ForallI(ForallVariant::EachConstant),
            _ => Rule::ForallI(ForallVariant::Eigen(eigen_variant(r, obj, ptr)?)),
        },
        "forallE" => Rule::ForallE(term_at(r, obj, ptr, "term")?),
        "existsI" => Rule::ExistsI(term_at(r, obj, ptr, "term")?),
        "existsE" => {
            Rule::ExistsE { eigen: eigen_variant(r, obj, ptr)?, label: opt_string(r, obj, ptr, "label")? }
        }
        "botI" => Rule::BotI,
        "iotaI" => Rule::IotaI(sign_at(r, obj, ptr)?),
        "iotaE1" | "iotaE2" | "iotaE3" => {
            Rule::IotaE { sign: sign_at(r, obj, ptr)?, which: name.as_bytes()[5] - b'0' }
        }
        other => {
            r.diag(&format!("{ptr}/rule"), format!("unknown rule `{other}`"));
            return None;
        }
    })
}

pub fn node_to_value(d: &Derivation) -> Value {
    match d {
        Derivation::Assume { formula, label: None } => json!({ "assume": formula.to_string() }),
        Derivation::Assume { formula, label: Some(l) } => json!({ "assume": formula.to_string(), "label": l }),
        Derivation::TermLeaf { symbol } => json!({ "term": symbol }),
        Derivation::Node { rule, conclusion, premises } => {
            let mut m = Map::new();
            let name = match rule {
                Rule::AsE(_) => "asE".to_string(),
                Rule::NegAsE(_) => "negAsE".to_string(),
                Rule::ForallI(_) => "forallI".to_string(),
                Rule::ExistsE { .. } => "existsE".to_string(),
                other => other.name(),
            };
            m.insert("rule".into(), json!(name));
            let concl = match conclusion {
                Unit::Formula(f) => f.to_string(),
                Unit::Term(s) => s.clone(),
            };
            m.insert("conclusion".into(), json!(concl));
            let variant = |t: &Term| if t.is_const() { "ii" } else { "i" };
            match rule {
                Rule::AsE(i) | Rule::NegAsE(i) => {
                    m.insert("index".into(), json!(i));
                }
                Rule::QIdentI { pairs, .. } => {
                    let ps: Vec<Value> = pairs
                        .iter()
                        .map(|p| {
                            let mut o = Map::new();
                            o.insert("pred".into(), json!(p.pred));
                            o.insert("position".into(), json!(p.position));
                            if !p.companions.is_empty() {
                                let cs: Vec<String> = p.companions.iter().map(|c| c.name().to_string()).collect();
                                o.insert("companions".into(), json!(cs));
                            }
                            o.insert("labels".into(), json!(p.labels));
                            Value::Object(o)
                        })
                        .collect();
                    m.insert("pairs".into(), Value::Array(ps));
                }
                Rule::QIdentE { side, .. } => {
                    m.insert("side".into(), json!(if *side == Side::First { 1 } else { 2 }));
                }
                Rule::OrE { left, right } => {
                    m.insert("labels".into(), json!([left, right]));
                }
                Rule::ImpI { label: Some(l) } => {
                    m.insert("label".into(), json!(l));
                }
                Rule::ForallI(ForallVariant::EachConstant) => {
                    m.insert("variant".into(), json!("iii"));
                }
                Rule::ForallI(ForallVariant::Eigen(t)) => {
                    m.insert("variant".into(), json!(variant(t)));
                    m.insert("eigen".into(), json!(t.name()));
                }
                Rule::ForallE(t) | Rule::ExistsI(t) => {
                    m.insert("term".into(), json!(t.name()));
                }
                Rule::ExistsE { eigen, label } => {
                    m.insert("variant".into(), json!(variant(eigen)));
                    m.insert("eigen".into(), json!(eigen.name()));
                    if let Some(l) = label {
                        m.insert("label".into(), json!(l));
                    }
                }
                Rule::IotaI(s) | Rule::IotaE { sign: s, .. } => {
                    m.insert("sign".into(), json!(s.as_str()));
                }
                _ => {}
            }
            m.insert("premises".into(), Value::Array(premises.iter().map(node_to_value).collect()));
            Value::Object(m)
        }
    }
}

pub fn script_to_value(script: &Script) -> Value {
    let derivations: Vec<Value> = script
        .derivations
        .iter()
        .map(|d| {
            let mut m = Map::new();
            m.insert("name".into(), json!(d.name));
            if let Some(desc) = &d.description {
                m.insert("description".into(), json!(desc));
            }
            if let Some(e) = &d.expect_error {
                m.insert("expect_error".into(), json!(e));
            }
            m.insert("tree".into(), node_to_value(&d.derivation));
            Value::Object(m)
        })
        .collect();
    let mut m = Map::new();
    m.insert("version".into(), json!(1));
    m.insert("base".into(), json!(script.base_ref));
    m.insert("mode".into(), json!(if script.mode == Mode::M0 { "m0" } else { "i0" }));
    if let Some(desc) = &script.description {
        m.insert("description".into(), json!(desc));
    }
    m.insert("derivations".into(), Value::Array(derivations));
    Value::Object(m)
}

/// JSON pointer of the node at `path` inside derivation number `index`.
pub fn pointer(index: usize, path: &[usize]) -> String {
    let mut s = format!("/derivations/{index}/tree");
    for i in path {
        s.push_str(&format!("/premises/{i}"));
    }
    s
}

pub fn to_pretty(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn roundtrip(base: &SubatomicBase, d: &Derivation) -> Derivation {
        let script = Script {
            base_ref: "b.json".into(),
            mode: Mode::I0,
            description: None,
            derivations: vec![NamedDerivation { name: "x".into(), description: None, expect_error: None, derivation: d.clone() }],
        };
        let v = script_to_value(&script);
        let back = script_from_value(&v, base.signature()).unwrap();
        back.derivations[0].derivation.clone()
    }

    #[test]
    fn corpus_roundtrips() {
        for s in corpus::worked_scripts() {
            for e in &s.entries {
                assert_eq!(roundtrip(&s.base, &e.derivation), e.derivation, "{}", e.name);
            }
        }
    }

    #[test]
    fn diagnostics_are_positioned() {
        let base = corpus::example_base();
        let v = serde_json::json!({
            "version": 1, "base": "x",
            "derivations": [{"name": "a", "tree": {"rule": "andI", "conclusion": "Phi1(alpha) & Phi1(alpha)",
                "premises": [{"assume": "Phi1(alpha)"}, {"assume": "Phi1(alpha) &"}]}}]
        });
        let errs = script_from_value(&v, base.signature()).unwrap_err();
        assert_eq!(errs[0].pointer, "/derivations/0/tree/premises/1/assume");
        let v = serde_json::json!({
            "version": 1, "base": "x",
            "derivations": [{"name": "a", "tree": {"rule": "fooI", "conclusion": "Phi1(alpha)"}}]
        });
        let errs = script_from_value(&v, base.signature()).unwrap_err();
        assert_eq!(errs[0].pointer, "/derivations/0/tree/rule");
    }
}
