//! Polynomial optimization problem instances and their native JSON form.
//!
//! The JSON document looks like
//!
//! ```json
//! {
//!   "name": "example",
//!   "nvars": 2,
//!   "sense": "max",
//!   "objective": [[1.0, [0, 1], [1, 1]], [-2.5]],
//!   "constraints": [{"poly": [[1.0], [-1.0, [0, 2]]], "rel": "ge"}],
//!   "domains": ["free", {"box": [0.0, 1.0]}]
//! }
//! ```
//!
//! A term is `[coeff, [var, pow], ...]` with 0-based variables; `[c]` is a constant.
//! Domains are `"free"`, `{"box": [lo, hi]}`, `"pm1"` (x ∈ {-1, 1}) or `"binary"`
//! (x ∈ {0, 1}); a missing `domains` array means every variable is free. Constraints
//! may carry an optional `"rule"` (ordered subset generator, see `SubsetRule`),
//! `"domain_rules"` maps a variable index to the rule of its domain constraint, and
//! `"encoder"` names the problem class that produced the instance. An optional
//! `"cliques"` array of variable lists fixes the clique structure, and `"scales"` gives
//! the typical magnitude of each variable.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{Monomial, Polynomial, ReductionRule, VarReduction};
use crate::error::{Error, Result};
use crate::sublevel::SubsetRule;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Min,
    Max,
}

impl Sense {
    /// +1 for minimization, -1 for maximization.
    pub fn sign(self) -> f64 {
        match self {
            Sense::Min => 1.0,
            Sense::Max => -1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    /// `g(x) >= 0`
    Ge,
    /// `g(x) = 0`
    Eq,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum VarDomain {
    Free,
    Box { lo: f64, hi: f64 },
    PlusMinusOne,
    Binary,
}

impl VarDomain {
    pub fn reduction(self) -> VarReduction {
        match self {
            VarDomain::PlusMinusOne => VarReduction::Involutory,
            VarDomain::Binary => VarReduction::Idempotent,
            _ => VarReduction::None,
        }
    }

    pub fn is_discrete(self) -> bool {
        matches!(self, VarDomain::PlusMinusOne | VarDomain::Binary)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub poly: Polynomial,
    pub rel: Relation,
    pub rule: SubsetRule,
}

impl Constraint {
    pub fn ge(poly: Polynomial) -> Self {
        Self {
            poly,
            rel: Relation::Ge,
            rule: SubsetRule::Ordered,
        }
    }

    pub fn eq(poly: Polynomial) -> Self {
        Self {
            poly,
            rel: Relation::Eq,
            rule: SubsetRule::Ordered,
        }
    }

    pub fn with_rule(mut self, rule: SubsetRule) -> Self {
        self.rule = rule;
        self
    }

    pub fn is_satisfied(&self, x: &[f64], tol: f64) -> bool {
        let v = self.poly.evaluate(x);
        match self.rel {
            Relation::Ge => v >= -tol,
            Relation::Eq => v.abs() <= tol,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PopInstance {
    pub name: String,
    pub nvars: usize,
    pub sense: Sense,
    pub objective: Polynomial,
    pub constraints: Vec<Constraint>,
    pub domains: Vec<VarDomain>,
    /// Subset rules for the implicit constraints carried by variable domains.
    /// Domains without an entry use `Anchored` on their own variable.
    pub domain_rules: BTreeMap<usize, SubsetRule>,
    /// Problem class that produced the instance, when it came from an encoder.
    pub encoder: Option<String>,
    /// Clique structure fixed by the encoder; replaces the chordal-extension cover.
    pub cliques: Option<Vec<Vec<usize>>>,
    /// Typical magnitude of each variable; the relaxation is solved in `x_i / scales[i]`.
    pub scales: Option<Vec<f64>>,
}

impl PopInstance {
    pub fn new(name: impl Into<String>, nvars: usize, sense: Sense, objective: Polynomial) -> Self {
        Self {
            name: name.into(),
            nvars,
            sense,
            objective,
            constraints: Vec::new(),
            domains: vec![VarDomain::Free; nvars],
            domain_rules: BTreeMap::new(),
            encoder: None,
            cliques: None,
            scales: None,
        }
    }

    pub fn push(&mut self, c: Constraint) {
        self.constraints.push(c);
    }

    pub fn validate(&self) -> Result<()> {
        if self.domains.len() != self.nvars {
            return Err(Error::Dimension(format!(
                "{} domains for {} variables",
                self.domains.len(),
                self.nvars
            )));
        }
        let polys = std::iter::once(&self.objective).chain(self.constraints.iter().map(|c| &c.poly));
        for p in polys {
            if p.nvars() != self.nvars || p.terms().any(|(m, _)| m.span() > self.nvars) {
                return Err(Error::Dimension(format!(
                    "polynomial does not live in {} variables",
                    self.nvars
                )));
            }
        }
        if let Some(sc) = &self.scales {
            if sc.len() != self.nvars || sc.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                return Err(Error::Invalid("scales must be one positive number per variable".into()));
            }
        }
        for (i, d) in self.domains.iter().enumerate() {
            if let VarDomain::Box { lo, hi } = d {
                if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                    return Err(Error::Invalid(format!("bad box [{lo}, {hi}] on x{i}")));
                }
            }
        }
        Ok(())
    }

    /// Subset rule of the implicit constraint attached to the domain of `var`.
    pub fn domain_rule(&self, var: usize) -> SubsetRule {
        self.domain_rules
            .get(&var)
            .cloned()
            .unwrap_or(SubsetRule::Anchored { var })
    }

    pub fn reduction_rule(&self) -> ReductionRule {
        ReductionRule::from_kinds(self.domains.iter().map(|d| d.reduction()).collect())
    }

    /// Objective value at `x`.
    pub fn value(&self, x: &[f64]) -> f64 {
        self.objective.evaluate(x)
    }

    /// Checks constraints and domains at `x`.
    pub fn is_feasible(&self, x: &[f64], tol: f64) -> bool {
        let domains_ok = self.domains.iter().zip(x).all(|(d, &v)| match *d {
            VarDomain::Free => true,
            VarDomain::Box { lo, hi } => v >= lo - tol && v <= hi + tol,
            VarDomain::PlusMinusOne => (v.abs() - 1.0).abs() <= tol,
            VarDomain::Binary => v.abs() <= tol || (v - 1.0).abs() <= tol,
        });
        domains_ok && self.constraints.iter().all(|c| c.is_satisfied(x, tol))
    }

    pub fn to_json(&self) -> Value {
        let domains: Vec<Value> = self
            .domains
            .iter()
            .map(|d| match *d {
                VarDomain::Free => json!("free"),
                VarDomain::Box { lo, hi } => json!({ "box": [lo, hi] }),
                VarDomain::PlusMinusOne => json!("pm1"),
                VarDomain::Binary => json!("binary"),
            })
            .collect();
        let constraints: Vec<Value> = self
            .constraints
            .iter()
            .map(|c| {
                let mut obj = json!({ "poly": poly_to_json(&c.poly), "rel": c.rel });
                if c.rule != SubsetRule::Ordered {
                    obj["rule"] = serde_json::to_value(&c.rule).expect("rule serializes");
                }
                obj
            })
            .collect();
        let mut doc = json!({
            "name": self.name,
            "nvars": self.nvars,
            "sense": self.sense,
            "objective": poly_to_json(&self.objective),
            "constraints": constraints,
            "domains": domains,
        });
        if !self.domain_rules.is_empty() {
            let rules: serde_json::Map<String, Value> = self
                .domain_rules
                .iter()
                .map(|(v, r)| (v.to_string(), serde_json::to_value(r).expect("rule serializes")))
                .collect();
            doc["domain_rules"] = Value::Object(rules);
        }
        if let Some(enc) = &self.encoder {
            doc["encoder"] = json!(enc);
        }
        if let Some(cl) = &self.cliques {
            doc["cliques"] = json!(cl);
        }
        if let Some(sc) = &self.scales {
            doc["scales"] = json!(sc);
        }
        doc
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("json")
    }

    pub fn from_json(doc: &Value) -> Result<Self> {
        let bad = |msg: &str| Error::Invalid(format!("POP json: {msg}"));
        let nvars = doc["nvars"].as_u64().ok_or_else(|| bad("missing nvars"))? as usize;
        let sense: Sense = serde_json::from_value(doc["sense"].clone())?;
        let objective = poly_from_json(&doc["objective"], nvars)?;
        let mut constraints = Vec::new();
        if let Some(list) = doc.get("constraints").and_then(Value::as_array) {
            for c in list {
                let poly = poly_from_json(&c["poly"], nvars)?;
                let rel: Relation = serde_json::from_value(c["rel"].clone())?;
                let rule = match c.get("rule") {
                    Some(r) => serde_json::from_value(r.clone())?,
                    None => SubsetRule::Ordered,
                };
                constraints.push(Constraint { poly, rel, rule });
            }
        }
        let domains = match doc.get("domains").and_then(Value::as_array) {
            Some(list) => list.iter().map(domain_from_json).collect::<Result<Vec<_>>>()?,
            None => vec![VarDomain::Free; nvars],
        };
        let mut domain_rules = BTreeMap::new();
        if let Some(map) = doc.get("domain_rules").and_then(Value::as_object) {
            for (k, r) in map {
                let var: usize = k.parse().map_err(|_| bad("domain_rules keys are variable indices"))?;
                domain_rules.insert(var, serde_json::from_value(r.clone())?);
            }
        }
        let pop = PopInstance {
            name: doc
                .get("name")
                .and_then(Value::as_str)
                .unwrap_or("pop")
                .to_string(),
            nvars,
            sense,
            objective,
            constraints,
            domains,
            domain_rules,
            encoder: doc.get("encoder").and_then(Value::as_str).map(str::to_string),
            cliques: match doc.get("cliques") {
                Some(v) => Some(serde_json::from_value(v.clone())?),
                None => None,
            },
            scales: match doc.get("scales") {
                Some(v) => Some(serde_json::from_value(v.clone())?),
                None => None,
            },
        };
        pop.validate()?;
        Ok(pop)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Self::from_json(&serde_json::from_str(s)?)
    }
}

fn domain_from_json(v: &Value) -> Result<VarDomain> {
    match v {
        Value::String(s) => match s.as_str() {
            "free" => Ok(VarDomain::Free),
            "pm1" => Ok(VarDomain::PlusMinusOne),
            "binary" => Ok(VarDomain::Binary),
            other => Err(Error::Invalid(format!("unknown domain {other:?}"))),
        },
        Value::Object(o) => {
            let b = o
                .get("box")
                .and_then(Value::as_array)
                .filter(|a| a.len() == 2)
                .ok_or_else(|| Error::Invalid("box domain needs [lo, hi]".into()))?;
            let lo = b[0].as_f64().ok_or_else(|| Error::Invalid("box lo".into()))?;
            let hi = b[1].as_f64().ok_or_else(|| Error::Invalid("box hi".into()))?;
            Ok(VarDomain::Box { lo, hi })
        }
        _ => Err(Error::Invalid(format!("bad domain {v}"))),
    }
}

pub fn poly_to_json(p: &Polynomial) -> Value {
    Value::Array(
        p.terms()
            .map(|(m, c)| {
                let mut term = vec![json!(c)];
                term.extend(m.exponents().iter().map(|&(v, e)| json!([v, e])));
                Value::Array(term)
            })
            .collect(),
    )
}

pub fn poly_from_json(v: &Value, nvars: usize) -> Result<Polynomial> {
    let terms = v
        .as_array()
        .ok_or_else(|| Error::Invalid("polynomial must be an array of terms".into()))?;
    let mut out = Vec::with_capacity(terms.len());
    for t in terms {
        let t = t
            .as_array()
            .filter(|a| !a.is_empty())
            .ok_or_else(|| Error::Invalid(format!("bad term {t}")))?;
        let c = t[0]
            .as_f64()
            .ok_or_else(|| Error::Invalid(format!("bad coefficient {}", t[0])))?;
        let mut pairs = Vec::new();
        for vp in &t[1..] {
            let (var, pow) = vp
                .as_array()
                .filter(|a| a.len() == 2)
                .and_then(|a| Some((a[0].as_u64()?, a[1].as_u64()?)))
                .ok_or_else(|| Error::Invalid(format!("bad [var, pow] pair {vp}")))?;
            pairs.push((var as usize, pow as u32));
        }
        out.push((c, Monomial::from_pairs(pairs)));
    }
    Polynomial::from_terms(nvars, out)
}
