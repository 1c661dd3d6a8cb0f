//! The JSON formats of the command line.
//!
//! An instance file looks like
//!
//! ```json
//! {
//!   "kind": "goods",
//!   "agents": [{"id": "1", "weight": "11/25"}, {"id": "2", "weight": "14/25"}],
//!   "items": ["a1", "a2"],
//!   "values": [["0", "1/2+1/2*sqrt5"], ["1", "1"]]
//! }
//! ```
//!
//! Every number is a string in the value grammar (`3`, `-2/7`,
//! `1/2+1/2*sqrt5`, `sqrt5`). Allocations are owner maps from item id to
//! agent id. Output keys keep a fixed order, so identical inputs give
//! byte-identical output.

use std::fmt;

use serde_json::{json, Map, Value as Json};

use crate::fairness::FairnessReport;
use crate::model::{Agent, Allocation, Instance, Kind, Violation};
use crate::numeric::{Extended, Scalar};
use crate::oracle::{Objective, OracleResult};

/// Digits used for every decimal rendering.
pub const DECIMAL_DIGITS: u32 = 6;

/// A bad input, located by a JSON path such as `agents[1].weight`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InputError {
    pub path: String,
    pub message: String,
}

impl InputError {
    fn at(path: impl Into<String>, message: impl Into<String>) -> Self {
        InputError { path: path.into(), message: message.into() }
    }
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            f.write_str(&self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

impl std::error::Error for InputError {}

fn object<'a>(v: &'a Json, path: &str, allowed: &[&str]) -> Result<&'a Map<String, Json>, InputError> {
    let obj = v.as_object().ok_or_else(|| InputError::at(path, "expected an object"))?;
    if let Some(k) = obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        let at = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
        return Err(InputError::at(at, "unknown key"));
    }
    Ok(obj)
}

fn field<'a>(obj: &'a Map<String, Json>, path: &str, key: &str) -> Result<&'a Json, InputError> {
    let at = if path.is_empty() { key.to_string() } else { format!("{path}.{key}") };
    obj.get(key).ok_or_else(|| InputError::at(at, "missing key"))
}

fn array<'a>(v: &'a Json, path: &str) -> Result<&'a Vec<Json>, InputError> {
    v.as_array().ok_or_else(|| InputError::at(path, "expected an array"))
}

fn string<'a>(v: &'a Json, path: &str) -> Result<&'a str, InputError> {
    v.as_str().ok_or_else(|| InputError::at(path, "expected a string"))
}

fn scalar<S: Scalar>(v: &Json, path: &str) -> Result<S, InputError> {
    string(v, path)?.parse().map_err(|e: crate::numeric::ParseValueError| InputError::at(path, e.to_string()))
}

/// Parses and validates an instance file.
pub fn parse_instance<S: Scalar>(text: &str) -> Result<Instance<S>, InputError> {
    let root: Json = serde_json::from_str(text).map_err(|e| InputError::at("", format!("malformed JSON: {e}")))?;
    let obj = object(&root, "", &["kind", "agents", "items", "values"])?;
    let kind = match string(field(obj, "", "kind")?, "kind")? {
        "goods" => Kind::Goods,
        "chores" => Kind::Chores,
        other => return Err(InputError::at("kind", format!("expected \"goods\" or \"chores\", got {other:?}"))),
    };
    let mut agents = Vec::new();
    for (i, a) in array(field(obj, "", "agents")?, "agents")?.iter().enumerate() {
        let path = format!("agents[{i}]");
        let ao = object(a, &path, &["id", "weight"])?;
        let id = string(field(ao, &path, "id")?, &format!("{path}.id"))?.to_string();
        let weight = scalar(field(ao, &path, "weight")?, &format!("{path}.weight"))?;
        agents.push(Agent { id, weight });
    }
    let items = array(field(obj, "", "items")?, "items")?
        .iter()
        .enumerate()
        .map(|(g, v)| string(v, &format!("items[{g}]")).map(str::to_string))
        .collect::<Result<Vec<_>, _>>()?;
    let mut matrix = Vec::new();
    for (i, row) in array(field(obj, "", "values")?, "values")?.iter().enumerate() {
        let path = format!("values[{i}]");
        let row = array(row, &path)?
            .iter()
            .enumerate()
            .map(|(g, v)| scalar(v, &format!("{path}[{g}]")))
            .collect::<Result<Vec<S>, _>>()?;
        matrix.push(row);
    }

    let inst = Instance::unchecked(kind, agents, items, matrix);
    let violations = inst.validate();
    match violations.first() {
        None => Ok(inst),
        Some(first) => {
            let message = violations.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ");
            Err(InputError::at(violation_path(&inst, first), message))
        }
    }
}

fn violation_path<S: Scalar>(inst: &Instance<S>, v: &Violation) -> String {
    let last_index = |ids: &[String], id: &str| ids.iter().rposition(|x| x == id).unwrap_or(0);
    match v {
        Violation::NonPositiveWeight { agent } => format!("agents[{agent}].weight"),
        Violation::NegativeValue { agent, item } => format!("values[{agent}][{item}]"),
        Violation::DuplicateAgentId(id) => {
            let ids: Vec<String> = inst.agents().iter().map(|a| a.id.clone()).collect();
            format!("agents[{}].id", last_index(&ids, id))
        }
        Violation::DuplicateItemId(id) => format!("items[{}]", last_index(inst.items(), id)),
        Violation::DimensionMismatch(_) => "values".to_string(),
    }
}

pub fn instance_to_json<S: Scalar>(inst: &Instance<S>) -> Json {
    json!({
        "kind": inst.kind().to_string(),
        "agents": inst.agents().iter().map(|a| json!({"id": a.id, "weight": a.weight.render_exact()})).collect::<Vec<_>>(),
        "items": inst.items(),
        "values": inst.matrix().iter().map(|r| r.iter().map(Scalar::render_exact).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}

/// `{"item id": "agent id", ...}` in item order.
pub fn allocation_to_json<S: Scalar>(inst: &Instance<S>, alloc: &Allocation) -> Json {
    let mut map = Map::new();
    for (g, &o) in alloc.owners().iter().enumerate() {
        map.insert(inst.items()[g].clone(), Json::String(inst.agents()[o].id.clone()));
    }
    Json::Object(map)
}

/// Reads an owner map; every item must be assigned exactly once.
pub fn parse_allocation<S: Scalar>(inst: &Instance<S>, text: &str) -> Result<Allocation, InputError> {
    let root: Json = serde_json::from_str(text).map_err(|e| InputError::at("", format!("malformed JSON: {e}")))?;
    let obj = root.as_object().ok_or_else(|| InputError::at("", "expected an object mapping item ids to agent ids"))?;
    let mut owners = vec![None; inst.m()];
    for (item, agent) in obj {
        let g = inst.item_index(item).ok_or_else(|| InputError::at(item.clone(), "unknown item"))?;
        let id = string(agent, item)?;
        let a = inst.agent_index(id).ok_or_else(|| InputError::at(item.clone(), format!("unknown agent {id:?}")))?;
        owners[g] = Some(a);
    }
    let owners = owners
        .into_iter()
        .enumerate()
        .map(|(g, o)| o.ok_or_else(|| InputError::at("", format!("item {} is not allocated", inst.items()[g]))))
        .collect::<Result<Vec<_>, _>>()?;
    Allocation::from_owners(owners, inst.n()).map_err(|e| InputError::at("", e.to_string()))
}

fn insert_factor<S: Scalar>(map: &mut Map<String, Json>, prefix: &str, f: &Extended<S>) {
    map.insert(format!("{prefix}_exact"), Json::String(f.render_exact()));
    map.insert(format!("{prefix}_decimal"), Json::String(f.render_decimal(DECIMAL_DIGITS)));
}

fn agent_id<S: Scalar>(inst: &Instance<S>, i: usize) -> Json {
    Json::String(inst.agents()[i].id.clone())
}

pub fn report_to_json<S: Scalar>(inst: &Instance<S>, report: &FairnessReport<S>) -> Json {
    let mut map = Map::new();
    map.insert("criterion".into(), Json::String(report.criterion.name().into()));
    map.insert("kind".into(), Json::String(report.kind.to_string()));
    map.insert("satisfied".into(), Json::Bool(report.satisfied));
    insert_factor(&mut map, "factor", &report.factor);
    map.insert(
        "worst_pair".into(),
        report.worst_pair.map_or(Json::Null, |(i, j)| json!([agent_id(inst, i), agent_id(inst, j)])),
    );
    let pairs = report
        .pairs
        .iter()
        .map(|p| {
            let mut pm = Map::new();
            pm.insert("envier".into(), agent_id(inst, p.envier));
            pm.insert("envied".into(), agent_id(inst, p.envied));
            insert_factor(&mut pm, "factor", &p.factor);
            pm.insert("removed".into(), p.removed.map_or(Json::Null, |g| Json::String(inst.items()[g].clone())));
            Json::Object(pm)
        })
        .collect();
    map.insert("pairs".into(), Json::Array(pairs));
    Json::Object(map)
}

pub fn oracle_result_to_json<S: Scalar>(inst: &Instance<S>, r: &OracleResult<S>) -> Json {
    let mut map = Map::new();
    let objective = match r.objective {
        Objective::Exists => "exists",
        Objective::BestFactor => "best-factor",
    };
    map.insert("objective".into(), Json::String(objective.into()));
    map.insert("criterion".into(), Json::String(r.criterion.name().into()));
    map.insert("kind".into(), Json::String(r.kind.to_string()));
    map.insert("exists".into(), Json::Bool(r.exists));
    map.insert("witness".into(), r.witness.as_ref().map_or(Json::Null, |a| allocation_to_json(inst, a)));
    if let Some(f) = &r.best_factor {
        insert_factor(&mut map, "best_factor", f);
    }
    if let Some(a) = &r.argbest {
        map.insert("argbest".into(), allocation_to_json(inst, a));
    }
    map.insert("allocations_scanned".into(), Json::from(r.allocations_scanned));
    Json::Object(map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{get_case, CaseId};
    use crate::Value;

    const SMALL: &str = r#"{"kind":"goods","agents":[{"id":"x","weight":"11/25"},{"id":"y","weight":"1"}],
        "items":["a","b"],"values":[["1/2+1/2*sqrt5","0"],["1","2"]]}"#;

    #[test]
    fn parses_value_strings() {
        let inst: Instance = parse_instance(SMALL).unwrap();
        assert_eq!(*inst.weight(0), Value::ratio(11, 25));
        assert_eq!(*inst.value(0, 0), Value::phi());
    }

    #[test]
    fn errors_carry_paths() {
        let zero = SMALL.replace("\"weight\":\"1\"", "\"weight\":\"0\"");
        let e = parse_instance::<Value>(&zero).unwrap_err();
        assert_eq!(e.path, "agents[1].weight");
        assert_eq!(e.message, "non-positive weight: agent 2");
        let bad = SMALL.replace("\"2\"]", "\"2/0\"]");
        assert_eq!(parse_instance::<Value>(&bad).unwrap_err().path, "values[1][1]");
        let extra = SMALL.replace("\"kind\"", "\"colour\":1,\"kind\"");
        assert_eq!(parse_instance::<Value>(&extra).unwrap_err().path, "colour");
        let extra = SMALL.replace("\"id\":\"x\"", "\"id\":\"x\",\"w\":1");
        assert_eq!(parse_instance::<Value>(&extra).unwrap_err().path, "agents[0].w");
        let rows = SMALL.replace(",[\"1\",\"2\"]", "");
        assert_eq!(parse_instance::<Value>(&rows).unwrap_err().path, "values");
        assert!(parse_instance::<Value>("{").unwrap_err().message.starts_with("malformed JSON"));
    }

    #[test]
    fn corpus_cases_round_trip() {
        for id in CaseId::ALL {
            let inst = get_case(id, None).unwrap();
            let text = instance_to_json(&inst).to_string();
            assert_eq!(parse_instance::<Value>(&text).unwrap(), inst);
        }
    }

    #[test]
    fn allocation_files() {
        let inst: Instance = parse_instance(SMALL).unwrap();
        let alloc = Allocation::from_owners(vec![1, 0], 2).unwrap();
        let text = allocation_to_json(&inst, &alloc).to_string();
        assert_eq!(text, r#"{"a":"y","b":"x"}"#);
        assert_eq!(parse_allocation(&inst, &text).unwrap(), alloc);
        assert!(parse_allocation(&inst, r#"{"a":"y"}"#).is_err());
        assert_eq!(parse_allocation(&inst, r#"{"a":"z","b":"x"}"#).unwrap_err().path, "a");
    }
}
