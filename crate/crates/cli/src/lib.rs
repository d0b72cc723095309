//! Command dispatch for the batch front end: validates a JSON payload
//! against the command's schema, runs the computation, and wraps the
//! result in a reproducible report that echoes the configuration, the
//! library version and the seed. Identical configs and seeds produce
//! byte-identical reports.

use std::fmt;

use serde::Deserialize;
use serde_json::{json, Map, Value};

use hermass::curve::CurveRepr;
use hermass::dieudonne::{
    build_embedding, centralizer_basis, centralizer_is_unital_and_closed, match_block_order,
    DieudonneError,
};
use hermass::dvr::TruncatedDvr;
use hermass::field::make_field;
use hermass::mass::{mass, MassConfigRepr, MassError};
use hermass::order::{
    chain_stabilizer, matrix_digit_coords, matrix_span, span_is_unital_and_closed, standard_chain,
    BlockOrder, TypeVector,
};
use hermass::zeta::ZetaData;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Zeta,
    Order,
    Centralizer,
    Mass,
    Singular,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Zeta => "zeta",
            Command::Order => "order",
            Command::Centralizer => "centralizer",
            Command::Mass => "mass",
            Command::Singular => "singular",
        }
    }
}

/// A parsed invocation: the command, its JSON payload, and the seed.
pub struct RunConfig {
    pub command: Command,
    pub payload: Value,
    pub seed: Option<u64>,
}

/// Errors are split by exit code: validation failures exit 2 with a
/// machine-readable list, internal assertion failures exit 1.
#[derive(Debug)]
pub enum CliError {
    Validation(Vec<String>),
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Internal(_) => 1,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            CliError::Validation(errors) => json!({ "errors": errors }),
            CliError::Internal(msg) => json!({ "errors": [msg], "internal": true }),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(errors) => {
                write!(f, "invalid configuration: {}", errors.join("; "))
            }
            CliError::Internal(msg) => write!(f, "internal assertion failure: {}", msg),
        }
    }
}

impl From<MassError> for CliError {
    fn from(e: MassError) -> Self {
        match e {
            MassError::Validation(errors) => CliError::Validation(errors),
            MassError::Internal(msg) => CliError::Internal(msg),
            MassError::Zeta(msg) => CliError::Validation(vec![msg]),
        }
    }
}

impl From<DieudonneError> for CliError {
    fn from(e: DieudonneError) -> Self {
        match e {
            DieudonneError::InsufficientTruncation | DieudonneError::NotInSubfield => {
                CliError::Internal(e.to_string())
            }
            other => CliError::Validation(vec![other.to_string()]),
        }
    }
}

fn parse_payload<T: serde::de::DeserializeOwned>(payload: &Value) -> Result<T, CliError> {
    serde_json::from_value::<T>(payload.clone()).map_err(|e| {
        CliError::Validation(vec![format!("payload does not match the schema: {}", e)])
    })
}

/// Runs a command and returns the full report object.
pub fn run(config: &RunConfig) -> Result<Value, CliError> {
    let result = match config.command {
        Command::Zeta => run_zeta(&config.payload)?,
        Command::Order => run_order(&config.payload)?,
        Command::Centralizer => run_centralizer(&config.payload)?,
        Command::Mass => run_mass(&config.payload, false)?,
        Command::Singular => run_mass(&config.payload, true)?,
    };
    let mut report = Map::new();
    report.insert("command".into(), json!(config.command.name()));
    report.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    report.insert("seed".into(), config.seed.map_or(Value::Null, |s| json!(s)));
    report.insert("config".into(), config.payload.clone());
    report.insert("result".into(), result);
    Ok(Value::Object(report))
}

#[derive(Deserialize)]
struct ZetaPayload {
    #[serde(flatten)]
    curve: CurveRepr,
    specials_upto: Option<u32>,
    places_upto: Option<u32>,
}

fn run_zeta(payload: &Value) -> Result<Value, CliError> {
    let parsed: ZetaPayload = parse_payload(payload)?;
    let curve = parsed
        .curve
        .build()
        .map_err(|e| CliError::Validation(vec![e.to_string()]))?;
    let zeta =
        ZetaData::from_curve(&curve).map_err(|e| CliError::Validation(vec![e.to_string()]))?;
    let specials_upto = parsed.specials_upto.unwrap_or(3).max(1);
    let places_upto = parsed.places_upto.unwrap_or(6).max(1);
    let report = zeta.report(specials_upto);
    let mut places = Map::new();
    for r in 1..=places_upto {
        let count = zeta
            .places_of_degree(r)
            .map_err(|e| CliError::Internal(e.to_string()))?;
        places.insert(r.to_string(), json!(count.to_string()));
    }
    let mut out = serde_json::to_value(&report).expect("report serializes");
    out.as_object_mut()
        .expect("object")
        .insert("places_by_degree".into(), Value::Object(places));
    Ok(out)
}

#[derive(Deserialize)]
struct LocalOrderPayload {
    d: usize,
    f: Vec<usize>,
    q: hermass::curve::BaseFieldRepr,
    /// Truncation level; defaults to d + 2.
    #[serde(rename = "N")]
    n: Option<usize>,
}

impl LocalOrderPayload {
    fn level(&self) -> Result<usize, CliError> {
        let n = self.n.unwrap_or(self.d + 2);
        if self.d == 0 || n == 0 {
            return Err(CliError::Validation(vec![format!(
                "d = {} and N = {} must both be at least 1",
                self.d, n
            )]));
        }
        Ok(n)
    }
}

fn run_order(payload: &Value) -> Result<Value, CliError> {
    let parsed: LocalOrderPayload = parse_payload(payload)?;
    let base = make_field(parsed.q.p, parsed.q.e, 1)
        .map_err(|e| CliError::Validation(vec![e.to_string()]))?;
    let level = parsed.level()?;
    let ring = TruncatedDvr::new(&base, level);
    let f = TypeVector::new(parsed.f);
    if f.len() != parsed.d {
        return Err(CliError::Validation(vec![format!(
            "type vector {} must have d = {} entries",
            f, parsed.d
        )]));
    }
    let chain = standard_chain(&f, &ring).map_err(|e| CliError::Validation(vec![e.to_string()]))?;
    let stab = chain_stabilizer(&chain).map_err(|e| CliError::Internal(e.to_string()))?;
    let closed = span_is_unital_and_closed(&stab.basis);
    let order = BlockOrder::new(&ring, f).map_err(|e| CliError::Validation(vec![e.to_string()]))?;
    let mut matches = stab.dimension == order.fq_dimension();
    if matches {
        let span = matrix_span(&stab.basis);
        for m in order.basis() {
            if !span.contains(&matrix_digit_coords(&m)) {
                matches = false;
            }
        }
        for m in &stab.basis {
            match order.contains(m) {
                Ok(true) => {}
                _ => matches = false,
            }
        }
    }
    let basis: Vec<Value> = stab.basis.iter().map(|m| json!(m.to_repr())).collect();
    Ok(json!({
        "dimension": stab.dimension,
        "closed_and_unital": closed,
        "matches_block_order": matches,
        "basis": basis,
    }))
}

fn run_centralizer(payload: &Value) -> Result<Value, CliError> {
    let parsed: LocalOrderPayload = parse_payload(payload)?;
    let base = make_field(parsed.q.p, parsed.q.e, 1)
        .map_err(|e| CliError::Validation(vec![e.to_string()]))?;
    let level = parsed.level()?;
    let f = TypeVector::new(parsed.f);
    let embedding = build_embedding(parsed.d, &f, &base, parsed.d * level)?;
    let cb = centralizer_basis(&embedding)?;
    let closed = centralizer_is_unital_and_closed(&embedding, &cb);
    let certificate = match_block_order(&embedding, &cb)?;
    Ok(json!({
        "dimension": cb.dimension,
        "depth": cb.depth,
        "closed_and_unital": closed,
        "certificate": certificate,
    }))
}

fn run_mass(payload: &Value, require_singular: bool) -> Result<Value, CliError> {
    let parsed: MassConfigRepr = parse_payload(payload)?;
    let config = parsed.build().map_err(CliError::from)?;
    if require_singular
        && (config.algebra.d() != 2 || config.f.entries() != [1, 1] || config.level.is_empty())
    {
        return Err(CliError::Validation(vec![
            "the singular command requires d = 2, type (1,1), and a nonempty level".into(),
        ]));
    }
    let report = mass(&config).map_err(CliError::from)?;
    Ok(serde_json::to_value(&report).expect("report serializes"))
}

/// Renders a JSON value as an aligned key/value table: nested keys are
/// joined with dots, arrays indexed, and every number kept exact.
pub fn render_table(value: &Value) -> String {
    let mut rows = Vec::new();
    flatten("", value, &mut rows);
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    let mut out = String::new();
    for (k, v) in rows {
        out.push_str(&format!("{:<width$}  {}\n", k, v, width = width));
    }
    out
}

fn flatten(prefix: &str, value: &Value, rows: &mut Vec<(String, String)>) {
    match value {
        Value::Object(map) => {
            // A rational {num, den} prints as a fraction.
            if map.len() == 2 && map.contains_key("num") && map.contains_key("den") {
                let num = map["num"].as_str().unwrap_or("?");
                let den = map["den"].as_str().unwrap_or("?");
                let rendered = if den == "1" {
                    num.to_string()
                } else {
                    format!("{}/{}", num, den)
                };
                rows.push((prefix.to_string(), rendered));
                return;
            }
            for (k, v) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{}.{}", prefix, k)
                };
                flatten(&key, v, rows);
            }
        }
        Value::Array(items) => {
            if items
                .iter()
                .all(|v| v.is_u64() || v.is_i64() || v.is_string())
            {
                let inline: Vec<String> = items
                    .iter()
                    .map(|v| match v {
                        Value::String(s) => s.clone(),
                        other => other.to_string(),
                    })
                    .collect();
                rows.push((prefix.to_string(), format!("[{}]", inline.join(", "))));
            } else {
                for (i, v) in items.iter().enumerate() {
                    flatten(&format!("{}[{}]", prefix, i), v, rows);
                }
            }
        }
        Value::Null => rows.push((prefix.to_string(), "-".into())),
        Value::String(s) => rows.push((prefix.to_string(), s.clone())),
        other => rows.push((prefix.to_string(), other.to_string())),
    }
}
