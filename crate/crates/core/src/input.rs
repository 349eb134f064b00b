//! JSON input descriptions of quantum Appell–Humbert data.
//!
//! Complex scalars are written as `["a/b", "c/d"]` (real, imaginary), as a
//! single rational string, or as a JSON integer.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::exactalg::{format_rational, parse_rational, GaussRat, Matrix, Rational};
use crate::moyal::{PoissonBivector, QuantumAHData};
use crate::torus::{ClassicalAHData, HermitianNS, PeriodLattice, Semicharacter, Violation, SHAPE};

pub const SCHEMA_VERSION: u64 = 1;

/// Parsed but not yet validated input.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct InputDescription {
    pub g: usize,
    /// `2g` generators with `g` components each; absent means the standard lattice.
    pub lattice: Option<Vec<Vec<GaussRat>>>,
    pub hermitian: Vec<Vec<GaussRat>>,
    pub chi: Vec<Rational>,
    /// Absent means `Π = 0`.
    pub poisson: Option<Vec<Vec<GaussRat>>>,
    pub l_series: BTreeMap<usize, Vec<GaussRat>>,
    pub hbar_order: Option<usize>,
    pub seed: Option<u64>,
}

fn parse_err(path: &str, message: impl Into<String>) -> Error {
    Error::Parse { location: path.to_string(), message: message.into() }
}

fn rational_at(v: &Value, path: &str) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s).map_err(|e| match e {
            Error::Parse { message, .. } => parse_err(path, format!("{message} in {s:?}")),
            other => other,
        }),
        Value::Number(n) => match n.as_i64() {
            Some(i) => Ok(Rational::from_integer(i.into())),
            None => Err(parse_err(path, "numbers must be integers; write fractions as \"a/b\"")),
        },
        _ => Err(parse_err(path, "expected a rational")),
    }
}

/// A complex scalar in any of the accepted forms.
pub fn parse_scalar(v: &Value, path: &str) -> Result<GaussRat> {
    match v {
        Value::Array(parts) if parts.len() == 2 => {
            Ok(GaussRat::new(rational_at(&parts[0], &format!("{path}[0]"))?, rational_at(&parts[1], &format!("{path}[1]"))?))
        }
        Value::Array(parts) => Err(parse_err(path, format!("complex pair needs 2 entries, got {}", parts.len()))),
        other => Ok(GaussRat::real(rational_at(other, path)?)),
    }
}

/// Parses a scalar from JSON text.
pub fn parse_scalar_str(text: &str) -> Result<GaussRat> {
    parse_scalar(&from_text(text)?, "$")
}

/// Canonical JSON form: integer, rational string, or pair of rational strings.
pub fn scalar_to_json(z: &GaussRat) -> Value {
    if z.im.is_zero() {
        if let Some(i) = z.re.is_integer().then(|| z.re.to_integer()).and_then(|b| i64::try_from(b).ok()) {
            return json!(i);
        }
        return json!(format_rational(&z.re));
    }
    json!([format_rational(&z.re), format_rational(&z.im)])
}

fn vector_at(v: &Value, path: &str, len: usize) -> Result<Vec<GaussRat>> {
    let items = v.as_array().ok_or_else(|| parse_err(path, "expected an array"))?;
    if items.len() != len {
        return Err(parse_err(path, format!("expected {len} entries, got {}", items.len())));
    }
    items.iter().enumerate().map(|(i, x)| parse_scalar(x, &format!("{path}[{i}]"))).collect()
}

fn matrix_at(v: &Value, path: &str, rows: usize, cols: usize) -> Result<Vec<Vec<GaussRat>>> {
    let items = v.as_array().ok_or_else(|| parse_err(path, "expected an array of rows"))?;
    if items.len() != rows {
        return Err(parse_err(path, format!("expected {rows} rows, got {}", items.len())));
    }
    items.iter().enumerate().map(|(i, r)| vector_at(r, &format!("{path}[{i}]"), cols)).collect()
}

fn natural_at(v: &Value, path: &str) -> Result<u64> {
    v.as_u64().ok_or_else(|| parse_err(path, "expected a non-negative integer"))
}

/// Parses JSON text, keeping line and column on syntax errors.
pub fn from_text(text: &str) -> Result<Value> {
    serde_json::from_str(text)
        .map_err(|e| parse_err(&format!("line {}, column {}", e.line(), e.column()), e.to_string()))
}

const FIELDS: [&str; 9] = ["schema", "g", "lattice", "hermitian", "chi", "poisson", "l_series", "hbar_order", "seed"];

impl InputDescription {
    pub fn parse(text: &str) -> Result<Self> {
        Self::from_value(&from_text(text)?)
    }

    pub fn from_value(v: &Value) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| parse_err("$", "expected an object"))?;
        if let Some(k) = obj.keys().find(|k| !FIELDS.contains(&k.as_str())) {
            return Err(parse_err(&format!("$.{k}"), "unknown field"));
        }
        if let Some(s) = obj.get("schema") {
            if natural_at(s, "$.schema")? != SCHEMA_VERSION {
                return Err(parse_err("$.schema", format!("unsupported schema, expected {SCHEMA_VERSION}")));
            }
        }
        let field = |name: &str| obj.get(name).ok_or_else(|| parse_err(&format!("$.{name}"), "missing field"));
        let g = natural_at(field("g")?, "$.g")? as usize;
        if g == 0 || g > 8 {
            return Err(parse_err("$.g", "g must be between 1 and 8"));
        }
        let lattice = obj.get("lattice").map(|v| matrix_at(v, "$.lattice", 2 * g, g)).transpose()?;
        let hermitian = matrix_at(field("hermitian")?, "$.hermitian", g, g)?;
        let chi_items = field("chi")?.as_array().ok_or_else(|| parse_err("$.chi", "expected an array"))?;
        if chi_items.len() != 2 * g {
            return Err(parse_err("$.chi", format!("expected {} phases, got {}", 2 * g, chi_items.len())));
        }
        let chi = chi_items.iter().enumerate().map(|(i, x)| rational_at(x, &format!("$.chi[{i}]"))).collect::<Result<_>>()?;
        let poisson = obj.get("poisson").map(|v| matrix_at(v, "$.poisson", g, g)).transpose()?;
        let mut l_series = BTreeMap::new();
        if let Some(series) = obj.get("l_series") {
            let map = series.as_object().ok_or_else(|| parse_err("$.l_series", "expected an object"))?;
            for (key, value) in map {
                let path = format!("$.l_series.{key}");
                let m: usize = key
                    .parse()
                    .ok()
                    .filter(|&m: &usize| m >= 1 && key.bytes().all(|b| b.is_ascii_digit()))
                    .ok_or_else(|| parse_err(&path, "keys must be positive decimal integers"))?;
                if m > 64 {
                    return Err(parse_err(&path, "series index above 64"));
                }
                l_series.insert(m, vector_at(value, &path, g)?);
            }
        }
        let hbar_order = obj
            .get("hbar_order")
            .map(|v| natural_at(v, "$.hbar_order"))
            .transpose()?
            .map(|n| n as usize);
        if hbar_order.is_some_and(|n| n == 0 || n > 64) {
            return Err(parse_err("$.hbar_order", "must be between 1 and 64"));
        }
        let seed = obj.get("seed").map(|v| natural_at(v, "$.seed")).transpose()?;
        Ok(InputDescription { g, lattice, hermitian, chi, poisson, l_series, hbar_order, seed })
    }

    pub fn to_value(&self) -> Value {
        let mat = |m: &Vec<Vec<GaussRat>>| -> Value {
            Value::Array(m.iter().map(|r| Value::Array(r.iter().map(scalar_to_json).collect())).collect())
        };
        let mut obj = Map::new();
        obj.insert("schema".into(), json!(SCHEMA_VERSION));
        obj.insert("g".into(), json!(self.g));
        if let Some(l) = &self.lattice {
            obj.insert("lattice".into(), mat(l));
        }
        obj.insert("hermitian".into(), mat(&self.hermitian));
        obj.insert("chi".into(), Value::Array(self.chi.iter().map(|r| scalar_to_json(&GaussRat::real(r.clone()))).collect()));
        if let Some(p) = &self.poisson {
            obj.insert("poisson".into(), mat(p));
        }
        let series: Map<String, Value> = self
            .l_series
            .iter()
            .map(|(m, l)| (m.to_string(), Value::Array(l.iter().map(scalar_to_json).collect())))
            .collect();
        obj.insert("l_series".into(), Value::Object(series));
        if let Some(n) = self.hbar_order {
            obj.insert("hbar_order".into(), json!(n));
        }
        if let Some(s) = self.seed {
            obj.insert("seed".into(), json!(s));
        }
        Value::Object(obj)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_value()).expect("serializable")
    }

    /// Builds the data, or lists every violated invariant.
    pub fn build(&self) -> std::result::Result<QuantumAHData, Vec<Violation>> {
        let g = self.g;
        let lattice = match &self.lattice {
            None => PeriodLattice::standard(g),
            Some(gens) => PeriodLattice::new(g, gens.clone()).map_err(|e| vec![Violation::new("lattice", e.to_string())])?,
        };
        let h = HermitianNS::new(Matrix::from_rows(self.hermitian.clone()).map_err(|e| vec![Violation::new(SHAPE, e.to_string())])?);
        let poisson = match &self.poisson {
            None => PoissonBivector::zero(g),
            Some(p) => {
                let m = Matrix::from_rows(p.clone()).map_err(|e| vec![Violation::new(SHAPE, e.to_string())])?;
                PoissonBivector::new(m).map_err(|e| vec![Violation::new("Poisson antisymmetry", e.to_string())])?
            }
        };
        let data = QuantumAHData {
            lattice,
            ah: ClassicalAHData { h, chi: Semicharacter::new(self.chi.clone()) },
            l_series: self.l_series.clone(),
            poisson,
        };
        let violations = data.violations();
        if violations.is_empty() {
            Ok(data)
        } else {
            Err(violations)
        }
    }
}
