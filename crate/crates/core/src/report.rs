//! Machine-readable reports emitted by the command-line tool.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactalg::CohomologyModule;
use crate::input::SCHEMA_VERSION;
use crate::mainthm::{CaseTag, CohomologyReport, Invariants};
use crate::spectral::PageDims;
use crate::torus::Violation;

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportDocument {
    pub schema: u64,
    pub version: String,
    pub seed: u64,
    pub command: String,
    pub validation: ValidationSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub case: Option<CaseTag>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub invariants: Option<Invariants>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub modules: Vec<ModuleRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agreement: Option<AgreementSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cocycles: Option<CocycleSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectral: Option<SpectralSection>,
}

#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidationSection {
    pub valid: bool,
    pub violations: Vec<Violation>,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleRow {
    pub degree: usize,
    pub free_rank: usize,
    pub torsion: Vec<(u32, usize)>,
    /// Decimal `dim_ℂ`, or `"∞"` with a free part.
    pub dim: String,
    pub structure: String,
}

impl ModuleRow {
    pub fn new(degree: usize, m: &CohomologyModule) -> Self {
        ModuleRow {
            degree,
            free_rank: m.free_rank(),
            torsion: m.torsion().collect(),
            dim: m.dim_c().map_or_else(|| "∞".to_string(), |d| d.to_string()),
            structure: m.structure(),
        }
    }

    pub fn module(&self) -> CohomologyModule {
        CohomologyModule::new(self.free_rank, self.torsion.iter().copied())
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgreementRow {
    pub degree: usize,
    pub formula: String,
    pub smith: String,
    pub spectral: String,
    pub e_infinity_total: usize,
    pub agree: bool,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgreementSection {
    pub hbar_order: usize,
    pub degeneration_page: usize,
    pub rows: Vec<AgreementRow>,
    pub agree: bool,
    pub discrepancies: Vec<String>,
}

impl From<&CohomologyReport> for AgreementSection {
    fn from(r: &CohomologyReport) -> Self {
        AgreementSection {
            hbar_order: r.hbar_order,
            degeneration_page: r.degeneration_page,
            rows: r
                .degrees
                .iter()
                .map(|d| AgreementRow {
                    degree: d.degree,
                    formula: d.formula.structure(),
                    smith: d.smith.structure(),
                    spectral: d.spectral.structure(),
                    e_infinity_total: d.e_infinity_total,
                    agree: d.agree,
                })
                .collect(),
            agree: r.agreement,
            discrepancies: r.discrepancies.clone(),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CocycleEntry {
    pub hbar_power: usize,
    pub indices: Vec<usize>,
    pub b_index: usize,
    pub expression: String,
    /// `None` in emit-only mode.
    pub residual_zero: Option<bool>,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CocycleSection {
    pub degree: usize,
    pub verified_scope: bool,
    pub samples: usize,
    pub warning: Option<String>,
    pub entries: Vec<CocycleEntry>,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralSection {
    pub hbar_order: usize,
    pub degeneration_page: usize,
    pub pages: Vec<PageDims>,
    /// Total degree ↦ `dim E_∞^{p, n−p}` for each level `p`.
    pub e_infinity: BTreeMap<i64, Vec<usize>>,
}

impl ReportDocument {
    pub fn new(command: &str, seed: u64) -> Self {
        ReportDocument {
            schema: SCHEMA_VERSION,
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            command: command.to_string(),
            validation: ValidationSection { valid: true, violations: Vec::new() },
            case: None,
            invariants: None,
            modules: Vec::new(),
            agreement: None,
            cocycles: None,
            spectral: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn parse(text: &str) -> Result<Self> {
        let doc: ReportDocument = serde_json::from_str(text).map_err(|e| Error::Parse {
            location: format!("line {}, column {}", e.line(), e.column()),
            message: e.to_string(),
        })?;
        if doc.schema != SCHEMA_VERSION {
            return Err(Error::Parse { location: "$.schema".into(), message: format!("unsupported schema {}", doc.schema) });
        }
        Ok(doc)
    }
}
