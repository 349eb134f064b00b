use std::fmt::Write as _;
use std::path::Path;

use abelia::groupcoh::{build_basis_cocycles, verify_listing};
use abelia::input::InputDescription;
use abelia::mainthm::{check_order, cross_check_with, default_order, Analysis, CaseTag, CrossCheckOptions, QuantumAHData};
use abelia::report::{AgreementSection, CocycleEntry, CocycleSection, ModuleRow, ReportDocument, SpectralSection, ValidationSection};
use abelia::spectral::e_infinity;
use abelia::Error;

pub const EXIT_OK: u8 = 0;
pub const EXIT_INTERNAL: u8 = 1;
pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_PARSE: u8 = 3;
pub const EXIT_DISAGREEMENT: u8 = 4;

const DEFAULT_SEED: u64 = 0;

pub struct Outcome {
    pub report: ReportDocument,
    pub text: String,
    pub code: u8,
}

pub enum Failure {
    Report { report: ReportDocument, text: String, code: u8 },
    Message { message: String, code: u8 },
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. } => EXIT_PARSE,
            Error::TruncationTooSmall { .. } | Error::InfiniteT0 | Error::Scope(_) | Error::Incompatible | Error::Invalid(_) => {
                EXIT_VALIDATION
            }
            _ => EXIT_INTERNAL,
        };
        Failure::Message { message: e.to_string(), code }
    }
}

type Run = Result<Outcome, Failure>;

struct Loaded {
    input: InputDescription,
    data: QuantumAHData,
    seed: u64,
    report: ReportDocument,
}

fn seed_for(input: &InputDescription) -> Result<u64, Failure> {
    match std::env::var("ABELIA_SEED") {
        Ok(s) => s.trim().parse().map_err(|_| Failure::Message {
            message: format!("ABELIA_SEED must be a non-negative integer, got {s:?}"),
            code: EXIT_PARSE,
        }),
        Err(_) => Ok(input.seed.unwrap_or(DEFAULT_SEED)),
    }
}

fn load(path: &Path, command: &str) -> Result<Loaded, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Message { message: format!("cannot read {}: {e}", path.display()), code: EXIT_INTERNAL })?;
    let input = InputDescription::parse(&text)?;
    let seed = seed_for(&input)?;
    let mut report = ReportDocument::new(command, seed);
    match input.build() {
        Ok(data) => Ok(Loaded { input, data, seed, report }),
        Err(violations) => {
            let mut text = String::from("invalid input:\n");
            for v in &violations {
                let _ = writeln!(text, "  {}: {}", v.name, v.detail);
            }
            report.validation = ValidationSection { valid: false, violations };
            Err(Failure::Report { report, text, code: EXIT_VALIDATION })
        }
    }
}

fn header(a: &Analysis, out: &mut String) {
    let i = a.invariants();
    let _ = writeln!(out, "case: {}", a.case());
    let _ = writeln!(out, "t = {}, t⁰ = {}, g₀ = {}, k = {}, h̄ = {}", i.t, i.t0, i.g0, i.k, i.hbar_bar);
}

fn module_table(rows: &[ModuleRow], out: &mut String) {
    let _ = writeln!(out, "{:>3}  {:>4}  structure", "j", "dim");
    for r in rows {
        let _ = writeln!(out, "{:>3}  {:>4}  {}", r.degree, r.dim, r.structure);
    }
}

fn module_rows(a: &Analysis, g: usize, only: Option<usize>) -> Result<Vec<ModuleRow>, Failure> {
    (0..=g).filter(|j| only.map_or(true, |d| d == *j)).map(|j| Ok(ModuleRow::new(j, &a.formula(j)?))).collect()
}

fn order_for(a: &Analysis, input: &InputDescription, flag: Option<usize>) -> Result<usize, Failure> {
    let n = flag.or(input.hbar_order).unwrap_or_else(|| default_order(a.t0));
    check_order(a.t0, n)?;
    Ok(n)
}

pub fn validate(path: &Path) -> Run {
    let Loaded { report, .. } = load(path, "validate")?;
    Ok(Outcome { report, text: "valid\n".into(), code: EXIT_OK })
}

pub fn cohomology(path: &Path, degree: Option<usize>, hbar_order: Option<usize>) -> Run {
    let Loaded { input, data, mut report, .. } = load(path, "cohomology")?;
    let a = Analysis::new(&data)?;
    if hbar_order.is_some() {
        order_for(&a, &input, hbar_order)?;
    }
    if let Some(j) = degree.filter(|&j| j > data.g()) {
        return Err(Failure::Message { message: format!("degree {j} exceeds g = {}", data.g()), code: EXIT_VALIDATION });
    }
    report.case = Some(a.case());
    report.invariants = Some(a.invariants());
    report.modules = module_rows(&a, data.g(), degree)?;
    let mut text = String::new();
    header(&a, &mut text);
    module_table(&report.modules, &mut text);
    Ok(Outcome { report, text, code: EXIT_OK })
}

pub fn oracle(path: &Path, hbar_order: Option<usize>, corrupt_formula: bool) -> Run {
    let Loaded { input, data, mut report, .. } = load(path, "oracle")?;
    let a = Analysis::new(&data)?;
    let order = order_for(&a, &input, hbar_order)?;
    let r = cross_check_with(&data, &CrossCheckOptions { order: Some(order), complement: None, corrupt_formula })?;
    report.case = Some(r.case);
    report.invariants = Some(r.invariants.clone());
    report.modules = r.degrees.iter().map(|d| ModuleRow::new(d.degree, &d.formula)).collect();
    let section = AgreementSection::from(&r);
    let mut text = String::new();
    header(&a, &mut text);
    let _ = writeln!(text, "ħ-order N = {}, degeneration page {}", section.hbar_order, section.degeneration_page);
    let _ = writeln!(text, "{:>3}  {:<24}  {:<24}  {:<24}  agree", "j", "formula", "Smith", "spectral");
    for row in &section.rows {
        let mark = if row.agree { "yes" } else { "NO" };
        let _ = writeln!(text, "{:>3}  {:<24}  {:<24}  {:<24}  {mark}", row.degree, row.formula, row.smith, row.spectral);
    }
    for d in &section.discrepancies {
        let _ = writeln!(text, "discrepancy: {d}");
    }
    let code = if section.agree { EXIT_OK } else { EXIT_DISAGREEMENT };
    report.agreement = Some(section);
    Ok(Outcome { report, text, code })
}

pub fn cocycles(path: &Path, degree: usize, samples: usize, hbar_order: Option<usize>) -> Run {
    let Loaded { input, data, seed, mut report } = load(path, "cocycles")?;
    let a = Analysis::new(&data)?;
    let order = order_for(&a, &input, hbar_order)?;
    report.case = Some(a.case());
    report.invariants = Some(a.invariants());
    let mut section = CocycleSection { degree, verified_scope: false, samples, warning: None, entries: Vec::new() };
    match (a.case(), a.t0.finite(), a.leading()) {
        (CaseTag::Torsion, Some(t0), Some(lead)) => {
            let s = &a.summary;
            let listing = build_basis_cocycles(&data, degree, t0, (s.g0, s.k, s.hbar_bar), lead, order)?;
            let residuals = verify_listing(&data, &listing, order, samples, seed)?;
            section.verified_scope = listing.verified_scope;
            if !listing.verified_scope {
                section.warning = Some("H ≠ 0 or χ ≠ 1: emit-only listing, the classical factors b^r are opaque".into());
            }
            section.entries = listing
                .cocycles
                .into_iter()
                .zip(residuals)
                .map(|(c, r)| CocycleEntry {
                    hbar_power: c.hbar_power,
                    indices: c.indices,
                    b_index: c.b_index,
                    expression: c.expression,
                    residual_zero: r,
                })
                .collect();
        }
        (case, _, _) => section.warning = Some(format!("no torsion cocycles in the {case} case")),
    }
    let mut text = String::new();
    header(&a, &mut text);
    if let Some(w) = &section.warning {
        let _ = writeln!(text, "warning: {w}");
    }
    let _ = writeln!(text, "{} cocycle(s) in degree {degree}", section.entries.len());
    let mut failed = false;
    for e in &section.entries {
        let status = match e.residual_zero {
            Some(true) => format!("residual 0 on {samples} samples"),
            Some(false) => {
                failed = true;
                "RESIDUAL NONZERO".to_string()
            }
            None => "unverified".to_string(),
        };
        let _ = writeln!(text, "  {}    [{status}]", e.expression);
    }
    report.cocycles = Some(section);
    Ok(Outcome { report, text, code: if failed { EXIT_DISAGREEMENT } else { EXIT_OK } })
}

pub fn spectral(path: &Path, dump_pages: Option<usize>, hbar_order: Option<usize>) -> Run {
    let Loaded { input, data, mut report, .. } = load(path, "spectral")?;
    let a = Analysis::new(&data)?;
    let order = order_for(&a, &input, hbar_order)?;
    let conv = e_infinity(&a.model()?.filtered(order)?)?;
    report.case = Some(a.case());
    report.invariants = Some(a.invariants());
    let limit = dump_pages.unwrap_or(usize::MAX);
    let pages: Vec<_> = conv.pages.iter().filter(|p| p.r <= limit).map(|p| p.dims()).collect();
    let mut text = String::new();
    header(&a, &mut text);
    for page in &pages {
        let _ = writeln!(text, "E_{}:", page.r);
        if page.spots.is_empty() {
            let _ = writeln!(text, "  (zero)");
        }
        for s in &page.spots {
            let flag = if s.truncation_affected { "  (truncation)" } else { "" };
            let _ = writeln!(text, "  (p={}, q={}) dim {}{flag}", s.p, s.q, s.dim);
        }
    }
    let _ = writeln!(text, "degeneration page: {}", conv.degeneration_page);
    report.spectral = Some(SpectralSection {
        hbar_order: order,
        degeneration_page: conv.degeneration_page,
        pages,
        e_infinity: conv.graded.clone(),
    });
    Ok(Outcome { report, text, code: EXIT_OK })
}
