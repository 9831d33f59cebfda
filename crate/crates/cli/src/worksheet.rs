//! Each subcommand as a function returning its text rendering and a
//! [`WorksheetResult`] record for `--json`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use ccalc_core::checks;
use ccalc_core::cubic27::{
    bitangent_algebra, build_action, euclidean_model, general_position_report,
    nontriviality_certificate, orbit_decomposition, PointConfig,
};
use ccalc_core::etale::{galois_sw_total_capped, parse_algebra, DEFAULT_MAX_DEGREE};
use ccalc_core::groups::{brauer_stack, BrauerParams, Stack};
use ccalc_core::intersect::{
    class_bin, class_z, closed_form_bin, closed_form_z, r_value, LocusClassReport,
};
use ccalc_core::ksymbols::{FieldModel, Preset, MINUS_ONE, TWO};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleComparison {
    pub expected: String,
    pub computed: String,
    pub matches: bool,
}

impl OracleComparison {
    fn new(expected: String, computed: String) -> Self {
        let matches = expected == computed;
        OracleComparison {
            expected,
            computed,
            matches,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorksheetResult {
    pub command: String,
    pub model: Option<String>,
    pub result: Value,
    pub oracle: Option<OracleComparison>,
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassJson {
    pub d: u32,
    pub class: String,
    pub coefficients: BTreeMap<String, String>,
    pub content: String,
    pub expected_divisor: String,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaJson {
    pub degree: usize,
    pub element: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwJson {
    pub rank: usize,
    pub alpha: Vec<AlphaJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitJson {
    pub labels: Vec<String>,
    pub stabilizer: Vec<String>,
    pub fixed_field: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeterminantJson {
    pub label: String,
    pub value: String,
    pub nonzero: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinesJson {
    pub orbits: Vec<OrbitJson>,
    pub algebra: String,
    pub alpha2: String,
    pub certificate: Vec<String>,
    pub general_position: Option<Vec<DeterminantJson>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BrauerParamsJson {
    pub d: Option<u32>,
    pub characteristic: u64,
    pub closed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BrauerJson {
    pub stack: String,
    pub params: BrauerParamsJson,
    pub summands: Vec<String>,
    pub placeholder: bool,
    pub rendering: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidueJson {
    pub input: String,
    pub at: String,
    pub residue: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckJson {
    pub check: String,
    pub expected: String,
    pub computed: String,
    pub matches: bool,
    pub within_limit: bool,
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionJson {
    pub criterion: u32,
    pub title: String,
    pub passed: bool,
    pub checks: Vec<CheckJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckAllJson {
    pub criteria: Vec<CriterionJson>,
    pub passed: bool,
}

#[derive(Debug)]
pub struct WorksheetError(pub String);

impl<E: std::fmt::Display> From<E> for WorksheetError {
    fn from(e: E) -> Self {
        WorksheetError(e.to_string())
    }
}

pub struct Outcome {
    pub text: String,
    pub record: WorksheetResult,
}

type Result<T> = std::result::Result<T, WorksheetError>;

pub fn error_json(kind: &str, message: &str) -> String {
    json!({ "error": { "kind": kind, "message": message.trim_end() } }).to_string()
}

fn finish(
    command: String,
    model: Option<String>,
    result: impl Serialize,
    oracle: Option<OracleComparison>,
    text: String,
    start: Instant,
) -> Result<Outcome> {
    Ok(Outcome {
        text,
        record: WorksheetResult {
            command,
            model,
            result: serde_json::to_value(result)?,
            oracle,
            elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        },
    })
}

fn class_json(r: &LocusClassReport) -> ClassJson {
    ClassJson {
        d: r.d,
        class: r.class.to_string(),
        coefficients: r
            .coefficients
            .iter()
            .map(|(k, v)| (k.clone(), v.to_string()))
            .collect(),
        content: r.content.to_string(),
        expected_divisor: r.expected_divisor.to_string(),
        ok: r.divisibility_ok,
    }
}

fn class_text(r: &LocusClassReport, oracle: &OracleComparison) -> Result<String> {
    let primitive = r.class.div_exact_scalar(&r.content)?;
    let verdict = if oracle.matches {
        "[matches closed form]".to_string()
    } else {
        format!("[MISMATCH: closed form is {}]", oracle.expected)
    };
    if r.content == 1.into() {
        return Ok(format!("{} (content 1)  {verdict}\n", r.class));
    }
    Ok(format!(
        "{} = {}*({primitive})  {verdict}\n",
        r.class, r.content
    ))
}

pub fn classz(d: u32) -> Result<Outcome> {
    let start = Instant::now();
    let r = class_z(d)?;
    let oracle = OracleComparison::new(closed_form_z(d).to_string(), r.class.to_string());
    let text = class_text(&r, &oracle)?;
    finish(
        format!("classz -d {d}"),
        None,
        class_json(&r),
        Some(oracle),
        text,
        start,
    )
}

pub fn classd(d: u32) -> Result<Outcome> {
    let start = Instant::now();
    let r = class_bin(d)?;
    let oracle = OracleComparison::new(closed_form_bin(d).to_string(), r.class.to_string());
    let text = class_text(&r, &oracle)?;
    finish(
        format!("classd -d {d}"),
        None,
        class_json(&r),
        Some(oracle),
        text,
        start,
    )
}

pub fn rvalue(d: u32) -> Result<Outcome> {
    let start = Instant::now();
    let r = r_value(d)?;
    let content = class_bin(d)?.content;
    let oracle = OracleComparison::new(r.to_string(), content.to_string());
    let text = format!(
        "r = gcd(d(d-1)^2, 3(d-2)) = {r} for d = {d}; content of the binodal class is {content}\n"
    );
    finish(
        format!("rvalue -d {d}"),
        None,
        json!({ "d": d, "r": r }),
        Some(oracle),
        text,
        start,
    )
}

/// Identifiers in `text` other than the given keywords and the constant
/// class names, sorted and deduplicated.
fn indeterminates(text: &str, keywords: &[&str]) -> Vec<String> {
    let mut names: Vec<String> = text
        .split(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
        .filter(|w| w.starts_with(|c: char| c.is_ascii_alphabetic()))
        .filter(|w| !keywords.contains(w) && *w != MINUS_ONE && *w != TWO)
        .map(str::to_string)
        .collect();
    names.sort();
    names.dedup();
    names
}

fn model_for(preset: Preset, text: &str, keywords: &[&str]) -> Result<FieldModel> {
    let names = indeterminates(text, keywords);
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    Ok(FieldModel::preset(preset, &refs)?)
}

pub fn sw(algebra: &str, preset: Preset, max_degree: Option<usize>) -> Result<Outcome> {
    let start = Instant::now();
    let model = model_for(preset, algebra, &["F", "sqrt"])?;
    let alg = parse_algebra(algebra, &model)?;
    let alpha = galois_sw_total_capped(&alg, max_degree.unwrap_or(DEFAULT_MAX_DEGREE))?;
    let mut text = format!("rank = {}\n", alg.rank());
    let mut entries = Vec::new();
    for (i, x) in alpha.classes.iter().enumerate() {
        writeln!(text, "alpha{i} = {x}").expect("string write");
        entries.push(AlphaJson {
            degree: i,
            element: x.to_string(),
        });
    }
    let result = SwJson {
        rank: alg.rank(),
        alpha: entries,
    };
    finish(
        format!("sw --algebra \"{algebra}\""),
        Some(model.describe()),
        result,
        None,
        text,
        start,
    )
}

fn class_name(mask: u32, gens: &[String]) -> String {
    let parts: Vec<&str> = (0..gens.len())
        .filter(|j| mask >> j & 1 == 1)
        .map(|j| gens[j].as_str())
        .collect();
    parts.join("*")
}

/// The values the default configurations are known to produce.
fn lines_oracle(gens: &[String]) -> Option<&'static str> {
    let names: Vec<&str> = gens.iter().map(String::as_str).collect();
    match names[..] {
        ["a", "b"] => Some("{a,b} + {-1,a*b}"),
        ["a", "b", "c"] => Some("{a,b} + {a,c} + {b,c} + {-1,a*b*c}"),
        _ => None,
    }
}

pub fn lines(gens: &[String], verify_position: bool, certificate: bool) -> Result<Outcome> {
    let start = Instant::now();
    let refs: Vec<&str> = gens.iter().map(String::as_str).collect();
    let cfg = PointConfig::from_generators(&refs)?;
    let model = euclidean_model(&cfg)?;
    let ls = build_action(&cfg)?;
    let report = orbit_decomposition(&ls, &model)?;
    let full = bitangent_algebra(&cfg, &model)?;
    let alpha2 = galois_sw_total_capped(&full, 2)?.classes[2].clone();

    let mut text = format!(
        "orbits of the Galois group on the 27 lines ({}):\n",
        report.orbits.len()
    );
    let mut orbits = Vec::new();
    for o in &report.orbits {
        let stabilizer: Vec<String> = o.stabilizer.iter().map(|&g| cfg.element_name(g)).collect();
        let fixed_field: Vec<String> = o
            .fixed_field
            .iter()
            .map(|&m| class_name(m, &cfg.generators))
            .collect();
        let field = if fixed_field.is_empty() {
            "F".to_string()
        } else {
            let roots: Vec<String> = fixed_field.iter().map(|m| format!("sqrt({m})")).collect();
            format!("F({})", roots.join(","))
        };
        writeln!(
            text,
            "  {:<24} stabilizer {{{}}}  field {field}",
            o.labels.join(" "),
            stabilizer.join(", ")
        )
        .expect("string write");
        orbits.push(OrbitJson {
            labels: o.labels.clone(),
            stabilizer,
            fixed_field,
        });
    }
    let algebra = report.algebra.canonical_string();
    writeln!(text, "algebra of lines: {algebra}").expect("string write");
    writeln!(text, "with the extra bitangent: rank {}", full.rank()).expect("string write");
    writeln!(text, "alpha2 = {alpha2}").expect("string write");

    let mut steps = Vec::new();
    if certificate {
        let second = gens.get(1).map(String::as_str).unwrap_or("b");
        let cert = nontriviality_certificate(&full, &gens[0], second)?;
        steps = cert.rendered();
        text.push_str("certificate:\n");
        for s in &steps {
            writeln!(text, "  {s}").expect("string write");
        }
    }

    let mut position = None;
    if verify_position {
        let gp = general_position_report(&cfg)?;
        text.push_str("general position:\n");
        let mut rows = Vec::new();
        for e in &gp.entries {
            writeln!(
                text,
                "  {:<24} {}  {}",
                e.label,
                if e.nonzero { "nonzero" } else { "ZERO" },
                e.value
            )
            .expect("string write");
            rows.push(DeterminantJson {
                label: e.label.clone(),
                value: e.value.to_string(),
                nonzero: e.nonzero,
            });
        }
        if !gp.pass {
            return Err(WorksheetError(format!(
                "degenerate configuration: {:?} vanish",
                gp.failures()
            )));
        }
        position = Some(rows);
    }

    let oracle =
        lines_oracle(gens).map(|e| OracleComparison::new(e.to_string(), alpha2.to_string()));
    let result = LinesJson {
        orbits,
        algebra,
        alpha2: alpha2.to_string(),
        certificate: steps,
        general_position: position,
    };
    finish(
        format!("lines --gens {}", gens.join(",")),
        Some(model.describe()),
        result,
        oracle,
        text,
        start,
    )
}

pub fn brauer(stack: Stack, d: Option<u32>, characteristic: u64, closed: bool) -> Result<Outcome> {
    let start = Instant::now();
    let closed = closed || stack == Stack::Xd;
    let g = brauer_stack(
        stack,
        BrauerParams {
            d,
            characteristic,
            closed,
        },
    )?;
    let rendering = g.to_string();
    let text = if g.is_trivial() {
        format!("{rendering} (trivial group)\n")
    } else {
        format!("{rendering}\n")
    };
    let result = BrauerJson {
        stack: stack.name().to_string(),
        params: BrauerParamsJson {
            d,
            characteristic,
            closed,
        },
        summands: g.summand_strings(),
        placeholder: g.placeholder.is_some(),
        rendering,
    };
    let mut command = format!("brauer --stack {}", stack.name());
    if let Some(d) = d {
        write!(command, " -d {d}").expect("string write");
    }
    write!(command, " --char {characteristic}").expect("string write");
    finish(command, None, result, None, text, start)
}

pub fn residue(expr: &str, at: &str, preset: Preset) -> Result<Outcome> {
    let start = Instant::now();
    let model = model_for(preset, &format!("{expr} {at}"), &[])?;
    let x = model.parse_element(expr)?;
    let r = x.residue(at)?;
    let result = ResidueJson {
        input: x.to_string(),
        at: at.to_string(),
        residue: r.to_string(),
    };
    finish(
        format!("residue --expr \"{expr}\" --at {at}"),
        Some(model.describe()),
        result,
        None,
        format!("d_{at}({x}) = {r}\n"),
        start,
    )
}

pub fn check_all() -> Result<Outcome> {
    let start = Instant::now();
    let reports = checks::run_all();
    let mut text = String::new();
    let mut criteria = Vec::new();
    for r in &reports {
        writeln!(text, "{}", r.summary()).expect("string write");
        for o in r.outcomes.iter().filter(|o| !o.passed()) {
            writeln!(
                text,
                "  {}: expected `{}`, computed `{}` ({:.1} ms, limit {} ms)",
                o.row.check, o.row.expected, o.computed, o.elapsed_ms, o.row.limit_ms
            )
            .expect("string write");
        }
        criteria.push(CriterionJson {
            criterion: r.criterion,
            title: r.title.clone(),
            passed: r.passed(),
            checks: r
                .outcomes
                .iter()
                .map(|o| CheckJson {
                    check: o.row.check.clone(),
                    expected: o.row.expected.clone(),
                    computed: o.computed.clone(),
                    matches: o.matches,
                    within_limit: o.within_limit,
                    elapsed_ms: o.elapsed_ms,
                })
                .collect(),
        });
    }
    let passing = reports.iter().filter(|r| r.passed()).count();
    let summary = format!("{passing} of {} criteria pass", reports.len());
    writeln!(text, "{summary}").expect("string write");
    let oracle = OracleComparison::new(
        format!("{} of {} criteria pass", reports.len(), reports.len()),
        summary,
    );
    let result = CheckAllJson {
        passed: oracle.matches,
        criteria,
    };
    finish("check-all".into(), None, result, Some(oracle), text, start)
}
