//! The oracle table: literal expected values for every reproducible
//! computation, kept as data in `oracles.tsv`, and the evaluator that checks
//! them.

use std::time::Instant;

use crate::cubic27::{
    bitangent_algebra, build_action, euclidean_model, nontriviality_certificate,
    orbit_decomposition, verify_general_position, PointConfig,
};
use crate::etale::{
    galois_sw_total, galois_sw_total_capped, parse_algebra, trace_diagonal_strings,
};
use crate::groups::{brauer_stack, hyperelliptic_divisibility, BrauerParams, Stack};
use crate::intersect::{class_bin, class_z, r_value};
use crate::ksymbols::{distinguishing_witness, FieldModel, KElement, Preset};
use crate::properties::{run_suite, DEFAULT_CASES, DEFAULT_SEED};

const TABLE: &str = include_str!("oracles.tsv");

pub const CRITERIA: [(u32, &str); 9] = [
    (1, "class of the singular locus"),
    (2, "class of the binodal locus"),
    (3, "torsion bookkeeping"),
    (4, "Stiefel-Whitney examples"),
    (5, "27 lines"),
    (6, "general position"),
    (7, "three-variable bitangent classes"),
    (8, "group evaluators"),
    (9, "property suites"),
];

#[derive(Debug, Clone, PartialEq)]
pub struct OracleRow {
    pub criterion: u32,
    pub check: String,
    pub limit_ms: f64,
    pub expected: String,
}

pub fn oracle_table() -> Vec<OracleRow> {
    TABLE
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|l| {
            let cols: Vec<&str> = l.split('\t').collect();
            assert_eq!(cols.len(), 4, "malformed oracle row `{l}`");
            OracleRow {
                criterion: cols[0].parse().expect("criterion number"),
                check: cols[1].to_string(),
                limit_ms: cols[2].parse().expect("time limit"),
                expected: cols[3].to_string(),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub row: OracleRow,
    pub computed: String,
    pub elapsed_ms: f64,
    pub matches: bool,
    pub within_limit: bool,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.matches && self.within_limit
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionReport {
    pub criterion: u32,
    pub title: String,
    pub outcomes: Vec<CheckOutcome>,
}

impl CriterionReport {
    pub fn passed(&self) -> bool {
        !self.outcomes.is_empty() && self.outcomes.iter().all(CheckOutcome::passed)
    }

    pub fn elapsed_ms(&self) -> f64 {
        self.outcomes.iter().map(|o| o.elapsed_ms).sum()
    }

    pub fn summary(&self) -> String {
        let ok = self.outcomes.iter().filter(|o| o.passed()).count();
        format!(
            "criterion {} ({}): {} [{ok}/{} checks, {:.1} ms]",
            self.criterion,
            self.title,
            if self.passed() { "PASS" } else { "FAIL" },
            self.outcomes.len(),
            self.elapsed_ms()
        )
    }
}

pub fn run_row(row: &OracleRow) -> CheckOutcome {
    let start = Instant::now();
    let computed = evaluate(&row.check).unwrap_or_else(|e| format!("error: {e}"));
    let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    CheckOutcome {
        matches: computed == row.expected,
        within_limit: elapsed_ms < row.limit_ms,
        row: row.clone(),
        computed,
        elapsed_ms,
    }
}

pub fn run_criterion(criterion: u32) -> CriterionReport {
    let title = CRITERIA
        .iter()
        .find(|(n, _)| *n == criterion)
        .map_or("unknown", |(_, t)| *t)
        .to_string();
    let outcomes = oracle_table()
        .iter()
        .filter(|r| r.criterion == criterion)
        .map(run_row)
        .collect();
    CriterionReport {
        criterion,
        title,
        outcomes,
    }
}

pub fn run_all() -> Vec<CriterionReport> {
    CRITERIA.iter().map(|(n, _)| run_criterion(*n)).collect()
}

fn parse_u32(s: &str) -> Result<u32, String> {
    s.parse()
        .map_err(|_| format!("expected an integer, got `{s}`"))
}

fn lines_alpha2(expression: bool) -> Result<String, String> {
    let cfg = PointConfig::default_two();
    let model = euclidean_model(&cfg).map_err(|e| e.to_string())?;
    let alg = if expression {
        parse_algebra(
            "F^3 * F(sqrt(a))^2 * F(sqrt(b))^2 * F(sqrt(a*b))^2 * F(sqrt(a),sqrt(b))^3 * F",
            &model,
        )
        .map_err(|e| e.to_string())?
    } else {
        bitangent_algebra(&cfg, &model).map_err(|e| e.to_string())?
    };
    let alpha = galois_sw_total_capped(&alg, 2).map_err(|e| e.to_string())?;
    Ok(alpha.classes[2].to_string())
}

fn three_generator_classes() -> Result<Vec<KElement>, String> {
    let cfg = PointConfig::default_three();
    let model = euclidean_model(&cfg).map_err(|e| e.to_string())?;
    let alg = bitangent_algebra(&cfg, &model).map_err(|e| e.to_string())?;
    Ok(galois_sw_total_capped(&alg, 7)
        .map_err(|e| e.to_string())?
        .classes)
}

/// Evaluates one check id from the table and renders the result.
pub fn evaluate(check: &str) -> Result<String, String> {
    let (kind, arg) = check.split_once(' ').unwrap_or((check, ""));
    let e = |x: &dyn std::fmt::Display| x.to_string();
    match kind {
        "classz" => Ok(class_z(parse_u32(arg)?)
            .map_err(|x| e(&x))?
            .class
            .to_string()),
        "classd" => Ok(class_bin(parse_u32(arg)?)
            .map_err(|x| e(&x))?
            .class
            .to_string()),
        "content-z" => Ok(class_z(parse_u32(arg)?)
            .map_err(|x| e(&x))?
            .content
            .to_string()),
        "content-bin" => Ok(class_bin(parse_u32(arg)?)
            .map_err(|x| e(&x))?
            .content
            .to_string()),
        "r-parity" => {
            let r = r_value(parse_u32(arg)?).map_err(|x| e(&x))?;
            Ok(if r % 2 == 0 { "even" } else { "odd" }.to_string())
        }
        "alpha-tot" | "alpha" | "trace-diagonal" => {
            let (degree, rest) = if kind == "alpha" {
                let (d, rest) = arg.split_once(' ').ok_or("missing degree")?;
                (Some(parse_u32(d)? as usize), rest)
            } else {
                (None, arg)
            };
            let (preset, text) = rest.split_once(' ').ok_or("missing model")?;
            let preset: Preset = preset.parse().map_err(|x| e(&x))?;
            let model = FieldModel::preset(preset, &["a", "b", "c"]).map_err(|x| e(&x))?;
            let alg = parse_algebra(text, &model).map_err(|x| e(&x))?;
            if kind == "trace-diagonal" {
                let [(ext, 1)] = alg.factors() else {
                    return Err("expected a single field".into());
                };
                return Ok(trace_diagonal_strings(ext, &model)
                    .map_err(|x| e(&x))?
                    .join(", "));
            }
            let alpha = galois_sw_total(&alg).map_err(|x| e(&x))?;
            Ok(match degree {
                None => alpha.total().to_string(),
                Some(i) => alpha.get(i).map_or("0".to_string(), |x| x.to_string()),
            })
        }
        "lines-factors" => {
            let cfg = PointConfig::default_two();
            let model = euclidean_model(&cfg).map_err(|x| e(&x))?;
            let ls = build_action(&cfg).map_err(|x| e(&x))?;
            Ok(orbit_decomposition(&ls, &model)
                .map_err(|x| e(&x))?
                .algebra
                .canonical_string())
        }
        "lines-rank" => {
            let cfg = PointConfig::default_two();
            let model = euclidean_model(&cfg).map_err(|x| e(&x))?;
            Ok(bitangent_algebra(&cfg, &model)
                .map_err(|x| e(&x))?
                .rank()
                .to_string())
        }
        "lines-alpha2-orbits" => lines_alpha2(false),
        "lines-alpha2-expression" => lines_alpha2(true),
        "lines-certificate" => {
            let cfg = PointConfig::default_two();
            let model = euclidean_model(&cfg).map_err(|x| e(&x))?;
            let alg = bitangent_algebra(&cfg, &model).map_err(|x| e(&x))?;
            let cert = nontriviality_certificate(&alg, "a", "b").map_err(|x| e(&x))?;
            Ok(cert
                .steps
                .last()
                .map(|(_, x)| x.to_string())
                .unwrap_or_default())
        }
        "general-position" => {
            let report = verify_general_position(&PointConfig::default_two()).map_err(|x| e(&x))?;
            let nonzero = report.entries.iter().filter(|x| x.nonzero).count();
            Ok(format!("{nonzero} of {} nonzero", report.entries.len()))
        }
        "three-gen-degree" => {
            let i = parse_u32(arg)? as usize;
            Ok(three_generator_classes()?
                .get(i)
                .ok_or("degree out of range")?
                .to_string())
        }
        "three-gen-distinguished" => {
            let classes = three_generator_classes()?;
            let picked: Vec<&KElement> = [0, 2, 4, 6].iter().map(|&i| &classes[i]).collect();
            let mut pairs = 0;
            let mut distinguished = 0;
            for i in 0..picked.len() {
                for j in i + 1..picked.len() {
                    pairs += 1;
                    if distinguishing_witness(picked[i], picked[j])
                        .map_err(|x| e(&x))?
                        .is_some()
                    {
                        distinguished += 1;
                    }
                }
            }
            Ok(format!("{distinguished} of {pairs} pairs"))
        }
        "brauer" => {
            let parts: Vec<&str> = arg.split(' ').collect();
            let [stack, d, p] = parts[..] else {
                return Err("expected `brauer <stack> <d|-> <char>`".into());
            };
            let stack: Stack = stack.parse()?;
            let params = BrauerParams {
                d: if d == "-" { None } else { Some(parse_u32(d)?) },
                characteristic: p.parse().map_err(|_| format!("bad characteristic `{p}`"))?,
                closed: stack == Stack::Xd,
            };
            Ok(brauer_stack(stack, params).map_err(|x| e(&x))?.to_string())
        }
        "hyperelliptic" => {
            let h = hyperelliptic_divisibility();
            let factors: Vec<String> = h.factors.iter().map(u64::to_string).collect();
            Ok(format!("{} = {}", h.value, factors.join("*")))
        }
        "property" => {
            let outcome = run_suite(arg, DEFAULT_SEED, DEFAULT_CASES).ok_or("unknown suite")?;
            let mut s = format!("{} failures in {} cases", outcome.failures, outcome.cases);
            if let Some(f) = outcome.first_failure {
                s.push_str(&format!("; first {f}"));
            }
            Ok(s)
        }
        _ => Err(format!("unknown check `{check}`")),
    }
}
