//! Scenario configuration: a flat `key = value` format with `[scenario]`
//! section headers, chosen over a nested format to keep the parser
//! dependency-free and line-addressable in error messages. Unknown keys
//! are hard errors.

use crate::error::{Error, Result};
use crate::linalg::{C64, CMatrix};
use crate::measures::{parse_measure, BoundedMeasure};
use crate::operators::{DiagonalOperator, MatrixOperator, OperatorModel};
use crate::verify::TheoremId;
use std::path::Path;

/// Operator descriptor; the eigenvalue family itself is materialised at
/// run time so truncation studies can rebuild it at other sizes.
#[derive(Debug, Clone, PartialEq)]
pub enum OperatorSpec {
    Polynomial { alpha: f64, n: usize, adjoin_zero: bool },
    Exponential { n: usize },
    Lacunary { levels: usize },
    Eigenvalues(Vec<C64>),
    Matrix(Vec<Vec<f64>>),
}

impl OperatorSpec {
    pub fn build(&self) -> Result<OperatorModel> {
        match self {
            Self::Polynomial { alpha, n, adjoin_zero } => Ok(OperatorModel::Diagonal(
                DiagonalOperator::polynomial_profile(*alpha, *n, *adjoin_zero)?,
            )),
            Self::Exponential { n } => Ok(OperatorModel::Diagonal(
                DiagonalOperator::exponential_profile(*n)?,
            )),
            Self::Lacunary { levels } => Ok(OperatorModel::Diagonal(
                DiagonalOperator::lacunary_profile(*levels)?,
            )),
            Self::Eigenvalues(eigs) => Ok(OperatorModel::Diagonal(DiagonalOperator::new(
                eigs.clone(),
                "eigenvalues(...)",
            )?)),
            Self::Matrix(rows) => {
                let n = rows.len();
                let m = CMatrix::from_fn(n, n, |i, j| C64::new(rows[i][j], 0.0));
                Ok(OperatorModel::Matrix(MatrixOperator::bounded(m)?))
            }
        }
    }

    /// The same family truncated at twice the size, where that makes
    /// sense (polynomial profiles only; the other families are either
    /// exhaustive or capped by the on-spectrum tolerance).
    pub fn build_doubled(&self) -> Option<Result<OperatorModel>> {
        match self {
            Self::Polynomial { alpha, n, adjoin_zero } => Some(
                DiagonalOperator::polynomial_profile(*alpha, n * 2, *adjoin_zero)
                    .map(OperatorModel::Diagonal),
            ),
            _ => None,
        }
    }
}

/// One fully resolved scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub operator: OperatorSpec,
    pub measure: BoundedMeasure,
    pub checks: Vec<TheoremId>,
    pub t_max: f64,
    pub s_min: f64,
    pub points_per_decade: u32,
    pub epsilon: f64,
    pub c: f64,
    pub log_c: f64,
    pub c_scan: Vec<f64>,
}

impl Scenario {
    fn with_defaults(name: String, operator: OperatorSpec) -> Self {
        Self {
            name,
            operator,
            measure: BoundedMeasure::e_minus_delta(),
            checks: TheoremId::ALL.to_vec(),
            t_max: 1e6,
            s_min: 1e-6,
            points_per_decade: 16,
            epsilon: 0.1,
            c: 0.5,
            log_c: 1.0,
            c_scan: vec![0.1, 1.0, 10.0],
        }
    }
}

pub fn parse_config(path: &Path) -> Result<Vec<Scenario>> {
    let text = std::fs::read_to_string(path)?;
    parse_config_str(&text)
}

pub fn parse_config_str(text: &str) -> Result<Vec<Scenario>> {
    let mut scenarios: Vec<Scenario> = Vec::new();
    let mut current: Option<PartialScenario> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('[') {
            if line != "[scenario]" {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("unknown section `{line}`; only [scenario] is recognised"),
                });
            }
            if let Some(p) = current.take() {
                scenarios.push(p.finish()?);
            }
            current = Some(PartialScenario::new(line_no));
            continue;
        }
        let (key, value) = line.split_once('=').ok_or(Error::Parse {
            line: line_no,
            msg: "expected `key = value`".into(),
        })?;
        let key = key.trim();
        let value = value.trim();
        let part = current.as_mut().ok_or(Error::Parse {
            line: line_no,
            msg: "key outside of a [scenario] section".into(),
        })?;
        part.set(key, value, line_no)?;
    }
    if let Some(p) = current.take() {
        scenarios.push(p.finish()?);
    }

    let mut seen = std::collections::BTreeSet::new();
    for s in &scenarios {
        if !seen.insert(s.name.clone()) {
            return Err(Error::Parse {
                line: 0,
                msg: format!("duplicate scenario name `{}`", s.name),
            });
        }
    }
    Ok(scenarios)
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

struct PartialScenario {
    section_line: usize,
    name: Option<String>,
    operator: Option<OperatorSpec>,
    measure: Option<BoundedMeasure>,
    checks: Option<Vec<TheoremId>>,
    t_max: Option<f64>,
    s_min: Option<f64>,
    points_per_decade: Option<u32>,
    epsilon: Option<f64>,
    c: Option<f64>,
    log_c: Option<f64>,
    c_scan: Option<Vec<f64>>,
}

impl PartialScenario {
    fn new(section_line: usize) -> Self {
        Self {
            section_line,
            name: None,
            operator: None,
            measure: None,
            checks: None,
            t_max: None,
            s_min: None,
            points_per_decade: None,
            epsilon: None,
            c: None,
            log_c: None,
            c_scan: None,
        }
    }

    fn set(&mut self, key: &str, value: &str, line: usize) -> Result<()> {
        match key {
            "name" => {
                if value.is_empty() {
                    return Err(Error::Range {
                        line,
                        msg: "scenario name must be nonempty".into(),
                    });
                }
                self.name = Some(value.to_string());
            }
            "operator" => self.operator = Some(parse_operator(value, line)?),
            "measure" => {
                self.measure = Some(parse_measure(value).map_err(|e| Error::Parse {
                    line,
                    msg: e.to_string(),
                })?)
            }
            "checks" => {
                let mut ids = Vec::new();
                for tok in value.split(',') {
                    let tok = tok.trim();
                    if tok.is_empty() {
                        continue;
                    }
                    let id = TheoremId::parse(tok).ok_or(Error::Parse {
                        line,
                        msg: format!("unknown check `{tok}`"),
                    })?;
                    ids.push(id);
                }
                self.checks = Some(ids);
            }
            "t_max" => {
                let v = parse_f64(value, line)?;
                if !(v > 1.0) || !v.is_finite() {
                    return Err(Error::Range {
                        line,
                        msg: format!("t_max must exceed 1, got {v}"),
                    });
                }
                self.t_max = Some(v);
            }
            "s_min" => {
                let v = parse_f64(value, line)?;
                if !(v > 1e-13 && v < 1.0) {
                    return Err(Error::Range {
                        line,
                        msg: format!("s_min must lie in (1e-13, 1), got {v}"),
                    });
                }
                self.s_min = Some(v);
            }
            "points_per_decade" => {
                let v: u32 = value.parse().map_err(|_| Error::Parse {
                    line,
                    msg: format!("bad integer `{value}`"),
                })?;
                if v < 4 {
                    return Err(Error::Range {
                        line,
                        msg: format!("points_per_decade must be >= 4, got {v}"),
                    });
                }
                self.points_per_decade = Some(v);
            }
            "epsilon" => {
                let v = parse_f64(value, line)?;
                if !(v > 0.0 && v < 1.0) {
                    return Err(Error::Range {
                        line,
                        msg: format!("epsilon must lie in (0, 1), got {v}"),
                    });
                }
                self.epsilon = Some(v);
            }
            "c" => {
                let v = parse_f64(value, line)?;
                if !(v > 0.0 && v < 1.0) {
                    return Err(Error::Range {
                        line,
                        msg: format!("c must lie in (0, 1), got {v}"),
                    });
                }
                self.c = Some(v);
            }
            "log_c" => {
                let v = parse_f64(value, line)?;
                if !(v > 0.0) {
                    return Err(Error::Range {
                        line,
                        msg: format!("log_c must be positive, got {v}"),
                    });
                }
                self.log_c = Some(v);
            }
            "c_scan" => {
                let mut scan = Vec::new();
                for tok in value.split(',') {
                    let v = parse_f64(tok.trim(), line)?;
                    if !(v > 0.0) {
                        return Err(Error::Range {
                            line,
                            msg: format!("c_scan entries must be positive, got {v}"),
                        });
                    }
                    scan.push(v);
                }
                if scan.is_empty() {
                    return Err(Error::Range {
                        line,
                        msg: "c_scan must name at least one constant".into(),
                    });
                }
                self.c_scan = Some(scan);
            }
            other => {
                return Err(Error::UnknownKey {
                    line,
                    key: other.to_string(),
                })
            }
        }
        Ok(())
    }

    fn finish(self) -> Result<Scenario> {
        let name = self.name.ok_or(Error::Parse {
            line: self.section_line,
            msg: "scenario missing `name`".into(),
        })?;
        let operator = self.operator.ok_or(Error::Parse {
            line: self.section_line,
            msg: format!("scenario `{name}` missing `operator`"),
        })?;
        let mut s = Scenario::with_defaults(name, operator);
        if let Some(m) = self.measure {
            s.measure = m;
        }
        if let Some(c) = self.checks {
            s.checks = c;
        }
        if let Some(v) = self.t_max {
            s.t_max = v;
        }
        if let Some(v) = self.s_min {
            s.s_min = v;
        }
        if let Some(v) = self.points_per_decade {
            s.points_per_decade = v;
        }
        if let Some(v) = self.epsilon {
            s.epsilon = v;
        }
        if let Some(v) = self.c {
            s.c = v;
        }
        if let Some(v) = self.log_c {
            s.log_c = v;
        }
        if let Some(v) = self.c_scan {
            s.c_scan = v;
        }
        Ok(s)
    }
}

fn parse_f64(value: &str, line: usize) -> Result<f64> {
    value.parse::<f64>().map_err(|_| Error::Parse {
        line,
        msg: format!("bad number `{value}`"),
    })
}

/// `diagonal <family>(args)` or `matrix [[...], [...]]`.
fn parse_operator(value: &str, line: usize) -> Result<OperatorSpec> {
    let perr = |msg: String| Error::Parse { line, msg };
    if let Some(rest) = value.strip_prefix("diagonal") {
        let rest = rest.trim();
        if let Some(args) = rest.strip_prefix("eigenvalues") {
            let eigs = parse_complex_list(args.trim(), line)?;
            return Ok(OperatorSpec::Eigenvalues(eigs));
        }
        let open = rest
            .find('(')
            .ok_or_else(|| perr(format!("expected `family(args)` after diagonal: `{rest}`")))?;
        let close = rest
            .rfind(')')
            .ok_or_else(|| perr(format!("unclosed parenthesis in `{rest}`")))?;
        let family = rest[..open].trim();
        let args = parse_named_args(&rest[open + 1..close], line)?;
        let get = |k: &str| args.iter().find(|(a, _)| a == k).map(|(_, v)| v.clone());
        match family {
            "polynomial" => {
                let alpha = get("alpha")
                    .ok_or_else(|| perr("polynomial needs alpha".into()))?
                    .parse::<f64>()
                    .map_err(|_| perr("bad alpha".into()))?;
                let n = get("n")
                    .ok_or_else(|| perr("polynomial needs n".into()))?
                    .parse::<f64>()
                    .map_err(|_| perr("bad n".into()))? as usize;
                let adjoin_zero = match get("adjoin_zero") {
                    None => false,
                    Some(v) => v
                        .parse::<bool>()
                        .map_err(|_| perr("adjoin_zero must be true or false".into()))?,
                };
                Ok(OperatorSpec::Polynomial { alpha, n, adjoin_zero })
            }
            "exponential" => {
                let n = get("n")
                    .ok_or_else(|| perr("exponential needs n".into()))?
                    .parse::<usize>()
                    .map_err(|_| perr("bad n".into()))?;
                Ok(OperatorSpec::Exponential { n })
            }
            "lacunary" => {
                let levels = get("levels")
                    .ok_or_else(|| perr("lacunary needs levels".into()))?
                    .parse::<usize>()
                    .map_err(|_| perr("bad levels".into()))?;
                Ok(OperatorSpec::Lacunary { levels })
            }
            other => Err(perr(format!("unknown diagonal family `{other}`"))),
        }
    } else if let Some(rest) = value.strip_prefix("matrix") {
        let rows = parse_matrix_rows(rest.trim(), line)?;
        Ok(OperatorSpec::Matrix(rows))
    } else {
        Err(perr(format!(
            "operator must start with `diagonal` or `matrix`, got `{value}`"
        )))
    }
}

/// `key = value, key = value, ...`; key names are case-insensitive.
fn parse_named_args(body: &str, line: usize) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for tok in body.split(',') {
        let tok = tok.trim();
        if tok.is_empty() {
            continue;
        }
        let (k, v) = tok.split_once('=').ok_or(Error::Parse {
            line,
            msg: format!("expected `key = value` in argument list, got `{tok}`"),
        })?;
        out.push((k.trim().to_lowercase(), v.trim().to_string()));
    }
    Ok(out)
}

/// `((re, im), (re, im), ...)`
fn parse_complex_list(body: &str, line: usize) -> Result<Vec<C64>> {
    let body = body
        .strip_prefix('(')
        .and_then(|b| b.strip_suffix(')'))
        .ok_or(Error::Parse {
            line,
            msg: "eigenvalues takes a parenthesised list of (re, im) pairs".into(),
        })?;
    let mut eigs = Vec::new();
    let mut rest = body.trim();
    while !rest.is_empty() {
        let open = rest.strip_prefix('(').ok_or(Error::Parse {
            line,
            msg: format!("expected `(re, im)`, got `{rest}`"),
        })?;
        let close = open.find(')').ok_or(Error::Parse {
            line,
            msg: "unclosed (re, im) pair".into(),
        })?;
        let nums: Vec<&str> = open[..close].split(',').map(str::trim).collect();
        if nums.len() != 2 {
            return Err(Error::Parse {
                line,
                msg: format!("eigenvalue pair needs two numbers, got `{}`", &open[..close]),
            });
        }
        let re = parse_f64(nums[0], line)?;
        let im = parse_f64(nums[1], line)?;
        eigs.push(C64::new(re, im));
        rest = open[close + 1..].trim().trim_start_matches(',').trim();
    }
    if eigs.is_empty() {
        return Err(Error::Parse {
            line,
            msg: "eigenvalue list is empty".into(),
        });
    }
    Ok(eigs)
}

/// `[[a, b], [c, d]]`, real entries.
fn parse_matrix_rows(body: &str, line: usize) -> Result<Vec<Vec<f64>>> {
    let inner = body
        .strip_prefix('[')
        .and_then(|b| b.strip_suffix(']'))
        .ok_or(Error::Parse {
            line,
            msg: "matrix takes bracketed rows like [[a, b], [c, d]]".into(),
        })?;
    let mut rows = Vec::new();
    let mut rest = inner.trim();
    while !rest.is_empty() {
        let open = rest.strip_prefix('[').ok_or(Error::Parse {
            line,
            msg: format!("expected `[...]` row, got `{rest}`"),
        })?;
        let close = open.find(']').ok_or(Error::Parse {
            line,
            msg: "unclosed matrix row".into(),
        })?;
        let row: Result<Vec<f64>> = open[..close]
            .split(',')
            .map(|t| parse_f64(t.trim(), line))
            .collect();
        rows.push(row?);
        rest = open[close + 1..].trim().trim_start_matches(',').trim();
    }
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Parse {
            line,
            msg: "matrix must be square and nonempty".into(),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_fills_defaults() {
        let text = "[scenario]\nname = tiny\noperator = diagonal polynomial(alpha = 2, N = 100000)\n";
        let scenarios = parse_config_str(text).unwrap();
        assert_eq!(scenarios.len(), 1);
        let s = &scenarios[0];
        assert_eq!(s.name, "tiny");
        assert_eq!(
            s.operator,
            OperatorSpec::Polynomial {
                alpha: 2.0,
                n: 100_000,
                adjoin_zero: false
            }
        );
        assert_eq!(s.t_max, 1e6);
        assert_eq!(s.s_min, 1e-6);
        assert_eq!(s.points_per_decade, 16);
        assert_eq!(s.epsilon, 0.1);
        assert_eq!(s.measure, BoundedMeasure::e_minus_delta());
        assert_eq!(s.checks.len(), TheoremId::ALL.len());
    }

    #[test]
    fn out_of_range_epsilon_rejected() {
        let text = "[scenario]\nname = x\noperator = diagonal exponential(n = 8)\nepsilon = 1.5\n";
        match parse_config_str(text) {
            Err(Error::Range { line, .. }) => assert_eq!(line, 4),
            other => panic!("expected range error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_key_is_hard_error() {
        let text = "[scenario]\nname = x\noperator = diagonal exponential(n = 8)\nfrobnicate = 1\n";
        match parse_config_str(text) {
            Err(Error::UnknownKey { line, key }) => {
                assert_eq!(line, 4);
                assert_eq!(key, "frobnicate");
            }
            other => panic!("expected unknown key error, got {other:?}"),
        }
    }

    #[test]
    fn matrix_and_eigenvalue_operators() {
        let text = "\
[scenario]
name = mat
operator = matrix [[-0.1, 1], [0, -0.1]]
checks = S0InftyProxy_3_1

[scenario]
name = eig
operator = diagonal eigenvalues((0, 0), (-1, 0.5))
";
        let scenarios = parse_config_str(text).unwrap();
        assert_eq!(scenarios.len(), 2);
        assert_eq!(
            scenarios[0].operator,
            OperatorSpec::Matrix(vec![vec![-0.1, 1.0], vec![0.0, -0.1]])
        );
        assert_eq!(scenarios[0].checks, vec![TheoremId::S0InftyProxy31]);
        assert_eq!(
            scenarios[1].operator,
            OperatorSpec::Eigenvalues(vec![C64::new(0.0, 0.0), C64::new(-1.0, 0.5)])
        );
        scenarios[0].operator.build().unwrap();
        scenarios[1].operator.build().unwrap();
    }

    #[test]
    fn duplicate_names_rejected() {
        let text = "\
[scenario]
name = a
operator = diagonal exponential(n = 4)

[scenario]
name = a
operator = diagonal exponential(n = 4)
";
        assert!(parse_config_str(text).is_err());
    }

    #[test]
    fn comments_and_measures() {
        let text = "\
# catalog entry
[scenario]
name = with_measure  # trailing comment
operator = diagonal exponential(n = 8)
measure = expdensity(1, 0; 1) - atom(0, 1, 0)
checks = MuDecay_3_4, Dichotomy_2_2
c_scan = 0.5, 2
";
        let s = &parse_config_str(text).unwrap()[0];
        assert_eq!(s.name, "with_measure");
        assert_eq!(s.measure, BoundedMeasure::e_minus_delta());
        assert_eq!(s.c_scan, vec![0.5, 2.0]);
    }
}
