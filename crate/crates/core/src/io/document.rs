//! JSON problem and formulation documents.
//!
//! Rationals travel as strings (`"3/2"`, `"-4"`), never as JSON numbers.
//! Ground elements in problem documents are one-based.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::applications::{AnnulusSpec, PwlFunction, RecoveryMap};
use crate::cdc::Cdc;
use crate::encoding::{make_encoding, Encoding, EncodingKind};
use crate::error::{Error, Result};
use crate::formulation::{Formulation, GeneralRow, LinearEquality, PipelinePath, Provenance};
use crate::linalg::Rational;

fn input(field: &str, msg: impl std::fmt::Display) -> Error {
    Error::Input(format!("{field}: {msg}"))
}

/// Parses `"p/q"` or an integer string.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let cleaned = s.trim().replace('\u{2212}', "-");
    if cleaned.contains('/') {
        let (_, den) = cleaned.split_once('/').unwrap();
        if den.trim_start_matches(['+', '-']).chars().all(|c| c == '0') {
            return Err(Error::Input(format!("{s:?} has a zero denominator")));
        }
    }
    Rational::from_str(&cleaned)
        .map_err(|_| Error::Input(format!("{s:?} is not a rational (expected \"p/q\" or an integer)")))
}

pub fn format_rational(q: &Rational) -> String {
    q.to_string()
}

fn parse_rationals(field: &str, values: &[String]) -> Result<Vec<Rational>> {
    values.iter().enumerate().map(|(i, s)| parse_rational(s).map_err(|e| input(&format!("{field}[{i}]"), e))).collect()
}

fn format_rationals(values: &[Rational]) -> Vec<String> {
    values.iter().map(format_rational).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckLevel {
    None,
    Validity,
    Ideal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Lp,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemOptions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub check: Option<CheckLevel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<OutputFormat>,
}

/// `"gray"`, `"zigzag"` or `{"explicit": [[...], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
enum EncodingSpec {
    Named(String),
    Explicit { explicit: Vec<Vec<i64>> },
}

impl EncodingSpec {
    fn named_kind(&self) -> Result<EncodingKind> {
        match self {
            EncodingSpec::Named(s) => match s.as_str() {
                "gray" => Ok(EncodingKind::BinaryReflectedGray),
                "zigzag" => Ok(EncodingKind::ZigZag),
                "explicit" => Err(input("encoding", "explicit encodings are given as {\"explicit\": [[...]]}")),
                other => Err(input("encoding", format!("unknown encoding {other:?} (expected gray or zigzag)"))),
            },
            EncodingSpec::Explicit { .. } => Err(input("encoding", "explicit rows are only accepted for cdc problems")),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum RawProblem {
    Cdc {
        #[serde(default)]
        n: Option<usize>,
        alternatives: Vec<Vec<usize>>,
        encoding: EncodingSpec,
        #[serde(default)]
        options: ProblemOptions,
    },
    Pwl {
        breakpoints: Vec<String>,
        slopes: Vec<String>,
        intercepts: Vec<String>,
        encoding: EncodingSpec,
        #[serde(default)]
        options: ProblemOptions,
    },
    Annulus {
        inner_radius: f64,
        outer_radius: f64,
        d: usize,
        encoding: EncodingSpec,
        #[serde(default)]
        options: ProblemOptions,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Problem {
    Cdc { cdc: Cdc, encoding: Encoding },
    Pwl { function: PwlFunction, encoding: EncodingKind },
    Annulus { spec: AnnulusSpec, encoding: EncodingKind },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemDocument {
    pub problem: Problem,
    pub options: ProblemOptions,
}

fn parse_cdc(n: Option<usize>, alternatives: Vec<Vec<usize>>) -> Result<Cdc> {
    if alternatives.iter().flatten().any(|&v| v == 0) {
        return Err(input("alternatives", "ground elements are numbered from 1"));
    }
    let zero_based = |alts: Vec<Vec<usize>>| alts.into_iter().map(|t| t.into_iter().map(|v| v - 1).collect()).collect();
    let cdc = match n {
        Some(n) => Cdc::new(n, zero_based(alternatives)),
        None => Cdc::from_one_based(&alternatives),
    };
    cdc.map_err(|e| input("alternatives", e))
}

/// Parses and validates a problem document.
pub fn parse_problem(text: &str) -> Result<ProblemDocument> {
    let raw: RawProblem = serde_json::from_str(text).map_err(|e| Error::Input(format!("problem document: {e}")))?;
    Ok(match raw {
        RawProblem::Cdc { n, alternatives, encoding, options } => {
            let cdc = parse_cdc(n, alternatives)?;
            let encoding = match encoding {
                EncodingSpec::Explicit { explicit } => {
                    Encoding::explicit(explicit).map_err(|e| input("encoding", e))?
                }
                named => make_encoding(cdc.d(), named.named_kind()?).map_err(|e| input("encoding", e))?,
            };
            if encoding.d() != cdc.d() {
                return Err(input("encoding", format!("{} codes for {} alternatives", encoding.d(), cdc.d())));
            }
            ProblemDocument { problem: Problem::Cdc { cdc, encoding }, options }
        }
        RawProblem::Pwl { breakpoints, slopes, intercepts, encoding, options } => {
            let function = PwlFunction::new(
                parse_rationals("breakpoints", &breakpoints)?,
                parse_rationals("slopes", &slopes)?,
                parse_rationals("intercepts", &intercepts)?,
            )
            .map_err(|e| input("breakpoints", e))?;
            ProblemDocument { problem: Problem::Pwl { function, encoding: encoding.named_kind()? }, options }
        }
        RawProblem::Annulus { inner_radius, outer_radius, d, encoding, options } => {
            let spec = AnnulusSpec::new(inner_radius, outer_radius, d).map_err(|e| match e {
                Error::NotPowerOfTwo(_) => input("d", e),
                other => input("radii", other),
            })?;
            ProblemDocument { problem: Problem::Annulus { spec, encoding: encoding.named_kind()? }, options }
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VariableKind {
    Continuous,
    Integer,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariableDoc {
    pub name: String,
    pub kind: VariableKind,
    pub lower: String,
    #[serde(default)]
    pub upper: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EqualityDoc {
    pub coeffs: Vec<String>,
    pub rhs: String,
}

/// `lower · λ <= normal · z <= upper · λ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneralRowDoc {
    pub normal: Vec<String>,
    pub lower: Vec<String>,
    pub upper: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum RecoveryDoc {
    /// `x = Σ λ_v x_v`, `y >= Σ λ_v y_v` when `epigraph`.
    Pwl {
        points: Vec<(String, String)>,
        epigraph: bool,
    },
    Annulus {
        points: Vec<(f64, f64)>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProvenanceDoc {
    pub path: PipelinePath,
    pub encoding: EncodingKind,
    pub gamma: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub connected: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerificationSummary {
    pub level: CheckLevel,
    pub passed: bool,
    /// Embedding extreme points, for the ideal check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<usize>,
    /// Vertices of the relaxation, for the ideal check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub found: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormulationDocument {
    pub variables: Vec<VariableDoc>,
    pub equalities: Vec<EqualityDoc>,
    pub general_rows: Vec<GeneralRowDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recovery: Option<RecoveryDoc>,
    pub provenance: ProvenanceDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verification: Option<VerificationSummary>,
}

pub fn lambda_name(v: usize) -> String {
    format!("lambda_{}", v + 1)
}

pub fn z_name(k: usize) -> String {
    format!("z_{}", k + 1)
}

/// Builds the exact document for `f`.
pub fn emit_structured(
    f: &Formulation,
    map: Option<&RecoveryMap>,
    verification: Option<VerificationSummary>,
) -> FormulationDocument {
    let mut variables: Vec<VariableDoc> = (0..f.n_lambda)
        .map(|v| VariableDoc { name: lambda_name(v), kind: VariableKind::Continuous, lower: "0".into(), upper: None })
        .collect();
    variables.extend(f.z_bounds.iter().enumerate().map(|(k, &(lo, hi))| VariableDoc {
        name: z_name(k),
        kind: VariableKind::Integer,
        lower: lo.to_string(),
        upper: Some(hi.to_string()),
    }));
    let recovery = map.map(|m| match m {
        RecoveryMap::Pwl { points, epigraph } => RecoveryDoc::Pwl {
            points: points.iter().map(|(x, y)| (format_rational(x), format_rational(y))).collect(),
            epigraph: *epigraph,
        },
        RecoveryMap::Annulus { points } => RecoveryDoc::Annulus { points: points.clone() },
    });
    FormulationDocument {
        variables,
        equalities: f
            .equalities
            .iter()
            .map(|e| EqualityDoc { coeffs: format_rationals(&e.coeffs), rhs: format_rational(&e.rhs) })
            .collect(),
        general_rows: f
            .general_rows
            .iter()
            .map(|g| GeneralRowDoc {
                normal: g.normal.iter().map(|x| x.to_string()).collect(),
                lower: format_rationals(&g.lower),
                upper: format_rationals(&g.upper),
            })
            .collect(),
        recovery,
        provenance: ProvenanceDoc {
            path: f.provenance.path,
            encoding: f.provenance.encoding,
            gamma: f.gamma(),
            kappa: f.provenance.kappa,
            connected: f.provenance.connected,
        },
        verification,
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json(doc: &FormulationDocument) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents always serialize");
    s.push('\n');
    s
}

/// A formulation document read back into library types.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedFormulation {
    pub formulation: Formulation,
    pub recovery: Option<RecoveryMap>,
    pub verification: Option<VerificationSummary>,
}

fn parse_bound(field: &str, s: &str) -> Result<i64> {
    s.parse::<i64>().map_err(|_| input(field, format!("{s:?} is not an integer bound")))
}

/// Inverse of [`emit_structured`] followed by [`to_json`].
pub fn parse_formulation(text: &str) -> Result<ParsedFormulation> {
    let doc: FormulationDocument =
        serde_json::from_str(text).map_err(|e| Error::Input(format!("formulation document: {e}")))?;
    let n_lambda = doc.variables.iter().take_while(|v| v.kind == VariableKind::Continuous).count();
    let mut z_bounds = Vec::new();
    for (i, v) in doc.variables.iter().enumerate() {
        let field = format!("variables[{i}]");
        let expected = if i < n_lambda { lambda_name(i) } else { z_name(i - n_lambda) };
        if v.name != expected {
            return Err(input(&field, format!("expected variable {expected}, found {}", v.name)));
        }
        if i < n_lambda {
            if v.lower != "0" || v.upper.is_some() {
                return Err(input(&field, "lambda variables are bounded below by 0 only"));
            }
        } else {
            if v.kind != VariableKind::Integer {
                return Err(input(&field, "z variables must be integer and follow every lambda"));
            }
            let hi = v.upper.as_deref().ok_or_else(|| input(&field, "z variables need an upper bound"))?;
            z_bounds.push((parse_bound(&field, &v.lower)?, parse_bound(&field, hi)?));
        }
    }
    let r_z = z_bounds.len();
    let width = n_lambda + r_z;
    let check_len = |field: &str, got: usize, want: usize| {
        if got == want {
            Ok(())
        } else {
            Err(input(field, format!("expected {want} entries, found {got}")))
        }
    };

    let mut equalities = Vec::with_capacity(doc.equalities.len());
    for (i, e) in doc.equalities.iter().enumerate() {
        let field = format!("equalities[{i}]");
        check_len(&field, e.coeffs.len(), width)?;
        equalities.push(LinearEquality {
            coeffs: parse_rationals(&format!("{field}.coeffs"), &e.coeffs)?,
            rhs: parse_rational(&e.rhs).map_err(|err| input(&format!("{field}.rhs"), err))?,
        });
    }
    let mut general_rows = Vec::with_capacity(doc.general_rows.len());
    for (i, g) in doc.general_rows.iter().enumerate() {
        let field = format!("general_rows[{i}]");
        check_len(&format!("{field}.normal"), g.normal.len(), r_z)?;
        check_len(&format!("{field}.lower"), g.lower.len(), n_lambda)?;
        check_len(&format!("{field}.upper"), g.upper.len(), n_lambda)?;
        let normal = g
            .normal
            .iter()
            .map(|s| s.parse().map_err(|_| input(&format!("{field}.normal"), format!("{s:?} is not an integer"))))
            .collect::<Result<_>>()?;
        general_rows.push(GeneralRow {
            normal,
            lower: parse_rationals(&format!("{field}.lower"), &g.lower)?,
            upper: parse_rationals(&format!("{field}.upper"), &g.upper)?,
        });
    }
    if doc.provenance.gamma != general_rows.len() {
        return Err(input(
            "provenance.gamma",
            format!("{} but {} general rows are present", doc.provenance.gamma, general_rows.len()),
        ));
    }
    let recovery = match doc.recovery {
        None => None,
        Some(RecoveryDoc::Pwl { points, epigraph }) => {
            check_len("recovery.points", points.len(), n_lambda)?;
            let points = points
                .iter()
                .map(|(x, y)| Ok((parse_rational(x)?, parse_rational(y)?)))
                .collect::<Result<_>>()
                .map_err(|e| input("recovery.points", e))?;
            Some(RecoveryMap::Pwl { points, epigraph })
        }
        Some(RecoveryDoc::Annulus { points }) => {
            check_len("recovery.points", points.len(), n_lambda)?;
            Some(RecoveryMap::Annulus { points })
        }
    };
    Ok(ParsedFormulation {
        formulation: Formulation {
            n_lambda,
            r_z,
            equalities,
            general_rows,
            z_bounds,
            provenance: Provenance {
                path: doc.provenance.path,
                encoding: doc.provenance.encoding,
                kappa: doc.provenance.kappa,
                connected: doc.provenance.connected,
            },
        },
        recovery,
        verification: doc.verification,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::applications::{annulus_formulation, annulus_zigzag_formulation, pwl_formulation, pwl_ground_set};
    use crate::cdc::hyperplane_formulation;
    use crate::linalg::{rat, rat_frac};

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("3/2").unwrap(), rat_frac(3, 2));
        assert_eq!(parse_rational("-4").unwrap(), rat(-4));
        assert_eq!(parse_rational("\u{2212}1").unwrap(), rat(-1));
        assert_eq!(parse_rational("6/4").unwrap(), rat_frac(3, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("1.5").is_err());
        assert!(parse_rational("").is_err());
        assert_eq!(format_rational(&rat_frac(-3, 2)), "-3/2");
    }

    #[test]
    fn cdc_document_infers_n() {
        let doc = parse_problem(r#"{"kind": "cdc", "alternatives": [[1,2],[2,3]], "encoding": "gray"}"#).unwrap();
        match doc.problem {
            Problem::Cdc { cdc, encoding } => {
                assert_eq!(cdc.n(), 3);
                assert_eq!(encoding.kind(), EncodingKind::BinaryReflectedGray);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn explicit_encoding_and_options() {
        let doc = parse_problem(
            r#"{"kind": "cdc", "n": 3, "alternatives": [[1,2],[2,3]], "encoding": {"explicit": [[0],[1]]},
                "options": {"check": "ideal", "format": "lp"}}"#,
        )
        .unwrap();
        assert_eq!(doc.options, ProblemOptions { check: Some(CheckLevel::Ideal), format: Some(OutputFormat::Lp) });
        assert!(matches!(doc.problem, Problem::Cdc { ref encoding, .. } if encoding.kind() == EncodingKind::Explicit));
    }

    #[test]
    fn pwl_document() {
        let doc = parse_problem(
            r#"{"kind": "pwl", "breakpoints": ["0","1","2"], "slopes": ["1","-1"], "intercepts": ["0","2"],
                "encoding": "zigzag"}"#,
        )
        .unwrap();
        match doc.problem {
            Problem::Pwl { function, encoding } => {
                assert_eq!(encoding, EncodingKind::ZigZag);
                assert_eq!(pwl_ground_set(&function).kappa, 0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn field_level_errors() {
        let err = |text: &str| parse_problem(text).unwrap_err().to_string();
        let e = err(r#"{"kind": "cdc", "n": 3, "alternatives": [[1],[3]], "encoding": "gray"}"#);
        assert!(e.starts_with("alternatives:") && e.contains("ground element 2"), "{e}");
        let e = err(
            r#"{"kind": "pwl", "breakpoints": ["0","2","1"], "slopes": ["1","1"], "intercepts": ["0","0"], "encoding": "gray"}"#,
        );
        assert!(e.starts_with("breakpoints:") && e.contains("strictly increasing"), "{e}");
        let e = err(
            r#"{"kind": "pwl", "breakpoints": ["0","x","2"], "slopes": ["1","1"], "intercepts": ["0","0"], "encoding": "gray"}"#,
        );
        assert!(e.starts_with("breakpoints[1]:"), "{e}");
        let e = err(r#"{"kind": "annulus", "inner_radius": 1, "outer_radius": 2, "d": 12, "encoding": "gray"}"#);
        assert!(e.starts_with("d:") && e.contains("power of two"), "{e}");
        let e = err(r#"{"kind": "cdc", "alternatives": [[1,2],[2,3]], "encoding": "binary"}"#);
        assert!(e.starts_with("encoding:"), "{e}");
        let e = err(r#"{"kind": "cdc", "alternatives": [[0,1],[1,2]], "encoding": "gray"}"#);
        assert!(e.contains("numbered from 1"), "{e}");
        let e = err(r#"{"kind": "polygon"}"#);
        assert!(e.starts_with("problem document:"), "{e}");
        assert!(
            parse_problem(r#"{"kind": "cdc", "alternatives": [[1,2],[2,3]], "encoding": "gray", "extra": 1}"#).is_err()
        );
    }

    #[test]
    fn sos2_d2_document() {
        let cdc = Cdc::from_one_based(&[vec![1, 2], vec![2, 3]]).unwrap();
        let e = make_encoding(2, EncodingKind::BinaryReflectedGray).unwrap();
        let f = hyperplane_formulation(&cdc, &e, &Default::default()).unwrap();
        let doc = emit_structured(&f, None, None);
        assert_eq!(doc.variables.len(), 4);
        assert_eq!(doc.general_rows.len(), 1);
        assert_eq!(doc.general_rows[0].lower, vec!["0", "0", "1"]);
        assert_eq!(doc.general_rows[0].upper, vec!["0", "1", "1"]);
        assert!(doc.recovery.is_none());
        assert!(!to_json(&doc).contains("recovery"));
    }

    #[test]
    fn round_trips() {
        let mut cases = Vec::new();
        let spec = AnnulusSpec::new(2.0, 3.0, 8).unwrap();
        let (f, m) = annulus_formulation(&spec, EncodingKind::ZigZag).unwrap();
        assert_eq!(emit_structured(&f, Some(&m), None).general_rows.len(), 6);
        cases.push((f, Some(m)));
        let pwl = PwlFunction::new(
            vec![rat(0), rat_frac(1, 3), rat(1), rat(2), rat(5)],
            vec![rat(1), rat_frac(-2, 7), rat(0), rat(3)],
            vec![rat(0), rat_frac(3, 7), rat_frac(1, 7), rat_frac(1, 2)],
        )
        .unwrap();
        let (f, m) = pwl_formulation(&pwl, EncodingKind::BinaryReflectedGray).unwrap();
        cases.push((f, Some(m)));
        cases.push((annulus_zigzag_formulation(4).unwrap(), None));
        for (f, m) in cases {
            let summary =
                VerificationSummary { level: CheckLevel::Ideal, passed: true, expected: Some(3), found: Some(3) };
            let text = to_json(&emit_structured(&f, m.as_ref(), Some(summary.clone())));
            let back = parse_formulation(&text).unwrap();
            assert_eq!(back.formulation, f);
            assert_eq!(back.recovery, m);
            assert_eq!(back.verification, Some(summary.clone()));
            let again = to_json(&emit_structured(&back.formulation, back.recovery.as_ref(), back.verification));
            assert_eq!(again, text);
        }
    }

    #[test]
    fn malformed_formulations_are_rejected() {
        let f = annulus_zigzag_formulation(4).unwrap();
        let good = to_json(&emit_structured(&f, None, None));
        assert!(parse_formulation(&good.replace("\"gamma\": 3", "\"gamma\": 2")).is_err());
        assert!(parse_formulation(&good.replace("lambda_2", "lambda_9")).is_err());
        assert!(parse_formulation("{}").is_err());
    }
}
