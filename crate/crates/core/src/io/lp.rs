//! CPLEX LP text for a formulation, and a reader for the same subset.
//!
//! Every row is scaled to integer coefficients. Paired general rows become
//! two inequalities with everything moved to the left:
//!
//! ```text
//!  g1_lo: lambda_3 - z_1 <= 0
//!  g1_hi: z_1 - lambda_2 - lambda_3 <= 0
//! ```

use std::collections::BTreeMap;
use std::fmt::Write;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::document::{lambda_name, z_name};
use crate::error::{Error, Result};
use crate::formulation::Formulation;
use crate::linalg::{scale_row_to_integers, Rational};

/// Lines are wrapped well below the 510 characters LP readers accept.
const MAX_LINE: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    fn as_str(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        }
    }
}

/// A named linear row `Σ coef · var (sense) rhs` with integer data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpRow {
    pub name: String,
    pub terms: Vec<(String, BigInt)>,
    pub sense: Sense,
    pub rhs: BigInt,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LpModel {
    pub rows: Vec<LpRow>,
    /// Variables in declaration order with `(lower, upper)` bounds.
    pub bounds: Vec<(String, Option<BigInt>, Option<BigInt>)>,
    pub generals: Vec<String>,
}

fn row_from(name: String, vars: &[String], coeffs: &[Rational], rhs: &Rational, sense: Sense) -> LpRow {
    let (ints, rhs) = scale_row_to_integers(coeffs, std::slice::from_ref(rhs));
    let terms = vars.iter().zip(ints).filter(|(_, c)| !c.is_zero()).map(|(v, c)| (v.clone(), c)).collect();
    LpRow { name, terms, sense, rhs: rhs.into_iter().next().unwrap() }
}

impl LpModel {
    pub fn from_formulation(f: &Formulation) -> Self {
        let lambdas: Vec<String> = (0..f.n_lambda).map(lambda_name).collect();
        let zs: Vec<String> = (0..f.r_z).map(z_name).collect();
        let all: Vec<String> = lambdas.iter().chain(&zs).cloned().collect();
        let mut rows = Vec::new();
        for (i, e) in f.equalities.iter().enumerate() {
            rows.push(row_from(format!("e{}", i + 1), &all, &e.coeffs, &e.rhs, Sense::Eq));
        }
        let zero = Rational::zero();
        for (k, g) in f.general_rows.iter().enumerate() {
            let b = g.rational_normal();
            // lower · λ − b · z <= 0
            let mut coeffs: Vec<Rational> = g.lower.clone();
            coeffs.extend(b.iter().map(|x| -x));
            let order: Vec<String> = all.clone();
            rows.push(row_from(format!("g{}_lo", k + 1), &order, &coeffs, &zero, Sense::Le));
            // b · z − upper · λ <= 0, written with z first.
            let mut coeffs: Vec<Rational> = b.clone();
            coeffs.extend(g.upper.iter().map(|x| -x));
            let order: Vec<String> = zs.iter().chain(&lambdas).cloned().collect();
            rows.push(row_from(format!("g{}_hi", k + 1), &order, &coeffs, &zero, Sense::Le));
        }
        let mut bounds: Vec<_> = lambdas.iter().map(|v| (v.clone(), Some(BigInt::zero()), None)).collect();
        bounds.extend(zs.iter().zip(&f.z_bounds).map(|(v, &(lo, hi))| (v.clone(), Some(lo.into()), Some(hi.into()))));
        Self { rows, bounds, generals: zs }
    }
}

fn push_wrapped(out: &mut String, pieces: &[String]) {
    let mut line = String::new();
    for p in pieces {
        if !line.is_empty() && line.len() + 1 + p.len() > MAX_LINE {
            out.push_str(&line);
            out.push('\n');
            line = "   ".to_string();
        }
        if !line.trim().is_empty() {
            line.push(' ');
        }
        line.push_str(p);
    }
    out.push_str(&line);
    out.push('\n');
}

fn term_pieces(terms: &[(String, BigInt)]) -> Vec<String> {
    let mut pieces = Vec::with_capacity(2 * terms.len());
    for (i, (v, c)) in terms.iter().enumerate() {
        let mag = c.abs();
        if i > 0 || c.is_negative() {
            pieces.push(if c.is_negative() { "-" } else { "+" }.to_string());
        }
        pieces.push(if mag.is_one() { v.clone() } else { format!("{mag} {v}") });
    }
    // A leading "-" must stay glued to its term.
    if pieces.first().map(String::as_str) == Some("-") {
        let first = pieces.remove(0);
        pieces[0] = format!("{first}{}", pieces[0]);
    }
    pieces
}

pub fn write_lp(model: &LpModel) -> String {
    let mut out = String::new();
    out.push_str("\\ idealform formulation\nMinimize\n");
    let first = model.bounds.first().map(|b| b.0.as_str()).unwrap_or("lambda_1");
    let _ = writeln!(out, " obj: 0 {first}");
    out.push_str("Subject To\n");
    for row in &model.rows {
        let mut pieces = vec![format!(" {}:", row.name)];
        if row.terms.is_empty() {
            pieces.push(format!("0 {first}"));
        } else {
            pieces.extend(term_pieces(&row.terms));
        }
        pieces.push(row.sense.as_str().to_string());
        pieces.push(row.rhs.to_string());
        push_wrapped(&mut out, &pieces);
    }
    out.push_str("Bounds\n");
    for (v, lo, hi) in &model.bounds {
        match (lo, hi) {
            (Some(lo), Some(hi)) => writeln!(out, " {lo} <= {v} <= {hi}"),
            (Some(lo), None) => writeln!(out, " {v} >= {lo}"),
            (None, Some(hi)) => writeln!(out, " -inf <= {v} <= {hi}"),
            (None, None) => writeln!(out, " {v} free"),
        }
        .unwrap();
    }
    if !model.generals.is_empty() {
        out.push_str("Generals\n");
        let pieces: Vec<String> = model.generals.to_vec();
        let mut line = String::new();
        for p in pieces {
            if line.len() + p.len() + 1 > MAX_LINE {
                let _ = writeln!(out, "{line}");
                line.clear();
            }
            line.push(' ');
            line.push_str(&p);
        }
        let _ = writeln!(out, "{line}");
    }
    out.push_str("End\n");
    out
}

/// LP text for `f`.
pub fn emit_lp_text(f: &Formulation) -> String {
    write_lp(&LpModel::from_formulation(f))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Preamble,
    Objective,
    Constraints,
    Bounds,
    Generals,
    End,
}

fn section_of(line: &str) -> Option<Section> {
    match line.trim().to_ascii_lowercase().as_str() {
        "minimize" | "maximize" | "minimum" | "maximum" | "min" | "max" => Some(Section::Objective),
        "subject to" | "such that" | "st" | "s.t." | "st." => Some(Section::Constraints),
        "bounds" | "bound" => Some(Section::Bounds),
        "generals" | "general" | "gen" | "integers" => Some(Section::Generals),
        "end" => Some(Section::End),
        _ => None,
    }
}

/// CPLEX naming rules: at most 255 characters drawn from letters, digits
/// and ``!"#$%&()/,.;?@_`'{}|~``, not starting with a digit or a period.
pub fn is_valid_name(name: &str) -> bool {
    const EXTRA: &str = "!\"#$%&()/,.;?@_`'{}|~";
    let mut chars = name.chars();
    let Some(first) = chars.next() else { return false };
    name.len() <= 255
        && !first.is_ascii_digit()
        && first != '.'
        && name.chars().all(|c| c.is_ascii_alphanumeric() || EXTRA.contains(c))
}

fn lp_err(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Input(format!("LP line {line}: {msg}"))
}

fn parse_int(tok: &str, line: usize) -> Result<BigInt> {
    tok.parse().map_err(|_| lp_err(line, format!("expected an integer, found {tok:?}")))
}

/// Parses `[name:] terms sense rhs` from whitespace tokens.
fn parse_row(tokens: &[String], line: usize) -> Result<LpRow> {
    let (name, rest) = match tokens.first() {
        Some(t) if t.ends_with(':') => (t.trim_end_matches(':').to_string(), &tokens[1..]),
        _ => (String::new(), tokens),
    };
    let sense_at = rest
        .iter()
        .position(|t| matches!(t.as_str(), "<=" | ">=" | "=" | "=<" | "=>" | "<" | ">"))
        .ok_or_else(|| lp_err(line, "row has no sense"))?;
    let sense = match rest[sense_at].as_str() {
        "<=" | "=<" | "<" => Sense::Le,
        ">=" | "=>" | ">" => Sense::Ge,
        _ => Sense::Eq,
    };
    if sense_at + 2 != rest.len() {
        return Err(lp_err(line, "expected a single right-hand side after the sense"));
    }
    let rhs = parse_int(&rest[sense_at + 1], line)?;
    let mut terms: Vec<(String, BigInt)> = Vec::new();
    let mut sign = BigInt::one();
    let mut coef: Option<BigInt> = None;
    for tok in &rest[..sense_at] {
        let mut t = tok.as_str();
        match t {
            "+" => continue,
            "-" => {
                sign = -sign;
                continue;
            }
            _ => {}
        }
        if let Some(stripped) = t.strip_prefix('-') {
            sign = -sign;
            t = stripped;
        } else if let Some(stripped) = t.strip_prefix('+') {
            t = stripped;
        }
        if t.chars().next().is_some_and(|c| c.is_ascii_digit()) {
            coef = Some(parse_int(t, line)?);
            continue;
        }
        if !is_valid_name(t) {
            return Err(lp_err(line, format!("invalid variable name {t:?}")));
        }
        let c = &sign * coef.take().unwrap_or_else(BigInt::one);
        terms.push((t.to_string(), c));
        sign = BigInt::one();
    }
    if coef.is_some() {
        return Err(lp_err(line, "dangling coefficient"));
    }
    Ok(LpRow { name, terms, sense, rhs })
}

fn parse_bound(tokens: &[&str], line: usize) -> Result<(String, Option<BigInt>, Option<BigInt>)> {
    let num = |t: &str| -> Result<Option<BigInt>> {
        match t.to_ascii_lowercase().as_str() {
            "-inf" | "-infinity" | "+inf" | "inf" | "infinity" => Ok(None),
            _ => parse_int(t, line).map(Some),
        }
    };
    match tokens {
        [lo, "<=", v, "<=", hi] => Ok((v.to_string(), num(lo)?, num(hi)?)),
        [v, ">=", lo] => Ok((v.to_string(), num(lo)?, None)),
        [v, "<=", hi] => Ok((v.to_string(), Some(BigInt::zero()), num(hi)?)),
        [v, "free"] => Ok((v.to_string(), None, None)),
        _ => Err(lp_err(line, format!("unrecognised bound {:?}", tokens.join(" ")))),
    }
}

/// Reads LP text in the subset [`write_lp`] produces, with rows allowed to
/// continue over several lines. Objective content is ignored.
pub fn parse_lp(text: &str) -> Result<LpModel> {
    let mut model = LpModel::default();
    let mut section = Section::Preamble;
    let mut pending: Vec<String> = Vec::new();
    let mut pending_line = 0;
    let flush = |pending: &mut Vec<String>, line: usize, model: &mut LpModel| -> Result<()> {
        if !pending.is_empty() {
            model.rows.push(parse_row(pending, line)?);
            pending.clear();
        }
        Ok(())
    };
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('\\').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        if let Some(next) = section_of(line) {
            if section == Section::Constraints {
                flush(&mut pending, pending_line, &mut model)?;
            }
            section = next;
            continue;
        }
        match section {
            Section::Preamble => return Err(lp_err(line_no, "content before the objective section")),
            Section::Objective => {}
            Section::Constraints => {
                for tok in line.split_whitespace() {
                    if tok.ends_with(':') && !pending.is_empty() {
                        flush(&mut pending, pending_line, &mut model)?;
                    }
                    if pending.is_empty() {
                        pending_line = line_no;
                    }
                    pending.push(tok.to_string());
                }
            }
            Section::Bounds => {
                let tokens: Vec<&str> = line.split_whitespace().collect();
                model.bounds.push(parse_bound(&tokens, line_no)?);
            }
            Section::Generals => {
                for v in line.split_whitespace() {
                    if !is_valid_name(v) {
                        return Err(lp_err(line_no, format!("invalid variable name {v:?}")));
                    }
                    model.generals.push(v.to_string());
                }
            }
            Section::End => return Err(lp_err(line_no, "content after End")),
        }
    }
    if section != Section::End {
        return Err(Error::Input("LP text has no End line".into()));
    }
    Ok(model)
}

/// Rows as sorted `(variable → coefficient)` maps, for order-free comparison.
pub fn constraint_set(model: &LpModel) -> Vec<(BTreeMap<String, BigInt>, Sense, BigInt)> {
    let mut rows: Vec<_> = model
        .rows
        .iter()
        .map(|r| {
            let mut m = BTreeMap::new();
            for (v, c) in &r.terms {
                *m.entry(v.clone()).or_insert_with(BigInt::zero) += c;
            }
            m.retain(|_, c| !c.is_zero());
            (m, r.sense, r.rhs.clone())
        })
        .collect();
    rows.sort();
    rows
}
