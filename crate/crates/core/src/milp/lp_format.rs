//! CPLEX LP text export, plus a reader for the subset the writer emits.

use std::fmt::Write as _;

use super::IlpInstance;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

const TERMS_PER_LINE: usize = 6;

fn write_terms(out: &mut String, terms: impl Iterator<Item = (f64, String)>) {
    let mut first = true;
    for (k, (c, name)) in terms.enumerate() {
        if k > 0 && k % TERMS_PER_LINE == 0 {
            out.push_str("\n   ");
        }
        let (sign, mag) = if c < 0.0 { ("-", -c) } else { ("+", c) };
        if first && sign == "+" {
            let _ = write!(out, " {mag} {name}");
        } else {
            let _ = write!(out, " {sign} {mag} {name}");
        }
        first = false;
    }
    if first {
        out.push_str(" 0");
    }
}

/// Writes the instance in CPLEX LP format. Equality rows come first, then
/// the `<=` rows, each under its row name.
pub fn export_lp<T: Scalar>(inst: &IlpInstance<T>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "\\ model {} with {} binary variables", inst.model.number(), inst.n_vars());
    out.push_str("Minimize\n obj:");
    write_terms(&mut out, inst.costs.costs.iter().zip(&inst.var_names).map(|(c, n)| (c.to_f64_lossy(), n.clone())));
    out.push_str("\nSubject To\n");
    for (rows, sense) in [(&inst.eq_rows, "="), (&inst.le_rows, "<=")] {
        for r in rows {
            let _ = write!(out, " {}:", r.name);
            write_terms(&mut out, r.coeffs.iter().map(|&(j, a)| (a.to_f64_lossy(), inst.var_names[j].clone())));
            let _ = writeln!(out, " {sense} {}", r.rhs.to_f64_lossy());
        }
    }
    out.push_str("Bounds\n");
    for n in &inst.var_names {
        let _ = writeln!(out, " 0 <= {n} <= 1");
    }
    out.push_str("Binary\n");
    for chunk in inst.var_names.chunks(TERMS_PER_LINE) {
        let _ = writeln!(out, " {}", chunk.join(" "));
    }
    out.push_str("End\n");
    out
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ParsedConstraint {
    pub name: String,
    pub terms: Vec<(String, f64)>,
    pub sense: String,
    pub rhs: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ParsedLp {
    pub objective: Vec<(String, f64)>,
    pub constraints: Vec<ParsedConstraint>,
    pub bounds: Vec<(String, f64, f64)>,
    pub binaries: Vec<String>,
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Preamble,
    Objective,
    Constraints,
    Bounds,
    Binary,
    End,
}

/// Parses `[sign] [coef] name` sequences; a missing coefficient means 1.
fn parse_terms(tokens: &[&str], line: usize) -> Result<Vec<(String, f64)>> {
    let err = |msg: String| Error::Parse { line, msg };
    let mut out = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let mut sign = 1.0;
        if tokens[i] == "+" || tokens[i] == "-" {
            sign = if tokens[i] == "-" { -1.0 } else { 1.0 };
            i += 1;
        }
        let tok = *tokens.get(i).ok_or_else(|| err("dangling sign".into()))?;
        if let Ok(c) = tok.parse::<f64>() {
            i += 1;
            match tokens.get(i) {
                Some(name) => {
                    out.push((name.to_string(), sign * c));
                    i += 1;
                }
                // a lone constant (e.g. an empty objective "0")
                None if c == 0.0 => {}
                None => return Err(err(format!("coefficient {tok} without a variable"))),
            }
        } else {
            out.push((tok.to_string(), sign));
            i += 1;
        }
    }
    Ok(out)
}

pub fn parse_lp(text: &str) -> Result<ParsedLp> {
    let mut parsed = ParsedLp::default();
    let mut section = Section::Preamble;
    // (first line, tokens) of the statement being accumulated
    let mut pending: Option<(usize, Vec<String>)> = None;

    let flush = |pending: &mut Option<(usize, Vec<String>)>, section: Section, parsed: &mut ParsedLp| -> Result<()> {
        let Some((line, toks)) = pending.take() else { return Ok(()) };
        let toks: Vec<&str> = toks.iter().map(String::as_str).collect();
        let (name, body) = match toks.first() {
            Some(t) if t.ends_with(':') => (t.trim_end_matches(':').to_string(), &toks[1..]),
            _ => (String::new(), &toks[..]),
        };
        match section {
            Section::Objective => parsed.objective = parse_terms(body, line)?,
            Section::Constraints => {
                let at = body
                    .iter()
                    .position(|t| matches!(*t, "<=" | ">=" | "=" | "=<" | "=>"))
                    .ok_or(Error::Parse { line, msg: "constraint without a sense".into() })?;
                let rhs = body
                    .get(at + 1)
                    .and_then(|t| t.parse::<f64>().ok())
                    .ok_or(Error::Parse { line, msg: "constraint without a numeric right-hand side".into() })?;
                parsed.constraints.push(ParsedConstraint {
                    name,
                    terms: parse_terms(&body[..at], line)?,
                    sense: body[at].to_string(),
                    rhs,
                });
            }
            _ => {}
        }
        Ok(())
    };

    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let content = raw.split('\\').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let header = match content.to_ascii_lowercase().as_str() {
            "minimize" | "minimum" | "min" => Some(Section::Objective),
            "subject to" | "such that" | "st" | "s.t." => Some(Section::Constraints),
            "bounds" => Some(Section::Bounds),
            "binary" | "binaries" | "bin" => Some(Section::Binary),
            "end" => Some(Section::End),
            _ => None,
        };
        if let Some(next) = header {
            flush(&mut pending, section, &mut parsed)?;
            section = next;
            continue;
        }
        let toks: Vec<String> = content.split_whitespace().map(str::to_string).collect();
        match section {
            Section::Preamble | Section::End => {
                return Err(Error::Parse { line, msg: format!("unexpected text {content:?}") });
            }
            Section::Objective | Section::Constraints => {
                let starts_statement = toks[0].ends_with(':');
                if starts_statement {
                    flush(&mut pending, section, &mut parsed)?;
                }
                match &mut pending {
                    Some((_, acc)) => acc.extend(toks),
                    None => pending = Some((line, toks)),
                }
            }
            Section::Bounds => {
                let t: Vec<&str> = toks.iter().map(String::as_str).collect();
                let num = |s: &str| {
                    s.parse::<f64>().map_err(|_| Error::Parse { line, msg: format!("bad bound value {s:?}") })
                };
                match t.as_slice() {
                    [lo, "<=", name, "<=", hi] => parsed.bounds.push((name.to_string(), num(lo)?, num(hi)?)),
                    _ => return Err(Error::Parse { line, msg: format!("unsupported bound {content:?}") }),
                }
            }
            Section::Binary => parsed.binaries.extend(toks),
        }
    }
    flush(&mut pending, section, &mut parsed)?;
    if section != Section::End {
        return Err(Error::Parse { line: text.lines().count(), msg: "missing End".into() });
    }
    Ok(parsed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::build_complex;
    use crate::cost::CostVector;
    use crate::milp::{build_model1, build_model2, CoverageSense};

    #[test]
    fn round_trip_model2() {
        let k = build_complex(&[vec![0, 1, 2], vec![1, 2, 3]]).unwrap();
        let n = k.model2_variable_pairs().len();
        let costs = CostVector { costs: (0..n).map(|j| j as f64 * 0.125 - 0.5).collect(), alpha: None, beta: None };
        let inst = build_model2(&k, &costs).unwrap();
        let text = export_lp(&inst);
        assert!(text.contains("Minimize") && text.contains("Subject To") && text.ends_with("End\n"));
        let p = parse_lp(&text).unwrap();
        assert_eq!(p.binaries, inst.var_names);
        assert_eq!(p.bounds.len(), n);
        let obj: Vec<f64> =
            inst.var_names.iter().map(|v| p.objective.iter().find(|(n, _)| n == v).map_or(0.0, |t| t.1)).collect();
        assert_eq!(obj, costs.costs);
        assert_eq!(p.constraints.len(), inst.eq_rows.len() + inst.le_rows.len());
        for (c, r) in p.constraints.iter().zip(inst.eq_rows.iter().chain(&inst.le_rows)) {
            assert_eq!(c.name, r.name);
            assert_eq!(c.rhs, r.rhs);
            let want: Vec<(String, f64)> = r.coeffs.iter().map(|&(j, a)| (inst.var_names[j].clone(), a)).collect();
            assert_eq!(c.terms, want);
        }
    }

    #[test]
    fn round_trip_model1_negative_rows() {
        let k = build_complex(&[vec![0, 1, 2]]).unwrap();
        let n = k.model1_variable_pairs().len();
        let inst = build_model1(
            &k,
            &CostVector { costs: vec![-0.25; n], alpha: Some(0.5), beta: Some(0.5) },
            CoverageSense::AtLeast,
        )
        .unwrap();
        let p = parse_lp(&export_lp(&inst)).unwrap();
        let cover = &p.constraints[0];
        assert_eq!(cover.rhs, -1.0);
        assert!(cover.terms.iter().all(|t| t.1 == -1.0));
    }

    #[test]
    fn parse_errors() {
        assert!(parse_lp("Minimize\n obj: x\nSubject To\n c: x + y\nEnd\n").is_err());
        assert!(parse_lp("Minimize\n obj: x\n").is_err());
        let p = parse_lp("Minimize\n obj: x - 2 y\nSubject To\n c: x + y >= 1\nEnd\n").unwrap();
        assert_eq!(p.objective, vec![("x".into(), 1.0), ("y".into(), -2.0)]);
    }
}
