//! Instance and solution text formats.
//!
//! Instance files: the first meaningful line is the target; every later
//! line holds whitespace-separated elements. Lines starting with `#` and
//! blank lines are ignored.

use std::fmt::Write as _;

use bsm_core::{Instance, InstanceError, Solution, SolutionSet};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("line {line}: `{token}` is not an integer")]
    Malformed { line: usize, token: String },
    #[error("line {line}: expected a single target value")]
    TargetLine { line: usize },
    #[error("line {line}: {value} is not a positive integer")]
    NotPositive { line: usize, value: i128 },
    #[error("missing target line")]
    MissingTarget,
    #[error(transparent)]
    Domain(#[from] InstanceError),
}

fn parse_token(token: &str, line: usize) -> Result<u64, FormatError> {
    let value: i128 = token.parse().map_err(|_| FormatError::Malformed { line, token: token.to_string() })?;
    if value < 1 {
        return Err(FormatError::NotPositive { line, value });
    }
    u64::try_from(value).map_err(|_| FormatError::Malformed { line, token: token.to_string() })
}

pub fn parse_instance(text: &str) -> Result<Instance, FormatError> {
    let mut target = None;
    let mut elements = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let mut tokens = content.split_whitespace();
        if target.is_none() {
            let first = tokens.next().expect("non-empty line");
            let value = parse_token(first, line)?;
            if tokens.next().is_some() {
                return Err(FormatError::TargetLine { line });
            }
            target = Some(value);
            continue;
        }
        for token in tokens {
            elements.push(parse_token(token, line)?);
        }
    }
    let target = target.ok_or(FormatError::MissingTarget)?;
    Ok(Instance::new(elements, target)?)
}

pub fn write_instance(instance: &Instance) -> String {
    let mut out = format!("{}\n", instance.target());
    let elements: Vec<String> = instance.elements().iter().map(u64::to_string).collect();
    out.push_str(&elements.join(" "));
    out.push('\n');
    out
}

fn solution_line(out: &mut String, solution: &Solution, realizations: Option<&Instance>) {
    write!(out, "{solution}").unwrap();
    if let Some(instance) = realizations {
        write!(out, " # realizations {}", solution.realizations(instance)).unwrap();
    }
    out.push('\n');
}

/// One solution per line, values ascending and repeats written out. With
/// `realizations`, each line also carries the number of index subsets of
/// the instance that produce it.
pub fn write_solutions(set: &SolutionSet, realizations: Option<&Instance>) -> String {
    let mut out = String::new();
    for solution in set.iter() {
        solution_line(&mut out, solution, realizations);
    }
    out
}

/// The optimize-mode report: the solution line, then `deviation <d>`.
pub fn write_optimum(solution: &Solution, deviation: u64, realizations: Option<&Instance>) -> String {
    let mut out = String::new();
    solution_line(&mut out, solution, realizations);
    writeln!(out, "deviation {deviation}").unwrap();
    out
}
