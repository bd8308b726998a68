//! Per-problem comparison of two result sets.

use std::fmt::Write as _;

use crate::error::{RdeError, Result};
use crate::stats::{summarize, wilcoxon_rank_sum, wtl_table, Summary, Verdict, WinTieLoss};

use super::{group_errors, RunRecord};

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub problem: String,
    pub a: Summary,
    pub b: Summary,
    /// From the perspective of `a`.
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub alpha: f64,
    pub rows: Vec<ComparisonRow>,
    pub wtl: WinTieLoss,
}

/// Compares result set `a` against `b` problem by problem, in `a`'s order.
/// Both sets must cover exactly the same problems.
pub fn compare(a: &[RunRecord], b: &[RunRecord], alpha: f64) -> Result<Comparison> {
    let ga = group_errors(a);
    let gb = group_errors(b);
    let mut names_a: Vec<&str> = ga.iter().map(|(p, _)| p.as_str()).collect();
    let mut names_b: Vec<&str> = gb.iter().map(|(p, _)| p.as_str()).collect();
    names_a.sort_unstable();
    names_b.sort_unstable();
    if names_a != names_b {
        return Err(RdeError::config(format!(
            "problem sets differ: [{}] vs [{}]",
            names_a.join(", "),
            names_b.join(", ")
        )));
    }
    let mut rows = Vec::with_capacity(ga.len());
    for (problem, ea) in &ga {
        let eb = &gb.iter().find(|(p, _)| p == problem).expect("same problem set").1;
        rows.push(ComparisonRow {
            problem: problem.clone(),
            a: summarize(ea)?,
            b: summarize(eb)?,
            verdict: wilcoxon_rank_sum(ea, eb, alpha)?,
        });
    }
    let verdicts: Vec<Verdict> = rows.iter().map(|r| r.verdict).collect();
    Ok(Comparison {
        alpha,
        wtl: wtl_table(&verdicts),
        rows,
    })
}

/// C-style scientific notation with two decimals, e.g. `2.16E+01`.
pub fn sci(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    let s = format!("{v:.2E}");
    let (mantissa, exp) = s.split_once('E').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}E{sign}{:02}", exp.abs())
}

impl Comparison {
    pub fn to_csv(&self, label_a: &str, label_b: &str) -> String {
        let mut out = format!("problem,mean_{label_a},sd_{label_a},mean_{label_b},sd_{label_b},verdict\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{:e},{:e},{:e},{:e},{}",
                r.problem, r.a.mean, r.a.sd, r.b.mean, r.b.sd, r.verdict.symbol()
            );
        }
        let _ = writeln!(out, "W/T/L,,,,,{}", self.wtl);
        out
    }

    pub fn to_text(&self, label_a: &str, label_b: &str) -> String {
        let header = [
            "problem".to_string(),
            format!("{label_a} mean"),
            format!("{label_a} sd"),
            format!("{label_b} mean"),
            format!("{label_b} sd"),
            String::new(),
        ];
        let mut table: Vec<[String; 6]> = vec![header];
        for r in &self.rows {
            table.push([
                r.problem.clone(),
                sci(r.a.mean),
                sci(r.a.sd),
                sci(r.b.mean),
                sci(r.b.sd),
                r.verdict.symbol().to_string(),
            ]);
        }
        table.push([
            "W/T/L".to_string(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            self.wtl.to_string(),
        ]);
        let mut widths = [0usize; 6];
        for row in &table {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.len());
            }
        }
        let mut out = String::new();
        for row in &table {
            let mut line = format!("{:<w$}", row[0], w = widths[0]);
            for (cell, w) in row.iter().zip(widths).skip(1) {
                let _ = write!(line, "  {cell:>w$}");
            }
            out.push_str(line.trim_end());
            out.push('\n');
        }
        out
    }
}
