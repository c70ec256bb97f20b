//! Plain-text rendering of metric reports. The structured form is the
//! report itself, serialised with serde.

use std::fmt::Write;

use super::metrics::{HardCaseReport, PlanLengthTable, SuiteReport};

/// Align columns: the first left-aligned, the rest right-aligned.
fn grid(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in rows {
        let cells: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(c, s)| {
                if c == 0 {
                    format!("{s:<w$}", w = widths[c])
                } else {
                    format!("{s:>w$}", w = widths[c])
                }
            })
            .collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
    }
    out
}

fn thousands(n: f64) -> String {
    let digits = format!("{:.0}", n);
    let (sign, digits) = digits.strip_prefix('-').map_or(("", digits.as_str()), |d| ("-", d));
    let mut out = String::new();
    for (i, ch) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i) % 3 == 0 {
            out.push(',');
        }
        out.push(ch);
    }
    format!("{sign}{out}")
}

fn one_decimal(v: Option<f64>) -> String {
    v.map_or_else(|| "---".to_string(), |x| format!("{x:.1}"))
}

pub fn render_plan_length_table(t: &PlanLengthTable) -> String {
    let mut header = vec!["Block".to_string(), "n".to_string()];
    header.extend(t.approaches.iter().cloned());
    let two = t.approaches.len() == 2;
    if two {
        header.push("Δ".into());
    }
    let mut rows = vec![header];
    for r in &t.rows {
        let mut row = vec![r.label.clone(), r.n.to_string()];
        row.extend(r.means.iter().map(|m| one_decimal(*m)));
        if two {
            row.push(one_decimal(r.delta));
        }
        rows.push(row);
    }
    grid(&rows)
}

pub fn render_report(report: &SuiteReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "Instances: {}", report.instance_count);

    let any_errors = report.summaries.iter().any(|s| s.harness_error > 0);
    let mut header = vec!["Approach", "Solved", "Timeout", "Early exit"];
    if any_errors {
        header.push("Harness error");
    }
    let mut rows = vec![header.into_iter().map(String::from).collect::<Vec<_>>()];
    for s in &report.summaries {
        let mut row = vec![
            s.approach.clone(),
            format!("{} ({:.1}%)", s.solved, s.success_rate),
            s.timeout.to_string(),
            s.early_exit.to_string(),
        ];
        if any_errors {
            row.push(s.harness_error.to_string());
        }
        rows.push(row);
    }
    let _ = write!(out, "\nOutcomes\n{}", grid(&rows));

    let costly: Vec<_> = report.summaries.iter().filter(|s| s.tokens_total > 0).collect();
    let mut rows = vec![vec!["Approach".to_string(), "Tokens/run".into(), "Tokens/solution".into()]];
    for s in &costly {
        let est = if s.tokens_estimated { " (est.)" } else { "" };
        rows.push(vec![
            format!("{}{est}", s.approach),
            thousands(s.tokens_per_run),
            s.tokens_per_solution.map_or("---".into(), thousands),
        ]);
    }
    let _ = write!(out, "\nToken cost\n{}", grid(&rows));
    if let [a, b] = costly.as_slice() {
        let per_solution = match (a.tokens_per_solution, b.tokens_per_solution) {
            (Some(x), Some(y)) => format!(", {:.2}x per solution", y / x),
            _ => String::new(),
        };
        let _ = writeln!(
            out,
            "{} / {}: {:.2}x per run{per_solution}",
            b.approach,
            a.approach,
            b.tokens_per_run / a.tokens_per_run
        );
    }

    let mut rows = vec![vec!["Approach".to_string(), "Solved".into(), "Failed".into()]];
    for s in &report.summaries {
        rows.push(vec![
            s.approach.clone(),
            one_decimal(s.median_attempts_solved),
            one_decimal(s.median_attempts_failed),
        ]);
    }
    let _ = write!(out, "\nMedian attempts\n{}", grid(&rows));

    let key = report.difficulty_key.as_deref().unwrap_or("none");
    let mut rows = vec![vec!["Block".to_string(), "Instances".into(), "Solved".into(), "Mean length".into()]];
    for d in &report.difficulty {
        rows.push(vec![
            d.label.clone(),
            d.instances.to_string(),
            d.solved.to_string(),
            one_decimal(d.mean_plan_length),
        ]);
    }
    let _ = write!(out, "\nDifficulty proxy ({key} plan length)\n{}", grid(&rows));

    let _ = write!(
        out,
        "\nPlan length on co-solved instances (n = {})\n{}",
        report.co_solved.co_solved.len(),
        render_plan_length_table(&report.co_solved)
    );
    if report.harness_errors_excluded > 0 {
        let _ = writeln!(out, "\n{} harness_error records excluded", report.harness_errors_excluded);
    }
    out
}

pub fn render_hard_cases(h: &HardCaseReport) -> String {
    let list = |v: &[usize]| {
        if v.is_empty() {
            "{}".to_string()
        } else {
            format!("{{{}}}", v.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "))
        }
    };
    let mut out = format!("Hard set ({} instances): {}\n", h.hard_set.len(), list(&h.hard_set));
    for (a, s) in &h.solved {
        let _ = writeln!(out, "{a}: solved {}", list(s));
    }
    for p in &h.pairs {
        let _ = writeln!(
            out,
            "{} vs {}: only {} {}, only {} {}, both {}, neither {}",
            p.a,
            p.b,
            p.a,
            list(&p.only_a),
            p.b,
            list(&p.only_b),
            list(&p.both),
            list(&p.neither)
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::{compute_metrics, MetricsOptions};

    #[test]
    fn empty_report_is_headers_only() {
        let r = compute_metrics(&[], &MetricsOptions::default()).unwrap();
        let text = render_report(&r);
        assert!(text.starts_with("Instances: 0\n"));
        assert!(text.contains("Outcomes\nApproach  Solved  Timeout  Early exit\n"));
        assert!(!text.contains("harness_error"));
    }

    #[test]
    fn number_formatting() {
        assert_eq!(thousands(28488.48), "28,488");
        assert_eq!(thousands(254796.0), "254,796");
        assert_eq!(thousands(999.0), "999");
        assert_eq!(one_decimal(Some(109.333)), "109.3");
        assert_eq!(one_decimal(None), "---");
    }
}
