//! Pure metric computations over a completed run log.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::{BenchError, RecordStatus, RunRecord};

#[derive(Debug, Clone)]
pub struct MetricsOptions {
    pub block_size: usize,
    /// Approach whose plan length annotates difficulty. Defaults to the first
    /// approach that used no tokens (a classical planner).
    pub difficulty_key: Option<String>,
    /// Approaches in the co-solved comparison. Defaults to all.
    pub compare: Option<Vec<String>>,
}

impl Default for MetricsOptions {
    fn default() -> Self {
        MetricsOptions {
            block_size: 10,
            difficulty_key: None,
            compare: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApproachSummary {
    pub approach: String,
    pub total: usize,
    pub solved: usize,
    pub timeout: usize,
    pub early_exit: usize,
    pub harness_error: usize,
    /// Percent of all instances.
    pub success_rate: f64,
    pub tokens_total: u64,
    pub tokens_per_run: f64,
    pub tokens_per_solution: Option<f64>,
    pub tokens_estimated: bool,
    pub median_attempts_solved: Option<f64>,
    pub median_attempts_failed: Option<f64>,
    pub failed_action_attempts: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockRow {
    pub label: String,
    pub n: usize,
    /// Mean plan length per compared approach; `None` when `n` is zero.
    pub means: Vec<Option<f64>>,
    /// First mean minus second, present only for two-approach tables.
    pub delta: Option<f64>,
}

/// Mean plan lengths by difficulty block over instances solved by every
/// listed approach.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanLengthTable {
    pub approaches: Vec<String>,
    pub co_solved: Vec<usize>,
    pub rows: Vec<BlockRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DifficultyRow {
    pub label: String,
    pub instances: usize,
    pub solved: usize,
    pub mean_plan_length: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub instance_count: usize,
    pub approaches: Vec<String>,
    pub summaries: Vec<ApproachSummary>,
    pub difficulty_key: Option<String>,
    pub difficulty: Vec<DifficultyRow>,
    pub co_solved: PlanLengthTable,
    pub harness_errors_excluded: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairwiseSolves {
    pub a: String,
    pub b: String,
    pub only_a: Vec<usize>,
    pub only_b: Vec<usize>,
    pub both: Vec<usize>,
    pub neither: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HardCaseReport {
    pub hard_set: Vec<usize>,
    pub solved: BTreeMap<String, Vec<usize>>,
    pub unsolved: BTreeMap<String, Vec<usize>>,
    pub pairs: Vec<PairwiseSolves>,
}

/// Median of a sample; the mean of the two middle values for even sizes.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[m] } else { (v[m - 1] + v[m]) / 2.0 })
}

/// Checked view of a record set as an instance x approach grid.
struct Grid<'a> {
    instances: Vec<usize>,
    approaches: Vec<String>,
    cell: BTreeMap<(usize, &'a str), &'a RunRecord>,
}

impl<'a> Grid<'a> {
    fn new(records: &'a [RunRecord]) -> Result<Self, BenchError> {
        let mut approaches: Vec<String> = Vec::new();
        let mut cell = BTreeMap::new();
        for r in records {
            if !approaches.contains(&r.approach) {
                approaches.push(r.approach.clone());
            }
            if r.solved() != r.plan_length.is_some() {
                return Err(BenchError::Inconsistent {
                    instance: r.instance,
                    approach: r.approach.clone(),
                    message: "plan_length must be present exactly for solved runs".into(),
                });
            }
            if cell.insert((r.instance, r.approach.as_str()), r).is_some() {
                return Err(BenchError::DuplicateRecord(r.instance, r.approach.clone()));
            }
        }
        let instances: Vec<usize> = records.iter().map(|r| r.instance).collect::<BTreeSet<_>>().into_iter().collect();
        let missing: Vec<(usize, String)> = instances
            .iter()
            .flat_map(|&i| approaches.iter().map(move |a| (i, a)))
            .filter(|(i, a)| !cell.contains_key(&(*i, a.as_str())))
            .map(|(i, a)| (i, a.clone()))
            .collect();
        if !missing.is_empty() {
            return Err(BenchError::NonRectangularGrid { missing });
        }
        Ok(Grid {
            instances,
            approaches,
            cell,
        })
    }

    fn get(&self, instance: usize, approach: &str) -> &'a RunRecord {
        self.cell[&(instance, approach)]
    }

    fn solved_set(&self, approach: &str) -> BTreeSet<usize> {
        self.instances
            .iter()
            .copied()
            .filter(|&i| self.get(i, approach).solved())
            .collect()
    }

    fn check_approach(&self, a: &str) -> Result<(), BenchError> {
        if self.approaches.iter().any(|x| x == a) {
            Ok(())
        } else {
            Err(BenchError::UnknownApproach(a.to_string()))
        }
    }

    /// Consecutive runs of `size` instances in suite order.
    fn blocks(&self, size: usize) -> Vec<(String, &[usize])> {
        assert!(size > 0, "block size must be positive");
        self.instances
            .chunks(size)
            .enumerate()
            .map(|(k, chunk)| (format!("{}-{}", k * size, k * size + chunk.len()), chunk))
            .collect()
    }
}

fn summarise(grid: &Grid, approach: &str) -> ApproachSummary {
    let records: Vec<&RunRecord> = grid.instances.iter().map(|&i| grid.get(i, approach)).collect();
    let count = |s| records.iter().filter(|r| r.status == s).count();
    let total = records.len();
    let solved = count(RecordStatus::Solved);
    let tokens_total: u64 = records.iter().map(|r| r.tokens()).sum();
    let attempts = |want_solved: bool| -> Vec<f64> {
        records
            .iter()
            .filter(|r| r.status != RecordStatus::HarnessError && r.solved() == want_solved)
            .map(|r| r.attempts as f64)
            .collect()
    };
    ApproachSummary {
        approach: approach.to_string(),
        total,
        solved,
        timeout: count(RecordStatus::Timeout),
        early_exit: count(RecordStatus::EarlyExit),
        harness_error: count(RecordStatus::HarnessError),
        success_rate: if total == 0 { 0.0 } else { 100.0 * solved as f64 / total as f64 },
        tokens_total,
        tokens_per_run: if total == 0 { 0.0 } else { tokens_total as f64 / total as f64 },
        tokens_per_solution: (solved > 0).then(|| tokens_total as f64 / solved as f64),
        tokens_estimated: records.iter().any(|r| r.tokens_estimated),
        median_attempts_solved: median(&attempts(true)),
        median_attempts_failed: median(&attempts(false)),
        failed_action_attempts: records.iter().map(|r| r.failed_action_attempts as u64).sum(),
    }
}

fn mean(values: impl Iterator<Item = usize>) -> Option<f64> {
    let (sum, n) = values.fold((0usize, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum as f64 / n as f64)
}

fn table_from_grid(grid: &Grid, approaches: &[String], block_size: usize) -> Result<PlanLengthTable, BenchError> {
    for a in approaches {
        grid.check_approach(a)?;
    }
    let co: BTreeSet<usize> = approaches
        .iter()
        .map(|a| grid.solved_set(a))
        .reduce(|x, y| &x & &y)
        .unwrap_or_default();
    let rows = grid
        .blocks(block_size)
        .into_iter()
        .map(|(label, chunk)| {
            let members: Vec<usize> = chunk.iter().copied().filter(|i| co.contains(i)).collect();
            let means: Vec<Option<f64>> = approaches
                .iter()
                .map(|a| mean(members.iter().map(|&i| grid.get(i, a).plan_length.expect("solved"))))
                .collect();
            let delta = match means.as_slice() {
                [Some(x), Some(y)] => Some(x - y),
                _ => None,
            };
            BlockRow {
                label,
                n: members.len(),
                means,
                delta,
            }
        })
        .collect();
    Ok(PlanLengthTable {
        approaches: approaches.to_vec(),
        co_solved: co.into_iter().collect(),
        rows,
    })
}

/// Block table restricted to instances solved by every approach in `approaches`.
pub fn plan_length_table(
    records: &[RunRecord],
    approaches: &[String],
    block_size: usize,
) -> Result<PlanLengthTable, BenchError> {
    let grid = Grid::new(records)?;
    table_from_grid(&grid, approaches, block_size)
}

pub fn compute_metrics(records: &[RunRecord], opts: &MetricsOptions) -> Result<SuiteReport, BenchError> {
    let grid = Grid::new(records)?;
    let errors = records.iter().filter(|r| r.status == RecordStatus::HarnessError).count();
    if errors > 0 {
        log::warn!("{errors} harness_error records excluded from metrics");
    }
    let summaries: Vec<ApproachSummary> = grid.approaches.iter().map(|a| summarise(&grid, a)).collect();

    let difficulty_key = match &opts.difficulty_key {
        Some(k) => {
            grid.check_approach(k)?;
            Some(k.clone())
        }
        None => summaries.iter().find(|s| s.tokens_total == 0).map(|s| s.approach.clone()),
    };
    let difficulty = grid
        .blocks(opts.block_size)
        .into_iter()
        .map(|(label, chunk)| {
            let lengths: Vec<usize> = match &difficulty_key {
                Some(k) => chunk.iter().filter_map(|&i| grid.get(i, k).plan_length).collect(),
                None => Vec::new(),
            };
            DifficultyRow {
                label,
                instances: chunk.len(),
                solved: lengths.len(),
                mean_plan_length: mean(lengths.into_iter()),
            }
        })
        .collect();

    let compare = opts.compare.clone().unwrap_or_else(|| grid.approaches.clone());
    let co_solved = table_from_grid(&grid, &compare, opts.block_size)?;

    Ok(SuiteReport {
        instance_count: grid.instances.len(),
        approaches: grid.approaches.clone(),
        summaries,
        difficulty_key,
        difficulty,
        co_solved,
        harness_errors_excluded: errors,
    })
}

/// Instances that none of `approaches` solved.
pub fn unsolved_by_all(records: &[RunRecord], approaches: &[String]) -> Result<Vec<usize>, BenchError> {
    let grid = Grid::new(records)?;
    for a in approaches {
        grid.check_approach(a)?;
    }
    Ok(grid
        .instances
        .iter()
        .copied()
        .filter(|&i| approaches.iter().all(|a| !grid.get(i, a).solved()))
        .collect())
}

/// Who solved what inside `hard_set`, and pairwise unique solves.
pub fn hard_case_analysis(records: &[RunRecord], hard_set: &[usize]) -> Result<HardCaseReport, BenchError> {
    let grid = Grid::new(records)?;
    let hard: BTreeSet<usize> = hard_set.iter().copied().collect();
    if let Some(&bad) = hard.iter().find(|i| grid.instances.binary_search(i).is_err()) {
        return Err(BenchError::UnknownInstance(bad));
    }
    let solved: BTreeMap<String, BTreeSet<usize>> = grid
        .approaches
        .iter()
        .map(|a| (a.clone(), &grid.solved_set(a) & &hard))
        .collect();
    let vec = |s: &BTreeSet<usize>| s.iter().copied().collect::<Vec<_>>();
    let mut pairs = Vec::new();
    for (x, a) in grid.approaches.iter().enumerate() {
        for b in &grid.approaches[x + 1..] {
            let (sa, sb) = (&solved[a], &solved[b]);
            let either = sa | sb;
            pairs.push(PairwiseSolves {
                a: a.clone(),
                b: b.clone(),
                only_a: vec(&(sa - sb)),
                only_b: vec(&(sb - sa)),
                both: vec(&(sa & sb)),
                neither: vec(&(&hard - &either)),
            });
        }
    }
    Ok(HardCaseReport {
        hard_set: vec(&hard),
        unsolved: solved.iter().map(|(a, s)| (a.clone(), vec(&(&hard - s)))).collect(),
        solved: solved.iter().map(|(a, s)| (a.clone(), vec(s))).collect(),
        pairs,
    })
}

impl HardCaseReport {
    pub fn pair(&self, a: &str, b: &str) -> Option<&PairwiseSolves> {
        self.pairs.iter().find(|p| p.a == a && p.b == b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(instance: usize, approach: &str, status: RecordStatus, len: Option<usize>, tokens: u64) -> RunRecord {
        RunRecord {
            instance,
            name: format!("p{instance}"),
            approach: approach.into(),
            status,
            plan_length: len,
            wall_time_s: 1.0,
            tokens_in: tokens,
            tokens_out: 0,
            attempts: 1,
            failed_action_attempts: 0,
            tokens_estimated: false,
            error: None,
            timestamp: None,
            extra: Default::default(),
        }
    }

    use RecordStatus::*;

    #[test]
    fn all_solved_grid() {
        let records: Vec<RunRecord> = (0..25)
            .flat_map(|i| ["x", "y"].map(|a| rec(i, a, Solved, Some(i + 1), 0)))
            .collect();
        let r = compute_metrics(&records, &MetricsOptions::default()).unwrap();
        assert!(r.summaries.iter().all(|s| s.success_rate == 100.0));
        assert_eq!(r.co_solved.co_solved.len(), 25);
        let labels: Vec<&str> = r.co_solved.rows.iter().map(|b| b.label.as_str()).collect();
        assert_eq!(labels, ["0-10", "10-20", "20-25"]);
        assert_eq!(r.co_solved.rows[2].means[0], Some(23.0));
        assert_eq!(r.co_solved.rows[0].delta, Some(0.0));
        assert_eq!(r.difficulty_key.as_deref(), Some("x"));
    }

    #[test]
    fn missing_pairs_are_reported() {
        let records = vec![rec(0, "x", Solved, Some(1), 0), rec(0, "y", Timeout, None, 0), rec(1, "x", Timeout, None, 0)];
        match compute_metrics(&records, &MetricsOptions::default()) {
            Err(BenchError::NonRectangularGrid { missing }) => assert_eq!(missing, vec![(1, "y".to_string())]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn inconsistent_and_duplicate_records() {
        let bad = vec![rec(0, "x", Timeout, Some(3), 0)];
        assert!(matches!(compute_metrics(&bad, &Default::default()), Err(BenchError::Inconsistent { .. })));
        let dup = vec![rec(0, "x", Timeout, None, 0), rec(0, "x", Timeout, None, 0)];
        assert!(matches!(compute_metrics(&dup, &Default::default()), Err(BenchError::DuplicateRecord(0, _))));
    }

    #[test]
    fn harness_errors_count_but_never_solve() {
        let records = vec![
            rec(0, "x", Solved, Some(4), 10),
            rec(0, "y", HarnessError, None, 0),
            rec(1, "x", EarlyExit, None, 20),
            rec(1, "y", Solved, Some(2), 0),
        ];
        let r = compute_metrics(&records, &MetricsOptions::default()).unwrap();
        let y = &r.summaries[1];
        assert_eq!((y.solved, y.harness_error, y.total), (1, 1, 2));
        assert_eq!(r.harness_errors_excluded, 1);
        assert!(r.co_solved.co_solved.is_empty());
        assert_eq!(r.summaries[0].tokens_per_solution, Some(30.0));
        assert_eq!(r.difficulty_key.as_deref(), Some("y"));
    }

    #[test]
    fn hard_cases() {
        let records = vec![
            rec(0, "a", Solved, Some(1), 0),
            rec(0, "b", Timeout, None, 0),
            rec(1, "a", Timeout, None, 0),
            rec(1, "b", Timeout, None, 0),
        ];
        let h = hard_case_analysis(&records, &[0, 1]).unwrap();
        let p = h.pair("a", "b").unwrap();
        assert_eq!((p.only_a.as_slice(), p.only_b.as_slice(), p.neither.as_slice()), (&[0][..], &[][..], &[1][..]));
        let e = hard_case_analysis(&records, &[]).unwrap();
        assert!(e.solved.values().all(Vec::is_empty));
        assert!(matches!(hard_case_analysis(&records, &[7]), Err(BenchError::UnknownInstance(7))));
        assert_eq!(unsolved_by_all(&records, &["a".into(), "b".into()]).unwrap(), vec![1]);
    }

    #[test]
    fn medians() {
        assert_eq!(median(&[]), None);
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), Some(2.5));
    }
}
