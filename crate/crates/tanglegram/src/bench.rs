//! Benchmark runner: solve instance batches with a set of algorithms,
//! recompute every crossing count from the returned orientation, score
//! against the exact optimum (or the incumbent when the time limit cut
//! the proof short) and emit schema-stable CSV.

use std::time::{Duration, Instant};

use crate::crossings::count_crossings;
use crate::exact::{brute_force, solve_exact};
use crate::hierarchy::hierarchy_sort;
use crate::recursive::{rec_split, rec_split_bb, rec_split_improved};
use crate::tangle::{Orientation, Tanglegram};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    RecSplit,
    RecSplitImproved,
    RecSplitBb,
    HierarchySort,
    Exact,
    Brute,
}

impl Algorithm {
    /// The five standard benchmark algorithms; the brute-force oracle is
    /// opt-in.
    pub const DEFAULT: [Algorithm; 5] = [
        Algorithm::RecSplit,
        Algorithm::RecSplitImproved,
        Algorithm::RecSplitBb,
        Algorithm::HierarchySort,
        Algorithm::Exact,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::RecSplit => "rec-split",
            Algorithm::RecSplitImproved => "rec-split-improved",
            Algorithm::RecSplitBb => "rec-split-bb",
            Algorithm::HierarchySort => "hierarchy-sort",
            Algorithm::Exact => "exact",
            Algorithm::Brute => "brute",
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rec-split" => Ok(Algorithm::RecSplit),
            "rec-split-improved" => Ok(Algorithm::RecSplitImproved),
            "rec-split-bb" => Ok(Algorithm::RecSplitBb),
            "hierarchy-sort" => Ok(Algorithm::HierarchySort),
            "exact" => Ok(Algorithm::Exact),
            "brute" => Ok(Algorithm::Brute),
            other => Err(format!(
                "unknown algorithm `{other}` (expected rec-split, rec-split-improved, \
                 rec-split-bb, hierarchy-sort, exact or brute)"
            )),
        }
    }
}

/// Shifted ratio `(c_i + 1) / (c_opt + 1)`, defined for crossing-free
/// optima as well.
pub fn performance_ratio(crossings: u64, optimum: u64) -> f64 {
    (crossings as f64 + 1.0) / (optimum as f64 + 1.0)
}

/// One instance queued for benchmarking.
#[derive(Debug, Clone)]
pub struct BenchInstance {
    pub id: String,
    pub set: String,
    pub n: usize,
    pub seed: u64,
    pub tanglegram: Tanglegram,
}

/// One instance-algorithm result row.
#[derive(Debug, Clone)]
pub struct BenchRecord {
    pub instance: String,
    pub set: String,
    pub n: usize,
    pub algorithm: &'static str,
    pub crossings: u64,
    pub c_opt: u64,
    pub proved_optimal: bool,
    pub ratio: f64,
    pub time_ms: f64,
    pub seed: u64,
}

pub const CSV_HEADER: &str =
    "instance,set,n,algorithm,crossings,c_opt,proved_optimal,ratio,time_ms,seed";

/// Run an orientation-producing algorithm, timing only the solve.
pub fn run_algorithm(
    algo: Algorithm,
    t: &Tanglegram,
    time_limit: Duration,
    warm_start: Option<&Orientation>,
) -> (Orientation, Duration, Option<bool>) {
    let start = Instant::now();
    match algo {
        Algorithm::RecSplit => {
            let r = rec_split(t);
            (r.orientation, start.elapsed(), None)
        }
        Algorithm::RecSplitImproved => {
            let r = rec_split_improved(t);
            (r.orientation, start.elapsed(), None)
        }
        Algorithm::RecSplitBb => {
            let r = rec_split_bb(t);
            (r.orientation, start.elapsed(), None)
        }
        Algorithm::HierarchySort => {
            let r = hierarchy_sort(t);
            (r.orientation, start.elapsed(), None)
        }
        Algorithm::Exact => {
            let r = solve_exact(t, Some(time_limit), warm_start);
            (r.orientation, start.elapsed(), Some(r.proved_optimal))
        }
        Algorithm::Brute => {
            let r = brute_force(t).expect("instance within the brute-force cap");
            (r.orientation, start.elapsed(), Some(true))
        }
    }
}

/// Solve every instance with every algorithm. The reference optimum is
/// always taken from the exact solver (seeded with the branch-and-bound
/// heuristic layout); `proved_optimal` is false on rows whose reference
/// is only an incumbent.
pub fn run_benchmark(
    instances: &[BenchInstance],
    algorithms: &[Algorithm],
    time_limit: Duration,
) -> Vec<BenchRecord> {
    let mut records = Vec::with_capacity(instances.len() * algorithms.len());
    for inst in instances {
        let t = &inst.tanglegram;
        let warm = rec_split_bb(t);
        let exact = solve_exact(t, Some(time_limit), Some(&warm.orientation));
        let c_opt = count_crossings(t, &exact.orientation)
            .expect("orientation fits")
            .value();
        for &algo in algorithms {
            let (orientation, elapsed, _) =
                run_algorithm(algo, t, time_limit, Some(&warm.orientation));
            let crossings = count_crossings(t, &orientation)
                .expect("orientation fits")
                .value();
            records.push(BenchRecord {
                instance: inst.id.clone(),
                set: inst.set.clone(),
                n: inst.n,
                algorithm: algo.name(),
                crossings,
                c_opt,
                proved_optimal: exact.proved_optimal,
                ratio: performance_ratio(crossings, c_opt),
                time_ms: elapsed.as_secs_f64() * 1000.0,
                seed: inst.seed,
            });
        }
    }
    records
}

pub fn records_to_csv(records: &[BenchRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{:.4},{:.3},{}\n",
            r.instance,
            r.set,
            r.n,
            r.algorithm,
            r.crossings,
            r.c_opt,
            r.proved_optimal,
            r.ratio,
            r.time_ms,
            r.seed,
        ));
    }
    out
}

/// Boxplot-style statistics of the performance ratios of one
/// (set, n, algorithm) group.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub set: String,
    pub n: usize,
    pub algorithm: &'static str,
    pub count: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub mean: f64,
}

pub const SUMMARY_HEADER: &str = "set,n,algorithm,count,min,q1,median,q3,max,mean";

/// Group records by (set, n, algorithm), preserving first appearance
/// order, and summarize the ratio column.
pub fn summarize(records: &[BenchRecord]) -> Vec<SummaryRow> {
    type GroupKey = (String, usize, &'static str);
    let mut groups: Vec<(GroupKey, Vec<f64>)> = Vec::new();
    for r in records {
        let key = (r.set.clone(), r.n, r.algorithm);
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, ratios)) => ratios.push(r.ratio),
            None => groups.push((key, vec![r.ratio])),
        }
    }
    groups
        .into_iter()
        .map(|((set, n, algorithm), mut ratios)| {
            ratios.sort_by(f64::total_cmp);
            let count = ratios.len();
            let mean = ratios.iter().sum::<f64>() / count as f64;
            SummaryRow {
                set,
                n,
                algorithm,
                count,
                min: ratios[0],
                q1: quantile(&ratios, 0.25),
                median: quantile(&ratios, 0.5),
                q3: quantile(&ratios, 0.75),
                max: ratios[count - 1],
                mean,
            }
        })
        .collect()
}

/// Linear-interpolation quantile of a sorted slice.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
    }
}

pub fn summary_to_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{:.4},{:.4},{:.4},{:.4},{:.4},{:.4}\n",
            r.set, r.n, r.algorithm, r.count, r.min, r.q1, r.median, r.q3, r.max, r.mean,
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{gen_set, GenConfig, GenSet};

    #[test]
    fn ratio_examples() {
        assert_eq!(performance_ratio(5, 5), 1.0);
        assert_eq!(performance_ratio(1, 0), 2.0);
        assert_eq!(performance_ratio(0, 0), 1.0);
    }

    #[test]
    fn identity_instances_all_score_one() {
        let mut instances = Vec::new();
        for (i, t) in [4usize, 8].into_iter().enumerate() {
            let tg = crate::generate::gen_identical_complete(t).unwrap();
            instances.push(BenchInstance {
                id: format!("id-{i}"),
                set: "B".into(),
                n: t,
                seed: 0,
                tanglegram: tg,
            });
        }
        let records = run_benchmark(&instances, &Algorithm::DEFAULT, Duration::from_secs(60));
        assert_eq!(records.len(), instances.len() * Algorithm::DEFAULT.len());
        for r in &records {
            assert_eq!(r.crossings, 0, "{} on {}", r.algorithm, r.instance);
            assert_eq!(r.ratio, 1.0);
            assert!(r.proved_optimal);
        }
    }

    #[test]
    fn csv_schema_and_row_order() {
        let config = GenConfig::new(GenSet::B, 8, 2, 5);
        let instances: Vec<BenchInstance> = gen_set(&config)
            .unwrap()
            .into_iter()
            .enumerate()
            .map(|(i, tanglegram)| BenchInstance {
                id: format!("B-n8-{i:03}"),
                set: "B".into(),
                n: 8,
                seed: 5,
                tanglegram,
            })
            .collect();
        let algos = [Algorithm::RecSplitBb, Algorithm::Exact];
        let records = run_benchmark(&instances, &algos, Duration::from_secs(60));
        let csv = records_to_csv(&records);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER);
        let rows: Vec<&str> = lines.collect();
        assert_eq!(rows.len(), 4);
        assert!(rows[0].starts_with("B-n8-000,B,8,rec-split-bb,"));
        assert!(rows[1].starts_with("B-n8-000,B,8,exact,"));
        assert!(rows[2].starts_with("B-n8-001,B,8,rec-split-bb,"));

        // Proved rows never report a ratio below one.
        for r in &records {
            if r.proved_optimal {
                assert!(r.ratio >= 1.0);
            }
        }

        let summary = summarize(&records);
        assert_eq!(summary.len(), 2);
        assert_eq!(summary[0].count, 2);
        let summary_csv = summary_to_csv(&summary);
        assert!(summary_csv.starts_with(SUMMARY_HEADER));
    }

    #[test]
    fn quantiles_interpolate() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&v, 0.0), 1.0);
        assert_eq!(quantile(&v, 0.5), 2.5);
        assert_eq!(quantile(&v, 1.0), 4.0);
        assert_eq!(quantile(&v, 0.25), 1.75);
    }
}
