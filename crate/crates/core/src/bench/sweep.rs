use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::sdp::SolverOptions;
use crate::sublevel::{Heuristic, Mode, PerOwner, SublevelConfig};

use super::metrics::{ri, rg_sense, Reference};
use super::pipeline::{base_config, run_config, Prepared, RunOutcome};

/// One row of a result table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunRecord {
    pub instance: String,
    pub problem: String,
    pub mode: String,
    pub d: u32,
    pub l: usize,
    pub q: usize,
    pub heuristic: String,
    pub seed: u64,
    pub status: String,
    pub bound: Option<f64>,
    pub iterations: Option<usize>,
    pub nblocks: Option<usize>,
    pub max_block: Option<usize>,
    /// SDP solve wall time; cleared by [`RunRecord::without_timing`].
    pub solve_seconds: Option<f64>,
    pub reference: Option<f64>,
    pub shor: Option<f64>,
    pub ri: Option<f64>,
    pub rg: Option<f64>,
    pub error: Option<String>,
}

fn uniform(p: &PerOwner) -> usize {
    match p {
        PerOwner::Uniform(v) => *v,
        PerOwner::List(vs) => vs.iter().copied().max().unwrap_or(0),
    }
}

impl RunRecord {
    /// Row for `cfg`; `shor` is the base bound used for RI when a reference is known.
    pub fn new(
        prep: &Prepared,
        cfg: &SublevelConfig,
        outcome: &Result<RunOutcome>,
        reference: Option<&Reference>,
        shor: Option<f64>,
    ) -> Self {
        let pop = &prep.instance.pop;
        let mut rec = RunRecord {
            instance: pop.name.clone(),
            problem: prep.instance.problem.to_string(),
            mode: cfg.mode.to_string(),
            d: cfg.order,
            l: uniform(&cfg.level),
            q: uniform(&cfg.depth),
            heuristic: cfg.heuristic.to_string(),
            seed: cfg.seed,
            status: String::new(),
            bound: None,
            iterations: None,
            nblocks: None,
            max_block: None,
            solve_seconds: None,
            reference: reference.map(|r| r.value),
            shor: None,
            ri: None,
            rg: None,
            error: None,
        };
        match outcome {
            Ok(out) => {
                let b = out.bound();
                rec.status = out.report.status.to_string();
                rec.bound = Some(b);
                rec.iterations = Some(out.report.iterations);
                rec.nblocks = Some(out.relaxation.nblocks());
                rec.max_block = out.relaxation.block_sizes().into_iter().max();
                rec.solve_seconds = Some(out.report.solve_seconds);
                if let Some(r) = reference {
                    let shor = r.shor.or(shor);
                    rec.shor = shor;
                    rec.ri = shor.and_then(|s| ri(s, b, r.value).ok());
                    rec.rg = rg_sense(pop.sense, b, r.value).ok();
                }
            }
            Err(e) => {
                rec.status = "error".into();
                rec.error = Some(e.to_string());
            }
        }
        rec
    }

    pub fn without_timing(mut self) -> Self {
        self.solve_seconds = None;
        self
    }
}

/// Cartesian grid of sweep cells, enumerated mode → heuristic → order → level → depth.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepGrid {
    pub modes: Vec<Mode>,
    pub heuristics: Vec<Heuristic>,
    pub orders: Vec<u32>,
    pub levels: Vec<usize>,
    pub depths: Vec<usize>,
    pub seed: u64,
}

impl SweepGrid {
    pub fn new(levels: Vec<usize>, depths: Vec<usize>) -> Self {
        Self {
            modes: vec![Mode::Sparse],
            heuristics: vec![Heuristic::H2],
            orders: vec![1],
            levels,
            depths,
            seed: 0,
        }
    }

    pub fn cells(&self) -> Vec<SublevelConfig> {
        let mut out = Vec::new();
        for &mode in &self.modes {
            for &h in &self.heuristics {
                for &d in &self.orders {
                    for &l in &self.levels {
                        for &q in &self.depths {
                            out.push(
                                SublevelConfig::new(d, l, q)
                                    .with_heuristic(h)
                                    .with_mode(mode)
                                    .with_seed(self.seed),
                            );
                        }
                    }
                }
            }
        }
        out
    }
}

/// Runs every cell (in parallel on at most `jobs` threads) and returns the rows in cell
/// order. Failures become `error` rows. With a reference, the base bound of each
/// `(order, mode)` is solved once for RI unless the reference carries it.
pub fn sweep(
    prep: &Prepared,
    cells: &[SublevelConfig],
    opts: &SolverOptions,
    jobs: usize,
    reference: Option<&Reference>,
) -> Result<Vec<RunRecord>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(|| {
        let mut shor: BTreeMap<(u32, String), Option<f64>> = BTreeMap::new();
        if reference.is_some_and(|r| r.shor.is_none()) {
            let mut keys: Vec<(u32, Mode)> = cells.iter().map(|c| (c.order, c.mode)).collect();
            keys.sort_by_key(|(d, m)| (*d, m.to_string()));
            keys.dedup();
            let vals: Vec<Option<f64>> = keys
                .par_iter()
                .map(|&(d, m)| {
                    let cfg = base_config(&SublevelConfig::base(d).with_mode(m));
                    run_config(prep, &cfg, opts).ok().map(|o| o.bound())
                })
                .collect();
            for ((d, m), v) in keys.into_iter().zip(vals) {
                shor.insert((d, m.to_string()), v);
            }
        }
        let rows = cells
            .par_iter()
            .map(|cfg| {
                let out = run_config(prep, cfg, opts);
                let s = shor.get(&(cfg.order, cfg.mode.to_string())).copied().flatten();
                RunRecord::new(prep, cfg, &out, reference, s)
            })
            .collect();
        Ok(rows)
    })
}

/// CSV with a header row; empty fields for missing values.
pub fn write_csv<W: Write>(records: &[RunRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(records: &[RunRecord], mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, records)?;
    writeln!(out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::Instance;
    use crate::problems::GraphInstance;

    fn tiny() -> Prepared {
        Prepared::new(Instance::maxcut(&GraphInstance::random("tiny", 7, 0.5, false, 3))).unwrap()
    }

    #[test]
    fn level_zero_row_is_shor() {
        let prep = tiny();
        let opts = SolverOptions::default();
        let rows = sweep(&prep, &SweepGrid::new(vec![0, 4], vec![1]).cells(), &opts, 2, None).unwrap();
        assert_eq!(rows.len(), 2);
        let shor = run_config(&prep, &SublevelConfig::base(1), &opts).unwrap().bound();
        assert!((rows[0].bound.unwrap() - shor).abs() < 1e-9);
        assert!(rows[1].bound.unwrap() <= shor + 1e-6);
        assert!(rows.iter().all(|r| r.ri.is_none() && r.rg.is_none()));
    }

    #[test]
    fn csv_is_deterministic() {
        let prep = tiny();
        let opts = SolverOptions::default();
        let mut grid = SweepGrid::new(vec![0, 3], vec![1, 2]);
        grid.heuristics = vec![Heuristic::H1, Heuristic::H4];
        grid.seed = 9;
        let reference = Reference {
            value: 10.0,
            kind: Default::default(),
            shor: None,
        };
        let table = |jobs| {
            let rows: Vec<RunRecord> = sweep(&prep, &grid.cells(), &opts, jobs, Some(&reference))
                .unwrap()
                .into_iter()
                .map(RunRecord::without_timing)
                .collect();
            let mut buf = Vec::new();
            write_csv(&rows, &mut buf).unwrap();
            String::from_utf8(buf).unwrap()
        };
        let a = table(1);
        assert_eq!(a, table(3));
        assert_eq!(a.lines().count(), 1 + 8);
        assert!(a.lines().next().unwrap().starts_with("instance,problem,mode,d,l,q"));
    }

    #[test]
    fn failures_stay_in_row() {
        let prep = tiny();
        let cells = vec![SublevelConfig::base(0), SublevelConfig::base(1)];
        let rows = sweep(&prep, &cells, &SolverOptions::default(), 1, None).unwrap();
        assert_eq!(rows[0].status, "error");
        assert!(rows[0].error.is_some());
        assert_eq!(rows[1].status, "optimal");
    }
}
