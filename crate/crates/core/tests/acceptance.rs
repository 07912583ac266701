//! Acceptance suite. Prints one line per criterion and exits non-zero if any fails.
//!
//! Criterion 6 needs the Biq-Mac file `g05_60.0`; point `SUBLEVEL_G05_60` at it or drop it
//! into `tests/data/`. Without it the criterion is reported as SKIP.

use std::collections::HashMap;
use std::path::PathBuf;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sublevel::bench::{
    build_config, rg_sense, ri, run_config, sweep, write_csv, Instance, Prepared, Problem, RunRecord, SweepGrid,
};
use sublevel::poly::{Constraint, Monomial, Polynomial, PopInstance, Sense};
use sublevel::problems::{
    box_qp_optimum, brute_force, cert_optimum, encode_cert, encode_lipschitz, encode_miqcp, encode_qcqp,
    gen_random_nn, lipschitz_optimum, maxclique_optimum, parse_rudy, random_quad, GraphInstance, QuadInstance,
};
use sublevel::sdp::{assemble, parse_sdpa, solve, to_sdpa_string, BlockSdp, LmiBlock, SolveStatus, SolverOptions};
use sublevel::sublevel::{BlockTag, Heuristic, Mode, SublevelConfig};

const RIRG_TOL_PP: f64 = 0.1;
const COLLAPSE_REL_TOL: f64 = 1e-6;
const VALIDITY_TOL: f64 = 1e-6;
const MONOTONE_SLACK: f64 = 1e-6;
const SOLVER_OBJ_TOL: f64 = 1e-6;
const SOLVER_GAP_TOL: f64 = 1e-7;

enum Verdict {
    Pass(String),
    Fail(String),
    Skip(String),
}

fn opts() -> SolverOptions {
    SolverOptions::default()
}

fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / (1.0 + a.abs().max(b.abs()))
}

// ---------------------------------------------------------------- test-side oracles

/// Dense exponent vectors of total degree <= d, graded.
fn exponents(n: usize, d: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![0; n]];
    let mut frontier = vec![vec![0u32; n]];
    for _ in 0..d {
        let mut next = Vec::new();
        for e in &frontier {
            let last = e.iter().rposition(|&p| p > 0).unwrap_or(0);
            for i in last..n {
                let mut f = e.clone();
                f[i] += 1;
                next.push(f);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

fn dense_exps(m: &Monomial, n: usize) -> Vec<u32> {
    let mut e = vec![0; n];
    for &(i, p) in m.exponents() {
        e[i] = p;
    }
    e
}

fn add_exps(a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// Dense Lasserre relaxation of order `t` assembled from scratch. `pm1` applies
/// `x_i^2 = 1` (exponents taken mod 2).
fn lasserre(pop: &PopInstance, t: u32, pm1: bool) -> BlockSdp {
    let n = pop.nvars;
    let norm = |e: Vec<u32>| if pm1 { e.into_iter().map(|p| p % 2).collect() } else { e };
    let mut index: HashMap<Vec<u32>, usize> = HashMap::new();
    let zero = vec![0u32; n];
    let var = |e: Vec<u32>, index: &mut HashMap<Vec<u32>, usize>| -> Option<usize> {
        if e == zero {
            return None;
        }
        let k = index.len();
        Some(*index.entry(e).or_insert(k))
    };
    let mut blocks = Vec::new();
    let mut push_block = |g: &[(Vec<u32>, f64)], basis: &[Vec<u32>], index: &mut HashMap<Vec<u32>, usize>| {
        let mut b = LmiBlock::new(basis.len());
        for i in 0..basis.len() {
            for j in i..basis.len() {
                for (ge, gc) in g {
                    let e = norm(add_exps(&add_exps(&basis[i], &basis[j]), ge));
                    match var(e, index) {
                        None => b.add(0, i, j, *gc),
                        Some(k) => b.add(k + 1, i, j, *gc),
                    }
                }
            }
        }
        b.normalize();
        blocks.push(b);
    };
    let basis_of = |d: u32| {
        let mut b: Vec<Vec<u32>> = exponents(n, d).into_iter().map(norm).collect();
        b.dedup();
        let mut seen = std::collections::HashSet::new();
        b.retain(|e| seen.insert(e.clone()));
        b
    };
    push_block(&[(zero.clone(), 1.0)], &basis_of(t), &mut index);
    for c in &pop.constraints {
        let g: Vec<(Vec<u32>, f64)> = c.poly.terms().map(|(m, v)| (dense_exps(m, n), v)).collect();
        let dg = c.poly.degree().div_ceil(2);
        push_block(&g, &basis_of(t - dg), &mut index);
    }
    let mut obj = Vec::new();
    let mut offset = 0.0;
    for (m, v) in pop.objective.terms() {
        match var(norm(dense_exps(m, n)), &mut index) {
            None => offset += v,
            Some(k) => obj.push((k, v)),
        }
    }
    let mut sdp = BlockSdp::new(index.len(), pop.sense);
    for (k, v) in obj {
        sdp.c[k] += v;
    }
    sdp.offset = offset;
    sdp.blocks = blocks;
    sdp
}

fn oracle_bound(sdp: &BlockSdp) -> f64 {
    let r = solve(sdp, &opts());
    assert!(
        matches!(r.status, SolveStatus::Optimal | SolveStatus::NearOptimal),
        "oracle solve: {:?} {}",
        r.status,
        r.message
    );
    r.bound()
}

fn random_maxcut(n: usize, density: f64, seed: u64) -> Prepared {
    Prepared::new(Instance::maxcut(&GraphInstance::random(format!("r{n}_{seed}"), n, density, true, seed)))
        .expect("maxcut instance")
}

// ---------------------------------------------------------------- criteria

/// Published (shor, sublevel, solution) triples with their printed percentages.
fn criterion_1() -> Verdict {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/ri_rg_triples.csv");
    let mut rdr = csv::Reader::from_path(&path).expect("triples file");
    let (mut exact, mut rounded, mut flagged, mut bad) = (0, 0, Vec::new(), Vec::new());
    for rec in rdr.records() {
        let rec = rec.expect("csv row");
        let f = |i: usize| -> f64 { rec[i].parse().expect("number") };
        let sense = if &rec[1] == "max" { Sense::Max } else { Sense::Min };
        let (shor, sub, sol, ri_pub, rg_pub) = (f(3), f(4), f(5), f(6), f(7));
        let note = rec.get(8).unwrap_or("");
        let close = |s: f64, b: f64, o: f64| {
            let r = ri(s, b, o).ok()?;
            let g = rg_sense(sense, b, o).ok()?;
            Some((r - ri_pub).abs() <= RIRG_TOL_PP && (g - rg_pub).abs() <= RIRG_TOL_PP)
        };
        if close(shor, sub, sol) == Some(true) {
            exact += 1;
            continue;
        }
        // The inputs are printed rounded; accept if some inputs that round to the printed
        // values reproduce the percentages. Both metrics are monotone in each argument, so
        // the extremes sit at the corners of the rounding box.
        let half = |s: &str| 0.5 * 10f64.powi(-(s.split('.').nth(1).map_or(0, |d| d.len()) as i32));
        let (hs, hb, ho) = (half(&rec[3]), half(&rec[4]), half(&rec[5]));
        let (mut ri_lo, mut ri_hi, mut rg_lo, mut rg_hi) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for k in 0..8 {
            let sg = |bit: usize| if k >> bit & 1 == 1 { 1.0 } else { -1.0 };
            let (s, b, o) = (shor + sg(0) * hs, sub + sg(1) * hb, sol + sg(2) * ho);
            if let (Ok(r), Ok(g)) = (ri(s, b, o), rg_sense(sense, b, o)) {
                ri_lo = ri_lo.min(r);
                ri_hi = ri_hi.max(r);
                rg_lo = rg_lo.min(g);
                rg_hi = rg_hi.max(g);
            }
        }
        let inside = |v: f64, lo: f64, hi: f64| v >= lo - RIRG_TOL_PP && v <= hi + RIRG_TOL_PP;
        if inside(ri_pub, ri_lo, ri_hi) && inside(rg_pub, rg_lo, rg_hi) {
            rounded += 1;
        } else if note == "inconsistent" {
            flagged.push(rec[2].to_string());
        } else {
            bad.push(format!("{} ({:?})", &rec[2], close(shor, sub, sol)));
        }
    }
    let detail = format!(
        "{exact} rows exact, {rounded} within input rounding, {} flagged inconsistent in the source table {:?}",
        flagged.len(),
        flagged
    );
    if bad.is_empty() {
        Verdict::Pass(detail)
    } else {
        Verdict::Fail(format!("{detail}; mismatches {bad:?}"))
    }
}

fn criterion_2() -> Verdict {
    let mut worst = 0.0f64;
    for seed in 0..25u64 {
        let n = 6 + (seed as usize % 15);
        let prep = random_maxcut(n, 0.4, 100 + seed);
        let ours = run_config(&prep, &SublevelConfig::new(1, 0, 0), &opts()).expect("run").bound();
        let shor = oracle_bound(&lasserre(&prep.instance.pop, 1, true));
        worst = worst.max(rel_diff(ours, shor));
    }
    let detail = format!("25 instances, worst relative difference {worst:.1e}");
    if worst <= COLLAPSE_REL_TOL {
        Verdict::Pass(detail)
    } else {
        Verdict::Fail(detail)
    }
}

/// Random dense QCQP: quadratic objective, unit ball and one more quadratic constraint.
fn random_dense_pop(n: usize, seed: u64) -> PopInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = Polynomial::zero(n);
    for i in 0..n {
        f.add_term(Monomial::var(i), rng.random_range(-1.0..1.0));
        for j in i..n {
            let e = if i == j { Monomial::from_pairs([(i, 2)]) } else { Monomial::from_pairs([(i, 1), (j, 1)]) };
            f.add_term(e, rng.random_range(-1.0..1.0));
        }
    }
    let mut pop = PopInstance::new(format!("dense{n}_{seed}"), n, Sense::Min, f);
    let mut ball = Polynomial::constant(n, 1.0);
    let mut g = Polynomial::constant(n, 0.5);
    for i in 0..n {
        ball.add_term(Monomial::from_pairs([(i, 2)]), -1.0);
        g.add_term(Monomial::var(i), rng.random_range(-1.0..1.0));
        g.add_term(Monomial::from_pairs([(i, 1), ((i + 1) % n, 1)]), rng.random_range(-1.0..1.0));
    }
    pop.push(Constraint::ge(ball));
    pop.push(Constraint::ge(g));
    pop
}

fn criterion_3() -> Verdict {
    let mut worst = 0.0f64;
    for seed in 0..10u64 {
        let n = 3 + (seed as usize % 5);
        let pop = random_dense_pop(n, 300 + seed);
        let order2 = oracle_bound(&lasserre(&pop, 2, false));
        let prep = Prepared::new(Instance::from_pop(Problem::PopJson, pop)).expect("pop");
        let cfg = SublevelConfig::new(1, n, 1).with_mode(Mode::Dense);
        let ours = run_config(&prep, &cfg, &opts()).expect("run").bound();
        worst = worst.max(rel_diff(ours, order2));
    }
    let detail = format!("10 POPs (n = 3..7), worst relative difference to order 2: {worst:.1e}");
    if worst <= COLLAPSE_REL_TOL {
        Verdict::Pass(detail)
    } else {
        Verdict::Fail(detail)
    }
}

fn criterion_4() -> Verdict {
    let mut cases: Vec<(Prepared, f64)> = Vec::new();
    for s in 0..9u64 {
        let prep = random_maxcut(8 + s as usize, 0.4, 400 + s);
        let opt = brute_force(&prep.instance.pop, 0, 0, 1e-9).value.expect("enumerable");
        cases.push((prep, opt));
    }
    for s in 0..9u64 {
        let g = GraphInstance::random(format!("mc{s}"), 6 + s as usize % 5, 0.5, false, 500 + s);
        cases.push((Prepared::new(Instance::maxclique(&g)).expect("maxclique"), maxclique_optimum(&g)));
    }
    for s in 0..8u64 {
        let q = random_quad(format!("bq{s}"), 6 + s as usize, 3, true, s % 2 == 0, 600 + s);
        let pop = encode_miqcp(&q).expect("miqcp");
        let opt = brute_force(&pop, 0, 0, 1e-7).value.expect("feasible");
        cases.push((Prepared::new(Instance::from_pop(Problem::Miqcp, pop)).expect("miqcp"), opt));
    }
    for s in 0..8u64 {
        let n = 3 + s as usize % 4;
        let mut rng = ChaCha8Rng::seed_from_u64(700 + s);
        let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        let q0 = (&a + a.transpose()) * 0.5;
        let b0 = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
        let sense = if s % 2 == 0 { Sense::Min } else { Sense::Max };
        let mut inst = QuadInstance::new(format!("box{s}"), sense, q0, b0);
        inst.lo = vec![-1.0; n];
        let opt = box_qp_optimum(&inst.q0, &inst.b0, &inst.lo, &inst.hi, sense);
        let pop = encode_qcqp(&inst).expect("qcqp");
        cases.push((Prepared::new(Instance::from_pop(Problem::Qcqp, pop)).expect("qcqp"), opt));
    }
    for s in 0..8u64 {
        let mut nn = gen_random_nn(2 + s as usize % 2, 2 + (s as usize / 2) % 2, 800 + s).expect("nn");
        if s % 4 == 3 {
            nn.eps = 10.0;
        }
        let (lip, cert) = (encode_lipschitz(&nn).expect("lip"), encode_cert(&nn).expect("cert"));
        cases.push((Prepared::new(Instance::from_pop(Problem::Lip, lip)).expect("lip"), lipschitz_optimum(&nn)));
        cases.push((Prepared::new(Instance::from_pop(Problem::Cert, cert)).expect("cert"), cert_optimum(&nn)));
    }
    assert_eq!(cases.len(), 50);

    let mut worst = f64::NEG_INFINITY;
    let mut failures = Vec::new();
    let mut runs = 0;
    for (prep, opt) in &cases {
        for l in [0, 2, 4] {
            for q in [0, 1, 2] {
                runs += 1;
                let cfg = SublevelConfig::new(1, l, q);
                match run_config(prep, &cfg, &opts()) {
                    Ok(out) => {
                        // positive = bound on the wrong side of the optimum
                        let viol = -prep.instance.pop.sense.sign() * (opt - out.bound()) / (1.0 + opt.abs());
                        worst = worst.max(viol);
                        if viol > VALIDITY_TOL {
                            failures.push(format!("{} l={l} q={q}: {:.6} vs {opt:.6}", prep.instance.name(), out.bound()));
                        }
                    }
                    Err(e) => failures.push(format!("{} l={l} q={q}: {e}", prep.instance.name())),
                }
            }
        }
    }
    let detail = format!("50 instances, {runs} runs, worst relative violation {worst:.1e}");
    if failures.is_empty() {
        Verdict::Pass(detail)
    } else {
        Verdict::Fail(format!("{detail}; {failures:?}"))
    }
}

fn criterion_5() -> Verdict {
    let mut failures = Vec::new();
    let bound = |prep: &Prepared, l, q| {
        run_config(prep, &SublevelConfig::new(1, l, q).with_heuristic(Heuristic::H2), &opts())
            .expect("run")
            .bound()
    };
    for s in 0..20u64 {
        let n = 12 + (s as usize % 19);
        let prep = random_maxcut(n, 0.15, 900 + s);
        let by_level: Vec<f64> = [0, 4, 6, 8].into_iter().map(|l| bound(&prep, l, 1)).collect();
        let by_depth: Vec<f64> = [1, 2, 3].into_iter().map(|q| bound(&prep, 4, q)).collect();
        for chain in [&by_level, &by_depth] {
            if chain.windows(2).any(|w| w[1] > w[0] + MONOTONE_SLACK * (1.0 + w[0].abs())) {
                failures.push(format!("{}: {chain:?}", prep.instance.name()));
            }
        }
    }
    if failures.is_empty() {
        Verdict::Pass("20 instances (n = 12..30), levels 0/4/6/8 and depths 1/2/3 non-increasing".into())
    } else {
        Verdict::Fail(format!("{failures:?}"))
    }
}

fn criterion_6() -> Verdict {
    let path = std::env::var_os("SUBLEVEL_G05_60")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/g05_60.0"));
    if !path.exists() {
        return Verdict::Skip(format!("{} not found", path.display()));
    }
    let g = match parse_rudy(&path) {
        Ok(g) => g,
        Err(e) => return Verdict::Fail(format!("cannot read {}: {e}", path.display())),
    };
    let prep = Prepared::new(Instance::maxcut(&g)).expect("g05_60");
    let shor = run_config(&prep, &SublevelConfig::new(1, 0, 0), &opts()).expect("shor").bound();
    let best_known = 536.0;
    let mut detail = format!("Shor {shor:.2} (table 550.1)");
    let mut ok = (shor - 550.1).abs() <= 0.5;
    for (l, table) in [(4, 548.1), (6, 546.0), (8, 544.6)] {
        let b = run_config(&prep, &SublevelConfig::new(1, l, 1), &opts()).expect("run").bound();
        detail += &format!(", l={l}: {b:.2} (table {table})");
        ok &= b <= shor + 1e-6 && b >= best_known - 1e-6;
    }
    if ok {
        Verdict::Pass(detail)
    } else {
        Verdict::Fail(detail)
    }
}

fn criterion_7() -> Verdict {
    let mut grid = SweepGrid::new(vec![4], vec![1]);
    grid.heuristics = vec![Heuristic::H1];
    grid.seed = 17;
    let mut reproducible = true;
    let mut spread = Vec::new();
    for (k, n) in [20usize, 28, 36, 40].into_iter().enumerate() {
        let prep = random_maxcut(n, 0.2, 2 + k as u64);
        let table = |jobs| {
            let rows: Vec<RunRecord> = sweep(&prep, &grid.cells(), &opts(), jobs, None)
                .expect("sweep")
                .into_iter()
                .map(RunRecord::without_timing)
                .collect();
            let mut buf = Vec::new();
            write_csv(&rows, &mut buf).expect("csv");
            buf
        };
        reproducible &= table(1) == table(3);
        let b: Vec<f64> = [Heuristic::H2, Heuristic::H3, Heuristic::H4]
            .into_iter()
            .map(|h| run_config(&prep, &SublevelConfig::new(1, 4, 1).with_heuristic(h), &opts()).expect("run").bound())
            .collect();
        let distinct = (0..3).all(|i| (i + 1..3).all(|j| rel_diff(b[i], b[j]) > 1e-5));
        spread.push((n, distinct, b));
    }
    let any = spread.iter().any(|s| s.1);
    let detail = format!(
        "H1 CSV identical across runs: {reproducible}; H2/H3/H4 at l=4 q=1: {}",
        spread
            .iter()
            .map(|(n, d, b)| format!("n={n} [{:.4} {:.4} {:.4}]{}", b[0], b[1], b[2], if *d { " distinct" } else { "" }))
            .collect::<Vec<_>>()
            .join(", ")
    );
    if reproducible && any {
        Verdict::Pass(detail)
    } else {
        Verdict::Fail(detail)
    }
}

fn criterion_8() -> Verdict {
    let binom = |n: usize, k: usize| -> usize { (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1)) };
    let mut problems = Vec::new();
    for s in 0..20u64 {
        let (prep, pm1) = if s % 2 == 0 {
            (random_maxcut(8 + s as usize, 0.3, 1000 + s), true)
        } else {
            let pop = random_dense_pop(3 + s as usize % 4, 1000 + s);
            (Prepared::new(Instance::from_pop(Problem::PopJson, pop)).expect("pop"), false)
        };
        let cfg = SublevelConfig::new(1, 2 + s as usize % 3, 1 + s as usize % 2).with_heuristic(Heuristic::H2);
        let relax = build_config(&prep, &cfg, &opts()).expect("build");
        for tb in &relax.blocks {
            let (v, t) = (tb.tag.vars().len(), tb.tag.order() as usize);
            let expect = if pm1 { (0..=t).map(|k| binom(v, k)).sum() } else { binom(v + t, t) };
            if tb.block.size != expect {
                problems.push(format!("{}: {:?} has size {} not {expect}", relax.name, tb.tag, tb.block.size));
            }
            if matches!(tb.tag, BlockTag::MomentMatrix { .. }) && t == 0 {
                problems.push("order-0 moment block".into());
            }
        }
        let sdp = assemble(&relax).expect("assemble");
        let psd: Vec<usize> = relax.blocks.iter().filter(|b| !b.tag.is_zero()).map(|b| b.block.size).collect();
        if sdp.block_sizes() != psd {
            problems.push(format!("{}: SDP blocks {:?} vs relaxation {psd:?}", relax.name, sdp.block_sizes()));
        }
        let first = to_sdpa_string(&sdp, &relax.name);
        let again = to_sdpa_string(&parse_sdpa(&first).expect("parse"), &relax.name);
        if first != again {
            problems.push(format!("{}: export not byte-identical after parsing", relax.name));
        }
    }
    if problems.is_empty() {
        Verdict::Pass("20 relaxations round-trip byte-identically; block sizes match the binomial counts".into())
    } else {
        Verdict::Fail(format!("{problems:?}"))
    }
}

/// Hankel-type block `Σ_k h_k y_{i+j+k}` over the basis `1..x^t`, with `y_0 = 1`.
fn hankel(t: usize, h: &[(usize, f64)]) -> LmiBlock {
    let mut b = LmiBlock::new(t + 1);
    for i in 0..=t {
        for j in i..=t {
            for &(k, c) in h {
                let p = i + j + k;
                b.add(if p == 0 { 0 } else { p }, i, j, c);
            }
        }
    }
    b.normalize();
    b
}

/// Minimum of a univariate polynomial (coefficients by degree) via its exact moment SDP.
fn univariate_min(coeffs: &[f64]) -> BlockSdp {
    let d = coeffs.len() - 1;
    let mut sdp = BlockSdp::new(d, Sense::Min);
    sdp.offset = coeffs[0];
    for (k, &c) in coeffs.iter().enumerate().skip(1) {
        sdp.c[k - 1] = c;
    }
    sdp.blocks.push(hankel(d / 2, &[(0, 1.0)]));
    sdp
}

fn criterion_9() -> Verdict {
    let mut cases: Vec<(String, BlockSdp, f64)> = Vec::new();
    cases.push(("x^4 - 2x^2".into(), univariate_min(&[0.0, 0.0, -2.0, 0.0, 1.0]), -1.0));
    cases.push(("x^2 - 2x + 3".into(), univariate_min(&[3.0, -2.0, 1.0]), 2.0));
    cases.push(("x^4 - 4x^2 + 1".into(), univariate_min(&[1.0, 0.0, -4.0, 0.0, 1.0]), -3.0));
    cases.push(("(x - 1)^2 (x + 2)^2 - 1".into(), univariate_min(&[3.0, -4.0, -3.0, 2.0, 1.0]), -1.0));
    {
        // max x^2 over [-1, 2]: moment matrix plus localizer of (x + 1)(2 - x)
        let mut sdp = BlockSdp::new(2, Sense::Max);
        sdp.c[1] = 1.0;
        sdp.blocks.push(hankel(1, &[(0, 1.0)]));
        sdp.blocks.push(hankel(0, &[(0, 2.0), (1, 1.0), (2, -1.0)]));
        cases.push(("max x^2 on [-1, 2]".into(), sdp, 4.0));
    }
    {
        let mut sdp = BlockSdp::new(2, Sense::Min);
        sdp.c[0] = 1.0;
        sdp.blocks.push(hankel(0, &[(0, 2.0), (1, 1.0), (2, -1.0)]));
        sdp.blocks.push(hankel(1, &[(0, 1.0)]));
        cases.push(("min x on [-1, 2]".into(), sdp, -1.0));
    }
    // Trace minimization: min <C, X> over tr X = 1 equals max y with C - yI ⪰ 0.
    let lam_min = |a: f64, b: f64, c: f64| 0.5 * (a + c) - (0.25 * (a - c).powi(2) + b * b).sqrt();
    for (a, b, c) in [(2.0, 1.0, 3.0), (-1.0, 0.5, 4.0), (0.0, 2.0, 0.0)] {
        let mut sdp = BlockSdp::new(1, Sense::Max);
        sdp.c[0] = 1.0;
        let mut blk = LmiBlock::new(2);
        blk.add(0, 0, 0, a);
        blk.add(0, 0, 1, b);
        blk.add(0, 1, 1, c);
        blk.add(1, 0, 0, -1.0);
        blk.add(1, 1, 1, -1.0);
        blk.normalize();
        sdp.blocks.push(blk);
        cases.push((format!("λmin [[{a}, {b}], [{b}, {c}]]"), sdp, lam_min(a, b, c)));
    }
    {
        // two diagonal blocks share y: the smaller spectrum wins
        let mut sdp = BlockSdp::new(1, Sense::Max);
        sdp.c[0] = 1.0;
        for diag in [[3.0, 1.0, 2.0], [5.0, 1.5, 0.75]] {
            let mut blk = LmiBlock::new(3);
            for (i, d) in diag.into_iter().enumerate() {
                blk.add(0, i, i, d);
                blk.add(1, i, i, -1.0);
            }
            blk.normalize();
            sdp.blocks.push(blk);
        }
        cases.push(("block-diagonal trace toy".into(), sdp, 0.75));
    }
    assert_eq!(cases.len(), 10);

    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for (name, sdp, v) in &cases {
        let r = solve(sdp, &opts());
        let ep = (r.primal_obj - v).abs() / (1.0 + v.abs());
        let ed = (r.dual_obj - v).abs() / (1.0 + v.abs());
        worst = worst.max(ep).max(ed);
        if r.status != SolveStatus::Optimal || ep > SOLVER_OBJ_TOL || ed > SOLVER_OBJ_TOL || r.gap > SOLVER_GAP_TOL {
            failures.push(format!("{name}: {:?} primal {} dual {} gap {:.1e}", r.status, r.primal_obj, r.dual_obj, r.gap));
        }
    }
    let detail = format!("10 SDPs, worst objective error {worst:.1e}");
    if failures.is_empty() {
        Verdict::Pass(detail)
    } else {
        Verdict::Fail(format!("{detail}; {failures:?}"))
    }
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 9] = [
        ("RI/RG arithmetic", criterion_1),
        ("Shor collapse", criterion_2),
        ("full-level collapse", criterion_3),
        ("validity", criterion_4),
        ("monotonicity", criterion_5),
        ("g05_60 spot check", criterion_6),
        ("heuristic determinism and spread", criterion_7),
        ("SDPA export", criterion_8),
        ("solver correctness", criterion_9),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let id = format!("{}", k + 1);
        if !filter.is_empty() && !filter.iter().any(|f| *f == id) {
            continue;
        }
        let start = Instant::now();
        let verdict = run();
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match verdict {
            Verdict::Pass(d) => ("PASS", d),
            Verdict::Skip(d) => ("SKIP", d),
            Verdict::Fail(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {id} {name}: {tag} ({secs:.1}s) {detail}");
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
