//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits non-zero
//! if any fails. Run with `cargo test -p stland-core --test acceptance`.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use stland::f2linalg::{rank, BitMatrix, BitVector};
use stland::grid::{build_grid, BifiltrationGrid, GridPoint, SquareRegion};
use stland::landscape::{compute_landscape, distance_p, mean, Landscape, MeanLandscape};
use stland::pipeline::{noisy, run_grid, PipelineConfig, SelkovParams, SineParams};
use stland::signal::{PointCloud, WindowedClouds};
use stland::zigzag::{barcode, gen_rank_range, synth_from_bars, Barcode, Direction, ZigzagModule};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

/// Landscapes and grids later criteria reuse.
#[derive(Default)]
struct Shared {
    checked: Vec<(String, BifiltrationGrid, Landscape)>,
    artifacts: Vec<(String, String)>,
}

// ---------------------------------------------------------------- criterion 1

// 0 ← F → F² ← F → 0 with the two inclusions given by their columns
fn two_lines(left: [bool; 2], right: [bool; 2]) -> Result<ZigzagModule, String> {
    use Direction::{Backward, Forward};
    ok(ZigzagModule::new(
        vec![0, 1, 2, 1, 0],
        vec![
            (Backward, BitMatrix::zeros(0, 1)),
            (Forward, BitMatrix::from_columns(2, &[BitVector::from_bools(&left)])),
            (Backward, BitMatrix::from_columns(2, &[BitVector::from_bools(&right)])),
            (Forward, BitMatrix::zeros(0, 1)),
        ],
    ))
}

fn printed(bc: &Barcode) -> Vec<(usize, usize)> {
    bc.bars().iter().map(|&(b, d)| (b + 1, d + 1)).collect()
}

fn worked_example(_: &mut Shared) -> Outcome {
    let m = two_lines([true, false], [false, true])?;
    let n = two_lines([true, true], [true, true])?;
    let (bm, bn) = (printed(&ok(barcode(&m))?), printed(&ok(barcode(&n))?));
    ensure!(bm == vec![(2, 3), (3, 4)], "barcode(M) = {bm:?}");
    ensure!(bn == vec![(2, 4), (3, 3)], "barcode(N) = {bn:?}");
    ensure!(m.dims() == n.dims(), "dims differ: {:?} vs {:?}", m.dims(), n.dims());
    for (i, ((_, a), (_, b))) in m.arrows().iter().zip(n.arrows()).enumerate() {
        ensure!(rank(a) == rank(b), "arrow {i} ranks differ");
    }
    for i in 0..m.len() - 1 {
        let (a, b) = (ok(gen_rank_range(&m, i, i + 1))?, ok(gen_rank_range(&n, i, i + 1))?);
        ensure!(a == b, "pair ({i}, {}) ranks {a} vs {b}", i + 1);
    }
    Ok(format!("M {bm:?}, N {bn:?}, same dims and adjacent ranks"))
}

// ---------------------------------------------------------------- criterion 2

fn zigzag_round_trip(_: &mut Shared) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut ranges = 0;
    for case in 0..200 {
        let n = rng.random_range(1..=12);
        let dirs: Vec<Direction> =
            (0..n - 1).map(|_| if rng.random_bool(0.5) { Direction::Forward } else { Direction::Backward }).collect();
        let count = rng.random_range(0..=8);
        let bars = (0..count)
            .map(|_| {
                let b = rng.random_range(0..n);
                (b, rng.random_range(b..n))
            })
            .collect();
        let bc = ok(Barcode::new(bars))?;
        let m = ok(synth_from_bars(&bc, &dirs, rng.random()))?;
        let back = ok(barcode(&m))?;
        ensure!(back == bc, "case {case}: {:?} came back as {:?}", bc.bars(), back.bars());
        for s in 0..n {
            for e in s..n {
                let r = ok(gen_rank_range(&m, s, e))?;
                ensure!(r == bc.count_containing(s, e), "case {case}: rank on [{s}, {e}] is {r}");
                ranges += 1;
            }
        }
    }
    Ok(format!("200 modules, {ranges} ranges"))
}

// ---------------------------------------------------------------- criterion 3

fn random_cloud(rng: &mut ChaCha8Rng) -> Result<PointCloud, String> {
    let coords: Vec<f64> = if rng.random_bool(0.5) {
        let n = rng.random_range(4..9);
        let (cx, cy, r) = (rng.random_range(0.0..1.0), rng.random_range(0.0..1.0), rng.random_range(0.2..0.5));
        let phase = rng.random_range(0.0..std::f64::consts::TAU);
        (0..n)
            .flat_map(|i| {
                let a = phase + std::f64::consts::TAU * i as f64 / n as f64;
                [cx + r * a.cos(), cy + r * a.sin()]
            })
            .map(|v| v + rng.random_range(-0.05..0.05))
            .collect()
    } else {
        let n = rng.random_range(3..8);
        (0..2 * n).map(|_| rng.random_range(0.0..1.0)).collect()
    };
    ok(PointCloud::from_flat(2, coords))
}

fn path_matches_oracle(shared: &mut Shared) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut checks, mut nonzero) = (0, 0);
    for case in 0..50 {
        let t = rng.random_range(1..=3);
        let rows = rng.random_range(1..=4);
        let windows = (0..t).map(|_| random_cloud(&mut rng)).collect::<Result<Vec<_>, _>>()?;
        let wc = ok(WindowedClouds::new(windows))?;
        let mut eps: Vec<f64> = (0..rows).map(|_| rng.random_range(0.05..0.9)).collect();
        eps.sort_by(f64::total_cmp);
        eps.dedup();
        let g = ok(build_grid(&wc, &eps, rng.random_range(0..2)))?;
        for c in 0..g.cols() {
            for r in 0..g.rows() {
                let center = GridPoint::new(c, r);
                let ranks = ok(g.region_ranks(center))?;
                ensure!(ranks.len() == g.radius_bound(center) + 1, "case {case}: radius range at {center:?}");
                for (e, &k) in ranks.iter().enumerate() {
                    let want = ok(g.oracle_interval_rank(&SquareRegion::new(center, e)))?;
                    ensure!(k == want, "case {case}: center {center:?} radius {e}: path {k}, oracle {want}");
                    checks += 1;
                    nonzero += usize::from(k > 0);
                }
            }
        }
        let l = ok(compute_landscape(&g, 3))?;
        shared.checked.push((format!("random grid {case}"), g, l));
    }
    ensure!(nonzero > 0, "every square has rank 0, the comparison is vacuous");
    Ok(format!("50 grids, {checks} squares agree ({nonzero} with nonzero rank)"))
}

// ---------------------------------------------------------------- criterion 4

fn landscape_properties(shared: &mut Shared) -> Outcome {
    ensure!(!shared.checked.is_empty(), "no landscapes were produced by criteria 3, 6, 7");
    for (name, g, l) in &shared.checked {
        ensure!(l.has_landscape_properties(), "{name}: monotonicity or Lipschitz bound fails");
        ensure!(ok(stland::landscape::restriction_dominates(g, l))?, "{name}: restriction inequality fails");
    }
    Ok(format!("{} landscapes", shared.checked.len()))
}

// ---------------------------------------------------------------- criterion 5

fn pseudo_distance(_: &mut Shared) -> Outcome {
    let (cols, rows) = (5, 6);
    let a = SquareRegion::new(GridPoint::new(2, 2), 1);
    let b = SquareRegion::new(GridPoint::new(2, 3), 1);
    let sum = ok(ok(BifiltrationGrid::interval_module(cols, rows, |x| a.contains(x)))?
        .direct_sum(&ok(BifiltrationGrid::interval_module(cols, rows, |x| b.contains(x)))?))?;
    let union = ok(BifiltrationGrid::interval_module(cols, rows, |x| a.contains(x) || b.contains(x)))?;
    let (ls, lu) = (ok(compute_landscape(&sum, 3))?, ok(compute_landscape(&union, 3))?);
    for p in [1.0, 2.0, f64::INFINITY] {
        let d = ok(distance_p(&ls, &lu, p))?;
        ensure!(d == 0.0, "distance at p = {p} is {d}");
    }
    ensure!(ls.values[0].iter().flatten().any(|&v| v > 0), "landscape is identically zero");
    Ok("distance 0 for p = 1, 2, inf".into())
}

// ---------------------------------------------------------------- criteria 6 and 7

/// 4-connected components of the nonzero cells.
fn components(layer: &[Vec<u32>]) -> Vec<Vec<(usize, usize)>> {
    let (rows, cols) = (layer.len(), layer.first().map_or(0, Vec::len));
    let mut seen = vec![vec![false; cols]; rows];
    let mut out = Vec::new();
    for r0 in 0..rows {
        for c0 in 0..cols {
            if layer[r0][c0] == 0 || seen[r0][c0] {
                continue;
            }
            seen[r0][c0] = true;
            let mut stack = vec![(r0, c0)];
            let mut cells = Vec::new();
            while let Some((r, c)) = stack.pop() {
                cells.push((r, c));
                let mut near = vec![];
                if r > 0 {
                    near.push((r - 1, c));
                }
                if c > 0 {
                    near.push((r, c - 1));
                }
                if r + 1 < rows {
                    near.push((r + 1, c));
                }
                if c + 1 < cols {
                    near.push((r, c + 1));
                }
                for (a, b) in near {
                    if layer[a][b] > 0 && !seen[a][b] {
                        seen[a][b] = true;
                        stack.push((a, b));
                    }
                }
            }
            out.push(cells);
        }
    }
    out
}

fn column_extent(cells: impl IntoIterator<Item = (usize, usize)>) -> Option<(usize, usize)> {
    cells.into_iter().fold(None, |acc, (_, c)| match acc {
        None => Some((c, c)),
        Some((lo, hi)) => Some((lo.min(c), hi.max(c))),
    })
}

fn nonzero_cells(layer: &[Vec<u32>]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (r, row) in layer.iter().enumerate() {
        for (c, &v) in row.iter().enumerate() {
            if v > 0 {
                out.push((r, c));
            }
        }
    }
    out
}

fn sine_landscapes() -> Result<(BifiltrationGrid, Landscape, BifiltrationGrid, Landscape), String> {
    let cfg = PipelineConfig { seed: 1, ..Default::default() };
    let params = SineParams::default();
    let plain = ok(noisy(&ok(params.plain())?, 30.0, 1))?;
    let jump = ok(noisy(&ok(params.with_jump())?, 30.0, 1))?;
    let gp = ok(run_grid(&plain, &cfg))?;
    let lp = ok(compute_landscape(&gp, cfg.k_max))?;
    let gj = ok(run_grid(&jump, &cfg))?;
    let lj = ok(compute_landscape(&gj, cfg.k_max))?;
    Ok((gp, lp, gj, lj))
}

fn sine_experiments(shared: &mut Shared) -> Outcome {
    let (gp, lp, gj, lj) = sine_landscapes()?;
    ensure!((lp.t_windows, lp.cols) == (16, 31), "unexpected grid width {}", lp.cols);

    ensure!(lp.values[1].iter().flatten().all(|&v| v == 0), "plain sine: lambda_2 is not identically zero");
    let comps = components(&lp.values[0]);
    ensure!(comps.len() == 1, "plain sine: {} components", comps.len());
    let (lo, hi) = column_extent(comps[0].iter().copied()).unwrap();
    let frac = (hi - lo + 1) as f64 / lp.cols as f64;
    ensure!(frac >= 0.9, "plain sine: support columns {lo}..{hi} cover {frac:.3}");

    let center = lj.cols / 2;
    ensure!((0..lj.rows).all(|r| lj.values[0][r][center] == 0), "jump: column {center} is nonzero");
    let jc = components(&lj.values[0]);
    ensure!(jc.len() == 2, "jump: {} components", jc.len());
    let sides: Vec<(usize, usize)> = jc.iter().map(|c| column_extent(c.iter().copied()).unwrap()).collect();
    ensure!(
        sides.iter().any(|&(_, hi)| hi < center) && sides.iter().any(|&(lo, _)| lo > center),
        "jump: components {sides:?} do not sit on both sides of column {center}"
    );

    shared.artifacts.push(("sine".into(), ok(lp.to_json())?));
    shared.artifacts.push(("sine-jump".into(), ok(lj.to_json())?));
    shared.checked.push(("sine".into(), gp, lp));
    shared.checked.push(("sine-jump".into(), gj, lj));
    Ok(format!(
        "sine: 1 component over columns {lo}..{hi} ({:.1}%), lambda_2 = 0; jump: column {center} empty, 2 components {sides:?}",
        100.0 * frac
    ))
}

fn selkov_landscape() -> Result<(BifiltrationGrid, Landscape), String> {
    let cfg = PipelineConfig::selkov();
    let ts = ok(SelkovParams::default().series())?;
    let g = ok(run_grid(&ts, &cfg))?;
    let l = ok(compute_landscape(&g, cfg.k_max))?;
    Ok((g, l))
}

fn selkov_experiment(shared: &mut Shared) -> Outcome {
    let (g, l) = selkov_landscape()?;
    ensure!(l.cols == 23, "expected 23 zigzag columns, got {}", l.cols);
    let Some((row, col)) = l.to_mean().argmax(1) else {
        return Err("empty landscape".into());
    };
    let peak = l.values[0][row][col];
    let Some((lo, hi)) = column_extent(nonzero_cells(&l.values[0])) else {
        return Err("lambda_1 is identically zero".into());
    };
    // zigzag indices are reported 1-based
    let (arg, left, right) = (col + 1, lo + 1, hi + 1);
    let detail = format!(
        "argmax index {arg} (row {row}), support indices {left}..{right}, peak {peak}; 0-based: argmax {col}, support {lo}..{hi}"
    );
    ensure!((10..=15).contains(&arg), "argmax outside 10..15: {detail}");
    ensure!((5..=9).contains(&left) && (16..=20).contains(&right), "support edges off 7..18 by more than 2: {detail}");
    ensure!(peak >= 3, "peak below 3: {detail}");
    shared.artifacts.push(("selkov".into(), ok(l.to_json())?));
    shared.checked.push(("selkov".into(), g, l));
    Ok(detail)
}

// ---------------------------------------------------------------- criterion 8

fn selkov_mean() -> Result<MeanLandscape, String> {
    let base = ok(SelkovParams::default().series())?;
    let runs = (1..=30u64)
        .into_par_iter()
        .map(|seed| {
            let cfg = PipelineConfig { seed, ..PipelineConfig::selkov() };
            let ts = ok(noisy(&base, 30.0, seed))?;
            ok(compute_landscape(&ok(run_grid(&ts, &cfg))?, cfg.k_max))
        })
        .collect::<Result<Vec<_>, String>>()?;
    ok(mean(&runs))
}

fn mean_robustness(shared: &mut Shared) -> Outcome {
    let m = selkov_mean()?;
    let Some((row, col)) = m.argmax(1) else {
        return Err("empty mean landscape".into());
    };
    let detail = format!("mean argmax index {} (row {row}, value {:.3}); 0-based column {col}", col + 1, m.values[0][row][col]);
    ensure!((6..=17).contains(&(col + 1)), "outside 6..17: {detail}");
    shared.artifacts.push(("selkov-mean".into(), ok(m.to_json())?));
    Ok(detail)
}

// ---------------------------------------------------------------- criterion 9

fn determinism(shared: &mut Shared) -> Outcome {
    ensure!(shared.artifacts.len() == 4, "criteria 6 to 8 left {} artifacts, expected 4", shared.artifacts.len());
    let (_, lp, _, lj) = sine_landscapes()?;
    let (_, ls) = selkov_landscape()?;
    let m = selkov_mean()?;
    let again = [ok(lp.to_json())?, ok(lj.to_json())?, ok(ls.to_json())?, ok(m.to_json())?];
    for ((name, first), second) in shared.artifacts.iter().zip(&again) {
        ensure!(first.as_bytes() == second.as_bytes(), "{name}: JSON differs between runs");
    }
    Ok(format!("{} artifacts byte-identical", again.len()))
}

// ----------------------------------------------------------------

type Check = fn(&mut Shared) -> Outcome;

fn main() -> ExitCode {
    let plan: [(usize, &str, Duration, Check); 9] = [
        (1, "worked zigzag example", Duration::from_secs(1), worked_example),
        (2, "zigzag round trip", Duration::from_secs(30), zigzag_round_trip),
        (3, "boundary path equals interval rank", Duration::from_secs(120), path_matches_oracle),
        (5, "pseudo-distance example", Duration::from_secs(60), pseudo_distance),
        (6, "sine experiments", Duration::from_secs(600), sine_experiments),
        (7, "Sel'kov landscape", Duration::from_secs(600), selkov_experiment),
        (8, "mean landscape robustness", Duration::from_secs(1800), mean_robustness),
        (4, "landscape properties", Duration::from_secs(600), landscape_properties),
        (9, "determinism", Duration::from_secs(2400), determinism),
    ];
    let mut shared = Shared::default();
    let mut results = Vec::new();
    for (n, name, limit, check) in plan {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(|| check(&mut shared)))
            .unwrap_or_else(|p| Err(format!("panicked: {}", panic_message(&p))));
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(msg) if took > limit => Err(format!("{msg}; took {took:.2?}, limit {limit:?}")),
            other => other,
        };
        let pass = outcome.is_ok();
        let msg = outcome.unwrap_or_else(|e| e);
        println!("criterion {n}: {} {name} [{took:.2?}] {msg}", if pass { "PASS" } else { "FAIL" });
        results.push((n, pass));
    }
    results.sort();
    let failed: Vec<usize> = results.iter().filter(|r| !r.1).map(|r| r.0).collect();
    let line: Vec<String> = results.iter().map(|(n, p)| format!("{n}:{}", if *p { "PASS" } else { "FAIL" })).collect();
    println!("acceptance summary: {}", line.join(" "));
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failed criteria: {failed:?}");
        ExitCode::FAILURE
    }
}

fn panic_message(p: &Box<dyn std::any::Any + Send>) -> String {
    p.downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| p.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "unknown panic".into())
}
