//! Acceptance suite. Each test prints one `[criterion N] PASS|FAIL` line.
//!
//! Run with `cargo test -p ncrank --test acceptance -- --nocapture --test-threads 1`.

use std::time::{Duration, Instant};

use ncrank::arith::{rat, BigInt, BigRational, Gfp, Prime};
use ncrank::bilinear::{check_rank_identity, orth_left, orth_right, restricted_rank, SymbolicMatrix};
use ncrank::cli::{cmd_ncrank, NcrankArgs, SolverArgs};
use ncrank::frames::{common_frame, orthogonal_frame, retraction, Frame};
use ncrank::io::{Instance, Metadata, NcRankResult};
use ncrank::linalg::{CoSubspace, LatticeElement, Matrix, Subspace};
use ncrank::oracle::{all_optimal_pairs, blowup_lower_bound, blowup_rank_bound, brute_force_mvsp, brute_force_mvsp_by_x};
use ncrank::orthoscheme::{distance_in_frame, f_coordinates, g_tilde_eval, recover, unzip, zip, ChainPoint, FCoordinates, ProductPoint};
use ncrank::sppa::{dim_update, p2_objective, solve_p2_coordinate, sppa_run, Side, SolverConfig};
use ncrank::valdet::{valdet_run, IntSymbolicMatrix, Verdict};
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(criterion: usize, pass: bool, detail: &str) {
    println!("[criterion {criterion}] {}: {detail}", if pass { "PASS" } else { "FAIL" });
}

fn gf(p: u64) -> Gfp {
    Gfp::new(p).unwrap()
}

fn random_matrix(rng: &mut ChaCha8Rng, p: u64, n: usize) -> Matrix<u64> {
    Matrix::from_fn(n, n, |_, _| rng.gen_range(0..p))
}

fn random_subspace(rng: &mut ChaCha8Rng, field: Gfp, n: usize) -> Subspace {
    let k = rng.gen_range(0..=n);
    let rows: Vec<Vec<u64>> = (0..k).map(|_| (0..n).map(|_| rng.gen_range(0..field.p())).collect()).collect();
    Subspace::from_vectors(field, n, &rows).unwrap()
}

/// A random chain from `{0}` to `full`, possibly with gaps.
fn random_chain(rng: &mut ChaCha8Rng, field: Gfp, n: usize) -> Vec<Subspace> {
    let mut cur = Subspace::zero(field, n);
    let mut out = vec![cur.clone()];
    while !cur.is_full() {
        let v: Vec<u64> = (0..n).map(|_| rng.gen_range(0..field.p())).collect();
        cur = cur.with_vector(&v);
        if rng.gen_bool(0.7) || cur.is_full() {
            out.push(cur.clone());
        }
    }
    out.dedup();
    out
}

fn co_chain(c: &[Subspace]) -> Vec<CoSubspace> {
    c.iter().map(CoSubspace::from_primal).collect()
}

/// The 200 seeded GF(2)/GF(3) instances with `n, m ≤ 3` and varying density.
fn criterion1_instances() -> Vec<SymbolicMatrix> {
    (0..200u64)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(i);
            let p = [2, 3][(i % 2) as usize];
            let n = 1 + (i / 2 % 3) as usize;
            let m = 1 + (i / 6 % 3) as usize;
            let density = [0.25, 0.5, 1.0][(i / 18 % 3) as usize];
            let mats = (0..m)
                .map(|_| Matrix::from_fn(n, n, |_, _| if rng.gen_bool(density) { rng.gen_range(0..p) } else { 0 }))
                .collect();
            SymbolicMatrix::new(gf(p), mats).unwrap()
        })
        .collect()
}

#[test]
fn criterion_1_oracle_equivalence() {
    let dir = tempfile::tempdir().unwrap();
    let start = Instant::now();
    let instances = criterion1_instances();
    let mut mismatches = Vec::new();
    let mut singular = 0;
    for (i, a) in instances.iter().enumerate() {
        let input = dir.path().join(format!("in{i}.json"));
        let output = dir.path().join(format!("out{i}.json"));
        std::fs::write(&input, Instance::from_symbolic(a, Metadata::default()).to_json()).unwrap();
        let args = NcrankArgs {
            file: input,
            solver: SolverArgs { max_cycles: None, certify_dmax: None, trials: None, seed: i as u64, threads: None },
            output: Some(output.clone()),
        };
        let code = cmd_ncrank(&args).unwrap();
        let result: NcRankResult = serde_json::from_str(&std::fs::read_to_string(&output).unwrap()).unwrap();
        let reverified = result.verify(a).is_ok();
        let (_, truth) = brute_force_mvsp(a).unwrap();
        singular += usize::from(truth < a.n());
        if code != 0 || !result.certified || result.nc_rank != truth || !reverified {
            mismatches.push((i, code, result.nc_rank, truth));
        }
    }
    let elapsed = start.elapsed();
    let pass = mismatches.is_empty() && elapsed < Duration::from_secs(600);
    report(
        1,
        pass,
        &format!(
            "{}/{} certified and equal to brute force ({singular} nc-singular), {:.1}s; mismatches {:?}",
            instances.len() - mismatches.len(),
            instances.len(),
            elapsed.as_secs_f64(),
            mismatches
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_2_skew_separation() {
    let mut ok = true;
    let mut details = Vec::new();
    for p in [2u64, 3] {
        let a = SymbolicMatrix::from_i64(
            gf(p),
            &[
                vec![vec![0, 1, 0], vec![-1, 0, 0], vec![0, 0, 0]],
                vec![vec![0, 0, 1], vec![0, 0, 0], vec![-1, 0, 0]],
                vec![vec![0, 0, 0], vec![0, 0, 1], vec![0, -1, 0]],
            ],
        )
        .unwrap();
        let state = sppa_run(&a, &SolverConfig::defaults(3)).unwrap();
        let commutative = blowup_rank_bound(&a, 1, 32, 7).unwrap();
        let d2 = blowup_rank_bound(&a, 2, 32, 7).unwrap();
        let brute = brute_force_mvsp(&a).unwrap().1;
        let good = state.certified && state.best_feasible.value == 3 && brute == 3 && commutative.rank == 2 && d2.rank == 6;
        ok &= good;
        details.push(format!(
            "GF({p}): nc-rank {} (certified {}), commutative estimate {}, d=2 blow-up rank {}",
            state.best_feasible.value, state.certified, commutative.rank, d2.rank
        ));
    }
    report(2, ok, &details.join("; "));
    assert!(ok);
}

#[test]
fn criterion_3_bilinear_identities() {
    let mut violations = [0usize; 7];
    let tuples = 10_000;
    for t in 0..tuples {
        let mut rng = ChaCha8Rng::seed_from_u64(30_000 + t as u64);
        let p = if t % 2 == 0 { 2 } else { 3 };
        let f = gf(p);
        let a = random_matrix(&mut rng, p, 3);
        let [x, x2, y, y2] = std::array::from_fn(|_| random_subspace(&mut rng, f, 3));

        if !check_rank_identity(&f, &a, &x, &y).unwrap() {
            violations[0] += 1;
        }
        let big = x.join(&x2).unwrap();
        let px = orth_right(&f, &a, &x).unwrap();
        let px2 = orth_right(&f, &a, &x2).unwrap();
        let pbig = orth_right(&f, &a, &big).unwrap();
        if !px.contains(&pbig) || px.dim() - pbig.dim() > big.dim() - x.dim() {
            violations[1] += 1;
        }
        if pbig != px.meet(&px2).unwrap() {
            violations[2] += 1;
        }
        let pp = orth_left(&f, &a, &px).unwrap();
        if !pp.contains(&x) {
            violations[3] += 1;
        }
        if orth_right(&f, &a, &pp).unwrap() != px {
            violations[4] += 1;
        }
        let r = |x: &Subspace, y: &Subspace| restricted_rank(&f, &a, x, y).unwrap();
        let lhs = r(&x, &y) + r(&x2, &y2);
        let rhs = r(&x.meet(&x2).unwrap(), &y.join(&y2).unwrap()) + r(&big, &y.meet(&y2).unwrap());
        if lhs < rhs {
            violations[5] += 1;
        }
        let feasible = r(&x, &y) == 0;
        if feasible != (y.dim() == y.meet(&px).unwrap().dim()) {
            violations[6] += 1;
        }
    }
    let total: usize = violations.iter().sum();
    report(
        3,
        total == 0,
        &format!(
            "{tuples} tuples over GF(2)^3 and GF(3)^3; violations [rank identity {}, perp order {}, perp of sum {}, double perp {}, triple perp {}, submodular {}, feasibility {}]",
            violations[0], violations[1], violations[2], violations[3], violations[4], violations[5], violations[6]
        ),
    );
    assert_eq!(total, 0);
}

fn registers<E: LatticeElement>(frame: &Frame<E>, chain: &[E]) -> bool {
    frame.check() && chain.iter().all(|e| frame.locate(e).is_some_and(|s| &frame.join(&s) == e))
}

#[test]
fn criterion_4_frame_suite() {
    let pairs = 1000;
    let (mut common_bad, mut orth_bad, mut retract_bad) = (0, 0, 0);
    for t in 0..pairs {
        let mut rng = ChaCha8Rng::seed_from_u64(40_000 + t as u64);
        let p = if t % 2 == 0 { 2 } else { 3 };
        let n = 2 + t % 3;
        let f = gf(p);
        let c = random_chain(&mut rng, f, n);
        let d = random_chain(&mut rng, f, n);

        let fr = common_frame(&c, &d, f, n).unwrap();
        let (cm, dm) = (co_chain(&c), co_chain(&d));
        let frm = common_frame(&cm, &dm, f, n).unwrap();
        if !registers(&fr, &c) || !registers(&fr, &d) || !registers(&frm, &cm) || !registers(&frm, &dm) {
            common_bad += 1;
        }

        let a = random_matrix(&mut rng, p, n);
        let of = orthogonal_frame(f, &a, &c, &dm).unwrap();
        let located = c.iter().all(|x| of.e.membership(x).is_some()) && dm.iter().all(|y| of.f.membership(y).is_some());
        if !of.check(&a) || !located || !registers(&of.e, &c) || !registers(&of.f, &dm) {
            orth_bad += 1;
        }

        let lower = random_subspace(&mut rng, f, n);
        let extra = random_subspace(&mut rng, f, n);
        let upper = lower.join(&extra).unwrap();
        let (rl, ru) = (retraction(&lower, &fr), retraction(&upper, &fr));
        let (rlm, rum) = (retraction(&CoSubspace::from_primal(&upper), &frm), retraction(&CoSubspace::from_primal(&lower), &frm));
        if rl.dim() != lower.dim() || ru.dim() != upper.dim() || !ru.contains(&rl) || rlm.rank() != n - upper.dim() || !rlm.precedes(&rum) {
            retract_bad += 1;
        }
    }
    let pass = common_bad + orth_bad + retract_bad == 0;
    report(
        4,
        pass,
        &format!("{pairs} chain pairs (n = 2..4, GF(2)/GF(3)); failures: common frame {common_bad}, orthogonal frame {orth_bad}, retraction {retract_bad}"),
    );
    assert!(pass);
}

fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap()
}

/// Ternary search on `[0, 1]` with probes at `f64` points and exact
/// comparisons of `phi`.
fn ternary(phi: impl Fn(&BigRational) -> BigRational) -> f64 {
    let exact = |u: f64| BigRational::from_float(u).unwrap();
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..70 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if phi(&exact(m1)) <= phi(&exact(m2)) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    (lo + hi) / 2.0
}

#[test]
fn criterion_5_resolvent_optimality() {
    let samples = 10_000;
    let grid: Vec<f64> = (0..200).map(|i| i as f64 / 199.0).collect();
    let mut p2_bad = 0;
    let mut worst_p2 = f64::NEG_INFINITY;
    let mut p1_bad = 0;
    let mut worst_p1 = 0.0f64;
    for t in 0..samples {
        let mut rng = ChaCha8Rng::seed_from_u64(50_000 + t as u64);
        let den = rng.gen_range(1..=64i64);
        let x0 = rat(rng.gen_range(0..=den), den);
        let y0 = rat(rng.gen_range(0..=den), den);
        let lam = rat(rng.gen_range(1..=400), rng.gen_range(1..=100));

        let (x, y) = solve_p2_coordinate(&x0, &y0, &lam);
        let best = to_f64(&p2_objective(&x, &y, &x0, &y0, &lam));
        let (fx0, fy0, fl) = (to_f64(&x0), to_f64(&y0), to_f64(&lam));
        let mut grid_min = f64::INFINITY;
        for &gx in &grid {
            for &gy in &grid {
                let v = (gx - gy).max(0.0) + ((gx - fx0).powi(2) + (gy - fy0).powi(2)) / (2.0 * fl);
                grid_min = grid_min.min(v);
            }
        }
        worst_p2 = worst_p2.max(best - grid_min);
        if best > grid_min + 1e-12 {
            p2_bad += 1;
        }

        let u0 = x0.clone();
        let eps = rat(1, rng.gen_range(2..=48));
        let step = rat(rng.gen_range(1..=200), rng.gen_range(1..=20));
        for side in [Side::L, Side::M] {
            let sign = rat(if side == Side::L { -1 } else { 1 }, 1);
            let closed = to_f64(&dim_update(&u0, side, &step, &eps));
            let searched = ternary(|u| &sign * u + &eps * u * u + (u - &u0) * (u - &u0) / (rat(2, 1) * &step));
            worst_p1 = worst_p1.max((closed - searched).abs());
            if (closed - searched).abs() > 1e-9 {
                p1_bad += 1;
            }
        }
    }
    let pass = p2_bad == 0 && p1_bad == 0;
    report(
        5,
        pass,
        &format!(
            "{samples} samples: penalty subproblem beaten by the 200x200 grid {p2_bad} times (max excess {worst_p2:.2e}); dimension update off ternary search by >1e-9 {p1_bad} times (max {worst_p1:.2e})"
        ),
    );
    assert!(pass);
}

/// Smallest `g̃` over optimal vertices, an upper bound on `min g̃`.
fn vertex_upper(a: &SymbolicMatrix, cfg: &SolverConfig) -> BigRational {
    all_optimal_pairs(a)
        .unwrap()
        .into_iter()
        .map(|pair| {
            let z = ProductPoint::new(ChainPoint::vertex(pair.x.clone()), ChainPoint::vertex(pair.y_co())).unwrap();
            g_tilde_eval(a, &z, cfg.penalty, &cfg.perturbation)
        })
        .min()
        .unwrap()
}

#[test]
fn criterion_6_convergence_before_certification() {
    // `g*` = nc-rank − 2n bounds `min g̃` from below, so `g̃(z) − g* ≤ ½`
    // proves the iterate is within ½; `g̃(z) − vertex_upper > ½` disproves it.
    let half = rat(1, 2);
    let instances = criterion1_instances();
    let (mut reached, mut refuted, mut undecided) = (Vec::new(), Vec::new(), Vec::new());
    let mut relaxed_reached = 0;
    let mut relaxed_total = 0;
    let mut gaps_at_certification = Vec::new();
    for (i, a) in instances.iter().enumerate() {
        let n = a.n();
        let cfg = SolverConfig { seed: i as u64, ..SolverConfig::defaults(n) };
        let state = sppa_run(a, &cfg).unwrap();
        let truth = brute_force_mvsp(a).unwrap().1;
        let g_star = BigRational::from_integer(BigInt::from(truth as i64 - 2 * n as i64));
        let upper = vertex_upper(a, &cfg);
        let until = state.certified_at.unwrap_or(state.cycle);
        let window = &state.trace[..=until];
        let gap_low = window.iter().map(|e| &e.g_tilde - &upper).min().unwrap();
        let gap_high = window.iter().map(|e| &e.g_tilde - &g_star).min().unwrap();
        if gap_high <= half {
            reached.push(i);
        } else if gap_low > half {
            refuted.push(i);
            gaps_at_certification.push(to_f64(&(&state.trace[until].g_tilde - &g_star)));
            relaxed_total += 1;
            let long = SolverConfig { stop_on_certify: false, ..cfg.clone() };
            let full = sppa_run(a, &long).unwrap();
            if full.trace.iter().any(|e| &e.g_tilde - &g_star <= half) {
                relaxed_reached += 1;
            }
        } else {
            undecided.push(i);
        }
    }
    let max_gap = gaps_at_certification.iter().cloned().fold(0.0f64, f64::max);
    println!(
        "[criterion 6] info: relaxed variant (run past certification, max_cycles = {}): {relaxed_reached}/{relaxed_total} refuted instances reach the ½ band",
        SolverConfig::defaults(3).max_cycles
    );
    let pass = refuted.is_empty() && undecided.is_empty();
    report(
        6,
        pass,
        &format!(
            "{}/{} instances within ½ of min g̃ by the certifying cycle; {} provably outside (largest gap at certification {max_gap:.3}), {} undecided; refuted {:?}",
            reached.len(),
            instances.len(),
            refuted.len(),
            undecided.len(),
            refuted
        ),
    );
    assert!(pass);
}

/// Integer instances for criterion 7: dense, sparse, and hidden zero block.
fn criterion7_instances() -> Vec<IntSymbolicMatrix> {
    (0..100u64)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(70_000 + i);
            let n = 1 + (i % 3) as usize;
            let m = 1 + (i / 3 % 3) as usize;
            let kind = i / 9 % 3;
            let mats: Vec<Vec<Vec<i64>>> = match kind {
                0 => (0..m).map(|_| (0..n).map(|_| (0..n).map(|_| rng.gen_range(-5..=5)).collect()).collect()).collect(),
                1 => (0..m)
                    .map(|_| (0..n).map(|_| (0..n).map(|_| if rng.gen_bool(0.3) { rng.gen_range(-5..=5) } else { 0 }).collect()).collect())
                    .collect(),
                _ => hidden_block(&mut rng, n, m),
            };
            IntSymbolicMatrix::from_i64(&mats).unwrap()
        })
        .collect()
}

/// `S B_i T` with an `r × s` zero block in every `B_i`, `r + s = n + 1`,
/// and unimodular `S`, `T`; retried until every entry lies in `[-5, 5]`.
fn hidden_block(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Vec<Vec<Vec<i64>>> {
    let r = rng.gen_range(1..=n);
    let s = n + 1 - r;
    loop {
        let unimodular = |rng: &mut ChaCha8Rng| {
            let mut u: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
            for _ in 0..n {
                let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
                if a != b {
                    let c = if rng.gen_bool(0.5) { 1 } else { -1 };
                    let source = u[b].clone();
                    for (dst, v) in u[a].iter_mut().zip(source) {
                        *dst += c * v;
                    }
                }
            }
            u
        };
        let su = unimodular(rng);
        let tu = unimodular(rng);
        let mats: Vec<Vec<Vec<i64>>> = (0..m)
            .map(|_| {
                let b: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| if i < r && j < s { 0 } else { rng.gen_range(-2..=2) }).collect()).collect();
                (0..n)
                    .map(|i| (0..n).map(|j| (0..n).flat_map(|k| (0..n).map(move |l| (k, l))).map(|(k, l)| su[i][k] * b[k][l] * tu[l][j]).sum()).collect())
                    .collect()
            })
            .collect();
        if mats.iter().flatten().flatten().all(|v: &i64| v.abs() <= 5) {
            return mats;
        }
    }
}

#[test]
fn criterion_7_valdet() {
    let big = gf((1 << 31) - 1);
    let checks = [gf(101), gf(103), gf(107)];
    let mut mismatches = Vec::new();
    let mut increment_bad = 0;
    let (mut regular, mut singular, mut steps) = (0, 0, 0);
    for (i, a) in criterion7_instances().iter().enumerate() {
        let n = a.n();
        let p = Prime::new([2, 3, 5][i % 3]).unwrap();
        let cfg = SolverConfig { seed: i as u64, ..SolverConfig::defaults(n) };
        let v = match valdet_run(a, p, &cfg) {
            Ok(v) => v,
            Err(e) => {
                mismatches.push(format!("#{i}: {e}"));
                continue;
            }
        };
        steps += v.state.iterations;
        let mut sum = 0;
        for rec in &v.state.transcript {
            sum += rec.increment;
            if rec.increment as i64 != (rec.r + rec.s) as i64 - n as i64 {
                increment_bad += 1;
            }
        }
        if sum != v.objective {
            increment_bad += 1;
        }
        match v.verdict {
            Verdict::Regular => {
                regular += 1;
                let w = blowup_lower_bound(&a.reduce(big), n.saturating_sub(1).max(1), 16, i as u64);
                if w.bound != n {
                    mismatches.push(format!("#{i}: regular but blow-up bound {} < {n}", w.bound));
                }
            }
            Verdict::Singular => {
                singular += 1;
                let values: Vec<usize> = checks.iter().map(|&q| brute_force_mvsp_by_x(&a.reduce(q)).unwrap().1).collect();
                if values.iter().any(|&v| v >= n) || values.windows(2).any(|w| w[0] != w[1]) {
                    mismatches.push(format!("#{i}: singular but GF(q) nc-ranks {values:?}"));
                }
            }
            Verdict::Inconclusive => mismatches.push(format!("#{i}: inconclusive")),
        }
    }
    let pass = mismatches.is_empty() && increment_bad == 0;
    report(
        7,
        pass,
        &format!("100 integer instances: {regular} regular, {singular} singular, {steps} descent steps; increment violations {increment_bad}; mismatches {mismatches:?}"),
    );
    assert!(pass);
}

fn frame_diameter_ok<E: LatticeElement>(frame: &Frame<E>, field: Gfp, n: usize) -> bool {
    let bottom = f_coordinates(&ChainPoint::vertex(E::bottom(field, n)), frame).unwrap();
    let top = f_coordinates(&ChainPoint::vertex(E::top(field, n)), frame).unwrap();
    distance_in_frame(&bottom, &top).unwrap() == BigRational::from_integer(n.into())
}

fn random_coords(rng: &mut ChaCha8Rng, n: usize) -> Vec<BigRational> {
    (0..n)
        .map(|_| {
            let den = rng.gen_range(1..=12i64);
            rat(rng.gen_range(0..=den), den)
        })
        .collect()
}

#[test]
fn criterion_8_metric_checks() {
    let samples = 10_000;
    let (mut frames, mut diameter_bad, mut zip_bad) = (0, 0, 0);
    for t in 0..samples {
        let mut rng = ChaCha8Rng::seed_from_u64(80_000 + t as u64);
        let p = if t % 2 == 0 { 2 } else { 3 };
        let n = 1 + t % 4;
        let f = gf(p);
        let c = random_chain(&mut rng, f, n);
        let d = random_chain(&mut rng, f, n);
        let fx = common_frame(&c, &d, f, n).unwrap();
        let fy = common_frame(&co_chain(&d), &co_chain(&c), f, n).unwrap();
        let of = orthogonal_frame(f, &random_matrix(&mut rng, p, n), &c, &co_chain(&d)).unwrap();
        frames += 4;
        diameter_bad += [
            frame_diameter_ok(&fx, f, n),
            frame_diameter_ok(&fy, f, n),
            frame_diameter_ok(&of.e, f, n),
            frame_diameter_ok(&of.f, f, n),
        ]
        .iter()
        .filter(|ok| !**ok)
        .count();

        let x = recover(&FCoordinates { values: random_coords(&mut rng, n), frame_key: fx.key() }, &fx).unwrap();
        let y = recover(&FCoordinates { values: random_coords(&mut rng, n), frame_key: fy.key() }, &fy).unwrap();
        let z = ProductPoint::new(x, y).unwrap();
        let zz = zip(&z);
        let weights: BigRational = zz.terms.iter().map(|t| t.0.clone()).sum();
        if weights != rat(1, 1) || unzip(&zz).ok().as_ref() != Some(&z) {
            zip_bad += 1;
        }
    }
    let pass = diameter_bad == 0 && zip_bad == 0;
    report(
        8,
        pass,
        &format!("{frames} frames with distance²(0,1) ≠ n: {diameter_bad}; {samples} zip/unzip round trips failing: {zip_bad}"),
    );
    assert!(pass);
}

#[test]
fn criterion_9_bit_growth() {
    let mut solves = 0;
    let mut uncertified = Vec::new();
    let mut fitted = 0.0f64;
    let mut doubling = Vec::new();
    let mut worst_bits = 0;
    let mut seed = 90_000u64;
    while solves < 100 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        seed += 1;
        let n = 2 + (solves % 2);
        let m = 1 + (solves / 2 % 3);
        let mats = (0..m).map(|_| random_matrix(&mut rng, 2, n)).collect();
        let a = SymbolicMatrix::new(gf(2), mats).unwrap();
        let cfg = SolverConfig { stop_on_certify: false, max_cycles: 40, ..SolverConfig::defaults(n) };
        let state = sppa_run(&a, &cfg).unwrap();
        solves += 1;
        if !state.certified {
            uncertified.push(seed - 1);
            continue;
        }
        let bits: Vec<u64> = state.trace.iter().map(|e| e.max_denominator_bits).collect();
        for (k, &b) in bits.iter().enumerate().skip(1) {
            let scale = (k as f64) * ((n * m * k) as f64).log2().max(1.0);
            fitted = fitted.max(b as f64 / scale);
            worst_bits = worst_bits.max(b);
        }
        let mut run = 0;
        for w in bits.windows(2) {
            run = if w[0] > 0 && w[1] >= 2 * w[0] { run + 1 } else { 0 };
            if run >= 10 {
                doubling.push(seed - 1);
                break;
            }
        }
    }
    let pass = uncertified.is_empty() && doubling.is_empty();
    report(
        9,
        pass,
        &format!(
            "{solves} GF(2) solves of 40 cycles: fitted c = {fitted:.3} (bits ≤ c·k·log2(nmk)), max {worst_bits} bits; sustained doubling in {doubling:?}; uncertified {uncertified:?}"
        ),
    );
    assert!(pass);
}

