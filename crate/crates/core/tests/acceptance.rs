//! Acceptance suite. Each criterion prints one PASS/FAIL line and then asserts.

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use randmt::sim::{
    guo_rao_exact_fdr, guo_rao_sample, run_fcr_experiment, run_trials, sample_correlated_gaussian,
    summarize, superuniformity_stress, Coupling, Dependence, FcrConfig, Procedure, SimulationConfig,
    TrialOutcome, UMode,
};
use randmt::*;

fn report(id: u32, name: &str, pass: bool, detail: &str, elapsed: Duration, limit: Duration) -> bool {
    let ok = pass && elapsed < limit;
    println!(
        "criterion {id} ({name}): {}  [{detail}; {:.1}s, limit {}s]",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        limit.as_secs()
    );
    ok
}

fn alpha(v: f64) -> Alpha {
    Alpha::new(v).unwrap()
}

const KS: [usize; 5] = [1, 2, 5, 20, 50];
const ALPHAS: [f64; 6] = [0.01, 0.05, 0.1, 0.2, 0.5, 1.0];

/// E-values mixing likelihood-ratio values with exact e-BH levels, zeros,
/// infinities and ties.
fn mixed_evalues(rng: &mut ChaCha8Rng, k: usize, a: f64) -> Vec<f64> {
    let mut x: Vec<f64> = (0..k)
        .map(|_| match rng.random_range(0..10) {
            0 => 0.0,
            1 => f64::INFINITY,
            2 | 3 => k as f64 / (a * rng.random_range(1..=k) as f64),
            _ => {
                let mu = if rng.random_bool(0.4) { rng.random_range(1.0..4.0) } else { 0.0 };
                let z: f64 = rng.sample::<f64, _>(StandardNormal) + mu;
                let lam = rng.random_range(0.5..3.0);
                (lam * z - 0.5 * lam * lam).exp()
            }
        })
        .collect();
    if k > 1 && rng.random_bool(0.3) {
        let (i, j) = (rng.random_range(0..k), rng.random_range(0..k));
        x[i] = x[j];
    }
    x
}

/// P-values mixing uniforms, small values, BY levels, zeros, ones and ties.
fn mixed_pvalues(rng: &mut ChaCha8Rng, k: usize, a: f64) -> Vec<f64> {
    let ell: f64 = (1..=k).map(|i| 1.0 / i as f64).sum();
    let mut p: Vec<f64> = (0..k)
        .map(|_| match rng.random_range(0..10) {
            0 => 0.0,
            1 => 1.0,
            2 | 3 => a * rng.random_range(1..=k) as f64 / (k as f64 * ell),
            4 | 5 => rng.random::<f64>() * a / ell,
            _ => rng.random::<f64>(),
        })
        .collect();
    if k > 1 && rng.random_bool(0.3) {
        let (i, j) = (rng.random_range(0..k), rng.random_range(0..k));
        p[i] = p[j];
    }
    p
}

fn draw(rng: &mut ChaCha8Rng) -> f64 {
    1.0 - rng.random::<f64>()
}

#[test]
fn criterion_1_dominance() {
    let start = Instant::now();
    let n = 10_000u64;
    let pairs = [
        "r1 >= ebh", "rboth >= r1", "r2 >= ebh", "u-ebh >= ebh", "j-ebh >= ebh", "pe-ebh >= ebh",
        "u-by >= by", "reshaped-u >= reshaped", "closed-u-hommel >= closed-hommel",
    ];
    let violations: Vec<[u64; 9]> = (0..n)
        .into_par_iter()
        .map(|t| {
            let mut rng = UniformSource::new(101).substream(t).rng();
            let k = KS[(t % 5) as usize];
            let a = ALPHAS[((t / 5) % 6) as usize];
            let al = alpha(a);
            let mut v = [0u64; 9];
            let x = EValues::new(mixed_evalues(&mut rng, k, a)).unwrap();
            let ug: Vec<f64> = (0..k).map(|_| draw(&mut rng)).collect();
            let ua: Vec<f64> = (0..k).map(|_| draw(&mut rng)).collect();
            let u = draw(&mut rng);
            let base = ebh(&x, al).discoveries;
            let d1 = r1_ebh(&x, al, &ug).unwrap().discoveries;
            let dr = rboth_ebh(&x, al, &ug, &ua).unwrap().discoveries;
            let pind = PValues::new((0..k).map(|_| rng.random::<f64>()).collect()).unwrap();
            let checks = [
                d1.is_superset_of(&base),
                dr.is_superset_of(&d1),
                r2_ebh(&x, al, &ua).unwrap().discoveries.is_superset_of(&base),
                u_ebh(&x, al, u).unwrap().discoveries.is_superset_of(&base),
                j_ebh(&x, al, &ug).unwrap().discoveries.is_superset_of(&base),
                pe_ebh(&x, &pind, al).unwrap().discoveries.is_superset_of(&base),
            ];
            for (i, c) in checks.iter().enumerate() {
                v[i] += u64::from(!c);
            }
            let p = PValues::new(mixed_pvalues(&mut rng, k, a)).unwrap();
            v[6] += u64::from(!u_by(&p, al, u).unwrap().discoveries.is_superset_of(&by(&p, al).discoveries));
            // A random reshaping measure on a few atoms.
            let atoms: Vec<(f64, f64)> = (0..3).map(|_| (rng.random_range(0.0..2.0 * k as f64), rng.random::<f64>() + 0.01)).collect();
            let total: f64 = atoms.iter().map(|a| a.1).sum();
            let beta = ReshapingFunction::discrete(atoms.iter().map(|&(x, m)| (x, m / total)).collect()).unwrap();
            let rb = reshaped_by(&p, al, &beta).discoveries;
            v[7] += u64::from(!reshaped_u_by(&p, al, &beta, u).unwrap().discoveries.is_superset_of(&rb));
            v[8] += u64::from(!closed_u_hommel(&p, al, u).unwrap().is_superset_of(&closed_hommel(&p, al)));
            v
        })
        .collect();
    let mut totals = [0u64; 9];
    for v in &violations {
        for i in 0..9 {
            totals[i] += v[i];
        }
    }
    let bad: Vec<String> = pairs
        .iter()
        .zip(totals)
        .filter(|(_, c)| *c > 0)
        .map(|(p, c)| format!("{p}: {c}"))
        .collect();
    let detail = format!("{n} instances x {} pairs, violations: {}", pairs.len(), if bad.is_empty() { "none".into() } else { bad.join(", ") });
    assert!(report(1, "dominance", bad.is_empty(), &detail, start.elapsed(), Duration::from_secs(60)));
}

#[test]
fn criterion_2_equivalences() {
    let start = Instant::now();
    // (a) U-eBH = BH on u/X = e-BH on X/u, and the rounding view.
    let a_fail: usize = (0..10_000u64)
        .into_par_iter()
        .filter(|&t| {
            let mut rng = UniformSource::new(202).substream(t).rng();
            let k = rng.random_range(1..=50);
            let a = ALPHAS[(t % 6) as usize];
            let al = alpha(a);
            let raw: Vec<f64> = (0..k)
                .map(|_| match rng.random_range(0..12) {
                    0 => 0.0,
                    1 => f64::INFINITY,
                    _ => (2.0 * rng.sample::<f64, _>(StandardNormal) + rng.random_range(0.0..3.0) - 2.0).exp(),
                })
                .collect();
            let u = draw(&mut rng);
            let x = EValues::new(raw.clone()).unwrap();
            let d = u_ebh(&x, al, u).unwrap().discoveries.rejected;
            let via_bh = bh(&PValues::new(raw.iter().map(|&v| u / v).collect()).unwrap(), al).rejected;
            let via_ebh = ebh(&EValues::new(raw.iter().map(|&v| v / u).collect()).unwrap(), al).discoveries.rejected;
            let via_ell = u_ebh_by_ell(&x, al, u).unwrap().rejected;
            !(d == via_bh && d == via_ebh && d == via_ell)
        })
        .count();
    // (b) U-BY = U-eBH on BY-calibrated e-values.
    let b_fail: usize = (0..1_000u64)
        .into_par_iter()
        .filter(|&t| {
            let mut rng = UniformSource::new(203).substream(t).rng();
            let k = rng.random_range(1..=50);
            let a = ALPHAS[(t % 6) as usize];
            let al = alpha(a);
            let ell: f64 = (1..=k).map(|i| 1.0 / i as f64).sum();
            let p: Vec<f64> = (0..k)
                .map(|_| match rng.random_range(0..10) {
                    0 => 0.0,
                    1 => 1.0,
                    2..=5 => rng.random::<f64>() * a / ell,
                    _ => rng.random::<f64>(),
                })
                .collect();
            let u = draw(&mut rng);
            let pv = PValues::new(p.clone()).unwrap();
            let ev = EValues::new(p.iter().map(|&q| by_calibrate(q, al, k).unwrap()).collect()).unwrap();
            u_by(&pv, al, u).unwrap().discoveries.rejected != u_ebh(&ev, al, u).unwrap().discoveries.rejected
                || by(&pv, al).discoveries.rejected != ebh(&ev, al).discoveries.rejected
        })
        .count();
    // (c) closed-testing shortcuts = brute force, K <= 10.
    let c_fail: usize = (0..1_000u64)
        .into_par_iter()
        .filter(|&t| {
            let mut rng = UniformSource::new(204).substream(t).rng();
            let k = rng.random_range(1..=10);
            let a = ALPHAS[(t % 6) as usize];
            let al = alpha(a);
            let pv = PValues::new(mixed_pvalues(&mut rng, k, a)).unwrap();
            let u = draw(&mut rng);
            let h = closed_hommel(&pv, al).rejected != closed_testing_bruteforce(&pv, al, hommel_local_test).unwrap().rejected;
            let hu = closed_u_hommel(&pv, al, u).unwrap().rejected
                != closed_testing_bruteforce(&pv, al, |s, a| u_hommel_local_test(s, a, u)).unwrap().rejected;
            h || hu
        })
        .count();
    let pass = a_fail == 0 && b_fail == 0 && c_fail == 0;
    let detail = format!("mismatches: (a) {a_fail}/10000, (b) {b_fail}/1000, (c) {c_fail}/1000");
    assert!(report(2, "equivalence oracles", pass, &detail, start.elapsed(), Duration::from_secs(120)));
}

/// Mean of `f(u) - x` over `n` draws and its standard error.
fn bias(f: impl Fn(f64) -> f64 + Sync, x: f64, n: usize, seed: u64, stream: u64) -> (f64, f64) {
    let u = UniformSource::new(seed).substream(stream).uniforms(n);
    let d: Vec<f64> = u.par_iter().map(|&u| f(u) - x).collect();
    randmt::sim::mean_se(&d)
}

#[test]
fn criterion_3_expectation_preservation() {
    let start = Instant::now();
    let n = 1_000_000;
    let mut checks = 0;
    let mut failures = Vec::new();
    let mut check = |label: String, (m, se): (f64, f64)| {
        checks += 1;
        if m.abs() > 4.0 * se {
            failures.push(format!("{label}: bias {m:.3e}, se {se:.3e}"));
        }
    };
    let grids = [
        Grid::new(vec![2.0, 4.0]).unwrap(),
        Grid::new(vec![0.0, 2.0, f64::INFINITY]).unwrap(),
        LevelGrid::new(10, alpha(0.1)).unwrap().grid().clone(),
        Grid::new(vec![0.0, 0.5, 1.0, 3.0, 7.5, 20.0]).unwrap(),
    ];
    let xs = [0.0, 0.3, 1.0, 1.2, 2.0, 2.5, 3.0, 3.999, 4.0, 5.0, 11.1, 19.0, 20.0, 33.0, 150.0];
    let mut stream = 0;
    for (gi, g) in grids.iter().enumerate() {
        for &x in &xs {
            stream += 1;
            check(format!("stochastic grid{gi} x={x}"), bias(|u| stochastic_round(g, x, u).value, x, n, 303, stream));
        }
    }
    for &ah in &[0.05, 0.3, 1.0] {
        for &x in &xs {
            stream += 1;
            check(format!("adaptive a={ah} x={x}"), bias(|u| adaptive_round(x, ah, u).unwrap(), x, n, 303, stream));
        }
    }
    // Joint rounding with one shared draw, coordinate by coordinate.
    let jx = EValues::new(vec![1.2, 3.0, 2.5, 0.0, 7.0]).unwrap();
    let jg: Vec<Grid> = vec![grids[1].clone(), grids[0].clone(), grids[3].clone(), grids[3].clone(), grids[2].clone()];
    stream += 1;
    let u = UniformSource::new(303).substream(stream).uniforms(n);
    let rounded: Vec<Vec<f64>> = u.par_iter().map(|&u| joint_round(&jx, &jg, u).unwrap().into_inner()).collect();
    for (i, &x) in jx.as_slice().iter().enumerate() {
        let d: Vec<f64> = rounded.iter().map(|r| r[i] - x).collect();
        check(format!("joint coord {i} x={x}"), randmt::sim::mean_se(&d));
    }
    for &(k, a) in &[(4usize, 0.5), (10, 0.1), (50, 0.05)] {
        let top = k as f64 / a;
        for frac in [0.0, 0.01, 0.1, 0.25, 0.5, 0.9, 1.0] {
            let x = frac * top;
            stream += 1;
            check(format!("uniform K={k} x={x}"), bias(|u| generalized_round_uniform(x, alpha(a), k, u).unwrap(), x, n, 303, stream));
            stream += 1;
            check(format!("equal K={k} x={x}"), bias(|u| generalized_round_equal(x, alpha(a), k, u).unwrap(), x, n, 303, stream));
        }
    }
    let detail = format!("{checks} (op, x, grid) cases at N = 10^6, failures: {}", if failures.is_empty() { "none".into() } else { failures.join("; ") });
    assert!(report(3, "expectation preservation", failures.is_empty(), &detail, start.elapsed(), Duration::from_secs(60)));
}

struct GridPoint {
    mu: f64,
    rho: f64,
    dependence: Dependence,
    outcomes: Vec<Vec<TrialOutcome>>,
}

static DESK_GRID: OnceLock<(Vec<GridPoint>, Duration)> = OnceLock::new();

fn desk_grid() -> &'static (Vec<GridPoint>, Duration) {
    DESK_GRID.get_or_init(|| {
        let start = Instant::now();
        let mut points = Vec::new();
        for dependence in [Dependence::ToeplitzPositive, Dependence::EquicorrelatedNegative] {
            for mu in [1.0, 2.0, 3.0, 4.0] {
                for rho in [0.0, 0.5, 0.9] {
                    let cfg = SimulationConfig {
                        k: 50,
                        pi0: 0.3,
                        mu,
                        rho,
                        dependence,
                        lambda: None,
                        trials: 200,
                        alpha: alpha(0.05),
                        seed: 404,
                        u_mode: UMode::Independent,
                    };
                    let outcomes = run_trials(&cfg, &Procedure::ALL).unwrap();
                    points.push(GridPoint { mu, rho, dependence, outcomes });
                }
            }
        }
        (points, start.elapsed())
    })
}

fn column(p: &GridPoint, proc_: Procedure) -> Vec<TrialOutcome> {
    let j = Procedure::ALL.iter().position(|&q| q == proc_).unwrap();
    p.outcomes.iter().map(|t| t[j].clone()).collect()
}

#[test]
fn criterion_4_fdr_control() {
    let start = Instant::now();
    let (points, build) = desk_grid();
    let mut failures = Vec::new();
    let mut worst = (0.0f64, String::new());
    for p in points {
        for proc_ in Procedure::ALL {
            let est = summarize(&column(p, proc_));
            let margin = est.fdr - (0.05 + 3.0 * est.fdr_se);
            let label = format!("{proc_} {} mu={} rho={}", p.dependence.name(), p.mu, p.rho);
            if est.fdr > worst.0 {
                worst = (est.fdr, label.clone());
            }
            if margin > 0.0 {
                failures.push(format!("{label}: fdr {:.4} se {:.4}", est.fdr, est.fdr_se));
            }
        }
    }
    let detail = format!(
        "{} grid points x {} procedures, max FDR {:.4} ({}), failures: {}",
        points.len(),
        Procedure::ALL.len(),
        worst.0,
        worst.1,
        if failures.is_empty() { "none".into() } else { failures.join("; ") }
    );
    assert!(report(4, "FDR control", failures.is_empty(), &detail, start.elapsed() + *build, Duration::from_secs(300)));
}

#[test]
fn criterion_5_paired_power() {
    let start = Instant::now();
    let (points, build) = desk_grid();
    let pairs = [
        (Procedure::UEbh, Procedure::Ebh),
        (Procedure::RbothEbh, Procedure::R1Ebh),
        (Procedure::UBy, Procedure::By),
    ];
    let mut negative = Vec::new();
    let mut strict = [0usize; 3];
    for p in points {
        for (i, &(hi, lo)) in pairs.iter().enumerate() {
            let a = column(p, hi);
            let b = column(p, lo);
            let per_trial_ok = a.iter().zip(&b).all(|(x, y)| x.power >= y.power);
            let diff = summarize(&a).power - summarize(&b).power;
            if !per_trial_ok || diff < 0.0 {
                negative.push(format!("{hi}-{lo} {} mu={} rho={}", p.dependence.name(), p.mu, p.rho));
            }
            if diff > 0.0 {
                strict[i] += 1;
            }
        }
    }
    let pass = negative.is_empty() && strict.iter().all(|&s| s >= 1);
    let detail = format!(
        "{} grid points; strictly positive at {}/{}/{} points (u-ebh, rboth, u-by); negative: {}",
        points.len(),
        strict[0],
        strict[1],
        strict[2],
        if negative.is_empty() { "none".into() } else { negative.join("; ") }
    );
    assert!(report(5, "paired power ordering", pass, &detail, start.elapsed() + *build, Duration::from_secs(300)));
}

#[test]
fn criterion_6_guo_rao() {
    let start = Instant::now();
    let (k, a, trials) = (100usize, 0.05, 10_000u64);
    let mut lines = Vec::new();
    let mut pass = true;
    for frac in [0.2, 0.5, 1.0] {
        let k0 = (frac * k as f64) as usize;
        let per_trial: Vec<(f64, bool)> = (0..trials)
            .into_par_iter()
            .map(|t| {
                let root = UniformSource::new(606).substream(k0 as u64).substream(t);
                let inst = guo_rao_sample(k, k0, a, &root.substream(0)).unwrap();
                let d = by(&inst.pvals, alpha(a)).discoveries;
                let du = u_by(&inst.pvals, alpha(a), root.substream(1).uniform()).unwrap().discoveries;
                let false_disc = d.rejected.iter().filter(|&&i| i < k0).count();
                let fdp = if d.is_empty() { 0.0 } else { false_disc as f64 / d.len() as f64 };
                (fdp, d.rejected == du.rejected)
            })
            .collect();
        let fdps: Vec<f64> = per_trial.iter().map(|x| x.0).collect();
        let (fdr, se) = randmt::sim::mean_se(&fdps);
        let same = per_trial.iter().filter(|x| x.1).count();
        let target = guo_rao_exact_fdr(k, k0, a).unwrap();
        let ok = (fdr - target).abs() <= 3.0 * se && same as u64 == trials;
        pass &= ok;
        lines.push(format!(
            "K0/K={frac}: MC FDR {fdr:.5} (se {se:.5}) vs closed form {target:.5} {}; identical BY/U-BY sets {same}/{trials}",
            if ok { "ok" } else { "MISMATCH" }
        ));
    }
    assert!(report(6, "Guo-Rao exactness", pass, &lines.join("; "), start.elapsed(), Duration::from_secs(120)));
}

#[test]
fn criterion_7_randomized_superuniformity() {
    let start = Instant::now();
    let k = 20;
    let c = 0.5 / k as f64;
    let beta = ReshapingFunction::by(k).unwrap();
    let mut lines = Vec::new();
    let mut pass = true;
    for (i, cp) in Coupling::ALL.into_iter().enumerate() {
        let e = superuniformity_stress(&beta, c, cp, k, 100_000, 707 + i as u64, None).unwrap();
        let ok = e.mean <= c + 3.0 * e.se;
        pass &= ok;
        lines.push(format!("{cp:?}: {:.5} (se {:.5}) vs c = {c}", e.mean, e.se));
    }
    assert!(report(7, "randomized superuniformity", pass, &lines.join("; "), start.elapsed(), Duration::from_secs(60)));
}

#[test]
fn criterion_8_fcr() {
    let start = Instant::now();
    let mut lines = Vec::new();
    let mut pass = true;
    for (dependence, rho) in [(Dependence::ToeplitzPositive, 0.5), (Dependence::EquicorrelatedNegative, 0.9)] {
        let cfg = FcrConfig {
            k: 50,
            pi0: 0.3,
            mu: 2.0,
            rho,
            dependence,
            threshold: 1.0,
            lambda: 2.0,
            trials: 2000,
            alpha: alpha(0.1),
            seed: 808,
        };
        for e in run_fcr_experiment(&cfg).unwrap() {
            let ok = e.fcr <= 0.1 + 3.0 * e.fcr_se && e.containment_failures == 0;
            pass &= ok;
            lines.push(format!(
                "{} {}: FCR {:.4} (se {:.4}), containment failures {}",
                dependence.name(),
                e.rule.name(),
                e.fcr,
                e.fcr_se,
                e.containment_failures
            ));
        }
    }
    assert!(report(8, "FCR control", pass, &lines.join("; "), start.elapsed(), Duration::from_secs(120)));
}

#[test]
fn criterion_9_global_null() {
    let start = Instant::now();
    let (k, a, trials) = (20usize, 0.05, 100_000u64);
    let structures = ["independent", "toeplitz-0.9", "equicorrelated-0.9", "guo-rao"];
    let mut lines = Vec::new();
    let mut pass = true;
    for (s, name) in structures.iter().enumerate() {
        let res: Vec<(f64, bool)> = (0..trials)
            .into_par_iter()
            .map(|t| {
                let root = UniformSource::new(909).substream(s as u64).substream(t);
                let p: Vec<f64> = match s {
                    0 => root.substream(0).uniforms(k),
                    1 | 2 => {
                        let dep = if s == 1 { Dependence::ToeplitzPositive } else { Dependence::EquicorrelatedNegative };
                        sample_correlated_gaussian(&vec![0.0; k], 0.9, dep, &mut root.substream(0).rng())
                            .unwrap()
                            .into_iter()
                            .map(randmt::sim::one_sided_p)
                            .collect()
                    }
                    _ => guo_rao_sample(k, k, a, &root.substream(0)).unwrap().pvals.into_inner(),
                };
                let pv = PValues::new(p).unwrap();
                let u = root.substream(1).uniform();
                let hu = u_hommel_p(&pv, u).unwrap().value;
                let h = hommel_p(&pv).value;
                (if hu <= a { 1.0 } else { 0.0 }, hu <= h)
            })
            .collect();
        let rej: Vec<f64> = res.iter().map(|r| r.0).collect();
        let (rate, se) = randmt::sim::mean_se(&rej);
        let dominated = res.iter().filter(|r| r.1).count() as u64;
        let ok = rate <= a + 3.0 * se && dominated == trials;
        pass &= ok;
        lines.push(format!("{name}: type I {rate:.5} (se {se:.5}), U-Hommel <= Hommel {dominated}/{trials}"));
    }
    assert!(report(9, "global-null type I error", pass, &lines.join("; "), start.elapsed(), Duration::from_secs(60)));
}

/// An e-value at least 10% of the local grid spacing (and 1e-3) away from
/// every e-BH level.
fn boundary_free(rng: &mut ChaCha8Rng, grid: &Grid) -> f64 {
    loop {
        let x = match rng.random_range(0..8) {
            0 => 0.0,
            _ => {
                let z: f64 = rng.sample::<f64, _>(StandardNormal) + rng.random_range(0.0..4.0);
                (2.0 * z - 2.0).exp()
            }
        };
        if x == 0.0 {
            return x;
        }
        match grid.neighbors(x) {
            None => return x,
            Some((_, hi)) if hi == f64::INFINITY => return x,
            Some((lo, hi)) => {
                let margin = (0.1 * (hi - lo)).max(1e-3);
                if x - lo >= margin && hi - x >= margin {
                    return x;
                }
            }
        }
    }
}

#[test]
fn criterion_10_derandomization() {
    let start = Instant::now();
    let runs = 10_000usize;
    let mismatches: Vec<u64> = (0..100u64)
        .into_par_iter()
        .filter_map(|t| {
            let src = UniformSource::new(1010).substream(t);
            let mut rng = src.substream(0).rng();
            let k = rng.random_range(5..=50);
            let a = [0.05, 0.1, 0.2][(t % 3) as usize];
            let lg = LevelGrid::new(k, alpha(a)).unwrap();
            let x: Vec<f64> = (0..k).map(|_| boundary_free(&mut rng, lg.grid())).collect();
            let mut sum = vec![0.0; k];
            for r in 0..runs as u64 {
                let u = src.substream(1).substream(r).uniforms(k);
                for i in 0..k {
                    sum[i] += stochastic_round(lg.grid(), x[i], u[i]).value;
                }
            }
            let avg: Vec<f64> = sum.iter().map(|s| s / runs as f64).collect();
            let d_avg = ebh(&EValues::new(avg).unwrap(), alpha(a)).discoveries.rejected;
            let d = ebh(&EValues::new(x).unwrap(), alpha(a)).discoveries.rejected;
            (d_avg != d).then_some(t)
        })
        .collect();
    let detail = format!("100 boundary-free instances, 10^4 runs each, mismatches: {mismatches:?}");
    assert!(report(10, "derandomization", mismatches.is_empty(), &detail, start.elapsed(), Duration::from_secs(60)));
}
