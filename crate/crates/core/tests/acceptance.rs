//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spreg::audit::random::{admissible_line, affine_impartial, clustered_partition};
use spreg::audit::{
    audit_gsp_with, efficiency_ratio, influence_bounds_with, lowerbound_diagnostics, BuiltinInstance,
    GspOptions,
};
use spreg::crm::{fit_crm, CrmConfig};
use spreg::erm::{fit_l1erm, L1Config, Phantom};
use spreg::grh::{grl_all_ranks, GrhMechanism};
use spreg::impartial::{fit_impartial, generalized_median, ImpartialConfig, ImpartialFn};
use spreg::reproduce::manipulation_outcome;
use spreg::separability::{compare_hyperplanes, AgentPartition, HyperplaneOrder};
use spreg::{DataSet, ExtReal, Hyperplane, Mechanism, MechanismSpec, MedianSide};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn timed(budget: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut o = f();
    let took = start.elapsed();
    if took > budget {
        o.pass = false;
    }
    o.detail = format!("{} [{:.2?} of {:.0?}]", o.detail, took, budget);
    o
}

/// Seeds are fixed; `ACCEPTANCE_SEED` shifts all of them for exploratory runs.
fn rng_for(stream: u64) -> ChaCha8Rng {
    let shift: u64 = std::env::var("ACCEPTANCE_SEED").ok().and_then(|v| v.parse().ok()).unwrap_or(0);
    ChaCha8Rng::seed_from_u64(stream + 1000 * shift)
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn fig1a() -> Outcome {
    timed(secs(1), || {
        let (_, truthful, lied, before, after) = manipulation_outcome(BuiltinInstance::CrmDisjoint).unwrap();
        let pass = truthful == Hyperplane::line(0.0, 1.0)
            && lied.approx_eq(&Hyperplane::line(0.1, 1.4), 1e-9)
            && (before - 2.0).abs() <= 1e-9
            && (after - 1.2).abs() <= 1e-9;
        outcome(pass, format!("truthful {truthful}; deviation {lied}; |r| {before} -> {after}"))
    })
}

fn fig1b() -> Outcome {
    timed(secs(1), || {
        let (_, truthful, lied, before, after) = manipulation_outcome(BuiltinInstance::CrmSubset).unwrap();
        let figure = truthful.approx_eq(&Hyperplane::line(0.5, 3.5), 1e-9);
        let text = truthful.approx_eq(&Hyperplane::line(2.0 / 3.0, 8.0 / 3.0), 1e-9);
        outcome(
            after <= before - 1e-6,
            format!(
                "truthful {truthful} (plotted 0.5x+3.5: {}; text 3y=2x+8: {}); deviation {lied}; |r| {before} -> {after}",
                if figure { "match" } else { "no match" },
                if text { "match" } else { "no match" }
            ),
        )
    })
}

fn quantile() -> Outcome {
    timed(secs(5), || {
        let (_, truthful, lied, before, after) = manipulation_outcome(BuiltinInstance::Quantile04).unwrap();
        outcome(after <= before - 1e-3, format!("truthful {truthful}; after reporting 2000 {lied}; |r| {before} -> {after}"))
    })
}

fn rank_vectors(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &s in sizes {
        out = out.into_iter().flat_map(|v| (1..=s).map(move |k| [v.clone(), vec![k]].concat())).collect();
    }
    out
}

fn grh_well_defined() -> Outcome {
    timed(secs(60), || {
        let mut rng = rng_for(4);
        let (mut fits, mut bad) = (0usize, Vec::new());
        for inst in 0..500 {
            let d = rng.gen_range(1..=3);
            let sizes: Vec<usize> = (0..=d).map(|_| rng.gen_range(1..=4)).collect();
            let (data, part) = clustered_partition(&mut rng, d, &sizes);
            for ranks in rank_vectors(&sizes) {
                let p = AgentPartition::new(part.sets.clone(), ranks).unwrap();
                fits += 1;
                if let Err(e) = GrhMechanism::new(&data, p).and_then(|m| m.fit(&data)) {
                    bad.push(format!("instance {inst}: {e}"));
                }
            }
        }
        outcome(bad.is_empty(), format!("500 instances, {fits} rank vectors, {} failures {:?}", bad.len(), bad.iter().take(3).collect::<Vec<_>>()))
    })
}

/// A random instance with `n ≤ 6`, `d ≤ 2`, and a publicly separable partition.
fn small_grh_instance(rng: &mut ChaCha8Rng) -> (DataSet, MechanismSpec) {
    match rng.gen_range(0..4) {
        0 => {
            let n = rng.gen_range(3..=6);
            let data = admissible_line(rng, n);
            let cut = rng.gen_range(1..n);
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| data.x(a)[0].total_cmp(&data.x(b)[0]));
            let (s, s_prime) = (order[..cut].to_vec(), order[cut..].to_vec());
            let (k, k_prime) = (rng.gen_range(1..=s.len()), rng.gen_range(1..=s_prime.len()));
            (data, MechanismSpec::new(Mechanism::Grl { s, s_prime, k, k_prime }))
        }
        1 => {
            let n = rng.gen_range(2..=6);
            let side = if rng.gen() { MedianSide::Right } else { MedianSide::Left };
            let m = if rng.gen() && n >= 3 { Mechanism::Tukey { side } } else { Mechanism::BrownMood { side } };
            (admissible_line(rng, n), MechanismSpec::new(m))
        }
        _ => {
            let sizes: Vec<usize> = (0..3).map(|_| rng.gen_range(1..=2)).collect();
            let (data, part) = clustered_partition(rng, 2, &sizes);
            (data, MechanismSpec::new(Mechanism::Grh(part)))
        }
    }
}

fn gsp_trials(label: &str, mut make: impl FnMut(&mut ChaCha8Rng) -> (DataSet, MechanismSpec)) -> Outcome {
    let mut rng = rng_for(5);
    let mut found = Vec::new();
    let mut errors = Vec::new();
    for trial in 0..1000u64 {
        let (data, spec) = make(&mut rng);
        let opts = GspOptions::new(3.min(data.n()), 6, trial);
        match spec.prepare(&data).and_then(|m| audit_gsp_with(&m, &data, &opts)) {
            Ok(Some(c)) => found.push(format!("trial {trial} {}: {c:?}", spec.mechanism.name())),
            Ok(None) => {}
            Err(e) => errors.push(format!("trial {trial}: {e}")),
        }
    }
    outcome(
        found.is_empty() && errors.is_empty(),
        format!("{label}: 1000 trials, {} certificates, {} errors {:?}", found.len(), errors.len(), found.iter().chain(&errors).take(2).collect::<Vec<_>>()),
    )
}

fn grh_gsp() -> Outcome {
    timed(secs(600), || gsp_trials("grh", small_grh_instance))
}

fn weighted_median_oracle(values: &[f64], weights: &[f64]) -> f64 {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let total: f64 = weights.iter().sum();
    let mut cum = 0.0;
    for (pos, &i) in idx.iter().enumerate() {
        cum += weights[i];
        if 2.0 * cum > total {
            return values[i];
        }
        if 2.0 * cum == total {
            // every point of [values[i], next] is optimal; take the one of least magnitude
            let (a, b) = (values[i], values[idx[pos + 1]]);
            return if a <= 0.0 && 0.0 <= b { 0.0 } else if a > 0.0 { a } else { b };
        }
    }
    unreachable!()
}

fn l1_generalized() -> Outcome {
    let start = Instant::now();
    let mut rng = rng_for(6);
    // (a) d = 0 reductions
    let mut mismatches = Vec::new();
    for t in 0..200 {
        let n = rng.gen_range(1..=9);
        let ys: Vec<f64> = (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let ws: Vec<f64> = (0..n).map(|_| rng.gen_range(1..=5) as f64).collect();
        let data = DataSet::scalar(ys.clone()).unwrap();
        let got = fit_l1erm(&data, &L1Config::default().with_weights(ws.clone())).unwrap().beta0;
        let want = weighted_median_oracle(&ys, &ws);
        if got != want {
            mismatches.push(format!("weighted #{t}: {got} vs {want}"));
        }
        let phantoms: Vec<ExtReal> = (0..=n)
            .map(|_| match rng.gen_range(0..4) {
                0 => ExtReal::NegInf,
                1 => ExtReal::PosInf,
                _ => ExtReal::Finite(rng.gen_range(-10.0..10.0)),
            })
            .collect();
        if let ExtReal::Finite(want) = generalized_median(&ys, &phantoms).unwrap() {
            let got = fit_l1erm(&data, &L1Config::default().with_scalar_phantoms(&phantoms)).unwrap().beta0;
            if got != want {
                mismatches.push(format!("phantom #{t}: {got} vs {want}"));
            }
        }
    }
    // (b) coalition audits of generalized L1 regression
    let gsp = gsp_trials("l1-erm", |rng| {
        let (data, _) = small_grh_instance(rng);
        let n = data.n();
        let d = data.dim();
        let mut cfg = L1Config::default();
        if rng.gen() {
            cfg = cfg.with_weights((0..n).map(|_| rng.gen_range(0.5..3.0)).collect());
        }
        if rng.gen() {
            cfg.phantoms = (0..rng.gen_range(1..=2))
                .map(|_| Phantom { anchor: (0..d).map(|_| rng.gen_range(-5.0..5.0)).collect(), target: rng.gen_range(-5.0..5.0), weight: 1.0 })
                .collect();
        }
        (data, MechanismSpec::new(Mechanism::L1Erm(cfg)))
    });
    // (c) n-efficiency
    let mut worst: f64 = 0.0;
    let mut over = Vec::new();
    let mut instances = 0;
    while instances < 200 {
        let n = rng.gen_range(3..=12);
        let d = rng.gen_range(1..=2);
        let xs: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| rng.gen_range(-10.0..10.0)).collect()).collect();
        let ys: Vec<f64> = (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let data = DataSet::new(xs, ys).unwrap();
        let spec = MechanismSpec::new(Mechanism::L1Erm(L1Config::default()));
        match efficiency_ratio(&spec, &data).unwrap() {
            ExtReal::Finite(r) => {
                instances += 1;
                worst = worst.max(r / n as f64);
                if r > n as f64 + 1e-9 {
                    over.push(format!("n={n}: {r}"));
                }
            }
            _ => continue,
        }
    }
    let pass = mismatches.is_empty() && gsp.pass && over.is_empty();
    outcome(
        pass,
        format!(
            "(a) {} mismatches {:?}; (b) {}; (c) worst ratio/n {worst:.4}, {} above n [{:.2?}]",
            mismatches.len(),
            mismatches.iter().take(2).collect::<Vec<_>>(),
            gsp.detail,
            over.len(),
            start.elapsed()
        ),
    )
}

fn influence() -> Outcome {
    let start = Instant::now();
    let mut rng = rng_for(7);
    let mut worst: f64 = 0.0;
    let mut samples = 0usize;
    let mut errors = Vec::new();
    for config in 0..5 {
        for _ in 0..20 {
            let n = rng.gen_range(4..=9);
            let (data, spec) = match config {
                0 => (admissible_line(&mut rng, n), MechanismSpec::new(Mechanism::BrownMood { side: MedianSide::Left })),
                1 => (admissible_line(&mut rng, n), MechanismSpec::new(Mechanism::Tukey { side: MedianSide::Right })),
                c => {
                    let d = c - 1;
                    let sizes: Vec<usize> = (0..=d).map(|_| rng.gen_range(1..=3)).collect();
                    let (data, part) = clustered_partition(&mut rng, d, &sizes);
                    (data, MechanismSpec::new(Mechanism::Grh(part)))
                }
            };
            let prepared = match spec.prepare(&data) {
                Ok(p) => p,
                Err(e) => {
                    errors.push(e.to_string());
                    continue;
                }
            };
            for agent in 0..data.n() {
                if data.n() < data.dim() + 2 {
                    break;
                }
                let b = match influence_bounds_with(&prepared, &data, agent) {
                    Ok(b) => b,
                    Err(e) => {
                        errors.push(e.to_string());
                        continue;
                    }
                };
                let mut lo = data.ys().iter().copied().fold(f64::INFINITY, f64::min);
                let mut hi = data.ys().iter().copied().fold(f64::NEG_INFINITY, f64::max);
                for v in [b.lower, b.upper].iter().filter_map(|v| v.finite()) {
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
                let (lo, hi) = (lo - 10.0, hi + 10.0);
                for k in 0..=200 {
                    let y = lo + (hi - lo) * k as f64 / 200.0;
                    let out = prepared.outcome_for(&data.with_report(agent, y).unwrap(), agent).unwrap();
                    worst = worst.max((out - b.outcome(y)).abs());
                    samples += 1;
                }
            }
        }
    }
    outcome(
        worst <= 1e-9 && errors.is_empty(),
        format!("{samples} samples, max |ŷ − med(y, ℓ, h)| = {worst:.2e}, {} errors {:?} [{:.2?}]", errors.len(), errors.first(), start.elapsed()),
    )
}

fn lower_bound() -> Outcome {
    let mut fails = Vec::new();
    for n in 3..=10 {
        let d = lowerbound_diagnostics(n, 1.0, 1.0).unwrap();
        let ok = (d.t - 1.0).abs() <= 1e-9
            && (d.f0 - 0.5).abs() <= 1e-9 * 0.5
            && (d.f1 - 1.0).abs() <= 1e-6
            && (d.ratio - 2.0).abs() <= 1e-5;
        if !ok {
            fails.push(format!("{d:?}"));
        }
    }
    outcome(fails.is_empty(), format!("n = 3..=10, {} failures {:?}", fails.len(), fails.first()))
}

fn impartiality() -> Outcome {
    let start = Instant::now();
    let mut rng = rng_for(9);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let (n, d) = (rng.gen_range(2..=6), rng.gen_range(1..=3));
        let cfg = affine_impartial(&mut rng, n, d);
        let xs: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| rng.gen_range(-5.0..5.0)).collect()).collect();
        let ys: Vec<f64> = (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let data = DataSet::new(xs, ys).unwrap();
        for agent in 0..n {
            let base = fit_impartial(&data, &cfg).unwrap().eval(data.x(agent));
            for k in 0..=200 {
                let y = -10.0 + 0.1 * k as f64;
                let out = fit_impartial(&data.with_report(agent, y).unwrap(), &cfg).unwrap().eval(data.x(agent));
                worst = worst.max((out - base).abs());
            }
        }
    }
    let (mut missed, mut spurious) = (Vec::new(), Vec::new());
    for t in 0..50u64 {
        let n = rng.gen_range(2..=4);
        let data = admissible_line(&mut rng, n);
        let mut cfg = affine_impartial(&mut rng, n, 1);
        if let ImpartialFn::Affine { a, .. } = &mut cfg.g[0] {
            if a[0] == 0.0 {
                a[0] = 1.0;
            }
        }
        let opts = GspOptions::new(2, 64, t);
        let spec = MechanismSpec::new(Mechanism::Impartial(cfg));
        match audit_gsp_with(&spec.prepare(&data).unwrap(), &data, &opts).unwrap() {
            Some(c) if c.coalition.len() == 2 => {}
            other => missed.push(format!("instance {t}: {other:?}")),
        }
        let constant = MechanismSpec::new(Mechanism::Impartial(ImpartialConfig::constant(n, 1, rng.gen_range(-5.0..5.0))));
        if audit_gsp_with(&constant.prepare(&data).unwrap(), &data, &GspOptions::new(n.min(3), 16, t)).unwrap().is_some() {
            spurious.push(t);
        }
    }
    outcome(
        worst <= 1e-12 && missed.is_empty() && spurious.is_empty(),
        format!(
            "sweep max drift {worst:.2e}; non-constant without 2-agent certificate {} {:?}; constant with certificate {} [{:.2?}]",
            missed.len(),
            missed.first(),
            spurious.len(),
            start.elapsed()
        ),
    )
}

fn comparison() -> Outcome {
    let mut rng = rng_for(10);
    let mut bad = Vec::new();
    for t in 0..500 {
        let d = rng.gen_range(1..=3);
        let sizes: Vec<usize> = (0..=d).map(|_| rng.gen_range(1..=4)).collect();
        let (data, part) = clustered_partition(&mut rng, d, &sizes);
        let h1 = Hyperplane::new((0..d).map(|_| rng.gen_range(-3.0..3.0)).collect(), rng.gen_range(-10.0..10.0));
        let h2 = Hyperplane::new((0..d).map(|_| rng.gen_range(-3.0..3.0)).collect(), rng.gen_range(-10.0..10.0));
        match compare_hyperplanes(&data, &part, &h1, &h2) {
            Ok(c) => {
                let ok = part.sets[c.set].iter().all(|&i| {
                    let (a, b) = (h1.eval(data.x(i)), h2.eval(data.x(i)));
                    match c.order {
                        HyperplaneOrder::AllBelow => a < b,
                        HyperplaneOrder::AllAbove => a > b,
                    }
                });
                if !ok {
                    bad.push(format!("instance {t}: ordering not uniform"));
                }
            }
            Err(e) => bad.push(format!("instance {t}: {e}")),
        }
    }
    outcome(bad.is_empty(), format!("500 instances, {} failures {:?}", bad.len(), bad.first()))
}

fn crm_grl() -> Outcome {
    let mut rng = rng_for(11);
    let mut bad = Vec::new();
    let side = |r: &mut ChaCha8Rng| if r.gen() { MedianSide::Right } else { MedianSide::Left };
    for t in 0..100 {
        let n = rng.gen_range(2..=9);
        let data = admissible_line(&mut rng, n);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| data.x(a)[0].total_cmp(&data.x(b)[0]));
        let sides = (side(&mut rng), side(&mut rng), side(&mut rng));
        let matches = |cfg: &CrmConfig, splits: &[(Vec<usize>, Vec<usize>)]| {
            let h = fit_crm(&data, cfg).unwrap();
            splits.iter().any(|(l, r)| grl_all_ranks(&data, l, r).unwrap().iter().any(|(_, g)| g.approx_eq(&h, 1e-9)))
        };
        let full = CrmConfig::full(n).with_sides(sides.0, sides.1, sides.2);
        let h = n / 2;
        let mut splits = vec![(order[..h].to_vec(), order[h..].to_vec())];
        if n % 2 == 1 {
            splits.push((order[..h + 1].to_vec(), order[h + 1..].to_vec()));
        }
        if !matches(&full, &splits) {
            bad.push(format!("instance {t} (S = S' = N)"));
        }
        let cut = rng.gen_range(1..n);
        let (mut s, mut sp) = (order[..cut].to_vec(), order[cut..].to_vec());
        if rng.gen() {
            std::mem::swap(&mut s, &mut sp);
        }
        let cfg = CrmConfig::new(s.clone(), sp.clone()).with_sides(sides.0, sides.1, sides.2);
        if !matches(&cfg, &[(s, sp)]) {
            bad.push(format!("instance {t} (separable S, S')"));
        }
    }
    outcome(bad.is_empty(), format!("100 instances x 2 configurations, {} failures {:?}", bad.len(), bad.first()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("CRM disjoint-sets counterexample", fig1a),
        ("CRM nested-sets counterexample", fig1b),
        ("quantile q = 0.4 counterexample", quantile),
        ("GRH well-definedness", grh_well_defined),
        ("GRH group strategyproofness audit", grh_gsp),
        ("generalized L1-ERM", l1_generalized),
        ("influence bounds", influence),
        ("lower-bound arithmetic", lower_bound),
        ("impartiality", impartiality),
        ("hyperplane comparison", comparison),
        ("CRM and GRL equivalence", crm_grl),
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|v| v.parse().ok());
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        if only.is_some_and(|o| o != k + 1) {
            continue;
        }
        let o = run();
        println!("{} #{} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, k + 1, o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
