//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use mereovc::laws::{selftest, SelftestConfig};
use mereovc::mistakes::{count_mistakes, localize};
use mereovc::predictor::{run_trial, PredictionConfig, TieStrategy};
use mereovc::session::{evaluate_loo, loo_trials};
use mereovc::syllogistic::{
    enumerate_moods, evaluate_premiss, is_valid_mood, Mood, Premiss, Quantifier, CATALOG, REJECTED,
};
use mereovc::tnorm::{
    self, check_operator_identities, check_t_norm, propagate, Connective, TruthValue,
};
use mereovc::vc::{epsilon_components, vc_dimension, ComponentFamily};
use mereovc::{DecisionSystem, Epsilon, Mode, NewObject, ObjectId};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Absolute tolerance for real-valued comparisons.
const REAL_TOL: f64 = 1e-9;
const GRID: u32 = 64;
const SEED: u64 = 20_240_601;

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn check(cond: bool, what: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn within(elapsed: Duration, limit_s: u64) -> Result<(), String> {
    check(
        elapsed <= Duration::from_secs(limit_s),
        format!("took {:.1}s, limit {limit_s}s", elapsed.as_secs_f64()),
    )
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let rows = enumerate_moods();
    check(rows.len() == 256, format!("{} rows", rows.len()))?;
    let valid: BTreeSet<String> = rows
        .iter()
        .filter(|r| r.valid)
        .map(|r| r.mood.to_string())
        .collect();
    let catalog: BTreeSet<String> = CATALOG.iter().map(|e| e.mood().to_string()).collect();
    check(
        catalog.len() == 24,
        "catalog does not hold 24 distinct moods",
    )?;
    check(
        valid == catalog,
        format!(
            "valid set differs: {:?}",
            valid.symmetric_difference(&catalog).collect::<Vec<_>>()
        ),
    )?;
    for r in &rows {
        let entry = CATALOG.iter().find(|e| e.mood() == r.mood);
        check(
            r.name == entry.map(|e| e.name),
            format!("name mismatch for {}", r.mood),
        )?;
    }
    for (code, expr) in REJECTED {
        let mood: Mood = expr.parse().map_err(|e| format!("{code}: {e}"))?;
        let v = is_valid_mood(&mood);
        check(!v.valid, format!("{code} marked valid"))?;
        let model = v
            .countermodel
            .ok_or(format!("{code} has no countermodel"))?;
        let negated = Premiss {
            quantifier: match mood.conclusion.quantifier {
                Quantifier::A => Quantifier::O,
                Quantifier::O => Quantifier::A,
                Quantifier::E => Quantifier::I,
                Quantifier::I => Quantifier::E,
            },
            ..mood.conclusion
        };
        for p in [mood.major, mood.minor, negated] {
            check(
                evaluate_premiss(&p, &model).map_err(|e| e.to_string())?,
                format!("{code} countermodel {model} fails {p}"),
            )?;
        }
    }
    within(start.elapsed(), 60)?;
    Ok(format!(
        "24/256 valid, catalog names match, both rejected moods refuted ({:.1}s)",
        start.elapsed().as_secs_f64()
    ))
}

fn criterion_2() -> Verdict {
    let start = Instant::now();
    let report = selftest(&SelftestConfig {
        atoms: 4,
        random_universes: 1000,
        max_random_atoms: 10,
        ..SelftestConfig::default()
    })
    .map_err(|e| e.to_string())?;
    let names: BTreeSet<&str> = report.exhaustive.outcomes.iter().map(|o| o.law).collect();
    let mut required: Vec<String> = (1..=14).map(|i| format!("m{i}")).collect();
    required.extend((1..=7).map(|i| format!("implication.{i}")));
    required.extend(
        [
            "parts.irreflexive",
            "parts.transitive",
            "parts.asymmetric",
            "components.reflexive",
            "components.antisymmetric",
            "components.transitive",
            "axiom_a",
            "class.requirement_1",
            "class.requirement_2",
        ]
        .map(String::from),
    );
    for r in &required {
        check(
            names.contains(r.as_str()),
            format!("law {r} missing from the suite"),
        )?;
    }
    if let Some(f) = report
        .exhaustive
        .failures()
        .chain(report.sampled.failures())
        .next()
    {
        return Err(format!(
            "{} fails: {}",
            f.law,
            f.counterexample.clone().unwrap_or_default()
        ));
    }
    within(start.elapsed(), 30)?;
    Ok(format!(
        "{} laws, {} exhaustive + {} sampled checks ({:.1}s)",
        names.len(),
        report.exhaustive.total_checks(),
        report.sampled.total_checks(),
        start.elapsed().as_secs_f64()
    ))
}

fn random_fixture(rng: &mut ChaCha8Rng) -> (usize, Vec<usize>) {
    let ground = rng.gen_range(1..=8);
    let touching = (0..ground).filter(|_| rng.gen_bool(0.5)).collect();
    (ground, touching)
}

fn family(ground: usize, t: &[usize], eps: Epsilon, mode: Mode) -> ComponentFamily {
    ComponentFamily::new(ground, t, eps, mode).expect("valid fixture")
}

fn criterion_3() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for _ in 0..200 {
        let (ground, t) = random_fixture(&mut rng);
        let one = vc_dimension(&family(ground, &t, Epsilon::one(), Mode::Exact));
        let zero = vc_dimension(&family(ground, &t, Epsilon::zero(), Mode::Exact));
        check(
            one == t.len(),
            format!("|A|={ground} |T|={}: VC(1)={one}", t.len()),
        )?;
        check(
            zero == ground - t.len(),
            format!("|A|={ground} |T|={}: VC(0)={zero}", t.len()),
        )?;
    }
    within(start.elapsed(), 10)?;
    Ok("200 fixtures, VC(1)=|T| and VC(0)=|A\\T|".into())
}

/// VC by materializing the family, with the empty set, and testing every
/// subset of the ground set.
fn brute_force_vc(ground: usize, t: &[usize], num: u64, den: u64, mode: Mode) -> usize {
    let tmask: u32 = t.iter().map(|&i| 1u32 << i).sum();
    let mut members = vec![0u32];
    for c in 1u32..(1 << ground) {
        let inside = u64::from((c & tmask).count_ones());
        let size = u64::from(c.count_ones());
        let ok = match mode {
            Mode::Exact => inside * den == num * size,
            Mode::AtLeast => inside * den >= num * size,
        };
        if ok {
            members.push(c);
        }
    }
    (1u32..(1 << ground))
        .filter(|&s| {
            let traces: BTreeSet<u32> = members.iter().map(|c| c & s).collect();
            traces.len() == 1 << s.count_ones()
        })
        .map(|s| s.count_ones() as usize)
        .max()
        .unwrap_or(0)
}

fn criterion_4() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 4);
    let epsilons = [(1, 4), (1, 3), (1, 2), (2, 3)];
    let mut compared = 0;
    for _ in 0..200 {
        let (ground, t) = random_fixture(&mut rng);
        for &(n, d) in &epsilons {
            let eps = Epsilon::new(n, d).unwrap();
            for mode in [Mode::Exact, Mode::AtLeast] {
                let f = family(ground, &t, eps, mode);
                let got = vc_dimension(&f);
                let want = brute_force_vc(ground, &t, n, d, mode);
                check(
                    got == want,
                    format!("|A|={ground} T={t:?} ε={eps} {mode}: {got} vs oracle {want}"),
                )?;
                compared += 1;
                if mode == Mode::Exact {
                    let bound = f.size_bound().ok_or("no size bound for 0<ε<1")?;
                    check(got <= bound, format!("VC {got} above bound {bound}"))?;
                    let largest = epsilon_components(&f, 20)
                        .map_err(|e| e.to_string())?
                        .iter()
                        .map(Vec::len)
                        .max()
                        .unwrap_or(0);
                    check(
                        largest <= bound,
                        format!("component of size {largest} above bound {bound}"),
                    )?;
                }
            }
        }
    }
    within(start.elapsed(), 60)?;
    Ok(format!(
        "{compared} oracle comparisons agree, size bound holds"
    ))
}

fn criterion_5() -> Verdict {
    let system =
        DecisionSystem::from_csv_str("f1,f2,d\n1,1,4\n1,0,7\n").map_err(|e| e.to_string())?;
    let omega = NewObject::parse_inline("f1=1,f2=1").unwrap();
    let cfg = PredictionConfig {
        epsilon: Epsilon::one(),
        delta: 4,
        ..PredictionConfig::default()
    };
    let t = run_trial(&system, &omega, Some(5.0), &cfg).map_err(|e| e.to_string())?;
    let vcs: Vec<usize> = t.per_object.iter().map(|a| a.vc).collect();
    let radii: Vec<u64> = t.per_object.iter().map(|a| a.radius).collect();
    let rewards: Vec<Option<u8>> = t.per_object.iter().map(|a| a.reward).collect();
    check(
        vcs == [2, 1] && t.vc_star == 2,
        format!("VCs {vcs:?}, VC* {}", t.vc_star),
    )?;
    check(radii == [4, 2], format!("radii {radii:?}"))?;
    check(
        rewards == [Some(1), Some(1)],
        format!("rewards {rewards:?}"),
    )?;
    check(
        t.winner.map(|w| w.id) == Some(ObjectId(0)),
        format!("winner {:?}", t.winner),
    )?;
    check(
        (t.weighted - 5.0).abs() <= REAL_TOL,
        format!("weighted {}", t.weighted),
    )?;
    let regret = t.regret.ok_or("no regret")?;
    check((regret + 1.0).abs() <= REAL_TOL, format!("regret {regret}"))?;
    Ok("radii (4,2), rewards (1,1), winner VC-2 object, weighted 5.0, regret -1.0".into())
}

fn synthetic_table(rng: &mut ChaCha8Rng, rows: usize) -> DecisionSystem {
    let mut csv = String::from("f1,f2,f3,f4,d\n");
    for _ in 0..rows {
        let v: Vec<u32> = (0..4).map(|_| rng.gen_range(0..3)).collect();
        // the decision is a function of the features, so the table is consistent
        let d = f64::from(v[0] + 2 * v[1]) + 0.5 * f64::from(v[2]);
        csv.push_str(&format!("{},{},{},{},{d}\n", v[0], v[1], v[2], v[3]));
    }
    DecisionSystem::from_csv_str(&csv).expect("synthetic table")
}

fn criterion_6() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 6);
    let system = synthetic_table(&mut rng, 20);
    check(system.is_consistent(), "synthetic table is inconsistent")?;
    let cfg = PredictionConfig {
        epsilon: Epsilon::one(),
        delta: 3,
        ..PredictionConfig::default()
    };
    let trials = loo_trials(&system, &cfg).map_err(|e| e.to_string())?;
    let report = evaluate_loo(&system, &cfg).map_err(|e| e.to_string())?;
    let results: Vec<_> = trials.iter().map(|(_, t)| t.clone()).collect();
    let ledger = count_mistakes(&results);
    for ((holdout, t), &m) in trials.iter().zip(&ledger.per_trial) {
        if t.reward_sum() >= 1 {
            let others = (system.len() - 1) as u64;
            check(
                m < others,
                format!("holdout {holdout}: {m} mistakes among {others} objects"),
            )?;
        }
    }

    // recompute every reward from the table: at ε = 1 the VC of an object is
    // the number of features it shares with the held-out row
    let features = ["f1", "f2", "f3", "f4"];
    let mut min_sum = usize::MAX;
    for &h in system.objects() {
        let expert = system.decision(h).unwrap();
        let shared: Vec<(ObjectId, usize)> = system
            .objects()
            .iter()
            .filter(|&&o| o != h)
            .map(|&o| {
                let n = features
                    .iter()
                    .filter(|f| system.value(o, f).unwrap() == system.value(h, f).unwrap())
                    .count();
                (o, n)
            })
            .collect();
        let star = shared.iter().map(|s| s.1).max().unwrap();
        let sum = shared
            .iter()
            .filter(|&&(o, n)| {
                let r = (3 * n).checked_div(star).unwrap_or(0);
                (expert - system.decision(o).unwrap()).abs() <= r as f64
            })
            .count();
        min_sum = min_sum.min(sum);
    }
    let recomputed = min_sum >= 1;
    check(
        report.approx_predicted == recomputed,
        format!(
            "report says {}, recomputed {recomputed}",
            report.approx_predicted
        ),
    )?;
    within(start.elapsed(), 10)?;
    Ok(format!(
        "20 LOO trials, Mist {} within bound, approx_predicted = {} (min reward sum {min_sum})",
        ledger.total, report.approx_predicted
    ))
}

fn criterion_7() -> Verdict {
    let system = DecisionSystem::from_csv_str("f,d\nx,4\nx,5\nx,7\n").map_err(|e| e.to_string())?;
    let omega = NewObject::parse_inline("f=x").unwrap();
    let cfg = PredictionConfig {
        delta: 2,
        eta: 0.5,
        ..PredictionConfig::default()
    };
    let trial = run_trial(&system, &omega, Some(5.4), &cfg).map_err(|e| e.to_string())?;
    let l = localize(&trial, 5.4, &cfg).map_err(|e| e.to_string())?;
    check(
        l.fore_last == [ObjectId(1)],
        format!("fore-last {:?}", l.fore_last),
    )?;
    check(
        l.interval[0] <= 5.4 && 5.4 <= l.interval[1],
        format!("interval {:?}", l.interval),
    )?;
    check(
        l.survivor_chain()
            == [
                vec![ObjectId(0), ObjectId(1), ObjectId(2)],
                vec![ObjectId(1)],
            ],
        format!("chain {:?}", l.survivor_chain()),
    )?;

    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 7);
    let mut max_rounds = 0;
    for i in 0..100 {
        let n = rng.gen_range(2..=8);
        let mut csv = String::from("f1,f2,d\n");
        for _ in 0..n {
            csv.push_str(&format!(
                "{},{},{}\n",
                rng.gen_range(0..3),
                rng.gen_range(0..3),
                rng.gen_range(0..20)
            ));
        }
        let system = DecisionSystem::from_csv_str(&csv).unwrap();
        let omega = NewObject::parse_inline(&format!(
            "f1={},f2={}",
            rng.gen_range(0..3),
            rng.gen_range(0..3)
        ))
        .unwrap();
        let cfg = PredictionConfig {
            delta: rng.gen_range(1..=6),
            eta: rng.gen_range(0.1..0.9),
            radius_tolerance: 10f64.powi(-rng.gen_range(2..=8)),
            ..PredictionConfig::default()
        };
        let expert = if i % 2 == 0 {
            system.decision(ObjectId(rng.gen_range(0..n))).unwrap()
        } else {
            rng.gen_range(-2.0..22.0)
        };
        let trial = run_trial(&system, &omega, Some(expert), &cfg).map_err(|e| e.to_string())?;
        let l = localize(&trial, expert, &cfg).map_err(|e| e.to_string())?;

        for w in l.rounds.windows(2) {
            let later: BTreeSet<_> = w[1].survivors.iter().collect();
            let earlier: BTreeSet<_> = w[0].survivors.iter().collect();
            check(
                later.is_subset(&earlier),
                format!("fixture {i}: survivors grew"),
            )?;
        }
        let r_max = trial
            .per_object
            .iter()
            .map(|a| a.radius as f64)
            .fold(0.0, f64::max);
        let bound = if r_max < cfg.radius_tolerance {
            1
        } else {
            ((cfg.radius_tolerance / r_max).ln() / cfg.eta.ln()).ceil() as usize + 1
        };
        check(
            l.rounds.len() <= bound,
            format!("fixture {i}: {} rounds, bound {bound}", l.rounds.len()),
        )?;
        max_rounds = max_rounds.max(l.rounds.len());
        let exact: Vec<ObjectId> = trial
            .per_object
            .iter()
            .filter(|a| a.forecast == expert)
            .map(|a| a.object)
            .collect();
        for o in exact {
            check(
                l.fore_last.contains(&o),
                format!("fixture {i}: exact match {o} lost"),
            )?;
        }
    }
    Ok(format!(
        "fore-last {{5}}, interval [{}, {}]; 100 random runs monotone and within bound (max {max_rounds} rounds)",
        l.interval[0], l.interval[1]
    ))
}

fn tv(x: f64) -> TruthValue {
    TruthValue::new(x).unwrap()
}

fn criterion_8() -> Verdict {
    let t_l = |x: f64, y: f64| tnorm::t_norm_l(tv(x), tv(y)).get();
    check_t_norm(t_l, GRID).map_err(|v| format!("T_L: {v}"))?;
    let identities = check_operator_identities(GRID);
    for (name, outcome) in &identities {
        if let Err(f) = outcome {
            return Err(format!("{name} at p={}, q={}", f.p, f.q));
        }
    }
    for i in 0..=GRID {
        for j in 0..=GRID {
            let (r, s) = (
                f64::from(i) / f64::from(GRID),
                f64::from(j) / f64::from(GRID),
            );
            let closed: [(Connective, f64); 6] = [
                (Connective::Sum, r.max(s)),
                (Connective::StrongSum, (r + s).min(1.0)),
                (Connective::Product, r.min(s)),
                (Connective::StrongProduct, (r + s - 1.0).max(0.0)),
                (Connective::Implication, (r + s - 1.0).max(0.0)),
                (Connective::Negation, 1.0 - r),
            ];
            for (c, want) in closed {
                let got = propagate(tv(r), tv(s), c).get();
                check(
                    (got - want).abs() <= REAL_TOL,
                    format!("propagate {c:?}({r}, {s}) = {got}, expected {want}"),
                )?;
            }
        }
    }
    Ok(format!(
        "T_L is a t-norm, {} identities hold, propagate matches closed forms on the 1/{GRID} grid",
        identities.len()
    ))
}

fn criterion_9() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 9);
    let system = synthetic_table(&mut rng, 16);
    let cfg = |seed| PredictionConfig {
        epsilon: Epsilon::new(1, 2).unwrap(),
        delta: 3,
        tie_strategy: TieStrategy::Random,
        seed,
        ..PredictionConfig::default()
    };
    let json = |seed| {
        serde_json::to_string(&evaluate_loo(&system, &cfg(seed)).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())
    };
    let (a, b) = (json(1)?, json(1)?);
    check(a == b, "two runs with the same seed differ")?;

    let one = evaluate_loo(&system, &cfg(1)).map_err(|e| e.to_string())?;
    let tied = one.trials.iter().filter(|t| t.tie_size > 1).count();
    let mut changed = 0;
    for seed in 2..6 {
        let other = evaluate_loo(&system, &cfg(seed)).map_err(|e| e.to_string())?;
        check(
            other.mistakes == one.mistakes && other.approx_predicted == one.approx_predicted,
            "seed changed mistakes",
        )?;
        check(other.regret == one.regret, "seed changed regret")?;
        for (x, y) in one.trials.iter().zip(&other.trials) {
            let mut y_same_winner = y.clone();
            y_same_winner.winner = x.winner;
            check(
                *x == y_same_winner,
                format!("holdout {}: seed changed more than the winner", x.holdout),
            )?;
            if x.winner != y.winner {
                check(
                    x.tie_size > 1,
                    format!("holdout {}: untied winner changed", x.holdout),
                )?;
                changed += 1;
            }
        }
    }
    Ok(format!(
        "byte-identical reruns; seeds 2..6 changed {changed} winners, all in {tied} tied trials"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("syllogistic catalog", criterion_1),
        ("algebra law suite", criterion_2),
        ("VC extremes", criterion_3),
        ("VC oracle equivalence", criterion_4),
        ("protocol fixture", criterion_5),
        ("approximate prediction and mistake bound", criterion_6),
        ("localization", criterion_7),
        ("t-norm suite", criterion_8),
        ("determinism", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
