//! Acceptance suite. Each test checks one criterion and prints a single
//! `[PASS]` / `[FAIL]` line; run with `-- --nocapture --test-threads=1` to see them.

use std::num::NonZeroU64;
use std::sync::Arc;
use std::time::{Duration, Instant};

use macie_core::eval::{baselines, clean_accuracy, evaluate, figure_of_merit};
use macie_core::fixtures;
use macie_core::pocket::{train, TrainerConfig};
use macie_core::{
    dominance_bound, Assignment, KnowledgeBase, Rng, Scenario, Session, TruthValue, Verdict,
};

/// Training seeds, fixed before any run was inspected. Seed 1 is the headline run.
const TRAIN_SEEDS: [u64; 5] = [1, 2, 3, 4, 5];
const HEADLINE_SEED: u64 = 1;
const EVAL_SEED: u64 = 7919;
const EVAL_GROUPS: u32 = 10;

fn verdict(name: &str, pass: bool, detail: String) {
    println!("[{}] {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "{name}: {detail}");
}

fn config(seed: u64, noise: bool) -> TrainerConfig {
    TrainerConfig {
        iterations: NonZeroU64::new(10_000).unwrap(),
        seed,
        noise,
    }
}

fn fom_mean(kb: &KnowledgeBase, s: &Scenario) -> f64 {
    figure_of_merit(kb, s, EVAL_GROUPS, &mut Rng::seeded(EVAL_SEED))
        .unwrap()
        .mean
}

#[test]
fn figure_of_merit_reproduction() {
    let s = fixtures::lemonade();
    let start = Instant::now();
    let kb = train(&s, &config(HEADLINE_SEED, true)).knowledge_base;
    let mean = fom_mean(&kb, &s);
    let elapsed = start.elapsed();
    let pass = (770.0..=850.0).contains(&mean) && elapsed < Duration::from_secs(10);
    verdict(
        "figure-of-merit reproduction",
        pass,
        format!(
            "noise-trained mean FoM {mean:.1} (target [770, 850]), train+eval {:.2}s (< 10s)",
            elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn noise_ablation_reproduction() {
    let s = fixtures::lemonade();
    let mut all_clean_fit = true;
    let mut below = 0;
    let mut pairs = Vec::new();
    let mut headline_clean = 0.0;
    for seed in TRAIN_SEEDS {
        let clean_kb = train(&s, &config(seed, false)).knowledge_base;
        let noisy_kb = train(&s, &config(seed, true)).knowledge_base;
        let acc = clean_accuracy(&clean_kb, &s).unwrap();
        all_clean_fit &= acc.correct == 9;
        let c = fom_mean(&clean_kb, &s);
        let n = fom_mean(&noisy_kb, &s);
        if c < n {
            below += 1;
        }
        if seed == HEADLINE_SEED {
            headline_clean = c;
        }
        pairs.push(format!("{c:.0}<{n:.0}"));
    }
    let in_range = (710.0..=790.0).contains(&headline_clean);
    verdict(
        "noise-ablation reproduction",
        all_clean_fit && in_range && below >= 4,
        format!(
            "clean-trained fits 9/9: {all_clean_fit}; headline clean-trained FoM {headline_clean:.1} \
             (target [710, 790]); below noise-trained in {below}/5 pairs [{}]",
            pairs.join(" ")
        ),
    );
}

#[test]
fn noisy_trained_clean_accuracy() {
    let s = fixtures::lemonade();
    let kb = train(&s, &config(HEADLINE_SEED, true)).knowledge_base;
    let acc = clean_accuracy(&kb, &s).unwrap();
    verdict(
        "noisy-trained clean accuracy",
        (7..=9).contains(&acc.correct),
        format!(
            "distinct {}/9 = {:.3} (target [7/9, 9/9]); ratio-weighted {:.3}",
            acc.correct, acc.distinct, acc.weighted
        ),
    );
}

#[test]
fn baselines_exact() {
    let b = baselines(&fixtures::lemonade());
    let random_ok = (b.random - 1000.0 / 9.0).abs() < 1e-9 && format!("{:.1}", b.random) == "111.1";
    let majority_ok =
        (b.majority - 40000.0 / 78.0).abs() < 1e-9 && format!("{:.1}", b.majority) == "512.8";
    verdict(
        "baselines exact",
        random_ok && majority_ok,
        format!("random {:.1}, majority {:.1}", b.random, b.majority),
    );
}

#[test]
fn toy_golden_trace() {
    let kb = Arc::new(fixtures::toy_kb());
    let mut s = Session::new(kb.clone());
    s.answer(1, TruthValue::True).unwrap();
    let sums_ok = s.sums() == vec![1, -3, 4];
    let e = s.eliminations().first().copied();
    let elim_ok = e.is_some_and(|e| e.goal == 1 && e.dominator == 2 && e.gap == 7 && e.bound == 2)
        && s.viable() == vec![0, 2];
    let question_ok = s.next_question() == Some(2);
    let mut yes = s.clone();
    let mut no = s.clone();
    let true_ok = yes.answer(2, TruthValue::True).unwrap() == Verdict::Concluded(0);
    let false_ok = no.answer(2, TruthValue::False).unwrap() == Verdict::Concluded(2);
    verdict(
        "inference golden trace",
        sums_ok && elim_ok && question_ok && true_ok && false_ok,
        format!(
            "sums {:?}; G2 eliminated gap/bound {:?}; next question {:?}; V3=True->G1 {true_ok}, V3=False->G3 {false_ok}",
            s.sums(),
            e.map(|e| (e.gap, e.bound)),
            s.next_question().map(|k| kb.input_name(k).to_string())
        ),
    );
}

/// Plain dot product, written independently of the library's sum routines.
fn oracle_sum(rows: &[Vec<i64>], g: usize, x: &[i64]) -> i64 {
    rows[g][0] + rows[g][1..].iter().zip(x).map(|(w, v)| w * v).sum::<i64>()
}

#[test]
fn dominance_soundness_oracle() {
    let mut rng = Rng::seeded(0x5eed);
    let mut violations = 0;
    let mut eliminated_total = 0;
    for _ in 0..1000 {
        let n = 1 + rng.below(14) as usize;
        let m = 2 + rng.below(5) as usize;
        let spread = 1 + rng.below(8) as i64;
        let rows: Vec<Vec<i64>> = (0..m)
            .map(|_| {
                (0..=n)
                    .map(|_| rng.below(2 * spread as u64 + 1) as i64 - spread)
                    .collect()
            })
            .collect();
        let kb = KnowledgeBase::new(
            (1..=n).map(|i| format!("V{i}")).collect(),
            (1..=m).map(|i| format!("G{i}")).collect(),
            rows.clone(),
        )
        .unwrap();
        // Random partial assignment with at most 12 unknowns.
        let mut values: Vec<TruthValue> = (0..n)
            .map(|_| match rng.below(4) {
                0 => TruthValue::True,
                1 => TruthValue::False,
                2 => TruthValue::Unknown,
                _ => TruthValue::Unavailable,
            })
            .collect();
        let mut unknown: Vec<usize> = (0..n).filter(|&k| !values[k].is_known()).collect();
        while unknown.len() > 12 {
            let k = unknown.pop().unwrap();
            values[k] = TruthValue::True;
        }
        let mut s = Session::new(Arc::new(kb));
        for (k, v) in values.iter().enumerate() {
            if *v != TruthValue::Unknown {
                s.answer(k, *v).unwrap();
            }
        }
        let dead: Vec<usize> = (0..m).filter(|&g| !s.is_viable(g)).collect();
        eliminated_total += dead.len();
        let u = unknown.len();
        for mask in 0u32..(1 << u) {
            let x: Vec<i64> = (0..n)
                .map(|k| match values[k] {
                    TruthValue::True => 1,
                    TruthValue::False => -1,
                    _ => {
                        let bit = unknown.iter().position(|&q| q == k).unwrap();
                        if mask >> bit & 1 == 1 {
                            1
                        } else {
                            -1
                        }
                    }
                })
                .collect();
            let sums: Vec<i64> = (0..m).map(|g| oracle_sum(&rows, g, &x)).collect();
            let top = *sums.iter().max().unwrap();
            let first_top = sums.iter().position(|&v| v == top).unwrap();
            for &j in &dead {
                let strictly_highest = sums.iter().enumerate().all(|(g, &v)| g == j || v < sums[j]);
                if strictly_highest || first_top == j {
                    violations += 1;
                }
            }
        }
    }
    verdict(
        "dominance soundness oracle",
        violations == 0 && eliminated_total > 0,
        format!("1000 instances, {eliminated_total} eliminations checked, {violations} violations"),
    );
}

#[test]
fn noise_rate_property() {
    let s = fixtures::lemonade();
    let expected = s.noise().clean_probability();
    let direct = 0.85 * 0.75 * 0.80 * 0.85 * 0.90 * 0.80 * 0.90 * 0.95;
    let mut rng = Rng::seeded(2718);
    let draws = 100_000;
    let clean = (0..draws)
        .filter(|_| {
            let e = s.sample_noisy(&mut rng);
            e.inputs == s.clean_example(e.true_goal).inputs
        })
        .count();
    let frac = clean as f64 / f64::from(draws);
    verdict(
        "noise-rate property",
        (frac - expected).abs() <= 0.01 && (expected - direct).abs() < 1e-12,
        format!("all-clean fraction {frac:.4} vs product {expected:.4} (±0.01)"),
    );
}

#[test]
fn appendix_matrix_golden() {
    let printed: [[i64; 9]; 9] = [
        [9, 9, 5, -3, 3, 5, 3, 3, 5],
        [-4, -2, -2, 8, 2, 2, 0, 2, 2],
        [-2, 0, 0, 4, 4, 4, 4, 2, 0],
        [-3, -1, 1, -1, -5, -7, -1, -3, 1],
        [-3, -3, -1, -1, 3, 1, -3, 1, 5],
        [0, 0, 0, -2, -4, -4, 4, 2, -6],
        [-3, 1, -1, -3, -5, 5, 1, -5, 5],
        [-1, -1, 1, 1, 1, -5, -5, 5, -5],
        [7, -3, -3, -3, 1, -1, -3, -7, -7],
    ];
    let kb = fixtures::appendix_kb();
    let matches = kb.rows().zip(printed.iter()).all(|(a, b)| a == b) && kb.m_goals() == 9;
    let rows: Vec<Vec<i64>> = printed.iter().map(|r| r.to_vec()).collect();

    let g6: Vec<i64> = (0..8)
        .map(|k| if k == 5 || k == 6 { 1 } else { -1 })
        .collect();
    let g9 = vec![-1i64; 8];
    let oracle_winner = |x: &[i64]| {
        let sums: Vec<i64> = (0..9).map(|g| oracle_sum(&rows, g, x)).collect();
        let top = *sums.iter().max().unwrap();
        (sums.iter().position(|&v| v == top).unwrap(), top, sums)
    };
    let (w6, top6, sums6) = oracle_winner(&g6);
    let (w9, top9, _) = oracle_winner(&g9);
    let lib6 = kb.winner(&Assignment::from_bools(
        &g6.iter().map(|&v| v > 0).collect::<Vec<_>>(),
    ));
    let lib9 = kb.winner(&Assignment::from_bools(&[false; 8]));
    let pass = matches
        && (w6, top6, sums6[8]) == (5, 22, 13)
        && (w9, top9) == (8, 33)
        && lib6 == w6
        && lib9 == w9;
    verdict(
        "appendix-matrix golden",
        pass,
        format!("fixture matches printed matrix: {matches}; G6 pattern -> G{} ({top6}), G9 pattern -> G{} ({top9})", lib6 + 1, lib9 + 1),
    );
}

#[test]
fn determinism() {
    let s = fixtures::lemonade();
    let a = train(&s, &config(HEADLINE_SEED, true))
        .knowledge_base
        .to_json();
    let b = train(&s, &config(HEADLINE_SEED, true))
        .knowledge_base
        .to_json();
    let kb = KnowledgeBase::from_json(&a).unwrap();
    let r1 = serde_json::to_string(&evaluate(&kb, &s, EVAL_GROUPS, EVAL_SEED).unwrap()).unwrap();
    let r2 = serde_json::to_string(&evaluate(&kb, &s, EVAL_GROUPS, EVAL_SEED).unwrap()).unwrap();
    verdict(
        "determinism",
        a == b && r1 == r2 && dominance_bound(&kb, 0, 1, []) == 0,
        format!(
            "kb files identical: {}; eval reports identical: {}",
            a == b,
            r1 == r2
        ),
    );
}
