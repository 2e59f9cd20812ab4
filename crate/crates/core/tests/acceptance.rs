//! End-to-end acceptance checks. Each test prints a single PASS/FAIL line;
//! run with `--nocapture` to see them.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use seqspace::functionals::{functional_b, ratio, Run, StepSequence};
use seqspace::norms::{garling_norm, inclusion_gap, lorentz_norm, symmetric_defect, FiniteVector};
use seqspace::oracles::{garling_norm_bruteforce, rearrangement_check};
use seqspace::weights::WeightFamily;
use seqspace::witness::{
    build_witness, certify, find_block_lengths, lower_bound_s, verify_certificate, Mode, DEFAULT_SLACK,
};

const R_MAX: usize = 5;

fn report(id: u32, name: &str, ok: bool, detail: String) {
    println!("{} criterion {id} ({name}): {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {id} ({name}) failed: {detail}");
}

fn sqrt_family() -> WeightFamily {
    WeightFamily::power(0.5).unwrap()
}

/// Random non-increasing step sequence with total support in `1..=max_support`.
fn random_steps(rng: &mut impl Rng, max_support: u64) -> StepSequence {
    let support = rng.gen_range(1..=max_support);
    let runs = rng.gen_range(1..=support.min(12));
    let mut cuts: Vec<u64> = (0..runs - 1).map(|_| rng.gen_range(1..support)).collect();
    cuts.push(0);
    cuts.push(support);
    cuts.sort_unstable();
    cuts.dedup();
    let mut values: Vec<f64> = (0..cuts.len() - 1).map(|_| rng.gen_range(1e-3..10.0)).collect();
    values.sort_by(|a, b| b.total_cmp(a));
    let runs = cuts
        .windows(2)
        .zip(values)
        .map(|(w, v)| Run::new(w[1] - w[0], v))
        .collect();
    StepSequence::new(runs).unwrap()
}

fn random_non_increasing(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..10.0)).collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

#[test]
fn criterion_1_witness_bounds() {
    let fam = sqrt_family();
    let start = Instant::now();
    let mut worst = Vec::new();
    let mut ok = true;
    for r in 1..=R_MAX {
        let cert = certify(&fam, r, DEFAULT_SLACK, fam.cap(), Mode::Float).unwrap();
        let check = verify_certificate(&fam, &cert.d, 1e-6, Mode::Float).unwrap();
        let (a, b) = (check.a_value(), check.b_value());
        ok &= a >= (r as f64 / 2.0) * (1.0 - 1e-6) && b <= 3.0 * (1.0 + 1e-6);
        worst.push(format!("r={r}: A={a:.6} B={b:.6}"));
    }
    let elapsed = start.elapsed();
    ok &= elapsed <= Duration::from_secs(60);
    report(1, "witness bounds", ok, format!("{} in {elapsed:.2?}", worst.join(", ")));
}

#[test]
fn criterion_2_unbounded_ratio() {
    let fam = sqrt_family();
    let mut prev = f64::NEG_INFINITY;
    let mut ok = true;
    let mut seen = Vec::new();
    for r in 1..=R_MAX {
        let (_, exact) = lower_bound_s(&fam, r).unwrap();
        ok &= exact > prev && exact > r as f64 / 6.0;
        prev = exact;
        seen.push(format!("{exact:.6}"));
    }
    report(2, "unbounded ratio", ok, format!("ratios [{}]", seen.join(", ")));
}

#[test]
fn criterion_3_easy_directions() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let ctail = WeightFamily::constant_tail(0.5).unwrap();
    let power2 = WeightFamily::power(2.0).unwrap();
    let bound = power2.classify().constant.unwrap();
    let (mut worst_c, mut worst_p) = (0.0f64, 0.0f64);
    for _ in 0..10_000 {
        let f = random_steps(&mut rng, 200);
        worst_c = worst_c.max(ratio(&f, &ctail).unwrap().ratio);
        worst_p = worst_p.max(ratio(&f, &power2).unwrap().ratio);
    }
    let ok = worst_c <= 2.0 + 1e-9 && worst_p <= bound + 1e-9;
    report(
        3,
        "easy directions",
        ok,
        format!("max ratio ctail:0.5 = {worst_c:.9} (<= 2), power:2 = {worst_p:.9} (<= {bound:.9})"),
    );
}

#[test]
fn criterion_4_rearrangement_inequality() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut violations = 0;
    for trial in 0..1_000 {
        let n = 1 + trial % 7;
        let a = random_non_increasing(&mut rng, n);
        let b = random_non_increasing(&mut rng, n);
        if !rearrangement_check(&a, &b, n).unwrap().holds {
            violations += 1;
        }
    }
    report(4, "rearrangement inequality", violations == 0, format!("{violations} violations in 1000 pairs, n <= 7"));
}

#[test]
fn criterion_5_norm_oracle_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let families = [
        sqrt_family(),
        WeightFamily::harmonic(),
        WeightFamily::power(2.0).unwrap(),
        WeightFamily::constant_tail(0.3).unwrap(),
    ];
    let mut worst_err = 0.0f64;
    for trial in 0..3_000 {
        let fam = &families[trial % families.len()];
        let p = [1.0, 1.5, 2.0][trial % 3];
        let m = rng.gen_range(1..=16);
        let b = FiniteVector::new((0..m).map(|_| rng.gen_range(-5.0..5.0)).collect()).unwrap();
        let fast = garling_norm(&b, fam, p).unwrap().value;
        let brute = garling_norm_bruteforce(&b, fam, p).unwrap();
        worst_err = worst_err.max(rel_err(fast, brute));
    }
    let mut dominated = 0;
    for trial in 0..10_000 {
        let fam = &families[trial % families.len()];
        let p = [1.0, 1.5, 2.0][trial % 3];
        let m = rng.gen_range(1..=64);
        let b = FiniteVector::new((0..m).map(|_| rng.gen_range(-5.0..5.0)).collect()).unwrap();
        let g = garling_norm(&b, fam, p).unwrap().value;
        let l = lorentz_norm(&b, fam, p).unwrap().value;
        if g <= l * (1.0 + 1e-10) {
            dominated += 1;
        }
    }
    let ok = worst_err <= 1e-12 && dominated == 10_000;
    report(
        5,
        "norm oracle equivalence",
        ok,
        format!("max rel err {worst_err:.3e} over 3000 vectors; garling <= lorentz on {dominated}/10000"),
    );
}

#[test]
fn criterion_6_symmetric_basis_failure() {
    let fam = sqrt_family();
    let d = find_block_lengths(&fam, R_MAX, DEFAULT_SLACK, fam.cap()).unwrap();
    let mut ok = true;
    let mut seen = Vec::new();
    for r in 1..=R_MAX {
        let f = build_witness(&fam, &d[..r]).unwrap();
        let m = f.support_len();
        let defect = symmetric_defect(&f, &fam, 1.0, m).unwrap().defect;
        ok &= defect > r as f64 / 6.0;
        seen.push(format!("{defect:.4}"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let families = [sqrt_family(), WeightFamily::harmonic(), WeightFamily::power(0.8).unwrap()];
    let mut worst = f64::NEG_INFINITY;
    for trial in 0..1_000 {
        let fam = &families[trial % families.len()];
        let p = [1.0, 1.5, 2.0][trial % 3];
        let f = random_steps(&mut rng, 200);
        let r = rng.gen_range(1..=f.support_len());
        let reversed = symmetric_defect(&f, fam, p, r).unwrap().reversed.powered;
        let (b, _) = functional_b(&f, fam).unwrap();
        worst = worst.max(reversed - b);
    }
    ok &= worst <= 1e-10;
    report(
        6,
        "symmetric-basis failure",
        ok,
        format!("defects [{}]; max garling(reversed)^p - B = {worst:.3e}", seen.join(", ")),
    );
}

#[test]
fn criterion_7_strict_inclusion() {
    let fam = sqrt_family();
    let mut ok = true;
    let mut seen = Vec::new();
    for r in 1..=R_MAX {
        let gap = inclusion_gap(&fam, 1.0, r).unwrap();
        ok &= gap >= r as f64 / 6.0;
        seen.push(format!("{gap:.4}"));
    }
    report(7, "strict inclusion", ok, format!("gaps [{}]", seen.join(", ")));
}
