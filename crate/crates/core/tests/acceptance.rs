//! Acceptance suite. Every criterion prints one PASS/FAIL line.
//!
//! Two criteria are known not to hold as stated; they run unchanged and
//! report FAIL, while their corrected companions are required to pass.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wolstenholme::closedforms::{normalize_spec, triple_general};
use wolstenholme::expr::parse_spec;
use wolstenholme::general::{
    coeff_extraction_sum, esp_sum, multi_index_j, newton_esp, scaling_reduce, GeneralSumParams,
};
use wolstenholme::oracle::{brute_sum, residue_matrix, SumSpec};
use wolstenholme::polyring::{
    render_table, symbolic_coeff_table, symbolic_sum_table, BiPolyZp, CoeffDisplay,
};
use wolstenholme::strategy::{evaluate, Strategy};
use wolstenholme::verify::{self, VerifyConfig};
use wolstenholme::{make_prime, Prime};

/// Criteria that cannot hold as stated.
const KNOWN_UNATTAINABLE: [u32; 2] = [10, 11];

struct Outcome {
    id: u32,
    passed: bool,
    detail: String,
}

fn record(
    out: &mut Vec<Outcome>,
    id: u32,
    start: Instant,
    limit: Option<Duration>,
    failures: Vec<String>,
) {
    let elapsed = start.elapsed();
    let mut failures = failures;
    if let Some(limit) = limit {
        if elapsed > limit {
            failures.push(format!("took {elapsed:?}, limit {limit:?}"));
        }
    }
    let passed = failures.is_empty();
    let detail = if passed {
        format!("{elapsed:?}")
    } else {
        format!("{elapsed:?}; {}", failures.join("; "))
    };
    println!(
        "criterion {id:>2}: {} ({detail})",
        if passed { "PASS" } else { "FAIL" }
    );
    out.push(Outcome { id, passed, detail });
}

fn primes(ps: &[i64]) -> Vec<Prime> {
    ps.iter().map(|&p| make_prime(p).unwrap()).collect()
}

fn run_verify(ids: &[&str], ps: &[Prime], cfg: &VerifyConfig) -> Vec<String> {
    let mut failures = Vec::new();
    for id in ids {
        let th = verify::find(id).unwrap();
        for pr in ps {
            let r = verify::verify_theorem(&th, pr, cfg);
            if !r.passed() {
                failures.push(format!(
                    "{id} p={}: {} failures, first {:?}",
                    pr.p(),
                    r.failures.len(),
                    r.failures[0].params
                ));
            }
        }
    }
    failures
}

fn full() -> VerifyConfig {
    VerifyConfig {
        budget: u64::MAX,
        ..VerifyConfig::default()
    }
}

fn expect(failures: &mut Vec<String>, what: &str, got: u64, want: u64) {
    if got != want {
        failures.push(format!("{what}: got {got}, want {want}"));
    }
}

fn worked_ratio() -> Vec<String> {
    let pr = make_prime(17).unwrap();
    let spec = parse_spec(&pr, "(7+k)^9 / ((3+k)^13 (8+k)^8)").unwrap();
    let mut f = Vec::new();
    expect(&mut f, "brute", brute_sum(&spec).unwrap(), 8);
    let norm = normalize_spec(&spec).unwrap();
    let [x, y, k] = norm.terms[..] else {
        return vec![format!("product form has {} terms", norm.terms.len())];
    };
    expect(
        &mut f,
        "triple_general",
        triple_general(&pr, x.offset, y.offset, x.exp, y.exp, k.exp).unwrap(),
        8,
    );
    expect(&mut f, "multi_index_j", multi_index_j(&params(&norm)), 8);
    f
}

fn params(norm: &SumSpec) -> GeneralSumParams {
    let offsets: Vec<u64> = norm.terms.iter().map(|t| t.offset).collect();
    let exps: Vec<i64> = norm.terms.iter().map(|t| t.exp).collect();
    GeneralSumParams::new(&norm.pr, &offsets, &exps).unwrap()
}

fn worked_product() -> Vec<String> {
    let pr = make_prime(17).unwrap();
    let spec = parse_spec(&pr, "(14+k)^3 (10+k)^8 (4+k)^9").unwrap();
    let mut f = Vec::new();
    for st in Strategy::ALL {
        expect(&mut f, st.name(), evaluate(&spec, st).unwrap(), 15);
    }
    let gp = GeneralSumParams::new(&pr, &[14, 10, 4], &[3, 8, 9]).unwrap();
    let (scale, reduced) = scaling_reduce(&gp).unwrap();
    expect(&mut f, "scale", scale, 4);
    expect(
        &mut f,
        "reduced offsets",
        (reduced.offsets() == [13, 1, 0]) as u64,
        1,
    );
    let e = newton_esp(&reduced, 4).unwrap();
    for (r, want) in [(1, 4), (2, 14), (3, 11), (4, 9)] {
        expect(&mut f, &format!("e_{r}"), e.get(r), want);
    }
    f
}

fn worked_triple_ratio() -> Vec<String> {
    let pr = make_prime(23).unwrap();
    let spec = parse_spec(&pr, "1/((7+k)^16 (13+k)^17 (18+k)^19)").unwrap();
    let mut f = Vec::new();
    expect(&mut f, "brute", brute_sum(&spec).unwrap(), 0);
    expect(
        &mut f,
        "closed",
        evaluate(&spec, Strategy::Closed).unwrap(),
        0,
    );
    f
}

fn single_threaded<T: Send>(job: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(job)
}

/// Four-way agreement over distinct-offset tuples, exhaustive up to the cap.
fn general_agreement(pr: &Prime, n: usize, cap: u64, seed: u64) -> Vec<String> {
    let p = pr.p();
    let offsets_count: u64 = (0..n as u64).map(|i| p - i).product();
    let total = offsets_count * (p - 1).pow(n as u32);
    let mut tuples: Vec<(Vec<u64>, Vec<i64>)> = Vec::new();
    if total <= cap {
        for idx in 0..(p.pow(n as u32) * (p - 1).pow(n as u32)) {
            let mut rest = idx;
            let offsets: Vec<u64> = (0..n)
                .map(|_| {
                    let d = rest % p;
                    rest /= p;
                    d
                })
                .collect();
            let exps: Vec<i64> = (0..n)
                .map(|_| {
                    let d = rest % (p - 1);
                    rest /= p - 1;
                    d as i64 + 1
                })
                .collect();
            if offsets.iter().collect::<BTreeSet<_>>().len() == n {
                tuples.push((offsets, exps));
            }
        }
        assert_eq!(tuples.len() as u64, total);
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        while (tuples.len() as u64) < cap {
            let offsets: Vec<u64> = (0..n).map(|_| rng.gen_range(0..p)).collect();
            if offsets.iter().collect::<BTreeSet<_>>().len() != n {
                continue;
            }
            let exps: Vec<i64> = (0..n).map(|_| rng.gen_range(1..p as i64)).collect();
            tuples.push((offsets, exps));
        }
    }
    let mut failures = Vec::new();
    for (offsets, exps) in tuples {
        let gp = GeneralSumParams::new(pr, &offsets, &exps).unwrap();
        let spec = SumSpec::new(pr, offsets.iter().copied().zip(exps.iter().copied()), []).unwrap();
        let values = [
            brute_sum(&spec).unwrap(),
            multi_index_j(&gp),
            coeff_extraction_sum(&gp),
            esp_sum(&gp),
        ];
        if values.iter().any(|&v| v != values[0]) {
            failures.push(format!(
                "p={p} offsets={offsets:?} exps={exps:?}: {values:?}"
            ));
        }
    }
    failures
}

fn golden(name: &str) -> String {
    let path = format!("{}/tests/golden/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(path).unwrap()
}

fn golden_tables() -> Vec<String> {
    let pr = make_prime(11).unwrap();
    let mut f = Vec::new();
    for (m, n) in [(7, 7), (6, 9)] {
        for (kind, rows, first) in [
            ("coeff", symbolic_coeff_table(&pr, m, n).unwrap(), 0),
            ("sum", symbolic_sum_table(&pr, m, n).unwrap(), 1),
        ] {
            let indexed: Vec<(usize, &BiPolyZp)> = rows
                .iter()
                .enumerate()
                .map(|(i, r)| (i + first, r))
                .collect();
            let got = render_table(&indexed, CoeffDisplay::Canonical);
            let want = golden(&format!("{kind}_{m}_{n}.txt"));
            for (g, w) in got.lines().zip(want.lines()) {
                if g != w {
                    f.push(format!("{kind} ({m},{n}): `{g}` != `{w}`"));
                }
            }
            if got.lines().count() != want.lines().count() {
                f.push(format!("{kind} ({m},{n}): row count differs"));
            }
        }
    }
    f
}

fn figures() -> Vec<String> {
    let pr = make_prime(11).unwrap();
    let mut f = Vec::new();
    for a in [1, 2] {
        f.extend(
            residue_matrix(&pr, a)
                .unwrap()
                .observation_failures()
                .into_iter()
                .map(|e| format!("a={a}: {e}")),
        );
    }
    f.extend(run_verify(&["figures"], &[pr], &full()));
    f
}

#[test]
fn acceptance() {
    let ms = Duration::from_millis(1);
    let mut out = Vec::new();

    let t = Instant::now();
    let f = worked_ratio();
    record(&mut out, 1, t, Some(ms), f);

    let t = Instant::now();
    let f = worked_product();
    record(&mut out, 2, t, Some(ms), f);

    let t = Instant::now();
    let f = worked_triple_ratio();
    record(&mut out, 3, t, Some(ms), f);

    let t = Instant::now();
    let f = single_threaded(|| run_verify(&["thm2.1"], &primes(&[5, 7, 11, 13]), &full()));
    record(&mut out, 4, t, Some(Duration::from_secs(30)), f);

    let t = Instant::now();
    let ids = [
        "thm2.3", "thm2.6", "thm2.8", "thm3.1", "thm3.4", "thm3.5", "thm3.6",
    ];
    let mut f = run_verify(&ids, &primes(&[5, 7, 11]), &full());
    f.extend(run_verify(
        &ids,
        &primes(&[13]),
        &VerifyConfig {
            budget: 10_000,
            ..VerifyConfig::default()
        },
    ));
    record(&mut out, 5, t, Some(Duration::from_secs(300)), f);

    let t = Instant::now();
    let mut f = Vec::new();
    for pr in primes(&[5, 7, 11]) {
        for n in 2..=4 {
            f.extend(general_agreement(
                &pr,
                n,
                10_000,
                verify::DEFAULT_SEED ^ (pr.p() << 8) ^ n as u64,
            ));
        }
    }
    record(&mut out, 6, t, None, f);

    let t = Instant::now();
    let ids = [
        "eq2",
        "eq3",
        "cor2.7",
        "thm3.8",
        "thm3.10",
        "thm3.11",
        "thm3.7",
        "thm3.9",
        "thm3.13",
        "cor3.12",
        "vandermonde",
    ];
    let f = run_verify(&ids, &verify::parse_primes("5..31").unwrap(), &full());
    record(&mut out, 7, t, Some(Duration::from_secs(120)), f);

    let t = Instant::now();
    let f = golden_tables();
    record(&mut out, 8, t, None, f);

    let t = Instant::now();
    let f = figures();
    record(&mut out, 9, t, None, f);

    let range = verify::parse_primes("5..97").unwrap();
    let p2 = VerifyConfig {
        mod_p2: true,
        ..full()
    };
    let t = Instant::now();
    let f = run_verify(&["thm1.3", "thm1.2"], &range, &p2);
    record(&mut out, 10, t, Some(Duration::from_secs(10)), f);
    let companion_10 = run_verify(&["thm1.3-interior", "thm1.2"], &range, &p2);
    println!(
        "criterion 10 companion (2n <= p-3): {}",
        if companion_10.is_empty() {
            "PASS"
        } else {
            "FAIL"
        }
    );

    let small = primes(&[5, 7, 11]);
    let t = Instant::now();
    let f = run_verify(&["tables"], &small, &full());
    record(&mut out, 11, t, None, f);
    let companion_11 = run_verify(&["tables-complete"], &small, &full());
    println!(
        "criterion 11 companion (third coefficient row): {}",
        if companion_11.is_empty() {
            "PASS"
        } else {
            "FAIL"
        }
    );

    let unexpected: Vec<String> = out
        .iter()
        .filter(|o| !o.passed && !KNOWN_UNATTAINABLE.contains(&o.id))
        .map(|o| format!("criterion {}: {}", o.id, o.detail))
        .collect();
    assert!(unexpected.is_empty(), "{unexpected:#?}");
    assert!(companion_10.is_empty(), "{companion_10:#?}");
    assert!(companion_11.is_empty(), "{companion_11:#?}");
}
