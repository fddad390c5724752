//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::process::Command;
use std::time::{Duration, Instant};

use ecdim::contbounds::{ecd_truncation_eps, lemma2_f, lemma5_bound};
use ecdim::scalarfun::g_nats;
use ecdim::spectrum::{fhat, EnergyBudget};
use ecdim::tables::{generate_table, TableConfig, TableResult};
use ecdim::{
    CapacityKind, EnergyLimitParams, EnergyLimitedBounds, FSource, Lemma2Variant, LogBase, MaxEntropy, Spectrum,
    UniversalBounds,
};
use ecdim_verify::{run_check, CheckKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TABLE_TOL: f64 = 0.05;
const IDENTITY_TOL: f64 = 1e-12;
const DRAWS: usize = 1000;
const SEED: u64 = 7;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn table_misses(t: &TableResult) -> Vec<String> {
    t.cells
        .iter()
        .filter(|c| c.rel_err > TABLE_TOL)
        .map(|c| {
            format!(
                "T{} E={} {}: m={:.3e} published {:.1e} ({:.1}%)",
                t.table,
                c.e_over_hbar_omega,
                c.capacity.name(),
                c.m as f64,
                c.published_m,
                100.0 * c.rel_err
            )
        })
        .collect()
}

fn tables(ids: &[u8], budget: Duration) -> Outcome {
    let start = Instant::now();
    let results: Vec<TableResult> = ids
        .iter()
        .map(|&id| generate_table(id, TableConfig::default()).expect("table computes"))
        .collect();
    let elapsed = start.elapsed();
    let misses: Vec<String> = results.iter().flat_map(table_misses).collect();
    let cells: usize = results.iter().map(|t| t.cells.len()).sum();
    let worst = results.iter().map(TableResult::max_rel_err).fold(0.0, f64::max);
    let fast = elapsed <= budget;
    let mut detail = format!(
        "{} of {cells} cells within {:.0}%, worst {:.1}%, {:.2} s",
        cells - misses.len(),
        100.0 * TABLE_TOL,
        100.0 * worst,
        elapsed.as_secs_f64()
    );
    if !misses.is_empty() {
        detail.push_str(&format!("; misses: {}", misses.join("; ")));
    }
    outcome(misses.is_empty() && fast, detail)
}

fn ea_cross_check() -> Outcome {
    let u = UniversalBounds::new(Spectrum::single_mode_unit(), FSource::Exact).unwrap();
    let e = EnergyBudget(3.0);
    let target = 0.1 * u.max_entropy_nats(e).unwrap();
    let value = u.f(CapacityKind::Ea, e, 86_000).unwrap().value;
    let r = rel(value, target);
    outcome(
        r <= 0.02,
        format!("f = {value:.6} nats vs 0.1 F = {target:.6} nats ({:.2}%)", 100.0 * r),
    )
}

fn base_invariance() -> Outcome {
    let mut cells = 0;
    let mut differing = Vec::new();
    for id in 1..=6 {
        let nat = generate_table(
            id,
            TableConfig {
                base: LogBase::Natural,
                f_source: FSource::Exact,
            },
        )
        .unwrap();
        let two = generate_table(
            id,
            TableConfig {
                base: LogBase::Two,
                f_source: FSource::Exact,
            },
        )
        .unwrap();
        for (a, b) in nat.cells.iter().zip(&two.cells) {
            cells += 1;
            if a.m != b.m {
                differing.push(format!("T{id} E={} {}", a.e_over_hbar_omega, a.capacity.name()));
            }
        }
    }
    outcome(
        differing.is_empty(),
        format!("{} of {cells} cells identical {:?}", cells - differing.len(), differing),
    )
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..hi.ln())).exp()
}

fn identities() -> Outcome {
    let spec = Spectrum::single_mode_unit();
    let u = UniversalBounds::new(spec.clone(), FSource::Exact).unwrap();
    let fbar = MaxEntropy::grounded(&spec, FSource::Exact).unwrap();
    let fb = MaxEntropy::output_bound(&spec, FSource::Exact).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = [0.0f64; 5];
    for _ in 0..DRAWS {
        let energy = log_uniform(&mut rng, 0.6, 300.0);
        let e = EnergyBudget(energy);
        let e_bar = energy - 0.5;
        let m = log_uniform(&mut rng, 64.0 * energy, 1e13) as u64;
        let gap = m as f64;

        let q = u.f(CapacityKind::Quantum, e, m).unwrap().value;
        let p = u.f(CapacityKind::Private, e, m).unwrap().value;
        worst[0] = worst[0].max(rel(p, 2.0 * q));

        let c = u.f(CapacityKind::Classical, e, m).unwrap().value;
        let chi = u.f(CapacityKind::Chi, e, m).unwrap().value;
        for (variant, want) in [
            (Lemma2Variant::General, q),
            (Lemma2Variant::PerCopyEnergy, c),
            (Lemma2Variant::SingleCopy, chi),
        ] {
            let got = lemma2_f(&spec, &fbar, e, m, variant).unwrap();
            worst[1] = worst[1].max(rel(got, want));
        }

        let params = EnergyLimitParams::new(log_uniform(&mut rng, 0.1, 1e6), rng.random_range(0.0..1e6)).unwrap();
        let lim = EnergyLimitedBounds::new(spec.clone(), fb.clone(), params).unwrap();
        let lc = lim.f(CapacityKind::Classical, e, m).unwrap().value;
        let lea = lim.f(CapacityKind::Ea, e, m).unwrap().value;
        worst[2] = worst[2].max(rel(lc, lea));

        let t = rng.random_range(1e-6..0.5);
        let pp = log_uniform(&mut rng, 1.0 + 1e-6, 1e4);
        let eps = ecd_truncation_eps(e_bar, gap).unwrap();
        let lq = lim
            .f_at_nats(CapacityKind::Quantum, energy, e_bar, gap, t, Some(pp))
            .unwrap();
        worst[3] = worst[3].max(rel(lemma5_bound(eps, energy, params, &fb, pp, t, false).unwrap(), lq));
        let lcl = lim
            .f_at_nats(CapacityKind::Classical, energy, e_bar, gap, t, None)
            .unwrap();
        worst[4] = worst[4].max(rel(lemma5_bound(eps, energy, params, &fb, pp, t, true).unwrap(), lcl));
    }
    let pass = worst.iter().all(|&w| w <= IDENTITY_TOL);
    outcome(
        pass,
        format!(
            "{DRAWS} draws; max rel: Cp/2Q {:.1e}, lemma2 {:.1e}, C/Cea {:.1e}, Q composition {:.1e}, C composition {:.1e}",
            worst[0], worst[1], worst[2], worst[3], worst[4]
        ),
    )
}

fn gibbs() -> Outcome {
    let osc = Spectrum::single_mode_unit();
    let modes: [&[f64]; 3] = [&[1.0], &[1.0, 1.3], &[1.0, 1.3, 0.7]];
    let specs: Vec<Spectrum> = modes
        .iter()
        .map(|w| Spectrum::oscillator(w.to_vec(), 1.0).unwrap())
        .collect();
    let (mut entropy_err, mut residual, mut fhat_margin) = (0.0f64, 0.0f64, f64::INFINITY);
    for i in 0..100 {
        let energy = 0.5 * (2000.0f64).powf(i as f64 / 99.0);
        let sol = osc.gibbs_entropy(EnergyBudget(energy)).unwrap();
        entropy_err = entropy_err.max((sol.entropy_nats - g_nats(energy - 0.5)).abs());
        residual = residual.max(sol.residual);
        for (spec, w) in specs.iter().zip(modes) {
            let e = energy.max(spec.ground_energy());
            let f = spec.gibbs_entropy(EnergyBudget(e)).unwrap();
            residual = residual.max(f.residual);
            fhat_margin = fhat_margin.min(fhat(w.len(), w, 1.0, e).unwrap() - f.entropy_nats);
        }
    }
    outcome(
        entropy_err <= 1e-9 && residual <= 1e-10 && fhat_margin >= -1e-9,
        format!("|F - g| <= {entropy_err:.1e}, residual <= {residual:.1e}, min(Fhat - F) = {fhat_margin:.3e}"),
    )
}

fn suites() -> Outcome {
    let start = Instant::now();
    let kinds = [
        CheckKind::Gentle,
        CheckKind::Pinching,
        CheckKind::TailBound,
        CheckKind::Misc,
        CheckKind::Lemma1,
        CheckKind::ChiTruncation,
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for k in kinds {
        let r = run_check(k, k.default_trials(), SEED).expect("suite runs");
        pass &= r.passed();
        parts.push(format!("{} {}x: {} violations", k.name(), r.trials, r.violations.len()));
    }
    let elapsed = start.elapsed();
    pass &= elapsed <= Duration::from_secs(300);
    outcome(
        pass,
        format!("seed {SEED}; {}; {:.1} s", parts.join(", "), elapsed.as_secs_f64()),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("osc1.json");
    std::fs::write(&spec, r#"{"kind":"oscillator","omegas":[1.0],"hbar":1.0}"#).unwrap();
    let spec = spec.to_str().unwrap();
    let runs: [&[&str]; 3] = [
        &["table", "3", "--format", "json"],
        &[
            "mdim",
            "q",
            spec,
            "10",
            "frac:0.01",
            "--alpha",
            "1e6",
            "--ec",
            "1e6",
            "--format",
            "json",
        ],
        &["verify", "lemma1", "200", "--seed", "11", "--format", "json"],
    ];
    let run = |args: &[&str], threads: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_ecdim"))
            .args(args)
            .env("ECDIM_THREADS", threads)
            .output()
            .expect("binary runs");
        assert!(
            out.status.success(),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        out.stdout
    };
    let mut same = 0;
    for args in runs {
        let a = run(args, "1");
        let b = run(args, "4");
        let c = run(args, "4");
        same += usize::from(a == b && b == c);
    }
    outcome(
        same == runs.len(),
        format!(
            "{same} of {} commands byte-identical across runs and pool sizes",
            runs.len()
        ),
    )
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("universal tables 1-2", || tables(&[1, 2], Duration::from_secs(10))),
        ("energy-limited tables 3-6", || {
            tables(&[3, 4, 5, 6], Duration::from_secs(60))
        }),
        ("f_Cea analytic cross-check", ea_cross_check),
        ("base invariance", base_invariance),
        ("formula identities", identities),
        ("Gibbs correctness", gibbs),
        ("randomized inequality suites", suites),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let o = check();
        failed += usize::from(!o.pass);
        println!("{} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
