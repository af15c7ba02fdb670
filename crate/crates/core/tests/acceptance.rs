//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::Rng;
use sbd_core::bench::{
    model_grid, prepare, rank, run_manifest, speed_fit, time_models, Eigensolver, ModelSpec, ReferencePolicy,
    RunSettings, SpeedReport, TIMED_RUNS,
};
use sbd_core::blockops::BlockConfig;
use sbd_core::eig::{dense_spectrum, dense_spectrum_general, krylov_extreme, KrylovConfig, Which};
use sbd_core::hammat::{gen_commuting_dense, random_hermitian, seeded_rng, SparseHermitian};
use sbd_core::linalg::{diag, from_real_rows, Block};
use sbd_core::matsqrt::SqrtConfig;
use sbd_core::sbd::{
    applications_needed, compress, compression_ratio, hermitize, normalize, recover_eigenvalue, sbd_step,
    top_eigenvalue, CompressOptions, CompressedHamiltonian, CompressionStep, NormalizePolicy, SbdConfig,
};
use sbd_core::vqe::{
    finite_difference_gradient, parameter_shift_gradient, vqe_minimize_dense, RealObservable, VqeConfig,
};

const MOLECULES: [&str; 6] = ["tetracene", "benzaanthracene", "triphenylene", "benzocphenanthrene", "pyrene", "chrysene"];

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/pah")
}

fn pah_sources(active: &str) -> Vec<(String, PathBuf)> {
    MOLECULES
        .iter()
        .map(|m| (m.to_string(), fixtures().join(format!("{m}_{active}.json"))))
        .collect()
}

type Check = Result<String, String>;

fn within(elapsed: Duration, limit_s: f64) -> Check {
    if elapsed.as_secs_f64() < limit_s {
        Ok(format!("{:.2}s < {limit_s}s", elapsed.as_secs_f64()))
    } else {
        Err(format!("runtime {:.2}s exceeds {limit_s}s", elapsed.as_secs_f64()))
    }
}

fn compression_algebra() -> Check {
    let t = Instant::now();
    let c = |k| compression_ratio(k).map_err(|e| e.to_string());
    let k = |p| applications_needed(p).map_err(|e| e.to_string());
    if c(1)? != 50.0 || c(4)? != 93.75 {
        return Err(format!("C(1)={} C(4)={}", c(1)?, c(4)?));
    }
    if k(90.0)? != 4 || k(99.0)? != 7 {
        return Err(format!("k(90)={} k(99)={}", k(90.0)?, k(99.0)?));
    }
    for depth in 1..=30 {
        if k(c(depth)?)? != depth {
            return Err(format!("k(C({depth})) != {depth}"));
        }
    }
    within(t.elapsed(), 1.0).map(|s| format!("C(1)=50, C(4)=93.75, k(90)=4, k(99)=7, k(C(k))=k for k<=30; {s}"))
}

fn scalar_exactness() -> Check {
    let m = from_real_rows(2, &[2.0, 1.0, 1.0, 3.0]);
    let out = sbd_step(&m, &BlockConfig::default(), &SqrtConfig::default()).map_err(|e| e.to_string())?;
    let expect = [(5.0 - 5f64.sqrt()) / 2.0, (5.0 + 5f64.sqrt()) / 2.0];
    let mut worst: f64 = 0.0;
    for (g, want) in [&out.gamma0, &out.gamma1].into_iter().zip(expect) {
        let n = normalize(&hermitize(g), NormalizePolicy::Gershgorin).map_err(|e| e.to_string())?;
        let step = CompressionStep {
            branch: 0,
            n_scale: n.n_scale,
            t_shift: n.t_shift,
            used_det_prime: false,
            sqrt_fallback: false,
        };
        let got = recover_eigenvalue(n.block[(0, 0)].re, &step, 1).map_err(|e| e.to_string())?;
        worst = worst.max((got - want).abs());
    }
    if worst <= 1e-6 {
        Ok(format!("both eigenvalues of [[2,1],[1,3]] recovered, max error {worst:.1e}"))
    } else {
        Err(format!("max error {worst:e} > 1e-6"))
    }
}

fn commuting_exactness() -> Check {
    let t = Instant::now();
    let dims = [8, 16, 32, 64];
    let mut worst: f64 = 0.0;
    let count = 120;
    for seed in 0..count {
        let dim = dims[seed as usize % dims.len()];
        let m = gen_commuting_dense(dim, seed).map_err(|e| e.to_string())?;
        let out = sbd_step(&m, &BlockConfig::default(), &SqrtConfig::default()).map_err(|e| e.to_string())?;
        let mut got: Vec<f64> = dense_spectrum_general(&out.gamma0)
            .map_err(|e| e.to_string())?
            .into_iter()
            .chain(dense_spectrum_general(&out.gamma1).map_err(|e| e.to_string())?)
            .map(|z| z.re)
            .collect();
        got.sort_by(f64::total_cmp);
        let want = dense_spectrum(&m).map_err(|e| e.to_string())?;
        for (g, w) in got.iter().zip(&want) {
            worst = worst.max((g - w).abs());
        }
    }
    if worst > 1e-5 {
        return Err(format!("max deviation {worst:e} > 1e-5"));
    }
    within(t.elapsed(), 60.0).map(|s| format!("{count} instances, dims 8-64, max deviation {worst:.1e}; {s}"))
}

/// Artifact round trip, then the top of the final block recovered to the original scale.
fn recover_from_artifact(m: &Block, solver: Which) -> Result<f64, String> {
    let sp = SparseHermitian::from_dense(m).map_err(|e| e.to_string())?;
    let c = compress(&sp, &CompressOptions::new(1), &SbdConfig::default()).map_err(|e| e.to_string())?;
    let text = c.to_json_string().map_err(|e| e.to_string())?;
    let back = CompressedHamiltonian::from_json_str(&text).map_err(|e| e.to_string())?;
    let eps = match solver {
        Which::Largest => krylov_extreme(&back.block, Which::Largest, &KrylovConfig::default())
            .map_err(|e| e.to_string())?
            .value,
        Which::Smallest => top_eigenvalue(&back.block, 0).map_err(|e| e.to_string())?,
    };
    back.recover(eps).map_err(|e| e.to_string())
}

fn depth_one_recovery() -> Check {
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    let mut rng = seeded_rng(42);
    for dim in [4, 8, 16, 32, 64] {
        for _ in 0..4 {
            let vals: Vec<f64> = (0..dim).map(|_| rng.random_range(-10.0..5.0)).collect();
            let m = diag(&vals);
            let ground = vals.iter().copied().fold(f64::INFINITY, f64::min);
            if ground >= 0.0 {
                continue;
            }
            for solver in [Which::Largest, Which::Smallest] {
                worst = worst.max((recover_from_artifact(&m, solver)? - ground).abs());
            }
            cases += 1;
        }
    }
    for seed in 0..20 {
        let m = gen_commuting_dense([8, 16, 32, 64][seed % 4], 1000 + seed as u64).map_err(|e| e.to_string())?;
        let ground = dense_spectrum(&m).map_err(|e| e.to_string())?[0];
        for solver in [Which::Largest, Which::Smallest] {
            worst = worst.max((recover_from_artifact(&m, solver)? - ground).abs());
        }
        cases += 1;
    }
    if worst <= 1e-5 {
        Ok(format!("{cases} diagonal/commuting instances via sbd-v1 artifacts, max error {worst:.1e}"))
    } else {
        Err(format!("max error {worst:e} > 1e-5"))
    }
}

fn pah_error_shape() -> Check {
    let settings = RunSettings::default();
    let mut lines = Vec::new();
    for (label, path) in pah_sources("2_2") {
        let exact = sbd_core::bench::run_model(&ModelSpec::new(&label, &path, Eigensolver::Dense, 0), &settings)
            .map_err(|e| e.to_string())?
            .energy;
        let mut errs = Vec::new();
        for depth in 0..=2 {
            let run = sbd_core::bench::run_model(&ModelSpec::new(&label, &path, Eigensolver::Krylov, depth), &settings)
                .map_err(|e| format!("{label} depth {depth}: {e}"))?;
            errs.push((run.energy - exact).abs());
        }
        for d in 0..2 {
            if errs[d + 1] > errs[d] + 0.05 {
                return Err(format!("{label}: error rises from {:.4} to {:.4} at depth {}", errs[d], errs[d + 1], d + 1));
            }
        }
        lines.push(format!("{label} {:.1e}/{:.1e}/{:.1e}", errs[0], errs[1], errs[2]));
    }
    Ok(format!("errors at depths 0/1/2 (Ha): {}", lines.join(", ")))
}

fn ranking() -> Check {
    let t = Instant::now();
    let specs = model_grid(&pah_sources("2_2"), &[0, 1, 2]);
    let outcomes = run_manifest(&specs, &RunSettings::default());
    let report = rank(&outcomes, &ReferencePolicy::UncompressedVqe).map_err(|e| e.to_string())?;
    let sbd_match = report.sbd_match_rate.ok_or("no compressed models")?;
    let hit = report.sbd_vqe_hit_rate.ok_or("no compressed VQE models")?;
    if sbd_match < 8.0 / 9.0 {
        return Err(format!("SBD match rate {sbd_match:.3} < 8/9 (orderings {:?})", report.orderings));
    }
    if hit != 1.0 {
        return Err(format!("SBD-VQE ground hit rate {hit:.3} < 1"));
    }
    within(t.elapsed(), 600.0).map(|s| {
        format!(
            "{} models x {} molecules vs {}: SBD match rate {sbd_match:.3}, SBD-VQE hit rate {hit:.3}, overall match {:.3}; {s}",
            report.models.len(),
            report.molecules.len(),
            report.reference,
            report.match_rate
        )
    })
}

fn speedup() -> Check {
    let label = "tetracene";
    let source = fixtures().join("tetracene_4_4.json");
    let settings = RunSettings::default();
    let prepared = prepare(&source, label, settings.sign, settings.qubit_cap).map_err(|e| e.to_string())?;
    let specs: Vec<ModelSpec> = (0..=3).map(|d| ModelSpec::new(label, &source, Eigensolver::Vqe, d)).collect();
    let entries = time_models(&prepared, &specs, &settings).map_err(|e| e.to_string())?;
    let report = SpeedReport::new(entries, "vqe-d0").map_err(|e| e.to_string())?;
    let base = report.entries[0].median;
    let medians: Vec<String> = report.entries.iter().map(|e| format!("{:.4}", e.median)).collect();
    if let Some(slow) = report.entries[1..].iter().find(|e| e.median >= base) {
        return Err(format!("depth {} median {:.4}s not below depth 0 {base:.4}s (medians {medians:?})", slow.depth, slow.median));
    }
    let fit = speed_fit(&report.series(Eigensolver::Vqe)).map_err(|e| e.to_string())?;
    if !(fit.b > 0.0) {
        return Err(format!("fitted b = {} not positive", fit.b));
    }
    Ok(format!(
        "tetracene (4,4) 8 qubits, median of {TIMED_RUNS} SBD-VQE times by depth 0..3: {medians:?} s; fit a={:.3} b={:.3}",
        fit.a, fit.b
    ))
}

fn vqe_correctness() -> Check {
    let t = Instant::now();
    let dims = [2, 4, 8, 16];
    let mut min_gap = f64::INFINITY;
    for seed in 0..200u64 {
        let m = random_hermitian(dims[seed as usize % 4], 5000 + seed);
        let lo = dense_spectrum(&m).map_err(|e| e.to_string())?[0];
        let r = vqe_minimize_dense(&m, &VqeConfig::with_seed(seed)).map_err(|e| e.to_string())?;
        min_gap = min_gap.min(r.energy - lo);
        if r.energy < lo - 1e-9 {
            return Err(format!("seed {seed}: energy {} below ground {lo}", r.energy));
        }
    }
    let mut worst: f64 = 0.0;
    let mut rng = seeded_rng(77);
    for seed in 0..50u64 {
        let q = 1 + seed as usize % 4;
        let m = random_hermitian(1 << q, 9000 + seed);
        let obs = RealObservable::from_dense(&m, 1.0);
        let theta: Vec<f64> = (0..3 * q).map(|_| rng.random_range(-3.2..3.2)).collect();
        let ps = parameter_shift_gradient(&obs, q, &theta);
        let fd = finite_difference_gradient(&obs, q, &theta, 1e-5);
        for (a, b) in ps.iter().zip(&fd) {
            worst = worst.max((a - b).abs());
        }
    }
    if worst > 1e-5 {
        return Err(format!("gradient disagreement {worst:e} > 1e-5"));
    }
    within(t.elapsed(), 120.0).map(|s| {
        format!("200 matrices, min(E - lambda_min) = {min_gap:.1e}; shift vs FD max diff {worst:.1e}; {s}")
    })
}

fn krylov_correctness() -> Check {
    let dims = [2, 4, 8, 16, 32, 64, 128, 256];
    let mut worst: f64 = 0.0;
    for seed in 0..100u64 {
        let m = random_hermitian(dims[seed as usize % dims.len()], 20_000 + seed);
        let ev = dense_spectrum(&m).map_err(|e| e.to_string())?;
        let cfg = KrylovConfig {
            seed,
            ..KrylovConfig::default()
        };
        let lo = krylov_extreme(&m, Which::Smallest, &cfg).map_err(|e| format!("seed {seed}: {e}"))?;
        let hi = krylov_extreme(&m, Which::Largest, &cfg).map_err(|e| format!("seed {seed}: {e}"))?;
        worst = worst.max((lo.value - ev[0]).abs()).max((hi.value - ev[ev.len() - 1]).abs());
    }
    if worst <= 1e-8 {
        Ok(format!("100 matrices, dims 2-256, max deviation {worst:.1e}"))
    } else {
        Err(format!("max deviation {worst:e} > 1e-8"))
    }
}

fn main() {
    let criteria: [(&str, fn() -> Check); 9] = [
        ("compression algebra", compression_algebra),
        ("scalar-block exactness", scalar_exactness),
        ("commuting-family exactness", commuting_exactness),
        ("depth-1 ground-state recovery", depth_one_recovery),
        ("PAH error shape", pah_error_shape),
        ("ranking reproduction", ranking),
        ("speedup direction", speedup),
        ("VQE correctness", vqe_correctness),
        ("Krylov correctness", krylov_correctness),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let t = Instant::now();
        match check() {
            Ok(detail) => println!("PASS {name}: {detail} [{:.2}s]", t.elapsed().as_secs_f64()),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail} [{:.2}s]", t.elapsed().as_secs_f64());
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
