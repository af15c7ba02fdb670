use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};

use log::{info, warn};
use sbd_core::bench::{
    error_table, ground_state_table, load_manifest, prepare, prepare_loaded, rank as rank_models, ranking_csv,
    ranking_table, results_csv, run_manifest, run_prepared, solve_extreme, speed_fit, speed_table, time_models,
    Eigensolver, ModelSpec, Operand, Prepared, ReferencePolicy, RunSettings, SpeedReport,
};
use sbd_core::blockops::{det_block, det_prime};
use sbd_core::hammat::{
    gen_commuting_block, gen_tfim, load_matrix, random_hermitian, write_mtx_string, SparseHermitian,
};
use sbd_core::linalg::matmul;
use sbd_core::matsqrt::{newton_sqrt, SqrtConfig};
use sbd_core::sbd::{
    applications_needed, compress as compress_matrix, compression_ratio, split_sparse, CompressOptions,
    CompressedHamiltonian, ARTIFACT_FORMAT,
};
use sbd_core::SbdError;

use crate::{CmdResult, Failure, Model};

/// Prints one `key=value` line; values must not contain spaces.
fn emit(pairs: &[(&str, &dyn Display)]) {
    let line: Vec<String> = pairs.iter().map(|(k, v)| format!("{k}={v}")).collect();
    println!("{}", line.join(" "));
}

fn load_prepared(input: &Path, s: &RunSettings) -> Result<Prepared, Failure> {
    let loaded = load_matrix(input, s.qubit_cap)?;
    let dim = loaded.matrix.dim();
    let prepared = prepare_loaded(loaded, s.sign);
    if prepared.matrix.dim() != dim {
        info!("padded {} from dim {dim} to {}", prepared.label, prepared.matrix.dim());
    }
    Ok(prepared)
}

fn parse_path(text: &str) -> Result<Vec<u8>, Failure> {
    text.chars()
        .map(|ch| match ch {
            '0' => Ok(0),
            '1' => Ok(1),
            other => Err(Failure::input(format!("--path may only contain 0 and 1, found {other:?}"))),
        })
        .collect()
}

pub fn compress(
    input: &Path,
    depth: Option<usize>,
    target_percent: Option<f64>,
    out: &Path,
    path: Option<&str>,
    s: &RunSettings,
) -> CmdResult {
    let depth = match (depth, target_percent) {
        (Some(d), _) => d,
        (None, Some(p)) => {
            let d = applications_needed(p).map_err(|e| Failure::input(e.to_string()))? as usize;
            info!("target {p}% needs depth {d}");
            d
        }
        (None, None) => return Err(Failure::input("one of --depth or --target-percent is required")),
    };
    let prepared = load_prepared(input, s)?;
    let mut opts = CompressOptions::new(depth).with_sign(s.sign).with_label(prepared.label.clone());
    if let Some(p) = path {
        opts = opts.with_path(parse_path(p)?);
    }
    let c = compress_matrix(&prepared.matrix, &opts, &s.sbd)?;
    let ratio = compression_ratio(depth as u32)?;
    info!("depth {depth} achieves {ratio}% compression");
    c.save(out)?;
    let path_bits: String = c.path().iter().map(|b| char::from(b'0' + b)).collect();
    emit(&[
        ("command", &"compress"),
        ("label", &c.label),
        ("original_dim", &c.original_dim),
        ("depth", &c.depth()),
        ("block_dim", &c.block.nrows()),
        ("compression_percent", &ratio),
        ("path", &path_bits),
        ("out", &out.display()),
    ]);
    Ok(())
}

fn is_artifact(input: &Path) -> bool {
    let Ok(text) = fs::read_to_string(input) else {
        return false;
    };
    serde_json::from_str::<serde_json::Value>(&text)
        .ok()
        .and_then(|v| v.get("format").and_then(|f| f.as_str()).map(|f| f == ARTIFACT_FORMAT))
        .unwrap_or(false)
}

pub fn eig(input: &Path, method: Eigensolver, depth: usize, s: &RunSettings) -> CmdResult {
    let (label, dim, energy, residual) = if is_artifact(input) {
        if depth > 0 {
            return Err(Failure::input("--depth applies to raw inputs, not artifacts"));
        }
        let c = CompressedHamiltonian::load(input)?;
        let top = solve_extreme(Operand::Dense(&c.block), method, false, s)?;
        let energy = c.recover(top.value)?;
        (c.label.clone(), c.block.nrows(), energy, top.residual)
    } else {
        let prepared = load_prepared(input, s)?;
        let spec = ModelSpec::new(prepared.label.clone(), input, method, depth);
        let run = run_prepared(&prepared, &spec, s)?;
        (prepared.label, run.matrix_dim, run.energy, run.residual)
    };
    emit(&[
        ("command", &"eig"),
        ("label", &label),
        ("method", &method.as_str()),
        ("dim", &dim),
        ("energy", &energy),
        ("residual", &format!("{residual:e}")),
    ]);
    Ok(())
}

fn reference_policy(name: &str) -> ReferencePolicy {
    match name {
        "dense" => ReferencePolicy::UncompressedDense,
        "vqe" => ReferencePolicy::UncompressedVqe,
        other => ReferencePolicy::Named(other.to_string()),
    }
}

fn write(dir: &Path, name: &str, text: &str) -> Result<(), Failure> {
    fs::write(dir.join(name), text).map_err(|e| Failure::pipeline(format!("writing {name}: {e}")))
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "none".to_string(), |x| x.to_string())
}

pub fn rank(manifest: &Path, out: &Path, reference: &str, s: &RunSettings) -> CmdResult {
    let specs = load_manifest(manifest)?;
    fs::create_dir_all(out).map_err(|e| Failure::pipeline(e.to_string()))?;
    let outcomes = run_manifest(&specs, s);
    write(out, "results.csv", &results_csv(&outcomes)?)?;
    write(out, "ground_states.dat", &ground_state_table(&outcomes))?;
    write(out, "errors.dat", &error_table(&outcomes))?;
    let report = rank_models(&outcomes, &reference_policy(reference))?;
    write(out, "ranking.csv", &ranking_csv(&report)?)?;
    write(out, "ranking.dat", &ranking_table(&report))?;
    emit(&[
        ("command", &"rank"),
        ("models", &report.models.len()),
        ("molecules", &report.molecules.len()),
        ("reference", &report.reference),
        ("match_rate", &report.match_rate),
        ("sbd_match_rate", &opt(report.sbd_match_rate)),
        ("ground_hit_rate", &report.ground_hit_rate),
        ("sbd_vqe_hit_rate", &opt(report.sbd_vqe_hit_rate)),
        ("out", &out.display()),
    ]);
    Ok(())
}

pub fn bench(manifest: &Path, out: &Path, reference: &str, s: &RunSettings) -> CmdResult {
    let specs = load_manifest(manifest)?;
    fs::create_dir_all(out).map_err(|e| Failure::pipeline(e.to_string()))?;
    // One group per loaded Hamiltonian so its models are timed interleaved.
    let mut groups: Vec<(PathBuf, String, i8, usize, Vec<ModelSpec>)> = Vec::new();
    for spec in specs {
        let r = s.apply(&spec.overrides);
        let key = (spec.source.clone(), spec.hamiltonian_label.clone(), r.sign, r.qubit_cap);
        match groups.iter_mut().find(|g| (&g.0, &g.1, g.2, g.3) == (&key.0, &key.1, key.2, key.3)) {
            Some(g) => g.4.push(spec),
            None => groups.push((key.0, key.1, key.2, key.3, vec![spec])),
        }
    }
    let mut entries = Vec::new();
    let mut failures = 0;
    for (source, label, sign, cap, specs) in &groups {
        match prepare(source, label, *sign, *cap).and_then(|p| time_models(&p, specs, s)) {
            Ok(timed) => {
                for e in &timed {
                    info!("{} {}: median {:.4}s", e.model, e.label, e.median);
                }
                entries.extend(timed);
            }
            Err(e) => {
                warn!("{label}: {} model(s) failed: {e}", specs.len());
                failures += specs.len();
            }
        }
    }
    let report = SpeedReport::new(entries, reference)?;
    let ref_solver = report
        .entries
        .iter()
        .find(|e| e.model == reference)
        .map(|e| e.eigensolver)
        .unwrap_or(Eigensolver::Vqe);
    let fit = match speed_fit(&report.series(ref_solver)) {
        Ok(f) => Some(f),
        Err(e) => {
            warn!("no speed fit: {e}");
            None
        }
    };

    let mut csv = String::from("model,label,eigensolver,depth,median_s,relative_speed,energy_hartree\n");
    for (e, r) in report.entries.iter().zip(&report.relative) {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            e.model,
            e.label,
            e.eigensolver.as_str(),
            e.depth,
            e.median,
            r,
            e.energy
        ));
    }
    write(out, "speed.csv", &csv)?;
    write(out, "speed.dat", &speed_table(&report, fit.as_ref()))?;
    emit(&[
        ("command", &"bench"),
        ("models", &report.entries.len()),
        ("failed", &failures),
        ("reference", &report.reference),
        ("fit_a", &opt(fit.map(|f| f.a))),
        ("fit_b", &opt(fit.map(|f| f.b))),
        ("out", &out.display()),
    ]);
    if failures > 0 {
        return Err(Failure::pipeline(format!("{failures} model(s) failed")));
    }
    Ok(())
}

/// Matrix Market text with a provenance comment after the banner.
fn stamped_mtx(m: &SparseHermitian, stamp: &str) -> String {
    let text = write_mtx_string(m);
    let (banner, rest) = text.split_once('\n').unwrap_or((&text, ""));
    format!("{banner}\n% {stamp}\n{rest}")
}

pub fn gen(model: Model, out: &Path, qubits: usize, coupling: f64, field: f64, dim: usize, seed: u64) -> CmdResult {
    let bad = |e: SbdError| Failure::input(e.to_string());
    let text = match model {
        Model::Tfim => {
            let mut h = gen_tfim(qubits, coupling, field).map_err(bad)?;
            h.provenance = Some(serde_json::json!({
                "generator": "tfim",
                "qubits": qubits,
                "coupling": coupling,
                "field": field,
                "seed": seed,
            }));
            h.to_json_string()?
        }
        Model::Randherm => {
            if dim == 0 {
                return Err(Failure::input("--dim must be positive"));
            }
            let m = SparseHermitian::from_dense(&random_hermitian(dim, seed)).map_err(bad)?;
            stamped_mtx(&m, &format!("generator=randherm dim={dim} seed={seed}"))
        }
        Model::Commuting => {
            let m = gen_commuting_block(dim, seed).map_err(bad)?;
            stamped_mtx(&m, &format!("generator=commuting dim={dim} seed={seed}"))
        }
    };
    fs::write(out, text).map_err(|e| Failure::input(format!("writing {}: {e}", out.display())))?;
    emit(&[
        ("command", &"gen"),
        ("model", &format!("{model:?}").to_lowercase()),
        ("seed", &seed),
        ("out", &out.display()),
    ]);
    Ok(())
}

/// Square-root diagnostics for the first split's discriminant `S² − 4·det`.
pub fn sqrt_check(input: &Path, iterations: usize, s: &RunSettings) -> CmdResult {
    if iterations == 0 {
        return Err(Failure::input("--iterations must be positive"));
    }
    let prepared = load_prepared(input, s)?;
    let p = split_sparse(&prepared.matrix)?;
    let (det, used_det_prime) = match det_block(&p, &s.sbd.block) {
        Ok(d) => (d, false),
        Err(SbdError::Singular { .. }) => (det_prime(&p, &s.sbd.block), true),
        Err(e) => return Err(e.into()),
    };
    let sum = &p.a + &p.d;
    let disc = matmul(&sum, &sum) - det.scale(4.0);
    let plain = SqrtConfig {
        iterations,
        ..SqrtConfig::strict()
    };
    let newton = newton_sqrt(&disc, &plain)?;
    let checked = newton_sqrt(
        &disc,
        &SqrtConfig {
            iterations,
            ..s.sbd.sqrt
        },
    )?;
    emit(&[
        ("command", &"sqrt-check"),
        ("label", &prepared.label),
        ("dim", &disc.nrows()),
        ("iterations", &iterations),
        ("used_det_prime", &used_det_prime),
        ("newton_residual", &format!("{:e}", newton.residual)),
        ("residual", &format!("{:e}", checked.residual)),
        ("fallback", &checked.fallback),
        ("branch_cut", &checked.branch_cut),
    ]);
    Ok(())
}
