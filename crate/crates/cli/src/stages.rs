//! The pipeline stages. Each reads the artifacts of the previous stage, checked
//! against the content hashes recorded in that stage's report, and writes its
//! own artifacts plus `<stage>.report.json`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use lineporous::bumpcalc::SmoothField;
use lineporous::porous::{
    cantor_product, estimate_porosity, hierarchical_random, line_set, PointCloud2, PorositySettings, ScaleRange,
};
use lineporous::pshcert::{
    certify, min_sigma, modify_with, submean_crosscheck, CertSettings, ModifiedWeight, ModifySettings, SubmeanSettings,
};
use lineporous::suites::identity_suites;
use lineporous::weightgen::{build, verify_conditions, verify_lower_bound, DyadicWeight};
use lineporous::xray::radial_xray_zero;

use crate::config::{Generator, RunConfig};
use crate::error::{CliError, Stage};

/// Samples per piece of the post-modification radial-integral check.
const RADIAL_CHECK_ANGLES: usize = 256;
/// Grid side of the sampled `ω̃ ≤ ω` check.
const ORDER_CHECK_GRID: usize = 64;

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageReport {
    pub stage: String,
    pub pass: bool,
    /// Artifacts read, by content hash.
    pub inputs: BTreeMap<String, String>,
    /// Artifacts written, by content hash.
    pub outputs: BTreeMap<String, String>,
    pub summary: Value,
    pub error: Option<String>,
    /// The only field that varies between runs of the same config.
    pub elapsed_ms: u64,
}

impl StageReport {
    fn new(stage: &str) -> Self {
        StageReport {
            stage: stage.into(),
            pass: false,
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
            summary: Value::Null,
            error: None,
            elapsed_ms: 0,
        }
    }

    /// One line for the terminal.
    pub fn summary_line(&self) -> String {
        match &self.error {
            Some(e) => e.clone(),
            None => {
                let keys = ["points", "nu_line", "c_gr", "radial_spread", "sigma", "min_value"];
                keys.iter()
                    .filter_map(|k| self.summary.get(*k).map(|v| format!("{k}={v}")))
                    .collect::<Vec<_>>()
                    .join(" ")
            }
        }
    }

    pub fn file_name(stage: &str) -> String {
        format!("{stage}.report.json")
    }
}

/// The output directory.
pub struct Store {
    dir: PathBuf,
}

impl Store {
    pub fn new(dir: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir)?;
        Ok(Store { dir: dir.to_path_buf() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn write(&self, name: &str, bytes: &[u8]) -> Result<String, CliError> {
        let p = self.path(name);
        if let Some(d) = p.parent() {
            std::fs::create_dir_all(d)?;
        }
        std::fs::write(&p, bytes)?;
        Ok(sha256_hex(bytes))
    }

    pub fn write_json<T: Serialize>(&self, name: &str, v: &T) -> Result<String, CliError> {
        let mut s = serde_json::to_string_pretty(v)?;
        s.push('\n');
        self.write(name, s.as_bytes())
    }

    pub fn read(&self, name: &str) -> Result<Vec<u8>, CliError> {
        std::fs::read(self.path(name)).map_err(|e| CliError::Io(format!("{}: {e}", self.path(name).display())))
    }

    /// Reads an artifact and checks it against the hash its producer recorded.
    pub fn read_checked(&self, name: &str, recorded: &str) -> Result<Vec<u8>, CliError> {
        let bytes = self.read(name)?;
        let found = sha256_hex(&bytes);
        if found != recorded {
            return Err(CliError::Stale {
                file: name.into(),
                recorded: recorded.into(),
                found,
            });
        }
        Ok(bytes)
    }

    pub fn report(&self, stage: &str) -> Result<StageReport, CliError> {
        Ok(serde_json::from_slice(&self.read(&StageReport::file_name(stage))?)?)
    }

    /// Artifact `name` as produced by `stage`, which must have passed.
    fn upstream(&self, stage: &str, name: &str, rep: &mut StageReport) -> Result<Vec<u8>, CliError> {
        let up = self.report(stage)?;
        if !up.pass {
            return Err(CliError::Usage(format!("stage {stage} did not pass; rerun it first")));
        }
        let h = up
            .outputs
            .get(name)
            .ok_or_else(|| CliError::Io(format!("{stage} report does not list {name}")))?;
        let bytes = self.read_checked(name, h)?;
        rep.inputs.insert(name.into(), h.clone());
        Ok(bytes)
    }

    fn finish(&self, mut rep: StageReport, t: Instant, failure: Option<CliError>) -> Result<StageReport, CliError> {
        rep.elapsed_ms = t.elapsed().as_millis() as u64;
        rep.pass = failure.is_none();
        rep.error = failure.as_ref().map(|e| e.to_string());
        self.write_json(&StageReport::file_name(&rep.stage), &rep)?;
        match failure {
            None => Ok(rep),
            Some(e) => Err(e),
        }
    }
}

fn stage_err(stage: Stage, msg: impl Into<String>) -> CliError {
    CliError::Stage { stage, msg: msg.into() }
}

pub fn gen_set(cfg: &RunConfig, store: &Store) -> Result<StageReport, CliError> {
    let t = Instant::now();
    let mut rep = StageReport::new(Stage::GenSet.name());
    let s = &cfg.set;
    let side = cfg.side();
    let cloud = match s.generator {
        Generator::CantorProduct => cantor_product(s.ratio, cfg.depth(), side, s.fill),
        Generator::HierarchicalRandom => hierarchical_random(s.hole, cfg.seed, cfg.depth()).and_then(|y| y.scaled(side)),
        Generator::LineSet => line_set(s.angle, side, s.pitch),
        Generator::Empty => PointCloud2::empty(1.0, side * std::f64::consts::SQRT_2),
    };
    let cloud = match cloud {
        Ok(c) => c,
        Err(e) => return store.finish(rep, t, Some(CliError::stage(Stage::GenSet)(e))),
    };
    let csv = cloud.to_csv_string().map_err(CliError::stage(Stage::GenSet))?;
    rep.outputs.insert("set.csv".into(), store.write("set.csv", csv.as_bytes())?);

    // scales from well above the resolution up to the whole set; none for a
    // set too coarse to have any
    let rho0 = (8.0 * cloud.resolution()).min(side / 2.0).max(4.0 * cloud.resolution());
    let porosity = if cloud.len() >= 2 && rho0 < side {
        let est = ScaleRange::new(rho0, side)
            .and_then(|sc| estimate_porosity(&cloud, &sc, &PorositySettings::default()));
        match est {
            Ok(p) => Some(p),
            Err(e) => return store.finish(rep, t, Some(CliError::stage(Stage::GenSet)(e))),
        }
    } else {
        None
    };
    let nu_line = porosity.as_ref().map(|p| p.nu_line);
    let meta = json!({
        "generator": s,
        "depth": cfg.depth(),
        "side": side,
        "seed": cfg.seed,
        "points": cloud.len(),
        "resolution": cloud.resolution(),
        "bound": cloud.bound(),
        "csv_sha256": rep.outputs["set.csv"],
        "porosity": porosity,
        // a set that is not porous on lines measures ν_line ≈ 0
        "line_porous": nu_line.map(|v| v >= cfg.nu),
    });
    rep.outputs.insert("set.json".into(), store.write_json("set.json", &meta)?);
    rep.summary = json!({ "points": cloud.len(), "nu_line": nu_line, "line_porous": meta["line_porous"] });
    store.finish(rep, t, None)
}

pub fn build_weight(cfg: &RunConfig, store: &Store) -> Result<StageReport, CliError> {
    let t = Instant::now();
    let mut rep = StageReport::new(Stage::BuildWeight.name());
    let csv = store.upstream(Stage::GenSet.name(), "set.csv", &mut rep)?;
    let y = PointCloud2::from_csv_str(&String::from_utf8_lossy(&csv)).map_err(CliError::stage(Stage::BuildWeight))?;
    let w = match build(&y, cfg.h(), cfg.nu) {
        Ok(w) => w,
        Err(e) => return store.finish(rep, t, Some(CliError::stage(Stage::BuildWeight)(e))),
    };
    rep.outputs.insert("weight.json".into(), store.write_json("weight.json", &w)?);
    for p in &w.pieces {
        let name = format!("nets/k{:02}.csv", p.k);
        let body = p.net.to_csv_string().map_err(CliError::stage(Stage::BuildWeight))?;
        rep.outputs.insert(name.clone(), store.write(&name, body.as_bytes())?);
    }
    let table: Vec<Value> = w
        .pieces
        .iter()
        .map(|p| json!({ "k": p.k, "q_k": p.q_k, "q_theta": p.q_theta, "kn_norm": p.kn_norm, "r_k": p.r_k, "net_points": p.net.len() }))
        .collect();
    rep.summary = json!({
        "h": w.h,
        "exponents": w.exponents,
        "c_reg": w.c_reg,
        "c_gr": w.c_gr,
        "pieces": table,
    });

    let conditions = match verify_conditions(&w) {
        Ok(c) => c,
        Err(e) => return store.finish(rep, t, Some(CliError::stage(Stage::Conditions)(e))),
    };
    rep.summary["conditions"] = serde_json::to_value(&conditions)?;
    let lower = match verify_lower_bound(&w, &y) {
        Ok(l) => l,
        Err(e) => return store.finish(rep, t, Some(CliError::stage(Stage::LowerBound)(e))),
    };
    rep.summary["lower_bound"] = serde_json::to_value(&lower)?;
    store.finish(rep, t, None)
}

/// Largest standard deviation of `θ ↦ T(|x|^{-2} ω̃_k)(0, θ)` relative to `1 + q_k`.
fn radial_spread(m: &ModifiedWeight) -> Result<f64, CliError> {
    let mut worst = 0.0f64;
    for (f, &q) in m.pieces.iter().zip(&m.q) {
        if f.is_zero() {
            continue;
        }
        let quad = m.quadrature(f);
        let v = (0..RADIAL_CHECK_ANGLES)
            .map(|i| radial_xray_zero(f, std::f64::consts::PI * i as f64 / RADIAL_CHECK_ANGLES as f64, &quad))
            .collect::<Result<Vec<f64>, _>>()
            .map_err(CliError::stage(Stage::Modify))?;
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        let sd = (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / v.len() as f64).sqrt();
        worst = worst.max(sd / (1.0 + q));
    }
    Ok(worst)
}

/// Largest `ω̃ − ω` on a square grid over the support.
fn order_excess(m: &ModifiedWeight) -> f64 {
    let w: SmoothField = m.base.field();
    let big = m.base.pieces.last().map_or(1.0, |p| p.outer());
    let n = ORDER_CHECK_GRID;
    let at = |i: usize| -big + 2.0 * big * i as f64 / (n - 1) as f64;
    (0..n * n)
        .map(|idx| {
            let x = [at(idx % n), at(idx / n)];
            m.value(x) - w.value(x)
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn modify_weight(cfg: &RunConfig, store: &Store) -> Result<StageReport, CliError> {
    let t = Instant::now();
    let mut rep = StageReport::new(Stage::Modify.name());
    let bytes = store.upstream(Stage::BuildWeight.name(), "weight.json", &mut rep)?;
    let w: DyadicWeight = serde_json::from_slice(&bytes)?;
    let s = ModifySettings {
        nodes: cfg.certify.modify_nodes,
        ..Default::default()
    };
    let m = match modify_with(&w, &s) {
        Ok(m) => m,
        Err(e) => return store.finish(rep, t, Some(CliError::stage(Stage::Modify)(e))),
    };
    rep.outputs.insert("modified.json".into(), store.write_json("modified.json", &m)?);
    let spread = radial_spread(&m)?;
    let excess = order_excess(&m);
    rep.summary = json!({
        "q": m.q,
        "shifts": m.shifts,
        "profile_residuals": m.profile_residuals,
        "kn_ratios": m.kn_ratios,
        "c_reg": m.c_reg,
        "c_gr": m.c_gr,
        "radial_spread": spread,
        "order_excess": excess,
    });
    let failure = if !(spread <= 1e-6) {
        Some(stage_err(Stage::Modify, format!("radial integrals vary by {spread:e} relative to 1 + q_k")))
    } else if excess > 1e-12 {
        Some(stage_err(Stage::Modify, format!("modified weight exceeds the weight by {excess:e}")))
    } else {
        None
    };
    store.finish(rep, t, failure)
}

pub fn certify_stage(cfg: &RunConfig, store: &Store) -> Result<StageReport, CliError> {
    let t = Instant::now();
    let mut rep = StageReport::new(Stage::Certify.name());
    let bytes = store.upstream(Stage::Modify.name(), "modified.json", &mut rep)?;
    let weight_hash = rep.inputs["modified.json"].clone();
    let m: ModifiedWeight = serde_json::from_slice(&bytes)?;
    let c = &cfg.certify;
    let s = CertSettings {
        n_s: c.grid,
        n_theta: c.grid,
        tol: c.tol,
        ..Default::default()
    };
    let cert = match c.sigma {
        Some(sigma) => certify(&m, sigma, &s).map_err(CliError::stage(Stage::Certify)),
        None => min_sigma(&m, &s).map_err(CliError::stage(Stage::MinSigma)),
    };
    let cert = match cert {
        Ok(c) => c,
        Err(e) => return store.finish(rep, t, Some(e)),
    };
    rep.outputs.insert("sinogram.csv".into(), store.write("sinogram.csv", cert.grid.to_csv().as_bytes())?);
    let pi_sigma = std::f64::consts::PI * cert.sigma;
    let doc = json!({
        "sigma": cert.sigma,
        "sigma_override": c.sigma.is_some(),
        "min_value": cert.min_value,
        "tolerance": cert.tolerance,
        "pass": cert.pass,
        "argmin": cert.argmin,
        "grid_tolerance": cert.grid_tolerance,
        "refined": cert.refined,
        "grid": cert.grid.header_json(),
        "grid_csv": "sinogram.csv",
        "weight_sha256": weight_hash,
        "pi_sigma_covers_c_gr": pi_sigma >= m.c_gr - c.tol,
    });
    rep.outputs.insert("certificate.json".into(), store.write_json("certificate.json", &doc)?);
    rep.summary = json!({
        "sigma": cert.sigma,
        "min_value": cert.min_value,
        "pass": cert.pass,
        "c_gr": m.c_gr,
        "pi_sigma_covers_c_gr": doc["pi_sigma_covers_c_gr"],
    });
    if !cert.pass {
        let msg = format!("min T(Δω̃) + πσ = {:e} < −{:e} at σ = {}", cert.min_value, cert.tolerance, cert.sigma);
        return store.finish(rep, t, Some(stage_err(Stage::Certify, msg)));
    }

    let ss = SubmeanSettings {
        tol: c.submean_tol,
        seed: cfg.seed,
        ..Default::default()
    };
    let sub = submean_crosscheck(&m, cert.sigma, c.submean_samples, &ss, Some(&cert));
    rep.summary["submean"] = serde_json::to_value(&sub)?;
    let failure = (sub.violations > 0).then(|| {
        stage_err(
            Stage::Submean,
            format!("{} of {} sub-mean checks violated, worst excess {:e}", sub.violations, sub.samples, sub.worst_excess),
        )
    });
    store.finish(rep, t, failure)
}

pub fn verify_identities(cfg: &RunConfig, store: &Store) -> Result<StageReport, CliError> {
    let t = Instant::now();
    let mut rep = StageReport::new(Stage::Identities.name());
    let suites = identity_suites(cfg.seed).map_err(CliError::stage(Stage::Identities))?;
    rep.outputs.insert("identities.json".into(), store.write_json("identities.json", &suites)?);
    rep.summary = serde_json::to_value(&suites)?;
    let failed: Vec<&str> = suites.iter().filter(|s| !s.pass()).map(|s| s.name.as_str()).collect();
    let failure = (!failed.is_empty()).then(|| stage_err(Stage::Identities, format!("failed suites: {}", failed.join(", "))));
    store.finish(rep, t, failure)
}

/// Stages in pipeline order, with the artifact each one consumes.
pub const CHAIN: [(&str, Option<(&str, &str)>); 4] = [
    ("gen-set", None),
    ("build-weight", Some(("gen-set", "set.csv"))),
    ("modify-weight", Some(("build-weight", "weight.json"))),
    ("certify", Some(("modify-weight", "modified.json"))),
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: RunConfig,
    pub stages: Vec<StageReport>,
    pub pass: bool,
}

/// Collects the stage reports present in the store, checking every recorded
/// artifact hash against the files on disk and every stage input against the
/// output of its producer.
pub fn collect(cfg: &RunConfig, store: &Store) -> Result<RunReport, CliError> {
    let mut stages: Vec<StageReport> = Vec::new();
    let names = CHAIN.iter().map(|c| c.0).chain(std::iter::once(Stage::Identities.name()));
    for name in names {
        if !store.path(&StageReport::file_name(name)).exists() {
            continue;
        }
        let r = store.report(name)?;
        for (file, h) in &r.outputs {
            store.read_checked(file, h)?;
        }
        if let Some((_, Some((up, file)))) = CHAIN.iter().find(|c| c.0 == name) {
            let produced = stages.iter().find(|s| s.stage == *up).and_then(|s| s.outputs.get(*file));
            if let (Some(p), Some(used)) = (produced, r.inputs.get(*file)) {
                if p != used {
                    return Err(CliError::Stale {
                        file: (*file).into(),
                        recorded: used.clone(),
                        found: p.clone(),
                    });
                }
            }
        }
        stages.push(r);
    }
    if stages.is_empty() {
        return Err(CliError::Usage(format!("no stage reports in {}", cfg.out.display())));
    }
    let pass = stages.iter().all(|s| s.pass);
    Ok(RunReport {
        config: cfg.clone(),
        stages,
        pass,
    })
}
