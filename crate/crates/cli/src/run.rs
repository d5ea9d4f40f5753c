//! The three runnable requests. Each can be built from command-line flags or
//! from a manifest, and renders its output as a string so replays can be
//! compared byte for byte.

use std::fs;
use std::path::PathBuf;

use serde::Serialize;

use randmt::sim::{Procedure, SweepConfig};
use randmt::{
    bh, by, ebh, hommel_p, j_ebh, merge_p, merge_p_randomized, pe_ebh, r1_ebh, r2_ebh, rboth_ebh, u_by, u_ebh,
    u_hommel_p, Alpha, Discoveries, EValues, PMergingDual, PValues, UniformSource,
};

use crate::input::{read_values, ValueFile};
use crate::output::{fmt_f64, to_json, Num, RunManifest};

/// Where the uniform draws come from.
#[derive(Debug, Clone, PartialEq)]
pub enum Draws {
    Seed(u64),
    Explicit(Vec<f64>),
    None,
}

impl Draws {
    pub fn from_flags(seed: Option<u64>, u: Option<Vec<f64>>) -> Draws {
        match (seed, u) {
            (_, Some(u)) => Draws::Explicit(u),
            (Some(s), None) => Draws::Seed(s),
            (None, None) => Draws::None,
        }
    }

    /// Resolves `n` draws. Seeded draws come from the root stream of `seed`.
    fn resolve(&self, n: usize, what: &str) -> Result<(Vec<f64>, &'static str, Option<u64>), String> {
        match self {
            _ if n == 0 => match self {
                Draws::Explicit(u) if !u.is_empty() => Err(format!("{what} takes no uniform draws")),
                _ => Ok((Vec::new(), "none", None)),
            },
            Draws::Seed(s) => Ok((UniformSource::new(*s).uniforms(n), "seed", Some(*s))),
            Draws::Explicit(u) if u.len() == n => Ok((u.clone(), "explicit", None)),
            Draws::Explicit(u) => Err(format!("{what} needs {n} uniform draws, got {}", u.len())),
            Draws::None => Err(format!("{what} is randomized: pass --seed or --u")),
        }
    }
}

fn alpha(v: f64) -> Result<Alpha, String> {
    Alpha::new(v).map_err(|e| e.to_string())
}

fn lib<T>(r: randmt::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

/// Number of uniform draws a procedure consumes on `k` hypotheses.
pub fn draws_needed(p: Procedure, k: usize) -> usize {
    match p {
        Procedure::R1Ebh | Procedure::R2Ebh | Procedure::JEbh => k,
        Procedure::RbothEbh => 2 * k,
        Procedure::UEbh | Procedure::UBy => 1,
        Procedure::Ebh | Procedure::PeEbh | Procedure::Bh | Procedure::By => 0,
    }
}

pub struct ApplyRequest {
    pub procedure: String,
    pub input: PathBuf,
    pub pvals: Option<PathBuf>,
    pub alpha: f64,
    pub draws: Draws,
    pub one_based: bool,
}

#[derive(Serialize)]
struct ApplyOutput<'a> {
    procedure: &'a str,
    alpha: f64,
    k: usize,
    index_base: usize,
    rejected: Vec<usize>,
    k_star: usize,
    threshold: Num,
    /// Whether `threshold` is on the e-value or the p-value scale.
    threshold_scale: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha_hat_star: Option<f64>,
    u_source: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    u: &'a [f64],
    input_sha256: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pvals_sha256: Option<&'a str>,
}

impl ApplyRequest {
    pub fn run(&self) -> Result<(String, RunManifest), String> {
        let proc_: Procedure = self.procedure.parse().map_err(|e: randmt::Error| e.to_string())?;
        let a = alpha(self.alpha)?;
        let file = read_values(&self.input)?;
        let k = file.values.len();
        let side: Option<ValueFile> = match (&self.pvals, proc_) {
            (Some(p), Procedure::PeEbh) => Some(read_values(p)?),
            (None, Procedure::PeEbh) => return Err("pe-ebh needs --pvals".into()),
            (Some(_), _) => return Err(format!("{proc_} does not take --pvals")),
            (None, _) => None,
        };
        let (u, u_source, seed) = self.draws.resolve(draws_needed(proc_, k), proc_.name())?;

        let (disc, alpha_hat_star): (Discoveries, Option<f64>) = if proc_.takes_pvalues() {
            let p = lib(PValues::new(file.values.clone()))?;
            match proc_ {
                Procedure::Bh => (bh(&p, a), None),
                Procedure::By => (by(&p, a).discoveries, None),
                _ => (lib(u_by(&p, a, u[0]))?.discoveries, None),
            }
        } else {
            let x = lib(EValues::new(file.values.clone()))?;
            let res = match proc_ {
                Procedure::Ebh => ebh(&x, a),
                Procedure::R1Ebh => lib(r1_ebh(&x, a, &u))?,
                Procedure::R2Ebh => lib(r2_ebh(&x, a, &u))?,
                Procedure::RbothEbh => lib(rboth_ebh(&x, a, &u[..k], &u[k..]))?,
                Procedure::UEbh => lib(u_ebh(&x, a, u[0]))?,
                Procedure::JEbh => lib(j_ebh(&x, a, &u))?,
                Procedure::PeEbh => {
                    let p = lib(PValues::new(side.as_ref().expect("checked above").values.clone()))?;
                    lib(pe_ebh(&x, &p, a))?
                }
                _ => unreachable!("p-value procedures handled above"),
            };
            (res.discoveries, Some(res.alpha_hat_star))
        };

        let base = usize::from(self.one_based);
        let pvals_sha256 = side.map(|s| s.sha256);
        let out = ApplyOutput {
            procedure: proc_.name(),
            alpha: self.alpha,
            k,
            index_base: base,
            rejected: disc.rejected.iter().map(|i| i + base).collect(),
            k_star: disc.k_star,
            threshold: Num(disc.threshold),
            threshold_scale: if proc_.takes_pvalues() { "p-value" } else { "e-value" },
            alpha_hat_star,
            u_source,
            seed,
            u: &u,
            input_sha256: &file.sha256,
            pvals_sha256: pvals_sha256.as_deref(),
        };
        let manifest = RunManifest {
            command: "apply".into(),
            procedure: proc_.name().into(),
            input: self.input.clone(),
            input_sha256: file.sha256.clone(),
            pvals: self.pvals.clone(),
            pvals_sha256: pvals_sha256.clone(),
            alpha: Some(self.alpha),
            u_source: u_source.into(),
            seed,
            u: u.clone(),
            one_based: self.one_based,
            full_scale: false,
            outputs: Vec::new(),
        };
        Ok((to_json(&out), manifest))
    }
}

pub const MERGE_METHODS: [&str; 4] = ["hommel", "u-hommel", "grid-harmonic", "u-grid-harmonic"];

pub struct MergeRequest {
    pub method: String,
    pub input: PathBuf,
    pub draws: Draws,
}

#[derive(Serialize)]
struct MergeOutput<'a> {
    method: &'a str,
    k: usize,
    value: f64,
    randomized: bool,
    u_source: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    u: &'a [f64],
    input_sha256: &'a str,
}

impl MergeRequest {
    pub fn run(&self) -> Result<(String, RunManifest), String> {
        let method = self.method.as_str();
        if !MERGE_METHODS.contains(&method) {
            return Err(format!("unknown merge method '{method}' (expected one of {})", MERGE_METHODS.join(", ")));
        }
        let file = read_values(&self.input)?;
        let p = lib(PValues::new(file.values.clone()))?;
        let randomized = method.starts_with("u-");
        let (u, u_source, seed) = self.draws.resolve(usize::from(randomized), method)?;
        let merged = match method {
            "hommel" => hommel_p(&p),
            "u-hommel" => lib(u_hommel_p(&p, u[0]))?,
            _ => {
                let dual = lib(PMergingDual::grid_harmonic(p.len()))?;
                if randomized {
                    lib(merge_p_randomized(&dual, &p, u[0]))?
                } else {
                    lib(merge_p(&dual, &p))?
                }
            }
        };
        let out = MergeOutput {
            method,
            k: p.len(),
            value: merged.value,
            randomized,
            u_source,
            seed,
            u: &u,
            input_sha256: &file.sha256,
        };
        let manifest = RunManifest {
            command: "merge".into(),
            procedure: method.into(),
            input: self.input.clone(),
            input_sha256: file.sha256.clone(),
            pvals: None,
            pvals_sha256: None,
            alpha: None,
            u_source: u_source.into(),
            seed,
            u: u.clone(),
            one_based: false,
            full_scale: false,
            outputs: Vec::new(),
        };
        Ok((to_json(&out), manifest))
    }
}

pub struct SimulateRequest {
    pub config: PathBuf,
    pub full_scale: bool,
}

pub const CSV_HEADER: &str = "procedure,mu,rho,power,power_se,fdr,fdr_se";

impl SimulateRequest {
    /// Reads and validates the sweep config. `full_scale` switches to
    /// K = 100 and 500 trials.
    pub fn load(&self) -> Result<(SweepConfig, String), String> {
        let bytes = fs::read(&self.config).map_err(|e| format!("{}: {e}", self.config.display()))?;
        let sha = {
            use sha2::{Digest, Sha256};
            format!("{:x}", Sha256::digest(&bytes))
        };
        let text = String::from_utf8(bytes).map_err(|_| format!("{}: not valid UTF-8", self.config.display()))?;
        let mut cfg: SweepConfig = toml::from_str(&text).map_err(|e| format!("{}: {e}", self.config.display()))?;
        if self.full_scale {
            cfg.k = 100;
            cfg.trials = 500;
        }
        for &mu in &cfg.mu {
            lib(cfg.point(mu, cfg.rho.first().copied().unwrap_or(0.0)).validate())?;
        }
        for &rho in &cfg.rho {
            lib(cfg.point(cfg.mu.first().copied().unwrap_or(0.0), rho).validate())?;
        }
        Ok((cfg, sha))
    }

    pub fn run(&self) -> Result<(String, RunManifest), String> {
        let (cfg, sha) = self.load()?;
        let rows = lib(cfg.run())?;
        let mut csv = String::from(CSV_HEADER);
        csv.push('\n');
        for r in rows {
            let e = r.estimate;
            let fields = [r.mu, r.rho, e.power, e.power_se, e.fdr, e.fdr_se].map(fmt_f64);
            csv.push_str(&format!("{},{}\n", r.procedure, fields.join(",")));
        }
        let manifest = RunManifest {
            command: "simulate".into(),
            procedure: "sweep".into(),
            input: self.config.clone(),
            input_sha256: sha,
            pvals: None,
            pvals_sha256: None,
            alpha: Some(cfg.alpha.get()),
            u_source: "seed".into(),
            seed: Some(cfg.seed),
            u: Vec::new(),
            one_based: false,
            full_scale: self.full_scale,
            outputs: Vec::new(),
        };
        Ok((csv, manifest))
    }
}

/// Rebuilds the request a manifest describes.
pub fn replay(m: &RunManifest) -> Result<(String, RunManifest), String> {
    let draws = match m.u_source.as_str() {
        "seed" => Draws::Seed(m.seed.ok_or("manifest has u_source = seed but no seed")?),
        "explicit" => Draws::Explicit(m.u.clone()),
        "none" => Draws::None,
        other => return Err(format!("unknown u_source '{other}'")),
    };
    let (text, fresh) = match m.command.as_str() {
        "apply" => ApplyRequest {
            procedure: m.procedure.clone(),
            input: m.input.clone(),
            pvals: m.pvals.clone(),
            alpha: m.alpha.ok_or("apply manifest has no alpha")?,
            draws,
            one_based: m.one_based,
        }
        .run()?,
        "merge" => MergeRequest { method: m.procedure.clone(), input: m.input.clone(), draws }.run()?,
        "simulate" => SimulateRequest { config: m.input.clone(), full_scale: m.full_scale }.run()?,
        other => return Err(format!("unknown command '{other}'")),
    };
    if fresh.input_sha256 != m.input_sha256 || fresh.pvals_sha256 != m.pvals_sha256 {
        return Err("input file contents changed since the manifest was written".into());
    }
    Ok((text, fresh))
}
