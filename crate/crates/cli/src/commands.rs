use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::anyhow;
use clap::{Args, Subcommand};
use num_traits::ToPrimitive;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use symquot::ensembles::{
    Coercive, CoerciveForm, CoerciveSpace, Constraint, Construction, Exponent, LandscapeRecipe, Univariate,
};
use symquot::experiments::{calibrate as run_calibration, run_profile};
use symquot::quotient::{
    capacity_ratio, capacity_ratio_exact, count_involutions, estimate_real_root_probability, real_image_fraction,
    Partition, RarityKind, RarityReport,
};
use symquot::search::SearchOptions;
use symquot::shape::{isotropy, load_configurations, lj_energy, unbounded_dive, Alignment, IsotropyOptions};
use symquot::symmetry::moving_average_density;
use symquot::RngStream;

use crate::output::{csv_bytes, json_bytes, Artifacts, SCHEMA_VERSION};
use crate::{Failure, Global, Preset};

fn config_err(msg: impl std::fmt::Display) -> Failure {
    Failure::config(anyhow!("{msg}"))
}

/// Parses a snake_case enum value through its serde representation.
fn serde_value<T: DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|e| e.to_string())
}

fn load_config<T: DeserializeOwned + Default>(g: &Global) -> Result<T, Failure> {
    let Some(path) = &g.config else {
        return Ok(T::default());
    };
    let text = std::fs::read_to_string(path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
    if let Some(v) = value.get("schema_version") {
        if v.as_u64() != Some(u64::from(SCHEMA_VERSION)) {
            return Err(config_err(format!(
                "{}: unsupported schema_version {v} (expected {SCHEMA_VERSION})",
                path.display()
            )));
        }
    }
    serde_json::from_value(value).map_err(|e| config_err(format!("{}: {e}", path.display())))
}

/// Flag, then config file, then `$SYMQUOT_SEED`, then 0.
fn resolve_seed(g: &Global, from_config: Option<u64>) -> Result<u64, Failure> {
    if let Some(s) = g.seed.or(from_config) {
        return Ok(s);
    }
    match std::env::var("SYMQUOT_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| config_err(format!("SYMQUOT_SEED is not an unsigned integer: `{v}`"))),
        Err(_) => Ok(0),
    }
}

fn scaled(g: &Global, full: usize) -> usize {
    match g.preset {
        Some(Preset::Desk) => (full / 5).max(1),
        None => full,
    }
}

fn print(bytes: &[u8]) {
    print!("{}", String::from_utf8_lossy(bytes));
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>, String> {
    s.split(',')
        .map(|t| t.trim().parse().map_err(|_| format!("bad list entry `{t}`")))
        .collect()
}

#[derive(Clone, Debug)]
pub struct Degrees(Vec<usize>);

/// `a-b` or a comma list.
fn parse_degrees(s: &str) -> Result<Degrees, String> {
    if let Some((a, b)) = s.split_once('-') {
        let (a, b): (usize, usize) = (
            a.trim().parse().map_err(|_| format!("bad range start `{a}`"))?,
            b.trim().parse().map_err(|_| format!("bad range end `{b}`"))?,
        );
        if a > b {
            return Err(format!("empty degree range {s}"));
        }
        return Ok(Degrees((a..=b).collect()));
    }
    parse_list(s).map(Degrees)
}

// ---------------------------------------------------------------- profile

#[derive(Args, Debug)]
pub struct ProfileArgs {
    /// reynolds | quotient
    #[arg(long, value_parser = serde_value::<Construction>)]
    construction: Option<Construction>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    degree: Option<u32>,
    /// Coordinates per particle.
    #[arg(long)]
    dim: Option<usize>,
    /// none | auto | <c> (coefficient with the automatic exponent)
    #[arg(long)]
    coercive: Option<String>,
    /// config | quotient
    #[arg(long, value_parser = serde_value::<CoerciveSpace>)]
    coercive_space: Option<CoerciveSpace>,
    /// Even exponent 2k; automatic when omitted.
    #[arg(long)]
    coercive_exponent: Option<u32>,
    /// norm | power_sum
    #[arg(long, value_parser = serde_value::<CoerciveForm>)]
    coercive_form: Option<CoerciveForm>,
    /// none | x_sphere | es_sphere
    #[arg(long, value_parser = serde_value::<Constraint>)]
    constraint: Option<Constraint>,
    #[arg(long)]
    homogeneous: bool,
    /// Landscapes in the ensemble.
    #[arg(long)]
    count: Option<usize>,
    /// Newton starts per landscape.
    #[arg(long)]
    starts: Option<usize>,
    /// Polish accepted points to a gradient norm of 1e-10.
    #[arg(long)]
    polish: bool,
    #[arg(long)]
    eps_accept: Option<f64>,
    #[arg(long)]
    dedup_delta: Option<f64>,
    #[arg(long)]
    init_box: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct ProfileConfig {
    schema_version: u32,
    construction: Construction,
    n: usize,
    degree: u32,
    dim: usize,
    coercive: Option<Coercive>,
    constraint: Constraint,
    homogeneous: bool,
    count: Option<usize>,
    starts: Option<usize>,
    seed: Option<u64>,
    polish: bool,
    eps_accept: f64,
    dedup_delta: f64,
    init_box: f64,
}

impl Default for ProfileConfig {
    fn default() -> Self {
        let o = SearchOptions::unpolished();
        Self {
            schema_version: SCHEMA_VERSION,
            construction: Construction::Reynolds,
            n: 3,
            degree: 3,
            dim: 1,
            coercive: None,
            constraint: Constraint::None,
            homogeneous: false,
            count: None,
            starts: None,
            seed: None,
            polish: false,
            eps_accept: o.eps_accept,
            dedup_delta: o.dedup_delta,
            init_box: o.init_box,
        }
    }
}

fn coercive_from_flags(a: &ProfileArgs, current: Option<Coercive>) -> Result<Option<Coercive>, Failure> {
    let mut c = match a.coercive.as_deref() {
        None => current,
        Some("none") => None,
        Some("auto") => Some(Coercive::auto(CoerciveSpace::Config)),
        Some(v) => {
            let c: f64 = v
                .parse()
                .map_err(|_| config_err(format!("--coercive expects none, auto or a number, got `{v}`")))?;
            Some(Coercive {
                c,
                ..Coercive::auto(CoerciveSpace::Config)
            })
        }
    };
    if let Some(c) = c.as_mut() {
        if let Some(s) = a.coercive_space {
            c.space = s;
        }
        if let Some(e) = a.coercive_exponent {
            c.exponent = Exponent::Fixed(e);
        }
        if let Some(f) = a.coercive_form {
            c.form = f;
        }
    } else if a.coercive_space.is_some() || a.coercive_exponent.is_some() || a.coercive_form.is_some() {
        return Err(config_err("coercive options given without a coercive term"));
    }
    Ok(c)
}

#[derive(Serialize)]
struct PointRow {
    landscape: usize,
    rank: usize,
    t: f64,
    energy: f64,
    distinct_values: usize,
    stabilizer_order: u128,
    morse_index: usize,
    grad_norm: f64,
    polished: bool,
    boundary: bool,
}

#[derive(Serialize)]
struct CurveRow {
    t: f64,
    mean_d: f64,
}

#[derive(Serialize)]
struct ProfileSummaryOut {
    schema_version: u32,
    avg: f64,
    t0: f64,
    t05: f64,
    t1: f64,
    distribution: BTreeMap<usize, f64>,
    landscapes: usize,
    /// Landscapes without any converged start, left out of the profile.
    excluded: usize,
    points: usize,
    raw_hits: usize,
    failed_starts: usize,
}

pub fn profile(g: &Global, a: ProfileArgs) -> Result<(), Failure> {
    let mut cfg: ProfileConfig = load_config(g)?;
    if let Some(v) = a.construction {
        cfg.construction = v;
    }
    if let Some(v) = a.n {
        cfg.n = v;
    }
    if let Some(v) = a.degree {
        cfg.degree = v;
    }
    if let Some(v) = a.dim {
        cfg.dim = v;
    }
    cfg.coercive = coercive_from_flags(&a, cfg.coercive)?;
    if let Some(v) = a.constraint {
        cfg.constraint = v;
    }
    cfg.homogeneous |= a.homogeneous;
    cfg.polish |= a.polish;
    cfg.count = Some(a.count.or(cfg.count).unwrap_or_else(|| scaled(g, 1000)));
    cfg.starts = Some(a.starts.or(cfg.starts).unwrap_or_else(|| scaled(g, 1000)));
    if let Some(v) = a.eps_accept {
        cfg.eps_accept = v;
    }
    if let Some(v) = a.dedup_delta {
        cfg.dedup_delta = v;
    }
    if let Some(v) = a.init_box {
        cfg.init_box = v;
    }
    cfg.seed = Some(resolve_seed(g, cfg.seed)?);
    let (count, starts, seed) = (cfg.count.unwrap_or(1), cfg.starts.unwrap_or(1), cfg.seed.unwrap_or(0));

    let mut recipe = LandscapeRecipe::new(cfg.construction, cfg.n, cfg.degree)
        .with_dim(cfg.dim)
        .with_constraint(cfg.constraint)
        .with_seed(seed);
    recipe.homogeneous = cfg.homogeneous;
    if let Some(c) = cfg.coercive {
        recipe = recipe.with_coercive(c);
    }
    let opts = SearchOptions {
        eps_accept: cfg.eps_accept,
        dedup_delta: cfg.dedup_delta,
        init_box: cfg.init_box,
        ..if cfg.polish {
            SearchOptions::default()
        } else {
            SearchOptions::unpolished()
        }
    };
    let run = run_profile(&recipe, count, starts, &opts)?;
    let p = &run.profile;
    let mut points = Vec::new();
    for (j, s) in run.surveys.iter().enumerate() {
        for (rank, rp) in s.points.iter().enumerate() {
            points.push(PointRow {
                landscape: j,
                rank,
                t: rp.t,
                energy: rp.point.energy,
                distinct_values: rp.point.distinct_values,
                stabilizer_order: rp.point.stabilizer_order,
                morse_index: rp.point.morse_index,
                grad_norm: rp.point.grad_norm,
                polished: rp.point.polished,
                boundary: rp.point.boundary_flag,
            });
        }
    }
    let curve: Vec<CurveRow> = p
        .grid
        .iter()
        .zip(&p.mean_d)
        .map(|(&t, &mean_d)| CurveRow { t, mean_d })
        .collect();
    let summary = ProfileSummaryOut {
        schema_version: SCHEMA_VERSION,
        avg: p.summary.avg,
        t0: p.summary.t0,
        t05: p.summary.t05,
        t1: p.summary.t1,
        distribution: p.distribution.clone(),
        landscapes: count,
        excluded: count - p.ensemble_size,
        points: points.len(),
        raw_hits: run.surveys.iter().map(|s| s.raw_hits).sum(),
        failed_starts: run.surveys.iter().map(|s| s.failed_starts).sum(),
    };
    let mut art = Artifacts::new(g.out.as_deref());
    art.add("summary.json", json_bytes(&summary)?);
    art.add("profile.csv", csv_bytes(&curve)?);
    art.add("points.csv", csv_bytes(&points)?);
    print(art.get("summary.json").expect("just added"));
    art.finish("profile", &cfg)
}

// ----------------------------------------------------------------- rarity

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RarityCommand {
    /// 1/#Inv(S_n).
    Sn {
        #[arg(long)]
        n: usize,
    },
    /// Shape-space fraction 1/(2^min(d,n) #Inv(S_n)).
    Shape {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
    },
    /// Fraction of the stratum of a partition, e.g. 2,1,1.
    Stratum {
        #[arg(long, value_delimiter = ',', required = true)]
        partition: Vec<usize>,
    },
    /// Number of involutions of S_n (identity included).
    Involutions {
        #[arg(long)]
        n: usize,
    },
    /// Predicted symmetric share n(n-1) / (2 (d-1)^(k/2)).
    Capacity {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        d: u64,
    },
}

#[derive(Serialize)]
struct RarityRow {
    kind: &'static str,
    n: Option<u64>,
    d: Option<u64>,
    k: Option<u32>,
    partition: Option<String>,
    num: Option<String>,
    den: Option<String>,
    value: f64,
    log10: f64,
}

impl RarityRow {
    fn new(kind: &'static str, value: f64) -> Self {
        Self {
            kind,
            n: None,
            d: None,
            k: None,
            partition: None,
            num: None,
            den: None,
            value,
            log10: value.log10(),
        }
    }

    fn from_report(kind: &'static str, r: &RarityReport) -> Self {
        let (num, den) = r.as_ratio().map(|(a, b)| (a.to_string(), b.to_string())).unzip();
        Self {
            num,
            den,
            log10: r.log10,
            ..Self::new(kind, r.approx)
        }
    }
}

pub fn rarity(g: &Global, c: RarityCommand) -> Result<(), Failure> {
    let row = match &c {
        RarityCommand::Sn { n } => RarityRow {
            n: Some(*n as u64),
            ..RarityRow::from_report("sn", &real_image_fraction(&RarityKind::Sn { n: *n })?)
        },
        RarityCommand::Shape { n, d } => RarityRow {
            n: Some(*n as u64),
            d: Some(*d as u64),
            ..RarityRow::from_report("shape", &real_image_fraction(&RarityKind::Shape { n: *n, d: *d })?)
        },
        RarityCommand::Stratum { partition } => {
            let p = Partition::new(partition.clone())?;
            let label = p.parts().iter().map(ToString::to_string).collect::<Vec<_>>().join(",");
            RarityRow {
                n: Some(p.n() as u64),
                partition: Some(label),
                ..RarityRow::from_report("stratum", &real_image_fraction(&RarityKind::Stratum { partition: p })?)
            }
        }
        RarityCommand::Involutions { n } => {
            let count = count_involutions(*n);
            let value = count.to_f64().unwrap_or(f64::INFINITY);
            RarityRow {
                n: Some(*n as u64),
                num: Some(count.to_string()),
                den: Some("1".into()),
                log10: if value.is_finite() {
                    value.log10()
                } else {
                    (count.to_string().len() - 1) as f64
                },
                ..RarityRow::new("involutions", value)
            }
        }
        RarityCommand::Capacity { n, k, d } => {
            let exact = capacity_ratio_exact(*n, *k, *d)?;
            let (num, den) = exact.map(|r| (r.numer().to_string(), r.denom().to_string())).unzip();
            RarityRow {
                n: Some(*n),
                d: Some(*d),
                k: Some(*k),
                num,
                den,
                ..RarityRow::new("capacity", capacity_ratio(*n, *k, *d)?)
            }
        }
    };
    let mut art = Artifacts::new(g.out.as_deref());
    art.add("rarity.csv", csv_bytes(&[row])?);
    print(art.get("rarity.csv").expect("just added"));
    art.finish("rarity", &c)
}

// -------------------------------------------------------------- realroots

#[derive(Args, Debug)]
pub struct RealRootsArgs {
    /// Degree range `a-b` or list `a,b,c`.
    #[arg(long, value_parser = parse_degrees)]
    degrees: Option<Degrees>,
    /// kac | monic_gaussian | both
    #[arg(long)]
    ensemble: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RealRootsConfig {
    schema_version: u32,
    degrees: Vec<usize>,
    ensembles: Vec<Univariate>,
    trials: Option<usize>,
    seed: Option<u64>,
}

impl Default for RealRootsConfig {
    fn default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            degrees: (1..=8).collect(),
            ensembles: vec![Univariate::Kac, Univariate::MonicGaussian],
            trials: None,
            seed: None,
        }
    }
}

#[derive(Serialize)]
struct RealRootsRow {
    degree: usize,
    ensemble: &'static str,
    p_hat: f64,
    stderr: f64,
    log_p_over_n2: f64,
    trials: usize,
    resampled: usize,
}

pub fn realroots(g: &Global, a: RealRootsArgs) -> Result<(), Failure> {
    let mut cfg: RealRootsConfig = load_config(g)?;
    if let Some(d) = a.degrees {
        cfg.degrees = d.0;
    }
    match a.ensemble.as_deref() {
        None => {}
        Some("both") => cfg.ensembles = vec![Univariate::Kac, Univariate::MonicGaussian],
        Some(e) => cfg.ensembles = vec![serde_value(e).map_err(config_err)?],
    }
    cfg.trials = Some(a.trials.or(cfg.trials).unwrap_or_else(|| scaled(g, 100_000)));
    cfg.seed = Some(resolve_seed(g, cfg.seed)?);
    let (trials, seed) = (cfg.trials.unwrap_or(0), cfg.seed.unwrap_or(0));
    let mut rows = Vec::new();
    for &degree in &cfg.degrees {
        for &ens in &cfg.ensembles {
            let (name, id) = match ens {
                Univariate::Kac => ("kac", 0),
                Univariate::MonicGaussian => ("monic_gaussian", 1),
            };
            let stream = RngStream::new(seed, id).split(degree as u64);
            let est = estimate_real_root_probability(ens, degree, trials, &stream)?;
            rows.push(RealRootsRow {
                degree,
                ensemble: name,
                p_hat: est.p_hat,
                stderr: est.stderr,
                log_p_over_n2: est.p_hat.ln() / (degree * degree) as f64,
                trials: est.trials,
                resampled: est.resampled,
            });
        }
    }
    let mut art = Artifacts::new(g.out.as_deref());
    art.add("realroots.csv", csv_bytes(&rows)?);
    print(art.get("realroots.csv").expect("just added"));
    art.finish("realroots", &cfg)
}

// --------------------------------------------------------------------- lj

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LjCommand {
    /// Energy-sorted isotropy of the configurations in an xyz file, with
    /// the moving-average density of symmetric ones.
    Analyze {
        file: PathBuf,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, default_value_t = 500)]
        window: usize,
        /// orthogonal | proper
        #[arg(long, value_parser = serde_value::<Alignment>, default_value = "orthogonal")]
        alignment: Alignment,
    },
    /// Energies along the complex collision-free dive.
    Dive {
        #[arg(long, value_delimiter = ',', default_value = "1,0.5,0.2,0.1,0.05")]
        rho: Vec<f64>,
    },
}

#[derive(Serialize)]
struct AnalyzeRow {
    rank: usize,
    energy: f64,
    edge_order: usize,
    flag: bool,
    vertex_order: u128,
    rank_deficient: bool,
    density: f64,
    block: usize,
}

#[derive(Serialize)]
struct AnalyzeSummary {
    schema_version: u32,
    configurations: usize,
    symmetric: usize,
    baseline: f64,
    window: usize,
}

#[derive(Serialize)]
struct DiveRow {
    rho: f64,
    energy_re: f64,
    energy_im: f64,
    leading: f64,
    ratio: f64,
}

pub fn lj(g: &Global, c: LjCommand) -> Result<(), Failure> {
    let mut art = Artifacts::new(g.out.as_deref());
    match &c {
        LjCommand::Analyze {
            file,
            tol,
            window,
            alignment,
        } => {
            let recs = load_configurations(file)?;
            let opts = IsotropyOptions {
                tol: *tol,
                alignment: *alignment,
                ..Default::default()
            };
            let mut rows = Vec::with_capacity(recs.len());
            for (block, r) in recs.iter().enumerate() {
                let energy = match r.energy {
                    Some(e) => e,
                    None => lj_energy(&r.config)?,
                };
                let iso = isotropy(&r.config, &opts)?;
                rows.push(AnalyzeRow {
                    rank: 0,
                    energy,
                    edge_order: iso.edge_order,
                    flag: iso.edge_order > 1,
                    vertex_order: iso.vertex_order,
                    rank_deficient: iso.rank_deficient,
                    density: 0.0,
                    block,
                });
            }
            rows.sort_by(|a, b| a.energy.total_cmp(&b.energy).then(a.block.cmp(&b.block)));
            let flags: Vec<bool> = rows.iter().map(|r| r.flag).collect();
            let curve = moving_average_density(&flags, *window)?;
            for (i, (r, d)) in rows.iter_mut().zip(&curve.values).enumerate() {
                r.rank = i;
                r.density = *d;
            }
            let summary = AnalyzeSummary {
                schema_version: SCHEMA_VERSION,
                configurations: rows.len(),
                symmetric: flags.iter().filter(|&&f| f).count(),
                baseline: curve.baseline,
                window: *window,
            };
            art.add("analyze.csv", csv_bytes(&rows)?);
            art.add("summary.json", json_bytes(&summary)?);
            print(art.get("analyze.csv").expect("just added"));
            art.finish("lj analyze", &c)
        }
        LjCommand::Dive { rho } => {
            let rows = rho
                .iter()
                .map(|&r| {
                    let dv = unbounded_dive(r)?;
                    Ok(DiveRow {
                        rho: r,
                        energy_re: dv.energy.re,
                        energy_im: dv.energy.im,
                        leading: dv.leading,
                        ratio: dv.energy.re * r.powi(6),
                    })
                })
                .collect::<Result<Vec<_>, Failure>>()?;
            art.add("dive.csv", csv_bytes(&rows)?);
            print(art.get("dive.csv").expect("just added"));
            art.finish("lj dive", &c)
        }
    }
}

// -------------------------------------------------------------- calibrate

#[derive(Args, Debug)]
pub struct CalibrateArgs {
    /// Particles.
    #[arg(long)]
    n: Option<usize>,
    /// Coordinates per particle.
    #[arg(long)]
    k: Option<usize>,
    /// Degree of the sampled polynomial.
    #[arg(long)]
    d: Option<u32>,
    #[arg(long)]
    runs: Option<usize>,
    /// Fresh starts allowed when a run fails to converge.
    #[arg(long)]
    retries: Option<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct CalibrateConfig {
    schema_version: u32,
    n: usize,
    k: usize,
    d: u32,
    runs: Option<usize>,
    retries: usize,
    seed: Option<u64>,
}

impl Default for CalibrateConfig {
    fn default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            n: 4,
            k: 2,
            d: 14,
            runs: None,
            retries: 20,
            seed: None,
        }
    }
}

#[derive(Serialize)]
struct CalibrateSummary {
    schema_version: u32,
    n: usize,
    k: usize,
    d: u32,
    runs: usize,
    converged: usize,
    asymmetric: usize,
    asymmetric_fraction: f64,
    stderr: f64,
    predicted_symmetric_fraction: f64,
    seed: u64,
}

pub fn calibrate(g: &Global, a: CalibrateArgs) -> Result<(), Failure> {
    let mut cfg: CalibrateConfig = load_config(g)?;
    if let Some(v) = a.n {
        cfg.n = v;
    }
    if let Some(v) = a.k {
        cfg.k = v;
    }
    if let Some(v) = a.d {
        cfg.d = v;
    }
    if let Some(v) = a.retries {
        cfg.retries = v;
    }
    cfg.runs = Some(a.runs.or(cfg.runs).unwrap_or_else(|| scaled(g, 100)));
    cfg.seed = Some(resolve_seed(g, cfg.seed)?);
    let report = run_calibration(
        cfg.n,
        cfg.k,
        cfg.d,
        cfg.runs.unwrap_or(1),
        cfg.seed.unwrap_or(0),
        cfg.retries,
        &SearchOptions::default(),
    )?;
    let summary = CalibrateSummary {
        schema_version: SCHEMA_VERSION,
        n: report.n,
        k: report.k,
        d: report.d,
        runs: report.runs,
        converged: report.converged,
        asymmetric: report.asymmetric,
        asymmetric_fraction: report.asymmetric_fraction,
        stderr: report.stderr,
        predicted_symmetric_fraction: report.predicted_symmetric_fraction,
        seed: report.seed,
    };
    let mut art = Artifacts::new(g.out.as_deref());
    art.add("calibration.json", json_bytes(&summary)?);
    art.add("runs.csv", csv_bytes(&report.details)?);
    print(art.get("calibration.json").expect("just added"));
    art.finish("calibrate", &cfg)
}
