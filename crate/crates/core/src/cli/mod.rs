//! Command-line front end.
//!
//! Exit codes: 0 success, 1 output could not be written, 2 bad input
//! (arguments, unreadable or malformed files, violated preconditions),
//! 3 solver failure, 4 no such sphere, 5 verification failure.

mod text;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use quatspec::battery::{run_file, run_random, BatteryConfig, VerifyReport};
use quatspec::browder::{
    browder_equation_residuals, browder_product_residuals, browder_resolvent_left,
    browder_resolvent_right, classify, perturbation_localization, BrowderPoint, PerturbParams,
    PerturbTable, PointStatus, ProductResiduals,
};
use quatspec::oracle::Similarity;
use quatspec::qmat::DEFAULT_RANK_TOL;
use quatspec::scalculus::{
    left_resolvent_equation, riesz_projector, right_resolvent_equation, s_resolvent_left,
    s_resolvent_right, ContourSpec, QuadParams, DEFAULT_NODES, DEFAULT_N_MAX, DEFAULT_PROJ_TOL,
};
use quatspec::spectral::{default_cluster_tol, s_spectrum, SpectrumReport};
use quatspec::{Error, QMatrix, Quaternion, SpherePoint};

#[derive(Parser, Debug)]
#[command(
    name = "quatspec",
    version,
    about = "S-spectra, Riesz projectors and Browder resolvents of quaternionic matrices"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: Global,
}

#[derive(Args, Debug)]
struct Global {
    /// Ψ-plane clustering tolerance [default: 1e-7·max(1, ‖T‖)]
    #[arg(long, global = true)]
    tol_cluster: Option<f64>,
    /// Idempotency tolerance for Riesz projectors
    #[arg(long, global = true, default_value_t = DEFAULT_PROJ_TOL)]
    tol_proj: f64,
    /// Initial trapezoid nodes per circle (power of two, ≥ 16)
    #[arg(long, global = true, default_value_t = DEFAULT_NODES)]
    nodes: usize,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, conflicts_with = "text")]
    json: bool,
    /// Human-readable tables instead of JSON
    #[arg(long, global = true)]
    text: bool,
    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Eigenspheres with multiplicities and isolation gaps
    Spectrum { file: PathBuf },
    /// Riesz projector of one sphere
    Riesz {
        file: PathBuf,
        /// Ψ-point of the sphere
        #[arg(long, value_parser = parse_sphere)]
        sphere: SpherePoint,
        /// Contour radius override
        #[arg(long)]
        radius: Option<f64>,
    },
    /// Left and right S-resolvents at a point of the resolvent set
    Resolvent {
        file: PathBuf,
        #[arg(long, value_parser = parse_quaternion, allow_hyphen_values = true)]
        q: Quaternion,
    },
    /// Browder S-resolvents at a resolvent or finite-type point
    Browder {
        file: PathBuf,
        #[arg(long, value_parser = parse_quaternion, allow_hyphen_values = true)]
        q: Quaternion,
        /// Second point for the product equation
        #[arg(long, value_parser = parse_quaternion, allow_hyphen_values = true)]
        p: Option<Quaternion>,
    },
    /// Identity battery on a file or on random oracle matrices
    Verify {
        #[arg(required_unless_present = "random", conflicts_with = "random")]
        file: Option<PathBuf>,
        /// Matrix size of random cases
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 20)]
        count: usize,
        /// Draw similarities with quaternionic rather than real entries
        #[arg(long)]
        general_similarity: bool,
        #[arg(long, hide = true)]
        corrupt_projector: bool,
    },
    /// Spectra of T + E/k for k = 1..K
    Perturb {
        file: PathBuf,
        #[arg(long)]
        direction: PathBuf,
        #[arg(long, default_value_t = 20)]
        kmax: usize,
        /// Sphere to follow [default: nearest the origin]
        #[arg(long, value_parser = parse_sphere)]
        sphere: Option<SpherePoint>,
    },
}

fn parse_floats(s: &str, count: usize) -> Result<Vec<f64>, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    if parts.len() != count {
        return Err(format!(
            "expected {count} comma-separated numbers, got {}",
            parts.len()
        ));
    }
    if parts.iter().any(|x| !x.is_finite()) {
        return Err("values must be finite".into());
    }
    Ok(parts)
}

fn parse_sphere(s: &str) -> Result<SpherePoint, String> {
    let v = parse_floats(s, 2)?;
    Ok(SpherePoint::new(v[0], v[1]))
}

fn parse_quaternion(s: &str) -> Result<Quaternion, String> {
    let v = parse_floats(s, 4)?;
    Ok(Quaternion::new(v[0], v[1], v[2], v[3]))
}

/// A failed run: exit code and message for stderr.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_)
            | Error::Domain(_)
            | Error::Dim(_)
            | Error::Size { .. }
            | Error::Precondition(_) => 2,
            _ => 3,
        };
        Failure::new(code, e.to_string())
    }
}

fn load(path: &Path) -> Result<(QMatrix, Vec<u8>), Failure> {
    let bytes = fs::read(path).map_err(|e| Failure::new(2, format!("{}: {e}", path.display())))?;
    let text = std::str::from_utf8(&bytes)
        .map_err(|e| Failure::new(2, format!("{}: {e}", path.display())))?;
    let t = QMatrix::from_json(text)
        .map_err(|e| Failure::new(2, format!("{}: {e}", path.display())))?;
    Ok((t, bytes))
}

/// Report rendered both ways; the caller picks one.
struct Rendered {
    json: String,
    text: String,
}

fn rendered<T: Serialize>(value: &T, text: String) -> Rendered {
    let mut json = serde_json::to_string_pretty(value).expect("reports serialize");
    json.push('\n');
    Rendered { json, text }
}

impl Global {
    fn quad(&self) -> Result<QuadParams, Failure> {
        if !(self.tol_proj > 0.0) {
            return Err(Failure::new(2, "--tol-proj must be positive"));
        }
        Ok(QuadParams {
            proj_tol: self.tol_proj,
            n_max: DEFAULT_N_MAX.max(self.nodes),
        })
    }

    fn cluster_tol(&self, t: &QMatrix) -> Result<f64, Failure> {
        match self.tol_cluster {
            Some(x) if !(x > 0.0) => Err(Failure::new(2, "--tol-cluster must be positive")),
            Some(x) => Ok(x),
            None => Ok(default_cluster_tol(t)),
        }
    }

    fn spectrum(&self, t: &QMatrix) -> Result<SpectrumReport, Failure> {
        Ok(s_spectrum(t, self.cluster_tol(t)?)?)
    }
}

pub fn run(cli: Cli) -> Result<(), Failure> {
    let g = &cli.global;
    let mut verdict = Ok(());
    let report = match &cli.command {
        Command::Spectrum { file } => {
            let (t, _) = load(file)?;
            let rep = g.spectrum(&t)?;
            let text = text::spectrum(&rep);
            rendered(&rep, text)
        }
        Command::Riesz {
            file,
            sphere,
            radius,
        } => riesz(g, file, *sphere, *radius)?,
        Command::Resolvent { file, q } => resolvent(g, file, *q)?,
        Command::Browder { file, q, p } => browder(g, file, *q, *p)?,
        Command::Verify {
            file,
            random,
            count,
            general_similarity,
            corrupt_projector,
        } => {
            let mut cfg = BatteryConfig::new(random.unwrap_or(1), *count, g.seed);
            cfg.cluster_tol = g.tol_cluster;
            cfg.quad = g.quad()?;
            cfg.nodes = g.nodes;
            cfg.corrupt_projector = *corrupt_projector;
            if *general_similarity {
                cfg.similarity = Similarity::Quaternionic;
            }
            let rep: VerifyReport = match file {
                Some(path) => {
                    let (t, bytes) = load(path)?;
                    cfg.n = t.n();
                    run_file(&t, &bytes, &cfg)
                }
                None => run_random(&cfg)?,
            };
            if let Some(name) = rep.first_failure {
                verdict = Err(Failure::new(5, format!("verification failed: {name}")));
            }
            let text = text::verify(&rep);
            rendered(&rep, text)
        }
        Command::Perturb {
            file,
            direction,
            kmax,
            sphere,
        } => {
            let (t, _) = load(file)?;
            let (e, _) = load(direction)?;
            if e.n() != t.n() {
                return Err(Failure::new(
                    2,
                    format!(
                        "direction is {}x{}, matrix is {}x{}",
                        e.n(),
                        e.n(),
                        t.n(),
                        t.n()
                    ),
                ));
            }
            if *kmax == 0 {
                return Err(Failure::new(2, "--kmax must be at least 1"));
            }
            let params = PerturbParams {
                cluster_tol: g.cluster_tol(&t)?,
                nodes: g.nodes,
                quad: g.quad()?,
                rank_tol: DEFAULT_RANK_TOL,
            };
            let table: PerturbTable = perturbation_localization(&t, &e, *kmax, *sphere, &params)
                .map_err(|err| match (&err, sphere) {
                    (Error::Precondition(m), Some(_)) if m.starts_with("no sphere") => {
                        Failure::new(4, "no such sphere")
                    }
                    _ => Failure::from(err),
                })?;
            let text = text::perturb(&table);
            rendered(&table, text)
        }
    };
    let body = if g.text { report.text } else { report.json };
    match &g.out {
        Some(path) => fs::write(path, body)
            .map_err(|e| Failure::new(1, format!("{}: {e}", path.display())))?,
        None => print!("{body}"),
    }
    verdict
}

#[derive(Serialize)]
struct RieszReport {
    sphere: SpherePoint,
    mult: usize,
    radius: f64,
    nodes: usize,
    rank: usize,
    idempotency: f64,
    commutation: f64,
    projector: QMatrix,
}

fn locate_sphere(
    g: &Global,
    t: &QMatrix,
    sphere: SpherePoint,
) -> Result<(SpectrumReport, usize), Failure> {
    let rep = g.spectrum(t)?;
    let idx = rep
        .locate(sphere, rep.cluster_tol)
        .ok_or_else(|| Failure::new(4, format!("no such sphere {sphere}")))?;
    Ok((rep, idx))
}

fn riesz(
    g: &Global,
    file: &Path,
    sphere: SpherePoint,
    radius: Option<f64>,
) -> Result<Rendered, Failure> {
    let (t, _) = load(file)?;
    let (rep, idx) = locate_sphere(g, &t, sphere)?;
    let s = rep.spheres[idx];
    let gap = rep.gaps[idx];
    let mut contour = ContourSpec::default_for(s.point, gap, g.nodes);
    if let Some(r) = radius {
        contour.radius = r;
    }
    let proj = riesz_projector(&t, &contour, gap, &g.quad()?)?;
    let p = proj.p;
    let commutation = p
        .matmul(&t)
        .and_then(|a| Ok(a.sub(&t.matmul(&p)?)?.op_norm()))?;
    let report = RieszReport {
        sphere: s.point,
        mult: s.mult,
        radius: contour.radius,
        nodes: proj.nodes,
        rank: p.hrank(DEFAULT_RANK_TOL)?,
        idempotency: proj.idempotency,
        commutation,
        projector: p,
    };
    let text = text::riesz(&report);
    Ok(rendered(&report, text))
}

#[derive(Serialize)]
struct ResolventReport {
    q: Quaternion,
    left_equation: f64,
    right_equation: f64,
    left: QMatrix,
    right: QMatrix,
}

fn resolvent(g: &Global, file: &Path, q: Quaternion) -> Result<Rendered, Failure> {
    let (t, _) = load(file)?;
    let rep = g.spectrum(&t)?;
    if let Some(i) = rep.locate(quatspec::quat::psi(q), rep.cluster_tol) {
        return Err(Failure::new(
            2,
            format!(
                "q lies on the sphere {} of the S-spectrum",
                rep.spheres[i].point
            ),
        ));
    }
    let report = ResolventReport {
        q,
        left_equation: left_resolvent_equation(q, &t)?,
        right_equation: right_resolvent_equation(q, &t)?,
        left: s_resolvent_left(q, &t)?,
        right: s_resolvent_right(q, &t)?,
    };
    let text = text::resolvent(&report);
    Ok(rendered(&report, text))
}

#[derive(Serialize)]
struct BrowderReport {
    q: Quaternion,
    status: PointStatus,
    sphere: Option<SpherePoint>,
    proj_rank: usize,
    equation_left: f64,
    equation_right: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    p: Option<Quaternion>,
    #[serde(skip_serializing_if = "Option::is_none")]
    product: Option<ProductResiduals>,
    left: QMatrix,
    right: QMatrix,
}

fn browder(
    g: &Global,
    file: &Path,
    q: Quaternion,
    p: Option<Quaternion>,
) -> Result<Rendered, Failure> {
    let (t, _) = load(file)?;
    let rep = g.spectrum(&t)?;
    let records = classify(&t, &rep, g.nodes, &g.quad()?, DEFAULT_RANK_TOL)?;
    let b = BrowderPoint::locate(q, &rep, &records);
    let (equation_left, equation_right) = browder_equation_residuals(&b, &t)?;
    let product = match p {
        Some(p) => {
            let bp = BrowderPoint::locate(p, &rep, &records);
            Some(browder_product_residuals(&b, &bp, &t, rep.cluster_tol)?)
        }
        None => None,
    };
    let report = BrowderReport {
        q,
        status: b.status,
        sphere: b.sphere.map(|i| rep.spheres[i].point),
        proj_rank: b.p.hrank(DEFAULT_RANK_TOL)?,
        equation_left,
        equation_right,
        p,
        product,
        left: browder_resolvent_left(&b, &t)?,
        right: browder_resolvent_right(&b, &t)?,
    };
    let text = text::browder(&report);
    Ok(rendered(&report, text))
}
