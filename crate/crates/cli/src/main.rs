use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use gbm_core::complex::{
    angle_table, builtin_document, dichotomy_check, gb_report, ComplexError, DichotomyStatus, GeometricTriangulation,
    ManifoldDoc, BUILTIN_NAMES,
};
use gbm_core::geom::{SphericalSimplex, UnitPoint};
use gbm_core::measure::{
    average_over_group, check_invariance, finite_orbit_measure, random_region, AtomicMeasure, McConfig,
    MeasureDoc, MeasureEstimate, MeasureSpec, RoundMeasure, SubsphereUniform, Tolerances,
};
use gbm_core::pullback::PullbackDoc;
use gbm_core::simplex::{face_cuts, sgb_residual};
use gbm_core::symmetry::{icosahedral_group, klein_four_group, octahedral_group};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "gbm", version, about = "Gauss–Bonnet checks for invariant measures on projective manifolds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args)]
struct RunArgs {
    /// Master seed for Monte Carlo and random inputs.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Monte Carlo samples per evaluation.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    samples: u64,
    /// Absolute tolerance for exact comparisons.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tolerance: f64,
    /// Allowed deviation in standard errors for Monte Carlo comparisons.
    #[arg(long, global = true, default_value_t = 4.0)]
    sigma_factor: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Measure preset: document, round, round-mc, infinity-line,
    /// atomic-on-edge, atomic-interior, fixed-point, atomic-random, averaged.
    #[arg(long, global = true)]
    measure: Option<String>,
    /// JSON measure document; overrides --measure.
    #[arg(long, global = true)]
    measure_file: Option<PathBuf>,
    /// Force Monte Carlo for round and subsphere measures.
    #[arg(long, global = true)]
    monte_carlo: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Group {
    Icosahedral,
    Octahedral,
    Klein,
}

#[derive(Subcommand)]
enum Command {
    /// Polyhedral Gauss–Bonnet report for a manifold document.
    Check(ManifoldArgs),
    /// Angle table of every developed simplex.
    Angles(ManifoldArgs),
    /// Developing-image dichotomy check.
    Dichotomy {
        #[command(flatten)]
        manifold: ManifoldArgs,
        /// Maximal holonomy word length.
        #[arg(long, default_value_t = 2)]
        orbit_depth: usize,
    },
    /// Spherical Gauss–Bonnet residual of one simplex.
    Sgb {
        /// Draw the simplex at random from --seed.
        #[arg(long)]
        random_simplex: bool,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// Vertex rows as JSON, e.g. [[1,0,0],[0,1,0],[0,0,1]].
        #[arg(long, conflicts_with = "random_simplex")]
        vertices: Option<String>,
    },
    /// Invariance of a measure on S² under a finite rotation group.
    Invariance {
        #[arg(long, value_enum, default_value_t = Group::Icosahedral)]
        group: Group,
        #[arg(long, default_value_t = 50)]
        regions: usize,
        /// Half-spaces per random region.
        #[arg(long, default_value_t = 3)]
        halves: usize,
    },
    /// Circle pull-back from a JSON document ("-" reads standard input).
    Pullback { input: PathBuf },
    /// Write a built-in manifold document.
    Example {
        name: String,
        /// Grid size for t2-grid and klein-grid.
        #[arg(long)]
        k: Option<usize>,
        /// Arc count for s1-polygon.
        #[arg(long)]
        m: Option<usize>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ManifoldArgs {
    /// Built-in name or path to a JSON manifold document.
    manifold: String,
    /// Size parameter for built-ins (k for grids, m for s1-polygon).
    #[arg(long)]
    k: Option<usize>,
}

impl RunArgs {
    fn mc(&self) -> McConfig {
        McConfig::new(self.seed, self.samples)
    }

    fn tol(&self) -> Tolerances {
        Tolerances {
            sigma_factor: self.sigma_factor,
            exact: self.tolerance,
        }
    }

    fn file_measure(&self) -> Result<Option<MeasureSpec>> {
        let Some(path) = &self.measure_file else {
            return Ok(None);
        };
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let doc: MeasureDoc = serde_json::from_str(&text).context("parsing measure document")?;
        Ok(Some(doc.to_spec()?))
    }

    fn round(&self, dim: usize, mc: bool) -> MeasureSpec {
        if mc || self.monte_carlo {
            RoundMeasure::monte_carlo(dim).into()
        } else {
            RoundMeasure::new(dim).into()
        }
    }

    fn preset_common(&self, name: &str, dim: usize) -> Option<MeasureSpec> {
        match name {
            "round" => Some(self.round(dim, false)),
            "round-mc" => Some(self.round(dim, true)),
            "infinity-line" => Some(SubsphereUniform::at_infinity(dim).with_monte_carlo(self.monte_carlo).into()),
            _ => None,
        }
    }

    fn manifold_measure(&self, k: &GeometricTriangulation) -> Result<MeasureSpec> {
        if let Some(m) = self.file_measure()? {
            return Ok(m);
        }
        let n = k.dim();
        let name = self.measure.as_deref().unwrap_or("document");
        if let Some(m) = self.preset_common(name, n) {
            return Ok(m);
        }
        Ok(match name {
            "document" => k.measure().cloned().unwrap_or_else(|| self.round(n, false)),
            "atomic-on-edge" => {
                let v = k.developed()[0].vertices();
                let mid = (v[0].coords() + v[1].coords()).as_slice().to_vec();
                AtomicMeasure::dirac(UnitPoint::new(mid)?).into()
            }
            "atomic-interior" => {
                let centers = k.developed().iter().map(SphericalSimplex::barycenter).collect();
                AtomicMeasure::uniform(centers)?.into()
            }
            "fixed-point" => {
                let mut seed = vec![0.0; n + 1];
                seed[0] = 2.0;
                seed[1] = 1.0;
                let orbit = finite_orbit_measure(&UnitPoint::new(seed)?, k.holonomy(), 64)?;
                orbit.atomic().clone().into()
            }
            other => bail!("unknown measure preset {other:?} for a manifold"),
        })
    }

    fn free_measure(&self, dim: usize, group: Option<Group>) -> Result<MeasureSpec> {
        if let Some(m) = self.file_measure()? {
            return Ok(m);
        }
        let name = self.measure.as_deref().unwrap_or("round");
        if let Some(m) = self.preset_common(name, dim) {
            return Ok(m);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ 0xa70a_11c5);
        let random_atomic = |rng: &mut ChaCha8Rng| -> Result<AtomicMeasure> {
            let atoms = (1..=5).map(|w| (UnitPoint::random(rng, dim), w as f64)).collect();
            Ok(AtomicMeasure::from_f64_weights(atoms)?)
        };
        Ok(match name {
            "atomic-random" => random_atomic(&mut rng)?.into(),
            "averaged" => {
                let group = group_maps(group.unwrap_or(Group::Icosahedral));
                average_over_group(&random_atomic(&mut rng)?.into(), &group)?.into()
            }
            other => bail!("unknown measure preset {other:?}"),
        })
    }
}

fn group_maps(g: Group) -> Vec<gbm_core::geom::ProjectiveMap> {
    match g {
        Group::Icosahedral => icosahedral_group(),
        Group::Octahedral => octahedral_group(),
        Group::Klein => klein_four_group(),
    }
}

fn load_manifold(args: &ManifoldArgs) -> Result<GeometricTriangulation> {
    let doc = if BUILTIN_NAMES.contains(&args.manifold.as_str()) {
        builtin_document(&args.manifold, args.k)?
    } else {
        let text =
            std::fs::read_to_string(&args.manifold).with_context(|| format!("reading manifold {}", args.manifold))?;
        ManifoldDoc::from_json(&text)?
    };
    Ok(doc.load()?)
}

/// Adds the vertex tuple of the offending facet to boundary-atom errors.
fn located(k: &GeometricTriangulation, err: ComplexError) -> anyhow::Error {
    if let ComplexError::BoundaryAtom { facet: Some(f), .. } = &err {
        let n = k.dim();
        let what = if n == 2 { "edge" } else { "facet" };
        let verts = &k.complex().faces(n - 1)[*f];
        let note = format!("{what} {f} has vertices {verts:?}");
        return anyhow::Error::new(err).context(note);
    }
    err.into()
}

fn est(e: &MeasureEstimate) -> String {
    if e.is_exact() {
        format!("{}", e.value)
    } else {
        format!("{:.6} ± {:.2e}", e.value, e.std_error)
    }
}

fn emit<T: Serialize>(format: Format, value: &T, text: impl FnOnce() -> String) -> Result<()> {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(value)?),
        Format::Text => print!("{}", text()),
    }
    Ok(())
}

fn pass_word(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn run(cli: &Cli) -> Result<bool> {
    let run = &cli.run;
    match &cli.command {
        Command::Check(args) => {
            let k = load_manifold(args)?;
            let m = run.manifold_measure(&k)?;
            let r = gb_report(&k, &m, &run.mc(), &run.tol()).map_err(|e| located(&k, e))?;
            emit(run.format, &r, || {
                let mut s = format!(
                    "{} (dim {}, faces {:?}) with {} measure\nchi = {}\nmu  = {}{}\nsum d = {}, sum k = {}\n",
                    r.name.as_deref().unwrap_or(&args.manifold),
                    r.dim,
                    r.face_counts,
                    r.measure,
                    r.chi,
                    est(&r.mu),
                    if r.dim % 2 == 1 { " (not compared in odd dimension)" } else { "" },
                    est(&r.sum_d),
                    est(&r.sum_k)
                );
                for v in &r.verdicts {
                    s += &format!("{} {}: {}\n", pass_word(v.pass), v.name, v.detail);
                }
                s
            })?;
            Ok(r.pass)
        }
        Command::Angles(args) => {
            let k = load_manifold(args)?;
            let m = run.manifold_measure(&k)?;
            let table = angle_table(&k, &m, &run.mc()).map_err(|e| located(&k, e))?;
            emit(run.format, &table, || {
                let mut s = String::new();
                for (t, row) in table.rows.iter().enumerate() {
                    let verts = &k.complex().faces(k.dim())[t];
                    s += &format!("simplex {t} {verts:?}\n");
                    for (a, cut) in row.iter().zip(face_cuts(&k.developed()[t])) {
                        let face: Vec<usize> = (0..verts.len()).filter(|i| !cut.contains(*i)).map(|i| verts[i]).collect();
                        s += &format!("  face {face:?}: {}\n", est(&a.estimate));
                    }
                }
                s
            })?;
            Ok(true)
        }
        Command::Dichotomy { manifold, orbit_depth } => {
            let k = load_manifold(manifold)?;
            let m = run.manifold_measure(&k)?;
            let set = m.as_atomic().cloned();
            let r = dichotomy_check(&k, &m, set.as_ref(), *orbit_depth, &run.mc(), &run.tol())
                .map_err(|e| located(&k, e))?;
            let ok = r.status != DichotomyStatus::Undetermined;
            emit(run.format, &r, || {
                format!(
                    "chi = {}\nchart union lower bound = {} ({} words, {} charts)\n{} {:?}: {}\n",
                    r.chi,
                    est(&r.lower_bound),
                    r.words,
                    r.charts,
                    pass_word(ok),
                    r.status,
                    r.detail
                )
            })?;
            Ok(ok)
        }
        Command::Sgb {
            random_simplex,
            dim,
            vertices,
        } => {
            let s = match vertices {
                Some(json) => {
                    let rows: Vec<Vec<f64>> = serde_json::from_str(json).context("parsing --vertices")?;
                    SphericalSimplex::from_vertices(&rows)?
                }
                None => {
                    if !random_simplex {
                        bail!("give --random-simplex or --vertices");
                    }
                    SphericalSimplex::random(&mut ChaCha8Rng::seed_from_u64(run.seed), *dim)
                }
            };
            let m = run.free_measure(s.dim(), None)?;
            let r = sgb_residual(&s, &m, &run.mc())?;
            let allowance = r.residual.allowance(run.sigma_factor, run.tolerance);
            let pass = r.residual.value.abs() <= allowance;
            #[derive(Serialize)]
            struct Out<'a> {
                vertices: Vec<Vec<f64>>,
                measure: &'a str,
                #[serde(flatten)]
                result: gbm_core::simplex::SgbResult,
                allowance: f64,
                pass: bool,
            }
            let out = Out {
                vertices: s.vertices().iter().map(UnitPoint::to_vec).collect(),
                measure: m.kind(),
                result: r,
                allowance,
                pass,
            };
            emit(run.format, &out, || {
                format!(
                    "k = {}\ninterior = {}\nresidual = {} (sigma {:.2e}, allowance {:.2e})\n{} spherical_gauss_bonnet\n",
                    est(&r.k),
                    est(&r.interior),
                    r.residual.value,
                    r.residual.std_error,
                    allowance,
                    pass_word(pass)
                )
            })?;
            Ok(pass)
        }
        Command::Invariance { group, regions, halves } => {
            let m = run.free_measure(2, Some(*group))?;
            let gens = group_maps(*group);
            let mut rng = ChaCha8Rng::seed_from_u64(run.seed);
            let regions: Vec<_> = (0..*regions).map(|_| random_region(&mut rng, 2, *halves)).collect();
            let r = check_invariance(&m, &gens, &regions, &run.mc(), &run.tol())?;
            emit(run.format, &r, || {
                format!(
                    "{} checks over {} group elements, max discrepancy {:e}\n{} invariance\n",
                    r.entries.len(),
                    gens.len(),
                    r.max_discrepancy,
                    pass_word(r.pass)
                )
            })?;
            Ok(r.pass)
        }
        Command::Pullback { input } => {
            let text = if input.as_os_str() == "-" {
                std::io::read_to_string(std::io::stdin())?
            } else {
                std::fs::read_to_string(input).with_context(|| format!("reading {}", input.display()))?
            };
            let r = PullbackDoc::from_json(&text)?.run(run.seed)?;
            emit(run.format, &r, || {
                let mut s = format!(
                    "degree {}: downstairs mass {}, pulled-back mass {}\n",
                    r.degree, r.downstairs_total, r.pulled_total
                );
                for (t, w) in &r.pulled {
                    s += &format!("  atom at {t} turns, weight {w}\n");
                }
                for (i, c) in r.independence.iter().enumerate() {
                    s += &format!("{} covering_independence[{}]\n", pass_word(c.pass), i + 1);
                }
                if let Some(e) = &r.equivariance {
                    s += &format!("{} deck_equivariance\n", pass_word(e.pass));
                }
                if let Some(q) = &r.quotient {
                    s += &format!("{} quotient_round_trip (downstairs {:?})\n", pass_word(q.pass), q.downstairs);
                }
                s
            })?;
            Ok(r.pass)
        }
        Command::Example { name, k, m, output } => {
            let doc = builtin_document(name, k.or(*m))?;
            let json = doc.to_json();
            match output {
                Some(path) => {
                    std::fs::write(path, json + "\n").with_context(|| format!("writing {}", path.display()))?;
                    let tops = doc.faces.get(&doc.dim).map_or(0, Vec::len);
                    eprintln!("wrote {} ({} top simplices)", path.display(), tops);
                }
                None => println!("{json}"),
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("GBM_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            let message = format!("{err:#}");
            if cli.run.format == Format::Json {
                let kind = err
                    .chain()
                    .find_map(|e| {
                        e.downcast_ref::<ComplexError>()
                            .map(|c| format!("{c:?}"))
                            .or_else(|| e.downcast_ref::<gbm_core::measure::MeasureError>().map(|c| format!("{c:?}")))
                            .or_else(|| e.downcast_ref::<gbm_core::pullback::PullbackError>().map(|c| format!("{c:?}")))
                    })
                    .and_then(|d| d.split([' ', '(', '{']).next().map(str::to_string))
                    .unwrap_or_else(|| "Error".to_string());
                println!("{}", serde_json::json!({ "error": kind, "message": message }));
            } else {
                eprintln!("error: {message}");
            }
            ExitCode::from(2)
        }
    }
}
