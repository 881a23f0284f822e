//! Command line front end: construct a polyhedron from its base angles,
//! sample its flexion, verify the algebraic identities, export mesh frames,
//! screen the parameter space, and inspect the resultant factorization.

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use kokotsakis::elliptic::{fit_alignment, flexion_elliptic, modulus_from_zeta};
use kokotsakis::flexion::{
    csv_row, flexion_elementary, reduce, residual_main, Branch, CSV_HEADER,
};
use kokotsakis::planar::{
    construct_spec, normalize_enumeration, spec_from_json, spec_to_json, BaseAngles,
    ConstructError, FailureStage, PlanarError, PolyhedronSpec, Sigma,
};
use kokotsakis::resultant::{stachel_check, Factorization};
use kokotsakis::screening::{self, Bounds3};
use std::io::Write;
use std::path::{Path, PathBuf};

/// Exit codes: 3 = right angle in the base (geometric assumption 1),
/// 4 = no valid configuration at τ, 5 = some βᵢ undefined (assumption 3),
/// 6 = some vertex quadrilateral non-elliptic (assumption 4),
/// 7 = not flexible (ζ₁ ≤ 1), 1 = verification failure or I/O error.
#[derive(Parser)]
#[command(name = "kokotsakis", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Construct a flexible polyhedron from base angles and the parameter τ.
    Construct {
        /// Four comma-separated interior angles in radians.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        deltas: Vec<f64>,
        /// Construction parameter in radians (the reflections τ+π, π−τ, −τ
        /// are tried as well).
        #[arg(long, allow_hyphen_values = true, conflicts_with = "scan_tau")]
        tau: Option<f64>,
        /// Search for a valid τ instead of passing one.
        #[arg(long)]
        scan_tau: bool,
        /// Override the default σ sign bits, e.g. "+,+,+,+;+,-,-,+".
        #[arg(long, allow_hyphen_values = true)]
        sigma: Option<String>,
        /// Output path for the spec JSON (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample the flexion curve of a spec as CSV.
    Flex {
        #[arg(long)]
        spec: PathBuf,
        /// Branch as two signs "σ,ρ", e.g. "+,-".
        #[arg(long, default_value = "+,+", allow_hyphen_values = true)]
        branch: String,
        #[arg(long, default_value_t = 720)]
        samples: usize,
        /// Add the elliptic-parameterization columns and differences.
        #[arg(long)]
        elliptic: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every invariant suite against a spec.
    Verify {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Export mesh frames as Wavefront OBJ files plus a manifest.
    Mesh {
        #[arg(long)]
        spec: PathBuf,
        /// Single parameter value.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "animate")]
        t: Option<f64>,
        /// Number of uniformly spaced frames over one period.
        #[arg(long)]
        animate: Option<usize>,
        #[arg(long, default_value = "+,+", allow_hyphen_values = true)]
        branch: String,
        #[arg(long)]
        outdir: PathBuf,
    },
    /// Screen a uniform grid of the (x, y, s) parameter space.
    Screen {
        #[arg(long)]
        resolution: usize,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads (defaults to the number of cores).
        #[arg(long)]
        workers: Option<usize>,
        /// τ-scan samples per grid point.
        #[arg(long, default_value_t = screening::DEFAULT_TAU_GRID)]
        tau_grid: usize,
        /// Also dump (δ₁, δ₂, δ₃, convex) rows for admissible points.
        #[arg(long)]
        deltas_out: Option<PathBuf>,
    },
    /// Print the resultant factorization and branch sets of a spec.
    Resultant {
        #[arg(long)]
        spec: PathBuf,
    },
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    };
    std::process::exit(code);
}

fn construct_exit_code(e: &ConstructError) -> i32 {
    match e {
        ConstructError::Planar(PlanarError::RightAngle(_)) => 3,
        ConstructError::TauRejected { stage, .. } => match stage {
            FailureStage::Beta => 5,
            FailureStage::Elliptic => 6,
            _ => 4,
        },
        ConstructError::Planar(_) => 4,
    }
}

fn parse_branch(text: &str) -> Result<Branch> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 {
        bail!("expected branch as two signs like '+,-', got {text:?}");
    }
    Ok(Branch {
        sigma: parts[0].parse().map_err(anyhow::Error::msg)?,
        rho: parts[1].parse().map_err(anyhow::Error::msg)?,
    })
}

fn parse_sigma(text: &str) -> Result<Sigma> {
    let halves: Vec<&str> = text.split(';').collect();
    if halves.len() != 2 {
        bail!("expected sigma as '<4 alpha signs>;<4 gamma signs>'");
    }
    let parse4 = |part: &str| -> Result<[i8; 4]> {
        let signs: Vec<i8> = part
            .split(',')
            .map(|s| match s.trim() {
                "+" | "+1" | "1" => Ok(1i8),
                "-" | "-1" => Ok(-1i8),
                other => bail!("bad sign {other:?}"),
            })
            .collect::<Result<_>>()?;
        signs.try_into().map_err(|_| anyhow::anyhow!("expected 4 signs"))
    };
    Sigma::new(parse4(halves[0])?, parse4(halves[1])?).map_err(|e| anyhow::anyhow!("{e}"))
}

fn load_spec(path: &Path) -> Result<PolyhedronSpec<f64>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading spec {}", path.display()))?;
    Ok(spec_from_json(&text)?)
}

fn write_out(path: Option<&Path>, content: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, content).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Construct { deltas, tau, scan_tau, sigma, out } => {
            if deltas.len() != 4 {
                bail!("--deltas needs exactly four comma-separated values");
            }
            let base = match BaseAngles::new([deltas[0], deltas[1], deltas[2], deltas[3]]) {
                Ok(b) => b,
                Err(e @ PlanarError::RightAngle(_)) => {
                    eprintln!("error: geometric assumption 1 violated: {e}");
                    return Ok(3);
                }
                Err(e) => {
                    eprintln!("error: geometric assumption 1 violated: {e}");
                    return Ok(4);
                }
            };
            let sigma = sigma.as_deref().map(parse_sigma).transpose()?;
            let tau = match (tau, scan_tau) {
                (Some(t), _) => t,
                (None, true) => {
                    let p = kokotsakis::planar::deltas_to_xys(&base);
                    match screening::admissible_tau(&p, screening::DEFAULT_TAU_GRID) {
                        Some(t) => t,
                        None => {
                            eprintln!("error: no admissible τ found by the scan");
                            return Ok(4);
                        }
                    }
                }
                (None, false) => bail!("pass either --tau or --scan-tau"),
            };
            match construct_spec(&base, tau, sigma) {
                Ok(spec) => {
                    write_out(out.as_deref(), &spec_to_json(&spec))?;
                    Ok(0)
                }
                Err(e) => {
                    let assumption = match construct_exit_code(&e) {
                        5 => "geometric assumption 3 (βᵢ well-defined)",
                        6 => "geometric assumption 4 (elliptic quadrilaterals)",
                        _ => "geometric assumption 2 (no valid factor system at τ)",
                    };
                    eprintln!("error: {assumption} violated: {e}");
                    Ok(construct_exit_code(&e))
                }
            }
        }

        Command::Flex { spec, branch, samples, elliptic, out } => {
            let spec = load_spec(&spec)?;
            let branch = parse_branch(&branch)?;
            let rc = match reduce(&spec) {
                Ok(rc) => rc,
                Err(e @ PlanarError::NotFlexible(_)) => {
                    eprintln!("error: {e}");
                    return Ok(7);
                }
                Err(e) => return Err(e.into()),
            };
            let mut text = String::new();
            if elliptic {
                let md = modulus_from_zeta(rc.zeta1());
                let fit = fit_alignment(&spec, 240).map_err(anyhow::Error::msg)?;
                let period = 2.0 * md.big_k_prime;
                text.push_str(CSV_HEADER);
                text.push_str(",phi_ell,psi1_ell,theta_ell,psi2_ell,dphi,dpsi1,dtheta,dpsi2\n");
                for i in 0..samples {
                    let t = 2.0 * std::f64::consts::PI * i as f64 / samples as f64;
                    let s = flexion_elementary(&rc, branch, t);
                    check_residuals(&spec, &s)?;
                    let u = (-md.big_k_prime / std::f64::consts::PI * t + fit.shift)
                        .rem_euclid(period);
                    let e = flexion_elliptic(&rc, &md, fit.branch_elliptic, u);
                    let d = |a: f64, b: f64| kokotsakis::elliptic::circular_distance(a, b);
                    text.push_str(&format!(
                        "{},{},{},{},{},{},{},{},{}\n",
                        csv_row(&s),
                        fmt(e.phi),
                        fmt(e.psi1),
                        fmt(e.theta),
                        fmt(e.psi2),
                        fmt(d(s.phi, e.phi)),
                        fmt(d(s.psi1, e.psi1)),
                        fmt(d(s.theta, e.theta)),
                        fmt(d(s.psi2, e.psi2)),
                    ));
                }
            } else {
                text.push_str(CSV_HEADER);
                text.push('\n');
                for i in 0..samples {
                    let t = 2.0 * std::f64::consts::PI * i as f64 / samples as f64;
                    let s = flexion_elementary(&rc, branch, t);
                    check_residuals(&spec, &s)?;
                    text.push_str(&csv_row(&s));
                    text.push('\n');
                }
            }
            write_out(out.as_deref(), &text)?;
            Ok(0)
        }

        Command::Verify { spec } => {
            let spec = load_spec(&spec)?;
            let (report, all_pass) = verify_report(&spec)?;
            print!("{report}");
            Ok(if all_pass { 0 } else { 1 })
        }

        Command::Mesh { spec, t, animate, branch, outdir } => {
            let spec = load_spec(&spec)?;
            let branch = parse_branch(&branch)?;
            let spec = normalize_enumeration(&spec).map_err(anyhow::Error::msg)?;
            let rc = reduce(&spec).map_err(anyhow::Error::msg)?;
            let base = kokotsakis::embed::realize_base(&spec.base).map_err(anyhow::Error::msg)?;
            std::fs::create_dir_all(&outdir)
                .with_context(|| format!("creating {}", outdir.display()))?;
            let ts: Vec<f64> = match (t, animate) {
                (Some(v), _) => vec![v],
                (None, Some(n)) => (0..n.max(1))
                    .map(|i| 2.0 * std::f64::consts::PI * i as f64 / n.max(1) as f64)
                    .collect(),
                (None, None) => vec![0.0],
            };
            let mut manifest = String::from(kokotsakis::embed::MANIFEST_HEADER);
            manifest.push('\n');
            let mut frames = Vec::new();
            for (i, &tv) in ts.iter().enumerate() {
                let sample = flexion_elementary(&rc, branch, tv);
                let frame = kokotsakis::embed::build_frame(&spec, &base, &sample)
                    .map_err(|e| anyhow::anyhow!("frame {i}: {e}"))?;
                let path = outdir.join(format!("frame_{:04}.obj", i + 1));
                std::fs::write(&path, kokotsakis::embed::obj_text(&frame))
                    .with_context(|| format!("writing {}", path.display()))?;
                manifest.push_str(&kokotsakis::embed::manifest_row(i + 1, &sample));
                manifest.push('\n');
                frames.push(frame);
            }
            if frames.len() > 1 {
                let report = kokotsakis::embed::verify_isometry(&frames);
                manifest.push_str(&format!(
                    "# isometry frames={} max_edge_dev={:e} max_angle_dev={:e} pass={}\n",
                    report.frames,
                    report.max_edge_deviation,
                    report.max_angle_deviation,
                    report.pass()
                ));
            }
            let manifest_path = outdir.join("manifest.csv");
            std::fs::write(&manifest_path, manifest)
                .with_context(|| format!("writing {}", manifest_path.display()))?;
            Ok(0)
        }

        Command::Screen { resolution, out, workers, tau_grid, deltas_out } => {
            if let Some(w) = workers {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(w)
                    .build_global()
                    .context("configuring worker pool")?;
            }
            let bounds = Bounds3::half_pi_cube();
            let points = screening::screen_grid::<f64>(resolution, &bounds, tau_grid);
            let mut text = String::from(screening::CSV_HEADER);
            text.push('\n');
            for pt in &points {
                text.push_str(&screening::csv_row(pt));
                text.push('\n');
            }
            std::fs::write(&out, text).with_context(|| format!("writing {}", out.display()))?;
            if let Some(dpath) = deltas_out {
                let mut text = String::from("delta1,delta2,delta3,convex\n");
                for pt in &points {
                    if let Some(row) = screening::deltas_row(pt) {
                        text.push_str(&row);
                        text.push('\n');
                    }
                }
                std::fs::write(&dpath, text)
                    .with_context(|| format!("writing {}", dpath.display()))?;
            }
            let admissible = points.iter().filter(|p| p.admissible).count();
            eprintln!("screened {} points, {} admissible", points.len(), admissible);
            Ok(0)
        }

        Command::Resultant { spec } => {
            let spec = load_spec(&spec)?;
            let report = stachel_check(&spec).map_err(anyhow::Error::msg)?;
            let mut out = std::io::stdout().lock();
            writeln!(out, "zeta1 = {:.12}  zeta2 = {:.12}", report.zeta1, report.zeta2)?;
            match &report.factorization {
                Factorization::Factors(plus, minus, residual) => {
                    writeln!(out, "reduced resultant factors  g1²g3² + a·(g1² − g3²) − 1:")?;
                    writeln!(out, "  a₊ = (ζ1+ζ2)² = {:+.12}", plus.a)?;
                    writeln!(out, "  a₋ = (ζ1−ζ2)² = {:+.12}", minus.a)?;
                    writeln!(out, "  product residual (normalized) = {:.3e}", residual)?;
                }
                Factorization::Irreducible => writeln!(out, "reduced resultant: irreducible")?,
            }
            let spec_n = normalize_enumeration(&spec).map_err(anyhow::Error::msg)?;
            let f = &spec_n.factors;
            let w1 = kokotsakis::resultant::branch_points_quad(&f[0]);
            let w2 = kokotsakis::resultant::branch_points_quad(
                &kokotsakis::sphquad::InvolutionFactors {
                    lambda: -f[0].lambda,
                    mu: -f[2].mu,
                    nu: f[1].nu,
                },
            );
            writeln!(out, "branch set over z (fiber w1):")?;
            for p in w1.points {
                writeln!(out, "  {:+.12}{:+.12}i", p.re, p.im)?;
            }
            writeln!(out, "branch set over z (fiber w2):")?;
            for p in w2.points {
                writeln!(out, "  {:+.12}{:+.12}i", p.re, p.im)?;
            }
            writeln!(out, "branch-set deviation      = {:.3e}", report.branch_set_deviation)?;
            writeln!(out, "resultant proportionality = {:.3e}", report.proportionality_deviation)?;
            writeln!(out, "reducibility check: {}", if report.pass() { "PASS" } else { "FAIL" })?;
            Ok(if report.pass() { 0 } else { 1 })
        }
    }
}

fn fmt(v: f64) -> String {
    format!("{v:.11e}")
}

fn check_residuals(spec: &PolyhedronSpec<f64>, s: &kokotsakis::flexion::FlexionSample<f64>) -> Result<()> {
    let res = residual_main(spec, s).map_err(anyhow::Error::msg)?;
    let worst = res.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    if worst > 1e-9 {
        bail!("flexion residual {worst:e} exceeds 1e-9 at t = {}", s.t);
    }
    Ok(())
}

/// All module invariant suites against one spec; returns the printable
/// table and the conjunction.
fn verify_report(spec: &PolyhedronSpec<f64>) -> Result<(String, bool)> {
    use std::fmt::Write as _;
    let mut out = String::new();
    let mut all = true;
    let mut line = |name: &str, pass: bool, detail: String, all: &mut bool| {
        *all &= pass;
        let _ = writeln!(out, "{:<28} {}  {}", name, if pass { "PASS" } else { "FAIL" }, detail);
    };

    let spec_n = normalize_enumeration(spec).map_err(anyhow::Error::msg)?;
    line(
        "sign-pattern",
        true,
        format!("normalized with shift {}", (4 + spec_n.enumeration - spec.enumeration) % 4),
        &mut all,
    );

    let orth = spec_n
        .quads
        .iter()
        .map(|q| q.orthodiagonality_residual().abs())
        .fold(0.0f64, f64::max);
    line("orthodiagonality", orth <= 1e-9, format!("max residual {orth:.3e}"), &mut all);

    let ell = spec_n.quads.iter().map(|q| q.elliptic_margin()).fold(f64::INFINITY, f64::min);
    line("ellipticity", ell > 1e-7, format!("min margin {ell:.3e}"), &mut all);

    let pair = spec_n.pairing_residuals().iter().fold(0.0f64, |m, r| m.max(r.abs()));
    line("anti-involutive pairing", pair <= 1e-9, format!("max residual {pair:.3e}"), &mut all);

    let prop = spec_n.proportionality_residuals().iter().fold(0.0f64, |m, r| m.max(r.abs()));
    line("factor proportionality", prop <= 1e-9, format!("max residual {prop:.3e}"), &mut all);

    let z = spec_n.zetas;
    let zeta_res = [(z[0] * z[0] - z[2] * z[2]).abs(), (z[1] * z[1] - z[3] * z[3]).abs(),
        (z[0] * z[0] - z[1] * z[1] - 1.0).abs()]
    .into_iter()
    .fold(0.0f64, f64::max);
    line(
        "zeta system",
        zeta_res <= 1e-9 && z[0] > 1.0,
        format!("max residual {zeta_res:.3e}, zeta1 = {:.6}", z[0]),
        &mut all,
    );

    match reduce(&spec_n) {
        Ok(rc) => {
            let sys = kokotsakis::flexion::SystemCoeffs::from_spec(&spec_n)
                .map_err(anyhow::Error::msg)?;
            let mut worst = 0.0f64;
            for branch in Branch::ALL {
                for i in 0..720 {
                    let t = 2.0 * std::f64::consts::PI * i as f64 / 720.0;
                    let s = flexion_elementary(&rc, branch, t);
                    for r in sys.residuals(&s) {
                        worst = worst.max(r.abs());
                    }
                }
            }
            line("flexion residuals", worst <= 1e-9, format!("max {worst:.3e}"), &mut all);

            // flattening: u and w₂ hit 0/∞ at the four trigger parameters
            let mut flat_ok = true;
            for ev in kokotsakis::flexion::flattening_parameters(&rc) {
                let a = flexion_elementary(&rc, Branch::ALL[0], ev.t);
                let b = flexion_elementary(&rc, Branch::ALL[2], ev.t);
                let coords = match ev.edge {
                    kokotsakis::flexion::FlattenedEdge::Theta => [a.u, b.u],
                    kokotsakis::flexion::FlattenedEdge::Psi2 => [a.w2, b.w2],
                };
                let hits_inf = coords.iter().any(|c| c.is_infinite());
                let hits_zero =
                    coords.iter().any(|c| !c.is_infinite() && c.value().abs() < 1e-9);
                flat_ok &= hits_inf && hits_zero;
            }
            line("flattening events", flat_ok, "t = π/4, 3π/4, 5π/4, 7π/4".into(), &mut all);

            let stachel = stachel_check(&spec_n).map_err(anyhow::Error::msg)?;
            line(
                "branch-set coincidence",
                stachel.branch_set_deviation <= 1e-9,
                format!("deviation {:.3e}", stachel.branch_set_deviation),
                &mut all,
            );
            line(
                "resultant factorization",
                matches!(stachel.factorization, Factorization::Factors(..)),
                match stachel.factorization {
                    Factorization::Factors(_, _, r) => format!("product residual {r:.3e}"),
                    Factorization::Irreducible => "irreducible".into(),
                },
                &mut all,
            );
            line(
                "resultant proportionality",
                stachel.proportionality_deviation <= 1e-8,
                format!("deviation {:.3e}", stachel.proportionality_deviation),
                &mut all,
            );

            match kokotsakis::embed::realize_base(&spec_n.base) {
                Ok(base) => {
                    let mut frames = Vec::new();
                    let mut closure_err = None;
                    for i in 0..60 {
                        let t = 2.0 * std::f64::consts::PI * i as f64 / 60.0;
                        match kokotsakis::embed::build_frame(
                            &spec_n,
                            &base,
                            &flexion_elementary(&rc, Branch::ALL[0], t),
                        ) {
                            Ok(f) => frames.push(f),
                            Err(e) => {
                                closure_err = Some(e);
                                break;
                            }
                        }
                    }
                    match closure_err {
                        None => {
                            let rep = kokotsakis::embed::verify_isometry(&frames);
                            line(
                                "embedding isometry",
                                rep.pass(),
                                format!(
                                    "edge dev {:.3e}, angle dev {:.3e}",
                                    rep.max_edge_deviation, rep.max_angle_deviation
                                ),
                                &mut all,
                            );
                        }
                        Some(e) => line("embedding isometry", false, format!("{e}"), &mut all),
                    }
                }
                Err(e) => line("embedding isometry", false, format!("{e}"), &mut all),
            }
        }
        Err(e) => {
            line("flexibility", false, format!("{e}"), &mut all);
        }
    }

    Ok((out, all))
}
