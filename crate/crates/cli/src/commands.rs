//! The six commands. Each resolves its defaults into the configuration first,
//! validates, computes, and writes its files through [`Outputs`].

use std::fs;
use std::path::{Path, PathBuf};

use floquet_synth::basis::{Basis, Sector, Statistics};
use floquet_synth::floquet::{self, AdiabaticConfig, FloquetResult};
use floquet_synth::grape::{self, ChainDrive, ControlProblem, OptimizeOptions};
use floquet_synth::io;
use floquet_synth::numerics::CVector;
use floquet_synth::operators::{build_target_boson, build_target_spin_jw, CouplingGraph, HermitianOperator, Space};
use floquet_synth::targets::{self, sat, ClauseSystem};
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{or, require, DriveArg, ObjectiveArg, RunConfig, Sites, StatisticsArg, SweepMode, TargetKind};
use crate::CliError;

/// Files go to one directory; every file carries the resolved configuration.
pub struct Outputs {
    dir: PathBuf,
    header: Value,
    pub written: Vec<PathBuf>,
}

impl Outputs {
    fn new(cfg: &RunConfig) -> Result<Self, CliError> {
        let dir = cfg.output_dir();
        fs::create_dir_all(&dir)
            .map_err(|e| CliError::config(format!("cannot create output directory {}: {e}", dir.display())))?;
        Ok(Self {
            dir,
            header: cfg.header(),
            written: Vec::new(),
        })
    }

    fn header(&self) -> Option<&Value> {
        Some(&self.header)
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|e| CliError::config(format!("cannot write {}: {e}", path.display())))?;
        self.written.push(path);
        Ok(())
    }

    /// A JSON document with `units` and `config` keys added to `body`.
    fn write_json(&mut self, name: &str, mut body: Value) -> Result<(), CliError> {
        if let Value::Object(m) = &mut body {
            m.insert("units".into(), json!(io::UNITS));
            m.insert("config".into(), self.header.clone());
        }
        let text = serde_json::to_string_pretty(&body).expect("JSON serializes") + "\n";
        self.write(name, &text)
    }

    fn write_matrix(&mut self, stem: &str, op: &HermitianOperator) -> Result<(), CliError> {
        let (re, im) = io::matrix_csv_pair(op.matrix(), self.header());
        self.write(&format!("{stem}_re.csv"), &re)?;
        self.write(&format!("{stem}_im.csv"), &im)?;
        let text = io::matrix_json(op, self.header())?;
        self.write(&format!("{stem}.json"), &text)
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))
}

fn read_clauses(cfg: &RunConfig) -> Result<ClauseSystem, CliError> {
    let path = require(&cfg.clauses, "clauses")?;
    ClauseSystem::parse(&read(&path)?).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}

/// Fill in the sector defaults that depend on the target, then build it.
fn resolve_sector(cfg: &mut RunConfig) -> Result<Sector, CliError> {
    match cfg.target {
        Some(TargetKind::Lih) => {
            or(&mut cfg.sites, Sites { lo: 16, hi: 16 });
            or(&mut cfg.excitations, 1);
        }
        Some(TargetKind::Clauses) => {
            let n = read_clauses(cfg)?.variables();
            or(&mut cfg.sites, Sites { lo: 1 << n, hi: 1 << n });
            or(&mut cfg.excitations, 1);
        }
        _ => {}
    }
    let sites = require(&cfg.sites, "L")?.single()?;
    sector_for(cfg, sites)
}

fn sector_for(cfg: &mut RunConfig, sites: usize) -> Result<Sector, CliError> {
    let m = or(&mut cfg.excitations, 1);
    let default_stats = if cfg.interaction.is_some() {
        StatisticsArg::Bosonic
    } else {
        StatisticsArg::Hardcore
    };
    let stats = match or(&mut cfg.statistics, default_stats) {
        StatisticsArg::Hardcore => Statistics::Hardcore,
        StatisticsArg::Bosonic => {
            let u = or(&mut cfg.interaction, 0.0);
            if !u.is_finite() {
                return Err(CliError::config("bosonic statistics need a finite --U"));
            }
            Statistics::Bosonic
        }
    };
    Ok(Sector::new(sites, m, stats)?)
}

fn graph_for(cfg: &mut RunConfig, kind: TargetKind, sites: usize) -> Result<CouplingGraph, CliError> {
    let k = or(&mut cfg.coupling, 1.0);
    Ok(match kind {
        TargetKind::Star => {
            let hub = or(&mut cfg.hub, sites / 2 + 1);
            targets::star_graph(sites, hub, k)?
        }
        TargetKind::AllToAll => targets::all_to_all(sites, k)?,
        TargetKind::Ring => targets::ring(sites, k)?,
        TargetKind::Chain => targets::chain_graph(sites, k)?,
        _ => unreachable!("not a graph target"),
    })
}

/// Target Hamiltonian on `sector`.
fn target_for(cfg: &mut RunConfig, sector: &Sector) -> Result<HermitianOperator, CliError> {
    let kind = require(&cfg.target, "target")?;
    let space = Space::Sector(*sector);
    let check_dim = |op: HermitianOperator, what: &str| {
        if op.dim() != sector.dim() {
            return Err(CliError::config(format!(
                "{what} has dimension {}, the sector {sector:?} has {}",
                op.dim(),
                sector.dim()
            )));
        }
        Ok(op.with_space(space)?)
    };
    match kind {
        TargetKind::Star | TargetKind::AllToAll | TargetKind::Ring | TargetKind::Chain => {
            let graph = graph_for(cfg, kind, sector.sites())?;
            Ok(match sector.statistics() {
                Statistics::Hardcore => build_target_spin_jw(sector.sites(), &graph, sector.excitations())?,
                Statistics::Bosonic => build_target_boson(sector, &graph, cfg.interaction.unwrap_or(0.0))?,
            })
        }
        TargetKind::Lih => check_dim(targets::lih_hamiltonian()?, "the LiH matrix"),
        TargetKind::Clauses => {
            let system = read_clauses(cfg)?;
            let omega = or(&mut cfg.omega, 1.0);
            let op = sat::cost_operator(&system, &encoding_for(system.variables()), false)?.scaled(omega);
            check_dim(op, "the clause cost operator")
        }
        TargetKind::Matrix => {
            let re = read(&require(&cfg.matrix_re, "matrix-re")?)?;
            let im = match &cfg.matrix_im {
                Some(p) => read(p)?,
                None => re.lines().map(|l| zero_row(l) + "\n").collect(),
            };
            let m = io::read_matrix_csv_pair(&re, &im)?;
            check_dim(HermitianOperator::new(Space::Dense { dim: m.nrows() }, m)?, "the matrix target")
        }
    }
}

/// A CSV row of zeros shaped like `line` (comments pass through).
fn zero_row(line: &str) -> String {
    let t = line.trim();
    if t.is_empty() || t.starts_with('#') {
        return line.to_string();
    }
    vec!["0"; t.split(',').count()].join(",")
}

/// The standard encoding for three variables; otherwise `+1` signs with the
/// last variable on the most significant qubit.
fn encoding_for(variables: usize) -> sat::VariableEncoding {
    if variables == 3 {
        return sat::VariableEncoding::standard();
    }
    let ordering: Vec<usize> = (1..=variables).rev().collect();
    sat::VariableEncoding::from_ordering(vec![1; variables], &ordering).expect("valid ordering")
}

fn drive_for(cfg: &mut RunConfig, sites: usize, default: DriveArg) -> ChainDrive {
    let gmax = or(&mut cfg.gmax, 5.0);
    let mut drive = match or(&mut cfg.drive, default) {
        DriveArg::G => {
            let mut d = ChainDrive::onsite(sites, gmax);
            d.hopping = or(&mut cfg.hopping, 1.0);
            d
        }
        DriveArg::Gj => ChainDrive::onsite_and_hopping(sites, gmax, or(&mut cfg.jmax, 1.0)),
    };
    if let Some(u) = cfg.interaction {
        drive = drive.with_interaction(u);
    }
    drive
}

fn options_for(cfg: &mut RunConfig, default_objective: ObjectiveArg) -> OptimizeOptions {
    let defaults = OptimizeOptions::default();
    OptimizeOptions {
        restarts: or(&mut cfg.restarts, defaults.restarts),
        max_iter: or(&mut cfg.max_iter, defaults.max_iter),
        seed: or(&mut cfg.seed, defaults.seed),
        objective: or(&mut cfg.objective, default_objective).into(),
        ..defaults
    }
}

fn grid(cfg: &mut RunConfig) -> Result<(usize, f64), CliError> {
    let steps = or(&mut cfg.steps, 10);
    let period = or(&mut cfg.period, 10.0);
    if steps == 0 || !(period > 0.0 && period.is_finite()) {
        return Err(CliError::config(format!("need N >= 1 and T > 0, got N = {steps}, T = {period}")));
    }
    Ok((steps, period))
}

fn floquet_summary(result: &FloquetResult) -> Value {
    json!({
        "fidelity_to_target": result.fidelity_to_target,
        "phase_fidelity_to_target": result.phase_fidelity_to_target,
        "quasienergies": result.quasienergies,
        "near_branch_cut": result.near_branch_cut,
    })
}

pub fn basis(mut cfg: RunConfig) -> Result<Outputs, CliError> {
    let sector = resolve_sector(&mut cfg)?;
    let basis = Basis::new(sector);
    let mut out = Outputs::new(&cfg)?;
    let text = io::basis_csv(&basis, out.header());
    out.write("basis.csv", &text)?;
    println!("{sector:?}: dimension {}", basis.len());
    Ok(out)
}

pub fn target(mut cfg: RunConfig) -> Result<Outputs, CliError> {
    let sector = resolve_sector(&mut cfg)?;
    let h = target_for(&mut cfg, &sector)?;
    let mut out = Outputs::new(&cfg)?;
    out.write_matrix("target", &h)?;
    println!("target on {sector:?}: dimension {}, trace {:.6}", h.dim(), h.trace());
    Ok(out)
}

pub fn optimize(mut cfg: RunConfig) -> Result<Outputs, CliError> {
    let sector = resolve_sector(&mut cfg)?;
    let h = target_for(&mut cfg, &sector)?;
    let (steps, period) = grid(&mut cfg)?;
    let drive = drive_for(&mut cfg, sector.sites(), DriveArg::G);
    let options = options_for(&mut cfg, ObjectiveArg::AbsTrace);
    let problem = drive.problem(&sector, steps, period)?;
    let target = h.propagator(period)?;
    let (seq, report) = grape::optimize(&problem, &target, &options)?;
    let result = floquet::floquet_from_controls(&problem, &seq, Some(&target))?;
    let aligned = floquet::aligned_effective_hamiltonian(&result, &h)?;

    let mut out = Outputs::new(&cfg)?;
    let controls = io::controls_csv(&seq, out.header());
    out.write("controls.csv", &controls)?;
    out.write_matrix("effective", &result.effective)?;
    out.write_matrix("effective_aligned", &aligned)?;
    out.write_json(
        "report.json",
        json!({ "report": report, "floquet": floquet_summary(&result) }),
    )?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    println!(
        "best fidelity {:.8} (restart {}, {} iterations)",
        report.best_fidelity, report.best_restart, report.iterations
    );
    Ok(out)
}

pub fn evolve(mut cfg: RunConfig) -> Result<Outputs, CliError> {
    let sector = resolve_sector(&mut cfg)?;
    let h = target_for(&mut cfg, &sector)?;
    let controls_path = require(&cfg.controls, "controls")?;
    let seq = io::read_controls_csv(&read(&controls_path)?)?;
    let period = or(&mut cfg.period, 10.0);
    cfg.steps = Some(seq.steps);
    let drive = drive_for(&mut cfg, sector.sites(), DriveArg::G);
    let problem: ControlProblem = drive.problem(&sector, seq.steps, period)?;
    if seq.names != problem.control_names() {
        return Err(CliError::config(format!(
            "controls file holds {:?}, the drive expects {:?}",
            seq.names,
            problem.control_names()
        )));
    }
    let periods = or(&mut cfg.periods, 20);
    let initial = or(&mut cfg.initial_state, 1);
    if initial == 0 || initial > sector.dim() {
        return Err(CliError::config(format!("--initial-state must lie in 1..={}", sector.dim())));
    }
    let target = h.propagator(period)?;
    let result = floquet::floquet_from_controls(&problem, &seq, Some(&target))?;
    let mut psi0 = CVector::zeros(sector.dim());
    psi0[initial - 1] = Complex64::new(1.0, 0.0);
    let driven = floquet::stroboscopic_evolve(&result.floquet_op, &psi0, periods)?;
    let ideal = floquet::stroboscopic_evolve(&target, &psi0, periods)?;

    let mut out = Outputs::new(&cfg)?;
    let mut text = io::comment_header(out.header());
    text.push_str("period,overlap_with_target");
    for k in 1..=sector.dim() {
        text.push_str(&format!(",p_{k}"));
    }
    text.push('\n');
    for (n, (a, b)) in driven.iter().zip(&ideal).enumerate() {
        text.push_str(&format!("{n},{}", io::real(b.dotc(a).norm_sqr())));
        for z in a.iter() {
            text.push_str(&format!(",{}", io::real(z.norm_sqr())));
        }
        text.push('\n');
    }
    out.write("evolution.csv", &text)?;
    out.write_json("floquet.json", floquet_summary(&result))?;
    let last = driven.last().expect("at least the initial state");
    println!(
        "fidelity {:.8}; overlap with the target evolution after {periods} periods {:.8}",
        result.fidelity_to_target.unwrap_or(f64::NAN),
        ideal.last().expect("initial state").dotc(last).norm_sqr()
    );
    Ok(out)
}

pub fn adiabatic(mut cfg: RunConfig) -> Result<Outputs, CliError> {
    cfg.target = Some(TargetKind::Clauses);
    let system = read_clauses(&cfg)?;
    let n = system.variables();
    let sector = resolve_sector(&mut cfg)?;
    if sector.dim() != 1 << n || sector.excitations() != 1 {
        return Err(CliError::config(format!(
            "{n} clause variables need the single-excitation sector of {} sites",
            1 << n
        )));
    }
    let omega = or(&mut cfg.omega, 0.25);
    let h_final = sat::cost_operator(&system, &encoding_for(n), false)?
        .scaled(omega)
        .with_space(Space::Sector(sector))?;
    let h_diag = sat::diag_initial_hamiltonian(n, omega)?
        .traceless()
        .with_space(Space::Sector(sector))?;
    let cycles = or(&mut cfg.cycles, 200);
    let period = or(&mut cfg.period, 6.38);
    let steps = or(&mut cfg.steps, 11);
    let drive = drive_for(&mut cfg, sector.sites(), DriveArg::Gj);
    let mut config = AdiabaticConfig::new(sector, drive, cycles, period, steps);
    config.grape = options_for(&mut cfg, ObjectiveArg::RealTrace);
    config.fidelity_floor = or(&mut cfg.fidelity_floor, config.fidelity_floor);
    config.schedule = or(&mut cfg.schedule, crate::config::ScheduleArg::Linear).into();
    config.decode_assignment = n == 3;

    let mut out = Outputs::new(&cfg)?;
    let (trajectory, failure) = match floquet::adiabatic_sweep(&h_diag, &h_final, None, &config) {
        Ok(t) => (t, None),
        Err(floquet_synth::Error::BelowFidelityFloor {
            cycle,
            fidelity,
            floor,
            partial,
        }) => (*partial, Some(format!("cycle {cycle}: synthesis fidelity {fidelity} below the floor {floor}"))),
        Err(e) => return Err(e.into()),
    };
    let text = io::trajectory_csv(&trajectory, out.header());
    out.write("trajectory.csv", &text)?;
    let last = trajectory.last().expect("at least one cycle");
    out.write_json(
        "adiabatic.json",
        json!({
            "completed": failure.is_none(),
            "failure": failure,
            "final_ground_fidelity": last.ground_fidelity,
            "min_ground_fidelity": trajectory.min_ground_fidelity(),
            "final_cost_expectation": last.cost_expectation,
            "decoded": last.decoded,
            "final_state": trajectory.final_state,
        }),
    )?;
    if let Some(msg) = failure {
        return Err(CliError::Numerical(msg));
    }
    match &last.decoded {
        Some(bits) => println!(
            "final ground fidelity {:.6}; decoded {}",
            last.ground_fidelity,
            bits.iter().enumerate().map(|(i, b)| format!("a{}={b}", i + 1)).collect::<Vec<_>>().join(" ")
        ),
        None => println!("final ground fidelity {:.6}; readout undecided", last.ground_fidelity),
    }
    Ok(out)
}

/// Least-squares `y = a x + b`.
pub fn linear_fit(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if points.len() < 2 || sxx == 0.0 {
        return None;
    }
    let a = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx;
    Some((a, my - a * mx))
}

pub fn sweep(mut cfg: RunConfig) -> Result<Outputs, CliError> {
    let mode = or(&mut cfg.mode, SweepMode::Grid);
    let sites = require(&cfg.sites, "L")?;
    let workers = cfg.workers.unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::config(format!("cannot start {workers} workers: {e}")))?;
    let options = options_for(&mut cfg, ObjectiveArg::AbsTrace);
    let default_drive = or(&mut cfg.drive, DriveArg::G);

    // validate once up front; defaults such as the hub stay per chain length
    let mut probe = cfg.clone();
    let sector = sector_for(&mut probe, sites.lo)?;
    target_for(&mut probe, &sector)?;

    let point = |l: usize, steps: usize, period: f64| -> Result<f64, CliError> {
        let mut c = cfg.clone();
        let sector = sector_for(&mut c, l)?;
        let h = target_for(&mut c, &sector)?;
        let problem = drive_for(&mut c, l, default_drive).problem(&sector, steps, period)?;
        let (_, report) = grape::optimize(&problem, &h.propagator(period)?, &options)?;
        Ok(report.best_fidelity)
    };

    let mut out_cfg = cfg.clone();
    let (csv, summary) = match mode {
        SweepMode::Grid => {
            let l = sites.single()?;
            let ts = out_cfg.t_grid.get_or_insert_with(|| vec![2.0, 4.0, 6.0, 8.0, 10.0]).clone();
            let ns = out_cfg.n_grid.get_or_insert_with(|| vec![2, 4, 6, 8, 10]).clone();
            let points: Vec<(f64, usize)> = ts.iter().flat_map(|&t| ns.iter().map(move |&n| (t, n))).collect();
            let results: Vec<Result<f64, CliError>> =
                pool.install(|| points.par_iter().map(|&(t, n)| point(l, n, t)).collect());
            let mut rows = String::from("T,N,best_fidelity\n");
            let mut best = Vec::new();
            for ((t, n), r) in points.iter().zip(results) {
                let f = r?;
                rows.push_str(&format!("{},{n},{}\n", io::real(*t), io::real(f)));
                best.push(json!({"T": t, "N": n, "best_fidelity": f}));
            }
            (rows, json!({ "mode": "grid", "points": best }))
        }
        SweepMode::Tmin => {
            let tau = or(&mut out_cfg.tau, 1.0);
            let threshold = or(&mut out_cfg.threshold, 0.999);
            let t_max = or(&mut out_cfg.t_max, 40.0);
            if !(tau > 0.0) {
                return Err(CliError::config("--tau must be positive"));
            }
            let max_steps = (t_max / tau).floor() as usize;
            let lengths: Vec<usize> = (sites.lo..=sites.hi).collect();
            let results: Vec<Result<Option<(usize, f64)>, CliError>> = pool.install(|| {
                lengths
                    .par_iter()
                    .map(|&l| {
                        for n in 1..=max_steps {
                            let f = point(l, n, n as f64 * tau)?;
                            if f > threshold {
                                return Ok(Some((n, f)));
                            }
                        }
                        Ok(None)
                    })
                    .collect()
            });
            let mut rows = String::from("L,T_min,N,best_fidelity\n");
            let mut fit_points = Vec::new();
            for (l, r) in lengths.iter().zip(results) {
                match r? {
                    Some((n, f)) => {
                        let t = n as f64 * tau;
                        fit_points.push((*l as f64, t));
                        rows.push_str(&format!("{l},{},{n},{}\n", io::real(t), io::real(f)));
                    }
                    None => rows.push_str(&format!("{l},nan,nan,nan\n")),
                }
            }
            let fit = linear_fit(&fit_points);
            if let Some((a, b)) = fit {
                println!("T_min = {a:.4} L + {b:.4} over {} lengths", fit_points.len());
            }
            (
                rows,
                json!({
                    "mode": "tmin",
                    "points": fit_points.iter().map(|(l, t)| json!({"L": l, "T_min": t})).collect::<Vec<_>>(),
                    "slope": fit.map(|f| f.0),
                    "intercept": fit.map(|f| f.1),
                }),
            )
        }
    };
    let mut out = Outputs::new(&out_cfg)?;
    let text = io::comment_header(out.header()) + &csv;
    out.write("sweep.csv", &text)?;
    out.write_json("sweep.json", summary)?;
    Ok(out)
}
