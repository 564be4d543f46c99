use std::time::Instant;

use super::problem::{Payload, ProblemFile, Settings, Target, ThetaDecl};
use super::report::{Report, Value};
use super::fmt_poly;
use crate::apps::{
    lyap_inequality, lyap_synthesize_with, polymin, polymin_attempt, sample_constraint_check, Attempt, LyapOptions,
    LyapunovOutcome, PipelineOptions, PolyminOutcome, UncertainSystem,
};
use crate::kyp::{fdi_sweep, kyp_lmi, KypError, PencilSystem, ThetaSpec};
use crate::reduce::{reduce_system, MultiplierSchedule, TriangularDomain};
use crate::sdp::{
    feasibility_problem, maximization_problem, solve_feasible_with, write_sdpa, InteriorPoint, SdpStatus, VarLabel,
};
use crate::Error;

/// Exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_REFUSED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

/// Default number of admissible samples per grid point (Lyapunov) and of
/// curve samples (KYP sweep).
pub const DEFAULT_SAMPLES: usize = 10_000;
/// Grid points per axis for the Lyapunov constraint sampling.
pub const SAMPLE_GRID: usize = 11;

/// Command-line overrides; they take precedence over the problem file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunOptions {
    pub schedule_cap: Option<u32>,
    pub eps: Option<f64>,
    pub grid: Option<usize>,
    pub seed: Option<u64>,
    pub dump_sdp: bool,
    pub timing: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOutput {
    pub report: Report,
    pub exit_code: i32,
    /// SDPA text of the final solver problem when requested.
    pub sdp_dump: Option<String>,
}

fn status_word(s: SdpStatus) -> &'static str {
    match s {
        SdpStatus::Feasible => "feasible",
        SdpStatus::MarginBelowThreshold => "margin_below_threshold",
        SdpStatus::IterationLimit => "iteration_limit",
    }
}

fn opt_float(v: Option<f64>) -> Value {
    v.map_or(Value::Text("none".into()), Value::Float)
}

fn schedule(s: &Settings, cap_flag: Option<u32>) -> MultiplierSchedule {
    let degrees = s.schedule_degrees.clone().unwrap_or_default();
    let default_cap = degrees.iter().copied().max().unwrap_or(MultiplierSchedule::default().cap);
    MultiplierSchedule {
        degrees: degrees.into_iter().map(Some).collect(),
        bump: 0,
        cap: cap_flag.or(s.schedule_cap).unwrap_or(default_cap),
    }
}

fn pipeline(s: &Settings, opts: &RunOptions) -> PipelineOptions {
    let d = PipelineOptions::default();
    PipelineOptions {
        eps: opts.eps.or(s.eps).unwrap_or(d.eps),
        grid: opts.grid.or(s.grid).unwrap_or(d.grid),
        ..d
    }
}

fn push_attempts(r: &mut Report, attempts: &[Attempt]) {
    r.int("attempts", attempts.len() as i64);
    for (i, a) in attempts.iter().enumerate() {
        let k = |f: &str| format!("attempt.{i}.{f}");
        r.int(k("bump"), a.bump as i64);
        r.push(k("max_degree"), a.max_degree.map_or(Value::Text("none".into()), |d| Value::Int(d as i64)));
        r.text(k("status"), status_word(a.status));
        r.push(k("bound"), opt_float(a.bound));
        r.float(k("margin"), a.margin);
        r.int(k("iterations"), a.iterations as i64);
        r.int(k("arity"), a.arity as i64);
        r.int(k("blocks"), a.blocks as i64);
    }
}

fn theta_spec(t: &ThetaDecl) -> Result<ThetaSpec, KypError> {
    match *t {
        ThetaDecl::ImaginaryAxis => Ok(ThetaSpec::imaginary_axis()),
        ThetaDecl::RealAxis => Ok(ThetaSpec::real_axis()),
        ThetaDecl::Disk(r) => ThetaSpec::disk(r),
        ThetaDecl::Interval(a, b) => ThetaSpec::interval(a, b),
        ThetaDecl::Real(a, b, c) => ThetaSpec::from_real(a, b, c),
    }
}

/// Runs `command` on `problem`. Input errors (invalid domain, dimension
/// mismatch, unsupported target) are reported with exit code 2.
pub fn run(problem: &ProblemFile, command: Target, opts: &RunOptions) -> RunOutput {
    let start = Instant::now();
    let mut report = Report::new();
    report.text("command", command.command());
    let result = match problem.target {
        Some(t) if t != command => Err(format!("problem file declares target {}", t.command())),
        _ => dispatch(problem, command, opts, &mut report).map_err(|e| e.to_string()),
    };
    let (exit_code, sdp_dump) = match result {
        Ok(x) => x,
        Err(msg) => {
            report = Report::new();
            report.text("command", command.command());
            report.text("status", "error");
            report.int("exit_code", EXIT_INPUT as i64);
            report.text("message", msg);
            (EXIT_INPUT, None)
        }
    };
    if opts.timing {
        report.float("wall_time_s", start.elapsed().as_secs_f64());
    }
    RunOutput {
        report,
        exit_code,
        sdp_dump,
    }
}

type Dispatch = Result<(i32, Option<String>), Error>;

fn dispatch(p: &ProblemFile, command: Target, opts: &RunOptions, r: &mut Report) -> Dispatch {
    match (&p.payload, command) {
        (Payload::Objective(g), Target::Polymin | Target::Certify) => {
            let dom = TriangularDomain::new(p.vars.clone(), p.bounds.clone())?;
            run_polymin(g, &dom, p, command, opts, r)
        }
        (Payload::System { a, b, g }, Target::Lyap) => {
            let dom = TriangularDomain::new(p.vars.clone(), p.bounds.clone())?;
            let sys = UncertainSystem::new(a.clone(), b.clone(), g.clone(), dom)?;
            run_lyap(&sys, p, opts, r)
        }
        (Payload::Pencil { m, n, g, theta1, theta2 }, Target::KypCheck) => {
            if !p.vars.is_empty() {
                return Err(KypError::DimMismatch("kyp-check takes constant data and no parameters".into()).into());
            }
            let sys = PencilSystem::single(m.to_constant(), n.to_constant(), g.to_constant())?;
            let t1 = theta_spec(theta1)?;
            let t2 = theta2.as_ref().map(theta_spec).transpose()?;
            run_kyp(&sys, &t1, t2.as_ref(), p, opts, r)
        }
        _ => Err(crate::apps::AppError::Dimension(format!(
            "the problem payload does not fit the command {}",
            command.command()
        ))
        .into()),
    }
}

fn run_polymin(
    g: &crate::poly::ScalarPoly,
    dom: &TriangularDomain,
    p: &ProblemFile,
    command: Target,
    opts: &RunOptions,
    r: &mut Report,
) -> Dispatch {
    let sched = schedule(&p.settings, opts.schedule_cap);
    let pipe = pipeline(&p.settings, opts);
    let out: PolyminOutcome = polymin(g, dom, &sched, &pipe)?;
    let certified = out.certificate.as_ref().is_some_and(|c| c.bound() > 0.0);
    let (status, exit) = match command {
        Target::Certify if certified => ("certified", EXIT_OK),
        Target::Certify => ("refused", EXIT_REFUSED),
        _ if out.bound.is_some() => ("bound", EXIT_OK),
        _ => ("no_bound", EXIT_REFUSED),
    };
    r.text("status", status);
    r.int("exit_code", exit as i64);
    r.push("bound", opt_float(out.bound));
    r.float("eps", pipe.eps);
    r.int("schedule_cap", sched.cap as i64);
    if let Some(c) = &out.certificate {
        r.float("solver_margin", c.solver_margin());
        r.float("grid_worst", c.grid_worst());
    }
    push_attempts(r, &out.attempts);
    if let Some(c) = &out.certificate {
        r.text("cert.kind", "positivity");
        r.int("cert.schedule.bump", c.schedule().bump as i64);
        r.ints("cert.blocks", c.block_sizes().iter().map(|&b| b as i64));
        for m in c.multipliers() {
            let path: String = m.path.iter().map(|b| b.to_string()).collect();
            let key = |f: &str| format!("cert.step.{}.node.{}.{f}", m.step, if path.is_empty() { "root" } else { &path });
            r.text(key("var"), m.var.clone());
            r.int(key("mult_deg"), m.mult_deg as i64);
        }
        r.floats("cert.y", c.solution());
    }
    let dump = if opts.dump_sdp {
        let s = out
            .certificate
            .as_ref()
            .map(|c| c.schedule().clone())
            .unwrap_or_else(|| sched.with_bump(out.attempts.last().map_or(0, |a| a.bump)));
        let (_, lmi) = polymin_attempt(g, dom, &s, &pipe)?;
        let mut c = vec![0.0; lmi.arity()];
        c[0] = 1.0;
        Some(write_sdpa(&maximization_problem(&lmi, &c, pipe.eps, &pipe.solve)))
    } else {
        None
    };
    Ok((exit, dump))
}

fn run_lyap(sys: &UncertainSystem, p: &ProblemFile, opts: &RunOptions, r: &mut Report) -> Dispatch {
    let s = &p.settings;
    let sched = schedule(s, opts.schedule_cap);
    let d = LyapOptions::default();
    let lopts = LyapOptions {
        h_degree: s.h_degree.unwrap_or(d.h_degree),
        eta_degree: s.eta_degree.unwrap_or(d.eta_degree),
        pipeline: pipeline(s, opts),
        ..d
    };
    let samples = s.samples.unwrap_or(DEFAULT_SAMPLES);
    let seed = opts.seed.or(s.seed).unwrap_or(0);
    let outcome = lyap_synthesize_with(sys, &sched, &lopts)?;
    let exit = match &outcome {
        LyapunovOutcome::Certified(cert) => {
            let check = sample_constraint_check(sys, cert.h(), samples, SAMPLE_GRID, seed);
            r.text("status", "certified");
            r.int("exit_code", EXIT_OK as i64);
            r.float("eps", lopts.pipeline.eps);
            r.float("solver_margin", cert.solver_margin().unwrap_or(f64::NAN));
            r.float("h_worst", cert.h_worst());
            r.float("eta_worst", cert.eta_worst());
            r.float("lmi_worst", cert.lmi_worst());
            r.float("sample_max", check.max);
            r.int("samples", check.samples as i64);
            r.int("empty_points", check.empty_points.len() as i64);
            r.int("seed", seed as i64);
            r.text("cert.kind", "lyapunov");
            if let Some(sc) = cert.schedule() {
                r.int("cert.schedule.bump", sc.bump as i64);
            }
            let h = cert.h();
            for i in 0..h.rows() {
                for j in 0..h.cols() {
                    let e = h.entry(i, j).to_real().expect("real certificate");
                    r.text(format!("cert.h.{i}.{j}"), fmt_poly(&e));
                }
            }
            r.text("cert.eta", fmt_poly(cert.eta()));
            EXIT_OK
        }
        LyapunovOutcome::Refused { attempts } => {
            r.text("status", "refused");
            r.int("exit_code", EXIT_REFUSED as i64);
            r.float("eps", lopts.pipeline.eps);
            push_attempts(r, attempts);
            EXIT_REFUSED
        }
    };
    let dump = if opts.dump_sdp {
        let (hp, ep, inputs) = lyap_inequality(sys, &lopts)?;
        let labels = (0..hp.len() + ep.len()).map(VarLabel::Original).collect();
        let sc = match &outcome {
            LyapunovOutcome::Certified(c) => c.schedule().cloned().unwrap_or_else(|| sched.clone()),
            LyapunovOutcome::Refused { attempts } => sched.with_bump(attempts.last().map_or(0, |a| a.bump)),
        };
        let red = reduce_system(&inputs, labels, sys.dom(), &sc, &lopts.pipeline.reduce)?;
        let lmi = red.lmi.embed_real_compact();
        Some(write_sdpa(&feasibility_problem(&lmi, &lopts.pipeline.solve)))
    } else {
        None
    };
    Ok((exit, dump))
}

fn run_kyp(
    sys: &PencilSystem,
    t1: &ThetaSpec,
    t2: Option<&ThetaSpec>,
    p: &ProblemFile,
    opts: &RunOptions,
    r: &mut Report,
) -> Dispatch {
    let pipe = pipeline(&p.settings, opts);
    let samples = p.settings.samples.unwrap_or(DEFAULT_SAMPLES);
    let lmi = kyp_lmi(sys, t1, t2)?.embed_real();
    let solver = InteriorPoint::new(pipe.solve.ipm.clone());
    let sol = solve_feasible_with(&lmi, pipe.eps, &pipe.solve, &solver);
    let sweep = fdi_sweep(sys, t1, t2, samples)?;
    let feasible = sol.is_feasible();
    let exit = if feasible { EXIT_OK } else { EXIT_REFUSED };
    r.text("status", if feasible { "feasible" } else { "infeasible" });
    r.int("exit_code", exit as i64);
    r.float("eps", pipe.eps);
    r.text("lmi_status", status_word(sol.status));
    r.float("lmi_margin", sol.margin);
    r.int("iterations", sol.iterations as i64);
    r.float("sweep_margin", sweep.margin);
    r.int("sweep_points", sweep.points as i64);
    r.text("consistent", if !feasible || sweep.margin > 0.0 { "yes" } else { "no" });
    r.floats("cert.y", &sol.y);
    let dump = opts.dump_sdp.then(|| write_sdpa(&feasibility_problem(&lmi, &pipe.solve)));
    Ok((exit, dump))
}
