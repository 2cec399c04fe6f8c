use std::io::Write;

use deautoconv::io::{self, DataFile, Report};
use deautoconv::{
    autoconvolve, best_y, check_pythagoras_w, check_pythagoras_y, experiment, hessian,
    kuhn_tucker_check, multi_start, objective, pad_to_odd, update_step, Error, Observations,
    PythagorasReport, Signal, SolverConfig,
};

use crate::{AutoconvArgs, CheckArgs, Mode, SimulateArgs, SolveArgs, EXIT_KT_VIOLATION};

type Outcome = Result<u8, Error>;

fn load_observations(path: &std::path::Path, format: Option<io::DataFormat>) -> Result<Observations, Error> {
    let raw = io::read_observations(path, format)?;
    let (y, padded) = pad_to_odd(&raw)?;
    if padded {
        eprintln!(
            "warning: y has even length {}; appended y[{}] = 0 to reach odd length",
            raw.len(),
            raw.len()
        );
    }
    Ok(y)
}

fn emit(text: &str, path: Option<&std::path::Path>) -> Result<(), Error> {
    match path {
        Some(p) => io::write_atomic(p, text.as_bytes()),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Error::Io {
                    path: "<stdout>".into(),
                    source: e,
                })
        }
    }
}

pub fn solve(args: SolveArgs) -> Outcome {
    let y = load_observations(&args.input, args.format.resolve())?;
    let cfg = SolverConfig {
        max_iters: args.iters,
        tol_step: args.tol_step,
        tol_grad: args.tol_grad,
        init: args.init.into_policy()?,
        seed: args.seed,
        n_starts: args.starts,
        record_trace: args.trace.is_some(),
        record_x_snapshots: args.snapshots,
        hessian_spectrum: args.hessian,
        ..SolverConfig::default()
    };
    let res = multi_start(&y, &cfg)?;
    let report = if cfg.n_starts == 1 {
        Report::from_run(res.best(), &y, &cfg)
    } else {
        Report::from_multi(&res, &y, &cfg)
    };
    if let Some(path) = &args.trace {
        io::write_trace(&res.best().trace, path)?;
    }
    emit(&report.to_json(), args.report.as_deref())?;

    if res.disagreement {
        eprintln!(
            "warning: starts disagree: final divergences spread by {:e}; some starts stopped at a non-optimal point",
            res.agreement
        );
    }
    if res.best().kt.pass {
        Ok(0)
    } else {
        eprintln!(
            "warning: returned point fails the Kuhn-Tucker check (stop reason: {}); try a larger --iters or a smaller --tol-step",
            res.best().stop_reason.as_str()
        );
        Ok(EXIT_KT_VIOLATION)
    }
}

pub fn simulate(args: SimulateArgs) -> Outcome {
    let file = match args.mode {
        Mode::Exact => {
            let (x_true, y) = experiment::exact_model(args.m, args.seed);
            DataFile {
                name: Some(format!("exact-m{}-seed{}", args.m, args.seed)),
                y: y.as_slice().to_vec(),
                x_true: Some(x_true.into_vec()),
            }
        }
        Mode::Random => DataFile {
            name: Some(format!("random-m{}-seed{}", args.m, args.seed)),
            y: experiment::random_data(args.m, args.seed).as_slice().to_vec(),
            x_true: None,
        },
    };
    let mut text = serde_json::to_string_pretty(&file).expect("data file serializes");
    text.push('\n');
    emit(&text, args.out.as_deref())?;
    Ok(0)
}

fn num(v: f64) -> String {
    if v != 0.0 && v.is_finite() && (v.abs() < 1e-4 || v.abs() >= 1e15) {
        format!("{v:e}")
    } else {
        v.to_string()
    }
}

fn fmt_vec(v: &[f64]) -> String {
    v.iter().map(|&x| num(x)).collect::<Vec<_>>().join(",")
}

fn fmt_pythagoras(r: &PythagorasReport) -> String {
    match r.residual {
        Some(res) => format!(
            "{res:e} (total {}, parts {} + {})",
            num(r.total),
            num(r.first),
            num(r.second)
        ),
        None => "infinite divergence, no residual".to_string(),
    }
}

pub fn check(args: CheckArgs) -> Outcome {
    let y = load_observations(&args.input, args.format.resolve())?;
    let x = Signal::new(io::read_vector(&args.x, None)?)?;
    let divergence = objective(&y, &x)?;
    let kt = kuhn_tucker_check(&y, &x, args.tol_grad, SolverConfig::default().zero_threshold * y.c())?;

    let mut out = String::new();
    out.push_str(&format!("m: {}\nc: {}\n", y.m(), num(y.c())));
    out.push_str(&format!("divergence: {}\n", num(divergence)));
    out.push_str(&format!("gradient: {}\n", fmt_vec(&kt.gradient)));
    let status: Vec<&str> = kt.status.iter().map(|s| s.as_str()).collect();
    out.push_str(&format!("kt_status: {}\n", status.join(",")));
    out.push_str(&format!("kt_tolerance: {}\n", num(kt.tolerance)));
    out.push_str(&format!("kt_pass: {}\n", kt.pass));

    match best_y(&x, &y) {
        Ok(y_star) => {
            // Y-identity against the next iterate, W-identity against x itself.
            let next = update_step(&y, &x)?;
            let py = check_pythagoras_y(&y_star, &next)?;
            let pw = check_pythagoras_w(&y_star, &x)?;
            out.push_str(&format!("pythagoras_y_residual: {}\n", fmt_pythagoras(&py)));
            out.push_str(&format!("pythagoras_w_residual: {}\n", fmt_pythagoras(&pw)));
            let fallback = check_pythagoras_y(&y_star, &x)?.second;
            out.push_str(&format!("fallback_residual: {:e}\n", (fallback - divergence).abs()));
        }
        Err(e) => out.push_str(&format!("pythagoras: not available ({e})\n")),
    }
    match hessian(&y, &x) {
        Ok(h) => {
            let s = h.spectrum();
            out.push_str(&format!(
                "hessian_eigenvalues: min {} max {}\nhessian_positive_definite: {}\n",
                num(s.min_eigenvalue),
                num(s.max_eigenvalue),
                s.positive_definite
            ));
        }
        Err(e) => out.push_str(&format!("hessian: not available ({e})\n")),
    }
    emit(&out, None)?;
    Ok(if kt.pass { 0 } else { EXIT_KT_VIOLATION })
}

pub fn autoconv(args: AutoconvArgs) -> Outcome {
    let x = Signal::new(io::read_vector(&args.input, args.format.resolve())?)?;
    let mut out = String::new();
    for v in autoconvolve(&x) {
        out.push_str(&format!("{v}\n"));
    }
    emit(&out, None)?;
    Ok(0)
}
