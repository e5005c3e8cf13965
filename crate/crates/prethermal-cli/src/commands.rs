use std::fs;
use std::path::PathBuf;

use rayon::prelude::*;

use prethermal::arithmetic::{check_subadditivity, random_intvec_pairs, Penalty, SuppressionClass};
use prethermal::drives::{fibonacci_word, random_block_signs, rmd_sequence, thue_morse_word, StepSequence};
use prethermal::evolve::{basis_state, build_chain, evolve_step_drive, heating_time, ChainSpec, Coupling, HeatingTime};
use prethermal::fer::{dressed_slope, dressed_spectrum, plotting_axis, sigma_y_dominance, FerState, SPECTRAL_FLOOR};
use prethermal::flow::{build_plan, np_exponent, np_point};
use prethermal::io::{fmt_f64, read_sequence, write_envelope, write_loglog, write_spectrum, Table};
use prethermal::linres::{lrt_exponent, lrt_point};
use prethermal::spectra::{
    binned_median_envelope, bins_for_resolution, dft, fit_power_law, fit_suppression_class, ClassForm,
    DEFAULT_BINS_PER_DECADE, DEFAULT_OMEGA_MAX, RANDOM_SIGN_TRIM,
};
use prethermal::validate::{self, fer_ladder, CriterionReport, LABEL_SEED};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::RunConfig;
use crate::error::{config_err, CliError, CliResult};

/// Output directory that remembers what was written to it.
pub struct Output {
    pub dir: PathBuf,
    pub files: Vec<String>,
}

impl Output {
    pub fn new(dir: &str) -> CliResult<Output> {
        let dir = PathBuf::from(dir);
        fs::create_dir_all(&dir).map_err(|source| CliError::Io { path: dir.display().to_string(), source })?;
        Ok(Output { dir, files: vec![] })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> CliResult<()> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
        if !self.files.iter().any(|f| f == name) {
            self.files.push(name.to_string());
        }
        Ok(())
    }
}

pub const MANIFEST: &str = "manifest.txt";

/// Writes the run manifest: tool, version, config hash, resolved config and status.
pub fn write_manifest(out: &mut Output, cfg: &RunConfig, status: &str) -> CliResult<()> {
    let outputs: Vec<&str> = out.files.iter().map(String::as_str).filter(|f| *f != MANIFEST).collect();
    let text = format!(
        "tool = prethermal\nversion = {}\nconfig_hash = {}\n{}status = {status}\noutputs = {}\n",
        env!("CARGO_PKG_VERSION"),
        cfg.hash(),
        cfg.canonical(),
        outputs.join(" ")
    );
    out.write(MANIFEST, &text)
}

pub fn read_file(path: &str) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_string(), source })
}

/// Builds the configured step sequence; the flag reports random block signs.
fn sequence(cfg: &RunConfig, tm_depth: u32, rmd_log2: u32) -> CliResult<(StepSequence, bool)> {
    Ok(match cfg.str("drive") {
        "thue-morse" => (thue_morse_word(tm_depth)?, false),
        "fibonacci" => (fibonacci_word(cfg.u32("iters")?)?, false),
        "rmd" => {
            let r = cfg.u32("r")?;
            if r == 0 || r > rmd_log2 {
                return config_err(format!("rmd order r = {r} must lie in 1..={rmd_log2}"));
            }
            let blocks = random_block_signs(1usize << (rmd_log2 - r), cfg.u64("seed")?);
            (rmd_sequence(r, &blocks)?, true)
        }
        "custom" => {
            let path = cfg.str("input");
            if path.is_empty() {
                return config_err("the custom drive needs an input file");
            }
            (read_sequence(&read_file(path)?, 1.0)?, false)
        }
        other => return config_err(format!("unknown drive '{other}'")),
    })
}

fn trim_fraction(cfg: &RunConfig, random: bool) -> CliResult<f64> {
    if cfg.str("trim") == "auto" {
        return Ok(if random { RANDOM_SIGN_TRIM } else { 0.0 });
    }
    let t = cfg.f64("trim")?;
    if !(0.0..1.0).contains(&t) {
        return config_err(format!("trim must lie in [0, 1), got {t}"));
    }
    Ok(t)
}

pub fn suppression_class(cfg: &RunConfig) -> CliResult<SuppressionClass> {
    let b = cfg.f64("b")?;
    let class = match cfg.str("class") {
        "poly" => SuppressionClass::Poly(b),
        "quasipoly" => SuppressionClass::Quasipoly(b),
        "stretch" | "stretch-expt" => SuppressionClass::StretchExpt(b),
        other => return config_err(format!("unknown class '{other}' (poly | quasipoly | stretch)")),
    };
    Ok(class)
}

pub fn spectrum(cfg: &RunConfig, out: &mut Output) -> CliResult<()> {
    let (seq, random) = sequence(cfg, cfg.u32("depth")?, cfg.u32("length_log2")?)?;
    let spec = dft(&seq, true)?;
    let omega_max = cfg.f64("omega_max")?;
    let bins = match cfg.usize("bins")? {
        0 => bins_for_resolution(&spec, omega_max, DEFAULT_BINS_PER_DECADE),
        b => b,
    };
    let env = binned_median_envelope(&spec, omega_max, bins)?.trimmed(trim_fraction(cfg, random)?, SPECTRAL_FLOOR);
    let fit = fit_power_law(&env)?;
    let mut fits = Table::new(&["form", "parameter", "rms_residual", "at_boundary"]);
    fits.push(vec!["power".into(), fmt_f64(fit.slope), fmt_f64(fit.rms_residual), "0".into()]);
    println!("length = {}", seq.len());
    println!("bins = {}", env.points.len());
    println!("slope = {}", fmt_f64(fit.slope));
    for (name, form) in [("poly", ClassForm::Poly), ("quasipoly", ClassForm::Quasipoly), ("stretch", ClassForm::StretchExpt)] {
        match fit_suppression_class(&env, form) {
            Ok(c) => {
                println!("{name}: b = {} rms = {}", fmt_f64(c.b_hat), fmt_f64(c.rms_residual));
                fits.push(vec![name.into(), fmt_f64(c.b_hat), fmt_f64(c.rms_residual), u8::from(c.at_boundary).to_string()]);
            }
            Err(e) => println!("{name}: unavailable ({e})"),
        }
    }
    out.write("spectrum.csv", &write_spectrum(&spec))?;
    out.write("envelope.csv", &write_envelope(&env))?;
    out.write("envelope_loglog.dat", &write_loglog(&env))?;
    out.write("fits.csv", &fits.to_csv())
}

fn series_csv(state: &FerState) -> String {
    let mut t = Table::new(&["n", "c0", "cx", "cy", "cz"]);
    for (n, h) in state.v.iter().enumerate() {
        t.push_f64(&[n as f64, h.c0, h.cx, h.cy, h.cz]);
    }
    t.to_csv()
}

pub fn fer(cfg: &RunConfig, out: &mut Output) -> CliResult<()> {
    let (seq, random) = sequence(cfg, cfg.u32("depth")?, cfg.u32("length_log2")?)?;
    let seq = seq.with_dt(cfg.f64("dt")?)?;
    let trim = if random { RANDOM_SIGN_TRIM } else { 0.0 };
    let states = fer_ladder(&seq, cfg.f64("J")?, cfg.f64("g")?, cfg.usize("q_max")?)?;
    let mut summary = Table::new(&["q", "axis", "slope", "max_drive_norm", "sigma_y_dominance"]);
    for s in &states {
        let axis = plotting_axis(s.q);
        let spec = dressed_spectrum(s, axis)?;
        let slope = dressed_slope(s, axis, DEFAULT_OMEGA_MAX, DEFAULT_BINS_PER_DECADE, trim).map(|f| f.slope);
        let slope_text = slope.as_ref().map_or_else(|_| "nan".to_string(), |v| fmt_f64(*v));
        println!("q = {} axis = {} slope = {slope_text} max_drive_norm = {}", s.q, axis.name(), fmt_f64(s.max_drive_norm()));
        summary.push(vec![
            s.q.to_string(),
            axis.name().into(),
            slope_text,
            fmt_f64(s.max_drive_norm()),
            fmt_f64(sigma_y_dominance(s)),
        ]);
        out.write(&format!("fer_q{}_series.csv", s.q), &series_csv(s))?;
        out.write(&format!("fer_q{}_spectrum_{}.csv", s.q, axis.name()), &write_spectrum(&spec))?;
    }
    out.write("fer_summary.csv", &summary.to_csv())
}

pub fn linres(cfg: &RunConfig, out: &mut Output) -> CliResult<()> {
    let class = suppression_class(cfg)?;
    let (j, g, tol) = (cfg.f64("J")?, cfg.f64("g")?, cfg.f64("tol")?);
    let points = cfg
        .sweep("lambda_sweep")?
        .par_iter()
        .map(|&l| lrt_point(class, j, g, l, tol))
        .collect::<prethermal::Result<Vec<_>>>()?;
    let mut t = Table::new(&["lambda", "rate_quadrature", "rate_laplace", "omega0", "phi0", "ln_tau_star"]);
    for p in &points {
        t.push_f64(&[p.lambda, p.ln_rate_quadrature.exp(), p.ln_rate_laplace.exp(), p.omega0, p.phi0, p.ln_tau_star]);
    }
    match lrt_exponent(class, &points) {
        Ok(e) if points.len() >= 4 => println!("exponent = {}", fmt_f64(e)),
        Ok(_) => println!("exponent = unavailable (need at least 4 sweep points)"),
        Err(e) => println!("exponent = unavailable ({e})"),
    }
    out.write("linres.csv", &t.to_csv())
}

pub fn flow(cfg: &RunConfig, out: &mut Output) -> CliResult<()> {
    let class = suppression_class(cfg)?;
    let (kappa0, j, c) = (cfg.f64("kappa0")?, cfg.f64("J")?, cfg.f64("c")?);
    let lambdas = cfg.sweep("lambda_sweep")?;
    let points =
        lambdas.par_iter().map(|&l| np_point(class, kappa0, j, l, c)).collect::<prethermal::Result<Vec<_>>>()?;
    let plan = build_plan(class, kappa0, j, lambdas[0], c)?;
    println!("lambda_min = {}", fmt_f64(plan.lambda_min));
    for (name, value) in plan.constants.named() {
        println!("{name} = {}", fmt_f64(value));
    }
    let mut t = Table::new(&["lambda", "q_star", "ln_tau_star", "valid"]);
    for p in &points {
        t.push(vec![
            fmt_f64(p.lambda),
            p.q_star.to_string(),
            p.ln_tau_star.map_or_else(|| "nan".to_string(), fmt_f64),
            u8::from(p.valid).to_string(),
        ]);
    }
    let valid = points.iter().filter(|p| p.valid).count();
    println!("valid_points = {valid} of {}", points.len());
    match np_exponent(class, &points) {
        Ok(e) => println!("exponent = {}", fmt_f64(e)),
        Err(e) => println!("exponent = unavailable ({e})"),
    }
    out.write("flow.csv", &t.to_csv())
}

pub fn evolve(cfg: &RunConfig, out: &mut Output) -> CliResult<()> {
    let spec = ChainSpec {
        l: cfg.usize("L")?,
        d_terms: vec![(Coupling::Zz, cfg.f64("zz")?), (Coupling::FieldZ, cfg.f64("hz")?), (Coupling::FieldX, cfg.f64("hx")?)],
        g: cfg.f64("g")?,
        periodic: cfg.bool("periodic")?,
    };
    let chain = build_chain(spec)?;
    let steps = cfg.u32("steps_log2")?;
    let (seq, _) = sequence(cfg, steps, steps)?;
    let psi = basis_state(chain.spec.dim(), cfg.usize("initial")?)?;
    let traj = evolve_step_drive(&chain, &seq, cfg.f64("dt")?, &psi, cfg.usize("record_every")?)?;
    let mut t = Table::new(&["t", "energy_density"]);
    for (time, e) in traj.times.iter().zip(&traj.energy_density) {
        t.push_f64(&[*time, *e]);
    }
    println!("steps = {}", seq.len());
    println!("e_initial = {}", fmt_f64(traj.energy_density[0]));
    println!("e_infinity = {}", fmt_f64(traj.e_infinity));
    println!("max_norm_drift = {}", fmt_f64(traj.max_norm_drift));
    match heating_time(&traj, cfg.f64("threshold")?)? {
        HeatingTime::Reached(t) => println!("heating_time = {}", fmt_f64(t)),
        HeatingTime::NotReached => println!("heating_time = not-reached"),
    }
    out.write("evolve.csv", &t.to_csv())
}

fn criterion_ids(cfg: &RunConfig) -> CliResult<Vec<u8>> {
    let raw = cfg.str("only");
    if raw == "all" {
        return Ok((1..=validate::CRITERIA_COUNT).collect());
    }
    raw.split(',')
        .map(|s| match s.trim().parse::<u8>() {
            Ok(id) if validate::criterion_name(id).is_some() => Ok(id),
            _ => config_err(format!("unknown criterion '{s}' (1..={})", validate::CRITERIA_COUNT)),
        })
        .collect()
}

/// Fails with the first failing criterion, after every report has been printed.
pub fn first_failure(reports: &[CriterionReport]) -> CliResult<()> {
    match reports.iter().find(|r| !r.passed) {
        Some(r) => Err(CliError::Criterion { id: r.id, name: r.name, detail: r.detail.clone() }),
        None => Ok(()),
    }
}

pub fn check(cfg: &RunConfig, out: &mut Output) -> CliResult<()> {
    let ids = criterion_ids(cfg)?;
    let reports: Vec<CriterionReport> =
        ids.par_iter().map(|&id| validate::run_criterion(id).expect("ids validated")).collect();
    let mut text = String::new();
    for r in &reports {
        println!("{r}");
        text.push_str(&format!("{r}\n"));
    }
    out.write("check.txt", &text)?;
    let penalty = Penalty::QfNormAlpha(2.0);
    let search = check_subadditivity(&penalty, random_intvec_pairs(ChaCha8Rng::seed_from_u64(LABEL_SEED), 2, 5), 10)?;
    let mut csv = String::from("family,label1,label2,lhs,rhs\n");
    if let Some(row) = search.csv_row(&penalty) {
        csv.push_str(&row);
        csv.push('\n');
    }
    out.write("counterexamples.csv", &csv)?;
    first_failure(&reports)
}
