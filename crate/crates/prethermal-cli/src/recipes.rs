//! Named recipes: regenerate one figure or table and check its criterion.

use rayon::prelude::*;

use prethermal::arithmetic::SuppressionClass;
use prethermal::drives::{fibonacci_word, thue_morse_word};
use prethermal::fer::{block_expansion, mori_magnus_terms, Su2Operator, DEFAULT_DT_FIT};
use prethermal::flow::{np_exponent, np_point, DEFAULT_STRETCH_C};
use prethermal::io::{fmt_f64, write_envelope, write_loglog, Table};
use prethermal::linres::lrt_exponent;
use prethermal::spectra::{fit_power_law, fit_suppression_class, ClassForm};
use prethermal::validate::{
    self, fer_loss_series, lrt_default_lambdas, lrt_sweep, np_default_lambdas, rmd_fixture, sequence_envelope, RMD_SEED,
};

use crate::commands::{first_failure, Output};
use crate::error::CliResult;

pub const RECIPES: [&str; 6] = ["fig-fibonacci", "fig-thuemorse", "fig-fer-loss", "table1-lrt", "table1-np", "fig-mori-magnus"];

pub fn criterion_for(name: &str) -> Option<u8> {
    Some(match name {
        "fig-fibonacci" => 3,
        "fig-thuemorse" => 5,
        "fig-fer-loss" => 9,
        "table1-lrt" => 7,
        "table1-np" => 8,
        "fig-mori-magnus" => 11,
        _ => return None,
    })
}

fn class_label(class: SuppressionClass) -> String {
    format!("{}{}", class.name(), class.b())
}

fn fig_fibonacci(out: &mut Output) -> CliResult<()> {
    let env = sequence_envelope(&fibonacci_word(20)?, false)?;
    let fit = fit_power_law(&env)?;
    println!("slope = {}", fmt_f64(fit.slope));
    out.write("fibonacci_envelope.csv", &write_envelope(&env))?;
    out.write("fibonacci_loglog.dat", &write_loglog(&env))
}

fn fig_thuemorse(out: &mut Output) -> CliResult<()> {
    let env = sequence_envelope(&thue_morse_word(14)?, false)?;
    let mut fits = Table::new(&["form", "parameter", "rms_residual"]);
    for (name, form) in [("poly", ClassForm::Poly), ("quasipoly", ClassForm::Quasipoly), ("stretch", ClassForm::StretchExpt)] {
        let c = fit_suppression_class(&env, form)?;
        println!("{name}: b = {} rms = {}", fmt_f64(c.b_hat), fmt_f64(c.rms_residual));
        fits.push(vec![name.into(), fmt_f64(c.b_hat), fmt_f64(c.rms_residual)]);
    }
    out.write("thuemorse_envelope.csv", &write_envelope(&env))?;
    out.write("thuemorse_fits.csv", &fits.to_csv())?;
    for r in 1..=4 {
        let env = sequence_envelope(&rmd_fixture(r, 14, RMD_SEED)?, true)?;
        out.write(&format!("rmd{r}_envelope.csv"), &write_envelope(&env))?;
    }
    Ok(())
}

fn fig_fer_loss(out: &mut Output) -> CliResult<()> {
    let mut t = Table::new(&["q", "slope", "max_drive_norm"]);
    for (q, slope, norm) in fer_loss_series(2)? {
        println!("q = {q} slope = {} max_drive_norm = {}", fmt_f64(slope), fmt_f64(norm));
        t.push_f64(&[q as f64, slope, norm]);
    }
    out.write("fer_loss.csv", &t.to_csv())
}

const TABLE_CLASSES: [SuppressionClass; 3] =
    [SuppressionClass::Poly(2.0), SuppressionClass::Quasipoly(2.0), SuppressionClass::StretchExpt(1.0)];

fn table1_lrt(out: &mut Output) -> CliResult<()> {
    let mut summary = Table::new(&["class", "b", "exponent"]);
    for class in TABLE_CLASSES {
        let points = lrt_sweep(class, &lrt_default_lambdas(class))?;
        let e = lrt_exponent(class, &points)?;
        println!("{}: exponent = {}", class_label(class), fmt_f64(e));
        summary.push(vec![class.name().into(), fmt_f64(class.b()), fmt_f64(e)]);
        let mut t = Table::new(&["lambda", "rate_quadrature", "rate_laplace", "omega0", "phi0", "ln_tau_star"]);
        for p in &points {
            t.push_f64(&[p.lambda, p.ln_rate_quadrature.exp(), p.ln_rate_laplace.exp(), p.omega0, p.phi0, p.ln_tau_star]);
        }
        out.write(&format!("linres_{}.csv", class_label(class)), &t.to_csv())?;
    }
    out.write("table1_lrt.csv", &summary.to_csv())
}

fn table1_np(out: &mut Output) -> CliResult<()> {
    let mut summary = Table::new(&["class", "b", "exponent"]);
    for class in [SuppressionClass::Poly(3.0), SuppressionClass::StretchExpt(1.0), SuppressionClass::Quasipoly(2.0)] {
        let points = np_default_lambdas(class)
            .par_iter()
            .map(|&l| np_point(class, 1.0, 1.0, l, DEFAULT_STRETCH_C))
            .collect::<prethermal::Result<Vec<_>>>()?;
        let e = np_exponent(class, &points)?;
        println!("{}: exponent = {}", class_label(class), fmt_f64(e));
        summary.push(vec![class.name().into(), fmt_f64(class.b()), fmt_f64(e)]);
        let mut t = Table::new(&["lambda", "q_star", "ln_tau_star", "valid"]);
        for p in &points {
            t.push(vec![
                fmt_f64(p.lambda),
                p.q_star.to_string(),
                p.ln_tau_star.map_or_else(|| "nan".to_string(), fmt_f64),
                u8::from(p.valid).to_string(),
            ]);
        }
        out.write(&format!("flow_{}.csv", class_label(class)), &t.to_csv())?;
    }
    out.write("table1_np.csv", &summary.to_csv())
}

fn fig_mori_magnus(out: &mut Output) -> CliResult<()> {
    let d = Su2Operator::new(0.0, 0.0, 0.0, 1.0);
    let v = Su2Operator::new(0.0, 0.3, 0.0, 0.0);
    let table = mori_magnus_terms(&d, &v, 4, 2, &DEFAULT_DT_FIT)?;
    let mut t = Table::new(&["r", "m", "c0", "cx", "cy", "cz", "direct_c0", "direct_cx", "direct_cy", "direct_cz"]);
    for r in 1..=4u32 {
        let direct = block_expansion(&d, &v, r, 1.0, &DEFAULT_DT_FIT, table.degree)?;
        for m in 0..=2usize.min(r as usize - 1) {
            let h = table.get(r, m).expect("entry present");
            let row: Vec<f64> = [f64::from(r), m as f64].into_iter().chain(h.coefficients()).chain(direct[m].coefficients()).collect();
            t.push_f64(&row);
        }
    }
    out.write("mori_magnus.csv", &t.to_csv())
}

pub fn run(name: &str, out: &mut Output) -> CliResult<()> {
    match name {
        "fig-fibonacci" => fig_fibonacci(out)?,
        "fig-thuemorse" => fig_thuemorse(out)?,
        "fig-fer-loss" => fig_fer_loss(out)?,
        "table1-lrt" => table1_lrt(out)?,
        "table1-np" => table1_np(out)?,
        "fig-mori-magnus" => fig_mori_magnus(out)?,
        other => return crate::error::config_err(format!("unknown recipe '{other}'")),
    }
    let id = criterion_for(name).expect("recipe has a criterion");
    let report = validate::run_criterion(id).expect("criterion exists");
    println!("{report}");
    out.write("criterion.txt", &format!("{report}\n"))?;
    first_failure(&[report])
}
