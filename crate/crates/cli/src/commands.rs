use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use clap::Args;
use josephson_core::equilibrium::critical_beta;
use josephson_core::lattice::{cesaro_average, initial_state, Dynamics, LatticeSpec};
use josephson_core::{
    current_report, gap_residual, solve_gap, Error, JunctionParams, NessSolver, NessState,
    PlateParams, Result as CoreResult,
};
use rayon::prelude::*;

use crate::config::{JunctionArgs, SweepArgs, SweepConfig, SweepVariable};
use crate::error::CliError;

pub fn num(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

fn writer(path: Option<&Path>) -> Result<csv::Writer<Box<dyn Write>>, CliError> {
    let sink: Box<dyn Write> = match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(sink))
}

#[derive(Debug, Clone, Args)]
pub struct EquilibriumArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub epsilon: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub beta: f64,
    /// Phase of the order field; the reported magnitudes do not depend on it.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub phi: f64,
}

pub fn equilibrium(args: &EquilibriumArgs) -> Result<(), CliError> {
    if !args.phi.is_finite() {
        return Err(CliError::Usage(format!(
            "phi must be finite, got {}",
            args.phi
        )));
    }
    let p = PlateParams::new(args.epsilon, args.beta)?;
    let beta_c = critical_beta(p.epsilon())?;
    let state = josephson_core::equilibrium_state(&p, args.phi);
    let mut w = writer(None)?;
    w.write_record(["epsilon", "beta", "beta_c", "lambda", "k", "gap_residual"])?;
    w.write_record([
        num(p.epsilon()),
        num(p.beta()),
        beta_c.map_or_else(|| "none".to_string(), num),
        num(solve_gap(&p)),
        num(state.k),
        num(gap_residual(&p, state.order.lambda())),
    ])?;
    w.flush()?;
    Ok(())
}

const NESS_HEADER: [&str; 19] = [
    "epsilon_i",
    "epsilon_ii",
    "beta_i",
    "beta_ii",
    "gamma",
    "phi_i",
    "phi_ii",
    "lambda_i",
    "lambda_ii",
    "lambda_tilde_i",
    "lambda_tilde_ii",
    "phi_tilde_i",
    "phi_tilde_ii",
    "josephson",
    "heat_limit",
    "heat_amplitude",
    "entropy_e1",
    "iterations",
    "residual",
];

pub fn ness(args: &JunctionArgs, output: Option<&Path>) -> Result<(), CliError> {
    let file = args.file_config()?;
    let p = args.resolve(&file)?;
    let st = NessSolver::default().solve(&p)?;
    let r = current_report(&st);
    let mut w = writer(output.or(file.output.as_deref()))?;
    w.write_record(NESS_HEADER)?;
    let mut row = vec![
        num(p.plate_i.epsilon()),
        num(p.plate_ii.epsilon()),
        num(p.plate_i.beta()),
        num(p.plate_ii.beta()),
        num(p.gamma()),
        num(p.phi_i()),
        num(p.phi_ii()),
    ];
    row.extend(
        [
            st.bulk_i.lambda(),
            st.bulk_ii.lambda(),
            st.surf_i.lambda(),
            st.surf_ii.lambda(),
            st.surf_i.phi(),
            st.surf_ii.phi(),
            r.josephson,
            r.heat_limit,
            r.heat_amplitude,
            r.entropy_e1,
        ]
        .map(num),
    );
    row.push(st.iterations.to_string());
    row.push(num(st.residual));
    w.write_record(&row)?;
    w.flush()?;
    Ok(())
}

fn sweep_header(variable: SweepVariable) -> Vec<&'static str> {
    vec![
        variable.name(),
        "lambda_i",
        "lambda_ii",
        "lambda_tilde_i",
        "lambda_tilde_ii",
        "phi_tilde_i",
        "phi_tilde_ii",
        "josephson",
        "heat_amplitude",
        "iterations",
        "residual",
        "failed",
    ]
}

fn sweep_row(x: f64, params: &JunctionParams, outcome: &CoreResult<NessState>) -> Vec<String> {
    match outcome {
        Ok(st) => {
            let r = current_report(st);
            let mut row: Vec<String> = [
                x,
                st.bulk_i.lambda(),
                st.bulk_ii.lambda(),
                st.surf_i.lambda(),
                st.surf_ii.lambda(),
                st.surf_i.phi(),
                st.surf_ii.phi(),
                r.josephson,
                r.heat_amplitude,
            ]
            .map(num)
            .to_vec();
            row.extend([st.iterations.to_string(), num(st.residual), "false".into()]);
            row
        }
        Err(e) => {
            let eq = |plate, phi| josephson_core::equilibrium_state(plate, phi).order.lambda();
            let (iterations, residual, si, sii) = match e {
                Error::NonConvergence {
                    iterations,
                    residual,
                    surf_i,
                    surf_ii,
                } => (*iterations, *residual, *surf_i, *surf_ii),
                _ => (0, f64::NAN, f64::NAN.into(), f64::NAN.into()),
            };
            let (fi, fii) = (
                josephson_core::OrderField::new(si),
                josephson_core::OrderField::new(sii),
            );
            let mut row: Vec<String> = [
                x,
                eq(&params.plate_i, params.phi_i()),
                eq(&params.plate_ii, params.phi_ii()),
                si.norm(),
                sii.norm(),
                fi.phi(),
                fii.phi(),
                f64::NAN,
                f64::NAN,
            ]
            .map(num)
            .to_vec();
            row.extend([iterations.to_string(), num(residual), "true".into()]);
            row
        }
    }
}

/// Runs the sweep and returns the rows in sweep order.
pub fn sweep_rows(config: &SweepConfig) -> Result<Vec<Vec<String>>, CliError> {
    let xs = config.points();
    let params = xs
        .iter()
        .map(|&x| config.params_at(x))
        .collect::<Result<Vec<_>, _>>()?;
    let solver = NessSolver::default();
    let outcomes: Vec<CoreResult<NessState>> = match config.variable {
        // each point seeds the next
        SweepVariable::Gamma => solver.continue_in_gamma(&config.junction, &xs),
        _ => params.par_iter().map(|p| solver.solve(p)).collect(),
    };
    Ok(xs
        .iter()
        .zip(&params)
        .zip(&outcomes)
        .map(|((&x, p), o)| sweep_row(x, p, o))
        .collect())
}

pub fn sweep(junction: &JunctionArgs, args: &SweepArgs) -> Result<(), CliError> {
    let config = SweepConfig::resolve(junction, args)?;
    let rows = sweep_rows(&config)?;
    let failed = rows
        .iter()
        .filter(|r| r.last().is_some_and(|f| f == "true"))
        .count();
    let mut w = writer(config.output.as_deref())?;
    w.write_record(sweep_header(config.variable))?;
    for row in &rows {
        w.write_record(row)?;
    }
    w.flush()?;
    if failed > 0 {
        eprintln!(
            "warning: {failed} of {} sweep points did not converge",
            rows.len()
        );
    }
    Ok(())
}

#[derive(Debug, Clone, Args)]
pub struct EvolveArgs {
    /// Plates are n x n lattices, n <= 2.
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    #[arg(long, default_value_t = 1000.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 10_000)]
    pub steps: usize,
    #[arg(long)]
    pub output: Option<std::path::PathBuf>,
}

pub fn evolve(junction: &JunctionArgs, args: &EvolveArgs) -> Result<(), CliError> {
    let file = junction.file_config()?;
    let spec = LatticeSpec::new(args.n, junction.resolve(&file)?)?;
    let traj = Dynamics::new(&spec, &initial_state(&spec))?.trajectory(args.t_max, args.steps)?;
    let averages = cesaro_average(&traj)?;
    let mut w = writer(args.output.as_deref().or(file.output.as_deref()))?;
    let mut header = vec!["time".to_string()];
    header.extend(traj.names.iter().cloned());
    w.write_record(&header)?;
    for (k, &t) in traj.times.iter().enumerate() {
        let mut row = vec![num(t)];
        row.extend(traj.columns.iter().map(|c| num(c[k])));
        w.write_record(&row)?;
    }
    let mut avg = vec!["cesaro_average".to_string()];
    avg.extend(averages.iter().map(|(_, v)| num(*v)));
    w.write_record(&avg)?;
    let mut drift = vec![String::new(); header.len()];
    drift[0] = "energy_drift".into();
    let h = header.iter().position(|n| n == "H").expect("energy column");
    drift[h] = num(traj.energy_drift());
    w.write_record(&drift)?;
    w.flush()?;
    Ok(())
}
