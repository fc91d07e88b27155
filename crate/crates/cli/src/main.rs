use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use bcs_core::birman_schwinger::{scattering_length_bs, scattering_length_ode};
use bcs_core::contact_gap::{critical_temperature, solve_contact_gap, ContactGapProblem, ThermodynamicPoint};
use bcs_core::potentials::{make_radial_potential, PotentialSpec};
use bcs_core::study::{
    describe_diagnostics, format_sci, run_convergence_study, run_phase_diagram, write_convergence_csv,
    write_convergence_json, write_phase_csv, OutputFormat, RunConfig,
};
use bcs_core::{Error, Result};
use clap::{Parser, Subcommand};

/// BCS gap equations for contact and finite-range interactions.
#[derive(Debug, Parser)]
#[command(name = "bcs", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Critical temperature of the contact gap equation.
    Tc {
        #[arg(long, allow_negative_numbers = true)]
        mu: f64,
        /// Scattering length (negative).
        #[arg(long, allow_negative_numbers = true)]
        a: f64,
    },
    /// Contact gap Δ at temperature T.
    Gap {
        #[arg(long, allow_negative_numbers = true)]
        mu: f64,
        #[arg(long, allow_negative_numbers = true)]
        a: f64,
        #[arg(long, allow_negative_numbers = true)]
        temp: f64,
    },
    /// Scattering length from the resolvent formula and the ODE oracle.
    Scatter {
        /// `well:V0,R`, `gauss:V0,R` or `file:<path>`.
        #[arg(long)]
        potential: PotentialSpec,
    },
    /// Finite-range gap along the family V_ℓ against the contact limit.
    Converge {
        #[arg(long)]
        potential: PotentialSpec,
        #[arg(long, default_value_t = 1.0)]
        kappa: f64,
        #[arg(long, value_delimiter = ',', default_value = "0.2,0.1,0.05")]
        ells: Vec<f64>,
        #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
        mu: f64,
        #[arg(long, default_value_t = 0.0)]
        temp: f64,
        /// Contact scattering length; defaults to the ℓ → 0 limit.
        #[arg(long, allow_negative_numbers = true)]
        a: Option<f64>,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "csv")]
        format: OutputFormat,
    },
    /// Contact Δ(T) on [0, 1.2·T_c].
    Phase {
        #[arg(long, allow_negative_numbers = true)]
        mu: f64,
        #[arg(long, allow_negative_numbers = true)]
        a: f64,
        #[arg(long, default_value_t = 25)]
        steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Error::from(e).context(format!("creating {}", p.display())))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Tc { mu, a } => {
            println!("{}", format_sci(critical_temperature(a, mu)?));
        }
        Command::Gap { mu, a, temp } => {
            let problem = ContactGapProblem::new(a, ThermodynamicPoint::new(temp, mu)?)?;
            println!("{}", format_sci(solve_contact_gap(&problem)?.delta));
        }
        Command::Scatter { potential } => {
            let v = make_radial_potential(&potential)?;
            println!("a_bs {}", format_sci(scattering_length_bs(&v)?));
            println!("a_ode {}", format_sci(scattering_length_ode(&v)?));
        }
        Command::Converge {
            potential,
            kappa,
            ells,
            mu,
            temp,
            a,
            out,
            format,
        } => {
            let mut config = RunConfig::new(potential, kappa, ells, mu, temp);
            config.a = a;
            config.out = out;
            config.format = format;
            config.validate()?;
            let study = run_convergence_study(&config)?;
            eprint!("{}", describe_diagnostics(&study));
            let mut sink = output(&config.out)?;
            match config.format {
                OutputFormat::Csv => write_convergence_csv(&mut sink, &study.rows)?,
                OutputFormat::Json => write_convergence_json(&mut sink, &study.rows)?,
            }
            sink.flush()?;
        }
        Command::Phase { mu, a, steps, out } => {
            let diagram = run_phase_diagram(mu, a, steps)?;
            eprintln!("T_c {}", format_sci(diagram.critical_temperature));
            let mut sink = output(&out)?;
            write_phase_csv(&mut sink, &diagram.rows)?;
            sink.flush()?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config_error() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
