use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use kgap::io::{read_model, read_state};
use kgap::separability::{gap_from, ksep_energy, ksep_levels_for, OptimizerConfig};
use kgap::spectral::eig_hermitian;
use kgap::sweep::{run_and_write, OutputFormat, OutputSpec, SweepConfig};
use kgap::witness::{
    entropy_threshold_ksep, entropy_witness, gap_witness, gme_concurrence_pure, q_criteria,
    QOptions,
};
use kgap::Error;
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "kgap",
    version,
    about = "Energy-based detection of multipartite entanglement"
)]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct OptimizerArgs {
    /// Random restarts per partition.
    #[arg(long, default_value_t = 50)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    max_sweeps: usize,
}

impl OptimizerArgs {
    fn config(&self) -> OptimizerConfig {
        OptimizerConfig {
            restarts: self.restarts,
            max_sweeps: self.max_sweeps,
            seed: self.seed,
            ..Default::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues of a model Hamiltonian, grouped by degeneracy.
    Spectrum {
        /// Model file (JSON).
        model: PathBuf,
    },
    /// Minimum energy over k-separable states.
    Ksep {
        model: PathBuf,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[command(flatten)]
        opt: OptimizerArgs,
    },
    /// Evaluate the detection criteria on a state file.
    Witness {
        /// State file (JSON matrix record).
        state: PathBuf,
        /// Model whose Hamiltonian provides the energy and entropy criteria.
        #[arg(long)]
        model: Option<PathBuf>,
        /// Separability levels for the energy criterion; defaults to 2..=n.
        #[arg(long, value_delimiter = ',')]
        k: Vec<usize>,
        /// Also evaluate the entropy criterion (needs --model).
        #[arg(long)]
        entropy: bool,
        #[command(flatten)]
        opt: OptimizerArgs,
    },
    /// Run a sweep config file.
    Sweep {
        config: PathBuf,
        /// Overrides the output path of the config.
        #[arg(long, short)]
        output: Option<PathBuf>,
        #[arg(long, value_parser = ["csv", "json"])]
        format: Option<String>,
    },
    /// GME concurrence of a model's ground state.
    Concurrence { model: PathBuf },
}

fn print(json: bool, value: serde_json::Value, text: String) {
    let out = if json {
        serde_json::to_string_pretty(&value).expect("JSON value serializes") + "\n"
    } else {
        text
    };
    let _ = std::io::stdout().lock().write_all(out.as_bytes());
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Spectrum { model } => {
            let spec = eig_hermitian(
                &read_model(&model)
                    .with_context(|| format!("reading model {}", model.display()))?
                    .build()?,
            )?;
            let levels = spec.levels();
            let mut text = String::from("energy\tdegeneracy\n");
            for (e, g) in &levels {
                text += &format!("{e:.12}\t{g}\n");
            }
            let levels_json: Vec<_> = levels
                .iter()
                .map(|(e, g)| json!({"energy": e, "degeneracy": g}))
                .collect();
            print(
                cli.json,
                json!({"eigenvalues": spec.eigenvalues, "levels": levels_json}),
                text,
            );
        }
        Command::Ksep { model, k, opt } => {
            let h = read_model(&model)
                .with_context(|| format!("reading model {}", model.display()))?
                .build()?;
            let e0 = eig_hermitian(&h)?.ground_energy();
            let r = ksep_energy(&h, k, &opt.config())?;
            let gap = gap_from(e0, r.energy);
            let partition = r.argmin.partition().to_string();
            print(
                cli.json,
                json!({
                    "k": k, "ground_energy": e0, "ksep_energy": r.energy, "gap": gap,
                    "partition": partition, "converged": r.converged, "consensus": r.consensus,
                }),
                format!(
                    "E0 = {e0:.12}\nE_{k}-sep = {:.12}\ngap = {gap:.12}\npartition = {partition}\nconverged = {}\nconsensus = {:.2}\n",
                    r.energy, r.converged, r.consensus
                ),
            );
        }
        Command::Witness {
            state,
            model,
            k,
            entropy,
            opt,
        } => {
            let state =
                read_state(&state).with_context(|| format!("reading state {}", state.display()))?;
            let rho = state.density();
            let mut verdicts = Vec::new();
            if rho.shape().n_sites() >= 2 {
                verdicts.push(q_criteria(&rho, &QOptions::default())?.verdict());
            }
            match model {
                Some(path) => {
                    let h = read_model(&path)
                        .with_context(|| format!("reading model {}", path.display()))?
                        .build()?;
                    if h.shape() != rho.shape() {
                        return Err(Error::InvalidArgument(format!(
                            "state shape {:?} does not match the model shape {:?}",
                            rho.shape().local_dims(),
                            h.shape().local_dims()
                        ))
                        .into());
                    }
                    let n = h.shape().n_sites();
                    let ks = if k.is_empty() { (2..=n).collect() } else { k };
                    for r in ksep_levels_for(&h, &ks, &opt.config())? {
                        verdicts.push(gap_witness(&rho, &h, &r)?);
                    }
                    if entropy {
                        let ground = eig_hermitian(&h)?.ground_state();
                        let t = entropy_threshold_ksep(&ground, 2, &opt.config())?;
                        verdicts.push(entropy_witness(&rho, &ground, 2, &t)?);
                    }
                }
                None if entropy || !k.is_empty() => {
                    return Err(Error::Config {
                        path: "--model".into(),
                        message: "energy and entropy criteria need a model".into(),
                    }
                    .into())
                }
                None => {}
            }
            let mut text = String::from("criterion\tvalue\tthreshold\tdetected\n");
            for v in &verdicts {
                text += &format!(
                    "{}\t{:.12}\t{:.12}\t{}",
                    v.criterion, v.value, v.threshold, v.detected
                );
                if let Some(c) = &v.caveat {
                    text += &format!("\t({c})");
                }
                text.push('\n');
            }
            print(cli.json, json!({ "verdicts": verdicts }), text);
        }
        Command::Sweep {
            config,
            output,
            format,
        } => {
            let mut cfg = SweepConfig::load(&config)
                .with_context(|| format!("reading sweep config {}", config.display()))?;
            if output.is_some() || format.is_some() {
                let fmt = match format.as_deref() {
                    Some("json") => OutputFormat::Json,
                    Some(_) => OutputFormat::Csv,
                    None => cfg.output.as_ref().map(|o| o.format).unwrap_or_default(),
                };
                let path = output
                    .or_else(|| cfg.output.as_ref().map(|o| o.path.clone()))
                    .context("--format needs an output path")?;
                cfg.output = Some(OutputSpec { path, format: fmt });
            }
            let table = run_and_write(&cfg)?;
            if cfg.output.is_none() {
                let stdout = std::io::stdout();
                let mut lock = stdout.lock();
                table.write_csv(&mut lock)?;
                lock.flush()?;
            }
        }
        Command::Concurrence { model } => {
            let spec = eig_hermitian(
                &read_model(&model)
                    .with_context(|| format!("reading model {}", model.display()))?
                    .build()?,
            )?;
            let report = gme_concurrence_pure(&spec.ground_state())?;
            let degeneracy = spec.ground_degeneracy();
            let mut text = format!(
                "C_gme = {:.12}\nminimizing bipartition = {}\n",
                report.value, report.minimizing_bipartition
            );
            if degeneracy > 1 {
                text += &format!("warning: ground manifold is {degeneracy}-fold degenerate\n");
            }
            print(
                cli.json,
                json!({
                    "concurrence": report.value,
                    "minimizing_bipartition": report.minimizing_bipartition,
                    "degeneracy": degeneracy,
                }),
                text,
            );
        }
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::Config { .. } | Error::InvalidArgument(_) | Error::Json(_)) => 2,
        Some(Error::Numerical(_)) => 3,
        Some(Error::Io(_) | Error::Csv(_)) => 4,
        None if err.downcast_ref::<std::io::Error>().is_some() => 4,
        None => 2,
    }
}

fn main() -> ExitCode {
    env_logger::init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let mut message = String::from("error");
            for cause in e.chain() {
                message += &format!(": {cause}");
                if cause.is::<Error>() {
                    break;
                }
            }
            eprintln!("{message}");
            ExitCode::from(exit_code(&e))
        }
    }
}
