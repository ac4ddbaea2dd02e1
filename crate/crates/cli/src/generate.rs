//! `generate`: simulate memory experiments into an on-disk dataset.

use std::path::PathBuf;

use surfmem::dataset::{self, DatasetKind, GenerateConfig};
use surfmem::{build_surface17, Error, ErrorParams, Result};

use crate::config::{self, KeyValues};

/// Error rates of the reference operating point (roughly 1% physical
/// error per data qubit per cycle).
const OPERATING_POINT: [(&str, &str); 4] = [
    ("p_x", "4.8e-4"),
    ("p_y", "4.8e-4"),
    ("p_z", "4.8e-4"),
    ("p_m", "1.4e-3"),
];

fn presets(name: &str) -> Result<&'static [(&'static str, &'static str)]> {
    Ok(match name {
        "paper-train" => &[("kind", "train"), ("count", "4000000"), ("t_min", "11"), ("t_max", "20")],
        "desk-train" => &[("kind", "train"), ("count", "200000"), ("t_min", "11"), ("t_max", "20")],
        "paper-validation" | "desk-validation" => {
            &[("kind", "validation"), ("count", "10000"), ("t_min", "81"), ("t_max", "100")]
        }
        "paper-test" | "desk-test" => {
            &[("kind", "test"), ("count", "10000"), ("t_min", "300"), ("t_max", "300")]
        }
        _ => {
            return Err(Error::InvalidArgument(format!(
                "unknown preset {name:?}; expected {{paper,desk}}-{{train,validation,test}}"
            )))
        }
    })
}

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Output dataset path (newline-delimited JSON).
    #[arg(long)]
    pub out: PathBuf,
    /// Named parameter set: {paper,desk}-{train,validation,test}.
    #[arg(long)]
    pub preset: Option<String>,
    /// key=value file layered over the preset.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Inline key=value overrides; win over preset and config file.
    #[arg(value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

fn parse_kind(s: &str) -> Result<DatasetKind> {
    match s {
        "train" => Ok(DatasetKind::Train),
        "validation" => Ok(DatasetKind::Validation),
        "test" => Ok(DatasetKind::Test),
        _ => Err(Error::InvalidArgument(format!(
            "kind {s:?} is not train|validation|test"
        ))),
    }
}

pub fn run(args: &Args) -> Result<()> {
    let mut kv = config::layer(
        &OPERATING_POINT,
        args.preset.as_deref(),
        presets,
        args.config.as_deref(),
        &args.overrides,
    )?;
    let cfg = drain_config(&mut kv)?;
    let resolved = kv.finish()?;

    let layout = build_surface17();
    let manifest = dataset::generate_to_path(&layout, &cfg, &args.out)?;
    let manifest_file = dataset::manifest_path(&args.out);
    config::write_run_manifest(
        &args.out,
        "generate",
        &resolved,
        &[&args.out, &manifest_file],
    )?;
    println!(
        "wrote {} sequences (T in [{}, {}]) to {}",
        manifest.count,
        manifest.t_min,
        manifest.t_max,
        args.out.display()
    );
    Ok(())
}

fn drain_config(kv: &mut KeyValues) -> Result<GenerateConfig> {
    let kind = parse_kind(&kv.require::<String>("kind")?)?;
    let cfg = GenerateConfig {
        kind,
        count: kv.require("count")?,
        t_min: kv.require("t_min")?,
        t_max: kv.require("t_max")?,
        params: ErrorParams {
            p_x: kv.require("p_x")?,
            p_y: kv.require("p_y")?,
            p_z: kv.require("p_z")?,
            p_m: kv.require("p_m")?,
        },
        base_seed: kv.take_or("seed", 1)?,
    };
    cfg.validate()?;
    Ok(cfg)
}
