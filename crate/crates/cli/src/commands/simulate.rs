use serde::Deserialize;

use estimkit::synthlab::{gen_bivariate_gaussian, gen_gbm, gen_heston, GbmParams, HestonParams};

use crate::args::{ModelArg, SimulateArgs};
use crate::error::CliError;
use crate::io::{emit_pairs, emit_prices, read_to_string, resolve_seed, write_atomic};

#[derive(Deserialize)]
struct GaussianConfig {
    mean: [f64; 2],
    cov: [[f64; 2]; 2],
    n: usize,
    seed: Option<u64>,
}

pub fn run(args: &SimulateArgs) -> Result<(), CliError> {
    let raw = read_to_string(&args.params)?;
    let value: serde_json::Value = serde_json::from_str(&raw)
        .map_err(|e| CliError::Config(format!("{}: {e}", args.params.display())))?;
    let config_seed = value.get("seed").and_then(|s| s.as_u64());

    if args.variance_output.is_some() && args.model != ModelArg::Heston {
        return Err(CliError::Config(
            "--variance-output only applies to the heston model".into(),
        ));
    }

    match args.model {
        ModelArg::Gbm => {
            let mut params: GbmParams = from_value(value, &args.params)?;
            params.seed = resolve_seed(args.seed, config_seed)?;
            let path = gen_gbm(&params)?;
            write_atomic(&args.output, &emit_prices(&path))
        }
        ModelArg::Heston => {
            let mut params: HestonParams = from_value(value, &args.params)?;
            params.seed = resolve_seed(args.seed, config_seed)?;
            let (path, variances) = gen_heston(&params)?;
            write_atomic(&args.output, &emit_prices(&path))?;
            if let Some(vpath) = &args.variance_output {
                let mut out = String::from("timestamp,variance\n");
                for (t, v) in variances.iter().enumerate() {
                    out.push_str(&format!("{t},{v}\n"));
                }
                write_atomic(vpath, &out)?;
            }
            Ok(())
        }
        ModelArg::Gaussian => {
            let config: GaussianConfig = from_value(value, &args.params)?;
            let seed = resolve_seed(args.seed, config.seed)?;
            let pairs = gen_bivariate_gaussian(
                (config.mean[0], config.mean[1]),
                config.cov,
                config.n,
                seed,
            )?;
            write_atomic(&args.output, &emit_pairs(&pairs))
        }
    }
}

fn from_value<T: serde::de::DeserializeOwned>(
    value: serde_json::Value,
    origin: &std::path::Path,
) -> Result<T, CliError> {
    serde_json::from_value(value)
        .map_err(|e| CliError::Config(format!("{}: {e}", origin.display())))
}
