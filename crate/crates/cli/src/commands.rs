use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use cure_core::chi2model::{estimate_sigma_background, sample_rician};
use cure_core::pipeline::{
    denoise_mr, make_phantom, monte_carlo_experiment, quality, DenoiseOptions, Method, PhantomKind, Protocol,
    SigmaSpec, CSV_HEADER,
};
use cure_core::Image;
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::io::{read_image, read_mask, write_image};

#[derive(Debug, Parser)]
#[command(name = "cure", version, about = "CURE-optimized denoising of magnitude MR images")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Denoise a magnitude image.
    Denoise(DenoiseArgs),
    /// Write a Rician-noisy magnitude image of a phantom or clean reference.
    Simulate(SimulateArgs),
    /// Score an estimate against a clean reference (one CSV row).
    Evaluate(EvaluateArgs),
    /// Monte Carlo protocol over methods, noise levels and seeds (CSV).
    Benchmark(BenchmarkArgs),
    /// Estimate the noise level from a background mask.
    EstimateSigma(EstimateSigmaArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Tunables {
    /// Magnitude reconstruction mix in [0, 1].
    #[arg(long, default_value_t = 0.5)]
    pub lambda: f64,
    /// Decomposition levels J.
    #[arg(long, default_value_t = 3)]
    pub levels: usize,
    /// Override λ₁ of the LET atoms (default 3 pointwise, 1 joint).
    #[arg(long)]
    pub lambda1: Option<f64>,
    /// Override λ₂ of the LET atoms (default 9).
    #[arg(long)]
    pub lambda2: Option<f64>,
}

impl Tunables {
    fn options(&self) -> CliResult<DenoiseOptions> {
        let mut o = DenoiseOptions {
            lambda: self.lambda,
            levels: self.levels,
            ..DenoiseOptions::default()
        };
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(CliError::Config(format!("--lambda must lie in [0, 1], got {}", self.lambda)));
        }
        if !(1..=16).contains(&self.levels) {
            return Err(CliError::Config(format!("--levels must lie in 1..=16, got {}", self.levels)));
        }
        for (flag, v, slot) in [("--lambda1", self.lambda1, 0), ("--lambda2", self.lambda2, 1)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(CliError::Config(format!("{flag} must be positive, got {v}")));
                }
                o.pointwise_lambdas[slot] = v;
                o.joint_lambdas[slot] = v;
            }
        }
        Ok(o)
    }
}

#[derive(Debug, Args, Serialize)]
pub struct DenoiseArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long = "out")]
    pub output: PathBuf,
    /// Noise level, or `auto` to estimate it from --mask.
    #[arg(long)]
    pub sigma: String,
    /// Background mask PGM (nonzero = background), required with --sigma auto.
    #[arg(long)]
    pub mask: Option<PathBuf>,
    #[arg(long, default_value = "uwt-bdct")]
    pub method: String,
    #[command(flatten)]
    pub tunables: Tunables,
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    #[arg(long = "out")]
    pub output: PathBuf,
    #[arg(long)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Phantom kind: shepp-logan, piecewise or constant.
    #[arg(long, default_value = "shepp-logan")]
    pub phantom: String,
    #[arg(long, default_value_t = 128)]
    pub size: usize,
    /// Clean magnitude reference to corrupt instead of a phantom.
    #[arg(long)]
    pub clean: Option<PathBuf>,
    /// Also write the clean reference used.
    #[arg(long)]
    pub clean_out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub est: PathBuf,
    #[arg(long = "ref")]
    pub reference: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct BenchmarkArgs {
    #[arg(long, default_value = "shepp-logan")]
    pub phantom: String,
    #[arg(long, default_value_t = 128)]
    pub size: usize,
    /// Comma-separated noise levels.
    #[arg(long, value_delimiter = ',', default_values_t = vec![5.0, 10.0, 20.0, 30.0, 50.0, 100.0])]
    pub sigmas: Vec<f64>,
    /// Comma-separated methods.
    #[arg(long, value_delimiter = ',', default_values_t = vec!["haar-cs1".to_string(), "uwt-bdct".to_string()])]
    pub methods: Vec<String>,
    /// Number of noise realizations; seeds are `seed, seed+1, …`.
    #[arg(long, default_value_t = 10)]
    pub seeds: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// CSV destination (stdout when absent).
    #[arg(long = "out")]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub tunables: Tunables,
}

#[derive(Debug, Args, Serialize)]
pub struct EstimateSigmaArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub mask: PathBuf,
}

fn print_config<T: Serialize>(name: &str, args: &T) {
    let json = serde_json::to_string(args).expect("config serializes");
    eprintln!("config {name}: {json}");
}

fn parse_method(s: &str) -> CliResult<Method> {
    s.parse().map_err(|e: cure_core::CureError| CliError::Config(format!("--method: {e}")))
}

fn parse_phantom(s: &str) -> CliResult<PhantomKind> {
    s.parse().map_err(|e: cure_core::CureError| CliError::Config(format!("--phantom: {e}")))
}

fn load_mask(path: &Path, img: &Image) -> CliResult<Vec<bool>> {
    let (w, h, mask) = read_mask(path)?;
    if (w, h) != (img.width(), img.height()) {
        return Err(CliError::Config(format!(
            "--mask is {w}x{h} but the image is {}x{}",
            img.width(),
            img.height()
        )));
    }
    Ok(mask)
}

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Denoise(a) => denoise(&a),
        Command::Simulate(a) => simulate(&a),
        Command::Evaluate(a) => evaluate(&a),
        Command::Benchmark(a) => benchmark(&a),
        Command::EstimateSigma(a) => estimate_sigma(&a),
    }
}

fn denoise(a: &DenoiseArgs) -> CliResult<()> {
    print_config("denoise", a);
    let method = parse_method(&a.method)?;
    let opts = a.tunables.options()?;
    let auto = a.sigma.eq_ignore_ascii_case("auto");
    let known = if auto {
        if a.mask.is_none() {
            return Err(CliError::Config("--sigma auto requires --mask".into()));
        }
        None
    } else {
        let s: f64 = a
            .sigma
            .parse()
            .map_err(|_| CliError::Config(format!("--sigma must be a number or `auto`, got `{}`", a.sigma)))?;
        if !(s > 0.0 && s.is_finite()) {
            return Err(CliError::Config(format!("--sigma must be positive, got {s}")));
        }
        Some(s)
    };
    let img = read_image(&a.input)?;
    let sigma = match (known, &a.mask) {
        (Some(s), _) => SigmaSpec::Known(s),
        (None, Some(mask)) => SigmaSpec::Auto(load_mask(mask, &img)?),
        (None, None) => unreachable!(),
    };
    let start = Instant::now();
    let out = denoise_mr(&img, &sigma, method, &opts)?;
    let secs = start.elapsed().as_secs_f64();
    write_image(&a.output, &out.magnitude, "magnitude")?;
    println!("sigma={:.6} method={method} cure={:.6} time_s={secs:.3}", out.sigma, out.cure);
    Ok(())
}

fn simulate(a: &SimulateArgs) -> CliResult<()> {
    print_config("simulate", a);
    if !(a.sigma > 0.0 && a.sigma.is_finite()) {
        return Err(CliError::Config(format!("--sigma must be positive, got {}", a.sigma)));
    }
    let mu = match &a.clean {
        Some(path) => read_image(path)?,
        None => make_phantom(parse_phantom(&a.phantom)?, a.size)?,
    };
    let m = Image::new(mu.width(), mu.height(), sample_rician(mu.data(), a.sigma, a.seed)?)?;
    write_image(&a.output, &m, "magnitude")?;
    if let Some(path) = &a.clean_out {
        write_image(path, &mu, "clean-reference")?;
    }
    println!("wrote {}x{} sigma={} seed={}", m.width(), m.height(), a.sigma, a.seed);
    Ok(())
}

fn evaluate(a: &EvaluateArgs) -> CliResult<()> {
    print_config("evaluate", a);
    let est = read_image(&a.est)?;
    let reference = read_image(&a.reference)?;
    if !est.same_shape(&reference) {
        return Err(CliError::Config(format!(
            "--est is {}x{} but --ref is {}x{}",
            est.width(),
            est.height(),
            reference.width(),
            reference.height()
        )));
    }
    let q = quality(&est, &reference)?;
    println!("psnr,cipsnr,ssim,a,b");
    println!("{:.4},{:.4},{:.6},{:.6},{:.6}", q.psnr, q.cipsnr, q.ssim, q.affine.0, q.affine.1);
    Ok(())
}

fn benchmark(a: &BenchmarkArgs) -> CliResult<()> {
    print_config("benchmark", a);
    if a.seeds == 0 {
        return Err(CliError::Config("--seeds must be at least 1".into()));
    }
    let methods = a.methods.iter().map(|m| parse_method(m)).collect::<CliResult<Vec<_>>>()?;
    let protocol = Protocol {
        phantom: parse_phantom(&a.phantom)?,
        size: a.size,
        sigmas: a.sigmas.clone(),
        methods: methods.clone(),
        seeds: (0..a.seeds as u64).map(|k| a.seed + k).collect(),
        options: a.tunables.options()?,
    };
    let rows = monte_carlo_experiment(&protocol)?;
    let mut csv = String::from(CSV_HEADER);
    csv.push('\n');
    for r in &rows {
        csv.push_str(&r.to_csv());
        csv.push('\n');
    }
    match &a.output {
        Some(path) => std::fs::write(path, &csv).map_err(|e| CliError::io(path, e))?,
        None => print!("{csv}"),
    }
    for m in &methods {
        let times: Vec<f64> = rows.iter().filter(|r| r.method == *m).map(|r| r.runtime_s).collect();
        let mean = times.iter().sum::<f64>() / times.len() as f64;
        eprintln!("runtime {m}: {mean:.4} s/run");
    }
    Ok(())
}

fn estimate_sigma(a: &EstimateSigmaArgs) -> CliResult<()> {
    print_config("estimate-sigma", a);
    let img = read_image(&a.input)?;
    let mask = load_mask(&a.mask, &img)?;
    let sigma = estimate_sigma_background(img.data(), &mask)?;
    println!("{sigma:.6}");
    Ok(())
}
