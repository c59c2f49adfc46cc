//! Monte Carlo protocols over phantoms, noise levels, methods and seeds.

use std::time::Instant;

use rayon::prelude::*;

use super::denoise::{denoise_mr, DenoiseOptions, Method, SigmaSpec};
use super::metrics::quality;
use super::phantom::{make_phantom, PhantomKind};
use crate::chi2model::sample_rician;
use crate::error::{CureError, Result};
use crate::image::Image;

pub const DEFAULT_SIGMAS: [f64; 6] = [5.0, 10.0, 20.0, 30.0, 50.0, 100.0];

#[derive(Debug, Clone, PartialEq)]
pub struct Protocol {
    pub phantom: PhantomKind,
    pub size: usize,
    pub sigmas: Vec<f64>,
    pub methods: Vec<Method>,
    pub seeds: Vec<u64>,
    pub options: DenoiseOptions,
}

impl Protocol {
    fn validate(&self) -> Result<()> {
        if self.methods.is_empty() || self.sigmas.is_empty() || self.seeds.is_empty() {
            return Err(CureError::param("protocol", "needs at least one method, sigma and seed"));
        }
        if self.sigmas.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
            return Err(CureError::param("sigmas", "must be positive"));
        }
        Ok(())
    }
}

/// Metrics of one denoising run. `cure` and `mse` are in rescaled squared units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunResult {
    pub psnr: f64,
    pub cipsnr: f64,
    pub ssim: f64,
    pub cure: f64,
    pub mse: f64,
    pub runtime_s: f64,
}

/// Simulates Rician magnitudes of `mu` at `sigma`, denoises with `method`
/// (σ known) and scores against `mu`.
pub fn run_once(mu: &Image, sigma: f64, method: Method, seed: u64, opts: &DenoiseOptions) -> Result<RunResult> {
    let m = Image::new(mu.width(), mu.height(), sample_rician(mu.data(), sigma, seed)?)?;
    let start = Instant::now();
    let out = denoise_mr(&m, &SigmaSpec::Known(sigma), method, opts)?;
    let runtime_s = start.elapsed().as_secs_f64();
    let q = quality(&out.magnitude, mu)?;
    let s2 = sigma * sigma;
    let mse = out
        .squared
        .data()
        .iter()
        .zip(mu.data())
        .map(|(xh, m)| (xh - m * m / s2).powi(2))
        .sum::<f64>()
        / mu.len() as f64;
    Ok(RunResult {
        psnr: q.psnr,
        cipsnr: q.cipsnr,
        ssim: q.ssim,
        cure: out.cure,
        mse,
        runtime_s,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRow {
    pub method: Method,
    pub sigma: f64,
    pub seed_count: usize,
    pub psnr_mean: f64,
    pub psnr_se: f64,
    pub cipsnr_mean: f64,
    pub cipsnr_se: f64,
    pub ssim_mean: f64,
    pub ssim_se: f64,
    pub cure_mean: f64,
    pub mse_mean: f64,
    pub runtime_s: f64,
}

pub const CSV_HEADER: &str =
    "method,sigma,seed_count,psnr_mean,psnr_se,cipsnr_mean,cipsnr_se,ssim_mean,ssim_se,cure_mean,mse_mean,runtime_s";

impl ExperimentRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}",
            self.method,
            self.sigma,
            self.seed_count,
            self.psnr_mean,
            self.psnr_se,
            self.cipsnr_mean,
            self.cipsnr_se,
            self.ssim_mean,
            self.ssim_se,
            self.cure_mean,
            self.mse_mean,
            self.runtime_s
        )
    }
}

/// Sample mean and standard error of the mean (0 for a single value).
pub fn mean_se(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// One row per `(method, σ)`, in protocol order. Runs are independent and
/// executed in parallel; everything except `runtime_s` is deterministic.
pub fn monte_carlo_experiment(protocol: &Protocol) -> Result<Vec<ExperimentRow>> {
    protocol.validate()?;
    let mu = make_phantom(protocol.phantom, protocol.size)?;
    let cells: Vec<(Method, f64)> = protocol
        .methods
        .iter()
        .flat_map(|&m| protocol.sigmas.iter().map(move |&s| (m, s)))
        .collect();
    let runs: Vec<(usize, u64)> = (0..cells.len())
        .flat_map(|c| protocol.seeds.iter().map(move |&s| (c, s)))
        .collect();
    let results: Vec<RunResult> = runs
        .par_iter()
        .map(|&(c, seed)| run_once(&mu, cells[c].1, cells[c].0, seed, &protocol.options))
        .collect::<Result<_>>()?;
    let per = protocol.seeds.len();
    Ok(cells
        .iter()
        .enumerate()
        .map(|(c, &(method, sigma))| {
            let rs = &results[c * per..(c + 1) * per];
            let col = |f: fn(&RunResult) -> f64| rs.iter().map(f).collect::<Vec<f64>>();
            let (psnr_mean, psnr_se) = mean_se(&col(|r| r.psnr));
            let (cipsnr_mean, cipsnr_se) = mean_se(&col(|r| r.cipsnr));
            let (ssim_mean, ssim_se) = mean_se(&col(|r| r.ssim));
            ExperimentRow {
                method,
                sigma,
                seed_count: per,
                psnr_mean,
                psnr_se,
                cipsnr_mean,
                cipsnr_se,
                ssim_mean,
                ssim_se,
                cure_mean: mean_se(&col(|r| r.cure)).0,
                mse_mean: mean_se(&col(|r| r.mse)).0,
                runtime_s: mean_se(&col(|r| r.runtime_s)).0,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_se_examples() {
        assert_eq!(mean_se(&[2.0]), (2.0, 0.0));
        let (m, se) = mean_se(&[1.0, 3.0]);
        assert_eq!(m, 2.0);
        assert!((se - 1.0).abs() < 1e-12);
    }

    #[test]
    fn invalid_protocol() {
        let p = Protocol {
            phantom: PhantomKind::Constant,
            size: 32,
            sigmas: vec![],
            methods: vec![Method::Uwt],
            seeds: vec![1],
            options: DenoiseOptions::default(),
        };
        assert!(monte_carlo_experiment(&p).is_err());
    }
}
