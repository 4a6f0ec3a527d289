use std::f64::consts::FRAC_PI_2;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use cvclone::fock::algebra::{bch_residuals, commutator_residuals, unitarity_defect};
use cvclone::fock::network::{clone_distance, covariance_check};
use cvclone::fock::operators::GeneratorKind;
use cvclone::fock::{DensityMatrix, FockVector};
use cvclone::measurement::{povm_params, PovmDensity};
use cvclone::network::twin_beam_squeezing;
use cvclone::{run_cloner, BackendConfig, CloneInput, CloneResult, CloningNetworkSpec};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{BackendChoice, Fault, RunConfig};
use crate::{sci, CliError};

pub const SWEEP_COLUMNS: &str = "lambda,G1,G2,G3,var_x,var_y,product,fidelity_c,fidelity_a";

/// Checks that need an accurate Fock tail are skipped below this truncation.
pub const SENSITIVE_TRUNCATION: usize = 16;

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path).map(BufWriter::new).map_err(|e| CliError::io(path, e))
}

fn write_all(out: &mut dyn Write, text: &str, path: &Path) -> Result<(), CliError> {
    out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| CliError::io(path, e))
}

fn gaussian_clone(lambda: f64, sigma: f64, alpha: Complex64) -> Result<CloneResult, CliError> {
    let spec = CloningNetworkSpec::new(lambda, sigma)?;
    Ok(run_cloner(&CloneInput::Coherent(alpha), &spec, &BackendConfig::Gaussian)?)
}

/// Writes one row per λ to `cfg.out` and returns the CSV text.
pub fn cmd_sweep(cfg: &RunConfig) -> Result<String, CliError> {
    cfg.validate()?;
    let rows = cfg
        .lambdas()
        .par_iter()
        .map(|&lambda| -> Result<String, CliError> {
            let spec = CloningNetworkSpec::new(lambda, cfg.sigma)?;
            let g = spec.gains();
            let r = gaussian_clone(lambda, cfg.sigma, cfg.alpha)?;
            let (_, var_x) = r.clone_c.quadrature_moments(0.0)?;
            let (_, var_y) = r.clone_a.quadrature_moments(FRAC_PI_2)?;
            let fc = r.clone_c.fidelity_with_coherent(cfg.alpha)?;
            let fa = r.clone_a.fidelity_with_coherent(cfg.alpha)?;
            let cells = [lambda, g.g1, g.g2, g.g3, var_x, var_y, var_x * var_y, fc, fa];
            Ok(cells.map(sci).join(","))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut text = String::from(SWEEP_COLUMNS);
    text.push('\n');
    for row in rows {
        text.push_str(&row);
        text.push('\n');
    }
    let path = cfg.out.as_deref().expect("validated");
    write_all(&mut create(path)?, &text, path)?;
    Ok(text)
}

/// Per-clone CSV on `out`, `key=value` summary lines on `summary`.
pub fn cmd_clone(cfg: &RunConfig, out: &mut dyn Write, summary: &mut dyn Write) -> Result<(), CliError> {
    cfg.validate()?;
    let spec = CloningNetworkSpec::new(cfg.lambda, cfg.sigma)?;
    let backend = match cfg.backend {
        BackendChoice::Gaussian => BackendConfig::Gaussian,
        BackendChoice::Fock => BackendConfig::fock(cfg.truncation),
    };
    let r = run_cloner(&CloneInput::Coherent(cfg.alpha), &spec, &backend)?;
    let mut csv = String::from("clone,mean_x,mean_y,var_x,var_y,fidelity\n");
    for (name, clone) in [("c", &r.clone_c), ("a", &r.clone_a)] {
        let (mx, vx) = clone.quadrature_moments(0.0)?;
        let (my, vy) = clone.quadrature_moments(FRAC_PI_2)?;
        let f = clone.fidelity_with_coherent(cfg.alpha)?;
        csv.push_str(&format!("{name},{}\n", [mx, my, vx, vy, f].map(sci).join(",")));
    }
    let g = spec.gains();
    let mut text = format!("lambda={}\nG1={}\nG2={}\nG3={}\n", sci(cfg.lambda), sci(g.g1), sci(g.g2), sci(g.g3));
    if let Some(d) = clone_distance(&r) {
        text.push_str(&format!("trace_distance={}\n", sci(d)));
    }
    match &cfg.out {
        Some(path) => write_all(&mut create(path)?, &csv, path)?,
        None => write_all(out, &csv, Path::new("<stdout>"))?,
    }
    write_all(summary, &text, Path::new("<stderr>"))
}

/// Parameter header as `#` lines, then `x,x_prime,density` rows. Returns
/// the grid integral.
pub fn cmd_povm(cfg: &RunConfig, out: &mut dyn Write) -> Result<f64, CliError> {
    cfg.validate()?;
    let p = povm_params(cfg.lambda, cfg.phi, cfg.theta)?;
    let input = DensityMatrix::from_pure(&FockVector::coherent(cfg.truncation, cfg.alpha)?);
    let density = PovmDensity::new(p, &input)?;
    let n = cfg.grid_points;
    let h = 2.0 * cfg.grid_extent / (n - 1) as f64;
    let xs: Vec<f64> = (0..n).map(|i| -cfg.grid_extent + h * i as f64).collect();
    let values = density.grid(&xs, &xs);
    let integral = values.sum() * h * h;
    let mut text = format!(
        "# lambda={} phi={} theta={} alpha={},{}\n",
        sci(cfg.lambda),
        sci(cfg.phi),
        sci(cfg.theta),
        sci(cfg.alpha.re),
        sci(cfg.alpha.im)
    );
    text.push_str(&format!(
        "# C={} D={} E={} |delta|={} |beta|={} |gamma|={} xi={},{}\n",
        sci(p.c),
        sci(p.d),
        sci(p.e),
        sci(p.delta.norm()),
        sci(p.beta.norm()),
        sci(p.gamma.norm()),
        sci(p.xi.re),
        sci(p.xi.im)
    ));
    text.push_str(&format!("# integral={}\n", sci(integral)));
    text.push_str("x,x_prime,density\n");
    for (i, &x) in xs.iter().enumerate() {
        for (j, &y) in xs.iter().enumerate() {
            text.push_str(&format!("{},{},{}\n", sci(x), sci(y), sci(values[(i, j)])));
        }
    }
    match &cfg.out {
        Some(path) => write_all(&mut create(path)?, &text, path)?,
        None => write_all(out, &text, Path::new("<stdout>"))?,
    }
    Ok(integral)
}

#[derive(Debug, Clone, PartialEq)]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckRecord {
    pub name: &'static str,
    pub status: CheckStatus,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<CheckRecord>,
}

impl VerifyReport {
    pub fn failures(&self) -> Vec<String> {
        self.checks.iter().filter(|c| c.status == CheckStatus::Fail).map(|c| c.name.to_string()).collect()
    }
}

struct Measured {
    value: f64,
    limit: f64,
    what: String,
}

impl Measured {
    fn new(value: f64, limit: f64, what: impl Into<String>) -> Self {
        Self { value, limit, what: what.into() }
    }
}

type CheckFn = fn(&RunConfig) -> Result<Measured, CliError>;

const ALGEBRA_DIMS: [usize; 3] = [12, 12, 12];

fn check_commutators(_: &RunConfig) -> Result<Measured, CliError> {
    let r = commutator_residuals(&ALGEBRA_DIMS, 1)?;
    Ok(Measured::new(r.into_iter().fold(0.0, f64::max), 1e-10, "max interior commutator residual"))
}

fn check_bch(_: &RunConfig) -> Result<Measured, CliError> {
    let r = bch_residuals(&ALGEBRA_DIMS, &[0.3, 0.7, 1.2], 1)?;
    Ok(Measured::new(r.into_iter().fold(0.0, f64::max), 1e-8, "max rotated-generator residual"))
}

fn check_unitarity(_: &RunConfig) -> Result<Measured, CliError> {
    let worst = [GeneratorKind::A, GeneratorKind::B, GeneratorKind::C]
        .into_iter()
        .map(|k| unitarity_defect(k, &ALGEBRA_DIMS, 0.5, 8))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(Measured::new(worst, 1e-8, "max |U†U - 1| on low photon numbers"))
}

fn check_backend_equivalence(cfg: &RunConfig) -> Result<Measured, CliError> {
    let alpha = Complex64::new(0.3, 0.2);
    let spec = CloningNetworkSpec::new(3.0, 1.0)?;
    let g = run_cloner(&CloneInput::Coherent(alpha), &spec, &BackendConfig::Gaussian)?;
    let f = run_cloner(&CloneInput::Coherent(alpha), &spec, &BackendConfig::fock(cfg.truncation))?;
    let mut worst: f64 = 0.0;
    for (a, b) in [(&g.clone_c, &f.clone_c), (&g.clone_a, &f.clone_a)] {
        for phase in [0.0, FRAC_PI_2] {
            let (ma, va) = a.quadrature_moments(phase)?;
            let (mb, vb) = b.quadrature_moments(phase)?;
            worst = worst.max((ma - mb).abs()).max((va - vb).abs());
        }
    }
    Ok(Measured::new(worst, 1e-4, "max clone moment difference, Fock vs Gaussian, lambda 3"))
}

fn check_covariance(cfg: &RunConfig) -> Result<Measured, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let phi = FockVector::coherent(cfg.truncation, Complex64::new(0.2, 0.0))?;
    let mut worst: f64 = 0.0;
    for _ in 0..3 {
        let alpha = Complex64::from_polar(0.7 * rng.random::<f64>().sqrt(), std::f64::consts::TAU * rng.random::<f64>());
        worst = worst.max(covariance_check(&phi, alpha, 6.0, cfg.truncation)?);
    }
    Ok(Measured::new(worst, 1e-3, "max trace distance, clone of displaced input vs displaced clones"))
}

fn check_clone_symmetry(cfg: &RunConfig) -> Result<Measured, CliError> {
    let spec = CloningNetworkSpec::new(6.0, 1.0)?;
    let r = run_cloner(&CloneInput::Coherent(Complex64::new(0.5, 0.0)), &spec, &BackendConfig::fock(cfg.truncation))?;
    let d = clone_distance(&r).expect("Fock result");
    Ok(Measured::new(d, 1e-3, "trace distance between the clones, lambda 6"))
}

/// `[cosh²(λ − r₀), cosh²(2e^{−λ}), cosh²λ]`, optionally corrupted.
fn reference_gains(lambda: f64, fault: Option<Fault>) -> [f64; 3] {
    let r0 = twin_beam_squeezing();
    let strengths = [lambda - r0, 2.0 * (-lambda).exp(), lambda];
    match fault {
        None => strengths.map(|s| s.cosh().powi(2)),
        Some(Fault::CorruptGains) => strengths.map(|s| s.sinh().powi(2)),
    }
}

fn check_gains(cfg: &RunConfig) -> Result<Measured, CliError> {
    let mut worst: f64 = 0.0;
    for lambda in [twin_beam_squeezing(), 0.5, 1.0, 2.0, 4.0, 8.0, 12.0] {
        let g = CloningNetworkSpec::new(lambda, 1.0)?.gains();
        for (got, want) in [g.g1, g.g2, g.g3].into_iter().zip(reference_gains(lambda, cfg.fault)) {
            worst = worst.max((got - want).abs() / got);
        }
    }
    Ok(Measured::new(worst, 1e-12, "max relative error of G1, G2, G3"))
}

const CHECKS: [(&str, bool, CheckFn); 7] = [
    ("commutators", false, check_commutators),
    ("bch", false, check_bch),
    ("unitarity", false, check_unitarity),
    ("backend-equivalence", true, check_backend_equivalence),
    ("covariance", true, check_covariance),
    ("clone-symmetry", true, check_clone_symmetry),
    ("gains-consistency", false, check_gains),
];

/// Runs every check, writing one line each to `out`.
pub fn cmd_verify(cfg: &RunConfig, out: &mut dyn Write) -> Result<VerifyReport, CliError> {
    cfg.validate()?;
    let stdout = Path::new("<stdout>");
    let mut checks = Vec::new();
    for (name, sensitive, run) in CHECKS {
        if sensitive && cfg.truncation < SENSITIVE_TRUNCATION {
            let detail = format!("truncation {} < {SENSITIVE_TRUNCATION}", cfg.truncation);
            write_all(out, &format!("SKIP {name}: {detail}\n"), stdout)?;
            checks.push(CheckRecord { name, status: CheckStatus::Skipped, detail, seconds: 0.0 });
            continue;
        }
        let start = Instant::now();
        let result = run(cfg);
        let seconds = start.elapsed().as_secs_f64();
        let (status, detail) = match result {
            Ok(m) if m.value <= m.limit => (CheckStatus::Pass, format!("{} = {:.3e} (limit {:.1e})", m.what, m.value, m.limit)),
            Ok(m) => (CheckStatus::Fail, format!("{} = {:.3e}, expected <= {:.1e}", m.what, m.value, m.limit)),
            Err(e) => (CheckStatus::Fail, format!("error: {e}")),
        };
        let tag = if status == CheckStatus::Pass { "PASS" } else { "FAIL" };
        write_all(out, &format!("{tag} {name}: {detail} [{seconds:.3} s]\n"), stdout)?;
        checks.push(CheckRecord { name, status, detail, seconds });
    }
    let report = VerifyReport { checks };
    let failures = report.failures();
    if failures.is_empty() {
        Ok(report)
    } else {
        Err(CliError::ChecksFailed(failures))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_gains_match_the_network() {
        for lambda in [0.5, 3.0] {
            let g = CloningNetworkSpec::new(lambda, 1.0).unwrap().gains();
            let want = reference_gains(lambda, None);
            assert!((g.g1 - want[0]).abs() < 1e-12 && (g.g3 - want[2]).abs() < 1e-9);
        }
        let corrupt = reference_gains(1.0, Some(Fault::CorruptGains));
        assert!((corrupt[2] - 1.0f64.sinh().powi(2)).abs() < 1e-15);
    }
}
