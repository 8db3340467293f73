//! Path-level Monte Carlo: exact Ornstein–Uhlenbeck simulation, the
//! drifted SDE with exponential Euler, Girsanov reweighting, Wong–Zakai
//! mollification, Gibbs quadrature, and the estimator-level localization
//! checks. All estimates are deterministic functions of (config, seed)
//! regardless of thread count.

use crate::poly::Polynomial;
use crate::quad::{self, QuadError};
use crate::rng::{pairwise_sum, path_rng};
use crate::scalar::ScalarFn;
use crate::superfunction::SuperFunction;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

#[derive(Debug, thiserror::Error)]
pub enum SdeError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("superfunction weight has nonzero odd components")]
    OddComponent,
    #[error("mollifier width {eps} must exceed twice the step size {h}")]
    EpsilonTooSmall { eps: f64, h: f64 },
    #[error(transparent)]
    Quad(#[from] QuadError),
}

/// λ·cos x.
pub fn potential_cosine(lambda: f64) -> ScalarFn {
    ScalarFn::cos_scaled(lambda, 1.0)
}

/// λ·tanh(x)·e^{−x²/4}: bounded with all derivatives bounded.
pub fn potential_tanhpoly(lambda: f64) -> ScalarFn {
    ScalarFn::tanh_scaled(lambda, 1.0).mul(&ScalarFn::gaussian(0.0, 2.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Observable {
    Cos,
    Tanh,
    IndicatorPositive,
}

impl Observable {
    pub fn eval(self, x: f64) -> f64 {
        match self {
            Observable::Cos => x.cos(),
            Observable::Tanh => x.tanh(),
            Observable::IndicatorPositive => {
                if x > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Observable::Cos => "cos",
            Observable::Tanh => "tanh",
            Observable::IndicatorPositive => "indicator",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "cos" => Some(Observable::Cos),
            "tanh" => Some(Observable::Tanh),
            "indicator" => Some(Observable::IndicatorPositive),
            _ => None,
        }
    }

    pub const ALL: [Observable; 3] =
        [Observable::Cos, Observable::Tanh, Observable::IndicatorPositive];
}

#[derive(Clone)]
pub struct SimConfig {
    pub m: f64,
    pub h: f64,
    pub t_support: f64,
    pub n_paths: usize,
    pub master_seed: u64,
    /// Potential V: bounded, with bounded derivatives.
    pub v: ScalarFn,
    /// Cutoff f: even, f(0) = 1, supported in [−T_support, T_support].
    pub f: ScalarFn,
    pub quad_tol: f64,
}

impl SimConfig {
    /// The defaults behind the whole verification suite: m = 1,
    /// h = 2^{−10}, T = 1, N = 2·10⁵, V = ½cos x.
    pub fn standard() -> Self {
        Self {
            m: 1.0,
            h: (2.0f64).powi(-10),
            t_support: 1.0,
            n_paths: 200_000,
            master_seed: 1,
            v: potential_cosine(0.5),
            f: ScalarFn::bump(1.0),
            quad_tol: 1e-6,
        }
    }

    pub fn n_steps(&self) -> usize {
        (self.t_support / self.h).round() as usize
    }

    pub fn validate(&self) -> Result<(), SdeError> {
        let bad = |msg: &str| Err(SdeError::InvalidConfig(msg.to_string()));
        if !(self.m > 0.0) {
            return bad("m must be positive");
        }
        if !(self.h > 0.0) {
            return bad("h must be positive");
        }
        if !(self.t_support > 0.0) {
            return bad("T_support must be positive");
        }
        if self.n_paths == 0 {
            return bad("n_paths must be positive");
        }
        if !(self.quad_tol > 0.0) {
            return bad("quad_tol must be positive");
        }
        if (self.f.eval(0.0) - 1.0).abs() > 1e-12 {
            return bad("f(0) must equal 1");
        }
        let t_max = self.t_support;
        for k in 1..=40 {
            let t = t_max * k as f64 / 41.0;
            if (self.f.eval(t) - self.f.eval(-t)).abs() > 1e-12 {
                return bad("f must be even");
            }
            if self.f.eval(t) < 0.0 {
                return bad("f must be nonnegative");
            }
            if self.f.eval(t_max + t).abs() > 0.0 || self.f.eval(-t_max - t).abs() > 0.0 {
                return bad("f must vanish outside [-T_support, T_support]");
            }
        }
        for k in -100..=100 {
            let x = k as f64;
            for order in 0..=2 {
                let val = self.v.deriv_n(order, x);
                if !val.is_finite() || val.abs() > 50.0 {
                    return bad("V must be bounded with bounded derivatives");
                }
            }
        }
        Ok(())
    }
}

/// One simulated trajectory on a uniform grid from t0 to t0 + n·h,
/// with the Brownian increments that drove it.
#[derive(Clone, Debug)]
pub struct Path {
    pub t0: f64,
    pub h: f64,
    pub phi: Vec<f64>,
    pub db: Vec<f64>,
}

impl Path {
    pub fn n_steps(&self) -> usize {
        self.db.len()
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.h
    }

    /// Value at the last grid node.
    pub fn terminal(&self) -> f64 {
        *self.phi.last().unwrap()
    }

    /// Value at the grid node nearest to `t`.
    pub fn value_at(&self, t: f64) -> f64 {
        let i = ((t - self.t0) / self.h).round() as isize;
        let i = i.clamp(0, self.phi.len() as isize - 1) as usize;
        self.phi[i]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum PathKind {
    Ou,
    Sde,
}

/// Node-level caches shared by every path of an ensemble, so the cutoff
/// and its derivative are evaluated once rather than per path.
struct GridCache {
    t0: f64,
    h: f64,
    n: usize,
    t_nodes: Vec<f64>,
    t_mid: Vec<f64>,
    f_nodes: Vec<f64>,
    f_mid: Vec<f64>,
    df_nodes: Vec<f64>,
}

impl GridCache {
    fn new(config: &SimConfig, t0: f64, n: usize) -> Self {
        let h = config.h;
        let t_nodes: Vec<f64> = (0..=n).map(|i| t0 + i as f64 * h).collect();
        let t_mid: Vec<f64> = (0..n).map(|i| t0 + (i as f64 + 0.5) * h).collect();
        let f_nodes = t_nodes.iter().map(|&t| config.f.eval(t)).collect();
        let f_mid = t_mid.iter().map(|&t| config.f.eval(t)).collect();
        let df_nodes = t_nodes.iter().map(|&t| config.f.deriv(t)).collect();
        Self { t0, h, n, t_nodes, t_mid, f_nodes, f_mid, df_nodes }
    }

    fn sample(&self, config: &SimConfig, kind: PathKind, rng: &mut ChaCha8Rng) -> Path {
        let m2 = config.m * config.m;
        let a = (-m2 * self.h).exp();
        let sd0 = (1.0 / (2.0 * m2)).sqrt();
        let sd_step = ((1.0 - a * a) / (2.0 * m2)).sqrt();
        let mut phi = Vec::with_capacity(self.n + 1);
        let mut db = Vec::with_capacity(self.n);
        let z0: f64 = StandardNormal.sample(rng);
        phi.push(sd0 * z0);
        for i in 0..self.n {
            let cur = phi[i];
            let drift = match kind {
                PathKind::Ou => 0.0,
                PathKind::Sde => {
                    -self.h * a * self.f_nodes[i] * config.v.deriv(cur)
                }
            };
            let z: f64 = StandardNormal.sample(rng);
            let next = a * cur + drift + sd_step * z;
            // Brownian increment consistent with the scheme: midpoint for
            // the linear part, explicit node for the drift.
            let mut inc = next - cur + m2 * self.h * 0.5 * (cur + next);
            if kind == PathKind::Sde {
                inc += self.h * self.f_nodes[i] * config.v.deriv(cur);
            }
            phi.push(next);
            db.push(inc);
        }
        Path { t0: self.t0, h: self.h, phi, db }
    }
}

/// Exact OU transitions on [−T_support, 0], stationary start.
pub fn sample_ou_path(config: &SimConfig, rng: &mut ChaCha8Rng) -> Path {
    let n = config.n_steps();
    GridCache::new(config, -(n as f64) * config.h, n).sample(config, PathKind::Ou, rng)
}

/// Exponential Euler for ∂_tφ + m²φ + f(t)V′(φ) = ξ on [−T_support, 0],
/// stationary start (exact: the drift vanishes before t0).
pub fn solve_sde_path(config: &SimConfig, rng: &mut ChaCha8Rng) -> Path {
    let n = config.n_steps();
    GridCache::new(config, -(n as f64) * config.h, n).sample(config, PathKind::Sde, rng)
}

fn trapezoid(vals: &[f64], h: f64) -> f64 {
    if vals.len() < 2 {
        return 0.0;
    }
    let inner: f64 = vals[1..vals.len() - 1].iter().sum();
    h * (0.5 * vals[0] + inner + 0.5 * vals[vals.len() - 1])
}

fn weight_direct_cached(path: &Path, cache: &GridCache, v: &ScalarFn) -> f64 {
    let vals: Vec<f64> = path
        .phi
        .iter()
        .zip(&cache.df_nodes)
        .map(|(&x, &df)| df * v.eval(x))
        .collect();
    (-2.0 * trapezoid(&vals, path.h)).exp()
}

fn weight_girsanov_cached(path: &Path, cache: &GridCache, v: &ScalarFn) -> f64 {
    let riemann: Vec<f64> = (0..path.phi.len())
        .map(|i| {
            let x = path.phi[i];
            let fv1 = cache.f_nodes[i] * v.deriv(x);
            0.5 * cache.f_nodes[i] * v.deriv_n(2, x) - 0.5 * fv1 * fv1
                - 2.0 * cache.df_nodes[i] * v.eval(x)
        })
        .collect();
    let mut strat = 0.0;
    for i in 0..path.n_steps() {
        let mid = 0.5 * (path.phi[i] + path.phi[i + 1]);
        strat += cache.f_mid[i] * v.deriv(mid) * path.db[i];
    }
    (trapezoid(&riemann, path.h) - strat).exp()
}

/// exp(−2∫ f′(t)V(φ(t))dt), the reweighting of Theorem-level direct
/// estimates; trapezoid rule on the path grid.
pub fn weight_direct(path: &Path, config: &SimConfig) -> f64 {
    let cache = GridCache::new(config, path.t0, path.n_steps());
    weight_direct_cached(path, &cache, &config.v)
}

/// exp(S) with S = ∫[½fV″(φ) − ½(fV′(φ))² − 2f′V(φ)]dt − ∮fV′(φ)∘dB,
/// Stratonovich part by midpoint in time and state.
pub fn weight_girsanov(path: &Path, config: &SimConfig) -> f64 {
    let cache = GridCache::new(config, path.t0, path.n_steps());
    weight_girsanov_cached(path, &cache, &config.v)
}

/// Midpoint discretization Σ g(t_{n+½}, ½(φ_n+φ_{n+1}))·ΔB_n.
pub fn stratonovich_integral(path: &Path, g: impl Fn(f64, f64) -> f64) -> f64 {
    let mut total = 0.0;
    for i in 0..path.n_steps() {
        let tm = path.t0 + (i as f64 + 0.5) * path.h;
        let mid = 0.5 * (path.phi[i] + path.phi[i + 1]);
        total += g(tm, mid) * path.db[i];
    }
    total
}

#[derive(Clone, Copy, Debug)]
pub struct Estimate {
    pub mean: f64,
    pub std_err: f64,
    pub n: usize,
}

impl Estimate {
    /// Mean and standard error with fixed pairwise summation order.
    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len();
        let mean = pairwise_sum(xs) / n as f64;
        let sq: Vec<f64> = xs.iter().map(|&x| (x - mean) * (x - mean)).collect();
        let var = if n > 1 { pairwise_sum(&sq) / (n - 1) as f64 } else { 0.0 };
        Estimate { mean, std_err: (var / n as f64).sqrt(), n }
    }
}

/// Self-normalized ratio Σnum/Σden with a delta-method standard error.
pub fn ratio_estimate(num: &[f64], den: &[f64]) -> Estimate {
    assert_eq!(num.len(), den.len());
    let n = num.len();
    let nf = n as f64;
    let a = pairwise_sum(num) / nf;
    let w = pairwise_sum(den) / nf;
    let r = a / w;
    let resid: Vec<f64> = num
        .iter()
        .zip(den)
        .map(|(&ai, &wi)| {
            let d = ai - r * wi;
            d * d
        })
        .collect();
    let var = if n > 1 { pairwise_sum(&resid) / (nf - 1.0) } else { 0.0 };
    Estimate { mean: r, std_err: (var / nf).sqrt() / w.abs(), n }
}

/// Run `stat` over the full ensemble in parallel; the collected order is
/// the path index order, so downstream reductions are reproducible.
fn par_paths<T: Send>(
    config: &SimConfig,
    cache: &GridCache,
    kind: PathKind,
    stat: impl Fn(&Path) -> T + Sync,
) -> Vec<T> {
    (0..config.n_paths as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = path_rng(config.master_seed, i);
            let path = cache.sample(config, kind, &mut rng);
            stat(&path)
        })
        .collect()
}

/// Normalized Gibbs expectation ∫F e^{−m²x²−2V}dx / ∫e^{−m²x²−2V}dx by
/// adaptive quadrature; `breakpoints` split the domain at discontinuities
/// of F.
pub fn gibbs_expectation_fn(
    config: &SimConfig,
    f_obs: &dyn Fn(f64) -> f64,
    breakpoints: &[f64],
    quad_tol: f64,
) -> Result<f64, SdeError> {
    let m2 = config.m * config.m;
    let v = config.v.clone();
    let density = move |x: f64| (-m2 * x * x - 2.0 * v.eval(x)).exp();
    // V bounded: the Gaussian factor below 1e−16 of its peak bounds the tail
    let mut vmax = 0.0f64;
    for k in -100..=100 {
        vmax = vmax.max(config.v.eval(k as f64 * 0.5).abs());
    }
    let bound = ((16.0 * std::f64::consts::LN_10 + 4.0 * vmax) / m2).sqrt() + 1.0;
    let mut cuts = vec![-bound, bound];
    cuts.extend(breakpoints.iter().copied().filter(|b| b.abs() < bound));
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut num = 0.0;
    let mut den = 0.0;
    for pair in cuts.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        num += quad::integrate(|x| f_obs(x) * density(x), a, b, quad_tol)?;
        den += quad::integrate(&density, a, b, quad_tol)?;
    }
    Ok(num / den)
}

pub fn gibbs_expectation(
    config: &SimConfig,
    obs: Observable,
    quad_tol: f64,
) -> Result<f64, SdeError> {
    let breaks: &[f64] = match obs {
        Observable::IndicatorPositive => &[0.0],
        _ => &[],
    };
    gibbs_expectation_fn(config, &|x| obs.eval(x), breaks, quad_tol)
}

/// ∫F(x)·n_{0,1/(2m²)}(x)dx against the normalized Gaussian density.
pub fn gaussian_expectation(
    m: f64,
    f_obs: &dyn Fn(f64) -> f64,
    breakpoints: &[f64],
    quad_tol: f64,
) -> Result<f64, SdeError> {
    let m2 = m * m;
    let norm = (m2 / std::f64::consts::PI).sqrt();
    let bound = (16.0 * std::f64::consts::LN_10 / m2).sqrt() + 1.0;
    let mut cuts = vec![-bound, bound];
    cuts.extend(breakpoints.iter().copied().filter(|b| b.abs() < bound));
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut total = 0.0;
    for pair in cuts.windows(2) {
        total += quad::integrate(
            |x| f_obs(x) * norm * (-m2 * x * x).exp(),
            pair[0],
            pair[1],
            quad_tol,
        )?;
    }
    Ok(total)
}

#[derive(Clone, Copy, Debug)]
pub struct MainReport {
    pub observable: Observable,
    /// Ratio estimate over SDE paths with the direct weight.
    pub e1: Estimate,
    /// Ratio estimate over OU paths with the Girsanov weight.
    pub e2: Estimate,
    /// Gibbs quadrature reference.
    pub e3: f64,
}

/// The three-way comparison behind the main identity: SDE paths with the
/// direct weight, OU paths with the Girsanov weight, Gibbs quadrature.
pub fn verify_main_theorem(
    config: &SimConfig,
    observables: &[Observable],
) -> Result<Vec<MainReport>, SdeError> {
    config.validate()?;
    let n = config.n_steps();
    let cache = GridCache::new(config, -(n as f64) * config.h, n);
    let v = config.v.clone();
    let obs = observables.to_vec();
    let sde_stats: Vec<(f64, Vec<f64>)> = par_paths(config, &cache, PathKind::Sde, |path| {
        let w = weight_direct_cached(path, &cache, &v);
        let x = path.terminal();
        (w, obs.iter().map(|o| o.eval(x) * w).collect())
    });
    let ou_stats: Vec<(f64, Vec<f64>)> = par_paths(config, &cache, PathKind::Ou, |path| {
        let w = weight_girsanov_cached(path, &cache, &v);
        let x = path.terminal();
        (w, obs.iter().map(|o| o.eval(x) * w).collect())
    });
    let mut out = Vec::with_capacity(observables.len());
    for (j, &o) in observables.iter().enumerate() {
        let sde_w: Vec<f64> = sde_stats.iter().map(|s| s.0).collect();
        let sde_fw: Vec<f64> = sde_stats.iter().map(|s| s.1[j]).collect();
        let ou_w: Vec<f64> = ou_stats.iter().map(|s| s.0).collect();
        let ou_fw: Vec<f64> = ou_stats.iter().map(|s| s.1[j]).collect();
        out.push(MainReport {
            observable: o,
            e1: ratio_estimate(&sde_fw, &sde_w),
            e2: ratio_estimate(&ou_fw, &ou_w),
            e3: gibbs_expectation(config, o, config.quad_tol)?,
        });
    }
    Ok(out)
}

/// Monte Carlo value of ⟨F(Φ(0)) exp(∫G·(−H)(Φ))⟩ over OU paths:
/// the weight is exp(½∫G_∅H″(φ) − ∮G_∅H′(φ)∘dB − ½∫(G_∅H′(φ))² − ∫G_θθ̄H(φ)),
/// the quadratic term being the integrated-out imaginary noise.
pub fn super_expectation_estimate(
    config: &SimConfig,
    obs: Observable,
    g_sf: &SuperFunction,
    h_fn: &ScalarFn,
) -> Result<Estimate, SdeError> {
    let n = config.n_steps();
    let cache = GridCache::new(config, -(n as f64) * config.h, n);
    for &t in &cache.t_nodes {
        if g_sf.f_theta.eval(t).abs() > 1e-12 || g_sf.f_thetabar.eval(t).abs() > 1e-12 {
            return Err(SdeError::OddComponent);
        }
    }
    let g0: Vec<f64> = cache.t_nodes.iter().map(|&t| g_sf.f_empty.eval(t)).collect();
    let g0_mid: Vec<f64> = cache.t_mid.iter().map(|&t| g_sf.f_empty.eval(t)).collect();
    let gtt: Vec<f64> = cache.t_nodes.iter().map(|&t| g_sf.f_thetathetabar.eval(t)).collect();
    let h_fn = h_fn.clone();
    let vals = par_paths(config, &cache, PathKind::Ou, |path| {
        let riemann: Vec<f64> = (0..path.phi.len())
            .map(|i| {
                let x = path.phi[i];
                let gh1 = g0[i] * h_fn.deriv(x);
                0.5 * g0[i] * h_fn.deriv_n(2, x) - 0.5 * gh1 * gh1 - gtt[i] * h_fn.eval(x)
            })
            .collect();
        let mut strat = 0.0;
        for i in 0..path.n_steps() {
            let mid = 0.5 * (path.phi[i] + path.phi[i + 1]);
            strat += g0_mid[i] * h_fn.deriv(mid) * path.db[i];
        }
        let l = trapezoid(&riemann, path.h) - strat;
        obs.eval(path.terminal()) * l.exp()
    });
    Ok(Estimate::from_samples(&vals))
}

/// Monte Carlo value of ⟨φ(0)^p · X^k⟩ for the polynomial insertion
/// X = ∫G·(−... ) with G the supersymmetric lift of the cutoff f and
/// polynomial H = P; k ≤ 2. The k = 2 case subtracts the conditional
/// variance of the imaginary-noise term (X² ↦ U² − ∫(fP′(φ))²dt).
pub fn super_poly_expectation_estimate(
    config: &SimConfig,
    phi0_power: u32,
    p: &Polynomial,
    k: usize,
) -> Result<Estimate, SdeError> {
    if !(1..=2).contains(&k) {
        return Err(SdeError::InvalidConfig("polynomial order k must be 1 or 2".into()));
    }
    let n = config.n_steps();
    let cache = GridCache::new(config, -(n as f64) * config.h, n);
    let dp = p.deriv();
    let ddp = dp.deriv();
    let p = p.clone();
    let vals = par_paths(config, &cache, PathKind::Ou, |path| {
        let riemann: Vec<f64> = (0..path.phi.len())
            .map(|i| {
                let x = path.phi[i];
                -2.0 * cache.df_nodes[i] * p.eval(x) + 0.5 * cache.f_nodes[i] * ddp.eval(x)
            })
            .collect();
        let mut strat = 0.0;
        for i in 0..path.n_steps() {
            let mid = 0.5 * (path.phi[i] + path.phi[i + 1]);
            strat += cache.f_mid[i] * dp.eval(mid) * path.db[i];
        }
        let u = trapezoid(&riemann, path.h) - strat;
        let x_k = if k == 1 {
            u
        } else {
            let sq: Vec<f64> = (0..path.phi.len())
                .map(|i| {
                    let g = cache.f_nodes[i] * dp.eval(path.phi[i]);
                    g * g
                })
                .collect();
            u * u - trapezoid(&sq, path.h)
        };
        path.terminal().powi(phi0_power as i32) * x_k
    });
    Ok(Estimate::from_samples(&vals))
}

/// Mollified-noise vs Stratonovich comparison for the integrand
/// g(t, x) on one noise realization; returns (ε, |discrepancy|) pairs.
fn wong_zakai_core(
    config: &SimConfig,
    g: &dyn Fn(f64, f64) -> f64,
    epsilons: &[f64],
) -> Result<Vec<(f64, f64)>, SdeError> {
    for &eps in epsilons {
        if eps <= 2.0 * config.h {
            return Err(SdeError::EpsilonTooSmall { eps, h: config.h });
        }
    }
    let eps_max = epsilons.iter().cloned().fold(0.0, f64::max);
    let h = config.h;
    // margin past the cutoff support so every convolution window with
    // a nonzero integrand stays inside the grid
    let n_margin = (2.0 * eps_max / h).ceil() as usize + 2;
    let n_half = (config.t_support / h).round() as usize;
    let n = 2 * (n_half + n_margin);
    let t0 = -((n_half + n_margin) as f64) * h;
    let cache = GridCache::new(config, t0, n);
    let mut rng = path_rng(config.master_seed, 0);
    let path = cache.sample(config, PathKind::Ou, &mut rng);
    // reference: midpoint Stratonovich sum of g over the whole grid
    let mut reference = 0.0;
    for i in 0..n {
        let mid = 0.5 * (path.phi[i] + path.phi[i + 1]);
        reference += g(cache.t_mid[i], mid) * path.db[i];
    }
    let mut out = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        let w = (eps / h).ceil() as isize;
        let rho = |u: f64| {
            let a = 1.0 - u.abs() / eps;
            if a > 0.0 {
                a / eps
            } else {
                0.0
            }
        };
        let mut total = 0.0;
        for j in 0..=n {
            let t = cache.t_nodes[j];
            if t.abs() > config.t_support {
                continue; // cutoff factor vanishes there for our integrands
            }
            let jl = (j as isize - w - 1).max(0) as usize;
            let jr = ((j as isize + w + 1) as usize).min(n);
            let mut omega_eps = 0.0;
            let mut phi_eps = 0.0;
            for i in jl..jr {
                omega_eps += rho(t - cache.t_mid[i]) * path.db[i];
                phi_eps += rho(t - cache.t_nodes[i]) * path.phi[i] * h;
            }
            total += g(t, phi_eps) * omega_eps * h;
        }
        out.push((eps, (total - reference).abs()));
    }
    Ok(out)
}

/// Wong–Zakai check for the drift integrand f(t)V′(x) of the config.
pub fn wong_zakai_check(
    config: &SimConfig,
    epsilons: &[f64],
) -> Result<Vec<(f64, f64)>, SdeError> {
    let f = config.f.clone();
    let v = config.v.clone();
    wong_zakai_core(config, &move |t, x| f.eval(t) * v.deriv(x), epsilons)
}

/// Weighted two-point asymmetry E[φ(s)φ(t)] − E[φ(−s)φ(−t)] on the
/// extended window [−T, T] under the path law reweighted by
/// exp(−∫f′(t)V(φ(t))dt); that reweighted law is exactly invariant under
/// t ↦ −t (its density against the reversible OU law is even under time
/// reversal), so each estimate should vanish within noise.
pub fn time_reversal_check(
    config: &SimConfig,
    pairs: &[(f64, f64)],
) -> Result<Vec<(f64, f64, Estimate)>, SdeError> {
    config.validate()?;
    let n_half = config.n_steps();
    let n = 2 * n_half;
    let t0 = -(n_half as f64) * config.h;
    let cache = GridCache::new(config, t0, n);
    let v = config.v.clone();
    let pairs_owned = pairs.to_vec();
    let stats: Vec<(f64, Vec<f64>)> = par_paths(config, &cache, PathKind::Sde, |path| {
        let vals: Vec<f64> = path
            .phi
            .iter()
            .zip(&cache.df_nodes)
            .map(|(&x, &df)| df * v.eval(x))
            .collect();
        let w = (-trapezoid(&vals, path.h)).exp();
        let diffs = pairs_owned
            .iter()
            .map(|&(s, t)| {
                w * (path.value_at(s) * path.value_at(t)
                    - path.value_at(-s) * path.value_at(-t))
            })
            .collect();
        (w, diffs)
    });
    let ws: Vec<f64> = stats.iter().map(|s| s.0).collect();
    let mut out = Vec::with_capacity(pairs.len());
    for (j, &(s, t)) in pairs.iter().enumerate() {
        let num: Vec<f64> = stats.iter().map(|st| st.1[j]).collect();
        out.push((s, t, ratio_estimate(&num, &ws)));
    }
    Ok(out)
}

/// First four marginal moments of φ(t0) over the ensemble (stationarity
/// diagnostics).
pub fn initial_moments(config: &SimConfig) -> Vec<Estimate> {
    let n = config.n_steps();
    let cache = GridCache::new(config, -(n as f64) * config.h, n);
    let stats: Vec<[f64; 4]> = par_paths(config, &cache, PathKind::Sde, |path| {
        let x = path.phi[0];
        [x, x * x, x * x * x, x * x * x * x]
    });
    (0..4)
        .map(|k| {
            let xs: Vec<f64> = stats.iter().map(|s| s[k]).collect();
            Estimate::from_samples(&xs)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn small_config(n_paths: usize) -> SimConfig {
        let mut c = SimConfig::standard();
        c.h = 1.0 / 64.0;
        c.n_paths = n_paths;
        c
    }

    #[test]
    fn config_validation() {
        assert!(SimConfig::standard().validate().is_ok());
        let mut c = SimConfig::standard();
        c.h = 0.0;
        assert!(c.validate().is_err());
        let mut c = SimConfig::standard();
        c.f = ScalarFn::constant(1.0); // not compactly supported
        assert!(c.validate().is_err());
        let mut c = SimConfig::standard();
        c.f = ScalarFn::bump(1.0).scale(0.5); // f(0) ≠ 1
        assert!(c.validate().is_err());
        let mut c = SimConfig::standard();
        c.v = ScalarFn::poly(&[0.0, 1.0]); // unbounded
        assert!(c.validate().is_err());
    }

    #[test]
    fn ou_marginal_and_lag_covariance() {
        let mut c = small_config(20_000);
        c.t_support = 2.0;
        let n = c.n_steps();
        let cache = GridCache::new(&c, -(n as f64) * c.h, n);
        let stats: Vec<(f64, f64)> = (0..c.n_paths as u64)
            .map(|i| {
                let mut rng = path_rng(c.master_seed, i);
                let p = cache.sample(&c, PathKind::Ou, &mut rng);
                (p.terminal(), p.value_at(-1.0))
            })
            .collect();
        let var: Vec<f64> = stats.iter().map(|s| s.0 * s.0).collect();
        let lag: Vec<f64> = stats.iter().map(|s| s.0 * s.1).collect();
        let var_e = Estimate::from_samples(&var);
        let lag_e = Estimate::from_samples(&lag);
        assert!((var_e.mean - 0.5).abs() < 3.0 * var_e.std_err, "var {:?}", var_e);
        let lag_ref = 0.5 * (-1.0f64).exp();
        assert!((lag_e.mean - lag_ref).abs() < 3.0 * lag_e.std_err, "lag {:?}", lag_e);
    }

    #[test]
    fn ou_transitions_exact_in_h() {
        // node distribution does not depend on the step size
        let mut moments = Vec::new();
        for h in [1.0 / 16.0, 1.0 / 64.0] {
            let mut c = small_config(20_000);
            c.h = h;
            let n = c.n_steps();
            let cache = GridCache::new(&c, -(n as f64) * c.h, n);
            let xs: Vec<f64> = (0..c.n_paths as u64)
                .map(|i| {
                    let mut rng = path_rng(c.master_seed + 9, i);
                    cache.sample(&c, PathKind::Ou, &mut rng).terminal()
                })
                .map(|x| x * x)
                .collect();
            moments.push(Estimate::from_samples(&xs));
        }
        let d = (moments[0].mean - moments[1].mean).abs();
        let se = (moments[0].std_err.powi(2) + moments[1].std_err.powi(2)).sqrt();
        assert!(d < 3.0 * se, "{moments:?}");
    }

    #[test]
    fn sde_reduces_to_ou_without_potential() {
        let mut c = small_config(10_000);
        c.v = ScalarFn::zero();
        let n = c.n_steps();
        let cache = GridCache::new(&c, -(n as f64) * c.h, n);
        for i in 0..50u64 {
            let mut r1 = path_rng(c.master_seed, i);
            let mut r2 = path_rng(c.master_seed, i);
            let a = cache.sample(&c, PathKind::Ou, &mut r1);
            let b = cache.sample(&c, PathKind::Sde, &mut r2);
            for (x, y) in a.phi.iter().zip(&b.phi) {
                assert_relative_eq!(x, y);
            }
            for (x, y) in a.db.iter().zip(&b.db) {
                assert_relative_eq!(x, y);
            }
        }
    }

    #[test]
    fn linear_drift_shifts_mean_negative() {
        let mut c = small_config(5_000);
        c.v = ScalarFn::poly(&[0.0, 0.5]); // V = x/2, V' = 1/2 > 0
        let n = c.n_steps();
        let cache = GridCache::new(&c, -(n as f64) * c.h, n);
        let xs: Vec<f64> = (0..c.n_paths as u64)
            .map(|i| {
                let mut rng = path_rng(7, i);
                cache.sample(&c, PathKind::Sde, &mut rng).terminal()
            })
            .collect();
        let e = Estimate::from_samples(&xs);
        assert!(e.mean < -3.0 * e.std_err, "{e:?}");
    }

    #[test]
    fn weight_direct_cases() {
        let mut c = small_config(1);
        let mut rng = path_rng(1, 0);
        let path = solve_sde_path(&c, &mut rng);
        c.v = ScalarFn::zero();
        assert_relative_eq!(weight_direct(&path, &c), 1.0);
        c.v = ScalarFn::constant(0.7);
        // ∫f' over [−T, 0] = f(0) − f(−T) = 1, up to trapezoid error at this h
        assert_relative_eq!(
            weight_direct(&path, &c),
            (-1.4f64).exp(),
            epsilon = 5e-4
        );
        // constant potential: the Girsanov weight collapses to the same value
        assert_relative_eq!(
            weight_girsanov(&path, &c),
            weight_direct(&path, &c),
            epsilon = 1e-14
        );
    }

    #[test]
    fn stratonovich_identities() {
        let c = small_config(1);
        let mut rng = path_rng(3, 0);
        let path = sample_ou_path(&c, &mut rng);
        let sum: f64 = path.db.iter().sum();
        assert_relative_eq!(stratonovich_integral(&path, |_, _| 1.0), sum, epsilon = 1e-12);
        // with φ replaced by B, midpoint sums telescope exactly
        let mut b_nodes = vec![0.0];
        for &d in &path.db {
            b_nodes.push(b_nodes.last().unwrap() + d);
        }
        let bpath = Path { t0: path.t0, h: path.h, phi: b_nodes.clone(), db: path.db.clone() };
        let lhs = stratonovich_integral(&bpath, |_, x| x);
        let b_end = *b_nodes.last().unwrap();
        assert_relative_eq!(lhs, 0.5 * b_end * b_end, epsilon = 1e-12);
    }

    #[test]
    fn gibbs_quadrature_references() {
        let mut c = SimConfig::standard();
        c.v = ScalarFn::zero();
        let x2 = gibbs_expectation_fn(&c, &|x| x * x, &[], 1e-10).unwrap();
        assert_relative_eq!(x2, 0.5, epsilon = 1e-8);
        let cosv = gibbs_expectation(&c, Observable::Cos, 1e-10).unwrap();
        assert_relative_eq!(cosv, (-0.25f64).exp(), epsilon = 1e-8);
        let half = gibbs_expectation(&c, Observable::IndicatorPositive, 1e-10).unwrap();
        assert_relative_eq!(half, 0.5, epsilon = 1e-8);
        let c = SimConfig::standard();
        let v = gibbs_expectation(&c, Observable::Cos, 1e-10).unwrap();
        // frozen high-resolution oracle value
        assert_relative_eq!(v, 0.6749423189788106, epsilon = 1e-9);
    }

    #[test]
    fn gaussian_expectation_reference() {
        let v = gaussian_expectation(1.0, &|x| x.cos(), &[], 1e-10).unwrap();
        assert_relative_eq!(v, (-0.25f64).exp(), epsilon = 1e-8);
    }

    #[test]
    fn main_theorem_small_ensemble() {
        let mut c = SimConfig::standard();
        c.h = 1.0 / 128.0;
        c.n_paths = 4_000;
        let reports = verify_main_theorem(&c, &[Observable::Cos]).unwrap();
        let r = &reports[0];
        let tol1 = 3.0 * (r.e1.std_err + 1e-6);
        let tol2 = 3.0 * (r.e2.std_err + 1e-6);
        assert!((r.e1.mean - r.e3).abs() < tol1, "{r:?}");
        assert!((r.e2.mean - r.e3).abs() < tol2, "{r:?}");
        let comb = (r.e1.std_err.powi(2) + r.e2.std_err.powi(2)).sqrt();
        assert!((r.e1.mean - r.e2.mean).abs() < 3.0 * comb, "{r:?}");
    }

    #[test]
    fn super_expectation_trivial_weights() {
        let mut c = SimConfig::standard();
        c.h = 1.0 / 64.0;
        c.n_paths = 2_000;
        let zero = SuperFunction::new(
            ScalarFn::zero(),
            ScalarFn::zero(),
            ScalarFn::zero(),
            ScalarFn::zero(),
        );
        let e = super_expectation_estimate(&c, Observable::Cos, &zero, &c.v.clone()).unwrap();
        let xs: Vec<f64> = {
            let n = c.n_steps();
            let cache = GridCache::new(&c, -(n as f64) * c.h, n);
            (0..c.n_paths as u64)
                .map(|i| {
                    let mut rng = path_rng(c.master_seed, i);
                    cache.sample(&c, PathKind::Ou, &mut rng).terminal().cos()
                })
                .collect()
        };
        let plain = Estimate::from_samples(&xs);
        assert_relative_eq!(e.mean, plain.mean, epsilon = 1e-12);

        // constant H: deterministic weight exp(−∫G_θθ̄·c) = exp(−2c)
        let g = crate::superfunction::lift_supersymmetric(&c.f);
        let e2 =
            super_expectation_estimate(&c, Observable::Cos, &g, &ScalarFn::constant(0.7))
                .unwrap();
        let expected = plain.mean * (-1.4f64).exp();
        assert!((e2.mean - expected).abs() < 1e-4, "{} vs {}", e2.mean, expected);
    }

    #[test]
    fn super_expectation_rejects_odd_components() {
        let c = small_config(10);
        let g = SuperFunction::new(
            ScalarFn::constant(1.0),
            ScalarFn::constant(0.5),
            ScalarFn::zero(),
            ScalarFn::zero(),
        );
        assert!(matches!(
            super_expectation_estimate(&c, Observable::Cos, &g, &c.v.clone()),
            Err(SdeError::OddComponent)
        ));
    }

    #[test]
    fn wong_zakai_rejects_small_epsilon() {
        let c = SimConfig::standard();
        assert!(matches!(
            wong_zakai_check(&c, &[c.h]),
            Err(SdeError::EpsilonTooSmall { .. })
        ));
    }

    #[test]
    fn wong_zakai_deterministic_integrand() {
        // F(t, x) = f(t): mollified and midpoint integrals agree to O(ε)
        let mut c = SimConfig::standard();
        c.h = (2.0f64).powi(-9);
        let f = c.f.clone();
        let rows = wong_zakai_core(&c, &move |t, _| f.eval(t), &[0.05]).unwrap();
        assert!(rows[0].1 < 0.05, "{rows:?}");
    }

    #[test]
    fn time_reversal_two_point_symmetry() {
        let mut c = SimConfig::standard();
        c.h = 1.0 / 256.0;
        c.n_paths = 20_000;
        let rows = time_reversal_check(&c, &[(0.0, 0.5), (0.25, 0.5)]).unwrap();
        for (s, t, e) in rows {
            assert!(
                e.mean.abs() <= 3.0 * e.std_err,
                "asymmetry at ({s},{t}): {e:?}"
            );
        }
    }

    #[test]
    fn time_reversal_needs_the_weight() {
        // negative control: without the exp(−∫f′V) reweighting the cutoff
        // dynamics has a measurably asymmetric two-point function, so the
        // symmetry test above is sensitive, not vacuous
        let mut c = SimConfig::standard();
        c.h = 1.0 / 256.0;
        c.n_paths = 20_000;
        let n_half = c.n_steps();
        let n = 2 * n_half;
        let cache = GridCache::new(&c, -(n_half as f64) * c.h, n);
        let diffs: Vec<f64> = (0..c.n_paths as u64)
            .map(|i| {
                let mut rng = path_rng(c.master_seed, i);
                let p = cache.sample(&c, PathKind::Sde, &mut rng);
                p.value_at(0.0) * p.value_at(0.5) - p.value_at(-0.0) * p.value_at(-0.5)
            })
            .collect();
        let e = Estimate::from_samples(&diffs);
        assert!(e.mean.abs() > 3.0 * e.std_err, "unexpectedly symmetric: {e:?}");
    }

    #[test]
    fn stationarity_of_initial_node() {
        let mut c = small_config(20_000);
        c.n_paths = 20_000;
        let moments = initial_moments(&c);
        let refs = [0.0, 0.5, 0.0, 0.75];
        for (e, r) in moments.iter().zip(refs) {
            assert!((e.mean - r).abs() < 3.0 * e.std_err, "{e:?} vs {r}");
        }
    }
}
