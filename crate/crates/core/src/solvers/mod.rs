//! Accelerated proximal-gradient reconstruction.
//!
//! - [`fista`]: l1 (standard) or cross-channel l2,1 (joint) penalty on the
//!   wavelet coefficients, with closed-form proximal steps.
//! - [`fista_structured`]: overlapping-group penalty (tree or forest) made
//!   separable with the duplication map `G` and an auxiliary variable `z`.
//!   Each outer iteration sets `z = shrinkgroup(G Phi x, lambda/gamma)` and
//!   takes one accelerated gradient step on
//!   `f(x) = 0.5 ||A x - b||^2 + gamma/2 ||z - G Phi x||^2`.
//! - [`fcsa`] / [`fcsa_structured`]: the same iterations with an isotropic
//!   TV term, combining the sparsity and TV proximal results by averaging.
//!
//! Every solver starts from `x0 = A^T b` and uses the monotone form of the
//! accelerated step: a candidate that would increase the objective is not
//! accepted (the iterate stays put while the momentum sequence advances),
//! so the objective trace is non-increasing. Accepted steps are exactly the
//! plain accelerated updates.

mod prox;
mod tv;

pub use prox::{analysis, prox_l1, prox_l1_signal, prox_l21_joint, synthesis};
pub use tv::{prox_tv, tv_norm};

use std::time::Instant;

use crate::bench::metrics::snr;
use crate::error::{check_len, Error, Result};
use crate::groups::{
    build_duplication_map, build_group_layout, l21_unchecked, shrinkgroup_in_place,
    DuplicationMap, GroupLayout,
};
use crate::model::SparsityModel;
use crate::operators::{estimate_spectral_norm, MeasurementOperator};
use crate::signal::{norm2, MultiChannelSignal, Shape};
use crate::wavelet::WaveletBasis;
use prox::{joint_l21, joint_shrink_in_place, soft_threshold_in_place};

/// Default regularization weight.
pub const DEFAULT_LAMBDA: f64 = 0.035;
/// Default TV weight for the TV-combined variants.
pub const DEFAULT_MU: f64 = 0.001;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub lambda: f64,
    /// Coupling weight; `None` means `0.5 * lambda`.
    pub gamma: Option<f64>,
    /// TV weight; 0 disables TV.
    pub mu: f64,
    /// Step size; `None` means `1 / L_f` from a power-iteration estimate.
    pub rho: Option<f64>,
    /// Known `||A||_2`, skipping the power iteration when `rho` is unset.
    pub op_norm: Option<f64>,
    pub max_iters: usize,
    /// Relative iterate change below which the solver stops.
    pub tol: f64,
    pub tv_inner_iters: usize,
    pub power_iters: usize,
    /// Multiplier on the estimated `||A||^2` inside `L_f`.
    pub lipschitz_safety: f64,
    /// Reject candidates that increase the objective.
    pub monotone: bool,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            lambda: DEFAULT_LAMBDA,
            gamma: None,
            mu: 0.0,
            rho: None,
            op_norm: None,
            max_iters: 400,
            tol: 1e-6,
            tv_inner_iters: 10,
            power_iters: 100,
            lipschitz_safety: 1.05,
            monotone: true,
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn gamma(&self) -> f64 {
        self.gamma.unwrap_or(0.5 * self.lambda)
    }

    fn validate(&self, structured: bool) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if !(self.lambda > 0.0) {
            return bad(format!("lambda must be > 0, got {}", self.lambda));
        }
        if structured && !(self.gamma() > 0.0) {
            return bad(format!("gamma must be > 0, got {}", self.gamma()));
        }
        if !(self.mu >= 0.0) {
            return bad(format!("mu must be >= 0, got {}", self.mu));
        }
        if let Some(rho) = self.rho {
            if !(rho > 0.0) {
                return bad(format!("step size must be > 0, got {rho}"));
            }
        }
        if self.max_iters == 0 {
            return bad("max_iters must be >= 1".into());
        }
        Ok(())
    }
}

/// Measurement data plus the sparsifying basis shared by all channels.
#[derive(Debug, Clone, Copy)]
pub struct Problem<'a> {
    pub op: &'a MeasurementOperator,
    pub b: &'a [f64],
    pub basis: &'a WaveletBasis,
    pub channels: usize,
    /// Ground truth, when known; enables the SNR trace.
    pub truth: Option<&'a MultiChannelSignal>,
}

impl<'a> Problem<'a> {
    pub fn new(
        op: &'a MeasurementOperator,
        b: &'a [f64],
        basis: &'a WaveletBasis,
        channels: usize,
    ) -> Result<Self> {
        if channels == 0 {
            return Err(Error::InvalidParameter("channel count must be >= 1".into()));
        }
        check_len("operator input", channels * basis.len(), op.input_dim())?;
        check_len("measurements", op.output_dim(), b.len())?;
        Ok(Self {
            op,
            b,
            basis,
            channels,
            truth: None,
        })
    }

    pub fn with_truth(mut self, truth: &'a MultiChannelSignal) -> Self {
        self.truth = Some(truth);
        self
    }

    pub fn shape(&self) -> Shape {
        self.basis.shape()
    }

    pub fn dim(&self) -> usize {
        self.channels * self.basis.len()
    }

    fn residual(&self, x: &[f64]) -> Vec<f64> {
        let mut r = self.op.forward(x).expect("checked dims");
        for (ri, bi) in r.iter_mut().zip(self.b) {
            *ri -= bi;
        }
        r
    }

    fn tv(&self, x: &[f64]) -> f64 {
        let n = self.basis.len();
        x.chunks_exact(n).map(|c| tv_norm(c, self.shape())).sum()
    }
}

/// Momentum, iterate and auxiliary variable of an accelerated solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub x: Vec<f64>,
    pub r: Vec<f64>,
    pub t: f64,
    pub z: Option<Vec<f64>>,
    pub iter: usize,
}

/// `t_{n+1} = (1 + sqrt(1 + 4 t_n^2)) / 2`.
pub fn next_momentum(t: f64) -> f64 {
    (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0
}

#[derive(Debug, Clone)]
pub struct SolverResult {
    pub x_hat: MultiChannelSignal,
    /// Objective after each iteration.
    pub objective_trace: Vec<f64>,
    pub snr_trace: Option<Vec<f64>>,
    pub iters_run: usize,
    pub wall_time: f64,
    pub rho: f64,
    /// Iterations whose candidate was rejected by the monotone safeguard.
    pub rejected_steps: usize,
    pub final_state: SolverState,
}

/// Penalty attached to a solve.
#[derive(Debug, Clone, Copy)]
pub enum Penalty<'a> {
    /// `lambda * ||Phi x||_1`
    L1,
    /// `lambda * sum_i ||((Phi x)_{t,i})_t||_2`
    JointL21,
    /// `lambda * sum_g ||z_g||_2 + gamma/2 ||z - G Phi x||^2`
    Groups {
        layout: &'a GroupLayout,
        map: &'a DuplicationMap,
    },
}

/// `A^T (A x - b) + gamma Phi^T G^T (G Phi x - z)`; pass `coupling = None`
/// (or `gamma = 0`) for the plain least-squares gradient.
pub fn smooth_gradient(
    problem: &Problem,
    x: &[f64],
    gamma: f64,
    coupling: Option<(&DuplicationMap, &[f64])>,
) -> Result<Vec<f64>> {
    check_len("iterate", problem.dim(), x.len())?;
    let res = problem.residual(x);
    let mut g = problem.op.adjoint(&res)?;
    if let Some((map, z)) = coupling {
        check_len("auxiliary vector", map.rows(), z.len())?;
        check_len("duplication map", problem.dim(), map.n_coeffs())?;
        if gamma != 0.0 {
            let theta = analysis(problem.basis, x);
            let mut c = map.collapse(z)?;
            for ((ci, th), &m) in c.iter_mut().zip(&theta).zip(map.multiplicity()) {
                *ci = m as f64 * th - *ci;
            }
            let back = synthesis(problem.basis, &c);
            for (gi, bi) in g.iter_mut().zip(back) {
                *gi += gamma * bi;
            }
        }
    }
    Ok(g)
}

/// Objective value for the active penalty (TV term added when `mu > 0`).
/// For the group penalty `z` must be supplied.
pub fn evaluate_objective(
    problem: &Problem,
    x: &[f64],
    config: &SolverConfig,
    penalty: Penalty,
    z: Option<&[f64]>,
) -> Result<f64> {
    check_len("iterate", problem.dim(), x.len())?;
    let ax_b = problem.residual(x);
    let theta = analysis(problem.basis, x);
    let mut f = 0.5 * ax_b.iter().map(|v| v * v).sum::<f64>();
    f += match penalty {
        Penalty::L1 => config.lambda * theta.iter().map(|v| v.abs()).sum::<f64>(),
        Penalty::JointL21 => config.lambda * joint_l21(&theta, problem.channels, problem.basis.len()),
        Penalty::Groups { layout, map } => {
            let z = z.ok_or_else(|| {
                Error::InvalidParameter("group objective needs the auxiliary vector z".into())
            })?;
            check_len("auxiliary vector", map.rows(), z.len())?;
            let gx = map.expand(&theta)?;
            let gap: f64 = z.iter().zip(&gx).map(|(a, b)| (a - b).powi(2)).sum();
            config.lambda * l21_unchecked(z, layout.offsets()) + 0.5 * config.gamma() * gap
        }
    };
    if config.mu > 0.0 {
        f += config.mu * problem.tv(x);
    }
    Ok(f)
}

/// FISTA with the l1 (`Standard`) or l2,1 (`Joint`) penalty. `config.mu`
/// is ignored; use [`fcsa`] for the TV-combined variant.
pub fn fista(problem: &Problem, config: &SolverConfig, model: SparsityModel) -> Result<SolverResult> {
    let config = &SolverConfig { mu: 0.0, ..config.clone() };
    fcsa(problem, config, model)
}

/// Overlapping-group solver for tree and forest layouts. `config.mu` is
/// ignored; use [`fcsa_structured`] for the TV-combined variant.
pub fn fista_structured(
    problem: &Problem,
    config: &SolverConfig,
    layout: &GroupLayout,
) -> Result<SolverResult> {
    let config = &SolverConfig { mu: 0.0, ..config.clone() };
    fcsa_structured(problem, config, layout)
}

/// TV-combined FISTA for the standard or joint model. With `mu = 0` the
/// iterations are exactly those of [`fista`].
pub fn fcsa(problem: &Problem, config: &SolverConfig, model: SparsityModel) -> Result<SolverResult> {
    let penalty = match model {
        SparsityModel::Standard => Penalty::L1,
        SparsityModel::Joint => Penalty::JointL21,
        other => {
            return Err(Error::InvalidParameter(format!(
                "standard and joint models only; use the structured solver for {other}"
            )))
        }
    };
    run(problem, config, penalty)
}

/// TV-combined overlapping-group solver. With `mu = 0` the iterations are
/// exactly those of [`fista_structured`].
pub fn fcsa_structured(
    problem: &Problem,
    config: &SolverConfig,
    layout: &GroupLayout,
) -> Result<SolverResult> {
    check_len("group layout", problem.dim(), layout.n_coeffs())?;
    let map = build_duplication_map(layout);
    run(problem, config, Penalty::Groups { layout, map: &map })
}

/// Solves with the penalty of `model`, building tree/forest groups from the
/// basis' coefficient tree. TV is included when `config.mu > 0`.
pub fn solve(problem: &Problem, config: &SolverConfig, model: SparsityModel) -> Result<SolverResult> {
    match model.group_model() {
        None => fcsa(problem, config, model),
        Some(gm) => {
            let tree = problem.basis.tree_layout();
            let layout = build_group_layout(&tree, problem.channels, gm)?;
            fcsa_structured(problem, config, &layout)
        }
    }
}

/// Lipschitz constant of the smooth part and the step `1 / L_f`.
fn step_size(problem: &Problem, config: &SolverConfig, penalty: &Penalty) -> Result<f64> {
    if let Some(rho) = config.rho {
        return Ok(rho);
    }
    let norm = match config.op_norm {
        Some(n) => n,
        None => estimate_spectral_norm(problem.op, config.power_iters.max(1), config.seed)?,
    };
    let mut lf = config.lipschitz_safety * norm * norm;
    if let Penalty::Groups { map, .. } = penalty {
        lf += config.gamma() * map.max_multiplicity() as f64;
    }
    if !(lf > 0.0) {
        return Err(Error::InvalidParameter("operator has zero norm".into()));
    }
    Ok(1.0 / lf)
}

/// Iterate with cached `A x` and `Phi x`.
struct Point {
    x: Vec<f64>,
    residual: Vec<f64>,
    theta: Vec<f64>,
}

impl Point {
    fn new(problem: &Problem, x: Vec<f64>) -> Self {
        let residual = problem.residual(&x);
        let theta = analysis(problem.basis, &x);
        Self { x, residual, theta }
    }

    fn objective(&self, problem: &Problem, config: &SolverConfig, penalty: &Penalty, z: Option<&[f64]>) -> f64 {
        let mut f = 0.5 * self.residual.iter().map(|v| v * v).sum::<f64>();
        f += match penalty {
            Penalty::L1 => config.lambda * self.theta.iter().map(|v| v.abs()).sum::<f64>(),
            Penalty::JointL21 => {
                config.lambda * joint_l21(&self.theta, problem.channels, problem.basis.len())
            }
            Penalty::Groups { layout, map } => {
                let z = z.expect("group solve keeps z");
                let gap: f64 = map
                    .row_to_coeff()
                    .iter()
                    .zip(z)
                    .map(|(&c, zi)| (zi - self.theta[c]).powi(2))
                    .sum();
                config.lambda * l21_unchecked(z, layout.offsets()) + 0.5 * config.gamma() * gap
            }
        };
        if config.mu > 0.0 {
            f += config.mu * problem.tv(&self.x);
        }
        f
    }
}

fn run(problem: &Problem, config: &SolverConfig, penalty: Penalty) -> Result<SolverResult> {
    let structured = matches!(penalty, Penalty::Groups { .. });
    config.validate(structured)?;
    let start = Instant::now();
    let rho = step_size(problem, config, &penalty)?;
    let gamma = config.gamma();
    let n = problem.basis.len();
    let shape = problem.shape();

    let x0 = problem.op.adjoint(problem.b)?;
    let mut current = Point::new(problem, x0);
    let mut z: Option<Vec<f64>> = match penalty {
        Penalty::Groups { map, .. } => Some(map.expand(&current.theta)?),
        _ => None,
    };
    let mut r = current.x.clone();
    let mut t = 1.0;
    let mut trace = Vec::with_capacity(config.max_iters);
    let mut snr_trace = problem.truth.map(|_| Vec::with_capacity(config.max_iters));
    let mut rejected = 0;
    let mut iters = 0;

    for iter in 1..=config.max_iters {
        iters = iter;
        // z-step at the previous iterate
        if let (Penalty::Groups { layout, map }, Some(zv)) = (&penalty, z.as_mut()) {
            for (zi, &c) in zv.iter_mut().zip(map.row_to_coeff()) {
                *zi = current.theta[c];
            }
            shrinkgroup_in_place(zv, layout.offsets(), config.lambda / gamma);
        }

        // gradient step from the extrapolated point
        let grad = smooth_gradient(
            problem,
            &r,
            gamma,
            match (&penalty, z.as_deref()) {
                (Penalty::Groups { map, .. }, Some(zv)) => Some((map, zv)),
                _ => None,
            },
        )?;
        let y: Vec<f64> = r.iter().zip(&grad).map(|(ri, gi)| ri - rho * gi).collect();

        // proximal step(s)
        let tv_on = config.mu > 0.0;
        let sparse_weight = if tv_on { 2.0 * rho * config.lambda } else { rho * config.lambda };
        let mut u = match penalty {
            Penalty::L1 => {
                let mut th = analysis(problem.basis, &y);
                soft_threshold_in_place(&mut th, sparse_weight);
                synthesis(problem.basis, &th)
            }
            Penalty::JointL21 => {
                let mut th = analysis(problem.basis, &y);
                joint_shrink_in_place(&mut th, sparse_weight, problem.channels, n);
                synthesis(problem.basis, &th)
            }
            Penalty::Groups { .. } => y.clone(),
        };
        if tv_on {
            let tau = 2.0 * rho * config.mu;
            for (uc, yc) in u.chunks_exact_mut(n).zip(y.chunks_exact(n)) {
                let tvp = prox_tv(yc, shape, tau, config.tv_inner_iters);
                for (ui, ti) in uc.iter_mut().zip(tvp) {
                    *ui = 0.5 * (*ui + ti);
                }
            }
        }

        let candidate = Point::new(problem, u);
        let f_cand = candidate.objective(problem, config, &penalty, z.as_deref());
        if !f_cand.is_finite() {
            return Err(Error::Divergence { iter });
        }
        let change = {
            let diff: f64 = candidate
                .x
                .iter()
                .zip(&current.x)
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt();
            diff / norm2(&current.x).max(1.0)
        };
        let accept = !config.monotone
            || f_cand <= current.objective(problem, config, &penalty, z.as_deref());

        let t_next = next_momentum(t);
        let previous_x = current.x.clone();
        let f_new;
        if accept {
            current = candidate;
            f_new = f_cand;
            // r = x_n + ((t_n - 1) / t_{n+1}) (x_n - x_{n-1})
            let w = (t - 1.0) / t_next;
            r = current
                .x
                .iter()
                .zip(&previous_x)
                .map(|(a, b)| a + w * (a - b))
                .collect();
        } else {
            rejected += 1;
            f_new = current.objective(problem, config, &penalty, z.as_deref());
            // x_n = x_{n-1}; r = x_n + (t_n / t_{n+1}) (u - x_n)
            let w = t / t_next;
            r = current
                .x
                .iter()
                .zip(&candidate.x)
                .map(|(a, c)| a + w * (c - a))
                .collect();
        }
        t = t_next;
        trace.push(f_new);
        if let (Some(st), Some(truth)) = (snr_trace.as_mut(), problem.truth) {
            st.push(snr(truth.as_slice(), &current.x).unwrap_or(f64::NAN));
        }
        if change < config.tol {
            break;
        }
    }

    let x_hat = MultiChannelSignal::new(shape, problem.channels, current.x.clone())?;
    Ok(SolverResult {
        x_hat,
        objective_trace: trace,
        snr_trace,
        iters_run: iters,
        wall_time: start.elapsed().as_secs_f64(),
        rho,
        rejected_steps: rejected,
        final_state: SolverState {
            x: current.x,
            r,
            t,
            z,
            iter: iters,
        },
    })
}
