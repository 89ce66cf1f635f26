use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::config::{ExperimentConfig, ExperimentName, IdealChoice, Target};
use super::report::{Hypothesis, Row, RunReport};
use crate::error::{Error, Result};
use crate::gabor::{synthesis_matrix, gabor_matrix, GaborLattice, GaborSystem};
use crate::lattice::{symmetric_rep, tf_shift, Domain, Grid, PhasePoint, Signal};
use crate::linalg::{singular_values, spectral_norm, CMatrix};
use crate::opnorms::{nuclear_upper, pqr_condition, schatten_upper, SpaceKind, SpaceSpec};
use crate::quant::{kernel_of_symbol, pad_kernel, KernelMatrix, PadSide};
use crate::rng::{derive_seed, SplitMix64};
use crate::spaces::{
    atomic_norm_upper, lattice_modnorm, modnorm, modnorm_on_domain, pnorm, up_matrix_norm,
    AtomicOptions, Exponent, MatrixOperator, ModSpec,
};
use crate::timefreq::PhaseArray;
use crate::weights::{
    moderateness_constant_seeded, omega0_compatibility_seeded, standard_weight, ModerateCertificate,
    Weight, WeightKind, EXHAUSTIVE_LIMIT, SAMPLE_COUNT,
};

/// Result of one ensemble member; `None` marks a skipped sample (both sides zero).
type SampleOut = Option<(f64, f64)>;

pub(crate) struct Outcome {
    pub runs: Vec<RunReport>,
    pub hypotheses: Vec<Hypothesis>,
    pub notes: Vec<String>,
}

pub(crate) fn sample_rng(cfg: &ExperimentConfig, sample: u64) -> SplitMix64 {
    SplitMix64::new(derive_seed(cfg.seed, sample))
}

fn collect_run(n: usize, results: Vec<(u64, Result<SampleOut>)>) -> Result<RunReport> {
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for (sample, r) in results {
        match r? {
            None => skipped.push(sample),
            Some((numerator, denominator)) => rows.push(Row {
                sample,
                numerator,
                denominator,
                ratio: numerator / denominator,
            }),
        }
    }
    Ok(RunReport::new(n, rows, skipped))
}

fn run_samples<F>(cfg: &ExperimentConfig, n: usize, f: F) -> Result<RunReport>
where
    F: Fn(u64) -> Result<SampleOut> + Sync,
{
    let results: Vec<(u64, Result<SampleOut>)> = (0..cfg.ensemble as u64)
        .into_par_iter()
        .map(|s| (s, f(s)))
        .collect();
    collect_run(n, results)
}

fn ratio_pair(num: f64, den: f64) -> SampleOut {
    if num == 0.0 && den == 0.0 {
        None
    } else {
        Some((num, den))
    }
}

/// Normalized `e^{-pi |x|^2 / N}` on an arbitrary domain.
pub(crate) fn gaussian_on(dom: Domain) -> Vec<Complex64> {
    let n = dom.n() as f64;
    let mut v: Vec<Complex64> = (0..dom.len())
        .map(|i| {
            let m = dom.magnitude(i);
            Complex64::new((-PI * m * m / n).exp(), 0.0)
        })
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|z| *z /= norm);
    v
}

/// Squared magnitudes of every point of `dom`.
fn magnitudes_sqr(dom: Domain) -> Vec<f64> {
    (0..dom.len())
        .map(|i| {
            let m = dom.magnitude(i);
            m * m
        })
        .collect()
}

/// Standard weight on the phase space of `grid` that only sees the first `keep`
/// coordinates of the time and of the frequency variable.
fn padded_weight(kind: WeightKind, grid: Grid, keep: usize) -> Result<Weight> {
    let pd = grid.phase_domain();
    let d = grid.d();
    let n = grid.n();
    let values = (0..pd.len())
        .map(|i| {
            let c = pd.unravel(i);
            let m2: f64 = (0..keep)
                .flat_map(|k| [c[k], c[d + k]])
                .map(|t| {
                    let r = symmetric_rep(t, n) as f64;
                    r * r
                })
                .sum();
            kind.eval(m2.sqrt())
        })
        .collect();
    Weight::new(pd, values)
}

fn growth_holds(values: &[f64], budget: f64) -> bool {
    values.iter().all(|v| v.is_finite()) && values.windows(2).all(|w| w[1] / w[0] < budget)
}

fn fmt_list(values: &[f64]) -> String {
    let parts: Vec<String> = values.iter().map(|v| format!("{v:.6e}")).collect();
    format!("[{}]", parts.join(", "))
}

/// Certificate for `w2(x, xi) / w1(y, eta) <= C w((x, y), (xi, -eta))` with
/// `x, xi` in `Z_N^{d2}` and `y, eta` in `Z_N^{d1}`.
fn kernel_weight_condition(
    kinds: (WeightKind, WeightKind, WeightKind),
    n: usize,
    d1: usize,
    d2: usize,
    seed: u64,
) -> Result<ModerateCertificate> {
    let (w1k, w2k, wk) = kinds;
    let g1 = Domain::new(n, d1)?;
    let g2 = Domain::new(n, d2)?;
    let m1 = magnitudes_sqr(g1);
    let m2 = magnitudes_sqr(g2);
    let neg = |dom: Domain, i: usize| dom.neg(i);
    let eval = |x: usize, xi: usize, y: usize, eta: usize| -> f64 {
        let lhs = w2k.eval((m2[x] + m2[xi]).sqrt()) / w1k.eval((m1[y] + m1[eta]).sqrt());
        let rhs = wk.eval((m2[x] + m1[y] + m2[xi] + m1[neg(g1, eta)]).sqrt());
        lhs / rhs
    };
    let (l1, l2) = (g1.len(), g2.len());
    let total = (l1 * l2).saturating_mul(l1 * l2);
    let mut best = f64::NEG_INFINITY;
    let mut witness = vec![0; 4];
    let mut evaluated = 0u64;
    let mut offer = |t: [usize; 4]| {
        let r = eval(t[0], t[1], t[2], t[3]);
        evaluated += 1;
        if r > best {
            best = r;
            witness = t.to_vec();
        }
    };
    let exhaustive = total <= EXHAUSTIVE_LIMIT;
    if exhaustive {
        for x in 0..l2 {
            for xi in 0..l2 {
                for y in 0..l1 {
                    for eta in 0..l1 {
                        offer([x, xi, y, eta]);
                    }
                }
            }
        }
    } else {
        let mut rng = SplitMix64::new(seed);
        for _ in 0..SAMPLE_COUNT {
            offer([rng.below(l2), rng.below(l2), rng.below(l1), rng.below(l1)]);
        }
    }
    Ok(ModerateCertificate {
        constant: best,
        witness,
        exhaustive,
        evaluated,
        seed,
    })
}

fn check_pqr(p: Exponent, q: Exponent, r: Exponent) -> Result<Hypothesis> {
    let c = pqr_condition(p, q, r);
    if !c.holds {
        return Err(Error::ExponentCondition { slack: c.slack_f64() });
    }
    Ok(Hypothesis {
        id: 1,
        name: "exponent condition".into(),
        holds: true,
        detail: format!("p={p} q={q} r={r} slack={}", c.slack),
    })
}

fn nuclear_exponents(p: Exponent, r: Exponent) -> Result<()> {
    if p > Exponent::one() {
        return Err(Error::InvalidExponent(format!(
            "nuclear experiments need p <= 1, got p = {p}"
        )));
    }
    if p != r {
        return Err(Error::Config(format!("nuclear experiments need p = r, got p = {p}, r = {r}")));
    }
    Ok(())
}

/// Window, lattice, dual window and the Gabor system on `Z_N^d`.
struct Frame {
    grid: Grid,
    lattice: GaborLattice,
    phi: Signal,
    gamma: Signal,
    sys: GaborSystem,
}

impl Frame {
    fn new(cfg: &ExperimentConfig, n: usize, d: usize) -> Result<Self> {
        let grid = Grid::new(n, d)?;
        let (a, b) = cfg.lattice_for(n)?;
        let lattice = GaborLattice::new(grid, a, b)?;
        let phi = Signal::gaussian(grid);
        let sys = GaborSystem::new(phi.clone(), lattice)?;
        let gamma = sys.canonical_dual()?.clone();
        Ok(Frame {
            grid,
            lattice,
            phi,
            gamma,
            sys,
        })
    }

    fn record(&self, run: &mut RunReport) {
        let (lo, hi) = self.sys.frame_bounds();
        run.constant("frame_lower", lo);
        run.constant("frame_upper", hi);
        run.constant("lattice_a", self.lattice.a() as f64);
        run.constant("lattice_b", self.lattice.b() as f64);
    }

    fn lattice_spaces(&self, w1: &Weight, w2: &Weight, p: Exponent) -> Result<(SpaceSpec, SpaceSpec)> {
        let pts = self.lattice.points();
        Ok((
            SpaceSpec::linf(w1.restrict_to_lattice(&self.grid, &pts)?)?,
            SpaceSpec::lp(p, w2.restrict_to_lattice(&self.grid, &pts)?)?,
        ))
    }
}

#[derive(Clone, Copy)]
enum Ideal {
    Schatten(Exponent),
    Nuclear(Exponent),
}

fn ideal_bound(m: &CMatrix, from: &SpaceSpec, to: &SpaceSpec, ideal: Ideal) -> Result<f64> {
    let rep = match ideal {
        Ideal::Schatten(q) => schatten_upper(m, from, to, q)?,
        Ideal::Nuclear(r) => nuclear_upper(m, from, to, r)?,
    };
    Ok(match ideal {
        Ideal::Schatten(_) => rep.schatten_q_upper,
        Ideal::Nuclear(_) => rep.nuclear_r_upper,
    }
    .expect("bound requested"))
}

/// Per-N state of the symbol experiments.
pub(crate) struct PseudoCtx {
    frame: Frame,
    w0: Weight,
    from: SpaceSpec,
    to: SpaceSpec,
    window: Vec<Complex64>,
    den_exp: Exponent,
    ideal: Ideal,
    quant: crate::quant::QuantMatrix,
    /// `(|D_gamma|, |C_phi|)` for the composition check of the nuclear runs.
    pieces: Option<(f64, f64)>,
    cert: ModerateCertificate,
}

impl PseudoCtx {
    fn new(cfg: &ExperimentConfig, n: usize, ideal: Ideal, p: Exponent, den_exp: Exponent) -> Result<Self> {
        let frame = Frame::new(cfg, n, 1)?;
        let pd = frame.grid.phase_domain();
        let w1 = standard_weight(cfg.weights.omega1, pd);
        let w2 = standard_weight(cfg.weights.omega2, pd);
        let w0 = standard_weight(cfg.weights.omega0, Domain::new(n, 4)?);
        let cert = omega0_compatibility_seeded(&w1, &w2, &w0, &cfg.quant, cfg.seed)?;
        let (from, to) = frame.lattice_spaces(&w1, &w2, p)?;
        let pieces = match ideal {
            Ideal::Nuclear(_) => {
                let d = synthesis_matrix(&frame.gamma, &frame.lattice)?;
                let c = synthesis_matrix(&frame.phi, &frame.lattice)?.adjoint();
                Some((spectral_norm(&d), spectral_norm(&c)))
            }
            Ideal::Schatten(_) => None,
        };
        Ok(PseudoCtx {
            window: gaussian_on(pd),
            frame,
            w0,
            from,
            to,
            den_exp,
            ideal,
            quant: cfg.quant.clone(),
            pieces,
            cert,
        })
    }

    fn phase_len(&self) -> usize {
        self.frame.grid.phase_domain().len()
    }

    /// Complex Gaussian symbol with entries scaled by `1 / w0(x, xi, 0, 0)`.
    fn draw(&self, rng: &mut SplitMix64) -> Result<PhaseArray> {
        let m2 = self.phase_len();
        let values = (0..m2).map(|x| rng.complex_normal() / self.w0.at(x * m2)).collect();
        PhaseArray::new(self.frame.grid, values)
    }

    /// `(ideal bound of the Gabor matrix, M^r_(w0) norm of a, composition ratio)`.
    fn evaluate(&self, a: &PhaseArray) -> Result<(f64, f64, Option<f64>)> {
        let pd = self.frame.grid.phase_domain();
        let m2 = pd.len();
        let k = kernel_of_symbol(a, &self.quant)?;
        let m = gabor_matrix(k.entries(), &self.frame.phi, &self.frame.gamma, &self.frame.lattice)?;
        let num = ideal_bound(m.entries(), &self.from, &self.to, self.ideal)?;
        let w0 = &self.w0;
        let den = modnorm_on_domain(
            a.values(),
            pd,
            &self.window,
            self.den_exp,
            self.den_exp,
            &|x, xi| w0.at(x * m2 + xi),
        )?;
        let compose = match (self.pieces, self.ideal) {
            (Some((nd, nc)), Ideal::Nuclear(r)) => {
                // S_r(T) <= |D_gamma| nu_r(M; l^2 -> l^2) |C_phi|
                let flat = SpaceSpec::unweighted(SpaceKind::Lp(Exponent::two()), self.frame.lattice.len());
                let lhs = pnorm(&singular_values(k.entries()), r);
                let rhs = nd * ideal_bound(m.entries(), &flat, &flat, self.ideal)? * nc;
                Some(if lhs == 0.0 { 0.0 } else { lhs / rhs })
            }
            _ => None,
        };
        Ok((num, den, compose))
    }
}

fn pseudo_ideal(cfg: &ExperimentConfig) -> Result<(Ideal, Hypothesis, Exponent)> {
    let (p, q, r) = cfg.exponents();
    if cfg.name == ExperimentName::Nuclear {
        nuclear_exponents(p, r)?;
        let h = Hypothesis {
            id: 1,
            name: "exponent regime".into(),
            holds: true,
            detail: format!("p = r = {p} <= 1"),
        };
        Ok((Ideal::Nuclear(r), h, p))
    } else {
        Ok((Ideal::Schatten(q), check_pqr(p, q, r)?, r))
    }
}

/// Pseudo-differential experiments on `Z_N`: `Op_A(a)` against `M^r_{(w0)}`.
pub(crate) fn pseudo(cfg: &ExperimentConfig) -> Result<Outcome> {
    let (ideal, first, den_exp) = pseudo_ideal(cfg)?;
    let nuclear = matches!(ideal, Ideal::Nuclear(_));
    let p = cfg.exponents().0;
    if cfg.d != 1 {
        return Err(Error::Config(format!(
            "symbol experiments run on Z_N (d = 1), got d = {}",
            cfg.d
        )));
    }
    let mut hypotheses = vec![first];
    let mut runs = Vec::new();
    let mut certs = Vec::new();
    let mut compose_worst: f64 = 0.0;
    for &n in &cfg.ns {
        let ctx = PseudoCtx::new(cfg, n, ideal, p, den_exp)?;
        let compose = std::sync::Mutex::new(Vec::new());
        let mut run = run_samples(cfg, n, |s| {
            let a = ctx.draw(&mut sample_rng(cfg, s))?;
            let (num, den, c) = ctx.evaluate(&a)?;
            if let Some(c) = c {
                compose.lock().expect("no poisoning").push(c);
            }
            Ok(ratio_pair(num, den))
        })?;
        ctx.frame.record(&mut run);
        run.constant("omega0_constant", ctx.cert.constant);
        if nuclear {
            let max = compose
                .into_inner()
                .expect("no poisoning")
                .into_iter()
                .fold(0.0, f64::max);
            run.constant("composition_ratio_max", max);
            compose_worst = compose_worst.max(max);
        }
        certs.push(ctx.cert.constant);
        runs.push(run);
    }
    hypotheses.push(Hypothesis {
        id: 2,
        name: "weight compatibility".into(),
        holds: growth_holds(&certs, cfg.tolerances.growth_budget),
        detail: format!("constants per N {}", fmt_list(&certs)),
    });
    if nuclear {
        hypotheses.push(Hypothesis {
            id: 3,
            name: "composition bound".into(),
            holds: compose_worst <= 1.0 + 1e-9,
            detail: format!("max S_r(T) / (|D| nu_r(M) |C|) = {compose_worst:.6e}"),
        });
    }
    let notes = vec![format!(
        "numerator: {} bound of the Gabor matrix from l^inf_(omega1) to l^{p}_(omega2); denominator: M^{den_exp}_(omega0) norm of the symbol",
        if nuclear { "nuclear" } else { "Schatten" },
    )];
    Ok(Outcome {
        runs,
        hypotheses,
        notes,
    })
}

/// Per-N state of the kernel experiments.
pub(crate) struct KernelCtx {
    frame: Frame,
    g1: Grid,
    g2: Grid,
    from: SpaceSpec,
    to: SpaceSpec,
    kdom: Domain,
    mags: Vec<f64>,
    window: Vec<Complex64>,
    omega: WeightKind,
    r: Exponent,
    ideal: Ideal,
    pad: Option<(Signal, PadSide)>,
    cert: ModerateCertificate,
}

impl KernelCtx {
    fn new(cfg: &ExperimentConfig, n: usize, ideal: Ideal) -> Result<Self> {
        let (p, _, r) = cfg.exponents();
        let (d1, d2) = cfg.kernel_dims();
        let frame = Frame::new(cfg, n, d1.max(d2))?;
        let w1 = padded_weight(cfg.weights.omega1, frame.grid, d1)?;
        let w2 = padded_weight(cfg.weights.omega2, frame.grid, d2)?;
        let (from, to) = frame.lattice_spaces(&w1, &w2, p)?;
        let kinds = (cfg.weights.omega1, cfg.weights.omega2, cfg.weights.omega);
        let cert = kernel_weight_condition(kinds, n, d1, d2, cfg.seed)?;
        let kdom = Domain::new(n, d1 + d2)?;
        let pad = match d2.cmp(&d1) {
            std::cmp::Ordering::Equal => None,
            std::cmp::Ordering::Greater => Some((Signal::gaussian(Grid::new(n, d2 - d1)?), PadSide::Col)),
            std::cmp::Ordering::Less => Some((Signal::gaussian(Grid::new(n, d1 - d2)?), PadSide::Row)),
        };
        Ok(KernelCtx {
            frame,
            g1: Grid::new(n, d1)?,
            g2: Grid::new(n, d2)?,
            from,
            to,
            kdom,
            mags: magnitudes_sqr(kdom),
            window: gaussian_on(kdom),
            omega: cfg.weights.omega,
            r,
            ideal,
            pad,
            cert,
        })
    }

    /// Complex Gaussian kernel with entries scaled by `1 / w((x, y), 0)`, row-major in `(x, y)`.
    fn draw(&self, rng: &mut SplitMix64) -> Vec<Complex64> {
        (0..self.kdom.len())
            .map(|xy| rng.complex_normal() / self.omega.eval(self.mags[xy].sqrt()))
            .collect()
    }

    /// The (padded) Gabor matrix of `T_K`.
    fn gabor(&self, values: &[Complex64]) -> Result<MatrixOperator> {
        let (l1, l2) = (self.g1.len(), self.g2.len());
        let k = KernelMatrix::new(self.g2, self.g1, CMatrix::from_fn(l2, l1, |x, y| values[x * l1 + y]))?;
        let k0 = match &self.pad {
            None => k,
            Some((phi, side)) => pad_kernel(&k, phi, *side)?,
        };
        gabor_matrix(k0.entries(), &self.frame.phi, &self.frame.gamma, &self.frame.lattice)
    }

    /// `(ideal bound of T_K, M^r_(w) norm of K)`.
    fn evaluate(&self, values: &[Complex64]) -> Result<(f64, f64)> {
        let m = self.gabor(values)?;
        let num = ideal_bound(m.entries(), &self.from, &self.to, self.ideal)?;
        let (mags, wk) = (&self.mags, self.omega);
        let den = modnorm_on_domain(values, self.kdom, &self.window, self.r, self.r, &|x, xi| {
            wk.eval((mags[x] + mags[xi]).sqrt())
        })?;
        Ok((num, den))
    }
}

fn kernel_ideal(cfg: &ExperimentConfig) -> Result<(Ideal, Hypothesis)> {
    let (p, q, r) = cfg.exponents();
    match cfg.ideal.unwrap_or(IdealChoice::Schatten) {
        IdealChoice::Schatten => Ok((Ideal::Schatten(q), check_pqr(p, q, r)?)),
        IdealChoice::Nuclear => {
            nuclear_exponents(p, r)?;
            Ok((
                Ideal::Nuclear(r),
                Hypothesis {
                    id: 1,
                    name: "exponent regime".into(),
                    holds: true,
                    detail: format!("p = r = {p} <= 1"),
                },
            ))
        }
    }
}

/// Kernel experiments: `T_K` from `Z_N^{d1}` to `Z_N^{d2}` against `M^r_{(w)}` of `K`.
pub(crate) fn kernels(cfg: &ExperimentConfig) -> Result<Outcome> {
    let (ideal, first) = kernel_ideal(cfg)?;
    let (d1, d2) = cfg.kernel_dims();
    let mut hypotheses = vec![first];
    let mut runs = Vec::new();
    let mut certs = Vec::new();
    for &n in &cfg.ns {
        let ctx = KernelCtx::new(cfg, n, ideal)?;
        let mut run = run_samples(cfg, n, |s| {
            let values = ctx.draw(&mut sample_rng(cfg, s));
            let (num, den) = ctx.evaluate(&values)?;
            Ok(ratio_pair(num, den))
        })?;
        ctx.frame.record(&mut run);
        run.constant("weight_condition_constant", ctx.cert.constant);
        run.constant("padded", if ctx.pad.is_some() { 1.0 } else { 0.0 });
        certs.push(ctx.cert.constant);
        runs.push(run);
    }
    hypotheses.push(Hypothesis {
        id: 2,
        name: "kernel weight condition".into(),
        holds: growth_holds(&certs, cfg.tolerances.growth_budget),
        detail: format!("constants per N {}", fmt_list(&certs)),
    });
    let notes = vec![format!(
        "kernels Z_N^{d1} -> Z_N^{d2}; {}",
        if d1 == d2 {
            "square, no padding".to_string()
        } else {
            format!("padded to Z_N^{} with a Gaussian factor", d1.max(d2))
        }
    )];
    Ok(Outcome {
        runs,
        hypotheses,
        notes,
    })
}

/// A quasi-norm from the target catalog, evaluated through its upper path.
struct TargetNorm {
    target: Target,
    spec: ModSpec,
    narrow: ModSpec,
    sys: GaborSystem,
    opts: AtomicOptions,
}

impl TargetNorm {
    fn eval(&self, f: &Signal) -> Result<f64> {
        let spec = &self.spec;
        match self.target {
            Target::Modulation => modnorm(f, spec),
            Target::Window => modnorm(f, &self.narrow),
            Target::Lattice => lattice_modnorm(f, &self.sys, spec.p, spec.q, &spec.weight),
            Target::Atomic => Ok(atomic_norm_upper(f, &self.sys, spec.p, &spec.weight, self.opts)?.bound),
            Target::Matrix => Err(Error::Config("matrix target has no signal norm".into())),
        }
    }

    /// Order `s` of the `s`-triangle inequality.
    fn order(&self) -> f64 {
        let p = self.spec.p.triangle_order();
        match self.target {
            Target::Atomic => p,
            _ => p.min(self.spec.q.triangle_order()),
        }
    }
}

/// Normalized `e^{-2 pi |x|^2 / N}`.
pub(crate) fn narrow_gaussian(grid: Grid) -> Signal {
    let n = grid.n() as f64;
    let dom = grid.domain();
    Signal::from_fn(grid, |i| {
        let m = dom.magnitude(i);
        Complex64::new((-2.0 * PI * m * m / n).exp(), 0.0)
    })
    .normalized()
}

fn random_point(grid: Grid, rng: &mut SplitMix64) -> PhasePoint {
    PhasePoint::from_phase_index(&grid, rng.below(grid.phase_domain().len()))
}

/// Per-N state of the minimality and maximality experiments.
pub(crate) struct EmbeddingCtx {
    frame: Frame,
    b: TargetNorm,
    /// `M^{p,q}_{(w)}` (minimality) or the target's own spec (maximality).
    spec: ModSpec,
    /// `M^inf_{(1/v)}`.
    sup_spec: ModSpec,
    v: Weight,
    /// Moderateness constant of the target weight with respect to `v`.
    moderate: f64,
    maximal: bool,
}

impl EmbeddingCtx {
    fn new(cfg: &ExperimentConfig, n: usize) -> Result<Self> {
        let maximal = cfg.name == ExperimentName::Maximality;
        let (p, q, _) = cfg.exponents();
        let frame = Frame::new(cfg, n, cfg.d)?;
        let grid = frame.grid;
        let pd = grid.phase_domain();
        let v = standard_weight(cfg.weights.v, pd);
        let w = if maximal { v.clone() } else { standard_weight(cfg.weights.omega, pd) };
        let spec = ModSpec::new(p, q, w.clone(), frame.phi.clone())?;
        let b = TargetNorm {
            target: cfg.target(),
            narrow: spec.with_window(narrow_gaussian(grid))?,
            spec: spec.clone(),
            sys: frame.sys.clone(),
            opts: AtomicOptions {
                max_atoms: cfg.tolerances.max_atoms,
                tol: cfg.tolerances.atomic_tol,
            },
        };
        let sup_spec = ModSpec::new(Exponent::Infinite, Exponent::Infinite, v.reciprocal(), frame.phi.clone())?;
        let moderate = moderateness_constant_seeded(&w, &v, cfg.seed)?.constant;
        Ok(EmbeddingCtx {
            frame,
            b,
            spec,
            sup_spec,
            v,
            moderate,
            maximal,
        })
    }

    /// `(|f|_B, |f|_{M^p_(w)})` for minimality, `(|f|_{M^inf_(1/v)}, |f|_B)` for maximality.
    fn ratio(&self, f: &Signal) -> Result<(f64, f64)> {
        let bf = self.b.eval(f)?;
        if self.maximal {
            Ok((modnorm(f, &self.sup_spec)?, bf))
        } else {
            Ok((bf, modnorm(f, &self.spec)?))
        }
    }

    /// `|pi(X) f|_B / (v(X) |f|_B)`.
    fn shift_ratio(&self, f: &Signal, x: PhasePoint, bf: f64) -> Result<f64> {
        let shifted = self.b.eval(&tf_shift(f, x))?;
        Ok(shifted / (self.v.at(x.phase_index(&self.frame.grid)) * bf))
    }

    /// Targets built from a full-grid STFT, whose shift constant is at most `moderate`.
    fn covariant(&self) -> bool {
        self.maximal || matches!(self.b.target, Target::Modulation | Target::Window)
    }

    /// Whether `|f + g|_B^s <= |f|_B^s + |g|_B^s` within `tol`.
    fn triangle_holds(&self, f: &Signal, g: &Signal, bf: f64, tol: f64) -> Result<bool> {
        let s = self.b.order();
        let bg = self.b.eval(g)?;
        let bfg = self.b.eval(&f.add(g)?)?;
        Ok(bfg.powf(s) <= (bf.powf(s) + bg.powf(s)) * (1.0 + tol))
    }

    /// Norms of the atom in `B` and of its dual window in `M^p_{(v)}`.
    fn membership(&self) -> Result<(f64, f64)> {
        let psi = self.b.eval(&self.frame.phi)?;
        let dual_spec = ModSpec::new(self.spec.p, self.spec.q, self.v.clone(), self.frame.phi.clone())?;
        Ok((psi, modnorm(&self.frame.gamma, &dual_spec)?))
    }
}

/// Minimality (`B` against `M^p_{(w)}`) and maximality (`M^inf_{(1/v)}` against `B`).
pub(crate) fn embedding(cfg: &ExperimentConfig) -> Result<Outcome> {
    let maximal = cfg.name == ExperimentName::Maximality;
    let target = cfg.target();
    let (p, q, _) = cfg.exponents();
    if maximal {
        if p < Exponent::one() || q < Exponent::one() {
            return Err(Error::InvalidExponent(format!(
                "maximality needs a Banach target (p, q >= 1), got p = {p}, q = {q}"
            )));
        }
        if target == Target::Matrix {
            return Err(Error::Config("maximality has no matrix target".into()));
        }
    }
    if target == Target::Matrix {
        return matrix_minimality(cfg, p);
    }
    let tol = cfg.tolerances.check_tol;
    let mut runs = Vec::new();
    let mut moderate = Vec::new();
    let mut shift_consts = Vec::new();
    let mut membership = Vec::new();
    let mut member_ok = true;
    let (mut tri_bad, mut shift_bad, mut checks) = (0usize, 0usize, 0usize);
    for &n in &cfg.ns {
        let ctx = EmbeddingCtx::new(cfg, n)?;
        let grid = ctx.frame.grid;
        let (psi_norm, gamma_norm) = ctx.membership()?;
        let member = psi_norm.is_finite() && psi_norm > 0.0 && gamma_norm.is_finite();
        member_ok &= member;
        membership.push(format!(
            "N={n}: |psi|_B={psi_norm:.6e} |gamma|_M={gamma_norm:.6e}{}",
            if member { "" } else { " (not a member)" }
        ));
        let stats = std::sync::Mutex::new(Vec::new());
        let mut run = run_samples(cfg, n, |s| {
            let mut rng = sample_rng(cfg, s);
            let f = Signal::random(grid, &mut rng);
            let g = Signal::random(grid, &mut rng);
            let x = random_point(grid, &mut rng);
            let (num, den) = ctx.ratio(&f)?;
            let bf = if maximal { den } else { num };
            let tri = ctx.triangle_holds(&f, &g, bf, tol)?;
            let shift = ctx.shift_ratio(&f, x, bf)?;
            stats.lock().expect("no poisoning").push((tri, shift));
            Ok(ratio_pair(num, den))
        })?;
        let mut shift_const: f64 = 0.0;
        for (tri, shift) in stats.into_inner().expect("no poisoning") {
            checks += 1;
            tri_bad += !tri as usize;
            if ctx.covariant() {
                shift_bad += (shift > ctx.moderate * (1.0 + tol)) as usize;
            }
            shift_const = shift_const.max(shift);
        }
        ctx.frame.record(&mut run);
        run.constant("moderate_constant", ctx.moderate);
        run.constant("shift_constant", shift_const);
        shift_consts.push(ctx.moderate.max(shift_const));
        run.constant("atom_norm", psi_norm);
        run.constant("dual_norm", gamma_norm);
        moderate.push(ctx.moderate);
        runs.push(run);
    }
    let budget = cfg.tolerances.growth_budget;
    let hypotheses = vec![
        Hypothesis {
            id: 1,
            name: "triangle inequality".into(),
            holds: tri_bad == 0,
            detail: format!("{tri_bad} violations in {checks} pairs"),
        },
        Hypothesis {
            id: 2,
            name: "shift bound".into(),
            holds: shift_bad == 0 && growth_holds(&shift_consts, budget),
            detail: format!(
                "shift constants per N {} (moderateness {}); {shift_bad} of {checks} shifts exceed the moderateness bound",
                fmt_list(&shift_consts),
                fmt_list(&moderate),
            ),
        },
        Hypothesis {
            id: 3,
            name: "atom membership".into(),
            holds: member_ok,
            detail: membership.join("; "),
        },
    ];
    let target_name = serde_json::to_value(target)?.as_str().unwrap_or("").to_string();
    let notes = vec![if maximal {
        format!("ratio |f|_(M^inf_(1/v)) / |f|_B, B = {target_name} with weight v")
    } else {
        format!("ratio |f|_B / |f|_(M^p_(omega)), B = {target_name}")
    }];
    Ok(Outcome {
        runs,
        hypotheses,
        notes,
    })
}

/// Weighted Schatten-`p` quasi-norm against `U^p` for random matrices on `Z_N^d`.
fn matrix_minimality(cfg: &ExperimentConfig, p: Exponent) -> Result<Outcome> {
    let tol = cfg.tolerances.check_tol;
    let s_order = p.triangle_order();
    let mut runs = Vec::new();
    let (mut checks, mut violations, mut unit_worst) = (0usize, 0usize, 0.0f64);
    for &n in &cfg.ns {
        let dom = Domain::new(n, cfg.d)?;
        let m = dom.len();
        let w2 = standard_weight(cfg.weights.omega2, dom).values().to_vec();
        let w1 = standard_weight(cfg.weights.omega1, dom).values().to_vec();
        let schatten = |a: &CMatrix| -> Result<f64> {
            Ok(pnorm(&crate::opnorms::singular_values_hilbert(a, &w1, &w2)?, p))
        };
        // (2): elementary matrices have B-norm w2(j) / w1(k)
        for j in 0..m {
            for k in 0..m {
                let mut e = CMatrix::zeros(m, m);
                e[(j, k)] = Complex64::new(1.0, 0.0);
                unit_worst = unit_worst.max(schatten(&e)? / (w2[j] / w1[k]));
            }
        }
        let stats = std::sync::Mutex::new(Vec::new());
        let run = run_samples(cfg, n, |s| {
            let mut rng = sample_rng(cfg, s);
            let a = CMatrix::from_fn(m, m, |i, j| rng.complex_normal() * (w1[j] / w2[i]));
            let b = CMatrix::from_fn(m, m, |_, _| rng.complex_normal());
            let sa = schatten(&a)?;
            let lhs = schatten(&(&a + &b))?.powf(s_order);
            let rhs = sa.powf(s_order) + schatten(&b)?.powf(s_order);
            stats.lock().expect("no poisoning").push((s, lhs > rhs * (1.0 + tol)));
            let op = MatrixOperator::new(a, w2.clone(), w1.clone())?.with_ratio_entry_weight();
            Ok(ratio_pair(sa, up_matrix_norm(&op, p)?))
        })?;
        for (_, bad) in stats.into_inner().expect("no poisoning") {
            checks += 1;
            violations += bad as usize;
        }
        runs.push(run);
    }
    let hypotheses = vec![
        Hypothesis {
            id: 1,
            name: "triangle inequality".into(),
            holds: violations == 0,
            detail: format!("{violations} violations in {checks} pairs"),
        },
        Hypothesis {
            id: 2,
            name: "elementary matrix bound".into(),
            holds: unit_worst <= 1.0 + tol,
            detail: format!("max |E_jk|_B / (w2(j) / w1(k)) = {unit_worst:.6e}"),
        },
        Hypothesis {
            id: 3,
            name: "membership".into(),
            holds: runs.iter().all(|r| r.rows.iter().all(|w| w.numerator.is_finite())),
            detail: "all sampled matrices have finite B-norm".into(),
        },
    ];
    Ok(Outcome {
        runs,
        hypotheses,
        notes: vec![format!("ratio |A|_(S_{p}, weighted) / |A|_(U^{p})")],
    })
}
