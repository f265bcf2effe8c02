//! Streaming PCA estimators: AdaOja, Oja with a fixed step schedule, the
//! streaming (block) power method, and history PCA.
//!
//! Every estimator implements [`Estimator`], a one-block state transition.
//! [`run`] drives an estimator over a [`SampleStream`], pulling each block
//! exactly once, recording checkpoints and a digest of the consumed blocks.

use ndarray::{Array1, Array2, Axis};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::basis::{orthonormalize, unit_basis, Basis};
use crate::block::{block_gradient, Payload, SampleBlock};
use crate::error::{Error, Result};
use crate::stream::SampleStream;

/// Default initial AdaOja accumulator.
pub const DEFAULT_B0: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleKind {
    Constant,
    InverseT,
    InverseSqrtT,
}

impl ScheduleKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ScheduleKind::Constant => "constant",
            ScheduleKind::InverseT => "inverse-t",
            ScheduleKind::InverseSqrtT => "inverse-sqrt-t",
        }
    }
}

impl std::fmt::Display for ScheduleKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ScheduleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "constant" => Ok(ScheduleKind::Constant),
            "inverse-t" => Ok(ScheduleKind::InverseT),
            "inverse-sqrt-t" => Ok(ScheduleKind::InverseSqrtT),
            other => Err(Error::Config(format!("unknown schedule kind '{other}'"))),
        }
    }
}

/// Step size `η_t` as a function of the 1-based block index `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSchedule")]
pub struct Schedule {
    kind: ScheduleKind,
    c: f64,
}

#[derive(Deserialize)]
struct RawSchedule {
    kind: ScheduleKind,
    c: f64,
}

impl TryFrom<RawSchedule> for Schedule {
    type Error = Error;

    fn try_from(raw: RawSchedule) -> Result<Self> {
        Schedule::new(raw.kind, raw.c)
    }
}

impl Schedule {
    pub fn new(kind: ScheduleKind, c: f64) -> Result<Self> {
        if !c.is_finite() || c <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "schedule scale must be positive and finite, got {c}"
            )));
        }
        Ok(Schedule { kind, c })
    }

    pub fn constant(c: f64) -> Result<Self> {
        Self::new(ScheduleKind::Constant, c)
    }

    pub fn inverse_t(c: f64) -> Result<Self> {
        Self::new(ScheduleKind::InverseT, c)
    }

    pub fn inverse_sqrt_t(c: f64) -> Result<Self> {
        Self::new(ScheduleKind::InverseSqrtT, c)
    }

    pub fn kind(&self) -> ScheduleKind {
        self.kind
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn rate(&self, t: usize) -> f64 {
        debug_assert!(t >= 1);
        let t = t as f64;
        match self.kind {
            ScheduleKind::Constant => self.c,
            ScheduleKind::InverseT => self.c / t,
            ScheduleKind::InverseSqrtT => self.c / t.sqrt(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub k: usize,
    pub batch: usize,
    #[serde(default = "default_b0")]
    pub b0: f64,
    pub seed: u64,
    #[serde(default = "default_checkpoint_every")]
    pub checkpoint_every: usize,
}

fn default_b0() -> f64 {
    DEFAULT_B0
}

fn default_checkpoint_every() -> usize {
    1
}

impl RunConfig {
    pub fn new(k: usize, batch: usize, seed: u64) -> Self {
        RunConfig {
            k,
            batch,
            b0: DEFAULT_B0,
            seed,
            checkpoint_every: 1,
        }
    }

    pub fn with_b0(mut self, b0: f64) -> Self {
        self.b0 = b0;
        self
    }

    pub fn with_checkpoint_every(mut self, every: usize) -> Self {
        self.checkpoint_every = every;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidArgument("k must be at least 1".into()));
        }
        if self.batch == 0 {
            return Err(Error::InvalidArgument(
                "batch size must be at least 1".into(),
            ));
        }
        if !self.b0.is_finite() || self.b0 <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "b0 must be positive, got {}",
                self.b0
            )));
        }
        if self.checkpoint_every == 0 {
            return Err(Error::InvalidArgument(
                "checkpoint_every must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub samples_seen: usize,
    pub basis: Basis,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub algorithm: String,
    pub config: RunConfig,
    pub schedule: Option<Schedule>,
    pub final_basis: Basis,
    pub checkpoints: Vec<Checkpoint>,
    pub blocks: usize,
    pub samples: usize,
    /// SHA-256 over the consumed blocks, hex encoded.
    pub stream_digest: String,
}

/// One streaming PCA method as a per-block state transition.
pub trait Estimator {
    fn label(&self) -> &'static str;

    fn basis(&self) -> &Basis;

    /// Consumes block number `t` (1-based).
    fn step(&mut self, block: &SampleBlock, t: usize) -> Result<()>;

    fn schedule(&self) -> Option<Schedule> {
        None
    }
}

/// Gaussian `d × k` draw from `seed`, projected to an orthonormal frame.
///
/// `k = 1` uses plain normalization.
pub fn init_basis(d: usize, k: usize, seed: u64) -> Result<Basis> {
    if k == 0 || k > d {
        return Err(Error::InvalidArgument(format!(
            "init_basis needs 1 <= k <= d, got d={d} k={k}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = Array2::from_shape_simple_fn((d, k), || StandardNormal.sample(&mut rng));
    if k == 1 {
        unit_basis(m.column(0))
    } else {
        orthonormalize(m.view())
    }
}

fn ensure_finite<'a>(values: impl IntoIterator<Item = &'a f64>, what: &'static str) -> Result<()> {
    if values.into_iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite { what, detail: None })
    }
}

/// Which AdaOja update to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdaOjaForm {
    /// One scalar accumulator and a normalized vector. Only valid for `k = 1`.
    Vector,
    /// One accumulator per column followed by thin QR.
    Columnwise,
}

/// Oja's method with a per-column AdaGrad step `1 / b[i]`.
#[derive(Debug, Clone)]
pub struct AdaOja {
    basis: Basis,
    b: Array1<f64>,
    form: AdaOjaForm,
}

impl AdaOja {
    pub fn new(basis: Basis, b0: f64, form: AdaOjaForm) -> Result<Self> {
        if !b0.is_finite() || b0 <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "b0 must be positive, got {b0}"
            )));
        }
        if form == AdaOjaForm::Vector && basis.rank() != 1 {
            return Err(Error::InvalidArgument(
                "the vector form of AdaOja requires k = 1".into(),
            ));
        }
        let b = Array1::from_elem(basis.rank(), b0);
        Ok(AdaOja { basis, b, form })
    }

    /// `Vector` for `k = 1`, `Columnwise` otherwise.
    pub fn auto(basis: Basis, b0: f64) -> Result<Self> {
        let form = if basis.rank() == 1 {
            AdaOjaForm::Vector
        } else {
            AdaOjaForm::Columnwise
        };
        Self::new(basis, b0, form)
    }

    pub fn accumulators(&self) -> &Array1<f64> {
        &self.b
    }

    pub fn form(&self) -> AdaOjaForm {
        self.form
    }
}

impl Estimator for AdaOja {
    fn label(&self) -> &'static str {
        "adaoja"
    }

    fn basis(&self) -> &Basis {
        &self.basis
    }

    fn step(&mut self, block: &SampleBlock, _t: usize) -> Result<()> {
        let g = block_gradient(block, &self.basis)?;
        ensure_finite(g.iter(), "gradient")?;
        match self.form {
            AdaOjaForm::Vector => {
                let g = g.column(0);
                let b = (self.b[0] * self.b[0] + g.dot(&g)).sqrt();
                ensure_finite([b].iter(), "accumulator")?;
                self.b[0] = b;
                let mut w = self.basis.column(0).to_owned();
                w.scaled_add(1.0 / b, &g);
                ensure_finite(w.iter(), "iterate")?;
                self.basis = unit_basis(w.view())?;
            }
            AdaOjaForm::Columnwise => {
                let mut q = self.basis.columns().to_owned();
                for (i, (mut qi, gi)) in q
                    .axis_iter_mut(Axis(1))
                    .zip(g.axis_iter(Axis(1)))
                    .enumerate()
                {
                    let b = (self.b[i] * self.b[i] + gi.dot(&gi)).sqrt();
                    self.b[i] = b;
                    qi.scaled_add(1.0 / b, &gi);
                }
                ensure_finite(self.b.iter(), "accumulator")?;
                ensure_finite(q.iter(), "iterate")?;
                self.basis = orthonormalize(q.view())?;
            }
        }
        Ok(())
    }
}

/// Oja's method `W ← orth(W + η_t G_t)` with a fixed schedule.
#[derive(Debug, Clone)]
pub struct Oja {
    basis: Basis,
    schedule: Schedule,
}

impl Oja {
    pub fn new(basis: Basis, schedule: Schedule) -> Self {
        Oja { basis, schedule }
    }
}

impl Estimator for Oja {
    fn label(&self) -> &'static str {
        "oja"
    }

    fn basis(&self) -> &Basis {
        &self.basis
    }

    fn schedule(&self) -> Option<Schedule> {
        Some(self.schedule)
    }

    fn step(&mut self, block: &SampleBlock, t: usize) -> Result<()> {
        let eta = self.schedule.rate(t);
        let diag = || {
            Some(format!(
                "schedule {} c={} t={t} eta={eta}",
                self.schedule.kind, self.schedule.c
            ))
        };
        if !eta.is_finite() {
            return Err(Error::NonFinite {
                what: "step size",
                detail: diag(),
            });
        }
        let g = block_gradient(block, &self.basis)?;
        ensure_finite(g.iter(), "gradient")?;
        let mut w = self.basis.columns().to_owned();
        w.scaled_add(eta, &g);
        if w.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                what: "iterate",
                detail: diag(),
            });
        }
        self.basis = if w.ncols() == 1 {
            unit_basis(w.column(0))?
        } else {
            orthonormalize(w.view())?
        };
        Ok(())
    }
}

/// Streaming power method: one block power step `W ← orth((1/B) XᵀX W)` per block.
#[derive(Debug, Clone)]
pub struct StreamingPower {
    basis: Basis,
}

impl StreamingPower {
    pub fn new(basis: Basis) -> Self {
        StreamingPower { basis }
    }
}

impl Estimator for StreamingPower {
    fn label(&self) -> &'static str {
        "spm"
    }

    fn basis(&self) -> &Basis {
        &self.basis
    }

    fn step(&mut self, block: &SampleBlock, _t: usize) -> Result<()> {
        let g = block_gradient(block, &self.basis)?;
        ensure_finite(g.iter(), "gradient")?;
        self.basis = orthonormalize(g.view())?;
        Ok(())
    }
}

/// History PCA, one conforming variant.
///
/// Keeps `(Q, λ)` and at block `t` works with the implicit matrix
/// `C_t = ((t-1)/t) Q diag(λ) Qᵀ + (1/t) (1/B) X_tᵀ X_t`.
/// Since `QᵀQ = I`, `C_t Q = ((t-1)/t) Q diag(λ) + (1/t) G_t`, so the step costs
/// `O(dk² + Bdk)`. The new frame is `orth(C_t Q)` and `λ[i]` is the Rayleigh
/// quotient of `C_t` at its `i`-th column.
#[derive(Debug, Clone)]
pub struct HistoryPca {
    basis: Basis,
    lambda: Array1<f64>,
}

impl HistoryPca {
    pub fn new(basis: Basis) -> Self {
        let k = basis.rank();
        HistoryPca {
            basis,
            lambda: Array1::zeros(k),
        }
    }

    pub fn eigenvalues(&self) -> &Array1<f64> {
        &self.lambda
    }
}

impl Estimator for HistoryPca {
    fn label(&self) -> &'static str {
        "hpca"
    }

    fn basis(&self) -> &Basis {
        &self.basis
    }

    fn step(&mut self, block: &SampleBlock, t: usize) -> Result<()> {
        let t = t as f64;
        let history = (t - 1.0) / t;
        let g = block_gradient(block, &self.basis)?;
        ensure_finite(g.iter(), "gradient")?;

        let q = self.basis.columns();
        let mut m = &q * &self.lambda.view().insert_axis(Axis(0));
        m *= history;
        m.scaled_add(1.0 / t, &g);
        let next = orthonormalize(m.view())?;

        // Rayleigh quotients of C_t at the new columns.
        let overlap = q.t().dot(&next.columns());
        let xq = block.project(next.columns())?;
        let inv_b = 1.0 / block.rows() as f64;
        let lambda: Array1<f64> = (0..next.rank())
            .map(|i| {
                let hist: f64 = overlap
                    .column(i)
                    .iter()
                    .zip(self.lambda.iter())
                    .map(|(p, l)| l * p * p)
                    .sum();
                let col = xq.column(i);
                history * hist + inv_b * col.dot(&col) / t
            })
            .collect();
        ensure_finite(lambda.iter(), "eigenvalue estimate")?;

        self.basis = next;
        self.lambda = lambda;
        Ok(())
    }
}

fn hash_block(hasher: &mut Sha256, block: &SampleBlock) {
    hasher.update((block.rows() as u64).to_le_bytes());
    hasher.update((block.dim() as u64).to_le_bytes());
    match block.payload() {
        Payload::Dense(x) => {
            hasher.update([0u8]);
            for v in x.iter() {
                hasher.update(v.to_le_bytes());
            }
        }
        Payload::Sparse(x) => {
            hasher.update([1u8]);
            for p in x.indptr() {
                hasher.update((*p as u64).to_le_bytes());
            }
            for j in x.indices() {
                hasher.update((*j as u64).to_le_bytes());
            }
            for v in x.values() {
                hasher.update(v.to_le_bytes());
            }
        }
    }
}

/// Drives `estimator` over every block of `stream`, each block pulled once.
///
/// Errors from a step are tagged with the 1-based block index.
pub fn run<S, E>(stream: &mut S, mut estimator: E, cfg: &RunConfig) -> Result<RunResult>
where
    S: SampleStream + ?Sized,
    E: Estimator,
{
    cfg.validate()?;
    let d = stream.dim();
    if estimator.basis().dim() != d {
        return Err(Error::DimensionMismatch(format!(
            "stream dim {d}, basis dim {}",
            estimator.basis().dim()
        )));
    }
    if estimator.basis().rank() != cfg.k {
        return Err(Error::InvalidArgument(format!(
            "basis rank {} does not match k = {}",
            estimator.basis().rank(),
            cfg.k
        )));
    }
    if stream.batch() != cfg.batch {
        return Err(Error::InvalidArgument(format!(
            "stream batch {} does not match configured batch {}",
            stream.batch(),
            cfg.batch
        )));
    }

    let mut hasher = Sha256::new();
    let mut checkpoints = Vec::new();
    let mut blocks = 0usize;
    let mut samples = 0usize;
    while let Some(block) = stream.next_block()? {
        blocks += 1;
        if block.dim() != d {
            return Err(Error::DimensionMismatch(format!(
                "stream dim {d}, block dim {}",
                block.dim()
            ))
            .at_block(blocks));
        }
        hash_block(&mut hasher, &block);
        estimator
            .step(&block, blocks)
            .map_err(|e| e.at_block(blocks))?;
        samples += block.rows();
        debug_assert!(estimator.basis().orthogonality_error() <= 1e-10);
        if blocks.is_multiple_of(cfg.checkpoint_every) {
            checkpoints.push(Checkpoint {
                samples_seen: samples,
                basis: estimator.basis().clone(),
            });
        }
    }
    if blocks == 0 {
        return Err(Error::EmptyStream);
    }
    if checkpoints.last().map(|c| c.samples_seen) != Some(samples) {
        checkpoints.push(Checkpoint {
            samples_seen: samples,
            basis: estimator.basis().clone(),
        });
    }
    Ok(RunResult {
        algorithm: estimator.label().to_string(),
        config: *cfg,
        schedule: estimator.schedule(),
        final_basis: estimator.basis().clone(),
        checkpoints,
        blocks,
        samples,
        stream_digest: hex::encode(hasher.finalize()),
    })
}

fn start<S: SampleStream + ?Sized>(stream: &S, cfg: &RunConfig) -> Result<Basis> {
    cfg.validate()?;
    if stream.dim() < cfg.k {
        return Err(Error::InvalidArgument(format!(
            "k = {} exceeds stream dimension {}",
            cfg.k,
            stream.dim()
        )));
    }
    init_basis(stream.dim(), cfg.k, cfg.seed)
}

/// AdaOja from a seeded Gaussian start; vector form for `k = 1`, column-wise otherwise.
pub fn adaoja_run<S: SampleStream + ?Sized>(stream: &mut S, cfg: &RunConfig) -> Result<RunResult> {
    let basis = start(stream, cfg)?;
    run(stream, AdaOja::auto(basis, cfg.b0)?, cfg)
}

/// AdaOja with an explicit choice of update form.
pub fn adaoja_run_with<S: SampleStream + ?Sized>(
    stream: &mut S,
    cfg: &RunConfig,
    form: AdaOjaForm,
) -> Result<RunResult> {
    let basis = start(stream, cfg)?;
    run(stream, AdaOja::new(basis, cfg.b0, form)?, cfg)
}

pub fn oja_run<S: SampleStream + ?Sized>(
    stream: &mut S,
    cfg: &RunConfig,
    schedule: Schedule,
) -> Result<RunResult> {
    let basis = start(stream, cfg)?;
    run(stream, Oja::new(basis, schedule), cfg)
}

pub fn spm_run<S: SampleStream + ?Sized>(stream: &mut S, cfg: &RunConfig) -> Result<RunResult> {
    let basis = start(stream, cfg)?;
    run(stream, StreamingPower::new(basis), cfg)
}

pub fn hpca_run<S: SampleStream + ?Sized>(stream: &mut S, cfg: &RunConfig) -> Result<RunResult> {
    let basis = start(stream, cfg)?;
    run(stream, HistoryPca::new(basis), cfg)
}

/// The streaming methods selectable from configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "lowercase")]
pub enum Algorithm {
    Adaoja,
    Oja { schedule: Schedule },
    Spm,
    Hpca,
}

impl Algorithm {
    pub fn label(&self) -> &'static str {
        match self {
            Algorithm::Adaoja => "adaoja",
            Algorithm::Oja { .. } => "oja",
            Algorithm::Spm => "spm",
            Algorithm::Hpca => "hpca",
        }
    }

    pub fn run<S: SampleStream + ?Sized>(
        &self,
        stream: &mut S,
        cfg: &RunConfig,
    ) -> Result<RunResult> {
        match *self {
            Algorithm::Adaoja => adaoja_run(stream, cfg),
            Algorithm::Oja { schedule } => oja_run(stream, cfg, schedule),
            Algorithm::Spm => spm_run(stream, cfg),
            Algorithm::Hpca => hpca_run(stream, cfg),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::BlockStream;
    use ndarray::array;

    fn e1(d: usize) -> Basis {
        let mut m = Array2::zeros((d, 1));
        m[[0, 0]] = 1.0;
        Basis::from_orthonormal(m).unwrap()
    }

    fn one_block(x: Array2<f64>) -> BlockStream {
        let d = x.ncols();
        BlockStream::new(d, vec![SampleBlock::dense(x).unwrap()]).unwrap()
    }

    #[test]
    fn schedule_rates() {
        let s = Schedule::inverse_t(2.0).unwrap();
        assert_eq!(s.rate(1), 2.0);
        assert_eq!(s.rate(4), 0.5);
        let s = Schedule::inverse_sqrt_t(2.0).unwrap();
        assert_eq!(s.rate(4), 1.0);
        assert_eq!(Schedule::constant(3.0).unwrap().rate(100), 3.0);
        for t in 1..50 {
            assert!(s.rate(t + 1) < s.rate(t));
        }
    }

    #[test]
    fn schedule_rejects_nonpositive_scale() {
        assert!(Schedule::inverse_t(0.0).is_err());
        assert!(Schedule::constant(-1.0).is_err());
        assert!(Schedule::inverse_sqrt_t(f64::NAN).is_err());
        let bad: std::result::Result<Schedule, _> =
            serde_json::from_str(r#"{"kind":"inverse-t","c":0.0}"#);
        assert!(bad.is_err());
    }

    #[test]
    fn adaoja_single_step_keeps_direction() {
        let cfg = RunConfig::new(1, 1, 0);
        let mut stream = one_block(array![[1.0, 0.0]]);
        let est = AdaOja::auto(e1(2), 1e-5).unwrap();
        let mut driven = est.clone();
        driven
            .step(&SampleBlock::dense(array![[1.0, 0.0]]).unwrap(), 1)
            .unwrap();
        assert_eq!(driven.accumulators()[0], (1e-10f64 + 1.0).sqrt());
        let res = run(&mut stream, est, &cfg).unwrap();
        assert_eq!(res.final_basis.columns(), array![[1.0], [0.0]].view());
        assert_eq!(res.blocks, 1);
        assert_eq!(res.checkpoints.len(), 1);
    }

    #[test]
    fn oja_constant_step_keeps_direction() {
        let cfg = RunConfig::new(1, 1, 0);
        let mut stream = one_block(array![[1.0, 0.0]]);
        let res = run(
            &mut stream,
            Oja::new(e1(2), Schedule::constant(0.7).unwrap()),
            &cfg,
        )
        .unwrap();
        assert_eq!(res.final_basis.columns(), array![[1.0], [0.0]].view());
    }

    #[test]
    fn spm_lands_on_data_span() {
        let cfg = RunConfig::new(1, 3, 0);
        let w0 = Basis::from_orthonormal(array![[0.6], [0.8], [0.0]]).unwrap();
        let mut stream = one_block(array![[2.0, 0.0, 0.0], [-1.0, 0.0, 0.0], [0.5, 0.0, 0.0]]);
        let res = run(&mut stream, StreamingPower::new(w0), &cfg).unwrap();
        let w = res.final_basis.columns();
        assert!((w[[0, 0]].abs() - 1.0).abs() < 1e-15);
        assert_eq!(w[[1, 0]], 0.0);
    }

    #[test]
    fn spm_orthogonal_start_is_rank_deficient() {
        let cfg = RunConfig::new(1, 2, 0);
        let w0 = Basis::from_orthonormal(array![[0.0], [1.0]]).unwrap();
        let mut stream = one_block(array![[1.0, 0.0], [3.0, 0.0]]);
        let err = run(&mut stream, StreamingPower::new(w0), &cfg).unwrap_err();
        assert!(matches!(err, Error::AtBlock { block: 1, .. }));
        assert!(matches!(err.root(), Error::RankDeficient { .. }));
    }

    #[test]
    fn spm_zero_block_is_rank_deficient() {
        let cfg = RunConfig::new(2, 2, 4);
        let mut stream = one_block(Array2::zeros((2, 5)));
        let err = spm_run(&mut stream, &cfg).unwrap_err();
        assert!(matches!(err.root(), Error::RankDeficient { .. }));
    }

    #[test]
    fn hpca_first_step_is_spm_step() {
        let x = array![
            [1.0, 2.0, 0.5, -1.0],
            [0.0, 1.0, 3.0, 1.0],
            [2.0, -1.0, 1.0, 0.0]
        ];
        let block = SampleBlock::dense(x).unwrap();
        let w0 = init_basis(4, 2, 9).unwrap();
        let mut h = HistoryPca::new(w0.clone());
        let mut s = StreamingPower::new(w0);
        h.step(&block, 1).unwrap();
        s.step(&block, 1).unwrap();
        approx::assert_abs_diff_eq!(h.basis().columns(), s.basis().columns(), epsilon = 1e-14);
        assert!(h.eigenvalues().iter().all(|&l| l >= 0.0));
    }

    #[test]
    fn empty_stream_errors() {
        let mut stream = BlockStream::new(3, vec![]).unwrap();
        let cfg = RunConfig::new(1, 1, 0);
        assert!(matches!(
            adaoja_run(&mut stream, &cfg),
            Err(Error::EmptyStream)
        ));
    }

    #[test]
    fn k_above_dim_rejected() {
        let mut stream = one_block(array![[1.0, 0.0]]);
        let cfg = RunConfig::new(3, 1, 0);
        assert!(matches!(
            adaoja_run(&mut stream, &cfg),
            Err(Error::InvalidArgument(_))
        ));
        assert!(init_basis(2, 3, 0).is_err());
    }

    #[test]
    fn huge_constant_step_overflows_with_diagnostics() {
        let cfg = RunConfig::new(1, 1, 0);
        let mut stream = one_block(array![[1e200, 1e200]]);
        let sched = Schedule::constant(1e200).unwrap();
        let w0 = Basis::from_orthonormal(array![[1.0], [0.0]]).unwrap();
        let err = run(&mut stream, Oja::new(w0, sched), &cfg).unwrap_err();
        let msg = err.to_string();
        assert!(matches!(err.root(), Error::NonFinite { .. }), "{msg}");
        assert!(msg.contains("block 1"));
    }

    #[test]
    fn checkpoint_cadence() {
        let blocks: Vec<_> = (0..7)
            .map(|i| SampleBlock::dense(array![[1.0, i as f64], [0.5, 1.0]]).unwrap())
            .collect();
        let mut stream = BlockStream::new(2, blocks).unwrap();
        let cfg = RunConfig::new(1, 2, 3).with_checkpoint_every(3);
        let res = adaoja_run(&mut stream, &cfg).unwrap();
        let seen: Vec<_> = res.checkpoints.iter().map(|c| c.samples_seen).collect();
        assert_eq!(seen, vec![6, 12, 14]);
        assert_eq!(res.samples, 14);
    }
}
