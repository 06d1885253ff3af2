//! Experiment driver: prime sweeps of the sup-norm bound, the a_x projector
//! identity, the value distribution of inert eigenfunctions, and report
//! writers shared by the CLI and the FFI layer.

use std::f64::consts::PI;
use std::io::Write;

use log::{info, warn};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::arith::{odd_primes_in, FieldElement};
use crate::groups::{
    classify_prime, defining_lagrangian, enumerate_lagrangians, CatMap, GroupError, HeckeTorus, HeisenbergElement,
    SympMatrix, TorusKind,
};
use crate::hecke::{eigenfunctions, hecke_spectrum, HeckeEigenfunction, HeckeError, HeckeSpectrum};
use crate::linalg::{distance, phase_distance};
use crate::models::{commutant_dimension_by_characters, heisenberg_op, CanonicalSystem, Frame, ModelError};

/// Sup-norm bound under test.
pub const SUP_BOUND: f64 = 2.0;
pub const SUP_TOLERANCE: f64 = 1e-9;
/// Below this prime records are reported but never gate.
pub const GATING_MIN_PRIME: u32 = 5;
/// Agreement required between carried and re-extracted eigenfunctions.
pub const AGREEMENT_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Hecke(#[from] HeckeError),
    #[error("prime range {0}..{1} contains no odd primes")]
    EmptyRange(u32, u32),
    #[error("value distribution needs inert primes; {0:?} are split (constant modulus) or ramified")]
    NoInertPrimes(Vec<u32>),
    #[error("no eigenfunction values were collected")]
    EmptySample,
    #[error("worker pool: {0}")]
    Pool(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RealizationPolicy {
    Defining,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CharacterPolicy {
    /// Multiplicity-one characters only.
    Simple,
    /// Also every basis vector of degenerate eigenspaces.
    All,
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub cat_map: CatMap,
    /// Inclusive bounds.
    pub primes: (u32, u32),
    pub realizations: RealizationPolicy,
    pub characters: CharacterPolicy,
    pub seed: u64,
    /// Worker threads; 0 lets rayon decide.
    pub jobs: usize,
    /// Non-defining realizations per prime where the spectrum is recomputed
    /// from scratch and compared with the carried eigenfunctions.
    pub agreement_samples: usize,
}

impl SweepConfig {
    pub fn new(cat_map: CatMap, lo: u32, hi: u32) -> Self {
        SweepConfig {
            cat_map,
            primes: (lo, hi),
            realizations: RealizationPolicy::Defining,
            characters: CharacterPolicy::All,
            seed: 0,
            jobs: 0,
            agreement_samples: 1,
        }
    }

    pub fn prime_list(&self) -> Result<Vec<u32>, HarnessError> {
        let ps = odd_primes_in(self.primes.0, self.primes.1);
        if ps.is_empty() {
            return Err(HarnessError::EmptyRange(self.primes.0, self.primes.1));
        }
        Ok(ps)
    }

    fn rng_for(&self, p: u32) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(p as u64);
        rng
    }

    fn run_in_pool<T: Send>(&self, f: impl FnOnce() -> T + Send) -> Result<T, HarnessError> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.jobs)
            .build()
            .map_err(|e| HarnessError::Pool(e.to_string()))?;
        Ok(pool.install(f))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupremumRecord {
    pub p: u32,
    pub kind: TorusKind,
    pub realization: String,
    pub character: usize,
    pub multiplicity: usize,
    pub sup: f64,
    pub argmax: usize,
    pub a_max: f64,
    pub pass: bool,
    #[serde(skip)]
    pub basis_index: usize,
    #[serde(skip)]
    pub norm_sqr: f64,
}

impl SupremumRecord {
    /// Whether this record counts toward the gating verdict.
    pub fn gating(&self) -> bool {
        self.multiplicity == 1 && self.p >= GATING_MIN_PRIME
    }
}

pub fn supremum_check(psi: &HeckeEigenfunction) -> SupremumRecord {
    let (argmax, sup) =
        psi.amplitudes()
            .iter()
            .map(|z| z.norm())
            .enumerate()
            .fold(
                (0, f64::NEG_INFINITY),
                |best, (x, v)| if v > best.1 { (x, v) } else { best },
            );
    SupremumRecord {
        p: psi.p,
        kind: psi.kind,
        realization: psi.frame().lagrangian().label(),
        character: psi.character,
        multiplicity: psi.multiplicity,
        sup,
        argmax,
        a_max: sup * sup,
        pass: sup <= SUP_BOUND + SUP_TOLERANCE,
        basis_index: psi.basis_index,
        norm_sqr: psi.norm_sqr(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SkippedPrime {
    pub p: u32,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct AgreementCheck {
    pub p: u32,
    pub realization: String,
    pub character: usize,
    pub deviation: f64,
    pub pass: bool,
}

/// Per-prime summary with the p^{3/8} comparison value.
#[derive(Debug, Clone, Serialize)]
pub struct PrimeSummary {
    pub p: u32,
    pub kind: TorusKind,
    pub records: usize,
    pub max_sup: f64,
    pub p_three_eighths: f64,
    pub indeterminate: Vec<usize>,
}

#[derive(Debug, Clone, Default)]
pub struct SweepReport {
    pub records: Vec<SupremumRecord>,
    pub summaries: Vec<PrimeSummary>,
    pub agreement: Vec<AgreementCheck>,
    pub skipped: Vec<SkippedPrime>,
    pub failures: Vec<SkippedPrime>,
}

impl SweepReport {
    pub fn gating_records(&self) -> impl Iterator<Item = &SupremumRecord> {
        self.records.iter().filter(|r| r.gating())
    }

    /// True when no prime failed, nothing was indeterminate, every gating
    /// record passes and every sampled agreement check holds.
    pub fn gating_pass(&self) -> bool {
        self.failures.is_empty()
            && self
                .summaries
                .iter()
                .all(|s| s.p < GATING_MIN_PRIME || s.indeterminate.is_empty())
            && self.gating_records().all(|r| r.pass)
            && self.agreement.iter().all(|a| a.pass)
    }
}

struct PrimeOutcome {
    records: Vec<SupremumRecord>,
    summary: PrimeSummary,
    agreement: Vec<AgreementCheck>,
}

/// Everything needed to work at one prime.
pub struct PrimeContext {
    pub system: CanonicalSystem,
    pub torus: HeckeTorus,
    pub defining: Frame,
}

impl PrimeContext {
    pub fn new(cat_map: &CatMap, p: u32) -> Result<Self, HarnessError> {
        let system = CanonicalSystem::new(p)?;
        let torus = HeckeTorus::new(cat_map, p)?;
        Ok(PrimeContext {
            system,
            torus,
            defining: Frame::standard(defining_lagrangian(p)),
        })
    }

    pub fn spectrum(&self, frame: &Frame) -> Result<HeckeSpectrum, HarnessError> {
        Ok(hecke_spectrum(&self.system, &self.torus, frame)?)
    }
}

fn selected(spectrum: &HeckeSpectrum, policy: CharacterPolicy) -> Vec<HeckeEigenfunction> {
    spectrum
        .spaces
        .iter()
        .filter(|s| !s.indeterminate && s.multiplicity > 0)
        .filter(|s| policy == CharacterPolicy::All || s.multiplicity == 1)
        .flat_map(|s| eigenfunctions(spectrum, s.index).unwrap_or_default())
        .collect()
}

fn sweep_prime(cfg: &SweepConfig, p: u32) -> Result<PrimeOutcome, HarnessError> {
    let ctx = PrimeContext::new(&cfg.cat_map, p)?;
    let spectrum = ctx.spectrum(&ctx.defining)?;
    let indeterminate: Vec<usize> = spectrum
        .spaces
        .iter()
        .filter(|s| s.indeterminate)
        .map(|s| s.index)
        .collect();
    if !indeterminate.is_empty() {
        warn!("p = {p}: characters {indeterminate:?} have ambiguous rank");
    }
    let base = selected(&spectrum, cfg.characters);

    let frames: Vec<Frame> = match cfg.realizations {
        RealizationPolicy::Defining => vec![ctx.defining],
        RealizationPolicy::All => enumerate_lagrangians(p).into_iter().map(Frame::standard).collect(),
    };
    let mut records = Vec::with_capacity(base.len() * frames.len());
    for frame in &frames {
        for psi in &base {
            let carried = if *frame == ctx.defining {
                psi.clone()
            } else {
                psi.in_realization(&ctx.system, frame)
            };
            records.push(supremum_check(&carried));
        }
    }

    let mut agreement = Vec::new();
    let others: Vec<&Frame> = frames.iter().filter(|f| **f != ctx.defining).collect();
    if !others.is_empty() {
        let mut rng = cfg.rng_for(p);
        for _ in 0..cfg.agreement_samples {
            let frame = others[rng.random_range(0..others.len())];
            let direct = ctx.spectrum(frame)?;
            for psi in base.iter().filter(|e| e.multiplicity == 1) {
                let carried = psi.in_realization(&ctx.system, frame);
                let deviation = match crate::hecke::eigenfunction(&direct, psi.character) {
                    Ok(d) => phase_distance(carried.amplitudes(), d.amplitudes()).0,
                    Err(_) => f64::INFINITY,
                };
                agreement.push(AgreementCheck {
                    p,
                    realization: frame.lagrangian().label(),
                    character: psi.character,
                    deviation,
                    pass: deviation < AGREEMENT_TOLERANCE,
                });
            }
        }
    }

    let max_sup = records.iter().map(|r| r.sup).fold(0.0, f64::max);
    let summary = PrimeSummary {
        p,
        kind: ctx.torus.kind(),
        records: records.len(),
        max_sup,
        p_three_eighths: (p as f64).powf(0.375),
        indeterminate,
    };
    Ok(PrimeOutcome {
        records,
        summary,
        agreement,
    })
}

/// Runs the sup-norm experiment over every non-ramified prime in range.
/// Primes are processed in parallel and merged in increasing order.
pub fn universal_sweep(cfg: &SweepConfig) -> Result<SweepReport, HarnessError> {
    let primes = cfg.prime_list()?;
    let outcomes: Vec<(u32, Result<Option<PrimeOutcome>, String>)> = cfg.run_in_pool(|| {
        primes
            .par_iter()
            .map(|&p| {
                let result = match classify_prime(&cfg.cat_map, p) {
                    Ok(TorusKind::Ramified) => Ok(None),
                    Ok(_) => sweep_prime(cfg, p).map(Some).map_err(|e| e.to_string()),
                    Err(e) => Err(e.to_string()),
                };
                (p, result)
            })
            .collect()
    })?;

    let mut report = SweepReport::default();
    for (p, outcome) in outcomes {
        match outcome {
            Ok(None) => {
                info!("p = {p}: ramified, skipped");
                report.skipped.push(SkippedPrime {
                    p,
                    reason: "ramified".into(),
                });
            }
            Ok(Some(o)) => {
                report.records.extend(o.records);
                report.summaries.push(o.summary);
                report.agreement.extend(o.agreement);
            }
            Err(reason) => {
                warn!("p = {p}: {reason}");
                report.failures.push(SkippedPrime { p, reason });
            }
        }
    }
    Ok(report)
}

/// Both evaluations of a_x = |Ψ(x)|².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectorCheck {
    pub direct: f64,
    /// (1/p)·Σ_{l∈L} ψ_x(l)·⟨π(l)Ψ, Ψ⟩; real up to rounding.
    pub projector: Complex64,
}

impl ProjectorCheck {
    pub fn deviation(&self) -> f64 {
        (self.projector - self.direct).norm()
    }
}

/// Computes a_x directly and through the projector expansion over the
/// realization's own Lagrangian, with π(l) built as a Heisenberg operator.
pub fn projector_identity_check(system: &CanonicalSystem, psi: &HeckeEigenfunction, x: FieldElement) -> ProjectorCheck {
    let field = system.field();
    let frame = psi.frame();
    let amps = psi.amplitudes();
    let direct = amps[x.value() as usize].norm_sqr();
    let mut acc = Complex64::new(0.0, 0.0);
    for t in field.elements() {
        let l = HeisenbergElement::new(frame.sigma().scale(t), FieldElement::zero(field.modulus()));
        let op = heisenberg_op(field, frame, &l);
        let moved = &op.matrix * amps;
        acc += field.psi(t * x) * amps.dotc(&moved);
    }
    ProjectorCheck {
        direct,
        projector: acc / field.modulus() as f64,
    }
}

/// Density of |2cos θ| for θ with density (2/π)sin²θ: (1/π)√(4 − s²) on [0, 2].
pub fn reference_density(s: f64) -> f64 {
    if !(0.0..=2.0).contains(&s) {
        return 0.0;
    }
    (4.0 - s * s).sqrt() / PI
}

pub fn reference_cdf(s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    if s >= 2.0 {
        return 1.0;
    }
    ((s / 2.0) * (4.0 - s * s).sqrt() + 2.0 * (s / 2.0).asin()) / PI
}

/// E|t|^k under the reference law by composite Simpson quadrature after the
/// substitution s = 2 sin φ, which removes the square-root endpoint.
pub fn reference_moment(k: u32) -> f64 {
    let n = 2000;
    let h = (PI / 2.0) / n as f64;
    let f = |phi: f64| {
        let s = 2.0 * phi.sin();
        s.powi(k as i32) * 4.0 * phi.cos().powi(2) / PI
    };
    let mut sum = f(0.0) + f(PI / 2.0);
    for i in 1..n {
        sum += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    sum * h / 3.0
}

#[derive(Debug, Clone, Serialize)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub reference_mass: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DistributionReport {
    pub primes: Vec<u32>,
    /// Primes in range left out because they are split or ramified.
    pub excluded: Vec<u32>,
    pub samples: usize,
    pub histogram: Vec<HistogramBin>,
    /// Values above the last bin edge.
    pub overflow: usize,
    pub ks_distance: f64,
    /// E|Ψ|, E|Ψ|², E|Ψ|³, E|Ψ|⁴ over all samples.
    pub moments: [f64; 4],
    pub reference_moments: [f64; 4],
}

pub const HISTOGRAM_BINS: usize = 40;

/// Kolmogorov–Smirnov distance between a sample and a continuous CDF.
pub fn ks_distance(values: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let f = cdf(v);
            (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
        })
        .fold(0.0, f64::max)
}

/// Aggregates |Ψ(x)| over all multiplicity-one eigenfunctions at every inert
/// prime in range (defining realization) and compares with the reference law.
pub fn value_distribution(cfg: &SweepConfig) -> Result<DistributionReport, HarnessError> {
    let all = cfg.prime_list()?;
    let mut inert = Vec::new();
    let mut excluded = Vec::new();
    for &p in &all {
        match classify_prime(&cfg.cat_map, p)? {
            TorusKind::Inert => inert.push(p),
            _ => excluded.push(p),
        }
    }
    if inert.is_empty() {
        return Err(HarnessError::NoInertPrimes(excluded));
    }
    let per_prime: Vec<Result<Vec<f64>, HarnessError>> = cfg.run_in_pool(|| {
        inert
            .par_iter()
            .map(|&p| {
                let ctx = PrimeContext::new(&cfg.cat_map, p)?;
                let spectrum = ctx.spectrum(&ctx.defining)?;
                Ok(selected(&spectrum, CharacterPolicy::Simple)
                    .iter()
                    .flat_map(|psi| psi.amplitudes().iter().map(|z| z.norm()).collect::<Vec<_>>())
                    .collect())
            })
            .collect()
    })?;
    let mut values = Vec::new();
    for v in per_prime {
        values.extend(v?);
    }
    if values.is_empty() {
        return Err(HarnessError::EmptySample);
    }

    let width = 2.0 / HISTOGRAM_BINS as f64;
    let mut histogram: Vec<HistogramBin> = (0..HISTOGRAM_BINS)
        .map(|i| {
            let lo = i as f64 * width;
            let hi = lo + width;
            HistogramBin {
                lo,
                hi,
                count: 0,
                reference_mass: reference_cdf(hi) - reference_cdf(lo),
            }
        })
        .collect();
    let mut overflow = 0;
    for &v in &values {
        if v > 2.0 {
            overflow += 1;
        } else {
            let i = ((v / width) as usize).min(HISTOGRAM_BINS - 1);
            histogram[i].count += 1;
        }
    }
    let n = values.len() as f64;
    let moments = [1, 2, 3, 4].map(|k| values.iter().map(|v| v.powi(k)).sum::<f64>() / n);
    Ok(DistributionReport {
        primes: inert,
        excluded,
        samples: values.len(),
        histogram,
        overflow,
        ks_distance: ks_distance(&values, reference_cdf),
        moments,
        reference_moments: [1, 2, 3, 4].map(reference_moment),
    })
}

pub const SWEEP_CSV_VERSION: &str = "# weil-lab sweep v1";
pub const SWEEP_CSV_HEADER: &str = "p,kind,realization,character,multiplicity,sup,argmax,a_max,pass";

pub fn write_sweep_csv<W: Write>(w: &mut W, records: &[SupremumRecord]) -> std::io::Result<()> {
    writeln!(w, "{SWEEP_CSV_VERSION}")?;
    writeln!(w, "{SWEEP_CSV_HEADER}")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{},{:.15e},{},{:.15e},{}",
            r.p, r.kind, r.realization, r.character, r.multiplicity, r.sup, r.argmax, r.a_max, r.pass
        )?;
    }
    Ok(())
}

/// One JSON object per line, same fields as the CSV.
pub fn write_jsonl<W: Write, T: Serialize>(w: &mut W, items: &[T]) -> std::io::Result<()> {
    for item in items {
        serde_json::to_writer(&mut *w, item).map_err(std::io::Error::other)?;
        writeln!(w)?;
    }
    Ok(())
}

pub const DISTRIBUTION_CSV_VERSION: &str = "# weil-lab distribution v1";

/// Histogram with empirical and reference CDF at each right bin edge.
pub fn write_distribution_csv<W: Write>(w: &mut W, report: &DistributionReport) -> std::io::Result<()> {
    writeln!(w, "{DISTRIBUTION_CSV_VERSION}")?;
    writeln!(w, "lo,hi,count,empirical_cdf,reference_mass,reference_cdf")?;
    let mut cumulative = 0;
    for b in &report.histogram {
        cumulative += b.count;
        writeln!(
            w,
            "{:.6},{:.6},{},{:.15e},{:.15e},{:.15e}",
            b.lo,
            b.hi,
            b.count,
            cumulative as f64 / report.samples as f64,
            b.reference_mass,
            reference_cdf(b.hi)
        )?;
    }
    Ok(())
}

/// Uniform element of SL₂(F_p).
pub fn random_symplectic<R: Rng + ?Sized>(rng: &mut R, p: u32) -> SympMatrix {
    let f = |v: i64| FieldElement::reduce(v, p);
    let one = FieldElement::one(p);
    loop {
        let a = f(rng.random_range(0..p as i64));
        let b = f(rng.random_range(0..p as i64));
        let g = if !a.is_zero() {
            let c = f(rng.random_range(0..p as i64));
            let d = (one + b * c) * a.inverse().expect("nonzero");
            SympMatrix::new(a, b, c, d)
        } else if !b.is_zero() {
            let d = f(rng.random_range(0..p as i64));
            SympMatrix::new(a, b, -b.inverse().expect("nonzero"), d)
        } else {
            continue;
        };
        return g.expect("determinant one by construction");
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SelfTestLine {
    pub name: String,
    pub p: u32,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

fn line(name: &str, p: u32, value: f64, tolerance: f64) -> SelfTestLine {
    SelfTestLine {
        name: name.into(),
        p,
        value,
        tolerance,
        pass: value < tolerance,
    }
}

/// Quick consistency checks of the whole pipeline at each prime.
pub fn selftest(cat_map: &CatMap, primes: &[u32], seed: u64) -> Vec<SelfTestLine> {
    let mut out = Vec::new();
    for &p in primes {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(p as u64);
        let system = match CanonicalSystem::new(p) {
            Ok(s) => s,
            Err(_) => {
                out.push(line("canonical system", p, f64::INFINITY, 1.0));
                continue;
            }
        };
        let sol = system.solution();
        out.push(line(
            "gamma consistency",
            p,
            sol.spread.max(sol.unitarity_residual),
            1e-9,
        ));
        let frame = Frame::standard(defining_lagrangian(p));
        let mut hom = 0.0f64;
        let mut ego = 0.0f64;
        for _ in 0..20 {
            let g1 = random_symplectic(&mut rng, p);
            let g2 = random_symplectic(&mut rng, p);
            let lhs = system.weil_op(&frame, &g1).matrix * system.weil_op(&frame, &g2).matrix;
            hom = hom.max(distance(&lhs, &system.weil_op(&frame, &g1.mul(&g2)).matrix));
            let rho = system.weil_op(&frame, &g1).matrix;
            for h in HeisenbergElement::generators(p) {
                let pi = heisenberg_op(system.field(), &frame, &h).matrix;
                let moved = heisenberg_op(system.field(), &frame, &g1.act(&h)).matrix;
                ego = ego.max(distance(&(&rho * pi), &(moved * &rho)));
            }
        }
        out.push(line("weil multiplicativity", p, hom, 1e-8));
        out.push(line("egorov", p, ego, 1e-8));
        let svn = commutant_dimension_by_characters(system.field(), &frame);
        out.push(line("stone-von neumann", p, (svn - 1.0).abs(), 1e-8));
        if classify_prime(cat_map, p)
            .map(|k| k != TorusKind::Ramified)
            .unwrap_or(false)
        {
            match PrimeContext::new(cat_map, p).and_then(|ctx| Ok((ctx.spectrum(&ctx.defining)?, ctx))) {
                Ok((spectrum, ctx)) => {
                    out.push(line(
                        "multiplicity sum",
                        p,
                        (spectrum.total_multiplicity() as f64 - p as f64).abs(),
                        0.5,
                    ));
                    let mut dev = 0.0f64;
                    for psi in selected(&spectrum, CharacterPolicy::Simple) {
                        for x in ctx.system.field().elements() {
                            dev = dev.max(projector_identity_check(&ctx.system, &psi, x).deviation());
                        }
                    }
                    out.push(line("projector identity", p, dev, 1e-8));
                }
                Err(_) => out.push(line("hecke spectrum", p, f64::INFINITY, 1.0)),
            }
        }
    }
    out
}
