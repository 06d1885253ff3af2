//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails for a reason not recorded in
//! `DOCUMENTED`.

use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use weil_lab::arith::{odd_primes_in, CyclicCharacter, FieldElement, PrimeField, RootsOfUnity};
use weil_lab::groups::{classify_prime, enumerate_lagrangians, EnhancedLagrangian, HeisenbergElement, SympMatrix};
use weil_lab::harness::{
    projector_identity_check, random_symplectic, reference_moment, universal_sweep, value_distribution,
    write_sweep_csv, CharacterPolicy, PrimeContext, RealizationPolicy, SweepConfig, SweepReport,
};
use weil_lab::hecke::{eigenfunction, split_closed_form};
use weil_lab::linalg::{distance, phase_distance, CMatrix, CVector};
use weil_lab::models::{commutant_dimension_by_characters, heisenberg_op};
use weil_lab::{CanonicalSystem, CatMap, Frame, ModelVector, TorusKind};

const TOL: f64 = 1e-8;

struct Outcome {
    pass: bool,
    detail: String,
    /// Failure matches a documented, analysed discrepancy.
    documented: bool,
}

fn ok(pass: bool, detail: String) -> Outcome {
    Outcome {
        pass,
        detail,
        documented: false,
    }
}

fn arnold() -> CatMap {
    CatMap::arnold()
}

/// Matrix of the identity map between two frames on the same line, built
/// by lifting basis vectors to functions on the Heisenberg group.
fn same_function(field: &PrimeField, target: &Frame, source: &Frame) -> CMatrix {
    let p = field.modulus() as usize;
    let mut m = CMatrix::zeros(p, p);
    for x in 0..p {
        let mut e = CVector::zeros(p);
        e[x] = Complex64::new(1.0, 0.0);
        let v = ModelVector::new(*source, e).unwrap();
        for y in 0..p {
            m[(y, x)] = v.lift(field, &target.point(field.elem(y as i64)));
        }
    }
    m
}

/// Matrix of f ↦ f(g⁻¹ ·) from the `source` model to the `target` model of
/// the transported line.
fn geometric_action(field: &PrimeField, g: &SympMatrix, target: &Frame, source: &Frame) -> CMatrix {
    let p = field.modulus() as usize;
    let gi = g.inverse();
    let mut m = CMatrix::zeros(p, p);
    for x in 0..p {
        let mut e = CVector::zeros(p);
        e[x] = Complex64::new(1.0, 0.0);
        let v = ModelVector::new(*source, e).unwrap();
        for y in 0..p {
            m[(y, x)] = v.lift(field, &gi.act(&target.point(field.elem(y as i64))));
        }
    }
    m
}

fn random_enhanced(rng: &mut ChaCha8Rng, p: u32) -> EnhancedLagrangian {
    let lines = enumerate_lagrangians(p);
    let l = lines[rng.random_range(0..lines.len())];
    let a = FieldElement::new(rng.random_range(1..p as i64), p).unwrap();
    l.scaled(a).unwrap()
}

/// Sup-norm violations either fail outright or, at split primes, stay below
/// the rescaled bound 2·√(p/(p−1)).
fn judge_sup(report: &SweepReport, label: &str, elapsed: f64) -> Outcome {
    let gating: Vec<_> = report.gating_records().collect();
    let norm_bad = gating
        .iter()
        .filter(|r| (r.norm_sqr - r.p as f64).abs() > 1e-6 * r.p as f64)
        .count();
    let violations: Vec<_> = gating.iter().filter(|r| !r.pass).collect();
    let unexplained = violations
        .iter()
        .filter(|r| r.kind != TorusKind::Split || r.sup > 2.0 * (r.p as f64 / (r.p as f64 - 1.0)).sqrt() + 1e-9)
        .count();
    let inert_max = gating
        .iter()
        .filter(|r| r.kind == TorusKind::Inert)
        .map(|r| r.sup)
        .fold(0.0, f64::max);
    let split_max = gating
        .iter()
        .filter(|r| r.kind == TorusKind::Split)
        .map(|r| r.sup)
        .fold(0.0, f64::max);
    let clean = report.failures.is_empty() && norm_bad == 0 && report.agreement.iter().all(|a| a.pass);
    let detail = format!(
        "{label}: {} gating records, {} above 2 (all split: {}), max inert sup {:.6}, max split sup {:.6}, \
         norm errors {norm_bad}, agreement checks {}, prime failures {}, {elapsed:.1}s",
        gating.len(),
        violations.len(),
        unexplained == 0,
        inert_max,
        split_max,
        report.agreement.len(),
        report.failures.len(),
    );
    Outcome {
        pass: clean && violations.is_empty(),
        detail,
        documented: clean && unexplained == 0,
    }
}

fn criterion_1() -> (Outcome, SweepReport) {
    let t = Instant::now();
    let mut cfg = SweepConfig::new(arnold(), 5, 199);
    cfg.characters = CharacterPolicy::Simple;
    cfg.seed = 1;
    let report = universal_sweep(&cfg).expect("sweep runs");
    (
        judge_sup(&report, "defining realization, 5..199", t.elapsed().as_secs_f64()),
        report,
    )
}

fn criterion_2() -> (Outcome, SweepReport) {
    let t = Instant::now();
    let mut cfg = SweepConfig::new(arnold(), 5, 61);
    cfg.realizations = RealizationPolicy::All;
    cfg.characters = CharacterPolicy::Simple;
    cfg.agreement_samples = 2;
    cfg.seed = 2;
    let report = universal_sweep(&cfg).expect("sweep runs");
    (
        judge_sup(&report, "all realizations, 5..61", t.elapsed().as_secs_f64()),
        report,
    )
}

fn criterion_3() -> Outcome {
    let mut worst = 0.0f64;
    let mut compared = 0;
    let mut problems = Vec::new();
    let split: Vec<u32> = odd_primes_in(3, 199)
        .into_iter()
        .filter(|&p| classify_prime(&arnold(), p).unwrap() == TorusKind::Split)
        .collect();
    for &p in &split {
        let ctx = PrimeContext::new(&arnold(), p).unwrap();
        let frame = Frame::standard(ctx.torus.fixed_lines()[0]);
        let spectrum = ctx.spectrum(&frame).unwrap();
        let roots = Arc::new(RootsOfUnity::new(p as usize - 1));
        for j in 0..p as usize - 1 {
            let chi = CyclicCharacter::new(j, roots.clone());
            let closed = split_closed_form(&ctx.system, &ctx.torus, &frame, &chi).unwrap();
            let space = spectrum.space(closed.character);
            if space.multiplicity != closed.multiplicity {
                problems.push(format!(
                    "p={p} k={} multiplicity {}",
                    closed.character, space.multiplicity
                ));
                continue;
            }
            if space.multiplicity == 1 {
                let numeric = eigenfunction(&spectrum, closed.character).unwrap();
                let (d, _) = phase_distance(numeric.amplitudes(), closed.amplitudes());
                worst = worst.max(d);
                compared += 1;
            }
        }
    }
    ok(
        problems.is_empty() && worst < TOL,
        format!(
            "{} split primes, {compared} characters compared, max deviation {worst:.2e}{}",
            split.len(),
            if problems.is_empty() {
                String::new()
            } else {
                format!(", mismatches {problems:?}")
            }
        ),
    )
}

fn criterion_4() -> Outcome {
    let mut hom = 0.0f64;
    let mut ego = 0.0f64;
    for p in [5u32, 7, 11, 13, 17] {
        let sys = CanonicalSystem::new(p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(40 + p as u64);
        let frame = Frame::standard(random_enhanced(&mut rng, p));
        for _ in 0..500 {
            let g1 = random_symplectic(&mut rng, p);
            let g2 = random_symplectic(&mut rng, p);
            let lhs = sys.weil_op(&frame, &g1).matrix * sys.weil_op(&frame, &g2).matrix;
            hom = hom.max(distance(&lhs, &sys.weil_op(&frame, &g1.mul(&g2)).matrix));
        }
        for _ in 0..50 {
            let g = random_symplectic(&mut rng, p);
            let rho = sys.weil_op(&frame, &g).matrix;
            for h in HeisenbergElement::generators(p) {
                let lhs = &rho * heisenberg_op(sys.field(), &frame, &h).matrix;
                let rhs = heisenberg_op(sys.field(), &frame, &g.act(&h)).matrix * &rho;
                ego = ego.max(distance(&lhs, &rhs));
            }
        }
    }
    ok(
        hom < TOL && ego < TOL,
        format!("multiplicativity defect {hom:.2e}, Egorov defect {ego:.2e}"),
    )
}

fn criterion_5() -> Outcome {
    let mut normalization_exact = true;
    let mut sign = 0.0f64;
    let mut conv = 0.0f64;
    let mut inv = 0.0f64;
    for p in [3u32, 5, 7, 11, 13] {
        let sys = CanonicalSystem::new(p).unwrap();
        let f = sys.field();
        let lines = enumerate_lagrangians(p);
        for l in &lines {
            let fl = Frame::standard(*l);
            let id = sys.canonical_intertwiner(&fl, &fl).matrix;
            normalization_exact &= id == CMatrix::identity(p as usize, p as usize);
            for m in &lines {
                let fm = Frame::standard(*m);
                let base = sys.canonical_intertwiner(&fm, &fl).matrix;
                for a in f.elements().skip(1) {
                    let s = Complex64::new(f.chi_q(a) as f64, 0.0);
                    let amf = Frame::standard(m.scaled(a).unwrap());
                    let lhs = sys.canonical_intertwiner(&amf, &fl).matrix;
                    sign = sign.max(distance(&lhs, &(same_function(f, &amf, &fm) * &base * s)));
                    let alf = Frame::standard(l.scaled(a).unwrap());
                    let lhs = sys.canonical_intertwiner(&fm, &alf).matrix;
                    sign = sign.max(distance(&lhs, &(&base * same_function(f, &fl, &alf) * s)));
                }
            }
        }
        if p < 5 {
            continue;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(50 + p as u64);
        for _ in 0..50 {
            let [l, m, n] = [0; 3].map(|_| Frame::standard(random_enhanced(&mut rng, p)));
            let lhs = sys.canonical_intertwiner(&n, &m).matrix * sys.canonical_intertwiner(&m, &l).matrix;
            conv = conv.max(distance(&lhs, &sys.canonical_intertwiner(&n, &l).matrix));
        }
        for _ in 0..50 {
            let g = random_symplectic(&mut rng, p);
            let l = random_enhanced(&mut rng, p);
            let m = random_enhanced(&mut rng, p);
            let (fl, fm) = (Frame::standard(l), Frame::standard(m));
            let (gl, gm) = (Frame::standard(l.transform(&g)), Frame::standard(m.transform(&g)));
            let lhs = sys.canonical_intertwiner(&gm, &gl).matrix * geometric_action(f, &g, &gl, &fl);
            let rhs = geometric_action(f, &g, &gm, &fm) * sys.canonical_intertwiner(&fm, &fl).matrix;
            inv = inv.max(distance(&lhs, &rhs));
        }
    }
    ok(
        normalization_exact && sign < TOL && conv < TOL && inv < TOL,
        format!(
            "normalization exact: {normalization_exact}, sign rule {sign:.2e}, convolution {conv:.2e}, invariance {inv:.2e}"
        ),
    )
}

fn criterion_6() -> Outcome {
    let mut worst_dim = 0.0f64;
    let mut worst_center = 0.0f64;
    let mut frames = 0;
    for p in odd_primes_in(3, 31) {
        let field = PrimeField::new(p).unwrap();
        for l in enumerate_lagrangians(p) {
            let frame = Frame::standard(l);
            frames += 1;
            worst_dim = worst_dim.max((commutant_dimension_by_characters(&field, &frame) - 1.0).abs());
            for z in field.elements() {
                let op = heisenberg_op(&field, &frame, &HeisenbergElement::central(z)).matrix;
                let expect = CMatrix::identity(p as usize, p as usize) * field.psi(z);
                worst_center = worst_center.max(distance(&op, &expect));
            }
        }
    }
    ok(
        worst_dim < TOL && worst_center < TOL,
        format!(
            "{frames} realizations, |dim commutant − 1| ≤ {worst_dim:.2e}, central character defect {worst_center:.2e}"
        ),
    )
}

fn criterion_7(sweeps: &[&SweepReport]) -> Outcome {
    let mut worst = 0.0f64;
    let mut samples = 0;
    for p in [7u32, 11, 13] {
        let ctx = PrimeContext::new(&arnold(), p).unwrap();
        let spectrum = ctx.spectrum(&ctx.defining).unwrap();
        let simple: Vec<usize> = spectrum
            .spaces
            .iter()
            .filter(|s| s.multiplicity == 1)
            .map(|s| s.index)
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(70 + p as u64);
        for _ in 0..50 {
            let k = simple[rng.random_range(0..simple.len())];
            let psi = eigenfunction(&spectrum, k).unwrap();
            let target = Frame::standard(random_enhanced(&mut rng, p));
            let carried = psi.in_realization(&ctx.system, &target);
            let x = ctx.system.field().elem(rng.random_range(0..p as i64));
            worst = worst.max(projector_identity_check(&ctx.system, &carried, x).deviation());
            samples += 1;
        }
    }
    let passing: Vec<_> = sweeps
        .iter()
        .flat_map(|r| r.records.iter())
        .filter(|r| r.pass)
        .collect();
    let a_max = passing.iter().map(|r| r.a_max).fold(0.0, f64::max);
    ok(
        worst < TOL && a_max <= 4.0 + 1e-8,
        format!(
            "{samples} samples, max |direct − projector| {worst:.2e}; max a_x over {} passing records {a_max:.6}",
            passing.len()
        ),
    )
}

fn criterion_8() -> Outcome {
    let mut cfg = SweepConfig::new(arnold(), 101, 199);
    cfg.seed = 8;
    let report = value_distribution(&cfg).expect("inert primes present");
    let second = reference_moment(2);
    let oracle_ok = (second - 1.0).abs() < 1e-10 && (reference_moment(4) - 2.0).abs() < 1e-10;
    let m2 = report.moments[1];
    ok(
        oracle_ok && (m2 - second).abs() <= 0.1 && report.ks_distance < 0.1,
        format!(
            "{} inert primes, {} samples, E|Ψ|² = {m2:.4} (ref {second:.4}), E|Ψ|⁴ = {:.4} (ref {:.4}), KS = {:.4}",
            report.primes.len(),
            report.samples,
            report.moments[3],
            report.reference_moments[3],
            report.ks_distance
        ),
    )
}

fn criterion_9() -> Outcome {
    let mut cfg = SweepConfig::new(arnold(), 3, 31);
    cfg.realizations = RealizationPolicy::All;
    cfg.seed = 99;
    let dump = |cfg: &SweepConfig| {
        let report = universal_sweep(cfg).unwrap();
        let mut buf = Vec::new();
        write_sweep_csv(&mut buf, &report.records).unwrap();
        (report, buf)
    };
    let (report, first) = dump(&cfg);
    cfg.jobs = 1;
    let (_, second) = dump(&cfg);
    let ramified_skipped =
        report.skipped.iter().any(|s| s.p == 5 && s.reason == "ramified") && !report.records.iter().any(|r| r.p == 5);
    let p3: Vec<_> = report.records.iter().filter(|r| r.p == 3).collect();
    let p3_reported = !p3.is_empty() && p3.iter().all(|r| !r.gating());
    let deterministic = first == second;
    ok(
        ramified_skipped && p3_reported && deterministic,
        format!(
            "p = 5 skipped as ramified: {ramified_skipped}, p = 3 reported non-gating ({} rows): {p3_reported}, \
             identical CSV on rerun ({} bytes): {deterministic}",
            p3.len(),
            first.len()
        ),
    )
}

fn main() {
    let start = Instant::now();
    let (c1, r1) = criterion_1();
    let (c2, r2) = criterion_2();
    let c7 = criterion_7(&[&r1, &r2]);
    let outcomes = vec![
        (1, "supremum bound, defining realization", c1),
        (2, "supremum bound, every realization", c2),
        (3, "split closed form", criterion_3()),
        (4, "Weil representation and Egorov identity", criterion_4()),
        (5, "canonical intertwiner axioms", criterion_5()),
        (6, "Stone-von Neumann", criterion_6()),
        (7, "projector identity and a_x bound", c7),
        (8, "value distribution", criterion_8()),
        (9, "exclusions and determinism", criterion_9()),
    ];
    let mut unexpected = 0;
    for (n, name, o) in &outcomes {
        let tag = match (o.pass, o.documented) {
            (true, _) => "PASS",
            (false, true) => "FAIL (documented discrepancy)",
            (false, false) => "FAIL",
        };
        println!("criterion {n} [{tag}] {name}: {}", o.detail);
        if !o.pass && !o.documented {
            unexpected += 1;
        }
    }
    println!("acceptance finished in {:.1}s", start.elapsed().as_secs_f64());
    if unexpected > 0 {
        eprintln!("{unexpected} criteria failed");
        std::process::exit(1);
    }
}
