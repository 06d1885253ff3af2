//! Decomposition of a Weil model into Hecke character spaces and extraction
//! of the eigenfunctions.
//!
//! For the cyclic torus T = ⟨G⟩ of order N the projector onto the χ_k space
//! is P_k = (1/N)·Σ_j exp(−2πi·kj/N)·ρ(G^j). Nothing here forms P_k
//! densely. The diagonals of all P_k come from one FFT per coordinate over
//! the diagonals of ρ(G^j), and the range of each P_k is found by a pivoted
//! Cholesky factorization P_k ≈ L·L* that requests single columns. The
//! multiplicity is the number of eigenvalues of L*·L (the nonzero spectrum
//! of P_k) above 0.5.

use std::io::Write;

use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;
use thiserror::Error;

use crate::arith::{CyclicCharacter, RootsOfUnity};
use crate::groups::{HeckeTorus, TorusKind};
use crate::linalg::{norm_sqr, CMatrix, CVector};
use crate::models::{CanonicalSystem, Frame, Kernel, ModelError, ModelVector};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HeckeError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("torus is mod {torus}, model is mod {model}")]
    FieldMismatch { torus: u32, model: u32 },
    #[error("character {0} has no eigenvectors")]
    Empty(usize),
    #[error("character {index} has a {multiplicity}-dimensional eigenspace")]
    Degenerate { index: usize, multiplicity: usize },
    #[error("rank of the character {0} projector is ambiguous at the 0.5 threshold")]
    Indeterminate(usize),
    #[error("closed-form eigenvectors need a split torus, this one is {0}")]
    NotSplit(TorusKind),
    #[error("realization {0} is not fixed by the Hecke torus")]
    NotTorusFixed(String),
    #[error("character of order {found} cannot be a character of F_p* (order {expected})")]
    CharacterOrder { found: usize, expected: usize },
}

/// Eigenvalues of P_k counted as part of the range.
pub const RANK_THRESHOLD: f64 = 0.5;
/// Eigenvalues in this band make the count unreliable.
const AMBIGUOUS_BAND: (f64, f64) = (0.25, 0.75);
/// Stop factoring once the unexplained trace of P_k drops below this.
const RESIDUAL_TRACE: f64 = 0.25;

#[derive(Debug, Clone)]
pub struct CharacterSpace {
    pub index: usize,
    pub multiplicity: usize,
    /// tr P_k, which should be close to the multiplicity.
    pub trace: f64,
    /// Nonzero spectrum of P_k found by the factorization, descending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal basis of the eigenspace.
    pub basis: Vec<CVector>,
    pub indeterminate: bool,
}

#[derive(Debug, Clone)]
pub struct HeckeSpectrum {
    pub p: u32,
    pub kind: TorusKind,
    pub frame: Frame,
    pub torus_order: usize,
    pub spaces: Vec<CharacterSpace>,
}

impl HeckeSpectrum {
    pub fn total_multiplicity(&self) -> usize {
        self.spaces.iter().map(|s| s.multiplicity).sum()
    }

    pub fn space(&self, k: usize) -> &CharacterSpace {
        &self.spaces[k]
    }

    pub fn has_indeterminate(&self) -> bool {
        self.spaces.iter().any(|s| s.indeterminate)
    }
}

/// A χ-eigenvector scaled to ‖Ψ‖² = p with its first nonzero amplitude
/// real and positive.
#[derive(Debug, Clone)]
pub struct HeckeEigenfunction {
    pub p: u32,
    pub kind: TorusKind,
    pub character: usize,
    pub multiplicity: usize,
    /// Position inside the eigenspace basis; always 0 when multiplicity is 1.
    pub basis_index: usize,
    pub degenerate: bool,
    pub vector: ModelVector,
}

impl HeckeEigenfunction {
    pub fn amplitudes(&self) -> &CVector {
        &self.vector.amplitudes
    }

    pub fn frame(&self) -> &Frame {
        &self.vector.frame
    }

    pub fn norm_sqr(&self) -> f64 {
        self.vector.norm_sqr()
    }

    /// Same eigenfunction carried to another realization.
    pub fn in_realization(&self, system: &CanonicalSystem, target: &Frame) -> HeckeEigenfunction {
        HeckeEigenfunction {
            vector: system.change_realization(&self.vector, target),
            ..self.clone()
        }
    }
}

struct Projector<'a> {
    kernels: &'a [Kernel<'a>],
    roots: &'a RootsOfUnity,
    k: usize,
}

impl Projector<'_> {
    fn column(&self, c: usize) -> Vec<Complex64> {
        let n = self.kernels.len();
        let p = self.kernels[0].dim();
        let mut col = vec![Complex64::new(0.0, 0.0); p];
        for (j, kernel) in self.kernels.iter().enumerate() {
            let w = self.roots.get(self.k * j % n).conj();
            for (acc, v) in col.iter_mut().zip(kernel.column(c)) {
                *acc += w * v;
            }
        }
        let scale = 1.0 / n as f64;
        col.iter_mut().for_each(|v| *v *= scale);
        col
    }
}

fn factor(projector: &Projector<'_>, diagonal: &[f64], index: usize) -> CharacterSpace {
    let p = diagonal.len();
    let trace: f64 = diagonal.iter().sum();
    let mut residual: Vec<f64> = diagonal.to_vec();
    let mut factors: Vec<Vec<Complex64>> = Vec::new();
    while factors.len() < p {
        let remaining: f64 = residual.iter().map(|d| d.max(0.0)).sum();
        if remaining < RESIDUAL_TRACE {
            break;
        }
        let (c, &dc) = residual
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("nonempty");
        if dc <= 1e-12 {
            break;
        }
        let mut col = projector.column(c);
        for l in &factors {
            let lc = l[c].conj();
            for (v, li) in col.iter_mut().zip(l) {
                *v -= li * lc;
            }
        }
        let s = dc.sqrt();
        col.iter_mut().for_each(|v| *v /= s);
        for (r, v) in residual.iter_mut().zip(&col) {
            *r -= v.norm_sqr();
        }
        factors.push(col);
    }

    let r = factors.len();
    if r == 0 {
        return CharacterSpace {
            index,
            multiplicity: 0,
            trace,
            eigenvalues: Vec::new(),
            basis: Vec::new(),
            indeterminate: trace.abs() > AMBIGUOUS_BAND.0,
        };
    }
    let l = CMatrix::from_fn(p, r, |i, j| factors[j][i]);
    let eig = SymmetricEigen::new(l.adjoint() * &l);
    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let multiplicity = eigenvalues.iter().filter(|&&v| v > RANK_THRESHOLD).count();
    let indeterminate = eigenvalues
        .iter()
        .any(|&v| v > AMBIGUOUS_BAND.0 && v < AMBIGUOUS_BAND.1)
        || (trace - multiplicity as f64).abs() > AMBIGUOUS_BAND.0;

    let basis = if multiplicity == r {
        // Gram–Schmidt in pivot order keeps the basis reproducible inside
        // degenerate eigenspaces.
        gram_schmidt(&factors)
    } else {
        order
            .iter()
            .take(multiplicity)
            .map(|&i| {
                let w = eig.eigenvectors.column(i);
                let u = &l * w / Complex64::new(eig.eigenvalues[i].sqrt(), 0.0);
                CVector::from_iterator(p, u.iter().copied())
            })
            .collect()
    };
    CharacterSpace {
        index,
        multiplicity,
        trace,
        eigenvalues,
        basis,
        indeterminate,
    }
}

fn gram_schmidt(cols: &[Vec<Complex64>]) -> Vec<CVector> {
    let mut out: Vec<CVector> = Vec::with_capacity(cols.len());
    for c in cols {
        let mut v = CVector::from_column_slice(c);
        for u in &out {
            let proj = u.dotc(&v);
            v -= u * proj;
        }
        let n = norm_sqr(&v).sqrt();
        out.push(v / Complex64::new(n, 0.0));
    }
    out
}

/// Character-space decomposition of the model `frame` under `torus`.
pub fn hecke_spectrum(
    system: &CanonicalSystem,
    torus: &HeckeTorus,
    frame: &Frame,
) -> Result<HeckeSpectrum, HeckeError> {
    let p = system.modulus();
    if torus.modulus() != p || frame.modulus() != p {
        return Err(HeckeError::FieldMismatch {
            torus: torus.modulus(),
            model: p,
        });
    }
    let n = torus.order();
    let kernels: Vec<Kernel<'_>> = torus.elements().iter().map(|g| system.weil_kernel(frame, g)).collect();
    let roots = RootsOfUnity::new(n);

    // diag(P_k)[i] = (1/N)·Σ_j exp(−2πi·kj/N)·ρ(G^j)[i,i], a forward DFT in j.
    let fft = FftPlanner::<f64>::new().plan_fft_forward(n);
    let mut diagonals = vec![vec![0.0; p as usize]; n];
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..p as usize {
        for (b, kernel) in buf.iter_mut().zip(&kernels) {
            *b = kernel.entry(i, i);
        }
        fft.process(&mut buf);
        for (d, v) in diagonals.iter_mut().zip(&buf) {
            d[i] = v.re / n as f64;
        }
    }

    let spaces = (0..n)
        .map(|k| {
            let projector = Projector {
                kernels: &kernels,
                roots: &roots,
                k,
            };
            factor(&projector, &diagonals[k], k)
        })
        .collect();
    Ok(HeckeSpectrum {
        p,
        kind: torus.kind(),
        frame: *frame,
        torus_order: n,
        spaces,
    })
}

fn normalize(mut v: CVector, p: u32) -> CVector {
    let n = norm_sqr(&v).sqrt();
    v *= Complex64::new((p as f64).sqrt() / n, 0.0);
    if let Some(first) = v.iter().find(|z| z.norm() > 1e-8).copied() {
        let phase = first.conj() / first.norm();
        v *= phase;
    }
    v
}

/// All eigenfunctions of character `k`, one per basis vector; flagged as
/// degenerate when the space has dimension above 1.
pub fn eigenfunctions(spectrum: &HeckeSpectrum, k: usize) -> Result<Vec<HeckeEigenfunction>, HeckeError> {
    let space = &spectrum.spaces[k];
    if space.indeterminate {
        return Err(HeckeError::Indeterminate(k));
    }
    if space.multiplicity == 0 {
        return Err(HeckeError::Empty(k));
    }
    Ok(space
        .basis
        .iter()
        .enumerate()
        .map(|(b, v)| HeckeEigenfunction {
            p: spectrum.p,
            kind: spectrum.kind,
            character: k,
            multiplicity: space.multiplicity,
            basis_index: b,
            degenerate: space.multiplicity > 1,
            vector: ModelVector {
                frame: spectrum.frame,
                amplitudes: normalize(v.clone(), spectrum.p),
            },
        })
        .collect())
}

/// The unique (up to phase) eigenfunction of a multiplicity-one character.
pub fn eigenfunction(spectrum: &HeckeSpectrum, k: usize) -> Result<HeckeEigenfunction, HeckeError> {
    let mut all = eigenfunctions(spectrum, k)?;
    if all.len() > 1 {
        return Err(HeckeError::Degenerate {
            index: k,
            multiplicity: all.len(),
        });
    }
    Ok(all.remove(0))
}

/// Closed-form eigenvector Ψ(x) = χ_q(x)·χ(x) for a split torus, written in
/// the frame with transversal on the other fixed line, then carried to
/// `frame`. `chi` is a character of F_p* relative to its smallest primitive
/// root. The returned record carries the matching torus character index,
/// read off from the generator's eigenvalue on σ: ρ(B)Ψ = χ(λ_B)·Ψ where
/// Bσ = λ_B·σ.
pub fn split_closed_form(
    system: &CanonicalSystem,
    torus: &HeckeTorus,
    frame: &Frame,
    chi: &CyclicCharacter,
) -> Result<HeckeEigenfunction, HeckeError> {
    let field = system.field();
    let p = field.modulus();
    if torus.kind() != TorusKind::Split {
        return Err(HeckeError::NotSplit(torus.kind()));
    }
    if chi.order() != p as usize - 1 {
        return Err(HeckeError::CharacterOrder {
            found: chi.order(),
            expected: p as usize - 1,
        });
    }
    let sigma = frame.sigma();
    let g = torus.generator();
    let lambda = sigma
        .ratio_to(&g.apply(&sigma))
        .ok_or_else(|| HeckeError::NotTorusFixed(frame.lagrangian().label()))?;
    let other = torus
        .fixed_lines()
        .into_iter()
        .find(|l| !l.same_line(&frame.lagrangian()))
        .ok_or_else(|| HeckeError::NotTorusFixed(frame.lagrangian().label()))?;
    let w = sigma.omega(&other.sigma());
    let eigen_frame = Frame::with_complement(
        frame.lagrangian(),
        other.sigma().scale(field.inverse(w).map_err(ModelError::from)?),
    )?;

    // discrete logs base the smallest primitive root
    let root = field.primitive_root();
    let mut dlog = vec![0usize; p as usize];
    let mut x = field.elem(1);
    for e in 0..p as usize - 1 {
        dlog[x.value() as usize] = e;
        x = x * root;
    }
    let amps = CVector::from_fn(p as usize, |x, _| {
        if x == 0 {
            return Complex64::new(0.0, 0.0);
        }
        let q = field.chi_q(field.elem(x as i64)) as f64;
        chi.value(dlog[x]).expect("log in range") * q
    });
    let closed = ModelVector::new(eigen_frame, amps)?;
    let carried = system.change_realization(&closed, frame);

    let n = torus.order();
    let character = chi.index() * dlog[lambda.value() as usize] % n;
    // δ₀ carries the character λ ↦ χ_q(λ), doubling that space.
    let quadratic = (n / 2) * dlog[lambda.value() as usize] % n;
    let multiplicity = if character == quadratic { 2 } else { 1 };
    Ok(HeckeEigenfunction {
        p,
        kind: torus.kind(),
        character,
        multiplicity,
        basis_index: 0,
        degenerate: multiplicity > 1,
        vector: ModelVector {
            frame: *frame,
            amplitudes: normalize(carried.amplitudes, p),
        },
    })
}

/// Header comment line of the eigenfunction dump.
pub const EIGENFUNCTION_CSV_VERSION: &str = "# weil-lab eigenfunctions v1";

#[derive(Debug, Clone, Serialize)]
pub struct EigenfunctionRow {
    pub p: u32,
    pub kind: TorusKind,
    pub character_index: usize,
    pub multiplicity: usize,
    pub x: usize,
    pub re: f64,
    pub im: f64,
}

pub fn eigenfunction_rows(psi: &HeckeEigenfunction) -> impl Iterator<Item = EigenfunctionRow> + '_ {
    psi.amplitudes().iter().enumerate().map(move |(x, z)| EigenfunctionRow {
        p: psi.p,
        kind: psi.kind,
        character_index: psi.character,
        multiplicity: psi.multiplicity,
        x,
        re: z.re,
        im: z.im,
    })
}

/// CSV with columns p, kind, character_index, multiplicity, x, re, im.
pub fn write_eigenfunction_csv<W: Write>(w: &mut W, functions: &[HeckeEigenfunction]) -> std::io::Result<()> {
    writeln!(w, "{EIGENFUNCTION_CSV_VERSION}")?;
    writeln!(w, "p,kind,character_index,multiplicity,x,re,im")?;
    for psi in functions {
        for r in eigenfunction_rows(psi) {
            writeln!(
                w,
                "{},{},{},{},{},{:.15e},{:.15e}",
                r.p, r.kind, r.character_index, r.multiplicity, r.x, r.re, r.im
            )?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{defining_lagrangian, enumerate_lagrangians, CatMap};
    use crate::linalg::{distance, phase_distance};
    use std::sync::Arc;

    fn setup(p: u32) -> (CanonicalSystem, HeckeTorus, Frame) {
        let sys = CanonicalSystem::new(p).unwrap();
        let torus = HeckeTorus::new(&CatMap::arnold(), p).unwrap();
        (sys, torus, Frame::standard(defining_lagrangian(p)))
    }

    /// Dense P_k straight from the definition.
    fn dense_projector(sys: &CanonicalSystem, torus: &HeckeTorus, frame: &Frame, k: usize) -> CMatrix {
        let n = torus.order();
        let p = sys.modulus() as usize;
        let mut acc = CMatrix::zeros(p, p);
        for (j, g) in torus.elements().iter().enumerate() {
            let w = Complex64::from_polar(1.0, -std::f64::consts::TAU * (k * j % n) as f64 / n as f64);
            acc += sys.weil_op(frame, g).matrix * w;
        }
        acc / Complex64::new(n as f64, 0.0)
    }

    #[test]
    fn inert_p7_multiplicities() {
        let (sys, torus, frame) = setup(7);
        let spectrum = hecke_spectrum(&sys, &torus, &frame).unwrap();
        assert_eq!(spectrum.spaces.len(), 8);
        assert_eq!(spectrum.total_multiplicity(), 7);
        let zeros = spectrum.spaces.iter().filter(|s| s.multiplicity == 0).count();
        assert_eq!(zeros, 1);
        assert!(spectrum.spaces.iter().all(|s| s.multiplicity <= 1 && !s.indeterminate));
    }

    #[test]
    fn projectors_are_idempotent_and_orthogonal() {
        let (sys, torus, frame) = setup(7);
        let ps: Vec<CMatrix> = (0..torus.order())
            .map(|k| dense_projector(&sys, &torus, &frame, k))
            .collect();
        for (j, pj) in ps.iter().enumerate() {
            assert!(distance(&(pj * pj), pj) < 1e-8);
            for pk in ps.iter().skip(j + 1) {
                assert!(crate::linalg::frobenius(&(pj * pk)) < 1e-8);
            }
        }
        // factorized range agrees with the dense projector
        let spectrum = hecke_spectrum(&sys, &torus, &frame).unwrap();
        for s in &spectrum.spaces {
            let mut rebuilt = CMatrix::zeros(7, 7);
            for b in &s.basis {
                rebuilt += b * b.adjoint();
            }
            assert!(distance(&rebuilt, &ps[s.index]) < 1e-9);
        }
    }

    #[test]
    fn eigenfunctions_satisfy_hecke_equation() {
        let (sys, torus, frame) = setup(7);
        let spectrum = hecke_spectrum(&sys, &torus, &frame).unwrap();
        let n = torus.order();
        for s in spectrum.spaces.iter().filter(|s| s.multiplicity == 1) {
            let psi = eigenfunction(&spectrum, s.index).unwrap();
            assert!((psi.norm_sqr() - 7.0).abs() < 1e-9);
            let first = psi.amplitudes().iter().find(|z| z.norm() > 1e-8).unwrap();
            assert!(first.im.abs() < 1e-12 && first.re > 0.0);
            for (j, g) in torus.elements().iter().enumerate() {
                let chi = Complex64::from_polar(1.0, std::f64::consts::TAU * (s.index * j % n) as f64 / n as f64);
                let lhs = sys.weil_op(&frame, g).matrix * psi.amplitudes();
                assert!((lhs - psi.amplitudes() * chi).norm() < 1e-9);
            }
        }
        let empty = spectrum.spaces.iter().find(|s| s.multiplicity == 0).unwrap();
        assert!(matches!(
            eigenfunction(&spectrum, empty.index),
            Err(HeckeError::Empty(_))
        ));
    }

    #[test]
    fn split_case_has_one_doubled_character() {
        let (sys, torus, frame) = setup(11);
        let spectrum = hecke_spectrum(&sys, &torus, &frame).unwrap();
        assert_eq!(spectrum.total_multiplicity(), 11);
        let doubled: Vec<_> = spectrum.spaces.iter().filter(|s| s.multiplicity == 2).collect();
        assert_eq!(doubled.len(), 1);
        let k = doubled[0].index;
        assert!(matches!(
            eigenfunction(&spectrum, k),
            Err(HeckeError::Degenerate { multiplicity: 2, .. })
        ));
        let basis = eigenfunctions(&spectrum, k).unwrap();
        assert_eq!(basis.len(), 2);
        assert!(basis.iter().all(|b| b.degenerate));
        let inner = basis[0].amplitudes().dotc(basis[1].amplitudes());
        assert!(inner.norm() < 1e-9);
    }

    #[test]
    fn split_closed_form_matches_numeric() {
        let p = 11;
        let (sys, torus, _) = setup(p);
        let lines = torus.fixed_lines();
        let frame = Frame::standard(lines[0]);
        let spectrum = hecke_spectrum(&sys, &torus, &frame).unwrap();
        let roots = Arc::new(RootsOfUnity::new(p as usize - 1));
        let mut matched = 0;
        for j in 0..p as usize - 1 {
            let chi = CyclicCharacter::new(j, roots.clone());
            let closed = split_closed_form(&sys, &torus, &frame, &chi).unwrap();
            assert!((closed.amplitudes()[0]).norm() < 1e-12);
            let expect = (p as f64 / (p as f64 - 1.0)).sqrt();
            for z in closed.amplitudes().iter().skip(1) {
                assert!((z.norm() - expect).abs() < 1e-12);
            }
            let space = spectrum.space(closed.character);
            assert_eq!(space.multiplicity, closed.multiplicity);
            if space.multiplicity == 1 {
                let numeric = eigenfunction(&spectrum, closed.character).unwrap();
                let (d, _) = phase_distance(numeric.amplitudes(), closed.amplitudes());
                assert!(d < 1e-8, "j={j} d={d}");
                matched += 1;
            }
        }
        assert_eq!(matched, p as usize - 2);
    }

    #[test]
    fn split_closed_form_rejections() {
        let (sys, torus, frame) = setup(11);
        let roots = Arc::new(RootsOfUnity::new(10));
        let chi = CyclicCharacter::new(1, roots);
        // the defining line (0,1) is not an eigenline of [[2,1],[1,1]] mod 11
        assert!(matches!(
            split_closed_form(&sys, &torus, &frame, &chi),
            Err(HeckeError::NotTorusFixed(_))
        ));
        let (sys7, torus7, frame7) = setup(7);
        let chi7 = CyclicCharacter::new(1, Arc::new(RootsOfUnity::new(6)));
        assert!(matches!(
            split_closed_form(&sys7, &torus7, &frame7, &chi7),
            Err(HeckeError::NotSplit(_))
        ));
        let wrong = CyclicCharacter::new(1, Arc::new(RootsOfUnity::new(4)));
        let fixed = Frame::standard(torus.fixed_lines()[0]);
        assert!(matches!(
            split_closed_form(&sys, &torus, &fixed, &wrong),
            Err(HeckeError::CharacterOrder { .. })
        ));
    }

    #[test]
    fn eigenfunctions_are_realization_covariant() {
        let p = 13;
        let (sys, torus, frame) = setup(p);
        let spectrum = hecke_spectrum(&sys, &torus, &frame).unwrap();
        let target = Frame::standard(enumerate_lagrangians(p)[4]);
        let other = hecke_spectrum(&sys, &torus, &target).unwrap();
        for s in spectrum.spaces.iter().filter(|s| s.multiplicity == 1) {
            let carried = eigenfunction(&spectrum, s.index).unwrap().in_realization(&sys, &target);
            assert!((carried.norm_sqr() - p as f64).abs() < 1e-8);
            let direct = eigenfunction(&other, s.index).unwrap();
            let (d, _) = phase_distance(carried.amplitudes(), direct.amplitudes());
            assert!(d < 1e-8);
        }
    }

    #[test]
    fn csv_dump_layout() {
        let (sys, torus, frame) = setup(7);
        let spectrum = hecke_spectrum(&sys, &torus, &frame).unwrap();
        let k = spectrum.spaces.iter().find(|s| s.multiplicity == 1).unwrap().index;
        let psi = eigenfunction(&spectrum, k).unwrap();
        let mut buf = Vec::new();
        write_eigenfunction_csv(&mut buf, &[psi]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], EIGENFUNCTION_CSV_VERSION);
        assert_eq!(lines[1], "p,kind,character_index,multiplicity,x,re,im");
        assert_eq!(lines.len(), 2 + 7);
        assert!(lines[2].starts_with(&format!("7,inert,{k},1,0,")));
    }
}
