//! Character sums over `F_p^n`.
//!
//! Normalization used throughout:
//!
//! ```text
//! X̂(m)        = p^(-n) Σ_{x ∈ X} χ(−m·x)
//! 1_X(x)      = Σ_m X̂(m) χ(m·x)
//! Σ_m |X̂(m)|² = p^(-n) |X|
//! Ŝ₀(m)       = p^(-n) Σ_{y ∈ S₀} χ(m·y)
//! (f dσ)^∨(c) = |V|^(-1) Σ_{x ∈ V} χ(c·x) f(x)
//! ```
//!
//! With this convention the isotropic pair count is
//! `#{(x, y) ∈ X² : ‖x − y‖ = 0} = p^(2n) Σ_m |X̂(m)|² Ŝ₀(m)`.
//!
//! Indicator transforms bucket `m·x` into an integer histogram first, so each
//! cell is a `p`-term phase sum regardless of `|X|`.

use std::ops::AddAssign;

use num_complex::Complex64;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{FieldSpec, Scalar};
use crate::varieties::{decode_into, enum_sphere, PointSet, DEFAULT_CAP};

/// Neumaier-compensated complex accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    re: f64,
    re_err: f64,
    im: f64,
    im_err: f64,
}

fn neumaier(sum: &mut f64, err: &mut f64, v: f64) {
    let t = *sum + v;
    if sum.abs() >= v.abs() {
        *err += (*sum - t) + v;
    } else {
        *err += (v - t) + *sum;
    }
    *sum = t;
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, v: Complex64) {
        neumaier(&mut self.re, &mut self.re_err, v.re);
        neumaier(&mut self.im, &mut self.im_err, v.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re + self.re_err, self.im + self.im_err)
    }
}

impl AddAssign<Complex64> for CompensatedSum {
    fn add_assign(&mut self, v: Complex64) {
        self.add(v);
    }
}

impl FromIterator<Complex64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        let mut s = CompensatedSum::new();
        iter.into_iter().for_each(|v| s.add(v));
        s
    }
}

/// Compensated real sum.
pub fn real_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter()
        .map(|v| Complex64::new(v, 0.0))
        .collect::<CompensatedSum>()
        .value()
        .re
}

fn checked_space(field: &FieldSpec, n: usize) -> Result<u64> {
    let mut acc = 1u64;
    for _ in 0..n {
        acc = acc
            .checked_mul(u64::from(field.p()))
            .ok_or_else(|| Error::Usage("frequency space too large".into()))?;
    }
    Ok(acc)
}

fn work_guard(space: u64, per_cell: usize, cap: u64) -> Result<()> {
    let work = u128::from(space) * per_cell.max(1) as u128;
    if work > u128::from(cap) * 100 {
        return Err(Error::CapExceeded {
            requested: work,
            cap: cap * 100,
        });
    }
    Ok(())
}

/// A dense table of complex values indexed by every `m ∈ F_p^n`.
#[derive(Clone, Debug)]
pub struct SpectralTable {
    field: FieldSpec,
    n: usize,
    values: Vec<Complex64>,
}

impl SpectralTable {
    fn build<F>(field: &FieldSpec, n: usize, cell: F) -> Result<Self>
    where
        F: Fn(&[u32]) -> Complex64 + Sync,
    {
        let space = checked_space(field, n)?;
        let p = field.p();
        let values = (0..space)
            .into_par_iter()
            .map_init(
                || vec![0u32; n],
                |m, code| {
                    decode_into(p, code, m);
                    cell(m)
                },
            )
            .collect();
        Ok(SpectralTable {
            field: field.clone(),
            n,
            values,
        })
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn index_of(&self, m: &[u32]) -> usize {
        m.iter()
            .fold(0usize, |acc, &c| acc * self.field.p() as usize + c as usize)
    }

    pub fn get(&self, m: &[u32]) -> Complex64 {
        self.values[self.index_of(m)]
    }

    pub fn frequency(&self, index: usize) -> Vec<u32> {
        let mut m = vec![0u32; self.n];
        decode_into(self.field.p(), index as u64, &mut m);
        m
    }

    /// `(m, value)` pairs in lexicographic order of `m`.
    pub fn iter(&self) -> impl Iterator<Item = (Vec<u32>, Complex64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(|(i, &v)| (self.frequency(i), v))
    }

    /// `Σ_m |T(m)|²`.
    pub fn energy(&self) -> f64 {
        real_sum(self.values.iter().map(|v| v.norm_sqr()))
    }

    /// `Σ_m T(m) χ(m·x)`: Fourier inversion at `x`.
    pub fn invert_at(&self, x: &[u32]) -> Complex64 {
        let mut m = vec![0u32; self.n];
        let mut acc = CompensatedSum::new();
        for (i, v) in self.values.iter().enumerate() {
            decode_into(self.field.p(), i as u64, &mut m);
            acc += v * self.field.chi_raw(self.field.dot_raw(&m, x));
        }
        acc.value()
    }
}

/// `Σ_t counts[t] · χ(sign·t)` with integer weights.
fn weighted_phase_sum(field: &FieldSpec, counts: &[u64], negate: bool) -> Complex64 {
    counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(t, &c)| {
            let t = t as u32;
            let t = if negate { field.neg_raw(t) } else { t };
            field.chi_raw(t) * c as f64
        })
        .collect::<CompensatedSum>()
        .value()
}

/// `X̂(m) = p^(-n) Σ_{x∈X} χ(−m·x)` for every `m ∈ F_p^n`.
pub fn fourier_indicator(x: &PointSet) -> Result<SpectralTable> {
    fourier_indicator_capped(x, DEFAULT_CAP)
}

pub fn fourier_indicator_capped(x: &PointSet, cap: u64) -> Result<SpectralTable> {
    let field = x.field();
    let n = x.dim();
    let space = checked_space(field, n)?;
    work_guard(space, x.len(), cap)?;
    let scale = (f64::from(field.p())).powi(-(n as i32));
    SpectralTable::build(field, n, |m| {
        let mut counts = vec![0u64; field.p() as usize];
        for pt in x.iter() {
            counts[field.dot_raw(m, pt) as usize] += 1;
        }
        weighted_phase_sum(field, &counts, true) * scale
    })
}

fn check_s0_hypotheses(field: &FieldSpec, n: usize) -> Result<()> {
    if n % 4 != 2 || field.residue_class_mod_4() != 3 {
        return Err(Error::Hypothesis(format!(
            "closed-form Ŝ₀ needs n ≡ 2 (mod 4) and p ≡ 3 (mod 4); got n = {n}, p = {}",
            field.p()
        )));
    }
    Ok(())
}

/// `Σ_{r≠0} χ(r t)`, which is `p − 1` for `t = 0` and `−1` otherwise.
pub fn punctured_row_sum(field: &FieldSpec, t: Scalar) -> i64 {
    if t.is_zero() {
        i64::from(field.p()) - 1
    } else {
        -1
    }
}

/// `Ŝ₀(m) = p^(-1) δ₀(m) − p^(-(n+2)/2) Σ_{r≠0} χ(r‖m‖)`, valid for
/// `n ≡ 2 (mod 4)` and `p ≡ 3 (mod 4)`.
pub fn s0_hat_formula(m: &[u32], n: usize, field: &FieldSpec) -> Result<Complex64> {
    check_s0_hypotheses(field, n)?;
    if m.len() != n {
        return Err(Error::Usage(format!(
            "frequency of length {} in dimension {n}",
            m.len()
        )));
    }
    let p = f64::from(field.p());
    let delta = if m.iter().all(|&c| c == 0) {
        1.0 / p
    } else {
        0.0
    };
    let row = punctured_row_sum(field, Scalar::from_residue(field.norm_raw(m))) as f64;
    let tail = p.powf(-((n as f64) + 2.0) / 2.0);
    Ok(Complex64::new(delta - tail * row, 0.0))
}

/// Shared `Ŝ₀` evaluation from an explicit list of zero-sphere points.
fn s0_hat_from_points(m: &[u32], s0: &PointSet) -> Complex64 {
    let field = s0.field();
    let mut counts = vec![0u64; field.p() as usize];
    for y in s0.iter() {
        counts[field.dot_raw(m, y) as usize] += 1;
    }
    weighted_phase_sum(field, &counts, false) * f64::from(field.p()).powi(-(s0.dim() as i32))
}

/// `Ŝ₀(m)` by enumerating the zero sphere.
pub fn s0_hat_direct(m: &[u32], n: usize, field: &FieldSpec) -> Result<Complex64> {
    if m.len() != n {
        return Err(Error::Usage(format!(
            "frequency of length {} in dimension {n}",
            m.len()
        )));
    }
    let s0 = enum_sphere(field, n, Scalar::from_residue(0), DEFAULT_CAP)?;
    Ok(s0_hat_from_points(m, &s0))
}

/// `Ŝ₀` over all of `F_p^n`, enumerating the zero sphere once.
pub fn s0_hat_direct_table(field: &FieldSpec, n: usize) -> Result<SpectralTable> {
    let s0 = enum_sphere(field, n, Scalar::from_residue(0), DEFAULT_CAP)?;
    work_guard(checked_space(field, n)?, s0.len(), DEFAULT_CAP)?;
    SpectralTable::build(field, n, |m| s0_hat_from_points(m, &s0))
}

pub fn s0_hat_formula_table(field: &FieldSpec, n: usize) -> Result<SpectralTable> {
    check_s0_hypotheses(field, n)?;
    SpectralTable::build(field, n, |m| {
        s0_hat_formula(m, n, field).expect("hypotheses checked")
    })
}

/// `max_m |formula − direct|` over all of `F_p^n`.
pub fn s0_max_discrepancy(field: &FieldSpec, n: usize) -> Result<f64> {
    let formula = s0_hat_formula_table(field, n)?;
    let direct = s0_hat_direct_table(field, n)?;
    Ok(formula
        .values()
        .iter()
        .zip(direct.values())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max))
}

/// `|Σ_m |X̂(m)|² − p^(-n)|X||`.
pub fn plancherel_error(table: &SpectralTable, set_size: usize) -> f64 {
    let expect = set_size as f64 * f64::from(table.field().p()).powi(-(table.n() as i32));
    (table.energy() - expect).abs()
}

/// A complex-valued function on the points of a variety.
#[derive(Clone, Debug)]
pub struct SurfaceFunction {
    variety: PointSet,
    values: Vec<Complex64>,
}

impl SurfaceFunction {
    pub fn new(variety: PointSet, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != variety.len() {
            return Err(Error::Usage(format!(
                "{} values for a variety of {} points",
                values.len(),
                variety.len()
            )));
        }
        Ok(SurfaceFunction { variety, values })
    }

    pub fn constant(variety: PointSet, c: Complex64) -> Self {
        let values = vec![c; variety.len()];
        SurfaceFunction { variety, values }
    }

    /// Value 1 at the point with index `at`, 0 elsewhere.
    pub fn point_mass(variety: PointSet, at: usize) -> Result<Self> {
        if at >= variety.len() {
            return Err(Error::Usage(format!("point index {at} out of range")));
        }
        let mut values = vec![Complex64::new(0.0, 0.0); variety.len()];
        values[at] = Complex64::new(1.0, 0.0);
        Ok(SurfaceFunction { variety, values })
    }

    /// A random function: uniform support size, uniform support, values with
    /// independent uniform `[-1, 1]` real and imaginary parts.
    pub fn random(variety: PointSet, seed: u64) -> Result<Self> {
        if variety.is_empty() {
            return Err(Error::Usage("random function on an empty variety".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let support = rng.gen_range(1..=variety.len());
        let mut values = vec![Complex64::new(0.0, 0.0); variety.len()];
        for i in index::sample(&mut rng, variety.len(), support) {
            values[i] = Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0));
        }
        Ok(SurfaceFunction { variety, values })
    }

    pub fn variety(&self) -> &PointSet {
        &self.variety
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        SurfaceFunction {
            variety: self.variety.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    /// `‖f‖_{L²(V, dσ)} = (|V|^(-1) Σ |f|²)^(1/2)`.
    pub fn l2_norm(&self) -> f64 {
        (real_sum(self.values.iter().map(|v| v.norm_sqr())) / self.variety.len() as f64).sqrt()
    }
}

/// `(f dσ)^∨(c) = |V|^(-1) Σ_{x∈V} χ(c·x) f(x)` for every `c`.
pub fn inverse_surface_transform(f: &SurfaceFunction) -> Result<SpectralTable> {
    let v = f.variety();
    if v.is_empty() {
        return Err(Error::Usage(
            "surface transform over an empty variety".into(),
        ));
    }
    let field = v.field();
    work_guard(checked_space(field, v.dim())?, v.len(), DEFAULT_CAP)?;
    let inv_size = 1.0 / v.len() as f64;
    SpectralTable::build(field, v.dim(), |c| {
        v.iter()
            .zip(f.values())
            .filter(|(_, val)| val.re != 0.0 || val.im != 0.0)
            .map(|(x, val)| field.chi_raw(field.dot_raw(c, x)) * val)
            .collect::<CompensatedSum>()
            .value()
            * inv_size
    })
}

/// `‖(f dσ)^∨‖_{L^r(dc)} / ‖f‖_{L²(V, dσ)}`, counting measure on frequencies.
pub fn extension_ratio(f: &SurfaceFunction, r_exp: f64) -> Result<f64> {
    if r_exp.is_nan() || r_exp < 1.0 {
        return Err(Error::Usage(format!("exponent {r_exp} must be at least 1")));
    }
    let denom = f.l2_norm();
    if denom == 0.0 {
        return Err(Error::Domain("extension ratio of the zero function".into()));
    }
    let g = inverse_surface_transform(f)?;
    let num = real_sum(g.values().iter().map(|v| v.norm().powf(r_exp))).powf(1.0 / r_exp);
    Ok(num / denom)
}

/// `Σ_{m ∈ S_r} T(m) χ(y·m)`.
pub fn spectral_sphere_sum(table: &SpectralTable, y: &[u32], r: Scalar) -> Complex64 {
    let field = table.field();
    table
        .iter()
        .filter(|(m, _)| field.norm_raw(m) == r.value())
        .map(|(m, v)| v * field.chi_raw(field.dot_raw(&m, y)))
        .collect::<CompensatedSum>()
        .value()
}

/// Both sides of the apex-count estimate at a fixed apex `y`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ApexEstimate {
    /// `#{(x, z) ∈ X² : ‖x − y‖ = ‖z − y‖ ≠ 0}`.
    pub lhs: u128,
    /// `|X|²/p + p^n Σ_{r≠0} |Σ_{S_r} X̂ χ(y·m)|² + p^n |Σ_{‖m‖=0, m≠0} X̂ χ(y·m)|²`.
    pub rhs: f64,
    pub main_term: f64,
    pub sphere_term: f64,
    pub null_term: f64,
}

/// Evaluates both sides for apex `y` using a precomputed `X̂`.
pub fn apex_spectrum_sides_with(
    table: &SpectralTable,
    x: &PointSet,
    y: &[u32],
) -> Result<ApexEstimate> {
    let field = x.field();
    if table.field() != field || table.n() != x.dim() || y.len() != x.dim() {
        return Err(Error::Usage(
            "table, set and apex disagree on field or dimension".into(),
        ));
    }
    let p = field.p() as usize;

    let mut dist = vec![0u64; p];
    for pt in x.iter() {
        dist[field.dist_raw(y, pt) as usize] += 1;
    }
    let lhs: u128 = dist[1..]
        .iter()
        .map(|&c| u128::from(c) * u128::from(c))
        .sum();

    let mut shells = vec![CompensatedSum::new(); p];
    let mut m = vec![0u32; x.dim()];
    for (i, v) in table.values().iter().enumerate() {
        if i == 0 {
            // m = 0 sits on S₀ but is excluded from the null term
            continue;
        }
        decode_into(field.p(), i as u64, &mut m);
        shells[field.norm_raw(&m) as usize] += v * field.chi_raw(field.dot_raw(&m, y));
    }
    let pn = f64::from(field.p()).powi(x.dim() as i32);
    let size = x.len() as f64;
    let main_term = size * size / f64::from(field.p());
    let sphere_term = pn * real_sum(shells[1..].iter().map(|s| s.value().norm_sqr()));
    let null_term = pn * shells[0].value().norm_sqr();
    Ok(ApexEstimate {
        lhs,
        rhs: main_term + sphere_term + null_term,
        main_term,
        sphere_term,
        null_term,
    })
}

pub fn apex_spectrum_sides(x: &PointSet, y: &[u32]) -> Result<ApexEstimate> {
    apex_spectrum_sides_with(&fourier_indicator(x)?, x, y)
}

/// Which `Ŝ₀` feeds the spectral isotropic-pair count.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum S0Source {
    /// The closed form; needs `n ≡ 2 (mod 4)` and `p ≡ 3 (mod 4)`.
    ClosedForm,
    /// Enumeration of the zero sphere; any `n`, `p`.
    Direct,
}

/// `p^(2n) Σ_m |X̂(m)|² Ŝ₀(m)`, which equals `#{(x, y) ∈ X² : ‖x − y‖ = 0}`.
pub fn degenerate_pairs_fourier(x: &PointSet, source: S0Source) -> Result<f64> {
    let field = x.field();
    let n = x.dim();
    let s0 = match source {
        S0Source::ClosedForm => s0_hat_formula_table(field, n)?,
        S0Source::Direct => s0_hat_direct_table(field, n)?,
    };
    let table = fourier_indicator(x)?;
    let sum = table
        .values()
        .iter()
        .zip(s0.values())
        .map(|(xh, s)| s * xh.norm_sqr())
        .collect::<CompensatedSum>()
        .value();
    Ok(sum.re * f64::from(field.p()).powi(2 * n as i32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::degenerate_pairs;
    use crate::varieties::{enum_space, random_space_subset};

    fn f(p: u64) -> FieldSpec {
        FieldSpec::new(p).unwrap()
    }

    fn origin(field: &FieldSpec, n: usize) -> PointSet {
        PointSet::from_points(field, n, [vec![0u32; n]]).unwrap()
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn transform_of_origin() {
        let k = f(3);
        let t = fourier_indicator(&origin(&k, 2)).unwrap();
        assert_eq!(t.len(), 9);
        assert!(t
            .values()
            .iter()
            .all(|v| close(*v, Complex64::new(1.0 / 9.0, 0.0), 1e-15)));
        assert!((t.energy() - 1.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn plancherel_and_inversion() {
        for (p, n, size, seed) in [
            (7u64, 2usize, 10usize, 1u64),
            (5, 3, 40, 2),
            (23, 2, 100, 3),
            (3, 3, 13, 4),
        ] {
            let k = f(p);
            let x = random_space_subset(&k, n, size, seed).unwrap();
            let t = fourier_indicator(&x).unwrap();
            assert!(plancherel_error(&t, x.len()) < 1e-9);
            for pt in enum_space(&k, n, DEFAULT_CAP).unwrap().iter() {
                let v = t.invert_at(pt);
                let expect = if x.contains(pt) { 1.0 } else { 0.0 };
                assert!(
                    close(v, Complex64::new(expect, 0.0), 1e-9),
                    "p={p} pt={pt:?}"
                );
            }
        }
    }

    #[test]
    fn s0_formula_examples() {
        let k = f(3);
        let zero = s0_hat_formula(&[0, 0], 2, &k).unwrap();
        assert!(close(zero, Complex64::new(1.0 / 9.0, 0.0), 1e-15));
        assert!(close(s0_hat_direct(&[0, 0], 2, &k).unwrap(), zero, 1e-15));
        let off = s0_hat_formula(&[1, 0], 2, &k).unwrap();
        assert!(close(off, Complex64::new(1.0 / 9.0, 0.0), 1e-15));
        assert!(s0_max_discrepancy(&f(7), 2).unwrap() < 1e-12);
        assert!(matches!(
            s0_hat_formula(&[0, 0], 2, &f(13)),
            Err(Error::Hypothesis(_))
        ));
        assert!(matches!(
            s0_hat_formula(&[0, 0, 0, 0], 4, &f(7)),
            Err(Error::Hypothesis(_))
        ));
    }

    #[test]
    fn punctured_rows() {
        for p in [3u64, 7, 11, 13, 29, 31] {
            let k = f(p);
            for t in 0..p as i64 {
                let t = k.scalar(t);
                let s: Complex64 = (1..p as i64).map(|r| k.chi(k.mul(k.scalar(r), t))).sum();
                assert!((s.re.round() as i64) == punctured_row_sum(&k, t) && s.im.abs() < 1e-9);
            }
        }
    }

    #[test]
    fn surface_transform_examples() {
        let k = f(7);
        let s = enum_sphere(&k, 2, k.scalar(1), DEFAULT_CAP).unwrap();
        let one = SurfaceFunction::constant(s.clone(), Complex64::new(1.0, 0.0));
        let g = inverse_surface_transform(&one).unwrap();
        assert!(close(g.get(&[0, 0]), Complex64::new(1.0, 0.0), 1e-12));
        let mass = SurfaceFunction::point_mass(s.clone(), 3).unwrap();
        let g = inverse_surface_transform(&mass).unwrap();
        assert!(g
            .values()
            .iter()
            .all(|v| (v.norm() - 1.0 / s.len() as f64).abs() < 1e-12));
        let k = f(3);
        let s0 = enum_sphere(&k, 2, k.scalar(0), DEFAULT_CAP).unwrap();
        let g = inverse_surface_transform(&SurfaceFunction::constant(s0, Complex64::new(1.0, 0.0)))
            .unwrap();
        assert!(g
            .values()
            .iter()
            .all(|v| close(*v, Complex64::new(1.0, 0.0), 1e-12)));
    }

    #[test]
    fn extension_ratio_point_mass() {
        let k = f(3);
        let s = enum_sphere(&k, 2, k.scalar(1), DEFAULT_CAP).unwrap();
        let r = extension_ratio(&SurfaceFunction::point_mass(s, 0).unwrap(), 4.0).unwrap();
        assert!((r - (0.75f64).sqrt()).abs() < 1e-12);
        let zero = SurfaceFunction::constant(
            enum_sphere(&k, 2, k.scalar(1), DEFAULT_CAP).unwrap(),
            Complex64::new(0.0, 0.0),
        );
        assert!(matches!(extension_ratio(&zero, 4.0), Err(Error::Domain(_))));
    }

    #[test]
    fn extension_ratio_scale_invariant() {
        let k = f(11);
        let s = enum_sphere(&k, 2, k.scalar(2), DEFAULT_CAP).unwrap();
        for seed in 0..10 {
            let g = SurfaceFunction::random(s.clone(), seed).unwrap();
            let a = extension_ratio(&g, 4.0).unwrap();
            let b = extension_ratio(&g.scaled(Complex64::new(-2.5, 0.75)), 4.0).unwrap();
            assert!((a - b).abs() < 1e-9 * a);
        }
    }

    #[test]
    fn apex_estimate_singleton() {
        let k = f(7);
        let x = origin(&k, 2);
        let est = apex_spectrum_sides(&x, &[0, 0]).unwrap();
        assert_eq!(est.lhs, 0);
    }

    #[test]
    fn apex_estimate_whole_plane() {
        // For X = F_p², every nonzero circle around y contributes |S_r|².
        let k = f(7);
        let plane = enum_space(&k, 2, DEFAULT_CAP).unwrap();
        let est = apex_spectrum_sides(&plane, &[3, 4]).unwrap();
        let expect: u128 = (1..7)
            .map(|r| enum_sphere(&k, 2, k.scalar(r), DEFAULT_CAP).unwrap().len() as u128)
            .map(|s| s * s)
            .sum();
        assert_eq!(est.lhs, expect);
    }

    #[test]
    fn spectral_isotropic_pairs() {
        let k = f(3);
        let x = origin(&k, 2);
        let v = degenerate_pairs_fourier(&x, S0Source::ClosedForm).unwrap();
        assert!((v - 1.0).abs() < 1e-9);
        let k = f(7);
        for seed in 0..5 {
            let x = random_space_subset(&k, 2, 20, seed).unwrap();
            let spectral = degenerate_pairs_fourier(&x, S0Source::ClosedForm).unwrap();
            assert!((spectral - degenerate_pairs(&x) as f64).abs() < 1e-9);
        }
        // The enumerated variant works outside the closed form's hypotheses.
        let k = f(13);
        let x = random_space_subset(&k, 2, 30, 9).unwrap();
        let spectral = degenerate_pairs_fourier(&x, S0Source::Direct).unwrap();
        assert!((spectral - degenerate_pairs(&x) as f64).abs() < 1e-6);
        assert!(degenerate_pairs_fourier(&x, S0Source::ClosedForm).is_err());
    }

    #[test]
    fn compensated_sum_beats_naive() {
        let mut acc = CompensatedSum::new();
        acc += Complex64::new(1.0, 0.0);
        for _ in 0..1000 {
            acc += Complex64::new(1e-16, 0.0);
        }
        assert!((acc.value().re - (1.0 + 1e-13)).abs() < 1e-18);
    }
}
