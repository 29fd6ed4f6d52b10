//! Exact counting kernels: dot-product sets, the energies `D(E)`, `D*(E)` and
//! `M(E)`, the apex map from a paraboloid to isosceles-triangle apexes one
//! dimension down, and isosceles-triangle counts.
//!
//! Every count is over ordered tuples and is returned as a `u128`. The
//! per-apex loops run on rayon with an exact integer reduction, so thread
//! count never changes a result.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{FieldSpec, Scalar};
use crate::varieties::{restrict_nonzero_base, PointSet};

/// `r(t) = #{(x, y) : x · y = t}` over a product of two point sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DotHistogram {
    counts: Vec<u64>,
}

impl DotHistogram {
    pub fn get(&self, t: Scalar) -> u64 {
        self.counts[t.value() as usize]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u128 {
        self.counts.iter().map(|&c| u128::from(c)).sum()
    }

    /// The values `t` with `r(t) > 0`.
    pub fn support(&self) -> BTreeSet<Scalar> {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(t, _)| Scalar::from_residue(t as u32))
            .collect()
    }

    pub fn sum_of_squares(&self) -> u128 {
        self.counts
            .iter()
            .map(|&c| u128::from(c) * u128::from(c))
            .sum()
    }
}

/// Isosceles-triangle statistics of a point set `X`, all over ordered triples
/// `(x, y, z)` with apex `x`.
///
/// The partition is `t_nde + t_de = total` where
/// `t_de = #{‖x−y‖ = ‖x−z‖ and (‖x−y‖ = 0 or ‖y−z‖ = 0)}`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TriangleCounts {
    /// Equal nonzero legs and a non-isotropic base.
    pub t_nde: u128,
    /// Equal legs with a zero-length leg or base.
    pub t_de: u128,
    /// `‖x−y‖ = ‖x−z‖` and `‖y−z‖ ≠ 0`.
    pub t_star: u128,
    /// Ordered pairs with `‖x−y‖ = 0`, the diagonal included.
    pub degenerate_pairs: u128,
    /// All isosceles triples `‖x−y‖ = ‖x−z‖`.
    pub total: u128,
    /// `‖x−y‖ = ‖x−z‖ ≠ 0` with no condition on the base.
    pub t_nde_raw: u128,
    /// Triples whose three sides all have norm zero.
    pub null_triangles: u128,
}

fn check_pair(e: &PointSet, f: &PointSet) -> Result<()> {
    e.check_compatible(f)
}

/// Histogram of `x · y` over `E × F`.
pub fn dot_histogram(e: &PointSet, f: &PointSet) -> Result<DotHistogram> {
    check_pair(e, f)?;
    let field = e.field();
    let p = field.p() as usize;
    let counts = e
        .raw_coords()
        .par_chunks_exact(e.dim())
        .fold(
            || vec![0u64; p],
            |mut acc, x| {
                for y in f.iter() {
                    acc[field.dot_raw(x, y) as usize] += 1;
                }
                acc
            },
        )
        .reduce(
            || vec![0u64; p],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(a, b)| *a += b);
                a
            },
        );
    Ok(DotHistogram { counts })
}

/// `π_x^t(E)` sizes for a single apex `x`.
pub fn apex_dot_histogram(e: &PointSet, x: &[u32]) -> Vec<u64> {
    let field = e.field();
    let mut h = vec![0u64; field.p() as usize];
    for y in e.iter() {
        h[field.dot_raw(x, y) as usize] += 1;
    }
    h
}

/// `∏(E, F) = {x · y : x ∈ E, y ∈ F}`.
pub fn product_set(e: &PointSet, f: &PointSet) -> Result<BTreeSet<Scalar>> {
    Ok(dot_histogram(e, f)?.support())
}

/// `M(E) = #{(x, y, w, z) ∈ E⁴ : x · y = w · z}`.
pub fn count_m(e: &PointSet) -> u128 {
    dot_histogram(e, e)
        .expect("a set is compatible with itself")
        .sum_of_squares()
}

/// Sums `per_apex(x, scratch)` over every `x ∈ E` in parallel.
fn sum_over_apexes<F>(e: &PointSet, scratch_len: usize, per_apex: F) -> u128
where
    F: Fn(&[u32], &mut Vec<u64>) -> u128 + Sync,
{
    e.raw_coords()
        .par_chunks_exact(e.dim())
        .map_init(
            || vec![0u64; scratch_len],
            |scratch, x| per_apex(x, scratch),
        )
        .sum()
}

/// `D(E) = #{(x, y, z) ∈ E³ : x · y = x · z}`.
pub fn count_d(e: &PointSet) -> u128 {
    let field = e.field();
    sum_over_apexes(e, field.p() as usize, |x, h| {
        h.iter_mut().for_each(|c| *c = 0);
        for y in e.iter() {
            h[field.dot_raw(x, y) as usize] += 1;
        }
        h.iter().map(|&c| u128::from(c) * u128::from(c)).sum()
    })
}

/// Ordered pairs `(i, j)`, `i ≠ j`, whose projections have `‖·‖ = 0` on the
/// first `width` coordinates.
fn null_pairs(set: &PointSet, width: usize) -> Vec<(usize, usize)> {
    let field = set.field();
    (0..set.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let a = &set.point(i)[..width];
            (0..set.len())
                .filter(move |&j| j != i && field.dist_raw(a, &set.point(j)[..width]) == 0)
                .map(move |j| (i, j))
        })
        .collect()
}

/// `D*(E)`: the triples of `D(E)` with `‖ȳ − z̄‖ ≠ 0`. `E` must lie on a paraboloid.
pub fn count_d_star(e: &PointSet) -> Result<u128> {
    if !e.on_paraboloid() {
        return Err(Error::Domain(
            "D*(E) is defined for subsets of a paraboloid".into(),
        ));
    }
    let field = e.field();
    let n = e.len() as u128;
    let base = e.dim() - 1;
    // y = z contributes |E|² triples; the remaining null-base pairs are
    // checked against every apex.
    let excluded: u128 = null_pairs(e, base)
        .par_iter()
        .map(|&(i, j)| {
            let (y, z) = (e.point(i), e.point(j));
            e.iter()
                .filter(|x| field.dot_raw(x, y) == field.dot_raw(x, z))
                .count() as u128
        })
        .sum();
    Ok(count_d(e) - n * n - excluded)
}

/// `x̄`: drops the last coordinate.
pub fn bar(x: &[u32]) -> &[u32] {
    &x[..x.len() - 1]
}

pub fn bar_set(e: &PointSet) -> Result<PointSet> {
    if e.dim() < 2 {
        return Err(Error::Usage("bar projection needs dimension >= 2".into()));
    }
    PointSet::from_points(e.field(), e.dim() - 1, e.iter().map(bar))
}

/// The apex `−x̄ / (2‖x̄‖)` of a paraboloid point, in `F_p^(d-1)`.
pub fn apex(field: &FieldSpec, x: &[u32]) -> Result<Vec<u32>> {
    if x.len() < 2 {
        return Err(Error::Usage("apex needs a point of dimension >= 2".into()));
    }
    let base = bar(x);
    let norm = field.norm_raw(base);
    if norm == 0 {
        return Err(Error::Domain("apex of a point with isotropic base".into()));
    }
    let scale = field.neg_raw(field.inv_raw(field.add_raw(norm, norm))?);
    Ok(base.iter().map(|&c| field.mul_raw(c, scale)).collect())
}

/// Image of `E` under the apex map, deduplicated.
pub fn apex_set(e: &PointSet) -> Result<PointSet> {
    if e.dim() < 2 {
        return Err(Error::Usage("apex_set needs dimension >= 2".into()));
    }
    let apexes = e
        .iter()
        .map(|x| apex(e.field(), x))
        .collect::<Result<Vec<_>>>()?;
    PointSet::from_points(e.field(), e.dim() - 1, apexes)
}

/// Evaluates both sides of the reduction: `x · y = x · z` against
/// `‖a − ȳ‖ = ‖a − z̄‖` for the apex `a` of `x`.
pub fn reduction_equiv(field: &FieldSpec, x: &[u32], y: &[u32], z: &[u32]) -> Result<(bool, bool)> {
    if x.len() != y.len() || x.len() != z.len() {
        return Err(Error::Usage(
            "reduction_equiv on points of different lengths".into(),
        ));
    }
    let a = apex(field, x)?;
    let lhs = field.dot_raw(x, y) == field.dot_raw(x, z);
    let rhs = field.dist_raw(&a, bar(y)) == field.dist_raw(&a, bar(z));
    Ok((lhs, rhs))
}

/// All isosceles statistics of `X` in `O(|X|²)` plus a pass over the
/// off-diagonal isotropic pairs.
pub fn isosceles_counts(x: &PointSet) -> TriangleCounts {
    let field = x.field();
    let n = x.len() as u128;
    let p = field.p() as usize;

    let (total, zero_leg_sq, degenerate) = x
        .raw_coords()
        .par_chunks_exact(x.dim())
        .map_init(
            || vec![0u64; p],
            |h, apex| {
                h.iter_mut().for_each(|c| *c = 0);
                for y in x.iter() {
                    h[field.dist_raw(apex, y) as usize] += 1;
                }
                let total: u128 = h.iter().map(|&c| u128::from(c) * u128::from(c)).sum();
                let z = u128::from(h[0]);
                (total, z * z, z)
            },
        )
        .reduce(|| (0, 0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));

    // Triples with an isotropic base: y = z gives n² (resp. `degenerate`
    // all-null triples); the rest come from off-diagonal null pairs.
    let (iso_null_base, all_null) = null_pairs(x, x.dim())
        .par_iter()
        .map(|&(i, j)| {
            let (y, z) = (x.point(i), x.point(j));
            let mut iso = 0u128;
            let mut null = 0u128;
            for a in x.iter() {
                let (dy, dz) = (field.dist_raw(a, y), field.dist_raw(a, z));
                if dy == dz {
                    iso += 1;
                    if dy == 0 {
                        null += 1;
                    }
                }
            }
            (iso, null)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    let null_base = n * n + iso_null_base;
    let null_triangles = degenerate + all_null;

    let t_de = zero_leg_sq + (null_base - null_triangles);
    TriangleCounts {
        t_nde: total - t_de,
        t_de,
        t_star: total - null_base,
        degenerate_pairs: degenerate,
        total,
        t_nde_raw: total - zero_leg_sq,
        null_triangles,
    }
}

/// `#{(x, y) ∈ X² : ‖x − y‖ = 0}`.
pub fn degenerate_pairs(x: &PointSet) -> u128 {
    let field = x.field();
    x.raw_coords()
        .par_chunks_exact(x.dim())
        .map(|a| x.iter().filter(|b| field.dist_raw(a, b) == 0).count() as u128)
        .sum()
}

/// The sets `E′ = Ē` and `F′ = apex(E)` in `F_p^(d-1)` after dropping
/// isotropic bases, and their union.
#[derive(Clone, Debug)]
pub struct ReducedConfiguration {
    pub restricted: PointSet,
    pub bars: PointSet,
    pub apexes: PointSet,
    pub union: PointSet,
}

pub fn reduced_configuration(e: &PointSet) -> Result<ReducedConfiguration> {
    let restricted = restrict_nonzero_base(e)?;
    let bars = bar_set(&restricted)?;
    let apexes = apex_set(&restricted)?;
    let union = bars.union(&apexes)?;
    Ok(ReducedConfiguration {
        restricted,
        bars,
        apexes,
        union,
    })
}

/// The Cauchy–Schwarz chain `|∏(E)| · M(E) ≥ |E|⁴`, `M(E) ≤ |E| · D(E)`, and
/// for paraboloid subsets `D(E_r) ≤ isosceles triples of E′ ∪ F′`.
#[derive(Clone, Debug, Serialize)]
pub struct ChainReport {
    pub set_size: u128,
    pub prod_size: u128,
    pub m: u128,
    pub d: u128,
    pub product_bound_holds: bool,
    pub energy_bound_holds: bool,
    /// `None` when `E` is not on a paraboloid.
    pub restricted_size: Option<u128>,
    pub restricted_d: Option<u128>,
    pub union_size: Option<u128>,
    pub union_isosceles: Option<u128>,
    pub triangle_bound_holds: Option<bool>,
}

impl ChainReport {
    pub fn all_hold(&self) -> bool {
        self.product_bound_holds
            && self.energy_bound_holds
            && self.triangle_bound_holds.unwrap_or(true)
    }

    /// Converts a violated inequality into an error.
    pub fn ensure(&self) -> Result<()> {
        if self.all_hold() {
            Ok(())
        } else {
            Err(Error::Violation(format!(
                "inequality chain violated: {self:?}"
            )))
        }
    }
}

pub fn inequality_chain(e: &PointSet) -> Result<ChainReport> {
    let n = e.len() as u128;
    let prod_size = product_set(e, e)?.len() as u128;
    let m = count_m(e);
    let d = count_d(e);
    let mut report = ChainReport {
        set_size: n,
        prod_size,
        m,
        d,
        product_bound_holds: prod_size * m >= n * n * n * n,
        energy_bound_holds: m <= n * d,
        restricted_size: None,
        restricted_d: None,
        union_size: None,
        union_isosceles: None,
        triangle_bound_holds: None,
    };
    if e.dim() >= 2 && e.on_paraboloid() {
        let conf = reduced_configuration(e)?;
        let rd = count_d(&conf.restricted);
        let iso = isosceles_counts(&conf.union).total;
        report.restricted_size = Some(conf.restricted.len() as u128);
        report.restricted_d = Some(rd);
        report.union_size = Some(conf.union.len() as u128);
        report.union_isosceles = Some(iso);
        report.triangle_bound_holds = Some(rd <= iso);
    }
    Ok(report)
}

/// The fixed-key JSON record for a single point set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CountsReport {
    pub p: u32,
    pub d: usize,
    pub set_size: u128,
    pub prod_size: u128,
    #[serde(rename = "D")]
    pub d_energy: u128,
    #[serde(rename = "D_star")]
    pub d_star: Option<u128>,
    #[serde(rename = "M")]
    pub m_energy: u128,
    pub t_nde: u128,
    pub t_de: u128,
    pub t_star: u128,
    pub degenerate_pairs: u128,
}

/// Counts for `E`. Triangle statistics are taken on `E′ ∪ F′` when `E` lies on
/// a paraboloid and on `E` itself otherwise.
pub fn counts_report(e: &PointSet) -> Result<CountsReport> {
    let on_parab = e.dim() >= 2 && e.on_paraboloid();
    let tri = if on_parab {
        isosceles_counts(&reduced_configuration(e)?.union)
    } else {
        isosceles_counts(e)
    };
    Ok(CountsReport {
        p: e.field().p(),
        d: e.dim(),
        set_size: e.len() as u128,
        prod_size: product_set(e, e)?.len() as u128,
        d_energy: count_d(e),
        d_star: if on_parab {
            Some(count_d_star(e)?)
        } else {
            None
        },
        m_energy: count_m(e),
        t_nde: tri.t_nde,
        t_de: tri.t_de,
        t_star: tri.t_star,
        degenerate_pairs: tri.degenerate_pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::varieties::{
        enum_paraboloid, enum_space, random_paraboloid_subset, random_space_subset, DEFAULT_CAP,
    };

    fn f(p: u64) -> FieldSpec {
        FieldSpec::new(p).unwrap()
    }

    fn set(field: &FieldSpec, dim: usize, pts: &[&[u32]]) -> PointSet {
        PointSet::from_points(field, dim, pts.iter().copied()).unwrap()
    }

    fn values(s: &BTreeSet<Scalar>) -> Vec<u32> {
        s.iter().map(|v| v.value()).collect()
    }

    #[test]
    fn product_set_examples() {
        let k = f(7);
        let e = set(&k, 3, &[&[0, 1, 1], &[0, 2, 4]]);
        assert_eq!(values(&product_set(&e, &e).unwrap()), vec![2, 6]);
        let single = set(&k, 3, &[&[1, 2, 5]]);
        assert_eq!(
            values(&product_set(&single, &single).unwrap()),
            vec![k.norm_raw(&[1, 2, 5])]
        );
        let g = random_paraboloid_subset(&k, 3, 9, 3).unwrap();
        assert_eq!(product_set(&e, &g).unwrap(), product_set(&g, &e).unwrap());
        let plane = enum_space(&k, 2, DEFAULT_CAP).unwrap();
        assert!(matches!(product_set(&e, &plane), Err(Error::Usage(_))));
    }

    #[test]
    fn histogram_totals() {
        let k = f(11);
        let e = random_paraboloid_subset(&k, 3, 25, 1).unwrap();
        let h = dot_histogram(&e, &e).unwrap();
        assert_eq!(h.total(), 625);
        assert_eq!(h.sum_of_squares(), count_m(&e));
    }

    #[test]
    fn energy_small_cases() {
        let k = f(7);
        let one = set(&k, 3, &[&[1, 2, 5]]);
        assert_eq!(count_m(&one), 1);
        assert_eq!(count_d(&one), 1);
        for seed in 0..20 {
            let e = random_paraboloid_subset(&k, 3, 15, seed).unwrap();
            let n = e.len() as u128;
            assert!(count_m(&e) >= n * n);
            assert!(count_d(&e) >= n * n);
            assert!(count_m(&e) <= n * count_d(&e));
        }
    }

    #[test]
    fn d_star_for_three_mod_four_planes() {
        // p ≡ 3 (mod 4), d = 3: the base form is anisotropic, so only y = z drops out.
        let k = f(7);
        let e = random_paraboloid_subset(&k, 3, 20, 2).unwrap();
        assert_eq!(count_d_star(&e).unwrap(), count_d(&e) - 400);
        let plane = enum_space(&k, 2, DEFAULT_CAP).unwrap();
        assert!(count_d_star(&plane).is_err());
    }

    #[test]
    fn apex_examples() {
        let k = f(7);
        assert_eq!(apex(&k, &[1, 2, 5]).unwrap(), vec![2, 4]);
        let half = k.inv_raw(2).unwrap();
        assert_eq!(
            apex(&k, &[1, 0, 0, 1]).unwrap(),
            vec![k.neg_raw(half), 0, 0]
        );
        assert!(matches!(apex(&k, &[0, 0, 0]), Err(Error::Domain(_))));
    }

    #[test]
    fn apex_is_injective_on_nonzero_bases() {
        for p in [3u64, 5, 7, 11] {
            let k = f(p);
            let e = restrict_nonzero_base(&enum_paraboloid(&k, 3, DEFAULT_CAP).unwrap()).unwrap();
            assert_eq!(apex_set(&e).unwrap().len(), e.len(), "p={p}");
        }
    }

    #[test]
    fn reduction_examples() {
        let k = f(7);
        let x = [1u32, 2, 5];
        assert_eq!(
            reduction_equiv(&k, &x, &[3, 1, 3], &[3, 1, 3]).unwrap(),
            (true, true)
        );
        // x·(0,0,0) = 0 and x·(1,0,1) = 6
        assert_eq!(
            reduction_equiv(&k, &x, &[0, 0, 0], &[1, 0, 1]).unwrap(),
            (false, false)
        );
        assert!(reduction_equiv(&k, &[0, 0, 0], &x, &x).is_err());
    }

    #[test]
    fn reduction_exhaustive_small() {
        for p in [3u64, 5] {
            let k = f(p);
            let e = enum_paraboloid(&k, 3, DEFAULT_CAP).unwrap();
            for x in e.iter().filter(|x| k.norm_raw(bar(x)) != 0) {
                for y in e.iter() {
                    for z in e.iter() {
                        let (l, r) = reduction_equiv(&k, x, y, z).unwrap();
                        assert_eq!(l, r);
                    }
                }
            }
        }
    }

    #[test]
    fn triangles_two_points() {
        let k = f(7);
        let x = set(&k, 2, &[&[0, 0], &[1, 0]]);
        let t = isosceles_counts(&x);
        assert_eq!(t.t_nde_raw, 2);
        assert_eq!(t.degenerate_pairs, 2);
        assert_eq!(t.total, 4);
        // y = z puts both equal-leg triples in the degenerate class
        assert_eq!(t.t_nde, 0);
        assert_eq!(t.t_de, 4);
        assert_eq!(t.t_star, 0);
    }

    #[test]
    fn triangles_on_isotropic_line() {
        let k = f(13);
        let x = set(&k, 2, &[&[0, 0], &[1, 5], &[2, 10]]);
        let t = isosceles_counts(&x);
        assert_eq!(t.degenerate_pairs, 9);
        assert_eq!(t.null_triangles, 27);
        assert_eq!(t.total, 27);
        assert_eq!(t.t_de, 27);
        assert_eq!(t.t_star, 0);
    }

    #[test]
    fn partition_identities() {
        for (p, seed) in [(13u64, 1u64), (7, 2), (11, 3), (17, 4)] {
            let k = f(p);
            let x = random_space_subset(&k, 2, 30, seed).unwrap();
            let t = isosceles_counts(&x);
            assert_eq!(t.t_nde + t.t_de, t.total);
            assert!(t.t_nde <= t.t_star);
            assert!(t.t_nde <= t.t_nde_raw);
            assert_eq!(t.degenerate_pairs, degenerate_pairs(&x));
        }
    }

    #[test]
    fn chain_examples() {
        let k = f(7);
        let one = set(&k, 3, &[&[1, 2, 5]]);
        let r = inequality_chain(&one).unwrap();
        assert_eq!((r.prod_size, r.m, r.d), (1, 1, 1));
        assert!(r.all_hold());
        let full = enum_paraboloid(&k, 3, DEFAULT_CAP).unwrap();
        inequality_chain(&full).unwrap().ensure().unwrap();
        let k = f(11);
        let e = random_paraboloid_subset(&k, 3, 30, 5).unwrap();
        inequality_chain(&e).unwrap().ensure().unwrap();
    }

    #[test]
    fn counts_report_keys() {
        let k = f(7);
        let e = random_paraboloid_subset(&k, 3, 12, 8).unwrap();
        let json = serde_json::to_value(counts_report(&e).unwrap()).unwrap();
        let mut keys: Vec<&str> = json
            .as_object()
            .unwrap()
            .keys()
            .map(String::as_str)
            .collect();
        keys.sort_unstable();
        assert_eq!(
            keys,
            vec![
                "D",
                "D_star",
                "M",
                "d",
                "degenerate_pairs",
                "p",
                "prod_size",
                "set_size",
                "t_de",
                "t_nde",
                "t_star"
            ]
        );
    }
}
