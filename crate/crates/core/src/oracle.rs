//! Definition-literal recomputation of every count and transform.
//!
//! These loops touch nothing but the field arithmetic and the point container,
//! so agreement with the fast paths is meaningful. They are single-threaded
//! and capped.

use std::collections::BTreeSet;
use std::f64::consts::TAU;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::counting::{
    count_d, count_d_star, count_m, isosceles_counts, product_set, TriangleCounts,
};
use crate::error::{Error, Result};
use crate::field::{FieldSpec, Scalar};
use crate::fourier::fourier_indicator;
use crate::varieties::{random_paraboloid_subset, random_space_subset, PointSet};

pub const QUADRUPLE_CAP: usize = 30;
pub const TRIPLE_CAP: usize = 60;
/// Frequencies times points for the transform oracle.
pub const TRANSFORM_CAP: u64 = 10_000_000;

/// Relative tolerance for float comparisons.
pub const FLOAT_TOLERANCE: f64 = 1e-6;

fn cap(e: &PointSet, limit: usize) -> Result<()> {
    if e.len() > limit {
        return Err(Error::CapExceeded {
            requested: e.len() as u128,
            cap: limit as u64,
        });
    }
    Ok(())
}

/// `#{(x, y, w, z) ∈ E⁴ : x·y = w·z}`.
pub fn oracle_m(e: &PointSet) -> Result<u128> {
    cap(e, QUADRUPLE_CAP)?;
    let k = e.field();
    let mut count = 0u128;
    for x in e.iter() {
        for y in e.iter() {
            let t = k.dot_raw(x, y);
            for w in e.iter() {
                for z in e.iter() {
                    if k.dot_raw(w, z) == t {
                        count += 1;
                    }
                }
            }
        }
    }
    Ok(count)
}

/// `#{(x, y, z) ∈ E³ : x·y = x·z}`.
pub fn oracle_d(e: &PointSet) -> Result<u128> {
    cap(e, TRIPLE_CAP)?;
    let k = e.field();
    let mut count = 0u128;
    for x in e.iter() {
        for y in e.iter() {
            for z in e.iter() {
                if k.dot_raw(x, y) == k.dot_raw(x, z) {
                    count += 1;
                }
            }
        }
    }
    Ok(count)
}

/// `#{(x, y, z) ∈ E³ : x·y = x·z, ‖ȳ − z̄‖ ≠ 0}`.
pub fn oracle_d_star(e: &PointSet) -> Result<u128> {
    cap(e, TRIPLE_CAP)?;
    let k = e.field();
    let base = e.dim() - 1;
    let mut count = 0u128;
    for x in e.iter() {
        for y in e.iter() {
            for z in e.iter() {
                if k.dot_raw(x, y) == k.dot_raw(x, z) && k.dist_raw(&y[..base], &z[..base]) != 0 {
                    count += 1;
                }
            }
        }
    }
    Ok(count)
}

pub fn oracle_triangles(x: &PointSet) -> Result<TriangleCounts> {
    cap(x, TRIPLE_CAP)?;
    let k = x.field();
    let mut t = TriangleCounts::default();
    for a in x.iter() {
        for b in x.iter() {
            let ab = k.dist_raw(a, b);
            if ab == 0 {
                t.degenerate_pairs += 1;
            }
            for c in x.iter() {
                let ac = k.dist_raw(a, c);
                let bc = k.dist_raw(b, c);
                if ab == 0 && ac == 0 && bc == 0 {
                    t.null_triangles += 1;
                }
                if ab != ac {
                    continue;
                }
                t.total += 1;
                if ab != 0 {
                    t.t_nde_raw += 1;
                }
                if bc != 0 {
                    t.t_star += 1;
                }
                if ab != 0 && bc != 0 {
                    t.t_nde += 1;
                }
                if ab == 0 || bc == 0 {
                    t.t_de += 1;
                }
            }
        }
    }
    Ok(t)
}

/// `{x · y : x ∈ E, y ∈ F}`.
pub fn oracle_product(e: &PointSet, f: &PointSet) -> Result<BTreeSet<Scalar>> {
    cap(e, TRIPLE_CAP)?;
    cap(f, TRIPLE_CAP)?;
    e.check_compatible(f)?;
    let k = e.field();
    let mut out = BTreeSet::new();
    for x in e.iter() {
        for y in f.iter() {
            let (u, v) = (
                k.vector_from_residues(x.to_vec())?,
                k.vector_from_residues(y.to_vec())?,
            );
            out.insert(k.dot(&u, &v)?);
        }
    }
    Ok(out)
}

/// `X̂(m) = p^(−n) Σ_x e^(−2πi m·x/p)` for every `m`, in lexicographic order of `m`.
pub fn oracle_fourier(x: &PointSet) -> Result<Vec<Complex64>> {
    cap(x, TRIPLE_CAP)?;
    let k = x.field();
    let p = k.p();
    let n = x.dim();
    let freqs = u64::from(p).pow(n as u32);
    if freqs * x.len() as u64 > TRANSFORM_CAP {
        return Err(Error::CapExceeded {
            requested: u128::from(freqs) * x.len() as u128,
            cap: TRANSFORM_CAP,
        });
    }
    let scale = f64::from(p).powi(-(n as i32));
    let mut m = vec![0u32; n];
    let mut out = Vec::with_capacity(freqs as usize);
    for code in 0..freqs {
        let mut c = code;
        for slot in m.iter_mut().rev() {
            *slot = (c % u64::from(p)) as u32;
            c /= u64::from(p);
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for pt in x.iter() {
            let t = k.dot_raw(&m, pt);
            acc += Complex64::from_polar(1.0, -TAU * f64::from(t) / f64::from(p));
        }
        out.push(acc * scale);
    }
    Ok(out)
}

/// One fast-versus-oracle comparison.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleReport {
    pub name: String,
    pub instance: String,
    pub fast: String,
    pub oracle: String,
    pub matched: bool,
    pub fast_ms: f64,
    pub oracle_ms: f64,
}

fn timed<T>(f: impl FnOnce() -> Result<T>) -> Result<(T, f64)> {
    let start = Instant::now();
    let v = f()?;
    Ok((v, start.elapsed().as_secs_f64() * 1e3))
}

fn compare<T: PartialEq + std::fmt::Debug>(
    name: &str,
    instance: &str,
    fast: impl FnOnce() -> Result<T>,
    oracle: impl FnOnce() -> Result<T>,
) -> Result<OracleReport> {
    let (a, fast_ms) = timed(fast)?;
    let (b, oracle_ms) = timed(oracle)?;
    Ok(OracleReport {
        name: name.into(),
        instance: instance.into(),
        fast: format!("{a:?}"),
        oracle: format!("{b:?}"),
        matched: a == b,
        fast_ms,
        oracle_ms,
    })
}

/// Largest entrywise difference, relative to `max(1, |oracle|)`.
pub fn max_relative_gap(fast: &[Complex64], oracle: &[Complex64]) -> f64 {
    fast.iter()
        .zip(oracle)
        .map(|(a, b)| (a - b).norm() / b.norm().max(1.0))
        .fold(0.0, f64::max)
}

fn fourier_report(x: &PointSet, instance: &str) -> Result<OracleReport> {
    let (fast, fast_ms) = timed(|| fourier_indicator(x))?;
    let (oracle, oracle_ms) = timed(|| oracle_fourier(x))?;
    let gap = if fast.len() == oracle.len() {
        max_relative_gap(fast.values(), &oracle)
    } else {
        f64::INFINITY
    };
    Ok(OracleReport {
        name: "fourier_indicator".into(),
        instance: instance.into(),
        fast: format!("{} cells", fast.len()),
        oracle: format!("max relative gap {gap:.3e}"),
        matched: gap <= FLOAT_TOLERANCE,
        fast_ms,
        oracle_ms,
    })
}

/// Every fast path against its oracle on one point set.
pub fn compare_all(e: &PointSet, instance: &str) -> Result<Vec<OracleReport>> {
    let mut out = Vec::new();
    if e.len() <= QUADRUPLE_CAP {
        out.push(compare(
            "count_m",
            instance,
            || Ok(count_m(e)),
            || oracle_m(e),
        )?);
    }
    out.push(compare(
        "count_d",
        instance,
        || Ok(count_d(e)),
        || oracle_d(e),
    )?);
    if e.on_paraboloid() {
        out.push(compare(
            "count_d_star",
            instance,
            || count_d_star(e),
            || oracle_d_star(e),
        )?);
    }
    out.push(compare(
        "isosceles_counts",
        instance,
        || Ok(isosceles_counts(e)),
        || oracle_triangles(e),
    )?);
    out.push(compare(
        "product_set",
        instance,
        || product_set(e, e),
        || oracle_product(e, e),
    )?);
    Ok(out)
}

/// The cross-validation battery: `instances` random sets per family, all
/// reproducible from `seed`.
///
/// Families are subsets of `P_3` and of the plane over `F_7`, `F_11`, `F_13`
/// for the counts (M on at most 25 points, the rest on at most 50), and
/// subsets of `F_5²` with at most 15 points for the transform.
pub fn oracle_battery(instances: usize, seed: u64) -> Result<Vec<OracleReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let primes = [7u64, 11, 13];
    let mut out = Vec::new();
    for i in 0..instances {
        let p = primes[rng.gen_range(0..primes.len())];
        let k = FieldSpec::new(p)?;
        let s = rng.gen();
        let (small, large) = (rng.gen_range(1..=25), rng.gen_range(1..=50));
        let sets = [
            ("P_3", random_paraboloid_subset(&k, 3, small, s)?),
            ("P_3", random_paraboloid_subset(&k, 3, large, s ^ 1)?),
            ("plane", random_space_subset(&k, 2, small, s ^ 2)?),
            ("plane", random_space_subset(&k, 2, large, s ^ 3)?),
        ];
        for (family, e) in &sets {
            let tag = format!("#{i} {family} p={p} |E|={}", e.len());
            out.extend(compare_all(e, &tag)?);
        }
        let k5 = FieldSpec::new(5)?;
        let x = random_space_subset(&k5, 2, rng.gen_range(1..=15), rng.gen())?;
        out.extend([fourier_report(
            &x,
            &format!("#{i} plane p=5 |X|={}", x.len()),
        )?]);
    }
    Ok(out)
}
