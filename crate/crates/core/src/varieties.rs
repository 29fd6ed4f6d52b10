//! Point sets in `F_p^d`, paraboloid and sphere enumeration, and the plain-text
//! point-set format.
//!
//! A [`PointSet`] keeps its points in lexicographic order and indexes them by
//! their base-`p` code, so membership is a hash lookup and iteration order is
//! reproducible.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::path::Path;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{FieldSpec, FieldVector, Scalar};

/// Default ceiling on the number of points any enumeration may produce.
pub const DEFAULT_CAP: u64 = 100_000_000;

fn checked_pow(base: u64, exp: usize) -> Option<u64> {
    let mut acc = 1u64;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

fn guard(field: &FieldSpec, exp: usize, cap: u64) -> Result<u64> {
    let count = checked_pow(u64::from(field.p()), exp).ok_or(Error::CapExceeded {
        requested: u128::MAX,
        cap,
    })?;
    if count > cap {
        return Err(Error::CapExceeded {
            requested: u128::from(count),
            cap,
        });
    }
    Ok(count)
}

/// Writes the base-`p` digits of `code` into `out`, most significant first.
pub(crate) fn decode_into(p: u32, mut code: u64, out: &mut [u32]) {
    for slot in out.iter_mut().rev() {
        *slot = (code % u64::from(p)) as u32;
        code /= u64::from(p);
    }
}

/// An immutable finite subset of `F_p^dim`.
#[derive(Clone, Debug)]
pub struct PointSet {
    field: FieldSpec,
    dim: usize,
    coords: Vec<u32>,
    index: HashMap<u64, usize>,
}

impl PartialEq for PointSet {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.dim == other.dim && self.coords == other.coords
    }
}

impl Eq for PointSet {}

impl PointSet {
    /// Builds a set from arbitrary points; duplicates are merged and the result
    /// is sorted lexicographically.
    pub fn from_points<I, P>(field: &FieldSpec, dim: usize, points: I) -> Result<Self>
    where
        I: IntoIterator<Item = P>,
        P: AsRef<[u32]>,
    {
        if dim == 0 {
            return Err(Error::Usage("point sets need dimension at least 1".into()));
        }
        if checked_pow(u64::from(field.p()), dim).is_none() {
            return Err(Error::Usage(format!(
                "p^d = {}^{dim} does not fit the 64-bit point index",
                field.p()
            )));
        }
        let mut codes = Vec::new();
        for pt in points {
            let pt = pt.as_ref();
            if pt.len() != dim {
                return Err(Error::Usage(format!(
                    "point of length {} in a set of dimension {dim}",
                    pt.len()
                )));
            }
            if let Some(&c) = pt.iter().find(|&&c| c >= field.p()) {
                return Err(Error::Usage(format!(
                    "coordinate {c} is not reduced mod {}",
                    field.p()
                )));
            }
            codes.push(Self::encode_with(field.p(), pt));
        }
        codes.sort_unstable();
        codes.dedup();
        Ok(Self::from_sorted_codes(field, dim, codes))
    }

    fn from_sorted_codes(field: &FieldSpec, dim: usize, codes: Vec<u64>) -> Self {
        let mut coords = vec![0u32; codes.len() * dim];
        let mut index = HashMap::with_capacity(codes.len());
        for (i, &code) in codes.iter().enumerate() {
            decode_into(field.p(), code, &mut coords[i * dim..(i + 1) * dim]);
            index.insert(code, i);
        }
        PointSet {
            field: field.clone(),
            dim,
            coords,
            index,
        }
    }

    pub fn empty(field: &FieldSpec, dim: usize) -> Result<Self> {
        Self::from_points(field, dim, std::iter::empty::<Vec<u32>>())
    }

    fn encode_with(p: u32, pt: &[u32]) -> u64 {
        pt.iter()
            .fold(0u64, |acc, &c| acc * u64::from(p) + u64::from(c))
    }

    /// Base-`p` code of a point; lexicographic order on points is numeric
    /// order on codes.
    pub fn encode(&self, pt: &[u32]) -> u64 {
        Self::encode_with(self.field.p(), pt)
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[u32] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[u32]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    /// Flat coordinate buffer, `len() * dim()` entries.
    pub fn raw_coords(&self) -> &[u32] {
        &self.coords
    }

    pub fn to_vectors(&self) -> Vec<FieldVector> {
        self.iter()
            .map(|pt| {
                self.field
                    .vector_from_residues(pt.to_vec())
                    .expect("stored points are reduced")
            })
            .collect()
    }

    pub fn contains(&self, pt: &[u32]) -> bool {
        self.position(pt).is_some()
    }

    pub fn position(&self, pt: &[u32]) -> Option<usize> {
        if pt.len() != self.dim || pt.iter().any(|&c| c >= self.field.p()) {
            return None;
        }
        self.index.get(&self.encode(pt)).copied()
    }

    pub fn union(&self, other: &PointSet) -> Result<PointSet> {
        self.check_compatible(other)?;
        PointSet::from_points(&self.field, self.dim, self.iter().chain(other.iter()))
    }

    pub fn filter(&self, mut keep: impl FnMut(&[u32]) -> bool) -> PointSet {
        let codes: Vec<u64> = self
            .iter()
            .filter(|pt| keep(pt))
            .map(|pt| self.encode(pt))
            .collect();
        Self::from_sorted_codes(&self.field, self.dim, codes)
    }

    pub fn check_compatible(&self, other: &PointSet) -> Result<()> {
        if self.field != other.field {
            return Err(Error::Usage(format!(
                "point sets over F_{} and F_{}",
                self.field.p(),
                other.field.p()
            )));
        }
        if self.dim != other.dim {
            return Err(Error::Usage(format!(
                "point sets of dimension {} and {}",
                self.dim, other.dim
            )));
        }
        Ok(())
    }

    /// True when every point satisfies `x_d = x_1² + ... + x_{d-1}²`.
    pub fn on_paraboloid(&self) -> bool {
        self.dim >= 2 && self.iter().all(|pt| on_paraboloid(&self.field, pt))
    }

    /// Renders the text format: `p d count`, then one point per line.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.coords.len() * 4 + 32);
        let _ = writeln!(out, "{} {} {}", self.field.p(), self.dim, self.len());
        for pt in self.iter() {
            let mut first = true;
            for c in pt {
                if !first {
                    out.push(' ');
                }
                first = false;
                let _ = write!(out, "{c}");
            }
            out.push('\n');
        }
        out
    }

    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(self.to_text().as_bytes())?;
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<PointSet> {
        let file = std::fs::File::open(path)?;
        Self::read_text(std::io::BufReader::new(file))
    }

    pub fn parse_text(text: &str) -> Result<PointSet> {
        Self::read_text(text.as_bytes())
    }

    /// Parses the text format. Points must be reduced, distinct and match the
    /// header's dimension and count.
    pub fn read_text<R: BufRead>(r: R) -> Result<PointSet> {
        let mut lines = r.lines().enumerate();
        let (_, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "missing header".into(),
        })?;
        let header = header?;
        let nums: Vec<u64> = header
            .split_whitespace()
            .map(|t| t.parse::<u64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse {
                line: 1,
                msg: format!("bad header: {e}"),
            })?;
        let [p, d, count] = nums[..] else {
            return Err(Error::Parse {
                line: 1,
                msg: "header must be `p d count`".into(),
            });
        };
        let field = FieldSpec::new(p).map_err(|e| Error::Parse {
            line: 1,
            msg: e.to_string(),
        })?;
        let dim = d as usize;
        let mut pts: Vec<Vec<u32>> = Vec::with_capacity(count as usize);
        for (i, line) in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let pt: Vec<u32> = line
                .split_whitespace()
                .map(|t| t.parse::<u32>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse {
                    line: i + 1,
                    msg: e.to_string(),
                })?;
            if pt.len() != dim {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("expected {dim} coordinates, found {}", pt.len()),
                });
            }
            if pt.iter().any(|&c| c >= field.p()) {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("coordinate not reduced mod {p}"),
                });
            }
            pts.push(pt);
        }
        if pts.len() as u64 != count {
            return Err(Error::Parse {
                line: 1,
                msg: format!("header announces {count} points, found {}", pts.len()),
            });
        }
        let set = PointSet::from_points(&field, dim, &pts).map_err(|e| Error::Parse {
            line: 1,
            msg: e.to_string(),
        })?;
        if set.len() != pts.len() {
            return Err(Error::Parse {
                line: 1,
                msg: "duplicate points".into(),
            });
        }
        Ok(set)
    }
}

pub fn on_paraboloid(field: &FieldSpec, pt: &[u32]) -> bool {
    let (base, last) = pt.split_at(pt.len() - 1);
    field.norm_raw(base) == last[0]
}

/// Which variety a point set was enumerated from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarietyKind {
    Paraboloid(usize),
    Sphere(usize, Scalar),
}

impl VarietyKind {
    pub fn ambient_dim(&self) -> usize {
        match *self {
            VarietyKind::Paraboloid(d) => d,
            VarietyKind::Sphere(n, _) => n,
        }
    }

    pub fn contains(&self, field: &FieldSpec, pt: &[u32]) -> bool {
        match *self {
            VarietyKind::Paraboloid(d) => pt.len() == d && on_paraboloid(field, pt),
            VarietyKind::Sphere(n, r) => pt.len() == n && field.norm_raw(pt) == r.value(),
        }
    }

    pub fn enumerate(&self, field: &FieldSpec, cap: u64) -> Result<PointSet> {
        match *self {
            VarietyKind::Paraboloid(d) => enum_paraboloid(field, d, cap),
            VarietyKind::Sphere(n, r) => enum_sphere(field, n, r, cap),
        }
    }
}

/// `P_d = {(x̄, ‖x̄‖)}`, all `p^(d-1)` points.
pub fn enum_paraboloid(field: &FieldSpec, d: usize, cap: u64) -> Result<PointSet> {
    if d < 2 {
        return Err(Error::Usage(format!("paraboloid needs d >= 2, got {d}")));
    }
    let count = guard(field, d - 1, cap)?;
    let mut pt = vec![0u32; d];
    let mut codes = Vec::with_capacity(count as usize);
    let scale = u64::from(field.p());
    for base in 0..count {
        decode_into(field.p(), base, &mut pt[..d - 1]);
        let last = field.norm_raw(&pt[..d - 1]);
        codes.push(base * scale + u64::from(last));
    }
    // base-major codes are already ascending
    Ok(PointSet::from_sorted_codes(field, d, codes))
}

/// The sphere `x_1² + ... + x_n² = r`, solving the last coordinate by square roots.
pub fn enum_sphere(field: &FieldSpec, n: usize, r: Scalar, cap: u64) -> Result<PointSet> {
    if n == 0 {
        return Err(Error::Usage("sphere needs n >= 1".into()));
    }
    let count = guard(field, n - 1, cap)?;
    let mut pt = vec![0u32; n];
    let mut codes = Vec::new();
    let scale = u64::from(field.p());
    for head in 0..count {
        decode_into(field.p(), head, &mut pt[..n - 1]);
        let rest = field.sub_raw(r.value(), field.norm_raw(&pt[..n - 1]));
        for root in field.sqrt(field.scalar(i64::from(rest))) {
            codes.push(head * scale + u64::from(root.value()));
        }
    }
    Ok(PointSet::from_sorted_codes(field, n, codes))
}

/// All of `F_p^n`.
pub fn enum_space(field: &FieldSpec, n: usize, cap: u64) -> Result<PointSet> {
    if n == 0 {
        return Err(Error::Usage("space needs n >= 1".into()));
    }
    let count = guard(field, n, cap)?;
    Ok(PointSet::from_sorted_codes(field, n, (0..count).collect()))
}

fn sample_indices(population: u64, size: usize, seed: u64) -> Result<Vec<u64>> {
    if size as u64 > population {
        return Err(Error::Usage(format!(
            "cannot sample {size} of {population} items"
        )));
    }
    let population = usize::try_from(population)
        .map_err(|_| Error::Usage("population does not fit in usize".into()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(index::sample(&mut rng, population, size)
        .into_iter()
        .map(|i| i as u64)
        .collect())
}

/// Uniform sample without replacement, reproducible from `seed`.
pub fn random_subset(source: &PointSet, size: usize, seed: u64) -> Result<PointSet> {
    let picks = sample_indices(source.len() as u64, size, seed)?;
    let mut codes: Vec<u64> = picks
        .iter()
        .map(|&i| source.encode(source.point(i as usize)))
        .collect();
    codes.sort_unstable();
    Ok(PointSet::from_sorted_codes(
        source.field(),
        source.dim(),
        codes,
    ))
}

/// Uniform random subset of `P_d` without enumerating the paraboloid.
pub fn random_paraboloid_subset(
    field: &FieldSpec,
    d: usize,
    size: usize,
    seed: u64,
) -> Result<PointSet> {
    if d < 2 {
        return Err(Error::Usage(format!("paraboloid needs d >= 2, got {d}")));
    }
    let population = checked_pow(u64::from(field.p()), d - 1)
        .ok_or_else(|| Error::Usage("paraboloid too large to index".into()))?;
    let picks = sample_indices(population, size, seed)?;
    let mut pt = vec![0u32; d];
    let scale = u64::from(field.p());
    let mut codes: Vec<u64> = picks
        .into_iter()
        .map(|base| {
            decode_into(field.p(), base, &mut pt[..d - 1]);
            base * scale + u64::from(field.norm_raw(&pt[..d - 1]))
        })
        .collect();
    codes.sort_unstable();
    Ok(PointSet::from_sorted_codes(field, d, codes))
}

/// Uniform random subset of `F_p^n`.
pub fn random_space_subset(
    field: &FieldSpec,
    n: usize,
    size: usize,
    seed: u64,
) -> Result<PointSet> {
    let population = checked_pow(u64::from(field.p()), n)
        .ok_or_else(|| Error::Usage("space too large to index".into()))?;
    let mut codes = sample_indices(population, size, seed)?;
    codes.sort_unstable();
    Ok(PointSet::from_sorted_codes(field, n, codes))
}

/// Drops the points of a paraboloid subset whose base `x̄` is isotropic.
pub fn restrict_nonzero_base(e: &PointSet) -> Result<PointSet> {
    if !e.on_paraboloid() {
        return Err(Error::Domain(
            "restrict_nonzero_base needs a subset of a paraboloid".into(),
        ));
    }
    let field = e.field().clone();
    let d = e.dim();
    Ok(e.filter(|pt| field.norm_raw(&pt[..d - 1]) != 0))
}
