//! Point sets on paraboloids with few distinct dot products.
//!
//! All of them have the shape `E = S × {(a, a²) : a ∈ A}` up to padding, where
//! `S` is a totally isotropic subspace (every pair of vectors, including a
//! vector with itself, has dot product zero) and `A` is a multiplicative
//! subgroup. Dot products then collapse to `c + c²` for `c ∈ A`.

use std::collections::BTreeSet;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::counting::product_set;
use crate::error::{Error, Result};
use crate::field::{FieldSpec, Scalar};
use crate::varieties::{decode_into, PointSet};

/// Candidate vectors below which the frame search enumerates exhaustively.
const EXHAUSTIVE_LIMIT: u64 = 1_000_000;

/// A multiplicative subgroup of `F_p^*`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgroupSpec {
    field: FieldSpec,
    order: u64,
    elements: Vec<Scalar>,
}

impl SubgroupSpec {
    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// Elements in ascending order.
    pub fn elements(&self) -> &[Scalar] {
        &self.elements
    }

    pub fn contains(&self, a: Scalar) -> bool {
        self.elements.binary_search(&a).is_ok()
    }

    /// Closure under multiplication, checked on every pair.
    pub fn verify(&self) -> Result<()> {
        if self.elements.len() as u64 != self.order || !self.contains(Scalar::from_residue(1)) {
            return Err(Error::Violation(format!(
                "subgroup of order {} is malformed",
                self.order
            )));
        }
        for &a in &self.elements {
            for &b in &self.elements {
                if !self.contains(self.field.mul(a, b)) {
                    return Err(Error::Violation(format!("{a}·{b} escapes the subgroup")));
                }
            }
        }
        Ok(())
    }

    /// `{a + a² : a ∈ A}`.
    pub fn plus_square_image(&self) -> BTreeSet<Scalar> {
        self.elements
            .iter()
            .map(|&a| self.field.add(a, self.field.mul(a, a)))
            .collect()
    }

    /// `{a − a² : a ∈ A}`.
    pub fn minus_square_image(&self) -> BTreeSet<Scalar> {
        self.elements
            .iter()
            .map(|&a| self.field.sub(a, self.field.mul(a, a)))
            .collect()
    }
}

/// `{g^(j(p−1)/k) : 0 ≤ j < k}`, the unique subgroup of order `k`.
pub fn mult_subgroup(field: &FieldSpec, k: u64) -> Result<SubgroupSpec> {
    let group = u64::from(field.p() - 1);
    if k == 0 || group % k != 0 {
        return Err(Error::Usage(format!(
            "subgroup order {k} does not divide p − 1 = {group}"
        )));
    }
    let step = field.pow(field.primitive_root(), group / k);
    let mut elements = Vec::with_capacity(k as usize);
    let mut cur = Scalar::from_residue(1);
    for _ in 0..k {
        elements.push(cur);
        cur = field.mul(cur, step);
    }
    elements.sort_unstable();
    Ok(SubgroupSpec {
        field: field.clone(),
        order: k,
        elements,
    })
}

/// Largest divisor of `p − 1` not exceeding `bound`.
pub fn largest_divisor_at_most(field: &FieldSpec, bound: u64) -> u64 {
    let group = u64::from(field.p() - 1);
    (1..=bound.min(group))
        .rev()
        .find(|k| group % k == 0)
        .unwrap_or(1)
}

/// Rank of a list of vectors over `F_p`.
pub fn rank(field: &FieldSpec, vectors: &[Vec<u32>]) -> usize {
    row_reduce(field, vectors.to_vec()).len()
}

/// Gaussian elimination; returns the nonzero rows of the reduced row echelon form.
fn row_reduce(field: &FieldSpec, mut rows: Vec<Vec<u32>>) -> Vec<Vec<u32>> {
    let width = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for col in 0..width {
        let Some(pivot) = (r..rows.len()).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(r, pivot);
        let inv = field.inv_raw(rows[r][col]).expect("pivot is nonzero");
        for c in rows[r].iter_mut() {
            *c = field.mul_raw(*c, inv);
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            let factor = row[col];
            if i != r && factor != 0 {
                for (c, &v) in row.iter_mut().zip(&pivot_row) {
                    *c = field.sub_raw(*c, field.mul_raw(factor, v));
                }
            }
        }
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    rows
}

/// A basis of `{x ∈ F_p^dim : v · x = 0 for every v in vectors}`.
pub fn orthogonal_complement(field: &FieldSpec, dim: usize, vectors: &[Vec<u32>]) -> Vec<Vec<u32>> {
    let reduced = row_reduce(field, vectors.to_vec());
    let pivots: Vec<usize> = reduced
        .iter()
        .map(|row| {
            row.iter()
                .position(|&c| c != 0)
                .expect("reduced rows are nonzero")
        })
        .collect();
    (0..dim)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![0u32; dim];
            v[free] = 1;
            for (row, &pc) in reduced.iter().zip(&pivots) {
                v[pc] = field.neg_raw(row[free]);
            }
            v
        })
        .collect()
}

fn combine(field: &FieldSpec, basis: &[Vec<u32>], coeffs: &[u32], dim: usize) -> Vec<u32> {
    let mut v = vec![0u32; dim];
    for (b, &c) in basis.iter().zip(coeffs) {
        if c == 0 {
            continue;
        }
        for (slot, &x) in v.iter_mut().zip(b) {
            *slot = field.add_raw(*slot, field.mul_raw(c, x));
        }
    }
    v
}

/// Linearly independent vectors, pairwise orthogonal and each isotropic.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IsotropicFrame {
    #[serde(skip)]
    field: Option<FieldSpec>,
    ambient_dim: usize,
    vectors: Vec<Vec<u32>>,
}

impl IsotropicFrame {
    pub fn new(field: &FieldSpec, ambient_dim: usize, vectors: Vec<Vec<u32>>) -> Result<Self> {
        let frame = IsotropicFrame {
            field: Some(field.clone()),
            ambient_dim,
            vectors,
        };
        frame.verify()?;
        Ok(frame)
    }

    fn field(&self) -> &FieldSpec {
        self.field.as_ref().expect("frames are built with a field")
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn vectors(&self) -> &[Vec<u32>] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Re-checks `v_i · v_j = 0` for all `i ≤ j` and full rank.
    pub fn verify(&self) -> Result<()> {
        let field = self.field();
        for (i, v) in self.vectors.iter().enumerate() {
            if v.len() != self.ambient_dim {
                return Err(Error::Violation(format!(
                    "frame vector {i} has the wrong length"
                )));
            }
            for w in &self.vectors[i..] {
                if field.dot_raw(v, w) != 0 {
                    return Err(Error::Violation(format!(
                        "frame vectors {v:?} and {w:?} are not orthogonal"
                    )));
                }
            }
        }
        if rank(field, &self.vectors) != self.vectors.len() {
            return Err(Error::Violation(
                "frame vectors are linearly dependent".into(),
            ));
        }
        Ok(())
    }

    /// Every vector of `F_p v_1 + ... + F_p v_k`, `p^k` of them.
    pub fn span(&self) -> Vec<Vec<u32>> {
        let field = self.field();
        let k = self.vectors.len();
        let count = u64::from(field.p()).pow(k as u32);
        let mut coeffs = vec![0u32; k];
        (0..count)
            .map(|code| {
                decode_into(field.p(), code, &mut coeffs);
                combine(field, &self.vectors, &coeffs, self.ambient_dim)
            })
            .collect()
    }

    /// Appends zero coordinates to every vector.
    pub fn padded(&self, extra: usize) -> IsotropicFrame {
        let vectors = self
            .vectors
            .iter()
            .map(|v| {
                v.iter()
                    .copied()
                    .chain(std::iter::repeat_n(0, extra))
                    .collect()
            })
            .collect();
        IsotropicFrame {
            field: self.field.clone(),
            ambient_dim: self.ambient_dim + extra,
            vectors,
        }
    }
}

/// Greedy frame search: each new vector is isotropic, lies in the orthogonal
/// complement of the frame so far and is independent of it. Candidates are
/// sampled from that complement, then enumerated when it is small.
pub fn isotropic_frame(
    field: &FieldSpec,
    ambient_dim: usize,
    count: usize,
    seed: u64,
) -> Result<IsotropicFrame> {
    if 2 * count > ambient_dim {
        return Err(Error::Usage(format!(
            "an isotropic frame in dimension {ambient_dim} has at most {} vectors",
            ambient_dim / 2
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut frame: Vec<Vec<u32>> = Vec::with_capacity(count);
    let attempts = 64 * field.p() as usize;
    while frame.len() < count {
        let basis = orthogonal_complement(field, ambient_dim, &frame);
        let accept = |v: &Vec<u32>, frame: &Vec<Vec<u32>>| {
            if field.norm_raw(v) != 0 || v.iter().all(|&c| c == 0) {
                return false;
            }
            let mut ext = frame.clone();
            ext.push(v.clone());
            rank(field, &ext) == ext.len()
        };
        let mut coeffs = vec![0u32; basis.len()];
        let mut found = None;
        for _ in 0..attempts {
            coeffs
                .iter_mut()
                .for_each(|c| *c = rng.gen_range(0..field.p()));
            let v = combine(field, &basis, &coeffs, ambient_dim);
            if accept(&v, &frame) {
                found = Some(v);
                break;
            }
        }
        if found.is_none() {
            let space = u64::from(field.p()).checked_pow(basis.len() as u32);
            if let Some(space) = space.filter(|&s| s <= EXHAUSTIVE_LIMIT) {
                found = (1..space).find_map(|code| {
                    decode_into(field.p(), code, &mut coeffs);
                    let v = combine(field, &basis, &coeffs, ambient_dim);
                    accept(&v, &frame).then_some(v)
                });
            }
        }
        match found {
            Some(v) => frame.push(v),
            None => {
                return Err(Error::NotFound(format!(
                    "isotropic vector {} of {count} in F_{}^{ambient_dim}",
                    frame.len() + 1,
                    field.p()
                )))
            }
        }
    }
    IsotropicFrame::new(field, ambient_dim, frame)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstructionKind {
    /// `d ≡ 2 (mod 4)`: `S × {(a, a²)}` with `S` spanned by `(d−2)/2` isotropic vectors.
    #[serde(rename = "even2mod4")]
    Even2Mod4,
    /// `d ≡ 0 (mod 4)`, `p ≡ 1 (mod 4)`: the frame ends in `(0, …, 0, 1, i)`.
    #[serde(rename = "even0mod4")]
    Even0Mod4,
    /// `d ≡ 3 (mod 4)`, `p ≡ 3 (mod 4)`: the even construction with a zero adjoined.
    #[serde(rename = "odd3mod4")]
    Odd3Mod4,
    /// Parallel lines of slope `i` in `F_p²`.
    #[serde(rename = "lines")]
    Lines,
}

impl ConstructionKind {
    pub fn label(self) -> &'static str {
        match self {
            ConstructionKind::Even2Mod4 => "even2mod4",
            ConstructionKind::Even0Mod4 => "even0mod4",
            ConstructionKind::Odd3Mod4 => "odd3mod4",
            ConstructionKind::Lines => "lines",
        }
    }
}

impl std::str::FromStr for ConstructionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "even2mod4" => Ok(ConstructionKind::Even2Mod4),
            "even0mod4" => Ok(ConstructionKind::Even0Mod4),
            "odd3mod4" => Ok(ConstructionKind::Odd3Mod4),
            "lines" => Ok(ConstructionKind::Lines),
            other => Err(Error::Usage(format!("unknown construction kind `{other}`"))),
        }
    }
}

/// An emitted paraboloid construction and the data it was built from.
#[derive(Clone, Debug)]
pub struct Construction {
    pub kind: ConstructionKind,
    pub d: usize,
    pub subgroup: SubgroupSpec,
    pub frame: IsotropicFrame,
    pub set: PointSet,
}

/// Postconditions of a construction, each checked exactly.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstructionReport {
    pub kind: ConstructionKind,
    pub p: u32,
    pub d: usize,
    pub k: u64,
    /// `log_p k`.
    pub realized_exponent: f64,
    pub frame: Vec<Vec<u32>>,
    pub set_size: usize,
    pub expected_size: usize,
    pub size_ok: bool,
    pub on_paraboloid: bool,
    pub products: Vec<u32>,
    pub products_in_plus_image: bool,
    pub products_in_minus_image: bool,
    pub product_bound_ok: bool,
}

impl ConstructionReport {
    pub fn passed(&self) -> bool {
        self.size_ok && self.on_paraboloid && self.product_bound_ok
    }
}

impl Construction {
    pub fn expected_size(&self) -> usize {
        let p = self.set.field().p() as usize;
        self.subgroup.order() as usize * p.pow(self.frame.len() as u32)
    }

    pub fn report(&self) -> Result<ConstructionReport> {
        let field = self.set.field();
        let products = product_set(&self.set, &self.set)?;
        let plus = self.subgroup.plus_square_image();
        let minus = self.subgroup.minus_square_image();
        let in_plus = products.is_subset(&plus);
        let in_minus = products.is_subset(&minus);
        let product_bound_ok = match self.kind {
            // the d ≡ 0 case only promises |∏(E)| ≤ |A|
            ConstructionKind::Even0Mod4 => products.len() as u64 <= self.subgroup.order(),
            _ => in_plus,
        };
        let k = self.subgroup.order();
        Ok(ConstructionReport {
            kind: self.kind,
            p: field.p(),
            d: self.d,
            k,
            realized_exponent: (k as f64).ln() / f64::from(field.p()).ln(),
            frame: self.frame.vectors().to_vec(),
            set_size: self.set.len(),
            expected_size: self.expected_size(),
            size_ok: self.set.len() == self.expected_size(),
            on_paraboloid: self.set.on_paraboloid(),
            products: products.iter().map(|s| s.value()).collect(),
            products_in_plus_image: in_plus,
            products_in_minus_image: in_minus,
            product_bound_ok,
        })
    }

    /// Fails unless every postcondition holds.
    pub fn verify(&self) -> Result<ConstructionReport> {
        self.subgroup.verify()?;
        self.frame.verify()?;
        let report = self.report()?;
        if !report.passed() {
            return Err(Error::Violation(format!(
                "construction postcondition failed: {report:?}"
            )));
        }
        Ok(report)
    }
}

/// `{(s, a, a²) : s ∈ S, a ∈ A}`.
fn assemble(field: &FieldSpec, span: &[Vec<u32>], subgroup: &SubgroupSpec) -> Result<PointSet> {
    let dim = span.first().map_or(0, Vec::len) + 2;
    let pts = span.iter().flat_map(|s| {
        subgroup.elements().iter().map(move |&a| {
            let mut pt = s.clone();
            pt.push(a.value());
            pt.push(field.mul_raw(a.value(), a.value()));
            pt
        })
    });
    PointSet::from_points(field, dim, pts)
}

/// `E = S × {(a, a²) : a ∈ A} ⊂ P_d` for `d ≡ 2 (mod 4)`.
pub fn construct_even_2mod4(
    field: &FieldSpec,
    d: usize,
    k: u64,
    seed: u64,
) -> Result<Construction> {
    if d % 4 != 2 {
        return Err(Error::Usage(format!(
            "even2mod4 needs d ≡ 2 (mod 4), got {d}"
        )));
    }
    let subgroup = mult_subgroup(field, k)?;
    let frame = isotropic_frame(field, d - 2, (d - 2) / 2, seed)?;
    let set = assemble(field, &frame.span(), &subgroup)?;
    Ok(Construction {
        kind: ConstructionKind::Even2Mod4,
        d,
        subgroup,
        frame,
        set,
    })
}

/// `d ≡ 0 (mod 4)`, `p ≡ 1 (mod 4)`: `S = F u_1 + … + F u_{d/2−1} + A u_{d/2}`
/// with `u_{d/2} = (0, …, 0, 1, i)`, mapped to `(x_1, …, x_{d−1}, −x_d²)`.
pub fn construct_even_0mod4(
    field: &FieldSpec,
    d: usize,
    k: u64,
    seed: u64,
) -> Result<Construction> {
    if !d.is_multiple_of(4) || d == 0 {
        return Err(Error::Usage(format!(
            "even0mod4 needs d ≡ 0 (mod 4), got {d}"
        )));
    }
    let i = field.sqrt_minus_one().ok_or_else(|| {
        Error::Hypothesis(format!(
            "even0mod4 needs a square root of −1, which F_{} lacks (p ≡ 3 mod 4)",
            field.p()
        ))
    })?;
    let subgroup = mult_subgroup(field, k)?;
    // The first d/2 − 1 vectors live in the first d − 2 coordinates, so they
    // are orthogonal to (0, …, 0, 1, i) and contribute nothing to x_d.
    let head = isotropic_frame(field, d - 2, (d - 2) / 2, seed)?.padded(2);
    let mut last = vec![0u32; d];
    last[d - 2] = 1;
    last[d - 1] = i.value();
    let mut vectors = head.vectors().to_vec();
    vectors.push(last.clone());
    IsotropicFrame::new(field, d, vectors)?;

    let pts = head.span().into_iter().flat_map(|s| {
        let last = last.clone();
        subgroup.elements().iter().map(move |&a| {
            let mut x: Vec<u32> = s
                .iter()
                .zip(&last)
                .map(|(&u, &w)| field.add_raw(u, field.mul_raw(a.value(), w)))
                .collect();
            let xd = x[d - 1];
            x[d - 1] = field.neg_raw(field.mul_raw(xd, xd));
            x
        })
    });
    let set = PointSet::from_points(field, d, pts)?;
    // The last frame vector carries the subgroup rather than a full line, so
    // only the head counts towards |E| = k · p^(d/2 − 1).
    Ok(Construction {
        kind: ConstructionKind::Even0Mod4,
        d,
        subgroup,
        frame: head,
        set,
    })
}

/// `d ≡ 3 (mod 4)`, `p ≡ 3 (mod 4)`: `(s′, 0, a, a²)` with `s′` in a totally
/// isotropic subspace of `F_p^(d−3)`. For `d = 3` this is `{(0, a, a²)}`.
pub fn construct_odd_3mod4(field: &FieldSpec, d: usize, k: u64, seed: u64) -> Result<Construction> {
    if d % 4 != 3 {
        return Err(Error::Usage(format!(
            "odd3mod4 needs d ≡ 3 (mod 4), got {d}"
        )));
    }
    if field.residue_class_mod_4() != 3 {
        return Err(Error::Hypothesis(format!(
            "odd3mod4 needs p ≡ 3 (mod 4), got p = {}",
            field.p()
        )));
    }
    let subgroup = mult_subgroup(field, k)?;
    let frame = isotropic_frame(field, d - 3, (d - 3) / 2, seed)?.padded(1);
    let set = assemble(field, &frame.span(), &subgroup)?;
    Ok(Construction {
        kind: ConstructionKind::Odd3Mod4,
        d,
        subgroup,
        frame,
        set,
    })
}

pub fn construct(
    kind: ConstructionKind,
    field: &FieldSpec,
    d: usize,
    k: u64,
    seed: u64,
) -> Result<Construction> {
    match kind {
        ConstructionKind::Even2Mod4 => construct_even_2mod4(field, d, k, seed),
        ConstructionKind::Even0Mod4 => construct_even_0mod4(field, d, k, seed),
        ConstructionKind::Odd3Mod4 => construct_odd_3mod4(field, d, k, seed),
        ConstructionKind::Lines => {
            Err(Error::Usage("lines sets are built by slope_i_lines".into()))
        }
    }
}

/// `L` parallel lines of direction `(1, i)` with `M` points each.
pub fn slope_i_lines(
    field: &FieldSpec,
    lines: usize,
    per_line: usize,
    seed: u64,
) -> Result<PointSet> {
    let i = field.sqrt_minus_one().ok_or_else(|| {
        Error::Hypothesis(format!(
            "slope-i lines need p ≡ 1 (mod 4), got p = {}",
            field.p()
        ))
    })?;
    let p = field.p() as usize;
    if lines == 0 || per_line == 0 || lines > p || per_line > p {
        return Err(Error::Usage(format!(
            "need 1 ≤ lines ≤ p and 1 ≤ points per line ≤ p, got {lines} × {per_line} with p = {p}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let offsets = index::sample(&mut rng, p, lines).into_vec();
    let mut pts = Vec::with_capacity(lines * per_line);
    for c in offsets {
        for t in index::sample(&mut rng, p, per_line) {
            let t = t as u32;
            pts.push([t, field.add_raw(c as u32, field.mul_raw(i.value(), t))]);
        }
    }
    PointSet::from_points(field, 2, pts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::isosceles_counts;

    fn f(p: u64) -> FieldSpec {
        FieldSpec::new(p).unwrap()
    }

    fn elems(s: &SubgroupSpec) -> Vec<u32> {
        s.elements().iter().map(|a| a.value()).collect()
    }

    #[test]
    fn subgroup_examples() {
        let k = f(7);
        assert_eq!(elems(&mult_subgroup(&k, 3).unwrap()), vec![1, 2, 4]);
        assert_eq!(elems(&mult_subgroup(&k, 1).unwrap()), vec![1]);
        assert_eq!(elems(&mult_subgroup(&f(13), 4).unwrap()), vec![1, 5, 8, 12]);
        assert!(matches!(mult_subgroup(&k, 4), Err(Error::Usage(_))));
        for p in [7u64, 13, 31, 61] {
            let k = f(p);
            for d in (1..p).filter(|d| (p - 1) % d == 0) {
                mult_subgroup(&k, d).unwrap().verify().unwrap();
            }
        }
    }

    #[test]
    fn complement_is_orthogonal() {
        let k = f(11);
        let vs = vec![vec![1, 2, 3, 4, 5], vec![0, 1, 0, 7, 2]];
        let comp = orthogonal_complement(&k, 5, &vs);
        assert_eq!(comp.len(), 3);
        for c in &comp {
            for v in &vs {
                assert_eq!(k.dot_raw(c, v), 0);
            }
        }
        assert_eq!(rank(&k, &comp), 3);
    }

    #[test]
    fn frame_examples() {
        let k = f(7);
        assert_eq!(k.norm_raw(&[1, 2, 1, 1]), 0);
        let one = isotropic_frame(&k, 4, 1, 0).unwrap();
        assert_eq!(one.len(), 1);
        assert!(matches!(
            isotropic_frame(&k, 2, 1, 0),
            Err(Error::NotFound(_))
        ));
        let two = isotropic_frame(&k, 4, 2, 0).unwrap();
        two.verify().unwrap();
        assert!(matches!(isotropic_frame(&k, 4, 3, 0), Err(Error::Usage(_))));
        for p in [3u64, 5, 7, 11, 13] {
            let k = f(p);
            isotropic_frame(&k, 8, 4, p).unwrap().verify().unwrap();
        }
    }

    #[test]
    fn odd_d3_example() {
        let k = f(7);
        let c = construct_odd_3mod4(&k, 3, 3, 0).unwrap();
        let pts: Vec<Vec<u32>> = c.set.iter().map(<[u32]>::to_vec).collect();
        assert_eq!(pts, vec![vec![0, 1, 1], vec![0, 2, 4], vec![0, 4, 2]]);
        let r = c.verify().unwrap();
        assert_eq!(r.products, vec![2, 6]);
    }

    #[test]
    fn odd_d7_example() {
        let c = construct_odd_3mod4(&f(7), 7, 3, 1).unwrap();
        let r = c.verify().unwrap();
        assert_eq!(r.set_size, 147);
        assert!(r.products.iter().all(|v| [2, 6].contains(v)));
        assert!(construct_odd_3mod4(&f(13), 3, 3, 0).is_err());
    }

    #[test]
    fn even_2mod4_example() {
        let c = construct_even_2mod4(&f(7), 6, 3, 2).unwrap();
        let r = c.verify().unwrap();
        assert_eq!(r.set_size, 147);
        assert_eq!(r.products, vec![2, 6]);
    }

    #[test]
    fn full_subgroup_image() {
        let k = f(11);
        let c = construct_odd_3mod4(&k, 3, 10, 0).unwrap();
        let r = c.verify().unwrap();
        let image: BTreeSet<u32> = (1..11u32).map(|a| (a + a * a) % 11).collect();
        assert_eq!(r.products, image.into_iter().collect::<Vec<_>>());
    }

    #[test]
    fn even_0mod4_examples() {
        let k = f(13);
        let c = construct_even_0mod4(&k, 4, 3, 0).unwrap();
        let r = c.verify().unwrap();
        assert_eq!(r.set_size, 3 * 13);
        assert!(r.products.len() <= 3);
        assert!(r.products_in_plus_image);
        let one = construct_even_0mod4(&k, 4, 1, 0).unwrap().verify().unwrap();
        assert_eq!(one.products.len(), 1);
        assert!(matches!(
            construct_even_0mod4(&f(7), 4, 3, 0),
            Err(Error::Hypothesis(_))
        ));
        let big = construct_even_0mod4(&f(5), 8, 2, 4)
            .unwrap()
            .verify()
            .unwrap();
        assert_eq!(big.set_size, 2 * 125);
    }

    #[test]
    fn lines_examples() {
        let k = f(13);
        let e = slope_i_lines(&k, 2, 3, 7).unwrap();
        assert_eq!(e.len(), 6);
        let t = isosceles_counts(&e);
        assert!(t.null_triangles >= 54);
        assert!(t.t_de >= 54);
        let single = slope_i_lines(&k, 1, 1, 0).unwrap();
        assert_eq!(isosceles_counts(&single).null_triangles, 1);
        assert!(slope_i_lines(&f(7), 2, 3, 0).is_err());
        assert!(slope_i_lines(&k, 14, 1, 0).is_err());
    }
}
