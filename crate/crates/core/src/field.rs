//! Prime-field arithmetic over `F_p` for an odd prime `p`.
//!
//! Everything hangs off [`FieldSpec`], a cheaply clonable handle that owns the
//! modulus together with lazily built tables (additive character values,
//! square roots, a primitive root). Hot counting loops work on raw `u32`
//! residues through [`FieldSpec::dot`] and friends; the [`Scalar`] newtype is
//! the checked surface for everything else.

use std::f64::consts::TAU;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Value of the additive character: a point on the unit circle.
pub type Phase = Complex64;

/// Below this modulus square roots come from an exhaustive table.
const SQRT_TABLE_LIMIT: u32 = 10_000;

/// Largest supported modulus. Products of two residues must fit in a `u64`
/// and `p` itself must fit in a `u32`.
pub const MAX_MODULUS: u64 = (1 << 31) - 1;

/// An element of `F_p`, always reduced into `[0, p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Scalar(u32);

impl Scalar {
    /// Callers guarantee `v < p`.
    #[inline]
    pub(crate) fn from_residue(v: u32) -> Scalar {
        Scalar(v)
    }

    #[inline]
    pub fn value(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A vector of reduced residues.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FieldVector(Vec<u32>);

impl FieldVector {
    pub fn coords(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<u32> {
        self.0
    }
}

impl AsRef<[u32]> for FieldVector {
    fn as_ref(&self) -> &[u32] {
        &self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    /// Unary; the second operand is ignored.
    Inv,
    /// Unary; the second operand is ignored.
    Neg,
}

struct Inner {
    p: u32,
    chi: Vec<Phase>,
    primitive_root: OnceLock<u32>,
    /// `sqrt_table[a]` is the smaller square root of `a`, or `u32::MAX`.
    sqrt_table: OnceLock<Vec<u32>>,
}

/// The prime field `F_p`.
#[derive(Clone)]
pub struct FieldSpec {
    inner: Arc<Inner>,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec").field("p", &self.p()).finish()
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p() == other.p()
    }
}

impl Eq for FieldSpec {}

/// Trial division; adequate for the moduli this crate is meant for.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Distinct prime factors of `n`, ascending.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

impl FieldSpec {
    pub fn new(p: u64) -> Result<Self> {
        if p > MAX_MODULUS {
            return Err(Error::Usage(format!("modulus {p} exceeds {MAX_MODULUS}")));
        }
        if p.is_multiple_of(2) || !is_prime(p) {
            return Err(Error::Usage(format!("modulus {p} is not an odd prime")));
        }
        let p32 = p as u32;
        let chi = (0..p32)
            .map(|a| {
                let (s, c) = (TAU * f64::from(a) / f64::from(p32)).sin_cos();
                Complex64::new(c, s)
            })
            .collect();
        Ok(FieldSpec {
            inner: Arc::new(Inner {
                p: p32,
                chi,
                primitive_root: OnceLock::new(),
                sqrt_table: OnceLock::new(),
            }),
        })
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.inner.p
    }

    /// `p mod 4`, either 1 or 3.
    pub fn residue_class_mod_4(&self) -> u32 {
        self.p() % 4
    }

    /// Reduces any integer into the field.
    pub fn scalar(&self, v: i64) -> Scalar {
        Scalar(v.rem_euclid(i64::from(self.p())) as u32)
    }

    pub fn vector(&self, coords: &[i64]) -> FieldVector {
        FieldVector(coords.iter().map(|&c| self.scalar(c).0).collect())
    }

    /// Wraps already-reduced coordinates. Fails if any coordinate is `>= p`.
    pub fn vector_from_residues(&self, coords: Vec<u32>) -> Result<FieldVector> {
        if let Some(&c) = coords.iter().find(|&&c| c >= self.p()) {
            return Err(Error::Usage(format!(
                "coordinate {c} is not reduced mod {}",
                self.p()
            )));
        }
        Ok(FieldVector(coords))
    }

    #[inline]
    pub fn reduce(&self, v: u64) -> u32 {
        (v % u64::from(self.p())) as u32
    }

    #[inline]
    pub fn add_raw(&self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.p() {
            s - self.p()
        } else {
            s
        }
    }

    #[inline]
    pub fn sub_raw(&self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.p() - b
        }
    }

    #[inline]
    pub fn neg_raw(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p() - a
        }
    }

    #[inline]
    pub fn mul_raw(&self, a: u32, b: u32) -> u32 {
        self.reduce(u64::from(a) * u64::from(b))
    }

    pub fn pow_raw(&self, base: u32, mut exp: u64) -> u32 {
        let mut acc = 1 % self.p();
        let mut b = base % self.p();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul_raw(acc, b);
            }
            b = self.mul_raw(b, b);
            exp >>= 1;
        }
        acc
    }

    pub fn inv_raw(&self, a: u32) -> Result<u32> {
        if a.is_multiple_of(self.p()) {
            return Err(Error::Domain("inverse of zero".into()));
        }
        Ok(self.pow_raw(a, u64::from(self.p()) - 2))
    }

    pub fn add(&self, a: Scalar, b: Scalar) -> Scalar {
        Scalar(self.add_raw(a.0, b.0))
    }

    pub fn sub(&self, a: Scalar, b: Scalar) -> Scalar {
        Scalar(self.sub_raw(a.0, b.0))
    }

    pub fn mul(&self, a: Scalar, b: Scalar) -> Scalar {
        Scalar(self.mul_raw(a.0, b.0))
    }

    pub fn neg(&self, a: Scalar) -> Scalar {
        Scalar(self.neg_raw(a.0))
    }

    pub fn inv(&self, a: Scalar) -> Result<Scalar> {
        self.inv_raw(a.0).map(Scalar)
    }

    pub fn pow(&self, a: Scalar, exp: u64) -> Scalar {
        Scalar(self.pow_raw(a.0, exp))
    }

    /// Dispatches on `op`; unary operations ignore `b`.
    pub fn arith(&self, a: Scalar, b: Scalar, op: ArithOp) -> Result<Scalar> {
        Ok(match op {
            ArithOp::Add => self.add(a, b),
            ArithOp::Sub => self.sub(a, b),
            ArithOp::Mul => self.mul(a, b),
            ArithOp::Neg => self.neg(a),
            ArithOp::Inv => self.inv(a)?,
        })
    }

    /// Legendre symbol by Euler's criterion.
    pub fn legendre(&self, a: Scalar) -> i8 {
        if a.0 == 0 {
            return 0;
        }
        let e = self.pow_raw(a.0, u64::from(self.p() - 1) / 2);
        if e == 1 {
            1
        } else {
            -1
        }
    }

    fn sqrt_table(&self) -> &[u32] {
        self.inner.sqrt_table.get_or_init(|| {
            let p = self.p();
            let mut table = vec![u32::MAX; p as usize];
            for x in 0..=p / 2 {
                let sq = self.mul_raw(x, x) as usize;
                if table[sq] == u32::MAX {
                    table[sq] = x;
                }
            }
            table
        })
    }

    /// Tonelli–Shanks for a known quadratic residue `a != 0`.
    fn tonelli_shanks(&self, a: u32) -> u32 {
        let p = self.p();
        let mut q = u64::from(p - 1);
        let mut s = 0u32;
        while q % 2 == 0 {
            q /= 2;
            s += 1;
        }
        let mut z = 2u32;
        while self.legendre(Scalar(z)) != -1 {
            z += 1;
        }
        let mut m = s;
        let mut c = self.pow_raw(z, q);
        let mut t = self.pow_raw(a, q);
        let mut r = self.pow_raw(a, q.div_ceil(2));
        while t != 1 {
            let mut i = 0u32;
            let mut tt = t;
            while tt != 1 {
                tt = self.mul_raw(tt, tt);
                i += 1;
            }
            let b = self.pow_raw(c, 1u64 << (m - i - 1));
            m = i;
            c = self.mul_raw(b, b);
            t = self.mul_raw(t, c);
            r = self.mul_raw(r, b);
        }
        r
    }

    /// All square roots of `a`, ascending: empty, `{0}`, or two roots.
    pub fn sqrt(&self, a: Scalar) -> Vec<Scalar> {
        if a.0 == 0 {
            return vec![Scalar(0)];
        }
        let root = if self.p() < SQRT_TABLE_LIMIT {
            let r = self.sqrt_table()[a.0 as usize];
            if r == u32::MAX {
                return Vec::new();
            }
            r
        } else {
            if self.legendre(a) != 1 {
                return Vec::new();
            }
            self.tonelli_shanks(a.0)
        };
        let other = self.neg_raw(root);
        let (lo, hi) = if root < other {
            (root, other)
        } else {
            (other, root)
        };
        vec![Scalar(lo), Scalar(hi)]
    }

    /// The smaller square root of `-1`, present iff `p ≡ 1 (mod 4)`.
    pub fn sqrt_minus_one(&self) -> Option<Scalar> {
        self.sqrt(Scalar(self.p() - 1)).into_iter().next()
    }

    /// `e^{2πi a/p}`.
    #[inline]
    pub fn chi(&self, a: Scalar) -> Phase {
        self.inner.chi[a.0 as usize]
    }

    /// Character lookup by raw residue.
    #[inline]
    pub fn chi_raw(&self, a: u32) -> Phase {
        self.inner.chi[a as usize]
    }

    /// The full table `chi(0), ..., chi(p-1)`.
    pub fn chi_table(&self) -> &[Phase] {
        &self.inner.chi
    }

    /// Unchecked dot product of two residue slices of equal length.
    #[inline]
    pub fn dot_raw(&self, u: &[u32], v: &[u32]) -> u32 {
        debug_assert_eq!(u.len(), v.len());
        // Each term is < 2^62; fold every few terms to stay within u64.
        let mut acc = 0u64;
        for (&a, &b) in u.iter().zip(v) {
            acc += u64::from(a) * u64::from(b);
            if acc >= 1 << 62 {
                acc %= u64::from(self.p());
            }
        }
        self.reduce(acc)
    }

    #[inline]
    pub fn norm_raw(&self, v: &[u32]) -> u32 {
        self.dot_raw(v, v)
    }

    /// `‖u − v‖` without materializing the difference.
    #[inline]
    pub fn dist_raw(&self, u: &[u32], v: &[u32]) -> u32 {
        debug_assert_eq!(u.len(), v.len());
        let mut acc = 0u64;
        for (&a, &b) in u.iter().zip(v) {
            let d = u64::from(self.sub_raw(a, b));
            acc += d * d;
            if acc >= 1 << 62 {
                acc %= u64::from(self.p());
            }
        }
        self.reduce(acc)
    }

    pub fn dot(&self, u: &FieldVector, v: &FieldVector) -> Result<Scalar> {
        if u.len() != v.len() {
            return Err(Error::Usage(format!(
                "dot product of vectors of length {} and {}",
                u.len(),
                v.len()
            )));
        }
        Ok(Scalar(self.dot_raw(&u.0, &v.0)))
    }

    pub fn norm(&self, v: &FieldVector) -> Scalar {
        Scalar(self.norm_raw(&v.0))
    }

    /// A generator of the multiplicative group; the smallest one.
    pub fn primitive_root(&self) -> Scalar {
        Scalar(*self.inner.primitive_root.get_or_init(|| {
            let p = self.p();
            if p == 3 {
                return 2;
            }
            let order = u64::from(p - 1);
            let factors = prime_factors(order);
            (2..p)
                .find(|&g| factors.iter().all(|&f| self.pow_raw(g, order / f) != 1))
                .expect("every prime field has a primitive root")
        }))
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self, a: Scalar) -> Result<u64> {
        if a.0 == 0 {
            return Err(Error::Domain("zero has no multiplicative order".into()));
        }
        let mut ord = u64::from(self.p() - 1);
        for f in prime_factors(ord) {
            while ord % f == 0 && self.pow_raw(a.0, ord / f) == 1 {
                ord /= f;
            }
        }
        Ok(ord)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64) -> FieldSpec {
        FieldSpec::new(p).unwrap()
    }

    fn primes_below(n: u64) -> Vec<u64> {
        (3..n).filter(|&k| is_prime(k)).collect()
    }

    #[test]
    fn rejects_non_primes() {
        assert!(FieldSpec::new(9).is_err());
        assert!(FieldSpec::new(2).is_err());
        assert!(FieldSpec::new(1).is_err());
        assert!(FieldSpec::new(7).is_ok());
    }

    #[test]
    fn arith_examples() {
        let k = f(7);
        assert_eq!(
            k.arith(k.scalar(3), k.scalar(5), ArithOp::Mul)
                .unwrap()
                .value(),
            1
        );
        assert_eq!(
            k.arith(k.scalar(3), Scalar(0), ArithOp::Inv)
                .unwrap()
                .value(),
            5
        );
        for a in 0..7 {
            let a = k.scalar(a);
            assert!(k.add(a, k.neg(a)).is_zero());
        }
        assert!(matches!(k.inv(Scalar(0)), Err(Error::Domain(_))));
    }

    #[test]
    fn inverse_property_exhaustive() {
        for p in primes_below(60) {
            let k = f(p);
            for a in 1..p as i64 {
                let a = k.scalar(a);
                assert_eq!(k.mul(a, k.inv(a).unwrap()).value(), 1);
            }
        }
    }

    #[test]
    fn legendre_and_sqrt_examples() {
        let k = f(7);
        assert_eq!(k.legendre(k.scalar(3)), -1);
        let roots: Vec<u32> = k.sqrt(k.scalar(2)).iter().map(|s| s.value()).collect();
        assert_eq!(roots, vec![3, 4]);
        assert_eq!(f(13).sqrt_minus_one().map(Scalar::value), Some(5));
        assert_eq!(k.sqrt_minus_one(), None);
    }

    #[test]
    fn sqrt_matches_legendre() {
        for p in primes_below(100) {
            let k = f(p);
            for a in 0..p as i64 {
                let a = k.scalar(a);
                let roots = k.sqrt(a);
                match k.legendre(a) {
                    -1 => assert!(roots.is_empty()),
                    0 => assert_eq!(roots.len(), 1),
                    _ => assert_eq!(roots.len(), 2),
                }
                for r in roots {
                    assert_eq!(k.mul(r, r), a);
                }
            }
        }
    }

    #[test]
    fn tonelli_shanks_above_table_limit() {
        for p in [10_007u64, 10_009, 65_537, 1_000_003] {
            let k = f(p);
            for a in [2i64, 3, 5, 10, 12_345, 99_991] {
                let a = k.scalar(a);
                let roots = k.sqrt(a);
                assert_eq!(roots.is_empty(), k.legendre(a) == -1, "p={p} a={a}");
                for r in roots {
                    assert_eq!(k.mul(r, r), a);
                }
            }
            assert_eq!(k.sqrt_minus_one().is_some(), p % 4 == 1);
        }
    }

    #[test]
    fn sqrt_minus_one_iff_1_mod_4() {
        for p in primes_below(200) {
            assert_eq!(f(p).sqrt_minus_one().is_some(), p % 4 == 1, "p={p}");
        }
    }

    #[test]
    fn chi_is_a_homomorphism() {
        for p in primes_below(32) {
            let k = f(p);
            assert_eq!(k.chi(Scalar(0)), Complex64::new(1.0, 0.0));
            for a in 0..p as i64 {
                for b in 0..p as i64 {
                    let lhs = k.chi(k.scalar(a)) * k.chi(k.scalar(b));
                    let rhs = k.chi(k.scalar(a + b));
                    assert!((lhs - rhs).norm() < 1e-12);
                }
                assert!((k.chi(k.scalar(a)).norm_sqr() - 1.0).abs() < 1e-12);
            }
        }
        let k = f(5);
        let prod = k.chi(k.scalar(2)) * k.chi(k.scalar(3));
        assert!((prod - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn character_orthogonality() {
        for p in primes_below(32) {
            let k = f(p);
            for t in 0..p as i64 {
                let s: Complex64 = (0..p as i64).map(|a| k.chi(k.scalar(a * t))).sum();
                let expect = if t == 0 { p as f64 } else { 0.0 };
                assert!((s - Complex64::new(expect, 0.0)).norm() < 1e-9);
                if t != 0 {
                    let row: Complex64 = (1..p as i64).map(|r| k.chi(k.scalar(r * t))).sum();
                    assert!((row - Complex64::new(-1.0, 0.0)).norm() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn dot_and_norm() {
        let k = f(7);
        let u = k.vector(&[1, 2, 3]);
        let v = k.vector(&[4, 5, 6]);
        assert_eq!(k.dot(&u, &v).unwrap().value(), 4);
        assert_eq!(k.norm(&u).value(), 0);
        assert_eq!(k.norm(&k.vector(&[0, 0, 0, 0])).value(), 0);
        assert!(matches!(
            k.dot(&u, &k.vector(&[1, 2])),
            Err(Error::Usage(_))
        ));
        assert_eq!(k.dist_raw(u.coords(), v.coords()), k.norm_raw(&[4, 4, 4]));
    }

    #[test]
    fn primitive_roots() {
        assert_eq!(f(7).primitive_root().value(), 3);
        assert_eq!(f(3).primitive_root().value(), 2);
        let k = f(5);
        let g = k.primitive_root();
        assert_ne!(k.pow(g, 2).value(), 1);
        assert_eq!(k.pow(g, 4).value(), 1);
        for p in primes_below(300) {
            let k = f(p);
            assert_eq!(k.order(k.primitive_root()).unwrap(), p - 1);
        }
    }
}
