use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::f2::point::PointF2;

/// Largest dimension for which truth tables are materialized.
pub const MAX_TABLE_DIM: u32 = 30;

/// A Boolean function `{0,1}^n -> {0,1}` that can be evaluated pointwise.
///
/// Sessions only ever read through this trait, so table-backed and implicit
/// functions are interchangeable behind an oracle.
pub trait BoolFunction: Send + Sync {
    fn dim(&self) -> u32;
    fn eval(&self, x: &PointF2) -> bool;

    /// `±1` view: `1 - 2 f(x)`.
    fn sign(&self, x: &PointF2) -> i8 {
        if self.eval(x) {
            -1
        } else {
            1
        }
    }
}

/// Explicit truth table over `{0,1}^n`, bit-packed in point-index order.
#[derive(Clone, PartialEq, Eq)]
pub struct BoolFn {
    n: u32,
    bits: Vec<u64>,
}

fn check_table_dim(n: u32) -> Result<()> {
    if n == 0 || n > MAX_TABLE_DIM {
        return Err(Error::UnsupportedDimension {
            n,
            reason: "truth tables are limited to 1..=30 variables",
        });
    }
    Ok(())
}

impl BoolFn {
    pub fn zero(n: u32) -> Result<Self> {
        check_table_dim(n)?;
        let len = 1usize << n;
        Ok(Self {
            n,
            bits: vec![0; len.div_ceil(64)],
        })
    }

    pub fn from_fn(n: u32, mut f: impl FnMut(u64) -> bool) -> Result<Self> {
        let mut out = Self::zero(n)?;
        for idx in 0..out.len() as u64 {
            if f(idx) {
                out.set(idx, true);
            }
        }
        Ok(out)
    }

    /// Materializes any function of dimension at most 30.
    pub fn materialize(f: &dyn BoolFunction) -> Result<Self> {
        let n = f.dim();
        check_table_dim(n)?;
        Self::from_fn(n, |idx| {
            f.eval(&PointF2::from_index(n, idx).expect("index below 2^n"))
        })
    }

    pub fn from_values(values: &[bool]) -> Result<Self> {
        let len = values.len();
        if !len.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "truth table length {len} is not a power of two"
            )));
        }
        let n = len.trailing_zeros();
        Self::from_fn(n, |i| values[i as usize])
    }

    pub fn len(&self) -> usize {
        1usize << self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn get(&self, index: u64) -> bool {
        (self.bits[(index / 64) as usize] >> (index % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, index: u64, value: bool) {
        let w = &mut self.bits[(index / 64) as usize];
        let mask = 1u64 << (index % 64);
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    pub fn flip(&mut self, index: u64) {
        self.bits[(index / 64) as usize] ^= 1u64 << (index % 64);
    }

    pub fn ones(&self) -> u64 {
        self.bits.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// Number of points where the two tables disagree.
    pub fn hamming_distance(&self, other: &BoolFn) -> Result<u64> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(self
            .bits
            .iter()
            .zip(&other.bits)
            .map(|(a, b)| (a ^ b).count_ones() as u64)
            .sum())
    }

    /// Points on which the two functions disagree, in index order.
    pub fn disagreement_set(&self, other: &dyn BoolFunction) -> Result<Vec<PointF2>> {
        if self.n != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.dim(),
            });
        }
        let mut out = Vec::new();
        for idx in 0..self.len() as u64 {
            let x = PointF2::from_index(self.n, idx)?;
            if self.get(idx) != other.eval(&x) {
                out.push(x);
            }
        }
        Ok(out)
    }

    /// Text form: a header line `n=<int>` then `2^n` characters `0`/`1` in index order.
    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(self.len() + 16);
        let _ = writeln!(s, "n={}", self.n);
        for idx in 0..self.len() as u64 {
            s.push(if self.get(idx) { '1' } else { '0' });
        }
        s.push('\n');
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("missing header line".into()))?
            .trim();
        let n: u32 = header
            .strip_prefix("n=")
            .ok_or_else(|| Error::Parse(format!("expected `n=<int>` header, got {header:?}")))?
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("bad dimension in header: {e}")))?;
        check_table_dim(n)?;
        let mut out = Self::zero(n)?;
        let mut idx = 0u64;
        for ch in lines.flat_map(str::chars).filter(|c| !c.is_whitespace()) {
            if idx >= out.len() as u64 {
                return Err(Error::Parse(format!("more than 2^{n} table entries")));
            }
            match ch {
                '0' => {}
                '1' => out.set(idx, true),
                other => return Err(Error::Parse(format!("unexpected table character {other:?}"))),
            }
            idx += 1;
        }
        if idx != out.len() as u64 {
            return Err(Error::Parse(format!(
                "expected {} table entries, found {idx}",
                out.len()
            )));
        }
        Ok(out)
    }
}

impl BoolFunction for BoolFn {
    fn dim(&self) -> u32 {
        self.n
    }

    #[inline]
    fn eval(&self, x: &PointF2) -> bool {
        debug_assert_eq!(x.dim(), self.n);
        self.get(x.words()[0])
    }
}

impl std::fmt::Debug for BoolFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "BoolFn(n={}, ones={})", self.n, self.ones())
    }
}

/// The linear function `x -> <a, x> mod 2`, evaluated from its coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinearFn {
    coeffs: PointF2,
}

impl LinearFn {
    pub fn new(coeffs: PointF2) -> Self {
        Self { coeffs }
    }

    pub fn zero(n: u32) -> Result<Self> {
        Ok(Self::new(PointF2::zero(n)?))
    }

    pub fn coeffs(&self) -> &PointF2 {
        &self.coeffs
    }

    pub fn to_table(&self) -> Result<BoolFn> {
        BoolFn::materialize(self)
    }

    /// Recovers the coefficients of a table that is exactly linear.
    pub fn from_table(f: &BoolFn) -> Result<Self> {
        let n = f.dim();
        let mut coeffs = PointF2::zero(n)?;
        for i in 0..n {
            coeffs.set_bit(i, f.get(1u64 << i));
        }
        let g = Self::new(coeffs);
        if f.hamming_distance(&g.to_table()?)? != 0 {
            return Err(Error::InvalidParameter("table is not linear".into()));
        }
        Ok(g)
    }
}

impl BoolFunction for LinearFn {
    fn dim(&self) -> u32 {
        self.coeffs.dim()
    }

    #[inline]
    fn eval(&self, x: &PointF2) -> bool {
        self.coeffs.dot(x)
    }
}

/// `x -> <a,x> XOR (x_1 AND … AND x_k)`, an implicit function at distance
/// exactly `2^-k` from linearity for `k >= 2`.
///
/// Used where truth tables are out of reach (large `n`): the distance is
/// certified on the `k`-variable junta alone, since linear functions that
/// touch any other coordinate disagree with it on exactly half the cube.
#[derive(Clone, Debug)]
pub struct JuntaFarFn {
    linear: LinearFn,
    k: u32,
    mask: PointF2,
}

impl JuntaFarFn {
    pub fn new(linear: LinearFn, k: u32) -> Result<Self> {
        let n = linear.dim();
        if k < 2 || k > n || k > 20 {
            return Err(Error::InvalidParameter(format!(
                "junta size k = {k} must satisfy 2 <= k <= min(n, 20)"
            )));
        }
        let mut mask = PointF2::zero(n)?;
        for i in 0..k {
            mask.set_bit(i, true);
        }
        Ok(Self { linear, k, mask })
    }

    pub fn junta_size(&self) -> u32 {
        self.k
    }

    pub fn linear_part(&self) -> &LinearFn {
        &self.linear
    }

    /// Exact distance to linearity, computed by a Walsh–Hadamard transform
    /// of the `k`-variable AND.
    pub fn certified_distance(&self) -> Result<crate::f2::walsh::Dyadic> {
        let k = self.k;
        let and_k = BoolFn::from_fn(k, |idx| idx == (1u64 << k) - 1)?;
        let junta = crate::f2::walsh::distance_to_linear(&and_k)?.distance;
        // Off-junta linear functions sit at distance 1/2.
        Ok(junta.min(crate::f2::walsh::Dyadic::new(1, 1)))
    }
}

impl BoolFunction for JuntaFarFn {
    fn dim(&self) -> u32 {
        self.linear.dim()
    }

    #[inline]
    fn eval(&self, x: &PointF2) -> bool {
        let and = x
            .words()
            .iter()
            .zip(self.mask.words())
            .all(|(w, m)| w & m == *m);
        self.linear.eval(x) ^ and
    }
}

/// `x -> 1 XOR x_1`, the affine function at distance 1/2 from linearity.
#[derive(Clone, Debug)]
pub struct AffineX1 {
    n: u32,
}

impl AffineX1 {
    pub fn new(n: u32) -> Result<Self> {
        PointF2::zero(n)?;
        Ok(Self { n })
    }
}

impl BoolFunction for AffineX1 {
    fn dim(&self) -> u32 {
        self.n
    }

    fn eval(&self, x: &PointF2) -> bool {
        !x.bit(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn linear_roundtrip_through_table() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for n in 1..=10 {
            let g = LinearFn::new(PointF2::random(n, &mut rng));
            let table = g.to_table().unwrap();
            assert_eq!(LinearFn::from_table(&table).unwrap(), g);
        }
    }

    #[test]
    fn linear_eval_is_parity_of_and() {
        let a = PointF2::from_index(6, 0b101101).unwrap();
        let g = LinearFn::new(a);
        for idx in 0..64u64 {
            let x = PointF2::from_index(6, idx).unwrap();
            assert_eq!(g.eval(&x), (idx & 0b101101).count_ones() % 2 == 1);
        }
    }

    #[test]
    fn text_format_roundtrip() {
        let f = BoolFn::from_values(&[false, true, true, false, true, false, false, true]).unwrap();
        let text = f.to_text();
        assert_eq!(text, "n=3\n01101001\n");
        assert_eq!(BoolFn::from_text(&text).unwrap(), f);
        assert_eq!(BoolFn::from_text("n=3\n0110\n1001").unwrap(), f);
    }

    #[test]
    fn text_format_errors() {
        assert!(BoolFn::from_text("").is_err());
        assert!(BoolFn::from_text("m=3\n01101001").is_err());
        assert!(BoolFn::from_text("n=3\n0110100").is_err());
        assert!(BoolFn::from_text("n=3\n011010011").is_err());
        assert!(BoolFn::from_text("n=2\n01x1").is_err());
        assert!(BoolFn::from_text("n=31\n").is_err());
    }

    #[test]
    fn junta_far_matches_materialized_definition() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let lin = LinearFn::new(PointF2::random(8, &mut rng));
        let f = JuntaFarFn::new(lin.clone(), 3).unwrap();
        let table = BoolFn::materialize(&f).unwrap();
        for idx in 0..256u64 {
            let x = PointF2::from_index(8, idx).unwrap();
            assert_eq!(table.get(idx), lin.eval(&x) ^ (idx & 7 == 7));
        }
        assert!(JuntaFarFn::new(lin, 1).is_err());
    }

    #[test]
    fn affine_x1_disagrees_with_zero_on_half() {
        let f = BoolFn::materialize(&AffineX1::new(6).unwrap()).unwrap();
        let zero = LinearFn::zero(6).unwrap();
        assert_eq!(f.disagreement_set(&zero).unwrap().len(), 32);
    }
}
