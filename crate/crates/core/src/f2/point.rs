use std::fmt;

use rand::Rng;
use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Largest dimension supported by the implicit (coefficient-only) function mode.
pub const MAX_DIM: u32 = 1 << 16;

type Words = SmallVec<[u64; 8]>;

/// A point of `{0,1}^n`, stored as little-endian 64-bit words.
///
/// Bit `i` of the point is coordinate `x_{i+1}`. For `n <= 64` the point also
/// has an integer index (used to address truth tables); wider points only
/// appear with implicitly represented functions.
#[derive(PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointF2 {
    n: u32,
    words: Words,
}

impl Clone for PointF2 {
    fn clone(&self) -> Self {
        Self {
            n: self.n,
            words: Words::from_slice(&self.words),
        }
    }
}

fn word_count(n: u32) -> usize {
    (n as usize).div_ceil(64).max(1)
}

fn top_mask(n: u32) -> u64 {
    match n % 64 {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

fn check_dim(n: u32) -> Result<()> {
    if n == 0 || n > MAX_DIM {
        return Err(Error::UnsupportedDimension {
            n,
            reason: "dimension must be in 1..=65536",
        });
    }
    Ok(())
}

impl PointF2 {
    pub fn zero(n: u32) -> Result<Self> {
        check_dim(n)?;
        Ok(Self {
            n,
            words: smallvec::smallvec![0; word_count(n)],
        })
    }

    /// Builds the point whose bits are the binary expansion of `index`.
    pub fn from_index(n: u32, index: u64) -> Result<Self> {
        check_dim(n)?;
        if n < 64 && index >> n != 0 {
            return Err(Error::InvalidParameter(format!(
                "index {index:#x} does not fit in {n} bits"
            )));
        }
        let mut words: Words = smallvec::smallvec![0; word_count(n)];
        words[0] = index;
        Ok(Self { n, words })
    }

    /// Builds a point from explicit coordinates (`bits[i]` is `x_{i+1}`).
    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        let n = u32::try_from(bits.len()).map_err(|_| Error::InvalidParameter("too many bits".into()))?;
        let mut p = Self::zero(n)?;
        for (i, &b) in bits.iter().enumerate() {
            p.set_bit(i as u32, b);
        }
        Ok(p)
    }

    pub fn random<R: Rng + ?Sized>(n: u32, rng: &mut R) -> Self {
        let mut words: Words = (0..word_count(n)).map(|_| rng.random::<u64>()).collect();
        let last = words.len() - 1;
        words[last] &= top_mask(n);
        Self { n, words }
    }

    #[inline]
    pub fn dim(&self) -> u32 {
        self.n
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Integer index of the point, defined for `n <= 64`.
    #[inline]
    pub fn index(&self) -> Option<u64> {
        (self.n <= 64).then(|| self.words[0])
    }

    #[inline]
    pub fn bit(&self, i: u32) -> bool {
        debug_assert!(i < self.n);
        (self.words[(i / 64) as usize] >> (i % 64)) & 1 == 1
    }

    pub fn set_bit(&mut self, i: u32, value: bool) {
        assert!(i < self.n, "bit {i} out of range for dimension {}", self.n);
        let w = &mut self.words[(i / 64) as usize];
        let mask = 1u64 << (i % 64);
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn weight(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    /// Position of the highest set coordinate.
    pub fn highest_bit(&self) -> Option<u32> {
        self.words
            .iter()
            .enumerate()
            .rev()
            .find(|(_, &w)| w != 0)
            .map(|(i, &w)| i as u32 * 64 + 63 - w.leading_zeros())
    }

    /// In-place XOR. Both points must share a dimension.
    #[inline]
    pub fn xor_assign(&mut self, other: &PointF2) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        self.xor_assign_unchecked(other);
        Ok(())
    }

    #[inline]
    pub(crate) fn xor_assign_unchecked(&mut self, other: &PointF2) {
        debug_assert_eq!(self.n, other.n);
        for (a, b) in self.words.iter_mut().zip(other.words.iter()) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &PointF2) -> Result<PointF2> {
        let mut out = self.clone();
        out.xor_assign(other)?;
        Ok(out)
    }

    /// Inner product `<self, other> mod 2`.
    #[inline]
    pub fn dot(&self, other: &PointF2) -> bool {
        debug_assert_eq!(self.n, other.n);
        let ones: u32 = self
            .words
            .iter()
            .zip(other.words.iter())
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        ones & 1 == 1
    }

    /// Lowercase hexadecimal of the point read as an integer, without leading zeros.
    pub fn to_hex(&self) -> String {
        let mut iter = self.words.iter().rev().skip_while(|&&w| w == 0);
        match iter.next() {
            None => "0".to_string(),
            Some(first) => {
                let mut s = format!("{first:x}");
                for w in iter {
                    s.push_str(&format!("{w:016x}"));
                }
                s
            }
        }
    }

    pub fn from_hex(n: u32, hex: &str) -> Result<Self> {
        let mut p = Self::zero(n)?;
        let digits = hex.trim().trim_start_matches("0x");
        if digits.is_empty() {
            return Err(Error::Parse("empty hex point".into()));
        }
        for (pos, ch) in digits.chars().rev().enumerate() {
            let v = ch
                .to_digit(16)
                .ok_or_else(|| Error::Parse(format!("bad hex digit {ch:?}")))? as u64;
            if v == 0 {
                continue;
            }
            let bit = pos as u64 * 4;
            let (word, shift) = ((bit / 64) as usize, bit % 64);
            if word >= p.words.len() {
                return Err(Error::Parse(format!("point {hex} exceeds {n} bits")));
            }
            p.words[word] |= v << shift;
        }
        let last = p.words.len() - 1;
        if p.words[last] & !top_mask(n) != 0 {
            return Err(Error::Parse(format!("point {hex} exceeds {n} bits")));
        }
        Ok(p)
    }
}

impl fmt::Debug for PointF2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PointF2({}; 0x{})", self.n, self.to_hex())
    }
}

impl fmt::Display for PointF2 {
    /// Coordinates `x_1 … x_n` as a bit string.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            f.write_str(if self.bit(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// XOR of the points selected by `subset`. The empty subset yields the zero point.
pub fn xor_subset(points: &[PointF2], subset: &[usize]) -> Result<PointF2> {
    let first = points
        .first()
        .ok_or_else(|| Error::InvalidParameter("xor_subset needs at least one point".into()))?;
    let mut acc = PointF2::zero(first.dim())?;
    for p in points {
        if p.dim() != first.dim() {
            return Err(Error::DimensionMismatch {
                expected: first.dim(),
                found: p.dim(),
            });
        }
    }
    for &j in subset {
        let p = points.get(j).ok_or_else(|| {
            Error::InvalidParameter(format!("subset index {j} out of range ({} points)", points.len()))
        })?;
        acc.xor_assign_unchecked(p);
    }
    Ok(acc)
}
