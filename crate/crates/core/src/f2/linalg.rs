use crate::error::{Error, Result};
use crate::f2::function::LinearFn;
use crate::f2::point::PointF2;

/// Incremental Gaussian elimination over `F_2^n` for labeled vectors.
///
/// Rows are kept in reduced echelon form keyed by their highest set bit, so
/// once the rank reaches `n` every row is a unit vector and the labels are
/// the coefficients of the unique consistent linear function.
#[derive(Clone, Debug)]
pub struct F2Basis {
    n: u32,
    rows: Vec<Option<(PointF2, bool)>>,
    rank: u32,
}

impl F2Basis {
    pub fn new(n: u32) -> Result<Self> {
        PointF2::zero(n)?;
        Ok(Self {
            n,
            rows: vec![None; n as usize],
            rank: 0,
        })
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn is_full(&self) -> bool {
        self.rank == self.n
    }

    /// Adds `(x, label)`; returns `true` if `x` was independent of the rows so far.
    pub fn insert(&mut self, x: &PointF2, label: bool) -> Result<bool> {
        if x.dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: x.dim(),
            });
        }
        let mut v = x.clone();
        let mut lab = label;
        while let Some(p) = v.highest_bit() {
            match &self.rows[p as usize] {
                Some((row, l)) => {
                    v.xor_assign_unchecked(row);
                    lab ^= l;
                }
                None => break,
            }
        }
        let Some(pivot) = v.highest_bit() else {
            return Ok(false);
        };
        // Keep the new row free of lower pivots, then clear its pivot from higher rows.
        for b in (0..pivot).rev() {
            if v.bit(b) {
                if let Some((row, l)) = &self.rows[b as usize] {
                    v.xor_assign_unchecked(row);
                    lab ^= l;
                }
            }
        }
        for slot in self.rows.iter_mut().skip(pivot as usize + 1).flatten() {
            if slot.0.bit(pivot) {
                slot.0.xor_assign_unchecked(&v);
                slot.1 ^= lab;
            }
        }
        self.rows[pivot as usize] = Some((v, lab));
        self.rank += 1;
        Ok(true)
    }

    /// The unique linear function matching every inserted label, once the basis spans `F_2^n`.
    pub fn solve(&self) -> Result<LinearFn> {
        if !self.is_full() {
            return Err(Error::Internal(format!(
                "basis has rank {} < {}",
                self.rank, self.n
            )));
        }
        let mut a = PointF2::zero(self.n)?;
        for (i, slot) in self.rows.iter().enumerate() {
            let (row, label) = slot.as_ref().expect("full rank");
            if row.weight() != 1 {
                return Err(Error::Internal("basis row not reduced".into()));
            }
            a.set_bit(i as u32, *label);
        }
        Ok(LinearFn::new(a))
    }
}
