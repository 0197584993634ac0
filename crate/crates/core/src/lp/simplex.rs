//! Dense tableau simplex for the packing LP
//!
//! ```text
//! maximize  Σ_j y_j
//! s.t.      Σ_j a_ij y_j ≤ b_i   (one row per job, b_i ≥ 0)
//!           y ≥ 0,  a_ij ∈ {0, 1}
//! ```
//!
//! which is the dual of the covering LP `min b·x, Σ_{i∈P} x_i ≥ 1`. The slack
//! basis is feasible, columns can be appended to a solved tableau without
//! losing feasibility, and the covering solution is read off the reduced
//! costs of the slack columns.

use std::fmt::Debug;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::number::{from_f64, Rational};

/// Arithmetic the tableau needs. `f64` compares with a tolerance.
pub trait Scalar: Clone + Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn div(&self, other: &Self) -> Self;
    fn is_positive(&self) -> bool;
    fn is_negative(&self) -> bool;
    fn less_than(&self, other: &Self) -> bool;
    fn from_rational(r: &Rational) -> Self;
    fn to_rational(&self) -> Rational;
    /// Bland's rule is used for exact arithmetic; floats pick the most
    /// negative reduced cost and fall back to Bland on stalling.
    const EXACT: bool;
}

const TOL: f64 = 1e-10;

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn is_positive(&self) -> bool {
        *self > TOL
    }
    fn is_negative(&self) -> bool {
        *self < -TOL
    }
    fn less_than(&self, other: &Self) -> bool {
        *self < *other - TOL
    }
    fn from_rational(r: &Rational) -> Self {
        crate::number::to_f64(r)
    }
    fn to_rational(&self) -> Rational {
        from_f64(*self)
    }
    const EXACT: bool = false;
}

impl Scalar for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn is_positive(&self) -> bool {
        Signed::is_positive(self)
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn less_than(&self, other: &Self) -> bool {
        self < other
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn to_rational(&self) -> Rational {
        self.clone()
    }
    const EXACT: bool = true;
}

#[derive(Clone, Debug)]
pub struct PackingLp<S: Scalar> {
    m: usize,
    /// Row-major tableau; columns `0..m` are slacks, `m..` the added columns.
    rows: Vec<Vec<S>>,
    rhs: Vec<S>,
    basis: Vec<usize>,
    /// Reduced costs `z_j - c_j`.
    reduced: Vec<S>,
    value: S,
    pivots: usize,
}

impl<S: Scalar> PackingLp<S> {
    pub fn new(capacities: &[S]) -> Result<Self> {
        if capacities.iter().any(S::is_negative) {
            return Err(Error::Internal("packing LP needs nonnegative capacities".into()));
        }
        let m = capacities.len();
        let rows = (0..m)
            .map(|i| (0..m).map(|j| if i == j { S::one() } else { S::zero() }).collect())
            .collect();
        Ok(PackingLp {
            m,
            rows,
            rhs: capacities.to_vec(),
            basis: (0..m).collect(),
            reduced: vec![S::zero(); m],
            value: S::zero(),
            pivots: 0,
        })
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn columns(&self) -> usize {
        self.reduced.len() - self.m
    }

    pub fn pivots(&self) -> usize {
        self.pivots
    }

    /// Appends the column with ones at `support`; the current basis stays
    /// primal feasible.
    pub fn add_column(&mut self, support: &[usize]) {
        for row in &mut self.rows {
            let entry = support.iter().fold(S::zero(), |acc, &i| acc.add(&row[i]));
            row.push(entry);
        }
        let z = support.iter().fold(S::zero(), |acc, &i| acc.add(&self.reduced[i]));
        self.reduced.push(z.sub(&S::one()));
    }

    pub fn solve(&mut self) -> Result<()> {
        let mut stalled = 0usize;
        loop {
            let bland = S::EXACT || stalled > 50;
            let Some(enter) = self.entering(bland) else {
                return Ok(());
            };
            let Some(leave) = self.leaving(enter) else {
                return Err(Error::Internal("packing LP is unbounded".into()));
            };
            let before = self.value.clone();
            self.pivot(leave, enter);
            if before.less_than(&self.value) {
                stalled = 0;
            } else {
                stalled += 1;
            }
            if self.pivots > 100_000 {
                return Err(Error::Internal("simplex pivot limit reached".into()));
            }
        }
    }

    fn entering(&self, bland: bool) -> Option<usize> {
        if bland {
            return self.reduced.iter().position(S::is_negative);
        }
        let mut best: Option<usize> = None;
        for (j, r) in self.reduced.iter().enumerate() {
            if r.is_negative() && best.is_none_or(|b| r.less_than(&self.reduced[b])) {
                best = Some(j);
            }
        }
        best
    }

    fn leaving(&self, enter: usize) -> Option<usize> {
        let mut best: Option<(usize, S)> = None;
        for (r, row) in self.rows.iter().enumerate() {
            if !row[enter].is_positive() {
                continue;
            }
            let ratio = self.rhs[r].div(&row[enter]);
            let better = match &best {
                None => true,
                Some((b, br)) => {
                    ratio.less_than(br) || (!br.less_than(&ratio) && self.basis[r] < self.basis[*b])
                }
            };
            if better {
                best = Some((r, ratio));
            }
        }
        best.map(|(r, _)| r)
    }

    fn pivot(&mut self, leave: usize, enter: usize) {
        let p = self.rows[leave][enter].clone();
        for x in self.rows[leave].iter_mut() {
            *x = x.div(&p);
        }
        self.rhs[leave] = self.rhs[leave].div(&p);
        let pivot_row = self.rows[leave].clone();
        let pivot_rhs = self.rhs[leave].clone();
        for r in 0..self.m {
            if r == leave {
                continue;
            }
            let f = self.rows[r][enter].clone();
            if !f.is_positive() && !f.is_negative() {
                continue;
            }
            for (x, y) in self.rows[r].iter_mut().zip(&pivot_row) {
                *x = x.sub(&f.mul(y));
            }
            self.rhs[r] = self.rhs[r].sub(&f.mul(&pivot_rhs));
        }
        let f = self.reduced[enter].clone();
        for (x, y) in self.reduced.iter_mut().zip(&pivot_row) {
            *x = x.sub(&f.mul(y));
        }
        self.value = self.value.sub(&f.mul(&pivot_rhs));
        self.basis[leave] = enter;
        self.pivots += 1;
    }

    /// Optimal packing value, equal to the covering optimum.
    pub fn value(&self) -> &S {
        &self.value
    }

    /// Covering solution: the reduced cost of each slack column.
    pub fn cover(&self) -> Vec<S> {
        self.reduced[..self.m].to_vec()
    }

    /// Packing solution, one value per added column.
    pub fn packing(&self) -> Vec<S> {
        let mut y = vec![S::zero(); self.columns()];
        for (r, &b) in self.basis.iter().enumerate() {
            if b >= self.m {
                y[b - self.m] = self.rhs[r].clone();
            }
        }
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::{int, ratio};

    #[test]
    fn single_cut_picks_cheapest_job() {
        let mut lp = PackingLp::<Rational>::new(&[int(1), int(2), int(3)]).unwrap();
        lp.add_column(&[0, 1, 2]);
        lp.solve().unwrap();
        assert_eq!(lp.value(), &int(1));
        assert_eq!(lp.cover(), vec![int(1), int(0), int(0)]);
    }

    #[test]
    fn triangle_has_half_integral_optimum() {
        let mut lp = PackingLp::<Rational>::new(&[int(1), int(1), int(1)]).unwrap();
        for cut in [[0, 1], [1, 2], [0, 2]] {
            lp.add_column(&cut);
        }
        lp.solve().unwrap();
        assert_eq!(lp.value(), &ratio(3, 2));
        assert_eq!(lp.cover(), vec![ratio(1, 2); 3]);
        let y = lp.packing();
        assert_eq!(y.iter().fold(int(0), |a, b| a + b), ratio(3, 2));
    }

    #[test]
    fn warm_start_is_monotone_and_matches_float_kernel() {
        let costs: [i32; 8] = [3, 1, 4, 1, 5, 9, 2, 6];
        let cuts: [&[usize]; 6] = [&[0, 1, 2], &[1, 3], &[2, 4, 5], &[5, 6, 7], &[0, 7], &[3, 4, 6]];
        let mut exact = PackingLp::<Rational>::new(&costs.map(|c| int(c.into()))).unwrap();
        let mut float = PackingLp::<f64>::new(&costs.map(f64::from)).unwrap();
        let mut last = int(0);
        for cut in cuts {
            exact.add_column(cut);
            float.add_column(cut);
            exact.solve().unwrap();
            float.solve().unwrap();
            assert!(exact.value() >= &last);
            last = exact.value().clone();
            assert!((crate::number::to_f64(&last) - float.value()).abs() < 1e-9);
        }
        let x = exact.cover();
        for cut in cuts {
            let s = cut.iter().fold(int(0), |a, &i| a + &x[i]);
            assert!(s >= int(1));
        }
    }
}
