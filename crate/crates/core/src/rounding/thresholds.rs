//! Random thresholds `a_1, …, a_d` with `Σ a_i = 1` and `a_p` uniform in
//! `[2(p-1)/d², 2p/d²]`.
//!
//! All thresholds live on the integer grid `a = g / D` with
//! `D = 2·3^L·d²`, so sums are exact. Positions `1, 2, 3` form a triple
//! when `d` is odd and every other position is paired with its neighbour;
//! groups use independent randomness.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::number::Rational;

/// Base-3 digits used by the triple sampler.
pub const DIGITS: u32 = 40;

const PERMUTATIONS: [[u8; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

fn pow3(k: u32) -> i128 {
    3i128.pow(k)
}

/// The grid denominator `D = 2·3^L·d²`.
pub fn grid_denominator(d: usize) -> i128 {
    2 * pow3(DIGITS) * (d * d) as i128
}

/// Grid bounds `[lo, hi]` of the interval of position `p` (1-based).
pub fn interval_grid(p: usize) -> (i128, i128) {
    let unit = 4 * pow3(DIGITS);
    (unit * (p as i128 - 1), unit * p as i128)
}

/// The interval of position `p` as rationals.
pub fn interval(p: usize, d: usize) -> (Rational, Rational) {
    let (lo, hi) = interval_grid(p);
    let den = grid_denominator(d);
    (Rational::new(lo.into(), den.into()), Rational::new(hi.into(), den.into()))
}

/// Numerators over `3^(L+1)` of the sorted triple `(x, y, z)` built from one
/// digit permutation per place. Each number's tail beyond the last digit is
/// set to its conditional expectation, so the three numerators sum to
/// `3^(L+1)` exactly.
pub fn triple_numerators(digits: &[[u8; 3]]) -> [i128; 3] {
    let l = digits.len() as u32;
    let mut nums = [0i128; 3];
    for (place, perm) in digits.iter().enumerate() {
        let weight = pow3(l - 1 - place as u32);
        for (k, &digit) in perm.iter().enumerate() {
            nums[k] += digit as i128 * weight;
        }
    }
    // value' = num/3^l + 3^-l/2, and x = (2/3) value'
    let mut out = nums.map(|num| 2 * num + 1);
    out.sort_unstable();
    out
}

/// The triple `(x, y, z)` as rationals for the given digit permutations.
pub fn triple_from_digits(digits: &[[u8; 3]]) -> [Rational; 3] {
    let den = pow3(digits.len() as u32 + 1);
    triple_numerators(digits).map(|num| Rational::new(num.into(), den.into()))
}

fn sample_digits<R: Rng + ?Sized>(rng: &mut R) -> Vec<[u8; 3]> {
    (0..DIGITS).map(|_| PERMUTATIONS[rng.gen_range(0..6)]).collect()
}

/// `x ∈ [0, 2/9]`, `y ∈ [2/9, 4/9]`, `z ∈ [4/9, 6/9]` with `x + y + z = 1`.
pub fn sample_triple<R: Rng + ?Sized>(rng: &mut R) -> [Rational; 3] {
    triple_from_digits(&sample_digits(rng))
}

/// Thresholds indexed by position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PositionThresholds {
    pub d: usize,
    /// Grid numerator of position `p` at index `p - 1`.
    pub grid: Vec<i128>,
    /// Groups of 1-based positions.
    pub groups: Vec<Vec<usize>>,
}

impl PositionThresholds {
    pub fn value(&self, p: usize) -> Rational {
        Rational::new(self.grid[p - 1].into(), grid_denominator(self.d).into())
    }

    pub fn group_of(&self, p: usize) -> &[usize] {
        self.groups.iter().find(|g| g.contains(&p)).expect("every position has a group")
    }

    /// Grid numerator of the fixed sum of a group.
    pub fn group_sum(&self, group: &[usize]) -> i128 {
        group.iter().map(|&p| self.grid[p - 1]).sum()
    }
}

/// The position groups for depth `d`.
pub fn position_groups(d: usize) -> Vec<Vec<usize>> {
    let mut groups = Vec::new();
    let mut p = 1;
    if d % 2 == 1 {
        groups.push(vec![1, 2, 3]);
        p = 4;
    }
    while p < d {
        groups.push(vec![p, p + 1]);
        p += 2;
    }
    groups
}

pub fn sample_thresholds<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<PositionThresholds> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("thresholds need d ≥ 2, got {d}")));
    }
    let groups = position_groups(d);
    let mut grid = vec![0i128; d];
    for group in &groups {
        if group.len() == 3 {
            let nums = triple_numerators(&sample_digits(rng));
            for (k, &p) in group.iter().enumerate() {
                grid[p - 1] = 6 * nums[k];
            }
        } else {
            let p = group[0];
            let (lo, hi) = interval_grid(p);
            // the open lower end keeps every threshold positive
            let g = rng.gen_range(lo + 1..=hi);
            grid[p - 1] = g;
            grid[p] = 8 * p as i128 * pow3(DIGITS) - g;
        }
    }
    Ok(PositionThresholds { d, grid, groups })
}

/// Thresholds assigned to layers through a permutation `σ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThresholdAssignment {
    /// `sigma[i - 1]` is the position of layer `i`.
    pub sigma: Vec<usize>,
    pub positions: PositionThresholds,
}

impl ThresholdAssignment {
    pub fn d(&self) -> usize {
        self.sigma.len()
    }

    /// Grid numerator of the threshold of layer `i` (1-based).
    pub fn grid(&self, i: usize) -> i128 {
        self.positions.grid[self.sigma[i - 1] - 1]
    }

    pub fn threshold(&self, i: usize) -> Rational {
        self.positions.value(self.sigma[i - 1])
    }

    /// Layers whose positions share a group with the position of layer `i`.
    pub fn group_of_layer(&self, i: usize) -> Vec<usize> {
        let group = self.positions.group_of(self.sigma[i - 1]);
        (1..=self.d()).filter(|&l| group.contains(&self.sigma[l - 1])).collect()
    }
}

pub fn random_permutation<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<usize> {
    let mut sigma: Vec<usize> = (1..=d).collect();
    sigma.shuffle(rng);
    sigma
}

pub fn sample_assignment<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<ThresholdAssignment> {
    let sigma = random_permutation(d, rng);
    let positions = sample_thresholds(d, rng)?;
    Ok(ThresholdAssignment { sigma, positions })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::{int, ratio};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn triple_sums_to_one_and_respects_intervals() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let [x, y, z] = sample_triple(&mut rng);
            assert_eq!(&x + &y + &z, int(1));
            assert!(x >= int(0) && x <= ratio(2, 9));
            assert!(y >= ratio(2, 9) && y <= ratio(4, 9));
            assert!(z >= ratio(4, 9) && z <= ratio(6, 9));
        }
    }

    #[test]
    fn extreme_digit_path() {
        use num_traits::Signed;
        let digits = vec![[0, 1, 2]; DIGITS as usize];
        let [x, y, z] = triple_from_digits(&digits);
        let tol = Rational::new(1.into(), pow3(DIGITS).into());
        assert!((x - int(0)).abs() < tol);
        assert!((y - ratio(1, 3)).abs() < tol);
        assert!((z - ratio(2, 3)).abs() < tol);
    }

    #[test]
    fn small_depth_groups() {
        assert_eq!(position_groups(2), vec![vec![1, 2]]);
        assert_eq!(position_groups(4), vec![vec![1, 2], vec![3, 4]]);
        assert_eq!(position_groups(5), vec![vec![1, 2, 3], vec![4, 5]]);
        assert!(sample_thresholds(1, &mut ChaCha8Rng::seed_from_u64(0)).is_err());
    }

    #[test]
    fn thresholds_sum_to_one_in_their_intervals() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for d in 2..=9 {
            for _ in 0..50 {
                let t = sample_thresholds(d, &mut rng).unwrap();
                assert_eq!(t.grid.iter().sum::<i128>(), grid_denominator(d));
                for p in 1..=d {
                    let (lo, hi) = interval_grid(p);
                    assert!(t.grid[p - 1] > 0 && lo <= t.grid[p - 1] && t.grid[p - 1] <= hi);
                }
            }
        }
        let t = sample_thresholds(4, &mut rng).unwrap();
        assert_eq!(t.value(1) + t.value(2), ratio(1, 4));
        assert_eq!(t.value(3) + t.value(4), ratio(3, 4));
        let t = sample_thresholds(5, &mut rng).unwrap();
        assert_eq!(t.value(1) + t.value(2) + t.value(3), ratio(9, 25));
        assert_eq!(t.value(4) + t.value(5), ratio(16, 25));
    }

    #[test]
    fn layer_groups_follow_sigma() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let positions = sample_thresholds(5, &mut rng).unwrap();
        let a = ThresholdAssignment { sigma: vec![3, 5, 2, 1, 4], positions };
        assert_eq!(a.group_of_layer(1), vec![1, 3, 4]);
        assert_eq!(a.group_of_layer(2), vec![2, 5]);
        assert_eq!(a.threshold(2), a.positions.value(5));
    }
}
