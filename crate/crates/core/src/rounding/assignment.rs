//! Minimum-cost perfect matching on a square matrix by successive shortest
//! augmenting paths with potentials.

use num_traits::{Signed, Zero};

use crate::number::Rational;

/// Returns `perm` with `perm[i]` the column matched to row `i`, minimizing
/// `Σ cost[i][perm[i]]`.
pub fn min_cost_assignment(cost: &[Vec<Rational>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return Vec::new();
    }
    // an upper bound on every reduced path length
    let big = cost.iter().flatten().fold(Rational::zero(), |acc, c| acc + c.abs()) * Rational::from_integer(2.into())
        + Rational::from_integer(1.into());
    // 1-based rows and columns, index 0 is the virtual root
    let mut u = vec![Rational::zero(); n + 1];
    let mut v = vec![Rational::zero(); n + 1];
    let mut row_of = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        row_of[0] = i;
        let mut j0 = 0;
        let mut minv = vec![big.clone(); n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = big.clone();
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = &cost[i0 - 1][j - 1] - &u[i0] - &v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j].clone();
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of[j]] += &delta;
                    v[j] -= &delta;
                } else {
                    minv[j] -= &delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut perm = vec![0; n];
    for j in 1..=n {
        perm[row_of[j] - 1] = j - 1;
    }
    perm
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::{int, ratio};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn brute_force(cost: &[Vec<Rational>]) -> Rational {
        fn rec(cost: &[Vec<Rational>], row: usize, used: &mut Vec<bool>) -> Rational {
            if row == cost.len() {
                return int(0);
            }
            let mut best: Option<Rational> = None;
            for j in 0..cost.len() {
                if !used[j] {
                    used[j] = true;
                    let c = &cost[row][j] + rec(cost, row + 1, used);
                    used[j] = false;
                    if best.as_ref().is_none_or(|b| c < *b) {
                        best = Some(c);
                    }
                }
            }
            best.unwrap()
        }
        rec(cost, 0, &mut vec![false; cost.len()])
    }

    #[test]
    fn matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=6 {
            for _ in 0..20 {
                let cost: Vec<Vec<Rational>> = (0..n)
                    .map(|_| (0..n).map(|_| ratio(rng.gen_range(0..50), rng.gen_range(1..7))).collect())
                    .collect();
                let perm = min_cost_assignment(&cost);
                let mut sorted = perm.clone();
                sorted.sort();
                assert_eq!(sorted, (0..n).collect::<Vec<_>>());
                let total = perm.iter().enumerate().fold(int(0), |acc, (i, &j)| acc + &cost[i][j]);
                assert_eq!(total, brute_force(&cost));
            }
        }
    }
}
