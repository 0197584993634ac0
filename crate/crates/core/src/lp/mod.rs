//! The covering LP `min Σ c_v x_v` s.t. `Σ_{v∈P} x_v ≥ 1` for every blocker
//! member `P`, `0 ≤ x ≤ 1`, solved by row generation.
//!
//! `Approx(ε)` discovers cuts with the floating kernel and the quantized
//! oracle, then re-solves the pool with the exact kernel and keeps
//! separating until the exact point is accepted; the returned point is
//! `(1+ε)x` clipped to `[0,1]`. `ExactSmallDepth` separates against the
//! enumerated blocker with the exact kernel throughout.

pub mod separation;
pub mod simplex;



use crate::error::{Error, Result};
use crate::exact::{enumerate_blocker_with, finite_rows, ExactLimits};
use crate::model::{FractionalCover, LayeredView, NormalizedInstance, Quality, ScaledDelays};
use crate::number::{int, to_f64, Rational};
use separation::{separate_scaled, Separation};
use simplex::PackingLp;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpMode {
    ExactSmallDepth,
    Approx(Rational),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CutOrigin {
    Quantized,
    Blocker,
}

#[derive(Clone, Debug, Default)]
pub struct CutPool {
    pub cuts: Vec<Vec<usize>>,
    pub origins: Vec<CutOrigin>,
}

impl CutPool {
    pub fn len(&self) -> usize {
        self.cuts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cuts.is_empty()
    }

    fn push(&mut self, cut: Vec<usize>, origin: CutOrigin) {
        self.cuts.push(cut);
        self.origins.push(origin);
    }
}

#[derive(Clone, Debug)]
pub struct LpOptions {
    /// Defaults to `50 n`.
    pub max_cuts: Option<usize>,
    pub limits: ExactLimits,
    /// Violated blocker members added per round in exact mode.
    pub batch: usize,
}

impl Default for LpOptions {
    fn default() -> Self {
        LpOptions { max_cuts: None, limits: ExactLimits::default(), batch: 8 }
    }
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub cover: FractionalCover,
    pub pool: CutPool,
    /// Kernel objective after each solve.
    pub trace: Vec<f64>,
}

pub fn solve_lp(norm: &NormalizedInstance, layered: &LayeredView, mode: &LpMode) -> Result<LpSolution> {
    solve_lp_with(norm, layered, mode, &LpOptions::default())
}

pub fn solve_lp_with(
    norm: &NormalizedInstance,
    layered: &LayeredView,
    mode: &LpMode,
    options: &LpOptions,
) -> Result<LpSolution> {
    let mut run = RowGeneration::new(norm, options)?;
    match mode {
        LpMode::ExactSmallDepth => {
            let blocker = enumerate_blocker_with(norm, &options.limits)?;
            let mut lp = run.kernel::<Rational>()?;
            loop {
                let x = run.solve(&mut lp)?;
                let mut violated: Vec<(Rational, &Vec<usize>)> = blocker
                    .iter()
                    .map(|cut| (cut.iter().fold(int(0), |acc, &v| acc + &x[v]), cut))
                    .filter(|(s, _)| *s < int(1))
                    .collect();
                if violated.is_empty() {
                    return run.finish(x, Quality::Exact);
                }
                violated.sort();
                for (sum, cut) in violated.into_iter().take(options.batch.max(1)) {
                    run.add(&mut lp, cut.clone(), CutOrigin::Blocker, &sum)?;
                }
            }
        }
        LpMode::Approx(eps) => {
            if *eps <= int(0) || *eps > int(1) {
                return Err(Error::InvalidParameter(format!("ε must lie in (0, 1], got {eps}")));
            }
            let depth = layered.depth();
            let mut float = run.kernel::<f64>()?;
            loop {
                let x = run.solve(&mut float)?;
                match separate_scaled(norm, depth, &run.scaled, &x, eps)? {
                    Separation::Accept => break,
                    Separation::Cut(cut) => {
                        let sum = cut.iter().fold(int(0), |acc, &v| acc + &x[v]);
                        run.add(&mut float, cut, CutOrigin::Quantized, &sum)?;
                    }
                }
            }
            let mut exact = run.kernel::<Rational>()?;
            for cut in run.pool.cuts.clone() {
                exact.add_column(&run.support(&cut)?);
            }
            loop {
                let x = run.solve(&mut exact)?;
                match separate_scaled(norm, depth, &run.scaled, &x, eps)? {
                    Separation::Accept => {
                        let one = int(1);
                        let scale = &one + eps;
                        let lifted = x.iter().map(|xv| (xv * &scale).min(one.clone())).collect();
                        return run.finish(lifted, Quality::Approx(eps.clone()));
                    }
                    Separation::Cut(cut) => {
                        let sum = cut.iter().fold(int(0), |acc, &v| acc + &x[v]);
                        run.add(&mut exact, cut, CutOrigin::Quantized, &sum)?;
                    }
                }
            }
        }
    }
}

struct RowGeneration<'a> {
    norm: &'a NormalizedInstance,
    scaled: ScaledDelays,
    row_of: Vec<Option<usize>>,
    capacities: Vec<Rational>,
    pool: CutPool,
    trace: Vec<f64>,
    max_cuts: usize,
}

impl<'a> RowGeneration<'a> {
    fn new(norm: &'a NormalizedInstance, options: &LpOptions) -> Result<Self> {
        let (row_of, capacities) = finite_rows(norm);
        Ok(RowGeneration {
            norm,
            scaled: ScaledDelays::new(norm)?,
            row_of,
            capacities,
            pool: CutPool::default(),
            trace: Vec::new(),
            max_cuts: options.max_cuts.unwrap_or(50 * norm.n().max(1)),
        })
    }

    fn kernel<S: simplex::Scalar>(&self) -> Result<PackingLp<S>> {
        let caps: Vec<S> = self.capacities.iter().map(S::from_rational).collect();
        PackingLp::new(&caps)
    }

    fn support(&self, cut: &[usize]) -> Result<Vec<usize>> {
        let support: Vec<usize> = cut.iter().filter_map(|&v| self.row_of[v]).collect();
        if support.is_empty() {
            return Err(Error::Infeasible(format!(
                "chain through `{}` exceeds the deadline and has no finite-cost job",
                self.norm.id(cut[0])
            )));
        }
        Ok(support)
    }

    fn add<S: simplex::Scalar>(&mut self, lp: &mut PackingLp<S>, cut: Vec<usize>, origin: CutOrigin, sum: &Rational) -> Result<()> {
        if self.pool.len() >= self.max_cuts {
            return Err(Error::IterationCap {
                cap: self.max_cuts,
                cuts: self.pool.len(),
                last_violation: format!("chain with Σx = {sum}"),
            });
        }
        lp.add_column(&self.support(&cut)?);
        self.pool.push(cut, origin);
        Ok(())
    }

    /// Solves the kernel and returns the covering point clipped to `[0, 1]`.
    fn solve<S: simplex::Scalar>(&mut self, lp: &mut PackingLp<S>) -> Result<Vec<Rational>> {
        lp.solve()?;
        self.trace.push(to_f64(&lp.value().to_rational()));
        let duals = lp.cover();
        let one = int(1);
        Ok(self
            .row_of
            .iter()
            .map(|row| match row {
                Some(r) => duals[*r].to_rational().max(int(0)).min(one.clone()),
                None => int(0),
            })
            .collect())
    }

    fn finish(self, x: Vec<Rational>, quality: Quality) -> Result<LpSolution> {
        let cover = FractionalCover::new(self.norm, x, quality)?;
        Ok(LpSolution { cover, pool: self.pool, trace: self.trace })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{covers_all, enumerate_blocker, exact_lp_opt};
    use crate::generators::{gap_job_id, gen_gap_instance};
    use crate::model::{layer, NormJob};
    use crate::number::{ratio, Ext};
    use separation::separate_fractional;

    fn weighted_chain(costs: &[i64]) -> NormalizedInstance {
        let jobs = costs
            .iter()
            .enumerate()
            .map(|(i, &c)| NormJob::new(format!("j{i}"), Ext::int(1), Ext::int(c)))
            .collect();
        let edges = (1..costs.len()).map(|i| (format!("j{}", i - 1), format!("j{i}"))).collect();
        NormalizedInstance::build(jobs, edges, int(2)).unwrap()
    }

    #[test]
    fn all_ones_is_accepted() {
        let (norm, _) = gen_gap_instance(3, 2).unwrap();
        let view = layer(norm.base());
        let x = vec![int(1); norm.n()];
        assert_eq!(separate_fractional(&norm, &view, &x, &ratio(1, 10)).unwrap(), Separation::Accept);
    }

    #[test]
    fn zero_point_cuts_the_slowest_chain() {
        let (norm, _) = gen_gap_instance(3, 2).unwrap();
        let view = layer(norm.base());
        let x = vec![int(0); norm.n()];
        let top: Vec<usize> = (1..=3).map(|i| norm.base().index_of(&gap_job_id(i, 2)).unwrap()).collect();
        let scaled = ScaledDelays::new(&norm).unwrap();
        let witness = separation::quantized_witness(&norm, 3, &scaled, &x, &ratio(1, 10)).unwrap();
        assert_eq!(witness, Some(top.clone()));
        // the witness is shrunk to a two-job sub-chain of delay 4
        let Separation::Cut(cut) = separate_fractional(&norm, &view, &x, &ratio(1, 10)).unwrap() else {
            panic!("expected a cut");
        };
        assert_eq!(cut, top[1..].to_vec());
    }

    #[test]
    fn gap_cover_is_accepted() {
        let (norm, cover) = gen_gap_instance(3, 2).unwrap();
        let view = layer(norm.base());
        assert_eq!(separate_fractional(&norm, &view, &cover.x, &ratio(1, 20)).unwrap(), Separation::Accept);
    }

    #[test]
    fn invalid_eps_is_rejected() {
        let (norm, cover) = gen_gap_instance(3, 2).unwrap();
        let view = layer(norm.base());
        assert!(separate_fractional(&norm, &view, &cover.x, &int(0)).is_err());
        assert!(solve_lp(&norm, &view, &LpMode::Approx(int(2))).is_err());
    }

    #[test]
    fn unconstrained_instance_has_zero_cover() {
        let norm = NormalizedInstance::build(vec![NormJob::new("a", Ext::int(1), Ext::int(1))], vec![], int(3)).unwrap();
        let view = layer(norm.base());
        for mode in [LpMode::ExactSmallDepth, LpMode::Approx(ratio(1, 10))] {
            let sol = solve_lp(&norm, &view, &mode).unwrap();
            assert_eq!(sol.cover.objective, Ext::zero());
            assert!(sol.pool.is_empty());
        }
    }

    #[test]
    fn single_chain_puts_weight_on_cheapest_job() {
        let norm = weighted_chain(&[1, 2, 3]);
        let view = layer(norm.base());
        let sol = solve_lp(&norm, &view, &LpMode::ExactSmallDepth).unwrap();
        assert_eq!(sol.cover.objective, Ext::int(1));
        assert_eq!(sol.cover.x, vec![int(1), int(0), int(0)]);
    }

    #[test]
    fn gap_instance_modes_agree_with_enumeration() {
        let (norm, cover) = gen_gap_instance(3, 2).unwrap();
        let view = layer(norm.base());
        let exact = solve_lp(&norm, &view, &LpMode::ExactSmallDepth).unwrap();
        let reference = exact_lp_opt(&norm).unwrap();
        assert_eq!(exact.cover.objective, reference.objective);
        assert!(exact.cover.objective <= cover.objective);
        let eps = ratio(1, 20);
        let approx = solve_lp(&norm, &view, &LpMode::Approx(eps.clone())).unwrap();
        let bound = reference.objective.mul_rational(&(int(1) + &eps));
        assert!(approx.cover.objective <= bound);
        let blocker = enumerate_blocker(&norm).unwrap();
        assert!(covers_all(&approx.cover.x, &blocker));
        for cut in &approx.pool.cuts {
            assert!(norm.is_chain(cut));
            assert!(norm.exceeds_deadline(&norm.chain_delay(cut)));
        }
        for w in exact.trace.windows(2) {
            assert!(w[1] >= w[0] - 1e-12);
        }
    }

    #[test]
    fn cut_cap_is_reported() {
        let (norm, _) = gen_gap_instance(3, 4).unwrap();
        let view = layer(norm.base());
        let options = LpOptions { max_cuts: Some(1), ..LpOptions::default() };
        let err = solve_lp_with(&norm, &view, &LpMode::Approx(ratio(1, 10)), &options).unwrap_err();
        assert!(matches!(err, Error::IterationCap { .. }));
    }
}
