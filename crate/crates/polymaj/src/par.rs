//! Parallel drivers. Work is cut into fixed chunks whose results are
//! merged by associative, order-free reductions, so every result is the
//! same for any thread count and equals the sequential core function.

use std::ops::Range;

use polymaj_core::compiler::{ErrorProfile, ProbPolyRecipe};
use polymaj_core::rng::derive_seed;
use polymaj_core::stats::{Estimate, Z99};
use polymaj_core::verify::{
    am_certificate, exact_agreements, exact_block_count, mc_agreements, mc_block_count, min_approx_degree_with,
    scan_span, AgreementMode, AmCertificate, BoolFn, DegreeCertificate, InputDist, Majority, SpanBest,
};
use polymaj_core::{Formula, Result, TruthTable};
use rayon::prelude::*;

/// Blocks of 64 inputs per task.
const BLOCK_CHUNK: u64 = 64;
/// Polynomial samples per task.
const SAMPLE_CHUNK: u64 = 32;
/// Spans are split into `2^SPAN_SPLIT_BITS` Gray-index ranges.
const SPAN_SPLIT_BITS: usize = 8;

fn chunks(total: u64, size: u64) -> impl ParallelIterator<Item = Range<u64>> {
    (0..total.div_ceil(size)).into_par_iter().map(move |c| c * size..((c + 1) * size).min(total))
}

fn sum_chunks(total: u64, size: u64, f: impl Fn(Range<u64>) -> Result<u64> + Sync + Send) -> Result<u64> {
    chunks(total, size).map(f).try_reduce(|| 0, |a, b| Ok(a + b))
}

/// Parallel [`polymaj_core::verify::agreement_on`].
pub fn agreement_on<F, G>(f: &F, g: &G, mode: AgreementMode, dist: &InputDist) -> Result<Estimate>
where
    F: BoolFn + Sync,
    G: BoolFn + Sync,
{
    match mode {
        AgreementMode::Exact => {
            let n = f.num_vars();
            let blocks = exact_block_count(n);
            // Let the core check arity and caps before fanning out.
            exact_agreements(f, g, 0..0)?;
            let a = sum_chunks(blocks, BLOCK_CHUNK, |r| exact_agreements(f, g, r))?;
            Ok(Estimate::exact(a, 1u64 << n))
        }
        AgreementMode::MonteCarlo { trials, seed } => {
            mc_agreements(f, g, dist, seed, trials, 0..0)?;
            let a = sum_chunks(mc_block_count(trials), BLOCK_CHUNK, |r| mc_agreements(f, g, dist, seed, trials, r))?;
            Ok(Estimate::wilson(a, trials, Z99))
        }
    }
}

pub fn agreement<F, G>(f: &F, g: &G, mode: AgreementMode) -> Result<Estimate>
where
    F: BoolFn + Sync,
    G: BoolFn + Sync,
{
    agreement_on(f, g, mode, &InputDist::Uniform)
}

/// Parallel [`polymaj_core::verify::certify_approx_majority`].
pub fn certify_approx_majority<F: BoolFn + Sync>(c: &F, eps: f64, mode: AgreementMode) -> Result<AmCertificate> {
    let n = c.num_vars();
    let a = agreement(c, &Majority(n), mode)?;
    Ok(am_certificate(n, eps, mode, a))
}

/// Parallel [`polymaj_core::verify::min_approx_degree`]: each span is
/// scanned as independent Gray-index ranges and the best candidates are
/// merged, which keeps the tie-break of the sequential scan.
pub fn min_approx_degree(f: &TruthTable, eps: f64) -> Result<DegreeCertificate> {
    min_approx_degree_with(f, eps, |target, basis| {
        let bits = basis.len().min(SPAN_SPLIT_BITS);
        let len = 1u64 << basis.len();
        let part = len >> bits;
        (0..1u64 << bits)
            .into_par_iter()
            .map(|k| scan_span(target, basis, k * part..(k + 1) * part))
            .reduce(|| SpanBest::NONE, SpanBest::merge)
    })
}

/// Parallel [`ProbPolyRecipe::error_profile`] over samples `0..trials`.
pub fn error_profile(recipe: &ProbPolyRecipe, target: &TruthTable, seed: u64, trials: u64) -> Result<ErrorProfile> {
    let n = target.num_vars();
    recipe.error_profile(target, seed, 0, 0)?;
    chunks(trials, SAMPLE_CHUNK).map(|r| recipe.error_profile(target, seed, r.start, r.end - r.start)).try_reduce(
        || ErrorProfile::empty(n),
        |mut a, b| {
            a.merge(&b);
            Ok(a)
        },
    )
}

/// Per-input mistakes of samples `0..trials` at the given inputs, for
/// formulas too wide for a full table. Sample `i` is the draw of seed
/// `derive_seed(seed, i)`, the same polynomial `error_profile` uses.
pub fn sampled_mistakes(
    recipe: &ProbPolyRecipe,
    f: &Formula,
    inputs: &[Vec<bool>],
    seed: u64,
    trials: u64,
) -> Vec<u64> {
    let want: Vec<bool> = inputs.iter().map(|x| f.eval(x)).collect();
    (0..trials)
        .into_par_iter()
        .fold(
            || vec![0u64; inputs.len()],
            |mut acc, i| {
                let draw = recipe.draw(derive_seed(seed, i));
                for ((x, w), m) in inputs.iter().zip(&want).zip(acc.iter_mut()) {
                    *m += (draw.eval(x) != *w) as u64;
                }
                acc
            },
        )
        .reduce(
            || vec![0u64; inputs.len()],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        )
}

#[cfg(test)]
mod tests {
    use super::*;
    use polymaj_core::circuit::parse_formula;
    use polymaj_core::compiler::compile_formula;
    use polymaj_core::verify;

    fn pool(threads: usize) -> rayon::ThreadPool {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap()
    }

    #[test]
    fn agreement_matches_core_for_any_thread_count() {
        let t = TruthTable::from_fn(9, |i| (i * 2654435761) >> 7 & 1 == 1);
        for mode in [AgreementMode::Exact, AgreementMode::MonteCarlo { trials: 10_000, seed: 5 }] {
            let want = verify::agreement(&t, &Majority(9), mode).unwrap();
            for threads in [1, 3, 8] {
                assert_eq!(pool(threads).install(|| agreement(&t, &Majority(9), mode)).unwrap(), want);
            }
        }
        assert!(agreement(&TruthTable::zeros(3), &Majority(4), AgreementMode::Exact).is_err());
    }

    #[test]
    fn degree_matches_core() {
        for w in [0xe8u64, 0x6b, 0x17, 0x80] {
            let t = TruthTable::from_words(3, vec![w]).unwrap();
            for eps in [0.0, 0.125, 0.25] {
                assert_eq!(min_approx_degree(&t, eps).unwrap(), verify::min_approx_degree(&t, eps).unwrap());
            }
        }
        let maj5 = TruthTable::majority(5);
        for threads in [1, 4] {
            let c = pool(threads).install(|| min_approx_degree(&maj5, 0.125)).unwrap();
            assert_eq!(c, verify::min_approx_degree(&maj5, 0.125).unwrap());
        }
    }

    #[test]
    fn profile_matches_core() {
        let f = parse_formula("(or (and x0 x1) (and x2 x3) x4)").unwrap();
        let r = compile_formula(&f).unwrap();
        let t = f.truth_table(5).unwrap();
        let want = r.error_profile(&t, 9, 0, 200).unwrap();
        for threads in [1, 5] {
            assert_eq!(pool(threads).install(|| error_profile(&r, &t, 9, 200)).unwrap(), want);
        }
        let inputs: Vec<Vec<bool>> = (0..32).map(|i| polymaj_core::truth::assignment(5, i)).collect();
        let m = sampled_mistakes(&r, &f, &inputs, 9, 200);
        assert_eq!(m, want.mistakes);
    }
}
