//! Deterministic k-fold planning: a seeded shuffle of the indices split
//! into k nearly equal chunks (the first `n % k` folds take the extra
//! element).

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::PipelineError;

#[derive(Debug, Clone, PartialEq)]
pub struct FoldPlan {
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    folds: Vec<Vec<usize>>,
}

pub fn kfold(n: usize, k: usize, seed: u64) -> Result<FoldPlan, PipelineError> {
    if k < 2 || k > n {
        return Err(PipelineError::BadFoldCount { k, n });
    }
    let mut indices: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    indices.shuffle(&mut rng);

    let base = n / k;
    let extra = n % k;
    let mut folds = Vec::with_capacity(k);
    let mut at = 0;
    for f in 0..k {
        let size = base + usize::from(f < extra);
        folds.push(indices[at..at + size].to_vec());
        at += size;
    }
    Ok(FoldPlan { n, k, seed, folds })
}

impl FoldPlan {
    pub fn folds(&self) -> &[Vec<usize>] {
        &self.folds
    }

    pub fn test_fold(&self, fold: usize) -> &[usize] {
        &self.folds[fold]
    }

    /// All indices outside the fold, ascending (a canonical order keeps
    /// order-sensitive fits deterministic).
    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .folds
            .iter()
            .enumerate()
            .filter(|(f, _)| *f != fold)
            .flat_map(|(_, idx)| idx.iter().copied())
            .collect();
        out.sort_unstable();
        out
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        self.folds.iter().map(|f| f.len()).collect()
    }
}
