//! Stratified training subsets `D_n`.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{DataError, Dataset, Provenance, NUM_CLASSES};

/// Draws, per class, a disjoint sequence of chunks of the requested sizes
/// without replacement. Returns `out[chunk]` = sorted row indices.
fn stratified_chunks(
    labels: &[u8],
    per_class: &[usize],
    seed: u64,
) -> Result<Vec<Vec<usize>>, DataError> {
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); NUM_CLASSES];
    for (i, &l) in labels.iter().enumerate() {
        by_class[l as usize].push(i);
    }
    let needed: usize = per_class.iter().sum();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![Vec::new(); per_class.len()];
    for (class, members) in by_class.iter_mut().enumerate() {
        if members.len() < needed {
            return Err(DataError::InsufficientClassCount {
                class: class as u8,
                available: members.len(),
                requested: needed,
            });
        }
        members.shuffle(&mut rng);
        let mut at = 0;
        for (chunk, &k) in per_class.iter().enumerate() {
            out[chunk].extend_from_slice(&members[at..at + k]);
            at += k;
        }
    }
    for chunk in &mut out {
        chunk.sort_unstable();
    }
    Ok(out)
}

/// A training subset plus everything left over.
#[derive(Debug, Clone)]
pub struct Split {
    pub train: Dataset,
    pub validation: Option<Dataset>,
    pub test: Dataset,
}

/// Draws `n/10` training images per class (and optionally `validation/10`
/// further images per class) from `train_full`. The test set is `test_full`
/// followed by every unused training image, in original order.
pub fn stratified_split(
    train_full: &Dataset,
    test_full: &Dataset,
    n: usize,
    validation: usize,
    seed: u64,
) -> Result<Split, DataError> {
    if n == 0 || n % NUM_CLASSES != 0 {
        return Err(DataError::IndivisibleSize(n));
    }
    if validation % NUM_CLASSES != 0 {
        return Err(DataError::IndivisibleSize(validation));
    }
    let chunks = stratified_chunks(
        &train_full.labels,
        &[n / NUM_CLASSES, validation / NUM_CLASSES],
        seed,
    )?;
    let mut used = vec![false; train_full.len()];
    for &i in chunks.iter().flatten() {
        used[i] = true;
    }
    let rest: Vec<usize> = (0..train_full.len()).filter(|&i| !used[i]).collect();
    let tag = if validation > 0 { format!("D{n}-v{validation}") } else { format!("D{n}") };
    let train = train_full.select(&chunks[0], Provenance::new("mnist-train", Some(seed), tag.clone()));
    let validation_ds = (validation > 0).then(|| {
        train_full.select(&chunks[1], Provenance::new("mnist-train", Some(seed), format!("{tag}-validation")))
    });
    let mut test_prov = Provenance::new("mnist-test+train-remainder", Some(seed), format!("{tag}-test"));
    test_prov.normalization = train_full.provenance.normalization.clone();
    let test = test_full.concat(&train_full.select(&rest, test_prov.clone()), test_prov)?;
    let mut train = train;
    train.provenance.normalization = train_full.provenance.normalization.clone();
    Ok(Split { train, validation: validation_ds, test })
}

/// `(train, test)` pair without a validation split.
pub fn stratified_subset(
    train_full: &Dataset,
    test_full: &Dataset,
    n: usize,
    seed: u64,
) -> Result<(Dataset, Dataset), DataError> {
    let s = stratified_split(train_full, test_full, n, 0, seed)?;
    Ok((s.train, s.test))
}

/// Stratified sample of `n` rows of `ds` (`n/10` per class).
pub fn stratified_sample(ds: &Dataset, n: usize, seed: u64) -> Result<Dataset, DataError> {
    if n % NUM_CLASSES != 0 {
        return Err(DataError::IndivisibleSize(n));
    }
    let chunks = stratified_chunks(&ds.labels, &[n / NUM_CLASSES], seed)?;
    let mut prov = ds.provenance.clone();
    prov.size_tag = format!("{}-sample{n}", prov.size_tag);
    prov.seed = Some(seed);
    Ok(ds.select(&chunks[0], prov))
}
