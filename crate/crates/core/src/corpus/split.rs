use rand::seq::SliceRandom;

use super::{CorpusError, Manifest, Result};
use crate::rng::{stream_rng, streams};

pub const DEFAULT_TRAIN_FRACTION: f64 = 2.0 / 3.0;

/// Per-class seeded partition of item positions. Each class sends
/// `round(n * fraction)` items to train, clamped so both sides get at least
/// one. Both index lists come back in ascending order.
pub fn stratified_indices(
    classes: &[usize],
    labels: &[String],
    fraction: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(CorpusError::InvalidFraction(fraction));
    }
    let mut by_class = vec![Vec::new(); labels.len()];
    for (i, &c) in classes.iter().enumerate() {
        let bucket = by_class.get_mut(c).ok_or(CorpusError::DimensionMismatch {
            expected: labels.len(),
            actual: c + 1,
        })?;
        bucket.push(i);
    }
    if let Some((c, members)) = by_class.iter().enumerate().find(|(_, m)| m.len() < 2) {
        return Err(CorpusError::ClassTooSmall {
            label: labels[c].clone(),
            count: members.len(),
        });
    }
    let mut rng = stream_rng(seed, streams::SPLIT);
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for mut members in by_class {
        let n = members.len();
        let n_train = ((n as f64 * fraction).round() as usize).clamp(1, n - 1);
        members.shuffle(&mut rng);
        train.extend_from_slice(&members[..n_train]);
        test.extend_from_slice(&members[n_train..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// Splits a manifest into `(train, test)`; see [`stratified_indices`].
pub fn stratified_split(m: &Manifest, fraction: f64, seed: u64) -> Result<(Manifest, Manifest)> {
    let (train, test) = stratified_indices(&m.class_indices(), m.labels(), fraction, seed)?;
    Ok((m.subset(&train), m.subset(&test)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn manifest(classes: usize, per_class: usize) -> Manifest {
        let items = (0..classes)
            .flat_map(|c| {
                (0..per_class).map(move |i| (format!("c{c}/{i}.wav").into(), format!("w{c:02}")))
            })
            .collect();
        Manifest::new(items).unwrap()
    }

    #[test]
    fn table_counts() {
        let m = manifest(60, 30);
        let (train, test) = stratified_split(&m, DEFAULT_TRAIN_FRACTION, 7).unwrap();
        assert_eq!((train.len(), test.len()), (1200, 600));
        assert!(train.class_counts().iter().all(|&c| c == 20));
        assert!(test.class_counts().iter().all(|&c| c == 10));
    }

    #[test]
    fn disjoint_and_deterministic() {
        let m = manifest(5, 9);
        let (a, b) = stratified_split(&m, 0.5, 3).unwrap();
        let pa: HashSet<_> = a.entries().iter().map(|e| &e.path).collect();
        assert!(b.entries().iter().all(|e| !pa.contains(&e.path)));
        assert_eq!(stratified_split(&m, 0.5, 3).unwrap(), (a, b));
    }

    #[test]
    fn guards() {
        let m = manifest(3, 4);
        for f in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(matches!(
                stratified_split(&m, f, 0),
                Err(CorpusError::InvalidFraction(_))
            ));
        }
        let small = Manifest::new(vec![
            ("a1".into(), "a".into()),
            ("a2".into(), "a".into()),
            ("b1".into(), "b".into()),
        ])
        .unwrap();
        assert!(matches!(
            stratified_split(&small, 0.5, 0),
            Err(CorpusError::ClassTooSmall { ref label, count: 1 }) if label == "b"
        ));
    }

    #[test]
    fn extreme_fraction_keeps_both_sides() {
        let (train, test) = stratified_split(&manifest(2, 2), 0.99, 0).unwrap();
        assert_eq!(train.class_counts(), vec![1, 1]);
        assert_eq!(test.class_counts(), vec![1, 1]);
    }

    proptest! {
        #[test]
        fn conservation(
            counts in prop::collection::vec(2usize..15, 1..8),
            fraction in 0.01f64..0.99,
            seed in any::<u64>(),
        ) {
            let labels: Vec<String> = (0..counts.len()).map(|c| format!("{c}")).collect();
            let classes: Vec<usize> = counts.iter().enumerate().flat_map(|(c, &n)| std::iter::repeat_n(c, n)).collect();
            let (train, test) = stratified_indices(&classes, &labels, fraction, seed).unwrap();
            prop_assert_eq!(train.len() + test.len(), classes.len());
            let mut all: Vec<usize> = train.iter().chain(&test).copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..classes.len()).collect::<Vec<_>>());
            for (c, &n) in counts.iter().enumerate() {
                let tr = train.iter().filter(|&&i| classes[i] == c).count();
                let te = test.iter().filter(|&&i| classes[i] == c).count();
                prop_assert_eq!(tr + te, n);
                prop_assert!(tr >= 1 && te >= 1);
            }
        }
    }
}
