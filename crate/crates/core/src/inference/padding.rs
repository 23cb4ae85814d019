use crate::types::{Bag, Episode, FeatureVector, ItemLabel};

/// Appends single-item dummy bags until the bag count is a power of two.
///
/// Dummy items are zero vectors labeled background (when the episode is
/// labeled). Their potentials are only neutral when the provider masks them
/// out, e.g. through [`crate::potentials::Masked`] with the returned mask,
/// which is `true` for real bags.
pub fn pad_to_power_of_two(episode: &Episode) -> (Episode, Vec<bool>) {
    let n = episode.num_bags();
    let padded = n.next_power_of_two();
    let mut out = episode.clone();
    let labeled = episode.positive_bags().iter().all(|b| b.labels().is_some());
    for _ in n..padded {
        let labels = labeled.then(|| vec![ItemLabel::background()]);
        let bag = Bag::new(vec![FeatureVector::zeros(episode.dim())], labels)
            .expect("single-item bag is valid");
        out.push_bag(bag);
    }
    let mask = (0..padded).map(|i| i < n).collect();
    (out, mask)
}
