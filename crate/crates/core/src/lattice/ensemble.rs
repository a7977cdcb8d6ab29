use super::profile::DiffusivityProfile;

/// Index maps for the 2K translations and reflections of a period-K profile.
///
/// Entry `e` maps configuration slot `m` to a source slot: the configuration's
/// `m`th value is `source[maps[e][m]]`. The first K maps are cyclic shifts,
/// the last K are shifts of the reversed order.
pub fn symmetry_maps(period: usize) -> Vec<Vec<usize>> {
    let k = period;
    let translations = (0..k).map(move |s| (0..k).map(move |m| (m + s) % k).collect());
    let reflections = (0..k).map(move |s| (0..k).map(move |m| (k - 1 - m + s) % k).collect());
    translations.chain(reflections).collect()
}

/// The 2K translated and reflected orderings of a profile, duplicates merged.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleConfigurationSet {
    configurations: Vec<DiffusivityProfile>,
    multiplicities: Vec<usize>,
}

impl EnsembleConfigurationSet {
    /// A one-member set holding the profile as given.
    pub fn single(profile: &DiffusivityProfile) -> Self {
        Self {
            configurations: vec![profile.clone()],
            multiplicities: vec![1],
        }
    }

    pub fn configurations(&self) -> &[DiffusivityProfile] {
        &self.configurations
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    pub fn total_weight(&self) -> usize {
        self.multiplicities.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.configurations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configurations.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&DiffusivityProfile, usize)> {
        self.configurations.iter().zip(self.multiplicities.iter().copied())
    }
}

pub fn make_ensemble(profile: &DiffusivityProfile) -> EnsembleConfigurationSet {
    let source = profile.values();
    let mut configurations: Vec<DiffusivityProfile> = Vec::new();
    let mut multiplicities: Vec<usize> = Vec::new();
    for map in symmetry_maps(profile.period()) {
        let values: Vec<f64> = map.iter().map(|&m| source[m]).collect();
        match configurations.iter().position(|c| c.values() == values.as_slice()) {
            Some(idx) => multiplicities[idx] += 1,
            None => {
                // values are a permutation of a validated profile
                configurations.push(DiffusivityProfile::new(values).expect("permuted profile"));
                multiplicities.push(1);
            }
        }
    }
    EnsembleConfigurationSet {
        configurations,
        multiplicities,
    }
}
