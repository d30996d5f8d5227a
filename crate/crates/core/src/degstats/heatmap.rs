use serde::Serialize;

use super::ks::{ks_two_sample, KsResult};
use super::sampling::{DegreeDirection, DegreeSampleVector};
use crate::error::{Error, Result};
use crate::ingest::AccountStatus;

/// Pairwise KS outcomes between the groups' sampled-degree vectors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KsHeatmap {
    pub direction: DegreeDirection,
    pub alpha: f64,
    pub groups: Vec<AccountStatus>,
    /// Row-major `groups × groups`; diagonal holds `D = 0, p = 1`.
    pub cells: Vec<Vec<KsResult>>,
}

impl KsHeatmap {
    pub fn reject(&self, a: AccountStatus, b: AccountStatus) -> Option<bool> {
        let i = self.groups.iter().position(|&g| g == a)?;
        let j = self.groups.iter().position(|&g| g == b)?;
        Some(self.cells[i][j].reject)
    }

    pub fn p_value(&self, a: AccountStatus, b: AccountStatus) -> Option<f64> {
        let i = self.groups.iter().position(|&g| g == a)?;
        let j = self.groups.iter().position(|&g| g == b)?;
        Some(self.cells[i][j].p_value)
    }
}

/// Runs a KS test for every pair of vectors sharing `direction`.
pub fn pairwise_ks_heatmap(
    vectors: &[DegreeSampleVector],
    direction: DegreeDirection,
    alpha: f64,
) -> Result<KsHeatmap> {
    let chosen: Vec<&DegreeSampleVector> = vectors.iter().filter(|v| v.direction == direction).collect();
    if chosen.is_empty() {
        return Err(Error::argument(format!(
            "no {}-degree vectors to compare",
            direction.as_str()
        )));
    }
    let mut cells = Vec::with_capacity(chosen.len());
    for a in &chosen {
        let mut row = Vec::with_capacity(chosen.len());
        for b in &chosen {
            let r = if a.group == b.group {
                ks_two_sample(&a.values, &a.values, alpha)?
            } else {
                ks_two_sample(&a.values, &b.values, alpha)?
            };
            row.push(r);
        }
        cells.push(row);
    }
    Ok(KsHeatmap {
        direction,
        alpha,
        groups: chosen.iter().map(|v| v.group).collect(),
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vector(group: AccountStatus, values: Vec<f64>) -> DegreeSampleVector {
        DegreeSampleVector {
            group,
            direction: DegreeDirection::Out,
            stderr: vec![0.0; values.len()],
            sample_sizes: vec![1; values.len()],
            values,
            realizations: 1,
        }
    }

    #[test]
    fn identical_vectors_never_reject() {
        let v: Vec<_> = AccountStatus::ALL
            .iter()
            .map(|&g| vector(g, vec![1.0, 2.0, 3.0, 5.0, 8.0, 13.0, 21.0, 34.0]))
            .collect();
        let h = pairwise_ks_heatmap(&v, DegreeDirection::Out, 0.05).unwrap();
        assert!(h.cells.iter().flatten().all(|c| !c.reject && c.p_value == 1.0));
    }

    #[test]
    fn symmetric_with_quiet_diagonal() {
        let v = vec![
            vector(AccountStatus::Ira, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]),
            vector(
                AccountStatus::Verified,
                vec![11.0, 12.0, 13.0, 14.0, 15.0, 16.0, 17.0, 18.0],
            ),
            vector(AccountStatus::Suspended, vec![1.5, 2.5, 3.5, 4.5, 5.5, 6.5, 7.5, 8.5]),
        ];
        let h = pairwise_ks_heatmap(&v, DegreeDirection::Out, 0.05).unwrap();
        for i in 0..3 {
            assert!(!h.cells[i][i].reject);
            for j in 0..3 {
                assert_eq!(h.cells[i][j], h.cells[j][i]);
            }
        }
        assert_eq!(h.reject(AccountStatus::Ira, AccountStatus::Verified), Some(true));
        assert_eq!(h.reject(AccountStatus::Ira, AccountStatus::Suspended), Some(false));
        assert!(pairwise_ks_heatmap(&v, DegreeDirection::In, 0.05).is_err());
    }
}
