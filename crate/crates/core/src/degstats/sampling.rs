use rand::seq::index;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::AccountStatus;
use crate::netbuild::DirectedGraph;
use crate::rng::{derive_seed, stream_rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DegreeDirection {
    In,
    Out,
}

impl DegreeDirection {
    pub const BOTH: [DegreeDirection; 2] = [DegreeDirection::Out, DegreeDirection::In];

    pub fn as_str(self) -> &'static str {
        match self {
            DegreeDirection::In => "in",
            DegreeDirection::Out => "out",
        }
    }

    fn degree(self, g: &DirectedGraph, node: u32) -> u32 {
        match self {
            DegreeDirection::In => g.in_degree(node),
            DegreeDirection::Out => g.out_degree(node),
        }
    }
}

/// How many accounts to draw per realization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleSize {
    /// As many as there are IRA accounts in the same category network.
    MatchIra,
    Fixed(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingPlan {
    pub realizations: usize,
    pub sample_size: SampleSize,
    pub seed: u64,
}

impl Default for SamplingPlan {
    fn default() -> Self {
        Self {
            realizations: 1000,
            sample_size: SampleSize::MatchIra,
            seed: 0,
        }
    }
}

/// Mean degree of one status group in each category network.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeSampleVector {
    pub group: AccountStatus,
    pub direction: DegreeDirection,
    pub values: Vec<f64>,
    /// Standard error of each entry across realizations (0 when not sampled).
    pub stderr: Vec<f64>,
    pub realizations: usize,
    /// Accounts drawn per realization, per category network.
    pub sample_sizes: Vec<usize>,
}

fn group_degrees(g: &DirectedGraph, group: AccountStatus, dir: DegreeDirection) -> Vec<u32> {
    (0..g.num_nodes() as u32)
        .filter(|&n| g.status(n) == Some(group))
        .map(|n| dir.degree(g, n))
        .collect()
}

fn mean(v: impl ExactSizeIterator<Item = f64>) -> f64 {
    let n = v.len();
    if n == 0 {
        0.0
    } else {
        v.sum::<f64>() / n as f64
    }
}

/// Averages the group's mean degree over `plan.realizations` random draws in
/// each category network. IRA means are exact because the IRA population is
/// the sample.
///
/// Realization `r` of network `c` uses its own ChaCha stream, so results do
/// not depend on thread scheduling.
pub fn sample_group_degrees(
    graphs: &[(String, &DirectedGraph)],
    group: AccountStatus,
    direction: DegreeDirection,
    plan: &SamplingPlan,
) -> Result<DegreeSampleVector> {
    if plan.realizations == 0 {
        return Err(Error::argument("sampling needs at least one realization"));
    }
    let base = derive_seed(
        plan.seed,
        &format!("degstats:{}:{}", group.as_str(), direction.as_str()),
    );
    let mut values = Vec::with_capacity(graphs.len());
    let mut stderr = Vec::with_capacity(graphs.len());
    let mut sample_sizes = Vec::with_capacity(graphs.len());
    for (c, (label, g)) in graphs.iter().enumerate() {
        let population = group_degrees(g, group, direction);
        if group == AccountStatus::Ira {
            sample_sizes.push(population.len());
            values.push(mean(population.iter().map(|&d| d as f64)));
            stderr.push(0.0);
            continue;
        }
        let size = match plan.sample_size {
            SampleSize::MatchIra => group_degrees(g, AccountStatus::Ira, direction).len(),
            SampleSize::Fixed(k) => k,
        };
        if population.len() < size {
            return Err(Error::validation(format!(
                "undersized population in category network {label}: {} {} accounts, need {size}",
                population.len(),
                group.as_str()
            )));
        }
        sample_sizes.push(size);
        if size == 0 {
            log::warn!(
                "category network {label} has no IRA accounts; {} mean set to 0",
                group.as_str()
            );
            values.push(0.0);
            stderr.push(0.0);
            continue;
        }
        let seed = derive_seed(base, &c.to_string());
        let means: Vec<f64> = (0..plan.realizations)
            .into_par_iter()
            .map(|r| {
                let mut rng = stream_rng(seed, r as u64);
                let picks = index::sample(&mut rng, population.len(), size);
                mean(picks.iter().map(|i| population[i] as f64))
            })
            .collect();
        let m = mean(means.iter().copied());
        let se = if means.len() > 1 {
            let var = means.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (means.len() - 1) as f64;
            (var / means.len() as f64).sqrt()
        } else {
            0.0
        };
        values.push(m);
        stderr.push(se);
    }
    Ok(DegreeSampleVector {
        group,
        direction,
        values,
        stderr,
        realizations: plan.realizations,
        sample_sizes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{StatusLookup, UserIdx};
    use crate::netbuild::GraphKind;

    /// Five verified users with out-degrees 0..=4 and two IRA users.
    fn fixture() -> DirectedGraph {
        let u = UserIdx;
        let mut st = vec![Some(AccountStatus::Verified); 5];
        st.extend([
            Some(AccountStatus::Ira),
            Some(AccountStatus::Ira),
            None,
            None,
            None,
            None,
        ]);
        let mut edges = vec![(u(5), u(6), 1), (u(6), u(0), 1)];
        // user k points at k sinks among 7..=10
        for k in 1..5u32 {
            for t in 0..k {
                edges.push((u(k), u(7 + t), 1));
            }
        }
        DirectedGraph::from_edges(GraphKind::Aggregated, edges, &StatusLookup(st), false)
    }

    fn plan(size: SampleSize, r: usize) -> SamplingPlan {
        SamplingPlan {
            realizations: r,
            sample_size: size,
            seed: 7,
        }
    }

    #[test]
    fn ira_is_exact() {
        let g = fixture();
        let v = sample_group_degrees(
            &[("x".into(), &g)],
            AccountStatus::Ira,
            DegreeDirection::Out,
            &plan(SampleSize::MatchIra, 10),
        )
        .unwrap();
        assert_eq!(v.values, vec![1.0]);
        assert_eq!(v.stderr, vec![0.0]);
    }

    #[test]
    fn exhaustive_draw() {
        let g = fixture();
        let v = sample_group_degrees(
            &[("x".into(), &g)],
            AccountStatus::Verified,
            DegreeDirection::Out,
            &plan(SampleSize::Fixed(5), 50),
        )
        .unwrap();
        assert!((v.values[0] - 2.0).abs() < 1e-12);
        assert!(v.stderr[0].abs() < 1e-12);
    }

    #[test]
    fn pairs_converge_to_enumerated_mean() {
        let g = fixture();
        let degrees = [0.0, 1.0, 2.0, 3.0, 4.0];
        let mut total = 0.0;
        let mut count = 0.0;
        for a in 0..5 {
            for b in a + 1..5 {
                total += (degrees[a] + degrees[b]) / 2.0;
                count += 1.0;
            }
        }
        let expected = total / count;
        let v = sample_group_degrees(
            &[("x".into(), &g)],
            AccountStatus::Verified,
            DegreeDirection::Out,
            &plan(SampleSize::MatchIra, 1000),
        )
        .unwrap();
        assert_eq!(v.sample_sizes, vec![2]);
        assert!((v.values[0] - expected).abs() <= 3.0 * v.stderr[0]);
        let again = sample_group_degrees(
            &[("x".into(), &g)],
            AccountStatus::Verified,
            DegreeDirection::Out,
            &plan(SampleSize::MatchIra, 1000),
        )
        .unwrap();
        assert_eq!(v, again);
    }

    #[test]
    fn undersized_population_names_category() {
        let g = fixture();
        let err = sample_group_degrees(
            &[("fake".into(), &g)],
            AccountStatus::Suspended,
            DegreeDirection::Out,
            &plan(SampleSize::MatchIra, 10),
        )
        .unwrap_err();
        assert!(err.to_string().contains("fake"));
    }
}
