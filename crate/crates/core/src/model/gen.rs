//! Seeded random instance generator.
//!
//! Step 1 lays a random Hamiltonian cycle over the nodes, which is the
//! minimal arc set giving every node one incoming and one outgoing arc.
//! Step 2 adds the remaining arcs uniformly, rejecting placements that
//! would push a node past the degree limit.

use super::{Arc, MpbsInstance};
use crate::rat::{rat, Rat};
use crate::{Error, Result};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct GenParams {
    pub n_arcs: usize,
    pub n_nodes: usize,
    pub weight_lo: i64,
    pub weight_hi: i64,
    pub fl: Rat,
    pub cap: Rat,
    pub max_degree: usize,
    pub seed: u64,
}

impl GenParams {
    pub fn paper_defaults(n_arcs: usize, n_nodes: usize, seed: u64) -> Self {
        GenParams {
            n_arcs,
            n_nodes,
            weight_lo: 1,
            weight_hi: 18,
            fl: rat(-7),
            cap: rat(8),
            max_degree: 5,
            seed,
        }
    }
}

pub fn generate_instance(p: &GenParams) -> Result<MpbsInstance> {
    if p.n_nodes < 2 || p.n_arcs < p.n_nodes {
        return Err(Error::GeneratorInfeasible(format!(
            "need n_arcs >= n_nodes >= 2 (got {} arcs, {} nodes)",
            p.n_arcs, p.n_nodes
        )));
    }
    if p.max_degree < 2 {
        return Err(Error::GeneratorInfeasible(format!(
            "max_degree must be >= 2 (got {})",
            p.max_degree
        )));
    }
    if 2 * p.n_arcs > p.n_nodes * p.max_degree {
        return Err(Error::GeneratorInfeasible(format!(
            "{} arcs need {} arc endpoints but {} nodes of degree <= {} offer only {}",
            p.n_arcs,
            2 * p.n_arcs,
            p.n_nodes,
            p.max_degree,
            p.n_nodes * p.max_degree
        )));
    }
    if p.weight_lo < 1 || p.weight_hi < p.weight_lo {
        return Err(Error::GeneratorInfeasible(format!(
            "weight range [{}, {}] is empty or non-positive",
            p.weight_lo, p.weight_hi
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let n = p.n_nodes as u32;
    let mut order: Vec<u32> = (0..n).collect();
    order.shuffle(&mut rng);

    let mut degree = vec![2usize; p.n_nodes];
    let mut ends: Vec<(u32, u32)> = (0..p.n_nodes)
        .map(|i| (order[i], order[(i + 1) % p.n_nodes]))
        .collect();

    let mut rejections = 0usize;
    let budget = 10_000 + 1_000 * p.n_arcs;
    while ends.len() < p.n_arcs {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u == v || degree[u as usize] >= p.max_degree || degree[v as usize] >= p.max_degree {
            rejections += 1;
            if rejections > budget {
                return Err(Error::GeneratorStuck(rejections));
            }
            continue;
        }
        degree[u as usize] += 1;
        degree[v as usize] += 1;
        ends.push((u, v));
    }

    let arcs = ends
        .into_iter()
        .enumerate()
        .map(|(id, (origin, target))| Arc {
            id: id as u32,
            origin,
            target,
            weight: rat(rng.gen_range(p.weight_lo..=p.weight_hi)),
        })
        .collect();

    Ok(MpbsInstance::with_window(
        (0..n).collect(),
        arcs,
        p.fl.clone(),
        p.cap.clone(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{node_view, validate_instance};

    #[test]
    fn paper_recipe_structure() {
        let inst = generate_instance(&GenParams::paper_defaults(10, 6, 1)).unwrap();
        assert_eq!(inst.n_arcs(), 10);
        assert_eq!(inst.graph.nodes.len(), 6);
        assert!(validate_instance(&inst).is_empty());
        for &u in &inst.graph.nodes {
            let v = node_view(&inst, u).unwrap();
            assert!(v.degree() <= 5);
            assert!(v.n_in() >= 1 && v.n_out() >= 1);
        }
    }

    #[test]
    fn forced_two_cycle() {
        let p = GenParams {
            n_arcs: 2,
            n_nodes: 2,
            weight_lo: 1,
            weight_hi: 1,
            fl: rat(-7),
            cap: rat(8),
            max_degree: 5,
            seed: 42,
        };
        let inst = generate_instance(&p).unwrap();
        assert_eq!(inst.n_arcs(), 2);
        let a = &inst.graph.arcs;
        assert_eq!(a[0].origin, a[1].target);
        assert_eq!(a[0].target, a[1].origin);
        assert_eq!(a[0].weight, rat(1));
        assert_eq!(a[1].weight, rat(1));
    }

    #[test]
    fn replay_equality() {
        for seed in [0, 1, 7, 123456789] {
            let p = GenParams::paper_defaults(12, 7, seed);
            assert_eq!(
                generate_instance(&p).unwrap(),
                generate_instance(&p).unwrap()
            );
        }
    }

    #[test]
    fn infeasible_parameters_are_rejected() {
        assert!(matches!(
            generate_instance(&GenParams::paper_defaults(2, 5, 0)),
            Err(Error::GeneratorInfeasible(_))
        ));
        // 16 arcs over 6 nodes of max degree 5: 32 endpoints > 30
        assert!(matches!(
            generate_instance(&GenParams::paper_defaults(16, 6, 0)),
            Err(Error::GeneratorInfeasible(_))
        ));
    }
}
