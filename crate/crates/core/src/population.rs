//! Traffic types, node populations and the hash assignments fed to estimators.

use std::collections::HashSet;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ids::{draw_hash, BinaryId};

/// Traffic class label. With three types, 1/2/3 are emergency/periodic/normal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TrafficLabel {
    Emergency,
    Periodic,
    Normal,
    Generic(usize),
}

/// A traffic type, numbered from 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TrafficType {
    index: usize,
    label: TrafficLabel,
}

impl TrafficType {
    pub fn new(index: usize, type_count: usize) -> Result<Self> {
        if type_count < 2 {
            return Err(Error::invalid("at least two traffic types are required"));
        }
        if index == 0 || index > type_count {
            return Err(Error::invalid(format!(
                "type index {index} outside 1..={type_count}"
            )));
        }
        let label = match (type_count, index) {
            (3, 1) => TrafficLabel::Emergency,
            (3, 2) => TrafficLabel::Periodic,
            (3, 3) => TrafficLabel::Normal,
            (_, k) => TrafficLabel::Generic(k),
        };
        Ok(Self { index, label })
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn label(&self) -> TrafficLabel {
        self.label
    }
}

impl fmt::Display for TrafficType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.label {
            TrafficLabel::Emergency => f.write_str("emergency"),
            TrafficLabel::Periodic => f.write_str("periodic"),
            TrafficLabel::Normal => f.write_str("normal"),
            TrafficLabel::Generic(k) => write!(f, "type{k}"),
        }
    }
}

/// How nodes obtain their LoF hash each frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum HashingMode {
    /// Hash of the node's lifetime ID (correlated across frames).
    FixedId,
    /// Fresh geometric hash per node per frame.
    #[default]
    Redraw,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub id: BinaryId,
    pub active: bool,
    pub queue_len: u32,
}

/// Per-type node lists sharing one ID width.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodePopulation {
    types: Vec<Vec<Node>>,
    id_width: u32,
}

impl NodePopulation {
    /// `sizes[b]` nodes of type `b+1`, each with a network-unique random ID.
    pub fn with_random_ids<R: Rng + ?Sized>(
        sizes: &[usize],
        id_width: u32,
        rng: &mut R,
    ) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::invalid("population needs at least one type"));
        }
        let total: usize = sizes.iter().sum();
        if id_width < 64 && (total as u128) > (1u128 << id_width) {
            return Err(Error::invalid(format!(
                "{total} unique IDs do not fit in {id_width} bits"
            )));
        }
        let mut seen = HashSet::with_capacity(total);
        let mut types = Vec::with_capacity(sizes.len());
        for &size in sizes {
            let mut nodes = Vec::with_capacity(size);
            while nodes.len() < size {
                let id = BinaryId::random(id_width, rng)?;
                if seen.insert(id) {
                    nodes.push(Node {
                        id,
                        active: false,
                        queue_len: 0,
                    });
                }
            }
            types.push(nodes);
        }
        Ok(Self { types, id_width })
    }

    pub fn from_nodes(types: Vec<Vec<Node>>) -> Result<Self> {
        let width = types
            .iter()
            .flatten()
            .map(|n| n.id.width())
            .next()
            .unwrap_or(1);
        if types.iter().flatten().any(|n| n.id.width() != width) {
            return Err(Error::invalid("all IDs in a population must share one width"));
        }
        Ok(Self {
            types,
            id_width: width,
        })
    }

    pub fn type_count(&self) -> usize {
        self.types.len()
    }

    pub fn id_width(&self) -> u32 {
        self.id_width
    }

    pub fn nodes(&self, type_index: usize) -> &[Node] {
        &self.types[type_index]
    }

    pub fn nodes_mut(&mut self, type_index: usize) -> &mut [Node] {
        &mut self.types[type_index]
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.types.iter().map(Vec::len).collect()
    }

    /// Estimation-only activity: each node of type `b` is active w.p. `q[b]`.
    pub fn activate_bernoulli<R: Rng + ?Sized>(&mut self, q: &[f64], rng: &mut R) -> Result<()> {
        if q.len() != self.types.len() {
            return Err(Error::invalid(format!(
                "{} activity probabilities for {} types",
                q.len(),
                self.types.len()
            )));
        }
        for (nodes, &qb) in self.types.iter_mut().zip(q) {
            if !(0.0..=1.0).contains(&qb) {
                return Err(Error::invalid(format!("activity probability {qb} outside [0,1]")));
            }
            for node in nodes.iter_mut() {
                node.active = rng.random_bool(qb);
            }
        }
        Ok(())
    }

    /// MAC activity: a node is active iff it has queued packets.
    pub fn activate_from_queues(&mut self) {
        for node in self.types.iter_mut().flatten() {
            node.active = node.queue_len > 0;
        }
    }

    pub fn active_counts(&self) -> Vec<usize> {
        self.types
            .iter()
            .map(|nodes| nodes.iter().filter(|n| n.active).count())
            .collect()
    }

    /// Hashes of the active nodes, folded into `t` bins.
    pub fn hash_assignment<R: Rng + ?Sized>(
        &self,
        mode: HashingMode,
        t: u32,
        rng: &mut R,
    ) -> Result<HashAssignment> {
        let mut per_type = Vec::with_capacity(self.types.len());
        for nodes in &self.types {
            let mut hashes = Vec::new();
            for node in nodes.iter().filter(|n| n.active) {
                let h = match mode {
                    HashingMode::FixedId => node.id.hash().clamp_to_bins(t),
                    HashingMode::Redraw => draw_hash(rng, t)?.value(),
                };
                hashes.push(h);
            }
            per_type.push(hashes);
        }
        HashAssignment::new(t, per_type)
    }
}

/// The hash value of every active node, per type, over `t` bins.
///
/// This is the complete random input of one estimation run: Method I,
/// Method II and the repeated-LoF baseline are deterministic given it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HashAssignment {
    t: u32,
    per_type: Vec<Vec<u32>>,
}

impl HashAssignment {
    pub fn new(t: u32, per_type: Vec<Vec<u32>>) -> Result<Self> {
        if t < 1 {
            return Err(Error::invalid("bitmap length t must be at least 1"));
        }
        if let Some(h) = per_type.iter().flatten().find(|&&h| h >= t) {
            return Err(Error::invalid(format!("hash {h} outside 0..{t}")));
        }
        Ok(Self { t, per_type })
    }

    /// Draw `counts[b]` fresh geometric hashes for each type.
    pub fn redraw<R: Rng + ?Sized>(counts: &[usize], t: u32, rng: &mut R) -> Result<Self> {
        let mut per_type = Vec::with_capacity(counts.len());
        for &n in counts {
            let mut v = Vec::with_capacity(n);
            for _ in 0..n {
                v.push(draw_hash(rng, t)?.value());
            }
            per_type.push(v);
        }
        Self::new(t, per_type)
    }

    pub fn bitmap_len(&self) -> u32 {
        self.t
    }

    pub fn type_count(&self) -> usize {
        self.per_type.len()
    }

    pub fn hashes(&self, type_index: usize) -> &[u32] {
        &self.per_type[type_index]
    }

    pub fn active_counts(&self) -> Vec<usize> {
        self.per_type.iter().map(Vec::len).collect()
    }

    /// `counts[b][i]` = number of active type-`b` nodes with hash `i`.
    pub fn block_counts(&self) -> Vec<Vec<u64>> {
        self.per_type
            .iter()
            .map(|hs| {
                let mut c = vec![0u64; self.t as usize];
                for &h in hs {
                    c[h as usize] += 1;
                }
                c
            })
            .collect()
    }

    /// Ground-truth LoF bit `B(b, i)`.
    pub fn true_bits(&self) -> Vec<Vec<bool>> {
        self.block_counts()
            .into_iter()
            .map(|c| c.into_iter().map(|x| x > 0).collect())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{RandomSource, StreamKind};

    #[test]
    fn traffic_labels() {
        assert_eq!(TrafficType::new(1, 3).unwrap().label(), TrafficLabel::Emergency);
        assert_eq!(TrafficType::new(3, 3).unwrap().to_string(), "normal");
        assert_eq!(TrafficType::new(3, 4).unwrap().label(), TrafficLabel::Generic(3));
        assert!(TrafficType::new(0, 3).is_err());
        assert!(TrafficType::new(1, 1).is_err());
    }

    #[test]
    fn ids_are_unique_and_same_width() {
        let mut rng = RandomSource::new(9).stream_for(StreamKind::NodeIds, 0, 0);
        let pop = NodePopulation::with_random_ids(&[100, 100, 100], 15, &mut rng).unwrap();
        let mut all: Vec<_> = (0..3).flat_map(|b| pop.nodes(b).iter().map(|n| n.id)).collect();
        all.sort();
        all.dedup();
        assert_eq!(all.len(), 300);
        assert!(NodePopulation::with_random_ids(&[5], 2, &mut rng).is_err());
    }

    #[test]
    fn fixed_id_hashes_follow_ids() {
        let ids = ["0111", "0000", "1111"];
        let nodes = ids
            .iter()
            .map(|s| Node {
                id: s.parse().unwrap(),
                active: true,
                queue_len: 0,
            })
            .collect();
        let pop = NodePopulation::from_nodes(vec![nodes, vec![]]).unwrap();
        let mut rng = RandomSource::new(0).stream_for(StreamKind::Hashes, 0, 0);
        let a = pop.hash_assignment(HashingMode::FixedId, 3, &mut rng).unwrap();
        // 0111 -> 3 clamped to 2; 0000 -> 0; 1111 -> 4 clamped to 2
        assert_eq!(a.hashes(0), &[2, 0, 2]);
        assert!(a.hashes(1).is_empty());
    }

    #[test]
    fn assignment_validation() {
        assert!(HashAssignment::new(3, vec![vec![3]]).is_err());
        assert!(HashAssignment::new(0, vec![]).is_err());
        let a = HashAssignment::new(3, vec![vec![0, 0, 2], vec![1]]).unwrap();
        assert_eq!(a.block_counts(), vec![vec![2, 0, 1], vec![0, 1, 0]]);
        assert_eq!(
            a.true_bits(),
            vec![vec![true, false, true], vec![false, true, false]]
        );
    }
}
