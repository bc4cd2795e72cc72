//! Binary SHA-256 Merkle tree with domain-separated leaf and node hashing.
//! The tree only accepts power-of-two leaf counts; [`pad_leaves`] fills the
//! remainder with random digests so the count of real commitments is hidden.

use rand::RngCore;
use sha2::{Digest, Sha256};

use super::NotarizeError;

pub type Digest32 = [u8; 32];

fn leaf_hash(d: &Digest32) -> Digest32 {
    let mut h = Sha256::new();
    h.update([0u8]);
    h.update(d);
    h.finalize().into()
}

fn node_hash(l: &Digest32, r: &Digest32) -> Digest32 {
    let mut h = Sha256::new();
    h.update([1u8]);
    h.update(l);
    h.update(r);
    h.finalize().into()
}

/// Pads to the next power of two (at least one leaf) with random digests.
pub fn pad_leaves<R: RngCore + ?Sized>(mut leaves: Vec<Digest32>, rng: &mut R) -> Vec<Digest32> {
    let target = leaves.len().max(1).next_power_of_two();
    while leaves.len() < target {
        let mut d = [0u8; 32];
        rng.fill_bytes(&mut d);
        leaves.push(d);
    }
    leaves
}

#[derive(Clone, Debug)]
pub struct MerkleTree {
    levels: Vec<Vec<Digest32>>,
}

impl MerkleTree {
    pub fn new(leaves: &[Digest32]) -> Result<Self, NotarizeError> {
        if !leaves.len().is_power_of_two() {
            return Err(NotarizeError::LeafCount(leaves.len()));
        }
        let mut levels = vec![leaves.iter().map(leaf_hash).collect::<Vec<_>>()];
        while levels.last().expect("non-empty").len() > 1 {
            let next = levels
                .last()
                .expect("non-empty")
                .chunks(2)
                .map(|p| node_hash(&p[0], &p[1]))
                .collect();
            levels.push(next);
        }
        Ok(Self { levels })
    }

    pub fn root(&self) -> Digest32 {
        self.levels.last().expect("non-empty")[0]
    }

    pub fn leaf_count(&self) -> usize {
        self.levels[0].len()
    }

    /// Sibling path from leaf to root.
    pub fn proof(&self, index: usize) -> Vec<Digest32> {
        let mut i = index;
        let mut path = Vec::with_capacity(self.levels.len() - 1);
        for level in &self.levels[..self.levels.len() - 1] {
            path.push(level[i ^ 1]);
            i >>= 1;
        }
        path
    }
}

pub fn verify_inclusion(root: &Digest32, leaf: &Digest32, index: usize, path: &[Digest32], leaf_count: usize) -> bool {
    if !leaf_count.is_power_of_two() || index >= leaf_count || 1usize << path.len() != leaf_count {
        return false;
    }
    let mut acc = leaf_hash(leaf);
    let mut i = index;
    for sib in path {
        acc = if i & 1 == 0 {
            node_hash(&acc, sib)
        } else {
            node_hash(sib, &acc)
        };
        i >>= 1;
    }
    acc == *root
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn padding_hides_count() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        for n in 1..=17 {
            let leaves = pad_leaves(vec![[n as u8; 32]; n], &mut rng);
            assert!(leaves.len().is_power_of_two());
            assert!(leaves.len() >= n && leaves.len() < 2 * n.max(1));
        }
        assert_eq!(pad_leaves(vec![], &mut rng).len(), 1);
    }

    #[test]
    fn rejects_non_power_of_two() {
        assert_eq!(MerkleTree::new(&[[0; 32]; 3]).unwrap_err(), NotarizeError::LeafCount(3));
        assert!(MerkleTree::new(&[]).is_err());
    }

    #[test]
    fn two_leaf_root_by_hand() {
        let (a, b) = ([1u8; 32], [2u8; 32]);
        let t = MerkleTree::new(&[a, b]).unwrap();
        let la: [u8; 32] = Sha256::digest([&[0u8][..], &a].concat()).into();
        let lb: [u8; 32] = Sha256::digest([&[0u8][..], &b].concat()).into();
        let root: [u8; 32] = Sha256::digest([&[1u8][..], &la, &lb].concat()).into();
        assert_eq!(t.root(), root);
    }

    proptest! {
        #[test]
        fn proofs_verify_only_for_their_leaf(seed in any::<u64>(), n in 1usize..40, pick in any::<usize>()) {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let leaves = pad_leaves((0..n).map(|i| [i as u8; 32]).collect(), &mut rng);
            let t = MerkleTree::new(&leaves).unwrap();
            let i = pick % leaves.len();
            let p = t.proof(i);
            prop_assert!(verify_inclusion(&t.root(), &leaves[i], i, &p, leaves.len()));
            let j = (i + 1) % leaves.len();
            if leaves[j] != leaves[i] {
                prop_assert!(!verify_inclusion(&t.root(), &leaves[j], i, &p, leaves.len()));
            }
            let mut bad = leaves[i];
            bad[0] ^= 1;
            prop_assert!(!verify_inclusion(&t.root(), &bad, i, &p, leaves.len()));
        }

        #[test]
        fn changing_a_leaf_changes_the_root(seed in any::<u64>(), n in 1usize..20, pick in any::<usize>()) {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let mut leaves = pad_leaves((0..n).map(|i| [i as u8; 32]).collect(), &mut rng);
            let r0 = MerkleTree::new(&leaves).unwrap().root();
            let i = pick % leaves.len();
            leaves[i][31] ^= 0x80;
            prop_assert_ne!(MerkleTree::new(&leaves).unwrap().root(), r0);
        }
    }
}
