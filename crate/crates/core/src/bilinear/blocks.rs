//! Dyadic blocks and the closed-form multiplier-norm bounds on them.
//!
//! Comparison constants: `A ∼ B` means `B/2 ≤ A ≤ 2B`, `A ≲ B` means
//! `A ≤ 4B` and `A ≫ B` means `A ≥ 4B`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Frequency sizes `N_j` and modulation sizes `L_j` of a block, all powers of two.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DyadicBlock {
    pub n1: f64,
    pub n2: f64,
    pub n3: f64,
    pub l1: f64,
    pub l2: f64,
    pub l3: f64,
}

fn is_dyadic(x: f64) -> bool {
    x > 0.0 && x.is_finite() && x.log2().fract() == 0.0 && x == 2f64.powi(x.log2() as i32)
}

/// Nearest power of two on the logarithmic scale.
pub fn dyadic_round(x: f64) -> f64 {
    2f64.powf(x.log2().round())
}

fn sorted_desc(v: [f64; 3]) -> [f64; 3] {
    let mut v = v;
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

fn comparable(a: f64, b: f64) -> bool {
    a <= 2.0 * b && b <= 2.0 * a
}

fn much_larger(a: f64, b: f64) -> bool {
    a >= 4.0 * b
}

fn not_much_smaller(a: f64, b: f64) -> bool {
    b <= 4.0 * a
}

impl DyadicBlock {
    pub fn new(n: [f64; 3], l: [f64; 3]) -> Result<Self> {
        for (name, v) in ["n1", "n2", "n3"]
            .iter()
            .zip(n)
            .chain(["l1", "l2", "l3"].iter().zip(l))
        {
            if !is_dyadic(v) {
                return Err(Error::param(
                    *name,
                    format!("must be a power of two, got {v}"),
                ));
            }
        }
        Ok(Self {
            n1: n[0],
            n2: n[1],
            n3: n[2],
            l1: l[0],
            l2: l[1],
            l3: l[2],
        })
    }

    pub fn n(&self) -> [f64; 3] {
        [self.n1, self.n2, self.n3]
    }

    pub fn l(&self) -> [f64; 3] {
        [self.l1, self.l2, self.l3]
    }

    /// `(N_max, N_med, N_min)`.
    pub fn n_sorted(&self) -> [f64; 3] {
        sorted_desc(self.n())
    }

    /// `(L_max, L_med, L_min)`.
    pub fn l_sorted(&self) -> [f64; 3] {
        sorted_desc(self.l())
    }

    /// `N₁N₂N₃`, the size of the resonance function on the block.
    pub fn resonance(&self) -> f64 {
        self.n1 * self.n2 * self.n3
    }

    fn check_general(&self) -> Result<()> {
        let [nmax, nmed, _] = self.n_sorted();
        let [lmax, lmed, _] = self.l_sorted();
        if !comparable(nmax, nmed) {
            return Err(Error::Hypothesis(format!(
                "N_max ∼ N_med fails: {nmax} vs {nmed}"
            )));
        }
        let target = self.resonance().max(lmed);
        if !comparable(lmax, target) {
            return Err(Error::Hypothesis(format!(
                "L_max ∼ max(N1N2N3, L_med) fails: {lmax} vs {target}"
            )));
        }
        Ok(())
    }

    /// Index `i` of the low frequency when `N_j ∼ N_k ≫ N_i` and
    /// `N₁N₂N₃ ∼ L_i ≳ L_j, L_k`.
    pub fn plus_minus_index(&self) -> Option<usize> {
        let (n, l) = (self.n(), self.l());
        (0..3).find(|&i| {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            comparable(n[j], n[k])
                && much_larger(n[j], n[i])
                && much_larger(n[k], n[i])
                && comparable(l[i], self.resonance())
                && not_much_smaller(l[i], l[j])
                && not_much_smaller(l[i], l[k])
        })
    }
}

/// Coherence regime of a block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockCase {
    PlusPlus,
    PlusMinus,
    Other,
}

impl BlockCase {
    /// Most specific regime whose hypotheses the block meets.
    pub fn classify(block: &DyadicBlock) -> Option<Self> {
        [BlockCase::PlusPlus, BlockCase::PlusMinus, BlockCase::Other]
            .into_iter()
            .find(|&c| check_case(block, c).is_ok())
    }
}

fn check_case(block: &DyadicBlock, case: BlockCase) -> Result<()> {
    block.check_general()?;
    match case {
        BlockCase::PlusPlus => {
            let [nmax, _, nmin] = block.n_sorted();
            if !comparable(nmax, nmin) {
                return Err(Error::Hypothesis(format!(
                    "(++) needs N_max ∼ N_min: {nmax} vs {nmin}"
                )));
            }
            let lmax = block.l_sorted()[0];
            if !comparable(lmax, block.resonance()) {
                return Err(Error::Hypothesis(format!(
                    "(++) needs L_max ∼ N1N2N3: {lmax} vs {}",
                    block.resonance()
                )));
            }
        }
        BlockCase::PlusMinus => {
            if block.plus_minus_index().is_none() {
                return Err(Error::Hypothesis(
                    "(+-) needs N_j ∼ N_k ≫ N_i and N1N2N3 ∼ L_i ≳ L_j, L_k for some permutation"
                        .into(),
                ));
            }
        }
        BlockCase::Other => {}
    }
    Ok(())
}

/// Closed-form bound on the multiplier norm of the block characteristic function.
pub fn dyadic_block_bound(block: &DyadicBlock, case: BlockCase) -> Result<f64> {
    check_case(block, case)?;
    let [nmax, _, nmin] = block.n_sorted();
    let [_, lmed, lmin] = block.l_sorted();
    Ok(match case {
        BlockCase::PlusPlus => lmin.sqrt() * nmax.powf(-0.25) * lmed.powf(0.25),
        BlockCase::PlusMinus => {
            lmin.sqrt() / nmax * block.resonance().min(nmax / nmin * lmed).sqrt()
        }
        BlockCase::Other => lmin.sqrt() / nmax * block.resonance().min(lmed).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn block(n: [f64; 3], l: [f64; 3]) -> DyadicBlock {
        DyadicBlock::new(n, l).unwrap()
    }

    #[test]
    fn worked_bounds() {
        let pm =
            dyadic_block_bound(&block([1., 4., 4.], [16., 2., 1.]), BlockCase::PlusMinus).unwrap();
        assert!((pm - 8f64.sqrt() / 4.0).abs() < 1e-15);
        let pp =
            dyadic_block_bound(&block([4., 4., 4.], [64., 64., 1.]), BlockCase::PlusPlus).unwrap();
        assert!((pp - 2.0).abs() < 1e-15);
        let other =
            dyadic_block_bound(&block([2., 4., 4.], [32., 1., 1.]), BlockCase::Other).unwrap();
        assert!((other - 0.25).abs() < 1e-15);
    }

    #[test]
    fn hypotheses_are_named() {
        let b = block([1., 4., 4.], [16., 2., 1.]);
        let err = dyadic_block_bound(&b, BlockCase::PlusPlus)
            .unwrap_err()
            .to_string();
        assert!(err.contains("N_max ∼ N_min"), "{err}");
        let b = block([1., 1., 16.], [16., 1., 1.]);
        let err = dyadic_block_bound(&b, BlockCase::Other)
            .unwrap_err()
            .to_string();
        assert!(err.contains("N_max ∼ N_med"), "{err}");
        let b = block([2., 4., 4.], [32., 1., 1.]);
        assert!(dyadic_block_bound(&b, BlockCase::PlusMinus).is_err());
    }

    #[test]
    fn rejects_non_dyadic_entries() {
        assert!(DyadicBlock::new([3., 4., 4.], [1., 1., 1.]).is_err());
        assert!(DyadicBlock::new([1., 4., 4.], [0., 1., 1.]).is_err());
        assert!(DyadicBlock::new([0.5, 4., 4.], [1., 0.25, 1.]).is_ok());
    }

    #[test]
    fn classification_and_permutation() {
        let b = block([4., 1., 4.], [2., 16., 1.]);
        assert_eq!(b.plus_minus_index(), Some(1));
        assert_eq!(BlockCase::classify(&b), Some(BlockCase::PlusMinus));
        assert_eq!(
            BlockCase::classify(&block([4., 4., 4.], [64., 64., 1.])),
            Some(BlockCase::PlusPlus)
        );
        assert_eq!(dyadic_round(11.0), 8.0);
        assert_eq!(dyadic_round(12.0), 16.0);
    }

    proptest! {
        #[test]
        fn sorted_triples_are_ordered(e in proptest::array::uniform6(-4i32..8)) {
            let p = |i: usize| 2f64.powi(e[i]);
            let b = block([p(0), p(1), p(2)], [p(3), p(4), p(5)]);
            let n = b.n_sorted();
            let l = b.l_sorted();
            prop_assert!(n[0] >= n[1] && n[1] >= n[2]);
            prop_assert!(l[0] >= l[1] && l[1] >= l[2]);
            prop_assert_eq!(n.iter().product::<f64>(), b.resonance());
        }
    }
}
