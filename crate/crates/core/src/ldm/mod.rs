//! Differencing algorithms on ℓ-bit fixed-point instances.
//!
//! Values are integers `a_i < 2^ℓ` standing for `a_i / 2^ℓ ∈ [0, 1)`. They are
//! stored in a flat little-endian limb arena so the inner loop of the largest
//! differencing method runs without allocation.

mod heap;
pub mod sim;

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, Zero};
use rand::RngCore;

use crate::error::{Error, Result};
use heap::{cmp_limbs, sub_limbs, LimbHeap};

/// Largest instance [`brute_force_optimum`] accepts.
pub const BRUTE_FORCE_LIMIT: usize = 30;

/// A list of `n ≥ 1` nonnegative `bits`-bit integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    bits: u32,
    width: usize,
    limbs: Vec<u64>,
}

fn width_for(bits: u32) -> usize {
    (bits as usize).div_ceil(64).max(1)
}

fn limbs_to_biguint(limbs: &[u64]) -> BigUint {
    let digits: Vec<u32> = limbs
        .iter()
        .flat_map(|&l| [l as u32, (l >> 32) as u32])
        .collect();
    BigUint::new(digits)
}

impl Instance {
    pub fn new(values: &[BigUint], bits: u32) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInstance);
        }
        if bits == 0 {
            return Err(Error::InvalidArgument("bits must be positive".into()));
        }
        let width = width_for(bits);
        let mut limbs = Vec::with_capacity(values.len() * width);
        for (index, v) in values.iter().enumerate() {
            if v.bits() > u64::from(bits) {
                return Err(Error::ValueOutOfRange { index, bits });
            }
            let digits = v.to_u64_digits();
            limbs.extend((0..width).map(|i| digits.get(i).copied().unwrap_or(0)));
        }
        Ok(Self { bits, width, limbs })
    }

    pub fn from_u64(values: &[u64], bits: u32) -> Result<Self> {
        let big: Vec<BigUint> = values.iter().map(|&v| BigUint::from(v)).collect();
        Self::new(&big, bits)
    }

    /// `n` independent uniform `bits`-bit integers. Duplicates and zeros are allowed.
    pub fn uniform<R: RngCore + ?Sized>(n: usize, bits: u32, rng: &mut R) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyInstance);
        }
        if bits == 0 {
            return Err(Error::InvalidArgument("bits must be positive".into()));
        }
        let width = width_for(bits);
        let top_bits = bits as usize - 64 * (width - 1);
        let top_mask = if top_bits == 64 {
            u64::MAX
        } else {
            (1u64 << top_bits) - 1
        };
        let mut limbs = vec![0u64; n * width];
        for value in limbs.chunks_exact_mut(width) {
            for limb in value.iter_mut() {
                *limb = rng.next_u64();
            }
            value[width - 1] &= top_mask;
        }
        Ok(Self { bits, width, limbs })
    }

    pub fn len(&self) -> usize {
        self.limbs.len() / self.width
    }

    pub fn is_empty(&self) -> bool {
        self.limbs.is_empty()
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn value(&self, i: usize) -> BigUint {
        limbs_to_biguint(&self.limbs[i * self.width..(i + 1) * self.width])
    }

    pub fn values(&self) -> Vec<BigUint> {
        (0..self.len()).map(|i| self.value(i)).collect()
    }
}

/// A two-way split of an instance: `side[i]` is `true` when item `i` is in `A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub side: Vec<bool>,
    pub discrepancy: BigUint,
}

impl Partition {
    /// `|Σ_{i∈A} a_i − Σ_{i∉A} a_i|` computed from the side labels.
    pub fn recompute_discrepancy(&self, instance: &Instance) -> BigUint {
        let mut diff = BigInt::zero();
        for (i, &in_a) in self.side.iter().enumerate() {
            let v = BigInt::from(instance.value(i));
            if in_a {
                diff += v;
            } else {
                diff -= v;
            }
        }
        diff.abs().to_biguint().expect("nonnegative")
    }

    pub fn subset(&self, instance: &Instance, in_a: bool) -> Vec<BigUint> {
        self.side
            .iter()
            .enumerate()
            .filter(|&(_, &s)| s == in_a)
            .map(|(i, _)| instance.value(i))
            .collect()
    }
}

/// Bookkeeping of the rooted trees built while differencing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffForest {
    /// `parent[i]` is the node `i` was joined under, `None` for the current roots.
    pub parent: Vec<Option<usize>>,
    /// Joins in execution order as `(x, y)`: `x` stays root and is relabelled `x − y`.
    pub edges: Vec<(usize, usize)>,
    pub root: usize,
    pub root_label: BigUint,
}

impl DiffForest {
    fn new(n: usize) -> Self {
        Self {
            parent: vec![None; n],
            edges: Vec::with_capacity(n.saturating_sub(1)),
            root: 0,
            root_label: BigUint::zero(),
        }
    }

    fn join(&mut self, x: usize, y: usize) {
        self.parent[y] = Some(x);
        self.edges.push((x, y));
    }

    /// True when the joins form a single tree over all nodes.
    pub fn is_spanning_tree(&self) -> bool {
        let n = self.parent.len();
        let roots = self.parent.iter().filter(|p| p.is_none()).count();
        roots == 1 && self.edges.len() + 1 == n && self.parent[self.root].is_none()
    }

    /// Two-colouring of the final tree; the root's colour is `true`.
    pub fn two_coloring(&self) -> Vec<bool> {
        let mut color = vec![true; self.parent.len()];
        for &(x, y) in self.edges.iter().rev() {
            color[y] = !color[x];
        }
        color
    }
}

// Runs the differencing loop on `arena`, returning the final root slot.
fn difference_in_place(
    arena: &mut [u64],
    width: usize,
    n: usize,
    mut on_join: impl FnMut(usize, usize),
) -> usize {
    let mut heap = LimbHeap::new(arena, width, n);
    while heap.len() >= 2 {
        let x = heap.pop(arena).expect("nonempty");
        let y = heap.peek().expect("nonempty");
        let (xs, ys) = pair_mut(arena, width, x, y);
        sub_limbs(xs, ys);
        on_join(x, y);
        heap.replace_top(arena, x);
    }
    heap.peek().expect("nonempty")
}

fn pair_mut(arena: &mut [u64], width: usize, x: usize, y: usize) -> (&mut [u64], &[u64]) {
    debug_assert_ne!(x, y);
    if x < y {
        let (lo, hi) = arena.split_at_mut(y * width);
        (&mut lo[x * width..(x + 1) * width], &hi[..width])
    } else {
        let (lo, hi) = arena.split_at_mut(x * width);
        (&mut hi[..width], &lo[y * width..(y + 1) * width])
    }
}

/// Largest differencing method with tree bookkeeping. O(n log n) comparisons.
pub fn ldm_with_forest(instance: &Instance) -> (Partition, DiffForest) {
    let n = instance.len();
    let width = instance.width;
    let mut arena = instance.limbs.clone();
    let mut forest = DiffForest::new(n);
    let root = difference_in_place(&mut arena, width, n, |x, y| forest.join(x, y));
    forest.root = root;
    forest.root_label = limbs_to_biguint(&arena[root * width..(root + 1) * width]);
    let partition = Partition {
        side: forest.two_coloring(),
        discrepancy: forest.root_label.clone(),
    };
    (partition, forest)
}

/// Largest differencing method (Karmarkar–Karp).
pub fn ldm(instance: &Instance) -> Partition {
    ldm_with_forest(instance).0
}

/// LDM discrepancy only, skipping partition recovery.
pub fn ldm_discrepancy(instance: &Instance) -> BigUint {
    let width = instance.width;
    let mut arena = instance.limbs.clone();
    let root = difference_in_place(&mut arena, width, instance.len(), |_, _| {});
    limbs_to_biguint(&arena[root * width..(root + 1) * width])
}

/// Paired differencing method: each round sorts descending and replaces
/// positions (1,2), (3,4), … by their differences; an odd leftover is carried.
pub fn pdm(instance: &Instance) -> BigUint {
    let width = instance.width;
    let mut arena = instance.limbs.clone();
    let mut current: Vec<usize> = (0..instance.len()).collect();
    while current.len() > 1 {
        current.sort_by(|&a, &b| {
            cmp_limbs(
                &arena[b * width..(b + 1) * width],
                &arena[a * width..(a + 1) * width],
            )
        });
        let mut next = Vec::with_capacity(current.len().div_ceil(2));
        for pair in current.chunks(2) {
            if let [x, y] = *pair {
                let (xs, ys) = pair_mut(&mut arena, width, x, y);
                sub_limbs(xs, ys);
            }
            next.push(pair[0]);
        }
        current = next;
    }
    let last = current[0];
    limbs_to_biguint(&arena[last * width..(last + 1) * width])
}

/// Exhaustive search over all `2^(n−1)` sign assignments (item 0 fixed in `A`).
pub fn brute_force_optimum(instance: &Instance) -> Result<Partition> {
    let n = instance.len();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::InstanceTooLarge {
            n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let values = instance.values();
    let best_mask = if instance.bits + 8 <= 126 {
        let small: Vec<i128> = values
            .iter()
            .map(|v| i128::try_from(v).expect("fits"))
            .collect();
        gray_search(&small, |v| v.abs())
    } else {
        let big: Vec<BigInt> = values.into_iter().map(BigInt::from).collect();
        gray_search(&big, |v| v.abs())
    };
    let side: Vec<bool> = (0..n).map(|i| best_mask >> i & 1 == 0).collect();
    let mut partition = Partition {
        side,
        discrepancy: BigUint::zero(),
    };
    partition.discrepancy = partition.recompute_discrepancy(instance);
    Ok(partition)
}

// Gray-code walk; bit i of the mask set means item i is outside A.
fn gray_search<T>(values: &[T], abs: impl Fn(&T) -> T) -> u64
where
    T: Clone + Ord + for<'a> std::ops::AddAssign<&'a T> + for<'a> std::ops::SubAssign<&'a T>,
{
    let n = values.len();
    let mut diff = values[0].clone();
    for v in &values[1..] {
        diff += v;
    }
    let mut best = abs(&diff);
    let mut best_mask = 0u64;
    let mut mask = 0u64;
    for g in 1u64..(1u64 << (n - 1)) {
        let i = g.trailing_zeros() as usize + 1;
        mask ^= 1 << i;
        // moving a_i across changes the signed difference by 2 a_i
        if mask >> i & 1 == 1 {
            diff -= &values[i];
            diff -= &values[i];
        } else {
            diff += &values[i];
            diff += &values[i];
        }
        let d = abs(&diff);
        if d < best {
            best = d;
            best_mask = mask;
        }
    }
    best_mask
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn inst(v: &[u64]) -> Instance {
        Instance::from_u64(v, 16).unwrap()
    }

    #[test]
    fn worked_example_ldm() {
        let i = inst(&[4, 5, 6, 7, 8]);
        let (p, forest) = ldm_with_forest(&i);
        assert_eq!(p.discrepancy, BigUint::from(2u8));
        let mut a: Vec<_> = p.subset(&i, true);
        let mut b: Vec<_> = p.subset(&i, false);
        a.sort();
        b.sort();
        let a: Vec<u64> = a.iter().map(|x| x.try_into().unwrap()).collect();
        let b: Vec<u64> = b.iter().map(|x| x.try_into().unwrap()).collect();
        assert_eq!(a, vec![4, 5, 7]);
        assert_eq!(b, vec![6, 8]);
        assert!(forest.is_spanning_tree());
        assert_eq!(forest.edges.len(), 4);
    }

    #[test]
    fn ldm_trivial_cases() {
        assert_eq!(ldm(&inst(&[7, 7])).discrepancy, BigUint::zero());
        let single = ldm(&inst(&[9]));
        assert_eq!(single.discrepancy, BigUint::from(9u8));
        assert_eq!(single.side, vec![true]);
        assert_eq!(ldm_discrepancy(&inst(&[0, 0, 3])), BigUint::from(3u8));
    }

    #[test]
    fn empty_instance_rejected() {
        assert_eq!(Instance::from_u64(&[], 8), Err(Error::EmptyInstance));
        assert_eq!(Error::EmptyInstance.to_string(), "empty instance");
    }

    #[test]
    fn value_range_checked() {
        assert_eq!(
            Instance::from_u64(&[1, 256], 8),
            Err(Error::ValueOutOfRange { index: 1, bits: 8 })
        );
    }

    #[test]
    fn pdm_examples() {
        assert_eq!(pdm(&inst(&[4, 5, 6, 7, 8])), BigUint::from(2u8));
        assert_eq!(pdm(&inst(&[3, 3])), BigUint::zero());
        assert_eq!(pdm(&inst(&[11])), BigUint::from(11u8));
    }

    #[test]
    fn brute_force_examples() {
        let p = brute_force_optimum(&inst(&[4, 5, 6, 7, 8])).unwrap();
        assert_eq!(p.discrepancy, BigUint::zero());
        assert_eq!(p.recompute_discrepancy(&inst(&[4, 5, 6, 7, 8])), BigUint::zero());
        assert_eq!(
            brute_force_optimum(&inst(&[1, 2])).unwrap().discrepancy,
            BigUint::from(1u8)
        );
        assert_eq!(
            brute_force_optimum(&inst(&[1, 2, 3])).unwrap().discrepancy,
            BigUint::zero()
        );
    }

    #[test]
    fn brute_force_guard() {
        let big = Instance::from_u64(&[1; 31], 8).unwrap();
        let err = brute_force_optimum(&big).unwrap_err();
        assert!(err
            .to_string()
            .starts_with("instance too large for exhaustive search"));
    }

    #[test]
    fn brute_force_wide_values() {
        let two_120: BigUint = BigUint::from(1u8) << 120usize;
        let vals = vec![two_120.clone(), two_120.clone() + 1u8, BigUint::from(1u8)];
        let i = Instance::new(&vals, 130).unwrap();
        assert_eq!(brute_force_optimum(&i).unwrap().discrepancy, BigUint::zero());
    }

    #[test]
    fn multi_limb_ldm_matches_narrow() {
        let narrow = inst(&[4, 5, 6, 7, 8]);
        let shift: BigUint = BigUint::from(1u8) << 150usize;
        let wide_vals: Vec<BigUint> = narrow.values().iter().map(|v| v * &shift).collect();
        let wide = Instance::new(&wide_vals, 160).unwrap();
        assert_eq!(ldm(&wide).discrepancy, BigUint::from(2u8) * &shift);
    }

    #[test]
    fn uniform_respects_bit_width() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let i = Instance::uniform(200, 70, &mut rng).unwrap();
        assert!(i.values().iter().all(|v| v.bits() <= 70));
        assert!(i.values().iter().any(|v| v.bits() > 64));
    }

    fn arb_instance(max_n: usize) -> impl Strategy<Value = Vec<u64>> {
        prop::collection::vec(0u64..(1 << 20), 1..=max_n)
    }

    proptest! {
        #[test]
        fn partition_is_consistent(v in arb_instance(60)) {
            let i = Instance::from_u64(&v, 24).unwrap();
            let (p, forest) = ldm_with_forest(&i);
            prop_assert_eq!(p.recompute_discrepancy(&i), p.discrepancy.clone());
            prop_assert!(forest.is_spanning_tree());
            prop_assert_eq!(forest.root_label.clone(), p.discrepancy);
        }

        #[test]
        fn scale_equivariance(v in arb_instance(40), c in 1u64..15) {
            let i = Instance::from_u64(&v, 24).unwrap();
            let scaled: Vec<u64> = v.iter().map(|x| x * c).collect();
            let j = Instance::from_u64(&scaled, 24).unwrap();
            prop_assert_eq!(ldm(&j).discrepancy, ldm(&i).discrepancy * c);
            prop_assert_eq!(pdm(&j), pdm(&i) * c);
        }

        #[test]
        fn ldm_dominates_optimum(v in arb_instance(14)) {
            let i = Instance::from_u64(&v, 24).unwrap();
            let opt = brute_force_optimum(&i).unwrap();
            prop_assert!(ldm(&i).discrepancy >= opt.discrepancy.clone());
            prop_assert_eq!(opt.recompute_discrepancy(&i), opt.discrepancy);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn ldm_dominates_optimum_up_to_twenty(v in prop::collection::vec(0u64..(1 << 30), 15..=20)) {
            let i = Instance::from_u64(&v, 32).unwrap();
            let opt = brute_force_optimum(&i).unwrap();
            prop_assert!(ldm(&i).discrepancy >= opt.discrepancy);
        }
    }
}
