//! Indexed binary max-heap over fixed-width multi-limb integers.
//!
//! Keys live in a flat limb arena owned by the caller; the heap stores slot
//! indices plus each key's leading limb. Ties on value are broken by insertion sequence, earlier first,
//! which makes every run deterministic.

use std::cmp::Ordering;

/// Compare two little-endian limb slices of equal length.
#[inline]
pub(crate) fn cmp_limbs(a: &[u64], b: &[u64]) -> Ordering {
    for (x, y) in a.iter().rev().zip(b.iter().rev()) {
        match x.cmp(y) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

/// `a -= b` for little-endian limbs; requires `a >= b`.
#[inline]
pub(crate) fn sub_limbs(a: &mut [u64], b: &[u64]) {
    let mut borrow = false;
    for (x, &y) in a.iter_mut().zip(b) {
        let (d1, o1) = x.overflowing_sub(y);
        let (d2, o2) = d1.overflowing_sub(borrow as u64);
        *x = d2;
        borrow = o1 || o2;
    }
    debug_assert!(!borrow, "subtraction underflow");
}

/// Heap entry with the leading nonzero limb cached inline, so most comparisons
/// never touch the arena.
#[derive(Debug, Clone, Copy)]
struct Entry {
    top: u64,
    top_index: u32,
    slot: u32,
    seq: u64,
}

pub(crate) struct LimbHeap {
    width: usize,
    entries: Vec<Entry>,
    counter: u64,
}

impl LimbHeap {
    /// Heap over slots `0..n`, inserted in index order.
    pub(crate) fn new(arena: &[u64], width: usize, n: usize) -> Self {
        let mut heap = Self {
            width,
            entries: Vec::with_capacity(n),
            counter: n as u64,
        };
        for slot in 0..n {
            let e = heap.entry(arena, slot, slot as u64);
            heap.entries.push(e);
        }
        for i in (0..n / 2).rev() {
            heap.sift_down(arena, i);
        }
        heap
    }

    fn entry(&self, arena: &[u64], slot: usize, seq: u64) -> Entry {
        let limbs = &arena[slot * self.width..(slot + 1) * self.width];
        let top_index = limbs.iter().rposition(|&l| l != 0).unwrap_or(0);
        Entry {
            top: limbs[top_index],
            top_index: top_index as u32,
            slot: slot as u32,
            seq,
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.entries.len()
    }

    pub(crate) fn peek(&self) -> Option<usize> {
        self.entries.first().map(|e| e.slot as usize)
    }

    #[inline]
    fn greater(&self, arena: &[u64], a: &Entry, b: &Entry) -> bool {
        match (a.top_index, a.top).cmp(&(b.top_index, b.top)) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => {
                let w = self.width;
                let k = a.top_index as usize;
                let (sa, sb) = (a.slot as usize * w, b.slot as usize * w);
                match cmp_limbs(&arena[sa..sa + k], &arena[sb..sb + k]) {
                    Ordering::Greater => true,
                    Ordering::Less => false,
                    Ordering::Equal => a.seq < b.seq,
                }
            }
        }
    }

    /// Floyd's variant: walk the hole to a leaf along larger children, then
    /// float the moving entry back up. The moving entry is usually small.
    fn sift_down(&mut self, arena: &[u64], start: usize) {
        let len = self.entries.len();
        let moving = self.entries[start];
        let mut i = start;
        loop {
            let l = 2 * i + 1;
            if l >= len {
                break;
            }
            let r = l + 1;
            let child = if r < len && self.greater(arena, &self.entries[r], &self.entries[l]) {
                r
            } else {
                l
            };
            self.entries[i] = self.entries[child];
            i = child;
        }
        while i > start {
            let parent = (i - 1) / 2;
            if self.greater(arena, &moving, &self.entries[parent]) {
                self.entries[i] = self.entries[parent];
                i = parent;
            } else {
                break;
            }
        }
        self.entries[i] = moving;
    }

    pub(crate) fn pop(&mut self, arena: &[u64]) -> Option<usize> {
        let last = self.entries.pop()?;
        if self.entries.is_empty() {
            return Some(last.slot as usize);
        }
        let top = std::mem::replace(&mut self.entries[0], last);
        self.sift_down(arena, 0);
        Some(top.slot as usize)
    }

    /// Replace the top slot by `slot` (whose key may have changed) and restore order.
    /// The new entry counts as freshly inserted for tie-breaking.
    pub(crate) fn replace_top(&mut self, arena: &[u64], slot: usize) {
        let e = self.entry(arena, slot, self.counter);
        self.counter += 1;
        self.entries[0] = e;
        self.sift_down(arena, 0);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pops_in_descending_order_with_stable_ties() {
        let arena = vec![3u64, 9, 3, 1, 9, 0];
        let mut heap = LimbHeap::new(&arena, 1, arena.len());
        let mut order = Vec::new();
        while let Some(s) = heap.pop(&arena) {
            order.push(s);
        }
        assert_eq!(order, vec![1, 4, 0, 2, 3, 5]);
    }

    #[test]
    fn multi_limb_compare_and_subtract() {
        let mut a = vec![0u64, 1]; // 2^64
        let b = vec![1u64, 0];
        assert_eq!(cmp_limbs(&a, &b), Ordering::Greater);
        sub_limbs(&mut a, &b);
        assert_eq!(a, vec![u64::MAX, 0]);
    }
}
