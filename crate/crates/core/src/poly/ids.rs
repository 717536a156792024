use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

/// Names one Boolean factor. Two zonotopes that carry the same id share the
/// factor, so their values are correlated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FactorId(pub u64);

impl fmt::Display for FactorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Hands out batches of never-before-seen ids.
#[derive(Debug)]
pub struct IdAllocator {
    next: AtomicU64,
}

impl IdAllocator {
    pub const fn new(first: u64) -> Self {
        IdAllocator {
            next: AtomicU64::new(first),
        }
    }

    /// `count` consecutive fresh ids. Concurrent callers get disjoint batches.
    pub fn allocate(&self, count: usize) -> Vec<FactorId> {
        let start = self.next.fetch_add(count as u64, Ordering::Relaxed);
        (start..start + count as u64).map(FactorId).collect()
    }

    /// Makes sure later batches start above `id`.
    pub fn reserve_through(&self, id: FactorId) {
        self.next.fetch_max(id.0.saturating_add(1), Ordering::Relaxed);
    }
}

/// Fresh ids start well above the small numbers people write by hand in
/// fixtures, so hand-written ids rarely collide with allocated ones.
pub const FIRST_ALLOCATED_ID: u64 = 1 << 20;

static GLOBAL: IdAllocator = IdAllocator::new(FIRST_ALLOCATED_ID);

/// `count` process-wide fresh ids.
pub fn unique_id(count: usize) -> Vec<FactorId> {
    GLOBAL.allocate(count)
}

pub(crate) fn reserve_through(id: FactorId) {
    GLOBAL.reserve_through(id)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn batches_are_disjoint_and_increasing() {
        assert!(unique_id(0).is_empty());
        let a = unique_id(3);
        let b = unique_id(2);
        assert!(a.windows(2).all(|w| w[0] < w[1]));
        assert!(a.iter().all(|x| !b.contains(x)));
    }

    #[test]
    fn concurrent_allocation() {
        let alloc = IdAllocator::new(1);
        let all: Vec<FactorId> = std::thread::scope(|s| {
            let handles: Vec<_> = (0..4)
                .map(|_| s.spawn(|| (0..1000).flat_map(|_| alloc.allocate(1)).collect::<Vec<_>>()))
                .collect();
            handles.into_iter().flat_map(|h| h.join().unwrap()).collect()
        });
        assert_eq!(all.len(), 4000);
        assert_eq!(all.iter().collect::<HashSet<_>>().len(), 4000);
    }

    #[test]
    fn reserve_skips_past_existing_ids() {
        let alloc = IdAllocator::new(1);
        alloc.reserve_through(FactorId(10));
        assert_eq!(alloc.allocate(1), vec![FactorId(11)]);
        alloc.reserve_through(FactorId(3));
        assert_eq!(alloc.allocate(1), vec![FactorId(12)]);
    }
}
