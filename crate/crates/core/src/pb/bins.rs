//! Global bins holding the expanded matrix, and the thread-private local
//! bins that stage tuples before they are flushed.

use std::fmt;
use std::marker::PhantomData;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Arc;

use super::key::{unpack_raw, KeyLayout, RadixKey};
use super::symbolic::{BinLayout, SymbolicResult};
use super::ExpandedTuple;
use crate::error::{Error, Result};

/// A packed key and its value. Packed to 4-byte alignment so a 32-bit key
/// record takes 12 bytes.
#[repr(C, packed(4))]
pub struct Record<K> {
    pub key: K,
    pub value: f64,
}

impl<K: Copy> Clone for Record<K> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<K: Copy> Copy for Record<K> {}

impl<K: Copy + fmt::Debug> fmt::Debug for Record<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (key, value) = (self.key, self.value);
        f.debug_struct("Record")
            .field("key", &key)
            .field("value", &value)
            .finish()
    }
}

impl<K: Copy + PartialEq> PartialEq for Record<K> {
    fn eq(&self, other: &Self) -> bool {
        let (k1, v1, k2, v2) = (self.key, self.value, other.key, other.value);
        k1 == k2 && v1 == v2
    }
}

impl<K> Record<K> {
    #[inline]
    pub fn new(key: K, value: f64) -> Self {
        Self { key, value }
    }
}

/// The expanded matrix partitioned into bins by row range. Bin `b` occupies
/// `storage[offsets[b]..offsets[b + 1]]`; after compression only the first
/// `counts[b]` records of that range are live.
pub struct BinSet<K> {
    layout: Arc<BinLayout>,
    keys: KeyLayout,
    offsets: Vec<usize>,
    storage: Vec<Record<K>>,
    filled: bool,
    counts: Option<Vec<usize>>,
}

impl<K: RadixKey> BinSet<K> {
    /// Reserves room for exactly `per_bin_flop[b]` tuples in each bin. The
    /// storage is left uninitialized until [`expand`](super::expand) fills it.
    pub fn allocate(sym: &SymbolicResult) -> Result<Self> {
        if sym.keys.width != K::WIDTH {
            return Err(Error::InternalFault(format!(
                "bins built with {:?} keys for a {:?} layout",
                K::WIDTH,
                sym.keys.width
            )));
        }
        let mut offsets = Vec::with_capacity(sym.nbins + 1);
        offsets.push(0usize);
        for &f in &sym.per_bin_flop {
            offsets.push(offsets.last().unwrap() + f as usize);
        }
        let total = *offsets.last().unwrap();
        if total as u64 != sym.flop {
            return Err(Error::InternalFault(format!(
                "per-bin flop sums to {total}, symbolic flop is {}",
                sym.flop
            )));
        }
        Ok(Self {
            layout: Arc::clone(&sym.layout),
            keys: sym.keys,
            offsets,
            storage: Vec::with_capacity(total),
            filled: false,
            counts: None,
        })
    }

    pub fn nbins(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn capacity(&self, bin: usize) -> usize {
        self.offsets[bin + 1] - self.offsets[bin]
    }

    pub fn layout(&self) -> &BinLayout {
        &self.layout
    }

    pub fn keys(&self) -> KeyLayout {
        self.keys
    }

    pub fn is_filled(&self) -> bool {
        self.filled
    }

    /// Total records stored by expand.
    pub fn total_tuples(&self) -> usize {
        self.storage.len()
    }

    /// Live records of `bin`: everything after expand, the merged prefix
    /// after compression.
    pub fn bin(&self, bin: usize) -> &[Record<K>] {
        let start = self.offsets[bin];
        let len = match &self.counts {
            Some(c) => c[bin],
            None if self.filled => self.capacity(bin),
            None => 0,
        };
        &self.storage[start..start + len]
    }

    /// Disjoint mutable views of every filled bin.
    pub(crate) fn bins_mut(&mut self) -> Vec<&mut [Record<K>]> {
        assert!(self.filled && self.counts.is_none());
        let mut out = Vec::with_capacity(self.nbins());
        let mut rest: &mut [Record<K>] = &mut self.storage;
        for b in 0..self.offsets.len() - 1 {
            let (head, tail) = rest.split_at_mut(self.offsets[b + 1] - self.offsets[b]);
            out.push(head);
            rest = tail;
        }
        out
    }

    pub(crate) fn set_counts(&mut self, counts: Vec<usize>) {
        debug_assert_eq!(counts.len(), self.nbins());
        self.counts = Some(counts);
    }

    /// Surviving records per bin once compressed.
    pub fn compressed_counts(&self) -> Option<&[usize]> {
        self.counts.as_deref()
    }

    /// Decodes every live record of every bin into absolute coordinates.
    pub fn expanded_tuples(&self) -> Vec<ExpandedTuple> {
        let mut out = Vec::new();
        for b in 0..self.nbins() {
            let base = self.layout.bin_base(b);
            for rec in self.bin(b) {
                let (key, value) = (rec.key, rec.value);
                let (rowid, colid) = unpack_raw(key.to_u64(), base, self.keys.col_bits);
                out.push(ExpandedTuple {
                    rowid,
                    colid,
                    value,
                });
            }
        }
        out
    }

    /// Shared write handle for the expand phase.
    pub(crate) fn global(&mut self) -> GlobalBins<'_, K> {
        assert!(!self.filled, "bins already filled");
        let cursors = self.offsets[..self.offsets.len() - 1]
            .iter()
            .map(|&o| AtomicUsize::new(o))
            .collect();
        GlobalBins {
            base: self.storage.as_mut_ptr(),
            offsets: &self.offsets,
            cursors,
            overflow: AtomicBool::new(false),
            _storage: PhantomData,
        }
    }

    /// Marks storage initialized once every cursor reached its bin's end.
    pub(crate) fn seal(&mut self, cursors: Vec<usize>, overflow: bool) -> Result<()> {
        if overflow {
            return Err(Error::InternalFault(
                "a global bin overflowed during expand".into(),
            ));
        }
        for (b, &c) in cursors.iter().enumerate() {
            if c != self.offsets[b + 1] {
                return Err(Error::InternalFault(format!(
                    "bin {b} received {} tuples, symbolic reserved {}",
                    c - self.offsets[b],
                    self.capacity(b)
                )));
            }
        }
        let total = *self.offsets.last().unwrap();
        // SAFETY: every bin range [offsets[b], offsets[b+1]) was written by
        // flushes whose reserved ranges exactly tile it, so all `total`
        // records are initialized. `Record` is `Copy` and has no drop glue.
        unsafe { self.storage.set_len(total) };
        self.filled = true;
        Ok(())
    }
}

/// Concurrent append access to the global bins. A flush reserves a
/// contiguous range with one fetch-and-add on the bin's cursor, then copies
/// into it with no further synchronization.
pub(crate) struct GlobalBins<'a, K> {
    base: *mut Record<K>,
    offsets: &'a [usize],
    cursors: Vec<AtomicUsize>,
    overflow: AtomicBool,
    _storage: PhantomData<&'a mut [Record<K>]>,
}

// SAFETY: writes go only to ranges handed out by `fetch_add`, which are
// disjoint across callers; nothing reads the storage while it is shared.
unsafe impl<K: Send> Sync for GlobalBins<'_, K> {}
unsafe impl<K: Send> Send for GlobalBins<'_, K> {}

impl<K: RadixKey> GlobalBins<'_, K> {
    #[inline]
    pub(crate) fn append(&self, bin: usize, records: &[Record<K>]) {
        let n = records.len();
        let start = self.cursors[bin].fetch_add(n, Ordering::Relaxed);
        if start + n > self.offsets[bin + 1] {
            self.overflow.store(true, Ordering::Relaxed);
            return;
        }
        // SAFETY: [start, start + n) lies inside bin's range of the
        // allocation and was reserved exclusively by the fetch_add above.
        unsafe {
            std::ptr::copy_nonoverlapping(records.as_ptr(), self.base.add(start), n);
        }
    }

    /// Final cursor positions and the overflow flag.
    pub(crate) fn finish(self) -> (Vec<usize>, bool) {
        let cursors = self
            .cursors
            .into_iter()
            .map(AtomicUsize::into_inner)
            .collect();
        (cursors, self.overflow.into_inner())
    }
}

/// One thread's staging buffers: `nbins` fixed-capacity local bins in one
/// contiguous allocation.
pub(crate) struct LocalBins<'g, 'a, K> {
    global: &'g GlobalBins<'a, K>,
    buf: Vec<Record<K>>,
    fill: Vec<u32>,
    cap: usize,
}

impl<'g, 'a, K: RadixKey> LocalBins<'g, 'a, K> {
    pub(crate) fn new(global: &'g GlobalBins<'a, K>, nbins: usize, cap: usize) -> Self {
        assert!(cap >= 1);
        Self {
            global,
            buf: vec![Record::new(K::default(), 0.0); nbins * cap],
            fill: vec![0; nbins],
            cap,
        }
    }

    #[inline]
    pub(crate) fn push(&mut self, bin: usize, rec: Record<K>) {
        let f = self.fill[bin] as usize;
        let f = if f == self.cap {
            self.flush(bin);
            0
        } else {
            f
        };
        self.buf[bin * self.cap + f] = rec;
        self.fill[bin] = (f + 1) as u32;
    }

    fn flush(&mut self, bin: usize) {
        let start = bin * self.cap;
        let len = self.fill[bin] as usize;
        self.global.append(bin, &self.buf[start..start + len]);
        self.fill[bin] = 0;
    }

    /// Flushes every non-empty local bin.
    pub(crate) fn drain(&mut self) {
        for bin in 0..self.fill.len() {
            if self.fill[bin] != 0 {
                self.flush(bin);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_sizes() {
        assert_eq!(std::mem::size_of::<Record<u32>>(), 12);
        assert_eq!(std::mem::size_of::<Record<u64>>(), 16);
    }
}
