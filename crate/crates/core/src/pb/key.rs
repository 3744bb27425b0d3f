//! Packed sort keys.
//!
//! Inside a bin every row lies in `[bin_base, bin_base + rows_in_bin)`, so a
//! key only needs the row offset: `key = (rowid - bin_base) << col_bits | colid`.
//! Unsigned order on keys is then `(rowid, colid)` lexicographic order.

use std::fmt::Debug;

/// Number of bits needed to represent every value in `0..n`.
pub fn bits_for(n: usize) -> u32 {
    if n <= 1 {
        0
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum KeyWidth {
    W32,
    W64,
}

impl KeyWidth {
    pub fn for_bits(bits: u32) -> Self {
        if bits <= 32 {
            KeyWidth::W32
        } else {
            KeyWidth::W64
        }
    }

    pub fn bytes(self) -> usize {
        match self {
            KeyWidth::W32 => 4,
            KeyWidth::W64 => 8,
        }
    }

    pub fn bits(self) -> u32 {
        8 * self.bytes() as u32
    }
}

/// Bit layout shared by every bin of one multiplication.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KeyLayout {
    pub row_bits: u32,
    pub col_bits: u32,
    pub width: KeyWidth,
}

impl KeyLayout {
    /// `max_rows_in_bin` is the widest bin's row span.
    pub fn new(max_rows_in_bin: usize, ncols: usize) -> Self {
        let row_bits = bits_for(max_rows_in_bin);
        let col_bits = bits_for(ncols);
        Self {
            row_bits,
            col_bits,
            width: KeyWidth::for_bits(row_bits + col_bits),
        }
    }

    #[inline]
    pub fn col_mask(&self) -> u64 {
        (1u64 << self.col_bits) - 1
    }
}

/// Unsigned integer usable as an in-place radix sort key.
pub trait RadixKey: Copy + Ord + Debug + Default + Send + Sync + 'static {
    const BYTES: usize;
    const WIDTH: KeyWidth;

    fn from_u64(v: u64) -> Self;
    fn to_u64(self) -> u64;

    /// Byte `i`, counting from the least significant.
    #[inline]
    fn byte(self, i: usize) -> usize {
        ((self.to_u64() >> (8 * i)) & 0xff) as usize
    }
}

impl RadixKey for u32 {
    const BYTES: usize = 4;
    const WIDTH: KeyWidth = KeyWidth::W32;

    #[inline]
    fn from_u64(v: u64) -> Self {
        debug_assert!(v <= u32::MAX as u64);
        v as u32
    }

    #[inline]
    fn to_u64(self) -> u64 {
        self as u64
    }

    #[inline]
    fn byte(self, i: usize) -> usize {
        ((self >> (8 * i)) & 0xff) as usize
    }
}

impl RadixKey for u64 {
    const BYTES: usize = 8;
    const WIDTH: KeyWidth = KeyWidth::W64;

    #[inline]
    fn from_u64(v: u64) -> Self {
        v
    }

    #[inline]
    fn to_u64(self) -> u64 {
        self
    }
}

/// A key of either width.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PackedKey {
    K32(u32),
    K64(u64),
}

impl PackedKey {
    pub fn to_u64(self) -> u64 {
        match self {
            PackedKey::K32(k) => k as u64,
            PackedKey::K64(k) => k,
        }
    }
}

/// Packs `(rowid, colid)` relative to `bin_base`. The caller guarantees
/// `rowid >= bin_base` and that the widths fit `key_width`.
#[inline]
pub fn pack_key(
    rowid: u32,
    colid: u32,
    bin_base: u32,
    col_bits: u32,
    key_width: KeyWidth,
) -> PackedKey {
    debug_assert!(rowid >= bin_base);
    debug_assert!(col_bits == 32 || (colid as u64) < (1u64 << col_bits));
    let raw = ((rowid - bin_base) as u64) << col_bits | colid as u64;
    match key_width {
        KeyWidth::W32 => PackedKey::K32(u32::from_u64(raw)),
        KeyWidth::W64 => PackedKey::K64(raw),
    }
}

#[inline]
pub fn unpack_key(key: PackedKey, bin_base: u32, col_bits: u32) -> (u32, u32) {
    unpack_raw(key.to_u64(), bin_base, col_bits)
}

#[inline]
pub(crate) fn unpack_raw(raw: u64, bin_base: u32, col_bits: u32) -> (u32, u32) {
    let mask = (1u64 << col_bits) - 1;
    (bin_base + (raw >> col_bits) as u32, (raw & mask) as u32)
}
