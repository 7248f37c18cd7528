const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
const INDEX_MULT: u64 = 0xD1B5_4A32_D192_ED03;

/// SplitMix64 finalizer: a bijection on `u64` with full avalanche.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of realization `index` under `master`.
///
/// For a fixed master the map `index -> seed` is a bijection (xor with a
/// constant of an odd multiple, then `mix64`), so distinct indices never
/// collide; likewise distinct masters never collide at a fixed index.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let key = mix64(master.wrapping_add(GOLDEN));
    mix64(key ^ index.wrapping_mul(INDEX_MULT))
}
