//! Modulation alphabets with natural-binary bit labels, plus the bit
//! arithmetic that splits a source word into antenna and symbol indices.
//!
//! All alphabets are normalized to unit average energy so the transmit power
//! constraint holds under uniform symbol use. Labeling is natural binary by
//! index (uniform mapping); no Gray coding.

use num_complex::Complex64;
use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};

/// An ordered complex symbol alphabet of size `M = 2^bits_per_symbol`.
#[derive(Debug, Clone)]
pub struct Constellation {
    name: String,
    symbols: Vec<Complex64>,
    bits_per_symbol: u32,
}

impl Constellation {
    fn validate(name: &str, symbols: Vec<Complex64>) -> Result<Self> {
        let m = symbols.len();
        if m == 0 || !m.is_power_of_two() {
            return Err(Error::invalid("constellation", format!("size {m} is not a power of two")));
        }
        let energy: f64 = symbols.iter().map(|s| s.norm_sqr()).sum::<f64>() / m as f64;
        if (energy - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(
                "constellation",
                format!("average energy {energy} != 1"),
            ));
        }
        for i in 0..m {
            for j in (i + 1)..m {
                if symbols[i] == symbols[j] {
                    return Err(Error::invalid(
                        "constellation",
                        format!("duplicate symbol at indices {i} and {j}"),
                    ));
                }
            }
        }
        Ok(Self {
            name: name.to_string(),
            symbols,
            bits_per_symbol: m.trailing_zeros(),
        })
    }

    /// The degenerate single-symbol alphabet used by SSK: all information is
    /// carried by the antenna index.
    pub fn ssk() -> Self {
        Self {
            name: "ssk".to_string(),
            symbols: vec![Complex64::ONE],
            bits_per_symbol: 0,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn size(&self) -> usize {
        self.symbols.len()
    }

    pub fn bits_per_symbol(&self) -> u32 {
        self.bits_per_symbol
    }

    pub fn symbol(&self, v: usize) -> Complex64 {
        self.symbols[v]
    }

    pub fn symbols(&self) -> &[Complex64] {
        &self.symbols
    }

    pub fn average_energy(&self) -> f64 {
        self.symbols.iter().map(|s| s.norm_sqr()).sum::<f64>() / self.size() as f64
    }
}

/// Rectangular grid over ascending real levels (outer) and ascending
/// imaginary levels (inner), normalized to unit average energy.
fn rectangular_grid(re_levels: &[f64], im_levels: &[f64]) -> Vec<Complex64> {
    let mut pts = Vec::with_capacity(re_levels.len() * im_levels.len());
    for &re in re_levels {
        for &im in im_levels {
            pts.push(Complex64::new(re, im));
        }
    }
    let mean_energy = pts.iter().map(|p| p.norm_sqr()).sum::<f64>() / pts.len() as f64;
    let norm = mean_energy.sqrt();
    pts.into_iter().map(|p| p / norm).collect()
}

/// Build one of the supported alphabets: `bpsk`, `qpsk`, `qam8`, `qam16`,
/// `qam32`. QAM grids are the standard rectangular ones (8 = 4x2, 16 = 4x4,
/// 32 = 8x4), indexed row-major over (real ascending, imaginary ascending).
pub fn build_constellation(name: &str) -> Result<Constellation> {
    let symbols = match name {
        "bpsk" => vec![Complex64::ONE, -Complex64::ONE],
        // Index k = (b1 b0) -> ((1 - 2 b1) + i (1 - 2 b0)) / sqrt(2).
        "qpsk" => (0..4)
            .map(|k| {
                let b1 = (k >> 1) & 1;
                let b0 = k & 1;
                Complex64::new(
                    (1 - 2 * b1) as f64 * FRAC_1_SQRT_2,
                    (1 - 2 * b0) as f64 * FRAC_1_SQRT_2,
                )
            })
            .collect(),
        "qam8" => rectangular_grid(&[-3.0, -1.0, 1.0, 3.0], &[-1.0, 1.0]),
        "qam16" => rectangular_grid(&[-3.0, -1.0, 1.0, 3.0], &[-3.0, -1.0, 1.0, 3.0]),
        "qam32" => rectangular_grid(
            &[-7.0, -5.0, -3.0, -1.0, 1.0, 3.0, 5.0, 7.0],
            &[-3.0, -1.0, 1.0, 3.0],
        ),
        other => {
            return Err(Error::UnsupportedConstellation { name: other.to_string() });
        }
    };
    Constellation::validate(name, symbols)
}

/// Bit budget of a spatial-modulation system: `antenna_bits` select one of
/// `n_t` transmit antennas, `symbol_bits` select a constellation point, and
/// the spectral efficiency is their sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SmDimensions {
    n_t: usize,
    antenna_bits: u32,
    symbol_bits: u32,
}

impl SmDimensions {
    pub fn new(n_t: usize, constellation: &Constellation) -> Result<Self> {
        if n_t == 0 || !n_t.is_power_of_two() {
            return Err(Error::invalid("n_t", format!("{n_t} is not a power of two")));
        }
        let antenna_bits = n_t.trailing_zeros();
        let symbol_bits = constellation.bits_per_symbol();
        if antenna_bits + symbol_bits == 0 {
            return Err(Error::invalid(
                "dimensions",
                "one antenna and one symbol carry no information",
            ));
        }
        Ok(Self { n_t, antenna_bits, symbol_bits })
    }

    pub fn n_t(&self) -> usize {
        self.n_t
    }

    pub fn antenna_bits(&self) -> u32 {
        self.antenna_bits
    }

    pub fn symbol_bits(&self) -> u32 {
        self.symbol_bits
    }

    /// Spectral efficiency in bits per transmission.
    pub fn spectral_efficiency(&self) -> u32 {
        self.antenna_bits + self.symbol_bits
    }

    pub fn symbol_count(&self) -> usize {
        1usize << self.symbol_bits
    }

    /// Number of (antenna, symbol) hypotheses.
    pub fn hypothesis_count(&self) -> usize {
        self.n_t << self.symbol_bits
    }

    /// Concatenated natural-binary label: antenna bits (MSB side) then
    /// symbol bits.
    pub fn label(&self, antenna: usize, symbol: usize) -> u32 {
        debug_assert!(antenna < self.n_t && symbol < self.symbol_count());
        ((antenna as u32) << self.symbol_bits) | symbol as u32
    }
}

/// Split an MSB-first bit vector of length `R` into the antenna index (first
/// `n` bits) and symbol index (last `m` bits).
pub fn split_bits(bits: &[u8], dims: &SmDimensions) -> Result<(usize, usize)> {
    let r = dims.spectral_efficiency() as usize;
    if bits.len() != r {
        return Err(Error::LabelLength { expected: r, actual: bits.len() });
    }
    let mut word = 0u32;
    for &b in bits {
        if b > 1 {
            return Err(Error::invalid("bits", format!("bit value {b} is not 0 or 1")));
        }
        word = (word << 1) | b as u32;
    }
    let symbol_mask = (1u32 << dims.symbol_bits()) - 1;
    Ok(((word >> dims.symbol_bits()) as usize, (word & symbol_mask) as usize))
}

/// Inverse of [`split_bits`].
pub fn merge_bits(antenna: usize, symbol: usize, dims: &SmDimensions) -> Result<Vec<u8>> {
    check_indices(antenna, symbol, dims)?;
    let r = dims.spectral_efficiency();
    let word = dims.label(antenna, symbol);
    Ok((0..r).rev().map(|i| ((word >> i) & 1) as u8).collect())
}

fn check_indices(antenna: usize, symbol: usize, dims: &SmDimensions) -> Result<()> {
    if antenna >= dims.n_t() {
        return Err(Error::IndexOutOfRange { what: "antenna", value: antenna, bound: dims.n_t() });
    }
    if symbol >= dims.symbol_count() {
        return Err(Error::IndexOutOfRange {
            what: "symbol",
            value: symbol,
            bound: dims.symbol_count(),
        });
    }
    Ok(())
}

/// Number of differing bits between the concatenated labels of
/// `(antenna u, symbol v)` and `(antenna u_hat, symbol v_hat)`.
pub fn hamming_label_distance(
    u: usize,
    v: usize,
    u_hat: usize,
    v_hat: usize,
    dims: &SmDimensions,
) -> Result<u32> {
    check_indices(u, v, dims)?;
    check_indices(u_hat, v_hat, dims)?;
    Ok((dims.label(u, v) ^ dims.label(u_hat, v_hat)).count_ones())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const ALL_NAMES: [&str; 5] = ["bpsk", "qpsk", "qam8", "qam16", "qam32"];

    #[test]
    fn all_alphabets_have_unit_energy() {
        for name in ALL_NAMES {
            let c = build_constellation(name).unwrap();
            assert!((c.average_energy() - 1.0).abs() <= 1e-12, "{name}");
            assert!(c.size().is_power_of_two());
        }
        let ssk = Constellation::ssk();
        assert_eq!(ssk.size(), 1);
        assert!((ssk.average_energy() - 1.0).abs() <= 1e-15);
    }

    #[test]
    fn bpsk_points() {
        let c = build_constellation("bpsk").unwrap();
        assert_eq!(c.symbol(0), Complex64::ONE);
        assert_eq!(c.symbol(1), -Complex64::ONE);
    }

    #[test]
    fn qpsk_point_order() {
        let c = build_constellation("qpsk").unwrap();
        let s = FRAC_1_SQRT_2;
        let want = [
            Complex64::new(s, s),
            Complex64::new(s, -s),
            Complex64::new(-s, s),
            Complex64::new(-s, -s),
        ];
        for (k, w) in want.iter().enumerate() {
            assert!((c.symbol(k) - w).norm() < 1e-15, "index {k}");
        }
    }

    #[test]
    fn qam16_grid_levels() {
        let c = build_constellation("qam16").unwrap();
        let norm = 10.0f64.sqrt();
        // Row-major (real ascending, imag ascending): first point is
        // (-3 - 3i) / sqrt(10), last is (3 + 3i) / sqrt(10).
        assert!((c.symbol(0) - Complex64::new(-3.0 / norm, -3.0 / norm)).norm() < 1e-15);
        assert!((c.symbol(15) - Complex64::new(3.0 / norm, 3.0 / norm)).norm() < 1e-15);
        for s in c.symbols() {
            let re = (s.re * norm).round();
            let im = (s.im * norm).round();
            assert!([-3.0, -1.0, 1.0, 3.0].contains(&re));
            assert!([-3.0, -1.0, 1.0, 3.0].contains(&im));
        }
    }

    #[test]
    fn qam8_and_qam32_normalizers() {
        let q8 = build_constellation("qam8").unwrap();
        assert!((q8.symbol(0).re * 6.0f64.sqrt() - (-3.0)).abs() < 1e-12);
        let q32 = build_constellation("qam32").unwrap();
        assert!((q32.symbol(0).re * 26.0f64.sqrt() - (-7.0)).abs() < 1e-12);
    }

    #[test]
    fn unknown_name_rejected() {
        assert!(matches!(
            build_constellation("qam64"),
            Err(Error::UnsupportedConstellation { .. })
        ));
    }

    #[test]
    fn split_known_words() {
        let c = build_constellation("bpsk").unwrap();
        let dims = SmDimensions::new(4, &c).unwrap(); // R = 3
        assert_eq!(split_bits(&[0, 0, 0], &dims).unwrap(), (0, 0));
        assert_eq!(split_bits(&[1, 0, 1], &dims).unwrap(), (2, 1));
        assert!(matches!(
            split_bits(&[0, 1], &dims),
            Err(Error::LabelLength { expected: 3, actual: 2 })
        ));
    }

    #[test]
    fn split_merge_round_trip_exhaustive() {
        // Every (n_t, constellation) combination with R <= 7.
        for n_t in [1usize, 2, 4] {
            for name in ALL_NAMES {
                let c = build_constellation(name).unwrap();
                let dims = match SmDimensions::new(n_t, &c) {
                    Ok(d) => d,
                    Err(_) => continue,
                };
                let r = dims.spectral_efficiency();
                if r > 7 {
                    continue;
                }
                for word in 0u32..(1 << r) {
                    let bits: Vec<u8> = (0..r).rev().map(|i| ((word >> i) & 1) as u8).collect();
                    let (u, v) = split_bits(&bits, &dims).unwrap();
                    assert_eq!(merge_bits(u, v, &dims).unwrap(), bits);
                }
            }
        }
    }

    #[test]
    fn hamming_known_values() {
        let c = build_constellation("bpsk").unwrap();
        let dims = SmDimensions::new(4, &c).unwrap();
        assert_eq!(hamming_label_distance(1, 1, 1, 1, &dims).unwrap(), 0);
        // Labels 000 vs 011.
        assert_eq!(hamming_label_distance(0, 0, 1, 1, &dims).unwrap(), 2);
        assert!(matches!(
            hamming_label_distance(4, 0, 0, 0, &dims),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn hamming_total_matches_brute_force() {
        let c = build_constellation("bpsk").unwrap();
        let dims = SmDimensions::new(4, &c).unwrap();
        let r = dims.spectral_efficiency();
        let labels = 1u32 << r;
        // Brute force over raw labels.
        let mut want = 0u64;
        for a in 0..labels {
            for b in 0..labels {
                want += (a ^ b).count_ones() as u64;
            }
        }
        let mut got = 0u64;
        for u in 0..dims.n_t() {
            for v in 0..dims.symbol_count() {
                for uh in 0..dims.n_t() {
                    for vh in 0..dims.symbol_count() {
                        got += hamming_label_distance(u, v, uh, vh, &dims).unwrap() as u64;
                    }
                }
            }
        }
        assert_eq!(got, want);
        // Each of the R bit positions differs in exactly half of all ordered
        // label pairs.
        assert_eq!(want, r as u64 * (labels as u64).pow(2) / 2);
    }

    proptest! {
        #[test]
        fn hamming_is_a_metric(
            a in 0usize..32, b in 0usize..32, c_idx in 0usize..32,
        ) {
            let cons = build_constellation("qam8").unwrap();
            let dims = SmDimensions::new(4, &cons).unwrap(); // R = 5, 32 labels
            let split = |x: usize| (x >> dims.symbol_bits(), x & (dims.symbol_count() - 1));
            let (ua, va) = split(a);
            let (ub, vb) = split(b);
            let (uc, vc) = split(c_idx);
            let dab = hamming_label_distance(ua, va, ub, vb, &dims).unwrap();
            let dba = hamming_label_distance(ub, vb, ua, va, &dims).unwrap();
            let dac = hamming_label_distance(ua, va, uc, vc, &dims).unwrap();
            let dcb = hamming_label_distance(uc, vc, ub, vb, &dims).unwrap();
            prop_assert_eq!(dab, dba);
            prop_assert_eq!(dab == 0, a == b);
            prop_assert!(dab <= dac + dcb);
        }

        #[test]
        fn split_then_merge_is_identity(word in 0u32..128) {
            let cons = build_constellation("qam32").unwrap();
            let dims = SmDimensions::new(4, &cons).unwrap(); // R = 7
            let r = dims.spectral_efficiency();
            let bits: Vec<u8> = (0..r).rev().map(|i| ((word >> i) & 1) as u8).collect();
            let (u, v) = split_bits(&bits, &dims).unwrap();
            prop_assert_eq!(merge_bits(u, v, &dims).unwrap(), bits);
        }
    }
}
