//! LoS codebook, phase quantizers, and the feedback-message codec.
//!
//! For a pure LoS cascade the optimal per-element phases are a linear ramp
//! in `sin(theta_1) + sin(theta_2)`, so the whole configuration can be fed
//! back as one index into a grid of midpoints over (-2, 2). The grid needs
//! only `ceil(1.1746 + log2(N))` bits to keep the array gain above half its
//! peak, versus `N*b` bits for naive element-wise quantization.
//!
//! All phases are canonical in `[-pi, pi)`, with `pi` mapping to `-pi`.
//! Indexing is 0-based throughout: grid entry `i` covers
//! `Theta_i = -2 + 2^(1-l) + i 2^(2-l)` and element `n` of a configuration
//! applies `psi_n = pi n Theta_i`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::{Error, Result};

/// Reduces a phase to the canonical interval `[-pi, pi)`.
pub fn canonical_phase(phase: f64) -> f64 {
    (phase + PI).rem_euclid(TAU) - PI
}

/// The per-element phase shifts plus the common rotation applied to the
/// whole surface; exactly the information a feedback message conveys.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseConfig {
    element_phases: Vec<f64>,
    common_phase: f64,
}

impl PhaseConfig {
    /// Builds a configuration, canonicalizing every phase to `[-pi, pi)`.
    pub fn new(element_phases: Vec<f64>, common_phase: f64) -> Self {
        let element_phases = element_phases.into_iter().map(canonical_phase).collect();
        Self {
            element_phases,
            common_phase: canonical_phase(common_phase),
        }
    }

    pub fn len(&self) -> usize {
        self.element_phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.element_phases.is_empty()
    }

    pub fn element_phases(&self) -> &[f64] {
        &self.element_phases
    }

    pub fn common_phase(&self) -> f64 {
        self.common_phase
    }

    /// Same per-element phases with a new common rotation.
    pub fn with_common_phase(mut self, common_phase: f64) -> Self {
        self.common_phase = canonical_phase(common_phase);
        self
    }

    /// Absorbs the common rotation into every element phase and clears it.
    /// Used by the element-wise scheme, whose message has no separate
    /// common-phase field.
    pub fn fold_common_phase(self) -> Self {
        let phi = self.common_phase;
        let folded = self
            .element_phases
            .into_iter()
            .map(|psi| canonical_phase(psi + phi))
            .collect();
        Self {
            element_phases: folded,
            common_phase: 0.0,
        }
    }
}

/// Smallest codebook size (in bits) that keeps the array gain of an
/// `elements`-element RIS above half its peak for any pair of angles:
/// `ceil(1.1746 + log2(N))`.
pub fn required_bits(elements: usize) -> u32 {
    assert!(elements >= 1, "RIS needs at least one element");
    (1.1746 + (elements as f64).log2()).ceil() as u32
}

/// The angle-sum codebook: `2^index_bits` midpoints of equal cells over
/// (-2, 2). Entries are derived on demand, never stored.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LosCodebook {
    index_bits: u32,
    elements: usize,
}

impl LosCodebook {
    pub fn new(index_bits: u32, elements: usize) -> Result<Self> {
        if elements == 0 {
            return Err(Error::InvalidArgument(
                "codebook needs at least one RIS element".into(),
            ));
        }
        if index_bits > 32 {
            return Err(Error::InvalidArgument(format!(
                "codebook index width {index_bits} exceeds 32 bits"
            )));
        }
        Ok(Self {
            index_bits,
            elements,
        })
    }

    pub fn index_bits(&self) -> u32 {
        self.index_bits
    }

    pub fn elements(&self) -> usize {
        self.elements
    }

    pub fn len(&self) -> u64 {
        1u64 << self.index_bits
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn cell_width(&self) -> f64 {
        2f64.powi(2 - self.index_bits as i32)
    }

    fn first_entry(&self) -> f64 {
        -2.0 + 2f64.powi(1 - self.index_bits as i32)
    }

    /// Grid value `Theta_i = -2 + 2^(1-l) + i 2^(2-l)`, strictly inside
    /// (-2, 2).
    pub fn entry(&self, index: u64) -> Result<f64> {
        if index >= self.len() {
            return Err(Error::InvalidArgument(format!(
                "codebook index {index} out of range for {} entries",
                self.len()
            )));
        }
        Ok(self.first_entry() + index as f64 * self.cell_width())
    }

    /// Index of the entry closest to `angle_sum`; the quantization error is
    /// at most half a cell, `2^(1-l)`. A value exactly between two entries
    /// goes to the lower index.
    pub fn nearest(&self, angle_sum: f64) -> Result<u64> {
        if !(-2.0..=2.0).contains(&angle_sum) {
            return Err(Error::InvalidArgument(format!(
                "angle sum {angle_sum} outside [-2, 2]"
            )));
        }
        if self.index_bits == 0 {
            return Ok(0);
        }
        let pos = (angle_sum - self.first_entry()) / self.cell_width();
        let base = pos.floor();
        let index = base as i64 + i64::from(pos - base > 0.5);
        Ok(index.clamp(0, self.len() as i64 - 1) as u64)
    }

    /// Expands entry `index` into the phase ramp `psi_n = pi n Theta_i`
    /// (common rotation zero).
    pub fn expand(&self, index: u64) -> Result<PhaseConfig> {
        let theta = self.entry(index)?;
        let phases = (0..self.elements).map(|n| PI * n as f64 * theta).collect();
        Ok(PhaseConfig::new(phases, 0.0))
    }
}

/// Phase ramp that perfectly aligns a pure LoS cascade:
/// `psi_n = pi n (sin(theta_1) + sin(theta_2))` (common rotation zero).
pub fn optimal_phases(ris_to_bs: f64, ue_to_ris: f64, elements: usize) -> PhaseConfig {
    assert!(elements >= 1, "RIS needs at least one element");
    let slope = PI * (ris_to_bs.sin() + ue_to_ris.sin());
    PhaseConfig::new((0..elements).map(|n| slope * n as f64).collect(), 0.0)
}

/// Index of the point nearest to `phase` among the `2^bits` equally spaced
/// grid points `-pi + 2 pi k / 2^bits`, measured on the circle. A phase
/// exactly between two points rounds up, wrapping past `pi` back to `-pi`.
pub fn phase_grid_index(phase: f64, bits: u32) -> u64 {
    debug_assert!((1..=32).contains(&bits));
    let cells = 1u64 << bits;
    // Work in units of pi so that dyadic fractions of pi index exactly.
    let pos = (canonical_phase(phase) / PI + 1.0) * (cells as f64 / 2.0);
    let base = pos.floor();
    let index = base as u64 + u64::from(pos - base >= 0.5);
    index % cells
}

/// Grid point `-pi + 2 pi k / 2^bits` for index `k`.
pub fn phase_from_grid_index(index: u64, bits: u32) -> Result<f64> {
    let cells = 1u64 << bits.min(63);
    if bits > 32 || index >= cells {
        return Err(Error::InvalidArgument(format!(
            "phase index {index} out of range for {bits}-bit grid"
        )));
    }
    Ok(-PI + index as f64 * (TAU / cells as f64))
}

/// Rounds every element phase to the nearest point of the `2^bits` uniform
/// grid; the per-element error lies in `(-pi/2^bits, pi/2^bits]`. The common
/// rotation passes through untouched.
pub fn quantize_elementwise(config: &PhaseConfig, bits: u32) -> Result<PhaseConfig> {
    if bits == 0 {
        return Err(Error::InvalidArgument(
            "element-wise quantizer needs at least one bit".into(),
        ));
    }
    if bits > 32 {
        return Err(Error::InvalidArgument(format!(
            "element quantizer width {bits} exceeds 32 bits"
        )));
    }
    let quantized = config
        .element_phases()
        .iter()
        .map(|&psi| {
            phase_from_grid_index(phase_grid_index(psi, bits), bits)
                .expect("grid index is in range by construction")
        })
        .collect();
    Ok(PhaseConfig::new(quantized, config.common_phase()))
}

/// Common rotation that aligns the reflected path with the static path:
/// `arg(a_K^H h_s)`, canonical in `[-pi, pi)`. A zero static path yields 0.
pub fn optimal_common_phase(bs_response: &[Complex64], static_path: &[Complex64]) -> f64 {
    let inner: Complex64 = bs_response
        .iter()
        .zip(static_path)
        .map(|(a, h)| a.conj() * h)
        .sum();
    if inner.norm_sqr() == 0.0 {
        0.0
    } else {
        canonical_phase(inner.arg())
    }
}

/// Quantizes the common rotation to `2^bits` points on the unit circle;
/// zero bits convey nothing and the surface applies no rotation.
pub fn quantize_common_phase(phase: f64, bits: u32) -> f64 {
    if bits == 0 {
        return 0.0;
    }
    phase_from_grid_index(phase_grid_index(phase, bits), bits)
        .expect("grid index is in range by construction")
}

/// Which of the two feedback layouts a message uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FeedbackScheme {
    Codebook,
    Elementwise,
}

/// Bit widths of the three quantizers: `index_bits` for the codebook entry,
/// `common_bits` for the common rotation, `element_bits` per element.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct QuantizerSpec {
    pub index_bits: u32,
    pub common_bits: u32,
    pub element_bits: u32,
}

/// The integer indices a message carries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FeedbackIndices {
    Codebook { entry: u64, common: u64 },
    Elementwise(Vec<u64>),
}

/// A bit-exact feedback message. `payload` packs the fields MSB-first and is
/// zero-padded to a byte boundary; `bit_len` is the exact payload width
/// before padding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeedbackMessage {
    pub scheme: FeedbackScheme,
    pub payload: Vec<u8>,
    pub bit_len: u32,
}

struct BitWriter {
    bytes: Vec<u8>,
    bits_used: u32,
}

impl BitWriter {
    fn new() -> Self {
        Self {
            bytes: Vec::new(),
            bits_used: 0,
        }
    }

    fn push(&mut self, value: u64, width: u32) {
        for i in (0..width).rev() {
            let bit = ((value >> i) & 1) as u8;
            let byte_index = (self.bits_used / 8) as usize;
            if byte_index == self.bytes.len() {
                self.bytes.push(0);
            }
            self.bytes[byte_index] |= bit << (7 - self.bits_used % 8);
            self.bits_used += 1;
        }
    }
}

struct BitReader<'a> {
    bytes: &'a [u8],
    cursor: u32,
}

impl<'a> BitReader<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, cursor: 0 }
    }

    fn read(&mut self, width: u32) -> u64 {
        let mut value = 0u64;
        for _ in 0..width {
            let byte = self.bytes[(self.cursor / 8) as usize];
            let bit = (byte >> (7 - self.cursor % 8)) & 1;
            value = (value << 1) | u64::from(bit);
            self.cursor += 1;
        }
        value
    }
}

fn check_width(value: u64, width: u32, what: &str) -> Result<()> {
    if width > 64 {
        return Err(Error::InvalidArgument(format!(
            "{what} width {width} exceeds 64 bits"
        )));
    }
    if width < 64 && value >> width != 0 {
        return Err(Error::InvalidArgument(format!(
            "{what} value {value} does not fit in {width} bits"
        )));
    }
    Ok(())
}

/// Packs feedback indices into a message. The codebook layout is the entry
/// index followed by the common-phase index; the element-wise layout is the
/// per-element indices in element order.
pub fn encode_message(spec: &QuantizerSpec, indices: &FeedbackIndices) -> Result<FeedbackMessage> {
    let mut writer = BitWriter::new();
    let (scheme, bit_len) = match indices {
        FeedbackIndices::Codebook { entry, common } => {
            check_width(*entry, spec.index_bits, "codebook entry")?;
            check_width(*common, spec.common_bits, "common phase")?;
            writer.push(*entry, spec.index_bits);
            writer.push(*common, spec.common_bits);
            (FeedbackScheme::Codebook, spec.index_bits + spec.common_bits)
        }
        FeedbackIndices::Elementwise(per_element) => {
            let total = (per_element.len() as u64).checked_mul(u64::from(spec.element_bits));
            let bit_len = match total {
                Some(t) if t <= u64::from(u32::MAX) => t as u32,
                _ => {
                    return Err(Error::InvalidArgument(
                        "element-wise message too large".into(),
                    ))
                }
            };
            for (n, &index) in per_element.iter().enumerate() {
                check_width(index, spec.element_bits, &format!("element {n}"))?;
                writer.push(index, spec.element_bits);
            }
            (FeedbackScheme::Elementwise, bit_len)
        }
    };
    Ok(FeedbackMessage {
        scheme,
        payload: writer.bytes,
        bit_len,
    })
}

/// Inverse of [`encode_message`]. Rejects payloads whose length, declared
/// bit count, or padding bits are inconsistent with the quantizer spec.
pub fn decode_message(
    msg: &FeedbackMessage,
    spec: &QuantizerSpec,
    elements: usize,
) -> Result<FeedbackIndices> {
    let expected_bits = match msg.scheme {
        FeedbackScheme::Codebook => spec.index_bits as u64 + spec.common_bits as u64,
        FeedbackScheme::Elementwise => elements as u64 * spec.element_bits as u64,
    };
    if u64::from(msg.bit_len) != expected_bits {
        return Err(Error::MalformedMessage(format!(
            "message declares {} bits but the spec implies {expected_bits}",
            msg.bit_len
        )));
    }
    let expected_bytes = expected_bits.div_ceil(8) as usize;
    if msg.payload.len() != expected_bytes {
        return Err(Error::MalformedMessage(format!(
            "payload is {} bytes but {expected_bits} bits need {expected_bytes}",
            msg.payload.len()
        )));
    }
    let pad_bits = (expected_bytes as u64 * 8 - expected_bits) as u32;
    if pad_bits > 0 {
        let last = msg.payload[expected_bytes - 1];
        if last & ((1u8 << pad_bits) - 1) != 0 {
            return Err(Error::MalformedMessage("padding bits must be zero".into()));
        }
    }
    let mut reader = BitReader::new(&msg.payload);
    Ok(match msg.scheme {
        FeedbackScheme::Codebook => FeedbackIndices::Codebook {
            entry: reader.read(spec.index_bits),
            common: reader.read(spec.common_bits),
        },
        FeedbackScheme::Elementwise => FeedbackIndices::Elementwise(
            (0..elements)
                .map(|_| reader.read(spec.element_bits))
                .collect(),
        ),
    })
}
