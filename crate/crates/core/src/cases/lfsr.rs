//! Linear feedback shift register stream cipher and set-based key recovery.
//!
//! Register cells are numbered `1..=length`. On every clock the output is
//! the XOR of the output taps, the XOR of the feedback taps is written to
//! cell 1 and every other cell moves one position up; the last cell falls
//! off. The key is the initial register content, `key[0]` in cell 1.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::binvec::{BinaryMatrix, BinaryVector};
use crate::error::{Error, Result};
use crate::logical::LogicalZonotope;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LfsrSpec {
    pub length: usize,
    pub feedback: Vec<usize>,
    pub output: Vec<usize>,
    pub message_len: usize,
}

impl Default for LfsrSpec {
    /// 60 cells, feedback from 60, 59, 58 and 14, output from 60 and 59.
    fn default() -> Self {
        LfsrSpec {
            length: 60,
            feedback: vec![60, 59, 58, 14],
            output: vec![60, 59],
            message_len: 120,
        }
    }
}

impl LfsrSpec {
    /// The default tap pattern stretched to `length` cells, with a message of
    /// two register lengths.
    pub fn scaled(length: usize) -> Result<Self> {
        if length < 3 {
            return Err(Error::Invalid(format!("register needs at least 3 cells, got {length}")));
        }
        let low = ((14 * length) as f64 / 60.0).round().max(1.0) as usize;
        let mut feedback = vec![length, length - 1, length - 2];
        if !feedback.contains(&low) {
            feedback.push(low);
        }
        let spec = LfsrSpec {
            length,
            feedback,
            output: vec![length, length - 1],
            message_len: 2 * length,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.length < 3 {
            return Err(Error::Invalid(format!(
                "register needs at least 3 cells, got {}",
                self.length
            )));
        }
        if self.output.is_empty() {
            return Err(Error::Invalid("no output taps".into()));
        }
        if self.feedback.is_empty() {
            return Err(Error::Invalid("no feedback taps".into()));
        }
        for &t in self.feedback.iter().chain(&self.output) {
            if t == 0 || t > self.length {
                return Err(Error::Invalid(format!(
                    "tap {t} outside 1..={}",
                    self.length
                )));
            }
        }
        Ok(())
    }
}

/// A value the register can hold in one cell.
pub trait KeyBit: Clone {
    fn xor(&self, other: &Self) -> Self;
}

impl KeyBit for bool {
    fn xor(&self, other: &Self) -> Self {
        self ^ other
    }
}

impl KeyBit for LogicalZonotope {
    fn xor(&self, other: &Self) -> Self {
        LogicalZonotope::xor(self, other)
            .expect("cells are one bit wide")
            .reduce()
    }
}

fn xor_taps<B: KeyBit>(reg: &[B], taps: &[usize]) -> B {
    let mut acc = reg[taps[0] - 1].clone();
    for &t in &taps[1..] {
        acc = acc.xor(&reg[t - 1]);
    }
    acc
}

/// `len` output values of the register started from `key`.
pub fn keystream<B: KeyBit>(spec: &LfsrSpec, key: &[B], len: usize) -> Result<Vec<B>> {
    spec.validate()?;
    if key.len() != spec.length {
        return Err(Error::dim(spec.length, key.len()));
    }
    let mut reg: Vec<B> = key.to_vec();
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(xor_taps(&reg, &spec.output));
        let fb = xor_taps(&reg, &spec.feedback);
        reg.pop();
        reg.insert(0, fb);
    }
    Ok(out)
}

fn bits_of(v: &BinaryVector) -> Vec<bool> {
    v.bits().collect()
}

/// `message ⊕ keystream(key)`.
pub fn encrypt(spec: &LfsrSpec, key: &BinaryVector, message: &BinaryVector) -> Result<BinaryVector> {
    let ks = keystream(spec, &bits_of(key), message.dim())?;
    let ks = BinaryVector::from_bits(&ks);
    message.op(&ks, crate::binvec::Gate::Xor)
}

/// Key, message and ciphertext for one recovery run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LfsrInstance {
    pub key: BinaryVector,
    pub message: BinaryVector,
    pub cipher: BinaryVector,
}

impl LfsrInstance {
    pub fn new(spec: &LfsrSpec, key: BinaryVector, message: BinaryVector) -> Result<Self> {
        let cipher = encrypt(spec, &key, &message)?;
        Ok(LfsrInstance {
            key,
            message,
            cipher,
        })
    }

    /// Random key (unless given) and random message of `spec.message_len` bits.
    pub fn random(spec: &LfsrSpec, key: Option<BinaryVector>, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = |n: usize| {
            BinaryVector::from_bits(&(0..n).map(|_| rng.gen::<bool>()).collect::<Vec<_>>())
        };
        let random_key = draw(spec.length);
        let message = draw(spec.message_len);
        Self::new(spec, key.unwrap_or(random_key), message)
    }
}

/// Snapshot handed to the observer of [`recover_key_traced`].
#[derive(Clone, Debug)]
pub struct KeySearchState {
    /// Values tried for the first two key bits.
    pub prefix: [bool; 2],
    /// Current per-bit key sets.
    pub key: Vec<LogicalZonotope>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeyRecovery {
    pub key: BinaryVector,
    /// How many prefix branches produced a key that reproduces the cipher.
    /// More than one means the message was too short to pin the key down.
    pub candidates: usize,
}

pub fn recover_key(spec: &LfsrSpec, message: &BinaryVector, cipher: &BinaryVector) -> Result<KeyRecovery> {
    recover_key_traced(spec, message, cipher, &mut |_| {})
}

/// Fixes the first two key bits to each of the four combinations, leaves the
/// rest as `{0,1}` and resolves them in order: a bit is 0 unless that makes
/// some ciphertext bit impossible. Every branch whose key re-encrypts the
/// message to the cipher counts as a candidate; the first one is returned.
pub fn recover_key_traced(
    spec: &LfsrSpec,
    message: &BinaryVector,
    cipher: &BinaryVector,
    observe: &mut dyn FnMut(&KeySearchState),
) -> Result<KeyRecovery> {
    spec.validate()?;
    if message.dim() != cipher.dim() {
        return Err(Error::dim(message.dim(), cipher.dim()));
    }
    let l = spec.length;
    let zero = LogicalZonotope::point(BinaryVector::zeros(1));
    let one = LogicalZonotope::point(BinaryVector::ones(1));
    let both = LogicalZonotope::enclose_points(&[BinaryVector::zeros(1), BinaryVector::ones(1)])?;
    let constant = |b: bool| if b { one.clone() } else { zero.clone() };
    let msg = bits_of(message);
    let ct = bits_of(cipher);

    let consistent = |key: &[LogicalZonotope]| -> Result<bool> {
        let stream = keystream(spec, key, msg.len())?;
        for ((g, &m), &c) in stream.iter().zip(&msg).zip(&ct) {
            let cell = if m { g.not() } else { g.clone() };
            if !cell.contains(&BinaryVector::from_bits(&[c]))? {
                return Ok(false);
            }
        }
        Ok(true)
    };

    let mut found: Option<BinaryVector> = None;
    let mut candidates = 0;
    for prefix in [[false, false], [false, true], [true, false], [true, true]] {
        let mut key = vec![both.clone(); l];
        key[0] = constant(prefix[0]);
        key[1] = constant(prefix[1]);
        observe(&KeySearchState {
            prefix,
            key: key.clone(),
        });
        if !consistent(&key)? {
            continue;
        }
        for j in 2..l {
            key[j] = zero.clone();
            if !consistent(&key)? {
                key[j] = one.clone();
            }
            observe(&KeySearchState {
                prefix,
                key: key.clone(),
            });
        }
        let bits: Vec<bool> = key.iter().map(|z| z.center().get(0)).collect();
        let candidate = BinaryVector::from_bits(&bits);
        if encrypt(spec, &candidate, message)? == *cipher {
            candidates += 1;
            found.get_or_insert(candidate);
        }
    }
    match found {
        Some(key) => Ok(KeyRecovery { key, candidates }),
        None => Err(Error::SearchFailure(
            "no key reproduces the ciphertext; check the taps and message length".into(),
        )),
    }
}

/// Parses a hex key; the most significant bit goes to cell 1.
pub fn key_from_hex(length: usize, text: &str) -> Result<BinaryVector> {
    let digits = text.trim().trim_start_matches("0x").trim_start_matches("0X");
    if digits.is_empty() {
        return Err(Error::BitString(text.to_string()));
    }
    let mut bits = Vec::with_capacity(digits.len() * 4);
    for ch in digits.chars() {
        let d = ch.to_digit(16).ok_or_else(|| Error::BitString(text.to_string()))?;
        bits.extend((0..4).rev().map(|k| d >> k & 1 == 1));
    }
    let first_one = bits.iter().position(|&b| b).unwrap_or(bits.len());
    if bits.len() - first_one > length {
        return Err(Error::Invalid(format!("key {text} does not fit in {length} bits")));
    }
    let mut out = vec![false; length];
    let n = bits.len().min(length);
    out[length - n..].copy_from_slice(&bits[bits.len() - n..]);
    Ok(BinaryVector::from_bits(&out))
}

/// Hex form of a key, most significant bit from cell 1.
pub fn key_to_hex(key: &BinaryVector) -> String {
    let bits: Vec<bool> = key.bits().collect();
    let pad = (4 - bits.len() % 4) % 4;
    let padded: Vec<bool> = std::iter::repeat_n(false, pad).chain(bits).collect();
    let digits: String = padded
        .chunks(4)
        .map(|c| {
            let d = c.iter().fold(0u32, |acc, &b| acc << 1 | b as u32);
            std::char::from_digit(d, 16).expect("nibble")
        })
        .collect();
    format!("0x{digits}")
}

/// A one-bit zonotope per key bit, each `{0,1}`.
pub fn free_key(length: usize) -> Vec<LogicalZonotope> {
    let g = BinaryMatrix::from_columns(1, vec![BinaryVector::ones(1)]).expect("one-bit column");
    vec![LogicalZonotope::new(BinaryVector::zeros(1), g).expect("one-bit zonotope"); length]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bv(s: &str) -> BinaryVector {
        s.parse().unwrap()
    }

    /// Straightforward shift-register simulation on an integer.
    fn reference(length: usize, fb: &[usize], out: &[usize], key: &[bool], n: usize) -> Vec<bool> {
        let mut cells: Vec<bool> = std::iter::once(false).chain(key.iter().copied()).collect();
        let mut res = Vec::new();
        for _ in 0..n {
            res.push(out.iter().fold(false, |a, &t| a ^ cells[t]));
            let f = fb.iter().fold(false, |a, &t| a ^ cells[t]);
            for i in (2..=length).rev() {
                cells[i] = cells[i - 1];
            }
            cells[1] = f;
        }
        res
    }

    #[test]
    fn zero_key_gives_zero_stream() {
        let spec = LfsrSpec::default();
        let ks = keystream(&spec, &[false; 60], 120).unwrap();
        assert!(ks.iter().all(|b| !b));
    }

    #[test]
    fn small_register_by_hand() {
        let spec = LfsrSpec {
            length: 4,
            feedback: vec![4, 3],
            output: vec![4],
            message_len: 8,
        };
        let key = [true, false, false, false];
        let ks = keystream(&spec, &key, 10).unwrap();
        // cell 4 over time: 0 0 0 1, then feedback bits 4^3 of earlier states.
        assert_eq!(&ks[..4], &[false, false, false, true]);
        assert_eq!(ks, reference(4, &[4, 3], &[4], &key, 10));
    }

    #[test]
    fn matches_reference_on_random_keys() {
        let spec = LfsrSpec::scaled(16).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let key: Vec<bool> = (0..16).map(|_| rng.gen()).collect();
            assert_eq!(
                keystream(&spec, &key, 40).unwrap(),
                reference(16, &spec.feedback, &spec.output, &key, 40)
            );
        }
    }

    #[test]
    fn zonotope_stream_covers_concrete_streams() {
        let spec = LfsrSpec::scaled(8).unwrap();
        let free = free_key(8);
        let sets = keystream(&spec, &free, 16).unwrap();
        for k in 0..256u64 {
            let key: Vec<bool> = (0..8).map(|i| k >> i & 1 == 1).collect();
            let ks = keystream(&spec, &key, 16).unwrap();
            for (z, b) in sets.iter().zip(ks) {
                assert!(z.contains(&BinaryVector::from_bits(&[b])).unwrap());
            }
        }
    }

    #[test]
    fn zonotope_stream_equals_union_of_streams() {
        let spec = LfsrSpec::scaled(6).unwrap();
        let sets = keystream(&spec, &free_key(6), 12).unwrap();
        let mut seen = vec![[false; 2]; 12];
        for k in 0..64u64 {
            let key: Vec<bool> = (0..6).map(|i| k >> i & 1 == 1).collect();
            for (t, b) in keystream(&spec, &key, 12).unwrap().into_iter().enumerate() {
                seen[t][b as usize] = true;
            }
        }
        for (z, s) in sets.iter().zip(seen) {
            let got = z.evaluate(8).unwrap();
            assert_eq!(got.contains(&BinaryVector::zeros(1)), s[0]);
            assert_eq!(got.contains(&BinaryVector::ones(1)), s[1]);
        }
    }

    #[test]
    fn true_key_stays_inside_key_sets() {
        let spec = LfsrSpec::scaled(20).unwrap();
        for seed in 0..5 {
            let inst = LfsrInstance::random(&spec, None, seed).unwrap();
            let truth: Vec<bool> = inst.key.bits().collect();
            let mut checked = 0;
            recover_key_traced(&spec, &inst.message, &inst.cipher, &mut |state| {
                if state.prefix == [truth[0], truth[1]] {
                    for (z, &b) in state.key.iter().zip(&truth) {
                        assert!(z.contains(&BinaryVector::from_bits(&[b])).unwrap());
                    }
                    checked += 1;
                }
            })
            .unwrap();
            assert_eq!(checked, 19);
        }
    }

    #[test]
    fn scaled_taps() {
        let s = LfsrSpec::scaled(60).unwrap();
        assert_eq!(s, LfsrSpec::default());
        assert_eq!(LfsrSpec::scaled(30).unwrap().feedback, vec![30, 29, 28, 7]);
        assert!(LfsrSpec::scaled(2).is_err());
        let bad = LfsrSpec {
            feedback: vec![61],
            ..LfsrSpec::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn round_trip_small() {
        let spec = LfsrSpec::scaled(16).unwrap();
        for seed in 0..10 {
            let inst = LfsrInstance::random(&spec, None, seed).unwrap();
            let got = recover_key(&spec, &inst.message, &inst.cipher).unwrap();
            assert_eq!(got.key, inst.key, "seed {seed}");
            assert_eq!(got.candidates, 1);
        }
    }

    #[test]
    fn flipped_cipher_bit_fails() {
        let spec = LfsrSpec::scaled(16).unwrap();
        let inst = LfsrInstance::random(&spec, None, 3).unwrap();
        let mut bad = inst.cipher.clone();
        bad.set(5, !bad.get(5));
        assert!(matches!(
            recover_key(&spec, &inst.message, &bad),
            Err(Error::SearchFailure(_))
        ));
    }

    #[test]
    fn hex_keys() {
        let k = key_from_hex(16, "0xBEEF").unwrap();
        assert_eq!(k, bv("1011111011101111"));
        assert_eq!(key_to_hex(&k), "0xbeef");
        assert_eq!(key_from_hex(6, "0x5").unwrap(), bv("000101"));
        assert_eq!(key_to_hex(&bv("000101")), "0x05");
        assert!(key_from_hex(4, "0x1F").is_err());
        assert!(key_from_hex(8, "xyz").is_err());
    }
}
