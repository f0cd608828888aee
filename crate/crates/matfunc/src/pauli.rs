//! Exact symbolic algebra over n-qubit Pauli words and sparse complex
//! combinations of them.
//!
//! A [`PauliString`] is a phase-free word stored as X/Z bit masks; the word
//! denotes the tensor product of single-qubit Paulis with `(x,z) = (1,1)`
//! read as `Y`. Any phase produced by multiplication is returned separately
//! (a fourth root of unity), so strings stay canonical and hashable. Qubit 0
//! is the most significant bit of a basis index, and the leftmost character
//! of a word.

use std::collections::BTreeSet;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::Gate;
use crate::dense::DenseMatrix;
use crate::error::{Error, Result};

/// Relative tolerance below which coefficients are dropped on
/// canonicalization; exact cancellations in gate-product expansions leave
/// numeric dust well under this.
pub const TERM_DROP_REL_TOL: f64 = 1e-14;

const I_POWERS: [Complex64; 4] = [
    Complex64::new(1.0, 0.0),
    Complex64::new(0.0, 1.0),
    Complex64::new(-1.0, 0.0),
    Complex64::new(0.0, -1.0),
];

/// Phase-free n-qubit Pauli word as X/Z bit masks aligned with basis-index
/// bits (qubit q occupies bit `n-1-q`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    z: u64,
    x: u64,
    n: u32,
}

impl PauliString {
    pub fn identity(n: u32) -> Self {
        PauliString { n, x: 0, z: 0 }
    }

    pub fn from_masks(n: u32, x: u64, z: u64) -> Result<Self> {
        if n == 0 || n > 64 {
            return Err(Error::InvalidParam(format!("bad qubit count {n}")));
        }
        let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        if x & !mask != 0 || z & !mask != 0 {
            return Err(Error::InvalidParam("mask bits above qubit count".into()));
        }
        Ok(PauliString { n, x, z })
    }

    /// Parses a word like "XIZY" (leftmost character acts on qubit 0).
    pub fn from_word(word: &str) -> Result<Self> {
        let n = word.len() as u32;
        if n == 0 || n > 64 {
            return Err(Error::InvalidParam(format!("bad word length {n}")));
        }
        let mut x = 0u64;
        let mut z = 0u64;
        for (q, ch) in word.chars().enumerate() {
            let bit = 1u64 << (n as usize - 1 - q);
            match ch {
                'I' => {}
                'X' => x |= bit,
                'Z' => z |= bit,
                'Y' => {
                    x |= bit;
                    z |= bit;
                }
                _ => {
                    return Err(Error::InvalidParam(format!("bad Pauli letter {ch:?}")));
                }
            }
        }
        Ok(PauliString { n, x, z })
    }

    pub fn word(&self) -> String {
        (0..self.n)
            .map(|q| {
                let bit = 1u64 << (self.n - 1 - q);
                match ((self.x & bit) != 0, (self.z & bit) != 0) {
                    (false, false) => 'I',
                    (true, false) => 'X',
                    (false, true) => 'Z',
                    (true, true) => 'Y',
                }
            })
            .collect()
    }

    pub fn n_qubits(&self) -> u32 {
        self.n
    }

    pub fn x_bits(&self) -> u64 {
        self.x
    }

    pub fn z_bits(&self) -> u64 {
        self.z
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn dim(&self) -> usize {
        1usize << self.n
    }

    /// Matrix product `self · other = phase · result` with `phase` one of
    /// `{1, i, -1, -i}` and `result` the XOR word.
    pub fn multiply(&self, other: &PauliString) -> Result<(Complex64, PauliString)> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n as usize, other.n as usize));
        }
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        // i-power from moving Z past X and recanonicalizing Y sites.
        let k = (self.x & self.z).count_ones()
            + (other.x & other.z).count_ones()
            + 2 * (self.z & other.x).count_ones()
            + 3 * (x & z).count_ones();
        Ok((
            I_POWERS[(k % 4) as usize],
            PauliString { n: self.n, x, z },
        ))
    }

    /// True when the two words commute (symplectic form vanishes).
    pub fn commutes(&self, other: &PauliString) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 0
    }

    /// `<i|P|j>` in O(n) bit operations: zero unless `i = j XOR x`, otherwise
    /// a fourth root of unity determined by the Z mask and the Y sites.
    pub fn entry(&self, i: usize, j: usize) -> Result<Complex64> {
        let dim = self.dim();
        if i >= dim || j >= dim {
            return Err(Error::IndexOutOfRange {
                index: i.max(j),
                dim,
            });
        }
        if i as u64 != (j as u64) ^ self.x {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let k = (self.x & self.z).count_ones() + 2 * (self.z & j as u64).count_ones();
        Ok(I_POWERS[(k % 4) as usize])
    }

    /// Kronecker product; `self` takes the leading (most significant) qubits.
    pub fn tensor(&self, other: &PauliString) -> Result<PauliString> {
        if self.n + other.n > 64 {
            return Err(Error::InvalidParam("tensor exceeds 64 qubits".into()));
        }
        Ok(PauliString {
            n: self.n + other.n,
            x: (self.x << other.n) | other.x,
            z: (self.z << other.n) | other.z,
        })
    }
}

/// Sparse complex combination of Pauli words, kept in canonical order
/// (lexicographic on `(z, x)`) with distinct strings and no dust terms, so
/// operator equality is structural equality.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliOperator {
    n: u32,
    terms: Vec<(Complex64, PauliString)>,
}

impl PauliOperator {
    /// Builds an operator, merging duplicate strings and dropping
    /// coefficients below `TERM_DROP_REL_TOL` times the Pauli norm.
    pub fn new(n: u32, terms: Vec<(Complex64, PauliString)>) -> Self {
        let mut terms: Vec<(Complex64, PauliString)> = terms
            .into_iter()
            .filter(|(c, _)| c.norm() > 0.0)
            .collect();
        terms.sort_by(|a, b| a.1.cmp(&b.1));
        let mut merged: Vec<(Complex64, PauliString)> = Vec::with_capacity(terms.len());
        for (c, s) in terms {
            debug_assert_eq!(s.n_qubits(), n);
            match merged.last_mut() {
                Some((mc, ms)) if *ms == s => *mc += c,
                _ => merged.push((c, s)),
            }
        }
        let lambda: f64 = merged.iter().map(|(c, _)| c.norm()).sum();
        let tol = TERM_DROP_REL_TOL * lambda;
        merged.retain(|(c, _)| c.norm() > tol);
        PauliOperator { n, terms: merged }
    }

    pub fn zero(n: u32) -> Self {
        PauliOperator { n, terms: vec![] }
    }

    pub fn identity(n: u32) -> Self {
        PauliOperator::new(
            n,
            vec![(Complex64::new(1.0, 0.0), PauliString::identity(n))],
        )
    }

    pub fn n_qubits(&self) -> u32 {
        self.n
    }

    pub fn dim(&self) -> usize {
        1usize << self.n
    }

    pub fn terms(&self) -> &[(Complex64, PauliString)] {
        &self.terms
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// `λ = Σ|coefficient|`, the l1 weight of the decomposition.
    pub fn pauli_norm(&self) -> f64 {
        self.terms.iter().map(|(c, _)| c.norm()).sum()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        PauliOperator::new(
            self.n,
            self.terms.iter().map(|(a, s)| (a * c, *s)).collect(),
        )
    }

    pub fn add(&self, other: &PauliOperator) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n as usize, other.n as usize));
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(PauliOperator::new(self.n, terms))
    }

    pub fn adjoint(&self) -> Self {
        PauliOperator::new(
            self.n,
            self.terms.iter().map(|(c, s)| (c.conj(), *s)).collect(),
        )
    }

    /// Full operator product (expands all pairwise word products).
    pub fn mul_operator(&self, other: &PauliOperator) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n as usize, other.n as usize));
        }
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (a, p) in &self.terms {
            for (b, q) in &other.terms {
                let (phase, r) = p.multiply(q)?;
                terms.push((a * b * phase, r));
            }
        }
        Ok(PauliOperator::new(self.n, terms))
    }

    /// Kronecker product; the Pauli norm multiplies exactly.
    pub fn tensor(&self, other: &PauliOperator) -> Result<Self> {
        let n = self.n + other.n;
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (a, p) in &self.terms {
            for (b, q) in &other.terms {
                terms.push((a * b, p.tensor(q)?));
            }
        }
        Ok(PauliOperator::new(n, terms))
    }

    /// `<i|A|j>` by summing the single matching word per X mask group.
    pub fn entry(&self, i: usize, j: usize) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (c, s) in &self.terms {
            acc += c * s.entry(i, j)?;
        }
        Ok(acc)
    }

    /// Materializes the full `2^n x 2^n` matrix.
    pub fn to_dense(&self, qubit_cap: u32) -> Result<DenseMatrix> {
        if self.n > qubit_cap {
            return Err(Error::CapExceeded {
                what: "qubits for dense materialization",
                have: self.n as u64,
                cap: qubit_cap as u64,
            });
        }
        let dim = self.dim();
        let mut m = DenseMatrix::zeros(dim);
        for (c, s) in &self.terms {
            let x = s.x_bits() as usize;
            for j in 0..dim {
                let i = j ^ x;
                m.add_to(i, j, c * s.entry(i, j)?);
            }
        }
        Ok(m)
    }

    /// Largest coefficient magnitude.
    pub fn max_coeff(&self) -> f64 {
        self.terms.iter().map(|(c, _)| c.norm()).fold(0.0, f64::max)
    }
}

/// Exact Pauli expansion of the rank-one projector `|i><j|` on n qubits:
/// `2^n` terms, every coefficient of magnitude `2^{-n}`, Pauli norm 1.
pub fn decompose_projector(i: usize, j: usize, n: u32) -> Result<PauliOperator> {
    let dim = 1usize << n;
    if i >= dim || j >= dim {
        return Err(Error::IndexOutOfRange {
            index: i.max(j),
            dim,
        });
    }
    // Site factors: |0><0| = (I+Z)/2, |1><1| = (I-Z)/2,
    //               |0><1| = (X+iY)/2, |1><0| = (X-iY)/2.
    let site = |ib: bool, jb: bool| -> [(Complex64, bool, bool); 2] {
        // Entries: (coefficient, x bit, z bit)
        match (ib, jb) {
            (false, false) => [
                (Complex64::new(0.5, 0.0), false, false),
                (Complex64::new(0.5, 0.0), false, true),
            ],
            (true, true) => [
                (Complex64::new(0.5, 0.0), false, false),
                (Complex64::new(-0.5, 0.0), false, true),
            ],
            (false, true) => [
                (Complex64::new(0.5, 0.0), true, false),
                (Complex64::new(0.0, 0.5), true, true),
            ],
            (true, false) => [
                (Complex64::new(0.5, 0.0), true, false),
                (Complex64::new(0.0, -0.5), true, true),
            ],
        }
    };
    let bit = |v: usize, q: u32| -> bool { (v >> (n - 1 - q)) & 1 == 1 };
    let mut acc: Vec<(Complex64, u64, u64)> = vec![(Complex64::new(1.0, 0.0), 0, 0)];
    for q in 0..n {
        let factors = site(bit(i, q), bit(j, q));
        let mut next = Vec::with_capacity(acc.len() * 2);
        for (c, x, z) in &acc {
            for (fc, fx, fz) in &factors {
                next.push((
                    c * fc,
                    (x << 1) | u64::from(*fx),
                    (z << 1) | u64::from(*fz),
                ));
            }
        }
        acc = next;
    }
    let terms = acc
        .into_iter()
        .map(|(c, x, z)| Ok((c, PauliString::from_masks(n, x, z)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(PauliOperator::new(n, terms))
}

fn embed_single(n: u32, q: usize, letter: char) -> Result<PauliString> {
    let mut word: Vec<char> = vec!['I'; n as usize];
    word[q] = letter;
    PauliString::from_word(&word.iter().collect::<String>())
}

/// Exact Pauli expansion of a gate embedded on `n` qubits (identity
/// elsewhere): Hadamard 2 terms, CNOT 4, Toffoli 8.
pub fn decompose_gate(gate: &Gate, n: u32) -> Result<PauliOperator> {
    gate.validate(n as usize).map_err(|_| Error::BadGate)?;
    let one = Complex64::new(1.0, 0.0);
    match *gate {
        Gate::H(q) => {
            // H = (X + Z)/√2: two terms, both of magnitude 1/√2. (The
            // identity-plus-X variant sometimes quoted is not unitary.)
            let inv_sqrt2 = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            Ok(PauliOperator::new(
                n,
                vec![
                    (inv_sqrt2, embed_single(n, q, 'X')?),
                    (inv_sqrt2, embed_single(n, q, 'Z')?),
                ],
            ))
        }
        Gate::Cnot(c, t) => {
            // |0><0|_c ⊗ I + |1><1|_c ⊗ X_t = (II + ZI + IX - ZX)/2
            let zi = embed_single(n, c, 'Z')?;
            let ix = embed_single(n, t, 'X')?;
            let (_, zx) = zi.multiply(&ix)?;
            let half = one * 0.5;
            Ok(PauliOperator::new(
                n,
                vec![
                    (half, PauliString::identity(n)),
                    (half, zi),
                    (half, ix),
                    (-half, zx),
                ],
            ))
        }
        Gate::Toffoli(a, b, t) => {
            // 3/4 III + 1/4 (ZII + IZI - ZZI + IIX - ZIX - IZX + ZZX)
            let za = embed_single(n, a, 'Z')?;
            let zb = embed_single(n, b, 'Z')?;
            let xt = embed_single(n, t, 'X')?;
            let (_, zazb) = za.multiply(&zb)?;
            let (_, zaxt) = za.multiply(&xt)?;
            let (_, zbxt) = zb.multiply(&xt)?;
            let (_, zazbxt) = zazb.multiply(&xt)?;
            let q = one * 0.25;
            Ok(PauliOperator::new(
                n,
                vec![
                    (one * 0.75, PauliString::identity(n)),
                    (q, za),
                    (q, zb),
                    (-q, zazb),
                    (q, xt),
                    (-q, zaxt),
                    (-q, zbxt),
                    (q, zazbxt),
                ],
            ))
        }
    }
}

/// Phase-stripped closure of the group generated by `generators`: all XOR
/// combinations of the generator masks, at most `2^|G|` strings (the signed
/// group is at most twice that). An empty generator list yields `{identity}`.
pub fn subgroup_closure(n: u32, generators: &[PauliString]) -> Result<BTreeSet<PauliString>> {
    for g in generators {
        if g.n_qubits() != n {
            return Err(Error::DimensionMismatch(
                g.n_qubits() as usize,
                n as usize,
            ));
        }
    }
    let mut set = BTreeSet::new();
    set.insert(PauliString::identity(n));
    for g in generators {
        if set.contains(g) {
            continue;
        }
        let existing: Vec<PauliString> = set.iter().copied().collect();
        for e in existing {
            let combined = PauliString::from_masks(n, e.x_bits() ^ g.x_bits(), e.z_bits() ^ g.z_bits())?;
            set.insert(combined);
        }
    }
    Ok(set)
}

/// GF(2) rank of the `(x,z)` masks of the given strings; the phase-free
/// closure has exactly `2^rank` elements, so this predicts closure size
/// without enumerating it.
pub fn closure_rank(strings: impl IntoIterator<Item = PauliString>) -> u32 {
    let mut basis = [0u128; 128];
    let mut rank = 0u32;
    for s in strings {
        let mut v = ((s.x_bits() as u128) << 64) | s.z_bits() as u128;
        while v != 0 {
            let lead = 127 - v.leading_zeros() as usize;
            if basis[lead] == 0 {
                basis[lead] = v;
                rank += 1;
                break;
            }
            v ^= basis[lead];
        }
    }
    rank
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    re: f64,
    im: f64,
    word: String,
}

#[derive(Serialize, Deserialize)]
struct OperatorJson {
    n: u32,
    terms: Vec<TermJson>,
}

impl Serialize for PauliOperator {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let body = OperatorJson {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(c, s)| TermJson {
                    re: c.re,
                    im: c.im,
                    word: s.word(),
                })
                .collect(),
        };
        body.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PauliOperator {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let body = OperatorJson::deserialize(deserializer)?;
        let terms = body
            .terms
            .into_iter()
            .map(|t| {
                let s = PauliString::from_word(&t.word)
                    .map_err(|e| serde::de::Error::custom(e.to_string()))?;
                if s.n_qubits() != body.n {
                    return Err(serde::de::Error::custom("word length differs from n"));
                }
                Ok((Complex64::new(t.re, t.im), s))
            })
            .collect::<std::result::Result<Vec<_>, D::Error>>()?;
        Ok(PauliOperator::new(body.n, terms))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn dense_of_word(word: &str) -> DenseMatrix {
        PauliOperator::new(
            word.len() as u32,
            vec![(c(1.0, 0.0), PauliString::from_word(word).unwrap())],
        )
        .to_dense(12)
        .unwrap()
    }

    #[test]
    fn word_round_trip() {
        for w in ["I", "X", "Y", "Z", "XIZY", "YYXZIZ"] {
            assert_eq!(PauliString::from_word(w).unwrap().word(), w);
        }
    }

    #[test]
    fn single_qubit_strings_match_dense_matrices() {
        let x = dense_of_word("X");
        assert!((x.get(0, 1) - c(1.0, 0.0)).norm() < 1e-15);
        assert!((x.get(1, 0) - c(1.0, 0.0)).norm() < 1e-15);
        let y = dense_of_word("Y");
        assert!((y.get(0, 1) - c(0.0, -1.0)).norm() < 1e-15);
        assert!((y.get(1, 0) - c(0.0, 1.0)).norm() < 1e-15);
        let z = dense_of_word("Z");
        assert!((z.get(0, 0) - c(1.0, 0.0)).norm() < 1e-15);
        assert!((z.get(1, 1) - c(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn multiply_square_is_identity_with_plus_phase() {
        for w in ["X", "Y", "Z", "XZ", "YYXI"] {
            let p = PauliString::from_word(w).unwrap();
            let (phase, r) = p.multiply(&p).unwrap();
            assert!((phase - c(1.0, 0.0)).norm() < 1e-15, "word {w}");
            assert!(r.is_identity());
        }
    }

    #[test]
    fn x_times_z_is_minus_i_y() {
        let x = PauliString::from_word("X").unwrap();
        let z = PauliString::from_word("Z").unwrap();
        let (phase, r) = x.multiply(&z).unwrap();
        assert_eq!(r.word(), "Y");
        assert!((phase - c(0.0, -1.0)).norm() < 1e-15);
        // dense 2x2 product oracle
        let prod = dense_of_word("X").mul(&dense_of_word("Z"));
        let recon = dense_of_word("Y").scale(phase);
        assert!(prod.sub(&recon).max_abs() < 1e-15);
    }

    #[test]
    fn two_qubit_product_matches_dense_4x4_oracle() {
        let p = PauliString::from_word("XZ").unwrap();
        let q = PauliString::from_word("ZZ").unwrap();
        let (phase, r) = p.multiply(&q).unwrap();
        assert_eq!(r.word(), "YI");
        assert!((phase - c(0.0, -1.0)).norm() < 1e-14);
        let prod = dense_of_word("XZ").mul(&dense_of_word("ZZ"));
        let recon = dense_of_word(&r.word()).scale(phase);
        assert!(prod.sub(&recon).max_abs() < 1e-14);
    }

    #[test]
    fn multiply_associative_including_phases_vs_dense() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..200 {
            let n = rng.gen_range(1..=4u32);
            let rand_string = |rng: &mut rand_chacha::ChaCha8Rng| {
                let mask = (1u64 << n) - 1;
                PauliString::from_masks(n, rng.gen::<u64>() & mask, rng.gen::<u64>() & mask)
                    .unwrap()
            };
            let (a, b, cc) = (rand_string(&mut rng), rand_string(&mut rng), rand_string(&mut rng));
            let (p1, ab) = a.multiply(&b).unwrap();
            let (p2, ab_c) = ab.multiply(&cc).unwrap();
            let (q1, bc) = b.multiply(&cc).unwrap();
            let (q2, a_bc) = a.multiply(&bc).unwrap();
            assert_eq!(ab_c, a_bc);
            assert!((p1 * p2 - q1 * q2).norm() < 1e-15);
            // against dense product
            let dense = dense_of_word(&a.word())
                .mul(&dense_of_word(&b.word()))
                .mul(&dense_of_word(&cc.word()));
            let recon = dense_of_word(&ab_c.word()).scale(p1 * p2);
            assert!(dense.sub(&recon).max_abs() < 1e-13);
        }
    }

    #[test]
    fn projector_zero_zero_is_half_i_plus_z() {
        let p = decompose_projector(0, 0, 1).unwrap();
        assert_eq!(p.term_count(), 2);
        let d = p.to_dense(12).unwrap();
        assert!((d.get(0, 0) - c(1.0, 0.0)).norm() < 1e-15);
        assert!(d.get(1, 1).norm() < 1e-15);
        assert!((p.pauli_norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn projector_zero_one_is_half_x_plus_iy() {
        let p = decompose_projector(0, 1, 1).unwrap();
        let mut found_x = false;
        let mut found_y = false;
        for (coeff, s) in p.terms() {
            match s.word().as_str() {
                "X" => {
                    found_x = true;
                    assert!((coeff - c(0.5, 0.0)).norm() < 1e-15);
                }
                "Y" => {
                    found_y = true;
                    assert!((coeff - c(0.0, 0.5)).norm() < 1e-15);
                }
                w => panic!("unexpected word {w}"),
            }
        }
        assert!(found_x && found_y);
    }

    #[test]
    fn projector_reconstructs_all_two_qubit_elements() {
        for n in 1..=4u32 {
            let dim = 1usize << n;
            for i in 0..dim {
                for j in 0..dim {
                    let p = decompose_projector(i, j, n).unwrap();
                    assert_eq!(p.term_count(), dim);
                    assert!((p.pauli_norm() - 1.0).abs() < 1e-12);
                    for (coeff, _) in p.terms() {
                        assert!((coeff.norm() - 1.0 / dim as f64).abs() < 1e-15);
                    }
                    let d = p.to_dense(12).unwrap();
                    for a in 0..dim {
                        for b in 0..dim {
                            let expect = if a == i && b == j { 1.0 } else { 0.0 };
                            assert!((d.get(a, b) - c(expect, 0.0)).norm() < 1e-12);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn projector_2_1_expansion() {
        // |2><1| on 2 qubits = [ (X-iY)/2 ] ⊗ [ (X+iY)/2 ], four terms.
        let p = decompose_projector(2, 1, 2).unwrap();
        assert_eq!(p.term_count(), 4);
        let d = p.to_dense(12).unwrap();
        for a in 0..4 {
            for b in 0..4 {
                let expect = if a == 2 && b == 1 { 1.0 } else { 0.0 };
                assert!((d.get(a, b) - c(expect, 0.0)).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn hadamard_decomposition_matches_gate_action() {
        let op = decompose_gate(&Gate::H(0), 1).unwrap();
        assert_eq!(op.term_count(), 2);
        for (coeff, _) in op.terms() {
            assert!((coeff.re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        }
        let d = op.to_dense(12).unwrap();
        let v = std::f64::consts::FRAC_1_SQRT_2;
        assert!((d.get(0, 0).re - v).abs() < 1e-15);
        assert!((d.get(0, 1).re - v).abs() < 1e-15);
        assert!((d.get(1, 0).re - v).abs() < 1e-15);
        assert!((d.get(1, 1).re + v).abs() < 1e-15);
    }

    #[test]
    fn toffoli_identity_coefficient_is_three_quarters() {
        let op = decompose_gate(&Gate::Toffoli(0, 1, 2), 3).unwrap();
        assert_eq!(op.term_count(), 8);
        let id_coeff = op
            .terms()
            .iter()
            .find(|(_, s)| s.is_identity())
            .map(|(c, _)| *c)
            .unwrap();
        assert!((id_coeff - c(0.75, 0.0)).norm() < 1e-15);
        // unitary gates never have a coefficient above 1 in magnitude
        assert!(op.max_coeff() <= 1.0 + 1e-15);
    }

    #[test]
    fn gate_decompositions_match_dense_circuit_action() {
        use crate::circuit::apply_gate;
        for (gate, n) in [
            (Gate::H(1), 2u32),
            (Gate::Cnot(0, 1), 2),
            (Gate::Cnot(1, 0), 2),
            (Gate::Toffoli(0, 2, 1), 3),
        ] {
            let op = decompose_gate(&gate, n).unwrap();
            let d = op.to_dense(12).unwrap();
            let dim = 1usize << n;
            for col in 0..dim {
                let mut state = vec![c(0.0, 0.0); dim];
                state[col] = c(1.0, 0.0);
                apply_gate(&mut state, &gate, n as usize);
                for row in 0..dim {
                    assert!((d.get(row, col) - state[row]).norm() < 1e-13);
                }
            }
            assert!(op.max_coeff() <= 1.0 + 1e-15);
        }
    }

    #[test]
    fn cnot_expansion_words() {
        let op = decompose_gate(&Gate::Cnot(0, 1), 2).unwrap();
        let words: Vec<String> = op.terms().iter().map(|(_, s)| s.word()).collect();
        for w in ["II", "IX", "ZI", "ZX"] {
            assert!(words.contains(&w.to_string()), "missing {w}");
        }
    }

    #[test]
    fn closure_of_x_is_i_x() {
        let g = [PauliString::from_word("X").unwrap()];
        let set = subgroup_closure(1, &g).unwrap();
        assert_eq!(set.len(), 2);
    }

    #[test]
    fn closure_of_x_z_is_full_single_qubit_group() {
        let g = [
            PauliString::from_word("X").unwrap(),
            PauliString::from_word("Z").unwrap(),
        ];
        let set = subgroup_closure(1, &g).unwrap();
        assert_eq!(set.len(), 4);
        // exhaustive product enumeration stays inside the closure
        for a in &set {
            for b in &set {
                let (_, r) = a.multiply(b).unwrap();
                assert!(set.contains(&r));
            }
        }
    }

    #[test]
    fn closure_of_commuting_z_generators_has_full_rank() {
        let n = 6u32;
        let gens: Vec<PauliString> = (0..n as usize)
            .map(|q| {
                let mut w = vec!['I'; n as usize];
                w[q] = 'Z';
                PauliString::from_word(&w.iter().collect::<String>()).unwrap()
            })
            .collect();
        let set = subgroup_closure(n, &gens).unwrap();
        assert_eq!(set.len(), 1 << n);
    }

    #[test]
    fn empty_generator_list_gives_identity() {
        let set = subgroup_closure(3, &[]).unwrap();
        assert_eq!(set.len(), 1);
        assert!(set.iter().next().unwrap().is_identity());
    }

    #[test]
    fn tensor_pads_and_multiplies_norms() {
        let b = PauliOperator::new(
            1,
            vec![(c(2.0, 0.0), PauliString::from_word("Z").unwrap())],
        );
        let a = PauliOperator::new(
            1,
            vec![(c(0.5, 0.0), PauliString::from_word("X").unwrap())],
        );
        let t = a.tensor(&b).unwrap();
        assert_eq!(t.term_count(), 1);
        assert_eq!(t.terms()[0].1.word(), "XZ");
        assert!((t.terms()[0].0 - c(1.0, 0.0)).norm() < 1e-15);
        assert!((t.pauli_norm() - a.pauli_norm() * b.pauli_norm()).abs() < 1e-15);

        let id = PauliOperator::identity(1);
        let padded = id.tensor(&b).unwrap();
        assert_eq!(padded.terms()[0].1.word(), "IZ");
    }

    #[test]
    fn tensor_of_two_term_operators_matches_dense_kronecker() {
        let a = PauliOperator::new(
            1,
            vec![
                (c(0.3, 0.1), PauliString::from_word("X").unwrap()),
                (c(-0.2, 0.0), PauliString::from_word("Z").unwrap()),
            ],
        );
        let b = PauliOperator::new(
            1,
            vec![
                (c(1.0, 0.0), PauliString::from_word("I").unwrap()),
                (c(0.0, 0.7), PauliString::from_word("Y").unwrap()),
            ],
        );
        let t = a.tensor(&b).unwrap();
        assert_eq!(t.term_count(), 4);
        assert!((t.pauli_norm() - a.pauli_norm() * b.pauli_norm()).abs() < 1e-12);
        let da = a.to_dense(12).unwrap();
        let db = b.to_dense(12).unwrap();
        let kron = DenseMatrix::from_fn(4, |i, j| da.get(i / 2, j / 2) * db.get(i % 2, j % 2));
        assert!(t.to_dense(12).unwrap().sub(&kron).max_abs() < 1e-13);
    }

    #[test]
    fn string_entry_examples() {
        let i1 = PauliString::from_word("I").unwrap();
        assert!((i1.entry(0, 0).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        let x = PauliString::from_word("X").unwrap();
        assert!((x.entry(1, 0).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        assert!(x.entry(0, 0).unwrap().norm() < 1e-15);
        // <3|Y⊗Z|1> against the dense construction
        let yz = PauliString::from_word("YZ").unwrap();
        let d = dense_of_word("YZ");
        assert!((yz.entry(3, 1).unwrap() - d.get(3, 1)).norm() < 1e-15);
        // exhaustive agreement on 2 qubits
        for i in 0..4 {
            for j in 0..4 {
                assert!((yz.entry(i, j).unwrap() - d.get(i, j)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn to_dense_round_trips_through_trace_decomposition() {
        use crate::dense::dense_to_pauli;
        let op = PauliOperator::new(
            3,
            vec![
                (c(0.4, 0.0), PauliString::from_word("XIZ").unwrap()),
                (c(-0.3, 0.0), PauliString::from_word("ZZI").unwrap()),
                (c(0.25, 0.0), PauliString::from_word("YXY").unwrap()),
            ],
        );
        let d = op.to_dense(12).unwrap();
        let back = dense_to_pauli(&d).unwrap();
        assert_eq!(back.term_count(), 3);
        let d2 = back.to_dense(12).unwrap();
        assert!(d.sub(&d2).max_abs() < 1e-12);
    }

    #[test]
    fn half_i_plus_z_is_diag_1_0() {
        let op = PauliOperator::new(
            1,
            vec![
                (c(0.5, 0.0), PauliString::from_word("I").unwrap()),
                (c(0.5, 0.0), PauliString::from_word("Z").unwrap()),
            ],
        );
        let d = op.to_dense(12).unwrap();
        assert!((d.get(0, 0) - c(1.0, 0.0)).norm() < 1e-15);
        assert!(d.get(1, 1).norm() < 1e-15);
    }

    #[test]
    fn canonicalization_merges_and_drops_dust() {
        let x = PauliString::from_word("X").unwrap();
        let op = PauliOperator::new(
            1,
            vec![
                (c(0.5, 0.0), x),
                (c(0.5, 0.0), x),
                (c(1e-17, 0.0), PauliString::from_word("Z").unwrap()),
            ],
        );
        assert_eq!(op.term_count(), 1);
        assert!((op.terms()[0].0 - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn operator_json_schema() {
        let op = PauliOperator::new(
            2,
            vec![
                (c(0.5, -0.25), PauliString::from_word("XZ").unwrap()),
                (c(1.0, 0.0), PauliString::from_word("II").unwrap()),
            ],
        );
        let j = serde_json::to_value(&op).unwrap();
        assert_eq!(j["n"], 2);
        assert!(j["terms"].as_array().unwrap().len() == 2);
        assert!(j["terms"][0]["word"].is_string());
        let back: PauliOperator = serde_json::from_value(j).unwrap();
        assert_eq!(back, op);
    }
}
