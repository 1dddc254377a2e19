//! Pauli strings with exact phase tracking and sums of Pauli strings.

use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;

use crate::noise::Pauli;

/// Single-qubit product `a·b = i^k · c`, returned as `(k, c)`.
fn mul_letter(a: Pauli, b: Pauli) -> (u8, Pauli) {
    use Pauli::*;
    match (a, b) {
        (I, p) | (p, I) => (0, p),
        (X, X) | (Y, Y) | (Z, Z) => (0, I),
        (X, Y) => (1, Z),
        (Y, Z) => (1, X),
        (Z, X) => (1, Y),
        (Y, X) => (3, Z),
        (Z, Y) => (3, X),
        (X, Z) => (3, Y),
    }
}

/// `i^phase · P₀ ⊗ P₁ ⊗ …`, with `phase` taken mod 4.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    letters: Vec<Pauli>,
    phase: u8,
}

impl PauliString {
    pub fn identity(n_qubits: usize) -> Self {
        Self {
            letters: vec![Pauli::I; n_qubits],
            phase: 0,
        }
    }

    pub fn new(letters: Vec<Pauli>, phase: u8) -> Self {
        Self {
            letters,
            phase: phase % 4,
        }
    }

    /// Parses an optional sign (`+`, `-`, `+i`, `-i`) followed by one letter per
    /// qubit, e.g. `"-iXYIIZ"`.
    pub fn parse(s: &str) -> Option<Self> {
        let (phase, rest) = if let Some(r) = s.strip_prefix("+i") {
            (1, r)
        } else if let Some(r) = s.strip_prefix("-i") {
            (3, r)
        } else if let Some(r) = s.strip_prefix('-') {
            (2, r)
        } else if let Some(r) = s.strip_prefix('+') {
            (0, r)
        } else {
            (0, s)
        };
        let letters = rest.chars().map(Pauli::from_char).collect::<Option<Vec<_>>>()?;
        Some(Self::new(letters, phase))
    }

    /// Single-qubit operator `p` on `qubit` of an `n`-qubit register.
    pub fn single(n_qubits: usize, qubit: usize, p: Pauli) -> Self {
        let mut s = Self::identity(n_qubits);
        s.letters[qubit] = p;
        s
    }

    pub fn n_qubits(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    /// Exponent `k` of the global factor `i^k`.
    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn phase_value(&self) -> Complex64 {
        match self.phase {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }

    pub fn letter(&self, qubit: usize) -> Pauli {
        self.letters[qubit]
    }

    pub fn with_letter(&self, qubit: usize, p: Pauli) -> Self {
        let mut s = self.clone();
        s.letters[qubit] = p;
        s
    }

    /// The same string with the phase dropped.
    pub fn unsigned(&self) -> Self {
        Self::new(self.letters.clone(), 0)
    }

    pub fn scale_phase(&self, k: u8) -> Self {
        Self::new(self.letters.clone(), self.phase + k)
    }

    pub fn negate(&self) -> Self {
        self.scale_phase(2)
    }

    pub fn weight(&self) -> usize {
        self.letters.iter().filter(|&&p| p != Pauli::I).count()
    }

    pub fn is_identity_letters(&self) -> bool {
        self.weight() == 0
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase.is_multiple_of(2)
    }

    pub fn adjoint(&self) -> Self {
        Self::new(self.letters.clone(), (4 - self.phase) % 4)
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        assert_eq!(self.n_qubits(), other.n_qubits());
        let clashes = self
            .letters
            .iter()
            .zip(&other.letters)
            .filter(|(a, b)| **a != Pauli::I && **b != Pauli::I && a != b)
            .count();
        clashes % 2 == 0
    }

    pub fn mul(&self, other: &PauliString) -> PauliString {
        assert_eq!(self.n_qubits(), other.n_qubits(), "qubit count mismatch");
        let mut phase = self.phase + other.phase;
        let letters = self
            .letters
            .iter()
            .zip(&other.letters)
            .map(|(&a, &b)| {
                let (k, c) = mul_letter(a, b);
                phase += k;
                c
            })
            .collect();
        PauliString::new(letters, phase)
    }
}

impl Mul for &PauliString {
    type Output = PauliString;

    fn mul(self, rhs: &PauliString) -> PauliString {
        PauliString::mul(self, rhs)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = ["+", "+i", "-", "-i"][self.phase as usize];
        write!(f, "{sign}")?;
        for p in &self.letters {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

/// Linear combination of phase-free Pauli strings.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PauliSum {
    terms: Vec<(Complex64, PauliString)>,
}

impl PauliSum {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `c·P`, folding the phase of `P` into the coefficient and merging
    /// with an existing equal string.
    pub fn add_term(&mut self, c: Complex64, p: &PauliString) {
        let coeff = c * p.phase_value();
        let key = p.unsigned();
        match self.terms.iter_mut().find(|(_, s)| *s == key) {
            Some((existing, _)) => *existing += coeff,
            None => self.terms.push((coeff, key)),
        }
    }

    /// Drops terms with coefficient magnitude at most `tol`.
    pub fn prune(&mut self, tol: f64) {
        self.terms.retain(|(c, _)| c.norm() > tol);
    }

    pub fn terms(&self) -> &[(Complex64, PauliString)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.terms.iter().all(|(c, _)| c.im.abs() <= tol)
    }

    /// Sum of the identity coefficients times the dimension, i.e. the trace.
    pub fn trace(&self) -> Complex64 {
        let dim = self.terms.first().map_or(1.0, |(_, p)| 2f64.powi(p.n_qubits() as i32));
        self.terms
            .iter()
            .filter(|(_, p)| p.is_identity_letters())
            .map(|(c, _)| c * dim)
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> PauliString {
        PauliString::parse(s).unwrap()
    }

    #[test]
    fn single_qubit_products() {
        assert_eq!(p("X").mul(&p("Y")), p("+iZ"));
        assert_eq!(p("Y").mul(&p("X")), p("-iZ"));
        assert_eq!(p("Z").mul(&p("X")), p("+iY"));
        assert_eq!(p("YIYIZ").mul(&p("YIYIZ")), p("IIIII"));
        assert_eq!(p("-iX").mul(&p("-iX")), p("-I"));
    }

    #[test]
    fn commutation() {
        assert!(!p("XI").commutes_with(&p("ZI")));
        assert!(p("XX").commutes_with(&p("ZZ")));
        assert!(p("XI").commutes_with(&p("IZ")));
    }

    #[test]
    fn parse_and_display() {
        for s in ["+XYZI", "+iIIX", "-ZZ", "-iY"] {
            assert_eq!(p(s).to_string(), s);
        }
        assert_eq!(p("XZ").to_string(), "+XZ");
        assert!(PauliString::parse("XQ").is_none());
    }

    #[test]
    fn sum_merges_and_folds_phase() {
        let mut s = PauliSum::new();
        s.add_term(Complex64::new(1.0, 0.0), &p("+iXZ"));
        s.add_term(Complex64::new(0.0, 1.0), &p("XZ"));
        assert_eq!(s.len(), 1);
        assert_eq!(s.terms()[0].0, Complex64::new(0.0, 2.0));
        s.add_term(Complex64::new(0.0, -2.0), &p("XZ"));
        s.prune(1e-15);
        assert!(s.is_empty());
    }

    fn arb_string(n: usize) -> impl Strategy<Value = PauliString> {
        (prop::collection::vec(0u8..4, n), 0u8..4).prop_map(|(v, ph)| {
            let letters = v
                .into_iter()
                .map(|k| [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][k as usize])
                .collect();
            PauliString::new(letters, ph)
        })
    }

    proptest! {
        #[test]
        fn associative(a in arb_string(5), b in arb_string(5), c in arb_string(5)) {
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        }

        #[test]
        fn adjoint_reverses(a in arb_string(5), b in arb_string(5)) {
            prop_assert_eq!(a.mul(&b).adjoint(), b.adjoint().mul(&a.adjoint()));
        }

        #[test]
        fn square_is_phase_times_identity(a in arb_string(5)) {
            let sq = a.mul(&a);
            prop_assert!(sq.is_identity_letters());
            prop_assert_eq!(sq.phase(), (2 * a.phase()) % 4);
        }

        #[test]
        fn commutation_matches_products(a in arb_string(5), b in arb_string(5)) {
            let ab = a.mul(&b);
            let ba = b.mul(&a);
            prop_assert_eq!(ab.letters(), ba.letters());
            prop_assert_eq!(a.commutes_with(&b), ab.phase() == ba.phase());
        }
    }
}
