use std::fmt;
use std::str::FromStr;

use crate::error::{QsvError, Result};
use crate::qmath::{total_dim, Operator, SparseOperator, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    /// `(k, c)` with `self · other = i^k · c`.
    fn mul(self, other: Pauli) -> (u8, Pauli) {
        use Pauli::*;
        match (self, other) {
            (I, p) | (p, I) => (0, p),
            (a, b) if a == b => (0, I),
            (X, Y) => (1, Z),
            (Y, Z) => (1, X),
            (Z, X) => (1, Y),
            (Y, X) => (3, Z),
            (Z, Y) => (3, X),
            (X, Z) => (3, Y),
            _ => unreachable!(),
        }
    }

    pub fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// `i^phase · P_1 ⊗ … ⊗ P_n`, with the phase exponent kept mod 4.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    phase: u8,
    letters: Vec<Pauli>,
}

impl PauliString {
    pub fn new(phase: u8, letters: Vec<Pauli>) -> Self {
        Self {
            phase: phase % 4,
            letters,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::new(0, vec![Pauli::I; n])
    }

    /// `letter` on qubit `k` (0-based), identity elsewhere.
    pub fn single(n: usize, k: usize, letter: Pauli) -> Self {
        let mut s = Self::identity(n);
        s.letters[k] = letter;
        s
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    /// `Some(±1)` when the phase is real.
    pub fn real_sign(&self) -> Option<i8> {
        match self.phase {
            0 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }

    pub fn is_identity_up_to_phase(&self) -> bool {
        self.letters.iter().all(|&p| p == Pauli::I)
    }

    pub fn weight(&self) -> usize {
        self.letters.iter().filter(|&&p| p != Pauli::I).count()
    }

    pub fn negate(&self) -> Self {
        Self::new(self.phase + 2, self.letters.clone())
    }

    pub fn mul(&self, other: &PauliString) -> Result<PauliString> {
        if self.len() != other.len() {
            return Err(QsvError::DimensionMismatch(format!(
                "Pauli strings of length {} and {}",
                self.len(),
                other.len()
            )));
        }
        let mut phase = self.phase + other.phase;
        let letters = self
            .letters
            .iter()
            .zip(&other.letters)
            .map(|(&a, &b)| {
                let (k, c) = a.mul(b);
                phase += k;
                c
            })
            .collect();
        Ok(Self::new(phase, letters))
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let anti = self
            .letters
            .iter()
            .zip(&other.letters)
            .filter(|(&a, &b)| a != Pauli::I && b != Pauli::I && a != b)
            .count();
        anti % 2 == 0
    }

    /// Bit masks over basis indices; qubit 0 is the most significant bit.
    fn masks(&self) -> (usize, usize, u8) {
        let n = self.len();
        let (mut xm, mut zm, mut ys) = (0usize, 0usize, 0u8);
        for (k, &p) in self.letters.iter().enumerate() {
            let bit = 1usize << (n - 1 - k);
            let (x, z) = p.bits();
            if x {
                xm |= bit;
            }
            if z {
                zm |= bit;
            }
            if x && z {
                ys += 1;
            }
        }
        (xm, zm, ys)
    }

    /// `P|b⟩ = coeff(b)·|b ⊕ x⟩`; returns `(x, coeff)` for each column `b`.
    fn action(&self) -> (usize, impl Fn(usize) -> C64) {
        let (xm, zm, ys) = self.masks();
        let base = (self.phase + ys) % 4;
        let unit = move |k: u8| match k % 4 {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        };
        (xm, move |b: usize| {
            let sign = ((b & zm).count_ones() % 2) as u8 * 2;
            unit(base + sign)
        })
    }

    pub fn to_sparse(&self) -> Result<SparseOperator> {
        let dims = vec![2; self.len()];
        let d = total_dim(&dims)?;
        let (xm, coeff) = self.action();
        let rows = (0..d).map(|r| vec![(r ^ xm, coeff(r ^ xm))]).collect();
        SparseOperator::from_rows(dims, rows)
    }

    pub fn to_operator(&self) -> Result<Operator> {
        Ok(self.to_sparse()?.to_dense())
    }

    /// `(𝟙 + sign·g)/2` as a sparse operator.
    pub fn projector_sparse(&self, sign: i8) -> Result<SparseOperator> {
        if self.real_sign().is_none() {
            return Err(QsvError::invalid(format!(
                "projector needs a real-phase Pauli string, got {self}"
            )));
        }
        // The phase is already part of `coeff`.
        let sgn = f64::from(sign.signum());
        let dims = vec![2; self.len()];
        let d = total_dim(&dims)?;
        let (xm, coeff) = self.action();
        let rows = (0..d)
            .map(|r| {
                let b = r ^ xm;
                vec![(r, C64::new(0.5, 0.0)), (b, coeff(b) * (0.5 * sgn))]
            })
            .collect();
        SparseOperator::from_rows(dims, rows)
    }

    /// `P·v` for an amplitude vector over the full register.
    pub fn apply(&self, v: &nalgebra::DVector<C64>) -> nalgebra::DVector<C64> {
        let (xm, coeff) = self.action();
        let mut out = nalgebra::DVector::from_element(v.len(), C64::new(0.0, 0.0));
        for (b, &a) in v.iter().enumerate() {
            out[b ^ xm] += coeff(b) * a;
        }
        out
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = ["+", "+i", "-", "-i"][self.phase as usize];
        write!(f, "{p}")?;
        for l in &self.letters {
            write!(f, "{}", l.letter())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = QsvError;

    /// Accepts an optional `+`, `-`, `+i`, `-i` or `i` prefix followed by
    /// letters from `IXYZ`.
    fn from_str(s: &str) -> Result<Self> {
        let (phase, body) = if let Some(r) = s.strip_prefix("+i").or(s.strip_prefix('i')) {
            (1, r)
        } else if let Some(r) = s.strip_prefix("-i") {
            (3, r)
        } else if let Some(r) = s.strip_prefix('-') {
            (2, r)
        } else {
            (0, s.strip_prefix('+').unwrap_or(s))
        };
        let letters = body
            .chars()
            .map(|c| match c {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                _ => Err(QsvError::invalid(format!("bad Pauli letter '{c}' in '{s}'"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if letters.is_empty() {
            return Err(QsvError::invalid("empty Pauli string"));
        }
        Ok(Self::new(phase, letters))
    }
}

/// `(𝟙 + sign·g)/2` as a dense operator. Rank is `2^{n−1}` unless `g` is
/// proportional to the identity.
pub fn pauli_projector(g: &PauliString, sign: i8) -> Result<Operator> {
    Ok(g.projector_sparse(sign)?.to_dense())
}

/// All `2^m` products `g_1^{b_1} ⋯ g_m^{b_m}`, indexed by the bit pattern
/// with `g_1` in the least significant bit.
pub fn stabilizer_group(gens: &[PauliString]) -> Result<Vec<PauliString>> {
    const MAX_GENERATORS: usize = 20;
    let n = gens
        .first()
        .map(|g| g.len())
        .ok_or_else(|| QsvError::invalid("no generators"))?;
    if gens.len() > MAX_GENERATORS {
        return Err(QsvError::SizeLimit(format!(
            "{} generators exceed the enumeration cap of {MAX_GENERATORS}",
            gens.len()
        )));
    }
    for (i, a) in gens.iter().enumerate() {
        if a.len() != n {
            return Err(QsvError::DimensionMismatch("generators differ in length".into()));
        }
        for b in &gens[i + 1..] {
            if !a.commutes_with(b) {
                return Err(QsvError::invalid(format!("generators {a} and {b} do not commute")));
            }
        }
    }
    let mut group = Vec::with_capacity(1 << gens.len());
    group.push(PauliString::identity(n));
    for g in gens {
        let extended: Vec<PauliString> = group.iter().map(|h| h.mul(g)).collect::<Result<_>>()?;
        group.extend(extended);
    }
    Ok(group)
}
