//! Boolean equation systems over Z₂ as cost Hamiltonians.
//!
//! Each clause `rhs = t₁ + … + t_k (mod 2)` becomes an integer multilinear
//! polynomial that is 0 on satisfying assignments and 1 otherwise, using
//! `t₁ ⊕ … ⊕ t_k = Σ_{∅≠S} (-2)^{|S|-1} Π_{i∈S} t_i`. Summing over clauses
//! counts violations. Substituting `a_i ↦ (1 + s_i X_{q(i)}) / 2` turns the
//! count into a Pauli-X operator whose spectrum is the value table.
//!
//! Variables are 0-based in the API and printed 1-based (`a1`, `a2`, …).

use std::collections::BTreeMap;
use std::fmt;

use crate::basis::Sector;
use crate::error::{Error, Result};
use crate::numerics::{c, CMatrix, CVector};
use crate::operators::{pauli_to_matrix, HermitianOperator, PauliTermList, Space};

/// Integer combination of square-free monomials in Boolean variables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MultilinearPolynomial {
    terms: BTreeMap<Vec<usize>, i64>,
}

impl MultilinearPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(value: i64) -> Self {
        let mut p = Self::zero();
        p.add_term(Vec::new(), value);
        p
    }

    pub fn monomial(variables: &[usize]) -> Self {
        let mut p = Self::zero();
        p.add_term(variables.to_vec(), 1);
        p
    }

    /// Add `coefficient · Π variables`; `a² = a` collapses repeats.
    pub fn add_term(&mut self, mut variables: Vec<usize>, coefficient: i64) {
        variables.sort_unstable();
        variables.dedup();
        let entry = self.terms.entry(variables.clone()).or_insert(0);
        *entry += coefficient;
        if *entry == 0 {
            self.terms.remove(&variables);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[usize], i64)> {
        self.terms.iter().map(|(k, &v)| (k.as_slice(), v))
    }

    pub fn coefficient(&self, variables: &[usize]) -> i64 {
        let mut key = variables.to_vec();
        key.sort_unstable();
        key.dedup();
        self.terms.get(&key).copied().unwrap_or(0)
    }

    /// One past the largest variable index in use.
    pub fn variables(&self) -> usize {
        self.terms
            .keys()
            .filter_map(|k| k.last())
            .map(|&i| i + 1)
            .max()
            .unwrap_or(0)
    }

    pub fn scaled(&self, factor: i64) -> Self {
        let mut out = Self::zero();
        for (k, v) in &self.terms {
            out.add_term(k.clone(), v * factor);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add_term(k.clone(), *v);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (ka, va) in &self.terms {
            for (kb, vb) in &other.terms {
                let mut k = ka.clone();
                k.extend_from_slice(kb);
                out.add_term(k, va * vb);
            }
        }
        out
    }

    /// Value at an assignment `bits[i] ∈ {0, 1}`.
    pub fn evaluate(&self, bits: &[u8]) -> i64 {
        self.terms
            .iter()
            .filter(|(k, _)| k.iter().all(|&i| bits[i] == 1))
            .map(|(_, v)| v)
            .sum()
    }
}

impl fmt::Display for MultilinearPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        // constant first, then by degree
        let mut ordered: Vec<_> = self.terms.iter().collect();
        ordered.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(b.0)));
        for (n, (vars, &coef)) in ordered.into_iter().enumerate() {
            let sign = if coef < 0 { "-" } else { "+" };
            match n {
                0 if coef < 0 => f.write_str("-")?,
                0 => {}
                _ => write!(f, " {sign} ")?,
            }
            let mag = coef.abs();
            if vars.is_empty() || mag != 1 {
                write!(f, "{mag}")?;
            }
            for v in vars {
                write!(f, "a{}", v + 1)?;
            }
        }
        Ok(())
    }
}

/// `rhs = Σ monomials (mod 2)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clause {
    pub rhs: u8,
    pub monomials: Vec<Vec<usize>>,
}

impl Clause {
    pub fn is_satisfied(&self, bits: &[u8]) -> bool {
        let parity = self
            .monomials
            .iter()
            .filter(|m| m.iter().all(|&i| bits[i] == 1))
            .count()
            % 2;
        parity as u8 == self.rhs
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClauseSystem {
    variables: usize,
    clauses: Vec<Clause>,
}

impl ClauseSystem {
    pub fn new(variables: usize, clauses: Vec<Clause>) -> Result<Self> {
        for (n, clause) in clauses.iter().enumerate() {
            if clause.rhs > 1 {
                return Err(Error::InvalidParameter(format!("clause {} has a non-binary constant", n + 1)));
            }
            if let Some(&v) = clause.monomials.iter().flatten().find(|&&v| v >= variables) {
                return Err(Error::InvalidParameter(format!(
                    "clause {} uses a{} but only {variables} variables are declared",
                    n + 1,
                    v + 1
                )));
            }
        }
        Ok(Self { variables, clauses })
    }

    /// Parse one clause per line, `rhs = term + term + …`, terms `a1` or
    /// `a1*a3` (or the constant `1`); `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut clauses = Vec::new();
        let mut variables = 0;
        for (n, raw) in text.lines().enumerate() {
            let line_no = n + 1;
            let content = raw.split('#').next().unwrap_or("");
            if content.trim().is_empty() {
                continue;
            }
            let clause = parse_clause(content, line_no)?;
            for v in clause.monomials.iter().flatten() {
                variables = variables.max(v + 1);
            }
            clauses.push(clause);
        }
        if clauses.is_empty() {
            return Err(Error::Parse {
                line: 1,
                column: 1,
                message: "no clauses found".into(),
            });
        }
        Self::new(variables, clauses)
    }

    pub fn variables(&self) -> usize {
        self.variables
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn violations(&self, bits: &[u8]) -> usize {
        self.clauses.iter().filter(|c| !c.is_satisfied(bits)).count()
    }
}

fn parse_error(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Tokens with their 1-based columns.
fn parse_clause(content: &str, line: usize) -> Result<Clause> {
    let chars: Vec<(usize, char)> = content.chars().enumerate().map(|(i, ch)| (i + 1, ch)).collect();
    let mut pos = 0;
    let skip_ws = |pos: &mut usize| {
        while *pos < chars.len() && chars[*pos].1.is_whitespace() {
            *pos += 1;
        }
    };
    let column = |pos: usize| chars.get(pos).map_or(chars.len() + 1, |c| c.0);

    skip_ws(&mut pos);
    let rhs = match chars.get(pos).map(|c| c.1) {
        Some('0') => 0,
        Some('1') => 1,
        _ => return Err(parse_error(line, column(pos), "expected the constant 0 or 1 before '='")),
    };
    pos += 1;
    skip_ws(&mut pos);
    if chars.get(pos).map(|c| c.1) != Some('=') {
        return Err(parse_error(line, column(pos), "expected '='"));
    }
    pos += 1;

    let mut monomials = Vec::new();
    loop {
        skip_ws(&mut pos);
        let mut factors = Vec::new();
        loop {
            skip_ws(&mut pos);
            match chars.get(pos).map(|c| c.1) {
                Some('a') => {
                    let start = pos;
                    pos += 1;
                    let digits_from = pos;
                    while pos < chars.len() && chars[pos].1.is_ascii_digit() {
                        pos += 1;
                    }
                    let digits: String = chars[digits_from..pos].iter().map(|c| c.1).collect();
                    match digits.parse::<usize>() {
                        Ok(v) if v >= 1 => factors.push(v - 1),
                        _ => return Err(parse_error(line, column(start), "variables are written a1, a2, …")),
                    }
                }
                // the constant 1 is the empty product
                Some('1') => pos += 1,
                _ => return Err(parse_error(line, column(pos), "expected a variable such as a1")),
            }
            skip_ws(&mut pos);
            if chars.get(pos).map(|c| c.1) == Some('*') {
                pos += 1;
            } else {
                break;
            }
        }
        factors.sort_unstable();
        factors.dedup();
        monomials.push(factors);
        skip_ws(&mut pos);
        match chars.get(pos).map(|c| c.1) {
            None => break,
            Some('+') => pos += 1,
            Some(_) => return Err(parse_error(line, column(pos), "expected '+', '*' or end of line")),
        }
    }
    Ok(Clause { rhs, monomials })
}

/// Indicator of violation of one clause, expanded to multilinear form.
pub fn clause_objective(clause: &Clause) -> MultilinearPolynomial {
    // XOR accumulated pairwise: x ⊕ y = x + y - 2xy
    let mut xor = MultilinearPolynomial::zero();
    for m in &clause.monomials {
        let t = MultilinearPolynomial::monomial(m);
        xor = xor.add(&t).add(&xor.mul(&t).scaled(-2));
    }
    if clause.rhs == 1 {
        MultilinearPolynomial::constant(1).add(&xor.scaled(-1))
    } else {
        xor
    }
}

/// Number of violated clauses as a polynomial.
pub fn system_objective(system: &ClauseSystem) -> MultilinearPolynomial {
    system
        .clauses
        .iter()
        .fold(MultilinearPolynomial::zero(), |acc, cl| acc.add(&clause_objective(cl)))
}

/// Three quadratic equations in `a1, a2, a3` with the single solution `(0, 0, 1)`.
pub fn example_system() -> ClauseSystem {
    ClauseSystem::parse(
        "1 = a2 + a3 + a1*a3\n\
         1 = a1 + a3 + a1*a2\n\
         0 = a1 + a2 + a2*a3\n",
    )
    .expect("built-in clause system parses")
}

/// Affine map `a_i ↦ (1 + s_i X_{q(i)}) / 2`.
///
/// `qubits[i]` is the Pauli label position of variable `i`; position 0 is the
/// most significant bit of the basis index.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct VariableEncoding {
    signs: Vec<i8>,
    qubits: Vec<usize>,
}

impl VariableEncoding {
    pub fn new(signs: Vec<i8>, qubits: Vec<usize>) -> Result<Self> {
        if signs.len() != qubits.len() {
            return Err(Error::DimensionMismatch {
                expected: signs.len(),
                found: qubits.len(),
                context: "encoding signs vs qubit positions",
            });
        }
        if signs.iter().any(|s| s.abs() != 1) {
            return Err(Error::InvalidParameter("encoding signs must be +1 or -1".into()));
        }
        let mut seen = vec![false; qubits.len()];
        for &q in &qubits {
            if q >= qubits.len() || std::mem::replace(&mut seen[q], true) {
                return Err(Error::InvalidParameter(format!(
                    "qubit positions {qubits:?} are not a permutation"
                )));
            }
        }
        Ok(Self { signs, qubits })
    }

    /// From a label-position ordering of 1-based variable numbers: `(3,2,1)`
    /// puts `a3` on the most significant qubit and `a1` on the least.
    pub fn from_ordering(signs: Vec<i8>, ordering: &[usize]) -> Result<Self> {
        let mut qubits = vec![usize::MAX; ordering.len()];
        for (pos, &var) in ordering.iter().enumerate() {
            if var == 0 || var > ordering.len() {
                return Err(Error::InvalidParameter(format!("bad variable {var} in ordering")));
            }
            qubits[var - 1] = pos;
        }
        Self::new(signs, qubits)
    }

    /// Signs `(+1, +1, -1)` with ordering `(3, 2, 1)`.
    pub fn standard() -> Self {
        Self::from_ordering(vec![1, 1, -1], &[3, 2, 1]).expect("valid standard encoding")
    }

    pub fn variables(&self) -> usize {
        self.signs.len()
    }

    pub fn sign(&self, variable: usize) -> i8 {
        self.signs[variable]
    }

    pub fn qubit(&self, variable: usize) -> usize {
        self.qubits[variable]
    }

    /// Assignment encoded by an X-basis index (bit 0 ↔ eigenvalue +1).
    pub fn decode_x_index(&self, index: usize) -> Vec<u8> {
        let n = self.variables();
        (0..n)
            .map(|v| {
                let bit = (index >> (n - 1 - self.qubits[v])) & 1;
                let x = 1 - 2 * bit as i64;
                ((1 + self.signs[v] as i64 * x) / 2) as u8
            })
            .collect()
    }
}

/// Pauli-X image of a polynomial; the identity term is kept only on request.
pub fn objective_to_pauli(
    poly: &MultilinearPolynomial,
    encoding: &VariableEncoding,
    keep_identity: bool,
) -> Result<PauliTermList> {
    let n = encoding.variables();
    if poly.variables() > n {
        return Err(Error::InvalidParameter(format!(
            "encoding covers {n} variables, the polynomial uses {}",
            poly.variables()
        )));
    }
    // Π_{i∈S} (1 + s_i X_i)/2 = 2^{-|S|} Σ_{T⊆S} Π_{i∈T} s_i X_i
    let mut collected: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
    for (vars, coef) in poly.terms() {
        let scale = coef as f64 / (1u64 << vars.len()) as f64;
        for mask in 0u32..(1 << vars.len()) {
            let subset: Vec<usize> = (0..vars.len()).filter(|b| mask >> b & 1 == 1).map(|b| vars[b]).collect();
            let sign: f64 = subset.iter().map(|&v| encoding.sign(v) as f64).product();
            *collected.entry(subset).or_insert(0.0) += scale * sign;
        }
    }
    let mut terms = PauliTermList::new();
    for (subset, coef) in collected {
        if coef == 0.0 || (subset.is_empty() && !keep_identity) {
            continue;
        }
        let mut label = vec!['I'; n];
        for v in subset {
            label[encoding.qubit(v)] = 'X';
        }
        terms.push(coef, label.into_iter().collect::<String>());
    }
    Ok(terms)
}

/// Matrix of the clause-violation count on `n` qubits.
pub fn cost_operator(
    system: &ClauseSystem,
    encoding: &VariableEncoding,
    keep_identity: bool,
) -> Result<HermitianOperator> {
    let terms = objective_to_pauli(&system_objective(system), encoding, keep_identity)?;
    pauli_to_matrix(&terms, encoding.variables())
}

/// `ω` times the traceless cost operator of [`example_system`] under the
/// standard encoding; spectrum `ω · {-3/2, -1/2 ×3, 1/2 ×3, 3/2}`.
pub fn sat_hamiltonian(omega: f64) -> Result<HermitianOperator> {
    Ok(cost_operator(&example_system(), &VariableEncoding::standard(), false)?.scaled(omega))
}

/// `ω · diag(popcount(i))` on `n` qubits.
pub fn diag_initial_hamiltonian(qubits: usize, omega: f64) -> Result<HermitianOperator> {
    if qubits > 16 {
        return Err(Error::SectorTooLarge {
            dim: 1u128 << qubits.min(127),
            limit: crate::basis::MAX_DIM,
        });
    }
    let d = 1usize << qubits;
    let mut m = CMatrix::zeros(d, d);
    for i in 0..d {
        m[(i, i)] = c(omega * i.count_ones() as f64);
    }
    HermitianOperator::new(Space::Qubits { count: qubits }, m)
}

/// Relabel an `n`-qubit operator onto the single-excitation sector of a
/// `2ⁿ`-site chain: basis index `i` is an excitation on site `i + 1`.
pub fn embed_single_excitation(op: HermitianOperator) -> Result<HermitianOperator> {
    let sector = Sector::hardcore(op.dim(), 1)?;
    op.with_space(Space::Sector(sector))
}

/// Site pairs and sign of the printed correlator for each variable.
const CORRELATORS: [([(usize, usize); 4], f64); 3] = [
    ([(1, 5), (2, 6), (3, 7), (4, 8)], 1.0),
    ([(1, 3), (2, 4), (5, 7), (6, 8)], 1.0),
    ([(1, 2), (3, 4), (5, 6), (7, 8)], -1.0),
];

/// Half-width of the band around 1/2 in which a correlator is not a bit.
const CORRELATOR_MARGIN: f64 = 0.25;

/// `a_i = ½ (1 ± Σ_pairs ⟨σˣσˣ + σʸσʸ⟩/2)` on an 8-site single-excitation state.
pub fn correlator_values(psi: &CVector) -> Result<Vec<f64>> {
    if psi.len() != 8 {
        return Err(Error::DimensionMismatch {
            expected: 8,
            found: psi.len(),
            context: "readout state",
        });
    }
    Ok(CORRELATORS
        .iter()
        .map(|(pairs, sign)| {
            // ⟨(σˣ_lσˣ_m + σʸ_lσʸ_m)/2⟩ = 2 Re(ψ_l* ψ_m) with one excitation
            let hop: f64 = pairs
                .iter()
                .map(|&(l, m)| 2.0 * (psi[l - 1].conj() * psi[m - 1]).re)
                .sum();
            0.5 * (1.0 + sign * hop)
        })
        .collect())
}

/// Dominant X-basis component of a state, `None` on a tie.
fn dominant_x_index(psi: &CVector) -> Option<usize> {
    let d = psi.len();
    let norm = (d as f64).sqrt();
    let weights: Vec<f64> = (0..d)
        .map(|y| {
            let amp: num_complex::Complex64 = (0..d)
                .map(|i| if (i & y).count_ones() % 2 == 0 { psi[i] } else { -psi[i] })
                .sum();
            (amp / norm).norm_sqr()
        })
        .collect();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]).then(a.cmp(&b)));
    let (first, second) = (weights[order[0]], weights[order[1]]);
    (first - second > 1e-9).then_some(order[0])
}

/// Decode `(a1, a2, a3)` from an 8-site single-excitation state through the
/// correlators and, independently, the dominant X-basis amplitude under the
/// standard encoding. Both must yield definite, equal bits.
pub fn readout_assignment(psi: &CVector) -> Result<Vec<u8>> {
    readout_assignment_with(psi, &VariableEncoding::standard())
}

pub fn readout_assignment_with(psi: &CVector, encoding: &VariableEncoding) -> Result<Vec<u8>> {
    let correlators = correlator_values(psi)?;
    let ambiguous = |amplitude_bits| Error::AmbiguousReadout {
        correlators: correlators.clone(),
        amplitude_bits,
    };
    let from_amplitude = dominant_x_index(psi).map(|y| encoding.decode_x_index(y));
    if correlators.iter().any(|v| (v - 0.5).abs() < CORRELATOR_MARGIN) {
        return Err(ambiguous(from_amplitude));
    }
    let bits: Vec<u8> = correlators.iter().map(|&v| u8::from(v > 0.5)).collect();
    match from_amplitude {
        Some(b) if b == bits => Ok(bits),
        other => Err(ambiguous(other)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::eigh;

    fn assignments(n: usize) -> impl Iterator<Item = Vec<u8>> {
        // lexicographic with a1 most significant
        (0..1usize << n).map(move |k| (0..n).map(|i| ((k >> (n - 1 - i)) & 1) as u8).collect())
    }

    #[test]
    fn single_variable_clause() {
        let sys = ClauseSystem::parse("0 = a1").unwrap();
        assert_eq!(clause_objective(&sys.clauses()[0]), MultilinearPolynomial::monomial(&[0]));
    }

    #[test]
    fn first_clause_expansion() {
        let sys = example_system();
        let c1 = clause_objective(&sys.clauses()[0]);
        // 1 - (a2 + a3 + a1a3 - 2(a2a3 + a1a3 + a1a2a3) + 4a1a2a3)
        let mut expected = MultilinearPolynomial::constant(1);
        for (vars, coef) in [
            (vec![1], -1),
            (vec![2], -1),
            (vec![0, 2], -1),
            (vec![1, 2], 2),
            (vec![0, 2], 2),
            (vec![0, 1, 2], 2),
            (vec![0, 1, 2], -4),
        ] {
            expected.add_term(vars, coef);
        }
        assert_eq!(c1, expected);
    }

    #[test]
    fn example_objective_and_table() {
        let c = system_objective(&example_system());
        let mut expected = MultilinearPolynomial::constant(2);
        for (vars, coef) in [
            (vec![2], -2),
            (vec![0, 2], 3),
            (vec![1, 2], 1),
            (vec![0, 1], -1),
            (vec![0, 1, 2], -2),
        ] {
            expected.add_term(vars, coef);
        }
        assert_eq!(c, expected);
        assert_eq!(c.to_string(), "2 - 2a3 - a1a2 + 3a1a3 + a2a3 - 2a1a2a3");
        let table: Vec<i64> = assignments(3).map(|a| c.evaluate(&a)).collect();
        assert_eq!(table, vec![2, 0, 2, 1, 2, 3, 1, 1]);
        let mut counts = [0; 4];
        table.iter().for_each(|&v| counts[v as usize] += 1);
        assert_eq!(counts, [1, 3, 3, 1]);
    }

    #[test]
    fn objective_counts_violations() {
        let sys = ClauseSystem::parse("1 = a1*a2 + a3\n0 = a2 + a4 + a1*a3*a4\n1 = 1 + a4\n").unwrap();
        let c = system_objective(&sys);
        for a in assignments(4) {
            assert_eq!(c.evaluate(&a), sys.violations(&a) as i64, "{a:?}");
        }
    }

    #[test]
    fn parser_diagnostics() {
        let err = ClauseSystem::parse("1 = a1 + a2\n0 = a1 + b2\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, column: 10, .. }), "{err:?}");
        let err = ClauseSystem::parse("2 = a1").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, column: 1, .. }));
        let err = ClauseSystem::parse("1 a1").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, column: 3, .. }));
        let err = ClauseSystem::parse("1 = a1 - a2").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, column: 8, .. }));
        let err = ClauseSystem::parse("1 = a0").unwrap_err();
        assert!(matches!(err, Error::Parse { column: 5, .. }));
        assert!(ClauseSystem::parse("# only a comment\n\n").is_err());
        let ok = ClauseSystem::parse("  1=a1*a2+a3   # trailing\n").unwrap();
        assert_eq!(ok.variables(), 3);
        assert_eq!(ok.clauses()[0].monomials, vec![vec![0, 1], vec![2]]);
    }

    #[test]
    fn substitution_of_a_single_variable() {
        let enc = VariableEncoding::new(vec![1], vec![0]).unwrap();
        let terms = objective_to_pauli(&MultilinearPolynomial::monomial(&[0]), &enc, true).unwrap();
        assert_eq!(terms.terms, vec![(0.5, "I".to_string()), (0.5, "X".to_string())]);
    }

    #[test]
    fn cost_operator_spectrum_is_the_shifted_table() {
        let h = sat_hamiltonian(1.0).unwrap();
        assert!(h.trace().abs() < 1e-14);
        let values = eigh(h.matrix()).unwrap().values;
        let expected = [-1.5, -0.5, -0.5, -0.5, 0.5, 0.5, 0.5, 1.5];
        for (v, e) in values.iter().zip(expected) {
            assert!((v - e).abs() < 1e-12, "{values:?}");
        }
    }

    #[test]
    fn standard_encoding_places_a1_last() {
        let enc = VariableEncoding::standard();
        assert_eq!((enc.qubit(0), enc.qubit(1), enc.qubit(2)), (2, 1, 0));
        let terms = objective_to_pauli(&MultilinearPolynomial::monomial(&[0]), &enc, false).unwrap();
        assert_eq!(terms.terms, vec![(0.5, "IIX".to_string())]);
        assert!(VariableEncoding::from_ordering(vec![1, 1], &[1, 1]).is_err());
        assert!(VariableEncoding::new(vec![2], vec![0]).is_err());
    }

    #[test]
    fn ground_state_decodes_to_the_solution() {
        let h = sat_hamiltonian(1.0).unwrap();
        let eig = eigh(h.matrix()).unwrap();
        assert!(eig.values[1] - eig.values[0] > 0.5);
        let ground = eig.vectors.column(0).into_owned();
        assert_eq!(readout_assignment(&ground).unwrap(), vec![0, 0, 1]);
        let c = system_objective(&example_system());
        let minimizers: Vec<_> = assignments(3).filter(|a| c.evaluate(a) == 0).collect();
        assert_eq!(minimizers, vec![vec![0, 0, 1]]);
    }

    #[test]
    fn localized_state_is_ambiguous() {
        let mut psi = CVector::zeros(8);
        psi[0] = c(1.0);
        assert_eq!(correlator_values(&psi).unwrap(), vec![0.5; 3]);
        assert!(matches!(readout_assignment(&psi), Err(Error::AmbiguousReadout { amplitude_bits: None, .. })));
    }

    #[test]
    fn uniform_state_is_definite() {
        let psi = CVector::from_element(8, c(1.0 / 8f64.sqrt()));
        let values = correlator_values(&psi).unwrap();
        for (v, e) in values.iter().zip([1.0, 1.0, 0.0]) {
            assert!((v - e).abs() < 1e-12);
        }
        assert_eq!(readout_assignment(&psi).unwrap(), vec![1, 1, 0]);
    }

    #[test]
    fn initial_hamiltonian_is_the_hamming_weight() {
        let h = diag_initial_hamiltonian(3, 2.0).unwrap();
        let diag: Vec<f64> = (0..8).map(|i| h.matrix()[(i, i)].re).collect();
        assert_eq!(diag, vec![0.0, 2.0, 2.0, 4.0, 2.0, 4.0, 4.0, 6.0]);
        let h1 = diag_initial_hamiltonian(1, 1.0).unwrap();
        assert_eq!(h1.matrix()[(1, 1)], c(1.0));
    }
}
