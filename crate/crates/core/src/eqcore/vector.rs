use std::collections::BTreeSet;
use std::fmt;

/// A commutative monomial in `x1..xn`, stored as its column of exponents.
///
/// Indices are 0-based in the API; `x1` is index 0.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExponentVector(Vec<u64>);

impl ExponentVector {
    pub fn new(entries: Vec<u64>) -> Self {
        ExponentVector(entries)
    }

    pub fn zeros(n: usize) -> Self {
        ExponentVector(vec![0; n])
    }

    /// The all-ones vector `1_n`.
    pub fn ones(n: usize) -> Self {
        ExponentVector(vec![1; n])
    }

    /// The unit vector `e_i`.
    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        ExponentVector(v)
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[u64] {
        &self.0
    }

    pub fn get(&self, i: usize) -> u64 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn support(&self) -> BTreeSet<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// True when every entry is 0 or 1.
    pub fn is_linear(&self) -> bool {
        self.0.iter().all(|&e| e <= 1)
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn add(&self, other: &ExponentVector) -> ExponentVector {
        assert_eq!(self.arity(), other.arity());
        ExponentVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Keeps only the listed coordinates, in the given order.
    pub fn restrict(&self, indices: &[usize]) -> ExponentVector {
        ExponentVector(indices.iter().map(|&i| self.get(i)).collect())
    }

    /// Renders as a monomial, e.g. `x1^2*x3`, or `1` for the zero vector.
    pub fn monomial(&self) -> String {
        let parts: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| {
                if e == 1 {
                    format!("x{}", i + 1)
                } else {
                    format!("x{}^{}", i + 1, e)
                }
            })
            .collect();
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }
}

impl fmt::Display for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|e| e.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl From<Vec<u64>> for ExponentVector {
    fn from(v: Vec<u64>) -> Self {
        ExponentVector(v)
    }
}

/// A finite join of monomials; the empty join is bottom.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct JoinTerm(BTreeSet<ExponentVector>);

impl JoinTerm {
    pub fn new() -> Self {
        JoinTerm(BTreeSet::new())
    }

    pub fn insert(&mut self, v: ExponentVector) {
        self.0.insert(v);
    }

    pub fn contains(&self, v: &ExponentVector) -> bool {
        self.0.contains(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &ExponentVector> {
        self.0.iter()
    }

    pub fn as_set(&self) -> &BTreeSet<ExponentVector> {
        &self.0
    }
}

impl FromIterator<ExponentVector> for JoinTerm {
    fn from_iter<I: IntoIterator<Item = ExponentVector>>(iter: I) -> Self {
        JoinTerm(iter.into_iter().collect())
    }
}

impl fmt::Display for JoinTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "bot");
        }
        let parts: Vec<String> = self.0.iter().map(|v| v.monomial()).collect();
        write!(f, "{}", parts.join(" v "))
    }
}
