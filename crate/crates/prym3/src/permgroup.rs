//! Permutations of the labeled regular Prym fixed points and the
//! classification of the subgroups of Sym₃ they generate.
//!
//! Degree is kept generic so the degree-5 genus-two setting stays in reach;
//! the classification itself is specific to degree 3.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PermError {
    #[error("image {0:?} is not a bijection")]
    NotABijection(Vec<usize>),
    #[error("set is not closed under composition; not a subgroup")]
    NotASubgroup,
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
}

/// A permutation of the labels {1, …, n}, stored as 0-based images.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MarkedPermutation {
    image: Vec<usize>,
}

impl MarkedPermutation {
    pub fn identity(n: usize) -> Self {
        MarkedPermutation {
            image: (0..n).collect(),
        }
    }

    pub fn from_images(image: Vec<usize>) -> Result<Self, PermError> {
        let n = image.len();
        let mut seen = vec![false; n];
        for &i in &image {
            if i >= n || seen[i] {
                return Err(PermError::NotABijection(image));
            }
            seen[i] = true;
        }
        Ok(MarkedPermutation { image })
    }

    /// The transposition (a b) on labels 1..=n.
    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        let mut image: Vec<usize> = (0..n).collect();
        image.swap(a - 1, b - 1);
        MarkedPermutation { image }
    }

    pub fn degree(&self) -> usize {
        self.image.len()
    }

    /// Image of a 1-based label.
    pub fn apply(&self, label: usize) -> usize {
        self.image[label - 1] + 1
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// self ∘ other (other first).
    pub fn compose(&self, other: &Self) -> Result<Self, PermError> {
        if self.degree() != other.degree() {
            return Err(PermError::DegreeMismatch(self.degree(), other.degree()));
        }
        Ok(MarkedPermutation {
            image: other.image.iter().map(|&i| self.image[i]).collect(),
        })
    }

    pub fn inverse(&self) -> Self {
        let mut image = vec![0; self.degree()];
        for (i, &j) in self.image.iter().enumerate() {
            image[j] = i;
        }
        MarkedPermutation { image }
    }

    /// Labels moved by the permutation, 1-based.
    pub fn support(&self) -> Vec<usize> {
        self.image
            .iter()
            .enumerate()
            .filter(|(i, &j)| *i != j)
            .map(|(i, _)| i + 1)
            .collect()
    }

    /// Cycle notation over 1-based labels, e.g. "(1 2)" or "id".
    pub fn cycles(&self) -> String {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = String::new();
        for start in 0..n {
            if seen[start] || self.image[start] == start {
                seen[start] = true;
                continue;
            }
            out.push('(');
            let mut i = start;
            let mut first = true;
            while !seen[i] {
                seen[i] = true;
                if !first {
                    out.push(' ');
                }
                out.push_str(&(i + 1).to_string());
                first = false;
                i = self.image[i];
            }
            out.push(')');
        }
        if out.is_empty() {
            out.push_str("id");
        }
        out
    }
}

impl fmt::Debug for MarkedPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.cycles())
    }
}

impl fmt::Display for MarkedPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.cycles())
    }
}

/// Conjugacy class of a subgroup of Sym₃.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SubgroupClass {
    Trivial,
    /// Sym of the given (1-based, sorted) swapped pair.
    Sym2([usize; 2]),
    Alt3,
    Sym3,
}

impl fmt::Display for SubgroupClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubgroupClass::Trivial => write!(f, "trivial"),
            SubgroupClass::Sym2([a, b]) => write!(f, "sym2({{{a},{b}}})"),
            SubgroupClass::Alt3 => write!(f, "alt3"),
            SubgroupClass::Sym3 => write!(f, "sym3"),
        }
    }
}

/// Subgroup generated by `gens`, by breadth-first products.
pub fn closure(gens: &[MarkedPermutation]) -> BTreeSet<MarkedPermutation> {
    let n = gens.first().map_or(3, |g| g.degree());
    let mut set = BTreeSet::new();
    set.insert(MarkedPermutation::identity(n));
    let mut frontier: Vec<MarkedPermutation> = vec![MarkedPermutation::identity(n)];
    while let Some(cur) = frontier.pop() {
        for g in gens {
            let next = g.compose(&cur).expect("uniform degree");
            if set.insert(next.clone()) {
                frontier.push(next);
            }
        }
    }
    set
}

/// Classify a subgroup of Sym₃ up to the labels it moves.
pub fn classify(h: &BTreeSet<MarkedPermutation>) -> Result<SubgroupClass, PermError> {
    // Verify closure under composition and inverses.
    for a in h {
        if !h.contains(&a.inverse()) {
            return Err(PermError::NotASubgroup);
        }
        for b in h {
            if !h.contains(&a.compose(b)?) {
                return Err(PermError::NotASubgroup);
            }
        }
    }
    match h.len() {
        1 => Ok(SubgroupClass::Trivial),
        2 => {
            let t = h.iter().find(|p| !p.is_identity()).unwrap();
            let s = t.support();
            if s.len() != 2 {
                return Err(PermError::NotASubgroup);
            }
            Ok(SubgroupClass::Sym2([s[0], s[1]]))
        }
        3 => Ok(SubgroupClass::Alt3),
        6 => Ok(SubgroupClass::Sym3),
        _ => Err(PermError::NotASubgroup),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(a: usize, b: usize) -> MarkedPermutation {
        MarkedPermutation::transposition(3, a, b)
    }

    #[test]
    fn closure_cases() {
        assert_eq!(closure(&[]).len(), 1);
        assert_eq!(closure(&[t(1, 2), t(1, 3)]).len(), 6);
        assert_eq!(closure(&[t(1, 2)]).len(), 2);
        let three_cycle = MarkedPermutation::from_images(vec![1, 2, 0]).unwrap();
        assert_eq!(closure(&[three_cycle]).len(), 3);
    }

    #[test]
    fn classify_cases() {
        assert_eq!(
            classify(&closure(&[t(1, 2)])).unwrap(),
            SubgroupClass::Sym2([1, 2])
        );
        assert_eq!(
            classify(&closure(&[t(1, 2), t(2, 3)])).unwrap(),
            SubgroupClass::Sym3
        );
        let three_cycle = MarkedPermutation::from_images(vec![2, 0, 1]).unwrap();
        assert_eq!(classify(&closure(&[three_cycle])).unwrap(), SubgroupClass::Alt3);
        assert_eq!(classify(&closure(&[])).unwrap(), SubgroupClass::Trivial);

        // A non-closed set is rejected.
        let mut bad = BTreeSet::new();
        bad.insert(MarkedPermutation::identity(3));
        bad.insert(MarkedPermutation::from_images(vec![1, 2, 0]).unwrap());
        assert!(classify(&bad).is_err());
    }

    #[test]
    fn order_divides_six_and_conjugation_invariance() {
        let all = closure(&[t(1, 2), t(1, 3)]);
        let perms: Vec<_> = all.iter().cloned().collect();
        for a in &perms {
            for b in &perms {
                let h = closure(&[a.clone(), b.clone()]);
                assert_eq!(6 % h.len(), 0);
                // Relabeling conjugation preserves the class shape.
                for g in &perms {
                    let conj: Vec<_> = [a, b]
                        .iter()
                        .map(|p| {
                            g.compose(p).unwrap().compose(&g.inverse()).unwrap()
                        })
                        .collect();
                    let hc = closure(&conj);
                    let c1 = classify(&h).unwrap();
                    let c2 = classify(&hc).unwrap();
                    let same = match (&c1, &c2) {
                        (SubgroupClass::Sym2(_), SubgroupClass::Sym2(_)) => true,
                        (x, y) => x == y,
                    };
                    assert!(same, "{c1} vs {c2}");
                }
            }
        }
    }

    #[test]
    fn cycle_notation() {
        assert_eq!(t(1, 2).cycles(), "(1 2)");
        assert_eq!(MarkedPermutation::identity(3).cycles(), "id");
        let c = MarkedPermutation::from_images(vec![1, 2, 0]).unwrap();
        assert_eq!(c.cycles(), "(1 2 3)");
    }
}
