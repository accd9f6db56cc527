//! Splitting prototypes and the combinatorics of the loci E_D(4):
//! admissibility of discriminants, the reduced set S_D, the auxiliary set
//! R_D, connected-component bookkeeping for odd D, and the predicted
//! classification of the induced permutation group.
//!
//! `predicted_group` encodes the statement under test. The verification
//! pipeline never consults it while computing; it is compared against the
//! computed group only at verdict time.

use num_integer::Integer;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProtoError {
    #[error("{0} is not a discriminant (need D > 0 and D ≡ 0, 1 mod 4)")]
    NotADiscriminant(i64),
    #[error("E_{0}(4) is empty")]
    EmptyLocus(i64),
    #[error("E_{0}(4) is connected; component question is meaningless")]
    ConnectedLocus(i64),
    #[error("invalid splitting prototype ({a}, {b}, {c}, {e}): {reason}")]
    BadPrototype {
        a: i64,
        b: i64,
        c: i64,
        e: i64,
        reason: String,
    },
    #[error("e = {e} is not in S_{d}")]
    NotReduced { d: u64, e: i64 },
}

/// Connectivity of the locus E_D(4).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocusStatus {
    Empty,
    Connected,
    TwoComponents,
}

/// Which three-cylinder model a prototypical surface uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Model {
    APlus,
    AMinus,
}

/// A connected component of E_D(4), named by a representative prototypical
/// surface for odd D, or the whole locus when connected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComponentTag {
    Whole,
    Represented { model: Model, e: i64 },
}

/// The two possible permutation groups of Theorem 1.2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredictedGroup {
    Sym2,
    Sym3,
}

/// A splitting prototype (a, b, c, e) of discriminant D = e² + 8bc.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Prototype {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub e: i64,
    pub d_param: u64,
}

impl Prototype {
    pub fn new(a: i64, b: i64, c: i64, e: i64) -> Result<Self, ProtoError> {
        let fail = |reason: &str| ProtoError::BadPrototype {
            a,
            b,
            c,
            e,
            reason: reason.to_string(),
        };
        if b <= 0 || c <= 0 {
            return Err(fail("need b, c > 0"));
        }
        let d = e * e + 8 * b * c;
        if !(0 <= a && a < b.gcd(&c)) {
            return Err(fail("need 0 ≤ a < gcd(b, c)"));
        }
        if !(2 * c + e < b) {
            return Err(fail("need 2c + e < b"));
        }
        let g = a.gcd(&b).gcd(&c).gcd(&e);
        if g != 1 {
            return Err(fail("need gcd(a, b, c, e) = 1"));
        }
        Ok(Prototype {
            a,
            b,
            c,
            e,
            d_param: d as u64,
        })
    }

    /// The reduced prototype (0, (D − e²)/8, 1, e) for e ∈ S_D.
    pub fn reduced(d_param: u64, e: i64) -> Result<Self, ProtoError> {
        if !reduced_prototypes(d_param as i64)
            .map_err(|_| ProtoError::NotReduced { d: d_param, e })?
            .contains(&e)
        {
            return Err(ProtoError::NotReduced { d: d_param, e });
        }
        let b = (d_param as i64 - e * e) / 8;
        Prototype::new(0, b, 1, e)
    }
}

fn check_discriminant(d: i64) -> Result<(), ProtoError> {
    if d <= 0 || !(d % 4 == 0 || d % 4 == 1) {
        return Err(ProtoError::NotADiscriminant(d));
    }
    Ok(())
}

/// Emptiness and connectivity of E_D(4), following the Lanneau–Nguyen
/// classification: nonempty iff D ≥ 17 with D ≡ 1 (mod 8) or D ≡ 0 (mod 4),
/// or D ∈ {8, 12}; two components exactly in the odd case.
pub fn locus_status(d: i64) -> Result<LocusStatus, ProtoError> {
    check_discriminant(d)?;
    let nonempty = (d >= 17 && (d % 8 == 1 || d % 4 == 0)) || d == 8 || d == 12;
    if !nonempty {
        return Ok(LocusStatus::Empty);
    }
    if d % 8 == 1 {
        Ok(LocusStatus::TwoComponents)
    } else {
        Ok(LocusStatus::Connected)
    }
}

/// S_D = { e ∈ Z | e² ≡ D (mod 8), e² < D, (e+4)² < D }, ascending.
pub fn reduced_prototypes(d: i64) -> Result<Vec<i64>, ProtoError> {
    check_discriminant(d)?;
    let bound = crate::qfield::isqrt(d as u64) as i64 + 4;
    Ok((-bound..=bound)
        .filter(|&e| {
            (e * e - d).rem_euclid(8) == 0 && e * e < d && (e + 4) * (e + 4) < d
        })
        .collect())
}

/// R_D = { e ∈ Z | e ≡ D (mod 2), e² < D, (e+2)² < D }, ascending.
///
/// Unlike S_D this set is used at arguments D/4 that need not be
/// discriminants themselves, so only positivity is required.
pub fn aux_prototypes(d: i64) -> Result<Vec<i64>, ProtoError> {
    if d <= 0 {
        return Err(ProtoError::NotADiscriminant(d));
    }
    let bound = crate::qfield::isqrt(d as u64) as i64 + 2;
    Ok((-bound..=bound)
        .filter(|&e| (e - d).rem_euclid(2) == 0 && e * e < d && (e + 2) * (e + 2) < d)
        .collect())
}

/// Component relation on prototypical surfaces for odd D: A^±(e) and
/// A^±(e') share a component iff e ≡ e' (mod 4); across models the
/// condition is e ≡ −e' (mod 4).
pub fn same_component(
    m1: Model,
    e1: i64,
    m2: Model,
    e2: i64,
    d: i64,
) -> Result<bool, ProtoError> {
    match locus_status(d)? {
        LocusStatus::Empty => Err(ProtoError::EmptyLocus(d)),
        LocusStatus::Connected => Err(ProtoError::ConnectedLocus(d)),
        LocusStatus::TwoComponents => {
            let s = reduced_prototypes(d)?;
            for (e, m) in [(e1, m1), (e2, m2)] {
                let _ = m;
                if !s.contains(&e) {
                    return Err(ProtoError::NotReduced { d: d as u64, e });
                }
            }
            let same = if m1 == m2 {
                (e1 - e2).rem_euclid(4) == 0
            } else {
                (e1 + e2).rem_euclid(4) == 0
            };
            Ok(same)
        }
    }
}

/// The classification under test: Sym₂ exactly for even D that are
/// quadratic residues mod 16 (D mod 16 ∈ {0, 4}), Sym₃ otherwise.
pub fn predicted_group(d: i64) -> Result<PredictedGroup, ProtoError> {
    if locus_status(d)? == LocusStatus::Empty {
        return Err(ProtoError::EmptyLocus(d));
    }
    if d % 2 == 0 && (d % 16 == 0 || d % 16 == 4) {
        Ok(PredictedGroup::Sym2)
    } else {
        Ok(PredictedGroup::Sym3)
    }
}

/// All admissible discriminants in [lo, hi] (valid and nonempty locus).
pub fn admissible_range(lo: i64, hi: i64) -> Vec<i64> {
    (lo.max(1)..=hi)
        .filter(|&d| matches!(locus_status(d), Ok(s) if s != LocusStatus::Empty))
        .collect()
}

/// The component tags of E_D(4), in deterministic order. For odd D the two
/// components are represented by A⁺ surfaces: (A⁺, e₀) with e₀ = min S_D,
/// and (A⁺, e₁) for the smallest e₁ ∈ S_D with e₁ ≢ e₀ (mod 4).
pub fn components(d: i64) -> Result<Vec<ComponentTag>, ProtoError> {
    match locus_status(d)? {
        LocusStatus::Empty => Err(ProtoError::EmptyLocus(d)),
        LocusStatus::Connected => Ok(vec![ComponentTag::Whole]),
        LocusStatus::TwoComponents => {
            let s = reduced_prototypes(d)?;
            let e0 = *s.first().expect("two-component locus has prototypes");
            let e1 = s
                .iter()
                .copied()
                .find(|&e| (e - e0).rem_euclid(4) != 0)
                .expect("second component has a reduced prototype");
            Ok(vec![
                ComponentTag::Represented {
                    model: Model::APlus,
                    e: e0,
                },
                ComponentTag::Represented {
                    model: Model::APlus,
                    e: e1,
                },
            ])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force oracle for S_D: check the three defining conditions over
    /// every e with |e| ≤ ⌈√D⌉ + 8, independently of the production scan.
    fn s_d_oracle(d: i64) -> Vec<i64> {
        let mut out = Vec::new();
        let bound = (1..).find(|k| k * k >= d).unwrap() + 8;
        for e in -bound..=bound {
            if (e * e) % 8 == d.rem_euclid(8) % 8 && e * e < d && (e + 4) * (e + 4) < d {
                out.push(e);
            }
        }
        out
    }

    fn r_d_oracle(d: i64) -> Vec<i64> {
        let mut out = Vec::new();
        let bound = (1..).find(|k| k * k >= d).unwrap() + 8;
        for e in -bound..=bound {
            if (e - d).rem_euclid(2) == 0 && e * e < d && (e + 2) * (e + 2) < d {
                out.push(e);
            }
        }
        out
    }

    #[test]
    fn locus_status_cases() {
        assert_eq!(locus_status(17).unwrap(), LocusStatus::TwoComponents);
        assert_eq!(locus_status(16).unwrap(), LocusStatus::Empty);
        assert_eq!(locus_status(12).unwrap(), LocusStatus::Connected);
        assert_eq!(locus_status(8).unwrap(), LocusStatus::Connected);
        assert_eq!(locus_status(9).unwrap(), LocusStatus::Empty);
        assert!(matches!(
            locus_status(7),
            Err(ProtoError::NotADiscriminant(7))
        ));
        assert!(matches!(
            locus_status(-4),
            Err(ProtoError::NotADiscriminant(-4))
        ));
    }

    #[test]
    fn reduced_prototype_sets() {
        assert_eq!(reduced_prototypes(17).unwrap(), vec![-3, -1]);
        assert_eq!(reduced_prototypes(8).unwrap(), Vec::<i64>::new());
        assert_eq!(reduced_prototypes(73).unwrap(), vec![-7, -5, -3, -1, 1, 3]);
        assert_eq!(reduced_prototypes(25).unwrap(), vec![-3, -1]);
    }

    #[test]
    fn aux_prototype_sets() {
        assert_eq!(aux_prototypes(5).unwrap(), vec![-1]);
        assert_eq!(aux_prototypes(2).unwrap(), Vec::<i64>::new());
    }

    #[test]
    fn oracle_agreement_up_to_600() {
        for d in 1..=600 {
            if d % 4 == 0 || d % 4 == 1 {
                assert_eq!(reduced_prototypes(d).unwrap(), s_d_oracle(d), "S_{d}");
                assert_eq!(aux_prototypes(d).unwrap(), r_d_oracle(d), "R_{d}");
            }
        }
    }

    #[test]
    fn half_s_d_equals_r_d_over_4() {
        // ½·S_D = R_{D/4} for even admissible D in (16, 500].
        for d in admissible_range(17, 500) {
            if d % 2 == 0 {
                let halves: Vec<i64> = reduced_prototypes(d)
                    .unwrap()
                    .iter()
                    .map(|e| {
                        assert_eq!(e % 2, 0, "S_{d} elements must be even");
                        e / 2
                    })
                    .collect();
                assert_eq!(halves, aux_prototypes(d / 4).unwrap(), "D = {d}");
            }
        }
    }

    #[test]
    fn parity_of_reduced_elements() {
        for d in admissible_range(5, 500) {
            for e in reduced_prototypes(d).unwrap() {
                assert_eq!(e.rem_euclid(2), d.rem_euclid(2), "e ≡ D mod 2");
            }
        }
    }

    #[test]
    fn lemma_4_6_membership() {
        for d in admissible_range(33, 500) {
            if d % 16 == 1 && d >= 33 {
                let s = reduced_prototypes(d).unwrap();
                assert!(s.contains(&-5) && s.contains(&-3), "D = {d}");
            }
            if d % 16 == 9 && d >= 41 {
                let s = reduced_prototypes(d).unwrap();
                assert!(s.contains(&-1) && s.contains(&1), "D = {d}");
            }
        }
    }

    #[test]
    fn predicted_group_cases() {
        assert_eq!(predicted_group(8).unwrap(), PredictedGroup::Sym3);
        assert_eq!(predicted_group(68).unwrap(), PredictedGroup::Sym2);
        assert_eq!(predicted_group(41).unwrap(), PredictedGroup::Sym3);
        assert!(matches!(predicted_group(16), Err(ProtoError::EmptyLocus(16))));
    }

    #[test]
    fn same_component_relations() {
        // A⁺ and A⁻ with equal e always differ.
        assert!(!same_component(Model::APlus, -3, Model::AMinus, -3, 17).unwrap());
        // D = 33: A⁺(−5) vs A⁺(−3) differ (Lemma 4.6 proof).
        assert!(!same_component(Model::APlus, -5, Model::APlus, -3, 33).unwrap());
        // Identity.
        assert!(same_component(Model::APlus, -3, Model::APlus, -3, 17).unwrap());
        // Even D: meaningless.
        assert!(matches!(
            same_component(Model::APlus, -2, Model::APlus, -2, 20),
            Err(ProtoError::ConnectedLocus(20))
        ));
    }

    #[test]
    fn same_component_is_two_class_equivalence() {
        for d in admissible_range(17, 400) {
            if d % 2 == 1 {
                let s = reduced_prototypes(d).unwrap();
                let mut items = Vec::new();
                for &e in &s {
                    items.push((Model::APlus, e));
                    items.push((Model::AMinus, e));
                }
                // Partition into classes by relation; expect exactly two.
                let mut classes: Vec<Vec<(Model, i64)>> = Vec::new();
                'outer: for it in items {
                    for cl in classes.iter_mut() {
                        let rep = cl[0];
                        if same_component(rep.0, rep.1, it.0, it.1, d).unwrap() {
                            cl.push(it);
                            continue 'outer;
                        }
                    }
                    classes.push(vec![it]);
                }
                assert_eq!(classes.len(), 2, "D = {d}");
                // Symmetry and transitivity spot-check within classes.
                for cl in &classes {
                    for x in cl {
                        for y in cl {
                            assert!(same_component(x.0, x.1, y.0, y.1, d).unwrap());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn prototype_validation() {
        assert!(Prototype::new(1, 4, 2, -3).is_ok()); // D = 73
        assert!(Prototype::new(1, 6, 2, -3).is_ok()); // D = 105
        // a must stay below gcd(b, c) = 1 here.
        assert!(Prototype::new(1, 7, 3, -3).is_err());
        assert!(Prototype::new(0, 1, 1, 0).is_err()); // 2c + e < b fails
        assert!(Prototype::new(2, 4, 2, -3).is_err()); // a ≥ gcd(b, c)
        assert!(Prototype::new(0, 2, 2, -2).is_err()); // gcd = 2
        let p = Prototype::reduced(73, -3).unwrap();
        assert_eq!((p.a, p.b, p.c, p.e, p.d_param), (0, 8, 1, -3, 73));
        assert!(Prototype::reduced(73, -2).is_err());
    }
}
