//! The two obstruction invariants: torus projections of the regular Prym
//! fixed points for primitive square-tiled surfaces, and the
//! fractional-part partition of their displacement vectors in the
//! non-arithmetic restricted case (even D, quadratic residue mod 16).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::geom::V2;
use crate::permgroup::SubgroupClass;
use crate::qfield::{fract, QFieldError, QuadNum, Rat};
use crate::surface::{build_surface, PrymLabel, SurfaceError, SurfaceSpec, TranslationSurface};
use crate::twists::{fr_vector, TwistError};

#[derive(Debug, Error)]
pub enum InvariantError {
    #[error("surface is not square-tiled: {0}")]
    NotSquareTiled(String),
    #[error("period lattice is a proper sublattice of Z[i] (index {0})")]
    NotPrimitive(BigInt),
    #[error("D = {0} with e = {1} is outside the restricted case")]
    OutsideRestrictedCase(u64, i64),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Field(#[from] QFieldError),
    #[error(transparent)]
    Twist(#[from] TwistError),
    #[error("internal: {0}")]
    Internal(String),
}

/// Type of a 2-torsion point on the unit torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum TorsionType {
    /// Projects to 1/2.
    H,
    /// Projects to i/2.
    V,
    /// Projects to (1 + i)/2.
    C,
}

impl std::fmt::Display for TorsionType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TorsionType::H => write!(f, "h"),
            TorsionType::V => write!(f, "v"),
            TorsionType::C => write!(f, "c"),
        }
    }
}

/// The HLK invariant of a primitive square-tiled surface: how many regular
/// Prym fixed points are integral, and the unordered list of 2-torsion
/// types of the rest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HLKInvariant {
    pub n_integral: usize,
    /// Sorted (h before v before c).
    pub types: Vec<TorsionType>,
    /// Torsion type per labeled point; None for integral points.
    pub per_point: Vec<(PrymLabel, Option<TorsionType>)>,
}

impl HLKInvariant {
    /// Counts (n_h, n_v, n_c).
    pub fn counts(&self) -> (usize, usize, usize) {
        let c = |t: TorsionType| self.types.iter().filter(|x| **x == t).count();
        (
            c(TorsionType::H),
            c(TorsionType::V),
            c(TorsionType::C),
        )
    }

    /// The orbit invariant: n_integral together with the count multiset,
    /// insensitive to which 2-torsion point carries which points.
    pub fn orbit_pattern(&self) -> (usize, Vec<usize>) {
        let (h, v, c) = self.counts();
        let mut counts = vec![h, v, c];
        counts.sort_unstable_by(|a, b| b.cmp(a));
        (self.n_integral, counts)
    }
}

impl std::fmt::Display for HLKInvariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, [", self.n_integral)?;
        for (i, t) in self.types.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{t}")?;
        }
        write!(f, "])")
    }
}

/// Polygon placements that develop the surface consistently: offsets such
/// that every spanning-tree gluing is the identity; the remaining gluing
/// jumps generate the absolute period lattice.
fn develop(s: &TranslationSurface) -> Result<(Vec<V2>, Vec<V2>), InvariantError> {
    let d = s.d_param();
    let n = s.polygons().len();
    let mut offsets: Vec<Option<V2>> = vec![None; n];
    offsets[0] = Some(V2::zero(d));
    let mut stack = vec![0usize];
    let mut tree: Vec<(usize, usize)> = Vec::new();
    while let Some(p) = stack.pop() {
        for (i, &(a, b)) in s.gluings().iter().enumerate() {
            for (from, to) in [(a, b), (b, a)] {
                if from.poly == p && offsets[to.poly].is_none() {
                    let t = s.edge_translation(from);
                    // Crossing `from` sends x ↦ x + t into to.poly, so the
                    // absolute offset of to.poly is offset(p) − t.
                    let off = offsets[p].clone().unwrap();
                    offsets[to.poly] = Some(&off - &t);
                    tree.push((i, to.poly));
                    stack.push(to.poly);
                }
            }
        }
    }
    let offsets: Vec<V2> = offsets
        .into_iter()
        .map(|o| o.ok_or_else(|| InvariantError::Internal("disconnected surface".into())))
        .collect::<Result<_, _>>()?;
    // Periods: absolute jumps across every gluing.
    let mut periods = Vec::new();
    for &(a, _) in s.gluings() {
        let t = s.edge_translation(a);
        let jump = &(&offsets[s.partner(a).poly] + &t) - &offsets[a.poly];
        if !jump.is_zero() {
            periods.push(jump);
        }
    }
    Ok((offsets, periods))
}

fn as_int(x: &QuadNum) -> Option<BigInt> {
    let r = x.to_rat()?;
    r.is_integer().then(|| r.to_integer())
}

/// Hermite reduction of integer 2-vectors; the lattice equals Z² iff the
/// reduced diagonal is (1, 1).
fn lattice_is_z2(gens: &[(BigInt, BigInt)]) -> Result<(), InvariantError> {
    // Reduce to an upper-triangular basis [[a, b], [0, c]].
    let mut a = BigInt::zero();
    let mut b = BigInt::zero();
    let mut c = BigInt::zero();
    for (x, y) in gens {
        // Fold (x, y) into the basis.
        let (mut x, mut y) = (x.clone(), y.clone());
        // First clear y against c, tracking x via the (a, b) row.
        if !y.is_zero() {
            if c.is_zero() {
                c = y.abs();
                // Swap so that the vector with nonzero y becomes the second
                // basis row; its x goes to b.
                b = x.clone();
                x = BigInt::zero();
                y = BigInt::zero();
            } else {
                // gcd combine on the y column.
                let (mut r1, mut r2) = ((b.clone(), c.clone()), (x.clone(), y.clone()));
                while !r2.1.is_zero() {
                    let q = &r1.1 / &r2.1;
                    let new = (&r1.0 - &q * &r2.0, &r1.1 - &q * &r2.1);
                    r1 = r2;
                    r2 = new;
                }
                b = r1.0;
                c = r1.1.abs();
                x = r2.0;
                y = BigInt::zero();
            }
        }
        let _ = y;
        if !x.is_zero() {
            a = a.gcd(&x);
        }
    }
    if a.is_zero() || c.is_zero() {
        return Err(InvariantError::NotSquareTiled(
            "period lattice has rank < 2".into(),
        ));
    }
    let index = &a * &c;
    if index == BigInt::one() {
        Ok(())
    } else {
        Err(InvariantError::NotPrimitive(index))
    }
}

/// The HLK invariant of a primitive square-tiled surface.
pub fn hlk_invariant(s: &TranslationSurface) -> Result<HLKInvariant, InvariantError> {
    let (offsets, periods) = develop(s)?;
    let mut gens = Vec::new();
    for p in &periods {
        let (x, y) = (as_int(&p.x), as_int(&p.y));
        match (x, y) {
            (Some(x), Some(y)) => gens.push((x, y)),
            _ => {
                return Err(InvariantError::NotSquareTiled(format!(
                    "period {p:?} is not integral"
                )))
            }
        }
    }
    lattice_is_z2(&gens)?;

    let sing = s.singular_point()?;
    let s_abs = &sing.pos + &offsets[sing.poly];
    let mut types = Vec::new();
    let mut per_point = Vec::new();
    let mut n_integral = 0usize;
    for label in PrymLabel::all() {
        let w = s.marked(label);
        let w_abs = &w.pos + &offsets[w.poly];
        let v = &w_abs - &s_abs;
        let two = crate::qfield::rat(2);
        let half_class = |x: &QuadNum| -> Result<u8, InvariantError> {
            let xr = x
                .to_rat()
                .ok_or_else(|| InvariantError::NotSquareTiled(format!("{x} irrational")))?;
            let doubled = xr * &two;
            if !doubled.is_integer() {
                return Err(InvariantError::Internal(format!(
                    "Prym point projects off the 2-torsion: {x}"
                )));
            }
            Ok(if doubled.to_integer().is_even() { 0 } else { 1 })
        };
        let t = match (half_class(&v.x)?, half_class(&v.y)?) {
            (0, 0) => None,
            (1, 0) => Some(TorsionType::H),
            (0, 1) => Some(TorsionType::V),
            (1, 1) => Some(TorsionType::C),
            _ => unreachable!(),
        };
        match t {
            None => n_integral += 1,
            Some(tt) => types.push(tt),
        }
        per_point.push((label, t));
    }
    types.sort();
    Ok(HLKInvariant {
        n_integral,
        types,
        per_point,
    })
}

/// The fr-class data of Z_D(e) in the restricted non-arithmetic case.
#[derive(Debug, Clone)]
pub struct FrClassPartition {
    /// fr(v_i) per labeled point.
    pub classes: Vec<(PrymLabel, (Rat, Rat))>,
    /// The subgroup of Sym₃ preserving the partition.
    pub upper_bound: SubgroupClass,
    /// The displacement vectors v_i (exact), for downstream law checks.
    pub vectors: Vec<(PrymLabel, V2)>,
}

/// Displacement vectors of the marked points from the singularity in the
/// developed picture.
pub fn displacement_vectors(
    s: &TranslationSurface,
) -> Result<Vec<(PrymLabel, V2)>, InvariantError> {
    let (offsets, _) = develop(s)?;
    let sing = s.singular_point()?;
    let s_abs = &sing.pos + &offsets[sing.poly];
    let mut out = Vec::new();
    for label in PrymLabel::all() {
        let w = s.marked(label);
        let w_abs = &w.pos + &offsets[w.poly];
        out.push((label, &w_abs - &s_abs));
    }
    Ok(out)
}

/// Compute the fr-classes of the marked points of Z_D(e) and the subgroup
/// bound they impose.
pub fn fr_classes(d_param: u64, e: i64) -> Result<FrClassPartition, InvariantError> {
    if d_param % 2 != 0 || !(d_param % 16 == 0 || d_param % 16 == 4) {
        return Err(InvariantError::OutsideRestrictedCase(d_param, e));
    }
    let root = crate::qfield::isqrt(d_param);
    if root * root == d_param {
        return Err(InvariantError::OutsideRestrictedCase(d_param, e));
    }
    let s = build_surface(&SurfaceSpec::Z { d_param, e })?;
    fr_classes_of(&s)
}

/// The fr-partition of an already built Z-surface.
pub fn fr_classes_of(s: &TranslationSurface) -> Result<FrClassPartition, InvariantError> {
    let vectors = displacement_vectors(s)?;
    let mut classes = Vec::new();
    for (label, v) in &vectors {
        let fv = fr_vector(v, s.d_param())?;
        classes.push((*label, fv.fr));
    }
    // Partition stabilizer: points in distinct classes can never be
    // exchanged.
    let mut groups: Vec<Vec<usize>> = Vec::new();
    'next: for (i, (_, fr)) in classes.iter().enumerate() {
        for g in groups.iter_mut() {
            if classes[g[0]].1 == *fr {
                g.push(i);
                continue 'next;
            }
        }
        groups.push(vec![i]);
    }
    let upper_bound = match groups.iter().map(|g| g.len()).max().unwrap_or(0) {
        3 => SubgroupClass::Sym3,
        2 => {
            let pair = groups.iter().find(|g| g.len() == 2).unwrap();
            SubgroupClass::Sym2([
                classes[pair[0]].0.index(),
                classes[pair[1]].0.index(),
            ])
        }
        _ => SubgroupClass::Trivial,
    };
    Ok(FrClassPartition {
        classes,
        upper_bound,
        vectors,
    })
}

/// fr computed against a second developing base point; used to confirm path
/// independence of the partition.
pub fn fr_classes_second_base(
    s: &TranslationSurface,
) -> Result<Vec<(PrymLabel, (Rat, Rat))>, InvariantError> {
    let (offsets, _) = develop(s)?;
    let (_, class) = s.singularity()?;
    // Use the last corner of the singular class instead of the first.
    let corner = *class.corners.last().unwrap();
    let pos = s.polygons()[corner.poly].vertex(corner.vertex).clone();
    let s_abs = &pos + &offsets[corner.poly];
    let mut out = Vec::new();
    for label in PrymLabel::all() {
        let w = s.marked(label);
        let w_abs = &w.pos + &offsets[w.poly];
        let v = &w_abs - &s_abs;
        let fv = fr_vector(&v, s.d_param())?;
        out.push((label, fv.fr));
    }
    Ok(out)
}

/// Check fr(v) mod the allowed translation lattice O_D × O_{D/4}: shifting a
/// displacement by a lattice vector must not change its fr pair.
pub fn fr_lattice_invariance(v: &V2, d_param: u64) -> Result<bool, InvariantError> {
    let rho = crate::qfield::rho(d_param)?;
    let base = fr_vector(v, d_param)?.fr;
    let one = QuadNum::one(d_param);
    let rho_half = rho.scale(&crate::qfield::ratio(1, 2));
    for dx in [one.clone(), rho.clone()] {
        for dy in [one.clone(), rho_half.clone()] {
            let shifted = V2::new(&v.x + &dx, &v.y + &dy);
            let fr = fr_vector(&shifted, d_param)?.fr;
            if fr != base {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Convenience: fractional part of a rational (re-exported shape used by
/// reports).
pub fn fr_of_rat(r: &Rat) -> Rat {
    fract(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qfield::{rat, ratio};

    #[test]
    fn z_square_tiled_hlk() {
        // Z_{d²}(e) for even d > 4: one integral point, two of type v.
        for (d, e) in [(6i64, -2i64), (8, -4), (8, 0), (10, -6), (10, 2)] {
            let s = build_surface(&SurfaceSpec::SquareTiledZ { d, e }).unwrap();
            let h = hlk_invariant(&s).unwrap();
            assert_eq!(h.n_integral, 1, "d={d} e={e}");
            assert_eq!(h.types, vec![TorsionType::V, TorsionType::V], "d={d} e={e}");
        }
    }

    #[test]
    fn fr_values_in_restricted_case() {
        for (d, e) in [(20u64, -2i64), (32, 0), (68, -6), (68, -2), (116, -6)] {
            let part = fr_classes(d, e).unwrap();
            let by_label = |l: PrymLabel| {
                part.classes
                    .iter()
                    .find(|(x, _)| *x == l)
                    .unwrap()
                    .1
                    .clone()
            };
            assert_eq!(by_label(PrymLabel::W1), (rat(0), ratio(1, 2)), "D={d} e={e}");
            assert_eq!(by_label(PrymLabel::W2), (rat(0), ratio(1, 2)));
            assert_eq!(by_label(PrymLabel::W3), (rat(0), rat(0)));
            assert_eq!(part.upper_bound, SubgroupClass::Sym2([1, 2]));
        }
    }

    #[test]
    fn fr_outside_restricted_case() {
        assert!(matches!(
            fr_classes(17, -3),
            Err(InvariantError::OutsideRestrictedCase(17, -3))
        ));
        // Perfect squares are handled by the HLK invariant instead.
        assert!(matches!(
            fr_classes(36, -2),
            Err(InvariantError::OutsideRestrictedCase(36, -2))
        ));
    }

    #[test]
    fn fr_path_independence() {
        for (d, e) in [(20u64, -2i64), (68, -2)] {
            let s = build_surface(&SurfaceSpec::Z { d_param: d, e }).unwrap();
            let a = fr_classes_of(&s).unwrap();
            let b = fr_classes_second_base(&s).unwrap();
            for ((l1, f1), (l2, f2)) in a.classes.iter().zip(b.iter()) {
                assert_eq!(l1, l2);
                assert_eq!(f1, f2, "D={d} e={e}");
            }
            for (_, v) in &a.vectors {
                assert!(fr_lattice_invariance(v, d).unwrap());
            }
        }
    }

    #[test]
    fn non_square_tiled_rejected() {
        let s = build_surface(&SurfaceSpec::Z { d_param: 20, e: -2 }).unwrap();
        assert!(matches!(
            hlk_invariant(&s),
            Err(InvariantError::NotSquareTiled(_))
        ));
    }
}
