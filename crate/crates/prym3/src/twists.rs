//! Affine multitwists of parabolic directions: the minimal twist parameter,
//! the parabolic matrix, the induced permutation of the marked points, and
//! the integer P/Q decomposition of Veech-group matrices over the order
//! bases {1, ρ} and {1, ρ/2}.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::cylinders::{moduli_ratios, CylError, CylinderDecomposition, PointLocation};
use crate::geom::Mat2;
use crate::permgroup::MarkedPermutation;
use crate::qfield::{fract, OrderBasis, QFieldError, QuadNum, Rat};
use crate::surface::{PrymLabel, SurfaceError, TranslationSurface};

#[derive(Debug, Error)]
pub enum TwistError {
    #[error(transparent)]
    Cylinders(#[from] CylError),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Field(#[from] QFieldError),
    #[error("twist image of {0} is not a marked point; transcription error")]
    ImageNotMarked(PrymLabel),
    #[error("matrix entry {0} outside the prescribed order")]
    EntriesOutsideOrders(String),
    #[error("D = {0} is not an even quadratic residue mod 16")]
    OutsideRestrictedCase(u64),
    #[error("internal: {0}")]
    Internal(String),
}

/// The multitwist of a parabolic direction.
#[derive(Debug, Clone)]
pub struct Multitwist {
    /// Minimal positive t with t/m_i ∈ Z for every cylinder.
    pub t: QuadNum,
    /// Twist counts k_i = t/m_i per cylinder.
    pub k: Vec<BigInt>,
    /// The parabolic P_θ^t = R_θ T_t R_θ⁻¹.
    pub matrix: Mat2,
}

/// Construct the multitwist of a decomposition with rationally related
/// moduli: t is minimal with k_i = t/m_i all integral, and the k_i are
/// coprime as a family.
pub fn multitwist(dec: &CylinderDecomposition) -> Result<Multitwist, TwistError> {
    let ratios = moduli_ratios(dec)?;
    // r_i = m_i/m_0 = p_i/q_i; the minimal u = t/m_0 is lcm(p_i)/gcd(q_i),
    // and q_0 = 1 makes it the integer lcm(p_i).
    let mut u = BigInt::one();
    for r in &ratios {
        let p = r.numer().abs();
        u = u.lcm(&p);
    }
    let t = dec.cylinders[0].modulus.scale(&Rat::from_integer(u.clone()));
    let mut k = Vec::new();
    for (i, r) in ratios.iter().enumerate() {
        // k_i = u / r_i.
        let ki = Rat::from_integer(u.clone()) / r;
        if !ki.is_integer() {
            return Err(TwistError::Internal(format!(
                "twist count k_{i} = {ki} is not integral"
            )));
        }
        k.push(ki.to_integer());
    }
    let mut g = BigInt::zero();
    for ki in &k {
        g = g.gcd(ki);
    }
    if g != BigInt::one() {
        return Err(TwistError::Internal(format!(
            "twist counts {k:?} share the factor {g}; t not minimal"
        )));
    }

    // P_θ^t = I + t/(x² + y²) · [[−xy, x²], [−y², xy]].
    let (x, y) = (dec.direction.x(), dec.direction.y());
    let n = &(x * x) + &(y * y);
    let f = t.try_div(&n)?;
    let d = t.d_param();
    let one = QuadNum::one(d);
    let matrix = Mat2::new(
        &one - &(&f * &(x * y)),
        &f * &(x * x),
        -&(&f * &(y * y)),
        &one + &(&f * &(x * y)),
    );
    Ok(Multitwist { t, k, matrix })
}

/// The permutation of the marked points induced by the multitwist: inside
/// cylinder i the twist shears by (x, y) ↦ (x + k_i m_i y, y) = (x + t·y, y),
/// boundary points stay fixed, and each image must land on a marked point.
pub fn twist_permutation(
    s: &TranslationSurface,
    dec: &CylinderDecomposition,
) -> Result<MarkedPermutation, TwistError> {
    let tw = multitwist(dec)?;
    let mut images = Vec::new();
    for label in PrymLabel::all() {
        let (_, loc) = dec
            .locations
            .iter()
            .find(|(l, _)| *l == label)
            .ok_or_else(|| TwistError::Internal(format!("unlocated point {label}")))?;
        let image = match loc {
            PointLocation::Boundary { .. } => s.marked(label).clone(),
            PointLocation::Cylinder { height, .. } => {
                let dist = &tw.t * height;
                dec.flow_point(s.marked(label), &dist)?
            }
        };
        // Match the image against the marked points.
        let canon = s.canonical_point(&image)?;
        let mut target = None;
        for other in PrymLabel::all() {
            if s.canonical_point(s.marked(other))? == canon {
                target = Some(other);
                break;
            }
        }
        match target {
            Some(l) => images.push(l.index() - 1),
            None => return Err(TwistError::ImageNotMarked(label)),
        }
    }
    MarkedPermutation::from_images(images)
        .map_err(|e| TwistError::Internal(format!("twist image not a bijection: {e}")))
}

/// Integer matrix with BigInt entries.
pub type IMat = [[BigInt; 2]; 2];

fn det2(m: &IMat) -> BigInt {
    &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0]
}

/// The decomposition A = P_A + Q_A·(ρ/2) with integer matrices, for A with
/// first-row entries in O_D and second-row entries in O_{D/4}.
#[derive(Debug, Clone)]
pub struct PQDecomposition {
    pub p_a: IMat,
    pub q_a: IMat,
    pub d_param: u64,
    /// The canonical even d with d² ≡ D (mod 16).
    pub residue_root: i64,
    /// Entries of P_A reduced mod 2.
    pub p_mod2: [[u8; 2]; 2],
}

impl PQDecomposition {
    pub fn det_p(&self) -> BigInt {
        det2(&self.p_a)
    }

    pub fn det_q(&self) -> BigInt {
        det2(&self.q_a)
    }
}

/// Decompose a Veech-group matrix of Z_D(e) over the bases {1, ρ} (top row)
/// and {1, ρ/2} (bottom row), verifying the determinant identity
/// det(P_A) + ((D − d²)/16)·det(Q_A) = 1 and that det(Q_A) is even.
pub fn pq_decompose(a: &Mat2, d_param: u64) -> Result<PQDecomposition, TwistError> {
    if d_param % 2 != 0 || !(d_param % 16 == 0 || d_param % 16 == 4) {
        return Err(TwistError::OutsideRestrictedCase(d_param));
    }
    let rho_basis = OrderBasis::o_d(d_param)?;
    let half_basis = OrderBasis::o_d_over_4(d_param)?;
    let residue_root = crate::qfield::canonical_residue_root(d_param)?;

    let int_of = |x: &QuadNum, basis: &OrderBasis, double_q: bool| -> Result<(BigInt, BigInt), TwistError> {
        let rp = basis.rational_part_fr(x)?;
        if !rp.p.is_integer() || !rp.q.is_integer() {
            return Err(TwistError::EntriesOutsideOrders(format!(
                "{x} = {} + {}·g is not integral in the required basis",
                rp.p, rp.q
            )));
        }
        let q = if double_q {
            BigInt::from(2) * rp.q.to_integer()
        } else {
            rp.q.to_integer()
        };
        Ok((rp.p.to_integer(), q))
    };

    // Top row in O_D = Z[ρ]: α = p + qρ gives Q-entry 2q (so that the shared
    // half-generator ρ/2 reconstructs the value). Bottom row in O_{D/4} =
    // Z[ρ/2]: γ = p + q(ρ/2) gives Q-entry q.
    let (pa, qa) = int_of(&a.a, &rho_basis, true)?;
    let (pb, qb) = int_of(&a.b, &rho_basis, true)?;
    let (pc, qc) = int_of(&a.c, &half_basis, false)?;
    let (pd, qd) = int_of(&a.d, &half_basis, false)?;

    let p_a: IMat = [[pa, pb], [pc, pd]];
    let q_a: IMat = [[qa, qb], [qc, qd]];

    // Exact reconstruction check.
    let rho_half = half_basis.element();
    for (i, row) in [(0usize, [&a.a, &a.b]), (1usize, [&a.c, &a.d])] {
        for (j, entry) in row.iter().enumerate() {
            let back = rho_half
                .scale(&Rat::from_integer(q_a[i][j].clone()))
                .add_rat(&Rat::from_integer(p_a[i][j].clone()));
            if &back != *entry {
                return Err(TwistError::Internal(format!(
                    "P/Q reconstruction failed at entry ({i}, {j})"
                )));
            }
        }
    }

    let det_q = det2(&q_a);
    if (&det_q % BigInt::from(2)) != BigInt::zero() {
        return Err(TwistError::Internal(format!(
            "det(Q_A) = {det_q} is odd"
        )));
    }
    let det_p = det2(&p_a);
    let scale = BigInt::from((d_param as i64 - residue_root * residue_root) / 16);
    if &det_p + &scale * &det_q != BigInt::one() {
        return Err(TwistError::Internal(format!(
            "determinant identity failed: det P = {det_p}, det Q = {det_q}"
        )));
    }

    let mod2 = |x: &BigInt| -> u8 {
        if x.is_even() {
            0
        } else {
            1
        }
    };
    let p_mod2 = [
        [mod2(&p_a[0][0]), mod2(&p_a[0][1])],
        [mod2(&p_a[1][0]), mod2(&p_a[1][1])],
    ];

    Ok(PQDecomposition {
        p_a,
        q_a,
        d_param,
        residue_root,
        p_mod2,
    })
}

/// The fractional-part data of a displacement vector v ∈ O_{D/4} × ½O_D:
/// the integer vector p_v = (2p₁, p₂) and fr(v) componentwise in the
/// {1, ρ} basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrVector {
    pub p_v: (BigInt, BigInt),
    pub q_v: (BigInt, BigInt),
    pub fr: (Rat, Rat),
}

/// Decompose v = (x, y) with x ∈ O_{D/4} and y ∈ ½·O_D, returning p_v, q_v
/// and fr(v).
pub fn fr_vector(v: &crate::geom::V2, d_param: u64) -> Result<FrVector, TwistError> {
    let rho_basis = OrderBasis::o_d(d_param)?;
    let half_basis = OrderBasis::o_d_over_4(d_param)?;

    // x = p₁ + q₁·(ρ/2) with p₁, q₁ ∈ Z.
    let rx = half_basis.rational_part_fr(&v.x)?;
    if !rx.p.is_integer() || !rx.q.is_integer() {
        return Err(TwistError::EntriesOutsideOrders(format!(
            "x-coordinate {} outside O_(D/4)",
            v.x
        )));
    }
    // y = p₂/2 + (q₂/2)·ρ with p₂, q₂ ∈ Z.
    let ry = rho_basis.rational_part_fr(&v.y)?;
    let p2 = &ry.p * crate::qfield::rat(2);
    let q2 = &ry.q * crate::qfield::rat(2);
    if !p2.is_integer() || !q2.is_integer() {
        return Err(TwistError::EntriesOutsideOrders(format!(
            "y-coordinate {} outside ½·O_D",
            v.y
        )));
    }

    // fr in the {1, ρ} basis, componentwise.
    let fx = rho_basis.rational_part_fr(&v.x)?;
    let fy = ry;
    Ok(FrVector {
        p_v: (
            (rx.p.to_integer()) * BigInt::from(2),
            p2.to_integer(),
        ),
        q_v: (rx.q.to_integer(), q2.to_integer()),
        fr: (fx.fr, fy.fr),
    })
}

/// The action law fr(A·v) = ½·P_A·p_v (mod 1): computes both sides exactly.
pub fn fr_action_law(
    a: &Mat2,
    pq: &PQDecomposition,
    v: &crate::geom::V2,
) -> Result<bool, TwistError> {
    let image = a.apply(v);
    let lhs = fr_vector(&image, pq.d_param)?.fr;
    let pv = fr_vector(v, pq.d_param)?.p_v;
    let half = crate::qfield::ratio(1, 2);
    let rhs0 = fract(
        &(Rat::from_integer(&pq.p_a[0][0] * &pv.0 + &pq.p_a[0][1] * &pv.1) * &half),
    );
    let rhs1 = fract(
        &(Rat::from_integer(&pq.p_a[1][0] * &pv.0 + &pq.p_a[1][1] * &pv.1) * &half),
    );
    Ok(lhs.0 == rhs0 && lhs.1 == rhs1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cylinders::{cylinder_decomposition, Direction};
    use crate::prototypes::Prototype;
    use crate::qfield::rat;
    use crate::surface::{build_surface, SurfaceSpec};

    fn twist_on(spec: &SurfaceSpec, x: i64, y: i64) -> (Multitwist, MarkedPermutation) {
        let s = build_surface(spec).unwrap();
        let dir = Direction::from_ints(s.d_param(), x, y).unwrap();
        let dec = cylinder_decomposition(&s, &dir, 100_000).unwrap();
        let tw = multitwist(&dec).unwrap();
        let perm = twist_permutation(&s, &dec).unwrap();
        (tw, perm)
    }

    #[test]
    fn a_minus_horizontal_twist_data() {
        // Moduli {b, 1, 1} with b = 8: t = b, k = {1, 8, 8}.
        let spec = SurfaceSpec::AMinus(Prototype::reduced(73, -3).unwrap());
        let (tw, perm) = twist_on(&spec, 1, 0);
        assert_eq!(tw.t.to_rat().unwrap(), rat(8));
        let mut ks: Vec<i64> = tw.k.iter().map(|k| i64::try_from(k).unwrap()).collect();
        ks.sort();
        assert_eq!(ks, vec![1, 8, 8]);
        // Horizontal twist on A⁻ always exchanges w1 and w2.
        assert_eq!(perm.cycles(), "(1 2)");
    }

    #[test]
    fn single_cylinder_twist() {
        let spec = SurfaceSpec::AMinus(Prototype::reduced(25, -1).unwrap());
        let (tw, perm) = twist_on(&spec, 1, 1);
        assert_eq!(tw.k.len(), 1);
        assert_eq!(tw.k[0], num_bigint::BigInt::from(1));
        assert_eq!(perm.cycles(), "(1 3)");
    }

    #[test]
    fn lemma_parity_table_small() {
        // A⁺ horizontal: (1 2) iff b odd; A⁻ horizontal: always (1 2);
        // A⁺ vertical: always (1 3); A⁻ vertical: (1 3) iff b − e − 2 odd.
        for (d, e) in [(17u64, -3i64), (17, -1), (73, -3), (41, 1), (68, -2), (33, -5)] {
            let b = (d as i64 - e * e) / 8;
            let plus = SurfaceSpec::APlus(Prototype::reduced(d, e).unwrap());
            let minus = SurfaceSpec::AMinus(Prototype::reduced(d, e).unwrap());
            let (_, ph) = twist_on(&plus, 1, 0);
            assert_eq!(
                ph.cycles(),
                if b % 2 != 0 { "(1 2)" } else { "id" },
                "A+ horizontal D={d} e={e}"
            );
            let (_, mh) = twist_on(&minus, 1, 0);
            assert_eq!(mh.cycles(), "(1 2)", "A- horizontal D={d} e={e}");
            let (_, pv) = twist_on(&plus, 0, 1);
            assert_eq!(pv.cycles(), "(1 3)", "A+ vertical D={d} e={e}");
            let (_, mv) = twist_on(&minus, 0, 1);
            assert_eq!(
                mv.cycles(),
                if (b - e - 2) % 2 != 0 { "(2 3)" } else { "id" },
                "A- vertical D={d} e={e}"
            );
        }
    }

    #[test]
    fn z17_parabolic_exchanges_w2_w3() {
        let spec = SurfaceSpec::Z { d_param: 17, e: -3 };
        let (tw, perm) = twist_on(&spec, 2, 1);
        assert_eq!(perm.cycles(), "(2 3)");
        let mut ks: Vec<i64> = tw.k.iter().map(|k| i64::try_from(k).unwrap()).collect();
        ks.sort();
        assert_eq!(ks, vec![1, 2, 2]);
    }

    #[test]
    fn pq_identity_example() {
        // Horizontal multitwist of Z_20(−2): T_t with t = (√20 + 2)/2 = ρ + 2,
        // so P_A = [[1, 2], [0, 1]] and Q_A = [[0, 2], [0, 0]].
        let d = 20u64;
        let spec = SurfaceSpec::Z { d_param: d, e: -2 };
        let s = build_surface(&spec).unwrap();
        let dir = Direction::horizontal(d);
        let dec = cylinder_decomposition(&s, &dir, 100_000).unwrap();
        let tw = multitwist(&dec).unwrap();
        let pq = pq_decompose(&tw.matrix, d).unwrap();
        let two = BigInt::from(2);
        assert_eq!(pq.p_a[0][0], BigInt::from(1));
        assert_eq!(pq.p_a[0][1], two.clone());
        assert_eq!(pq.p_a[1][0], BigInt::from(0));
        assert_eq!(pq.p_a[1][1], BigInt::from(1));
        assert_eq!(pq.q_a[0][1], two);
        assert_eq!(pq.det_p(), BigInt::from(1));
        assert_eq!(pq.det_q(), BigInt::from(0));
    }

    #[test]
    fn pq_identity_matrix() {
        let d = 20u64;
        let a = Mat2::identity(d);
        let pq = pq_decompose(&a, d).unwrap();
        assert_eq!(pq.p_a[0][0], BigInt::from(1));
        assert_eq!(pq.q_a, [
            [BigInt::from(0), BigInt::from(0)],
            [BigInt::from(0), BigInt::from(0)]
        ]);
    }

    #[test]
    fn twist_sign_convention_is_immaterial() {
        // The induced permutation is parity-determined, so the left-handed
        // twist (negative shear) induces the same permutation.
        let d = 73u64;
        let spec = SurfaceSpec::AMinus(Prototype::reduced(d, -3).unwrap());
        let s = build_surface(&spec).unwrap();
        let dir = Direction::horizontal(d);
        let dec = cylinder_decomposition(&s, &dir, 100_000).unwrap();
        let tw = multitwist(&dec).unwrap();
        let perm = twist_permutation(&s, &dec).unwrap();
        // Flow by width − t·h instead of t·h: the reverse twist.
        let mut images = Vec::new();
        for label in PrymLabel::all() {
            let (_, loc) = dec
                .locations
                .iter()
                .find(|(l, _)| *l == label)
                .unwrap();
            let image = match loc {
                PointLocation::Cylinder { index, height, .. } => {
                    let w = &dec.cylinders[*index].width;
                    let fwd = &tw.t * height;
                    // Reduce mod w, then go the other way round.
                    let mut red = fwd.clone();
                    while (&red - w).sign() != crate::qfield::Sign::Negative {
                        red = &red - w;
                    }
                    let back = w - &red;
                    dec.flow_point(s.marked(label), &back).unwrap()
                }
                _ => s.marked(label).clone(),
            };
            let canon = s.canonical_point(&image).unwrap();
            let target = PrymLabel::all()
                .into_iter()
                .find(|l| s.canonical_point(s.marked(*l)).unwrap() == canon)
                .unwrap();
            images.push(target.index() - 1);
        }
        let reverse = MarkedPermutation::from_images(images).unwrap();
        assert_eq!(perm, reverse);
    }
}
