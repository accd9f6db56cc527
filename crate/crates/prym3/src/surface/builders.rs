//! Builders for every surface family the verification uses.
//!
//! The three-cylinder prototypes A⁺(a,b,c,e) and A⁻(a,b,c,e) are keyed in as
//! λ-parameterized rectangle templates (λ = (e + √D)/2). Correctness is not
//! taken on faith: the cylinder cross-checks (moduli multisets, marked-point
//! locations, parity behaviour of the twists) over-determine the templates
//! and are enforced by the validation and test suites.
//!
//! Layout of A⁺(a,b,c,e): a λ×λ square P on top of two b×c rectangles C, C′
//! glued in a vertical cycle P → C → C′ → P along a width-λ window, with the
//! remaining width b − λ of each rectangle closing onto itself. The square
//! carries the twist parameter a on its return gluing. The involution fixes
//! P (two fixed points on its horizontal core) and swaps C with C′.
//!
//! Layout of A⁻(a,b,c,e): one b×c rectangle L below two (λ/2)×(λ/2) squares
//! P₁, P₂ over windows [0, λ/2] and [λ/2, λ] of its top side; the rest of L
//! closes onto itself with horizontal shift a. The involution fixes L and
//! swaps the squares.
//!
//! Z_D(e) is exactly diag(2/λ, 1) · A⁻_D(e).

use crate::geom::{Mat2, V2};
use crate::prototypes::Prototype;
use crate::qfield::{rat, ratio, QuadNum, Rat};
use crate::surface::{
    apply_matrix, EdgeRef, PointOnSurface, Polygon, PrymLabel, SurfaceError, TranslationSurface,
};

/// Which surface to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurfaceSpec {
    /// Prototypical surface A⁺(a, b, c, e).
    APlus(Prototype),
    /// Prototypical surface A⁻(a, b, c, e).
    AMinus(Prototype),
    /// Re-scaled surface Z_D(e) = diag(2/λ, 1) · A⁻_D(e), e ∈ S_D.
    Z { d_param: u64, e: i64 },
    /// Square-tiled Z_{d²}(e) for even d > 4.
    SquareTiledZ { d: i64, e: i64 },
    /// The discriminant-8 representative B₈(0).
    B8,
    /// Two-cylinder square-tiled family, parameterized by d > 4.
    ModelC { d: i64 },
    /// One-cylinder square-tiled family, parameterized by d > 4.
    ModelD { d: i64 },
}

fn q(d: u64, n: i64) -> QuadNum {
    QuadNum::from_int(d, n)
}

fn qr(d: u64, r: Rat) -> QuadNum {
    QuadNum::from_rat(d, r)
}

fn v(x: QuadNum, y: QuadNum) -> V2 {
    V2::new(x, y)
}

/// λ = (e + √D)/2 as used by all prototype templates.
fn lam(d: u64, e: i64) -> QuadNum {
    crate::qfield::lambda(d, e)
}

/// Build the surface described by `spec`.
pub fn build_surface(spec: &SurfaceSpec) -> Result<TranslationSurface, SurfaceError> {
    match spec {
        SurfaceSpec::APlus(p) => build_a_plus(p),
        SurfaceSpec::AMinus(p) => build_a_minus(p),
        SurfaceSpec::Z { d_param, e } => build_z(*d_param, *e),
        SurfaceSpec::SquareTiledZ { d, e } => {
            if *d <= 4 || d % 2 != 0 {
                return Err(SurfaceError::InadmissibleSpec(format!(
                    "square-tiled Z needs even d > 4, got {d}"
                )));
            }
            build_z((d * d) as u64, *e)
        }
        SurfaceSpec::B8 => build_b8(),
        SurfaceSpec::ModelC { d } => build_model_c(*d),
        SurfaceSpec::ModelD { d } => build_model_d(*d),
    }
}

/// A⁺(a, b, c, e).
fn build_a_plus(proto: &Prototype) -> Result<TranslationSurface, SurfaceError> {
    let d = proto.d_param;
    let (a, b, c) = (proto.a, proto.b, proto.c);
    let l = lam(d, proto.e);
    let (zero, bq, aq) = (q(d, 0), q(d, b), q(d, a));
    let lc = &l + &q(d, c); // λ + c
    let l2c = &l + &q(d, 2 * c); // λ + 2c

    let p_poly = if a == 0 {
        Polygon {
            vertices: vec![
                v(zero.clone(), zero.clone()),
                v(l.clone(), zero.clone()),
                v(l.clone(), l.clone()),
                v(zero.clone(), l.clone()),
            ],
        }
    } else {
        Polygon {
            vertices: vec![
                v(zero.clone(), zero.clone()),
                v(aq.clone(), zero.clone()),
                v(l.clone(), zero.clone()),
                v(l.clone(), l.clone()),
                v(zero.clone(), l.clone()),
            ],
        }
    };
    let c_poly = Polygon {
        vertices: vec![
            v(zero.clone(), l.clone()),
            v(l.clone(), l.clone()),
            v(bq.clone(), l.clone()),
            v(bq.clone(), lc.clone()),
            v(l.clone(), lc.clone()),
            v(zero.clone(), lc.clone()),
        ],
    };
    let lma = &l - &aq; // λ − a
    let cp_poly = if a == 0 {
        Polygon {
            vertices: vec![
                v(zero.clone(), lc.clone()),
                v(l.clone(), lc.clone()),
                v(bq.clone(), lc.clone()),
                v(bq.clone(), l2c.clone()),
                v(l.clone(), l2c.clone()),
                v(zero.clone(), l2c.clone()),
            ],
        }
    } else {
        Polygon {
            vertices: vec![
                v(zero.clone(), lc.clone()),
                v(l.clone(), lc.clone()),
                v(bq.clone(), lc.clone()),
                v(bq.clone(), l2c.clone()),
                v(l.clone(), l2c.clone()),
                v(lma.clone(), l2c.clone()),
                v(zero.clone(), l2c.clone()),
            ],
        }
    };

    let er = |poly, edge| EdgeRef { poly, edge };
    let gluings = if a == 0 {
        vec![
            (er(0, 2), er(1, 0)), // P.top ↔ C.bottom[0,λ]
            (er(1, 1), er(1, 3)), // C self: bottom[λ,b] ↔ top[λ,b]
            (er(1, 4), er(2, 0)), // C.top[0,λ] ↔ C′.bottom[0,λ]
            (er(2, 1), er(2, 3)), // C′ self
            (er(2, 4), er(0, 0)), // C′.top[0,λ] ↔ P.bottom
            (er(0, 3), er(0, 1)), // P seam
            (er(1, 5), er(1, 2)), // C seam
            (er(2, 5), er(2, 2)), // C′ seam
        ]
    } else {
        vec![
            (er(0, 3), er(1, 0)), // P.top ↔ C.bottom[0,λ]
            (er(1, 1), er(1, 3)), // C self
            (er(1, 4), er(2, 0)), // C.top[0,λ] ↔ C′.bottom[0,λ]
            (er(2, 1), er(2, 3)), // C′ self
            (er(2, 5), er(0, 1)), // C′.top[0,λ−a] ↔ P.bottom[a,λ]
            (er(2, 4), er(0, 0)), // C′.top[λ−a,λ] ↔ P.bottom[0,a]
            (er(0, 4), er(0, 2)), // P seam
            (er(1, 5), er(1, 2)), // C seam
            (er(2, 6), er(2, 2)), // C′ seam
        ]
    };

    let half = ratio(1, 2);
    // w1, w2 on P's horizontal core at x = (a+λ)/2 and a/2; w3 at the
    // midpoint of the C–C′ interface window.
    let w1 = PointOnSurface {
        poly: 0,
        pos: v((&aq + &l).scale(&half), l.scale(&half)),
    };
    let w2 = PointOnSurface {
        poly: 0,
        pos: v(aq.scale(&half), l.scale(&half)),
    };
    let w3 = PointOnSurface {
        poly: 1,
        pos: v(l.scale(&half), lc.clone()),
    };
    let marked = vec![
        (PrymLabel::W1, w1),
        (PrymLabel::W2, w2),
        (PrymLabel::W3, w3),
    ];
    let centers = vec![
        v(aq.clone(), l.clone()),    // P: (a, λ)
        v(l.clone(), &l2c + &l),     // C: (λ, 2λ+2c) → C′
        v(l.clone(), &l2c + &l),     // C′: (λ, 2λ+2c) → C
    ];
    TranslationSurface::new(d, vec![p_poly, c_poly, cp_poly], gluings, marked, centers)
}

/// A⁻(a, b, c, e).
fn build_a_minus(proto: &Prototype) -> Result<TranslationSurface, SurfaceError> {
    let d = proto.d_param;
    let (a, b, c) = (proto.a, proto.b, proto.c);
    let l = lam(d, proto.e);
    let half = ratio(1, 2);
    let hl = l.scale(&half); // λ/2
    let (zero, bq, cq, aq) = (q(d, 0), q(d, b), q(d, c), q(d, a));
    let chl = &cq + &hl; // c + λ/2
    let apl = &aq + &l; // a + λ
    let aphl = &aq + &hl; // a + λ/2
    let bma = &bq - &aq; // b − a

    // The self-gluing window [a+λ, a+b] must not wrap past b twice; a single
    // wrap (a > 0) splits it into two pieces. Needs a + λ < b, which holds
    // for every valid prototype with a < c ≤ (b − e)/2 − ... checked here.
    if !(&bq - &apl).is_positive() {
        return Err(SurfaceError::InadmissibleSpec(format!(
            "A⁻ needs a + λ < b, violated by {proto:?}"
        )));
    }

    // L bottom cut points: 0 [, a], a+λ/2 is between? order: 0 < a < a+λ/2 < a+λ < b.
    let mut bottom_cuts = vec![zero.clone()];
    if a > 0 {
        bottom_cuts.push(aq.clone());
    }
    bottom_cuts.push(aphl.clone());
    bottom_cuts.push(apl.clone());
    // L top cut points (traversed right to left): b [, b−a], λ, λ/2, 0.
    let mut top_cuts = vec![hl.clone(), l.clone()];
    if a > 0 {
        top_cuts.push(bma.clone());
    }

    let mut verts = Vec::new();
    for x in &bottom_cuts {
        verts.push(v(x.clone(), zero.clone()));
    }
    verts.push(v(bq.clone(), zero.clone()));
    verts.push(v(bq.clone(), cq.clone()));
    for x in top_cuts.iter().rev() {
        verts.push(v(x.clone(), cq.clone()));
    }
    verts.push(v(zero.clone(), cq.clone()));
    let l_poly = Polygon { vertices: verts };

    let p1_poly = Polygon {
        vertices: vec![
            v(zero.clone(), cq.clone()),
            v(hl.clone(), cq.clone()),
            v(hl.clone(), chl.clone()),
            v(zero.clone(), chl.clone()),
        ],
    };
    let p2_poly = Polygon {
        vertices: vec![
            v(hl.clone(), cq.clone()),
            v(l.clone(), cq.clone()),
            v(l.clone(), chl.clone()),
            v(hl.clone(), chl.clone()),
        ],
    };

    // Edge indices of L, CCW from (0, 0). Bottom pieces follow bottom_cuts;
    // then right; then top pieces from x = b leftwards; then left.
    let nb = bottom_cuts.len();
    let e_l = |edge| EdgeRef { poly: 0, edge };
    let bottom_at = |x: &QuadNum| -> EdgeRef {
        e_l(bottom_cuts
            .iter()
            .position(|y| y == x)
            .expect("bottom cut present"))
    };
    let right = e_l(nb);
    // Top pieces in CCW order: [b−a, b] (a>0), [λ, b−a or b], [λ/2, λ], [0, λ/2].
    let top_base = nb + 1;
    let (top_wrap, top_self, top_p2, top_p1) = if a > 0 {
        (
            Some(e_l(top_base)),
            e_l(top_base + 1),
            e_l(top_base + 2),
            e_l(top_base + 3),
        )
    } else {
        (None, e_l(top_base), e_l(top_base + 1), e_l(top_base + 2))
    };
    let left = e_l(top_base + top_cuts.len() + 1);

    let mut gluings = vec![
        (EdgeRef { poly: 1, edge: 0 }, top_p1), // P₁.bottom ↔ L.top[0,λ/2]
        (EdgeRef { poly: 2, edge: 0 }, top_p2), // P₂.bottom ↔ L.top[λ/2,λ]
        (EdgeRef { poly: 1, edge: 2 }, bottom_at(&aq)), // P₁.top ↔ L.bottom[a,a+λ/2]
        (EdgeRef { poly: 2, edge: 2 }, bottom_at(&aphl)), // P₂.top ↔ L.bottom[a+λ/2,a+λ]
        (top_self, bottom_at(&apl)), // L.top[λ, b−a] ↔ L.bottom[a+λ, b]
        (
            EdgeRef { poly: 1, edge: 3 },
            EdgeRef { poly: 1, edge: 1 },
        ),
        (
            EdgeRef { poly: 2, edge: 3 },
            EdgeRef { poly: 2, edge: 1 },
        ),
        (left, right),
    ];
    if let Some(w) = top_wrap {
        gluings.push((w, bottom_at(&zero))); // L.top[b−a, b] ↔ L.bottom[0, a]
    }

    // Label convention (§6.2/§6.3): w2 is the core point shared by the
    // horizontal long cylinder and the vertical short cylinder, w1 the other
    // horizontal core point, w3 the boundary point of the vertical short
    // core. The horizontal twist exchanges w1, w2; the vertical twist
    // exchanges w2, w3 when b − e − 2 is odd.
    let w1 = PointOnSurface {
        poly: 0,
        pos: v(apl.scale(&half), cq.scale(&half)),
    };
    let w2 = PointOnSurface {
        poly: 0,
        pos: v((&apl + &bq).scale(&half), cq.scale(&half)),
    };
    let w3 = PointOnSurface {
        poly: 0,
        pos: v((&l + &bq).scale(&half), cq.clone()),
    };
    let marked = vec![
        (PrymLabel::W1, w1),
        (PrymLabel::W2, w2),
        (PrymLabel::W3, w3),
    ];
    let two_c = &cq + &cq;
    let centers = vec![
        v(apl.clone(), cq.clone()),  // L: (a+λ, c)
        v(l.clone(), &two_c + &hl),  // P₁: (λ, 2c+λ/2) → P₂
        v(l.clone(), &two_c + &hl),  // P₂ → P₁
    ];
    TranslationSurface::new(
        d,
        vec![l_poly, p1_poly, p2_poly],
        gluings,
        marked,
        centers,
    )
}

/// Z_D(e) = diag(2/λ, 1) · A⁻_D(e) for a reduced prototype e ∈ S_D.
fn build_z(d_param: u64, e: i64) -> Result<TranslationSurface, SurfaceError> {
    let proto = Prototype::reduced(d_param, e)
        .map_err(|err| SurfaceError::InadmissibleSpec(err.to_string()))?;
    let base = build_a_minus(&proto)?;
    let l = lam(d_param, e);
    let two_over_l = q(d_param, 2)
        .try_div(&l)
        .map_err(|err| SurfaceError::InadmissibleSpec(err.to_string()))?;
    let m = Mat2::diag(two_over_l, q(d_param, 1));
    apply_matrix(&base, &m)
}

/// A complex of horizontal cylinders: row i is a w_i × h_i rectangle whose
/// top circle is cut into pieces, each glued to a stated position on some
/// row's bottom circle. Rows are stacked in the plane for concreteness; the
/// gluings carry the real geometry.
#[derive(Debug, Clone)]
pub struct CylinderComplexSpec {
    pub d_param: u64,
    /// (width, height) per row.
    pub rows: Vec<(QuadNum, QuadNum)>,
    /// Per row: pieces of its top circle in order from x = 0, as
    /// (width, target row, target bottom position).
    pub tops: Vec<Vec<(QuadNum, usize, QuadNum)>>,
    /// Involution center per row.
    pub centers: Vec<V2>,
    /// Marked points (label, row, x, y relative to the row's rectangle).
    pub marked: Vec<(PrymLabel, QuadNum, QuadNum, usize)>,
}

/// Build the translation surface of a cylinder complex.
pub fn build_cylinder_complex(
    spec: &CylinderComplexSpec,
) -> Result<TranslationSurface, SurfaceError> {
    let d = spec.d_param;
    let zero = QuadNum::zero(d);
    let n = spec.rows.len();
    let fail = |m: &str| SurfaceError::InadmissibleSpec(m.to_string());

    // Row base heights: stack rows bottom-to-top in the plane.
    let mut base = Vec::with_capacity(n);
    let mut acc = zero.clone();
    for (_, h) in &spec.rows {
        base.push(acc.clone());
        acc = &acc + h;
    }

    // Atomic gluing list: (row, top x0, x1) → (row2, bottom x0', x1'),
    // splitting pieces that wrap past the target width.
    struct Atom {
        top_row: usize,
        t0: QuadNum,
        t1: QuadNum,
        bot_row: usize,
        b0: QuadNum,
    }
    let mut atoms: Vec<Atom> = Vec::new();
    for (r, pieces) in spec.tops.iter().enumerate() {
        let mut cursor = zero.clone();
        for (w, target, pos) in pieces {
            if !w.is_positive() {
                return Err(fail("piece widths must be positive"));
            }
            let wt = &spec.rows[*target].0;
            // Reduce pos mod target width.
            let mut p = pos.clone();
            while p.is_negative() {
                p = &p + wt;
            }
            while !(&p - wt).is_negative() {
                p = &p - wt;
            }
            let mut remaining = w.clone();
            let mut t = cursor.clone();
            while remaining.is_positive() {
                let room = wt - &p;
                let step = if (&remaining - &room).is_positive() {
                    room.clone()
                } else {
                    remaining.clone()
                };
                atoms.push(Atom {
                    top_row: r,
                    t0: t.clone(),
                    t1: &t + &step,
                    bot_row: *target,
                    b0: p.clone(),
                });
                t = &t + &step;
                p = &p + &step;
                if p == *wt {
                    p = zero.clone();
                }
                remaining = &remaining - &step;
            }
            cursor = &cursor + w;
        }
        if cursor != spec.rows[r].0 {
            return Err(fail("top pieces must tile the row width"));
        }
    }

    // Cut sets per row: top cuts from atoms, bottom cuts from incoming
    // atoms. The incoming pieces must tile each bottom circle exactly.
    let mut top_cuts: Vec<Vec<QuadNum>> = vec![vec![zero.clone()]; n];
    let mut bottom_cuts: Vec<Vec<QuadNum>> = vec![vec![zero.clone()]; n];
    for a in &atoms {
        for val in [a.t0.clone(), a.t1.clone()] {
            let set = &mut top_cuts[a.top_row];
            if !set.contains(&val) && val != spec.rows[a.top_row].0 {
                set.push(val);
            }
        }
        let b1 = &a.b0 + &(&a.t1 - &a.t0);
        for val in [a.b0.clone(), b1] {
            if !bottom_cuts[a.bot_row].contains(&val) && val != spec.rows[a.bot_row].0 {
                bottom_cuts[a.bot_row].push(val);
            }
        }
    }
    // An atom whose image spans an interior bottom cut needs a matching
    // vertex on the top side.
    for a in &atoms {
        let width = &a.t1 - &a.t0;
        for c in bottom_cuts[a.bot_row].clone() {
            let rel = &c - &a.b0;
            if rel.is_positive() && (&width - &rel).is_positive() {
                let t = &a.t0 + &rel;
                if !top_cuts[a.top_row].contains(&t) {
                    top_cuts[a.top_row].push(t);
                }
            }
        }
    }
    for r in 0..n {
        top_cuts[r].sort();
        bottom_cuts[r].sort();
    }
    // Coverage check: total incoming width per row equals its width.
    for r in 0..n {
        let mut total = zero.clone();
        for a in &atoms {
            if a.bot_row == r {
                total = &total + &(&a.t1 - &a.t0);
            }
        }
        if total != spec.rows[r].0 {
            return Err(fail("бottom circles must be tiled exactly"));
        }
    }

    // Polygons.
    let mut polygons = Vec::with_capacity(n);
    for r in 0..n {
        let (w, h) = &spec.rows[r];
        let y0 = &base[r];
        let y1 = &(y0 + h);
        let mut verts = Vec::new();
        for x in &bottom_cuts[r] {
            verts.push(V2::new(x.clone(), y0.clone()));
        }
        verts.push(V2::new(w.clone(), y0.clone()));
        verts.push(V2::new(w.clone(), y1.clone()));
        for x in top_cuts[r].iter().rev() {
            if !x.is_zero() {
                verts.push(V2::new(x.clone(), y1.clone()));
            }
        }
        verts.push(V2::new(zero.clone(), y1.clone()));
        polygons.push(Polygon { vertices: verts });
    }

    let find_edge = |polygons: &[Polygon], pi: usize, a: &V2, b: &V2| -> Option<EdgeRef> {
        let poly = &polygons[pi];
        let m = poly.vertices.len();
        (0..m)
            .find(|&i| poly.vertex(i) == a && poly.vertex(i + 1) == b)
            .map(|i| EdgeRef { poly: pi, edge: i })
    };

    let mut gluings = Vec::new();
    // Seams.
    for r in 0..n {
        let (w, h) = &spec.rows[r];
        let y0 = &base[r];
        let y1 = &(y0 + h);
        let left = find_edge(
            &polygons,
            r,
            &V2::new(zero.clone(), y1.clone()),
            &V2::new(zero.clone(), y0.clone()),
        )
        .ok_or_else(|| fail("left seam lookup"))?;
        let right = find_edge(
            &polygons,
            r,
            &V2::new(w.clone(), y0.clone()),
            &V2::new(w.clone(), y1.clone()),
        )
        .ok_or_else(|| fail("right seam lookup"))?;
        gluings.push((left, right));
    }
    // Atoms: further split at bottom cuts of the target (an atom's image
    // can span several bottom edges when other atoms cut the interval).
    for a in &atoms {
        let width = &a.t1 - &a.t0;
        let y_top = &(&base[a.top_row] + &spec.rows[a.top_row].1);
        let y_bot = &base[a.bot_row];
        // Split [b0, b0+width] at target bottom cuts.
        let mut marks = vec![zero.clone(), width.clone()];
        for c in &bottom_cuts[a.bot_row] {
            let rel = c - &a.b0;
            if rel.is_positive() && (&width - &rel).is_positive() && !marks.contains(&rel) {
                marks.push(rel);
            }
        }
        // Also split at source top cuts (atoms are already atomic on top).
        marks.sort();
        for pair in marks.windows(2) {
            let (r0, r1) = (&pair[0], &pair[1]);
            let t0 = &a.t0 + r0;
            let t1 = &a.t0 + r1;
            let b0 = &a.b0 + r0;
            let b1 = &a.b0 + r1;
            let top = find_edge(
                &polygons,
                a.top_row,
                &V2::new(t1.clone(), y_top.clone()),
                &V2::new(t0, y_top.clone()),
            )
            .ok_or_else(|| fail("top piece lookup"))?;
            let bottom = find_edge(
                &polygons,
                a.bot_row,
                &V2::new(b0, y_bot.clone()),
                &V2::new(b1, y_bot.clone()),
            )
            .ok_or_else(|| fail("bottom piece lookup"))?;
            gluings.push((top, bottom));
        }
    }

    let marked = spec
        .marked
        .iter()
        .map(|(l, x, y, row)| {
            (
                *l,
                PointOnSurface {
                    poly: *row,
                    pos: V2::new(x.clone(), &base[*row] + y),
                },
            )
        })
        .collect();
    TranslationSurface::new(d, polygons, gluings, marked, spec.centers.clone())
}

/// B₈(0): the discriminant-8 representative.
///
/// Discriminant 8 admits no splitting prototype. The representative is the
/// member of the tower family below with the width and twist frozen from
/// the derivation search; its horizontal cylinders all have modulus 1 and
/// its vertical direction is parabolic.
fn build_b8() -> Result<TranslationSurface, SurfaceError> {
    let d = 8u64;
    let rt2 = QuadNum::sqrt_d(d).scale(&ratio(1, 2)); // √2
    let wp = &q(d, 1) + &rt2; // 1 + √2
    let cx = wp.scale(&ratio(1, 2)); // (1 + √2)/2
    build_b8_family(&wp, &cx)
}

/// The discriminant-8 tower family: a big square cylinder P = w×w whose top
/// feeds a unit square C₁ on [0, 1] and returns to itself on two symmetric
/// self windows covering [1, w]; C₁ feeds a second unit square C₂ directly,
/// and C₂ returns to P's bottom. The involution fixes P (center x = cx) and
/// swaps C₁ with C₂; equivariance forces the self windows to have equal
/// width (w−1)/2, the C₁ → C₂ offset to vanish, and the bottom arrangement
/// to end at cx.
pub fn build_b8_tower(w_p: &QuadNum, cx: &QuadNum) -> Result<TranslationSurface, SurfaceError> {
    let d = 8u64;
    if w_p.d_param() != d || cx.d_param() != d {
        return Err(SurfaceError::InadmissibleSpec(
            "parameters must live in Q(√8)".into(),
        ));
    }
    let one = q(d, 1);
    if !(w_p - &one).is_positive() {
        return Err(SurfaceError::InadmissibleSpec(format!(
            "need w > 1, got {w_p}"
        )));
    }
    let reduce = |x: &QuadNum| -> QuadNum {
        let mut y = x.clone();
        while y.is_negative() {
            y = &y + w_p;
        }
        while !(&y - w_p).is_negative() {
            y = &y - w_p;
        }
        y
    };
    let half = ratio(1, 2);
    let sigma = (w_p - &one).scale(&half); // each self window width
    // Bottom windows, ending at cx: s2 = [cx−w, cx−1−σ], s3 = [cx−1−σ, cx−1],
    // s5 = [cx−1, cx].
    let p2 = reduce(&(cx - w_p));
    let p3 = reduce(&(&(cx - &one) - &sigma));
    let p5 = reduce(&(cx - &one));
    let spec = CylinderComplexSpec {
        d_param: d,
        rows: vec![
            (w_p.clone(), w_p.clone()),
            (one.clone(), one.clone()),
            (one.clone(), one.clone()),
        ],
        tops: vec![
            vec![
                (one.clone(), 1usize, q(d, 0)),
                (sigma.clone(), 0usize, p2),
                (sigma.clone(), 0usize, p3),
            ],
            vec![(one.clone(), 2usize, q(d, 0))],
            vec![(one.clone(), 0usize, p5)],
        ],
        centers: vec![
            V2::new(cx.clone(), w_p.clone()),
            V2::new(one.clone(), &(w_p + w_p) + &q(d, 2)),
            V2::new(one.clone(), &(w_p + w_p) + &q(d, 2)),
        ],
        marked: Vec::new(),
    };
    let bare = build_cylinder_complex(&spec)?;
    let xa = reduce(&cx.scale(&half));
    let xb = reduce(&(cx + w_p).scale(&half));
    let (x1, x2) = if xa < xb { (xa, xb) } else { (xb, xa) };
    let core_y = w_p.scale(&half);
    let marked = vec![
        (
            PrymLabel::W1,
            PointOnSurface {
                poly: 0,
                pos: V2::new(x1, core_y.clone()),
            },
        ),
        (
            PrymLabel::W2,
            PointOnSurface {
                poly: 0,
                pos: V2::new(x2, core_y),
            },
        ),
        (
            PrymLabel::W3,
            PointOnSurface {
                poly: 1,
                pos: V2::new(qr(d, ratio(1, 2)), w_p + &one),
            },
        ),
    ];
    TranslationSurface::new(
        d,
        bare.polygons().to_vec(),
        bare.gluings().to_vec(),
        marked,
        bare.involution_centers().to_vec(),
    )
}

/// The discriminant-8 three-cylinder family: a big square cylinder
/// P = w×w (w > 2) whose top feeds a unit square C₁ on [0, 1], itself on
/// [1, w−1], and a unit square C₂ on [w−1, w]; both unit squares return to
/// P's bottom. The involution fixes P and swaps C₁ with C₂; equivariance
/// forces the bottom arrangement up to the single twist parameter `cx`
/// (the involution center of P), which also controls the vertical return
/// rotation.
pub fn build_b8_family(w_p: &QuadNum, cx: &QuadNum) -> Result<TranslationSurface, SurfaceError> {
    let d = 8u64;
    if w_p.d_param() != d || cx.d_param() != d {
        return Err(SurfaceError::InadmissibleSpec("parameters must live in Q(√8)".into()));
    }
    let one = q(d, 1);
    let two = q(d, 2);
    if !(w_p - &two).is_positive() {
        return Err(SurfaceError::InadmissibleSpec(format!(
            "need w > 2, got {w_p}"
        )));
    }
    let reduce = |x: &QuadNum| -> QuadNum {
        let mut y = x.clone();
        while y.is_negative() {
            y = &y + w_p;
        }
        while !(&y - w_p).is_negative() {
            y = &y - w_p;
        }
        y
    };
    // Bottom windows, ending at cx: s4 = [cx−w, cx−w+1] (from C₁),
    // s2-self = [cx−w+1, cx−1], s5 = [cx−1, cx].
    let b4 = reduce(&(cx - w_p));
    let b2 = reduce(&(&(cx - w_p) + &one));
    let b5 = reduce(&(cx - &one));
    let spec = CylinderComplexSpec {
        d_param: d,
        rows: vec![
            (w_p.clone(), w_p.clone()),
            (one.clone(), one.clone()),
            (one.clone(), one.clone()),
        ],
        tops: vec![
            vec![
                (one.clone(), 1usize, q(d, 0)),      // s1 → C₁.bottom
                (w_p - &two, 0usize, b2.clone()),    // s2 → P.bottom (self)
                (one.clone(), 2usize, q(d, 0)),      // s3 → C₂.bottom
            ],
            vec![(one.clone(), 0usize, b4.clone())], // s4: C₁.top → P.bottom
            vec![(one.clone(), 0usize, b5.clone())], // s5: C₂.top → P.bottom
        ],
        centers: vec![
            V2::new(cx.clone(), w_p.clone()),
            V2::new(one.clone(), &(w_p + w_p) + &two),
            V2::new(one.clone(), &(w_p + w_p) + &two),
        ],
        marked: Vec::new(),
    };
    let bare = build_cylinder_complex(&spec)?;
    // Marked points: P-core pair and the fixed point of the self window.
    let half = ratio(1, 2);
    let core_y = w_p.scale(&half);
    let xa = reduce(&cx.scale(&half));
    let xb = reduce(&(cx + w_p).scale(&half));
    let (x1, x2) = if xa < xb { (xa, xb) } else { (xb, xa) };
    let w3x = (&one + &(w_p - &one)).scale(&half) + q(d, 0); // (w)/2 … see below
    // Fixed point on the self saddle connection: 2t ≡ cx + w − 1 − b2 …
    // solve 2t = 1 + (w − 1) = w on the top side: t = w/2 lies in [1, w−1].
    let _ = w3x;
    let t3 = w_p.scale(&half);
    let marked = vec![
        (
            PrymLabel::W1,
            PointOnSurface {
                poly: 0,
                pos: V2::new(x1, core_y.clone()),
            },
        ),
        (
            PrymLabel::W2,
            PointOnSurface {
                poly: 0,
                pos: V2::new(x2, core_y),
            },
        ),
        (
            PrymLabel::W3,
            PointOnSurface {
                poly: 0,
                pos: V2::new(t3, w_p.clone()),
            },
        ),
    ];
    TranslationSurface::new(
        d,
        bare.polygons().to_vec(),
        bare.gluings().to_vec(),
        marked,
        bare.involution_centers().to_vec(),
    )
}

/// Description of a square-tiled surface as rows of unit squares.
///
/// Row r is the polygon [0, w_r] × [r, r + 1] with break vertices at every
/// integer x. `up[r][c]` names the square whose bottom edge receives the top
/// edge of square (r, c). Row seams close each row into a horizontal
/// cylinder.
#[derive(Debug, Clone)]
pub struct OrigamiSpec {
    pub d_param: u64,
    pub row_widths: Vec<i64>,
    pub up: Vec<Vec<(usize, i64)>>,
    /// Involution center per row polygon.
    pub centers: Vec<(Rat, Rat)>,
}

pub(crate) fn build_origami(
    spec: &OrigamiSpec,
    marked: Vec<(PrymLabel, PointOnSurface)>,
) -> Result<TranslationSurface, SurfaceError> {
    let d = spec.d_param;
    let mut polygons = Vec::new();
    for (r, &w) in spec.row_widths.iter().enumerate() {
        let y0 = q(d, r as i64);
        let y1 = q(d, r as i64 + 1);
        let mut verts = Vec::new();
        for x in 0..w {
            verts.push(v(q(d, x), y0.clone()));
        }
        verts.push(v(q(d, w), y0.clone()));
        verts.push(v(q(d, w), y1.clone()));
        for x in (1..w).rev() {
            verts.push(v(q(d, x), y1.clone()));
        }
        verts.push(v(q(d, 0), y1.clone()));
        polygons.push(Polygon { vertices: verts });
    }
    // Row r, width w: bottom unit c is edge c; right edge is w; top unit c
    // is edge w + 1 + (w − 1 − c); left edge is 2w + 1.
    let top_edge = |w: i64, c: i64| (w + 1 + (w - 1 - c)) as usize;
    let mut gluings = Vec::new();
    for r in 0..spec.row_widths.len() {
        let w = spec.row_widths[r];
        gluings.push((
            EdgeRef {
                poly: r,
                edge: (2 * w + 1) as usize,
            },
            EdgeRef {
                poly: r,
                edge: w as usize,
            },
        ));
        for c in 0..w {
            let (r2, c2) = spec.up[r][c as usize];
            gluings.push((
                EdgeRef {
                    poly: r,
                    edge: top_edge(w, c),
                },
                EdgeRef {
                    poly: r2,
                    edge: c2 as usize,
                },
            ));
        }
    }
    let centers = spec
        .centers
        .iter()
        .map(|(x, y)| v(qr(d, x.clone()), qr(d, y.clone())))
        .collect();
    TranslationSurface::new(d, polygons, gluings, marked, centers)
}

/// Build an origami and label its regular involution fixed points
/// deterministically (sorted canonical order ↦ w1, w2, w3).
pub fn build_origami_autolabel(
    spec: &OrigamiSpec,
) -> Result<TranslationSurface, SurfaceError> {
    let bare = build_origami(spec, Vec::new())?;
    let (_, mut regular) = bare.involution_fixed_points()?;
    if regular.len() != 3 {
        return Err(SurfaceError::WrongFixedPointCount(regular.len()));
    }
    regular.sort_by(|p, q| (p.poly, &p.pos.x, &p.pos.y).cmp(&(q.poly, &q.pos.x, &q.pos.y)));
    let marked = vec![
        (PrymLabel::W1, regular[0].clone()),
        (PrymLabel::W2, regular[1].clone()),
        (PrymLabel::W3, regular[2].clone()),
    ];
    build_origami(spec, marked)
}

/// Model D: one-cylinder square-tiled surfaces with n = d unit squares.
///
/// Odd d = 2k+1: one row, tops glued by the column permutation
/// (0 … k−1)(k+1 … 2k) with the central column straight; its commutator with
/// the row cycle is a five-cycle, and the reversal involution has regular
/// fixed points of torus type {h, v, c} (HLK (0, [1,1,1])).
///
/// Even d = 2k: one row, tops glued by the shift c ↦ c + k with the values
/// of columns 0 and 1 swapped; the reversal involution fixes one integer
/// vertex and two half-integer edge midpoints (HLK count pattern (1, [2])).
fn build_model_d(d: i64) -> Result<TranslationSurface, SurfaceError> {
    if d <= 4 {
        return Err(SurfaceError::InadmissibleSpec(format!(
            "model D needs d > 4, got {d}"
        )));
    }
    let d_param = (d * d) as u64;
    let sigma: Vec<i64> = if d % 2 == 1 {
        let k = (d - 1) / 2;
        (0..d)
            .map(|c| {
                if c < k {
                    (c + 1) % k
                } else if c == k {
                    k
                } else {
                    k + 1 + (c - k) % k
                }
            })
            .collect()
    } else {
        // Identity except two adjacent swaps on the last four columns;
        // frozen from the derivation search (columns 0-based).
        let mut s: Vec<i64> = (0..d).collect();
        s.swap((d - 4) as usize, (d - 3) as usize);
        s.swap((d - 2) as usize, (d - 1) as usize);
        s
    };
    let center = if d % 2 == 1 {
        (rat(d), rat(1))
    } else {
        (rat(d - 4), rat(1))
    };
    let spec = OrigamiSpec {
        d_param,
        row_widths: vec![d],
        up: vec![sigma.iter().map(|&t| (0usize, t)).collect()],
        centers: vec![center],
    };
    build_origami_autolabel(&spec)
}

/// Model C: two-cylinder square-tiled surfaces (two isometric horizontal
/// cylinders exchanged by the involution).
///
/// Odd d: two rows of d squares (n = 2d), bottom tops straight up, top tops
/// returning with shift k+1 and one swapped adjacent pair; HLK (3, [0,0,0]).
/// Even d: two rows of d/2 squares (n = d); HLK count pattern (1, [2]).
/// Both patterns are frozen from the derivation search in `verify`.
fn build_model_c(d: i64) -> Result<TranslationSurface, SurfaceError> {
    if d <= 4 {
        return Err(SurfaceError::InadmissibleSpec(format!(
            "model C needs d > 4, got {d}"
        )));
    }
    let (w, f, g, center_x): (i64, Vec<i64>, Vec<i64>, Rat) = if d % 2 == 1 {
        // Derivation-frozen family: f = id, g = shift by (d+1)/2 with the
        // values of columns 0 and 1 swapped.
        let k = (d + 1) / 2;
        let f: Vec<i64> = (0..d).collect();
        let mut g: Vec<i64> = (0..d).map(|c| (c + k) % d).collect();
        g.swap(0, 1);
        (d, f, g, rat(k + 1))
    } else {
        let w = d / 2;
        let f: Vec<i64> = (0..w).collect();
        let mut g: Vec<i64> = (0..w).map(|c| (c + 1) % w).collect();
        g.swap(0, 1);
        (w, f, g, rat(2))
    };
    let d_param = (d * d) as u64;
    let up = vec![
        f.iter().map(|&t| (1usize, t)).collect::<Vec<_>>(),
        g.iter().map(|&t| (0usize, t)).collect::<Vec<_>>(),
    ];
    let spec = OrigamiSpec {
        d_param,
        row_widths: vec![w, w],
        up,
        centers: vec![(center_x.clone(), rat(2)), (center_x, rat(2))],
    };
    build_origami_autolabel(&spec)
}
