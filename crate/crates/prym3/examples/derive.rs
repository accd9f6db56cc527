// Temporary derivation search (deleted after freezing results): scan the
// discriminant-8 three-cylinder family over the big-square width w and the
// twist cx, looking for a valid H(4) Prym surface whose vertical direction
// is parabolic and whose twists generate the full symmetric group.
use num_integer::Integer;
use prym3::cylinders::{cylinder_decomposition, moduli_ratios, Direction, PointLocation};
use prym3::qfield::{QuadNum, Rat};
use prym3::surface::{build_b8_family, build_b8_tower, validate_surface};
use prym3::twists::{multitwist, twist_permutation};

const D8: u64 = 8;

fn q(p: i64, pd: i64, s: i64, sd: i64) -> QuadNum {
    QuadNum::new(
        D8,
        Rat::new(p.into(), pd.into()),
        Rat::new(s.into(), (2 * sd).into()),
    )
}

fn main() {
    let mut widths = Vec::new();
    for m in 1..=10i64 {
        widths.push((format!("{m}+√2"), q(m, 1, 1, 1)));
    }
    for m in 2..=6i64 {
        widths.push((format!("{m}−√2"), q(m, 1, -1, 1)));
    }
    widths.push(("4+3√2".into(), q(4, 1, 3, 1)));
    for (wname, w) in &widths {
        eprintln!("scanning w = {wname}");
        for family in [1, 2] {
        for qden in 1..=12i64 {
            for pnum in 0..qden {
                if pnum > 0 && pnum.gcd(&qden) != 1 {
                    continue;
                }
                if pnum == 0 && qden != 1 {
                    continue;
                }
                // Family 1: rotation = cx = (p/q)·w; family 2 (tower):
                // rotation = cx − 1, so cx = 1 + (p/q)·w.
                let frac = w.scale(&Rat::new(pnum.into(), qden.into()));
                let (cx, built) = if family == 1 {
                    (frac.clone(), build_b8_family(w, &frac))
                } else {
                    let c = &frac + &QuadNum::one(D8);
                    (c.clone(), build_b8_tower(w, &c))
                };
                let Ok(s) = built else {
                    continue;
                };
                let _ = cx;
                let v = validate_surface(&s);
                if !v.passed() {
                    continue;
                }
                let dh = Direction::horizontal(D8);
                let Ok(dec_h) = cylinder_decomposition(&s, &dh, 3_000) else {
                    continue;
                };
                if !dec_h
                    .cylinders
                    .iter()
                    .all(|c| c.modulus == QuadNum::one(D8))
                {
                    continue;
                }
                let Ok(ph) = twist_permutation(&s, &dec_h) else {
                    continue;
                };
                let dv = Direction::vertical(D8);
                let Ok(dec_v) = cylinder_decomposition(&s, &dv, 3_000) else {
                    continue;
                };
                if moduli_ratios(&dec_v).is_err() {
                    continue;
                }
                let Ok(pv) = twist_permutation(&s, &dec_v) else {
                    continue;
                };
                let ks = multitwist(&dec_v).map(|t| format!("{:?}", t.k)).unwrap_or_default();
                let mods: Vec<String> = dec_v
                    .cylinders
                    .iter()
                    .map(|c| format!("{:.3}", c.modulus.approx()))
                    .collect();
                let mut cores = Vec::new();
                for (l, loc) in &dec_v.locations {
                    if let PointLocation::Cylinder { on_core: true, index, .. } = loc {
                        cores.push(format!("{l}@{index}"));
                    }
                }
                // Field marker: √2-coefficient of t_v (in √8 units ×2).
                let tv = multitwist(&dec_v).map(|t| t.t.clone()).ok();
                let tvs = tv.map(|t| t.to_string()).unwrap_or_default();
                println!(
                    "F{family} w = {wname}, cx = {pnum}/{qden}·w: VALID, h {}, v: {} cyls m={mods:?} k={ks} perm {} cores={cores:?} t_v={tvs}",
                    ph.cycles(),
                    dec_v.cylinders.len(),
                    pv.cycles()
                );
            }
        }
        }
    }
}
