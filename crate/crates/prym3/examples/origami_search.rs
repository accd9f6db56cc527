// Temporary derivation search for the square-tiled one- and two-cylinder
// families (deleted after freezing results).
//
// Permutation-level prefilters: squares are 0..n−1, σ_r cycles each row,
// σ_u is the vertical neighbor map. The surface lies in H(4) iff the
// commutator [σ_r, σ_u] is a 5-cycle (fixing everything else), and the
//(−Id)-involution exists iff some square bijection τ conjugates both σ_r
// and σ_u to their inverses. Survivors get the full geometric check.
use prym3::cylinders::{cylinder_decomposition, Direction};
use prym3::invariants::hlk_invariant;
use prym3::qfield::{QuadNum, Rat};
use prym3::surface::{build_origami_autolabel, validate_surface, OrigamiSpec};

fn rat(n: i64, d: i64) -> Rat {
    Rat::new(n.into(), d.into())
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = Vec::new();
    fn rec(n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>)
    {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for x in 0..n {
            if !cur.contains(&x) {
                cur.push(x);
                rec(n, cur, out);
                cur.pop();
            }
        }
    }
    rec(n, &mut cur, &mut out);
    out
}

fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
    b.iter().map(|&i| a[i]).collect()
}

fn inverse(a: &[usize]) -> Vec<usize> {
    let mut out = vec![0; a.len()];
    for (i, &j) in a.iter().enumerate() {
        out[j] = i;
    }
    out
}

fn cycle_type(a: &[usize]) -> Vec<usize> {
    let n = a.len();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        let mut len = 0;
        let mut i = s;
        while !seen[i] {
            seen[i] = true;
            len += 1;
            i = a[i];
        }
        out.push(len);
    }
    out.sort_unstable_by(|x, y| y.cmp(x));
    out
}

/// H(4) test: commutator is one 5-cycle plus fixed points.
fn is_h4(sr: &[usize], su: &[usize]) -> bool {
    let c = compose(
        &compose(sr, su),
        &compose(&inverse(sr), &inverse(su)),
    );
    let mut t = cycle_type(&c);
    t.retain(|&l| l != 1);
    t == vec![5]
}

/// Involution test: some τ with τσ_rτ = σ_r⁻¹ and τσ_uτ = σ_u⁻¹,
/// τ² = id. τ candidates: per-row reversals x ↦ c − x (possibly swapping
/// the two rows for the two-row case).
fn has_involution(
    rows: &[(usize, usize)], // (start, width)
    swap_rows: bool,
    sr: &[usize],
    su: &[usize],
) -> Vec<Vec<usize>> {
    let n = sr.len();
    let mut taus = Vec::new();
    let widths: Vec<usize> = rows.iter().map(|r| r.1).collect();
    if swap_rows && (rows.len() != 2 || widths[0] != widths[1]) {
        return taus;
    }
    let w = widths[0];
    for c in 0..w {
        let mut tau = vec![0usize; n];
        for (ri, &(start, width)) in rows.iter().enumerate() {
            for x in 0..width {
                let target_row = if swap_rows { 1 - ri } else { ri };
                let (tstart, twidth) = rows[target_row];
                let tx = (c + twidth - x % twidth) % twidth;
                tau[start + x] = tstart + tx;
            }
        }
        let ok = compose(&tau, &tau).iter().enumerate().all(|(i, &j)| i == j)
            && compose(&compose(&tau, sr), &tau) == inverse(sr)
            && compose(&compose(&tau, su), &tau) == inverse(su);
        if ok {
            taus.push(tau);
        }
    }
    taus
}

fn try_geometry(
    spec: &OrigamiSpec,
    want_hlk: (usize, Vec<usize>),
    want_horizontal: usize,
) -> Option<String> {
    let s = build_origami_autolabel(spec).ok()?;
    let v = validate_surface(&s);
    if !v.passed() {
        return None;
    }
    let h = hlk_invariant(&s).ok()?;
    if h.orbit_pattern() != want_hlk {
        return None;
    }
    let du = s.d_param();
    let dech = cylinder_decomposition(&s, &Direction::horizontal(du), 3000).ok()?;
    if dech.cylinders.len() != want_horizontal {
        return None;
    }
    let decv = cylinder_decomposition(&s, &Direction::vertical(du), 3000).ok()?;
    if decv.cylinders.len() != 3 {
        return None;
    }
    let mut ms: Vec<QuadNum> = decv.cylinders.iter().map(|c| c.modulus.clone()).collect();
    ms.sort();
    if !(ms[0] == ms[1] || ms[1] == ms[2]) {
        return None;
    }
    Some(format!("HLK {h}"))
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let mode = args.get(1).map(|s| s.as_str()).unwrap_or("all");

    if mode == "d-even" || mode == "all" {
        for d in [6usize, 8, 10] {
            println!("== model D search, d = {d}");
            let rows = [(0usize, d)];
            let sr: Vec<usize> = (0..d).map(|i| (i + 1) % d).collect();
            let mut shown = 0;
            for sigma in permutations(d) {
                if !is_h4(&sr, &sigma) {
                    continue;
                }
                if has_involution(&rows, false, &sr, &sigma).is_empty() {
                    continue;
                }
                // Geometry with every half-integer center.
                for cx2 in 0..(4 * d as i64) {
                    let spec = OrigamiSpec {
                        d_param: (d * d) as u64,
                        row_widths: vec![d as i64],
                        up: vec![sigma.iter().map(|&t| (0usize, t as i64)).collect()],
                        centers: vec![(rat(cx2, 2), rat(1, 1))],
                    };
                    if let Some(msg) = try_geometry(&spec, (1, vec![2, 0, 0]), 1) {
                        println!("  σ = {sigma:?} cx = {cx2}/2: {msg}");
                        shown += 1;
                        break;
                    }
                }
                if shown >= 4 {
                    break;
                }
            }
            println!("  ({shown} shown)");
        }
    }

    if mode == "c" || mode == "all" {
        for d in [5usize, 6, 7, 8, 9, 10] {
            let w = if d % 2 == 1 { d } else { d / 2 };
            let want = if d % 2 == 1 {
                (3usize, vec![0usize, 0, 0])
            } else {
                (1usize, vec![2, 0, 0])
            };
            println!("== model C search, d = {d} (rows of {w})");
            let rows = [(0usize, w), (w, w)];
            // σ_r: two w-cycles.
            let mut sr: Vec<usize> = Vec::new();
            for r in 0..2 {
                for x in 0..w {
                    sr.push(r * w + (x + 1) % w);
                }
            }
            let mut shown = 0;
            'outer: for f in permutations(w) {
                for g in permutations(w) {
                    let mut su = vec![0usize; 2 * w];
                    for x in 0..w {
                        su[x] = w + f[x];
                        su[w + x] = g[x];
                    }
                    if !is_h4(&sr, &su) {
                        continue;
                    }
                    if has_involution(&rows, true, &sr, &su).is_empty() {
                        continue;
                    }
                    for cx2 in 0..(4 * w as i64) {
                        let spec = OrigamiSpec {
                            d_param: (d * d) as u64,
                            row_widths: vec![w as i64, w as i64],
                            up: vec![
                                f.iter().map(|&t| (1usize, t as i64)).collect(),
                                g.iter().map(|&t| (0usize, t as i64)).collect(),
                            ],
                            centers: vec![
                                (rat(cx2, 2), rat(2, 1)),
                                (rat(cx2, 2), rat(2, 1)),
                            ],
                        };
                        if let Some(msg) = try_geometry(&spec, want.clone(), 2) {
                            println!("  f = {f:?} g = {g:?} cx = {cx2}/2: {msg}");
                            shown += 1;
                            if shown >= 6 {
                                break 'outer;
                            }
                            break;
                        }
                    }
                }
            }
            println!("  ({shown} shown)");
        }
    }
}
