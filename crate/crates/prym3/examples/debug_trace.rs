// Temporary debugging aid: why does the model-C d=5 search find nothing?
use prym3::cylinders::{cylinder_decomposition, Direction};
use prym3::invariants::hlk_invariant;
use prym3::qfield::Rat;
use prym3::surface::{build_origami_autolabel, validate_surface, OrigamiSpec};

fn rat(n: i64, d: i64) -> Rat {
    Rat::new(n.into(), d.into())
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = Vec::new();
    fn rec(n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
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

fn main() {
    let w = 5usize;
    let d = 5i64;
    let mut sr: Vec<usize> = Vec::new();
    for r in 0..2 {
        for x in 0..w {
            sr.push(r * w + (x + 1) % w);
        }
    }
    let mut h4 = 0;
    let mut inv = 0;
    let mut printed = 0;
    for f in permutations(w) {
        for g in permutations(w) {
            let mut su = vec![0usize; 2 * w];
            for x in 0..w {
                su[x] = w + f[x];
                su[w + x] = g[x];
            }
            let c = compose(&compose(&sr, &su), &compose(&inverse(&sr), &inverse(&su)));
            let mut t = cycle_type(&c);
            t.retain(|&l| l != 1);
            if t != vec![5] {
                continue;
            }
            h4 += 1;
            // Involution candidates.
            let mut found_tau = false;
            for cc in 0..w {
                let mut tau = vec![0usize; 2 * w];
                for ri in 0..2 {
                    for x in 0..w {
                        let tx = (cc + w - x % w) % w;
                        tau[ri * w + x] = (1 - ri) * w + tx;
                    }
                }
                let ok = compose(&tau, &tau).iter().enumerate().all(|(i, &j)| i == j)
                    && compose(&compose(&tau, &sr), &tau) == inverse(&sr)
                    && compose(&compose(&tau, &su), &tau) == inverse(&su);
                if ok {
                    found_tau = true;
                    break;
                }
            }
            if !found_tau {
                continue;
            }
            inv += 1;
            if printed < 5 {
                printed += 1;
                println!("candidate f={f:?} g={g:?}");
                for cx2 in 0..(4 * w as i64) {
                    let spec = OrigamiSpec {
                        d_param: (d * d) as u64,
                        row_widths: vec![w as i64, w as i64],
                        up: vec![
                            f.iter().map(|&t| (1usize, t as i64)).collect(),
                            g.iter().map(|&t| (0usize, t as i64)).collect(),
                        ],
                        centers: vec![(rat(cx2, 2), rat(2, 1)), (rat(cx2, 2), rat(2, 1))],
                    };
                    match build_origami_autolabel(&spec) {
                        Ok(s) => {
                            let v = validate_surface(&s);
                            if !v.passed() {
                                if cx2 == 0 {
                                    let names: Vec<_> =
                                        v.failures().iter().map(|c| c.name.clone()).collect();
                                    println!("  cx={cx2}/2: invalid {names:?}");
                                }
                                continue;
                            }
                            let h = hlk_invariant(&s);
                            let du = s.d_param();
                            let nh = cylinder_decomposition(&s, &Direction::horizontal(du), 3000)
                                .map(|dd| dd.cylinders.len())
                                .unwrap_or(0);
                            let nv = cylinder_decomposition(&s, &Direction::vertical(du), 3000)
                                .map(|dd| dd.cylinders.len())
                                .unwrap_or(0);
                            println!(
                                "  cx={cx2}/2: VALID hlk={:?} h-cyls={nh} v-cyls={nv}",
                                h.map(|x| x.to_string())
                            );
                        }
                        Err(e) => {
                            if cx2 == 0 {
                                println!("  cx={cx2}/2: build err {e}");
                            }
                        }
                    }
                }
            }
        }
    }
    println!("h4-passing: {h4}, with involution: {inv}");
}
