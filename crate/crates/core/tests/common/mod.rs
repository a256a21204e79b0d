#![allow(dead_code)]

use hypgrpd_core::Graph;

/// Rooted trees on `n` vertices as parent arrays, one per isomorphism class,
/// by successive canonical level sequences.
pub fn rooted_trees(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut l: Vec<usize> = (1..=n).collect();
    loop {
        out.push(parents_from_levels(&l));
        let Some(p) = (0..n).rev().find(|&i| l[i] > 2) else { break };
        let q = (0..p).rev().find(|&i| l[i] == l[p] - 1).expect("level sequence");
        for i in p..n {
            l[i] = l[i - (p - q)];
        }
    }
    out
}

fn parents_from_levels(l: &[usize]) -> Vec<usize> {
    let mut parent = vec![0; l.len()];
    let mut last_at: Vec<usize> = vec![0; l.len() + 2];
    for (i, &lv) in l.iter().enumerate() {
        if i > 0 {
            parent[i] = last_at[lv - 1];
        }
        last_at[lv] = i;
    }
    parent
}

/// Least `δ` over all triples, straight from the definition.
pub fn brute_four_point(g: &Graph, x0: usize, radius: u32) -> f64 {
    let d = g.all_pairs().unwrap();
    let ball: Vec<usize> = (0..g.len()).filter(|&v| d.get(x0, v) <= radius).collect();
    let gp = |x: usize, y: usize| (d.get(x0, x) + d.get(x0, y)) as f64 / 2.0 - d.get(x, y) as f64 / 2.0;
    let mut best: f64 = 0.0;
    for &x in &ball {
        for &y in &ball {
            for &z in &ball {
                best = best.max(gp(x, y).min(gp(y, z)) - gp(x, z));
            }
        }
    }
    best
}

/// The successor rules of the golden example written out by hand.
pub fn tau_oracle(w: &[char]) -> Option<Vec<char>> {
    let (&h, rest) = w.split_first()?;
    let cat = |c: char, t: Vec<char>| std::iter::once(c).chain(t).collect::<Vec<_>>();
    match h {
        '1' => Some(cat('2', rest.to_vec())),
        '2' => Some(cat('3', rest.to_vec())),
        '4' => Some(cat('5', rest.to_vec())),
        '3' => {
            let lead = match rest.first()? {
                '1' => '1',
                '2' | '4' => '4',
                _ => return None,
            };
            Some(cat(lead, tau_oracle(rest)?))
        }
        '5' => Some(cat('1', tau_oracle(rest)?)),
        _ => None,
    }
}
