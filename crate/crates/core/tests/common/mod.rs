//! Shared oracles: transcribed germ and family tables, and random reticular K-changes.
#![allow(dead_code)]

use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use reticular::jetalg::{Monomial, Poly, Role, VarSpec, Q};

/// Base multi-germs with the parameter counts of their versal unfoldings, per `n`.
/// Each entry: (components, n, parameter count per component).
pub fn versal_table() -> Vec<(Vec<&'static str>, usize, Vec<usize>)> {
    vec![
        (vec!["y^2", "y^2"], 1, vec![1, 1]),
        (vec!["y^2", "y^3"], 1, vec![1, 2]),
        (vec!["y^2", "x^2"], 1, vec![1, 2]),
        (vec!["y^2", "y^2", "y^2"], 1, vec![1, 1, 1]),
        (vec!["y^2", "y^2"], 2, vec![1, 1]),
        (vec!["y^2", "y^3"], 2, vec![1, 2]),
        (vec!["y^2", "y^4"], 2, vec![1, 3]),
        (vec!["y^3", "y^3"], 2, vec![2, 2]),
        (vec!["y^2", "x^2"], 2, vec![1, 2]),
        (vec!["y^2", "x^3"], 2, vec![1, 3]),
        (vec!["y^2", "x*y + y^3"], 2, vec![1, 3]),
        (vec!["y^2", "-x*y + y^3"], 2, vec![1, 3]),
        (vec!["x^2", "x^2"], 2, vec![2, 2]),
        (vec!["y^2", "y^2", "y^2"], 2, vec![1, 1, 1]),
        (vec!["y^2", "y^2", "y^3"], 2, vec![1, 1, 2]),
        (vec!["y^2", "y^2", "x^2"], 2, vec![1, 1, 2]),
        (vec!["y^2", "y^2", "y^2", "y^2"], 2, vec![1, 1, 1, 1]),
    ]
}

/// Germ lists by `n` and `m`, with the expected symbols (ASCII).
pub fn germ_lists() -> Vec<(usize, Vec<&'static str>, Vec<&'static str>)> {
    vec![
        (1, vec!["y^2"], vec!["A1"]),
        (1, vec!["y^3"], vec!["A2"]),
        (1, vec!["y^4"], vec!["A3"]),
        (1, vec!["x^2"], vec!["B2"]),
        (1, vec!["x^3"], vec!["B3"]),
        (1, vec!["x*y + y^3"], vec!["C3+"]),
        (1, vec!["-x*y + y^3"], vec!["C3-"]),
        (1, vec!["y^2", "y^2"], vec!["A1", "A1"]),
        (1, vec!["y^2", "y^3"], vec!["A1", "A2"]),
        (1, vec!["y^2", "x^2"], vec!["A1", "B2"]),
        (1, vec!["y^2", "y^2", "y^2"], vec!["A1", "A1", "A1"]),
        (2, vec!["y^2"], vec!["A1"]),
        (2, vec!["y^3"], vec!["A2"]),
        (2, vec!["y^4"], vec!["A3"]),
        (2, vec!["y^5"], vec!["A4"]),
        (2, vec!["y1^2 + y2^2"], vec!["A1"]),
        (2, vec!["y1^2 - y2^2"], vec!["A1"]),
        (2, vec!["x^2"], vec!["B2"]),
        (2, vec!["x^3"], vec!["B3"]),
        (2, vec!["x^4"], vec!["B4"]),
        (2, vec!["x*y + y^3"], vec!["C3+"]),
        (2, vec!["-x*y + y^3"], vec!["C3-"]),
        (2, vec!["x*y + y^4"], vec!["C4"]),
        (2, vec!["x^2 + y^3"], vec!["F4"]),
        (2, vec!["y^2", "y^2"], vec!["A1", "A1"]),
        (2, vec!["y^2", "y^3"], vec!["A1", "A2"]),
        (2, vec!["y^2", "y^4"], vec!["A1", "A3"]),
        (2, vec!["y^3", "y^3"], vec!["A2", "A2"]),
        (2, vec!["y^2", "x^2"], vec!["A1", "B2"]),
        (2, vec!["y^2", "x^3"], vec!["A1", "B3"]),
        (2, vec!["y^2", "x*y + y^3"], vec!["A1", "C3+"]),
        (2, vec!["y^2", "-x*y + y^3"], vec!["A1", "C3-"]),
        (2, vec!["x^2", "x^2"], vec!["B2", "B2"]),
        (2, vec!["y^2", "y^2", "y^2"], vec!["A1", "A1", "A1"]),
        (2, vec!["y^2", "y^2", "y^3"], vec!["A1", "A1", "A2"]),
        (2, vec!["y^2", "y^2", "x^2"], vec!["A1", "A1", "B2"]),
        (2, vec!["y^2", "y^2", "y^2", "y^2"], vec!["A1", "A1", "A1", "A1"]),
    ]
}

/// Ten tuples whose codimension exceeds `n + 2`.
pub fn over_budget() -> Vec<(usize, Vec<&'static str>)> {
    vec![
        (1, vec!["y^2", "y^4"]),
        (1, vec!["y^3", "y^3"]),
        (1, vec!["y^2", "x^3"]),
        (1, vec!["y^2", "y^2", "y^3"]),
        (1, vec!["y^2", "y^2", "y^2", "y^2"]),
        (2, vec!["y^3", "y^3", "y^2"]),
        (2, vec!["y^2", "y^5"]),
        (2, vec!["x^2", "x^3"]),
        (2, vec!["y^2", "y^2", "y^2", "y^2", "y^2"]),
        (2, vec!["y^3", "x*y + y^3"]),
    ]
}

fn rand_q(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> Q {
    let num = rng.gen_range(lo..=hi);
    let den = rng.gen_range(1..=3i64);
    Q::new(num.into(), den.into())
}

fn rand_nonzero(rng: &mut ChaCha8Rng) -> Q {
    loop {
        let c = rand_q(rng, -3, 3);
        if c != Q::from_integer(0.into()) {
            return c;
        }
    }
}

fn random_poly(rng: &mut ChaCha8Rng, spec: &Arc<VarSpec>, dmin: u32, dmax: u32, terms: usize) -> Poly {
    let mut p = Poly::zero(spec);
    let nv = spec.len();
    for _ in 0..terms {
        let d = rng.gen_range(dmin..=dmax);
        let mut e = vec![0u32; nv];
        for _ in 0..d {
            e[rng.gen_range(0..nv)] += 1;
        }
        p.add_term(Monomial(e), rand_q(rng, -3, 3));
    }
    p
}

/// `unit * (f o Phi)` truncated at `l`, with `x -> x (c + h)`, `c > 0`, and `y -> A y + b x + h.o.t.`.
pub fn random_change(f: &Poly, l: u32, rng: &mut ChaCha8Rng) -> Poly {
    let spec = f.spec().clone();
    let nv = spec.len();
    let xs = spec.indices(Role::Corner);
    let ys = spec.indices(Role::Fiber);
    let mut images: Vec<Poly> = (0..nv).map(|i| Poly::var(&spec, i)).collect();
    for &i in &xs {
        let c = Q::new(rng.gen_range(1..=4i64).into(), rng.gen_range(1..=3i64).into());
        let h = random_poly(rng, &spec, 1, 2, 2);
        images[i] = Poly::var(&spec, i).mul(&Poly::constant(&spec, c).add(&h));
    }
    // Invertible y-linear part: unit lower-triangular times a non-zero diagonal.
    let k = ys.len();
    for (a, &i) in ys.iter().enumerate() {
        let mut img = Poly::var(&spec, i).scale(&rand_nonzero(rng));
        for &j in ys.iter().take(a) {
            img = img.add(&Poly::var(&spec, j).scale(&rand_q(rng, -2, 2)));
        }
        for &j in &xs {
            img = img.add(&Poly::var(&spec, j).scale(&rand_q(rng, -2, 2)));
        }
        img = img.add(&random_poly(rng, &spec, 2, 3, 3));
        images[i] = img;
    }
    let _ = k;
    let unit = Poly::constant(&spec, rand_nonzero(rng)).add(&random_poly(rng, &spec, 1, 2, 3));
    f.compose(&images, Some(l)).mul_truncate(&unit, l)
}

/// Random element of `M^{l+1}`, truncated at `l + 3`.
pub fn random_high_order(spec: &Arc<VarSpec>, l: u32, rng: &mut ChaCha8Rng) -> Poly {
    random_poly(rng, spec, l + 1, l + 3, 4)
}
