//! Seeded random distributions for tests, benchmarks and the CLI.

use rand::Rng;

use crate::error::Result;
use crate::num::Rational;
use crate::scenario::{deterministic_distribution, enumerate_strategies, CausalModel, Distribution, ScenarioSpec, Variant};

fn random_weights<R: Rng>(rng: &mut R, n: usize) -> Vec<Rational> {
    let raw: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=20)).collect();
    let total: i64 = raw.iter().sum();
    raw.into_iter().map(|w| Rational::new(w, total)).collect()
}

fn mixture(sc: &ScenarioSpec, parts: &[Distribution<Rational>], w: &[Rational]) -> Result<Distribution<Rational>> {
    let mut e = vec![Rational::from_integer(0); sc.len()];
    for (d, wi) in parts.iter().zip(w) {
        for (t, v) in e.iter_mut().zip(d.entries()) {
            *t = &*t + &(wi * v);
        }
    }
    Distribution::new(sc.clone(), e)
}

/// Exact convex mixture of `k` random deterministic local strategies.
pub fn random_local<R: Rng>(sc: &ScenarioSpec, k: usize, rng: &mut R) -> Result<Distribution<Rational>> {
    let space = enumerate_strategies(&CausalModel::new(Variant::Lhv, sc.clone())?)?;
    let parts: Vec<_> = (0..k.max(1))
        .map(|_| deterministic_distribution(&space, rng.gen_range(0..space.len())))
        .collect();
    let w = random_weights(rng, parts.len());
    mixture(sc, &parts, &w)
}

/// PR box with `a ⊕ b = xy ⊕ αx ⊕ βy ⊕ γ`.
pub fn pr_box(alpha: usize, beta: usize, gamma: usize) -> Distribution<Rational> {
    let sc = ScenarioSpec::chsh();
    let mut e = vec![Rational::from_integer(0); 16];
    for x in 0..2 {
        for y in 0..2 {
            let parity = (x * y + alpha * x + beta * y + gamma) % 2;
            for a in 0..2 {
                e[sc.index_unchecked(&[a, a ^ parity], &[x, y])] = Rational::new(1, 2);
            }
        }
    }
    Distribution::new(sc, e).expect("normalized")
}

/// Exact mixture of up to four random vertices of the CHSH nonsignalling
/// polytope (16 deterministic points and 8 PR boxes).
pub fn random_nonsignalling_chsh<R: Rng>(rng: &mut R) -> Result<Distribution<Rational>> {
    let sc = ScenarioSpec::chsh();
    let space = enumerate_strategies(&CausalModel::new(Variant::Lhv, sc.clone())?)?;
    let k = rng.gen_range(1..=4);
    let parts: Vec<_> = (0..k)
        .map(|_| {
            let v = rng.gen_range(0..space.len() + 8);
            if v < space.len() {
                deterministic_distribution(&space, v)
            } else {
                let t = v - space.len();
                pr_box(t & 1, (t >> 1) & 1, (t >> 2) & 1)
            }
        })
        .collect();
    let w = random_weights(rng, k);
    mixture(&sc, &parts, &w)
}

/// Exact distribution of a random two-source model together with the true
/// marginal of Alice's strategies, indexed as `Σ_x α_x o_a^{m_x-1-x}`.
pub fn random_bilocal<R: Rng>(sc: &ScenarioSpec, rng: &mut R) -> Result<(Distribution<Rational>, Vec<Rational>)> {
    CausalModel::new(Variant::Bilocal, sc.clone())?;
    let (mx, mz) = (sc.inputs[0], sc.inputs[2]);
    let (oa, ob, oc) = (sc.outputs[0], sc.outputs[1], sc.outputs[2]);
    let na = oa.pow(mx as u32);
    let nc = oc.pow(mz as u32);
    let (kl, km) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
    let alpha: Vec<usize> = (0..kl).map(|_| rng.gen_range(0..na)).collect();
    let gamma: Vec<usize> = (0..km).map(|_| rng.gen_range(0..nc)).collect();
    let btab: Vec<Vec<usize>> = (0..kl).map(|_| (0..km).map(|_| rng.gen_range(0..ob)).collect()).collect();
    let wl = random_weights(rng, kl);
    let wm = random_weights(rng, km);
    let digit = |i: usize, base: usize, len: usize, k: usize| (i / base.pow((len - 1 - k) as u32)) % base;
    let mut e = vec![Rational::from_integer(0); sc.len()];
    for x in 0..mx {
        for z in 0..mz {
            for l in 0..kl {
                for m in 0..km {
                    let out = [digit(alpha[l], oa, mx, x), btab[l][m], digit(gamma[m], oc, mz, z)];
                    let j = sc.index_unchecked(&out, &[x, 0, z]);
                    e[j] = &e[j] + &(&wl[l] * &wm[m]);
                }
            }
        }
    }
    let mut qa = vec![Rational::from_integer(0); na];
    for (l, &a) in alpha.iter().enumerate() {
        qa[a] = &qa[a] + &wl[l];
    }
    Ok((Distribution::new(sc.clone(), e)?, qa))
}
