#![allow(dead_code)]

use std::sync::Arc;

use hasse_lab::field::{AlgebraicNumber, FieldDescriptor};
use hasse_lab::forms::FormSystem;
use hasse_lab::linalg::{rat, rat_frac, Rat};
use hasse_lab::poly::KPoly;
use num_bigint::BigInt;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Q(sqrt 5) with basis {1, (1 + theta)/2}.
pub fn golden() -> Arc<FieldDescriptor> {
    let basis = vec![vec![rat(1), rat(0)], vec![rat_frac(1, 2), rat_frac(1, 2)]];
    let poly: Vec<BigInt> = [-5, 0, 1].iter().map(|&c| BigInt::from(c)).collect();
    Arc::new(FieldDescriptor::build(&poly, basis, 64).unwrap().with_class_number_one(true))
}

/// Q(2^{1/3}), one real and one complex place.
pub fn cubic() -> Arc<FieldDescriptor> {
    let poly: Vec<BigInt> = [-2, 0, 0, 1].iter().map(|&c| BigInt::from(c)).collect();
    Arc::new(FieldDescriptor::build(&poly, FieldDescriptor::power_basis(3), 64).unwrap())
}

pub fn all_fields() -> Vec<Arc<FieldDescriptor>> {
    vec![FieldDescriptor::rationals(), FieldDescriptor::gaussian(), golden(), cubic()]
}

pub fn random_int_elem(rng: &mut ChaCha8Rng, n: usize, h: i64) -> AlgebraicNumber {
    AlgebraicNumber::new((0..n).map(|_| rat(rng.gen_range(-h..=h))).collect())
}

pub fn random_rat_elem(rng: &mut ChaCha8Rng, n: usize, h: i64, den: i64) -> AlgebraicNumber {
    AlgebraicNumber::new((0..n).map(|_| rat_frac(rng.gen_range(-h..=h), rng.gen_range(1..=den))).collect())
}

/// Random exponent vector of total degree `d` in `s` variables.
pub fn random_exponents(rng: &mut ChaCha8Rng, s: usize, d: usize) -> Vec<u16> {
    let mut e = vec![0u16; s];
    for _ in 0..d {
        e[rng.gen_range(0..s)] += 1;
    }
    e
}

/// Nonzero form of degree `d` with up to `terms` monomials and integral coefficients.
pub fn random_form(rng: &mut ChaCha8Rng, field: &FieldDescriptor, s: usize, d: usize, terms: usize, h: i64) -> KPoly {
    loop {
        let mut f = KPoly::zero(s);
        for _ in 0..terms {
            let c = random_int_elem(rng, field.degree(), h);
            f.add_term(random_exponents(rng, s, d), c);
        }
        if !f.is_zero() {
            return f;
        }
    }
}

pub fn random_system(rng: &mut ChaCha8Rng, field: Arc<FieldDescriptor>, big_r: usize, s: usize, d: usize, terms: usize) -> FormSystem {
    let forms = (0..big_r).map(|_| random_form(rng, &field, s, d, terms, 2)).collect();
    FormSystem::new(field, s, d, forms).unwrap()
}

/// Random K-rational `alpha` of shape `R x r` with small denominators.
pub fn random_alpha(rng: &mut ChaCha8Rng, n: usize, big_r: usize, r: usize, den: i64) -> Vec<Vec<AlgebraicNumber>> {
    (0..big_r).map(|_| (0..r).map(|_| random_rat_elem(rng, n, den, den)).collect()).collect()
}

pub fn to_f64(q: &Rat) -> f64 {
    hasse_lab::linalg::rat_to_f64(q)
}

/// `#{x mod p^j : sum c_i x_i^d = 0 mod p^j}` by direct enumeration over Z.
pub fn brute_mod_count(coeffs: &[i64], d: u32, q: i64) -> u128 {
    let s = coeffs.len();
    let mut x = vec![0i64; s];
    let mut count = 0;
    loop {
        let v: i64 = coeffs.iter().zip(&x).map(|(c, xi)| c * xi.pow(d)).sum();
        if v.rem_euclid(q) == 0 {
            count += 1;
        }
        let Some(i) = (0..s).find(|&i| x[i] + 1 < q) else { break };
        x[i] += 1;
        x[..i].iter_mut().for_each(|v| *v = 0);
    }
    count
}

/// Hensel recursion for `x_1^2 + ... + x_s^2` at an odd prime: nonsingular zeros
/// lift `p^{s-1}`-fold, and `x = p y` reduces level `j` to level `j - 2`.
pub fn hensel_counts(p: u128, s: u32, j_max: usize) -> Vec<u128> {
    let mut n = vec![1u128, p.pow(s - 1)];
    for j in 2..=j_max {
        let nonsingular = (p.pow(s - 1) - 1) * p.pow((s - 1) * (j as u32 - 1));
        n.push(nonsingular + p.pow(s) * n[j - 2]);
    }
    n
}

pub mod props {
    //! Randomized property checks shared by the property suites and the
    //! acceptance run. Each takes a seed and reports the first violation.

    use super::*;
    use hasse_lab::counting::{exp_sum, Alpha, ExpSumRoute};
    use hasse_lab::forms::expand_system;
    use hasse_lab::ideals::{factor_prime, IdealLattice};
    use hasse_lab::local::{gamma_count, gauss_sum, gauss_sum_shifted, random_shift, RationalPoint};
    use num_complex::Complex64;
    use num_traits::Zero;
    use rand::seq::SliceRandom;

    pub type Check = std::result::Result<(), String>;

    fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
        if cond {
            Ok(())
        } else {
            Err(msg())
        }
    }

    /// Trace, norm and character identities on random elements.
    pub fn field_identities(seed: u64) -> Check {
        let mut g = rng(seed);
        let fields = all_fields();
        let k = &fields[g.gen_range(0..fields.len())];
        let n = k.degree();
        let a = random_rat_elem(&mut g, n, 9, 6);
        let b = random_rat_elem(&mut g, n, 9, 6);
        let tr = |x: &AlgebraicNumber| -> Rat {
            let m = k.mult_matrix(x);
            (0..n).map(|i| m[i][i].clone()).sum()
        };
        ensure(k.trace(&a) == tr(&a), || format!("trace of {a:?} differs from the matrix trace"))?;
        ensure(k.trace(&a.add(&b)) == k.trace(&a) + k.trace(&b), || "trace is not additive".into())?;
        let ab = k.mul(&a, &b);
        ensure(k.norm(&ab) == k.norm(&a) * k.norm(&b), || "norm is not multiplicative".into())?;
        // embedding formulas
        let emb: Vec<Complex64> = (0..n).map(|l| k.embed(&a, l)).collect();
        let (n1, n2) = (k.n1(), k.n2());
        let t_emb: f64 = emb[..n1].iter().map(|z| z.re).sum::<f64>() + 2.0 * emb[n1..n1 + n2].iter().map(|z| z.re).sum::<f64>();
        let nm_emb: f64 = emb[..n1].iter().map(|z| z.re).product::<f64>() * emb[n1..n1 + n2].iter().map(|z| z.norm_sqr()).product::<f64>();
        let t = to_f64(&k.trace(&a));
        let nm = to_f64(&k.norm(&a));
        ensure((t - t_emb).abs() <= 1e-9 * t.abs().max(1.0), || format!("trace {t} vs embeddings {t_emb}"))?;
        ensure((nm - nm_emb).abs() <= 1e-9 * nm.abs().max(1.0), || format!("norm {nm} vs embeddings {nm_emb}"))?;
        // e(a + b) = e(a) e(b), exactly on phases
        let (ca, cb, cab) = (k.char_e(&a), k.char_e(&b), k.char_e(&a.add(&b)));
        let s = &ca.phase + &cb.phase;
        let s = &s - s.floor();
        ensure(cab.phase == s, || "character phase is not additive mod 1".into())?;
        ensure((cab.value - ca.value * cb.value).norm() < 1e-12, || "character is not multiplicative".into())?;
        ensure(cab.value.norm() > 1.0 - 1e-12 && cab.value.norm() < 1.0 + 1e-12, || "character not unimodular".into())?;
        let z = random_int_elem(&mut g, n, 50);
        ensure(k.char_e(&z).phase.is_zero(), || "integral element with nonzero phase".into())?;
        if !a.is_zero() {
            let inv = k.inv(&a).map_err(|e| e.to_string())?;
            ensure(k.mul(&a, &inv) == k.one(), || "a * a^-1 != 1".into())?;
        }
        Ok(())
    }

    /// HNF is canonical: shuffling and unimodular column operations leave it unchanged.
    pub fn hnf_canonical(seed: u64) -> Check {
        let mut g = rng(seed);
        let n = g.gen_range(1..=4usize);
        let k = g.gen_range(n..=n + 3);
        let gens: Vec<Vec<i64>> = (0..k).map(|_| (0..n).map(|_| g.gen_range(-9..=9)).collect()).collect();
        let Ok(h) = IdealLattice::hnf_reduce(&gens, n) else {
            return Ok(()); // rank deficient draw
        };
        let m = h.hnf();
        for i in 0..n {
            ensure(m[i][i] > 0, || format!("nonpositive pivot in {m:?}"))?;
            for j in 0..i {
                ensure(m[i][j] == 0, || format!("not upper triangular: {m:?}"))?;
            }
            for j in i + 1..n {
                ensure((0..m[i][i]).contains(&m[i][j]), || format!("entry not reduced: {m:?}"))?;
            }
        }
        let mut shuffled = gens.clone();
        shuffled.shuffle(&mut g);
        for _ in 0..k {
            let (a, b) = (g.gen_range(0..k), g.gen_range(0..k));
            if a != b {
                let c = g.gen_range(-3..=3);
                let col = shuffled[b].clone();
                shuffled[a].iter_mut().zip(&col).for_each(|(x, y)| *x += c * y);
            }
            if g.gen_bool(0.3) {
                shuffled[a].iter_mut().for_each(|x| *x = -*x);
            }
        }
        let h2 = IdealLattice::hnf_reduce(&shuffled, n).map_err(|e| e.to_string())?;
        ensure(h2 == h, || format!("{:?} vs {:?}", h.hnf(), h2.hnf()))?;
        // every original generator lies in the lattice
        ensure(gens.iter().all(|v| h.contains_coords(v)), || "generator outside its lattice".into())
    }

    fn small_system(g: &mut ChaCha8Rng) -> (FormSystem, usize) {
        let gaussian = g.gen_bool(0.4);
        let field = if gaussian { FieldDescriptor::gaussian() } else { FieldDescriptor::rationals() };
        let d = g.gen_range(2..=3);
        let s = if gaussian { g.gen_range(1..=2) } else { g.gen_range(1..=3) };
        let big_r = if s > 1 && g.gen_bool(0.25) { 2 } else { 1 };
        let m = if !gaussian && s == 1 && g.gen_bool(0.5) { 2 } else { 1 };
        (random_system(g, field, big_r, s, d, 3), m)
    }

    /// `S(gamma)` does not depend on the residue transversal; `|S| <= q^{ms}`.
    pub fn gauss_transversal(seed: u64) -> Check {
        let mut g = rng(seed);
        let (sys, m) = small_system(&mut g);
        let ms_sys = expand_system(&sys, m).map_err(|e| e.to_string())?;
        let n = ms_sys.n();
        let gamma: Vec<Vec<AlgebraicNumber>> = (0..ms_sys.big_r())
            .map(|_| (0..ms_sys.r()).map(|_| random_rat_elem(&mut g, n, 4, 4)).collect())
            .collect();
        let pt = RationalPoint::new(&ms_sys.field, gamma).map_err(|e| e.to_string())?;
        let budget = 200_000u128;
        let base = match gauss_sum(&ms_sys, &pt, budget) {
            Ok(s) => s,
            Err(e) if e.is_budget() => return Ok(()),
            Err(e) => return Err(e.to_string()),
        };
        let bound = (pt.q_gamma as f64).powi(ms_sys.ms() as i32);
        ensure(base.value().norm() <= bound * (1.0 + 1e-12), || "trivial bound violated".into())?;
        for k in 0..20 {
            let shift = random_shift(ms_sys.ms(), n, 7, seed.wrapping_add(k));
            let s = gauss_sum_shifted(&ms_sys, &pt, Some(&shift), budget).map_err(|e| e.to_string())?;
            ensure(s.modulus == base.modulus && s.histogram == base.histogram, || format!("shift {shift:?} changed the phase histogram"))?;
        }
        Ok(())
    }

    /// `Gamma(p^{j+1}) <= Nm(p)^{ms} Gamma(p^j)` and `Gamma(p^j) >= 1`.
    pub fn gamma_monotone(seed: u64) -> Check {
        let mut g = rng(seed);
        let (sys, m) = small_system(&mut g);
        let ms_sys = expand_system(&sys, m).map_err(|e| e.to_string())?;
        let p = *[2u64, 3, 5].choose(&mut g).unwrap();
        let primes = factor_prime(p, &ms_sys.field).map_err(|e| e.to_string())?;
        let pr = primes.choose(&mut g).unwrap();
        let nm_ms = (pr.norm() as u128).pow(ms_sys.ms() as u32);
        let budget = 2_000_000u128;
        let mut prev = 1u128; // Gamma(p^0)
        for j in 1..=3 {
            let cur = match gamma_count(&ms_sys, pr, j, budget) {
                Ok(c) => c,
                Err(e) if e.is_budget() => break,
                Err(e) => return Err(e.to_string()),
            };
            ensure(cur >= 1, || "the zero residue is always a solution".into())?;
            ensure(cur <= nm_ms * prev, || format!("Gamma(p^{j}) = {cur} exceeds Nm^ms * {prev}"))?;
            prev = cur;
        }
        Ok(())
    }

    /// `|T_P(alpha)| <= T_P(0)` on random real alpha.
    pub fn expsum_triangle(seed: u64) -> Check {
        let mut g = rng(seed);
        let (sys, m) = small_system(&mut g);
        let ms_sys = expand_system(&sys, m).map_err(|e| e.to_string())?;
        let p = g.gen_range(1..=3);
        let n = ms_sys.n();
        let alpha: Vec<Vec<Vec<f64>>> =
            (0..ms_sys.big_r()).map(|_| (0..ms_sys.r()).map(|_| (0..n).map(|_| g.gen_range(-1.0..1.0)).collect()).collect()).collect();
        let budget = 300_000u128;
        let t = match exp_sum(&ms_sys, &Alpha::Real(alpha), p, ExpSumRoute::RealForm, budget) {
            Ok(t) => t,
            Err(e) if e.is_budget() => return Ok(()),
            Err(e) => return Err(e.to_string()),
        };
        let t0 = exp_sum(&ms_sys, &Alpha::zero(&ms_sys), p, ExpSumRoute::VArith, budget).map_err(|e| e.to_string())?;
        ensure((t0.value() - Complex64::new(t0.points as f64, 0.0)).norm() < 1e-9, || "T_P(0) is not the point count".into())?;
        ensure(t.value().norm() <= t0.value().norm() * (1.0 + 1e-12), || format!("|T| = {} > T(0) = {}", t.value().norm(), t0.points))
    }

    /// Expands `F(sum_k t_k x_k)` by distributing every monomial over the `m`
    /// slots and compares each `t^j` coefficient with `A(j) Phi(x_{j_1}, ..., x_{j_d})`.
    pub fn expansion_identity(seed: u64) -> Check {
        let mut g = rng(seed);
        let field = if g.gen_bool(0.5) { FieldDescriptor::gaussian() } else { FieldDescriptor::rationals() };
        let n = field.degree();
        let d = g.gen_range(2..=4);
        let m = g.gen_range(1..=3);
        let s = g.gen_range(1..=4);
        let big_r = g.gen_range(1..=2);
        let sys = random_system(&mut g, field.clone(), big_r, s, d, 4);
        let ms_sys = expand_system(&sys, m).map_err(|e| e.to_string())?;
        let xbar: Vec<AlgebraicNumber> = (0..m * s).map(|_| random_rat_elem(&mut g, n, 5, 3)).collect();
        let blocks = ms_sys.eval_blocks(&xbar);
        for (rho, f) in sys.forms.iter().enumerate() {
            let mut oracle: std::collections::BTreeMap<Vec<usize>, AlgebraicNumber> = Default::default();
            for (e, c) in &f.terms {
                let factors: Vec<usize> = e.iter().enumerate().flat_map(|(i, &k)| std::iter::repeat_n(i, k as usize)).collect();
                let mut slots = vec![0usize; d];
                loop {
                    let mut term = c.clone();
                    for (pos, &i) in factors.iter().enumerate() {
                        term = field.mul(&term, &xbar[slots[pos] * s + i]);
                    }
                    let mut texp = vec![0usize; m];
                    slots.iter().for_each(|&k| texp[k] += 1);
                    let entry = oracle.entry(texp).or_insert_with(|| field.zero());
                    *entry = entry.add(&term);
                    let Some(pos) = (0..d).find(|&p| slots[p] + 1 < m) else { break };
                    slots[pos] += 1;
                    slots[..pos].iter_mut().for_each(|x| *x = 0);
                }
            }
            ensure(ms_sys.j_set.len() == oracle.len(), || format!("{} blocks for {} t-monomials", ms_sys.j_set.len(), oracle.len()))?;
            for (idx, (j, &a)) in ms_sys.j_set.iter().zip(&ms_sys.a_coef).enumerate() {
                let mut texp = vec![0usize; m];
                j.iter().for_each(|&k| texp[k] += 1);
                let want = &oracle[&texp];
                let args: Vec<&[AlgebraicNumber]> = j.iter().map(|&k| &xbar[k * s..(k + 1) * s]).collect();
                let phi = ms_sys.phi[rho].eval(&field, &args).scale(&Rat::from_integer((a as i64).into()));
                ensure(&phi == want, || format!("rho {rho}, j {j:?}: A(j) Phi = {phi:?}, expansion gives {want:?}"))?;
                let blk = &blocks[rho * ms_sys.r() + idx];
                ensure(blk == want, || format!("rho {rho}, j {j:?}: block polynomial disagrees"))?;
            }
        }
        Ok(())
    }
}
