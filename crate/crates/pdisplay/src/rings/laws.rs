//! Universal addition/multiplication/negation laws for p-typical Witt
//! vectors, materialized as integer polynomials by ghost recursion over Z.
//!
//! These polynomials are the exactly-testable kernel for Witt arithmetic:
//! `w_n(S) = w_n(X) + w_n(Y)` and `w_n(P) = w_n(X) * w_n(Y)` pin them down,
//! and the recursion divides by p^n exactly (Witt integrality). Term counts
//! explode with p and the precision, so production arithmetic goes through
//! ghost lifts instead and is cross-checked against this cache where the
//! cache is feasible to build.

use super::{BaseRing, RingElement};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

/// Sparse integer polynomial in variables X_0..X_{m-1}, Y_0..Y_{m-1}
/// (exponent vectors of length 2m; the Y block is unused for negation laws).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, BigInt>,
}

impl IntPoly {
    pub fn zero(nvars: usize) -> Self {
        IntPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn var(nvars: usize, idx: usize) -> Self {
        let mut e = vec![0u32; nvars];
        e[idx] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(e, BigInt::from(1));
        IntPoly { nvars, terms }
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    fn insert(&mut self, exp: Vec<u32>, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exp).or_insert_with(BigInt::zero);
        *entry += c;
        if entry.is_zero() {
            // avoid borrow issues: recompute key removal lazily
        }
    }

    fn normalize(&mut self) {
        self.terms.retain(|_, c| !c.is_zero());
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.insert(e.clone(), c.clone());
        }
        out.normalize();
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.insert(e.clone(), -c.clone());
        }
        out.normalize();
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -c.clone();
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = IntPoly::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.insert(e, ca * cb);
            }
        }
        out.normalize();
        out
    }

    pub fn mul_int(&self, n: &BigInt) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c *= n;
        }
        out.normalize();
        out
    }

    pub fn pow(&self, e: u64) -> Self {
        let mut acc = {
            let mut t = BTreeMap::new();
            t.insert(vec![0u32; self.nvars], BigInt::from(1));
            IntPoly {
                nvars: self.nvars,
                terms: t,
            }
        };
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Exact division by the integer d; errors on any remainder.
    pub fn exact_div_int(&self, d: &BigInt) -> Result<Self> {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            if (&*c % d).is_zero() {
                *c = &*c / d;
            } else {
                return Err(Error::Invalid(format!(
                    "ghost recursion: division by {d} leaves a remainder"
                )));
            }
        }
        Ok(out)
    }

    /// Evaluate at ring elements (X block then Y block).
    pub fn eval(&self, ring: &Arc<BaseRing>, args: &[RingElement]) -> RingElement {
        assert!(args.len() >= self.nvars);
        let modulus = BigInt::from(ring.modulus());
        let mut acc = ring.zero();
        for (e, c) in &self.terms {
            let mut coeff = c % &modulus;
            if coeff.is_negative() {
                coeff += &modulus;
            }
            let mut term = ring.from_int(coeff.to_i64().unwrap_or_else(|| {
                // modulus fits u64, so this cannot fail for reduced residues
                unreachable!("reduced coefficient exceeds i64")
            }));
            for (i, &exp) in e.iter().enumerate() {
                if exp > 0 {
                    term = term.mul(&args[i].pow(exp as u64));
                }
            }
            acc = acc.add(&term);
        }
        acc
    }

    /// Human-readable rendering with the given variable namer.
    pub fn render(&self, namer: impl Fn(usize) -> String) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (e, c) in self.terms.iter().rev() {
            let mut t = String::new();
            if c != &BigInt::from(1) || e.iter().all(|&x| x == 0) {
                t.push_str(&c.to_string());
            }
            for (i, &exp) in e.iter().enumerate() {
                if exp == 0 {
                    continue;
                }
                if !t.is_empty() && !t.ends_with('-') {
                    t.push('*');
                }
                t.push_str(&namer(i));
                if exp > 1 {
                    t.push_str(&format!("^{exp}"));
                }
            }
            parts.push(t);
        }
        parts.join(" + ").replace("+ -", "- ")
    }
}

/// The materialized Witt laws at a given prime and precision.
#[derive(Debug)]
pub struct WittLawCache {
    pub p: u64,
    pub m: usize,
    /// S_0..S_{m-1}: w_n(S) = w_n(X) + w_n(Y).
    pub add: Vec<IntPoly>,
    /// P_0..P_{m-1}: w_n(P) = w_n(X) * w_n(Y).
    pub mul: Vec<IntPoly>,
    /// N_0..N_{m-1}: w_n(N) = -w_n(X).
    pub neg: Vec<IntPoly>,
}

const TERM_BUDGET: usize = 2_000_000;

/// Ghost polynomial w_n in the X block (offset 0) or Y block (offset m).
fn ghost_poly(nvars: usize, offset: usize, n: usize, p: u64) -> IntPoly {
    let mut acc = IntPoly::zero(nvars);
    let mut pi = BigInt::from(1);
    for i in 0..=n {
        let power = p.pow((n - i) as u32) as u64;
        let t = IntPoly::var(nvars, offset + i).pow(power).mul_int(&pi);
        acc = acc.add(&t);
        pi *= p;
    }
    acc
}

/// Compute the law cache by ghost recursion over the integers.
///
/// Errors if an exact division by p^n fails (an implementation bug by Witt
/// integrality) or if the polynomials exceed the desk-scale term budget.
pub fn witt_polynomials(p: u64, m: usize) -> Result<Arc<WittLawCache>> {
    if !super::is_prime(p) || m == 0 {
        return Error::invalid("witt_polynomials requires a prime p and m >= 1");
    }
    {
        let cache = global_cache().read().unwrap();
        if let Some(c) = cache.get(&(p, m)) {
            return Ok(c.clone());
        }
    }
    let nvars = 2 * m;
    let mut add: Vec<IntPoly> = Vec::with_capacity(m);
    let mut mul: Vec<IntPoly> = Vec::with_capacity(m);
    let mut neg: Vec<IntPoly> = Vec::with_capacity(m);
    for n in 0..m {
        let wx = ghost_poly(nvars, 0, n, p);
        let wy = ghost_poly(nvars, m, n, p);
        let pn = BigInt::from(p).pow(n as u32);

        let mut s_target = wx.add(&wy);
        let mut p_target = wx.mul(&wy);
        let mut n_target = wx.neg();
        let mut pi = BigInt::from(1);
        for i in 0..n {
            let e = p.pow((n - i) as u32) as u64;
            s_target = s_target.sub(&add[i].pow(e).mul_int(&pi));
            p_target = p_target.sub(&mul[i].pow(e).mul_int(&pi));
            n_target = n_target.sub(&neg[i].pow(e).mul_int(&pi));
            pi *= p;
        }
        let sn = s_target.exact_div_int(&pn)?;
        let pn_poly = p_target.exact_div_int(&pn)?;
        let nn = n_target.exact_div_int(&pn)?;
        if sn.term_count() + pn_poly.term_count() > TERM_BUDGET {
            return Error::invalid(format!(
                "law cache for p={p}, m={m} exceeds the term budget; \
                 use ghost-lift arithmetic at this precision"
            ));
        }
        add.push(sn);
        mul.push(pn_poly);
        neg.push(nn);
    }
    let out = Arc::new(WittLawCache { p, m, add, mul, neg });
    global_cache().write().unwrap().insert((p, m), out.clone());
    Ok(out)
}

fn global_cache() -> &'static RwLock<HashMap<(u64, usize), Arc<WittLawCache>>> {
    static CACHE: std::sync::OnceLock<RwLock<HashMap<(u64, usize), Arc<WittLawCache>>>> =
        std::sync::OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

impl WittLawCache {
    fn eval_family(
        &self,
        polys: &[IntPoly],
        x: &[RingElement],
        y: Option<&[RingElement]>,
    ) -> Result<Vec<RingElement>> {
        if x.len() > self.m {
            return Error::invalid("law cache precision too small");
        }
        let ring = x[0].ring_arc().clone();
        if ring.prime() != self.p {
            return Error::invalid("law cache prime mismatch");
        }
        let mut args: Vec<RingElement> = Vec::with_capacity(2 * self.m);
        args.extend(x.iter().cloned());
        args.resize(self.m, ring.zero());
        if let Some(y) = y {
            args.extend(y.iter().cloned());
        }
        args.resize(2 * self.m, ring.zero());
        Ok(polys[..x.len()].iter().map(|p| p.eval(&ring, &args)).collect())
    }

    pub fn eval_add(&self, x: &[RingElement], y: &[RingElement]) -> Result<Vec<RingElement>> {
        self.eval_family(&self.add, x, Some(y))
    }

    pub fn eval_mul(&self, x: &[RingElement], y: &[RingElement]) -> Result<Vec<RingElement>> {
        self.eval_family(&self.mul, x, Some(y))
    }

    pub fn eval_neg(&self, x: &[RingElement]) -> Result<Vec<RingElement>> {
        self.eval_family(&self.neg, x, None)
    }

    /// Render S_n / P_n / N_n in X0..,Y0.. naming.
    pub fn render(&self, family: &str, n: usize) -> String {
        let poly = match family {
            "add" => &self.add[n],
            "mul" => &self.mul[n],
            _ => &self.neg[n],
        };
        let m = self.m;
        poly.render(|i| {
            if i < m {
                format!("X{}", i)
            } else {
                format!("Y{}", i - m)
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly_from_terms(nvars: usize, terms: &[(&[u32], i64)]) -> IntPoly {
        let mut p = IntPoly::zero(nvars);
        for (e, c) in terms {
            p.insert(e.to_vec(), BigInt::from(*c));
        }
        p.normalize();
        p
    }

    #[test]
    fn frozen_low_degree_laws() {
        // p = 2: P_0 = X0*Y0, S_1 = X1 + Y1 - X0*Y0
        let c2 = witt_polynomials(2, 2).unwrap();
        assert_eq!(
            c2.mul[0],
            poly_from_terms(4, &[(&[1, 0, 1, 0], 1)])
        );
        assert_eq!(
            c2.add[1],
            poly_from_terms(4, &[(&[0, 1, 0, 0], 1), (&[0, 0, 0, 1], 1), (&[1, 0, 1, 0], -1)])
        );
        // p = 3: S_1 = X1 + Y1 - X0^2*Y0 - X0*Y0^2
        let c3 = witt_polynomials(3, 2).unwrap();
        assert_eq!(
            c3.add[1],
            poly_from_terms(
                4,
                &[
                    (&[0, 1, 0, 0], 1),
                    (&[0, 0, 0, 1], 1),
                    (&[2, 0, 1, 0], -1),
                    (&[1, 0, 2, 0], -1)
                ]
            )
        );
    }

    #[test]
    fn ghost_identity_of_laws() {
        // w_n(S(X,Y)) == w_n(X) + w_n(Y) as polynomials, for p = 2, 3
        for p in [2u64, 3] {
            let m = 3;
            let c = witt_polynomials(p, m).unwrap();
            for n in 0..m {
                let nvars = 2 * m;
                // w_n(S): substitute S_i for the i-th X variable of ghost_poly
                let mut acc = IntPoly::zero(nvars);
                let mut pi = BigInt::from(1);
                for i in 0..=n {
                    let e = p.pow((n - i) as u32) as u64;
                    acc = acc.add(&c.add[i].pow(e).mul_int(&pi));
                    pi *= p;
                }
                let expect = ghost_poly(nvars, 0, n, p).add(&ghost_poly(nvars, m, n, p));
                assert_eq!(acc, expect, "p={p} n={n}");
            }
        }
    }
}
