//! Finite p-nilpotent base rings and exact arithmetic in them.
//!
//! Every base ring is a finite free `Z/p^e`-module on a monomial basis
//! `x^a * v_1^{e_1} ... v_k^{e_k}` with `a < r`, where `x` generates an
//! unramified extension (monic `minpoly`, irreducible mod p) and the
//! variables `v_i` are cut down by a monomial ideal. The four supported
//! descriptors (finite field, truncated Witt coefficient ring, Artinian
//! monomial quotient, square-zero extension) are all instances of this one
//! internal form, which keeps multiplication a table lookup and makes the
//! p-torsion-free cover used by the Witt arithmetic (`with_char_exp`) free.

mod element;
mod hom;
mod witt;
pub mod laws;

pub use element::RingElement;
pub use hom::{coordinate_section, RingHom};
pub use witt::Witt;

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

/// Serializable descriptor for a base ring.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum RingDescriptor {
    /// Finite field `F_{p^r}` presented as `F_p[x]/(minpoly)`.
    Fq { p: u64, r: usize, minpoly: Vec<i64> },
    /// Truncated Witt coefficient ring `W_m(F_{p^r})`, presented as the
    /// Galois ring `(Z/p^m)[x]/(minpoly)`.
    Wm {
        p: u64,
        m: u32,
        r: usize,
        minpoly: Vec<i64>,
    },
    /// Artinian local quotient: polynomial variables over a field or Witt
    /// coefficient base modulo a monomial ideal, with an optional extra cap
    /// `p_power` on the characteristic exponent.
    Artinian {
        base: Box<RingDescriptor>,
        vars: Vec<String>,
        /// Monomial generators of the ideal, as exponent vectors over `vars`.
        ideal: Vec<Vec<u16>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        p_power: Option<u32>,
    },
    /// Square-zero extension `B = base ⊕ M` with `M` free of the given rank
    /// and `M·M = 0`. `pd` records that the kernel carries the trivial
    /// divided powers.
    SquareZero {
        base: Box<RingDescriptor>,
        rank: usize,
        pd: bool,
    },
}

impl RingDescriptor {
    pub fn prime(&self) -> u64 {
        match self {
            RingDescriptor::Fq { p, .. } | RingDescriptor::Wm { p, .. } => *p,
            RingDescriptor::Artinian { base, .. } | RingDescriptor::SquareZero { base, .. } => {
                base.prime()
            }
        }
    }
}

/// A monomial in the ring variables, as an exponent vector.
type VarMono = Vec<u16>;

/// A finite local p-nilpotent base ring.
///
/// Construct through [`BaseRing::from_descriptor`] or the convenience
/// constructors; elements are created through the methods here and carry an
/// `Arc` back to their ring.
pub struct BaseRing {
    pub(crate) descriptor: RingDescriptor,
    pub(crate) p: u64,
    /// Characteristic exponent: `p^char_exp = 0`.
    pub(crate) char_exp: u32,
    /// Modulus `p^char_exp`.
    pub(crate) modulus: u64,
    /// Residue extension degree r.
    pub(crate) ext_deg: usize,
    /// Monic minimal polynomial of x, coefficients for x^0..x^r.
    pub(crate) minpoly: Vec<i64>,
    pub(crate) var_names: Vec<String>,
    pub(crate) ideal: Vec<VarMono>,
    /// Index from which the variables form a square-zero block.
    pub(crate) square_zero: bool,
    pub(crate) pd_flag: bool,
    /// Canonical basis of variable monomials (exponent vectors), index 0 is 1.
    pub(crate) monos: Vec<VarMono>,
    mono_index: HashMap<VarMono, usize>,
    /// mono_mul[i][j] = Some(k) if monos[i]*monos[j] = monos[k], None if in the ideal.
    mono_mul: Vec<Vec<Option<usize>>>,
    /// Reductions of x^k for k in r..=2r-2, as coefficient rows of length r.
    xpow_red: Vec<Vec<u64>>,
}

impl fmt::Debug for BaseRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BaseRing({})", self.name())
    }
}

impl PartialEq for BaseRing {
    fn eq(&self, other: &Self) -> bool {
        self.descriptor == other.descriptor && self.char_exp == other.char_exp
    }
}
impl Eq for BaseRing {}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// Irreducibility over F_p by trial division with monic divisors of degree <= deg/2.
fn irreducible_mod_p(poly: &[i64], p: u64) -> bool {
    let deg = poly.len() - 1;
    if deg == 0 {
        return false;
    }
    let red: Vec<u64> = poly.iter().map(|&c| c.rem_euclid(p as i64) as u64).collect();
    if deg == 1 {
        return true;
    }
    // enumerate monic divisors of degree d, 1 <= d <= deg/2
    for d in 1..=deg / 2 {
        let count = p.pow(d as u32);
        for code in 0..count {
            let mut div = Vec::with_capacity(d + 1);
            let mut c = code;
            for _ in 0..d {
                div.push(c % p);
                c /= p;
            }
            div.push(1);
            if poly_rem_is_zero(&red, &div, p) {
                return false;
            }
        }
    }
    true
}

fn poly_rem_is_zero(num: &[u64], den: &[u64], p: u64) -> bool {
    let mut rem: Vec<u64> = num.to_vec();
    let dd = den.len() - 1;
    while rem.len() > dd {
        let lead = *rem.last().unwrap() % p;
        if lead != 0 {
            let shift = rem.len() - 1 - dd;
            for i in 0..=dd {
                let idx = shift + i;
                let sub = mul_mod(lead, den[i], p);
                rem[idx] = (rem[idx] + p - sub % p) % p;
            }
        }
        rem.pop();
    }
    rem.iter().all(|&c| c % p == 0)
}

impl BaseRing {
    pub fn from_descriptor(d: &RingDescriptor) -> Result<Arc<BaseRing>> {
        Self::build(d, None)
    }

    /// The finite field F_{p^r}.
    pub fn fq(p: u64, r: usize, minpoly: Vec<i64>) -> Result<Arc<BaseRing>> {
        Self::from_descriptor(&RingDescriptor::Fq { p, r, minpoly })
    }

    /// Prime field F_p.
    pub fn fp(p: u64) -> Result<Arc<BaseRing>> {
        Self::fq(p, 1, vec![0, 1])
    }

    /// F_4 = F_2[x]/(x^2+x+1).
    pub fn f4() -> Arc<BaseRing> {
        Self::fq(2, 2, vec![1, 1, 1]).unwrap()
    }

    /// The coefficient ring W_m(F_{p^r}) in Galois-ring presentation.
    pub fn wm(p: u64, m: u32, r: usize, minpoly: Vec<i64>) -> Result<Arc<BaseRing>> {
        Self::from_descriptor(&RingDescriptor::Wm { p, m, r, minpoly })
    }

    /// Z/p^m as W_m(F_p).
    pub fn zpm(p: u64, m: u32) -> Result<Arc<BaseRing>> {
        Self::wm(p, m, 1, vec![0, 1])
    }

    /// k[eps]/(eps^2) over a field or Witt base (square-zero rank 1, with
    /// trivial divided powers).
    pub fn dual_numbers(base: &RingDescriptor) -> Result<Arc<BaseRing>> {
        Self::from_descriptor(&RingDescriptor::SquareZero {
            base: Box::new(base.clone()),
            rank: 1,
            pd: true,
        })
    }

    fn build(d: &RingDescriptor, char_override: Option<u32>) -> Result<Arc<BaseRing>> {
        // flatten descriptor into (p, char_exp, r, minpoly, vars, ideal, square_zero)
        let (p, mut char_exp, r, minpoly, var_names, ideal, square_zero, pd_flag) = match d {
            RingDescriptor::Fq { p, r, minpoly } => {
                (*p, 1u32, *r, minpoly.clone(), vec![], vec![], false, false)
            }
            RingDescriptor::Wm { p, m, r, minpoly } => {
                if *m == 0 {
                    return Error::invalid("W_0 is the zero ring");
                }
                (*p, *m, *r, minpoly.clone(), vec![], vec![], false, false)
            }
            RingDescriptor::Artinian {
                base,
                vars,
                ideal,
                p_power,
            } => {
                let (bp, bm, br, bpoly) = match base.as_ref() {
                    RingDescriptor::Fq { p, r, minpoly } => (*p, 1u32, *r, minpoly.clone()),
                    RingDescriptor::Wm { p, m, r, minpoly } => (*p, *m, *r, minpoly.clone()),
                    _ => return Error::invalid("Artinian base must be Fq or Wm"),
                };
                let ce = p_power.map_or(bm, |pp| pp.min(bm));
                if ce == 0 {
                    return Error::invalid("characteristic exponent 0");
                }
                for g in ideal {
                    if g.len() != vars.len() {
                        return Error::invalid("ideal generator arity mismatch");
                    }
                }
                (bp, ce, br, bpoly, vars.clone(), ideal.clone(), false, false)
            }
            RingDescriptor::SquareZero { base, rank, pd } => {
                let (bp, bm, br, bpoly, bvars, bideal) = match base.as_ref() {
                    RingDescriptor::Fq { p, r, minpoly } => {
                        (*p, 1u32, *r, minpoly.clone(), vec![], vec![])
                    }
                    RingDescriptor::Wm { p, m, r, minpoly } => {
                        (*p, *m, *r, minpoly.clone(), vec![], vec![])
                    }
                    RingDescriptor::Artinian { .. } => {
                        let b = Self::build(base, None)?;
                        (
                            b.p,
                            b.char_exp,
                            b.ext_deg,
                            b.minpoly.clone(),
                            b.var_names.clone(),
                            b.ideal.clone(),
                        )
                    }
                    RingDescriptor::SquareZero { .. } => {
                        return Error::invalid("nested square-zero extensions are not supported")
                    }
                };
                let nb = bvars.len();
                let mut vars = bvars;
                for i in 0..*rank {
                    vars.push(format!("eps{}", i + 1));
                }
                // pad base ideal generators, then all pairwise eps products
                let mut ideal: Vec<VarMono> = bideal
                    .into_iter()
                    .map(|mut g| {
                        g.resize(vars.len(), 0);
                        g
                    })
                    .collect();
                for i in 0..*rank {
                    for j in i..*rank {
                        let mut g = vec![0u16; vars.len()];
                        g[nb + i] += 1;
                        g[nb + j] += 1;
                        ideal.push(g);
                    }
                }
                (bp, bm, br, bpoly, vars, ideal, true, *pd)
            }
        };
        if let Some(ce) = char_override {
            char_exp = ce;
        }

        if p < 2 || !(2..=64).contains(&(p as u32)) || !is_prime(p) {
            return Error::invalid(format!("p = {p} is not a small prime"));
        }
        if minpoly.len() != r + 1 || r == 0 {
            return Error::invalid("minpoly must be monic of degree r >= 1");
        }
        if minpoly[r] != 1 {
            return Error::invalid("minpoly must be monic");
        }
        if !irreducible_mod_p(&minpoly, p) {
            return Error::invalid("minpoly is not irreducible mod p");
        }
        let modulus = (p as u128).checked_pow(char_exp).and_then(|m| {
            if m <= u64::MAX as u128 / (p as u128) {
                Some(m as u64)
            } else {
                None
            }
        });
        let modulus =
            modulus.ok_or_else(|| Error::Invalid(format!("p^{char_exp} too large for u64")))?;

        // enumerate the monomial basis; require every variable nilpotent
        let nv = var_names.len();
        let mut caps = vec![0u16; nv];
        for (v, cap) in caps.iter_mut().enumerate() {
            let pure = ideal
                .iter()
                .filter(|g| g.iter().enumerate().all(|(i, &e)| i == v || e == 0))
                .map(|g| g[v])
                .min();
            match pure {
                Some(c) if c > 0 => *cap = c,
                _ => {
                    return Error::invalid(format!(
                        "variable {} is not nilpotent (no pure power in the ideal)",
                        var_names[v]
                    ))
                }
            }
        }
        let in_ideal = |m: &VarMono| ideal.iter().any(|g| g.iter().zip(m).all(|(a, b)| a <= b));
        let mut monos: Vec<VarMono> = vec![vec![0; nv]];
        let mut idx = 0;
        // breadth-first enumeration below the caps
        while idx < monos.len() {
            let cur = monos[idx].clone();
            for v in 0..nv {
                let mut next = cur.clone();
                next[v] += 1;
                if next[v] >= caps[v] + 1 {
                    continue;
                }
                if !in_ideal(&next) && !monos.contains(&next) {
                    monos.push(next);
                }
            }
            idx += 1;
        }
        monos.sort();
        if monos.len() > 4096 {
            return Error::invalid("monomial basis too large for desk scale");
        }
        let mono_index: HashMap<VarMono, usize> =
            monos.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let mut mono_mul = vec![vec![None; monos.len()]; monos.len()];
        for (i, a) in monos.iter().enumerate() {
            for (j, b) in monos.iter().enumerate() {
                let s: VarMono = a.iter().zip(b).map(|(x, y)| x + y).collect();
                mono_mul[i][j] = if in_ideal(&s) {
                    None
                } else {
                    mono_index.get(&s).copied()
                };
            }
        }

        // x^k reductions for k = r .. 2r-2
        let mut xpow_red: Vec<Vec<u64>> = Vec::new();
        if r > 1 {
            let mut cur: Vec<u64> = minpoly[..r]
                .iter()
                .map(|&c| (-c).rem_euclid(modulus as i64) as u64)
                .collect();
            xpow_red.push(cur.clone());
            for _ in (r + 1)..(2 * r - 1) {
                // multiply by x, reduce
                let carry = cur[r - 1];
                let mut next = vec![0u64; r];
                for i in (1..r).rev() {
                    next[i] = cur[i - 1];
                }
                if carry != 0 {
                    for i in 0..r {
                        let red = mul_mod(carry, (-minpoly[i]).rem_euclid(modulus as i64) as u64, modulus);
                        next[i] = (next[i] + red) % modulus;
                    }
                }
                xpow_red.push(next.clone());
                cur = next;
            }
        }

        Ok(Arc::new(BaseRing {
            descriptor: d.clone(),
            p,
            char_exp,
            modulus,
            ext_deg: r,
            minpoly,
            var_names,
            ideal,
            square_zero,
            pd_flag,
            monos,
            mono_index,
            mono_mul,
            xpow_red,
        }))
    }

    /// Same basis and multiplication, coefficients taken mod p^e instead.
    /// This is the p-torsion-free cover used by ghost-based Witt arithmetic.
    pub fn with_char_exp(self: &Arc<Self>, e: u32) -> Result<Arc<BaseRing>> {
        if e == self.char_exp {
            return Ok(self.clone());
        }
        Self::build(&self.descriptor, Some(e))
    }

    pub fn descriptor(&self) -> &RingDescriptor {
        &self.descriptor
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn char_exp(&self) -> u32 {
        self.char_exp
    }

    /// Whether p = 0 in this ring.
    pub fn has_char_p(&self) -> bool {
        self.char_exp == 1
    }

    pub fn dim(&self) -> usize {
        self.ext_deg * self.monos.len()
    }

    /// Number of elements.
    pub fn cardinality(&self) -> u128 {
        (self.modulus as u128).pow(self.dim() as u32)
    }

    pub fn name(&self) -> String {
        match &self.descriptor {
            RingDescriptor::Fq { p, r, .. } => {
                if *r == 1 {
                    format!("F_{p}")
                } else {
                    format!("F_{{{}^{}}}", p, r)
                }
            }
            RingDescriptor::Wm { p, m, r, .. } => format!("W_{m}(F_{{{p}^{r}}})"),
            RingDescriptor::Artinian { vars, .. } => format!("Artinian[{}]", vars.join(",")),
            RingDescriptor::SquareZero { rank, .. } => format!("SqZero(rank {rank})"),
        }
    }

    pub fn zero(self: &Arc<Self>) -> RingElement {
        RingElement::new(self.clone(), vec![0; self.dim()])
    }

    pub fn one(self: &Arc<Self>) -> RingElement {
        let mut c = vec![0; self.dim()];
        c[0] = 1;
        RingElement::new(self.clone(), c)
    }

    pub fn from_int(self: &Arc<Self>, n: i64) -> RingElement {
        let mut c = vec![0; self.dim()];
        c[0] = n.rem_euclid(self.modulus as i64) as u64;
        RingElement::new(self.clone(), c)
    }

    /// The generator x of the unramified extension.
    pub fn gen_x(self: &Arc<Self>) -> RingElement {
        let mut c = vec![0; self.dim()];
        if self.ext_deg > 1 {
            c[1] = 1;
        } else {
            c[0] = 1; // x = its residue, minpoly x - c
            c[0] = (-self.minpoly[0]).rem_euclid(self.modulus as i64) as u64;
        }
        RingElement::new(self.clone(), c)
    }

    /// The k-th polynomial variable as an element.
    pub fn var(self: &Arc<Self>, k: usize) -> Result<RingElement> {
        if k >= self.var_names.len() {
            return Error::invalid("variable index out of range");
        }
        let mut mono = vec![0u16; self.var_names.len()];
        mono[k] = 1;
        let mi = *self
            .mono_index
            .get(&mono)
            .ok_or_else(|| Error::Invalid("variable is zero in this quotient".into()))?;
        let mut c = vec![0; self.dim()];
        c[mi * self.ext_deg] = 1;
        Ok(RingElement::new(self.clone(), c))
    }

    pub fn element_from_coords(self: &Arc<Self>, coords: Vec<u64>) -> Result<RingElement> {
        if coords.len() != self.dim() {
            return Error::invalid(format!(
                "expected {} coordinates, got {}",
                self.dim(),
                coords.len()
            ));
        }
        let coords = coords.into_iter().map(|c| c % self.modulus).collect();
        Ok(RingElement::new(self.clone(), coords))
    }

    /// The residue field F_{p^r}.
    pub fn residue_field(self: &Arc<Self>) -> Arc<BaseRing> {
        BaseRing::fq(self.p, self.ext_deg, self.minpoly.clone())
            .expect("residue field of a valid ring is valid")
    }

    /// Residue map to the residue field: kill the variables and reduce mod p.
    pub fn residue(self: &Arc<Self>, x: &RingElement) -> RingElement {
        debug_assert!(x.ring() == self.as_ref());
        let rf = self.residue_field();
        let coords = (0..self.ext_deg).map(|i| x.coords()[i] % self.p).collect();
        RingElement::new(rf, coords)
    }

    /// Nilpotency exponent of the maximal ideal: smallest e with m^e = 0.
    /// Desk-scale bound by construction.
    pub fn max_ideal_nilpotence(self: &Arc<Self>) -> u32 {
        // m = (p, x-part is unit-complement, vars). A crude exact bound:
        // p^char_exp = 0 and each basis monomial beyond 1 is nilpotent of
        // explicit degree; the product filtration degree is additive.
        let var_deg: u32 = self
            .monos
            .iter()
            .map(|m| m.iter().map(|&e| e as u32).sum::<u32>())
            .max()
            .unwrap_or(0);
        self.char_exp + var_deg
    }

    pub fn var_count(&self) -> usize {
        self.var_names.len()
    }

    pub(crate) fn mono_count(&self) -> usize {
        self.monos.len()
    }

    pub(crate) fn modulus(&self) -> u64 {
        self.modulus
    }

    pub(crate) fn mono_product(&self, i: usize, j: usize) -> Option<usize> {
        self.mono_mul[i][j]
    }
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f4_basics() {
        let f4 = BaseRing::f4();
        assert_eq!(f4.dim(), 2);
        assert_eq!(f4.cardinality(), 4);
        let x = f4.gen_x();
        // x^2 = x + 1 since x^2 + x + 1 = 0 over F_2
        let x2 = x.mul(&x);
        let expect = x.add(&f4.one());
        assert_eq!(x2, expect);
        // Frobenius x -> x^2 is the nontrivial automorphism; x^4 = x
        assert_eq!(x2.mul(&x2), x);
    }

    #[test]
    fn z8_arith() {
        let z8 = BaseRing::zpm(2, 3).unwrap();
        let five = z8.from_int(5);
        let three = z8.from_int(3);
        assert_eq!(five.mul(&three), z8.from_int(15 - 8));
        assert!(five.is_unit());
        assert_eq!(five.inv().unwrap().mul(&five), z8.one());
        assert!(!z8.from_int(2).is_unit());
    }

    #[test]
    fn dual_numbers_square_zero() {
        let k = BaseRing::f4();
        let ring = BaseRing::dual_numbers(k.descriptor()).unwrap();
        let eps = ring.var(0).unwrap();
        assert!(eps.mul(&eps).is_zero());
        let u = ring.one().add(&eps);
        assert!(u.is_unit());
        assert_eq!(u.inv().unwrap().mul(&u), ring.one());
    }

    #[test]
    fn artinian_monomial_quotient() {
        // W_2(F_4)[t]/(t^3)
        let d = RingDescriptor::Artinian {
            base: Box::new(RingDescriptor::Wm {
                p: 2,
                m: 2,
                r: 2,
                minpoly: vec![1, 1, 1],
            }),
            vars: vec!["t".into()],
            ideal: vec![vec![3]],
            p_power: None,
        };
        let ring = BaseRing::from_descriptor(&d).unwrap();
        assert_eq!(ring.mono_count(), 3);
        let t = ring.var(0).unwrap();
        let t2 = t.mul(&t);
        assert!(!t2.is_zero());
        assert!(t2.mul(&t).is_zero());
        // residue field is F_4
        let res = ring.residue(&t.add(&ring.from_int(3)));
        let f4 = BaseRing::f4();
        assert_eq!(res, f4.one());
    }

    #[test]
    fn rejects_reducible_minpoly() {
        assert!(BaseRing::fq(2, 2, vec![1, 0, 1]).is_err()); // x^2+1 = (x+1)^2 mod 2
    }

    #[test]
    fn descriptor_roundtrip_json() {
        let d = RingDescriptor::Fq {
            p: 2,
            r: 2,
            minpoly: vec![1, 1, 1],
        };
        let s = serde_json::to_string(&d).unwrap();
        assert!(s.contains("\"kind\":\"Fq\""));
        let d2: RingDescriptor = serde_json::from_str(&s).unwrap();
        assert_eq!(d, d2);
    }
}
