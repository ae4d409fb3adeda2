use super::BaseRing;
use crate::error::{Error, Result};
use std::fmt;
use std::sync::Arc;

/// An element of a [`BaseRing`], stored as coordinates on the canonical
/// monomial basis. Coordinates are kept reduced mod p^char_exp, so equality
/// is coordinate equality.
#[derive(Clone)]
pub struct RingElement {
    ring: Arc<BaseRing>,
    /// Length ring.dim(); entry `mi * r + a` is the coefficient of
    /// `x^a * monos[mi]`.
    coords: Vec<u64>,
}

impl PartialEq for RingElement {
    fn eq(&self, other: &Self) -> bool {
        self.ring.as_ref() == other.ring.as_ref() && self.coords == other.coords
    }
}
impl Eq for RingElement {}

impl fmt::Debug for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.ring.ext_deg;
        let mut terms: Vec<String> = Vec::new();
        for (mi, mono) in self.ring.monos.iter().enumerate() {
            for a in 0..r {
                let c = self.coords[mi * r + a];
                if c == 0 {
                    continue;
                }
                let mut t = String::new();
                if c != 1 || (a == 0 && mono.iter().all(|&e| e == 0)) {
                    t.push_str(&c.to_string());
                }
                if a > 0 {
                    if !t.is_empty() {
                        t.push('*');
                    }
                    t.push('x');
                    if a > 1 {
                        t.push_str(&format!("^{a}"));
                    }
                }
                for (vi, &e) in mono.iter().enumerate() {
                    if e == 0 {
                        continue;
                    }
                    if !t.is_empty() {
                        t.push('*');
                    }
                    t.push_str(&self.ring.var_names[vi]);
                    if e > 1 {
                        t.push_str(&format!("^{e}"));
                    }
                }
                terms.push(t);
            }
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

impl RingElement {
    pub(crate) fn new(ring: Arc<BaseRing>, coords: Vec<u64>) -> Self {
        debug_assert_eq!(coords.len(), ring.dim());
        RingElement { ring, coords }
    }

    pub fn ring(&self) -> &BaseRing {
        &self.ring
    }

    pub fn ring_arc(&self) -> &Arc<BaseRing> {
        &self.ring
    }

    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    fn assert_same_ring(&self, other: &Self) {
        assert!(
            self.ring.as_ref() == other.ring.as_ref(),
            "ring mismatch: {} vs {}",
            self.ring.name(),
            other.ring.name()
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.assert_same_ring(other);
        let m = self.ring.modulus();
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(&a, &b)| (a + b) % m)
            .collect();
        RingElement::new(self.ring.clone(), coords)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let m = self.ring.modulus();
        let coords = self.coords.iter().map(|&a| (m - a % m) % m).collect();
        RingElement::new(self.ring.clone(), coords)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.assert_same_ring(other);
        let ring = &self.ring;
        let r = ring.ext_deg;
        let m = ring.modulus();
        let nm = ring.mono_count();
        let mut out = vec![0u64; ring.dim()];
        for mi in 0..nm {
            for a in 0..r {
                let ca = self.coords[mi * r + a];
                if ca == 0 {
                    continue;
                }
                for mj in 0..nm {
                    let Some(mk) = ring.mono_product(mi, mj) else {
                        continue;
                    };
                    for b in 0..r {
                        let cb = other.coords[mj * r + b];
                        if cb == 0 {
                            continue;
                        }
                        let c = mul_mod(ca, cb, m);
                        let deg = a + b;
                        if deg < r {
                            let idx = mk * r + deg;
                            out[idx] = (out[idx] + c) % m;
                        } else {
                            // reduce x^deg via the precomputed table
                            let red = &self.ring.xpow_red[deg - r];
                            for (i, &rc) in red.iter().enumerate() {
                                if rc == 0 {
                                    continue;
                                }
                                let idx = mk * r + i;
                                out[idx] = (out[idx] + mul_mod(c, rc, m)) % m;
                            }
                        }
                    }
                }
            }
        }
        RingElement::new(self.ring.clone(), out)
    }

    pub fn mul_int(&self, n: i64) -> Self {
        let m = self.ring.modulus();
        let nn = n.rem_euclid(m as i64) as u64;
        let coords = self.coords.iter().map(|&a| mul_mod(a, nn, m)).collect();
        RingElement::new(self.ring.clone(), coords)
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = self.ring.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// p-th power map. On characteristic-p rings this is the Frobenius
    /// endomorphism.
    pub fn frobenius_p(&self) -> Self {
        self.pow(self.ring.prime())
    }

    /// A unit is an element whose image in the residue field is nonzero.
    pub fn is_unit(&self) -> bool {
        let p = self.ring.prime();
        (0..self.ring.ext_deg).any(|i| self.coords[i] % p != 0)
    }

    pub fn inv(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(Error::Singular(format!("{} is not a unit", self)));
        }
        // invert in the residue field, lift, then Newton: z <- z(2 - xz)
        let rf = self.ring.residue_field();
        let res = self.ring_arc().residue(self);
        // residue field inverse by a^(q-2)
        let q = rf.cardinality() as u64;
        let res_inv = res.pow(q - 2);
        let mut z = {
            let mut coords = vec![0u64; self.ring.dim()];
            coords[..self.ring.ext_deg].copy_from_slice(res_inv.coords());
            RingElement::new(self.ring.clone(), coords)
        };
        let two = self.ring.from_int(2);
        for _ in 0..64 {
            let xz = self.mul(&z);
            if xz == self.ring.one() {
                return Ok(z);
            }
            z = z.mul(&two.sub(&xz));
        }
        Err(Error::NonConvergent(
            "unit inverse Newton iteration did not stabilize".into(),
        ))
    }

    /// Exact division by p^k. Errors when some coordinate is not divisible.
    /// The result is well defined mod p^(char_exp - k); it is returned in the
    /// same ring with the canonical representative.
    pub fn exact_div_p(&self, k: u32) -> Result<Self> {
        let pk = (self.ring.prime() as u128).pow(k);
        if pk > self.ring.modulus() as u128 {
            return Error::precision(format!("division by p^{k} at char exponent {}", self.ring.char_exp()));
        }
        let pk = pk as u64;
        let mut coords = Vec::with_capacity(self.coords.len());
        for &c in &self.coords {
            if c % pk != 0 {
                return Err(Error::Invalid(format!(
                    "exact division by p^{k} leaves a remainder (coordinate {c})"
                )));
            }
            coords.push(c / pk);
        }
        Ok(RingElement::new(self.ring.clone(), coords))
    }

    /// Multiply by p^k.
    pub fn mul_p(&self, k: u32) -> Self {
        let m = self.ring.modulus();
        let pk = (self.ring.prime() as u128).pow(k) % m as u128;
        self.mul_int(pk as i64)
    }

    /// Is every coordinate divisible by p^k?
    pub fn divisible_by_p(&self, k: u32) -> bool {
        let pk = (self.ring.prime() as u128).pow(k.min(self.ring.char_exp()));
        let pk = (pk.min(self.ring.modulus() as u128)) as u64;
        self.coords.iter().all(|&c| c % pk == 0)
    }

    /// Map to the same descriptor at a different characteristic exponent,
    /// taking the canonical coordinate representative.
    pub fn with_char_exp(&self, target: &Arc<BaseRing>) -> Self {
        debug_assert_eq!(target.dim(), self.ring.dim());
        let m = target.modulus();
        let coords = self.coords.iter().map(|&c| c % m).collect();
        RingElement::new(target.clone(), coords)
    }

    pub fn random<R: rand::Rng>(ring: &Arc<BaseRing>, rng: &mut R) -> Self {
        let m = ring.modulus();
        let coords = (0..ring.dim()).map(|_| rng.gen_range(0..m)).collect();
        RingElement::new(ring.clone(), coords)
    }

    pub fn random_unit<R: rand::Rng>(ring: &Arc<BaseRing>, rng: &mut R) -> Self {
        loop {
            let x = Self::random(ring, rng);
            if x.is_unit() {
                return x;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::BaseRing;
    use rand::SeedableRng;

    #[test]
    fn inverse_in_artinian_ring() {
        use super::super::RingDescriptor;
        let d = RingDescriptor::Artinian {
            base: Box::new(RingDescriptor::Wm {
                p: 3,
                m: 2,
                r: 1,
                minpoly: vec![0, 1],
            }),
            vars: vec!["t".into()],
            ideal: vec![vec![2]],
            p_power: None,
        };
        let ring = BaseRing::from_descriptor(&d).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let x = super::RingElement::random_unit(&ring, &mut rng);
            assert_eq!(x.inv().unwrap().mul(&x), ring.one());
        }
    }

    #[test]
    fn exact_division() {
        let z8 = BaseRing::zpm(2, 3).unwrap();
        let six = z8.from_int(6);
        assert_eq!(six.exact_div_p(1).unwrap(), z8.from_int(3));
        assert!(z8.from_int(3).exact_div_p(1).is_err());
    }
}
