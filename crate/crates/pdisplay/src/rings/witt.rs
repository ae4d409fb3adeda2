use super::{laws::WittLawCache, BaseRing, RingElement};
use crate::error::{Error, Result};
use std::fmt;
use std::sync::Arc;

/// A truncated p-typical Witt vector over a [`BaseRing`].
///
/// The truncation length is part of the value. Ring operations require equal
/// lengths; the Frobenius shortens the length by one over mixed-characteristic
/// bases and preserves it over characteristic-p bases; the Verschiebung
/// lengthens by one. Nothing ever extends precision silently.
///
/// Arithmetic is computed through the ghost map over the p-torsion-free cover
/// of the base ring (same monomial basis, coefficients mod p^(e + len - 1)),
/// where the ghost components determine the result exactly. This evaluates
/// the universal addition/multiplication laws without materializing them; the
/// materialized laws ([`WittLawCache`]) serve as an independent oracle in
/// tests.
#[derive(Clone)]
pub struct Witt {
    ring: Arc<BaseRing>,
    coords: Vec<RingElement>,
}

impl PartialEq for Witt {
    fn eq(&self, other: &Self) -> bool {
        self.ring.as_ref() == other.ring.as_ref() && self.coords == other.coords
    }
}
impl Eq for Witt {}

impl fmt::Debug for Witt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Witt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl Witt {
    pub fn new(ring: Arc<BaseRing>, coords: Vec<RingElement>) -> Result<Self> {
        for c in &coords {
            if c.ring() != ring.as_ref() {
                return Error::invalid("Witt coordinate from a different ring");
            }
        }
        Ok(Witt { ring, coords })
    }

    pub fn zero(ring: &Arc<BaseRing>, len: usize) -> Self {
        Witt {
            ring: ring.clone(),
            coords: vec![ring.zero(); len],
        }
    }

    pub fn one(ring: &Arc<BaseRing>, len: usize) -> Self {
        Self::teichmuller(&ring.one(), len)
    }

    /// The Teichmueller representative [a] = (a, 0, 0, ...).
    pub fn teichmuller(a: &RingElement, len: usize) -> Self {
        let ring = a.ring_arc().clone();
        let mut coords = vec![ring.zero(); len];
        if len > 0 {
            coords[0] = a.clone();
        }
        Witt { ring, coords }
    }

    /// The image of the integer n in W_len(R).
    pub fn from_int(ring: &Arc<BaseRing>, n: i64, len: usize) -> Self {
        if len == 0 {
            return Self::zero(ring, 0);
        }
        let (lift, ghost) = {
            let lift = lift_ring(ring, len);
            let g = vec![lift.from_int(n); len];
            (lift, g)
        };
        finish(ring, &lift, ghost)
    }

    pub fn ring(&self) -> &BaseRing {
        &self.ring
    }

    pub fn ring_arc(&self) -> &Arc<BaseRing> {
        &self.ring
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[RingElement] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    /// w_0, the projection W(R) -> R.
    pub fn w0(&self) -> RingElement {
        assert!(!self.coords.is_empty(), "w0 of a length-0 Witt vector");
        self.coords[0].clone()
    }

    /// The ghost components (w_0(x), ..., w_{len-1}(x)) in the base ring.
    pub fn ghost(&self) -> Vec<RingElement> {
        ghost_components(&self.ring, &self.coords, self.len())
    }

    fn assert_compatible(&self, other: &Self, op: &str) {
        assert!(
            self.ring.as_ref() == other.ring.as_ref(),
            "{op}: ring mismatch ({} vs {})",
            self.ring.name(),
            other.ring.name()
        );
        assert!(
            self.len() == other.len(),
            "{op}: length mismatch ({} vs {})",
            self.len(),
            other.len()
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.assert_compatible(other, "witt_add");
        let m = self.len();
        if m == 0 {
            return self.clone();
        }
        let lift = lift_ring(&self.ring, m);
        let ga = ghost_components_in(&lift, &self.coords, m);
        let gb = ghost_components_in(&lift, &other.coords, m);
        let g: Vec<RingElement> = ga.iter().zip(&gb).map(|(a, b)| a.add(b)).collect();
        finish(&self.ring, &lift, g)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.assert_compatible(other, "witt_mul");
        let m = self.len();
        if m == 0 {
            return self.clone();
        }
        let lift = lift_ring(&self.ring, m);
        let ga = ghost_components_in(&lift, &self.coords, m);
        let gb = ghost_components_in(&lift, &other.coords, m);
        let g: Vec<RingElement> = ga.iter().zip(&gb).map(|(a, b)| a.mul(b)).collect();
        finish(&self.ring, &lift, g)
    }

    pub fn neg(&self) -> Self {
        let m = self.len();
        if m == 0 {
            return self.clone();
        }
        let lift = lift_ring(&self.ring, m);
        let ga = ghost_components_in(&lift, &self.coords, m);
        let g: Vec<RingElement> = ga.iter().map(|a| a.neg()).collect();
        finish(&self.ring, &lift, g)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Multiplication by an ordinary integer.
    pub fn mul_int(&self, n: i64) -> Self {
        let m = self.len();
        if m == 0 {
            return self.clone();
        }
        let lift = lift_ring(&self.ring, m);
        let ga = ghost_components_in(&lift, &self.coords, m);
        let g: Vec<RingElement> = ga.iter().map(|a| a.mul_int(n)).collect();
        finish(&self.ring, &lift, g)
    }

    /// Multiplication by p^k.
    pub fn mul_pk(&self, k: u32) -> Self {
        let mut n: i64 = 1;
        for _ in 0..k {
            n = n.saturating_mul(self.ring.prime() as i64);
        }
        // saturating is fine: for huge p^k the ghost scale wraps mod p^M anyway,
        // but desk-scale k keeps this exact
        self.mul_int(n)
    }

    /// Witt-vector Frobenius. Over characteristic-p bases it is the
    /// coordinate-wise p-power map and preserves the length; otherwise it
    /// consumes one level of precision.
    pub fn frobenius(&self) -> Result<Self> {
        if self.ring.has_char_p() {
            let coords = self.coords.iter().map(|c| c.frobenius_p()).collect();
            return Ok(Witt {
                ring: self.ring.clone(),
                coords,
            });
        }
        let m = self.len();
        if m <= 1 {
            return Error::precision("frobenius would produce a length-0 Witt vector");
        }
        let lift = lift_ring(&self.ring, m);
        let ga = ghost_components_in(&lift, &self.coords, m);
        // ghost of f(x) is (w_1, ..., w_{m-1})
        let g = ga[1..].to_vec();
        Ok(finish(&self.ring, &lift, g))
    }

    /// Verschiebung: v(x_0,...,x_{m-1}) = (0, x_0, ..., x_{m-1}), length m+1.
    pub fn verschiebung(&self) -> Self {
        let mut coords = Vec::with_capacity(self.len() + 1);
        coords.push(self.ring.zero());
        coords.extend(self.coords.iter().cloned());
        Witt {
            ring: self.ring.clone(),
            coords,
        }
    }

    /// Inverse of the Verschiebung: defined on vectors with w_0 = 0,
    /// shortening the length by one.
    pub fn verschiebung_inv(&self) -> Result<Self> {
        if self.is_empty() || !self.coords[0].is_zero() {
            return Error::invalid("verschiebung_inv: w_0 != 0");
        }
        Ok(Witt {
            ring: self.ring.clone(),
            coords: self.coords[1..].to_vec(),
        })
    }

    pub fn truncate(&self, len: usize) -> Self {
        assert!(len <= self.len(), "truncate cannot extend precision");
        Witt {
            ring: self.ring.clone(),
            coords: self.coords[..len].to_vec(),
        }
    }

    /// A Witt vector is a unit iff w_0 is a unit.
    pub fn is_unit(&self) -> bool {
        !self.coords.is_empty() && self.coords[0].is_unit()
    }

    pub fn inv(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(Error::Singular("non-unit Witt vector".into()));
        }
        // Newton: z <- z(2 - xz), starting from [w0^{-1}]
        let mut z = Witt::teichmuller(&self.coords[0].inv()?, self.len());
        let two = Witt::from_int(&self.ring, 2, self.len());
        let one = Witt::one(&self.ring, self.len());
        for _ in 0..64 {
            let xz = self.mul(&z);
            if xz == one {
                return Ok(z);
            }
            z = z.mul(&two.sub(&xz));
        }
        Err(Error::NonConvergent(
            "Witt inverse Newton iteration did not stabilize".into(),
        ))
    }

    /// p-adic valuation for Witt vectors over the residue field: the index of
    /// the first nonzero coordinate. `None` means zero at this length, i.e.
    /// valuation >= len.
    pub fn val(&self) -> Option<usize> {
        debug_assert!(
            self.ring.has_char_p() && self.ring.var_names.is_empty(),
            "valuation is only meaningful over a field"
        );
        self.coords.iter().position(|c| !c.is_zero())
    }

    /// Exact division by p^k over a finite-field base (where p = v(f(.))).
    /// Shortens the length by k.
    pub fn exact_div_pk(&self, k: usize) -> Result<Self> {
        assert!(
            self.ring.has_char_p() && self.ring.var_names.is_empty(),
            "exact_div_pk requires a finite-field base"
        );
        if k == 0 {
            return Ok(self.clone());
        }
        if self.len() < k {
            return Error::precision("division by p^k below the truncation length");
        }
        match self.val() {
            None => Ok(Witt::zero(&self.ring, self.len() - k)),
            Some(v) if v >= k => {
                // p*y = (0, y0^p, y1^p, ...): divide = drop + inverse Frobenius
                let r = self.ring.ext_deg as u32;
                let p = self.ring.prime();
                // inverse Frobenius: a -> a^(p^(r-1))
                let inv_frob_exp = p.pow(r.saturating_sub(1));
                let mut cur: Vec<RingElement> = self.coords.clone();
                for _ in 0..k {
                    cur = cur[1..].iter().map(|c| c.pow(inv_frob_exp)).collect();
                }
                Witt::new(self.ring.clone(), cur)
            }
            Some(v) => Err(Error::Invalid(format!(
                "not divisible by p^{k} (valuation {v})"
            ))),
        }
    }

    /// Apply a coordinate map R -> R' induced by a ring homomorphism.
    pub fn map_coords<F>(&self, target: &Arc<BaseRing>, f: F) -> Self
    where
        F: Fn(&RingElement) -> RingElement,
    {
        let coords = self.coords.iter().map(|c| f(c)).collect();
        Witt {
            ring: target.clone(),
            coords,
        }
    }

    pub fn random<R: rand::Rng>(ring: &Arc<BaseRing>, len: usize, rng: &mut R) -> Self {
        let coords = (0..len).map(|_| RingElement::random(ring, rng)).collect();
        Witt {
            ring: ring.clone(),
            coords,
        }
    }

    pub fn random_unit<R: rand::Rng>(ring: &Arc<BaseRing>, len: usize, rng: &mut R) -> Self {
        let mut w = Self::random(ring, len, rng);
        w.coords[0] = RingElement::random_unit(ring, rng);
        w
    }

    /// Addition evaluated through the materialized universal polynomials.
    /// This is the oracle path; it must agree with [`Witt::add`].
    pub fn add_via_cache(&self, other: &Self, cache: &WittLawCache) -> Result<Self> {
        self.assert_compatible(other, "add_via_cache");
        cache.eval_add(&self.coords, &other.coords).map(|coords| Witt {
            ring: self.ring.clone(),
            coords,
        })
    }

    /// Multiplication through the materialized universal polynomials.
    pub fn mul_via_cache(&self, other: &Self, cache: &WittLawCache) -> Result<Self> {
        self.assert_compatible(other, "mul_via_cache");
        cache.eval_mul(&self.coords, &other.coords).map(|coords| Witt {
            ring: self.ring.clone(),
            coords,
        })
    }

    pub fn to_coord_vecs(&self) -> Vec<Vec<u64>> {
        self.coords.iter().map(|c| c.coords().to_vec()).collect()
    }

    pub fn from_coord_vecs(ring: &Arc<BaseRing>, v: &[Vec<u64>]) -> Result<Self> {
        let coords = v
            .iter()
            .map(|c| ring.element_from_coords(c.clone()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Witt {
            ring: ring.clone(),
            coords,
        })
    }
}

/// The p-torsion-free cover at enough precision for ghost inversion of
/// length-`len` vectors.
fn lift_ring(ring: &Arc<BaseRing>, len: usize) -> Arc<BaseRing> {
    let target = ring.char_exp() + (len as u32).saturating_sub(1);
    ring.with_char_exp(target)
        .expect("char-exponent lift of a valid ring")
}

fn ghost_components_in(
    lift: &Arc<BaseRing>,
    coords: &[RingElement],
    upto: usize,
) -> Vec<RingElement> {
    let p = lift.prime() as i64;
    let lifted: Vec<RingElement> = coords.iter().map(|c| c.with_char_exp(lift)).collect();
    let mut ghost = vec![lift.zero(); upto];
    // powers[i] holds x_i^(p^(n-i)) as n advances
    let mut powers: Vec<RingElement> = Vec::with_capacity(upto);
    let mut pscale = vec![lift.one(); upto];
    for i in 1..upto {
        pscale[i] = pscale[i - 1].mul_int(p);
    }
    for n in 0..upto {
        powers.push(lifted[n].clone());
        let mut acc = lift.zero();
        for i in 0..=n {
            acc = acc.add(&powers[i].mul(&pscale[i]));
            powers[i] = powers[i].pow(lift.prime());
        }
        ghost[n] = acc;
    }
    ghost
}

fn ghost_components(ring: &Arc<BaseRing>, coords: &[RingElement], upto: usize) -> Vec<RingElement> {
    ghost_components_in(ring, coords, upto)
}

/// Invert the ghost map in the lift ring and reduce back. Panics on inexact
/// division, which is unreachable for ghost vectors arising from Witt
/// integrality.
fn finish(ring: &Arc<BaseRing>, lift: &Arc<BaseRing>, ghost: Vec<RingElement>) -> Witt {
    let m = ghost.len();
    let p = lift.prime() as i64;
    let mut z: Vec<RingElement> = Vec::with_capacity(m);
    for n in 0..m {
        // g_n - sum_{i<n} p^i z_i^(p^(n-i)), then exact division by p^n
        let mut acc = ghost[n].clone();
        let mut pi = lift.one();
        for (i, zi) in z.iter().enumerate().take(n) {
            let e = (lift.prime() as u64).pow((n - i) as u32);
            acc = acc.sub(&zi.pow(e).mul(&pi));
            pi = pi.mul_int(p);
        }
        let zn = acc
            .exact_div_p(n as u32)
            .expect("ghost inversion divides exactly by Witt integrality");
        z.push(zn);
    }
    let coords = z.iter().map(|c| c.with_char_exp(ring)).collect();
    Witt {
        ring: ring.clone(),
        coords,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn frozen_sum_over_z4() {
        // (1,0) + (1,0) = (2,3) in W_2(Z/4): ghosts (1,1)+(1,1)=(2,2),
        // z0 = 2, z1 = (2 - 4)/2 = -1 = 3 mod 4
        let z4 = BaseRing::zpm(2, 2).unwrap();
        let x = Witt::from_coord_vecs(&z4, &[vec![1], vec![0]]).unwrap();
        let s = x.add(&x);
        assert_eq!(s.to_coord_vecs(), vec![vec![2], vec![3]]);
    }

    #[test]
    fn frozen_ghost_over_z4() {
        // x = (0,1) over Z/4, p = 2: ghost = (0, 0 + 2*1) = (0, 2)
        let z4 = BaseRing::zpm(2, 2).unwrap();
        let x = Witt::from_coord_vecs(&z4, &[vec![0], vec![1]]).unwrap();
        let g = x.ghost();
        assert_eq!(g[0], z4.zero());
        assert_eq!(g[1], z4.from_int(2));
    }

    #[test]
    fn teichmuller_ghost_and_multiplicativity() {
        let f4 = BaseRing::f4();
        let a = f4.gen_x();
        let b = a.add(&f4.one());
        let ta = Witt::teichmuller(&a, 3);
        let tb = Witt::teichmuller(&b, 3);
        // ghost([a]) = (a, a^p, a^{p^2})
        let g = ta.ghost();
        assert_eq!(g[0], a);
        assert_eq!(g[1], a.frobenius_p());
        assert_eq!(g[2], a.frobenius_p().frobenius_p());
        // [a][b] = [ab]
        assert_eq!(ta.mul(&tb), Witt::teichmuller(&a.mul(&b), 3));
    }

    #[test]
    fn frobenius_verschiebung_identities() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for (p, m) in [(2u64, 3u32), (3, 2), (5, 2)] {
            let ring = BaseRing::zpm(p, m).unwrap();
            for len in 2..=4usize {
                for _ in 0..20 {
                    let x = Witt::random(&ring, len, &mut rng);
                    // f(v(x)) = p*x, exactly at length len
                    let fv = x.verschiebung().frobenius().unwrap();
                    assert_eq!(fv, x.mul_int(p as i64));
                    // w0(v(x)) = 0
                    assert!(x.verschiebung().w0().is_zero());
                    // f([a]) = [a^p]
                    let a = RingElement::random(&ring, &mut rng);
                    let fa = Witt::teichmuller(&a, len + 1).frobenius().unwrap();
                    assert_eq!(fa, Witt::teichmuller(&a.frobenius_p(), len));
                }
            }
        }
    }

    #[test]
    fn vx_vy_is_p_vxy() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let ring = BaseRing::f4();
        for _ in 0..40 {
            let x = Witt::random(&ring, 3, &mut rng);
            let y = Witt::random(&ring, 3, &mut rng);
            let lhs = x.verschiebung().mul(&y.verschiebung());
            let rhs = x.mul(&y).verschiebung().mul_int(2);
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn ghost_is_ring_hom() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let ring = BaseRing::zpm(3, 2).unwrap();
        for _ in 0..30 {
            let x = Witt::random(&ring, 3, &mut rng);
            let y = Witt::random(&ring, 3, &mut rng);
            let gs: Vec<_> = x
                .ghost()
                .iter()
                .zip(y.ghost())
                .map(|(a, b)| a.add(&b))
                .collect();
            assert_eq!(x.add(&y).ghost(), gs);
            let gp: Vec<_> = x
                .ghost()
                .iter()
                .zip(y.ghost())
                .map(|(a, b)| a.mul(&b))
                .collect();
            assert_eq!(x.mul(&y).ghost(), gp);
        }
    }

    #[test]
    fn division_by_p_over_field() {
        let f4 = BaseRing::f4();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let y = Witt::random(&f4, 3, &mut rng);
            let py = y.mul_int(2); // length 3
            let back = py.exact_div_pk(1).unwrap();
            assert_eq!(back, y.truncate(2));
        }
    }
}
