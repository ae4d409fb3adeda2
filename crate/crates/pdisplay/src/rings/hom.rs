use super::{BaseRing, RingElement, Witt};
use crate::error::{Error, Result};
use std::sync::Arc;

/// A ring homomorphism between base rings, given by the images of the
/// generators (x and the variables). Coefficients map through the canonical
/// Z/p^e -> Z/p^e' reduction, so the target characteristic exponent must not
/// exceed the source's.
#[derive(Clone, Debug)]
pub struct RingHom {
    src: Arc<BaseRing>,
    dst: Arc<BaseRing>,
    x_image: RingElement,
    var_images: Vec<RingElement>,
}

impl RingHom {
    pub fn new(
        src: Arc<BaseRing>,
        dst: Arc<BaseRing>,
        x_image: RingElement,
        var_images: Vec<RingElement>,
    ) -> Result<Self> {
        if dst.char_exp() > src.char_exp() {
            return Error::invalid("ring hom cannot raise the characteristic exponent");
        }
        if var_images.len() != src.var_names.len() {
            return Error::invalid("wrong number of variable images");
        }
        // the minimal-polynomial relation must be preserved
        let mut acc = dst.zero();
        for (i, &c) in src.minpoly.iter().enumerate() {
            acc = acc.add(&x_image.pow(i as u64).mul_int(c));
        }
        if !acc.is_zero() {
            return Error::invalid("x image does not satisfy the minimal polynomial");
        }
        Ok(RingHom {
            src,
            dst,
            x_image,
            var_images,
        })
    }

    pub fn identity(ring: &Arc<BaseRing>) -> Self {
        let vars = (0..ring.var_names.len())
            .map(|k| ring.var(k).expect("basis variable"))
            .collect();
        RingHom {
            src: ring.clone(),
            dst: ring.clone(),
            x_image: ring.gen_x(),
            var_images: vars,
        }
    }

    /// Reduction to the residue field (kill p and the variables).
    pub fn to_residue_field(ring: &Arc<BaseRing>) -> Self {
        let rf = ring.residue_field();
        let zeros = vec![rf.zero(); ring.var_names.len()];
        RingHom {
            src: ring.clone(),
            dst: rf.clone(),
            x_image: rf.gen_x(),
            var_images: zeros,
        }
    }

    /// Same descriptor at a lower characteristic exponent.
    pub fn reduce_char(ring: &Arc<BaseRing>, e: u32) -> Result<Self> {
        if e > ring.char_exp() {
            return Error::invalid("reduce_char cannot raise precision");
        }
        let dst = ring.with_char_exp(e)?;
        let vars = (0..dst.var_names.len())
            .map(|k| dst.var(k).expect("basis variable"))
            .collect();
        Ok(RingHom {
            src: ring.clone(),
            dst: dst.clone(),
            x_image: dst.gen_x(),
            var_images: vars,
        })
    }

    /// Substitute the ring's variables inside the ring itself (or a quotient
    /// sharing p, r, minpoly); x maps to x.
    pub fn var_subst(
        src: &Arc<BaseRing>,
        dst: &Arc<BaseRing>,
        images: Vec<RingElement>,
    ) -> Result<Self> {
        Self::new(src.clone(), dst.clone(), dst.gen_x(), images)
    }

    pub fn src(&self) -> &Arc<BaseRing> {
        &self.src
    }

    pub fn dst(&self) -> &Arc<BaseRing> {
        &self.dst
    }

    pub fn apply(&self, x: &RingElement) -> RingElement {
        assert!(x.ring() == self.src.as_ref(), "hom applied to foreign element");
        let r = self.src.ext_deg;
        let mut acc = self.dst.zero();
        for (mi, mono) in self.src.monos.iter().enumerate() {
            // basis monomial image
            let mut base: Option<RingElement> = None;
            for a in 0..r {
                let c = x.coords()[mi * r + a];
                if c == 0 {
                    continue;
                }
                let b = base.get_or_insert_with(|| {
                    let mut m = self.dst.one();
                    for (vi, &e) in mono.iter().enumerate() {
                        if e > 0 {
                            m = m.mul(&self.var_images[vi].pow(e as u64));
                        }
                    }
                    m
                });
                let term = b.mul(&self.x_image.pow(a as u64)).mul_int(c as i64);
                acc = acc.add(&term);
            }
        }
        acc
    }

    /// Apply coordinate-wise to a Witt vector (the induced W(f)).
    pub fn apply_witt(&self, w: &Witt) -> Witt {
        w.map_coords(&self.dst, |c| self.apply(c))
    }

    pub fn compose(&self, inner: &RingHom) -> Result<RingHom> {
        if inner.dst.as_ref() != self.src.as_ref() {
            return Error::invalid("hom composition mismatch");
        }
        Ok(RingHom {
            src: inner.src.clone(),
            dst: self.dst.clone(),
            x_image: self.apply(&inner.x_image),
            var_images: inner.var_images.iter().map(|v| self.apply(v)).collect(),
        })
    }
}

/// The canonical coordinate section of a quotient map (same monomial basis,
/// representatives lifted as-is). This is a set-theoretic section, not a ring
/// homomorphism; it is what the crystal machinery uses to choose lifts.
pub fn coordinate_section(src: &Arc<BaseRing>, elem_in_quotient: &RingElement) -> Result<RingElement> {
    let q = elem_in_quotient.ring();
    if q.ext_deg != src.ext_deg || q.minpoly != src.minpoly || q.prime() != src.prime() {
        return Error::invalid("coordinate section: incompatible descriptors");
    }
    let mut coords = vec![0u64; src.dim()];
    for (mi, mono) in q.monos.iter().enumerate() {
        // locate the same monomial upstairs; quotient monomials must exist there
        let Some(&si) = src.mono_index.get(mono) else {
            return Error::invalid("coordinate section: monomial missing upstairs");
        };
        for a in 0..q.ext_deg {
            coords[si * src.ext_deg + a] = elem_in_quotient.coords()[mi * q.ext_deg + a];
        }
    }
    src.element_from_coords(coords)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::RingDescriptor;

    #[test]
    fn residue_and_section_roundtrip() {
        let w2f4 = BaseRing::wm(2, 2, 2, vec![1, 1, 1]).unwrap();
        let f4 = w2f4.residue_field();
        let hom = RingHom::to_residue_field(&w2f4);
        let x = w2f4.gen_x().add(&w2f4.from_int(2));
        let r = hom.apply(&x);
        assert_eq!(r, f4.gen_x());
        let back = coordinate_section(&w2f4, &r).unwrap();
        assert_eq!(hom.apply(&back), r);
    }

    #[test]
    fn var_substitution() {
        let d = RingDescriptor::Artinian {
            base: Box::new(RingDescriptor::Fq {
                p: 2,
                r: 1,
                minpoly: vec![0, 1],
            }),
            vars: vec!["t".into()],
            ideal: vec![vec![2]],
            p_power: None,
        };
        let ring = BaseRing::from_descriptor(&d).unwrap();
        let t = ring.var(0).unwrap();
        // t -> 0 recovers the augmentation
        let aug = RingHom::var_subst(&ring, &ring, vec![ring.zero()]).unwrap();
        assert!(aug.apply(&t).is_zero());
        let one_plus_t = ring.one().add(&t);
        assert_eq!(aug.apply(&one_plus_t), ring.one());
    }
}
