//! Semi-frame truncations, finite free graded modules and maps, the graded
//! Nakayama criterion, and truncation-tower reconstruction.

use super::{Frame, FrameElement, FrameKind};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::rings::{RingElement, Witt};
use std::sync::Arc;

/// A truncation of a frame: same carriers with Witt parts cut to `level`,
/// keeping tau and the t-maps but only the length-shortening sigma. This is
/// the m-truncated (relative) Witt semi-frame.
#[derive(Clone, Debug)]
pub struct SemiFrame {
    frame: Arc<Frame>,
    level: usize,
}

/// Quotient a frame by the graded ideal V_level, keeping tau.
pub fn truncate_semiframe(frame: &Arc<Frame>, level: usize) -> Result<SemiFrame> {
    if level == 0 || level > frame.precision() {
        return Error::invalid("semi-frame level must satisfy 1 <= level <= precision");
    }
    Ok(SemiFrame {
        frame: frame.clone(),
        level,
    })
}

impl SemiFrame {
    pub fn frame(&self) -> &Arc<Frame> {
        &self.frame
    }

    pub fn level(&self) -> usize {
        self.level
    }

    /// Truncate an element of the ambient frame into this level.
    pub fn truncate_element(&self, x: &FrameElement) -> FrameElement {
        FrameElement {
            degree: x.degree,
            v_part: x.v_part.truncate(self.level.min(x.v_part.len())),
            j_part: x.j_part.clone(),
        }
    }

    pub fn zero(&self, degree: i32) -> FrameElement {
        self.truncate_element(&self.frame.zero(degree))
    }

    pub fn tau(&self, x: &FrameElement) -> Result<Witt> {
        let t = self.frame.tau(x)?;
        Ok(t.truncate(self.level.min(t.len())))
    }

    /// nu: S -> R, killing all degrees except 0 and reducing W -> R
    /// (composed with B -> A in the relative case).
    pub fn nu(&self, x: &FrameElement) -> RingElement {
        if x.degree != 0 {
            return self.frame.base_quotient().zero();
        }
        let w0 = x.v_part.w0();
        match self.frame.kind() {
            FrameKind::Witt { .. } => w0,
            FrameKind::RelativeWitt { thickening } => thickening.proj().apply(&w0),
        }
    }

    pub fn random_element<R: rand::Rng>(&self, degree: i32, rng: &mut R) -> FrameElement {
        let base = self.frame.witt_base();
        let v = Witt::random(base, self.level, rng);
        let j = if degree >= 1 && self.frame.is_relative() {
            // a random kernel element: difference of an element and its
            // section-projection roundtrip
            let t = self.frame.thickening().unwrap();
            let x = RingElement::random(base, rng);
            let back = t.lift(&t.proj().apply(&x)).expect("section");
            Some(x.sub(&back))
        } else {
            None
        };
        FrameElement {
            degree,
            v_part: v,
            j_part: j,
        }
    }
}

/// A finite free graded module over a semi-frame, recorded by its generator
/// degrees.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedModule {
    pub degrees: Vec<i32>,
}

impl GradedModule {
    pub fn new(degrees: Vec<i32>) -> Self {
        GradedModule { degrees }
    }

    pub fn rank(&self) -> usize {
        self.degrees.len()
    }

    pub fn sorted_degrees(&self) -> Vec<i32> {
        let mut d = self.degrees.clone();
        d.sort();
        d
    }
}

/// A graded map between finite free graded modules, as a matrix of frame
/// elements: entry (i, j) has degree src[j] - dst[i] and records the
/// coefficient of generator i in the image of generator j.
#[derive(Clone, Debug)]
pub struct GradedMap {
    pub semiframe: SemiFrame,
    pub src: GradedModule,
    pub dst: GradedModule,
    /// Row-major entries, dst.rank() x src.rank().
    pub entries: Vec<FrameElement>,
}

impl GradedMap {
    pub fn new(
        semiframe: SemiFrame,
        src: GradedModule,
        dst: GradedModule,
        entries: Vec<FrameElement>,
    ) -> Result<Self> {
        if entries.len() != src.rank() * dst.rank() {
            return Error::invalid("graded map entry count");
        }
        for i in 0..dst.rank() {
            for j in 0..src.rank() {
                let want = src.degrees[j] - dst.degrees[i];
                if entries[i * src.rank() + j].degree != want {
                    return Err(Error::Mismatch(format!(
                        "entry ({i},{j}) has degree {} but the graded map needs {want}",
                        entries[i * src.rank() + j].degree
                    )));
                }
            }
        }
        Ok(GradedMap {
            semiframe,
            src,
            dst,
            entries,
        })
    }

    pub fn identity(semiframe: &SemiFrame, module: &GradedModule) -> Self {
        let n = module.rank();
        let mut entries = Vec::with_capacity(n * n);
        let one = Witt::one(semiframe.frame().witt_base(), semiframe.level());
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    entries.push(FrameElement {
                        degree: 0,
                        v_part: one.clone(),
                        j_part: None,
                    });
                } else {
                    entries.push(semiframe.zero(module.degrees[j] - module.degrees[i]));
                }
            }
        }
        GradedMap {
            semiframe: semiframe.clone(),
            src: module.clone(),
            dst: module.clone(),
            entries,
        }
    }

    pub fn at(&self, i: usize, j: usize) -> &FrameElement {
        &self.entries[i * self.src.rank() + j]
    }

    /// Composition self o inner.
    pub fn compose(&self, inner: &GradedMap) -> Result<GradedMap> {
        if inner.dst.degrees != self.src.degrees {
            return Err(Error::Mismatch("graded map composition".into()));
        }
        let frame = self.semiframe.frame();
        let rows = self.dst.rank();
        let mid = self.src.rank();
        let cols = inner.src.rank();
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let mut acc = self
                    .semiframe
                    .zero(inner.src.degrees[j] - self.dst.degrees[i]);
                for k in 0..mid {
                    let prod = frame.mul(self.at(i, k), inner.at(k, j))?;
                    acc = frame.add(&acc, &prod)?;
                }
                entries.push(acc);
            }
        }
        GradedMap::new(
            self.semiframe.clone(),
            inner.src.clone(),
            self.dst.clone(),
            entries,
        )
    }

    /// The reduction f (x) R over the semi-frame's base quotient.
    pub fn reduce(&self) -> Matrix<RingElement> {
        let rows = self.dst.rank();
        let cols = self.src.rank();
        Matrix::from_fn(rows, cols, |i, j| self.semiframe.nu(self.at(i, j)))
    }

    /// Gauss-Jordan inverse of a bijective graded map. Pivots are always
    /// degree-0 units once generators are processed degree by degree.
    pub fn graded_inverse(&self) -> Result<GradedMap> {
        if self.src.sorted_degrees() != self.dst.sorted_degrees() {
            return Err(Error::Singular("graded ranks differ".into()));
        }
        let n = self.src.rank();
        let frame = self.semiframe.frame().clone();
        let mut a: Vec<FrameElement> = self.entries.clone();
        let mut inv: Vec<FrameElement> =
            GradedMap::identity(&self.semiframe, &self.dst).entries;
        // row-reduce a to the identity; inv tracks the operations. Pivots are
        // degree-0 unit entries, which exist column by column whenever the
        // map is bijective (Nakayama), and keep all degree bookkeeping
        // consistent through the eliminations.
        let inv_src = self.dst.clone();
        for col in 0..n {
            let pivot_row = (col..n)
                .find(|&r| {
                    let e = &a[r * n + col];
                    e.degree == 0 && e.v_part.is_unit()
                })
                .ok_or_else(|| {
                    Error::Singular(format!("graded inverse: no unit pivot in column {col}"))
                })?;
            if pivot_row != col {
                for c in 0..n {
                    a.swap(pivot_row * n + c, col * n + c);
                    inv.swap(pivot_row * n + c, col * n + c);
                }
            }
            let pinv = frame.deg0(a[col * n + col].v_part.inv()?);
            for c in 0..n {
                a[col * n + c] = frame.mul(&pinv, &a[col * n + c])?;
                inv[col * n + c] = frame.mul(&pinv, &inv[col * n + c])?;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a[r * n + col].clone();
                if factor.v_part.is_zero() && factor.j_part.as_ref().map_or(true, |j| j.is_zero())
                {
                    continue;
                }
                for c in 0..n {
                    let t = frame.mul(&factor, &a[col * n + c])?;
                    a[r * n + c] = sub_elements(&frame, &a[r * n + c], &t)?;
                    let t2 = frame.mul(&factor, &inv[col * n + c])?;
                    inv[r * n + c] = sub_elements(&frame, &inv[r * n + c], &t2)?;
                }
            }
        }
        GradedMap::new(
            self.semiframe.clone(),
            inv_src,
            self.src.clone(),
            inv,
        )
    }

    pub fn equals_mod_level(&self, other: &GradedMap, level: usize) -> bool {
        if self.entries.len() != other.entries.len() {
            return false;
        }
        self.entries.iter().zip(&other.entries).all(|(a, b)| {
            let l = level.min(a.v_part.len()).min(b.v_part.len());
            a.degree == b.degree
                && a.v_part.truncate(l) == b.v_part.truncate(l)
                && a.j_part == b.j_part
        })
    }

    pub fn truncate_level(&self, level: usize) -> Result<GradedMap> {
        let sf = truncate_semiframe(self.semiframe.frame(), level)?;
        let entries = self
            .entries
            .iter()
            .map(|e| sf.truncate_element(e))
            .collect();
        GradedMap::new(sf, self.src.clone(), self.dst.clone(), entries)
    }
}

fn sub_elements(frame: &Arc<Frame>, a: &FrameElement, b: &FrameElement) -> Result<FrameElement> {
    let neg = FrameElement {
        degree: b.degree,
        v_part: b.v_part.neg(),
        j_part: b.j_part.as_ref().map(|j| j.neg()),
    };
    frame.add(a, &neg)
}

/// Graded Nakayama criterion: a graded map between finite free graded
/// modules is bijective iff its reduction over R is.
pub fn nakayama_check(map: &GradedMap) -> bool {
    if map.src.sorted_degrees() != map.dst.sorted_degrees() {
        return false;
    }
    let red = map.reduce();
    red.is_invertible()
}

/// A compatible system of truncated graded modules with transition maps
/// theta_i from level i+1 to level i.
#[derive(Clone, Debug)]
pub struct TruncationTower {
    pub frame: Arc<Frame>,
    /// Levels 1..=n with their generator degree lists.
    pub modules: Vec<GradedModule>,
    /// transitions[i]: module at level i+2 -> module at level i+1, recorded
    /// at level i+1.
    pub transitions: Vec<GradedMap>,
}

/// Reconstruct the inverse-limit module: checks that every transition
/// becomes an isomorphism after base change (Nakayama at the lower level)
/// and returns the full-precision graded module together with compatible
/// trivializations psi_i: N/V^i -> M^i.
pub fn tower_reconstruct(tower: &TruncationTower) -> Result<(GradedModule, Vec<GradedMap>)> {
    let n = tower.modules.len();
    if n == 0 {
        return Error::invalid("empty tower");
    }
    if tower.transitions.len() + 1 != n {
        return Error::invalid("tower needs one transition per consecutive pair");
    }
    let base_degrees = tower.modules[0].sorted_degrees();
    for (i, m) in tower.modules.iter().enumerate() {
        if m.sorted_degrees() != base_degrees {
            return Err(Error::InconsistentTower(format!(
                "graded rank jump at level {}",
                i + 1
            )));
        }
    }
    for (i, th) in tower.transitions.iter().enumerate() {
        if !nakayama_check(th) {
            return Err(Error::InconsistentTower(format!(
                "transition at level {} is not an isomorphism after base change",
                i + 1
            )));
        }
    }
    // trivializations: psi_1 = id; psi_{i+1} = lift of theta_i^{-1} psi_i
    let limit = GradedModule::new(tower.modules[0].degrees.clone());
    let mut trivs: Vec<GradedMap> = Vec::with_capacity(n);
    let sf1 = truncate_semiframe(&tower.frame, 1)?;
    trivs.push(GradedMap::identity(&sf1, &tower.modules[0]));
    for i in 0..n - 1 {
        let level = i + 2;
        let sf = truncate_semiframe(&tower.frame, level)?;
        let theta = &tower.transitions[i];
        // theta^{-1} at its own level, composed with psi_i, then lifted by
        // zero-extension of the Witt parts to the next level
        let prev = &trivs[i];
        let theta_inv = theta.graded_inverse()?;
        let planned = theta_inv.compose(&prev.truncate_level(theta_inv.semiframe.level())?)?;
        let lifted_entries: Vec<FrameElement> = planned
            .entries
            .iter()
            .map(|e| zero_extend(&tower.frame, e, level))
            .collect();
        let psi = GradedMap::new(
            sf,
            limit.clone(),
            tower.modules[i + 1].clone(),
            lifted_entries,
        )?;
        // verify compatibility: theta o psi_{i+1} == psi_i at level i+1
        let down = theta.compose(&psi.truncate_level(theta.semiframe.level())?)?;
        if !down.equals_mod_level(prev, i + 1) {
            return Err(Error::InconsistentTower(format!(
                "trivialization does not descend at level {}",
                i + 1
            )));
        }
        trivs.push(psi);
    }
    Ok((limit, trivs))
}

fn zero_extend(frame: &Arc<Frame>, e: &FrameElement, level: usize) -> FrameElement {
    // set-theoretic lift: pad Witt coordinates with zeros up to `level`
    let base = frame.witt_base();
    let mut coords = e.v_part.coords().to_vec();
    while coords.len() < level {
        coords.push(base.zero());
    }
    FrameElement {
        degree: e.degree,
        v_part: Witt::new(base.clone(), coords).expect("same ring"),
        j_part: e.j_part.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::BaseRing;
    use rand::Rng;
    use rand::SeedableRng;

    fn random_graded_auto<R: rand::Rng>(
        sf: &SemiFrame,
        module: &GradedModule,
        rng: &mut R,
    ) -> GradedMap {
        // product of elementary graded transformations: always invertible
        let frame = sf.frame().clone();
        let n = module.rank();
        let mut m = GradedMap::identity(sf, module);
        for _ in 0..3 * n {
            let i = rng.gen_range(0..n);
            let j = rng.gen_range(0..n);
            if i == j {
                // unit scaling
                let u = Witt::random_unit(frame.witt_base(), sf.level(), rng);
                let mut e = GradedMap::identity(sf, module);
                e.entries[i * n + i] = FrameElement {
                    degree: 0,
                    v_part: u,
                    j_part: None,
                };
                m = e.compose(&m).unwrap();
            } else {
                let d = module.degrees[j] - module.degrees[i];
                let x = sf.random_element(d, rng);
                let mut e = GradedMap::identity(sf, module);
                e.entries[i * n + j] = x;
                m = e.compose(&m).unwrap();
            }
        }
        m
    }

    #[test]
    fn nakayama_matches_constructed_invertibility() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(15);
        let f4 = BaseRing::f4();
        let frame = Frame::witt(&f4, 3).unwrap();
        let sf = truncate_semiframe(&frame, 3).unwrap();
        let module = GradedModule::new(vec![0, 0, 1]);
        for _ in 0..20 {
            let a = random_graded_auto(&sf, &module, &mut rng);
            assert!(nakayama_check(&a));
            let inv = a.graded_inverse().unwrap();
            let prod = a.compose(&inv).unwrap();
            assert!(prod.equals_mod_level(&GradedMap::identity(&sf, &module), 3));
        }
        // identity map -> true
        assert!(nakayama_check(&GradedMap::identity(&sf, &module)));
        // multiplication by t on a degree-shifted module -> false
        let src = GradedModule::new(vec![1]);
        let dst = GradedModule::new(vec![0]);
        let tmul = GradedMap::new(
            sf.clone(),
            src,
            dst,
            vec![sf.random_element(1, &mut rng)],
        )
        .unwrap();
        assert!(!nakayama_check(&tmul));
    }

    #[test]
    fn tower_roundtrip_and_rank_jump() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(33);
        let f4 = BaseRing::f4();
        let frame = Frame::witt(&f4, 3).unwrap();
        let degrees = vec![0, 0, 1];
        // random tower: start from the constant tower and twist each level
        let mut modules = Vec::new();
        let mut transitions = Vec::new();
        for level in 1..=3usize {
            modules.push(GradedModule::new(degrees.clone()));
            if level < 3 {
                let sf = truncate_semiframe(&frame, level).unwrap();
                let m = GradedModule::new(degrees.clone());
                transitions.push(random_graded_auto(&sf, &m, &mut rng));
            }
        }
        let tower = TruncationTower {
            frame: frame.clone(),
            modules,
            transitions,
        };
        let (limit, trivs) = tower_reconstruct(&tower).unwrap();
        assert_eq!(limit.sorted_degrees(), vec![0, 0, 1]);
        assert_eq!(trivs.len(), 3);
        // rank jump is rejected
        let bad = TruncationTower {
            frame: frame.clone(),
            modules: vec![
                GradedModule::new(vec![0, 1]),
                GradedModule::new(vec![0, 0]),
            ],
            transitions: vec![{
                let sf = truncate_semiframe(&frame, 1).unwrap();
                GradedMap::identity(&sf, &GradedModule::new(vec![0, 1]))
            }],
        };
        assert!(matches!(
            tower_reconstruct(&bad),
            Err(Error::InconsistentTower(_))
        ));
    }
}
