//! Frames and PD-thickenings.
//!
//! A frame at session precision m has degree-0 carrier W_m(R); positive
//! degrees carry I(R) (stored through the v-preimage, so sigma is exact) plus
//! a J-component in the relative case; negative degrees are identified with
//! the degree-0 carrier through tau. All statements about frame arithmetic
//! are modulo v^m: when mixed-characteristic Frobenii shorten Witt vectors,
//! binary operations align to the shorter length.

mod graded;

pub use graded::{
    nakayama_check, tower_reconstruct, GradedMap, GradedModule, SemiFrame, TruncationTower,
};

use crate::error::{Error, Result};
use crate::rings::{coordinate_section, BaseRing, RingElement, RingHom, Witt};
use std::sync::Arc;

/// Divided-power rule on the kernel of a PD-thickening.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PdRule {
    /// gamma_k = 0 for k >= 2 (square-zero kernels).
    SquareZero,
    /// The canonical divided powers on p-multiples: gamma_k(p z) = (p^k/k!) z^k.
    CanonicalPw,
}

/// A surjection B -> A of base rings whose kernel carries divided powers.
#[derive(Clone)]
pub struct PDThickening {
    b: Arc<BaseRing>,
    a: Arc<BaseRing>,
    proj: RingHom,
    rule: PdRule,
}

impl std::fmt::Debug for PDThickening {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "PD({} -> {}, {:?})", self.b.name(), self.a.name(), self.rule)
    }
}

impl PDThickening {
    pub fn new(proj: RingHom, rule: PdRule) -> Result<Self> {
        let b = proj.src().clone();
        let a = proj.dst().clone();
        match rule {
            PdRule::SquareZero => {
                // verify J^2 = 0 on a generating set: differences of basis
                // monomials killed by the projection
                let gens = kernel_generators(&b, &proj)?;
                for x in &gens {
                    for y in &gens {
                        if !x.mul(y).is_zero() {
                            return Error::invalid(
                                "square-zero rule on a kernel with nonzero products",
                            );
                        }
                    }
                }
            }
            PdRule::CanonicalPw => {
                // kernel must consist of p-multiples: check generators
                let gens = kernel_generators(&b, &proj)?;
                for x in &gens {
                    if !x.divisible_by_p(1) {
                        return Error::invalid("canonical-PD rule needs J inside pB");
                    }
                }
            }
        }
        Ok(PDThickening { b, a, proj, rule })
    }

    /// The canonical thickening W_e(k)-style: reduce the characteristic
    /// exponent of `b` down to `target_exp` (e.g. W_m(k) -> k).
    pub fn char_reduction(b: &Arc<BaseRing>, target_exp: u32) -> Result<Self> {
        let proj = RingHom::reduce_char(b, target_exp)?;
        PDThickening::new(proj, PdRule::CanonicalPw)
    }

    /// k[eps] -> k style: kill the square-zero variables.
    pub fn square_zero_augmentation(b: &Arc<BaseRing>) -> Result<Self> {
        let base = match b.descriptor() {
            crate::rings::RingDescriptor::SquareZero { base, .. } => base.as_ref().clone(),
            _ => return Error::invalid("square_zero_augmentation expects a square-zero ring"),
        };
        let a = BaseRing::from_descriptor(&base)?;
        let images = vec![a.zero(); b.var_count()];
        let proj = RingHom::new(b.clone(), a.clone(), a.gen_x(), images)?;
        PDThickening::new(proj, PdRule::SquareZero)
    }

    /// The trivial thickening R -> R.
    pub fn trivial(r: &Arc<BaseRing>) -> Self {
        PDThickening {
            b: r.clone(),
            a: r.clone(),
            proj: RingHom::identity(r),
            rule: PdRule::SquareZero,
        }
    }

    pub fn b(&self) -> &Arc<BaseRing> {
        &self.b
    }

    pub fn a(&self) -> &Arc<BaseRing> {
        &self.a
    }

    pub fn proj(&self) -> &RingHom {
        &self.proj
    }

    pub fn rule(&self) -> PdRule {
        self.rule
    }

    pub fn is_trivial(&self) -> bool {
        self.b.as_ref() == self.a.as_ref()
    }

    /// Kernel membership.
    pub fn in_kernel(&self, x: &RingElement) -> bool {
        self.proj.apply(x).is_zero()
    }

    /// Coordinate-wise section of the projection (a set-theoretic lift).
    pub fn lift(&self, x: &RingElement) -> Result<RingElement> {
        coordinate_section(&self.b, x)
    }

    pub fn lift_witt(&self, w: &Witt) -> Result<Witt> {
        let coords = w
            .coords()
            .iter()
            .map(|c| self.lift(c))
            .collect::<Result<Vec<_>>>()?;
        Witt::new(self.b.clone(), coords)
    }

    pub fn project_witt(&self, w: &Witt) -> Witt {
        self.proj.apply_witt(w)
    }

    /// Divided power gamma_k on the kernel.
    pub fn gamma(&self, k: u32, x: &RingElement) -> Result<RingElement> {
        if !self.in_kernel(x) {
            return Err(Error::NotInIdeal(format!("{x} is not in the PD kernel")));
        }
        match (k, self.rule) {
            (0, _) => Ok(self.b.one()),
            (1, _) => Ok(x.clone()),
            (_, PdRule::SquareZero) => Ok(self.b.zero()),
            (k, PdRule::CanonicalPw) => {
                // gamma_k(pz) = (p^k / k!) z^k, with p^k/k! = p^(k - v) * u^{-1},
                // v = v_p(k!), u the unit part of k!
                let z = x.exact_div_p(1)?;
                let p = self.b.prime();
                let (v, unit) = factorial_p_parts(k as u64, p, self.b.modulus());
                if k as u64 <= v {
                    return Error::invalid("v_p(k!) >= k cannot happen");
                }
                let e = k - v as u32;
                let uinv = self.b.from_int(unit as i64).inv()?;
                Ok(z.pow(k as u64).mul(&uinv).mul_p(e))
            }
        }
    }
}

fn kernel_generators(b: &Arc<BaseRing>, proj: &RingHom) -> Result<Vec<RingElement>> {
    // basis elements of B whose projection is not recovered by the section:
    // desk-scale generating set = {e - lift(proj(e))} over the basis
    let mut gens = Vec::new();
    for i in 0..b.dim() {
        let mut coords = vec![0u64; b.dim()];
        coords[i] = 1;
        let e = b.element_from_coords(coords)?;
        let img = proj.apply(&e);
        let back = coordinate_section(b, &img)?;
        let diff = e.sub(&back);
        if !diff.is_zero() {
            gens.push(diff);
        }
        // and p times a basis element generates p-parts of the kernel
        let pe = e.mul_p(1);
        if proj.apply(&pe).is_zero() && !pe.is_zero() {
            gens.push(pe);
        }
    }
    Ok(gens)
}

/// (v_p(n!), unit part of n! mod modulus).
fn factorial_p_parts(n: u64, p: u64, modulus: u64) -> (u64, u64) {
    let mut v = 0u64;
    let mut unit = 1u64;
    for mut j in 1..=n {
        while j % p == 0 {
            v += 1;
            j /= p;
        }
        unit = (unit as u128 * j as u128 % modulus as u128) as u64;
    }
    (v, unit)
}

/// Zink's logarithm: W(J) -> prod J in the divided-power coordinates.
/// `xi` is the coordinate list of a Witt vector all of whose coordinates lie
/// in the kernel of the thickening.
///
/// log(xi)_n = sum_{i<=n} c_{n-i} gamma_{p^{n-i}}(xi_i), c_k = (p^k)!/p^k.
pub fn pd_log(t: &PDThickening, xi: &[RingElement]) -> Result<Vec<RingElement>> {
    for x in xi {
        if !t.in_kernel(x) {
            return Err(Error::NotInIdeal(format!("pd_log coordinate {x}")));
        }
    }
    let m = xi.len();
    let mut out = Vec::with_capacity(m);
    for n in 0..m {
        let mut acc = t.b().zero();
        for i in 0..=n {
            acc = acc.add(&log_term(t, (n - i) as u32, &xi[i])?);
        }
        out.push(acc);
    }
    Ok(out)
}

/// c_k gamma_{p^k}(x) with c_k = (p^k)!/p^k.
fn log_term(t: &PDThickening, k: u32, x: &RingElement) -> Result<RingElement> {
    if k == 0 {
        return Ok(x.clone());
    }
    let p = t.b().prime();
    let pk = p.pow(k);
    let gamma = t.gamma(pk as u32, x)?;
    // c_k = p^(v - k) * unit, v = v_p((p^k)!)
    let (v, unit) = factorial_p_parts(pk, p, t.b().modulus());
    debug_assert!(v >= k as u64);
    let c = t.b().from_int(unit as i64).mul_p((v - k as u64) as u32);
    Ok(c.mul(&gamma))
}

/// Inverse of [`pd_log`]: recover the Witt coordinates from the logarithmic
/// ones by triangular back-substitution (c_0 = 1).
pub fn pd_log_inv(t: &PDThickening, logs: &[RingElement]) -> Result<Vec<RingElement>> {
    let m = logs.len();
    let mut xi: Vec<RingElement> = Vec::with_capacity(m);
    for n in 0..m {
        let mut acc = logs[n].clone();
        for i in 0..n {
            acc = acc.sub(&log_term(t, (n - i) as u32, &xi[i])?);
        }
        if !t.in_kernel(&acc) {
            return Err(Error::NotInIdeal(format!(
                "pd_log_inv: logarithmic coordinate {n} leaves the kernel"
            )));
        }
        xi.push(acc);
    }
    Ok(xi)
}

/// The element log^{-1}[x, 0, 0, ...] of W_len(B).
pub fn log_inv_concentrated(t: &PDThickening, x: &RingElement, len: usize) -> Result<Witt> {
    let mut logs = vec![t.b().zero(); len];
    if len > 0 {
        logs[0] = x.clone();
    }
    let coords = pd_log_inv(t, &logs)?;
    Witt::new(t.b().clone(), coords)
}

// ---------------------------------------------------------------------------
// Frames
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub enum FrameKind {
    /// The Witt frame for R.
    Witt { ring: Arc<BaseRing> },
    /// The relative Witt frame for a PD-thickening B -> A.
    RelativeWitt { thickening: PDThickening },
}

/// A frame at a fixed session precision.
#[derive(Clone, Debug)]
pub struct Frame {
    kind: FrameKind,
    precision: usize,
}

/// An element of a frame, tagged by its degree.
///
/// Degree 0 stores a Witt vector of the session length. Degrees n >= 1 store
/// the v-preimage s (so the element is v(s), possibly plus a J-component in
/// the relative case); sigma on these is exact. Degrees -n <= -1 store the
/// tau-image, which determines the element.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameElement {
    pub degree: i32,
    pub v_part: Witt,
    /// J-component for positive degrees of a relative frame; `None` elsewhere.
    pub j_part: Option<RingElement>,
}

impl Frame {
    /// The Witt frame for R at precision m. Requires p nilpotent in R, which
    /// holds for every [`BaseRing`].
    pub fn witt(ring: &Arc<BaseRing>, precision: usize) -> Result<Arc<Frame>> {
        if precision == 0 {
            return Error::invalid("frame precision must be >= 1");
        }
        Ok(Arc::new(Frame {
            kind: FrameKind::Witt { ring: ring.clone() },
            precision,
        }))
    }

    /// The relative Witt frame for B -> A at precision m.
    pub fn relative_witt(t: &PDThickening, precision: usize) -> Result<Arc<Frame>> {
        if precision == 0 {
            return Error::invalid("frame precision must be >= 1");
        }
        Ok(Arc::new(Frame {
            kind: FrameKind::RelativeWitt {
                thickening: t.clone(),
            },
            precision,
        }))
    }

    pub fn precision(&self) -> usize {
        self.precision
    }

    pub fn kind(&self) -> &FrameKind {
        &self.kind
    }

    /// The degree-0 coefficient ring (base of W_m).
    pub fn witt_base(&self) -> &Arc<BaseRing> {
        match &self.kind {
            FrameKind::Witt { ring } => ring,
            FrameKind::RelativeWitt { thickening } => thickening.b(),
        }
    }

    /// The ring the frame is a frame *for*: R, resp. A.
    pub fn base_quotient(&self) -> &Arc<BaseRing> {
        match &self.kind {
            FrameKind::Witt { ring } => ring,
            FrameKind::RelativeWitt { thickening } => thickening.a(),
        }
    }

    pub fn thickening(&self) -> Option<&PDThickening> {
        match &self.kind {
            FrameKind::Witt { .. } => None,
            FrameKind::RelativeWitt { thickening } => Some(thickening),
        }
    }

    pub fn is_relative(&self) -> bool {
        matches!(self.kind, FrameKind::RelativeWitt { .. })
    }

    pub fn zero(self: &Arc<Self>, degree: i32) -> FrameElement {
        FrameElement {
            degree,
            v_part: Witt::zero(self.witt_base(), self.precision),
            j_part: self.j_zero(degree),
        }
    }

    fn j_zero(&self, degree: i32) -> Option<RingElement> {
        if degree >= 1 && self.is_relative() {
            Some(self.witt_base().zero())
        } else {
            None
        }
    }

    /// Degree-0 element from a Witt vector.
    pub fn deg0(self: &Arc<Self>, w: Witt) -> FrameElement {
        assert!(w.ring() == self.witt_base().as_ref());
        FrameElement {
            degree: 0,
            v_part: w,
            j_part: None,
        }
    }

    /// Positive-degree element v(s) (+ J-component in the relative case).
    pub fn pos(self: &Arc<Self>, degree: i32, s: Witt, j: Option<RingElement>) -> Result<FrameElement> {
        if degree < 1 {
            return Error::invalid("pos expects degree >= 1");
        }
        if self.is_relative() {
            let j = j.unwrap_or_else(|| self.witt_base().zero());
            if !self.thickening().unwrap().in_kernel(&j) {
                return Err(Error::NotInIdeal("J-component outside the kernel".into()));
            }
            Ok(FrameElement {
                degree,
                v_part: s,
                j_part: Some(j),
            })
        } else {
            if j.is_some() {
                return Error::invalid("Witt frame has no J-component");
            }
            Ok(FrameElement {
                degree,
                v_part: s,
                j_part: None,
            })
        }
    }

    /// Negative-degree element with the given tau-image.
    pub fn neg(self: &Arc<Self>, degree: i32, tau_value: Witt) -> Result<FrameElement> {
        if degree > -1 {
            return Error::invalid("neg expects degree <= -1");
        }
        Ok(FrameElement {
            degree,
            v_part: tau_value,
            j_part: None,
        })
    }

    /// The distinguished element t in degree -1 (tau(t) = 1).
    pub fn t(self: &Arc<Self>) -> FrameElement {
        FrameElement {
            degree: -1,
            v_part: Witt::one(self.witt_base(), self.precision),
            j_part: None,
        }
    }

    /// tau, landing in degree 0 (a Witt vector of the session length).
    pub fn tau(&self, x: &FrameElement) -> Result<Witt> {
        let m = self.precision;
        match x.degree.cmp(&0) {
            std::cmp::Ordering::Equal | std::cmp::Ordering::Less => Ok(x.v_part.clone()),
            std::cmp::Ordering::Greater => {
                // t-chain down to degree 0: multiply the v-part by p^(deg-1),
                // then t_0
                let scaled = x.v_part.mul_pk((x.degree - 1) as u32);
                let vs = scaled.verschiebung().truncate(m);
                match (&self.kind, &x.j_part) {
                    (FrameKind::Witt { .. }, _) => Ok(vs),
                    (FrameKind::RelativeWitt { thickening }, Some(j)) => {
                        let lg = log_inv_concentrated(thickening, j, m)?;
                        Ok(vs.add(&lg))
                    }
                    (FrameKind::RelativeWitt { .. }, None) => Ok(vs),
                }
            }
        }
    }

    /// sigma, landing in degree 0. Exact on positive degrees; on degree 0 and
    /// negative degrees it applies the Witt Frobenius (which shortens the
    /// length over mixed-characteristic bases).
    pub fn sigma(&self, x: &FrameElement) -> Result<Witt> {
        if x.degree >= 1 {
            // sigma_n(v(s), j) = s; the J-component is dropped
            Ok(x.v_part.clone())
        } else if x.degree == 0 {
            x.v_part.frobenius()
        } else {
            // sigma(t^n y) = p^n f(y)
            let f = x.v_part.frobenius()?;
            Ok(f.mul_pk((-x.degree) as u32))
        }
    }

    /// Graded multiplication.
    pub fn mul(self: &Arc<Self>, x: &FrameElement, y: &FrameElement) -> Result<FrameElement> {
        let deg = x.degree + y.degree;
        // normalize: handle negative-degree factors by tau-value products and
        // t-chains; products of mixed sign reduce through the t-maps.
        match (x.degree.signum(), y.degree.signum()) {
            (0, 0) => Ok(FrameElement {
                degree: 0,
                v_part: aligned_mul(&x.v_part, &y.v_part),
                j_part: None,
            }),
            (0, 1) | (1, 0) => {
                let (a, b) = if x.degree == 0 { (x, y) } else { (y, x) };
                // a in degree 0: a * (v(s), j) = (v(f(a) s), w0(a) j)
                let fa = a.v_part.frobenius()?;
                let s = aligned_mul(&fa, &b.v_part);
                let j = b
                    .j_part
                    .as_ref()
                    .map(|j| j.mul(&a.v_part.w0()));
                Ok(FrameElement {
                    degree: deg,
                    v_part: s,
                    j_part: j,
                })
            }
            (1, 1) => {
                // (v(s), j)(v(s'), j') = (v(s s'), j j')
                let s = aligned_mul(&x.v_part, &y.v_part);
                let j = match (&x.j_part, &y.j_part) {
                    (Some(a), Some(b)) => Some(a.mul(b)),
                    _ => self.j_zero(deg),
                };
                Ok(FrameElement {
                    degree: deg,
                    v_part: s,
                    j_part: j,
                })
            }
            (-1, -1) => Ok(FrameElement {
                degree: deg,
                v_part: aligned_mul(&x.v_part, &y.v_part),
                j_part: None,
            }),
            (-1, 0) | (0, -1) => Ok(FrameElement {
                degree: deg,
                v_part: aligned_mul(&x.v_part, &y.v_part),
                j_part: None,
            }),
            (-1, 1) | (1, -1) => {
                let (neg, pos) = if x.degree < 0 { (x, y) } else { (y, x) };
                // t^k * xi_n: apply the t-chain k times (k <= n keeps degree
                // >= 0; beyond that the result is negative-degree with the
                // same tau-value)
                let k = (-neg.degree) as usize;
                let n = pos.degree as usize;
                if k <= n {
                    let stepped = self.t_chain(pos, k)?;
                    self.mul(
                        &self.deg0(neg.v_part.clone()),
                        &stepped,
                    )
                } else {
                    // degree below zero: tau determines the element
                    let tau_pos = self.tau(pos)?;
                    let v = aligned_mul(&neg.v_part, &tau_pos);
                    Ok(FrameElement {
                        degree: deg,
                        v_part: v,
                        j_part: None,
                    })
                }
            }
            _ => unreachable!(),
        }
    }

    /// Apply the t-map k times to a nonnegative-degree element.
    fn t_chain(self: &Arc<Self>, x: &FrameElement, k: usize) -> Result<FrameElement> {
        let mut cur = x.clone();
        for _ in 0..k {
            cur = self.t_step(&cur)?;
        }
        Ok(cur)
    }

    /// t_{n-1}: S_n -> S_{n-1}: multiplication by p on the v-part for n >= 2,
    /// t_0 for n = 1.
    fn t_step(self: &Arc<Self>, x: &FrameElement) -> Result<FrameElement> {
        match x.degree {
            d if d >= 2 => Ok(FrameElement {
                degree: d - 1,
                v_part: x.v_part.mul_pk(1),
                j_part: x.j_part.clone(),
            }),
            1 => Ok(self.deg0(self.tau(x)?)),
            0 => Ok(FrameElement {
                degree: -1,
                v_part: x.v_part.clone(),
                j_part: None,
            }),
            d => Ok(FrameElement {
                degree: d - 1,
                v_part: x.v_part.clone(),
                j_part: None,
            }),
        }
    }

    pub fn add(&self, x: &FrameElement, y: &FrameElement) -> Result<FrameElement> {
        if x.degree != y.degree {
            return Err(Error::Mismatch("adding different degrees".into()));
        }
        let j = match (&x.j_part, &y.j_part) {
            (Some(a), Some(b)) => Some(a.add(b)),
            (Some(a), None) | (None, Some(a)) => Some(a.clone()),
            (None, None) => None,
        };
        Ok(FrameElement {
            degree: x.degree,
            v_part: aligned_add(&x.v_part, &y.v_part),
            j_part: j,
        })
    }

    /// Structural checks of the frame axioms at desk scale: tau(t) = 1,
    /// sigma(t) = p, sigma_n(v(s)) = s on samples, sigma_0 lifts the p-power
    /// Frobenius mod p, p nilpotent in S_0, and multiplicativity of sigma and
    /// tau on random pairs.
    pub fn axiom_report<R: rand::Rng>(self: &Arc<Self>, rng: &mut R) -> Vec<(String, bool)> {
        let mut out = Vec::new();
        let m = self.precision;
        let base = self.witt_base();
        let t = self.t();
        out.push((
            "tau(t) = 1".into(),
            self.tau(&t).map(|v| v == Witt::one(base, m)).unwrap_or(false),
        ));
        out.push((
            "sigma(t) = p".into(),
            self.sigma(&t)
                .map(|v| {
                    let len = v.len();
                    v == Witt::from_int(base, base.prime() as i64, len)
                })
                .unwrap_or(false),
        ));
        // p in Rad(S_0): p is nilpotent in W_m of a p-nilpotent ring
        let mut pw = Witt::from_int(base, base.prime() as i64, m);
        let mut nilpotent = false;
        for _ in 0..(m as u32 + base.char_exp()) * 2 {
            if pw.is_zero() {
                nilpotent = true;
                break;
            }
            pw = pw.mul(&Witt::from_int(base, base.prime() as i64, m));
        }
        out.push(("p nilpotent in S_0".into(), nilpotent));
        // sigma_1(v(s)) = s on samples
        let mut ok = true;
        for _ in 0..10 {
            let s = Witt::random(base, m, rng);
            let el = self.pos(1, s.clone(), self.j_zero(1)).unwrap();
            if self.sigma(&el).map(|x| x != s).unwrap_or(true) {
                ok = false;
            }
        }
        out.push(("sigma_n(v(s)) = s".into(), ok));
        // sigma_0 lifts the p-power map mod p
        let mut ok = true;
        for _ in 0..10 {
            let x = Witt::random(base, m, rng);
            let Ok(fx) = x.frobenius() else {
                ok = false;
                break;
            };
            let lhs = fx.w0();
            let rhs = x.w0().frobenius_p();
            // compare mod p
            if !lhs.sub(&rhs).divisible_by_p(1) {
                ok = false;
            }
        }
        out.push(("sigma_0 lifts Frobenius mod p".into(), ok));
        // multiplicativity of tau and sigma on degree pairs (0,1) and (1,1)
        let mut tau_ok = true;
        let mut sigma_ok = true;
        for _ in 0..10 {
            let x = self.deg0(Witt::random(base, m, rng));
            let s = Witt::random(base, m, rng);
            let y = self.pos(1, s, self.j_zero(1)).unwrap();
            if let Ok(xy) = self.mul(&x, &y) {
                let t1 = self.tau(&xy);
                let t2 = self.tau(&x).and_then(|a| self.tau(&y).map(|b| aligned_mul(&a, &b)));
                match (t1, t2) {
                    (Ok(a), Ok(b)) => {
                        let l = a.len().min(b.len());
                        if a.truncate(l) != b.truncate(l) {
                            tau_ok = false;
                        }
                    }
                    _ => tau_ok = false,
                }
                let s1 = self.sigma(&xy);
                let s2 = self
                    .sigma(&x)
                    .and_then(|a| self.sigma(&y).map(|b| aligned_mul(&a, &b)));
                match (s1, s2) {
                    (Ok(a), Ok(b)) => {
                        let l = a.len().min(b.len());
                        if a.truncate(l) != b.truncate(l) {
                            sigma_ok = false;
                        }
                    }
                    _ => sigma_ok = false,
                }
            }
        }
        out.push(("tau multiplicative".into(), tau_ok));
        out.push(("sigma multiplicative".into(), sigma_ok));
        out
    }
}

pub(crate) fn aligned_mul(a: &Witt, b: &Witt) -> Witt {
    let l = a.len().min(b.len());
    a.truncate(l).mul(&b.truncate(l))
}

pub(crate) fn aligned_add(a: &Witt, b: &Witt) -> Witt {
    let l = a.len().min(b.len());
    a.truncate(l).add(&b.truncate(l))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn pd_log_square_zero_is_identity() {
        let k = BaseRing::f4();
        let b = BaseRing::dual_numbers(k.descriptor()).unwrap();
        let t = PDThickening::square_zero_augmentation(&b).unwrap();
        let eps = b.var(0).unwrap();
        let xi = vec![eps.clone(), b.zero(), eps.mul_int(1)];
        let logs = pd_log(&t, &xi).unwrap();
        assert_eq!(logs, xi);
        assert_eq!(pd_log_inv(&t, &logs).unwrap(), xi);
    }

    #[test]
    fn pd_log_frozen_z8() {
        // p=2, B=Z/8, J=2B canonical: log(2,0,0) = [2, 2, 4]
        let z8 = BaseRing::zpm(2, 3).unwrap();
        let t = PDThickening::char_reduction(&z8, 1).unwrap();
        let xi = vec![z8.from_int(2), z8.zero(), z8.zero()];
        let logs = pd_log(&t, &xi).unwrap();
        assert_eq!(
            logs,
            vec![z8.from_int(2), z8.from_int(2), z8.from_int(4)]
        );
        assert_eq!(pd_log_inv(&t, &logs).unwrap(), xi);
    }

    #[test]
    fn pd_log_additive_and_bijective() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        // canonical kernel
        let z16 = BaseRing::zpm(2, 4).unwrap();
        let t = PDThickening::char_reduction(&z16, 1).unwrap();
        for _ in 0..30 {
            let xi: Vec<_> = (0..4)
                .map(|_| RingElement::random(&z16, &mut rng).mul_p(1))
                .collect();
            let eta: Vec<_> = (0..4)
                .map(|_| RingElement::random(&z16, &mut rng).mul_p(1))
                .collect();
            // log of the Witt sum = componentwise sum of logs
            let wx = Witt::new(z16.clone(), xi.clone()).unwrap();
            let wy = Witt::new(z16.clone(), eta.clone()).unwrap();
            let ws = wx.add(&wy);
            let ls = pd_log(&t, ws.coords()).unwrap();
            let lx = pd_log(&t, &xi).unwrap();
            let ly = pd_log(&t, &eta).unwrap();
            let sum: Vec<_> = lx.iter().zip(&ly).map(|(a, b)| a.add(b)).collect();
            assert_eq!(ls, sum);
            // bijectivity
            assert_eq!(pd_log_inv(&t, &ls).unwrap(), ws.coords());
        }
    }

    #[test]
    fn pd_log_ghost_compatibility() {
        // p^n * log_n = ghost_n for canonical kernels, checked in an integer lift
        let z32 = BaseRing::zpm(2, 5).unwrap();
        let t = PDThickening::char_reduction(&z32, 1).unwrap();
        let xi = vec![z32.from_int(2), z32.from_int(6), z32.from_int(4)];
        let w = Witt::new(z32.clone(), xi.clone()).unwrap();
        let ghost = w.ghost();
        let logs = pd_log(&t, &xi).unwrap();
        for (n, l) in logs.iter().enumerate() {
            assert_eq!(l.mul_p(n as u32), ghost[n], "level {n}");
        }
    }

    #[test]
    fn shift_law_in_log_coordinates() {
        // v^{-1} on W(J) is the left shift of logarithmic coordinates
        let z16 = BaseRing::zpm(2, 4).unwrap();
        let t = PDThickening::char_reduction(&z16, 1).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let xi: Vec<_> = (0..4)
                .map(|_| RingElement::random(&z16, &mut rng).mul_p(1))
                .collect();
            let w = Witt::new(z16.clone(), xi).unwrap();
            let logs = pd_log(&t, w.coords()).unwrap();
            let v = w.verschiebung();
            let logs_v = pd_log(&t, v.coords()).unwrap();
            // log(v(w)) = [0, logs...]: right shift, so v^{-1} is the left shift
            assert!(logs_v[0].is_zero());
            assert_eq!(&logs_v[1..], &logs[..]);
        }
    }

    #[test]
    fn witt_frame_axioms_and_t_maps() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let f4 = BaseRing::f4();
        let frame = Frame::witt(&f4, 3).unwrap();
        for (name, ok) in frame.axiom_report(&mut rng) {
            assert!(ok, "axiom failed: {name}");
        }
        // degree-1 * degree-1 lands in degree 2 with v(a)v(b) = v(ab)
        let a = Witt::random(&f4, 3, &mut rng);
        let b = Witt::random(&f4, 3, &mut rng);
        let ea = frame.pos(1, a.clone(), None).unwrap();
        let eb = frame.pos(1, b.clone(), None).unwrap();
        let prod = frame.mul(&ea, &eb).unwrap();
        assert_eq!(prod.degree, 2);
        assert_eq!(prod.v_part, a.mul(&b));
        // and tau of the product is p * v(ab) truncated
        let tau = frame.tau(&prod).unwrap();
        assert_eq!(tau, a.mul(&b).mul_pk(1).verschiebung().truncate(3));
    }

    #[test]
    fn relative_frame_axioms() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        let k = BaseRing::f4();
        let b = BaseRing::dual_numbers(k.descriptor()).unwrap();
        let t = PDThickening::square_zero_augmentation(&b).unwrap();
        let frame = Frame::relative_witt(&t, 3).unwrap();
        for (name, ok) in frame.axiom_report(&mut rng) {
            assert!(ok, "axiom failed: {name}");
        }
        // t_0(0, x) has Witt coordinates (x, 0, ..., 0) for square-zero J
        let eps = b.var(0).unwrap();
        let el = frame
            .pos(1, Witt::zero(&b, 3), Some(eps.clone()))
            .unwrap();
        let tau = frame.tau(&el).unwrap();
        assert_eq!(
            tau,
            Witt::new(b.clone(), vec![eps.clone(), b.zero(), b.zero()]).unwrap()
        );
        // sigma drops the J-component
        let sig = frame.sigma(&el).unwrap();
        assert!(sig.is_zero());
        // t_1 multiplies the I(B)-factor by p and keeps J
        let s = Witt::random(&b, 3, &mut rng);
        let el2 = frame.pos(2, s.clone(), Some(eps.clone())).unwrap();
        let stepped = frame.t_step(&el2).unwrap();
        assert_eq!(stepped.degree, 1);
        assert_eq!(stepped.v_part, s.mul_pk(1));
        assert_eq!(stepped.j_part.as_ref().unwrap(), &eps);
    }
}
