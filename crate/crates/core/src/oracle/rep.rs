//! The geometric (Tits) representation of a Coxeter group.
//!
//! Simple roots `α_i` form the standard basis; the form is
//! `B(α_i, α_j) = -cos(π/m_ij)`, with `-1` for infinite labels. Generator
//! `i` acts by `v ↦ v - 2 B(α_i, v) α_i`.

use std::collections::{HashSet, VecDeque};

use serde::Serialize;

use super::cyclotomic::DEFAULT_MAX_MODULUS;
use super::matrix::Matrix;
use super::scalar::RepScalar;
use super::OracleError;
use crate::classify::{self, spherical_components};
use crate::diagram::{CoxeterMatrix, Label, VertexSet};

/// Default number of matrix powers tried before an order is reported unknown.
pub const DEFAULT_BOUND: u32 = 10_000;
/// Default element cap for [`GeometricRep::enumerate_group`].
pub const DEFAULT_ENUMERATION_CAP: usize = 2000;

/// Entries beyond this magnitude (under any embedding) stop an order search.
const BLOWUP: f64 = 1e12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum ProductOrder {
    Finite(u32),
    Infinite,
    Unknown,
}

impl ProductOrder {
    /// The corresponding Coxeter label, if this is a valid one (`>= 2` or `inf`).
    pub fn label(self) -> Option<Label> {
        match self {
            ProductOrder::Finite(k) if k >= 2 => Some(Label::Finite(k)),
            ProductOrder::Infinite => Some(Label::Infinity),
            _ => None,
        }
    }
}

impl std::fmt::Display for ProductOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ProductOrder::Finite(k) => write!(f, "{k}"),
            ProductOrder::Infinite => write!(f, "inf"),
            ProductOrder::Unknown => write!(f, "unknown"),
        }
    }
}

/// A group element as a matrix, optionally with a word in the generators
/// (positional indices) whose product it is.
#[derive(Clone, Debug)]
pub struct GroupElement<T: RepScalar> {
    pub matrix: Matrix<T>,
    pub word: Option<Vec<usize>>,
}

impl<T: RepScalar> GroupElement<T> {
    pub fn is_identity(&self) -> bool {
        self.matrix.is_identity()
    }

    /// Same element with the word dropped.
    pub fn without_word(mut self) -> Self {
        self.word = None;
        self
    }
}

impl<T: RepScalar> PartialEq for GroupElement<T> {
    fn eq(&self, other: &Self) -> bool {
        self.matrix == other.matrix
    }
}

#[derive(Clone, Debug)]
pub struct GroupEnumeration<T: RepScalar> {
    pub elements: Vec<GroupElement<T>>,
    /// False when the cap was hit before the group closed.
    pub complete: bool,
}

#[derive(Clone, Debug)]
pub struct GeometricRep<T: RepScalar> {
    diagram: CoxeterMatrix,
    field: T::Field,
    gram: Matrix<T>,
    gens: Vec<Matrix<T>>,
    /// Nonzero entries of row `i` of `S_i - I`; the only row where they differ.
    deltas: Vec<Vec<(usize, T)>>,
}

impl<T: RepScalar> GeometricRep<T> {
    pub fn new(m: &CoxeterMatrix) -> Result<Self, OracleError> {
        Self::with_max_modulus(m, DEFAULT_MAX_MODULUS)
    }

    pub fn with_max_modulus(m: &CoxeterMatrix, max_modulus: u32) -> Result<Self, OracleError> {
        let field = T::field_for_labels(&m.finite_labels(), max_modulus)?;
        let n = m.rank();
        let mut gram = Matrix::identity(n);
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let b = match m.label(i, j) {
                    Label::Finite(2) => T::zero(),
                    Label::Finite(k) => T::two_cos_pi_over(&field, k).mul_ref(&T::ratio(-1, 2)),
                    Label::Infinity => T::ratio(-1, 1),
                };
                gram.set(i, j, b);
            }
        }
        let two = T::ratio(-2, 1);
        let mut deltas = Vec::with_capacity(n);
        let mut gens = Vec::with_capacity(n);
        for i in 0..n {
            let row: Vec<(usize, T)> = (0..n)
                .filter_map(|c| {
                    let d = gram.get(i, c).mul_ref(&two);
                    (!d.is_zero_value()).then_some((c, d))
                })
                .collect();
            let mut g = Matrix::<T>::identity(n);
            for (c, d) in &row {
                let v = g.get(i, *c).add_ref(d);
                g.set(i, *c, v);
            }
            gens.push(g);
            deltas.push(row);
        }
        let rep = GeometricRep {
            diagram: m.clone(),
            field,
            gram,
            gens,
            deltas,
        };
        rep.check()?;
        Ok(rep)
    }

    /// Involutions, form invariance and the finite-label relations.
    fn check(&self) -> Result<(), OracleError> {
        let n = self.rank();
        for (i, g) in self.gens.iter().enumerate() {
            if !g.mul(g).is_identity() {
                return Err(OracleError::RepresentationCheck(format!(
                    "generator {} is not an involution",
                    self.diagram.name(i)
                )));
            }
            if !self.preserves_form(g) {
                return Err(OracleError::RepresentationCheck(format!(
                    "generator {} does not preserve the form",
                    self.diagram.name(i)
                )));
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                match self.diagram.label(i, j) {
                    Label::Finite(k) => {
                        if !self.gens[i].mul(&self.gens[j]).pow(u64::from(k)).is_identity() {
                            return Err(OracleError::RepresentationCheck(format!(
                                "relation of order {k} fails for {} {}",
                                self.diagram.name(i),
                                self.diagram.name(j)
                            )));
                        }
                    }
                    Label::Infinity => {
                        if !self.gram.get(i, j).add_ref(&T::one()).is_zero_value() {
                            return Err(OracleError::RepresentationCheck(
                                "infinite label without B = -1".into(),
                            ));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn diagram(&self) -> &CoxeterMatrix {
        &self.diagram
    }

    pub fn field(&self) -> &T::Field {
        &self.field
    }

    pub fn gram(&self) -> &Matrix<T> {
        &self.gram
    }

    pub fn rank(&self) -> usize {
        self.diagram.rank()
    }

    pub fn generator_matrix(&self, i: usize) -> &Matrix<T> {
        &self.gens[i]
    }

    pub fn identity(&self) -> GroupElement<T> {
        GroupElement {
            matrix: Matrix::identity(self.rank()),
            word: Some(Vec::new()),
        }
    }

    pub fn generator(&self, i: usize) -> GroupElement<T> {
        GroupElement {
            matrix: self.gens[i].clone(),
            word: Some(vec![i]),
        }
    }

    pub fn element_from_indices(&self, word: &[usize]) -> GroupElement<T> {
        let mut m = Matrix::identity(self.rank());
        for &i in word {
            m = self.right_mul_gen(&m, i);
        }
        GroupElement {
            matrix: m,
            word: Some(word.to_vec()),
        }
    }

    /// Product of the named generators; the empty word is the identity.
    pub fn element<S: AsRef<str>>(&self, word: &[S]) -> Result<GroupElement<T>, OracleError> {
        let idx = word
            .iter()
            .map(|s| {
                self.diagram
                    .index_of(s.as_ref())
                    .ok_or_else(|| OracleError::UnknownVertex(s.as_ref().to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(self.element_from_indices(&idx))
    }

    /// Whitespace-separated vertex names; `-` alone is the empty word.
    pub fn parse_word(&self, text: &str) -> Result<GroupElement<T>, OracleError> {
        let tokens: Vec<&str> = text.split_whitespace().collect();
        if tokens == ["-"] {
            return Ok(self.identity());
        }
        self.element(&tokens)
    }

    pub fn word_names(&self, g: &GroupElement<T>) -> Option<Vec<String>> {
        g.word
            .as_ref()
            .map(|w| w.iter().map(|&i| self.diagram.name(i).to_string()).collect())
    }

    /// `w · s_i`, touching only the affected entries.
    pub fn right_mul_gen(&self, w: &Matrix<T>, i: usize) -> Matrix<T> {
        let n = self.rank();
        let mut out = w.clone();
        let data = out.data_mut();
        for r in 0..n {
            let wri = w.get(r, i);
            if wri.is_zero_value() {
                continue;
            }
            for (c, d) in &self.deltas[i] {
                data[r * n + c] = data[r * n + c].add_ref(&wri.mul_ref(d));
            }
        }
        out
    }

    /// `s_i · w`.
    pub fn left_mul_gen(&self, i: usize, w: &Matrix<T>) -> Matrix<T> {
        let n = self.rank();
        let mut out = w.clone();
        let mut add = vec![T::zero(); n];
        for (c, d) in &self.deltas[i] {
            for (x, a) in add.iter_mut().enumerate() {
                *a = a.add_ref(&d.mul_ref(w.get(*c, x)));
            }
        }
        let data = out.data_mut();
        for (x, a) in add.into_iter().enumerate() {
            data[i * n + x] = data[i * n + x].add_ref(&a);
        }
        out
    }

    pub fn mul(&self, a: &GroupElement<T>, b: &GroupElement<T>) -> GroupElement<T> {
        let matrix = match &b.word {
            Some(w) if w.len() <= 2 * self.rank() => {
                w.iter().fold(a.matrix.clone(), |m, &i| self.right_mul_gen(&m, i))
            }
            _ => a.matrix.mul(&b.matrix),
        };
        let word = match (&a.word, &b.word) {
            (Some(x), Some(y)) => Some(x.iter().chain(y).copied().collect()),
            _ => None,
        };
        GroupElement { matrix, word }
    }

    pub fn inverse(&self, g: &GroupElement<T>) -> GroupElement<T> {
        match &g.word {
            Some(w) => {
                let rev: Vec<usize> = w.iter().rev().copied().collect();
                self.element_from_indices(&rev)
            }
            None => GroupElement {
                matrix: g.matrix.inverse().expect("group elements are invertible"),
                word: None,
            },
        }
    }

    /// `x g x⁻¹`.
    pub fn conjugate(&self, x: &GroupElement<T>, g: &GroupElement<T>) -> GroupElement<T> {
        self.mul(&self.mul(x, g), &self.inverse(x))
    }

    pub fn bilinear(&self, u: &[T], v: &[T]) -> T {
        let bv = self.gram.apply(v);
        T::dot(u.iter().zip(bv.iter()))
    }

    /// `gᵀ B g = B`.
    pub fn preserves_form(&self, g: &Matrix<T>) -> bool {
        g.transpose().mul(&self.gram).mul(g) == self.gram
    }

    /// Root of `g` when `g` is a reflection: `g² = 1` and `g - 1` has rank one.
    /// Normalized so that its first nonzero coordinate is 1.
    pub fn is_reflection(&self, g: &GroupElement<T>) -> Option<Vec<T>> {
        let col = self.raw_root(g)?;
        let lead = col.iter().find(|x| !x.is_zero_value())?.inverse()?;
        Some(col.iter().map(|x| x.mul_ref(&lead)).collect())
    }

    /// Some nonzero multiple of the root of a reflection. Skips the
    /// normalization, which needs a field inversion.
    fn raw_root(&self, g: &GroupElement<T>) -> Option<Vec<T>> {
        let n = self.rank();
        let d = Matrix::identity(n).sub(&g.matrix);
        if !d.has_rank_one() || !g.matrix.mul(&g.matrix).is_identity() {
            return None;
        }
        (0..n)
            .map(|j| d.column(j))
            .find(|c| c.iter().any(|x| !x.is_zero_value()))
    }

    /// Reflection along a root with `B(β, β) ≠ 0`.
    pub fn reflection_from_root(&self, root: &[T]) -> Option<Matrix<T>> {
        let n = self.rank();
        let b_root = self.gram.apply(root);
        let c = T::dot(root.iter().zip(b_root.iter()));
        let f = c.inverse()?.mul_ref(&T::ratio(2, 1));
        let mut m = Matrix::<T>::identity(n);
        for i in 0..n {
            let ri = root[i].mul_ref(&f);
            for j in 0..n {
                let v = m.get(i, j).sub_ref(&ri.mul_ref(&b_root[j]));
                m.set(i, j, v);
            }
        }
        Some(m)
    }

    /// Order of `r · r2` for reflections `r`, `r2`. Infinite orders are decided
    /// exactly by the dihedral criterion on the roots; finite ones by powering.
    pub fn order_of_product(
        &self,
        r: &GroupElement<T>,
        r2: &GroupElement<T>,
        bound: u32,
    ) -> Result<ProductOrder, OracleError> {
        // The tests below are invariant under rescaling either root.
        let beta = self.raw_root(r).ok_or(OracleError::NotAReflection)?;
        let gamma = self.raw_root(r2).ok_or(OracleError::NotAReflection)?;
        if r.matrix == r2.matrix {
            return Ok(ProductOrder::Finite(1));
        }
        let bg = self.bilinear(&beta, &gamma);
        if bg.is_zero_value() {
            return Ok(ProductOrder::Finite(2));
        }
        let y = self.bilinear(&beta, &beta).mul_ref(&self.bilinear(&gamma, &gamma));
        let d = bg.mul_ref(&bg).sub_ref(&y);
        if d.is_zero_value() || d.approx() > 0.0 {
            return Ok(ProductOrder::Infinite);
        }
        let g = r.matrix.mul(&r2.matrix);
        let mut p = g.clone();
        for k in 1..=bound {
            if p.is_identity() {
                return Ok(ProductOrder::Finite(k));
            }
            p = p.mul(&g);
        }
        Ok(ProductOrder::Unknown)
    }

    /// Order of an arbitrary element. Infinite order is certified when some
    /// power is a nontrivial unipotent matrix, or when a power's trace exceeds
    /// the dimension under some embedding (finite-order matrices have traces
    /// bounded by the dimension in every conjugate).
    pub fn element_order(&self, g: &GroupElement<T>, bound: u32) -> ProductOrder {
        let n = self.rank();
        let id = Matrix::identity(n);
        let limit = n as f64 + 0.5;
        let mut p = g.matrix.clone();
        for k in 1..=bound {
            if p.is_identity() {
                return ProductOrder::Finite(k);
            }
            let tr = p.trace();
            if tr.conjugate_magnitudes().into_iter().any(|x| x > limit) {
                return ProductOrder::Infinite;
            }
            if is_nilpotent(&p.sub(&id)) {
                return ProductOrder::Infinite;
            }
            let blown = (0..n).any(|i| {
                p.row(i)
                    .iter()
                    .any(|x| x.conjugate_magnitudes().into_iter().any(|m| m > BLOWUP))
            });
            if blown {
                return ProductOrder::Unknown;
            }
            p = p.mul(&g.matrix);
        }
        ProductOrder::Unknown
    }

    /// Sign of a root: the sign of its first nonzero coordinate.
    fn is_positive(v: &[T]) -> bool {
        v.iter()
            .find(|x| !x.is_zero_value())
            .is_some_and(|x| x.approx() > 0.0)
    }

    /// `ρ_J`, built by multiplying on the right by any generator of `J` whose
    /// simple root is still sent to a positive root.
    pub fn longest_element(&self, j: VertexSet) -> Result<GroupElement<T>, OracleError> {
        let comps = spherical_components(&self.diagram, j)?.ok_or(OracleError::NotSpherical)?;
        let max_len: u128 = comps.iter().map(|(_, t)| t.group_order()).product();
        let mut w = Matrix::identity(self.rank());
        let mut word = Vec::new();
        'outer: loop {
            for i in j.iter() {
                let col = w.column(i);
                if Self::is_positive(&col) {
                    w = self.right_mul_gen(&w, i);
                    word.push(i);
                    if word.len() as u128 > max_len {
                        return Err(OracleError::NotSpherical);
                    }
                    continue 'outer;
                }
            }
            break;
        }
        Ok(GroupElement {
            matrix: w,
            word: Some(word),
        })
    }

    /// Nontrivial central involutions of `⟨J⟩`: products of `ρ_C` over
    /// nonempty sets of components `C` whose opposition is trivial.
    pub fn center_of_spherical(&self, j: VertexSet) -> Result<Vec<GroupElement<T>>, OracleError> {
        let comps = spherical_components(&self.diagram, j)?.ok_or(OracleError::NotSpherical)?;
        let mut central = Vec::new();
        for (c, _) in comps {
            if classify::opposition_involution(&self.diagram, c)?.is_identity() {
                central.push(self.longest_element(c)?);
            }
        }
        let mut out = Vec::new();
        for mask in 1u64..(1u64 << central.len()) {
            let mut z = self.identity();
            for (k, rho) in central.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    z = self.mul(&z, rho);
                }
            }
            out.push(z);
        }
        Ok(out)
    }

    /// Breadth-first enumeration of `⟨J⟩`, deduplicated on exact matrices.
    pub fn enumerate_subgroup(&self, j: VertexSet, cap: usize) -> GroupEnumeration<T> {
        let mut seen = HashSet::new();
        let id = self.identity();
        seen.insert(id.matrix.key());
        let mut elements = vec![id];
        let mut queue = VecDeque::from([0usize]);
        while let Some(k) = queue.pop_front() {
            for i in j.iter() {
                let m = self.right_mul_gen(&elements[k].matrix, i);
                if seen.insert(m.key()) {
                    if elements.len() == cap {
                        return GroupEnumeration {
                            elements,
                            complete: false,
                        };
                    }
                    let mut word = elements[k].word.clone().unwrap_or_default();
                    word.push(i);
                    elements.push(GroupElement {
                        matrix: m,
                        word: Some(word),
                    });
                    queue.push_back(elements.len() - 1);
                }
            }
        }
        GroupEnumeration {
            elements,
            complete: true,
        }
    }

    pub fn enumerate_group(&self, cap: usize) -> GroupEnumeration<T> {
        self.enumerate_subgroup(self.diagram.vertex_set(), cap)
    }
}

fn is_nilpotent<T: RepScalar>(d: &Matrix<T>) -> bool {
    if d.is_zero() {
        return false;
    }
    let mut p = d.clone();
    let mut k = 1;
    while k < d.dim() {
        p = p.mul(&p);
        k *= 2;
    }
    p.is_zero()
}
