//! Bounded search for conjugating a pair of reflections into the generators.

use std::collections::{HashSet, VecDeque};

use serde::Serialize;

use super::matrix::Matrix;
use super::rep::{GeometricRep, GroupElement, ProductOrder};
use super::scalar::RepScalar;
use super::OracleError;
use crate::diagram::Label;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "witness")]
pub enum SharpAngled {
    /// `w⁻¹ {r, r2} w` consists of generators for the witness word `w`.
    Yes(Vec<String>),
    /// No generator pair has the same product order, so no conjugate can work.
    No,
    Unknown,
    /// The product has infinite order; such pairs impose no condition.
    VacuousInfinite,
}

/// Decides whether `{r, r2}` is conjugate into the generating set, searching
/// conjugators up to `length_bound`.
pub fn is_sharp_angled_pair<T: RepScalar>(
    rep: &GeometricRep<T>,
    r: &GroupElement<T>,
    r2: &GroupElement<T>,
    length_bound: usize,
    order_bound: u32,
) -> Result<SharpAngled, OracleError> {
    let order = match rep.order_of_product(r, r2, order_bound)? {
        ProductOrder::Infinite => return Ok(SharpAngled::VacuousInfinite),
        ProductOrder::Unknown => return Ok(SharpAngled::Unknown),
        ProductOrder::Finite(k) => k,
    };
    let n = rep.rank();
    let is_gen = |m: &Matrix<T>| (0..n).any(|i| rep.generator_matrix(i) == m);

    let mut seen = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert((r.matrix.key(), r2.matrix.key()));
    queue.push_back((r.matrix.clone(), r2.matrix.clone(), Vec::<usize>::new()));
    while let Some((a, b, word)) = queue.pop_front() {
        if is_gen(&a) && is_gen(&b) {
            let names = word.iter().map(|&i| rep.diagram().name(i).to_string()).collect();
            return Ok(SharpAngled::Yes(names));
        }
        if word.len() == length_bound {
            continue;
        }
        for i in 0..n {
            let a2 = rep.left_mul_gen(i, &rep.right_mul_gen(&a, i));
            let b2 = rep.left_mul_gen(i, &rep.right_mul_gen(&b, i));
            if seen.insert((a2.key(), b2.key())) {
                let mut w = word.clone();
                w.push(i);
                queue.push_back((a2, b2, w));
            }
        }
    }

    let m = rep.diagram();
    let matching_pair = (0..n).any(|i| {
        (0..n).any(|j| match order {
            1 => i == j,
            k => i != j && m.label(i, j) == Label::Finite(k),
        })
    });
    Ok(if matching_pair {
        SharpAngled::Unknown
    } else {
        SharpAngled::No
    })
}
