//! Acceptance run: one line per criterion with its verdict, measurements and
//! time budget. Exits nonzero when any criterion fails.

mod common;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::props::{self, diagrams, LABELS};
use common::{connected_corpus, known_order, odd_oracle, random_diagram, random_permutation, INF};
use coxiso::classify::{b3, d4, has_subdiagram_of_type, spherical_components};
use coxiso::explorer::{decide_isomorphism, twist_class, verify_certificate, Answer, AnswerClass};
use coxiso::moves::MoveKind;
use coxiso::oracle::{build_angle_deformation, build_transvection, finite_continuation, verify_images, OracleError};
use coxiso::{
    admissible_pairs, apply_twist, find_isomorphism, is_spherical, opposition_involution, parse_diagram,
    pseudo_transpositions, reduced_reduction, verify_twist, AdmissiblePair, CoxeterMatrix, ExactRep, MoveOptions,
    ProductOrder, VertexSet,
};
use proptest::strategy::Strategy;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PATH: &str = "vertices s1 s2 s3 s4\nedge s1 s2 3\nedge s2 s3 3\nedge s3 s4 3\nedge s1 s3 inf\nedge s1 s4 inf\nedge s2 s4 inf";
const STAR: &str = "vertices s1 s2 s3 s4\nedge s1 s2 3\nedge s2 s3 3\nedge s2 s4 3\nedge s1 s3 inf\nedge s1 s4 inf\nedge s3 s4 inf";
const CAP: usize = 10_000;

type Outcome = Result<String, String>;
/// Number, title, time budget in seconds, check.
type Criterion = (u32, &'static str, u64, fn() -> Outcome);

fn d(text: &str) -> CoxeterMatrix {
    parse_diagram(text).unwrap()
}

fn dihedral(m: u32) -> CoxeterMatrix {
    d(&format!("vertices a b\nedge a b {m}"))
}

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn criterion_1() -> Outcome {
    let path = d(PATH);
    let pair = AdmissiblePair::from_names(&path, &["s2", "s3"], &["s1"]).map_err(|e| e.to_string())?;
    let (out, _) = apply_twist(&path, &pair, &MoveOptions::default()).map_err(|e| e.to_string())?;
    require(out == d(STAR), || format!("twist produced {out:?}"))?;
    require(find_isomorphism(&path, &out).is_none(), || "path and star reported isomorphic".into())?;
    Ok("exact match with the star; no diagram isomorphism".into())
}

fn criterion_2() -> Outcome {
    let opts = MoveOptions::default();
    for k in 1..=3u32 {
        let odd = 2 * k + 1;
        let m = dihedral(2 * odd);
        let (r, trace) = reduced_reduction(&m, &opts).map_err(|e| e.to_string())?;
        let target = d(&format!("vertices x y z\nedge x y {odd}"));
        require(find_isomorphism(&r, &target).is_some(), || format!("I2({}) reduced to {r:?}", 2 * odd))?;
        require(trace.len() == 1, || format!("{} reduction steps", trace.len()))?;
        require(pseudo_transpositions(&r).is_empty(), || format!("{r:?} is not reduced"))?;

        let rep = ExactRep::new(&m).map_err(|e| e.to_string())?;
        let (tau, t) = (rep.generator(0), rep.generator(1));
        let u = rep.conjugate(&tau, &t);
        let o = rep.order_of_product(&t, &u, 100).map_err(|e| e.to_string())?;
        require(o == ProductOrder::Finite(odd), || format!("o(t tau t tau) = {o} for k = {k}"))?;
        let rho = rep.longest_element(VertexSet::full(2)).map_err(|e| e.to_string())?;
        for g in [&t, &u] {
            require(rep.mul(&rho, g) == rep.mul(g, &rho), || format!("rho not central for k = {k}"))?;
        }
    }
    Ok("I2(6), I2(10), I2(14) reduce to I2(3|5|7) x A1; orders 3, 5, 7 confirmed".into())
}

fn criterion_3() -> Outcome {
    let corpus = connected_corpus(4, &LABELS);
    let opts = MoveOptions::default();
    let (mut pairs, mut mismatches) = (0usize, Vec::new());
    for m in &corpus {
        for p in admissible_pairs(m, opts.rank_cap).map_err(|e| e.to_string())? {
            if !p.is_nontrivial(m) {
                continue;
            }
            pairs += 1;
            let check = verify_twist(m, &p, &opts).map_err(|e| format!("{m:?}: {e}"))?;
            if !check.is_ok() {
                mismatches.push(format!("{m:?} J={:?} K={:?}", m.set_names(p.j), m.set_names(p.k)));
            }
        }
    }
    require(mismatches.is_empty(), || format!("{} mismatches, first {}", mismatches.len(), mismatches[0]))?;
    Ok(format!("{} diagrams, {pairs} nontrivial pairs, 0 mismatches", corpus.len()))
}

fn criterion_4() -> Outcome {
    let opts = MoveOptions::default();
    let i6 = dihedral(6);
    let i3a1 = d("vertices x y z\nedge x y 3");
    let v = decide_isomorphism(&i6, &i3a1, CAP, &opts);
    match &v.answer {
        Answer::Isomorphic(c) if v.unconditional && verify_certificate(c, &i6, &i3a1, &opts) => {}
        other => return Err(format!("I2(6) vs I2(3) x A1: {other:?}")),
    }

    let (path, star) = (d(PATH), d(STAR));
    let v = decide_isomorphism(&path, &star, CAP, &opts);
    match &v.answer {
        Answer::Isomorphic(c)
            if c.moves.len() == 1 && c.moves[0].kind() == MoveKind::Twist && verify_certificate(c, &path, &star, &opts) => {}
        other => return Err(format!("path vs star: {other:?}")),
    }

    let i3 = dihedral(3);
    let v = decide_isomorphism(&i3, &i6, CAP, &opts);
    require(v.answer == Answer::NotIsomorphic, || format!("I2(3) vs I2(6): {:?}", v.answer))?;
    // Independent check: the groups have different orders.
    let order = |m: &CoxeterMatrix| ExactRep::new(m).unwrap().enumerate_group(100).elements.len();
    require(order(&i3) == 6 && order(&i6) == 12, || "dihedral orders".into())?;

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0004);
    for trial in 0..100 {
        let n = rng.gen_range(2..=4);
        let m = random_diagram(&mut rng, n, &LABELS);
        let m2 = if rng.gen_bool(0.5) {
            random_diagram(&mut rng, n, &LABELS)
        } else {
            m.permuted(&random_permutation(&mut rng, n))
        };
        let a = decide_isomorphism(&m, &m2, CAP, &opts);
        let b = decide_isomorphism(&m2, &m, CAP, &opts);
        require(a.answer.class() == b.answer.class(), || format!("trial {trial}: asymmetric on {m:?} vs {m2:?}"))?;
        let p = m.permuted(&random_permutation(&mut rng, n));
        let v = decide_isomorphism(&m, &p, CAP, &opts);
        let ok = v.answer.certificate().is_some_and(|c| verify_certificate(c, &m, &p, &opts));
        require(ok, || format!("trial {trial}: permutation of {m:?} gave {:?}", v.answer))?;
        require(
            v.unconditional == (v.answer.class() == AnswerClass::Isomorphic),
            || format!("trial {trial}: unconditional flag disagrees with the answer"),
        )?;
    }
    Ok("three golden verdicts; 100 random trials symmetric and permutation-invariant".into())
}

fn criterion_5() -> Outcome {
    let labels = [2, 3, 4, 5, 6, 7, 8, INF];
    let corpus = connected_corpus(3, &labels);
    let (mut finite, mut infinite) = (0, 0);
    for m in &corpus {
        let spherical = is_spherical(m, m.vertex_set()).unwrap();
        let rep = ExactRep::with_max_modulus(m, 2000).map_err(|e| format!("{m:?}: {e}"))?;
        let e = rep.enumerate_group(1200);
        require(e.complete == spherical, || format!("{m:?}: spherical={spherical}, enumeration complete={}", e.complete))?;
        let edge_labels: Vec<u32> = common::pairs(m.rank())
            .into_iter()
            .map(|(i, j)| m.label(i, j).value().unwrap_or(INF))
            .collect();
        if spherical {
            finite += 1;
            let ty = &spherical_components(m, m.vertex_set()).unwrap().unwrap()[0].1;
            let size = e.elements.len() as u128;
            require(size == ty.group_order(), || format!("{m:?}: {size} elements, type {ty}"))?;
            require(Some(size) == known_order(m.rank(), &edge_labels), || format!("{m:?}: {size} elements"))?;
        } else {
            infinite += 1;
            require(known_order(m.rank(), &edge_labels).is_none(), || format!("{m:?} should be finite"))?;
        }
    }
    Ok(format!("{} diagrams: {finite} finite with matching orders, {infinite} beyond the cap", corpus.len()))
}

fn criterion_6() -> Outcome {
    let mut cases = vec![
        ("A2", dihedral(3)),
        ("A3", d("vertices a b c\nedge a b 3\nedge b c 3")),
        ("B3", d("vertices a b c\nedge a b 4\nedge b c 3")),
        ("H3", d("vertices a b c\nedge a b 5\nedge b c 3")),
        ("D4", d("vertices a b c d\nedge a b 3\nedge b c 3\nedge b d 3")),
    ];
    let names: Vec<String> = (3..=8).map(|m| format!("I2({m})")).collect();
    for (i, m) in (3..=8).enumerate() {
        cases.push((names[i].as_str(), dihedral(m)));
    }
    let mut nontrivial = Vec::new();
    for (name, m) in &cases {
        let all = m.vertex_set();
        let opp = opposition_involution(m, all).map_err(|e| e.to_string())?;
        let rep = ExactRep::new(m).map_err(|e| e.to_string())?;
        let rho = rep.longest_element(all).map_err(|e| e.to_string())?;
        for i in all.iter() {
            let conj = rep.conjugate(&rho, &rep.generator(i));
            require(conj == rep.generator(opp.apply(i)), || format!("{name}: generator {} disagrees", m.name(i)))?;
        }
        let central = (0..m.rank()).all(|i| {
            let g = rep.generator(i);
            rep.mul(&rho, &g) == rep.mul(&g, &rho)
        });
        require(central == opp.is_identity(), || format!("{name}: centrality disagrees"))?;
        if !opp.is_identity() {
            nontrivial.push(*name);
        }
    }
    Ok(format!("{} types agree; nontrivial on {}", cases.len(), nontrivial.join(" ")))
}

fn criterion_7() -> Outcome {
    let corpus = connected_corpus(4, &LABELS);
    let (mut checked, mut refused, mut rigid) = (0, 0, 0);
    for m in &corpus {
        let blocked = has_subdiagram_of_type(m, &[b3(), d4()]);
        let whole_spherical = is_spherical(m, m.vertex_set()).unwrap();
        for s in 0..m.rank() {
            let got = finite_continuation(m, m.name(s));
            if blocked {
                require(matches!(got, Err(OracleError::PreconditionViolated(_))), || format!("{m:?}: not refused"))?;
                refused += 1;
                continue;
            }
            let fc = got.map_err(|e| format!("{m:?}: {e}"))?;
            let spherical = |c: &BTreeSet<usize>| is_spherical(m, c.iter().copied().collect()).unwrap();
            let o = odd_oracle(m, s, spherical);
            let j_spherical = spherical(&o.j_s);
            let expected: BTreeSet<usize> = if j_spherical {
                o.j_s.union(&o.k_s).copied().collect()
            } else {
                o.k_s.iter().copied().chain([s]).collect()
            };
            let got_set: BTreeSet<usize> = fc.generators.iter().collect();
            require(got_set == expected, || format!("{m:?}, s = {}: FC {got_set:?}, expected {expected:?}", m.name(s)))?;
            if whole_spherical {
                require(fc.generators == m.vertex_set(), || format!("{m:?}: finite group not its own FC"))?;
            }
            let expect_rigid = o.k_s.is_empty() && !j_spherical;
            require(fc.reflection_rigid == expect_rigid, || format!("{m:?}, s = {}: rigid flag", m.name(s)))?;
            rigid += usize::from(expect_rigid);
            checked += 1;
        }
    }
    Ok(format!("{checked} vertices checked ({rigid} reflection-rigid), {refused} refused for C3/D4"))
}

fn criterion_8() -> Outcome {
    let c3 = d("vertices s t t2 c\nedge s t 3\nedge s t2 3\nedge c t 4\nedge c t2 4\nedge t t2 inf");
    let rep = ExactRep::new(&c3).map_err(|e| e.to_string())?;
    let w = |text: &str| rep.parse_word(text).unwrap();
    let images = vec![w("s c"), w("s t c s t s"), w("s t2 c s t2 s"), w("c")];
    let auto = verify_images(&rep, images);
    require(auto.verified, || format!("C3 transvection relations: {:?}", auto.failures))?;
    require(rep.is_reflection(&w("s c")).is_none(), || "sc reported as a reflection".into())?;

    let stu = d("vertices s t u\nedge s t 3");
    let rep = ExactRep::new(&stu).map_err(|e| e.to_string())?;
    let z = rep.generator(2);
    let theta = build_transvection(&rep, "s", &z).map_err(|e| e.to_string())?;
    require(theta.verified, || format!("transvection: {:?}", theta.failures))?;
    require(rep.is_reflection(&theta.images["s"]).is_none(), || "su reported as a reflection".into())?;

    let chain = d("vertices s t y\nedge s t 4\nedge t y 3\nedge s y inf");
    let rep = ExactRep::new(&chain).map_err(|e| e.to_string())?;
    let delta = build_angle_deformation(&rep, "s", "t", &["s", "t"]).map_err(|e| e.to_string())?;
    require(delta.verified, || format!("angle deformation: {:?}", delta.failures))?;

    let triangle = d("vertices s t y\nedge s t 4\nedge t y 3\nedge s y 3");
    let rep = ExactRep::new(&triangle).map_err(|e| e.to_string())?;
    let r = build_angle_deformation(&rep, "s", "t", &["s", "t"]);
    require(matches!(r, Err(OracleError::ChainsIntersect(_))), || format!("overlapping chains accepted: {r:?}"))?;
    Ok("C3 example verified with sc not a reflection; transvection verified; overlap rejected".into())
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0009);
    let opts = MoveOptions::default();
    let mut largest = 0;
    for trial in 0..50 {
        let n = rng.gen_range(2..=6);
        let m = random_diagram(&mut rng, n, &[2, INF]);
        let class = twist_class(&m, CAP, &opts).map_err(|e| e.to_string())?;
        require(!class.truncated, || format!("trial {trial}: class truncated"))?;
        for member in &class.members {
            require(find_isomorphism(&m, member).is_some(), || format!("trial {trial}: {m:?} twists to {member:?}"))?;
        }
        largest = largest.max(class.len());
    }
    Ok(format!("50 classes, largest has {largest} isomorphism type(s)"))
}

fn criterion_10() -> Outcome {
    fn run<S: Strategy>(
        cases: u32,
        strategy: S,
        test: impl Fn(S::Value) -> Result<(), String>,
    ) -> Result<u32, String> {
        let rng = TestRng::deterministic_rng(RngAlgorithm::ChaCha);
        let config = Config {
            cases,
            failure_persistence: None,
            ..Config::default()
        };
        let mut runner = TestRunner::new_with_rng(config, rng);
        runner
            .run(&strategy, |v| test(v).map_err(TestCaseError::fail))
            .map_err(|e| e.to_string())?;
        Ok(cases)
    }
    let any = proptest::arbitrary::any::<usize>;
    let mut total = 0;
    total += run(250, (diagrams(2..=5), any()), |(m, k)| props::twist_preserves_multiset(&m, k))?;
    total += run(250, (diagrams(2..=5), any()), |(m, k)| props::twist_is_reversible(&m, k))?;
    let permuted = diagrams(1..=7).prop_flat_map(|m| {
        let n = m.rank();
        (proptest::strategy::Just(m), proptest::strategy::Just((0..n).collect::<Vec<_>>()).prop_shuffle())
    });
    total += run(250, permuted, |(m, p)| props::canonical_form_is_idempotent(&m, &p))?;
    total += run(150, diagrams(1..=5), |m| props::form_is_invariant(&m))?;
    total += run(150, (diagrams(1..=5), any()), |(m, k)| props::longest_element_is_involution(&m, k))?;
    let replay = diagrams(2..=4).prop_flat_map(|m| {
        let n = m.rank();
        (
            proptest::strategy::Just(m),
            proptest::collection::vec(any(), 0..3),
            proptest::strategy::Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
        )
    });
    total += run(100, replay, |(m, picks, p)| props::certificate_replays(&m, &picks, &p, CAP))?;
    Ok(format!("6 properties, {total} cases green"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (1, "golden twist of the path diagram", 1, criterion_1),
        (2, "reduction of I2(2(2k+1)), k = 1..3", 5, criterion_2),
        (3, "twist soundness sweep, connected rank <= 4", 600, criterion_3),
        (4, "isomorphism pipeline", 60, criterion_4),
        (5, "classification vs enumeration, rank <= 3, labels <= 8", 300, criterion_5),
        (6, "opposition table vs longest-element conjugation", 120, criterion_6),
        (7, "finite continuations", 60, criterion_7),
        (8, "automorphism constructors", 60, criterion_8),
        (9, "right-angled rigidity", 120, criterion_9),
        (10, "property suites", 600, criterion_10),
    ];
    let mut failed = 0;
    for (id, title, budget, f) in criteria {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(budget);
        let (status, detail) = match (&outcome, in_time) {
            (Ok(msg), true) => ("PASS", msg.clone()),
            (Ok(msg), false) => ("FAIL", format!("{msg}; over the time budget")),
            (Err(msg), _) => ("FAIL", msg.clone()),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!(
            "criterion {id:>2} {status} {title}: {detail} [{:.2}s, budget {budget}s]",
            elapsed.as_secs_f64()
        );
    }
    println!("acceptance: {} of 10 criteria passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
