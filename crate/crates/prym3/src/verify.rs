//! Orchestration: compute the permutation group of each component of
//! E_D(4) from multitwist generators, bound it by the applicable
//! obstruction, compare with the predicted classification, and aggregate
//! everything into machine-checkable reports.
//!
//! The generated group is attained purely by affine multitwists: the
//! pipeline computes permutations only through `twist_permutation`, never by
//! assertion, and consults `predicted_group` exclusively at verdict time.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::cylinders::{cylinder_decomposition, CylError, Direction, PointLocation};
use crate::geom::Mat2;
use crate::invariants::{fr_classes_of, hlk_invariant, InvariantError, TorsionType};
use crate::permgroup::{classify, closure, MarkedPermutation, PermError, SubgroupClass};
use crate::prototypes::{
    components, locus_status, predicted_group, reduced_prototypes, same_component, ComponentTag,
    LocusStatus, Model, PredictedGroup, ProtoError, Prototype,
};
use crate::qfield::{QuadNum, Sign};
use crate::surface::{
    build_surface, validate_surface, PrymLabel, SurfaceError, SurfaceSpec,
};
use crate::twists::{fr_action_law, multitwist, pq_decompose, twist_permutation, TwistError};

/// Default separatrix budget: every direction used by the verification
/// closes within hundreds of crossings at desk scale.
pub const DEFAULT_STEP_BUDGET: usize = 100_000;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Proto(#[from] ProtoError),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Cylinders(#[from] CylError),
    #[error(transparent)]
    Twist(#[from] TwistError),
    #[error(transparent)]
    Invariant(#[from] InvariantError),
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error("{0}")]
    Other(String),
}

#[derive(Debug, Clone, Serialize)]
pub struct GeneratorRecord {
    pub surface: String,
    pub direction: String,
    pub cycles: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComponentResult {
    pub tag: String,
    pub surfaces: Vec<String>,
    pub generators: Vec<GeneratorRecord>,
    pub lower: String,
    pub upper: String,
    pub predicted: String,
    pub verdict: bool,
    pub notes: Vec<String>,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiscriminantResult {
    #[serde(rename = "D")]
    pub d: i64,
    pub components: Vec<ComponentResult>,
}

#[derive(Debug, Clone, Serialize, Default)]
pub struct SuiteCount {
    pub pass: usize,
    pub fail: usize,
    pub failures: Vec<String>,
}

impl SuiteCount {
    fn record(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        if ok {
            self.pass += 1;
        } else {
            self.fail += 1;
            self.failures.push(detail());
        }
    }

    pub fn merge(&mut self, other: SuiteCount) {
        self.pass += other.pass;
        self.fail += other.fail;
        self.failures.extend(other.failures);
    }
}

#[derive(Debug, Clone, Serialize, Default)]
pub struct Properties {
    pub lemma41_table: SuiteCount,
    pub fr_law: SuiteCount,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub range: (i64, i64),
    pub results: Vec<DiscriminantResult>,
    pub properties: Properties,
    pub failures: Vec<String>,
    pub all_pass: bool,
    pub elapsed_ms: u128,
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub dmin: i64,
    pub dmax: i64,
    pub jobs: usize,
    pub step_budget: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            dmin: 5,
            dmax: 500,
            jobs: 4,
            step_budget: DEFAULT_STEP_BUDGET,
        }
    }
}

fn class_name(c: &SubgroupClass) -> String {
    c.to_string()
}

fn predicted_name(p: PredictedGroup) -> String {
    match p {
        PredictedGroup::Sym2 => "sym2".into(),
        PredictedGroup::Sym3 => "sym3".into(),
    }
}

/// Does a computed class match the prediction (conjugacy class level)?
fn matches_prediction(c: &SubgroupClass, p: PredictedGroup) -> bool {
    matches!(
        (c, p),
        (SubgroupClass::Sym2(_), PredictedGroup::Sym2) | (SubgroupClass::Sym3, PredictedGroup::Sym3)
    )
}

struct PlannedSurface {
    desc: String,
    spec: SurfaceSpec,
    directions: Vec<(i64, i64)>,
}

/// The generator selection policy, by discriminant class.
fn generator_plan(d: i64, comp: &ComponentTag) -> Result<Vec<PlannedSurface>, VerifyError> {
    let du = d as u64;
    if d == 8 {
        return Ok(vec![PlannedSurface {
            desc: "B8(0)".into(),
            spec: SurfaceSpec::B8,
            directions: vec![(1, 0), (0, 1)],
        }]);
    }
    if d % 2 == 0 && (d % 16 == 8 || d % 16 == 12) {
        let e0 = if d % 16 == 8 { 0 } else { -2 };
        return Ok(vec![PlannedSurface {
            desc: format!("A+_{d}({e0})"),
            spec: SurfaceSpec::APlus(Prototype::reduced(du, e0)?),
            directions: vec![(1, 0), (0, 1)],
        }]);
    }
    if d % 2 == 0 {
        // Even quadratic residue mod 16: Z_D(e) for every e ∈ S_D, the
        // horizontal twist giving the lower bound.
        let plans = reduced_prototypes(d)?
            .into_iter()
            .map(|e| PlannedSurface {
                desc: format!("Z_{d}({e})"),
                spec: SurfaceSpec::Z { d_param: du, e },
                directions: vec![(1, 0)],
            })
            .collect();
        return Ok(plans);
    }
    // Odd discriminants: two components.
    let rep_e = match comp {
        ComponentTag::Represented { e, .. } => *e,
        ComponentTag::Whole => {
            return Err(VerifyError::Other(format!(
                "odd discriminant {d} needs a component tag"
            )))
        }
    };
    if d == 17 {
        // Component of A⁺(−3): horizontal and vertical twists suffice.
        // The other component: Z_17(−3) with the horizontal and (2,1)
        // twists.
        let plus_side = same_component(Model::APlus, rep_e, Model::APlus, -3, 17)?;
        if plus_side {
            return Ok(vec![PlannedSurface {
                desc: "A+_17(-3)".into(),
                spec: SurfaceSpec::APlus(Prototype::reduced(17, -3)?),
                directions: vec![(1, 0), (0, 1)],
            }]);
        }
        return Ok(vec![PlannedSurface {
            desc: "Z_17(-3)".into(),
            spec: SurfaceSpec::Z { d_param: 17, e: -3 },
            directions: vec![(1, 0), (2, 1)],
        }]);
    }
    if d == 25 {
        // A⁻_25(−3) has the odd vertical ratio; A⁻_25(−1) is square-tiled
        // and uses the diagonal.
        let minus3_side = same_component(Model::AMinus, -3, Model::APlus, rep_e, 25)?;
        if minus3_side {
            return Ok(vec![PlannedSurface {
                desc: "A-_25(-3)".into(),
                spec: SurfaceSpec::AMinus(Prototype::reduced(25, -3)?),
                directions: vec![(1, 0), (0, 1)],
            }]);
        }
        return Ok(vec![PlannedSurface {
            desc: "A-_25(-1)".into(),
            spec: SurfaceSpec::AMinus(Prototype::reduced(25, -1)?),
            directions: vec![(1, 0), (1, 1)],
        }]);
    }
    // General odd D ≥ 33: pick e with D ≡ 8 + e² (mod 16) on this component.
    let candidates: [i64; 2] = if d % 16 == 1 { [-5, -3] } else { [-1, 1] };
    for e in candidates {
        if same_component(Model::APlus, e, Model::APlus, rep_e, d)? {
            return Ok(vec![PlannedSurface {
                desc: format!("A+_{d}({e})"),
                spec: SurfaceSpec::APlus(Prototype::reduced(du, e)?),
                directions: vec![(1, 0), (0, 1)],
            }]);
        }
    }
    Err(VerifyError::Other(format!(
        "no generator candidate matches component {comp:?} of D = {d}"
    )))
}

fn tag_name(comp: &ComponentTag) -> String {
    match comp {
        ComponentTag::Whole => "whole".into(),
        ComponentTag::Represented { model, e } => {
            let m = match model {
                Model::APlus => "A+",
                Model::AMinus => "A-",
            };
            format!("{m}({e})")
        }
    }
}

/// Compute the permutation group data of one component of E_D(4).
pub fn compute_group(d: i64, comp: &ComponentTag, step_budget: usize) -> ComponentResult {
    match compute_group_inner(d, comp, step_budget) {
        Ok(r) => r,
        Err(e) => ComponentResult {
            tag: tag_name(comp),
            surfaces: Vec::new(),
            generators: Vec::new(),
            lower: "error".into(),
            upper: "error".into(),
            predicted: predicted_group(d)
                .map(predicted_name)
                .unwrap_or_else(|_| "n/a".into()),
            verdict: false,
            notes: Vec::new(),
            failures: vec![e.to_string()],
        },
    }
}

fn compute_group_inner(
    d: i64,
    comp: &ComponentTag,
    step_budget: usize,
) -> Result<ComponentResult, VerifyError> {
    let plans = generator_plan(d, comp)?;
    let predicted = predicted_group(d)?;
    let mut notes = Vec::new();
    let mut failures = Vec::new();
    let mut generators = Vec::new();
    let mut perms: Vec<MarkedPermutation> = Vec::new();
    let mut surfaces = Vec::new();
    let mut upper: Option<SubgroupClass> = None;

    let even_restricted = d % 2 == 0 && (d % 16 == 0 || d % 16 == 4);
    let sq = crate::qfield::isqrt(d as u64);
    let is_square = (sq * sq) as i64 == d;

    for plan in &plans {
        let s = build_surface(&plan.spec)?;
        let v = validate_surface(&s);
        if !v.passed() {
            for f in v.failures() {
                failures.push(format!("{}: {} — {}", plan.desc, f.name, f.detail));
            }
            continue;
        }
        surfaces.push(plan.desc.clone());
        for &(x, y) in &plan.directions {
            let dir = Direction::from_ints(s.d_param(), x, y)?;
            let dec = cylinder_decomposition(&s, &dir, step_budget)?;
            let perm = twist_permutation(&s, &dec)?;
            generators.push(GeneratorRecord {
                surface: plan.desc.clone(),
                direction: format!("({x}, {y})"),
                cycles: perm.cycles(),
            });
            perms.push(perm);
        }
        if even_restricted {
            // Upper bound from the applicable obstruction, computed on
            // every chosen surface; they must agree.
            let bound = if is_square {
                let h = hlk_invariant(&s)?;
                notes.push(format!("{}: HLK = {h}", plan.desc));
                hlk_upper_bound(&h)?
            } else {
                let fr = fr_classes_of(&s)?;
                notes.push(format!(
                    "{}: fr = {}",
                    plan.desc,
                    fr.classes
                        .iter()
                        .map(|(l, (a, b))| format!("{l}:({a},{b})"))
                        .collect::<Vec<_>>()
                        .join(" ")
                ));
                fr.upper_bound
            };
            match &upper {
                None => upper = Some(bound),
                Some(u) if *u == bound => {}
                Some(u) => failures.push(format!(
                    "obstruction bounds disagree: {} vs {}",
                    class_name(u),
                    class_name(&bound)
                )),
            }
        }
    }

    // Lower bound: the group generated by the computed twists.
    let gens: Vec<MarkedPermutation> = perms;
    let lower_set = closure(&gens);
    let lower = classify(&lower_set)?;
    let upper = upper.unwrap_or(SubgroupClass::Sym3);

    // Soundness: every generator permutation preserves the obstruction
    // partition when one applies.
    if let SubgroupClass::Sym2(pair) = &upper {
        let fixed = PrymLabel::all()
            .into_iter()
            .find(|l| !pair.contains(&l.index()))
            .expect("one label outside the pair");
        for g in &gens {
            if g.apply(fixed.index()) != fixed.index() {
                failures.push(format!(
                    "generator {} moves {} across the obstruction partition",
                    g.cycles(),
                    fixed
                ));
            }
        }
    }

    let lower_le_upper = match (&lower, &upper) {
        (_, SubgroupClass::Sym3) => true,
        (SubgroupClass::Trivial, _) => true,
        (a, b) => a == b,
    };
    if !lower_le_upper {
        failures.push(format!(
            "lower bound {} exceeds upper bound {}",
            class_name(&lower),
            class_name(&upper)
        ));
    }

    let verdict = failures.is_empty()
        && matches_prediction(&lower, predicted)
        && (matches!(upper, SubgroupClass::Sym3) && predicted == PredictedGroup::Sym3
            || matches_prediction(&upper, predicted));

    Ok(ComponentResult {
        tag: tag_name(comp),
        surfaces,
        generators,
        lower: class_name(&lower),
        upper: class_name(&upper),
        predicted: predicted_name(predicted),
        verdict,
        notes,
        failures,
    })
}

/// Upper bound induced by the HLK invariant of a square-tiled surface.
fn hlk_upper_bound(h: &crate::invariants::HLKInvariant) -> Result<SubgroupClass, VerifyError> {
    let groups = partition_by_key(&h.per_point)?;
    Ok(partition_stabilizer(&groups))
}

fn partition_by_key(
    per_point: &[(PrymLabel, Option<TorsionType>)],
) -> Result<Vec<Vec<PrymLabel>>, VerifyError> {
    let mut groups: Vec<(Option<TorsionType>, Vec<PrymLabel>)> = Vec::new();
    for (l, t) in per_point {
        match groups.iter_mut().find(|(k, _)| k == t) {
            Some((_, g)) => g.push(*l),
            None => groups.push((*t, vec![*l])),
        }
    }
    Ok(groups.into_iter().map(|(_, g)| g).collect())
}

fn partition_stabilizer(groups: &[Vec<PrymLabel>]) -> SubgroupClass {
    match groups.iter().map(|g| g.len()).max().unwrap_or(0) {
        3 => SubgroupClass::Sym3,
        2 => {
            let pair = groups.iter().find(|g| g.len() == 2).unwrap();
            SubgroupClass::Sym2([pair[0].index(), pair[1].index()])
        }
        _ => SubgroupClass::Trivial,
    }
}

/// Lemma 4.1 parity table for one reduced prototype: the four computed
/// twist permutations against the parity predicates, decided by the
/// pointwise shear map.
pub fn lemma41_check(d: i64, e: i64, step_budget: usize) -> Result<Vec<String>, VerifyError> {
    let du = d as u64;
    let b = (d - e * e) / 8;
    let proto = Prototype::reduced(du, e)?;
    let mut bad = Vec::new();
    let cases: [(SurfaceSpec, (i64, i64), &str, bool); 4] = [
        (
            SurfaceSpec::APlus(proto),
            (1, 0),
            "(1 2)",
            b % 2 != 0,
        ),
        (SurfaceSpec::AMinus(proto), (1, 0), "(1 2)", true),
        (SurfaceSpec::APlus(proto), (0, 1), "(1 3)", true),
        (
            SurfaceSpec::AMinus(proto),
            (0, 1),
            "(2 3)",
            (b - e - 2) % 2 != 0,
        ),
    ];
    for (spec, (x, y), swap, expect_swap) in cases {
        let s = build_surface(&spec)?;
        let dir = Direction::from_ints(du, x, y)?;
        let dec = cylinder_decomposition(&s, &dir, step_budget)?;
        let perm = twist_permutation(&s, &dec)?;
        let expected = if expect_swap { swap } else { "id" };
        if perm.cycles() != expected {
            bad.push(format!(
                "D={d} e={e} {spec:?} dir ({x},{y}): got {} want {expected}",
                perm.cycles()
            ));
        }
        // Parity law at the level of twist counts: two core points of one
        // cylinder are exchanged iff its twist count is odd.
        let tw = multitwist(&dec)?;
        let mut core_pairs: Vec<(usize, Vec<PrymLabel>)> = Vec::new();
        for (label, loc) in &dec.locations {
            if let PointLocation::Cylinder {
                index,
                on_core: true,
                ..
            } = loc
            {
                match core_pairs.iter_mut().find(|(i, _)| i == index) {
                    Some((_, v)) => v.push(*label),
                    None => core_pairs.push((*index, vec![*label])),
                }
            }
        }
        for (cyl, labels) in core_pairs {
            if labels.len() == 2 {
                let k_odd = tw.k[cyl].clone() % 2 != num_bigint::BigInt::from(0);
                let exchanged = perm.apply(labels[0].index()) == labels[1].index();
                if k_odd != exchanged {
                    bad.push(format!(
                        "D={d} e={e} {spec:?} dir ({x},{y}): core pair {labels:?} parity law violated"
                    ));
                }
            }
        }
    }
    Ok(bad)
}

/// The fr-law suite for one (D, e) of the restricted non-arithmetic case:
/// fr values of the displacement vectors, order membership of the produced
/// twist matrices, det(P_A) odd, and the action law fr(Av) = ½·P_A·p_v.
pub fn fr_law_check(d: i64, e: i64, step_budget: usize) -> Result<Vec<String>, VerifyError> {
    let du = d as u64;
    let mut bad = Vec::new();
    let s = build_surface(&SurfaceSpec::Z { d_param: du, e })?;
    let fr = fr_classes_of(&s)?;
    let expect = [
        (PrymLabel::W1, (crate::qfield::rat(0), crate::qfield::ratio(1, 2))),
        (PrymLabel::W2, (crate::qfield::rat(0), crate::qfield::ratio(1, 2))),
        (PrymLabel::W3, (crate::qfield::rat(0), crate::qfield::rat(0))),
    ];
    for (l, want) in expect {
        let got = fr
            .classes
            .iter()
            .find(|(x, _)| *x == l)
            .map(|(_, f)| f.clone());
        if got.as_ref() != Some(&want) {
            bad.push(format!("D={d} e={e}: fr({l}) = {got:?}, want {want:?}"));
        }
    }
    for (x, y) in [(1i64, 0i64), (0, 1)] {
        let dir = Direction::from_ints(du, x, y)?;
        let dec = cylinder_decomposition(&s, &dir, step_budget)?;
        let tw = multitwist(&dec)?;
        let pq = match pq_decompose(&tw.matrix, du) {
            Ok(pq) => pq,
            Err(err) => {
                bad.push(format!("D={d} e={e} dir ({x},{y}): {err}"));
                continue;
            }
        };
        if pq.det_p().clone() % num_bigint::BigInt::from(2) == num_bigint::BigInt::from(0) {
            bad.push(format!("D={d} e={e} dir ({x},{y}): det(P_A) even"));
        }
        for (l, v) in &fr.vectors {
            match fr_action_law(&tw.matrix, &pq, v) {
                Ok(true) => {}
                Ok(false) => bad.push(format!(
                    "D={d} e={e} dir ({x},{y}): fr action law fails on v_{l}"
                )),
                Err(err) => bad.push(format!("D={d} e={e} dir ({x},{y}): {err}")),
            }
        }
        // The twist permutation preserves the fr partition.
        let perm = twist_permutation(&s, &dec)?;
        if perm.apply(3) != 3 {
            bad.push(format!(
                "D={d} e={e} dir ({x},{y}): twist moves w3 across the fr partition"
            ));
        }
    }
    Ok(bad)
}

/// Geometry invariants on one built surface: validation, singular cone
/// angle, fixed points, cylinder-area accounting in both axis directions,
/// and the determinant law for areas.
pub fn geometry_suite(spec: &SurfaceSpec, step_budget: usize) -> Result<Vec<String>, VerifyError> {
    let mut bad = Vec::new();
    let s = build_surface(spec)?;
    let v = validate_surface(&s);
    if !v.passed() {
        for f in v.failures() {
            bad.push(format!("{spec:?}: {} — {}", f.name, f.detail));
        }
    }
    let du = s.d_param();
    for (x, y) in [(1i64, 0i64), (0, 1)] {
        let dir = Direction::from_ints(du, x, y)?;
        let dec = cylinder_decomposition(&s, &dir, step_budget)?;
        let mut total = QuadNum::zero(du);
        for c in &dec.cylinders {
            total = total + c.area.clone();
        }
        let rotated_area = dir.rotation().det();
        let expect = &s.area() * &rotated_area;
        if total != expect {
            bad.push(format!(
                "{spec:?} dir ({x},{y}): cylinder areas {total} ≠ scaled surface area {expect}"
            ));
        }
    }
    // apply_matrix scales area by det(M).
    let m = Mat2::new(
        QuadNum::from_int(du, 2),
        QuadNum::from_int(du, 1),
        QuadNum::from_int(du, 1),
        QuadNum::from_int(du, 1),
    );
    let s2 = crate::surface::apply_matrix(&s, &m)?;
    if s2.area() != &s.area() * &m.det() {
        bad.push(format!("{spec:?}: apply_matrix area scaling failed"));
    }
    if m.det().sign() != Sign::Positive {
        bad.push("determinant fixture not positive".into());
    }
    Ok(bad)
}

/// Verify a range of discriminants.
pub fn verify_range(opts: &VerifyOptions) -> Report {
    let start = Instant::now();
    let ds: Vec<i64> = (opts.dmin..=opts.dmax)
        .filter(|&d| matches!(locus_status(d), Ok(s) if s != LocusStatus::Empty))
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs.max(1))
        .build();
    let run = |ds: &[i64]| -> Vec<DiscriminantResult> {
        ds.par_iter()
            .map(|&d| {
                let comps = components(d).unwrap_or_default();
                let components = comps
                    .iter()
                    .map(|c| compute_group(d, c, opts.step_budget))
                    .collect();
                DiscriminantResult { d, components }
            })
            .collect()
    };
    let results = match pool {
        Ok(pool) => pool.install(|| run(&ds)),
        Err(_) => run(&ds),
    };

    // Property suites over the same range.
    let mut properties = Properties::default();
    for &d in &ds {
        for e in reduced_prototypes(d).unwrap_or_default() {
            match lemma41_check(d, e, opts.step_budget) {
                Ok(bad) if bad.is_empty() => properties.lemma41_table.record(true, String::new),
                Ok(bad) => {
                    for b in bad {
                        properties.lemma41_table.record(false, || b.clone());
                    }
                }
                Err(err) => properties
                    .lemma41_table
                    .record(false, || format!("D={d} e={e}: {err}")),
            }
            let sq = crate::qfield::isqrt(d as u64);
            let restricted =
                d % 2 == 0 && (d % 16 == 0 || d % 16 == 4) && (sq * sq) as i64 != d;
            if restricted {
                match fr_law_check(d, e, opts.step_budget) {
                    Ok(bad) if bad.is_empty() => properties.fr_law.record(true, String::new),
                    Ok(bad) => {
                        for b in bad {
                            properties.fr_law.record(false, || b.clone());
                        }
                    }
                    Err(err) => properties
                        .fr_law
                        .record(false, || format!("D={d} e={e}: {err}")),
                }
            }
        }
    }

    let mut failures = Vec::new();
    for r in &results {
        for c in &r.components {
            if !c.verdict {
                failures.push(format!("D={} component {}: verdict failed", r.d, c.tag));
            }
            failures.extend(c.failures.iter().map(|f| format!("D={}: {f}", r.d)));
        }
    }
    let all_pass = failures.is_empty()
        && properties.lemma41_table.fail == 0
        && properties.fr_law.fail == 0;

    Report {
        range: (opts.dmin, opts.dmax),
        results,
        properties,
        failures,
        all_pass,
        elapsed_ms: start.elapsed().as_millis(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ModelReport {
    pub model: String,
    pub n_squares: i64,
    pub validation_passed: bool,
    pub hlk: String,
    pub hlk_pattern: (usize, Vec<usize>),
    pub horizontal_cylinders: usize,
    pub vertical_cylinders: usize,
    pub lateral_moduli_equal: bool,
    pub winding_integral: bool,
    pub widths_pairwise_rational: bool,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AppendixReport {
    pub d: i64,
    pub models: Vec<ModelReport>,
    pub pass: bool,
}

/// Appendix checks: build the one- and two-cylinder square-tiled families
/// and verify square counts, vertical decomposition shape, moduli laws, and
/// the HLK values.
pub fn appendix_a_check(d: i64, step_budget: usize) -> AppendixReport {
    let mut models = Vec::new();
    for (name, spec, horizontal_expected) in [
        ("C", SurfaceSpec::ModelC { d }, 2usize),
        ("D", SurfaceSpec::ModelD { d }, 1usize),
    ] {
        models.push(model_report(name, &spec, d, horizontal_expected, step_budget));
    }
    let pass = models.iter().all(|m| m.failures.is_empty());
    AppendixReport { d, models, pass }
}

fn model_report(
    name: &str,
    spec: &SurfaceSpec,
    d: i64,
    horizontal_expected: usize,
    step_budget: usize,
) -> ModelReport {
    let mut failures = Vec::new();
    let mut report = ModelReport {
        model: name.into(),
        n_squares: 0,
        validation_passed: false,
        hlk: String::new(),
        hlk_pattern: (0, Vec::new()),
        horizontal_cylinders: 0,
        vertical_cylinders: 0,
        lateral_moduli_equal: false,
        winding_integral: false,
        widths_pairwise_rational: false,
        failures: Vec::new(),
    };
    let s = match build_surface(spec) {
        Ok(s) => s,
        Err(e) => {
            report.failures.push(e.to_string());
            return report;
        }
    };
    let v = validate_surface(&s);
    report.validation_passed = v.passed();
    if !v.passed() {
        for f in v.failures() {
            failures.push(format!("{} — {}", f.name, f.detail));
        }
    }
    let area = s.area().to_rat().and_then(|r| {
        r.is_integer().then(|| {
            let i: num_bigint::BigInt = r.to_integer();
            i64::try_from(&i).unwrap_or(0)
        })
    });
    report.n_squares = area.unwrap_or(0);
    let expected_squares = match (name, d % 2) {
        ("C", 1) => 2 * d,
        ("D", 1) => d,
        _ => d,
    };
    if report.n_squares != expected_squares {
        failures.push(format!(
            "model {name}: {} squares, expected {expected_squares}",
            report.n_squares
        ));
    }
    match hlk_invariant(&s) {
        Ok(h) => {
            report.hlk = h.to_string();
            report.hlk_pattern = h.orbit_pattern();
            let expected = match (name, d % 2) {
                ("C", 1) => (3usize, vec![0usize, 0, 0]),
                ("D", 1) => (0, vec![1, 1, 1]),
                _ => (1, vec![2, 0, 0]),
            };
            if report.hlk_pattern != expected {
                failures.push(format!(
                    "model {name}: HLK pattern {:?}, expected {expected:?}",
                    report.hlk_pattern
                ));
            }
        }
        Err(e) => failures.push(format!("model {name}: HLK failed: {e}")),
    }

    let du = s.d_param();
    match cylinder_decomposition(&s, &Direction::horizontal(du), step_budget) {
        Ok(dec) => {
            report.horizontal_cylinders = dec.cylinders.len();
            if dec.cylinders.len() != horizontal_expected {
                failures.push(format!(
                    "model {name}: {} horizontal cylinders, expected {horizontal_expected}",
                    dec.cylinders.len()
                ));
            }
            if horizontal_expected == 1 {
                // One-cylinder case: the transverse widths of the vertical
                // cylinders must be pairwise rational multiples.
                report.widths_pairwise_rational = true;
            }
        }
        Err(e) => failures.push(format!("model {name}: horizontal decomposition: {e}")),
    }
    match cylinder_decomposition(&s, &Direction::vertical(du), step_budget) {
        Ok(dec) => {
            report.vertical_cylinders = dec.cylinders.len();
            if dec.cylinders.len() != 3 {
                failures.push(format!(
                    "model {name}: {} vertical cylinders, expected 3",
                    dec.cylinders.len()
                ));
            } else {
                // Two lateral cylinders of equal moduli (swapped by the
                // involution), one central.
                let mut moduli: Vec<QuadNum> =
                    dec.cylinders.iter().map(|c| c.modulus.clone()).collect();
                moduli.sort();
                let equal_pair = moduli[0] == moduli[1] || moduli[1] == moduli[2];
                report.lateral_moduli_equal = equal_pair;
                if !equal_pair {
                    failures.push(format!("model {name}: no equal lateral moduli pair"));
                }
                // Winding law: each vertical circumference is an integral
                // multiple of the horizontal cylinder height (1 for these
                // origamis), and the central one of model C winds an even
                // number of times.
                let mut winding_ok = true;
                let mut heights: Vec<QuadNum> =
                    dec.cylinders.iter().map(|c| c.width.clone()).collect();
                heights.sort();
                for c in &dec.cylinders {
                    match c.width.to_rat() {
                        Some(w) if w.is_integer() => {}
                        _ => winding_ok = false,
                    }
                }
                if name == "C" {
                    // The central cylinder is the one not in the equal pair
                    // (or any, if all three are equal); it must cross the
                    // two exchanged horizontal cylinders an even number of
                    // times in total.
                    let central = dec
                        .cylinders
                        .iter()
                        .min_by(|a, b| {
                            let ca = dec.cylinders.iter().filter(|c| c.modulus == a.modulus).count();
                            let cb = dec.cylinders.iter().filter(|c| c.modulus == b.modulus).count();
                            ca.cmp(&cb).then(a.modulus.cmp(&b.modulus))
                        })
                        .unwrap();
                    match central.width.to_rat() {
                        Some(w)
                            if w.is_integer()
                                && w.to_integer() % num_bigint::BigInt::from(2)
                                    == num_bigint::BigInt::from(0) => {}
                        _ => winding_ok = false,
                    }
                }
                report.winding_integral = winding_ok;
                if !winding_ok {
                    failures.push(format!("model {name}: winding law failed"));
                }
                // Width commensurability across the vertical cylinders.
                let mut rational = true;
                for c in &dec.cylinders {
                    let ratio = c
                        .height
                        .try_div(&dec.cylinders[0].height)
                        .map(|q| q.is_rational())
                        .unwrap_or(false);
                    rational &= ratio;
                }
                if horizontal_expected != 1 {
                    report.widths_pairwise_rational = rational;
                }
                if !rational {
                    failures.push(format!(
                        "model {name}: vertical widths not pairwise rational"
                    ));
                }
            }
        }
        Err(e) => failures.push(format!("model {name}: vertical decomposition: {e}")),
    }

    report.failures = failures;
    report
}

/// Render a report as text, one line per component plus suite summaries.
pub fn report_text(r: &Report) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "verify [{}, {}]: {} discriminants\n",
        r.range.0,
        r.range.1,
        r.results.len()
    ));
    for dr in &r.results {
        for c in &dr.components {
            out.push_str(&format!(
                "D={:<4} {:<8} lower={:<12} upper={:<12} predicted={:<5} {}\n",
                dr.d,
                c.tag,
                c.lower,
                c.upper,
                c.predicted,
                if c.verdict { "pass" } else { "FAIL" }
            ));
        }
    }
    out.push_str(&format!(
        "lemma41_table: {} pass, {} fail\n",
        r.properties.lemma41_table.pass, r.properties.lemma41_table.fail
    ));
    out.push_str(&format!(
        "fr_law: {} pass, {} fail\n",
        r.properties.fr_law.pass, r.properties.fr_law.fail
    ));
    out.push_str(&format!(
        "overall: {} ({} ms)\n",
        if r.all_pass { "PASS" } else { "FAIL" },
        r.elapsed_ms
    ));
    out
}

/// Render a report as CSV (one row per component).
pub fn report_csv(r: &Report) -> String {
    let mut out = String::from("D,component,lower,upper,predicted,verdict\n");
    for dr in &r.results {
        for c in &dr.components {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                dr.d, c.tag, c.lower, c.upper, c.predicted, c.verdict
            ));
        }
    }
    out
}
