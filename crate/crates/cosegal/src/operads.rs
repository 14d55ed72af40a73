//! Finite multisorted operads in categories.
//!
//! A [`ColoredOperad`] packages, for a finite set of colors, an explicit
//! [`FinCategory`] of operations per signature `(i₁..iₙ; j)`, substitution
//! functors `γ` as lookup tables, and identity operations. [`OAlgebra`] is an
//! action of such an operad on a family of finite categories; the action
//! tables may be partial so that arity/degree truncations of infinite
//! algebras are representable. On top of these the module provides the
//! operad `O_X` of a coarse groupoid, the translation between `O_X`-algebras
//! and strict 2-category data, lax morphisms of algebras with their coherence
//! law, 2-morphisms, the Grothendieck operad of an algebra, the
//! identity-reflection predicate, free algebras on generator families, and
//! the free lax morphism on a functor family together with its adjunction
//! data.
//!
//! Everything is brute-force checkable: validators re-derive each law on all
//! tuples (within an arity bound where laws quantify over unbounded shapes)
//! and report violations instead of panicking.

use crate::fincat::{validate_category, FinCategory, FinFunctor, FinMor, ValidationReport};
use serde_json::{json, Value};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OperadError {
    #[error("malformed data: {0}")]
    Shape(String),
    #[error("missing entry: {0}")]
    Missing(String),
    #[error("invalid instance: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, OperadError>;

// ---------------------------------------------------------------------------
// Signatures and action tables
// ---------------------------------------------------------------------------

/// An operation signature `(inputs; output)` over color names.
pub type Signature = (Vec<String>, String);

/// Key of a stored substitution table: outer signature plus one inner
/// signature per outer input.
pub type GammaKey = (Signature, Vec<Signature>);

/// One way of writing an object as an action value: `(signature, operation,
/// arguments)` with `θ(operation, arguments) = object`.
pub type Presentation = (Signature, String, Vec<String>);

pub fn unit_signature(color: &str) -> Signature {
    (vec![color.to_string()], color.to_string())
}

pub fn composed_signature(outer: &Signature, inners: &[Signature]) -> Signature {
    let inputs = inners.iter().flat_map(|s| s.0.iter().cloned()).collect();
    (inputs, outer.1.clone())
}

pub fn sig_label(sig: &Signature) -> String {
    format!("{}=>{}", sig.0.join("|"), sig.1)
}

fn gamma_label(outer: &Signature, inners: &[Signature]) -> String {
    format!(
        "gamma[{}; {}]",
        sig_label(outer),
        inners.iter().map(sig_label).collect::<Vec<_>>().join(", ")
    )
}

/// A table of a functor out of a product `O(sig) × ∏ D_k`: values on object
/// tuples and on morphism tuples, keyed `(operation part, argument parts)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OpTable {
    pub on_obj: BTreeMap<(String, Vec<String>), String>,
    pub on_mor: BTreeMap<(String, Vec<String>), String>,
}

impl OpTable {
    pub fn obj(&self, x: &str, args: &[String]) -> Option<&String> {
        self.on_obj.get(&(x.to_string(), args.to_vec()))
    }

    pub fn mor(&self, u: &str, args: &[String]) -> Option<&String> {
        self.on_mor.get(&(u.to_string(), args.to_vec()))
    }
}

/// All tuples drawn from the given factor lists, in lexicographic order.
/// Zero factors yield the single empty tuple.
fn tuples<T: Clone>(parts: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut out = vec![Vec::new()];
    for p in parts {
        let mut next = Vec::with_capacity(out.len() * p.len());
        for prefix in &out {
            for item in p {
                let mut t = prefix.clone();
                t.push(item.clone());
                next.push(t);
            }
        }
        out = next;
    }
    out
}

fn mor_ids(cat: &FinCategory) -> Vec<String> {
    cat.morphisms.iter().map(|m| m.id.clone()).collect()
}

fn is_identity_mor(cat: &FinCategory, id: &str) -> bool {
    match cat.morphism(id) {
        Some(m) => m.src == m.tgt && cat.identity_of(&m.src).map(String::as_str) == Some(id),
        None => false,
    }
}

/// The one-object one-morphism category (`*`, `id`).
pub fn unit_category() -> FinCategory {
    let mut compose = BTreeMap::new();
    compose.insert(("id".to_string(), "id".to_string()), "id".to_string());
    FinCategory::from_parts(
        vec!["*".to_string()],
        vec![FinMor { id: "id".to_string(), src: "*".to_string(), tgt: "*".to_string() }],
        compose,
    )
}

pub fn empty_category() -> FinCategory {
    FinCategory::from_parts(Vec::new(), Vec::new(), BTreeMap::new())
}

/// A category with the given objects and only identity morphisms `id_<o>`.
pub fn discrete_category(objects: &[&str]) -> FinCategory {
    let mut compose = BTreeMap::new();
    let morphisms = objects
        .iter()
        .map(|o| {
            let id = format!("id_{o}");
            compose.insert((id.clone(), id.clone()), id.clone());
            FinMor { id, src: o.to_string(), tgt: o.to_string() }
        })
        .collect();
    FinCategory::from_parts(objects.iter().map(|o| o.to_string()).collect(), morphisms, compose)
}

// ---------------------------------------------------------------------------
// Colored operads
// ---------------------------------------------------------------------------

/// A multisorted operad in finite categories. A signature absent from `ops`
/// (or mapped to an empty category) is the empty operation category; the
/// `gamma` map stores one substitution table per composable shape, and
/// `units` names the identity operation `1_i` inside `O(i; i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoredOperad {
    pub colors: Vec<String>,
    pub ops: BTreeMap<Signature, FinCategory>,
    pub gamma: BTreeMap<GammaKey, OpTable>,
    pub units: BTreeMap<String, String>,
}

impl ColoredOperad {
    pub fn op_category(&self, sig: &Signature) -> Option<&FinCategory> {
        self.ops.get(sig)
    }

    pub fn gamma_table(&self, outer: &Signature, inners: &[Signature]) -> Option<&OpTable> {
        self.gamma.get(&(outer.clone(), inners.to_vec()))
    }
}

/// Check the operad laws by brute force. Laws quantified over arbitrary
/// composable shapes (existence of composite signatures and of substitution
/// tables, unit laws) are only demanded while the total inner arity stays
/// within `bound`; everything that is stored is checked unconditionally
/// (table totality, functoriality, associativity on overlapping tables).
pub fn validate_operad(o: &ColoredOperad, bound: usize) -> ValidationReport {
    let mut report = ValidationReport::default();
    let colorset: BTreeSet<&String> = o.colors.iter().collect();

    for (sig, cat) in &o.ops {
        let label = sig_label(sig);
        for c in sig.0.iter().chain(std::iter::once(&sig.1)) {
            if !colorset.contains(c) {
                report.push(format!("operations {label}: unknown color {c}"));
            }
        }
        for v in validate_category(cat).violations {
            report.push(format!("operations {label}: {v}"));
        }
    }

    for i in &o.colors {
        match o.units.get(i) {
            None => report.push(format!("color {i}: no identity operation")),
            Some(u) => match o.ops.get(&unit_signature(i)) {
                Some(cat) if cat.objects.contains(u) => {}
                _ => report.push(format!(
                    "color {i}: identity operation {u} is not an operation of O({i};{i})"
                )),
            },
        }
    }

    // Stored substitution tables: shape, totality, endpoints, functoriality.
    for ((outer, inners), table) in &o.gamma {
        let label = gamma_label(outer, inners);
        let Some(ocat) = o.ops.get(outer) else {
            report.push(format!("{label}: outer signature not present"));
            continue;
        };
        if inners.len() != outer.0.len()
            || inners.iter().zip(&outer.0).any(|(s, c)| s.1 != *c)
        {
            report.push(format!("{label}: inner signatures do not match outer inputs"));
            continue;
        }
        let Some(icats) = inners.iter().map(|s| o.ops.get(s)).collect::<Option<Vec<_>>>() else {
            report.push(format!("{label}: inner signature not present"));
            continue;
        };
        let comp = composed_signature(outer, inners);
        let Some(ccat) = o.ops.get(&comp) else {
            report.push(format!("{label}: composed signature {} not present", sig_label(&comp)));
            continue;
        };

        let obj_parts: Vec<Vec<String>> = icats.iter().map(|c| c.objects.clone()).collect();
        for x in &ocat.objects {
            for args in tuples(&obj_parts) {
                match table.obj(x, &args) {
                    Some(v) if ccat.objects.contains(v) => {}
                    Some(v) => report.push(format!(
                        "{label}: value {v} at ({x}, {args:?}) is not a composed operation"
                    )),
                    None => report.push(format!("{label}: no value at ({x}, {args:?})")),
                }
            }
        }

        let mor_parts: Vec<Vec<String>> = icats.iter().map(|c| mor_ids(c)).collect();
        for u in &ocat.morphisms {
            for fs in tuples(&mor_parts) {
                let Some(w) = table.mor(&u.id, &fs) else {
                    report.push(format!("{label}: no value at morphism tuple ({}, {fs:?})", u.id));
                    continue;
                };
                let Some(wm) = ccat.morphism(w) else {
                    report.push(format!("{label}: morphism value {w} does not exist"));
                    continue;
                };
                let ends: Option<Vec<(&String, &String)>> = fs
                    .iter()
                    .zip(&icats)
                    .map(|(f, c)| c.morphism(f).map(|m| (&m.src, &m.tgt)))
                    .collect();
                let Some(ends) = ends else { continue };
                let srcs: Vec<String> = ends.iter().map(|(s, _)| (*s).clone()).collect();
                let tgts: Vec<String> = ends.iter().map(|(_, t)| (*t).clone()).collect();
                if let Some(s) = table.obj(&u.src, &srcs) {
                    if *s != wm.src {
                        report.push(format!("{label}: source mismatch at ({}, {fs:?})", u.id));
                    }
                }
                if let Some(t) = table.obj(&u.tgt, &tgts) {
                    if *t != wm.tgt {
                        report.push(format!("{label}: target mismatch at ({}, {fs:?})", u.id));
                    }
                }
            }
        }

        // Identities map to identities.
        for x in &ocat.objects {
            let Some(idx) = ocat.identity_of(x) else { continue };
            for args in tuples(&obj_parts) {
                let idargs: Option<Vec<String>> = args
                    .iter()
                    .zip(&icats)
                    .map(|(a, c)| c.identity_of(a).cloned())
                    .collect();
                let Some(idargs) = idargs else { continue };
                let (Some(v), Some(w)) = (table.obj(x, &args), table.mor(idx, &idargs)) else {
                    continue;
                };
                if ccat.identity_of(v) != Some(w) {
                    report.push(format!("{label}: identity tuple at ({x}, {args:?}) is not sent to an identity"));
                }
            }
        }

        // Composition of morphism tuples is preserved.
        for ((u1, fs1), w1) in &table.on_mor {
            for ((u2, fs2), w2) in &table.on_mor {
                let (Some(m1), Some(m2)) = (ocat.morphism(u1), ocat.morphism(u2)) else { continue };
                if m2.src != m1.tgt || fs1.len() != fs2.len() {
                    continue;
                }
                let mut cfs = Vec::with_capacity(fs1.len());
                let mut composable = true;
                for (k, (f1, f2)) in fs1.iter().zip(fs2).enumerate() {
                    let (Some(a), Some(b)) = (icats[k].morphism(f1), icats[k].morphism(f2)) else {
                        composable = false;
                        break;
                    };
                    if b.src != a.tgt {
                        composable = false;
                        break;
                    }
                    match icats[k].compose_ids(f2, f1) {
                        Some(c) => cfs.push(c.clone()),
                        None => {
                            composable = false;
                            break;
                        }
                    }
                }
                if !composable {
                    continue;
                }
                let Some(cu) = ocat.compose_ids(u2, u1) else { continue };
                let (Some(lhs), Some(rhs)) = (table.mor(cu, &cfs), ccat.compose_ids(w2, w1)) else {
                    continue;
                };
                if lhs != rhs {
                    report.push(format!(
                        "{label}: composition not preserved at ({u2}∘{u1}, {cfs:?}): {lhs} vs {rhs}"
                    ));
                }
            }
        }
    }

    // Composite signatures and substitution tables must exist within bound.
    let mut by_output: BTreeMap<&String, Vec<&Signature>> = BTreeMap::new();
    for (sig, cat) in &o.ops {
        if !cat.objects.is_empty() {
            by_output.entry(&sig.1).or_default().push(sig);
        }
    }
    for (outer, ocat) in &o.ops {
        if ocat.objects.is_empty() || outer.0.is_empty() {
            continue;
        }
        let slots: Vec<Vec<&Signature>> = outer
            .0
            .iter()
            .map(|c| by_output.get(c).cloned().unwrap_or_default())
            .collect();
        for profile in bounded_profiles(&slots, bound) {
            let inners: Vec<Signature> = profile.iter().map(|s| (*s).clone()).collect();
            let comp = composed_signature(outer, &inners);
            match o.ops.get(&comp) {
                Some(c) if !c.objects.is_empty() => {
                    if !o.gamma.contains_key(&(outer.clone(), inners.clone())) {
                        report.push(format!("no substitution table for {}", gamma_label(outer, &inners)));
                    }
                }
                _ => report.push(format!(
                    "composite signature {} required by {} is empty",
                    sig_label(&comp),
                    gamma_label(outer, &inners)
                )),
            }
        }
    }

    // Unit laws within bound.
    for (sig, cat) in &o.ops {
        if cat.objects.is_empty() || sig.0.len() > bound {
            continue;
        }
        let n = sig.0.len();
        let j = &sig.1;
        if let Some(uj) = o.units.get(j) {
            if let Some(t) = o.gamma.get(&(unit_signature(j), vec![sig.clone()])) {
                for x in &cat.objects {
                    if t.obj(uj, std::slice::from_ref(x)) != Some(x) {
                        report.push(format!("left unit law fails at {} on {x}", sig_label(sig)));
                    }
                }
                if let Some(idu) = o.ops.get(&unit_signature(j)).and_then(|c| c.identity_of(uj)) {
                    for m in &cat.morphisms {
                        if t.mor(idu, std::slice::from_ref(&m.id)) != Some(&m.id) {
                            report.push(format!("left unit law fails at {} on morphism {}", sig_label(sig), m.id));
                        }
                    }
                }
            }
        }
        if n >= 1 && sig.0.iter().all(|i| o.units.contains_key(i)) {
            let inners: Vec<Signature> = sig.0.iter().map(|i| unit_signature(i)).collect();
            if let Some(t) = o.gamma.get(&(sig.clone(), inners)) {
                let uargs: Vec<String> = sig.0.iter().map(|i| o.units[i].clone()).collect();
                for x in &cat.objects {
                    if t.obj(x, &uargs) != Some(x) {
                        report.push(format!("right unit law fails at {} on {x}", sig_label(sig)));
                    }
                }
                let idargs: Option<Vec<String>> = sig
                    .0
                    .iter()
                    .map(|i| {
                        o.ops
                            .get(&unit_signature(i))
                            .and_then(|c| c.identity_of(&o.units[i]))
                            .cloned()
                    })
                    .collect();
                if let Some(idargs) = idargs {
                    for m in &cat.morphisms {
                        if t.mor(&m.id, &idargs) != Some(&m.id) {
                            report.push(format!("right unit law fails at {} on morphism {}", sig_label(sig), m.id));
                        }
                    }
                }
            }
        }
    }

    // Associativity on every pair of stored tables whose shapes chain.
    let mut by_outer: BTreeMap<&Signature, Vec<(&GammaKey, &OpTable)>> = BTreeMap::new();
    for (key, t) in &o.gamma {
        by_outer.entry(&key.0).or_default().push((key, t));
    }
    for ((s1, inn1), t1) in &o.gamma {
        let Some(ocat1) = o.ops.get(s1) else { continue };
        let Some(icats1) = inn1.iter().map(|s| o.ops.get(s)).collect::<Option<Vec<_>>>() else {
            continue;
        };
        let mid = composed_signature(s1, inn1);
        let Some(seconds) = by_outer.get(&mid) else { continue };
        for ((_, inn2), t2) in seconds {
            // Partition the second key's inner signatures by the arities of
            // the first key's inner signatures.
            let mut blocks: Vec<&[Signature]> = Vec::with_capacity(inn1.len());
            let mut pos = 0;
            for s in inn1 {
                let a = s.0.len();
                blocks.push(&inn2[pos..pos + a]);
                pos += a;
            }
            if pos != inn2.len() {
                continue;
            }
            let Some(inner_tabs) = inn1
                .iter()
                .zip(&blocks)
                .map(|(s, b)| o.gamma.get(&(s.clone(), b.to_vec())))
                .collect::<Option<Vec<_>>>()
            else {
                continue;
            };
            let comps: Vec<Signature> =
                inn1.iter().zip(&blocks).map(|(s, b)| composed_signature(s, b)).collect();
            let Some(tb) = o.gamma.get(&(s1.clone(), comps)) else { continue };
            let Some(icats2) = inn2.iter().map(|s| o.ops.get(s)).collect::<Option<Vec<_>>>() else {
                continue;
            };

            let ys_parts: Vec<Vec<String>> = icats1.iter().map(|c| c.objects.clone()).collect();
            let ws_parts: Vec<Vec<String>> = icats2.iter().map(|c| c.objects.clone()).collect();
            for x in &ocat1.objects {
                for ys in tuples(&ys_parts) {
                    let Some(a1) = t1.obj(x, &ys) else { continue };
                    for ws in tuples(&ws_parts) {
                        let Some(lhs) = t2.obj(a1, &ws) else { continue };
                        let mut bs = Vec::with_capacity(inn1.len());
                        let mut pos = 0;
                        let mut ok = true;
                        for (k, tk) in inner_tabs.iter().enumerate() {
                            let a = inn1[k].0.len();
                            match tk.obj(&ys[k], &ws[pos..pos + a]) {
                                Some(b) => bs.push(b.clone()),
                                None => {
                                    ok = false;
                                    break;
                                }
                            }
                            pos += a;
                        }
                        if !ok {
                            continue;
                        }
                        if let Some(rhs) = tb.obj(x, &bs) {
                            if rhs != lhs {
                                report.push(format!(
                                    "associativity fails at {} over ({x}, {ys:?}, {ws:?}): {lhs} vs {rhs}",
                                    gamma_label(s1, inn1)
                                ));
                            }
                        }
                    }
                }
            }

            let yms: Vec<Vec<String>> = icats1.iter().map(|c| mor_ids(c)).collect();
            let wms: Vec<Vec<String>> = icats2.iter().map(|c| mor_ids(c)).collect();
            for u in &ocat1.morphisms {
                for ys in tuples(&yms) {
                    let Some(a1) = t1.mor(&u.id, &ys) else { continue };
                    for ws in tuples(&wms) {
                        let Some(lhs) = t2.mor(a1, &ws) else { continue };
                        let mut bs = Vec::with_capacity(inn1.len());
                        let mut pos = 0;
                        let mut ok = true;
                        for (k, tk) in inner_tabs.iter().enumerate() {
                            let a = inn1[k].0.len();
                            match tk.mor(&ys[k], &ws[pos..pos + a]) {
                                Some(b) => bs.push(b.clone()),
                                None => {
                                    ok = false;
                                    break;
                                }
                            }
                            pos += a;
                        }
                        if !ok {
                            continue;
                        }
                        if let Some(rhs) = tb.mor(&u.id, &bs) {
                            if rhs != lhs {
                                report.push(format!(
                                    "associativity fails at {} over morphisms ({}, {ys:?}, {ws:?}): {lhs} vs {rhs}",
                                    gamma_label(s1, inn1),
                                    u.id
                                ));
                            }
                        }
                    }
                }
            }
        }
    }

    report
}

/// Per-slot choices with total arity at most `bound`.
fn bounded_profiles<'a>(slots: &[Vec<&'a Signature>], bound: usize) -> Vec<Vec<&'a Signature>> {
    fn rec<'a>(
        slots: &[Vec<&'a Signature>],
        k: usize,
        left: usize,
        cur: &mut Vec<&'a Signature>,
        out: &mut Vec<Vec<&'a Signature>>,
    ) {
        if k == slots.len() {
            out.push(cur.clone());
            return;
        }
        for s in &slots[k] {
            let a = s.0.len();
            if a <= left {
                cur.push(s);
                rec(slots, k + 1, left - a, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(slots, 0, bound, &mut Vec::new(), &mut out);
    out
}

// ---------------------------------------------------------------------------
// The operad of a coarse groupoid
// ---------------------------------------------------------------------------

pub fn pair_color(a: &str, b: &str) -> String {
    format!("{a},{b}")
}

fn chain_signature(v: &[String]) -> Signature {
    let inputs = v.windows(2).map(|w| pair_color(&w[0], &w[1])).collect();
    (inputs, pair_color(&v[0], &v[v.len() - 1]))
}

/// The operad `O_X` over pair colors of `X`, truncated at `max_arity`: the
/// operation category at an n-ary signature is the unit category precisely
/// when the inputs form a composable chain of pairs whose composite is the
/// output, nullary operations sit exactly at the diagonal colors, and every
/// substitution table within the arity bound is the unique one.
pub fn build_ox(x: &[&str], max_arity: usize) -> ColoredOperad {
    let xs: Vec<String> = x.iter().map(|s| s.to_string()).collect();
    let mut colors: Vec<String> = Vec::new();
    for a in &xs {
        for b in &xs {
            colors.push(pair_color(a, b));
        }
    }
    colors.sort();
    colors.dedup();

    let mut ops: BTreeMap<Signature, FinCategory> = BTreeMap::new();
    for a in &xs {
        ops.insert((Vec::new(), pair_color(a, a)), unit_category());
    }
    for n in 1..=max_arity {
        let parts = vec![xs.clone(); n + 1];
        for v in tuples(&parts) {
            ops.insert(chain_signature(&v), unit_category());
        }
    }

    let mut by_output: BTreeMap<&String, Vec<&Signature>> = BTreeMap::new();
    for sig in ops.keys() {
        by_output.entry(&sig.1).or_default().push(sig);
    }
    let mut gamma = BTreeMap::new();
    for outer in ops.keys() {
        let n = outer.0.len();
        if n == 0 {
            continue;
        }
        let slots: Vec<Vec<&Signature>> =
            outer.0.iter().map(|c| by_output[c].clone()).collect();
        for profile in bounded_profiles(&slots, max_arity) {
            let inners: Vec<Signature> = profile.iter().map(|s| (*s).clone()).collect();
            let mut t = OpTable::default();
            t.on_obj.insert(("*".to_string(), vec!["*".to_string(); n]), "*".to_string());
            t.on_mor.insert(("id".to_string(), vec!["id".to_string(); n]), "id".to_string());
            gamma.insert((outer.clone(), inners), t);
        }
    }

    let units = colors.iter().map(|c| (c.clone(), "*".to_string())).collect();
    ColoredOperad { colors, ops, gamma, units }
}

/// Strip the nullary operations (and every substitution table mentioning
/// them) while keeping the unary identities. The result is the
/// semi-2-categorical variant of the operad.
pub fn nonunital(o: &ColoredOperad) -> ColoredOperad {
    let ops: BTreeMap<Signature, FinCategory> =
        o.ops.iter().filter(|(s, _)| !s.0.is_empty()).map(|(s, c)| (s.clone(), c.clone())).collect();
    let gamma = o
        .gamma
        .iter()
        .filter(|((outer, inners), _)| {
            !outer.0.is_empty() && inners.iter().all(|s| !s.0.is_empty())
        })
        .map(|(k, t)| (k.clone(), t.clone()))
        .collect();
    ColoredOperad { colors: o.colors.clone(), ops, gamma, units: o.units.clone() }
}

// ---------------------------------------------------------------------------
// Algebras
// ---------------------------------------------------------------------------

/// An action of a [`ColoredOperad`] on a family of finite categories. The
/// action tables may be partial (entries absent beyond a truncation); the
/// validator enforces that partiality is consistent across the two routes of
/// every law instead of requiring totality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OAlgebra {
    pub operad: ColoredOperad,
    pub categories: BTreeMap<String, FinCategory>,
    pub theta: BTreeMap<Signature, OpTable>,
    /// Unit object `e_i` per color that carries nullary operations.
    pub units: BTreeMap<String, String>,
}

impl OAlgebra {
    pub fn category(&self, color: &str) -> Option<&FinCategory> {
        self.categories.get(color)
    }

    pub fn theta_obj(&self, sig: &Signature, x: &str, args: &[String]) -> Option<&String> {
        self.theta.get(sig).and_then(|t| t.obj(x, args))
    }

    pub fn theta_mor(&self, sig: &Signature, u: &str, args: &[String]) -> Option<&String> {
        self.theta.get(sig).and_then(|t| t.mor(u, args))
    }
}

/// All stored ways of writing `obj` as an action value at `color`.
pub fn presentations_of(a: &OAlgebra, color: &str, obj: &str) -> Vec<Presentation> {
    let mut out = Vec::new();
    for (sig, table) in &a.theta {
        if sig.1 != color {
            continue;
        }
        for ((x, args), v) in &table.on_obj {
            if v == obj {
                out.push((sig.clone(), x.clone(), args.clone()));
            }
        }
    }
    out
}

/// Check the algebra laws. Stored action tables must be functorial on their
/// domain of definition and total on every morphism tuple whose endpoint
/// object tuples are stored; compatibility with substitution is checked per
/// stored `γ` entry with the aligned-partiality rule: if exactly one of the
/// two routes is defined the instance is reported.
pub fn validate_algebra(a: &OAlgebra) -> ValidationReport {
    let mut report = ValidationReport::default();

    for i in &a.operad.colors {
        match a.categories.get(i) {
            None => report.push(format!("no carrier category for color {i}")),
            Some(c) => {
                for v in validate_category(c).violations {
                    report.push(format!("carrier {i}: {v}"));
                }
            }
        }
    }
    for key in a.categories.keys() {
        if !a.operad.colors.contains(key) {
            report.push(format!("carrier {key} does not correspond to a color"));
        }
    }

    for (i, e) in &a.units {
        match a.categories.get(i) {
            Some(c) if c.objects.contains(e) => {}
            _ => report.push(format!("unit object {e} at color {i} is not a carrier object")),
        }
    }
    for (sig, cat) in &a.operad.ops {
        if !sig.0.is_empty() || cat.objects.is_empty() {
            continue;
        }
        let j = &sig.1;
        match a.units.get(j) {
            None => report.push(format!("color {j}: nullary operations present but no unit object")),
            Some(e) => {
                for x in &cat.objects {
                    match a.theta_obj(sig, x, &[]) {
                        Some(v) if v == e => {}
                        Some(v) => report.push(format!(
                            "color {j}: nullary action of {x} gives {v}, unit object is {e}"
                        )),
                        None => report.push(format!("color {j}: nullary action of {x} missing")),
                    }
                }
            }
        }
    }

    for (sig, table) in &a.theta {
        let label = sig_label(sig);
        let Some(ocat) = a.operad.ops.get(sig) else {
            report.push(format!("action table at unknown signature {label}"));
            continue;
        };
        let Some(mj) = a.categories.get(&sig.1) else { continue };
        let Some(icarr) = sig.0.iter().map(|i| a.categories.get(i)).collect::<Option<Vec<_>>>()
        else {
            continue;
        };

        for ((x, args), v) in &table.on_obj {
            if !ocat.objects.contains(x)
                || args.len() != sig.0.len()
                || args.iter().zip(&icarr).any(|(c, cat)| !cat.objects.contains(c))
            {
                report.push(format!("theta {label}: malformed object entry ({x}, {args:?})"));
                continue;
            }
            if !mj.objects.contains(v) {
                report.push(format!("theta {label}: value {v} is not a carrier object"));
            }
        }

        for ((u, fargs), g) in &table.on_mor {
            let (Some(um), Some(gm)) = (ocat.morphism(u), mj.morphism(g)) else {
                report.push(format!("theta {label}: malformed morphism entry ({u}, {fargs:?})"));
                continue;
            };
            if fargs.len() != sig.0.len() {
                report.push(format!("theta {label}: arity mismatch at ({u}, {fargs:?})"));
                continue;
            }
            let Some(fms) = fargs
                .iter()
                .zip(&icarr)
                .map(|(f, cat)| cat.morphism(f))
                .collect::<Option<Vec<_>>>()
            else {
                report.push(format!("theta {label}: unknown argument morphism in ({u}, {fargs:?})"));
                continue;
            };
            let srcs: Vec<String> = fms.iter().map(|m| m.src.clone()).collect();
            let tgts: Vec<String> = fms.iter().map(|m| m.tgt.clone()).collect();
            match table.obj(&um.src, &srcs) {
                Some(s) if *s == gm.src => {}
                Some(s) => report.push(format!(
                    "theta {label}: source of value at ({u}, {fargs:?}) should be {s}"
                )),
                None => report.push(format!(
                    "theta {label}: morphism entry ({u}, {fargs:?}) has no source object entry"
                )),
            }
            match table.obj(&um.tgt, &tgts) {
                Some(t) if *t == gm.tgt => {}
                Some(t) => report.push(format!(
                    "theta {label}: target of value at ({u}, {fargs:?}) should be {t}"
                )),
                None => report.push(format!(
                    "theta {label}: morphism entry ({u}, {fargs:?}) has no target object entry"
                )),
            }
        }

        // Totality on the span of the stored objects.
        let mor_parts: Vec<Vec<String>> = icarr.iter().map(|c| mor_ids(c)).collect();
        for u in &ocat.morphisms {
            for fs in tuples(&mor_parts) {
                let Some(fms) = fs
                    .iter()
                    .zip(&icarr)
                    .map(|(f, cat)| cat.morphism(f))
                    .collect::<Option<Vec<_>>>()
                else {
                    continue;
                };
                let srcs: Vec<String> = fms.iter().map(|m| m.src.clone()).collect();
                let tgts: Vec<String> = fms.iter().map(|m| m.tgt.clone()).collect();
                if table.obj(&u.src, &srcs).is_some()
                    && table.obj(&u.tgt, &tgts).is_some()
                    && table.mor(&u.id, &fs).is_none()
                {
                    report.push(format!("theta {label}: missing action on ({}, {fs:?})", u.id));
                }
            }
        }

        // Identities act as identities.
        for ((x, args), v) in &table.on_obj {
            let (Some(idx), Some(idv)) = (ocat.identity_of(x), mj.identity_of(v)) else { continue };
            let Some(idargs) = args
                .iter()
                .zip(&icarr)
                .map(|(c, cat)| cat.identity_of(c).cloned())
                .collect::<Option<Vec<String>>>()
            else {
                continue;
            };
            if let Some(g) = table.mor(idx, &idargs) {
                if g != idv {
                    report.push(format!(
                        "theta {label}: identity tuple at ({x}, {args:?}) acts as {g}, not {idv}"
                    ));
                }
            }
        }

        // Functoriality on composable pairs of stored entries.
        for ((u1, fs1), g1) in &table.on_mor {
            for ((u2, fs2), g2) in &table.on_mor {
                let (Some(m1), Some(m2)) = (ocat.morphism(u1), ocat.morphism(u2)) else { continue };
                if m2.src != m1.tgt || fs1.len() != fs2.len() {
                    continue;
                }
                let mut cfs = Vec::with_capacity(fs1.len());
                let mut composable = true;
                for (k, (f1, f2)) in fs1.iter().zip(fs2).enumerate() {
                    let (Some(a1m), Some(a2m)) = (icarr[k].morphism(f1), icarr[k].morphism(f2))
                    else {
                        composable = false;
                        break;
                    };
                    if a2m.src != a1m.tgt {
                        composable = false;
                        break;
                    }
                    match icarr[k].compose_ids(f2, f1) {
                        Some(c) => cfs.push(c.clone()),
                        None => {
                            composable = false;
                            break;
                        }
                    }
                }
                if !composable {
                    continue;
                }
                let Some(cu) = ocat.compose_ids(u2, u1) else { continue };
                let Some(lhs) = table.mor(cu, &cfs) else { continue };
                match mj.compose_ids(g2, g1) {
                    Some(rhs) if rhs == lhs => {}
                    Some(rhs) => report.push(format!(
                        "theta {label}: functoriality fails at ({cu}, {cfs:?}): {lhs} vs {rhs}"
                    )),
                    None => report.push(format!(
                        "theta {label}: values {g2}, {g1} of a composable pair do not compose"
                    )),
                }
            }
        }
    }

    // Compatibility with substitution.
    for ((s, inns), t) in &a.operad.gamma {
        let comp = composed_signature(s, inns);
        let label = gamma_label(s, inns);
        let Some(inner_carr) = inns
            .iter()
            .map(|sk| sk.0.iter().map(|i| a.categories.get(i)).collect::<Option<Vec<_>>>())
            .collect::<Option<Vec<Vec<_>>>>()
        else {
            continue;
        };

        let d_parts: Vec<Vec<Vec<String>>> = inner_carr
            .iter()
            .map(|cats| tuples(&cats.iter().map(|c| c.objects.clone()).collect::<Vec<_>>()))
            .collect();
        for ((x, xs), z) in &t.on_obj {
            for dss in tuples(&d_parts) {
                let flat: Vec<String> = dss.concat();
                let lhs = a.theta_obj(&comp, z, &flat);
                let cs: Option<Vec<String>> = inns
                    .iter()
                    .zip(&dss)
                    .zip(xs)
                    .map(|((sk, dk), xk)| a.theta_obj(sk, xk, dk).cloned())
                    .collect();
                let rhs = cs.as_ref().and_then(|cs| a.theta_obj(s, x, cs));
                match (lhs, rhs) {
                    (Some(l), Some(r)) if l == r => {}
                    (Some(l), Some(r)) => report.push(format!(
                        "{label}: action incompatible with substitution at ({x}, {xs:?}, {dss:?}): {l} vs {r}"
                    )),
                    (Some(_), None) => report.push(format!(
                        "{label}: composite action defined but factored route is not at ({x}, {xs:?}, {dss:?})"
                    )),
                    (None, Some(_)) => report.push(format!(
                        "{label}: factored route defined but composite action is not at ({x}, {xs:?}, {dss:?})"
                    )),
                    (None, None) => {}
                }
            }
        }

        let f_parts: Vec<Vec<Vec<String>>> = inner_carr
            .iter()
            .map(|cats| tuples(&cats.iter().map(|c| mor_ids(c)).collect::<Vec<_>>()))
            .collect();
        for ((u, us), w) in &t.on_mor {
            for fss in tuples(&f_parts) {
                let flat: Vec<String> = fss.concat();
                let lhs = a.theta_mor(&comp, w, &flat);
                let gs: Option<Vec<String>> = inns
                    .iter()
                    .zip(&fss)
                    .zip(us)
                    .map(|((sk, fk), uk)| a.theta_mor(sk, uk, fk).cloned())
                    .collect();
                let rhs = gs.as_ref().and_then(|gs| a.theta_mor(s, u, gs));
                match (lhs, rhs) {
                    (Some(l), Some(r)) if l == r => {}
                    (Some(l), Some(r)) => report.push(format!(
                        "{label}: morphism action incompatible with substitution at ({u}, {us:?}, {fss:?}): {l} vs {r}"
                    )),
                    (Some(_), None) => report.push(format!(
                        "{label}: composite morphism action defined but factored route is not at ({u}, {us:?}, {fss:?})"
                    )),
                    (None, Some(_)) => report.push(format!(
                        "{label}: factored morphism route defined but composite action is not at ({u}, {us:?}, {fss:?})"
                    )),
                    (None, None) => {}
                }
            }
        }
    }

    report
}

// ---------------------------------------------------------------------------
// Coproducts by universal property
// ---------------------------------------------------------------------------

fn mediator_count(cat: &FinCategory, apex: &str, target: &str, incls: &[String], legs: &[String]) -> usize {
    cat.hom(apex, target)
        .into_iter()
        .filter(|g| incls.iter().zip(legs).all(|(i, l)| cat.compose_ids(g, i) == Some(l)))
        .count()
}

/// `true` when the given morphisms into `apex` exhibit it as the coproduct
/// of their sources: every cone factors through exactly one mediator.
pub fn is_jointly_universal(cat: &FinCategory, apex: &str, incls: &[String]) -> bool {
    let Some(srcs) = incls
        .iter()
        .map(|i| cat.morphism(i).filter(|m| m.tgt == apex).map(|m| m.src.clone()))
        .collect::<Option<Vec<_>>>()
    else {
        return false;
    };
    for t in &cat.objects {
        let leg_lists: Vec<Vec<String>> = srcs.iter().map(|s| cat.hom(s, t)).collect();
        for legs in tuples(&leg_lists) {
            if mediator_count(cat, apex, t, incls, &legs) != 1 {
                return false;
            }
        }
    }
    true
}

/// Find a coproduct of `parts` in `cat` by scanning all candidate cones.
/// Returns the apex and one inclusion per part; an empty `parts` asks for an
/// initial object.
pub fn finite_coproduct(cat: &FinCategory, parts: &[String]) -> Option<(String, Vec<String>)> {
    for apex in &cat.objects {
        let incl_lists: Vec<Vec<String>> = parts.iter().map(|p| cat.hom(p, apex)).collect();
        for incls in tuples(&incl_lists) {
            if is_jointly_universal(cat, apex, &incls) {
                return Some((apex.clone(), incls));
            }
        }
    }
    None
}

/// The unique morphism `apex → target` composing with `incls` to `legs`, if
/// exactly one exists.
pub fn unique_mediator(
    cat: &FinCategory,
    apex: &str,
    target: &str,
    incls: &[String],
    legs: &[String],
) -> Option<String> {
    let mut found = None;
    for g in cat.hom(apex, target) {
        if incls.iter().zip(legs).all(|(i, l)| cat.compose_ids(&g, i) == Some(l)) {
            if found.is_some() {
                return None;
            }
            found = Some(g);
        }
    }
    found
}

// ---------------------------------------------------------------------------
// Strict 2-category data
// ---------------------------------------------------------------------------

/// Explicit strict 2-category data: hom-categories, horizontal composition
/// tables keyed `(A, B, C)` on composable pairs in diagrammatic order
/// (`f: A→B` then `g: B→C`), and identity 1-cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoCat {
    pub objects: Vec<String>,
    pub homs: BTreeMap<(String, String), FinCategory>,
    pub comp_obj: BTreeMap<(String, String, String), BTreeMap<(String, String), String>>,
    pub comp_mor: BTreeMap<(String, String, String), BTreeMap<(String, String), String>>,
    pub ids: BTreeMap<String, String>,
}

fn split_pair(color: &str) -> Result<(String, String)> {
    match color.split_once(',') {
        Some((a, b)) => Ok((a.to_string(), b.to_string())),
        None => Err(OperadError::Shape(format!("color {color} is not a pair"))),
    }
}

fn sig_vertices(sig: &Signature) -> Result<Vec<String>> {
    if sig.0.is_empty() {
        let (a, b) = split_pair(&sig.1)?;
        if a != b {
            return Err(OperadError::Shape(format!(
                "nullary signature at non-diagonal color {}",
                sig.1
            )));
        }
        return Ok(vec![a.clone(), a]);
    }
    let mut vs = Vec::with_capacity(sig.0.len() + 1);
    for (k, c) in sig.0.iter().enumerate() {
        let (a, b) = split_pair(c)?;
        if k == 0 {
            vs.push(a);
        } else if vs[k] != a {
            return Err(OperadError::Shape(format!("inputs of {} do not chain", sig_label(sig))));
        }
        vs.push(b);
    }
    let (a, b) = split_pair(&sig.1)?;
    if vs[0] != a || vs[vs.len() - 1] != b {
        return Err(OperadError::Shape(format!("output of {} does not match its inputs", sig_label(sig))));
    }
    Ok(vs)
}

/// Read a strict 2-category out of an algebra over an `O_X`-shaped operad.
pub fn algebra_to_twocat(a: &OAlgebra) -> Result<TwoCat> {
    let mut objects: Vec<String> = Vec::new();
    let mut homs = BTreeMap::new();
    for (color, cat) in &a.categories {
        let (p, q) = split_pair(color)?;
        objects.push(p.clone());
        objects.push(q.clone());
        homs.insert((p, q), cat.clone());
    }
    objects.sort();
    objects.dedup();

    for (sig, cat) in &a.operad.ops {
        if !cat.objects.is_empty() && cat.objects.len() != 1 {
            return Err(OperadError::Shape(format!(
                "operation category at {} is not trivial",
                sig_label(sig)
            )));
        }
    }

    let mut comp_obj = BTreeMap::new();
    let mut comp_mor = BTreeMap::new();
    for x in &objects {
        for y in &objects {
            for z in &objects {
                let sig: Signature = (vec![pair_color(x, y), pair_color(y, z)], pair_color(x, z));
                let Some(ocat) = a.operad.ops.get(&sig) else { continue };
                let Some(op) = ocat.objects.first() else { continue };
                let idop = ocat
                    .identity_of(op)
                    .ok_or_else(|| OperadError::Shape(format!("no identity operation at {}", sig_label(&sig))))?;
                let (cab, cbc) = (&a.categories[&sig.0[0]], &a.categories[&sig.0[1]]);
                let mut tobj = BTreeMap::new();
                for f in &cab.objects {
                    for g in &cbc.objects {
                        let v = a
                            .theta_obj(&sig, op, &[f.clone(), g.clone()])
                            .ok_or_else(|| {
                                OperadError::Missing(format!(
                                    "action of {} undefined at ({f}, {g})",
                                    sig_label(&sig)
                                ))
                            })?;
                        tobj.insert((f.clone(), g.clone()), v.clone());
                    }
                }
                let mut tmor = BTreeMap::new();
                for f in &cab.morphisms {
                    for g in &cbc.morphisms {
                        let v = a
                            .theta_mor(&sig, idop, &[f.id.clone(), g.id.clone()])
                            .ok_or_else(|| {
                                OperadError::Missing(format!(
                                    "action of {} undefined at morphisms ({}, {})",
                                    sig_label(&sig),
                                    f.id,
                                    g.id
                                ))
                            })?;
                        tmor.insert((f.id.clone(), g.id.clone()), v.clone());
                    }
                }
                comp_obj.insert((x.clone(), y.clone(), z.clone()), tobj);
                comp_mor.insert((x.clone(), y.clone(), z.clone()), tmor);
            }
        }
    }

    let mut ids = BTreeMap::new();
    for x in &objects {
        let e = a
            .units
            .get(&pair_color(x, x))
            .ok_or_else(|| OperadError::Missing(format!("no identity 1-cell at {x}")))?;
        ids.insert(x.clone(), e.clone());
    }

    Ok(TwoCat { objects, homs, comp_obj, comp_mor, ids })
}

/// Assemble an algebra over an `O_X`-shaped operad from strict 2-category
/// data; n-ary actions are left-associated horizontal composites.
pub fn twocat_to_algebra(t: &TwoCat, operad: &ColoredOperad) -> Result<OAlgebra> {
    let mut categories = BTreeMap::new();
    for color in &operad.colors {
        let key = split_pair(color)?;
        let cat = t
            .homs
            .get(&key)
            .ok_or_else(|| OperadError::Missing(format!("no hom-category for {color}")))?;
        categories.insert(color.clone(), cat.clone());
    }

    let mut theta = BTreeMap::new();
    for (sig, ocat) in &operad.ops {
        if ocat.objects.is_empty() {
            continue;
        }
        if ocat.objects.len() != 1 {
            return Err(OperadError::Shape(format!(
                "operation category at {} is not trivial",
                sig_label(sig)
            )));
        }
        let op = &ocat.objects[0];
        let idop = ocat
            .identity_of(op)
            .ok_or_else(|| OperadError::Shape(format!("no identity operation at {}", sig_label(sig))))?
            .clone();
        let vs = sig_vertices(sig)?;
        let mut table = OpTable::default();

        if sig.0.is_empty() {
            let e = t
                .ids
                .get(&vs[0])
                .ok_or_else(|| OperadError::Missing(format!("no identity 1-cell at {}", vs[0])))?;
            let hom = &categories[&sig.1];
            let ide = hom
                .identity_of(e)
                .ok_or_else(|| OperadError::Shape(format!("identity 1-cell {e} has no identity 2-cell")))?;
            table.on_obj.insert((op.clone(), Vec::new()), e.clone());
            table.on_mor.insert((idop, Vec::new()), ide.clone());
            theta.insert(sig.clone(), table);
            continue;
        }

        let hcats: Vec<&FinCategory> = sig.0.iter().map(|c| &categories[c]).collect();
        let n = sig.0.len();
        let obj_parts: Vec<Vec<String>> = hcats.iter().map(|c| c.objects.clone()).collect();
        for fs in tuples(&obj_parts) {
            let mut acc = fs[0].clone();
            for k in 1..n {
                let key = (vs[0].clone(), vs[k].clone(), vs[k + 1].clone());
                acc = t
                    .comp_obj
                    .get(&key)
                    .and_then(|m| m.get(&(acc.clone(), fs[k].clone())))
                    .ok_or_else(|| {
                        OperadError::Missing(format!("no composite for ({acc}, {}) over {key:?}", fs[k]))
                    })?
                    .clone();
            }
            table.on_obj.insert((op.clone(), fs), acc);
        }
        let mor_parts: Vec<Vec<String>> = hcats.iter().map(|c| mor_ids(c)).collect();
        for fs in tuples(&mor_parts) {
            let mut acc = fs[0].clone();
            for k in 1..n {
                let key = (vs[0].clone(), vs[k].clone(), vs[k + 1].clone());
                acc = t
                    .comp_mor
                    .get(&key)
                    .and_then(|m| m.get(&(acc.clone(), fs[k].clone())))
                    .ok_or_else(|| {
                        OperadError::Missing(format!(
                            "no 2-cell composite for ({acc}, {}) over {key:?}",
                            fs[k]
                        ))
                    })?
                    .clone();
            }
            table.on_mor.insert((idop.clone(), fs), acc);
        }
        theta.insert(sig.clone(), table);
    }

    let mut units = BTreeMap::new();
    for (x, e) in &t.ids {
        units.insert(pair_color(x, x), e.clone());
    }

    Ok(OAlgebra { operad: operad.clone(), categories, theta, units })
}

// ---------------------------------------------------------------------------
// Lax morphisms
// ---------------------------------------------------------------------------

/// A lax morphism of algebras over a common operad: a functor per color plus
/// laxity components `φ(x, c•): θ_M(x, F c•) → F_j(θ_C(x, c•))` keyed by the
/// source action instance.
#[derive(Debug, Clone)]
pub struct LaxOMorphism {
    pub source: OAlgebra,
    pub target: OAlgebra,
    pub functors: BTreeMap<String, FinFunctor>,
    pub laxity: BTreeMap<Signature, BTreeMap<(String, Vec<String>), String>>,
}

impl LaxOMorphism {
    pub fn laxity_at(&self, sig: &Signature, x: &str, args: &[String]) -> Option<&String> {
        self.laxity.get(sig).and_then(|m| m.get(&(x.to_string(), args.to_vec())))
    }
}

/// Structural equality of lax morphisms (functor tables and laxity data).
pub fn lax_eq(f: &LaxOMorphism, g: &LaxOMorphism) -> bool {
    f.source == g.source
        && f.target == g.target
        && f.laxity == g.laxity
        && f.functors.len() == g.functors.len()
        && f.functors.iter().zip(&g.functors).all(|((c1, a), (c2, b))| {
            c1 == c2 && a.object_map == b.object_map && a.morphism_map == b.morphism_map
        })
}

fn identity_functor(c: &FinCategory) -> FinFunctor {
    FinFunctor {
        source: c.clone(),
        target: c.clone(),
        object_map: c.objects.iter().map(|o| (o.clone(), o.clone())).collect(),
        morphism_map: c.morphisms.iter().map(|m| (m.id.clone(), m.id.clone())).collect(),
    }
}

/// The identity lax morphism: identity functors and identity laxity
/// components on every stored action instance.
pub fn identity_lax(a: &OAlgebra) -> LaxOMorphism {
    let functors = a
        .categories
        .iter()
        .map(|(c, cat)| (c.clone(), identity_functor(cat)))
        .collect();
    let mut laxity = BTreeMap::new();
    for (sig, table) in &a.theta {
        let Some(mj) = a.categories.get(&sig.1) else { continue };
        let mut m = BTreeMap::new();
        for ((x, args), v) in &table.on_obj {
            if let Some(idv) = mj.identity_of(v) {
                m.insert((x.clone(), args.clone()), idv.clone());
            }
        }
        laxity.insert(sig.clone(), m);
    }
    LaxOMorphism { source: a.clone(), target: a.clone(), functors, laxity }
}

/// Check a lax morphism: functor data, laxity endpoints and presence,
/// naturality in the action instance, and the coherence law against every
/// stored substitution table. Instances whose required actions are absent on
/// either side are skipped; a missing laxity component where both actions
/// exist is reported.
pub fn validate_lax_o(f: &LaxOMorphism) -> ValidationReport {
    let mut report = ValidationReport::default();
    if f.source.operad != f.target.operad {
        report.push("source and target algebras are over different operads");
        return report;
    }
    let o = &f.source.operad;

    for i in &o.colors {
        let Some(fi) = f.functors.get(i) else {
            report.push(format!("no functor for color {i}"));
            continue;
        };
        match f.source.categories.get(i) {
            Some(c) if *c == fi.source => {}
            _ => report.push(format!("functor at {i} does not start at the source carrier")),
        }
        match f.target.categories.get(i) {
            Some(c) if *c == fi.target => {}
            _ => report.push(format!("functor at {i} does not land in the target carrier")),
        }
        for v in fi.validate().violations {
            report.push(format!("functor at {i}: {v}"));
        }
    }
    if !report.is_valid() {
        return report;
    }

    let fobj = |i: &str, c: &String| f.functors[i].object_map.get(c);
    let fmor = |i: &str, m: &String| f.functors[i].morphism_map.get(m);

    // Laxity endpoints.
    for (sig, m) in &f.laxity {
        let label = sig_label(sig);
        let Some(mj) = f.target.categories.get(&sig.1) else { continue };
        for ((x, args), phi) in m {
            let Some(c) = f.source.theta_obj(sig, x, args) else {
                report.push(format!("laxity at {label} ({x}, {args:?}): no such source action"));
                continue;
            };
            let Some(fargs) = args
                .iter()
                .zip(&sig.0)
                .map(|(a, i)| fobj(i, a).cloned())
                .collect::<Option<Vec<String>>>()
            else {
                continue;
            };
            let Some(ma) = f.target.theta_obj(sig, x, &fargs) else {
                report.push(format!(
                    "laxity at {label} ({x}, {args:?}): target action undefined"
                ));
                continue;
            };
            let Some(fc) = fobj(&sig.1, c) else { continue };
            match mj.morphism(phi) {
                Some(pm) if pm.src == *ma && pm.tgt == *fc => {}
                _ => report.push(format!(
                    "laxity at {label} ({x}, {args:?}): component {phi} is not {ma} -> {fc}"
                )),
            }
        }
    }

    // Presence: a component is required wherever both actions exist.
    for (sig, table) in &f.source.theta {
        for ((x, args), _) in &table.on_obj {
            let Some(fargs) = args
                .iter()
                .zip(&sig.0)
                .map(|(a, i)| fobj(i, a).cloned())
                .collect::<Option<Vec<String>>>()
            else {
                continue;
            };
            if f.target.theta_obj(sig, x, &fargs).is_some()
                && f.laxity_at(sig, x, args).is_none()
            {
                report.push(format!(
                    "missing laxity component at {} ({x}, {args:?})",
                    sig_label(sig)
                ));
            }
        }
    }

    // Naturality in the action instance.
    for (sig, table) in &f.source.theta {
        let Some(ocat) = o.ops.get(sig) else { continue };
        let Some(mj) = f.target.categories.get(&sig.1) else { continue };
        for ((u, fs), g) in &table.on_mor {
            let Some(um) = ocat.morphism(u) else { continue };
            let Some(ends) = fs
                .iter()
                .zip(&sig.0)
                .map(|(h, i)| f.source.categories[i].morphism(h).map(|m| (m.src.clone(), m.tgt.clone())))
                .collect::<Option<Vec<_>>>()
            else {
                continue;
            };
            let srcs: Vec<String> = ends.iter().map(|(s, _)| s.clone()).collect();
            let tgts: Vec<String> = ends.iter().map(|(_, t)| t.clone()).collect();
            let (Some(phi), Some(phi2)) =
                (f.laxity_at(sig, &um.src, &srcs), f.laxity_at(sig, &um.tgt, &tgts))
            else {
                continue;
            };
            let Some(ffs) = fs
                .iter()
                .zip(&sig.0)
                .map(|(h, i)| fmor(i, h).cloned())
                .collect::<Option<Vec<String>>>()
            else {
                continue;
            };
            let Some(tm) = f.target.theta_mor(sig, u, &ffs) else { continue };
            let Some(fg) = fmor(&sig.1, g) else { continue };
            let lhs = mj.compose_ids(fg, phi);
            let rhs = mj.compose_ids(phi2, tm);
            match (lhs, rhs) {
                (Some(l), Some(r)) if l == r => {}
                _ => report.push(format!(
                    "laxity not natural at {} ({u}, {fs:?})",
                    sig_label(sig)
                )),
            }
        }
    }

    // Coherence with substitution.
    for ((s, inns), t) in &o.gamma {
        let comp = composed_signature(s, inns);
        let Some(ocat) = o.ops.get(s) else { continue };
        let Some(mj) = f.target.categories.get(&s.1) else { continue };
        let Some(inner_carr) = inns
            .iter()
            .map(|sk| {
                sk.0.iter().map(|i| f.source.categories.get(i)).collect::<Option<Vec<_>>>()
            })
            .collect::<Option<Vec<Vec<_>>>>()
        else {
            continue;
        };
        let d_parts: Vec<Vec<Vec<String>>> = inner_carr
            .iter()
            .map(|cats| tuples(&cats.iter().map(|c| c.objects.clone()).collect::<Vec<_>>()))
            .collect();
        for ((x, xs), z) in &t.on_obj {
            let Some(idx) = ocat.identity_of(x) else { continue };
            for dss in tuples(&d_parts) {
                let flat: Vec<String> = dss.concat();
                let Some(phi_comp) = f.laxity_at(&comp, z, &flat) else { continue };
                let cs: Option<Vec<String>> = inns
                    .iter()
                    .zip(&dss)
                    .zip(xs)
                    .map(|((sk, dk), xk)| f.source.theta_obj(sk, xk, dk).cloned())
                    .collect();
                let Some(cs) = cs else { continue };
                let Some(phi_outer) = f.laxity_at(s, x, &cs) else { continue };
                let phis: Option<Vec<String>> = inns
                    .iter()
                    .zip(&dss)
                    .zip(xs)
                    .map(|((sk, dk), xk)| f.laxity_at(sk, xk, dk).cloned())
                    .collect();
                let Some(phis) = phis else { continue };
                let Some(tens) = f.target.theta_mor(s, idx, &phis) else { continue };
                match mj.compose_ids(phi_outer, tens) {
                    Some(rhs) if rhs == phi_comp => {}
                    Some(rhs) => report.push(format!(
                        "coherence fails at {} ({x}, {xs:?}, {dss:?}): {phi_comp} vs {rhs}",
                        gamma_label(s, inns)
                    )),
                    None => report.push(format!(
                        "coherence composite undefined at {} ({x}, {xs:?}, {dss:?})",
                        gamma_label(s, inns)
                    )),
                }
            }
        }
    }

    report
}

/// Composite `g ∘ f` of lax morphisms: functors compose, and the laxity is
/// `χ(x, c•) = G_j[φ(x, c•)] ∘ ψ(x, F c•)`.
pub fn compose_lax_o(g: &LaxOMorphism, f: &LaxOMorphism) -> Result<LaxOMorphism> {
    if f.target != g.source {
        return Err(OperadError::Shape("middle algebras do not match".into()));
    }
    let mut functors = BTreeMap::new();
    for (i, fi) in &f.functors {
        let gi = g
            .functors
            .get(i)
            .ok_or_else(|| OperadError::Missing(format!("no functor for color {i}")))?;
        let object_map = fi
            .object_map
            .iter()
            .map(|(c, v)| {
                gi.object_map
                    .get(v)
                    .map(|w| (c.clone(), w.clone()))
                    .ok_or_else(|| OperadError::Missing(format!("object {v} not mapped at {i}")))
            })
            .collect::<Result<_>>()?;
        let morphism_map = fi
            .morphism_map
            .iter()
            .map(|(m, v)| {
                gi.morphism_map
                    .get(v)
                    .map(|w| (m.clone(), w.clone()))
                    .ok_or_else(|| OperadError::Missing(format!("morphism {v} not mapped at {i}")))
            })
            .collect::<Result<_>>()?;
        functors.insert(
            i.clone(),
            FinFunctor {
                source: fi.source.clone(),
                target: gi.target.clone(),
                object_map,
                morphism_map,
            },
        );
    }

    let mut laxity: BTreeMap<Signature, BTreeMap<(String, Vec<String>), String>> = BTreeMap::new();
    for (sig, m) in &f.laxity {
        let nj = g
            .target
            .categories
            .get(&sig.1)
            .ok_or_else(|| OperadError::Missing(format!("no target carrier at {}", sig.1)))?;
        let entry = laxity.entry(sig.clone()).or_default();
        for ((x, args), phi) in m {
            let fargs: Option<Vec<String>> = args
                .iter()
                .zip(&sig.0)
                .map(|(a, i)| f.functors[i].object_map.get(a).cloned())
                .collect();
            let Some(fargs) = fargs else { continue };
            let Some(psi) = g.laxity_at(sig, x, &fargs) else { continue };
            let gphi = g.functors[&sig.1]
                .morphism_map
                .get(phi)
                .ok_or_else(|| OperadError::Missing(format!("laxity component {phi} not mapped")))?;
            let chi = nj
                .compose_ids(gphi, psi)
                .ok_or_else(|| OperadError::Invalid(format!("components {gphi}, {psi} do not compose")))?;
            entry.insert((x.clone(), args.clone()), chi.clone());
        }
    }

    Ok(LaxOMorphism { source: f.source.clone(), target: g.target.clone(), functors, laxity })
}

// ---------------------------------------------------------------------------
// 2-morphisms of lax morphisms
// ---------------------------------------------------------------------------

/// A 2-morphism between parallel lax morphisms: one natural transformation
/// per color, subject to the compatibility square with both laxities.
#[derive(Debug, Clone)]
pub struct LaxOTwoMorphism {
    pub source: LaxOMorphism,
    pub target: LaxOMorphism,
    pub components: BTreeMap<String, BTreeMap<String, String>>,
}

pub fn identity_two_morphism(f: &LaxOMorphism) -> LaxOTwoMorphism {
    let mut components = BTreeMap::new();
    for (i, fi) in &f.functors {
        let tgt = &fi.target;
        let m = fi
            .object_map
            .iter()
            .filter_map(|(c, v)| tgt.identity_of(v).map(|id| (c.clone(), id.clone())))
            .collect();
        components.insert(i.clone(), m);
    }
    LaxOTwoMorphism { source: f.clone(), target: f.clone(), components }
}

pub fn validate_two_morphism(s: &LaxOTwoMorphism) -> ValidationReport {
    let mut report = ValidationReport::default();
    if s.source.source != s.target.source || s.source.target != s.target.target {
        report.push("2-morphism between non-parallel lax morphisms");
        return report;
    }
    let alg_c = &s.source.source;
    let alg_m = &s.source.target;

    for i in &alg_c.operad.colors {
        let (Some(ci), Some(mi)) = (alg_c.categories.get(i), alg_m.categories.get(i)) else {
            continue;
        };
        let (Some(fi), Some(gi)) = (s.source.functors.get(i), s.target.functors.get(i)) else {
            report.push(format!("no functor for color {i}"));
            continue;
        };
        let Some(comp) = s.components.get(i) else {
            if !ci.objects.is_empty() {
                report.push(format!("no components at color {i}"));
            }
            continue;
        };
        for c in &ci.objects {
            let Some(sc) = comp.get(c) else {
                report.push(format!("no component at {i}:{c}"));
                continue;
            };
            let (Some(fc), Some(gc)) = (fi.object_map.get(c), gi.object_map.get(c)) else {
                continue;
            };
            match mi.morphism(sc) {
                Some(m) if m.src == *fc && m.tgt == *gc => {}
                _ => report.push(format!("component at {i}:{c} is not {fc} -> {gc}")),
            }
        }
        for m in &ci.morphisms {
            let (Some(ss), Some(st)) = (comp.get(&m.src), comp.get(&m.tgt)) else { continue };
            let (Some(fm), Some(gm)) = (fi.morphism_map.get(&m.id), gi.morphism_map.get(&m.id))
            else {
                continue;
            };
            let lhs = mi.compose_ids(st, fm);
            let rhs = mi.compose_ids(gm, ss);
            match (lhs, rhs) {
                (Some(l), Some(r)) if l == r => {}
                _ => report.push(format!("components not natural at {i}:{}", m.id)),
            }
        }
    }
    if !report.is_valid() {
        return report;
    }

    // Compatibility with the laxities.
    for (sig, m) in &s.source.laxity {
        let Some(ocat) = alg_c.operad.ops.get(sig) else { continue };
        let Some(mj) = alg_m.categories.get(&sig.1) else { continue };
        for ((x, args), phi) in m {
            let Some(idx) = ocat.identity_of(x) else { continue };
            let Some(phi2) = s.target.laxity_at(sig, x, args) else {
                report.push(format!(
                    "no matching laxity component at {} ({x}, {args:?})",
                    sig_label(sig)
                ));
                continue;
            };
            let Some(c) = alg_c.theta_obj(sig, x, args) else { continue };
            let Some(sc) = s.components.get(&sig.1).and_then(|m| m.get(c)) else { continue };
            let sargs: Option<Vec<String>> = args
                .iter()
                .zip(&sig.0)
                .map(|(a, i)| s.components.get(i).and_then(|m| m.get(a)).cloned())
                .collect();
            let Some(sargs) = sargs else { continue };
            let Some(tens) = alg_m.theta_mor(sig, idx, &sargs) else {
                report.push(format!(
                    "cannot form component tensor at {} ({x}, {args:?})",
                    sig_label(sig)
                ));
                continue;
            };
            let lhs = mj.compose_ids(sc, phi);
            let rhs = mj.compose_ids(phi2, tens);
            match (lhs, rhs) {
                (Some(l), Some(r)) if l == r => {}
                _ => report.push(format!(
                    "laxity square fails at {} ({x}, {args:?})",
                    sig_label(sig)
                )),
            }
        }
    }

    report
}

/// Vertical composite `t2 ∘ t1`.
pub fn compose_two_morphisms(t2: &LaxOTwoMorphism, t1: &LaxOTwoMorphism) -> Result<LaxOTwoMorphism> {
    if !lax_eq(&t1.target, &t2.source) {
        return Err(OperadError::Shape("2-morphisms are not composable".into()));
    }
    let alg_m = &t1.source.target;
    let mut components = BTreeMap::new();
    for (i, m1) in &t1.components {
        let m2 = t2
            .components
            .get(i)
            .ok_or_else(|| OperadError::Missing(format!("no components at color {i}")))?;
        let mi = alg_m
            .categories
            .get(i)
            .ok_or_else(|| OperadError::Missing(format!("no carrier at color {i}")))?;
        let mut out = BTreeMap::new();
        for (c, s1) in m1 {
            let s2 = m2
                .get(c)
                .ok_or_else(|| OperadError::Missing(format!("no component at {i}:{c}")))?;
            let s = mi
                .compose_ids(s2, s1)
                .ok_or_else(|| OperadError::Invalid(format!("components at {i}:{c} do not compose")))?;
            out.insert(c.clone(), s.clone());
        }
        components.insert(i.clone(), out);
    }
    Ok(LaxOTwoMorphism { source: t1.source.clone(), target: t2.target.clone(), components })
}

/// Every valid 2-morphism `f ⟹ g`, found by exhausting component choices.
pub fn two_morphisms_between(f: &LaxOMorphism, g: &LaxOMorphism) -> Vec<LaxOTwoMorphism> {
    if f.source != g.source || f.target != g.target {
        return Vec::new();
    }
    let mut slots: Vec<(String, String)> = Vec::new();
    let mut choices: Vec<Vec<String>> = Vec::new();
    for (i, cat) in &f.source.categories {
        let Some(mi) = f.target.categories.get(i) else { return Vec::new() };
        for c in &cat.objects {
            let (Some(fc), Some(gc)) = (f.functors[i].object_map.get(c), g.functors[i].object_map.get(c))
            else {
                return Vec::new();
            };
            slots.push((i.clone(), c.clone()));
            choices.push(mi.hom(fc, gc));
        }
    }
    let mut out = Vec::new();
    for combo in tuples(&choices) {
        let mut components: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
        for ((i, c), s) in slots.iter().zip(&combo) {
            components.entry(i.clone()).or_default().insert(c.clone(), s.clone());
        }
        for i in f.source.categories.keys() {
            components.entry(i.clone()).or_default();
        }
        let cand = LaxOTwoMorphism { source: f.clone(), target: g.clone(), components };
        if validate_two_morphism(&cand).is_valid() {
            out.push(cand);
        }
    }
    out
}

/// Every natural transformation between parallel functors.
pub fn natural_transformations(f: &FinFunctor, g: &FinFunctor) -> Vec<BTreeMap<String, String>> {
    if f.source != g.source || f.target != g.target {
        return Vec::new();
    }
    let choices: Vec<Vec<String>> = f
        .source
        .objects
        .iter()
        .map(|c| match (f.object_map.get(c), g.object_map.get(c)) {
            (Some(fc), Some(gc)) => f.target.hom(fc, gc),
            _ => Vec::new(),
        })
        .collect();
    let mut out = Vec::new();
    'combo: for combo in tuples(&choices) {
        let assign: BTreeMap<String, String> = f
            .source
            .objects
            .iter()
            .cloned()
            .zip(combo.iter().cloned())
            .collect();
        for m in &f.source.morphisms {
            let (Some(fm), Some(gm)) = (f.morphism_map.get(&m.id), g.morphism_map.get(&m.id))
            else {
                continue 'combo;
            };
            let lhs = f.target.compose_ids(&assign[&m.tgt], fm);
            let rhs = f.target.compose_ids(gm, &assign[&m.src]);
            match (lhs, rhs) {
                (Some(l), Some(r)) if l == r => {}
                _ => continue 'combo,
            }
        }
        out.push(assign);
    }
    out
}

// ---------------------------------------------------------------------------
// The Grothendieck operad of an algebra
// ---------------------------------------------------------------------------

pub fn groth_color(color: &str, object: &str) -> String {
    format!("{color}:{object}")
}

fn groth_obj_id(x: &str, h: &str) -> String {
    format!("{x}%{h}")
}

fn groth_mor_id(u: &str, h: &str, k: &str) -> String {
    format!("{u}%{h}%{k}")
}

/// The Grothendieck operad of an algebra, with the projection back to the
/// base operad recorded per signature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrothOperad {
    pub operad: ColoredOperad,
    /// Color of the result → `(base color, carrier object)`.
    pub base_color: BTreeMap<String, (String, String)>,
    pub pi_obj: BTreeMap<(Signature, String), String>,
    pub pi_mor: BTreeMap<(Signature, String), String>,
}

/// Build the Grothendieck operad: colors are carrier objects, an operation
/// over `(c₁..cₙ; c)` is a pair `(x, h)` with `h: θ(x, c•) → c`, and
/// substitution pairs the base substitution with the action on the `h`
/// components. Action instances absent from a truncated algebra simply
/// contribute no operations.
pub fn grothendieck_operad(a: &OAlgebra) -> Result<GrothOperad> {
    let mut colors: Vec<String> = Vec::new();
    let mut base_color = BTreeMap::new();
    for i in &a.operad.colors {
        let cat = a
            .categories
            .get(i)
            .ok_or_else(|| OperadError::Shape(format!("no carrier for color {i}")))?;
        for c in &cat.objects {
            let gc = groth_color(i, c);
            base_color.insert(gc.clone(), (i.clone(), c.clone()));
            colors.push(gc);
        }
    }
    colors.sort();

    let mut ops: BTreeMap<Signature, FinCategory> = BTreeMap::new();
    let mut pi_obj = BTreeMap::new();
    let mut pi_mor = BTreeMap::new();

    for (sig, ocat) in &a.operad.ops {
        if ocat.objects.is_empty() {
            continue;
        }
        let mj = &a.categories[&sig.1];
        let icarr: Vec<&FinCategory> = sig.0.iter().map(|i| &a.categories[i]).collect();
        let obj_parts: Vec<Vec<String>> = icarr.iter().map(|c| c.objects.clone()).collect();
        for cs in tuples(&obj_parts) {
            let id_cs: Option<Vec<String>> = cs
                .iter()
                .zip(&icarr)
                .map(|(c, cat)| cat.identity_of(c).cloned())
                .collect();
            let Some(id_cs) = id_cs else { continue };
            for cj in &mj.objects {
                let dsig: Signature = (
                    cs.iter().zip(&sig.0).map(|(c, i)| groth_color(i, c)).collect(),
                    groth_color(&sig.1, cj),
                );
                let mut objs = Vec::new();
                let mut mors: Vec<FinMor> = Vec::new();
                let mut parts: Vec<(String, String, String)> = Vec::new();
                for x in &ocat.objects {
                    let Some(tx) = a.theta_obj(sig, x, &cs) else { continue };
                    for h in mj.hom(tx, cj) {
                        objs.push(groth_obj_id(x, &h));
                    }
                }
                for u in &ocat.morphisms {
                    let Some(w) = a.theta_mor(sig, &u.id, &id_cs) else { continue };
                    let (Some(ts), Some(tt)) =
                        (a.theta_obj(sig, &u.src, &cs), a.theta_obj(sig, &u.tgt, &cs))
                    else {
                        continue;
                    };
                    for h in mj.hom(ts, cj) {
                        for k in mj.hom(tt, cj) {
                            if mj.compose_ids(&k, w) == Some(&h) {
                                let id = groth_mor_id(&u.id, &h, &k);
                                mors.push(FinMor {
                                    id: id.clone(),
                                    src: groth_obj_id(&u.src, &h),
                                    tgt: groth_obj_id(&u.tgt, &k),
                                });
                                parts.push((u.id.clone(), h.clone(), k.clone()));
                            }
                        }
                    }
                }
                if objs.is_empty() {
                    continue;
                }
                let mut compose = BTreeMap::new();
                for (m1, (u1, h1, _)) in mors.iter().zip(&parts) {
                    for (m2, (u2, _, k2)) in mors.iter().zip(&parts) {
                        if m2.src != m1.tgt {
                            continue;
                        }
                        if let Some(cu) = ocat.compose_ids(u2, u1) {
                            compose.insert(
                                (m2.id.clone(), m1.id.clone()),
                                groth_mor_id(cu, h1, k2),
                            );
                        }
                    }
                }
                for o in &objs {
                    let x = o.split('%').next().unwrap_or_default().to_string();
                    pi_obj.insert((dsig.clone(), o.clone()), x);
                }
                for (m, (u, _, _)) in mors.iter().zip(&parts) {
                    pi_mor.insert((dsig.clone(), m.id.clone()), u.clone());
                }
                ops.insert(dsig, FinCategory::from_parts(objs, mors, compose));
            }
        }
    }

    // Substitution from the base substitution and the action on `h` parts.
    let mut gamma: BTreeMap<GammaKey, OpTable> = BTreeMap::new();
    for ((s, inns), t) in &a.operad.gamma {
        let Some(ocat) = a.operad.ops.get(s) else { continue };
        let mj = &a.categories[&s.1];
        let outer_carr: Vec<&FinCategory> = s.0.iter().map(|i| &a.categories[i]).collect();
        let inner_carr: Vec<Vec<&FinCategory>> = inns
            .iter()
            .map(|sk| sk.0.iter().map(|i| &a.categories[i]).collect())
            .collect();

        // Object level.
        for ((x, xs), z) in &t.on_obj {
            let Some(idx) = ocat.identity_of(x) else { continue };
            let d_parts: Vec<Vec<Vec<String>>> = inner_carr
                .iter()
                .map(|cats| tuples(&cats.iter().map(|c| c.objects.clone()).collect::<Vec<_>>()))
                .collect();
            for dss in tuples(&d_parts) {
                let ts: Option<Vec<String>> = inns
                    .iter()
                    .zip(&dss)
                    .zip(xs)
                    .map(|((sk, dk), xk)| a.theta_obj(sk, xk, dk).cloned())
                    .collect();
                let Some(ts) = ts else { continue };
                let cs_parts: Vec<Vec<String>> =
                    outer_carr.iter().map(|c| c.objects.clone()).collect();
                for cs in tuples(&cs_parts) {
                    let hs_lists: Vec<Vec<String>> = ts
                        .iter()
                        .zip(&cs)
                        .zip(&outer_carr)
                        .map(|((tk, ck), cat)| cat.hom(tk, ck))
                        .collect();
                    if hs_lists.iter().any(|l| l.is_empty()) {
                        continue;
                    }
                    let Some(t_out) = a.theta_obj(s, x, &cs) else { continue };
                    for hs in tuples(&hs_lists) {
                        let Some(w) = a.theta_mor(s, idx, &hs) else { continue };
                        for cj in &mj.objects {
                            for h in mj.hom(t_out, cj) {
                                let Some(second) = mj.compose_ids(&h, w) else { continue };
                                let outer_dsig: Signature = (
                                    cs.iter().zip(&s.0).map(|(c, i)| groth_color(i, c)).collect(),
                                    groth_color(&s.1, cj),
                                );
                                let inner_dsigs: Vec<Signature> = inns
                                    .iter()
                                    .zip(&dss)
                                    .zip(&cs)
                                    .map(|((sk, dk), ck)| {
                                        (
                                            dk.iter()
                                                .zip(&sk.0)
                                                .map(|(d, i)| groth_color(i, d))
                                                .collect(),
                                            groth_color(&sk.1, ck),
                                        )
                                    })
                                    .collect();
                                let entry = gamma
                                    .entry((outer_dsig, inner_dsigs))
                                    .or_default();
                                entry.on_obj.insert(
                                    (
                                        groth_obj_id(x, &h),
                                        xs.iter()
                                            .zip(&hs)
                                            .map(|(xk, hk)| groth_obj_id(xk, hk))
                                            .collect(),
                                    ),
                                    groth_obj_id(z, second),
                                );
                            }
                        }
                    }
                }
            }
        }

        // Morphism level.
        for ((u, us), wz) in &t.on_mor {
            let Some(um) = ocat.morphism(u) else { continue };
            let inner_ends: Option<Vec<(String, String)>> = us
                .iter()
                .zip(inns)
                .map(|(uk, sk)| {
                    a.operad.ops.get(sk).and_then(|c| c.morphism(uk)).map(|m| (m.src.clone(), m.tgt.clone()))
                })
                .collect();
            let Some(inner_ends) = inner_ends else { continue };
            let d_parts: Vec<Vec<Vec<String>>> = inner_carr
                .iter()
                .map(|cats| tuples(&cats.iter().map(|c| c.objects.clone()).collect::<Vec<_>>()))
                .collect();
            for dss in tuples(&d_parts) {
                let id_ds: Option<Vec<Vec<String>>> = inner_carr
                    .iter()
                    .zip(&dss)
                    .map(|(cats, dk)| {
                        dk.iter()
                            .zip(cats)
                            .map(|(d, cat)| cat.identity_of(d).cloned())
                            .collect::<Option<Vec<_>>>()
                    })
                    .collect();
                let Some(id_ds) = id_ds else { continue };
                // Source/target objects of each inner operation pair.
                let t_ends: Option<Vec<(String, String)>> = inns
                    .iter()
                    .zip(&dss)
                    .zip(&inner_ends)
                    .map(|((sk, dk), (xk, yk))| {
                        match (a.theta_obj(sk, xk, dk), a.theta_obj(sk, yk, dk)) {
                            (Some(s0), Some(t0)) => Some((s0.clone(), t0.clone())),
                            _ => None,
                        }
                    })
                    .collect();
                let Some(t_ends) = t_ends else { continue };
                let ws: Option<Vec<String>> = inns
                    .iter()
                    .zip(&id_ds)
                    .zip(us)
                    .map(|((sk, idk), uk)| a.theta_mor(sk, uk, idk).cloned())
                    .collect();
                let Some(ws) = ws else { continue };
                let cs_parts: Vec<Vec<String>> =
                    outer_carr.iter().map(|c| c.objects.clone()).collect();
                for cs in tuples(&cs_parts) {
                    let (Some(_), Some(t_tgt)) =
                        (a.theta_obj(s, &um.src, &cs), a.theta_obj(s, &um.tgt, &cs))
                    else {
                        continue;
                    };
                    let h2_lists: Vec<Vec<String>> = t_ends
                        .iter()
                        .zip(&cs)
                        .zip(&outer_carr)
                        .map(|(((_, tk), ck), cat)| cat.hom(tk, ck))
                        .collect();
                    if h2_lists.iter().any(|l| l.is_empty()) {
                        continue;
                    }
                    for h2s in tuples(&h2_lists) {
                        // Derive the source components hₖ = hₖ' ∘ θ(uₖ, id).
                        let h1s: Option<Vec<String>> = h2s
                            .iter()
                            .zip(&ws)
                            .zip(&outer_carr)
                            .map(|((h2, wk), cat)| cat.compose_ids(h2, wk).cloned())
                            .collect();
                        let Some(h1s) = h1s else { continue };
                        let (Some(w_src), Some(w_tgt)) = (
                            a.theta_mor(s, ocat.identity_of(&um.src).map(String::as_str).unwrap_or(""), &h1s),
                            a.theta_mor(s, ocat.identity_of(&um.tgt).map(String::as_str).unwrap_or(""), &h2s),
                        ) else {
                            continue;
                        };
                        let Some(w_outer) = a.theta_mor(
                            s,
                            &um.id,
                            &cs.iter()
                                .zip(&outer_carr)
                                .map(|(c, cat)| cat.identity_of(c).cloned().unwrap_or_default())
                                .collect::<Vec<_>>(),
                        ) else {
                            continue;
                        };
                        for cj in &mj.objects {
                            for h_tgt in mj.hom(t_tgt, cj) {
                                let Some(h_src) = mj.compose_ids(&h_tgt, w_outer) else { continue };
                                let (Some(hh_src), Some(hh_tgt)) = (
                                    mj.compose_ids(h_src, w_src),
                                    mj.compose_ids(&h_tgt, w_tgt),
                                ) else {
                                    continue;
                                };
                                let (hh_src, hh_tgt) = (hh_src.clone(), hh_tgt.clone());
                                let outer_dsig: Signature = (
                                    cs.iter().zip(&s.0).map(|(c, i)| groth_color(i, c)).collect(),
                                    groth_color(&s.1, cj),
                                );
                                let inner_dsigs: Vec<Signature> = inns
                                    .iter()
                                    .zip(&dss)
                                    .zip(&cs)
                                    .map(|((sk, dk), ck)| {
                                        (
                                            dk.iter()
                                                .zip(&sk.0)
                                                .map(|(d, i)| groth_color(i, d))
                                                .collect(),
                                            groth_color(&sk.1, ck),
                                        )
                                    })
                                    .collect();
                                let entry = gamma
                                    .entry((outer_dsig, inner_dsigs))
                                    .or_default();
                                entry.on_mor.insert(
                                    (
                                        groth_mor_id(&um.id, h_src, &h_tgt),
                                        us.iter()
                                            .zip(&h1s)
                                            .zip(&h2s)
                                            .map(|((uk, hk), hk2)| groth_mor_id(uk, hk, hk2))
                                            .collect(),
                                    ),
                                    groth_mor_id(wz, &hh_src, &hh_tgt),
                                );
                            }
                        }
                    }
                }
            }
        }
    }

    let mut units = BTreeMap::new();
    for (gc, (i, c)) in &base_color {
        let Some(ui) = a.operad.units.get(i) else { continue };
        let usig = unit_signature(i);
        if a.theta_obj(&usig, ui, std::slice::from_ref(c)).map(|v| v == c) != Some(true) {
            continue;
        }
        if let Some(idc) = a.categories[i].identity_of(c) {
            units.insert(gc.clone(), groth_obj_id(ui, idc));
        }
    }

    Ok(GrothOperad {
        operad: ColoredOperad { colors, ops, gamma, units },
        base_color,
        pi_obj,
        pi_mor,
    })
}

/// Check that the recorded projection is an operad morphism onto the base:
/// functorial per signature and compatible with substitution and units.
pub fn validate_groth_projection(a: &OAlgebra, g: &GrothOperad) -> ValidationReport {
    let mut report = ValidationReport::default();

    let base_sig = |dsig: &Signature| -> Option<Signature> {
        let inputs: Option<Vec<String>> =
            dsig.0.iter().map(|c| g.base_color.get(c).map(|(i, _)| i.clone())).collect();
        let out = g.base_color.get(&dsig.1).map(|(i, _)| i.clone())?;
        Some((inputs?, out))
    };

    for (dsig, cat) in &g.operad.ops {
        let Some(bsig) = base_sig(dsig) else {
            report.push(format!("signature {} has unknown colors", sig_label(dsig)));
            continue;
        };
        let Some(bcat) = a.operad.ops.get(&bsig) else {
            report.push(format!("no base operations for {}", sig_label(dsig)));
            continue;
        };
        for o in &cat.objects {
            match g.pi_obj.get(&(dsig.clone(), o.clone())) {
                Some(x) if bcat.objects.contains(x) => {}
                Some(x) => report.push(format!("projection of {o} is not a base operation: {x}")),
                None => report.push(format!("no projection for operation {o}")),
            }
        }
        for m in &cat.morphisms {
            let Some(u) = g.pi_mor.get(&(dsig.clone(), m.id.clone())) else {
                report.push(format!("no projection for morphism {}", m.id));
                continue;
            };
            let Some(um) = bcat.morphism(u) else {
                report.push(format!("projection of {} is not a base morphism: {u}", m.id));
                continue;
            };
            let ps = g.pi_obj.get(&(dsig.clone(), m.src.clone()));
            let pt = g.pi_obj.get(&(dsig.clone(), m.tgt.clone()));
            if ps != Some(&um.src) || pt != Some(&um.tgt) {
                report.push(format!("projection of {} has wrong endpoints", m.id));
            }
        }
        for ((m2, m1), m12) in &cat.compose {
            let (Some(u1), Some(u2), Some(u12)) = (
                g.pi_mor.get(&(dsig.clone(), m1.clone())),
                g.pi_mor.get(&(dsig.clone(), m2.clone())),
                g.pi_mor.get(&(dsig.clone(), m12.clone())),
            ) else {
                continue;
            };
            if bcat.compose_ids(u2, u1) != Some(u12) {
                report.push(format!("projection does not preserve {m2} ∘ {m1}"));
            }
        }
    }

    for ((outer, inners), table) in &g.operad.gamma {
        let (Some(bouter), Some(binners)) = (
            base_sig(outer),
            inners.iter().map(base_sig).collect::<Option<Vec<_>>>(),
        ) else {
            continue;
        };
        let Some(btable) = a.operad.gamma.get(&(bouter.clone(), binners.clone())) else {
            report.push(format!(
                "no base substitution table under {}",
                gamma_label(outer, inners)
            ));
            continue;
        };
        let comp = composed_signature(outer, inners);
        let bcomp = composed_signature(&bouter, &binners);
        for ((x, xs), v) in &table.on_obj {
            let px = g.pi_obj.get(&(outer.clone(), x.clone()));
            let pxs: Option<Vec<String>> = xs
                .iter()
                .zip(inners)
                .map(|(xk, sk)| g.pi_obj.get(&(sk.clone(), xk.clone())).cloned())
                .collect();
            let pv = g.pi_obj.get(&(comp.clone(), v.clone()));
            let (Some(px), Some(pxs), Some(pv)) = (px, pxs, pv) else { continue };
            if btable.obj(px, &pxs) != Some(pv) {
                report.push(format!(
                    "projection does not preserve substitution at ({x}, {xs:?})"
                ));
            }
        }
        for ((u, us), w) in &table.on_mor {
            let pu = g.pi_mor.get(&(outer.clone(), u.clone()));
            let pus: Option<Vec<String>> = us
                .iter()
                .zip(inners)
                .map(|(uk, sk)| g.pi_mor.get(&(sk.clone(), uk.clone())).cloned())
                .collect();
            let pw = g.pi_mor.get(&(comp.clone(), w.clone()));
            let (Some(pu), Some(pus), Some(pw)) = (pu, pus, pw) else { continue };
            if btable.mor(pu, &pus) != Some(pw) {
                report.push(format!(
                    "projection does not preserve substitution at morphisms ({u}, {us:?})"
                ));
            }
        }
        let _ = (comp, bcomp);
    }

    for (gc, gu) in &g.operad.units {
        let Some((i, c)) = g.base_color.get(gc) else { continue };
        let dsig: Signature = (vec![gc.clone()], gc.clone());
        let Some(pu) = g.pi_obj.get(&(dsig, gu.clone())) else {
            report.push(format!("no projection for unit at {gc}"));
            continue;
        };
        if a.operad.units.get(i) != Some(pu) {
            report.push(format!("unit at {gc} does not project to the base unit ({c})"));
        }
    }

    report
}

// ---------------------------------------------------------------------------
// Identity reflection
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IroReport {
    pub holds: bool,
    /// `(signature, operation morphism, argument morphisms, identity value)`
    /// for the first failure found.
    pub witness: Option<(Signature, String, Vec<String>, String)>,
}

/// Does the action reflect identities: whenever `θ(u, f•)` is an identity,
/// are `u` and every `fₖ` identities?
pub fn check_iro(a: &OAlgebra) -> IroReport {
    for (sig, table) in &a.theta {
        let Some(ocat) = a.operad.ops.get(sig) else { continue };
        let Some(mj) = a.categories.get(&sig.1) else { continue };
        for ((u, fs), g) in &table.on_mor {
            if !is_identity_mor(mj, g) {
                continue;
            }
            let all_id = is_identity_mor(ocat, u)
                && fs
                    .iter()
                    .zip(&sig.0)
                    .all(|(f, i)| a.categories.get(i).is_some_and(|c| is_identity_mor(c, f)));
            if !all_id {
                return IroReport {
                    holds: false,
                    witness: Some((sig.clone(), u.clone(), fs.clone(), g.clone())),
                };
            }
        }
    }
    IroReport { holds: true, witness: None }
}

// ---------------------------------------------------------------------------
// Free algebras
// ---------------------------------------------------------------------------

fn word_obj_id(sig: &Signature, op: &str, word: &[String]) -> String {
    format!("o:{}:{}:[{}]", sig_label(sig), op, word.join(","))
}

fn word_mor_id(sig: &Signature, op: &str, word: &[String]) -> String {
    format!("m:{}:{}:[{}]", sig_label(sig), op, word.join(","))
}

/// A free algebra together with its generator decomposition: every carrier
/// object/morphism records the operation and generator word it was built
/// from, so presentations are data rather than search.
#[derive(Debug, Clone)]
pub struct FreeOAlgebra {
    pub algebra: OAlgebra,
    pub generators: BTreeMap<String, FinCategory>,
    /// `(color, object id)` → `(signature, operation, generator objects)`.
    pub obj_word: BTreeMap<(String, String), (Signature, String, Vec<String>)>,
    /// `(color, morphism id)` → `(signature, operation, generator morphisms)`.
    pub mor_word: BTreeMap<(String, String), (Signature, String, Vec<String>)>,
}

/// Build the free algebra on a family of generator categories (keyed by
/// color; missing keys mean no generators). Requires every nonempty
/// operation category of the operad to be discrete.
pub fn free_o_algebra(
    operad: &ColoredOperad,
    generators: &BTreeMap<String, FinCategory>,
) -> Result<FreeOAlgebra> {
    for color in generators.keys() {
        if !operad.colors.contains(color) {
            return Err(OperadError::Shape(format!("generators at unknown color {color}")));
        }
    }
    for (color, cat) in generators {
        if !validate_category(cat).is_valid() {
            return Err(OperadError::Invalid(format!("generator category at {color} is invalid")));
        }
    }
    for (sig, cat) in &operad.ops {
        for m in &cat.morphisms {
            if !is_identity_mor(cat, &m.id) {
                return Err(OperadError::Shape(format!(
                    "operation category at {} is not discrete",
                    sig_label(sig)
                )));
            }
        }
    }

    let empty = empty_category();
    let mut categories: BTreeMap<String, FinCategory> = BTreeMap::new();
    let mut obj_word = BTreeMap::new();
    let mut mor_word = BTreeMap::new();

    for j in &operad.colors {
        let mut objects = Vec::new();
        let mut morphisms = Vec::new();
        let mut compose = BTreeMap::new();
        for (sig, ocat) in &operad.ops {
            if sig.1 != *j || ocat.objects.is_empty() {
                continue;
            }
            let gencats: Vec<&FinCategory> =
                sig.0.iter().map(|i| generators.get(i).unwrap_or(&empty)).collect();
            let gobj: Vec<Vec<String>> = gencats.iter().map(|c| c.objects.clone()).collect();
            let gmor: Vec<Vec<String>> = gencats.iter().map(|c| mor_ids(c)).collect();
            for x in &ocat.objects {
                for word in tuples(&gobj) {
                    let id = word_obj_id(sig, x, &word);
                    objects.push(id.clone());
                    obj_word.insert((j.clone(), id), (sig.clone(), x.clone(), word));
                }
                let mwords = tuples(&gmor);
                for mw in &mwords {
                    let ends: Option<Vec<(&String, &String)>> = mw
                        .iter()
                        .zip(&gencats)
                        .map(|(m, c)| c.morphism(m).map(|fm| (&fm.src, &fm.tgt)))
                        .collect();
                    let Some(ends) = ends else { continue };
                    let src_word: Vec<String> = ends.iter().map(|(s, _)| (*s).clone()).collect();
                    let tgt_word: Vec<String> = ends.iter().map(|(_, t)| (*t).clone()).collect();
                    let id = word_mor_id(sig, x, mw);
                    morphisms.push(FinMor {
                        id: id.clone(),
                        src: word_obj_id(sig, x, &src_word),
                        tgt: word_obj_id(sig, x, &tgt_word),
                    });
                    mor_word.insert((j.clone(), id), (sig.clone(), x.clone(), mw.clone()));
                }
                for mw1 in &mwords {
                    for mw2 in &mwords {
                        let mut comp = Vec::with_capacity(mw1.len());
                        let mut ok = true;
                        for (k, (f1, f2)) in mw1.iter().zip(mw2).enumerate() {
                            let (Some(a1), Some(a2)) =
                                (gencats[k].morphism(f1), gencats[k].morphism(f2))
                            else {
                                ok = false;
                                break;
                            };
                            if a2.src != a1.tgt {
                                ok = false;
                                break;
                            }
                            match gencats[k].compose_ids(f2, f1) {
                                Some(c) => comp.push(c.clone()),
                                None => {
                                    ok = false;
                                    break;
                                }
                            }
                        }
                        if ok {
                            compose.insert(
                                (word_mor_id(sig, x, mw2), word_mor_id(sig, x, mw1)),
                                word_mor_id(sig, x, &comp),
                            );
                        }
                    }
                }
            }
        }
        categories.insert(j.clone(), FinCategory::from_parts(objects, morphisms, compose));
    }

    // Actions by grafting: look up the substitution of the word signatures.
    let mut theta: BTreeMap<Signature, OpTable> = BTreeMap::new();
    for (sig, ocat) in &operad.ops {
        if ocat.objects.is_empty() {
            continue;
        }
        let mut table = OpTable::default();
        if sig.0.is_empty() {
            for x in &ocat.objects {
                let idx = ocat
                    .identity_of(x)
                    .ok_or_else(|| OperadError::Shape(format!("operation {x} has no identity")))?;
                table.on_obj.insert((x.clone(), Vec::new()), word_obj_id(sig, x, &[]));
                table.on_mor.insert((idx.clone(), Vec::new()), word_mor_id(sig, x, &[]));
            }
            theta.insert(sig.clone(), table);
            continue;
        }
        let carr_obj: Vec<Vec<String>> =
            sig.0.iter().map(|i| categories[i].objects.clone()).collect();
        let carr_mor: Vec<Vec<String>> = sig.0.iter().map(|i| mor_ids(&categories[i])).collect();
        for x in &ocat.objects {
            let idx = ocat
                .identity_of(x)
                .ok_or_else(|| OperadError::Shape(format!("operation {x} has no identity")))?
                .clone();
            for args in tuples(&carr_obj) {
                let parts: Vec<&(Signature, String, Vec<String>)> = args
                    .iter()
                    .zip(&sig.0)
                    .map(|(c, i)| &obj_word[&(i.clone(), c.clone())])
                    .collect();
                let psigs: Vec<Signature> = parts.iter().map(|p| p.0.clone()).collect();
                let Some(gt) = operad.gamma.get(&(sig.clone(), psigs.clone())) else { continue };
                let opids: Vec<String> = parts.iter().map(|p| p.1.clone()).collect();
                let Some(z) = gt.obj(x, &opids) else { continue };
                let comp = composed_signature(sig, &psigs);
                let word: Vec<String> = parts.iter().flat_map(|p| p.2.iter().cloned()).collect();
                table.on_obj.insert((x.clone(), args), word_obj_id(&comp, z, &word));
            }
            for fargs in tuples(&carr_mor) {
                let parts: Vec<&(Signature, String, Vec<String>)> = fargs
                    .iter()
                    .zip(&sig.0)
                    .map(|(f, i)| &mor_word[&(i.clone(), f.clone())])
                    .collect();
                let psigs: Vec<Signature> = parts.iter().map(|p| p.0.clone()).collect();
                let Some(gt) = operad.gamma.get(&(sig.clone(), psigs.clone())) else { continue };
                let opids: Vec<String> = parts.iter().map(|p| p.1.clone()).collect();
                let Some(z) = gt.obj(x, &opids) else { continue };
                let comp = composed_signature(sig, &psigs);
                let word: Vec<String> = parts.iter().flat_map(|p| p.2.iter().cloned()).collect();
                table.on_mor.insert((idx.clone(), fargs), word_mor_id(&comp, z, &word));
            }
        }
        theta.insert(sig.clone(), table);
    }

    let mut units = BTreeMap::new();
    for (sig, ocat) in &operad.ops {
        if sig.0.is_empty() {
            if let Some(x) = ocat.objects.first() {
                units.insert(sig.1.clone(), word_obj_id(sig, x, &[]));
            }
        }
    }

    Ok(FreeOAlgebra {
        algebra: OAlgebra { operad: operad.clone(), categories, theta, units },
        generators: generators.clone(),
        obj_word,
        mor_word,
    })
}

// ---------------------------------------------------------------------------
// Free lax morphisms
// ---------------------------------------------------------------------------

/// The free lax morphism on a functor family, with the summand decomposition
/// and the unit components that exhibit the adjunction.
#[derive(Debug, Clone)]
pub struct FreeLax {
    pub lax: LaxOMorphism,
    /// `(color, carrier object)` → inclusion of the `F` summand at the
    /// identity-operation presentation.
    pub eta: BTreeMap<(String, String), String>,
    /// `(color, carrier object)` → the presentations indexing the coproduct.
    pub summands: BTreeMap<(String, String), Vec<Presentation>>,
}

/// Build the free lax morphism `FF(F•)` on a family of functors
/// `F_i: C_i → M_i` out of the carriers of a free algebra: on objects the
/// coproduct over all presentations of the action value of the `F`-image of
/// the presentation, with laxity given by coproduct mediators. Errors if the
/// target lacks the required coproducts, if a mediator is not unique, or if
/// a presentation composite falls outside the stored substitution tables
/// (which happens at the truncation boundary of operads with nullary
/// operations).
pub fn free_lax_o(
    free: &FreeOAlgebra,
    target: &OAlgebra,
    funcs: &BTreeMap<String, FinFunctor>,
) -> Result<FreeLax> {
    let alg = &free.algebra;
    if alg.operad != target.operad {
        return Err(OperadError::Shape("free algebra and target are over different operads".into()));
    }
    for i in &alg.operad.colors {
        let fi = funcs
            .get(i)
            .ok_or_else(|| OperadError::Missing(format!("no functor for color {i}")))?;
        if Some(&fi.source) != alg.categories.get(i) || Some(&fi.target) != target.categories.get(i)
        {
            return Err(OperadError::Shape(format!("functor at {i} has wrong endpoints")));
        }
        if !fi.validate().is_valid() {
            return Err(OperadError::Invalid(format!("functor at {i} is not a functor")));
        }
    }

    // Coproducts of summand values per carrier object.
    let mut summands: BTreeMap<(String, String), Vec<Presentation>> = BTreeMap::new();
    let mut apexes: BTreeMap<(String, String), String> = BTreeMap::new();
    let mut incls: BTreeMap<(String, String), Vec<String>> = BTreeMap::new();
    let summand_value = |p: &Presentation| -> Result<String> {
        let (s, y, args) = p;
        let fargs: Option<Vec<String>> = args
            .iter()
            .zip(&s.0)
            .map(|(c, i)| funcs[i].object_map.get(c).cloned())
            .collect();
        let fargs = fargs.ok_or_else(|| OperadError::Missing("unmapped summand argument".into()))?;
        target
            .theta_obj(s, y, &fargs)
            .cloned()
            .ok_or_else(|| {
                OperadError::Missing(format!(
                    "target action undefined at presentation ({}, {y}, {args:?})",
                    sig_label(s)
                ))
            })
    };
    for j in &alg.operad.colors {
        let cj = &alg.categories[j];
        let mj = &target.categories[j];
        for c in &cj.objects {
            let pres = presentations_of(alg, j, c);
            if pres.is_empty() {
                return Err(OperadError::Invalid(format!("object {c} has no presentations")));
            }
            let vals = pres.iter().map(summand_value).collect::<Result<Vec<_>>>()?;
            let (apex, inc) = finite_coproduct(mj, &vals).ok_or_else(|| {
                OperadError::Invalid(format!("target at {j} has no coproduct of {vals:?}"))
            })?;
            summands.insert((j.clone(), c.clone()), pres);
            apexes.insert((j.clone(), c.clone()), apex);
            incls.insert((j.clone(), c.clone()), inc);
        }
    }

    // Functor part: mediate between the coproducts block by block.
    let mut functors = BTreeMap::new();
    for j in &alg.operad.colors {
        let cj = &alg.categories[j];
        let mj = &target.categories[j];
        let object_map: BTreeMap<String, String> = cj
            .objects
            .iter()
            .map(|c| (c.clone(), apexes[&(j.clone(), c.clone())].clone()))
            .collect();
        let mut morphism_map = BTreeMap::new();
        for fm in &cj.morphisms {
            let (_, _, morword) = &free.mor_word[&(j.clone(), fm.id.clone())];
            let key_src = (j.clone(), fm.src.clone());
            let key_tgt = (j.clone(), fm.tgt.clone());
            let pres_src = &summands[&key_src];
            let pres_tgt = &summands[&key_tgt];
            let mut legs = Vec::with_capacity(pres_src.len());
            for (s, y, args) in pres_src {
                // Cut the generator word of `fm` into one block per argument.
                let mut blocks = Vec::with_capacity(args.len());
                let mut pos = 0;
                for (arg, i) in args.iter().zip(&s.0) {
                    let (asig, aop, aword) = &free.obj_word[&(i.clone(), arg.clone())];
                    let seg = morword[pos..pos + aword.len()].to_vec();
                    pos += aword.len();
                    blocks.push((i.clone(), word_mor_id(asig, aop, &seg)));
                }
                if pos != morword.len() {
                    return Err(OperadError::Invalid(format!(
                        "generator word of {} does not split over ({}, {y})",
                        fm.id,
                        sig_label(s)
                    )));
                }
                let fblocks: Option<Vec<String>> = blocks
                    .iter()
                    .map(|(i, b)| funcs[i].morphism_map.get(b).cloned())
                    .collect();
                let fblocks =
                    fblocks.ok_or_else(|| OperadError::Missing("unmapped block morphism".into()))?;
                let idy = alg.operad.ops[s]
                    .identity_of(y)
                    .ok_or_else(|| OperadError::Shape(format!("operation {y} has no identity")))?;
                let mp = target.theta_mor(s, idy, &fblocks).cloned().ok_or_else(|| {
                    OperadError::Missing(format!(
                        "target action undefined on blocks of {} at ({}, {y})",
                        fm.id,
                        sig_label(s)
                    ))
                })?;
                let tgt_args: Option<Vec<String>> = blocks
                    .iter()
                    .map(|(i, b)| alg.categories[i].morphism(b).map(|m| m.tgt.clone()))
                    .collect();
                let tgt_args =
                    tgt_args.ok_or_else(|| OperadError::Invalid("unknown block morphism".into()))?;
                let p_tgt: Presentation = (s.clone(), y.clone(), tgt_args);
                let t_idx = pres_tgt.iter().position(|q| *q == p_tgt).ok_or_else(|| {
                    OperadError::Invalid(format!(
                        "translated presentation of {} not found",
                        fm.id
                    ))
                })?;
                let leg = mj
                    .compose_ids(&incls[&key_tgt][t_idx], &mp)
                    .ok_or_else(|| OperadError::Invalid("summand leg does not compose".into()))?;
                legs.push(leg.clone());
            }
            let med = unique_mediator(
                mj,
                &apexes[&key_src],
                &apexes[&key_tgt],
                &incls[&key_src],
                &legs,
            )
            .ok_or_else(|| {
                OperadError::Invalid(format!("no unique mediator for morphism {}", fm.id))
            })?;
            morphism_map.insert(fm.id.clone(), med);
        }
        functors.insert(
            j.clone(),
            FinFunctor {
                source: cj.clone(),
                target: mj.clone(),
                object_map,
                morphism_map,
            },
        );
    }

    // Units of the adjunction: the inclusion at the identity-operation
    // presentation.
    let mut eta = BTreeMap::new();
    for j in &alg.operad.colors {
        let uj = alg.operad.units.get(j).ok_or_else(|| {
            OperadError::Missing(format!("operad has no identity operation at {j}"))
        })?;
        for c in &alg.categories[j].objects {
            let key = (j.clone(), c.clone());
            let p0: Presentation = (unit_signature(j), uj.clone(), vec![c.clone()]);
            let idx = summands[&key].iter().position(|q| *q == p0).ok_or_else(|| {
                OperadError::Invalid(format!("no identity presentation for {c}"))
            })?;
            eta.insert(key.clone(), incls[&key][idx].clone());
        }
    }

    // Laxity: mediate out of the decomposition of θ_M(x, FF c•) indexed by
    // presentation tuples of the arguments.
    let mut laxity: BTreeMap<Signature, BTreeMap<(String, Vec<String>), String>> = BTreeMap::new();
    for (sig, table) in &alg.theta {
        let ocat = &alg.operad.ops[sig];
        let mj = &target.categories[&sig.1];
        let entry = laxity.entry(sig.clone()).or_default();
        for ((x, args), cval) in &table.on_obj {
            let arg_apexes: Vec<String> = args
                .iter()
                .zip(&sig.0)
                .map(|(a, i)| apexes[&(i.clone(), a.clone())].clone())
                .collect();
            let Some(a_obj) = target.theta_obj(sig, x, &arg_apexes) else { continue };
            let idx_op = ocat
                .identity_of(x)
                .ok_or_else(|| OperadError::Shape(format!("operation {x} has no identity")))?;
            let c_key = (sig.1.clone(), cval.clone());
            let pres_c = &summands[&c_key];

            let index_ranges: Vec<Vec<usize>> = args
                .iter()
                .zip(&sig.0)
                .map(|(a, i)| (0..summands[&(i.clone(), a.clone())].len()).collect())
                .collect();
            let mut injections = Vec::new();
            let mut legs = Vec::new();
            for combo in tuples(&index_ranges) {
                let chosen: Vec<&Presentation> = combo
                    .iter()
                    .zip(args.iter().zip(&sig.0))
                    .map(|(pi, (a, i))| &summands[&(i.clone(), a.clone())][*pi])
                    .collect();
                let inj_parts: Vec<String> = combo
                    .iter()
                    .zip(args.iter().zip(&sig.0))
                    .map(|(pi, (a, i))| incls[&(i.clone(), a.clone())][*pi].clone())
                    .collect();
                let inj = target.theta_mor(sig, idx_op, &inj_parts).cloned().ok_or_else(|| {
                    OperadError::Missing(format!(
                        "target action undefined on inclusions at {} ({x}, {args:?})",
                        sig_label(sig)
                    ))
                })?;
                let psigs: Vec<Signature> = chosen.iter().map(|p| p.0.clone()).collect();
                let ys: Vec<String> = chosen.iter().map(|p| p.1.clone()).collect();
                let gt = alg.operad.gamma.get(&(sig.clone(), psigs.clone())).ok_or_else(|| {
                    OperadError::Invalid(format!(
                        "presentation composite at {} ({x}, {args:?}) exceeds the stored substitution tables",
                        sig_label(sig)
                    ))
                })?;
                let z = gt.obj(x, &ys).ok_or_else(|| {
                    OperadError::Missing(format!(
                        "substitution undefined at ({x}, {ys:?})"
                    ))
                })?;
                let comp = composed_signature(sig, &psigs);
                let comp_args: Vec<String> =
                    chosen.iter().flat_map(|p| p.2.iter().cloned()).collect();
                let p_comp: Presentation = (comp, z.clone(), comp_args);
                let c_idx = pres_c.iter().position(|q| *q == p_comp).ok_or_else(|| {
                    OperadError::Invalid(format!(
                        "composed presentation missing for ({x}, {args:?})"
                    ))
                })?;
                injections.push(inj);
                legs.push(incls[&c_key][c_idx].clone());
            }
            if !is_jointly_universal(mj, a_obj, &injections) {
                return Err(OperadError::Invalid(format!(
                    "target action does not distribute over the coproducts at {} ({x}, {args:?})",
                    sig_label(sig)
                )));
            }
            let phi = unique_mediator(mj, a_obj, &apexes[&c_key], &injections, &legs)
                .ok_or_else(|| {
                    OperadError::Invalid(format!(
                        "no unique laxity mediator at {} ({x}, {args:?})",
                        sig_label(sig)
                    ))
                })?;
            entry.insert((x.clone(), args.clone()), phi);
        }
    }

    Ok(FreeLax {
        lax: LaxOMorphism {
            source: alg.clone(),
            target: target.clone(),
            functors,
            laxity,
        },
        eta,
        summands,
    })
}

/// Restrict a 2-morphism out of a free lax morphism along the unit: the
/// component family `c ↦ Σ(c) ∘ η(c)`, one natural transformation per color.
pub fn restrict_two_morphism(
    fl: &FreeLax,
    s: &LaxOTwoMorphism,
) -> Result<BTreeMap<String, BTreeMap<String, String>>> {
    let mut out = BTreeMap::new();
    for (i, comp) in &s.components {
        let mi = fl
            .lax
            .target
            .categories
            .get(i)
            .ok_or_else(|| OperadError::Missing(format!("no carrier at {i}")))?;
        let mut m = BTreeMap::new();
        for (c, sc) in comp {
            let e = fl
                .eta
                .get(&(i.clone(), c.clone()))
                .ok_or_else(|| OperadError::Missing(format!("no unit component at {i}:{c}")))?;
            let r = mi
                .compose_ids(sc, e)
                .ok_or_else(|| OperadError::Invalid(format!("restriction at {i}:{c} does not compose")))?;
            m.insert(c.clone(), r.clone());
        }
        out.insert(i.clone(), m);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

fn jget<'a>(v: &'a Value, k: &str) -> Result<&'a Value> {
    v.get(k).ok_or_else(|| OperadError::Invalid(format!("missing field {k}")))
}

fn jstr(v: &Value) -> Result<String> {
    v.as_str().map(str::to_string).ok_or_else(|| OperadError::Invalid("expected a string".into()))
}

fn jarr(v: &Value) -> Result<&Vec<Value>> {
    v.as_array().ok_or_else(|| OperadError::Invalid("expected an array".into()))
}

fn jstrs(v: &Value) -> Result<Vec<String>> {
    jarr(v)?.iter().map(jstr).collect()
}

fn sig_to_json(s: &Signature) -> Value {
    json!({"inputs": s.0, "output": s.1})
}

fn sig_from_json(v: &Value) -> Result<Signature> {
    Ok((jstrs(jget(v, "inputs")?)?, jstr(jget(v, "output")?)?))
}

fn table_to_json(t: &OpTable) -> Value {
    let entries = |m: &BTreeMap<(String, Vec<String>), String>| -> Vec<Value> {
        m.iter().map(|((x, a), v)| json!([x, a, v])).collect()
    };
    json!({"on_obj": entries(&t.on_obj), "on_mor": entries(&t.on_mor)})
}

fn table_from_json(v: &Value) -> Result<OpTable> {
    let read = |v: &Value| -> Result<BTreeMap<(String, Vec<String>), String>> {
        let mut out = BTreeMap::new();
        for e in jarr(v)? {
            let a = jarr(e)?;
            if a.len() != 3 {
                return Err(OperadError::Invalid("table entry is not a triple".into()));
            }
            out.insert((jstr(&a[0])?, jstrs(&a[1])?), jstr(&a[2])?);
        }
        Ok(out)
    };
    Ok(OpTable { on_obj: read(jget(v, "on_obj")?)?, on_mor: read(jget(v, "on_mor")?)? })
}

fn strmap_from_json(v: &Value) -> Result<BTreeMap<String, String>> {
    let obj = v
        .as_object()
        .ok_or_else(|| OperadError::Invalid("expected an object".into()))?;
    obj.iter().map(|(k, v)| Ok((k.clone(), jstr(v)?))).collect()
}

pub fn operad_to_json(o: &ColoredOperad) -> Value {
    json!({
        "colors": o.colors,
        "operations": o
            .ops
            .iter()
            .map(|(s, c)| json!({"signature": sig_to_json(s), "category": c.to_json()}))
            .collect::<Vec<_>>(),
        "gamma": o
            .gamma
            .iter()
            .map(|((outer, inners), t)| {
                json!({
                    "outer": sig_to_json(outer),
                    "inners": inners.iter().map(sig_to_json).collect::<Vec<_>>(),
                    "table": table_to_json(t),
                })
            })
            .collect::<Vec<_>>(),
        "units": o.units,
    })
}

pub fn operad_from_json(v: &Value) -> Result<ColoredOperad> {
    let colors = jstrs(jget(v, "colors")?)?;
    let mut ops = BTreeMap::new();
    for e in jarr(jget(v, "operations")?)? {
        let sig = sig_from_json(jget(e, "signature")?)?;
        let cat = FinCategory::from_json(jget(e, "category")?)
            .map_err(|err| OperadError::Invalid(err.to_string()))?;
        ops.insert(sig, cat);
    }
    let mut gamma = BTreeMap::new();
    for e in jarr(jget(v, "gamma")?)? {
        let outer = sig_from_json(jget(e, "outer")?)?;
        let inners = jarr(jget(e, "inners")?)?
            .iter()
            .map(sig_from_json)
            .collect::<Result<Vec<_>>>()?;
        gamma.insert((outer, inners), table_from_json(jget(e, "table")?)?);
    }
    let units = strmap_from_json(jget(v, "units")?)?;
    Ok(ColoredOperad { colors, ops, gamma, units })
}

pub fn algebra_to_json(a: &OAlgebra) -> Value {
    json!({
        "operad": operad_to_json(&a.operad),
        "categories": a
            .categories
            .iter()
            .map(|(c, cat)| (c.clone(), cat.to_json()))
            .collect::<serde_json::Map<String, Value>>(),
        "theta": a
            .theta
            .iter()
            .map(|(s, t)| json!({"signature": sig_to_json(s), "table": table_to_json(t)}))
            .collect::<Vec<_>>(),
        "units": a.units,
    })
}

pub fn algebra_from_json(v: &Value) -> Result<OAlgebra> {
    let operad = operad_from_json(jget(v, "operad")?)?;
    let cats = jget(v, "categories")?
        .as_object()
        .ok_or_else(|| OperadError::Invalid("categories must be an object".into()))?;
    let mut categories = BTreeMap::new();
    for (c, cv) in cats {
        categories.insert(
            c.clone(),
            FinCategory::from_json(cv).map_err(|err| OperadError::Invalid(err.to_string()))?,
        );
    }
    let mut theta = BTreeMap::new();
    for e in jarr(jget(v, "theta")?)? {
        theta.insert(
            sig_from_json(jget(e, "signature")?)?,
            table_from_json(jget(e, "table")?)?,
        );
    }
    let units = strmap_from_json(jget(v, "units")?)?;
    Ok(OAlgebra { operad, categories, theta, units })
}

// ---------------------------------------------------------------------------
// Samples
// ---------------------------------------------------------------------------

pub mod samples {
    use super::*;
    use crate::sx::{chains_between, hom_s, Chain, ChainMap};

    /// One color, only the unary identity operation.
    pub fn tautological() -> ColoredOperad {
        let color = "c".to_string();
        let sig = unit_signature(&color);
        let mut ops = BTreeMap::new();
        ops.insert(sig.clone(), unit_category());
        let mut t = OpTable::default();
        t.on_obj.insert(("*".to_string(), vec!["*".to_string()]), "*".to_string());
        t.on_mor.insert(("id".to_string(), vec!["id".to_string()]), "id".to_string());
        let mut gamma = BTreeMap::new();
        gamma.insert((sig.clone(), vec![sig]), t);
        ColoredOperad {
            colors: vec![color.clone()],
            ops,
            gamma,
            units: BTreeMap::from([(color, "*".to_string())]),
        }
    }

    /// The algebra whose carriers are all unit categories.
    pub fn terminal_algebra(operad: &ColoredOperad) -> OAlgebra {
        let categories: BTreeMap<String, FinCategory> =
            operad.colors.iter().map(|c| (c.clone(), unit_category())).collect();
        let mut theta = BTreeMap::new();
        for (sig, ocat) in &operad.ops {
            if ocat.objects.is_empty() {
                continue;
            }
            let mut t = OpTable::default();
            for x in &ocat.objects {
                t.on_obj.insert((x.clone(), vec!["*".to_string(); sig.0.len()]), "*".to_string());
            }
            for u in &ocat.morphisms {
                t.on_mor.insert((u.id.clone(), vec!["id".to_string(); sig.0.len()]), "id".to_string());
            }
            theta.insert(sig.clone(), t);
        }
        let units = operad
            .ops
            .iter()
            .filter(|(s, c)| s.0.is_empty() && !c.objects.is_empty())
            .map(|(s, _)| (s.1.clone(), "*".to_string()))
            .collect();
        OAlgebra { operad: operad.clone(), categories, theta, units }
    }

    /// Strict one-object 2-category with hom the group Z/2 on a single
    /// 1-cell `w`: 2-cells `1` and `s`, both compositions multiply signs.
    pub fn z2_twocat() -> TwoCat {
        let mut compose = BTreeMap::new();
        for (a, b, c) in [("1", "1", "1"), ("1", "s", "s"), ("s", "1", "s"), ("s", "s", "1")] {
            compose.insert((b.to_string(), a.to_string()), c.to_string());
        }
        let hom = FinCategory::from_parts(
            vec!["w".to_string()],
            vec![
                FinMor { id: "1".to_string(), src: "w".to_string(), tgt: "w".to_string() },
                FinMor { id: "s".to_string(), src: "w".to_string(), tgt: "w".to_string() },
            ],
            compose,
        );
        let mut comp_mor_table = BTreeMap::new();
        for (a, b, c) in [("1", "1", "1"), ("1", "s", "s"), ("s", "1", "s"), ("s", "s", "1")] {
            comp_mor_table.insert((a.to_string(), b.to_string()), c.to_string());
        }
        TwoCat {
            objects: vec!["A".to_string()],
            homs: BTreeMap::from([(("A".to_string(), "A".to_string()), hom)]),
            comp_obj: BTreeMap::from([(
                ("A".to_string(), "A".to_string(), "A".to_string()),
                BTreeMap::from([(("w".to_string(), "w".to_string()), "w".to_string())]),
            )]),
            comp_mor: BTreeMap::from([(
                ("A".to_string(), "A".to_string(), "A".to_string()),
                comp_mor_table,
            )]),
            ids: BTreeMap::from([("A".to_string(), "w".to_string())]),
        }
    }

    pub fn z2_algebra(max_arity: usize) -> OAlgebra {
        twocat_to_algebra(&z2_twocat(), &build_ox(&["A"], max_arity)).expect("z2 algebra")
    }

    /// The sign endomorphism of the Z/2 algebra: identity functors, laxity
    /// `s` at even arities and `1` at odd ones.
    pub fn lax_sign(a: &OAlgebra) -> LaxOMorphism {
        let mut f = identity_lax(a);
        for (sig, m) in &mut f.laxity {
            if sig.0.len() % 2 == 0 {
                for v in m.values_mut() {
                    *v = "s".to_string();
                }
            }
        }
        f
    }

    /// The chain poset `0 ≤ 1 ≤ … ≤ k` as a category; morphisms `a<=b`.
    pub fn semilattice_category(k: usize) -> FinCategory {
        let objects: Vec<String> = (0..=k).map(|i| i.to_string()).collect();
        let mut morphisms = Vec::new();
        let mut compose = BTreeMap::new();
        for a in 0..=k {
            for b in a..=k {
                morphisms.push(FinMor {
                    id: format!("{a}<={b}"),
                    src: a.to_string(),
                    tgt: b.to_string(),
                });
            }
        }
        for a in 0..=k {
            for b in a..=k {
                for c in b..=k {
                    compose.insert((format!("{b}<={c}"), format!("{a}<={b}")), format!("{a}<={c}"));
                }
            }
        }
        FinCategory::from_parts(objects, morphisms, compose)
    }

    fn le_parts(id: &str) -> (usize, usize) {
        let (a, b) = id.split_once("<=").expect("morphism of a chain poset");
        (a.parse().expect("chain object"), b.parse().expect("chain object"))
    }

    /// Algebra over a pair-colored operad with every carrier the chain
    /// poset `0..=k` and every action the pointwise maximum.
    pub fn max_algebra_over(operad: &ColoredOperad, k: usize) -> OAlgebra {
        let categories: BTreeMap<String, FinCategory> = operad
            .colors
            .iter()
            .map(|c| (c.clone(), semilattice_category(k)))
            .collect();
        let mut theta = BTreeMap::new();
        for (sig, ocat) in &operad.ops {
            if ocat.objects.is_empty() {
                continue;
            }
            let mut t = OpTable::default();
            let n = sig.0.len();
            let obj_parts = vec![(0..=k).map(|i| i.to_string()).collect::<Vec<_>>(); n];
            for x in &ocat.objects {
                for args in tuples(&obj_parts) {
                    let m = args.iter().map(|a| a.parse::<usize>().unwrap()).max().unwrap_or(0);
                    t.on_obj.insert((x.clone(), args), m.to_string());
                }
            }
            let mor_parts = vec![
                {
                    let mut ms = Vec::new();
                    for a in 0..=k {
                        for b in a..=k {
                            ms.push(format!("{a}<={b}"));
                        }
                    }
                    ms
                };
                n
            ];
            for u in &ocat.morphisms {
                for fs in tuples(&mor_parts) {
                    let (mut ms, mut mt) = (0usize, 0usize);
                    for f in &fs {
                        let (a, b) = le_parts(f);
                        ms = ms.max(a);
                        mt = mt.max(b);
                    }
                    t.on_mor.insert((u.id.clone(), fs), format!("{ms}<={mt}"));
                }
            }
            theta.insert(sig.clone(), t);
        }
        let units = operad
            .ops
            .iter()
            .filter(|(s, c)| s.0.is_empty() && !c.objects.is_empty())
            .map(|(s, _)| (s.1.clone(), "0".to_string()))
            .collect();
        OAlgebra { operad: operad.clone(), categories, theta, units }
    }

    pub fn max_algebra(x: &[&str], max_arity: usize, k: usize) -> OAlgebra {
        max_algebra_over(&build_ox(x, max_arity), k)
    }

    /// The 2-categorical chain algebra: carriers are categories of chains
    /// between labels with collapse maps as morphisms, the action is
    /// concatenation, truncated at degree `n`. Built over the nonunital
    /// pair operad.
    pub fn chain_algebra(labels: &[&str], n: usize) -> OAlgebra {
        let operad = nonunital(&build_ox(labels, n));
        let ls: Vec<String> = labels.iter().map(|s| s.to_string()).collect();
        let mut categories = BTreeMap::new();
        let mut chain_lists: BTreeMap<String, Vec<Chain>> = BTreeMap::new();
        let mut map_lists: BTreeMap<String, Vec<ChainMap>> = BTreeMap::new();
        for color in &operad.colors {
            let (a, b) = color.split_once(',').expect("pair color");
            let chains = chains_between(&ls, a, b, n);
            let mut maps = Vec::new();
            for t in &chains {
                for s in &chains {
                    maps.extend(hom_s(t, s));
                }
            }
            let objects: Vec<String> = chains.iter().map(Chain::key).collect();
            let morphisms: Vec<FinMor> = maps
                .iter()
                .map(|m| FinMor { id: m.key(), src: m.source.key(), tgt: m.target().key() })
                .collect();
            let mut compose = BTreeMap::new();
            for f in &maps {
                for g in &maps {
                    if g.source == f.target() {
                        let gf = ChainMap::compose(g, f).expect("endpoint-checked");
                        compose.insert((g.key(), f.key()), gf.key());
                    }
                }
            }
            categories.insert(color.clone(), FinCategory::from_parts(objects, morphisms, compose));
            chain_lists.insert(color.clone(), chains);
            map_lists.insert(color.clone(), maps);
        }

        let mut theta = BTreeMap::new();
        for sig in operad.ops.keys() {
            let mut t = OpTable::default();
            let slot_chains: Vec<Vec<Chain>> =
                sig.0.iter().map(|c| chain_lists[c].clone()).collect();
            for combo in tuples(&slot_chains) {
                let cat = crate::sx::concat_all(&combo).expect("slots chain");
                if cat.degree() <= n {
                    t.on_obj.insert(
                        ("*".to_string(), combo.iter().map(Chain::key).collect()),
                        cat.key(),
                    );
                }
            }
            let slot_maps: Vec<Vec<ChainMap>> =
                sig.0.iter().map(|c| map_lists[c].clone()).collect();
            for combo in tuples(&slot_maps) {
                let tens = ChainMap::tensor_all(&combo).expect("slots chain");
                if tens.source.degree() <= n {
                    t.on_mor.insert(
                        ("id".to_string(), combo.iter().map(ChainMap::key).collect()),
                        tens.key(),
                    );
                }
            }
            theta.insert(sig.clone(), t);
        }
        OAlgebra { operad, categories, theta, units: BTreeMap::new() }
    }

    /// Free algebra over `O_X` for `|X| = 1` on one generator.
    pub fn one_color_free(max_arity: usize) -> FreeOAlgebra {
        let o = build_ox(&["A"], max_arity);
        let gens = BTreeMap::from([("A,A".to_string(), discrete_category(&["g"]))]);
        free_o_algebra(&o, &gens).expect("free algebra")
    }

    /// Free algebra over the nonunital two-color pair operad on generators
    /// `g: (A,B)` and `b: (B,B)`.
    pub fn two_color_free(max_arity: usize) -> FreeOAlgebra {
        let o = nonunital(&build_ox(&["A", "B"], max_arity));
        let gens = BTreeMap::from([
            ("A,B".to_string(), discrete_category(&["g"])),
            ("B,B".to_string(), discrete_category(&["b"])),
        ]);
        free_o_algebra(&o, &gens).expect("free algebra")
    }

    /// Functor family from the free carriers into a thin target, specified
    /// by an object assignment; morphisms are mapped to the unique
    /// compatible morphism.
    pub fn functor_family_by_objects(
        free: &FreeOAlgebra,
        target: &OAlgebra,
        assign: &BTreeMap<(String, String), String>,
    ) -> Result<BTreeMap<String, FinFunctor>> {
        let mut out = BTreeMap::new();
        for i in &free.algebra.operad.colors {
            let src = &free.algebra.categories[i];
            let tgt = target
                .categories
                .get(i)
                .ok_or_else(|| OperadError::Missing(format!("no target carrier at {i}")))?;
            let mut object_map = BTreeMap::new();
            for c in &src.objects {
                let v = assign
                    .get(&(i.clone(), c.clone()))
                    .ok_or_else(|| OperadError::Missing(format!("no assignment for {i}:{c}")))?;
                if !tgt.objects.contains(v) {
                    return Err(OperadError::Invalid(format!("{v} is not a target object")));
                }
                object_map.insert(c.clone(), v.clone());
            }
            let mut morphism_map = BTreeMap::new();
            for m in &src.morphisms {
                let hom = tgt.hom(&object_map[&m.src], &object_map[&m.tgt]);
                match hom.as_slice() {
                    [h] => {
                        morphism_map.insert(m.id.clone(), h.clone());
                    }
                    _ => {
                        return Err(OperadError::Invalid(format!(
                            "assignment is not functorial at {i}:{} ({} candidates)",
                            m.id,
                            hom.len()
                        )))
                    }
                }
            }
            out.insert(
                i.clone(),
                FinFunctor {
                    source: src.clone(),
                    target: tgt.clone(),
                    object_map,
                    morphism_map,
                },
            );
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::samples::*;
    use super::*;
    use proptest::prelude::*;

    /// One-color unary operad whose three operations multiply by the given
    /// table, with `p` as two-sided unit.
    fn magma(qq: &str, qr: &str, rq: &str, rr: &str) -> ColoredOperad {
        let color = "c".to_string();
        let sig = unit_signature(&color);
        let cat = discrete_category(&["p", "q", "r"]);
        let mut mult = BTreeMap::new();
        for x in ["p", "q", "r"] {
            mult.insert(("p", x), x);
            mult.insert((x, "p"), x);
        }
        mult.insert(("q", "q"), qq);
        mult.insert(("q", "r"), qr);
        mult.insert(("r", "q"), rq);
        mult.insert(("r", "r"), rr);
        let mut t = OpTable::default();
        for ((x, y), v) in &mult {
            t.on_obj.insert((x.to_string(), vec![y.to_string()]), v.to_string());
            t.on_mor
                .insert((format!("id_{x}"), vec![format!("id_{y}")]), format!("id_{v}"));
        }
        let mut ops = BTreeMap::new();
        ops.insert(sig.clone(), cat);
        let mut gamma = BTreeMap::new();
        gamma.insert((sig.clone(), vec![sig]), t);
        ColoredOperad {
            colors: vec![color.clone()],
            ops,
            gamma,
            units: BTreeMap::from([(color, "p".to_string())]),
        }
    }

    fn magma_is_associative(qq: &str, qr: &str, rq: &str, rr: &str) -> bool {
        let mult = |x: &str, y: &str| -> String {
            if x == "p" {
                return y.to_string();
            }
            if y == "p" {
                return x.to_string();
            }
            match (x, y) {
                ("q", "q") => qq,
                ("q", "r") => qr,
                ("r", "q") => rq,
                ("r", "r") => rr,
                _ => unreachable!(),
            }
            .to_string()
        };
        for x in ["p", "q", "r"] {
            for y in ["p", "q", "r"] {
                for z in ["p", "q", "r"] {
                    if mult(&mult(x, y), z) != mult(x, &mult(y, z)) {
                        return false;
                    }
                }
            }
        }
        true
    }

    #[test]
    fn tautological_operad_is_valid() {
        assert!(validate_operad(&tautological(), 2).is_valid());
    }

    #[test]
    fn ox_operation_categories() {
        let o = build_ox(&["A", "B", "C"], 2);
        let good: Signature = (
            vec!["A,B".to_string(), "B,C".to_string()],
            "A,C".to_string(),
        );
        assert_eq!(o.op_category(&good).map(|c| c.objects.len()), Some(1));
        let bad: Signature = (
            vec!["A,B".to_string(), "B,C".to_string()],
            "A,B".to_string(),
        );
        assert!(o.op_category(&bad).is_none());
        assert!(o.op_category(&(Vec::new(), "A,A".to_string())).is_some());
        assert!(o.op_category(&(Vec::new(), "A,B".to_string())).is_none());

        // On one loop color every chain signature carries the unit category.
        let o1 = build_ox(&["A"], 3);
        for n in 1..=3 {
            let sig: Signature = (vec!["A,A".to_string(); n], "A,A".to_string());
            assert_eq!(o1.op_category(&sig).map(|c| c.objects.len()), Some(1));
        }
    }

    #[test]
    fn ox_validates_small() {
        assert!(validate_operad(&build_ox(&["A", "B"], 3), 3).is_valid());
        assert!(validate_operad(&build_ox(&["A", "B", "C"], 2), 2).is_valid());
        assert!(validate_operad(&nonunital(&build_ox(&["A", "B"], 3)), 3).is_valid());
    }

    #[test]
    fn nonassociative_magma_reported() {
        let m = magma("r", "q", "p", "p");
        assert!(!magma_is_associative("r", "q", "p", "p"));
        let report = validate_operad(&m, 1);
        assert!(report.violations.iter().any(|v| v.contains("associativity")), "{report}");
    }

    #[test]
    fn missing_gamma_table_reported() {
        let mut o = build_ox(&["A", "B"], 2);
        let key = o.gamma.keys().next().cloned().expect("some table");
        o.gamma.remove(&key);
        let report = validate_operad(&o, 2);
        assert!(report.violations.iter().any(|v| v.contains("no substitution table")), "{report}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn magma_validity_matches_associativity(
            qq in prop::sample::select(vec!["p", "q", "r"]),
            qr in prop::sample::select(vec!["p", "q", "r"]),
            rq in prop::sample::select(vec!["p", "q", "r"]),
            rr in prop::sample::select(vec!["p", "q", "r"]),
        ) {
            let expected = magma_is_associative(qq, qr, rq, rr);
            let got = validate_operad(&magma(qq, qr, rq, rr), 1).is_valid();
            prop_assert_eq!(got, expected);
        }

        #[test]
        fn chain_algebras_validate_and_reflect(n in 1usize..=2, l in 1usize..=2) {
            let labels: Vec<&str> = ["A", "B"][..l].to_vec();
            let a = chain_algebra(&labels, n);
            prop_assert!(validate_operad(&a.operad, n).is_valid());
            prop_assert!(validate_algebra(&a).is_valid());
            prop_assert!(check_iro(&a).holds);
        }
    }

    #[test]
    fn z2_algebra_round_trips() {
        let t = z2_twocat();
        let o = build_ox(&["A"], 3);
        let a = twocat_to_algebra(&t, &o).expect("algebra");
        assert!(validate_algebra(&a).is_valid(), "{}", validate_algebra(&a));
        let back = algebra_to_twocat(&a).expect("2-category");
        assert_eq!(back, t);
        let again = twocat_to_algebra(&back, &o).expect("algebra");
        assert_eq!(again, a);
    }

    #[test]
    fn z2_action_associates() {
        let a = z2_algebra(3);
        let tern: Signature = (vec!["A,A".to_string(); 3], "A,A".to_string());
        let bin: Signature = (vec!["A,A".to_string(); 2], "A,A".to_string());
        let s = "s".to_string();
        let one = "1".to_string();
        // θ₃(s, s, 1) against the two nested binary composites.
        let direct = a.theta_mor(&tern, "id", &[s.clone(), s.clone(), one.clone()]).unwrap();
        let inner = a.theta_mor(&bin, "id", &[s.clone(), s.clone()]).unwrap().clone();
        let nested_l = a.theta_mor(&bin, "id", &[inner, one.clone()]).unwrap();
        let inner_r = a.theta_mor(&bin, "id", &[s.clone(), one]).unwrap().clone();
        let nested_r = a.theta_mor(&bin, "id", &[s, inner_r]).unwrap();
        assert_eq!(direct, nested_l);
        assert_eq!(direct, nested_r);
        assert_eq!(direct, "1");
    }

    #[test]
    fn trivial_twocat_from_terminal_algebra() {
        let a = terminal_algebra(&build_ox(&["A", "B"], 2));
        assert!(validate_algebra(&a).is_valid());
        let t = algebra_to_twocat(&a).expect("2-category");
        for cat in t.homs.values() {
            assert_eq!(cat.objects, vec!["*".to_string()]);
        }
        let back = twocat_to_algebra(&t, &a.operad).expect("algebra");
        assert_eq!(back, a);
    }

    #[test]
    fn algebra_corpus_validates() {
        let corpus = vec![
            terminal_algebra(&build_ox(&["A", "B"], 2)),
            z2_algebra(3),
            max_algebra(&["A", "B"], 2, 1),
            chain_algebra(&["A", "B"], 2),
        ];
        for a in &corpus {
            let r = validate_algebra(a);
            assert!(r.is_valid(), "{r}");
        }
    }

    #[test]
    fn unit_object_mismatch_reported() {
        let mut a = z2_algebra(2);
        a.units.insert("A,A".to_string(), "missing".to_string());
        let r = validate_algebra(&a);
        assert!(!r.is_valid());
    }

    #[test]
    fn identity_lax_is_valid() {
        let f = identity_lax(&z2_algebra(3));
        let r = validate_lax_o(&f);
        assert!(r.is_valid(), "{r}");
    }

    #[test]
    fn sign_family_is_lax() {
        let f = lax_sign(&z2_algebra(3));
        let r = validate_lax_o(&f);
        assert!(r.is_valid(), "{r}");
    }

    #[test]
    fn planted_incoherent_laxity_reported() {
        let a = z2_algebra(3);
        let mut f = identity_lax(&a);
        let bin: Signature = (vec!["A,A".to_string(); 2], "A,A".to_string());
        for v in f.laxity.get_mut(&bin).expect("binary laxity").values_mut() {
            *v = "s".to_string();
        }
        let r = validate_lax_o(&f);
        assert!(r.violations.iter().any(|v| v.contains("coherence")), "{r}");
    }

    #[test]
    fn lax_composition_group() {
        let a = z2_algebra(3);
        let id = identity_lax(&a);
        let fs = lax_sign(&a);
        let ss = compose_lax_o(&fs, &fs).expect("composable");
        assert!(lax_eq(&ss, &id));
        let fid = compose_lax_o(&fs, &id).expect("composable");
        assert!(lax_eq(&fid, &fs));
        let idf = compose_lax_o(&id, &fs).expect("composable");
        assert!(lax_eq(&idf, &fs));
        let r = validate_lax_o(&ss);
        assert!(r.is_valid(), "{r}");
        let left = compose_lax_o(&compose_lax_o(&fs, &fs).unwrap(), &fs).unwrap();
        let right = compose_lax_o(&fs, &compose_lax_o(&fs, &fs).unwrap()).unwrap();
        assert!(lax_eq(&left, &right));
    }

    #[test]
    fn two_morphism_enumeration() {
        let a = z2_algebra(2);
        let id = identity_lax(&a);
        let fs = lax_sign(&a);
        let up = two_morphisms_between(&id, &fs);
        assert_eq!(up.len(), 1);
        assert_eq!(up[0].components["A,A"]["w"], "s");
        let loops = two_morphisms_between(&id, &id);
        assert_eq!(loops.len(), 1);
        assert_eq!(loops[0].components["A,A"]["w"], "1");
        let down = two_morphisms_between(&fs, &id);
        assert_eq!(down.len(), 1);
        // Vertical composite id ⟹ F_s ⟹ id is the identity 2-morphism.
        let both = compose_two_morphisms(&down[0], &up[0]).expect("vertical");
        assert_eq!(both.components["A,A"]["w"], "1");
        assert!(validate_two_morphism(&both).is_valid());
    }

    #[test]
    fn grothendieck_of_terminal_is_base_copy() {
        let a = terminal_algebra(&build_ox(&["A", "B"], 2));
        let g = grothendieck_operad(&a).expect("construction");
        let base_nonempty = a.operad.ops.values().filter(|c| !c.objects.is_empty()).count();
        assert_eq!(g.operad.ops.len(), base_nonempty);
        for cat in g.operad.ops.values() {
            assert_eq!(cat.objects.len(), 1);
        }
        let r = validate_operad(&g.operad, 2);
        assert!(r.is_valid(), "{r}");
        let p = validate_groth_projection(&a, &g);
        assert!(p.is_valid(), "{p}");
    }

    #[test]
    fn grothendieck_counts_max() {
        let a = max_algebra(&["A"], 2, 1);
        let g = grothendieck_operad(&a).expect("construction");
        // At the binary base signature the operation count over (c₁,c₂;c)
        // is |hom(max(c₁,c₂), c)|: five nonempty singleton categories.
        let bin_sigs: Vec<&Signature> = g
            .operad
            .ops
            .keys()
            .filter(|s| s.0.len() == 2)
            .collect();
        assert_eq!(bin_sigs.len(), 5);
        for s in bin_sigs {
            assert_eq!(g.operad.ops[s].objects.len(), 1);
        }
        let r = validate_operad(&g.operad, 2);
        assert!(r.is_valid(), "{r}");
        let p = validate_groth_projection(&a, &g);
        assert!(p.is_valid(), "{p}");
    }

    #[test]
    fn grothendieck_corpus() {
        let z2 = z2_algebra(2);
        let gz = grothendieck_operad(&z2).expect("construction");
        let r = validate_operad(&gz.operad, 2);
        assert!(r.is_valid(), "{r}");
        assert!(validate_groth_projection(&z2, &gz).is_valid());

        // Degree truncation caps composite chains below what the arity
        // bound alone would allow, so presence is only checked at bound 1;
        // table-level laws are still checked in full.
        let ch = chain_algebra(&["A", "B"], 2);
        let gc = grothendieck_operad(&ch).expect("construction");
        let r = validate_operad(&gc.operad, 1);
        assert!(r.is_valid(), "{r}");
        assert!(validate_groth_projection(&ch, &gc).is_valid());
    }

    #[test]
    fn iro_corpus() {
        let free = one_color_free(2);
        assert!(check_iro(&free.algebra).holds);
        assert!(check_iro(&chain_algebra(&["A", "B"], 2)).holds);
        let m = check_iro(&max_algebra(&["A"], 2, 1));
        assert!(!m.holds);
        let (_, _, fs, g) = m.witness.expect("witness");
        assert!(fs.iter().any(|f| f != "0<=0" && f != "1<=1"));
        assert!(g == "1<=1" || g == "0<=0");
    }

    #[test]
    fn free_word_counts_one_color() {
        let free = one_color_free(3);
        let c = &free.algebra.categories["A,A"];
        assert_eq!(c.objects.len(), 4);
        let mut by_len: BTreeMap<usize, String> = BTreeMap::new();
        for o in &c.objects {
            let (_, _, word) = &free.obj_word[&("A,A".to_string(), o.clone())];
            by_len.insert(word.len(), o.clone());
        }
        let counts: Vec<usize> = (0..=3)
            .map(|l| presentations_of(&free.algebra, "A,A", &by_len[&l]).len())
            .collect();
        assert_eq!(counts, vec![4, 6, 10, 15]);
        assert!(validate_algebra(&free.algebra).is_valid());
    }

    #[test]
    fn free_two_color_structure() {
        let free = two_color_free(3);
        let ab = &free.algebra.categories["A,B"];
        let bb = &free.algebra.categories["B,B"];
        assert_eq!(ab.objects.len(), 3);
        assert_eq!(bb.objects.len(), 3);
        assert!(free.algebra.categories["A,A"].objects.is_empty());
        assert!(free.algebra.categories["B,A"].objects.is_empty());
        let by_word = |color: &str, len: usize| -> String {
            free.algebra.categories[color]
                .objects
                .iter()
                .find(|o| free.obj_word[&(color.to_string(), (*o).clone())].2.len() == len)
                .expect("word of that length")
                .clone()
        };
        assert_eq!(presentations_of(&free.algebra, "B,B", &by_word("B,B", 1)).len(), 1);
        assert_eq!(presentations_of(&free.algebra, "A,B", &by_word("A,B", 2)).len(), 2);
        assert_eq!(presentations_of(&free.algebra, "A,B", &by_word("A,B", 3)).len(), 4);
        assert_eq!(presentations_of(&free.algebra, "B,B", &by_word("B,B", 3)).len(), 4);
        let r = validate_algebra(&free.algebra);
        assert!(r.is_valid(), "{r}");
        // The binary action grafts words: θ(*, (g-word, b-word)) is the
        // length-2 word.
        let bin: Signature = (
            vec!["A,B".to_string(), "B,B".to_string()],
            "A,B".to_string(),
        );
        let v = free
            .algebra
            .theta_obj(&bin, "*", &[by_word("A,B", 1), by_word("B,B", 1)])
            .expect("graft");
        assert_eq!(free.obj_word[&("A,B".to_string(), v.clone())].2, vec!["g", "b"]);
    }

    #[test]
    fn free_lax_overshoot_errors() {
        // With nullary operations every object has presentations at every
        // arity, so composites escape the stored tables.
        let free = one_color_free(2);
        let target = max_algebra(&["A"], 2, 1);
        let assign: BTreeMap<(String, String), String> = free.algebra.categories["A,A"]
            .objects
            .iter()
            .map(|o| (("A,A".to_string(), o.clone()), "0".to_string()))
            .collect();
        let funcs = functor_family_by_objects(&free, &target, &assign).expect("family");
        match free_lax_o(&free, &target, &funcs) {
            Err(OperadError::Invalid(msg)) => assert!(msg.contains("exceeds"), "{msg}"),
            other => panic!("expected truncation error, got {other:?}"),
        }
    }

    fn all_assignments(free: &FreeOAlgebra, values: &[&str]) -> Vec<BTreeMap<(String, String), String>> {
        let mut slots = Vec::new();
        for (i, cat) in &free.algebra.categories {
            for c in &cat.objects {
                slots.push((i.clone(), c.clone()));
            }
        }
        let choices = vec![values.iter().map(|v| v.to_string()).collect::<Vec<_>>(); slots.len()];
        tuples(&choices)
            .into_iter()
            .map(|combo| slots.iter().cloned().zip(combo).collect())
            .collect()
    }

    #[test]
    fn free_lax_builds_and_validates() {
        let free = two_color_free(3);
        let target = max_algebra_over(&free.algebra.operad, 1);
        let mut assign = BTreeMap::new();
        for (i, cat) in &free.algebra.categories {
            for c in &cat.objects {
                let word = &free.obj_word[&(i.clone(), c.clone())].2;
                let v = if word.contains(&"g".to_string()) { "1" } else { "0" };
                assign.insert((i.clone(), c.clone()), v.to_string());
            }
        }
        let funcs = functor_family_by_objects(&free, &target, &assign).expect("family");
        let fl = free_lax_o(&free, &target, &funcs).expect("free lax morphism");
        let r = validate_lax_o(&fl.lax);
        assert!(r.is_valid(), "{r}");
        // FF sends every g-containing word to 1 and pure-b words to 0.
        for (i, cat) in &free.algebra.categories {
            for c in &cat.objects {
                let expect = &assign[&(i.clone(), c.clone())];
                assert_eq!(fl.lax.functors[i].object_map[c], *expect, "FF at {i}:{c}");
                assert_eq!(
                    fl.summands[&(i.clone(), c.clone())].len(),
                    presentations_of(&free.algebra, i, c).len()
                );
                assert!(fl.eta.contains_key(&(i.clone(), c.clone())));
            }
        }
    }

    #[test]
    fn free_lax_empty_generators() {
        let o = nonunital(&build_ox(&["A", "B"], 2));
        let free = free_o_algebra(&o, &BTreeMap::new()).expect("free on nothing");
        for cat in free.algebra.categories.values() {
            assert!(cat.objects.is_empty());
        }
        let target = max_algebra_over(&o, 1);
        let funcs = functor_family_by_objects(&free, &target, &BTreeMap::new()).expect("empty family");
        let fl = free_lax_o(&free, &target, &funcs).expect("free lax morphism");
        assert!(validate_lax_o(&fl.lax).is_valid());
        assert_eq!(two_morphisms_between(&fl.lax, &fl.lax).len(), 1);
    }

    #[test]
    fn free_lax_with_generator_morphisms() {
        let o = nonunital(&build_ox(&["A", "B"], 2));
        let gens = BTreeMap::from([
            ("A,B".to_string(), discrete_category(&["g"])),
            ("B,B".to_string(), semilattice_category(1)),
        ]);
        let free = free_o_algebra(&o, &gens).expect("free algebra");
        assert!(validate_algebra(&free.algebra).is_valid());
        let target = max_algebra_over(&o, 2);
        let mut assign = BTreeMap::new();
        for (i, cat) in &free.algebra.categories {
            for c in &cat.objects {
                let word = &free.obj_word[&(i.clone(), c.clone())].2;
                let score: usize = word
                    .iter()
                    .map(|w| if w == "1" { 1 } else { 0 })
                    .sum::<usize>()
                    .min(2);
                assign.insert((i.clone(), c.clone()), score.to_string());
            }
        }
        let funcs = functor_family_by_objects(&free, &target, &assign).expect("family");
        let fl = free_lax_o(&free, &target, &funcs).expect("free lax morphism");
        let r = validate_lax_o(&fl.lax);
        assert!(r.is_valid(), "{r}");
    }

    #[test]
    fn adjunction_bijection_two_color() {
        let free = two_color_free(2);
        let target = max_algebra_over(&free.algebra.operad, 1);
        let fixed: Vec<BTreeMap<(String, String), String>> = vec![
            all_assignments(&free, &["0"]).remove(0),
            all_assignments(&free, &["1"]).remove(0),
        ];
        let gs: Vec<FreeLax> = fixed
            .iter()
            .map(|a| {
                let funcs = functor_family_by_objects(&free, &target, a).expect("family");
                free_lax_o(&free, &target, &funcs).expect("free lax")
            })
            .collect();
        let mut seen_zero = false;
        let mut seen_one = false;
        for assign in all_assignments(&free, &["0", "1"]) {
            let funcs = functor_family_by_objects(&free, &target, &assign).expect("family");
            let ff = free_lax_o(&free, &target, &funcs).expect("free lax");
            for g in &gs {
                let lhs = two_morphisms_between(&ff.lax, &g.lax);
                let rhs: usize = free
                    .algebra
                    .operad
                    .colors
                    .iter()
                    .map(|i| natural_transformations(&funcs[i], &g.lax.functors[i]).len())
                    .product();
                assert_eq!(lhs.len(), rhs, "counts differ at {assign:?}");
                match lhs.len() {
                    0 => seen_zero = true,
                    1 => {
                        seen_one = true;
                        // The restriction along η is the unique element on
                        // the right-hand side.
                        let restricted = restrict_two_morphism(&ff, &lhs[0]).expect("restriction");
                        for i in free.algebra.operad.colors.iter() {
                            let nats = natural_transformations(&funcs[i], &g.lax.functors[i]);
                            assert_eq!(nats.len(), 1);
                            assert_eq!(restricted[i], nats[0]);
                        }
                    }
                    n => panic!("thin targets admit at most one 2-morphism, got {n}"),
                }
            }
        }
        assert!(seen_zero && seen_one);
    }

    #[test]
    fn operad_json_round_trip() {
        let o = build_ox(&["A", "B"], 2);
        let v = operad_to_json(&o);
        let back = operad_from_json(&v).expect("parse");
        assert_eq!(back, o);
        assert!(operad_from_json(&json!({"colors": ["A"]})).is_err());
    }

    #[test]
    fn algebra_json_round_trip() {
        let a = z2_algebra(2);
        let v = algebra_to_json(&a);
        let back = algebra_from_json(&v).expect("parse");
        assert_eq!(back, a);
        assert!(algebra_from_json(&json!({"operad": {"colors": []}})).is_err());
    }
}
