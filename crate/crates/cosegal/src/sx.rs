//! Chains over a label set and their 2-morphisms.
//!
//! A 1-morphism of the ambient structure is a [`Chain`] of labels; a
//! 2-morphism is a [`ChainMap`]: a monotone surjection acting on the edges
//! of a chain, collapsing consecutive blocks (the target keeps only the
//! block-boundary labels). Decompositions of a chain, the canonical map to
//! the endpoint chain, the Grothendieck construction on tuples of composable
//! chains, and generalized latching categories all live here.

use crate::fincat::{
    compose_surjections, normalize_presentation, sigma_generator, upsilon_hom, FinCategory,
    FinMor, MonotoneSurjection,
};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SxError {
    #[error("invalid chain: {0}")]
    BadChain(String),
    #[error("endpoint mismatch: cannot concatenate {0} and {1}")]
    ConcatMismatch(String, String),
    #[error("invalid chain map: {0}")]
    BadChainMap(String),
    #[error("invalid decomposition: {0}")]
    BadDecomposition(String),
}

pub type Result<T> = std::result::Result<T, SxError>;

// ---------------------------------------------------------------------------
// Chains
// ---------------------------------------------------------------------------

/// A nonempty sequence of at least two labels; degree = number of edges.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Chain {
    labels: Vec<String>,
}

impl Chain {
    pub fn new(labels: Vec<String>) -> Result<Self> {
        if labels.len() < 2 {
            return Err(SxError::BadChain(
                "a chain needs at least two labels (degree ≥ 1)".into(),
            ));
        }
        for l in &labels {
            if l.is_empty() || l.contains('.') {
                return Err(SxError::BadChain(format!(
                    "label {l:?} is empty or contains '.'"
                )));
            }
        }
        Ok(Chain { labels })
    }

    pub fn of(labels: &[&str]) -> Self {
        Chain::new(labels.iter().map(|s| s.to_string()).collect()).expect("valid chain literal")
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn degree(&self) -> usize {
        self.labels.len() - 1
    }

    pub fn endpoints(&self) -> (&String, &String) {
        (self.labels.first().unwrap(), self.labels.last().unwrap())
    }

    /// Dot-joined label key, e.g. `"A.B.C"`.
    pub fn key(&self) -> String {
        self.labels.join(".")
    }

    pub fn from_key(key: &str) -> Result<Self> {
        Chain::new(key.split('.').map(|s| s.to_string()).collect())
    }

    /// Sub-chain spanning edges `lo..hi` (labels `lo..=hi`).
    pub fn segment(&self, lo: usize, hi: usize) -> Chain {
        assert!(lo < hi && hi <= self.degree(), "bad segment {lo}..{hi}");
        Chain { labels: self.labels[lo..=hi].to_vec() }
    }
}

impl fmt::Display for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.key())
    }
}

impl Serialize for Chain {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.key())
    }
}

impl<'de> Deserialize<'de> for Chain {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Chain::from_key(&s).map_err(D::Error::custom)
    }
}

/// Concatenation; the shared endpoint label appears once.
pub fn concat(s: &Chain, t: &Chain) -> Result<Chain> {
    let (_, s_end) = s.endpoints();
    let (t_start, _) = t.endpoints();
    if s_end != t_start {
        return Err(SxError::ConcatMismatch(s.key(), t.key()));
    }
    let mut labels = s.labels.clone();
    labels.extend_from_slice(&t.labels[1..]);
    Ok(Chain { labels })
}

pub fn concat_all(blocks: &[Chain]) -> Result<Chain> {
    let (first, rest) = blocks
        .split_first()
        .ok_or_else(|| SxError::BadChain("cannot concatenate zero blocks".into()))?;
    let mut acc = first.clone();
    for b in rest {
        acc = concat(&acc, b)?;
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// Chain maps
// ---------------------------------------------------------------------------

/// A 2-morphism `u : t → s`: a monotone surjection on the edges of `t`.
/// The target is derived — the labels at the boundaries of the surjection's
/// fibers.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ChainMap {
    pub source: Chain,
    pub surjection: MonotoneSurjection,
}

impl ChainMap {
    pub fn new(source: Chain, surjection: MonotoneSurjection) -> Result<Self> {
        if surjection.m != source.degree() {
            return Err(SxError::BadChainMap(format!(
                "surjection domain {} ≠ chain degree {}",
                surjection.m,
                source.degree()
            )));
        }
        Ok(ChainMap { source, surjection })
    }

    pub fn identity(t: &Chain) -> Self {
        ChainMap { source: t.clone(), surjection: MonotoneSurjection::identity(t.degree()) }
    }

    pub fn is_identity(&self) -> bool {
        self.surjection.is_identity()
    }

    /// Target chain: keep the first label and the label at the end of each
    /// fiber of the surjection.
    pub fn target(&self) -> Chain {
        let f = &self.surjection;
        let mut labels = Vec::with_capacity(f.n + 1);
        labels.push(self.source.labels[0].clone());
        let mut count = 0usize;
        for v in 0..f.n {
            count += f.values.iter().filter(|&&x| x == v).count();
            labels.push(self.source.labels[count].clone());
        }
        Chain { labels }
    }

    /// `g∘f` for `f : t → s` then `g : s → r`.
    pub fn compose(g: &ChainMap, f: &ChainMap) -> Result<ChainMap> {
        if g.source != f.target() {
            return Err(SxError::BadChainMap(format!(
                "cannot compose: {} ∘ {} (middle chain mismatch)",
                g.source.key(),
                f.source.key()
            )));
        }
        let surjection = compose_surjections(&g.surjection, &f.surjection)
            .map_err(|e| SxError::BadChainMap(e.to_string()))?;
        Ok(ChainMap { source: f.source.clone(), surjection })
    }

    /// Horizontal tensor `u⊗u' : t·t' → s·s'`.
    pub fn tensor(u: &ChainMap, v: &ChainMap) -> Result<ChainMap> {
        let source = concat(&u.source, &v.source)?;
        let (fu, fv) = (&u.surjection, &v.surjection);
        let mut values = fu.values.clone();
        values.extend(fv.values.iter().map(|&x| x + fu.n));
        Ok(ChainMap {
            source,
            surjection: MonotoneSurjection { m: fu.m + fv.m, n: fu.n + fv.n, values },
        })
    }

    pub fn tensor_all(maps: &[ChainMap]) -> Result<ChainMap> {
        let (first, rest) = maps
            .split_first()
            .ok_or_else(|| SxError::BadChainMap("cannot tensor zero chain maps".into()))?;
        let mut acc = first.clone();
        for m in rest {
            acc = ChainMap::tensor(&acc, m)?;
        }
        Ok(acc)
    }

    /// Deterministic identifier used when chain maps become table entries.
    pub fn key(&self) -> String {
        format!("{}~{:?}", self.source.key(), self.surjection.values)
    }
}

/// The generator 2-morphism `t → σᵢ·t` collapsing edges `i, i+1`.
pub fn sigma_chain_map(t: &Chain, i: usize) -> Result<ChainMap> {
    if t.degree() < 2 || i + 1 >= t.degree() {
        return Err(SxError::BadChainMap(format!(
            "no σ_{i} out of a chain of degree {}",
            t.degree()
        )));
    }
    let surjection = sigma_generator(t.degree() - 1, i).expect("index checked");
    Ok(ChainMap { source: t.clone(), surjection })
}

/// Factor `u` as a composite of generator chain maps, first-applied first
/// (the strictly increasing presentation read right to left).
pub fn sigma_chain_factorization(u: &ChainMap) -> Vec<ChainMap> {
    let pres = normalize_presentation(&u.surjection);
    let mut out = Vec::with_capacity(pres.indices.len());
    let mut current = u.source.clone();
    for &j in pres.indices.iter().rev() {
        let gen = sigma_chain_map(&current, j).expect("presentation index in range");
        current = gen.target();
        out.push(gen);
    }
    out
}

/// All 2-morphisms `t → s`.
pub fn hom_s(t: &Chain, s: &Chain) -> Vec<ChainMap> {
    if t.endpoints() != s.endpoints() {
        return Vec::new();
    }
    upsilon_hom(t.degree(), s.degree())
        .into_iter()
        .filter_map(|f| {
            let cm = ChainMap { source: t.clone(), surjection: f };
            (cm.target() == *s).then_some(cm)
        })
        .collect()
}

/// The unique map from `t` to its degree-1 endpoint chain.
pub fn canonical_map_u_t(t: &Chain) -> ChainMap {
    let m = t.degree();
    ChainMap {
        source: t.clone(),
        surjection: MonotoneSurjection { m, n: 1, values: vec![0; m] },
    }
}

// ---------------------------------------------------------------------------
// Decompositions
// ---------------------------------------------------------------------------

/// A decomposition of an ambient chain into consecutive blocks, stored as
/// the set of interior cut vertices (strictly increasing, in `1..degree`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Decomposition {
    pub cuts: Vec<usize>,
}

impl Decomposition {
    pub fn trivial() -> Self {
        Decomposition { cuts: Vec::new() }
    }

    pub fn new(cuts: Vec<usize>, ambient_degree: usize) -> Result<Self> {
        if cuts.windows(2).any(|w| w[0] >= w[1])
            || cuts.iter().any(|&c| c == 0 || c >= ambient_degree)
        {
            return Err(SxError::BadDecomposition(format!(
                "cuts {cuts:?} invalid for degree {ambient_degree}"
            )));
        }
        Ok(Decomposition { cuts })
    }

    pub fn block_count(&self) -> usize {
        self.cuts.len() + 1
    }

    /// Boundary vertices including both ends: `0, c₁, …, c_l, degree`.
    pub fn boundaries(&self, ambient_degree: usize) -> Vec<usize> {
        let mut b = Vec::with_capacity(self.cuts.len() + 2);
        b.push(0);
        b.extend_from_slice(&self.cuts);
        b.push(ambient_degree);
        b
    }

    pub fn blocks(&self, t: &Chain) -> Vec<Chain> {
        let bd = self.boundaries(t.degree());
        bd.windows(2).map(|w| t.segment(w[0], w[1])).collect()
    }

    /// The decomposition of `s·t` with the given decompositions on the two
    /// halves and a cut at the junction.
    pub fn concat(left: &Decomposition, left_degree: usize, right: &Decomposition) -> Self {
        let mut cuts = left.cuts.clone();
        cuts.push(left_degree);
        cuts.extend(right.cuts.iter().map(|c| c + left_degree));
        Decomposition { cuts }
    }
}

/// All decompositions of `t` (all subsets of interior vertices), in
/// lexicographic order of their cut lists; the trivial one comes first.
pub fn dec_enumerate(t: &Chain) -> Vec<Decomposition> {
    let d = t.degree();
    let mut out = Vec::with_capacity(1 << (d.saturating_sub(1)));
    let interior: Vec<usize> = (1..d).collect();
    for mask in 0u64..(1u64 << interior.len()) {
        let cuts: Vec<usize> = interior
            .iter()
            .enumerate()
            .filter(|(b, _)| mask & (1 << b) != 0)
            .map(|(_, &v)| v)
            .collect();
        out.push(Decomposition { cuts });
    }
    out.sort();
    out
}

/// Transport a decomposition of the target of `u` back along `u`: the
/// unique source decomposition plus the block maps, whose tensor is `u`.
pub fn dec_of_map(u: &ChainMap, d: &Decomposition) -> Result<(Decomposition, Vec<ChainMap>)> {
    let target = u.target();
    if d.cuts.iter().any(|&c| c >= target.degree() || c == 0) {
        return Err(SxError::BadDecomposition(format!(
            "cuts {:?} do not decompose {}",
            d.cuts,
            target.key()
        )));
    }
    let f = &u.surjection;
    // a target cut at vertex c pulls back to the source vertex where the
    // surjection first reaches value c
    let src_vertex = |c: usize| f.values.iter().filter(|&&v| v < c).count();
    let src_cuts: Vec<usize> = d.cuts.iter().map(|&c| src_vertex(c)).collect();
    let src_dec = Decomposition { cuts: src_cuts };
    let tgt_bd = d.boundaries(target.degree());
    let src_bd = src_dec.boundaries(u.source.degree());
    let mut blocks = Vec::with_capacity(tgt_bd.len() - 1);
    for k in 0..tgt_bd.len() - 1 {
        let (tlo, thi) = (tgt_bd[k], tgt_bd[k + 1]);
        let (slo, shi) = (src_bd[k], src_bd[k + 1]);
        let values: Vec<usize> = f.values[slo..shi].iter().map(|&v| v - tlo).collect();
        let block = ChainMap {
            source: u.source.segment(slo, shi),
            surjection: MonotoneSurjection { m: shi - slo, n: thi - tlo, values },
        };
        debug_assert_eq!(block.target(), target.segment(tlo, thi));
        blocks.push(block);
    }
    debug_assert_eq!(&ChainMap::tensor_all(&blocks).unwrap(), u);
    Ok((src_dec, blocks))
}

// ---------------------------------------------------------------------------
// Chain enumeration
// ---------------------------------------------------------------------------

/// All chains of exact degree `deg` over `labels` starting at `from`
/// (ending anywhere), in lexicographic label order.
pub fn chains_from(labels: &[String], from: &str, deg: usize) -> Vec<Chain> {
    assert!(deg >= 1);
    let mut out = Vec::new();
    let mut current = vec![from.to_string()];
    fn rec(labels: &[String], current: &mut Vec<String>, left: usize, out: &mut Vec<Chain>) {
        if left == 0 {
            out.push(Chain { labels: current.clone() });
            return;
        }
        for l in labels {
            current.push(l.clone());
            rec(labels, current, left - 1, out);
            current.pop();
        }
    }
    let mut sorted = labels.to_vec();
    sorted.sort();
    sorted.dedup();
    rec(&sorted, &mut current, deg, &mut out);
    out
}

/// All chains from `a` to `b` of degree between 1 and `max_deg`.
pub fn chains_between(labels: &[String], a: &str, b: &str, max_deg: usize) -> Vec<Chain> {
    let mut out = Vec::new();
    for d in 1..=max_deg {
        out.extend(chains_from(labels, a, d).into_iter().filter(|c| c.endpoints().1 == b));
    }
    out
}

// ---------------------------------------------------------------------------
// Grothendieck construction
// ---------------------------------------------------------------------------

/// One object of the Grothendieck category: a tuple of composable chains.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct GrothObj {
    pub blocks: Vec<Chain>,
}

impl GrothObj {
    pub fn total_degree(&self) -> usize {
        self.blocks.iter().map(|c| c.degree()).sum()
    }
    pub fn key(&self) -> String {
        self.blocks.iter().map(|c| c.key()).collect::<Vec<_>>().join("|")
    }
    pub fn concat(&self) -> Chain {
        concat_all(&self.blocks).expect("blocks composable")
    }
}

/// A morphism `(n,a) → (m,b)`: a monotone surjection `g` grouping the `n`
/// blocks of `a` into `m` groups, plus per-group 2-morphisms
/// `v_k : b_k → concat(group_k a)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct GrothMor {
    pub src: usize,
    pub tgt: usize,
    pub g: MonotoneSurjection,
    pub vs: Vec<ChainMap>,
}

impl GrothMor {
    pub fn key(&self) -> String {
        format!(
            "{}=>{}:g{:?}:{}",
            self.src,
            self.tgt,
            self.g.values,
            self.vs.iter().map(|v| v.key()).collect::<Vec<_>>().join(",")
        )
    }
}

fn groth_objects(labels: &[String], a: &str, b: &str, max_total: usize) -> Vec<GrothObj> {
    let mut out = Vec::new();
    fn rec(
        labels: &[String],
        here: &str,
        b: &str,
        left: usize,
        acc: &mut Vec<Chain>,
        out: &mut Vec<GrothObj>,
    ) {
        if !acc.is_empty() && acc.last().unwrap().endpoints().1 == b {
            out.push(GrothObj { blocks: acc.clone() });
        }
        for d in 1..=left {
            for c in chains_from(labels, here, d) {
                let end = c.endpoints().1.clone();
                acc.push(c);
                rec(labels, &end, b, left - d, acc, out);
                acc.pop();
            }
        }
    }
    let mut acc = Vec::new();
    rec(labels, a, b, max_total, &mut acc, &mut out);
    out.sort();
    out
}

/// Group the blocks of `a` along the fibers of `g` and concatenate each
/// group.
fn group_concats(a: &GrothObj, g: &MonotoneSurjection) -> Vec<Chain> {
    (0..g.n)
        .map(|k| {
            let group: Vec<Chain> = a
                .blocks
                .iter()
                .zip(&g.values)
                .filter(|(_, &v)| v == k)
                .map(|(c, _)| c.clone())
                .collect();
            concat_all(&group).expect("grouped blocks composable")
        })
        .collect()
}

fn groth_morphisms(objects: &[GrothObj]) -> Vec<GrothMor> {
    let mut out = Vec::new();
    for (si, a) in objects.iter().enumerate() {
        for (ti, bb) in objects.iter().enumerate() {
            let (n, m) = (a.blocks.len(), bb.blocks.len());
            for g in upsilon_hom(n, m) {
                let concats = group_concats(a, &g);
                // choices of v_k ∈ Hom(b_k, concat(group_k))
                let choices: Vec<Vec<ChainMap>> = bb
                    .blocks
                    .iter()
                    .zip(&concats)
                    .map(|(bk, ck)| hom_s(bk, ck))
                    .collect();
                if choices.iter().any(|c| c.is_empty()) {
                    continue;
                }
                let mut idx = vec![0usize; m];
                loop {
                    let vs: Vec<ChainMap> =
                        idx.iter().zip(&choices).map(|(&i, c)| c[i].clone()).collect();
                    out.push(GrothMor { src: si, tgt: ti, g: g.clone(), vs });
                    let mut pos = m;
                    let mut done = false;
                    loop {
                        if pos == 0 {
                            done = true;
                            break;
                        }
                        pos -= 1;
                        if idx[pos] + 1 < choices[pos].len() {
                            idx[pos] += 1;
                            for v in idx.iter_mut().skip(pos + 1) {
                                *v = 0;
                            }
                            break;
                        }
                        idx[pos] = 0;
                    }
                    if done {
                        break;
                    }
                }
            }
        }
    }
    out.sort();
    out
}

/// Composite of Grothendieck morphisms (`delta2` after `delta1`).
pub fn groth_compose(
    objects: &[GrothObj],
    delta2: &GrothMor,
    delta1: &GrothMor,
) -> Result<GrothMor> {
    if delta1.tgt != delta2.src {
        return Err(SxError::BadChainMap("grothendieck morphisms not composable".into()));
    }
    let g = compose_surjections(&delta2.g, &delta1.g)
        .map_err(|e| SxError::BadChainMap(e.to_string()))?;
    let mut vs = Vec::with_capacity(delta2.vs.len());
    for (j, v2j) in delta2.vs.iter().enumerate() {
        // blocks of delta1's v that fall in fiber j of delta2.g
        let group: Vec<ChainMap> = delta1
            .vs
            .iter()
            .zip(&delta2.g.values)
            .filter(|(_, &v)| v == j)
            .map(|(cm, _)| cm.clone())
            .collect();
        let tensored = ChainMap::tensor_all(&group)?;
        vs.push(ChainMap::compose(&tensored, v2j)?);
    }
    let _ = objects;
    Ok(GrothMor { src: delta1.src, tgt: delta2.tgt, g, vs })
}

/// The structured Grothendieck category plus its rendering as an explicit
/// [`FinCategory`].
#[derive(Debug, Clone)]
pub struct GrothCategory {
    pub objects: Vec<GrothObj>,
    pub morphisms: Vec<GrothMor>,
}

pub fn grothendieck_struct(a: &str, b: &str, max_total: usize) -> GrothCategory {
    let mut labels: Vec<String> = vec![a.to_string(), b.to_string()];
    labels.sort();
    labels.dedup();
    let objects = groth_objects(&labels, a, b, max_total);
    let morphisms = groth_morphisms(&objects);
    GrothCategory { objects, morphisms }
}

/// The Grothendieck construction on tuples of composable chains from `a` to
/// `b` of total degree ≤ `n`, materialized as an explicit category.
pub fn grothendieck_category(a: &str, b: &str, n: usize) -> FinCategory {
    assert!(n >= 1, "degree bound must be ≥ 1");
    let gc = grothendieck_struct(a, b, n);
    let mut key_to_id: BTreeMap<String, String> = BTreeMap::new();
    let mut morphisms = Vec::with_capacity(gc.morphisms.len());
    for (i, m) in gc.morphisms.iter().enumerate() {
        let id = format!("m{i}");
        key_to_id.insert(m.key(), id.clone());
        morphisms.push(FinMor {
            id,
            src: gc.objects[m.src].key(),
            tgt: gc.objects[m.tgt].key(),
        });
    }
    let mut compose = BTreeMap::new();
    for (i2, d2) in gc.morphisms.iter().enumerate() {
        for (i1, d1) in gc.morphisms.iter().enumerate() {
            if d1.tgt != d2.src {
                continue;
            }
            let comp = groth_compose(&gc.objects, d2, d1).expect("composable pair");
            let cid = key_to_id
                .get(&comp.key())
                .expect("composite must be in the enumerated morphism set");
            compose.insert((format!("m{i2}"), format!("m{i1}")), cid.clone());
        }
    }
    FinCategory::from_parts(
        gc.objects.iter().map(|o| o.key()).collect(),
        morphisms,
        compose,
    )
}

// ---------------------------------------------------------------------------
// Latching categories
// ---------------------------------------------------------------------------

/// An object of the latching category at `z`: blocks `(s₁,…,sₙ)` of degree
/// `< deg z` together with the structure 2-morphism `u: z → s₁⊗…⊗sₙ`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct LatchObj {
    pub blocks: Vec<Chain>,
    pub map: ChainMap,
}

/// A comma morphism of the latching category, in the same shape as
/// [`GrothMor`]: the triangle `(⊗v)∘u_tgt = u_src` holds.
pub type LatchMor = GrothMor;

#[derive(Debug, Clone)]
pub struct LatchingCategory {
    pub z: Chain,
    pub objects: Vec<LatchObj>,
    pub morphisms: Vec<LatchMor>,
}

/// The generalized latching category at `z`: empty for degree 1.
pub fn latching_category(z: &Chain) -> LatchingCategory {
    let degz = z.degree();
    let mut objects = Vec::new();
    if degz >= 2 {
        for d in 1..=degz {
            for f in upsilon_hom(degz, d) {
                let u = ChainMap { source: z.clone(), surjection: f };
                let target = u.target();
                for dec in dec_enumerate(&target) {
                    let blocks = dec.blocks(&target);
                    if blocks.iter().all(|c| c.degree() < degz) {
                        objects.push(LatchObj { blocks, map: u.clone() });
                    }
                }
            }
        }
    }
    objects.sort();
    // comma morphisms: δ = (g, v̄): x → y with (⊗v)∘u_y = u_x
    let as_groth: Vec<GrothObj> =
        objects.iter().map(|o| GrothObj { blocks: o.blocks.clone() }).collect();
    let mut morphisms = Vec::new();
    for delta in groth_morphisms(&as_groth) {
        let x = &objects[delta.src];
        let y = &objects[delta.tgt];
        let tensored = ChainMap::tensor_all(&delta.vs).expect("vs composable");
        if let Ok(composite) = ChainMap::compose(&tensored, &y.map) {
            if composite == x.map {
                morphisms.push(delta);
            }
        }
    }
    LatchingCategory { z: z.clone(), objects, morphisms }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn concat_examples() {
        let ab = Chain::of(&["A", "B"]);
        let bc = Chain::of(&["B", "C"]);
        assert_eq!(concat(&ab, &bc).unwrap(), Chain::of(&["A", "B", "C"]));
        let d2 = Chain::of(&["A", "B", "C"]);
        let d3 = Chain::of(&["C", "A", "B", "C"]);
        assert_eq!(concat(&d2, &d3).unwrap().degree(), 5);
        assert!(concat(&ab, &Chain::of(&["C", "A"])).is_err());
        // associativity
        let abc = concat(&concat(&ab, &bc).unwrap(), &Chain::of(&["C", "A"])).unwrap();
        let abc2 = concat(&ab, &concat(&bc, &Chain::of(&["C", "A"])).unwrap()).unwrap();
        assert_eq!(abc, abc2);
    }

    #[test]
    fn chain_json_key() {
        let c = Chain::of(&["A", "B", "C"]);
        assert_eq!(c.key(), "A.B.C");
        assert_eq!(Chain::from_key("A.B.C").unwrap(), c);
        let j = serde_json::to_string(&c).unwrap();
        assert_eq!(j, "\"A.B.C\"");
        assert_eq!(serde_json::from_str::<Chain>(&j).unwrap(), c);
        assert!(Chain::new(vec!["A".into()]).is_err());
        assert!(Chain::new(vec!["A.B".into(), "C".into()]).is_err());
    }

    #[test]
    fn dec_counts() {
        assert_eq!(dec_enumerate(&Chain::of(&["A", "B"])).len(), 1);
        assert_eq!(dec_enumerate(&Chain::of(&["A", "B", "C"])).len(), 2);
        assert_eq!(dec_enumerate(&Chain::of(&["A", "B", "C", "A", "B"])).len(), 8);
        for d in 1..=10usize {
            let labels: Vec<&str> = (0..=d).map(|i| if i % 2 == 0 { "A" } else { "B" }).collect();
            let t = Chain::of(&labels);
            assert_eq!(dec_enumerate(&t).len(), 1 << (d - 1));
        }
    }

    #[test]
    fn chain_map_targets() {
        let t = Chain::of(&["A", "B", "C"]);
        let u = canonical_map_u_t(&t);
        assert_eq!(u.target(), Chain::of(&["A", "C"]));
        assert_eq!(u.surjection.values, vec![0, 0]);
        let d1 = Chain::of(&["A", "B"]);
        assert!(canonical_map_u_t(&d1).is_identity());
        // two target constructions coincide: boundary labels = composite in
        // the coarse category, whose arrows are label pairs
        let t4 = Chain::of(&["A", "B", "A", "C", "B"]);
        for s_deg in 1..=4usize {
            for f in upsilon_hom(4, s_deg) {
                let cm = ChainMap::new(t4.clone(), f.clone()).unwrap();
                let tgt = cm.target();
                // block composite = (start label, end label) per fiber
                let mut expect = vec![t4.labels()[0].clone()];
                let mut pos = 0usize;
                for v in 0..f.n {
                    let fiber = f.values.iter().filter(|&&x| x == v).count();
                    pos += fiber;
                    expect.push(t4.labels()[pos].clone());
                }
                assert_eq!(tgt.labels(), &expect[..]);
            }
        }
    }

    #[test]
    fn canonical_map_factors_through_everything() {
        let t = Chain::of(&["A", "B", "A", "B", "A"]);
        let ut = canonical_map_u_t(&t);
        for d in 1..=t.degree() {
            for f in upsilon_hom(t.degree(), d) {
                let v = ChainMap::new(t.clone(), f).unwrap();
                let s = v.target();
                let us = canonical_map_u_t(&s);
                assert_eq!(ChainMap::compose(&us, &v).unwrap(), ut);
            }
        }
    }

    #[test]
    fn dec_of_map_examples() {
        let t = Chain::of(&["A", "B", "C"]);
        let u = ChainMap::identity(&t);
        let d = Decomposition::new(vec![1], 2).unwrap();
        let (sd, blocks) = dec_of_map(&u, &d).unwrap();
        assert_eq!(sd, d);
        assert!(blocks.iter().all(|b| b.is_identity()));

        let u2 = canonical_map_u_t(&t);
        let (sd2, blocks2) = dec_of_map(&u2, &Decomposition::trivial()).unwrap();
        assert_eq!(sd2, Decomposition::trivial());
        assert_eq!(blocks2.len(), 1);
        assert_eq!(blocks2[0], u2);
    }

    #[test]
    fn dec_of_map_functorial_sample() {
        let t = Chain::of(&["A", "B", "C", "A", "B"]);
        // u: t → s collapsing edges 0,1; u': s → r collapsing the rest
        let u = ChainMap::new(t.clone(), MonotoneSurjection::new(4, 3, vec![0, 0, 1, 2]).unwrap())
            .unwrap();
        let s = u.target();
        let up = ChainMap::new(s.clone(), MonotoneSurjection::new(3, 2, vec![0, 1, 1]).unwrap())
            .unwrap();
        let r = up.target();
        let comp = ChainMap::compose(&up, &u).unwrap();
        for d in dec_enumerate(&r) {
            // Dec(u'∘u)(d) = Dec(u)(Dec(u')(d))
            let (mid, _) = dec_of_map(&up, &d).unwrap();
            let (lhs_dec, lhs_blocks) = dec_of_map(&u, &mid).unwrap();
            let (rhs_dec, rhs_blocks) = dec_of_map(&comp, &d).unwrap();
            assert_eq!(lhs_dec, rhs_dec);
            assert_eq!(lhs_blocks.len(), rhs_blocks.len());
            // block-wise: composing the u-blocks grouped by u' equals the
            // composite's blocks — verified at the level of sources
            for (lb, rb) in lhs_blocks.iter().zip(&rhs_blocks) {
                assert_eq!(lb.source, rb.source);
            }
        }
    }

    #[test]
    fn sigma_factorization_reproduces_maps() {
        for deg in 2..=6usize {
            let labels: Vec<&str> =
                (0..=deg).map(|i| ["A", "B", "C"][i % 3]).collect();
            let t = Chain::of(&labels);
            for d in 1..deg {
                for f in upsilon_hom(deg, d) {
                    let u = ChainMap::new(t.clone(), f).unwrap();
                    let gens = sigma_chain_factorization(&u);
                    assert_eq!(gens.len(), deg - d);
                    let mut acc = ChainMap::identity(&t);
                    for g in &gens {
                        acc = ChainMap::compose(g, &acc).unwrap();
                    }
                    assert_eq!(acc, u);
                }
            }
        }
    }

    #[test]
    fn grothendieck_small_and_valid() {
        let cat = grothendieck_category("A", "A", 2);
        let report = crate::fincat::validate_category(&cat);
        assert!(report.is_valid(), "{report}");
        // N=1, |X|=1: single object (the loop chain), single identity
        let cat1 = grothendieck_category("A", "A", 1);
        assert_eq!(cat1.objects.len(), 1);
        assert_eq!(cat1.morphisms.len(), 1);
    }

    #[test]
    fn grothendieck_two_labels_valid() {
        let cat = grothendieck_category("A", "B", 2);
        let report = crate::fincat::validate_category(&cat);
        assert!(report.is_valid(), "{report}");
        // objects: A.B | A.A.B, A.B.B (deg 2 chains) | A.B split? A.B has no
        // interior vertex; 2-block tuples of total degree 2: (A.A, A.B),
        // (A.B, B.B)
        let gc = grothendieck_struct("A", "B", 2);
        assert!(gc.objects.iter().any(|o| o.key() == "A.B"));
        assert!(gc.objects.iter().any(|o| o.key() == "A.A|A.B"));
        assert!(gc.objects.iter().any(|o| o.key() == "A.B|B.B"));
        assert_eq!(gc.objects.iter().filter(|o| o.blocks.len() == 2).count(), 2);
    }

    #[test]
    fn grothendieck_composition_matches_formula() {
        let gc = grothendieck_struct("A", "B", 2);
        // pick δ1: x → y and δ2: y → z with both non-identity if possible
        let mut checked = 0;
        for d1 in &gc.morphisms {
            for d2 in &gc.morphisms {
                if d1.tgt != d2.src {
                    continue;
                }
                let comp = groth_compose(&gc.objects, d2, d1).unwrap();
                // componentwise: w_j = (⊗_{k∈fiber_j} v1_k)∘v2_j
                for (j, wj) in comp.vs.iter().enumerate() {
                    let group: Vec<ChainMap> = d1
                        .vs
                        .iter()
                        .zip(&d2.g.values)
                        .filter(|(_, &v)| v == j)
                        .map(|(c, _)| c.clone())
                        .collect();
                    let expect = ChainMap::compose(
                        &ChainMap::tensor_all(&group).unwrap(),
                        &d2.vs[j],
                    )
                    .unwrap();
                    assert_eq!(wj, &expect);
                }
                checked += 1;
            }
        }
        assert!(checked > 0);
    }

    #[test]
    fn grothendieck_fixed_n_subcategory() {
        // morphisms with g = id between same-length tuples are exactly
        // tuples of componentwise 2-morphisms
        let gc = grothendieck_struct("A", "B", 3);
        for d in &gc.morphisms {
            if d.g.is_identity() && gc.objects[d.src].blocks.len() == d.g.m {
                for (k, v) in d.vs.iter().enumerate() {
                    assert_eq!(v.source, gc.objects[d.tgt].blocks[k]);
                    assert_eq!(v.target(), gc.objects[d.src].blocks[k]);
                }
            }
        }
    }

    #[test]
    fn latching_degree_boundaries() {
        let z1 = Chain::of(&["A", "B"]);
        assert!(latching_category(&z1).objects.is_empty());

        let z2 = Chain::of(&["A", "B", "C"]);
        let lc = latching_category(&z2);
        // the collapsed endpoint chain + the pure 2-block decomposition
        assert_eq!(lc.objects.len(), 2);
        assert!(lc.morphisms.iter().all(|m| m.src == m.tgt), "degree 2 is discrete");
    }

    #[test]
    fn latching_object_count_tracks_decompositions() {
        let z = Chain::of(&["A", "B", "A", "B"]);
        let lc = latching_category(&z);
        // objects with f = id are the nontrivial decompositions of z
        let full: Vec<&LatchObj> =
            lc.objects.iter().filter(|o| o.map.is_identity()).collect();
        assert_eq!(full.len(), dec_enumerate(&z).len() - 1);
        // and there are objects strictly below full degree as well
        assert!(lc.objects.len() > full.len());
        // triangle law holds for every enumerated comma morphism
        for m in &lc.morphisms {
            let x = &lc.objects[m.src];
            let y = &lc.objects[m.tgt];
            let t = ChainMap::tensor_all(&m.vs).unwrap();
            assert_eq!(ChainMap::compose(&t, &y.map).unwrap(), x.map);
        }
    }
}
