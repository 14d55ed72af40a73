//! Local-to-global rectification of lax diagrams into Co-Segal ones.
//!
//! The engine works one chain at a time: evaluation of a diagram at the
//! canonical map `u_t: F(A,B) → F(t)` has a left adjoint `pr_shriek`
//! (a pointwise extension concentrated on the chains sharing `t`'s
//! endpoints), and [`glue_local`] pushes the diagram out along the
//! comparison built from a cofibration–trivial-fibration factorization of
//! `F(u_t)`. Iterating until the canonical map acquires the right lifting
//! property gives [`s_t_infinity`]; a cone colimit of those partial fixes
//! over every chain, iterated to stability, gives [`cosegalify_global`].
//! Every run is recorded in a [`CosegalifyTrace`] so non-convergence at the
//! degree truncation is a diagnosable outcome, not a panic.

use crate::base::{
    presented_colimit, ColimPresentation, ModelData, MonoidalBase, PresentedColimit, Relation,
};
use crate::fincat::ValidationReport;
use crate::freelax::{
    gamma, pushout_free, theta_inverse, underlying, colimit_diagram, FamilyMorphism, FreeDiagram,
    FreelaxError, PresheafFamily,
};
use crate::laxdiag::{
    is_cosegal, validate_transformation, LaxDiagram, SimpleTransformation,
};
use crate::sx::{canonical_map_u_t, hom_s, sigma_chain_map, Chain, ChainMap, Decomposition};
use itertools::Itertools;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone)]
pub enum CosegalifyError<B: MonoidalBase> {
    /// Malformed request (wrong degree, unknown chain, mismatched square).
    Input(String),
    /// A single-chain rectification failed to stabilize within the cap; the
    /// partial trace is retained for diagnosis.
    CapExceeded {
        cap: usize,
        at: String,
        trace: CosegalifyTrace<B>,
    },
    /// The global round loop failed to stabilize within the cap.
    GlobalCapExceeded { cap: usize, trace: GlobalTrace<B> },
    /// A colimit or pushout below the surface failed.
    Freelax(FreelaxError),
}

impl<B: MonoidalBase> fmt::Debug for CosegalifyError<B> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CosegalifyError::Input(s) => write!(f, "Input({s:?})"),
            CosegalifyError::CapExceeded { cap, at, trace } => write!(
                f,
                "CapExceeded {{ cap: {cap}, at: {at}, stages: {} }}",
                trace.stages.len()
            ),
            CosegalifyError::GlobalCapExceeded { cap, trace } => write!(
                f,
                "GlobalCapExceeded {{ cap: {cap}, rounds: {} }}",
                trace.rounds.len()
            ),
            CosegalifyError::Freelax(e) => write!(f, "Freelax({e})"),
        }
    }
}

impl<B: MonoidalBase> fmt::Display for CosegalifyError<B> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CosegalifyError::Input(s) => write!(f, "invalid input: {s}"),
            CosegalifyError::CapExceeded { cap, at, .. } => {
                write!(f, "stabilization cap {cap} exceeded at {at}")
            }
            CosegalifyError::GlobalCapExceeded { cap, .. } => {
                write!(f, "global stabilization cap {cap} exceeded")
            }
            CosegalifyError::Freelax(e) => write!(f, "{e}"),
        }
    }
}

impl<B: MonoidalBase> std::error::Error for CosegalifyError<B> {}

impl<B: MonoidalBase> From<FreelaxError> for CosegalifyError<B> {
    fn from(e: FreelaxError) -> Self {
        CosegalifyError::Freelax(e)
    }
}

// ---------------------------------------------------------------------------
// The arrow category of the base
// ---------------------------------------------------------------------------

/// A base morphism `h: U → V` regarded as an object of the arrow category.
#[derive(Debug, Clone)]
pub struct ArrowObject<B: MonoidalBase> {
    pub mor: B::Mor,
}

impl<B: MonoidalBase> ArrowObject<B> {
    pub fn new(mor: B::Mor) -> Self {
        ArrowObject { mor }
    }

    pub fn src(&self, b: &B) -> B::Obj {
        b.src(&self.mor)
    }

    pub fn tgt(&self, b: &B) -> B::Obj {
        b.tgt(&self.mor)
    }
}

impl<B: MonoidalBase> PartialEq for ArrowObject<B> {
    fn eq(&self, other: &Self) -> bool {
        self.mor == other.mor
    }
}
impl<B: MonoidalBase> Eq for ArrowObject<B> {}

/// A commuting square `(top, bottom): source → target` in the arrow
/// category: `bottom ∘ source = target ∘ top`.
#[derive(Debug, Clone)]
pub struct ArrowMorphism<B: MonoidalBase> {
    pub source: B::Mor,
    pub target: B::Mor,
    pub top: B::Mor,
    pub bottom: B::Mor,
}

impl<B: MonoidalBase> PartialEq for ArrowMorphism<B> {
    fn eq(&self, other: &Self) -> bool {
        self.source == other.source
            && self.target == other.target
            && self.top == other.top
            && self.bottom == other.bottom
    }
}
impl<B: MonoidalBase> Eq for ArrowMorphism<B> {}

impl<B: MonoidalBase> ArrowMorphism<B> {
    pub fn identity(b: &B, h: &B::Mor) -> Self {
        ArrowMorphism {
            source: h.clone(),
            target: h.clone(),
            top: b.id(&b.src(h)),
            bottom: b.id(&b.tgt(h)),
        }
    }

    /// `second ∘ first`, composed top-with-top and bottom-with-bottom.
    pub fn compose(b: &B, second: &Self, first: &Self) -> Self {
        assert_eq!(first.target, second.source, "squares are not composable");
        ArrowMorphism {
            source: first.source.clone(),
            target: second.target.clone(),
            top: b.compose(&second.top, &first.top),
            bottom: b.compose(&second.bottom, &first.bottom),
        }
    }
}

pub fn validate_square<B: MonoidalBase>(b: &B, sq: &ArrowMorphism<B>) -> ValidationReport {
    let mut report = ValidationReport::default();
    if b.src(&sq.top) != b.src(&sq.source) || b.tgt(&sq.top) != b.src(&sq.target) {
        report.push("top leg has wrong endpoints".to_string());
    }
    if b.src(&sq.bottom) != b.tgt(&sq.source) || b.tgt(&sq.bottom) != b.tgt(&sq.target) {
        report.push("bottom leg has wrong endpoints".to_string());
    }
    if !report.is_valid() {
        return report;
    }
    if b.compose(&sq.bottom, &sq.source) != b.compose(&sq.target, &sq.top) {
        report.push("square does not commute".to_string());
    }
    report
}

/// The tautological square `(h, Id_V): h → Id_V` over the target of `h`.
pub fn h_over<B: MonoidalBase>(b: &B, h: &B::Mor) -> ArrowMorphism<B> {
    let v = b.tgt(h);
    ArrowMorphism {
        source: h.clone(),
        target: b.id(&v),
        top: h.clone(),
        bottom: b.id(&v),
    }
}

/// Every commuting square `h → p`, by enumeration.
pub fn arrow_homs<B: MonoidalBase>(b: &B, h: &B::Mor, p: &B::Mor) -> Vec<ArrowMorphism<B>> {
    let tops = b.hom(&b.src(h), &b.src(p));
    let bottoms = b.hom(&b.tgt(h), &b.tgt(p));
    let mut out = Vec::new();
    for top in &tops {
        for bottom in &bottoms {
            if b.compose(bottom, h) == b.compose(p, top) {
                out.push(ArrowMorphism {
                    source: h.clone(),
                    target: p.clone(),
                    top: top.clone(),
                    bottom: bottom.clone(),
                });
            }
        }
    }
    out
}

/// A diagonal filler for the square `sq: h → p`: some `k: tgt(h) → src(p)`
/// with `k∘h = top` and `p∘k = bottom`, found by enumeration.
pub fn square_lift<B: MonoidalBase>(b: &B, sq: &ArrowMorphism<B>) -> Option<B::Mor> {
    let h = &sq.source;
    let p = &sq.target;
    b.hom(&b.tgt(h), &b.src(p))
        .into_iter()
        .find(|k| b.compose(k, h) == sq.top && b.compose(p, k) == sq.bottom)
}

/// A square `β: Id_V → p` with `β ∘ h_over(h) = sq`, searched independently
/// of [`square_lift`]; the two succeed on exactly the same squares.
pub fn fill_horn<B: MonoidalBase>(b: &B, sq: &ArrowMorphism<B>) -> Option<ArrowMorphism<B>> {
    let v = b.tgt(&sq.source);
    let over = h_over(b, &sq.source);
    arrow_homs(b, &b.id(&v), &sq.target)
        .into_iter()
        .find(|beta| ArrowMorphism::compose(b, beta, &over) == *sq)
}

/// Does `p` have the right lifting property against every square from the
/// given arrows?
pub fn has_rlp<B: MonoidalBase>(b: &B, arrows: &[B::Mor], p: &B::Mor) -> bool {
    arrows.iter().all(|h| {
        arrow_homs(b, h, p)
            .iter()
            .all(|sq| square_lift(b, sq).is_some())
    })
}

// ---------------------------------------------------------------------------
// The pointwise extension of an arrow along u_t
// ---------------------------------------------------------------------------

/// The family freely generated by an arrow `h: U → W` placed on the span
/// `u_t`: its value at a chain `c` with the same endpoints as `t` is the
/// wide pushout of one copy of `h` per chain map `c → t`, all glued under a
/// single copy of `U` (no copies leaves just `U`); at every other chain the
/// value is the initial object. Each value keeps its colimit presentation
/// so maps out can be produced by mediation.
#[derive(Debug, Clone)]
pub struct KanFamily<B: MonoidalBase> {
    pub family: PresheafFamily<B>,
    pub arrow: B::Mor,
    pub t: Chain,
    pub homs: BTreeMap<Chain, Vec<ChainMap>>,
    presentations: BTreeMap<Chain, PresentedColimit<B>>,
}

impl<B: MonoidalBase> KanFamily<B> {
    /// The structural leg `U → value(c)`; only concentrated chains have one.
    pub fn u_leg(&self, c: &Chain) -> &B::Mor {
        &self
            .presentations
            .get(c)
            .unwrap_or_else(|| panic!("no presentation at {}", c.key()))
            .legs[0]
    }

    /// The leg `W → value(c)` of the copy indexed by `homs[c][idx]`.
    pub fn w_leg(&self, c: &Chain, idx: usize) -> &B::Mor {
        &self
            .presentations
            .get(c)
            .unwrap_or_else(|| panic!("no presentation at {}", c.key()))
            .legs[1 + idx]
    }

    fn concentrated(&self, c: &Chain) -> bool {
        self.presentations.contains_key(c)
    }
}

/// Build the extension of `h` along `u_t` over the given ambient shape.
pub fn kan_family<B: MonoidalBase>(
    base: &B,
    labels: &[String],
    max_degree: usize,
    t: &Chain,
    h: &B::Mor,
) -> KanFamily<B> {
    let (ea, eb) = (t.endpoints().0.clone(), t.endpoints().1.clone());
    let u = base.src(h);
    let w = base.tgt(h);
    let mut family = PresheafFamily::new(base.clone(), labels.to_vec(), max_degree);
    let mut homs = BTreeMap::new();
    let mut presentations = BTreeMap::new();
    for c in family.chains() {
        let (ca, cb) = c.endpoints();
        if *ca == ea && *cb == eb {
            let hs = hom_s(&c, t);
            let mut vertices = vec![u.clone()];
            vertices.extend(hs.iter().map(|_| w.clone()));
            let relations: Vec<Relation<B>> = (0..hs.len())
                .map(|p| Relation {
                    i: 0,
                    f: base.id(&u),
                    j: 1 + p,
                    g: h.clone(),
                })
                .collect();
            let pc = presented_colimit(base, &ColimPresentation { vertices, relations });
            family.values.insert(c.clone(), pc.obj.clone());
            homs.insert(c.clone(), hs);
            presentations.insert(c.clone(), pc);
        } else {
            family.values.insert(c.clone(), base.initial());
            homs.insert(c.clone(), Vec::new());
        }
    }
    for d in family.chains() {
        if d.degree() < 2 {
            continue;
        }
        for i in 0..d.degree() - 1 {
            let gen = sigma_chain_map(&d, i).expect("valid generator index");
            let s = gen.target();
            // generators preserve endpoints, so either both chains carry a
            // presentation or neither does
            let m = if let (Some(ps), Some(pd)) = (presentations.get(&s), presentations.get(&d)) {
                let mut cocone = vec![pd.legs[0].clone()];
                for f in &homs[&s] {
                    let fd = ChainMap::compose(f, &gen).expect("composable chain maps");
                    let pos = homs[&d]
                        .iter()
                        .position(|k| *k == fd)
                        .expect("composite lands in the hom set");
                    cocone.push(pd.legs[1 + pos].clone());
                }
                ps.mediator(base, &cocone)
                    .expect("cocone respects the defining relations")
            } else {
                base.id(&base.initial())
            };
            family.actions.insert((d.clone(), i), m);
        }
    }
    KanFamily {
        family,
        arrow: h.clone(),
        t: t.clone(),
        homs,
        presentations,
    }
}

/// Functoriality of the extension: a commuting square `(top, bottom)` from
/// the arrow of `src` to the arrow of `tgt` (both placed on the same `t`)
/// induces a family morphism, copy-wise `bottom` under a shared `top`.
pub fn kan_mor<B: MonoidalBase>(
    src: &KanFamily<B>,
    tgt: &KanFamily<B>,
    top: &B::Mor,
    bottom: &B::Mor,
) -> FamilyMorphism<B> {
    assert_eq!(src.t, tgt.t, "extensions sit on different chains");
    let b = &src.family.base;
    let mut components = BTreeMap::new();
    for c in src.family.chains() {
        let m = if src.concentrated(&c) {
            let mut cocone = vec![b.compose(tgt.u_leg(&c), top)];
            for idx in 0..src.homs[&c].len() {
                cocone.push(b.compose(tgt.w_leg(&c, idx), bottom));
            }
            src.presentations[&c]
                .mediator(b, &cocone)
                .expect("square maps relations to relations")
        } else {
            b.initial_map(src.family.value(&c))
        };
        components.insert(c, m);
    }
    FamilyMorphism {
        source: src.family.clone(),
        target: tgt.family.clone(),
        components,
    }
}

/// The family morphism into `U F` transposed from a commuting square
/// `(a0, b0): h → F(u_t)`: the `U`-copy travels along the canonical maps of
/// `F`, each `W`-copy along the action of its indexing chain map.
fn kan_into_diagram<B: MonoidalBase>(
    kan: &KanFamily<B>,
    f: &LaxDiagram<B>,
    a0: &B::Mor,
    b0: &B::Mor,
) -> FamilyMorphism<B> {
    let b = &f.base;
    let mut components = BTreeMap::new();
    for c in kan.family.chains() {
        let m = if kan.concentrated(&c) {
            let uc = canonical_map_u_t(&c);
            let mut cocone = vec![b.compose(&f.action(&uc), a0)];
            for fmap in &kan.homs[&c] {
                cocone.push(b.compose(&f.action(fmap), b0));
            }
            kan.presentations[&c]
                .mediator(b, &cocone)
                .expect("square transposes to a cocone")
        } else {
            b.initial_map(f.value(&c))
        };
        components.insert(c, m);
    }
    FamilyMorphism {
        source: kan.family.clone(),
        target: underlying(f),
        components,
    }
}

// ---------------------------------------------------------------------------
// The left adjoint of evaluation at u_t
// ---------------------------------------------------------------------------

/// The free lax diagram on an arrow placed at `t`, with the generating data
/// needed to transpose maps across the adjunction.
#[derive(Debug, Clone)]
pub struct PrShriek<B: MonoidalBase> {
    pub t: Chain,
    pub object: ArrowObject<B>,
    pub kan: KanFamily<B>,
    pub free: FreeDiagram<B>,
}

impl<B: MonoidalBase> PrShriek<B> {
    pub fn diagram(&self) -> &LaxDiagram<B> {
        &self.free.diagram
    }
}

/// Maps out of the result correspond to commuting squares out of `a`; see
/// [`adjunct_transformation`] and [`adjunct_square`].
pub fn pr_shriek<B: MonoidalBase>(
    base: &B,
    labels: &[String],
    max_degree: usize,
    t: &Chain,
    a: &ArrowObject<B>,
) -> Result<PrShriek<B>, CosegalifyError<B>> {
    if t.degree() < 2 {
        return Err(CosegalifyError::Input(format!(
            "chain {} has degree {} < 2",
            t.key(),
            t.degree()
        )));
    }
    let kan = kan_family(base, labels, max_degree, t, &a.mor);
    if !kan.family.values.contains_key(t) {
        return Err(CosegalifyError::Input(format!(
            "chain {} is outside the ambient shape",
            t.key()
        )));
    }
    let free = gamma(&kan.family);
    Ok(PrShriek {
        t: t.clone(),
        object: a.clone(),
        kan,
        free,
    })
}

/// Transpose a commuting square `sq: a → F(u_t)` to a transformation
/// `pr_shriek(t, a) → F`.
pub fn adjunct_transformation<B: MonoidalBase>(
    pr: &PrShriek<B>,
    f: &LaxDiagram<B>,
    sq: &ArrowMorphism<B>,
) -> Result<SimpleTransformation<B>, CosegalifyError<B>> {
    let b = &f.base;
    let ut = canonical_map_u_t(&pr.t);
    if sq.source != pr.object.mor || sq.target != f.action(&ut) {
        return Err(CosegalifyError::Input(
            "square does not connect the generating arrow to F(u_t)".to_string(),
        ));
    }
    if !validate_square(b, sq).is_valid() {
        return Err(CosegalifyError::Input("square does not commute".to_string()));
    }
    let pi = kan_into_diagram(&pr.kan, f, &sq.top, &sq.bottom);
    Ok(theta_inverse(&pr.free, &pi, f))
}

/// Transpose a transformation `pr_shriek(t, a) → F` back to a commuting
/// square `a → F(u_t)` by restricting to the generating copies.
pub fn adjunct_square<B: MonoidalBase>(
    pr: &PrShriek<B>,
    f: &LaxDiagram<B>,
    sigma: &SimpleTransformation<B>,
) -> ArrowMorphism<B> {
    let b = &f.base;
    let ut = canonical_map_u_t(&pr.t);
    let e = ut.target();
    let triv = Decomposition::trivial();
    let top = b.compose(
        sigma.component(&e),
        &b.compose(pr.free.inclusion(&e, &triv), pr.kan.u_leg(&e)),
    );
    let idpos = pr.kan.homs[&pr.t]
        .iter()
        .position(|m| m.is_identity())
        .expect("identity endomorphism indexes a copy");
    let bottom = b.compose(
        sigma.component(&pr.t),
        &b.compose(pr.free.inclusion(&pr.t, &triv), pr.kan.w_leg(&pr.t, idpos)),
    );
    ArrowMorphism {
        source: pr.object.mor.clone(),
        target: f.action(&ut),
        top,
        bottom,
    }
}

/// Every transformation `f → g`, by filtering the full per-chain hom
/// product; intended for tiny instances only.
pub fn diagram_homs<B: MonoidalBase>(
    f: &LaxDiagram<B>,
    g: &LaxDiagram<B>,
) -> Vec<SimpleTransformation<B>> {
    let b = &f.base;
    let chains = f.chains();
    let mut total: u128 = 1;
    for t in &chains {
        let n = b.hom_size(f.value(t), g.value(t)).unwrap_or(u128::MAX);
        total = total.saturating_mul(n);
    }
    assert!(
        total <= 1_000_000,
        "hom enumeration would visit {total} candidates"
    );
    let per: Vec<Vec<B::Mor>> = chains
        .iter()
        .map(|t| b.hom(f.value(t), g.value(t)))
        .collect();
    let mut out = Vec::new();
    let mut candidate = SimpleTransformation {
        source: f.clone(),
        target: g.clone(),
        components: BTreeMap::new(),
    };
    for combo in per.into_iter().multi_cartesian_product() {
        candidate.components = chains.iter().cloned().zip(combo).collect();
        if validate_transformation(&candidate).is_valid() {
            out.push(candidate.clone());
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Local gluing
// ---------------------------------------------------------------------------

/// One gluing step at `t`: the new diagram, the connecting transformation,
/// the comparison from the free replacement, and the factorization used.
#[derive(Debug, Clone)]
pub struct GlueLocal<B: MonoidalBase> {
    pub diagram: LaxDiagram<B>,
    /// `H₁: F → S¹F`.
    pub h1: SimpleTransformation<B>,
    /// The comparison out of the free diagram on `Id_W`.
    pub alpha_bar: SimpleTransformation<B>,
    pub h: B::Mor,
    pub j: B::Mor,
    pub sweeps: usize,
}

/// Factor `F(u_t) = j∘h`, extend `h → Id_W` along `u_t`, and push `F` out
/// along the transposed comparison. The composite of the new canonical map
/// with the gluing legs reproduces `j` on the glued copy, which is what
/// moves `F(u_t)` toward the lifting property.
pub fn glue_local<B: MonoidalBase, M: ModelData<B>>(
    f: &LaxDiagram<B>,
    t: &Chain,
    md: &M,
) -> Result<GlueLocal<B>, CosegalifyError<B>> {
    if t.degree() < 2 {
        return Err(CosegalifyError::Input(format!(
            "chain {} has degree {} < 2",
            t.key(),
            t.degree()
        )));
    }
    if !f.values.contains_key(t) {
        return Err(CosegalifyError::Input(format!(
            "chain {} is outside the diagram",
            t.key()
        )));
    }
    let b = &f.base;
    let ut = canonical_map_u_t(t);
    let e = ut.target();
    let f_ut = f.action(&ut);
    let (h, j) = md.factor_cof_trivfib(b, &f_ut);
    let w = b.tgt(&h);
    let kan_h = kan_family(b, &f.labels, f.max_degree, t, &h);
    let kan_id = kan_family(b, &f.labels, f.max_degree, t, &b.id(&w));
    let free_h = gamma(&kan_h.family);
    let free_id = gamma(&kan_id.family);
    let alpha = kan_mor(&kan_h, &kan_id, &h, &b.id(&w));
    let kappa = kan_into_diagram(&kan_h, f, &b.id(&b.src(&h)), &j);
    let sigma = theta_inverse(&free_h, &kappa, f);
    let po = pushout_free(&free_h, &free_id, &alpha, f, &sigma)?;

    // the glued copy of W closes the factorization triangles
    let triv = Decomposition::trivial();
    let abar_e = b.compose(
        po.from_free.component(&e),
        &b.compose(free_id.inclusion(&e, &triv), kan_id.u_leg(&e)),
    );
    let abar_t = b.compose(
        po.from_free.component(t),
        &b.compose(free_id.inclusion(t, &triv), kan_id.u_leg(t)),
    );
    assert_eq!(
        *po.from_f.component(&e),
        b.compose(&abar_e, &h),
        "H₁ does not restrict to the glued cofibration"
    );
    assert_eq!(
        abar_t,
        b.compose(po.from_f.component(t), &j),
        "glued copy disagrees with j"
    );
    assert_eq!(
        abar_t,
        b.compose(&po.diagram.action(&ut), &abar_e),
        "glued copy is not natural over u_t"
    );

    Ok(GlueLocal {
        diagram: po.diagram,
        h1: po.from_f,
        alpha_bar: po.from_free,
        h,
        j,
        sweeps: po.sweeps_used,
    })
}

// ---------------------------------------------------------------------------
// Iterated gluing at one chain
// ---------------------------------------------------------------------------

/// One stage of [`s_t_infinity`]: the factorization used, the resulting
/// diagram, the connecting transformation into it, and whether the
/// canonical map passed the lifting test afterwards.
#[derive(Debug, Clone)]
pub struct StageRecord<B: MonoidalBase> {
    pub h: B::Mor,
    pub j: B::Mor,
    pub result: LaxDiagram<B>,
    pub connecting: SimpleTransformation<B>,
    pub rlp_after: bool,
    pub sweeps: usize,
}

/// The per-chain rectification record: every stage in order, the iteration
/// count, and whether the run converged.
#[derive(Debug, Clone)]
pub struct CosegalifyTrace<B: MonoidalBase> {
    pub t: Chain,
    pub stages: Vec<StageRecord<B>>,
    pub iterations: usize,
    pub converged: bool,
}

/// A converged single-chain rectification.
#[derive(Debug, Clone)]
pub struct SInfinity<B: MonoidalBase> {
    pub diagram: LaxDiagram<B>,
    /// `η_t: F → S_t^∞ F`.
    pub eta: SimpleTransformation<B>,
    pub trace: CosegalifyTrace<B>,
}

/// `second ∘ first`, chain-wise.
pub fn compose_transformations<B: MonoidalBase>(
    second: &SimpleTransformation<B>,
    first: &SimpleTransformation<B>,
) -> SimpleTransformation<B> {
    let b = &first.source.base;
    let components = first
        .components
        .iter()
        .map(|(t, m)| (t.clone(), b.compose(second.component(t), m)))
        .collect();
    SimpleTransformation {
        source: first.source.clone(),
        target: second.target.clone(),
        components,
    }
}

/// Glue at `t` until the canonical map becomes a trivial fibration, up to
/// `cap` stages. Exceeding the cap is an error carrying the partial trace.
pub fn s_t_infinity<B: MonoidalBase, M: ModelData<B>>(
    f: &LaxDiagram<B>,
    t: &Chain,
    md: &M,
    cap: usize,
) -> Result<SInfinity<B>, CosegalifyError<B>> {
    let b = f.base.clone();
    let ut = canonical_map_u_t(t);
    let mut cur = f.clone();
    let mut eta = SimpleTransformation::identity(f);
    let mut stages: Vec<StageRecord<B>> = Vec::new();
    for k in 0.. {
        if md.is_trivial_fibration(&b, &cur.action(&ut)) {
            return Ok(SInfinity {
                diagram: cur,
                eta,
                trace: CosegalifyTrace {
                    t: t.clone(),
                    stages,
                    iterations: k,
                    converged: true,
                },
            });
        }
        if k == cap {
            return Err(CosegalifyError::CapExceeded {
                cap,
                at: t.key(),
                trace: CosegalifyTrace {
                    t: t.clone(),
                    stages,
                    iterations: cap,
                    converged: false,
                },
            });
        }
        let gl = glue_local(&cur, t, md)?;
        eta = compose_transformations(&gl.h1, &eta);
        let rlp_after = md.is_trivial_fibration(&b, &gl.diagram.action(&ut));
        stages.push(StageRecord {
            h: gl.h,
            j: gl.j,
            result: gl.diagram.clone(),
            connecting: gl.h1,
            rlp_after,
            sweeps: gl.sweeps,
        });
        cur = gl.diagram;
    }
    unreachable!("loop exits by return")
}

// ---------------------------------------------------------------------------
// Global rectification
// ---------------------------------------------------------------------------

/// One global round: the per-chain traces, the cone connecting map
/// `F → S¹F`, and the round's resulting diagram.
#[derive(Debug, Clone)]
pub struct GlobalRound<B: MonoidalBase> {
    pub locals: Vec<CosegalifyTrace<B>>,
    pub connecting: SimpleTransformation<B>,
    pub result: LaxDiagram<B>,
}

#[derive(Debug, Clone)]
pub struct GlobalTrace<B: MonoidalBase> {
    pub rounds: Vec<GlobalRound<B>>,
    pub converged: bool,
}

/// A finished global rectification.
#[derive(Debug, Clone)]
pub struct Cosegalified<B: MonoidalBase> {
    pub diagram: LaxDiagram<B>,
    /// `η: F → S^∞ F`.
    pub eta: SimpleTransformation<B>,
    pub trace: GlobalTrace<B>,
}

/// The default stage budget, four sweeps per truncation degree.
pub fn default_cap<B: MonoidalBase>(f: &LaxDiagram<B>) -> usize {
    4 * f.max_degree
}

/// Rectify every chain of degree ≥ 2, one round at a time: run
/// [`s_t_infinity`] at each chain, take the cone colimit of the partial
/// fixes under `F`, and repeat on the result until [`is_cosegal`] holds or
/// the round cap is exceeded.
pub fn cosegalify_global<B: MonoidalBase, M: ModelData<B>>(
    f: &LaxDiagram<B>,
    md: &M,
    cap: usize,
) -> Result<Cosegalified<B>, CosegalifyError<B>> {
    let mut cur = f.clone();
    let mut eta = SimpleTransformation::identity(f);
    let mut rounds: Vec<GlobalRound<B>> = Vec::new();
    for r in 0.. {
        if is_cosegal(&cur, md, false).0 {
            debug_assert!(is_cosegal(&cur, md, true).0);
            return Ok(Cosegalified {
                diagram: cur,
                eta,
                trace: GlobalTrace {
                    rounds,
                    converged: true,
                },
            });
        }
        if r == cap {
            return Err(CosegalifyError::GlobalCapExceeded {
                cap,
                trace: GlobalTrace {
                    rounds,
                    converged: false,
                },
            });
        }
        let mut locals = Vec::new();
        let mut vertices = vec![cur.clone()];
        let mut arrows = Vec::new();
        for t in cur.chains() {
            if t.degree() < 2 {
                continue;
            }
            let s = s_t_infinity(&cur, &t, md, cap)?;
            if s.trace.iterations > 0 {
                arrows.push((0, vertices.len(), s.eta.clone()));
                vertices.push(s.diagram.clone());
            }
            locals.push(s.trace);
        }
        debug_assert!(vertices.len() > 1, "a non-Co-Segal diagram has work to do");
        let colim = colimit_diagram(&vertices, &arrows)?;
        let connecting = colim.legs[0].clone();
        eta = compose_transformations(&connecting, &eta);
        rounds.push(GlobalRound {
            locals,
            connecting,
            result: colim.diagram.clone(),
        });
        cur = colim.diagram;
    }
    unreachable!("loop exits by return")
}

// ---------------------------------------------------------------------------
// JSON for finite-set traces
// ---------------------------------------------------------------------------

impl CosegalifyTrace<crate::base::FinSet> {
    pub fn to_json(&self) -> serde_json::Value {
        let stages: Vec<serde_json::Value> = self
            .stages
            .iter()
            .map(|s| {
                let cards: BTreeMap<String, usize> = s
                    .result
                    .values
                    .iter()
                    .map(|(c, v)| (c.key(), *v))
                    .collect();
                serde_json::json!({
                    "h": s.h,
                    "j": s.j,
                    "rlp_after": s.rlp_after,
                    "sweeps": s.sweeps,
                    "cardinalities": cards,
                })
            })
            .collect();
        serde_json::json!({
            "t": self.t.key(),
            "iterations": self.iterations,
            "converged": self.converged,
            "stages": stages,
        })
    }
}

impl GlobalTrace<crate::base::FinSet> {
    pub fn to_json(&self) -> serde_json::Value {
        let rounds: Vec<serde_json::Value> = self
            .rounds
            .iter()
            .map(|r| {
                let cards: BTreeMap<String, usize> = r
                    .result
                    .values
                    .iter()
                    .map(|(c, v)| (c.key(), *v))
                    .collect();
                serde_json::json!({
                    "locals": r.locals.iter().map(|l| l.to_json()).collect::<Vec<_>>(),
                    "cardinalities": cards,
                })
            })
            .collect();
        serde_json::json!({
            "rounds": rounds,
            "converged": self.converged,
        })
    }
}

// ---------------------------------------------------------------------------
