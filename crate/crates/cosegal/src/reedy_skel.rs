//! Locally-Reedy machinery for truncated lax diagrams: the truncation
//! functor `τ_m`, lax-latching objects as finite colimits over the latching
//! categories of `sx`, the skeleton left adjoint `sk_m`, and degreewise
//! colimits of truncated diagrams built through latching pushouts.

use crate::base::{ColimPresentation, MonoidalBase, PresentedColimit, Relation};
use crate::fincat::ValidationReport;
use crate::freelax::{colimit_diagram, DiagramColimit};
use crate::laxdiag::{LaxDiagram, SimpleTransformation};
use crate::sx::{
    concat, latching_category, sigma_chain_map, Chain, ChainMap, LatchObj, LatchingCategory,
};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReedyError {
    #[error("degree mismatch: {0}")]
    Degree(String),
    #[error("colimit mediator missing at {0}")]
    Mediator(String),
    #[error("colimit error: {0}")]
    Colimit(#[from] crate::freelax::FreelaxError),
}

pub type Result<T> = std::result::Result<T, ReedyError>;

/// A diagram with its degree bound read as a truncation level.
pub type TruncatedLaxDiagram<B> = LaxDiagram<B>;

/// Restriction of values, actions, and laxity to degrees `≤ m`.
pub fn truncate<B: MonoidalBase>(f: &LaxDiagram<B>, m: usize) -> TruncatedLaxDiagram<B> {
    assert!(m >= 1, "truncation level must be at least 1");
    let m = m.min(f.max_degree);
    let mut out = LaxDiagram::new(f.base.clone(), f.labels.clone(), m);
    for (t, v) in &f.values {
        if t.degree() <= m {
            out.values.insert(t.clone(), v.clone());
        }
    }
    for ((t, i), a) in &f.actions {
        if t.degree() <= m {
            out.actions.insert((t.clone(), *i), a.clone());
        }
    }
    for ((s, t), l) in &f.laxity {
        if s.degree() + t.degree() <= m {
            out.laxity.insert((s.clone(), t.clone()), l.clone());
        }
    }
    out
}

/// Truncate a transformation along with its endpoints.
pub fn truncate_transformation<B: MonoidalBase>(
    sigma: &SimpleTransformation<B>,
    m: usize,
) -> SimpleTransformation<B> {
    SimpleTransformation {
        source: truncate(&sigma.source, m),
        target: truncate(&sigma.target, m),
        components: sigma
            .components
            .iter()
            .filter(|(t, _)| t.degree() <= m.min(sigma.source.max_degree))
            .map(|(t, c)| (t.clone(), c.clone()))
            .collect(),
    }
}

// ---------------------------------------------------------------------------
// Lax-latching objects
// ---------------------------------------------------------------------------

/// The colimit of `L_z` over the latching category at `z`, with its
/// structure morphisms `ι_γ`.
#[derive(Debug, Clone)]
pub struct LaxLatchingObject<B: MonoidalBase> {
    pub z: Chain,
    pub object: B::Obj,
    pub legs: Vec<B::Mor>,
    pub category: LatchingCategory,
    colimit: PresentedColimit<B>,
}

/// `L_z(γ) = G(s₁)⊗…⊗G(sₙ)` on a latching object.
pub fn lz_object<B: MonoidalBase>(g: &LaxDiagram<B>, gamma: &LatchObj) -> B::Obj {
    let objs: Vec<B::Obj> = gamma.blocks.iter().map(|c| g.value(c).clone()).collect();
    g.base.tensor_many_obj(&objs)
}

/// `L_z` on a comma morphism `δ = (g, v̄): x → y`: the grouped laxity of
/// `x`'s blocks followed by the tensor of the contravariant actions `G(v̄)`.
pub fn lz_morphism<B: MonoidalBase>(
    g: &LaxDiagram<B>,
    cat: &LatchingCategory,
    delta: &crate::sx::LatchMor,
) -> B::Mor {
    let b = &g.base;
    let x = &cat.objects[delta.src];
    let groups: Vec<Vec<Chain>> = (0..delta.g.n)
        .map(|k| {
            x.blocks
                .iter()
                .zip(&delta.g.values)
                .filter(|(_, &v)| v == k)
                .map(|(c, _)| c.clone())
                .collect()
        })
        .collect();
    let phi_parts: Vec<B::Mor> = groups.iter().map(|gr| g.iterated_laxity(gr)).collect();
    let phi_g = b.tensor_many_mor(&phi_parts);
    let v_parts: Vec<B::Mor> = delta.vs.iter().map(|v| g.action(v)).collect();
    b.compose(&b.tensor_many_mor(&v_parts), &phi_g)
}

/// Functoriality of `L_z` on all composable pairs of the latching category.
pub fn validate_lz_functor<B: MonoidalBase>(
    g: &LaxDiagram<B>,
    cat: &LatchingCategory,
) -> ValidationReport {
    let mut report = ValidationReport::default();
    let b = &g.base;
    for d1 in &cat.morphisms {
        for d2 in &cat.morphisms {
            if d1.tgt != d2.src {
                continue;
            }
            let composite = match crate::sx::groth_compose(
                &cat.objects
                    .iter()
                    .map(|o| crate::sx::GrothObj { blocks: o.blocks.clone() })
                    .collect::<Vec<_>>(),
                d2,
                d1,
            ) {
                Ok(c) => c,
                Err(e) => {
                    report.push(format!("composite of comma morphisms fails: {e}"));
                    continue;
                }
            };
            let lhs = lz_morphism(g, cat, &composite);
            let rhs = b.compose(&lz_morphism(g, cat, d2), &lz_morphism(g, cat, d1));
            if lhs != rhs {
                report.push(format!(
                    "L_z not functorial on {} ∘ {}",
                    d2.key(),
                    d1.key()
                ));
            }
        }
    }
    report
}

/// The lax-latching object of a truncated diagram at a chain one degree
/// above its bound.
pub fn laxlatch<B: MonoidalBase>(g: &LaxDiagram<B>, z: &Chain) -> Result<LaxLatchingObject<B>> {
    if z.degree() != g.max_degree + 1 {
        return Err(ReedyError::Degree(format!(
            "latching chain {} has degree {}, expected {}",
            z.key(),
            z.degree(),
            g.max_degree + 1
        )));
    }
    let b = &g.base;
    let cat = latching_category(z);
    let report = validate_lz_functor(g, &cat);
    debug_assert!(report.is_valid(), "{report}");
    let vertices: Vec<B::Obj> = cat.objects.iter().map(|o| lz_object(g, o)).collect();
    let relations: Vec<Relation<B>> = cat
        .morphisms
        .iter()
        .map(|delta| Relation {
            i: delta.src,
            f: b.id(&vertices[delta.src]),
            j: delta.tgt,
            g: lz_morphism(g, &cat, delta),
        })
        .collect();
    let colimit = crate::base::presented_colimit(b, &ColimPresentation { vertices, relations });
    Ok(LaxLatchingObject {
        z: z.clone(),
        object: colimit.obj.clone(),
        legs: colimit.legs.clone(),
        category: cat,
        colimit,
    })
}

impl<B: MonoidalBase> LaxLatchingObject<B> {
    /// The structure morphism at a given latching object, if present.
    pub fn leg_at(&self, gamma: &LatchObj) -> Option<&B::Mor> {
        let idx = self.category.objects.iter().position(|o| o == gamma)?;
        Some(&self.legs[idx])
    }

    /// Mediate a cocone given by one morphism per latching object.
    pub fn mediator(&self, b: &B, cocone: &[B::Mor]) -> Option<B::Mor> {
        self.colimit.mediator(b, cocone)
    }

    /// The canonical comparison `laxlatch(F,z) → F(z)` for a diagram
    /// defined at `z`, mediating the legs `F(u_γ)∘φ_{γ.blocks}`.
    pub fn canonical_to_value(&self, f: &LaxDiagram<B>) -> Option<B::Mor> {
        let b = &f.base;
        let cocone: Vec<B::Mor> = self
            .category
            .objects
            .iter()
            .map(|gamma| {
                b.compose(&f.action(&gamma.map), &f.iterated_laxity(&gamma.blocks))
            })
            .collect();
        self.mediator(b, &cocone)
    }
}

// ---------------------------------------------------------------------------
// The skeleton left adjoint
// ---------------------------------------------------------------------------

/// `sk_m G`, keeping the latching data used at each new top chain.
#[derive(Debug, Clone)]
pub struct Skeleton<B: MonoidalBase> {
    pub diagram: LaxDiagram<B>,
    pub latch: BTreeMap<Chain, LaxLatchingObject<B>>,
}

/// Extend a truncated diagram one degree up by its lax-latching objects.
pub fn skeleton<B: MonoidalBase>(g: &LaxDiagram<B>) -> Result<Skeleton<B>> {
    let b = g.base.clone();
    let m = g.max_degree;
    let mut out = LaxDiagram::new(b.clone(), g.labels.clone(), m + 1);
    out.values = g.values.clone();
    out.actions = g.actions.clone();
    out.laxity = g.laxity.clone();
    let mut latch = BTreeMap::new();
    for z in out.chains() {
        if z.degree() != m + 1 {
            continue;
        }
        let l = laxlatch(g, &z)?;
        out.values.insert(z.clone(), l.object.clone());
        for i in 0..z.degree() - 1 {
            let gen = sigma_chain_map(&z, i).expect("index in range");
            let gamma = LatchObj { blocks: vec![gen.target()], map: gen };
            let leg = l
                .leg_at(&gamma)
                .ok_or_else(|| ReedyError::Mediator(format!("missing generator leg at {}", z.key())))?;
            out.actions.insert((z.clone(), i), leg.clone());
        }
        latch.insert(z, l);
    }
    // new laxity: the pure laxity maps ι at two-block identity objects
    let keys = out.laxity_keys();
    for (s, t) in keys {
        if s.degree() + t.degree() != m + 1 {
            continue;
        }
        let z = concat(&s, &t).expect("laxity key composable");
        let gamma = LatchObj {
            blocks: vec![s.clone(), t.clone()],
            map: ChainMap::identity(&z),
        };
        let l = &latch[&z];
        let leg = l
            .leg_at(&gamma)
            .ok_or_else(|| ReedyError::Mediator(format!("missing pure laxity leg at {}", z.key())))?;
        out.laxity.insert((s, t), leg.clone());
    }
    Ok(Skeleton { diagram: out, latch })
}

impl<B: MonoidalBase> Skeleton<B> {
    /// The adjunct of `ρ: G → τ_m H`: identity-shaped at degrees `≤ m`,
    /// mediated through the latching colimits at the top degree.
    pub fn adjunct(
        &self,
        h: &LaxDiagram<B>,
        rho: &SimpleTransformation<B>,
    ) -> Option<SimpleTransformation<B>> {
        let b = &h.base;
        let mut components = rho.components.clone();
        for (z, l) in &self.latch {
            let cocone: Vec<B::Mor> = l
                .category
                .objects
                .iter()
                .map(|gamma| {
                    let parts: Vec<B::Mor> = gamma
                        .blocks
                        .iter()
                        .map(|c| rho.components.get(c).cloned())
                        .collect::<Option<Vec<_>>>()?;
                    Some(b.compose(
                        &b.compose(&h.action(&gamma.map), &h.iterated_laxity(&gamma.blocks)),
                        &b.tensor_many_mor(&parts),
                    ))
                })
                .collect::<Option<Vec<_>>>()?;
            components.insert(z.clone(), l.mediator(b, &cocone)?);
        }
        Some(SimpleTransformation {
            source: self.diagram.clone(),
            target: h.clone(),
            components,
        })
    }
}

/// The counit `sk_m(τ_m H) → H`: identities below, the canonical latching
/// comparison on top.
pub fn skeleton_counit<B: MonoidalBase>(
    h: &LaxDiagram<B>,
) -> Result<(Skeleton<B>, SimpleTransformation<B>)> {
    assert!(h.max_degree >= 2, "counit needs at least degree 2");
    let m = h.max_degree - 1;
    let sk = skeleton(&truncate(h, m))?;
    let b = &h.base;
    let mut components = BTreeMap::new();
    for t in h.chains() {
        if t.degree() <= m {
            components.insert(t.clone(), b.id(h.value(&t)));
        } else {
            let eps = sk.latch[&t]
                .canonical_to_value(h)
                .ok_or_else(|| ReedyError::Mediator(format!("counit at {}", t.key())))?;
            components.insert(t.clone(), eps);
        }
    }
    let eps = SimpleTransformation {
        source: sk.diagram.clone(),
        target: h.clone(),
        components,
    };
    Ok((sk, eps))
}

// ---------------------------------------------------------------------------
// Degreewise colimits
// ---------------------------------------------------------------------------

/// A colimit of truncated diagrams computed degreewise: the known colimit
/// of the truncations below, latching-corrected pushouts `O_i(z)` glued on
/// top.
#[derive(Debug, Clone)]
pub struct ColimitLaxg<B: MonoidalBase> {
    pub diagram: LaxDiagram<B>,
    pub legs: Vec<SimpleTransformation<B>>,
    low: DiagramColimit<B>,
    top: BTreeMap<Chain, (PresentedColimit<B>, LaxLatchingObject<B>)>,
}

pub fn colimit_laxg<B: MonoidalBase>(
    vertices: &[LaxDiagram<B>],
    arrows: &[(usize, usize, SimpleTransformation<B>)],
) -> Result<ColimitLaxg<B>> {
    let first = vertices.first().expect("at least one vertex");
    assert!(first.max_degree >= 2, "degreewise colimit needs degree ≥ 2");
    let b = first.base.clone();
    let m = first.max_degree - 1;

    // the known colimit of the truncations
    let truncs: Vec<LaxDiagram<B>> = vertices.iter().map(|v| truncate(v, m)).collect();
    let trunc_arrows: Vec<(usize, usize, SimpleTransformation<B>)> = arrows
        .iter()
        .map(|(i, j, s)| (*i, *j, truncate_transformation(s, m)))
        .collect();
    let low = colimit_diagram(&truncs, &trunc_arrows)?;

    let mut out = LaxDiagram::new(b.clone(), first.labels.clone(), m + 1);
    out.values = low.diagram.values.clone();
    out.actions = low.diagram.actions.clone();
    out.laxity = low.diagram.laxity.clone();
    let mut top = BTreeMap::new();
    let mut top_legs: BTreeMap<Chain, Vec<B::Mor>> = BTreeMap::new();

    for z in out.chains() {
        if z.degree() != m + 1 {
            continue;
        }
        let latch_e = laxlatch(&low.diagram, &z)?;
        // per vertex: latch(τXᵢ) with its comparison λᵢ into latch(E) and
        // the canonical εᵢ into Xᵢ(z)
        let mut pres_vertices: Vec<B::Obj> =
            vertices.iter().map(|v| v.value(&z).clone()).collect();
        pres_vertices.push(latch_e.object.clone());
        let e_index = pres_vertices.len() - 1;
        let mut relations = Vec::new();
        for (i, v) in vertices.iter().enumerate() {
            let latch_i = laxlatch(&truncs[i], &z)?;
            let eps_i = latch_i
                .canonical_to_value(v)
                .ok_or_else(|| ReedyError::Mediator(format!("ε at {} vertex {i}", z.key())))?;
            let lambda_cocone: Vec<B::Mor> = latch_i
                .category
                .objects
                .iter()
                .map(|gamma| {
                    let parts: Vec<B::Mor> = gamma
                        .blocks
                        .iter()
                        .map(|c| low.legs[i].component(c).clone())
                        .collect();
                    b.compose(
                        latch_e.leg_at(gamma).expect("same latching category"),
                        &b.tensor_many_mor(&parts),
                    )
                })
                .collect();
            let lambda_i = latch_i
                .mediator(&b, &lambda_cocone)
                .ok_or_else(|| ReedyError::Mediator(format!("λ at {} vertex {i}", z.key())))?;
            relations.push(Relation { i, f: eps_i, j: e_index, g: lambda_i });
        }
        for (i, j, s) in arrows {
            relations.push(Relation {
                i: *i,
                f: b.id(vertices[*i].value(&z)),
                j: *j,
                g: s.component(&z).clone(),
            });
        }
        let pres = crate::base::presented_colimit(
            &b,
            &ColimPresentation { vertices: pres_vertices, relations },
        );
        out.values.insert(z.clone(), pres.obj.clone());
        // structure maps factor through the latching leg of E
        let from_latch_e = pres.legs[e_index].clone();
        for i in 0..z.degree() - 1 {
            let gen = sigma_chain_map(&z, i).expect("index in range");
            let gamma = LatchObj { blocks: vec![gen.target()], map: gen };
            let leg = latch_e.leg_at(&gamma).expect("generator latching object");
            out.actions
                .insert((z.clone(), i), b.compose(&from_latch_e, leg));
        }
        top_legs.insert(z.clone(), pres.legs.clone());
        top.insert(z, (pres, latch_e));
    }
    for (s, t) in out.laxity_keys() {
        if s.degree() + t.degree() != m + 1 {
            continue;
        }
        let z = concat(&s, &t).expect("laxity key composable");
        let (pres, latch_e) = &top[&z];
        let gamma = LatchObj {
            blocks: vec![s.clone(), t.clone()],
            map: ChainMap::identity(&z),
        };
        let leg = latch_e.leg_at(&gamma).expect("pure laxity latching object");
        out.laxity.insert(
            (s, t),
            b.compose(&pres.legs[pres.legs.len() - 1], leg),
        );
    }

    let legs = vertices
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let mut components = low.legs[i].components.clone();
            for (z, legs) in &top_legs {
                components.insert(z.clone(), legs[i].clone());
            }
            SimpleTransformation { source: v.clone(), target: out.clone(), components }
        })
        .collect();
    Ok(ColimitLaxg { diagram: out, legs, low, top })
}

impl<B: MonoidalBase> ColimitLaxg<B> {
    /// Mediate a commuting cocone: below the top degree through the
    /// truncation colimit, on top through the combined presentation.
    pub fn mediator(
        &self,
        cocone: &[SimpleTransformation<B>],
    ) -> Option<SimpleTransformation<B>> {
        let b = &self.diagram.base;
        let g = &cocone.first()?.target;
        let trunc_cocone: Vec<SimpleTransformation<B>> = cocone
            .iter()
            .map(|s| truncate_transformation(s, self.diagram.max_degree - 1))
            .collect();
        let low_med = self.low.mediator(&trunc_cocone)?;
        let mut components = low_med.components.clone();
        for (z, (pres, latch_e)) in &self.top {
            // the latching vertex maps to G(z) through the mediated legs
            let latch_cocone: Vec<B::Mor> = latch_e
                .category
                .objects
                .iter()
                .map(|gamma| {
                    let parts: Vec<B::Mor> = gamma
                        .blocks
                        .iter()
                        .map(|c| components.get(c).cloned())
                        .collect::<Option<Vec<_>>>()?;
                    Some(b.compose(
                        &b.compose(&g.action(&gamma.map), &g.iterated_laxity(&gamma.blocks)),
                        &b.tensor_many_mor(&parts),
                    ))
                })
                .collect::<Option<Vec<_>>>()?;
            let latch_to_g = latch_e.mediator(b, &latch_cocone)?;
            let mut legs: Vec<B::Mor> =
                cocone.iter().map(|s| s.component(z).clone()).collect();
            legs.push(latch_to_g);
            components.insert(z.clone(), pres.mediator(b, &legs)?);
        }
        Some(SimpleTransformation {
            source: self.diagram.clone(),
            target: g.clone(),
            components,
        })
    }
}
