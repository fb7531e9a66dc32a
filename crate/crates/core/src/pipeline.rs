//! Construction and verification for a parsed document, with the exit-code contract
//! 0 (verdict true), 1 (verification failed), 2 (input invalid), 3 (falsification).

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::doc::{parse_document, DocumentError, GluingDocument, TopCandidate};
use crate::gen::Sampler;
use crate::index::GlueObject;
use crate::ringed::{glue_ringed, verify_ringed_glued, RingedError, RingedGluingData, RingedGluingFunctor};
use crate::sheaf_glue::{
    build_limit_sheaf, canonical_twist, sheaf_functor_from_data, verify_sheaf_glued, SheafGlueError, SheafGluingData,
};
use crate::space::Space;
use crate::top_glue::{
    count_mediating, functor_from_data, is_cone, legs_from_charts, mediating_morphism, standard_representative,
    verify_glued, Falsification, GlueError, TopCone, TopGluingData,
};

/// Sampled cones per top run.
pub const DEFAULT_CONES: usize = 16;
/// Largest `|N|^|Q|` enumerated when checking uniqueness of mediating maps.
pub const ENUMERATION_LIMIT: u64 = 1 << 20;

#[derive(Debug, Clone, Copy)]
pub struct PipelineOptions {
    pub seed: u64,
    pub cones: usize,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions { seed: crate::gen::seed_from_env(), cones: DEFAULT_CONES }
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Document(#[from] DocumentError),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("falsified: {0}")]
    Falsified(Falsification),
}

impl PipelineError {
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Falsified(_) => 3,
            _ => 2,
        }
    }

    /// Structured diagnostic for the CLI.
    pub fn to_json(&self) -> Value {
        match self {
            PipelineError::Document(DocumentError::Invalid(d)) => {
                json!({"error": "invalid document", "pointer": d.pointer, "message": d.message})
            }
            PipelineError::Document(DocumentError::SchemeUnsupported) => json!({"error": "scheme verification unsupported"}),
            PipelineError::Invalid(m) => json!({"error": "invalid input", "message": m}),
            PipelineError::Falsified(f) => json!({"error": "falsified", "claim": f.claim, "detail": f.detail}),
        }
    }
}

impl From<GlueError> for PipelineError {
    fn from(e: GlueError) -> Self {
        match e {
            GlueError::Falsified(f) => PipelineError::Falsified(f),
            other => PipelineError::Invalid(other.to_string()),
        }
    }
}

impl From<SheafGlueError> for PipelineError {
    fn from(e: SheafGlueError) -> Self {
        PipelineError::Invalid(e.to_string())
    }
}

impl From<RingedError> for PipelineError {
    fn from(e: RingedError) -> Self {
        match e {
            RingedError::Falsified(f) | RingedError::Glue(GlueError::Falsified(f)) => PipelineError::Falsified(f),
            RingedError::SchemeUnsupported => PipelineError::Document(DocumentError::SchemeUnsupported),
            other => PipelineError::Invalid(other.to_string()),
        }
    }
}

fn falsified(claim: &str, detail: impl Into<String>) -> PipelineError {
    PipelineError::Falsified(Falsification::new(claim, detail))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub kind: String,
    pub variant: Option<String>,
    pub seed: u64,
    pub conditions: BTreeMap<String, bool>,
    pub verdict: bool,
}

impl VerificationReport {
    pub fn exit_code(&self) -> i32 {
        if self.verdict {
            0
        } else {
            1
        }
    }

    /// Pretty JSON with sorted keys.
    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("serializable");
        serde_json::to_string_pretty(&value).expect("serializable") + "\n"
    }
}

/// A finished run: the report, the glued space and a kind-specific summary.
#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub report: VerificationReport,
    pub q: Space,
    pub summary: Value,
}

impl PipelineRun {
    pub fn q_json(&self) -> String {
        serde_json::to_string_pretty(&*self.q).expect("serializable") + "\n"
    }

    pub fn q_dot(&self) -> String {
        self.q.specialization_dot("Q")
    }

    pub fn summary_json(&self) -> String {
        serde_json::to_string_pretty(&self.summary).expect("serializable") + "\n"
    }
}

pub fn run_text(text: &str, opts: &PipelineOptions) -> Result<PipelineRun, PipelineError> {
    let doc = parse_document(text)?;
    run_pipeline(&doc, opts)
}

pub fn run_pipeline(doc: &GluingDocument, opts: &PipelineOptions) -> Result<PipelineRun, PipelineError> {
    let (conditions, verdict, q, summary) = match doc {
        GluingDocument::Top { data, candidate } => run_top(data, candidate.as_ref(), opts)?,
        GluingDocument::Sheaf { data } => run_sheaf(data)?,
        GluingDocument::Ringed { data } => run_ringed(data)?,
    };
    let report = VerificationReport {
        kind: doc.kind().name().to_string(),
        variant: doc.variant().map(str::to_string),
        seed: opts.seed,
        conditions,
        verdict,
    };
    Ok(PipelineRun { report, q, summary })
}

/// Conditions, the verdict over the mandatory ones, the glued space and a summary.
type Outcome = (BTreeMap<String, bool>, bool, Space, Value);

fn run_top(data: &TopGluingData, candidate: Option<&TopCandidate>, opts: &PipelineOptions) -> Result<Outcome, PipelineError> {
    data.validate()?;
    let g = functor_from_data(data)?;
    let glued = standard_representative(&g)?;
    let own = verify_glued(&glued.q, &glued.iota, &g);
    if !own.verdict {
        return Err(falsified("the standard representative is glued", format!("{:?}", own.conditions)));
    }
    let cone = is_cone(&TopCone { apex: glued.q.clone(), legs: glued.iota.clone() }, &g)?;
    if !cone.all() {
        return Err(falsified("the standard legs form a cone", format!("{cone:?}")));
    }
    let mut sampler = Sampler::new(opts.seed);
    for k in 0..opts.cones {
        let c = sampler.cone(&glued, data.variant, 2);
        let mu = mediating_morphism(&c, &glued.q, &glued.iota, &g)?;
        let through = TopCone::through(&glued.iota, &mu)?;
        if through.legs != c.legs {
            return Err(falsified("the mediating map commutes", format!("sampled cone {k}")));
        }
        if let Some(count) = count_mediating(&c, &glued.q, &glued.iota, &g, ENUMERATION_LIMIT) {
            if count != 1 {
                return Err(falsified("the mediating map is unique", format!("sampled cone {k} has {count}")));
            }
        }
    }
    let (report, q) = match candidate {
        None => (own, glued.q.clone()),
        Some(c) => {
            let legs = legs_from_charts(&g, &c.charts)?;
            (verify_glued(&c.space, &legs, &g), c.space.clone())
        }
    };
    let mut conditions = report.conditions.clone();
    conditions.insert("cone".into(), true);
    conditions.insert("universal_sampled".into(), true);
    let images: Vec<String> = (0..g.n())
        .map(|i| {
            let f = &glued.iota[&GlueObject::Single(i)];
            f.image(f.dom().full()).to_string()
        })
        .collect();
    let summary = json!({
        "points": q.points(),
        "opens": q.opens().len(),
        "charts": g.n(),
        "objects": g.objects().len(),
        "images": images,
    });
    Ok((conditions, report.verdict, q, summary))
}

fn run_sheaf(data: &SheafGluingData) -> Result<Outcome, PipelineError> {
    data.validate()?;
    let g = sheaf_functor_from_data(data)?;
    let limit = build_limit_sheaf(&g)?;
    let report = verify_sheaf_glued(&limit.sheaf, &limit.projections, &g, &limit)?;
    if !report.verdict {
        return Err(falsified("the limit sheaf is glued", format!("{:?}", report.conditions)));
    }
    let mut conditions = report.conditions.clone();
    if data.sheaves.iter().all(|f| f.is_sheaf()) {
        if !limit.sheaf.is_sheaf() {
            return Err(falsified("the limit of sheaves is a sheaf", "sheaf condition fails"));
        }
        conditions.insert("limit_is_sheaf".into(), true);
    }
    let (twisted, psi) = canonical_twist(&limit.sheaf)?;
    let moved = limit.projections.iter().map(|p| psi.then(p)).collect::<Result<Vec<_>, _>>().map_err(|e| PipelineError::Invalid(e.to_string()))?;
    let transported = verify_sheaf_glued(&twisted, &moved, &g, &limit)?;
    if !transported.verdict {
        return Err(falsified("isomorphic cones are glued", format!("{:?}", transported.conditions)));
    }
    conditions.insert("transported".into(), true);
    let sections: BTreeMap<String, String> =
        limit.sheaf.opens().iter().map(|&v| (v.to_string(), limit.sheaf.sections(v).to_string())).collect();
    let summary = json!({"points": data.base.points(), "charts": g.n(), "sections": sections});
    let verdict = conditions.values().all(|&b| b);
    Ok((conditions, verdict, data.base.clone(), summary))
}

fn run_ringed(data: &RingedGluingData) -> Result<Outcome, PipelineError> {
    let g = RingedGluingFunctor::new(data.clone())?;
    let glued = glue_ringed(&g)?;
    let report = verify_ringed_glued(&glued.ringed, &glued.projections, &g, &glued)?;
    if !report.verdict {
        return Err(falsified("the glued ringed space is glued", format!("{:?}", report.conditions)));
    }
    let mut conditions = report.conditions.clone();
    conditions.insert("stalk_isomorphisms".into(), true);
    let q = glued.ringed.space.clone();
    let stalks: BTreeMap<String, Value> = (0..q.points())
        .map(|x| {
            let s = glued.ringed.stalk(x);
            (x.to_string(), json!({"order": s.ring.order(), "local": s.ring.is_local()}))
        })
        .collect();
    let summary = json!({
        "points": q.points(),
        "opens": q.opens().len(),
        "global_sections": glued.ringed.sheaf.ring(q.full()).order(),
        "stalks": stalks,
    });
    let verdict = conditions.values().all(|&b| b);
    Ok((conditions, verdict, q, summary))
}
