//! Composite report joining every diagnostic for one RIF.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::boundary::{contact_report_at, find_singularities, ContactConfig, ContactReport};
use crate::error::Result;
use crate::kernels::{
    local_dirichlet_boundary, local_dirichlet_kernel, random_bidisk_point, verify_agler_rif, AglerVectors,
    LocalConfig, ResidualStats,
};
use crate::norms::{
    dirichlet_partial, hp_norm_derivative_at, membership_table, predicted_hp_membership, resolve_verdict,
    H1Check, MembershipReport, QuadConfig, Verdict, VerdictSource,
};
use crate::poly2::{Axis, PolyJson, StabilityReport, C64};
use crate::quad::{Classification, QuadratureResult};
use crate::rif::Rif;
use crate::serde_util;

pub const SCHEMA: u32 = 1;
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub contact: ContactConfig,
    pub quad: QuadConfig,
    /// Exponents at which derivative membership is checked by quadrature.
    pub hp_exponents: Vec<f64>,
    /// Isotropic Dirichlet weights checked from the Taylor coefficients.
    pub dirichlet_alphas: Vec<f64>,
    pub dirichlet_order: usize,
    pub agler_samples: usize,
    pub local_points: usize,
    pub seed: u64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            contact: ContactConfig::default(),
            quad: QuadConfig::default(),
            hp_exponents: vec![1.1, 1.4, 1.6, 2.0],
            dirichlet_alphas: vec![0.25, 0.5, 0.9],
            dirichlet_order: 512,
            agler_samples: 1000,
            local_points: 10,
            seed: 42,
        }
    }
}

/// Derivative membership at one exponent: the contact-order prediction
/// beside the quadrature classification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HpCell {
    pub axis: Axis,
    pub p: f64,
    pub predicted_member: bool,
    pub quadrature: Option<QuadratureResult>,
    /// Whether the quadrature class agrees with the prediction.
    pub concordant: Option<bool>,
}

/// Exponent at which the quadrature flag is not trusted.
pub fn is_borderline(p: f64, threshold: f64) -> bool {
    threshold.is_finite() && (p - threshold).abs() < 1e-12
}

pub fn hp_cell(phi: &Rif, contact: &ContactReport, axis: Axis, p: f64, cfg: &QuadConfig) -> Result<HpCell> {
    let predicted_member = predicted_hp_membership(contact.k(axis), p);
    if p < 1.0 {
        return Ok(HpCell {
            axis,
            p,
            predicted_member: true,
            quadrature: None,
            concordant: None,
        });
    }
    let q = hp_norm_derivative_at(phi, axis, p, &contact.singularities, cfg)?;
    let concordant = if is_borderline(p, contact.hp_threshold(axis)) {
        None
    } else {
        Some((q.classification == Classification::Converged) == predicted_member)
    };
    Ok(HpCell {
        axis,
        p,
        predicted_member,
        quadrature: Some(q),
        concordant,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirichletCell {
    pub alpha: f64,
    pub order: usize,
    #[serde(with = "serde_util::f64_or_inf")]
    pub tail_exponent: f64,
    pub tail_verdict: Verdict,
    pub verdict: Verdict,
    pub source: VerdictSource,
    pub partial_sums: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalDirichletCell {
    #[serde(with = "serde_util::complex_pair")]
    pub z: [C64; 2],
    pub boundary_form: f64,
    pub kernel_form: f64,
    pub rel_diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AglerSection {
    pub vectors: AglerVectors,
    pub residuals: ResidualStats,
    pub local_dirichlet: Vec<LocalDirichletCell>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema: u32,
    pub version: String,
    pub seed: u64,
    pub name: Option<String>,
    pub input: PolyJson,
    pub bidegree: (usize, usize),
    pub stability: StabilityReport,
    pub contact: ContactReport,
    pub membership: MembershipReport,
    pub h1: H1Check,
    pub hp: Vec<HpCell>,
    pub dirichlet: Vec<DirichletCell>,
    pub agler: Option<AglerSection>,
    pub config: AnalysisConfig,
}

/// Seeded interior points with `max(|z1|, |z2|) <= 0.95`.
pub fn interior_points(count: usize, seed: u64) -> Vec<(C64, C64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let (a, b) = random_bidisk_point(&mut rng);
            (a * 0.95, b * 0.95)
        })
        .collect()
}

pub fn local_dirichlet_cells(phi: &Rif, v: &AglerVectors, count: usize, seed: u64) -> Result<Vec<LocalDirichletCell>> {
    let cfg = LocalConfig::default();
    interior_points(count, seed)
        .into_iter()
        .map(|z| {
            let a = local_dirichlet_boundary(phi, z, &cfg)?.value;
            let b = local_dirichlet_kernel(phi, v, z, &cfg)?.value;
            Ok(LocalDirichletCell {
                z: [z.0, z.1],
                boundary_form: a,
                kernel_form: b,
                rel_diff: (a - b).abs() / (1.0 + a.abs()),
            })
        })
        .collect()
}

pub fn analyze(
    phi: &Rif,
    input: PolyJson,
    name: Option<String>,
    agler: Option<AglerVectors>,
    cfg: &AnalysisConfig,
) -> Result<AnalysisReport> {
    let sings = find_singularities(phi, &cfg.contact.scan);
    let contact = contact_report_at(phi, sings, &cfg.contact.fit)?;
    let membership = membership_table(&contact);
    let mut h1 = [0.0; 2];
    for (slot, axis) in Axis::BOTH.into_iter().enumerate() {
        h1[slot] = hp_norm_derivative_at(phi, axis, 1.0, &contact.singularities, &cfg.quad)?.value;
    }
    let (m, n) = phi.bidegree();
    let mut hp = Vec::new();
    for axis in Axis::BOTH {
        for &p in &cfg.hp_exponents {
            hp.push(hp_cell(phi, &contact, axis, p, &cfg.quad)?);
        }
    }
    let series = phi.taylor(cfg.dirichlet_order)?;
    let dirichlet = cfg
        .dirichlet_alphas
        .iter()
        .map(|&alpha| {
            let tail = dirichlet_partial(&series, [alpha, alpha], cfg.dirichlet_order);
            let (verdict, source) = resolve_verdict(&tail, &membership);
            DirichletCell {
                alpha,
                order: cfg.dirichlet_order,
                tail_exponent: tail.tail_exponent,
                tail_verdict: tail.verdict,
                verdict,
                source,
                partial_sums: tail.partial_sums,
            }
        })
        .collect();
    let agler = match agler {
        Some(v) => Some(AglerSection {
            residuals: verify_agler_rif(phi, &v, cfg.agler_samples, cfg.seed),
            local_dirichlet: local_dirichlet_cells(phi, &v, cfg.local_points, cfg.seed)?,
            vectors: v,
        }),
        None => None,
    };
    Ok(AnalysisReport {
        schema: SCHEMA,
        version: VERSION.to_string(),
        seed: cfg.seed,
        name,
        input,
        bidegree: (m, n),
        stability: phi.stability().clone(),
        contact,
        membership,
        h1: H1Check {
            value1: h1[0],
            value2: h1[1],
            m,
            n,
        },
        hp,
        dirichlet,
        agler,
        config: cfg.clone(),
    })
}
