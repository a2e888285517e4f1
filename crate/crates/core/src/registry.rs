//! Named examples with their known invariants.

use std::f64::consts::SQRT_2;

use serde::Serialize;

use crate::kernels::AglerVectors;
use crate::poly2::{BiPoly, PolyJson};
use crate::rif::Rif;
use crate::serde_util;

fn build(p: BiPoly, degree: (usize, usize)) -> Rif {
    Rif::with_bidegree(p, degree).expect("registry polynomial is stable")
}

fn favorite_p() -> BiPoly {
    BiPoly::from_real_terms(&[(0, 0, 2.0), (1, 0, -1.0), (0, 1, -1.0)])
}

fn amy_p() -> BiPoly {
    BiPoly::from_real_terms(&[(0, 0, 4.0), (1, 0, -1.0), (0, 1, -3.0), (1, 1, -1.0), (0, 2, 1.0)])
}

fn psi_p() -> BiPoly {
    BiPoly::from_real_terms(&[(0, 0, 2.0), (1, 1, -1.0), (2, 1, -1.0)])
}

fn continuous_p() -> BiPoly {
    BiPoly::from_real_terms(&[(0, 0, 3.0), (1, 0, -1.0), (0, 1, -1.0)])
}

/// `(2 z1 z2 - z1 - z2) / (2 - z1 - z2)`.
pub fn favorite() -> Rif {
    build(favorite_p(), (1, 1))
}

/// Bidegree `(1, 2)` example with contact order 4.
pub fn amy() -> Rif {
    build(amy_p(), (1, 2))
}

/// `p = 2 - z1 z2 - z1^2 z2`, bidegree `(2, 1)`.
pub fn psi() -> Rif {
    build(psi_p(), (2, 1))
}

/// `(3 z1 z2 - z1 - z2) / (3 - z1 - z2)`, smooth on the closed bidisk.
pub fn continuous() -> Rif {
    build(continuous_p(), (1, 1))
}

/// `z1 z2`, written as `p = 1` reflected at bidegree `(1, 1)`.
pub fn monomial() -> Rif {
    build(BiPoly::from_real_terms(&[(0, 0, 1.0)]), (1, 1))
}

pub fn favorite_agler() -> AglerVectors {
    AglerVectors {
        e1: vec![BiPoly::from_real_terms(&[(0, 0, SQRT_2), (0, 1, -SQRT_2)])],
        f2: vec![BiPoly::from_real_terms(&[(0, 0, SQRT_2), (1, 0, -SQRT_2)])],
    }
}

pub fn psi_agler() -> AglerVectors {
    AglerVectors {
        e1: vec![
            BiPoly::from_real_terms(&[(0, 0, SQRT_2), (1, 1, -SQRT_2)]),
            BiPoly::from_real_terms(&[(0, 0, 1.0), (1, 0, -1.0)]),
        ],
        f2: vec![BiPoly::from_real_terms(&[(1, 0, 1.0), (2, 0, -1.0)])],
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Expected {
    pub k1: f64,
    pub k2: f64,
    #[serde(with = "serde_util::f64_or_inf")]
    pub hp_threshold_1: f64,
    #[serde(with = "serde_util::f64_or_inf")]
    pub hp_threshold_2: f64,
    /// Isotropic weights below this cutoff are guaranteed.
    #[serde(with = "serde_util::f64_or_inf")]
    pub dirichlet_cutoff: f64,
    pub k_tolerance: f64,
    pub agler_vectors: Option<AglerVectors>,
    /// Pick function as `(numerator, denominator)` in half-plane variables.
    pub pick_closed_form: Option<(PolyJson, PolyJson)>,
    pub notes: Vec<&'static str>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Entry {
    pub name: &'static str,
    pub p: PolyJson,
    pub expected: Expected,
}

impl Entry {
    pub fn rif(&self) -> Rif {
        build(
            self.p.to_poly().expect("registry polynomial parses"),
            self.p.declared_bidegree(),
        )
    }
}

fn declared(p: BiPoly, m: usize, n: usize) -> PolyJson {
    let mut j = PolyJson::from(&p);
    let mut coeffs = vec![vec![[0.0, 0.0]; n + 1]; m + 1];
    for (k, row) in j.coeffs.iter().enumerate() {
        for (l, c) in row.iter().enumerate() {
            coeffs[k][l] = *c;
        }
    }
    j.m = m;
    j.n = n;
    j.coeffs = coeffs;
    j
}

fn pick(num: &[(usize, usize, f64)], den: &[(usize, usize, f64)]) -> Option<(PolyJson, PolyJson)> {
    Some((
        PolyJson::from(&BiPoly::from_real_terms(num)),
        PolyJson::from(&BiPoly::from_real_terms(den)),
    ))
}

pub const NAMES: [&str; 5] = ["favorite", "amy", "psi", "continuous", "monomial"];

pub fn entry(name: &str) -> Option<Entry> {
    let inf = f64::INFINITY;
    let e = match name {
        "favorite" => Entry {
            name: "favorite",
            p: declared(favorite_p(), 1, 1),
            expected: Expected {
                k1: 2.0,
                k2: 2.0,
                hp_threshold_1: 1.5,
                hp_threshold_2: 1.5,
                dirichlet_cutoff: 0.75,
                k_tolerance: 0.05,
                agler_vectors: Some(favorite_agler()),
                pick_closed_form: pick(&[(1, 0, 0.5), (0, 1, 0.5)], &[(0, 0, 1.0)]),
                notes: vec![
                    "slice zero z1 = zeta/(2 zeta - 1) gives 1 - |z1| ~ t^2/2, so K1 = K2 = 2",
                    "derivatives lie in H^p exactly for p < 3/2",
                    "coefficient asymptotics put phi in D_alpha exactly for alpha < 3/4",
                    "|p|^2 - |p~|^2 = 2(1-|z1|^2)|1-z2|^2 + 2(1-|z2|^2)|1-z1|^2",
                ],
            },
        },
        "amy" => Entry {
            name: "amy",
            p: declared(amy_p(), 1, 2),
            expected: Expected {
                k1: 4.0,
                k2: 4.0,
                hp_threshold_1: 1.25,
                hp_threshold_2: 1.25,
                dirichlet_cutoff: 0.625,
                k_tolerance: 0.05,
                agler_vectors: None,
                pick_closed_form: pick(&[(1, 1, 0.5), (0, 2, 0.5), (0, 0, -1.0)], &[(1, 0, 1.0), (0, 1, 1.0)]),
                notes: vec![
                    "contact order 4 at (1, 1); derivatives in H^p exactly for p < 5/4",
                    "dirichlet cutoff is the guaranteed range alpha < p/2 with p = 5/4",
                ],
            },
        },
        "psi" => Entry {
            name: "psi",
            p: declared(psi_p(), 2, 1),
            expected: Expected {
                k1: 2.0,
                k2: 2.0,
                hp_threshold_1: 1.5,
                hp_threshold_2: 1.5,
                dirichlet_cutoff: 0.75,
                k_tolerance: 0.05,
                agler_vectors: Some(psi_agler()),
                pick_closed_form: pick(&[(2, 0, 2.0), (1, 1, 3.0), (0, 0, -1.0)], &[(1, 0, 1.0), (0, 1, 1.0)]),
                notes: vec![
                    "common zero of multiplicity 2 at (1, 1), both contact orders 2",
                    "1/p lies in D_alpha exactly for alpha < -1/4",
                    "Doug functional diverges",
                ],
            },
        },
        "continuous" => Entry {
            name: "continuous",
            p: declared(continuous_p(), 1, 1),
            expected: Expected {
                k1: 0.0,
                k2: 0.0,
                hp_threshold_1: inf,
                hp_threshold_2: inf,
                dirichlet_cutoff: inf,
                k_tolerance: 0.0,
                agler_vectors: None,
                pick_closed_form: pick(&[(1, 0, -3.0), (0, 1, -3.0)], &[(1, 1, 1.0), (0, 0, -5.0)]),
                notes: vec!["continuous on the closed bidisk, no singular points"],
            },
        },
        "monomial" => Entry {
            name: "monomial",
            p: declared(BiPoly::from_real_terms(&[(0, 0, 1.0)]), 1, 1),
            expected: Expected {
                k1: 0.0,
                k2: 0.0,
                hp_threshold_1: inf,
                hp_threshold_2: inf,
                dirichlet_cutoff: inf,
                k_tolerance: 0.0,
                agler_vectors: None,
                pick_closed_form: pick(&[(1, 0, -1.0), (0, 1, -1.0)], &[(1, 1, 1.0), (0, 0, -1.0)]),
                notes: vec!["phi = z1 z2; partial derivatives are unimodular on the torus"],
            },
        },
        _ => return None,
    };
    Some(e)
}

pub fn all() -> Vec<Entry> {
    NAMES.iter().filter_map(|n| entry(n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entries_build_the_same_functions() {
        for e in all() {
            let a = e.rif();
            let b = match e.name {
                "favorite" => favorite(),
                "amy" => amy(),
                "psi" => psi(),
                "continuous" => continuous(),
                _ => monomial(),
            };
            assert_eq!(a.p(), b.p());
            assert_eq!(a.ptilde(), b.ptilde());
        }
    }
}
