//! One report covering every checked identity.

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::audit::{AuditEntry, AuditReport};
use crate::code::{duality_audit, verify_gray_generator, ComponentSpec, RCode};
use crate::cyclic::{lemma_audit, LEMMA_LENGTHS};
use crate::error::Result;
use crate::families::family_length_audit;
use crate::residue::RingParams;
use crate::tower::{subset_algebra, verify_block_idempotents, verify_factor_sizes, KappaSystem};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Random non-idempotents tried per length for the τ converse.
    pub lemma_random: usize,
    /// Random pairs for the duality check when it is not exhaustive.
    pub duality_samples: u64,
    /// `(k, u)` for the length formulas.
    pub length_k: usize,
    pub length_u: Option<usize>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seed: 0,
            lemma_random: 10,
            duality_samples: 64,
            length_k: 2,
            length_u: Some(1),
        }
    }
}

/// Every block populated with the all-ones row of length `n`.
pub fn default_spec(params: RingParams, n: usize) -> ComponentSpec {
    let mut spec = ComponentSpec::empty(params, n);
    for l in 1..=3u8 {
        for subset in 0..params.subsets() {
            spec = spec.with_block(l, subset, vec![vec![1; n]]);
        }
    }
    spec
}

/// Runs all audits at `params` against `spec` (or [`default_spec`] with
/// `n = 1`).
pub fn verify_all(
    params: RingParams,
    spec: Option<&ComponentSpec>,
    opts: &VerifyOptions,
) -> Result<AuditReport> {
    let kappa = KappaSystem::new(params)?;
    let mut report = AuditReport::default();
    report.extend(kappa.verify_pierce());
    report.extend(subset_algebra(params).verify_eta_system());
    report.extend(verify_factor_sizes(&kappa));
    report.extend(verify_block_idempotents(&kappa)?);
    report.extend(lemma_audit(
        params,
        &LEMMA_LENGTHS,
        opts.lemma_random,
        opts.seed,
    )?);

    let owned;
    let spec = match spec {
        Some(s) => s,
        None => {
            owned = default_spec(params, 1);
            &owned
        }
    };
    let code = RCode::build(spec)?;
    report.extend(duality_audit(&code, opts.duality_samples, opts.seed)?);
    let card = code.cardinality_report();
    report.push(AuditEntry::new(
        "code.cardinality",
        "code size as the product of the component sizes",
        card.status,
        json!({
            "measured": card.measured.to_string(),
            "paper_product": card.paper_product.to_string(),
            "nonzero_product": card.nonzero_product.to_string(),
            "populated_zero_blocks": card.populated_zero_blocks,
        }),
    ));
    report.extend(verify_gray_generator(&code));
    report.extend(code.r_closure_audit());
    report.extend(family_length_audit(params, opts.length_k, opts.length_u)?.to_report());
    Ok(report)
}
