//! The trivial-group spec of a modular category on the basis 1_{X⊠X̄}.

use num_complex::Complex64;

use super::idempotents::{IdempotentBasis, Provenance};
use super::spec::GradedAlgebraSpec;
use crate::error::Result;
use crate::group::FiniteGroup;
use crate::modular::ModularData;
use crate::ring::join_labels;

/// 1_X ∗ 1_Y = (1/dim) Σ_Z N^Z_{XY} (d_X d_Y / d_Z) 1_Z and 1_X ∘ 1_Y = δ_{X,Y} 1_X.
pub fn modular_spec(md: &ModularData) -> Result<GradedAlgebraSpec> {
    let r = md.rank();
    let labels = md.labels();
    let basis = (0..r)
        .map(|x| join_labels(&[&labels[x], &labels[md.dual(x)]]))
        .collect();
    let mut spec = GradedAlgebraSpec::new(FiniteGroup::trivial(), vec![basis])?;
    let d = md.dims();
    let ring = md.ring();
    for x in 0..r {
        for y in 0..r {
            for z in 0..r {
                let n = ring.n(x, y, z);
                if n != 0 {
                    spec.set_conv(0, x, y, z, d[x] * d[y] / d[z] * (n as f64 / md.global_dim()));
                }
            }
        }
        spec.set_comp(0, 0, x, x, x, Complex64::new(1.0, 0.0));
    }
    Ok(spec)
}

/// e_V = Σ_X (d_V / d_X) S_{X,V} 1_X, in label order.
pub fn modular_idempotents(md: &ModularData) -> IdempotentBasis {
    let r = md.rank();
    let d = md.dims();
    let s = md.s();
    let sector = (0..r)
        .map(|v| (0..r).map(|x| d[v] / d[x] * s[(x, v)]).collect())
        .collect();
    IdempotentBasis {
        sectors: vec![sector],
        provenance: Provenance::ClosedForm,
    }
}
