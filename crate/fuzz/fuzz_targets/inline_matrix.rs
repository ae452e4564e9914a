#![no_main]

use ergolab::config::{inline_matrix, InlineMatrix};
use ergolab_core::ergodyn::MeasurementSetting;
use ergolab_core::qcore::{DensityMatrix, HamiltonianSpec};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(rows) = serde_json::from_slice::<InlineMatrix>(data) else { return };
    if rows.len() > 16 {
        return;
    }
    let Ok(m) = inline_matrix(&rows) else { return };
    assert_eq!(m.rows(), rows.len());
    if let Ok(rho) = DensityMatrix::new(m.clone()) {
        assert!((rho.matrix().trace().re - 1.0).abs() < 1e-6);
    }
    let _ = HamiltonianSpec::from_matrix(m.clone());
    let _ = MeasurementSetting::from_projectors(vec![m]);
});
