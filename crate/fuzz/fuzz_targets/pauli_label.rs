#![no_main]

use ergolab_core::qcore::PauliString;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(p) = text.parse::<PauliString>() else { return };
    assert_eq!(p.num_qubits(), text.chars().count());
    let back: PauliString = p.label().parse().expect("label parses");
    assert_eq!(back, p);
    if p.num_qubits() <= 4 {
        let m = p.to_matrix();
        assert!(m.unitarity_defect() < 1e-12);
    }
});
