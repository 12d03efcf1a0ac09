//! Benchmark fixtures shared by the criterion benches.

use shadowdrift::models::{build_grid_hamiltonian, gaussian_packet, GaussianPacket, GridModel};
use shadowdrift::{SplitHamiltonian, StateVector};

/// Quartic grid model with a packet well inside the box.
pub fn quartic_fixture(points: usize) -> (SplitHamiltonian, StateVector) {
    let model = GridModel::quartic(points, 6.0);
    let split = build_grid_hamiltonian(&model).expect("valid grid");
    let psi = gaussian_packet(
        &model,
        &GaussianPacket {
            center: vec![1.0, 1.0],
            width: 0.5,
            momentum: vec![],
        },
    )
    .expect("valid packet");
    (split, psi)
}
