//! Shared inputs for the benchmarks.

use qbt_core::{Grid, PacketSpec, QField2D};

/// Single packet on an n×n grid over [−4, 4)², the usual analysis input.
pub fn packet_field(n: usize) -> QField2D {
    let grid = Grid::centered(n, 4.0).expect("valid grid");
    qbt_core::make_gaussian_packet(&PacketSpec::single_packet(), grid)
}
