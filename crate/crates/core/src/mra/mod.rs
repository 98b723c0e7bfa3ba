//! Periodic multiresolution transforms, wavelet packets and scale truncation.

mod dwt;
mod dwt2;
mod packets;
mod truncate;

pub use dwt::{analysis_step, dwt_1d, idwt_1d, idwt_flat_full, synthesis_step, MraCoefficients};
pub use dwt2::{dwt_2d, idwt_2d, DetailTriple, Mra2dCoefficients};
pub use packets::{packet_best_basis, quadtree_best_entropy, shannon_cost, NodeId, PacketTree};
pub use truncate::{fock_norm, scale_truncate, scale_truncate_2d, ScaleSelection};

pub(crate) use dwt::log2_exact;

use std::fmt::Write;

/// CSV dump with columns `level,band,index,value`; the coarse block has level `-1`.
pub fn coefficients_csv(c: &MraCoefficients) -> String {
    let mut s = String::from("level,band,index,value\n");
    for (i, v) in c.coarse.iter().enumerate() {
        let _ = writeln!(s, "-1,coarse,{i},{v:.17e}");
    }
    for (j, d) in c.details.iter().enumerate() {
        for (i, v) in d.iter().enumerate() {
            let _ = writeln!(s, "{j},detail,{i},{v:.17e}");
        }
    }
    s
}

/// CSV dump with columns `level,band,row,col,value` for 2-D coefficients.
pub fn coefficients_2d_csv(c: &Mra2dCoefficients) -> String {
    let mut s = String::from("level,band,row,col,value\n");
    for ((r, col), v) in c.coarse.indexed_iter() {
        let _ = writeln!(s, "-1,coarse,{r},{col},{v:.17e}");
    }
    for (j, d) in c.details.iter().enumerate() {
        for (tag, b) in [("low_high", &d.low_high), ("high_low", &d.high_low), ("high_high", &d.high_high)] {
            for ((r, col), v) in b.indexed_iter() {
                let _ = writeln!(s, "{j},{tag},{r},{col},{v:.17e}");
            }
        }
    }
    s
}
