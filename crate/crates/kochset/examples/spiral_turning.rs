//! Cumulative turning of descent paths: shrinking-angle schedules wind
//! forever (the angle series diverges), so some finite stage already turns
//! by a full revolution; geometric schedules never reach it.

use kochset::analysis::spiral_diagnostics;
use kochset::construction::AngleSchedule;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let target = std::f64::consts::TAU;

    let diag = spiral_diagnostics(&AngleSchedule::a_eps(0.01)?, target)?;
    println!(
        "shrinking eps=0.01: full turn reached at stage {:?}",
        diag.stage_reaching_target
    );
    println!(
        "finite-scale flatness floor from one stage of turning: {:?}",
        diag.delta1_bound
    );

    let never = spiral_diagnostics(&AngleSchedule::geometric(0.3, 0.5)?, target)?;
    println!(
        "geometric 0.3 x 0.5: full turn reached at stage {:?} (angle sum {:.4} < {target:.4})",
        never.stage_reaching_target,
        never.partial_sums.last().unwrap()
    );
    Ok(())
}
