#ifndef KSCAT_DRIVER_HPP
#define KSCAT_DRIVER_HPP

#include <string>

#include "kscat/config.hpp"

namespace kscat {

/// Discrete defects of the layer-potential jump relations, measured at the
/// triangle centroids by two-point Richardson extrapolation along the normal.
/// Jump orientation is in - ex with nu exterior: [gamma1]SL = +1, [gamma0]DL = -1.
struct JumpReport {
    double sl_gamma1;  // [gamma1] SL vs +1
    double dl_gamma0;  // [gamma0] DL vs -1
    double slv_gamma1; // dressed versions
    double dlv_gamma0;
    double dlv_gamma1; // vs 0, relative to the density norm
};

JumpReport jump_report(const SurfaceMesh& mesh, const VolumeGrid& grid,
                       const SpectralParam& z, double cond_limit = default_cond_limit);

struct RunResult {
    int exit_code = 0;
    std::string summary_json; // exact bytes written to summary.json
    std::string message;      // human-readable outcome (stdout)
};

/// Executes one run.  Writes summary.json plus mode-specific CSV artifacts
/// into config.out_dir; returns nonzero exit_code on numerical failure at the
/// requested spectral point.  Outputs are deterministic for a fixed (config,
/// seed); wall-clock timing goes to timing.txt, never into summary.json.
RunResult run(const RunConfig& config);

/// Convergence orders over config.levels (requires >= 3 levels).
RunResult convergence_study(const RunConfig& config);

} // namespace kscat

#endif
