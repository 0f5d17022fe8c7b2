#ifndef KSCAT_CONFIG_HPP
#define KSCAT_CONFIG_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "kscat/interface_models.hpp"
#include "kscat/potential_ops.hpp"
#include "kscat/types.hpp"

namespace kscat {

enum class RunMode { abstract_check, smatrix, cross_section, oracle_compare, convergence };

/// Flat key=value configuration with dotted section names.  Every field has a
/// documented default (see the schema table in the README).
struct RunConfig {
    RunMode mode = RunMode::abstract_check;

    // geometry
    std::string shape = "sphere"; // sphere | ellipsoid
    double radius = 1.0;
    Vec3 semi_axes = Vec3(1.0, 1.2, 0.8);
    int level = 3;

    // potential
    PotentialSpec potential; // none by default

    // interface model
    InterfaceModel model; // none by default

    // energy
    double lambda = -1.0;

    // directions
    int n_polar = 8;

    // numerics
    double h_vol = 0.15;
    double cond_limit = 1e12;
    std::uint64_t seed = 0;
    int cell_cap = 6000;

    // abstract-check
    int n_systems = 100;
    int n_max = 12;

    // oracle / phase shifts; <0 means the default ceil(2 k a) + 4
    int ell_max = -1;

    // convergence
    std::vector<int> levels = {1, 2, 3};

    // output
    std::string out_dir = "out";

    int effective_ell_max() const;

    static RunConfig parse(const std::map<std::string, std::string>& kv);
    static RunConfig from_file(const std::string& path);
    /// key=value lines; '#' comments and blank lines allowed.
    static std::map<std::string, std::string> read_kv_file(const std::string& path);
};

RunMode parse_mode(const std::string& name);
std::string mode_name(RunMode m);

} // namespace kscat

#endif
