#include "kscat/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "kscat/errors.hpp"

namespace kscat {

namespace {

double to_double(const std::string& field, const std::string& s) {
    try {
        size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(field, "not a number: '" + s + "'");
    }
}

long to_long(const std::string& field, const std::string& s) {
    try {
        size_t pos = 0;
        const long v = std::stol(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(field, "not an integer: '" + s + "'");
    }
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, ',')) out.push_back(cur);
    return out;
}

Vec3 to_vec3(const std::string& field, const std::string& s) {
    const auto parts = split_csv(s);
    if (parts.size() != 3) throw ConfigError(field, "expected three comma-separated values");
    return Vec3(to_double(field, parts[0]), to_double(field, parts[1]),
                to_double(field, parts[2]));
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

} // namespace

RunMode parse_mode(const std::string& name) {
    if (name == "abstract-check") return RunMode::abstract_check;
    if (name == "smatrix") return RunMode::smatrix;
    if (name == "cross-section") return RunMode::cross_section;
    if (name == "oracle-compare") return RunMode::oracle_compare;
    if (name == "convergence") return RunMode::convergence;
    throw ConfigError("mode", "unknown mode '" + name + "'");
}

std::string mode_name(RunMode m) {
    switch (m) {
        case RunMode::abstract_check: return "abstract-check";
        case RunMode::smatrix: return "smatrix";
        case RunMode::cross_section: return "cross-section";
        case RunMode::oracle_compare: return "oracle-compare";
        case RunMode::convergence: return "convergence";
    }
    return "?";
}

int RunConfig::effective_ell_max() const {
    if (ell_max >= 0) return ell_max;
    const double k = std::sqrt(-lambda);
    const double a = (shape == "sphere") ? radius : semi_axes.maxCoeff();
    return int(std::ceil(2.0 * k * a)) + 4;
}

std::map<std::string, std::string> RunConfig::read_kv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open '" + path + "'");
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config", "line " + std::to_string(lineno) + ": expected key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("config", "line " + std::to_string(lineno) + ": empty key");
        kv[key] = val;
    }
    return kv;
}

RunConfig RunConfig::from_file(const std::string& path) { return parse(read_kv_file(path)); }

RunConfig RunConfig::parse(const std::map<std::string, std::string>& kv) {
    RunConfig c;
    c.potential.depth = 1.0; // default gaussian depth when kind=gaussian
    std::string potential_kind = "none";
    std::string potential_file;
    std::string model_kind = "none";
    double alpha = 1.0, theta = 1.0;
    bool support_radius_given = false;

    for (const auto& [key, val] : kv) {
        if (key == "mode") c.mode = parse_mode(val);
        else if (key == "geometry.shape") c.shape = val;
        else if (key == "geometry.radius") c.radius = to_double(key, val);
        else if (key == "geometry.semi_axes") c.semi_axes = to_vec3(key, val);
        else if (key == "geometry.level") c.level = int(to_long(key, val));
        else if (key == "potential.kind") potential_kind = val;
        else if (key == "potential.depth") c.potential.depth = to_double(key, val);
        else if (key == "potential.sigma") c.potential.sigma = to_double(key, val);
        else if (key == "potential.support_radius") {
            c.potential.support_radius = to_double(key, val);
            support_radius_given = true;
        }
        else if (key == "potential.center") c.potential.center = to_vec3(key, val);
        else if (key == "potential.file") potential_file = val;
        else if (key == "model.kind") model_kind = val;
        else if (key == "model.alpha") alpha = to_double(key, val);
        else if (key == "model.theta") theta = to_double(key, val);
        else if (key == "energy.lambda") c.lambda = to_double(key, val);
        else if (key == "directions.n_polar") c.n_polar = int(to_long(key, val));
        else if (key == "numerics.h_vol") c.h_vol = to_double(key, val);
        else if (key == "numerics.cond_limit") c.cond_limit = to_double(key, val);
        else if (key == "numerics.seed") c.seed = std::uint64_t(to_long(key, val));
        else if (key == "numerics.cell_cap") c.cell_cap = int(to_long(key, val));
        else if (key == "abstract.n_systems") c.n_systems = int(to_long(key, val));
        else if (key == "abstract.n_max") c.n_max = int(to_long(key, val));
        else if (key == "oracle.ell_max") c.ell_max = int(to_long(key, val));
        else if (key == "convergence.levels") {
            c.levels.clear();
            for (const auto& p : split_csv(val)) c.levels.push_back(int(to_long(key, trim(p))));
        }
        else if (key == "output.dir") c.out_dir = val;
        else throw ConfigError(key, "unknown configuration key");
    }

    // validation
    if (c.shape != "sphere" && c.shape != "ellipsoid")
        throw ConfigError("geometry.shape", "expected 'sphere' or 'ellipsoid'");
    if (c.radius <= 0.0) throw ConfigError("geometry.radius", "must be positive");
    if (c.level < 0 || c.level > max_subdivision_level)
        throw ConfigError("geometry.level", "must be in [0, 7]");
    if (!(c.lambda < 0.0)) throw ConfigError("energy.lambda", "must be negative");
    if (c.n_polar < 2) throw ConfigError("directions.n_polar", "must be >= 2");
    if (c.h_vol <= 0.0) throw ConfigError("numerics.h_vol", "must be positive");
    if (c.n_systems < 1) throw ConfigError("abstract.n_systems", "must be >= 1");
    if (c.n_max < 2) throw ConfigError("abstract.n_max", "must be >= 2");

    if (potential_kind == "none") {
        c.potential = PotentialSpec::none_potential();
    } else if (potential_kind == "gaussian") {
        if (!support_radius_given) c.potential.support_radius = 3.0 * c.potential.sigma;
        c.potential = PotentialSpec::gaussian(c.potential.depth, c.potential.sigma,
                                              c.potential.support_radius, c.potential.center);
    } else if (potential_kind == "table") {
        if (potential_file.empty()) throw ConfigError("potential.file", "required for kind=table");
        if (!support_radius_given)
            throw ConfigError("potential.support_radius", "required for kind=table");
        c.potential = PotentialSpec::from_table_file(potential_file, c.potential.support_radius,
                                                     c.potential.center);
    } else {
        throw ConfigError("potential.kind", "expected none|gaussian|table");
    }

    if (model_kind == "none") c.model = InterfaceModel::none();
    else if (model_kind == "delta") c.model = InterfaceModel::delta(alpha);
    else if (model_kind == "delta-prime") c.model = InterfaceModel::delta_prime(theta);
    else if (model_kind == "dirichlet") c.model = InterfaceModel::dirichlet();
    else if (model_kind == "neumann") c.model = InterfaceModel::neumann();
    else throw ConfigError("model.kind", "expected none|delta|delta-prime|dirichlet|neumann");

    std::set<int> seen;
    for (int l : c.levels) {
        if (l < 0 || l > max_subdivision_level)
            throw ConfigError("convergence.levels", "level outside [0, 7]");
        if (!seen.insert(l).second)
            throw ConfigError("convergence.levels", "identical level supplied twice");
    }

    return c;
}

} // namespace kscat
