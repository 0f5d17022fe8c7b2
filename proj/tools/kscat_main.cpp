// kscat command-line driver: configuration in, CSV/JSON artifacts out.
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "kscat/driver.hpp"
#include "kscat/errors.hpp"

int main(int argc, char** argv) {
    CLI::App app{"kscat - scattering workbench for the 3D Laplacian with a potential and a singular surface interaction"};

    std::string config_path;
    std::string mode_override;
    std::string out_override;
    long seed_override = -1;

    app.add_option("--config", config_path, "flat key=value configuration file");
    app.add_option("--mode", mode_override,
                   "abstract-check | smatrix | cross-section | oracle-compare | convergence");
    app.add_option("--out", out_override, "output directory (default: out)");
    app.add_option("--seed", seed_override, "random seed (overrides numerics.seed)");

    CLI11_PARSE(app, argc, argv);

    try {
        kscat::RunConfig cfg;
        if (!config_path.empty()) cfg = kscat::RunConfig::from_file(config_path);
        if (!mode_override.empty()) cfg.mode = kscat::parse_mode(mode_override);
        if (!out_override.empty()) cfg.out_dir = out_override;
        if (seed_override >= 0) cfg.seed = std::uint64_t(seed_override);

        const kscat::RunResult rr = kscat::run(cfg);
        std::cout << rr.message;
        if (rr.exit_code == 0)
            std::cout << "artifacts written to " << cfg.out_dir << "\n";
        return rr.exit_code;
    } catch (const kscat::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return 64;
    } catch (const kscat::Error& e) {
        std::cerr << "NumericalFailure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
