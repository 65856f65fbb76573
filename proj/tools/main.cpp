#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "pidelab/experiments.hpp"

namespace {

pidelab::json load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw pidelab::ConfigError("cannot open config file: " + path);
    pidelab::json j;
    try {
        is >> j;
    } catch (const pidelab::json::exception& e) {
        throw pidelab::ConfigError(std::string("config parse error: ") + e.what());
    }
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pidelab: batch experiments for nonlocal operators on the periodic torus"};
    app.require_subcommand(1);

    std::string config_path;
    pidelab::RunOptions opt;
    std::string out_dir = ".";
    uint64_t seed = 0;
    bool seed_set = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("config", config_path, "experiment config (JSON)")->required();
        cmd->add_option("--seed", seed, "master seed override")->each([&](const std::string&) {
            seed_set = true;
        });
        cmd->add_option("--out-dir", out_dir, "output directory")
            ->envname("PIDELAB_OUT_DIR");
        cmd->add_option("--jobs", opt.jobs, "worker count (accepted; runs are serial)");
        cmd->add_option("--tol-scale", opt.tol_scale, "multiply configured tolerances");
    };

    CLI::App* run = app.add_subcommand("run", "execute an experiment config");
    add_common(run);
    CLI::App* validate = app.add_subcommand("validate", "check a config without running it");
    validate->add_option("config", config_path, "experiment config (JSON)")->required();
    CLI::App* list = app.add_subcommand("list-experiments", "print the experiment kinds");

    CLI11_PARSE(app, argc, argv);

    try {
        if (list->parsed()) {
            for (const auto& k : pidelab::list_experiments()) std::cout << k << "\n";
            return 0;
        }
        if (validate->parsed()) {
            pidelab::validate_config(load_config(config_path));
            std::cout << "config ok\n";
            return 0;
        }
        // run
        pidelab::json config = load_config(config_path);
        opt.out_dir = out_dir;
        if (seed_set) opt.seed = seed;
        int rc = pidelab::run_experiment(config, opt);
        std::cout << (rc == 0 ? "all assertions passed\n" : "assertion failures present\n");
        return rc;
    } catch (const pidelab::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
