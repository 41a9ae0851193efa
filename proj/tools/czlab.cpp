#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "czlab/error.hpp"
#include "czlab/suites.hpp"
#include "czlab/threads.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kCriterionFailure = 1;
constexpr int kInvalidConfig = 2;

int run(const std::string& suite, const std::string& config_path, const std::string& out_dir,
        const CLI::Option* seed_opt, long long seed, const CLI::Option* n_opt, long long n_points) {
    using czlab::json;
    json cfg;
    try {
        czlab::configure_threads();
        std::ifstream in(config_path, std::ios::binary);
        if (!in) throw czlab::ConfigError("cannot read config " + config_path);
        std::stringstream ss;
        ss << in.rdbuf();
        json user;
        try {
            user = json::parse(ss.str());
        } catch (const json::parse_error& e) {
            throw czlab::ConfigError(std::string("malformed JSON: ") + e.what());
        }
        if (!user.is_object()) throw czlab::ConfigError("config must be a JSON object");
        if (*seed_opt) user["seed"] = seed;
        if (*n_opt) user["grid"]["n_points"] = n_points;
        cfg = czlab::resolve_config(suite, user);
    } catch (const czlab::Error& e) {
        std::cerr << "czlab: invalid config: " << e.what() << "\n";
        return kInvalidConfig;
    }

    czlab::SuiteOutput result;
    try {
        result = czlab::run_suite(suite, cfg);
    } catch (const czlab::ConfigError& e) {
        std::cerr << "czlab: invalid config: " << e.what() << "\n";
        return kInvalidConfig;
    }
    czlab::write_artifacts(result, cfg, out_dir);
    for (const auto& c : result.criteria)
        std::cout << "criterion " << c.id << " (" << c.key << "): " << (c.pass ? "PASS" : "FAIL") << "\n";
    if (!result.pass()) {
        std::cerr << "czlab: failing criteria:";
        for (const auto& k : result.failing()) std::cerr << " " << k;
        std::cerr << "\n";
        return kCriterionFailure;
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"czlab experiment runner"};
    app.require_subcommand(1);
    auto* runc = app.add_subcommand("run", "run one experiment suite");
    std::string suite, config, out;
    long long seed = 0, n_points = 0;
    runc->add_option("--suite", suite, "suite name")->required()->check(CLI::IsMember(czlab::suite_names()));
    runc->add_option("--config", config, "JSON config")->required();
    runc->add_option("--out", out, "output directory")->required();
    auto* seed_opt = runc->add_option("--seed", seed, "override the config seed")->check(CLI::NonNegativeNumber);
    auto* n_opt = runc->add_option("--n-points", n_points, "override grid.n_points");
    auto* defaults = app.add_subcommand("defaults", "print the default config of a suite");
    std::string dsuite;
    defaults->add_option("suite", dsuite)->required()->check(CLI::IsMember(czlab::suite_names()));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInvalidConfig;
    }
    if (*defaults) {
        std::cout << czlab::default_config(dsuite).dump(2) << "\n";
        return kOk;
    }
    try {
        return run(suite, config, out, seed_opt, seed, n_opt, n_points);
    } catch (const std::exception& e) {
        std::cerr << "czlab: " << e.what() << "\n";
        return kCriterionFailure;
    }
}
