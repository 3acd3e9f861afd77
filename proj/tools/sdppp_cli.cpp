// Command-line entry point: configures, seeds, runs and persists the
// experiment suite. Every output is a pure function of (config, seed).

#include <cstdlib>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sdppp/experiments.hpp"

int main(int argc, char** argv) {
    CLI::App app{"sdppp: Monte-Carlo and exact-analytics laboratory for randomly "
                 "shifted decorated Poisson point processes"};
    app.require_subcommand(1);

    sdppp::ExperimentConfig cfg;
    if (const char* env_out = std::getenv("SDPPP_OUT")) cfg.out_dir = env_out;

    std::string config_path;
    std::string grid_spec;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "key=value config file");
        sub->add_option("--seed", cfg.seed, "master seed");
        sub->add_option("--out", cfg.out_dir, "output directory");
        sub->add_option("--workers", cfg.workers, "worker threads");
        sub->add_flag("--quick", cfg.quick, "reduced sample counts for CI");
        sub->add_option("-n,--n-samples", cfg.n_samples, "Monte-Carlo sample count");
        sub->add_option("--grid", grid_spec, "comma-separated beta grid");
        sub->add_option("--beta", cfg.beta, "inverse temperature");
        sub->add_option("--beta-prime", cfg.beta_prime, "second inverse temperature");
        sub->add_option("--model", cfg.model_kind,
                        "PointMass | ParetoPoisson | PowerTailDelta | StretchedExpDelta");
        sub->add_option("--a", cfg.model_a, "ParetoPoisson tail exponent a");
        sub->add_option("--b", cfg.model_b, "ParetoPoisson / PowerTailDelta exponent b");
        sub->add_option("--gamma", cfg.model_gamma, "StretchedExpDelta exponent");
        sub->add_option("--n-atoms", cfg.n_atoms, "override adaptive atom count");
    };

    auto* validate = app.add_subcommand("validate-exact", "closed-form oracle suite");
    add_common(validate);
    auto* scan = app.add_subcommand("overlap-scan", "near-critical overlap scan");
    add_common(scan);
    scan->add_flag("--event-check", cfg.event_check,
                   "REM conditional-event diagnostic columns");
    auto* susc = app.add_subcommand("susceptibility", "temperature susceptibility estimators");
    add_common(susc);
    auto* asym = app.add_subcommand("asymptotics", "Laplace-method expansion suite");
    add_common(asym);
    auto* bbm = app.add_subcommand("bbm", "branching Brownian motion experiments");
    add_common(bbm);
    bbm->add_option("--t", cfg.bbm_t, "time horizon");
    bbm->add_option("--runs", cfg.bbm_runs, "number of forests");
    bbm->add_option("--max-population", cfg.bbm_max_population, "node cap per forest");
    bbm->add_option("--pairs", cfg.bbm_pairs, "Gibbs pairs per overlap histogram");
    auto* fluct = app.add_subcommand("fluctuations", "1-stable fluctuation check");
    add_common(fluct);

    CLI11_PARSE(app, argc, argv);

    try {
        CLI::App* sub = app.get_subcommands().front();
        if (!config_path.empty()) {
            // file values first, explicit flags override them
            sdppp::ExperimentConfig file_cfg = sdppp::ExperimentConfig::from_file(config_path);
            auto keep = [&](const std::string& flag) { return sub->count(flag) > 0; };
            if (keep("--seed")) file_cfg.seed = cfg.seed;
            if (keep("--out")) file_cfg.out_dir = cfg.out_dir;
            if (keep("--workers")) file_cfg.workers = cfg.workers;
            if (keep("--quick")) file_cfg.quick = cfg.quick;
            if (keep("--n-samples")) file_cfg.n_samples = cfg.n_samples;
            if (keep("--beta")) file_cfg.beta = cfg.beta;
            if (keep("--beta-prime")) file_cfg.beta_prime = cfg.beta_prime;
            if (keep("--model")) file_cfg.model_kind = cfg.model_kind;
            if (keep("--a")) file_cfg.model_a = cfg.model_a;
            if (keep("--b")) file_cfg.model_b = cfg.model_b;
            if (keep("--gamma")) file_cfg.model_gamma = cfg.model_gamma;
            if (keep("--n-atoms")) file_cfg.n_atoms = cfg.n_atoms;
            if (sub->get_name() == "bbm") {
                if (keep("--t")) file_cfg.bbm_t = cfg.bbm_t;
                if (keep("--runs")) file_cfg.bbm_runs = cfg.bbm_runs;
                if (keep("--max-population")) file_cfg.bbm_max_population = cfg.bbm_max_population;
                if (keep("--pairs")) file_cfg.bbm_pairs = cfg.bbm_pairs;
            }
            if (sub->get_name() == "overlap-scan" && keep("--event-check"))
                file_cfg.event_check = cfg.event_check;
            cfg = file_cfg;
        }
        cfg.experiment = sub->get_name();
        if (!grid_spec.empty()) {
            cfg.beta_grid.clear();
            std::size_t pos = 0;
            while (pos < grid_spec.size()) {
                auto comma = grid_spec.find(',', pos);
                if (comma == std::string::npos) comma = grid_spec.size();
                cfg.beta_grid.push_back(std::stod(grid_spec.substr(pos, comma - pos)));
                pos = comma + 1;
            }
        }
        return sdppp::run_experiment(cfg);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
