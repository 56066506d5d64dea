#include <CLI11.hpp>

#include <iostream>

#include "alp/harness.hpp"

namespace {

struct Options {
    std::string config;
    std::string out;
    int threads = 0;
    bool verbose = false;
};

alp::ExperimentConfig load(const Options& o)
{
    alp::ExperimentConfig cfg = alp::load_config(o.config);
    if (!o.out.empty())
        cfg.output_dir = o.out;
    if (o.threads > 0)
        cfg.threads = o.threads;
    cfg.verbose = cfg.verbose || o.verbose;
    return cfg;
}

void print_table(const alp::MetricsReport& r)
{
    std::cout << alp::to_string(r.problem) << "\n  N_M   mean eps_L2   max eps_L2    eps_L2(T)     max eps_A\n";
    for (const auto& row : r.rows) {
        if (!row.ok) {
            std::cout << "  " << row.nm << "  error: " << row.error << "\n";
            continue;
        }
        std::printf("  %-4d  %-12.4g  %-12.4g  %-12.4g  %-12.4g\n", row.nm, row.mean_l2, row.max_l2, row.l2_tmax,
                    row.eps_a_max);
    }
    if (!r.frobenius_error.empty())
        std::cout << "  frobenius reference: error: " << r.frobenius_error << "\n";
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Approximated Lax Pairs reduced-order model experiments"};
    app.require_subcommand(1);
    Options opt;
    auto add = [&](const char* name, const char* help) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("config", opt.config, "experiment INI file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", opt.out, "output directory (overrides the config)");
        sub->add_option("--threads", opt.threads, "worker threads")->check(CLI::PositiveNumber);
        sub->add_flag("--verbose", opt.verbose, "progress on stderr");
        return sub;
    };
    auto* run = add("run", "run every N_M of an experiment and write tables and snapshots");
    auto* sweep = add("sweep", "repeat `run` for every chi of [scsa] chi_grid");
    auto* scsa = add("scsa", "static signal approximation sweeps");
    auto* frob = add("frobenius", "Frobenius-norm indicator against the reference mode count");
    CLI11_PARSE(app, argc, argv);

    try {
        const alp::ExperimentConfig cfg = load(opt);
        bool ok = true;
        if (run->parsed()) {
            const auto r = alp::run_experiment_to_disk(cfg);
            print_table(r);
            ok = r.all_ok();
        } else if (sweep->parsed()) {
            const auto reports = alp::run_chi_sweep_to_disk(cfg);
            for (std::size_t i = 0; i < reports.size(); ++i) {
                const auto& r = reports[i];
                std::cout << "chi = " << cfg.chi_grid[i] << "\n";
                print_table(r);
                ok = ok && r.all_ok();
            }
        } else if (scsa->parsed()) {
            const auto r = alp::run_scsa_to_disk(cfg);
            if (!r.ok)
                std::cout << "scsa error: " << r.error << "\n";
            else if (const auto* b = alp::best_for_modes(r.eigen, cfg.n_modes_cap))
                std::cout << "best eigen expansion at N=" << cfg.n_modes_cap << ": chi=" << b->chi
                          << " error=" << b->error << "\n";
            ok = r.ok;
        } else if (frob->parsed()) {
            for (const auto& r : alp::compare_frobenius_to_disk(cfg)) {
                if (r.ok)
                    std::cout << "  N_M=" << r.nm << " mean eps_M " << r.mean_eps_m << " max " << r.max_eps_m << "\n";
                else
                    std::cout << "  N_M=" << r.nm << " error: " << r.error << "\n";
                ok = ok && r.ok;
            }
        }
        std::cout << "outputs in " << cfg.output_dir << "\n";
        return ok ? 0 : 1;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 2;
    }
}
