#include <CLI11.hpp>
#include <iostream>

#include "marketdiag/cli.hpp"
#include "marketdiag/errors.hpp"

using namespace marketdiag;

namespace {

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Config:
            return 1;
        case ErrorKind::Data:
            return 2;
        case ErrorKind::Numeric:
            return 3;
    }
    return 1;
}

std::pair<int, int> parse_range(const std::string& s, const char* what) {
    const auto sep = s.find(':');
    if (sep == std::string::npos) throw ConfigError(std::string(what) + ": expected lo:hi");
    try {
        return {std::stoi(s.substr(0, sep)), std::stoi(s.substr(sep + 1))};
    } catch (const std::exception&) {
        throw ConfigError(std::string(what) + ": expected lo:hi, got '" + s + "'");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Collectivity diagnostics and portfolio diversification sampling "
                 "for equity correlation matrices"};
    app.set_config("--config");

    RunConfig config;
    std::string m_range = "2:10";
    std::string n_range = "2:9";

    app.add_option("--prices", config.prices_path, "prices.csv (date,TICK1,...)");
    app.add_option("--sectors", config.sectors_path, "sectors.csv (ticker,sector)");
    app.add_option("--tau", config.tau, "rolling window length in trading days")
        ->capture_default_str();
    app.add_option("--out", config.out_dir, "output directory")->capture_default_str();
    app.add_option("--seed", config.master_seed, "master seed for all randomness")
        ->capture_default_str();
    app.add_option("--threads", config.threads, "worker threads")->capture_default_str();
    app.add_flag("--zero-diagonal", config.zero_diagonal,
                 "drop self-loops from the modularity graph");
    app.add_flag("--debug-dump", config.debug_dump, "dump per-window correlation matrices");

    app.add_option("--draws", config.draws, "portfolio draws per grid cell (D)")
        ->capture_default_str();
    app.add_option("--m-range", m_range, "sector-count range lo:hi")->capture_default_str();
    app.add_option("--n-range", n_range, "equities-per-sector range lo:hi")
        ->capture_default_str();
    app.add_option("--baseline-draws", config.baseline_draws,
                   "random-partition allocations (K); 0 disables the baseline")
        ->capture_default_str();
    app.add_option("--cut-k", config.cut_k, "cluster count for the flat dendrogram cut")
        ->capture_default_str();

    app.add_option("--synth-sectors", config.synth.n_sectors, "synthetic market: sector count")
        ->capture_default_str();
    app.add_option("--synth-equities", config.synth.equities_uniform,
                   "synthetic market: equities per sector")
        ->capture_default_str();
    app.add_option("--synth-T", config.synth.n_obs, "synthetic market: return observations")
        ->capture_default_str();
    app.add_option("--beta-market", config.synth.beta_market, "synthetic market factor loading")
        ->capture_default_str();
    app.add_option("--beta-sector", config.synth.beta_sector, "synthetic sector factor loading")
        ->capture_default_str();
    app.add_option("--sigma-idio", config.synth.sigma_idio, "synthetic idiosyncratic volatility")
        ->capture_default_str();

    app.require_subcommand(1);
    for (const char* name : {"synth", "collectivity", "modularity", "sample", "greedy",
                             "cluster", "pipeline"}) {
        app.add_subcommand(name)->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        const auto [m_lo, m_hi] = parse_range(m_range, "--m-range");
        const auto [n_lo, n_hi] = parse_range(n_range, "--n-range");
        config.m_lo = m_lo;
        config.m_hi = m_hi;
        config.n_lo = n_lo;
        config.n_hi = n_hi;
        config.synth.seed = config.master_seed;

        const std::string command = app.get_subcommands().front()->get_name();
        const auto files = execute(command, config);
        for (const auto& f : files) std::cout << f << '\n';
        return 0;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
