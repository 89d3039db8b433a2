#include "marketdiag/cli.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <nlohmann/json.hpp>
#include <sstream>
#include <tuple>

#include "marketdiag/cluster.hpp"
#include "marketdiag/corr.hpp"
#include "marketdiag/errors.hpp"
#include "marketdiag/netdiag.hpp"
#include "marketdiag/spectral.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace marketdiag {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string sanitize(const std::string& name) {
    std::string out = name;
    for (char& c : out) {
        if (!std::isalnum(static_cast<unsigned char>(c))) c = '_';
    }
    return out;
}

std::ofstream open_out(const fs::path& path) {
    fs::create_directories(path.parent_path());
    std::ofstream f(path);
    if (!f) throw DataError("cannot write " + path.string());
    return f;
}

struct Emitter {
    fs::path out_dir;
    std::vector<std::string> files;

    std::ofstream open(const std::string& rel) {
        files.push_back(rel);
        return open_out(out_dir / rel);
    }
    void note(const std::string& rel) { files.push_back(rel); }
};

ReturnPanel load_input(const RunConfig& config, Emitter* emit) {
    if (config.prices_path.empty() != config.sectors_path.empty()) {
        throw ConfigError("provide both --prices and --sectors, or neither");
    }
    if (!config.prices_path.empty()) {
        CleanResult cleaned = load_price_panel(config.prices_path, config.sectors_path);
        if (emit && !cleaned.removals.empty()) {
            json report = json::array();
            for (const auto& r : cleaned.removals) {
                report.push_back({{"ticker", r.ticker}, {"reason", r.reason}});
            }
            emit->open("removals.json") << report.dump(2) << '\n';
        }
        return log_returns(cleaned.panel);
    }
    return log_returns(generate_factor_market(config.synth));
}

void check_tau(const RunConfig& config, const ReturnPanel& panel) {
    if (config.tau < 2 || config.tau > static_cast<int>(panel.n_obs())) {
        throw ConfigError("tau " + std::to_string(config.tau) + " out of range for T=" +
                          std::to_string(panel.n_obs()));
    }
}

void cmd_synth(const RunConfig& config, Emitter& emit) {
    const PricePanel panel = generate_factor_market(config.synth);
    write_prices_csv(panel, (emit.out_dir / "prices.csv").string());
    emit.note("prices.csv");
    write_sectors_csv(panel, (emit.out_dir / "sectors.csv").string());
    emit.note("sectors.csv");
}

void cmd_collectivity(const RunConfig& config, const ReturnPanel& panel, Emitter& emit) {
    check_tau(config, panel);
    const auto scopes = market_and_sector_scopes(panel);
    for (const auto& series : collectivity_series(panel, config.tau, scopes)) {
        auto f = emit.open("collectivity_" + sanitize(series.scope) + ".csv");
        f << "date,lambda1_norm,uniformity\n";
        for (std::size_t i = 0; i < series.dates.size(); ++i) {
            f << series.dates[i] << ',' << fmt(series.lambda1_norm[i]) << ','
              << fmt(series.uniformity[i]) << '\n';
        }
    }
    if (config.debug_dump) {
        correlation_series(panel, config.tau, panel.tickers, [&](int t, const CorrMatrix& m) {
            auto f = emit.open("debug_corr/" + std::to_string(t) + ".csv");
            f << "ticker";
            for (const auto& l : m.labels) f << ',' << l;
            f << '\n';
            for (Eigen::Index i = 0; i < m.size(); ++i) {
                f << m.labels[static_cast<std::size_t>(i)];
                for (Eigen::Index j = 0; j < m.size(); ++j) f << ',' << fmt(m.entries(i, j));
                f << '\n';
            }
        });
    }
}

void cmd_modularity(const RunConfig& config, const ReturnPanel& panel, Emitter& emit) {
    check_tau(config, panel);
    const Partition sectors = sector_partition(panel);
    const ModularitySeries series =
        modularity_series(panel, config.tau, sectors, config.zero_diagonal);
    {
        auto f = emit.open("modularity.csv");
        f << "date,Q\n";
        for (std::size_t i = 0; i < series.dates.size(); ++i) {
            f << series.dates[i] << ',' << fmt(series.q[i]) << '\n';
        }
    }
    if (config.baseline_draws > 0) {
        std::vector<int> sizes;
        for (const auto& g : sectors.groups) sizes.push_back(static_cast<int>(g.size()));
        const BaselineResult base =
            random_partition_baseline(panel, config.tau, sizes, config.baseline_draws,
                                      config.master_seed, config.zero_diagonal);
        auto f = emit.open("modularity_baseline.csv");
        f << "date,Q_random_mean,Q_random_p05,Q_random_p95\n";
        for (std::size_t i = 0; i < base.dates.size(); ++i) {
            f << base.dates[i] << ',' << fmt(base.q_mean[i]) << ',' << fmt(base.q_p05[i]) << ','
              << fmt(base.q_p95[i]) << '\n';
        }
    }
}

void emit_greedy(const GridTable& mu, const GridTable* sigma, Emitter& emit) {
    const auto path =
        greedy_path(mu, {mu.m_lo, mu.n_lo}, {mu.m_hi, mu.n_hi});
    json j;
    j["start"] = {mu.m_lo, mu.n_lo};
    j["end"] = {mu.m_hi, mu.n_hi};
    json steps = json::array();
    for (const auto& s : path) {
        json step{{"m", s.m}, {"n", s.n}, {"mu", s.mu}};
        if (sigma && sigma->contains(s.m, s.n) && !std::isnan(sigma->at(s.m, s.n))) {
            step["sigma"] = sigma->at(s.m, s.n);
        }
        steps.push_back(step);
    }
    j["path"] = steps;
    emit.open("greedy_path.json") << j.dump(2) << '\n';
}

void cmd_sample(const RunConfig& config, const ReturnPanel& panel, Emitter& emit) {
    check_tau(config, panel);
    SampleGridConfig sc;
    sc.tau = config.tau;
    sc.m_lo = config.m_lo;
    sc.m_hi = config.m_hi;
    sc.n_lo = config.n_lo;
    sc.n_hi = config.n_hi;
    sc.draws = config.draws;
    sc.master_seed = config.master_seed;
    sc.threads = config.threads;
    const SamplingResult result = sample_grid(panel, sc);

    write_grid_table_csv(result.summary.mu, (emit.out_dir / "mu_table.csv").string());
    emit.note("mu_table.csv");
    write_grid_table_csv(result.summary.sigma, (emit.out_dir / "sigma_table.csv").string());
    emit.note("sigma_table.csv");
    for (const auto& cell : result.cells) {
        const std::string rel =
            "curves/" + std::to_string(cell.m) + "_" + std::to_string(cell.n) + ".csv";
        fs::create_directories(emit.out_dir / "curves");
        write_curves_csv(cell, (emit.out_dir / rel).string());
        emit.note(rel);
    }
    if (!result.skipped.empty()) {
        json j = json::array();
        for (const auto& [m, n] : result.skipped) j.push_back({m, n});
        emit.open("skipped_cells.json") << j.dump(2) << '\n';
    }
    emit_greedy(result.summary.mu, &result.summary.sigma, emit);
}

void cmd_greedy(const RunConfig& config, Emitter& emit) {
    const fs::path mu_path = emit.out_dir / "mu_table.csv";
    if (!fs::exists(mu_path)) {
        throw DataError("greedy: " + mu_path.string() + " not found (run `sample` first)");
    }
    const GridTable mu = read_grid_table_csv(mu_path.string());
    GridTable sigma;
    const GridTable* sigma_ptr = nullptr;
    const fs::path sigma_path = emit.out_dir / "sigma_table.csv";
    if (fs::exists(sigma_path)) {
        sigma = read_grid_table_csv(sigma_path.string());
        sigma_ptr = &sigma;
    }
    (void)config;
    emit_greedy(mu, sigma_ptr, emit);
}

void cmd_cluster(const RunConfig& config, Emitter& emit) {
    const fs::path curves_dir = emit.out_dir / "curves";
    if (!fs::is_directory(curves_dir)) {
        throw DataError("cluster: " + curves_dir.string() + " not found (run `sample` first)");
    }
    std::vector<PercentileCurves> cells;
    for (const auto& entry : fs::directory_iterator(curves_dir)) {
        const std::string stem = entry.path().stem().string();
        const auto sep = stem.find('_');
        if (entry.path().extension() != ".csv" || sep == std::string::npos) continue;
        const int m = std::stoi(stem.substr(0, sep));
        const int n = std::stoi(stem.substr(sep + 1));
        cells.push_back(read_curves_csv(entry.path().string(), m, n));
    }
    if (cells.empty()) throw DataError("cluster: no curve files in " + curves_dir.string());
    std::sort(cells.begin(), cells.end(), [](const PercentileCurves& a, const PercentileCurves& b) {
        return std::tie(a.m, a.n) < std::tie(b.m, b.n);
    });

    const DistanceMatrix dm = distance_matrix(cells);
    {
        auto f = emit.open("distance_matrix.csv");
        f << "cell";
        for (const auto& [m, n] : dm.items) f << ',' << m << '_' << n;
        f << '\n';
        for (Eigen::Index i = 0; i < dm.entries.rows(); ++i) {
            f << dm.items[static_cast<std::size_t>(i)].first << '_'
              << dm.items[static_cast<std::size_t>(i)].second;
            for (Eigen::Index j = 0; j < dm.entries.cols(); ++j) f << ',' << fmt(dm.entries(i, j));
            f << '\n';
        }
    }

    const Dendrogram dend = average_linkage(dm);
    {
        json j;
        j["n_leaves"] = dend.n_leaves;
        json items = json::array();
        for (const auto& [m, n] : dm.items) items.push_back({m, n});
        j["items"] = items;
        json merges = json::array();
        for (const auto& m : dend.merges) merges.push_back({m.child_a, m.child_b, m.height});
        j["merges"] = merges;
        emit.open("dendrogram.json") << j.dump(2) << '\n';
    }
    {
        auto f = emit.open("dendrogram.csv");
        f << "child_a,child_b,height\n";
        for (const auto& m : dend.merges) {
            f << m.child_a << ',' << m.child_b << ',' << fmt(m.height) << '\n';
        }
    }

    const int k = std::min(config.cut_k, dend.n_leaves);
    const auto assignment = cut_clusters(dend, k);
    auto f = emit.open("clusters_k" + std::to_string(k) + ".csv");
    f << "m,n,cluster\n";
    for (std::size_t i = 0; i < dm.items.size(); ++i) {
        f << dm.items[i].first << ',' << dm.items[i].second << ',' << assignment[i] << '\n';
    }
}

void write_manifest(const std::string& command, const RunConfig& config, Emitter& emit) {
    json j;
    j["version"] = kVersion;
    j["command"] = command;
    json cfg;
    cfg["tau"] = config.tau;
    cfg["m_range"] = {config.m_lo, config.m_hi};
    cfg["n_range"] = {config.n_lo, config.n_hi};
    cfg["draws"] = config.draws;
    cfg["baseline_draws"] = config.baseline_draws;
    cfg["master_seed"] = config.master_seed;
    cfg["zero_diagonal"] = config.zero_diagonal;
    if (!config.prices_path.empty()) {
        cfg["prices"] = config.prices_path;
        cfg["sectors"] = config.sectors_path;
    } else {
        cfg["synth"] = {{"n_sectors", config.synth.n_sectors},
                        {"equities_per_sector", config.synth.sector_sizes()},
                        {"T", config.synth.n_obs},
                        {"beta_market", config.synth.beta_market},
                        {"beta_sector", config.synth.beta_sector},
                        {"sigma_idio", config.synth.sigma_idio},
                        {"seed", config.synth.seed}};
    }
    j["config"] = cfg;
    json checksums;
    std::vector<std::string> files = emit.files;
    std::sort(files.begin(), files.end());
    for (const auto& rel : files) {
        char buf[24];
        std::snprintf(buf, sizeof(buf), "%016llx",
                      static_cast<unsigned long long>(file_checksum((emit.out_dir / rel).string())));
        checksums[rel] = buf;
    }
    j["checksums"] = checksums;
    open_out(emit.out_dir / "manifest.json") << j.dump(2) << '\n';
    emit.note("manifest.json");
}

}  // namespace

void RunConfig::validate() const {
    if (tau < 2) throw ConfigError("tau must be >= 2");
    if (draws < 1) throw ConfigError("draws must be >= 1");
    if (m_lo > m_hi || n_lo > n_hi || m_lo < 1 || n_lo < 1) {
        throw ConfigError("grid ranges must be nonempty and positive");
    }
    if (threads < 1) throw ConfigError("threads must be >= 1");
    if (out_dir.empty()) throw ConfigError("output directory required");
}

std::vector<std::string> execute(const std::string& command, const RunConfig& config) {
    config.validate();
    Emitter emit{fs::path(config.out_dir), {}};
    fs::create_directories(emit.out_dir);

    if (command == "synth") {
        cmd_synth(config, emit);
    } else if (command == "collectivity") {
        const ReturnPanel panel = load_input(config, &emit);
        cmd_collectivity(config, panel, emit);
    } else if (command == "modularity") {
        const ReturnPanel panel = load_input(config, &emit);
        cmd_modularity(config, panel, emit);
    } else if (command == "sample") {
        const ReturnPanel panel = load_input(config, &emit);
        cmd_sample(config, panel, emit);
    } else if (command == "greedy") {
        cmd_greedy(config, emit);
    } else if (command == "cluster") {
        cmd_cluster(config, emit);
    } else if (command == "pipeline") {
        RunConfig staged = config;
        if (staged.prices_path.empty()) {
            cmd_synth(config, emit);
            staged.prices_path = (emit.out_dir / "prices.csv").string();
            staged.sectors_path = (emit.out_dir / "sectors.csv").string();
        }
        const ReturnPanel panel = load_input(staged, &emit);
        cmd_collectivity(staged, panel, emit);
        cmd_modularity(staged, panel, emit);
        cmd_sample(staged, panel, emit);
        cmd_cluster(staged, emit);
        write_manifest(command, config, emit);
        return emit.files;
    } else {
        throw ConfigError("unknown command '" + command + "'");
    }
    write_manifest(command, config, emit);
    return emit.files;
}

void write_grid_table_csv(const GridTable& table, const std::string& path) {
    auto f = open_out(path);
    f << "m/n";
    for (int n = table.n_lo; n <= table.n_hi; ++n) f << ',' << n;
    f << '\n';
    for (int m = table.m_lo; m <= table.m_hi; ++m) {
        f << m;
        for (int n = table.n_lo; n <= table.n_hi; ++n) {
            const double v = table.at(m, n);
            f << ',';
            if (!std::isnan(v)) f << fmt(v);
        }
        f << '\n';
    }
}

GridTable read_grid_table_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw DataError("cannot open " + path);
    std::string line;
    if (!std::getline(f, line)) throw DataError(path + ": empty");
    std::vector<std::vector<std::string>> rows;
    std::vector<int> cols;
    {
        std::stringstream ss(line);
        std::string field;
        bool first = true;
        while (std::getline(ss, field, ',')) {
            if (first) {
                first = false;
                continue;
            }
            cols.push_back(std::stoi(field));
        }
    }
    if (cols.empty()) throw DataError(path + ": no columns");
    std::vector<int> ms;
    std::vector<std::vector<double>> data;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        std::vector<double> row;
        bool first = true;
        while (std::getline(ss, field, ',')) {
            if (first) {
                ms.push_back(std::stoi(field));
                first = false;
                continue;
            }
            row.push_back(field.empty() ? std::numeric_limits<double>::quiet_NaN()
                                        : std::stod(field));
        }
        while (row.size() < cols.size()) row.push_back(std::numeric_limits<double>::quiet_NaN());
        data.push_back(std::move(row));
    }
    if (ms.empty()) throw DataError(path + ": no rows");
    GridTable table = GridTable::empty(ms.front(), ms.back(), cols.front(), cols.back());
    for (std::size_t r = 0; r < ms.size(); ++r) {
        for (std::size_t c = 0; c < cols.size(); ++c) {
            table.at(ms[r], cols[c]) = data[r][c];
        }
    }
    return table;
}

void write_curves_csv(const PercentileCurves& curves, const std::string& path) {
    auto f = open_out(path);
    f << "date,p05,p50,p95\n";
    for (std::size_t i = 0; i < curves.dates.size(); ++i) {
        f << curves.dates[i] << ',' << fmt(curves.p05[i]) << ',' << fmt(curves.p50[i]) << ','
          << fmt(curves.p95[i]) << '\n';
    }
}

PercentileCurves read_curves_csv(const std::string& path, int m, int n) {
    std::ifstream f(path);
    if (!f) throw DataError("cannot open " + path);
    PercentileCurves curves;
    curves.m = m;
    curves.n = n;
    std::string line;
    if (!std::getline(f, line)) throw DataError(path + ": empty");
    int t = 0;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string date, a, b, c;
        if (!std::getline(ss, date, ',') || !std::getline(ss, a, ',') ||
            !std::getline(ss, b, ',') || !std::getline(ss, c, ',')) {
            throw DataError(path + ": bad row '" + line + "'");
        }
        curves.dates.push_back(date);
        curves.t_values.push_back(t++);
        curves.p05.push_back(std::stod(a));
        curves.p50.push_back(std::stod(b));
        curves.p95.push_back(std::stod(c));
    }
    return curves;
}

std::uint64_t file_checksum(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open " + path);
    std::uint64_t h = 1469598103934665603ULL;  // FNV-1a 64
    char buf[4096];
    while (f.read(buf, sizeof(buf)) || f.gcount() > 0) {
        for (std::streamsize i = 0; i < f.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ULL;
        }
    }
    return h;
}

}  // namespace marketdiag
