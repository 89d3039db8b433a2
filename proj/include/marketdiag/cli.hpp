#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "marketdiag/sampler.hpp"
#include "marketdiag/synth.hpp"

namespace marketdiag {

inline constexpr const char* kVersion = "0.1.0";

struct RunConfig {
    // Input panel; when both paths are empty the synth config is used instead.
    std::string prices_path;
    std::string sectors_path;
    SynthConfig synth;

    int tau = 120;
    int m_lo = 2, m_hi = 10;
    int n_lo = 2, n_hi = 9;
    int draws = 500;          // D, portfolio draws per grid cell
    int baseline_draws = 500; // K, random-partition allocations
    int cut_k = 4;            // cluster count for the flat cut
    std::uint64_t master_seed = 1;
    std::string out_dir = "out";
    bool zero_diagonal = false;
    bool debug_dump = false;
    int threads = 1;

    void validate() const;
};

/// Runs one subcommand; returns the list of emitted files (relative to
/// out_dir). Throws Error on failure; the binary maps kinds to exit codes.
std::vector<std::string> execute(const std::string& command, const RunConfig& config);

// Serialization helpers shared by the CLI and tests.
void write_grid_table_csv(const GridTable& table, const std::string& path);
GridTable read_grid_table_csv(const std::string& path);
void write_curves_csv(const PercentileCurves& curves, const std::string& path);
PercentileCurves read_curves_csv(const std::string& path, int m, int n);
std::uint64_t file_checksum(const std::string& path);

}  // namespace marketdiag
