/// @file sweep.hpp
/// End-to-end (alpha, beta) sweeps: mesh, solve, audit, one merged CSV.
#pragma once

#include <string>
#include <vector>

#include "sectorsym/audit.hpp"
#include "sectorsym/io.hpp"

namespace sectorsym {

/// Openings above this are outside the proven regime; such entries are reported but never gate the result.
inline constexpr double kExploratoryBeta = 2.0 * kPi / 3.0;

struct SweepEntry {
    SectorSpec spec;
    bool exploratory = false;
    SolveReport solve;
    AuditReport report;
};

struct SweepOutcome {
    std::vector<SweepEntry> entries;
    std::string csv;
    std::string summary;
    int checked_rows = 0;
    int failed_rows = 0;
    int exploratory_failed_rows = 0;
    bool pass = false;
};

/// Runs every (alpha, beta) pair of the grid with beta < alpha. Entries run in
/// parallel on `threads` workers; the output does not depend on the thread count.
SweepOutcome run_sweep(const RunConfig& config, int threads = 1);

/// SECTOR_SYMMETRY_THREADS when set and positive, otherwise the hardware concurrency.
int threads_from_env();

}  // namespace sectorsym
