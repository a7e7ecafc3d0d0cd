#pragma once

// Reports behind the four commands. Each report is a JSON document plus its
// rendering in the configured output format.

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "ladderkit/config.hpp"

namespace ladderkit {

struct ReportOptions {
    std::optional<int> level;
    std::optional<int> degree;
    std::optional<std::uint64_t> seed;  // overrides verification.rng_seed
    std::optional<OutputFormat> format;
};

struct Report {
    nlohmann::json doc;
    std::string text;                    // doc rendered as JSON or CSV
    std::optional<std::string> sidecar;  // poly in CSV mode: the Gram report as JSON
    bool pass = false;
};

// Factorization and dual identities, level links, adjointness, boundary,
// Pearson residuals and descended weights for every level.
[[nodiscard]] Report verify_report(const ChainConfig& config, const BuiltConfig& built,
                                   const ReportOptions& options = {});

// Ladder eigenvalues at level k (default K) against the matrix oracle.
[[nodiscard]] Report spectrum_report(const ChainConfig& config, const BuiltConfig& built,
                                     const ReportOptions& options = {});

// Polynomial table, Gram matrix and sigma/tau/lambda per degree at level k
// (default 0) up to lmax (default min(6, b-a)). Hypergeometric chains only.
[[nodiscard]] Report poly_report(const ChainConfig& config, const BuiltConfig& built,
                                 const ReportOptions& options = {});

// rho_k table (default k = 0) with Pearson, boundary and descend checks.
[[nodiscard]] Report weight_report(const ChainConfig& config, const BuiltConfig& built,
                                   const ReportOptions& options = {});

// Report for a chain that could not be built because a check failed.
[[nodiscard]] nlohmann::json failure_report(const std::string& command, const std::string& error);

// max_n |d(n)/d(a) / (rho(n)/rho(a)) - 1| on [a, b+1], d = descend_weight(rho_k).
[[nodiscard]] double descend_deviation(const ChainSpec& chain, int k);

}  // namespace ladderkit
