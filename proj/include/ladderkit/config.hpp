#pragma once

// JSON chain configuration, schema "ladderkit/1".
//
//   {
//     "schema": "ladderkit/1",
//     "family": "hypergeometric" | "example1" | "geometric" | "explicit",
//     "grid": {"a": 0, "b": 40},
//     "levels": 5,
//     "alpha": [a0, a1, a2] | {"alpha0": .., "alpha1": .., "alpha2": ..} | [a0, ..., aK] (geometric),
//     "params": { family specific },
//     "weight": {"seed": 1.0, "normalize": false},
//     "tolerances": {"condition": .., "identity": .., "boundary": .., "adjointness": ..,
//                    "eigen": .., "spectrum": .., "weight": ..},
//     "verification": {"trials": 50, "rng_seed": 42},
//     "output": {"format": "json" | "csv", "path": "report.json"},
//     "faults": [{"field": "b" | "c" | "f", "level": k, "n": n, "delta": d}]
//   }
//
// Sequences (c0, f0, z, w, v) are a number, {"poly": [c0, c1, ...]} in powers of n,
// {"table": {"start": n0, "values": [...]}} or {"exp": {"offset": o, "scale": s, "base": q}}
// meaning o + s q^n.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "ladderkit/chain_families.hpp"

namespace ladderkit {

struct ExplicitParams {
    SeqFn z, w, v;
};

struct Fault {
    char field = 'c';
    int level = 0;
    Index n = 0;
    double delta = 0.0;
};

enum class OutputFormat { json, csv };

struct ChainConfig {
    Family family = Family::hypergeometric;
    std::string preset;  // classical or geometric preset name, empty when raw
    Grid grid{0, 1};
    int depth = 0;
    std::variant<HypergeometricParams, Example1Params, GeometricParams, ExplicitParams> params;
    double weight_seed = 1.0;
    bool normalize_weight = false;
    Tolerances tolerances;
    int trials = 50;
    std::uint64_t rng_seed = 42;
    OutputFormat format = OutputFormat::json;
    std::optional<std::string> output_path;
    std::vector<Fault> faults;
};

// Throws InputError on any schema violation.
[[nodiscard]] ChainConfig parse_config(const nlohmann::json& doc);
[[nodiscard]] ChainConfig parse_config_text(const std::string& text);
[[nodiscard]] ChainConfig load_config(const std::string& path);

struct BuiltConfig {
    ChainSpec chain;
    FamilyDiagnostics diagnostics;
};

// Runs the family builder, then applies the configured faults.
[[nodiscard]] BuiltConfig build_chain(const ChainConfig& config);

[[nodiscard]] std::string to_string(OutputFormat format);

}  // namespace ladderkit
