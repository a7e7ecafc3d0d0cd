#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>
#include <unistd.h>

#include "ladderkit/ladderkit.h"

namespace {

enum Exit { kPass = 0, kFailed = 1, kInput = 2 };

struct Options {
    std::string config;
    int level = -1;
    int degree = -1;
    std::string out;
    std::string format;
    long long seed = -1;
};

struct Text {
    char* p = nullptr;
    ~Text() { lk_string_free(p); }
};

using ChainPtr = std::unique_ptr<lk_chain, decltype(&lk_chain_free)>;

void setup_logging() {
    auto logger = spdlog::stderr_logger_st("ladderkit");
    logger->set_pattern("ladderkit: %l: %v");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);
    const char* env = std::getenv("LADDERKIT_LOG");
    if (!env) return;
    const std::string name = env;
    if (name == "error" || name == "warn" || name == "info" || name == "debug") {
        spdlog::set_level(spdlog::level::from_str(name));
    } else {
        spdlog::warn("ignoring LADDERKIT_LOG={} (expected error, warn, info or debug)", name);
    }
}

// Write to a sibling temp file, then rename over the target.
bool write_atomic(const std::string& path, const std::string& text) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            spdlog::error("cannot write {}", tmp.string());
            return false;
        }
        out << text;
        out.flush();
        if (!out) {
            spdlog::error("write to {} failed", tmp.string());
            std::error_code ec;
            fs::remove(tmp, ec);
            return false;
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        spdlog::error("cannot move report into place at {}: {}", path, ec.message());
        fs::remove(tmp, ec);
        return false;
    }
    spdlog::info("wrote {}", path);
    return true;
}

bool emit(const std::optional<std::string>& path, const std::string& text) {
    if (!path) {
        std::fwrite(text.data(), 1, text.size(), stdout);
        return std::fflush(stdout) == 0;
    }
    return write_atomic(*path, text);
}

lk_format format_of(const Options& o) {
    if (o.format == "json") return LK_FORMAT_JSON;
    if (o.format == "csv") return LK_FORMAT_CSV;
    return LK_FORMAT_CONFIG;
}

int run(const std::string& command, const Options& o) {
    spdlog::debug("{} --config {}", command, o.config);
    lk_chain* raw = nullptr;
    lk_status st = lk_chain_from_file(o.config.c_str(), &raw);
    ChainPtr chain(raw, &lk_chain_free);

    std::optional<std::string> out;
    if (!o.out.empty()) out = o.out;

    if (st != LK_OK) {
        spdlog::error("{}", lk_last_error());
        if (st == LK_INPUT_ERROR) return kInput;
        Text rep{lk_failure_report(command.c_str(), lk_last_error())};
        if (rep.p) emit(out, rep.p);
        return kFailed;
    }
    if (!out && lk_chain_output_path(chain.get())) out = lk_chain_output_path(chain.get());

    const lk_format fmt = format_of(o);
    Text report;
    Text gram;
    int passed = 0;
    if (command == "verify") {
        st = lk_verify(chain.get(), o.seed, fmt, &report.p, &passed);
    } else if (command == "spectrum") {
        st = lk_spectrum(chain.get(), o.level, fmt, &report.p, &passed);
    } else if (command == "poly") {
        st = lk_poly(chain.get(), o.level, o.degree, fmt, &report.p, &gram.p, &passed);
    } else {
        st = lk_weight(chain.get(), o.level, fmt, &report.p, &passed);
    }
    if (st != LK_OK) {
        spdlog::error("{}", lk_last_error());
        if (st == LK_INPUT_ERROR) return kInput;
        Text rep{lk_failure_report(command.c_str(), lk_last_error())};
        if (rep.p) emit(out, rep.p);
        return kFailed;
    }
    if (!emit(out, report.p)) return kFailed;
    if (gram.p) {
        if (out) {
            if (!write_atomic(*out + ".gram.json", gram.p)) return kFailed;
        } else {
            spdlog::warn("gram report not written: csv output to stdout has no sidecar path");
        }
    }
    if (!passed) spdlog::warn("{}: checks failed", command);
    return passed ? kPass : kFailed;
}

}  // namespace

int main(int argc, char** argv) {
    setup_logging();
    CLI::App app{"Factorization chains of second-order difference operators"};
    app.set_version_flag("--version", std::string(lk_version()));
    app.require_subcommand(1);

    Options o;
    std::string chosen;
    const std::pair<const char*, const char*> commands[] = {
        {"verify", "Check factorization, level links, adjointness and weights"},
        {"spectrum", "Compare ladder eigenvalues with the matrix oracle"},
        {"poly", "Tabulate hypergeometric polynomials and their Gram matrix"},
        {"weight", "Tabulate the weight of one level"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", o.config, "chain config (JSON)")->required();
        sub->add_option("--level", o.level, "chain level k")->check(CLI::NonNegativeNumber);
        sub->add_option("--degree", o.degree, "largest polynomial degree")
            ->check(CLI::NonNegativeNumber);
        sub->add_option("--out", o.out, "report path (default: config output.path or stdout)");
        sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--seed", o.seed, "rng seed for random trials")
            ->check(CLI::NonNegativeNumber);
        sub->callback([&chosen, n = std::string(name)] { chosen = n; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kPass : kInput;
    }
    try {
        return run(chosen, o);
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return kFailed;
    }
}
