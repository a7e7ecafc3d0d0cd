#include "ladderkit/ladderkit.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "ladderkit/reports.hpp"
#include "ladderkit/spectral_oracle.hpp"

struct lk_chain {
    ladderkit::ChainConfig config;
    ladderkit::BuiltConfig built;
};

namespace {

thread_local std::string last_error;

char* duplicate(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

template <class Fn>
lk_status guarded(Fn&& fn) {
    last_error.clear();
    try {
        fn();
        return LK_OK;
    } catch (const ladderkit::InputError& e) {
        last_error = e.what();
        return LK_INPUT_ERROR;
    } catch (const ladderkit::CheckError& e) {
        last_error = e.what();
        return LK_CHECK_FAILED;
    } catch (const ladderkit::Error& e) {
        last_error = e.what();
        return LK_CHECK_FAILED;
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return LK_INTERNAL;
    } catch (const std::exception& e) {
        last_error = e.what();
        return LK_INTERNAL;
    } catch (...) {
        last_error = "unknown error";
        return LK_INTERNAL;
    }
}

lk_status missing(const char* what) {
    last_error = std::string(what) + " must not be NULL";
    return LK_INPUT_ERROR;
}

ladderkit::ReportOptions options(lk_format format) {
    ladderkit::ReportOptions o;
    if (format == LK_FORMAT_JSON) o.format = ladderkit::OutputFormat::json;
    if (format == LK_FORMAT_CSV) o.format = ladderkit::OutputFormat::csv;
    return o;
}

lk_status hand_out(const ladderkit::Report& rep, char** report, int* passed) {
    char* text = duplicate(rep.text);
    if (!text) {
        last_error = "out of memory";
        return LK_INTERNAL;
    }
    *report = text;
    if (passed) *passed = rep.pass ? 1 : 0;
    return LK_OK;
}

lk_status build(ladderkit::ChainConfig config, lk_chain** out) {
    auto built = ladderkit::build_chain(config);
    *out = new lk_chain{std::move(config), std::move(built)};
    return LK_OK;
}

}  // namespace

extern "C" {

const char* lk_version(void) { return LADDERKIT_VERSION; }

const char* lk_last_error(void) { return last_error.c_str(); }

lk_status lk_chain_from_config(const char* json_text, lk_chain** out) {
    if (!json_text) return missing("json_text");
    if (!out) return missing("out");
    *out = nullptr;
    return guarded([&] { build(ladderkit::parse_config_text(json_text), out); });
}

lk_status lk_chain_from_file(const char* path, lk_chain** out) {
    if (!path) return missing("path");
    if (!out) return missing("out");
    *out = nullptr;
    return guarded([&] { build(ladderkit::load_config(path), out); });
}

void lk_chain_free(lk_chain* chain) { delete chain; }

int lk_chain_depth(const lk_chain* chain) { return chain ? chain->built.chain.depth() : -1; }

const char* lk_chain_output_path(const lk_chain* chain) {
    if (!chain || !chain->config.output_path) return nullptr;
    return chain->config.output_path->c_str();
}

lk_format lk_chain_format(const lk_chain* chain) {
    if (chain && chain->config.format == ladderkit::OutputFormat::csv) return LK_FORMAT_CSV;
    return LK_FORMAT_JSON;
}

lk_status lk_verify(const lk_chain* chain, long long seed, lk_format format, char** report,
                    int* passed) {
    if (!chain) return missing("chain");
    if (!report) return missing("report");
    lk_status st = LK_OK;
    const lk_status g = guarded([&] {
        auto o = options(format);
        if (seed >= 0) o.seed = static_cast<std::uint64_t>(seed);
        st = hand_out(ladderkit::verify_report(chain->config, chain->built, o), report, passed);
    });
    return g != LK_OK ? g : st;
}

lk_status lk_spectrum(const lk_chain* chain, int level, lk_format format, char** report,
                      int* passed) {
    if (!chain) return missing("chain");
    if (!report) return missing("report");
    lk_status st = LK_OK;
    const lk_status g = guarded([&] {
        auto o = options(format);
        if (level >= 0) o.level = level;
        st = hand_out(ladderkit::spectrum_report(chain->config, chain->built, o), report, passed);
    });
    return g != LK_OK ? g : st;
}

lk_status lk_poly(const lk_chain* chain, int level, int degree, lk_format format, char** report,
                  char** gram, int* passed) {
    if (!chain) return missing("chain");
    if (!report) return missing("report");
    if (gram) *gram = nullptr;
    lk_status st = LK_OK;
    const lk_status g = guarded([&] {
        auto o = options(format);
        if (level >= 0) o.level = level;
        if (degree >= 0) o.degree = degree;
        const auto rep = ladderkit::poly_report(chain->config, chain->built, o);
        st = hand_out(rep, report, passed);
        if (st == LK_OK && gram && rep.sidecar) *gram = duplicate(*rep.sidecar);
    });
    return g != LK_OK ? g : st;
}

lk_status lk_weight(const lk_chain* chain, int level, lk_format format, char** report,
                    int* passed) {
    if (!chain) return missing("chain");
    if (!report) return missing("report");
    lk_status st = LK_OK;
    const lk_status g = guarded([&] {
        auto o = options(format);
        if (level >= 0) o.level = level;
        st = hand_out(ladderkit::weight_report(chain->config, chain->built, o), report, passed);
    });
    return g != LK_OK ? g : st;
}

char* lk_failure_report(const char* command, const char* error) {
    return duplicate(
        ladderkit::failure_report(command ? command : "", error ? error : "").dump(2) + "\n");
}

lk_status lk_tridiagonal_eigenvalues(const double* diag, const double* off, size_t n,
                                     double* values) {
    if (n == 0) {
        last_error = "matrix must have at least one row";
        return LK_INPUT_ERROR;
    }
    if (!diag) return missing("diag");
    if (n > 1 && !off) return missing("off");
    if (!values) return missing("values");
    return guarded([&] {
        ladderkit::TridiagonalMatrix m;
        m.diag.assign(diag, diag + n);
        if (n > 1) m.off.assign(off, off + n - 1);
        const auto e = ladderkit::eigensolve(m);
        std::copy(e.values.begin(), e.values.end(), values);
    });
}

void lk_string_free(char* s) { std::free(s); }

}  // extern "C"
