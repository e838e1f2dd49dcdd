#include "fcbgp/fcbgp.h"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fcbgp/analysis.hpp"
#include "fcbgp/inspect.hpp"
#include "fcbgp/scenario.hpp"
#include "fcbgp/topology_gen.hpp"

struct fcbgp_trust {
    fcbgp::LoadedTrust loaded;
};

namespace {

thread_local std::string g_last_error;

char* dup(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out != nullptr) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

fcbgp_status fail(fcbgp_status st, std::string msg) {
    g_last_error = std::move(msg);
    return st;
}

fcbgp_status map_code(fcbgp::ErrorCode c) {
    using fcbgp::ErrorCode;
    switch (c) {
        case ErrorCode::kInvalidArgument: return FCBGP_E_INVALID_ARGUMENT;
        case ErrorCode::kParse: return FCBGP_E_PARSE;
        case ErrorCode::kIo: return FCBGP_E_IO;
        case ErrorCode::kMalformedMessage:
        case ErrorCode::kOverflow: return FCBGP_E_MALFORMED;
        case ErrorCode::kBudgetExhausted: return FCBGP_E_BUDGET;
        default: return FCBGP_E_DATA;
    }
}

// Runs fn, turning exceptions into status codes and the thread-local message.
template <typename Fn>
fcbgp_status guarded(Fn&& fn) {
    try {
        g_last_error.clear();
        return fn();
    } catch (const fcbgp::Error& e) {
        return fail(map_code(e.code()), e.what());
    } catch (const std::bad_alloc&) {
        return fail(FCBGP_E_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(FCBGP_E_INTERNAL, e.what());
    }
}

fcbgp::Bytes read_binary(const char* path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw fcbgp::Error(fcbgp::ErrorCode::kIo, std::string("cannot open ") + path);
    return fcbgp::Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::string read_text(const char* path) {
    std::ifstream in(path);
    if (!in) throw fcbgp::Error(fcbgp::ErrorCode::kIo, std::string("cannot open ") + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p);
    if (!out) throw fcbgp::Error(fcbgp::ErrorCode::kIo, "cannot write " + p.string());
    out << text;
    if (!out) throw fcbgp::Error(fcbgp::ErrorCode::kIo, "write failed for " + p.string());
}

}  // namespace

extern "C" {

const char* fcbgp_last_error(void) { return g_last_error.c_str(); }

const char* fcbgp_status_name(fcbgp_status status) {
    switch (status) {
        case FCBGP_OK: return "ok";
        case FCBGP_E_INVALID_ARGUMENT: return "invalid-argument";
        case FCBGP_E_PARSE: return "parse";
        case FCBGP_E_IO: return "io";
        case FCBGP_E_MALFORMED: return "malformed";
        case FCBGP_E_DATA: return "data";
        case FCBGP_E_BUDGET: return "budget-exhausted";
        case FCBGP_E_VIOLATION: return "violation";
        case FCBGP_E_INTERNAL: return "internal";
    }
    return "unknown";
}

void fcbgp_string_free(char* s) { std::free(s); }

fcbgp_status fcbgp_trust_load(const char* path, uint64_t seed, fcbgp_trust** out) {
    if (path == nullptr || out == nullptr) return fail(FCBGP_E_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    return guarded([&] {
        auto t = std::make_unique<fcbgp_trust>();
        t->loaded = fcbgp::load_trust_file(path, seed);
        *out = t.release();
        return FCBGP_OK;
    });
}

void fcbgp_trust_free(fcbgp_trust* trust) { delete trust; }

size_t fcbgp_trust_size(const fcbgp_trust* trust) {
    return trust == nullptr ? 0 : trust->loaded.trust.records().size();
}

fcbgp_status fcbgp_trust_owner(const fcbgp_trust* trust, const char* prefix, uint32_t* asn) {
    if (trust == nullptr || prefix == nullptr || asn == nullptr) {
        return fail(FCBGP_E_INVALID_ARGUMENT, "null argument");
    }
    return guarded([&] {
        auto owner = trust->loaded.trust.lookup_owner(fcbgp::Prefix::parse(prefix));
        if (!owner) return fail(FCBGP_E_DATA, std::string("no owner for ") + prefix);
        *asn = owner->value;
        return FCBGP_OK;
    });
}

int fcbgp_trust_is_deployed(const fcbgp_trust* trust, uint32_t asn) {
    return trust != nullptr && trust->loaded.trust.is_deployed(fcbgp::AsNumber(asn)) ? 1 : 0;
}

fcbgp_status fcbgp_inspect_file(const char* path, char** dump) {
    if (path == nullptr || dump == nullptr) return fail(FCBGP_E_INVALID_ARGUMENT, "null argument");
    *dump = nullptr;
    return guarded([&] {
        const auto bytes = read_binary(path);
        *dump = dup(fcbgp::inspect_fixture(bytes));
        return FCBGP_OK;
    });
}

fcbgp_status fcbgp_simulate_file(const char* path, uint64_t seed, long sync_period, fcbgp_sim_output* out) {
    if (path == nullptr || out == nullptr) return fail(FCBGP_E_INVALID_ARGUMENT, "null argument");
    *out = fcbgp_sim_output{};
    return guarded([&] {
        const auto sc = fcbgp::load_scenario_file(path);
        const auto res = fcbgp::run_scenario(sc, seed, sync_period > 0 ? std::optional<long>(sync_period) : std::nullopt);
        std::string summary;
        for (const auto& w : res.warnings) summary += "warning: " + w + "\n";
        for (const auto& l : res.summary) summary += l + "\n";
        for (const auto& v : res.violations) summary += "violation: " + v + "\n";
        out->trace = dup(res.trace.text());
        out->summary = dup(summary);
        out->digest = dup(fcbgp::to_hex(res.trace.digest()));
        out->violations = res.violations.size();
        if (!res.violations.empty()) {
            return fail(FCBGP_E_VIOLATION, std::to_string(res.violations.size()) + " expectation(s) failed");
        }
        return FCBGP_OK;
    });
}

void fcbgp_sim_output_free(fcbgp_sim_output* out) {
    if (out == nullptr) return;
    std::free(out->trace);
    std::free(out->summary);
    std::free(out->digest);
    *out = fcbgp_sim_output{};
}

fcbgp_status fcbgp_metrics_run(const fcbgp_metrics_config* cfg, char** report) {
    if (cfg == nullptr || report == nullptr || cfg->output_dir == nullptr) {
        return fail(FCBGP_E_INVALID_ARGUMENT, "null argument");
    }
    *report = nullptr;
    return guarded([&] {
        using namespace fcbgp;
        std::vector<double> rates(cfg->rates, cfg->rates + cfg->rate_count);
        std::vector<unsigned> hops(cfg->hops, cfg->hops + cfg->hop_count);
        if (rates.empty() || hops.empty()) return fail(FCBGP_E_INVALID_ARGUMENT, "rates and hops must be non-empty");
        for (double r : rates) {
            if (!(r >= 0.0 && r <= 1.0)) return fail(FCBGP_E_INVALID_ARGUMENT, "rate outside [0,1]: " + num(r));
        }
        for (unsigned l : hops) {
            if (l < 1) return fail(FCBGP_E_INVALID_ARGUMENT, "hop distance must be >= 1");
        }
        std::sort(rates.begin(), rates.end());

        AsTopology topo;
        if (cfg->as_rel_path != nullptr) {
            topo = load_topology(read_text(cfg->as_rel_path),
                                 cfg->prefix2as_path != nullptr ? read_text(cfg->prefix2as_path) : std::string());
        } else {
            if (cfg->synthetic_ases < 3) return fail(FCBGP_E_INVALID_ARGUMENT, "synthetic topology needs >= 3 ASes");
            topo = generate_scale_free(cfg->synthetic_ases, cfg->seed);
        }
        const auto paths = sample_monitored_paths(topo, cfg->origins == 0 ? 20 : cfg->origins, cfg->seed);
        if (paths.empty()) return fail(FCBGP_E_DATA, "topology yields no monitored paths");

        std::map<std::pair<std::size_t, unsigned>, std::pair<double, double>> cell;  // (rate idx, L) -> (fc, bgpsec)
        std::string hij = "rate,L,mode,hijack_rate\n";
        std::string brk = "rate";
        for (unsigned l : hops) brk += ",L" + std::to_string(l);
        brk += "\n";
        for (std::size_t i = 0; i < rates.size(); ++i) {
            const auto plan = deployment_plan(topo, rates[i]);
            brk += num(rates[i]);
            for (unsigned l : hops) {
                const double fc = hijacking_rate(paths, plan, l, HijackMode::kFcBgp);
                const double bs = hijacking_rate(paths, plan, l, HijackMode::kBgpsec);
                cell[{i, l}] = {fc, bs};
                hij += num(rates[i]) + "," + std::to_string(l) + ",fcbgp," + num(fc) + "\n";
                hij += num(rates[i]) + "," + std::to_string(l) + ",bgpsec," + num(bs) + "\n";
                brk += "," + num(fc);
            }
            brk += "\n";
        }
        const auto curve = average_filtering_curve(topo, paths, rates);
        std::string filt = "rate,mean_F\n";
        for (const auto& p : curve) filt += num(p.rate) + "," + num(p.mean_f) + "\n";

        const std::filesystem::path dir(cfg->output_dir);
        std::filesystem::create_directories(dir);
        write_file(dir / "hijacking_rate.csv", hij);
        write_file(dir / "breakdown_hijacking_rate.csv", brk);
        write_file(dir / "filtration_rate.csv", filt);

        std::vector<std::string> problems;
        constexpr double kEps = 1e-12;
        for (std::size_t i = 0; i < rates.size(); ++i) {
            for (unsigned l : hops) {
                const auto [fc, bs] = cell[{i, l}];
                if (fc > bs + kEps) problems.push_back("dominance fails at rate " + num(rates[i]) + " L=" + std::to_string(l));
                if (i > 0) {
                    const auto [pfc, pbs] = cell[{i - 1, l}];
                    if (fc > pfc + kEps || bs > pbs + kEps) {
                        problems.push_back("hijack rate increases at rate " + num(rates[i]) + " L=" + std::to_string(l));
                    }
                }
            }
            if (i > 0 && curve[i].mean_f + kEps < curve[i - 1].mean_f) {
                problems.push_back("mean F decreases at rate " + num(rates[i]));
            }
        }
        std::string rep = "ases=" + std::to_string(topo.as_count()) + "\nlinks=" + std::to_string(topo.link_count()) +
                          "\nmonitored_paths=" + std::to_string(paths.size()) + "\n";
        for (const auto& p : problems) rep += "violation: " + p + "\n";
        *report = dup(rep);
        if (!problems.empty()) return fail(FCBGP_E_VIOLATION, problems.front());
        return FCBGP_OK;
    });
}

fcbgp_status fcbgp_churn_file(const char* path, char** report) {
    if (path == nullptr || report == nullptr) return fail(FCBGP_E_INVALID_ARGUMENT, "null argument");
    *report = nullptr;
    return guarded([&] {
        const auto stats = fcbgp::update_churn_stats(fcbgp::parse_churn_records(read_text(path)));
        std::string out;
        out += "updates=" + std::to_string(stats.total) + "\n";
        out += "new_paths=" + std::to_string(stats.new_paths) + "\n";
        out += "path_changes=" + std::to_string(stats.path_changes) + "\n";
        out += "identical=" + std::to_string(stats.identical) + "\n";
        out += "new_path_fraction=" + num(stats.new_path_fraction()) + "\n";
        out += "path_change_fraction=" + num(stats.path_change_fraction()) + "\n";
        out += "unchanged_fc_fraction=" + num(stats.unchanged_fc_fraction()) + "\n";
        out += "changes_at_most_2=" + num(stats.changes_at_most(2)) + "\n";
        for (const auto& [k, n] : stats.changed_histogram) {
            out += "changed_fcs[" + std::to_string(k) + "]=" + std::to_string(n) + "\n";
        }
        *report = dup(out);
        return FCBGP_OK;
    });
}

}  // extern "C"
