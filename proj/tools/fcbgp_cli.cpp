#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fcbgp/fcbgp.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitViolation = 3;

int exit_code(fcbgp_status st) {
    switch (st) {
        case FCBGP_OK: return kExitOk;
        case FCBGP_E_INVALID_ARGUMENT: return kExitUsage;
        case FCBGP_E_VIOLATION:
        case FCBGP_E_BUDGET: return kExitViolation;
        default: return kExitData;
    }
}

int report_failure(fcbgp_status st) {
    std::cerr << "error (" << fcbgp_status_name(st) << "): " << fcbgp_last_error() << "\n";
    return exit_code(st);
}

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// key=value lines, '#' comments. Values here win over command-line flags.
std::map<std::string, std::string> read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config " + path);
    std::map<std::string, std::string> out;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw UsageError(path + ":" + std::to_string(number) + ": expected key=value");
        auto strip = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        out[strip(line.substr(0, eq))] = strip(line.substr(eq + 1));
    }
    return out;
}

std::uint64_t parse_seed(const std::string& text) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(text, &used, 10);
    } catch (const std::exception&) {
        used = 0;
    }
    if (text.empty() || used != text.size() || text[0] == '-') throw UsageError("seed must be a non-negative integer: " + text);
    return v;
}

template <typename T, typename Parse>
std::vector<T> parse_list(const std::string& text, Parse parse) {
    std::vector<T> out;
    std::string item;
    std::istringstream ss(text);
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(parse(item));
    }
    return out;
}

double parse_double(const std::string& s) {
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != s.size() || s.empty()) throw UsageError("not a number: " + s);
    return v;
}

unsigned parse_unsigned(const std::string& s) {
    const auto v = parse_seed(s);
    if (v > 1'000'000) throw UsageError("value too large: " + s);
    return static_cast<unsigned>(v);
}

struct Common {
    std::string config_path;
    std::string seed_text;
    std::string output_dir = ".";
    std::map<std::string, std::string> cfg;

    void load() {
        if (!config_path.empty()) cfg = read_config(config_path);
        if (auto it = cfg.find("seed"); it != cfg.end()) seed_text = it->second;
        if (auto it = cfg.find("output-dir"); it != cfg.end()) output_dir = it->second;
        if (const char* env = std::getenv("FCBGP_OUTPUT_DIR"); env != nullptr && *env != '\0') output_dir = env;
    }
    std::uint64_t seed() const {
        if (seed_text.empty()) throw UsageError("a seed is required (--seed or seed= in the config)");
        return parse_seed(seed_text);
    }
    std::optional<std::string> get(const std::string& key) const {
        auto it = cfg.find(key);
        if (it == cfg.end()) return std::nullopt;
        return it->second;
    }
};

void write_text(const std::filesystem::path& p, const char* text) {
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << text;
}

int cmd_simulate(Common& c, std::string scenario, long period) {
    c.load();
    if (auto v = c.get("scenario")) scenario = *v;
    if (auto v = c.get("period")) period = static_cast<long>(parse_unsigned(*v));
    if (scenario.empty()) throw UsageError("simulate needs a scenario");
    const auto seed = c.seed();

    fcbgp_sim_output out{};
    const auto st = fcbgp_simulate_file(scenario.c_str(), seed, period, &out);
    if (st != FCBGP_OK && st != FCBGP_E_VIOLATION) return report_failure(st);
    std::filesystem::create_directories(c.output_dir);
    write_text(std::filesystem::path(c.output_dir) / "trace.txt", out.trace);
    write_text(std::filesystem::path(c.output_dir) / "summary.txt", out.summary);
    std::cout << out.summary << "digest=" << out.digest << "\n";
    fcbgp_sim_output_free(&out);
    return st == FCBGP_OK ? kExitOk : report_failure(st);
}

struct MetricsArgs {
    std::string as_rel;
    std::string prefix2as;
    std::size_t ases = 500;
    std::size_t origins = 20;
    std::string rates = "0,0.005,0.01,0.02,0.05,0.1,0.2";
    std::string hops = "1,2,3,4";
};

int cmd_metrics(Common& c, MetricsArgs a) {
    c.load();
    if (auto v = c.get("as-rel")) a.as_rel = *v;
    if (auto v = c.get("prefix2as")) a.prefix2as = *v;
    if (auto v = c.get("ases")) a.ases = parse_unsigned(*v);
    if (auto v = c.get("origins")) a.origins = parse_unsigned(*v);
    if (auto v = c.get("rates")) a.rates = *v;
    if (auto v = c.get("hops")) a.hops = *v;
    const auto rates = parse_list<double>(a.rates, parse_double);
    const auto hops = parse_list<unsigned>(a.hops, parse_unsigned);

    fcbgp_metrics_config cfg{};
    cfg.as_rel_path = a.as_rel.empty() ? nullptr : a.as_rel.c_str();
    cfg.prefix2as_path = a.prefix2as.empty() ? nullptr : a.prefix2as.c_str();
    cfg.synthetic_ases = a.ases;
    cfg.origins = a.origins;
    cfg.rates = rates.data();
    cfg.rate_count = rates.size();
    cfg.hops = hops.data();
    cfg.hop_count = hops.size();
    cfg.seed = c.seed();
    cfg.output_dir = c.output_dir.c_str();

    char* report = nullptr;
    const auto st = fcbgp_metrics_run(&cfg, &report);
    if (report != nullptr) {
        std::cout << report;
        fcbgp_string_free(report);
    }
    if (st != FCBGP_OK) return report_failure(st);
    std::cout << "wrote hijacking_rate.csv, breakdown_hijacking_rate.csv, filtration_rate.csv to " << c.output_dir
              << "\n";
    return kExitOk;
}

int print_result(fcbgp_status st, char* text) {
    if (st != FCBGP_OK) return report_failure(st);
    std::cout << text;
    fcbgp_string_free(text);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"FC-BGP simulator and analysis tool"};
    app.require_subcommand(1);

    Common common;
    std::string scenario;
    long period = 0;
    auto* sim = app.add_subcommand("simulate", "run a scenario and write trace.txt and summary.txt");
    sim->add_option("scenario", scenario, "scenario file");
    sim->add_option("--seed", common.seed_text, "RNG seed (required)");
    sim->add_option("--period", period, "consistency-check period in ticks (overrides the scenario)");
    sim->add_option("--config", common.config_path, "key=value file; its values override flags");
    sim->add_option("--output-dir", common.output_dir, "output directory (env FCBGP_OUTPUT_DIR overrides)");

    MetricsArgs margs;
    auto* met = app.add_subcommand("metrics", "hijacking and filtration sweeps as CSV");
    met->add_option("--seed", common.seed_text, "RNG seed (required)");
    met->add_option("--as-rel", margs.as_rel, "as-rel file; a synthetic topology is generated when absent");
    met->add_option("--prefix2as", margs.prefix2as, "prefix2as file");
    met->add_option("--ases", margs.ases, "synthetic topology size");
    met->add_option("--origins", margs.origins, "destinations sampled for monitored paths");
    met->add_option("--rates", margs.rates, "comma-separated deployment rates");
    met->add_option("--hops", margs.hops, "comma-separated attacker distances L");
    met->add_option("--config", common.config_path, "key=value file; its values override flags");
    met->add_option("--output-dir", common.output_dir, "output directory (env FCBGP_OUTPUT_DIR overrides)");

    std::string fixture;
    auto* ins = app.add_subcommand("inspect", "field and hex dump of a fixture file");
    ins->add_option("fixture", fixture, "fixture file")->required();

    std::string records;
    auto* churn = app.add_subcommand("churn", "FC churn statistics over path records");
    churn->add_option("records", records, "records file, lines source|prefix|asn asn ...")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (sim->parsed()) return cmd_simulate(common, scenario, period);
        if (met->parsed()) return cmd_metrics(common, margs);
        if (ins->parsed()) {
            char* dump = nullptr;
            const auto st = fcbgp_inspect_file(fixture.c_str(), &dump);
            return print_result(st, dump);
        }
        char* report = nullptr;
        const auto st = fcbgp_churn_file(records.c_str(), &report);
        return print_result(st, report);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
}
