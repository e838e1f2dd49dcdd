#include "fcbgp/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace fcbgp {
namespace {

const std::set<std::string> kKeywords = {
    "seed", "config", "as", "link", "cut", "originate", "adversary", "bind", "unbind",
    "packet", "sync", "byzantine", "expect", "expect-packet"};

[[noreturn]] void bad(const Scenario::Line& l, const std::string& why) {
    throw Error(ErrorCode::kParse, "line " + std::to_string(l.number) + ": " + why, -1, l.number);
}

std::string opt(const Scenario::Line& l, const std::string& key, std::optional<std::string> fallback = {}) {
    auto it = l.options.find(key);
    if (it != l.options.end()) return it->second;
    if (fallback) return *fallback;
    bad(l, l.keyword + " needs " + key + "=");
}

AsNumber as_arg(const Scenario::Line& l, std::string_view text) {
    const auto v = parse_u32(text, "AS number");
    if (v == 0) bad(l, "AS 0 is reserved");
    return AsNumber(v);
}

AsNumber pos_as(const Scenario::Line& l, std::size_t i) {
    if (i >= l.positional.size()) bad(l, l.keyword + " is missing an AS argument");
    return as_arg(l, l.positional[i]);
}

std::vector<AsNumber> as_list(const Scenario::Line& l, std::string_view text) {
    std::vector<AsNumber> out;
    if (text.empty()) return out;
    for (auto part : split(text, ',')) out.push_back(as_arg(l, trim(part)));
    return out;
}

long tick(const Scenario::Line& l, const std::string& key, long fallback) {
    auto it = l.options.find(key);
    if (it == l.options.end()) return fallback;
    const auto v = parse_i64(it->second, key.c_str());
    if (v < 0) bad(l, key + " must not be negative");
    return static_cast<long>(v);
}

bool flag(const Scenario::Line& l, const std::string& key, bool fallback) {
    auto it = l.options.find(key);
    if (it == l.options.end()) return fallback;
    if (it->second == "1" || it->second == "true") return true;
    if (it->second == "0" || it->second == "false") return false;
    bad(l, key + " must be 0 or 1");
}

std::pair<long, long> range_opt(const Scenario::Line& l, const std::string& key, std::pair<long, long> fallback) {
    auto it = l.options.find(key);
    if (it == l.options.end()) return fallback;
    const auto parts = split(it->second, '-');
    if (parts.size() == 1) {
        const long v = parse_i64(parts[0], key.c_str());
        return {v, v};
    }
    if (parts.size() != 2) bad(l, key + " must be <a>-<b>");
    const long a = parse_i64(parts[0], key.c_str());
    const long b = parse_i64(parts[1], key.c_str());
    if (a < 0 || b < a) bad(l, key + " range is empty or negative");
    return {a, b};
}

Prefix prefix_opt(const Scenario::Line& l, const std::string& key) { return Prefix::parse(opt(l, key)); }

std::string join(const std::vector<AsNumber>& path) {
    std::string out;
    for (auto a : path) {
        if (!out.empty()) out += ",";
        out += std::to_string(a.value);
    }
    return out;
}

}  // namespace

Scenario parse_scenario(std::string_view text) {
    Scenario sc;
    long number = 0;
    for (auto raw : split(text, '\n')) {
        ++number;
        auto line = raw;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        Scenario::Line l;
        l.number = number;
        std::istringstream is{std::string(line)};
        std::string tok;
        is >> l.keyword;
        if (!kKeywords.contains(l.keyword)) bad(l, "unknown directive '" + l.keyword + "'");
        while (is >> tok) {
            const auto eq = tok.find('=');
            if (eq == std::string::npos) {
                l.positional.push_back(tok);
            } else if (!l.options.emplace(tok.substr(0, eq), tok.substr(eq + 1)).second) {
                bad(l, "option " + tok.substr(0, eq) + " given twice");
            }
        }
        try {
            if (l.keyword == "seed") {
                if (l.positional.size() != 1) bad(l, "seed takes one integer");
                sc.seed = static_cast<std::uint64_t>(parse_i64(l.positional[0], "seed"));
            }
        } catch (const Error& e) {
            if (e.line() >= 0) throw;
            bad(l, e.what());
        }
        sc.lines.push_back(std::move(l));
    }
    return sc;
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::kIo, "cannot open scenario file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

ScenarioResult run_scenario(const Scenario& sc, std::optional<std::uint64_t> seed_override,
                            std::optional<long> period_override) {
    const std::uint64_t seed = seed_override.value_or(sc.seed);
    TrustBase trust;
    KeyStore keys;
    SimConfig config;
    config.seed = seed;
    std::optional<SyncSetup> sync;
    std::map<AsNumber, SyncBehavior> behaviors;
    struct RouteExpect {
        long line;
        AsNumber asn;
        Prefix prefix;
        PathClass cls;
        std::optional<std::vector<AsNumber>> path;
    };
    struct PacketExpect {
        long line;
        std::size_t index;
        std::string status;
    };
    std::vector<RouteExpect> route_expects;
    std::vector<PacketExpect> packet_expects;
    std::vector<AsNumber> as_order;

    auto guarded = [](const Scenario::Line& l, auto&& fn) {
        try {
            fn();
        } catch (const Error& e) {
            if (e.line() >= 0) throw;
            throw Error(e.code(), "line " + std::to_string(l.number) + ": " + e.what(), -1, l.number);
        }
    };

    // First pass: configuration and the trust base.
    for (const auto& l : sc.lines) {
        guarded(l, [&] {
            if (l.keyword == "config") {
                config.speaker.gao_rexford = flag(l, "gao-rexford", false);
                config.speaker.export_suspicious = flag(l, "export-suspicious", true);
                config.tick_budget = tick(l, "budget", config.tick_budget);
                config.auto_subversion = flag(l, "subversion", true);
                if (l.options.contains("binding-loss")) {
                    config.binding_loss = std::stod(l.options.at("binding-loss"));
                    if (config.binding_loss < 0 || config.binding_loss >= 1) bad(l, "binding-loss must be in [0,1)");
                }
                const auto [a, b] = range_opt(l, "binding-delay", {1, 1});
                if (a < 1) bad(l, "binding-delay must be >= 1");
                config.binding_delay_min = a;
                config.binding_delay_max = b;
            } else if (l.keyword == "as") {
                TrustRecord rec;
                rec.asn = pos_as(l, 0);
                rec.deployed = flag(l, "deployed", false);
                if (auto it = l.options.find("prefix"); it != l.options.end()) {
                    for (auto p : split(it->second, ',')) rec.prefixes.insert(Prefix::parse(trim(p)));
                }
                if (rec.deployed) {
                    auto kp = derive_keypair(trust.scheme(), rec.asn, seed);
                    rec.public_key = kp.public_key;
                    keys.put(rec.asn, kp.secret_key);
                }
                as_order.push_back(rec.asn);
                trust.add(std::move(rec));
            } else if (l.keyword == "sync") {
                SyncSetup s;
                s.period = period_override.value_or(tick(l, "period", s.period));
                s.rounds = static_cast<std::uint64_t>(tick(l, "rounds", static_cast<long>(s.rounds)));
                s.start = tick(l, "start", s.start);
                const auto [a, b] = range_opt(l, "delay", {s.delay_min, s.delay_max});
                s.delay_min = a;
                s.delay_max = b;
                if (s.period < 1) bad(l, "period must be >= 1");
                if (auto it = l.options.find("regions"); it != l.options.end()) {
                    for (auto region : split(it->second, ';')) s.regions.push_back(as_list(l, trim(region)));
                }
                sync = s;
            } else if (l.keyword == "byzantine") {
                behaviors[pos_as(l, 0)] = parse_sync_behavior(opt(l, "behavior"));
            }
        });
    }

    Simulator sim(trust, keys, config);
    for (auto a : as_order) sim.add_as(a);
    std::size_t packet_count = 0;

    for (const auto& l : sc.lines) {
        guarded(l, [&] {
            const std::string& k = l.keyword;
            if (k == "link") {
                const auto a = pos_as(l, 0);
                const auto b = pos_as(l, 1);
                const std::string rel = opt(l, "rel", "none");
                Relationship r = Relationship::kNone;
                if (rel == "p2c") r = Relationship::kCustomer;
                else if (rel == "peer") r = Relationship::kPeer;
                else if (rel != "none") bad(l, "rel must be p2c, peer or none");
                sim.add_link(a, b, r, tick(l, "latency", 1));
            } else if (k == "cut") {
                sim.cut(pos_as(l, 0), pos_as(l, 1));
            } else if (k == "originate") {
                if (l.positional.size() < 2) bad(l, "originate <asn> <prefix>");
                const auto a = pos_as(l, 0);
                const auto p = Prefix::parse(l.positional[1]);
                if (!trust.owns(a, p)) bad(l, "AS " + to_string(a) + " does not own " + p.to_string());
                sim.originate(a, p, tick(l, "at", 0));
            } else if (k == "adversary") {
                const auto actor = pos_as(l, 0);
                if (l.positional.size() < 2) bad(l, "adversary needs a behavior");
                const std::string& what = l.positional[1];
                if (what == "fake-path") {
                    FakePathScript s;
                    s.actor = actor;
                    s.prefix = prefix_opt(l, "prefix");
                    s.claimed = as_list(l, opt(l, "path"));
                    s.to = as_list(l, opt(l, "to", ""));
                    s.use_pool = flag(l, "pool", true);
                    sim.fake_path(std::move(s), tick(l, "at", 0));
                } else if (what == "spoof") {
                    sim.spoof(actor, prefix_opt(l, "src"), prefix_opt(l, "dst"), as_arg(l, opt(l, "via")),
                              tick(l, "at", 0));
                    ++packet_count;
                } else if (what == "divert") {
                    sim.divert(actor, prefix_opt(l, "src"), prefix_opt(l, "dst"), as_arg(l, opt(l, "detour")));
                } else {
                    bad(l, "unknown adversary behavior '" + what + "'");
                }
            } else if (k == "bind") {
                const std::string mode = opt(l, "mode", "on-path");
                Simulator::BindMode m = Simulator::BindMode::kOnPath;
                if (mode == "off-path") m = Simulator::BindMode::kOffPath;
                else if (mode == "startup") m = Simulator::BindMode::kStartup;
                else if (mode != "on-path") bad(l, "mode must be on-path, off-path or startup");
                sim.bind(pos_as(l, 0), prefix_opt(l, "src"), prefix_opt(l, "dst"), tick(l, "at", 0), m);
            } else if (k == "unbind") {
                sim.unbind(pos_as(l, 0), prefix_opt(l, "src"), prefix_opt(l, "dst"), tick(l, "at", 0));
            } else if (k == "packet") {
                const auto at_as = as_arg(l, opt(l, "at-as"));
                const auto from = l.options.contains("from") ? as_arg(l, opt(l, "from")) : at_as;
                sim.inject_packet(prefix_opt(l, "src"), prefix_opt(l, "dst"), at_as, from, tick(l, "at", 0));
                ++packet_count;
            } else if (k == "expect") {
                if (l.positional.size() < 2) bad(l, "expect <asn> <prefix> class=<Class>");
                RouteExpect e{l.number, pos_as(l, 0), Prefix::parse(l.positional[1]),
                              parse_path_class(opt(l, "class")), std::nullopt};
                if (l.options.contains("path")) e.path = as_list(l, l.options.at("path"));
                route_expects.push_back(std::move(e));
            } else if (k == "expect-packet") {
                if (l.positional.size() != 1) bad(l, "expect-packet <n> status=<status>");
                packet_expects.push_back({l.number, static_cast<std::size_t>(parse_u32(l.positional[0], "packet index")),
                                          opt(l, "status")});
            }
        });
    }

    if (sync) {
        if (sync->regions.empty()) {
            std::vector<AsNumber> all;
            for (auto a : as_order) {
                if (trust.is_deployed(a)) all.push_back(a);
            }
            sync->regions.push_back(all);
        }
        sync->behaviors = behaviors;
        sim.enable_sync(*sync);
    }

    sim.run();

    ScenarioResult res;
    res.trace = sim.trace();
    res.warnings = sim.warnings();
    for (auto a : sim.ases()) {
        for (const auto& p : sim.speaker(a).known_prefixes()) {
            const RibEntry* best = sim.speaker(a).best(p);
            if (best == nullptr) {
                res.summary.push_back("route as=" + std::to_string(a.value) + " prefix=" + p.to_string() + " none");
                continue;
            }
            res.summary.push_back("route as=" + std::to_string(a.value) + " prefix=" + p.to_string() +
                                  " class=" + to_string(best->classification) +
                                  " path=" + (best->is_local() ? "local" : join(best->as_path)) +
                                  " via=" + std::to_string(best->received_from.value));
        }
    }
    for (auto a : sim.ases()) {
        std::istringstream rules(sim.rules(a).dump());
        for (std::string line; std::getline(rules, line);) res.summary.push_back("rule " + line);
    }
    for (const auto& p : sim.packets()) {
        res.summary.push_back("packet=" + std::to_string(p.id) + " src=" + p.src.to_string() + " dst=" +
                              p.dst.to_string() + " status=" + p.status +
                              (p.reason.empty() ? "" : " reason=" + p.reason) + " hops=" + join(p.hops));
    }
    for (auto a : sim.ases()) {
        if (const auto* s = sim.sync_node(a)) {
            res.summary.push_back("view as=" + std::to_string(a.value) + " behavior=" + to_string(s->behavior()) +
                                  " bvv=" + format_bvv(s->view()) + " stored=" + std::to_string(s->store().size()));
        }
    }

    for (const auto& e : route_expects) {
        const std::string where = "line " + std::to_string(e.line) + ": AS " + to_string(e.asn) + " " +
                                  e.prefix.to_string();
        if (!sim.has_as(e.asn)) {
            res.violations.push_back(where + ": unknown AS");
            continue;
        }
        const RibEntry* best = sim.speaker(e.asn).best(e.prefix);
        if (best == nullptr) {
            res.violations.push_back(where + ": no route");
            continue;
        }
        if (best->classification != e.cls) {
            res.violations.push_back(where + ": expected " + to_string(e.cls) + ", got " +
                                     to_string(best->classification));
        }
        if (e.path && *e.path != best->as_path) {
            res.violations.push_back(where + ": expected path " + join(*e.path) + ", got " + join(best->as_path));
        }
    }
    for (const auto& e : packet_expects) {
        const std::string where = "line " + std::to_string(e.line) + ": packet " + std::to_string(e.index);
        if (e.index >= packet_count) {
            res.violations.push_back(where + ": no such packet");
        } else if (sim.packet(e.index).status != e.status) {
            res.violations.push_back(where + ": expected " + e.status + ", got " + sim.packet(e.index).status);
        }
    }
    return res;
}

}  // namespace fcbgp
