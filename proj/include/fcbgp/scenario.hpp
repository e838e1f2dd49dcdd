#pragma once

#include "fcbgp/simulator.hpp"

namespace fcbgp {

/// Parsed scenario file. One directive per line, `#` starts a comment:
///
///   seed <n>
///   config [gao-rexford=0|1] [export-suspicious=0|1] [budget=<ticks>]
///          [binding-loss=<p>] [binding-delay=<a>-<b>] [subversion=0|1]
///   as <asn> [prefix=<p>[,<p>...]] [deployed=0|1]
///   link <a> <b> [rel=p2c|peer|none] [latency=<ticks>]
///   cut <a> <b>
///   originate <asn> <prefix> [at=<t>]
///   adversary <asn> fake-path prefix=<p> path=<a,b,...> [to=<a,...>] [pool=0|1] [at=<t>]
///   adversary <asn> spoof src=<p> dst=<p> via=<asn> [at=<t>]
///   adversary <asn> divert src=<p> dst=<p> detour=<asn>
///   bind <asn> src=<p> dst=<p> [mode=on-path|off-path|startup] [at=<t>]
///   unbind <asn> src=<p> dst=<p> [at=<t>]
///   packet src=<p> dst=<p> at-as=<asn> [from=<asn>] [at=<t>]
///   sync [period=<t>] [rounds=<n>] [start=<t>] [delay=<a>-<b>] [regions=<a,b;c,d>]
///   byzantine <asn> behavior=silent|equivocate|lying-view|withholding
///   expect <asn> <prefix> class=<Class> [path=<a,b,...>]
///   expect-packet <n> status=delivered|discarded|no-route
///
/// `link ... rel=p2c` makes a the provider of b. Deployed ASes get keys
/// derived from the seed. Packets are numbered from 0 in file order.
struct Scenario {
    struct Line {
        long number = 0;
        std::string keyword;
        std::vector<std::string> positional;
        std::map<std::string, std::string> options;
    };

    std::uint64_t seed = 1;
    std::vector<Line> lines;
};

Scenario parse_scenario(std::string_view text);
Scenario load_scenario_file(const std::string& path);

struct ScenarioResult {
    SimTrace trace;
    std::vector<std::string> summary;     // final routes, rules, packets, sync views
    std::vector<std::string> violations;  // failed expectations
    std::vector<std::string> warnings;
};

/// Builds the network and runs it to quiescence. Throws kParse (with line)
/// for bad directives and kBudgetExhausted when the run does not settle.
/// `period_override` replaces the consistency-check period of `sync`.
ScenarioResult run_scenario(const Scenario& scenario, std::optional<std::uint64_t> seed_override = {},
                            std::optional<long> period_override = {});

}  // namespace fcbgp
