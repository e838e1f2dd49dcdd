#include "fcbgp/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace fcbgp {
namespace {

Relationship inverse(Relationship r) {
    switch (r) {
        case Relationship::kCustomer: return Relationship::kProvider;
        case Relationship::kProvider: return Relationship::kCustomer;
        default: return r;
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

template <typename Fn>
void for_each_line(std::string_view text, Fn fn) {
    long number = 0;
    for (auto raw : split(text, '\n')) {
        ++number;
        auto line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        try {
            fn(line, number);
        } catch (const Error& e) {
            if (e.line() >= 0) throw;
            throw Error(e.code(), "line " + std::to_string(number) + ": " + e.what(), -1, number);
        }
    }
}

std::vector<std::string_view> fields_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

}  // namespace

void AsTopology::add_link(AsNumber a, AsNumber b, Relationship b_from_a) {
    adjacency[a][b] = b_from_a;
    adjacency[b][a] = inverse(b_from_a);
}

std::size_t AsTopology::degree(AsNumber asn) const {
    auto it = adjacency.find(asn);
    return it == adjacency.end() ? 0 : it->second.size();
}

std::size_t AsTopology::link_count() const {
    std::size_t n = 0;
    for (const auto& [_, nbrs] : adjacency) n += nbrs.size();
    return n / 2;
}

std::vector<AsNumber> AsTopology::ases() const {
    std::vector<AsNumber> out;
    for (const auto& [a, _] : adjacency) out.push_back(a);
    return out;
}

AsTopology load_topology(std::string_view as_rel, std::string_view prefix2as) {
    AsTopology topo;
    for_each_line(as_rel, [&](std::string_view line, long) {
        const auto f = split(line, '|');
        if (f.size() < 3) throw Error(ErrorCode::kParse, "expected as1|as2|rel");
        const AsNumber a(parse_u32(trim(f[0]), "AS number"));
        const AsNumber b(parse_u32(trim(f[1]), "AS number"));
        if (a.is_null() || b.is_null()) throw Error(ErrorCode::kParse, "AS 0 is reserved");
        if (a == b) throw Error(ErrorCode::kParse, "self relationship for AS " + to_string(a));
        const auto rel_text = trim(f[2]);
        Relationship rel;
        if (rel_text == "-1") rel = Relationship::kCustomer;
        else if (rel_text == "0") rel = Relationship::kPeer;
        else throw Error(ErrorCode::kParse, "relationship must be -1 or 0, got '" + std::string(rel_text) + "'");
        auto ia = topo.adjacency.find(a);
        if (ia != topo.adjacency.end()) {
            auto ib = ia->second.find(b);
            if (ib != ia->second.end()) {
                if (ib->second != rel) {
                    throw Error(ErrorCode::kConflict, "conflicting relationship for " + to_string(a) + "|" +
                                                          to_string(b));
                }
                return;
            }
        }
        topo.add_link(a, b, rel);
    });
    for_each_line(prefix2as, [&](std::string_view line, long) {
        const auto f = fields_ws(line);
        if (f.size() < 3) throw Error(ErrorCode::kParse, "expected address, length and AS");
        const std::string text = std::string(f[0]) + "/" + std::string(f[1]);
        const Prefix p = Prefix::parse(text);
        auto asn_field = f[2];
        const auto cut = asn_field.find_first_of("_,");
        if (cut != std::string_view::npos) asn_field = asn_field.substr(0, cut);
        const AsNumber owner(parse_u32(asn_field, "origin AS"));
        topo.prefix_owner.try_emplace(p, owner);
    });
    return topo;
}

AsTopology load_topology_files(const std::string& as_rel_path, const std::string& prefix2as_path) {
    const std::string rel = read_file(as_rel_path);
    const std::string p2a = prefix2as_path.empty() ? std::string() : read_file(prefix2as_path);
    return load_topology(rel, p2a);
}

DeploymentPlan deployment_plan(const AsTopology& topo, double rate) {
    if (rate < 0 || rate > 1) throw Error(ErrorCode::kInvalidArgument, "deployment rate must be in [0,1]");
    std::vector<AsNumber> order = topo.ases();
    std::stable_sort(order.begin(), order.end(), [&](AsNumber a, AsNumber b) {
        const auto da = topo.degree(a);
        const auto db = topo.degree(b);
        return da != db ? da > db : a < b;
    });
    // Guard against 0.07 * 100 = 7.000000000000001.
    const auto count = static_cast<std::size_t>(std::ceil(rate * static_cast<double>(order.size()) - 1e-9));
    DeploymentPlan plan;
    plan.rate = rate;
    plan.deployed.insert(order.begin(), order.begin() + static_cast<long>(std::min(count, order.size())));
    return plan;
}

const char* to_string(HijackMode m) { return m == HijackMode::kFcBgp ? "fcbgp" : "bgpsec"; }

std::size_t protected_prefix_k(std::span<const AsNumber> path, const std::set<AsNumber>& deployed) {
    const std::size_t n = path.size();
    if (n == 0) throw Error(ErrorCode::kInvalidArgument, "empty path");
    if (!deployed.contains(path[n - 1])) return 1;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (!deployed.contains(path[i])) return i + 1;
    }
    return n;
}

bool hijackable(std::span<const AsNumber> path, const std::set<AsNumber>& deployed, unsigned l,
                HijackMode mode) {
    const std::size_t n = path.size();
    if (n == 0) throw Error(ErrorCode::kInvalidArgument, "empty path");
    const std::size_t hops = n - 1;
    if (mode == HijackMode::kFcBgp) return hops > protected_prefix_k(path, deployed) + l;
    const bool all = std::all_of(path.begin(), path.end(), [&](AsNumber a) { return deployed.contains(a); });
    return !all && hops > 1 + l;
}

double hijacking_rate(const std::vector<std::vector<AsNumber>>& paths, const DeploymentPlan& plan,
                      unsigned l, HijackMode mode) {
    if (paths.empty()) throw Error(ErrorCode::kInvalidArgument, "no monitored paths");
    std::size_t hit = 0;
    for (const auto& p : paths) hit += hijackable(p, plan.deployed, l, mode) ? 1 : 0;
    return static_cast<double>(hit) / static_cast<double>(paths.size());
}

FilteringCount filtering_count(std::span<const int> degrees, const std::vector<bool>& deployed) {
    const std::size_t size = degrees.size();
    if (size < 2) throw Error(ErrorCode::kDegenerate, "path needs at least two ASes");
    if (deployed.size() != size) throw Error(ErrorCode::kInvalidArgument, "one deployment flag per AS");
    const std::size_t n = size - 1;
    FilteringCount c;
    c.total = 2;
    for (std::size_t k = 0; k <= n; ++k) {
        const int d = degrees[k];
        const bool interior = k != 0 && k != n;
        if (d < (interior ? 2 : 1)) {
            throw Error(ErrorCode::kDegenerate, "A_" + std::to_string(k) + " has degree " + std::to_string(d) +
                                                    (interior ? ", interior ASes need at least 2" : ", need at least 1"));
        }
        c.total += d - 1;
        const long y = interior ? d - 2 : d - 1;
        if (deployed[k]) c.filtered += y;
    }
    return c;
}

double filtering_rate(std::span<const int> degrees, const std::vector<bool>& deployed) {
    return filtering_count(degrees, deployed).rate();
}

std::vector<int> path_degrees(const AsTopology& topo, std::span<const AsNumber> path) {
    std::vector<int> out;
    for (auto a : path) out.push_back(static_cast<int>(topo.degree(a)));
    return out;
}

std::vector<CurvePoint> average_filtering_curve(const AsTopology& topo,
                                                const std::vector<std::vector<AsNumber>>& paths,
                                                const std::vector<double>& rates) {
    std::vector<CurvePoint> out;
    for (double rate : rates) {
        const auto plan = deployment_plan(topo, rate);
        double sum = 0;
        std::size_t count = 0;
        for (const auto& p : paths) {
            if (p.size() < 2) continue;
            std::vector<bool> t;
            for (auto a : p) t.push_back(plan.deployed.contains(a));
            sum += filtering_rate(path_degrees(topo, p), t);
            ++count;
        }
        out.push_back({rate, count == 0 ? 0.0 : sum / static_cast<double>(count)});
    }
    return out;
}

double ChurnStats::new_path_fraction() const {
    return total == 0 ? 0.0 : static_cast<double>(new_paths) / static_cast<double>(total);
}

double ChurnStats::path_change_fraction() const {
    return total == 0 ? 0.0 : static_cast<double>(path_changes) / static_cast<double>(total);
}

double ChurnStats::unchanged_fc_fraction() const {
    return fcs_in_changed_paths == 0 ? 0.0
                                     : static_cast<double>(fcs_unchanged) / static_cast<double>(fcs_in_changed_paths);
}

double ChurnStats::changes_at_most(std::size_t k) const {
    if (path_changes == 0) return 0.0;
    std::size_t n = 0;
    for (const auto& [changed, count] : changed_histogram) {
        if (changed <= k) n += count;
    }
    return static_cast<double>(n) / static_cast<double>(path_changes);
}

std::set<std::tuple<AsNumber, AsNumber, AsNumber>> path_pathlets(std::span<const AsNumber> path) {
    std::set<std::tuple<AsNumber, AsNumber, AsNumber>> out;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        out.emplace(i == 0 ? kNullAs : path[i - 1], path[i], path[i + 1]);
    }
    return out;
}

ChurnStats update_churn_stats(const std::vector<ChurnRecord>& records) {
    ChurnStats s;
    std::map<std::pair<AsNumber, Prefix>, std::vector<AsNumber>> current;
    for (const auto& r : records) {
        ++s.total;
        auto [it, inserted] = current.try_emplace({r.source, r.prefix}, r.as_path);
        if (inserted) {
            ++s.new_paths;
            continue;
        }
        if (it->second == r.as_path) {
            ++s.identical;
            continue;
        }
        ++s.path_changes;
        const auto old_set = path_pathlets(it->second);
        const auto new_set = path_pathlets(r.as_path);
        std::size_t kept = 0;
        for (const auto& p : new_set) kept += old_set.contains(p) ? 1 : 0;
        s.fcs_in_changed_paths += new_set.size();
        s.fcs_unchanged += kept;
        ++s.changed_histogram[new_set.size() - kept];
        it->second = r.as_path;
    }
    return s;
}

std::vector<ChurnRecord> parse_churn_records(std::string_view text) {
    std::vector<ChurnRecord> out;
    for_each_line(text, [&](std::string_view line, long) {
        const auto f = split(line, '|');
        if (f.size() != 3) throw Error(ErrorCode::kParse, "expected source|prefix|path");
        ChurnRecord r;
        r.source = AsNumber(parse_u32(trim(f[0]), "source AS"));
        r.prefix = Prefix::parse(trim(f[1]));
        for (auto a : fields_ws(f[2])) r.as_path.emplace_back(parse_u32(a, "path AS"));
        if (r.as_path.empty()) throw Error(ErrorCode::kParse, "empty AS path");
        out.push_back(std::move(r));
    });
    return out;
}

}  // namespace fcbgp
