#pragma once

#include <map>
#include <set>

#include "fcbgp/control_plane.hpp"

namespace fcbgp {

/// AS graph with business relationships. adjacency[a][b] is b's role from
/// a's point of view; the reverse entry always holds the inverse role.
struct AsTopology {
    std::map<AsNumber, std::map<AsNumber, Relationship>> adjacency;
    std::map<Prefix, AsNumber> prefix_owner;
    std::vector<std::vector<AsNumber>> monitored_paths;  // origin first

    void add_link(AsNumber a, AsNumber b, Relationship b_from_a);
    std::size_t degree(AsNumber asn) const;
    std::size_t as_count() const { return adjacency.size(); }
    std::size_t link_count() const;
    std::vector<AsNumber> ases() const;
};

/// as-rel lines `a|b|rel[|...]` (rel -1: a is b's provider, 0: peers) and
/// prefix2as lines `address<ws>length<ws>asn` (multi-origin `a_b` or `a,b`
/// keeps the first). `#` lines are skipped. Errors carry the line number;
/// a pair listed twice with different relationships is kConflict.
AsTopology load_topology(std::string_view as_rel, std::string_view prefix2as);
AsTopology load_topology_files(const std::string& as_rel_path, const std::string& prefix2as_path);

struct DeploymentPlan {
    double rate = 0;
    std::set<AsNumber> deployed;
};

/// Top ceil(rate * |AS|) ASes by degree, descending; ties by ascending ASN.
DeploymentPlan deployment_plan(const AsTopology& topo, double rate);

enum class HijackMode : std::uint8_t { kFcBgp, kBgpsec };
const char* to_string(HijackMode m);

/// For a path A_1..A_N (origin first, A_N the route receiver): the 1-based
/// index of the first AS among A_1..A_{N-1} that is not deployed, N when
/// all are. A legacy receiver ignores path classes, which makes K = 1.
std::size_t protected_prefix_k(std::span<const AsNumber> path, const std::set<AsNumber>& deployed);

/// Attacker L hops from A_N claims a route. FC-BGP: hijackable iff
/// N-1 > K+L. BGPsec: protected only when every AS on the path is
/// deployed, otherwise hijackable iff N-1 > 1+L.
bool hijackable(std::span<const AsNumber> path, const std::set<AsNumber>& deployed, unsigned l,
                HijackMode mode);

double hijacking_rate(const std::vector<std::vector<AsNumber>>& paths, const DeploymentPlan& plan,
                      unsigned l, HijackMode mode);

/// Unwanted traffic units on a path A_0..A_n toward A_0, with D_k
/// neighbors per AS and t_k = 1 when A_k is deployed:
/// M = 2 + sum(D_k - 1); y_0 = (D_0-1)t_0, y_k = (D_k-2)t_k, y_n = (D_n-1)t_n.
struct FilteringCount {
    long filtered = 0;
    long total = 0;

    double rate() const { return total == 0 ? 0.0 : static_cast<double>(filtered) / static_cast<double>(total); }
};

/// Throws kDegenerate when n < 1, an interior D_k < 2 or an end D_k < 1.
FilteringCount filtering_count(std::span<const int> degrees, const std::vector<bool>& deployed);
double filtering_rate(std::span<const int> degrees, const std::vector<bool>& deployed);

/// Degrees along a path (origin first) in the topology.
std::vector<int> path_degrees(const AsTopology& topo, std::span<const AsNumber> path);

struct CurvePoint {
    double rate = 0;
    double mean_f = 0;
};

/// Mean F over the monitored paths (paths shorter than 2 ASes skipped).
std::vector<CurvePoint> average_filtering_curve(const AsTopology& topo,
                                                const std::vector<std::vector<AsNumber>>& paths,
                                                const std::vector<double>& rates);

struct ChurnRecord {
    AsNumber source;
    Prefix prefix;
    std::vector<AsNumber> as_path;  // origin first
};

struct ChurnStats {
    std::size_t total = 0;
    std::size_t new_paths = 0;
    std::size_t path_changes = 0;
    std::size_t identical = 0;
    std::size_t fcs_in_changed_paths = 0;  // sum of |new pathlets| over path changes
    std::size_t fcs_unchanged = 0;         // sum of |old ∩ new| over path changes
    std::map<std::size_t, std::size_t> changed_histogram;  // changed FCs -> count

    double new_path_fraction() const;
    double path_change_fraction() const;
    double unchanged_fc_fraction() const;
    /// Share of path changes with at most `k` changed FCs.
    double changes_at_most(std::size_t k) const;
};

/// Pathlets (prev, cur, next) for every AS of the path that has a next AS.
std::set<std::tuple<AsNumber, AsNumber, AsNumber>> path_pathlets(std::span<const AsNumber> path);

/// First record for a (source, prefix) is a new path; a different path
/// afterwards is a path change with |new pathlets \ old pathlets| changed
/// FCs; a repeat of the current path is neither.
ChurnStats update_churn_stats(const std::vector<ChurnRecord>& records);

/// Lines `source|prefix|asn asn ...` (path origin first), `#` comments.
std::vector<ChurnRecord> parse_churn_records(std::string_view text);

}  // namespace fcbgp
