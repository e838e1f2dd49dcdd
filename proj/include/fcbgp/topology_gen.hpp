#pragma once

#include "fcbgp/analysis.hpp"

namespace fcbgp {

/// Preferential-attachment AS graph: a peered core of three ASes, then each
/// new AS buys transit from `providers` existing ASes chosen with
/// probability proportional to degree. About n/10 extra peer links join
/// random non-adjacent pairs. ASNs are 1..n.
AsTopology generate_scale_free(std::size_t n, std::uint64_t seed, std::size_t providers = 2);

/// Best valley-free route from every AS to `origin` (customer routes over
/// peer routes over provider routes, then shorter, then lower next-hop
/// ASN). Each path is origin first and ends at the AS holding it.
std::map<AsNumber, std::vector<AsNumber>> valley_free_routes(const AsTopology& topo, AsNumber origin);

/// Routes toward `origins` randomly chosen origins from every AS that has
/// one; paths of fewer than two ASes are skipped.
std::vector<std::vector<AsNumber>> sample_monitored_paths(const AsTopology& topo, std::size_t origins,
                                                          std::uint64_t seed);

}  // namespace fcbgp
