#include "fcbgp/topology_gen.hpp"

#include <algorithm>
#include <queue>
#include <random>

namespace fcbgp {

AsTopology generate_scale_free(std::size_t n, std::uint64_t seed, std::size_t providers) {
    if (n < 3) throw Error(ErrorCode::kInvalidArgument, "scale-free topology needs at least 3 ASes");
    std::mt19937_64 rng(seed);
    AsTopology topo;
    // Each AS appears in `ends` once per incident link: sampling from it is
    // degree-proportional.
    std::vector<AsNumber> ends;
    auto link = [&](AsNumber a, AsNumber b, Relationship rel) {
        topo.add_link(a, b, rel);
        ends.push_back(a);
        ends.push_back(b);
    };
    link(AsNumber(1), AsNumber(2), Relationship::kPeer);
    link(AsNumber(1), AsNumber(3), Relationship::kPeer);
    link(AsNumber(2), AsNumber(3), Relationship::kPeer);
    for (std::uint32_t v = 4; v <= n; ++v) {
        const AsNumber self(v);
        const std::size_t want = std::min<std::size_t>(providers, v - 1);
        std::set<AsNumber> chosen;
        while (chosen.size() < want) {
            std::uniform_int_distribution<std::size_t> pick(0, ends.size() - 1);
            chosen.insert(ends[pick(rng)]);
        }
        for (auto p : chosen) link(p, self, Relationship::kCustomer);
    }
    std::uniform_int_distribution<std::uint32_t> any(1, static_cast<std::uint32_t>(n));
    for (std::size_t added = 0, tries = 0; added < n / 10 && tries < n * 20; ++tries) {
        const AsNumber a(any(rng));
        const AsNumber b(any(rng));
        if (a == b || topo.adjacency[a].contains(b)) continue;
        link(a, b, Relationship::kPeer);
        ++added;
    }
    return topo;
}

std::map<AsNumber, std::vector<AsNumber>> valley_free_routes(const AsTopology& topo, AsNumber origin) {
    struct Route {
        int kind;  // 0 customer (or origin), 1 peer, 2 provider
        std::size_t len;
        AsNumber next;
    };
    std::map<AsNumber, Route> best;
    if (!topo.adjacency.contains(origin)) return {};
    auto better = [](const Route& a, const Route& b) {
        if (a.kind != b.kind) return a.kind < b.kind;
        if (a.len != b.len) return a.len < b.len;
        return a.next < b.next;
    };
    best[origin] = {0, 0, kNullAs};

    // Customer routes climb provider links, level by level.
    std::vector<AsNumber> frontier{origin};
    while (!frontier.empty()) {
        std::map<AsNumber, Route> found;
        for (auto x : frontier) {
            for (const auto& [nbr, rel] : topo.adjacency.at(x)) {
                if (rel != Relationship::kProvider || best.contains(nbr)) continue;
                Route r{0, best[x].len + 1, x};
                auto it = found.find(nbr);
                if (it == found.end() || better(r, it->second)) found[nbr] = r;
            }
        }
        frontier.clear();
        for (const auto& [a, r] : found) {
            best[a] = r;
            frontier.push_back(a);
        }
    }

    // One peer hop off a customer route.
    std::map<AsNumber, Route> peer_routes;
    for (const auto& [x, rx] : best) {
        for (const auto& [nbr, rel] : topo.adjacency.at(x)) {
            if (rel != Relationship::kPeer || best.contains(nbr)) continue;
            Route r{1, rx.len + 1, x};
            auto it = peer_routes.find(nbr);
            if (it == peer_routes.end() || better(r, it->second)) peer_routes[nbr] = r;
        }
    }
    best.insert(peer_routes.begin(), peer_routes.end());

    // Provider routes descend customer links, shortest first.
    using Item = std::tuple<std::size_t, AsNumber, AsNumber>;  // len, next, node
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    for (const auto& [x, rx] : best) {
        for (const auto& [nbr, rel] : topo.adjacency.at(x)) {
            if (rel == Relationship::kCustomer && !best.contains(nbr)) pq.emplace(rx.len + 1, x, nbr);
        }
    }
    while (!pq.empty()) {
        auto [len, next, node] = pq.top();
        pq.pop();
        if (best.contains(node)) continue;
        best[node] = {2, len, next};
        for (const auto& [nbr, rel] : topo.adjacency.at(node)) {
            if (rel == Relationship::kCustomer && !best.contains(nbr)) pq.emplace(len + 1, node, nbr);
        }
    }

    std::map<AsNumber, std::vector<AsNumber>> out;
    for (const auto& [a, r] : best) {
        std::vector<AsNumber> path;
        for (AsNumber cur = a; !cur.is_null(); cur = best.at(cur).next) path.push_back(cur);
        std::reverse(path.begin(), path.end());
        out[a] = std::move(path);
    }
    return out;
}

std::vector<std::vector<AsNumber>> sample_monitored_paths(const AsTopology& topo, std::size_t origins,
                                                          std::uint64_t seed) {
    std::vector<AsNumber> all = topo.ases();
    std::mt19937_64 rng(seed);
    std::shuffle(all.begin(), all.end(), rng);
    all.resize(std::min(origins, all.size()));
    std::sort(all.begin(), all.end());
    std::vector<std::vector<AsNumber>> out;
    for (auto o : all) {
        for (auto& [_, path] : valley_free_routes(topo, o)) {
            if (path.size() >= 2) out.push_back(std::move(path));
        }
    }
    return out;
}

}  // namespace fcbgp
