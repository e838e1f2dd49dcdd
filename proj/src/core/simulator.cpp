#include "fcbgp/simulator.hpp"

#include <algorithm>

#include "fcbgp/bytes.hpp"

namespace fcbgp {

const char* to_string(EventKind k) {
    switch (k) {
        case EventKind::kDeliverBgp: return "deliver-bgp";
        case EventKind::kDeliverBinding: return "deliver-binding";
        case EventKind::kDeliverSync: return "deliver-sync";
        case EventKind::kInjectPacket: return "inject-packet";
        case EventKind::kTimer: return "timer";
    }
    return "?";
}

std::uint64_t EventQueue::push(long at, AsNumber target, EventKind kind, AsNumber from, Bytes payload) {
    const auto seq = next_seq_++;
    heap_.push({at, seq, target, kind, from, std::move(payload)});
    return seq;
}

SimEvent EventQueue::pop() {
    SimEvent ev = heap_.top();
    heap_.pop();
    return ev;
}

std::string SimTrace::text() const {
    std::string out;
    for (const auto& l : lines) {
        out += l;
        out += '\n';
    }
    return out;
}

Digest SimTrace::digest() const {
    const std::string t = text();
    return sha256(ByteView(reinterpret_cast<const std::uint8_t*>(t.data()), t.size()));
}

struct Simulator::Node {
    Node(AsNumber a, const TrustBase& trust, std::optional<Signer> s, const SpeakerConfig& cfg)
        : asn(a), signer(s), speaker(a, trust, s, cfg), rules(a) {}

    AsNumber asn;
    std::optional<Signer> signer;
    Speaker speaker;
    RuleTable rules;
    std::unique_ptr<SyncNode> sync;
    std::set<ForwardingCommitment> pool;
    std::map<std::pair<Prefix, Prefix>, BindingMessage> held;
    std::map<std::pair<Prefix, Prefix>, AsNumber> diversions;
};

namespace {

Relationship inverse(Relationship r) {
    switch (r) {
        case Relationship::kCustomer: return Relationship::kProvider;
        case Relationship::kProvider: return Relationship::kCustomer;
        default: return r;
    }
}

Bytes u64_payload(std::uint64_t v) {
    ByteWriter w;
    w.u64(v);
    return w.take();
}

std::uint64_t read_u64_payload(const Bytes& b) {
    ByteReader r(b);
    return r.u64("event payload");
}

std::string path_string(const std::vector<AsNumber>& path) {
    std::string out;
    for (auto a : path) {
        if (!out.empty()) out += ",";
        out += std::to_string(a.value);
    }
    return out;
}

}  // namespace

Simulator::Simulator(const TrustBase& trust, const KeyStore& keys, SimConfig config)
    : trust_(&trust), keys_(&keys), config_(config), rng_(config.seed) {}

Simulator::~Simulator() = default;

void Simulator::add_as(AsNumber asn) {
    if (nodes_.contains(asn)) throw Error(ErrorCode::kInvalidArgument, "AS " + to_string(asn) + " added twice");
    std::optional<Signer> signer;
    if (trust_->is_deployed(asn)) {
        signer = keys_->signer(asn, trust_->scheme());
        if (!signer) {
            throw Error(ErrorCode::kInvalidArgument,
                        "deployed AS " + to_string(asn) + " has no private key");
        }
    }
    nodes_.emplace(asn, std::make_unique<Node>(asn, *trust_, signer, config_.speaker));
}

bool Simulator::has_as(AsNumber asn) const { return nodes_.contains(asn); }

Simulator::Node& Simulator::node(AsNumber asn) {
    auto it = nodes_.find(asn);
    if (it == nodes_.end()) throw Error(ErrorCode::kUnknownAs, "unknown AS " + to_string(asn));
    return *it->second;
}

const Simulator::Node& Simulator::node(AsNumber asn) const {
    auto it = nodes_.find(asn);
    if (it == nodes_.end()) throw Error(ErrorCode::kUnknownAs, "unknown AS " + to_string(asn));
    return *it->second;
}

std::vector<AsNumber> Simulator::ases() const {
    std::vector<AsNumber> out;
    for (const auto& [asn, _] : nodes_) out.push_back(asn);
    return out;
}

const Speaker& Simulator::speaker(AsNumber asn) const { return node(asn).speaker; }
const RuleTable& Simulator::rules(AsNumber asn) const { return node(asn).rules; }
const SyncNode* Simulator::sync_node(AsNumber asn) const { return node(asn).sync.get(); }
const std::set<ForwardingCommitment>& Simulator::observed_pool(AsNumber asn) const { return node(asn).pool; }

const PacketOutcome& Simulator::packet(std::uint64_t id) const {
    if (id >= packets_.size()) throw Error(ErrorCode::kInvalidArgument, "unknown packet id");
    return packets_[id];
}

void Simulator::add_link(AsNumber a, AsNumber b, Relationship rel, long latency) {
    if (a == b) throw Error(ErrorCode::kInvalidArgument, "self link at AS " + to_string(a));
    if (latency < 1) throw Error(ErrorCode::kInvalidArgument, "link latency must be >= 1");
    Node& na = node(a);
    Node& nb = node(b);
    links_[{a, b}] = {latency};
    links_[{b, a}] = {latency};
    na.speaker.add_neighbor(b, rel);
    nb.speaker.add_neighbor(a, inverse(rel));
    send_updates(a, na.speaker.peer_up(b, rel, now_));
    send_updates(b, nb.speaker.peer_up(a, inverse(rel), now_));
    flush_speaker_log(na);
    flush_speaker_log(nb);
}

void Simulator::cut(AsNumber a, AsNumber b) {
    cuts_.insert({a, b});
    cuts_.insert({b, a});
}

bool Simulator::reachable(AsNumber a, AsNumber b) const { return !cuts_.contains({a, b}); }

void Simulator::log(AsNumber asn, const std::string& record) {
    trace_.lines.push_back("t=" + std::to_string(now_) + " as=" + std::to_string(asn.value) + " " + record);
}

void Simulator::flush_speaker_log(Node& n) {
    for (const auto& rec : n.speaker.drain_log()) trace_.lines.push_back(rec.to_line());
}

std::uint64_t Simulator::schedule_action(long at, std::function<void()> fn) {
    actions_.push_back(std::move(fn));
    ByteWriter w;
    w.u64(actions_.size() - 1);
    return queue_.push(std::max(at, now_), kNullAs, EventKind::kTimer, kNullAs, w.take());
}

void Simulator::send_updates(AsNumber from, const std::vector<Outbound>& out) {
    for (const auto& o : out) {
        Bytes octets;
        try {
            octets = encode_update(o.update);
        } catch (const Error& e) {
            log(from, std::string("encode-error=") + e.what());
            continue;
        }
        const long lat = links_.at({from, o.to}).latency;
        queue_.push(now_ + lat, o.to, EventKind::kDeliverBgp, from, std::move(octets));
    }
}

void Simulator::originate(AsNumber asn, const Prefix& prefix, long at) {
    node(asn);
    schedule_action(at, [this, asn, prefix] {
        Node& n = node(asn);
        send_updates(asn, n.speaker.originate(prefix, now_));
        flush_speaker_log(n);
    });
}

void Simulator::fake_path(FakePathScript script, long at) {
    node(script.actor);
    schedule_action(at, [this, script] {
        Node& n = node(script.actor);
        std::vector<AsNumber> targets = script.to;
        if (targets.empty()) {
            for (const auto& [nbr, _] : n.speaker.neighbors()) targets.push_back(nbr);
        }
        std::vector<AsNumber> path = script.claimed;
        path.push_back(script.actor);
        for (auto to : targets) {
            if (!links_.contains({script.actor, to})) {
                log(script.actor, "adversary=fake-path skipped=no-link peer=" + std::to_string(to.value));
                continue;
            }
            std::vector<ForwardingCommitment> fcs;
            for (std::size_t i = 0; i < path.size(); ++i) {
                const AsNumber prev = i == 0 ? kNullAs : path[i - 1];
                const AsNumber next = i + 1 < path.size() ? path[i + 1] : to;
                if (i + 1 == path.size()) {
                    if (n.signer) fcs.push_back(sign_fc(*n.signer, {prev, path[i], next, script.prefix}));
                    continue;
                }
                if (!script.use_pool) continue;
                for (const auto& fc : n.pool) {
                    if (fc.same_tuple(prev, path[i], next) && verify_fc(fc, script.prefix, *trust_)) {
                        fcs.push_back(fc);
                        break;
                    }
                }
            }
            BgpUpdate u;
            u.prefix = script.prefix;
            u.as_path = path;
            set_fc_list(u, fcs);
            log(script.actor, "adversary=fake-path prefix=" + script.prefix.to_string() + " path=" +
                                  path_string(path) + " fcs=" + std::to_string(fcs.size()) +
                                  " peer=" + std::to_string(to.value));
            send_updates(script.actor, {{to, u}});
        }
    });
}

std::uint64_t Simulator::inject_packet(const Prefix& src, const Prefix& dst, AsNumber at_as,
                                       AsNumber from, long at) {
    node(at_as);
    PacketOutcome p;
    p.id = packets_.size();
    p.src = src;
    p.dst = dst;
    p.status = "pending";
    packets_.push_back(p);
    queue_.push(std::max(at, now_), at_as, EventKind::kInjectPacket, from, u64_payload(p.id));
    return p.id;
}

std::uint64_t Simulator::spoof(AsNumber actor, const Prefix& src, const Prefix& dst, AsNumber via, long at) {
    if (!links_.contains({actor, via})) {
        throw Error(ErrorCode::kInvalidArgument,
                    "spoofing AS " + to_string(actor) + " has no link to " + to_string(via));
    }
    const long lat = links_.at({actor, via}).latency;
    const auto id = inject_packet(src, dst, via, actor, at + lat);
    packets_[id].hops.push_back(actor);
    return id;
}

void Simulator::divert(AsNumber actor, const Prefix& src, const Prefix& dst, AsNumber detour) {
    if (!links_.contains({actor, detour})) {
        throw Error(ErrorCode::kInvalidArgument,
                    "diverting AS " + to_string(actor) + " has no link to " + to_string(detour));
    }
    node(actor).diversions[{src, dst}] = detour;
}

long Simulator::binding_delay() {
    if (config_.binding_delay_max <= config_.binding_delay_min) return config_.binding_delay_min;
    std::uniform_int_distribution<long> d(config_.binding_delay_min, config_.binding_delay_max);
    return d(rng_);
}

void Simulator::bind(AsNumber issuer, const Prefix& src, const Prefix& dst, long at, BindMode mode) {
    node(issuer);
    schedule_action(at, [this, issuer, src, dst, mode] {
        Node& n = node(issuer);
        const std::string pair = " src=" + src.to_string() + " dst=" + dst.to_string();
        if (!n.signer) {
            log(issuer, "bind=skipped reason=not-deployed" + pair);
            return;
        }
        try {
            BindingMessage msg;
            if (mode == BindMode::kOffPath) {
                msg = make_offpath_binding(*n.signer, src, dst, ++counters_[issuer], 0, *trust_);
            } else {
                const RibEntry* best = n.speaker.best(dst);
                if (best == nullptr || best->is_local()) {
                    log(issuer, "bind=skipped reason=no-route" + pair);
                    return;
                }
                if (mode == BindMode::kStartup) {
                    msg = make_startup_binding(*n.signer, src, dst, best->as_path, *trust_);
                } else {
                    if (best->classification == PathClass::kSuspicious) {
                        log(issuer, "bind=skipped reason=suspicious-route" + pair);
                        return;
                    }
                    std::vector<ForwardingCommitment> fcs(best->fcs.rbegin(), best->fcs.rend());
                    msg = make_onpath_binding(*n.signer, src, dst, std::move(fcs), counters_[issuer] + 1, 0,
                                              *trust_);
                    ++counters_[issuer];
                }
            }
            issue(issuer, std::move(msg));
        } catch (const Error& e) {
            log(issuer, std::string("bind=skipped reason=") + to_string(e.code()) + pair);
        }
    });
}

void Simulator::unbind(AsNumber issuer, const Prefix& src, const Prefix& dst, long at) {
    node(issuer);
    schedule_action(at, [this, issuer, src, dst] {
        Node& n = node(issuer);
        if (!n.signer) {
            log(issuer, "unbind=skipped reason=not-deployed");
            return;
        }
        const auto seq = static_cast<std::uint32_t>(++counters_[issuer]);
        issue(issuer, make_withdrawal(*n.signer, src, dst, seq, *trust_));
    });
}

void Simulator::issue(AsNumber issuer, BindingMessage msg) {
    Node& n = node(issuer);
    issued_.push_back(msg);
    const auto res = n.rules.install_local(msg);
    if ((res == InstallResult::kInstalled || res == InstallResult::kReplaced) && !first_rule_event_) {
        first_rule_event_ = current_seq_;
    }
    log(issuer, std::string("binding=issued install=") + to_string(res) + " src=" + msg.src_prefix.to_string() +
                    " dst=" + msg.dst_prefix.to_string() + " ver=" + std::to_string(msg.ver) +
                    " sub=" + std::to_string(msg.ver_sub) + " fcs=" + std::to_string(msg.fc_list.size()));
    if (n.sync) n.sync->store_binding(msg);
    broadcast_binding(msg, now_);
}

void Simulator::publish_binding(const BindingMessage& msg, long at) {
    node(msg.issuer);
    schedule_action(at, [this, msg] { issue(msg.issuer, msg); });
}

void Simulator::broadcast_binding(const BindingMessage& msg, long at) {
    const Bytes octets = encode_binding(msg);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    for (const auto& [asn, _] : nodes_) {
        if (asn == msg.issuer || !reachable(msg.issuer, asn)) continue;
        if (config_.binding_loss > 0 && coin(rng_) < config_.binding_loss) continue;
        queue_.push(std::max(at, now_) + binding_delay(), asn, EventKind::kDeliverBinding, msg.issuer, octets);
    }
}

void Simulator::enable_sync(SyncSetup setup) {
    std::vector<AsNumber> all;
    for (auto& region : setup.regions) {
        std::sort(region.begin(), region.end());
        for (auto a : region) {
            node(a);
            all.push_back(a);
        }
    }
    for (const auto& region : setup.regions) {
        for (auto a : region) {
            std::vector<AsNumber> others;
            for (auto o : all) {
                if (std::find(region.begin(), region.end(), o) == region.end()) others.push_back(o);
            }
            auto it = setup.behaviors.find(a);
            const auto behavior = it == setup.behaviors.end() ? SyncBehavior::kHonest : it->second;
            node(a).sync = std::make_unique<SyncNode>(a, region, others, *trust_, behavior);
            // Bindings this AS issued before sync was enabled.
            for (const auto& m : issued_) {
                if (m.issuer == a) node(a).sync->store_binding(m);
            }
        }
    }
    // Three message delays per RBC plus a repair round trip.
    const long expected = 5 * setup.delay_max;
    if (setup.period <= expected) {
        warnings_.push_back("sync period " + std::to_string(setup.period) +
                            " ticks does not exceed the expected check latency of " +
                            std::to_string(expected) + " ticks");
    }
    sync_ = setup;
    for (std::uint64_t r = 0; r < setup.rounds; ++r) {
        schedule_action(setup.start + static_cast<long>(r) * setup.period, [this, all, r] {
            for (auto a : all) {
                Node& n = node(a);
                send_sync(a, n.sync->on_round(r));
                for (const auto& l : n.sync->drain_log()) log(a, l);
            }
        });
    }
}

void Simulator::send_sync(AsNumber from, const std::vector<Envelope>& out) {
    for (const auto& env : out) {
        if (env.to != from && !reachable(from, env.to)) continue;
        long delay = 0;
        if (env.to != from) {
            std::uniform_int_distribution<long> d(sync_->delay_min, std::max(sync_->delay_min, sync_->delay_max));
            delay = d(rng_);
        }
        queue_.push(now_ + delay, env.to, EventKind::kDeliverSync, from, encode_sync(env.msg));
    }
}

void Simulator::run() {
    while (!queue_.empty()) {
        if (queue_.top().at > config_.tick_budget || events_processed_ >= config_.event_budget) {
            throw Error(ErrorCode::kBudgetExhausted,
                        "simulation budget exhausted at t=" + std::to_string(now_) + " with " +
                            std::to_string(queue_.size()) + " events queued");
        }
        const SimEvent ev = queue_.pop();
        now_ = ev.at;
        current_seq_ = ev.seq;
        ++events_processed_;
        handle(ev);
    }
}

void Simulator::handle(const SimEvent& ev) {
    switch (ev.kind) {
        case EventKind::kTimer: {
            const auto idx = read_u64_payload(ev.payload);
            auto fn = actions_.at(idx);
            fn();
            break;
        }
        case EventKind::kDeliverBgp: handle_bgp(ev); break;
        case EventKind::kDeliverBinding: handle_binding(ev); break;
        case EventKind::kDeliverSync: handle_sync(ev); break;
        case EventKind::kInjectPacket: handle_packet(ev); break;
    }
}

void Simulator::handle_bgp(const SimEvent& ev) {
    Node& n = node(ev.target);
    BgpUpdate u;
    try {
        u = decode_update(ev.payload);
    } catch (const Error& e) {
        log(ev.target, "drop=malformed peer=" + std::to_string(ev.from.value) + " offset=" +
                           std::to_string(e.offset()));
        return;
    }
    if (u.kind == UpdateKind::kWithdrawal) {
        send_updates(ev.target, n.speaker.process_withdraw(u.prefix, ev.from, now_));
        flush_speaker_log(n);
        maybe_subversion(ev.target, u.prefix);
        return;
    }
    for (auto& fc : fc_list(u)) n.pool.insert(std::move(fc));
    const RibEntry* before = n.speaker.best(u.prefix);
    const auto before_path = before ? std::optional(before->as_path) : std::nullopt;
    auto res = n.speaker.process_update(ev.from, u, now_);
    send_updates(ev.target, res.exports);
    flush_speaker_log(n);
    const RibEntry* after = n.speaker.best(u.prefix);
    const auto after_path = after ? std::optional(after->as_path) : std::nullopt;
    if (before_path != after_path) maybe_subversion(ev.target, u.prefix);
}

void Simulator::maybe_subversion(AsNumber asn, const Prefix& prefix) {
    Node& n = node(asn);
    if (!config_.auto_subversion || !n.signer) return;
    std::vector<BindingMessage> updates;
    for (const auto& [pair, msg] : n.held) {
        if (pair.second != prefix) continue;
        auto it = std::find_if(msg.fc_list.begin(), msg.fc_list.end(),
                               [&](const ForwardingCommitment& fc) { return fc.current == asn; });
        if (it == msg.fc_list.end()) continue;
        const RibEntry* best = n.speaker.best(prefix);
        if (best == nullptr || best->is_local() || best->classification == PathClass::kSuspicious) continue;
        std::vector<ForwardingCommitment> tail;
        tail.push_back(sign_fc(*n.signer, {best->received_from, asn, it->next, prefix}));
        tail.insert(tail.end(), best->fcs.rbegin(), best->fcs.rend());
        const bool same = std::equal(tail.begin(), tail.end(), it, msg.fc_list.end(),
                                     [](const ForwardingCommitment& a, const ForwardingCommitment& b) {
                                         return a.same_tuple(b.previous, b.current, b.next);
                                     });
        if (same) continue;
        updates.push_back(subversion_update(*n.signer, msg, std::move(tail)));
    }
    for (auto& msg : updates) {
        const auto outcome = verify_binding(msg, asn, *trust_);
        const auto res = n.rules.install_filter(msg, outcome);
        if (res == InstallResult::kInstalled || res == InstallResult::kReplaced) {
            n.held[{msg.src_prefix, msg.dst_prefix}] = msg;
        }
        issued_.push_back(msg);
        log(asn, std::string("binding=subversion install=") + to_string(res) + " src=" +
                     msg.src_prefix.to_string() + " dst=" + msg.dst_prefix.to_string() +
                     " ver=" + std::to_string(msg.ver) + " sub=" + std::to_string(msg.ver_sub));
        broadcast_binding(msg, now_);
    }
}

void Simulator::handle_binding(const SimEvent& ev) {
    Node& n = node(ev.target);
    BindingMessage msg;
    try {
        msg = decode_binding(ev.payload);
    } catch (const Error& e) {
        log(ev.target, "binding=malformed offset=" + std::to_string(e.offset()));
        return;
    }
    if (n.sync) n.sync->store_binding(msg);
    const std::string pair = " src=" + msg.src_prefix.to_string() + " dst=" + msg.dst_prefix.to_string() +
                             " issuer=" + std::to_string(msg.issuer.value) + " ver=" + std::to_string(msg.ver) +
                             " sub=" + std::to_string(msg.ver_sub);
    if (!n.signer) {
        log(ev.target, "binding=ignored-legacy" + pair);
        return;
    }
    const auto outcome = verify_binding(msg, ev.target, *trust_);
    const auto res = n.rules.install_filter(msg, outcome);
    if (res == InstallResult::kInstalled || res == InstallResult::kReplaced) {
        if (!first_rule_event_) first_rule_event_ = current_seq_;
        if (outcome.kind == VerifyOutcome::Kind::kAcceptedOnPath) {
            n.held[{msg.src_prefix, msg.dst_prefix}] = msg;
        } else {
            n.held.erase({msg.src_prefix, msg.dst_prefix});
        }
    } else if (res == InstallResult::kRemoved) {
        n.held.erase({msg.src_prefix, msg.dst_prefix});
    }
    log(ev.target, "binding=" + outcome.to_string() + " install=" + to_string(res) + pair);
}

void Simulator::handle_sync(const SimEvent& ev) {
    Node& n = node(ev.target);
    if (!n.sync) return;
    SyncMessage msg;
    try {
        msg = decode_sync(ev.payload);
    } catch (const Error& e) {
        log(ev.target, "sync=malformed offset=" + std::to_string(e.offset()));
        return;
    }
    const auto before = n.sync->delivered_rounds().size();
    const auto out = n.sync->on_message(msg);
    if (n.sync->delivered_rounds().size() > before && !first_rbc_event_) first_rbc_event_ = current_seq_;
    send_sync(ev.target, out);
    for (const auto& l : n.sync->drain_log()) log(ev.target, l);
}

void Simulator::handle_packet(const SimEvent& ev) {
    const auto id = read_u64_payload(ev.payload);
    PacketOutcome& p = packets_.at(id);
    Node& n = node(ev.target);
    p.hops.push_back(ev.target);
    const std::string head = "packet=" + std::to_string(id) + " src=" + p.src.to_string() + " dst=" +
                             p.dst.to_string() + " inbound=" + std::to_string(ev.from.value);
    auto finish = [&](std::string status, std::string reason) {
        p.status = std::move(status);
        p.reason = std::move(reason);
        p.stopped_at = ev.target;
        log(ev.target, head + " verdict=" + p.status + (p.reason.empty() ? "" : " reason=" + p.reason));
    };
    if (n.signer) {
        const auto verdict = n.rules.check_packet(p.src, p.dst, ev.from);
        if (!verdict.forward) return finish("discarded", verdict.reason);
    }
    if (trust_->owns(ev.target, p.dst)) return finish("delivered", {});
    if (p.hops.size() > 64) return finish("ttl", {});
    AsNumber next;
    if (auto it = n.diversions.find({p.src, p.dst}); it != n.diversions.end()) {
        next = it->second;
    } else {
        const RibEntry* best = n.speaker.best(p.dst);
        if (best == nullptr) return finish("no-route", {});
        if (best->is_local()) return finish("delivered", {});
        next = best->received_from;
    }
    log(ev.target, head + " verdict=forward next=" + std::to_string(next.value));
    queue_.push(now_ + links_.at({ev.target, next}).latency, next, EventKind::kInjectPacket, ev.target,
                u64_payload(id));
}

}  // namespace fcbgp
