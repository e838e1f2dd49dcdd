#pragma once

#include <functional>
#include <memory>
#include <queue>
#include <random>

#include "fcbgp/binding.hpp"
#include "fcbgp/control_plane.hpp"
#include "fcbgp/sync.hpp"

namespace fcbgp {

enum class EventKind : std::uint8_t { kDeliverBgp, kDeliverBinding, kDeliverSync, kInjectPacket, kTimer };

const char* to_string(EventKind k);

struct SimEvent {
    long at = 0;
    std::uint64_t seq = 0;
    AsNumber target;
    EventKind kind = EventKind::kTimer;
    AsNumber from;
    Bytes payload;
};

/// Min-queue on (at, seq); seq is assigned at push, so equal-time events
/// run in enqueue order.
class EventQueue {
public:
    std::uint64_t push(long at, AsNumber target, EventKind kind, AsNumber from, Bytes payload);
    SimEvent pop();
    const SimEvent& top() const { return heap_.top(); }
    bool empty() const { return heap_.empty(); }
    std::size_t size() const { return heap_.size(); }

private:
    struct Later {
        bool operator()(const SimEvent& a, const SimEvent& b) const {
            return a.at != b.at ? a.at > b.at : a.seq > b.seq;
        }
    };
    std::priority_queue<SimEvent, std::vector<SimEvent>, Later> heap_;
    std::uint64_t next_seq_ = 0;
};

struct SimConfig {
    SpeakerConfig speaker;
    long tick_budget = 1'000'000;
    std::size_t event_budget = 50'000'000;
    std::uint64_t seed = 1;
    long binding_delay_min = 1;
    long binding_delay_max = 1;
    double binding_loss = 0.0;
    /// Subversion updates from on-path ASes whose route changes.
    bool auto_subversion = true;
};

struct SyncSetup {
    std::vector<std::vector<AsNumber>> regions;
    std::map<AsNumber, SyncBehavior> behaviors;
    long start = 0;
    long period = 50;
    std::uint64_t rounds = 10;
    long delay_min = 1;
    long delay_max = 5;
};

/// Bogus announcement by `actor`: the update carries `claimed` (origin
/// first, actor excluded) followed by the actor, plus FCs taken from the
/// actor's observed pool that match the claimed pathlets and, when the
/// actor has a key, its own FC for the last hop.
struct FakePathScript {
    AsNumber actor;
    Prefix prefix;
    std::vector<AsNumber> claimed;
    std::vector<AsNumber> to;  // empty: every neighbor
    bool use_pool = true;
};

struct PacketOutcome {
    std::uint64_t id = 0;
    Prefix src;
    Prefix dst;
    std::vector<AsNumber> hops;  // ASes that handled the packet, in order
    std::string status;          // delivered | discarded | no-route | ttl | pending
    std::string reason;
    AsNumber stopped_at;
};

struct SimTrace {
    std::vector<std::string> lines;

    std::string text() const;
    Digest digest() const;
};

/// Deterministic discrete-event network of BGP speakers, rule tables and
/// (optionally) sync members. Public calls schedule work; run() drains the
/// queue. Calls may be interleaved with run() any number of times.
class Simulator {
public:
    Simulator(const TrustBase& trust, const KeyStore& keys, SimConfig config = {});
    ~Simulator();

    void add_as(AsNumber asn);
    /// `rel` is b's role as seen from a (kCustomer: a is b's provider).
    void add_link(AsNumber a, AsNumber b, Relationship rel = Relationship::kNone, long latency = 1);
    /// Removes IP reachability between a and b for binding and sync traffic.
    void cut(AsNumber a, AsNumber b);

    void originate(AsNumber asn, const Prefix& prefix, long at = 0);
    void fake_path(FakePathScript script, long at = 0);
    /// Packet from `src` to `dst` handed to `at_as` by `from` (== at_as for
    /// a locally sourced packet).
    std::uint64_t inject_packet(const Prefix& src, const Prefix& dst, AsNumber at_as, AsNumber from,
                                long at = 0);
    /// Spoofed packet: the actor sends traffic claiming `src` through `via`.
    std::uint64_t spoof(AsNumber actor, const Prefix& src, const Prefix& dst, AsNumber via, long at = 0);
    /// The actor forwards (src, dst) traffic to `detour` instead of its best next hop.
    void divert(AsNumber actor, const Prefix& src, const Prefix& dst, AsNumber detour);

    enum class BindMode : std::uint8_t { kOnPath, kOffPath, kStartup };
    /// Issuer must own src. Broadcasts the binding to every AS.
    void bind(AsNumber issuer, const Prefix& src, const Prefix& dst, long at = 0,
              BindMode mode = BindMode::kOnPath);
    void unbind(AsNumber issuer, const Prefix& src, const Prefix& dst, long at = 0);
    /// Hands a prepared message to every AS other than its issuer.
    void broadcast_binding(const BindingMessage& msg, long at);
    /// Externally built binding: the issuer installs its local rule at `at`
    /// and broadcasts the message.
    void publish_binding(const BindingMessage& msg, long at);

    void enable_sync(SyncSetup setup);

    /// Drains the event queue. Throws kBudgetExhausted with the residual
    /// queue size when the tick or event budget runs out.
    void run();

    long now() const { return now_; }
    const SimTrace& trace() const { return trace_; }
    std::vector<AsNumber> ases() const;
    bool has_as(AsNumber asn) const;
    const Speaker& speaker(AsNumber asn) const;
    const RuleTable& rules(AsNumber asn) const;
    const SyncNode* sync_node(AsNumber asn) const;
    const std::set<ForwardingCommitment>& observed_pool(AsNumber asn) const;
    const PacketOutcome& packet(std::uint64_t id) const;
    const std::vector<PacketOutcome>& packets() const { return packets_; }
    /// Binding messages created so far by scripted issuers, in issue order.
    const std::vector<BindingMessage>& issued_bindings() const { return issued_; }
    /// Sequence number of the first rule installation and first RBC delivery.
    std::optional<std::uint64_t> first_rule_event() const { return first_rule_event_; }
    std::optional<std::uint64_t> first_rbc_delivery_event() const { return first_rbc_event_; }
    const std::vector<std::string>& warnings() const { return warnings_; }

private:
    struct Node;
    struct Link {
        long latency = 1;
    };

    Node& node(AsNumber asn);
    const Node& node(AsNumber asn) const;
    std::uint64_t schedule_action(long at, std::function<void()> fn);
    void send_updates(AsNumber from, const std::vector<Outbound>& out);
    void handle(const SimEvent& ev);
    void handle_bgp(const SimEvent& ev);
    void handle_binding(const SimEvent& ev);
    void handle_sync(const SimEvent& ev);
    void handle_packet(const SimEvent& ev);
    void send_sync(AsNumber from, const std::vector<Envelope>& out);
    void issue(AsNumber issuer, BindingMessage msg);
    void maybe_subversion(AsNumber asn, const Prefix& prefix);
    bool reachable(AsNumber a, AsNumber b) const;
    long binding_delay();
    void log(AsNumber asn, const std::string& record);
    void flush_speaker_log(Node& n);

    const TrustBase* trust_;
    const KeyStore* keys_;
    SimConfig config_;
    std::mt19937_64 rng_;
    EventQueue queue_;
    long now_ = 0;
    std::uint64_t current_seq_ = 0;
    std::size_t events_processed_ = 0;
    std::map<AsNumber, std::unique_ptr<Node>> nodes_;
    std::map<std::pair<AsNumber, AsNumber>, Link> links_;
    std::set<std::pair<AsNumber, AsNumber>> cuts_;
    std::vector<std::function<void()>> actions_;
    std::map<AsNumber, std::int32_t> counters_;
    std::vector<BindingMessage> issued_;
    std::vector<PacketOutcome> packets_;
    std::optional<SyncSetup> sync_;
    std::optional<std::uint64_t> first_rule_event_;
    std::optional<std::uint64_t> first_rbc_event_;
    std::vector<std::string> warnings_;
    SimTrace trace_;
};

}  // namespace fcbgp
