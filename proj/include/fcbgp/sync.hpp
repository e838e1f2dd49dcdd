#pragma once

#include <map>
#include <set>

#include "fcbgp/binding.hpp"
#include "fcbgp/rbc.hpp"

namespace fcbgp {

/// Latest binding version seen per issuing AS. An entry is the highest
/// version v such that versions 1..v are all held locally.
struct BindingVersionView {
    std::map<AsNumber, std::int32_t> entries;

    std::int32_t get(AsNumber asn) const {
        auto it = entries.find(asn);
        return it == entries.end() ? 0 : it->second;
    }
    friend bool operator==(const BindingVersionView&, const BindingVersionView&) = default;
};

/// count(4) then asn(4) ‖ ver(4) per entry. Nothing else goes in.
Bytes encode_bvv(const BindingVersionView& view);
BindingVersionView decode_bvv(ByteView octets);
std::string format_bvv(const BindingVersionView& view);

/// members[v mod N]. Members must be non-empty; order is taken as given.
AsNumber leader_for_round(std::uint64_t round, std::span<const AsNumber> members);

enum class SyncKind : std::uint8_t {
    kSend = 1,
    kEcho = 2,
    kReady = 3,
    kRequest = 4,
    kSupply = 5,
    kForward = 6,  // post-check view pushed by a region leader to other regions
};

const char* to_string(SyncKind k);
/// SEND/ECHO/READY/FORWARD carry a version view and nothing else.
inline bool is_consistency_check(SyncKind k) { return k != SyncKind::kRequest && k != SyncKind::kSupply; }

struct SyncMessage {
    SyncKind kind = SyncKind::kSend;
    std::uint64_t round = 0;
    AsNumber leader;
    AsNumber sender;
    Bytes payload;
};

/// tag(1) ‖ round(8) ‖ leader(4) ‖ sender(4) ‖ payload-length(4) ‖ payload
Bytes encode_sync(const SyncMessage& msg);
SyncMessage decode_sync(ByteView octets);

struct VersionRange {
    AsNumber issuer;
    std::int32_t from = 0;
    std::int32_t to = 0;
};
Bytes encode_request(const VersionRange& range);
VersionRange decode_request(ByteView octets);
Bytes encode_supply(const std::vector<BindingMessage>& msgs);
std::vector<BindingMessage> decode_supply(ByteView octets);

struct SyncAction {
    enum class Kind : std::uint8_t { kRequestMissing, kSendNewer };
    Kind kind;
    AsNumber issuer;
    std::int32_t from = 0;  // first version concerned
    std::int32_t to = 0;    // last version concerned
    AsNumber peer;          // where the request or the newer messages go

    friend bool operator==(const SyncAction&, const SyncAction&) = default;
};

/// Compares a delivered view against the local one, entry by entry.
std::vector<SyncAction> reconcile(const BindingVersionView& local, const BindingVersionView& delivered,
                                  AsNumber self, AsNumber leader);

enum class SyncBehavior : std::uint8_t {
    kHonest,
    kSilent,       // sends nothing at all
    kEquivocate,   // as leader, SENDs two different views
    kLyingView,    // as leader, advertises versions it does not hold
    kWithholding,  // never answers repair requests
};

const char* to_string(SyncBehavior b);
SyncBehavior parse_sync_behavior(std::string_view text);

struct Envelope {
    AsNumber to;
    SyncMessage msg;
};

/// Consistency-check participant of one AS. Processes its events serially;
/// each call returns the messages to put on the network.
class SyncNode {
public:
    /// `region` lists the members of this AS's region (self included) in
    /// leader order; `others` lists every AS outside the region.
    SyncNode(AsNumber self, std::vector<AsNumber> region, std::vector<AsNumber> others,
             const TrustBase& trust, SyncBehavior behavior = SyncBehavior::kHonest);

    AsNumber self() const { return self_; }
    SyncBehavior behavior() const { return behavior_; }
    AsNumber leader_for(std::uint64_t round) const { return leader_for_round(round, region_); }

    /// Stores a source-issued binding (issuer owns src, valid signature,
    /// sequence >= 1). Returns true when it was not held before.
    bool store_binding(const BindingMessage& msg);

    std::vector<Envelope> on_round(std::uint64_t round);
    std::vector<Envelope> on_message(const SyncMessage& msg);

    const BindingVersionView& view() const { return view_; }
    const std::map<std::pair<AsNumber, std::int64_t>, BindingMessage>& store() const { return store_; }
    const std::set<std::uint64_t>& delivered_rounds() const { return delivered_rounds_; }
    std::vector<std::string> drain_log();

private:
    std::vector<Envelope> to_region(const SyncMessage& msg) const;
    std::vector<Envelope> apply_view(const BindingVersionView& delivered, AsNumber peer,
                                     std::uint64_t round);
    RbcInstance& instance(std::uint64_t round, AsNumber leader);
    SyncMessage message(SyncKind kind, std::uint64_t round, AsNumber leader, Bytes payload) const;

    AsNumber self_;
    std::vector<AsNumber> region_;
    std::vector<AsNumber> others_;
    const TrustBase* trust_;
    SyncBehavior behavior_;
    BindingVersionView view_;
    std::map<std::pair<AsNumber, std::int64_t>, BindingMessage> store_;
    std::map<std::pair<std::uint64_t, AsNumber>, RbcInstance> instances_;
    std::set<std::uint64_t> delivered_rounds_;
    // Versions asked for but not yet received; value is the fallback stage.
    std::map<std::pair<AsNumber, std::int32_t>, int> pending_;
    std::vector<std::string> log_;
};

}  // namespace fcbgp
