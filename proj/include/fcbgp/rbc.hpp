#pragma once

#include <map>
#include <set>

#include "fcbgp/crypto.hpp"
#include "fcbgp/types.hpp"

namespace fcbgp {

enum class RbcKind : std::uint8_t { kSend = 1, kEcho = 2, kReady = 3 };

struct RbcMessage {
    RbcKind kind = RbcKind::kSend;
    std::uint64_t round = 0;
    AsNumber leader;
    AsNumber sender;
    Bytes payload;
};

/// Largest f with 3f < n.
std::size_t max_faulty(std::size_t n);

/// One Bracha broadcast instance for a (round, leader) pair as seen by one
/// member. Pure state machine: every returned message is meant for all
/// members, the local one included.
class RbcInstance {
public:
    RbcInstance(AsNumber self, std::uint64_t round, AsNumber leader, std::size_t members,
                std::size_t faulty);
    RbcInstance(AsNumber self, std::uint64_t round, AsNumber leader, std::size_t members)
        : RbcInstance(self, round, leader, members, max_faulty(members)) {}

    /// Leader only.
    std::vector<RbcMessage> start(Bytes payload);
    std::vector<RbcMessage> on_message(const RbcMessage& msg);

    const std::optional<Bytes>& delivered() const { return delivered_; }
    std::uint64_t round() const { return round_; }
    AsNumber leader() const { return leader_; }

    std::size_t echo_threshold() const { return (n_ + f_ + 2) / 2; }
    std::size_t ready_amplify() const { return f_ + 1; }
    std::size_t deliver_threshold() const { return 2 * f_ + 1; }

    /// Canonical encoding of the local state, for state-space exploration.
    Bytes state_key() const;

private:
    RbcMessage make(RbcKind kind, const Bytes& payload) const;
    void check_ready(const Digest& d, std::vector<RbcMessage>& out);

    AsNumber self_;
    std::uint64_t round_;
    AsNumber leader_;
    std::size_t n_;
    std::size_t f_;
    bool echoed_ = false;
    bool readied_ = false;
    std::map<Digest, Bytes> payloads_;
    std::map<Digest, std::set<AsNumber>> echoes_;
    std::map<Digest, std::set<AsNumber>> readies_;
    std::set<AsNumber> echo_senders_;
    std::set<AsNumber> ready_senders_;
    std::optional<Bytes> delivered_;
};

}  // namespace fcbgp
