#include "fcbgp/rbc.hpp"

#include "fcbgp/bytes.hpp"

namespace fcbgp {

std::size_t max_faulty(std::size_t n) { return n == 0 ? 0 : (n - 1) / 3; }

RbcInstance::RbcInstance(AsNumber self, std::uint64_t round, AsNumber leader, std::size_t members,
                         std::size_t faulty)
    : self_(self), round_(round), leader_(leader), n_(members), f_(faulty) {
    if (members == 0 || 3 * faulty >= members) {
        throw Error(ErrorCode::kInvalidArgument, "RBC requires 3f < n");
    }
}

RbcMessage RbcInstance::make(RbcKind kind, const Bytes& payload) const {
    return {kind, round_, leader_, self_, payload};
}

std::vector<RbcMessage> RbcInstance::start(Bytes payload) {
    if (self_ != leader_) throw Error(ErrorCode::kInvalidArgument, "only the round leader starts RBC");
    return {make(RbcKind::kSend, payload)};
}

void RbcInstance::check_ready(const Digest& d, std::vector<RbcMessage>& out) {
    const Bytes& payload = payloads_.at(d);
    if (!readied_ && (echoes_[d].size() >= echo_threshold() || readies_[d].size() >= ready_amplify())) {
        readied_ = true;
        out.push_back(make(RbcKind::kReady, payload));
    }
    if (!delivered_ && readies_[d].size() >= deliver_threshold()) delivered_ = payload;
}

std::vector<RbcMessage> RbcInstance::on_message(const RbcMessage& msg) {
    std::vector<RbcMessage> out;
    if (msg.round != round_ || msg.leader != leader_) return out;
    const Digest d = sha256(msg.payload);
    switch (msg.kind) {
        case RbcKind::kSend:
            // Only the leader's first SEND counts.
            if (msg.sender != leader_ || echoed_) return out;
            echoed_ = true;
            payloads_.emplace(d, msg.payload);
            out.push_back(make(RbcKind::kEcho, msg.payload));
            break;
        case RbcKind::kEcho:
            if (!echo_senders_.insert(msg.sender).second) return out;
            payloads_.emplace(d, msg.payload);
            echoes_[d].insert(msg.sender);
            check_ready(d, out);
            break;
        case RbcKind::kReady:
            if (!ready_senders_.insert(msg.sender).second) return out;
            payloads_.emplace(d, msg.payload);
            readies_[d].insert(msg.sender);
            check_ready(d, out);
            break;
    }
    return out;
}

Bytes RbcInstance::state_key() const {
    ByteWriter w;
    w.u8(echoed_);
    w.u8(readied_);
    auto tallies = [&](const std::map<Digest, std::set<AsNumber>>& m) {
        w.u32(static_cast<std::uint32_t>(m.size()));
        for (const auto& [d, senders] : m) {
            w.bytes(d);
            w.u32(static_cast<std::uint32_t>(senders.size()));
            for (auto s : senders) w.u32(s.value);
        }
    };
    tallies(echoes_);
    tallies(readies_);
    w.u8(delivered_.has_value());
    if (delivered_) w.bytes(sha256(*delivered_));
    return w.take();
}

}  // namespace fcbgp
