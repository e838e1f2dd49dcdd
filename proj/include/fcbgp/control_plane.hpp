#pragma once

#include <map>
#include <set>

#include "fcbgp/wire.hpp"

namespace fcbgp {

/// Ordered by routing preference: Trusted > PartiallyTrusted > Legacy > Suspicious.
enum class PathClass : std::uint8_t {
    kSuspicious = 0,
    kLegacy = 1,
    kPartiallyTrusted = 2,
    kTrusted = 3,
};

const char* to_string(PathClass c);
PathClass parse_path_class(std::string_view text);

/// Classifies `as_path` (origin first) as received by `self` against the
/// carried FCs. Pathlet i is (A_{i-1}, A_i, A_{i+1}) with Null before the
/// origin and `self` after the last hop.
///
/// Trusted: every pathlet has a valid FC.
/// PartiallyTrusted: valid FCs cover an origin-anchored contiguous run and
///   every uncovered pathlet's signer is a legacy AS.
/// Legacy: no FCs and every signer on the path is legacy.
/// Suspicious: anything else, i.e. a deployed signer without its FC, a
///   failed or path-inconsistent FC, a gap in the FC run, or an origin that
///   does not own the prefix.
PathClass classify_path(std::span<const AsNumber> as_path,
                        std::span<const ForwardingCommitment> fcs, const Prefix& prefix,
                        AsNumber self, VerifyCache& verifier);
PathClass classify_path(std::span<const AsNumber> as_path,
                        std::span<const ForwardingCommitment> fcs, const Prefix& prefix,
                        AsNumber self, const TrustBase& trust);

struct RibEntry {
    Prefix prefix;
    std::vector<AsNumber> as_path;          // origin first; empty for a local route
    std::vector<ForwardingCommitment> fcs;  // origin hop first
    std::vector<PathAttribute> attributes;  // as received, FC attribute included
    AsNumber received_from;                 // self for a local route
    PathClass classification = PathClass::kLegacy;
    long installed_at = 0;

    bool is_local() const { return as_path.empty(); }
};

/// Winner maximises (class, -path length, -neighbor ASN). With
/// `use_class == false` (a legacy speaker) the class is ignored.
const RibEntry& select_route(std::span<const RibEntry> candidates, bool use_class = true);

/// Update sent by a deployed `self` to `neighbor`: AS path extended with
/// self, FC list extended with F(prev-of-self, self, neighbor, prefix).
BgpUpdate export_route(const RibEntry& entry, AsNumber neighbor, const Signer& self,
                       FcCache& cache);

/// Business relationship of a neighbor as seen from the local AS.
enum class Relationship : std::uint8_t { kNone, kCustomer, kPeer, kProvider };

const char* to_string(Relationship r);

struct SpeakerConfig {
    bool gao_rexford = false;
    bool export_suspicious = true;
};

struct Outbound {
    AsNumber to;
    BgpUpdate update;
};

/// One per routing decision; rendered as a line-delimited log record.
struct DecisionRecord {
    long time = 0;
    AsNumber as;
    Prefix prefix;
    PathClass classification = PathClass::kLegacy;
    std::string action;
    AsNumber peer;
    std::string detail;

    std::string to_line() const;
};

struct ProcessResult {
    std::optional<RibEntry> stored;
    std::vector<Outbound> exports;
};

/// Single-AS BGP speaker with FC generation and validation. A speaker
/// without a signer behaves as a legacy AS: no validation, FC attribute
/// passed through untouched.
class Speaker {
public:
    Speaker(AsNumber self, const TrustBase& trust, std::optional<Signer> signer,
            SpeakerConfig config = {});

    AsNumber self() const { return self_; }
    bool deployed() const { return signer_.has_value(); }

    void add_neighbor(AsNumber neighbor, Relationship rel = Relationship::kNone);
    const std::map<AsNumber, Relationship>& neighbors() const { return neighbors_; }

    std::vector<Outbound> originate(const Prefix& prefix, long now);
    ProcessResult process_update(AsNumber from, const BgpUpdate& update, long now);
    std::vector<Outbound> process_withdraw(const Prefix& prefix, AsNumber from, long now);
    /// New session: announce every selected route, FC lists included.
    std::vector<Outbound> peer_up(AsNumber neighbor, Relationship rel, long now);

    const RibEntry* best(const Prefix& prefix) const;
    std::vector<RibEntry> candidates(const Prefix& prefix) const;
    std::vector<Prefix> known_prefixes() const;
    const BgpUpdate* last_sent(const Prefix& prefix, AsNumber neighbor) const;

    const std::vector<DecisionRecord>& log() const { return log_; }
    std::vector<DecisionRecord> drain_log();
    const FcCache& fc_cache() const { return fc_cache_; }

private:
    std::vector<Outbound> reselect(const Prefix& prefix, long now);
    std::optional<BgpUpdate> build_export(const RibEntry& best, AsNumber neighbor);
    bool export_allowed(const RibEntry& best, AsNumber neighbor) const;
    void record(long now, const Prefix& p, PathClass c, std::string action, AsNumber peer,
                std::string detail = {});

    AsNumber self_;
    const TrustBase* trust_;
    std::optional<Signer> signer_;
    SpeakerConfig config_;
    VerifyCache verifier_;
    FcCache fc_cache_;
    std::map<AsNumber, Relationship> neighbors_;
    std::map<Prefix, RibEntry> local_routes_;
    std::map<Prefix, std::map<AsNumber, RibEntry>> adj_rib_in_;
    std::map<Prefix, RibEntry> loc_rib_;
    std::map<Prefix, std::map<AsNumber, BgpUpdate>> adj_rib_out_;
    std::vector<DecisionRecord> log_;
};

}  // namespace fcbgp
