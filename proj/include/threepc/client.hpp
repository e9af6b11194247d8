#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <span>
#include <string>

#include "threepc/engine.hpp"
#include "threepc/plan_file.hpp"
#include "threepc/planner.hpp"
#include "threepc/protocol.hpp"
#include "threepc/verifier.hpp"

namespace threepc {

/// Client half of one connection, enforcing the message order.
class ClientExchange
{
public:
    explicit ClientExchange(Stream& stream, std::size_t max_frame = kDefaultMaxFrame)
    : stream_{stream}
    , max_frame_{max_frame}
    {
    }

    /// REQ-H / ACK-H. Throws RemoteError, ProtocolError, ConnectionLost.
    HashInfoAck hello(const std::string& algo);

    /// SND-P, then collects SND-CS until JobDone. Pairs are checked for
    /// digest width and hex before reaching the sink.
    JobDone submit(const JobSubmit& job, std::size_t digest_nibbles,
                   const std::function<void(std::span<const CandidatePair>)>& sink);

private:
    Message next();

    Stream& stream_;
    std::size_t max_frame_;
    ExchangeOrder order_;
};

/// `<potfile>.partial`, where candidates land until JobDone arrives.
std::filesystem::path partial_path(const std::filesystem::path& potfile);

/// Submits `plan` and streams the candidate set to the partial potfile,
/// renaming it to `potfile` on JobDone. On connection loss the partial file
/// stays behind and the exception propagates.
JobDone fetch_candidates(ClientExchange& exchange, const Plan& plan, std::size_t digest_nibbles,
                         const std::string& inline_corpus, const std::filesystem::path& potfile);

struct SessionConfig
{
    PlanRequest request;
    std::string inline_corpus;
    std::filesystem::path potfile;
    std::filesystem::path plan_file; ///< empty: not written
    PlanStore* store = nullptr;
    std::size_t max_frame = kDefaultMaxFrame;
};

struct SessionResult
{
    HashInfoAck server_info;
    Plan plan;
    JobDone done;
    CheckResult check;
};

/// The whole client side: REQ-H, ACK-H, CLC-NV, GEN-V, SND-P, collect, CHK-CS.
/// The target never leaves the client.
SessionResult client_session(Stream& stream, const SessionConfig& config);

} // namespace threepc
