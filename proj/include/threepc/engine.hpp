#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <stop_token>
#include <string>

#include "threepc/digest.hpp"
#include "threepc/hashers.hpp"
#include "threepc/keyspace.hpp"
#include "threepc/predicate.hpp"

namespace threepc {

struct CandidatePair
{
    std::string password;
    Digest digest;

    friend bool operator==(const CandidatePair&, const CandidatePair&) = default;
};

struct CrackReport
{
    std::uint64_t hashed_count = 0;     ///< candidates processed, including unhashable ones
    std::uint64_t hit_count = 0;        ///< pairs delivered to the sink
    std::uint64_t unhashable_count = 0; ///< e.g. invalid UTF-8 under NTLM; skipped
    double elapsed_seconds = 0;
    double rate = 0; ///< hashed_count / elapsed_seconds
    bool partial = false;
};

struct CrackProgress
{
    std::uint64_t hashed = 0;
    std::uint64_t total = 0;
    double rate = 0;
    double eta_seconds = 0;
};

/// Receives batches of at most kSinkBatch pairs, never concurrently. Throwing
/// aborts the crack.
using CandidateSink = std::function<void(std::span<const CandidatePair>)>;

inline constexpr std::size_t kSinkBatch = 4096;

struct CrackOptions
{
    std::stop_token stop;
    std::function<void(const CrackProgress&)> on_progress;
    std::uint64_t progress_interval = 10'000'000;
};

/// The sink failed; carries the counts reached before the abort.
class CrackAborted : public std::runtime_error
{
public:
    CrackAborted(const std::string& what, CrackReport partial)
    : std::runtime_error(what)
    , partial_{partial}
    {
    }

    const CrackReport& partial() const { return partial_; }

private:
    CrackReport partial_;
};

/// Hashes every candidate of `spec` once and hands the sink each pair whose
/// digest satisfies `vector`, in enumeration order. On stop request the report
/// is marked partial; pairs already delivered remain valid.
/// Throws LengthMismatch if the vector does not fit the algorithm.
CrackReport crack(const PredicateVector& vector, const KeyspaceSpec& spec, const HashAlgoDescriptor& algo,
                  const CandidateSink& sink, const CrackOptions& options = {});

/// Parallel form over n_workers threads and n_workers * 16 chunks. Chunk
/// results are committed in chunk order, so the pair sequence equals crack().
CrackReport crack_parallel(const PredicateVector& vector, const KeyspaceSpec& spec, const HashAlgoDescriptor& algo,
                           const CandidateSink& sink, std::size_t n_workers, const CrackOptions& options = {});

} // namespace threepc
