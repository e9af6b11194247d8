#include "threepc/engine.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace threepc {
namespace {

using Clock = std::chrono::steady_clock;

constexpr std::size_t kChunksPerWorker = 16;
constexpr std::size_t kStopCheckInterval = 4096;

void check_lengths(const PredicateVector& vector, const HashAlgoDescriptor& algo)
{
    if (vector.size() != algo.digest_nibbles)
        throw LengthMismatch("vector has " + std::to_string(vector.size()) + " positions but " + algo.name + " digests have "
                             + std::to_string(algo.digest_nibbles) + " nibbles");
}

// Shared progress accounting; the worker whose batch crosses an interval
// boundary reports.
class ProgressMeter
{
public:
    ProgressMeter(const CrackOptions& options, std::uint64_t total, Clock::time_point start)
    : options_{options}
    , total_{total}
    , start_{start}
    {
    }

    void add(std::uint64_t n)
    {
        const std::uint64_t before = hashed_.fetch_add(n, std::memory_order_relaxed);
        if (!options_.on_progress || options_.progress_interval == 0)
            return;
        const std::uint64_t after = before + n;
        if (after / options_.progress_interval == before / options_.progress_interval)
            return;
        std::lock_guard lock(mutex_);
        const std::chrono::duration<double> elapsed = Clock::now() - start_;
        CrackProgress p;
        p.hashed = after;
        p.total = total_;
        p.rate = elapsed.count() > 0 ? after / elapsed.count() : 0;
        p.eta_seconds = p.rate > 0 ? (total_ - std::min(after, total_)) / p.rate : 0;
        options_.on_progress(p);
    }

    std::uint64_t hashed() const { return hashed_.load(); }

private:
    const CrackOptions& options_;
    std::uint64_t total_;
    Clock::time_point start_;
    std::atomic<std::uint64_t> hashed_{0};
    std::mutex mutex_;
};

struct RangeResult
{
    std::vector<CandidatePair> hits;
    std::uint64_t unhashable = 0;
    bool complete = false;
};

void scan_range(const PredicateVector& vector, const KeyspaceSpec& spec, const HashAlgoDescriptor& algo,
                KeyspaceRange range, const std::stop_token& stop, const std::atomic<bool>& abort,
                ProgressMeter& meter, RangeResult& result)
{
    KeyspaceCursor cursor(spec, range);
    std::string_view candidate;
    std::uint8_t out[32];
    const HashFunction hash = algo.hash;
    for (;;)
    {
        std::size_t n = 0;
        bool more = true;
        for (; n < kStopCheckInterval; ++n)
        {
            if (!cursor.next(candidate))
            {
                more = false;
                break;
            }
            const std::size_t len = hash(candidate, out);
            if (len == 0)
            {
                ++result.unhashable;
                continue;
            }
            if (vector.contains_bytes({out, len}))
                result.hits.push_back({std::string(candidate), Digest::from_bytes({out, len})});
        }
        meter.add(n);
        if (!more)
        {
            result.complete = true;
            return;
        }
        if (stop.stop_requested() || abort.load(std::memory_order_relaxed))
            return;
    }
}

void deliver(const CandidateSink& sink, std::span<const CandidatePair> pairs)
{
    for (std::size_t i = 0; i < pairs.size(); i += kSinkBatch)
        sink(pairs.subspan(i, std::min(kSinkBatch, pairs.size() - i)));
}

CrackReport finish_report(std::uint64_t hashed, std::uint64_t hits, std::uint64_t unhashable, Clock::time_point start,
                          bool partial)
{
    CrackReport report;
    report.hashed_count = hashed;
    report.hit_count = hits;
    report.unhashable_count = unhashable;
    report.elapsed_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    report.rate = report.elapsed_seconds > 0 ? hashed / report.elapsed_seconds : 0;
    report.partial = partial;
    return report;
}

} // namespace

CrackReport crack(const PredicateVector& vector, const KeyspaceSpec& spec, const HashAlgoDescriptor& algo,
                  const CandidateSink& sink, const CrackOptions& options)
{
    return crack_parallel(vector, spec, algo, sink, 1, options);
}

CrackReport crack_parallel(const PredicateVector& vector, const KeyspaceSpec& spec, const HashAlgoDescriptor& algo,
                           const CandidateSink& sink, std::size_t n_workers, const CrackOptions& options)
{
    if (n_workers == 0)
        throw std::invalid_argument("worker count must be positive");
    check_lengths(vector, algo);

    const auto start = Clock::now();
    const std::uint64_t total = spec.size();
    const auto chunks = partition(spec, std::max<std::size_t>(1, n_workers * kChunksPerWorker));
    ProgressMeter meter(options, total, start);

    std::vector<RangeResult> results(chunks.size());
    std::vector<bool> done(chunks.size(), false);
    std::atomic<std::size_t> next_chunk{0};
    std::atomic<bool> abort{false};
    std::mutex commit_mutex;
    std::size_t next_commit = 0;
    std::uint64_t delivered = 0;
    std::uint64_t unhashable = 0;
    std::exception_ptr sink_error;

    // Delivers every finished chunk at the head of the queue, in order.
    const auto commit_ready = [&] {
        while (next_commit < chunks.size() && done[next_commit])
        {
            auto& r = results[next_commit];
            if (!sink_error)
            {
                try
                {
                    deliver(sink, r.hits);
                    delivered += r.hits.size();
                }
                catch (...)
                {
                    sink_error = std::current_exception();
                    abort = true;
                }
            }
            unhashable += r.unhashable;
            r.hits.clear();
            r.hits.shrink_to_fit();
            ++next_commit;
        }
    };

    const auto work = [&] {
        for (;;)
        {
            const std::size_t k = next_chunk.fetch_add(1);
            if (k >= chunks.size())
                return;
            if (options.stop.stop_requested() || abort.load())
                return;
            scan_range(vector, spec, algo, chunks[k], options.stop, abort, meter, results[k]);
            std::lock_guard lock(commit_mutex);
            done[k] = true;
            if (results[k].complete)
                commit_ready();
            else
                return; // interrupted; the tail is flushed after join
        }
    };

    if (n_workers == 1)
        work();
    else
    {
        std::vector<std::jthread> workers;
        workers.reserve(n_workers);
        for (std::size_t w = 0; w < n_workers; ++w)
            workers.emplace_back(work);
    }

    const bool complete =
        std::all_of(results.begin(), results.end(), [](const RangeResult& r) { return r.complete; });
    if (next_commit < chunks.size())
    {
        // Cancelled or aborted: flush whatever was scanned, still in chunk order.
        for (std::size_t k = next_commit; k < chunks.size(); ++k)
            done[k] = true;
        commit_ready();
    }
    if (sink_error)
    {
        const auto report = finish_report(meter.hashed(), delivered, unhashable, start, true);
        try
        {
            std::rethrow_exception(sink_error);
        }
        catch (const std::exception& e)
        {
            throw CrackAborted(std::string("candidate sink failed: ") + e.what(), report);
        }
        catch (...)
        {
            throw CrackAborted("candidate sink failed", report);
        }
    }
    return finish_report(meter.hashed(), delivered, unhashable, start, !complete);
}

} // namespace threepc
