#include "threepc/server.hpp"

#include <chrono>
#include <cmath>

#include "threepc/engine.hpp"
#include "threepc/hashers.hpp"
#include "threepc/keyspace.hpp"
#include "threepc/predicate.hpp"

namespace threepc {
namespace {

void reply_error(Stream& stream, std::string_view code, const std::string& text)
{
    try
    {
        send_message(stream, ErrorReply{std::string(code), text});
    }
    catch (const ConnectionLost&)
    {
    }
}

template <typename T>
const T* expect(const std::optional<Message>& message, ExchangeOrder& order)
{
    if (!message)
        throw ConnectionLost("client closed the connection");
    order.accept(type_of(*message));
    const T* m = std::get_if<T>(&*message);
    if (!m)
        throw ConnectionLost("client abandoned the exchange");
    return m;
}

// Lets the peer read our ErrorReply before the socket closes; closing with
// unread input would reset the connection and could discard the reply.
void drain(Stream& stream)
{
    char buffer[65536];
    try
    {
        while (stream.read_some(buffer, sizeof buffer) > 0)
        {
        }
    }
    catch (const ConnectionLost&)
    {
    }
}

} // namespace

ServerContext::ServerContext(ServerOptions options)
: options_{std::move(options)}
{
}

std::uint64_t ServerContext::rate_for(const std::string& algo)
{
    std::lock_guard lock(mutex_);
    if (const auto it = rates_.find(algo); it != rates_.end())
        return it->second;
    const double rate = measure_rate(find_algorithm(algo)) * static_cast<double>(std::max<std::size_t>(options_.workers, 1));
    const auto value = static_cast<std::uint64_t>(std::llround(rate));
    rates_.emplace(algo, value);
    return value;
}

void handle_connection(Stream& stream, ServerContext& context, std::stop_token stop)
{
    const auto& options = context.options();
    ExchangeOrder order;
    try
    {
        const auto* request = expect<HashInfoRequest>(receive_message(stream, options.max_frame), order);
        const HashAlgoDescriptor* algo = lookup_algorithm(request->algo);
        if (!algo)
        {
            reply_error(stream, error_code::unknown_algo, "unknown algorithm '" + request->algo + "'");
            return;
        }
        HashInfoAck ack{algo->name, algo->digest_nibbles, context.rate_for(algo->name)};
        send_message(stream, ack);
        order.accept(MessageType::HashInfoAck);

        const auto submitted = receive_message(stream, options.max_frame);
        const auto* job = expect<JobSubmit>(submitted, order);
        if (job->algo != algo->name)
        {
            reply_error(stream, error_code::algo_mismatch,
                        "job algorithm '" + job->algo + "' differs from requested '" + algo->name + "'");
            return;
        }
        PredicateVector vector;
        try
        {
            vector = PredicateVector::parse(job->vector_hex);
        }
        catch (const std::exception& e)
        {
            reply_error(stream, error_code::bad_vector, e.what());
            return;
        }
        if (vector.size() != algo->digest_nibbles)
        {
            reply_error(stream, error_code::vector_length_mismatch,
                        "vector has " + std::to_string(vector.size()) + " positions, " + algo->name + " digests have " +
                            std::to_string(algo->digest_nibbles));
            return;
        }
        if (job->inline_corpus.size() > kMaxInlineCorpus)
        {
            reply_error(stream, error_code::corpus_too_large, "inline corpus exceeds 256 MiB");
            return;
        }

        std::optional<KeyspaceSpec> spec;
        try
        {
            std::shared_ptr<const Wordlist> uploaded;
            if (!job->inline_corpus.empty())
                uploaded = std::make_shared<const Wordlist>(Wordlist::from_bytes(job->inline_corpus));
            spec = KeyspaceSpec::parse(job->keyspace, directory_resolver(options.corpus_dir, uploaded));
            (void)spec->size();
        }
        catch (const UnknownCorpus& e)
        {
            reply_error(stream, error_code::unknown_corpus, e.what());
            return;
        }
        catch (const KeyspaceError& e)
        {
            reply_error(stream, error_code::bad_keyspace, e.what());
            return;
        }

        CandidateChunk chunk;
        const CandidateSink sink = [&](std::span<const CandidatePair> pairs) {
            for (const auto& p : pairs)
            {
                chunk.pairs.push_back({p.digest.hex(), p.password});
                if (chunk.pairs.size() == kMaxChunkPairs)
                {
                    send_message(stream, chunk);
                    chunk.pairs.clear();
                }
            }
            if (!chunk.pairs.empty())
            {
                send_message(stream, chunk);
                chunk.pairs.clear();
            }
        };
        CrackOptions crack_options;
        crack_options.stop = stop;
        const CrackReport report = crack_parallel(vector, *spec, *algo, sink, options.workers, crack_options);
        if (report.partial)
            return; // shutting down: the client sees the connection drop without JobDone
        send_message(stream, JobDone{report.hashed_count, report.hit_count,
                                     static_cast<std::uint64_t>(std::llround(report.elapsed_seconds * 1000))});
    }
    catch (const ProtocolError& e)
    {
        reply_error(stream, e.code(), e.what());
        if (e.code() == error_code::frame_too_large)
            drain(stream);
    }
    catch (const ConnectionLost&)
    {
    }
    catch (const CrackAborted&)
    {
    }
    catch (const std::exception& e)
    {
        reply_error(stream, error_code::internal, e.what());
    }
}

Server::Server(ServerOptions options)
: context_{std::move(options)}
, listener_{context_.options().listen}
{
}

Server::~Server()
{
    stop();
}

void Server::reap()
{
    for (auto it = connections_.begin(); it != connections_.end();)
    {
        if (it->done)
        {
            it->thread.join();
            it = connections_.erase(it);
        }
        else
            ++it;
    }
}

void Server::run()
{
    while (auto stream = listener_.accept())
    {
        std::lock_guard lock(mutex_);
        if (stopping_)
            break;
        reap();
        auto& conn = connections_.emplace_back();
        conn.stream = std::move(stream);
        conn.thread = std::jthread([this, &conn](std::stop_token stop) {
            handle_connection(*conn.stream, context_, stop);
            conn.stream->close();
            std::lock_guard done_lock(mutex_);
            conn.done = true;
        });
    }
}

void Server::start()
{
    runner_ = std::jthread([this] { run(); });
}

void Server::stop()
{
    {
        std::lock_guard lock(mutex_);
        if (stopping_)
            return;
        stopping_ = true;
    }
    listener_.close();
    if (runner_.joinable())
        runner_.join();
    std::list<Connection> remaining;
    {
        std::lock_guard lock(mutex_);
        for (auto& conn : connections_)
        {
            conn.thread.request_stop();
            conn.stream->close();
        }
        remaining.splice(remaining.end(), connections_);
    }
    for (auto& conn : remaining)
        if (conn.thread.joinable())
            conn.thread.join();
}

} // namespace threepc
