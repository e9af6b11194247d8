#include "threepc/client.hpp"

#include <vector>

#include "threepc/potfile.hpp"

namespace threepc {

Message ClientExchange::next()
{
    auto message = receive_message(stream_, max_frame_);
    if (!message)
        throw ConnectionLost("server closed the connection");
    order_.accept(type_of(*message));
    if (auto* error = std::get_if<ErrorReply>(&*message))
        throw RemoteError(*error);
    return std::move(*message);
}

HashInfoAck ClientExchange::hello(const std::string& algo)
{
    order_.accept(MessageType::HashInfoRequest);
    send_message(stream_, HashInfoRequest{algo});
    auto ack = std::get<HashInfoAck>(next());
    if (ack.algo != algo)
        throw ProtocolError(error_code::algo_mismatch, "server acknowledged '" + ack.algo + "' instead of '" + algo + "'");
    return ack;
}

JobDone ClientExchange::submit(const JobSubmit& job, std::size_t digest_nibbles,
                               const std::function<void(std::span<const CandidatePair>)>& sink)
{
    order_.accept(MessageType::JobSubmit);
    send_message(stream_, job);
    std::vector<CandidatePair> batch;
    std::uint64_t received = 0;
    for (;;)
    {
        Message message = next();
        if (auto* done = std::get_if<JobDone>(&message))
        {
            if (done->hit_count != received)
                throw ProtocolError(error_code::malformed_frame, "JobDone reports " + std::to_string(done->hit_count) +
                                                                     " hits but " + std::to_string(received) +
                                                                     " were streamed");
            return *done;
        }
        auto& chunk = std::get<CandidateChunk>(message);
        if (chunk.pairs.size() > kMaxChunkPairs)
            throw ProtocolError(error_code::malformed_frame, "chunk larger than " + std::to_string(kMaxChunkPairs));
        batch.clear();
        for (auto& p : chunk.pairs)
        {
            try
            {
                batch.push_back({std::move(p.password), Digest::from_hex(p.digest_hex, digest_nibbles)});
            }
            catch (const std::invalid_argument& e)
            {
                throw ProtocolError(error_code::malformed_frame, std::string("bad candidate digest: ") + e.what());
            }
        }
        received += batch.size();
        sink(batch);
    }
}

std::filesystem::path partial_path(const std::filesystem::path& potfile)
{
    auto p = potfile;
    p += ".partial";
    return p;
}

JobDone fetch_candidates(ClientExchange& exchange, const Plan& plan, std::size_t digest_nibbles,
                         const std::string& inline_corpus, const std::filesystem::path& potfile)
{
    const auto partial = partial_path(potfile);
    PotfileWriter writer(partial);
    JobSubmit job{plan.algo, plan.vector.to_hex(), plan.keyspace, inline_corpus};
    const JobDone done =
        exchange.submit(job, digest_nibbles, [&](std::span<const CandidatePair> pairs) { writer.append(pairs); });
    writer.close();
    std::filesystem::rename(partial, potfile);
    return done;
}

SessionResult client_session(Stream& stream, const SessionConfig& config)
{
    SessionResult result;
    ClientExchange exchange(stream, config.max_frame);
    result.server_info = exchange.hello(config.request.algo);
    if (result.server_info.digest_nibbles != config.request.target.size())
        throw ProtocolError(error_code::vector_length_mismatch,
                            "server digests have " + std::to_string(result.server_info.digest_nibbles) +
                                " nibbles, target has " + std::to_string(config.request.target.size()));

    result.plan = make_plan(config.request, config.store);
    if (!config.plan_file.empty())
        write_plan(config.plan_file, result.plan);

    result.done = fetch_candidates(exchange, result.plan, result.server_info.digest_nibbles, config.inline_corpus,
                                   config.potfile);

    const auto entries = read_potfile(config.potfile, result.server_info.digest_nibbles);
    result.check = chk_cs(entries, config.request.target, find_algorithm(config.request.algo));
    return result;
}

} // namespace threepc
