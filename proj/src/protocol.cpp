#include "threepc/protocol.hpp"

#include <array>

namespace threepc {
namespace {

class Writer
{
public:
    void u64(std::uint64_t v)
    {
        for (int shift = 56; shift >= 0; shift -= 8)
            out_.push_back(static_cast<char>((v >> shift) & 0xFF));
    }
    void u32(std::uint32_t v)
    {
        for (int shift = 24; shift >= 0; shift -= 8)
            out_.push_back(static_cast<char>((v >> shift) & 0xFF));
    }
    void str(std::string_view s)
    {
        if (s.size() > UINT32_MAX)
            throw std::length_error("string too long for a frame");
        u32(static_cast<std::uint32_t>(s.size()));
        out_.append(s);
    }
    std::string take() { return std::move(out_); }

private:
    std::string out_;
};

class Reader
{
public:
    explicit Reader(std::string_view in)
    : in_{in}
    {
    }

    std::uint64_t u64()
    {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v = (v << 8) | static_cast<std::uint8_t>(in_[pos_ + i]);
        pos_ += 8;
        return v;
    }
    std::uint32_t u32()
    {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v = (v << 8) | static_cast<std::uint8_t>(in_[pos_ + i]);
        pos_ += 4;
        return v;
    }
    std::string str()
    {
        const std::uint32_t n = u32();
        need(n);
        std::string s(in_.substr(pos_, n));
        pos_ += n;
        return s;
    }
    std::size_t remaining() const { return in_.size() - pos_; }
    void finish() const
    {
        if (pos_ != in_.size())
            throw ProtocolError(error_code::malformed_frame, "trailing bytes in payload");
    }

private:
    void need(std::size_t n) const
    {
        if (in_.size() - pos_ < n)
            throw ProtocolError(error_code::malformed_frame, "truncated payload");
    }

    std::string_view in_;
    std::size_t pos_ = 0;
};

void read_exact(Stream& stream, char* data, std::size_t size, bool at_boundary, bool& clean_eof)
{
    std::size_t got = 0;
    while (got < size)
    {
        const std::size_t n = stream.read_some(data + got, size - got);
        if (n == 0)
        {
            if (at_boundary && got == 0)
            {
                clean_eof = true;
                return;
            }
            throw ConnectionLost("connection closed inside a frame");
        }
        got += n;
    }
}

} // namespace

MessageType type_of(const Message& message)
{
    return static_cast<MessageType>(message.index() + 1);
}

std::string_view type_name(MessageType type)
{
    switch (type)
    {
    case MessageType::HashInfoRequest: return "HashInfoRequest";
    case MessageType::HashInfoAck: return "HashInfoAck";
    case MessageType::JobSubmit: return "JobSubmit";
    case MessageType::CandidateChunk: return "CandidateChunk";
    case MessageType::JobDone: return "JobDone";
    case MessageType::ErrorReply: return "ErrorReply";
    }
    return "unknown";
}

std::string encode_payload(const Message& message)
{
    Writer w;
    std::visit(
        [&w](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, HashInfoRequest>)
                w.str(m.algo);
            else if constexpr (std::is_same_v<T, HashInfoAck>)
            {
                w.str(m.algo);
                w.u64(m.digest_nibbles);
                w.u64(m.rate_hps);
            }
            else if constexpr (std::is_same_v<T, JobSubmit>)
            {
                w.str(m.algo);
                w.str(m.vector_hex);
                w.str(m.keyspace);
                w.str(m.inline_corpus);
            }
            else if constexpr (std::is_same_v<T, CandidateChunk>)
            {
                w.u64(m.pairs.size());
                for (const auto& p : m.pairs)
                {
                    w.str(p.digest_hex);
                    w.str(p.password);
                }
            }
            else if constexpr (std::is_same_v<T, JobDone>)
            {
                w.u64(m.hashed_count);
                w.u64(m.hit_count);
                w.u64(m.elapsed_ms);
            }
            else
            {
                w.str(m.code);
                w.str(m.text);
            }
        },
        message);
    return w.take();
}

std::string encode_frame(const Message& message)
{
    const std::string payload = encode_payload(message);
    if (payload.size() > UINT32_MAX)
        throw std::length_error("payload too large for a frame");
    Writer header;
    header.u32(static_cast<std::uint32_t>(payload.size()));
    std::string frame = header.take();
    frame.push_back(static_cast<char>(type_of(message)));
    frame += payload;
    return frame;
}

Message decode_payload(std::uint8_t tag, std::string_view payload)
{
    Reader r(payload);
    Message out;
    switch (static_cast<MessageType>(tag))
    {
    case MessageType::HashInfoRequest:
        out = HashInfoRequest{r.str()};
        break;
    case MessageType::HashInfoAck: {
        HashInfoAck m;
        m.algo = r.str();
        m.digest_nibbles = r.u64();
        m.rate_hps = r.u64();
        out = std::move(m);
        break;
    }
    case MessageType::JobSubmit: {
        JobSubmit m;
        m.algo = r.str();
        m.vector_hex = r.str();
        m.keyspace = r.str();
        m.inline_corpus = r.str();
        out = std::move(m);
        break;
    }
    case MessageType::CandidateChunk: {
        CandidateChunk m;
        const std::uint64_t count = r.u64();
        // each pair needs at least 8 bytes of length prefixes
        if (count > r.remaining() / 8)
            throw ProtocolError(error_code::malformed_frame, "pair count exceeds payload");
        m.pairs.reserve(count);
        for (std::uint64_t i = 0; i < count; ++i)
        {
            WirePair p;
            p.digest_hex = r.str();
            p.password = r.str();
            m.pairs.push_back(std::move(p));
        }
        out = std::move(m);
        break;
    }
    case MessageType::JobDone: {
        JobDone m;
        m.hashed_count = r.u64();
        m.hit_count = r.u64();
        m.elapsed_ms = r.u64();
        out = m;
        break;
    }
    case MessageType::ErrorReply: {
        ErrorReply m;
        m.code = r.str();
        m.text = r.str();
        out = std::move(m);
        break;
    }
    default:
        throw ProtocolError(error_code::malformed_frame, "unknown message type " + std::to_string(tag));
    }
    r.finish();
    return out;
}

void send_message(Stream& stream, const Message& message)
{
    const std::string frame = encode_frame(message);
    stream.write_all(frame.data(), frame.size());
}

std::optional<Message> receive_message(Stream& stream, std::size_t max_frame)
{
    std::array<char, 5> header{};
    bool eof = false;
    read_exact(stream, header.data(), header.size(), true, eof);
    if (eof)
        return std::nullopt;
    std::uint32_t length = 0;
    for (int i = 0; i < 4; ++i)
        length = (length << 8) | static_cast<std::uint8_t>(header[i]);
    if (length > max_frame)
        throw ProtocolError(error_code::frame_too_large,
                            "frame of " + std::to_string(length) + " bytes exceeds " + std::to_string(max_frame));
    std::string payload(length, '\0');
    read_exact(stream, payload.data(), payload.size(), false, eof);
    return decode_payload(static_cast<std::uint8_t>(header[4]), payload);
}

void ExchangeOrder::accept(MessageType type)
{
    if (state_ == State::Failed)
        throw ProtocolError(error_code::protocol_order, "exchange already failed");
    if (type == MessageType::ErrorReply && state_ != State::Done)
    {
        state_ = State::Done;
        return;
    }
    State next = State::Failed;
    switch (state_)
    {
    case State::ExpectRequest:
        if (type == MessageType::HashInfoRequest)
            next = State::ExpectAck;
        break;
    case State::ExpectAck:
        if (type == MessageType::HashInfoAck)
            next = State::ExpectSubmit;
        break;
    case State::ExpectSubmit:
        if (type == MessageType::JobSubmit)
            next = State::Streaming;
        break;
    case State::Streaming:
        if (type == MessageType::CandidateChunk)
            next = State::Streaming;
        else if (type == MessageType::JobDone)
            next = State::Done;
        break;
    case State::Done:
    case State::Failed:
        break;
    }
    if (next == State::Failed)
    {
        const auto current = state_;
        state_ = State::Failed;
        static constexpr std::string_view expected[] = {"HashInfoRequest", "HashInfoAck", "JobSubmit",
                                                        "CandidateChunk or JobDone", "nothing"};
        throw ProtocolError(error_code::protocol_order, std::string(type_name(type)) + " received, expected " +
                                                            std::string(expected[static_cast<int>(current)]));
    }
    state_ = next;
}

} // namespace threepc
