#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace threepc {

inline constexpr std::size_t kDefaultMaxFrame = 64u << 20;
inline constexpr std::size_t kMaxInlineCorpus = 256u << 20;
inline constexpr std::size_t kMaxChunkPairs = 4096;

namespace error_code {
inline constexpr std::string_view frame_too_large = "frame-too-large";
inline constexpr std::string_view malformed_frame = "malformed-frame";
inline constexpr std::string_view protocol_order = "protocol-order";
inline constexpr std::string_view unknown_algo = "unknown-algo";
inline constexpr std::string_view algo_mismatch = "algo-mismatch";
inline constexpr std::string_view bad_vector = "bad-vector";
inline constexpr std::string_view vector_length_mismatch = "vector-length-mismatch";
inline constexpr std::string_view bad_keyspace = "bad-keyspace";
inline constexpr std::string_view unknown_corpus = "unknown-corpus";
inline constexpr std::string_view corpus_too_large = "corpus-too-large";
inline constexpr std::string_view internal = "internal";
} // namespace error_code

enum class MessageType : std::uint8_t
{
    HashInfoRequest = 1,
    HashInfoAck = 2,
    JobSubmit = 3,
    CandidateChunk = 4,
    JobDone = 5,
    ErrorReply = 6,
};

struct HashInfoRequest
{
    std::string algo;
    friend bool operator==(const HashInfoRequest&, const HashInfoRequest&) = default;
};

struct HashInfoAck
{
    std::string algo;
    std::uint64_t digest_nibbles = 0;
    std::uint64_t rate_hps = 0;
    friend bool operator==(const HashInfoAck&, const HashInfoAck&) = default;
};

struct JobSubmit
{
    std::string algo;
    std::string vector_hex;
    std::string keyspace;
    std::string inline_corpus; ///< empty: none uploaded
    friend bool operator==(const JobSubmit&, const JobSubmit&) = default;
};

struct WirePair
{
    std::string digest_hex;
    std::string password;
    friend bool operator==(const WirePair&, const WirePair&) = default;
};

struct CandidateChunk
{
    std::vector<WirePair> pairs;
    friend bool operator==(const CandidateChunk&, const CandidateChunk&) = default;
};

struct JobDone
{
    std::uint64_t hashed_count = 0;
    std::uint64_t hit_count = 0;
    std::uint64_t elapsed_ms = 0;
    friend bool operator==(const JobDone&, const JobDone&) = default;
};

struct ErrorReply
{
    std::string code;
    std::string text;
    friend bool operator==(const ErrorReply&, const ErrorReply&) = default;
};

using Message = std::variant<HashInfoRequest, HashInfoAck, JobSubmit, CandidateChunk, JobDone, ErrorReply>;

MessageType type_of(const Message& message);
std::string_view type_name(MessageType type);

/// A protocol violation; `code` is one of error_code.
class ProtocolError : public std::runtime_error
{
public:
    ProtocolError(std::string_view code, const std::string& text)
    : std::runtime_error(std::string(code) + ": " + text)
    , code_{code}
    {
    }

    const std::string& code() const { return code_; }

private:
    std::string code_;
};

/// The peer went away mid-exchange.
class ConnectionLost : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// The peer answered with an ErrorReply.
class RemoteError : public std::runtime_error
{
public:
    explicit RemoteError(ErrorReply reply)
    : std::runtime_error("server error " + reply.code + ": " + reply.text)
    , reply_{std::move(reply)}
    {
    }

    const ErrorReply& reply() const { return reply_; }

private:
    ErrorReply reply_;
};

std::string encode_payload(const Message& message);
/// Whole frame: 4-byte big-endian payload length, type tag, payload.
std::string encode_frame(const Message& message);
/// Throws ProtocolError(malformed-frame) for unknown tags, truncated or
/// trailing bytes.
Message decode_payload(std::uint8_t tag, std::string_view payload);

/// Reliable ordered byte stream.
class Stream
{
public:
    virtual ~Stream() = default;
    /// Throws ConnectionLost.
    virtual void write_all(const void* data, std::size_t size) = 0;
    /// Returns 0 at end of stream. Throws ConnectionLost on errors.
    virtual std::size_t read_some(void* data, std::size_t size) = 0;
    virtual void close() {}
};

void send_message(Stream& stream, const Message& message);

/// nullopt on a clean end of stream at a frame boundary. Throws
/// ProtocolError(frame-too-large) without consuming the oversized payload,
/// ConnectionLost if the stream ends inside a frame.
std::optional<Message> receive_message(Stream& stream, std::size_t max_frame = kDefaultMaxFrame);

/// Tracks one connection's exchange:
/// REQ-H, ACK-H, SND-P, zero or more chunks, JobDone. An ErrorReply from the
/// server ends the exchange at any point.
class ExchangeOrder
{
public:
    /// Throws ProtocolError(protocol-order) and stays failed afterwards.
    void accept(MessageType type);
    bool finished() const { return state_ == State::Done; }

private:
    enum class State
    {
        ExpectRequest,
        ExpectAck,
        ExpectSubmit,
        Streaming,
        Done,
        Failed,
    };
    State state_ = State::ExpectRequest;
};

} // namespace threepc
