#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "threepc/bignum.hpp"

namespace threepc {

class KeyspaceError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

class UnknownCorpus : public KeyspaceError
{
public:
    using KeyspaceError::KeyspaceError;
};

inline constexpr std::size_t kMaxCandidateLength = 256;

namespace charset {
inline constexpr std::string_view lower = "abcdefghijklmnopqrstuvwxyz";
inline constexpr std::string_view upper = "ABCDEFGHIJKLMNOPQRSTUVWXYZ";
inline constexpr std::string_view digits = "0123456789";
/// The 32 printable ASCII specials (space excluded), in ASCII order.
inline constexpr std::string_view specials = "!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~";
} // namespace charset

/// One mask position: the bytes it ranges over, or the word placeholder ?w.
struct MaskToken
{
    std::string chars;
    bool word = false;

    friend bool operator==(const MaskToken&, const MaskToken&) = default;
};

/// Parses ?l ?u ?d ?s ?a ?w, "??" for a literal '?', "[...]" for a union of
/// classes and literals ("?]" is a literal ']' inside a union), and any other
/// byte as a literal.
std::vector<MaskToken> parse_mask(std::string_view tokens);

struct IngestReport
{
    std::uint64_t lines = 0;
    std::uint64_t empty = 0;
    std::uint64_t duplicates = 0;
    std::uint64_t too_long = 0;
};

/// Deduplicated word list. Lines are split on LF with a trailing CR removed;
/// bytes are otherwise kept as-is. First occurrence wins.
class Wordlist
{
public:
    Wordlist() = default;

    static Wordlist from_bytes(std::string_view data);
    /// Throws std::runtime_error if the file cannot be read.
    static Wordlist from_file(const std::filesystem::path& path);

    std::size_t size() const { return offsets_.size() - 1; }
    std::string_view operator[](std::size_t i) const
    {
        return std::string_view(storage_).substr(offsets_[i], offsets_[i + 1] - offsets_[i]);
    }
    const IngestReport& report() const { return report_; }

private:
    std::string storage_;
    std::vector<std::size_t> offsets_{0};
    IngestReport report_;
};

/// Maps a corpus name to a loaded word list. Throws UnknownCorpus.
using CorpusResolver = std::function<std::shared_ptr<const Wordlist>(std::string_view name)>;

/// Resolves names as files directly inside `dir`. The reserved name "inline"
/// maps to `inline_corpus` when one was supplied.
CorpusResolver directory_resolver(std::filesystem::path dir, std::shared_ptr<const Wordlist> inline_corpus = nullptr);

enum class KeyspaceMode
{
    wordlist,
    mask,
    hybrid
};

/// Half-open index range into a keyspace's enumeration order.
struct KeyspaceRange
{
    std::uint64_t begin = 0;
    std::uint64_t end = 0;

    std::uint64_t size() const { return end - begin; }
    friend bool operator==(const KeyspaceRange&, const KeyspaceRange&) = default;
};

class KeyspaceSpec
{
public:
    /// `wordlist:<name>`, `mask:<tokens>` or `hybrid:<name>:<tokens with one ?w>`.
    static KeyspaceSpec parse(std::string_view descriptor, const CorpusResolver& resolver);

    static KeyspaceSpec mask(std::vector<MaskToken> tokens);
    static KeyspaceSpec wordlist(std::shared_ptr<const Wordlist> words, std::string name = "inline");
    static KeyspaceSpec hybrid(std::shared_ptr<const Wordlist> words, std::vector<MaskToken> tokens,
                               std::string name = "inline");

    KeyspaceMode mode() const { return mode_; }
    const std::string& descriptor() const { return descriptor_; }
    const std::vector<MaskToken>& tokens() const { return tokens_; }
    const Wordlist* words() const { return words_.get(); }

    /// Exact |DS|.
    BigInt cardinality() const;
    /// |DS| as a 64-bit count. Throws KeyspaceError if it does not fit.
    std::uint64_t size() const;

    KeyspaceRange whole() const { return {0, size()}; }

private:
    KeyspaceMode mode_ = KeyspaceMode::mask;
    std::string descriptor_;
    std::vector<MaskToken> tokens_;
    std::shared_ptr<const Wordlist> words_;
};

/// Splits the index space into `parts` contiguous, disjoint ranges whose sizes
/// differ by at most one. Throws std::invalid_argument when parts == 0.
std::vector<KeyspaceRange> partition(const KeyspaceSpec& spec, std::size_t parts);

/// Walks a range in enumeration order: word index outermost, then mask
/// positions as an odometer with the rightmost position fastest.
class KeyspaceCursor
{
public:
    KeyspaceCursor(const KeyspaceSpec& spec, KeyspaceRange range);

    /// The view stays valid until the next call.
    bool next(std::string_view& candidate);

private:
    void seek(std::uint64_t index);
    void load_word(std::size_t word_index);

    const KeyspaceSpec* spec_;
    std::uint64_t position_;
    std::uint64_t end_;
    bool started_ = false;

    std::vector<const MaskToken*> positions_; // mask positions, excluding ?w
    std::size_t prefix_count_ = 0;            // mask positions before ?w
    std::vector<std::uint32_t> digits_;
    std::vector<std::size_t> offsets_; // buffer offset of each mask position
    std::size_t word_index_ = 0;
    std::size_t word_count_ = 1;
    std::string buffer_;
};

/// Materializes the whole keyspace; meant for small specs and tests.
std::vector<std::string> enumerate(const KeyspaceSpec& spec);

} // namespace threepc
