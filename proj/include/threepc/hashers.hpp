#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "threepc/digest.hpp"

namespace threepc {

/// Raw backend entry point. Writes the digest to `out` (room for 32 bytes) and
/// returns the byte count, or 0 if the input cannot be hashed under this scheme.
using HashFunction = std::size_t (*)(std::string_view input, std::uint8_t* out);

struct HashAlgoDescriptor
{
    std::string name;           ///< wire/CLI identifier, lowercase
    std::size_t digest_nibbles; ///< l
    HashFunction hash;
};

class UnknownAlgorithm : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// The input is not representable under the scheme (e.g. invalid UTF-8 for NTLM).
class UnhashableInput : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// Registers a backend; replaces an existing entry of the same name.
void register_algorithm(HashAlgoDescriptor descriptor);

/// Throws UnknownAlgorithm. The reference stays valid for the process lifetime.
const HashAlgoDescriptor& find_algorithm(std::string_view name);
const HashAlgoDescriptor* lookup_algorithm(std::string_view name) noexcept;
std::vector<std::string> algorithm_names();

Digest digest(const HashAlgoDescriptor& algo, std::string_view password);
Digest digest(std::string_view algo_id, std::string_view password);

/// Single-threaded throughput in hashes per second over `sample_budget`
/// synthetic candidates.
double measure_rate(const HashAlgoDescriptor& algo, std::uint64_t sample_budget = 100'000);

namespace hash {

/// Reflected CRC-32 (polynomial 0xEDB88320, init and final XOR 0xFFFFFFFF).
std::uint32_t crc32(std::string_view data);

class Sha256
{
public:
    Sha256();
    Sha256& update(std::string_view data);
    std::array<std::uint8_t, 32> finish();

private:
    void compress(const std::uint8_t* block);

    std::array<std::uint32_t, 8> state_;
    std::array<std::uint8_t, 64> buffer_{};
    std::size_t buffered_ = 0;
    std::uint64_t length_ = 0;
};

std::array<std::uint8_t, 32> sha256(std::string_view data);

class Md4
{
public:
    Md4();
    Md4& update(std::string_view data);
    std::array<std::uint8_t, 16> finish();

private:
    void compress(const std::uint8_t* block);

    std::array<std::uint32_t, 4> state_;
    std::array<std::uint8_t, 64> buffer_{};
    std::size_t buffered_ = 0;
    std::uint64_t length_ = 0;
};

std::array<std::uint8_t, 16> md4(std::string_view data);

/// Strict UTF-8 to UTF-16LE. Returns false on malformed input (overlongs,
/// surrogates, truncated sequences, values above U+10FFFF).
bool utf8_to_utf16le(std::string_view utf8, std::string& out);

/// MD4 over the UTF-16LE encoding. Throws UnhashableInput on invalid UTF-8.
std::array<std::uint8_t, 16> ntlm(std::string_view password);

} // namespace hash
} // namespace threepc
