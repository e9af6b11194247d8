#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <istream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "threepc/engine.hpp"

namespace threepc {

/// One `<digest-hex>:<password>` record as read back. The digest is kept as
/// text; nothing in it is trusted until re-hashed.
struct PotfileEntry
{
    std::string digest_hex;
    std::string password;
    std::size_t line = 0;
};

class PotfileError : public std::runtime_error
{
public:
    PotfileError(const std::string& what, std::size_t line)
    : std::runtime_error("potfile line " + std::to_string(line) + ": " + what)
    , line_{line}
    {
    }

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// "<lowercase digest hex>:<password bytes>" without the newline.
std::string format_potfile_line(const CandidatePair& pair);

/// Parses records whose digest field is exactly `digest_nibbles` hex
/// characters. Splits at that fixed width, so passwords may contain ':'.
/// Throws PotfileError with the 1-based line number.
std::vector<PotfileEntry> read_potfile(std::istream& in, std::size_t digest_nibbles);
std::vector<PotfileEntry> read_potfile(const std::filesystem::path& path, std::size_t digest_nibbles);

class PotfileWriter
{
public:
    /// Truncates. Throws std::runtime_error if the file cannot be opened.
    explicit PotfileWriter(const std::filesystem::path& path);

    /// Throws std::runtime_error on write failure.
    void append(std::span<const CandidatePair> pairs);
    void close();

    std::size_t written() const { return written_; }

private:
    std::filesystem::path path_;
    std::ofstream out_;
    std::size_t written_ = 0;
};

} // namespace threepc
