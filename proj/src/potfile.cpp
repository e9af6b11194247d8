#include "threepc/potfile.hpp"

#include <iterator>

namespace threepc {

std::string format_potfile_line(const CandidatePair& pair)
{
    std::string line = pair.digest.hex();
    line += ':';
    line += pair.password;
    return line;
}

std::vector<PotfileEntry> read_potfile(std::istream& in, std::size_t digest_nibbles)
{
    const std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad())
        throw std::runtime_error("error reading potfile");
    std::vector<PotfileEntry> entries;
    std::size_t start = 0;
    std::size_t line_no = 0;
    while (start < data.size())
    {
        auto end = data.find('\n', start);
        if (end == std::string::npos)
            end = data.size();
        const std::string_view line(data.data() + start, end - start);
        start = end + 1;
        ++line_no;
        if (line.size() < digest_nibbles + 1 || line[digest_nibbles] != ':')
            throw PotfileError("expected " + std::to_string(digest_nibbles) + " hex characters followed by ':'", line_no);
        for (std::size_t i = 0; i < digest_nibbles; ++i)
            if (hex_value(line[i]) < 0)
                throw PotfileError("invalid hex character in digest field", line_no);
        entries.push_back(
            {std::string(line.substr(0, digest_nibbles)), std::string(line.substr(digest_nibbles + 1)), line_no});
    }
    return entries;
}

std::vector<PotfileEntry> read_potfile(const std::filesystem::path& path, std::size_t digest_nibbles)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open potfile " + path.string());
    return read_potfile(in, digest_nibbles);
}

PotfileWriter::PotfileWriter(const std::filesystem::path& path)
: path_{path}
, out_{path, std::ios::binary | std::ios::trunc}
{
    if (!out_)
        throw std::runtime_error("cannot open potfile " + path.string() + " for writing");
}

void PotfileWriter::append(std::span<const CandidatePair> pairs)
{
    std::string block;
    for (const auto& p : pairs)
    {
        block += format_potfile_line(p);
        block += '\n';
    }
    out_.write(block.data(), static_cast<std::streamsize>(block.size()));
    if (!out_)
        throw std::runtime_error("write to potfile " + path_.string() + " failed");
    written_ += pairs.size();
}

void PotfileWriter::close()
{
    out_.flush();
    if (!out_)
        throw std::runtime_error("flush of potfile " + path_.string() + " failed");
    out_.close();
}

} // namespace threepc
