#include "threepc/keyspace.hpp"

#include <fstream>
#include <iterator>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <unordered_set>

namespace threepc {
namespace {

std::string class_chars(char name)
{
    switch (name)
    {
    case 'l':
        return std::string(charset::lower);
    case 'u':
        return std::string(charset::upper);
    case 'd':
        return std::string(charset::digits);
    case 's':
        return std::string(charset::specials);
    case 'a':
        return std::string(charset::lower) + std::string(charset::upper) + std::string(charset::digits)
               + std::string(charset::specials);
    default:
        throw KeyspaceError(std::string("unknown mask class ?") + name);
    }
}

void append_unique(std::string& set, std::string_view chars)
{
    for (char c : chars)
        if (set.find(c) == std::string::npos)
            set.push_back(c);
}

} // namespace

std::vector<MaskToken> parse_mask(std::string_view text)
{
    if (text.find('\n') != std::string_view::npos)
        throw KeyspaceError("mask may not contain a newline byte");
    std::vector<MaskToken> tokens;
    std::size_t i = 0;
    while (i < text.size())
    {
        const char c = text[i];
        if (c == '?')
        {
            if (i + 1 >= text.size())
                throw KeyspaceError("dangling '?' at end of mask");
            const char name = text[i + 1];
            i += 2;
            if (name == '?')
                tokens.push_back({"?", false});
            else if (name == 'w')
                tokens.push_back({"", true});
            else
                tokens.push_back({class_chars(name), false});
        }
        else if (c == '[')
        {
            std::string chars;
            std::size_t k = i + 1;
            bool closed = false;
            while (k < text.size())
            {
                if (text[k] == ']')
                {
                    closed = true;
                    break;
                }
                if (text[k] == '?')
                {
                    if (k + 1 >= text.size())
                        throw KeyspaceError("dangling '?' inside '[...]'");
                    const char name = text[k + 1];
                    if (name == 'w')
                        throw KeyspaceError("?w cannot appear inside '[...]'");
                    if (name == '?' || name == ']')
                        append_unique(chars, std::string(1, name));
                    else
                        append_unique(chars, class_chars(name));
                    k += 2;
                }
                else
                    append_unique(chars, text.substr(k++, 1));
            }
            if (!closed)
                throw KeyspaceError("unterminated '[' in mask");
            if (chars.empty())
                throw KeyspaceError("empty '[]' in mask");
            tokens.push_back({std::move(chars), false});
            i = k + 1;
        }
        else
        {
            tokens.push_back({std::string(1, c), false});
            ++i;
        }
    }
    if (tokens.empty())
        throw KeyspaceError("empty mask");
    if (tokens.size() > kMaxCandidateLength)
        throw KeyspaceError("mask longer than " + std::to_string(kMaxCandidateLength) + " positions");
    return tokens;
}

Wordlist Wordlist::from_bytes(std::string_view data)
{
    Wordlist list;
    list.storage_.reserve(data.size());
    std::unordered_set<std::string_view> seen;
    // views point into `data`, which outlives this function's dedup pass
    std::vector<std::string_view> kept;
    std::size_t start = 0;
    while (start < data.size())
    {
        auto end = data.find('\n', start);
        if (end == std::string_view::npos)
            end = data.size();
        auto line = data.substr(start, end - start);
        start = end + 1;
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        ++list.report_.lines;
        if (line.empty())
        {
            ++list.report_.empty;
            continue;
        }
        if (line.size() > kMaxCandidateLength)
        {
            ++list.report_.too_long;
            continue;
        }
        if (!seen.insert(line).second)
        {
            ++list.report_.duplicates;
            continue;
        }
        kept.push_back(line);
    }
    list.offsets_.reserve(kept.size() + 1);
    for (auto w : kept)
    {
        list.storage_.append(w);
        list.offsets_.push_back(list.storage_.size());
    }
    return list;
}

Wordlist Wordlist::from_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open corpus " + path.string());
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad())
        throw std::runtime_error("error reading corpus " + path.string());
    return from_bytes(data);
}

CorpusResolver directory_resolver(std::filesystem::path dir, std::shared_ptr<const Wordlist> inline_corpus)
{
    struct Cache
    {
        std::mutex mutex;
        std::map<std::string, std::shared_ptr<const Wordlist>, std::less<>> loaded;
    };
    auto cache = std::make_shared<Cache>();
    return [dir = std::move(dir), inline_corpus = std::move(inline_corpus),
            cache](std::string_view name) -> std::shared_ptr<const Wordlist> {
        if (name == "inline")
        {
            if (!inline_corpus)
                throw UnknownCorpus("descriptor refers to an inline corpus but none was supplied");
            return inline_corpus;
        }
        if (name.empty() || name == "." || name == ".." || name.find('/') != std::string_view::npos
            || name.find('\\') != std::string_view::npos)
            throw UnknownCorpus("invalid corpus name '" + std::string(name) + "'");
        std::lock_guard lock(cache->mutex);
        if (auto it = cache->loaded.find(name); it != cache->loaded.end())
            return it->second;
        const auto path = dir / std::string(name);
        if (dir.empty() || !std::filesystem::is_regular_file(path))
            throw UnknownCorpus("unknown corpus '" + std::string(name) + "'");
        auto words = std::make_shared<const Wordlist>(Wordlist::from_file(path));
        cache->loaded.emplace(std::string(name), words);
        return words;
    };
}

KeyspaceSpec KeyspaceSpec::parse(std::string_view descriptor, const CorpusResolver& resolver)
{
    const auto colon = descriptor.find(':');
    if (colon == std::string_view::npos)
        throw KeyspaceError("keyspace descriptor needs a mode prefix: '" + std::string(descriptor) + "'");
    const auto mode = descriptor.substr(0, colon);
    const auto rest = descriptor.substr(colon + 1);

    if (mode == "mask")
    {
        auto spec = KeyspaceSpec::mask(parse_mask(rest));
        spec.descriptor_ = std::string(descriptor);
        return spec;
    }
    if (mode == "wordlist")
    {
        if (!resolver)
            throw UnknownCorpus("no corpus resolver available");
        return KeyspaceSpec::wordlist(resolver(rest), std::string(rest));
    }
    if (mode == "hybrid")
    {
        const auto sep = rest.find(':');
        if (sep == std::string_view::npos)
            throw KeyspaceError("hybrid descriptor must be hybrid:<name>:<tokens>");
        if (!resolver)
            throw UnknownCorpus("no corpus resolver available");
        const auto name = rest.substr(0, sep);
        auto spec = KeyspaceSpec::hybrid(resolver(name), parse_mask(rest.substr(sep + 1)), std::string(name));
        spec.descriptor_ = std::string(descriptor);
        return spec;
    }
    throw KeyspaceError("unknown keyspace mode '" + std::string(mode) + "'");
}

namespace {

std::string render_tokens(const std::vector<MaskToken>& tokens)
{
    std::string out;
    for (const auto& t : tokens)
    {
        if (t.word)
        {
            out += "?w";
            continue;
        }
        bool named = false;
        for (char name : {'l', 'u', 'd', 's', 'a'})
            if (t.chars == class_chars(name))
            {
                out += '?';
                out += name;
                named = true;
                break;
            }
        if (named)
            continue;
        if (t.chars == "?")
            out += "??";
        else if (t.chars.size() == 1 && t.chars != "[")
            out += t.chars;
        else
        {
            out += '[';
            for (char c : t.chars)
            {
                if (c == '?' || c == ']')
                    out += '?';
                out += c;
            }
            out += ']';
        }
    }
    return out;
}

} // namespace

KeyspaceSpec KeyspaceSpec::mask(std::vector<MaskToken> tokens)
{
    if (tokens.empty())
        throw KeyspaceError("empty mask");
    for (const auto& t : tokens)
    {
        if (t.word)
            throw KeyspaceError("?w is only valid in hybrid mode");
        if (t.chars.empty())
            throw KeyspaceError("mask position with no characters");
    }
    KeyspaceSpec spec;
    spec.mode_ = KeyspaceMode::mask;
    spec.descriptor_ = "mask:" + render_tokens(tokens);
    spec.tokens_ = std::move(tokens);
    return spec;
}

KeyspaceSpec KeyspaceSpec::wordlist(std::shared_ptr<const Wordlist> words, std::string name)
{
    if (!words)
        throw KeyspaceError("null word list");
    KeyspaceSpec spec;
    spec.mode_ = KeyspaceMode::wordlist;
    spec.descriptor_ = "wordlist:" + name;
    spec.words_ = std::move(words);
    spec.tokens_ = {MaskToken{"", true}};
    return spec;
}

KeyspaceSpec KeyspaceSpec::hybrid(std::shared_ptr<const Wordlist> words, std::vector<MaskToken> tokens,
                                  std::string name)
{
    if (!words)
        throw KeyspaceError("null word list");
    std::size_t word_tokens = 0;
    for (const auto& t : tokens)
    {
        if (t.word)
            ++word_tokens;
        else if (t.chars.empty())
            throw KeyspaceError("mask position with no characters");
    }
    if (word_tokens != 1)
        throw KeyspaceError("hybrid mask must contain exactly one ?w");
    KeyspaceSpec spec;
    spec.mode_ = KeyspaceMode::hybrid;
    spec.descriptor_ = "hybrid:" + name + ":" + render_tokens(tokens);
    spec.words_ = std::move(words);
    spec.tokens_ = std::move(tokens);
    return spec;
}

BigInt KeyspaceSpec::cardinality() const
{
    BigInt n = words_ ? BigInt(words_->size()) : BigInt(1);
    for (const auto& t : tokens_)
        if (!t.word)
            n *= t.chars.size();
    return n;
}

std::uint64_t KeyspaceSpec::size() const
{
    const BigInt n = cardinality();
    if (n > std::numeric_limits<std::uint64_t>::max())
        throw KeyspaceError("keyspace of " + n.str() + " candidates exceeds the 64-bit enumeration index");
    return n.convert_to<std::uint64_t>();
}

std::vector<KeyspaceRange> partition(const KeyspaceSpec& spec, std::size_t parts)
{
    if (parts == 0)
        throw std::invalid_argument("partition count must be positive");
    const std::uint64_t total = spec.size();
    std::vector<KeyspaceRange> ranges;
    ranges.reserve(parts);
    const std::uint64_t base = total / parts;
    const std::uint64_t extra = total % parts;
    std::uint64_t begin = 0;
    for (std::size_t k = 0; k < parts; ++k)
    {
        const std::uint64_t len = base + (k < extra ? 1 : 0);
        ranges.push_back({begin, begin + len});
        begin += len;
    }
    return ranges;
}

KeyspaceCursor::KeyspaceCursor(const KeyspaceSpec& spec, KeyspaceRange range)
: spec_{&spec}
, position_{range.begin}
, end_{range.end}
{
    if (range.end < range.begin || range.end > spec.size())
        throw std::out_of_range("cursor range outside keyspace");
    bool seen_word = false;
    for (const auto& t : spec.tokens())
    {
        if (t.word)
        {
            seen_word = true;
            continue;
        }
        positions_.push_back(&t);
        if (!seen_word)
            ++prefix_count_;
    }
    if (spec.words())
        word_count_ = spec.words()->size();
    digits_.assign(positions_.size(), 0);
    offsets_.assign(positions_.size(), 0);
}

void KeyspaceCursor::load_word(std::size_t word_index)
{
    word_index_ = word_index;
    const std::string_view word = spec_->words() ? (*spec_->words())[word_index] : std::string_view{};
    buffer_.assign(positions_.size() + word.size(), '\0');
    for (std::size_t j = 0; j < positions_.size(); ++j)
    {
        offsets_[j] = j < prefix_count_ ? j : j + word.size();
        buffer_[offsets_[j]] = positions_[j]->chars[digits_[j]];
    }
    buffer_.replace(prefix_count_, word.size(), word);
}

void KeyspaceCursor::seek(std::uint64_t index)
{
    std::uint64_t per_word = 1;
    for (const auto* p : positions_)
        per_word *= p->chars.size();
    std::uint64_t rem = index % per_word;
    for (std::size_t j = positions_.size(); j-- > 0;)
    {
        const auto radix = positions_[j]->chars.size();
        digits_[j] = static_cast<std::uint32_t>(rem % radix);
        rem /= radix;
    }
    load_word(static_cast<std::size_t>(index / per_word));
}

bool KeyspaceCursor::next(std::string_view& candidate)
{
    if (position_ >= end_)
        return false;
    if (!started_)
    {
        seek(position_);
        started_ = true;
    }
    else
    {
        std::size_t j = positions_.size();
        while (j > 0)
        {
            --j;
            if (++digits_[j] < positions_[j]->chars.size())
            {
                buffer_[offsets_[j]] = positions_[j]->chars[digits_[j]];
                break;
            }
            digits_[j] = 0;
            buffer_[offsets_[j]] = positions_[j]->chars[0];
            if (j == 0)
            {
                j = positions_.size() + 1; // sentinel: odometer wrapped
                break;
            }
        }
        if (positions_.empty() || j == positions_.size() + 1)
            load_word(word_index_ + 1);
    }
    ++position_;
    candidate = buffer_;
    return true;
}

std::vector<std::string> enumerate(const KeyspaceSpec& spec)
{
    std::vector<std::string> out;
    KeyspaceCursor cursor(spec, spec.whole());
    std::string_view c;
    while (cursor.next(c))
        out.emplace_back(c);
    return out;
}

} // namespace threepc
