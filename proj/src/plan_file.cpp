#include "threepc/plan_file.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "threepc/planner.hpp"

namespace threepc {
namespace {

std::string rational_text(const Rational& value)
{
    const BigInt num = boost::multiprecision::numerator(value);
    const BigInt den = boost::multiprecision::denominator(value);
    if (den == 1)
        return to_decimal(num);
    return to_decimal(num) + "/" + to_decimal(den);
}

Rational parse_rational(std::string_view text)
{
    const auto slash = text.find('/');
    if (slash == std::string_view::npos)
        return parse_decimal(text);
    const BigInt den = parse_bigint(text.substr(slash + 1));
    if (den == 0)
        throw std::invalid_argument("zero denominator");
    return Rational(parse_bigint(text.substr(0, slash)), den);
}

} // namespace

Rational Plan::expected_candidates() const
{
    return threepc::expected_candidates(vector, keyspace_size);
}

Rational Plan::deniability() const
{
    return threepc::deniability(vector);
}

std::string serialize_plan(const Plan& plan)
{
    std::ostringstream out;
    out << "threepc-plan=1\n";
    out << "algo=" << plan.algo << '\n';
    out << "target=" << plan.target.hex() << '\n';
    out << "keyspace=" << plan.keyspace << '\n';
    out << "keyspace_size=" << to_decimal(plan.keyspace_size) << '\n';
    out << "r=" << rational_text(plan.r) << '\n';
    if (plan.nv_target)
    {
        out << "nv_target=" << rational_text(*plan.nv_target) << '\n';
        out << "nv_target_approx=" << format_real(*plan.nv_target) << '\n';
    }
    out << "tolerance=" << format_real(parse_decimal(std::to_string(plan.tolerance))) << '\n';
    out << "seed=" << plan.seed << '\n';
    out << "vector=" << plan.vector.to_hex() << '\n';
    out << "cardinality=" << to_decimal(plan.cardinality()) << '\n';
    out << "expected_candidates=" << format_real(plan.expected_candidates()) << '\n';
    out << "deniability=" << format_real(plan.deniability()) << '\n';
    return out.str();
}

Plan parse_plan(std::string_view text)
{
    std::map<std::string, std::string, std::less<>> fields;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size())
    {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos)
            end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        if (line.empty() || line.front() == '#')
            continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw PlanFileError("plan line " + std::to_string(line_no) + ": expected key=value");
        fields.emplace(std::string(line.substr(0, eq)), std::string(line.substr(eq + 1)));
    }

    const auto need = [&](std::string_view key) -> const std::string& {
        const auto it = fields.find(key);
        if (it == fields.end())
            throw PlanFileError("plan is missing '" + std::string(key) + "'");
        return it->second;
    };

    Plan plan;
    std::string key;
    try
    {
        key = "algo";
        plan.algo = need(key);
        key = "target";
        plan.target = Digest::from_hex(need(key));
        key = "keyspace";
        plan.keyspace = need(key);
        key = "keyspace_size";
        plan.keyspace_size = parse_bigint(need(key));
        key = "r";
        plan.r = parse_rational(need(key));
        key = "nv_target";
        if (fields.count(key))
            plan.nv_target = parse_rational(fields.find(key)->second);
        key = "tolerance";
        plan.tolerance = to_double(parse_decimal(need(key)));
        key = "seed";
        plan.seed = std::stoull(need(key));
        key = "vector";
        plan.vector = PredicateVector::parse(need(key));
    }
    catch (const PlanFileError&)
    {
        throw;
    }
    catch (const std::exception& e)
    {
        throw PlanFileError("plan field '" + key + "': " + e.what());
    }

    if (plan.vector.size() != plan.target.size())
        throw PlanFileError("plan vector length does not match the target digest");
    if (!plan.vector.contains(plan.target))
        throw PlanFileError("plan vector does not contain the target");
    if (const auto it = fields.find("cardinality"); it != fields.end() && it->second != to_decimal(plan.cardinality()))
        throw PlanFileError("plan cardinality disagrees with its vector");
    return plan;
}

void write_plan(const std::filesystem::path& path, const Plan& plan)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw PlanFileError("cannot write plan " + path.string());
    out << serialize_plan(plan);
    if (!out.flush())
        throw PlanFileError("cannot write plan " + path.string());
}

Plan read_plan(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw PlanFileError("cannot read plan " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_plan(buffer.str());
}

} // namespace threepc

namespace threepc {

Plan make_plan(const PlanRequest& request, PlanStore* store)
{
    const std::size_t length = request.target.size();
    const PlanParameters params = plan_nv(request.keyspace_size, request.r, length);
    if (store && store->contains(request.algo, request.target))
        throw DuplicatePlan("a vector already exists for " + request.algo + " target " + request.target.hex());
    // more candidates than r even from a singleton set: the singleton is the best available
    const Rational search_target = params.nv_target < 1 ? Rational(1) : params.nv_target;
    const SmoothChoice choice = smooth_search(search_target, length, request.tolerance);

    Plan plan;
    plan.algo = request.algo;
    plan.target = request.target;
    plan.keyspace = request.keyspace;
    plan.keyspace_size = request.keyspace_size;
    plan.r = request.r;
    plan.nv_target = params.nv_target;
    plan.tolerance = request.tolerance;
    plan.seed = request.seed;
    Rng rng(request.seed);
    plan.vector = store ? store->generate(request.algo, request.target, choice.packing, rng)
                        : gen_v(request.target, choice.packing, rng);
    return plan;
}

} // namespace threepc
