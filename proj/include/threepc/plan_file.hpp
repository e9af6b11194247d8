#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "threepc/bignum.hpp"
#include "threepc/digest.hpp"
#include "threepc/predicate.hpp"

namespace threepc {

class PlanFileError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Everything the client keeps about one job. The target stays on the client;
/// only `vector` and `keyspace` ever reach the server.
struct Plan
{
    std::string algo;
    Digest target;
    std::string keyspace;
    BigInt keyspace_size;
    Rational r;
    std::optional<Rational> nv_target; ///< absent for hit-mask plans
    double tolerance = 0;
    std::uint64_t seed = 0;
    PredicateVector vector;

    BigInt cardinality() const { return vector.cardinality(); }
    Rational expected_candidates() const;
    Rational deniability() const;
};

/// "key=value" lines. Derived figures (cardinality, expected candidates,
/// deniability) are written for the reader and re-checked on load.
std::string serialize_plan(const Plan& plan);
/// Throws PlanFileError naming the offending key or line.
Plan parse_plan(std::string_view text);

void write_plan(const std::filesystem::path& path, const Plan& plan);
Plan read_plan(const std::filesystem::path& path);

} // namespace threepc

namespace threepc {

class PlanStore;
class Rng;

struct PlanRequest
{
    std::string algo;
    Digest target;
    std::string keyspace;
    BigInt keyspace_size;
    Rational r;
    double tolerance = 0.05;
    std::uint64_t seed = 0;
};

/// CLC-NV then GEN-V. With a store, a second plan for the same target is
/// refused with DuplicatePlan. Smooth-search failures propagate as
/// WidenToleranceError.
Plan make_plan(const PlanRequest& request, PlanStore* store);

} // namespace threepc
