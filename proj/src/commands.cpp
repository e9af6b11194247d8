#include "threepc/commands.hpp"

#include <algorithm>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <optional>
#include <random>
#include <sstream>
#include <system_error>
#include <thread>

#include <pthread.h>

#include "CLI11.hpp"

#include "threepc/client.hpp"
#include "threepc/engine.hpp"
#include "threepc/hashers.hpp"
#include "threepc/keyspace.hpp"
#include "threepc/net.hpp"
#include "threepc/plan_file.hpp"
#include "threepc/planner.hpp"
#include "threepc/potfile.hpp"
#include "threepc/server.hpp"
#include "threepc/verifier.hpp"

namespace threepc {
namespace {

class CommandFailure : public std::runtime_error
{
public:
    CommandFailure(int code, const std::string& what)
    : std::runtime_error(what)
    , code_{code}
    {
    }

    int code() const { return code_; }

private:
    int code_;
};

[[noreturn]] void fail(int code, const std::string& message)
{
    throw CommandFailure(code, message);
}

std::string env_corpus_dir()
{
    const char* value = std::getenv("THREEPC_CORPUS_DIR");
    return value ? value : "";
}

std::uint64_t fresh_seed()
{
    std::random_device device;
    return (static_cast<std::uint64_t>(device()) << 32) ^ device();
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(exit_code::parse, "cannot read " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

const HashAlgoDescriptor& algorithm_or_fail(const std::string& name)
{
    const auto* algo = lookup_algorithm(name);
    if (!algo)
    {
        std::string known;
        for (const auto& n : algorithm_names())
            known += (known.empty() ? "" : ", ") + n;
        fail(exit_code::usage, "unknown algorithm '" + name + "' (known: " + known + ")");
    }
    return *algo;
}

Digest target_or_fail(const std::string& hex, const HashAlgoDescriptor& algo)
{
    try
    {
        return Digest::from_hex(hex, algo.digest_nibbles);
    }
    catch (const std::exception& e)
    {
        fail(exit_code::usage, "bad --target: " + std::string(e.what()));
    }
}

Rational rational_or_fail(const std::string& text, const std::string& flag)
{
    try
    {
        return parse_decimal(text);
    }
    catch (const std::exception& e)
    {
        fail(exit_code::usage, "bad " + flag + ": " + e.what());
    }
}

/// Where candidate passwords come from, as seen by this process.
struct CorpusOptions
{
    std::string corpus_dir = env_corpus_dir();
    std::string inline_file;

    void add_to(CLI::App& cmd)
    {
        cmd.add_option("--corpus-dir", corpus_dir, "Directory of named word lists (default $THREEPC_CORPUS_DIR)");
        cmd.add_option("--inline-corpus", inline_file, "Word list uploaded with the job, named 'inline' in descriptors");
    }

    std::string inline_bytes() const { return inline_file.empty() ? std::string() : read_file(inline_file); }

    KeyspaceSpec resolve(const std::string& descriptor, const std::string& inline_data) const
    {
        std::shared_ptr<const Wordlist> uploaded;
        if (!inline_data.empty())
            uploaded = std::make_shared<const Wordlist>(Wordlist::from_bytes(inline_data));
        try
        {
            return KeyspaceSpec::parse(descriptor, directory_resolver(corpus_dir, uploaded));
        }
        catch (const UnknownCorpus& e)
        {
            fail(exit_code::usage, std::string(e.what()) +
                                       " (set --corpus-dir, or give --keyspace-size for corpora only the server holds)");
        }
        catch (const KeyspaceError& e)
        {
            fail(exit_code::usage, "bad --keyspace: " + std::string(e.what()));
        }
        catch (const std::runtime_error& e)
        {
            fail(exit_code::parse, e.what());
        }
    }
};

BigInt keyspace_size_of(const CorpusOptions& corpus, const std::string& descriptor, const std::string& size_override,
                        const std::string& inline_data)
{
    if (!size_override.empty())
    {
        try
        {
            return parse_bigint(size_override);
        }
        catch (const std::exception& e)
        {
            fail(exit_code::usage, "bad --keyspace-size: " + std::string(e.what()));
        }
    }
    return corpus.resolve(descriptor, inline_data).cardinality();
}

std::filesystem::path store_index(const std::string& store_dir, const std::string& plan_out)
{
    std::filesystem::path dir = store_dir;
    if (dir.empty())
    {
        dir = std::filesystem::path(plan_out).parent_path();
        if (dir.empty())
            dir = ".";
    }
    return dir / "threepc-plans.idx";
}

void print_plan(std::ostream& out, const Plan& plan)
{
    out << "algo: " << plan.algo << '\n';
    out << "keyspace: " << plan.keyspace << '\n';
    out << "keyspace_size: " << to_decimal(plan.keyspace_size) << '\n';
    if (plan.nv_target)
        out << "nv_target: " << format_real(*plan.nv_target) << '\n';
    out << "vector: " << plan.vector.to_hex() << '\n';
    out << "cardinality: " << to_decimal(plan.cardinality()) << '\n';
    if (plan.nv_target)
        out << "relative_error: " << format_real(Rational(plan.cardinality()) / *plan.nv_target - 1, 6) << '\n';
    out << "expected_candidates: " << format_real(plan.expected_candidates()) << '\n';
    out << "deniability: " << format_real(plan.deniability()) << '\n';
    out << "seed: " << plan.seed << '\n';
}

void print_report(std::ostream& out, std::uint64_t hashed, std::uint64_t hits, double elapsed, bool partial,
                  std::uint64_t seed, const std::filesystem::path& potfile)
{
    out << "hashed_count: " << hashed << '\n';
    out << "hit_count: " << hits << '\n';
    out << "elapsed_seconds: " << std::fixed << std::setprecision(3) << elapsed << '\n';
    out << "rate: " << std::setprecision(0) << (elapsed > 0 ? static_cast<double>(hashed) / elapsed : 0.0) << '\n';
    out.unsetf(std::ios::floatfield);
    out << std::setprecision(6);
    out << "partial: " << (partial ? "yes" : "no") << '\n';
    out << "seed: " << seed << '\n';
    out << "potfile: " << potfile.string() << '\n';
}

/// Runs `body`, mapping every library exception onto the exit-code contract.
template <typename Body>
int guarded(std::ostream& err, Body&& body)
{
    try
    {
        return body();
    }
    catch (const CommandFailure& e)
    {
        err << "error: " << e.what() << '\n';
        return e.code();
    }
    catch (const WidenToleranceError& e)
    {
        err << "error: " << e.what() << '\n';
        return exit_code::plan_refused;
    }
    catch (const DuplicatePlan& e)
    {
        err << "error: " << e.what() << '\n';
        return exit_code::plan_refused;
    }
    catch (const PlanFileError& e)
    {
        err << "error: " << e.what() << '\n';
        return exit_code::parse;
    }
    catch (const PotfileError& e)
    {
        err << "error: " << e.what() << '\n';
        return exit_code::parse;
    }
    catch (const RemoteError& e)
    {
        err << "error: " << e.what() << '\n';
        return exit_code::server_error;
    }
    catch (const ProtocolError& e)
    {
        err << "error: protocol violation " << e.what() << '\n';
        return exit_code::protocol;
    }
    catch (const ConnectionLost& e)
    {
        err << "error: " << e.what() << '\n';
        return exit_code::connection;
    }
    catch (const std::exception& e)
    {
        err << "error: " << e.what() << '\n';
        return exit_code::usage;
    }
}

int verify_files(const Plan& plan, const std::filesystem::path& potfile, double z_threshold, std::size_t sample,
                 std::optional<std::uint64_t> seed, std::ostream& out)
{
    const auto& algo = algorithm_or_fail(plan.algo);
    std::vector<PotfileEntry> entries;
    try
    {
        entries = read_potfile(potfile, algo.digest_nibbles);
    }
    catch (const PotfileError&)
    {
        throw;
    }
    catch (const std::exception& e)
    {
        fail(exit_code::parse, e.what());
    }
    VerifyOptions options;
    options.z_threshold = z_threshold;
    options.sample_size = sample;
    options.seed = seed ? *seed : fresh_seed();
    const auto verdict = verify(entries, plan.target, plan.vector, algo, plan.keyspace_size, options);
    out << format_verdict(verdict);
    return verdict.exit_code();
}

int run_client(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Privacy-preserving password cracking client"};
    app.name("threepc-client");
    app.require_subcommand(1);

    std::string algo_name, target_hex, keyspace, r_text, out_path, keyspace_size, store_dir;
    double tolerance = kDefaultTolerance;
    std::optional<std::uint64_t> seed;
    CorpusOptions corpus;

    auto* plan_cmd = app.add_subcommand("plan", "Compute N_v, search a smooth cardinality and write a plan");
    plan_cmd->add_option("--algo", algo_name, "Hash algorithm")->required();
    plan_cmd->add_option("--target", target_hex, "Target digest (hex)")->required();
    plan_cmd->add_option("--keyspace", keyspace, "Keyspace descriptor")->required();
    plan_cmd->add_option("--r", r_text, "Expected number of candidates")->required();
    plan_cmd->add_option("--tolerance", tolerance, "Accepted relative error of |X| against N_v")
        ->check(CLI::Range(0.0, 0.999999));
    plan_cmd->add_option("--seed", seed, "Seed for vector placement");
    plan_cmd->add_option("--keyspace-size", keyspace_size, "Size of the keyspace when the corpus is not local");
    plan_cmd->add_option("--plan-store", store_dir, "Directory remembering planned targets (default: plan directory)");
    plan_cmd->add_option("--out", out_path, "Plan file to write")->required();
    corpus.add_to(*plan_cmd);

    std::string nv_text, hit_mask;
    auto* genv_cmd = app.add_subcommand("genv", "Write a plan for a given N_v or hit mask");
    genv_cmd->add_option("--algo", algo_name, "Hash algorithm")->required();
    genv_cmd->add_option("--target", target_hex, "Target digest (hex)")->required();
    genv_cmd->add_option("--keyspace", keyspace, "Keyspace descriptor")->required();
    auto* nv_opt = genv_cmd->add_option("--nv", nv_text, "Decoy set size to aim for");
    auto* mask_opt = genv_cmd->add_option("--hit-mask", hit_mask, "Byte mask, bit n from the right keeps byte n");
    nv_opt->excludes(mask_opt);
    genv_cmd->add_option("--tolerance", tolerance, "Accepted relative error of |X| against N_v")
        ->check(CLI::Range(0.0, 0.999999));
    genv_cmd->add_option("--seed", seed, "Seed for vector placement");
    genv_cmd->add_option("--keyspace-size", keyspace_size, "Size of the keyspace when the corpus is not local");
    genv_cmd->add_option("--plan-store", store_dir, "Directory remembering planned targets (default: plan directory)");
    genv_cmd->add_option("--out", out_path, "Plan file to write")->required();
    corpus.add_to(*genv_cmd);

    std::string vector_hex;
    auto* hitmask_cmd = app.add_subcommand("hitmask", "Express a byte-granular vector as template plus hit mask");
    hitmask_cmd->add_option("--vector", vector_hex, "Predicate vector (hex)")->required();

    std::string plan_path, server_text;
    bool offline = false;
    std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
    std::size_t max_frame = kDefaultMaxFrame;
    auto* run_cmd = app.add_subcommand("run", "Crack the decoy set of a plan and write the candidate set");
    run_cmd->add_option("--plan", plan_path, "Plan file")->required();
    run_cmd->add_option("--out", out_path, "Potfile to write")->required();
    auto* server_opt = run_cmd->add_option("--server", server_text, "Server endpoint host:port");
    auto* offline_opt = run_cmd->add_flag("--offline", offline, "Run the engine in this process");
    server_opt->excludes(offline_opt);
    run_cmd->add_option("--workers", workers, "Engine threads for --offline")->check(CLI::PositiveNumber);
    run_cmd->add_option("--max-frame", max_frame, "Largest frame accepted from the server");
    corpus.add_to(*run_cmd);

    std::string potfile_path;
    double z_threshold = kDefaultZThreshold;
    std::size_t sample = kDefaultSpotCheckSample;
    auto* verify_cmd = app.add_subcommand("verify", "Check a candidate set against its plan");
    verify_cmd->add_option("--plan", plan_path, "Plan file")->required();
    verify_cmd->add_option("--potfile", potfile_path, "Potfile returned by the server")->required();
    verify_cmd->add_option("--z-threshold", z_threshold, "Accepted deviation of the hit count in standard deviations")
        ->check(CLI::PositiveNumber);
    verify_cmd->add_option("--sample", sample, "Pairs re-hashed by the spot-check")->check(CLI::PositiveNumber);
    verify_cmd->add_option("--seed", seed, "Seed for the spot-check sample");

    std::string plan_out;
    auto* session_cmd = app.add_subcommand("session", "Plan, crack remotely and verify in one connection");
    session_cmd->add_option("--algo", algo_name, "Hash algorithm")->required();
    session_cmd->add_option("--target", target_hex, "Target digest (hex)")->required();
    session_cmd->add_option("--keyspace", keyspace, "Keyspace descriptor")->required();
    session_cmd->add_option("--r", r_text, "Expected number of candidates")->required();
    session_cmd->add_option("--server", server_text, "Server endpoint host:port")->required();
    session_cmd->add_option("--out", out_path, "Potfile to write")->required();
    session_cmd->add_option("--plan-out", plan_out, "Plan file to write (default: <out>.plan)");
    session_cmd->add_option("--tolerance", tolerance, "Accepted relative error of |X| against N_v")
        ->check(CLI::Range(0.0, 0.999999));
    session_cmd->add_option("--z-threshold", z_threshold, "Accepted deviation of the hit count in standard deviations")
        ->check(CLI::PositiveNumber);
    session_cmd->add_option("--sample", sample, "Pairs re-hashed by the spot-check")->check(CLI::PositiveNumber);
    session_cmd->add_option("--seed", seed, "Seed for vector placement and spot-check");
    session_cmd->add_option("--keyspace-size", keyspace_size, "Size of the keyspace when the corpus is not local");
    session_cmd->add_option("--plan-store", store_dir, "Directory remembering planned targets (default: plan directory)");
    session_cmd->add_option("--max-frame", max_frame, "Largest frame accepted from the server");
    corpus.add_to(*session_cmd);

    try
    {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    }
    catch (const CLI::ParseError& e)
    {
        const int rc = app.exit(e, out, err);
        return rc == 0 ? exit_code::ok : exit_code::usage;
    }

    return guarded(err, [&]() -> int {
        if (*plan_cmd)
        {
            const auto& algo = algorithm_or_fail(algo_name);
            const std::string inline_data = corpus.inline_bytes();
            PlanRequest request{algo.name,
                                target_or_fail(target_hex, algo),
                                keyspace,
                                keyspace_size_of(corpus, keyspace, keyspace_size, inline_data),
                                rational_or_fail(r_text, "--r"),
                                tolerance,
                                seed ? *seed : fresh_seed()};
            PlanStore store(store_index(store_dir, out_path));
            const Plan plan = make_plan(request, &store);
            write_plan(out_path, plan);
            print_plan(out, plan);
            return exit_code::ok;
        }
        if (*genv_cmd)
        {
            const auto& algo = algorithm_or_fail(algo_name);
            if (nv_text.empty() == hit_mask.empty())
                fail(exit_code::usage, "genv needs exactly one of --nv or --hit-mask");
            const std::string inline_data = corpus.inline_bytes();
            Plan plan;
            plan.algo = algo.name;
            plan.target = target_or_fail(target_hex, algo);
            plan.keyspace = keyspace;
            plan.keyspace_size = keyspace_size_of(corpus, keyspace, keyspace_size, inline_data);
            plan.tolerance = tolerance;
            plan.seed = seed ? *seed : fresh_seed();
            PlanStore store(store_index(store_dir, out_path));
            if (!hit_mask.empty())
            {
                try
                {
                    plan.vector = from_hit_mask(plan.target, hit_mask);
                }
                catch (const std::invalid_argument& e)
                {
                    fail(exit_code::usage, "bad --hit-mask: " + std::string(e.what()));
                }
                store.record(plan.algo, plan.target);
            }
            else
            {
                const Rational nv = rational_or_fail(nv_text, "--nv");
                if (nv < 1)
                    fail(exit_code::usage, "--nv must be at least 1");
                if (store.contains(plan.algo, plan.target))
                    throw DuplicatePlan("a vector already exists for " + plan.algo + " target " + plan.target.hex());
                const SmoothChoice choice = smooth_search(nv, plan.target.size(), tolerance);
                plan.nv_target = nv;
                Rng rng(plan.seed);
                plan.vector = store.generate(plan.algo, plan.target, choice.packing, rng);
            }
            plan.r = plan.expected_candidates();
            write_plan(out_path, plan);
            print_plan(out, plan);
            return exit_code::ok;
        }
        if (*hitmask_cmd)
        {
            PredicateVector vector;
            try
            {
                vector = PredicateVector::parse(vector_hex);
            }
            catch (const std::exception& e)
            {
                fail(exit_code::usage, "bad --vector: " + std::string(e.what()));
            }
            const HitMask mask = to_hit_mask(vector);
            out << "template: " << mask.masked.hex() << '\n';
            out << "mask: " << mask.mask_hex() << '\n';
            return exit_code::ok;
        }
        if (*run_cmd)
        {
            if (offline == !server_text.empty())
                fail(exit_code::usage, "run needs exactly one of --offline or --server");
            const Plan plan = read_plan(plan_path);
            const auto& algo = algorithm_or_fail(plan.algo);
            const std::string inline_data = corpus.inline_bytes();
            const std::filesystem::path potfile = out_path;
            if (offline)
            {
                const KeyspaceSpec spec = corpus.resolve(plan.keyspace, inline_data);
                if (spec.cardinality() != plan.keyspace_size)
                    err << "warning: keyspace has " << to_decimal(spec.cardinality()) << " candidates, plan assumed "
                        << to_decimal(plan.keyspace_size) << '\n';
                (void)spec.size();
                const auto partial = partial_path(potfile);
                PotfileWriter writer(partial);
                const CrackReport report = crack_parallel(
                    plan.vector, spec, algo, [&](std::span<const CandidatePair> pairs) { writer.append(pairs); },
                    workers);
                writer.close();
                std::filesystem::rename(partial, potfile);
                print_report(out, report.hashed_count, report.hit_count, report.elapsed_seconds, report.partial,
                             plan.seed, potfile);
                return exit_code::ok;
            }
            Endpoint endpoint;
            try
            {
                endpoint = parse_endpoint(server_text);
            }
            catch (const std::exception& e)
            {
                fail(exit_code::usage, "bad --server: " + std::string(e.what()));
            }
            auto stream = connect_tcp(endpoint);
            ClientExchange exchange(*stream, max_frame);
            const HashInfoAck ack = exchange.hello(plan.algo);
            if (ack.digest_nibbles != plan.vector.size())
                throw ProtocolError(error_code::vector_length_mismatch, "server digest length differs from the plan");
            const JobDone done = fetch_candidates(exchange, plan, ack.digest_nibbles, inline_data, potfile);
            if (BigInt(done.hashed_count) != plan.keyspace_size)
                err << "warning: server hashed " << done.hashed_count << " candidates, plan assumed "
                    << to_decimal(plan.keyspace_size) << '\n';
            print_report(out, done.hashed_count, done.hit_count, static_cast<double>(done.elapsed_ms) / 1000, false,
                         plan.seed, potfile);
            return exit_code::ok;
        }
        if (*verify_cmd)
        {
            const Plan plan = read_plan(plan_path);
            return verify_files(plan, potfile_path, z_threshold, sample, seed, out);
        }
        if (*session_cmd)
        {
            const auto& algo = algorithm_or_fail(algo_name);
            const std::string inline_data = corpus.inline_bytes();
            SessionConfig config;
            config.request = PlanRequest{algo.name,
                                         target_or_fail(target_hex, algo),
                                         keyspace,
                                         keyspace_size_of(corpus, keyspace, keyspace_size, inline_data),
                                         rational_or_fail(r_text, "--r"),
                                         tolerance,
                                         seed ? *seed : fresh_seed()};
            config.inline_corpus = inline_data;
            config.potfile = out_path;
            config.plan_file = plan_out.empty() ? out_path + ".plan" : plan_out;
            config.max_frame = max_frame;
            PlanStore store(store_index(store_dir, config.plan_file.string()));
            config.store = &store;
            Endpoint endpoint;
            try
            {
                endpoint = parse_endpoint(server_text);
            }
            catch (const std::exception& e)
            {
                fail(exit_code::usage, "bad --server: " + std::string(e.what()));
            }
            auto stream = connect_tcp(endpoint);
            const SessionResult result = client_session(*stream, config);
            stream->close();
            out << "server_rate: " << result.server_info.rate_hps << '\n';
            print_plan(out, result.plan);
            print_report(out, result.done.hashed_count, result.done.hit_count,
                         static_cast<double>(result.done.elapsed_ms) / 1000, false, result.plan.seed, config.potfile);
            return verify_files(result.plan, config.potfile, z_threshold, sample, config.request.seed, out);
        }
        return exit_code::usage;
    });
}

} // namespace

int client_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    return run_client(args, out, err);
}

int server_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Privacy-preserving password cracking server"};
    app.name("threepc-server");
    std::string listen_text = "127.0.0.1:7373";
    std::string corpus_dir = env_corpus_dir();
    std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
    std::size_t max_frame = kDefaultMaxFrame;
    app.add_option("--listen", listen_text, "Endpoint to listen on, host:port (port 0 picks one)");
    app.add_option("--corpus-dir", corpus_dir, "Directory of named word lists (default $THREEPC_CORPUS_DIR)");
    app.add_option("--workers", workers, "Engine threads per job")->check(CLI::PositiveNumber);
    app.add_option("--max-frame", max_frame, "Largest frame accepted from a client")->check(CLI::PositiveNumber);
    try
    {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    }
    catch (const CLI::ParseError& e)
    {
        const int rc = app.exit(e, out, err);
        return rc == 0 ? exit_code::ok : exit_code::usage;
    }

    ServerOptions options;
    try
    {
        options.listen = parse_endpoint(listen_text);
    }
    catch (const std::exception& e)
    {
        err << "error: bad --listen: " << e.what() << '\n';
        return exit_code::usage;
    }
    if (!corpus_dir.empty() && !std::filesystem::is_directory(corpus_dir))
    {
        err << "error: corpus directory " << corpus_dir << " does not exist\n";
        return exit_code::usage;
    }
    options.corpus_dir = corpus_dir;
    options.workers = workers;
    options.max_frame = max_frame;

    // handled synchronously below; blocked before any thread starts so all inherit the mask
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    std::optional<Server> server;
    try
    {
        server.emplace(options);
    }
    catch (const std::system_error& e)
    {
        err << "error: " << e.what() << '\n';
        return exit_code::usage;
    }
    out << "listening on " << options.listen.host << ':' << server->port() << std::endl;
    server->start();
    int received = 0;
    sigwait(&signals, &received);
    server->stop();
    return exit_code::ok;
}

} // namespace threepc
