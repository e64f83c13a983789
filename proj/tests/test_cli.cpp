#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "fcarena/callspec.hpp"
#include "fcarena/cli.hpp"
#include "fcarena/corpus.hpp"
#include "fixtures.hpp"

using namespace fcarena;
using callspec::json;

namespace {

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& name) {
        path = std::filesystem::temp_directory_path() /
               ("fcarena-cli-" + std::to_string(getpid()) + "-" + name);
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
};

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::filesystem::path write_seeds(const TempDir& dir) {
    auto path = dir.path / "seeds.jsonl";
    std::vector<corpus::SeedRecord> seeds{
        fixtures::timer_seed(), fixtures::weather_seed(),
        fixtures::parallel_seed(), fixtures::refusal_seed()};
    corpus::save_seed_dataset(path, seeds);
    return path;
}

std::filesystem::path write_config(const TempDir& dir, json overrides) {
    json config{
        {"version", 1},
        {"seed_path", (dir.path / "seeds.jsonl").string()},
        {"rounds", 1},
        {"batch_size", 2},
        {"max_timesteps", 2},
        {"eval_trials", 8},
        {"rng_seed", 7},
        {"defender",
         {{"mode", "simulated"},
          {"failure_prob", {{"UnitShift", 0.9}, {"ImplicitParam", 0.2}}},
          {"base_failure", 0.05},
          {"rng_seed", 11}}},
    };
    config.update(overrides);
    auto path = dir.path / "config.json";
    std::ofstream out(path);
    out << config.dump(2) << "\n";
    return path;
}

}  // namespace

TEST_CASE("validate subcommand") {
    TempDir dir("validate");
    auto seeds_path = write_seeds(dir);

    SUBCASE("a valid dataset passes") {
        std::ostringstream out, err;
        int code = cli::cmd_validate(seeds_path.string(), {}, out, err);
        CHECK(code == cli::kExitOk);
        CHECK(out.str().find("timer-1: ok") != std::string::npos);
        CHECK(out.str().find("4 record(s) valid") != std::string::npos);
        CHECK(err.str().empty());
    }

    SUBCASE("quiet mode suppresses the listing") {
        std::ostringstream out, err;
        cli::CommonOptions options;
        options.quiet = true;
        CHECK(cli::cmd_validate(seeds_path.string(), options, out, err) ==
              cli::kExitOk);
        CHECK(out.str().empty());
    }

    SUBCASE("a missing file fails validation") {
        std::ostringstream out, err;
        int code = cli::cmd_validate((dir.path / "absent.jsonl").string(), {},
                                     out, err);
        CHECK(code == cli::kExitInvalid);
        CHECK(err.str().find("error:") != std::string::npos);
    }

    SUBCASE("a broken line fails validation") {
        auto broken = dir.path / "broken.jsonl";
        std::ofstream file(broken);
        file << "{not json\n";
        file.close();
        std::ostringstream out, err;
        CHECK(cli::cmd_validate(broken.string(), {}, out, err) ==
              cli::kExitInvalid);
    }

    SUBCASE("an empty file warns but passes") {
        auto empty = dir.path / "empty.jsonl";
        std::ofstream(empty).close();
        std::ostringstream out, err;
        CHECK(cli::cmd_validate(empty.string(), {}, out, err) == cli::kExitOk);
        CHECK(err.str().find("is empty") != std::string::npos);
    }
}

TEST_CASE("run subcommand") {
    TempDir dir("run");
    write_seeds(dir);

    SUBCASE("a small run succeeds and persists its outputs") {
        auto config_path = write_config(dir, json::object());
        auto out_dir = dir.path / "out";
        cli::CommonOptions options;
        options.out_dir = out_dir.string();
        std::ostringstream out, err;
        int code = cli::cmd_run(config_path.string(), options, out, err);
        CHECK(code == cli::kExitOk);
        CHECK(out.str().find("run complete") != std::string::npos);
        CHECK(std::filesystem::exists(out_dir / "config.json"));
        CHECK(std::filesystem::exists(out_dir / "report.json"));
        CHECK(std::filesystem::exists(out_dir / "run_log.jsonl"));

        auto stored = json::parse(slurp(out_dir / "config.json"));
        CHECK(stored.at("rng_seed") == 7);
        CHECK(stored.at("defender").at("mode") == "simulated");
    }

    SUBCASE("the seed override lands in the stored config") {
        auto config_path = write_config(dir, json::object());
        auto out_dir = dir.path / "out_seeded";
        cli::CommonOptions options;
        options.out_dir = out_dir.string();
        options.rng_seed = 123;
        options.quiet = true;
        std::ostringstream out, err;
        CHECK(cli::cmd_run(config_path.string(), options, out, err) ==
              cli::kExitOk);
        CHECK(out.str().empty());
        CHECK(json::parse(slurp(out_dir / "config.json")).at("rng_seed") == 123);
    }

    SUBCASE("an invalid config exits with the validation code") {
        auto config_path = write_config(dir, json{{"batch_size", 1}});
        std::ostringstream out, err;
        cli::CommonOptions options;
        options.out_dir = (dir.path / "unused").string();
        CHECK(cli::cmd_run(config_path.string(), options, out, err) ==
              cli::kExitInvalid);
        CHECK(err.str().find("batch_size") != std::string::npos);
    }

    SUBCASE("a missing seed dataset exits with the validation code") {
        auto config_path = write_config(
            dir, json{{"seed_path", (dir.path / "ghost.jsonl").string()}});
        std::ostringstream out, err;
        cli::CommonOptions options;
        options.out_dir = (dir.path / "unused2").string();
        CHECK(cli::cmd_run(config_path.string(), options, out, err) ==
              cli::kExitInvalid);
    }

    SUBCASE("an unreachable attacker endpoint is a runtime failure") {
        auto config_path = write_config(
            dir, json{{"attacker",
                       {{"mode", "external"},
                        {"endpoint",
                         {{"base_url", "http://127.0.0.1:1"},
                          {"model", "m"},
                          {"max_retries", 0},
                          {"timeout_ms", 500}}}}}});
        std::ostringstream out, err;
        cli::CommonOptions options;
        options.out_dir = (dir.path / "unused3").string();
        CHECK(cli::cmd_run(config_path.string(), options, out, err) ==
              cli::kExitRuntime);
        CHECK(err.str().find("error:") != std::string::npos);
    }
}

TEST_CASE("attack subcommand") {
    TempDir dir("attack");
    write_seeds(dir);
    auto config_path = write_config(dir, json{{"max_timesteps", 3}});

    auto out_a = dir.path / "attack_a";
    cli::CommonOptions options;
    options.out_dir = out_a.string();
    std::ostringstream out, err;
    int code = cli::cmd_attack(config_path.string(), options, out, err);
    CHECK(code == cli::kExitOk);
    CHECK(out.str().find("attacker phase complete") != std::string::npos);
    CHECK(std::filesystem::exists(out_a / "bad_cases.jsonl"));
    CHECK(std::filesystem::exists(out_a / "run_log.jsonl"));
    CHECK(std::filesystem::exists(out_a / "checkpoint_attacker.json"));

    SUBCASE("repeat runs are byte-identical") {
        auto out_b = dir.path / "attack_b";
        cli::CommonOptions repeat;
        repeat.out_dir = out_b.string();
        repeat.quiet = true;
        std::ostringstream out2, err2;
        CHECK(cli::cmd_attack(config_path.string(), repeat, out2, err2) ==
              cli::kExitOk);
        CHECK(slurp(out_a / "bad_cases.jsonl") == slurp(out_b / "bad_cases.jsonl"));
        CHECK(slurp(out_a / "run_log.jsonl") == slurp(out_b / "run_log.jsonl"));
        CHECK(slurp(out_a / "checkpoint_attacker.json") ==
              slurp(out_b / "checkpoint_attacker.json"));
    }
}

TEST_CASE("eval subcommand") {
    TempDir dir("eval");
    write_seeds(dir);
    auto config_path = write_config(dir, json::object());

    auto tagged = [](corpus::SeedRecord seed, corpus::EvalCategory category) {
        seed.category = category;
        return seed;
    };
    std::vector<corpus::SeedRecord> eval_set{
        tagged(fixtures::timer_seed(), corpus::EvalCategory::non_live),
        tagged(fixtures::weather_seed(), corpus::EvalCategory::live),
        tagged(fixtures::parallel_seed(), corpus::EvalCategory::relevance),
        tagged(fixtures::refusal_seed(), corpus::EvalCategory::irrelevance)};
    auto eval_path = dir.path / "eval.jsonl";
    corpus::save_seed_dataset(eval_path, eval_set);

    SUBCASE("prints the metrics document") {
        std::ostringstream out, err;
        int code = cli::cmd_eval(config_path.string(), eval_path.string(), {},
                                 out, err);
        CHECK(code == cli::kExitOk);
        auto rendered = json::parse(out.str());
        CHECK(rendered.at("total") == 4);
        CHECK(rendered.at("categories").size() == 4);
        CHECK(rendered.at("categories").contains("irrelevance"));
    }

    SUBCASE("writes metrics.json when an output directory is given") {
        cli::CommonOptions options;
        options.out_dir = (dir.path / "metrics_out").string();
        std::ostringstream out, err;
        CHECK(cli::cmd_eval(config_path.string(), eval_path.string(), options,
                            out, err) == cli::kExitOk);
        auto on_disk = dir.path / "metrics_out" / "metrics.json";
        REQUIRE(std::filesystem::exists(on_disk));
        CHECK(slurp(on_disk) == out.str());
    }

    SUBCASE("untagged records exit with the validation code") {
        auto untagged_path = dir.path / "untagged.jsonl";
        std::vector<corpus::SeedRecord> untagged{fixtures::timer_seed()};
        corpus::save_seed_dataset(untagged_path, untagged);
        std::ostringstream out, err;
        CHECK(cli::cmd_eval(config_path.string(), untagged_path.string(), {},
                            out, err) == cli::kExitInvalid);
        CHECK(err.str().find("category") != std::string::npos);
    }

    SUBCASE("a missing eval file exits with the validation code") {
        std::ostringstream out, err;
        CHECK(cli::cmd_eval(config_path.string(),
                            (dir.path / "ghost.jsonl").string(), {}, out,
                            err) == cli::kExitInvalid);
    }
}
