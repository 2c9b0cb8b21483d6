#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "voter/errors.hpp"
#include "voter/experiment.hpp"
#include "voter/meanfield.hpp"

using namespace voter;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string without_timestamp(const fs::path& p) {
  auto j = nlohmann::ordered_json::parse(slurp(p));
  j.erase("generated_at");
  return j.dump();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("voter_test_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_SUITE("experiment") {
  TEST_CASE("config parsing") {
    std::istringstream in(
        "# sample\nexperiment = capacity\n eps = 0.01, 0.05 \nm-max=7\nburn_in = 12 # trailing\nforce = none\n");
    const ExperimentConfig c = parse_config(in);
    CHECK(c.experiment == "capacity");
    CHECK(c.eps == std::vector<double>{0.01, 0.05});
    CHECK(c.m_max == 7);
    CHECK(c.burn_in == std::size_t{12});
    CHECK(c.force == "none");
    std::istringstream bad("colour = blue\n");
    CHECK_THROWS_AS(parse_config(bad), InvalidArgument);
    std::istringstream no_eq("runs 5\n");
    CHECK_THROWS_AS(parse_config(no_eq), InvalidArgument);
    ExperimentConfig d;
    CHECK_THROWS_AS(apply_setting(d, "runs", "-4"), InvalidArgument);
    CHECK_THROWS_AS(apply_setting(d, "mode", "sideways"), InvalidArgument);
  }

  TEST_CASE("lists and ranges") {
    const auto r = parse_real_list("0.001:0.49:100");
    REQUIRE(r.size() == 100);
    CHECK(r.front() == 0.001);
    CHECK(r.back() == doctest::Approx(0.49));
    CHECK(parse_real_list("0.1") == std::vector<double>{0.1});
    CHECK(parse_count_list("1,4, 9") == std::vector<std::size_t>{1, 4, 9});
    CHECK_THROWS_AS(parse_real_list("1:2"), InvalidArgument);
    CHECK_THROWS_AS(parse_real_list("0.3:0.1:5"), InvalidArgument);
  }

  TEST_CASE("names and errors") {
    CHECK(experiment_names().size() == 10);
    ExperimentConfig c;
    CHECK_THROWS_AS(run_experiment(c), InvalidArgument);
    c.experiment = "nonsense";
    CHECK_THROWS_AS(run_experiment(c), InvalidArgument);
  }

  TEST_CASE("control-length output") {
    ExperimentConfig c;
    c.experiment = "control-length";
    c.eps = parse_real_list("0.001:0.49:100");
    c.out = scratch("lc").string();
    const auto out = run_experiment(c);
    REQUIRE(out.files.size() == 2);
    std::ifstream in(out.files[0]);
    std::string header, line;
    std::getline(in, header);
    CHECK(header == "eps,control_length");
    std::size_t rows = 0;
    double prev = 1e300;
    while (std::getline(in, line)) {
      const auto comma = line.find(',');
      const double e = std::stod(line.substr(0, comma)), v = std::stod(line.substr(comma + 1));
      CHECK(v == doctest::Approx(control_length(e).value).epsilon(1e-11));
      CHECK(v < prev);
      prev = v;
      ++rows;
    }
    CHECK(rows == 100);
    const auto meta = nlohmann::json::parse(slurp(out.files[1]));
    CHECK(meta["config"]["experiment"] == "control-length");
    CHECK(meta.contains("generated_at"));
  }

  TEST_CASE("reruns are byte-identical apart from the timestamp") {
    for (const std::string name : {"capacity", "gramian-bounds", "density-trace", "spacetime", "multi-info-scan"}) {
      ExperimentConfig c;
      c.experiment = name;
      c.runs = 300;
      c.n = 8;
      c.horizon = 12;
      c.seed = 5;
      c.out = scratch("a").string();
      const auto first = run_experiment(c);
      std::vector<std::string> data;
      for (const auto& f : first.files) data.push_back(f.extension() == ".json" ? without_timestamp(f) : slurp(f));
      const auto second = run_experiment(c);
      REQUIRE(second.files.size() == first.files.size());
      for (std::size_t k = 0; k < data.size(); ++k) {
        const auto& f = second.files[k];
        CHECK(data[k] == (f.extension() == ".json" ? without_timestamp(f) : slurp(f)));
      }
    }
  }
}
