#include <doctest.h>

#include <sstream>

#include "entropy_embed/report.hpp"
#include "entropy_embed/simgen.hpp"

using namespace entropy_embed;

namespace {

std::string without_timings(nlohmann::json j) {
  j.erase("timings");
  return j.dump();
}

}  // namespace

TEST_CASE("information sent is the row sum") {
  Matrix cte(3, 3);
  cte << 0, 0.5, 0.25, 0, 0, 0, 1, 0.125, 0;
  CHECK(information_sent(cte) == Vector{{0.75, 0.0, 1.125}});
}

TEST_CASE("analysis report") {
  const Simulation sim = henon(200, 0.6, 4);
  NueConfig config;
  config.dimension = 3;
  config.lambda = 1.0;
  const DependencyResult r = dependency_matrix(sim.series, config);
  const nlohmann::json j = analysis_report(sim.series, config, r);

  CHECK(j["schema_version"] == 1);
  CHECK(j["labels"].size() == 5);
  CHECK(j["config"]["algorithm"] == "msr");
  CHECK(j["config"]["d"] == 3);
  REQUIRE(j["cte"].size() == 5);
  REQUIRE(j["binary"].size() == 5);
  REQUIRE(j["targets"].size() == 5);
  CHECK(j["timings"].contains("total_seconds"));
  CHECK(j["timings"]["per_target_seconds"].size() == 5);
  for (int t = 0; t < 5; ++t) {
    CHECK(j["cte"][t][t] == 0.0);
    CHECK(j["binary"][t][t] == 0);
    const auto& target = j["targets"][t];
    CHECK(target["iterations"] == target["trace"].size());
    // The binary column agrees with the channels present in the embedding.
    for (int s = 0; s < 5; ++s) {
      if (s == t) continue;
      bool present = false;
      for (const auto& e : target["embedding"]) present = present || e["channel"] == s;
      CHECK(j["binary"][s][t] == (present ? 1 : 0));
    }
  }
  double sent0 = 0.0;
  for (int t = 0; t < 5; ++t) sent0 += j["cte"][0][t].get<double>();
  CHECK(j["information_sent"][0].get<double>() == doctest::Approx(sent0));

  const DependencyResult again = dependency_matrix(sim.series, config);
  CHECK(without_timings(j) == without_timings(analysis_report(sim.series, config, again)));
}

TEST_CASE("cte csv and summary") {
  const Simulation sim = henon(200, 0.6, 4);
  NueConfig config;
  config.dimension = 2;
  config.lambda = 1.0;
  const DependencyResult r = dependency_matrix(sim.series, config);

  std::ostringstream csv;
  write_cte_csv(csv, sim.series, r.cte);
  std::istringstream lines(csv.str());
  std::string line;
  std::getline(lines, line);
  CHECK(line == "source,ch1,ch2,ch3,ch4,ch5");
  int rows = 0;
  while (std::getline(lines, line)) ++rows;
  CHECK(rows == 5);

  std::ostringstream summary;
  print_summary(summary, sim.series, r, 3);
  CHECK(summary.str().find("top senders") != std::string::npos);
  CHECK(summary.str().find("analysis time") != std::string::npos);
}
