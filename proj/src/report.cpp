#include "entropy_embed/report.hpp"

#include <algorithm>
#include <iomanip>
#include <numeric>
#include <ostream>

namespace entropy_embed {

Vector information_sent(const Matrix& cte) { return cte.rowwise().sum(); }

namespace {

nlohmann::json matrix_json(const auto& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::json config_json(const NueConfig& c) {
  return {{"algorithm", to_string(c.algorithm)},
          {"m", c.delay},
          {"d", c.dimension},
          {"k_neighbors", c.neighbors},
          {"lambda", c.lambda},
          {"gamma", c.gamma},
          {"theiler", c.theiler},
          {"bootstrap_size", c.bootstrap_size},
          {"percentile", c.percentile},
          {"max_iterations", c.max_iterations},
          {"seed", c.seed},
          {"jitter", c.jitter},
          {"aic_rule", c.aic_rule == AicRule::IncludeOnDecrease ? "decrease" : "increase"}};
}

}  // namespace

nlohmann::json analysis_report(const MultivariateSeries& series, const NueConfig& config,
                               const DependencyResult& result) {
  const auto& labels = series.labels();
  nlohmann::json j;
  j["schema_version"] = kReportSchemaVersion;
  j["labels"] = labels;
  j["config"] = config_json(config);
  j["cte"] = matrix_json(result.cte);
  j["binary"] = matrix_json(result.binary);
  const Vector sent = information_sent(result.cte);
  j["information_sent"] = std::vector<double>(sent.data(), sent.data() + sent.size());

  nlohmann::json targets = nlohmann::json::array();
  for (std::size_t t = 0; t < result.traces.size(); ++t) {
    const NueTrace& trace = result.traces[t];
    nlohmann::json embedding = nlohmann::json::array();
    for (const auto& c : trace.embedding.selected)
      embedding.push_back({{"channel", c.channel}, {"label", labels[c.channel]}, {"lag", c.lag}});
    nlohmann::json records = nlohmann::json::array();
    for (const auto& r : trace.records)
      records.push_back({{"channel", r.candidate.channel},
                         {"lag", r.candidate.lag},
                         {"criterion", r.criterion},
                         {"termination", r.termination},
                         {"msr", r.msr},
                         {"accepted", r.accepted}});
    targets.push_back({{"channel", t},
                       {"label", labels[t]},
                       {"iterations", trace.iterations()},
                       {"initial_msr", trace.initial_msr},
                       {"embedding", std::move(embedding)},
                       {"trace", std::move(records)}});
  }
  j["targets"] = std::move(targets);
  j["timings"] = {{"total_seconds", result.total_seconds},
                  {"per_target_seconds", result.seconds}};
  return j;
}

void write_cte_csv(std::ostream& out, const MultivariateSeries& series, const Matrix& cte) {
  const auto& labels = series.labels();
  out << "source";
  for (const auto& l : labels) out << ',' << l;
  out << '\n';
  for (Index r = 0; r < cte.rows(); ++r) {
    out << labels[r];
    for (Index c = 0; c < cte.cols(); ++c) out << ',' << format_double(cte(r, c));
    out << '\n';
  }
}

void print_summary(std::ostream& out, const MultivariateSeries& series,
                   const DependencyResult& result, int top) {
  const auto& labels = series.labels();
  const Index l = series.channels();
  out << "target            iterations  embedding  drivers\n";
  for (Index t = 0; t < l; ++t) {
    const auto& trace = result.traces[t];
    int drivers = 0;
    for (Index s = 0; s < l; ++s) drivers += result.binary(s, t);
    out << std::left << std::setw(18) << labels[t] << std::right << std::setw(10)
        << trace.iterations() << std::setw(11) << trace.embedding.size() << std::setw(9) << drivers
        << '\n';
  }
  const Vector sent = information_sent(result.cte);
  std::vector<Index> order(static_cast<std::size_t>(l));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return sent[a] > sent[b]; });
  out << "\ntop senders (row sum of CTE, nats)\n";
  for (int k = 0; k < std::min<Index>(top, l); ++k) {
    const Index c = order[static_cast<std::size_t>(k)];
    out << "  " << std::left << std::setw(18) << labels[c] << std::right << std::fixed
        << std::setprecision(4) << sent[c] << '\n';
  }
  out << std::defaultfloat;
  out << "\nanalysis time " << std::setprecision(3) << result.total_seconds << " s\n";
}

}  // namespace entropy_embed
