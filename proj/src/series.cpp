#include "entropy_embed/series.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "entropy_embed/error.hpp"

namespace entropy_embed {

MultivariateSeries::MultivariateSeries(SeriesMatrix values, std::vector<std::string> labels,
                                       std::optional<double> sample_rate)
    : values_(std::move(values)), labels_(std::move(labels)), sample_rate_(sample_rate) {
  if (values_.rows() < 2) throw InvalidArgument("series needs at least 2 channels");
  if (values_.cols() < 1) throw InvalidArgument("series needs at least 1 sample");
  if (static_cast<Index>(labels_.size()) != values_.rows())
    throw InvalidArgument("label count does not match channel count");
  std::unordered_set<std::string> seen;
  for (const auto& label : labels_) {
    if (!seen.insert(label).second) throw InvalidArgument("duplicate channel label '" + label + "'");
  }
  if (!values_.allFinite()) throw InvalidArgument("series contains non-finite values");
  if (sample_rate_ && !(*sample_rate_ > 0.0)) throw InvalidArgument("sample rate must be positive");
}

MultivariateSeries MultivariateSeries::unlabeled(SeriesMatrix values) {
  std::vector<std::string> labels;
  for (Index c = 0; c < values.rows(); ++c) labels.push_back("ch" + std::to_string(c + 1));
  return MultivariateSeries(std::move(values), std::move(labels));
}

MultivariateSeries MultivariateSeries::with_values(SeriesMatrix values) const {
  if (values.rows() != values_.rows() || values.cols() != values_.cols())
    throw ShapeMismatch("replacement values change the series shape");
  return MultivariateSeries(std::move(values), labels_, sample_rate_);
}

bool EmbeddingState::contains(const Candidate& c) const {
  return std::find(selected.begin(), selected.end(), c) != selected.end();
}

bool EmbeddingState::has_channel(int channel) const {
  return std::any_of(selected.begin(), selected.end(),
                     [channel](const Candidate& c) { return c.channel == channel; });
}

MultivariateSeries normalize(const MultivariateSeries& series) {
  SeriesMatrix out = series.values();
  const Index n = out.cols();
  for (Index c = 0; c < out.rows(); ++c) {
    auto row = out.row(c);
    const double mean = row.mean();
    row.array() -= mean;
    const double var = n > 1 ? row.squaredNorm() / static_cast<double>(n - 1) : 0.0;
    if (!(var >= 1e-30))
      throw ConstantChannel("channel '" + series.labels()[c] + "' has zero variance");
    row /= std::sqrt(var);
  }
  return series.with_values(std::move(out));
}

std::vector<Candidate> build_candidate_pool(int channels, int delay, int dimension) {
  if (channels < 2 || delay < 1 || dimension < 1)
    throw InvalidArgument("candidate pool needs L >= 2, m >= 1, d >= 1");
  std::vector<Candidate> pool;
  pool.reserve(static_cast<std::size_t>(channels) * dimension);
  for (int c = 0; c < channels; ++c)
    for (int j = 1; j <= dimension; ++j) pool.push_back({c, j * delay});
  return pool;
}

namespace {

Index valid_rows(const MultivariateSeries& series, int delay, int dimension) {
  const Index offset = static_cast<Index>(delay) * dimension;
  if (series.samples() <= offset)
    throw SeriesTooShort("series of " + std::to_string(series.samples()) +
                         " samples is too short for d*m = " + std::to_string(offset));
  return series.samples() - offset;
}

void check_candidate(const MultivariateSeries& series, const Candidate& c, int delay,
                     int dimension) {
  if (c.channel < 0 || c.channel >= series.channels())
    throw InvalidArgument("candidate channel out of range");
  if (c.lag < 1 || c.lag > delay * dimension)
    throw InvalidArgument("candidate lag outside [1, d*m]");
}

}  // namespace

Vector lagged_column(const MultivariateSeries& series, const Candidate& candidate, int delay,
                     int dimension) {
  const Index rows = valid_rows(series, delay, dimension);
  check_candidate(series, candidate, delay, dimension);
  const Index start = static_cast<Index>(delay) * dimension - candidate.lag;
  return series.values().row(candidate.channel).segment(start, rows).transpose();
}

LaggedData lagged_matrix(const MultivariateSeries& series, const std::vector<Candidate>& candidates,
                         int target, int delay, int dimension) {
  const Index rows = valid_rows(series, delay, dimension);
  if (target < 0 || target >= series.channels()) throw InvalidArgument("target out of range");
  LaggedData out;
  const Index offset = static_cast<Index>(delay) * dimension;
  out.target = series.values().row(target).segment(offset, rows).transpose();
  out.columns.resize(rows, static_cast<Index>(candidates.size()));
  for (std::size_t j = 0; j < candidates.size(); ++j)
    out.columns.col(static_cast<Index>(j)) = lagged_column(series, candidates[j], delay, dimension);
  return out;
}

EmbeddingState make_embedding(const MultivariateSeries& series, std::vector<Candidate> selected,
                              int delay, int dimension) {
  EmbeddingState state;
  state.realizations = lagged_matrix(series, selected, 0, delay, dimension).columns;
  state.selected = std::move(selected);
  return state;
}

// --- CSV ---------------------------------------------------------------

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char ch) { return !std::isspace(ch); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

}  // namespace

MultivariateSeries read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw MalformedCsv("empty input");
  std::vector<std::string> labels;
  for (auto& f : split_fields(line)) labels.push_back(trim(f));
  if (labels.size() < 2) throw MalformedCsv("need at least 2 channels (L >= 2)");
  for (const auto& l : labels)
    if (l.empty()) throw MalformedCsv("empty channel label in header");

  std::vector<double> flat;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    auto fields = split_fields(line);
    if (fields.size() != labels.size())
      throw MalformedCsv("row " + std::to_string(row) + " has " + std::to_string(fields.size()) +
                         " fields, expected " + std::to_string(labels.size()));
    for (auto& f : fields) {
      const std::string t = trim(f);
      double v = 0.0;
      const auto* first = t.data();
      if (!t.empty() && *first == '+') ++first;
      auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), v);
      if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v))
        throw MalformedCsv("row " + std::to_string(row) + ": cannot parse '" + t + "'");
      flat.push_back(v);
    }
  }
  const Index channels = static_cast<Index>(labels.size());
  const Index samples = static_cast<Index>(flat.size()) / channels;
  if (samples < 1) throw MalformedCsv("no data rows");
  SeriesMatrix values(channels, samples);
  for (Index t = 0; t < samples; ++t)
    for (Index c = 0; c < channels; ++c) values(c, t) = flat[t * channels + c];
  try {
    return MultivariateSeries(std::move(values), std::move(labels));
  } catch (const InvalidArgument& e) {
    throw MalformedCsv(e.what());
  }
}

MultivariateSeries read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MalformedCsv("cannot open '" + path + "'");
  return read_csv(in);
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

void write_csv(std::ostream& out, const MultivariateSeries& series) {
  const auto& labels = series.labels();
  for (std::size_t c = 0; c < labels.size(); ++c) out << (c ? "," : "") << labels[c];
  out << '\n';
  const auto& v = series.values();
  for (Index t = 0; t < v.cols(); ++t) {
    for (Index c = 0; c < v.rows(); ++c) out << (c ? "," : "") << format_double(v(c, t));
    out << '\n';
  }
}

void write_csv_file(const std::string& path, const MultivariateSeries& series) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write '" + path + "'");
  write_csv(out, series);
}

}  // namespace entropy_embed
