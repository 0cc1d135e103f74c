#pragma once

#include <compare>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace entropy_embed {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
// Channels are rows; each channel is stored contiguously.
using SeriesMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// A real-valued multichannel record: L channels by N samples with labels.
class MultivariateSeries {
 public:
  /// Validates shape, finiteness and label uniqueness; throws InvalidArgument.
  MultivariateSeries(SeriesMatrix values, std::vector<std::string> labels,
                     std::optional<double> sample_rate = std::nullopt);

  /// Labels "ch1", "ch2", ... are generated.
  static MultivariateSeries unlabeled(SeriesMatrix values);

  Index channels() const { return values_.rows(); }
  Index samples() const { return values_.cols(); }
  const SeriesMatrix& values() const { return values_; }
  const std::vector<std::string>& labels() const { return labels_; }
  std::optional<double> sample_rate() const { return sample_rate_; }

  /// Same labels and sample rate, new values of identical shape.
  MultivariateSeries with_values(SeriesMatrix values) const;

 private:
  SeriesMatrix values_;
  std::vector<std::string> labels_;
  std::optional<double> sample_rate_;
};

/// One lagged variable: `channel` observed `lag` samples in the past.
struct Candidate {
  int channel = 0;
  int lag = 1;

  auto operator<=>(const Candidate&) const = default;
};

/// Selected candidates in selection order, plus their realizations aligned
/// to the valid target indices (column j belongs to selected[j]).
struct EmbeddingState {
  std::vector<Candidate> selected;
  Matrix realizations;

  Index size() const { return static_cast<Index>(selected.size()); }
  bool contains(const Candidate& c) const;
  bool has_channel(int channel) const;
};

/// Zero mean, unit (N-1) variance per channel. Throws ConstantChannel.
MultivariateSeries normalize(const MultivariateSeries& series);

/// L*d candidates, channel-major with ascending lags m, 2m, ..., d*m.
std::vector<Candidate> build_candidate_pool(int channels, int delay, int dimension);

/// Target present values and candidate columns over the common frame of
/// N - d*m valid samples.
struct LaggedData {
  Vector target;
  Matrix columns;
};

/// Row i holds target[i + d*m] and, per candidate, channel[i + d*m - lag].
/// Throws SeriesTooShort when N <= d*m.
LaggedData lagged_matrix(const MultivariateSeries& series, const std::vector<Candidate>& candidates,
                         int target, int delay, int dimension);

/// Single candidate column in the same frame as lagged_matrix.
Vector lagged_column(const MultivariateSeries& series, const Candidate& candidate, int delay,
                     int dimension);

/// Builds an EmbeddingState for `selected` in the lagged frame.
EmbeddingState make_embedding(const MultivariateSeries& series, std::vector<Candidate> selected,
                              int delay, int dimension);

// CSV: header row of labels, then one sample per row. Throws MalformedCsv.
MultivariateSeries read_csv(std::istream& in);
MultivariateSeries read_csv_file(const std::string& path);
void write_csv(std::ostream& out, const MultivariateSeries& series);
void write_csv_file(const std::string& path, const MultivariateSeries& series);

/// Shortest round-trip decimal representation.
std::string format_double(double value);

}  // namespace entropy_embed
