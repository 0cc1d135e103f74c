#include "entropy_embed/nue.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>

#include "entropy_embed/error.hpp"
#include "entropy_embed/neighbors.hpp"
#include "entropy_embed/prediction.hpp"

namespace entropy_embed {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

std::string to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::Bootstrap: return "bootstrap";
    case Algorithm::La: return "la";
    case Algorithm::Aic: return "aic";
    case Algorithm::Msr: return "msr";
  }
  return "unknown";
}

Algorithm parse_algorithm(const std::string& name) {
  if (name == "bootstrap") return Algorithm::Bootstrap;
  if (name == "la") return Algorithm::La;
  if (name == "aic") return Algorithm::Aic;
  if (name == "msr") return Algorithm::Msr;
  throw InvalidArgument("unknown algorithm '" + name + "'");
}

void NueConfig::validate() const {
  if (delay < 1) throw InvalidArgument("delay m must be >= 1");
  if (dimension < 1) throw InvalidArgument("dimension d must be >= 1");
  if (neighbors < 1) throw InvalidArgument("neighbor count T must be >= 1");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw InvalidArgument("lambda must lie in [0, 1]");
  if (!(gamma >= 0.0)) throw InvalidArgument("gamma must be non-negative");
  if (bootstrap_size < 1) throw InvalidArgument("bootstrap size must be >= 1");
  if (!(percentile > 0.0 && percentile < 100.0))
    throw InvalidArgument("percentile must lie in (0, 100)");
  if (theiler < 0) throw InvalidArgument("Theiler window must be non-negative");
  if (max_iterations < 0) throw InvalidArgument("max_iterations must be non-negative");
  if (!(jitter >= 0.0)) throw InvalidArgument("jitter must be non-negative");
}

// --- TargetSearch ------------------------------------------------------

TargetSearch::TargetSearch(Vector y, Matrix columns, std::vector<Candidate> pool, KsgParams params)
    : y_(std::move(y)),
      columns_(std::move(columns)),
      pool_(std::move(pool)),
      params_(params),
      psi_(y_.rows()),
      in_s_(pool_.size(), false),
      dist_s_(y_.rows(), Metric::MaxNorm),
      dist_ys_(y_.rows(), Metric::MaxNorm),
      dist_y_(y_.rows(), Metric::MaxNorm),
      sq_s_(y_.rows(), Metric::Euclidean) {
  if (columns_.rows() != y_.rows()) throw ShapeMismatch("pool columns and target differ in rows");
  if (columns_.cols() != static_cast<Index>(pool_.size()))
    throw ShapeMismatch("pool size differs from the number of columns");
  dist_ys_.add_column(y_.data());
  dist_y_.add_column(y_.data());
  const std::size_t p = pool_.size();
  mi_y_.assign(p, kNaN);
  mi_pair_.assign(p * p, kNaN);
  cmi_pair_y_.assign(p * p, kNaN);
}

void TargetSearch::include(Index c, double known_msr) {
  if (c < 0 || c >= static_cast<Index>(pool_.size())) throw InvalidArgument("pool index out of range");
  if (is_selected(c)) throw InvalidArgument("candidate already selected");
  msr_current_ = known_msr;
  selected_.push_back(c);
  in_s_[static_cast<std::size_t>(c)] = true;
  dist_s_.add_column(column(c));
  dist_ys_.add_column(column(c));
  sq_s_.add_column(column(c));
}

EmbeddingState TargetSearch::state() const {
  EmbeddingState s;
  for (Index c : selected_) s.selected.push_back(pool_[static_cast<std::size_t>(c)]);
  s.realizations = embedding_matrix();
  return s;
}

Matrix TargetSearch::embedding_matrix(Index extra) const {
  std::vector<Index> cols = selected_;
  if (extra >= 0) cols.push_back(extra);
  return columns_(Eigen::all, cols);
}

double TargetSearch::cmi(Index c) const {
  using kernels::RowSource;
  const Index n = rows();
  if (selected_.empty()) {
    const RowSource a(dist_y_);
    const RowSource b(nullptr, {column(c)}, Metric::MaxNorm);
    return kernels::ksg(n, a, b, nullptr, params_.neighbors, params_.theiler, psi_);
  }
  const RowSource a(dist_ys_);
  const RowSource b(&dist_s_, {column(c)}, Metric::MaxNorm);
  const RowSource s(dist_s_);
  return kernels::ksg(n, a, b, &s, params_.neighbors, params_.theiler, psi_);
}

double TargetSearch::la_score_for(const double* w, const double* y, Index c) {
  using kernels::RowSource;
  const Index n = rows();
  const int t = params_.neighbors;
  const int th = params_.theiler;
  const bool original = c >= 0;
  const std::size_t p = pool_.size();

  auto mi_with_y = [&] {
    const RowSource a(nullptr, {y}, Metric::MaxNorm);
    const RowSource b(nullptr, {w}, Metric::MaxNorm);
    return kernels::ksg(n, a, b, nullptr, t, th, psi_);
  };
  double score;
  if (original) {
    double& cached = mi_y_[static_cast<std::size_t>(c)];
    if (std::isnan(cached)) cached = mi_with_y();
    score = cached;
  } else {
    score = mi_with_y();
  }
  if (selected_.empty()) return score;

  double redundancy = 0.0, synergy = 0.0;
  for (Index j : selected_) {
    const double* wj = column(j);
    auto pair_mi = [&] {
      const RowSource a(nullptr, {w}, Metric::MaxNorm);
      const RowSource b(nullptr, {wj}, Metric::MaxNorm);
      return kernels::ksg(n, a, b, nullptr, t, th, psi_);
    };
    auto pair_cmi = [&] {
      const RowSource a(nullptr, {w, y}, Metric::MaxNorm);
      const RowSource b(nullptr, {wj, y}, Metric::MaxNorm);
      const RowSource s(nullptr, {y}, Metric::MaxNorm);
      return kernels::ksg(n, a, b, &s, t, th, psi_);
    };
    if (original) {
      const std::size_t key = static_cast<std::size_t>(c) * p + static_cast<std::size_t>(j);
      if (std::isnan(mi_pair_[key])) mi_pair_[key] = pair_mi();
      if (std::isnan(cmi_pair_y_[key])) cmi_pair_y_[key] = pair_cmi();
      redundancy += mi_pair_[key];
      synergy += cmi_pair_y_[key];
    } else {
      redundancy += pair_mi();
      synergy += pair_cmi();
    }
  }
  const double weight = 2.0 / static_cast<double>(selected_.size());
  return score - weight * redundancy + weight * synergy;
}

double TargetSearch::la_score(Index c) { return la_score_for(column(c), y_.data(), c); }

double TargetSearch::msr_with(Index c) const {
  const kernels::RowSource rows_u(selected_.empty() ? nullptr : &sq_s_, {column(c)},
                                  Metric::Euclidean);
  const Vector pred =
      kernels::nn_predict(rows(), rows_u, y_.data(), params_.neighbors, params_.theiler);
  return score_prediction(y_, pred).msr;
}

double TargetSearch::msr_current() const {
  if (std::isnan(msr_current_)) {
    const kernels::RowSource rows_u(sq_s_);
    const Vector pred =
        kernels::nn_predict(rows(), rows_u, y_.data(), params_.neighbors, params_.theiler);
    msr_current_ = score_prediction(y_, pred).msr;
  }
  return msr_current_;
}

double TargetSearch::aic_with(Index c) const { return aic_score(y_, embedding_matrix(c)); }

namespace {

void require_remaining(const TargetSearch& search) {
  if (search.remaining() == 0) throw EmptyPool("no unselected candidates remain");
}

}  // namespace

void TargetSearch::order_for_cmi() const {
  if (selected_.empty()) {
    dist_y_.build_order();
  } else {
    dist_ys_.build_order();
    dist_s_.build_order();
  }
}

void TargetSearch::order_for_msr() const {
  if (!selected_.empty()) sq_s_.build_order();
}

Selection TargetSearch::select_cmi() const {
  require_remaining(*this);
  order_for_cmi();
  Selection best;
  for (Index c = 0; c < static_cast<Index>(pool_.size()); ++c) {
    if (is_selected(c)) continue;
    const double v = cmi(c);
    if (best.pool_index < 0 || v > best.value) best = {c, v, kNaN};
  }
  return best;
}

Selection TargetSearch::select_la() {
  require_remaining(*this);
  Selection best;
  for (Index c = 0; c < static_cast<Index>(pool_.size()); ++c) {
    if (is_selected(c)) continue;
    const double v = la_score(c);
    if (best.pool_index < 0 || v > best.value) best = {c, v, kNaN};
  }
  return best;
}

Selection TargetSearch::select_msr(double lambda) const {
  require_remaining(*this);
  if (lambda < 1.0) order_for_cmi();
  if (lambda > 0.0) order_for_msr();
  Selection best;
  for (Index c = 0; c < static_cast<Index>(pool_.size()); ++c) {
    if (is_selected(c)) continue;
    const double info = lambda < 1.0 ? cmi(c) : 0.0;
    const double m = lambda > 0.0 ? msr_with(c) : kNaN;
    const double v = lambda == 0.0 ? info : lambda == 1.0 ? -m : (1.0 - lambda) * info - lambda * m;
    if (best.pool_index < 0 || v > best.value) best = {c, v, m};
  }
  if (std::isnan(best.msr)) best.msr = msr_with(best.pool_index);
  return best;
}

std::vector<double> TargetSearch::surrogates(Index c, bool la, int count, std::mt19937_64& rng) {
  using kernels::RowSource;
  const Index n = rows();
  std::vector<Index> perm_y(static_cast<std::size_t>(n)), perm_w(static_cast<std::size_t>(n));
  Vector ys(n), ws(n);
  const double* w = column(c);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int b = 0; b < count; ++b) {
    std::iota(perm_y.begin(), perm_y.end(), Index{0});
    std::iota(perm_w.begin(), perm_w.end(), Index{0});
    std::shuffle(perm_y.begin(), perm_y.end(), rng);
    std::shuffle(perm_w.begin(), perm_w.end(), rng);
    for (Index i = 0; i < n; ++i) {
      ys[i] = y_[perm_y[static_cast<std::size_t>(i)]];
      ws[i] = w[perm_w[static_cast<std::size_t>(i)]];
    }
    if (la) {
      out.push_back(la_score_for(ws.data(), ys.data(), -1));
    } else if (selected_.empty()) {
      const RowSource a(nullptr, {ys.data()}, Metric::MaxNorm);
      const RowSource bb(nullptr, {ws.data()}, Metric::MaxNorm);
      out.push_back(kernels::ksg(n, a, bb, nullptr, params_.neighbors, params_.theiler, psi_));
    } else {
      dist_s_.build_order();
      const RowSource a(&dist_s_, {ys.data()}, Metric::MaxNorm);
      const RowSource bb(&dist_s_, {ws.data()}, Metric::MaxNorm);
      const RowSource s(dist_s_);
      out.push_back(kernels::ksg(n, a, bb, &s, params_.neighbors, params_.theiler, psi_));
    }
  }
  return out;
}

// --- termination tests -------------------------------------------------

double surrogate_percentile(std::vector<double> values, double percentile) {
  if (values.empty()) throw InvalidArgument("no surrogate values");
  std::sort(values.begin(), values.end());
  const double rank = std::ceil(percentile / 100.0 * static_cast<double>(values.size()));
  const auto k = static_cast<std::size_t>(std::clamp(rank, 1.0, static_cast<double>(values.size())));
  return values[k - 1];
}

Decision bootstrap_terminate(double value, const std::vector<double>& surrogates,
                             double percentile) {
  return value > surrogate_percentile(surrogates, percentile) ? Decision::Continue : Decision::Stop;
}

Decision msr_terminate(double msr_prev, double msr_new, double gamma) {
  return msr_prev - msr_new > gamma ? Decision::Continue : Decision::Stop;
}

Decision aic_terminate(const Vector& y, const Matrix& u_k, const Matrix& u_k_minus_1,
                       AicRule rule) {
  if (u_k.cols() <= u_k_minus_1.cols()) return Decision::Stop;
  const double now = aic_score(y, u_k);
  const double before = aic_score(y, u_k_minus_1);
  const bool include = rule == AicRule::IncludeOnDecrease ? now < before : now > before;
  return include ? Decision::Continue : Decision::Stop;
}

// --- drivers -----------------------------------------------------------

MultivariateSeries prepare_series(const MultivariateSeries& series, const NueConfig& config) {
  const MultivariateSeries normalized = normalize(series);
  if (config.jitter == 0.0) return normalized;
  // jitter() works on columns; transpose so each channel is a column.
  const Matrix channels = normalized.values().transpose();
  const Matrix noisy = jitter(channels, config.jitter, config.seed);
  return normalized.with_values(noisy.transpose());
}

TargetSearch make_target_search(const MultivariateSeries& prepared, int target,
                                const NueConfig& config) {
  auto pool = build_candidate_pool(static_cast<int>(prepared.channels()), config.delay,
                                   config.dimension);
  LaggedData lagged = lagged_matrix(prepared, pool, target, config.delay, config.dimension);
  return TargetSearch(std::move(lagged.target), std::move(lagged.columns), std::move(pool),
                      config.ksg());
}

namespace {

std::mt19937_64 target_rng(std::uint64_t seed, int target) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(target)};
  return std::mt19937_64(seq);
}

}  // namespace

NueTrace run_nue_prepared(const MultivariateSeries& prepared, int target, const NueConfig& config) {
  config.validate();
  TargetSearch search = make_target_search(prepared, target, config);
  std::mt19937_64 rng = target_rng(config.seed, target);
  const int cap = config.max_iterations > 0 ? config.max_iterations
                                            : static_cast<int>(search.pool().size());

  NueTrace trace;
  trace.initial_msr = search.msr_current();
  double aic_prev = kNaN;
  while (search.remaining() > 0 && trace.iterations() < cap) {
    const bool first = search.selected().empty();
    IterationRecord rec;
    Selection sel;
    switch (config.algorithm) {
      case Algorithm::Msr: {
        sel = search.select_msr(config.lambda);
        rec.msr = sel.msr;
        rec.termination = search.msr_current() - sel.msr;
        rec.accepted = first || msr_terminate(search.msr_current(), sel.msr, config.gamma) ==
                                    Decision::Continue;
        break;
      }
      case Algorithm::Bootstrap:
      case Algorithm::La: {
        const bool la = config.algorithm == Algorithm::La;
        sel = la ? search.select_la() : search.select_cmi();
        const auto null = search.surrogates(sel.pool_index, la, config.bootstrap_size, rng);
        rec.msr = kNaN;
        rec.termination = surrogate_percentile(null, config.percentile);
        rec.accepted = bootstrap_terminate(sel.value, null, config.percentile) == Decision::Continue;
        break;
      }
      case Algorithm::Aic: {
        sel = search.select_cmi();
        rec.msr = kNaN;
        const double aic = search.aic_with(sel.pool_index);
        rec.termination = aic;
        if (first) {
          rec.accepted = true;
        } else {
          rec.accepted = config.aic_rule == AicRule::IncludeOnDecrease ? aic < aic_prev
                                                                       : aic > aic_prev;
        }
        if (rec.accepted) aic_prev = aic;
        break;
      }
    }
    rec.candidate = search.pool()[static_cast<std::size_t>(sel.pool_index)];
    rec.criterion = sel.value;
    trace.records.push_back(rec);
    if (!rec.accepted) break;
    search.include(sel.pool_index, rec.msr);
  }
  trace.embedding = search.state();
  return trace;
}

NueTrace run_nue(const MultivariateSeries& series, int target, const NueConfig& config) {
  config.validate();
  return run_nue_prepared(prepare_series(series, config), target, config);
}

DependencyResult dependency_matrix(const MultivariateSeries& series, const NueConfig& config) {
  config.validate();
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  const MultivariateSeries prepared = prepare_series(series, config);
  const int channels = static_cast<int>(prepared.channels());

  DependencyResult out;
  out.cte = Matrix::Zero(channels, channels);
  out.binary = Eigen::MatrixXi::Zero(channels, channels);
  out.traces.resize(static_cast<std::size_t>(channels));
  out.seconds.assign(static_cast<std::size_t>(channels), 0.0);
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(channels));

#pragma omp parallel for schedule(dynamic, 1)
  for (int target = 0; target < channels; ++target) {
    try {
      const auto t0 = clock::now();
      NueTrace trace = run_nue_prepared(prepared, target, config);
      out.seconds[static_cast<std::size_t>(target)] =
          std::chrono::duration<double>(clock::now() - t0).count();
      const Vector y = lagged_matrix(prepared, {}, target, config.delay, config.dimension).target;
      for (int source = 0; source < channels; ++source) {
        if (source == target || !trace.embedding.has_channel(source)) continue;
        out.binary(source, target) = 1;
        out.cte(source, target) = ksg_cte(y, trace.embedding, source, config.ksg());
      }
      out.traces[static_cast<std::size_t>(target)] = std::move(trace);
    } catch (...) {
      errors[static_cast<std::size_t>(target)] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  out.total_seconds = std::chrono::duration<double>(clock::now() - start).count();
  return out;
}

}  // namespace entropy_embed
