#include "ednet/gradient.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace ednet {

namespace {

// Substream tags; never reuse across call sites.
constexpr std::uint64_t kTagUtility = 0x55;
constexpr std::uint64_t kTagGradient = 0x47;

double clamped_mean(double rate, double horizon) {
  return std::max(rate, 0.0) * horizon;
}

struct SampleStats {
  double mean = 0.0;
  double std_error = 0.0;
};

SampleStats summarize(const std::vector<double>& values) {
  SampleStats s;
  const std::size_t n = values.size();
  if (n == 0) return s;
  s.mean = pairwise_sum(values) / static_cast<double>(n);
  if (n > 1) {
    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double d = values[i] - s.mean;
      sq[i] = d * d;
    }
    const double var = pairwise_sum(sq) / static_cast<double>(n - 1);
    s.std_error = std::sqrt(var / static_cast<double>(n));
  }
  return s;
}

}  // namespace

std::int64_t sample_poisson(double rate, Rng& rng) { return rng.poisson(rate); }

double poisson_pmf(std::int64_t n, double mean) {
  if (n < 0) return 0.0;
  if (mean == 0.0) return n == 0 ? 1.0 : 0.0;
  const double dn = static_cast<double>(n);
  return std::exp(dn * std::log(mean) - mean - std::lgamma(dn + 1.0));
}

double poisson_tail_bound(double mean, double z) {
  if (!(mean > 0.0) || !std::isfinite(mean))
    throw DomainError("poisson_tail_bound: mean must be positive");
  if (!(z > mean)) throw DomainError("poisson_tail_bound: need z > mean");
  const double u = (z - mean) / mean;
  const double h = 2.0 * ((1.0 + u) * std::log1p(u) - u) / (u * u);
  return std::exp(-((z - mean) * (z - mean) / (2.0 * mean)) * h);
}

double head_coverage(double lambda_t, std::int64_t n_prime) {
  if (lambda_t < 0.0 || !std::isfinite(lambda_t))
    throw DomainError("head_coverage: lambda*T must be finite, nonnegative");
  if (lambda_t == 0.0) return 1.0;  // truncation discards nothing at rate 0
  if (static_cast<double>(n_prime) < lambda_t)
    throw DomainError("head_coverage: n' must be >= lambda*T");
  return 1.0 - poisson_tail_bound(lambda_t, static_cast<double>(n_prime) + 1.0);
}

Eigen::VectorXd GradientEstimate::lp_objective(const RateIndex& index) const {
  Eigen::VectorXd obj = Eigen::VectorXd::Zero(index.size());
  for (int l = 0; l < index.learner_count; ++l)
    for (int x = 0; x < index.feature_count; ++x)
      obj[index.learner_var(l, x)] = partials(l, x);
  return obj;
}

UtilityEstimate estimate_utility(const RateVector& rates,
                                 const Scenario& scenario,
                                 const EstimatorParams& params,
                                 std::uint64_t seed) {
  params.validate();
  const RateIndex idx = scenario.rate_index();
  if (!(rates.index == idx))
    throw IndexMismatch("estimate_utility: rate vector shape mismatch");
  const int n_learners = idx.learner_count;
  const int n_feat = idx.feature_count;
  const int samples = params.utility_samples;

  std::vector<double> base(n_learners);
  for (int l = 0; l < n_learners; ++l)
    base[l] = log_det_psd<double>(scenario.learners[l].design.prior_precision);

  std::vector<double> values(samples, 0.0);
  Eigen::VectorXi counts(n_feat);
  for (int l = 0; l < n_learners; ++l) {
    const LearnerSpec& spec = scenario.learners[l];
    for (int j = 0; j < samples; ++j) {
      Rng rng(derive_seed({seed, kTagUtility, static_cast<std::uint64_t>(l),
                           static_cast<std::uint64_t>(j)}));
      for (int x = 0; x < n_feat; ++x)
        counts[x] = static_cast<int>(rng.poisson(
            clamped_mean(rates.learner_rate(l, x), scenario.horizon)));
      values[j] +=
          g_objective(counts, scenario.pool, spec.design) - base[l];
    }
  }
  SampleStats stats = summarize(values);
  return UtilityEstimate{stats.mean, stats.std_error, samples, seed};
}

GradientEstimate estimate_gradient(const RateVector& rates,
                                   const Scenario& scenario,
                                   const EstimatorParams& params,
                                   std::uint64_t seed) {
  params.validate();
  const RateIndex idx = scenario.rate_index();
  if (!(rates.index == idx))
    throw IndexMismatch("estimate_gradient: rate vector shape mismatch");
  const int n_learners = idx.learner_count;
  const int n_feat = idx.feature_count;
  const int n_samples = params.sample_count;
  const double horizon = scenario.horizon;

  GradientEstimate out;
  out.partials.setZero(n_learners, n_feat);
  out.std_errors.setZero(n_learners, n_feat);
  out.head_coverage.setOnes(n_learners, n_feat);
  out.truncation.setZero(n_learners, n_feat);
  out.sample_count = n_samples;
  out.seed = seed;

  // Truncation rule: explicit n', or ceil(multiplier * max lambda T) over
  // all coordinates, never below ceil(lambda^l_x T) per coordinate.
  double max_mean = 0.0;
  for (int l = 0; l < n_learners; ++l)
    for (int x = 0; x < n_feat; ++x)
      max_mean = std::max(max_mean,
                          clamped_mean(rates.learner_rate(l, x), horizon));
  const std::int64_t rule_trunc =
      params.explicit_truncation >= 0
          ? params.explicit_truncation
          : static_cast<std::int64_t>(
                std::ceil(params.truncation_multiplier * max_mean));

  for (int l = 0; l < n_learners; ++l) {
    const LearnerSpec& spec = scenario.learners[l];
    const double sigma2 = spec.design.noise_std * spec.design.noise_std;
    const Eigen::Index d = scenario.pool.dimension();

    // One joint arrival sample per j; coefficients c(j,x) determine the whole
    // conditional gain sequence log(1 + c/(1 + n c)) in closed form.
    Eigen::MatrixXd coef(n_samples, n_feat);
    Eigen::VectorXi counts(n_feat);
    for (int j = 0; j < n_samples; ++j) {
      Rng rng(derive_seed({seed, kTagGradient, static_cast<std::uint64_t>(l),
                           static_cast<std::uint64_t>(j)}));
      for (int x = 0; x < n_feat; ++x)
        counts[x] = static_cast<int>(rng.poisson(
            clamped_mean(rates.learner_rate(l, x), horizon)));
      const DesignState state =
          make_design_state(scenario.pool, spec.design, counts);
      for (int x = 0; x < n_feat; ++x) {
        double quad;  // x^T A(n | n_x = 0)^{-1} x
        if (counts[x] == 0) {
          Eigen::VectorXd half =
              state.llt().matrixL().solve(scenario.pool.features.col(x));
          quad = half.squaredNorm();
        } else {
          // Remove this coordinate's own contribution by a Cholesky
          // downdate, then solve against the downdated factor.
          Eigen::LLT<Eigen::MatrixXd> llt = state.llt();
          llt.rankUpdate(scenario.pool.features.col(x),
                         -static_cast<double>(counts[x]) / sigma2);
          if (llt.info() != Eigen::Success) {
            Eigen::VectorXi reduced = counts;
            reduced[x] = 0;
            llt = Eigen::LLT<Eigen::MatrixXd>(detail::build_info_matrix(
                reduced, scenario.pool, spec.design));
          }
          Eigen::VectorXd half =
              llt.matrixL().solve(scenario.pool.features.col(x));
          quad = half.squaredNorm();
        }
        coef(j, x) = quad / sigma2;
      }
      (void)d;
    }

    std::vector<double> per_sample(n_samples);
    std::vector<double> pmf;
    for (int x = 0; x < n_feat; ++x) {
      const double mean = clamped_mean(rates.learner_rate(l, x), horizon);
      const std::int64_t trunc =
          std::max(rule_trunc,
                   static_cast<std::int64_t>(std::ceil(mean)));
      out.truncation(l, x) = static_cast<int>(trunc);
      pmf.resize(static_cast<std::size_t>(trunc) + 1);
      for (std::int64_t n = 0; n <= trunc; ++n)
        pmf[static_cast<std::size_t>(n)] = poisson_pmf(n, mean);

      for (int j = 0; j < n_samples; ++j) {
        const double c = coef(j, x);
        double series = 0.0;
        for (std::int64_t n = 0; n <= trunc; ++n) {
          const double w = pmf[static_cast<std::size_t>(n)];
          if (w == 0.0) continue;
          series +=
              w * std::log1p(c / (1.0 + static_cast<double>(n) * c));
        }
        per_sample[j] = horizon * series;
      }
      SampleStats stats = summarize(per_sample);
      out.partials(l, x) = stats.mean;
      out.std_errors(l, x) = stats.std_error;
      out.head_coverage(l, x) = head_coverage(mean, trunc);
    }
  }
  return out;
}

namespace {

// Shared nested-summation machinery for the exact oracles. The truncation
// box covers each coordinate's Poisson law up to residual tail mass
// tol / (|X| * max(G_MAX, 1)).
struct SeriesBox {
  std::vector<int> n_max;             // inclusive, per coordinate
  std::vector<std::vector<double>> w; // pmf tables
};

SeriesBox series_box(const Eigen::VectorXd& means, double tol,
                     double g_scale) {
  const int k = static_cast<int>(means.size());
  if (k > 3)
    throw InstanceTooLarge("exact series oracle requires |X| <= 3");
  const double eps = tol / (static_cast<double>(k) * std::max(g_scale, 1.0));
  SeriesBox box;
  box.n_max.resize(k);
  box.w.resize(k);
  double log_points = 0.0;
  for (int x = 0; x < k; ++x) {
    const double mean = means[x];
    double cum = 0.0;
    int n = 0;
    std::vector<double> pmf;
    while (true) {
      const double p = poisson_pmf(n, mean);
      pmf.push_back(p);
      cum += p;
      if (1.0 - cum < eps && n >= static_cast<int>(mean)) break;
      ++n;
      if (n > 100000)
        throw InstanceTooLarge("exact series truncation did not converge");
    }
    box.n_max[x] = n;
    box.w[x] = std::move(pmf);
    log_points += std::log(static_cast<double>(n + 2));
  }
  if (log_points > std::log(4.0e6))
    throw InstanceTooLarge("exact series lattice box too large");
  return box;
}

Eigen::VectorXd learner_means(const RateVector& rates,
                              const Scenario& scenario, int learner_pos) {
  const int n_feat = scenario.rate_index().feature_count;
  Eigen::VectorXd means(n_feat);
  for (int x = 0; x < n_feat; ++x)
    means[x] =
        clamped_mean(rates.learner_rate(learner_pos, x), scenario.horizon);
  return means;
}

double learner_g_scale(const Scenario& scenario, const LearnerSpec& spec) {
  Eigen::LLT<Eigen::MatrixXd> llt(spec.design.prior_precision);
  double g = 0.0;
  for (int x = 0; x < scenario.pool.size(); ++x) {
    Eigen::VectorXd half = llt.matrixL().solve(scenario.pool.features.col(x));
    g = std::max(g, std::log1p(half.squaredNorm() / (spec.design.noise_std *
                                                     spec.design.noise_std)));
  }
  return g;
}

// G over the lattice box extended by +1 in every coordinate (the gradient
// needs the shifted evaluations).
class GTable {
 public:
  GTable(const Scenario& scenario, const LearnerSpec& spec,
         const std::vector<int>& n_max)
      : dims_(n_max.size()) {
    strides_.resize(dims_);
    std::size_t total = 1;
    for (int x = 0; x < dims_; ++x) {
      extent_.push_back(n_max[x] + 2);
      strides_[x] = total;
      total *= static_cast<std::size_t>(extent_[x]);
    }
    values_.resize(total);
    Eigen::VectorXi counts = Eigen::VectorXi::Zero(dims_);
    for (std::size_t flat = 0; flat < total; ++flat) {
      std::size_t rem = flat;
      for (int x = dims_ - 1; x >= 0; --x) {
        counts[x] = static_cast<int>(rem / strides_[x]);
        rem %= strides_[x];
      }
      values_[flat] = g_objective(counts, scenario.pool, spec.design);
    }
  }

  double at(const std::vector<int>& counts) const {
    std::size_t flat = 0;
    for (int x = 0; x < dims_; ++x)
      flat += strides_[x] * static_cast<std::size_t>(counts[x]);
    return values_[flat];
  }

 private:
  int dims_;
  std::vector<int> extent_;
  std::vector<std::size_t> strides_;
  std::vector<double> values_;
};

// Iterates counts over the box restricted to coordinates != skip.
template <typename Fn>
void for_each_point(const SeriesBox& box, int skip, Fn&& fn) {
  const int k = static_cast<int>(box.n_max.size());
  std::vector<int> counts(k, 0);
  while (true) {
    double weight = 1.0;
    for (int x = 0; x < k; ++x)
      if (x != skip) weight *= box.w[x][static_cast<std::size_t>(counts[x])];
    fn(counts, weight);
    int x = 0;
    while (x < k) {
      if (x == skip) {
        ++x;
        continue;
      }
      if (counts[x] < box.n_max[x]) {
        ++counts[x];
        break;
      }
      counts[x] = 0;
      ++x;
    }
    if (x >= k) break;
  }
}

}  // namespace

double exact_utility_small(const RateVector& rates, const Scenario& scenario,
                           double tol) {
  const RateIndex idx = scenario.rate_index();
  if (!(rates.index == idx))
    throw IndexMismatch("exact_utility_small: rate vector shape mismatch");
  double total = 0.0;
  for (int l = 0; l < idx.learner_count; ++l) {
    const LearnerSpec& spec = scenario.learners[l];
    const Eigen::VectorXd means = learner_means(rates, scenario, l);
    const SeriesBox box = series_box(means, tol, learner_g_scale(scenario, spec));
    const GTable table(scenario, spec, box.n_max);
    const double base =
        log_det_psd<double>(spec.design.prior_precision);
    double acc = 0.0;
    for_each_point(box, -1, [&](const std::vector<int>& counts, double w) {
      acc += w * (table.at(counts) - base);
    });
    total += acc;
  }
  return total;
}

Eigen::MatrixXd exact_gradient_small(const RateVector& rates,
                                     const Scenario& scenario, double tol) {
  const RateIndex idx = scenario.rate_index();
  if (!(rates.index == idx))
    throw IndexMismatch("exact_gradient_small: rate vector shape mismatch");
  Eigen::MatrixXd grad(idx.learner_count, idx.feature_count);
  for (int l = 0; l < idx.learner_count; ++l) {
    const LearnerSpec& spec = scenario.learners[l];
    const Eigen::VectorXd means = learner_means(rates, scenario, l);
    const SeriesBox box = series_box(means, tol, learner_g_scale(scenario, spec));
    const GTable table(scenario, spec, box.n_max);
    for (int x = 0; x < idx.feature_count; ++x) {
      double partial = 0.0;
      for (int n = 0; n <= box.n_max[x]; ++n) {
        const double pn = box.w[x][static_cast<std::size_t>(n)];
        if (pn == 0.0) continue;
        double delta = 0.0;
        for_each_point(box, x, [&](std::vector<int>& counts, double w) {
          counts[x] = n + 1;
          const double hi = table.at(counts);
          counts[x] = n;
          const double lo = table.at(counts);
          delta += w * (hi - lo);
        });
        partial += pn * delta;
      }
      grad(l, x) = scenario.horizon * partial;
    }
  }
  return grad;
}

}  // namespace ednet
