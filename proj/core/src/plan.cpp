#include "eotbench/plan.hpp"

#include "eotbench/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace eotbench {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

ConditionalPlanMixture::ConditionalPlanMixture(const BenchmarkPair& pair, Point x)
    : x_(std::move(x)), cache_(pair.shared_cache()) {
  require_dim(x_.size(), pair.dim(), "conditional plan point");
  require(x_.allFinite(), ErrorCode::kNonFinite, "conditional plan point is not finite");
  const auto& comps = pair.potential().components();
  const std::size_t n = comps.size();
  log_tilde_.resize(n);
  means_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& c = (*cache_)[k];
    means_[k] = c.mean_offset + c.resolvent.apply(x_);
    if (comps[k].log_weight == kNegInf) {
      log_tilde_[k] = kNegInf;
      continue;
    }
    log_tilde_[k] = c.log_prefix - 0.5 * c.b_matrix.quad_form(x_ - comps[k].center);
  }
  const double total = log_sum_exp(log_tilde_);
  log_gamma_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    log_gamma_[k] = log_tilde_[k] == kNegInf ? kNegInf : log_tilde_[k] - total;
  }
}

double ConditionalPlanMixture::gamma(std::size_t n) const { return std::exp(log_gamma_.at(n)); }

double ConditionalPlanMixture::log_density(const Eigen::Ref<const Eigen::VectorXd>& y) const {
  require_dim(y.size(), dim(), "plan density argument");
  std::vector<double> terms(size(), kNegInf);
  for (std::size_t k = 0; k < size(); ++k) {
    if (log_gamma_[k] == kNegInf) continue;
    terms[k] = log_gamma_[k] + covariance(k).log_density(y, means_[k]);
  }
  return log_sum_exp(terms);
}

std::size_t ConditionalPlanMixture::pick_component(double u) const {
  const double peak = *std::max_element(log_gamma_.begin(), log_gamma_.end());
  std::vector<double> cumulative(size());
  double total = 0.0;
  for (std::size_t k = 0; k < size(); ++k) {
    total += log_gamma_[k] == kNegInf ? 0.0 : std::exp(log_gamma_[k] - peak);
    cumulative[k] = total;
  }
  const double target = u * total;
  for (std::size_t k = 0; k < size(); ++k) {
    if (target < cumulative[k]) return k;
  }
  // u * total rounded up to total: take the last component with mass.
  for (std::size_t k = size(); k-- > 0;) {
    if (log_gamma_[k] != kNegInf) return k;
  }
  return 0;
}

Point ConditionalPlanMixture::sample(CounterRng& rng, std::size_t* component) const {
  const std::size_t k = pick_component(rng.uniform());
  if (component != nullptr) *component = k;
  return means_[k] + covariance(k).transform(rng.normal_vector(dim()));
}

ConditionalPlanMixture conditional_plan(const BenchmarkPair& pair,
                                        const Eigen::Ref<const Eigen::VectorXd>& x) {
  return ConditionalPlanMixture(pair, x);
}

SampleMatrix sample_conditional(const ConditionalPlanMixture& plan, const Seed& seed,
                                std::size_t count) {
  SampleMatrix out(static_cast<Index>(count), plan.dim());
  parallel_for(count, [&](std::size_t i) {
    CounterRng rng(seed, i);
    out.row(static_cast<Index>(i)) = plan.sample(rng).transpose();
  });
  return out;
}

SamplePair draw_joint(const BenchmarkPair& pair, CounterRng& rng) {
  SamplePair out;
  out.x = pair.source().sample(rng);
  const ConditionalPlanMixture plan(pair, out.x);
  out.y = plan.sample(rng, &out.component);
  return out;
}

JointSamples sample_joint(const BenchmarkPair& pair, const Seed& seed, std::size_t count) {
  JointSamples out;
  const auto rows = static_cast<Index>(count);
  out.x.resize(rows, pair.dim());
  out.y.resize(rows, pair.dim());
  out.component.assign(count, 0);
  parallel_for(count, [&](std::size_t i) {
    CounterRng rng(seed, i);
    const SamplePair draw = draw_joint(pair, rng);
    out.x.row(static_cast<Index>(i)) = draw.x.transpose();
    out.y.row(static_cast<Index>(i)) = draw.y.transpose();
    out.component[i] = draw.component;
  });
  return out;
}

SampleMatrix sample_source(const BenchmarkPair& pair, const Seed& seed, std::size_t count) {
  SampleMatrix out(static_cast<Index>(count), pair.dim());
  parallel_for(count, [&](std::size_t i) {
    CounterRng rng(seed, i);
    out.row(static_cast<Index>(i)) = pair.source().sample(rng).transpose();
  });
  return out;
}

SampleMatrix sample_target(const BenchmarkPair& pair, const Seed& seed, std::size_t count) {
  return sample_joint(pair, seed, count).y;
}

Moments conditional_moments(const ConditionalPlanMixture& plan) {
  const Index d = plan.dim();
  Point mean = Point::Zero(d);
  for (std::size_t k = 0; k < plan.size(); ++k) mean += plan.gamma(k) * plan.mean(k);
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
  double scalar_part = 0.0;
  for (std::size_t k = 0; k < plan.size(); ++k) {
    const double g = plan.gamma(k);
    if (g == 0.0) continue;
    const Point dev = plan.mean(k) - mean;
    cov.noalias() += g * dev * dev.transpose();
    const auto& sigma = plan.covariance(k).covariance();
    if (sigma.is_scalar()) {
      scalar_part += g * sigma.scalar_value();
    } else {
      cov += g * sigma.to_dense();
    }
  }
  cov.diagonal().array() += scalar_part;
  return {mean, SymMatrix::symmetrized(cov)};
}

Moments target_moments(const BenchmarkPair& pair, const Seed& seed, std::size_t count) {
  require(count >= 2, ErrorCode::kInvalidArgument, "target_moments needs at least two draws");
  const Index d = pair.dim();
  const std::size_t n_comp = pair.size();
  // Shift for the scatter of conditional means, limiting cancellation.
  const Point shift = conditional_moments(conditional_plan(pair, pair.source().mean())).mean;

  struct Partial {
    Point mean_sum;
    Eigen::MatrixXd scatter;   // Σ (m_i − s)(m_i − s)ᵀ
    Eigen::MatrixXd between;   // Σ Σₙ γₙ (μₙ − m_i)(μₙ − m_i)ᵀ
    std::vector<double> gamma_sum;
  };
  std::vector<Partial> partials(block_count(count));
  parallel_blocks(count, [&](std::size_t block, std::size_t begin, std::size_t end) {
    Partial p{Point::Zero(d), Eigen::MatrixXd::Zero(d, d), Eigen::MatrixXd::Zero(d, d),
              std::vector<double>(n_comp, 0.0)};
    for (std::size_t i = begin; i < end; ++i) {
      CounterRng rng(seed, i);
      const ConditionalPlanMixture plan(pair, pair.source().sample(rng));
      Point m = Point::Zero(d);
      for (std::size_t k = 0; k < n_comp; ++k) m += plan.gamma(k) * plan.mean(k);
      for (std::size_t k = 0; k < n_comp; ++k) {
        const double g = plan.gamma(k);
        p.gamma_sum[k] += g;
        if (g == 0.0) continue;
        const Point dev = plan.mean(k) - m;
        p.between.noalias() += g * dev * dev.transpose();
      }
      const Point centred = m - shift;
      p.mean_sum += m;
      p.scatter.noalias() += centred * centred.transpose();
    }
    partials[block] = std::move(p);
  });

  Point mean_sum = Point::Zero(d);
  Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(d, d);
  Eigen::MatrixXd within = Eigen::MatrixXd::Zero(d, d);
  std::vector<double> gamma_sum(n_comp, 0.0);
  for (const auto& p : partials) {
    mean_sum += p.mean_sum;
    scatter += p.scatter;
    within += p.between;
    for (std::size_t k = 0; k < n_comp; ++k) gamma_sum[k] += p.gamma_sum[k];
  }
  const double n = static_cast<double>(count);
  for (std::size_t k = 0; k < n_comp; ++k) {
    within += gamma_sum[k] * pair.cache(k).sigma->covariance().to_dense();
  }
  const Point mean = mean_sum / n;
  const Point offset = mean - shift;
  const Eigen::MatrixXd mean_cov = (scatter - n * offset * offset.transpose()) / (n - 1.0);
  return {mean, SymMatrix::symmetrized(within / n + mean_cov)};
}

double log_forward_density_unnormalized(const BenchmarkPair& pair,
                                        const Eigen::Ref<const Eigen::VectorXd>& x,
                                        const Eigen::Ref<const Eigen::VectorXd>& y) {
  require_dim(x.size(), pair.dim(), "forward density x");
  require_dim(y.size(), pair.dim(), "forward density y");
  return (potential_value(pair.potential(), y) - 0.5 * (x - y).squaredNorm()) / pair.epsilon();
}

ValueAndGradient log_reverse_density_unnormalized(const BenchmarkPair& pair,
                                                  const Eigen::Ref<const Eigen::VectorXd>& y,
                                                  const Eigen::Ref<const Eigen::VectorXd>& x) {
  require_dim(y.size(), pair.dim(), "reverse density y");
  const ConditionalPlanMixture plan(pair, x);
  const std::size_t n = plan.size();
  const double eps = pair.epsilon();
  const auto& comps = pair.potential().components();

  // ∇ log w̃ₙ(x) = −Bₙ (x − bₙ); ∇ log γₙ = that minus its γ-average.
  std::vector<Point> grad_tilde(n);
  Point grad_log_norm = Point::Zero(pair.dim());
  for (std::size_t k = 0; k < n; ++k) {
    grad_tilde[k] = -pair.cache(k).b_matrix.apply(x - comps[k].center);
    const double g = plan.gamma(k);
    if (g > 0.0) grad_log_norm += g * grad_tilde[k];
  }

  std::vector<double> terms(n, kNegInf);
  for (std::size_t k = 0; k < n; ++k) {
    if (plan.log_gamma()[k] == kNegInf) continue;
    terms[k] = plan.log_gamma()[k] + plan.covariance(k).log_density(y, plan.mean(k));
  }
  const double log_cond = log_sum_exp(terms);

  // μₙ depends on x through (Aₙ + I)⁻¹, and (Aₙ + I)⁻¹ Σₙ⁻¹ = I/ε.
  Point grad = Point::Zero(pair.dim());
  for (std::size_t k = 0; k < n; ++k) {
    if (terms[k] == kNegInf) continue;
    const double r = std::exp(terms[k] - log_cond);
    if (r == 0.0) continue;
    grad += r * (grad_tilde[k] - grad_log_norm + (y - plan.mean(k)) / eps);
  }

  Point source_score;
  const double log_source = pair.source().log_density(x, source_score);
  return {log_cond + log_source, grad + source_score};
}

}  // namespace eotbench
