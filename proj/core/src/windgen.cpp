#include "mgdispatch/windgen.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>
#include <string>

#include "mgdispatch/rng.hpp"

namespace mgdispatch {

namespace {

constexpr std::uint32_t kPurposeScenarios = 0;
constexpr std::uint32_t kPurposeMeans = 1;

Eigen::MatrixXd correlation_factor(const Eigen::MatrixXd& corr) {
  const int n = static_cast<int>(corr.rows());
  if (corr.cols() != n) throw std::invalid_argument("farm correlation must be square");
  if (!corr.isApprox(corr.transpose(), 1e-12))
    throw std::invalid_argument("farm correlation must be symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(corr);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  // Semidefinite but rank-deficient matrices get an eigenvalue square root.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(corr);
  const double min_eig = es.eigenvalues().minCoeff();
  if (min_eig < -1e-8) {
    throw std::invalid_argument("farm correlation is not positive semidefinite (min eigenvalue " +
                                std::to_string(min_eig) + ")");
  }
  Eigen::VectorXd d = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * d.asDiagonal();
}

double weibull_from_latent(double z, const WindFarmParams& farm) {
  // v = F^{-1}(Phi(z)) with F the Weibull CDF; the tail 1-Phi(z) is computed
  // directly through erfc to stay accurate for large z.
  const double tail = 0.5 * std::erfc(z / std::sqrt(2.0));
  return farm.weibull_scale * std::pow(-std::log(tail), 1.0 / farm.weibull_shape);
}

// Streams scenarios one at a time; draw order is fixed as (scenario, slot)
// with one engine per farm, so output is independent of how many scenarios
// the caller consumes in total.
class SpeedSampler {
 public:
  SpeedSampler(const std::vector<WindFarmParams>& farms, const Eigen::MatrixXd& corr,
               std::uint64_t seed, std::uint32_t purpose)
      : farms_(farms), factor_(correlation_factor(corr)) {
    engines_.reserve(farms.size());
    for (std::uint32_t i = 0; i < farms.size(); ++i)
      engines_.push_back(make_substream(seed, i, purpose));
  }

  // Fills `speeds` (I x T) with one trajectory per farm.
  void next(Eigen::MatrixXd& speeds, int T) {
    const int I = static_cast<int>(farms_.size());
    speeds.resize(I, T);
    Eigen::VectorXd iid(I), eps(I), z(I);
    for (int t = 0; t < T; ++t) {
      for (int i = 0; i < I; ++i) iid[i] = standard_normal_sample(engines_[static_cast<size_t>(i)]);
      eps.noalias() = factor_ * iid;
      for (int i = 0; i < I; ++i) {
        const double phi = farms_[static_cast<size_t>(i)].ar_coeff;
        z[i] = (t == 0) ? eps[i] : phi * z[i] + std::sqrt(1.0 - phi * phi) * eps[i];
        speeds(i, t) = weibull_from_latent(z[i], farms_[static_cast<size_t>(i)]);
      }
    }
  }

 private:
  const std::vector<WindFarmParams>& farms_;
  Eigen::MatrixXd factor_;
  std::vector<std::mt19937_64> engines_;
};

}  // namespace

std::vector<Eigen::MatrixXd> sample_wind_speeds(const std::vector<WindFarmParams>& farms,
                                                const Eigen::MatrixXd& corr, int T, int n,
                                                std::uint64_t seed) {
  if (n < 1 || T < 1) throw std::invalid_argument("sample_wind_speeds: need n >= 1 and T >= 1");
  if (corr.rows() != static_cast<Eigen::Index>(farms.size()))
    throw std::invalid_argument("sample_wind_speeds: correlation size does not match farm count");
  SpeedSampler sampler(farms, corr, seed, kPurposeScenarios);
  std::vector<Eigen::MatrixXd> out(static_cast<size_t>(n));
  for (auto& m : out) sampler.next(m, T);
  return out;
}

double power_curve(double v, const WindFarmParams& farm) {
  if (v < farm.v_cut_in || v >= farm.v_cut_out) return 0.0;
  if (v >= farm.v_rated) return farm.p_rated;
  return farm.p_rated * (v - farm.v_cut_in) / (farm.v_rated - farm.v_cut_in);
}

ScenarioSet build_scenarios(const DispatchProblem& problem, int n_samples, std::uint64_t seed,
                            int mean_samples, bool keep_per_farm) {
  if (n_samples < 1) throw std::invalid_argument("build_scenarios: n_samples must be >= 1");
  if (mean_samples < n_samples)
    throw std::invalid_argument("build_scenarios: mean_samples must be >= n_samples");
  const int T = problem.horizon;
  const int I = problem.num_farms();

  ScenarioSet set;
  set.seed = seed;
  set.n_samples = n_samples;
  set.aggregate.setZero(n_samples, T);
  if (keep_per_farm) set.per_farm.reserve(static_cast<size_t>(n_samples));

  SpeedSampler sampler(problem.wind_farms, problem.farm_correlation, seed, kPurposeScenarios);
  Eigen::MatrixXd speeds, power(I, T);
  for (int s = 0; s < n_samples; ++s) {
    sampler.next(speeds, T);
    for (int i = 0; i < I; ++i)
      for (int t = 0; t < T; ++t)
        power(i, t) = power_curve(speeds(i, t), problem.wind_farms[static_cast<size_t>(i)]);
    set.aggregate.row(s) = power.colwise().sum();
    if (keep_per_farm) set.per_farm.push_back(power);
  }

  // Means come from their own substream so they do not depend on n_samples.
  SpeedSampler mean_sampler(problem.wind_farms, problem.farm_correlation, seed, kPurposeMeans);
  set.means.setZero(I, T);
  for (int s = 0; s < mean_samples; ++s) {
    mean_sampler.next(speeds, T);
    for (int i = 0; i < I; ++i)
      for (int t = 0; t < T; ++t)
        set.means(i, t) += power_curve(speeds(i, t), problem.wind_farms[static_cast<size_t>(i)]);
  }
  set.means /= static_cast<double>(mean_samples);
  return set;
}

}  // namespace mgdispatch
