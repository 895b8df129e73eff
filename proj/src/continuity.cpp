#include "irl/continuity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "irl/errors.hpp"

namespace irl::continuity {
namespace {

bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }

}  // namespace

double hyp1f1(double a, double b, double z) {
  if (is_nonpositive_integer(b)) throw DomainError("hyp1f1: b must not be a non-positive integer");
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(z))
    throw DomainError("hyp1f1: non-finite argument");

  double term = 1.0;
  double sum = 1.0;
  constexpr int kMaxTerms = 100000;
  for (int n = 0; n < kMaxTerms; ++n) {
    // a^{(n+1)} z^{n+1} / (b^{(n+1)} (n+1)!) from the previous term
    term *= (a + n) * z / ((b + n) * (n + 1.0));
    if (term == 0.0) return sum;  // a is a non-positive integer: polynomial, exact
    sum += term;
    if (std::abs(term) <= 1e-12 * std::abs(sum) && n + 1 > std::abs(z)) return sum;
  }
  throw DomainError("hyp1f1: series did not converge");
}

double gaussian_abs_moment(double m, double mean, double var) {
  if (!(m > 0.0)) throw DomainError("gaussian_abs_moment: m must be positive");
  if (!(var > 0.0)) throw DomainError("gaussian_abs_moment: variance must be positive");
  const double scale = std::pow(2.0 * var, m / 2.0) * std::tgamma((1.0 + m) / 2.0) /
                       std::sqrt(std::numbers::pi);
  return scale * hyp1f1(-m / 2.0, 0.5, -mean * mean / (2.0 * var));
}

std::string to_string(PolicyKind k) {
  return k == PolicyKind::IrlSde ? "irl_sde" : "white_noise_gaussian";
}

MomentReport continuity_scan(PolicyKind policy, const PolicyModel& model, double m,
                             const std::vector<int>& lag_steps, double dt, int paths,
                             RngStream& rng) {
  if (!(m > 0.0)) throw DomainError("continuity_scan: moment order must be positive");
  if (!(dt > 0.0)) throw DomainError("continuity_scan: dt must be positive");
  if (paths < 1000) throw DomainError("continuity_scan: need at least 1000 paths");
  if (lag_steps.size() < 2) throw DomainError("continuity_scan: need at least two lags");
  for (std::size_t i = 0; i < lag_steps.size(); ++i) {
    if (lag_steps[i] <= 0 || (i > 0 && lag_steps[i] <= lag_steps[i - 1]))
      throw DomainError("continuity_scan: lags must be positive and strictly increasing");
  }

  const int horizon = lag_steps.back();
  const std::size_t n_lags = lag_steps.size();
  std::vector<double> sum(n_lags, 0.0), sum_sq(n_lags, 0.0);
  std::vector<double> a(static_cast<std::size_t>(horizon) + 1);
  const double sqrt_dt = std::sqrt(dt);

  for (int p = 0; p < paths; ++p) {
    RngStream r = rng.split(static_cast<std::uint64_t>(p));
    if (policy == PolicyKind::IrlSde) {
      a[0] = 0.0;
      for (int k = 0; k < horizon; ++k) {
        const double s = r.normal();
        a[k + 1] = a[k] + model.mu(s) * dt + model.sigma(s) * sqrt_dt * r.normal();
      }
    } else {
      for (int k = 0; k <= horizon; ++k) {
        const double s = r.normal();
        a[k] = model.mu(s) + model.sigma(s) * r.normal();
      }
    }
    for (std::size_t i = 0; i < n_lags; ++i) {
      const double v = std::pow(std::abs(a[static_cast<std::size_t>(lag_steps[i])] - a[0]), m);
      sum[i] += v;
      sum_sq[i] += v * v;
    }
  }

  MomentReport rep;
  rep.policy = policy;
  rep.m = m;
  const double np = paths;
  for (std::size_t i = 0; i < n_lags; ++i) {
    const double mean = sum[i] / np;
    const double var = std::max(0.0, (sum_sq[i] / np - mean * mean) * np / (np - 1.0));
    rep.lags.push_back(lag_steps[i] * dt);
    rep.moments.push_back(mean);
    rep.std_errors.push_back(std::sqrt(var / np));
  }

  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n_lags; ++i) {
    mx += std::log(rep.lags[i]);
    my += std::log(rep.moments[i]);
  }
  mx /= static_cast<double>(n_lags);
  my /= static_cast<double>(n_lags);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n_lags; ++i) {
    const double dx = std::log(rep.lags[i]) - mx;
    sxy += dx * (std::log(rep.moments[i]) - my);
    sxx += dx * dx;
  }
  rep.slope = sxy / sxx;
  rep.intercept = my - rep.slope * mx;
  return rep;
}

void write_report_csv(std::ostream& os, const MomentReport& r) {
  os << "policy,m,lag,moment,std_error,slope,intercept\n";
  const auto old = os.precision(17);
  for (std::size_t i = 0; i < r.lags.size(); ++i)
    os << to_string(r.policy) << "," << r.m << "," << r.lags[i] << "," << r.moments[i] << ","
       << r.std_errors[i] << "," << r.slope << "," << r.intercept << "\n";
  os.precision(old);
}

}  // namespace irl::continuity
