#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "irl/rng.hpp"

namespace irl::continuity {

/// Confluent hypergeometric 1F1(a; b; z) by its rising-factorial series.
/// Summation stops at relative tolerance 1e-12; for a a non-positive integer
/// the series is a polynomial and is summed exactly. Throws DomainError when b
/// is a non-positive integer.
double hyp1f1(double a, double b, double z);

/// E|X|^m for X ~ N(mean, var), m > 0:
///   var^{m/2} 2^{m/2} Gamma((1+m)/2) / sqrt(pi) * 1F1(-m/2; 1/2; -mean^2 / (2 var))
double gaussian_abs_moment(double m, double mean, double var);

enum class PolicyKind {
  WhiteNoiseGaussian,  // a_t = mu(s_t) + sigma(s_t) N_t, fresh noise every step
  IrlSde,              // da = mu(s) dt + sigma(s) dB
};

std::string to_string(PolicyKind k);

/// Scalar policy coefficients as functions of a scalar state. States are
/// redrawn i.i.d. N(0, 1) at every step.
struct PolicyModel {
  std::function<double(double)> mu = [](double) { return 0.0; };
  std::function<double(double)> sigma = [](double) { return 1.0; };
};

struct MomentReport {
  PolicyKind policy = PolicyKind::IrlSde;
  double m = 0.0;
  std::vector<double> lags;        // |t - s|, strictly increasing
  std::vector<double> moments;     // estimated E|a_t - a_s|^m
  std::vector<double> std_errors;  // Monte-Carlo standard error of each estimate
  double slope = 0.0;              // least-squares fit of log moment vs log lag
  double intercept = 0.0;
};

/// Estimates E|a_{s+lag} - a_s|^m over `paths` independent paths for each lag
/// (lag_steps * dt) and fits the log-log slope. Requires at least 1000 paths.
MomentReport continuity_scan(PolicyKind policy, const PolicyModel& model, double m,
                             const std::vector<int>& lag_steps, double dt, int paths,
                             RngStream& rng);

void write_report_csv(std::ostream& os, const MomentReport& r);

}  // namespace irl::continuity
