#pragma once

// Joint probability distributions of the transmission coefficients
// (T_a, T_b) on [0,1]^2 and the moments they induce.

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "fading/channel.hpp"

namespace fading {

/// Delta distribution at amplitude transmittance t.
struct PointMarginal {
  double t{1};
};

/// Beta(p, q) on [0, 1]; Beta(1, 1) is uniform.
struct BetaMarginal {
  double p{1};
  double q{1};
};

/// exp(N(mu, sigma^2)) truncated to (0, 1] and renormalised.
struct LogNormalMarginal {
  double mu{0};
  double sigma{1};
};

using Marginal = std::variant<PointMarginal, BetaMarginal, LogNormalMarginal>;

enum class Coupling {
  independent,  // T_a, T_b i.i.d.
  identical,    // T_a = T_b
};

struct DeterministicPdt {
  double eta_a{1};  // <T_a^2>
  double eta_b{1};
};

struct MomentsPdt {
  ChannelMoments<double> moments;
};

struct ProductPdt {
  Marginal a;
  Marginal b;
};

/// Both modes drawn from the same marginal family ("log-normal", "beta").
struct SharedMarginalPdt {
  Marginal marginal;
  Coupling coupling{Coupling::independent};
};

struct EmpiricalPdt {
  std::vector<std::array<double, 2>> samples;
};

struct PdtModel;

/// T_a = T_b = min(T_a', T_b') with (T_a', T_b') drawn from source.
struct MinCorrelatedPdt {
  std::shared_ptr<const PdtModel> source;
};

struct QuadratureSettings {
  double tol{1e-9};
  unsigned max_depth{15};
};

struct MonteCarloSettings {
  std::size_t samples{100000};
  std::uint64_t seed{1};
};

struct PdtModel {
  std::variant<DeterministicPdt, MomentsPdt, ProductPdt, SharedMarginalPdt,
               EmpiricalPdt, MinCorrelatedPdt>
      kind;
  QuadratureSettings quadrature{};
  MonteCarloSettings mc{};
};

/// Name used in channel files.
std::string kind_name(const PdtModel& model);

struct MomentStandardErrors {
  double t_a{0};
  double t_b{0};
  double t_a2{0};
  double t_b2{0};
  double t_ab{0};
};

struct MomentEstimate {
  ChannelMoments<double> moments;
  std::string method;          // closed-form | quadrature | sample-mean
  double error_estimate{0};    // quadrature error bound, summed
  std::size_t samples{0};
  std::optional<MomentStandardErrors> standard_errors;
};

/// Checks parameters of a model; throws ChannelError.
void validate(const PdtModel& model);

/// The five transmittance moments of a model. Moments of density kinds come
/// from adaptive Gauss-Kronrod quadrature; empirical models give sample
/// means with standard errors.
MomentEstimate moments_from_pdt(const PdtModel& model);

/// <T^k> of a single marginal, k = 1, 2 (quadrature where needed).
double marginal_moment(const Marginal& marginal, int k,
                       const QuadratureSettings& quad = {},
                       double* error = nullptr);

/// Integral of the marginal density over [0, 1]; 1 for valid models.
double marginal_normalization(const Marginal& marginal,
                              const QuadratureSettings& quad = {});

/// Integral of the joint density over [0, 1]^2.
double normalization(const PdtModel& model);

/// The adaptive protocol: both receivers attenuate to the worse of the two
/// transmittances, T_a = T_b = min(T_a, T_b).
PdtModel adaptive_correlate(const PdtModel& model);

/// Draws n pairs (T_a, T_b). Deterministic for a given seed.
std::vector<std::array<double, 2>> sample_pdt(const PdtModel& model,
                                              std::size_t n,
                                              std::uint64_t seed);

MomentEstimate moments_from_samples(
    std::span<const std::array<double, 2>> samples);

/// Parses "Ta,Tb" CSV text (header mandatory).
std::vector<std::array<double, 2>> parse_samples_csv(const std::string& text);

}  // namespace fading
