#include "fading/pdt.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "fading/errors.hpp"
#include "fading/witness.hpp"

namespace fading {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

using Integrand = std::function<double(double)>;

// Endpoint-singular integrands (beta with p or q below 1) go to tanh-sinh.
double integrate(const Integrand& f, double lo, double hi,
                 const QuadratureSettings& quad, double* error,
                 bool singular = false) {
  if (!(hi > lo)) return 0.0;
  double err = 0.0;
  if (singular) {
    thread_local boost::math::quadrature::tanh_sinh<double> rule;
    const double value = rule.integrate(f, lo, hi, quad.tol, &err);
    if (error) *error += err;
    return value;
  }
  const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      f, lo, hi, quad.max_depth, quad.tol, &err);
  if (error) *error += err;
  return value;
}

// Probability mass of the untruncated log-normal on (0, 1].
double lognormal_mass(const LogNormalMarginal& m) {
  const boost::math::normal standard;
  return boost::math::cdf(standard, -m.mu / m.sigma);
}

double density(const BetaMarginal& m, double t) {
  const double log_beta =
      std::lgamma(m.p) + std::lgamma(m.q) - std::lgamma(m.p + m.q);
  return std::exp((m.p - 1.0) * std::log(t) + (m.q - 1.0) * std::log1p(-t) -
                  log_beta);
}

double density(const LogNormalMarginal& m, double t) {
  const double z = (std::log(t) - m.mu) / m.sigma;
  return std::exp(-0.5 * z * z) /
         (t * m.sigma * std::sqrt(2.0 * M_PI) * lognormal_mass(m));
}

// E[f(T)] splitting the integration range at the given kinks.
double expect(const Marginal& marginal, const Integrand& f,
              std::vector<double> breakpoints, const QuadratureSettings& quad,
              double* error) {
  if (const auto* point = std::get_if<PointMarginal>(&marginal))
    return f(point->t);
  std::vector<double> nodes{0.0, 1.0};
  for (double b : breakpoints)
    if (b > 0.0 && b < 1.0) nodes.push_back(b);
  std::sort(nodes.begin(), nodes.end());
  const Integrand weighted = std::visit(
      overloaded{
          [&](const BetaMarginal& m) -> Integrand {
            return [&f, m](double t) { return f(t) * density(m, t); };
          },
          [&](const LogNormalMarginal& m) -> Integrand {
            return [&f, m](double t) { return f(t) * density(m, t); };
          },
          [](const PointMarginal&) -> Integrand { return {}; },
      },
      marginal);
  const auto* beta = std::get_if<BetaMarginal>(&marginal);
  const bool singular = beta && (beta->p < 1.0 || beta->q < 1.0);
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i)
    sum += integrate(weighted, nodes[i], nodes[i + 1], quad, error, singular);
  return sum;
}

std::optional<double> point_of(const Marginal& m) {
  if (const auto* p = std::get_if<PointMarginal>(&m)) return p->t;
  return std::nullopt;
}

bool is_closed_form(const Marginal& m) {
  return !std::holds_alternative<LogNormalMarginal>(m);
}

// E[min(T_a, T_b)^k] for independent T_a ~ a, T_b ~ b.
double independent_min_moment(const Marginal& a, const Marginal& b, int k,
                              const QuadratureSettings& quad, double* error) {
  std::vector<double> outer_kinks;
  if (auto tb = point_of(b)) outer_kinks.push_back(*tb);
  const Integrand outer = [&](double ta) {
    return expect(
        b, [ta, k](double tb) { return std::pow(std::min(ta, tb), k); }, {ta},
        quad, nullptr);
  };
  return expect(a, outer, outer_kinks, quad, error);
}

void validate(const Marginal& marginal) {
  std::visit(overloaded{
                 [](const PointMarginal& m) {
                   if (!(m.t >= 0.0 && m.t <= 1.0))
                     throw ChannelError(
                         "point marginal: transmittance must lie in [0, 1]");
                 },
                 [](const BetaMarginal& m) {
                   if (!(m.p > 0.0 && m.q > 0.0) || !std::isfinite(m.p) ||
                       !std::isfinite(m.q))
                     throw ChannelError("beta marginal: p, q must be > 0");
                 },
                 [](const LogNormalMarginal& m) {
                   if (!std::isfinite(m.mu) || !(m.sigma > 0.0) ||
                       !std::isfinite(m.sigma))
                     throw ChannelError(
                         "log-normal marginal: mu finite, sigma > 0 required");
                   if (lognormal_mass(m) < 1e-12)
                     throw ChannelError(
                         "log-normal marginal: no probability mass on (0, 1]; "
                         "density is not normalizable");
                 },
             },
             marginal);
}

MomentEstimate from_marginals(const Marginal& a, const Marginal& b,
                              const QuadratureSettings& quad) {
  MomentEstimate out;
  double err = 0.0;
  const double ta = marginal_moment(a, 1, quad, &err);
  const double ta2 = marginal_moment(a, 2, quad, &err);
  const double tb = marginal_moment(b, 1, quad, &err);
  const double tb2 = marginal_moment(b, 2, quad, &err);
  out.moments = uncorrelated_moments(ta, ta2, tb, tb2);
  out.method = is_closed_form(a) && is_closed_form(b) ? "closed-form" : "quadrature";
  out.error_estimate = err;
  return out;
}

MomentEstimate correlated_estimate(double t, double t2, std::string method,
                                   double err) {
  MomentEstimate out;
  out.moments = correlated_moments(t, t2);
  out.method = std::move(method);
  out.error_estimate = err;
  return out;
}

std::vector<std::array<double, 2>> min_mapped(
    const std::vector<std::array<double, 2>>& samples) {
  std::vector<std::array<double, 2>> out;
  out.reserve(samples.size());
  for (const auto& s : samples) {
    const double t = std::min(s[0], s[1]);
    out.push_back({t, t});
  }
  return out;
}

// Moments of T = min(T_a, T_b) for T_a, T_b drawn from the model.
MomentEstimate min_moments(const PdtModel& model) {
  const QuadratureSettings& quad = model.quadrature;
  return std::visit(
      overloaded{
          [](const DeterministicPdt& d) {
            const double t = std::min(std::sqrt(d.eta_a), std::sqrt(d.eta_b));
            return correlated_estimate(t, std::min(d.eta_a, d.eta_b),
                                       "closed-form", 0.0);
          },
          [](const MomentsPdt& m) {
            if (!perfectly_correlated(m.moments))
              throw ChannelError(
                  "moments alone do not determine the distribution of "
                  "min(T_a, T_b); give a full distribution or samples");
            return correlated_estimate(m.moments.t_a, m.moments.t_a2,
                                       "closed-form", 0.0);
          },
          [&](const ProductPdt& p) {
            double err = 0.0;
            const double t = independent_min_moment(p.a, p.b, 1, quad, &err);
            const double t2 = independent_min_moment(p.a, p.b, 2, quad, &err);
            return correlated_estimate(t, t2, "quadrature", err);
          },
          [&](const SharedMarginalPdt& s) {
            double err = 0.0;
            if (s.coupling == Coupling::identical) {
              const double t = marginal_moment(s.marginal, 1, quad, &err);
              const double t2 = marginal_moment(s.marginal, 2, quad, &err);
              return correlated_estimate(
                  t, t2, is_closed_form(s.marginal) ? "closed-form" : "quadrature",
                  err);
            }
            const double t =
                independent_min_moment(s.marginal, s.marginal, 1, quad, &err);
            const double t2 =
                independent_min_moment(s.marginal, s.marginal, 2, quad, &err);
            return correlated_estimate(t, t2, "quadrature", err);
          },
          [](const EmpiricalPdt& e) {
            const auto mapped = min_mapped(e.samples);
            return moments_from_samples(mapped);
          },
          [](const MinCorrelatedPdt& m) { return min_moments(*m.source); },
      },
      model.kind);
}

double sample_marginal(const Marginal& marginal, std::mt19937_64& rng) {
  return std::visit(
      overloaded{
          [](const PointMarginal& m) { return m.t; },
          [&](const BetaMarginal& m) {
            std::gamma_distribution<double> gx(m.p, 1.0);
            std::gamma_distribution<double> gy(m.q, 1.0);
            const double x = gx(rng);
            const double y = gy(rng);
            return x + y > 0.0 ? x / (x + y) : 0.5;
          },
          [&](const LogNormalMarginal& m) {
            // Inverse CDF of the truncated distribution.
            const boost::math::normal standard;
            std::uniform_real_distribution<double> u(0.0, 1.0);
            double p = u(rng) * lognormal_mass(m);
            p = std::clamp(p, 1e-300, 1.0 - 1e-16);
            return std::min(
                1.0, std::exp(m.mu + m.sigma * boost::math::quantile(standard, p)));
          },
      },
      marginal);
}

}  // namespace

std::string kind_name(const PdtModel& model) {
  return std::visit(
      overloaded{
          [](const DeterministicPdt&) -> std::string { return "deterministic"; },
          [](const MomentsPdt&) -> std::string { return "moments"; },
          [](const ProductPdt&) -> std::string { return "independent-product"; },
          [](const SharedMarginalPdt& s) -> std::string {
            if (std::holds_alternative<BetaMarginal>(s.marginal)) return "beta";
            if (std::holds_alternative<LogNormalMarginal>(s.marginal))
              return "log-normal";
            return "point";
          },
          [](const EmpiricalPdt&) -> std::string { return "empirical-samples"; },
          [](const MinCorrelatedPdt&) -> std::string { return "min-correlated"; },
      },
      model.kind);
}

void validate(const PdtModel& model) {
  if (!(model.quadrature.tol > 0.0))
    throw ChannelError("quadrature tolerance must be > 0");
  std::visit(
      overloaded{
          [](const DeterministicPdt& d) {
            if (!(d.eta_a >= 0.0 && d.eta_a <= 1.0 && d.eta_b >= 0.0 &&
                  d.eta_b <= 1.0))
              throw ChannelError("deterministic channel: eta must lie in [0, 1]");
          },
          [](const MomentsPdt& m) { validate(m.moments); },
          [](const ProductPdt& p) {
            validate(p.a);
            validate(p.b);
          },
          [](const SharedMarginalPdt& s) { validate(s.marginal); },
          [](const EmpiricalPdt& e) {
            if (e.samples.empty())
              throw ChannelError("empirical channel: empty sample list");
            for (const auto& s : e.samples)
              if (!(s[0] >= 0.0 && s[0] <= 1.0 && s[1] >= 0.0 && s[1] <= 1.0))
                throw ChannelError(
                    "empirical channel: samples must lie in [0, 1]^2");
          },
          [](const MinCorrelatedPdt& m) {
            if (!m.source) throw ChannelError("min-correlated channel: no source");
            validate(*m.source);
          },
      },
      model.kind);
}

double marginal_moment(const Marginal& marginal, int k,
                       const QuadratureSettings& quad, double* error) {
  return std::visit(
      overloaded{
          [&](const PointMarginal& m) { return std::pow(m.t, k); },
          [&](const BetaMarginal& m) {
            // E[T] = p/(p+q), E[T^2] = p(p+1)/((p+q)(p+q+1))
            double value = 1.0;
            for (int i = 0; i < k; ++i) value *= (m.p + i) / (m.p + m.q + i);
            return value;
          },
          [&](const LogNormalMarginal&) {
            return expect(
                marginal, [k](double t) { return std::pow(t, k); }, {}, quad,
                error);
          },
      },
      marginal);
}

double marginal_normalization(const Marginal& marginal,
                              const QuadratureSettings& quad) {
  return expect(marginal, [](double) { return 1.0; }, {}, quad, nullptr);
}

double normalization(const PdtModel& model) {
  validate(model);
  const QuadratureSettings& quad = model.quadrature;
  return std::visit(
      overloaded{
          [](const DeterministicPdt&) { return 1.0; },
          [](const MomentsPdt&) { return 1.0; },
          [&](const ProductPdt& p) {
            return marginal_normalization(p.a, quad) *
                   marginal_normalization(p.b, quad);
          },
          [&](const SharedMarginalPdt& s) {
            const double n = marginal_normalization(s.marginal, quad);
            return s.coupling == Coupling::identical ? n : n * n;
          },
          [](const EmpiricalPdt&) { return 1.0; },
          [](const MinCorrelatedPdt& m) { return normalization(*m.source); },
      },
      model.kind);
}

MomentEstimate moments_from_pdt(const PdtModel& model) {
  validate(model);
  MomentEstimate out = std::visit(
      overloaded{
          [](const DeterministicPdt& d) {
            MomentEstimate e;
            e.moments = deterministic_moments(d.eta_a, d.eta_b);
            e.method = "closed-form";
            return e;
          },
          [](const MomentsPdt& m) {
            MomentEstimate e;
            e.moments = m.moments;
            e.method = "closed-form";
            return e;
          },
          [&](const ProductPdt& p) {
            return from_marginals(p.a, p.b, model.quadrature);
          },
          [&](const SharedMarginalPdt& s) {
            if (s.coupling == Coupling::independent)
              return from_marginals(s.marginal, s.marginal, model.quadrature);
            double err = 0.0;
            const double t = marginal_moment(s.marginal, 1, model.quadrature, &err);
            const double t2 =
                marginal_moment(s.marginal, 2, model.quadrature, &err);
            return correlated_estimate(
                t, t2, is_closed_form(s.marginal) ? "closed-form" : "quadrature",
                err);
          },
          [](const EmpiricalPdt& e) { return moments_from_samples(e.samples); },
          [](const MinCorrelatedPdt& m) { return min_moments(*m.source); },
      },
      model.kind);
  validate(out.moments);
  return out;
}

PdtModel adaptive_correlate(const PdtModel& model) {
  validate(model);
  PdtModel out = model;
  std::visit(
      overloaded{
          [&](const DeterministicPdt& d) {
            const double eta = std::min(d.eta_a, d.eta_b);
            out.kind = DeterministicPdt{eta, eta};
          },
          [&](const MomentsPdt& m) {
            if (!perfectly_correlated(m.moments))
              throw ChannelError(
                  "moments alone do not determine the distribution of "
                  "min(T_a, T_b); give a full distribution or samples");
          },
          [&](const ProductPdt&) {
            out.kind = MinCorrelatedPdt{std::make_shared<const PdtModel>(model)};
          },
          [&](const SharedMarginalPdt& s) {
            if (s.coupling == Coupling::independent)
              out.kind = MinCorrelatedPdt{std::make_shared<const PdtModel>(model)};
          },
          [&](const EmpiricalPdt& e) { out.kind = EmpiricalPdt{min_mapped(e.samples)}; },
          [](const MinCorrelatedPdt&) {},
      },
      model.kind);
  return out;
}

std::vector<std::array<double, 2>> sample_pdt(const PdtModel& model,
                                              std::size_t n,
                                              std::uint64_t seed) {
  validate(model);
  std::mt19937_64 rng(seed);
  std::vector<std::array<double, 2>> out;
  out.reserve(n);
  std::visit(
      overloaded{
          [&](const DeterministicPdt& d) {
            out.assign(n, {std::sqrt(d.eta_a), std::sqrt(d.eta_b)});
          },
          [](const MomentsPdt&) {
            throw ChannelError("a moments-only channel cannot be sampled");
          },
          [&](const ProductPdt& p) {
            for (std::size_t i = 0; i < n; ++i) {
              const double ta = sample_marginal(p.a, rng);
              const double tb = sample_marginal(p.b, rng);
              out.push_back({ta, tb});
            }
          },
          [&](const SharedMarginalPdt& s) {
            for (std::size_t i = 0; i < n; ++i) {
              const double ta = sample_marginal(s.marginal, rng);
              const double tb = s.coupling == Coupling::identical
                                    ? ta
                                    : sample_marginal(s.marginal, rng);
              out.push_back({ta, tb});
            }
          },
          [&](const EmpiricalPdt& e) {
            std::uniform_int_distribution<std::size_t> pick(0, e.samples.size() - 1);
            for (std::size_t i = 0; i < n; ++i) out.push_back(e.samples[pick(rng)]);
          },
          [&](const MinCorrelatedPdt& m) {
            out = min_mapped(sample_pdt(*m.source, n, seed));
          },
      },
      model.kind);
  return out;
}

MomentEstimate moments_from_samples(
    std::span<const std::array<double, 2>> samples) {
  if (samples.empty()) throw ChannelError("empirical channel: empty sample list");
  const double n = static_cast<double>(samples.size());
  // Running means and second central moments (Welford) of the five
  // statistics T_a, T_b, T_a^2, T_b^2, T_a T_b.
  std::array<double, 5> mean{};
  std::array<double, 5> m2{};
  std::size_t count = 0;
  for (const auto& s : samples) {
    const std::array<double, 5> x = {s[0], s[1], s[0] * s[0], s[1] * s[1],
                                     s[0] * s[1]};
    ++count;
    for (int i = 0; i < 5; ++i) {
      const double delta = x[i] - mean[i];
      mean[i] += delta / static_cast<double>(count);
      m2[i] += delta * (x[i] - mean[i]);
    }
  }
  auto se = [&](int i) {
    return count > 1 ? std::sqrt(m2[i] / (n - 1.0) / n) : 0.0;
  };
  MomentEstimate out;
  out.moments = {mean[0], mean[1], mean[2], mean[3], mean[4]};
  out.method = "sample-mean";
  out.samples = samples.size();
  out.standard_errors = MomentStandardErrors{se(0), se(1), se(2), se(3), se(4)};
  return out;
}

std::vector<std::array<double, 2>> parse_samples_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  auto trim = [](std::string s) {
    const auto first = s.find_first_not_of(" \t\r");
    const auto last = s.find_last_not_of(" \t\r");
    return first == std::string::npos ? std::string{}
                                      : s.substr(first, last - first + 1);
  };
  if (!std::getline(in, line) || trim(line) != "Ta,Tb")
    throw ConfigError("samples CSV line 1: expected header \"Ta,Tb\"");
  std::vector<std::array<double, 2>> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    const auto comma = line.find(',');
    try {
      if (comma == std::string::npos) throw std::invalid_argument("no comma");
      std::size_t used_a = 0;
      std::size_t used_b = 0;
      const std::string a = trim(line.substr(0, comma));
      const std::string b = trim(line.substr(comma + 1));
      const double ta = std::stod(a, &used_a);
      const double tb = std::stod(b, &used_b);
      if (used_a != a.size() || used_b != b.size())
        throw std::invalid_argument("trailing characters");
      out.push_back({ta, tb});
    } catch (const std::exception&) {
      throw ConfigError("samples CSV line " + std::to_string(line_no) +
                        ": expected two numbers \"Ta,Tb\"");
    }
  }
  return out;
}

}  // namespace fading
