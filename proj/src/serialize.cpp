#include "fading/serialize.hpp"

#include <fstream>
#include <sstream>

#include "fading/errors.hpp"

namespace fading {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

Coupling coupling_from(StrictObject& params) {
  if (!params.has("coupling")) return Coupling::independent;
  const std::string c = params.string("coupling");
  if (c == "independent") return Coupling::independent;
  if (c == "identical") return Coupling::identical;
  fail(params.field_path("coupling"), "expected \"independent\" or \"identical\"");
}

const char* coupling_name(Coupling c) {
  return c == Coupling::identical ? "identical" : "independent";
}

std::string read_file(const std::filesystem::path& p, const std::string& path) {
  std::ifstream in(p, std::ios::binary);
  if (!in) fail(path, "cannot read file " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

StrictObject::StrictObject(const json& j, std::string path)
    : j_(j), path_(std::move(path)) {
  if (!j_.is_object()) fail(path_, "expected a JSON object");
}

bool StrictObject::has(const std::string& key) const { return j_.contains(key); }

std::string StrictObject::field_path(const std::string& key) const {
  return path_.empty() ? key : path_ + "." + key;
}

const json& StrictObject::required(const std::string& key) {
  if (!j_.contains(key)) fail(field_path(key), "missing required field");
  used_.insert(key);
  return j_.at(key);
}

const json* StrictObject::optional(const std::string& key) {
  if (!j_.contains(key)) return nullptr;
  used_.insert(key);
  return &j_.at(key);
}

double StrictObject::number(const std::string& key) {
  const json& v = required(key);
  if (!v.is_number()) fail(field_path(key), "expected a number");
  return v.get<double>();
}

double StrictObject::number_or(const std::string& key, double fallback) {
  return has(key) ? number(key) : fallback;
}

std::string StrictObject::string(const std::string& key) {
  const json& v = required(key);
  if (!v.is_string()) fail(field_path(key), "expected a string");
  return v.get<std::string>();
}

void StrictObject::finish() const {
  for (const auto& [key, value] : j_.items())
    if (!used_.count(key)) fail(field_path(key), "unknown field");
}

json to_json(std::complex<double> z) { return json::array({z.real(), z.imag()}); }

std::complex<double> complex_from_json(const json& j, const std::string& path) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    fail(path, "expected a complex number [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

json to_json(const GaussianState<double>& state) {
  json v = json::array();
  const auto& m = state.covariance();
  for (int i = 0; i < 4; ++i) {
    json row = json::array();
    for (int k = 0; k < 4; ++k) row.push_back(to_json(m(i, k)));
    v.push_back(row);
  }
  return {{"mean_a", to_json(state.mean_a())},
          {"mean_b", to_json(state.mean_b())},
          {"V", v}};
}

GaussianState<double> state_from_json(const json& j, const std::string& path) {
  StrictObject obj(j, path);
  const auto mean_a = complex_from_json(obj.required("mean_a"), obj.field_path("mean_a"));
  const auto mean_b = complex_from_json(obj.required("mean_b"), obj.field_path("mean_b"));
  const json& v = obj.required("V");
  const std::string vpath = obj.field_path("V");
  if (!v.is_array() || v.size() != 4) fail(vpath, "expected a 4x4 array");
  Matrix4c<double> m;
  for (int i = 0; i < 4; ++i) {
    if (!v[i].is_array() || v[i].size() != 4) fail(vpath, "expected a 4x4 array");
    for (int k = 0; k < 4; ++k)
      m(i, k) = complex_from_json(
          v[i][k], vpath + "[" + std::to_string(i) + "][" + std::to_string(k) + "]");
  }
  obj.finish();
  try {
    return GaussianState<double>(mean_a, mean_b, m);
  } catch (const DomainError& e) {
    fail(path, e.what());
  }
}

json to_json(const ChannelMoments<double>& m) {
  return {{"t_a", m.t_a}, {"t_b", m.t_b}, {"t_a2", m.t_a2}, {"t_b2", m.t_b2}, {"t_ab", m.t_ab}};
}

ChannelMoments<double> moments_from_json(const json& j, const std::string& path) {
  StrictObject obj(j, path);
  ChannelMoments<double> m;
  m.t_a = obj.number("t_a");
  m.t_b = obj.number("t_b");
  m.t_a2 = obj.number("t_a2");
  m.t_b2 = obj.number("t_b2");
  m.t_ab = obj.number("t_ab");
  obj.finish();
  try {
    validate(m);
  } catch (const ChannelError& e) {
    fail(path, e.what());
  }
  return m;
}

json to_json(const WitnessReport<double>& r) {
  json entangled;
  if (r.verdict == Verdict::boundary)
    entangled = "boundary";
  else
    entangled = r.verdict == Verdict::entangled;
  return {{"w_atm", r.w_atm},
          {"terms", {{"loss", r.term_loss}, {"N", r.term_N}, {"F", r.term_F}, {"S", r.term_S}}},
          {"gamma", r.gamma},
          {"delta_gamma", r.delta_gamma},
          {"entangled", entangled}};
}

json to_json(const DuanReport<double>& r) {
  return {{"value", r.value},
          {"persistent_region_value", r.persistent_region_value},
          {"loss_term", r.loss_term},
          {"fluctuation_term", r.fluctuation_term}};
}

json to_json(const MomentEstimate& e) {
  json out = {{"moments", to_json(e.moments)}, {"method", e.method}};
  if (e.method == "quadrature") out["error_estimate"] = e.error_estimate;
  if (e.samples) out["samples"] = e.samples;
  if (e.standard_errors) {
    const auto& s = *e.standard_errors;
    out["standard_errors"] = {{"t_a", s.t_a}, {"t_b", s.t_b}, {"t_a2", s.t_a2},
                              {"t_b2", s.t_b2}, {"t_ab", s.t_ab}};
  }
  return out;
}

json to_json(const Marginal& m) {
  return std::visit(
      overloaded{
          [](const PointMarginal& p) -> json { return {{"kind", "point"}, {"t", p.t}}; },
          [](const BetaMarginal& b) -> json {
            return {{"kind", "beta"}, {"p", b.p}, {"q", b.q}};
          },
          [](const LogNormalMarginal& l) -> json {
            return {{"kind", "log-normal"}, {"mu", l.mu}, {"sigma", l.sigma}};
          },
      },
      m);
}

Marginal marginal_from_json(const json& j, const std::string& path) {
  StrictObject obj(j, path);
  const std::string kind = obj.string("kind");
  Marginal out;
  if (kind == "point") {
    out = PointMarginal{obj.number("t")};
  } else if (kind == "uniform") {
    out = BetaMarginal{1.0, 1.0};
  } else if (kind == "beta") {
    out = BetaMarginal{obj.number("p"), obj.number("q")};
  } else if (kind == "log-normal") {
    out = LogNormalMarginal{obj.number("mu"), obj.number("sigma")};
  } else {
    fail(obj.field_path("kind"),
         "unknown marginal kind \"" + kind + "\" (point|uniform|beta|log-normal)");
  }
  obj.finish();
  return out;
}

json to_json(const PdtModel& model) {
  json params = std::visit(
      overloaded{
          [](const DeterministicPdt& d) -> json {
            return {{"eta_a", d.eta_a}, {"eta_b", d.eta_b}};
          },
          [](const MomentsPdt& m) -> json { return to_json(m.moments); },
          [](const ProductPdt& p) -> json { return {{"a", to_json(p.a)}, {"b", to_json(p.b)}}; },
          [](const SharedMarginalPdt& s) -> json {
            json j = to_json(s.marginal);
            j.erase("kind");
            j["coupling"] = coupling_name(s.coupling);
            return j;
          },
          [](const EmpiricalPdt& e) -> json { return {{"samples", e.samples}}; },
          [](const MinCorrelatedPdt& m) -> json { return {{"source", to_json(*m.source)}}; },
      },
      model.kind);
  return {{"kind", kind_name(model)},
          {"params", params},
          {"quadrature", {{"tol", model.quadrature.tol}, {"max_depth", model.quadrature.max_depth}}},
          {"mc", {{"samples", model.mc.samples}, {"seed", model.mc.seed}}}};
}

PdtModel pdt_from_json(const json& j, const std::string& path,
                       const std::filesystem::path& base_dir) {
  StrictObject obj(j, path);
  const std::string kind = obj.string("kind");
  PdtModel model;

  if (const json* q = obj.optional("quadrature")) {
    StrictObject quad(*q, obj.field_path("quadrature"));
    model.quadrature.tol = quad.number_or("tol", model.quadrature.tol);
    model.quadrature.max_depth =
        static_cast<unsigned>(quad.number_or("max_depth", model.quadrature.max_depth));
    quad.finish();
  }
  if (const json* mc = obj.optional("mc")) {
    StrictObject m(*mc, obj.field_path("mc"));
    if (const json* s = m.optional("samples")) {
      if (!s->is_number_integer() || s->get<std::int64_t>() <= 0)
        fail(m.field_path("samples"), "expected a positive integer");
      model.mc.samples = s->get<std::size_t>();
    }
    if (const json* s = m.optional("seed")) {
      if (!s->is_number_integer() || (!s->is_number_unsigned() && s->get<std::int64_t>() < 0))
        fail(m.field_path("seed"), "expected an unsigned integer");
      model.mc.seed = s->get<std::uint64_t>();
    }
    m.finish();
  }

  static const json kEmpty = json::object();
  const json* pj = obj.optional("params");
  StrictObject params(pj ? *pj : kEmpty, obj.field_path("params"));

  if (kind == "deterministic") {
    model.kind = DeterministicPdt{params.number("eta_a"), params.number("eta_b")};
  } else if (kind == "moments") {
    if (!pj) fail(obj.field_path("params"), "missing required field");
    model.kind = MomentsPdt{moments_from_json(*pj, obj.field_path("params"))};
    obj.finish();
    return model;
  } else if (kind == "independent-product") {
    model.kind = ProductPdt{marginal_from_json(params.required("a"), params.field_path("a")),
                            marginal_from_json(params.required("b"), params.field_path("b"))};
  } else if (kind == "log-normal") {
    model.kind = SharedMarginalPdt{LogNormalMarginal{params.number("mu"), params.number("sigma")},
                                   coupling_from(params)};
  } else if (kind == "beta") {
    model.kind =
        SharedMarginalPdt{BetaMarginal{params.number("p"), params.number("q")}, coupling_from(params)};
  } else if (kind == "empirical-samples") {
    EmpiricalPdt e;
    if (const json* s = params.optional("samples")) {
      const std::string spath = params.field_path("samples");
      if (!s->is_array()) fail(spath, "expected an array of [Ta, Tb] pairs");
      for (std::size_t i = 0; i < s->size(); ++i) {
        const json& pair = (*s)[i];
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number())
          fail(spath + "[" + std::to_string(i) + "]", "expected [Ta, Tb]");
        e.samples.push_back({pair[0].get<double>(), pair[1].get<double>()});
      }
    } else if (params.has("csv")) {
      std::filesystem::path p = params.string("csv");
      if (p.is_relative()) p = base_dir / p;
      try {
        e.samples = parse_samples_csv(read_file(p, params.field_path("csv")));
      } catch (const ConfigError& err) {
        fail(params.field_path("csv"), err.what());
      }
    } else {
      fail(params.path(), "empirical-samples needs \"samples\" or \"csv\"");
    }
    model.kind = std::move(e);
  } else if (kind == "min-correlated") {
    model.kind = MinCorrelatedPdt{std::make_shared<const PdtModel>(
        pdt_from_json(params.required("source"), params.field_path("source"), base_dir))};
  } else {
    fail(obj.field_path("kind"),
         "unknown channel kind \"" + kind +
             "\" (deterministic|moments|independent-product|log-normal|beta|"
             "empirical-samples|min-correlated)");
  }
  params.finish();
  obj.finish();
  try {
    validate(model);
  } catch (const ChannelError& e) {
    fail(path, e.what());
  }
  return model;
}

}  // namespace fading
