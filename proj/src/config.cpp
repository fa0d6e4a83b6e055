#include "fading/config.hpp"

#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include "fading/errors.hpp"
#include "fading/identity_suite.hpp"
#include "fading/witness.hpp"

namespace fading {

namespace {

struct CommandName {
  Command command;
  const char* name;
};

constexpr CommandName kCommands[] = {
    {Command::witness, "witness"},
    {Command::channel_moments, "channel-moments"},
    {Command::adaptive, "adaptive"},
    {Command::sweep_squeezing, "sweep-squeezing"},
    {Command::contour_displacement, "contour-displacement"},
    {Command::region_phase, "region-phase"},
    {Command::identity_suite, "identity-suite"},
};

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

bool is_sweep(Command c) {
  return c == Command::sweep_squeezing || c == Command::contour_displacement ||
         c == Command::region_phase;
}

std::size_t count_field(StrictObject& obj, const std::string& key, std::size_t fallback) {
  const json* v = obj.optional(key);
  if (!v) return fallback;
  if (!v->is_number_integer() || v->get<std::int64_t>() < 0)
    fail(obj.field_path(key), "expected a non-negative integer");
  return v->get<std::size_t>();
}

bool bool_field(StrictObject& obj, const std::string& key, bool fallback) {
  const json* v = obj.optional(key);
  if (!v) return fallback;
  if (!v->is_boolean()) fail(obj.field_path(key), "expected true or false");
  return v->get<bool>();
}

json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(origin + ": " + e.what());
  }
}

std::string read_text(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ConfigError(file.string() + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

PdtModel moments_model(double t_a, double t_a2, double t_b, double t_b2, double t_ab) {
  PdtModel m;
  m.kind = MomentsPdt{{t_a, t_b, t_a2, t_b2, t_ab}};
  return m;
}

PdtModel channel_from_json(const json& j, const std::string& path,
                           const std::filesystem::path& base_dir) {
  if (j.is_string()) {
    const std::string ref = j.get<std::string>();
    if (ref.rfind("preset:", 0) == 0) {
      try {
        return preset_channel(ref.substr(7));
      } catch (const ConfigError& e) {
        fail(path, e.what());
      }
    }
    std::filesystem::path file = ref;
    if (file.is_relative()) file = base_dir / file;
    const json loaded = parse_json_text(read_text(file), file.string());
    return channel_from_json(loaded, path + " (" + file.string() + ")", file.parent_path());
  }
  if (!j.is_object()) fail(path, "expected a channel object, a file path or \"preset:<name>\"");
  if (j.contains("kind")) return pdt_from_json(j, path, base_dir);
  PdtModel m;
  m.kind = MomentsPdt{moments_from_json(j, path)};
  return m;
}

StateSpec state_from_config(const json& j, const std::string& path) {
  StrictObject obj(j, path);
  StateSpec s;
  s.family = obj.has("family") ? obj.string("family") : "tmsv";
  if (s.family == "explicit") {
    json rest = j;
    rest.erase("family");
    s.explicit_state = state_from_json(rest, path);
    return s;
  }
  if (s.family != "tmsv" && s.family != "asymmetric-tmsv")
    fail(obj.field_path("family"),
         "unknown state family \"" + s.family + "\" (tmsv|asymmetric-tmsv|explicit)");
  s.xi = obj.number_or("xi", s.xi);
  if (s.family == "asymmetric-tmsv") s.t2 = obj.number_or("t2", s.t2);
  if (const json* a = obj.optional("alpha")) s.alpha = complex_from_json(*a, obj.field_path("alpha"));
  if (const json* b = obj.optional("beta")) s.beta = complex_from_json(*b, obj.field_path("beta"));
  obj.finish();
  return s;
}

json state_to_json(const StateSpec& s) {
  if (s.family == "explicit") {
    json j = to_json(*s.explicit_state);
    j["family"] = "explicit";
    return j;
  }
  json j = {{"family", s.family}, {"xi", s.xi}, {"alpha", to_json(s.alpha)},
            {"beta", to_json(s.beta)}};
  if (s.family == "asymmetric-tmsv") j["t2"] = s.t2;
  return j;
}

const char* format_name(OutputFormat f) { return f == OutputFormat::csv ? "csv" : "json"; }

WitnessTolerance witness_tolerance(const Tolerances& t) { return {t.witness_rel, t.witness_abs}; }

SweepOptions sweep_options(const RunConfig& c) {
  SweepOptions o;
  o.seed = c.seed;
  o.verify_fraction = c.tolerances.verify_fraction;
  o.bisection_tol = c.tolerances.bisection;
  o.tolerance = witness_tolerance(c.tolerances);
  return o;
}

std::filesystem::path resolve_output(const std::string& path) {
  std::filesystem::path p = path;
  return p.is_relative() ? output_directory() / p : p;
}

void write_document(const RunConfig& config, const json& doc) {
  if (!config.output.path.empty())
    write_atomic(resolve_output(config.output.path), doc.dump(2) + "\n");
}

json gamma_json(const ChannelMoments<double>& m) {
  const auto k = correlation_coefficients(m);
  return {{"gamma", k.gamma}, {"delta_gamma", k.delta_gamma}};
}

int run_witness(const RunConfig& config, std::ostream& out) {
  const auto estimate = moments_from_pdt(config.channel);
  const auto& moments = estimate.moments;
  const auto state = config.state.build();
  const auto tol = witness_tolerance(config.tolerances);
  const auto report = witness_expansion(state, moments, tol);
  const double direct = witness_direct(state, moments);

  json stdout_doc = to_json(report);
  int status = 0;
  if (config.gamma_check) {
    const double scale = std::max(report.scale(), std::abs(direct));
    auto close = [&](double a, double b) {
      return std::abs(a - b) <= std::max(tol.abs, tol.rel * std::max(scale, std::abs(b)));
    };
    json check = gamma_json(moments);
    check["w_direct"] = direct;
    std::optional<double> special;
    if (std::abs(moments.covariance()) <= 1e-12 && state.has_zero_means()) {
      check["specialisation"] = "uncorrelated-zero-mean";
      special = witness_uncorrelated_zero_mean(state, moments);
    } else if (perfectly_correlated(moments)) {
      check["specialisation"] = "correlated";
      special = witness_correlated(state, moments, tol).w_atm;
    } else {
      check["specialisation"] = "none";
    }
    bool agrees = close(report.w_atm, direct);
    if (special) {
      check["w_specialised"] = *special;
      agrees = agrees && close(*special, report.w_atm);
    }
    check["agrees"] = agrees;
    stdout_doc["gamma_check"] = check;
    if (!agrees) status = 1;
  }
  out << stdout_doc.dump(2) << '\n';

  json doc = {{"config", to_json(config)},
              {"channel", to_json(estimate)},
              {"report", stdout_doc},
              {"w_direct", direct}};
  write_document(config, doc);
  return status;
}

int run_channel_moments(const RunConfig& config, std::ostream& out) {
  const auto estimate = moments_from_pdt(config.channel);
  json doc = {{"config", to_json(config)}, {"estimate", to_json(estimate)}};
  doc.update(gamma_json(estimate.moments));
  out << doc.dump(2) << '\n';
  write_document(config, doc);
  return 0;
}

int run_adaptive(const RunConfig& config, std::ostream& out) {
  const auto input = moments_from_pdt(config.channel);
  const PdtModel adapted = adaptive_correlate(config.channel);
  const auto estimate = moments_from_pdt(adapted);
  json doc = {{"config", to_json(config)},
              {"input", to_json(input)},
              {"adapted_model", to_json(adapted)},
              {"estimate", to_json(estimate)}};
  doc.update(gamma_json(estimate.moments));
  if (!std::holds_alternative<MomentsPdt>(adapted.kind)) {
    const auto samples = sample_pdt(adapted, config.channel.mc.samples, config.channel.mc.seed);
    doc["monte_carlo"] = to_json(moments_from_samples(samples));
  }
  out << doc.dump(2) << '\n';
  write_document(config, doc);
  return 0;
}

int run_identity_suite(const RunConfig& config, std::ostream& out) {
  IdentitySuiteOptions o;
  o.instances = config.identity.instances;
  o.psd_instances = config.identity.psd_instances;
  o.seed = config.seed;
  const auto checks = fading::run_identity_suite(o);
  json list = json::array();
  bool passed = true;
  for (const auto& c : checks) {
    list.push_back({{"name", c.name},
                    {"instances", c.instances},
                    {"failures", c.failures},
                    {"worst", c.worst},
                    {"threshold", c.threshold},
                    {"passed", c.passed()}});
    passed = passed && c.passed();
  }
  json doc = {{"config", to_json(config)}, {"checks", list}, {"passed", passed}};
  out << doc.dump(2) << '\n';
  write_document(config, doc);
  return passed ? 0 : 1;
}

int run_sweep(const RunConfig& config, std::ostream& out) {
  const ChannelMoments<double> moments = moments_from_pdt(config.channel).moments;
  const SweepOptions options = sweep_options(config);
  SweepResult result;
  switch (config.command) {
    case Command::sweep_squeezing:
      if (config.state.family != "tmsv")
        throw ConfigError("state.family: sweep-squeezing sweeps the tmsv family");
      result = squeezing_sweep(moments, config.squeezing.xi_min, config.squeezing.xi_max,
                               config.squeezing.n_points, config.state.alpha,
                               config.state.beta, options);
      break;
    case Command::contour_displacement: {
      if (config.state.family == "explicit")
        throw ConfigError("state.family: contour-displacement needs tmsv or asymmetric-tmsv");
      const double t2 = config.state.family == "tmsv" ? 0.5 : config.state.t2;
      result = displacement_contour(config.state.xi, t2, moments, config.contour, options);
      break;
    }
    case Command::region_phase:
      if (config.state.family != "tmsv")
        throw ConfigError("state.family: region-phase uses the tmsv family");
      result = phase_region_map(config.state.xi, moments, config.region, options);
      break;
    default:
      throw MisuseError("not a sweep command");
  }
  result.metadata["config"] = to_json(config);
  result.metadata["verification"] = {{"checked", result.verification.checked},
                                     {"failed", result.verification.failed},
                                     {"max_abs_error", result.verification.max_abs_error},
                                     {"max_rel_error", result.verification.max_rel_error}};

  const std::string ext = config.output.format == OutputFormat::csv ? ".csv" : ".json";
  const std::filesystem::path target =
      resolve_output(config.output.path.empty() ? to_string(config.command) + ext
                                                : config.output.path);
  std::filesystem::path boundary = target;
  boundary.replace_filename(target.stem().string() + "_boundary.csv");

  if (config.output.format == OutputFormat::csv)
    write_atomic(target, to_csv(result));
  else
    write_atomic(target, to_json(result).dump(2) + "\n");
  write_atomic(boundary, boundary_to_csv(result));

  json summary = {{"experiment", result.name},
                  {"status", result.status},
                  {"rows", result.rows.size()},
                  {"boundary_points", result.boundary.size()},
                  {"verification", result.metadata["verification"]},
                  {"output", target.string()},
                  {"boundary_output", boundary.string()}};
  out << summary.dump(2) << '\n';
  return result.verification.failed == 0 ? 0 : 1;
}

}  // namespace

std::string to_string(Command c) {
  for (const auto& entry : kCommands)
    if (entry.command == c) return entry.name;
  return "unknown";
}

Command command_from_string(const std::string& name) {
  for (const auto& entry : kCommands)
    if (name == entry.name) return entry.command;
  throw ConfigError("command: unknown command \"" + name +
                    "\" (witness|channel-moments|adaptive|sweep-squeezing|"
                    "contour-displacement|region-phase|identity-suite)");
}

GaussianState<double> StateSpec::build() const {
  if (family == "explicit") {
    if (!explicit_state) throw ConfigError("state: explicit family without a matrix");
    return *explicit_state;
  }
  const auto base = family == "asymmetric-tmsv" ? asymmetric_tmsv(xi, t2) : tmsv_state(xi);
  return base.with_means(alpha, beta);
}

PdtModel preset_channel(const std::string& name) {
  if (name == "144km") return moments_model(0.027, 0.001, 0.027, 0.001, 0.027 * 0.027);
  if (name == "1.6km") return moments_model(0.398, 0.163, 0.398, 0.163, 0.398 * 0.398);
  if (name == "gamma-0.9") return moments_model(0.9, 0.9, 0.9, 0.9, 0.81);
  if (name == "144km-correlated") return moments_model(0.027, 0.001, 0.027, 0.001, 0.001);
  if (name == "1.6km-correlated") return moments_model(0.398, 0.163, 0.398, 0.163, 0.163);
  if (name == "uniform-independent") {
    PdtModel m;
    m.kind = SharedMarginalPdt{BetaMarginal{1.0, 1.0}, Coupling::independent};
    return m;
  }
  throw ConfigError("unknown preset \"" + name +
                    "\" (144km|1.6km|gamma-0.9|144km-correlated|1.6km-correlated|"
                    "uniform-independent)");
}

RunConfig default_config(Command command) {
  RunConfig c;
  c.command = command;
  c.channel.kind = DeterministicPdt{1.0, 1.0};
  c.output.format = is_sweep(command) ? OutputFormat::csv : OutputFormat::json;
  switch (command) {
    case Command::adaptive:
      c.channel = preset_channel("uniform-independent");
      break;
    case Command::sweep_squeezing:
      c.channel = preset_channel("1.6km");
      break;
    case Command::contour_displacement:
      c.channel = preset_channel("gamma-0.9");
      c.state.family = "asymmetric-tmsv";
      c.state.xi = 1.0;
      c.state.t2 = 0.5;
      break;
    case Command::region_phase:
      c.channel = preset_channel("1.6km-correlated");
      c.state.xi = 0.5;
      break;
    default:
      break;
  }
  return c;
}

RunConfig parse_config(const json& j, const std::filesystem::path& base_dir) {
  StrictObject obj(j, "");
  RunConfig c = default_config(command_from_string(obj.string("command")));

  if (const json* s = obj.optional("state")) c.state = state_from_config(*s, "state");
  if (const json* ch = obj.optional("channel")) c.channel = channel_from_json(*ch, "channel", base_dir);

  if (const json* o = obj.optional("output")) {
    StrictObject out(*o, "output");
    if (out.has("path")) c.output.path = out.string("path");
    if (out.has("format")) {
      const std::string f = out.string("format");
      if (f == "csv")
        c.output.format = OutputFormat::csv;
      else if (f == "json")
        c.output.format = OutputFormat::json;
      else
        fail("output.format", "expected \"csv\" or \"json\"");
    }
    out.finish();
  }
  if (c.output.format == OutputFormat::csv && !is_sweep(c.command))
    fail("output.format", "csv output is only available for sweep commands");

  if (const json* s = obj.optional("seed")) {
    if (!s->is_number_integer() || (!s->is_number_unsigned() && s->get<std::int64_t>() < 0))
      fail("seed", "expected an unsigned integer");
    c.seed = s->get<std::uint64_t>();
  }

  if (const json* t = obj.optional("tolerances")) {
    StrictObject tol(*t, "tolerances");
    c.tolerances.witness_rel = tol.number_or("witness_rel", c.tolerances.witness_rel);
    c.tolerances.witness_abs = tol.number_or("witness_abs", c.tolerances.witness_abs);
    c.tolerances.bisection = tol.number_or("bisection", c.tolerances.bisection);
    c.tolerances.verify_fraction = tol.number_or("verify_fraction", c.tolerances.verify_fraction);
    tol.finish();
    if (!(c.tolerances.witness_rel >= 0 && c.tolerances.witness_abs >= 0 &&
          c.tolerances.bisection > 0 && c.tolerances.verify_fraction >= 0 &&
          c.tolerances.verify_fraction <= 1))
      fail("tolerances", "tolerances must be non-negative, bisection > 0, verify_fraction <= 1");
  }

  c.gamma_check = bool_field(obj, "gamma_check", c.gamma_check);

  if (const json* s = obj.optional("sweep")) {
    StrictObject sw(*s, "sweep");
    c.squeezing.xi_min = sw.number_or("xi_min", c.squeezing.xi_min);
    c.squeezing.xi_max = sw.number_or("xi_max", c.squeezing.xi_max);
    c.squeezing.n_points = count_field(sw, "n_points", c.squeezing.n_points);
    sw.finish();
  }
  if (const json* s = obj.optional("contour")) {
    StrictObject ct(*s, "contour");
    c.contour.n_rays = count_field(ct, "n_rays", c.contour.n_rays);
    c.contour.n_radial = count_field(ct, "n_radial", c.contour.n_radial);
    c.contour.r_max = ct.number_or("r_max", c.contour.r_max);
    ct.finish();
  }
  if (const json* s = obj.optional("region")) {
    StrictObject rg(*s, "region");
    c.region.total_power = rg.number_or("total_power", c.region.total_power);
    c.region.n_power = count_field(rg, "n_power", c.region.n_power);
    c.region.n_phase = count_field(rg, "n_phase", c.region.n_phase);
    rg.finish();
  }
  if (const json* s = obj.optional("identity")) {
    StrictObject id(*s, "identity");
    c.identity.instances = count_field(id, "instances", c.identity.instances);
    c.identity.psd_instances = count_field(id, "psd_instances", c.identity.psd_instances);
    id.finish();
  }
  obj.finish();
  return c;
}

RunConfig load_config(const std::filesystem::path& file) {
  return parse_config(parse_json_text(read_text(file), file.string()), file.parent_path());
}

json to_json(const RunConfig& c) {
  return {
      {"command", to_string(c.command)},
      {"state", state_to_json(c.state)},
      {"channel", to_json(c.channel)},
      {"output", {{"path", c.output.path}, {"format", format_name(c.output.format)}}},
      {"seed", c.seed},
      {"tolerances",
       {{"witness_rel", c.tolerances.witness_rel},
        {"witness_abs", c.tolerances.witness_abs},
        {"bisection", c.tolerances.bisection},
        {"verify_fraction", c.tolerances.verify_fraction}}},
      {"gamma_check", c.gamma_check},
      {"sweep",
       {{"xi_min", c.squeezing.xi_min},
        {"xi_max", c.squeezing.xi_max},
        {"n_points", c.squeezing.n_points}}},
      {"contour",
       {{"n_rays", c.contour.n_rays}, {"n_radial", c.contour.n_radial}, {"r_max", c.contour.r_max}}},
      {"region",
       {{"total_power", c.region.total_power},
        {"n_power", c.region.n_power},
        {"n_phase", c.region.n_phase}}},
      {"identity",
       {{"instances", c.identity.instances}, {"psd_instances", c.identity.psd_instances}}},
  };
}

void write_atomic(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot write " + tmp.string());
    f << text;
    f.flush();
    if (!f) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::filesystem::path output_directory() {
  if (const char* dir = std::getenv("FADING_OUTPUT_DIR"); dir && *dir) return dir;
  return std::filesystem::current_path();
}

int run(const RunConfig& config, std::ostream& out) {
  switch (config.command) {
    case Command::witness:
      return run_witness(config, out);
    case Command::channel_moments:
      return run_channel_moments(config, out);
    case Command::adaptive:
      return run_adaptive(config, out);
    case Command::identity_suite:
      return run_identity_suite(config, out);
    default:
      return run_sweep(config, out);
  }
}

}  // namespace fading
