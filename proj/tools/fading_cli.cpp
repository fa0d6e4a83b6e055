#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fading/config.hpp"
#include "fading/errors.hpp"

namespace {

constexpr int kDomainExit = 1;
constexpr int kConfigExit = 2;

struct Flags {
  std::string command;
  std::string config;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::optional<double> xi;
  std::optional<double> eta;
  bool gamma_check{false};
};

fading::RunConfig resolve(const Flags& flags) {
  using fading::json;
  fading::RunConfig base;
  if (!flags.config.empty()) {
    base = fading::load_config(flags.config);
    if (!flags.command.empty()) base.command = fading::command_from_string(flags.command);
  } else {
    if (flags.command.empty())
      throw fading::ConfigError("command: give a command or --config <file>");
    base = fading::default_config(fading::command_from_string(flags.command));
  }

  json j = fading::to_json(base);
  if (flags.out) j["output"]["path"] = *flags.out;
  if (flags.format) j["output"]["format"] = *flags.format;
  if (flags.seed) {
    j["seed"] = *flags.seed;
    j["channel"]["mc"]["seed"] = *flags.seed;
  }
  if (flags.tol) j["tolerances"]["witness_rel"] = *flags.tol;
  if (flags.xi) j["state"]["xi"] = *flags.xi;
  if (flags.eta)
    j["channel"] = {{"kind", "deterministic"},
                    {"params", {{"eta_a", *flags.eta}, {"eta_b", *flags.eta}}}};
  if (flags.gamma_check) j["gamma_check"] = true;
  return fading::parse_config(j);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian entanglement through fading channels"};
  Flags flags;
  app.add_option("command", flags.command,
                 "witness | channel-moments | adaptive | sweep-squeezing | "
                 "contour-displacement | region-phase | identity-suite");
  app.add_option("--config", flags.config, "JSON run configuration");
  app.add_option("--out", flags.out, "output file (relative to $FADING_OUTPUT_DIR)");
  app.add_option("--format", flags.format, "csv | json");
  app.add_option("--seed", flags.seed, "seed for sampling and verification subsets");
  app.add_option("--tol", flags.tol, "relative witness tolerance");
  app.add_option("--xi", flags.xi, "squeezing parameter of the input state");
  app.add_option("--eta", flags.eta, "deterministic channel with <T^2> = eta on both modes");
  app.add_flag("--gamma-check", flags.gamma_check,
               "cross-check the witness against the specialised formula for the channel");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigExit;
  }

  try {
    return fading::run(resolve(flags), std::cout);
  } catch (const fading::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigExit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDomainExit;
  }
}
