#include <CLI11.hpp>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>

#include "eemimo/commands.hpp"
#include "eemimo/config.hpp"
#include "eemimo/errors.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

// One JSON object per line on stderr so scripts can parse failures.
int fail(const std::string& kind, const std::string& message, int code, int line = 0) {
  nlohmann::json record{{"error", kind}, {"message", message}, {"exit", code}};
  if (line > 0) record["line"] = line;
  std::cerr << record.dump() << "\n";
  return code;
}

std::string kind_of(const eemimo::Error& e) {
  if (dynamic_cast<const eemimo::ValidationError*>(&e)) return "validation";
  if (dynamic_cast<const eemimo::DomainError*>(&e)) return "domain";
  if (dynamic_cast<const eemimo::DegenerateError*>(&e)) return "degenerate";
  if (dynamic_cast<const eemimo::InfeasibleError*>(&e)) return "infeasible";
  return "numerical";
}

struct Overrides {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<int> m_min, m_max, k_min, k_max;
  std::optional<double> rho_cap;
  std::string schemes;
};

eemimo::ScenarioConfig load(const Overrides& o) {
  eemimo::ScenarioConfig config = o.config_path.empty() ? eemimo::default_config()
                                                        : eemimo::parse_config(o.config_path);
  if (o.seed) config.mc.run.seed = *o.seed;
  if (o.trials) config.mc.run.trials = *o.trials;
  if (o.m_min || o.m_max) {
    const eemimo::SearchSpace space = config.search_space();
    config.antennas = eemimo::IntRange{o.m_min.value_or(space.antennas.lo), o.m_max.value_or(space.antennas.hi)};
  }
  if (o.k_min || o.k_max) {
    const eemimo::SearchSpace space = config.search_space();
    config.users = eemimo::IntRange{o.k_min.value_or(space.users.lo), o.k_max.value_or(space.users.hi)};
  }
  if (o.rho_cap) config.rho_cap = *o.rho_cap;
  if (!o.schemes.empty()) {
    const std::vector<eemimo::mc::PrecoderSpec> previous = config.mc.schemes;
    config.mc.schemes.clear();
    std::stringstream ss(o.schemes);
    std::string token;
    while (std::getline(ss, token, ',')) {
      try {
        eemimo::mc::PrecoderSpec spec = eemimo::parse_precoder(token);
        if (!previous.empty()) {
          spec.pilot_energy_ratio = previous.front().pilot_energy_ratio;
          spec.rzf_regularization = previous.front().rzf_regularization;
        }
        config.mc.schemes.push_back(spec);
      } catch (const eemimo::ValidationError& e) {
        throw eemimo::ConfigError(std::string("--schemes: ") + e.what());
      }
    }
  }
  config.validate();
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-efficient multi-user MIMO design tool"};
  app.require_subcommand(1);
  app.fallthrough();

  Overrides o;
  app.add_option("--config", o.config_path, "Scenario file (INI); built-in defaults when omitted");
  app.add_option("--out", o.out_dir, "Output directory for CSV files");
  app.add_option("--seed", o.seed, "Monte Carlo seed (overrides [mc] seed)");
  app.add_option("--trials", o.trials, "Monte Carlo trials (overrides [mc] trials)");
  app.add_option("--m-min", o.m_min, "Smallest number of BS antennas");
  app.add_option("--m-max", o.m_max, "Largest number of BS antennas");
  app.add_option("--k-min", o.k_min, "Smallest number of users");
  app.add_option("--k-max", o.k_max, "Largest number of users");
  app.add_option("--rho-cap", o.rho_cap, "Upper limit on rho");
  app.add_option("--schemes", o.schemes, "Comma list, e.g. zf,rzf,mrt,zf:mmse (overrides [mc] schemes)");

  auto* optimize = app.add_subcommand("optimize", "Exhaustive search and alternating optimization");
  std::string surface_scheme = "zf";
  auto* surface = app.add_subcommand("surface", "EE over the (M, K) grid");
  surface->add_option("--scheme", surface_scheme, "zf (analytic) or a Monte Carlo scheme such as mrt");
  auto* power_scaling = app.add_subcommand("power-scaling", "EE-maximizing transmit power vs M per scheme");
  auto* ee_vs_antennas = app.add_subcommand("ee-vs-antennas", "Maximal EE and its spectral efficiency vs M");
  eemimo::cli::SimulateRequest request;
  std::optional<double> rho;
  auto* simulate = app.add_subcommand("simulate", "Raw Monte Carlo runs at one (M, K)");
  simulate->add_option("--antennas,-M", request.antennas, "BS antennas")->required();
  simulate->add_option("--users,-K", request.users, "Users")->required();
  simulate->add_option("--rho", rho, "Normalized transmit power; MC-optimal when omitted");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), kExitConfig);
  }

  try {
    eemimo::cli::Context ctx;
    ctx.config = load(o);
    ctx.out_dir = o.out_dir;
    ctx.out = &std::cout;
    ctx.err = &std::cerr;
    if (optimize->parsed()) {
      eemimo::cli::run_optimize(ctx);
    } else if (surface->parsed()) {
      eemimo::mc::PrecoderSpec spec;
      try {
        spec = eemimo::parse_precoder(surface_scheme);
      } catch (const eemimo::ValidationError& e) {
        throw eemimo::ConfigError(std::string("--scheme: ") + e.what());
      }
      if (!ctx.config.mc.schemes.empty()) {
        spec.pilot_energy_ratio = ctx.config.mc.schemes.front().pilot_energy_ratio;
        spec.rzf_regularization = ctx.config.mc.schemes.front().rzf_regularization;
      }
      eemimo::cli::run_surface(ctx, spec);
    } else if (power_scaling->parsed()) {
      eemimo::cli::run_power_scaling(ctx);
    } else if (ee_vs_antennas->parsed()) {
      eemimo::cli::run_ee_vs_antennas(ctx);
    } else if (simulate->parsed()) {
      request.rho = rho;
      eemimo::cli::run_simulate(ctx, request);
    }
  } catch (const eemimo::ConfigError& e) {
    return fail("config", e.what(), kExitConfig, e.line());
  } catch (const eemimo::Error& e) {
    return fail(kind_of(e), e.what(), kExitNumerical);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), kExitNumerical);
  }
  return 0;
}
