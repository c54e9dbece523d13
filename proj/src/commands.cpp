#include "eemimo/commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <variant>

#include "eemimo/errors.hpp"

namespace eemimo::cli {

namespace {

using Field = std::variant<std::string, long long, double>;

class CsvFile {
 public:
  CsvFile(std::filesystem::path path, const std::string& schema, const std::vector<std::string>& metadata,
          const std::vector<std::string>& columns)
      : path_(std::move(path)), width_(columns.size()) {
    body_ << "# schema: eemimo-" << schema << "/1\n";
    for (const std::string& line : metadata) body_ << "# " << line << "\n";
    write_line(columns);
  }

  void row(const std::vector<Field>& fields) {
    if (fields.size() != width_) throw Error("internal: CSV row width mismatch");
    std::vector<std::string> cells;
    for (const Field& f : fields) {
      if (const auto* s = std::get_if<std::string>(&f)) {
        cells.push_back(*s);
      } else if (const auto* i = std::get_if<long long>(&f)) {
        cells.push_back(std::to_string(*i));
      } else {
        cells.push_back(format_number(std::get<double>(f)));
      }
    }
    write_line(cells);
  }

  void save() const {
    std::filesystem::create_directories(path_.parent_path().empty() ? "." : path_.parent_path());
    std::ofstream file(path_, std::ios::binary | std::ios::trunc);
    if (!file) throw Error("cannot write " + path_.string());
    file << body_.str();
    if (!file) throw Error("write failed for " + path_.string());
  }

 private:
  void write_line(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) body_ << (i ? "," : "") << cells[i];
    body_ << "\n";
  }

  std::filesystem::path path_;
  std::size_t width_;
  std::ostringstream body_;
};

std::ostream& out(const Context& ctx) { return ctx.out ? *ctx.out : std::cout; }
std::ostream& err(const Context& ctx) { return ctx.err ? *ctx.err : std::cerr; }

double mbit(double ee) { return ee * 1e-6; }

double zf_sum_rate(int antennas, int users, double rho, int coherence_block) {
  if (rho == 0.0 || antennas == users) return 0.0;
  return users * (1.0 - static_cast<double>(users) / coherence_block) *
         std::log1p(rho * (antennas - users)) / std::numbers::ln2;
}

bool analytic(const mc::PrecoderSpec& spec) {
  return spec.scheme == mc::Scheme::kZf && spec.csi == mc::Csi::kPerfect;
}

mc::RhoSearchOptions rho_options(const ScenarioConfig& config) {
  mc::RhoSearchOptions options;
  options.log10_min = config.mc.rho_log10_min;
  options.log10_max = config.mc.rho_log10_max;
  if (config.rho_cap) options.log10_max = std::min(options.log10_max, std::log10(*config.rho_cap));
  if (!(options.log10_min < options.log10_max)) {
    throw ConfigError("rho_cap is below the MC search range (10^rho_log10_min)");
  }
  return options;
}

std::vector<std::string> mc_metadata(const ScenarioConfig& config) {
  std::vector<std::string> meta;
  meta.push_back("trials: " + std::to_string(config.mc.run.trials));
  meta.push_back("seed: " + std::to_string(config.mc.run.seed));
  meta.push_back(std::string("resample_users: ") + (config.mc.run.resample_users ? "true" : "false"));
  for (const mc::PrecoderSpec& spec : config.mc.schemes) {
    if (spec.csi != mc::Csi::kMmseEstimated) continue;
    // The uplink pilot power is an assumption of this tool, so it is always stated.
    meta.push_back("pilot_energy_ratio: " + format_number(spec.pilot_energy_ratio) +
                   " (uplink pilot energy per symbol / downlink per-UE energy rho*A_lambda, K pilot symbols)");
    break;
  }
  return meta;
}

void warn_clipped(const Context& ctx, long long clipped) {
  if (clipped > 0) {
    err(ctx) << "warning: rho clipped to rho_cap=" << format_number(*ctx.config.rho_cap) << " in " << clipped
             << " cell(s)\n";
  }
}

}  // namespace

std::string format_number(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

void run_optimize(const Context& ctx) {
  const ScenarioConfig& config = ctx.config;
  const PowerCoefficients coeffs = config.coefficients();
  const double a_lam = config.a_lambda();
  const SearchSpace space = config.search_space();

  const DesignPoint best = exhaustive_search(space, coeffs, a_lam);
  if (space.rho_cap && best.antennas > best.users &&
      optimal_power(best.antennas, best.users, coeffs, a_lam) > *space.rho_cap) {
    warn_clipped(ctx, 1);
  }
  const AlternatingTrace trace = alternating_optimize(config.alternating_init, coeffs, a_lam, config.max_iter);
  const DesignPoint& last = trace.points.back();

  out(ctx) << "exhaustive: M=" << best.antennas << " K=" << best.users << " rho=" << format_number(best.rho)
           << " ee_bit_per_joule=" << format_number(best.ee) << "\n";
  out(ctx) << "alternating: M=" << last.antennas << " K=" << last.users << " rho=" << format_number(last.rho)
           << " ee_bit_per_joule=" << format_number(last.ee) << " iterations=" << trace.iteration_count
           << " settled_after=" << trace.settled_after << " converged=" << (trace.converged ? "true" : "false")
           << "\n";
  if (!trace.converged) err(ctx) << "warning: alternating optimization hit max_iter without converging\n";

  CsvFile optimum(ctx.out_dir / "optimum.csv", "optimum", {},
                  {"method", "M", "K", "rho", "ee_bit_per_joule", "ee_mbit_per_joule", "iterations"});
  optimum.row({std::string("exhaustive"), static_cast<long long>(best.antennas),
               static_cast<long long>(best.users), best.rho, best.ee, mbit(best.ee), 0LL});
  optimum.row({std::string("alternating"), static_cast<long long>(last.antennas),
               static_cast<long long>(last.users), last.rho, last.ee, mbit(last.ee),
               static_cast<long long>(trace.iteration_count)});
  optimum.save();

  CsvFile trajectory(ctx.out_dir / "trajectory.csv", "trajectory", {},
                     {"iteration", "M", "K", "rho", "ee_bit_per_joule", "ee_mbit_per_joule"});
  for (std::size_t i = 0; i < trace.points.size(); ++i) {
    const DesignPoint& p = trace.points[i];
    trajectory.row({static_cast<long long>(i), static_cast<long long>(p.antennas), static_cast<long long>(p.users),
                    p.rho, p.ee, mbit(p.ee)});
  }
  trajectory.save();
}

void run_surface(const Context& ctx, const mc::PrecoderSpec& scheme) {
  const ScenarioConfig& config = ctx.config;
  const PowerCoefficients coeffs = config.coefficients();
  const double a_lam = config.a_lambda();
  const SearchSpace space = config.search_space();
  space.validate(coeffs);

  const std::string name = mc::to_string(scheme.scheme) + "_" + mc::to_string(scheme.csi);
  std::vector<std::string> meta;
  if (!analytic(scheme)) meta = mc_metadata(config);
  CsvFile csv(ctx.out_dir / ("surface_" + name + ".csv"), "surface", meta,
              {"scheme", "csi", "method", "M", "K", "rho", "sum_rate", "ee_bit_per_joule", "ee_mbit_per_joule"});
  const std::string scheme_name = mc::to_string(scheme.scheme), csi_name = mc::to_string(scheme.csi);
  long long cells = 0;

  if (analytic(scheme)) {
    long long clipped = 0;
    for (const SurfaceRow& row : ee_surface(space, coeffs, a_lam)) {
      if (space.rho_cap && row.antennas > row.users && row.rho == *space.rho_cap &&
          optimal_power(row.antennas, row.users, coeffs, a_lam) > *space.rho_cap) {
        ++clipped;
      }
      csv.row({scheme_name, csi_name, std::string("analytic"), static_cast<long long>(row.antennas),
               static_cast<long long>(row.users), row.rho,
               zf_sum_rate(row.antennas, row.users, row.rho, coeffs.coherence_block), row.ee, mbit(row.ee)});
      ++cells;
    }
    warn_clipped(ctx, clipped);
  } else {
    const mc::RhoSearchOptions options = rho_options(config);
    long long flat = 0;
    for (int k = space.users.lo; k <= space.users.hi; ++k) {
      for (int m = std::max(k, space.antennas.lo); m <= space.antennas.hi; ++m) {
        double rho = 0.0, ee = 0.0, sum_rate = 0.0;
        if (!(scheme.scheme == mc::Scheme::kZf && m == k)) {
          const mc::RhoSearch r = mc::optimize_rho_mc(m, k, scheme, coeffs, config.propagation, config.mc.run, options);
          rho = r.rho;
          ee = r.ee;
          sum_rate = r.stats.sum_rate;
          flat += r.flat;
        }
        csv.row({scheme_name, csi_name, std::string("mc"), static_cast<long long>(m), static_cast<long long>(k), rho,
                 sum_rate, ee, mbit(ee)});
        ++cells;
      }
    }
    if (flat > 0) err(ctx) << "warning: EE flat in rho within MC noise in " << flat << " cell(s)\n";
  }
  csv.save();
  out(ctx) << "surface " << name << ": " << cells << " cells\n";
}

std::vector<SweepRow> scheme_sweep(const Context& ctx) {
  const ScenarioConfig& config = ctx.config;
  const PowerCoefficients coeffs = config.coefficients();
  const double a_lam = config.a_lambda();
  const SearchSpace space = config.search_space();
  space.validate(coeffs);
  const mc::RhoSearchOptions options = rho_options(config);

  std::vector<SweepRow> rows;
  long long clipped = 0;
  for (const mc::PrecoderSpec& spec : config.mc.schemes) {
    for (const int m : config.mc.antennas) {
      SweepRow row;
      row.scheme = spec;
      row.antennas = m;
      if (analytic(spec)) {
        const int k_hi = std::min(space.users.hi, m - 1);
        if (k_hi < space.users.lo) {
          err(ctx) << "warning: no K in range for ZF at M=" << m << ", skipped\n";
          continue;
        }
        row.analytic = true;
        bool capped = false;
        for (int k = space.users.lo; k <= k_hi; ++k) {
          const double rho = capped_optimal_power(m, k, coeffs, a_lam, space.rho_cap);
          const double ee = ee_zf(m, k, rho, coeffs, a_lam);
          if (ee > row.ee) {
            row.users = k;
            row.rho = rho;
            row.ee = ee;
            capped = space.rho_cap && optimal_power(m, k, coeffs, a_lam) > *space.rho_cap;
          }
        }
        clipped += capped;
        row.tx_energy = row.rho * row.users * a_lam;
        row.sum_rate = zf_sum_rate(m, row.users, row.rho, coeffs.coherence_block);
        row.rate_per_ue = row.sum_rate / row.users;
      } else {
        const mc::UserSearch best =
            mc::optimize_users_mc(m, space.users, spec, coeffs, config.propagation, config.mc.run, options);
        if (best.best.flat) err(ctx) << "warning: EE flat in rho within MC noise at M=" << m << "\n";
        row.users = best.users;
        row.rho = best.best.rho;
        row.tx_energy = best.best.stats.tx_energy;
        row.rate_per_ue = best.best.stats.rate_per_ue;
        row.sum_rate = best.best.stats.sum_rate;
        row.ee = best.best.ee;
      }
      rows.push_back(row);
    }
  }
  warn_clipped(ctx, clipped);
  return rows;
}

void run_power_scaling(const Context& ctx) {
  const std::vector<SweepRow> rows = scheme_sweep(ctx);
  const double symbol_time = ctx.config.hardware.symbol_time_s;
  CsvFile csv(ctx.out_dir / "power_scaling.csv", "power-scaling", mc_metadata(ctx.config),
              {"scheme", "csi", "method", "M", "K", "rho", "tx_energy", "tx_power_w"});
  for (const SweepRow& r : rows) {
    csv.row({mc::to_string(r.scheme.scheme), mc::to_string(r.scheme.csi), std::string(r.analytic ? "analytic" : "mc"),
             static_cast<long long>(r.antennas), static_cast<long long>(r.users), r.rho, r.tx_energy,
             r.tx_energy / symbol_time});
    out(ctx) << precoder_name(r.scheme) << " M=" << r.antennas << " K=" << r.users << " rho=" << format_number(r.rho)
             << " tx_power_w=" << format_number(r.tx_energy / symbol_time) << "\n";
  }
  csv.save();
}

void run_ee_vs_antennas(const Context& ctx) {
  const std::vector<SweepRow> rows = scheme_sweep(ctx);
  CsvFile csv(ctx.out_dir / "ee_vs_antennas.csv", "ee-vs-antennas", mc_metadata(ctx.config),
              {"scheme", "csi", "method", "M", "K", "rho", "rate_per_ue", "sum_rate", "ee_bit_per_joule",
               "ee_mbit_per_joule"});
  for (const SweepRow& r : rows) {
    csv.row({mc::to_string(r.scheme.scheme), mc::to_string(r.scheme.csi), std::string(r.analytic ? "analytic" : "mc"),
             static_cast<long long>(r.antennas), static_cast<long long>(r.users), r.rho, r.rate_per_ue, r.sum_rate,
             r.ee, mbit(r.ee)});
    out(ctx) << precoder_name(r.scheme) << " M=" << r.antennas << " K=" << r.users
             << " ee_mbit_per_joule=" << format_number(mbit(r.ee)) << " sum_rate=" << format_number(r.sum_rate)
             << "\n";
  }
  csv.save();
}

void run_simulate(const Context& ctx, const SimulateRequest& request) {
  const ScenarioConfig& config = ctx.config;
  const PowerCoefficients coeffs = config.coefficients();
  if (request.rho && !(*request.rho >= 0.0)) throw ValidationError("rho must be >= 0");
  const mc::RhoSearchOptions options = rho_options(config);

  CsvFile csv(ctx.out_dir / "simulate.csv", "simulate", mc_metadata(config),
              {"scheme", "csi", "M", "K", "rho", "rate_per_ue", "sum_rate", "tx_energy", "total_power", "ee", "trials",
               "seed"});
  for (const mc::PrecoderSpec& spec : config.mc.schemes) {
    const mc::TrialBank bank(request.antennas, request.users, coeffs.coherence_block, spec, config.propagation,
                             config.mc.run);
    double rho = 0.0;
    mc::LinkStats stats;
    if (request.rho) {
      rho = *request.rho;
      stats = bank.evaluate(rho);
    } else {
      const mc::RhoSearch search = mc::optimize_rho(bank, coeffs, options);
      if (search.flat) err(ctx) << "warning: EE flat in rho within MC noise for " << precoder_name(spec) << "\n";
      rho = search.rho;
      stats = search.stats;
    }
    const double power = total_power(coeffs, request.antennas, request.users, stats.tx_energy);
    const double ee = mc::ee_from_stats(stats, request.antennas, request.users, coeffs);
    csv.row({mc::to_string(spec.scheme), mc::to_string(spec.csi), static_cast<long long>(request.antennas),
             static_cast<long long>(request.users), rho, stats.rate_per_ue, stats.sum_rate, stats.tx_energy, power, ee,
             static_cast<long long>(stats.trials), std::to_string(config.mc.run.seed)});
    out(ctx) << precoder_name(spec) << " rho=" << format_number(rho) << " rate_per_ue=" << format_number(stats.rate_per_ue)
             << " ee_bit_per_joule=" << format_number(ee) << "\n";
  }
  csv.save();
}

}  // namespace eemimo::cli
