// Command-line front end: run single scenarios, sweeps, config validation
// and the brute-force oracle checks.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cfmimo/channel.hpp"
#include "cfmimo/fronthaul.hpp"
#include "cfmimo/io.hpp"
#include "cfmimo/oracle.hpp"
#include "cfmimo/rng.hpp"
#include "cfmimo/runner.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitInternal = 4;
constexpr int kExitOracleMismatch = 5;

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::vector<std::string> overrides;
  std::string schemes;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 1;
  bool deterministic = false;
};

std::string default_out_dir() {
  const char* env = std::getenv("CFMIMO_OUT_DIR");
  return env ? env : "out";
}

void add_common(CLI::App* cmd, CommonArgs& args, bool with_out = true) {
  cmd->add_option("--config", args.config_path, "Scenario config (JSON)")
      ->required();
  cmd->add_option("--set", args.overrides,
                  "Override a config key, e.g. --set num_ues=100");
  cmd->add_option("--schemes", args.schemes,
                  "Comma-separated scheme list, e.g. HybridUA,SCF1lim");
  auto* seed = cmd->add_option("--seed", args.seed, "Override the RNG seed");
  seed->each([&args](const std::string&) { args.seed_set = true; });
  if (with_out) {
    cmd->add_option("--out", args.out_dir,
                    "Output directory (default $CFMIMO_OUT_DIR or ./out)");
    cmd->add_option("--threads", args.threads, "Worker threads over setups");
    cmd->add_flag("--deterministic", args.deterministic,
                  "Single-threaded byte-stable output");
  }
}

cfmimo::ScenarioConfig load_with_overrides(const CommonArgs& args) {
  cfmimo::ScenarioConfig cfg = cfmimo::load_config(args.config_path);
  for (const std::string& kv : args.overrides) cfmimo::apply_override(cfg, kv);
  if (!args.schemes.empty()) cfmimo::apply_override(cfg, "schemes=" + args.schemes);
  if (args.seed_set) cfg.rng_seed = args.seed;
  cfg.validate();
  return cfg;
}

void print_error(const std::string& category, const std::string& message) {
  nlohmann::ordered_json j{{"error", category}, {"message", message}};
  std::cerr << j.dump() << "\n";
}

int run_oracle_checks(int instances, std::uint64_t seed) {
  using namespace cfmimo;
  int mismatches = 0;
  Stream rng(seed);
  for (int i = 0; i < instances; ++i) {
    ScenarioConfig cfg;
    cfg.num_aps = 4 + static_cast<int>(rng.uniform() * 7);   // 4..10
    cfg.num_cpus = 2 + static_cast<int>(rng.uniform() * 3);  // 2..4
    cfg.num_ues = 2 + static_cast<int>(rng.uniform() * 7);   // 2..8
    cfg.antennas_per_ap = 1 + static_cast<int>(rng.uniform() * 4);
    cfg.area_side_m = 1000.0;
    cfg.tau_p = 2;
    cfg.tau_d = cfg.tau_c - cfg.tau_p - cfg.tau_u;

    const std::uint64_t inst_seed = rng.next_u64();
    const Topology topo = generate_topology(cfg, inst_seed);
    const LsfState lsf = compute_lsf_state(cfg, topo, inst_seed);
    const PilotAssignment pilots = assign_pilots(lsf.beta_lin, cfg.tau_p);

    for (Scheme scheme : all_schemes()) {
      const Association assoc =
          associate_all(scheme, lsf.beta_lin, pilots, topo, cfg);
      const FronthaulReport rep =
          fronthaul_report(assoc, topo, cfg.antennas_per_ap, cfg.tau_c);
      const long long expected = oracle::fronthaul_load_by_enumeration(
          assoc, topo, cfg.antennas_per_ap, cfg.tau_c);
      if (rep.intercpu_load_scalars != expected) {
        ++mismatches;
        std::cout << "MISMATCH fronthaul instance=" << i
                  << " scheme=" << scheme_name(scheme)
                  << " got=" << rep.intercpu_load_scalars
                  << " oracle=" << expected << "\n";
      }
    }

    // Delta-selection minimality against subset enumeration.
    const int n = 2 + static_cast<int>(rng.uniform() * 11);  // 2..12
    Eigen::VectorXd gains(n);
    std::vector<int> candidates(n);
    std::vector<double> gain_list(n);
    for (int g = 0; g < n; ++g) {
      gains(g) = rng.uniform() + 1e-6;
      candidates[g] = g;
      gain_list[g] = gains(g);
    }
    const double delta = 50.0 + rng.uniform() * 50.0;
    const auto selected = select_aps_by_delta(candidates, gains, delta);
    const int expected_size =
        oracle::min_subset_size_for_delta(gain_list, delta);
    if (static_cast<int>(selected.size()) != expected_size) {
      ++mismatches;
      std::cout << "MISMATCH delta instance=" << i << " got="
                << selected.size() << " oracle=" << expected_size << "\n";
    }
  }
  std::cout << (mismatches == 0 ? "OK" : "FAILED") << ": " << instances
            << " instances checked, " << mismatches << " mismatches\n";
  return mismatches == 0 ? 0 : kExitOracleMismatch;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cell-free massive MIMO downlink association simulator"};
  app.require_subcommand(1);

  CommonArgs run_args, sweep_args, validate_args;
  bool dump_lsf = false, dump_association = false;
  std::string dump_trials_path;
  int oracle_instances = 50;
  std::uint64_t oracle_seed = 1;

  CLI::App* run = app.add_subcommand("run", "Run one scenario");
  add_common(run, run_args);
  run->add_flag("--dump-lsf", dump_lsf, "Write lsf.csv (ue, ap, beta_db)");
  run->add_flag("--dump-association", dump_association,
                "Write association_<scheme>.json for the first setup");
  run->add_option("--dump-trials", dump_trials_path,
                  "Write per-trial effective signal CSV for the first setup");

  CLI::App* sweep = app.add_subcommand("sweep", "Run a parameter sweep");
  add_common(sweep, sweep_args);

  CLI::App* validate = app.add_subcommand("validate", "Check a config file");
  add_common(validate, validate_args, /*with_out=*/false);

  CLI::App* oracle_cmd = app.add_subcommand(
      "oracle", "Compare fronthaul/delta-selection against brute force");
  oracle_cmd->add_option("--instances", oracle_instances, "Random instances");
  oracle_cmd->add_option("--seed", oracle_seed, "Instance generator seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      cfmimo::ScenarioConfig cfg = load_with_overrides(run_args);
      cfmimo::RunnerOptions opt;
      opt.threads = run_args.threads;
      opt.deterministic = run_args.deterministic;
      cfmimo::TrialDump dump;
      if (!dump_trials_path.empty()) opt.dump = &dump;

      const std::string dir =
          run_args.out_dir.empty() ? default_out_dir() : run_args.out_dir;
      const cfmimo::RunReport report = cfmimo::run_scenario(cfg, opt);
      cfmimo::write_report_files(report, dir);

      if (dump_lsf || dump_association || !dump_trials_path.empty()) {
        const std::uint64_t setup_seed =
            cfmimo::derive_key(cfg.rng_seed, cfmimo::Sub::Setup, {0});
        const cfmimo::Topology topo = cfmimo::generate_topology(cfg, setup_seed);
        const cfmimo::LsfState lsf =
            cfmimo::compute_lsf_state(cfg, topo, setup_seed);
        if (dump_lsf) cfmimo::write_lsf_csv(lsf, dir + "/lsf.csv");
        if (dump_association) {
          const cfmimo::PilotAssignment pilots =
              cfmimo::assign_pilots(lsf.beta_lin, cfg.tau_p);
          for (cfmimo::Scheme s : cfg.schemes) {
            const cfmimo::Association assoc =
                cfmimo::associate_all(s, lsf.beta_lin, pilots, topo, cfg);
            cfmimo::write_text_file(
                dir + "/association_" + cfmimo::scheme_name(s) + ".json",
                cfmimo::association_to_json_text(assoc));
          }
        }
      }
      if (!dump_trials_path.empty()) {
        std::ostringstream csv;
        csv << "scheme,trial,ue,signal_re,signal_im\n";
        for (std::size_t s = 0; s < dump.signal_kk.size(); ++s) {
          const auto& m = dump.signal_kk[s];
          for (int t = 0; t < m.rows(); ++t) {
            for (int k = 0; k < m.cols(); ++k) {
              csv << cfmimo::scheme_name(cfg.schemes[s]) << ',' << t << ','
                  << k << ',' << m(t, k).real() << ',' << m(t, k).imag()
                  << '\n';
            }
          }
        }
        cfmimo::write_text_file(dump_trials_path, csv.str());
      }
      std::cout << "wrote " << dir << "/report.json\n";
      return 0;
    }

    if (sweep->parsed()) {
      cfmimo::SweepSpec spec = cfmimo::load_sweep(sweep_args.config_path);
      for (const std::string& kv : sweep_args.overrides) {
        cfmimo::apply_override(spec.base, kv);
      }
      if (!sweep_args.schemes.empty()) {
        cfmimo::apply_override(spec.base, "schemes=" + sweep_args.schemes);
      }
      if (sweep_args.seed_set) spec.base.rng_seed = sweep_args.seed;
      std::string dir = !sweep_args.out_dir.empty() ? sweep_args.out_dir
                        : !spec.out_dir.empty()     ? spec.out_dir
                                                    : default_out_dir();
      cfmimo::RunnerOptions opt;
      opt.threads = sweep_args.threads;
      opt.deterministic = sweep_args.deterministic;

      const std::vector<cfmimo::RunReport> reports =
          cfmimo::run_sweep(spec, opt);
      for (std::size_t i = 0; i < reports.size(); ++i) {
        std::ostringstream sub;
        sub << dir << "/" << spec.axis << "_" << spec.values[i];
        cfmimo::write_report_files(reports[i], sub.str());
      }
      cfmimo::write_sweep_summary(reports, spec.axis, spec.values, dir);
      std::cout << "wrote " << dir << "/sweep_summary.csv\n";
      return 0;
    }

    if (validate->parsed()) {
      load_with_overrides(validate_args);
      std::cout << "ok\n";
      return 0;
    }

    if (oracle_cmd->parsed()) {
      return run_oracle_checks(oracle_instances, oracle_seed);
    }
  } catch (const std::invalid_argument& e) {
    print_error("config", e.what());
    return kExitConfig;
  } catch (const std::runtime_error& e) {
    print_error("io", e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    print_error("internal", e.what());
    return kExitInternal;
  }
  print_error("usage", "no subcommand given");
  return kExitUsage;
}
