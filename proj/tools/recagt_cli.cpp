// Command-line front end: probability/trial math, cost models, benchmarks,
// committee join simulation, and figure-data CSV generation.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "recagt/csv.hpp"
#include "recagt/figdata.hpp"
#include "recagt/grouptest.hpp"
#include "recagt/simnet.hpp"

namespace {

using namespace recagt;

std::string default_out(const std::string& name) {
  const char* dir = std::getenv("RECAGT_OUT_DIR");
  if (dir == nullptr || *dir == '\0') return name;
  return std::string(dir) + "/" + name;
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open output file: " + path);
  out << content;
  if (!out) throw Error("failed to write output file: " + path);
}

struct CommonOpts {
  std::uint64_t seed = 0;
  std::string out;
};

void add_common(CLI::App* sub, CommonOpts& opts) {
  sub->add_option("--seed", opts.seed, "RNG seed");
  sub->add_option("--out", opts.out, "write results as CSV to this path");
  sub->set_config("--config", "", "key=value configuration file");
}

// ---------------------------------------------------------------------------

int cmd_probability(std::uint32_t n, std::uint32_t f, std::uint32_t m,
                    std::uint64_t draws, const CommonOpts& opts) {
  const double p = prob_no_malicious(n, f, m);
  std::printf("%.12g\n", p);
  double mc = -1.0;
  if (draws > 0) {
    mc = mc_prob_no_malicious(n, f, m, draws, opts.seed);
    std::printf("monte_carlo=%.12g draws=%llu\n", mc,
                static_cast<unsigned long long>(draws));
  }
  if (!opts.out.empty()) {
    CsvWriter csv;
    csv.comment("seed", CsvWriter::num(opts.seed));
    csv.columns({"n", "f", "m", "p_closed_form", "p_monte_carlo"});
    csv.row({CsvWriter::num(std::uint64_t{n}), CsvWriter::num(std::uint64_t{f}),
             CsvWriter::num(std::uint64_t{m}), CsvWriter::num(p),
             draws > 0 ? CsvWriter::num(mc) : CsvWriter::blank()});
    csv.write_file(opts.out);
  }
  return 0;
}

int cmd_trials(int setting, std::uint32_t n, std::uint32_t m, std::uint32_t f, double rho,
               std::uint32_t reps, const CommonOpts& opts) {
  if (setting > 0) {
    const TableSetting& s = table_setting(setting);
    n = s.n;
    m = s.m;
    f = s.f;
  }
  const double bound = total_trials_bound(n, m, f, rho);
  SimConfig cfg;
  cfg.n = n;
  cfg.m = m;
  cfg.f = f;
  cfg.rho = rho;
  cfg.shard_bytes = 64;
  cfg.seed = opts.seed;
  ReplicationStats stats = run_replications(cfg, reps);
  std::printf("n=%u m=%u f=%u rho=%g\n", n, m, f, rho);
  std::printf("bound=%.12g\n", bound);
  std::printf("empirical_mean=%.12g empirical_std=%.12g reps=%u success_rate=%.12g\n",
              stats.mean_trials, stats.std_trials, reps, stats.success_rate);
  if (!opts.out.empty()) {
    CsvWriter csv;
    csv.comment("rho", CsvWriter::num(rho));
    csv.comment("seed", CsvWriter::num(opts.seed));
    csv.comment("replications", CsvWriter::num(std::uint64_t{reps}));
    csv.columns({"n", "m", "f", "t_bound", "t_mean", "t_std", "success_rate"});
    csv.row({CsvWriter::num(std::uint64_t{n}), CsvWriter::num(std::uint64_t{m}),
             CsvWriter::num(std::uint64_t{f}), CsvWriter::num(bound),
             CsvWriter::num(stats.mean_trials), CsvWriter::num(stats.std_trials),
             CsvWriter::num(stats.success_rate)});
    csv.write_file(opts.out);
  }
  return 0;
}

int cmd_cost(const CostParams& cp, const CommonOpts& opts) {
  const SchemeCost costs[] = {cost_uncoded(cp), cost_checksum(cp), cost_recagt(cp)};
  for (const auto& c : costs) {
    std::printf("%-9s %20llu bytes   %s\n", c.scheme.c_str(),
                static_cast<unsigned long long>(c.communication_bytes),
                c.complexity_class.c_str());
  }
  if (!opts.out.empty()) {
    CsvWriter csv;
    csv.comment("b", CsvWriter::num(cp.b));
    csv.comment("n", CsvWriter::num(std::uint64_t{cp.n}));
    csv.comment("m", CsvWriter::num(std::uint64_t{cp.m}));
    csv.comment("w", CsvWriter::num(std::uint64_t{cp.w}));
    csv.comment("z", CsvWriter::num(std::uint64_t{cp.z}));
    csv.comment("s", CsvWriter::num(std::uint64_t{cp.s}));
    csv.comment("d", CsvWriter::num(std::uint64_t{cp.d}));
    csv.columns({"scheme", "communication_bytes", "complexity_class"});
    for (const auto& c : costs)
      csv.row({c.scheme, CsvWriter::num(c.communication_bytes), c.complexity_class});
    csv.write_file(opts.out);
  }
  return 0;
}

int cmd_bench(std::uint32_t m, const std::vector<std::uint64_t>& sizes_mib,
              std::uint32_t runs, const CommonOpts& opts) {
  Rng rng(opts.seed);
  std::vector<std::uint64_t> bs;
  std::vector<double> ts;
  CsvWriter csv;
  csv.comment("m", CsvWriter::num(std::uint64_t{m}));
  csv.comment("runs", CsvWriter::num(std::uint64_t{runs}));
  csv.comment("seed", CsvWriter::num(opts.seed));
  csv.columns({"b", "median_seconds"});
  for (auto mib : sizes_mib) {
    const std::uint64_t b = mib << 20;
    const double t = bench_recagt_verify(m, b, runs, rng);
    bs.push_back(b);
    ts.push_back(t);
    std::printf("b=%lluMiB decode_median=%.6fs\n", static_cast<unsigned long long>(mib), t);
    csv.row({CsvWriter::num(b), CsvWriter::num(t)});
  }
  if (bs.size() >= 2) {
    const double slope = loglog_slope(bs, ts);
    std::printf("loglog_slope=%.4f\n", slope);
    csv.comment("loglog_slope", CsvWriter::num(slope));
  }
  if (!opts.out.empty()) csv.write_file(opts.out);
  return 0;
}

int cmd_simulate(SimConfig cfg, std::uint32_t reps, const std::string& transcript_path,
                 const CommonOpts& opts) {
  cfg.seed = opts.seed;

  // Single-run transcript (replication 0) plus optional aggregate CSV.
  SimConfig first = cfg;
  first.seed = replication_seed(cfg.seed, 0);
  CommitteeState st = build_committee(first);
  JoinTranscript tx = run_join(first, st);

  std::printf("n=%u m=%u f=%u seed=%llu scheme=%s\n", cfg.n, cfg.m, cfg.f,
              static_cast<unsigned long long>(cfg.seed),
              cfg.scheme == SchemeKind::KeyedHash ? "keyed-hash" : "ed25519");
  std::printf("planted_adversaries=");
  for (std::size_t i = 0; i < st.adversaries.size(); ++i)
    std::printf("%s%u", i ? "+" : "", st.adversaries[i]);
  if (st.adversaries.empty()) std::printf("none");
  std::printf("\nidentified_malicious=");
  bool first_id = true;
  for (auto id : tx.result.malicious_set) {
    std::printf("%s%u", first_id ? "" : "+", id);
    first_id = false;
  }
  if (first_id) std::printf("none");
  std::printf("\ntrials_used=%llu stage_a_trials=%llu timeouts=%u fraud_proofs=%zu\n",
              static_cast<unsigned long long>(tx.result.trials_used),
              static_cast<unsigned long long>(tx.result.stage_a_trials), tx.timeouts,
              tx.fraud_proofs.size());
  std::printf("total_bytes=%llu elapsed=%.6f recovered=%s\n",
              static_cast<unsigned long long>(tx.total_bytes), tx.elapsed,
              tx.recovered_ok ? "yes" : "no");

  if (!transcript_path.empty()) {
    std::ostringstream buf;
    write_transcript(tx, buf);
    write_text(transcript_path, buf.str());
  }
  if (!opts.out.empty()) {
    ReplicationStats stats = run_replications(cfg, reps);
    write_text(opts.out, replication_csv(cfg, reps, stats));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shard testable codes with adaptive group testing: committee "
               "simulator and analytics"};
  app.require_subcommand(1);

  // probability
  auto* p_sub = app.add_subcommand("probability", "P(H=0) for a test group");
  CommonOpts p_opts;
  std::uint32_t p_n = 6, p_f = 1, p_m = 2;
  std::uint64_t p_draws = 0;
  p_sub->add_option("--n", p_n, "committee size")->required();
  p_sub->add_option("--f", p_f, "malicious count")->required();
  p_sub->add_option("--m", p_m, "shard-coding size")->required();
  p_sub->add_option("--draws", p_draws, "Monte Carlo draws (0 = closed form only)");
  add_common(p_sub, p_opts);

  // trials
  auto* t_sub = app.add_subcommand("trials", "trial bound and empirical mean");
  CommonOpts t_opts;
  int t_setting = 0;
  std::uint32_t t_n = 6, t_m = 2, t_f = 1, t_reps = 1000;
  double t_rho = 0.01;
  t_sub->add_option("--setting", t_setting, "reference setting id (1-4)");
  t_sub->add_option("--n", t_n, "committee size");
  t_sub->add_option("--m", t_m, "shard-coding size");
  t_sub->add_option("--f", t_f, "malicious count");
  t_sub->add_option("--rho", t_rho, "stage-A failure probability");
  t_sub->add_option("--reps", t_reps, "simulation replications");
  add_common(t_sub, t_opts);

  // cost
  auto* c_sub = app.add_subcommand("cost", "communication cost per scheme");
  CommonOpts c_opts;
  CostParams c_params;
  c_sub->add_option("--b", c_params.b, "shard size in bytes");
  c_sub->add_option("--n", c_params.n, "committee size");
  c_sub->add_option("--m", c_params.m, "shard-coding size");
  c_sub->add_option("--w", c_params.w, "scalar bytes");
  c_sub->add_option("--z", c_params.z, "signature bytes");
  c_sub->add_option("--s", c_params.s, "secret key bytes");
  c_sub->add_option("--d", c_params.d, "checksum digest bytes");
  add_common(c_sub, c_opts);

  // bench
  auto* b_sub = app.add_subcommand("bench", "decode benchmark over shard sizes");
  CommonOpts b_opts;
  std::uint32_t b_m = 8, b_runs = 5;
  std::vector<std::uint64_t> b_sizes = {1, 2, 4, 8, 16};
  b_sub->add_option("--m", b_m, "shard-coding size");
  b_sub->add_option("--sizes", b_sizes, "shard sizes in MiB");
  b_sub->add_option("--runs", b_runs, "timing runs per size (median)");
  add_common(b_sub, b_opts);

  // simulate
  auto* s_sub = app.add_subcommand("simulate", "run a committee join simulation");
  CommonOpts s_opts;
  SimConfig s_cfg;
  std::uint32_t s_reps = 1;
  std::string s_transcript;
  std::string s_scheme = "keyed-hash";
  std::vector<std::string> s_behaviors;
  s_sub->add_option("--n", s_cfg.n, "committee size");
  s_sub->add_option("--m", s_cfg.m, "shard-coding size");
  s_sub->add_option("--f", s_cfg.f, "malicious count");
  s_sub->add_option("--adversaries", s_cfg.adversary_ids, "explicit adversary ids");
  s_sub->add_option("--behavior", s_behaviors,
                    "adversary behaviors (honest|perturb-shard|tamper-scalar|"
                    "bad-second-signature|silent), cycled");
  s_sub->add_option("--delta", s_cfg.delta, "max network delay");
  s_sub->add_option("--b", s_cfg.shard_bytes, "original shard bytes");
  s_sub->add_option("--rho", s_cfg.rho, "stage-A failure probability");
  s_sub->add_option("--scheme", s_scheme, "signature scheme (keyed-hash|ed25519)");
  s_sub->add_option("--reps", s_reps, "replications for the aggregate CSV");
  s_sub->add_option("--transcript", s_transcript, "write the event transcript here");
  add_common(s_sub, s_opts);

  // fig4 / fig5 / fig6
  auto* f4_sub = app.add_subcommand("fig4", "probability grid CSV");
  CommonOpts f4_opts;
  std::uint64_t f4_draws = 100000;
  f4_sub->add_option("--draws", f4_draws, "Monte Carlo draws per row");
  add_common(f4_sub, f4_opts);

  auto* f5_sub = app.add_subcommand("fig5", "trial-count grid CSV");
  CommonOpts f5_opts;
  std::uint32_t f5_reps = 1000;
  double f5_rho = 0.01;
  f5_sub->add_option("--reps", f5_reps, "simulation replications per row");
  f5_sub->add_option("--rho", f5_rho, "stage-A failure probability");
  add_common(f5_sub, f5_opts);

  auto* f6_sub = app.add_subcommand("fig6", "cost and timing CSV");
  CommonOpts f6_opts;
  std::vector<std::uint32_t> f6_ngrid = {1, 10, 25, 50, 75, 100};
  std::vector<std::uint64_t> f6_sizes = {1, 2, 4, 8, 16};
  std::uint32_t f6_timing_n = 8, f6_timing_m = 8, f6_runs = 5;
  f6_sub->add_option("--n-grid", f6_ngrid, "committee sizes for the cost section");
  f6_sub->add_option("--sizes", f6_sizes, "shard sizes in MiB for the timing section");
  f6_sub->add_option("--timing-n", f6_timing_n, "committee size for timing");
  f6_sub->add_option("--timing-m", f6_timing_m, "coding size for timing");
  f6_sub->add_option("--runs", f6_runs, "timing runs per point (median)");
  add_common(f6_sub, f6_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    app.exit(e);
    return 2;
  }

  try {
    if (p_sub->parsed()) return cmd_probability(p_n, p_f, p_m, p_draws, p_opts);
    if (t_sub->parsed()) return cmd_trials(t_setting, t_n, t_m, t_f, t_rho, t_reps, t_opts);
    if (c_sub->parsed()) return cmd_cost(c_params, c_opts);
    if (b_sub->parsed()) return cmd_bench(b_m, b_sizes, b_runs, b_opts);
    if (s_sub->parsed()) {
      for (const auto& name : s_behaviors)
        s_cfg.adversary_behaviors.push_back(behavior_from_name(name));
      if (s_scheme == "keyed-hash") {
        s_cfg.scheme = SchemeKind::KeyedHash;
      } else if (s_scheme == "ed25519") {
        s_cfg.scheme = SchemeKind::Ed25519;
      } else {
        throw InvalidConfig("unknown scheme: " + s_scheme);
      }
      return cmd_simulate(s_cfg, s_reps, s_transcript, s_opts);
    }
    if (f4_sub->parsed()) {
      const std::string out = f4_opts.out.empty() ? default_out("fig4.csv") : f4_opts.out;
      write_text(out, fig4_csv(f4_draws, f4_opts.seed));
      std::printf("wrote %s\n", out.c_str());
      return 0;
    }
    if (f5_sub->parsed()) {
      const std::string out = f5_opts.out.empty() ? default_out("fig5.csv") : f5_opts.out;
      write_text(out, fig5_csv(f5_reps, f5_rho, f5_opts.seed));
      std::printf("wrote %s\n", out.c_str());
      return 0;
    }
    if (f6_sub->parsed()) {
      std::vector<std::uint64_t> sizes;
      for (auto mib : f6_sizes) sizes.push_back(mib << 20);
      const std::string out = f6_opts.out.empty() ? default_out("fig6.csv") : f6_opts.out;
      write_text(out, fig6_csv(f6_ngrid, sizes, f6_timing_n, f6_timing_m, f6_runs,
                               f6_opts.seed));
      std::printf("wrote %s\n", out.c_str());
      return 0;
    }
  } catch (const InvalidConfig& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return 3;
  } catch (const InvalidParams& e) {
    std::cerr << "invalid parameters: " << e.what() << "\n";
    return 3;
  } catch (const CommitteeTooLarge& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
