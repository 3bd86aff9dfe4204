#include "recagt/figdata.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "recagt/csv.hpp"
#include "recagt/grouptest.hpp"
#include "recagt/identity.hpp"
#include "recagt/simnet.hpp"

namespace recagt {

const std::vector<TableSetting>& table_settings() {
  static const std::vector<TableSetting> kSettings = {
      {1, 300, 6, 1, 2},
      {2, 70, 24, 3, 3},
      {3, 25, 72, 4, 8},
      {4, 4, 450, 5, 10},
  };
  return kSettings;
}

const TableSetting& table_setting(int id) {
  for (const auto& s : table_settings()) {
    if (s.id == id) return s;
  }
  throw InvalidConfig("unknown setting id: " + std::to_string(id));
}

namespace {

bool feasible(std::uint32_t n, std::uint32_t f, std::uint32_t m) {
  return m >= 1 && n >= static_cast<std::uint64_t>(m) + f + 1;
}

std::uint64_t row_seed(std::uint64_t base, std::uint64_t salt) {
  std::uint64_t s = base ^ (salt * 0x9e3779b97f4a7c15ULL);
  return splitmix64(s);
}

}  // namespace

std::string fig4_csv(std::uint64_t draws, std::uint64_t seed) {
  if (draws == 0) throw InvalidConfig("draw count must be positive");
  CsvWriter csv;
  csv.comment("table", "fig4");
  csv.comment("draws", CsvWriter::num(draws));
  csv.comment("seed", CsvWriter::num(seed));
  csv.columns({"n", "f", "m", "f_ratio", "m_ratio", "p_closed_form", "p_monte_carlo",
               "stderr"});

  std::uint64_t salt = 0;
  auto emit = [&](std::uint32_t n, std::uint32_t f, std::uint32_t m) {
    const double f_ratio = static_cast<double>(f) / n;
    const double m_ratio = static_cast<double>(m) / n;
    if (!feasible(n, f, m)) {
      csv.row({CsvWriter::num(std::uint64_t{n}), CsvWriter::num(std::uint64_t{f}),
               CsvWriter::num(std::uint64_t{m}), CsvWriter::num(f_ratio),
               CsvWriter::num(m_ratio), CsvWriter::blank(), CsvWriter::blank(),
               CsvWriter::blank()});
      ++salt;
      return;
    }
    const double p = prob_no_malicious(n, f, m);
    const double mc = mc_prob_no_malicious(n, f, m, draws, row_seed(seed, salt++));
    const double se = std::sqrt(std::max(mc * (1.0 - mc), 1e-12) / static_cast<double>(draws));
    csv.row({CsvWriter::num(std::uint64_t{n}), CsvWriter::num(std::uint64_t{f}),
             CsvWriter::num(std::uint64_t{m}), CsvWriter::num(f_ratio),
             CsvWriter::num(m_ratio), CsvWriter::num(p), CsvWriter::num(mc),
             CsvWriter::num(se)});
  };

  // m sweep at each reference committee.
  for (const auto& s : table_settings()) {
    for (std::uint32_t m = 1; m <= 14; ++m) emit(s.n, s.f, m);
  }
  // Ratio grid at n = 100.
  const std::uint32_t n = 100;
  for (std::uint32_t f : {5u, 10u, 15u, 20u, 25u}) {
    for (std::uint32_t m = 2; m <= 40; m += 2) emit(n, f, m);
  }
  return csv.content();
}

std::string fig5_csv(std::uint32_t reps, double rho, std::uint64_t seed) {
  if (reps == 0) throw InvalidConfig("replication count must be positive");
  if (!(rho > 0.0 && rho < 1.0)) throw InvalidConfig("rho must lie in (0, 1)");
  CsvWriter csv;
  csv.comment("table", "fig5");
  csv.comment("replications", CsvWriter::num(std::uint64_t{reps}));
  csv.comment("rho", CsvWriter::num(rho));
  csv.comment("seed", CsvWriter::num(seed));
  csv.comment("scheme", "keyed-hash");
  csv.comment("shard_bytes", "64");
  csv.columns({"setting", "sweep", "n", "m", "f", "t_bound", "t_mean", "t_std"});

  std::uint64_t salt = 0;
  auto emit = [&](int setting, const char* sweep, std::uint32_t n, std::uint32_t m,
                  std::uint32_t f) {
    std::vector<std::string> cells = {
        CsvWriter::num(std::int64_t{setting}), sweep, CsvWriter::num(std::uint64_t{n}),
        CsvWriter::num(std::uint64_t{m}), CsvWriter::num(std::uint64_t{f})};
    if (!feasible(n, f, m)) {
      cells.insert(cells.end(), {CsvWriter::blank(), CsvWriter::blank(), CsvWriter::blank()});
      csv.row(cells);
      ++salt;
      return;
    }
    const double bound = total_trials_bound(n, m, f, rho);
    SimConfig cfg;
    cfg.n = n;
    cfg.m = m;
    cfg.f = f;
    cfg.rho = rho;
    cfg.shard_bytes = 64;
    cfg.scheme = SchemeKind::KeyedHash;
    cfg.seed = row_seed(seed, salt++);
    ReplicationStats stats = run_replications(cfg, reps);
    cells.insert(cells.end(), {CsvWriter::num(bound), CsvWriter::num(stats.mean_trials),
                               CsvWriter::num(stats.std_trials)});
    csv.row(cells);
  };

  for (const auto& s : table_settings()) {
    for (std::uint32_t f = 1; f <= 14; ++f) emit(s.id, "f", s.n, s.m, f);
  }
  const std::vector<std::uint32_t> n_grid = {6, 12, 24, 48, 72, 100, 150, 200, 300, 450};
  for (const auto& s : table_settings()) {
    for (auto n : n_grid) emit(s.id, "n", n, s.m, s.f);
  }
  return csv.content();
}

// ---------------------------------------------------------------------------
// Timing benchmarks.
// ---------------------------------------------------------------------------

namespace {

void do_not_optimize(const void* p) { asm volatile("" : : "r"(p) : "memory"); }

Bytes random_blob(std::uint64_t size, Rng& rng) {
  Bytes blob(size);
  for (std::size_t i = 0; i < blob.size(); i += 8) {
    std::uint64_t v = rng.next_u64();
    for (std::size_t k = 0; k < 8 && i + k < blob.size(); ++k)
      blob[i + k] = static_cast<std::uint8_t>((v >> (8 * k)) & 0xff);
  }
  return blob;
}

}  // namespace

double time_median_seconds(std::uint32_t runs, const std::function<void()>& fn) {
  if (runs == 0) throw InvalidConfig("timing needs at least one run");
  std::vector<double> samples;
  samples.reserve(runs);
  for (std::uint32_t r = 0; r < runs; ++r) {
    auto t0 = std::chrono::steady_clock::now();
    fn();
    auto t1 = std::chrono::steady_clock::now();
    samples.push_back(std::chrono::duration<double>(t1 - t0).count());
  }
  std::sort(samples.begin(), samples.end());
  return samples[samples.size() / 2];
}

double bench_uncoded_verify(std::uint32_t n, std::uint64_t b, std::uint32_t runs, Rng& rng) {
  if (n < 2) throw InvalidConfig("uncoded verification needs at least 2 copies");
  // All copies are byte-identical, so one buffer stands in for all of them;
  // MD5 cost does not depend on content.
  Bytes blob = random_blob(b, rng);
  return time_median_seconds(runs, [&] {
    for (std::uint32_t i = 0; i < n; ++i) {
      for (std::uint32_t j = i + 1; j < n; ++j) {
        Bytes di = md5(blob);
        Bytes dj = md5(blob);
        bool same = di == dj;
        do_not_optimize(&same);
      }
    }
  });
}

double bench_checksum_verify(std::uint32_t n, std::uint64_t b, std::uint32_t runs, Rng& rng) {
  if (n < 1) throw InvalidConfig("checksum verification needs at least 1 member");
  Bytes blob = random_blob(b, rng);
  Bytes expect = md5(blob);
  return time_median_seconds(runs, [&] {
    Bytes digest = md5(blob);
    std::uint32_t matches = 0;
    for (std::uint32_t i = 1; i < n; ++i) matches += digest == expect ? 1 : 0;
    do_not_optimize(&matches);
  });
}

double bench_recagt_verify(std::uint32_t m, std::uint64_t b, std::uint32_t runs, Rng& rng) {
  if (m == 0) throw InvalidConfig("coding size must be at least 1");
  const Field field = Field::mersenne61();
  Bytes blob = random_blob(b, rng);
  Shard shard = shard_from_bytes(blob, m, field);

  TestGroup group;
  std::vector<CodedShard> coded;
  for (std::uint32_t i = 0; i <= m; ++i) {
    FieldElement x = field.from_u64(i + 1);
    group.members.push_back({i, x});
    coded.push_back(encode(shard, x, field));
  }
  std::vector<CodedShard> subset(coded.begin(), coded.begin() + m);

  return time_median_seconds(runs, [&] {
    ParityVector pv = parity_vector(group, field);
    TestOutcome outcome = run_test(group, coded, pv, field);
    do_not_optimize(&outcome);
    Shard recovered = decode(subset, field, blob.size());
    do_not_optimize(recovered.subshards.data());
  });
}

double loglog_slope(const std::vector<std::uint64_t>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw InvalidConfig("slope needs at least two matching samples");
  const auto count = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double x = std::log(static_cast<double>(xs[i]));
    const double y = std::log(ys[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (count * sxy - sx * sy) / (count * sxx - sx * sx);
}

std::string fig6_csv(const std::vector<std::uint32_t>& n_grid,
                     const std::vector<std::uint64_t>& shard_sizes,
                     std::uint32_t timing_n, std::uint32_t timing_m,
                     std::uint32_t runs, std::uint64_t seed) {
  if (n_grid.empty() || shard_sizes.empty())
    throw InvalidConfig("fig6 needs nonempty grids");
  CsvWriter csv;
  csv.comment("table", "fig6");
  csv.comment("runs", CsvWriter::num(std::uint64_t{runs}));
  csv.comment("seed", CsvWriter::num(seed));
  csv.comment("timing_n", CsvWriter::num(std::uint64_t{timing_n}));
  csv.comment("timing_m", CsvWriter::num(std::uint64_t{timing_m}));
  csv.comment("digest", "md5");
  csv.columns({"section", "n", "m", "b", "scheme", "communication_bytes",
               "median_seconds"});

  // Communication section: m tracks the committee size at the usual 1:10
  // coding ratio.
  for (auto n : n_grid) {
    CostParams cp;
    cp.n = n;
    cp.m = std::max<std::uint32_t>(1, n / 10);
    for (const SchemeCost& c : {cost_uncoded(cp), cost_checksum(cp), cost_recagt(cp)}) {
      csv.row({"comm", CsvWriter::num(std::uint64_t{n}), CsvWriter::num(std::uint64_t{cp.m}),
               CsvWriter::num(cp.b), c.scheme, CsvWriter::num(c.communication_bytes),
               CsvWriter::blank()});
    }
  }

  Rng rng = Rng(seed).child(0x66696736ULL);
  for (auto b : shard_sizes) {
    const double t_uncoded = bench_uncoded_verify(timing_n, b, runs, rng);
    const double t_checksum = bench_checksum_verify(timing_n, b, runs, rng);
    const double t_recagt = bench_recagt_verify(timing_m, b, runs, rng);
    auto emit = [&](const char* scheme, double t) {
      csv.row({"decode", CsvWriter::num(std::uint64_t{timing_n}),
               CsvWriter::num(std::uint64_t{timing_m}), CsvWriter::num(b), scheme,
               CsvWriter::blank(), CsvWriter::num(t)});
    };
    emit("uncoded", t_uncoded);
    emit("checksum", t_checksum);
    emit("recagt", t_recagt);
  }
  return csv.content();
}

}  // namespace recagt
