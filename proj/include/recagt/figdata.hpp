#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "recagt/cost.hpp"
#include "recagt/rng.hpp"

namespace recagt {

/// The four reference committee configurations used throughout the
/// experiments (committee count, size, planted adversaries, coding size).
struct TableSetting {
  int id;
  std::uint32_t committees;
  std::uint32_t n;
  std::uint32_t f;
  std::uint32_t m;
};

const std::vector<TableSetting>& table_settings();
const TableSetting& table_setting(int id);

/// Probability grid: per-setting m sweeps plus an (f/n, m/n) ratio grid, each
/// row carrying the closed form next to a Monte Carlo estimate.
/// Columns: n,f,m,f_ratio,m_ratio,p_closed_form,p_monte_carlo,stderr.
std::string fig4_csv(std::uint64_t draws, std::uint64_t seed);

/// Trial-count grid: analytic bound next to empirical simulation means, as an
/// f sweep and an n sweep per setting. Infeasible rows (n < m+f+1) have blank
/// result cells.
/// Columns: setting,sweep,n,m,f,t_bound,t_mean,t_std.
std::string fig5_csv(std::uint32_t reps, double rho, std::uint64_t seed);

/// Communication cost per scheme over a committee-size grid plus wall-clock
/// verify/decode medians per scheme over a shard-size grid.
/// Columns: section,n,m,b,scheme,communication_bytes,median_seconds.
std::string fig6_csv(const std::vector<std::uint32_t>& n_grid,
                     const std::vector<std::uint64_t>& shard_sizes,
                     std::uint32_t timing_n, std::uint32_t timing_m,
                     std::uint32_t runs, std::uint64_t seed);

/// Median wall-clock seconds of fn over `runs` invocations.
double time_median_seconds(std::uint32_t runs, const std::function<void()>& fn);

/// Pairwise-digest consistency check over n full shard copies (per pair both
/// sides are hashed; O(n^2 b) work).
double bench_uncoded_verify(std::uint32_t n, std::uint64_t b, std::uint32_t runs, Rng& rng);

/// Single digest recompute plus n-1 digest comparisons (O(b + n d) work).
double bench_checksum_verify(std::uint32_t n, std::uint64_t b, std::uint32_t runs, Rng& rng);

/// Parity test over m+1 coded shards plus Lagrange decode from m of them.
double bench_recagt_verify(std::uint32_t m, std::uint64_t b, std::uint32_t runs, Rng& rng);

/// Least-squares slope of log(time) against log(b); ~1 for linear growth.
double loglog_slope(const std::vector<std::uint64_t>& xs, const std::vector<double>& ys);

}  // namespace recagt
