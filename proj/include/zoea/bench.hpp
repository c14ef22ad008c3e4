#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "zoea/compiler.hpp"

namespace zoea {

struct BenchSide {
  bool solved = false;
  std::uint64_t candidates = 0;
  double median_ms = 0.0;
};

struct BenchRow {
  std::string problem;
  BenchSide with_deps;
  BenchSide without_deps;

  bool comparable() const { return with_deps.solved && without_deps.solved; }
  bool pruning_holds() const { return with_deps.candidates <= without_deps.candidates; }
};

struct BenchReport {
  std::vector<BenchRow> rows;
  /// Rows solved both ways.
  std::size_t comparable = 0;
  /// candidates(with) <= candidates(without) on every comparable row.
  bool pruning_holds = true;
  /// Medians over comparable rows of each row's median wall time.
  double median_ms_with = 0.0;
  double median_ms_without = 0.0;
};

/// Compiles `d` with and without its dependencies, `repeat` times each.
BenchRow bench_document(const std::string& name, const Document& d, const SearchConfig& config, int repeat);

/// Every *.json document in `suite`, in file name order.
BenchReport run_bench(const std::filesystem::path& suite, const SearchConfig& config, int repeat);

std::string bench_csv(const BenchReport& report);
std::string bench_table(const BenchReport& report);

double median(std::vector<double> xs);

}  // namespace zoea
