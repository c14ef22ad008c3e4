#include "zoea/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace zoea {

double median(std::vector<double> xs) {
  if (xs.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 ? xs[n / 2] : (xs[n / 2 - 1] + xs[n / 2]) / 2.0;
}

namespace {

BenchSide measure(const Document& d, const SearchConfig& config, int repeat, bool use_dependencies) {
  BenchSide side;
  std::vector<double> times;
  for (int i = 0; i < std::max(1, repeat); ++i) {
    const auto start = std::chrono::steady_clock::now();
    CompileReport r = compile_document(d, config, {}, {}, use_dependencies);
    times.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count());
    side.solved = r.success;
    side.candidates = r.candidates_expanded;
  }
  side.median_ms = median(times);
  return side;
}

}  // namespace

BenchRow bench_document(const std::string& name, const Document& d, const SearchConfig& config, int repeat) {
  BenchRow row;
  row.problem = name;
  row.with_deps = measure(d, config, repeat, true);
  row.without_deps = measure(d, config, repeat, false);
  return row;
}

BenchReport run_bench(const std::filesystem::path& suite, const SearchConfig& config, int repeat) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(suite)) {
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  BenchReport report;
  std::vector<double> with_ms, without_ms;
  for (const auto& f : files) {
    std::ifstream in(f, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    const Document d = document_from_json(buf.str());
    BenchRow row = bench_document(f.stem().string(), d, config, repeat);
    if (row.comparable()) {
      ++report.comparable;
      report.pruning_holds = report.pruning_holds && row.pruning_holds();
      with_ms.push_back(row.with_deps.median_ms);
      without_ms.push_back(row.without_deps.median_ms);
    }
    report.rows.push_back(std::move(row));
  }
  report.median_ms_with = median(with_ms);
  report.median_ms_without = median(without_ms);
  return report;
}

std::string bench_csv(const BenchReport& report) {
  std::ostringstream out;
  out << "problem,with_solved,with_candidates,with_ms,without_solved,without_candidates,without_ms\n";
  char buf[64];
  for (const auto& r : report.rows) {
    out << r.problem << ',' << r.with_deps.solved << ',' << r.with_deps.candidates << ',';
    std::snprintf(buf, sizeof buf, "%.3f", r.with_deps.median_ms);
    out << buf << ',' << r.without_deps.solved << ',' << r.without_deps.candidates << ',';
    std::snprintf(buf, sizeof buf, "%.3f", r.without_deps.median_ms);
    out << buf << '\n';
  }
  return out.str();
}

std::string bench_table(const BenchReport& report) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-24s %14s %10s %14s %10s  %s\n", "problem", "with:cand", "with:ms", "without:cand",
                "without:ms", "note");
  out << line;
  for (const auto& r : report.rows) {
    const char* note = !r.comparable() ? "UnsolvableEitherWay" : (r.pruning_holds() ? "" : "MORE CANDIDATES WITH DEPS");
    std::snprintf(line, sizeof line, "%-24s %14llu %10.1f %14llu %10.1f  %s\n", r.problem.c_str(),
                  static_cast<unsigned long long>(r.with_deps.candidates), r.with_deps.median_ms,
                  static_cast<unsigned long long>(r.without_deps.candidates), r.without_deps.median_ms, note);
    out << line;
  }
  std::snprintf(line, sizeof line, "%-24s %14s %10.1f %14s %10.1f  %zu/%zu comparable, pruning %s\n", "median", "",
                report.median_ms_with, "", report.median_ms_without, report.comparable, report.rows.size(),
                report.pruning_holds ? "holds" : "VIOLATED");
  out << line;
  return out.str();
}

}  // namespace zoea
