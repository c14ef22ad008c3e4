#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "zoea/expr.hpp"
#include "zoea/interpreter.hpp"
#include "zoea/value.hpp"

namespace zoea {

struct SynthesisCase {
  std::vector<Value> inputs;
  Value output;
};

struct SynthesisProblem {
  std::vector<SynthesisCase> cases;
  std::size_t arity = 0;
  /// Values the search may use as constants (reference data).
  std::vector<Value> constants_pool;
  ImportTable imports;
};

/// Knowledge sources, in their default firing order within a cost tier.
enum class KnowledgeSource {
  ConstantDetector,
  ProjectionDetector,
  PrimitiveMatcher,
  Composer,
  ConditionalSplitter,
};

inline constexpr std::size_t kKnowledgeSourceCount = 5;

std::string_view to_string(KnowledgeSource ks);

struct SearchConfig {
  int max_cost = 12;
  std::uint64_t max_candidates = 2'000'000;
  std::uint64_t timeout_ms = 10'000;
  std::vector<KnowledgeSource> knowledge_source_order = {
      KnowledgeSource::ConstantDetector, KnowledgeSource::ProjectionDetector, KnowledgeSource::PrimitiveMatcher,
      KnowledgeSource::Composer, KnowledgeSource::ConditionalSplitter};
};

/// Throws std::invalid_argument for non-positive budgets or an order that
/// repeats a knowledge source.
void check_config(const SearchConfig& config);

/// Contradictory: two cases share inputs but not outputs, so no expression fits.
enum class SearchOutcome { Solved, CostLimit, CandidateBudget, Timeout, Contradictory };

std::string_view to_string(SearchOutcome outcome);

struct SearchStatistics {
  std::uint64_t candidates_expanded = 0;
  std::array<std::uint64_t, kKnowledgeSourceCount> per_source{};
  int max_tier = 0;
  std::size_t hypotheses = 0;  // distinct behaviours retained on the blackboard
  double elapsed_ms = 0.0;
};

struct SynthesisResult {
  std::optional<Expr> solution;
  SearchOutcome outcome = SearchOutcome::CostLimit;
  SearchStatistics stats;

  bool ok() const noexcept { return solution.has_value(); }
};

/// Constants every search may use besides the pool and output scalars.
const std::vector<Value>& base_constants();

/// Constants visible to the search for `problem`, in search order:
/// pool, base constants, then scalars appearing in outputs (deduplicated).
std::vector<Value> search_constants(const SynthesisProblem& problem);

/// Checks problem invariants; throws std::invalid_argument.
void check_problem(const SynthesisProblem& problem);

/// True iff `e` reproduces every case output exactly.
bool replays(const Expr& e, const SynthesisProblem& problem);

/// Finds the cheapest expression found consistent with every case; ties go
/// to the lexicographically smallest canonical serialization.
SynthesisResult synthesize(const SynthesisProblem& problem, const SearchConfig& config = {});

}  // namespace zoea
