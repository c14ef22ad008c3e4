#pragma once

// Generators and independent reference implementations shared by the unit
// tests and the acceptance binary.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "zoea/compiler.hpp"
#include "zoea/document.hpp"
#include "zoea/expr.hpp"
#include "zoea/json_bridge.hpp"
#include "zoea/synthesis.hpp"
#include "zoea/value.hpp"
#include "zoea/zoea_text.hpp"

namespace zt {

using Rng = std::mt19937_64;

// ---- is_week_day ---------------------------------------------------------------

extern const char* const kWeekDay;
const std::vector<std::string>& week_days();

/// Reference semantics of is_week_day: lowercase the input and look it up.
std::string is_week_day_reference(const std::string& input);

/// The 50 generalization probes: mixed-case days and non-days.
std::vector<std::string> week_day_probes(std::uint64_t seed);

/// is_week_day drawn as a document: a data list, one input and one output per
/// case, input -> output dependencies.
zoea::Document week_day_document(bool with_dependencies = true);

// ---- values and ASTs -----------------------------------------------------------

/// Kind, lexical number form and item order must all agree. Tables and lists
/// are not interchangeable here.
bool strict_equal(const zoea::Value& a, const zoea::Value& b);

zoea::Value random_value(Rng& rng, int depth = 3, bool allow_tables = true);
std::string random_text(Rng& rng, std::size_t max_len = 8);
zoea::ZoeaProgram random_program(Rng& rng);
/// Same AST including comments, with strict value comparison.
bool strict_same_program(const zoea::ZoeaProgram& a, const zoea::ZoeaProgram& b, std::string* why = nullptr);

zoea::Expr random_expr(Rng& rng, int depth, bool slot_allowed = false);

// ---- synthesis oracles ------------------------------------------------------------

/// Every expression of the leaf/Apply grammar up to `max_cost` over the given
/// arity and constants, cheapest first. If and Map cost at least 4 and are
/// left out, so the list is complete for max_cost <= 3.
std::vector<zoea::Expr> enumerate_expressions(std::size_t arity, const std::vector<zoea::Value>& constants,
                                              int max_cost);

/// Cost of the cheapest expression (cost <= max_cost) replaying every case,
/// found by exhaustive enumeration.
std::optional<int> brute_force_min_cost(const zoea::SynthesisProblem& p, int max_cost);

struct SampledProblem {
  zoea::SynthesisProblem problem;
  zoea::Expr program;  // the expression the outputs came from
};

/// A random expression of cost <= max_cost evaluated on random inputs. Outputs
/// are never all equal and never fail to evaluate.
SampledProblem sample_problem(Rng& rng, int max_cost);

// ---- documents ---------------------------------------------------------------------

/// A random document that passes validate_document: data, input, derive and
/// output identities spread over 1-4 cases, empty placeholders, labels,
/// comments and left-to-right dependencies.
zoea::Document random_document(Rng& rng);

/// Synthetic cases rebuilt straight from document JSON, as canonical JSON.
std::string synthetic_cases_oracle(const std::string& document_json, bool use_dependencies = true);
/// The library's synthetic cases in the same JSON layout.
std::string synthetic_cases_json(const std::vector<zoea::SyntheticCase>& cases);

/// A two-step chain in -> mid -> out with the dependencies drawn.
zoea::Document chain_document(const std::vector<std::pair<zoea::Value, std::pair<zoea::Value, zoea::Value>>>& rows);

// ---- misc ---------------------------------------------------------------------------

std::string read_file(const std::string& path);

}  // namespace zt
