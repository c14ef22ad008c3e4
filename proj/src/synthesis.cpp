#include "zoea/synthesis.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <deque>
#include <map>
#include <stdexcept>
#include <unordered_map>

#include "zoea/catalog.hpp"

namespace zoea {

std::string_view to_string(KnowledgeSource ks) {
  switch (ks) {
    case KnowledgeSource::ConstantDetector: return "constant_detector";
    case KnowledgeSource::ProjectionDetector: return "projection_detector";
    case KnowledgeSource::PrimitiveMatcher: return "primitive_matcher";
    case KnowledgeSource::Composer: return "composer";
    case KnowledgeSource::ConditionalSplitter: return "conditional_splitter";
  }
  return "?";
}

std::string_view to_string(SearchOutcome outcome) {
  switch (outcome) {
    case SearchOutcome::Solved: return "solved";
    case SearchOutcome::CostLimit: return "cost_limit";
    case SearchOutcome::CandidateBudget: return "candidate_budget";
    case SearchOutcome::Timeout: return "timeout";
    case SearchOutcome::Contradictory: return "contradictory";
  }
  return "?";
}

void check_config(const SearchConfig& config) {
  if (config.max_cost <= 0) throw std::invalid_argument("max_cost must be positive");
  if (config.max_candidates == 0) throw std::invalid_argument("max_candidates must be positive");
  if (config.timeout_ms == 0) throw std::invalid_argument("timeout_ms must be positive");
  std::array<bool, kKnowledgeSourceCount> seen{};
  for (auto ks : config.knowledge_source_order) {
    auto& s = seen[static_cast<std::size_t>(ks)];
    if (s) throw std::invalid_argument("knowledge source listed twice");
    s = true;
  }
}

const std::vector<Value>& base_constants() {
  static const std::vector<Value> values = {Value::integer(0), Value::integer(1), Value::text(" ")};
  return values;
}

std::vector<Value> search_constants(const SynthesisProblem& problem) {
  std::vector<Value> out;
  auto add = [&](const Value& v) {
    if (v.contains_empty()) return;
    for (const auto& o : out) {
      if (o.kind() == v.kind() && deep_equal(o, v)) return;
    }
    out.push_back(v);
  };
  for (const auto& v : problem.constants_pool) add(v);
  for (const auto& v : base_constants()) add(v);
  for (const auto& c : problem.cases) {
    if (c.output.is_scalar()) add(c.output);
  }
  return out;
}

void check_problem(const SynthesisProblem& problem) {
  if (problem.cases.empty()) throw std::invalid_argument("synthesis problem has no cases");
  for (const auto& c : problem.cases) {
    if (c.inputs.size() != problem.arity) throw std::invalid_argument("case arity differs from problem arity");
    if (c.output.contains_empty()) throw std::invalid_argument("case output contains an empty placeholder");
    for (const auto& in : c.inputs) {
      if (in.contains_empty()) throw std::invalid_argument("case input contains an empty placeholder");
    }
  }
}

bool replays(const Expr& e, const SynthesisProblem& problem) {
  for (const auto& c : problem.cases) {
    EvalResult r = eval(e, c.inputs, &problem.imports);
    if (!r.ok() || !deep_equal(r.value(), c.output)) return false;
  }
  return true;
}

namespace {

using Clock = std::chrono::steady_clock;

// Dependency bits: the map slot, then one bit per input (inputs past 62 share
// the last bit).
using Deps = std::uint64_t;
constexpr Deps kDepSlot = 1;

Deps input_bit(std::size_t index) { return Deps{2} << std::min<std::size_t>(index, 62); }

Deps inputs_of(const Expr& e) {
  if (e.kind() == ExprKind::Input) return input_bit(e.input_index());
  Deps d = 0;
  for (const auto& a : e.args()) d |= inputs_of(a);
  return d;
}
constexpr int kMaxMapListCost = 3;
constexpr std::size_t kMaxSplitterCases = 64;
constexpr std::size_t kMaxSplitterOutputs = 4;

struct BudgetExhausted {
  SearchOutcome outcome;
};

class Budget {
 public:
  Budget(const SearchConfig& config, SearchStatistics& stats)
      : max_(config.max_candidates),
        deadline_(Clock::now() + std::chrono::milliseconds(config.timeout_ms)),
        stats_(stats) {}

  void charge(KnowledgeSource ks) {
    ++stats_.candidates_expanded;
    ++stats_.per_source[static_cast<std::size_t>(ks)];
    if (stats_.candidates_expanded > max_) throw BudgetExhausted{SearchOutcome::CandidateBudget};
    if ((stats_.candidates_expanded & 0xFF) == 0 && Clock::now() > deadline_) {
      throw BudgetExhausted{SearchOutcome::Timeout};
    }
  }

 private:
  std::uint64_t max_;
  Clock::time_point deadline_;
  SearchStatistics& stats_;
};

bool lex_less(const Expr& a, const Expr& b) { return canonical_serialization(a) < canonical_serialization(b); }

/// (cost, canonical text) order used for every tie-break.
/// Equal-cost solutions that read more of the supplied inputs win before the
/// lexicographic tie-break.
bool better(const Expr& a, const Expr& b) {
  if (a.cost() != b.cost()) return a.cost() < b.cost();
  const int ua = std::popcount(inputs_of(a));
  const int ub = std::popcount(inputs_of(b));
  if (ua != ub) return ua > ub;
  return lex_less(a, b);
}

struct Env {
  std::span<const Value> inputs;
  const Value* slot = nullptr;
};

struct Hypothesis {
  Expr expr;
  int cost;
  Deps deps;
  KindMask kinds;
  std::vector<Value> values;
  std::uint64_t match_mask = 0;
};

std::size_t hash_values(Deps deps, const std::vector<Value>& values) {
  std::size_t h = deps * 0x9e3779b97f4a7c15ULL;
  for (const auto& v : values) h ^= v.hash() + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

bool same_values(const std::vector<Value>& a, const std::vector<Value>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!deep_equal(a[i], b[i])) return false;
  }
  return true;
}

/// One operator the composer can apply: a catalog primitive or an import.
struct Operator {
  const Primitive* prim = nullptr;
  const Import* import = nullptr;
  std::size_t arity = 0;
  std::array<KindMask, 3> masks{};
};

/// Hypotheses indexed by behaviour. Each distinct (dependency class, value
/// vector) keeps only its cheapest, then lexicographically smallest,
/// expression. The main bank evaluates over cases; a map-body bank evaluates
/// over every (case, item) pair of one list.
class Bank {
 public:
  Bank(std::vector<Env> envs, const std::vector<Value>* targets, Budget& budget, const ImportTable& imports,
       std::vector<Operator> ops, bool allow_map)
      : envs_(std::move(envs)),
        targets_(targets),
        budget_(budget),
        imports_(imports),
        ops_(std::move(ops)),
        allow_map_(allow_map) {}

  const std::vector<Hypothesis>& entries() const { return entries_; }
  const Hypothesis& at(std::size_t id) const { return entries_[id]; }
  std::size_t size() const { return entries_.size(); }
  int tier() const { return tier_; }

  const std::vector<std::uint32_t>& of_cost(int cost) const {
    static const std::vector<std::uint32_t> none;
    if (cost < 0 || static_cast<std::size_t>(cost) >= by_cost_.size()) return none;
    return by_cost_[cost];
  }

  /// Cost-1 leaves. Called once, in search order.
  void add_leaf(const Expr& e, Deps deps) {
    std::vector<Value> values;
    values.reserve(envs_.size());
    for (const auto& env : envs_) {
      switch (e.kind()) {
        case ExprKind::Input: values.push_back(env.inputs[e.input_index()]); break;
        case ExprKind::Slot: values.push_back(*env.slot); break;
        default: values.push_back(e.constant_value()); break;
      }
    }
    offer([&] { return e; }, 1, deps, std::move(values));
    tier_ = std::max(tier_, 1);
  }

  /// Applies every operator to every argument tuple of total cost `cost`.
  /// `leaf_args` selects tuples made only of leaves (the single-primitive
  /// matcher) or tuples with at least one composite argument (the composer).
  void compose(int cost, bool leaf_args, KnowledgeSource ks) {
    ensure_cost(cost);
    for (const auto& op : ops_) {
      if (leaf_args && (op.import || cost != static_cast<int>(op.arity) + 1)) continue;
      if (op.arity == 0 || cost < static_cast<int>(op.arity) + 1) continue;
      std::vector<int> parts(op.arity, 1);
      enumerate_parts(op, parts, 0, cost - 1, leaf_args, ks);
    }
  }

  /// MapOver(list, body) with total cost `cost`.
  void compose_maps(int cost, KnowledgeSource ks, const SynthesisProblem& problem,
                    const std::vector<Value>& constants) {
    if (!allow_map_) return;
    ensure_cost(cost);
    for (int list_cost = 1; list_cost <= std::min(kMaxMapListCost, cost - 3); ++list_cost) {
      const int body_cost = cost - 2 - list_cost;
      for (std::uint32_t id : candidates(list_cost, kinds::kSequence)) {
        if (entries_[id].deps == 0) continue;
        Bank& body = body_bank(id, problem, constants);
        body.grow_to(body_cost, ks, problem, constants);
        const auto& offsets = body_offsets_.at(id);
        for (std::uint32_t bid : body.of_cost(body_cost)) {
          const Hypothesis& b = body.at(bid);
          if (!(b.deps & kDepSlot)) continue;
          budget_.charge(ks);
          std::vector<Value> values;
          values.reserve(envs_.size());
          for (std::size_t c = 0; c < envs_.size(); ++c) {
            Value::Items items(b.values.begin() + static_cast<long>(offsets[c]),
                               b.values.begin() + static_cast<long>(offsets[c + 1]));
            values.push_back(Value::list(std::move(items)));
          }
          const Deps deps = entries_[id].deps | (b.deps & ~kDepSlot);
          const Expr list_expr = entries_[id].expr;
          const Expr body_expr = b.expr;
          offer([&] { return Expr::map(list_expr, body_expr); }, cost, deps, std::move(values));
        }
      }
    }
  }

  /// Generates every tier up to `cost` (used for map-body banks).
  void grow_to(int cost, KnowledgeSource ks, const SynthesisProblem& problem, const std::vector<Value>& constants) {
    while (tier_ < cost) {
      const int next = tier_ + 1;
      compose(next, true, ks);
      compose(next, false, ks);
      compose_maps(next, ks, problem, constants);
      tier_ = next;
    }
  }

  void finish_tier(int cost) { tier_ = std::max(tier_, cost); }

  /// Ids of the current best solution candidates (main bank only).
  const std::optional<std::uint32_t>& best_solution() const { return best_solution_; }

 private:
  void ensure_cost(int cost) {
    if (by_cost_.size() <= static_cast<std::size_t>(cost)) by_cost_.resize(cost + 1);
  }

  /// Entries of exactly `cost` whose kinds are all inside `mask`.
  const std::vector<std::uint32_t>& candidates(int cost, KindMask mask) {
    const std::uint64_t key = (static_cast<std::uint64_t>(cost) << 32) | mask;
    auto it = by_mask_.find(key);
    if (it != by_mask_.end()) return it->second;
    std::vector<std::uint32_t> ids;
    for (std::uint32_t id : of_cost(cost)) {
      const KindMask k = entries_[id].kinds;
      if (k != 0 && (k & ~mask) == 0) ids.push_back(id);
    }
    return by_mask_.emplace(key, std::move(ids)).first->second;
  }

  void enumerate_parts(const Operator& op, std::vector<int>& parts, std::size_t i, int remaining, bool leaf_args,
                       KnowledgeSource ks) {
    if (i + 1 == op.arity) {
      parts[i] = remaining;
      const bool all_leaves = std::all_of(parts.begin(), parts.end(), [](int p) { return p == 1; });
      if (op.import ? leaf_args : all_leaves != leaf_args) return;
      std::vector<const std::vector<std::uint32_t>*> lists(op.arity);
      for (std::size_t a = 0; a < op.arity; ++a) {
        lists[a] = &candidates(parts[a], op.masks[a]);
        if (lists[a]->empty()) return;
      }
      std::vector<std::uint32_t> chosen(op.arity);
      enumerate_tuples(op, lists, chosen, 0, 1 + remaining_total(parts), ks);
      return;
    }
    for (int p = 1; p <= remaining - static_cast<int>(op.arity - i - 1); ++p) {
      parts[i] = p;
      enumerate_parts(op, parts, i + 1, remaining - p, leaf_args, ks);
    }
  }

  static int remaining_total(const std::vector<int>& parts) {
    int t = 0;
    for (int p : parts) t += p;
    return t;
  }

  void enumerate_tuples(const Operator& op, const std::vector<const std::vector<std::uint32_t>*>& lists,
                        std::vector<std::uint32_t>& chosen, std::size_t i, int cost, KnowledgeSource ks) {
    if (i == op.arity) {
      Deps deps = 0;
      for (auto id : chosen) deps |= entries_[id].deps;
      if (deps == 0) return;  // constant folding is not searched
      evaluate(op, chosen, cost, deps, ks);
      return;
    }
    for (std::uint32_t id : *lists[i]) {
      chosen[i] = id;
      enumerate_tuples(op, lists, chosen, i + 1, cost, ks);
    }
  }

  void evaluate(const Operator& op, const std::vector<std::uint32_t>& chosen, int cost, Deps deps,
                KnowledgeSource ks) {
    budget_.charge(ks);
    std::vector<Value> values;
    values.reserve(envs_.size());
    std::array<const Value*, 3> ptrs{};
    std::vector<Value> call_args;
    for (std::size_t e = 0; e < envs_.size(); ++e) {
      if (op.prim) {
        for (std::size_t a = 0; a < op.arity; ++a) ptrs[a] = &entries_[chosen[a]].values[e];
        EvalResult r = op.prim->apply(PrimitiveArgs(ptrs.data(), op.arity));
        if (!r.ok()) return;
        values.push_back(std::move(r.value()));
      } else {
        call_args.clear();
        for (std::size_t a = 0; a < op.arity; ++a) call_args.push_back(entries_[chosen[a]].values[e]);
        EvalResult r = op.import->call(call_args);
        if (!r.ok()) return;
        values.push_back(std::move(r.value()));
      }
    }
    offer(
        [&] {
          std::vector<Expr> args;
          args.reserve(op.arity);
          for (auto id : chosen) args.push_back(entries_[id].expr);
          return op.prim ? Expr::apply(*op.prim, std::move(args)) : Expr::call(op.import->name, std::move(args));
        },
        cost, deps, std::move(values));
  }

  template <typename MakeExpr>
  void offer(MakeExpr&& make, int cost, Deps deps, std::vector<Value> values) {
    const std::size_t h = hash_values(deps, values);
    auto& bucket = index_[h];
    for (std::uint32_t id : bucket) {
      Hypothesis& existing = entries_[id];
      if (existing.deps != deps || !same_values(existing.values, values)) continue;
      if (existing.cost < cost) return;
      Expr candidate = make();
      if (lex_less(candidate, existing.expr)) {
        existing.expr = std::move(candidate);
        note_solution(id);
      }
      return;
    }
    KindMask kinds = 0;
    for (const auto& v : values) kinds |= kinds::of(v);
    Hypothesis hyp{make(), cost, deps, kinds, std::move(values), 0};
    if (targets_) {
      for (std::size_t i = 0; i < hyp.values.size() && i < 64; ++i) {
        if (deep_equal(hyp.values[i], (*targets_)[i])) hyp.match_mask |= (1ULL << i);
      }
    }
    const auto id = static_cast<std::uint32_t>(entries_.size());
    entries_.push_back(std::move(hyp));
    bucket.push_back(id);
    ensure_cost(cost);
    by_cost_[cost].push_back(id);
    note_solution(id);
  }

  void note_solution(std::uint32_t id) {
    if (!targets_) return;
    const Hypothesis& h = entries_[id];
    if (h.deps == 0 && h.expr.kind() == ExprKind::Const) return;  // constants are the constant detector's job
    if (h.expr.kind() == ExprKind::Input) return;                  // projections are the projection detector's
    if (!same_values(h.values, *targets_)) return;
    if (!best_solution_ || better(h.expr, entries_[*best_solution_].expr) || *best_solution_ == id) {
      best_solution_ = id;
    }
  }

  Bank& body_bank(std::uint32_t list_id, const SynthesisProblem& problem, const std::vector<Value>& constants) {
    auto it = bodies_.find(list_id);
    if (it != bodies_.end()) return *it->second;
    // Flatten (case, item) pairs; item storage must outlive the bank.
    auto& store = body_items_.emplace_back();
    std::vector<std::size_t> offsets{0};
    for (std::size_t c = 0; c < envs_.size(); ++c) {
      for (auto& item : entries_[list_id].values[c].sequence_items()) store.push_back(std::move(item));
      offsets.push_back(store.size());
    }
    std::vector<Env> envs;
    for (std::size_t c = 0; c < envs_.size(); ++c) {
      for (std::size_t j = offsets[c]; j < offsets[c + 1]; ++j) envs.push_back(Env{envs_[c].inputs, &store[j]});
    }
    auto bank = std::make_unique<Bank>(std::move(envs), nullptr, budget_, imports_, ops_, false);
    bank->add_leaf(Expr::slot(), kDepSlot);
    for (std::size_t i = 0; i < problem.arity; ++i) bank->add_leaf(Expr::input(i), input_bit(i));
    for (const auto& c : constants) bank->add_leaf(Expr::constant(c), 0);
    body_offsets_.emplace(list_id, std::move(offsets));
    return *bodies_.emplace(list_id, std::move(bank)).first->second;
  }

  std::vector<Env> envs_;
  const std::vector<Value>* targets_;
  Budget& budget_;
  const ImportTable& imports_;
  std::vector<Operator> ops_;
  bool allow_map_;

  std::vector<Hypothesis> entries_;
  std::vector<std::vector<std::uint32_t>> by_cost_;
  std::unordered_map<std::size_t, std::vector<std::uint32_t>> index_;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> by_mask_;
  std::optional<std::uint32_t> best_solution_;
  int tier_ = 0;

  std::map<std::uint32_t, std::unique_ptr<Bank>> bodies_;
  std::map<std::uint32_t, std::vector<std::size_t>> body_offsets_;
  std::deque<std::deque<Value>> body_items_;
};

/// If-chain construction over the main bank. Case subsets are bit masks.
class Splitter {
 public:
  Splitter(const Bank& bank, const SynthesisProblem& problem, Budget& budget)
      : bank_(bank), problem_(problem), budget_(budget) {
    for (std::uint32_t id = 0; id < bank.size(); ++id) {
      const Hypothesis& h = bank.at(id);
      if (h.match_mask != 0 && h.deps != 0) partial_.push_back(id);
      if (h.kinds == kinds::kBoolean && h.deps != 0) {
        std::uint64_t mask = 0;
        for (std::size_t i = 0; i < h.values.size(); ++i) {
          if (h.values[i].as_bool()) mask |= (1ULL << i);
        }
        auto [it, inserted] = predicates_.emplace(std::pair{mask, h.deps}, id);
        if (!inserted && better(h.expr, bank.at(it->second).expr)) it->second = id;
      }
    }
  }

  std::optional<Expr> best(std::uint64_t subset, int budget) {
    if (budget < 1) return std::nullopt;
    auto memo = memo_.find(subset);
    if (memo != memo_.end() && memo->second.first >= budget) {
      // The cheapest answer under a larger budget is also the cheapest under this one.
      const auto& r = memo->second.second;
      return (r && r->cost() <= budget) ? r : std::nullopt;
    }
    std::optional<Expr> result = compute(subset, budget);
    memo_[subset] = {budget, result};
    return result;
  }

 private:
  std::optional<Expr> compute(std::uint64_t subset, int budget) {
    std::vector<Value> distinct;
    for (std::size_t i = 0; i < problem_.cases.size(); ++i) {
      if (!(subset & (1ULL << i))) continue;
      const Value& out = problem_.cases[i].output;
      if (std::none_of(distinct.begin(), distinct.end(), [&](const Value& d) { return deep_equal(d, out); })) {
        distinct.push_back(out);
      }
    }
    if (distinct.size() == 1) return Expr::constant(distinct.front());

    std::optional<Expr> best;
    auto consider = [&](Expr e) {
      if (e.cost() <= budget && (!best || better(e, *best))) best = std::move(e);
    };
    for (std::uint32_t id : partial_) {
      const Hypothesis& h = bank_.at(id);
      if ((h.match_mask & subset) == subset) consider(h.expr);
    }
    if (distinct.size() > kMaxSplitterOutputs || budget < 5) return best;

    for (const auto& [key, pid] : predicates_) {
      const std::uint64_t mask = key.first;
      const Expr& pred = bank_.at(pid).expr;
      const int room = budget - 2 - pred.cost();
      if (room < 2) continue;
      const std::uint64_t yes = subset & mask;
      const std::uint64_t no = subset & ~mask;
      if (yes == 0 || no == 0) continue;
      budget_.charge(KnowledgeSource::ConditionalSplitter);
      auto then_branch = this->best(yes, room - 1);
      if (!then_branch) continue;
      auto else_branch = this->best(no, room - then_branch->cost());
      if (!else_branch) continue;
      consider(Expr::if_then_else(pred, *then_branch, *else_branch));
    }
    return best;
  }

  const Bank& bank_;
  const SynthesisProblem& problem_;
  Budget& budget_;
  std::vector<std::uint32_t> partial_;
  std::map<std::pair<std::uint64_t, Deps>, std::uint32_t> predicates_;
  std::unordered_map<std::uint64_t, std::pair<int, std::optional<Expr>>> memo_;
};

std::vector<Operator> operators(const ImportTable& imports) {
  std::vector<Operator> ops;
  for (const auto& p : catalog_v1()) {
    Operator op;
    op.prim = &p;
    op.arity = p.arity;
    op.masks = p.arg_kinds;
    ops.push_back(op);
  }
  for (const auto& [name, imp] : imports) {
    if (imp.arity == 0 || imp.arity > 3) continue;
    Operator op;
    op.import = &imp;
    op.arity = imp.arity;
    op.masks = {kinds::kAny, kinds::kAny, kinds::kAny};
    ops.push_back(op);
  }
  return ops;
}

class Blackboard {
 public:
  Blackboard(const SynthesisProblem& problem, const SearchConfig& config, SearchStatistics& stats)
      : problem_(problem),
        config_(config),
        budget_(config, stats),
        stats_(stats),
        constants_(search_constants(problem)) {
    std::vector<Env> envs;
    for (const auto& c : problem.cases) {
      envs.push_back(Env{c.inputs, nullptr});
      targets_.push_back(c.output);
    }
    bank_ = std::make_unique<Bank>(std::move(envs), &targets_, budget_, problem.imports, operators(problem.imports),
                                   true);
  }

  std::optional<Expr> run(SearchOutcome& outcome) {
    try {
      for (int tier = 1; tier <= config_.max_cost; ++tier) {
        stats_.max_tier = tier;
        for (auto ks : config_.knowledge_source_order) fire(ks, tier);
        if (tier == 1) ensure_leaves();
        bank_->finish_tier(tier);
        take_bank_solution();
        if (solution_) {
          outcome = SearchOutcome::Solved;
          return solution_;
        }
      }
      outcome = SearchOutcome::CostLimit;
    } catch (const BudgetExhausted& e) {
      outcome = e.outcome;
      take_bank_solution();
      if (solution_) outcome = SearchOutcome::Solved;
    }
    return solution_;
  }

  std::size_t hypotheses() const { return bank_->size(); }

 private:
  void propose(Expr e) {
    if (!solution_ || better(e, *solution_)) solution_ = std::move(e);
  }

  void take_bank_solution() {
    if (bank_->best_solution()) propose(bank_->at(*bank_->best_solution()).expr);
  }

  void ensure_leaves() {
    if (leaves_added_) return;
    leaves_added_ = true;
    for (std::size_t i = 0; i < problem_.arity; ++i) bank_->add_leaf(Expr::input(i), input_bit(i));
    for (const auto& c : constants_) bank_->add_leaf(Expr::constant(c), 0);
  }

  void fire(KnowledgeSource ks, int tier) {
    switch (ks) {
      case KnowledgeSource::ConstantDetector: {
        if (tier != 1) return;
        budget_.charge(ks);
        const Value& first = targets_.front();
        if (std::all_of(targets_.begin(), targets_.end(), [&](const Value& v) { return deep_equal(v, first); })) {
          propose(Expr::constant(first));
        }
        return;
      }
      case KnowledgeSource::ProjectionDetector: {
        if (tier != 1) return;
        for (std::size_t i = 0; i < problem_.arity; ++i) {
          budget_.charge(ks);
          bool all = true;
          for (const auto& c : problem_.cases) all = all && deep_equal(c.inputs[i], c.output);
          if (all) propose(Expr::input(i));
        }
        return;
      }
      case KnowledgeSource::PrimitiveMatcher:
        ensure_leaves();
        if (tier >= 2) bank_->compose(tier, true, ks);
        return;
      case KnowledgeSource::Composer:
        ensure_leaves();
        // Imports over leaves already cost 2.
        if (tier >= 2) {
          bank_->compose(tier, false, ks);
          bank_->compose_maps(tier, ks, problem_, constants_);
        }
        return;
      case KnowledgeSource::ConditionalSplitter: {
        const std::size_t n = problem_.cases.size();
        if (tier < 5 || n < 2 || n > kMaxSplitterCases) return;
        take_bank_solution();
        if (solution_ && solution_->cost() <= tier) return;
        Splitter splitter(*bank_, problem_, budget_);
        const std::uint64_t all = n == 64 ? ~0ULL : ((1ULL << n) - 1);
        if (auto e = splitter.best(all, tier)) {
          if (e->kind() == ExprKind::If) propose(*e);
        }
        return;
      }
    }
  }

  const SynthesisProblem& problem_;
  const SearchConfig& config_;
  Budget budget_;
  SearchStatistics& stats_;
  std::vector<Value> constants_;
  std::vector<Value> targets_;
  std::unique_ptr<Bank> bank_;
  std::optional<Expr> solution_;
  bool leaves_added_ = false;
};

}  // namespace

SynthesisResult synthesize(const SynthesisProblem& problem, const SearchConfig& config) {
  check_problem(problem);
  check_config(config);
  const auto start = Clock::now();
  SynthesisResult result;
  for (std::size_t i = 0; i < problem.cases.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      const auto& a = problem.cases[i];
      const auto& b = problem.cases[j];
      if (same_values(a.inputs, b.inputs) && !deep_equal(a.output, b.output)) {
        result.outcome = SearchOutcome::Contradictory;
        return result;
      }
    }
  }
  Blackboard board(problem, config, result.stats);
  result.solution = board.run(result.outcome);
  result.stats.hypotheses = board.hypotheses();
  result.stats.elapsed_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  if (result.solution && !replays(*result.solution, problem)) {
    // Soundness is mandatory; a non-replaying answer is an engine defect.
    throw std::logic_error("synthesizer produced an expression that does not replay: " +
                           canonical_serialization(*result.solution));
  }
  return result;
}

}  // namespace zoea
