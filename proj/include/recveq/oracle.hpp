#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "recveq/lang/ast.hpp"

namespace recveq::oracle {

/// Identifies one dynamic occurrence of a nondet() or UF application: the
/// chain of call nodes leading to the frame, then the node itself.
using ValueKey = std::vector<const void*>;

/// Values for nondet() and UF applications, typically taken from a solver model.
struct Choices {
  std::map<ValueKey, std::int64_t> values;
  std::int64_t fallback = 0;
};

struct TraceEntry {
  int depth = 0;
  std::string callee;
  std::vector<std::int64_t> args;
};

struct InterpOptions {
  unsigned width = 8;
  std::size_t fuel = 256;
  const Choices* choices = nullptr;
  bool trace = false;
};

enum class Status { Value, NonTermination, Blocked, AssertFailed };

const char* to_string(Status s);

struct EvalResult {
  Status status = Status::Value;
  std::vector<std::int64_t> values;
  std::vector<TraceEntry> trace;
  /// Leaf-store contents, indexed by store id; each record is (D, Site, args...).
  std::map<int, std::vector<std::vector<std::int64_t>>> records;
  std::map<std::string, std::int64_t> globals;
  std::size_t fuel_used = 0;

  bool terminated() const { return status == Status::Value; }
  std::int64_t value() const { return values.empty() ? 0 : values[0]; }
};

/// Big-step reference interpreter. Fuel counts frames entered and loop-condition
/// evaluations; arithmetic wraps at the configured width.
EvalResult eval(const lang::SourceUnit& unit, const std::string& fn, const std::vector<std::int64_t>& args,
                const InterpOptions& options = {});

EvalResult eval(const lang::FunctionDef& f, const std::vector<std::int64_t>& args, std::size_t fuel = 256,
                unsigned width = 8);

/// Evaluates a parameter predicate on concrete values (no calls allowed).
bool holds(const lang::ExprPtr& pred, const std::vector<std::string>& params, const std::vector<std::int64_t>& args,
           unsigned width = 8);

/// Set comparison of two leaf stores on argument tuples (the D and Site fields are ignored).
bool leaves_equal(const std::vector<std::vector<std::int64_t>>& a, const std::vector<std::vector<std::int64_t>>& b);

struct DomainSpec {
  /// Inclusive range per parameter; missing entries default to the full signed range.
  std::vector<std::pair<std::int64_t, std::int64_t>> ranges;
  std::size_t fuel = 256;
  unsigned width = 8;
};

/// Enumerates the product domain in lexicographic order (first parameter most significant).
void for_each_input(std::size_t arity, const DomainSpec& d,
                    const std::function<bool(const std::vector<std::int64_t>&)>& fn);

struct EquivResult {
  bool equivalent = true;  // false iff a witness was found
  std::vector<std::int64_t> input;
  std::int64_t v1 = 0, v2 = 0;
  std::size_t checked = 0;
  std::vector<std::vector<std::int64_t>> fuel_limited;
};

/// Brute-force partial equivalence: inputs where either side runs out of fuel
/// are excluded and listed in `fuel_limited`.
EquivResult brute_force_equiv(const lang::SourceUnit& u1, const std::string& f1, const lang::SourceUnit& u2,
                              const std::string& f2, const DomainSpec& d = {});

EquivResult brute_force_equiv(const lang::FunctionDef& f1, const lang::FunctionDef& f2, const DomainSpec& d = {});

}  // namespace recveq::oracle
