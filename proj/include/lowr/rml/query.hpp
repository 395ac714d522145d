#pragma once

#include <string>
#include <vector>

#include "lowr/giry.hpp"
#include "lowr/rml/ast.hpp"
#include "lowr/rml/value.hpp"

namespace lowr::rml {

enum class QueryKind { Mass, Prob, Expect, Event };

struct QuerySpec {
  QueryKind kind = QueryKind::Mass;
  Rat a, b;  // Event endpoints, a < b
  Fuel fuel = 8;
};

struct EvalRow {
  Fuel fuel = 0;
  Rat lower;
  double ms = 0;
};

struct SampleStats {
  long n = 0;
  unsigned long long seed = 0;
  long terminated = 0;
  long hits = 0;     // samples satisfying the queried event
  bool has_freq = false;
  Rat freq;          // hits / n, exact
  bool has_mean = false;
  double mean = 0;   // numeric summary for N / R results (terminated runs)
  double sigma3 = 0; // 3 * sqrt(freq (1-freq) / n), display only
};

// A parsed, typechecked program plus its memoized truncation chain.
class Program {
 public:
  static Program from_source(const std::string& src);
  static Program load(const std::string& path);  // throws std::runtime_error on I/O

  const TermPtr& term() const { return term_; }
  const TypePtr& type() const { return type_; }

  // denote at recursion depth k under the empty environment, memoized so
  // successive query rows share iterates and their caches.
  GiryMeasure<Val> at_level(Fuel k);

 private:
  Program(TermPtr t, TypePtr ty) : term_(std::move(t)), type_(std::move(ty)) {}
  TermPtr term_;
  TypePtr type_;
  struct Chain;
  std::shared_ptr<Chain> chain_;
};

// Throws RmlError if the query does not fit the program type.
void check_query_type(const QuerySpec& q, const TypePtr& ty);

// The queried quantity as an observable on result values.
Observable<Val> query_observable(const QuerySpec& q);

// Lower-bound rows 0..q.fuel along the diagonal (recursion depth = fuel),
// made monotone by a running max.
std::vector<EvalRow> run_eval(Program& p, const QuerySpec& q);

// n samples with seeds seed, seed+1, ...; the event counted matches q.
SampleStats run_sample(const Program& p, const QuerySpec& q, long n,
                       unsigned long long seed, long max_steps = 200000);

struct CompareReport {
  std::vector<EvalRow> rows;
  SampleStats stats;
  Rat bound;  // final eval row
  bool pass = false;
};

CompareReport run_compare(Program& p, const QuerySpec& q, long n,
                          unsigned long long seed);

// Rendering. JSON output is byte-deterministic for fixed inputs; timings are
// included only when with_ms is set.
std::string query_str(const QuerySpec& q);
std::string eval_json(const QuerySpec& q, const std::vector<EvalRow>& rows,
                      bool with_ms);
std::string sample_json(const QuerySpec& q, const SampleStats& s);
std::string compare_json(const QuerySpec& q, const CompareReport& r,
                         bool with_ms);
std::string eval_text(const QuerySpec& q, const std::vector<EvalRow>& rows,
                      bool with_ms);
std::string sample_text(const QuerySpec& q, const SampleStats& s);
std::string compare_text(const QuerySpec& q, const CompareReport& r);

}  // namespace lowr::rml
