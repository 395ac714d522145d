#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <utility>
#include <vector>

#include <json.hpp>

#include "lowr/interval.hpp"
#include "lowr/rml/denote.hpp"
#include "lowr/rml/query.hpp"
#include "lowr/rml/sample.hpp"

namespace lowr::rml {

using ordered_json = nlohmann::ordered_json;

struct Program::Chain {
  std::mutex mu;
  std::vector<GiryMeasure<Val>> levels;
};

Program Program::from_source(const std::string& src) {
  TermPtr t = parse(src);
  TypePtr ty = typecheck(t);
  Program p(std::move(t), std::move(ty));
  p.chain_ = std::make_shared<Chain>();
  return p;
}

Program Program::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_source(ss.str());
}

GiryMeasure<Val> Program::at_level(Fuel k) {
  std::lock_guard<std::mutex> lock(chain_->mu);
  while (static_cast<Fuel>(chain_->levels.size()) <= k) {
    Fuel next = static_cast<Fuel>(chain_->levels.size());
    chain_->levels.push_back(g_cached(denote(term_, nullptr, next)));
  }
  return chain_->levels[k];
}

void check_query_type(const QuerySpec& q, const TypePtr& ty) {
  switch (q.kind) {
    case QueryKind::Mass:
      return;
    case QueryKind::Prob:
      if (ty->kind != TypeKind::Bool)
        throw RmlError(Pos{0, 0}, "prob query needs a program of type B, got " +
                                      type_str(ty));
      return;
    case QueryKind::Expect:
      if (ty->kind != TypeKind::Real)
        throw RmlError(Pos{0, 0},
                       "expect query needs a program of type R, got " +
                           type_str(ty));
      return;
    case QueryKind::Event:
      if (ty->kind != TypeKind::Real)
        throw RmlError(Pos{0, 0},
                       "event query needs a program of type R, got " +
                           type_str(ty));
      return;
  }
}

Observable<Val> query_observable(const QuerySpec& q) {
  switch (q.kind) {
    case QueryKind::Mass:
      return Observable<Val>::constant(Rat(1));
    case QueryKind::Prob:
      return Observable<Val>([](const Val& v) {
        Rat c = v.as_bool() ? Rat(1) : Rat(0);
        return LowerRealNN::from_fn([c](Fuel) { return c; });
      });
    case QueryKind::Expect:
      // Certified lower bound of the value, clamped at 0; exact for
      // nonnegative results, conservative otherwise.
      return Observable<Val>([](const Val& v) {
        RealNum x = v.as_real();
        return LowerRealNN::from_fn(
            [x](Fuel n) { return rat_max(Rat(0), x.approx(n).lo); });
      });
    case QueryKind::Event: {
      Rat a = q.a, b = q.b;
      return Observable<Val>([a, b](const Val& v) {
        const RealNum& x = v.as_real();
        Sier above = real_lt(RealNum::from_rat(a), x).first;
        Sier below = real_lt(x, RealNum::from_rat(b)).first;
        return LowerRealNN::from_fn([above, below](Fuel n) {
          return above.approx(n) && below.approx(n) ? Rat(1) : Rat(0);
        });
      });
    }
  }
  return Observable<Val>::constant(Rat(0));
}

std::vector<EvalRow> run_eval(Program& p, const QuerySpec& q) {
  check_query_type(q, p.type());
  Observable<Val> obs = query_observable(q);
  std::vector<EvalRow> rows;
  Rat best(0);
  for (Fuel k = 0; k <= q.fuel; ++k) {
    auto t0 = std::chrono::steady_clock::now();
    Rat v = p.at_level(k).integrate(obs).approx(k);
    auto t1 = std::chrono::steady_clock::now();
    best = rat_max(best, v);
    EvalRow row;
    row.fuel = k;
    row.lower = best;
    row.ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    rows.push_back(row);
  }
  return rows;
}

namespace {

bool sample_hit(const QuerySpec& q, const SVal& v) {
  switch (q.kind) {
    case QueryKind::Mass: return true;
    case QueryKind::Prob: return v.b;
    case QueryKind::Expect: return true;
    case QueryKind::Event: return q.a < v.real && v.real < q.b;
  }
  return false;
}

}  // namespace

SampleStats run_sample(const Program& p, const QuerySpec& q, long n,
                       unsigned long long seed, long max_steps) {
  check_query_type(q, p.type());
  SampleStats st;
  st.n = n;
  st.seed = seed;
  bool numeric = p.type()->kind == TypeKind::Real ||
                 p.type()->kind == TypeKind::Nat;
  double sum = 0;
  for (long i = 0; i < n; ++i) {
    std::optional<SVal> v = sample(p.term(), seed +
                                   static_cast<unsigned long long>(i),
                                   max_steps);
    if (!v) continue;
    ++st.terminated;
    if (sample_hit(q, *v)) ++st.hits;
    if (numeric)
      sum += v->tag == SVal::Tag::Nat ? static_cast<double>(v->nat)
                                      : v->real.get_d();
  }
  if (n > 0) {
    st.has_freq = true;
    st.freq = Rat(st.hits) / Rat(n);
    double fr = st.freq.get_d();
    st.sigma3 = 3.0 * std::sqrt(fr * (1.0 - fr) / static_cast<double>(n));
  }
  if (numeric && st.terminated > 0) {
    st.has_mean = true;
    st.mean = sum / static_cast<double>(st.terminated);
  }
  return st;
}

CompareReport run_compare(Program& p, const QuerySpec& q, long n,
                          unsigned long long seed) {
  CompareReport r;
  r.rows = run_eval(p, q);
  r.stats = run_sample(p, q, n, seed);
  r.bound = r.rows.empty() ? Rat(0) : r.rows.back().lower;
  // PASS iff freq >= bound - 3 sigma, decided in exact arithmetic:
  // either freq >= bound outright, or (bound - freq)^2 <= 9 freq (1-freq)/n.
  if (!r.stats.has_freq) {
    r.pass = r.bound == 0;
  } else if (r.stats.freq >= r.bound) {
    r.pass = true;
  } else {
    Rat gap = r.bound - r.stats.freq;
    Rat var9 = Rat(9) * r.stats.freq * (Rat(1) - r.stats.freq) / Rat(n);
    r.pass = gap * gap <= var9;
  }
  return r;
}

std::string query_str(const QuerySpec& q) {
  switch (q.kind) {
    case QueryKind::Mass: return "mass";
    case QueryKind::Prob: return "prob";
    case QueryKind::Expect: return "expect";
    case QueryKind::Event:
      return "event " + rat_str(q.a) + " " + rat_str(q.b);
  }
  return "?";
}

namespace {

ordered_json rows_json(const std::vector<EvalRow>& rows, bool with_ms) {
  ordered_json arr = ordered_json::array();
  for (const EvalRow& r : rows) {
    ordered_json row;
    row["fuel"] = r.fuel;
    row["lower_bound"] = rat_str(r.lower);
    if (with_ms) row["ms"] = r.ms;
    arr.push_back(std::move(row));
  }
  return arr;
}

ordered_json stats_json(const SampleStats& s) {
  ordered_json j;
  j["n"] = s.n;
  j["seed"] = s.seed;
  j["terminated"] = s.terminated;
  j["hits"] = s.hits;
  if (s.has_freq) {
    j["freq"] = rat_str(s.freq);
    j["sigma3"] = s.sigma3;
  }
  if (s.has_mean) j["mean"] = s.mean;
  return j;
}

}  // namespace

std::string eval_json(const QuerySpec& q, const std::vector<EvalRow>& rows,
                      bool with_ms) {
  ordered_json j;
  j["query"] = query_str(q);
  j["rows"] = rows_json(rows, with_ms);
  return j.dump(2) + "\n";
}

std::string sample_json(const QuerySpec& q, const SampleStats& s) {
  ordered_json j;
  j["query"] = query_str(q);
  j["sampler"] = stats_json(s);
  return j.dump(2) + "\n";
}

std::string compare_json(const QuerySpec& q, const CompareReport& r,
                         bool with_ms) {
  ordered_json j;
  j["query"] = query_str(q);
  j["rows"] = rows_json(r.rows, with_ms);
  j["sampler"] = stats_json(r.stats);
  j["bound"] = rat_str(r.bound);
  j["verdict"] = r.pass ? "PASS" : "FAIL";
  return j.dump(2) + "\n";
}

std::string eval_text(const QuerySpec& q, const std::vector<EvalRow>& rows,
                      bool with_ms) {
  std::ostringstream out;
  out << "query: " << query_str(q) << "\n";
  out << (with_ms ? "fuel  lower_bound  ms\n" : "fuel  lower_bound\n");
  for (const EvalRow& r : rows) {
    char fuel[16];
    std::snprintf(fuel, sizeof fuel, "%4d", r.fuel);
    out << fuel << "  " << rat_str(r.lower);
    if (with_ms) {
      char ms[32];
      std::snprintf(ms, sizeof ms, "  %.2f", r.ms);
      out << ms;
    }
    out << "\n";
  }
  return out.str();
}

std::string sample_text(const QuerySpec& q, const SampleStats& s) {
  std::ostringstream out;
  out << "query: " << query_str(q) << "\n";
  out << "n: " << s.n << "  seed: " << s.seed << "\n";
  out << "terminated: " << s.terminated << "/" << s.n << "\n";
  if (s.has_freq) {
    char sg[32];
    std::snprintf(sg, sizeof sg, "%.6f", s.sigma3);
    out << "freq: " << rat_str(s.freq) << "  sigma3: " << sg << "\n";
  }
  if (s.has_mean) {
    char m[32];
    std::snprintf(m, sizeof m, "%.6f", s.mean);
    out << "mean: " << m << "\n";
  }
  return out.str();
}

std::string compare_text(const QuerySpec& q, const CompareReport& r) {
  std::ostringstream out;
  out << sample_text(q, r.stats);
  out << "bound: " << rat_str(r.bound) << "\n";
  out << "verdict: " << (r.pass ? "PASS" : "FAIL") << "\n";
  return out.str();
}

}  // namespace lowr::rml
