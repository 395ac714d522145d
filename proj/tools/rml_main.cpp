#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lowr/rml/query.hpp"

namespace {

using lowr::Rat;
using namespace lowr::rml;

QuerySpec parse_query(const std::vector<std::string>& words, int fuel) {
  QuerySpec q;
  q.fuel = fuel;
  if (words.empty()) return q;
  const std::string& kind = words[0];
  if (kind == "mass") {
    q.kind = QueryKind::Mass;
  } else if (kind == "prob") {
    q.kind = QueryKind::Prob;
  } else if (kind == "expect") {
    q.kind = QueryKind::Expect;
  } else if (kind == "event") {
    q.kind = QueryKind::Event;
    if (words.size() != 3)
      throw CLI::ValidationError("--query event needs two endpoints a b");
    auto a = lowr::rat_parse(words[1]);
    auto b = lowr::rat_parse(words[2]);
    if (!a || !b)
      throw CLI::ValidationError("event endpoints must be rationals");
    q.a = *a;
    q.b = *b;
    if (!(q.a < q.b))
      throw CLI::ValidationError("--query event needs a < b");
  } else {
    throw CLI::ValidationError("unknown query '" + kind + "'");
  }
  if (q.kind != QueryKind::Event && words.size() != 1)
    throw CLI::ValidationError("--query " + kind + " takes no endpoints");
  return q;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rml: lower-bound evaluator and sampler for Rml programs"};
  app.require_subcommand(1);

  std::string path;
  std::vector<std::string> query_words{"mass"};
  int fuel = 8;
  long n = 10000;
  unsigned long long seed = 1;
  bool json = false;
  bool timings = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("program", path, "Rml source file")->required();
    cmd->add_flag("--json", json, "emit JSON instead of text");
  };

  CLI::App* check = app.add_subcommand("check", "parse and typecheck");
  add_common(check);

  CLI::App* eval = app.add_subcommand("eval", "lower-bound table");
  add_common(eval);
  eval->add_option("--query", query_words,
                   "mass | prob | expect | event a b")
      ->expected(1, 3);
  eval->add_option("--fuel", fuel, "fuel budget (rows 0..K)");
  eval->add_flag("--timings", timings, "include per-row wall time");

  CLI::App* samp = app.add_subcommand("sample", "Monte Carlo run");
  add_common(samp);
  samp->add_option("--query", query_words,
                   "mass | prob | expect | event a b")
      ->expected(1, 3);
  samp->add_option("--n", n, "number of samples");
  samp->add_option("--seed", seed, "base seed");

  CLI::App* comp = app.add_subcommand("compare", "eval vs Monte Carlo");
  add_common(comp);
  comp->add_option("--query", query_words,
                   "mass | prob | expect | event a b")
      ->expected(1, 3);
  comp->add_option("--fuel", fuel, "fuel budget");
  comp->add_option("--n", n, "number of samples");
  comp->add_option("--seed", seed, "base seed");
  comp->add_flag("--timings", timings, "include per-row wall time");

  CLI11_PARSE(app, argc, argv);

  try {
    Program prog = Program::load(path);

    if (check->parsed()) {
      if (json) {
        std::cout << "{\n  \"type\": \"" << type_str(prog.type())
                  << "\"\n}\n";
      } else {
        std::cout << type_str(prog.type()) << "\n";
      }
      return 0;
    }

    QuerySpec q = parse_query(query_words, fuel);

    if (eval->parsed()) {
      std::vector<EvalRow> rows = run_eval(prog, q);
      std::cout << (json ? eval_json(q, rows, timings)
                         : eval_text(q, rows, timings));
      return 0;
    }
    if (samp->parsed()) {
      SampleStats st = run_sample(prog, q, n, seed);
      std::cout << (json ? sample_json(q, st) : sample_text(q, st));
      return 0;
    }
    CompareReport rep = run_compare(prog, q, n, seed);
    std::cout << (json ? compare_json(q, rep, timings)
                       : compare_text(q, rep));
    return rep.pass ? 0 : 3;
  } catch (const RmlError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
