#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "recveq/common.hpp"
#include "recveq/lang/loops.hpp"
#include "recveq/lang/parser.hpp"
#include "recveq/lang/printer.hpp"
#include "recveq/lang/typecheck.hpp"
#include "recveq/oracle.hpp"
#include "recveq/pathex.hpp"
#include "recveq/prover.hpp"
#include "recveq/sync.hpp"
#include "recveq/vc/encoder.hpp"
#include "recveq/vc/solver.hpp"

#ifndef RECVEQ_CORPUS_DIR
#define RECVEQ_CORPUS_DIR "corpus"
#endif

using namespace recveq;
using nlohmann::json;

namespace {

constexpr int kUsage = 3;

struct Config {
  unsigned width = 8;
  int uw_max = 6;
  int depth_bound = 16;
  std::size_t path_bound = 4096;
  double solver_seconds = 10.0;
  std::int64_t conflicts = 2000000;
  double sync_seconds = 60.0;
  bool strict_size_guard = false;
  std::string engine = "auto";
  std::string dump_dir;
  std::string emit_smt;
  std::string emit_cnf;
  bool refute = true;
  bool internal = false;
  bool json = false;

  void add_to(CLI::App* app) {
    app->add_option("--width", width, "bit width of int")->check(CLI::Range(2, 64));
    app->add_option("--uw-max", uw_max, "largest unwinding tried by the sync search")->check(CLI::NonNegativeNumber);
    app->add_option("--depth-bound", depth_bound, "symbolic execution depth bound")->check(CLI::PositiveNumber);
    app->add_option("--path-bound", path_bound, "path enumeration budget")->check(CLI::PositiveNumber);
    app->add_option("--solver-seconds", solver_seconds, "time limit per SAT query")->check(CLI::PositiveNumber);
    app->add_option("--conflicts", conflicts, "conflict limit per SAT query")->check(CLI::PositiveNumber);
    app->add_option("--sync-seconds", sync_seconds, "time budget of one sync search")->check(CLI::PositiveNumber);
    app->add_flag("--strict-size-guard", strict_size_guard, "require more than one leaf per side");
    app->add_option("--engine", engine, "auto, enumerate or satcore")
        ->check(CLI::IsMember({"auto", "enumerate", "satcore"}, CLI::ignore_case));
    app->add_option("--dump-dir", dump_dir, "write assembled tasks here");
    app->add_option("--emit-smt", emit_smt, "write SMT-LIB for every flat task into this directory");
    app->add_option("--emit-cnf", emit_cnf, "write DIMACS for every SAT query into this directory");
    app->add_flag("--internal", internal, "accept generated-only constructs in sources");
    app->add_flag("--json", json, "machine-readable output");
    app->add_flag("!--no-refute", refute, "skip the oracle sweep when no proof is found");
  }

  prover::Options options() const {
    prover::Options o;
    o.width = width;
    o.max_uw = uw_max;
    o.depth_bound = depth_bound;
    o.path_bound = path_bound;
    o.sync_seconds = sync_seconds;
    o.strict_size_guard = strict_size_guard;
    o.solver.engine = vc::engine_from_string(engine);
    o.solver.limits = {conflicts, solver_seconds};
    o.refute = refute;
    o.dump_dir = dump_dir;
    if (o.dump_dir.empty())
      if (const char* env = std::getenv("RECVEQ_DUMP")) o.dump_dir = env;
    if (!emit_smt.empty()) {
      if (o.dump_dir.empty()) o.dump_dir = emit_smt;
      o.emit_smt = true;
    }
    if (!emit_cnf.empty()) vc::set_cnf_dump_dir(emit_cnf);
    return o;
  }

  lang::SourceUnit load(const std::string& path) const {
    lang::ParseOptions po;
    po.allow_internal = internal;
    auto u = lang::parse_file(path, po);
    lang::typecheck(u);
    return u;
  }
};

std::pair<std::string, std::string> split_pair(const std::string& s) {
  auto c = s.find(':');
  if (c == std::string::npos || c == 0 || c + 1 == s.size()) throw CLI::ValidationError("--pair", "expected f1:f2");
  return {s.substr(0, c), s.substr(c + 1)};
}

void require(const lang::SourceUnit& u, const std::string& fn, const std::string& file) {
  if (!u.find(fn)) throw Error("no function '" + fn + "' in " + file);
}

std::string join(const std::vector<std::int64_t>& v) {
  std::string s;
  for (auto x : v) s += (s.empty() ? "" : " ") + std::to_string(x);
  return s;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_or_print(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

// Both functions in one context, from one or two files.
prover::PairContext pair_context(const Config& cfg, const std::vector<std::string>& files,
                                 const std::pair<std::string, std::string>& pr) {
  auto u1 = lang::loops_to_recursion(cfg.load(files[0]));
  require(u1, pr.first, files[0]);
  if (files.size() == 1) {
    require(u1, pr.second, files[0]);
    return prover::make_pair_context(u1, pr.first, pr.second);
  }
  auto u2 = lang::loops_to_recursion(cfg.load(files[1]));
  require(u2, pr.second, files[1]);
  return prover::make_pair_context(u1, pr.first, u2, pr.second);
}

int cmd_prove(const Config& cfg, const std::vector<std::string>& files, const std::vector<std::string>& pairs,
              const std::string& su_file) {
  if (files.empty() || files.size() > 2) throw CLI::ValidationError("files", "one or two source files");
  if (pairs.empty()) throw CLI::ValidationError("--pair", "at least one pair is required");
  auto opt = cfg.options();
  if (!su_file.empty()) opt.manual_su = sync::from_json(slurp(su_file));
  auto u1 = cfg.load(files[0]);
  auto u2 = files.size() == 2 ? cfg.load(files[1]) : u1;
  std::vector<std::pair<std::string, std::string>> mapping;
  for (auto& p : pairs) {
    auto pr = split_pair(p);
    require(u1, pr.first, files[0]);
    require(u2, pr.second, files.back());
    mapping.push_back(pr);
  }
  prover::EquivalenceReport rep;
  if (files.size() == 1 && mapping.size() == 1) {
    auto ctx = prover::make_pair_context(lang::loops_to_recursion(u1), mapping[0].first, mapping[0].second);
    rep.pairs.push_back({mapping[0].first, mapping[0].second, prover::prove_pair(ctx, opt)});
  } else {
    rep = prover::prove_programs(u1, u2, mapping, opt);
  }
  if (cfg.json) {
    std::cout << prover::to_json(rep) << "\n";
  } else {
    std::cout << prover::summary_table(rep);
    for (auto& p : rep.pairs) {
      for (auto& pp : p.outcome.path_pairs) {
        if (!pp.feasible) {
          std::cout << "  path pair " << pp.index << ": infeasible, pruned\n";
          continue;
        }
        std::cout << "  path pair " << pp.index << ": sync " << pp.sync << ", base " << pp.base << ", step "
                  << pp.step << "\n";
        if (pp.su && pp.su->side[0].expand + pp.su->side[1].expand > 0)
          std::cout << sync::to_text(*pp.su, p.name1, p.name2);
      }
    }
  }
  return prover::exit_code(rep);
}

int cmd_sync(const Config& cfg, const std::vector<std::string>& files, const std::string& pair) {
  if (files.empty() || files.size() > 2) throw CLI::ValidationError("files", "one or two source files");
  auto pr = split_pair(pair);
  auto ctx = pair_context(cfg, files, pr);
  auto opt = cfg.options();
  sync::Options so;
  so.max_uw = opt.max_uw;
  so.strict_size_guard = opt.strict_size_guard;
  so.seconds = opt.sync_seconds;
  so.check.width = opt.width;
  so.check.solver = opt.solver;
  pathex::Options po;
  po.width = opt.width;
  auto rho1 = pathex::natural_base_case_precondition(ctx.unit, ctx.f1, po);
  auto rho2 = pathex::natural_base_case_precondition(ctx.unit, ctx.f2, po);
  auto r = sync::find_sync_unrolling(ctx.unit, ctx.f1, ctx.f2, rho1, rho2, so);
  json j;
  j["schema"] = 1;
  j["names"] = {pr.first, pr.second};
  j["found"] = r.found;
  if (r.found) {
    j["uw"] = r.uw;
    j["input"] = r.witness.input;
    j["su"] = json::parse(sync::to_json(r.su));
  } else {
    j["reason"] = sync::to_string(r.reason);
    j["proved_up_to"] = r.proved_up_to;
    if (!r.note.empty()) j["note"] = r.note;
  }
  if (!cfg.json) {
    if (r.found)
      std::cout << "sync unrolling at uw=" << r.uw << ", witness input " << join(r.witness.input) << "\n"
                << sync::to_text(r.su, pr.first, pr.second);
    else
      std::cout << "no sync unrolling: " << sync::to_string(r.reason) << " (up to uw=" << r.proved_up_to << ")\n";
  }
  std::cout << j.dump(2) << "\n";
  return r.found ? 0 : 1;
}

int cmd_paths(const Config& cfg, const std::string& file, const std::string& fn, const std::string& dump) {
  auto u = lang::loops_to_recursion(cfg.load(file));
  require(u, fn, file);
  pathex::Options po;
  po.width = cfg.width;
  po.path_bound = cfg.path_bound;
  auto paths = pathex::get_all_paths(u, fn, po);
  json j;
  j["schema"] = 1;
  j["function"] = fn;
  j["paths"] = json::array();
  for (auto& p : paths) j["paths"].push_back({{"pred", lang::print(p.pred)}, {"recursive", p.recursive}});
  if (!dump.empty()) write_or_print(dump, j.dump(2) + "\n");
  if (cfg.json) {
    std::cout << j.dump(2) << "\n";
  } else {
    for (auto& p : paths) std::cout << (p.recursive ? "recursive  " : "base       ") << lang::print(p.pred) << "\n";
    std::cout << "rho: "
              << lang::print(pathex::interval_form(pathex::natural_base_case_precondition(u, fn, po),
                                                   u.find(fn)->params, cfg.width))
              << "\n";
  }
  return 0;
}

int cmd_basecase(const Config& cfg, const std::string& file, const std::string& fn, const std::string& su_file,
                 int side) {
  auto u = lang::loops_to_recursion(cfg.load(file));
  require(u, fn, file);
  auto opt = cfg.options();
  transforms::UnrollTree tree = transforms::UnrollTree::leaf();
  if (!su_file.empty()) tree = sync::from_json(slurp(su_file)).side[side - 1];
  pathex::Options po;
  po.width = opt.width;
  po.depth_bound = opt.depth_bound;
  auto rho = pathex::natural_base_case_precondition(u, fn, po);
  auto bcpc = prover::base_case_of(u, fn, tree, opt);
  json j;
  j["schema"] = 1;
  j["function"] = fn;
  const auto& params = u.find(fn)->params;
  j["rho"] = lang::print(pathex::interval_form(rho, params, opt.width));
  j["bcpc"] = lang::print(pathex::interval_form(bcpc, params, opt.width));
  std::cout << j.dump(2) << "\n";
  return 0;
}

std::pair<std::int64_t, std::int64_t> parse_range(const std::string& s) {
  auto c = s.find(':', 1);
  if (c == std::string::npos) throw CLI::ValidationError("--range", "expected lo:hi");
  return {std::stoll(s.substr(0, c)), std::stoll(s.substr(c + 1))};
}

int cmd_oracle_check(const Config& cfg, const std::string& file, const std::string& f1, const std::string& f2,
                     const std::vector<std::string>& ranges, std::size_t fuel) {
  auto u = lang::loops_to_recursion(cfg.load(file));
  require(u, f1, file);
  require(u, f2, file);
  oracle::DomainSpec d;
  d.fuel = fuel;
  d.width = cfg.width;
  for (auto& r : ranges) d.ranges.push_back(parse_range(r));
  auto r = oracle::brute_force_equiv(u, f1, u, f2, d);
  json j;
  j["schema"] = 1;
  j["names"] = {f1, f2};
  j["verdict"] = r.equivalent ? "Equivalent" : "NotEquivalent";
  j["checked"] = r.checked;
  j["fuel_limited"] = r.fuel_limited.size();
  if (!r.equivalent) {
    j["witness"] = r.input;
    j["values"] = {r.v1, r.v2};
  }
  std::cout << j.dump(2) << "\n";
  return r.equivalent ? 0 : 2;
}

int cmd_oracle_eval(const Config& cfg, const std::string& file, const std::string& fn,
                    const std::vector<std::int64_t>& args, std::size_t fuel, bool trace) {
  auto u = lang::loops_to_recursion(cfg.load(file));
  require(u, fn, file);
  if (args.size() != u.find(fn)->params.size())
    throw CLI::ValidationError("args", fn + " takes " + std::to_string(u.find(fn)->params.size()) + " arguments");
  oracle::InterpOptions io;
  io.width = cfg.width;
  io.fuel = fuel;
  io.trace = trace;
  auto r = oracle::eval(u, fn, args, io);
  if (cfg.json) {
    json j;
    j["schema"] = 1;
    j["status"] = oracle::to_string(r.status);
    j["values"] = r.values;
    j["fuel_used"] = r.fuel_used;
    if (trace) {
      j["trace"] = json::array();
      for (auto& t : r.trace) j["trace"].push_back({{"depth", t.depth}, {"callee", t.callee}, {"args", t.args}});
    }
    std::cout << j.dump(2) << "\n";
  } else {
    if (trace)
      for (auto& t : r.trace)
        std::cout << std::string(static_cast<std::size_t>(t.depth) * 2, ' ') << t.callee << "(" << join(t.args) << ")\n";
    if (r.terminated())
      std::cout << join(r.values) << "\n";
    else
      std::cout << oracle::to_string(r.status) << "\n";
  }
  return r.terminated() ? 0 : 1;
}

int cmd_emit_smt(const Config& cfg, const std::vector<std::string>& files, const std::string& pair,
                 const std::string& out) {
  auto pr = split_pair(pair);
  auto ctx = pair_context(cfg, files, pr);
  auto task = prover::part_eq_task(ctx);
  auto enc = vc::encode_flat({task, transforms::kBcMain}, cfg.width);
  write_or_print(out, vc::emit_smtlib(enc));
  return 0;
}

int cmd_print(const Config& cfg, const std::string& file, bool lower) {
  auto u = cfg.load(file);
  if (lower) u = lang::loops_to_recursion(u);
  std::cout << lang::print(u);
  return 0;
}

int cmd_corpus(const Config& cfg, const std::string& dir) {
  const json manifest = json::parse(slurp(dir + "/manifest.json"));
  auto opt = cfg.options();
  json rows = json::array();
  int matched = 0, total = 0;
  for (auto& c : manifest.at("cases")) {
    const std::string file = dir + "/" + c.at("file").get<std::string>();
    const std::string f1 = c.at("f1"), f2 = c.at("f2");
    auto ctx = prover::make_pair_context(lang::loops_to_recursion(cfg.load(file)), f1, f2);
    auto out = prover::prove_pair(ctx, opt);
    const std::string expected = c.at("expected");
    const std::string want_reason = c.value("reason", "");
    const bool ok = expected == prover::to_string(out.verdict) &&
                    (want_reason.empty() || want_reason == prover::to_string(out.reason));
    ++total;
    matched += ok;
    rows.push_back({{"file", c.at("file")},
                    {"names", {f1, f2}},
                    {"tag", c.value("tag", "")},
                    {"expected", want_reason.empty() ? expected : expected + "(" + want_reason + ")"},
                    {"verdict", prover::to_string(out.verdict)},
                    {"reason", prover::to_string(out.reason)},
                    {"strategy", out.strategy},
                    {"seconds", out.seconds},
                    {"ok", ok}});
  }
  if (cfg.json) {
    std::cout << json{{"schema", 1}, {"matched", matched}, {"total", total}, {"cases", rows}}.dump(2) << "\n";
  } else {
    std::printf("%-18s %-34s %-34s %8s\n", "pair", "expected", "got", "seconds");
    for (auto& r : rows) {
      std::string got = r["verdict"].get<std::string>();
      if (!r["reason"].get<std::string>().empty()) got += "(" + r["reason"].get<std::string>() + ")";
      const std::string name = r["names"][0].get<std::string>() + "/" + r["names"][1].get<std::string>();
      std::printf("%-18s %-34s %-34s %8.2f%s\n", name.c_str(), r["expected"].get<std::string>().c_str(), got.c_str(),
                  r["seconds"].get<double>(), r["ok"].get<bool>() ? "" : "  MISMATCH");
    }
    std::printf("%d/%d expected verdicts\n", matched, total);
  }
  return matched == total ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"recveq: partial equivalence of recursive functions"};
  app.require_subcommand(1);
  Config cfg;

  std::vector<std::string> files, pairs, ranges;
  std::string pair, fn, su_file, out, dump_paths, corpus_dir = RECVEQ_CORPUS_DIR, file, f1, f2;
  std::vector<std::int64_t> args;
  std::size_t fuel = 256;
  bool trace = false, lower = false;
  int side = 1;

  auto* prove = app.add_subcommand("prove", "prove mapped function pairs partially equivalent");
  prove->add_option("files", files, "one or two source files")->required()->check(CLI::ExistingFile);
  prove->add_option("--pair", pairs, "f1:f2 (repeatable)")->required();
  prove->add_option("--su-file", su_file, "use this sync unrolling (JSON) instead of searching")
      ->check(CLI::ExistingFile);
  cfg.add_to(prove);

  auto* syncc = app.add_subcommand("sync", "search a synchronizing unrolling");
  syncc->add_option("files", files, "one or two source files")->required()->check(CLI::ExistingFile);
  syncc->add_option("--pair", pair, "f1:f2")->required();
  cfg.add_to(syncc);

  auto* paths = app.add_subcommand("paths", "list the path predicates of a function");
  paths->add_option("file", file)->required()->check(CLI::ExistingFile);
  paths->add_option("--fn", fn)->required();
  paths->add_option("--dump-paths", dump_paths, "also write the JSON to this file");
  cfg.add_to(paths);

  auto* basecase = app.add_subcommand("basecase", "base-case precondition of an unrolled function");
  basecase->add_option("file", file)->required()->check(CLI::ExistingFile);
  basecase->add_option("--fn", fn)->required();
  basecase->add_option("--su", su_file, "sync unrolling JSON")->check(CLI::ExistingFile);
  basecase->add_option("--side", side, "which side of the unrolling applies to --fn")->check(CLI::Range(1, 2));
  cfg.add_to(basecase);

  auto* orc = app.add_subcommand("oracle", "reference interpreter");
  orc->require_subcommand(1);
  auto* check = orc->add_subcommand("check", "brute-force partial equivalence");
  check->add_option("file", file)->required()->check(CLI::ExistingFile);
  check->add_option("f1", f1)->required();
  check->add_option("f2", f2)->required();
  check->add_option("--range", ranges, "lo:hi per parameter");
  check->add_option("--fuel", fuel, "frames per run")->check(CLI::PositiveNumber);
  cfg.add_to(check);
  auto* ev = orc->add_subcommand("eval", "run one function");
  ev->add_option("file", file)->required()->check(CLI::ExistingFile);
  ev->add_option("fn", fn)->required();
  ev->add_option("args", args)->allow_extra_args();
  ev->add_option("--fuel", fuel, "frames per run")->check(CLI::PositiveNumber);
  ev->add_flag("--trace", trace, "print the call log");
  cfg.add_to(ev);

  auto* smt = app.add_subcommand("emit-smt", "SMT-LIB of the PART-EQ task of a pair");
  smt->add_option("files", files, "one or two source files")->required()->check(CLI::ExistingFile);
  smt->add_option("--pair", pair, "f1:f2")->required();
  smt->add_option("-o,--out", out, "output file (default stdout)");
  Config smt_cfg;
  smt_cfg.width = 32;
  smt_cfg.add_to(smt);

  auto* pr = app.add_subcommand("print", "pretty-print a source file");
  pr->add_option("file", file)->required()->check(CLI::ExistingFile);
  pr->add_flag("--lower-loops", lower, "replace loops by recursion first");
  cfg.add_to(pr);

  auto* corpus = app.add_subcommand("corpus", "run the bundled corpus against its expected verdicts");
  corpus->add_option("--dir", corpus_dir, "corpus directory")->check(CLI::ExistingDirectory);
  cfg.add_to(corpus);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kUsage;
  }

  try {
    if (prove->parsed()) return cmd_prove(cfg, files, pairs, su_file);
    if (syncc->parsed()) return cmd_sync(cfg, files, pair);
    if (paths->parsed()) return cmd_paths(cfg, file, fn, dump_paths);
    if (basecase->parsed()) return cmd_basecase(cfg, file, fn, su_file, side);
    if (check->parsed()) return cmd_oracle_check(cfg, file, f1, f2, ranges, fuel);
    if (ev->parsed()) return cmd_oracle_eval(cfg, file, fn, args, fuel, trace);
    if (smt->parsed()) return cmd_emit_smt(smt_cfg, files, pair, out);
    if (pr->parsed()) return cmd_print(cfg, file, lower);
    if (corpus->parsed()) return cmd_corpus(cfg, corpus_dir);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
