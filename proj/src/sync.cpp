#include "recveq/sync.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <functional>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "recveq/lang/typecheck.hpp"
#include "recveq/oracle.hpp"

namespace recveq::sync {

namespace mk = lang::mk;
using lang::BinaryOp;
using lang::Call;
using lang::Expr;
using lang::StmtPtr;

namespace {

StmtPtr leaf_return(const FunctionDef& f) {
  return mk::ret_multi(std::vector<ExprPtr>(static_cast<std::size_t>(f.return_slots), mk::lit(-1)));
}

FunctionDef instrument(const FunctionDef& original, int store, const ExprPtr& rho,
                       const std::vector<std::size_t>& projection) {
  FunctionDef f = lang::number_self_calls(original);
  const std::string name = f.name;
  auto body = lang::rewrite_calls(f.body, [&](const Call& c, const ExprPtr& rebuilt) -> ExprPtr {
    if (c.callee != name) return nullptr;
    auto args = std::get<Call>(rebuilt->node).args;
    args.push_back(mk::binary(BinaryOp::Add, mk::var(kDepth), mk::lit(1)));
    args.push_back(mk::lit(c.site));
    return std::make_shared<Expr>(Expr{Call{name, std::move(args), c.site}, rebuilt->pos});
  });
  std::vector<ExprPtr> rec{mk::var(kDepth), mk::var(kSite)};
  if (projection.empty())
    for (auto& p : f.params) rec.push_back(mk::var(p));
  for (auto k : projection) rec.push_back(mk::var(f.params.at(k)));
  std::vector<lang::StmtPtr> stmts;
  stmts.push_back(mk::if_(mk::land(mk::binary(BinaryOp::Gt, mk::var(kDepth), mk::lit(0)), mk::nondet()),
                          mk::block({mk::record(store, std::move(rec)), leaf_return(f)})));
  if (!lang::is_false_literal(rho)) stmts.push_back(mk::assume(mk::lnot(lang::clone(rho))));
  for (auto& s : std::get<lang::Block>(body->node).stmts) stmts.push_back(s);
  f.body = mk::block(std::move(stmts));
  f.params.push_back(kDepth);
  f.params.push_back(kSite);
  return f;
}

std::vector<std::int64_t> project(const std::vector<std::int64_t>& t, const std::vector<std::size_t>& projection) {
  if (projection.empty()) return t;
  std::vector<std::int64_t> out;
  for (auto k : projection) out.push_back(t.at(k));
  return out;
}

bool is_side_frame(const std::string& callee, const std::string& fn) {
  if (callee == fn) return true;
  const std::string pre = "__rv_uw";
  if (callee.rfind(pre, 0) != 0) return false;
  auto us = callee.find('_', pre.size());
  return us != std::string::npos && callee.substr(us + 1) == fn &&
         std::all_of(callee.begin() + static_cast<long>(pre.size()), callee.begin() + static_cast<long>(us),
                     [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); });
}

SyncWitness extract(const SyncProgram& sp, const lang::SourceUnit& unwound, const vc::CheckResult& cr, unsigned width) {
  oracle::InterpOptions io;
  io.width = width;
  io.fuel = std::size_t{1} << 20;
  io.choices = &cr.choices;
  io.trace = true;
  auto r = oracle::eval(unwound, sp.entry, cr.inputs, io);
  if (r.status != oracle::Status::AssertFailed)
    throw InconsistentWitness("witness replay ended with status " + std::string(oracle::to_string(r.status)));
  SyncWitness w;
  w.input = cr.inputs;
  const std::string names[2] = {sp.f1, sp.f2};
  for (int s = 0; s < 2; ++s) {
    const auto& recs = r.records[s + 1];
    std::size_t next = 0;
    std::vector<WitnessFrame> frames;
    for (auto& t : r.trace) {
      if (!is_side_frame(t.callee, names[s]) || t.args.size() < 2) continue;
      WitnessFrame fr;
      fr.depth = static_cast<int>(t.args[t.args.size() - 2]);
      fr.site = static_cast<int>(t.args.back());
      fr.args.assign(t.args.begin(), t.args.end() - 2);
      frames.push_back(fr);
    }
    for (std::size_t i = 0; i < frames.size(); ++i) {
      auto& fr = frames[i];
      bool has_child = i + 1 < frames.size() && frames[i + 1].depth > fr.depth;
      if (has_child || next >= recs.size()) continue;
      const auto& rec = recs[next];
      std::vector<std::int64_t> tail(rec.begin() + 2, rec.end());
      if (rec[0] == fr.depth && rec[1] == fr.site && tail == project(fr.args, sp.projection)) {
        fr.leaf = true;
        ++next;
      }
    }
    if (next != recs.size()) throw InconsistentWitness("records do not match the traced frames");
    w.frames[s] = std::move(frames);
  }
  return w;
}

std::set<std::vector<std::int64_t>> as_set(const std::vector<std::vector<std::int64_t>>& v,
                                           const std::vector<std::size_t>& projection) {
  std::set<std::vector<std::int64_t>> out;
  for (auto& t : v) out.insert(project(t, projection));
  return out;
}

bool sync_at(const SourceUnit& ctx, const std::string& f1, const std::string& f2, const SyncUnrolling& su,
             const std::vector<std::int64_t>& input, unsigned width, const std::vector<std::size_t>& projection) {
  auto a = leaf_tuples(ctx, f1, su.side[0], input, width);
  auto b = leaf_tuples(ctx, f2, su.side[1], input, width);
  return a && b && as_set(*a, projection) == as_set(*b, projection);
}

}  // namespace

SyncProgram build_sync_program(const SourceUnit& ctx, const std::string& f1, const std::string& f2,
                               const ExprPtr& rho1, const ExprPtr& rho2, bool strict_size_guard,
                               const std::vector<std::size_t>& projection) {
  const FunctionDef* d1 = ctx.find(f1);
  const FunctionDef* d2 = ctx.find(f2);
  if (!d1 || !d2) throw Error("unknown function " + std::string(d1 ? f2 : f1));
  if (f1 == f2) throw TransformError("NameClash", "the two sides must have distinct names");
  if (d1->params.size() != d2->params.size())
    throw TransformError("ArityMismatch", f1 + " and " + f2 + " take different numbers of parameters");
  SyncProgram sp;
  sp.unit = ctx;
  sp.f1 = f1;
  sp.f2 = f2;
  sp.sites[0] = lang::recursive_call_sites(*d1).size();
  sp.sites[1] = lang::recursive_call_sites(*d2).size();
  for (auto k : projection)
    if (k >= d1->params.size()) throw Error("projection position out of range");
  sp.projection = projection;
  sp.unit.put(instrument(*d1, 1, rho1, projection));
  sp.unit.put(instrument(*d2, 2, rho2, projection));

  std::vector<std::string> params;
  for (std::size_t i = 0; i < d1->params.size(); ++i) params.push_back("i" + std::to_string(i));
  auto call_side = [&](const std::string& fn) {
    std::vector<ExprPtr> args;
    for (auto& p : params) args.push_back(mk::var(p));
    args.push_back(mk::lit(0));
    args.push_back(mk::lit(-1));
    return mk::expr_stmt(mk::call(fn, std::move(args)));
  };
  const int m = strict_size_guard ? 2 : 1;
  std::vector<lang::StmtPtr> body{
      call_side(f1), call_side(f2),
      mk::assume(mk::land(mk::intrinsic(lang::IntrinsicKind::SizeAtLeast, 1, m),
                          mk::intrinsic(lang::IntrinsicKind::SizeAtLeast, 2, m))),
      mk::assert_(mk::lnot(mk::intrinsic(lang::IntrinsicKind::LeavesEqual, 1, 2))), mk::ret(mk::lit(0))};
  sp.unit.put(FunctionDef{sp.entry, params, mk::block(std::move(body)), 1, {}});
  return sp;
}

std::vector<WitnessFrame> SyncWitness::records(int side) const {
  std::vector<WitnessFrame> out;
  for (auto& f : frames[side])
    if (f.leaf) out.push_back(f);
  return out;
}

UnrollTree tree_from_frames(const std::vector<WitnessFrame>& frames, std::size_t sites) {
  if (frames.empty()) return UnrollTree::leaf();
  if (frames[0].depth != 0 || frames[0].leaf) throw InconsistentWitness("the first frame must be an expanded root");
  UnrollTree root = UnrollTree::node(std::vector<UnrollTree>(sites));
  std::vector<UnrollTree*> stack{&root};
  std::vector<std::vector<bool>> used{std::vector<bool>(sites, false)};
  for (std::size_t i = 1; i < frames.size(); ++i) {
    const auto& fr = frames[i];
    if (fr.depth < 1 || static_cast<std::size_t>(fr.depth) > stack.size())
      throw InconsistentWitness("frame at depth " + std::to_string(fr.depth) + " has no expanded parent");
    stack.resize(static_cast<std::size_t>(fr.depth));
    used.resize(stack.size());
    if (fr.site < 0 || static_cast<std::size_t>(fr.site) >= sites)
      throw InconsistentWitness("call site " + std::to_string(fr.site) + " out of range");
    auto s = static_cast<std::size_t>(fr.site);
    if (used.back()[s])
      throw InconsistentWitness("call site " + std::to_string(fr.site) + " at depth " + std::to_string(fr.depth) +
                                " entered twice");
    used.back()[s] = true;
    UnrollTree& child = stack.back()->children[s];
    if (!fr.leaf) {
      child = UnrollTree::node(std::vector<UnrollTree>(sites));
      stack.push_back(&child);
      used.emplace_back(sites, false);
    }
  }
  return root;
}

SyncUnrolling generate_sync_unrolling(const SyncWitness& w, std::size_t sites1, std::size_t sites2) {
  SyncUnrolling su;
  su.side[0] = tree_from_frames(w.frames[0], sites1);
  su.side[1] = tree_from_frames(w.frames[1], sites2);
  return su;
}

const char* to_string(NotFoundReason r) {
  switch (r) {
    case NotFoundReason::None: return "none";
    case NotFoundReason::BudgetExhausted: return "BudgetExhausted";
    case NotFoundReason::ProvedImpossibleUpTo: return "ProvedImpossibleUpTo";
  }
  return "?";
}

std::optional<std::vector<std::vector<std::int64_t>>> leaf_tuples(const SourceUnit& ctx, const std::string& fn,
                                                                  const UnrollTree& tree,
                                                                  const std::vector<std::int64_t>& input,
                                                                  unsigned width) {
  const FunctionDef* f = ctx.find(fn);
  if (!f) throw Error("unknown function " + fn);
  const std::string stub = "__rv_leaf";
  SourceUnit u = ctx;
  for (auto& c : transforms::apply_unrolling(*f, tree)) {
    auto redirected = transforms::substitute_calls(c, {fn}, transforms::SubstitutionMode::uf(stub));
    u.put(std::move(redirected));
  }
  std::vector<ExprPtr> rec{mk::lit(0), mk::lit(0)};
  std::vector<std::string> params;
  for (std::size_t i = 0; i < f->params.size(); ++i) {
    params.push_back("a" + std::to_string(i));
    rec.push_back(mk::var(params.back()));
  }
  FunctionDef leaf{stub, params, mk::block({mk::record(1, std::move(rec)), leaf_return(*f)}), f->return_slots, {}};
  u.put(std::move(leaf));
  oracle::InterpOptions io;
  io.width = width;
  io.fuel = std::size_t{1} << 16;
  auto r = oracle::eval(u, fn, input, io);
  if (!r.terminated()) return std::nullopt;
  std::vector<std::vector<std::int64_t>> out;
  for (auto& rc : r.records[1]) out.emplace_back(rc.begin() + 2, rc.end());
  return out;
}

SyncUnrolling prune(const SourceUnit& ctx, const std::string& f1, const std::string& f2, SyncUnrolling su,
                    const std::vector<std::int64_t>& input, unsigned width,
                    const std::vector<std::size_t>& projection) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (int s = 0; s < 2 && !changed; ++s) {
      std::vector<UnrollTree*> cand;
      std::function<void(UnrollTree&, bool)> walk = [&](UnrollTree& t, bool root) {
        if (!t.expand) return;
        bool all_leaves = true;
        for (auto& c : t.children) {
          walk(c, false);
          all_leaves = all_leaves && !c.expand;
        }
        if (all_leaves && !root) cand.push_back(&t);
      };
      walk(su.side[s], true);
      for (UnrollTree* t : cand) {
        UnrollTree saved = *t;
        *t = UnrollTree::leaf();
        if (sync_at(ctx, f1, f2, su, input, width, projection)) {
          changed = true;
          break;
        }
        *t = std::move(saved);
      }
    }
  }
  return su;
}

namespace {

// Frames below the root that may record at unwinding uw.
double record_bound(std::size_t sites, int uw) {
  double total = 0, level = 1;
  for (int d = 1; d < uw; ++d) total += level *= static_cast<double>(sites);
  return std::max(total, 1.0);
}

}  // namespace

SyncResult find_sync_unrolling(const SourceUnit& ctx, const std::string& f1, const std::string& f2,
                               const ExprPtr& rho1, const ExprPtr& rho2, const Options& opt) {
  SyncResult res;
  if (opt.max_uw < 1) {
    res.reason = NotFoundReason::BudgetExhausted;
    res.note = "no unwinding allowed";
    return res;
  }
  const auto start = std::chrono::steady_clock::now();
  SyncProgram sp = build_sync_program(ctx, f1, f2, rho1, rho2, opt.strict_size_guard, opt.projection);
  for (int uw = 1; uw <= opt.max_uw; ++uw) {
    double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (opt.seconds >= 0 && elapsed > opt.seconds) {
      res.reason = NotFoundReason::BudgetExhausted;
      res.note = "time budget exhausted before uw=" + std::to_string(uw);
      return res;
    }
    if (record_bound(sp.sites[0], uw) * record_bound(sp.sites[1], uw) > opt.max_record_pairs) {
      res.reason = NotFoundReason::BudgetExhausted;
      res.note = "leaf-record budget exhausted before uw=" + std::to_string(uw);
      return res;
    }
    lang::SourceUnit unwound = vc::unwind(sp.unit, uw);
    auto cr = vc::check_valid({unwound, sp.entry}, opt.check);
    if (cr.verdict == vc::Validity::Valid) {
      res.proved_up_to = uw;
      continue;
    }
    if (cr.verdict == vc::Validity::Inconclusive) {
      res.reason = NotFoundReason::BudgetExhausted;
      res.note = "solver gave up at uw=" + std::to_string(uw) + (cr.note.empty() ? "" : ": " + cr.note);
      return res;
    }
    res.witness = extract(sp, unwound, cr, opt.check.width);
    res.su = generate_sync_unrolling(res.witness, sp.sites[0], sp.sites[1]);
    if (!sync_at(ctx, f1, f2, res.su, res.witness.input, opt.check.width, opt.projection))
      throw InconsistentWitness("extracted unrolling does not synchronize at the witness input");
    if (opt.prune) res.su = prune(ctx, f1, f2, res.su, res.witness.input, opt.check.width, opt.projection);
    res.found = true;
    res.uw = uw;
    return res;
  }
  res.reason = NotFoundReason::ProvedImpossibleUpTo;
  return res;
}

namespace {

void decisions(const UnrollTree& t, int depth, int site, std::vector<int>& path, nlohmann::json& out) {
  nlohmann::json d;
  d["depth"] = depth;
  d["site"] = site;
  d["path"] = path;
  d["action"] = t.expand ? "expand" : "leaf";
  out.push_back(d);
  for (std::size_t k = 0; k < t.children.size(); ++k) {
    path.push_back(static_cast<int>(k));
    decisions(t.children[k], depth + 1, static_cast<int>(k), path, out);
    path.pop_back();
  }
}

void text(const UnrollTree& t, const std::string& name, int depth, int site, std::ostringstream& os) {
  os << std::string(static_cast<std::size_t>(depth) * 2, ' ') << name;
  if (site >= 0) os << " @site " << site;
  os << (t.expand ? "  expand" : "  leaf") << "\n";
  for (std::size_t k = 0; k < t.children.size(); ++k) text(t.children[k], name, depth + 1, static_cast<int>(k), os);
}

}  // namespace

std::string to_json(const SyncUnrolling& su) {
  nlohmann::json j = nlohmann::json::array();
  for (int s = 0; s < 2; ++s) {
    nlohmann::json side;
    side["side"] = s + 1;
    side["decisions"] = nlohmann::json::array();
    std::vector<int> path;
    decisions(su.side[s], 0, -1, path, side["decisions"]);
    j.push_back(side);
  }
  return j.dump(2);
}

SyncUnrolling from_json(const std::string& text_in) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text_in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("su file: ") + e.what());
  }
  if (j.is_object() && j.contains("su")) j = j["su"];
  if (!j.is_array()) throw Error("su file: expected an array of sides");
  SyncUnrolling su;
  for (auto& side : j) {
    int s = side.value("side", 0);
    if (s != 1 && s != 2) throw Error("su file: side must be 1 or 2");
    std::vector<WitnessFrame> frames;
    std::size_t sites = 0;
    for (auto& d : side.at("decisions")) {
      WitnessFrame fr;
      fr.depth = d.at("depth").get<int>();
      fr.site = d.value("site", -1);
      auto action = d.at("action").get<std::string>();
      if (action != "expand" && action != "leaf") throw Error("su file: action must be expand or leaf");
      fr.leaf = action == "leaf";
      sites = std::max(sites, static_cast<std::size_t>(fr.site + 1));
      frames.push_back(fr);
    }
    if (frames.size() == 1 && frames[0].leaf) {
      su.side[s - 1] = UnrollTree::leaf();
      continue;
    }
    try {
      su.side[s - 1] = tree_from_frames(frames, sites);
    } catch (const InconsistentWitness& e) {
      throw Error(std::string("su file: ") + e.what());
    }
  }
  return su;
}

std::string to_text(const SyncUnrolling& su, const std::string& f1, const std::string& f2) {
  std::ostringstream os;
  text(su.side[0], f1, 0, -1, os);
  text(su.side[1], f2, 0, -1, os);
  return os.str();
}

}  // namespace recveq::sync
