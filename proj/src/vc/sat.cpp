#include "recveq/vc/sat.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>

namespace recveq::vc::sat {

namespace {

double luby(double y, int x) {
  int size = 1, seq = 0;
  while (size < x + 1) {
    ++seq;
    size = 2 * size + 1;
  }
  while (size - 1 != x) {
    size = (size - 1) >> 1;
    --seq;
    x = x % size;
  }
  return std::pow(y, seq);
}

}  // namespace

Solver::Solver() = default;

std::uint32_t Solver::new_var() {
  std::uint32_t v = num_vars();
  assigns_.push_back(-1);
  polarity_.push_back(0);
  model_.push_back(0);
  reason_.push_back(kNoReason);
  level_.push_back(0);
  activity_.push_back(0);
  seen_.push_back(0);
  heap_pos_.push_back(-1);
  watches_.emplace_back();
  watches_.emplace_back();
  heap_insert(v);
  return v;
}

std::uint32_t Solver::store(std::vector<Lit> lits, bool learnt) {
  std::uint32_t cref = static_cast<std::uint32_t>(clauses_.size());
  clauses_.push_back(Clause{std::move(lits), learnt, false, 0});
  (learnt ? learnts_ : original_).push_back(cref);
  return cref;
}

void Solver::attach(std::uint32_t cref) {
  const Clause& c = clauses_[cref];
  watches_[negate(c.lits[0])].push_back({cref, c.lits[1]});
  watches_[negate(c.lits[1])].push_back({cref, c.lits[0]});
}

bool Solver::add_clause(std::vector<Lit> lits) {
  if (!ok_) return false;
  cancel_until(0);
  std::sort(lits.begin(), lits.end());
  std::vector<Lit> out;
  Lit prev = 0xffffffffu;
  for (Lit l : lits) {
    if (value(l) == 1 || (prev != 0xffffffffu && l == negate(prev))) return true;
    if (value(l) == 0 || l == prev) continue;
    out.push_back(l);
    prev = l;
  }
  if (out.empty()) return ok_ = false;
  if (out.size() == 1) {
    enqueue(out[0], kNoReason);
    if (propagate() != kNoReason) ok_ = false;
    return ok_;
  }
  std::uint32_t cref = store(std::move(out), false);
  attach(cref);
  return true;
}

void Solver::enqueue(Lit l, std::uint32_t reason) {
  std::uint32_t v = var_of(l);
  assigns_[v] = static_cast<std::int8_t>(!sign_of(l));
  reason_[v] = reason;
  level_[v] = level();
  trail_.push_back(l);
}

std::uint32_t Solver::propagate() {
  std::uint32_t confl = kNoReason;
  while (qhead_ < trail_.size()) {
    Lit p = trail_[qhead_++];  // p became true; visit clauses watching ~p
    ++stats_.propagations;
    auto& ws = watches_[p];
    std::size_t i = 0, j = 0;
    const Lit false_lit = negate(p);
    while (i < ws.size()) {
      Watcher w = ws[i];
      if (value(w.blocker) == 1) {
        ws[j++] = ws[i++];
        continue;
      }
      Clause& c = clauses_[w.cref];
      if (c.deleted) {
        ++i;
        continue;
      }
      if (c.lits[0] == false_lit) std::swap(c.lits[0], c.lits[1]);
      ++i;
      Lit first = c.lits[0];
      Watcher nw{w.cref, first};
      if (first != w.blocker && value(first) == 1) {
        ws[j++] = nw;
        continue;
      }
      bool moved = false;
      for (std::size_t k = 2; k < c.lits.size(); ++k) {
        if (value(c.lits[k]) != 0) {
          std::swap(c.lits[1], c.lits[k]);
          watches_[negate(c.lits[1])].push_back(nw);
          moved = true;
          break;
        }
      }
      if (moved) continue;
      ws[j++] = nw;
      if (value(first) == 0) {
        confl = w.cref;
        qhead_ = trail_.size();
        while (i < ws.size()) ws[j++] = ws[i++];
      } else {
        enqueue(first, w.cref);
      }
    }
    ws.resize(j);
  }
  return confl;
}

void Solver::bump_var(std::uint32_t v) {
  if ((activity_[v] += var_inc_) > 1e100) {
    for (auto& a : activity_) a *= 1e-100;
    var_inc_ *= 1e-100;
  }
  if (heap_contains(v)) heap_up(static_cast<std::size_t>(heap_pos_[v]));
}

void Solver::bump_clause(Clause& c) {
  if ((c.activity += clause_inc_) > 1e20) {
    for (auto cr : learnts_) clauses_[cr].activity *= 1e-20;
    clause_inc_ *= 1e-20;
  }
}

void Solver::analyze(std::uint32_t confl, std::vector<Lit>& learnt, int& bt_level) {
  int path = 0;
  Lit p = 0xffffffffu;
  learnt.assign(1, 0);
  std::size_t index = trail_.size();
  do {
    Clause& c = clauses_[confl];
    if (c.learnt) bump_clause(c);
    for (std::size_t k = (p == 0xffffffffu ? 0 : 1); k < c.lits.size(); ++k) {
      Lit q = c.lits[k];
      std::uint32_t v = var_of(q);
      if (!seen_[v] && level_[v] > 0) {
        bump_var(v);
        seen_[v] = 1;
        if (level_[v] >= level())
          ++path;
        else
          learnt.push_back(q);
      }
    }
    while (!seen_[var_of(trail_[--index])]) {
    }
    p = trail_[index];
    confl = reason_[var_of(p)];
    seen_[var_of(p)] = 0;
    --path;
  } while (path > 0);
  learnt[0] = negate(p);

  // recursive minimization
  std::uint32_t abstract = 0;
  for (std::size_t k = 1; k < learnt.size(); ++k) abstract |= 1u << (level_[var_of(learnt[k])] & 31);
  std::vector<Lit> to_clear(learnt.begin(), learnt.end());
  std::size_t j = 1;
  for (std::size_t k = 1; k < learnt.size(); ++k) {
    std::uint32_t v = var_of(learnt[k]);
    if (reason_[v] == kNoReason || !redundant(learnt[k], abstract)) learnt[j++] = learnt[k];
  }
  learnt.resize(j);

  bt_level = 0;
  if (learnt.size() > 1) {
    std::size_t max_i = 1;
    for (std::size_t k = 2; k < learnt.size(); ++k)
      if (level_[var_of(learnt[k])] > level_[var_of(learnt[max_i])]) max_i = k;
    std::swap(learnt[1], learnt[max_i]);
    bt_level = level_[var_of(learnt[1])];
  }
  for (Lit l : to_clear) seen_[var_of(l)] = 0;
  for (auto v : minimized_) seen_[v] = 0;
  minimized_.clear();
}

bool Solver::redundant(Lit l, std::uint32_t abstract) {
  std::vector<Lit> stack{l};
  std::vector<std::uint32_t> marked;
  while (!stack.empty()) {
    Lit q = stack.back();
    stack.pop_back();
    const Clause& c = clauses_[reason_[var_of(q)]];
    for (std::size_t k = 0; k < c.lits.size(); ++k) {
      Lit r = c.lits[k];
      std::uint32_t v = var_of(r);
      if (v == var_of(q) || seen_[v] || level_[v] == 0) continue;
      if (reason_[v] != kNoReason && ((1u << (level_[v] & 31)) & abstract)) {
        seen_[v] = 1;
        marked.push_back(v);
        stack.push_back(r);
      } else {
        for (auto m : marked) seen_[m] = 0;
        return false;
      }
    }
  }
  minimized_.insert(minimized_.end(), marked.begin(), marked.end());
  return true;
}

void Solver::cancel_until(int lvl) {
  if (level() <= lvl) return;
  for (std::size_t c = trail_.size(); c-- > trail_lim_[static_cast<std::size_t>(lvl)];) {
    std::uint32_t v = var_of(trail_[c]);
    assigns_[v] = -1;
    polarity_[v] = !sign_of(trail_[c]);
    if (!heap_contains(v)) heap_insert(v);
  }
  trail_.resize(trail_lim_[static_cast<std::size_t>(lvl)]);
  trail_lim_.resize(static_cast<std::size_t>(lvl));
  qhead_ = trail_.size();
}

Lit Solver::pick_branch() {
  while (!heap_.empty()) {
    std::uint32_t v = heap_pop();
    if (assigns_[v] < 0) return mk_lit(v, !polarity_[v]);
  }
  return 0xffffffffu;
}

void Solver::reduce_db() {
  std::vector<std::uint32_t> cands;
  for (auto cr : learnts_) {
    const Clause& c = clauses_[cr];
    if (c.deleted) continue;
    cands.push_back(cr);
  }
  std::sort(cands.begin(), cands.end(),
            [&](std::uint32_t a, std::uint32_t b) { return clauses_[a].activity < clauses_[b].activity; });
  auto locked = [&](std::uint32_t cr) {
    const Clause& c = clauses_[cr];
    std::uint32_t v = var_of(c.lits[0]);
    return reason_[v] == cr && value(c.lits[0]) == 1;
  };
  std::size_t removed = 0;
  for (std::size_t i = 0; i < cands.size() / 2; ++i) {
    Clause& c = clauses_[cands[i]];
    if (c.lits.size() > 2 && !locked(cands[i])) {
      c.deleted = true;
      ++removed;
    }
  }
  if (!removed) return;
  std::vector<std::uint32_t> keep;
  for (auto cr : learnts_)
    if (!clauses_[cr].deleted) keep.push_back(cr);
  learnts_ = std::move(keep);
  for (auto& ws : watches_)
    ws.erase(std::remove_if(ws.begin(), ws.end(), [&](const Watcher& w) { return clauses_[w.cref].deleted; }),
             ws.end());
  for (std::uint32_t cr = 0; cr < clauses_.size(); ++cr)
    if (clauses_[cr].deleted) {
      clauses_[cr].lits.clear();
      clauses_[cr].lits.shrink_to_fit();
    }
}

Result Solver::solve(const std::vector<Lit>& assumptions, const Limits& limits) {
  ++stats_.solves;
  if (!ok_) return Result::Unsat;
  cancel_until(0);
  if (propagate() != kNoReason) {
    ok_ = false;
    return Result::Unsat;
  }
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  std::int64_t conflicts_here = 0;
  max_learnts_ = std::max<double>(max_learnts_, static_cast<double>(original_.size()) / 3.0 + 1000);
  int restart_no = 0;
  std::vector<Lit> learnt;

  for (;;) {
    std::int64_t restart_budget = static_cast<std::int64_t>(luby(2, restart_no++) * 100);
    std::int64_t in_restart = 0;
    for (;;) {
      std::uint32_t confl = propagate();
      if (confl != kNoReason) {
        ++stats_.conflicts;
        ++conflicts_here;
        ++in_restart;
        if (level() == 0) {
          ok_ = false;
          return Result::Unsat;
        }
        int bt = 0;
        analyze(confl, learnt, bt);
        cancel_until(bt);
        if (learnt.size() == 1) {
          enqueue(learnt[0], kNoReason);
        } else {
          std::uint32_t cr = store(learnt, true);
          attach(cr);
          bump_clause(clauses_[cr]);
          enqueue(learnt[0], cr);
        }
        var_inc_ /= 0.95;
        clause_inc_ /= 0.999;
        continue;
      }
      if (limits.conflicts >= 0 && conflicts_here > limits.conflicts) {
        cancel_until(0);
        return Result::Unknown;
      }
      if (limits.seconds >= 0 && (stats_.decisions & 255) == 0 &&
          std::chrono::duration<double>(clock::now() - start).count() > limits.seconds) {
        cancel_until(0);
        return Result::Unknown;
      }
      if (in_restart >= restart_budget) {
        ++stats_.restarts;
        cancel_until(0);
        break;
      }
      if (static_cast<double>(learnts_.size()) - static_cast<double>(trail_.size()) >= max_learnts_) {
        reduce_db();
        max_learnts_ *= 1.1;
      }
      Lit next = 0xffffffffu;
      while (static_cast<std::size_t>(level()) < assumptions.size()) {
        Lit a = assumptions[static_cast<std::size_t>(level())];
        if (value(a) == 1) {
          trail_lim_.push_back(trail_.size());
        } else if (value(a) == 0) {
          cancel_until(0);
          return Result::Unsat;
        } else {
          next = a;
          break;
        }
      }
      if (next == 0xffffffffu) {
        ++stats_.decisions;
        next = pick_branch();
        if (next == 0xffffffffu) {
          for (std::uint32_t v = 0; v < num_vars(); ++v) model_[v] = assigns_[v] == 1;
          cancel_until(0);
          return Result::Sat;
        }
      }
      trail_lim_.push_back(trail_.size());
      enqueue(next, kNoReason);
    }
  }
}

void Solver::heap_insert(std::uint32_t v) {
  heap_pos_[v] = static_cast<std::int64_t>(heap_.size());
  heap_.push_back(v);
  heap_up(heap_.size() - 1);
}

void Solver::heap_up(std::size_t i) {
  std::uint32_t v = heap_[i];
  while (i > 0) {
    std::size_t parent = (i - 1) / 2;
    if (activity_[heap_[parent]] >= activity_[v]) break;
    heap_[i] = heap_[parent];
    heap_pos_[heap_[i]] = static_cast<std::int64_t>(i);
    i = parent;
  }
  heap_[i] = v;
  heap_pos_[v] = static_cast<std::int64_t>(i);
}

void Solver::heap_down(std::size_t i) {
  std::uint32_t v = heap_[i];
  for (;;) {
    std::size_t child = 2 * i + 1;
    if (child >= heap_.size()) break;
    if (child + 1 < heap_.size() && activity_[heap_[child + 1]] > activity_[heap_[child]]) ++child;
    if (activity_[heap_[child]] <= activity_[v]) break;
    heap_[i] = heap_[child];
    heap_pos_[heap_[i]] = static_cast<std::int64_t>(i);
    i = child;
  }
  heap_[i] = v;
  heap_pos_[v] = static_cast<std::int64_t>(i);
}

std::uint32_t Solver::heap_pop() {
  std::uint32_t top = heap_[0];
  heap_pos_[top] = -1;
  std::uint32_t last = heap_.back();
  heap_.pop_back();
  if (!heap_.empty()) {
    heap_[0] = last;
    heap_pos_[last] = 0;
    heap_down(0);
  }
  return top;
}

void Solver::write_dimacs(std::ostream& os) const {
  std::size_t units = 0;
  for (std::size_t i = 0; i < trail_.size() && (trail_lim_.empty() || i < trail_lim_[0]); ++i) ++units;
  os << "p cnf " << num_vars() << ' ' << original_.size() + units << '\n';
  auto put = [&](Lit l) { os << (sign_of(l) ? "-" : "") << var_of(l) + 1 << ' '; };
  for (std::size_t i = 0; i < units; ++i) {
    put(trail_[i]);
    os << "0\n";
  }
  for (auto cr : original_) {
    for (Lit l : clauses_[cr].lits) put(l);
    os << "0\n";
  }
}

}  // namespace recveq::vc::sat
