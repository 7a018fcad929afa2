#include "minidafny/prover/sat.hpp"

#include <algorithm>
#include <cstdlib>

#include "minidafny/prover/omega.hpp"

namespace minidafny::prover {

int SatSolver::new_var() {
  assign_.push_back(-1);
  level_.push_back(0);
  reason_.push_back(-1);
  activity_.push_back(0);
  phase_.push_back(0);
  watches_.resize(2 * assign_.size());
  return static_cast<int>(assign_.size()) - 1;
}

void SatSolver::add_clause(std::vector<Lit> clause) { pending_.push_back(std::move(clause)); }

int SatSolver::attach(std::vector<Lit> clause) {
  int ci = static_cast<int>(clauses_.size());
  watches_[index(clause[0])].push_back(ci);
  watches_[index(clause[1])].push_back(ci);
  clauses_.push_back(std::move(clause));
  return ci;
}

void SatSolver::enqueue(Lit l, int reason) {
  int v = std::abs(l);
  assign_[v] = l > 0 ? 1 : 0;
  level_[v] = static_cast<int>(trail_lim_.size());
  reason_[v] = reason;
  trail_.push_back(l);
}

int SatSolver::propagate() {
  while (qhead_ < trail_.size()) {
    Lit falsified = -trail_[qhead_++];
    auto& ws = watches_[index(falsified)];
    std::size_t i = 0, j = 0;
    while (i < ws.size()) {
      int ci = ws[i++];
      auto& c = clauses_[ci];
      if (c[0] == falsified) std::swap(c[0], c[1]);
      if (lit_value(c[0]) == 1) {
        ws[j++] = ci;
        continue;
      }
      bool moved = false;
      for (std::size_t k = 2; k < c.size(); ++k) {
        if (lit_value(c[k]) != 0) {
          std::swap(c[1], c[k]);
          watches_[index(c[1])].push_back(ci);
          moved = true;
          break;
        }
      }
      if (moved) continue;
      ws[j++] = ci;
      if (lit_value(c[0]) == 0) {
        while (i < ws.size()) ws[j++] = ws[i++];
        ws.resize(j);
        return ci;
      }
      enqueue(c[0], ci);
    }
    ws.resize(j);
  }
  return -1;
}

void SatSolver::backtrack(int level) {
  if (static_cast<int>(trail_lim_.size()) <= level) return;
  std::size_t keep = trail_lim_[level];
  for (std::size_t k = trail_.size(); k-- > keep;) {
    int v = std::abs(trail_[k]);
    phase_[v] = static_cast<char>(assign_[v]);
    assign_[v] = -1;
    reason_[v] = -1;
  }
  trail_.resize(keep);
  trail_lim_.resize(level);
  qhead_ = std::min(qhead_, keep);
}

// The conflicting clause has at least one literal at the current level.
void SatSolver::learn_and_backjump(int conflict) {
  const int cur = static_cast<int>(trail_lim_.size());
  std::vector<char> seen(assign_.size(), 0);
  std::vector<Lit> learnt{0};
  int counter = 0;
  Lit p = 0;
  std::size_t idx = trail_.size();
  int clause = conflict;
  for (;;) {
    for (Lit q : clauses_[clause]) {
      if (p != 0 && q == p) continue;
      int v = std::abs(q);
      if (seen[v] || level_[v] == 0) continue;
      seen[v] = 1;
      activity_[v] += bump_;
      if (activity_[v] > 1e100) {
        for (auto& a : activity_) a *= 1e-100;
        bump_ *= 1e-100;
      }
      if (level_[v] == cur) ++counter;
      else learnt.push_back(q);
    }
    do --idx;
    while (!seen[std::abs(trail_[idx])]);
    p = trail_[idx];
    seen[std::abs(p)] = 0;
    clause = reason_[std::abs(p)];
    if (--counter == 0) break;
  }
  learnt[0] = -p;
  bump_ /= 0.95;

  int bj = 0;
  for (std::size_t k = 1; k < learnt.size(); ++k) {
    if (level_[std::abs(learnt[k])] > bj) {
      bj = level_[std::abs(learnt[k])];
      std::swap(learnt[1], learnt[k]);
    }
  }
  backtrack(bj);
  if (learnt.size() == 1) {
    enqueue(learnt[0], -1);
  } else {
    Lit first = learnt[0];
    int ci = attach(std::move(learnt));
    enqueue(first, ci);
  }
}

SatSolver::Result SatSolver::solve(TheoryHook* theory, std::chrono::steady_clock::time_point deadline) {
  backtrack(0);
  for (auto& c : pending_) {
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    bool tautology = false;
    for (Lit l : c)
      if (std::binary_search(c.begin(), c.end(), -l)) tautology = true;
    if (tautology) continue;
    c.erase(std::remove_if(c.begin(), c.end(), [&](Lit l) { return lit_value(l) == 0; }), c.end());
    if (std::any_of(c.begin(), c.end(), [&](Lit l) { return lit_value(l) == 1; })) continue;
    if (c.empty()) empty_clause_ = true;
    else if (c.size() == 1) enqueue(c[0], -1);
    else attach(std::move(c));
  }
  pending_.clear();
  if (empty_clause_) return Result::Unsat;

  long conflicts = 0, restart_at = 100;
  long steps = 0;
  for (;;) {
    if ((++steps & 63) == 0 && std::chrono::steady_clock::now() > deadline) throw DeadlineExceeded();
    int conflict = propagate();
    if (conflict < 0) {
      bool complete = trail_.size() == static_cast<std::size_t>(num_vars());
      std::vector<Lit> lemma = theory ? theory->check(trail_, complete) : std::vector<Lit>{};
      if (!lemma.empty()) {
        int top = 0;
        for (Lit l : lemma) top = std::max(top, level_[std::abs(l)]);
        if (top == 0) {
          empty_clause_ = true;
          return Result::Unsat;
        }
        backtrack(top);
        // Keep the lemma (and its watches) so later searches reuse it.
        std::sort(lemma.begin(), lemma.end(),
                  [&](Lit a, Lit b) { return level_[std::abs(a)] > level_[std::abs(b)]; });
        if (lemma.size() == 1) {
          clauses_.push_back(lemma);
          conflict = static_cast<int>(clauses_.size()) - 1;
        } else {
          conflict = attach(lemma);
        }
      } else if (complete) {
        return Result::Sat;
      } else {
        int best = 0;
        for (int v = 1; v <= num_vars(); ++v)
          if (assign_[v] < 0 && (best == 0 || activity_[v] > activity_[best])) best = v;
        trail_lim_.push_back(trail_.size());
        enqueue(phase_[best] == 1 ? best : -best, -1);
        continue;
      }
    }
    if (trail_lim_.empty()) {
      empty_clause_ = true;
      return Result::Unsat;
    }
    ++conflicts;
    learn_and_backjump(conflict);
    if (conflicts >= restart_at) {
      restart_at += restart_at / 2;
      backtrack(0);
    }
  }
}

}  // namespace minidafny::prover
