#include "minidafny/prover/omega.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace minidafny::prover {

namespace {

using i64 = std::int64_t;
using Coefs = std::map<int, i64>;
using Assignment = std::map<int, i64>;

i64 add(i64 a, i64 b) {
  i64 r;
  if (__builtin_add_overflow(a, b, &r)) throw ArithmeticOverflow();
  return r;
}
i64 mul(i64 a, i64 b) {
  i64 r;
  if (__builtin_mul_overflow(a, b, &r)) throw ArithmeticOverflow();
  return r;
}
i64 neg(i64 a) {
  if (a == INT64_MIN) throw ArithmeticOverflow();
  return -a;
}
i64 floor_div(i64 a, i64 b) {
  i64 q = a / b, r = a % b;
  return (r != 0 && ((r < 0) != (b < 0))) ? q - 1 : q;
}
i64 ceil_div(i64 a, i64 b) {
  i64 q = a / b, r = a % b;
  return (r != 0 && ((r < 0) == (b < 0))) ? q + 1 : q;
}
// Symmetric residue in (-m/2, m/2].
i64 mod_hat(i64 a, i64 m) {
  i64 r = a - mul(m, floor_div(a, m));
  return (2 * r > m) ? r - m : r;
}

struct Linear {
  Coefs a;
  i64 c = 0;
};

struct C {
  Coefs a;
  i64 c = 0;
  bool eq = false;
};

void axpy(Coefs& dst, i64& dst_c, const Linear& src, i64 k) {
  for (const auto& [v, x] : src.a) {
    i64 n = add(dst[v], mul(k, x));
    if (n == 0) dst.erase(v);
    else dst[v] = n;
  }
  dst_c = add(dst_c, mul(k, src.c));
}

// Replaces variable `x` by `e` in `c`.
void substitute(C& c, int x, const Linear& e) {
  auto it = c.a.find(x);
  if (it == c.a.end()) return;
  i64 k = it->second;
  c.a.erase(it);
  axpy(c.a, c.c, e, k);
}

i64 eval(const Linear& e, const Assignment& m) {
  i64 r = e.c;
  for (const auto& [v, k] : e.a) {
    auto it = m.find(v);
    r = add(r, mul(k, it == m.end() ? 0 : it->second));
  }
  return r;
}

class Omega {
 public:
  Omega(int next_var, Clock::time_point deadline) : next_var_(next_var), deadline_(deadline) {}

  std::optional<Assignment> solve(std::vector<C> cs) {
    if (Clock::now() > deadline_) throw DeadlineExceeded();
    if (!normalize(cs)) return std::nullopt;

    // Equalities first.
    int best = -1;
    i64 best_min = 0;
    for (int i = 0; i < static_cast<int>(cs.size()); ++i) {
      if (!cs[i].eq) continue;
      i64 mn = INT64_MAX;
      for (const auto& [v, k] : cs[i].a) mn = std::min(mn, k < 0 ? neg(k) : k);
      if (best < 0 || mn < best_min) best = i, best_min = mn;
    }
    if (best >= 0) return solve_equality(std::move(cs), best);
    return solve_inequalities(std::move(cs));
  }

 private:
  // Drops trivial constraints, divides by the gcd; false on a contradiction.
  bool normalize(std::vector<C>& cs) {
    std::vector<C> out;
    for (auto& c : cs) {
      for (auto it = c.a.begin(); it != c.a.end();)
        it = it->second == 0 ? c.a.erase(it) : std::next(it);
      if (c.a.empty()) {
        if (c.eq ? c.c != 0 : c.c > 0) return false;
        continue;
      }
      i64 g = 0;
      for (const auto& [v, k] : c.a) g = std::gcd(g, k < 0 ? neg(k) : k);
      if (g > 1) {
        if (c.eq) {
          if (c.c % g != 0) return false;
          c.c /= g;
        } else {
          c.c = ceil_div(c.c, g);
        }
        for (auto& [v, k] : c.a) k /= g;
      }
      out.push_back(std::move(c));
    }
    cs = std::move(out);
    return true;
  }

  std::optional<Assignment> solve_equality(std::vector<C> cs, int idx) {
    C e = cs[idx];
    int k = -1;
    for (const auto& [v, a] : e.a)
      if (a == 1 || a == -1) {
        k = v;
        break;
      }
    if (k >= 0) {
      // x_k = -sign(a_k) * (rest)
      i64 s = e.a.at(k);
      Linear def;
      for (const auto& [v, a] : e.a)
        if (v != k) def.a[v] = mul(-s, a);
      def.c = mul(-s, e.c);
      std::vector<C> rest;
      for (int i = 0; i < static_cast<int>(cs.size()); ++i) {
        if (i == idx) continue;
        substitute(cs[i], k, def);
        rest.push_back(std::move(cs[i]));
      }
      auto m = solve(std::move(rest));
      if (!m) return std::nullopt;
      (*m)[k] = eval(def, *m);
      return m;
    }

    // No unit coefficient: introduce sigma with m*sigma = sum mod_hat(a_i) x_i + mod_hat(c).
    i64 mn = INT64_MAX;
    for (const auto& [v, a] : e.a)
      if ((a < 0 ? neg(a) : a) < mn) mn = a < 0 ? neg(a) : a, k = v;
    i64 m = add(mn, 1);
    i64 sk = e.a.at(k) > 0 ? 1 : -1;
    int sigma = next_var_++;
    // mod_hat(a_k, m) = -sign(a_k), so
    // x_k = sign(a_k) * (sum_{i != k} mod_hat(a_i) x_i + mod_hat(c) - m*sigma)
    Linear def;
    for (const auto& [v, a] : e.a)
      if (v != k) {
        i64 r = mod_hat(a, m);
        if (r != 0) def.a[v] = mul(sk, r);
      }
    def.a[sigma] = mul(sk, neg(m));
    def.c = mul(sk, mod_hat(e.c, m));
    for (auto& c : cs) substitute(c, k, def);
    auto res = solve(std::move(cs));
    if (!res) return std::nullopt;
    (*res)[k] = eval(def, *res);
    res->erase(sigma);
    return res;
  }

  // Value for `x` within the bounds the constraints place on it, closest to 0.
  i64 pick(int x, const std::vector<C>& involving, const Assignment& m) {
    bool has_lo = false, has_hi = false;
    i64 lo = 0, hi = 0;
    for (const auto& c : involving) {
      i64 a = c.a.at(x);
      Linear rest;
      rest.a = c.a;
      rest.a.erase(x);
      rest.c = c.c;
      i64 r = eval(rest, m);
      // a*x + r <= 0
      if (a > 0) {
        i64 b = floor_div(neg(r), a);
        hi = has_hi ? std::min(hi, b) : b;
        has_hi = true;
      } else {
        i64 b = ceil_div(neg(r), a);
        lo = has_lo ? std::max(lo, b) : b;
        has_lo = true;
      }
    }
    if (has_lo && has_hi && lo > hi) throw std::logic_error("omega: empty bound during back-substitution");
    if ((!has_lo || lo <= 0) && (!has_hi || hi >= 0)) return 0;
    if (has_lo && lo > 0) return lo;
    return hi;
  }

  std::optional<Assignment> solve_inequalities(std::vector<C> cs) {
    // Merge parallel constraints and detect opposite pairs that pin a value.
    std::map<Coefs, i64> tightest;
    for (const auto& c : cs) {
      auto [it, fresh] = tightest.emplace(c.a, c.c);
      if (!fresh) it->second = std::max(it->second, c.c);
    }
    cs.clear();
    for (const auto& [a, c] : tightest) {
      Coefs na;
      for (const auto& [v, k] : a) na[v] = neg(k);
      auto opp = tightest.find(na);
      if (opp != tightest.end()) {
        // a.x + c <= 0 and -a.x + c' <= 0  =>  c' <= a.x <= -c
        if (opp->second > neg(c)) return std::nullopt;
        if (opp->second == neg(c)) {
          if (a < na) cs.push_back(C{a, c, true});
          continue;
        }
      }
      cs.push_back(C{a, c, false});
    }
    for (const auto& c : cs)
      if (c.eq) return solve(std::move(cs));
    if (cs.empty()) return Assignment{};

    std::map<int, std::pair<int, int>> bounds;  // var -> (#lower, #upper)
    for (const auto& c : cs)
      for (const auto& [v, a] : c.a) (a < 0 ? bounds[v].first : bounds[v].second)++;

    auto split = [&](int x, std::vector<C>& with, std::vector<C>& without) {
      for (auto& c : cs) (c.a.count(x) ? with : without).push_back(c);
    };

    // A variable bounded on one side only can always be satisfied.
    for (const auto& [x, lu] : bounds) {
      if (lu.first == 0 || lu.second == 0) {
        std::vector<C> with, without;
        split(x, with, without);
        auto m = solve(std::move(without));
        if (!m) return std::nullopt;
        (*m)[x] = pick(x, with, *m);
        return m;
      }
    }

    // Prefer an exact elimination with the fewest generated constraints.
    int best = -1;
    bool best_exact = false;
    long best_cost = 0;
    for (const auto& [x, lu] : bounds) {
      bool lower_unit = true, upper_unit = true;
      for (const auto& c : cs) {
        auto it = c.a.find(x);
        if (it == c.a.end()) continue;
        if (it->second < 0 && it->second != -1) lower_unit = false;
        if (it->second > 0 && it->second != 1) upper_unit = false;
      }
      bool exact = lower_unit || upper_unit;
      long cost = static_cast<long>(lu.first) * lu.second;
      if (best < 0 || (exact && !best_exact) || (exact == best_exact && cost < best_cost))
        best = x, best_exact = exact, best_cost = cost;
    }
    const int x = best;
    std::vector<C> with, without;
    split(x, with, without);
    std::vector<const C*> lowers, uppers;
    for (const auto& c : with) (c.a.at(x) < 0 ? lowers : uppers).push_back(&c);

    auto shadow = [&](bool dark) {
      std::vector<C> out = without;
      for (const C* l : lowers)
        for (const C* u : uppers) {
          i64 b = neg(l->a.at(x)), a = u->a.at(x);
          C n;
          Linear lr{l->a, l->c}, ur{u->a, u->c};
          lr.a.erase(x);
          ur.a.erase(x);
          axpy(n.a, n.c, lr, a);
          axpy(n.a, n.c, ur, b);
          if (dark) n.c = add(n.c, mul(a - 1, b - 1));
          out.push_back(std::move(n));
        }
      return out;
    };

    if (best_exact) {
      auto m = solve(shadow(false));
      if (!m) return std::nullopt;
      (*m)[x] = pick(x, with, *m);
      return m;
    }
    if (!solve(shadow(false))) return std::nullopt;
    if (auto m = solve(shadow(true))) {
      (*m)[x] = pick(x, with, *m);
      return m;
    }
    // Splinters: x lies close to one of its lower bounds.
    i64 amax = 0;
    for (const C* u : uppers) amax = std::max(amax, u->a.at(x));
    for (const C* l : lowers) {
      i64 b = neg(l->a.at(x));
      i64 limit = floor_div(add(mul(amax, b), neg(add(amax, b))), amax);
      for (i64 i = 0; i <= limit; ++i) {
        std::vector<C> next = cs;
        C e{l->a, add(l->c, i), true};
        next.push_back(std::move(e));
        if (auto m = solve(std::move(next))) return m;
      }
    }
    return std::nullopt;
  }

  int next_var_;
  Clock::time_point deadline_;
};

}  // namespace

std::optional<std::map<int, std::int64_t>> omega_solve(const std::vector<LinConstraint>& constraints,
                                                       Clock::time_point deadline) {
  std::vector<C> cs;
  std::set<int> vars;
  int max_var = 0;
  for (const auto& lc : constraints) {
    cs.push_back(C{lc.coef, lc.constant, lc.equality});
    for (const auto& [v, k] : lc.coef) {
      vars.insert(v);
      max_var = std::max(max_var, v);
    }
  }
  Omega o(max_var + 1, deadline);
  auto m = o.solve(std::move(cs));
  if (!m) return std::nullopt;
  std::map<int, std::int64_t> out;
  for (int v : vars) {
    auto it = m->find(v);
    out[v] = it == m->end() ? 0 : it->second;
  }
  return out;
}

}  // namespace minidafny::prover
