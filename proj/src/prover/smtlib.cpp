#include "minidafny/prover/smtlib.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cctype>
#include <fstream>
#include <functional>
#include <memory>
#include <set>
#include <sstream>
#include <unordered_map>

namespace minidafny::prover {

using logic::Op;
using logic::Sort;
using logic::TermManager;

std::string smt_symbol(const std::string& s) {
  static const std::set<std::string> reserved = {"par", "NUMERAL", "DECIMAL", "STRING", "_", "!", "as", "let",
                                                 "exists", "forall", "match"};
  static const std::string extra = "~!@$%^&*_-+=<>.?/";
  bool simple = !s.empty() && !std::isdigit(static_cast<unsigned char>(s[0])) && !reserved.count(s);
  for (char ch : s)
    if (!std::isalnum(static_cast<unsigned char>(ch)) && extra.find(ch) == std::string::npos) simple = false;
  if (simple) return s;
  std::string out = "|";
  for (char ch : s)
    if (ch != '|' && ch != '\\') out += ch;
  return out + "|";
}

namespace {

const char* kLen = "$len";

std::string sort_name(Sort s) {
  switch (s) {
    case Sort::Bool: return "Bool";
    case Sort::Int:
    case Sort::Ref: return "Int";
    case Sort::HeapInt: return "(Array Int (Array Int Int))";
    case Sort::HeapBool: return "(Array Int (Array Int Bool))";
  }
  return "Int";
}

class Printer {
 public:
  explicit Printer(std::ostream& os) : os_(os) {}

  void print(TermRef t) {
    const auto& a = t->args;
    switch (t->op) {
      case Op::BoolLit:
        os_ << (t->value ? "true" : "false");
        return;
      case Op::IntLit:
        if (t->value < 0) os_ << "(- " << (t->value == INT64_MIN ? std::string("9223372036854775808") : std::to_string(-t->value)) << ')';
        else os_ << t->value;
        return;
      case Op::Null:
        os_ << 0;
        return;
      case Op::Const:
        os_ << smt_symbol(t->name);
        return;
      case Op::Select:
        os_ << "(select (select ";
        print(a[0]);
        os_ << ' ';
        print(a[1]);
        os_ << ") ";
        print(a[2]);
        os_ << ')';
        return;
      case Op::Store:
        os_ << "(store ";
        print(a[0]);
        os_ << ' ';
        print(a[1]);
        os_ << " (store (select ";
        print(a[0]);
        os_ << ' ';
        print(a[1]);
        os_ << ") ";
        print(a[2]);
        os_ << ' ';
        print(a[3]);
        os_ << "))";
        return;
      case Op::Length:
        os_ << "(select " << kLen << ' ';
        print(a[0]);
        os_ << ')';
        return;
      case Op::Apply:
        if (a.empty()) {
          os_ << smt_symbol(t->name);
          return;
        }
        os_ << '(' << smt_symbol(t->name);
        for (TermRef x : a) {
          os_ << ' ';
          print(x);
        }
        os_ << ')';
        return;
      case Op::Forall:
      case Op::Exists:
        os_ << '(' << (t->op == Op::Forall ? "forall" : "exists") << " ((" << smt_symbol(t->bound()->name) << ' '
            << sort_name(t->bound()->sort) << ")) ";
        print(t->body());
        os_ << ')';
        return;
      default:
        break;
    }
    const char* op = "";
    switch (t->op) {
      case Op::Not: op = "not"; break;
      case Op::And: op = "and"; break;
      case Op::Or: op = "or"; break;
      case Op::Implies: op = "=>"; break;
      case Op::Iff:
      case Op::Eq: op = "="; break;
      case Op::Ite: op = "ite"; break;
      case Op::Lt: op = "<"; break;
      case Op::Le: op = "<="; break;
      case Op::Add: op = "+"; break;
      case Op::Sub:
      case Op::Neg: op = "-"; break;
      case Op::Mul: op = "*"; break;
      case Op::Div: op = "div"; break;
      case Op::Mod: op = "mod"; break;
      default: break;
    }
    os_ << '(' << op;
    for (TermRef x : a) {
      os_ << ' ';
      print(x);
    }
    os_ << ')';
  }

 private:
  std::ostream& os_;
};

struct Prepared {
  TermRef negation = nullptr;  // skolemized
  std::vector<TermRef> prelude;
  std::vector<TermRef> consts;  // free constants, sorted by name
  std::map<std::string, TermRef> functions;  // one representative Apply per name
  bool uses_length = false;
};

Prepared prepare(const vcgen::VerificationCondition& vc, TermManager& tm) {
  Prepared p;
  p.prelude = vc.prelude;
  p.negation = skolemize(to_nnf(tm.mk_not(vc.goal), tm), tm).formula;
  std::map<std::string, TermRef> consts;
  std::vector<TermRef> all = p.prelude;
  all.push_back(p.negation);
  for (TermRef f : all) {
    for (TermRef c : logic::free_consts(f)) consts.emplace(c->name, c);
    for (TermRef u : logic::collect(f, [](TermRef x) { return x->op == Op::Apply || x->op == Op::Length; })) {
      if (u->op == Op::Length) p.uses_length = true;
      else p.functions.emplace(u->name, u);
    }
  }
  for (const auto& [n, c] : consts) p.consts.push_back(c);
  return p;
}

std::string emit(const Prepared& p) {
  std::ostringstream os;
  Printer pr(os);
  os << "(set-logic ALL)\n";
  for (TermRef c : p.consts) os << "(declare-fun " << smt_symbol(c->name) << " () " << sort_name(c->sort) << ")\n";
  os << "(declare-fun " << kLen << " () (Array Int Int))\n";
  for (const auto& [name, app] : p.functions) {
    os << "(declare-fun " << smt_symbol(name) << " (";
    for (std::size_t i = 0; i < app->args.size(); ++i) os << (i ? " " : "") << sort_name(app->args[i]->sort);
    os << ") " << sort_name(app->sort) << ")\n";
  }
  os << "(assert (forall ((r Int)) (>= (select " << kLen << " r) 0)))\n";
  for (TermRef f : p.prelude) {
    os << "(assert ";
    pr.print(f);
    os << ")\n";
  }
  os << "(assert ";
  pr.print(p.negation);
  os << ")\n(check-sat)\n(get-model)\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Model reading.

struct SExpr {
  std::string atom;
  std::vector<SExpr> list;
  bool is_list = false;
};

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class SExprReader {
 public:
  explicit SExprReader(const std::string& s) : s_(s) {}

  bool at_end() {
    skip();
    return pos_ >= s_.size();
  }

  SExpr read() {
    skip();
    if (pos_ >= s_.size()) throw ParseError("unexpected end of model");
    SExpr e;
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      e.is_list = true;
      for (;;) {
        skip();
        if (pos_ >= s_.size()) throw ParseError("unbalanced parenthesis");
        if (s_[pos_] == ')') {
          ++pos_;
          break;
        }
        e.list.push_back(read());
      }
      return e;
    }
    if (c == ')') throw ParseError("unexpected ')'");
    if (c == '|') {
      auto end = s_.find('|', pos_ + 1);
      if (end == std::string::npos) throw ParseError("unterminated symbol");
      e.atom = s_.substr(pos_ + 1, end - pos_ - 1);
      pos_ = end + 1;
      return e;
    }
    if (c == '"') {
      auto end = s_.find('"', pos_ + 1);
      if (end == std::string::npos) throw ParseError("unterminated string");
      e.atom = s_.substr(pos_, end - pos_ + 1);
      pos_ = end + 1;
      return e;
    }
    std::size_t start = pos_;
    while (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_])) && s_[pos_] != '(' &&
           s_[pos_] != ')')
      ++pos_;
    e.atom = s_.substr(start, pos_ - start);
    return e;
  }

 private:
  void skip() {
    while (pos_ < s_.size()) {
      if (std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      else if (s_[pos_] == ';')
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
      else break;
    }
  }
  const std::string& s_;
  std::size_t pos_ = 0;
};

struct Value;
using ValuePtr = std::shared_ptr<const Value>;
using Env = std::map<std::string, ValuePtr>;

struct Value {
  enum class Kind { Int, Bool, Array } kind = Kind::Int;
  std::int64_t i = 0;
  // Array: stores over a base that is a constant, a lambda or a named function.
  std::vector<std::pair<ValuePtr, ValuePtr>> stores;  // oldest first
  ValuePtr default_value;
  std::vector<std::string> params;  // lambda / function parameters
  const SExpr* body = nullptr;
  Env closure;
};

bool same(const ValuePtr& a, const ValuePtr& b) {
  if (a->kind != b->kind) return false;
  if (a->kind != Value::Kind::Array) return a->i == b->i;
  return a.get() == b.get();
}

ValuePtr mk_int(std::int64_t v) {
  auto p = std::make_shared<Value>();
  p->i = v;
  return p;
}
ValuePtr mk_bool(bool b) {
  auto p = std::make_shared<Value>();
  p->kind = Value::Kind::Bool;
  p->i = b;
  return p;
}

class ModelEval {
 public:
  std::map<std::string, const SExpr*> defs;  // define-fun by name (whole form)

  ValuePtr eval(const SExpr& e, const Env& env) {
    if (++steps_ > 2000000) throw ParseError("model too large");
    if (!e.is_list) return atom(e.atom, env);
    if (e.list.empty()) throw ParseError("empty application");
    const SExpr& head = e.list[0];
    if (head.is_list) {
      // ((as const T) v)
      if (head.list.size() == 3 && head.list[0].atom == "as" && head.list[1].atom == "const") {
        auto arr = std::make_shared<Value>();
        arr->kind = Value::Kind::Array;
        arr->default_value = eval(e.list.at(1), env);
        return arr;
      }
      throw ParseError("unsupported application head");
    }
    const std::string& op = head.atom;
    auto arg = [&](std::size_t k) { return eval(e.list.at(k), env); };
    auto ints = [&]() {
      std::vector<std::int64_t> v;
      for (std::size_t k = 1; k < e.list.size(); ++k) {
        auto x = arg(k);
        if (x->kind == Value::Kind::Array) throw ParseError("array in arithmetic");
        v.push_back(x->i);
      }
      return v;
    };
    if (op == "_" && e.list.size() == 3 && e.list[1].atom == "as-array") {
      auto it = defs.find(e.list[2].atom);
      if (it == defs.end()) throw ParseError("unknown as-array function");
      return function_array(*it->second);
    }
    if (op == "as" && e.list.size() == 3) return arg(1);
    if (op == "-") {
      auto v = ints();
      if (v.size() == 1) return mk_int(-v[0]);
      std::int64_t r = v.at(0);
      for (std::size_t k = 1; k < v.size(); ++k) r -= v[k];
      return mk_int(r);
    }
    if (op == "+" || op == "*") {
      std::int64_t r = op == "+" ? 0 : 1;
      for (auto x : ints()) r = op == "+" ? r + x : r * x;
      return mk_int(r);
    }
    if (op == "div" || op == "mod") {
      auto v = ints();
      return mk_int(op == "div" ? euclid_div(v.at(0), v.at(1)) : euclid_mod(v.at(0), v.at(1)));
    }
    if (op == "abs") return mk_int(std::abs(ints().at(0)));
    if (op == "<" || op == "<=" || op == ">" || op == ">=") {
      auto v = ints();
      bool r = op == "<" ? v.at(0) < v.at(1) : op == "<=" ? v.at(0) <= v.at(1) : op == ">" ? v.at(0) > v.at(1) : v.at(0) >= v.at(1);
      return mk_bool(r);
    }
    if (op == "=") return mk_bool(same(arg(1), arg(2)));
    if (op == "distinct") return mk_bool(!same(arg(1), arg(2)));
    if (op == "not") return mk_bool(!arg(1)->i);
    if (op == "and" || op == "or") {
      bool is_and = op == "and";
      for (std::size_t k = 1; k < e.list.size(); ++k)
        if ((arg(k)->i != 0) != is_and) return mk_bool(!is_and);
      return mk_bool(is_and);
    }
    if (op == "=>") return mk_bool(!arg(1)->i || arg(2)->i);
    if (op == "ite") return arg(1)->i ? arg(2) : arg(3);
    if (op == "select") return select(arg(1), arg(2));
    if (op == "store") {
      auto base = arg(1);
      if (base->kind != Value::Kind::Array) throw ParseError("store on non-array");
      auto arr = std::make_shared<Value>(*base);
      arr->stores.emplace_back(arg(2), arg(3));
      return arr;
    }
    if (op == "let") {
      Env inner = env;
      for (const auto& b : e.list.at(1).list) inner[b.list.at(0).atom] = eval(b.list.at(1), env);
      return eval(e.list.at(2), inner);
    }
    if (op == "lambda") {
      auto arr = std::make_shared<Value>();
      arr->kind = Value::Kind::Array;
      for (const auto& p : e.list.at(1).list) arr->params.push_back(p.list.at(0).atom);
      arr->body = &e.list.at(2);
      arr->closure = env;
      return arr;
    }
    if (auto it = defs.find(op); it != defs.end()) {
      const SExpr& def = *it->second;
      Env inner;
      const auto& params = def.list.at(2).list;
      for (std::size_t k = 0; k < params.size(); ++k) inner[params[k].list.at(0).atom] = arg(k + 1);
      return eval(def.list.at(4), inner);
    }
    throw ParseError("unsupported model operator '" + op + "'");
  }

  ValuePtr select(const ValuePtr& arr, const ValuePtr& idx) {
    if (arr->kind != Value::Kind::Array) throw ParseError("select on non-array");
    for (auto it = arr->stores.rbegin(); it != arr->stores.rend(); ++it)
      if (same(it->first, idx)) return it->second;
    if (arr->body) {
      Env inner = arr->closure;
      inner[arr->params.at(0)] = idx;
      return eval(*arr->body, inner);
    }
    if (arr->default_value) return arr->default_value;
    throw ParseError("array without default");
  }

  ValuePtr constant(const std::string& name) {
    auto it = defs.find(name);
    if (it == defs.end()) return nullptr;
    if (auto c = cache_.find(name); c != cache_.end()) return c->second;
    auto v = eval(it->second->list.at(4), {});
    cache_[name] = v;
    return v;
  }

 private:
  ValuePtr atom(const std::string& a, const Env& env) {
    if (auto it = env.find(a); it != env.end()) return it->second;
    if (a == "true") return mk_bool(true);
    if (a == "false") return mk_bool(false);
    if (!a.empty() && std::isdigit(static_cast<unsigned char>(a[0]))) {
      try {
        std::size_t used = 0;
        long long v = std::stoll(a, &used);
        if (used != a.size()) throw ParseError("non-integer literal");
        return mk_int(v);
      } catch (const std::out_of_range&) {
        throw ParseError("integer literal out of range");
      } catch (const std::invalid_argument&) {
        throw ParseError("bad literal");
      }
    }
    auto it = defs.find(a);
    if (it != defs.end()) {
      if (!it->second->list.at(2).list.empty()) return function_array(*it->second);
      return constant(a);
    }
    throw ParseError("unbound symbol '" + a + "'");
  }

  ValuePtr function_array(const SExpr& def) {
    auto arr = std::make_shared<Value>();
    arr->kind = Value::Kind::Array;
    for (const auto& p : def.list.at(2).list) arr->params.push_back(p.list.at(0).atom);
    arr->body = &def.list.at(4);
    return arr;
  }

  std::map<std::string, ValuePtr> cache_;
  long steps_ = 0;
};

}  // namespace

std::string emit_smtlib(const vcgen::VerificationCondition& vc, TermManager& tm) { return emit(prepare(vc, tm)); }

std::optional<Model> parse_smt_model(const std::string& text, const std::vector<TermRef>& consts) {
  try {
    SExprReader rd(text);
    std::vector<SExpr> top;
    while (!rd.at_end()) top.push_back(rd.read());
    ModelEval me;
    std::function<void(const SExpr&)> scan = [&](const SExpr& e) {
      if (!e.is_list) return;
      if (e.list.size() == 5 && !e.list[0].is_list && e.list[0].atom == "define-fun") {
        me.defs[e.list[1].atom] = &e;
        return;
      }
      for (const auto& x : e.list) scan(x);
    };
    for (const auto& e : top) scan(e);

    Model m;
    std::set<std::int64_t> refs;
    for (TermRef c : consts) {
      if (c->sort == Sort::Int || c->sort == Sort::Ref) {
        auto v = me.constant(c->name);
        m.ints[c->name] = v ? v->i : 0;
        if (c->sort == Sort::Ref && m.ints[c->name] != 0) refs.insert(m.ints[c->name]);
      } else if (c->sort == Sort::Bool) {
        auto v = me.constant(c->name);
        m.bools[c->name] = v && v->i != 0;
      }
    }
    auto len = me.constant(kLen);
    for (std::int64_t r : refs) {
      std::int64_t n = len ? me.select(len, mk_int(r))->i : 0;
      m.lengths[r] = n;
    }
    for (TermRef c : consts) {
      if (c->sort != Sort::HeapInt && c->sort != Sort::HeapBool) continue;
      auto h = me.constant(c->name);
      if (!h) continue;
      HeapTable& table = m.heaps[c->name];
      for (std::int64_t r : refs) {
        auto row = me.select(h, mk_int(r));
        for (std::int64_t i = 0; i < m.lengths[r] && i < 1000; ++i) table.entries[{r, i}] = me.select(row, mk_int(i))->i;
      }
    }
    return m;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

namespace {

struct ProcessOutput {
  bool started = false;
  bool timed_out = false;
  std::string out;
};

ProcessOutput run_command(const std::string& command, std::chrono::milliseconds timeout) {
  ProcessOutput res;
  int fds[2];
  if (pipe(fds) != 0) return res;
  pid_t pid = fork();
  if (pid < 0) {
    close(fds[0]);
    close(fds[1]);
    return res;
  }
  if (pid == 0) {
    setpgid(0, 0);
    dup2(fds[1], STDOUT_FILENO);
    int devnull = open("/dev/null", O_WRONLY);
    if (devnull >= 0) dup2(devnull, STDERR_FILENO);
    close(fds[0]);
    close(fds[1]);
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  res.started = true;
  close(fds[1]);
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  char buf[4096];
  for (;;) {
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      res.timed_out = true;
      break;
    }
    pollfd p{fds[0], POLLIN, 0};
    int r = poll(&p, 1, static_cast<int>(std::min<long long>(left.count(), 1000)));
    if (r < 0) break;
    if (r == 0) continue;
    ssize_t n = read(fds[0], buf, sizeof buf);
    if (n <= 0) break;
    res.out.append(buf, static_cast<std::size_t>(n));
  }
  close(fds[0]);
  if (res.timed_out) kill(-pid, SIGKILL);
  int status = 0;
  waitpid(pid, &status, 0);
  return res;
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "'\\''";
    else out += c;
  }
  return out + "'";
}

}  // namespace

ExternalResult run_external(const vcgen::VerificationCondition& vc, TermManager& tm,
                            const std::string& solver_command, const std::string& script_path,
                            std::chrono::milliseconds timeout) {
  ExternalResult res;
  Prepared p = prepare(vc, tm);
  {
    std::ofstream out(script_path);
    out << emit(p);
    if (!out) {
      res.solver_failed = true;
      res.message = "cannot write SMT-LIB script '" + script_path + "'";
      res.verdict = Verdict::unknown(reason::kExternalUnknown);
      return res;
    }
  }
  ProcessOutput po = run_command(solver_command + " " + shell_quote(script_path), timeout);
  if (!po.started) {
    res.solver_failed = true;
    res.message = "cannot start solver command '" + solver_command + "'";
    res.verdict = Verdict::unknown(reason::kExternalUnknown);
    return res;
  }
  if (po.timed_out) {
    res.verdict = Verdict::unknown(reason::kTimeout);
    return res;
  }
  std::istringstream is(po.out);
  std::string first;
  is >> first;
  if (first == "unsat") {
    res.verdict = Verdict::proved();
  } else if (first == "unknown") {
    res.verdict = Verdict::unknown(reason::kExternalUnknown);
  } else if (first == "sat") {
    std::string rest((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    res.verdict.kind = Verdict::Kind::Counterexample;
    if (auto m = parse_smt_model(rest, p.consts)) {
      res.verdict.model = std::move(*m);
    } else {
      res.message = "could not parse the solver's model";
    }
  } else {
    res.solver_failed = true;
    res.message = first.empty() ? "solver produced no output" : "unexpected solver answer '" + first + "'";
    res.verdict = Verdict::unknown(reason::kExternalUnknown);
  }
  return res;
}

}  // namespace minidafny::prover
