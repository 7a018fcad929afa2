#include "minidafny/driver/driver.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "minidafny/frontend/parser.hpp"
#include "minidafny/ir/lower.hpp"
#include "minidafny/ir/translate.hpp"
#include "minidafny/prover/smtlib.hpp"
#include "minidafny/typecheck/checker.hpp"
#include "minidafny/vcgen/vc.hpp"

namespace minidafny::driver {

namespace fs = std::filesystem;
using Json = nlohmann::json;
using VK = prover::Verdict::Kind;

int combine_exit(int a, int b) {
  auto rank = [](int c) {
    switch (c) {
      case exit_code::kInternal: return 4;
      case exit_code::kSolverFailure: return 3;
      case exit_code::kInputErrors: return 2;
      case exit_code::kVerificationFailed: return 1;
      default: return 0;
    }
  };
  return rank(a) >= rank(b) ? a : b;
}

namespace {

bool before(const Span& a, const Span& b) {
  return std::tie(a.start_line, a.start_col) < std::tie(b.start_line, b.start_col);
}

int exit_for(const Diagnostic& d) {
  if (d.severity != Severity::Error) return exit_code::kOk;
  if (d.code == codes::kNoTermination) return exit_code::kVerificationFailed;
  if (d.code == codes::kSolverError) return exit_code::kSolverFailure;
  if (d.code == codes::kInternal) return exit_code::kInternal;
  return exit_code::kInputErrors;
}

std::string temp_script_path() {
  static std::atomic<int> counter{0};
  return (fs::temp_directory_path() /
          ("minidafny-" + std::to_string(::getpid()) + "-" + std::to_string(counter++) + ".smt2"))
      .string();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + p.string());
}

// Variables shown in a counterexample: parameters of the declaration.
void describe_model(VcResult& r, const typecheck::TypedProgram& tp, const std::string& decl) {
  std::vector<const frontend::Param*> params;
  if (const auto* m = tp.method(decl)) {
    for (const auto& p : m->ins) params.push_back(&p);
    for (const auto& p : m->outs) params.push_back(&p);
  } else if (const auto* f = tp.function(decl)) {
    for (const auto& p : f->ins) params.push_back(&p);
  }
  std::map<std::string, bool> refs;
  for (const auto* p : params) {
    if (p->type.is_array()) refs[p->name] = p->type.elem == Type::Kind::Bool;
    r.model_names.push_back(p->name);
  }
  r.model.derive_arrays(refs);
  r.counterexample = r.model.describe(r.model_names);
}

void run_vc(const vcgen::VerificationCondition& vc, logic::TermManager& tm,
            const std::map<std::string, ir::FunctionDef>* functions, const typecheck::TypedProgram& tp, const RunConfig& cfg, VcResult& r,
            FileResult& file, int& exit) {
  std::optional<fs::path> script;
  if (cfg.emit_smt_dir) {
    fs::create_directories(*cfg.emit_smt_dir);
    script = fs::path(*cfg.emit_smt_dir) / (vc.method + "." + vc.id + ".smt2");
    write_file(*script, prover::emit_smtlib(vc, tm));
  }

  prover::Verdict v;
  if (cfg.backend == Backend::Builtin) {
    prover::ProverConfig pc;
    pc.timeout = std::chrono::milliseconds(cfg.timeout_ms);
    pc.rounds = cfg.rounds;
    pc.functions = functions;
    v = prover::prove(vc, tm, pc);
  } else {
    std::string path = script ? script->string() : temp_script_path();
    auto ext = prover::run_external(vc, tm, cfg.solver_command.value_or(""), path,
                                    std::chrono::milliseconds(cfg.timeout_ms));
    if (!script) fs::remove(path);
    v = std::move(ext.verdict);
    if (ext.solver_failed) {
      file.diagnostics.push_back({vc.span, Severity::Error, codes::kSolverError, ext.message});
      exit = combine_exit(exit, exit_code::kSolverFailure);
    } else if (!ext.message.empty()) {
      file.diagnostics.push_back({vc.span, Severity::Warning, codes::kSolverError, ext.message});
    }
  }

  r.verdict = v.kind;
  if (v.kind == VK::Unknown) r.reason = v.reason.empty() ? prover::reason::kExternalUnknown : v.reason;
  if (v.kind != VK::Proved) exit = combine_exit(exit, exit_code::kVerificationFailed);
  if (v.kind == VK::Counterexample) {
    r.model = replay::with_input_defaults(tp, vc.method, v.model);
    describe_model(r, tp, vc.method);
    if (cfg.replay) r.replay = replay::replay(tp, vc.method, r.model, {vc.kind, vc.span});
  }
}

void sort_diagnostics(std::vector<Diagnostic>& ds) {
  std::stable_sort(ds.begin(), ds.end(),
                   [](const Diagnostic& a, const Diagnostic& b) { return before(a.span, b.span); });
}

}  // namespace

FileResult verify_source(const std::string& source, const std::string& path, const RunConfig& cfg,
                         int& exit) {
  FileResult file;
  file.path = path;
  try {
    auto parsed = frontend::parse_source(source, path);
    file.diagnostics = parsed.diagnostics;
    if (!parsed.program) {
      exit = combine_exit(exit, exit_code::kInputErrors);
      sort_diagnostics(file.diagnostics);
      return file;
    }
    auto checked = typecheck::resolve_and_check(std::move(*parsed.program));
    for (auto& d : checked.diagnostics) file.diagnostics.push_back(d);
    if (!checked.typed) {
      for (const auto& d : file.diagnostics) exit = combine_exit(exit, exit_for(d));
      sort_diagnostics(file.diagnostics);
      return file;
    }
    const typecheck::TypedProgram& tp = *checked.typed;
    // Ghost and frame errors fail the run but leave the VCs meaningful.
    for (auto& d : typecheck::check_ghost_usage(tp)) file.diagnostics.push_back(d);
    for (auto& d : typecheck::check_frames(tp)) file.diagnostics.push_back(d);

    logic::TermManager tm;
    ir::Translator tr(tm, tp);
    auto lowered = ir::lower_program(tp, tr);
    for (auto& d : lowered.diagnostics) file.diagnostics.push_back(d);
    std::ostringstream debug;
    vcgen::VcOptions vo;
    vo.fuel = cfg.fuel;
    for (const auto& g : lowered.graphs) {
      if (cfg.emit_gc) debug << ir::dump(g);
      MethodResult mr;
      mr.name = g.name;
      for (const auto& vc : vcgen::generate(g, tr, vo)) {
        if (cfg.emit_vc) debug << vcgen::dump(vc);
        VcResult r;
        r.id = vc.id;
        r.kind = vc.kind;
        r.span = vc.span;
        r.message = vc.description;
        run_vc(vc, tm, &tr.functions(), tp, cfg, r, file, exit);
        mr.vcs.push_back(std::move(r));
      }
      file.methods.push_back(std::move(mr));
    }
    file.debug = debug.str();
  } catch (const std::exception& e) {
    file.diagnostics.push_back({Span{path, 1, 1, 1, 1}, Severity::Error, codes::kInternal,
                                std::string("internal error: ") + e.what()});
  }
  for (const auto& d : file.diagnostics) exit = combine_exit(exit, exit_for(d));
  sort_diagnostics(file.diagnostics);
  return file;
}

Report verify(const RunConfig& cfg) {
  Report rep;
  int exit = exit_code::kOk;
  for (const auto& path : cfg.inputs) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      FileResult f;
      f.path = path;
      f.diagnostics.push_back({Span{path, 1, 1, 1, 1}, Severity::Error, codes::kIo, "cannot read file"});
      exit = combine_exit(exit, exit_code::kInputErrors);
      rep.files.push_back(std::move(f));
      continue;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    rep.files.push_back(verify_source(ss.str(), path, cfg, exit));
  }
  for (const auto& f : rep.files) {
    for (const auto& d : f.diagnostics)
      if (d.severity == Severity::Error) ++rep.summary.errors;
    for (const auto& m : f.methods)
      for (const auto& v : m.vcs) {
        if (v.verdict == VK::Proved) ++rep.summary.proved;
        else if (v.verdict == VK::Counterexample) ++rep.summary.failed;
        else ++rep.summary.unknown;
      }
  }
  rep.exit_code = exit;
  return rep;
}

namespace {

std::string vc_message(const VcResult& v) {
  if (v.verdict == VK::Unknown) return v.message + " (could not be decided: " + v.reason + ")";
  return v.message;
}

std::string replay_text(const replay::Outcome& o) { return "replay " + replay::to_string(o); }

}  // namespace

std::string to_human(const Report& r) {
  std::ostringstream os;
  for (const auto& f : r.files) {
    struct Entry {
      Span span;
      std::vector<Diagnostic> lines;
    };
    std::vector<Entry> entries;
    for (const auto& d : f.diagnostics) entries.push_back({d.span, {d}});
    for (const auto& m : f.methods)
      for (const auto& v : m.vcs) {
        if (v.verdict == VK::Proved) continue;
        Entry e{v.span, {}};
        e.lines.push_back({v.span, Severity::Error, std::string(ir::kind_code(v.kind)), vc_message(v)});
        for (const auto& line : v.counterexample)
          e.lines.push_back({v.span, Severity::Note, codes::kCounterexample, line});
        if (v.replay) e.lines.push_back({v.span, Severity::Note, codes::kReplay, replay_text(*v.replay)});
        entries.push_back(std::move(e));
      }
    std::stable_sort(entries.begin(), entries.end(),
                     [](const Entry& a, const Entry& b) { return before(a.span, b.span); });
    for (const auto& e : entries)
      for (const auto& d : e.lines) os << d.format() << '\n';
  }
  return os.str();
}

namespace {

Json model_json(const VcResult& v) {
  Json out = Json::object();
  for (const auto& n : v.model_names) {
    if (auto a = v.model.arrays.find(n); a != v.model.arrays.end()) {
      const prover::ArrayValue& av = a->second;
      if (av.is_null) {
        out[n] = nullptr;
        continue;
      }
      Json elems = Json::array();
      for (std::int64_t i = 0; i < av.length && i < 1000; ++i) {
        auto e = av.entries.find(i);
        std::int64_t x = e == av.entries.end() ? av.default_value : e->second;
        if (av.bool_elements) elems.push_back(x != 0);
        else elems.push_back(x);
      }
      out[n] = Json{{"length", av.length}, {"elements", std::move(elems)}};
    } else if (auto i = v.model.ints.find(n); i != v.model.ints.end()) {
      out[n] = i->second;
    } else if (auto b = v.model.bools.find(n); b != v.model.bools.end()) {
      out[n] = b->second;
    }
  }
  return out;
}

}  // namespace

std::string to_json(const Report& r) {
  Json files = Json::array();
  for (const auto& f : r.files) {
    Json methods = Json::array();
    for (const auto& m : f.methods) {
      Json vcs = Json::array();
      for (const auto& v : m.vcs) {
        Json j{{"id", v.id},
               {"kind", std::string(ir::kind_name(v.kind))},
               {"line", v.span.start_line},
               {"col", v.span.start_col},
               {"verdict", std::string(prover::to_string(v.verdict))},
               {"message", vc_message(v)}};
        if (v.verdict == VK::Unknown) j["reason"] = v.reason;
        if (v.verdict == VK::Counterexample) j["counterexample"] = model_json(v);
        if (v.replay) {
          Json rj{{"outcome", std::string(replay::kind_name(v.replay->kind))}};
          if (!v.replay->detail.empty()) rj["detail"] = v.replay->detail;
          j["replay"] = std::move(rj);
        }
        vcs.push_back(std::move(j));
      }
      methods.push_back(Json{{"name", m.name}, {"vcs", std::move(vcs)}});
    }
    Json diags = Json::array();
    for (const auto& d : f.diagnostics)
      diags.push_back(Json{{"code", d.code},
                           {"severity", std::string(to_string(d.severity))},
                           {"line", d.span.start_line},
                           {"col", d.span.start_col},
                           {"message", d.message}});
    files.push_back(Json{{"path", f.path}, {"methods", std::move(methods)}, {"diagnostics", std::move(diags)}});
  }
  Json out{{"version", kReportVersion},
           {"files", std::move(files)},
           {"summary", Json{{"proved", r.summary.proved},
                            {"failed", r.summary.failed},
                            {"unknown", r.summary.unknown},
                            {"errors", r.summary.errors}}}};
  return out.dump(2) + "\n";
}

namespace {

using Key = std::tuple<std::string, int, int>;

std::string keys_text(const std::vector<Key>& keys) {
  std::string s = "[";
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (i) s += ", ";
    s += std::get<0>(keys[i]) + "@" + std::to_string(std::get<1>(keys[i])) + ":" +
         std::to_string(std::get<2>(keys[i]));
  }
  return s + "]";
}

// Error-level findings of a report, as (code, line, col).
std::vector<Key> error_keys(const Report& r) {
  std::vector<Key> keys;
  for (const auto& f : r.files) {
    for (const auto& d : f.diagnostics)
      if (d.severity == Severity::Error) keys.emplace_back(d.code, d.span.start_line, d.span.start_col);
    for (const auto& m : f.methods)
      for (const auto& v : m.vcs)
        if (v.verdict != VK::Proved)
          keys.emplace_back(std::string(ir::kind_code(v.kind)), v.span.start_line, v.span.start_col);
  }
  std::sort(keys.begin(), keys.end());
  return keys;
}

}  // namespace

int run_corpus(const std::string& manifest_path, std::ostream& out, const RunConfig& base) {
  std::ifstream in(manifest_path);
  if (!in) {
    out << manifest_path << ": cannot read manifest\n";
    return 1;
  }
  Json manifest;
  try {
    manifest = Json::parse(in);
  } catch (const std::exception& e) {
    out << manifest_path << ": invalid manifest: " << e.what() << '\n';
    return 1;
  }
  fs::path dir = fs::path(manifest_path).parent_path();
  int mismatches = 0;
  for (const auto& entry : manifest.value("entries", Json::array())) {
    std::string file = entry.value("file", "");
    int expected_exit = entry.value("exit", 0);
    RunConfig cfg = base;
    cfg.inputs = {(dir / file).string()};
    cfg.json = false;
    if (!fs::exists(cfg.inputs[0])) {
      out << "- " << file << ": file not found\n";
      ++mismatches;
      continue;
    }
    Report rep = verify(cfg);
    std::vector<Key> got = error_keys(rep);
    bool ok = rep.exit_code == expected_exit;
    std::vector<Key> want;
    if (entry.contains("diagnostics")) {
      for (const auto& d : entry["diagnostics"])
        want.emplace_back(d.value("code", ""), d.value("line", 0), d.value("col", 0));
      std::sort(want.begin(), want.end());
      ok = ok && want == got;
    }
    if (!ok) {
      ++mismatches;
      out << "- " << file << ": expected exit " << expected_exit;
      if (entry.contains("diagnostics")) out << ' ' << keys_text(want);
      out << ", got exit " << rep.exit_code << ' ' << keys_text(got) << '\n';
    }
  }
  return mismatches == 0 ? 0 : 1;
}

}  // namespace minidafny::driver
