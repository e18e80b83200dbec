#include "stacklab/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <fstream>
#include <iostream>

#include "stacklab/enumerator.hpp"
#include "stacklab/json_io.hpp"

namespace stacklab::cli {

using io::json;
using words::AlternatingWord;
using words::Factor;
using words::Word;

namespace {

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InputError("bad JSON in " + path + ": " + e.what());
  }
  return j;
}

// Word arguments are inline syntax when they contain ':', else file paths.
Word load_word_arg(const std::string& arg, io::SymbolTable& symbols) {
  if (arg.find(':') != std::string::npos) return io::parse_inline_word(arg, symbols);
  return io::word_from_json(load_json_file(arg));
}

AlternatingWord standard_form(const Word& w) {
  auto red = words::cyclic_reduce(words::reduce(w));
  return red.word;
}

void emit(std::ostream& out, const json& j) { out << j.dump(2) << "\n"; }

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::InputError:
      return 2;
    case ErrorKind::Precondition:
      return 3;
    case ErrorKind::Verification:
      return 1;
    case ErrorKind::Internal:
      return 1;
  }
  return 1;
}

}  // namespace

Config load_config(const std::string& config_path) {
  Config cfg;
  if (!config_path.empty()) {
    json j = load_json_file(config_path);
    if (j.contains("retry_limit")) cfg.stacker.retry_limit = j["retry_limit"].get<int>();
    if (j.contains("seed")) cfg.stacker.seed = j["seed"].get<unsigned long long>();
    if (j.contains("carried_delta"))
      cfg.stacker.carried_delta = rat_from_string(j["carried_delta"].get<std::string>());
    if (j.contains("gap_epsilon"))
      cfg.stacker.gap_epsilon = rat_from_string(j["gap_epsilon"].get<std::string>());
    if (j.contains("juncture_cap")) cfg.juncture_cap = j["juncture_cap"].get<int>();
    if (j.contains("search_budget")) cfg.search_budget = j["search_budget"].get<long long>();
  }
  if (const char* env = std::getenv("STACKLAB_SEED")) {
    try {
      cfg.stacker.seed = std::stoull(env);
    } catch (const std::exception&) {
      throw InputError("STACKLAB_SEED must be an unsigned integer");
    }
  }
  return cfg;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"exact relative stackings and admissible-surface audits"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON config overriding caps and retry limits");

  // word ----------------------------------------------------------------
  auto* word_cmd = app.add_subcommand("word", "word algebra utilities");
  word_cmd->require_subcommand(1);
  std::string word_arg;
  auto* w_reduce = word_cmd->add_subcommand("reduce", "free-product normal form");
  w_reduce->add_option("word", word_arg)->required();
  auto* w_cyc = word_cmd->add_subcommand("cyclic-reduce", "cyclically reduced A-first form");
  w_cyc->add_option("word", word_arg)->required();
  auto* w_pow = word_cmd->add_subcommand("power", "maximal proper-power root");
  w_pow->add_option("word", word_arg)->required();
  auto* w_pre = word_cmd->add_subcommand("prefixes", "the |w| nonempty prefixes");
  w_pre->add_option("word", word_arg)->required();

  // stack ----------------------------------------------------------------
  auto* stack_cmd = app.add_subcommand("stack", "build and verify a relative stacking");
  std::string stack_word, stack_out, stack_plan;
  stack_cmd->add_option("word", stack_word)->required();
  stack_cmd->add_option("--out", stack_out, "write the certificate JSON here");
  stack_cmd->add_option("--plan", stack_plan, "dump per-pair arrangement plans here");

  // verify ---------------------------------------------------------------
  auto* verify_cmd = app.add_subcommand("verify", "independent stability check of a certificate");
  std::string verify_path;
  verify_cmd->add_option("cert", verify_path)->required();

  // audit ----------------------------------------------------------------
  auto* audit_cmd = app.add_subcommand("audit", "spectral-gap audit of one surface");
  std::string audit_surface, audit_cert;
  audit_cmd->add_option("surface", audit_surface)->required();
  audit_cmd->add_option("cert", audit_cert)->required();

  // sweep ----------------------------------------------------------------
  auto* sweep_cmd = app.add_subcommand("sweep", "exhaustive bounded-degree audit");
  std::string sweep_word, sweep_cert;
  int sweep_degree = 2;
  int sweep_jobs = std::max(1, int(std::thread::hardware_concurrency()));
  sweep_cmd->add_option("word", sweep_word)->required();
  sweep_cmd->add_option("--max-degree", sweep_degree);
  sweep_cmd->add_option("--jobs", sweep_jobs, "sweep parallelism (default: available cores)");
  sweep_cmd->add_option("--cert", sweep_cert, "reuse a certificate instead of rebuilding");

  // search ---------------------------------------------------------------
  auto* search_cmd = app.add_subcommand("search", "bounded normal-closure equation search");
  std::string search_target, search_word;
  int max_k = 2, max_conj = 4, max_exp = 2;
  search_cmd->add_option("target", search_target)->required();
  search_cmd->add_option("word", search_word)->required();
  search_cmd->add_option("--max-k", max_k);
  search_cmd->add_option("--max-conj", max_conj);
  search_cmd->add_option("--max-exp", max_exp);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return 2;
  }

  try {
    Config cfg = load_config(config_path);

    if (word_cmd->parsed()) {
      io::SymbolTable symbols;
      Word w = load_word_arg(word_arg, symbols);
      if (w_reduce->parsed()) {
        Word r = words::reduce(w);
        emit(out, json{{"word", io::word_to_json(r)},
                       {"identity", r.empty()},
                       {"symbols", symbols.to_json()}});
      } else if (w_cyc->parsed()) {
        auto red = words::cyclic_reduce(words::reduce(w));
        emit(out, json{{"word", io::word_to_json(red.word.as_word())},
                       {"conjugator", io::word_to_json(red.conjugator)},
                       {"symbols", symbols.to_json()}});
      } else if (w_pow->parsed()) {
        AlternatingWord aw = AlternatingWord::from_word(words::reduce(w));
        auto root = words::is_proper_power(aw);
        if (root)
          emit(out, json{{"root", io::word_to_json(root->first.as_word())},
                         {"k", root->second},
                         {"symbols", symbols.to_json()}});
        else
          emit(out, json{{"root", nullptr}, {"k", 1}, {"symbols", symbols.to_json()}});
      } else {
        AlternatingWord aw = AlternatingWord::from_word(words::reduce(w));
        json list = json::array();
        for (const auto& [id, p] : words::prefixes(aw))
          list.push_back(json{{"id", id}, {"word", io::word_to_json(p)}});
        emit(out, json{{"prefixes", list}, {"symbols", symbols.to_json()}});
      }
      return 0;
    }

    if (stack_cmd->parsed()) {
      io::SymbolTable symbols;
      AlternatingWord w = standard_form(load_word_arg(stack_word, symbols));
      auto cert = stacker::build_stacking(w, cfg.stacker);
      auto verdict = actions::verify_certificate(cert);
      if (!verdict.ok()) throw InternalCheckFailed("emitted certificate failed verification");
      json cj = io::cert_to_json(cert);
      cj["symbols"] = symbols.to_json();
      if (!stack_out.empty()) {
        std::ofstream f(stack_out);
        if (!f) throw InputError("cannot write " + stack_out);
        f << cj.dump(2) << "\n";
      }
      if (!stack_plan.empty()) {
        json plans = json::array();
        for (const auto& pr : words::prefix_pairs(w)) {
          AlternatingWord rot = AlternatingWord::from_word(
              words::reduce(pr.w1.inverse() * w.as_word() * pr.w1));
          auto sol = stacker::solve_simple(rot, pr.j - pr.i, cfg.stacker);
          plans.push_back(io::plan_to_json(sol.plan));
        }
        std::ofstream f(stack_plan);
        if (!f) throw InputError("cannot write " + stack_plan);
        f << plans.dump(2) << "\n";
      }
      emit(out, cj);
      return 0;
    }

    if (verify_cmd->parsed()) {
      auto cert = io::cert_from_json(load_json_file(verify_path));
      // Stored-table duplicates are named first, then closure, then
      // table/trajectory mismatches.
      for (auto i = cert.lambda.begin(); i != cert.lambda.end(); ++i) {
        for (auto j = std::next(i); j != cert.lambda.end(); ++j) {
          if (i->second == j->second) {
            emit(out, json{{"verdict", "duplicate"}, {"p1", i->first}, {"p2", j->first}});
            return 1;
          }
        }
      }
      auto traj = actions::trajectory(cert.action, cert.word, cert.base);
      if (traj.points.back() != cert.base) {
        emit(out, json{{"verdict", "not_closed"},
                       {"final", rat_to_string(traj.points.back())}});
        return 1;
      }
      auto verdict = actions::verify_certificate(cert);
      if (!verdict.lambda_matches) {
        emit(out, json{{"verdict", "lambda-mismatch"}, {"prefix", verdict.first_mismatch}});
        return 1;
      }
      if (!verdict.stability.stable()) {
        emit(out, json{{"verdict", verdict.stability.str()}});
        return 1;
      }
      emit(out, json{{"verdict", "stable"}});
      return 0;
    }

    if (audit_cmd->parsed()) {
      auto surface = io::surface_from_json(load_json_file(audit_surface));
      auto cert = io::cert_from_json(load_json_file(audit_cert));
      auto rep = surf::audit(surface, cert);
      emit(out, io::audit_to_json(rep));
      return 0;
    }

    if (sweep_cmd->parsed()) {
      io::SymbolTable symbols;
      AlternatingWord w = standard_form(load_word_arg(sweep_word, symbols));
      actions::StackingCertificate cert =
          sweep_cert.empty() ? stacker::build_stacking(w, cfg.stacker)
                             : io::cert_from_json(load_json_file(sweep_cert));
      auto rep = enumerate::sweep_audit(w, cert, sweep_degree, cfg.juncture_cap, sweep_jobs);
      emit(out, io::sweep_to_json(rep));
      return rep.counterexamples.empty() && rep.check_violations.empty() ? 0 : 1;
    }

    if (search_cmd->parsed()) {
      io::SymbolTable symbols;
      Word target_w = load_word_arg(search_target, symbols);
      Word w = load_word_arg(search_word, symbols);
      Word tr = words::reduce(target_w);
      if (tr.size() != 1) throw InputError("search target must lie in one factor");
      int rank_a = 1, rank_b = 1;
      for (const Word* wp : {&tr, &w})
        for (const auto& l : wp->letters)
          (l.factor() == Factor::A ? rank_a : rank_b) =
              std::max(l.factor() == Factor::A ? rank_a : rank_b, l.max_gen());
      auto sols = enumerate::search_equations(tr.letters[0], w, max_k, max_conj, max_exp,
                                              cfg.search_budget, rank_a, rank_b);
      emit(out, json{{"solutions", io::solutions_to_json(sols)},
                     {"count", sols.size()},
                     {"symbols", symbols.to_json()}});
      return 0;
    }
  } catch (const words::FactorConjugate& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  err << "no subcommand\n";
  return 2;
}

}  // namespace stacklab::cli
