#include "stacklab/json_io.hpp"

#include <sstream>

namespace stacklab::io {

using words::AlternatingWord;
using words::Factor;
using words::FactorElement;
using words::Syllable;
using words::Word;

int SymbolTable::intern(Factor f, const std::string& name) {
  auto& names = f == Factor::A ? a_names : b_names;
  for (size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return int(i) + 1;
  names.push_back(name);
  return int(names.size());
}

json SymbolTable::to_json() const {
  return json{{"A", a_names}, {"B", b_names}};
}

Word parse_inline_word(const std::string& text, SymbolTable& symbols) {
  std::istringstream in(text);
  std::string tok;
  std::vector<FactorElement> letters;
  while (in >> tok) {
    if (tok == "1" || tok == "id") continue;
    if (tok.size() < 3 || (tok[0] != 'A' && tok[0] != 'B') || tok[1] != ':')
      throw InputError("bad word token (expected A:name or B:name^exp): " + tok);
    Factor f = tok[0] == 'A' ? Factor::A : Factor::B;
    std::string rest = tok.substr(2);
    // A letter may pack several syllables separated by '.', e.g. "A:x.y^-1".
    std::vector<Syllable> sylls;
    std::istringstream parts(rest);
    std::string part;
    while (std::getline(parts, part, '.')) {
      long long exp = 1;
      auto caret = part.find('^');
      std::string name = part.substr(0, caret);
      if (caret != std::string::npos) {
        try {
          exp = std::stoll(part.substr(caret + 1));
        } catch (const std::exception&) {
          throw InputError("bad exponent in token: " + tok);
        }
      }
      if (name.empty()) throw InputError("empty generator name in token: " + tok);
      sylls.push_back({symbols.intern(f, name), exp});
    }
    letters.emplace_back(f, std::move(sylls));
  }
  return Word(std::move(letters));
}

json word_to_json(const Word& w) {
  int rank_a = 1, rank_b = 1;
  json sylls = json::array();
  for (const auto& l : w.letters) {
    json entry = json::array();
    entry.push_back(l.factor() == Factor::A ? "A" : "B");
    json list = json::array();
    for (const auto& s : l.syllables()) {
      list.push_back(json::array({s.gen, s.exp}));
      (l.factor() == Factor::A ? rank_a : rank_b) =
          std::max(l.factor() == Factor::A ? rank_a : rank_b, s.gen);
    }
    entry.push_back(list);
    sylls.push_back(entry);
  }
  return json{{"factors", {{"A", rank_a}, {"B", rank_b}}}, {"syllables", sylls}};
}

Word word_from_json(const json& j) {
  if (!j.contains("syllables") || !j["syllables"].is_array())
    throw InputError("word JSON needs a syllables array");
  std::vector<FactorElement> letters;
  for (const auto& entry : j["syllables"]) {
    if (!entry.is_array() || entry.size() != 2) throw InputError("bad word syllable entry");
    std::string tag = entry[0].get<std::string>();
    if (tag != "A" && tag != "B") throw InputError("bad factor tag: " + tag);
    Factor f = tag == "A" ? Factor::A : Factor::B;
    std::vector<Syllable> sylls;
    for (const auto& p : entry[1]) {
      if (!p.is_array() || p.size() != 2) throw InputError("bad syllable pair");
      sylls.push_back({p[0].get<int>(), p[1].get<long long>()});
    }
    letters.emplace_back(f, std::move(sylls));
  }
  return Word(std::move(letters));
}

json plh_to_json(const pl::PLHomeo& h) {
  json bps = json::array();
  for (const auto& [x, y] : h.breakpoints())
    bps.push_back(json::array({rat_to_string(x), rat_to_string(y)}));
  return json{{"breakpoints", bps}};
}

pl::PLHomeo plh_from_json(const json& j) {
  if (!j.contains("breakpoints")) throw InputError("PL map JSON needs breakpoints");
  std::vector<std::pair<Rat, Rat>> bps;
  for (const auto& p : j["breakpoints"]) {
    if (!p.is_array() || p.size() != 2) throw InputError("bad breakpoint pair");
    bps.emplace_back(rat_from_string(p[0].get<std::string>()),
                     rat_from_string(p[1].get<std::string>()));
  }
  try {
    return pl::PLHomeo::from_breakpoints(std::move(bps));
  } catch (const MonotonicityViolation& e) {
    throw InputError(std::string("invalid PL map: ") + e.what());
  }
}

json cert_to_json(const actions::StackingCertificate& cert) {
  json gens_a = json::object(), gens_b = json::object();
  for (const auto& [g, h] : cert.action.a.gens) gens_a[std::to_string(g)] = plh_to_json(h);
  for (const auto& [g, h] : cert.action.b.gens) gens_b[std::to_string(g)] = plh_to_json(h);
  json lambda = json::object();
  for (const auto& [p, val] : cert.lambda) lambda[std::to_string(p)] = rat_to_string(val);
  return json{{"word", word_to_json(cert.word.as_word())},
              {"base", rat_to_string(cert.base)},
              {"generators", {{"A", gens_a}, {"B", gens_b}}},
              {"lambda", lambda}};
}

actions::StackingCertificate cert_from_json(const json& j) {
  for (const char* key : {"word", "base", "generators", "lambda"})
    if (!j.contains(key)) throw InputError(std::string("certificate JSON missing ") + key);
  Word w = word_from_json(j["word"]);
  AlternatingWord aw = AlternatingWord::from_word(w);
  actions::ProductAction act;
  const json& gens = j["generators"];
  auto load = [&](const char* tag, actions::FactorAction& fa) {
    if (!gens.contains(tag)) return;
    for (auto it = gens[tag].begin(); it != gens[tag].end(); ++it)
      fa.gens[std::stoi(it.key())] = plh_from_json(it.value());
  };
  load("A", act.a);
  load("B", act.b);
  actions::StackingCertificate cert{aw, act, rat_from_string(j["base"].get<std::string>()), {}};
  for (auto it = j["lambda"].begin(); it != j["lambda"].end(); ++it)
    cert.lambda[std::stoi(it.key())] = rat_from_string(it.value().get<std::string>());
  return cert;
}

json surface_to_json(const surf::NormalFormSurface& s) {
  json bs = json::array();
  for (const auto& b : s.boundaries()) bs.push_back(b.exponent);
  json arcs = json::array();
  for (const auto& [j1, j2] : s.matching())
    arcs.push_back(json::array({json::array({j1.boundary, j1.position}),
                                json::array({j2.boundary, j2.position})}));
  json out{{"word", word_to_json(s.word().as_word())}, {"boundaries", bs}, {"matching", arcs}};
  if (!s.annulus_overrides().empty()) {
    json fl = json::array();
    for (int i : s.annulus_overrides()) fl.push_back(i);
    out["force_annulus"] = fl;
  }
  return out;
}

surf::NormalFormSurface surface_from_json(const json& j) {
  for (const char* key : {"word", "boundaries", "matching"})
    if (!j.contains(key)) throw InputError(std::string("surface JSON missing ") + key);
  AlternatingWord w = AlternatingWord::from_word(word_from_json(j["word"]));
  std::vector<surf::WBoundary> bs;
  for (const auto& n : j["boundaries"]) bs.push_back(surf::WBoundary{n.get<int>()});
  std::vector<surf::Arc> arcs;
  for (const auto& a : j["matching"]) {
    if (!a.is_array() || a.size() != 2) throw InputError("bad matching entry");
    auto jun = [](const json& x) {
      return surf::JunctureId{x[0].get<int>(), x[1].get<int>()};
    };
    arcs.push_back({jun(a[0]), jun(a[1])});
  }
  std::set<int> overrides;
  if (j.contains("force_annulus"))
    for (const auto& i : j["force_annulus"]) overrides.insert(i.get<int>());
  return surf::NormalFormSurface(w, bs, arcs, overrides);
}

json audit_to_json(const surf::AuditReport& rep) {
  json pieces = json::array();
  for (const auto& p : rep.pieces) {
    pieces.push_back(json{{"side", p.side == Factor::A ? "A" : "B"},
                          {"d", p.valence},
                          {"kind", p.disk ? "disk" : "annulus"},
                          {"winding", p.winding.str()},
                          {"sc", p.sc}});
  }
  std::string verdict;
  switch (rep.verdict) {
    case surf::AuditReport::Verdict::Holds:
      verdict = "holds";
      break;
    case surf::AuditReport::Verdict::Violated:
      verdict = "violated";
      break;
    case surf::AuditReport::Verdict::NotApplicable:
      verdict = "not-applicable";
      break;
  }
  json out{{"degree", rep.degree},
           {"euler_neg", rep.euler_neg},
           {"verdict", verdict},
           {"consistent_segments", rep.consistent_total},
           {"inconsistent_segments", rep.inconsistent_total},
           {"pieces", pieces},
           {"check_violations", rep.check_violations}};
  if (rep.witness) {
    out["witness"] = json{
        {"arc", rep.witness->arc},
        {"junctures", json::array({json::array({rep.witness->j1.boundary, rep.witness->j1.position}),
                                   json::array({rep.witness->j2.boundary, rep.witness->j2.position})})}};
  }
  return out;
}

json sweep_to_json(const enumerate::SweepReport& rep) {
  json ces = json::array();
  for (const auto& c : rep.counterexamples) {
    json arcs = json::array();
    for (const auto& [j1, j2] : c.matching)
      arcs.push_back(json::array({json::array({j1.boundary, j1.position}),
                                  json::array({j2.boundary, j2.position})}));
    ces.push_back(json{{"exponents", c.exponents},
                       {"matching", arcs},
                       {"euler_neg", c.euler_neg},
                       {"degree", c.degree}});
  }
  json out{{"word", rep.word},
           {"max_degree", rep.max_degree},
           {"surfaces", rep.surfaces},
           {"witness_free", rep.witness_free},
           {"counterexamples", ces},
           {"check_violations", rep.check_violations},
           {"checked_pieces", rep.checked_pieces}};
  if (rep.min_slack)
    out["min_slack"] = *rep.min_slack;
  else
    out["min_slack"] = nullptr;
  return out;
}

json plan_to_json(const stacker::ArrangementPlan& plan) {
  json anchors = json::object();
  for (const auto& [name, val] : plan.anchors) anchors[name] = rat_to_string(val);
  json blocks = json::array();
  for (int t = 0; t < plan.blocks.size(); ++t) {
    auto b = plan.blocks.block(t);
    blocks.push_back(json{{"name", plan.blocks.tags[size_t(t)].name},
                          {"family", plan.blocks.tags[size_t(t)].family == Factor::A ? "A" : "B"},
                          {"lo", rat_to_string(b.lo)},
                          {"hi", rat_to_string(b.hi)}});
  }
  return json{{"kind", plan.kind}, {"anchors", anchors}, {"blocks", blocks}};
}

json solutions_to_json(const std::vector<enumerate::EquationSolution>& sols) {
  json out = json::array();
  for (const auto& s : sols) {
    json terms = json::array();
    for (const auto& [g, n] : s.terms)
      terms.push_back(json{{"conjugator", word_to_json(g)}, {"exponent", n}});
    out.push_back(json{{"k", s.k}, {"terms", terms}});
  }
  return out;
}

}  // namespace stacklab::io
