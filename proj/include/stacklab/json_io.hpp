#pragma once

#include <json.hpp>

#include <string>

#include "stacklab/actions.hpp"
#include "stacklab/enumerator.hpp"
#include "stacklab/stacker.hpp"
#include "stacklab/surfaces.hpp"
#include "stacklab/words.hpp"

namespace stacklab::io {

using nlohmann::json;

// Generator names per factor for the human-writable inline syntax
// "A:x B:y A:x^-2 ...": names map to indices in order of first appearance.
struct SymbolTable {
  std::vector<std::string> a_names, b_names;
  int intern(words::Factor f, const std::string& name);
  json to_json() const;
};

words::Word parse_inline_word(const std::string& text, SymbolTable& symbols);

json word_to_json(const words::Word& w);
words::Word word_from_json(const json& j);

json plh_to_json(const pl::PLHomeo& h);
pl::PLHomeo plh_from_json(const json& j);

json cert_to_json(const actions::StackingCertificate& cert);
actions::StackingCertificate cert_from_json(const json& j);

json surface_to_json(const surf::NormalFormSurface& s);
surf::NormalFormSurface surface_from_json(const json& j);

json audit_to_json(const surf::AuditReport& rep);
json sweep_to_json(const enumerate::SweepReport& rep);
json plan_to_json(const stacker::ArrangementPlan& plan);
json solutions_to_json(const std::vector<enumerate::EquationSolution>& sols);

}  // namespace stacklab::io
