#pragma once

// JSON forms of the domain types, shared by the HTTP API, the CLI and the
// Python bindings. Conversions follow the nlohmann ADL convention, so
// `nlohmann::json j = sentence;` and `j.get<Sentence>()` both work.

#include <json.hpp>

#include "boat/agreement.hpp"
#include "boat/conllu.hpp"
#include "boat/errors.hpp"
#include "boat/layout.hpp"
#include "boat/search.hpp"
#include "boat/store.hpp"
#include "boat/validation.hpp"

namespace boat {

using json = nlohmann::json;

void to_json(json& j, const Token& token);
void from_json(const json& j, Token& token);
void to_json(json& j, const MultiwordToken& mwt);
void from_json(const json& j, MultiwordToken& mwt);

/// Unset columns are null; FEATS, DEPS and MISC travel as their column
/// strings. On input, `sent_id` and `text` win over the matching comments,
/// which are rewritten (or, for a missing "# text", added) to agree.
void to_json(json& j, const Sentence& sent);
void from_json(const json& j, Sentence& sent);

void to_json(json& j, const ValidationIssue& issue);
void to_json(json& j, const Match& match);
void to_json(json& j, const Point& point);
void to_json(json& j, const ArcDiagram& diagram);
void to_json(json& j, const AgreementReport& report);
void to_json(json& j, const Treebank& treebank);
void to_json(json& j, const Annotator& annotator);
void to_json(json& j, const SentenceSummary& summary);
void to_json(json& j, const SentencePage& page);

/// A record with its CoNLL-U text and current validation issues.
void to_json(json& j, const AnnotationRecord& record);

/// Error envelope {code, message, details}.
json error_envelope(const Error& error);

}  // namespace boat
