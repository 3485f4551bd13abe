#include "boat/agreement.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_map>

#include "boat/errors.hpp"
#include "boat/store.hpp"

namespace boat {
namespace {

std::string label_of(const std::optional<std::string>& value) { return value ? *value : "_"; }

std::string label_of(const Token& token, AgreementField field) {
  switch (field) {
    case AgreementField::Upos: return label_of(token.upos);
    case AgreementField::Xpos: return label_of(token.xpos);
    case AgreementField::Deprel: return label_of(token.deprel);
    case AgreementField::Feats: return serialize_feats(token.feats);
    case AgreementField::Lemma: return label_of(token.lemma);
  }
  return "_";
}

bool same_tokenization(const Sentence& a, const Sentence& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.tokens[i].form != b.tokens[i].form) return false;
  }
  return true;
}

struct Layer {
  // sent_id -> (document position, sentence) for Complete records only
  std::unordered_map<std::string, std::pair<std::size_t, Sentence>> complete;
};

Layer load_complete(const Store& store, std::string_view treebank_id,
                    std::string_view annotator_id,
                    const std::unordered_map<std::string, std::size_t>& positions) {
  Layer layer;
  auto& backend = store.backend();
  for (const auto& row : backend.records(treebank_id, annotator_id)) {
    if (row.status != Status::Complete) continue;
    const auto pos = positions.at(row.sent_id);
    layer.complete.emplace(row.sent_id,
                           std::make_pair(pos, parse_sentence(row.conllu, 1, std::to_string(pos + 1))));
  }
  return layer;
}

std::unordered_map<std::string, std::size_t> document_positions(const Store& store,
                                                                std::string_view treebank_id) {
  std::unordered_map<std::string, std::size_t> positions;
  auto& backend = store.backend();
  for (const auto& base : backend.base_sentences(treebank_id)) {
    positions.emplace(base.sent_id, base.position);
  }
  return positions;
}

AgreementReport compare_layers(const Layer& a, const Layer& b, std::string id_a, std::string id_b,
                               std::span<const AgreementField> fields) {
  std::vector<std::pair<std::size_t, SentencePair>> ordered;
  for (const auto& [sent_id, entry] : a.complete) {
    const auto it = b.complete.find(sent_id);
    if (it == b.complete.end()) continue;
    ordered.push_back({entry.first, SentencePair{&entry.second, &it->second.second}});
  }
  std::sort(ordered.begin(), ordered.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  std::vector<SentencePair> pairs;
  pairs.reserve(ordered.size());
  for (const auto& [pos, pair] : ordered) pairs.push_back(pair);
  return compare_annotations(std::move(id_a), std::move(id_b), pairs, fields);
}

}  // namespace

std::string_view agreement_field_name(AgreementField field) {
  switch (field) {
    case AgreementField::Upos: return "UPOS";
    case AgreementField::Xpos: return "XPOS";
    case AgreementField::Deprel: return "DEPREL";
    case AgreementField::Feats: return "FEATS";
    case AgreementField::Lemma: return "LEMMA";
  }
  return "UPOS";
}

std::optional<AgreementField> parse_agreement_field(std::string_view name) {
  for (auto field : all_agreement_fields()) {
    const auto canonical = agreement_field_name(field);
    if (canonical.size() == name.size() &&
        std::equal(canonical.begin(), canonical.end(), name.begin(), [](char x, char y) {
          return x == static_cast<char>(std::toupper(static_cast<unsigned char>(y)));
        })) {
      return field;
    }
  }
  return std::nullopt;
}

std::vector<AgreementField> all_agreement_fields() {
  return {AgreementField::Upos, AgreementField::Xpos, AgreementField::Deprel,
          AgreementField::Feats, AgreementField::Lemma};
}

std::optional<double> cohen_kappa(std::span<const std::string> labels_a,
                                  std::span<const std::string> labels_b) {
  if (labels_a.size() != labels_b.size()) {
    throw Error(ErrorCode::InvalidArgument, "label sequences differ in length");
  }
  const auto n = labels_a.size();
  if (n == 0) return std::nullopt;
  std::size_t agree = 0;
  std::map<std::string_view, std::pair<std::size_t, std::size_t>> marginals;
  for (std::size_t i = 0; i < n; ++i) {
    if (labels_a[i] == labels_b[i]) ++agree;
    ++marginals[labels_a[i]].first;
    ++marginals[labels_b[i]].second;
  }
  const double total = static_cast<double>(n);
  const double p_o = static_cast<double>(agree) / total;
  double p_e = 0.0;
  for (const auto& [label, counts] : marginals) {
    p_e += (static_cast<double>(counts.first) / total) * (static_cast<double>(counts.second) / total);
  }
  if (p_e >= 1.0) return std::nullopt;
  return (p_o - p_e) / (1.0 - p_e);
}

AgreementReport compare_annotations(std::string annotator_a, std::string annotator_b,
                                    std::span<const SentencePair> pairs,
                                    std::span<const AgreementField> fields) {
  AgreementReport report;
  report.annotator_a = std::move(annotator_a);
  report.annotator_b = std::move(annotator_b);

  std::map<AgreementField, std::pair<std::vector<std::string>, std::vector<std::string>>> labels;
  for (auto field : fields) labels[field];
  std::size_t head_matches = 0;
  std::size_t labelled_matches = 0;

  for (const auto& pair : pairs) {
    if (!same_tokenization(*pair.a, *pair.b)) {
      ++report.n_sentences_skipped_tokenization;
      continue;
    }
    ++report.n_sentences_compared;
    for (std::size_t i = 0; i < pair.a->size(); ++i) {
      const Token& ta = pair.a->tokens[i];
      const Token& tb = pair.b->tokens[i];
      ++report.n_tokens;
      for (auto& [field, seqs] : labels) {
        seqs.first.push_back(label_of(ta, field));
        seqs.second.push_back(label_of(tb, field));
      }
      if (ta.head && tb.head) {
        ++report.n_attached_tokens;
        if (*ta.head == *tb.head) {
          ++head_matches;
          if (ta.deprel == tb.deprel) ++labelled_matches;
        }
      }
    }
  }
  if (report.n_sentences_compared == 0) {
    throw Error(ErrorCode::NoComparableSentences,
                "no sentence is Complete for both '" + report.annotator_a + "' and '" +
                    report.annotator_b + "' with matching tokenization");
  }
  for (const auto& [field, seqs] : labels) {
    std::size_t same = 0;
    for (std::size_t i = 0; i < seqs.first.size(); ++i) same += seqs.first[i] == seqs.second[i];
    FieldAgreement stats;
    stats.raw_agreement =
        report.n_tokens == 0 ? 1.0 : static_cast<double>(same) / static_cast<double>(report.n_tokens);
    stats.kappa = cohen_kappa(seqs.first, seqs.second);
    report.per_field[field] = stats;
  }
  if (report.n_attached_tokens > 0) {
    const double denom = static_cast<double>(report.n_attached_tokens);
    report.uas = static_cast<double>(head_matches) / denom;
    report.las = static_cast<double>(labelled_matches) / denom;
  }
  return report;
}

AgreementReport compute_agreement(const Store& store, std::string_view treebank_id,
                                  std::string_view annotator_a, std::string_view annotator_b,
                                  std::span<const AgreementField> fields) {
  store.treebank(treebank_id);
  store.annotator(annotator_a);
  store.annotator(annotator_b);
  const auto positions = document_positions(store, treebank_id);
  const auto a = load_complete(store, treebank_id, annotator_a, positions);
  const auto b = load_complete(store, treebank_id, annotator_b, positions);
  return compare_layers(a, b, std::string(annotator_a), std::string(annotator_b), fields);
}

std::map<std::pair<std::string, std::string>, AgreementReport> agreement_matrix(
    const Store& store, std::string_view treebank_id, std::span<const AgreementField> fields) {
  store.treebank(treebank_id);
  const auto positions = document_positions(store, treebank_id);
  const auto annotators = store.annotators();
  std::vector<Layer> layers;
  layers.reserve(annotators.size());
  for (const auto& a : annotators) layers.push_back(load_complete(store, treebank_id, a.id, positions));

  std::map<std::pair<std::string, std::string>, AgreementReport> out;
  for (std::size_t i = 0; i < annotators.size(); ++i) {
    for (std::size_t j = i + 1; j < annotators.size(); ++j) {
      try {
        out.emplace(std::make_pair(annotators[i].id, annotators[j].id),
                    compare_layers(layers[i], layers[j], annotators[i].id, annotators[j].id, fields));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NoComparableSentences) throw;
      }
    }
  }
  return out;
}

}  // namespace boat
