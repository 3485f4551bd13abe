#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "boat/conllu.hpp"

namespace boat {

class Store;

/// Categorical token fields compared between annotators.
enum class AgreementField { Upos, Xpos, Deprel, Feats, Lemma };

std::string_view agreement_field_name(AgreementField field);
std::optional<AgreementField> parse_agreement_field(std::string_view name);
std::vector<AgreementField> all_agreement_fields();

struct FieldAgreement {
  double raw_agreement = 0.0;
  std::optional<double> kappa;  // undefined when chance agreement is 1
};

struct AgreementReport {
  std::string annotator_a;
  std::string annotator_b;
  std::size_t n_sentences_compared = 0;
  std::size_t n_sentences_skipped_tokenization = 0;
  std::size_t n_tokens = 0;
  std::map<AgreementField, FieldAgreement> per_field;
  /// Tokens where both annotators set a HEAD; denominator of uas/las.
  std::size_t n_attached_tokens = 0;
  std::optional<double> uas;
  std::optional<double> las;
};

/// Cohen's kappa for two equally long label sequences. Empty labels are a
/// category of their own. nullopt when chance agreement equals 1.
std::optional<double> cohen_kappa(std::span<const std::string> labels_a,
                                  std::span<const std::string> labels_b);

/// Both annotators' versions of one sentence.
struct SentencePair {
  const Sentence* a = nullptr;
  const Sentence* b = nullptr;
};

/// Compares pairs whose syntactic tokenization agrees (same token count and
/// FORM sequence); other pairs are counted as skipped. Throws
/// NoComparableSentences when nothing remains to compare.
AgreementReport compare_annotations(std::string annotator_a, std::string annotator_b,
                                    std::span<const SentencePair> pairs,
                                    std::span<const AgreementField> fields);

/// Agreement over the sentences both annotators marked Complete.
AgreementReport compute_agreement(const Store& store, std::string_view treebank_id,
                                  std::string_view annotator_a, std::string_view annotator_b,
                                  std::span<const AgreementField> fields);

/// Reports for every unordered annotator pair (a < b) with at least one
/// comparable sentence.
std::map<std::pair<std::string, std::string>, AgreementReport> agreement_matrix(
    const Store& store, std::string_view treebank_id, std::span<const AgreementField> fields);

}  // namespace boat
