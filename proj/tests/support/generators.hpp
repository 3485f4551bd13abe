#pragma once

// Random inputs and brute-force reference implementations shared by the unit
// and acceptance tests. The oracles deliberately avoid the library's own
// helpers so that agreement between the two means something.

#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "boat/conllu.hpp"
#include "boat/search.hpp"
#include "boat/validation.hpp"

namespace boat::testing {

using Rng = std::mt19937_64;

std::string data_path(const std::string& name);
std::string read_text(const std::string& path);

struct TreeOptions {
  bool multiword = true;      // occasionally add range rows
  bool space_after = true;    // occasionally glue words with SpaceAfter=No
  bool unset_fields = false;  // occasionally leave columns unset
};

/// A well-formed sentence whose heads form a tree rooted at one token.
Sentence random_tree(Rng& rng, int n, const std::string& sent_id, const TreeOptions& options = {});

/// Structurally valid sentence with arbitrary heads: unset, 0, in range,
/// self loops, cycles and values above n all occur.
Sentence random_heads(Rng& rng, int n, const std::string& sent_id);

FeatureBag random_feats(Rng& rng, bool shuffled);

/// Independent reading of the tree rules.
struct StructuralOracle {
  bool root_count_violation = false;
  std::set<int> out_of_range;         // token ids whose HEAD exceeds n
  std::multiset<int> cycle_reports;   // smallest member of every cycle
};
StructuralOracle structural_oracle(const Sentence& sent);

/// Random predicate over the vocabulary used by random_tree().
FieldPredicate random_predicate(Rng& rng);

/// Brute-force evaluation of token predicates: every token that satisfies
/// all of them, as (sent_id, token_id) in document order.
std::vector<std::pair<std::string, int>> brute_force_search(
    const std::vector<IndexedSentence>& sentences, const std::vector<FieldPredicate>& predicates,
    const std::optional<std::set<Status>>& status_filter = std::nullopt);

/// h(e) = 1 + max h over arcs with strictly smaller spans inside e, by
/// direct recursion over all arcs (exponential-free via memo on index).
std::vector<int> recursive_heights(const std::vector<std::pair<int, int>>& arcs);

/// (head, dependent) for every token attached to another token.
std::vector<std::pair<int, int>> token_arcs(const Sentence& sent);

}  // namespace boat::testing
