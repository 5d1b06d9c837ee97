#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "prefkit/corpus.hpp"

namespace prefkit {

enum class ElectorateModel {
  uniform_random,    // every panel is a uniform random permutation
  two_bloc,          // blocs with opposite stances on a planted divisive set
  transitive_noise,  // one global order, perturbed at the noise rate
};

ElectorateModel electorate_model_by_name(const std::string& name);
std::string electorate_model_name(ElectorateModel model);

// Synthetic electorate description. Generation emits rank panels (not raw
// pairs) so the whole panel-to-pairs pipeline is exercised; profiles carry
// a politics label matching bloc membership. Noise is realized as
// per-proposal rank jitter inside each panel, since emitted panels must
// remain total orders.
struct ElectorateSpec {
  std::size_t n_proposals = 20;
  std::size_t n_users = 100;
  ElectorateModel model = ElectorateModel::uniform_random;
  double bloc_fraction = 0.5;          // share of users in bloc A
  std::vector<int> divisive_proposals; // subset of the catalog ids
  double noise_rate = 0.0;
  std::uint64_t seed = 0;
  int panel_size = 5;
  int panels_per_user = 12;

  void validate() const;  // throws ConfigError
};

// Flat key-value config ("key = value" lines, '#' comments). Unknown keys
// are errors.
ElectorateSpec parse_electorate_spec_text(std::string_view text);
ElectorateSpec parse_electorate_spec(const std::string& path);
std::string serialize_electorate_spec(const ElectorateSpec& spec);

// Fully deterministic in the spec (per-user derived seeds).
PreferenceCorpus generate(const ElectorateSpec& spec);

}  // namespace prefkit
