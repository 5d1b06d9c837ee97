#include "prefkit/synthgen.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "prefkit/rng.hpp"

namespace prefkit {

ElectorateModel electorate_model_by_name(const std::string& name) {
  if (name == "uniform-random") return ElectorateModel::uniform_random;
  if (name == "two-bloc") return ElectorateModel::two_bloc;
  if (name == "transitive-noise") return ElectorateModel::transitive_noise;
  throw ConfigError("unknown electorate model '" + name +
                    "' (expected uniform-random, two-bloc, or "
                    "transitive-noise)");
}

std::string electorate_model_name(ElectorateModel model) {
  switch (model) {
    case ElectorateModel::uniform_random:
      return "uniform-random";
    case ElectorateModel::two_bloc:
      return "two-bloc";
    case ElectorateModel::transitive_noise:
      return "transitive-noise";
  }
  return "uniform-random";
}

void ElectorateSpec::validate() const {
  if (n_proposals < 2) throw ConfigError("spec: need at least 2 proposals");
  if (n_users < 1) throw ConfigError("spec: need at least 1 user");
  if (panel_size < 2 || static_cast<std::size_t>(panel_size) > n_proposals) {
    throw ConfigError("spec: panel_size must be in [2, n_proposals]");
  }
  if (panels_per_user < 1) throw ConfigError("spec: panels_per_user must be >= 1");
  if (!(bloc_fraction > 0.0) || !(bloc_fraction < 1.0)) {
    throw ConfigError("spec: bloc_fraction must be in (0, 1)");
  }
  if (noise_rate < 0.0 || noise_rate > 1.0) {
    throw ConfigError("spec: noise_rate must be in [0, 1]");
  }
  for (int id : divisive_proposals) {
    if (id < 1 || static_cast<std::size_t>(id) > n_proposals) {
      throw ConfigError("spec: divisive proposal " + std::to_string(id) +
                        " outside the catalog");
    }
  }
  if (model == ElectorateModel::two_bloc) {
    if (divisive_proposals.empty()) {
      throw ConfigError("spec: two-bloc model needs a divisive proposal set");
    }
    auto bloc_a = static_cast<std::size_t>(
        std::llround(bloc_fraction * static_cast<double>(n_users)));
    if (bloc_a == 0 || bloc_a >= n_users) {
      throw ConfigError("spec: bloc_fraction leaves a bloc empty");
    }
  }
}

ElectorateSpec parse_electorate_spec_text(std::string_view text) {
  ElectorateSpec spec;
  std::istringstream in{std::string(text)};
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string& s) {
      while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(0, 1);
      while (!s.empty() &&
             (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.pop_back();
      }
    };
    trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("spec line " + std::to_string(line_no) +
                        ": expected key = value");
    }
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    trim(key);
    trim(value);

    auto as_long = [&](const std::string& v) {
      long out = 0;
      auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
      if (ec != std::errc{} || p != v.data() + v.size()) {
        throw ConfigError("spec: invalid integer '" + v + "' for " + key);
      }
      return out;
    };
    auto as_double = [&](const std::string& v) {
      double out = 0;
      auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
      if (ec != std::errc{} || p != v.data() + v.size()) {
        throw ConfigError("spec: invalid number '" + v + "' for " + key);
      }
      return out;
    };

    if (key == "n_proposals") {
      spec.n_proposals = static_cast<std::size_t>(as_long(value));
    } else if (key == "n_users") {
      spec.n_users = static_cast<std::size_t>(as_long(value));
    } else if (key == "model") {
      spec.model = electorate_model_by_name(value);
    } else if (key == "bloc_fraction") {
      spec.bloc_fraction = as_double(value);
    } else if (key == "noise_rate") {
      spec.noise_rate = as_double(value);
    } else if (key == "seed") {
      spec.seed = static_cast<std::uint64_t>(as_long(value));
    } else if (key == "panel_size") {
      spec.panel_size = static_cast<int>(as_long(value));
    } else if (key == "panels_per_user") {
      spec.panels_per_user = static_cast<int>(as_long(value));
    } else if (key == "divisive_proposals") {
      spec.divisive_proposals.clear();
      std::string piece;
      std::istringstream items(value);
      while (std::getline(items, piece, ',')) {
        if (piece.empty()) continue;
        spec.divisive_proposals.push_back(static_cast<int>(as_long(piece)));
      }
    } else {
      throw ConfigError("spec: unknown key '" + key + "'");
    }
  }
  spec.validate();
  return spec;
}

ElectorateSpec parse_electorate_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open spec file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_electorate_spec_text(buf.str());
}

std::string serialize_electorate_spec(const ElectorateSpec& spec) {
  std::ostringstream out;
  out << "n_proposals = " << spec.n_proposals << "\n";
  out << "n_users = " << spec.n_users << "\n";
  out << "model = " << electorate_model_name(spec.model) << "\n";
  out << "bloc_fraction = " << spec.bloc_fraction << "\n";
  if (!spec.divisive_proposals.empty()) {
    out << "divisive_proposals = ";
    for (std::size_t i = 0; i < spec.divisive_proposals.size(); ++i) {
      if (i > 0) out << ",";
      out << spec.divisive_proposals[i];
    }
    out << "\n";
  }
  out << "noise_rate = " << spec.noise_rate << "\n";
  out << "seed = " << spec.seed << "\n";
  out << "panel_size = " << spec.panel_size << "\n";
  out << "panels_per_user = " << spec.panels_per_user << "\n";
  return out.str();
}

namespace {

constexpr std::int64_t kBaseMicros = 1'648'771'200'000'000;  // 2022-04-01T00:00Z

// Preference position per proposal (0 = most preferred) for order-driven
// models. Both blocs share the base ascending order; bloc B additionally
// holds the divisive ids in reversed order within the divisive set's own
// position slots, so consensus proposals keep identical standing in both
// blocs while the divisive set is ordered oppositely.
std::vector<double> preference_positions(const ElectorateSpec& spec,
                                         bool bloc_a) {
  const std::size_t n = spec.n_proposals;
  std::vector<double> pos(n + 1, 0.0);
  for (std::size_t id = 1; id <= n; ++id) {
    pos[id] = static_cast<double>(id - 1);
  }
  if (spec.model == ElectorateModel::transitive_noise || bloc_a ||
      spec.divisive_proposals.empty()) {
    return pos;
  }
  std::set<int> divisive(spec.divisive_proposals.begin(),
                         spec.divisive_proposals.end());
  std::vector<int> ids(divisive.begin(), divisive.end());
  for (std::size_t j = 0; j < ids.size(); ++j) {
    pos[ids[j]] = static_cast<double>(ids[ids.size() - 1 - j] - 1);
  }
  return pos;
}

}  // namespace

PreferenceCorpus generate(const ElectorateSpec& spec) {
  spec.validate();
  PreferenceCorpus corpus;
  for (std::size_t id = 1; id <= spec.n_proposals; ++id) {
    Proposal p;
    p.id = static_cast<int>(id);
    p.text = "Proposal " + std::to_string(id);
    corpus.catalog.push_back(std::move(p));
  }

  const std::size_t bloc_a_count = static_cast<std::size_t>(
      std::llround(spec.bloc_fraction * static_cast<double>(spec.n_users)));
  const auto order_a = preference_positions(spec, true);
  const auto order_b = preference_positions(spec, false);

  for (std::size_t u = 0; u < spec.n_users; ++u) {
    const bool in_bloc_a = u < bloc_a_count;
    const auto& order = in_bloc_a ? order_a : order_b;
    Rng rng(Rng::derive(spec.seed, u));

    char user_buf[16];
    std::snprintf(user_buf, sizeof(user_buf), "u%06zu", u);
    std::string user_id(user_buf);

    for (int p = 0; p < spec.panels_per_user; ++p) {
      auto members = rng.sample_indices(spec.n_proposals,
                                        static_cast<std::size_t>(spec.panel_size));
      std::vector<int> panel;
      panel.reserve(members.size());
      for (std::size_t m : members) panel.push_back(static_cast<int>(m + 1));

      if (spec.model == ElectorateModel::uniform_random) {
        rng.shuffle(panel);
      } else {
        std::vector<std::pair<double, int>> keyed;
        keyed.reserve(panel.size());
        for (int id : panel) {
          double key = order[static_cast<std::size_t>(id)];
          if (spec.noise_rate > 0.0 && rng.unit() < spec.noise_rate) {
            key = rng.unit() * static_cast<double>(spec.n_proposals);
          }
          keyed.emplace_back(key, id);
        }
        std::sort(keyed.begin(), keyed.end());
        panel.clear();
        for (const auto& [_, id] : keyed) panel.push_back(id);
      }

      RankRecord rec;
      rec.user_id = user_id;
      rec.panel = std::move(panel);
      rec.updated = true;
      rec.universe = spec.panel_size;
      rec.timestamp = Instant{kBaseMicros + static_cast<std::int64_t>(
                                                u * spec.panels_per_user + p) *
                                                1'000'000};
      corpus.ranks.push_back(std::move(rec));
    }

    // Distinct strides keep the demographic partitions linearly
    // independent of each other.
    ParticipantProfile profile;
    profile.user_id = user_id;
    profile.politics = in_bloc_a ? 1 : 4;
    profile.sex = 1 + static_cast<int>(u % 2);
    profile.age = 1 + static_cast<int>(u % 7);
    profile.education = 1 + static_cast<int>((u / 3) % 7);
    profile.zone = 1 + static_cast<int>((u / 2) % 2);
    profile.location = (u % 3 == 0) ? 75 : 31;
    profile.universe = spec.panel_size;
    profile.timestamp = Instant{kBaseMicros + static_cast<std::int64_t>(u)};
    corpus.profiles[user_id] = std::move(profile);
  }
  corpus.validate();
  return corpus;
}

}  // namespace prefkit
