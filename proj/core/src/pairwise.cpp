#include "prefkit/pairwise.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <sstream>
#include <unordered_map>

#include "prefkit/csv.hpp"

namespace prefkit {

long PairwiseTally::total() const {
  long sum = 0;
  for (long c : counts) sum += c;
  return sum;
}

std::vector<PairwiseRecord> approvals_to_pairs(
    std::span<const ApprovalRecord> approvals) {
  // Latest judgment per (user, proposal); later input order wins on equal
  // timestamps, consistent with the corpus dedup rule.
  std::vector<std::string> user_order;
  std::unordered_map<std::string,
                     std::unordered_map<int, const ApprovalRecord*>>
      latest;
  for (const auto& rec : approvals) {
    auto [it, inserted] = latest.try_emplace(rec.user_id);
    if (inserted) user_order.push_back(rec.user_id);
    auto& slot = it->second[rec.proposal_id];
    if (slot == nullptr || rec.timestamp >= slot->timestamp) slot = &rec;
  }

  std::vector<PairwiseRecord> out;
  for (const auto& user : user_order) {
    std::vector<const ApprovalRecord*> approved;
    std::vector<const ApprovalRecord*> disapproved;
    for (const auto& [_, rec] : latest[user]) {
      if (rec->agree == 1) approved.push_back(rec);
      if (rec->agree == -1) disapproved.push_back(rec);
    }
    auto by_id = [](const ApprovalRecord* a, const ApprovalRecord* b) {
      return a->proposal_id < b->proposal_id;
    };
    std::sort(approved.begin(), approved.end(), by_id);
    std::sort(disapproved.begin(), disapproved.end(), by_id);
    for (const auto* a : approved) {
      for (const auto* d : disapproved) {
        PairwiseRecord rec;
        rec.user_id = user;
        rec.pair = PairId::of(a->proposal_id, d->proposal_id);
        rec.selected = a->proposal_id == rec.pair.low ? PairChoice::low
                                                      : PairChoice::high;
        rec.source = RecordSource::approval;
        rec.universe = std::max(a->timestamp, d->timestamp) == a->timestamp
                           ? a->universe
                           : d->universe;
        if (a->score && d->score) {
          rec.score = (*a->score + *d->score) / 2.0;
        } else if (a->score) {
          rec.score = a->score;
        } else if (d->score) {
          rec.score = d->score;
        }
        rec.timestamp = std::max(a->timestamp, d->timestamp);
        out.push_back(std::move(rec));
      }
    }
  }
  return out;
}

std::vector<PairwiseRecord> ranks_to_pairs(std::span<const RankRecord> ranks) {
  std::vector<PairwiseRecord> out;
  for (std::size_t panel_seq = 0; panel_seq < ranks.size(); ++panel_seq) {
    const auto& panel = ranks[panel_seq];
    for (std::size_t i = 0; i < panel.panel.size(); ++i) {
      for (std::size_t j = i + 1; j < panel.panel.size(); ++j) {
        PairwiseRecord rec;
        rec.user_id = panel.user_id;
        rec.pair = PairId::of(panel.panel[i], panel.panel[j]);
        rec.selected = panel.panel[i] == rec.pair.low ? PairChoice::low
                                                      : PairChoice::high;
        rec.source = RecordSource::rank;
        rec.universe = panel.universe;
        rec.score = panel.score;
        rec.timestamp = panel.timestamp;
        rec.panel_seq = static_cast<std::int32_t>(panel_seq);
        out.push_back(std::move(rec));
      }
    }
  }
  return out;
}

PairwiseTally build_tally(std::span<const PairwiseRecord> records,
                          const ProposalIndex& index) {
  PairwiseTally tally;
  tally.index = index;
  tally.counts.assign(index.size() * index.size(), 0);
  for (const auto& rec : records) {
    if (rec.is_tie()) continue;
    auto winner = index.find(rec.chosen_id());
    auto loser = index.find(rec.other_id());
    if (!winner || !loser) {
      throw FormatError("pairwise record references proposal " +
                        std::to_string(!winner ? rec.chosen_id()
                                               : rec.other_id()) +
                        " outside the catalog index");
    }
    ++tally.at(*winner, *loser);
  }
  return tally;
}

namespace {

struct CellCounts {
  long low_wins = 0;
  long high_wins = 0;
  // Panel provenance for the trivially-transitive exclusion: the sole panel
  // all observations came from, or nullopt once observations span panels
  // (or a non-panel source).
  std::optional<std::int32_t> sole_panel;
  bool panel_known = false;

  void add(const PairwiseRecord& rec) {
    if (rec.selected == PairChoice::low) ++low_wins;
    if (rec.selected == PairChoice::high) ++high_wins;
    if (!panel_known) {
      sole_panel = rec.panel_seq;
      panel_known = true;
    } else if (sole_panel != rec.panel_seq) {
      sole_panel = std::nullopt;
    }
  }
  long observations() const { return low_wins + high_wins; }
};

using UserCells = std::map<std::uint64_t, CellCounts>;

std::map<std::string, UserCells> collect_cells(
    std::span<const PairwiseRecord> records) {
  std::map<std::string, UserCells> users;
  for (const auto& rec : records) {
    if (rec.is_tie()) continue;  // universe-2 "Don't have preference"
    users[rec.user_id][rec.pair.key()].add(rec);
  }
  return users;
}

}  // namespace

ConsistencyResult consistency(std::span<const PairwiseRecord> records,
                              ConsistencyMode mode) {
  auto users = collect_cells(records);
  ConsistencyResult result;
  double weighted_sum = 0.0;
  for (const auto& [user, cells] : users) {
    double user_sum = 0.0;
    long user_obs = 0;
    long user_cells = 0;
    for (const auto& [_, cell] : cells) {
      long obs = cell.observations();
      if (obs < 2) continue;
      double value;
      if (mode == ConsistencyMode::modal_fraction) {
        value = static_cast<double>(std::max(cell.low_wins, cell.high_wins)) /
                static_cast<double>(obs);
      } else {
        auto pairs2 = [](long k) { return k * (k - 1) / 2; };
        value = static_cast<double>(pairs2(cell.low_wins) +
                                    pairs2(cell.high_wins)) /
                static_cast<double>(pairs2(obs));
      }
      user_sum += value * static_cast<double>(obs);
      user_obs += obs;
      ++user_cells;
    }
    if (user_cells == 0) continue;
    result.per_user.push_back(
        {user, user_cells, user_obs, user_sum / static_cast<double>(user_obs)});
    weighted_sum += user_sum;
    result.observations += user_obs;
    result.repeated_cells += user_cells;
  }
  if (result.repeated_cells > 0) {
    result.overall = weighted_sum / static_cast<double>(result.observations);
  }
  return result;
}

TransitivityResult transitivity(std::span<const PairwiseRecord> records) {
  auto users = collect_cells(records);
  TransitivityResult result;
  double total_sum = 0.0;
  for (const auto& [user, cells] : users) {
    // Neighbor lists over the user's observed pairs.
    std::map<int, std::vector<int>> neighbors;
    for (const auto& [key, _] : cells) {
      int low = static_cast<int>(key >> 32);
      int high = static_cast<int>(key & 0xffffffffu);
      neighbors[low].push_back(high);
      neighbors[high].push_back(low);
    }
    for (auto& [_, list] : neighbors) std::sort(list.begin(), list.end());

    double user_sum = 0.0;
    long user_triplets = 0;
    for (const auto& [key, cell_ab] : cells) {
      int a = static_cast<int>(key >> 32);
      int b = static_cast<int>(key & 0xffffffffu);
      // Enumerate c > b adjacent to both a and b; (a < b < c) visits each
      // triangle exactly once.
      const auto& na = neighbors[a];
      const auto& nb = neighbors[b];
      std::vector<int> common;
      std::set_intersection(na.begin(), na.end(), nb.begin(), nb.end(),
                            std::back_inserter(common));
      for (int c : common) {
        if (c <= b) continue;
        const auto& cell_ac = cells.at(PairId{a, c}.key());
        const auto& cell_bc = cells.at(PairId{b, c}.key());
        if (cell_ab.sole_panel && cell_ab.sole_panel == cell_ac.sole_panel &&
            cell_ab.sole_panel == cell_bc.sole_panel) {
          continue;  // all three relations implied by a single panel
        }
        // Direction counts: x_uv = times u was chosen over v.
        double x_ab = static_cast<double>(cell_ab.low_wins);
        double x_ba = static_cast<double>(cell_ab.high_wins);
        double x_ac = static_cast<double>(cell_ac.low_wins);
        double x_ca = static_cast<double>(cell_ac.high_wins);
        double x_bc = static_cast<double>(cell_bc.low_wins);
        double x_cb = static_cast<double>(cell_bc.high_wins);
        double total = (x_ab + x_ba) * (x_ac + x_ca) * (x_bc + x_cb);
        if (total <= 0) continue;
        // Two of the eight direction assignments are cycles.
        double cyclic = x_ab * x_bc * x_ca + x_ba * x_cb * x_ac;
        user_sum += (total - cyclic) / total;
        ++user_triplets;
      }
    }
    if (user_triplets == 0) continue;
    result.per_user.push_back(
        {user, user_triplets, user_sum / static_cast<double>(user_triplets)});
    total_sum += user_sum;
    result.triplets += user_triplets;
  }
  if (result.triplets > 0) {
    result.overall = total_sum / static_cast<double>(result.triplets);
  }
  return result;
}

// --- serialization -----------------------------------------------------------

std::string serialize_pairwise(std::span<const PairwiseRecord> records) {
  std::string out =
      "user_id,option_a_sorted,option_b_sorted,card_id,selected,source,"
      "universe,score,created_at,panel_seq\n";
  for (const auto& rec : records) {
    std::string score;
    if (rec.score) {
      std::ostringstream os;
      os.precision(17);
      os << *rec.score;
      score = os.str();
    }
    out += csv_line(
        {rec.user_id, std::to_string(rec.pair.low),
         std::to_string(rec.pair.high), rec.pair.card_id(),
         std::to_string(rec.is_tie() ? 0 : rec.chosen_id()),
         rec.source == RecordSource::approval ? "agree" : "rank",
         std::to_string(rec.universe), score, format_instant(rec.timestamp),
         rec.panel_seq ? std::to_string(*rec.panel_seq) : ""});
    out.push_back('\n');
  }
  return out;
}

static ParseResult<std::vector<PairwiseRecord>> parse_pairwise_table(
    const CsvTable& table) {
  ParseResult<std::vector<PairwiseRecord>> out;
  size_t col_user = table.require_column("user_id");
  size_t col_a = table.require_column("option_a_sorted");
  size_t col_b = table.require_column("option_b_sorted");
  size_t col_selected = table.require_column("selected");
  size_t col_source = table.require_column("source");
  size_t col_universe = table.require_column("universe");
  size_t col_created = table.require_column("created_at");
  auto col_score = table.column("score");
  auto col_panel = table.column("panel_seq");

  auto to_int = [](std::string_view s) -> std::optional<int> {
    int v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
    return v;
  };

  for (const auto& row : table.rows()) {
    PairwiseRecord rec;
    rec.user_id = std::string(CsvTable::field(row, col_user));
    auto a = to_int(CsvTable::field(row, col_a));
    auto b = to_int(CsvTable::field(row, col_b));
    auto sel = to_int(CsvTable::field(row, col_selected));
    auto universe = to_int(CsvTable::field(row, col_universe));
    auto ts = parse_instant(CsvTable::field(row, col_created));
    if (rec.user_id.empty() || !a || !b || !sel || !universe || !ts) {
      out.errors.push_back({row.line, "unparseable pairwise row"});
      continue;
    }
    if (*a >= *b) {
      out.errors.push_back({row.line, "option_a_sorted must be < option_b_sorted"});
      continue;
    }
    rec.pair = PairId{*a, *b};
    if (*sel == 0) {
      rec.selected = PairChoice::none;
    } else if (*sel == *a) {
      rec.selected = PairChoice::low;
    } else if (*sel == *b) {
      rec.selected = PairChoice::high;
    } else {
      out.errors.push_back({row.line, "selected id not part of the pair"});
      continue;
    }
    std::string_view source = CsvTable::field(row, col_source);
    if (source == "agree") {
      rec.source = RecordSource::approval;
    } else if (source == "rank") {
      rec.source = RecordSource::rank;
    } else {
      out.errors.push_back({row.line, "unknown source"});
      continue;
    }
    rec.universe = *universe;
    rec.timestamp = *ts;
    if (col_score) {
      std::string_view s = CsvTable::field(row, *col_score);
      if (!s.empty()) {
        double v = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || p != s.data() + s.size() || v < 0 || v > 1) {
          out.errors.push_back({row.line, "score outside [0,1]"});
          continue;
        }
        rec.score = v;
      }
    }
    if (col_panel) {
      std::string_view s = CsvTable::field(row, *col_panel);
      if (!s.empty()) {
        auto v = to_int(s);
        if (v) rec.panel_seq = *v;
      }
    }
    out.records.push_back(std::move(rec));
  }
  return out;
}

ParseResult<std::vector<PairwiseRecord>> parse_pairwise(
    const std::string& path) {
  return parse_pairwise_table(CsvTable::read_file(path));
}

ParseResult<std::vector<PairwiseRecord>> parse_pairwise_text(
    std::string_view text, std::string name) {
  return parse_pairwise_table(CsvTable::read_string(text, std::move(name)));
}

}  // namespace prefkit
