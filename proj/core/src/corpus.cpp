#include "prefkit/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "prefkit/csv.hpp"

namespace prefkit {

namespace {

std::optional<int> to_int(std::string_view s) {
  int value = 0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) return std::nullopt;
  return value;
}

std::optional<double> to_double(std::string_view s) {
  double value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

std::optional<bool> to_bool(std::string_view s) {
  if (s == "true" || s == "True" || s == "TRUE" || s == "t" || s == "1") {
    return true;
  }
  if (s == "false" || s == "False" || s == "FALSE" || s == "f" || s == "0") {
    return false;
  }
  return std::nullopt;
}

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

int ParticipantProfile::label(const std::string& dimension) const {
  if (dimension == "sex") return sex;
  if (dimension == "age") return age;
  if (dimension == "education") return education;
  if (dimension == "zone") return zone;
  if (dimension == "location") return location;
  if (dimension == "politics") return politics;
  throw ConfigError("unknown profile dimension '" + dimension + "'");
}

void PreferenceCorpus::validate() const {
  std::set<int> ids;
  for (const auto& p : catalog) {
    if (p.id <= 0) throw FormatError("catalog: proposal id must be positive");
    if (p.text.empty()) {
      throw FormatError("catalog: proposal " + std::to_string(p.id) +
                        " has empty text");
    }
    if (!ids.insert(p.id).second) {
      throw FormatError("catalog: duplicate proposal id " +
                        std::to_string(p.id));
    }
  }
  for (const auto& a : approvals) {
    if (!ids.count(a.proposal_id)) {
      throw FormatError("approvals: unknown proposal id " +
                        std::to_string(a.proposal_id));
    }
    if (a.agree < -1 || a.agree > 1) {
      throw FormatError("approvals: agree code out of domain");
    }
  }
  for (const auto& r : ranks) {
    if (r.panel.empty()) throw FormatError("ranks: empty panel");
    std::set<int> seen;
    for (int id : r.panel) {
      if (!ids.count(id)) {
        throw FormatError("ranks: unknown proposal id " + std::to_string(id));
      }
      if (!seen.insert(id).second) {
        throw FormatError("ranks: duplicate proposal id in panel");
      }
    }
  }
}

const Proposal* PreferenceCorpus::find_proposal(int id) const {
  for (const auto& p : catalog) {
    if (p.id == id) return &p;
  }
  return nullptr;
}

ProposalIndex::ProposalIndex(std::vector<int> sorted_ids)
    : ids_(std::move(sorted_ids)) {
  std::sort(ids_.begin(), ids_.end());
  ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
  for (std::size_t i = 0; i < ids_.size(); ++i) pos_[ids_[i]] = i;
}

ProposalIndex ProposalIndex::from_catalog(
    const std::vector<Proposal>& catalog) {
  std::vector<int> ids;
  ids.reserve(catalog.size());
  for (const auto& p : catalog) ids.push_back(p.id);
  return ProposalIndex(std::move(ids));
}

std::optional<std::size_t> ProposalIndex::find(int id) const {
  auto it = pos_.find(id);
  if (it == pos_.end()) return std::nullopt;
  return it->second;
}

// --- proposals -------------------------------------------------------------

static ParseResult<std::vector<Proposal>> parse_proposals_table(
    const CsvTable& table) {
  ParseResult<std::vector<Proposal>> out;
  size_t col_id = table.column("proposal_id")
                      ? *table.column("proposal_id")
                      : table.require_column("id");
  size_t col_text =
      table.column("text") ? *table.column("text") : table.require_column("name");
  auto col_candidates = table.column("candidates");

  std::set<int> seen;
  for (const auto& row : table.rows()) {
    auto id = to_int(CsvTable::field(row, col_id));
    if (!id || *id <= 0) {
      out.errors.push_back({row.line, "invalid proposal id"});
      continue;
    }
    if (!seen.insert(*id).second) {
      out.errors.push_back(
          {row.line, "duplicate proposal id " + std::to_string(*id)});
      continue;
    }
    std::string text(CsvTable::field(row, col_text));
    if (text.empty()) {
      out.errors.push_back({row.line, "empty proposal text"});
      continue;
    }
    Proposal p;
    p.id = *id;
    p.text = std::move(text);
    if (col_candidates) {
      std::string_view cands = CsvTable::field(row, *col_candidates);
      size_t start = 0;
      while (start <= cands.size() && !cands.empty()) {
        size_t bar = cands.find('|', start);
        std::string_view piece = cands.substr(
            start, bar == std::string_view::npos ? cands.size() - start
                                                 : bar - start);
        if (!piece.empty()) p.candidate_ids.insert(std::string(piece));
        if (bar == std::string_view::npos) break;
        start = bar + 1;
      }
    }
    out.records.push_back(std::move(p));
  }
  return out;
}

ParseResult<std::vector<Proposal>> parse_proposals(const std::string& path) {
  return parse_proposals_table(CsvTable::read_file(path));
}

ParseResult<std::vector<Proposal>> parse_proposals_text(std::string_view text,
                                                        std::string name) {
  return parse_proposals_table(CsvTable::read_string(text, std::move(name)));
}

// --- approvals ---------------------------------------------------------------

static ParseResult<std::vector<ApprovalRecord>> parse_approvals_table(
    const CsvTable& table, const std::vector<Proposal>& catalog) {
  ParseResult<std::vector<ApprovalRecord>> out;
  size_t col_user = table.require_column("user_id");
  size_t col_prop = table.require_column("proposal_id");
  size_t col_agree = table.require_column("agree");
  size_t col_universe = table.require_column("universe");
  size_t col_created = table.require_column("created_at");
  auto col_score = table.column("score");
  auto col_locale = table.column("locale");

  std::set<int> known;
  for (const auto& p : catalog) known.insert(p.id);

  for (const auto& row : table.rows()) {
    ApprovalRecord rec;
    rec.user_id = std::string(CsvTable::field(row, col_user));
    if (rec.user_id.empty()) {
      out.errors.push_back({row.line, "empty user_id"});
      continue;
    }
    auto prop = to_int(CsvTable::field(row, col_prop));
    if (!prop || !known.count(*prop)) {
      out.errors.push_back(
          {row.line, "unknown proposal id '" +
                         std::string(CsvTable::field(row, col_prop)) + "'"});
      continue;
    }
    rec.proposal_id = *prop;
    auto agree = to_int(CsvTable::field(row, col_agree));
    if (!agree || *agree < -1 || *agree > 1) {
      out.errors.push_back(
          {row.line, "agree code '" +
                         std::string(CsvTable::field(row, col_agree)) +
                         "' not in {-1,0,1}"});
      continue;
    }
    rec.agree = *agree;
    auto universe = to_int(CsvTable::field(row, col_universe));
    if (!universe) {
      out.errors.push_back({row.line, "invalid universe"});
      continue;
    }
    rec.universe = *universe;
    if (col_score) {
      std::string_view s = CsvTable::field(row, *col_score);
      if (!s.empty()) {
        auto score = to_double(s);
        if (!score || *score < 0.0 || *score > 1.0) {
          out.errors.push_back({row.line, "score outside [0,1]"});
          continue;
        }
        rec.score = *score;
      }
    }
    auto ts = parse_instant(CsvTable::field(row, col_created));
    if (!ts) {
      out.errors.push_back(
          {row.line, "unparseable created_at '" +
                         std::string(CsvTable::field(row, col_created)) + "'"});
      continue;
    }
    rec.timestamp = *ts;
    if (col_locale) rec.locale = std::string(CsvTable::field(row, *col_locale));
    out.records.push_back(std::move(rec));
  }
  return out;
}

ParseResult<std::vector<ApprovalRecord>> parse_approvals(
    const std::string& path, const std::vector<Proposal>& catalog) {
  return parse_approvals_table(CsvTable::read_file(path), catalog);
}

ParseResult<std::vector<ApprovalRecord>> parse_approvals_text(
    std::string_view text, std::string name,
    const std::vector<Proposal>& catalog) {
  return parse_approvals_table(CsvTable::read_string(text, std::move(name)),
                               catalog);
}

// --- ranks -------------------------------------------------------------------

// The panel lives in one CSV cell as pipe-separated proposal ids,
// most preferred first: "4|1|9".
static std::optional<std::vector<int>> parse_panel(std::string_view cell,
                                                   std::string* error) {
  std::vector<int> panel;
  std::set<int> seen;
  size_t start = 0;
  if (cell.empty()) {
    *error = "empty panel";
    return std::nullopt;
  }
  while (start <= cell.size()) {
    size_t bar = cell.find('|', start);
    std::string_view piece = cell.substr(
        start, bar == std::string_view::npos ? cell.size() - start : bar - start);
    auto id = to_int(piece);
    if (!id) {
      *error = "invalid proposal id '" + std::string(piece) + "' in panel";
      return std::nullopt;
    }
    if (!seen.insert(*id).second) {
      *error = "duplicate proposal id " + std::to_string(*id) + " in panel";
      return std::nullopt;
    }
    panel.push_back(*id);
    if (bar == std::string_view::npos) break;
    start = bar + 1;
  }
  return panel;
}

static ParseResult<std::vector<RankRecord>> parse_ranks_table(
    const CsvTable& table, const std::vector<Proposal>& catalog) {
  ParseResult<std::vector<RankRecord>> out;
  size_t col_user = table.require_column("user_id");
  size_t col_rank = table.require_column("rank");
  size_t col_updated = table.require_column("updated");
  size_t col_universe = table.require_column("universe");
  size_t col_created = table.require_column("created_at");
  auto col_score = table.column("score");

  std::set<int> known;
  for (const auto& p : catalog) known.insert(p.id);

  for (const auto& row : table.rows()) {
    RankRecord rec;
    rec.user_id = std::string(CsvTable::field(row, col_user));
    if (rec.user_id.empty()) {
      out.errors.push_back({row.line, "empty user_id"});
      continue;
    }
    std::string panel_error;
    auto panel = parse_panel(CsvTable::field(row, col_rank), &panel_error);
    if (!panel) {
      out.errors.push_back({row.line, panel_error});
      continue;
    }
    bool bad_ref = false;
    for (int id : *panel) {
      if (!known.count(id)) {
        out.errors.push_back(
            {row.line, "unknown proposal id " + std::to_string(id)});
        bad_ref = true;
        break;
      }
    }
    if (bad_ref) continue;
    rec.panel = std::move(*panel);
    auto updated = to_bool(CsvTable::field(row, col_updated));
    if (!updated) {
      out.errors.push_back({row.line, "invalid updated flag"});
      continue;
    }
    rec.updated = *updated;
    auto universe = to_int(CsvTable::field(row, col_universe));
    if (!universe) {
      out.errors.push_back({row.line, "invalid universe"});
      continue;
    }
    rec.universe = *universe;
    if (col_score) {
      std::string_view s = CsvTable::field(row, *col_score);
      if (!s.empty()) {
        auto score = to_double(s);
        if (!score || *score < 0.0 || *score > 1.0) {
          out.errors.push_back({row.line, "score outside [0,1]"});
          continue;
        }
        rec.score = *score;
      }
    }
    auto ts = parse_instant(CsvTable::field(row, col_created));
    if (!ts) {
      out.errors.push_back({row.line, "unparseable created_at"});
      continue;
    }
    rec.timestamp = *ts;
    out.records.push_back(std::move(rec));
  }
  return out;
}

ParseResult<std::vector<RankRecord>> parse_ranks(
    const std::string& path, const std::vector<Proposal>& catalog) {
  return parse_ranks_table(CsvTable::read_file(path), catalog);
}

ParseResult<std::vector<RankRecord>> parse_ranks_text(
    std::string_view text, std::string name,
    const std::vector<Proposal>& catalog) {
  return parse_ranks_table(CsvTable::read_string(text, std::move(name)),
                           catalog);
}

// --- profiles ----------------------------------------------------------------

static ParseResult<std::unordered_map<std::string, ParticipantProfile>>
parse_profiles_table(const CsvTable& table) {
  ParseResult<std::unordered_map<std::string, ParticipantProfile>> out;
  size_t col_user = table.require_column("user_id");
  // "politica" is the platform's original column name; accept both.
  size_t col_politics = table.column("politics") ? *table.column("politics")
                                                 : table.require_column("politica");
  size_t col_sex = table.require_column("sex");
  size_t col_age = table.require_column("age");
  size_t col_education = table.require_column("education");
  size_t col_zone = table.require_column("zone");
  size_t col_location = table.require_column("location");
  size_t col_created = table.require_column("created_at");
  auto col_universe = table.column("universe");

  for (const auto& row : table.rows()) {
    ParticipantProfile p;
    p.user_id = std::string(CsvTable::field(row, col_user));
    if (p.user_id.empty()) {
      out.errors.push_back({row.line, "empty user_id"});
      continue;
    }
    auto ts = parse_instant(CsvTable::field(row, col_created));
    if (!ts) {
      out.errors.push_back(
          {row.line, "unparseable created_at '" +
                         std::string(CsvTable::field(row, col_created)) + "'"});
      continue;
    }
    p.timestamp = *ts;
    bool bad = false;
    auto read_label = [&](size_t col, int& dst) {
      auto v = to_int(CsvTable::field(row, col));
      if (!v) {
        out.errors.push_back(
            {row.line, "invalid label '" +
                           std::string(CsvTable::field(row, col)) + "'"});
        bad = true;
        return;
      }
      dst = *v;
    };
    read_label(col_sex, p.sex);
    if (!bad) read_label(col_age, p.age);
    if (!bad) read_label(col_education, p.education);
    if (!bad) read_label(col_zone, p.zone);
    if (!bad) read_label(col_location, p.location);
    if (!bad) read_label(col_politics, p.politics);
    if (bad) continue;
    if (col_universe) {
      auto v = to_int(CsvTable::field(row, *col_universe));
      p.universe = v.value_or(0);
    }
    // Latest record wins; identical timestamps resolve to the later row.
    auto it = out.records.find(p.user_id);
    if (it == out.records.end() || p.timestamp >= it->second.timestamp) {
      out.records[p.user_id] = std::move(p);
    }
  }
  return out;
}

ParseResult<std::unordered_map<std::string, ParticipantProfile>> parse_profiles(
    const std::string& path) {
  return parse_profiles_table(CsvTable::read_file(path));
}

ParseResult<std::unordered_map<std::string, ParticipantProfile>>
parse_profiles_text(std::string_view text, std::string name) {
  return parse_profiles_table(CsvTable::read_string(text, std::move(name)));
}

// --- PrefLib SOC ---------------------------------------------------------------

PreferenceCorpus parse_preflib_soc_text(std::string_view text,
                                        std::string name) {
  PreferenceCorpus corpus;
  long n_alternatives = 0;
  std::map<int, std::string> alt_names;

  long line_no = 0;
  size_t pos = 0;
  long data_lines = 0;
  while (pos <= text.size()) {
    size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;
    ++line_no;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) {
      line.remove_suffix(1);
    }
    while (!line.empty() && line.front() == ' ') line.remove_prefix(1);
    if (line.empty()) continue;

    if (line.front() == '#') {
      std::string_view meta = line.substr(1);
      while (!meta.empty() && meta.front() == ' ') meta.remove_prefix(1);
      constexpr std::string_view kNumAlt = "NUMBER ALTERNATIVES:";
      constexpr std::string_view kAltName = "ALTERNATIVE NAME ";
      if (meta.substr(0, kNumAlt.size()) == kNumAlt) {
        auto v = to_int(meta.substr(kNumAlt.size() +
                                    (meta.size() > kNumAlt.size() &&
                                             meta[kNumAlt.size()] == ' '
                                         ? 1
                                         : 0)));
        if (v) n_alternatives = *v;
      } else if (meta.substr(0, kAltName.size()) == kAltName) {
        std::string_view rest = meta.substr(kAltName.size());
        size_t colon = rest.find(':');
        if (colon != std::string_view::npos) {
          auto idx = to_int(rest.substr(0, colon));
          std::string_view label = rest.substr(colon + 1);
          while (!label.empty() && label.front() == ' ') label.remove_prefix(1);
          if (idx) alt_names[*idx] = std::string(label);
        }
      }
      continue;
    }

    size_t colon = line.find(':');
    if (colon == std::string_view::npos) {
      throw FormatError(name + ":" + std::to_string(line_no) +
                        ": expected 'multiplicity: id,id,...'");
    }
    auto mult = to_int(line.substr(0, colon));
    if (!mult || *mult < 1) {
      throw FormatError(name + ":" + std::to_string(line_no) +
                        ": invalid multiplicity");
    }
    std::vector<int> panel;
    std::set<int> seen;
    std::string_view items = line.substr(colon + 1);
    size_t start = 0;
    while (start <= items.size()) {
      size_t comma = items.find(',', start);
      std::string_view piece = items.substr(
          start,
          comma == std::string_view::npos ? items.size() - start : comma - start);
      while (!piece.empty() && piece.front() == ' ') piece.remove_prefix(1);
      while (!piece.empty() && piece.back() == ' ') piece.remove_suffix(1);
      if (!piece.empty()) {
        auto id = to_int(piece);
        if (!id) {
          throw FormatError(name + ":" + std::to_string(line_no) +
                            ": invalid alternative '" + std::string(piece) +
                            "'");
        }
        if (!seen.insert(*id).second) {
          throw FormatError(name + ":" + std::to_string(line_no) +
                            ": repeated alternative " + std::to_string(*id) +
                            " (SOC requires a strict order, no ties)");
        }
        panel.push_back(*id);
      }
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (panel.empty()) {
      throw FormatError(name + ":" + std::to_string(line_no) + ": empty order");
    }
    if (n_alternatives == 0) {
      n_alternatives = static_cast<long>(panel.size());
    }
    // Completeness: the order must be a permutation of 1..n.
    if (static_cast<long>(panel.size()) != n_alternatives ||
        *seen.begin() != 1 || *seen.rbegin() != n_alternatives) {
      throw FormatError(name + ":" + std::to_string(line_no) +
                        ": order is not a complete permutation of 1.." +
                        std::to_string(n_alternatives));
    }
    ++data_lines;
    for (int k = 0; k < *mult; ++k) {
      RankRecord rec;
      rec.user_id =
          "soc:" + std::to_string(line_no) + ":" + std::to_string(k);
      rec.panel = panel;
      rec.updated = true;
      rec.universe = static_cast<int>(n_alternatives);
      rec.timestamp = Instant{line_no * 1'000'000};
      corpus.ranks.push_back(std::move(rec));
    }
  }

  if (data_lines == 0) {
    throw FormatError(name + ": no preference data lines found");
  }
  for (int id = 1; id <= n_alternatives; ++id) {
    Proposal p;
    p.id = id;
    auto it = alt_names.find(id);
    p.text = (it != alt_names.end() && !it->second.empty())
                 ? it->second
                 : "alternative " + std::to_string(id);
    corpus.catalog.push_back(std::move(p));
  }
  corpus.validate();
  return corpus;
}

PreferenceCorpus parse_preflib_soc(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_preflib_soc_text(buf.str(), path);
}

// --- canonical serialization ---------------------------------------------------

std::string serialize_proposals(const std::vector<Proposal>& catalog) {
  std::string out = "proposal_id,text,candidates\n";
  for (const auto& p : catalog) {
    std::string cands;
    for (const auto& c : p.candidate_ids) {
      if (!cands.empty()) cands.push_back('|');
      cands += c;
    }
    out += csv_line({std::to_string(p.id), p.text, cands});
    out.push_back('\n');
  }
  return out;
}

std::string serialize_approvals(const std::vector<ApprovalRecord>& approvals) {
  std::string out = "user_id,proposal_id,agree,universe,score,created_at,locale\n";
  for (const auto& a : approvals) {
    out += csv_line({a.user_id, std::to_string(a.proposal_id),
                     std::to_string(a.agree), std::to_string(a.universe),
                     a.score ? fmt_double(*a.score) : "",
                     format_instant(a.timestamp), a.locale});
    out.push_back('\n');
  }
  return out;
}

std::string serialize_ranks(const std::vector<RankRecord>& ranks) {
  std::string out = "user_id,rank,updated,universe,score,created_at\n";
  for (const auto& r : ranks) {
    std::string panel;
    for (size_t i = 0; i < r.panel.size(); ++i) {
      if (i > 0) panel.push_back('|');
      panel += std::to_string(r.panel[i]);
    }
    out += csv_line({r.user_id, panel, r.updated ? "true" : "false",
                     std::to_string(r.universe),
                     r.score ? fmt_double(*r.score) : "",
                     format_instant(r.timestamp)});
    out.push_back('\n');
  }
  return out;
}

std::string serialize_profiles(
    const std::unordered_map<std::string, ParticipantProfile>& profiles) {
  std::string out =
      "user_id,sex,age,education,zone,location,politics,universe,created_at\n";
  std::vector<const ParticipantProfile*> ordered;
  ordered.reserve(profiles.size());
  for (const auto& [_, p] : profiles) ordered.push_back(&p);
  std::sort(ordered.begin(), ordered.end(),
            [](const auto* a, const auto* b) { return a->user_id < b->user_id; });
  for (const auto* p : ordered) {
    out += csv_line({p->user_id, std::to_string(p->sex), std::to_string(p->age),
                     std::to_string(p->education), std::to_string(p->zone),
                     std::to_string(p->location), std::to_string(p->politics),
                     std::to_string(p->universe), format_instant(p->timestamp)});
    out.push_back('\n');
  }
  return out;
}

namespace {

void write_text_file(const std::filesystem::path& path,
                     const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

}  // namespace

void write_corpus(const PreferenceCorpus& corpus, const std::string& dir) {
  std::filesystem::path base(dir);
  std::filesystem::create_directories(base);
  write_text_file(base / "proposals.csv", serialize_proposals(corpus.catalog));
  write_text_file(base / "approvals.csv", serialize_approvals(corpus.approvals));
  write_text_file(base / "ranks.csv", serialize_ranks(corpus.ranks));
  write_text_file(base / "profiles.csv", serialize_profiles(corpus.profiles));
}

PreferenceCorpus read_corpus(const std::string& dir) {
  std::filesystem::path base(dir);
  PreferenceCorpus corpus;
  auto proposals = parse_proposals((base / "proposals.csv").string());
  if (!proposals.errors.empty()) {
    throw FormatError((base / "proposals.csv").string() + ":" +
                      std::to_string(proposals.errors.front().line) + ": " +
                      proposals.errors.front().message);
  }
  corpus.catalog = std::move(proposals.records);

  auto fail_on_errors = [&](const std::vector<RowError>& errors,
                            const std::string& file) {
    if (!errors.empty()) {
      throw FormatError(file + ":" + std::to_string(errors.front().line) +
                        ": " + errors.front().message);
    }
  };

  auto approvals =
      parse_approvals((base / "approvals.csv").string(), corpus.catalog);
  fail_on_errors(approvals.errors, (base / "approvals.csv").string());
  corpus.approvals = std::move(approvals.records);

  auto ranks = parse_ranks((base / "ranks.csv").string(), corpus.catalog);
  fail_on_errors(ranks.errors, (base / "ranks.csv").string());
  corpus.ranks = std::move(ranks.records);

  auto profiles = parse_profiles((base / "profiles.csv").string());
  fail_on_errors(profiles.errors, (base / "profiles.csv").string());
  corpus.profiles = std::move(profiles.records);

  corpus.validate();
  return corpus;
}

}  // namespace prefkit
