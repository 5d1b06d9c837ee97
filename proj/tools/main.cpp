// prefkit command-line driver: ingest ballots, curate, analyze agreement and
// divisiveness, and run the axiomatic/spectral audits. Every run is fully
// determined by (inputs, config, seed); reports embed the config hash.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "prefkit/audit.hpp"
#include "prefkit/corpus.hpp"
#include "prefkit/csv.hpp"
#include "prefkit/curation.hpp"
#include "prefkit/divisiveness.hpp"
#include "prefkit/report.hpp"
#include "prefkit/synthgen.hpp"
#include "prefkit/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace prefkit;

namespace {

struct RunConfig {
  std::string config_file;
  std::string input;
  std::string kind = "platform-csv";  // platform-csv | preflib-soc | synthetic-spec
  std::string function = "win";       // win | copeland | elo | ahp
  std::vector<std::string> splits = {"all"};
  std::string codebook = "france";
  std::string source = "both";  // rank | approval | both
  int bootstrap_iters = 30;
  double bootstrap_fraction = 0.5;
  bool bootstrap_divisiveness = false;
  int iia_threshold = 4;
  int convergence_iters = 30;
  std::vector<std::size_t> convergence_sizes;
  std::uint64_t seed = 0;
  std::string out = "out";
  std::string format = "csv,json";
  std::string accepted_universes;  // empty = kind-dependent default
  std::string universes;           // restrict ballots to these panel sizes
  std::string orientations_file;
  std::string scenario = "exclude-centrist";
  std::string consent_file;
  std::string ip_scores_file;
};

// Canonical "key=value" text of the resolved config; hashed into each
// report so outputs are traceable and reruns comparable.
std::string canonical_config(const RunConfig& c) {
  std::map<std::string, std::string> kv;
  kv["input"] = c.input;
  kv["kind"] = c.kind;
  kv["function"] = c.function;
  std::string splits;
  for (const auto& s : c.splits) splits += (splits.empty() ? "" : ",") + s;
  kv["split"] = splits;
  kv["codebook"] = c.codebook;
  kv["source"] = c.source;
  kv["bootstrap_iters"] = std::to_string(c.bootstrap_iters);
  kv["bootstrap_fraction"] = std::to_string(c.bootstrap_fraction);
  kv["bootstrap_divisiveness"] = c.bootstrap_divisiveness ? "1" : "0";
  kv["iia_threshold"] = std::to_string(c.iia_threshold);
  kv["convergence_iters"] = std::to_string(c.convergence_iters);
  std::string sizes;
  for (auto s : c.convergence_sizes) {
    sizes += (sizes.empty() ? "" : ",") + std::to_string(s);
  }
  kv["convergence_sizes"] = sizes;
  kv["seed"] = std::to_string(c.seed);
  kv["format"] = c.format;
  kv["accepted_universes"] = c.accepted_universes;
  kv["universes"] = c.universes;
  kv["orientations"] = c.orientations_file;
  kv["scenario"] = c.scenario;
  kv["consent"] = c.consent_file;
  kv["ip_scores"] = c.ip_scores_file;
  std::string text;
  for (const auto& [k, v] : kv) text += k + "=" + v + "\n";
  return text;
}

void apply_config_file(RunConfig& c, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(line_no) +
                        ": expected key = value");
    }
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key == "input") {
      c.input = value;
    } else if (key == "kind") {
      c.kind = value;
    } else if (key == "function") {
      c.function = value;
    } else if (key == "split") {
      c.splits.clear();
      std::istringstream items(value);
      std::string piece;
      while (std::getline(items, piece, ',')) {
        if (!piece.empty()) c.splits.push_back(piece);
      }
    } else if (key == "codebook") {
      c.codebook = value;
    } else if (key == "source") {
      c.source = value;
    } else if (key == "bootstrap_iters") {
      c.bootstrap_iters = std::stoi(value);
    } else if (key == "bootstrap_fraction") {
      c.bootstrap_fraction = std::stod(value);
    } else if (key == "bootstrap_divisiveness") {
      c.bootstrap_divisiveness = value == "1" || value == "true";
    } else if (key == "iia_threshold") {
      c.iia_threshold = std::stoi(value);
    } else if (key == "convergence_iters") {
      c.convergence_iters = std::stoi(value);
    } else if (key == "seed") {
      c.seed = std::stoull(value);
    } else if (key == "out") {
      c.out = value;
    } else if (key == "format") {
      c.format = value;
    } else if (key == "accepted_universes") {
      c.accepted_universes = value;
    } else if (key == "universes") {
      c.universes = value;
    } else if (key == "orientations") {
      c.orientations_file = value;
    } else if (key == "scenario") {
      c.scenario = value;
    } else if (key == "consent") {
      c.consent_file = value;
    } else if (key == "ip_scores") {
      c.ip_scores_file = value;
    } else {
      throw ConfigError(path + ":" + std::to_string(line_no) +
                        ": unknown key '" + key + "'");
    }
  }
}

bool wants_format(const RunConfig& c, const std::string& fmt) {
  return c.format.find(fmt) != std::string::npos;
}

void write_file(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

PreferenceCorpus load_corpus(const RunConfig& c) {
  if (c.input.empty()) throw ConfigError("--input is required");
  if (c.kind == "platform-csv") return read_corpus(c.input);
  if (c.kind == "preflib-soc") return parse_preflib_soc(c.input);
  if (c.kind == "synthetic-spec") return generate(parse_electorate_spec(c.input));
  throw ConfigError("unknown kind '" + c.kind +
                    "' (expected platform-csv, preflib-soc, or synthetic-spec)");
}

std::vector<PairwiseRecord> corpus_to_pairs(const PreferenceCorpus& corpus,
                                            const std::string& source) {
  std::vector<PairwiseRecord> pairs;
  if (source == "rank" || source == "both") {
    auto from_ranks = ranks_to_pairs(corpus.ranks);
    pairs.insert(pairs.end(), from_ranks.begin(), from_ranks.end());
  }
  if (source == "approval" || source == "both") {
    auto from_approvals = approvals_to_pairs(corpus.approvals);
    pairs.insert(pairs.end(), from_approvals.begin(), from_approvals.end());
  }
  if (source != "rank" && source != "approval" && source != "both") {
    throw ConfigError("unknown source '" + source +
                      "' (expected rank, approval, or both)");
  }
  return pairs;
}

CurationConfig curation_config(const RunConfig& c,
                               const PreferenceCorpus& corpus) {
  CurationConfig config;
  if (!c.accepted_universes.empty() && c.accepted_universes != "auto") {
    config.accepted_universes.clear();
    std::istringstream items(c.accepted_universes);
    std::string piece;
    while (std::getline(items, piece, ',')) {
      if (!piece.empty()) config.accepted_universes.insert(std::stoi(piece));
    }
  } else if (c.accepted_universes == "auto" || c.kind != "platform-csv") {
    // PrefLib and synthetic panels use their own panel sizes; accept what
    // the data contains instead of the platform's universe list.
    config.accepted_universes.clear();
    for (const auto& r : corpus.approvals) {
      config.accepted_universes.insert(r.universe);
    }
    for (const auto& r : corpus.ranks) {
      config.accepted_universes.insert(r.universe);
    }
    if (config.accepted_universes.empty()) {
      config.accepted_universes = {2, 4, 5, 6};
    }
  }
  if (!c.consent_file.empty()) {
    std::ifstream in(c.consent_file);
    if (!in) throw ConfigError(c.consent_file + ": cannot open consent file");
    std::set<std::string> ids;
    std::string line;
    while (std::getline(in, line)) {
      while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) {
        line.pop_back();
      }
      if (!line.empty()) ids.insert(line);
    }
    config.consent_ids = std::move(ids);
  }
  if (!c.ip_scores_file.empty()) {
    auto table = CsvTable::read_file(c.ip_scores_file);
    size_t col_user = table.require_column("user_id");
    size_t col_ip = table.require_column("ip_hash");
    size_t col_score = table.require_column("score");
    std::unordered_map<std::string, std::string> user_ip;
    std::unordered_map<std::string, std::vector<double>> ip_scores;
    for (const auto& row : table.rows()) {
      std::string user(CsvTable::field(row, col_user));
      std::string ip(CsvTable::field(row, col_ip));
      double score = std::stod(std::string(CsvTable::field(row, col_score)));
      user_ip[user] = ip;
      ip_scores[ip].push_back(score);
    }
    config.user_ip_hash = std::move(user_ip);
    config.ip_scores = std::move(ip_scores);
  }
  return config;
}

std::unordered_map<std::string, Orientation> load_orientations(
    const std::string& path) {
  auto table = CsvTable::read_file(path);
  size_t col_candidate = table.require_column("candidate");
  size_t col_orientation = table.require_column("orientation");
  std::unordered_map<std::string, Orientation> out;
  for (const auto& row : table.rows()) {
    std::string candidate(CsvTable::field(row, col_candidate));
    std::string_view orientation = CsvTable::field(row, col_orientation);
    if (orientation == "left") {
      out[candidate] = Orientation::left;
    } else if (orientation == "right") {
      out[candidate] = Orientation::right;
    } else if (orientation == "centrist") {
      out[candidate] = Orientation::centrist;
    } else {
      throw ConfigError(path + ": orientation must be left, right, or centrist");
    }
  }
  return out;
}

long distinct_users(const PreferenceCorpus& corpus) {
  std::set<std::string> users;
  for (const auto& r : corpus.approvals) users.insert(r.user_id);
  for (const auto& r : corpus.ranks) users.insert(r.user_id);
  return static_cast<long>(users.size());
}

std::vector<std::size_t> auto_sizes(std::size_t n_records) {
  std::vector<std::size_t> sizes;
  for (std::size_t div : {128, 64, 32, 16, 8, 4, 2, 1}) {
    std::size_t s = n_records / div;
    if (s >= 2 && (sizes.empty() || s > sizes.back())) sizes.push_back(s);
  }
  if (sizes.empty() && n_records >= 2) sizes.push_back(n_records);
  return sizes;
}

// Shared analysis state assembled by analyze and audit.
struct Pipeline {
  PreferenceCorpus corpus;
  ProposalIndex index;
  SuspicionReport suspicion;
  std::vector<PairwiseRecord> raw_pairs;
  std::vector<PairwiseRecord> curated;
  ScoreFunction fn;
};

void filter_universes(PreferenceCorpus& corpus, const std::string& spec) {
  if (spec.empty()) return;
  std::set<int> keep;
  std::istringstream items(spec);
  std::string piece;
  while (std::getline(items, piece, ',')) {
    if (!piece.empty()) keep.insert(std::stoi(piece));
  }
  std::erase_if(corpus.approvals,
                [&](const ApprovalRecord& r) { return !keep.count(r.universe); });
  std::erase_if(corpus.ranks,
                [&](const RankRecord& r) { return !keep.count(r.universe); });
}

Pipeline run_pipeline(const RunConfig& c) {
  Pipeline p;
  p.corpus = load_corpus(c);
  p.corpus.validate();
  filter_universes(p.corpus, c.universes);
  p.index = ProposalIndex::from_catalog(p.corpus.catalog);
  p.raw_pairs = corpus_to_pairs(p.corpus, c.source);
  p.suspicion = detect_suspicious(p.corpus, curation_config(c, p.corpus));
  p.curated = curate(p.raw_pairs, p.suspicion);
  p.fn = score_by_name(c.function, c.seed);
  if (p.curated.empty()) {
    throw ComputeError("no pairwise records survive curation");
  }
  return p;
}

int cmd_ingest(const RunConfig& c) {
  // Parse each file separately so every row error is reported with context.
  long row_errors = 0;
  PreferenceCorpus corpus;
  if (c.kind == "platform-csv") {
    fs::path base(c.input);
    auto proposals = parse_proposals((base / "proposals.csv").string());
    auto report = [&](const std::string& file,
                      const std::vector<RowError>& errors) {
      for (const auto& e : errors) {
        std::cerr << file << ":" << e.line << ": " << e.message << "\n";
        ++row_errors;
      }
    };
    report((base / "proposals.csv").string(), proposals.errors);
    corpus.catalog = std::move(proposals.records);
    auto approvals =
        parse_approvals((base / "approvals.csv").string(), corpus.catalog);
    report((base / "approvals.csv").string(), approvals.errors);
    corpus.approvals = std::move(approvals.records);
    auto ranks = parse_ranks((base / "ranks.csv").string(), corpus.catalog);
    report((base / "ranks.csv").string(), ranks.errors);
    corpus.ranks = std::move(ranks.records);
    auto profiles = parse_profiles((base / "profiles.csv").string());
    report((base / "profiles.csv").string(), profiles.errors);
    corpus.profiles = std::move(profiles.records);
    corpus.validate();
  } else {
    corpus = load_corpus(c);
  }

  write_corpus(corpus, (fs::path(c.out) / "corpus").string());

  json summary{{"catalog", corpus.catalog.size()},
               {"approvals", corpus.approvals.size()},
               {"ranks", corpus.ranks.size()},
               {"profiles", corpus.profiles.size()},
               {"voters", distinct_users(corpus)},
               {"row_errors", row_errors},
               {"out", (fs::path(c.out) / "corpus").string()}};
  std::cout << summary.dump(2) << "\n";
  return row_errors > 0 ? 1 : 0;
}

int cmd_curate(const RunConfig& c) {
  auto meta = make_meta(canonical_config(c));
  Pipeline p = run_pipeline(c);
  write_file(fs::path(c.out) / "suspicion_report.json",
             suspicion_report_json(p.suspicion, meta));
  write_file(fs::path(c.out) / "pairs_curated.csv",
             serialize_pairwise(p.curated));
  json summary{{"pairs_raw", p.raw_pairs.size()},
               {"pairs_curated", p.curated.size()},
               {"flagged_users", p.suspicion.flagged_count()},
               {"out", c.out}};
  std::cout << summary.dump(2) << "\n";
  return 0;
}

int cmd_analyze(const RunConfig& c) {
  auto meta = make_meta(canonical_config(c));
  Pipeline p = run_pipeline(c);
  fs::path out(c.out);

  // Scores: bootstrap means when iterations are requested, direct otherwise.
  ScoreTable scores;
  if (c.bootstrap_iters > 0) {
    BootstrapConfig bc{c.bootstrap_iters, c.bootstrap_fraction, c.seed};
    scores = bootstrap(p.fn, p.curated, p.index, bc);
  } else {
    scores = p.fn.fn(p.curated, p.index);
  }
  Ranking ranking = rank_from_scores(scores);
  if (wants_format(c, "csv")) {
    write_file(out / "scores.csv", score_table_csv(scores, &ranking, meta));
  }
  if (wants_format(c, "json")) {
    write_file(out / "scores.json", score_table_json(scores, &ranking, meta));
  }

  // Divisiveness: pairwise D plus the requested demographic splits.
  std::vector<DivisivenessTable> div_tables;
  std::vector<std::string> warnings;
  json aggregate = json::object();
  DivisivenessConfig dconfig;
  std::optional<BootstrapConfig> div_bootstrap;
  if (c.bootstrap_divisiveness && c.bootstrap_iters > 0) {
    div_bootstrap = BootstrapConfig{c.bootstrap_iters, c.bootstrap_fraction, c.seed};
    dconfig.bootstrap = div_bootstrap;
  }
  div_tables.push_back(pairwise_divisiveness(p.curated, p.fn, p.index, dconfig));

  std::vector<SplitSpec> requested;
  bool all = std::find(c.splits.begin(), c.splits.end(), "all") != c.splits.end();
  for (const auto& split : default_splits(c.codebook)) {
    if (all || std::find(c.splits.begin(), c.splits.end(), split.dimension) !=
                   c.splits.end()) {
      requested.push_back(split);
    }
  }
  std::vector<SplitSpec> usable;
  for (const auto& split : requested) {
    try {
      auto [side_a, side_b] =
          split_scores(p.curated, p.corpus.profiles, split, p.fn, p.index);
      div_tables.push_back(split_divisiveness(p.curated, p.corpus.profiles,
                                              split, p.fn, p.index,
                                              div_bootstrap));
      aggregate["split:" + split.dimension] =
          aggregate_divisiveness(side_a, side_b);
      usable.push_back(split);
    } catch (const ComputeError& e) {
      warnings.push_back(e.what());
    }
  }
  if (wants_format(c, "csv")) {
    write_file(out / "divisiveness.csv", divisiveness_csv(div_tables, meta));
  }
  if (wants_format(c, "json")) {
    write_file(out / "divisiveness.json", divisiveness_json(div_tables, meta));
  }
  json div_regression;
  if (!usable.empty()) {
    auto multi = multidimensional_report(p.curated, p.corpus.profiles, usable,
                                         p.fn, p.index);
    write_file(out / "multidimensional.csv", multidimensional_csv(multi, meta));

    // Standardized regression of D on |W| and the split gaps, over
    // proposals with every column defined.
    try {
      std::vector<std::string> names = {"|W|"};
      for (std::size_t col = 0; col + 1 < multi.columns.size(); ++col) {
        names.push_back(multi.columns[col]);
      }
      std::vector<std::vector<double>> predictors(names.size());
      std::vector<double> response;
      for (std::size_t i = 0; i < multi.proposal_ids.size(); ++i) {
        auto w = scores.value(multi.proposal_ids[i]);
        if (!w || !multi.values[i].back().has_value()) continue;
        bool complete = true;
        for (std::size_t col = 0; col + 1 < multi.columns.size(); ++col) {
          complete = complete && multi.values[i][col].has_value();
        }
        if (!complete) continue;
        predictors[0].push_back(std::abs(*w));
        for (std::size_t col = 0; col + 1 < multi.columns.size(); ++col) {
          predictors[col + 1].push_back(*multi.values[i][col]);
        }
        response.push_back(*multi.values[i].back());
      }
      div_regression = json::parse(regression_summary_json(
          stats::ols_standardized(predictors, response, names)));
    } catch (const ComputeError& e) {
      warnings.push_back(std::string("divisiveness regression skipped: ") +
                         e.what());
    }
  }

  if (!c.orientations_file.empty()) {
    auto orientations = load_orientations(c.orientations_file);
    SplitSpec politics;
    for (const auto& split : default_splits(c.codebook)) {
      if (split.dimension == "politics") politics = split;
    }
    auto matrix = responsiveness_matrix(p.corpus, orientations,
                                        scenario_by_name(c.scenario), politics);
    write_file(out / "responsiveness.json",
               responsiveness_json(matrix, c.scenario, meta));
  }

  write_file(out / "suspicion_report.json",
             suspicion_report_json(p.suspicion, meta));

  auto consistency_result = consistency(p.curated);
  auto transitivity_result = transitivity(p.curated);
  json summary{
      {"meta", json{{"tool", "prefkit"},
                    {"version", meta.version},
                    {"config_hash", meta.config_hash}}},
      {"function", p.fn.name},
      {"catalog", p.corpus.catalog.size()},
      {"pairs_raw", p.raw_pairs.size()},
      {"pairs_curated", p.curated.size()},
      {"flagged_users", p.suspicion.flagged_count()},
      {"consistency", consistency_result.overall
                          ? json(*consistency_result.overall)
                          : json(nullptr)},
      {"transitivity", transitivity_result.overall
                           ? json(*transitivity_result.overall)
                           : json(nullptr)},
      {"aggregate_divisiveness", aggregate},
      {"warnings", warnings}};
  if (!div_regression.is_null()) {
    summary["divisiveness_regression"] = div_regression;
  }
  write_file(out / "summary.json", summary.dump(2) + "\n");
  std::cout << summary.dump(2) << "\n";
  return 0;
}

int cmd_audit(const RunConfig& c) {
  auto meta = make_meta(canonical_config(c));
  Pipeline p = run_pipeline(c);
  fs::path out(c.out);

  PairwiseTally tally = build_tally(p.curated, p.index);
  PairwiseMatrix matrix = pairwise_matrix(tally);
  ScoreTable scores = p.fn.fn(p.curated, p.index);
  Ranking ranking = rank_from_scores(scores);

  AuditBundle bundle;
  bundle.efficiency = pairwise_efficiency(matrix, ranking);

  auto agreement_builder = make_rank_builder(p.fn, p.index);
  auto divisiveness_builder = make_divisiveness_rank_builder(p.fn, p.index);
  bundle.iia = iia_robustness(p.curated, agreement_builder, c.iia_threshold);

  std::vector<std::size_t> sizes = c.convergence_sizes.empty()
                                       ? auto_sizes(p.curated.size())
                                       : c.convergence_sizes;
  bundle.convergence = convergence_curve(p.curated, agreement_builder, sizes,
                                         c.convergence_iters, c.seed);

  // A homogeneous population has no divisiveness ranking at all (every
  // sub-population term is skipped); the divisiveness audits then drop out.
  std::vector<std::string> warnings;
  try {
    bundle.iia_divisiveness =
        iia_robustness(p.curated, divisiveness_builder, c.iia_threshold);
    bundle.convergence_divisiveness = convergence_curve(
        p.curated, divisiveness_builder, sizes, c.convergence_iters, c.seed);
  } catch (const ComputeError& e) {
    warnings.push_back(std::string("divisiveness ranking audits skipped: ") +
                       e.what());
  }

  auto divisiveness_table = pairwise_divisiveness(p.curated, p.fn, p.index);
  bundle.spectral = svd_factors(matrix, std::min<std::size_t>(5, matrix.n()));
  bundle.alignment = eigenvector_alignment(*bundle.spectral, scores,
                                           divisiveness_table, p.index);

  write_file(out / "audit_report.json", audit_report_json(bundle, meta));
  if (wants_format(c, "csv")) {
    write_file(out / "convergence.csv", convergence_csv(*bundle.convergence, meta));
    if (bundle.convergence_divisiveness) {
      write_file(out / "convergence_divisiveness.csv",
                 convergence_csv(*bundle.convergence_divisiveness, meta));
    }
    write_file(out / "spectral.csv",
               spectral_csv(*bundle.spectral, &*bundle.alignment, meta));
  }
  json summary{{"efficiency", *bundle.efficiency},
               {"iia_robustness", bundle.iia->robustness},
               {"iia_top_robustness", bundle.iia->top_robustness},
               {"warnings", warnings},
               {"out", c.out}};
  if (bundle.iia_divisiveness) {
    summary["iia_divisiveness_robustness"] = bundle.iia_divisiveness->robustness;
  }
  std::cout << summary.dump(2) << "\n";
  return 0;
}

int cmd_synth(const RunConfig& c) {
  if (c.input.empty()) throw ConfigError("--input spec file is required");
  auto spec = parse_electorate_spec(c.input);
  auto corpus = generate(spec);
  write_corpus(corpus, (fs::path(c.out) / "corpus").string());
  json summary{{"model", electorate_model_name(spec.model)},
               {"proposals", corpus.catalog.size()},
               {"users", corpus.profiles.size()},
               {"ranks", corpus.ranks.size()},
               {"out", (fs::path(c.out) / "corpus").string()}};
  std::cout << summary.dump(2) << "\n";
  return 0;
}

void add_common_options(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--config", c.config_file, "flat key=value config file");
  cmd->add_option("--input", c.input, "input path (dir, .soc file, or spec)");
  cmd->add_option("--kind", c.kind,
                  "dataset kind: platform-csv, preflib-soc, synthetic-spec");
  cmd->add_option("--function", c.function,
                  "score function: win, copeland, elo, ahp");
  cmd->add_option("--split", c.splits,
                  "demographic splits (dimension names or 'all')");
  cmd->add_option("--codebook", c.codebook, "split codebook: france or brazil");
  cmd->add_option("--source", c.source,
                  "ballot source: rank, approval, or both");
  cmd->add_option("--bootstrap-iters", c.bootstrap_iters,
                  "bootstrap iterations (0 disables)");
  cmd->add_option("--bootstrap-fraction", c.bootstrap_fraction,
                  "bootstrap sample fraction");
  cmd->add_flag("--bootstrap-divisiveness", c.bootstrap_divisiveness,
                "bootstrap CIs for the divisiveness tables too");
  cmd->add_option("--iia-threshold", c.iia_threshold,
                  "IIA acceptable rank distance");
  cmd->add_option("--convergence-iters", c.convergence_iters,
                  "subsamples per convergence size");
  cmd->add_option("--convergence-sizes", c.convergence_sizes,
                  "explicit convergence sample sizes");
  cmd->add_option("--seed", c.seed, "random seed");
  cmd->add_option("--out", c.out, "output directory");
  cmd->add_option("--format", c.format, "output formats: csv, json, or csv,json");
  cmd->add_option("--accepted-universes", c.accepted_universes,
                  "comma list or 'auto' (default: platform list, auto for "
                  "preflib/synthetic)");
  cmd->add_option("--universes", c.universes,
                  "analyze only ballots from these panel sizes");
  cmd->add_option("--orientations", c.orientations_file,
                  "candidate orientation csv (candidate,orientation)");
  cmd->add_option("--scenario", c.scenario,
                  "centrist handling: exclude-centrist, centrist-right, "
                  "centrist-left");
  cmd->add_option("--consent", c.consent_file, "consent user-id list file");
  cmd->add_option("--ip-scores", c.ip_scores_file,
                  "ip score csv (user_id,ip_hash,score)");
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig config;

  // Config file values act as defaults; explicit flags override them, so
  // the file is located and applied before the real parse.
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc) {
      config.config_file = argv[i + 1];
    } else if (arg.rfind("--config=", 0) == 0) {
      config.config_file = arg.substr(9);
    }
  }
  try {
    if (!config.config_file.empty()) {
      apply_config_file(config, config.config_file);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  CLI::App app{"pairwise preference analytics: agreement rankings, "
               "divisiveness metrics, and axiomatic audits"};
  app.set_version_flag("--version", std::string("prefkit ") + kVersion);
  app.require_subcommand(1);

  auto* ingest = app.add_subcommand("ingest", "parse ballots into the canonical corpus");
  auto* curate_cmd = app.add_subcommand("curate", "bot detection and pair dedup");
  auto* analyze = app.add_subcommand("analyze", "scores, rankings, divisiveness");
  auto* audit_cmd = app.add_subcommand("audit", "efficiency, IIA, convergence, SVD");
  auto* synth = app.add_subcommand("synth", "generate a synthetic electorate");
  for (auto* cmd : {ingest, curate_cmd, analyze, audit_cmd, synth}) {
    add_common_options(cmd, config);
  }

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) return cmd_ingest(config);
    if (*curate_cmd) return cmd_curate(config);
    if (*analyze) return cmd_analyze(config);
    if (*audit_cmd) return cmd_audit(config);
    if (*synth) return cmd_synth(config);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
