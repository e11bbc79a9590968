#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "doctest.h"
#include "support/fakes.hpp"
#include "va/harness/config.hpp"
#include "va/harness/dataset.hpp"
#include "va/harness/experiment.hpp"
#include "va/harness/report.hpp"
#include "va/harness/scoring.hpp"
#include "va/metrics/kendall.hpp"

using namespace va;
using namespace va::harness;

namespace {

const std::filesystem::path kData = VA_DATA_DIR;

std::vector<DatasetRecord> parse(const std::string& text) {
  std::istringstream in(text);
  return parse_dataset(in);
}

std::vector<DatasetRecord> distinct_ordinals(std::size_t n) {
  std::vector<DatasetRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    DatasetRecord r;
    r.id = "item" + std::to_string(i);
    r.text = "text number " + std::to_string(i);
    r.ordinal = static_cast<double>((i * 7) % n);
    out.push_back(r);
  }
  return out;
}

ExperimentConfig sort_config(Algorithm a) {
  ExperimentConfig c;
  c.task = Task::sort;
  c.algorithm = a;
  c.criteria = "Is X larger than Y?";
  return c;
}

/// Replies with fixed text per prompt, counting calls.
class CannedGenerator final : public oracle::TextGenerator {
 public:
  explicit CannedGenerator(std::function<std::string(const std::string&, int)> fn) : fn_(std::move(fn)) {}
  std::vector<std::string> generate(std::span<const std::string> prompts) override {
    ++calls;
    std::vector<std::string> out;
    for (const auto& p : prompts) out.push_back(fn_(p, calls));
    return out;
  }
  int calls = 0;

 private:
  std::function<std::string(const std::string&, int)> fn_;
};

}  // namespace

TEST_CASE("dataset loading") {
  const auto reviews = load_dataset(kData / "reviews.jsonl");
  REQUIRE(reviews.size() == 25);
  for (int rating = 1; rating <= 5; ++rating)
    CHECK(std::count_if(reviews.begin(), reviews.end(), [&](const auto& r) { return r.ordinal == rating; }) == 5);

  const auto recs = parse("{\"id\": 7, \"text\": \"a\"}\n\n{\"id\": \"b\", \"text\": \"b\", \"duplicate_of\": [7]}\n");
  REQUIRE(recs.size() == 2);
  CHECK(recs[0].id == "7");
  CHECK_FALSE(recs[0].ordinal.has_value());
  CHECK_FALSE(recs[0].cluster.has_value());
  CHECK(recs[1].duplicate_of == std::vector<std::string>{"7"});

  try {
    parse("{\"id\": \"a\", \"text\": \"x\"}\n{\"id\": \"a\", \"text\": \"y\"}\n");
    FAIL("expected DatasetError");
  } catch (const DatasetError& e) {
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("'a'") != std::string::npos);
  }
  try {
    parse("{\"id\": \"a\", \"text\": \"x\"}\n\n{not json\n");
    FAIL("expected DatasetError");
  } catch (const DatasetError& e) {
    CHECK(e.line() == 3);
  }
  CHECK_THROWS_AS(parse("{\"text\": \"x\"}\n"), DatasetError);
  CHECK_THROWS_AS(load_dataset(kData / "missing.jsonl"), DatasetError);

  const auto back = record_from_json(record_to_json(recs[1]));
  CHECK(back.id == recs[1].id);
  CHECK(back.duplicate_of == recs[1].duplicate_of);
}

TEST_CASE("dataset digest ignores order") {
  auto recs = distinct_ordinals(6);
  const auto d = dataset_digest(recs);
  std::reverse(recs.begin(), recs.end());
  CHECK(dataset_digest(recs) == d);
  recs[0].text += "!";
  CHECK(dataset_digest(recs) != d);
}

TEST_CASE("score parsing") {
  CHECK(parse_score("3.7") == 3.7);
  CHECK(parse_score("7") == 5.0);
  CHECK(parse_score("0.2") == 1.0);
  CHECK(parse_score("Score: 4.2 because it is good") == 4.2);
  CHECK(parse_score("<think>maybe 2.0</think> 3.5") == 3.5);
  CHECK(parse_score("4.") == 4.0);
  CHECK_FALSE(parse_score("no idea").has_value());
  CHECK(parse_score_list("1.0 2.5 3\n4.9, 5.0") == std::vector<double>{1.0, 2.5, 3.0, 4.9, 5.0});
  CHECK(parse_score_list("scores: 2 9.5 x1") == std::vector<double>{2.0, 5.0});
}

TEST_CASE("scoring prompts embed the items") {
  const oracle::PromptRegistry reg;
  const Criteria crit("Is X nicer?");
  const Item a("a", "first"), b("b", "second\nline");
  const auto iid = render_iid_prompt(reg, crit, a);
  CHECK(iid.find("'Is X nicer?'") != std::string::npos);
  CHECK(iid.ends_with("\nX: first"));
  const std::vector<Item> items{a, b};
  CHECK(render_ar_prompt(reg, crit, items).ends_with("\nstrings:\n- first\n- second\n  line"));
}

TEST_CASE("iid scoring") {
  const std::vector<Item> items{{"a", "alpha"}, {"b", "beta"}, {"c", "gamma"}, {"d", "delta"}};
  const Criteria crit("c");
  CannedGenerator truthful([](const std::string& p, int) {
    if (p.ends_with("alpha")) return "Score: 4.2 because";
    if (p.ends_with("beta")) return "1.5";
    if (p.ends_with("gamma")) return "3";
    return "2.0";
  });
  const auto out = iid_scoring(items, crit, truthful);
  CHECK(out.order == std::vector<std::string>{"b", "d", "c", "a"});
  CHECK(out.scores == std::vector<double>{4.2, 1.5, 3.0, 2.0});
  CHECK(out.flagged == 0);
  CHECK(out.requests == 4);

  CannedGenerator flat([](const std::string&, int) { return "3.0"; });
  CHECK(iid_scoring(items, crit, flat).order == std::vector<std::string>{"a", "b", "c", "d"});

  // "gamma" fails on the first call only; "delta" never parses.
  CannedGenerator flaky([](const std::string& p, int call) {
    if (p.ends_with("delta")) return std::string("dunno");
    if (p.ends_with("gamma") && call == 1) return std::string("hmm");
    return std::string("4");
  });
  const auto out2 = iid_scoring(items, crit, flaky, {}, 2);
  CHECK(out2.flagged == 1);
  CHECK(out2.scores[3] == 1.0);
  CHECK(out2.scores[2] == 4.0);
  CHECK(flaky.calls == 3);
  CHECK(out2.requests == 4 + 2 + 1);
}

TEST_CASE("autoregressive scoring pads and truncates") {
  const std::vector<Item> items{{"a", "alpha"}, {"b", "beta"}, {"c", "gamma"}, {"d", "delta"}};
  const Criteria crit("c");
  CannedGenerator full([](const std::string&, int) { return "4.0 1.0 3.5 2"; });
  const auto out = ar_scoring(items, crit, full);
  CHECK(out.order == std::vector<std::string>{"b", "d", "c", "a"});
  CHECK(out.flagged == 0);
  CHECK(out.requests == 1);

  CannedGenerator short_reply([](const std::string&, int) { return "4.0 3.0"; });
  const auto padded = ar_scoring(items, crit, short_reply);
  CHECK(padded.flagged == 2);
  CHECK(padded.scores == std::vector<double>{4.0, 3.0, 1.0, 1.0});

  CannedGenerator long_reply([](const std::string&, int) { return "1 2 3 4 5 5"; });
  const auto cut = ar_scoring(items, crit, long_reply);
  CHECK(cut.flagged == 2);
  CHECK(cut.scores.size() == 4);
}

TEST_CASE("simulated scorer reports ratings for the texts it finds") {
  SimulatedScorer scorer({{"alpha", 2.0}, {"alpha beta", 5.0}, {"gamma", 3.0}}, 0.0, 1);
  const std::vector<std::string> prompts{"rate: alpha beta", "list:\n- gamma\n- alpha\n- alpha beta", "nothing"};
  const auto replies = scorer.generate(prompts);
  CHECK(replies[0] == "5.0");
  CHECK(replies[1] == "3.0 2.0 5.0");
  CHECK_FALSE(parse_score(replies[2]).has_value());
  CHECK(scorer.modeled_seconds() == 1.0);
}

TEST_CASE("config validation") {
  auto c = sort_config(Algorithm::tste);
  CHECK_THROWS_AS(c.validate(), DomainError);
  c = sort_config(Algorithm::bitonic);
  c.seeds.clear();
  CHECK_THROWS_AS(c.validate(), DomainError);
  c = sort_config(Algorithm::iid_scoring);
  c.vote_k = 3;
  CHECK_THROWS_AS(c.validate(), DomainError);
  c = sort_config(Algorithm::mergesort);
  c.pair_with_mergesort = true;
  CHECK_THROWS_AS(c.validate(), DomainError);
  CHECK(parse_algorithm("jaccard-mds") == Algorithm::jaccard_mds);
  CHECK(parse_algorithm("iid_scoring") == Algorithm::iid_scoring);
  CHECK_THROWS_AS(parse_algorithm("quicksort"), DomainError);
  CHECK(to_string(Algorithm::ar_scoring) == "ar_scoring");
}

TEST_CASE("seed permutation is a pure function of seed and digest") {
  const auto p = seed_permutation(25, 1, 99);
  CHECK(p == seed_permutation(25, 1, 99));
  CHECK(p != seed_permutation(25, 2, 99));
  CHECK(p != seed_permutation(25, 1, 98));
  auto sorted = p;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) CHECK(sorted[i] == i);
}

TEST_CASE("sort experiment: perfect oracle mergesort is exact") {
  const auto recs = distinct_ordinals(25);
  const auto report = run_sort_experiment(recs, sort_config(Algorithm::mergesort));
  REQUIRE(report.seeds.size() == 5);
  CHECK(report.metric.mean == 1.0);
  CHECK(report.metric.stddev == 0.0);
  for (const auto& s : report.seeds) {
    CHECK(s.duplicates == 0u);
    CHECK(s.missing == 0u);
    CHECK(s.queries == s.batch_calls);
    CHECK(s.wall_time == static_cast<double>(s.batch_calls));
  }
}

TEST_CASE("sort experiment: voting helps, bitonic pairs with mergesort") {
  const auto recs = load_dataset(kData / "reviews.jsonl");
  auto naive = sort_config(Algorithm::bitonic);
  naive.oracle.flip_probability = 0.1;
  naive.pair_with_mergesort = true;
  auto robust = naive;
  robust.vote_k = 3;
  const auto a = run_sort_experiment(recs, naive);
  const auto b = run_sort_experiment(recs, robust);
  CHECK(b.metric.mean >= a.metric.mean);
  REQUIRE(a.theoretical_speedup.has_value());
  CHECK(*a.theoretical_speedup == doctest::Approx(171.0 / 15.0));
  for (const auto& s : b.seeds) {
    CHECK(s.queries == 3 * 171);
    CHECK(s.batch_calls == 15);
    REQUIRE(s.speedup.has_value());
    CHECK(*s.speedup == doctest::Approx(*s.baseline_wall_time / 15.0));
  }
  REQUIRE(b.speedup.has_value());
  const auto table = emit_report(b, ReportFormat::table);
  CHECK(table.find("speedup") != std::string::npos);
}

TEST_CASE("sort experiment: reports are reproducible and independent of seed threads") {
  const auto recs = load_dataset(kData / "reviews.jsonl");
  for (auto alg : {Algorithm::bitonic, Algorithm::mergesort, Algorithm::iid_scoring, Algorithm::ar_scoring}) {
    auto c = sort_config(alg);
    c.oracle.flip_probability = 0.15;
    c.oracle.score_noise = 0.4;
    const auto first = emit_report(run_sort_experiment(recs, c), ReportFormat::json);
    CHECK(first == emit_report(run_sort_experiment(recs, c), ReportFormat::json));
    c.seed_threads = 4;
    CHECK(first == emit_report(run_sort_experiment(recs, c), ReportFormat::json));
  }
}

TEST_CASE("sort experiment: scoring baselines") {
  const auto recs = load_dataset(kData / "reviews.jsonl");
  const double best = metrics::sort_quality(
      [&] {
        std::vector<std::string> ids;
        for (const auto& r : recs) ids.push_back(r.id);
        return ids;
      }(),
      [&] {
        std::map<std::string, double, std::less<>> m;
        for (const auto& r : recs) m[r.id] = *r.ordinal;
        return m;
      }());
  for (auto alg : {Algorithm::iid_scoring, Algorithm::ar_scoring}) {
    const auto report = run_sort_experiment(recs, sort_config(alg));
    // Noiseless scores equal the ordinals, so only rating ties hold tau-b below 1.
    CHECK(report.metric.mean == doctest::Approx(best));
    for (const auto& s : report.seeds) CHECK(s.flagged == 0u);
  }
}

TEST_CASE("sort experiment: a failing seed aborts with a partial report") {
  const auto recs = distinct_ordinals(8);
  std::unordered_map<std::string, double> scores;
  for (const auto& r : recs) scores[r.id] = *r.ordinal;
  auto c = sort_config(Algorithm::bitonic);
  c.seeds = {10, 20, 30, 40};
  ExperimentHooks hooks;
  hooks.backend = [&](std::uint64_t) {
    static int made = 0;
    auto b = std::make_shared<va::testing::ScriptedBackend>(scores);
    if (++made == 3) b->fail_on_call(2);
    return b;
  };
  const auto report = run_sort_experiment(recs, c, hooks);
  CHECK(report.aborted);
  CHECK(report.seeds.size() == 2);
  CHECK(report.failed_seed == 30u);
  REQUIRE(report.error.has_value());
  CHECK(report.error->find("bitonic layer 1") != std::string::npos);
  CHECK(report.metric.mean == 1.0);
  CHECK(emit_report(report, ReportFormat::table).find("aborted at seed 30") != std::string::npos);
}

TEST_CASE("sort experiment needs ordinals") {
  auto recs = distinct_ordinals(5);
  recs[2].ordinal.reset();
  CHECK_THROWS_AS(run_sort_experiment(recs, sort_config(Algorithm::mergesort)), DomainError);
}

TEST_CASE("cluster experiment: query counts and planted clusters") {
  std::vector<DatasetRecord> recs;
  for (int i = 0; i < 24; ++i) {
    DatasetRecord r;
    r.id = "p" + std::to_string(i);
    r.text = "paper " + std::to_string(i);
    r.cluster = "c" + std::to_string(i % 4);
    recs.push_back(r);
  }
  ExperimentConfig c;
  c.task = Task::cluster;
  c.algorithm = Algorithm::tste;
  c.criteria = "closer?";
  c.triplets_per_item = 200;
  c.seeds = {1, 2};
  const auto report = run_cluster_experiment(recs, c);
  REQUIRE(report.seeds.size() == 2);
  for (const auto& s : report.seeds) {
    CHECK(s.queries == 200u * 24u);
    CHECK(s.batch_calls == 1u);
    REQUIRE(s.violation_fraction.has_value());
    CHECK(*s.violation_fraction < 0.05);
  }
  const double ceiling = 1.0 - 6.0 / (2.0 * 24.0);  // clusters of 6 among 24
  CHECK(report.metric.mean >= 0.95 * ceiling);
  CHECK(emit_report(report, ReportFormat::json) == emit_report(run_cluster_experiment(recs, c), ReportFormat::json));
}

TEST_CASE("cluster experiment: Jaccard MDS on token-identical clusters") {
  const char* tokens[] = {"kernel", "quota", "nfs", "gui", "installer", "snapshot"};
  std::vector<DatasetRecord> recs;
  for (int i = 0; i < 24; ++i) {
    DatasetRecord r;
    r.id = "d" + std::to_string(i);
    r.text = std::string(tokens[i % 6]) + " defect report";
    r.cluster = tokens[i % 6];
    recs.push_back(r);
  }
  ExperimentConfig c;
  c.task = Task::cluster;
  c.algorithm = Algorithm::jaccard_mds;
  c.criteria = "closer?";
  c.seeds = {1};
  const auto report = run_cluster_experiment(recs, c);
  CHECK(report.metric.mean >= 0.9);
  CHECK(report.seeds[0].queries == 0u);
}

TEST_CASE("ground truth from duplicate links drops singletons") {
  const auto recs = load_dataset(kData / "defects.jsonl");
  const auto truth = ground_truth_clusters(recs);
  CHECK(truth.item_count() == 9);
  CHECK_FALSE(truth.contains("d09"));
  CHECK(truth.cluster_of("d03") == "d01");
  ExperimentConfig c;
  c.task = Task::cluster;
  c.algorithm = Algorithm::tste;
  c.criteria = "closer?";
  c.tste.dims = 3;
  c.triplets_per_item = 30;
  const auto report = run_cluster_experiment(recs, c);
  CHECK_FALSE(report.aborted);
  CHECK(report.metric.mean > 0.7);
}

TEST_CASE("report JSON round trip and table layout") {
  RunReport r;
  r.task = "sort";
  r.algorithm = "bitonic";
  r.metric_name = "tau_b";
  r.dataset_digest = "00ff";
  r.item_count = 25;
  r.config = {{"seeds", {1, 2, 3, 4, 5}}};
  for (std::uint64_t s = 1; s <= 5; ++s) {
    SeedRecord rec;
    rec.seed = s;
    rec.metric = 0.1 * static_cast<double>(s) + 1.0 / 3.0;
    rec.queries = 171;
    rec.batch_calls = 15;
    rec.wall_time = 15.0;
    rec.duplicates = 0;
    rec.missing = 0;
    rec.baseline_wall_time = 80.0 + static_cast<double>(s);
    rec.speedup = *rec.baseline_wall_time / rec.wall_time;
    r.seeds.push_back(rec);
  }
  r.theoretical_speedup = 11.4;
  r.finalize();
  CHECK(r.metric.mean == doctest::Approx(0.3 + 1.0 / 3.0));
  CHECK(r.metric.stddev == doctest::Approx(0.158113883));

  const auto json = emit_report(r, ReportFormat::json);
  const RunReport back = nlohmann::json::parse(json).get<RunReport>();
  CHECK(back == r);
  CHECK(emit_report(back, ReportFormat::json) == json);

  const auto table = emit_report(r, ReportFormat::table);
  std::istringstream lines(table);
  std::string line;
  int body = 0, aggregate = 0;
  while (std::getline(lines, line)) {
    if (!line.empty() && std::isdigit(static_cast<unsigned char>(line[0]))) ++body;
    if (line.starts_with("mean ± sd")) ++aggregate;
  }
  CHECK(body == 5);
  CHECK(aggregate == 1);
  CHECK(table.find("speedup") != std::string::npos);
  CHECK(parse_report_format("table") == ReportFormat::table);
  CHECK_THROWS_AS(parse_report_format("xml"), DomainError);
}
