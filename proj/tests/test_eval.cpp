#include "testing.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "metric_oracle.hpp"
#include "support.hpp"
#include "unitystyle/data/synthetic.hpp"
#include "unitystyle/errors.hpp"
#include "unitystyle/eval/distance.hpp"
#include "unitystyle/eval/evaluate.hpp"
#include "unitystyle/eval/metrics.hpp"
#include "unitystyle/eval/report.hpp"
#include "unitystyle/eval/rerank.hpp"
#include "unitystyle/gan/transfer_model.hpp"
#include "unitystyle/reid/model.hpp"

using namespace unitystyle;
using namespace unitystyle::eval;

namespace {

void check_close(const torch::Tensor& got, const std::vector<std::vector<double>>& want, double tol) {
  REQUIRE(got.size(0) == static_cast<int64_t>(want.size()));
  for (std::size_t i = 0; i < want.size(); ++i) {
    for (std::size_t j = 0; j < want[i].size(); ++j) {
      CHECK(got[static_cast<int64_t>(i)][static_cast<int64_t>(j)].item<double>() ==
            doctest::Approx(want[i][j]).epsilon(tol));
    }
  }
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_SUITE("eval") {
  TEST_CASE("pairwise distances") {
    auto a = torch::tensor({{1.0, 0.0, 0.0}});
    CHECK(pairwise_distances(a, a).item<double>() == doctest::Approx(0.0));
    auto b = torch::tensor({{0.0, 1.0, 0.0}});
    CHECK(pairwise_distances(a, b).item<double>() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

    torch::manual_seed(4);
    auto q = torch::randn({5, 8}, torch::kFloat64), g = torch::randn({7, 8}, torch::kFloat64);
    auto d = pairwise_distances(q, g);
    auto raw = pairwise_distances(q, g, "euclidean_raw");
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 7; ++j) {
        auto qi = q[i] / q[i].norm(), gj = g[j] / g[j].norm();
        CHECK(std::abs(d[i][j].item<double>() - (qi - gj).norm().item<double>()) < 1e-6);
        CHECK(std::abs(raw[i][j].item<double>() - (q[i] - g[j]).norm().item<double>()) < 1e-6);
      }
    }
    CHECK(torch::allclose(pairwise_distances(g, q), d.t()));
    CHECK_THROWS_AS(pairwise_distances(q, torch::randn({2, 4})), ArgumentError);
    CHECK_THROWS_AS(pairwise_distances(q, g, "manhattan"), ArgumentError);
  }

  TEST_CASE("average precision fixtures") {
    CHECK(average_precision({0, 1, 2}, {0}, {}).ap == 1.0);
    CHECK(average_precision({0, 1, 2, 3, 4}, {0, 2}, {}).ap == (1.0 + 2.0 / 3.0) / 2.0);
    CHECK(average_precision({3, 4, 0, 1}, {0}, {3, 4}).ap == 1.0);
    auto empty = average_precision({0, 1}, {1}, {1});
    CHECK_FALSE(empty.valid);
  }

  TEST_CASE("CMC fixtures") {
    CHECK((cmc_from_first_hits({0, 1, 2, 10}, {1, 5, 10}) == std::vector<double>{0.25, 0.75, 0.75}));
    std::vector<std::vector<int64_t>> rankings;
    std::vector<IndexSet> relevant, junk;
    for (int64_t first : {0, 1, 2, 10}) {
      std::vector<int64_t> r(12);
      std::iota(r.begin(), r.end(), 0);
      rankings.push_back(r);
      relevant.push_back({first});
      junk.push_back({});
    }
    CHECK((cmc(rankings, relevant, junk, {1, 5, 10}) == std::vector<double>{0.25, 0.75, 0.75}));
    CHECK((cmc({{0, 1}}, {{0}}, {{}}, {1, 2}) == std::vector<double>{1.0, 1.0}));
    CHECK((cmc({{0, 1, 2}}, {{2}}, {{}}, {1, 2}) == std::vector<double>{0.0, 0.0}));
    CHECK_THROWS_AS(cmc_from_first_hits({0}, {5, 1}), ArgumentError);
  }

  TEST_CASE("junk items never change AP") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<int64_t> ranking(8);
      std::iota(ranking.begin(), ranking.end(), 0);
      std::shuffle(ranking.begin(), ranking.end(), rng);
      IndexSet relevant{ranking[rng() % 8]};
      relevant.insert(ranking[rng() % 8]);
      const double base = average_precision(ranking, relevant, {}).ap;
      auto with_junk = ranking;
      IndexSet junk;
      for (int64_t j = 100; j < 104; ++j) {
        with_junk.insert(with_junk.begin() + static_cast<std::ptrdiff_t>(rng() % (with_junk.size() + 1)), j);
        junk.insert(j);
      }
      CHECK(average_precision(with_junk, relevant, junk).ap == base);
    }
  }

  TEST_CASE("exhaustive definition oracle over galleries of up to 6 items") {
    auto result = test_support::run_metric_oracle(6);
    INFO(result.first_mismatch);
    CHECK(result.mismatches == 0);
    CHECK(result.rankings_checked > 2'900'000);
  }

  TEST_CASE("random ranking mAP matches its expectation") {
    // One relevant item among 10 ranked uniformly: E[AP] = (1/10) * sum_r 1/r.
    double expected = 0.0;
    for (int r = 1; r <= 10; ++r) expected += 1.0 / r;
    expected /= 10.0;
    CHECK(expected == doctest::Approx(0.2928968).epsilon(1e-6));

    torch::manual_seed(21);
    double sum = 0.0;
    const int queries = 1000;
    for (int i = 0; i < queries; ++i) {
      auto order = rank_rows(pairwise_distances(torch::randn({1, 16}), torch::randn({10, 16})));
      std::vector<int64_t> ranking(order.data_ptr<int64_t>(), order.data_ptr<int64_t>() + 10);
      sum += average_precision(ranking, {0}, {}).ap;
    }
    CHECK(std::abs(sum / queries - expected) < 0.025);
  }

  TEST_CASE("evaluate_distances: oracle features, skipped queries, errors") {
    const std::vector<RowLabel> q{{1, 1, 1}, {2, 1, 1}, {3, 2, 1}};
    const std::vector<RowLabel> g{{1, 2, 1}, {2, 2, 1}, {3, 1, 1}};
    auto onehot = [](const std::vector<RowLabel>& rows) {
      auto t = torch::zeros({static_cast<int64_t>(rows.size()), 4});
      for (std::size_t i = 0; i < rows.size(); ++i) t[static_cast<int64_t>(i)][rows[i].person_id] = 1.0;
      return t;
    };
    auto report = evaluate_descriptors(onehot(q), onehot(g), q, g, EvalProtocol{}, 2);
    CHECK(report.top(1) == 1.0);
    CHECK(report.mAP == 1.0);
    CHECK_THROWS_AS(report.top(3), ArgumentError);

    const std::vector<RowLabel> q2{{1, 1, 1}, {7, 1, 1}};
    auto r2 = evaluate_distances(torch::rand({2, 3}, torch::kFloat64), q2, g, EvalProtocol{}, 2);
    CHECK(r2.skipped_queries == 1);
    CHECK_FALSE(r2.per_query_ap[1].has_value());
    CHECK_THROWS_AS(evaluate_distances(torch::rand({1, 3}, torch::kFloat64), {{9, 1, 1}}, g, EvalProtocol{}, 2),
                    EvaluationError);
    CHECK_THROWS_AS(evaluate_distances(torch::rand({2, 2}), q2, g, EvalProtocol{}, 2), ArgumentError);
  }

  TEST_CASE("camera matrix: hand-computed 2x2 grid") {
    const std::vector<RowLabel> g{{1, 1, 2}, {1, 2, 1}, {2, 1, 1}, {2, 2, 1}};
    const std::vector<RowLabel> q{{1, 1, 1}, {1, 2, 2}, {2, 1, 2}, {2, 2, 2}};
    // Row i lists gallery indices in retrieval order.
    const std::vector<std::vector<int>> order{{2, 0, 1, 3}, {1, 3, 0, 2}, {3, 0, 2, 1}, {1, 2, 3, 0}};
    auto dist = torch::zeros({4, 4}, torch::kFloat64);
    for (int i = 0; i < 4; ++i) {
      for (int r = 0; r < 4; ++r) dist[i][order[static_cast<std::size_t>(i)][static_cast<std::size_t>(r)]] = r;
    }
    auto m = evaluate_distances(dist, q, g, EvalProtocol{}, 2).camera_matrix;
    CHECK(m[0][0].value() == 0.0);
    CHECK(m[0][1].value() == 1.0);
    CHECK(m[1][0].value() == 1.0);
    CHECK(m[1][1].value() == 0.5);

    CHECK((camera_accuracy_matrix({{true, true}, {true, true}}, {1, 2}, 2) ==
           CameraMatrix{{1.0, 1.0}, {1.0, 1.0}}));
    auto absent = camera_accuracy_matrix({{true, std::nullopt, std::nullopt}}, {1}, 3);
    CHECK(absent[0][0].value() == 1.0);
    CHECK_FALSE(absent[0][1].has_value());
    CHECK_FALSE(absent[2][2].has_value());
    CHECK(camera_matrix_csv(absent).find("NA") != std::string::npos);
    CHECK_THROWS_AS(camera_accuracy_matrix({}, {}, 1), ArgumentError);
  }

  TEST_CASE("re-ranking matches the reference computation") {
    auto q = torch::tensor({{0.0, 0.0}, {1.0, 0.2}}, torch::kFloat64);
    auto g = torch::tensor({{0.1, 0.0}, {0.9, 0.3}, {0.5, 1.0}}, torch::kFloat64);
    auto qg = pairwise_distances(q, g, "euclidean_raw"), qq = pairwise_distances(q, q, "euclidean_raw"),
         gg = pairwise_distances(g, g, "euclidean_raw");
    check_close(rerank(qg, qq, gg, {2, 1, 0.3}),
                {{0.008193136418839505, 0.9159999999999999, 1.0},
                 {0.9451923076923077, 0.23630704710777606, 0.7963295020661212}},
                1e-9);
    check_close(rerank(qg, qq, gg, {3, 2, 0.3}),
                {{0.0024, 0.7813793428402693, 0.90225785448526},
                 {0.8105716505325771, 0.005769230769230767, 0.4551880634043956}},
                1e-9);
    check_close(rerank(qg, qq, gg, {4, 2, 0.0}),
                {{0.0, 0.5172639169551181, 0.5083109728649816},
                 {0.5172639169551181, 0.0, 0.21037292339757063}},
                1e-9);
  }

  TEST_CASE("re-ranking endpoint, symmetry and parameter checks") {
    torch::manual_seed(8);
    for (int t = 0; t < 20; ++t) {
      auto q = torch::randn({6, 5}), g = torch::randn({9, 5});
      auto base = rank_rows(pairwise_distances(q, g));
      CHECK(torch::equal(rank_rows(rerank_features(q, g, {20, 6, 1.0})), base));
    }
    auto q = torch::randn({3, 4}), g = torch::randn({5, 4});
    g[4] = g[2].clone();
    auto d = rerank_features(q, g, {4, 2, 0.3});
    CHECK(torch::allclose(d.select(1, 2), d.select(1, 4)));
    CHECK_THROWS_AS(rerank_features(q, g, {2, 2, 0.3}), ArgumentError);
    CHECK_THROWS_AS(rerank_features(q, g, {3, 0, 0.3}), ArgumentError);
    CHECK_THROWS_AS(rerank_features(q, g, {3, 2, 1.5}), ArgumentError);
    RerankOptions o = nlohmann::json(RerankOptions{7, 3, 0.4}).get<RerankOptions>();
    CHECK(o.k1 == 7);
    CHECK(o.lambda == 0.4);
  }

  TEST_CASE("end-to-end evaluation on the toy corpus, with and without unity inputs") {
    data::SyntheticConfig sc;
    sc.height = sc.width = 32;
    auto ds = data::make_synthetic_dataset(sc);
    auto model = reid::build_reid_model(ds.num_identities, "reduced", 32, 32);
    auto plain = evaluate(model, ds, EvalProtocol{});
    CHECK_FALSE(plain.unity_inputs());

    gan::GeneratorSpec gs;
    gs.height = gs.width = 32;
    gs.base_channels = 4;
    gs.num_scales = 2;
    gan::DiscriminatorSpec dspec;
    dspec.base_channels = 4;
    dspec.num_layers = 2;
    std::vector<gan::TransferModel> transfers;
    for (int c = 1; c <= ds.num_cameras; ++c) {
      transfers.push_back(gan::TransferModel::create(c, gs, dspec, gan::LossWeights{}, static_cast<uint64_t>(c)));
    }
    auto unity = evaluate(model, ds, EvalProtocol{}, &transfers);
    CHECK(unity.unity_inputs());
    for (const auto* r : {&plain, &unity}) {
      CHECK(r->mAP >= 0.0);
      CHECK(r->mAP <= 1.0);
      for (std::size_t k = 1; k < r->cmc.size(); ++k) CHECK(r->cmc[k - 1] <= r->cmc[k]);
      CHECK(r->camera_matrix.size() == static_cast<std::size_t>(ds.num_cameras));
    }

    test_support::TempDir dir;
    write_report(unity, dir.path() / "report");
    auto json = nlohmann::json::parse(slurp(dir.path() / "report.json"));
    CHECK(json.at("meta").at("unity_inputs") == true);
    CHECK(slurp(dir.path() / "report_camera_long.csv").rfind("query_cam,gallery_cam,accuracy", 0) == 0);
  }

  TEST_CASE("ablation table layout") {
    std::vector<AblationRow> rows{{"IDE", 0.5, 0.25}, {"+RE", 1.0, 0.75}};
    CHECK(ablation_csv(rows) == "method,top1,mAP\nIDE,50.00,25.00\n+RE,100.00,75.00\n");
    CHECK(ablation_text(rows).find("+RE") != std::string::npos);
  }
}
