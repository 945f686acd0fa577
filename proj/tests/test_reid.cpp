#include "testing.hpp"

#include <cmath>
#include <random>

#include "support.hpp"
#include "unitystyle/data/synthetic.hpp"
#include "unitystyle/errors.hpp"
#include "unitystyle/gan/transfer_model.hpp"
#include "unitystyle/reid/features.hpp"
#include "unitystyle/reid/loss.hpp"
#include "unitystyle/reid/model.hpp"
#include "unitystyle/reid/trainer.hpp"

using namespace unitystyle;
using namespace unitystyle::reid;

namespace {

ClassProbabilities onehot_like(std::vector<double> p, int64_t y) { return {std::move(p), y}; }

std::vector<ClassProbabilities> random_tables(std::mt19937_64& rng, int n, int classes) {
  std::uniform_real_distribution<double> u(0.01, 1.0);
  std::uniform_int_distribution<int64_t> label(0, classes - 1);
  std::vector<ClassProbabilities> out;
  for (int i = 0; i < n; ++i) {
    std::vector<double> p(static_cast<std::size_t>(classes));
    double sum = 0.0;
    for (auto& v : p) sum += (v = u(rng));
    for (auto& v : p) v /= sum;
    out.push_back({p, label(rng)});
  }
  return out;
}

data::DatasetIndex toy_corpus() {
  data::SyntheticConfig sc;
  sc.height = 32;
  sc.width = 32;
  return data::make_synthetic_dataset(sc);
}

ReidTrainConfig toy_config() {
  ReidTrainConfig c;
  c.epochs = 8;
  c.batch_n = 16;
  c.height = 32;
  c.width = 32;
  c.learning_rate = 0.01;
  c.seed = 3;
  return c;
}

}  // namespace

TEST_SUITE("reid") {
  TEST_CASE("model construction and descriptor sizes") {
    CHECK_THROWS_AS(build_reid_model(1, "reduced"), ConfigError);
    CHECK_THROWS_AS(build_reid_model(10, "vgg"), ConfigError);
    auto reduced = build_reid_model(751, "reduced", 64, 32);
    reduced->eval();
    auto out = reduced->forward(torch::rand({2, 3, 64, 32}));
    CHECK(out.descriptor.sizes() == torch::IntArrayRef({2, 256}));
    CHECK(out.logits.sizes() == torch::IntArrayRef({2, 751}));
    auto sums = torch::softmax(out.logits, 1).sum(1);
    CHECK(((sums - 1.0).abs() < 1e-6).all().item<bool>());
  }

  TEST_CASE("full backbone yields 2048-d descriptors at 256x128") {
    auto full = build_reid_model(751, "resnet50", 256, 128);
    full->eval();
    torch::NoGradGuard no_grad;
    auto out = full->forward(torch::rand({1, 3, 256, 128}));
    CHECK(out.descriptor.size(1) == 2048);
    CHECK(out.logits.size(1) == 751);
  }

  TEST_CASE("cross-entropy analytic values and clamping") {
    CHECK(cross_entropy(onehot_like({0.0, 1.0}, 1)) == 0.0);
    CHECK(std::abs(cross_entropy(onehot_like({0.5, 0.5}, 0)) - std::log(2.0)) < 1e-12);
    CHECK(std::abs(cross_entropy(onehot_like(std::vector<double>(10, 0.1), 4)) - std::log(10.0)) < 1e-12);
    const double clamped = cross_entropy(onehot_like({1.0, 0.0}, 1));
    CHECK(std::isfinite(clamped));
    CHECK(clamped == doctest::Approx(-std::log(kProbabilityFloor)));
    CHECK_THROWS_AS(cross_entropy(onehot_like({0.5, 0.6}, 0)), ArgumentError);
    CHECK_THROWS_AS(cross_entropy(onehot_like({0.5, 0.5}, 2)), ArgumentError);
  }

  TEST_CASE("no label smoothing: a confident correct prediction costs exactly 0") {
    auto logits = torch::tensor({{0.0, 1000.0, 0.0}}, torch::kFloat64);
    CHECK(cross_entropy(logits, torch::tensor({1}, torch::kLong)).item<double>() == 0.0);
  }

  TEST_CASE("re-ID loss: analytic cases and the product form") {
    std::vector<ClassProbabilities> ones{onehot_like({1.0, 0.0}, 0)};
    CHECK(reid_loss(ones, ones) == 0.0);
    std::vector<ClassProbabilities> half{onehot_like({0.5, 0.5}, 1)};
    CHECK(std::abs(reid_loss(half, half) - 2.0 * std::log(2.0)) < 1e-12);
    std::mt19937_64 rng(5);
    auto r = random_tables(rng, 16, 7), u = random_tables(rng, 16, 7);
    CHECK(std::abs(reid_loss(r, u) - reid_loss_product_form(r, u)) < 1e-9);
    CHECK_THROWS_AS(reid_loss({}, {}), ArgumentError);
    CHECK_THROWS_AS(reid_loss(r, {u.begin(), u.begin() + 3}), ArgumentError);
  }

  TEST_CASE("batch loss: real plus unity cross-entropy, unity labels inherited") {
    torch::manual_seed(1);
    auto model = build_reid_model(4, "reduced", 32, 32);
    model->eval();
    TrainBatch batch;
    batch.real = torch::rand({3, 3, 32, 32});
    batch.unity = torch::rand({3, 3, 32, 32});
    batch.labels = torch::tensor({0, 1, 2}, torch::kLong);
    batch.unity_labels = torch::tensor({3, 3, 1}, torch::kLong);
    auto loss = reid_loss(model, batch).item<double>();
    auto lr = torch::log_softmax(model->forward(batch.real).logits, 1).to(torch::kFloat64);
    auto lu = torch::log_softmax(model->forward(batch.unity).logits, 1).to(torch::kFloat64);
    double oracle = 0.0;
    for (int i = 0; i < 3; ++i) {
      oracle -= lr[i][batch.labels[i].item<int64_t>()].item<double>();
      oracle -= lu[i][batch.unity_labels[i].item<int64_t>()].item<double>();
    }
    CHECK(loss == doctest::Approx(oracle / 3.0).epsilon(1e-5));
    TrainBatch empty;
    CHECK_THROWS_AS(reid_loss(model, empty), ArgumentError);
  }

  TEST_CASE("feature extraction") {
    auto model = build_reid_model(3, "reduced", 32, 32);
    auto img = torch::rand({3, 32, 32});
    auto f = extract_features(model, std::vector<torch::Tensor>{img, img, torch::rand({3, 32, 32})});
    CHECK(f.sizes() == torch::IntArrayRef({3, 256}));
    CHECK(torch::equal(f[0], f[1]));
    CHECK(extract_features(model, std::vector<torch::Tensor>{}).sizes() == torch::IntArrayRef({0, 256}));
    CHECK_THROWS_AS(extract_features(model, torch::rand({1, 3, 64, 32})), ArgumentError);
  }

  TEST_CASE("checkpoints and feature export round-trip") {
    test_support::TempDir dir;
    auto model = build_reid_model(5, "reduced", 32, 32);
    auto x = torch::rand({2, 3, 32, 32});
    auto before = extract_features(model, x);
    save_reid_model(model, dir.path() / "r.ckpt", {{"note", "test"}});
    auto loaded = load_reid_model(dir.path() / "r.ckpt");
    CHECK(loaded.extra.at("note") == "test");
    CHECK(torch::equal(extract_features(loaded.model, x), before));

    gan::GeneratorSpec g;
    g.height = g.width = 16;
    g.base_channels = 4;
    g.num_scales = 2;
    gan::DiscriminatorSpec d;
    d.base_channels = 4;
    d.num_layers = 2;
    gan::TransferModel::create(1, g, d, gan::LossWeights{}, 1).save(dir.path() / "t.ckpt");
    CHECK_THROWS_AS(load_reid_model(dir.path() / "t.ckpt"), CheckpointError);

    std::vector<data::PersonImage> rows(2);
    rows[0].person_id = 4;
    rows[1].camera_id = 2;
    export_features(dir.path() / "feat", before, rows);
    CHECK(torch::equal(read_npy(dir.path() / "feat.npy"), before));
    CHECK(std::filesystem::exists(dir.path() / "feat.json"));
  }

  TEST_CASE("training: reproducible, decreasing loss, batch composition") {
    auto ds = toy_corpus();
    auto cfg = toy_config();
    auto a = train_reid(ds, nullptr, cfg);
    auto b = train_reid(ds, nullptr, cfg);
    REQUIRE(a.history.size() == 8);
    CHECK(a.history.back().loss == b.history.back().loss);
    CHECK(a.history.back().loss < 0.5 * a.history.front().loss);
    CHECK(a.history.front().samples_per_step == 16);

    std::vector<torch::Tensor> unity;
    for (auto i : ds.indices(data::Split::kTrain)) unity.push_back(ds.images[i].pixels);
    auto one = cfg;
    one.epochs = 1;
    auto c = train_reid(ds, &unity, one);
    CHECK(c.history.front().samples_per_step == 32);
  }

  TEST_CASE("unity pre-generation needs a transfer for every camera") {
    auto ds = toy_corpus();
    std::vector<gan::TransferModel> none;
    CHECK_THROWS_AS(pregenerate_unity(ds, none), ConfigError);
  }

  TEST_CASE("learning-rate decay defaults to 80% of the epochs") {
    ReidTrainConfig c;
    CHECK(c.resolved_decay_epoch() == 40);
    c.epochs = 10;
    CHECK(c.resolved_decay_epoch() == 8);
  }
}
