#include "metric_oracle.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <vector>

#include <torch/torch.h>

#include "unitystyle/data/person_image.hpp"
#include "unitystyle/errors.hpp"
#include "unitystyle/eval/evaluate.hpp"
#include "unitystyle/eval/metrics.hpp"

namespace test_support {

namespace {

using namespace unitystyle;

enum Kind { kRelevant, kSameCamera, kDistractor, kOther };

struct Reference {
  bool valid = false;
  double ap = 0.0;
  int64_t first_hit = -1;  // position in the filtered list, 0-based
};

// Literal definition: drop junk, then average precision@k over the positions of the hits.
Reference reference(const std::vector<Kind>& kinds, const std::vector<int64_t>& perm) {
  std::vector<bool> filtered;
  for (auto g : perm) {
    const Kind k = kinds[static_cast<std::size_t>(g)];
    if (k == kSameCamera || k == kDistractor) continue;
    filtered.push_back(k == kRelevant);
  }
  const auto total = std::count(filtered.begin(), filtered.end(), true);
  Reference r;
  if (total == 0) return r;
  r.valid = true;
  int64_t hits = 0;
  double sum = 0.0;
  for (std::size_t k = 0; k < filtered.size(); ++k) {
    if (!filtered[k]) continue;
    if (r.first_hit < 0) r.first_hit = static_cast<int64_t>(k);
    ++hits;
    sum += static_cast<double>(hits) / static_cast<double>(k + 1);
  }
  r.ap = sum / static_cast<double>(total);
  return r;
}

eval::RowLabel gallery_label(Kind k) {
  switch (k) {
    case kRelevant: return {1, 2, 1};
    case kSameCamera: return {1, 1, 2};
    case kDistractor: return {data::kDistractorId, 2, 1};
    default: return {2, 2, 1};
  }
}

}  // namespace

MetricOracleResult run_metric_oracle(int max_gallery) {
  MetricOracleResult out;
  const std::vector<int> ks{1, 2, 3, 5, 10};
  eval::EvalProtocol protocol;
  protocol.ks = ks;
  auto mismatch = [&](const std::string& what) {
    if (out.mismatches++ == 0) out.first_mismatch = what;
  };

  for (int n = 1; n <= max_gallery; ++n) {
    std::vector<std::vector<int64_t>> perms;
    std::vector<int64_t> p(static_cast<std::size_t>(n));
    std::iota(p.begin(), p.end(), 0);
    do perms.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));

    // One row of the distance matrix per permutation: item perm[r] sits at distance r.
    auto dist = torch::zeros({static_cast<int64_t>(perms.size()), n}, torch::kFloat64);
    auto acc = dist.accessor<double, 2>();
    for (std::size_t row = 0; row < perms.size(); ++row) {
      for (int r = 0; r < n; ++r) acc[static_cast<int64_t>(row)][perms[row][static_cast<std::size_t>(r)]] = r;
    }
    const std::vector<eval::RowLabel> queries(perms.size(), eval::RowLabel{1, 1, 1});

    int64_t labelings = 1;
    for (int i = 0; i < n; ++i) labelings *= 4;
    for (int64_t code = 0; code < labelings; ++code) {
      std::vector<Kind> kinds;
      std::vector<eval::RowLabel> gallery;
      eval::IndexSet relevant, junk;
      for (int i = 0, c = static_cast<int>(code); i < n; ++i, c /= 4) {
        kinds.push_back(static_cast<Kind>(c % 4));
        gallery.push_back(gallery_label(kinds.back()));
        if (kinds.back() == kRelevant) relevant.insert(i);
        if (kinds.back() == kSameCamera || kinds.back() == kDistractor) junk.insert(i);
      }

      double ap_sum = 0.0;
      int64_t valid = 0;
      std::vector<int64_t> within(ks.size(), 0);
      for (const auto& perm : perms) {
        ++out.rankings_checked;
        const auto ref = reference(kinds, perm);
        const auto got = eval::average_precision(perm, relevant, junk);
        if (got.valid != ref.valid || got.ap != ref.ap || (ref.valid && got.first_hit != ref.first_hit)) {
          std::ostringstream msg;
          msg << "AP mismatch n=" << n << " labeling=" << code << ": " << got.ap << " vs " << ref.ap;
          mismatch(msg.str());
        }
        const auto c = eval::cmc({perm}, {relevant}, {junk}, ks);
        for (std::size_t j = 0; j < ks.size(); ++j) {
          const double expect = ref.valid && ref.first_hit < ks[j] ? 1.0 : 0.0;
          if (c[j] != expect) mismatch("CMC mismatch n=" + std::to_string(n) + " labeling=" + std::to_string(code));
        }
        if (ref.valid) {
          ap_sum += ref.ap;
          ++valid;
          for (std::size_t j = 0; j < ks.size(); ++j) within[j] += ref.first_hit < ks[j] ? 1 : 0;
        }
      }

      if (valid == 0) {
        bool threw = false;
        try {
          eval::evaluate_distances(dist, queries, gallery, protocol, 2);
        } catch (const unitystyle::EvaluationError&) {
          threw = true;
        }
        if (!threw) mismatch("no-valid-query case did not raise, n=" + std::to_string(n));
        continue;
      }
      const auto report = eval::evaluate_distances(dist, queries, gallery, protocol, 2);
      if (report.mAP != ap_sum / static_cast<double>(valid)) {
        mismatch("mAP mismatch n=" + std::to_string(n) + " labeling=" + std::to_string(code));
      }
      if (report.skipped_queries != 0) mismatch("unexpected skipped queries");
      for (std::size_t j = 0; j < ks.size(); ++j) {
        if (report.cmc[j] != static_cast<double>(within[j]) / static_cast<double>(valid)) {
          mismatch("report CMC mismatch n=" + std::to_string(n) + " labeling=" + std::to_string(code));
        }
      }
    }
  }
  return out;
}

}  // namespace test_support
