// tests/eval_test.cc

// Copyright 2026  segaw authors

// See ../COPYING for clarification regarding multiple authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <numeric>

#include "doctest.h"
#include "segaw/eval/metrics.h"

using namespace segaw;

TEST_CASE("segmentation_prf") {
  SUBCASE("hand-computed fixture") {
    const BoundarySet hyp = BoundarySet::from_interior({10, 20, 30}, 60);
    const BoundarySet ref = BoundarySet::from_interior({12, 25, 50}, 60);
    const PrfReport r = segmentation_prf(hyp, ref, 4);
    CHECK(r.precision == 1.0 / 3.0);
    CHECK(r.recall == 1.0 / 3.0);
    CHECK(r.f1 == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(r.counts.matched == 1);
  }
  SUBCASE("identical sets") {
    const BoundarySet b = BoundarySet::from_interior({3, 9, 14}, 20);
    const PrfReport r = segmentation_prf(b, b);
    CHECK(r.precision == 1.0);
    CHECK(r.recall == 1.0);
    CHECK(r.f1 == 1.0);
  }
  SUBCASE("empty hypothesis") {
    const PrfReport r = segmentation_prf(BoundarySet::whole(20),
                                         BoundarySet::from_interior({5}, 20));
    CHECK(r.precision == 0.0);
    CHECK(r.recall == 0.0);
    CHECK(r.f1 == 0.0);
  }
  SUBCASE("one-to-one matching") {
    const BoundarySet hyp = BoundarySet::from_interior({9, 10, 11}, 30);
    const BoundarySet ref = BoundarySet::from_interior({10}, 30);
    CHECK(segmentation_prf(hyp, ref).counts.matched == 1);
    const BoundarySet ref2 = BoundarySet::from_interior({7, 13}, 30);
    const BoundarySet hyp2 = BoundarySet::from_interior({10}, 30);
    CHECK(segmentation_prf(hyp2, ref2).counts.matched == 1);
  }
  SUBCASE("closest pairs are matched first") {
    // 12 is 1 away from 13 and 2 away from 10; greedy pairs 12-13 then 8-10.
    const BoundarySet hyp = BoundarySet::from_interior({8, 12}, 30);
    const BoundarySet ref = BoundarySet::from_interior({10, 13}, 30);
    CHECK(segmentation_prf(hyp, ref, 2).counts.matched == 2);
  }
  SUBCASE("swapping roles swaps precision and recall") {
    Rng rng(1);
    for (int trial = 0; trial < 200; ++trial) {
      const BoundarySet a = random_segment(80, 0.1, rng), b = random_segment(80, 0.2, rng);
      const PrfReport ab = segmentation_prf(a, b), ba = segmentation_prf(b, a);
      CHECK(ab.precision == ba.recall);
      CHECK(ab.recall == ba.precision);
      CHECK(ab.counts.matched <= std::min(ab.counts.hypothesized, ab.counts.reference));
    }
  }
  SUBCASE("micro average") {
    const std::vector<BoundarySet> hyp = {BoundarySet::from_interior({5}, 20),
                                          BoundarySet::from_interior({3, 8, 12}, 20)};
    const std::vector<BoundarySet> ref = {BoundarySet::from_interior({5}, 20),
                                          BoundarySet::from_interior({17}, 20)};
    const PrfReport r = segmentation_prf(hyp, ref);
    CHECK(r.precision == 0.25);
    CHECK(r.recall == 0.5);
  }
  SUBCASE("length mismatch") {
    CHECK_THROWS_AS(segmentation_prf(BoundarySet::whole(5), BoundarySet::whole(6)), ShapeError);
  }
}

TEST_CASE("random_segment") {
  CHECK(random_segment(50, 0.0, 1).interior().empty());
  const BoundarySet all = random_segment(50, 1.0, 1);
  CHECK(all.num_segments() == 50);
  const long n = static_cast<long>(random_segment(10000, 0.1, 7).interior().size());
  CHECK(n >= 905);
  CHECK(n <= 1095);
  CHECK(random_segment(300, 0.3, 5) == random_segment(300, 0.3, 5));
  CHECK_THROWS_AS(random_segment(10, 1.5, 1), DomainError);
}

TEST_CASE("mean_average_precision") {
  SUBCASE("hand-computed fixture") {
    const MapReport r = mean_average_precision({{"a", "b", "c", "d"}}, {{"a", "c"}});
    CHECK(r.map == (1.0 + 2.0 / 3.0) / 2.0);
    CHECK(r.map == doctest::Approx(0.8333).epsilon(1e-4));
  }
  SUBCASE("relevant first") {
    CHECK(mean_average_precision({{"x", "y", "z"}}, {{"x", "y"}}).map == 1.0);
  }
  SUBCASE("queries without relevant documents are excluded") {
    const MapReport r =
        mean_average_precision({{"a", "b"}, {"a", "b"}}, {{"b"}, {}});
    CHECK(r.scored_queries == 1);
    CHECK(r.map == 0.5);
    CHECK(std::isnan(r.average_precisions[1]));
  }
  SUBCASE("duplicate document") {
    CHECK_THROWS_AS(mean_average_precision({{"a", "a"}}, {{"a"}}), InputError);
  }
  SUBCASE("random rankings") {
    std::vector<std::string> docs;
    std::set<std::string> rel;
    for (int i = 0; i < 1000; ++i) {
      docs.push_back("d" + std::to_string(i));
      if (i % 10 == 0) rel.insert(docs.back());
    }
    Rng rng(3);
    std::vector<std::vector<std::string>> rankings;
    for (int s = 0; s < 1000; ++s) {
      std::shuffle(docs.begin(), docs.end(), rng);
      rankings.push_back(docs);
    }
    const MapReport r =
        mean_average_precision(rankings, std::vector<std::set<std::string>>(1000, rel));
    MESSAGE("random MAP " << r.map);
    CHECK(std::abs(r.map - 0.1) < 0.01);
  }
}

TEST_CASE("rank_documents") {
  const auto r = rank_documents({{"c", 0.5}, {"a", 0.5}, {"b", 0.9}, {"d", 0.1}});
  CHECK(r == std::vector<std::string>{"b", "a", "c", "d"});
}
