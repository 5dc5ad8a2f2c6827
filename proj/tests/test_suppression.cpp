#include <doctest.h>

#include "opskill/suppression.hpp"
#include "opskill/synth.hpp"
#include "oracles.hpp"

using namespace opskill;

namespace {

Detection det(DetClass cls, Box box, double conf) {
  return Detection{0, cls, box, conf};
}

bool same_dets(const std::vector<Detection>& a,
               const std::vector<Detection>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(a[i].cls == b[i].cls) || a[i].confidence != b[i].confidence ||
        a[i].box.x != b[i].box.x || a[i].box.y != b[i].box.y ||
        a[i].box.w != b[i].box.w || a[i].box.h != b[i].box.h) {
      return false;
    }
  }
  return true;
}

std::vector<Detection> random_loc_frame(Rng& rng, int max_boxes) {
  std::vector<Detection> dets;
  const int n = static_cast<int>(rng.uniform_int(0, max_boxes));
  for (int i = 0; i < n; ++i) {
    const auto cls = static_cast<LocClass>(rng.uniform_int(0, 4));
    // Coarse confidence grid so ties actually happen.
    const double conf = rng.uniform_int(0, 20) / 20.0;
    dets.push_back(det(cls,
                       Box{rng.uniform(0, 60), rng.uniform(0, 60),
                           rng.uniform(5, 40), rng.uniform(5, 40)},
                       conf));
  }
  return dets;
}

}  // namespace

TEST_CASE("standard_nms keeps a lone detection") {
  const auto out =
      standard_nms({det(LocClass::Forceps, {0, 0, 10, 10}, 0.7)}, 0.5);
  REQUIRE(out.size() == 1);
  CHECK(out[0].confidence == 0.7);
}

TEST_CASE("standard_nms suppresses the weaker overlapping same-class box") {
  // IoU of these two is 9/11 (~0.82)
  const auto out = standard_nms(
      {det(LocClass::Scissors, {0, 0, 10, 10}, 0.6),
       det(LocClass::Scissors, {0, 1, 10, 10}, 0.8)},
      0.5);
  REQUIRE(out.size() == 1);
  CHECK(out[0].confidence == 0.8);
}

TEST_CASE("standard_nms is scoped per class") {
  const auto out = standard_nms(
      {det(LocClass::Scissors, {0, 0, 10, 10}, 0.8),
       det(LocClass::Forceps, {0, 1, 10, 10}, 0.6)},
      0.5);
  CHECK(out.size() == 2);
}

TEST_CASE("standard_nms validates the threshold") {
  CHECK_THROWS_AS(standard_nms({}, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(standard_nms({}, 1.5), std::invalid_argument);
}

TEST_CASE("tool_nms suppresses cross-class tools, never hands") {
  const Box a{0, 0, 10, 10};
  const Box b{0, 1, 10, 10};  // IoU 9/11 with a

  SUBCASE("weaker tool of another class goes") {
    const auto out = tool_nms({det(LocClass::NeedleDriver, a, 0.9),
                               det(LocClass::Forceps, b, 0.7)},
                              0.5);
    REQUIRE(out.size() == 1);
    CHECK(std::get<LocClass>(out[0].cls) == LocClass::NeedleDriver);
  }
  SUBCASE("tools and hands may overlap") {
    const auto out = tool_nms({det(LocClass::NeedleDriver, a, 0.9),
                               det(LocClass::RightHand, a, 0.95)},
                              0.5);
    CHECK(out.size() == 2);
  }
  SUBCASE("tools below the threshold both stay") {
    const auto out = tool_nms({det(LocClass::NeedleDriver, {0, 0, 10, 10}, 0.9),
                               det(LocClass::Forceps, {9, 9, 10, 10}, 0.7)},
                              0.5);
    CHECK(out.size() == 2);
  }
  SUBCASE("interaction input is rejected") {
    CHECK_THROWS_AS(
        tool_nms({det(InteractionClass::EmptyRight, a, 0.5)}, 0.5),
        std::invalid_argument);
  }
}

TEST_CASE("suppression properties: subset, order, idempotence, oracle") {
  Rng rng(7011);
  for (int it = 0; it < 300; ++it) {
    const auto frame = random_loc_frame(rng, 12);
    const double t1 = 0.45, t2 = 0.5;

    const auto kept = standard_nms(frame, t1);
    CHECK(same_dets(kept, oracle::standard_nms(frame, t1)));
    CHECK(same_dets(standard_nms(kept, t1), kept));

    // output is confidence-sorted
    for (std::size_t i = 0; i + 1 < kept.size(); ++i) {
      CHECK(kept[i].confidence >= kept[i + 1].confidence);
    }

    const auto tools_kept = tool_nms(kept, t2);
    CHECK(same_dets(tools_kept, oracle::tool_nms(kept, t2)));
    CHECK(same_dets(tool_nms(tools_kept, t2), tools_kept));
    CHECK(tools_kept.size() <= kept.size());

    // no hand is ever dropped by the tool pass
    std::size_t hands_in = 0, hands_out = 0;
    for (const auto& d : kept) {
      if (is_hand(std::get<LocClass>(d.cls))) ++hands_in;
    }
    for (const auto& d : tools_kept) {
      if (is_hand(std::get<LocClass>(d.cls))) ++hands_out;
    }
    CHECK(hands_in == hands_out);
  }
}
