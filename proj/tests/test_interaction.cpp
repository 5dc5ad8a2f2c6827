#include <doctest.h>

#include "opskill/geometry.hpp"
#include "opskill/interaction.hpp"
#include "opskill/synth.hpp"

using namespace opskill;

namespace {

Detection det(DetClass cls, Box box, double conf = 0.9) {
  return Detection{0, cls, box, conf};
}

}  // namespace

TEST_CASE("resolve_frame: single interaction box passes through") {
  ResolveDiagnostics diag;
  const auto res = resolve_frame(
      0, {det(InteractionClass::NeedleDriverRight, {10, 10, 50, 50})},
      {det(LocClass::RightHand, {12, 12, 40, 40})}, 0.25, diag);
  CHECK(res.right.payload == Payload::NeedleDriver);
  CHECK(res.right.provenance == Provenance::Direct);
  REQUIRE(res.right.box.has_value());
  CHECK(res.right.box->x == 10.0);
  // the left hand is in neither channel
  CHECK(res.left.payload == Payload::Absent);
  CHECK(res.left.provenance == Provenance::Absent);
  CHECK(!res.left.box.has_value());
  CHECK(diag.direct == 1);
  CHECK(diag.absent == 1);
}

TEST_CASE("resolve_frame: missing interaction box falls back to the tools") {
  ResolveDiagnostics diag;
  const Box hand{100, 100, 60, 60};
  const Box scissors{110, 110, 30, 20};  // inside the hand
  const auto res = resolve_frame(
      7, {}, {det(LocClass::RightHand, hand), det(LocClass::Scissors, scissors)},
      0.25, diag);
  CHECK(res.right.payload == Payload::Scissors);
  CHECK(res.right.provenance == Provenance::Scenario1);
  REQUIRE(res.right.box.has_value());
  CHECK(res.right.box->x == hand.x);  // fallback keeps the hand box
  CHECK(res.right.frame == 7);
  CHECK(diag.scenario1 == 1);
}

TEST_CASE("resolve_frame: competing interaction boxes go through selection") {
  ResolveDiagnostics diag;
  const Box tool{20, 20, 30, 30};
  const auto res = resolve_frame(
      0,
      {det(InteractionClass::NeedleDriverRight, {18, 18, 34, 34}, 0.6),
       det(InteractionClass::EmptyRight, {200, 200, 40, 40}, 0.9)},
      {det(LocClass::NeedleDriver, tool)}, 0.25, diag);
  CHECK(res.right.payload == Payload::NeedleDriver);
  CHECK(res.right.provenance == Provenance::Scenario2);
  CHECK(diag.scenario2 == 1);
}

TEST_CASE("scenario1_fallback") {
  const Box hand{0, 0, 60, 60};

  SUBCASE("no tools means an empty hand") {
    const auto [payload, box] = scenario1_fallback(hand, {}, 0.25);
    CHECK(payload == Payload::Empty);
    CHECK(box.w == hand.w);
  }
  SUBCASE("a contained tool always qualifies") {
    const auto [payload, box] = scenario1_fallback(
        hand, {det(LocClass::Forceps, {10, 10, 20, 20})}, 0.25);
    CHECK(payload == Payload::Forceps);
  }
  SUBCASE("highest overlap wins; oracle via exhaustive scoring") {
    // scores: scissors 0.6 (intersection 30x36 of a 30x60 box),
    //         forceps 0.3 (intersection 30x12 of a 40x30 box)
    const Box scissors_box{30, 24, 30, 60};
    const Box forceps_box{30, 48, 40, 30};
    CHECK(overlap_over_min(hand, scissors_box) == doctest::Approx(0.6));
    CHECK(overlap_over_min(hand, forceps_box) == doctest::Approx(0.3));
    const auto [payload, box] = scenario1_fallback(
        hand,
        {det(LocClass::Forceps, forceps_box),
         det(LocClass::Scissors, scissors_box)},
        0.25);
    CHECK(payload == Payload::Scissors);
  }
  SUBCASE("below the threshold the hand counts as empty") {
    const auto [payload, box] = scenario1_fallback(
        hand, {det(LocClass::Scissors, {59, 59, 40, 40})}, 0.25);
    CHECK(payload == Payload::Empty);
  }
  SUBCASE("score ties break by confidence then input order") {
    const Box inside_a{5, 5, 10, 10};
    const Box inside_b{30, 30, 10, 10};  // both fully contained: score 1.0
    const auto [p1, b1] = scenario1_fallback(
        hand,
        {det(LocClass::Forceps, inside_a, 0.5),
         det(LocClass::Scissors, inside_b, 0.8)},
        0.25);
    CHECK(p1 == Payload::Scissors);
    const auto [p2, b2] = scenario1_fallback(
        hand,
        {det(LocClass::Forceps, inside_a, 0.8),
         det(LocClass::Scissors, inside_b, 0.8)},
        0.25);
    CHECK(p2 == Payload::Forceps);
  }
}

TEST_CASE("scenario2_select") {
  SUBCASE("worked example: tool pair beats hand pair") {
    const Box nd_box{0, 0, 40, 40};
    const Box hand_box{100, 100, 40, 40};
    const std::vector<Detection> candidates = {
        det(InteractionClass::NeedleDriverRight, {0, 0, 40, 50}, 0.7),
        det(InteractionClass::EmptyRight, {100, 100, 40, 70}, 0.9),
    };
    const std::vector<Detection> loc = {
        det(LocClass::NeedleDriver, nd_box),
        det(LocClass::RightHand, hand_box),
    };
    CHECK(iou(candidates[0].box, nd_box) == doctest::Approx(0.8));
    CHECK(iou(candidates[1].box, hand_box) ==
          doctest::Approx(4.0 / 7.0).epsilon(1e-9));
    CHECK(scenario2_select(candidates, loc, Side::Right) == 0);
  }
  SUBCASE("no localization boxes: higher confidence wins") {
    const std::vector<Detection> candidates = {
        det(InteractionClass::ScissorsRight, {0, 0, 10, 10}, 0.6),
        det(InteractionClass::ForcepsRight, {50, 50, 10, 10}, 0.8),
    };
    CHECK(scenario2_select(candidates, {}, Side::Right) == 1);
  }
  SUBCASE("identical candidates: first in input order") {
    const std::vector<Detection> candidates = {
        det(InteractionClass::ScissorsRight, {0, 0, 10, 10}, 0.6),
        det(InteractionClass::ScissorsRight, {0, 0, 10, 10}, 0.6),
    };
    CHECK(scenario2_select(candidates, {}, Side::Right) == 0);
  }
  SUBCASE("needs at least two candidates") {
    CHECK_THROWS_AS(scenario2_select({det(InteractionClass::EmptyRight,
                                          {0, 0, 10, 10})},
                                     {}, Side::Right),
                    std::invalid_argument);
  }
}

TEST_CASE("resolve_frame always yields exactly one state per side") {
  Rng rng(4242);
  for (int it = 0; it < 300; ++it) {
    std::vector<Detection> inter, loc;
    const int ni = static_cast<int>(rng.uniform_int(0, 4));
    for (int i = 0; i < ni; ++i) {
      inter.push_back(det(static_cast<InteractionClass>(rng.uniform_int(0, 7)),
                          Box{rng.uniform(0, 100), rng.uniform(0, 100),
                              rng.uniform(5, 50), rng.uniform(5, 50)},
                          rng.uniform()));
    }
    const int nl = static_cast<int>(rng.uniform_int(0, 5));
    for (int i = 0; i < nl; ++i) {
      loc.push_back(det(static_cast<LocClass>(rng.uniform_int(0, 4)),
                        Box{rng.uniform(0, 100), rng.uniform(0, 100),
                            rng.uniform(5, 50), rng.uniform(5, 50)},
                        rng.uniform()));
    }
    ResolveDiagnostics diag;
    const auto res = resolve_frame(it, inter, loc, 0.25, diag);
    CHECK(diag.direct + diag.scenario1 + diag.scenario2 + diag.absent == 2);
    for (const UsageState* s : {&res.right, &res.left}) {
      CHECK((s->payload == Payload::Absent) ==
            (s->provenance == Provenance::Absent));
      CHECK((s->payload != Payload::Absent) == s->box.has_value());
    }
    CHECK(res.right.side == Side::Right);
    CHECK(res.left.side == Side::Left);
  }
}
