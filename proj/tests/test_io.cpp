#include <doctest.h>

#include <sstream>

#include "opskill/io.hpp"
#include "opskill/synth.hpp"

using namespace opskill;

TEST_CASE("detection stream: empty input yields no groups") {
  std::istringstream in("");
  CHECK(parse_detection_stream(in).empty());
  std::istringstream comments("# nothing here\n\n# still nothing\n");
  CHECK(parse_detection_stream(comments).empty());
}

TEST_CASE("detection stream: gap frames materialize as empty groups") {
  std::istringstream in(
      "0 loc right_hand 0 0 10 10 0.9\n"
      "0 int empty_right_hand 0 0 12 12 0.8\n"
      "2 loc forceps 5 5 8 8 0.7\n");
  const auto groups = parse_detection_stream(in);
  REQUIRE(groups.size() == 3);
  CHECK(groups[0].dets.size() == 2);
  CHECK(groups[1].dets.empty());
  CHECK(groups[2].dets.size() == 1);
  CHECK(groups[1].frame == 1);
}

TEST_CASE("detection stream: errors carry the line number") {
  SUBCASE("confidence out of range") {
    std::istringstream in(
        "0 loc right_hand 0 0 10 10 0.9\n"
        "1 loc forceps 1 1 5 5 1.3\n");
    CHECK_THROWS_WITH_AS(parse_detection_stream(in),
                         doctest::Contains("line 2"), ParseError);
  }
  SUBCASE("malformed line") {
    std::istringstream in("0 loc right_hand 0 0 10\n");
    CHECK_THROWS_WITH_AS(parse_detection_stream(in),
                         doctest::Contains("line 1"), ParseError);
  }
  SUBCASE("class/channel mismatch") {
    std::istringstream in("0 loc empty_right_hand 0 0 10 10 0.5\n");
    CHECK_THROWS_WITH_AS(parse_detection_stream(in),
                         doctest::Contains("channel"), ParseError);
    std::istringstream in2("0 int forceps 0 0 10 10 0.5\n");
    CHECK_THROWS_AS(parse_detection_stream(in2), ParseError);
  }
  SUBCASE("decreasing frame index") {
    std::istringstream in(
        "3 loc forceps 0 0 10 10 0.5\n"
        "2 loc forceps 0 0 10 10 0.5\n");
    CHECK_THROWS_WITH_AS(parse_detection_stream(in),
                         doctest::Contains("decreasing"), ParseError);
  }
  SUBCASE("zero-size box") {
    std::istringstream in("0 loc forceps 0 0 0 10 0.5\n");
    CHECK_THROWS_AS(parse_detection_stream(in), ParseError);
  }
  SUBCASE("unknown class") {
    std::istringstream in("0 loc retractor 0 0 5 5 0.5\n");
    CHECK_THROWS_WITH_AS(parse_detection_stream(in),
                         doctest::Contains("unknown class"), ParseError);
  }
}

TEST_CASE("box labels: same grammar without the confidence column") {
  std::istringstream in(
      "5 loc right_hand 0 0 10 10\n"
      "5 loc forceps 2 2 5 5\n"
      "5 int forceps_in_right_hand 0 0 12 12\n");
  const auto groups = parse_box_labels(in);
  REQUIRE(groups.size() == 6);
  for (int f = 0; f < 5; ++f) CHECK(groups[f].dets.empty());
  int loc = 0, inter = 0;
  for (const auto& d : groups[5].dets) {
    (d.channel() == Channel::Localization ? loc : inter) += 1;
  }
  CHECK(loc == 2);
  CHECK(inter == 1);

  // a stray confidence column is tolerated and ignored
  std::istringstream with_conf("0 loc forceps 1 1 5 5 0.25\n");
  const auto g = parse_box_labels(with_conf);
  REQUIRE(g.size() == 1);
  CHECK(g[0].dets[0].confidence == 1.0);
}

TEST_CASE("event labels: parse, sort, validate") {
  SUBCASE("single row") {
    std::istringstream in(
        "class,start_frame,end_frame\n"
        "needle_driver_in_right_hand,0,100\n");
    const auto events = parse_event_labels(in);
    REQUIRE(events.size() == 1);
    CHECK(events[0].cls == InteractionClass::NeedleDriverRight);
    CHECK(events[0].start == 0);
    CHECK(events[0].end == 100);
  }
  SUBCASE("rows come back sorted by side and start") {
    std::istringstream in(
        "class,start_frame,end_frame\n"
        "empty_left_hand,51,80\n"
        "forceps_in_left_hand,0,50\n");
    const auto events = parse_event_labels(in);
    REQUIRE(events.size() == 2);
    CHECK(events[0].cls == InteractionClass::ForcepsLeft);
    CHECK(events[1].cls == InteractionClass::EmptyLeft);
  }
  SUBCASE("same-side overlap is rejected") {
    std::istringstream in(
        "class,start_frame,end_frame\n"
        "forceps_in_left_hand,0,50\n"
        "empty_left_hand,40,80\n");
    CHECK_THROWS_WITH_AS(parse_event_labels(in),
                         doctest::Contains("overlap"), ParseError);
  }
  SUBCASE("opposite sides may overlap") {
    std::istringstream in(
        "class,start_frame,end_frame\n"
        "forceps_in_left_hand,0,50\n"
        "empty_right_hand,40,80\n");
    CHECK(parse_event_labels(in).size() == 2);
  }
  SUBCASE("start after end is rejected") {
    std::istringstream in(
        "class,start_frame,end_frame\n"
        "empty_left_hand,10,5\n");
    CHECK_THROWS_AS(parse_event_labels(in), ParseError);
  }
  SUBCASE("header is required") {
    std::istringstream in("forceps_in_left_hand,0,50\n");
    CHECK_THROWS_AS(parse_event_labels(in), ParseError);
  }
}

TEST_CASE("session meta") {
  std::istringstream in("fps=25\nwidth=1280\nheight=720\n");
  const SessionMeta meta = parse_session_meta(in);
  CHECK(meta.fps == 25.0);
  CHECK(meta.frame_width == 1280);
  CHECK(meta.frame_height == 720);

  std::istringstream bad("fps=0\n");
  CHECK_THROWS_AS(parse_session_meta(bad), ParseError);
  std::istringstream unknown("exposure=3\n");
  CHECK_THROWS_AS(parse_session_meta(unknown), ParseError);

  std::ostringstream out;
  write_session_meta(out, meta);
  std::istringstream back(out.str());
  const SessionMeta again = parse_session_meta(back);
  CHECK(again.fps == meta.fps);
  CHECK(again.frame_width == meta.frame_width);
}

TEST_CASE("usage timeline round-trips and counts records") {
  UsageTimeline tl;
  tl.fps = 30.0;
  for (FrameIndex f = 0; f < 10; ++f) {
    UsageState r{f, Side::Right, Payload::NeedleDriver,
                 Box{1.5, 2.25, 30, 40.125}, Provenance::Direct};
    UsageState l{f, Side::Left, Payload::Absent, std::nullopt,
                 Provenance::Absent};
    if (f == 3) {
      r.payload = Payload::Empty;
      r.provenance = Provenance::Scenario1;
    }
    tl.right.push_back(r);
    tl.left.push_back(l);
  }

  std::ostringstream out;
  write_usage_timeline(out, tl);

  // 10 records per hand side plus the fps line
  const std::string text = out.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 21);

  std::istringstream in(text);
  const UsageTimeline back = parse_usage_timeline(in);
  REQUIRE(back.frames() == 10);
  CHECK(back.fps == tl.fps);
  for (FrameIndex f = 0; f < 10; ++f) {
    const auto i = static_cast<std::size_t>(f);
    CHECK(back.right[i].payload == tl.right[i].payload);
    CHECK(back.right[i].provenance == tl.right[i].provenance);
    REQUIRE(back.right[i].box.has_value());
    CHECK(back.right[i].box->x == tl.right[i].box->x);
    CHECK(back.right[i].box->h == tl.right[i].box->h);
    CHECK(!back.left[i].box.has_value());
  }

  std::istringstream missing("fps=30\n0 right empty direct\n");
  CHECK_THROWS_WITH_AS(parse_usage_timeline(missing),
                       doctest::Contains("missing record"), ParseError);
}

TEST_CASE("detection stream round-trip preserves values and order") {
  Rng rng(991);
  std::vector<FrameGroup> groups;
  for (FrameIndex f = 0; f < 8; ++f) {
    FrameGroup g{f, {}};
    const int n = static_cast<int>(rng.uniform_int(0, 4));
    for (int i = 0; i < n; ++i) {
      Detection d;
      d.frame = f;
      if (rng.chance(0.5)) {
        d.cls = static_cast<LocClass>(rng.uniform_int(0, 4));
      } else {
        d.cls = static_cast<InteractionClass>(rng.uniform_int(0, 7));
      }
      d.box = Box{rng.uniform(0, 500), rng.uniform(0, 300),
                  rng.uniform(1, 100), rng.uniform(1, 100)};
      d.confidence = rng.uniform();
      g.dets.push_back(d);
    }
    groups.push_back(g);
  }

  std::ostringstream out;
  write_detection_stream(out, groups);
  std::istringstream in(out.str());
  const auto back = parse_detection_stream(in);

  // trailing empty groups are not representable; compare up to the last record
  std::size_t last = groups.size();
  while (last > 0 && groups[last - 1].dets.empty()) --last;
  REQUIRE(back.size() == last);
  for (std::size_t f = 0; f < back.size(); ++f) {
    REQUIRE(back[f].dets.size() == groups[f].dets.size());
    for (std::size_t i = 0; i < back[f].dets.size(); ++i) {
      const Detection& a = groups[f].dets[i];
      const Detection& b = back[f].dets[i];
      CHECK(a.cls == b.cls);
      CHECK(a.box.x == b.box.x);
      CHECK(a.box.y == b.box.y);
      CHECK(a.box.w == b.box.w);
      CHECK(a.box.h == b.box.h);
      CHECK(a.confidence == b.confidence);
    }
  }
}

TEST_CASE("event labels round-trip") {
  const std::vector<TimedEvent> events = {
      {InteractionClass::NeedleDriverRight, 0, 99},
      {InteractionClass::EmptyRight, 100, 149},
      {InteractionClass::ForcepsLeft, 10, 200},
  };
  std::ostringstream out;
  write_event_labels(out, events);
  std::istringstream in(out.str());
  CHECK(parse_event_labels(in) == events);
}

TEST_CASE("session report: all fields survive write/parse, none included") {
  SessionReport rep;
  rep.frames = 100;
  rep.states_direct = 180;
  rep.states_scenario1 = 12;
  rep.states_scenario2 = 8;
  rep.states_absent = 0;
  rep.fallback_rate = 0.1;
  rep.start_frame = 5;
  rep.end_frame = 95;
  rep.duration_s = 91.0 / 30.0;
  rep.path_length_px_right = 123.456;
  rep.path_length_px_left = 0.125;
  rep.movement_count_right = 7;
  rep.movement_count_left = 0;
  // forceps metrics left unavailable on purpose

  std::ostringstream out;
  write_session_report(out, rep, {{"cfg_smooth_window", "15"}});
  const std::string text = out.str();
  CHECK(text.find("forceps_ar_mean=none") != std::string::npos);

  std::istringstream in(text);
  const SessionReport back = parse_session_report(in);
  CHECK(back.frames == rep.frames);
  CHECK(back.states_scenario1 == rep.states_scenario1);
  CHECK(back.fallback_rate == rep.fallback_rate);
  CHECK(back.start_frame == rep.start_frame);
  CHECK(back.duration_s == rep.duration_s);
  CHECK(back.path_length_px_right == rep.path_length_px_right);
  CHECK(back.movement_count_left == rep.movement_count_left);
  CHECK(!back.forceps_ar_mean.has_value());
  CHECK(!back.forceps_ar_std.has_value());
}

TEST_CASE("empty report still writes every metric field") {
  std::ostringstream out;
  write_session_report(out, SessionReport{});
  const std::string text = out.str();
  for (const char* key :
       {"start_frame", "end_frame", "duration_s", "path_length_px_right",
        "path_length_px_left", "movement_count_right", "movement_count_left",
        "forceps_ar_mean", "forceps_ar_std", "frames", "states_direct",
        "states_scenario1", "states_scenario2", "states_absent",
        "fallback_rate"}) {
    CAPTURE(key);
    CHECK(text.find(std::string(key) + "=") != std::string::npos);
  }
}

TEST_CASE("class taxonomies: 5 + 8 = 13, names round-trip") {
  CHECK(kLocClassCount == 5);
  CHECK(kInteractionClassCount == 8);
  CHECK(kLocClassCount + kInteractionClassCount == 13);
  int hands = 0, tools = 0;
  for (int c = 0; c < kLocClassCount; ++c) {
    const auto cls = static_cast<LocClass>(c);
    (is_hand(cls) ? hands : tools) += 1;
    CHECK(loc_class_from(to_string(cls)) == cls);
    CHECK(!interaction_class_from(to_string(cls)).has_value());
  }
  CHECK(hands == 2);
  CHECK(tools == 3);
  for (int c = 0; c < kInteractionClassCount; ++c) {
    const auto cls = static_cast<InteractionClass>(c);
    CHECK(interaction_class_from(to_string(cls)) == cls);
    CHECK(interaction_class(payload_of(cls), side_of(cls)) == cls);
  }
  CHECK(to_string(InteractionClass::NeedleDriverRight) ==
        "needle_driver_in_right_hand");
  CHECK(to_string(InteractionClass::EmptyLeft) == "empty_left_hand");
}

TEST_CASE("format_number round-trips doubles exactly") {
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const double v = rng.uniform(-1e6, 1e6);
    const std::string s = format_number(v);
    CHECK(std::stod(s) == v);
  }
  CHECK(format_number(30.0) == "30");
}
