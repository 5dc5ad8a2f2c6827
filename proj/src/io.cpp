#include "opskill/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>

namespace opskill {

namespace {

bool is_blank_or_comment(const std::string& line) {
  for (char c : line) {
    if (c == '#') return true;
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

// Reads the next content line; strips a trailing CR. Returns false at EOF.
bool next_content_line(std::istream& in, std::string& line,
                       std::size_t& line_no) {
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!is_blank_or_comment(line)) return true;
  }
  return false;
}

std::vector<std::string_view> split_fields(const std::string& line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() &&
           std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
    }
    std::size_t j = i;
    while (j < line.size() &&
           !std::isspace(static_cast<unsigned char>(line[j]))) {
      ++j;
    }
    if (j > i) fields.emplace_back(line.data() + i, j - i);
    i = j;
  }
  return fields;
}

std::vector<std::string_view> split_csv(const std::string& line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      fields.emplace_back(line.data() + start, i - start);
      start = i + 1;
    }
  }
  return fields;
}

double parse_double(std::string_view s, std::size_t line_no,
                    const char* what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw ParseError(line_no, std::string("bad ") + what + " '" +
                                  std::string(s) + "'");
  }
  return v;
}

std::int64_t parse_int(std::string_view s, std::size_t line_no,
                       const char* what) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ParseError(line_no, std::string("bad ") + what + " '" +
                                  std::string(s) + "'");
  }
  return v;
}

Box parse_box_fields(const std::vector<std::string_view>& f, std::size_t base,
                     std::size_t line_no) {
  Box b;
  b.x = parse_double(f[base], line_no, "x");
  b.y = parse_double(f[base + 1], line_no, "y");
  b.w = parse_double(f[base + 2], line_no, "w");
  b.h = parse_double(f[base + 3], line_no, "h");
  if (!box_valid(b)) {
    throw ParseError(line_no, "invalid box (needs w > 0, h > 0, finite "
                              "non-negative coordinates)");
  }
  return b;
}

void write_box_fields(std::ostream& out, const Box& b) {
  out << format_number(b.x) << ' ' << format_number(b.y) << ' '
      << format_number(b.w) << ' ' << format_number(b.h);
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

DetectionStreamParser::DetectionStreamParser(std::istream& in,
                                             bool with_confidence)
    : in_(in), with_confidence_(with_confidence) {}

std::optional<Detection> DetectionStreamParser::read_record() {
  std::string line;
  if (!next_content_line(in_, line, line_no_)) return std::nullopt;
  const auto f = split_fields(line);

  const std::size_t min_fields = with_confidence_ ? 8 : 7;
  // Box labels tolerate an exporter that kept the conf column.
  const std::size_t max_fields = 8;
  if (f.size() < min_fields || f.size() > max_fields) {
    throw ParseError(line_no_, "expected `frame channel class x y w h" +
                                   std::string(with_confidence_ ? " conf`"
                                                                : " [conf]`") +
                                   ", got " + std::to_string(f.size()) +
                                   " fields");
  }

  Detection d;
  d.frame = parse_int(f[0], line_no_, "frame index");
  if (d.frame < 0) {
    throw ParseError(line_no_, "negative frame index");
  }
  if (d.frame < last_record_frame_) {
    throw ParseError(line_no_, "decreasing frame index " +
                                   std::to_string(d.frame) + " after " +
                                   std::to_string(last_record_frame_));
  }
  last_record_frame_ = d.frame;

  const auto channel = channel_from(f[1]);
  if (!channel) {
    throw ParseError(line_no_,
                     "unknown channel '" + std::string(f[1]) + "'");
  }
  if (*channel == Channel::Localization) {
    const auto cls = loc_class_from(f[2]);
    if (!cls) {
      if (interaction_class_from(f[2])) {
        throw ParseError(line_no_, "class '" + std::string(f[2]) +
                                       "' does not belong to channel loc");
      }
      throw ParseError(line_no_, "unknown class '" + std::string(f[2]) + "'");
    }
    d.cls = *cls;
  } else {
    const auto cls = interaction_class_from(f[2]);
    if (!cls) {
      if (loc_class_from(f[2])) {
        throw ParseError(line_no_, "class '" + std::string(f[2]) +
                                       "' does not belong to channel int");
      }
      throw ParseError(line_no_, "unknown class '" + std::string(f[2]) + "'");
    }
    d.cls = *cls;
  }

  d.box = parse_box_fields(f, 3, line_no_);

  if (with_confidence_) {
    d.confidence = parse_double(f[7], line_no_, "confidence");
    if (d.confidence < 0.0 || d.confidence > 1.0) {
      throw ParseError(line_no_, "confidence " + std::string(f[7]) +
                                     " outside [0,1]");
    }
  } else {
    d.confidence = 1.0;
  }
  return d;
}

std::optional<FrameGroup> DetectionStreamParser::next() {
  if (!primed_) {
    pending_ = read_record();
    primed_ = true;
  }
  if (!pending_) return std::nullopt;

  FrameGroup group;
  group.frame = next_frame_;
  if (pending_->frame == next_frame_) {
    do {
      group.dets.push_back(*pending_);
      pending_ = read_record();
    } while (pending_ && pending_->frame == next_frame_);
  }
  ++next_frame_;
  return group;
}

namespace {

std::vector<FrameGroup> drain(DetectionStreamParser& parser) {
  std::vector<FrameGroup> groups;
  while (auto g = parser.next()) {
    groups.push_back(std::move(*g));
  }
  return groups;
}

void write_records(std::ostream& out, const std::vector<FrameGroup>& groups,
                   bool with_confidence) {
  for (const FrameGroup& g : groups) {
    for (const Detection& d : g.dets) {
      out << d.frame << ' ' << to_string(d.channel()) << ' '
          << to_string(d.cls) << ' ';
      write_box_fields(out, d.box);
      if (with_confidence) out << ' ' << format_number(d.confidence);
      out << '\n';
    }
  }
}

}  // namespace

std::vector<FrameGroup> parse_detection_stream(std::istream& in) {
  DetectionStreamParser parser(in, /*with_confidence=*/true);
  return drain(parser);
}

std::vector<FrameGroup> parse_box_labels(std::istream& in) {
  DetectionStreamParser parser(in, /*with_confidence=*/false);
  return drain(parser);
}

void write_detection_stream(std::ostream& out,
                            const std::vector<FrameGroup>& groups) {
  write_records(out, groups, /*with_confidence=*/true);
}

void write_box_labels(std::ostream& out,
                      const std::vector<FrameGroup>& groups) {
  write_records(out, groups, /*with_confidence=*/false);
}

std::vector<TimedEvent> parse_event_labels(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!next_content_line(in, line, line_no)) {
    throw ParseError(1, "missing header `class,start_frame,end_frame`");
  }
  if (line != "class,start_frame,end_frame") {
    throw ParseError(line_no, "bad header '" + line +
                                  "', expected `class,start_frame,end_frame`");
  }

  std::vector<TimedEvent> events;
  std::vector<std::size_t> lines;
  while (next_content_line(in, line, line_no)) {
    const auto f = split_csv(line);
    if (f.size() != 3) {
      throw ParseError(line_no, "expected 3 CSV fields, got " +
                                    std::to_string(f.size()));
    }
    TimedEvent e;
    const auto cls = interaction_class_from(f[0]);
    if (!cls) {
      throw ParseError(line_no, "unknown usage class '" + std::string(f[0]) +
                                    "'");
    }
    e.cls = *cls;
    e.start = parse_int(f[1], line_no, "start_frame");
    e.end = parse_int(f[2], line_no, "end_frame");
    if (e.start < 0) throw ParseError(line_no, "negative start_frame");
    if (e.start > e.end) {
      throw ParseError(line_no, "start_frame " + std::to_string(e.start) +
                                    " > end_frame " + std::to_string(e.end));
    }
    events.push_back(e);
    lines.push_back(line_no);
  }

  std::vector<std::size_t> order(events.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     if (side_of(events[a].cls) != side_of(events[b].cls)) {
                       return side_of(events[a].cls) < side_of(events[b].cls);
                     }
                     return events[a].start < events[b].start;
                   });
  std::vector<TimedEvent> sorted;
  sorted.reserve(events.size());
  for (std::size_t i : order) sorted.push_back(events[i]);
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
    if (side_of(sorted[i].cls) == side_of(sorted[i + 1].cls) &&
        sorted[i].end >= sorted[i + 1].start) {
      throw ParseError(lines[order[i + 1]],
                       "event overlaps the preceding " +
                           std::string(to_string(side_of(sorted[i].cls))) +
                           "-side event ending at frame " +
                           std::to_string(sorted[i].end));
    }
  }
  return sorted;
}

void write_event_labels(std::ostream& out,
                        const std::vector<TimedEvent>& events) {
  out << "class,start_frame,end_frame\n";
  for (const TimedEvent& e : events) {
    out << to_string(e.cls) << ',' << e.start << ',' << e.end << '\n';
  }
}

SessionMeta parse_session_meta(std::istream& in) {
  SessionMeta meta;
  std::string line;
  std::size_t line_no = 0;
  while (next_content_line(in, line, line_no)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError(line_no, "expected key=value, got '" + line + "'");
    }
    const std::string key = line.substr(0, eq);
    const std::string_view value = std::string_view(line).substr(eq + 1);
    if (key == "fps") {
      meta.fps = parse_double(value, line_no, "fps");
      if (!(meta.fps > 0.0)) throw ParseError(line_no, "fps must be > 0");
    } else if (key == "width") {
      meta.frame_width =
          static_cast<int>(parse_int(value, line_no, "width"));
    } else if (key == "height") {
      meta.frame_height =
          static_cast<int>(parse_int(value, line_no, "height"));
    } else {
      throw ParseError(line_no, "unknown metadata key '" + key + "'");
    }
  }
  return meta;
}

void write_session_meta(std::ostream& out, const SessionMeta& meta) {
  out << "fps=" << format_number(meta.fps) << '\n'
      << "width=" << meta.frame_width << '\n'
      << "height=" << meta.frame_height << '\n';
}

UsageTimeline parse_usage_timeline(std::istream& in) {
  UsageTimeline tl;
  std::string line;
  std::size_t line_no = 0;
  bool saw_fps = false;

  struct Slot {
    bool filled = false;
    UsageState state;
  };
  std::array<std::vector<Slot>, kSideCount> slots;

  while (next_content_line(in, line, line_no)) {
    if (!saw_fps && line.rfind("fps=", 0) == 0) {
      tl.fps = parse_double(std::string_view(line).substr(4), line_no, "fps");
      if (!(tl.fps > 0.0)) throw ParseError(line_no, "fps must be > 0");
      saw_fps = true;
      continue;
    }
    const auto f = split_fields(line);
    if (f.size() != 4 && f.size() != 8) {
      throw ParseError(line_no,
                       "expected `frame side payload provenance [x y w h]`");
    }
    UsageState s;
    s.frame = parse_int(f[0], line_no, "frame index");
    if (s.frame < 0) throw ParseError(line_no, "negative frame index");
    const auto side = side_from(f[1]);
    if (!side) {
      throw ParseError(line_no, "unknown side '" + std::string(f[1]) + "'");
    }
    s.side = *side;
    const auto payload = payload_from(f[2]);
    if (!payload) {
      throw ParseError(line_no, "unknown payload '" + std::string(f[2]) + "'");
    }
    s.payload = *payload;
    const auto prov = provenance_from(f[3]);
    if (!prov) {
      throw ParseError(line_no,
                       "unknown provenance '" + std::string(f[3]) + "'");
    }
    s.provenance = *prov;
    if (f.size() == 8) s.box = parse_box_fields(f, 4, line_no);

    auto& v = slots[static_cast<int>(s.side)];
    if (s.frame >= static_cast<FrameIndex>(v.size())) {
      v.resize(static_cast<std::size_t>(s.frame) + 1);
    }
    Slot& slot = v[static_cast<std::size_t>(s.frame)];
    if (slot.filled) {
      throw ParseError(line_no, "duplicate record for frame " +
                                    std::to_string(s.frame) + " side " +
                                    std::string(to_string(s.side)));
    }
    slot.filled = true;
    slot.state = s;
  }

  const std::size_t frames =
      std::max(slots[0].size(), slots[1].size());
  for (Side side : {Side::Right, Side::Left}) {
    auto& v = slots[static_cast<int>(side)];
    for (std::size_t f = 0; f < frames; ++f) {
      if (f >= v.size() || !v[f].filled) {
        throw ParseError(line_no, "missing record for frame " +
                                      std::to_string(f) + " side " +
                                      std::string(to_string(side)));
      }
      tl.states(side).push_back(v[f].state);
    }
  }
  return tl;
}

void write_usage_record(std::ostream& out, const UsageState& s) {
  out << s.frame << ' ' << to_string(s.side) << ' ' << to_string(s.payload)
      << ' ' << to_string(s.provenance);
  if (s.box) {
    out << ' ';
    write_box_fields(out, *s.box);
  }
  out << '\n';
}

void write_usage_timeline(std::ostream& out, const UsageTimeline& timeline) {
  out << "fps=" << format_number(timeline.fps) << '\n';
  for (std::size_t f = 0; f < timeline.frames(); ++f) {
    for (Side side : {Side::Right, Side::Left}) {
      write_usage_record(out, timeline.states(side)[f]);
    }
  }
}

namespace {

void write_opt(std::ostream& out, const char* key,
               const std::optional<double>& v) {
  out << key << '=' << (v ? format_number(*v) : "none") << '\n';
}

void write_opt(std::ostream& out, const char* key,
               const std::optional<std::int64_t>& v) {
  out << key << '=';
  if (v) {
    out << *v;
  } else {
    out << "none";
  }
  out << '\n';
}

}  // namespace

SessionReport parse_session_report(std::istream& in) {
  SessionReport rep;
  std::string line;
  std::size_t line_no = 0;
  while (next_content_line(in, line, line_no)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError(line_no, "expected key=value, got '" + line + "'");
    }
    const std::string key = line.substr(0, eq);
    const std::string_view value = std::string_view(line).substr(eq + 1);

    const auto opt_double = [&]() -> std::optional<double> {
      if (value == "none") return std::nullopt;
      return parse_double(value, line_no, key.c_str());
    };
    const auto opt_int = [&]() -> std::optional<std::int64_t> {
      if (value == "none") return std::nullopt;
      return parse_int(value, line_no, key.c_str());
    };

    if (key == "frames") {
      rep.frames = parse_int(value, line_no, "frames");
    } else if (key == "states_direct") {
      rep.states_direct = parse_int(value, line_no, key.c_str());
    } else if (key == "states_scenario1") {
      rep.states_scenario1 = parse_int(value, line_no, key.c_str());
    } else if (key == "states_scenario2") {
      rep.states_scenario2 = parse_int(value, line_no, key.c_str());
    } else if (key == "states_absent") {
      rep.states_absent = parse_int(value, line_no, key.c_str());
    } else if (key == "absent_frames_right") {
      rep.absent_frames_right = parse_int(value, line_no, key.c_str());
    } else if (key == "absent_frames_left") {
      rep.absent_frames_left = parse_int(value, line_no, key.c_str());
    } else if (key == "fallback_rate") {
      rep.fallback_rate = opt_double();
    } else if (key == "start_frame") {
      rep.start_frame = opt_int();
    } else if (key == "end_frame") {
      rep.end_frame = opt_int();
    } else if (key == "duration_s") {
      rep.duration_s = opt_double();
    } else if (key == "path_length_px_right") {
      rep.path_length_px_right = opt_double();
    } else if (key == "path_length_px_left") {
      rep.path_length_px_left = opt_double();
    } else if (key == "movement_count_right") {
      rep.movement_count_right = opt_int();
    } else if (key == "movement_count_left") {
      rep.movement_count_left = opt_int();
    } else if (key == "forceps_ar_mean") {
      rep.forceps_ar_mean = opt_double();
    } else if (key == "forceps_ar_std") {
      rep.forceps_ar_std = opt_double();
    }
    // Unknown keys (config echoes) are skipped.
  }
  return rep;
}

void write_session_report(
    std::ostream& out, const SessionReport& report,
    const std::vector<std::pair<std::string, std::string>>& extras) {
  write_opt(out, "start_frame", report.start_frame);
  write_opt(out, "end_frame", report.end_frame);
  write_opt(out, "duration_s", report.duration_s);
  write_opt(out, "path_length_px_right", report.path_length_px_right);
  write_opt(out, "path_length_px_left", report.path_length_px_left);
  write_opt(out, "movement_count_right", report.movement_count_right);
  write_opt(out, "movement_count_left", report.movement_count_left);
  write_opt(out, "forceps_ar_mean", report.forceps_ar_mean);
  write_opt(out, "forceps_ar_std", report.forceps_ar_std);
  out << "frames=" << report.frames << '\n';
  out << "states_direct=" << report.states_direct << '\n';
  out << "states_scenario1=" << report.states_scenario1 << '\n';
  out << "states_scenario2=" << report.states_scenario2 << '\n';
  out << "states_absent=" << report.states_absent << '\n';
  out << "absent_frames_right=" << report.absent_frames_right << '\n';
  out << "absent_frames_left=" << report.absent_frames_left << '\n';
  write_opt(out, "fallback_rate", report.fallback_rate);
  for (const auto& [key, value] : extras) {
    out << key << '=' << value << '\n';
  }
}

void write_eval_report(std::ostream& out, const EvalReport& report) {
  for (int c = 0; c < kLocClassCount; ++c) {
    out << "ap50_loc_" << to_string(static_cast<LocClass>(c)) << '='
        << (report.ap_loc[c] ? format_number(*report.ap_loc[c]) : "none")
        << '\n';
  }
  for (int c = 0; c < kInteractionClassCount; ++c) {
    out << "ap50_int_" << to_string(static_cast<InteractionClass>(c)) << '='
        << (report.ap_int[c] ? format_number(*report.ap_int[c]) : "none")
        << '\n';
  }
  write_opt(out, "map_localization", report.map_localization);
  write_opt(out, "map_interaction", report.map_interaction);
  write_opt(out, "map_overall", report.map_overall);

  if (report.usage) {
    const UsageMetrics& u = *report.usage;
    for (int c = 0; c < kUsageCategoryCount; ++c) {
      const auto name = to_string(static_cast<UsageCategory>(c));
      const auto& score = u.per_category[c];
      out << "usage_precision_" << name << '='
          << (score ? format_number(score->precision) : "none") << '\n';
      out << "usage_recall_" << name << '='
          << (score ? format_number(score->recall) : "none") << '\n';
      out << "usage_f1_" << name << '='
          << (score ? format_number(score->f1) : "none") << '\n';
    }
    out << "usage_mean_precision=" << format_number(u.mean_precision) << '\n';
    out << "usage_mean_recall=" << format_number(u.mean_recall) << '\n';
    out << "usage_mean_f1=" << format_number(u.mean_f1) << '\n';
    out << "usage_accuracy=" << format_number(u.accuracy) << '\n';
    out << "usage_slots=" << u.slots << '\n';
  }
}

}  // namespace opskill
