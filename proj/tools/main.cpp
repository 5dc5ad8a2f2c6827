#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "opskill/eval.hpp"
#include "opskill/io.hpp"
#include "opskill/pipeline.hpp"
#include "opskill/suppression.hpp"
#include "opskill/synth.hpp"
#include "opskill/temporal.hpp"

namespace {

using namespace opskill;

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitConfigError = 2;

// Wraps parse failures with the offending path.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  return in;
}

// Output files are removed again if the command fails midway.
class OutputSet {
 public:
  std::ofstream& open(const std::string& path) {
    auto stream = std::make_unique<std::ofstream>(path);
    if (!*stream) throw InputError("cannot write " + path);
    paths_.push_back(path);
    streams_.push_back(std::move(stream));
    return *streams_.back();
  }

  void commit() {
    for (auto& s : streams_) {
      s->flush();
      if (!*s) throw InputError("write failure on " + paths_[0]);
    }
    committed_ = true;
  }

  ~OutputSet() {
    if (committed_) return;
    streams_.clear();
    for (const auto& p : paths_) {
      std::error_code ec;
      std::filesystem::remove(p, ec);
    }
  }

 private:
  std::vector<std::string> paths_;
  std::vector<std::unique_ptr<std::ofstream>> streams_;
  bool committed_ = false;
};

template <typename T>
T parse_file(const std::string& path, T (*parser)(std::istream&)) {
  std::ifstream in = open_input(path);
  try {
    return parser(in);
  } catch (const ParseError& e) {
    throw InputError(path + ": " + e.what());
  }
}

void add_pipeline_flags(CLI::App* cmd, PipelineConfig& cfg) {
  cmd->add_option("--nms-iou", cfg.nms_iou,
                  "per-class NMS IoU threshold");
  cmd->add_option("--cross-nms-iou", cfg.cross_nms_iou,
                  "cross-class tool suppression IoU threshold");
  cmd->add_option("--s1-overlap", cfg.s1_overlap,
                  "Scenario-1 hand/tool overlap threshold");
  cmd->add_option("--smooth-window", cfg.smooth_window,
                  "majority smoothing window in frames");
  cmd->add_option("--fast-gate", cfg.fast_gate,
                  "hand speed (px/s) above which decisions freeze");
  cmd->add_option("--max-gap", cfg.max_gap,
                  "longest detection gap bridged by interpolation");
  cmd->add_option("--static-thresh", cfg.static_thresh,
                  "static/moving speed threshold (px/s)");
}

struct RunArgs {
  std::string detections, meta;
  std::string out_timeline, out_events, out_report;
  std::string out_raw_timeline;
  PipelineConfig cfg;
};

int cmd_run(const RunArgs& args) {
  args.cfg.validate();
  const SessionMeta meta =
      parse_file(args.meta, parse_session_meta);

  std::ifstream det_in = open_input(args.detections);
  DetectionStreamParser parser(det_in);

  OutputSet outputs;
  std::ofstream& timeline_out = outputs.open(args.out_timeline);
  std::ofstream& events_out = outputs.open(args.out_events);
  std::ofstream& report_out = outputs.open(args.out_report);
  std::ofstream* raw_out = nullptr;
  if (!args.out_raw_timeline.empty()) {
    raw_out = &outputs.open(args.out_raw_timeline);
    *raw_out << "fps=" << format_number(meta.fps) << '\n';
  }
  timeline_out << "fps=" << format_number(meta.fps) << '\n';

  EventBuilder events_right, events_left;
  SessionRunner runner(meta, args.cfg,
                       [&](const UsageState& raw, const UsageState& smoothed) {
                         write_usage_record(timeline_out, smoothed);
                         if (raw_out) write_usage_record(*raw_out, raw);
                         (smoothed.side == Side::Right ? events_right
                                                       : events_left)
                             .add(smoothed);
                       });
  try {
    while (auto group = parser.next()) runner.push(*group);
  } catch (const ParseError& e) {
    throw InputError(args.detections + ": " + e.what());
  }
  const SessionReport report = runner.finish();

  std::vector<TimedEvent> events = events_right.finish();
  auto left = events_left.finish();
  events.insert(events.end(), left.begin(), left.end());
  write_event_labels(events_out, events);

  auto extras = args.cfg.echo();
  extras.emplace_back("cfg_fps", format_number(meta.fps));
  write_session_report(report_out, report, extras);
  outputs.commit();
  return kExitOk;
}

struct EvalArgs {
  std::string detections, box_labels;
  std::string timeline, events, meta;
  std::string out_report;
  double iou_thresh = 0.5;
};

int cmd_eval(const EvalArgs& args) {
  if (args.iou_thresh < 0.0 || args.iou_thresh > 1.0) {
    throw std::invalid_argument("--iou must be in [0,1]");
  }
  const bool detection_half =
      !args.detections.empty() && !args.box_labels.empty();
  const bool usage_half = !args.timeline.empty() && !args.events.empty();
  if (!detection_half && !usage_half) {
    throw std::invalid_argument(
        "eval needs --detections/--box-labels and/or --timeline/--events");
  }

  EvalReport report;
  if (detection_half) {
    const auto dets = parse_file(args.detections, parse_detection_stream);
    const auto gts = parse_file(args.box_labels, parse_box_labels);
    report = detection_eval(dets, gts, args.iou_thresh);
  }
  if (usage_half) {
    const SessionMeta meta =
        args.meta.empty() ? SessionMeta{}
                          : parse_file(args.meta, parse_session_meta);
    const auto timeline = parse_file(args.timeline, parse_usage_timeline);
    const auto events = parse_file(args.events, parse_event_labels);
    report.usage = usage_frame_metrics(timeline, events, meta);
  }

  OutputSet outputs;
  write_eval_report(outputs.open(args.out_report), report);
  outputs.commit();
  return kExitOk;
}

struct MetricsArgs {
  std::string timeline, detections, meta;
  std::string out_report;
  PipelineConfig cfg;
};

// Recomputes the motion metrics for an existing usage timeline; hand
// trajectories come from the localization detections.
int cmd_metrics(const MetricsArgs& args) {
  args.cfg.validate();
  const SessionMeta meta = parse_file(args.meta, parse_session_meta);
  const UsageTimeline timeline =
      parse_file(args.timeline, parse_usage_timeline);
  const auto stream = parse_file(args.detections, parse_detection_stream);

  std::vector<FrameGroup> loc_groups(stream.size());
  for (std::size_t i = 0; i < stream.size(); ++i) {
    loc_groups[i].frame = stream[i].frame;
    std::vector<Detection> loc;
    for (const Detection& d : stream[i].dets) {
      if (d.channel() == Channel::Localization) loc.push_back(d);
    }
    loc_groups[i].dets =
        tool_nms(standard_nms(loc, args.cfg.nms_iou), args.cfg.cross_nms_iou);
  }

  const Trajectory traj_r =
      build_trajectory(loc_groups, Side::Right, args.cfg.max_gap);
  const Trajectory traj_l =
      build_trajectory(loc_groups, Side::Left, args.cfg.max_gap);
  const auto vel_r = velocity(traj_r, meta.fps);
  const auto vel_l = velocity(traj_l, meta.fps);

  ResolveDiagnostics diag;
  for (Side side : {Side::Right, Side::Left}) {
    for (const UsageState& s : timeline.states(side)) {
      switch (s.provenance) {
        case Provenance::Direct: ++diag.direct; break;
        case Provenance::Scenario1: ++diag.scenario1; break;
        case Provenance::Scenario2: ++diag.scenario2; break;
        case Provenance::Absent: ++diag.absent; break;
      }
    }
  }

  const SessionReport report =
      compute_report(timeline.right, timeline.left, traj_r, traj_l, vel_r,
                     vel_l, loc_groups, meta, diag, args.cfg.static_thresh);

  OutputSet outputs;
  auto extras = args.cfg.echo();
  extras.emplace_back("cfg_fps", format_number(meta.fps));
  write_session_report(outputs.open(args.out_report), report, extras);
  outputs.commit();
  return kExitOk;
}

struct SynthArgs {
  std::string out_dir;
  SynthConfig cfg;
  std::string profile = "expert";
};

int cmd_synth(const SynthArgs& args) {
  SynthConfig cfg = args.cfg;
  if (args.profile == "expert") {
    cfg.profile = SkillProfile::Expert;
  } else if (args.profile == "novice") {
    cfg.profile = SkillProfile::Novice;
  } else {
    throw std::invalid_argument("--profile must be expert or novice");
  }

  const Scenario scenario = generate_scenario(cfg);

  std::filesystem::create_directories(args.out_dir);
  const auto path = [&](const char* name) {
    return (std::filesystem::path(args.out_dir) / name).string();
  };

  OutputSet outputs;
  write_detection_stream(outputs.open(path("detections.txt")),
                         scenario.detections);
  write_box_labels(outputs.open(path("box_labels.txt")), scenario.gt_boxes);
  write_event_labels(outputs.open(path("events.csv")), scenario.events);
  write_session_meta(outputs.open(path("meta.txt")), scenario.meta);
  write_session_report(outputs.open(path("expected_report.txt")),
                       scenario.expected);
  outputs.commit();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Dual-channel surgical detection post-processing: usage resolution, "
      "smoothing, motion metrics, and evaluation"};
  app.require_subcommand(1);

  RunArgs run_args;
  CLI::App* run = app.add_subcommand(
      "run", "Process a detection stream into a usage timeline and report");
  run->add_option("--detections", run_args.detections)->required();
  run->add_option("--meta", run_args.meta)->required();
  run->add_option("--out-timeline", run_args.out_timeline)->required();
  run->add_option("--out-events", run_args.out_events)->required();
  run->add_option("--out-report", run_args.out_report)->required();
  run->add_option("--out-raw-timeline", run_args.out_raw_timeline,
                  "also write the pre-smoothing timeline");
  add_pipeline_flags(run, run_args.cfg);

  EvalArgs eval_args;
  CLI::App* eval = app.add_subcommand(
      "eval", "Score detections and/or a usage timeline against ground truth");
  eval->add_option("--detections", eval_args.detections);
  eval->add_option("--box-labels", eval_args.box_labels);
  eval->add_option("--timeline", eval_args.timeline);
  eval->add_option("--events", eval_args.events);
  eval->add_option("--meta", eval_args.meta);
  eval->add_option("--iou", eval_args.iou_thresh,
                   "detection match IoU threshold");
  eval->add_option("--out-report", eval_args.out_report)->required();

  MetricsArgs metrics_args;
  CLI::App* metrics = app.add_subcommand(
      "metrics", "Recompute motion metrics for an existing usage timeline");
  metrics->add_option("--timeline", metrics_args.timeline)->required();
  metrics->add_option("--detections", metrics_args.detections)->required();
  metrics->add_option("--meta", metrics_args.meta)->required();
  metrics->add_option("--out-report", metrics_args.out_report)->required();
  add_pipeline_flags(metrics, metrics_args.cfg);

  SynthArgs synth_args;
  CLI::App* synth = app.add_subcommand(
      "synth", "Generate a seeded synthetic session with ground truth");
  synth->add_option("--out-dir", synth_args.out_dir)->required();
  synth->add_option("--seed", synth_args.cfg.seed);
  synth->add_option("--frames", synth_args.cfg.frames);
  synth->add_option("--fps", synth_args.cfg.fps);
  synth->add_option("--width", synth_args.cfg.frame_width);
  synth->add_option("--height", synth_args.cfg.frame_height);
  synth->add_option("--profile", synth_args.profile, "expert or novice");
  synth->add_option("--dropout", synth_args.cfg.noise.interaction_dropout_p,
                    "interaction box dropout probability");
  synth->add_option("--duplicate", synth_args.cfg.noise.duplicate_p,
                    "interaction box duplication probability");
  synth->add_option("--flip", synth_args.cfg.noise.flip_p,
                    "payload flip probability");
  synth->add_option("--jitter", synth_args.cfg.noise.box_jitter_px,
                    "box corner jitter in px");
  synth->add_option("--conf-lo", synth_args.cfg.noise.confidence_lo);
  synth->add_option("--conf-hi", synth_args.cfg.noise.confidence_hi);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfigError;
  }

  try {
    if (run->parsed()) return cmd_run(run_args);
    if (eval->parsed()) return cmd_eval(eval_args);
    if (metrics->parsed()) return cmd_metrics(metrics_args);
    if (synth->parsed()) return cmd_synth(synth_args);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInputError;
  }
  return kExitOk;
}
