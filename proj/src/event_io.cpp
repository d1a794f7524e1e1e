#include "tot/event_io.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>

#include <json.hpp>

#include "tot/common.hpp"
#include "tot/features.hpp"

namespace tot {

using nlohmann::json;

FrameFeatures frame_from_row(const double* row) {
  FrameFeatures frame{};
  // flatten_into defines the canonical layout; mirror it here.
  const double* p = row;
  std::memcpy(frame.foot.activity_probs.data(), p, sizeof(double) * kFootDim);
  p += kFootDim;
  std::memcpy(frame.gaze.zone_probs.data(), p, sizeof(double) * kGazeDim);
  p += kGazeDim;
  std::memcpy(frame.hands.activity_probs_left.data(), p, sizeof(double) * 6);
  p += 6;
  std::memcpy(frame.hands.activity_probs_right.data(), p, sizeof(double) * 6);
  p += 6;
  frame.stereo.dist_left_m = p[0];
  frame.stereo.dist_right_m = p[1];
  p += kStereoDim;
  std::memcpy(frame.objects.object_probs_left.data(), p, sizeof(double) * 7);
  p += 7;
  std::memcpy(frame.objects.object_probs_right.data(), p, sizeof(double) * 7);
  p += 7;
  frame.timestamp_s = *p;
  return frame;
}

void frame_to_row(const FrameFeatures& frame, double* row) {
  flatten_into(frame, FeatureMask::all(), row);
  row[kFullFeatureDim] = frame.timestamp_s;
}

namespace {

json event_to_json(const TakeoverEvent& ev) {
  json j;
  j["event_id"] = ev.event_id;
  j["activity"] = to_string(ev.activity);
  j["frame_rate_hz"] = ev.frame_rate_hz;
  j["t_eyes_s"] = ev.t_eyes_s;
  j["t_foot_s"] = ev.t_foot_s;
  j["t_hands_s"] = ev.t_hands_s;
  json frames = json::array();
  std::array<double, kFrameRowSize> row{};
  for (const FrameFeatures& frame : ev.frames) {
    frame_to_row(frame, row.data());
    frames.push_back(json(row));
  }
  j["frames"] = std::move(frames);
  return j;
}

[[noreturn]] void fail_line(long line_no, const std::string& what) {
  std::ostringstream msg;
  msg << "event file line " << line_no << ": " << what;
  throw DataFormatError(msg.str());
}

TakeoverEvent event_from_json(const json& j, long line_no) {
  TakeoverEvent ev;
  try {
    ev.event_id = j.at("event_id").get<std::string>();
    ev.activity = activity_from_string(j.at("activity").get<std::string>());
    ev.frame_rate_hz = j.at("frame_rate_hz").get<double>();
    ev.t_eyes_s = j.at("t_eyes_s").get<double>();
    ev.t_foot_s = j.at("t_foot_s").get<double>();
    ev.t_hands_s = j.at("t_hands_s").get<double>();
    const json& frames = j.at("frames");
    if (!frames.is_array()) fail_line(line_no, "\"frames\" must be an array");
    ev.frames.reserve(frames.size());
    std::array<double, kFrameRowSize> row{};
    for (std::size_t i = 0; i < frames.size(); ++i) {
      const json& fr = frames[i];
      if (!fr.is_array() || fr.size() != kFrameRowSize) {
        std::ostringstream msg;
        msg << "frame " << i << " must be an array of " << kFrameRowSize << " numbers";
        fail_line(line_no, msg.str());
      }
      for (int k = 0; k < kFrameRowSize; ++k) row[static_cast<std::size_t>(k)] = fr[static_cast<std::size_t>(k)].get<double>();
      ev.frames.push_back(frame_from_row(row.data()));
    }
  } catch (const json::exception& e) {
    fail_line(line_no, e.what());
  } catch (const DataFormatError& e) {
    const std::string_view msg(e.what());
    if (msg.rfind("event file line", 0) == 0) throw;  // already annotated
    fail_line(line_no, e.what());
  }
  std::vector<std::string> problems = validate_event(ev);
  if (!problems.empty()) fail_line(line_no, "event \"" + ev.event_id + "\": " + problems.front());
  return ev;
}

}  // namespace

void save_events(const EventSet& events, std::ostream& os) {
  for (const TakeoverEvent& ev : events.events) {
    os << event_to_json(ev).dump() << '\n';
  }
  if (!os) throw DataFormatError("failed while writing event stream");
}

void save_events(const EventSet& events, const std::string& path) {
  // Streamed to a sibling temp file, then renamed into place: event files
  // can be large, and readers must never observe a partial one.
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw DataFormatError("cannot open for writing: " + tmp);
    save_events(events, os);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw DataFormatError("cannot move event file into place at " + path +
                          ": " + ec.message());
  }
}

EventSet load_events(std::istream& is) {
  EventSet set;
  std::string line;
  long line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    // Skip blank lines so trailing newlines and hand-edited files are fine.
    bool blank = true;
    for (char c : line) {
      if (c != ' ' && c != '\t' && c != '\r') {
        blank = false;
        break;
      }
    }
    if (blank) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) fail_line(line_no, "not valid JSON");
    if (!j.is_object()) fail_line(line_no, "expected a JSON object");
    set.events.push_back(event_from_json(j, line_no));
  }
  return set;
}

EventSet load_events(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataFormatError("cannot open: " + path);
  return load_events(is);
}

namespace {

json stats_to_json(const ComponentTimeStats& s) {
  return json{{"mean_s", s.mean_s}, {"spread_s", s.spread_s}};
}

ComponentTimeStats stats_from_json(const json& j) {
  return ComponentTimeStats{j.at("mean_s").get<double>(), j.at("spread_s").get<double>()};
}

json coupling_to_json(const TimeToIntensity& c) {
  return json{{"lo_s", c.lo_s}, {"hi_s", c.hi_s}};
}

TimeToIntensity coupling_from_json(const json& j) {
  return TimeToIntensity{j.at("lo_s").get<double>(), j.at("hi_s").get<double>()};
}

json profile_to_json(const ActivityProfile& p) {
  json j;
  j["count"] = p.count;
  j["t_eyes"] = stats_to_json(p.t_eyes);
  j["t_foot"] = stats_to_json(p.t_foot);
  j["t_hands"] = stats_to_json(p.t_hands);
  j["gaze_offroad_zone"] = gaze_zone_name(p.gaze_offroad_zone);
  j["hand_distracted_state"] = hand_activity_name(p.hand_distracted_state);
  j["held_object"] = hand_object_name(p.held_object);
  return j;
}

ActivityProfile profile_from_json(const json& j) {
  ActivityProfile p;
  p.count = j.at("count").get<int>();
  p.t_eyes = stats_from_json(j.at("t_eyes"));
  p.t_foot = stats_from_json(j.at("t_foot"));
  p.t_hands = stats_from_json(j.at("t_hands"));
  p.gaze_offroad_zone = gaze_zone_from_string(j.at("gaze_offroad_zone").get<std::string>());
  p.hand_distracted_state = hand_activity_from_string(j.at("hand_distracted_state").get<std::string>());
  p.held_object = hand_object_from_string(j.at("held_object").get<std::string>());
  return p;
}

}  // namespace

std::string synth_config_to_json(const SynthConfig& cfg) {
  json j;
  j["seed"] = cfg.seed;
  j["frame_rate_hz"] = cfg.frame_rate_hz;
  j["emission_noise"] = cfg.emission_noise;
  j["eyes_coupling"] = coupling_to_json(cfg.eyes_coupling);
  j["foot_coupling"] = coupling_to_json(cfg.foot_coupling);
  j["hands_coupling"] = coupling_to_json(cfg.hands_coupling);
  json profiles = json::object();
  for (int a = 0; a < kNumActivities; ++a) {
    profiles[to_string(static_cast<Activity>(a))] =
        profile_to_json(cfg.profiles[static_cast<std::size_t>(a)]);
  }
  j["profiles"] = std::move(profiles);
  return j.dump(2);
}

SynthConfig synth_config_from_json(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw DataFormatError("synth config: not valid JSON");
  SynthConfig cfg = default_synth_config();
  try {
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.frame_rate_hz = j.at("frame_rate_hz").get<double>();
    cfg.emission_noise = j.at("emission_noise").get<double>();
    cfg.eyes_coupling = coupling_from_json(j.at("eyes_coupling"));
    cfg.foot_coupling = coupling_from_json(j.at("foot_coupling"));
    cfg.hands_coupling = coupling_from_json(j.at("hands_coupling"));
    const json& profiles = j.at("profiles");
    for (int a = 0; a < kNumActivities; ++a) {
      const std::string name = to_string(static_cast<Activity>(a));
      if (!profiles.contains(name)) throw DataFormatError("synth config: missing profile \"" + name + "\"");
      cfg.profiles[static_cast<std::size_t>(a)] = profile_from_json(profiles.at(name));
    }
  } catch (const json::exception& e) {
    throw DataFormatError(std::string("synth config: ") + e.what());
  }
  std::vector<std::string> problems = validate_synth_config(cfg);
  if (!problems.empty()) throw DataFormatError("synth config: " + problems.front());
  return cfg;
}

void save_synth_config(const SynthConfig& cfg, const std::string& path) {
  atomic_write_text(path, synth_config_to_json(cfg) + "\n");
}

SynthConfig load_synth_config(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataFormatError("cannot open: " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  return synth_config_from_json(buf.str());
}

}  // namespace tot
