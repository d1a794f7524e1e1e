#pragma once

#include <iosfwd>
#include <string>

#include "tot/events.hpp"
#include "tot/synth.hpp"

namespace tot {

// Event files are line-delimited JSON: one event object per line with
// fields event_id, activity, frame_rate_hz, t_eyes_s, t_foot_s, t_hands_s,
// frames. Each frame is an array of 42 numbers: the 41 features in
// canonical F,G,H,S,O order followed by the frame timestamp. Numbers are
// written with shortest round-trip precision, so save/load is lossless.
// See docs/formats.md.

void save_events(const EventSet& events, std::ostream& os);
void save_events(const EventSet& events, const std::string& path);

// Throws DataFormatError naming the offending line on malformed records,
// unknown activity labels, or events violating validate_event (including
// component times past the recorded post-TOR span).
EventSet load_events(std::istream& is);
EventSet load_events(const std::string& path);

// Parses one frame row (42 numbers, features then timestamp).
FrameFeatures frame_from_row(const double* row);
void frame_to_row(const FrameFeatures& frame, double* row);
inline constexpr int kFrameRowSize = kFullFeatureDim + 1;

// Synth generator config as a single JSON document.
void save_synth_config(const SynthConfig& cfg, const std::string& path);
SynthConfig load_synth_config(const std::string& path);
std::string synth_config_to_json(const SynthConfig& cfg);
SynthConfig synth_config_from_json(const std::string& text);

}  // namespace tot
