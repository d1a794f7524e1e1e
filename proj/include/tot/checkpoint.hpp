#pragma once

#include <string>

#include "tot/model.hpp"

namespace tot {

// Binary checkpoint. Layout (all integers and doubles little-endian):
//   8 bytes  magic "TOTCKPT\n"
//   u32      format version (currently 1)
//   u8       variant, u8 head kind, u8 feature-mask bits (F..O = bit 0..4),
//   u8       reserved (0)
//   i32      input_dim, i32 hidden_dim, i32 num_modes
//   u64      init seed
//   u32      tensor count, then per tensor:
//     u16 name length, name bytes, i32 rows, i32 cols, rows*cols f64 values
// Files are written to "<path>.tmp" and renamed into place so a failed
// write never leaves a partial checkpoint behind. See docs/formats.md.
inline constexpr char kCheckpointMagic[8] = {'T', 'O', 'T', 'C',
                                             'K', 'P', 'T', '\n'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const Model& model, const std::string& path);

// Throws DataFormatError on a bad magic ("not a checkpoint"), an
// unsupported version, or tensors that do not match the config's layout.
Model load_checkpoint(const std::string& path);

}  // namespace tot
