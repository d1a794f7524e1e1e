#pragma once

#include <stdexcept>
#include <string>

namespace tot {

// How batch-level kernels (gradient accumulation, evaluation, augmentation)
// run. Both policies produce bitwise-identical results: work is split into
// fixed-size blocks that are reduced in index order, so the result does not
// depend on the thread count.
enum class ExecPolicy { Serial, Parallel };

// Malformed files, unknown labels, inconsistent records.
struct DataFormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Non-finite values where finite ones are required.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Writes to "<path>.tmp", then renames into place, so readers never observe
// a partially written file. Throws DataFormatError on I/O failure.
void atomic_write_text(const std::string& path, const std::string& text);

}  // namespace tot
