#include "tot/common.hpp"

#include <filesystem>
#include <fstream>

namespace tot {

void atomic_write_text(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw DataFormatError("cannot open for writing: " + tmp);
    os << text;
    if (!os) throw DataFormatError("failed while writing: " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw DataFormatError("cannot move file into place at " + path + ": " +
                          ec.message());
  }
}

}  // namespace tot
