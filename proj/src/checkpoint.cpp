#include "tot/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tot/common.hpp"

namespace tot {

namespace {

static_assert(std::endian::native == std::endian::little ||
                  std::endian::native == std::endian::big,
              "mixed-endian platforms are not supported");

template <typename T>
void write_le(std::ostream& os, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(std::begin(bytes), std::end(bytes));
  }
  os.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T read_le(std::istream& is) {
  unsigned char bytes[sizeof(T)];
  is.read(reinterpret_cast<char*>(bytes), sizeof(T));
  if (!is) throw DataFormatError("checkpoint: truncated file");
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(std::begin(bytes), std::end(bytes));
  }
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

std::uint8_t mask_bits(const FeatureMask& m) {
  std::uint8_t b = 0;
  if (m.use_foot) b |= 1u << 0;
  if (m.use_gaze) b |= 1u << 1;
  if (m.use_hand) b |= 1u << 2;
  if (m.use_stereo) b |= 1u << 3;
  if (m.use_object) b |= 1u << 4;
  return b;
}

FeatureMask mask_from_bits(std::uint8_t b) {
  FeatureMask m;
  m.use_foot = b & (1u << 0);
  m.use_gaze = b & (1u << 1);
  m.use_hand = b & (1u << 2);
  m.use_stereo = b & (1u << 3);
  m.use_object = b & (1u << 4);
  return m;
}

}  // namespace

void save_checkpoint(const Model& model, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw DataFormatError("cannot open for writing: " + tmp);
    os.write(kCheckpointMagic, sizeof(kCheckpointMagic));
    write_le<std::uint32_t>(os, kCheckpointVersion);
    write_le<std::uint8_t>(os, static_cast<std::uint8_t>(model.config.variant));
    write_le<std::uint8_t>(os, static_cast<std::uint8_t>(model.head_kind));
    write_le<std::uint8_t>(os, mask_bits(model.mask));
    write_le<std::uint8_t>(os, 0);
    write_le<std::int32_t>(os, model.config.input_dim);
    write_le<std::int32_t>(os, model.config.hidden_dim);
    write_le<std::int32_t>(os, model.config.num_modes);
    write_le<std::uint64_t>(os, model.config.seed);
    write_le<std::uint32_t>(os,
                            static_cast<std::uint32_t>(model.layout.tensors.size()));
    for (const TensorSpec& t : model.layout.tensors) {
      write_le<std::uint16_t>(os, static_cast<std::uint16_t>(t.name.size()));
      os.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
      write_le<std::int32_t>(os, t.rows);
      write_le<std::int32_t>(os, t.cols);
      const double* p = model.params.data() + t.offset;
      for (std::size_t i = 0; i < t.size(); ++i) write_le<double>(os, p[i]);
    }
    if (!os) throw DataFormatError("failed while writing: " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw DataFormatError("cannot move checkpoint into place at " + path +
                          ": " + ec.message());
  }
}

Model load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataFormatError("cannot open: " + path);

  char magic[sizeof(kCheckpointMagic)];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0) {
    throw DataFormatError(path + " is not a checkpoint (bad magic bytes)");
  }
  const auto version = read_le<std::uint32_t>(is);
  if (version != kCheckpointVersion) {
    std::ostringstream os;
    os << path << ": checkpoint format version " << version
       << " is not supported (expected " << kCheckpointVersion << ")";
    throw DataFormatError(os.str());
  }

  const auto variant_raw = read_le<std::uint8_t>(is);
  const auto head_raw = read_le<std::uint8_t>(is);
  const auto mask_raw = read_le<std::uint8_t>(is);
  (void)read_le<std::uint8_t>(is);  // reserved
  if (variant_raw > 3) throw DataFormatError("checkpoint: unknown variant id");
  if (head_raw > 1) throw DataFormatError("checkpoint: unknown head kind id");

  ModelConfig cfg;
  cfg.variant = static_cast<Variant>(variant_raw);
  cfg.input_dim = read_le<std::int32_t>(is);
  cfg.hidden_dim = read_le<std::int32_t>(is);
  cfg.num_modes = read_le<std::int32_t>(is);
  cfg.seed = read_le<std::uint64_t>(is);
  const HeadKind head = static_cast<HeadKind>(head_raw);
  const FeatureMask mask = mask_from_bits(mask_raw);
  if (cfg.input_dim != feature_dim(mask)) {
    throw DataFormatError(
        "checkpoint: input_dim does not match the stored feature mask");
  }
  std::vector<std::string> problems = validate_config(cfg);
  if (!problems.empty()) {
    throw DataFormatError("checkpoint: " + problems.front());
  }

  Model model;
  model.config = cfg;
  model.head_kind = head;
  model.mask = mask;
  model.layout = make_layout(cfg, head);
  model.params.assign(model.layout.total_size, 0.0);

  const auto count = read_le<std::uint32_t>(is);
  if (count != model.layout.tensors.size()) {
    throw DataFormatError("checkpoint: tensor count does not match layout");
  }
  std::vector<bool> seen(model.layout.tensors.size(), false);
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto name_len = read_le<std::uint16_t>(is);
    std::string name(name_len, '\0');
    is.read(name.data(), name_len);
    if (!is) throw DataFormatError("checkpoint: truncated tensor name");
    const auto rows = read_le<std::int32_t>(is);
    const auto cols = read_le<std::int32_t>(is);
    const TensorSpec* spec = model.layout.find(name);
    if (!spec) throw DataFormatError("checkpoint: unexpected tensor \"" + name + "\"");
    if (spec->rows != rows || spec->cols != cols) {
      std::ostringstream os;
      os << "checkpoint: tensor \"" << name << "\" has shape " << rows << "x"
         << cols << ", layout expects " << spec->rows << "x" << spec->cols;
      throw DataFormatError(os.str());
    }
    const std::size_t idx =
        static_cast<std::size_t>(spec - model.layout.tensors.data());
    if (seen[idx]) throw DataFormatError("checkpoint: duplicate tensor \"" + name + "\"");
    seen[idx] = true;
    double* p = model.params.data() + spec->offset;
    for (std::size_t j = 0; j < spec->size(); ++j) p[j] = read_le<double>(is);
  }
  return model;
}

}  // namespace tot
