#include "probe/npy.hpp"

#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

#include "probe/error.hpp"

namespace probe {

static_assert(std::endian::native == std::endian::little,
              "NPY reader assumes a little-endian host");

namespace {

constexpr std::string_view kMagic = "\x93NUMPY";
constexpr std::size_t kAlign = 64;

class HeaderParser {
 public:
  explicit HeaderParser(std::string_view text) : text_(text) {}

  std::string_view value_after(std::string_view key) const {
    const std::string quoted = "'" + std::string(key) + "'";
    auto pos = text_.find(quoted);
    if (pos == std::string_view::npos) {
      throw DataError("NPY header missing key " + quoted);
    }
    pos = text_.find(':', pos + quoted.size());
    if (pos == std::string_view::npos) throw DataError("NPY header malformed near " + quoted);
    ++pos;
    while (pos < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos]))) ++pos;
    return text_.substr(pos);
  }

  std::string descr() const {
    auto rest = value_after("descr");
    if (rest.empty() || (rest[0] != '\'' && rest[0] != '"')) {
      throw DataError("NPY header: descr is not a string");
    }
    const char quote = rest[0];
    const auto end = rest.find(quote, 1);
    if (end == std::string_view::npos) throw DataError("NPY header: unterminated descr");
    return std::string(rest.substr(1, end - 1));
  }

  bool fortran_order() const {
    auto rest = value_after("fortran_order");
    if (rest.starts_with("False")) return false;
    if (rest.starts_with("True")) return true;
    throw DataError("NPY header: fortran_order is not a boolean");
  }

  std::vector<std::size_t> shape() const {
    auto rest = value_after("shape");
    if (rest.empty() || rest[0] != '(') throw DataError("NPY header: shape is not a tuple");
    const auto close = rest.find(')');
    if (close == std::string_view::npos) throw DataError("NPY header: unterminated shape");
    std::vector<std::size_t> dims;
    std::size_t pos = 1;
    while (pos < close) {
      const char c = rest[pos];
      if (std::isdigit(static_cast<unsigned char>(c))) {
        std::size_t value = 0;
        while (pos < close && std::isdigit(static_cast<unsigned char>(rest[pos]))) {
          value = value * 10 + static_cast<std::size_t>(rest[pos] - '0');
          ++pos;
        }
        dims.push_back(value);
      } else if (c == ',' || c == ' ' || c == 'L') {
        ++pos;
      } else {
        throw DataError("NPY header: unexpected character in shape");
      }
    }
    return dims;
  }

 private:
  std::string_view text_;
};

std::string shape_literal(std::span<const std::size_t> shape) {
  std::string out = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) out += ", ";
    out += std::to_string(shape[i]);
  }
  if (shape.size() == 1) out += ",";
  out += ")";
  return out;
}

std::size_t element_count(std::span<const std::size_t> shape) {
  std::size_t count = 1;
  for (auto d : shape) {
    if (d != 0 && count > std::numeric_limits<std::size_t>::max() / d) {
      throw DataError("NPY shape overflows");
    }
    count *= d;
  }
  return count;
}

std::string read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open array file " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

NpyArray parse_npy(std::string_view bytes) {
  if (bytes.size() < 10 || bytes.substr(0, kMagic.size()) != kMagic) {
    throw DataError("not an NPY file (bad magic)");
  }
  const auto major = static_cast<unsigned char>(bytes[6]);
  std::size_t header_len = 0;
  std::size_t prefix = 0;
  if (major == 1) {
    header_len = static_cast<unsigned char>(bytes[8]) |
                 (static_cast<std::size_t>(static_cast<unsigned char>(bytes[9])) << 8);
    prefix = 10;
  } else if (major == 2 || major == 3) {
    if (bytes.size() < 12) throw DataError("truncated NPY header");
    for (int b = 3; b >= 0; --b) {
      header_len = (header_len << 8) | static_cast<unsigned char>(bytes[8 + b]);
    }
    prefix = 12;
  } else {
    throw DataError("unsupported NPY format version " + std::to_string(major));
  }
  if (bytes.size() < prefix + header_len) throw DataError("truncated NPY header");

  const HeaderParser header(bytes.substr(prefix, header_len));
  const auto descr = header.descr();
  NpyArray array;
  std::size_t item_size = 0;
  if (descr == "<f8") {
    array.dtype = NpyDtype::float64;
    item_size = 8;
  } else if (descr == "<f4") {
    array.dtype = NpyDtype::float32;
    item_size = 4;
  } else {
    throw DataError("unsupported NPY element type '" + descr +
                    "' (expected little-endian float32 or float64)");
  }
  if (header.fortran_order()) throw DataError("Fortran-ordered NPY arrays are not supported");
  array.shape = header.shape();

  const std::size_t count = element_count(array.shape);
  const auto payload = bytes.substr(prefix + header_len);
  if (payload.size() != count * item_size) {
    throw DataError("NPY payload holds " + std::to_string(payload.size()) + " bytes, expected " +
                    std::to_string(count * item_size));
  }
  array.values.resize(count);
  if (array.dtype == NpyDtype::float64) {
    std::memcpy(array.values.data(), payload.data(), count * item_size);
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      float f;
      std::memcpy(&f, payload.data() + i * 4, 4);
      array.values[i] = static_cast<double>(f);
    }
  }
  return array;
}

NpyArray read_npy(const std::filesystem::path& path) {
  try {
    return parse_npy(read_all(path));
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::string encode_npy(std::span<const double> values, std::span<const std::size_t> shape) {
  if (element_count(shape) != values.size()) {
    throw DataError("encode_npy: shape does not match value count");
  }
  std::string dict = "{'descr': '<f8', 'fortran_order': False, 'shape': " + shape_literal(shape) + ", }";
  const std::size_t unpadded = kMagic.size() + 4 + dict.size() + 1;
  const std::size_t pad = kAlign - (unpadded % kAlign);
  dict.append(pad, ' ');
  dict.push_back('\n');
  if (dict.size() > 0xffff) throw DataError("NPY header too long for format 1.0");

  std::string out;
  out.reserve(10 + dict.size() + values.size() * 8);
  out.append(kMagic);
  out.push_back('\x01');
  out.push_back('\x00');
  out.push_back(static_cast<char>(dict.size() & 0xff));
  out.push_back(static_cast<char>((dict.size() >> 8) & 0xff));
  out += dict;
  const auto offset = out.size();
  out.resize(offset + values.size() * 8);
  if (!values.empty()) std::memcpy(out.data() + offset, values.data(), values.size() * 8);
  return out;
}

void write_npy(const std::filesystem::path& path, std::span<const double> values,
               std::span<const std::size_t> shape) {
  const auto bytes = encode_npy(values, shape);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write array file " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("failed writing array file " + path.string());
}

FeatureMatrix feature_matrix_from_npy(const NpyArray& array, std::string layer_name) {
  if (array.shape.empty()) throw DataError("array has no image axis (0-d)");
  const std::size_t n = array.shape.front();
  std::size_t dim = 1;
  for (std::size_t a = 1; a < array.shape.size(); ++a) dim *= array.shape[a];

  FeatureMatrix features;
  features.layer_name = std::move(layer_name);
  // Row-major source into a column-major matrix.
  features.data = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      array.values.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
  if (!features.data.allFinite()) {
    throw DataError((features.layer_name.empty() ? std::string("array") : features.layer_name) +
                    ": contains non-finite values");
  }
  return features;
}

FeatureMatrix read_feature_array(const std::filesystem::path& path, std::string layer_name) {
  const auto array = read_npy(path);
  try {
    return feature_matrix_from_npy(array, std::move(layer_name));
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_feature_array(const std::filesystem::path& path, const FeatureMatrix& features) {
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> row_major = features.data;
  const std::size_t shape[2] = {static_cast<std::size_t>(features.rows()),
                                static_cast<std::size_t>(features.cols())};
  write_npy(path, std::span<const double>(row_major.data(), static_cast<std::size_t>(row_major.size())),
            shape);
}

}  // namespace probe
