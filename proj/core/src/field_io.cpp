#include "sparsify/field_io.hpp"

#include <array>
#include <bit>
#include <fstream>
#include <iomanip>

#include "sparsify/errors.hpp"

namespace sparsify {

namespace {

constexpr std::array<char, 4> kMagic{'W', 'P', 'F', '1'};

template <typename T>
void put_le(std::ostream& os, T value) {
  std::array<char, sizeof(T)> bytes{};
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    bytes[i] = static_cast<char>((value >> (8 * i)) & 0xffu);
  }
  os.write(bytes.data(), bytes.size());
}

template <typename T>
T get_le(std::istream& is) {
  std::array<unsigned char, sizeof(T)> bytes{};
  is.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!is) throw Error("field dump truncated");
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    value |= static_cast<T>(bytes[i]) << (8 * i);
  }
  return value;
}

std::uint64_t expected_count(int dim, int n) {
  std::uint64_t count = 1;
  for (int a = 0; a < dim; ++a) count *= static_cast<std::uint64_t>(n);
  return count;
}

}  // namespace

std::string_view to_string(FieldKind kind) {
  switch (kind) {
    case FieldKind::solution:
      return "solution";
    case FieldKind::medium:
      return "medium";
    case FieldKind::coefficient:
      return "coefficient";
    case FieldKind::rhs:
      return "rhs";
  }
  return "unknown";
}

void write_field(const std::filesystem::path& path, const FieldDump& field) {
  if (field.values.size() != expected_count(field.dim, field.n)) {
    throw Error("field dump: value count does not match n^d");
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  os.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(field.dim));
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(field.n));
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(field.kind));
  put_le<std::uint64_t>(os, field.values.size());
  put_le<std::uint64_t>(os, 0);
  for (double v : field.values) put_le<std::uint64_t>(os, std::bit_cast<std::uint64_t>(v));
  if (!os) throw Error("failed writing " + path.string());
}

FieldDump read_field(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path.string());
  std::array<char, 4> magic{};
  is.read(magic.data(), magic.size());
  if (!is || magic != kMagic) throw Error(path.string() + ": not a WPF1 field dump");
  FieldDump field;
  field.dim = static_cast<int>(get_le<std::uint32_t>(is));
  field.n = static_cast<int>(get_le<std::uint32_t>(is));
  field.kind = static_cast<FieldKind>(get_le<std::uint32_t>(is));
  const auto count = get_le<std::uint64_t>(is);
  get_le<std::uint64_t>(is);
  if (field.dim < 1 || field.dim > 3 || count != expected_count(field.dim, field.n)) {
    throw Error(path.string() + ": header size fields are inconsistent");
  }
  field.values.resize(count);
  for (auto& v : field.values) v = std::bit_cast<double>(get_le<std::uint64_t>(is));
  return field;
}

void write_field_text(const std::filesystem::path& path, const FieldDump& field) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  os << "# " << to_string(field.kind) << " d=" << field.dim << " n=" << field.n << '\n';
  os << std::setprecision(17);
  std::array<int, 3> c{0, 0, 0};
  for (std::size_t i = 0; i < field.values.size(); ++i) {
    std::size_t rest = i;
    for (int a = field.dim - 1; a >= 0; --a) {
      c[static_cast<std::size_t>(a)] = static_cast<int>(rest % static_cast<std::size_t>(field.n));
      rest /= static_cast<std::size_t>(field.n);
    }
    for (int a = 0; a < field.dim; ++a) os << c[static_cast<std::size_t>(a)] << ' ';
    os << field.values[i] << '\n';
  }
}

}  // namespace sparsify
