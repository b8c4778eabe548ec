#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

namespace sparsify {

enum class FieldKind : std::uint32_t {
  solution = 1,
  medium = 2,
  coefficient = 3,
  rhs = 4,
};

std::string_view to_string(FieldKind kind);

/// A real field on the n^d grid, row-major in (j1, ..., jd).
struct FieldDump {
  int dim = 0;
  int n = 0;
  FieldKind kind = FieldKind::solution;
  std::vector<double> values;
};

/// Binary layout, all little-endian:
///   bytes  0..3   magic "WPF1"
///   bytes  4..7   u32 dimension
///   bytes  8..11  u32 points per axis
///   bytes 12..15  u32 payload kind (FieldKind)
///   bytes 16..23  u64 number of values (n^d)
///   bytes 24..31  reserved, zero
///   then n^d IEEE-754 binary64 values.
void write_field(const std::filesystem::path& path, const FieldDump& field);

/// Throws sparsify::Error on a bad magic, truncated payload or size mismatch.
FieldDump read_field(const std::filesystem::path& path);

/// One "j1 ... jd value" line per grid point, for external plotting tools.
void write_field_text(const std::filesystem::path& path, const FieldDump& field);

}  // namespace sparsify
