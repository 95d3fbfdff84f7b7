#pragma once

#include <bit>
#include <charconv>
#include <cstring>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hsflat/core/error.hpp"
#include "hsflat/core/multivalued.hpp"
#include "hsflat/core/seminorm.hpp"

namespace hsflat::io {

using nlohmann::json;

/// Shortest round-trip decimal form; "inf", "-inf", "nan" for non-finite values.
inline std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

/// JSON has no infinity; non-finite numbers are stored as strings.
inline json jnum(double v) {
  if (std::isfinite(v)) return v;
  return num(v);
}

inline json to_json(const ParabolicPoint& p) { return json::array({jnum(p.x), jnum(p.xn), jnum(p.t)}); }

inline json to_json(const SeminormReport& r) {
  return {{"alpha", jnum(r.alpha)},       {"truncation", jnum(r.truncation)},
          {"region", r.region},           {"value", jnum(r.value)},
          {"witness_p", to_json(r.witness_p)}, {"witness_q", to_json(r.witness_q)},
          {"pairs", r.pairs}};
}

/// Writes to a sibling temporary file and renames, so readers never see partial files.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline void write_json(const std::filesystem::path& path, const json& j) {
  write_file_atomic(path, j.dump(2) + "\n");
}

/// Simple CSV table: header row, then rows of already formatted cells.
class CsvTable {
public:
  explicit CsvTable(std::vector<std::string> header) : ncols_(header.size()) { add(header); }

  void add(const std::vector<std::string>& row) {
    detail::require(row.size() == ncols_, "CsvTable: row width mismatch");
    for (std::size_t i = 0; i < row.size(); ++i) out_ << (i ? "," : "") << row[i];
    out_ << '\n';
  }
  void add(const std::vector<double>& row) {
    std::vector<std::string> cells;
    cells.reserve(row.size());
    for (double v : row) cells.push_back(num(v));
    add(cells);
  }

  [[nodiscard]] std::string str() const { return out_.str(); }
  void save(const std::filesystem::path& p) const { write_file_atomic(p, str()); }

private:
  std::size_t ncols_;
  std::ostringstream out_;
};

/// Columnar CSV: index,x,xn,t,lo,hi. Empty values appear as lo=inf, hi=-inf.
inline std::string field_csv(const MultiValuedSample& v) {
  CsvTable t({"index", "x", "xn", "t", "lo", "hi"});
  for (std::size_t k = 0; k < v.size(); ++k) {
    const auto p = v.point(k);
    t.add({std::to_string(k), num(p.x), num(p.xn), num(p.t), num(v[k].lo), num(v[k].hi)});
  }
  return t.str();
}

namespace detail {
template <class T>
void put_le(std::string& out, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big)
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
  out.append(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get_le(const std::string& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw Error("binary field: truncated input");
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, in.data() + pos, sizeof(T));
  if constexpr (std::endian::native == std::endian::big)
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
  pos += sizeof(T);
  T v;
  std::memcpy(&v, bytes, sizeof(T));
  return v;
}
} // namespace detail

/// Binary layout: "HHF1", uint32 nx, nlevels, ntimes, then doubles
/// L_x, x_offset, levels[], times[], (lo,hi) per node in storage order.
inline std::string field_binary(const MultiValuedSample& v) {
  std::string out = "HHF1";
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(v.nx()));
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(v.nlevels()));
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(v.ntimes()));
  detail::put_le<double>(out, v.grid().length());
  detail::put_le<double>(out, v.x_offset());
  for (double l : v.levels()) detail::put_le<double>(out, l);
  for (double t : v.times()) detail::put_le<double>(out, t);
  for (const auto& s : v.values()) {
    detail::put_le<double>(out, s.lo);
    detail::put_le<double>(out, s.hi);
  }
  return out;
}

inline MultiValuedSample field_from_binary(const std::string& in) {
  if (in.size() < 4 || in.compare(0, 4, "HHF1") != 0) throw Error("binary field: bad magic");
  std::size_t pos = 4;
  const auto nx = detail::get_le<std::uint32_t>(in, pos);
  const auto nl = detail::get_le<std::uint32_t>(in, pos);
  const auto nt = detail::get_le<std::uint32_t>(in, pos);
  const double len = detail::get_le<double>(in, pos);
  const double off = detail::get_le<double>(in, pos);
  std::vector<double> levels(nl), times(nt);
  for (auto& l : levels) l = detail::get_le<double>(in, pos);
  for (auto& t : times) t = detail::get_le<double>(in, pos);
  MultiValuedSample v(PeriodicGrid1D(static_cast<int>(nx), len), levels, times, off);
  for (auto& s : v.values()) {
    s.lo = detail::get_le<double>(in, pos);
    s.hi = detail::get_le<double>(in, pos);
  }
  if (pos != in.size()) throw Error("binary field: trailing bytes");
  return v;
}

} // namespace hsflat::io
