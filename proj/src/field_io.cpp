#include "ergoham/field_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "ergoham/errors.hpp"

namespace ergoham {

namespace {

static_assert(std::endian::native == std::endian::little,
              "ERGH I/O assumes a little-endian host");

template <class T>
void put(std::ostream& os, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  os.write(buf, sizeof(T));
}

template <class T>
T get(std::istream& is) {
  char buf[sizeof(T)];
  if (!is.read(buf, sizeof(T))) throw ValidationError("ERGH: truncated header");
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}

} // namespace

void write_ergh(const std::filesystem::path& path, const SpaceTimeField& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  os.write("ERGH", 4);
  put<std::uint8_t>(os, kErghVersion);
  put<std::uint8_t>(os, static_cast<std::uint8_t>(f.space().dim()));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(f.space().n()));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(f.is_stationary() ? 1 : f.nt()));
  put<double>(os, f.time().period());
  auto v = f.values();
  os.write(reinterpret_cast<const char*>(v.data()),
           static_cast<std::streamsize>(v.size() * sizeof(double)));
  if (!os) throw Error("write failed: " + path.string());
}

SpaceTimeField read_ergh(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ValidationError("cannot open " + path.string());
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "ERGH", 4) != 0)
    throw ValidationError(path.string() + ": not an ERGH file");
  const auto version = get<std::uint8_t>(is);
  if (version != kErghVersion)
    throw ValidationError(path.string() + ": unsupported ERGH version " + std::to_string(version));
  const int dim = get<std::uint8_t>(is);
  const auto n = get<std::uint32_t>(is);
  const auto nt = get<std::uint32_t>(is);
  const double period = get<double>(is);
  TorusGrid space(dim, static_cast<int>(n));
  TimeGrid time = nt == 1 ? TimeGrid::stationary() : TimeGrid(period, static_cast<int>(nt));
  std::vector<double> values(space.size() * nt);
  if (!is.read(reinterpret_cast<char*>(values.data()),
               static_cast<std::streamsize>(values.size() * sizeof(double))))
    throw ValidationError(path.string() + ": truncated data");
  if (is.peek() != std::char_traits<char>::eof())
    throw ValidationError(path.string() + ": trailing bytes");
  return SpaceTimeField(space, time, std::move(values));
}

void write_ergh_sidecar(const std::filesystem::path& path, const SpaceTimeField& f) {
  nlohmann::ordered_json j;
  j["format"] = "ERGH";
  j["version"] = kErghVersion;
  j["dim"] = f.space().dim();
  j["n"] = f.space().n();
  j["nt"] = f.is_stationary() ? 1 : f.nt();
  j["period"] = f.time().period();
  j["stationary"] = f.is_stationary();
  auto v = f.values();
  j["values"] = std::vector<double>(v.begin(), v.end());
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  os << j.dump(1) << '\n';
}

} // namespace ergoham
